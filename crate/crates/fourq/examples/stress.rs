use fourq::classify::{classify, factorize};
use fourq::family::{seed, Family};
use fourq::linalg::magic::random_sl2_bounded;
use fourq::state::{apply_local, LocalOperator};
use rand::SeedableRng;

fn main() {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10);
    let cond: f64 = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(10.0);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(777);
    let mut failures = 0;
    for fam in Family::all() {
        let p = fam.default_params();
        let s = seed(*fam, &p).unwrap();
        let mut cls_fail = 0;
        let mut fac_fail = 0;
        let mut worst = 0.0f64;
        for _ in 0..n {
            let g = LocalOperator::new([
                random_sl2_bounded(&mut rng, cond),
                random_sl2_bounded(&mut rng, cond),
                random_sl2_bounded(&mut rng, cond),
                random_sl2_bounded(&mut rng, cond),
            ]);
            let psi = apply_local(&g, &s.state).unwrap();
            match classify(&psi) {
                Ok(d) if d.family == *fam => match factorize(&psi, &d) {
                    Ok(f) => worst = worst.max(f.residual),
                    Err(e) => {
                        fac_fail += 1;
                        eprintln!("  {} factorize: {e}", fam.name());
                    }
                },
                Ok(d) => {
                    cls_fail += 1;
                    eprintln!("  {} misclassified as {}", fam.name(), d.family.name());
                }
                Err(e) => {
                    cls_fail += 1;
                    eprintln!("  {} error: {e}", fam.name());
                }
            }
        }
        if cls_fail + fac_fail > 0 {
            failures += 1;
            println!("{:>24}: cls_fail {cls_fail} fac_fail {fac_fail} worst {worst:.2e}", fam.name());
        } else {
            println!("{:>24}: ok, worst resid {worst:.2e}", fam.name());
        }
    }
    std::process::exit(if failures > 0 { 1 } else { 0 });
}
