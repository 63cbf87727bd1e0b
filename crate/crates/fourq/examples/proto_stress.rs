use fourq::classify::classify;
use fourq::family::Family;
use fourq::fixtures::{pattern_target, reachable_patterns};
use fourq::transform::{synthesize_protocol_auto, verdict, verify_protocol};
use rand::SeedableRng;

fn main() {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    let mut bad = 0;
    for (fam, label) in reachable_patterns() {
        let params = fam.default_params();
        let mut cls_fail = 0;
        let mut verd_fail = 0;
        let mut proto_fail = 0;
        let mut verify_fail = 0;
        for _ in 0..n {
            let target = match pattern_target(fam, label, &params, &mut rng) {
                Ok(Some(t)) => t,
                _ => continue,
            };
            match classify(&target) {
                Ok(d) if d.family == fam => {}
                Ok(d) => {
                    cls_fail += 1;
                    eprintln!("  {} [{}]: classified {}", fam.name(), label, d.family.name());
                    continue;
                }
                Err(e) => {
                    cls_fail += 1;
                    eprintln!("  {} [{}]: classify err {e}", fam.name(), label);
                    continue;
                }
            }
            match verdict(&target) {
                Ok(v) if v.reachable => {}
                Ok(v) => {
                    verd_fail += 1;
                    eprintln!("  {} [{}]: verdict not reachable ({})", fam.name(), label, v.basis);
                    continue;
                }
                Err(e) => {
                    verd_fail += 1;
                    eprintln!("  {} [{}]: verdict err {e}", fam.name(), label);
                    continue;
                }
            }
            match synthesize_protocol_auto(&target) {
                Ok(p) => {
                    let rep = verify_protocol(&p);
                    if !rep.all_pass {
                        verify_fail += 1;
                        eprintln!("  {} [{}]: verify failed {:?}", fam.name(), label, rep.completeness_deficit);
                    }
                }
                Err(e) => {
                    proto_fail += 1;
                    eprintln!("  {} [{}]: protocol err {e}", fam.name(), label);
                }
            }
        }
        let total_bad = cls_fail + verd_fail + proto_fail + verify_fail;
        bad += total_bad;
        println!(
            "{:>24} [{label}]: cls {cls_fail} verd {verd_fail} proto {proto_fail} verify {verify_fail}",
            fam.name()
        );
    }
    std::process::exit(if bad > 0 { 1 } else { 0 });
}
