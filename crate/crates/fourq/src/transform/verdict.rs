// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Per-family LOCC verdicts: whether the standard form of a state matches
//! its family's reachable pattern, convertible pattern, both or neither.

use crate::classify::ClassifyError;
use crate::family::Family;
use crate::mat::{cr, Mat2};
use crate::standard_form::{l05_eq_g1_form, standard_form, StandardForm, StandardFormError};
use crate::state::{reduced_density, PureState4};
use crate::symmetry::{symmetry_group, SymmetryError};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VerdictError {
    #[error("classification failed: {0}")]
    Classify(#[from] ClassifyError),
    #[error("standard form failed: {0}")]
    StandardForm(#[from] StandardFormError),
    #[error("symmetry table failed: {0}")]
    Symmetry(#[from] SymmetryError),
}

/// LOCC transformation verdict for one state.
#[derive(Clone, Debug, Serialize)]
pub struct TransformVerdict {
    pub family: String,
    pub in_mes: bool,
    pub reachable: bool,
    pub convertible: bool,
    pub isolated: bool,
    /// Which characterization decided the flags.
    pub basis: String,
    /// Set only for the 3-cycle class, whose full LOCC treatment is out of
    /// reach of the standard-form analysis; the flags then carry the
    /// symmetry-pattern evaluation as a caveat, not a theorem.
    pub unresolved: bool,
    /// The completely-mixed-marginals shortcut fired (sufficient for
    /// membership in the maximally entangled set).
    pub mixed_marginals_fast_path: bool,
    pub notes: Vec<String>,
}

const VTOL: f64 = 1e-8;

fn is_zero(v: [f64; 3]) -> bool {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt() <= VTOL
}

/// The Bloch vector lies on the w axis (w in 1..=3), zero included.
fn axis_type(v: [f64; 3], w: usize) -> bool {
    (0..3).all(|k| k == w - 1 || v[k].abs() <= VTOL)
}

fn diag(v: [f64; 3]) -> bool {
    axis_type(v, 3)
}

fn parallel_or_zero(a: [f64; 3], b: [f64; 3]) -> bool {
    let na = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    let nb = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
    if na <= VTOL || nb <= VTOL {
        return true;
    }
    let c0 = a[1] * b[2] - a[2] * b[1];
    let c1 = a[2] * b[0] - a[0] * b[2];
    let c2 = a[0] * b[1] - a[1] * b[0];
    (c0 * c0 + c1 * c1 + c2 * c2).sqrt() <= 1e-7 * na * nb
}

/// Sitewise commutation of a Gram operator with a symmetry factor.
fn commutes(g: &Mat2, s: &Mat2) -> bool {
    let c = *g * *s - *s * *g;
    c.norm_fro() <= 1e-8 * (g.norm_fro() * s.norm_fro()).max(1e-30)
}

/// Exactly-three / at-least-three sitewise commutation over the nontrivial
/// finite elements (the Pauli-group families).
fn finite_commute_patterns(
    sf: &StandardForm,
    group: &crate::symmetry::SymmetryGroup,
) -> (bool, bool) {
    let mut exactly3 = false;
    let mut atleast3 = false;
    for e in &group.finite_elements {
        // skip (proportional) identity
        let nontrivial = e.op.ops.iter().any(|s| {
            let t = s.trace() / cr(2.0);
            (*s - Mat2::identity().scale(t)).norm_fro() > 1e-9 * s.norm_fro().max(1e-30)
        });
        if !nontrivial {
            continue;
        }
        let n = (0..4)
            .filter(|&p| commutes(&sf.grams[p].g, &e.op.ops[p]))
            .count();
        if n == 3 {
            exactly3 = true;
        }
        if n >= 3 {
            atleast3 = true;
        }
    }
    (exactly3, atleast3)
}

/// Commutation patterns for groups of the form
/// m in {0,1}: X^m * (phase circle on pair A) x (phase circle on pair B),
/// where the circles act along z for m = 0 and as free xy axes for m = 1.
/// `mirror` flips the xy-axis correlation inside each pair (inverse-phase
/// pairs). Returns (exactly three commuting sites achievable, at least
/// three achievable) over nontrivial parameter choices.
fn paired_circle_patterns(v: [[f64; 3]; 4], pairs: [[usize; 2]; 2], mirror: [bool; 2]) -> (bool, bool) {
    let mut counts: Vec<usize> = Vec::new();
    // m = 0: sites commute iff diagonal; pair circles can be trivial
    // independently: (z1 trivial?) x (z2 trivial?), not both trivial
    for z1_trivial in [false, true] {
        for z2_trivial in [false, true] {
            if z1_trivial && z2_trivial {
                continue;
            }
            let mut n = 0;
            for (pi, pair) in pairs.iter().enumerate() {
                let trivial = if pi == 0 { z1_trivial } else { z2_trivial };
                for &site in pair {
                    if trivial || diag(v[site]) {
                        n += 1;
                    }
                }
            }
            counts.push(n);
        }
    }
    // m = 1: site operator on pair k has a free xy axis theta_k; within the
    // pair the axes are equal (or mirrored). A site commutes iff its vector
    // lies on that xy axis (zero vectors always do).
    // For each pair, the number of commuting sites is:
    //   2 if both vectors are xy-planar and mutually compatible
    //   1 if at least one vector is xy-planar (axis chosen for it) --
    //     unless both are xy-planar incompatible, where either one works
    //   0 if neither vector is xy-planar
    let xy = |w: [f64; 3]| w[2].abs() <= VTOL;
    let mut pair_opts: Vec<Vec<usize>> = Vec::new();
    for (pi, pair) in pairs.iter().enumerate() {
        let a = v[pair[0]];
        let b0 = v[pair[1]];
        // mirrored pairs: the partner's effective vector reflects y
        let b = if mirror[pi] { [b0[0], -b0[1], b0[2]] } else { b0 };
        let mut opts = vec![0usize];
        if xy(a) || xy(b) {
            opts.push(1);
        }
        if xy(a) && xy(b) {
            // both on a common axis? zero vectors are always compatible
            let compatible = parallel_or_zero(a, b);
            if compatible {
                opts.push(2);
            }
        }
        pair_opts.push(opts);
    }
    for &na in &pair_opts[0] {
        for &nb in &pair_opts[1] {
            counts.push(na + nb);
        }
    }
    let exactly3 = counts.iter().any(|&n| n == 3);
    let atleast3 = counts.iter().any(|&n| n >= 3);
    (exactly3, atleast3)
}

/// Compute the verdict of a state.
pub fn verdict(psi: &PureState4) -> Result<TransformVerdict, VerdictError> {
    let sf = standard_form(psi)?;
    verdict_of_form(psi, &sf)
}

pub fn verdict_of_form(
    psi: &PureState4,
    sf: &StandardForm,
) -> Result<TransformVerdict, VerdictError> {
    let v: [[f64; 3]; 4] = [
        sf.grams[0].bloch,
        sf.grams[1].bloch,
        sf.grams[2].bloch,
        sf.grams[3].bloch,
    ];
    let mut notes: Vec<String> = Vec::new();
    let mut unresolved = false;

    use Family::*;
    let (reachable, convertible, basis): (bool, bool, &str) = match sf.desc.family {
        GabcdGeneric => {
            let mut reach = false;
            let mut conv = false;
            for w in 1..=3usize {
                for i in 0..4 {
                    let others = (0..4).filter(|&j| j != i).all(|j| axis_type(v[j], w));
                    if others {
                        conv = true;
                        if !axis_type(v[i], w) {
                            reach = true;
                        }
                    }
                }
            }
            (reach, conv, "generic reachable/convertible patterns")
        }
        GabcdTwo2Cycles | Gabcd4Cycle | La2b2Minus | Lstate3Cycle => {
            let group = symmetry_group(&sf.desc)?;
            let (e3, ge3) = finite_commute_patterns(sf, &group);
            if sf.desc.family == Lstate3Cycle {
                unresolved = true;
                notes.push(
                    "3-cycle class: separable and LOCC transformations are known to \
                     differ; flags evaluate the symmetry patterns only"
                        .into(),
                );
            }
            let basis = match sf.desc.family {
                GabcdTwo2Cycles => "two-2-cycle commuting patterns",
                Gabcd4Cycle => "4-cycle (relabeled two-2-cycle) patterns",
                La2b2Minus => "minus-pair Pauli patterns",
                _ => "3-cycle symmetry patterns (unresolved)",
            };
            (e3, ge3, basis)
        }
        GabcdTripleDegenerate => {
            // extract the three non-anchored vectors
            let anchored: usize = sf
                .fixings
                .iter()
                .filter_map(|f| {
                    f.strip_prefix("family1_anchor_party")
                        .and_then(|s| s.parse::<usize>().ok())
                })
                .next()
                .map(|p| p - 1)
                .unwrap_or(3);
            let triple: Vec<[f64; 3]> = (0..4).filter(|&p| p != anchored).map(|p| v[p]).collect();
            let pair = |i: usize, j: usize| parallel_or_zero(triple[i], triple[j]);
            let any_pair = pair(0, 1) || pair(0, 2) || pair(1, 2);
            let zeros = triple.iter().filter(|t| is_zero(**t)).count();
            let nonzero: Vec<[f64; 3]> = triple.iter().copied().filter(|t| !is_zero(*t)).collect();
            let all_parallel_nonzero = zeros == 0
                && parallel_or_zero(nonzero[0], nonzero[1])
                && parallel_or_zero(nonzero[0], nonzero[2]);
            let two_parallel_one_zero = zeros == 1
                && nonzero.len() == 2
                && parallel_or_zero(nonzero[0], nonzero[1]);
            let mes_convertible = zeros == 3 || two_parallel_one_zero || all_parallel_nonzero;
            let reach = any_pair && !mes_convertible;
            (reach, any_pair, "triple-degenerate vector patterns")
        }
        GabcdAdcc => {
            let mut reach = false;
            let mut conv = false;
            for i in 0..4 {
                let others_x = (0..4).filter(|&j| j != i).all(|j| axis_type(v[j], 1));
                if others_x {
                    conv = true;
                    if !axis_type(v[i], 1) {
                        reach = true;
                    }
                }
                let others_d = (0..4).filter(|&j| j != i).all(|j| diag(v[j]));
                let xz = v[i][1].abs() <= VTOL;
                if others_d && xz {
                    conv = true;
                    if v[i][0].abs() > VTOL {
                        reach = true;
                    }
                }
            }
            (reach, conv, "one-free-party x / diagonal patterns")
        }
        GabcdAacc => {
            let (e3, ge3) = paired_circle_patterns(v, [[0, 2], [1, 3]], [false, false]);
            (e3, ge3, "paired-circle commuting patterns")
        }
        GabcdAd00 => {
            let (e3, ge3) = paired_circle_patterns(v, [[0, 1], [2, 3]], [true, true]);
            (e3, ge3, "paired-circle commuting patterns (relabeled)")
        }
        GabcdAaia => {
            let xt = |p: usize| axis_type(v[p], 1);
            let yt = |p: usize| axis_type(v[p], 2);
            let dg = |p: usize| diag(v[p]);
            let z = |p: usize| is_zero(v[p]);
            let reach = (xt(0) && xt(1) && xt(3) && !xt(2))
                || (xt(0) && xt(1) && xt(2) && !xt(3))
                || (z(0) && xt(1) && !dg(2))
                || (xt(0) && z(1) && !dg(3))
                || (xt(0) && xt(1) && dg(2) && (!z(0) || !yt(3)))
                || (xt(0) && xt(1) && dg(3) && (!z(1) || !yt(2)))
                || (xt(0) && xt(1) && yt(2) && !dg(3))
                || (xt(0) && xt(1) && yt(3) && !dg(2));
            let conv = (xt(0) && xt(1) && xt(3))
                || (xt(0) && xt(1) && xt(2))
                || (z(0) && xt(1))
                || (xt(0) && z(1))
                || (xt(0) && xt(1) && dg(2))
                || (xt(0) && xt(1) && dg(3))
                || (xt(0) && xt(1) && yt(2))
                || (xt(0) && xt(1) && yt(3));
            (reach, conv, "listed reachable/convertible forms")
        }
        Ghz => {
            let all_x_nonzero = (0..4).all(|p| axis_type(v[p], 1) && !is_zero(v[p]));
            let all_zero = (0..4).all(|p| is_zero(v[p]));
            let in_mes = all_x_nonzero || all_zero;
            (!in_mes, true, "GHZ-class x-form characterization")
        }
        Labc2Generic | La2b2Generic | La203plus1 | Labc2Aba2 => {
            let off = (0..4).filter(|&p| !diag(v[p])).count();
            let basis = if sf.desc.family == Labc2Aba2 {
                "single off-diagonal party (shear-reduced)"
            } else {
                "single off-diagonal party"
            };
            (off == 1, off <= 1, basis)
        }
        Labc2Aac2 | Lab02Ab | La2b200b2 => {
            let z1 = is_zero(v[0]);
            let d234 = (1..4).all(|p| diag(v[p]));
            let off234 = (1..4).filter(|&p| !diag(v[p])).count();
            let reach = (!z1 && d234) || (z1 && off234 == 1);
            let conv = (!z1 && d234) || (z1 && off234 <= 1) || (z1 && d234);
            (reach, conv, "diagonal-circle patterns")
        }
        Labc2Aaa2 => {
            let off34 = (2..4).filter(|&p| !diag(v[p])).count();
            if !is_zero(v[0]) || !diag(v[1]) {
                notes.push("standard form did not reach the 1 x d2 shape".into());
            }
            (off34 == 1, off34 <= 1, "back-pair diagonal patterns")
        }
        Labc200c2 => {
            let reach = pair_circle_reach(&v, [0, 1]) || pair_circle_reach(&v, [2, 3]);
            let conv = is_zero(v[0]) || diag(v[1]) || is_zero(v[2]) || diag(v[3]);
            (reach, conv, "two independent circle patterns")
        }
        Lab02Aa => {
            let reach = pair_circle_reach(&v, [1, 2]) || pair_circle_reach(&v, [0, 3]);
            let conv = is_zero(v[1]) || diag(v[2]) || is_zero(v[0]) || diag(v[3]);
            (reach, conv, "two independent circle patterns (relabeled)")
        }
        La2b2Equal => {
            let xt = |p: usize| axis_type(v[p], 1);
            let z = |p: usize| is_zero(v[p]);
            let dg = |p: usize| diag(v[p]);
            let reach = (xt(1) && xt(3) && !dg(2))
                || (z(1) && !dg(3))
                || (xt(1) && !z(1) && dg(3))
                || (xt(1) && dg(2) && !xt(3))
                || (z(1) && dg(2) && !z(3));
            let conv = (xt(1) && xt(3)) || z(1) || (xt(1) && dg(3)) || (xt(1) && dg(2));
            (reach, conv, "listed reachable/convertible forms")
        }
        Lba3Generic | La4Nonzero => (false, false, "trivial symmetry: every state isolated"),
        Lba3Aa3 | Lba30b02 => (false, false, "shear-only symmetry admits no transformation"),
        W => {
            let x0 = sf.w_coeffs.map(|x| x[0]).unwrap_or(0.0);
            (x0 > VTOL, true, "W-class coefficient characterization")
        }
        La40202 => {
            let off = (1..4).filter(|&p| !diag(v[p])).count();
            (off >= 1 && off <= 2, off <= 2, "back-trio off-diagonal counts")
        }
        L05plus3 => {
            let anchor4 = sf.fixings.iter().any(|f| f == "l05_branch_anchor_party4");
            let eq1 = l05_eq_g1_form(&sf.grams[0]);
            let (reach, conv) = if anchor4 {
                ((eq1 && !diag(v[2])), eq1)
            } else {
                let d4 = diag(v[3]);
                (
                    (d4 && !eq1) || (!d4 && eq1),
                    d4 || eq1,
                )
            };
            (reach, conv, "anchored-branch characterization")
        }
        L07plus1 => {
            let off = (1..4).filter(|&p| !diag(v[p])).count();
            let reach = off == 1 || (off == 0 && !is_zero(v[0]));
            let conv = off <= 1;
            (reach, conv, "front-circle characterization")
        }
        Biseparable => {
            return Err(VerdictError::Classify(ClassifyError::Biseparable {
                partition: "?".into(),
            }))
        }
    };

    // completely-mixed-marginals shortcut: sufficient for membership in the
    // maximally entangled set
    let mixed = (1..=4).all(|p| {
        let rho = reduced_density(&psi.normalized().unwrap_or(*psi), p);
        (rho - Mat2::identity().scale(cr(0.5))).norm_fro() <= 1e-9
    });
    let mut reachable = reachable;
    if mixed {
        if reachable && !unresolved {
            notes.push(
                "family pattern called the state reachable but all marginals are \
                 completely mixed; the marginal argument wins"
                    .into(),
            );
        }
        reachable = false;
    }
    let in_mes = !reachable;
    let isolated = !reachable && !convertible;
    Ok(TransformVerdict {
        family: sf.desc.family.name().into(),
        in_mes,
        reachable,
        convertible,
        isolated,
        basis: basis.into(),
        unresolved,
        mixed_marginals_fast_path: mixed,
        notes,
    })
}

/// Reachable pattern of one circle pair (lead anchored to the x type by the
/// standard form): lead zero with the partner off-diagonal, or lead
/// non-zero x with the partner diagonal.
fn pair_circle_reach(v: &[[f64; 3]; 4], pair: [usize; 2]) -> bool {
    let lead = v[pair[0]];
    let partner = v[pair[1]];
    (is_zero(lead) && !diag(partner)) || (!is_zero(lead) && axis_type(lead, 1) && diag(partner))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{seed, Family};
    use crate::state::{apply_local, LocalOperator};

    #[test]
    fn ghz_seed_verdict() {
        let s = seed(Family::Ghz, &[]).unwrap();
        let v = verdict(&s.state).unwrap();
        assert!(v.in_mes);
        assert!(v.convertible);
        assert!(!v.reachable);
        assert!(!v.isolated);
        assert!(v.mixed_marginals_fast_path);
    }

    #[test]
    fn w_seed_verdict() {
        let s = seed(Family::W, &[]).unwrap();
        let v = verdict(&s.state).unwrap();
        assert!(v.in_mes, "W seed has x0 = 0");
        assert!(v.convertible);
        assert!(!v.isolated);
    }

    #[test]
    fn w_with_x0_reachable() {
        // d1 x d2 x g3 x 1 |W> with x0 != 0: amplitudes with a |0000> part
        use crate::mat::{c, Mat2, ZC};
        let s = seed(Family::W, &[]).unwrap();
        let g3 = Mat2::new(cr(1.0), c(0.45, 0.0), ZC, cr(0.8));
        let op = LocalOperator::new([
            Mat2::diag(cr(1.0), cr(0.7)),
            Mat2::diag(cr(1.0), cr(1.2)),
            g3,
            Mat2::identity(),
        ]);
        let psi = apply_local(&op, &s.state).unwrap();
        let v = verdict(&psi).unwrap();
        assert!(v.reachable, "{v:?}");
        assert!(!v.in_mes);
        assert!(v.convertible);
    }

    #[test]
    fn haar_random_generic_is_isolated() {
        use num_complex::Complex64 as C64;
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(61);
        let mut isolated = 0;
        for _ in 0..10 {
            let mut amp = [crate::mat::ZC; 16];
            for a in amp.iter_mut() {
                *a = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            }
            let psi = PureState4 { amp }.normalized().unwrap();
            let v = verdict(&psi).unwrap();
            if v.isolated {
                isolated += 1;
            }
            assert!(v.in_mes);
        }
        assert!(isolated >= 9, "only {isolated}/10 isolated");
    }

    #[test]
    fn lba3_and_la4_all_isolated() {
        for fam in [Family::Lba3Generic, Family::Lba3Aa3, Family::Lba30b02, Family::La4Nonzero] {
            let p = fam.default_params();
            let s = seed(fam, &p).unwrap();
            let v = verdict(&s.state).unwrap();
            assert!(v.isolated, "{}", fam.name());
            assert!(v.in_mes, "{}", fam.name());
        }
    }

    #[test]
    fn labc2_one_offdiagonal_reachable() {
        use crate::mat::{c, Mat2, ZC};
        let p = Family::Labc2Generic.default_params();
        let s = seed(Family::Labc2Generic, &p).unwrap();
        let h1 = Mat2::new(cr(1.0), c(0.3, 0.1), c(0.3, -0.1), cr(0.9));
        let op = LocalOperator::new([
            h1,
            Mat2::diag(cr(1.0), cr(0.8)),
            Mat2::diag(cr(0.9), cr(1.1)),
            Mat2::diag(cr(1.2), cr(0.95)),
        ]);
        let _ = ZC;
        let psi = apply_local(&op, &s.state).unwrap();
        let v = verdict(&psi).unwrap();
        assert!(v.reachable, "{v:?}");
        assert!(v.convertible);
        // two off-diagonal parties: in the maximally entangled set, isolated
        let h2 = Mat2::new(cr(1.0), c(0.2, 0.0), c(0.2, 0.0), cr(1.1));
        let op2 = LocalOperator::new([
            h1,
            h2,
            Mat2::diag(cr(0.9), cr(1.1)),
            Mat2::diag(cr(1.2), cr(0.95)),
        ]);
        let psi2 = apply_local(&op2, &s.state).unwrap();
        let v2 = verdict(&psi2).unwrap();
        assert!(!v2.reachable, "{v2:?}");
        assert!(v2.isolated, "{v2:?}");
    }

    #[test]
    fn lstate_flagged_unresolved() {
        let p = Family::Lstate3Cycle.default_params();
        let s = seed(Family::Lstate3Cycle, &p).unwrap();
        let v = verdict(&s.state).unwrap();
        assert!(v.unresolved);
    }

    #[test]
    fn cluster_state_in_mes() {
        use crate::mat::ZC;
        let mut amp = [ZC; 16];
        for (idx, a) in amp.iter_mut().enumerate() {
            let q = [(idx >> 3) & 1, (idx >> 2) & 1, (idx >> 1) & 1, idx & 1];
            let sign = (q[0] * q[1] + q[1] * q[2] + q[2] * q[3]) % 2;
            *a = if sign == 0 { cr(0.25) } else { cr(-0.25) };
        }
        let psi = PureState4 { amp };
        let v = verdict(&psi).unwrap();
        assert!(v.mixed_marginals_fast_path);
        assert!(v.in_mes);
    }
}
