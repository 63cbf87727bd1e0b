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

//! Family assignment from the Jordan structure of the Z pair, and the
//! factorization of a state through its family seed.

use crate::family::{seed, Family};
use crate::linalg::eigen::{JordanBlock, JordanStructure, LinalgError};
use crate::linalg::magic::{kron_split, magic_u};
use crate::linalg::sjf::symmetric_jordan_form_with_structure;
use crate::linalg::{rank4, DEFAULT_EIG_TOL};
use crate::mat::{cr, Mat2, Mat4, I, ONE, ZC};
use crate::state::{b_matrix, reduced_density, z_pair, LocalOperator, PureState4, StateError};
use num_complex::Complex64 as C64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("state is biseparable across partition {partition}")]
    Biseparable { partition: String },
    #[error("classification ambiguous at tolerance: {strict} vs {loose} (margin {margin:.2e})")]
    UnclassifiableAtTolerance {
        strict: String,
        loose: String,
        margin: f64,
    },
    #[error("no family pattern matched the Z structure")]
    NoMatch,
    #[error("linear algebra failure: {0}")]
    Linalg(#[from] LinalgError),
    #[error("state error: {0}")]
    State(#[from] StateError),
    #[error("factorization failed, residual {residual:.3e}")]
    FactorizationFailed { residual: f64 },
}

/// Family tag, recovered parameters (in a canonical gauge), and the particle
/// relabeling under which the state matches the family pattern.
#[derive(Clone, Debug)]
pub struct ClassDescriptor {
    pub family: Family,
    /// Family parameters in the canonical gauge (eigenvalue multiset scaled
    /// to unit absolute sum with the leading eigenvalue made positive real).
    pub params: Vec<C64>,
    /// classify matched `psi.permute(&perm)`; identity when no relabeling
    /// was needed.
    pub perm: [usize; 4],
    /// Z blocks in the family's slot order, carrying the eigenvalues of the
    /// permuted input state (its own scale and phase).
    pub z_slots: Vec<JordanBlock>,
    /// Same for the Zt operator.
    pub zt_slots: Vec<JordanBlock>,
    /// Smallest decision margin (>= 1 means decisions were clear).
    pub margin: f64,
}

/// Result of expressing psi as g |seed> (after the descriptor's relabeling).
#[derive(Clone, Debug)]
pub struct Factorization {
    pub g: LocalOperator,
    pub desc: ClassDescriptor,
    /// Norm of g |seed| before renormalization.
    pub norm: f64,
    /// | g|seed>/norm - psi_permuted | after optimal phase alignment.
    pub residual: f64,
}

/// All 24 particle relabelings, identity first, then by lexicographic order.
pub fn all_perms() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    let mut items = [0usize, 1, 2, 3];
    permute_rec(&mut items, 0, &mut out);
    out.sort();
    out
}

fn permute_rec(items: &mut [usize; 4], k: usize, out: &mut Vec<[usize; 4]>) {
    if k == 4 {
        out.push(*items);
        return;
    }
    for i in k..4 {
        items.swap(k, i);
        permute_rec(items, k + 1, out);
        items.swap(k, i);
    }
}

/// Eigenvalue cycles: all q with q^n = 1 (n <= 4) such that multiplying the
/// eigenvalue multiset by q permutes it, with the cycle orbits.
pub fn detect_cycles(st: &JordanStructure) -> Vec<(C64, Vec<Vec<usize>>)> {
    let eigs = st.eigenvalue_multiset();
    let scale = eigs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tol = DEFAULT_EIG_TOL * scale.max(1e-30);
    let mut out = Vec::new();
    let mut qs = vec![ONE];
    for n in 2..=4usize {
        for k in 1..n {
            if num_integer_gcd(k, n) == 1 {
                let q = C64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64);
                if !qs.iter().any(|p| (p - q).norm() < 1e-12) {
                    qs.push(q);
                }
            }
        }
    }
    for q in qs {
        if let Some(orbits) = cycle_orbits(&eigs, q, tol) {
            out.push((q, orbits));
        }
    }
    out
}

fn num_integer_gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        num_integer_gcd(b, a % b)
    }
}

/// Check q * multiset == multiset; zeros are fixed points. Returns the
/// orbits of nonzero eigenvalues under multiplication by q.
fn cycle_orbits(eigs: &[C64], q: C64, tol: f64) -> Option<Vec<Vec<usize>>> {
    let n = eigs.len();
    let mut assigned = vec![false; n];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if assigned[start] {
            continue;
        }
        if eigs[start].norm() <= tol {
            assigned[start] = true;
            continue; // zero: fixed point, not part of a cycle
        }
        let mut orbit = vec![start];
        assigned[start] = true;
        let mut cur = eigs[start];
        loop {
            let next = q * cur;
            if (next - eigs[start]).norm() <= tol {
                break; // closed
            }
            let found = (0..n).find(|&j| !assigned[j] && (eigs[j] - next).norm() <= tol);
            match found {
                Some(j) => {
                    assigned[j] = true;
                    orbit.push(j);
                    cur = next;
                }
                None => return None,
            }
        }
        orbits.push(orbit);
    }
    Some(orbits)
}

struct MatchOut {
    family: Family,
    params: Vec<C64>,
    z_slots: Vec<JordanBlock>,
    zt_slots: Vec<JordanBlock>,
    margin: f64,
}

/// Track the smallest decision margin: for "x equals y" decisions feed
/// tol/|x-y|, for "x differs from y" feed |x-y|/tol.
struct MarginTracker {
    min: f64,
}
impl MarginTracker {
    fn new() -> Self {
        MarginTracker { min: f64::INFINITY }
    }
    fn eq(&mut self, a: C64, b: C64, tol: f64) -> bool {
        let d = (a - b).norm();
        let is_eq = d <= tol;
        let m = if is_eq { tol / d.max(1e-300) } else { d / tol };
        self.min = self.min.min(m);
        is_eq
    }
    fn zero(&mut self, a: C64, tol: f64) -> bool {
        self.eq(a, ZC, tol)
    }
}

fn multiset_matches(set: &[C64], mapped: &[C64], tol: f64) -> bool {
    let mut used = vec![false; set.len()];
    'outer: for x in mapped {
        for (i, y) in set.iter().enumerate() {
            if !used[i] && (x - y).norm() <= tol {
                used[i] = true;
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Canonical gauge for an eigenvalue multiset: scale so the absolute sum of
/// eigenvalues is one and the leading eigenvalue is positive real. Returns
/// the multiplier t to apply.
fn canonical_gauge(eigs: &[C64]) -> C64 {
    let total: f64 = eigs.iter().map(|z| z.norm()).sum();
    if total < 1e-14 {
        return ONE;
    }
    let maxmod = eigs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    // candidate anchors: all eigenvalues of (nearly) maximal modulus
    let mut best: Option<(Vec<(f64, f64)>, C64)> = None;
    for z in eigs.iter().filter(|z| z.norm() > 0.999 * maxmod) {
        let t = z.conj() / cr(z.norm() * total);
        let mut key: Vec<(f64, f64)> = eigs
            .iter()
            .map(|w| {
                let v = w * t;
                (-v.norm(), arg_round(v))
            })
            .collect();
        key.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if best
            .as_ref()
            .map(|(k, _)| key3_less(&key, k))
            .unwrap_or(true)
        {
            best = Some((key, t));
        }
    }
    best.map(|(_, t)| t).unwrap_or(ONE)
}

fn arg_round(z: C64) -> f64 {
    if z.norm() < 1e-12 {
        return 0.0;
    }
    let mut a = z.arg();
    if a < -1e-9 {
        a += std::f64::consts::TAU;
    }
    (a * 1e9).round() / 1e9
}

fn key3_less(a: &[(f64, f64)], b: &[(f64, f64)]) -> bool {
    for (x, y) in a.iter().zip(b.iter()) {
        if (x.0 - y.0).abs() > 1e-12 {
            return x.0 < y.0;
        }
        if (x.1 - y.1).abs() > 1e-9 {
            return x.1 < y.1;
        }
    }
    false
}

fn sqrt_principal(z: C64) -> C64 {
    z.sqrt()
}

fn block(size: usize, eigenvalue: C64) -> JordanBlock {
    JordanBlock { size, eigenvalue }
}

/// Match the measured structures against the family table. Block eigenvalue
/// equalities inside one structure were already decided by the clustering;
/// cycle relations and zero tests are decided here at tolerance `tol`
/// (relative to the leading eigenvalue scale).
fn match_family(
    z: &JordanStructure,
    zt: &JordanStructure,
    rank_a: usize,
    tol_rel: f64,
    z_norm: f64,
) -> Option<MatchOut> {
    let shape = z.shape();
    let zt_shape = zt.shape();
    let eigs = z.eigenvalue_multiset();
    // Equality and zero tests scale with the eigenvalues; the floor tied to
    // the operator norm makes exact nilpotent spectra (all eigenvalues zero)
    // come out as zero rather than comparing them against themselves.
    let scale_eig = eigs.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let tol = (tol_rel * scale_eig).max(1e-9 * z_norm).max(1e-300);
    let mut mt = MarginTracker::new();
    let gauge = canonical_gauge(&eigs);

    // structures must agree between Z and Zt except for the three families
    // with asymmetric block content; those are matched explicitly below.
    let same_sides = shape == zt_shape
        && multiset_matches(
            &zt.eigenvalue_multiset(),
            &eigs,
            10.0 * tol,
        );

    let out = |family: Family,
               params: Vec<C64>,
               z_slots: Vec<JordanBlock>,
               zt_slots: Vec<JordanBlock>,
               mt: &MarginTracker| {
        Some(MatchOut {
            family,
            params,
            z_slots,
            zt_slots,
            margin: mt.min.min(z.margin).min(zt.margin),
        })
    };

    if shape == vec![1, 1, 1, 1] {
        if !same_sides {
            return None;
        }
        // group identical eigenvalues (clustering already made them exact)
        let mut groups: Vec<(C64, usize)> = Vec::new();
        for b in &z.blocks {
            if let Some(g) = groups.iter_mut().find(|(v, _)| (*v - b.eigenvalue).norm() < 1e-30)
            {
                g.1 += 1;
            } else {
                groups.push((b.eigenvalue, 1));
            }
        }
        groups.sort_by(|a, b| b.1.cmp(&a.1));
        let mults: Vec<usize> = groups.iter().map(|g| g.1).collect();
        match mults.as_slice() {
            [4] => None, // a^2=b^2=c^2=d^2: biseparable, not matched here
            [3, 1] => {
                let (triple, single) = (groups[0].0, groups[1].0);
                if mt.zero(triple, tol) {
                    return None; // triple-degenerate zero: biseparable
                }
                // seed parameters (alpha, beta): triple = (beta/2)^2,
                // single = (alpha + beta/2)^2
                let ae = sqrt_principal(triple * gauge);
                let ce = sqrt_principal(single * gauge);
                let params = vec![ce - ae, cr(2.0) * ae];
                let slots = vec![
                    block(1, triple),
                    block(1, triple),
                    block(1, single),
                    block(1, triple),
                ];
                out(
                    Family::GabcdTripleDegenerate,
                    params,
                    slots.clone(),
                    slots,
                    &mt,
                )
            }
            [2, 2] => {
                let (va, vb) = (groups[0].0, groups[1].0);
                let (alpha, beta) = if va.norm() >= vb.norm() { (va, vb) } else { (vb, va) };
                if mt.zero(beta, tol) {
                    // {alpha, alpha, 0, 0}
                    let slots = vec![block(1, alpha), block(1, alpha), block(1, ZC), block(1, ZC)];
                    return if rank_a == 2 {
                        out(Family::Ghz, vec![], slots.clone(), slots, &mt)
                    } else if rank_a == 3 {
                        let a = sqrt_principal(alpha * gauge);
                        out(Family::Lab02Aa, vec![a], slots.clone(), slots, &mt)
                    } else {
                        None
                    };
                }
                if mt.eq(alpha, -beta, tol) {
                    let a = sqrt_principal(alpha * gauge);
                    // slots (a^2, d^2, c^2, b^2) = (a^2, a^2, -a^2, -a^2)
                    let slots = vec![
                        block(1, alpha),
                        block(1, alpha),
                        block(1, beta),
                        block(1, beta),
                    ];
                    out(Family::GabcdAaia, vec![a], slots.clone(), slots, &mt)
                } else {
                    let a = sqrt_principal(alpha * gauge);
                    let c_ = sqrt_principal(beta * gauge);
                    let slots = vec![
                        block(1, alpha),
                        block(1, alpha),
                        block(1, beta),
                        block(1, beta),
                    ];
                    out(Family::GabcdAacc, vec![a, c_], slots.clone(), slots, &mt)
                }
            }
            [2, 1, 1] => {
                let double = groups[0].0;
                let (s1, s2) = (groups[1].0, groups[2].0);
                if mt.zero(double, tol) {
                    // {0, 0, s1, s2}: GHZ-like zero pair with distinct
                    // nonzero singles
                    let (a2, d2) = if s1.norm() >= s2.norm() { (s1, s2) } else { (s2, s1) };
                    let slots = vec![block(1, a2), block(1, d2), block(1, ZC), block(1, ZC)];
                    let a = sqrt_principal(a2 * gauge);
                    let d = sqrt_principal(d2 * gauge);
                    return if rank_a == 2 {
                        out(Family::GabcdAd00, vec![a, d], slots.clone(), slots, &mt)
                    } else if rank_a == 3 {
                        out(Family::Lab02Ab, vec![a, d], slots.clone(), slots, &mt)
                    } else {
                        None
                    };
                }
                // double nonzero: family with D = diag(a^2, d^2, c^2, c^2)
                let a = sqrt_principal(s1 * gauge);
                let d = sqrt_principal(s2 * gauge);
                let c_ = sqrt_principal(double * gauge);
                let slots = vec![block(1, s1), block(1, s2), block(1, double), block(1, double)];
                out(Family::GabcdAdcc, vec![a, d, c_], slots.clone(), slots, &mt)
            }
            [1, 1, 1, 1] => {
                let vals: Vec<C64> = groups.iter().map(|g| g.0).collect();
                let zeros: Vec<usize> = (0..4).filter(|&i| vals[i].norm() <= tol).collect();
                for &i in &zeros {
                    mt.zero(vals[i], tol);
                }
                let nonzero: Vec<C64> = (0..4)
                    .filter(|i| !zeros.contains(i))
                    .map(|i| vals[i])
                    .collect();
                if zeros.is_empty() {
                    // 4-cycle?
                    let rotated: Vec<C64> = vals.iter().map(|v| v * I).collect();
                    if multiset_matches(&vals, &rotated, tol) {
                        // {l, il, -l, -il}
                        let lead = vals
                            .iter()
                            .copied()
                            .max_by(|x, y| {
                                (x * gauge).re.partial_cmp(&(y * gauge).re).unwrap()
                            })
                            .unwrap();
                        let a = sqrt_principal(lead * gauge);
                        let slots = vec![
                            block(1, lead),
                            block(1, lead * C64::from_polar(1.0, std::f64::consts::FRAC_PI_2)),
                            block(1, -lead),
                            block(1, lead * C64::from_polar(1.0, -std::f64::consts::FRAC_PI_2)),
                        ];
                        // slot order (a^2, d^2, c^2, b^2) with d = e^{i pi/4} a,
                        // c = i a, b = e^{3 i pi/4} a:
                        let slots = vec![
                            slots[0],
                            block(1, lead * I),
                            block(1, -lead),
                            block(1, -lead * I),
                        ];
                        return out(Family::Gabcd4Cycle, vec![a], slots.clone(), slots, &mt);
                    }
                    let negated: Vec<C64> = vals.iter().map(|v| -v).collect();
                    if multiset_matches(&vals, &negated, tol) {
                        // two 2-cycles {a^2, -a^2, c^2, -c^2}
                        let mut sorted = vals.clone();
                        sorted.sort_by(|x, y| {
                            let kx = ((x * gauge).norm(), -(x * gauge).re);
                            let ky = ((y * gauge).norm(), -(y * gauge).re);
                            ky.partial_cmp(&kx).unwrap()
                        });
                        let a2 = sorted[0];
                        let c2 = *sorted
                            .iter()
                            .find(|v| (*v + a2).norm() > tol && (*v - a2).norm() > tol)
                            .unwrap();
                        let a = sqrt_principal(a2 * gauge);
                        let c_ = sqrt_principal(c2 * gauge);
                        let slots = vec![
                            block(1, a2),
                            block(1, -a2),
                            block(1, c2),
                            block(1, -c2),
                        ];
                        return out(Family::GabcdTwo2Cycles, vec![a, c_], slots.clone(), slots, &mt);
                    }
                    mt.eq(vals[0], vals[0], tol); // no-op to keep margins finite
                    let params: Vec<C64> = {
                        // slot order (a^2, d^2, c^2, b^2) = canonical order
                        let mut sorted = vals.clone();
                        sorted.sort_by(|x, y| {
                            let kx = (-(x * gauge).norm(), arg_round(x * gauge));
                            let ky = (-(y * gauge).norm(), arg_round(y * gauge));
                            kx.partial_cmp(&ky).unwrap()
                        });
                        // params (a, b, c, d) map to slots (a^2, d^2, c^2, b^2)
                        vec![
                            sqrt_principal(sorted[0] * gauge),
                            sqrt_principal(sorted[3] * gauge),
                            sqrt_principal(sorted[2] * gauge),
                            sqrt_principal(sorted[1] * gauge),
                        ]
                    };
                    let slots = {
                        let mut sorted = vals.clone();
                        sorted.sort_by(|x, y| {
                            let kx = (-(x * gauge).norm(), arg_round(x * gauge));
                            let ky = (-(y * gauge).norm(), arg_round(y * gauge));
                            kx.partial_cmp(&ky).unwrap()
                        });
                        vec![
                            block(1, sorted[0]),
                            block(1, sorted[1]),
                            block(1, sorted[2]),
                            block(1, sorted[3]),
                        ]
                    };
                    return out(Family::GabcdGeneric, params, slots.clone(), slots, &mt);
                }
                if zeros.len() == 1 && nonzero.len() == 3 {
                    // 3-cycle?
                    let q = C64::from_polar(1.0, std::f64::consts::TAU / 3.0);
                    let rot: Vec<C64> = nonzero.iter().map(|v| v * q).collect();
                    if multiset_matches(&nonzero, &rot, tol) {
                        // {q d^2, d^2, 0, q^2 d^2}; anchor the positive-real one
                        let lead = nonzero
                            .iter()
                            .copied()
                            .max_by(|x, y| (x * gauge).re.partial_cmp(&(y * gauge).re).unwrap())
                            .unwrap();
                        let d = sqrt_principal(lead * gauge);
                        let slots = vec![
                            block(1, lead * q),
                            block(1, lead),
                            block(1, ZC),
                            block(1, lead * q * q),
                        ];
                        return out(Family::Lstate3Cycle, vec![d], slots.clone(), slots, &mt);
                    }
                    // generic with one vanishing parameter
                    let mut sorted = nonzero.clone();
                    sorted.sort_by(|x, y| {
                        let kx = (-(x * gauge).norm(), arg_round(x * gauge));
                        let ky = (-(y * gauge).norm(), arg_round(y * gauge));
                        kx.partial_cmp(&ky).unwrap()
                    });
                    let slots = vec![
                        block(1, sorted[0]),
                        block(1, sorted[1]),
                        block(1, sorted[2]),
                        block(1, ZC),
                    ];
                    let params = vec![
                        sqrt_principal(sorted[0] * gauge),
                        ZC, // b
                        sqrt_principal(sorted[2] * gauge),
                        sqrt_principal(sorted[1] * gauge),
                    ];
                    // slots are (a^2, d^2, c^2, b^2) with b = 0
                    let slots = vec![slots[0], slots[1], slots[2], block(1, ZC)];
                    return out(Family::GabcdGeneric, params, slots.clone(), slots, &mt);
                }
                None // two or three zeros with distinct values cannot occur
            }
            _ => None,
        }
    } else if shape == vec![2, 1, 1] {
        let two = z.blocks.iter().find(|b| b.size == 2).unwrap();
        let singles: Vec<C64> = z
            .blocks
            .iter()
            .filter(|b| b.size == 1)
            .map(|b| b.eigenvalue)
            .collect();
        let gamma = two.eigenvalue;
        let (s1, s2) = (singles[0], singles[1]);
        if mt.zero(gamma, tol) {
            if !same_sides {
                return None;
            }
            let z1 = mt.zero(s1, tol);
            let z2 = mt.zero(s2, tol);
            return match (z1, z2) {
                (true, true) => {
                    if rank_a == 2 {
                        let slots =
                            vec![block(2, ZC), block(1, ZC), block(1, ZC)];
                        out(Family::W, vec![], slots.clone(), slots, &mt)
                    } else {
                        None
                    }
                }
                (true, false) | (false, true) => {
                    let b2 = if z1 { s2 } else { s1 };
                    let b = sqrt_principal(b2 * gauge);
                    // displayed order: diag(0, b^2) then 2-block at 0
                    let slots = vec![block(1, ZC), block(1, b2), block(2, ZC)];
                    out(Family::Lba30b02, vec![b], slots.clone(), slots, &mt)
                }
                (false, false) => None,
            };
        }
        // gamma nonzero
        if !same_sides {
            return None;
        }
        let z1 = mt.zero(s1, tol);
        let z2 = mt.zero(s2, tol);
        if z1 && z2 {
            let c_ = sqrt_principal(gamma * gauge);
            let slots = vec![block(1, ZC), block(1, ZC), block(2, gamma)];
            return if rank_a == 2 {
                out(Family::Labc200c2, vec![c_], slots.clone(), slots, &mt)
            } else if rank_a == 3 {
                out(Family::La2b200b2, vec![c_], slots.clone(), slots, &mt)
            } else {
                None
            };
        }
        let e1 = mt.eq(s1, gamma, tol);
        let e2 = mt.eq(s2, gamma, tol);
        if e1 && e2 {
            let a = sqrt_principal(gamma * gauge);
            let slots = vec![block(1, gamma), block(1, gamma), block(2, gamma)];
            return out(Family::Labc2Aaa2, vec![a], slots.clone(), slots, &mt);
        }
        if e1 || e2 {
            // a^2 = c^2 != b^2
            let b2 = if e1 { s2 } else { s1 };
            let a = sqrt_principal(gamma * gauge);
            let b = sqrt_principal(b2 * gauge);
            let slots = vec![block(1, gamma), block(1, b2), block(2, gamma)];
            return out(Family::Labc2Aba2, vec![a, b], slots.clone(), slots, &mt);
        }
        if mt.eq(s1, s2, tol) {
            let a = sqrt_principal(s1 * gauge);
            let c_ = sqrt_principal(gamma * gauge);
            let slots = vec![block(1, s1), block(1, s2), block(2, gamma)];
            return out(Family::Labc2Aac2, vec![a, c_], slots.clone(), slots, &mt);
        }
        // fully generic (one single may be zero)
        let (a2, b2) = if (s1 * gauge).norm() >= (s2 * gauge).norm() {
            (s1, s2)
        } else {
            (s2, s1)
        };
        let a = sqrt_principal(a2 * gauge);
        let b = sqrt_principal(b2 * gauge);
        let c_ = sqrt_principal(gamma * gauge);
        let slots = vec![block(1, a2), block(1, b2), block(2, gamma)];
        out(Family::Labc2Generic, vec![a, b, c_], slots.clone(), slots, &mt)
    } else if shape == vec![2, 2] {
        let mu: Vec<C64> = z.blocks.iter().map(|b| b.eigenvalue).collect();
        let (m1, m2) = (mu[0], mu[1]);
        let z1 = mt.zero(m1, tol);
        let z2 = mt.zero(m2, tol);
        if z1 && z2 {
            // all-zero two-blocks: distinguish through Zt
            return if zt_shape == vec![2, 2] {
                let slots = vec![block(2, ZC), block(2, ZC)];
                out(Family::La40202, vec![], slots.clone(), slots.clone(), &mt)
            } else if zt_shape == vec![3, 1] {
                let slots = vec![block(2, ZC), block(2, ZC)];
                let zt_slots = vec![block(3, ZC), block(1, ZC)];
                out(Family::L05plus3, vec![], slots, zt_slots, &mt)
            } else {
                None
            };
        }
        if z1 != z2 {
            // one zero block, one at a^2: Zt must be [2,1,1] with the
            // 2-block at a^2
            let a2 = if z1 { m2 } else { m1 };
            if zt_shape != vec![2, 1, 1] {
                return None;
            }
            let zt_two = zt.blocks.iter().find(|b| b.size == 2).unwrap();
            if !mt.eq(zt_two.eigenvalue, a2, 10.0 * tol) {
                return None;
            }
            let a = sqrt_principal(a2 * gauge);
            let slots = vec![block(2, ZC), block(2, a2)];
            let zt_slots = vec![block(1, ZC), block(1, ZC), block(2, a2)];
            return out(Family::La203plus1, vec![a], slots, zt_slots, &mt);
        }
        if !same_sides {
            return None;
        }
        if mt.eq(m1, m2, tol) {
            let a = sqrt_principal(m1 * gauge);
            let slots = vec![block(2, m1), block(2, m2)];
            return out(Family::La2b2Equal, vec![a], slots.clone(), slots, &mt);
        }
        if mt.eq(m1, -m2, tol) {
            // seed uses b with a = ib; anchor b on the gauge-leading block
            let (lead, other) = if (m1 * gauge).re >= (m2 * gauge).re {
                (m1, m2)
            } else {
                (m2, m1)
            };
            let b = sqrt_principal(lead * gauge);
            let slots = vec![block(2, other), block(2, lead)];
            return out(Family::La2b2Minus, vec![b], slots.clone(), slots, &mt);
        }
        let (a2, b2) = if (m1 * gauge).norm() >= (m2 * gauge).norm() {
            (m1, m2)
        } else {
            (m2, m1)
        };
        let a = sqrt_principal(a2 * gauge);
        let b = sqrt_principal(b2 * gauge);
        let slots = vec![block(2, a2), block(2, b2)];
        out(Family::La2b2Generic, vec![a, b], slots.clone(), slots, &mt)
    } else if shape == vec![3, 1] {
        if !same_sides {
            return None;
        }
        let three = z.blocks.iter().find(|b| b.size == 3).unwrap();
        let one = z.blocks.iter().find(|b| b.size == 1).unwrap();
        let a2 = three.eigenvalue;
        let b2 = one.eigenvalue;
        if mt.zero(a2, tol) {
            return None;
        }
        let a = sqrt_principal(a2 * gauge);
        let slots = vec![block(3, a2), block(1, b2)];
        if mt.eq(a2, b2, tol) {
            out(Family::Lba3Aa3, vec![a], slots.clone(), slots, &mt)
        } else {
            let b = sqrt_principal(b2 * gauge);
            out(Family::Lba3Generic, vec![a, b], slots.clone(), slots, &mt)
        }
    } else if shape == vec![4] {
        let a2 = z.blocks[0].eigenvalue;
        if mt.zero(a2, tol) {
            return if zt_shape == vec![3, 1] {
                let slots = vec![block(4, ZC)];
                let zt_slots = vec![block(3, ZC), block(1, ZC)];
                out(Family::L07plus1, vec![], slots, zt_slots, &mt)
            } else {
                None
            };
        }
        if !same_sides {
            return None;
        }
        let a = sqrt_principal(a2 * gauge);
        let slots = vec![block(4, a2)];
        out(Family::La4Nonzero, vec![a], slots.clone(), slots, &mt)
    } else {
        None
    }
}

/// Purity of the reduced state of each bipartition; biseparable when any
/// marginal is pure at tolerance.
pub fn biseparable_partition(psi: &PureState4, tol: f64) -> Option<String> {
    // single-party marginals
    for party in 1..=4 {
        let rho = reduced_density(psi, party);
        let purity = (rho * rho).trace().re;
        if purity >= 1.0 - tol {
            return Some(format!("{party}|rest"));
        }
    }
    // two-party marginals: 12|34, 13|24, 14|23
    for (label, perm) in [
        ("12|34", [0usize, 1, 2, 3]),
        ("13|24", [0, 2, 1, 3]),
        ("14|23", [0, 3, 1, 2]),
    ] {
        let p = psi.permute(&perm);
        let a = p.coefficient_matrix();
        let rho = a * a.adjoint();
        let purity = (rho * rho).trace().re;
        if purity >= 1.0 - tol {
            return Some(label.to_string());
        }
    }
    None
}

/// Classify a pure state into its family at the default tolerance.
pub fn classify(psi: &PureState4) -> Result<ClassDescriptor, ClassifyError> {
    classify_tol(psi, DEFAULT_EIG_TOL)
}

pub fn classify_tol(psi: &PureState4, tol: f64) -> Result<ClassDescriptor, ClassifyError> {
    let psi = psi.normalized()?;
    if let Some(partition) = biseparable_partition(&psi, 1e-9) {
        return Err(ClassifyError::Biseparable { partition });
    }
    let strict = classify_once(&psi, tol / 3.0);
    let loose = classify_once(&psi, tol * 3.0);
    match (classify_once(&psi, tol), strict, loose) {
        (Some(m), Some(s), Some(l)) => {
            if s.1.family != l.1.family {
                return Err(ClassifyError::UnclassifiableAtTolerance {
                    strict: s.1.family.name().into(),
                    loose: l.1.family.name().into(),
                    margin: m.1.margin,
                });
            }
            Ok(build_descriptor(m))
        }
        (Some(m), _, _) => Ok(build_descriptor(m)),
        (None, _, Some(l)) => {
            // only a looser tolerance matches: still ambiguous
            Err(ClassifyError::UnclassifiableAtTolerance {
                strict: "no match".into(),
                loose: l.1.family.name().into(),
                margin: 1.0,
            })
        }
        _ => Err(ClassifyError::NoMatch),
    }
}

fn build_descriptor(m: ([usize; 4], MatchOut)) -> ClassDescriptor {
    let params = state_gauge_params(m.1.family, &m.1.params, &m.1.z_slots);
    ClassDescriptor {
        family: m.1.family,
        params,
        perm: m.0,
        z_slots: m.1.z_slots,
        zt_slots: m.1.zt_slots,
        margin: m.1.margin,
    }
}

/// Rescale family parameters from the canonical gauge into the state's own
/// gauge: the reconstructed seed, after normalization, carries exactly the
/// measured Z eigenvalues. Parameters enter the eigenvalue pattern through
/// their squares, so a complex scale t with E(t q) = t^2 E(q) suffices.
fn state_gauge_params(family: Family, canonical: &[C64], z_slots: &[JordanBlock]) -> Vec<C64> {
    if canonical.is_empty() {
        return Vec::new();
    }
    // the seed's own eigenvalue pattern at the canonical parameters
    let seed0 = match seed(family, canonical) {
        Ok(s) => s,
        Err(_) => return canonical.to_vec(),
    };
    let zp0 = z_pair(&seed0.raw);
    let e0 = match crate::linalg::eigen::eigenstructure_tol(&zp0.z, DEFAULT_EIG_TOL) {
        Ok(st) => st,
        Err(_) => return canonical.to_vec(),
    };
    // anchor on the largest-modulus measured slot
    let target = z_slots
        .iter()
        .map(|b| b.eigenvalue)
        .max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
        .unwrap_or(ONE);
    if target.norm() < 1e-12 {
        return canonical.to_vec();
    }
    let base = e0
        .eigenvalue_multiset()
        .into_iter()
        .max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
        .unwrap_or(ONE);
    if base.norm() < 1e-12 {
        return canonical.to_vec();
    }
    // |t|: solve tau^2 |base| / n(tau q)^2 = |target| on log tau
    let norm_of = |tau: f64| -> f64 {
        let scaled: Vec<C64> = canonical.iter().map(|p| p * cr(tau)).collect();
        match seed(family, &scaled) {
            Ok(s) => s.raw.norm(),
            Err(_) => f64::NAN,
        }
    };
    let f = |t: f64| {
        let tau = t.exp();
        let n = norm_of(tau);
        if !n.is_finite() {
            return f64::NAN;
        }
        (tau * tau * base.norm() / (n * n)).ln() - target.norm().ln()
    };
    let mut tau = 1.0;
    if let Some(t) = bisect_finite(&f, -8.0, 8.0) {
        tau = t.exp();
    }
    // phase: target/base phases after the magnitude fix (the seed norm is
    // phase independent)
    let theta = (target / base).arg() / 2.0;
    let t = C64::from_polar(tau, theta);
    canonical.iter().map(|p| p * t).collect()
}

fn bisect_finite<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Option<f64> {
    let n = 100;
    let mut prev: Option<(f64, f64)> = None;
    for k in 0..=n {
        let t = lo + (hi - lo) * k as f64 / n as f64;
        let v = f(t);
        if !v.is_finite() {
            continue;
        }
        if let Some((pt, pv)) = prev {
            if pv == 0.0 {
                return Some(pt);
            }
            if pv * v < 0.0 {
                let (mut a, mut b, mut fa) = (pt, t, pv);
                for _ in 0..200 {
                    let m = (a + b) / 2.0;
                    let fm = f(m);
                    if fm == 0.0 || (b - a) < 1e-15 {
                        return Some(m);
                    }
                    if fa * fm < 0.0 {
                        b = m;
                    } else {
                        a = m;
                        fa = fm;
                    }
                }
                return Some((a + b) / 2.0);
            }
        }
        prev = Some((t, v));
    }
    None
}

fn classify_once(psi: &PureState4, tol: f64) -> Option<([usize; 4], MatchOut)> {
    for perm in all_perms() {
        let p = psi.permute(&perm);
        let zp = z_pair(&p);
        let (z_st, zt_st) = match (
            crate::linalg::eigen::eigenstructure_tol(&zp.z, tol),
            crate::linalg::eigen::eigenstructure_tol(&zp.zt, tol),
        ) {
            (Ok(a), Ok(b)) => (a, b),
            _ => continue,
        };
        let b = b_matrix(&p);
        let rank_a = rank4(&b, 1e-7 * b.norm_fro().max(1e-30));
        if let Some(mo) = match_family(&z_st, &zt_st, rank_a, tol, zp.z.norm_fro()) {
            return Some((perm, mo));
        }
    }
    None
}

// ---------------------------------------------------------------------------
// factorization
// ---------------------------------------------------------------------------

/// Alternating least squares: refine local operators so that
/// (g1 x g2 x g3 x g4)|seed> matches `target` (both unnormalized inputs, the
/// overall scale rides on g1). Returns the residual after normalization.
fn als_refine(
    g: &mut [Mat2; 4],
    seed_state: &PureState4,
    target: &PureState4,
    iters: usize,
) -> f64 {
    als_refine_masked(g, seed_state, target, iters, [true; 4])
}

fn als_refine_masked(
    g: &mut [Mat2; 4],
    seed_state: &PureState4,
    target: &PureState4,
    iters: usize,
    active: [bool; 4],
) -> f64 {
    let mut best = f64::INFINITY;
    let mut stall = 0usize;
    for _ in 0..iters {
        for party in 0..4 {
            if !active[party] {
                continue;
            }
            // model is linear in g[party]: build 16 x 4 design matrix
            let mut others = LocalOperator::new(*g);
            others.ops[party] = Mat2::identity();
            let base = others.apply_raw(seed_state);
            // columns: action of |r><c| on qubit `party`
            let stride = 1usize << (3 - party);
            let mut cols = [[ZC; 16]; 4];
            for (ci, &(r, c_)) in [(0usize, 0usize), (0, 1), (1, 0), (1, 1)].iter().enumerate() {
                for idx in 0..16usize {
                    let bit = (idx / stride) % 2;
                    if bit == r {
                        let src = idx - r * stride + c_ * stride;
                        cols[ci][idx] = base.amp[src];
                    }
                }
            }
            // normal equations (4x4 Hermitian)
            let mut ata = Mat4::zero();
            let mut atb = [ZC; 4];
            for i in 0..4 {
                for j in 0..4 {
                    let mut s = ZC;
                    for k in 0..16 {
                        s += cols[i][k].conj() * cols[j][k];
                    }
                    ata.0[i][j] = s;
                }
                let mut s = ZC;
                for k in 0..16 {
                    s += cols[i][k].conj() * target.amp[k];
                }
                atb[i] = s;
            }
            if let Some(x) = ata.solve(&atb) {
                let cand = Mat2::new(x[0], x[1], x[2], x[3]);
                if cand.det().norm() > 1e-12 {
                    g[party] = cand;
                }
            }
        }
        let model = LocalOperator::new(*g).apply_raw(seed_state);
        let resid = phase_aligned_distance(&model, target);
        if resid < best * (1.0 - 1e-3) {
            best = resid;
            stall = 0;
        } else {
            stall += 1;
        }
        best = best.min(resid);
        if best < 1e-12 || stall > 60 {
            break;
        }
    }
    best
}

/// Joint Levenberg-Marquardt polish over all sixteen local-operator
/// entries; quadratic near the solution where the alternating sweeps crawl.
fn gauss_newton_polish(
    g: &mut [Mat2; 4],
    seed_state: &PureState4,
    target: &PureState4,
    iters: usize,
) -> f64 {
    let mut lambda = 1e-8f64;
    let mut best = {
        let model = LocalOperator::new(*g).apply_raw(seed_state);
        phase_aligned_distance(&model, target)
    };
    for _ in 0..iters {
        let model = LocalOperator::new(*g).apply_raw(seed_state);
        let mm: C64 = model.amp.iter().map(|z| z.norm_sqr()).sum::<f64>().into();
        let mt: C64 = model
            .amp
            .iter()
            .zip(target.amp.iter())
            .map(|(m, t)| m.conj() * t)
            .sum();
        let c_opt = mt / mm;
        // residual r = c * model - target
        let mut r = [ZC; 16];
        for k in 0..16 {
            r[k] = c_opt * model.amp[k] - target.amp[k];
        }
        // Jacobian columns: c * d(model)/d g_p[a][b]
        let mut jac = [[ZC; 16]; 16]; // jac[col][row]
        for party in 0..4 {
            let mut others = LocalOperator::new(*g);
            others.ops[party] = Mat2::identity();
            let base = others.apply_raw(seed_state);
            let stride = 1usize << (3 - party);
            for (ei, &(a, b)) in [(0usize, 0usize), (0, 1), (1, 0), (1, 1)].iter().enumerate() {
                let col = 4 * party + ei;
                for idx in 0..16usize {
                    let bit = (idx / stride) % 2;
                    if bit == a {
                        let src = idx - a * stride + b * stride;
                        jac[col][idx] = c_opt * base.amp[src];
                    }
                }
            }
        }
        // normal equations (J^H J + lambda I) d = -J^H r
        let mut ata = vec![vec![ZC; 16]; 16];
        let mut atb = vec![ZC; 16];
        for i in 0..16 {
            for j in 0..16 {
                let mut s = ZC;
                for k in 0..16 {
                    s += jac[i][k].conj() * jac[j][k];
                }
                ata[i][j] = s;
            }
            let mut s = ZC;
            for k in 0..16 {
                s += jac[i][k].conj() * r[k];
            }
            atb[i] = -s;
            let diag = ata[i][i].re;
            ata[i][i] += cr(lambda * diag.max(1e-12));
        }
        let delta = match crate::linalg::eigen::solve_dense_pub(&mut ata, &atb) {
            Some(d) => d,
            None => break,
        };
        let mut g_new = *g;
        for party in 0..4 {
            for (ei, &(a, b)) in [(0usize, 0usize), (0, 1), (1, 0), (1, 1)].iter().enumerate() {
                g_new[party].0[a][b] += delta[4 * party + ei];
            }
        }
        let model2 = LocalOperator::new(g_new).apply_raw(seed_state);
        let resid2 = phase_aligned_distance(&model2, target);
        if resid2 < best {
            best = resid2;
            *g = g_new;
            lambda = (lambda * 0.3).max(1e-14);
        } else {
            lambda = (lambda * 10.0).min(1e6);
        }
        if best < 1e-14 {
            break;
        }
    }
    best
}

/// Distance between normalized states after optimal global phase alignment.
pub fn phase_aligned_distance(a: &PureState4, b: &PureState4) -> f64 {
    let (na, nb) = (a.norm(), b.norm());
    if na < 1e-300 || nb < 1e-300 {
        return 1.0;
    }
    let ip = a.inner(b) / cr(na * nb);
    let phase = if ip.norm() > 1e-300 { ip / cr(ip.norm()) } else { ONE };
    let mut s = 0.0;
    for k in 0..16 {
        let d = a.amp[k] / cr(na) * phase - b.amp[k] / cr(nb);
        s += d.norm_sqr();
    }
    s.sqrt()
}

/// Sign patterns over the blocks with determinant +1 (stabilizer candidates
/// of the block normal form used to seed the factorization search).
fn sign_candidates(blocks: &[JordanBlock]) -> Vec<Mat4> {
    let nb = blocks.len();
    let mut out = Vec::new();
    for mask in 0..(1usize << nb) {
        let mut d = Mat4::identity();
        let mut pos = 0;
        let mut det_flip = 0usize;
        for (bi, b) in blocks.iter().enumerate() {
            if mask >> bi & 1 == 1 {
                for k in 0..b.size {
                    d.0[pos + k][pos + k] = -ONE;
                }
                det_flip += b.size;
            }
            pos += b.size;
        }
        if det_flip % 2 == 0 {
            out.push(d);
        }
    }
    out
}

/// Express psi (after the descriptor's relabeling) as g |seed>.
pub fn factorize(psi: &PureState4, desc: &ClassDescriptor) -> Result<Factorization, ClassifyError> {
    let psi = psi.normalized()?;
    // the determinant of the Z-side orthogonal factor can be rigidly -1;
    // exchanging parties 1 and 2 (a within-side relabeling that fixes the
    // family, parameters and slots) flips it, so try both labelings
    let mut best: Option<Factorization> = None;
    let mut best_err = 1.0f64;
    for extra in [[0usize, 1, 2, 3], [1, 0, 2, 3]] {
        let mut d2 = desc.clone();
        let mut perm = [0usize; 4];
        for i in 0..4 {
            perm[i] = d2.perm[extra[i]];
        }
        d2.perm = perm;
        match factorize_fixed(&psi, &d2) {
            Ok(f) => {
                let better = best
                    .as_ref()
                    .map(|b| f.residual < b.residual)
                    .unwrap_or(true);
                if better {
                    best = Some(f);
                }
            }
            Err(ClassifyError::FactorizationFailed { residual }) => {
                best_err = best_err.min(residual);
                continue;
            }
            Err(e) => return Err(e),
        }
        if best.as_ref().map(|b| b.residual < 1e-9).unwrap_or(false) {
            break;
        }
    }
    best.ok_or(ClassifyError::FactorizationFailed { residual: best_err })
}

/// Factorize against a fixed relabeling.
fn factorize_fixed(
    psi: &PureState4,
    desc: &ClassDescriptor,
) -> Result<Factorization, ClassifyError> {
    let mut desc = desc.clone();
    let target = psi.permute(&desc.perm);
    let sd = seed(desc.family, &desc.params)?;
    let seed_norm = sd.state;

    // candidate initializations from the Z-operator orthogonal factors,
    // each completed by a least-squares solve of the other side
    let mut inits: Vec<[Mat2; 4]> = Vec::new();
    if let Some(cands) = orthogonal_inits(&target, &seed_norm, &desc) {
        inits.extend(cands);
    }
    inits.push([Mat2::identity(); 4]);

    let mut best: Option<([Mat2; 4], f64)> = None;
    for init in &inits {
        let mut g = *init;
        // settle the back pair against the front-pair guess first, then
        // release everything
        als_refine_masked(&mut g, &seed_norm, &target, 12, [false, false, true, true]);
        let quick = als_refine(&mut g, &seed_norm, &target, 40);
        if best.as_ref().map(|(_, r)| quick < *r).unwrap_or(true) {
            best = Some((g, quick));
        }
        if quick < 1e-9 {
            break;
        }
    }
    let (mut g, mut resid) = best.ok_or(ClassifyError::FactorizationFailed { residual: 1.0 })?;
    if resid > 1e-9 {
        resid = als_refine(&mut g, &seed_norm, &target, 300);
    }
    if resid > 1e-9 && resid < 5e-2 {
        resid = gauss_newton_polish(&mut g, &seed_norm, &target, 120);
    }
    if resid > 1e-7 {
        // deterministic random restarts as a last resort
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xfac70);
        for _ in 0..40 {
            let mut g2 = [
                crate::linalg::magic::random_sl2(&mut rng),
                crate::linalg::magic::random_sl2(&mut rng),
                crate::linalg::magic::random_sl2(&mut rng),
                crate::linalg::magic::random_sl2(&mut rng),
            ];
            let mut r2 = als_refine(&mut g2, &seed_norm, &target, 60);
            if r2 < 5e-2 {
                r2 = gauss_newton_polish(&mut g2, &seed_norm, &target, 80);
            }
            if r2 < resid {
                g = g2;
                resid = r2;
            }
            if resid < 1e-9 {
                break;
            }
        }
        if resid > 1e-8 {
            resid = als_refine(&mut g, &seed_norm, &target, 300);
            if resid < 5e-2 {
                resid = gauss_newton_polish(&mut g, &seed_norm, &target, 120);
            }
        }
    }
    if resid > 1e-7 {
        return Err(ClassifyError::FactorizationFailed { residual: resid });
    }
    let lo = LocalOperator::new(g);
    let norm = lo.apply_raw(&seed_norm).norm();
    desc.margin = desc.margin.min(1.0 / resid.max(1e-300));
    Ok(Factorization {
        g: lo,
        desc,
        norm,
        residual: resid,
    })
}

/// Initial guesses for the local operator from the symmetric Jordan
/// decompositions of the Z operators of state and seed.
fn orthogonal_inits(
    target: &PureState4,
    seed_norm: &PureState4,
    desc: &ClassDescriptor,
) -> Option<Vec<[Mat2; 4]>> {
    let zp_t = z_pair(target);
    let zp_s = z_pair(seed_norm);
    let st_t = JordanStructure {
        blocks: desc.z_slots.clone(),
        margin: f64::INFINITY,
    };
    // family slot order for the seed: run the family matcher on the seed's
    // own Z pair so the slot assignment is made by the same rules
    let z_st = crate::linalg::eigen::eigenstructure_tol(&zp_s.z, DEFAULT_EIG_TOL).ok()?;
    let zt_st = crate::linalg::eigen::eigenstructure_tol(&zp_s.zt, DEFAULT_EIG_TOL).ok()?;
    let b = b_matrix(seed_norm);
    let rank_a = rank4(&b, 1e-7 * b.norm_fro().max(1e-30));
    let mo = match_family(&z_st, &zt_st, rank_a, DEFAULT_EIG_TOL, zp_s.z.norm_fro())?;
    if mo.family != desc.family {
        return None;
    }
    let st_s = JordanStructure {
        blocks: mo.z_slots,
        margin: f64::INFINITY,
    };
    // fix determinants to +1 through an odd-size block when one exists;
    // for even-only structures the sign is rigid and the natural one is kept
    // (a -1 product is then resolved by the caller's party 1 <-> 2 retry)
    use crate::linalg::sjf::symmetric_jordan_form_natural;
    let decompose = |m: &Mat4, st: &JordanStructure| {
        symmetric_jordan_form_with_structure(m, st, false)
            .or_else(|_| symmetric_jordan_form_natural(m, st))
    };
    let dec_t = decompose(&zp_t.z, &st_t).ok()?;
    let dec_s = decompose(&zp_s.z, &st_s).ok()?;
    // Relative scale between the Z operators of target and seed (the states
    // carry their own normalization and global phase). For blocks of size
    // two or more the scale does not commute with the fixed nilpotent part
    // of the block normal form; the corrector Q with
    // t R(seed slots) = Q R(target slots) Q^T absorbs it.
    let t_rel = desc
        .z_slots
        .iter()
        .zip(st_s.blocks.iter())
        .find(|(bt, bs)| bs.eigenvalue.norm() > 1e-9 && bt.eigenvalue.norm() > 1e-12)
        .map(|(bt, bs)| bt.eigenvalue / bs.eigenvalue);
    let mut q_corrs = vec![Mat4::identity()];
    if let Some(t) = t_rel {
        if (t - ONE).norm() > 1e-12 {
            let scaled = crate::linalg::sjf::r_matrix(&st_s).scale(t);
            if let Ok(d) = decompose(&scaled, &st_t) {
                q_corrs = vec![d.o];
            }
        }
    } else if desc
        .z_slots
        .iter()
        .all(|b| b.eigenvalue.norm() < 1e-9)
        && desc.z_slots.iter().any(|b| b.size >= 2)
    {
        // fully nilpotent slots: the relative scale is invisible in the
        // eigenvalues; try a grid of magnitudes and phases
        q_corrs.clear();
        let rs = crate::linalg::sjf::r_matrix(&st_s);
        for mag in [0.25f64, 0.5, 1.0, 2.0, 4.0] {
            for ph in 0..4 {
                let t = C64::from_polar(mag, std::f64::consts::FRAC_PI_2 * ph as f64);
                let scaled = rs.scale(t);
                if let Ok(d) = decompose(&scaled, &st_t) {
                    q_corrs.push(d.o);
                }
            }
        }
        if q_corrs.is_empty() {
            q_corrs.push(Mat4::identity());
        }
    }
    let u = magic_u();
    let mut out = Vec::new();
    for q_corr in &q_corrs {
        for signs in sign_candidates(&desc.z_slots) {
            let o_rel = dec_t.o * signs * q_corr.transpose() * dec_s.o.transpose();
            // local product candidates need determinant +1 overall; a -1
            // mismatch is resolved by the caller through the party 1 <-> 2
            // relabeling retry
            if (o_rel.det() - ONE).norm() > 1e-6 {
                continue;
            }
            let ga4 = u * o_rel * u.adjoint();
            let (g1, g2, resid) = kron_split(&ga4);
            if resid > 1e-6 {
                continue;
            }
            // complete the candidate: least-squares solve for the back pair
            // given the front pair, then split it into a product
            let front = LocalOperator::new([g1, g2, Mat2::identity(), Mat2::identity()]);
            let phi = front.apply_raw(seed_norm).coefficient_matrix();
            let t = target.coefficient_matrix();
            // T ~= Phi M^T: solve via pseudo-inverse of Phi
            let svd = crate::linalg::svd4(&phi);
            let mut pinv = Mat4::zero();
            let smax = svd.s[0].max(1e-300);
            for k in 0..4 {
                if svd.s[k] > 1e-10 * smax {
                    let inv = cr(1.0 / svd.s[k]);
                    for i in 0..4 {
                        for j in 0..4 {
                            pinv.0[i][j] += svd.v.0[i][k] * inv * svd.u.0[j][k].conj();
                        }
                    }
                }
            }
            let mt = pinv * t; // M^T
            let (g3, g4, _) = kron_split(&mt.transpose());
            if g3.det().norm() > 1e-10 && g4.det().norm() > 1e-10 {
                out.push([g1, g2, g3, g4]);
            }
            out.push([g1, g2, Mat2::identity(), Mat2::identity()]);
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::Family;
    use crate::linalg::magic::random_sl2_bounded;
    use rand::SeedableRng;

    #[test]
    fn ghz_classifies() {
        let s = seed(Family::Ghz, &[]).unwrap();
        let d = classify(&s.state).unwrap();
        assert_eq!(d.family, Family::Ghz);
    }

    #[test]
    fn w_classifies() {
        let s = seed(Family::W, &[]).unwrap();
        let d = classify(&s.state).unwrap();
        assert_eq!(d.family, Family::W);
    }

    #[test]
    fn product_state_is_biseparable() {
        let psi = PureState4::basis(0, 1, 0, 1);
        match classify(&psi) {
            Err(ClassifyError::Biseparable { .. }) => {}
            other => panic!("expected biseparable, got {other:?}"),
        }
    }

    #[test]
    fn bell_pair_product_is_biseparable() {
        use crate::state::{bell, product_12_34};
        let psi = product_12_34(&bell(0), &bell(0));
        match classify(&psi) {
            Err(ClassifyError::Biseparable { partition }) => {
                assert_eq!(partition, "12|34");
            }
            other => panic!("expected biseparable, got {other:?}"),
        }
    }

    #[test]
    fn every_family_seed_classifies_to_itself() {
        for fam in Family::all() {
            let p = fam.default_params();
            let s = seed(*fam, &p).unwrap();
            let d = classify(&s.state).unwrap_or_else(|e| panic!("{}: {e}", fam.name()));
            assert_eq!(d.family, *fam, "seed of {}", fam.name());
        }
    }

    #[test]
    fn dressed_seeds_classify_back() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for fam in [
            Family::GabcdGeneric,
            Family::GabcdTwo2Cycles,
            Family::Labc2Generic,
            Family::La2b2Generic,
            Family::W,
            Family::Ghz,
        ] {
            let p = fam.default_params();
            let s = seed(fam, &p).unwrap();
            for _ in 0..5 {
                let g = LocalOperator::new([
                    random_sl2_bounded(&mut rng, 20.0),
                    random_sl2_bounded(&mut rng, 20.0),
                    random_sl2_bounded(&mut rng, 20.0),
                    random_sl2_bounded(&mut rng, 20.0),
                ]);
                let psi = crate::state::apply_local(&g, &s.state).unwrap();
                let d = classify(&psi).unwrap_or_else(|e| panic!("{}: {e}", fam.name()));
                assert_eq!(d.family, fam, "dressed {}", fam.name());
            }
        }
    }

    #[test]
    fn factorize_seed_is_identityish() {
        for fam in [Family::GabcdGeneric, Family::Labc2Generic, Family::Ghz] {
            let p = fam.default_params();
            let s = seed(fam, &p).unwrap();
            let d = classify(&s.state).unwrap();
            let f = factorize(&s.state, &d).unwrap();
            assert!(f.residual <= 1e-9, "{}: residual {}", fam.name(), f.residual);
        }
    }

    #[test]
    fn factorize_recovers_dressing() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(22);
        for fam in [Family::GabcdGeneric, Family::GabcdAacc, Family::Labc2Aac2] {
            let p = fam.default_params();
            let s = seed(fam, &p).unwrap();
            for _ in 0..3 {
                let g = LocalOperator::new([
                    random_sl2_bounded(&mut rng, 16.0),
                    random_sl2_bounded(&mut rng, 16.0),
                    random_sl2_bounded(&mut rng, 16.0),
                    random_sl2_bounded(&mut rng, 16.0),
                ]);
                let psi = crate::state::apply_local(&g, &s.state).unwrap();
                let d = classify(&psi).unwrap();
                assert_eq!(d.family, fam);
                let f = factorize(&psi, &d).unwrap();
                assert!(
                    f.residual <= 1e-7,
                    "{}: residual {:.2e}",
                    fam.name(),
                    f.residual
                );
            }
        }
    }

    #[test]
    fn permuted_seed_found() {
        let p = Family::Labc2Generic.default_params();
        let s = seed(Family::Labc2Generic, &p).unwrap();
        let permuted = s.state.permute(&[2, 3, 0, 1]);
        let d = classify(&permuted).unwrap();
        assert_eq!(d.family, Family::Labc2Generic);
        let f = factorize(&permuted, &d).unwrap();
        assert!(f.residual <= 1e-7);
    }

    #[test]
    fn detect_cycles_examples() {
        use crate::linalg::eigen::JordanBlock;
        let st = |eigs: Vec<C64>| JordanStructure {
            blocks: eigs
                .into_iter()
                .map(|e| JordanBlock {
                    size: 1,
                    eigenvalue: e,
                })
                .collect(),
            margin: f64::INFINITY,
        };
        // two 2-cycles at q = -1
        let s = st(vec![cr(0.81), cr(-0.81), cr(0.25), cr(-0.25)]);
        let cycles = detect_cycles(&s);
        assert!(cycles.iter().any(|(q, orbits)| (q + ONE).norm() < 1e-12
            && orbits.len() == 2
            && orbits.iter().all(|o| o.len() == 2)));
        // 4-cycle at q = i
        let lam = cr(0.7);
        let s = st(vec![lam, I * lam, -lam, -I * lam]);
        let cycles = detect_cycles(&s);
        assert!(cycles
            .iter()
            .any(|(q, orbits)| (q - I).norm() < 1e-12 && orbits.len() == 1 && orbits[0].len() == 4));
        // 3-cycle with a zero
        let q3 = C64::from_polar(1.0, std::f64::consts::TAU / 3.0);
        let s = st(vec![q3 * lam, lam, ZC, q3 * q3 * lam]);
        let cycles = detect_cycles(&s);
        assert!(cycles
            .iter()
            .any(|(q, orbits)| (q - q3).norm() < 1e-12 && orbits.iter().any(|o| o.len() == 3)));
        // q = 1 always present
        assert!(cycles.iter().any(|(q, _)| (q - ONE).norm() < 1e-12));
    }

    #[test]
    fn haar_random_states_are_generic() {
        use rand::Rng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let mut amp = [ZC; 16];
            for a in amp.iter_mut() {
                *a = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            }
            let psi = PureState4 { amp }.normalized().unwrap();
            let d = classify(&psi).unwrap();
            assert_eq!(d.family, Family::GabcdGeneric);
        }
    }
}
