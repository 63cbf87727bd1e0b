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

//! Reproducible fixtures: random in-family states and targets realizing the
//! per-family reachable patterns.

use crate::family::{seed, Family};
use crate::linalg::magic::random_sl2_bounded;
use crate::mat::cr;
use crate::state::{apply_local, GramOperator, LocalOperator, PureState4, StateError};
use rand::Rng;

/// Random state in a family: a bounded-condition invertible local dressing
/// of the seed.
pub fn random_in_family<R: Rng>(
    family: Family,
    params: &[num_complex::Complex64],
    rng: &mut R,
    max_cond: f64,
) -> Result<PureState4, StateError> {
    let s = seed(family, params)?;
    let per_factor = max_cond.powf(0.25).max(1.0);
    let g = LocalOperator::new([
        random_sl2_bounded(rng, per_factor),
        random_sl2_bounded(rng, per_factor),
        random_sl2_bounded(rng, per_factor),
        random_sl2_bounded(rng, per_factor),
    ]);
    apply_local(&g, &s.state)
}

fn unit3<R: Rng>(rng: &mut R) -> [f64; 3] {
    loop {
        let v = [
            rng.gen::<f64>() * 2.0 - 1.0,
            rng.gen::<f64>() * 2.0 - 1.0,
            rng.gen::<f64>() * 2.0 - 1.0,
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 0.2 && n <= 1.0 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

fn mag<R: Rng>(rng: &mut R) -> f64 {
    0.08 + 0.27 * rng.gen::<f64>()
}

fn v_axis<R: Rng>(rng: &mut R, axis: usize) -> [f64; 3] {
    let mut v = [0.0; 3];
    let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
    v[axis] = sign * mag(rng);
    v
}

fn v_free<R: Rng>(rng: &mut R) -> [f64; 3] {
    let u = unit3(rng);
    let m = mag(rng);
    [u[0] * m, u[1] * m, u[2] * m]
}

/// A vector decidedly off the given axis (and off the z axis for axis != 2).
fn v_off_axis<R: Rng>(rng: &mut R, axis: usize) -> [f64; 3] {
    loop {
        let v = v_free(rng);
        let off: f64 = (0..3)
            .filter(|&k| k != axis)
            .map(|k| v[k] * v[k])
            .sum::<f64>()
            .sqrt();
        if off > 0.05 {
            return v;
        }
    }
}

fn v_plane<R: Rng>(rng: &mut R, zero_axis: usize) -> [f64; 3] {
    let mut v = v_free(rng);
    v[zero_axis] = 0.0;
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if n < 0.05 {
        return v_plane(rng, zero_axis);
    }
    v
}

const ZV: [f64; 3] = [0.0; 3];

/// One reachable-pattern target: family, pattern label, Gram data.
pub struct PatternTarget {
    pub family: Family,
    pub label: &'static str,
    pub blochs: [[f64; 3]; 4],
}

/// The catalog of reachable-form patterns across families. Every entry
/// realizes, for random draws, a state whose verdict is "reachable" and for
/// which a protocol can be synthesized.
pub fn reachable_patterns() -> Vec<(Family, &'static str)> {
    use Family::*;
    vec![
        (GabcdGeneric, "three-on-x, one free"),
        (GabcdGeneric, "three-on-y, one free"),
        (GabcdGeneric, "three-on-z, one free"),
        (GabcdGeneric, "single dressed party"),
        (GabcdTwo2Cycles, "mixed-word exactly-three"),
        (GabcdTwo2Cycles, "uniform-x exactly-three"),
        (GabcdTripleDegenerate, "single nonzero vector"),
        (GabcdTripleDegenerate, "axis pair plus free vector"),
        (GabcdAdcc, "three-on-x, one free"),
        (GabcdAdcc, "three diagonal, one xz"),
        (GabcdAacc, "three diagonal, one free"),
        (GabcdAaia, "x x free x"),
        (GabcdAaia, "zero x free any"),
        (GabcdAd00, "three diagonal, one free"),
        (Ghz, "three-on-x, one free"),
        (Labc2Generic, "single off-diagonal"),
        (Labc2Aba2, "single off-diagonal"),
        (Labc2Aac2, "x-lead, rest diagonal"),
        (Labc2Aac2, "zero lead, one off-diagonal"),
        (Labc2Aaa2, "one back-party off-diagonal"),
        (Labc200c2, "front pair active"),
        (Lab02Ab, "x-lead, rest diagonal"),
        (La2b2Generic, "single off-diagonal"),
        (La2b2Minus, "exactly-three commuting"),
        (La2b2Equal, "x2 x4 with party-3 off-diagonal"),
        (La2b200b2, "x-lead, rest diagonal"),
        (La40202, "one back-party off-diagonal"),
        (La203plus1, "single off-diagonal"),
        (W, "nonzero x0 coefficient"),
        (L07plus1, "one back-party off-diagonal"),
        (L07plus1, "x-front, diagonal back"),
    ]
}

/// Build the Gram data of one pattern instance.
pub fn pattern_blochs<R: Rng>(
    family: Family,
    label: &str,
    rng: &mut R,
) -> Option<[[f64; 3]; 4]> {
    use Family::*;
    let b = match (family, label) {
        (GabcdGeneric, "three-on-x, one free") => {
            [v_off_axis(rng, 0), v_axis(rng, 0), v_axis(rng, 0), v_axis(rng, 0)]
        }
        (GabcdGeneric, "three-on-y, one free") => {
            [v_axis(rng, 1), v_off_axis(rng, 1), v_axis(rng, 1), v_axis(rng, 1)]
        }
        (GabcdGeneric, "three-on-z, one free") => {
            [v_axis(rng, 2), v_axis(rng, 2), v_off_axis(rng, 2), v_axis(rng, 2)]
        }
        (GabcdGeneric, "single dressed party") => [v_free(rng), ZV, ZV, ZV],
        (GabcdTwo2Cycles, "mixed-word exactly-three") => {
            // S = 1 x sz x sx x sy: party 1 free (identity site), party 2
            // breaks the commutation
            [v_free(rng), v_off_axis(rng, 2), v_axis(rng, 0), v_axis(rng, 1)]
        }
        (GabcdTwo2Cycles, "uniform-x exactly-three") => {
            [v_off_axis(rng, 0), v_axis(rng, 0), v_axis(rng, 0), v_axis(rng, 0)]
        }
        (GabcdTripleDegenerate, "single nonzero vector") => [v_free(rng), ZV, ZV, ZV],
        (GabcdTripleDegenerate, "axis pair plus free vector") => {
            // two vectors on z, third with an xz component (non-orthogonal)
            let mut third = v_plane(rng, 1);
            if third[2].abs() < 0.05 {
                third[2] = 0.1;
            }
            [v_axis(rng, 2), v_axis(rng, 2), third, ZV]
        }
        (GabcdAdcc, "three-on-x, one free") => {
            [v_off_axis(rng, 0), v_axis(rng, 0), v_axis(rng, 0), v_axis(rng, 0)]
        }
        (GabcdAdcc, "three diagonal, one xz") => {
            let mut xz = v_plane(rng, 1);
            if xz[0].abs() < 0.05 {
                xz[0] = 0.12;
            }
            [xz, v_axis(rng, 2), v_axis(rng, 2), v_axis(rng, 2)]
        }
        (GabcdAacc, "three diagonal, one free") => {
            [v_off_axis(rng, 2), v_axis(rng, 2), v_axis(rng, 2), v_axis(rng, 2)]
        }
        (GabcdAaia, "x x free x") => {
            [v_axis(rng, 0), v_axis(rng, 0), v_off_axis(rng, 0), v_axis(rng, 0)]
        }
        (GabcdAaia, "zero x free any") => {
            [ZV, v_axis(rng, 0), v_off_axis(rng, 2), v_free(rng)]
        }
        (GabcdAd00, "three diagonal, one free") => {
            [v_off_axis(rng, 2), v_axis(rng, 2), v_axis(rng, 2), v_axis(rng, 2)]
        }
        (Ghz, "three-on-x, one free") => {
            [v_axis(rng, 0), v_axis(rng, 0), v_axis(rng, 0), v_off_axis(rng, 0)]
        }
        (Labc2Generic, "single off-diagonal")
        | (La2b2Generic, "single off-diagonal")
        | (La203plus1, "single off-diagonal") => {
            [v_off_axis(rng, 2), v_axis(rng, 2), v_axis(rng, 2), v_axis(rng, 2)]
        }
        (Labc2Aba2, "single off-diagonal") => {
            // party 1 stays diagonal (the shear anchor), the moving slot is
            // party 2
            [v_axis(rng, 2), v_off_axis(rng, 2), v_axis(rng, 2), v_axis(rng, 2)]
        }
        (Labc2Aac2, "x-lead, rest diagonal")
        | (Lab02Ab, "x-lead, rest diagonal")
        | (La2b200b2, "x-lead, rest diagonal") => {
            [v_axis(rng, 0), v_axis(rng, 2), v_axis(rng, 2), v_axis(rng, 2)]
        }
        (Labc2Aac2, "zero lead, one off-diagonal") => {
            [ZV, v_off_axis(rng, 2), v_axis(rng, 2), v_axis(rng, 2)]
        }
        (Labc2Aaa2, "one back-party off-diagonal") => {
            [ZV, v_axis(rng, 2), v_axis(rng, 2), v_off_axis(rng, 2)]
        }
        (Labc200c2, "front pair active") => {
            [ZV, v_off_axis(rng, 2), v_axis(rng, 0), v_axis(rng, 2)]
        }
        (La2b2Minus, "exactly-three commuting") => {
            // S2 = 1 x sx x sz x sx: party 1 free (identity site), party 4
            // breaks the commutation
            [v_free(rng), v_axis(rng, 0), v_axis(rng, 2), v_off_axis(rng, 0)]
        }
        (La2b2Equal, "x2 x4 with party-3 off-diagonal") => {
            [v_axis(rng, 2), v_axis(rng, 0), v_off_axis(rng, 2), v_axis(rng, 0)]
        }
        (La40202, "one back-party off-diagonal") => {
            [ZV, v_axis(rng, 0), v_axis(rng, 2), v_off_axis(rng, 2)]
        }
        (W, "nonzero x0 coefficient") => return None, // realized separately
        (L07plus1, "one back-party off-diagonal") => {
            [v_axis(rng, 0), v_off_axis(rng, 2), v_axis(rng, 2), v_axis(rng, 2)]
        }
        (L07plus1, "x-front, diagonal back") => {
            [v_axis(rng, 0), v_axis(rng, 2), v_axis(rng, 2), v_axis(rng, 2)]
        }
        _ => return None,
    };
    Some(b)
}

/// Realize Gram data over the family seed: sqrt(G_i) applied to the seed.
pub fn realize_blochs(
    family: Family,
    params: &[num_complex::Complex64],
    blochs: &[[f64; 3]; 4],
) -> Result<PureState4, StateError> {
    let s = seed(family, params)?;
    let rep = LocalOperator::new([
        GramOperator::from_bloch(blochs[0]).g.psd_sqrt(),
        GramOperator::from_bloch(blochs[1]).g.psd_sqrt(),
        GramOperator::from_bloch(blochs[2]).g.psd_sqrt(),
        GramOperator::from_bloch(blochs[3]).g.psd_sqrt(),
    ]);
    apply_local(&rep, &s.state)
}

/// Realize one reachable-pattern target (the W pattern is built in state
/// space).
pub fn pattern_target<R: Rng>(
    family: Family,
    label: &str,
    params: &[num_complex::Complex64],
    rng: &mut R,
) -> Result<Option<PureState4>, StateError> {
    use crate::mat::{Mat2, ZC};
    if family == Family::W {
        let s = seed(Family::W, &[])?;
        let x0 = 0.15 + 0.5 * rng.gen::<f64>();
        let g3 = Mat2::new(cr(1.0), cr(x0), ZC, cr(0.6 + 0.5 * rng.gen::<f64>()));
        let op = LocalOperator::new([
            Mat2::diag(cr(1.0), cr(0.6 + 0.7 * rng.gen::<f64>())),
            Mat2::diag(cr(1.0), cr(0.6 + 0.7 * rng.gen::<f64>())),
            g3,
            Mat2::identity(),
        ]);
        return Ok(Some(apply_local(&op, &s.state)?));
    }
    match pattern_blochs(family, label, rng) {
        Some(b) => Ok(Some(realize_blochs(family, params, &b)?)),
        None => Ok(None),
    }
}
