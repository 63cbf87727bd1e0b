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

//! Separable-transformation feasibility: decide whether probabilities p_k
//! exist with sum_k p_k S_k^dag (H1 x H2 x H3 x H4) S_k = r (G1 x .. x G4),
//! solved as a linear program over the stacked real entries.

use super::simplex::lp_feasible;
use crate::state::{GramOperator, LocalOperator};
use num_complex::Complex64 as C64;

/// One feasibility instance.
#[derive(Clone)]
pub struct SepInstance {
    pub g: [GramOperator; 4],
    pub h: [GramOperator; 4],
    pub symmetries: Vec<LocalOperator>,
    /// Norm ratio r; 1 whenever only unitary symmetries are in play.
    pub r: f64,
}

#[derive(Clone, Debug)]
pub struct SepResult {
    pub feasible: bool,
    pub probabilities: Vec<f64>,
    pub residual: f64,
}

/// The 16x16 product operator (x)_i m_i as explicit entries.
fn kron4(ms: &[crate::mat::Mat2; 4]) -> Vec<Vec<C64>> {
    let mut out = vec![vec![C64::new(0.0, 0.0); 16]; 16];
    for (r, row) in out.iter_mut().enumerate() {
        let rb = [(r >> 3) & 1, (r >> 2) & 1, (r >> 1) & 1, r & 1];
        for (c, x) in row.iter_mut().enumerate() {
            let cb = [(c >> 3) & 1, (c >> 2) & 1, (c >> 1) & 1, c & 1];
            let mut v = C64::new(1.0, 0.0);
            for p in 0..4 {
                v *= ms[p].0[rb[p]][cb[p]];
            }
            *x = v;
        }
    }
    out
}

fn conj_quad(h: &[GramOperator; 4], s: &LocalOperator) -> [crate::mat::Mat2; 4] {
    let mut out = [crate::mat::Mat2::zero(); 4];
    for p in 0..4 {
        out[p] = s.ops[p].adjoint() * h[p].g * s.ops[p];
    }
    out
}

/// Solve the feasibility problem. Infeasible is a normal outcome.
pub fn sep_feasible(inst: &SepInstance) -> SepResult {
    let m = inst.symmetries.len();
    let targets: Vec<Vec<Vec<C64>>> = inst
        .symmetries
        .iter()
        .map(|s| kron4(&conj_quad(&inst.h, s)))
        .collect();
    let gmats = [inst.g[0].g, inst.g[1].g, inst.g[2].g, inst.g[3].g];
    let gbig = kron4(&gmats);

    // rows: real parts of the upper triangle including the diagonal, then
    // imaginary parts of the strict upper triangle, then normalization
    let mut a: Vec<Vec<f64>> = Vec::new();
    let mut b: Vec<f64> = Vec::new();
    for i in 0..16 {
        for j in i..16 {
            let mut row = Vec::with_capacity(m);
            for t in &targets {
                row.push(t[i][j].re);
            }
            a.push(row);
            b.push(inst.r * gbig[i][j].re);
            if j > i {
                let mut row = Vec::with_capacity(m);
                for t in &targets {
                    row.push(t[i][j].im);
                }
                a.push(row);
                b.push(inst.r * gbig[i][j].im);
            }
        }
    }
    a.push(vec![1.0; m]);
    b.push(1.0);

    let out = lp_feasible(&a, &b, 1e-9);
    // direct residual of the operator equation at the returned p
    let mut residual = 0.0f64;
    {
        let mut acc = vec![vec![C64::new(0.0, 0.0); 16]; 16];
        for (k, t) in targets.iter().enumerate() {
            let pk = out.x.get(k).copied().unwrap_or(0.0);
            for i in 0..16 {
                for j in 0..16 {
                    acc[i][j] += t[i][j] * C64::new(pk, 0.0);
                }
            }
        }
        for i in 0..16 {
            for j in 0..16 {
                residual += (acc[i][j] - gbig[i][j] * C64::new(inst.r, 0.0)).norm_sqr();
            }
        }
        residual = residual.sqrt();
    }
    SepResult {
        feasible: out.feasible && residual <= 1e-8,
        probabilities: out.x,
        residual,
    }
}

/// Scan a range of r values (log spaced) and return the best outcome; used
/// for falsification runs with non-unitary symmetry samples.
pub fn sep_feasible_scan(inst: &SepInstance, r_lo: f64, r_hi: f64, points: usize) -> (f64, SepResult) {
    let mut best: Option<(f64, SepResult)> = None;
    for k in 0..points {
        let t = k as f64 / (points.max(2) - 1) as f64;
        let r = r_lo * (r_hi / r_lo).powf(t);
        let mut i2 = inst.clone();
        i2.r = r;
        let res = sep_feasible(&i2);
        let better = match &best {
            None => true,
            Some((_, b)) => {
                (res.feasible && !b.feasible) || (res.feasible == b.feasible && res.residual < b.residual)
            }
        };
        if better {
            best = Some((r, res));
        }
    }
    best.expect("points >= 1")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::{cr, pauli, Mat2};
    use crate::state::GramOperator;

    fn gram_from_bloch(b: [f64; 3]) -> GramOperator {
        GramOperator::from_bloch(b)
    }

    #[test]
    fn identity_only_same_state_feasible() {
        let g = [
            gram_from_bloch([0.1, 0.0, 0.2]),
            gram_from_bloch([0.0, 0.3, 0.0]),
            gram_from_bloch([0.0, 0.0, 0.0]),
            gram_from_bloch([0.2, 0.1, 0.0]),
        ];
        let inst = SepInstance {
            g,
            h: g,
            symmetries: vec![LocalOperator::identity()],
            r: 1.0,
        };
        let res = sep_feasible(&inst);
        assert!(res.feasible);
        assert!((res.probabilities[0] - 1.0).abs() < 1e-9);
        assert!(res.residual <= 1e-12);
    }

    #[test]
    fn sigma_z_two_outcome_feasible_with_expected_p() {
        // symmetry {1, sz^4}: H1 with off-diagonal x component h, G1 with
        // x component (2p-1) h, identical diagonals elsewhere
        let p = 0.7f64;
        let hx = 0.3f64;
        let h = [
            gram_from_bloch([hx, 0.0, 0.1]),
            gram_from_bloch([0.0, 0.0, 0.2]),
            gram_from_bloch([0.0, 0.0, -0.1]),
            gram_from_bloch([0.0, 0.0, 0.05]),
        ];
        let g = [
            gram_from_bloch([(2.0 * p - 1.0) * hx, 0.0, 0.1]),
            gram_from_bloch([0.0, 0.0, 0.2]),
            gram_from_bloch([0.0, 0.0, -0.1]),
            gram_from_bloch([0.0, 0.0, 0.05]),
        ];
        let sz = LocalOperator::uniform(pauli(3));
        let inst = SepInstance {
            g,
            h,
            symmetries: vec![LocalOperator::identity(), sz],
            r: 1.0,
        };
        let res = sep_feasible(&inst);
        assert!(res.feasible, "residual {}", res.residual);
        assert!((res.probabilities[0] - p).abs() < 1e-8, "{:?}", res.probabilities);
    }

    #[test]
    fn two_nondiagonal_factors_infeasible() {
        // {1, sz^4} cannot move two off-diagonal factors independently
        let h = [
            gram_from_bloch([0.3, 0.0, 0.1]),
            gram_from_bloch([0.25, 0.0, 0.2]),
            gram_from_bloch([0.0, 0.0, -0.1]),
            gram_from_bloch([0.0, 0.0, 0.05]),
        ];
        let g = [
            gram_from_bloch([0.1, 0.0, 0.1]),
            gram_from_bloch([0.2, 0.0, 0.2]),
            gram_from_bloch([0.0, 0.0, -0.1]),
            gram_from_bloch([0.0, 0.0, 0.05]),
        ];
        let sz = LocalOperator::uniform(pauli(3));
        let inst = SepInstance {
            g,
            h,
            symmetries: vec![LocalOperator::identity(), sz],
            r: 1.0,
        };
        let res = sep_feasible(&inst);
        assert!(!res.feasible);
    }

    #[test]
    fn kron4_matches_manual_entry() {
        let ms = [
            Mat2::diag(cr(1.0), cr(2.0)),
            Mat2::identity(),
            pauli(1),
            Mat2::identity(),
        ];
        let k = kron4(&ms);
        // entry |0010><0000|: party3 flips -> row 0b0010 = 2, col 0
        assert!((k[2][0] - cr(1.0)).norm() < 1e-15);
        assert!((k[10][8] - cr(2.0)).norm() < 1e-15);
    }
}
