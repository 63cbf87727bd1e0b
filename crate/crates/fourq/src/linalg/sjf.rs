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

//! Symmetric Jordan form A = O R O^T of a complex symmetric matrix, with
//! O complex orthogonal of determinant +1 and R the symmetric block normal
//! form T J T^dagger.

use super::eigen::{
    eigenstructure_tol, jordan_chains, matrix_sqrt, JordanStructure, LinalgError,
};
use crate::mat::{c, cr, Mat4, ONE, ZC};
use num_complex::Complex64 as C64;

/// Entries of the d x d unitary symmetric T block,
/// T[j][k] = (delta_{j,k} - i delta_{j,d-k+1}) / sqrt(2), T^(1) = 1.
pub fn t_block(d: usize) -> Vec<Vec<C64>> {
    assert!((1..=4).contains(&d), "block size out of range");
    if d == 1 {
        return vec![vec![ONE]];
    }
    let s = 1.0 / 2.0_f64.sqrt();
    let mut t = vec![vec![ZC; d]; d];
    for (j, row) in t.iter_mut().enumerate() {
        for (k, x) in row.iter_mut().enumerate() {
            let mut v = ZC;
            if j == k {
                v += cr(s);
            }
            if j + k == d - 1 {
                v += c(0.0, -s);
            }
            *x = v;
        }
    }
    t
}

/// The explicit d x d symmetric block R^(d)(lambda):
/// half the 0/1 tridiagonal plus i/2 times the signed anti-tridiagonal,
/// shifted by lambda.
pub fn r_block(d: usize, lambda: C64) -> Vec<Vec<C64>> {
    assert!((1..=4).contains(&d));
    let mut r = vec![vec![ZC; d]; d];
    for (j, row) in r.iter_mut().enumerate() {
        for (k, x) in row.iter_mut().enumerate() {
            let mut v = ZC;
            if j.abs_diff(k) == 1 {
                v += cr(0.5);
            }
            // anti-diagonal signs: +i/2 where j+k = d-2, -i/2 where j+k = d
            if j + k + 2 == d {
                v += c(0.0, 0.5);
            }
            if j + k == d {
                v += c(0.0, -0.5);
            }
            if j == k {
                v += lambda;
            }
            *x = v;
        }
    }
    r
}

fn embed_blocks(blocks: &[Vec<Vec<C64>>]) -> Mat4 {
    let mut m = Mat4::zero();
    let mut pos = 0;
    for b in blocks {
        let d = b.len();
        for i in 0..d {
            for j in 0..d {
                m.0[pos + i][pos + j] = b[i][j];
            }
        }
        pos += d;
    }
    assert_eq!(pos, 4);
    m
}

/// Direct sum of T blocks for a structure (in its block order).
pub fn t_matrix(st: &JordanStructure) -> Mat4 {
    let blocks: Vec<_> = st.blocks.iter().map(|b| t_block(b.size)).collect();
    embed_blocks(&blocks)
}

/// Direct sum of R blocks for a structure (in its block order).
pub fn r_matrix(st: &JordanStructure) -> Mat4 {
    let blocks: Vec<_> = st
        .blocks
        .iter()
        .map(|b| r_block(b.size, b.eigenvalue))
        .collect();
    embed_blocks(&blocks)
}

/// Result of the symmetric Jordan decomposition.
#[derive(Clone, Debug)]
pub struct SymmetricJordanDecomposition {
    pub r: Mat4,
    pub o: Mat4,
    pub structure: JordanStructure,
    /// True when the determinant -1 branch had to be resolved by working on
    /// the swap-conjugated input Q A Q^T (Q = diag(1,1,-1,1), the image of
    /// the particle 1 <-> 2 exchange inside the magic basis). In that case
    /// O R O^T reconstructs Q A Q^T rather than A itself.
    pub swap_applied: bool,
}

/// The orthogonal, determinant -1 image of the particle 1 <-> 2 swap on the
/// Z operators.
pub fn swap_fix_q() -> Mat4 {
    Mat4::diag([ONE, ONE, -ONE, ONE])
}

impl SymmetricJordanDecomposition {
    /// O R O^T; equals the input when `swap_applied` is false, and the
    /// swap-conjugated input otherwise.
    pub fn reconstruct(&self) -> Mat4 {
        self.o * self.r * self.o.transpose()
    }
}

/// Symmetric Jordan form with automatically detected structure in canonical
/// block order.
pub fn symmetric_jordan_form(a: &Mat4, tol: f64) -> Result<SymmetricJordanDecomposition, LinalgError> {
    let asym = (*a - a.transpose()).norm_fro();
    if asym > 1e-8 * a.norm_fro().max(1.0) {
        return Err(LinalgError::NotSymmetric(asym));
    }
    let st = eigenstructure_tol(a, tol)?;
    symmetric_jordan_form_with_structure(a, &st, true)
}

/// Symmetric Jordan form against a caller-supplied structure without any
/// determinant fixing: O comes out with whatever sign the construction
/// produces (always +1 or -1).
pub fn symmetric_jordan_form_natural(
    a: &Mat4,
    st: &JordanStructure,
) -> Result<SymmetricJordanDecomposition, LinalgError> {
    sjf_once(a, st)
}

/// Symmetric Jordan form against a caller-supplied structure (block order is
/// preserved, so R comes out in exactly that order).
pub fn symmetric_jordan_form_with_structure(
    a: &Mat4,
    st: &JordanStructure,
    allow_swap: bool,
) -> Result<SymmetricJordanDecomposition, LinalgError> {
    let dec = sjf_once(a, st)?;
    let deto = dec.o.det();
    if (deto - ONE).norm() < 1e-6 {
        return Ok(dec);
    }
    // determinant -1: negating all chain columns of an odd-size block flips
    // the determinant and leaves R invariant
    if let Some(flip) = st.blocks.iter().position(|b| b.size % 2 == 1) {
        let mut o = dec.o;
        let mut pos = 0;
        for (bi, b) in st.blocks.iter().enumerate() {
            if bi == flip {
                for k in 0..b.size {
                    for i in 0..4 {
                        o.0[i][pos + k] = -o.0[i][pos + k];
                    }
                }
            }
            pos += b.size;
        }
        return Ok(SymmetricJordanDecomposition { o, ..dec });
    }
    if !allow_swap {
        return Err(LinalgError::Degenerate(
            "determinant -1 with no odd block and swap disabled".into(),
        ));
    }
    // all blocks even ({2,2} or {4}): the sign is rigid; decompose the
    // swap-conjugated matrix instead
    let q = swap_fix_q();
    let a2 = q * *a * q.transpose();
    let dec2 = sjf_once(&a2, st)?;
    let det2 = dec2.o.det();
    if (det2 - ONE).norm() > 1e-6 {
        return Err(LinalgError::Degenerate(format!(
            "determinant not +1 after swap fix (det {det2})"
        )));
    }
    Ok(SymmetricJordanDecomposition {
        swap_applied: true,
        ..dec2
    })
}

fn sjf_once(a: &Mat4, st: &JordanStructure) -> Result<SymmetricJordanDecomposition, LinalgError> {
    let v = jordan_chains(a, st)?;
    let t = t_matrix(st);
    let w = v * t.adjoint();
    let m = w.transpose() * w;
    let s = matrix_sqrt(&m)?;
    let sinv = s.inv().ok_or(LinalgError::Singular)?;
    let mut o = w * sinv;
    // Newton polish toward O O^T = 1
    for _ in 0..40 {
        let e = o * o.transpose() - Mat4::identity();
        if e.norm_fro() < 1e-15 {
            break;
        }
        if e.norm_fro() > 0.9 {
            break; // polish would diverge; leave as is and let caller judge
        }
        // O <- O (3 I - O^T O) / 2
        let corr = (Mat4::identity().scale(cr(3.0)) - o.transpose() * o).scale(cr(0.5));
        o = o * corr;
    }
    let r = r_matrix(st);
    Ok(SymmetricJordanDecomposition {
        r,
        o,
        structure: st.clone(),
        swap_applied: false,
    })
}

/// A symmetric square root of a nonsingular symmetric matrix: B with
/// B B^T = B^2 = A (B is a function of A, hence symmetric and commuting).
pub fn symmetric_sqrt(a: &Mat4) -> Result<Mat4, LinalgError> {
    matrix_sqrt(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigen::{expm, JordanBlock};
    use rand::Rng;
    use rand::SeedableRng;

    fn random_antisymmetric<R: Rng>(rng: &mut R, scale: f64) -> Mat4 {
        let mut k = Mat4::zero();
        for i in 0..4 {
            for j in (i + 1)..4 {
                let z = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5) * cr(scale);
                k.0[i][j] = z;
                k.0[j][i] = -z;
            }
        }
        k
    }

    #[test]
    fn t_blocks_are_unitary_and_symmetric() {
        for d in 1..=4 {
            let t = t_block(d);
            for i in 0..d {
                for j in 0..d {
                    // symmetry
                    assert!((t[i][j] - t[j][i]).norm() < 1e-15);
                    // unitarity
                    let mut dot = ZC;
                    for k in 0..d {
                        dot += t[i][k] * t[j][k].conj();
                    }
                    let want = if i == j { ONE } else { ZC };
                    assert!((dot - want).norm() < 1e-12, "d={d} i={i} j={j}");
                }
            }
        }
    }

    #[test]
    fn t_one_and_two_match_display() {
        assert_eq!(t_block(1)[0][0], ONE);
        let t = t_block(2);
        let s = 1.0 / 2.0_f64.sqrt();
        assert!((t[0][0] - cr(s)).norm() < 1e-15);
        assert!((t[0][1] - c(0.0, -s)).norm() < 1e-15);
        assert!((t[1][0] - c(0.0, -s)).norm() < 1e-15);
        assert!((t[1][1] - cr(s)).norm() < 1e-15);
    }

    #[test]
    fn r_equals_t_j_t_dagger() {
        for d in 1..=4 {
            let lam = c(0.3, -0.8);
            let st = JordanStructure {
                blocks: vec![JordanBlock {
                    size: d,
                    eigenvalue: lam,
                }],
                margin: f64::INFINITY,
            };
            // embed in 4x4 only when d == 4; otherwise compare raw blocks
            let t = t_block(d);
            let r = r_block(d, lam);
            // J block
            let mut j = vec![vec![ZC; d]; d];
            for i in 0..d {
                j[i][i] = lam;
                if i + 1 < d {
                    j[i][i + 1] = ONE;
                }
            }
            // T J T^dagger
            let mut tj = vec![vec![ZC; d]; d];
            for a in 0..d {
                for b in 0..d {
                    let mut s = ZC;
                    for k in 0..d {
                        s += t[a][k] * j[k][b];
                    }
                    tj[a][b] = s;
                }
            }
            for a in 0..d {
                for b in 0..d {
                    let mut s = ZC;
                    for k in 0..d {
                        s += tj[a][k] * t[b][k].conj();
                    }
                    assert!(
                        (s - r[a][b]).norm() < 1e-12,
                        "d={d} ({a},{b}): {s} vs {:?}",
                        r[a][b]
                    );
                }
            }
            let _ = st;
        }
    }

    #[test]
    fn diagonal_input_is_fixed_point() {
        let a = Mat4::diag([cr(0.9), cr(0.5), cr(0.2), cr(0.1)]);
        let dec = symmetric_jordan_form(&a, 1e-7).unwrap();
        assert!(!dec.swap_applied);
        assert_eq!(dec.structure.shape(), vec![1, 1, 1, 1]);
        assert!((dec.reconstruct() - a).norm_fro() < 1e-10);
        assert!((dec.o.det() - ONE).norm() < 1e-10);
    }

    #[test]
    fn plant_and_recover_two_block() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for trial in 0..20 {
            let st = JordanStructure {
                blocks: vec![
                    JordanBlock {
                        size: 2,
                        eigenvalue: c(1.1, 0.3),
                    },
                    JordanBlock {
                        size: 1,
                        eigenvalue: c(-0.4, 0.0),
                    },
                    JordanBlock {
                        size: 1,
                        eigenvalue: c(0.2, -0.9),
                    },
                ],
                margin: f64::INFINITY,
            };
            let r = r_matrix(&st);
            let o0 = expm(&random_antisymmetric(&mut rng, 0.7));
            let a = o0 * r * o0.transpose();
            let dec = symmetric_jordan_form(&a, 1e-7).unwrap();
            assert_eq!(dec.structure.shape(), vec![2, 1, 1], "trial {trial}");
            let rel = (dec.reconstruct() - a).norm_fro() / a.norm_fro();
            assert!(rel < 1e-8, "trial {trial}: rel err {rel}");
            assert!((dec.o.det() - ONE).norm() < 1e-8);
        }
    }
}
