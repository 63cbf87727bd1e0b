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

//! The magic (Bell) basis change on two qubits and the induced
//! SL(2)xSL(2) <-> SO(4, C) correspondence.

use super::svd::svd4;
use crate::mat::{c, cr, Mat2, Mat4, ZC};
use num_complex::Complex64 as C64;

/// Unitary mapping the computational basis to the magic basis:
/// columns are |Phi+>, -i|Phi->, |Psi->, -i|Psi+>.
pub fn magic_u() -> Mat4 {
    let s = 1.0 / 2.0_f64.sqrt();
    Mat4([
        [c(s, 0.0), c(0.0, -s), ZC, ZC],
        [ZC, ZC, c(s, 0.0), c(0.0, -s)],
        [ZC, ZC, c(-s, 0.0), c(0.0, -s)],
        [c(s, 0.0), c(0.0, s), ZC, ZC],
    ])
}

/// U^dagger A U.
pub fn magic_transform(a: &Mat4) -> Mat4 {
    let u = magic_u();
    u.adjoint() * *a * u
}

/// U A U^dagger (inverse direction).
pub fn magic_untransform(a: &Mat4) -> Mat4 {
    let u = magic_u();
    u * *a * u.adjoint()
}

/// How far a 4x4 matrix is from being complex orthogonal, |O O^T - 1|_F.
pub fn orthogonality_defect(o: &Mat4) -> f64 {
    (*o * o.transpose() - Mat4::identity()).norm_fro()
}

/// Nearest Kronecker factorization: find 2x2 a, b minimizing |m - a (x) b|.
/// Returns (a, b, relative residual). Uses the rank-one rearrangement.
pub fn kron_split(m: &Mat4) -> (Mat2, Mat2, f64) {
    // rearrangement R[2i+j][2k+l] = m[2i+k][2j+l]
    let mut r = Mat4::zero();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    r.0[2 * i + j][2 * k + l] = m.0[2 * i + k][2 * j + l];
                }
            }
        }
    }
    let svd = svd4(&r);
    let s0 = svd.s[0];
    let mut a = Mat2::zero();
    let mut b = Mat2::zero();
    let scale = cr(s0.sqrt());
    for i in 0..2 {
        for j in 0..2 {
            a.0[i][j] = svd.u.0[2 * i + j][0] * scale;
            b.0[i][j] = svd.v.0[2 * i + j][0].conj() * scale;
        }
    }
    let resid = (*m - Mat4::kron(&a, &b)).norm_fro() / m.norm_fro().max(1e-300);
    (a, b, resid)
}

/// Tensor product of four single-qubit operators as a 16x16 action is never
/// materialized; this helper gives the two-qubit halves.
pub fn kron2(a: &Mat2, b: &Mat2) -> Mat4 {
    Mat4::kron(a, b)
}

/// Random special-linear 2x2 matrix (determinant one), entries from the
/// standard complex Gaussian.
pub fn random_sl2<R: rand::Rng>(rng: &mut R) -> Mat2 {
    loop {
        let mut m = Mat2::zero();
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] = C64::new(rng.sample(rand_distr_standard()), rng.sample(rand_distr_standard()));
            }
        }
        let d = m.det();
        if d.norm() > 1e-3 {
            let s = d.sqrt();
            return m.scale(cr(1.0) / s);
        }
    }
}

/// Random SU(2) element (Haar).
pub fn random_su2<R: rand::Rng>(rng: &mut R) -> Mat2 {
    loop {
        let a = C64::new(rng.sample(rand_distr_standard()), rng.sample(rand_distr_standard()));
        let b = C64::new(rng.sample(rand_distr_standard()), rng.sample(rand_distr_standard()));
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if n > 1e-6 {
            let a = a / cr(n);
            let b = b / cr(n);
            return Mat2::new(a, -b.conj(), b, a.conj());
        }
    }
}

fn rand_distr_standard() -> rand::distributions::Standard {
    rand::distributions::Standard
}

/// Random SL(2) with singular values in [1/sqrt(cond), sqrt(cond)]:
/// u * diag(s, 1/s) * v with u, v in SU(2).
pub fn random_sl2_bounded<R: rand::Rng>(rng: &mut R, max_cond: f64) -> Mat2 {
    let u = random_su2(rng);
    let v = random_su2(rng);
    let smax = max_cond.sqrt();
    let s = 1.0 + rng.gen::<f64>() * (smax - 1.0);
    u * Mat2::diag(cr(s), cr(1.0 / s)) * v
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn u_is_unitary() {
        let u = magic_u();
        assert!((u.adjoint() * u - Mat4::identity()).norm_fro() < 1e-15);
    }

    #[test]
    fn sl2_pair_becomes_orthogonal() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let g1 = random_sl2(&mut rng);
            let g2 = random_sl2(&mut rng);
            let o = magic_transform(&Mat4::kron(&g1, &g2));
            assert!(orthogonality_defect(&o) < 1e-10);
            assert!((o.det() - crate::mat::ONE).norm() < 1e-8);
        }
    }

    #[test]
    fn su2_pair_becomes_real() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let u1 = random_su2(&mut rng);
            let u2 = random_su2(&mut rng);
            let o = magic_transform(&Mat4::kron(&u1, &u2));
            let im: f64 = o.0.iter().flatten().map(|z| z.im.abs()).fold(0.0, f64::max);
            assert!(im < 1e-10);
        }
    }

    #[test]
    fn kron_split_recovers() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let a = random_sl2(&mut rng);
        let b = random_sl2(&mut rng);
        let m = Mat4::kron(&a, &b);
        let (a2, b2, resid) = kron_split(&m);
        assert!(resid < 1e-12);
        assert!((Mat4::kron(&a2, &b2) - m).norm_fro() < 1e-10);
    }
}
