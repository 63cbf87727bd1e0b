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

//! Eigenvalues of 4x4 complex matrices via the characteristic quartic and
//! a shifted QR iteration on its companion matrix, with Newton polish.

use crate::mat::{cr, Mat4, ONE, ZC};
use num_complex::Complex64 as C64;

/// Coefficients of the monic characteristic polynomial
/// `l^4 + c[3] l^3 + c[2] l^2 + c[1] l + c[0]` (Faddeev-LeVerrier).
pub fn char_poly(m: &Mat4) -> [C64; 4] {
    let mut coeffs = [ZC; 4];
    let mut mk = *m;
    let c3 = -mk.trace();
    coeffs[3] = c3;
    let mut aux = mk + Mat4::identity().scale(c3);
    mk = *m * aux;
    let c2 = -mk.trace() / cr(2.0);
    coeffs[2] = c2;
    aux = mk + Mat4::identity().scale(c2);
    mk = *m * aux;
    let c1 = -mk.trace() / cr(3.0);
    coeffs[1] = c1;
    aux = mk + Mat4::identity().scale(c1);
    mk = *m * aux;
    coeffs[0] = -mk.trace() / cr(4.0);
    coeffs
}

fn eval_poly(c: &[C64; 4], z: C64) -> (C64, C64) {
    // value and derivative of the monic quartic
    let p = (((z + c[3]) * z + c[2]) * z + c[1]) * z + c[0];
    let dp = ((cr(4.0) * z + cr(3.0) * c[3]) * z + cr(2.0) * c[2]) * z + c[1];
    (p, dp)
}

/// Companion matrix of the monic quartic (upper Hessenberg form).
fn companion(c: &[C64; 4]) -> [[C64; 4]; 4] {
    let mut m = [[ZC; 4]; 4];
    m[0][3] = -c[0];
    m[1][3] = -c[1];
    m[2][3] = -c[2];
    m[3][3] = -c[3];
    m[1][0] = ONE;
    m[2][1] = ONE;
    m[3][2] = ONE;
    m
}

/// Shifted QR iteration on a small Hessenberg matrix, Givens rotations.
fn qr_eigenvalues(mut h: [[C64; 4]; 4]) -> [C64; 4] {
    const N: usize = 4;
    let mut eigs = [ZC; N];
    let mut hi = N - 1;
    let mut iters = 0usize;
    loop {
        // deflate converged subdiagonals
        while hi > 0 {
            let small = 1e-15 * (h[hi][hi].norm() + h[hi - 1][hi - 1].norm() + 1e-300);
            if h[hi][hi - 1].norm() <= small {
                eigs[hi] = h[hi][hi];
                hi -= 1;
            } else {
                break;
            }
        }
        if hi == 0 {
            eigs[0] = h[0][0];
            return eigs;
        }
        iters += 1;
        if iters > 400 {
            // stalled; accept current diagonal (Newton polish cleans up later)
            for (k, e) in eigs.iter_mut().enumerate().take(hi + 1) {
                *e = h[k][k];
            }
            return eigs;
        }
        // Wilkinson shift from trailing 2x2 of the active block
        let a = h[hi - 1][hi - 1];
        let b = h[hi - 1][hi];
        let c_ = h[hi][hi - 1];
        let d = h[hi][hi];
        let tr = a + d;
        let det = a * d - b * c_;
        let disc = (tr * tr / cr(4.0) - det).sqrt();
        let m1 = tr / cr(2.0) + disc;
        let m2 = tr / cr(2.0) - disc;
        let mu = if (m1 - d).norm() < (m2 - d).norm() { m1 } else { m2 };
        // occasional exceptional shift to break symmetry stalls
        let mu = if iters % 37 == 0 {
            mu + cr(1e-3 * (h[hi][hi - 1].norm() + 1.0))
        } else {
            mu
        };

        for k in 0..=hi {
            h[k][k] -= mu;
        }
        // QR factorization of the active Hessenberg block via Givens
        let mut rot = [(ONE, ZC); 4];
        for k in 0..hi {
            let x = h[k][k];
            let y = h[k + 1][k];
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (cs, sn) = if r < 1e-300 {
                (ONE, ZC)
            } else {
                (x.conj() / cr(r), y.conj() / cr(r))
            };
            rot[k] = (cs, sn);
            for j in k..=hi {
                let hk = h[k][j];
                let hk1 = h[k + 1][j];
                h[k][j] = cs * hk + sn * hk1;
                h[k + 1][j] = -sn.conj() * hk + cs.conj() * hk1;
            }
        }
        // RQ
        for k in 0..hi {
            let (cs, sn) = rot[k];
            for i in 0..=(k + 1).min(hi) {
                let hik = h[i][k];
                let hik1 = h[i][k + 1];
                h[i][k] = hik * cs.conj() + hik1 * sn.conj();
                h[i][k + 1] = -hik * sn + hik1 * cs;
            }
        }
        for k in 0..=hi {
            h[k][k] += mu;
        }
    }
}

/// All four eigenvalues (with multiplicity) of a 4x4 complex matrix.
pub fn eigenvalues(m: &Mat4) -> [C64; 4] {
    let scale = m.norm_fro().max(1e-300);
    let ms = m.scale(cr(1.0 / scale));
    let coeffs = char_poly(&ms);
    let mut roots = qr_eigenvalues(companion(&coeffs));
    // Newton polish on the quartic (guards against QR stalls; harmless when
    // already converged, limited gain near defective roots)
    for r in roots.iter_mut() {
        for _ in 0..20 {
            let (p, dp) = eval_poly(&coeffs, *r);
            if dp.norm() < 1e-14 {
                break;
            }
            let step = p / dp;
            *r -= step;
            if step.norm() < 1e-16 {
                break;
            }
        }
    }
    for r in roots.iter_mut() {
        *r *= cr(scale);
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::c;

    #[test]
    fn diagonal_eigenvalues() {
        let m = Mat4::diag([cr(1.0), cr(2.0), cr(3.0), cr(4.0)]);
        let mut e: Vec<f64> = eigenvalues(&m).iter().map(|z| z.re).collect();
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in e.iter().zip([1.0, 2.0, 3.0, 4.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn complex_spectrum() {
        let m = Mat4::diag([c(0.0, 1.0), c(0.0, -1.0), c(2.0, 2.0), c(-0.5, 0.1)]);
        let e = eigenvalues(&m);
        for want in [c(0.0, 1.0), c(0.0, -1.0), c(2.0, 2.0), c(-0.5, 0.1)] {
            assert!(
                e.iter().any(|z| (z - want).norm() < 1e-10),
                "missing {want}"
            );
        }
    }

    #[test]
    fn nilpotent_roots_cluster_at_zero() {
        let mut m = Mat4::zero();
        m[(0, 1)] = cr(1.0);
        m[(1, 2)] = cr(1.0);
        m[(2, 3)] = cr(1.0);
        let e = eigenvalues(&m);
        for z in e {
            assert!(z.norm() < 1e-3);
        }
    }
}
