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

//! One-sided Jacobi SVD for 4x4 complex matrices.

use crate::mat::{cr, Mat4, ONE, ZC};
use num_complex::Complex64 as C64;

/// A = U diag(s) V^dagger with s sorted descending.
pub struct Svd4 {
    pub u: Mat4,
    pub s: [f64; 4],
    pub v: Mat4,
}

pub fn svd4(a: &Mat4) -> Svd4 {
    // work on a unit-norm copy: inputs can be extreme powers of small
    // matrices whose squared column norms would otherwise underflow
    let scale = a.norm_fro();
    if !(scale > 1e-280) || !scale.is_finite() {
        return Svd4 {
            u: Mat4::identity(),
            s: [0.0; 4],
            v: Mat4::identity(),
        };
    }
    let mut w = a.scale(cr(1.0 / scale)); // columns get rotated until mutually orthogonal
    let mut v = Mat4::identity();
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..3 {
            for q in (p + 1)..4 {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = ZC;
                for i in 0..4 {
                    app += w.0[i][p].norm_sqr();
                    aqq += w.0[i][q].norm_sqr();
                    apq += w.0[i][p].conj() * w.0[i][q];
                }
                // numerically zero columns are orthogonal to everything
                // (the input is unit normalized here)
                if app < 1e-120 || aqq < 1e-120 {
                    continue;
                }
                if !apq.re.is_finite() || !apq.im.is_finite() || apq.norm() == 0.0 {
                    continue;
                }
                off = off.max(apq.norm() / (app * aqq).sqrt().max(1e-300));
                if apq.norm() <= 1e-30 * (app * aqq).sqrt().max(1e-300) {
                    continue;
                }
                // Hermitian 2x2 [[app, apq], [conj(apq), aqq]] -> rotation
                let tau = (aqq - app) / (2.0 * apq.norm());
                if !tau.is_finite() {
                    continue;
                }
                let t = if tau.abs() > 1e120 {
                    0.5 / tau
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                let phase = apq / cr(apq.norm());
                // columns (p,q) <- (p,q) * [[c, s*phase],[-s*conj(phase), c]]
                for i in 0..4 {
                    let wp = w.0[i][p];
                    let wq = w.0[i][q];
                    w.0[i][p] = wp * cr(cs) - wq * phase.conj() * cr(sn);
                    w.0[i][q] = wp * phase * cr(sn) + wq * cr(cs);
                }
                for i in 0..4 {
                    let vp = v.0[i][p];
                    let vq = v.0[i][q];
                    v.0[i][p] = vp * cr(cs) - vq * phase.conj() * cr(sn);
                    v.0[i][q] = vp * phase * cr(sn) + vq * cr(cs);
                }
            }
        }
        if off < 1e-15 {
            break;
        }
    }
    // singular values = column norms; U = normalized columns
    let mut s = [0.0f64; 4];
    let mut u = Mat4::zero();
    for j in 0..4 {
        let mut n = 0.0;
        for i in 0..4 {
            n += w.0[i][j].norm_sqr();
        }
        let n = n.sqrt();
        s[j] = n;
        if n > 1e-300 {
            for i in 0..4 {
                u.0[i][j] = w.0[i][j] / cr(n);
            }
        } else {
            u.0[j][j] = ONE; // arbitrary unit column for a zero direction
        }
    }
    // restore the overall scale
    for x in s.iter_mut() {
        *x *= scale;
    }
    // sort descending, permuting U and V columns
    let mut idx = [0usize, 1, 2, 3];
    idx.sort_by(|&i, &j| s[j].partial_cmp(&s[i]).unwrap_or(std::cmp::Ordering::Equal));
    let mut us = Mat4::zero();
    let mut vs = Mat4::zero();
    let mut ss = [0.0f64; 4];
    for (newj, &oldj) in idx.iter().enumerate() {
        ss[newj] = s[oldj];
        for i in 0..4 {
            us.0[i][newj] = u.0[i][oldj];
            vs.0[i][newj] = v.0[i][oldj];
        }
    }
    Svd4 { u: us, s: ss, v: vs }
}

/// Numerical rank with an absolute threshold on singular values.
pub fn rank4(a: &Mat4, tol: f64) -> usize {
    svd4(a).s.iter().filter(|&&x| x > tol).count()
}

/// Orthonormal basis (columns) of the numerical nullspace of `a`.
pub fn nullspace4(a: &Mat4, tol: f64) -> Vec<[C64; 4]> {
    let Svd4 { s, v, .. } = svd4(a);
    let mut out = Vec::new();
    for j in 0..4 {
        if s[j] <= tol {
            let mut col = [ZC; 4];
            for i in 0..4 {
                col[i] = v.0[i][j];
            }
            out.push(col);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::c;

    #[test]
    fn reconstructs() {
        let a = Mat4([
            [c(1.0, 0.5), c(0.0, -1.0), c(2.0, 0.0), c(0.3, 0.3)],
            [c(0.0, 0.0), c(1.5, 0.0), c(-0.7, 0.2), c(0.0, 1.0)],
            [c(0.4, -0.4), c(0.0, 0.0), c(0.9, 0.0), c(1.0, 0.0)],
            [c(0.1, 0.1), c(0.2, 0.0), c(0.0, 0.0), c(-1.0, 0.5)],
        ]);
        let Svd4 { u, s, v } = svd4(&a);
        let rec = u * Mat4::diag([cr(s[0]), cr(s[1]), cr(s[2]), cr(s[3])]) * v.adjoint();
        assert!((rec - a).norm_fro() < 1e-12);
        // U unitary
        assert!((u.adjoint() * u - Mat4::identity()).norm_fro() < 1e-12);
        assert!((v.adjoint() * v - Mat4::identity()).norm_fro() < 1e-12);
    }

    #[test]
    fn detects_rank() {
        let mut a = Mat4::zero();
        a[(0, 0)] = cr(2.0);
        a[(1, 1)] = cr(1e-12);
        assert_eq!(rank4(&a, 1e-8), 1);
        assert_eq!(nullspace4(&a, 1e-8).len(), 3);
    }
}
