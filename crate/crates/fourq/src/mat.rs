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

//! Dense complex 2x2 and 4x4 matrices.
//!
//! Everything in this crate lives in dimension 2, 4 or 16, so the matrices
//! are plain fixed-size arrays with by-value semantics. Row-major layout.

use num_complex::Complex64 as C64;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

pub const ZC: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// 2x2 complex matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

/// 4x4 complex matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat4(pub [[C64; 4]; 4]);

impl Index<(usize, usize)> for Mat2 {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}
impl IndexMut<(usize, usize)> for Mat2 {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}
impl Index<(usize, usize)> for Mat4 {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}
impl IndexMut<(usize, usize)> for Mat4 {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

impl Mat2 {
    pub const fn zero() -> Self {
        Mat2([[ZC; 2]; 2])
    }

    pub const fn identity() -> Self {
        let mut m = [[ZC; 2]; 2];
        m[0][0] = ONE;
        m[1][1] = ONE;
        Mat2(m)
    }

    pub fn new(a: C64, b: C64, c_: C64, d: C64) -> Self {
        Mat2([[a, b], [c_, d]])
    }

    pub fn diag(a: C64, d: C64) -> Self {
        Mat2([[a, ZC], [ZC, d]])
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = *self;
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] *= s;
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        Mat2([[self.0[0][0], self.0[1][0]], [self.0[0][1], self.0[1][1]]])
    }

    pub fn adjoint(&self) -> Self {
        Mat2([
            [self.0[0][0].conj(), self.0[1][0].conj()],
            [self.0[0][1].conj(), self.0[1][1].conj()],
        ])
    }

    pub fn conj(&self) -> Self {
        let mut m = *self;
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] = m.0[i][j].conj();
            }
        }
        m
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn inv(&self) -> Option<Self> {
        let d = self.det();
        if d.norm() == 0.0 {
            return None;
        }
        let inv_d = ONE / d;
        Some(Mat2([
            [self.0[1][1] * inv_d, -self.0[0][1] * inv_d],
            [-self.0[1][0] * inv_d, self.0[0][0] * inv_d],
        ]))
    }

    pub fn norm_fro(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|x| x.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest singular value over smallest (infinite when singular).
    pub fn cond(&self) -> f64 {
        let g = self.adjoint() * *self;
        // eigenvalues of the 2x2 Hermitian PSD matrix g
        let t = g.trace().re;
        let d = g.det().re.max(0.0);
        let disc = (t * t / 4.0 - d).max(0.0).sqrt();
        let l1 = t / 2.0 + disc;
        let l2 = t / 2.0 - disc;
        if l2 <= 0.0 {
            f64::INFINITY
        } else {
            (l1 / l2).sqrt()
        }
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flatten()
            .all(|x| x.re.is_finite() && x.im.is_finite())
    }

    /// Hermitian part (self + self^dagger)/2.
    pub fn herm(&self) -> Self {
        (*self + self.adjoint()).scale(cr(0.5))
    }

    /// Principal square root of a positive semidefinite Hermitian matrix.
    pub fn psd_sqrt(&self) -> Self {
        // eigen-decomposition of a 2x2 Hermitian matrix
        let a = self.0[0][0].re;
        let d = self.0[1][1].re;
        let b = self.0[0][1];
        let tr = a + d;
        let det = (a * d - b.norm_sqr()).max(0.0);
        let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
        let l1 = (tr / 2.0 + disc).max(0.0);
        let l2 = (tr / 2.0 - disc).max(0.0);
        // eigenvector for l1: take the better-conditioned of the two
        // algebraic expressions (they degenerate in opposite regimes)
        let cand1 = [b, cr(l1 - a)];
        let cand2 = [cr(l1 - d), b.conj()];
        let n1sq = cand1[0].norm_sqr() + cand1[1].norm_sqr();
        let n2sq = cand2[0].norm_sqr() + cand2[1].norm_sqr();
        let scale = a.abs() + d.abs() + b.norm();
        if n1sq.max(n2sq) < (1e-14 * scale).powi(2) {
            return Mat2::diag(cr(a.max(0.0).sqrt()), cr(d.max(0.0).sqrt()));
        }
        let (v1, n1) = if n1sq >= n2sq {
            (cand1, n1sq.sqrt())
        } else {
            (cand2, n2sq.sqrt())
        };
        let v1 = [v1[0] / n1, v1[1] / n1];
        // orthogonal complement
        let v2 = [-v1[1].conj(), v1[0].conj()];
        let (s1, s2) = (l1.sqrt(), l2.sqrt());
        let mut m = Mat2::zero();
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] = v1[i] * v1[j].conj() * s1 + v2[i] * v2[j].conj() * s2;
            }
        }
        m
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let mut m = self;
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] += o.0[i][j];
            }
        }
        m
    }
}
impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        let mut m = self;
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] -= o.0[i][j];
            }
        }
        m
    }
}
impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(cr(-1.0))
    }
}
impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let mut m = Mat2::zero();
        for i in 0..2 {
            for j in 0..2 {
                let mut s = ZC;
                for k in 0..2 {
                    s += self.0[i][k] * o.0[k][j];
                }
                m.0[i][j] = s;
            }
        }
        m
    }
}

impl Mat4 {
    pub const fn zero() -> Self {
        Mat4([[ZC; 4]; 4])
    }

    pub const fn identity() -> Self {
        let mut m = [[ZC; 4]; 4];
        m[0][0] = ONE;
        m[1][1] = ONE;
        m[2][2] = ONE;
        m[3][3] = ONE;
        Mat4(m)
    }

    pub fn diag(d: [C64; 4]) -> Self {
        let mut m = Mat4::zero();
        for i in 0..4 {
            m.0[i][i] = d[i];
        }
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = *self;
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] *= s;
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Mat4::zero();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = self.0[j][i];
            }
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Mat4::zero();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        let mut m = *self;
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = m.0[i][j].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..4).map(|i| self.0[i][i]).sum()
    }

    pub fn norm_fro(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|x| x.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flatten()
            .all(|x| x.re.is_finite() && x.im.is_finite())
    }

    pub fn mul_vec(&self, v: &[C64; 4]) -> [C64; 4] {
        let mut out = [ZC; 4];
        for i in 0..4 {
            let mut s = ZC;
            for j in 0..4 {
                s += self.0[i][j] * v[j];
            }
            out[i] = s;
        }
        out
    }

    pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
        let mut m = Mat4::zero();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        m.0[2 * i + k][2 * j + l] = a.0[i][j] * b.0[k][l];
                    }
                }
            }
        }
        m
    }

    /// Determinant by cofactor expansion.
    pub fn det(&self) -> C64 {
        let m = &self.0;
        let mut det = ZC;
        for j in 0..4 {
            let mut sub = [[ZC; 3]; 3];
            for (r, row) in m.iter().enumerate().skip(1) {
                let mut cc = 0;
                for (col, &x) in row.iter().enumerate() {
                    if col != j {
                        sub[r - 1][cc] = x;
                        cc += 1;
                    }
                }
            }
            let d3 = sub[0][0] * (sub[1][1] * sub[2][2] - sub[1][2] * sub[2][1])
                - sub[0][1] * (sub[1][0] * sub[2][2] - sub[1][2] * sub[2][0])
                + sub[0][2] * (sub[1][0] * sub[2][1] - sub[1][1] * sub[2][0]);
            let sign = if j % 2 == 0 { ONE } else { -ONE };
            det += sign * m[0][j] * d3;
        }
        det
    }

    /// Inverse via Gauss-Jordan with partial pivoting.
    pub fn inv(&self) -> Option<Mat4> {
        let mut a = self.0;
        let mut b = Mat4::identity().0;
        for col in 0..4 {
            let mut piv = col;
            let mut best = a[col][col].norm();
            for r in (col + 1)..4 {
                if a[r][col].norm() > best {
                    best = a[r][col].norm();
                    piv = r;
                }
            }
            if best < 1e-300 {
                return None;
            }
            a.swap(col, piv);
            b.swap(col, piv);
            let inv_p = ONE / a[col][col];
            for j in 0..4 {
                a[col][j] *= inv_p;
                b[col][j] *= inv_p;
            }
            for r in 0..4 {
                if r != col {
                    let f = a[r][col];
                    if f.norm() != 0.0 {
                        for j in 0..4 {
                            let ac = a[col][j];
                            let bc = b[col][j];
                            a[r][j] -= f * ac;
                            b[r][j] -= f * bc;
                        }
                    }
                }
            }
        }
        Some(Mat4(b))
    }

    /// Solve self * x = rhs (column vector), None when singular.
    pub fn solve(&self, rhs: &[C64; 4]) -> Option<[C64; 4]> {
        self.inv().map(|inv| inv.mul_vec(rhs))
    }
}

impl Add for Mat4 {
    type Output = Mat4;
    fn add(self, o: Mat4) -> Mat4 {
        let mut m = self;
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] += o.0[i][j];
            }
        }
        m
    }
}
impl Sub for Mat4 {
    type Output = Mat4;
    fn sub(self, o: Mat4) -> Mat4 {
        let mut m = self;
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] -= o.0[i][j];
            }
        }
        m
    }
}
impl Neg for Mat4 {
    type Output = Mat4;
    fn neg(self) -> Mat4 {
        self.scale(cr(-1.0))
    }
}
impl Mul for Mat4 {
    type Output = Mat4;
    fn mul(self, o: Mat4) -> Mat4 {
        let mut m = Mat4::zero();
        for i in 0..4 {
            for j in 0..4 {
                let mut s = ZC;
                for k in 0..4 {
                    s += self.0[i][k] * o.0[k][j];
                }
                m.0[i][j] = s;
            }
        }
        m
    }
}

/// Pauli matrices. `pauli(0)` is the identity.
pub fn pauli(k: usize) -> Mat2 {
    match k {
        0 => Mat2::identity(),
        1 => Mat2::new(ZC, ONE, ONE, ZC),
        2 => Mat2::new(ZC, -I, I, ZC),
        3 => Mat2::new(ONE, ZC, ZC, -ONE),
        _ => panic!("pauli index out of range"),
    }
}

/// exp(i * alpha * sigma_w) for w in {1,2,3}.
pub fn pauli_rotation(w: usize, alpha: f64) -> Mat2 {
    let id = Mat2::identity().scale(cr(alpha.cos()));
    let s = pauli(w).scale(c(0.0, alpha.sin()));
    id + s
}

/// Hadamard gate.
pub fn hadamard() -> Mat2 {
    let s = cr(1.0 / 2.0_f64.sqrt());
    Mat2::new(s, s, s, -s)
}

/// diag(z, 1/z).
pub fn p_z(z: C64) -> Mat2 {
    Mat2::diag(z, ONE / z)
}

/// Upper shear [[1, x], [0, 1]].
pub fn shear_upper(x: C64) -> Mat2 {
    Mat2::new(ONE, x, ZC, ONE)
}

/// Lower shear [[1, 0], [x, 1]].
pub fn shear_lower(x: C64) -> Mat2 {
    Mat2::new(ONE, ZC, x, ONE)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_round_trip() {
        let m = Mat4([
            [c(1.0, 0.2), c(0.3, -0.1), c(0.0, 0.5), c(0.7, 0.0)],
            [c(0.2, 0.0), c(2.0, 0.1), c(0.4, 0.4), c(0.0, -0.3)],
            [c(-0.5, 0.6), c(0.1, 0.0), c(1.5, -0.2), c(0.2, 0.2)],
            [c(0.0, 0.9), c(-0.7, 0.3), c(0.3, 0.0), c(1.1, 0.4)],
        ]);
        let inv = m.inv().unwrap();
        let p = m * inv;
        assert!((p - Mat4::identity()).norm_fro() < 1e-12);
    }

    #[test]
    fn det_of_kron_splits() {
        let a = Mat2::new(c(1.0, 1.0), c(0.0, 2.0), c(0.5, 0.0), c(1.0, -1.0));
        let b = Mat2::new(c(0.0, 1.0), c(1.0, 0.0), c(2.0, 0.0), c(0.0, -0.5));
        let k = Mat4::kron(&a, &b);
        let want = a.det().powu(2) * b.det().powu(2);
        assert!((k.det() - want).norm() < 1e-12);
    }

    #[test]
    fn pauli_algebra() {
        let x = pauli(1);
        let y = pauli(2);
        let z = pauli(3);
        assert!(((x * y) - z.scale(I)).norm_fro() < 1e-15);
        assert!((x * x - Mat2::identity()).norm_fro() < 1e-15);
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let g = Mat2::new(c(1.3, 0.0), c(0.2, 0.4), c(0.2, -0.4), c(0.9, 0.0));
        let s = g.psd_sqrt();
        assert!((s * s - g).norm_fro() < 1e-12);
    }
}
