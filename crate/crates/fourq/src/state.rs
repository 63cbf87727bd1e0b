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

//! Pure four-qubit states, local operators, Gram/Bloch data, partial traces
//! and the Z operator pair.

use crate::linalg::magic::magic_u;
use crate::mat::{cr, pauli, Mat2, Mat4, ZC};
use num_complex::Complex64 as C64;
use thiserror::Error;

/// Threshold below which a local operator counts as singular; SLOCC needs
/// full rank, so nothing meaningful can be asked about operators below it.
pub const EPS_INV: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum StateError {
    #[error("local operator on party {party} is singular (|det| = {det:.3e})")]
    SingularOperator { party: usize, det: f64 },
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("invalid seed parameters for {family}: {reason}")]
    InvalidParameters { family: String, reason: String },
    #[error("amplitudes are not finite")]
    NotFinite,
}

/// A pure state of four qubits. Amplitudes are indexed by the bitstring
/// q1 q2 q3 q4 with q1 the most significant bit.
#[derive(Clone, Copy, Debug)]
pub struct PureState4 {
    pub amp: [C64; 16],
}

impl PureState4 {
    pub fn zero() -> Self {
        PureState4 { amp: [ZC; 16] }
    }

    pub fn from_amplitudes(amp: [C64; 16]) -> Result<Self, StateError> {
        let s = PureState4 { amp };
        if !s.is_finite() {
            return Err(StateError::NotFinite);
        }
        Ok(s)
    }

    /// Basis state |q1 q2 q3 q4>.
    pub fn basis(q1: usize, q2: usize, q3: usize, q4: usize) -> Self {
        let mut amp = [ZC; 16];
        amp[(q1 << 3) | (q2 << 2) | (q3 << 1) | q4] = cr(1.0);
        PureState4 { amp }
    }

    pub fn is_finite(&self) -> bool {
        self.amp.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn norm(&self) -> f64 {
        self.amp.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Result<Self, StateError> {
        let n = self.norm();
        if n < 1e-300 {
            return Err(StateError::ZeroNorm);
        }
        let mut amp = self.amp;
        for z in amp.iter_mut() {
            *z /= cr(n);
        }
        Ok(PureState4 { amp })
    }

    pub fn scaled(&self, s: C64) -> Self {
        let mut amp = self.amp;
        for z in amp.iter_mut() {
            *z *= s;
        }
        PureState4 { amp }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut amp = self.amp;
        for (a, b) in amp.iter_mut().zip(other.amp.iter()) {
            *a += b;
        }
        PureState4 { amp }
    }

    pub fn inner(&self, other: &Self) -> C64 {
        self.amp
            .iter()
            .zip(other.amp.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// |<self|other>| / (|self| |other|).
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm() / (self.norm() * other.norm()).max(1e-300)
    }

    /// Coefficient matrix of the 12|34 split: A[i][j] = amp[4 i + j] where i
    /// runs over (q1 q2) and j over (q3 q4).
    pub fn coefficient_matrix(&self) -> Mat4 {
        let mut a = Mat4::zero();
        for i in 0..4 {
            for j in 0..4 {
                a.0[i][j] = self.amp[4 * i + j];
            }
        }
        a
    }

    pub fn from_coefficient_matrix(a: &Mat4) -> Self {
        let mut amp = [ZC; 16];
        for i in 0..4 {
            for j in 0..4 {
                amp[4 * i + j] = a.0[i][j];
            }
        }
        PureState4 { amp }
    }

    /// Relabel parties: new party `i` is old party `perm[i]` (0-based).
    pub fn permute(&self, perm: &[usize; 4]) -> Self {
        let mut amp = [ZC; 16];
        for idx in 0..16usize {
            let bits = [(idx >> 3) & 1, (idx >> 2) & 1, (idx >> 1) & 1, idx & 1];
            // destination index: bit i of the new label is bit perm[i] of idx
            let mut dst = 0usize;
            for (i, &p) in perm.iter().enumerate() {
                dst |= bits[p] << (3 - i);
            }
            amp[dst] = self.amp[idx];
        }
        PureState4 { amp }
    }
}

/// An ordered quadruple of invertible single-qubit operators acting as
/// g1 (x) g2 (x) g3 (x) g4.
#[derive(Clone, Copy, Debug)]
pub struct LocalOperator {
    pub ops: [Mat2; 4],
}

impl LocalOperator {
    pub fn identity() -> Self {
        LocalOperator {
            ops: [Mat2::identity(); 4],
        }
    }

    pub fn new(ops: [Mat2; 4]) -> Self {
        LocalOperator { ops }
    }

    /// Same single-qubit operator on every party.
    pub fn uniform(op: Mat2) -> Self {
        LocalOperator { ops: [op; 4] }
    }

    pub fn check_invertible(&self) -> Result<(), StateError> {
        for (k, g) in self.ops.iter().enumerate() {
            let d = g.det().norm();
            if d <= EPS_INV {
                return Err(StateError::SingularOperator { party: k + 1, det: d });
            }
        }
        Ok(())
    }

    pub fn inverse(&self) -> Result<Self, StateError> {
        self.check_invertible()?;
        let mut ops = [Mat2::identity(); 4];
        for (k, g) in self.ops.iter().enumerate() {
            ops[k] = g.inv().expect("checked invertible");
        }
        Ok(LocalOperator { ops })
    }

    pub fn adjoint(&self) -> Self {
        LocalOperator {
            ops: [
                self.ops[0].adjoint(),
                self.ops[1].adjoint(),
                self.ops[2].adjoint(),
                self.ops[3].adjoint(),
            ],
        }
    }

    pub fn compose(&self, other: &Self) -> Self {
        let mut ops = [Mat2::identity(); 4];
        for k in 0..4 {
            ops[k] = self.ops[k] * other.ops[k];
        }
        LocalOperator { ops }
    }

    /// Largest condition number among the four factors.
    pub fn max_cond(&self) -> f64 {
        self.ops.iter().map(|g| g.cond()).fold(0.0, f64::max)
    }

    /// Apply to a state without normalizing.
    pub fn apply_raw(&self, psi: &PureState4) -> PureState4 {
        let mut amp = psi.amp;
        for (party, g) in self.ops.iter().enumerate() {
            let stride = 1usize << (3 - party);
            let mut out = [ZC; 16];
            for idx in 0..16usize {
                let bit = (idx / stride) % 2;
                let base = idx - bit * stride;
                out[idx] = g.0[bit][0] * amp[base] + g.0[bit][1] * amp[base + stride];
            }
            amp = out;
        }
        PureState4 { amp }
    }

    /// Whether every factor is unitary (up to phase) at tolerance.
    pub fn is_unitary(&self, tol: f64) -> bool {
        self.ops.iter().all(|g| {
            let gg = g.adjoint() * *g;
            let t = gg.trace().re / 2.0;
            (gg - Mat2::identity().scale(cr(t))).norm_fro() < tol * t.max(1.0)
        })
    }
}

/// Apply a local operator and renormalize. The unnormalized action is
/// available through [`LocalOperator::apply_raw`].
pub fn apply_local(g: &LocalOperator, psi: &PureState4) -> Result<PureState4, StateError> {
    g.check_invertible()?;
    let raw = g.apply_raw(psi);
    raw.normalized()
}

/// Apply and also report the norm of the unnormalized image.
pub fn apply_local_with_norm(
    g: &LocalOperator,
    psi: &PureState4,
) -> Result<(PureState4, f64), StateError> {
    g.check_invertible()?;
    let raw = g.apply_raw(psi);
    let n = raw.norm();
    Ok((raw.normalized()?, n))
}

/// Trace-normalized Gram operator of an invertible 2x2 operator, with its
/// Bloch vector: G = g^dagger g / tr, G = 1/2 + sum_j bloch[j] sigma_j.
#[derive(Clone, Copy, Debug)]
pub struct GramOperator {
    pub g: Mat2,
    pub bloch: [f64; 3],
}

impl GramOperator {
    pub fn from_matrix(m: &Mat2) -> Self {
        let t = m.trace().re;
        let g = m.scale(cr(1.0 / t));
        let mut bloch = [0.0f64; 3];
        for (j, b) in bloch.iter_mut().enumerate() {
            *b = ((g * pauli(j + 1)).trace() / cr(2.0)).re;
        }
        GramOperator { g, bloch }
    }

    pub fn bloch_norm(&self) -> f64 {
        self.bloch.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Rebuild the matrix from the Bloch vector.
    pub fn from_bloch(bloch: [f64; 3]) -> Self {
        let mut g = Mat2::identity().scale(cr(0.5));
        for (j, &b) in bloch.iter().enumerate() {
            g = g + pauli(j + 1).scale(cr(b));
        }
        GramOperator { g, bloch }
    }
}

/// Gram operator of an invertible local factor.
pub fn gram(g: &Mat2) -> Result<GramOperator, StateError> {
    let d = g.det().norm();
    if d <= EPS_INV {
        return Err(StateError::SingularOperator { party: 0, det: d });
    }
    Ok(GramOperator::from_matrix(&(g.adjoint() * *g)))
}

/// Reduced density matrix of party `i` (1-based): trace over the others.
pub fn reduced_density(psi: &PureState4, party: usize) -> Mat2 {
    assert!((1..=4).contains(&party), "party index out of range");
    let shift = 4 - party; // bit position of the kept qubit
    let mut rho = Mat2::zero();
    for a in 0..16usize {
        for bit_b in 0..2usize {
            let abit = (a >> shift) & 1;
            let b = (a & !(1 << shift)) | (bit_b << shift);
            rho.0[abit][bit_b] += psi.amp[a] * psi.amp[b].conj();
        }
    }
    rho
}

/// The symmetric pair Z = B B^T and Zt built from the 12|34 coefficient
/// matrix in the magic basis (B = U^dagger A U, Bt = U^dagger A^T U).
#[derive(Clone, Copy, Debug)]
pub struct ZPair {
    pub z: Mat4,
    pub zt: Mat4,
}

pub fn z_pair(psi: &PureState4) -> ZPair {
    let u = magic_u();
    let a = psi.coefficient_matrix();
    let b = u.adjoint() * a * u;
    let bt = u.adjoint() * a.transpose() * u;
    ZPair {
        z: b * b.transpose(),
        zt: bt * bt.transpose(),
    }
}

/// The magic-basis coefficient matrix B itself (rank and fine structure are
/// used by the classifier).
pub fn b_matrix(psi: &PureState4) -> Mat4 {
    let u = magic_u();
    u.adjoint() * psi.coefficient_matrix() * u
}

/// Bell states as two-qubit amplitude 4-vectors (|00>, |01>, |10>, |11>).
pub fn bell(which: usize) -> [C64; 4] {
    let s = cr(1.0 / 2.0_f64.sqrt());
    match which {
        0 => [s, ZC, ZC, s],   // Phi+
        1 => [s, ZC, ZC, -s],  // Phi-
        2 => [ZC, s, s, ZC],   // Psi+
        3 => [ZC, s, -s, ZC],  // Psi-
        _ => panic!("bell index out of range"),
    }
}

/// Product of two two-qubit amplitude vectors into a four-qubit state
/// (first factor on parties 1,2).
pub fn product_12_34(front: &[C64; 4], back: &[C64; 4]) -> PureState4 {
    let mut amp = [ZC; 16];
    for i in 0..4 {
        for j in 0..4 {
            amp[4 * i + j] = front[i] * back[j];
        }
    }
    PureState4 { amp }
}

/// Product with the first factor on parties 1,3 and the second on 2,4.
pub fn product_13_24(f: &[C64; 4], b: &[C64; 4]) -> PureState4 {
    let mut amp = [ZC; 16];
    for q1 in 0..2usize {
        for q2 in 0..2usize {
            for q3 in 0..2usize {
                for q4 in 0..2usize {
                    amp[(q1 << 3) | (q2 << 2) | (q3 << 1) | q4] =
                        f[(q1 << 1) | q3] * b[(q2 << 1) | q4];
                }
            }
        }
    }
    PureState4 { amp }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::magic::{random_sl2, random_su2};
    use crate::mat::{c, ONE};
    use rand::SeedableRng;

    fn ghz() -> PureState4 {
        PureState4::basis(0, 0, 0, 0)
            .add(&PureState4::basis(1, 1, 1, 1))
            .normalized()
            .unwrap()
    }

    #[test]
    fn identity_keeps_state() {
        let psi = ghz();
        let out = apply_local(&LocalOperator::identity(), &psi).unwrap();
        assert!(psi.fidelity(&out) > 1.0 - 1e-14);
    }

    #[test]
    fn pauli_x_uniform_fixes_ghz() {
        let psi = ghz();
        let out = apply_local(&LocalOperator::uniform(pauli(1)), &psi).unwrap();
        assert!(psi.fidelity(&out) > 1.0 - 1e-14);
    }

    #[test]
    fn local_round_trip() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let g = LocalOperator::new([
                random_sl2(&mut rng),
                random_sl2(&mut rng),
                random_sl2(&mut rng),
                random_sl2(&mut rng),
            ]);
            let mut amp = [ZC; 16];
            for a in amp.iter_mut() {
                *a = C64::new(rand::Rng::gen::<f64>(&mut rng) - 0.5, rand::Rng::gen::<f64>(&mut rng) - 0.5);
            }
            let psi = PureState4 { amp }.normalized().unwrap();
            let fwd = apply_local(&g, &psi).unwrap();
            let back = apply_local(&g.inverse().unwrap(), &fwd).unwrap();
            assert!(psi.fidelity(&back) >= 1.0 - 1e-10);
        }
    }

    #[test]
    fn compose_matches_sequential() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let g = LocalOperator::new([
            random_sl2(&mut rng),
            random_sl2(&mut rng),
            random_sl2(&mut rng),
            random_sl2(&mut rng),
        ]);
        let h = LocalOperator::new([
            random_sl2(&mut rng),
            random_sl2(&mut rng),
            random_sl2(&mut rng),
            random_sl2(&mut rng),
        ]);
        let psi = ghz();
        let a = apply_local(&g, &apply_local(&h, &psi).unwrap()).unwrap();
        let b = apply_local(&g.compose(&h), &psi).unwrap();
        assert!(a.fidelity(&b) >= 1.0 - 1e-10);
    }

    #[test]
    fn gram_of_identity_is_maximally_mixed() {
        let g = gram(&Mat2::identity()).unwrap();
        assert!(g.bloch_norm() < 1e-15);
        assert!((g.g - Mat2::identity().scale(cr(0.5))).norm_fro() < 1e-15);
    }

    #[test]
    fn gram_of_diagonal_stretch() {
        let x = 0.3_f64;
        let g = Mat2::diag(cr((0.5 + x).sqrt()), cr((0.5 - x).sqrt()));
        let go = gram(&g).unwrap();
        assert!((go.bloch[0]).abs() < 1e-14);
        assert!((go.bloch[1]).abs() < 1e-14);
        assert!((go.bloch[2] - x).abs() < 1e-14);
    }

    #[test]
    fn gram_left_unitary_invariance() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let g = random_sl2(&mut rng);
            let u = random_su2(&mut rng);
            let a = gram(&g).unwrap();
            let b = gram(&(u * g)).unwrap();
            assert!((a.g - b.g).norm_fro() < 1e-12);
        }
    }

    #[test]
    fn gram_bloch_in_ball() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        for _ in 0..100 {
            let g = random_sl2(&mut rng);
            let go = gram(&g).unwrap();
            let n = go.bloch_norm();
            assert!(n < 0.5, "bloch norm {n} out of range");
            // positivity
            let det = go.g.det().re;
            assert!(det > 0.0);
        }
    }

    #[test]
    fn reduced_density_ghz_is_mixed() {
        let psi = ghz();
        for party in 1..=4 {
            let rho = reduced_density(&psi, party);
            assert!((rho - Mat2::identity().scale(cr(0.5))).norm_fro() < 1e-14);
        }
    }

    #[test]
    fn reduced_density_product_state() {
        let psi = PureState4::basis(0, 0, 0, 0);
        for party in 1..=4 {
            let rho = reduced_density(&psi, party);
            assert!((rho.0[0][0] - ONE).norm() < 1e-15);
        }
    }

    #[test]
    fn cluster_state_reduced_mixed() {
        // CZ-chain cluster state on |+>^4
        let mut amp = [ZC; 16];
        for (idx, a) in amp.iter_mut().enumerate() {
            let q = [(idx >> 3) & 1, (idx >> 2) & 1, (idx >> 1) & 1, idx & 1];
            let sign = (q[0] * q[1] + q[1] * q[2] + q[2] * q[3]) % 2;
            *a = if sign == 0 { cr(0.25) } else { cr(-0.25) };
        }
        let psi = PureState4 { amp };
        for party in 1..=4 {
            let rho = reduced_density(&psi, party);
            assert!((rho - Mat2::identity().scale(cr(0.5))).norm_fro() < 1e-12);
        }
    }

    #[test]
    fn z_transforms_orthogonally_on_side_a() {
        use crate::linalg::magic::{magic_transform, orthogonality_defect};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(10);
        for _ in 0..20 {
            let mut amp = [ZC; 16];
            for a in amp.iter_mut() {
                *a = C64::new(rand::Rng::gen::<f64>(&mut rng) - 0.5, rand::Rng::gen::<f64>(&mut rng) - 0.5);
            }
            let psi = PureState4 { amp }.normalized().unwrap();
            let g1 = random_sl2(&mut rng);
            let g2 = random_sl2(&mut rng);
            let g = LocalOperator::new([g1, g2, Mat2::identity(), Mat2::identity()]);
            let phi = g.apply_raw(&psi); // no normalization: Z transforms exactly
            let o = magic_transform(&Mat4::kron(&g1, &g2));
            assert!(orthogonality_defect(&o) < 1e-10);
            let z0 = z_pair(&psi).z;
            let z1 = z_pair(&phi).z;
            let want = o * z0 * o.transpose();
            assert!((z1 - want).norm_fro() < 1e-9);
        }
    }

    #[test]
    fn permute_is_consistent() {
        // |0101> with parties swapped 1<->2 becomes |1001>
        let psi = PureState4::basis(0, 1, 0, 1);
        let p = psi.permute(&[1, 0, 2, 3]);
        let want = PureState4::basis(1, 0, 0, 1);
        assert!(p.fidelity(&want) > 1.0 - 1e-14);
    }

    #[test]
    fn c_is_unused() {
        let _ = c(0.0, 0.0);
    }
}
