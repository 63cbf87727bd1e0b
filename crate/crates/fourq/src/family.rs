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

//! The entanglement families of fully entangled four-qubit states and their
//! seed-state constructors.
//!
//! Each family is represented by a seed whose Z operators have a fixed block
//! normal form. Several families use a locally rotated ("dressed") working
//! seed with a simpler symmetry group; constructors expose both the working
//! seed and the undressed representative together with the dressing.

use crate::linalg::eigen::{JordanBlock, JordanStructure};
use crate::linalg::magic::magic_u;
use crate::linalg::sjf::{r_matrix, symmetric_jordan_form_with_structure, symmetric_sqrt};
use crate::mat::{c, cr, hadamard, pauli, pauli_rotation, Mat2, Mat4, I, ONE, ZC};
use crate::state::{bell, product_12_34, product_13_24, LocalOperator, PureState4, StateError};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// SLOCC family tags. `Biseparable` is a catch-all for states without
/// genuine four-party entanglement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    GabcdGeneric,
    GabcdTwo2Cycles,
    Gabcd4Cycle,
    Lstate3Cycle,
    GabcdTripleDegenerate,
    GabcdAdcc,
    GabcdAacc,
    GabcdAaia,
    GabcdAd00,
    Ghz,
    Labc2Generic,
    Labc2Aba2,
    Labc2Aac2,
    Labc2Aaa2,
    Labc200c2,
    Lab02Ab,
    Lab02Aa,
    La2b2Generic,
    La2b2Minus,
    La2b2Equal,
    La2b200b2,
    Lba3Generic,
    Lba3Aa3,
    Lba30b02,
    W,
    La4Nonzero,
    La40202,
    La203plus1,
    L05plus3,
    L07plus1,
    Biseparable,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::GabcdGeneric => "Gabcd_generic",
            Family::GabcdTwo2Cycles => "Gabcd_two2cycles",
            Family::Gabcd4Cycle => "Gabcd_4cycle",
            Family::Lstate3Cycle => "Lstate_3cycle",
            Family::GabcdTripleDegenerate => "Gabcd_triple_degenerate",
            Family::GabcdAdcc => "Gabcd_adcc",
            Family::GabcdAacc => "Gabcd_aacc",
            Family::GabcdAaia => "Gabcd_aaia",
            Family::GabcdAd00 => "Gabcd_ad00",
            Family::Ghz => "GHZ",
            Family::Labc2Generic => "Labc2_generic",
            Family::Labc2Aba2 => "Labc2_aba2",
            Family::Labc2Aac2 => "Labc2_aac2",
            Family::Labc2Aaa2 => "Labc2_aaa2",
            Family::Labc200c2 => "Labc2_00c2",
            Family::Lab02Ab => "Lab02_ab",
            Family::Lab02Aa => "Lab02_aa",
            Family::La2b2Generic => "La2b2_generic",
            Family::La2b2Minus => "La2b2_minus",
            Family::La2b2Equal => "La2b2_equal",
            Family::La2b200b2 => "La2b2_00b2",
            Family::Lba3Generic => "Lba3_generic",
            Family::Lba3Aa3 => "Lba3_aa3",
            Family::Lba30b02 => "Lba3_0b02",
            Family::W => "W",
            Family::La4Nonzero => "La4_nonzero",
            Family::La40202 => "La4_0202",
            Family::La203plus1 => "La2_0_3plus1",
            Family::L05plus3 => "L05plus3",
            Family::L07plus1 => "L07plus1",
            Family::Biseparable => "BISEPARABLE",
        }
    }

    pub fn from_name(s: &str) -> Option<Family> {
        Family::all()
            .iter()
            .chain([Family::Biseparable].iter())
            .copied()
            .find(|f| f.name().eq_ignore_ascii_case(s))
    }

    /// Every fully entangled family (excludes `Biseparable`).
    pub fn all() -> &'static [Family] {
        use Family::*;
        &[
            GabcdGeneric,
            GabcdTwo2Cycles,
            Gabcd4Cycle,
            Lstate3Cycle,
            GabcdTripleDegenerate,
            GabcdAdcc,
            GabcdAacc,
            GabcdAaia,
            GabcdAd00,
            Ghz,
            Labc2Generic,
            Labc2Aba2,
            Labc2Aac2,
            Labc2Aaa2,
            Labc200c2,
            Lab02Ab,
            Lab02Aa,
            La2b2Generic,
            La2b2Minus,
            La2b2Equal,
            La2b200b2,
            Lba3Generic,
            Lba3Aa3,
            Lba30b02,
            W,
            La4Nonzero,
            La40202,
            La203plus1,
            L05plus3,
            L07plus1,
        ]
    }

    pub fn param_count(&self) -> usize {
        match self {
            Family::GabcdGeneric => 4,
            Family::GabcdAdcc => 3,
            Family::Labc2Generic => 3,
            Family::GabcdTwo2Cycles
            | Family::GabcdTripleDegenerate
            | Family::GabcdAacc
            | Family::GabcdAd00
            | Family::Labc2Aba2
            | Family::Labc2Aac2
            | Family::Lab02Ab
            | Family::La2b2Generic
            | Family::Lba3Generic => 2,
            Family::Gabcd4Cycle
            | Family::Lstate3Cycle
            | Family::GabcdAaia
            | Family::Labc2Aaa2
            | Family::Labc200c2
            | Family::Lab02Aa
            | Family::La2b2Minus
            | Family::La2b2Equal
            | Family::La2b200b2
            | Family::Lba3Aa3
            | Family::Lba30b02
            | Family::La4Nonzero
            | Family::La203plus1 => 1,
            Family::Ghz
            | Family::W
            | Family::La40202
            | Family::L05plus3
            | Family::L07plus1
            | Family::Biseparable => 0,
        }
    }

    /// Reasonable default parameters satisfying the family constraints;
    /// used for fixtures and the `seed` / `random` commands.
    pub fn default_params(&self) -> Vec<C64> {
        match self {
            Family::GabcdGeneric => vec![cr(1.0), c(0.42, 0.17), c(0.58, -0.23), c(0.80, 0.31)],
            Family::GabcdTwo2Cycles => vec![cr(0.9), c(0.45, 0.2)],
            Family::Gabcd4Cycle => vec![cr(1.0)],
            Family::Lstate3Cycle => vec![cr(1.0)],
            Family::GabcdTripleDegenerate => vec![cr(0.8), cr(1.1)],
            Family::GabcdAdcc => vec![cr(1.0), c(0.55, 0.2), c(0.7, -0.1)],
            Family::GabcdAacc => vec![cr(0.95), c(0.55, 0.25)],
            Family::GabcdAaia => vec![cr(1.0)],
            Family::GabcdAd00 => vec![cr(1.0), c(0.6, 0.2)],
            Family::Ghz => vec![],
            Family::Labc2Generic => vec![cr(0.9), c(0.5, 0.2), c(0.65, -0.15)],
            Family::Labc2Aba2 => vec![cr(0.8), c(0.45, 0.2)],
            Family::Labc2Aac2 => vec![cr(0.85), c(0.5, 0.2)],
            Family::Labc2Aaa2 => vec![cr(0.9)],
            Family::Labc200c2 => vec![cr(0.8)],
            Family::Lab02Ab => vec![cr(0.9), c(0.5, 0.2)],
            Family::Lab02Aa => vec![cr(0.75)],
            Family::La2b2Generic => vec![cr(0.85), c(0.5, 0.2)],
            Family::La2b2Minus => vec![cr(0.8)],
            Family::La2b2Equal => vec![cr(0.75)],
            Family::La2b200b2 => vec![cr(0.85)],
            Family::Lba3Generic => vec![cr(0.8), c(0.45, 0.15)],
            Family::Lba3Aa3 => vec![cr(0.7)],
            Family::Lba30b02 => vec![cr(0.9)],
            Family::W => vec![],
            Family::La4Nonzero => vec![cr(0.8)],
            Family::La40202 => vec![],
            Family::La203plus1 => vec![cr(0.85)],
            Family::L05plus3 | Family::L07plus1 | Family::Biseparable => vec![],
        }
    }
}

/// A constructed seed: the working (possibly dressed) representative used by
/// the symmetry and transformation tables, the undressed representative whose
/// Z pair is in block normal form, and the local dressing between them.
#[derive(Clone, Debug)]
pub struct Seed {
    pub family: Family,
    pub params: Vec<C64>,
    /// Working seed, unnormalized amplitudes exactly as constructed.
    pub raw: PureState4,
    /// Working seed, normalized.
    pub state: PureState4,
    /// Undressed representative (Z pair in block normal form), unnormalized.
    pub undressed_raw: PureState4,
    /// raw = dressing applied to undressed_raw.
    pub dressing: LocalOperator,
}

fn err(family: Family, reason: &str) -> StateError {
    StateError::InvalidParameters {
        family: family.name().into(),
        reason: reason.into(),
    }
}

fn dressed(
    family: Family,
    params: &[C64],
    undressed: PureState4,
    dressing: LocalOperator,
) -> Result<Seed, StateError> {
    let raw = dressing.apply_raw(&undressed);
    let state = raw.normalized()?;
    Ok(Seed {
        family,
        params: params.to_vec(),
        raw,
        state,
        undressed_raw: undressed,
        dressing,
    })
}

fn plain(family: Family, params: &[C64], state: PureState4) -> Result<Seed, StateError> {
    dressed(family, params, state, LocalOperator::identity())
}

/// Seed in the Bell-diagonal form
/// (a+d)/2 (|0000>+|1111>) + (a-d)/2 (|0011>+|1100>)
/// + (b+c)/2 (|0101>+|1010>) + (b-c)/2 (|0110>+|1001>),
/// i.e. a Phi+Phi+ + d Phi-Phi- + b Psi+Psi+ + c Psi-Psi-.
pub fn bell_diagonal_seed(a: C64, b: C64, c_: C64, d: C64) -> PureState4 {
    let mut s = product_12_34(&bell(0), &bell(0)).scaled(a);
    s = s.add(&product_12_34(&bell(1), &bell(1)).scaled(d));
    s = s.add(&product_12_34(&bell(2), &bell(2)).scaled(b));
    s = s.add(&product_12_34(&bell(3), &bell(3)).scaled(c_));
    s
}

fn basis_sum(terms: &[(usize, C64)]) -> PureState4 {
    let mut amp = [ZC; 16];
    for &(idx, v) in terms {
        amp[idx] += v;
    }
    PureState4 { amp }
}

const fn bits(q1: usize, q2: usize, q3: usize, q4: usize) -> usize {
    (q1 << 3) | (q2 << 2) | (q3 << 1) | q4
}

fn ne2(x: C64, y: C64, tol: f64) -> bool {
    (x - y).norm() > tol
}

const PTOL: f64 = 1e-9;

/// Explicit seed for the one-four-block families with nonzero eigenvalue:
/// any state whose Z pair equals the size-4 block at a^2 on both sides.
fn la4_seed(a: C64) -> Result<PureState4, StateError> {
    let st = JordanStructure {
        blocks: vec![JordanBlock {
            size: 4,
            eigenvalue: a * a,
        }],
        margin: f64::INFINITY,
    };
    let r = r_matrix(&st);
    let cmat = symmetric_sqrt(&r).map_err(|e| err(Family::La4Nonzero, &format!("{e}")))?;
    // Zt of a state with B = C Q is Y Q^T C^2 Q Y (Y = diag(-1,1,-1,1));
    // choose orthogonal Q with Q^T R Q = Y R Y.
    let y = Mat4::diag([-ONE, ONE, -ONE, ONE]);
    let target = y * r * y;
    let dec = symmetric_jordan_form_with_structure(&target, &st, false)
        .map_err(|e| err(Family::La4Nonzero, &format!("{e}")))?;
    let q = dec.o.transpose();
    let b = cmat * q;
    let u = magic_u();
    let amat = u * b * u.adjoint();
    Ok(PureState4::from_coefficient_matrix(&amat))
}

/// Construct the seed state of a family.
pub fn seed(family: Family, params: &[C64]) -> Result<Seed, StateError> {
    if params.len() != family.param_count() {
        return Err(err(
            family,
            &format!(
                "expected {} parameters, got {}",
                family.param_count(),
                params.len()
            ),
        ));
    }
    let id = Mat2::identity();
    let sx = pauli(1);
    let sy = pauli(2);
    let sz = pauli(3);
    match family {
        Family::GabcdGeneric => {
            let (a, b, c_, d) = (params[0], params[1], params[2], params[3]);
            let sq = [a * a, b * b, c_ * c_, d * d];
            for i in 0..4 {
                for j in (i + 1)..4 {
                    if !ne2(sq[i], sq[j], PTOL) {
                        return Err(err(family, "squared parameters must be pairwise distinct"));
                    }
                }
            }
            // no q != 1 with q {a^2..} = {a^2..}
            for qi in [-ONE, I, -I] {
                let mapped: Vec<C64> = sq.iter().map(|&s| qi * s).collect();
                if multiset_eq(&mapped, &sq, PTOL) {
                    return Err(err(family, "parameters lie on a nontrivial eigenvalue cycle"));
                }
            }
            plain(family, params, bell_diagonal_seed(a, b, c_, d))
        }
        Family::GabcdTwo2Cycles => {
            let (a, c_) = (params[0], params[1]);
            if a.norm() < PTOL || c_.norm() < PTOL {
                return Err(err(family, "a and c must be nonzero"));
            }
            if !ne2(a * a, c_ * c_, PTOL) || !ne2(a * a, -c_ * c_, PTOL) {
                return Err(err(family, "a^2 must differ from +-c^2"));
            }
            plain(family, params, bell_diagonal_seed(a, -I * c_, c_, I * a))
        }
        Family::Gabcd4Cycle => {
            let a = params[0];
            if a.norm() < PTOL {
                return Err(err(family, "a must be nonzero"));
            }
            let d = C64::from_polar(1.0, std::f64::consts::FRAC_PI_4) * a;
            let b = C64::from_polar(1.0, 3.0 * std::f64::consts::FRAC_PI_4) * a;
            let c_ = I * a;
            plain(family, params, bell_diagonal_seed(a, b, c_, d))
        }
        Family::Lstate3Cycle => {
            let d = params[0];
            if d.norm() < PTOL {
                return Err(err(family, "d must be nonzero"));
            }
            let a = C64::from_polar(1.0, std::f64::consts::FRAC_PI_3) * d;
            let b = C64::from_polar(1.0, 2.0 * std::f64::consts::FRAC_PI_3) * d;
            plain(family, params, bell_diagonal_seed(a, b, ZC, d))
        }
        Family::GabcdTripleDegenerate => {
            let (alpha, beta) = (params[0], params[1]);
            // eigenvalues: triple (beta/2)^2, single (alpha + beta/2)^2
            let ae = beta / cr(2.0);
            let ce = alpha + beta / cr(2.0);
            if ae.norm() < PTOL {
                return Err(err(family, "beta must be nonzero (triple eigenvalue nonzero)"));
            }
            if !ne2(ae * ae, ce * ce, PTOL) {
                return Err(err(family, "triple and single eigenvalues must differ"));
            }
            let s = product_12_34(&bell(3), &bell(3))
                .scaled(alpha)
                .add(&product_13_24(&bell(3), &bell(3)).scaled(beta));
            plain(family, params, s)
        }
        Family::GabcdAdcc => {
            let (a, d, c_) = (params[0], params[1], params[2]);
            if c_.norm() < PTOL {
                return Err(err(family, "c must be nonzero"));
            }
            if !ne2(a * a, d * d, PTOL) || !ne2(a * a, c_ * c_, PTOL) || !ne2(d * d, c_ * c_, PTOL)
            {
                return Err(err(family, "a^2, d^2, c^2 must be pairwise distinct"));
            }
            let undressed = bell_diagonal_seed(a, c_, c_, d);
            dressed(
                family,
                params,
                undressed,
                LocalOperator::new([id, sx, sx, id]),
            )
        }
        Family::GabcdAacc => {
            let (a, c_) = (params[0], params[1]);
            if a.norm() < PTOL || c_.norm() < PTOL {
                return Err(err(family, "a and c must be nonzero"));
            }
            if !ne2(a * a, c_ * c_, PTOL) || !ne2(a * a, -c_ * c_, PTOL) {
                return Err(err(family, "a^2 must differ from +-c^2"));
            }
            let undressed = basis_sum(&[
                (bits(0, 0, 0, 0), a),
                (bits(1, 1, 1, 1), a),
                (bits(0, 1, 0, 1), c_),
                (bits(1, 0, 1, 0), c_),
            ]);
            dressed(
                family,
                params,
                undressed,
                LocalOperator::new([id, id, sx, sx]),
            )
        }
        Family::GabcdAaia => {
            let a = params[0];
            if a.norm() < PTOL {
                return Err(err(family, "a must be nonzero"));
            }
            let s = basis_sum(&[
                (bits(0, 0, 0, 0), a),
                (bits(1, 1, 1, 1), a),
                (bits(0, 1, 0, 1), I * a),
                (bits(1, 0, 1, 0), I * a),
            ]);
            plain(family, params, s)
        }
        Family::GabcdAd00 => {
            let (a, d) = (params[0], params[1]);
            if a.norm() < PTOL || d.norm() < PTOL {
                return Err(err(family, "a and d must be nonzero"));
            }
            if !ne2(a * a, d * d, PTOL) {
                return Err(err(family, "a^2 and d^2 must differ"));
            }
            plain(family, params, bell_diagonal_seed(a, ZC, ZC, d))
        }
        Family::Ghz => {
            let s = basis_sum(&[(bits(0, 0, 0, 0), ONE), (bits(1, 1, 1, 1), ONE)]);
            plain(family, params, s)
        }
        Family::Labc2Generic => {
            let (a, b, c_) = (params[0], params[1], params[2]);
            if c_.norm() < PTOL {
                return Err(err(family, "c must be nonzero"));
            }
            if !ne2(a * a, b * b, PTOL) || !ne2(a * a, c_ * c_, PTOL) || !ne2(b * b, c_ * c_, PTOL)
            {
                return Err(err(family, "a^2, b^2, c^2 must be pairwise distinct"));
            }
            plain(family, params, labc2_seed(a, b, c_))
        }
        Family::Labc2Aba2 => {
            let (a, b) = (params[0], params[1]);
            if a.norm() < PTOL {
                return Err(err(family, "a must be nonzero"));
            }
            if !ne2(a * a, b * b, PTOL) {
                return Err(err(family, "a^2 and b^2 must differ"));
            }
            let undressed = labc2_seed(a, b, a);
            dressed(
                family,
                params,
                undressed,
                LocalOperator::new([sx, id, sy, sz]),
            )
        }
        Family::Labc2Aac2 => {
            let (a, c_) = (params[0], params[1]);
            if a.norm() < PTOL || c_.norm() < PTOL {
                return Err(err(family, "a and c must be nonzero"));
            }
            if !ne2(a * a, c_ * c_, PTOL) {
                return Err(err(family, "a^2 and c^2 must differ"));
            }
            let s = basis_sum(&[
                (bits(0, 0, 1, 1), a),
                (bits(1, 1, 0, 0), a),
                (bits(0, 1, 1, 0), c_),
                (bits(1, 0, 0, 1), c_),
                (bits(1, 0, 1, 0), -I / (cr(2.0) * c_)),
            ]);
            plain(family, params, s)
        }
        Family::Labc2Aaa2 => {
            let a = params[0];
            if a.norm() < PTOL {
                return Err(err(family, "a must be nonzero"));
            }
            let s = basis_sum(&[
                (bits(0, 0, 1, 1), a),
                (bits(1, 1, 0, 0), a),
                (bits(0, 1, 1, 0), a),
                (bits(1, 0, 0, 1), a),
                (bits(1, 0, 1, 0), -I / (cr(2.0) * a)),
            ]);
            plain(family, params, s)
        }
        Family::Labc200c2 => {
            let c_ = params[0];
            if c_.norm() < PTOL {
                return Err(err(family, "c must be nonzero"));
            }
            let s = basis_sum(&[
                (bits(0, 1, 1, 0), c_),
                (bits(1, 0, 0, 1), c_),
                (bits(1, 0, 1, 0), -I / (cr(2.0) * c_)),
            ]);
            plain(family, params, s)
        }
        Family::Lab02Ab => {
            let (a, b) = (params[0], params[1]);
            if a.norm() < PTOL || b.norm() < PTOL {
                return Err(err(family, "a and b must be nonzero"));
            }
            if !ne2(a * a, b * b, PTOL) {
                return Err(err(family, "a^2 and b^2 must differ"));
            }
            let undressed = lab02_seed(a, b);
            dressed(
                family,
                params,
                undressed,
                LocalOperator::new([id, sx, id, sx]),
            )
        }
        Family::Lab02Aa => {
            let a = params[0];
            if a.norm() < PTOL {
                return Err(err(family, "a must be nonzero"));
            }
            let undressed = lab02_seed(a, a);
            dressed(
                family,
                params,
                undressed,
                LocalOperator::new([id, id, sx, sx]),
            )
        }
        Family::La2b2Generic => {
            let (a, b) = (params[0], params[1]);
            if a.norm() < PTOL || b.norm() < PTOL {
                return Err(err(family, "a and b must be nonzero"));
            }
            if !ne2(a * a, b * b, PTOL) || !ne2(a * a, -b * b, PTOL) {
                return Err(err(family, "a^2 must differ from +-b^2"));
            }
            plain(family, params, la2b2_seed(a, b))
        }
        Family::La2b2Minus => {
            let b = params[0];
            if b.norm() < PTOL {
                return Err(err(family, "b must be nonzero"));
            }
            let undressed = la2b2_seed(I * b, b);
            let z8 = Mat2::diag(
                C64::from_polar(1.0, std::f64::consts::FRAC_PI_4),
                C64::from_polar(1.0, -std::f64::consts::FRAC_PI_4),
            );
            dressed(
                family,
                params,
                undressed,
                LocalOperator::new([id, id, id, z8]),
            )
        }
        Family::La2b2Equal => {
            let a = params[0];
            if a.norm() < PTOL {
                return Err(err(family, "a must be nonzero"));
            }
            let undressed = basis_sum(&[
                (bits(0, 0, 1, 1), a),
                (bits(1, 1, 0, 0), a),
                (bits(0, 1, 1, 0), a),
                (bits(1, 0, 0, 1), a),
                (bits(1, 1, 1, 1), I / (cr(2.0) * a)),
                (bits(1, 0, 1, 0), -I / (cr(2.0) * a)),
            ]);
            let xr = pauli_rotation(1, -std::f64::consts::FRAC_PI_4);
            dressed(
                family,
                params,
                undressed,
                LocalOperator::new([id, xr, id, xr]),
            )
        }
        Family::La2b200b2 => {
            let b = params[0];
            if b.norm() < PTOL {
                return Err(err(family, "b must be nonzero"));
            }
            let undressed = basis_sum(&[
                (bits(0, 1, 1, 0), b),
                (bits(1, 0, 0, 1), b),
                (bits(1, 1, 1, 1), ONE),
                (bits(1, 0, 1, 0), -I / (cr(2.0) * b)),
            ]);
            dressed(
                family,
                params,
                undressed,
                LocalOperator::new([id, id, sx, sx]),
            )
        }
        Family::Lba3Generic => {
            let (a, b) = (params[0], params[1]);
            if a.norm() < PTOL {
                return Err(err(family, "a must be nonzero"));
            }
            if !ne2(a * a, b * b, PTOL) {
                return Err(err(family, "a^2 and b^2 must differ"));
            }
            plain(family, params, lba3_seed(a, b))
        }
        Family::Lba3Aa3 => {
            let a = params[0];
            if a.norm() < PTOL {
                return Err(err(family, "a must be nonzero"));
            }
            let undressed = lba3_seed(a, a);
            let xm = pauli_rotation(1, -std::f64::consts::FRAC_PI_4);
            let xp = pauli_rotation(1, std::f64::consts::FRAC_PI_4);
            dressed(
                family,
                params,
                undressed,
                LocalOperator::new([xm, xp, xm, xp]),
            )
        }
        Family::Lba30b02 => {
            let b = params[0];
            if b.norm() < PTOL {
                return Err(err(family, "b must be nonzero"));
            }
            // -b Phi- Phi- - e^{i pi/4} (|10> Phi+ - Phi+ |10>)
            let e4 = C64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
            let mut s = product_12_34(&bell(1), &bell(1)).scaled(-b);
            let ten = [ZC, ZC, ONE, ZC]; // |10>
            s = s.add(&product_12_34(&ten, &bell(0)).scaled(-e4));
            s = s.add(&product_12_34(&bell(0), &ten).scaled(e4));
            let undressed = s;
            dressed(
                family,
                params,
                undressed,
                LocalOperator::new([sx, id, sx, id]),
            )
        }
        Family::W => {
            let s = basis_sum(&[
                (bits(0, 0, 0, 1), ONE),
                (bits(0, 0, 1, 0), ONE),
                (bits(0, 1, 0, 0), ONE),
                (bits(1, 0, 0, 0), ONE),
            ]);
            plain(family, params, s)
        }
        Family::La4Nonzero => {
            let a = params[0];
            if a.norm() < PTOL {
                return Err(err(family, "a must be nonzero"));
            }
            plain(family, params, la4_seed(a)?)
        }
        Family::La40202 => {
            let undressed = basis_sum(&[
                (bits(0, 0, 1, 0), I),
                (bits(0, 0, 1, 1), -ONE),
                (bits(0, 1, 1, 0), -ONE),
                (bits(0, 1, 1, 1), -I),
                (bits(1, 0, 0, 0), I),
                (bits(1, 0, 0, 1), -ONE),
                (bits(1, 0, 1, 0), I),
                (bits(1, 0, 1, 1), ONE),
                (bits(1, 1, 0, 0), -ONE),
                (bits(1, 1, 0, 1), -I),
                (bits(1, 1, 1, 0), ONE),
                (bits(1, 1, 1, 1), -I),
            ]);
            let xr = pauli_rotation(1, -std::f64::consts::FRAC_PI_4);
            dressed(
                family,
                params,
                undressed,
                LocalOperator::new([id, xr, id, xr]),
            )
        }
        Family::La203plus1 => {
            let a = params[0];
            if a.norm() < PTOL {
                return Err(err(family, "a must be nonzero"));
            }
            let e4 = C64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
            let r2 = cr(1.0 / 2.0_f64.sqrt());
            let s = basis_sum(&[
                (bits(1, 0, 0, 1), a),
                (bits(0, 1, 1, 0), a),
                (bits(1, 0, 1, 0), -I / (cr(2.0) * a)),
                (bits(1, 1, 0, 0), e4 * r2),
                (bits(1, 1, 1, 1), e4 * r2),
            ]);
            plain(family, params, s)
        }
        Family::L05plus3 => {
            let e4m = C64::from_polar(1.0, -std::f64::consts::FRAC_PI_4);
            let e4p = C64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
            let half = cr(0.5);
            let r2 = cr(1.0 / 2.0_f64.sqrt());
            let undressed = basis_sum(&[
                // 1/sqrt2 |01> (Phi- - i Psi+)
                (bits(0, 1, 0, 0), half),
                (bits(0, 1, 1, 1), -half),
                (bits(0, 1, 0, 1), -I * half),
                (bits(0, 1, 1, 0), -I * half),
                // e^{-i pi/4} |10> Psi-
                (bits(1, 0, 0, 1), e4m * r2),
                (bits(1, 0, 1, 0), -e4m * r2),
                // e^{i pi/4} |11> Psi+
                (bits(1, 1, 0, 1), e4p * r2),
                (bits(1, 1, 1, 0), e4p * r2),
                // - sqrt2 e^{-i pi/4} |1100>
                (bits(1, 1, 0, 0), -e4m * cr(2.0_f64.sqrt())),
            ])
            // global phase fixed so the Z pair lands exactly on the block
            // normal form
            .scaled(I);
            let zr = Mat2::diag(e4p, e4m); // Z(pi/4)
            let hz = hadamard() * zr;
            dressed(
                family,
                &[],
                undressed,
                LocalOperator::new([id, id, hz, hz]),
            )
        }
        Family::L07plus1 => {
            let f1 = c(1.0, -1.0).scale_re(1.0 / (2.0 * 2.0_f64.sqrt()));
            let f2 = c(1.0, 1.0).scale_re(1.0 / (2.0 * 2.0_f64.sqrt()));
            let f3 = c(1.0, 1.0).scale_re(0.5);
            let ihalf = I * cr(0.5);
            // |Phi-> on the back pair
            let mut terms: Vec<(usize, C64)> = Vec::new();
            let phim = [(0usize, 0usize), (1, 1)];
            let phis = [ONE, -ONE];
            for (k, &(q3, q4)) in phim.iter().enumerate() {
                let w = phis[k] * cr(1.0 / 2.0_f64.sqrt());
                terms.push((bits(0, 0, q3, q4), f1 * w));
                terms.push((bits(0, 1, q3, q4), -f1 * w));
                terms.push((bits(1, 0, q3, q4), -f2 * w));
                terms.push((bits(1, 1, q3, q4), f2 * w));
            }
            terms.push((bits(0, 0, 0, 1), ihalf));
            terms.push((bits(0, 0, 1, 0), ihalf * I));
            terms.push((bits(0, 1, 0, 1), -ihalf * I));
            terms.push((bits(0, 1, 1, 0), -ihalf));
            terms.push((bits(1, 0, 0, 1), -f3));
            terms.push((bits(1, 1, 1, 0), f3));
            // global phase fixed to match the Z pair displays
            let undressed = basis_sum(&terms).scaled(I);
            let h = hadamard();
            let e4m = C64::from_polar(1.0, -std::f64::consts::FRAC_PI_4);
            let e4p = C64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
            let zm = Mat2::diag(e4m, e4p); // Z(-pi/4)
            let d = LocalOperator::new([h * pauli(3), h * pauli(3), h * zm, h * zm]);
            dressed(family, &[], undressed, d)
        }
        Family::Biseparable => Err(err(family, "biseparable states have no seed")),
    }
}

trait ScaleRe {
    fn scale_re(self, s: f64) -> C64;
}
impl ScaleRe for C64 {
    fn scale_re(self, s: f64) -> C64 {
        self * cr(s)
    }
}

fn labc2_seed(a: C64, b: C64, c_: C64) -> PureState4 {
    let mut s = product_12_34(&bell(0), &bell(0)).scaled(a);
    s = s.add(&product_12_34(&bell(1), &bell(1)).scaled(-b));
    s.add(&basis_sum(&[
        (bits(0, 1, 1, 0), c_),
        (bits(1, 0, 0, 1), c_),
        (bits(1, 0, 1, 0), -I / (cr(2.0) * c_)),
    ]))
}

fn lab02_seed(a: C64, b: C64) -> PureState4 {
    let mut s = product_12_34(&bell(0), &bell(0)).scaled(a);
    s = s.add(&product_12_34(&bell(1), &bell(1)).scaled(b));
    s.add(&basis_sum(&[(bits(0, 1, 1, 0), ONE)]))
}

fn la2b2_seed(a: C64, b: C64) -> PureState4 {
    basis_sum(&[
        (bits(0, 0, 1, 1), a),
        (bits(1, 1, 0, 0), a),
        (bits(0, 1, 1, 0), b),
        (bits(1, 0, 0, 1), b),
        (bits(1, 1, 1, 1), I / (cr(2.0) * a)),
        (bits(1, 0, 1, 0), -I / (cr(2.0) * b)),
    ])
}

fn lba3_seed(a: C64, b: C64) -> PureState4 {
    let pref = ONE / (cr(32.0) * a * a * a);
    let a2 = a * a;
    let a3 = a2 * a;
    let a4 = a2 * a2;
    let c8 = c(-8.0, 8.0); // (8i - 8)
    let t1111 = -I + c8 * a2;
    let t0000 = -(I + c8 * a2);
    let w1 = -(ONE + c(4.0, 4.0) * a2); // coeff of sqrt2(|00>Psi- + Psi-|00>)
    let w2 = -(I - cr(32.0) * a4); // |0011> + |1100>
    let w3 = I + cr(16.0) * a3 * (a - b); // |0101> + |1010>
    let w4 = -(I + cr(16.0) * a3 * (a + b)); // |0110> + |1001>
    let w5 = -(ONE - c(4.0, 4.0) * a2); // sqrt2(Psi-|11> + |11>Psi-)
    // sqrt2 |00> Psi- = |0001> - |0010>, etc.
    let terms = vec![
        (bits(1, 1, 1, 1), t1111),
        (bits(0, 0, 0, 0), t0000),
        (bits(0, 0, 0, 1), w1),
        (bits(0, 0, 1, 0), -w1),
        (bits(0, 1, 0, 0), w1),
        (bits(1, 0, 0, 0), -w1),
        (bits(0, 0, 1, 1), w2),
        (bits(1, 1, 0, 0), w2),
        (bits(0, 1, 0, 1), w3),
        (bits(1, 0, 1, 0), w3),
        (bits(0, 1, 1, 0), w4),
        (bits(1, 0, 0, 1), w4),
        (bits(0, 1, 1, 1), w5),
        (bits(1, 0, 1, 1), -w5),
        (bits(1, 1, 0, 1), w5),
        (bits(1, 1, 1, 0), -w5),
    ];
    basis_sum(&terms).scaled(pref)
}

fn multiset_eq(a: &[C64], b: &[C64], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    'outer: for x in a {
        for (i, y) in b.iter().enumerate() {
            if !used[i] && (x - y).norm() <= tol {
                used[i] = true;
                continue 'outer;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sjf::r_block;
    use crate::state::z_pair;

    fn assert_z_matches(z: &Mat4, want: &Mat4, label: &str) {
        let d = (*z - *want).norm_fro();
        assert!(d < 1e-10, "{label}: Z mismatch {d:.2e}\n{z:?}\nvs\n{want:?}");
    }

    fn block_embed(blocks: &[Vec<Vec<C64>>]) -> Mat4 {
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
        m
    }

    #[test]
    fn generic_seed_z_diagonal() {
        let p = Family::GabcdGeneric.default_params();
        let s = seed(Family::GabcdGeneric, &p).unwrap();
        let zp = z_pair(&s.raw);
        let want = Mat4::diag([p[0] * p[0], p[3] * p[3], p[2] * p[2], p[1] * p[1]]);
        assert_z_matches(&zp.z, &want, "generic Z");
        assert_z_matches(&zp.zt, &want, "generic Zt");
    }

    #[test]
    fn labc2_seed_z_display() {
        let p = Family::Labc2Generic.default_params();
        let s = seed(Family::Labc2Generic, &p).unwrap();
        let zp = z_pair(&s.raw);
        let want = block_embed(&[
            vec![vec![p[0] * p[0]]],
            vec![vec![p[1] * p[1]]],
            r_block(2, p[2] * p[2]),
        ]);
        assert_z_matches(&zp.z, &want, "Labc2 Z");
        assert_z_matches(&zp.zt, &want, "Labc2 Zt");
    }

    #[test]
    fn la2b2_seed_z_display() {
        let p = Family::La2b2Generic.default_params();
        let s = seed(Family::La2b2Generic, &p).unwrap();
        let zp = z_pair(&s.raw);
        let want = block_embed(&[r_block(2, p[0] * p[0]), r_block(2, p[1] * p[1])]);
        assert_z_matches(&zp.z, &want, "La2b2 Z");
        assert_z_matches(&zp.zt, &want, "La2b2 Zt");
    }

    #[test]
    fn lba3_seed_z_display() {
        let p = Family::Lba3Generic.default_params();
        let s = seed(Family::Lba3Generic, &p).unwrap();
        let zp = z_pair(&s.raw);
        let want = block_embed(&[r_block(3, p[0] * p[0]), r_block(1, p[1] * p[1])]);
        assert_z_matches(&zp.z, &want, "Lba3 Z");
        assert_z_matches(&zp.zt, &want, "Lba3 Zt");
    }

    #[test]
    fn la203plus1_seed_z_display() {
        let p = Family::La203plus1.default_params();
        let s = seed(Family::La203plus1, &p).unwrap();
        let zp = z_pair(&s.raw);
        let a2 = p[0] * p[0];
        let want_z = block_embed(&[r_block(2, ZC), r_block(2, a2)]);
        let want_zt = block_embed(&[vec![vec![ZC]], vec![vec![ZC]], r_block(2, a2)]);
        assert_z_matches(&zp.z, &want_z, "La2 03+1 Z");
        assert_z_matches(&zp.zt, &want_zt, "La2 03+1 Zt");
    }

    #[test]
    fn l05plus3_seed_z_display() {
        let s = seed(Family::L05plus3, &[]).unwrap();
        let zp = z_pair(&s.undressed_raw);
        let want_z = block_embed(&[r_block(2, ZC), r_block(2, ZC)]);
        assert_z_matches(&zp.z, &want_z, "L05+3 Z");
        // displayed Zt: zero except (2,3)=(3,2)=(1+i)/2 and (3,4)=(4,3)=(1-i)/2
        let mut want_zt = Mat4::zero();
        want_zt[(1, 2)] = c(0.5, 0.5);
        want_zt[(2, 1)] = c(0.5, 0.5);
        want_zt[(2, 3)] = c(0.5, -0.5);
        want_zt[(3, 2)] = c(0.5, -0.5);
        assert_z_matches(&zp.zt, &want_zt, "L05+3 Zt");
    }

    #[test]
    fn l07plus1_seed_z_display() {
        let s = seed(Family::L07plus1, &[]).unwrap();
        let zp = z_pair(&s.undressed_raw);
        let mut want_z = Mat4::zero();
        // displayed rows: [0,1/2,i/2,0], [1/2,i/2,1/2,-i/2], [i/2,1/2,-i/2,1/2], [0,-i/2,1/2,0]
        let h = 0.5;
        want_z[(0, 1)] = cr(h);
        want_z[(0, 2)] = c(0.0, h);
        want_z[(1, 0)] = cr(h);
        want_z[(1, 1)] = c(0.0, h);
        want_z[(1, 2)] = cr(h);
        want_z[(1, 3)] = c(0.0, -h);
        want_z[(2, 0)] = c(0.0, h);
        want_z[(2, 1)] = cr(h);
        want_z[(2, 2)] = c(0.0, -h);
        want_z[(2, 3)] = cr(h);
        want_z[(3, 1)] = c(0.0, -h);
        want_z[(3, 2)] = cr(h);
        assert_z_matches(&zp.z, &want_z, "L07+1 Z");
        let mut want_zt = Mat4::zero();
        want_zt[(1, 2)] = c(0.5, 0.5);
        want_zt[(2, 1)] = c(0.5, 0.5);
        want_zt[(2, 3)] = c(0.5, -0.5);
        want_zt[(3, 2)] = c(0.5, -0.5);
        assert_z_matches(&zp.zt, &want_zt, "L07+1 Zt");
    }

    #[test]
    fn la4_seed_z_is_four_block() {
        let p = Family::La4Nonzero.default_params();
        let s = seed(Family::La4Nonzero, &p).unwrap();
        let zp = z_pair(&s.raw);
        let want = block_embed(&[r_block(4, p[0] * p[0])]);
        assert_z_matches(&zp.z, &want, "La4 Z");
        assert_z_matches(&zp.zt, &want, "La4 Zt");
    }

    #[test]
    fn la40202_seed_z_display() {
        let s = seed(Family::La40202, &[]).unwrap();
        let zp = z_pair(&s.undressed_raw);
        // the raw representative is unnormalized with amplitude scale 1;
        // displayed Z has R2(0) + R2(0) after scaling by 1/ (norm^2 ... )
        // the display uses the exact amplitudes above divided by 2 sqrt2
        let want = block_embed(&[r_block(2, ZC), r_block(2, ZC)]);
        let scale = 8.0; // |raw|^2 = 12? verified below against structure only
        let _ = scale;
        let got = zp.z;
        // compare up to overall real scale: find s minimizing |Z - s W|
        let w = want;
        let num: C64 = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .map(|(i, j)| w[(i, j)].conj() * got[(i, j)])
            .sum();
        let den: f64 = w.norm_fro().powi(2);
        let s_fit = num / cr(den);
        assert!(
            (got - w.scale(s_fit)).norm_fro() < 1e-10,
            "La4(0) Z not proportional to R2(0)+R2(0): {got:?}"
        );
        assert!(s_fit.norm() > 0.1);
    }

    #[test]
    fn ghz_and_w_seed() {
        let g = seed(Family::Ghz, &[]).unwrap();
        let zp = z_pair(&g.raw);
        let want = Mat4::diag([ONE, ONE, ZC, ZC]);
        assert_z_matches(&zp.z, &want, "GHZ Z");
        let w = seed(Family::W, &[]).unwrap();
        let zpw = z_pair(&w.raw);
        // W: one 2-block at zero and two zero 1-blocks; Z^2 = 0, rank Z = 1
        assert!((zpw.z * zpw.z).norm_fro() < 1e-12);
        assert!(crate::linalg::svd::rank4(&zpw.z, 1e-10) == 1);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        // degenerate generic parameters
        let bad = vec![cr(1.0), cr(1.0), c(0.5, 0.1), c(0.3, 0.2)];
        assert!(seed(Family::GabcdGeneric, &bad).is_err());
        // zero c in Labc2
        assert!(seed(Family::Labc2Generic, &[cr(0.4), cr(0.2), ZC]).is_err());
        // cyclic parameters must be rejected from the generic constructor
        let cyc = vec![cr(0.9), c(0.0, 0.9), cr(0.45), c(0.0, 0.45)];
        // squares: 0.81, -0.81, 0.2025, -0.2025 -> q = -1 cycle
        assert!(seed(Family::GabcdGeneric, &cyc).is_err());
    }

    #[test]
    fn dressings_are_consistent() {
        for fam in Family::all() {
            let p = fam.default_params();
            let s = seed(*fam, &p).unwrap();
            let redone = s.dressing.apply_raw(&s.undressed_raw);
            let d = redone
                .amp
                .iter()
                .zip(s.raw.amp.iter())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(d < 1e-12, "{}", fam.name());
        }
    }
}
