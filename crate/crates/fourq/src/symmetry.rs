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

//! Local symmetry groups of the family seed states: finite Pauli-type parts
//! stored explicitly, continuous parts stored as parametrized generator
//! templates, everything re-verified numerically against the seed.

use crate::classify::{classify, factorize, ClassDescriptor, ClassifyError};
use crate::family::{seed, Family};
use crate::mat::{c, cr, p_z, pauli, pauli_rotation, shear_lower, shear_upper, Mat2, ONE, ZC};
use crate::state::{LocalOperator, PureState4};
use num_complex::Complex64 as C64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SymmetryError {
    #[error("no symmetry table for family {0}")]
    UnsupportedFamily(String),
    #[error("operator is not a symmetry (deficit {deficit:.3e})")]
    NotASymmetry { deficit: f64 },
    #[error("tabled element failed verification: {label} (deficit {deficit:.3e})")]
    TableVerification { label: String, deficit: f64 },
    #[error("classification failure while building the table: {0}")]
    Classify(#[from] ClassifyError),
    #[error("state failure while building the table: {0}")]
    State(#[from] crate::state::StateError),
}

/// One symmetry: S |seed> = scalar |seed> for the normalized working seed.
#[derive(Clone, Debug)]
pub struct SymmetryElement {
    pub op: LocalOperator,
    pub scalar: C64,
    pub unitary: bool,
    pub label: String,
}

/// Template kinds for continuous symmetry families.
#[derive(Clone, Debug)]
pub enum Generator {
    /// Products of diagonal P_{z_k^e}: for each parameter k an exponent per
    /// party; `prefactor` multiplies party 1 by z_1^prefactor.
    PzMulti { exps: Vec<[i8; 4]>, prefactor: i8 },
    /// [[1, x], [0, 1]] on every party.
    UniformShear,
    /// X on every party, X in SL(2).
    UniformSl2,
    /// (x, y, z): [[z,0],[x,1/z]] (x) [[z,y],[0,1/z]] (x) [[z,0],[-x,1/z]]
    /// (x) [[z,-y],[0,1/z]].
    Aaa2,
    /// (w, x, y, z): z^-2 [[z,w],[0,1/z]] (x) ... (x) [[z,-w-x-y],[0,1/z]].
    WShear,
    /// (x, z): [[1,0],[x,1]] (x) P_{1/z} (x) [[1,0],[-x,1]] (x) P_z.
    Equal2,
    /// (z1, h1, z2, h2): diag(z1,h1) (x) diag(z2,h2) (x) diag(1/z1,1/h1)
    /// (x) diag(1/z2,1/h2).
    AaiaDiag,
    /// (y1, x1, y2, x2): sx diag(y1,x1) (x) diag(y2,x2) (x)
    /// sx diag(1/y1,-1/x1) (x) diag(1/y2,-1/x2).
    AaiaX,
    /// (x, y, z): (y^3 z^3)^-1 [[1,0],[x,y^2 z^2]] (x) P_z (x)
    /// [[1,0],[-x,y^2 z^2]] (x) P_y.
    La40202,
    /// (x, y): [[1,0],[(1-i)(1+x-y)/y, 1/y]] (x) 1 (x) [[y,0],[x,1]] (x)
    /// [[y,0],[x,1]].
    L05,
}

/// A continuous symmetry family.
#[derive(Clone, Debug)]
pub struct ContinuousFamily {
    pub generator: Generator,
    pub param_names: Vec<&'static str>,
    /// Human-readable domain, e.g. "z in C \ 0".
    pub domain: String,
    pub label: String,
}

impl ContinuousFamily {
    /// Instantiate the template at given parameter values.
    pub fn element(&self, p: &[C64]) -> LocalOperator {
        let id = Mat2::identity();
        match &self.generator {
            Generator::PzMulti { exps, prefactor } => {
                let mut ops = [id; 4];
                for (k, e) in exps.iter().enumerate() {
                    for party in 0..4 {
                        let pw = powi(p[k], e[party]);
                        ops[party] = ops[party] * Mat2::diag(pw, ONE / pw);
                    }
                }
                if *prefactor != 0 {
                    ops[0] = ops[0].scale(powi(p[0], *prefactor));
                }
                LocalOperator::new(ops)
            }
            Generator::UniformShear => LocalOperator::uniform(shear_upper(p[0])),
            Generator::UniformSl2 => {
                // parameters: a, b, c with X = [[a, b], [c, (1+bc)/a]]
                let a = p[0];
                let x = Mat2::new(a, p[1], p[2], (ONE + p[1] * p[2]) / a);
                LocalOperator::uniform(x)
            }
            Generator::Aaa2 => {
                let (x, y, z) = (p[0], p[1], p[2]);
                LocalOperator::new([
                    Mat2::new(z, ZC, x, ONE / z),
                    Mat2::new(z, y, ZC, ONE / z),
                    Mat2::new(z, ZC, -x, ONE / z),
                    Mat2::new(z, -y, ZC, ONE / z),
                ])
            }
            Generator::WShear => {
                let (w, x, y, z) = (p[0], p[1], p[2], p[3]);
                let pre = ONE / (z * z);
                LocalOperator::new([
                    Mat2::new(z, w, ZC, ONE / z).scale(pre),
                    Mat2::new(z, x, ZC, ONE / z),
                    Mat2::new(z, y, ZC, ONE / z),
                    Mat2::new(z, -w - x - y, ZC, ONE / z),
                ])
            }
            Generator::Equal2 => {
                let (x, z) = (p[0], p[1]);
                LocalOperator::new([shear_lower(x), p_z(ONE / z), shear_lower(-x), p_z(z)])
            }
            Generator::AaiaDiag => LocalOperator::new([
                Mat2::diag(p[0], p[1]),
                Mat2::diag(p[2], p[3]),
                Mat2::diag(ONE / p[0], ONE / p[1]),
                Mat2::diag(ONE / p[2], ONE / p[3]),
            ]),
            Generator::AaiaX => {
                let sx = pauli(1);
                LocalOperator::new([
                    sx * Mat2::diag(p[0], p[1]),
                    Mat2::diag(p[2], p[3]),
                    sx * Mat2::diag(ONE / p[0], -ONE / p[1]),
                    Mat2::diag(ONE / p[2], ONE / p[3]),
                ])
            }
            Generator::La40202 => {
                let (x, y, z) = (p[0], p[1], p[2]);
                let y2z2 = y * y * z * z;
                let pre = ONE / (y * y * y * z * z * z);
                LocalOperator::new([
                    Mat2::new(ONE, ZC, x, y2z2).scale(pre),
                    p_z(z),
                    Mat2::new(ONE, ZC, -x, y2z2),
                    p_z(y),
                ])
            }
            Generator::L05 => {
                let (x, y) = (p[0], p[1]);
                let corner = c(1.0, -1.0) * (ONE + x - y) / y;
                LocalOperator::new([
                    Mat2::new(ONE, ZC, corner, ONE / y),
                    id,
                    Mat2::new(y, ZC, x, ONE),
                    Mat2::new(y, ZC, x, ONE),
                ])
            }
        }
    }
}

fn powi(z: C64, e: i8) -> C64 {
    match e {
        0 => ONE,
        1 => z,
        -1 => ONE / z,
        2 => z * z,
        -2 => ONE / (z * z),
        _ => {
            let mut out = ONE;
            for _ in 0..e.unsigned_abs() {
                out *= z;
            }
            if e < 0 {
                ONE / out
            } else {
                out
            }
        }
    }
}

/// The local symmetry group of a family seed.
#[derive(Clone, Debug)]
pub struct SymmetryGroup {
    pub family: Family,
    /// Normalized working seed the elements were verified against.
    pub seed_state: PureState4,
    pub finite_elements: Vec<SymmetryElement>,
    pub continuous: Vec<ContinuousFamily>,
    /// How the stored pieces compose into the full group.
    pub closure_note: String,
}

/// Check S|psi> = sqrt(s)|psi>; returns the scalar sqrt(s) or the deficit.
pub fn verify_symmetry(s: &LocalOperator, psi: &PureState4) -> Result<C64, SymmetryError> {
    let psi = psi
        .normalized()
        .map_err(|_| SymmetryError::NotASymmetry { deficit: 1.0 })?;
    let image = s.op_apply_raw(&psi);
    let scalar = psi.inner(&image);
    let mut dev = 0.0f64;
    for k in 0..16 {
        dev += (image.amp[k] - scalar * psi.amp[k]).norm_sqr();
    }
    let deficit = dev.sqrt() / image.norm().max(1e-300);
    if deficit <= 1e-9 {
        Ok(scalar)
    } else {
        Err(SymmetryError::NotASymmetry { deficit })
    }
}

trait OpApply {
    fn op_apply_raw(&self, psi: &PureState4) -> PureState4;
}
impl OpApply for LocalOperator {
    fn op_apply_raw(&self, psi: &PureState4) -> PureState4 {
        self.apply_raw(psi)
    }
}

fn pauli_word(k: [usize; 4]) -> LocalOperator {
    LocalOperator::new([pauli(k[0]), pauli(k[1]), pauli(k[2]), pauli(k[3])])
}

fn label_word(k: [usize; 4]) -> String {
    let names = ["1", "x", "y", "z"];
    format!(
        "s{}*s{}*s{}*s{}",
        names[k[0]], names[k[1]], names[k[2]], names[k[3]]
    )
}

fn verified(
    ops: Vec<(LocalOperator, String)>,
    psi: &PureState4,
) -> Result<Vec<SymmetryElement>, SymmetryError> {
    let mut out = Vec::new();
    for (op, label) in ops {
        match verify_symmetry(&op, psi) {
            Ok(scalar) => out.push(SymmetryElement {
                unitary: op.is_unitary(1e-10),
                op,
                scalar,
                label,
            }),
            Err(SymmetryError::NotASymmetry { deficit }) => {
                return Err(SymmetryError::TableVerification { label, deficit })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

fn pz_multi(exps: Vec<[i8; 4]>, prefactor: i8, names: Vec<&'static str>, label: &str) -> ContinuousFamily {
    ContinuousFamily {
        generator: Generator::PzMulti { exps, prefactor },
        domain: names
            .iter()
            .map(|n| format!("{n} in C \\ 0"))
            .collect::<Vec<_>>()
            .join(", "),
        param_names: names,
        label: label.into(),
    }
}

/// Symmetry group of the family seed designated by a class descriptor.
pub fn symmetry_group(desc: &ClassDescriptor) -> Result<SymmetryGroup, SymmetryError> {
    if desc.family == Family::Biseparable {
        return Err(SymmetryError::UnsupportedFamily(desc.family.name().into()));
    }
    let sd = seed(desc.family, &desc.params)?;
    let psi = sd.state;
    let idw = [0usize; 4];
    let id_elem = vec![(pauli_word(idw), label_word(idw))];
    let uniform = |k: usize| (pauli_word([k; 4]), label_word([k; 4]));
    let all_pauli_uniform = || -> Vec<(LocalOperator, String)> {
        vec![
            (pauli_word(idw), label_word(idw)),
            uniform(1),
            uniform(2),
            uniform(3),
        ]
    };

    let (finite, continuous, closure_note): (Vec<(LocalOperator, String)>, Vec<ContinuousFamily>, String) =
        match desc.family {
            Family::GabcdGeneric => (
                all_pauli_uniform(),
                vec![],
                "closed group of uniform Pauli words".into(),
            ),
            Family::GabcdTwo2Cycles => {
                let mut els = all_pauli_uniform();
                for w in [
                    [0usize, 3, 1, 2],
                    [3, 0, 2, 1],
                    [1, 2, 0, 3],
                    [2, 1, 3, 0],
                ] {
                    els.push((pauli_word(w), label_word(w)));
                }
                (
                    els,
                    vec![],
                    "eight Pauli words closed under composition up to phase".into(),
                )
            }
            Family::Gabcd4Cycle => {
                let els = four_cycle_elements(desc)?;
                (
                    els,
                    vec![],
                    "conjugate of the two-2-cycle Pauli group through the \
                     party 2<->3 relabeling"
                        .into(),
                )
            }
            Family::Lstate3Cycle => {
                let mut els = all_pauli_uniform();
                let q = std::f64::consts::FRAC_PI_4;
                for (sy, sx, tag) in [
                    (q, q, "[Y(+)X(+)]"),
                    (q, -q, "[Y(+)X(-)]"),
                    (-q, q, "[Y(-)X(+)]"),
                    (-q, -q, "[Y(-)X(-)]"),
                ] {
                    let m = pauli_rotation(2, sy) * pauli_rotation(1, sx);
                    els.push((LocalOperator::uniform(m), format!("{tag}^4")));
                }
                for (sz, sx, tag) in [
                    (q, q, "[Z(+)X(+)]"),
                    (q, -q, "[Z(+)X(-)]"),
                    (-q, q, "[Z(-)X(+)]"),
                    (-q, -q, "[Z(-)X(-)]"),
                ] {
                    let m = pauli_rotation(3, sz) * pauli_rotation(1, sx);
                    els.push((LocalOperator::uniform(m), format!("{tag}^4")));
                }
                (
                    els,
                    vec![],
                    "twelve-element group: uniform Paulis and uniform \
                     quarter-turn products"
                        .into(),
                )
            }
            Family::GabcdTripleDegenerate => (
                all_pauli_uniform(),
                vec![ContinuousFamily {
                    generator: Generator::UniformSl2,
                    param_names: vec!["a", "b", "c"],
                    domain: "X = [[a,b],[c,(1+bc)/a]] in SL(2)".into(),
                    label: "X^4, X in SL(2)".into(),
                }],
                "X^4 over SL(2); the uniform Pauli words are the iX choices".into(),
            ),
            Family::GabcdAdcc => (
                vec![id_elem[0].clone(), uniform(1)],
                vec![pz_multi(vec![[1, 1, 1, 1]], 0, vec!["z"], "P_z^4")],
                "P_z^4 (s_x^4)^m".into(),
            ),
            Family::GabcdAacc => (
                vec![id_elem[0].clone(), uniform(1)],
                vec![pz_multi(
                    vec![[1, 0, 1, 0], [0, 1, 0, 1]],
                    0,
                    vec!["z1", "z2"],
                    "P_z1 x P_z2 x P_z1 x P_z2",
                )],
                "(P_z1 x P_z2)^2 (s_x^4)^m".into(),
            ),
            Family::GabcdAaia => (
                vec![id_elem[0].clone(), uniform(1)],
                vec![
                    ContinuousFamily {
                        generator: Generator::AaiaDiag,
                        param_names: vec!["z1", "h1", "z2", "h2"],
                        domain: "all in C \\ 0".into(),
                        label: "diagonal family".into(),
                    },
                    ContinuousFamily {
                        generator: Generator::AaiaX,
                        param_names: vec!["y1", "x1", "y2", "x2"],
                        domain: "all in C \\ 0".into(),
                        label: "sx-dressed diagonal family".into(),
                    },
                ],
                "generated by s_x^4, the diagonal family and the sx-dressed \
                 diagonal family"
                    .into(),
            ),
            Family::GabcdAd00 => (
                vec![id_elem[0].clone(), uniform(1)],
                vec![pz_multi(
                    vec![[1, -1, 0, 0], [0, 0, 1, -1]],
                    0,
                    vec!["z1", "z2"],
                    "P_z1 x P_z1^-1 x P_z2 x P_z2^-1",
                )],
                "(s_x^4)^m times the two-parameter diagonal family".into(),
            ),
            Family::Ghz => (
                vec![id_elem[0].clone(), uniform(1)],
                vec![pz_multi(
                    vec![[1, 0, 0, -1], [0, 1, 0, -1], [0, 0, 1, -1]],
                    0,
                    vec!["z1", "z2", "z3"],
                    "P_z1 x P_z2 x P_z3 x P_(z1 z2 z3)^-1",
                )],
                "(s_x^4)^m times the three-parameter diagonal family".into(),
            ),
            Family::Labc2Generic | Family::La2b2Generic | Family::La203plus1 => (
                vec![id_elem[0].clone(), uniform(3)],
                vec![],
                "identity and s_z^4".into(),
            ),
            Family::Labc2Aba2 => (
                vec![id_elem[0].clone(), uniform(3)],
                vec![ContinuousFamily {
                    generator: Generator::UniformShear,
                    param_names: vec!["x"],
                    domain: "x in C".into(),
                    label: "[[1,x],[0,1]]^4".into(),
                }],
                "(s_z^4)^m times the uniform upper shear family".into(),
            ),
            Family::Labc2Aac2 | Family::Lab02Ab | Family::La2b200b2 => (
                vec![id_elem[0].clone(), uniform(3)],
                vec![pz_multi(vec![[1, 1, 1, 1]], 0, vec!["z"], "P_z^4")],
                "uniform diagonal family (s_z^4 at z = i)".into(),
            ),
            Family::Labc2Aaa2 => (
                vec![id_elem[0].clone(), uniform(3)],
                vec![ContinuousFamily {
                    generator: Generator::Aaa2,
                    param_names: vec!["x", "y", "z"],
                    domain: "x, y in C; z in C \\ 0".into(),
                    label: "shear-diagonal family".into(),
                }],
                "three-parameter family; s_z^4 at x = y = 0, z = i".into(),
            ),
            Family::Labc200c2 => (
                vec![
                    id_elem[0].clone(),
                    (pauli_word([3, 3, 0, 0]), label_word([3, 3, 0, 0])),
                    (pauli_word([0, 0, 3, 3]), label_word([0, 0, 3, 3])),
                    uniform(3),
                ],
                vec![pz_multi(
                    vec![[1, 1, 0, 0], [0, 0, 1, 1]],
                    0,
                    vec!["z", "zt"],
                    "P_z x P_z x P_zt x P_zt",
                )],
                "two independent diagonal circles".into(),
            ),
            Family::Lab02Aa => (
                vec![
                    id_elem[0].clone(),
                    (pauli_word([3, 0, 0, 3]), label_word([3, 0, 0, 3])),
                    (pauli_word([0, 3, 3, 0]), label_word([0, 3, 3, 0])),
                    uniform(3),
                ],
                vec![pz_multi(
                    vec![[0, 1, 1, 0], [1, 0, 0, 1]],
                    0,
                    vec!["z", "zt"],
                    "P_zt x P_z x P_z x P_zt",
                )],
                "two independent diagonal circles".into(),
            ),
            Family::La2b2Minus => {
                let els = vec![
                    id_elem[0].clone(),
                    uniform(3),
                    (pauli_word([0, 1, 3, 1]), label_word([0, 1, 3, 1])),
                    (pauli_word([3, 2, 0, 2]), label_word([3, 2, 0, 2])),
                ];
                (
                    els,
                    vec![],
                    "four Pauli words closed under composition up to phase".into(),
                )
            }
            Family::La2b2Equal => (
                vec![
                    id_elem[0].clone(),
                    (pauli_word([3, 2, 3, 2]), label_word([3, 2, 3, 2])),
                ],
                vec![ContinuousFamily {
                    generator: Generator::Equal2,
                    param_names: vec!["x", "z"],
                    domain: "x in C; z in C \\ 0".into(),
                    label: "shear x diagonal family".into(),
                }],
                "(sz sy sz sy)^m times the shear-diagonal family".into(),
            ),
            Family::Lba3Generic | Family::La4Nonzero => (
                id_elem.clone(),
                vec![],
                "trivial".into(),
            ),
            Family::Lba3Aa3 | Family::Lba30b02 => (
                id_elem.clone(),
                vec![ContinuousFamily {
                    generator: Generator::UniformShear,
                    param_names: vec!["x"],
                    domain: "x in C".into(),
                    label: "[[1,x],[0,1]]^4".into(),
                }],
                "uniform upper shear family".into(),
            ),
            Family::W => (
                vec![id_elem[0].clone(), uniform(3)],
                vec![ContinuousFamily {
                    generator: Generator::WShear,
                    param_names: vec!["w", "x", "y", "z"],
                    domain: "w, x, y in C; z in C \\ 0".into(),
                    label: "upper-shear family with vanishing shear sum".into(),
                }],
                "four-parameter family; s_z^4 at w = x = y = 0, z = i".into(),
            ),
            Family::La40202 => (
                vec![
                    id_elem[0].clone(),
                    (pauli_word([0, 3, 0, 3]), label_word([0, 3, 0, 3])),
                    (pauli_word([3, 3, 3, 0]), label_word([3, 3, 3, 0])),
                    (pauli_word([3, 0, 3, 3]), label_word([3, 0, 3, 3])),
                ],
                vec![ContinuousFamily {
                    generator: Generator::La40202,
                    param_names: vec!["x", "y", "z"],
                    domain: "x in C; y, z in C \\ 0".into(),
                    label: "shear-diagonal family".into(),
                }],
                "three-parameter family containing the listed Pauli words".into(),
            ),
            Family::L05plus3 => {
                let s0m1 = LocalOperator::new([
                    Mat2::new(ONE, ZC, c(-2.0, 2.0), -ONE),
                    Mat2::identity(),
                    Mat2::diag(-ONE, ONE),
                    Mat2::diag(-ONE, ONE),
                ]);
                (
                    vec![id_elem[0].clone(), (s0m1, "S_{0,-1}".into())],
                    vec![ContinuousFamily {
                        generator: Generator::L05,
                        param_names: vec!["x", "y"],
                        domain: "x in C; y in C \\ 0".into(),
                        label: "two-parameter lower-triangular family".into(),
                    }],
                    "S_{x,y}; only y-circle elements act diagonally on \
                     parties 3 and 4"
                        .into(),
                )
            }
            Family::L07plus1 => (
                vec![
                    id_elem[0].clone(),
                    (pauli_word([0, 3, 3, 3]), label_word([0, 3, 3, 3])),
                ],
                vec![pz_multi(
                    vec![[2, 1, 1, 1]],
                    -1,
                    vec!["z"],
                    "z^-1 P_z^2 x P_z x P_z x P_z",
                )],
                "one-parameter diagonal family".into(),
            ),
            Family::Biseparable => unreachable!(),
        };

    let finite_elements = verified(finite, &psi)?;
    Ok(SymmetryGroup {
        family: desc.family,
        seed_state: psi,
        finite_elements,
        continuous,
        closure_note,
    })
}

/// Symmetries of the 4-cycle seed: the two-2-cycle Pauli group conjugated
/// through the party 2 <-> 3 relabeling and the connecting local operator.
fn four_cycle_elements(desc: &ClassDescriptor) -> Result<Vec<(LocalOperator, String)>, SymmetryError> {
    let sd = seed(Family::Gabcd4Cycle, &desc.params)?;
    let perm = [0usize, 2, 1, 3];
    let permuted = sd.state.permute(&perm);
    let d2 = classify(&permuted)?;
    if d2.family != Family::GabcdTwo2Cycles {
        return Err(SymmetryError::UnsupportedFamily(format!(
            "4-cycle seed relabels into {}, expected the two-2-cycle family",
            d2.family.name()
        )));
    }
    let f = factorize(&permuted, &d2)?;
    // permuted = relabel(perm) of seed; permuted ~= g |seed2>.
    // For S2 in the two-2-cycle group, g s g^-1 relabeled back is a symmetry.
    let words: Vec<[usize; 4]> = vec![
        [0, 0, 0, 0],
        [1, 1, 1, 1],
        [2, 2, 2, 2],
        [3, 3, 3, 3],
        [0, 3, 1, 2],
        [3, 0, 2, 1],
        [1, 2, 0, 3],
        [2, 1, 3, 0],
    ];
    // factorize worked in the frame after d2.perm; fold that relabeling in
    let mut out = Vec::new();
    for w in words {
        let s2 = pauli_word(w);
        // conjugate sitewise by g in the factorized frame, then undo the
        // classification relabeling of the permuted state, then undo perm
        let mut ops = [Mat2::identity(); 4];
        for i in 0..4 {
            let gi = f.g.ops[i];
            let gi_inv = gi.inv().expect("factor invertible");
            ops[i] = gi * s2.ops[i] * gi_inv;
        }
        // ops act on the relabeled state permuted2 = permuted.permute(d2.perm):
        // position j of permuted2 is party d2.perm[j] of permuted
        let mut on_permuted = [Mat2::identity(); 4];
        for (j, &src) in d2.perm.iter().enumerate() {
            on_permuted[src] = ops[j];
        }
        // positions of `permuted` map back to the original through `perm`
        let mut on_original = [Mat2::identity(); 4];
        for (j, &src) in perm.iter().enumerate() {
            on_original[src] = on_permuted[j];
        }
        out.push((
            LocalOperator::new(on_original),
            format!("conjugated {}", label_word(w)),
        ));
    }
    Ok(out)
}

/// Sampling policy for continuous symmetry families.
#[derive(Clone, Copy, Debug)]
pub struct SamplePolicy {
    /// Points per unit circle parameter.
    pub phase_points: usize,
    /// Cap on the total number of returned elements.
    pub cap: usize,
    /// Include non-unitary representatives (off-circle magnitudes, shears).
    pub include_nonunitary: bool,
}

impl Default for SamplePolicy {
    fn default() -> Self {
        SamplePolicy {
            phase_points: 16,
            cap: 32,
            include_nonunitary: false,
        }
    }
}

/// Discretize the group: products of the finite part with grid samples of
/// the continuous parts, each sample verified against the seed, deduplicated
/// up to phase.
pub fn sample_continuous(group: &SymmetryGroup, policy: &SamplePolicy) -> Vec<SymmetryElement> {
    let mut raw: Vec<(LocalOperator, String)> = Vec::new();
    if group.continuous.is_empty() {
        raw.extend(
            group
                .finite_elements
                .iter()
                .map(|e| (e.op, e.label.clone())),
        );
    } else {
        for fam in &group.continuous {
            let grids = unitary_grid(fam, policy);
            for params in grids {
                let cont = fam.element(&params);
                for fin in &group.finite_elements {
                    let op = fin.op.compose(&cont);
                    raw.push((op, format!("{} * {}({params:?})", fin.label, fam.label)));
                }
            }
        }
    }
    let mut out: Vec<SymmetryElement> = Vec::new();
    for (op, label) in raw {
        if out.len() >= policy.cap {
            break;
        }
        let scalar = match verify_symmetry(&op, &group.seed_state) {
            Ok(s) => s,
            Err(_) => continue,
        };
        let unitary = op.is_unitary(1e-10);
        if !unitary && !policy.include_nonunitary {
            continue;
        }
        // drop exact duplicates (phase-distinct samples are kept; they are
        // distinct grid points even though the separability oracle cannot
        // tell them apart)
        let dup = out.iter().any(|e| {
            (0..4)
                .map(|p| (e.op.ops[p] - op.ops[p]).norm_fro())
                .sum::<f64>()
                < 1e-10
        });
        if !dup {
            out.push(SymmetryElement {
                op,
                scalar,
                unitary,
                label,
            });
        }
    }
    out
}

#[cfg(test)]
fn best_phase(a: &LocalOperator, b: &LocalOperator) -> [C64; 4] {
    let mut out = [ONE; 4];
    for party in 0..4 {
        let mut num = ZC;
        let mut den = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                num += b.ops[party].0[i][j].conj() * a.ops[party].0[i][j];
                den += b.ops[party].0[i][j].norm_sqr();
            }
        }
        if den > 1e-300 {
            out[party] = num / cr(den);
        }
    }
    out
}

fn unitary_grid(fam: &ContinuousFamily, policy: &SamplePolicy) -> Vec<Vec<C64>> {
    let circle = |n: usize| -> Vec<C64> {
        (0..n)
            .map(|k| C64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64))
            .collect()
    };
    match &fam.generator {
        Generator::PzMulti { exps, .. } => {
            let k = exps.len();
            let n = match k {
                1 => policy.phase_points,
                2 => (policy.phase_points / 2).max(4),
                _ => 4,
            };
            let pts = circle(n);
            let mut out: Vec<Vec<C64>> = vec![vec![]];
            for _ in 0..k {
                let mut next = Vec::new();
                for base in &out {
                    for p in &pts {
                        let mut v = base.clone();
                        v.push(*p);
                        next.push(v);
                    }
                }
                out = next;
            }
            out
        }
        Generator::UniformShear => {
            let mut out = vec![vec![ZC]];
            if policy.include_nonunitary {
                out.push(vec![cr(0.5)]);
                out.push(vec![c(0.0, 0.7)]);
                out.push(vec![c(-0.4, 0.3)]);
            }
            out
        }
        Generator::UniformSl2 => {
            // SU(2) points: uniform Pauli rotations about each axis
            let mut out = Vec::new();
            let n = 4usize;
            for w in 1..=3usize {
                for k in 0..n {
                    let ang = std::f64::consts::PI * k as f64 / n as f64;
                    let u = pauli_rotation(w, ang);
                    // encode as (a, b, c) with X = [[a,b],[c,..]]
                    if u.0[0][0].norm() > 1e-6 {
                        out.push(vec![u.0[0][0], u.0[0][1], u.0[1][0]]);
                    }
                }
            }
            if policy.include_nonunitary {
                out.push(vec![cr(1.3), cr(0.2), c(0.0, -0.4)]);
            }
            out
        }
        Generator::Aaa2 => {
            let pts = circle(policy.phase_points.min(16));
            let mut out: Vec<Vec<C64>> = pts.iter().map(|z| vec![ZC, ZC, *z]).collect();
            if policy.include_nonunitary {
                out.push(vec![cr(0.3), c(0.0, 0.2), cr(1.2)]);
            }
            out
        }
        Generator::WShear => {
            let pts = circle(policy.phase_points.min(16));
            let mut out: Vec<Vec<C64>> = pts.iter().map(|z| vec![ZC, ZC, ZC, *z]).collect();
            if policy.include_nonunitary {
                out.push(vec![cr(0.2), cr(-0.1), c(0.0, 0.3), cr(0.9)]);
            }
            out
        }
        Generator::Equal2 => {
            let pts = circle(policy.phase_points.min(16));
            let mut out: Vec<Vec<C64>> = pts.iter().map(|z| vec![ZC, *z]).collect();
            if policy.include_nonunitary {
                out.push(vec![c(0.3, -0.2), cr(1.4)]);
            }
            out
        }
        Generator::AaiaDiag => {
            let pts = circle((policy.phase_points / 4).max(2));
            let mut out = Vec::new();
            for a in &pts {
                for b in &pts {
                    out.push(vec![*a, *b, ONE, ONE]);
                    out.push(vec![ONE, ONE, *a, *b]);
                }
            }
            out
        }
        Generator::AaiaX => {
            let pts = circle(4);
            let mut out = Vec::new();
            for a in &pts {
                out.push(vec![*a, *a, ONE, ONE]);
                out.push(vec![ONE, ONE, *a, *a]);
            }
            out
        }
        Generator::La40202 => {
            let pts = circle((policy.phase_points / 2).max(4));
            let mut out = Vec::new();
            for y in &pts {
                for z in &pts {
                    out.push(vec![ZC, *y, *z]);
                }
            }
            if policy.include_nonunitary {
                out.push(vec![cr(0.4), cr(0.8), cr(1.1)]);
            }
            out
        }
        Generator::L05 => {
            // only the identity is unitary; the y-circle family (x = 0) is
            // the one used by the transformation analysis (non-unitary)
            let mut out = vec![vec![ZC, ONE]];
            if policy.include_nonunitary {
                for y in circle(policy.phase_points.min(16)) {
                    out.push(vec![ZC, y]);
                }
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::classify;

    fn group_for(fam: Family) -> SymmetryGroup {
        let p = fam.default_params();
        let s = seed(fam, &p).unwrap();
        let d = classify(&s.state).unwrap();
        assert_eq!(d.family, fam, "{}", fam.name());
        symmetry_group(&d).unwrap()
    }

    #[test]
    fn tabled_elements_verify_for_every_family() {
        for fam in Family::all() {
            let g = group_for(*fam);
            assert!(!g.finite_elements.is_empty(), "{}", fam.name());
        }
    }

    #[test]
    fn cardinalities_match() {
        assert_eq!(group_for(Family::GabcdGeneric).finite_elements.len(), 4);
        assert_eq!(group_for(Family::GabcdTwo2Cycles).finite_elements.len(), 8);
        assert_eq!(group_for(Family::Lstate3Cycle).finite_elements.len(), 12);
        assert_eq!(group_for(Family::La2b2Minus).finite_elements.len(), 4);
        assert_eq!(group_for(Family::Labc2Generic).finite_elements.len(), 2);
        assert_eq!(group_for(Family::Gabcd4Cycle).finite_elements.len(), 8);
    }

    #[test]
    fn finite_parts_close_up_to_phase() {
        for fam in [
            Family::GabcdGeneric,
            Family::GabcdTwo2Cycles,
            Family::La2b2Minus,
            Family::Lstate3Cycle,
            Family::La40202,
        ] {
            let g = group_for(fam);
            let els = &g.finite_elements;
            for a in els {
                for b in els {
                    let prod = a.op.compose(&b.op);
                    let hit = els.iter().any(|e| {
                        let ph = best_phase(&e.op, &prod);
                        (0..4).all(|p| {
                            (e.op.ops[p] - prod.ops[p].scale(ph[p])).norm_fro() < 1e-9
                        })
                    });
                    assert!(hit, "{}: {} * {} escapes the set", fam.name(), a.label, b.label);
                }
            }
        }
    }

    #[test]
    fn sigma_z_on_labc2_seed_has_unit_scalar() {
        let g = group_for(Family::Labc2Generic);
        let sz = g
            .finite_elements
            .iter()
            .find(|e| e.label == "sz*sz*sz*sz")
            .unwrap();
        assert!((sz.scalar - ONE).norm() < 1e-9);
    }

    #[test]
    fn random_unitary_rejected() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        let p = Family::GabcdGeneric.default_params();
        let s = seed(Family::GabcdGeneric, &p).unwrap();
        let mut rejected = 0;
        for _ in 0..10 {
            let u = LocalOperator::new([
                crate::linalg::magic::random_su2(&mut rng),
                crate::linalg::magic::random_su2(&mut rng),
                crate::linalg::magic::random_su2(&mut rng),
                crate::linalg::magic::random_su2(&mut rng),
            ]);
            match verify_symmetry(&u, &s.state) {
                Err(SymmetryError::NotASymmetry { deficit }) => {
                    assert!(deficit > 0.1);
                    rejected += 1;
                }
                _ => {}
            }
        }
        assert_eq!(rejected, 10);
    }

    #[test]
    fn sampled_elements_unitary_and_counted() {
        let g = group_for(Family::GabcdAdcc);
        let samples = sample_continuous(&g, &SamplePolicy::default());
        assert_eq!(samples.len(), 32, "16 phases x two finite cosets");
        for e in &samples {
            assert!(e.unitary);
        }
    }

    #[test]
    fn w_group_samples_contain_z_phases() {
        let g = group_for(Family::W);
        let samples = sample_continuous(&g, &SamplePolicy::default());
        assert!(samples.len() >= 8);
        for e in &samples {
            assert!(e.unitary);
        }
    }

    #[test]
    fn finite_only_group_passes_through() {
        let g = group_for(Family::La2b2Minus);
        let samples = sample_continuous(&g, &SamplePolicy::default());
        assert_eq!(samples.len(), 4);
    }
}
