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

//! Classification and local-transformation analysis of pure four-qubit
//! states.
//!
//! The crate determines the entanglement family of an arbitrary pure
//! four-qubit state from the Jordan structure of its Z operator pair,
//! factors the state through the family seed, knows each family's local
//! symmetry group and LU standard form, decides which states are reachable
//! or convertible under deterministic LOCC (and which are isolated or in
//! the maximally entangled set), synthesizes the corresponding measurement
//! protocols, and cross-checks the structural predicates with a
//! linear-program feasibility oracle for separable transformations.

pub mod classify;
pub mod family;
pub mod fixtures;
pub mod json;
pub mod linalg;
pub mod mat;
pub mod standard_form;
pub mod state;
pub mod symmetry;
pub mod transform;

pub use classify::{classify, classify_tol, detect_cycles, factorize, ClassDescriptor, Factorization};
pub use family::Family;
pub use linalg::{eigenstructure, symmetric_jordan_form, JordanStructure};
pub use standard_form::{bloch_triple, lu_equivalent, standard_form, StandardForm};
pub use state::{
    apply_local, gram, reduced_density, z_pair, GramOperator, LocalOperator, PureState4, ZPair,
};
pub use symmetry::{sample_continuous, symmetry_group, verify_symmetry, SymmetryGroup};
pub use transform::{
    coplanar_tests, eta_check, monotone_screen, sep_feasible, synthesize_protocol,
    synthesize_protocol_auto, verdict, verify_protocol, Protocol, SepInstance, SepResult,
    TransformVerdict,
};

/// Seed-state constructor (see [`family::seed`]).
pub use family::seed as seed_state;
