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

//! LOCC transformation analysis: the separable-feasibility linear program,
//! Pauli trace constraints, per-family verdicts, protocol synthesis and the
//! vector-geometry admissibility tests.

pub mod eta;
pub mod geometry;
pub mod protocol;
pub mod sep;
pub mod simplex;
pub mod verdict;

pub use eta::{as_pauli_letter, direct_pauli_average, eta_check, EtaConstraint, EtaError, EtaForce};
pub use geometry::{coplanar_tests, monotone_screen, CoplanarReport, V3};
pub use protocol::{
    synthesize_protocol, synthesize_protocol_auto, verify_protocol, Branch, Protocol,
    ProtocolError, ProtocolReport,
};
pub use sep::{sep_feasible, sep_feasible_scan, SepInstance, SepResult};
pub use verdict::{verdict, verdict_of_form, TransformVerdict, VerdictError};
