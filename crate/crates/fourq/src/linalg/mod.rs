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

//! Dense complex linear algebra on 2x2 and 4x4 matrices: magic-basis
//! transforms, Jordan structure detection and the symmetric Jordan
//! decomposition.

pub mod eigen;
pub mod magic;
pub mod quartic;
pub mod sjf;
pub mod svd;

pub use eigen::{
    eigenstructure_tol, expm, jordan_chains, jordan_matrix, matrix_sqrt, JordanBlock,
    JordanStructure, LinalgError,
};
pub use magic::{kron_split, magic_transform, magic_u, magic_untransform, orthogonality_defect};
pub use quartic::{char_poly, eigenvalues};
pub use sjf::{
    r_block, r_matrix, swap_fix_q, symmetric_jordan_form, symmetric_jordan_form_with_structure,
    symmetric_sqrt, t_block, t_matrix, SymmetricJordanDecomposition,
};
pub use svd::{nullspace4, rank4, svd4, Svd4};

/// Default relative degeneracy tolerance: class membership decisions use
/// eps = DEFAULT_EIG_TOL * max(1, |M|_F).
pub const DEFAULT_EIG_TOL: f64 = 1e-7;

/// Detect the Jordan structure at the default tolerance.
pub fn eigenstructure(m: &crate::mat::Mat4) -> Result<JordanStructure, LinalgError> {
    eigenstructure_tol(m, DEFAULT_EIG_TOL)
}
