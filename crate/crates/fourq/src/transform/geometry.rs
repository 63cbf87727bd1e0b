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

//! Vector-geometry admissibility tests for Bloch triplets: scalar products
//! and the triple product are conserved under the allowed transformations,
//! vector lengths cannot shrink, and coplanar configurations can only move
//! by uniform rotations or stay on parallel/zero patterns.

pub type V3 = [f64; 3];

pub fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: V3, b: V3) -> V3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: V3) -> f64 {
    dot(a, a).sqrt()
}

fn parallel_or_zero(a: V3, b: V3, tol: f64) -> bool {
    norm(a) <= tol || norm(b) <= tol || norm(cross(a, b)) <= tol * norm(a) * norm(b)
}

/// Which of the geometric necessary conditions a candidate transition
/// v -> w satisfies.
#[derive(Clone, Debug)]
pub struct CoplanarReport {
    pub scalar_products_preserved: bool,
    pub triple_product_preserved: bool,
    pub norms_nondecreasing: bool,
    pub v_coplanar: bool,
    pub w_coplanar: bool,
    pub v_has_parallel_or_zero_pair: bool,
    pub w_has_parallel_or_zero_pair: bool,
    pub uniform_rotation: bool,
    /// Conclusion of the pairwise-nonparallel coplanar statement: when the
    /// source triplet is coplanar with no parallel/zero pair and all the
    /// invariants hold, the move must be a uniform rotation.
    pub rigid_case_consistent: bool,
    /// Conclusion of the parallel/zero statement: a source pattern of
    /// parallel or vanishing vectors must persist in the target.
    pub degenerate_case_consistent: bool,
}

const GTOL: f64 = 1e-8;

pub fn coplanar_tests(v: &[V3; 3], w: &[V3; 3]) -> CoplanarReport {
    let scalar_products_preserved = (0..3).all(|i| {
        ((i + 1)..3).all(|j| (dot(v[i], v[j]) - dot(w[i], w[j])).abs() <= 1e-7)
    });
    let tp_v = dot(v[0], cross(v[1], v[2]));
    let tp_w = dot(w[0], cross(w[1], w[2]));
    let triple_product_preserved = (tp_v - tp_w).abs() <= 1e-7;
    let norms_nondecreasing = (0..3).all(|i| norm(w[i]) >= norm(v[i]) - 1e-9);
    let v_coplanar = tp_v.abs() <= GTOL;
    let w_coplanar = tp_w.abs() <= GTOL;
    let v_pair = (0..3).any(|i| ((i + 1)..3).any(|j| parallel_or_zero(v[i], v[j], GTOL)));
    let w_pair = (0..3).any(|i| ((i + 1)..3).any(|j| parallel_or_zero(w[i], w[j], GTOL)));
    let uniform_rotation = is_uniform_rotation(v, w);
    let rigid_premises =
        v_coplanar && !v_pair && scalar_products_preserved && norms_nondecreasing && w_coplanar;
    let rigid_case_consistent = !rigid_premises || uniform_rotation;
    let degen_premises =
        v_coplanar && v_pair && scalar_products_preserved && norms_nondecreasing && w_coplanar;
    let degenerate_case_consistent = !degen_premises || w_pair;
    CoplanarReport {
        scalar_products_preserved,
        triple_product_preserved,
        norms_nondecreasing,
        v_coplanar,
        w_coplanar,
        v_has_parallel_or_zero_pair: v_pair,
        w_has_parallel_or_zero_pair: w_pair,
        uniform_rotation,
        rigid_case_consistent,
        degenerate_case_consistent,
    }
}

/// Does an orthogonal map R exist with w_i = R v_i for all i?
pub fn is_uniform_rotation(v: &[V3; 3], w: &[V3; 3]) -> bool {
    // norms and pairwise scalar products must match exactly
    for i in 0..3 {
        if (norm(v[i]) - norm(w[i])).abs() > 1e-7 {
            return false;
        }
        for j in (i + 1)..3 {
            if (dot(v[i], v[j]) - dot(w[i], w[j])).abs() > 1e-7 {
                return false;
            }
        }
    }
    // build frames from the first two independent vectors
    let frame = |u: &[V3; 3]| -> Option<[V3; 3]> {
        let a = *u.iter().find(|x| norm(**x) > GTOL)?;
        let e1 = scale(a, 1.0 / norm(a));
        let b = u
            .iter()
            .find(|x| norm(cross(e1, **x)) > GTOL * norm(**x).max(1e-30))?;
        let mut e2 = sub(*b, scale(e1, dot(e1, *b)));
        e2 = scale(e2, 1.0 / norm(e2));
        let e3 = cross(e1, e2);
        Some([e1, e2, e3])
    };
    match (frame(v), frame(w)) {
        (Some(fv), Some(fw)) => {
            // R maps fv onto fw (or its reflection); test both orientations
            for flip in [1.0f64, -1.0] {
                let fw2 = [fw[0], fw[1], scale(fw[2], flip)];
                let mut ok = true;
                for i in 0..3 {
                    // coordinates of v_i in fv must equal w_i in fw2
                    for k in 0..3 {
                        let cv = dot(v[i], fv[k]);
                        let cw = dot(w[i], fw2[k]);
                        if (cv - cw).abs() > 1e-6 {
                            ok = false;
                        }
                    }
                }
                if ok {
                    return true;
                }
            }
            false
        }
        // all-zero or rank-one configurations: scalar-product equality is
        // already sufficient
        _ => true,
    }
}

fn scale(a: V3, s: f64) -> V3 {
    [a[0] * s, a[1] * s, a[2] * s]
}
fn sub(a: V3, b: V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Necessary monotonicity screen for candidate transformations G -> H with
/// unitary symmetries: Bloch norms cannot decrease. Returns false when the
/// transformation is impossible on that ground; with non-unitary symmetries
/// the screen does not apply and passes.
pub fn monotone_screen(
    g: &[crate::state::GramOperator; 4],
    h: &[crate::state::GramOperator; 4],
    unitary_only: bool,
) -> bool {
    if !unitary_only {
        return true;
    }
    for p in 0..4 {
        if h[p].bloch_norm() < g[p].bloch_norm() - 1e-10 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_triplet_passes_everything() {
        let v = [[0.2, 0.0, 0.1], [0.0, 0.0, 0.3], [0.1, 0.0, -0.2]];
        let r = coplanar_tests(&v, &v);
        assert!(r.scalar_products_preserved);
        assert!(r.triple_product_preserved);
        assert!(r.norms_nondecreasing);
        assert!(r.uniform_rotation);
        assert!(r.rigid_case_consistent);
        assert!(r.degenerate_case_consistent);
    }

    #[test]
    fn rotated_triplet_is_uniform_rotation() {
        let v = [[0.2, 0.1, 0.0], [0.0, 0.3, 0.0], [-0.1, 0.2, 0.0]];
        let th = 0.7f64;
        let rot = |a: V3| -> V3 {
            [
                a[0] * th.cos() - a[1] * th.sin(),
                a[0] * th.sin() + a[1] * th.cos(),
                a[2],
            ]
        };
        let w = [rot(v[0]), rot(v[1]), rot(v[2])];
        let r = coplanar_tests(&v, &w);
        assert!(r.uniform_rotation);
        assert!(r.rigid_case_consistent);
    }

    #[test]
    fn growing_zero_vector_breaks_the_pattern() {
        let v = [[0.2, 0.0, 0.0], [0.0, 0.3, 0.0], [0.0, 0.0, 0.0]];
        let w = [[0.2, 0.0, 0.0], [0.0, 0.3, 0.0], [0.05, 0.04, 0.0]];
        let r = coplanar_tests(&v, &w);
        // scalar products with the third vector are no longer zero
        assert!(!r.scalar_products_preserved);
    }

    #[test]
    fn monotone_screen_blocks_shrinking() {
        use crate::state::GramOperator;
        let g = [
            GramOperator::from_bloch([0.3, 0.0, 0.0]),
            GramOperator::from_bloch([0.0; 3]),
            GramOperator::from_bloch([0.0; 3]),
            GramOperator::from_bloch([0.0; 3]),
        ];
        let h = [
            GramOperator::from_bloch([0.2, 0.0, 0.0]),
            GramOperator::from_bloch([0.0; 3]),
            GramOperator::from_bloch([0.0; 3]),
            GramOperator::from_bloch([0.0; 3]),
        ];
        assert!(!monotone_screen(&g, &h, true));
        assert!(monotone_screen(&g, &h, false));
        assert!(monotone_screen(&h, &g, true));
    }
}
