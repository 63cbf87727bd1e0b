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

//! Pauli trace constraints for finite Pauli symmetry groups: for any Pauli
//! word P commuting with every group element,
//! tr(H P) = tr(H P) * prod_l eta_{k_l}, where eta_{k_l} is the signed
//! probability sum over the group (+ for sitewise commuting, - for
//! anticommuting). Either tr(H P) vanishes or every eta in the product is
//! one, which pins the transformation down to a two-outcome measurement.

use crate::mat::{pauli, Mat2};
use crate::state::{GramOperator, LocalOperator};
use num_complex::Complex64 as C64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EtaError {
    #[error("symmetry element {index} is not a Pauli word")]
    NotPauliGroup { index: usize },
    #[error("the Pauli word does not commute with symmetry element {index}")]
    NotCommuting { index: usize },
}

/// What the constraint forces for a candidate transformation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EtaForce {
    /// tr(H P) = 0 already: no constraint on the probabilities.
    NoConstraint,
    /// tr(H P) != 0: every eta in the product must equal one (only
    /// probabilities on sitewise-commuting elements may be nonzero).
    EtaProductOne,
}

/// Symbolic record of one Pauli constraint.
#[derive(Clone, Debug)]
pub struct EtaConstraint {
    pub word: [usize; 4],
    /// tr(H P) as the product of single-site traces.
    pub tr_hp: C64,
    /// For each site with a nontrivial Pauli, the +-1 signs per group
    /// element: eta_site(p) = sum_j signs[j] p_j.
    pub site_signs: Vec<(usize, Vec<f64>)>,
    pub force: EtaForce,
}

impl EtaConstraint {
    /// Evaluate prod_l eta_{k_l} at a probability vector.
    pub fn eta_product(&self, probs: &[f64]) -> f64 {
        self.site_signs
            .iter()
            .map(|(_, signs)| {
                signs
                    .iter()
                    .zip(probs.iter())
                    .map(|(s, p)| s * p)
                    .sum::<f64>()
            })
            .product()
    }

    /// Indices of group elements allowed a nonzero probability when the
    /// constraint forces the eta product to one.
    pub fn allowed_elements(&self, group_len: usize) -> Vec<usize> {
        (0..group_len)
            .filter(|&j| self.site_signs.iter().all(|(_, signs)| signs[j] > 0.0))
            .collect()
    }
}

/// Identify a 2x2 operator as a Pauli word letter (scalar times sigma_k).
pub fn as_pauli_letter(m: &Mat2) -> Option<(usize, C64)> {
    for k in 0..4 {
        let p = pauli(k);
        // scalar = tr(p^dag m)/2
        let mut s = C64::new(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                s += p.0[j][i].conj() * m.0[j][i];
            }
        }
        let s = s / C64::new(2.0, 0.0);
        if (*m - p.scale(s)).norm_fro() < 1e-9 * m.norm_fro().max(1.0) && s.norm() > 1e-12 {
            return Some((k, s));
        }
    }
    None
}

fn letters_commute(a: usize, b: usize) -> bool {
    a == 0 || b == 0 || a == b
}

/// Evaluate the constraint of Eq-type tr(H P) = tr(H P) prod eta for a
/// Pauli word P against a finite Pauli symmetry group.
pub fn eta_check(
    h: &[GramOperator; 4],
    group: &[LocalOperator],
    word: [usize; 4],
) -> Result<EtaConstraint, EtaError> {
    // group elements as Pauli letters
    let mut letters: Vec<[usize; 4]> = Vec::with_capacity(group.len());
    for (index, s) in group.iter().enumerate() {
        let mut ls = [0usize; 4];
        for p in 0..4 {
            match as_pauli_letter(&s.ops[p]) {
                Some((k, _)) => ls[p] = k,
                None => return Err(EtaError::NotPauliGroup { index }),
            }
        }
        letters.push(ls);
    }
    // commutation of P with each element: anticommuting site count must be
    // even
    for (index, ls) in letters.iter().enumerate() {
        let anti = (0..4)
            .filter(|&p| !letters_commute(ls[p], word[p]))
            .count();
        if anti % 2 == 1 {
            return Err(EtaError::NotCommuting { index });
        }
    }
    // tr(H P) = prod_l tr(H_l sigma_{k_l})
    let mut tr_hp = C64::new(1.0, 0.0);
    for p in 0..4 {
        let t: C64 = {
            let pm = pauli(word[p]);
            let mut s = C64::new(0.0, 0.0);
            for i in 0..2 {
                for j in 0..2 {
                    s += h[p].g.0[i][j] * pm.0[j][i];
                }
            }
            s
        };
        tr_hp *= t;
    }
    let mut site_signs = Vec::new();
    for p in 0..4 {
        if word[p] == 0 {
            continue;
        }
        let signs: Vec<f64> = letters
            .iter()
            .map(|ls| if letters_commute(ls[p], word[p]) { 1.0 } else { -1.0 })
            .collect();
        site_signs.push((p, signs));
    }
    let force = if tr_hp.norm() > 1e-10 {
        EtaForce::EtaProductOne
    } else {
        EtaForce::NoConstraint
    };
    Ok(EtaConstraint {
        word,
        tr_hp,
        site_signs,
        force,
    })
}

/// Direct evaluation of tr(H (x)_l E_l^dag(P)): the per-site averaged word,
/// i.e. prod_l tr(H_l sum_j p_j s_l^dag sigma_{k_l} s_l). The symbolic eta
/// product times tr(H P) must reproduce this exactly.
pub fn direct_pauli_average(
    h: &[GramOperator; 4],
    group: &[LocalOperator],
    probs: &[f64],
    word: [usize; 4],
) -> C64 {
    let mut total = C64::new(1.0, 0.0);
    for p in 0..4 {
        let mut avg = Mat2::zero();
        for (s, &pj) in group.iter().zip(probs.iter()) {
            let m = s.ops[p].adjoint() * pauli(word[p]) * s.ops[p];
            avg = avg + m.scale(C64::new(pj, 0.0));
        }
        let mut t = C64::new(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                t += h[p].g.0[i][j] * avg.0[j][i];
            }
        }
        total *= t;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::GramOperator;

    fn uniform_pauli_group() -> Vec<LocalOperator> {
        (0..4)
            .map(|k| LocalOperator::uniform(pauli(k)))
            .collect()
    }

    #[test]
    fn generic_group_forces_two_outcome() {
        // P = sz sz 1 1external, H with nonzero z components on parties 1, 2
        let h = [
            GramOperator::from_bloch([0.0, 0.0, 0.2]),
            GramOperator::from_bloch([0.0, 0.0, 0.1]),
            GramOperator::from_bloch([0.0, 0.0, 0.0]),
            GramOperator::from_bloch([0.0, 0.0, 0.0]),
        ];
        let c = eta_check(&h, &uniform_pauli_group(), [3, 3, 0, 0]).unwrap();
        assert_eq!(c.force, EtaForce::EtaProductOne);
        // eta_z = p0 + p3 - p1 - p2 on both sites; allowed elements: 1, sz
        assert_eq!(c.allowed_elements(4), vec![0, 3]);
        // symbolic vs definition: eta = p0 + p3 - p1 - p2
        let probs = [0.4, 0.3, 0.2, 0.1];
        let eta = 0.4 + 0.1 - 0.3 - 0.2;
        assert!((c.eta_product(&probs) - eta * eta).abs() < 1e-15);
    }

    #[test]
    fn mixed_h_gives_no_constraint() {
        let h = [GramOperator::from_bloch([0.0; 3]); 4];
        let c = eta_check(&h, &uniform_pauli_group(), [1, 1, 0, 0]).unwrap();
        assert_eq!(c.force, EtaForce::NoConstraint);
    }

    #[test]
    fn non_commuting_word_rejected() {
        let h = [GramOperator::from_bloch([0.0; 3]); 4];
        // sx on exactly one site anticommutes with sz^4
        let err = eta_check(&h, &uniform_pauli_group(), [1, 0, 0, 0]);
        assert!(matches!(err, Err(EtaError::NotCommuting { .. })));
    }

    #[test]
    fn symbolic_matches_direct_average() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(51);
        let group = uniform_pauli_group();
        for _ in 0..20 {
            let h = [
                GramOperator::from_bloch([rng.gen::<f64>() * 0.3, 0.0, rng.gen::<f64>() * 0.3]),
                GramOperator::from_bloch([0.0, rng.gen::<f64>() * 0.3, rng.gen::<f64>() * 0.2]),
                GramOperator::from_bloch([0.1, 0.1, 0.1]),
                GramOperator::from_bloch([0.0, 0.0, 0.25]),
            ];
            let mut probs = [rng.gen::<f64>(), rng.gen(), rng.gen(), rng.gen()];
            let s: f64 = probs.iter().sum();
            for p in probs.iter_mut() {
                *p /= s;
            }
            for word in [[3usize, 3, 0, 0], [0, 0, 2, 2], [1, 1, 1, 1], [3, 3, 3, 3]] {
                let c = eta_check(&h, &group, word).unwrap();
                let direct = direct_pauli_average(&h, &group, &probs, word);
                let symbolic = c.tr_hp * C64::new(c.eta_product(&probs), 0.0);
                assert!(
                    (direct - symbolic).norm() < 1e-12,
                    "word {word:?}: {direct} vs {symbolic}"
                );
            }
        }
    }
}
