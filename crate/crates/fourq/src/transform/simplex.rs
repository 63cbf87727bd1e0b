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

//! Dense phase-1 simplex for small equality-constrained feasibility
//! problems: find x >= 0 with A x = b. Bland's rule keeps degenerate bases
//! from cycling; the systems here are tiny (tens of columns).

/// Outcome of the feasibility solve.
pub struct LpOutcome {
    pub feasible: bool,
    pub x: Vec<f64>,
    /// Optimal value of the artificial objective (0 when feasible).
    pub artificial_sum: f64,
}

pub fn lp_feasible(a: &[Vec<f64>], b: &[f64], tol: f64) -> LpOutcome {
    let m = a.len();
    let n = if m > 0 { a[0].len() } else { 0 };
    // scale rows and flip signs so the right-hand side is nonnegative
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut rhs: Vec<f64> = Vec::with_capacity(m);
    for i in 0..m {
        let scale = a[i]
            .iter()
            .map(|x| x.abs())
            .fold(b[i].abs(), f64::max)
            .max(1e-300);
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        rows.push(a[i].iter().map(|x| sign * x / scale).collect());
        rhs.push(sign * b[i] / scale);
    }
    // tableau: columns = n structural + m artificial, плюс rhs
    let total = n + m;
    let mut t: Vec<Vec<f64>> = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = vec![0.0; total + 1];
        row[..n].copy_from_slice(&rows[i]);
        row[n + i] = 1.0;
        row[total] = rhs[i];
        t.push(row);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    // phase-1 objective: minimize sum of artificials -> reduced-cost row
    let mut obj = vec![0.0; total + 1];
    for i in 0..m {
        for j in 0..=total {
            obj[j] += t[i][j];
        }
    }
    let piv_tol = tol.max(1e-12);
    let mut iter = 0usize;
    let max_iter = 20_000usize;
    loop {
        iter += 1;
        if iter > max_iter {
            break;
        }
        // Bland: entering = smallest index with positive objective
        // coefficient (we maximize -sum(artificials) ... here obj holds the
        // sum expressed in nonbasic variables, reduce while any coef > tol)
        let mut enter = None;
        for (j, &c) in obj.iter().enumerate().take(total) {
            if basis.contains(&j) {
                continue;
            }
            if c > piv_tol {
                enter = Some(j);
                break;
            }
        }
        let enter = match enter {
            Some(j) => j,
            None => break,
        };
        // ratio test, Bland tie-break by smallest basis variable index
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            if t[i][enter] > piv_tol {
                let ratio = t[i][total] / t[i][enter];
                match leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - 1e-15
                            || ((ratio - lr).abs() <= 1e-15 && basis[i] < basis[li])
                        {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let (leave, _) = match leave {
            Some(x) => x,
            None => break, // unbounded cannot happen in phase 1
        };
        // pivot
        let p = t[leave][enter];
        for j in 0..=total {
            t[leave][j] /= p;
        }
        for i in 0..m {
            if i != leave {
                let f = t[i][enter];
                if f != 0.0 {
                    for j in 0..=total {
                        t[i][j] -= f * t[leave][j];
                    }
                }
            }
        }
        let f = obj[enter];
        if f != 0.0 {
            for j in 0..=total {
                obj[j] -= f * t[leave][j];
            }
        }
        basis[leave] = enter;
    }
    // artificial sum = value of remaining artificial basics
    let mut art = 0.0;
    let mut x = vec![0.0; n];
    for i in 0..m {
        let v = t[i][total].max(0.0);
        if basis[i] < n {
            x[basis[i]] = v;
        } else {
            art += v;
        }
    }
    LpOutcome {
        feasible: art <= tol * (m as f64).sqrt(),
        x,
        artificial_sum: art,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn feasible_simple() {
        // x1 + x2 = 1, x1 - x2 = 0 -> x = (1/2, 1/2)
        let a = vec![vec![1.0, 1.0], vec![1.0, -1.0]];
        let b = vec![1.0, 0.0];
        let out = lp_feasible(&a, &b, 1e-9);
        assert!(out.feasible);
        assert!((out.x[0] - 0.5).abs() < 1e-9);
        assert!((out.x[1] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn infeasible_negative() {
        // x1 = -1 with x1 >= 0
        let a = vec![vec![1.0]];
        let b = vec![-1.0];
        let out = lp_feasible(&a, &b, 1e-9);
        assert!(!out.feasible);
    }

    #[test]
    fn infeasible_conflicting() {
        let a = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        let b = vec![1.0, 2.0];
        let out = lp_feasible(&a, &b, 1e-9);
        assert!(!out.feasible);
    }

    #[test]
    fn degenerate_feasible() {
        let a = vec![
            vec![1.0, 2.0, 3.0, 1.0],
            vec![2.0, 4.0, 6.0, 2.0],
            vec![0.0, 1.0, 0.0, 1.0],
        ];
        let b = vec![2.0, 4.0, 1.0];
        let out = lp_feasible(&a, &b, 1e-9);
        assert!(out.feasible);
        // verify A x = b
        for (row, want) in a.iter().zip(b.iter()) {
            let got: f64 = row.iter().zip(out.x.iter()).map(|(r, x)| r * x).sum();
            assert!((got - want).abs() < 1e-8);
        }
    }
}
