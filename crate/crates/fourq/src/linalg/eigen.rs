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

//! Jordan structure detection for 4x4 complex matrices.
//!
//! Eigenvalues come from the companion quartic. Near a defective eigenvalue
//! the individual roots are only accurate to eps^(1/d), so multiplicities are
//! decided by scoring every clustering of the four roots: cluster means are
//! refined to machine precision through the power-sum equations
//! sum_i m_i l_i^k = tr(M^k), and the block structure inside each eigenvalue
//! is read off the nullity sequence of (M - l)^k.

use super::quartic::eigenvalues;
use super::svd::{nullspace4, svd4};
use crate::mat::{cr, Mat4, ONE, ZC};
use num_complex::Complex64 as C64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("rank decisions ambiguous at tolerance (margin {margin:.3e})")]
    IllConditioned { margin: f64 },
    #[error("structure detection failed at tolerance: {0}")]
    Degenerate(String),
    #[error("input matrix is not symmetric: |A - A^T| = {0:.3e}")]
    NotSymmetric(f64),
    #[error("matrix is singular")]
    Singular,
}

/// One Jordan block: size and eigenvalue.
#[derive(Clone, Copy, Debug)]
pub struct JordanBlock {
    pub size: usize,
    pub eigenvalue: C64,
}

/// Jordan structure of a 4x4 matrix; blocks in canonical order.
#[derive(Clone, Debug)]
pub struct JordanStructure {
    pub blocks: Vec<JordanBlock>,
    /// Smallest decision margin encountered while detecting the structure
    /// (ratio between kept/dropped singular values and the threshold).
    pub margin: f64,
}

impl JordanStructure {
    /// Canonical block order: |eigenvalue| descending, then arg in [0, 2pi)
    /// ascending, then block size descending.
    pub fn canonicalize(&mut self) {
        self.blocks.sort_by(|a, b| {
            let ma = a.eigenvalue.norm();
            let mb = b.eigenvalue.norm();
            if (ma - mb).abs() > 1e-12 * (1.0 + ma.max(mb)) {
                return mb.partial_cmp(&ma).unwrap();
            }
            let aa = arg_2pi(a.eigenvalue);
            let ab = arg_2pi(b.eigenvalue);
            if (aa - ab).abs() > 1e-12 {
                return aa.partial_cmp(&ab).unwrap();
            }
            b.size.cmp(&a.size)
        });
    }

    /// Multiset of block sizes, descending.
    pub fn shape(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.blocks.iter().map(|b| b.size).collect();
        s.sort_unstable_by(|a, b| b.cmp(a));
        s
    }

    /// Eigenvalues with algebraic multiplicity.
    pub fn eigenvalue_multiset(&self) -> Vec<C64> {
        let mut out = Vec::new();
        for b in &self.blocks {
            for _ in 0..b.size {
                out.push(b.eigenvalue);
            }
        }
        out
    }

    /// Structural equality at tolerance: same shapes and matching
    /// eigenvalues blockwise after canonical ordering.
    pub fn approx_eq(&self, other: &JordanStructure, tol: f64) -> bool {
        if self.blocks.len() != other.blocks.len() {
            return false;
        }
        self.blocks.iter().zip(&other.blocks).all(|(a, b)| {
            a.size == b.size && (a.eigenvalue - b.eigenvalue).norm() <= tol
        })
    }
}

fn arg_2pi(z: C64) -> f64 {
    let a = z.arg();
    if a < -1e-14 {
        a + std::f64::consts::TAU
    } else {
        a.max(0.0)
    }
}

/// Restricted-growth strings: all 15 set partitions of {0,1,2,3}.
fn set_partitions4() -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for a1 in 0..=1usize {
        let m1 = a1;
        for a2 in 0..=(m1 + 1) {
            let m2 = m1.max(a2);
            for a3 in 0..=(m2 + 1) {
                out.push(vec![0, a1, a2, a3]);
            }
        }
    }
    out
}

/// Newton refinement of candidate eigenvalues through power sums.
/// `mults[i]` is the algebraic multiplicity of `vals[i]`.
fn refine_power_sums(vals: &mut [C64], mults: &[usize], traces: &[C64; 4]) -> bool {
    let k = vals.len();
    for _ in 0..60 {
        // residual F_j = sum_i m_i v_i^(j+1) - tr(M^(j+1)), j = 0..k-1
        let mut f = vec![ZC; k];
        for (j, fj) in f.iter_mut().enumerate() {
            let mut s = ZC;
            for (i, v) in vals.iter().enumerate() {
                s += cr(mults[i] as f64) * v.powu(j as u32 + 1);
            }
            *fj = s - traces[j];
        }
        let res: f64 = f.iter().map(|z| z.norm()).sum();
        if res < 1e-15 {
            return true;
        }
        // Jacobian J[j][i] = (j+1) m_i v_i^j ; solve J dx = -F (small dense)
        let mut jac = vec![vec![ZC; k]; k];
        for j in 0..k {
            for i in 0..k {
                jac[j][i] = cr((j + 1) as f64 * mults[i] as f64) * vals[i].powu(j as u32);
            }
        }
        let dx = match solve_dense(&mut jac, &f) {
            Some(d) => d,
            None => return false,
        };
        let mut step = 0.0f64;
        for i in 0..k {
            vals[i] -= dx[i];
            step += dx[i].norm();
        }
        if step < 1e-16 {
            return true;
        }
        if step > 10.0 {
            return false; // diverged; wrong clustering
        }
    }
    true
}

/// Dense complex linear solve with partial pivoting (shared helper).
pub fn solve_dense_pub(a: &mut [Vec<C64>], b: &[C64]) -> Option<Vec<C64>> {
    solve_dense(a, b)
}

fn solve_dense(a: &mut [Vec<C64>], b: &[C64]) -> Option<Vec<C64>> {
    let n = b.len();
    let mut x: Vec<C64> = b.to_vec();
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r][col].norm() > a[piv][col].norm() {
                piv = r;
            }
        }
        if a[piv][col].norm() < 1e-14 {
            return None;
        }
        a.swap(col, piv);
        x.swap(col, piv);
        let d = a[col][col];
        for j in col..n {
            a[col][j] /= d;
        }
        x[col] /= d;
        for r in 0..n {
            if r != col && a[r][col].norm() > 0.0 {
                let f = a[r][col];
                for j in col..n {
                    let v = a[col][j];
                    a[r][j] -= f * v;
                }
                let xc = x[col];
                x[r] -= f * xc;
            }
        }
    }
    Some(x)
}

fn mat_pow(p: &Mat4, k: usize) -> Mat4 {
    let mut out = Mat4::identity();
    for _ in 0..k {
        out = out * *p;
    }
    out
}

struct Candidate {
    structure: JordanStructure,
    groups: usize,
    spread: f64,
    margin: f64,
}

/// Detect the Jordan structure of `m`.
///
/// `tol` is the relative degeneracy tolerance (the crate default is 1e-7);
/// it is applied after scaling `m` to unit Frobenius norm.
pub fn eigenstructure_tol(m: &Mat4, tol: f64) -> Result<JordanStructure, LinalgError> {
    let scale = m.norm_fro().max(1e-300);
    let ms = m.scale(cr(1.0 / scale));
    let roots = eigenvalues(&ms);
    let mut traces = [ZC; 4];
    let mut p = ms;
    for t in traces.iter_mut() {
        *t = p.trace();
        p = p * ms;
    }

    let mut candidates: Vec<Candidate> = Vec::new();
    for assign in set_partitions4() {
        let ngroups = assign.iter().max().unwrap() + 1;
        let mut vals = vec![ZC; ngroups];
        let mut mults = vec![0usize; ngroups];
        let mut spread = 0.0f64;
        for (ri, &g) in assign.iter().enumerate() {
            vals[g] += roots[ri];
            mults[g] += 1;
        }
        for g in 0..ngroups {
            vals[g] /= cr(mults[g] as f64);
        }
        for (ri, &g) in assign.iter().enumerate() {
            spread = spread.max((roots[ri] - vals[g]).norm());
        }
        if !refine_power_sums(&mut vals, &mults, &traces) {
            continue;
        }
        // reject clusterings whose refined values collide (they duplicate a
        // coarser clustering)
        let mut collide = false;
        for i in 0..ngroups {
            for j in (i + 1)..ngroups {
                if (vals[i] - vals[j]).norm() < tol {
                    collide = true;
                }
            }
        }
        if collide {
            continue;
        }
        // block structure per eigenvalue from nullity sequences
        let mut blocks = Vec::new();
        let mut margin = f64::INFINITY;
        let mut ok = true;
        for g in 0..ngroups {
            let lam = vals[g];
            let mult = mults[g];
            let gap = (0..ngroups)
                .filter(|&j| j != g)
                .map(|j| (vals[j] - vals[g]).norm())
                .fold(f64::INFINITY, f64::min);
            let pm = ms - Mat4::identity().scale(lam);
            let mut prev_nullity = 0usize;
            let mut sizes_ge = Vec::new(); // b_k = number of blocks with size >= k
            for k in 1..=mult {
                let pk = mat_pow(&pm, k);
                let tau = threshold(tol, gap, k);
                let s = svd4(&pk).s;
                let nullity = s.iter().filter(|&&x| x <= tau).count();
                // margin bookkeeping
                for &sv in &s {
                    let r = if sv <= tau { tau / sv.max(1e-300) } else { sv / tau };
                    margin = margin.min(r);
                }
                if nullity < prev_nullity || nullity > mult {
                    ok = false;
                    break;
                }
                sizes_ge.push(nullity - prev_nullity);
                prev_nullity = nullity;
            }
            if !ok || prev_nullity != mult {
                ok = false;
                break;
            }
            // b_k must be a partition profile: positive at k = 1 and
            // non-increasing in k
            if sizes_ge.is_empty()
                || sizes_ge[0] == 0
                || sizes_ge.windows(2).any(|w| w[1] > w[0])
            {
                ok = false;
                break;
            }
            // blocks of size exactly k
            for k in 1..=sizes_ge.len() {
                let ge_k = sizes_ge[k - 1];
                let ge_k1 = if k < sizes_ge.len() { sizes_ge[k] } else { 0 };
                for _ in 0..ge_k.saturating_sub(ge_k1) {
                    blocks.push(JordanBlock {
                        size: k,
                        eigenvalue: lam * cr(scale),
                    });
                }
            }
        }
        if !ok {
            continue;
        }
        let mut st = JordanStructure { blocks, margin };
        st.canonicalize();
        candidates.push(Candidate {
            structure: st,
            groups: ngroups,
            spread,
            margin,
        });
    }

    if candidates.is_empty() {
        return Err(LinalgError::Degenerate(
            "no clustering of the spectrum yields a consistent block structure".into(),
        ));
    }
    // most-degenerate-first among clear-margin candidates: fewest eigenvalue
    // groups, then tightest clusters; fall back to the best margin overall
    let order = |a: &Candidate, b: &Candidate| {
        a.groups
            .cmp(&b.groups)
            .then(a.spread.partial_cmp(&b.spread).unwrap_or(std::cmp::Ordering::Equal))
    };
    let strong: Vec<&Candidate> = candidates.iter().filter(|c| c.margin >= 3.0).collect();
    if let Some(best) = strong.iter().copied().min_by(|a, b| order(a, b)) {
        return Ok(best.structure.clone());
    }
    let best = candidates
        .iter()
        .max_by(|a, b| a.margin.partial_cmp(&b.margin).unwrap_or(std::cmp::Ordering::Equal))
        .unwrap();
    if best.margin < 1.3 {
        return Err(LinalgError::IllConditioned {
            margin: best.margin,
        });
    }
    Ok(best.structure.clone())
}

fn threshold(tol: f64, gap: f64, k: usize) -> f64 {
    if gap.is_finite() {
        let g = (gap / 3.0).powi(k as i32);
        g.min(tol).max(1e-12)
    } else {
        tol.max(1e-12)
    }
}

/// Jordan chains for a matrix with known structure: returns V (columns are
/// chain vectors in the structure's block order) such that M V = V J.
pub fn jordan_chains(m: &Mat4, st: &JordanStructure) -> Result<Mat4, LinalgError> {
    let scale = m.norm_fro().max(1e-300);
    let ms = m.scale(cr(1.0 / scale));

    // group blocks by eigenvalue (in structure order)
    let mut cols: Vec<(usize, Vec<[C64; 4]>)> = Vec::new(); // (block idx, chain)
    let mut used_eigvecs: Vec<([C64; 4], C64)> = Vec::new(); // per eigenvalue

    for (bi, b) in st.blocks.iter().enumerate() {
        let lam = b.eigenvalue / cr(scale);
        let pm = ms - Mat4::identity().scale(lam);
        // chain links must use the unscaled matrix so that M V = V J holds
        // with unit superdiagonal entries
        let pm_raw = *m - Mat4::identity().scale(b.eigenvalue);
        let d = b.size;
        let pk = mat_pow(&pm, d);
        let pk1 = mat_pow(&pm, d - 1);
        // tolerant nullspaces
        let tau = 2e-7;
        let nd = nullspace4(&pk, tau);
        if nd.is_empty() {
            return Err(LinalgError::Degenerate("empty nullspace for chain".into()));
        }
        // previously used eigenvectors at this eigenvalue
        let prev: Vec<[C64; 4]> = used_eigvecs
            .iter()
            .filter(|(_, l)| (*l - lam).norm() < 1e-8)
            .map(|(v, _)| *v)
            .collect();

        // candidate top vectors: basis of N_d plus random combinations
        let mut best: Option<([C64; 4], f64)> = None;
        let mut candidates: Vec<[C64; 4]> = nd.clone();
        let mut rngstate = 0x9e3779b97f4a7c15u64.wrapping_add(bi as u64);
        for _ in 0..16 {
            let mut v = [ZC; 4];
            for base in &nd {
                rngstate = rngstate.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let a = ((rngstate >> 16) as f64 / (1u64 << 48) as f64) - 0.5;
                rngstate = rngstate.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let bq = ((rngstate >> 16) as f64 / (1u64 << 48) as f64) - 0.5;
                for i in 0..4 {
                    v[i] += base[i] * C64::new(a, bq);
                }
            }
            candidates.push(v);
        }
        for cand in candidates {
            let n = vnorm(&cand);
            if n < 1e-12 {
                continue;
            }
            let w = vscale(&cand, 1.0 / n);
            // must stick out of N_{d-1}
            let top = pk1.mul_vec(&w);
            let mut e = top;
            for p in &prev {
                let ip = vdot(p, &e);
                for i in 0..4 {
                    e[i] -= p[i] * ip;
                }
            }
            let score = vnorm(&e);
            if best.as_ref().map(|(_, s)| score > *s).unwrap_or(true) {
                best = Some((w, score));
            }
        }
        let (vd, score) = best.ok_or(LinalgError::Degenerate("no chain vector".into()))?;
        if score < 1e-9 {
            return Err(LinalgError::Degenerate(format!(
                "chain vector nearly dependent (score {score:.2e})"
            )));
        }
        let mut chain = vec![vd];
        for _ in 1..d {
            let prev_v = chain.last().unwrap();
            chain.push(pm_raw.mul_vec(prev_v));
        }
        chain.reverse(); // v_1 (eigenvector) first
        let ev = chain[0];
        let evn = vnorm(&ev);
        used_eigvecs.push((vscale(&ev, 1.0 / evn), lam));
        cols.push((bi, chain));
    }

    let mut v = Mat4::zero();
    let mut col = 0;
    for (_, chain) in cols {
        for vec in chain {
            for i in 0..4 {
                v.0[i][col] = vec[i];
            }
            col += 1;
        }
    }
    Ok(v)
}

/// Jordan matrix J for a structure (eigenvalues on the diagonal, ones on the
/// superdiagonal inside each block), in the structure's block order.
pub fn jordan_matrix(st: &JordanStructure) -> Mat4 {
    let mut j = Mat4::zero();
    let mut pos = 0;
    for b in &st.blocks {
        for k in 0..b.size {
            j.0[pos + k][pos + k] = b.eigenvalue;
            if k + 1 < b.size {
                j.0[pos + k][pos + k + 1] = ONE;
            }
        }
        pos += b.size;
    }
    j
}

fn vnorm(v: &[C64; 4]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
fn vscale(v: &[C64; 4], s: f64) -> [C64; 4] {
    let mut out = *v;
    for z in out.iter_mut() {
        *z *= cr(s);
    }
    out
}
fn vdot(a: &[C64; 4], b: &[C64; 4]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Matrix square root of a nonsingular matrix through the Denman-Beavers
/// iteration. The spectrum is first rotated away from the negative real
/// axis, so a valid primary square root exists for any invertible input; all
/// iterates are rational functions of the input, so the result commutes with
/// everything the input commutes with.
pub fn matrix_sqrt(m: &Mat4) -> Result<Mat4, LinalgError> {
    let eigs = eigenvalues(m);
    let maxmod = eigs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if eigs.iter().any(|z| z.norm() < 1e-13 * maxmod.max(1e-300)) {
        return Err(LinalgError::Singular);
    }
    // rotation angle placing the spectrum's arguments away from pi
    let args: Vec<f64> = eigs.iter().map(|z| arg_2pi(*z)).collect();
    let mut cut = 0.0;
    let mut best_dist = -1.0;
    for k in 0..128 {
        let theta = k as f64 / 128.0 * std::f64::consts::TAU;
        let dist = args
            .iter()
            .map(|a| {
                let mut d = (a - theta).abs() % std::f64::consts::TAU;
                if d > std::f64::consts::PI {
                    d = std::f64::consts::TAU - d;
                }
                d
            })
            .fold(f64::INFINITY, f64::min);
        if dist > best_dist {
            best_dist = dist;
            cut = theta;
        }
    }
    // rotate the cut direction to the negative real axis
    let phase = C64::from_polar(1.0, std::f64::consts::PI - cut);
    let mrot = m.scale(phase);
    let mut x = mrot;
    let mut y = Mat4::identity();
    for _ in 0..100 {
        let xinv = x.inv().ok_or(LinalgError::Singular)?;
        let yinv = y.inv().ok_or(LinalgError::Singular)?;
        let xn = (x + yinv).scale(cr(0.5));
        let yn = (y + xinv).scale(cr(0.5));
        let step = (xn - x).norm_fro();
        x = xn;
        y = yn;
        if step < 1e-16 * x.norm_fro().max(1e-300) {
            break;
        }
    }
    // undo the rotation: sqrt(M) = sqrt(phase^-1) * sqrt(phase M)
    let unrot = (ONE / phase).sqrt();
    let mut s = x.scale(unrot);
    // one Newton polish step against the original matrix
    for _ in 0..4 {
        if let Some(sinv) = s.inv() {
            s = (s + *m * sinv).scale(cr(0.5));
        }
    }
    if !s.is_finite() {
        return Err(LinalgError::Singular);
    }
    Ok(s)
}

/// Matrix exponential by scaling and squaring (used for planting random
/// orthogonal matrices in tests and for a few continuous symmetries).
pub fn expm(m: &Mat4) -> Mat4 {
    let norm = m.norm_fro();
    let k = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let ms = m.scale(cr(0.5f64.powi(k)));
    let mut term = Mat4::identity();
    let mut sum = Mat4::identity();
    for n in 1..30 {
        term = term * ms;
        term = term.scale(cr(1.0 / n as f64));
        sum = sum + term;
        if term.norm_fro() < 1e-18 {
            break;
        }
    }
    let mut out = sum;
    for _ in 0..k {
        out = out * out;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::c;

    #[test]
    fn distinct_diagonal() {
        let m = Mat4::diag([cr(1.0), cr(2.0), cr(3.0), cr(4.0)]);
        let st = eigenstructure_tol(&m, 1e-7).unwrap();
        assert_eq!(st.shape(), vec![1, 1, 1, 1]);
    }

    #[test]
    fn two_two_blocks() {
        // R2-style blocks are exercised through sjf tests; plain Jordan here
        let mut m = Mat4::diag([cr(2.0), cr(2.0), cr(5.0), cr(5.0)]);
        m[(0, 1)] = ONE;
        m[(2, 3)] = ONE;
        let st = eigenstructure_tol(&m, 1e-7).unwrap();
        assert_eq!(st.shape(), vec![2, 2]);
        let eigs = st.eigenvalue_multiset();
        assert!(eigs.iter().filter(|z| (*z - cr(2.0)).norm() < 1e-9).count() == 2);
    }

    #[test]
    fn four_block_nilpotent_plus_lambda() {
        let mut m = Mat4::diag([cr(1.5); 4]);
        m[(0, 1)] = ONE;
        m[(1, 2)] = ONE;
        m[(2, 3)] = ONE;
        let st = eigenstructure_tol(&m, 1e-7).unwrap();
        assert_eq!(st.shape(), vec![4]);
        assert!((st.blocks[0].eigenvalue - cr(1.5)).norm() < 1e-10);
    }

    #[test]
    fn similarity_invariance() {
        let mut j = Mat4::diag([cr(1.0), cr(1.0), cr(-0.5), cr(0.3)]);
        j[(0, 1)] = ONE;
        let v = Mat4([
            [cr(1.0), cr(0.3), c(0.0, 0.2), cr(0.0)],
            [cr(0.1), cr(1.2), cr(0.0), c(0.0, -0.4)],
            [cr(0.0), c(0.2, 0.2), cr(0.9), cr(0.25)],
            [c(0.3, -0.1), cr(0.0), cr(0.4), cr(1.1)],
        ]);
        let m = v * j * v.inv().unwrap();
        let st = eigenstructure_tol(&m, 1e-7).unwrap();
        assert_eq!(st.shape(), vec![2, 1, 1]);
    }

    #[test]
    fn chains_reproduce_jordan() {
        let mut j = Mat4::diag([cr(2.0), cr(2.0), cr(2.0), cr(7.0)]);
        j[(0, 1)] = ONE;
        j[(1, 2)] = ONE;
        let v0 = Mat4([
            [cr(1.0), cr(0.2), cr(0.1), c(0.0, 0.3)],
            [cr(0.0), cr(1.0), c(0.1, 0.1), cr(0.4)],
            [c(0.0, 0.5), cr(0.0), cr(1.0), cr(0.0)],
            [cr(0.2), cr(0.0), cr(0.3), cr(1.0)],
        ]);
        let m = v0 * j * v0.inv().unwrap();
        let st = eigenstructure_tol(&m, 1e-7).unwrap();
        assert_eq!(st.shape(), vec![3, 1]);
        let v = jordan_chains(&m, &st).unwrap();
        let jm = jordan_matrix(&st);
        let resid = (m * v - v * jm).norm_fro();
        assert!(resid < 1e-8, "residual {resid}");
    }

    #[test]
    fn sqrt_squares_back() {
        let m = Mat4([
            [c(2.0, 0.1), c(0.3, 0.0), ZC, ZC],
            [ZC, c(1.0, -0.4), c(0.0, 0.2), ZC],
            [ZC, ZC, c(3.0, 0.0), c(0.1, 0.1)],
            [c(0.05, 0.0), ZC, ZC, c(0.8, 0.8)],
        ]);
        let s = matrix_sqrt(&m).unwrap();
        assert!((s * s - m).norm_fro() < 1e-10);
    }

    #[test]
    fn expm_identity() {
        let e = expm(&Mat4::zero());
        assert!((e - Mat4::identity()).norm_fro() < 1e-15);
    }
}
