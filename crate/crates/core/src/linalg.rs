//! Dense kernels shared by the algebra and certificate layers: real Schur
//! wrapper, Bartels–Stewart Lyapunov solver, zero-cluster deflation and
//! spectrum matching.

use nalgebra::{DMatrix, Schur, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

const SCHUR_MAX_SWEEPS: usize = 500;
/// Relative deflation threshold of the QR iteration.
const SCHUR_EPS: f64 = 1e-13;

/// `m = q * t * q^T` with `t` upper quasi-triangular.
///
/// The QR iteration's deflation test is relative to neighbouring diagonal
/// entries, which stalls on nilpotent blocks (their diagonal stays zero) and
/// occasionally on clusters of defective eigenvalues. A few variants are
/// tried in turn: factoring `m + c I` with every eigenvalue pushed into the
/// right half plane, and a deflation threshold slightly above machine
/// precision. Each is an exact similarity, so the first that converges wins.
pub(crate) fn real_schur(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let n = m.nrows();
    let big = 2.0 * m.norm() + 1.0;
    for (shift, eps) in [(big, SCHUR_EPS), (0.0, SCHUR_EPS), (0.0, f64::EPSILON), (big, f64::EPSILON)] {
        let shifted = m + DMatrix::identity(n, n) * shift;
        if let Some(s) = Schur::try_new(shifted, eps, SCHUR_MAX_SWEEPS * n.max(1)) {
            let (q, mut t) = s.unpack();
            for i in 0..n {
                t[(i, i)] -= shift;
            }
            return Ok((q, t));
        }
    }
    Err(Error::NoConvergence(n))
}

/// Eigenvalues read off the diagonal blocks of the real Schur form.
pub fn eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let (_, t) = real_schur(m)?;
    let mut out = Vec::with_capacity(t.nrows());
    for (i, size) in quasi_blocks(&t) {
        if size == 1 {
            out.push(Complex64::new(t[(i, i)], 0.0));
            continue;
        }
        let (a, b, c, d) = (t[(i, i)], t[(i, i + 1)], t[(i + 1, i)], t[(i + 1, i + 1)]);
        let half_tr = 0.5 * (a + d);
        let disc = 0.25 * (a - d) * (a - d) + b * c;
        if disc >= 0.0 {
            let r = disc.sqrt();
            out.push(Complex64::new(half_tr + r, 0.0));
            out.push(Complex64::new(half_tr - r, 0.0));
        } else {
            let r = (-disc).sqrt();
            out.push(Complex64::new(half_tr, r));
            out.push(Complex64::new(half_tr, -r));
        }
    }
    Ok(out)
}

/// Extreme eigenvalues of a symmetric matrix, `(min, max)`.
pub fn symmetric_extremes(p: &DMatrix<f64>) -> (f64, f64) {
    if p.nrows() == 0 {
        return (f64::INFINITY, f64::NEG_INFINITY);
    }
    let ev = SymmetricEigen::new(p.clone()).eigenvalues;
    (ev.min(), ev.max())
}

/// Diagonal block layout `(start, size)` of a quasi-triangular matrix.
fn quasi_blocks(t: &DMatrix<f64>) -> Vec<(usize, usize)> {
    let n = t.nrows();
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)] != 0.0 {
            out.push((i, 2));
            i += 2;
        } else {
            out.push((i, 1));
            i += 1;
        }
    }
    out
}

/// Solves `P R + R^T P = Q` by reducing `R` to real Schur form and
/// back-substituting block by block. Returns the symmetrized solution.
pub fn solve_lyapunov(r: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = r.nrows();
    if q.nrows() != n || q.ncols() != n || r.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: q.nrows(),
        });
    }
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let (u, t) = real_schur(r)?;
    let c = u.transpose() * q * &u;
    let x = solve_quasi_triangular_lyapunov(&t, &c)?;
    let p = &u * x * u.transpose();
    Ok((&p + p.transpose()) * 0.5)
}

/// `T^T X + X T = C` for upper quasi-triangular `T`.
fn solve_quasi_triangular_lyapunov(t: &DMatrix<f64>, c: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = t.nrows();
    let blocks = quasi_blocks(t);
    // eigenvalue pairs with λ_i + λ_j this close to zero make the equation singular
    let sep_floor = 1e-12 * t.norm().max(1.0);
    let mut x = DMatrix::<f64>::zeros(n, n);
    for &(si, p) in &blocks {
        for &(sj, q) in &blocks {
            let mut rhs = c.view((si, sj), (p, q)).into_owned();
            for &(sk, r) in blocks.iter().take_while(|b| b.0 < si) {
                rhs -= t.view((sk, si), (r, p)).transpose() * x.view((sk, sj), (r, q));
            }
            for &(sk, r) in blocks.iter().take_while(|b| b.0 < sj) {
                rhs -= x.view((si, sk), (p, r)) * t.view((sk, sj), (r, q));
            }
            let tii = t.view((si, si), (p, p));
            let tjj = t.view((sj, sj), (q, q));
            // vec(A X) = (I ⊗ A) vec X ; vec(X B) = (B^T ⊗ I) vec X, column-major
            let dim = p * q;
            let mut k = DMatrix::<f64>::zeros(dim, dim);
            for col in 0..q {
                for a in 0..p {
                    for b in 0..p {
                        k[(col * p + a, col * p + b)] += tii[(b, a)];
                    }
                }
            }
            for a in 0..q {
                for b in 0..q {
                    for row in 0..p {
                        k[(a * p + row, b * p + row)] += tjj[(b, a)];
                    }
                }
            }
            if k.clone().singular_values().min() <= sep_floor {
                return Err(Error::SingularLyapunov);
            }
            let v = nalgebra::DVector::from_column_slice(rhs.as_slice());
            let sol = k.lu().solve(&v).ok_or(Error::SingularLyapunov)?;
            if sol.iter().any(|s| !s.is_finite()) {
                return Err(Error::SingularLyapunov);
            }
            x.view_mut((si, sj), (p, q))
                .copy_from_slice(sol.as_slice());
        }
    }
    Ok(x)
}

/// Orthogonal reduction `Q^T A Q = [[T11, T12], [~0, T22]]` where `T11`
/// (size `algebraic`) carries every zero eigenvalue and `T22` is nonsingular.
/// Built by repeatedly splitting off an orthonormal null-space basis, so it
/// stays well defined when the zero eigenvalue is defective.
pub(crate) struct ZeroDeflation {
    pub q: DMatrix<f64>,
    pub algebraic: usize,
    pub geometric: usize,
}

pub(crate) fn deflate_zero(a: &DMatrix<f64>, zero_tol: f64) -> Result<ZeroDeflation> {
    let n = a.nrows();
    let mut q = DMatrix::<f64>::identity(n, n);
    let mut current = a.clone();
    let mut offset = 0;
    let mut geometric = None;
    while current.nrows() > 0 {
        let m = current.nrows();
        let svd = current.clone().svd(false, true);
        let sv = &svd.singular_values;
        let ambiguous: Vec<f64> = sv
            .iter()
            .copied()
            .filter(|&s| s >= zero_tol / 10.0 && s <= zero_tol * 10.0)
            .collect();
        if !ambiguous.is_empty() {
            return Err(Error::AmbiguousZeroCluster {
                zero_tol,
                values: ambiguous,
            });
        }
        let v = svd.v_t.expect("requested right singular vectors").transpose();
        let (null, range): (Vec<usize>, Vec<usize>) = (0..m).partition(|&i| sv[i] < zero_tol);
        geometric.get_or_insert(null.len());
        if null.is_empty() {
            break;
        }
        let order: Vec<usize> = null.iter().chain(range.iter()).copied().collect();
        let w = v.select_columns(&order);
        let k = null.len();
        let tail = q.columns(offset, m).into_owned() * &w;
        q.columns_mut(offset, m).copy_from(&tail);
        let rotated = w.transpose() * &current * &w;
        current = rotated.view((k, k), (m - k, m - k)).into_owned();
        offset += k;
    }
    Ok(ZeroDeflation {
        q,
        algebraic: offset,
        geometric: geometric.unwrap_or(0),
    })
}

/// Single-linkage clusters of eigenvalues within `radius`, each replaced by
/// its cluster mean. A multiple eigenvalue perturbed by rounding splits into
/// a ring whose mean is far more accurate than any member.
pub fn cluster_means(values: &[Complex64], radius: f64) -> Vec<Complex64> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() < radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut sums = vec![(Complex64::new(0.0, 0.0), 0usize); n];
    for i in 0..n {
        let r = find(&mut parent, i);
        sums[r].0 += values[i];
        sums[r].1 += 1;
    }
    (0..n)
        .map(|i| {
            let r = find(&mut parent, i);
            sums[r].0 / sums[r].1 as f64
        })
        .collect()
}

/// Largest deviation after pairing two equally sized multisets, each value
/// matched to its nearest unmatched partner. `None` if the sizes differ.
pub fn pair_spectra(a: &[Complex64], b: &[Complex64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for &x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, &y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))?;
        used[j] = true;
        worst = worst.max(d);
    }
    Some(worst)
}
