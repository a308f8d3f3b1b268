//! Sparse Hermitian storage, banded Cholesky, dense Jacobi diagonalisation
//! and a restarted block Krylov solver for extremal eigenvalues.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::{czero, dot, norm2, Real, C};

/// Hermitian matrix in compressed-row storage holding both triangles.
#[derive(Clone, Debug)]
pub struct SparseHermitian<T> {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C<T>>,
}

impl<T: Real> SparseHermitian<T> {
    /// Builds the matrix from `(row, col, value)` triplets; duplicates are
    /// summed. The caller supplies both `(i, j)` and `(j, i)` entries.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, C<T>)>) -> Self {
        triplets.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<C<T>> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in triplets {
            if last == Some((i, j)) {
                let k = vals.len() - 1;
                vals[k] += v;
            } else {
                cols.push(j);
                vals.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, C<T>)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[range.clone()]
            .iter()
            .copied()
            .zip(self.vals[range].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> C<T> {
        self.row(i)
            .find(|&(c, _)| c == j)
            .map_or(czero(), |(_, v)| v)
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.n).map(|i| self.get(i, i).re).collect()
    }

    /// All stored entries as `(row, col, value)`.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C<T>)> + '_ {
        (0..self.n).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[C<T>], y: &mut [C<T>]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            let mut acc = czero();
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *yi = acc;
        }
    }

    pub fn mul(&self, x: &[C<T>]) -> Vec<C<T>> {
        let mut y = vec![czero(); self.n];
        self.apply(x, &mut y);
        y
    }

    /// `xᴴ A x`, real for Hermitian `A`.
    pub fn quadratic(&self, x: &[C<T>]) -> T {
        dot(x, &self.mul(x)).re
    }

    /// Largest `|entry(i,j) - conj(entry(j,i))|`.
    pub fn hermitian_defect(&self) -> T {
        self.triplets()
            .map(|(i, j, v)| (v - self.get(j, i).conj()).norm())
            .fold(T::zero(), T::max)
    }

    /// Largest `|i - j|` over stored entries.
    pub fn bandwidth(&self) -> usize {
        self.triplets()
            .map(|(i, j, _)| i.abs_diff(j))
            .max()
            .unwrap_or(0)
    }

    /// Copy with `diag` added to the diagonal.
    pub fn add_diagonal(&self, diag: &[T]) -> Self {
        let mut t: Vec<_> = self.triplets().collect();
        t.extend(diag.iter().enumerate().map(|(i, &d)| (i, i, C::new(d, T::zero()))));
        Self::from_triplets(self.n, t)
    }
}

/// Cholesky factor `A - σ D = L Lᴴ` of a Hermitian band matrix.
#[derive(Clone, Debug)]
pub struct BandCholesky<T> {
    n: usize,
    kb: usize,
    // Row i stores L[i][i-kb ..= i]; entries left of column 0 stay zero.
    l: Vec<C<T>>,
}

/// Failed pivot of a band factorisation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PivotBreakdown {
    pub row: usize,
    pub pivot: f64,
}

impl<T: Real> BandCholesky<T> {
    /// Factors `A - shift · diag(mass)` (`mass = None` means the identity).
    pub fn factor(
        a: &SparseHermitian<T>,
        shift: T,
        mass: Option<&[T]>,
    ) -> std::result::Result<Self, PivotBreakdown> {
        let n = a.dim();
        let kb = a.bandwidth();
        let w = kb + 1;
        let mut l = vec![czero(); n * w];
        for i in 0..n {
            for (j, v) in a.row(i) {
                if j <= i {
                    l[i * w + (j + kb - i)] = v;
                }
            }
            let m = mass.map_or(T::one(), |m| m[i]);
            l[i * w + kb] -= C::new(shift * m, T::zero());
        }
        let tiny = T::epsilon() * T::lit(16.0);
        for i in 0..n {
            let lo = i.saturating_sub(kb);
            for j in lo..=i {
                let k0 = lo.max(j.saturating_sub(kb));
                let mut s = l[i * w + (j + kb - i)];
                // Σ_k L[i][k] conj(L[j][k]) over the overlap of both bands.
                let ri = i * w + (k0 + kb - i);
                let rj = j * w + (k0 + kb - j);
                for t in 0..(j - k0) {
                    s -= l[ri + t] * l[rj + t].conj();
                }
                if j == i {
                    let scale = a.get(i, i).re.abs().max(T::min_positive_value());
                    let d = s.re;
                    if !(d > tiny * scale) {
                        return Err(PivotBreakdown {
                            row: i,
                            pivot: d.to_f64_lossy(),
                        });
                    }
                    l[i * w + kb] = C::new(d.sqrt(), T::zero());
                } else {
                    let djj = l[j * w + kb].re;
                    l[i * w + (j + kb - i)] = s / djj;
                }
            }
        }
        Ok(Self { n, kb, l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `L Lᴴ x = b` in place.
    pub fn solve_in_place(&self, x: &mut [C<T>]) {
        let (n, kb) = (self.n, self.kb);
        let w = kb + 1;
        for i in 0..n {
            let lo = i.saturating_sub(kb);
            let mut s = x[i];
            let row = i * w + (lo + kb - i);
            for (t, xk) in x[lo..i].iter().enumerate() {
                s -= self.l[row + t] * xk;
            }
            x[i] = s / self.l[i * w + kb].re;
        }
        for i in (0..n).rev() {
            let xi = x[i] / self.l[i * w + kb].re;
            x[i] = xi;
            let lo = i.saturating_sub(kb);
            let row = i * w + (lo + kb - i);
            for (t, xj) in x[lo..i].iter_mut().enumerate() {
                *xj -= self.l[row + t].conj() * xi;
            }
        }
    }

    pub fn solve(&self, b: &[C<T>]) -> Vec<C<T>> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

/// Factors `A - σ D`, lowering `σ` geometrically on breakdown. Returns the
/// factor, the shift used and every shift tried.
pub fn factor_with_retreat<T: Real>(
    a: &SparseHermitian<T>,
    mass: Option<&[T]>,
    mut shift: T,
    step: T,
    attempts: usize,
) -> Result<(BandCholesky<T>, T, Vec<f64>)> {
    let mut tried = Vec::new();
    let mut step = step.abs().max(T::lit(1e-12));
    let mut last = PivotBreakdown { row: 0, pivot: 0.0 };
    for _ in 0..attempts.max(1) {
        tried.push(shift.to_f64_lossy());
        match BandCholesky::factor(a, shift, mass) {
            Ok(f) => return Ok((f, shift, tried)),
            Err(b) => {
                last = b;
                shift -= step;
                step = step * T::lit(4.0);
            }
        }
    }
    Err(Error::Factorization {
        row: last.row,
        pivot: last.pivot,
        shifts: tried,
    })
}

/// Eigen-decomposition of a dense Hermitian matrix by cyclic Jacobi
/// rotations. Returns eigenvalues ascending and eigenvectors as columns
/// (`vecs[k]` is the `k`-th eigenvector).
pub fn hermitian_eigen<T: Real>(a: &[Vec<C<T>>]) -> (Vec<T>, Vec<Vec<C<T>>>) {
    let n = a.len();
    let mut m: Vec<Vec<C<T>>> = a.to_vec();
    // Column-major accumulated rotations: v[col][row].
    let mut v: Vec<Vec<C<T>>> = (0..n)
        .map(|j| {
            let mut c = vec![czero(); n];
            c[j] = C::new(T::one(), T::zero());
            c
        })
        .collect();
    for i in 0..n {
        m[i][i].im = T::zero();
    }
    let fro: T = m
        .iter()
        .flat_map(|r| r.iter())
        .map(|z| z.norm_sqr())
        .sum::<T>()
        .sqrt();
    let eps = T::epsilon();
    for _sweep in 0..100 {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[p][q].norm_sqr();
            }
        }
        if off.sqrt() <= eps * fro * T::lit(1e-2) || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p][q];
                let g = apq.norm();
                if g == T::zero() || g <= eps * T::lit(1e-3) * (m[p][p].re.abs() + m[q][q].re.abs()) {
                    m[p][q] = czero();
                    m[q][p] = czero();
                    continue;
                }
                let e = apq / g;
                let theta = (m[q][q].re - m[p][p].re) / (T::two() * g);
                let t = if theta >= T::zero() {
                    T::one() / (theta + (theta * theta + T::one()).sqrt())
                } else {
                    -T::one() / (-theta + (theta * theta + T::one()).sqrt())
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                let ec = e.conj();
                // Columns: A ← A J.
                for row in m.iter_mut() {
                    let (xp, xq) = (row[p], row[q]);
                    row[p] = xp * c - xq * ec * s;
                    row[q] = xp * s + xq * ec * c;
                }
                // Rows: A ← Jᴴ A.
                for k in 0..n {
                    let (xp, xq) = (m[p][k], m[q][k]);
                    m[p][k] = xp * c - xq * e * s;
                    m[q][k] = xp * s + xq * e * c;
                }
                m[p][q] = czero();
                m[q][p] = czero();
                m[p][p].im = T::zero();
                m[q][q].im = T::zero();
                let (vp, vq) = (v[p].clone(), v[q].clone());
                for k in 0..n {
                    v[p][k] = vp[k] * c - vq[k] * ec * s;
                    v[q][k] = vp[k] * s + vq[k] * ec * c;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i][i].re.partial_cmp(&m[j][j].re).unwrap_or(std::cmp::Ordering::Equal));
    let vals = order.iter().map(|&i| m[i][i].re).collect();
    let vecs = order.iter().map(|&i| v[i].clone()).collect();
    (vals, vecs)
}

/// Options of [`largest_eigs`].
#[derive(Clone, Copy, Debug)]
pub struct KrylovOptions<T> {
    /// Relative residual target `‖Op y - θ y‖ ≤ tol · |θ_max|`.
    pub tol: T,
    /// Budget of operator applications.
    pub max_apply: usize,
    pub seed: u64,
}

/// Outcome of [`largest_eigs`]; eigenvalues in descending order.
#[derive(Clone, Debug)]
pub struct KrylovOutcome<T> {
    pub values: Vec<T>,
    pub vectors: Vec<Vec<C<T>>>,
    pub residuals: Vec<T>,
    pub applications: usize,
    pub restarts: usize,
    pub converged: bool,
}

fn random_vector<T: Real>(n: usize, rng: &mut ChaCha8Rng) -> Vec<C<T>> {
    (0..n)
        .map(|_| {
            C::new(
                T::lit(rng.gen::<f64>() - 0.5),
                T::lit(rng.gen::<f64>() - 0.5),
            )
        })
        .collect()
}

// Orthonormalises `x` against `basis` (two Gram–Schmidt passes). Returns
// false when `x` is numerically inside the span.
fn orthonormalize<T: Real>(x: &mut [C<T>], basis: &[Vec<C<T>>], extra: &[Vec<C<T>>]) -> bool {
    let n0 = norm2(x);
    if n0 == T::zero() {
        return false;
    }
    for _ in 0..2 {
        for b in basis.iter().chain(extra) {
            let c = dot(b, x);
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi -= c * bi;
            }
        }
    }
    let n1 = norm2(x);
    if !(n1 > n0 * T::lit(1e-10)) || !n1.is_finite() {
        return false;
    }
    for xi in x.iter_mut() {
        *xi /= n1;
    }
    true
}

/// Largest `k` eigenpairs of a Hermitian operator on `ℂⁿ` by restarted
/// block Krylov iteration with full reorthogonalisation and Rayleigh–Ritz.
pub fn largest_eigs<T, F>(
    n: usize,
    k: usize,
    mut op: F,
    opts: &KrylovOptions<T>,
) -> KrylovOutcome<T>
where
    T: Real,
    F: FnMut(&[C<T>], &mut [C<T>]),
{
    let k = k.min(n).max(1);
    if n == 0 {
        return KrylovOutcome {
            values: Vec::new(),
            vectors: Vec::new(),
            residuals: Vec::new(),
            applications: 0,
            restarts: 0,
            converged: true,
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let block = (k + 3).min(n);
    let max_basis = (block * 16).max(40).min(n);
    let mut applications = 0usize;
    let mut restarts = 0usize;
    let mut start: Vec<Vec<C<T>>> = (0..block).map(|_| random_vector(n, &mut rng)).collect();

    loop {
        let mut basis: Vec<Vec<C<T>>> = Vec::with_capacity(max_basis);
        let mut images: Vec<Vec<C<T>>> = Vec::with_capacity(max_basis);
        let mut pending = std::mem::take(&mut start);
        'grow: while basis.len() < max_basis {
            let mut fresh = Vec::new();
            for mut x in pending.drain(..) {
                if basis.len() + fresh.len() >= max_basis {
                    break;
                }
                let mut ok = orthonormalize(&mut x, &basis, &fresh);
                let mut tries = 0;
                while !ok && tries < 3 && basis.len() + fresh.len() < n {
                    x = random_vector(n, &mut rng);
                    ok = orthonormalize(&mut x, &basis, &fresh);
                    tries += 1;
                }
                if ok {
                    fresh.push(x);
                }
            }
            if fresh.is_empty() {
                break 'grow;
            }
            for x in fresh {
                let mut y = vec![czero(); n];
                op(&x, &mut y);
                applications += 1;
                pending.push(y.clone());
                basis.push(x);
                images.push(y);
            }
            if applications >= opts.max_apply {
                break;
            }
        }

        let m = basis.len();
        let mut h = vec![vec![czero(); m]; m];
        for i in 0..m {
            for j in i..m {
                let v = dot(&basis[i], &images[j]);
                let w = dot(&images[i], &basis[j]);
                let s = (v + w) / T::two();
                h[i][j] = s;
                h[j][i] = s.conj();
            }
        }
        let (vals, vecs) = hermitian_eigen(&h);
        let take = k.min(m);
        let mut values = Vec::with_capacity(take);
        let mut vectors = Vec::with_capacity(take);
        let mut residuals = Vec::with_capacity(take);
        let scale = vals.iter().fold(T::zero(), |a, v| a.max(v.abs()));
        let mut ritz_block = Vec::new();
        for idx in 0..block.min(m) {
            let c = &vecs[m - 1 - idx];
            let theta = vals[m - 1 - idx];
            let mut y: Vec<C<T>> = vec![czero(); n];
            let mut oy: Vec<C<T>> = vec![czero(); n];
            for (j, cj) in c.iter().enumerate() {
                if *cj == czero() {
                    continue;
                }
                for t in 0..n {
                    y[t] += basis[j][t] * cj;
                    oy[t] += images[j][t] * cj;
                }
            }
            if idx < take {
                let r: Vec<C<T>> = oy
                    .iter()
                    .zip(&y)
                    .map(|(a, b)| a - b * theta)
                    .collect();
                values.push(theta);
                residuals.push(norm2(&r));
                vectors.push(y.clone());
            }
            ritz_block.push(y);
        }
        let target = opts.tol * scale.max(T::min_positive_value());
        let converged = m == n || residuals.iter().all(|&r| r <= target);
        if converged || applications >= opts.max_apply {
            return KrylovOutcome {
                values,
                vectors,
                residuals,
                applications,
                restarts,
                converged,
            };
        }
        restarts += 1;
        start = ritz_block;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C<f64> {
        C::new(re, im)
    }

    fn laplacian_1d(n: usize) -> SparseHermitian<f64> {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, c(2.0, 0.0)));
            if i + 1 < n {
                t.push((i, i + 1, c(-1.0, 0.0)));
                t.push((i + 1, i, c(-1.0, 0.0)));
            }
        }
        SparseHermitian::from_triplets(n, t)
    }

    #[test]
    fn triplets_sum_duplicates() {
        let a = SparseHermitian::from_triplets(
            2,
            vec![(0, 0, c(1.0, 0.0)), (0, 0, c(2.0, 0.0)), (1, 0, c(0.0, 1.0)), (0, 1, c(0.0, -1.0))],
        );
        assert_eq!(a.get(0, 0), c(3.0, 0.0));
        assert_eq!(a.nnz(), 3);
        assert_eq!(a.hermitian_defect(), 0.0);
        assert_eq!(a.bandwidth(), 1);
    }

    #[test]
    fn band_cholesky_solves_complex_system() {
        let n = 12;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, c(4.0, 0.0)));
            if i + 2 < n {
                t.push((i, i + 2, c(0.5, 0.7)));
                t.push((i + 2, i, c(0.5, -0.7)));
            }
            if i + 1 < n {
                t.push((i, i + 1, c(-1.0, 0.2)));
                t.push((i + 1, i, c(-1.0, -0.2)));
            }
        }
        let a = SparseHermitian::from_triplets(n, t);
        let b: Vec<_> = (0..n).map(|i| c(i as f64, 1.0 - i as f64)).collect();
        let f = BandCholesky::factor(&a, 0.0, None).unwrap();
        let x = f.solve(&b);
        let ax = a.mul(&x);
        for (u, v) in ax.iter().zip(&b) {
            assert!((u - v).norm() < 1e-12);
        }
    }

    #[test]
    fn indefinite_shift_breaks_down() {
        let a = laplacian_1d(10);
        assert!(BandCholesky::factor(&a, 3.0, None).is_err());
        let (_, used, tried) = factor_with_retreat(&a, None, 3.0, 0.5, 10).unwrap();
        assert!(used < 0.09 && tried.len() > 1);
    }

    #[test]
    fn jacobi_diagonalises_hermitian() {
        let a = vec![
            vec![c(2.0, 0.0), c(1.0, 1.0), c(0.0, 0.5)],
            vec![c(1.0, -1.0), c(3.0, 0.0), c(0.2, 0.0)],
            vec![c(0.0, -0.5), c(0.2, 0.0), c(-1.0, 0.0)],
        ];
        let (vals, vecs) = hermitian_eigen(&a);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let trace: f64 = vals.iter().sum();
        assert!((trace - 4.0).abs() < 1e-12);
        for (lam, v) in vals.iter().zip(&vecs) {
            for i in 0..3 {
                let av: C<f64> = (0..3).map(|j| a[i][j] * v[j]).sum();
                assert!((av - v[i] * lam).norm() < 1e-12);
            }
            assert!((norm2(v) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn krylov_finds_largest_of_diagonal() {
        let n = 300;
        let d: Vec<f64> = (0..n).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let opts = KrylovOptions { tol: 1e-12, max_apply: 5000, seed: 7 };
        let out = largest_eigs(n, 3, |x, y| {
            for i in 0..n {
                y[i] = x[i] * d[i];
            }
        }, &opts);
        assert!(out.converged);
        for (i, v) in out.values.iter().enumerate() {
            assert!((v - d[i]).abs() < 1e-10, "{v}");
        }
    }

    #[test]
    fn krylov_is_exact_on_small_spaces() {
        let opts = KrylovOptions { tol: 1e-14f64, max_apply: 100, seed: 1 };
        let out = largest_eigs(2, 2, |x, y| {
            y[0] = x[0] * 2.0 + x[1];
            y[1] = x[0] + x[1] * 2.0;
        }, &opts);
        assert!(out.converged);
        assert!((out.values[0] - 3.0).abs() < 1e-14);
        assert!((out.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn krylov_is_deterministic() {
        let a = laplacian_1d(200);
        let opts = KrylovOptions { tol: 1e-10, max_apply: 5000, seed: 3 };
        let run = || largest_eigs(200, 2, |x, y| a.apply(x, y), &opts);
        let (p, q) = (run(), run());
        assert_eq!(p.values, q.values);
        assert_eq!(p.applications, q.applications);
    }
}
