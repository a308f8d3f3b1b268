//! Smallest eigenpairs of Hamiltonian pencils and extremal generalised
//! Rayleigh quotients of weight/energy pencils.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::{HermitianForm, WeightMass};
use crate::linalg::{factor_with_retreat, largest_eigs, BandCholesky, KrylovOptions};
use crate::mesh::{GridFunction, PolarGrid};
use crate::scalar::{czero, norm2, Real, C};

/// Tolerance, iteration budget and seed shared by the solvers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolverOptions<T> {
    pub tol: T,
    /// Budget of operator applications (one linear solve each).
    pub max_iter: usize,
    pub seed: u64,
}

impl<T: Real> Default for SolverOptions<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(1e-8),
            max_iter: 5000,
            seed: 42,
        }
    }
}

/// Eigenpairs of a pencil `(H, M)` in ascending order.
#[derive(Clone, Debug)]
pub struct SpectralResult<T> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: Vec<GridFunction<T>>,
    /// `‖Hv - λMv‖` for `‖v‖₂ = 1`.
    pub residual_norms: Vec<T>,
    pub iterations: usize,
    pub converged: bool,
    pub shifts: Vec<f64>,
}

/// Optimal `c` in `∫W|ψ|² ≤ c ∫|∇_Aψ|²` on the grid.
#[derive(Clone, Debug)]
pub struct SubordinationConstant<T> {
    pub value: T,
    pub b_value: T,
    pub iterations: usize,
    pub converged: bool,
    pub shifts: Vec<f64>,
    pub support_size: usize,
    /// Maximising grid function (absent when `W = 0`).
    pub maximizer: Option<GridFunction<T>>,
}

fn mass_diagonal<T: Real>(h: &HermitianForm<T>, m: Option<&WeightMass<T>>) -> Result<Vec<T>> {
    let n = h.dimension();
    match m {
        None => Ok(vec![T::one(); n]),
        Some(m) => {
            if m.layout() != h.layout() {
                return Err(Error::Dimension {
                    expected: n,
                    got: m.diag().len(),
                });
            }
            if m.diag().iter().any(|&d| !(d > T::zero())) {
                return Err(Error::InvalidWeight("mass matrix must be positive".into()));
            }
            Ok(m.diag().to_vec())
        }
    }
}

// Lower bound on the pencil spectrum: H ≥ D with D_i = H_ii - Σ_j |H_ij|
// (the remainder is diagonally dominant), hence λ ≥ min_i D_i / M_i.
fn gershgorin_floor<T: Real>(h: &HermitianForm<T>, mass: &[T]) -> T {
    let a = h.matrix();
    let mut floor = T::infinity();
    for i in 0..a.dim() {
        let mut d = T::zero();
        for (j, v) in a.row(i) {
            if j == i {
                d += v.re;
            } else {
                d -= v.norm();
            }
        }
        floor = floor.min(d / mass[i]);
    }
    if floor.is_finite() {
        floor
    } else {
        T::zero()
    }
}

struct ShiftInvert<'a, T> {
    factor: &'a BandCholesky<T>,
    sqrt_mass: &'a [T],
}

impl<T: Real> ShiftInvert<'_, T> {
    fn apply(&self, x: &[C<T>], y: &mut [C<T>]) {
        for ((yi, xi), s) in y.iter_mut().zip(x).zip(self.sqrt_mass) {
            *yi = xi * *s;
        }
        self.factor.solve_in_place(y);
        for (yi, s) in y.iter_mut().zip(self.sqrt_mass) {
            *yi *= *s;
        }
    }
}

/// The `k` smallest eigenvalues of `h v = λ m v` (`m = None` is the identity)
/// by shift-invert block Krylov iteration.
pub fn smallest_eigs<T: Real>(
    h: &HermitianForm<T>,
    m: Option<&WeightMass<T>>,
    k: usize,
    opts: &SolverOptions<T>,
) -> Result<SpectralResult<T>> {
    if k == 0 {
        return Err(Error::Rejected("k must be at least 1".into()));
    }
    let n = h.dimension();
    let k = k.min(n);
    let mass = mass_diagonal(h, m)?;
    let sqrt_mass: Vec<T> = mass.iter().map(|d| d.sqrt()).collect();
    let floor = gershgorin_floor(h, &mass);
    let margin = T::lit(1e-3) * (T::one() + floor.abs());
    let (mut factor, mut sigma, mut shifts) =
        factor_with_retreat(h.matrix(), Some(&mass), floor - margin, margin, 8)?;

    let mut applied = 0usize;
    let mut krylov_tol = (opts.tol * T::lit(1e-2)).max(T::epsilon() * T::lit(10.0));
    let mut reshifts = 0usize;
    let mut attempt = 0;
    loop {
        attempt += 1;
        let budget = opts.max_iter.saturating_sub(applied).max(1);
        let op = ShiftInvert {
            factor: &factor,
            sqrt_mass: &sqrt_mass,
        };
        let kopts = KrylovOptions {
            tol: if reshifts >= 3 { krylov_tol } else { krylov_tol.max(T::lit(1e-3)) },
            max_apply: budget,
            seed: opts.seed.wrapping_add(attempt as u64),
        };
        let probe = (k + 2).min(n);
        let out = largest_eigs(n, probe, |x, y| op.apply(x, y), &kopts);
        applied += out.applications;

        let mut pairs: Vec<(T, Vec<C<T>>)> = out
            .values
            .iter()
            .zip(&out.vectors)
            .map(|(&mu, y)| {
                let v: Vec<C<T>> = y.iter().zip(&sqrt_mass).map(|(z, s)| z / *s).collect();
                (sigma + T::one() / mu, v)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));

        if reshifts < 3 {
            // Move the shift just below the lowest Ritz value; a successful
            // factorisation certifies that no eigenvalue lies below it.
            reshifts += 1;
            let lo = pairs[0].0;
            let hi = pairs[pairs.len() - 1].0;
            let spread = (hi - lo).max(T::lit(1e-6) * (T::one() + lo.abs()));
            let target = lo - T::lit(0.05) * spread;
            if target - sigma <= T::lit(0.2) * spread {
                reshifts = 3;
            } else {
                if let Ok((f, s, tried)) =
                    factor_with_retreat(h.matrix(), Some(&mass), target, T::lit(0.2) * spread, 6)
                {
                    if s > sigma {
                        factor = f;
                        sigma = s;
                    }
                    shifts.extend(tried);
                }
            }
            continue;
        }

        pairs.truncate(k);
        let mut residual_norms = Vec::with_capacity(k);
        let mut ok = true;
        let mut eigenvectors = Vec::with_capacity(k);
        let mut eigenvalues = Vec::with_capacity(k);
        for (lam, mut v) in pairs {
            let nv = norm2(&v);
            for z in v.iter_mut() {
                *z /= nv;
            }
            let mut hv = vec![czero(); n];
            h.apply(&v, &mut hv);
            let r: Vec<C<T>> = hv
                .iter()
                .zip(&v)
                .zip(&mass)
                .map(|((a, b), &mm)| a - b * (lam * mm))
                .collect();
            let rn = norm2(&r);
            if rn > opts.tol * norm2(&hv) + opts.tol {
                ok = false;
            }
            residual_norms.push(rn);
            // Report eigenvectors M-normalised.
            let mn: T = v.iter().zip(&mass).map(|(z, &mm)| z.norm_sqr() * mm).sum::<T>().sqrt();
            let vm: Vec<C<T>> = v.iter().map(|z| z / mn).collect();
            eigenvectors.push(h.layout().extend(&vm)?);
            eigenvalues.push(lam);
        }
        let exhausted = applied >= opts.max_iter;
        if ok || exhausted || krylov_tol <= T::epsilon() * T::lit(10.0) {
            return Ok(SpectralResult {
                eigenvalues,
                eigenvectors,
                residual_norms,
                iterations: applied,
                converged: ok && out.converged,
                shifts,
            });
        }
        krylov_tol = (krylov_tol * T::lit(1e-2)).max(T::epsilon() * T::lit(10.0));
    }
}

/// Largest eigenvalue of the pencil `(w, k)`, i.e. the optimal constant in
/// `Σ w|ψ|² ≤ c · k[ψ]`, computed on the support of `w`.
pub fn sup_rayleigh<T: Real>(
    w: &WeightMass<T>,
    k: &HermitianForm<T>,
    opts: &SolverOptions<T>,
) -> Result<SubordinationConstant<T>> {
    w.require_nonnegative()?;
    if w.layout() != k.layout() {
        return Err(Error::Dimension {
            expected: k.dimension(),
            got: w.diag().len(),
        });
    }
    let support = w.support();
    if support.is_empty() {
        return Ok(SubordinationConstant {
            value: T::zero(),
            b_value: T::zero(),
            iterations: 0,
            converged: true,
            shifts: Vec::new(),
            support_size: 0,
            maximizer: None,
        });
    }
    let factor = BandCholesky::factor(k.matrix(), T::zero(), None).map_err(|b| {
        Error::Factorization {
            row: b.row,
            pivot: b.pivot,
            shifts: vec![0.0],
        }
    })?;
    let n = k.dimension();
    let sw: Vec<T> = support.iter().map(|&i| w.diag()[i].sqrt()).collect();
    let mut work = vec![czero(); n];
    let mut op = |y: &[C<T>], out: &mut [C<T>]| {
        work.iter_mut().for_each(|z| *z = czero());
        for ((&i, &s), yi) in support.iter().zip(&sw).zip(y) {
            work[i] = yi * s;
        }
        factor.solve_in_place(&mut work);
        for ((&i, &s), oi) in support.iter().zip(&sw).zip(out.iter_mut()) {
            *oi = work[i] * s;
        }
    };
    let kopts = KrylovOptions {
        tol: opts.tol,
        max_apply: opts.max_iter,
        seed: opts.seed,
    };
    let out = largest_eigs(support.len(), 1, &mut op, &kopts);
    let value = out.values[0].max(T::zero());
    let mut x = vec![czero(); n];
    for ((&i, &s), yi) in support.iter().zip(&sw).zip(&out.vectors[0]) {
        x[i] = yi * s;
    }
    factor.solve_in_place(&mut x);
    Ok(SubordinationConstant {
        value,
        b_value: value.sqrt(),
        iterations: out.applications,
        converged: out.converged,
        shifts: vec![0.0],
        support_size: support.len(),
        maximizer: Some(k.layout().extend(&x)?),
    })
}

/// `inf k[ψ] / Σ w|ψ|²`, the reciprocal of [`sup_rayleigh`].
pub fn min_rayleigh<T: Real>(
    k: &HermitianForm<T>,
    w: &WeightMass<T>,
    opts: &SolverOptions<T>,
) -> Result<SubordinationConstant<T>> {
    let mut s = sup_rayleigh(w, k, opts)?;
    s.value = if s.value > T::zero() {
        T::one() / s.value
    } else {
        T::infinity()
    };
    s.b_value = s.value.sqrt();
    Ok(s)
}

/// Radius containing 95 % of the grid mass `Σ weight |ψ|²`.
pub fn participation_radius<T: Real>(grid: &PolarGrid<T>, psi: &GridFunction<T>) -> T {
    let n_r = grid.n_r();
    let mut per_ring = vec![T::zero(); n_r + 1];
    for (node, v) in grid.nodes().iter().zip(&psi.values) {
        per_ring[node.ring] += node.weight * v.norm_sqr();
    }
    let total: T = per_ring.iter().copied().sum();
    if total == T::zero() {
        return T::zero();
    }
    let mut acc = T::zero();
    for (i, m) in per_ring.iter().enumerate() {
        acc += *m;
        if acc >= T::lit(0.95) * total {
            return grid.radii()[i];
        }
    }
    grid.r_max()
}

/// Classification of the lowest eigenvalue across a radius sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stabilization {
    Artifact,
    Genuine,
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilizationEntry {
    pub r_max: f64,
    pub lambda1: f64,
    pub residual: f64,
    pub participation_radius: f64,
    pub converged: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilizationReport {
    pub entries: Vec<StabilizationEntry>,
    /// `None` when some solve did not converge or fewer than two radii were
    /// solved.
    pub verdict: Option<Stabilization>,
    pub tolerance: f64,
}

/// Solves the lowest eigenvalue for each truncation radius. `build` returns
/// the grid, Hamiltonian form and mass for a given `r_max`. The eigenvalue is
/// genuine when the last two radii agree within `1e-3 (1 + |λ₁|)` and the
/// eigenfunction keeps 95 % of its mass inside `r_max / 2`.
pub fn stabilization_probe<T, F>(
    mut build: F,
    radii: &[T],
    opts: &SolverOptions<T>,
) -> Result<StabilizationReport>
where
    T: Real,
    F: FnMut(T) -> Result<(PolarGrid<T>, HermitianForm<T>, WeightMass<T>)>,
{
    if radii.len() < 3 || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Rejected(
            "stabilization probe needs at least three increasing radii".into(),
        ));
    }
    let mut entries = Vec::with_capacity(radii.len());
    for &r in radii {
        let (grid, h, m) = build(r)?;
        let res = smallest_eigs(&h, Some(&m), 1, opts)?;
        entries.push(StabilizationEntry {
            r_max: r.to_f64_lossy(),
            lambda1: res.eigenvalues[0].to_f64_lossy(),
            residual: res.residual_norms[0].to_f64_lossy(),
            participation_radius: participation_radius(&grid, &res.eigenvectors[0]).to_f64_lossy(),
            converged: res.converged,
        });
    }
    Ok(classify_stabilization(entries))
}

/// Applies the stabilization rule of [`stabilization_probe`] to entries
/// computed elsewhere (at least two, ordered by increasing radius).
pub fn classify_stabilization(entries: Vec<StabilizationEntry>) -> StabilizationReport {
    if entries.len() < 2 {
        return StabilizationReport {
            entries,
            verdict: None,
            tolerance: f64::NAN,
        };
    }
    let last = &entries[entries.len() - 1];
    let prev = &entries[entries.len() - 2];
    let tolerance = 1e-3 * (1.0 + last.lambda1.abs());
    let verdict = if entries.iter().all(|e| e.converged) {
        let stable = (last.lambda1 - prev.lambda1).abs() <= tolerance;
        let localized = last.participation_radius <= last.r_max / 2.0;
        Some(if stable && localized {
            Stabilization::Genuine
        } else {
            Stabilization::Artifact
        })
    } else {
        None
    };
    StabilizationReport {
        entries,
        verdict,
        tolerance,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{transverse_gauge, RadialFieldProfile};
    use crate::forms::{assemble_dirichlet_form, assemble_weight, quadrature_mass};
    use crate::mesh::build_grid;

    const J01_SQ: f64 = 5.783_185_962_946_784;

    fn laplacian(n_r: usize, n_t: usize, r_max: f64) -> (PolarGrid<f64>, HermitianForm<f64>, WeightMass<f64>) {
        let g = build_grid(0.0, r_max, n_r, n_t, 1.0).unwrap();
        let h = assemble_dirichlet_form(&transverse_gauge(&RadialFieldProfile::zero()), &g).unwrap();
        let m = quadrature_mass(&g).unwrap();
        (g, h, m)
    }

    #[test]
    fn disk_ground_state() {
        let (_, h, m) = laplacian(48, 32, 1.0);
        let r = smallest_eigs(&h, Some(&m), 2, &SolverOptions::default()).unwrap();
        assert!(r.converged, "{:?}", r.residual_norms);
        assert!((r.eigenvalues[0] - J01_SQ).abs() / J01_SQ < 0.01, "{}", r.eigenvalues[0]);
        // Second eigenvalue is the doubly degenerate j_{1,1}² ≈ 14.68.
        assert!((r.eigenvalues[1] - 14.682).abs() / 14.682 < 0.02, "{}", r.eigenvalues[1]);
    }

    #[test]
    fn reciprocal_bessel_subordination() {
        let (_, h, m) = laplacian(48, 32, 1.0);
        let c = sup_rayleigh(&m, &h, &SolverOptions::default()).unwrap();
        assert!(c.converged);
        assert!((c.value - 1.0 / J01_SQ).abs() * J01_SQ < 0.01, "{}", c.value);
        assert!((c.b_value * c.b_value - c.value).abs() < 1e-15);
    }

    #[test]
    fn zero_weight_gives_zero_constant() {
        let (g, h, _) = laplacian(8, 8, 1.0);
        let w = assemble_weight(&g, |_| 0.0).unwrap();
        let c = sup_rayleigh(&w, &h, &SolverOptions::default()).unwrap();
        assert_eq!(c.value, 0.0);
        let neg = assemble_weight(&g, |_| -1.0).unwrap();
        assert!(sup_rayleigh(&neg, &h, &SolverOptions::default()).is_err());
    }

    #[test]
    fn free_laplacian_is_an_artifact() {
        let report = stabilization_probe(|r| Ok(laplacian(24, 16, r)), &[5.0, 10.0, 20.0], &SolverOptions::default())
            .unwrap();
        assert_eq!(report.verdict, Some(Stabilization::Artifact));
        let l: Vec<f64> = report.entries.iter().map(|e| e.lambda1).collect();
        assert!(l[0] / l[1] > 3.5 && l[1] / l[2] > 3.5, "{l:?}");
    }

    #[test]
    fn shallow_well_bound_state_needs_a_large_disk() {
        // Exact continuum ground state of -Δ - 0.5·1_{r≤1}: λ₁ = -7.06e-4,
        // decay length 37.6. Truncation at r_max = 20 still lifts it above 0.
        use crate::forms::{hamiltonian_form, potential_mass};
        use crate::potential::{PotentialModel, ScalarPotential};
        let v = PotentialModel::real(ScalarPotential::Step { value: -0.5, radius: 1.0 });
        let a = transverse_gauge(&RadialFieldProfile::zero());
        let lambda1 = |r_max: f64| {
            let g = build_grid(0.0, r_max, 192, 16, 2.0).unwrap();
            let h = hamiltonian_form(&assemble_dirichlet_form(&a, &g).unwrap(), &potential_mass(&g, &v).unwrap()).unwrap();
            smallest_eigs(&h, Some(&quadrature_mass(&g).unwrap()), 1, &SolverOptions::default()).unwrap().eigenvalues[0]
        };
        let (l20, l40) = (lambda1(20.0), lambda1(40.0));
        assert!(l20 > 0.0, "{l20}");
        assert!(l40 < 0.0 && l40 > -7.06e-4, "{l40}");
    }

    #[test]
    fn solver_is_deterministic() {
        let (_, h, m) = laplacian(16, 16, 1.0);
        let o = SolverOptions::default();
        let a = smallest_eigs(&h, Some(&m), 3, &o).unwrap();
        let b = smallest_eigs(&h, Some(&m), 3, &o).unwrap();
        assert_eq!(a.eigenvalues, b.eigenvalues);
        assert_eq!(a.iterations, b.iterations);
    }
}
