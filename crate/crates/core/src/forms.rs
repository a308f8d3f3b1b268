//! Link-variable discretisation of the magnetic Dirichlet form and diagonal
//! weighted masses on a polar grid.

use std::io::{self, Write};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Source, VectorPotentialField};
use crate::mesh::{non_finite, GridFunction, Point, PolarGrid};
use crate::potential::PotentialModel;
use crate::scalar::{cis, czero, Real, C};
use crate::linalg::SparseHermitian;

/// Map between grid nodes and unknowns (Dirichlet nodes eliminated).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DofLayout {
    node_count: usize,
    node_of_dof: Vec<usize>,
}

impl DofLayout {
    pub fn from_grid<T: Real>(grid: &PolarGrid<T>) -> Self {
        Self {
            node_count: grid.node_count(),
            node_of_dof: (0..grid.dof_count()).map(|d| grid.node_of_dof(d)).collect(),
        }
    }

    pub fn dof_count(&self) -> usize {
        self.node_of_dof.len()
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn node_of_dof(&self, d: usize) -> usize {
        self.node_of_dof[d]
    }

    pub fn restrict<T: Real>(&self, f: &GridFunction<T>) -> Result<Vec<C<T>>> {
        if f.values.len() != self.node_count {
            return Err(Error::Dimension {
                expected: self.node_count,
                got: f.values.len(),
            });
        }
        Ok(self.node_of_dof.iter().map(|&k| f.values[k]).collect())
    }

    pub fn extend<T: Real>(&self, v: &[C<T>]) -> Result<GridFunction<T>> {
        if v.len() != self.dof_count() {
            return Err(Error::Dimension {
                expected: self.dof_count(),
                got: v.len(),
            });
        }
        let mut values = vec![czero(); self.node_count];
        for (d, &k) in self.node_of_dof.iter().enumerate() {
            values[k] = v[d];
        }
        Ok(GridFunction { values })
    }
}

/// Sparse Hermitian quadratic form on the unknowns of a grid.
#[derive(Clone, Debug)]
pub struct HermitianForm<T> {
    matrix: SparseHermitian<T>,
    layout: Arc<DofLayout>,
    positive_semidefinite: bool,
}

impl<T: Real> HermitianForm<T> {
    pub fn dimension(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &SparseHermitian<T> {
        &self.matrix
    }

    pub fn layout(&self) -> &DofLayout {
        &self.layout
    }

    pub fn positive_semidefinite(&self) -> bool {
        self.positive_semidefinite
    }

    /// `h[ψ]` for a nodal function (Dirichlet values are ignored).
    pub fn value(&self, psi: &GridFunction<T>) -> Result<T> {
        Ok(self.matrix.quadratic(&self.layout.restrict(psi)?))
    }

    pub fn quadratic(&self, x: &[C<T>]) -> T {
        self.matrix.quadratic(x)
    }

    pub fn apply(&self, x: &[C<T>], y: &mut [C<T>]) {
        self.matrix.apply(x, y)
    }

    pub fn entry(&self, i: usize, j: usize) -> C<T> {
        self.matrix.get(i, j)
    }

    /// Writes the lower triangle in Matrix Market coordinate format.
    pub fn dump_matrix_market<W: Write>(&self, out: &mut W) -> io::Result<()> {
        let lower: Vec<_> = self.matrix.triplets().filter(|&(i, j, _)| j <= i).collect();
        writeln!(out, "%%MatrixMarket matrix coordinate complex hermitian")?;
        let n = self.dimension();
        writeln!(out, "{n} {n} {}", lower.len())?;
        for (i, j, v) in lower {
            writeln!(
                out,
                "{} {} {:.17e} {:.17e}",
                i + 1,
                j + 1,
                v.re.to_f64_lossy(),
                v.im.to_f64_lossy()
            )?;
        }
        Ok(())
    }
}

/// Diagonal mass `quad_weight(x) · w(x)` on the unknowns.
#[derive(Clone, Debug)]
pub struct WeightMass<T> {
    diag: Vec<T>,
    signed: bool,
    layout: Arc<DofLayout>,
}

impl<T: Real> WeightMass<T> {
    pub fn diag(&self) -> &[T] {
        &self.diag
    }

    /// True when some entry is negative.
    pub fn signed(&self) -> bool {
        self.signed
    }

    pub fn layout(&self) -> &DofLayout {
        &self.layout
    }

    pub fn is_zero(&self) -> bool {
        self.diag.iter().all(|&d| d == T::zero())
    }

    /// Indices of unknowns with a nonzero entry.
    pub fn support(&self) -> Vec<usize> {
        (0..self.diag.len())
            .filter(|&i| self.diag[i] != T::zero())
            .collect()
    }

    pub fn require_nonnegative(&self) -> Result<()> {
        if self.signed {
            Err(Error::InvalidWeight(
                "weight has negative entries where a non-negative weight is required".into(),
            ))
        } else {
            Ok(())
        }
    }

    pub fn quadratic(&self, x: &[C<T>]) -> T {
        self.diag.iter().zip(x).map(|(&d, z)| d * z.norm_sqr()).sum()
    }

    /// `Σ w |ψ|² · quad_weight` over the unknowns.
    pub fn value(&self, psi: &GridFunction<T>) -> Result<T> {
        Ok(self.quadratic(&self.layout.restrict(psi)?))
    }

    pub fn scaled(&self, s: T) -> Self {
        let diag: Vec<T> = self.diag.iter().map(|&d| d * s).collect();
        let signed = diag.iter().any(|&d| d < T::zero());
        Self {
            diag,
            signed,
            layout: self.layout.clone(),
        }
    }
}

fn check_layout(a: &DofLayout, b: &DofLayout) -> Result<()> {
    if a != b {
        return Err(Error::Dimension {
            expected: a.dof_count(),
            got: b.dof_count(),
        });
    }
    Ok(())
}

/// Diagonal entries `quad_weight(x) · w(x)` at the unknowns; the centre
/// node uses a cell average when `w` is singular there.
pub fn assemble_weight<T, F>(grid: &PolarGrid<T>, w: F) -> Result<WeightMass<T>>
where
    T: Real,
    F: Fn(Point<T>) -> T,
{
    let layout = Arc::new(DofLayout::from_grid(grid));
    let mut diag = Vec::with_capacity(layout.dof_count());
    for d in 0..layout.dof_count() {
        let k = layout.node_of_dof(d);
        let node = &grid.nodes()[k];
        let v = grid.node_weight_value(k, &w);
        let e = node.weight * v;
        if !e.is_finite() {
            return Err(non_finite(k, node, "weight"));
        }
        diag.push(e);
    }
    let signed = diag.iter().any(|&d| d < T::zero());
    Ok(WeightMass {
        diag,
        signed,
        layout,
    })
}

/// Lumped `L²` mass (`w ≡ 1`).
pub fn quadrature_mass<T: Real>(grid: &PolarGrid<T>) -> Result<WeightMass<T>> {
    assemble_weight(grid, |_| T::one())
}

/// Real potential as a signed mass; complex potentials are rejected since
/// the spectral path is restricted to self-adjoint operators.
pub fn potential_mass<T: Real>(grid: &PolarGrid<T>, v: &PotentialModel<T>) -> Result<WeightMass<T>> {
    if !v.is_real() {
        return Err(Error::Rejected(
            "complex potential: spectral computations require a real V".into(),
        ));
    }
    assemble_weight(grid, |p| v.re(p))
}

/// `∫|∇_A ψ|²` with link phases on every grid edge.
pub fn assemble_dirichlet_form<T: Real>(
    a: &VectorPotentialField<T>,
    grid: &PolarGrid<T>,
) -> Result<HermitianForm<T>> {
    assemble_weighted_dirichlet_form(a, grid, |_| T::one())
}

/// `∫ρ(|x|)|∇_A ψ|²` for a radial metric factor `ρ`.
pub fn assemble_weighted_dirichlet_form<T, R>(
    a: &VectorPotentialField<T>,
    grid: &PolarGrid<T>,
    rho: R,
) -> Result<HermitianForm<T>>
where
    T: Real,
    R: Fn(T) -> T,
{
    if a.origin_singular() && grid.has_origin() {
        return Err(Error::Assembly(
            "vector potential is singular at the origin; build the grid with r_min > 0".into(),
        ));
    }
    let layout = Arc::new(DofLayout::from_grid(grid));
    let n = layout.dof_count();
    let radii = grid.radii();
    let nt = grid.n_theta();
    let dth = grid.dtheta();
    let mut triplets: Vec<(usize, usize, C<T>)> = Vec::with_capacity(n * 5);
    let mut diag = vec![T::zero(); n];

    let mut link = |ka: usize, kb: usize, w: T, phase: T| -> Result<()> {
        if !(w.is_finite() && phase.is_finite()) {
            let node = &grid.nodes()[ka];
            return Err(Error::Assembly(format!(
                "non-finite link at r = {}, theta = {}; excise the singular region",
                node.r, node.theta
            )));
        }
        let (da, db) = (grid.dof_of_node(ka), grid.dof_of_node(kb));
        if let Some(i) = da {
            diag[i] += w;
        }
        if let Some(j) = db {
            diag[j] += w;
        }
        if let (Some(i), Some(j)) = (da, db) {
            let e = cis(phase) * w;
            triplets.push((i, j, -e));
            triplets.push((j, i, -e.conj()));
        }
        Ok(())
    };

    let explicit_phase = |pa: Point<T>, pb: Point<T>| -> Result<T> {
        let mid = Point::new((pa.x + pb.x) / T::two(), (pa.y + pb.y) / T::two());
        let v = a.eval(mid)?;
        Ok(v[0] * (pb.x - pa.x) + v[1] * (pb.y - pa.y))
    };

    // Radial edges.
    for i in 0..grid.n_r() {
        let (r0, r1) = (radii[i], radii[i + 1]);
        let h = r1 - r0;
        let rm = (r0 + r1) / T::two();
        let w = rho(rm) * rm * dth / h;
        for j in 0..nt {
            let ka = grid.node_index(i, j);
            let kb = grid.node_index(i + 1, j);
            let phase = match &a.source {
                Source::Explicit { .. } => {
                    explicit_phase(grid.nodes()[ka].point, grid.nodes()[kb].point)?
                }
                _ => T::zero(),
            };
            link(ka, kb, w, phase)?;
        }
    }
    // Angular edges.
    for i in 0..=grid.n_r() {
        let r = radii[i];
        if r == T::zero() {
            continue;
        }
        let w = rho(r) * grid.ring_mass(i) / (r * r * dth);
        if w == T::zero() {
            continue;
        }
        for j in 0..nt {
            let ka = grid.node_index(i, j);
            let kb = grid.node_index(i, j + 1);
            if grid.dof_of_node(ka).is_none() && grid.dof_of_node(kb).is_none() {
                continue;
            }
            let th = dth * T::of(j);
            let phase = match &a.source {
                Source::Transverse(f) => f.eval(r) * dth,
                Source::AharonovBohm(al) => al.integral(th, th + dth),
                Source::Explicit { .. } => {
                    explicit_phase(grid.nodes()[ka].point, grid.nodes()[kb].point)?
                }
            };
            link(ka, kb, w, phase)?;
        }
    }
    for (i, d) in diag.into_iter().enumerate() {
        triplets.push((i, i, C::new(d, T::zero())));
    }
    Ok(HermitianForm {
        matrix: SparseHermitian::from_triplets(n, triplets),
        layout,
        positive_semidefinite: true,
    })
}

/// `h[ψ] = dirichlet[ψ] + Σ V |ψ|² quad_weight`.
pub fn hamiltonian_form<T: Real>(
    dirichlet: &HermitianForm<T>,
    v_mass: &WeightMass<T>,
) -> Result<HermitianForm<T>> {
    check_layout(&dirichlet.layout, &v_mass.layout)?;
    if v_mass.is_zero() {
        return Ok(dirichlet.clone());
    }
    Ok(HermitianForm {
        matrix: dirichlet.matrix.add_diagonal(&v_mass.diag),
        layout: dirichlet.layout.clone(),
        positive_semidefinite: dirichlet.positive_semidefinite && !v_mass.signed,
    })
}

/// Left side, right side and verdict of a form inequality `lhs ≥ rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InequalityCheck<T> {
    pub lhs: T,
    pub rhs: T,
    pub holds: bool,
}

impl<T: Real> InequalityCheck<T> {
    fn new(lhs: T, rhs: T) -> Self {
        let holds = lhs >= rhs - T::lit(1e-12) * (T::one() + lhs.abs());
        Self { lhs, rhs, holds }
    }
}

/// `∫|∇_A ψ|² ≥ ∫|∇|ψ||²` on the grid.
pub fn diamagnetic_check<T: Real>(
    dirichlet_a: &HermitianForm<T>,
    dirichlet_0: &HermitianForm<T>,
    psi: &GridFunction<T>,
) -> Result<InequalityCheck<T>> {
    check_layout(&dirichlet_a.layout, &dirichlet_0.layout)?;
    let lhs = dirichlet_a.value(psi)?;
    let rhs = dirichlet_0.value(&psi.modulus())?;
    Ok(InequalityCheck::new(lhs, rhs))
}

/// Sign of the field in `∫|∇_A ψ|² ≥ ±∫B|ψ|²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor<T: Real>(self) -> T {
        match self {
            Sign::Plus => T::one(),
            Sign::Minus => -T::one(),
        }
    }
}

/// `∫|∇_A ψ|² ≥ ±∫B|ψ|²` with `b_mass` assembled from `B`.
pub fn magnetic_lower_bound_check<T: Real>(
    dirichlet_a: &HermitianForm<T>,
    b_mass: &WeightMass<T>,
    psi: &GridFunction<T>,
    sign: Sign,
) -> Result<InequalityCheck<T>> {
    check_layout(&dirichlet_a.layout, &b_mass.layout)?;
    let lhs = dirichlet_a.value(psi)?;
    let rhs = sign.factor::<T>() * b_mass.value(psi)?;
    Ok(InequalityCheck::new(lhs, rhs))
}
