//! Polar tensor grids on disks and annuli, nodal quadrature and grid functions.
//!
//! Radii follow `r_i = r_min + (r_max - r_min) (i / n_r)^grading`. The radial
//! weight of node `i` is `∫ hat_i(r) r dr` for the piecewise-linear hat
//! function centred at `r_i`, which is the trapezoidal rule applied to the
//! linear interpolant with the polar Jacobian integrated exactly. The angular
//! direction uses the uniform rule with `n_theta` sectors. When `r_min = 0`
//! the centre is a single node carrying the whole inner cell.

use crate::error::{Error, Result};
use crate::scalar::{czero, Real, C};

/// A point of the plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn from_polar(r: T, theta: T) -> Self {
        Self::new(r * theta.cos(), r * theta.sin())
    }

    pub fn r(&self) -> T {
        self.x.hypot(self.y)
    }

    /// Polar angle in `[0, 2π)`.
    pub fn theta(&self) -> T {
        let t = self.y.atan2(self.x);
        if t < T::zero() {
            t + T::TAU()
        } else {
            t
        }
    }
}

/// Node of a [`PolarGrid`].
#[derive(Clone, Copy, Debug)]
pub struct Node<T> {
    /// Ring index; ring 0 is the centre (single node) or the inner ring.
    pub ring: usize,
    /// Angular sector index (0 for the centre node).
    pub sector: usize,
    pub r: T,
    pub theta: T,
    pub point: Point<T>,
    /// Quadrature weight approximating `r dr dθ` over the node's cell.
    pub weight: T,
    pub dirichlet: bool,
}

/// How [`sample`] treats Dirichlet nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleMode {
    /// Nodal values as evaluated.
    Raw,
    /// Dirichlet nodes forced to zero.
    TestFunction,
}

/// Tensor polar grid with Dirichlet markers on the outer ring (and on the
/// inner ring of an annulus).
#[derive(Clone, Debug)]
pub struct PolarGrid<T> {
    radii: Vec<T>,
    n_theta: usize,
    grading: T,
    ring_mass: Vec<T>,
    nodes: Vec<Node<T>>,
    dof_of_node: Vec<Option<usize>>,
    node_of_dof: Vec<usize>,
}

// 8-point Gauss–Legendre rule on [-1, 1].
const GAUSS8_X: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329_0,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GAUSS8_W: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362_0,
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Builds a polar grid on `r_min ≤ |x| ≤ r_max`.
pub fn build_grid<T: Real>(
    r_min: T,
    r_max: T,
    n_r: usize,
    n_theta: usize,
    grading: T,
) -> Result<PolarGrid<T>> {
    if !(r_min.is_finite() && r_max.is_finite()) || r_min < T::zero() || r_min >= r_max {
        return Err(Error::InvalidGrid(format!(
            "radii must satisfy 0 <= r_min < r_max (got r_min = {r_min}, r_max = {r_max})"
        )));
    }
    if n_r < 4 {
        return Err(Error::InvalidGrid(format!("n_r must be >= 4 (got {n_r})")));
    }
    if n_theta < 8 || n_theta % 2 != 0 {
        return Err(Error::InvalidGrid(format!(
            "n_theta must be even and >= 8 (got {n_theta})"
        )));
    }
    if !(grading.is_finite() && grading > T::zero()) {
        return Err(Error::InvalidGrid(format!(
            "grading exponent must be positive (got {grading})"
        )));
    }

    let span = r_max - r_min;
    let radii: Vec<T> = (0..=n_r)
        .map(|i| {
            if i == n_r {
                r_max
            } else {
                r_min + span * (T::of(i) / T::of(n_r)).powf(grading)
            }
        })
        .collect();
    for w in radii.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidGrid(
                "radii are not strictly increasing (grading too strong for n_r)".into(),
            ));
        }
    }

    // ∫ hat_i(r) r dr for the piecewise-linear hats.
    let three = T::lit(3.0);
    let six = T::lit(6.0);
    let ring_mass: Vec<T> = (0..=n_r)
        .map(|i| {
            let mut m = T::zero();
            if i > 0 {
                let hl = radii[i] - radii[i - 1];
                m += radii[i - 1] * hl / T::two() + hl * hl / three;
            }
            if i < n_r {
                let hr = radii[i + 1] - radii[i];
                m += radii[i] * hr / T::two() + hr * hr / six;
            }
            m
        })
        .collect();

    let dtheta = T::TAU() / T::of(n_theta);
    let has_origin = r_min == T::zero();
    let mut nodes = Vec::new();
    for (i, &r) in radii.iter().enumerate() {
        let dirichlet = i == n_r || (i == 0 && !has_origin);
        if i == 0 && has_origin {
            nodes.push(Node {
                ring: 0,
                sector: 0,
                r,
                theta: T::zero(),
                point: Point::new(T::zero(), T::zero()),
                weight: ring_mass[0] * T::TAU(),
                dirichlet: false,
            });
            continue;
        }
        for j in 0..n_theta {
            let theta = dtheta * T::of(j);
            nodes.push(Node {
                ring: i,
                sector: j,
                r,
                theta,
                point: Point::from_polar(r, theta),
                weight: ring_mass[i] * dtheta,
                dirichlet,
            });
        }
    }

    let mut dof_of_node = Vec::with_capacity(nodes.len());
    let mut node_of_dof = Vec::new();
    for (k, node) in nodes.iter().enumerate() {
        if node.dirichlet {
            dof_of_node.push(None);
        } else {
            dof_of_node.push(Some(node_of_dof.len()));
            node_of_dof.push(k);
        }
    }

    Ok(PolarGrid {
        radii,
        n_theta,
        grading,
        ring_mass,
        nodes,
        dof_of_node,
        node_of_dof,
    })
}

impl<T: Real> PolarGrid<T> {
    pub fn n_r(&self) -> usize {
        self.radii.len() - 1
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn r_min(&self) -> T {
        self.radii[0]
    }

    pub fn r_max(&self) -> T {
        self.radii[self.radii.len() - 1]
    }

    pub fn grading(&self) -> T {
        self.grading
    }

    pub fn radii(&self) -> &[T] {
        &self.radii
    }

    pub fn dtheta(&self) -> T {
        T::TAU() / T::of(self.n_theta)
    }

    /// True when the grid is a full disk whose centre is a node.
    pub fn has_origin(&self) -> bool {
        self.radii[0] == T::zero()
    }

    pub fn nodes(&self) -> &[Node<T>] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Radial weight `∫ hat_i(r) r dr` of ring `i`.
    pub fn ring_mass(&self, ring: usize) -> T {
        self.ring_mass[ring]
    }

    /// Index of the node on ring `ring`, sector `sector`.
    pub fn node_index(&self, ring: usize, sector: usize) -> usize {
        if self.has_origin() {
            if ring == 0 {
                0
            } else {
                1 + (ring - 1) * self.n_theta + sector % self.n_theta
            }
        } else {
            ring * self.n_theta + sector % self.n_theta
        }
    }

    /// Number of unknowns once Dirichlet nodes are eliminated.
    pub fn dof_count(&self) -> usize {
        self.node_of_dof.len()
    }

    pub fn dof_of_node(&self, node: usize) -> Option<usize> {
        self.dof_of_node[node]
    }

    pub fn node_of_dof(&self, dof: usize) -> usize {
        self.node_of_dof[dof]
    }

    pub fn quad_weights(&self) -> impl Iterator<Item = T> + '_ {
        self.nodes.iter().map(|n| n.weight)
    }

    pub fn total_weight(&self) -> T {
        self.quad_weights().sum()
    }

    /// Smallest radial spacing of the grid.
    pub fn min_spacing(&self) -> T {
        self.radii
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(T::infinity(), T::min)
    }

    /// Value of a pointwise weight to be multiplied by the node's quadrature
    /// weight. The centre node falls back to the hat-weighted cell average
    /// when the pointwise value is not finite (integrable singularities such
    /// as `1/r`).
    pub fn node_weight_value<F>(&self, node: usize, w: &F) -> T
    where
        F: Fn(Point<T>) -> T + ?Sized,
    {
        let n = &self.nodes[node];
        let v = w(n.point);
        if v.is_finite() || !(self.has_origin() && node == 0) {
            return v;
        }
        self.center_cell_average(w)
    }

    fn center_cell_average<F>(&self, w: &F) -> T
    where
        F: Fn(Point<T>) -> T + ?Sized,
    {
        let h = self.radii[1];
        let n_ang = 16usize;
        let mut acc = T::zero();
        let mut norm = T::zero();
        for (gx, gw) in GAUSS8_X.iter().zip(GAUSS8_W.iter()) {
            let r = h * (T::lit(*gx) + T::one()) / T::two();
            let hat = T::one() - r / h;
            let rw = T::lit(*gw) * hat * r;
            for k in 0..n_ang {
                let theta = T::TAU() * (T::of(k) + T::half()) / T::of(n_ang);
                acc += rw * w(Point::from_polar(r, theta));
                norm += rw;
            }
        }
        acc / norm
    }

    /// Restricts nodal values to the unknowns (Dirichlet nodes dropped).
    pub fn restrict(&self, f: &GridFunction<T>) -> Result<Vec<C<T>>> {
        self.check(f)?;
        Ok(self.node_of_dof.iter().map(|&k| f.values[k]).collect())
    }

    /// Extends an unknown vector to all nodes with zero Dirichlet values.
    pub fn extend(&self, v: &[C<T>]) -> Result<GridFunction<T>> {
        if v.len() != self.dof_count() {
            return Err(Error::Dimension {
                expected: self.dof_count(),
                got: v.len(),
            });
        }
        let mut values = vec![czero(); self.node_count()];
        for (d, &k) in self.node_of_dof.iter().enumerate() {
            values[k] = v[d];
        }
        Ok(GridFunction { values })
    }

    pub(crate) fn check(&self, f: &GridFunction<T>) -> Result<()> {
        if f.values.len() != self.node_count() {
            return Err(Error::Dimension {
                expected: self.node_count(),
                got: f.values.len(),
            });
        }
        Ok(())
    }

    /// Quadrature of a pointwise integrand: `Σ weight · f(x)`, with the centre
    /// handled as in [`PolarGrid::node_weight_value`].
    pub fn integrate_scalar<F>(&self, f: F) -> Result<T>
    where
        F: Fn(Point<T>) -> T,
    {
        let mut acc = T::zero();
        for (k, n) in self.nodes.iter().enumerate() {
            let v = self.node_weight_value(k, &f);
            if !v.is_finite() {
                return Err(non_finite(k, n, "integrand"));
            }
            acc += n.weight * v;
        }
        Ok(acc)
    }
}

/// Grid parameters independent of the truncation radius, so that sweeps
/// over `r_max` keep the node counts and the ratio `r_min / r_max`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec<T> {
    pub n_r: usize,
    pub n_theta: usize,
    pub r_max: T,
    /// `r_min / r_max`; zero for a full disk.
    pub inner_ratio: T,
    pub grading: T,
}

impl<T: Real> GridSpec<T> {
    pub fn disk(n_r: usize, n_theta: usize, r_max: T, grading: T) -> Self {
        Self {
            n_r,
            n_theta,
            r_max,
            inner_ratio: T::zero(),
            grading,
        }
    }

    pub fn annulus(n_r: usize, n_theta: usize, r_max: T, inner_ratio: T, grading: T) -> Self {
        Self {
            n_r,
            n_theta,
            r_max,
            inner_ratio,
            grading,
        }
    }

    pub fn with_r_max(&self, r_max: T) -> Self {
        Self { r_max, ..*self }
    }

    pub fn build(&self) -> Result<PolarGrid<T>> {
        build_grid(
            self.inner_ratio * self.r_max,
            self.r_max,
            self.n_r,
            self.n_theta,
            self.grading,
        )
    }
}

pub(crate) fn non_finite<T: Real>(k: usize, n: &Node<T>, what: &str) -> Error {
    Error::NonFinite {
        node: k,
        r: n.r.to_f64_lossy(),
        theta: n.theta.to_f64_lossy(),
        what: what.to_string(),
    }
}

/// Complex nodal values on a [`PolarGrid`] (boundary nodes included).
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction<T> {
    pub values: Vec<C<T>>,
}

impl<T: Real> GridFunction<T> {
    pub fn zeros(grid: &PolarGrid<T>) -> Self {
        Self {
            values: vec![czero(); grid.node_count()],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Nodewise modulus as a real-valued grid function.
    pub fn modulus(&self) -> Self {
        Self {
            values: self.values.iter().map(|z| C::new(z.norm(), T::zero())).collect(),
        }
    }
}

/// `Σ_nodes quad_weight · w(x) · |ψ(x)|²`.
pub fn integrate<T, F>(grid: &PolarGrid<T>, w: F, psi: &GridFunction<T>) -> Result<T>
where
    T: Real,
    F: Fn(Point<T>) -> T,
{
    grid.check(psi)?;
    let mut acc = T::zero();
    for (k, n) in grid.nodes.iter().enumerate() {
        let a = psi.values[k].norm_sqr();
        if n.weight == T::zero() {
            continue;
        }
        let wv = grid.node_weight_value(k, &w);
        if !wv.is_finite() {
            return Err(non_finite(k, n, "weight"));
        }
        if !a.is_finite() {
            return Err(non_finite(k, n, "grid function"));
        }
        acc += n.weight * wv * a;
    }
    Ok(acc)
}

/// Samples a pointwise function at every node.
pub fn sample<T, F>(grid: &PolarGrid<T>, f: F, mode: SampleMode) -> Result<GridFunction<T>>
where
    T: Real,
    F: Fn(Point<T>) -> C<T>,
{
    let mut values = Vec::with_capacity(grid.node_count());
    for (k, n) in grid.nodes.iter().enumerate() {
        let v = f(n.point);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(non_finite(k, n, "sampled function"));
        }
        if mode == SampleMode::TestFunction && n.dirichlet {
            values.push(czero());
        } else {
            values.push(v);
        }
    }
    Ok(GridFunction { values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn unit_disk_area() {
        let g = build_grid(0.0, 1.0, 16, 8, 1.0).unwrap();
        assert!((g.total_weight() - PI).abs() < 1e-12);
        assert!(g.nodes().iter().all(|n| n.weight > 0.0));
    }

    #[test]
    fn annulus_area_with_grading() {
        let g = build_grid(1.0, 2.0, 8, 8, 1.7).unwrap();
        assert!((g.total_weight() - 3.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn graded_ab_grid_concentrates_near_inner_ring() {
        let g = build_grid(0.01, 20.0, 64, 16, 2.0).unwrap();
        let uniform = (20.0 - 0.01) / 64.0;
        assert!(g.radii()[1] - g.radii()[0] < uniform);
        assert!(!g.has_origin());
        assert_eq!(g.dof_count(), 63 * 16);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(build_grid(1.0, 1.0, 8, 8, 1.0).is_err());
        assert!(build_grid(-0.1, 1.0, 8, 8, 1.0).is_err());
        assert!(build_grid(0.0, 1.0, 3, 8, 1.0).is_err());
        assert!(build_grid(0.0, 1.0, 8, 6, 1.0).is_err());
        assert!(build_grid(0.0, 1.0, 8, 9, 1.0).is_err());
        assert!(build_grid(0.0, 1.0, 8, 8, 0.0).is_err());
    }

    #[test]
    fn integrate_inverse_radius_on_annulus() {
        let g = build_grid(1.0, 2.0, 256, 8, 1.0).unwrap();
        let one = sample(&g, |_| C::new(1.0, 0.0), SampleMode::Raw).unwrap();
        let v = integrate(&g, |p| 1.0 / p.r(), &one).unwrap();
        assert!((v - 2.0 * PI).abs() < 1e-5, "{v}");
        let v = integrate(&g, |p| 1.0 / (p.r() * p.r()), &one).unwrap();
        let exact = 2.0 * PI * 2f64.ln();
        assert!((v - exact).abs() < 1e-5 * exact, "{v} vs {exact}");
    }

    #[test]
    fn zero_function_integrates_to_zero() {
        let g = build_grid(0.0, 1.0, 8, 8, 1.0).unwrap();
        let z = GridFunction::zeros(&g);
        assert_eq!(integrate(&g, |_| 1.0, &z).unwrap(), 0.0);
    }

    #[test]
    fn non_finite_weight_names_node() {
        let g = build_grid(1.0, 2.0, 8, 8, 1.0).unwrap();
        let one = sample(&g, |_| C::new(1.0, 0.0), SampleMode::Raw).unwrap();
        let err = integrate(&g, |p| if p.r() > 1.9 { f64::NAN } else { 1.0 }, &one)
            .unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }));
    }

    #[test]
    fn singular_weight_at_centre_uses_cell_average() {
        let g = build_grid(0.0, 1.0, 64, 8, 1.0).unwrap();
        let one = sample(&g, |_| C::new(1.0, 0.0), SampleMode::Raw).unwrap();
        // ∫_{|x|<1} 1/|x| dx = 2π
        let v = integrate(&g, |p| 1.0 / p.r(), &one).unwrap();
        assert!((v - 2.0 * PI).abs() < 1e-3, "{v}");
    }

    #[test]
    fn gaussian_tail_is_tiny_and_clamped() {
        let g = build_grid(0.0f64, 10.0, 32, 8, 1.0).unwrap();
        let raw = sample(&g, |p| C::new((-p.r() * p.r() / 2.0).exp(), 0.0), SampleMode::Raw)
            .unwrap();
        for (n, v) in g.nodes().iter().zip(&raw.values) {
            if n.dirichlet {
                assert!(v.re < 1e-21);
            }
        }
        let test =
            sample(&g, |p| C::new((-p.r() * p.r() / 2.0).exp(), 0.0), SampleMode::TestFunction)
                .unwrap();
        assert!(g
            .nodes()
            .iter()
            .zip(&test.values)
            .all(|(n, v)| !n.dirichlet || v.re == 0.0));
    }

    #[test]
    fn first_coordinate_squared_moment() {
        let g = build_grid(0.0, 1.0, 512, 8, 1.0).unwrap();
        let f = sample(&g, |p| C::new(p.x, 0.0), SampleMode::Raw).unwrap();
        let v = integrate(&g, |_| 1.0, &f).unwrap();
        assert!((v - PI / 4.0).abs() < 1e-5, "{v}");
    }

    #[test]
    fn second_order_refinement() {
        // Smooth integrand e^{-r²} cos²θ on the disk of radius 2.
        let exact = PI / 2.0 * (1.0 - (-4.0f64).exp());
        let err = |n: usize| {
            let g = build_grid(0.0f64, 2.0, n, 2 * n, 1.0).unwrap();
            let f = sample(&g, |p| C::new(p.theta().cos(), 0.0), SampleMode::Raw).unwrap();
            (integrate(&g, |p| (-p.r() * p.r()).exp(), &f).unwrap() - exact).abs()
        };
        let ratio = err(32) / err(64);
        assert!(ratio >= 3.5, "ratio {ratio}");
    }

    #[test]
    fn works_in_single_precision() {
        let g = build_grid(0.0f32, 1.0, 16, 8, 1.0).unwrap();
        assert!((g.total_weight() - std::f32::consts::PI).abs() < 1e-5);
    }
}
