//! Magnetic fields, vector potentials and flux quantities.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mesh::{Point, PolarGrid};
use crate::scalar::{Real, C};

/// One polynomial piece `B(r) = Σ_k c_k (r - start)^k` on `[start, end)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldPiece<T> {
    pub start: T,
    pub end: T,
    pub coeffs: Vec<T>,
}

impl<T: Real> FieldPiece<T> {
    fn eval(&self, r: T) -> T {
        let t = r - self.start;
        self.coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * t + c)
    }

    /// `∫_start^{start+t} B(s) s ds`, exact.
    fn flux_increment(&self, t: T) -> T {
        let a = self.start;
        let mut acc = T::zero();
        let mut tp = t; // t^{k+1}
        for (k, &c) in self.coeffs.iter().enumerate() {
            let k1 = T::of(k + 1);
            let k2 = T::of(k + 2);
            acc += c * (a * tp / k1 + tp * t / k2);
            tp = tp * t;
        }
        acc
    }

    /// Derivative of [`FieldPiece::flux_increment`] in `t`.
    fn flux_increment_derivative(&self, t: T) -> T {
        let a = self.start;
        let mut acc = T::zero();
        let mut tk = T::one();
        for &c in &self.coeffs {
            acc += c * (a * tk + tk * t);
            tk = tk * t;
        }
        acc
    }
}

/// Radial magnetic field `B(|x|)` given by polynomial pieces partitioning
/// `[0, support_radius)`; the field vanishes beyond the support.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialFieldProfile<T> {
    pieces: Vec<FieldPiece<T>>,
}

impl<T: Real> RadialFieldProfile<T> {
    pub fn new(pieces: Vec<FieldPiece<T>>) -> Result<Self> {
        if pieces.is_empty() {
            return Ok(Self::zero());
        }
        if pieces[0].start != T::zero() {
            return Err(Error::InvalidProfile("first piece must start at r = 0".into()));
        }
        for (i, p) in pieces.iter().enumerate() {
            if !p.start.is_finite() || p.end <= p.start || p.end.is_nan() {
                return Err(Error::InvalidProfile(format!("piece {i} has an empty interval")));
            }
            if p.end.is_infinite() && i + 1 != pieces.len() {
                return Err(Error::InvalidProfile(
                    "only the last piece may extend to infinity".into(),
                ));
            }
            if i + 1 < pieces.len() && pieces[i + 1].start != p.end {
                return Err(Error::InvalidProfile(format!(
                    "pieces {i} and {} do not partition the support",
                    i + 1
                )));
            }
            if p.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidProfile(format!(
                    "piece {i} has non-finite coefficients (r·B not locally integrable)"
                )));
            }
        }
        Ok(Self { pieces })
    }

    pub fn zero() -> Self {
        Self { pieces: Vec::new() }
    }

    /// `B = strength · 1_{r ≤ radius}`.
    pub fn step(strength: T, radius: T) -> Result<Self> {
        if !(radius > T::zero()) {
            return Err(Error::InvalidProfile("step radius must be positive".into()));
        }
        Self::new(vec![FieldPiece {
            start: T::zero(),
            end: radius,
            coeffs: vec![strength],
        }])
    }

    /// Constant field on the whole plane.
    pub fn constant(strength: T) -> Result<Self> {
        Self::new(vec![FieldPiece {
            start: T::zero(),
            end: T::infinity(),
            coeffs: vec![strength],
        }])
    }

    /// Piecewise Taylor approximation of `amplitude · exp(-(r/width)²)`,
    /// truncated at `cutoff · width`. Pieces have length `0.05 · width` and
    /// degree 12, which keeps the pointwise error below `1e-12 · amplitude`.
    pub fn gaussian_poly(amplitude: T, width: T, cutoff: T) -> Result<Self> {
        if !(width > T::zero()) || !(cutoff > T::zero()) {
            return Err(Error::InvalidProfile("width and cutoff must be positive".into()));
        }
        let degree = 12;
        let step = T::lit(0.05);
        let n = (cutoff / step).ceil().to_usize().unwrap_or(0).max(1);
        let mut pieces = Vec::with_capacity(n);
        for i in 0..n {
            // In the scaled variable s = r / width: exp(-(a + τ)²) with
            // Taylor coefficients from (k+1) f_{k+1} = -2a f_k - 2 f_{k-1}.
            let a = step * T::of(i);
            let b = (step * T::of(i + 1)).min(cutoff);
            let mut f = vec![T::zero(); degree + 1];
            f[0] = (-a * a).exp();
            for k in 0..degree {
                let prev = if k > 0 { f[k - 1] } else { T::zero() };
                f[k + 1] = (-T::two() * a * f[k] - T::two() * prev) / T::of(k + 1);
            }
            let mut scale = T::one();
            let coeffs = f
                .iter()
                .map(|&c| {
                    let v = amplitude * c / scale;
                    scale = scale * width;
                    v
                })
                .collect();
            pieces.push(FieldPiece {
                start: a * width,
                end: b * width,
                coeffs,
            });
        }
        Self::new(pieces)
    }

    pub fn pieces(&self) -> &[FieldPiece<T>] {
        &self.pieces
    }

    /// Radius beyond which the field vanishes (`∞` allowed).
    pub fn support_radius(&self) -> T {
        self.pieces.last().map_or(T::zero(), |p| p.end)
    }

    pub fn is_zero(&self) -> bool {
        self.pieces
            .iter()
            .all(|p| p.coeffs.iter().all(|&c| c == T::zero()))
    }

    fn piece_index(&self, r: T) -> Option<usize> {
        if self.pieces.is_empty() || r >= self.support_radius() || r < T::zero() {
            return None;
        }
        let i = self.pieces.partition_point(|p| p.end <= r);
        Some(i)
    }

    /// `B(r)`; pieces are half-open so `B` is right-continuous.
    pub fn field(&self, r: T) -> T {
        match self.piece_index(r) {
            Some(i) => self.pieces[i].eval(r),
            None => T::zero(),
        }
    }

    /// Left limit `B(r⁻)`.
    pub fn field_left(&self, r: T) -> T {
        if r <= T::zero() {
            return self.field(T::zero());
        }
        let i = self.pieces.partition_point(|p| p.end < r);
        if i < self.pieces.len() {
            self.pieces[i].eval(r)
        } else {
            T::zero()
        }
    }

    /// Average of the one-sided limits, equal to `B(r)` where `B` is continuous.
    pub fn field_midvalue(&self, r: T) -> T {
        (self.field_left(r) + self.field(r)) / T::two()
    }

    /// Piece end points, where `B` may jump.
    pub fn breakpoints(&self) -> Vec<T> {
        self.pieces
            .iter()
            .map(|p| p.end)
            .filter(|e| e.is_finite())
            .collect()
    }

    /// Sup of `|B|` over the support, sampled at piece ends and 64 interior
    /// points per piece.
    pub fn sup_abs(&self) -> T {
        let mut m = T::zero();
        for p in &self.pieces {
            let end = if p.end.is_finite() { p.end } else { p.start + T::one() };
            for k in 0..=64 {
                let r = p.start + (end - p.start) * T::of(k) / T::lit(64.0);
                m = m.max(p.eval(r).abs());
            }
        }
        m
    }
}

/// Magnetic flux `Φ_B(r) = ∫_0^r B(s) s ds`, the radial form of
/// `(1/2π) ∫_{|ξ| ≤ r} B`.
#[derive(Clone, Debug, PartialEq)]
pub struct FluxFunction<T> {
    profile: RadialFieldProfile<T>,
    cumulative: Vec<T>,
}

impl<T: Real> FluxFunction<T> {
    pub fn profile(&self) -> &RadialFieldProfile<T> {
        &self.profile
    }

    pub fn eval(&self, r: T) -> T {
        let r = r.max(T::zero());
        let pieces = &self.profile.pieces;
        if pieces.is_empty() {
            return T::zero();
        }
        if r >= self.profile.support_radius() {
            return self.cumulative[pieces.len()];
        }
        let i = pieces.partition_point(|p| p.end <= r);
        self.cumulative[i] + pieces[i].flux_increment(r - pieces[i].start)
    }

    /// `Φ_B'(r)` from the analytic derivative of the piecewise antiderivative.
    pub fn derivative(&self, r: T) -> T {
        match self.profile.piece_index(r) {
            Some(i) => {
                let p = &self.profile.pieces[i];
                p.flux_increment_derivative(r - p.start)
            }
            None => T::zero(),
        }
    }

    /// `lim_{r→∞} Φ_B(r)`; `None` when the support is unbounded and the
    /// field does not vanish.
    pub fn total_flux(&self) -> Option<T> {
        if self.profile.support_radius().is_infinite() && !self.profile.is_zero() {
            None
        } else {
            Some(self.cumulative[self.profile.pieces.len()])
        }
    }
}

/// Builds the flux function of a radial profile.
pub fn flux_profile<T: Real>(field: &RadialFieldProfile<T>) -> FluxFunction<T> {
    let mut cumulative = Vec::with_capacity(field.pieces.len() + 1);
    let mut acc = T::zero();
    cumulative.push(acc);
    for p in &field.pieces {
        if p.end.is_finite() {
            acc += p.flux_increment(p.end - p.start);
        }
        cumulative.push(acc);
    }
    FluxFunction {
        profile: field.clone(),
        cumulative,
    }
}

/// `dist(x, ℤ) ∈ [0, 1/2]`.
pub fn flux_distance<T: Real>(mean_flux: T) -> T {
    (mean_flux - mean_flux.round()).abs()
}

/// Angular flux density `α(θ) = ᾱ + Σ_k (a_k cos kθ + b_k sin kθ)` of an
/// Aharonov–Bohm potential.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AngularFluxDensity<T> {
    mean: T,
    cos: Vec<T>,
    sin: Vec<T>,
}

impl<T: Real> AngularFluxDensity<T> {
    pub fn constant(mean: T) -> Self {
        Self {
            mean,
            cos: Vec::new(),
            sin: Vec::new(),
        }
    }

    /// Trigonometric series; `cos[k-1]`, `sin[k-1]` multiply `cos kθ`, `sin kθ`.
    pub fn series(mean: T, cos: Vec<T>, sin: Vec<T>) -> Result<Self> {
        if !mean.is_finite() || cos.iter().chain(&sin).any(|c| !c.is_finite()) {
            return Err(Error::InvalidProfile("flux density must be bounded".into()));
        }
        Ok(Self { mean, cos, sin })
    }

    /// Trigonometric interpolant of equispaced samples `α(2πj/N)`.
    pub fn from_samples(samples: &[T]) -> Result<Self> {
        let n = samples.len();
        if n == 0 || samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidProfile("need finite, non-empty samples".into()));
        }
        let nf = T::of(n);
        let mean = samples.iter().copied().sum::<T>() / nf;
        let kmax = (n - 1) / 2;
        let mut cos = Vec::with_capacity(kmax);
        let mut sin = Vec::with_capacity(kmax);
        for k in 1..=kmax {
            let (mut a, mut b) = (T::zero(), T::zero());
            for (j, &s) in samples.iter().enumerate() {
                let th = T::TAU() * T::of(j * k % n) / nf;
                a += s * th.cos();
                b += s * th.sin();
            }
            cos.push(T::two() * a / nf);
            sin.push(T::two() * b / nf);
        }
        Ok(Self { mean, cos, sin })
    }

    pub fn value(&self, theta: T) -> T {
        let mut v = self.mean;
        for (k, (&a, b)) in self.cos.iter().zip(self.padded_sin()).enumerate() {
            let kt = T::of(k + 1) * theta;
            v += a * kt.cos() + b * kt.sin();
        }
        for (k, &b) in self.sin.iter().enumerate().skip(self.cos.len()) {
            v += b * (T::of(k + 1) * theta).sin();
        }
        v
    }

    fn padded_sin(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.cos.len()).map(|k| self.sin.get(k).copied().unwrap_or(T::zero()))
    }

    /// `ᾱ = (1/2π) ∫ α`.
    pub fn mean_flux(&self) -> T {
        self.mean
    }

    /// `β = dist(ᾱ, ℤ)`.
    pub fn flux_distance(&self) -> T {
        flux_distance(self.mean)
    }

    /// True when `ᾱ ∈ ℤ`, in which case the potential is a pure gauge.
    pub fn can_be_gauged_out(&self) -> bool {
        self.flux_distance() == T::zero()
    }

    /// Exact `∫_{θ0}^{θ1} α(θ) dθ`.
    pub fn integral(&self, theta0: T, theta1: T) -> T {
        let mut v = self.mean * (theta1 - theta0);
        let n = self.cos.len().max(self.sin.len());
        for k in 0..n {
            let kf = T::of(k + 1);
            let a = self.cos.get(k).copied().unwrap_or(T::zero());
            let b = self.sin.get(k).copied().unwrap_or(T::zero());
            v += a / kf * ((kf * theta1).sin() - (kf * theta0).sin());
            v -= b / kf * ((kf * theta1).cos() - (kf * theta0).cos());
        }
        v
    }

    /// Highest harmonic present.
    pub fn bandwidth(&self) -> usize {
        self.cos.len().max(self.sin.len())
    }

    /// Complex Fourier coefficient `α̂_k` with `α(θ) = Σ α̂_k e^{ikθ}`.
    pub fn fourier(&self, k: i64) -> C<T> {
        if k == 0 {
            return C::new(self.mean, T::zero());
        }
        let idx = (k.unsigned_abs() - 1) as usize;
        let a = self.cos.get(idx).copied().unwrap_or(T::zero());
        let b = self.sin.get(idx).copied().unwrap_or(T::zero());
        let s = if k > 0 { -T::one() } else { T::one() };
        C::new(a / T::two(), s * b / T::two())
    }
}

/// Gauge tag of a vector potential.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Gauge {
    TransverseRadial,
    AharonovBohm,
    Explicit,
}

/// Pointwise vector field evaluator.
pub type VectorFn<T> = Arc<dyn Fn(Point<T>) -> [T; 2] + Send + Sync>;
/// Pointwise scalar field evaluator.
pub type ScalarFn<T> = Arc<dyn Fn(Point<T>) -> T + Send + Sync>;

#[derive(Clone)]
pub(crate) enum Source<T> {
    Transverse(FluxFunction<T>),
    AharonovBohm(AngularFluxDensity<T>),
    Explicit {
        potential: VectorFn<T>,
        field: Option<ScalarFn<T>>,
    },
}

/// Vector potential `A : ℝ² → ℝ²` together with the data needed to compute
/// exact link phases and the declared magnetic field.
#[derive(Clone)]
pub struct VectorPotentialField<T> {
    pub(crate) source: Source<T>,
}

impl<T: Real> fmt::Debug for VectorPotentialField<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VectorPotentialField")
            .field("gauge", &self.gauge())
            .field("origin_singular", &self.origin_singular())
            .finish()
    }
}

/// `A(x) = (-x₂, x₁) Φ_B(|x|) / |x|²`, with `A(0) = 0`.
pub fn transverse_gauge<T: Real>(field: &RadialFieldProfile<T>) -> VectorPotentialField<T> {
    VectorPotentialField {
        source: Source::Transverse(flux_profile(field)),
    }
}

/// `A(x) = (-sin θ, cos θ) α(θ) / r`.
pub fn ab_potential<T: Real>(alpha: &AngularFluxDensity<T>) -> VectorPotentialField<T> {
    VectorPotentialField {
        source: Source::AharonovBohm(alpha.clone()),
    }
}

/// Arbitrary potential; link phases use the midpoint rule on straight edges.
/// `field` is the declared `B = ∂₁A₂ - ∂₂A₁`, used by [`curl_check`].
pub fn explicit_potential<T: Real>(
    potential: VectorFn<T>,
    field: Option<ScalarFn<T>>,
) -> VectorPotentialField<T> {
    VectorPotentialField {
        source: Source::Explicit { potential, field },
    }
}

impl<T: Real> VectorPotentialField<T> {
    pub fn gauge(&self) -> Gauge {
        match self.source {
            Source::Transverse(_) => Gauge::TransverseRadial,
            Source::AharonovBohm(_) => Gauge::AharonovBohm,
            Source::Explicit { .. } => Gauge::Explicit,
        }
    }

    /// True when `|A|` does not stay bounded at the origin.
    pub fn origin_singular(&self) -> bool {
        match &self.source {
            // Φ_B(r)/r → 0 for piecewise-polynomial (hence bounded) fields.
            Source::Transverse(_) => false,
            Source::AharonovBohm(_) => true,
            Source::Explicit { .. } => false,
        }
    }

    pub fn flux_function(&self) -> Option<&FluxFunction<T>> {
        match &self.source {
            Source::Transverse(f) => Some(f),
            _ => None,
        }
    }

    pub fn angular_density(&self) -> Option<&AngularFluxDensity<T>> {
        match &self.source {
            Source::AharonovBohm(a) => Some(a),
            _ => None,
        }
    }

    /// Angular component `A · e_θ` for the radial gauges.
    pub fn angular_component(&self, p: Point<T>) -> Result<T> {
        let r = p.r();
        match &self.source {
            Source::Transverse(f) => Ok(if r == T::zero() {
                T::zero()
            } else {
                f.eval(r) / r
            }),
            Source::AharonovBohm(a) => {
                if r == T::zero() {
                    Err(Error::Domain("Aharonov–Bohm potential is singular at x = 0".into()))
                } else {
                    Ok(a.value(p.theta()) / r)
                }
            }
            Source::Explicit { potential, .. } => {
                if r == T::zero() {
                    return Ok(T::zero());
                }
                let a = potential(p);
                Ok((-a[0] * p.y + a[1] * p.x) / r)
            }
        }
    }

    pub fn eval(&self, p: Point<T>) -> Result<[T; 2]> {
        match &self.source {
            Source::Explicit { potential, .. } => Ok(potential(p)),
            _ => {
                let r = p.r();
                if r == T::zero() {
                    // Aharonov–Bohm errors here; transverse gauge is 0.
                    self.angular_component(p)?;
                    return Ok([T::zero(), T::zero()]);
                }
                let at = self.angular_component(p)?;
                Ok([-at * p.y / r, at * p.x / r])
            }
        }
    }

    /// Declared magnetic field `B(x)` (the Aharonov–Bohm field is zero away
    /// from the origin). At jumps of a radial profile the mean of the
    /// one-sided limits is returned.
    pub fn declared_field(&self, p: Point<T>) -> Option<T> {
        match &self.source {
            Source::Transverse(f) => Some(f.profile().field_midvalue(p.r())),
            Source::AharonovBohm(_) => Some(T::zero()),
            Source::Explicit { field, .. } => field.as_ref().map(|b| b(p)),
        }
    }

    /// Magnetic field `B(x)` as a pointwise weight (right-continuous for
    /// radial profiles).
    pub fn field_value(&self, p: Point<T>) -> T {
        match &self.source {
            Source::Transverse(f) => f.profile().field(p.r()),
            Source::AharonovBohm(_) => T::zero(),
            Source::Explicit { field, .. } => field.as_ref().map_or(T::zero(), |b| b(p)),
        }
    }
}

/// Maximum discrepancy between the finite-difference curl of `A` and the
/// declared field over interior nodes (centre and Dirichlet rings excluded).
///
/// Uses the polar form `B = r⁻¹ [∂_r(r A_θ) - ∂_θ A_r]` with central
/// differences between neighbouring nodes.
pub fn curl_check<T: Real>(a: &VectorPotentialField<T>, grid: &PolarGrid<T>) -> Result<T> {
    let radii = grid.radii();
    let n_r = grid.n_r();
    let nt = grid.n_theta();
    let dth = grid.dtheta();
    let components = |p: Point<T>| -> Result<(T, T)> {
        let v = a.eval(p)?;
        let r = p.r();
        let (c, s) = (p.x / r, p.y / r);
        Ok((v[0] * c + v[1] * s, -v[0] * s + v[1] * c))
    };
    let mut worst = T::zero();
    for i in 1..n_r {
        let r = radii[i];
        if r == T::zero() {
            continue;
        }
        let (rm, rp) = (radii[i - 1], radii[i + 1]);
        for j in 0..nt {
            let th = dth * T::of(j);
            let p = Point::from_polar(r, th);
            let declared = a.declared_field(p).ok_or_else(|| {
                Error::Rejected("explicit potential has no declared field".into())
            })?;
            let at_p = if rp > T::zero() {
                components(Point::from_polar(rp, th))?.1 * rp
            } else {
                T::zero()
            };
            let at_m = if rm > T::zero() {
                components(Point::from_polar(rm, th))?.1 * rm
            } else {
                T::zero()
            };
            let ar_next = components(Point::from_polar(r, th + dth))?.0;
            let ar_prev = components(Point::from_polar(r, th - dth))?.0;
            let curl = ((at_p - at_m) / (rp - rm) - (ar_next - ar_prev) / (T::two() * dth)) / r;
            let d = (curl - declared).abs();
            if !d.is_finite() {
                return Err(Error::Domain(format!("non-finite curl at r = {r}")));
            }
            worst = worst.max(d);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_grid;

    #[test]
    fn zero_field_has_zero_flux() {
        let f = flux_profile(&RadialFieldProfile::<f64>::zero());
        assert_eq!(f.eval(3.0), 0.0);
        assert_eq!(f.total_flux(), Some(0.0));
    }

    #[test]
    fn step_flux_is_piecewise_quadratic() {
        let f = flux_profile(&RadialFieldProfile::step(1.0f64, 0.25).unwrap());
        for &r in &[0.0, 0.1, 0.2, 0.25] {
            assert!((f.eval(r) - r * r / 2.0).abs() < 1e-15);
        }
        for &r in &[0.3, 1.0, 100.0] {
            assert!((f.eval(r) - 1.0 / 32.0).abs() < 1e-15);
        }
        assert_eq!(f.total_flux(), Some(1.0 / 32.0));
    }

    #[test]
    fn gaussian_flux_matches_antiderivative() {
        let p = RadialFieldProfile::gaussian_poly(1.0, 1.0, 7.0).unwrap();
        let f = flux_profile(&p);
        for k in 0..=140 {
            let r = k as f64 * 0.05;
            let exact = (1.0 - (-r * r).exp()) / 2.0;
            assert!((f.eval(r) - exact).abs() < 1e-12, "r = {r}");
            assert!((p.field(r) - (-r * r).exp()).abs() < 1e-12, "r = {r}");
        }
    }

    #[test]
    fn constant_field_flux_and_gauge() {
        let p = RadialFieldProfile::constant(2.0f64).unwrap();
        let f = flux_profile(&p);
        assert!((f.eval(3.0) - 9.0).abs() < 1e-12);
        assert_eq!(f.total_flux(), None);
        let a = transverse_gauge(&p);
        let v = a.eval(Point::new(0.3, -0.7)).unwrap();
        assert!((v[0] - 0.7).abs() < 1e-14 && (v[1] - 0.3).abs() < 1e-14);
    }

    #[test]
    fn profile_validation() {
        let bad = RadialFieldProfile::new(vec![FieldPiece {
            start: 0.0,
            end: 1.0,
            coeffs: vec![f64::INFINITY],
        }]);
        assert!(bad.is_err());
        let gap = RadialFieldProfile::new(vec![
            FieldPiece { start: 0.0, end: 1.0, coeffs: vec![1.0] },
            FieldPiece { start: 1.5, end: 2.0, coeffs: vec![1.0] },
        ]);
        assert!(gap.is_err());
        let late = RadialFieldProfile::new(vec![FieldPiece { start: 0.5, end: 1.0, coeffs: vec![1.0] }]);
        assert!(late.is_err());
    }

    #[test]
    fn step_gauge_modulus() {
        let a = transverse_gauge(&RadialFieldProfile::step(1.0f64, 0.25).unwrap());
        let inside = Point::from_polar(0.2, 1.1);
        let outside = Point::from_polar(2.0, 4.0);
        let m = |p: Point<f64>| {
            let v = a.eval(p).unwrap();
            v[0].hypot(v[1])
        };
        assert!((m(inside) - 0.1).abs() < 1e-15);
        assert!((m(outside) - 0.0625 / 4.0).abs() < 1e-15);
        assert_eq!(a.eval(Point::new(0.0, 0.0)).unwrap(), [0.0, 0.0]);
        assert!(!a.origin_singular());
    }

    #[test]
    fn ab_potential_values() {
        let a = ab_potential(&AngularFluxDensity::constant(0.5f64));
        let v = a.eval(Point::new(1.0, 0.0)).unwrap();
        assert!(v[0].abs() < 1e-16 && (v[1] - 0.5).abs() < 1e-16);
        assert!(a.eval(Point::new(0.0, 0.0)).is_err());
        assert!(a.origin_singular());
        assert_eq!(a.gauge(), Gauge::AharonovBohm);
        let zero = ab_potential(&AngularFluxDensity::constant(0.0));
        assert_eq!(zero.eval(Point::new(0.3, 0.2)).unwrap(), [0.0, 0.0]);
        assert!(AngularFluxDensity::constant(1.0).can_be_gauged_out());
        assert!(!AngularFluxDensity::constant(0.5).can_be_gauged_out());
    }

    #[test]
    fn flux_distance_examples() {
        assert_eq!(flux_distance(0.5f64), 0.5);
        assert_eq!(flux_distance(1.0f64), 0.0);
        assert!((flux_distance(2.7f64) - 0.3).abs() < 1e-12);
        assert!((flux_distance(-0.25f64) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn angular_integral_and_fourier() {
        let a = AngularFluxDensity::series(0.3, vec![0.2], vec![0.1]).unwrap();
        let n = 20000;
        let h = 1.3 / n as f64;
        let quad: f64 = (0..n).map(|k| a.value(0.4 + (k as f64 + 0.5) * h) * h).sum();
        assert!((quad - a.integral(0.4, 1.7)).abs() < 1e-9);
        let theta = 0.77;
        let rebuilt: C<f64> = (-1..=1)
            .map(|k| a.fourier(k) * C::new(0.0, k as f64 * theta).exp())
            .sum();
        assert!((rebuilt.re - a.value(theta)).abs() < 1e-14 && rebuilt.im.abs() < 1e-14);
    }

    #[test]
    fn samples_round_trip_trigonometric_data() {
        let a = AngularFluxDensity::series(0.3, vec![0.2, -0.05], vec![0.0, 0.07]).unwrap();
        let n = 16;
        let samples: Vec<f64> = (0..n)
            .map(|j| a.value(std::f64::consts::TAU * j as f64 / n as f64))
            .collect();
        let b = AngularFluxDensity::from_samples(&samples).unwrap();
        for k in 0..50 {
            let t = 0.13 * k as f64;
            assert!((a.value(t) - b.value(t)).abs() < 1e-13);
        }
    }

    #[test]
    fn curl_of_zero_and_ab_vanish() {
        let g = build_grid(0.01, 2.0, 32, 16, 1.0).unwrap();
        let zero = transverse_gauge(&RadialFieldProfile::zero());
        assert_eq!(curl_check(&zero, &g).unwrap(), 0.0);
        let ab = ab_potential(&AngularFluxDensity::series(0.4, vec![0.2], vec![]).unwrap());
        assert!(curl_check(&ab, &g).unwrap() < 1e-12);
    }

    #[test]
    fn curl_of_step_gauge_is_first_order_at_jump() {
        let a = transverse_gauge(&RadialFieldProfile::step(1.0f64, 0.25).unwrap());
        let r1 = curl_check(&a, &build_grid(0.0, 1.0, 64, 16, 1.0).unwrap()).unwrap();
        let r2 = curl_check(&a, &build_grid(0.0, 1.0, 128, 16, 1.0).unwrap()).unwrap();
        assert!(r1 < 0.1 && r2 < r1, "{r1} {r2}");
        let q = r1 / r2;
        assert!(q > 1.6 && q < 2.5, "ratio {q}");
    }

    #[test]
    fn curl_of_smooth_gauge_is_second_order() {
        let a = transverse_gauge(&RadialFieldProfile::gaussian_poly(1.0, 1.0, 7.0).unwrap());
        let r1 = curl_check(&a, &build_grid(0.0, 3.0, 64, 16, 1.0).unwrap()).unwrap();
        let r2 = curl_check(&a, &build_grid(0.0, 3.0, 128, 16, 1.0).unwrap()).unwrap();
        let q = r1 / r2;
        assert!(q > 3.5 && q < 4.5, "ratio {q}");
    }

    #[test]
    fn explicit_without_declared_field_is_rejected() {
        let g = build_grid(0.0, 1.0, 8, 8, 1.0).unwrap();
        let a = explicit_potential::<f64>(Arc::new(|_| [0.0, 0.0]), None);
        assert!(curl_check(&a, &g).is_err());
        let a = explicit_potential::<f64>(Arc::new(|_| [0.0, 0.0]), Some(Arc::new(|_| 0.0)));
        assert_eq!(curl_check(&a, &g).unwrap(), 0.0);
    }
}
