//! Manufactured eigenpairs and quadrature residuals of the multiplier
//! identities.
//!
//! A pair is `u(x) = a · f(r) e^{imθ}` with `f = r^{|m|} e^{-r²/(2s²)}`,
//! a transverse potential `A = A_θ(r) e_θ`, `A_θ = Φ_B(r)/r`, and the real
//! potential `V` for which `(-i∇+A)²u + Vu = λu` holds exactly:
//!
//! ```text
//! V(r) = λ + r²/s⁴ - (2|m|+2)/s² - 2m A_θ/r - A_θ²
//! ```
//!
//! Every integrand is then radial, so each integral reduces to
//! `2π ∫_0^R F(r) r dr`, evaluated with a composite midpoint rule on panels
//! split at the field breakpoints (and around the smoothed split radius).

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{RadialFieldProfile, VectorPotentialField};
use crate::mesh::{GridFunction, Point, PolarGrid};
use crate::scalar::{cis, Real, C};

/// Width of the `tanh` transition used for split decompositions.
pub const SPLIT_WIDTH: f64 = 1e-3;

/// Radial profile of a candidate eigenfunction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UProfile<T> {
    /// `r^{|m|} e^{-r²/(2s²)} e^{imθ}`.
    Gaussian { scale: T, angular_momentum: i32 },
    /// Constant on `r ≤ radius` and zero outside; never admissible.
    CompactConstant { value: T, radius: T },
}

impl<T: Real> UProfile<T> {
    pub fn gaussian(scale: T) -> Self {
        UProfile::Gaussian {
            scale,
            angular_momentum: 0,
        }
    }
}

/// How the potential is split into the part that is differentiated and the
/// part that is not.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Decomposition<T> {
    AllV1,
    AllV2,
    /// `V⁽¹⁾ = V` inside `r₀`, `V⁽²⁾ = V` outside, blended by a `tanh` of
    /// width [`SPLIT_WIDTH`].
    Split { r0: T },
}

/// Exact eigenpair of a magnetic Schrödinger operator with radial data.
#[derive(Clone)]
pub struct ManufacturedEigenpair<T> {
    amplitude: T,
    scale: T,
    m: i32,
    lambda: T,
    potential: VectorPotentialField<T>,
    field: RadialFieldProfile<T>,
}

impl<T: Real> std::fmt::Debug for ManufacturedEigenpair<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ManufacturedEigenpair")
            .field("amplitude", &self.amplitude)
            .field("scale", &self.scale)
            .field("angular_momentum", &self.m)
            .field("lambda", &self.lambda)
            .finish()
    }
}

/// Builds the pair and checks the eigenvalue equation at 10³ points.
pub fn manufacture<T: Real>(
    u: UProfile<T>,
    a: &VectorPotentialField<T>,
    lambda: T,
) -> Result<ManufacturedEigenpair<T>> {
    let (scale, m) = match u {
        UProfile::Gaussian {
            scale,
            angular_momentum,
        } => (scale, angular_momentum),
        UProfile::CompactConstant { .. } => {
            return Err(Error::Rejected(
                "u must be smooth, decaying and zero-free; a compactly supported constant is neither".into(),
            ))
        }
    };
    if !(scale > T::zero() && scale.is_finite()) {
        return Err(Error::Rejected("Gaussian scale must be positive".into()));
    }
    let flux = a.flux_function().ok_or_else(|| {
        Error::Rejected("manufactured pairs need a transverse potential (A·∇u = 0, ∇·A = 0)".into())
    })?;
    if !lambda.is_finite() {
        return Err(Error::Rejected("λ must be finite".into()));
    }
    let pair = ManufacturedEigenpair {
        amplitude: T::one(),
        scale,
        m,
        lambda,
        potential: a.clone(),
        field: flux.profile().clone(),
    };
    let worst = pair.equation_residual(1000);
    if !(worst <= T::lit(1e-10)) {
        return Err(Error::Rejected(format!(
            "eigenvalue equation residual {} exceeds 1e-10",
            worst.to_f64_lossy()
        )));
    }
    Ok(pair)
}

fn int<T: Real>(i: i32) -> T {
    T::lit(f64::from(i))
}

/// Values of the pair at one radius (`θ = 0`), with `∇_A u` in polar
/// components.
struct Local<T> {
    u: C<T>,
    du_r: C<T>,
    du_theta: C<T>,
    v: T,
    d_v: T,
    b: T,
}

impl<T: Real> ManufacturedEigenpair<T> {
    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn angular_momentum(&self) -> i32 {
        self.m
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    pub fn potential(&self) -> &VectorPotentialField<T> {
        &self.potential
    }

    /// The same pair with `u` multiplied by `c` (the identities are
    /// quadratic in `u`).
    pub fn scaled(&self, c: T) -> Self {
        Self {
            amplitude: self.amplitude * c,
            ..self.clone()
        }
    }

    fn k(&self) -> i32 {
        self.m.abs()
    }

    fn flux(&self, r: T) -> T {
        self.potential.flux_function().map_or(T::zero(), |f| f.eval(r))
    }

    /// `A_θ / r`, finite at the origin.
    fn a_over_r(&self, r: T) -> T {
        if r == T::zero() {
            self.field.field(T::zero()) / T::two()
        } else {
            self.flux(r) / (r * r)
        }
    }

    fn a_theta(&self, r: T) -> T {
        if r == T::zero() {
            T::zero()
        } else {
            self.flux(r) / r
        }
    }

    /// `f(r) = r^{|m|} e^{-r²/(2s²)}` (without the amplitude).
    pub fn profile(&self, r: T) -> T {
        let s2 = self.scale * self.scale;
        r.powi(self.k()) * (-r * r / (T::two() * s2)).exp()
    }

    /// `V(r)`.
    pub fn v_derived(&self, r: T) -> T {
        let s2 = self.scale * self.scale;
        let at = self.a_theta(r);
        self.lambda + r * r / (s2 * s2) - int::<T>(2 * self.k() + 2) / s2
            - T::two() * int::<T>(self.m) * self.a_over_r(r)
            - at * at
    }

    /// `V'(r)`, using `A_θ' = B - Φ/r²`.
    pub fn v_derived_prime(&self, r: T) -> T {
        let s2 = self.scale * self.scale;
        let at = self.a_theta(r);
        let b = self.field.field(r);
        let aor = self.a_over_r(r);
        let d_at = b - aor;
        let d_aor = if r == T::zero() {
            T::zero()
        } else {
            (d_at - aor) / r
        };
        T::two() * r / (s2 * s2) - T::two() * int::<T>(self.m) * d_aor - T::two() * at * d_at
    }

    fn local(&self, r: T) -> Local<T> {
        let s2 = self.scale * self.scale;
        let k = self.k();
        let g = (-r * r / (T::two() * s2)).exp() * self.amplitude;
        let f = r.powi(k) * g;
        // f' = (k r^{k-1} - r^{k+1}/s²) g
        let df = if k == 0 {
            -r / s2 * g
        } else {
            (int::<T>(k) * r.powi(k - 1) - r.powi(k + 1) / s2) * g
        };
        // (m/r + A_θ) f, with m f / r = m r^{k-1} g
        let m_term = if self.m == 0 {
            T::zero()
        } else {
            int::<T>(self.m) * r.powi(k - 1) * g
        };
        let ang = m_term + self.a_theta(r) * f;
        Local {
            u: C::new(f, T::zero()),
            du_r: C::new(df, T::zero()),
            du_theta: C::new(T::zero(), ang),
            v: self.v_derived(r),
            d_v: self.v_derived_prime(r),
            b: self.field.field(r),
        }
    }

    /// Value of `u` at a Cartesian point.
    pub fn u_at(&self, p: Point<T>) -> C<T> {
        self.cartesian(p).0
    }

    /// `(u, Δu)` from the harmonic factor `(x ± iy)^{|m|}` times the
    /// Gaussian, which avoids the polar singularity at the origin.
    fn cartesian(&self, p: Point<T>) -> (C<T>, C<T>) {
        let s2 = self.scale * self.scale;
        let k = self.k();
        let z = if self.m >= 0 {
            C::new(p.x, p.y)
        } else {
            C::new(p.x, -p.y)
        };
        let r2 = p.x * p.x + p.y * p.y;
        let g = (-r2 / (T::two() * s2)).exp() * self.amplitude;
        let u = z.powi(k) * g;
        let lap = u * (r2 / (s2 * s2) - T::two() / s2 - int::<T>(2 * k) / s2);
        (u, lap)
    }

    /// Largest relative residual of `(-i∇+A)²u + Vu - λu` over `n` points
    /// in `r ≤ 6s`, evaluated with Cartesian `A`.
    pub fn equation_residual(&self, n: usize) -> T {
        let r_hi = T::lit(6.0) * self.scale;
        let mut worst = T::zero();
        for j in 0..n {
            let t = (T::of(j) + T::half()) / T::of(n);
            let r = r_hi * t;
            let theta = T::lit(2.399963229728653) * T::of(j);
            let p = Point::from_polar(r, theta);
            let (u, lap) = self.cartesian(p);
            let a = match self.potential.eval(p) {
                Ok(a) => a,
                Err(_) => return T::infinity(),
            };
            // A·∇u = i m A_θ u / r for the harmonic factor; computed here
            // from Cartesian A as (A · (-y, x)) i m u / r².
            let rot = (-a[0] * p.y + a[1] * p.x) / (r * r);
            let a_grad = u * C::new(T::zero(), int::<T>(self.m) * rot);
            let a2 = a[0] * a[0] + a[1] * a[1];
            let hu = -lap - a_grad * C::new(T::zero(), T::two()) + u * a2;
            let res = hu + u * (self.v_derived(r) - self.lambda);
            let scale = hu.norm() + u.norm() * (self.v_derived(r).abs() + self.lambda.abs()) + T::lit(1e-300);
            worst = worst.max(res.norm() / scale.max(T::one()));
        }
        worst
    }

    /// Radius beyond which `|u|²` has relative tail mass far below `1e-12`.
    pub fn quadrature_radius(&self) -> T {
        self.scale * (T::lit(8.0) + int::<T>(self.k()).sqrt() * T::two())
    }
}

/// Multiplier for the first identity.
#[derive(Clone)]
pub enum G1Choice<T> {
    One,
    R,
    /// `G(r)`, `G'(r)` and optionally `G''(r)`.
    Custom {
        g: Arc<dyn Fn(T) -> T + Send + Sync>,
        d1: Arc<dyn Fn(T) -> T + Send + Sync>,
        d2: Option<Arc<dyn Fn(T) -> T + Send + Sync>>,
    },
}

impl<T: Real> G1Choice<T> {
    fn label(&self) -> &'static str {
        match self {
            G1Choice::One => "one",
            G1Choice::R => "r",
            G1Choice::Custom { .. } => "custom",
        }
    }

    fn eval(&self, r: T) -> (T, T, T) {
        match self {
            G1Choice::One => (T::one(), T::zero(), T::zero()),
            G1Choice::R => (r, T::one(), T::zero()),
            G1Choice::Custom { g, d1, d2 } => (g(r), d1(r), d2.as_ref().map_or(T::nan(), |d| d(r))),
        }
    }
}

/// Multiplier for the second identity.
#[derive(Clone)]
pub enum G2Choice<T> {
    One,
    R,
    Custom {
        g: Arc<dyn Fn(T) -> T + Send + Sync>,
        d1: Arc<dyn Fn(T) -> T + Send + Sync>,
    },
}

impl<T: Real> G2Choice<T> {
    fn label(&self) -> &'static str {
        match self {
            G2Choice::One => "one",
            G2Choice::R => "r",
            G2Choice::Custom { .. } => "custom",
        }
    }

    fn eval(&self, r: T) -> (T, T) {
        match self {
            G2Choice::One => (T::one(), T::zero()),
            G2Choice::R => (r, T::one()),
            G2Choice::Custom { g, d1 } => (g(r), d1(r)),
        }
    }
}

/// Radial quadrature resolution: midpoints per panel and the outer radius
/// (defaults to [`ManufacturedEigenpair::quadrature_radius`]).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Quadrature<T> {
    pub points_per_panel: usize,
    pub r_max: Option<T>,
}

impl<T: Real> Quadrature<T> {
    pub fn new(points_per_panel: usize) -> Self {
        Self {
            points_per_panel,
            r_max: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityTerm {
    pub name: String,
    pub value: f64,
}

/// Residual of one identity at one resolution, with the order observed
/// between half and full resolution.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityResidual {
    pub identity: String,
    pub lhs: f64,
    pub rhs: f64,
    pub terms: Vec<IdentityTerm>,
    pub absolute: f64,
    /// `|LHS - RHS| / (|LHS| + |RHS| + 1e-30)`.
    pub relative: f64,
    pub points_per_panel: usize,
    pub r_max: f64,
    /// `log₂` of the residual ratio under doubling; absent at the rounding
    /// floor.
    pub order: Option<f64>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct IdentityResidualReport {
    pub entries: Vec<IdentityResidual>,
}

impl IdentityResidualReport {
    pub fn max_relative(&self) -> f64 {
        self.entries.iter().map(|e| e.relative).fold(0.0, f64::max)
    }
}

/// Named integrals on each side; the residual is `Σ lhs - Σ rhs`.
struct Sides<T> {
    lhs: Vec<(&'static str, T)>,
    rhs: Vec<(&'static str, T)>,
}

fn panels<T: Real>(pair: &ManufacturedEigenpair<T>, r_max: T, extra: &[T]) -> Vec<T> {
    let mut cuts: Vec<T> = pair
        .field
        .breakpoints()
        .into_iter()
        .chain(extra.iter().copied())
        .filter(|&b| b > T::zero() && b < r_max)
        .collect();
    cuts.push(T::zero());
    cuts.push(r_max);
    cuts.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
    cuts.dedup();
    cuts
}

/// `2π Σ_panels Σ_midpoints h F(r) r` for several integrands at once.
fn integrate_radial<T, F, const N: usize>(cuts: &[T], n: usize, f: F) -> [T; N]
where
    T: Real,
    F: Fn(T) -> [T; N],
{
    let mut acc = [T::zero(); N];
    for w in cuts.windows(2) {
        let h = (w[1] - w[0]) / T::of(n);
        for j in 0..n {
            let r = w[0] + h * (T::of(j) + T::half());
            let vals = f(r);
            for (a, v) in acc.iter_mut().zip(vals) {
                *a += v * r * h;
            }
        }
    }
    let tau = T::two() * T::PI();
    acc.map(|a| a * tau)
}

fn evaluate<T, F>(
    identity: String,
    pair: &ManufacturedEigenpair<T>,
    quad: &Quadrature<T>,
    extra_cuts: &[T],
    notes: Vec<String>,
    sides: F,
) -> Result<IdentityResidual>
where
    T: Real,
    F: Fn(&[T], usize) -> Sides<T>,
{
    if quad.points_per_panel < 4 {
        return Err(Error::Rejected("at least 4 quadrature points per panel".into()));
    }
    let r_max = quad.r_max.unwrap_or_else(|| pair.quadrature_radius());
    let cuts = panels(pair, r_max, extra_cuts);
    let n = quad.points_per_panel;
    let fine = sides(&cuts, n);
    let coarse = sides(&cuts, n / 2);
    let total = |v: &[(&str, T)]| v.iter().fold(T::zero(), |a, t| a + t.1);
    let (lhs, rhs) = (total(&fine.lhs), total(&fine.rhs));
    let diff = lhs - rhs;
    let coarse_diff = total(&coarse.lhs) - total(&coarse.rhs);
    let scale = lhs.abs() + rhs.abs() + T::lit(1e-30);
    let floor = T::lit(1e-13) * scale;
    let order = if diff.abs() > floor && coarse_diff.abs() > floor {
        Some((coarse_diff / diff).abs().log2().to_f64_lossy())
    } else {
        None
    };
    let terms = fine
        .lhs
        .iter()
        .map(|(name, v)| IdentityTerm {
            name: format!("lhs.{name}"),
            value: v.to_f64_lossy(),
        })
        .chain(fine.rhs.iter().map(|(name, v)| IdentityTerm {
            name: format!("rhs.{name}"),
            value: v.to_f64_lossy(),
        }))
        .collect();
    Ok(IdentityResidual {
        identity,
        lhs: lhs.to_f64_lossy(),
        rhs: rhs.to_f64_lossy(),
        terms,
        absolute: diff.abs().to_f64_lossy(),
        relative: (diff.abs() / scale).to_f64_lossy(),
        points_per_panel: n,
        r_max: r_max.to_f64_lossy(),
        order,
        notes,
    })
}

/// `Re λ ∫G|u|² - ∫G|∇_A u|² + ½∫ΔG|u|² = ∫G Re V |u|²`.
pub fn residual_g1<T: Real>(
    pair: &ManufacturedEigenpair<T>,
    g: &G1Choice<T>,
    quad: &Quadrature<T>,
) -> Result<IdentityResidual> {
    if let G1Choice::Custom { d2: None, .. } = g {
        return Err(Error::Rejected("custom G₁ needs its second derivative".into()));
    }
    let lambda = pair.lambda;
    evaluate(format!("g1[{}]", g.label()), pair, quad, &[], Vec::new(), |cuts, n| {
        let [mass, grad, lap, pot] = integrate_radial(cuts, n, |r| {
            let l = pair.local(r);
            let (g0, g1, g2) = g.eval(r);
            let u2 = l.u.norm_sqr();
            let lap_g = g2 + g1 / r;
            [
                g0 * u2,
                g0 * (l.du_r.norm_sqr() + l.du_theta.norm_sqr()),
                lap_g * u2,
                g0 * l.v * u2,
            ]
        });
        Sides {
            lhs: vec![
                ("re_lambda_g_u2", lambda * mass),
                ("minus_g_grad_u2", -grad),
                ("half_lap_g_u2", lap * T::half()),
            ],
            rhs: vec![("g_re_v_u2", pot)],
        }
    })
}

/// `Im λ ∫G|u|² - Im∫∇G·ū∇_A u = ∫G Im V |u|²`.
pub fn residual_g2<T: Real>(
    pair: &ManufacturedEigenpair<T>,
    g: &G2Choice<T>,
    quad: &Quadrature<T>,
) -> Result<IdentityResidual> {
    evaluate(format!("g2[{}]", g.label()), pair, quad, &[], Vec::new(), |cuts, n| {
        let [flow] = integrate_radial(cuts, n, |r| {
            let l = pair.local(r);
            let (_, g1) = g.eval(r);
            [(l.u.conj() * l.du_r * g1).im]
        });
        // λ and V are real for manufactured pairs.
        Sides {
            lhs: vec![("im_lambda_g_u2", T::zero()), ("minus_im_grad_g_u_grad_u", -flow)],
            rhs: vec![("g_im_v_u2", T::zero())],
        }
    })
}

/// The third identity with `G₃ = |x|²` (Hessian `2 Id`, `Δ²G₃ = 0`).
///
/// With `∇G₃ · B* = 2 B r e_θ` the magnetic term is
/// `Im ∫ 2 B r u conj((∇_A u)_θ)`, which is nonzero whenever `A_θ` or `m`
/// is, radial `u` included.
pub fn residual_g3<T: Real>(pair: &ManufacturedEigenpair<T>, quad: &Quadrature<T>) -> Result<IdentityResidual> {
    evaluate("g3[r2]".into(), pair, quad, &[], Vec::new(), |cuts, n| {
        let [grad, mag, pot, radial] = integrate_radial(cuts, n, |r| {
            let l = pair.local(r);
            let u2 = l.u.norm_sqr();
            [
                l.du_r.norm_sqr() + l.du_theta.norm_sqr(),
                (l.u * l.du_theta.conj() * (T::two() * l.b * r)).im,
                l.v * u2,
                (l.u * l.du_r.conj() * (T::two() * r * l.v)).re,
            ]
        });
        Sides {
            lhs: vec![
                ("hessian_grad_u", grad * T::two()),
                ("bilaplacian_u2", T::zero()),
                ("im_lambda_flow", T::zero()),
                ("im_grad_g_b_u_grad_u", mag),
            ],
            rhs: vec![("minus_half_lap_g_v_u2", -T::two() * pot), ("minus_re_grad_g_v_u_grad_u", -radial)],
        }
    })
}

fn blend<T: Real>(d: &Decomposition<T>, r: T) -> (T, T) {
    match *d {
        Decomposition::AllV1 => (T::zero(), T::zero()),
        Decomposition::AllV2 => (T::one(), T::zero()),
        Decomposition::Split { r0 } => {
            let w = T::lit(SPLIT_WIDTH);
            let t = ((r - r0) / w).tanh();
            ((T::one() + t) / T::two(), (T::one() - t * t) / (T::two() * w))
        }
    }
}

/// The self-adjoint reduction at `d = 2`:
/// `∫|∇_A u⁻|² = -2 Im∫ r B*_τ · u⁻ conj(∇_A u⁻) + ∫∂_r(rV⁽¹⁾)|u⁻|²
///  - ∫V⁽²⁾|u⁻|² - 2 Re∫ r V⁽²⁾ u⁻ conj(∂_r^A u⁻)`.
///
/// `u⁻ = u` for real `λ` (`sgn 0 = 0`). The reduction drops the term
/// `λ ∫|u|²`, so it only balances for `λ = 0`; other pairs carry a note.
pub fn residual_crucial_ss<T: Real>(
    pair: &ManufacturedEigenpair<T>,
    decomposition: &Decomposition<T>,
    quad: &Quadrature<T>,
) -> Result<IdentityResidual> {
    let mut notes = Vec::new();
    let mut cuts = Vec::new();
    let label = match *decomposition {
        Decomposition::AllV1 => "all_v1".to_string(),
        Decomposition::AllV2 => "all_v2".to_string(),
        Decomposition::Split { r0 } => {
            if !(r0 > T::zero()) {
                return Err(Error::Rejected("split radius must be positive".into()));
            }
            let w = T::lit(SPLIT_WIDTH);
            let half = T::lit(20.0) * w;
            cuts.extend([r0 - half, r0 + half]);
            notes.push(format!(
                "split at r0 = {} smoothed by tanh over width {SPLIT_WIDTH}",
                r0.to_f64_lossy()
            ));
            format!("split[{}]", r0.to_f64_lossy())
        }
    };
    if pair.lambda != T::zero() {
        notes.push("λ ≠ 0: u⁻ = u under sgn(0) = 0, so the λ∫|u|² term is not balanced".into());
    }
    evaluate(format!("crucial_ss[{label}]"), pair, quad, &cuts, notes, |cuts, n| {
        let [grad, mag, d1, v2, radial] = integrate_radial(cuts, n, |r| {
            let l = pair.local(r);
            let u2 = l.u.norm_sqr();
            let (s, ds) = blend(decomposition, r);
            let rv_prime = l.v + r * l.d_v;
            let d_rv1 = rv_prime * (T::one() - s) - r * l.v * ds;
            let v2 = l.v * s;
            [
                l.du_r.norm_sqr() + l.du_theta.norm_sqr(),
                (l.u * l.du_theta.conj() * (r * l.b)).im,
                d_rv1 * u2,
                v2 * u2,
                (l.u * l.du_r.conj() * (r * v2)).re,
            ]
        });
        Sides {
            lhs: vec![("grad_u2", grad)],
            rhs: vec![
                ("minus_2_im_r_b_tau", -T::two() * mag),
                ("d_r_rv1_u2", d1),
                ("one_minus_d_v2_u2", -v2),
                ("minus_2_re_r_v2_u_dru", -T::two() * radial),
            ],
        }
    })
}

/// `u⁻(x) = e^{-i sgn(Im λ) (Re λ)^{1/2} |x|} u(x)` with `sgn 0 = 0`.
pub fn phase_shift<T: Real>(grid: &PolarGrid<T>, u: &GridFunction<T>, lambda: C<T>) -> Result<GridFunction<T>> {
    if lambda.re < T::zero() {
        return Err(Error::Domain("phase shift needs Re λ ≥ 0".into()));
    }
    if u.len() != grid.node_count() {
        return Err(Error::Dimension {
            expected: grid.node_count(),
            got: u.len(),
        });
    }
    let sgn = if lambda.im > T::zero() {
        T::one()
    } else if lambda.im < T::zero() {
        -T::one()
    } else {
        return Ok(u.clone());
    };
    let k = sgn * lambda.re.sqrt();
    let values = grid
        .nodes()
        .iter()
        .zip(&u.values)
        .map(|(n, z)| *z * cis(-k * n.r))
        .collect();
    Ok(GridFunction { values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{transverse_gauge, RadialFieldProfile};
    use crate::mesh::build_grid;

    fn oscillator() -> ManufacturedEigenpair<f64> {
        manufacture(UProfile::gaussian(1.0), &transverse_gauge(&RadialFieldProfile::zero()), 0.0).unwrap()
    }

    fn magnetic(b: f64) -> ManufacturedEigenpair<f64> {
        let a = transverse_gauge(&RadialFieldProfile::constant(b).unwrap());
        manufacture(UProfile::gaussian(1.0), &a, 0.0).unwrap()
    }

    #[test]
    fn derived_potentials() {
        let p = oscillator();
        let q = magnetic(0.5);
        for r in [0.0, 0.3, 1.0, 2.7] {
            assert!((p.v_derived(r) - (r * r - 2.0)).abs() < 1e-13);
            assert!((q.v_derived(r) - (r * r - 2.0 - 0.0625 * r * r)).abs() < 1e-13);
        }
    }

    #[test]
    fn potential_derivative_matches_difference_quotient() {
        let a = transverse_gauge(&RadialFieldProfile::gaussian_poly(1.0, 1.0, 3.0).unwrap());
        let p = manufacture(
            UProfile::Gaussian {
                scale: 1.3,
                angular_momentum: -2,
            },
            &a,
            0.7,
        )
        .unwrap();
        for r in [0.4f64, 1.1, 2.2] {
            let h = 1e-5;
            let fd = (p.v_derived(r + h) - p.v_derived(r - h)) / (2.0 * h);
            assert!((fd - p.v_derived_prime(r)).abs() < 1e-6, "{r}");
        }
    }

    #[test]
    fn rejects_non_admissible_profiles() {
        let a = transverse_gauge(&RadialFieldProfile::<f64>::zero());
        let c = UProfile::CompactConstant {
            value: 1.0,
            radius: 2.0,
        };
        assert!(manufacture(c, &a, 0.0).is_err());
        let ab = crate::field::ab_potential(&crate::field::AngularFluxDensity::constant(0.5));
        assert!(manufacture(UProfile::gaussian(1.0), &ab, 0.0).is_err());
        let custom = G1Choice::Custom {
            g: Arc::new(|r: f64| r * r),
            d1: Arc::new(|r: f64| 2.0 * r),
            d2: None,
        };
        assert!(residual_g1(&oscillator(), &custom, &Quadrature::new(64)).is_err());
    }

    #[test]
    fn g1_and_g3_on_oscillator() {
        let q = Quadrature::new(4000);
        let p = oscillator();
        let r1 = residual_g1(&p, &G1Choice::One, &q).unwrap();
        assert!(r1.relative < 1e-6, "{r1:?}");
        let r3 = residual_g3(&p, &q).unwrap();
        assert!(r3.relative < 1e-6, "{r3:?}");
        let o = r3.order.unwrap();
        assert!((1.8..=2.2).contains(&o), "{o}");
    }

    #[test]
    fn magnetic_term_of_g3_does_not_vanish() {
        let r3 = residual_g3(&magnetic(0.5), &Quadrature::new(4000)).unwrap();
        assert!(r3.relative < 1e-6, "{r3:?}");
        let mag = r3.terms.iter().find(|t| t.name == "lhs.im_grad_g_b_u_grad_u").unwrap();
        // -2∫B r A_θ f² = -2π b² ∫ r³ e^{-r²} dr = -π b².
        let exact = -std::f64::consts::PI * 0.25;
        assert!((mag.value - exact).abs() < 1e-5, "{}", mag.value);
    }

    #[test]
    fn g2_terms_vanish() {
        let q = Quadrature::new(64);
        for p in [oscillator(), magnetic(0.5)] {
            for g in [G2Choice::One, G2Choice::R] {
                let r = residual_g2(&p, &g, &q).unwrap();
                assert!(r.absolute < 1e-10);
            }
        }
        let rot = manufacture(
            UProfile::Gaussian {
                scale: 1.0,
                angular_momentum: 1,
            },
            &transverse_gauge(&RadialFieldProfile::zero()),
            0.5,
        )
        .unwrap();
        assert!(residual_g2(&rot, &G2Choice::R, &q).unwrap().absolute < 1e-10);
    }

    #[test]
    fn crucial_is_decomposition_independent() {
        let q = Quadrature::new(4000);
        let p = magnetic(0.5);
        let a = residual_crucial_ss(&p, &Decomposition::AllV1, &q).unwrap();
        let b = residual_crucial_ss(&p, &Decomposition::AllV2, &q).unwrap();
        let c = residual_crucial_ss(&p, &Decomposition::Split { r0: 1.0 }, &q).unwrap();
        assert!(a.relative < 1e-6 && b.relative < 1e-6, "{a:?} {b:?}");
        assert!(c.relative < 1e-5, "{c:?}");
        assert!(!c.notes.is_empty());
    }

    #[test]
    fn nonzero_lambda_leaves_the_mass_term() {
        let p = manufacture(UProfile::gaussian(1.0), &transverse_gauge(&RadialFieldProfile::zero()), 2.0).unwrap();
        let r = residual_crucial_ss(&p, &Decomposition::AllV1, &Quadrature::new(4000)).unwrap();
        // Missing term: λ∫|u|² = 2π.
        assert!((r.absolute - 2.0 * std::f64::consts::PI).abs() < 1e-4, "{r:?}");
        assert_eq!(r.notes.len(), 1);
    }

    #[test]
    fn zero_amplitude_gives_zero_residual() {
        let p = oscillator().scaled(0.0);
        let r = residual_g1(&p, &G1Choice::R, &Quadrature::new(32)).unwrap();
        assert_eq!((r.lhs, r.rhs, r.relative), (0.0, 0.0, 0.0));
    }

    #[test]
    fn phase_shift_examples() {
        let g = build_grid(0.0f64, 2.0, 4, 8, 1.0).unwrap();
        let one = GridFunction {
            values: vec![C::new(1.0, 0.0); g.node_count()],
        };
        let s = phase_shift(&g, &one, C::new(4.0, 1.0)).unwrap();
        let k = g.nodes().iter().position(|n| (n.r - 1.0).abs() < 1e-12 && n.theta == 0.0).unwrap();
        assert!((s.values[k] - C::new(0.0, -2.0).exp()).norm() < 1e-14);
        assert_eq!(phase_shift(&g, &one, C::new(4.0, 0.0)).unwrap(), one);
        for (a, b) in s.values.iter().zip(&one.values) {
            assert!((a.norm() - b.norm()).abs() < 1e-15);
        }
    }
}
