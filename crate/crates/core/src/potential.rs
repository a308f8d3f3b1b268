//! Electric potentials and the decomposition `V = V⁽¹⁾ + V⁽²⁾ + i Im V`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::ScalarFn;
use crate::mesh::Point;
use crate::scalar::Real;

/// How `∂_r(r V⁽¹⁾)` is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeSource {
    Analytic,
    CentralDifference,
}

/// Named scalar potential shapes.
#[derive(Clone)]
pub enum ScalarPotential<T> {
    Zero,
    Constant(T),
    /// `value · 1_{r ≤ radius}`.
    Step { value: T, radius: T },
    /// `amplitude · exp(-(r/width)²)`.
    Gaussian { amplitude: T, width: T },
    /// `coeff / r²`.
    InverseSquare { coeff: T },
    /// `coeff · r² + offset`.
    Harmonic { coeff: T, offset: T },
    /// Arbitrary function with an optional analytic `∂_r(r V)`.
    Custom {
        value: ScalarFn<T>,
        d_rv: Option<ScalarFn<T>>,
    },
}

impl<T: Real> fmt::Debug for ScalarPotential<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => write!(f, "Zero"),
            Self::Constant(c) => write!(f, "Constant({c})"),
            Self::Step { value, radius } => write!(f, "Step {{ value: {value}, radius: {radius} }}"),
            Self::Gaussian { amplitude, width } => {
                write!(f, "Gaussian {{ amplitude: {amplitude}, width: {width} }}")
            }
            Self::InverseSquare { coeff } => write!(f, "InverseSquare {{ coeff: {coeff} }}"),
            Self::Harmonic { coeff, offset } => {
                write!(f, "Harmonic {{ coeff: {coeff}, offset: {offset} }}")
            }
            Self::Custom { d_rv, .. } => write!(f, "Custom {{ analytic_derivative: {} }}", d_rv.is_some()),
        }
    }
}

impl<T: Real> ScalarPotential<T> {
    pub fn value(&self, p: Point<T>) -> T {
        let r = p.r();
        match self {
            Self::Zero => T::zero(),
            Self::Constant(c) => *c,
            Self::Step { value, radius } => {
                if r <= *radius {
                    *value
                } else {
                    T::zero()
                }
            }
            Self::Gaussian { amplitude, width } => {
                let s = r / *width;
                *amplitude * (-s * s).exp()
            }
            Self::InverseSquare { coeff } => *coeff / (r * r),
            Self::Harmonic { coeff, offset } => *coeff * r * r + *offset,
            Self::Custom { value, .. } => value(p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Self::Zero => true,
            Self::Constant(c) => *c == T::zero(),
            Self::Step { value, .. } => *value == T::zero(),
            Self::Gaussian { amplitude, .. } => *amplitude == T::zero(),
            Self::InverseSquare { coeff } => *coeff == T::zero(),
            Self::Harmonic { coeff, offset } => *coeff == T::zero() && *offset == T::zero(),
            Self::Custom { .. } => false,
        }
    }

    /// False for shapes with jumps, which are not weakly differentiable.
    pub fn is_weakly_differentiable(&self) -> bool {
        !matches!(self, Self::Step { value, .. } if *value != T::zero())
    }

    pub fn derivative_source(&self) -> DerivativeSource {
        match self {
            Self::Custom { d_rv: None, .. } => DerivativeSource::CentralDifference,
            _ => DerivativeSource::Analytic,
        }
    }

    /// `∂_r(r V)` at `p`.
    pub fn d_rv(&self, p: Point<T>) -> T {
        let r = p.r();
        match self {
            Self::Zero => T::zero(),
            Self::Constant(c) => *c,
            Self::Step { value, radius } => {
                if r <= *radius {
                    *value
                } else {
                    T::zero()
                }
            }
            Self::Gaussian { amplitude, width } => {
                let s = r / *width;
                *amplitude * (-s * s).exp() * (T::one() - T::two() * s * s)
            }
            Self::InverseSquare { coeff } => -*coeff / (r * r),
            Self::Harmonic { coeff, offset } => T::lit(3.0) * *coeff * r * r + *offset,
            Self::Custom { d_rv: Some(d), .. } => d(p),
            Self::Custom { value, d_rv: None } => {
                let h = T::lit(1e-5) * (T::one() + r);
                let th = p.theta();
                let (rp, rm) = (r + h, (r - h).max(T::zero()));
                let fp = rp * value(Point::from_polar(rp, th));
                let fm = rm * value(Point::from_polar(rm, th));
                (fp - fm) / (rp - rm)
            }
        }
    }
}

/// `V = V⁽¹⁾ + V⁽²⁾ + i Im V` with the derived weights used by the
/// certification constants.
#[derive(Clone)]
pub struct PotentialModel<T> {
    v1: ScalarPotential<T>,
    v2: ScalarPotential<T>,
    im_v: ScalarPotential<T>,
}

impl<T: Real> fmt::Debug for PotentialModel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PotentialModel")
            .field("v1", &self.v1)
            .field("v2", &self.v2)
            .field("im_v", &self.im_v)
            .finish()
    }
}

impl<T: Real> PotentialModel<T> {
    /// `v1` must be weakly differentiable in `r`; jumps belong in `v2`.
    pub fn new(
        v1: ScalarPotential<T>,
        v2: ScalarPotential<T>,
        im_v: ScalarPotential<T>,
    ) -> Result<Self> {
        if !v1.is_weakly_differentiable() {
            return Err(Error::Rejected(
                "V1 must be weakly differentiable; place discontinuous parts in V2".into(),
            ));
        }
        Ok(Self { v1, v2, im_v })
    }

    pub fn zero() -> Self {
        Self {
            v1: ScalarPotential::Zero,
            v2: ScalarPotential::Zero,
            im_v: ScalarPotential::Zero,
        }
    }

    /// Real potential held entirely in `V⁽²⁾`.
    pub fn real(v: ScalarPotential<T>) -> Self {
        Self {
            v1: ScalarPotential::Zero,
            v2: v,
            im_v: ScalarPotential::Zero,
        }
    }

    pub fn v1(&self) -> &ScalarPotential<T> {
        &self.v1
    }

    pub fn v2(&self) -> &ScalarPotential<T> {
        &self.v2
    }

    pub fn im_part(&self) -> &ScalarPotential<T> {
        &self.im_v
    }

    pub fn is_real(&self) -> bool {
        self.im_v.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.v1.is_zero() && self.v2.is_zero() && self.im_v.is_zero()
    }

    pub fn derivative_source(&self) -> DerivativeSource {
        self.v1.derivative_source()
    }

    pub fn re(&self, p: Point<T>) -> T {
        self.v1.value(p) + self.v2.value(p)
    }

    pub fn im(&self, p: Point<T>) -> T {
        self.im_v.value(p)
    }

    pub fn v_plus(&self, p: Point<T>) -> T {
        self.re(p).max(T::zero())
    }

    pub fn v_minus(&self, p: Point<T>) -> T {
        (-self.re(p)).max(T::zero())
    }

    pub fn d_rv1(&self, p: Point<T>) -> T {
        self.v1.d_rv(p)
    }

    pub fn d_rv1_plus(&self, p: Point<T>) -> T {
        self.d_rv1(p).max(T::zero())
    }

    pub fn d_rv1_minus(&self, p: Point<T>) -> T {
        (-self.d_rv1(p)).max(T::zero())
    }

    pub fn v2_abs(&self, p: Point<T>) -> T {
        self.v2.value(p).abs()
    }

    pub fn im_abs(&self, p: Point<T>) -> T {
        self.im(p).abs()
    }

    /// `r² |V⁽²⁾|²`.
    pub fn r2_v2_sq(&self, p: Point<T>) -> T {
        let (r, v) = (p.r(), self.v2.value(p));
        r * r * v * v
    }

    /// `r² |Im V|²`.
    pub fn r2_im_sq(&self, p: Point<T>) -> T {
        let (r, v) = (p.r(), self.im(p));
        r * r * v * v
    }

    /// `r² |Im V|`.
    pub fn r2_im_abs(&self, p: Point<T>) -> T {
        let r = p.r();
        r * r * self.im(p).abs()
    }

    /// `r² |Re V₋|²`.
    pub fn r2_re_minus_sq(&self, p: Point<T>) -> T {
        let (r, v) = (p.r(), self.v_minus(p));
        r * r * v * v
    }
}
