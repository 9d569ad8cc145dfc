//! Per-factor weights `e^{-φ_j}` and the radial profile `c(t)`.

use std::f64::consts::PI;

use num_traits::{One, Zero};

use crate::error::{LabError, Result};
use crate::geometry::Domain;
use crate::green::{HarmonicFn, HarmonicSeries};
use crate::scalar::{cis, Cx, Real};

/// Presets for a factor's `φ`.
#[derive(Clone, Debug, PartialEq)]
pub enum PhiPreset<T> {
    Zero,
    /// `φ = 2 s log|z - c|` on an annulus centered at `c`.
    HarmonicLogPower(T),
    /// `φ = 2 log|g| + 2 u`; `g` lists polynomial coefficients in ascending powers of `z`.
    LogAbsPoly {
        g: Vec<Cx<T>>,
        u: HarmonicSeries<T>,
    },
    /// `φ = a |z - z_j|²` around the factor basepoint; subharmonic, not harmonic.
    GaussianBump(T),
}

fn poly<T: Real>(c: &[Cx<T>], z: Cx<T>) -> Cx<T> {
    c.iter().rev().fold(Cx::zero(), |acc, a| acc * z + *a)
}

fn poly_derivative<T: Real>(c: &[Cx<T>], z: Cx<T>) -> Cx<T> {
    c.iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(Cx::zero(), |acc, (k, a)| acc * z + *a * T::of(k))
}

/// Number of zeros of a polynomial inside `|z - c| < r`, by the argument principle.
fn zeros_inside<T: Real>(g: &[Cx<T>], c: Cx<T>, r: T) -> Option<i64> {
    let m = 2048;
    let h = T::lit(2.0 * PI) / T::of(m);
    let mut acc = T::zero();
    for j in 0..m {
        let e = cis(h * T::of(j));
        let z = c + e * r;
        let gz = poly(g, z);
        if gz.norm() < T::lit(1e-10) {
            return None;
        }
        // (1/2πi) ∮ g'/g dz with dz = i r e dθ
        acc += (poly_derivative(g, z) / gz * e).re * r;
    }
    let w = acc * h / T::lit(2.0 * PI);
    let n = w.round();
    ((w - n).abs() < T::lit(1e-3)).then(|| n.to_i64().unwrap_or(0))
}

impl<T: Real> PhiPreset<T> {
    pub fn validate(&self, d: &Domain<T>) -> Result<()> {
        match self {
            PhiPreset::HarmonicLogPower(s) if !d.is_annulus() || !s.is_finite() => Err(LabError::InvalidArgument(
                "the logarithmic power weight is defined on annulus factors only".into(),
            )),
            PhiPreset::GaussianBump(a) if !a.is_finite() => {
                Err(LabError::InvalidArgument("bump strength must be finite".into()))
            }
            PhiPreset::LogAbsPoly { g, .. } if g.iter().all(|c| c.is_zero()) => {
                Err(LabError::InvalidArgument("the polynomial g must be nonzero".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn phi(&self, z: Cx<T>, d: &Domain<T>, basepoint: Cx<T>) -> T {
        let two = T::lit(2.0);
        match self {
            PhiPreset::Zero => T::zero(),
            PhiPreset::HarmonicLogPower(s) => two * *s * (z - d.center()).norm().ln(),
            PhiPreset::LogAbsPoly { g, u } => two * poly(g, z).norm().ln() + two * u.value(z),
            PhiPreset::GaussianBump(a) => *a * (z - basepoint).norm_sqr(),
        }
    }

    /// `e^{-φ(z)}`.
    pub fn weight(&self, z: Cx<T>, d: &Domain<T>, basepoint: Cx<T>) -> T {
        match self {
            PhiPreset::Zero => T::one(),
            _ => (-self.phi(z, d, basepoint)).exp(),
        }
    }

    /// Whether `φ` is harmonic on the factor.
    pub fn is_harmonic(&self, d: &Domain<T>) -> bool {
        match self {
            PhiPreset::Zero | PhiPreset::HarmonicLogPower(_) => true,
            PhiPreset::GaussianBump(a) => a.is_zero(),
            PhiPreset::LogAbsPoly { g, u } => {
                if !u.log_coeff.is_zero() && d.contains(u.center) {
                    return false;
                }
                let inside = |r: T| zeros_inside(g, d.center(), r);
                let count = match *d {
                    Domain::Disk { radius, .. } => inside(radius),
                    Domain::Annulus { r_inner, r_outer, .. } => {
                        inside(r_outer).zip(inside(r_inner)).map(|(a, b)| a - b)
                    }
                };
                count == Some(0)
            }
        }
    }

    /// `φ / 2` as a harmonic function when it is one; used for character periods.
    pub fn half_phi(&self, d: &Domain<T>) -> Option<HarmonicFn<T>> {
        if !self.is_harmonic(d) {
            return None;
        }
        Some(match self {
            PhiPreset::Zero | PhiPreset::GaussianBump(_) => HarmonicFn::Series(HarmonicSeries::zero()),
            PhiPreset::HarmonicLogPower(s) => HarmonicFn::LogAbs { center: d.center() }.scaled(*s),
            PhiPreset::LogAbsPoly { g, u } => {
                HarmonicFn::Sum(vec![HarmonicFn::LogAbsPoly(g.clone()), HarmonicFn::Series(u.clone())])
            }
        })
    }

    /// `φ(z_j)`, or `None` if it is `-∞`.
    pub fn value_at_basepoint(&self, d: &Domain<T>, basepoint: Cx<T>) -> Option<T> {
        let v = self.phi(basepoint, d, basepoint);
        v.is_finite().then_some(v)
    }
}

/// One `φ` preset per factor.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSpec<T> {
    pub phis: Vec<PhiPreset<T>>,
}

impl<T: Real> WeightSpec<T> {
    pub fn flat(n: usize) -> Self {
        Self {
            phis: vec![PhiPreset::Zero; n],
        }
    }

    pub fn new(phis: Vec<PhiPreset<T>>) -> Self {
        Self { phis }
    }

    pub fn len(&self) -> usize {
        self.phis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phis.is_empty()
    }

    pub fn all_harmonic(&self, factors: &[Domain<T>]) -> bool {
        self.phis.iter().zip(factors).all(|(p, d)| p.is_harmonic(d))
    }
}

/// The radial profile `c(t)` with `c(0) = 1` and `c(t) e^{-t}` nonincreasing.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum CWeight<T> {
    #[default]
    Constant,
    /// `c(t) = e^{-a t}`, `a > 0`.
    Exponential(T),
    /// `c(t) = 1 + b t`, `0 < b <= 1`.
    Affine(T),
}

impl<T: Real> CWeight<T> {
    pub fn validate(&self) -> Result<()> {
        match *self {
            CWeight::Exponential(a) if !(a > T::zero() && a.is_finite()) => Err(LabError::InvalidArgument(format!(
                "exponential profile needs a > 0, got {a}"
            ))),
            CWeight::Affine(b) if !(b > T::zero() && b <= T::one()) => Err(LabError::InvalidArgument(format!(
                "affine profile needs 0 < b <= 1, got {b}"
            ))),
            _ => Ok(()),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, CWeight::Constant)
    }

    pub fn value(&self, t: T) -> T {
        match *self {
            CWeight::Constant => T::one(),
            CWeight::Exponential(a) => (-a * t).exp(),
            CWeight::Affine(b) => T::one() + b * t,
        }
    }

    pub fn derivative(&self, t: T) -> T {
        match *self {
            CWeight::Constant => T::zero(),
            CWeight::Exponential(a) => -a * (-a * t).exp(),
            CWeight::Affine(b) => b,
        }
    }

    /// `h(t) = ∫_t^∞ c(l) e^{-l} dl`.
    pub fn tail(&self, t: T) -> T {
        match *self {
            CWeight::Constant => (-t).exp(),
            CWeight::Exponential(a) => (-(T::one() + a) * t).exp() / (T::one() + a),
            CWeight::Affine(b) => (T::one() + b + b * t) * (-t).exp(),
        }
    }

    /// `∫_0^∞ c(t) e^{-t} dt`.
    pub fn integral(&self) -> T {
        self.tail(T::zero())
    }

    /// Inverse of [`CWeight::tail`] by bisection on a monotone function.
    pub fn tail_inverse(&self, r: T) -> T {
        let (mut lo, mut hi) = (T::zero(), T::one());
        while self.tail(hi) > r {
            hi *= T::lit(2.0);
        }
        for _ in 0..200 {
            let mid = (lo + hi) / T::lit(2.0);
            if self.tail(mid) > r {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo + hi) / T::lit(2.0)
    }
}

/// Convenience for tests and configs: the identity polynomial `g(z) = 1`.
pub fn unit_poly<T: Real>() -> Vec<Cx<T>> {
    vec![Cx::one()]
}
