//! Green functions of disks and annuli, their boundary fluxes and conjugate periods.
//!
//! Every Green function here is `G(z) = log|z - z0| + Re H(z)` with `H` a
//! (possibly multivalued) holomorphic completion of the harmonic correction.
//! Keeping `H` around gives exact gradients: `∂G/∂x + i ∂G/∂y = conj(F'(z))`
//! with `F = log(z - z0) + H`.

use std::f64::consts::PI;

use num_traits::Zero;

use crate::error::{LabError, Result};
use crate::geometry::Domain;
use crate::quadrature::next_pow2;
use crate::scalar::{cis, cx_real, Cx, Real};

pub const DEFAULT_K_CORR: usize = 64;
pub const MAX_K_CORR: usize = 512;
/// Relative distance below which a pole is considered to sit on the boundary.
pub const POLE_MARGIN: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
enum Correction<T> {
    Disk,
    /// Scaled Fourier data of the harmonic correction on `r < |u| < R`, `u = z - center`:
    /// `H(u) = a0 + b0 log u + 2 Σ_m [alpha_m (u/R)^m + conj(beta_m) (r/u)^m]`.
    Annulus {
        a0: T,
        b0: T,
        alpha: Vec<Cx<T>>,
        beta: Vec<Cx<T>>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct GreenSolution<T> {
    domain: Domain<T>,
    pole: Cx<T>,
    correction: Correction<T>,
    residual: T,
}

/// Solves for `G_D(., z0)`. `k_corr = None` uses the adaptive default.
pub fn solve_green<T: Real>(d: &Domain<T>, z0: Cx<T>, k_corr: Option<usize>) -> Result<GreenSolution<T>> {
    let depth = d.depth(z0);
    let minimum = T::lit(POLE_MARGIN) * d.scale();
    if !(depth >= minimum) {
        return Err(LabError::PoleTooClose {
            distance: depth.as_f64(),
            minimum: minimum.as_f64(),
        });
    }
    match *d {
        Domain::Disk { .. } => Ok(GreenSolution {
            domain: *d,
            pole: z0,
            correction: Correction::Disk,
            residual: T::zero(),
        }),
        Domain::Annulus { .. } => match k_corr {
            Some(k) => annulus_solution(d, z0, k.max(1)),
            None => {
                let tol = T::lit(1e-10).max(T::lit(1e4) * T::epsilon());
                let mut k = DEFAULT_K_CORR;
                loop {
                    let sol = annulus_solution(d, z0, k)?;
                    if sol.residual < tol || k >= MAX_K_CORR {
                        return Ok(sol);
                    }
                    k *= 2;
                }
            }
        },
    }
}

/// Fourier coefficients `c_m`, `0 <= m <= k`, of `θ ↦ -log|c + ρ e^{iθ} - z0|`.
fn boundary_fourier<T: Real>(c: Cx<T>, rho: T, z0: Cx<T>, k: usize) -> Vec<Cx<T>> {
    let m = next_pow2(4 * k + 64);
    let h = T::lit(2.0 * PI) / T::of(m);
    let samples: Vec<T> = (0..m)
        .map(|j| -(c + cis(h * T::of(j)) * rho - z0).norm().ln())
        .collect();
    let inv = T::one() / T::of(m);
    let table: Vec<Cx<T>> = (0..m).map(|i| cis(-h * T::of(i))).collect();
    (0..=k)
        .map(|mode| {
            // e^{-i mode θ_j} by index arithmetic keeps the phases exact
            let mut acc = Cx::zero();
            for (j, f) in samples.iter().enumerate() {
                acc += table[(mode * j) % m] * *f;
            }
            acc * inv
        })
        .collect()
}

fn annulus_solution<T: Real>(d: &Domain<T>, z0: Cx<T>, k: usize) -> Result<GreenSolution<T>> {
    let Domain::Annulus {
        center,
        r_inner: r,
        r_outer: big_r,
    } = *d
    else {
        unreachable!()
    };
    let out = boundary_fourier(center, big_r, z0, k);
    let inn = boundary_fourier(center, r, z0, k);
    let b0 = (out[0].re - inn[0].re) / (big_r.ln() - r.ln());
    let a0 = out[0].re - b0 * big_r.ln();
    let ratio = r / big_r;
    let mut alpha = Vec::with_capacity(k);
    let mut beta = Vec::with_capacity(k);
    let mut q = T::one();
    for mode in 1..=k {
        q *= ratio;
        let det = T::one() - q * q;
        alpha.push((out[mode] - inn[mode] * q) / det);
        beta.push((inn[mode] - out[mode] * q) / det);
    }
    let mut sol = GreenSolution {
        domain: *d,
        pole: z0,
        correction: Correction::Annulus { a0, b0, alpha, beta },
        residual: T::zero(),
    };
    sol.residual = sol.boundary_residual(next_pow2(4 * k + 64));
    Ok(sol)
}

impl<T: Real> GreenSolution<T> {
    pub fn domain(&self) -> &Domain<T> {
        &self.domain
    }

    pub fn pole(&self) -> Cx<T> {
        self.pole
    }

    /// Number of Fourier modes in the correction (0 for closed-form disks).
    pub fn k_corr(&self) -> usize {
        match &self.correction {
            Correction::Disk => 0,
            Correction::Annulus { alpha, .. } => alpha.len(),
        }
    }

    /// Largest |G| at boundary points offset by half a node from the collocation grid.
    pub fn residual(&self) -> T {
        self.residual
    }

    fn boundary_residual(&self, m: usize) -> T {
        let c = self.domain.center();
        let h = T::lit(2.0 * PI) / T::of(m);
        let mut worst = T::zero();
        for (rad, _) in self.domain.circles() {
            for j in 0..m {
                let z = c + cis(h * (T::of(j) + T::lit(0.5))) * rad;
                worst = worst.max(self.value(z).abs());
            }
        }
        worst
    }

    /// Harmonic correction `h = G - log|z - z0|`.
    pub fn harmonic_part(&self, z: Cx<T>) -> T {
        match &self.correction {
            Correction::Disk => {
                let Domain::Disk { center, radius } = self.domain else {
                    unreachable!()
                };
                let a = self.pole - center;
                radius.ln() - (cx_real(radius * radius) - a.conj() * (z - center)).norm().ln()
            }
            Correction::Annulus { a0, b0, alpha, beta } => {
                let Domain::Annulus {
                    center,
                    r_inner,
                    r_outer,
                } = self.domain
                else {
                    unreachable!()
                };
                let u = z - center;
                let x = u / r_outer;
                let y = cx_real(r_inner) / u;
                let (mut px, mut py) = (x, y);
                let mut s = Cx::zero();
                for (a, b) in alpha.iter().zip(beta) {
                    s += *a * px + b.conj() * py;
                    px *= x;
                    py *= y;
                }
                *a0 + *b0 * u.norm().ln() + T::lit(2.0) * s.re
            }
        }
    }

    pub fn value(&self, z: Cx<T>) -> T {
        (z - self.pole).norm().ln() + self.harmonic_part(z)
    }

    /// `F'(z)` for the holomorphic completion `F = log(z - z0) + H`.
    pub fn holo_derivative(&self, z: Cx<T>) -> Cx<T> {
        let sing = (z - self.pole).inv();
        match &self.correction {
            Correction::Disk => {
                let Domain::Disk { center, radius } = self.domain else {
                    unreachable!()
                };
                let a = (self.pole - center).conj();
                sing + a / (cx_real(radius * radius) - a * (z - center))
            }
            Correction::Annulus { b0, alpha, beta, .. } => {
                let Domain::Annulus {
                    center,
                    r_inner,
                    r_outer,
                } = self.domain
                else {
                    unreachable!()
                };
                let u = z - center;
                let x = u / r_outer;
                let y = cx_real(r_inner) / u;
                let (mut px, mut py) = (Cx::new(T::one(), T::zero()), y);
                let mut s = Cx::zero();
                for (i, (a, b)) in alpha.iter().zip(beta).enumerate() {
                    let m = T::of(i + 1);
                    // d/du (u/R)^m = m x^{m-1}/R ; d/du (r/u)^m = -m y^m / u
                    s += *a * px * (m / r_outer) - b.conj() * py * m / u;
                    px *= x;
                    py *= y;
                }
                sing + u.inv() * *b0 + s * T::lit(2.0)
            }
        }
    }

    /// `∇G` encoded as `∂G/∂x + i ∂G/∂y`.
    pub fn gradient(&self, z: Cx<T>) -> Cx<T> {
        self.holo_derivative(z).conj()
    }

    /// Outward normal derivative at a boundary point.
    pub fn normal_derivative(&self, w: Cx<T>) -> Result<T> {
        let n = self.domain.outward_normal(w)?;
        Ok(self.normal_derivative_with(w, n))
    }

    /// Outward normal derivative given the normal, skipping the boundary check.
    pub fn normal_derivative_with(&self, w: Cx<T>, normal: Cx<T>) -> T {
        (self.holo_derivative(w) * normal).re
    }

    /// `|∇G(w)|`, which equals the normal derivative on the boundary.
    pub fn gradient_norm(&self, w: Cx<T>) -> T {
        self.holo_derivative(w).norm()
    }

    /// Logarithmic capacity `exp h(z0)` in the coordinate `w = z - z0`.
    pub fn log_capacity(&self) -> T {
        self.harmonic_part(self.pole).exp()
    }
}

/// Logarithmic capacity of `d` at `z0`.
pub fn log_capacity<T: Real>(d: &Domain<T>, z0: Cx<T>) -> Result<T> {
    Ok(solve_green(d, z0, None)?.log_capacity())
}

/// Harmonic measure of the inner circle of an annulus, `log(|z-c|/R) / log(r/R)`.
pub fn inner_harmonic_measure<T: Real>(d: &Domain<T>, z: Cx<T>) -> Result<T> {
    match *d {
        Domain::Annulus {
            center,
            r_inner,
            r_outer,
        } => Ok(((z - center).norm() / r_outer).ln() / (r_inner / r_outer).ln()),
        Domain::Disk { .. } => Err(LabError::Unsupported("a disk has a single boundary circle".into())),
    }
}

/// Harmonic functions whose conjugate periods can be measured.
#[derive(Clone, Debug)]
pub enum HarmonicFn<T> {
    /// `log|z - center|`.
    LogAbs {
        center: Cx<T>,
    },
    /// `b log|z - center| + Re Σ a_k (z - center)^k`.
    Series(HarmonicSeries<T>),
    Green(GreenSolution<T>),
    /// `log|g(z)|` for a polynomial with ascending coefficients.
    LogAbsPoly(Vec<Cx<T>>),
    Sum(Vec<HarmonicFn<T>>),
    Scaled(T, Box<HarmonicFn<T>>),
}

/// `u(z) = log_coeff · log|z - center| + Re Σ_k coeffs[k] (z - center)^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicSeries<T> {
    pub center: Cx<T>,
    pub coeffs: Vec<Cx<T>>,
    pub log_coeff: T,
}

impl<T: Real> HarmonicSeries<T> {
    pub fn zero() -> Self {
        Self {
            center: cx_real(T::zero()),
            coeffs: Vec::new(),
            log_coeff: T::zero(),
        }
    }

    pub fn value(&self, z: Cx<T>) -> T {
        let u = z - self.center;
        let mut p = Cx::zero();
        for a in self.coeffs.iter().rev() {
            p = p * u + *a;
        }
        let log = if self.log_coeff.is_zero() {
            T::zero()
        } else {
            self.log_coeff * u.norm().ln()
        };
        log + p.re
    }

    pub fn holo_derivative(&self, z: Cx<T>) -> Cx<T> {
        let u = z - self.center;
        let mut p = Cx::zero();
        for (k, a) in self.coeffs.iter().enumerate().skip(1).rev() {
            p = p * u + *a * T::of(k);
        }
        let log = if self.log_coeff.is_zero() {
            Cx::zero()
        } else {
            u.inv() * self.log_coeff
        };
        log + p
    }
}

impl<T: Real> HarmonicFn<T> {
    pub fn holo_derivative(&self, z: Cx<T>) -> Cx<T> {
        match self {
            HarmonicFn::LogAbs { center } => (z - *center).inv(),
            HarmonicFn::Series(s) => s.holo_derivative(z),
            HarmonicFn::Green(g) => g.holo_derivative(z),
            HarmonicFn::LogAbsPoly(c) => {
                let (mut p, mut dp): (Cx<T>, Cx<T>) = (Cx::zero(), Cx::zero());
                for a in c.iter().rev() {
                    dp = dp * z + p;
                    p = p * z + *a;
                }
                dp / p
            }
            HarmonicFn::Sum(parts) => parts.iter().fold(Cx::zero(), |acc, u| acc + u.holo_derivative(z)),
            HarmonicFn::Scaled(k, inner) => inner.holo_derivative(z) * *k,
        }
    }

    pub fn scaled(self, k: T) -> Self {
        HarmonicFn::Scaled(k, Box::new(self))
    }
}

/// Period of the conjugate differential around the single generator of an annulus.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CharacterPeriod<T> {
    pub value: T,
    pub generator: usize,
}

/// Counterclockwise period `∮ ∂u/∂r ds` over `|z - c| = radius`, `r_inner < radius < r_outer`.
///
/// Periods are meaningful modulo `2π`: moving the circle across a logarithmic
/// pole shifts the value by exactly `2π`.
pub fn character_period<T: Real>(
    d: &Domain<T>,
    u: &HarmonicFn<T>,
    radius: T,
    nodes: usize,
) -> Result<CharacterPeriod<T>> {
    let Domain::Annulus {
        center,
        r_inner,
        r_outer,
    } = *d
    else {
        return Err(LabError::Unsupported(
            "characters on a simply connected factor are trivial".into(),
        ));
    };
    if !(radius > r_inner && radius < r_outer) {
        return Err(LabError::InvalidArgument(format!(
            "period circle radius {radius} must lie strictly inside ({r_inner}, {r_outer})"
        )));
    }
    let m = nodes.max(8);
    let h = T::lit(2.0 * PI) / T::of(m);
    let mut acc = T::zero();
    for j in 0..m {
        let e = cis(h * T::of(j));
        acc += (u.holo_derivative(center + e * radius) * e).re;
    }
    Ok(CharacterPeriod {
        value: acc * h * radius,
        generator: 0,
    })
}

/// Whether two periods agree modulo `2π` within `tol`.
pub fn characters_equal<T: Real>(p: CharacterPeriod<T>, q: CharacterPeriod<T>, tol: T) -> Result<bool> {
    if p.generator != q.generator {
        return Err(LabError::MismatchedGenerators(p.generator, q.generator));
    }
    let two_pi = T::lit(2.0 * PI);
    let x = (p.value - q.value) % two_pi;
    let x = if x < T::zero() { x + two_pi } else { x };
    Ok(x.min(two_pi - x) <= tol)
}
