//! Minimal weighted L² integrals over sublevel sets `{ψ < -t}` and their concavity in `r = h(t)`.

use std::f64::consts::{LN_10, PI};

use crate::error::{LabError, Result};
use crate::geometry::{area_quadrature, Domain, ProductDomain};
use crate::ideal::{multiplier_boundary, psi_ideal_contained, JetIdeal, JetTarget};
use crate::kernel::{KernelContext, KernelReport, Setting, Truncation};
use crate::scalar::{Cx, Real};
pub use crate::weight::CWeight;
use crate::weight::WeightSpec;

/// `h(t) = ∫_t^∞ c(l) e^{-l} dl`.
pub fn c_tail<T: Real>(c: &CWeight<T>, t: T) -> T {
    c.tail(t)
}

/// A product of centered disks with exponents, weights and a jet problem `(I, h₀)` satisfying `I(ψ) ⊆ I`.
#[derive(Clone, Debug)]
pub struct MinL2Setup<T> {
    pub domain: ProductDomain<T>,
    pub exponents: Vec<T>,
    pub weight: WeightSpec<T>,
    pub ideal: JetIdeal<T>,
    pub target: JetTarget<T>,
}

impl<T: Real> MinL2Setup<T> {
    pub fn new(
        domain: ProductDomain<T>,
        exponents: Vec<T>,
        weight: WeightSpec<T>,
        ideal: JetIdeal<T>,
        target: JetTarget<T>,
    ) -> Result<Self> {
        for (d, z) in domain.factors().iter().zip(domain.basepoint()) {
            match d {
                Domain::Disk { center, radius } if (*z - *center).norm() <= T::lit(1e-14) * *radius => {}
                _ => {
                    return Err(LabError::Unsupported(
                        "minimal integrals need disk factors with the basepoint at the center".into(),
                    ))
                }
            }
        }
        // validates lengths and presets
        Setting::new(domain.clone(), exponents.clone(), weight.clone(), CWeight::Constant)?;
        if !psi_ideal_contained(&ideal, &exponents)? {
            return Err(LabError::InvalidArgument(
                "the ideal must contain the multiplier ideal of ψ".into(),
            ));
        }
        target.check_against(&ideal)?;
        Ok(Self {
            domain,
            exponents,
            weight,
            ideal,
            target,
        })
    }

    /// Flat bidisc-style setup: unit disks at the origin, `φ = 0`, `I = I(ψ)`, `h₀ = 1`.
    pub fn unit_polydisc(exponents: Vec<T>) -> Result<Self> {
        let n = exponents.len();
        let zero = Cx::new(T::zero(), T::zero());
        let domain = ProductDomain::new(vec![Domain::unit_disk(); n], vec![zero; n])?;
        let ideal = JetIdeal::Multiplier(exponents.clone());
        Self::new(
            domain,
            exponents,
            WeightSpec::flat(n),
            ideal,
            JetTarget::constant(n, Cx::new(T::one(), T::zero())),
        )
    }

    pub fn context(&self, c: CWeight<T>) -> Result<KernelContext<T>> {
        KernelContext::new(Setting::new(
            self.domain.clone(),
            self.exponents.clone(),
            self.weight.clone(),
            c,
        )?)
    }
}

/// `G(t)` together with the underlying constrained solve.
pub fn g_of_t_report<T: Real>(s: &MinL2Setup<T>, c: CWeight<T>, t: T, tr: &Truncation) -> Result<KernelReport<T>> {
    if !(t >= T::zero()) {
        return Err(LabError::InvalidArgument(format!("t must be nonnegative, got {t}")));
    }
    let ctx = s.context(c)?;
    let basis = ctx.basis(tr);
    let g = ctx.layered_gram(&basis, tr, t)?;
    ctx.constrained_kernel(&basis, &g, &s.ideal, &s.target, tr)
}

/// `G(t) = min ∫_{ψ<-t} |f|² e^{-φ} c(-ψ)` over `(f - h₀, z₀) ∈ I`.
pub fn g_of_t<T: Real>(s: &MinL2Setup<T>, c: CWeight<T>, t: T, tr: &Truncation) -> Result<T> {
    Ok(T::one() / g_of_t_report(s, c, t, tr)?.value)
}

/// Closed form of `G(t)` when every `φ_j` is harmonic, `I = I(ψ)` and `h₀` is supported on
/// `E = {α : Σ (α_j+1)/p_j = 1}`:
/// `h(t) Σ_{α∈E} |d_α|² πⁿ e^{-φ(z₀)} / Π (α_j+1) c_j^{2α_j+2}` with `c_j = 1/R_j`.
pub fn closed_form_g<T: Real>(s: &MinL2Setup<T>, c: &CWeight<T>, t: T) -> Result<T> {
    if !s.weight.all_harmonic(s.domain.factors()) {
        return Err(LabError::Unsupported("closed form needs harmonic weights".into()));
    }
    let n = s.domain.dim();
    if s.ideal.complement(n)? != JetIdeal::Multiplier(s.exponents.clone()).complement(n)? {
        return Err(LabError::Unsupported(
            "closed form needs I equal to the multiplier ideal of ψ".into(),
        ));
    }
    let e = multiplier_boundary(&s.exponents);
    if s.target
        .terms
        .iter()
        .any(|(a, d)| !e.contains(a) && d.norm() > T::zero())
    {
        return Err(LabError::Unsupported("closed form needs h₀ supported on E".into()));
    }
    let factors = s.domain.factors();
    let z0 = s.domain.basepoint();
    let weight_at_z0 = s
        .weight
        .phis
        .iter()
        .zip(factors.iter().zip(z0))
        .map(|(phi, (d, z))| phi.value_at_basepoint(d, *z).map(|v| (-v).exp()))
        .try_fold(T::one(), |acc, w| w.map(|w| acc * w))
        .ok_or_else(|| LabError::Unsupported("φ(z₀) = -∞".into()))?;
    let pi_n = T::lit(PI).powi(n as i32);
    let mut sum = T::zero();
    for alpha in &e {
        let d = s.target.coefficient(alpha);
        let mut denom = T::one();
        for (a, f) in alpha.iter().zip(factors) {
            // capacity of a centered disk of radius R is 1/R
            denom *= T::of(a + 1) * f.scale().powi(-(2 * *a as i32 + 2));
        }
        sum += d.norm_sqr() / denom;
    }
    Ok(c.tail(t) * sum * pi_n * weight_at_z0)
}

/// Default `t`-grid: 9 points with `e^{-t}` geometric from 1 down to 0.1.
pub fn default_t_grid<T: Real>() -> Vec<T> {
    (0..9).map(|i| T::lit(i as f64 * LN_10 / 8.0)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConcavityReport<T> {
    /// `r_i = h(t_i)`, ascending.
    pub r: Vec<T>,
    /// `G(h^{-1}(r_i))`, aligned with `r`.
    pub g: Vec<T>,
    /// Chord value minus function value at each interior point; positive means non-concave.
    pub second_differences: Vec<T>,
    pub max_violation: T,
    /// `max |G|` used to scale the tolerances.
    pub scale: T,
    pub linear: bool,
}

/// Second differences of `r ↦ G(h^{-1}(r))` on a nonuniform grid.
pub fn concavity_report<T: Real>(ts: &[T], gs: &[T], c: &CWeight<T>) -> Result<ConcavityReport<T>> {
    if ts.len() != gs.len() || ts.len() < 5 {
        return Err(LabError::InvalidArgument("need at least five aligned samples".into()));
    }
    let mut pts: Vec<(T, T)> = ts.iter().map(|t| c.tail(*t)).zip(gs.iter().copied()).collect();
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite r"));
    let sd: Vec<T> = pts
        .windows(3)
        .map(|w| {
            let ((r0, g0), (r1, g1), (r2, g2)) = (w[0], w[1], w[2]);
            g0 + (g2 - g0) * (r1 - r0) / (r2 - r0) - g1
        })
        .collect();
    let scale = gs.iter().fold(T::zero(), |m, g| m.max(g.abs()));
    let max_violation = sd.iter().fold(T::zero(), |m, v| m.max(*v));
    let tol = T::lit(1e-6) * scale;
    Ok(ConcavityReport {
        linear: sd.iter().all(|v| v.abs() < tol),
        r: pts.iter().map(|p| p.0).collect(),
        g: pts.iter().map(|p| p.1).collect(),
        second_differences: sd,
        max_violation,
        scale,
    })
}

/// `∫_{ψ<-t} |f|² dλ` for `ψ = max 2 p_j log|w_j|` and a polynomial `f = Σ b_α w^α`,
/// by direct tensor quadrature of `|f|²` over the polydisc `{|w_j| < e^{-t/(2p_j)}}`.
pub fn m2_quadrature<T: Real>(p: &[T], coeffs: &[(Vec<usize>, Cx<T>)], t: T) -> Result<T> {
    let n = p.len();
    if coeffs.iter().any(|(a, _)| a.len() != n) {
        return Err(LabError::InvalidArgument("multi-index length mismatch".into()));
    }
    let deg = coeffs.iter().flat_map(|(a, _)| a.iter().copied()).max().unwrap_or(0);
    let zero = Cx::new(T::zero(), T::zero());
    let rules = p
        .iter()
        .map(|pj| {
            let d = Domain::disk(zero, (-t / (T::lit(2.0) * *pj)).exp())?;
            area_quadrature(&d, deg + 4, next_even(4 * deg + 8))
        })
        .collect::<Result<Vec<_>>>()?;
    let f = |w: &[Cx<T>]| -> Cx<T> {
        coeffs.iter().fold(zero, |acc, (a, b)| {
            acc + a
                .iter()
                .zip(w)
                .fold(*b, |m, (k, z)| m * crate::scalar::powi(*z, *k as i64))
        })
    };
    let mut idx = vec![0usize; n];
    let mut point = vec![zero; n];
    let mut total = T::zero();
    loop {
        let mut w = T::one();
        for j in 0..n {
            point[j] = rules[j].nodes[idx[j]];
            w *= rules[j].weights[idx[j]];
        }
        total += w * f(&point).norm_sqr();
        let mut j = n;
        loop {
            if j == 0 {
                return Ok(total);
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < rules[j].len() {
                break;
            }
            idx[j] = 0;
        }
    }
}

fn next_even(m: usize) -> usize {
    m + m % 2
}

/// `Σ_α e^{-Σ (α_j+1) t / p_j} |b_α|² πⁿ / Π (α_j+1)`.
pub fn m2_formula<T: Real>(p: &[T], coeffs: &[(Vec<usize>, Cx<T>)], t: T) -> T {
    let pi_n = T::lit(PI).powi(p.len() as i32);
    coeffs.iter().fold(T::zero(), |acc, (a, b)| {
        let (rate, denom) = a.iter().zip(p).fold((T::zero(), T::one()), |(r, d), (k, pj)| {
            (r + T::of(k + 1) / *pj, d * T::of(k + 1))
        });
        acc + (-rate * t).exp() * b.norm_sqr() * pi_n / denom
    })
}
