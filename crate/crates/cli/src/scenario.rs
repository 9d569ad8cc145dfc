//! Evaluating one scenario: hypothesis checks, both sides of the relation, and the verdict.

use std::f64::consts::PI;
use std::time::Instant;

use saitoh_core::green::{character_period, solve_green, HarmonicFn};
use saitoh_core::ideal::{multiplier_complement, psi_ideal_contained};
use saitoh_core::minimal::{concavity_report, default_t_grid, g_of_t, m2_formula, m2_quadrature};
use saitoh_core::{
    bergman_kernel_at, bergman_min_at, cx, hardy_dm_kernel_at, hardy_dm_min_at, hardy_s_kernel_at, hardy_s_min_at,
    Domain64, JetIdeal64, JetTarget64, KernelContext64, MinL2Setup64, PhiPreset64, ProductDomain, Setting, Truncation,
    WeightSpec, C64,
};

use crate::config::{PhiChoice, Relation, Scenario, Tag};

/// Slack in `Σ 1/p_j <= 1`-type hypotheses.
const SUM_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    HypothesisViolation,
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::HypothesisViolation => "hypothesis violation",
            Status::Error => "error",
        }
    }
}

/// Both sides at one truncation degree.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub degree: usize,
    pub lhs: f64,
    pub rhs: f64,
}

/// Outcome of one scenario. `pass` is `None` whenever no verdict was reached.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub id: String,
    pub tag: Tag,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub ratio: Option<f64>,
    pub pass: Option<bool>,
    pub status: Status,
    pub detail: String,
    pub sweep: Vec<SweepRow>,
    pub seconds: f64,
}

fn err(e: saitoh_core::LabError) -> String {
    e.to_string()
}

fn sum_inv(p: &[f64]) -> f64 {
    p.iter().map(|p| 1.0 / p).sum()
}

/// Order of vanishing of `g` at `z`, judged from its Taylor coefficients there.
fn zero_order(g: &[C64], z: C64) -> usize {
    let mut coeffs = g.to_vec();
    let mut order = 0;
    while coeffs.len() > 1 {
        let value = coeffs.iter().rev().fold(cx(0.0, 0.0), |acc, a| acc * z + a);
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max) * (1.0 + z.norm()).powi(coeffs.len() as i32);
        if value.norm() > 1e-12 * scale {
            break;
        }
        // synthetic division by (w - z)
        let mut q = vec![cx(0.0, 0.0); coeffs.len() - 1];
        let mut carry = cx(0.0, 0.0);
        for k in (1..coeffs.len()).rev() {
            carry = coeffs[k] + carry * z;
            q[k - 1] = carry;
        }
        coeffs = q;
        order += 1;
    }
    order
}

impl Scenario {
    fn truncation(&self, degree: usize) -> Truncation {
        Truncation {
            degree,
            boundary_nodes: self.boundary_nodes,
            radial_nodes: self.radial_nodes,
            angular_nodes: self.angular_nodes,
        }
    }

    fn box_orders(&self) -> Option<&[usize]> {
        match &self.ideal {
            Some(JetIdeal64::Box(b)) => Some(b),
            _ => None,
        }
    }

    /// The theorem's hypotheses that this configuration does not meet.
    pub fn hypothesis_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.exponents.len();
        let s = sum_inv(&self.exponents);
        let mut need = |ok: bool, msg: String| {
            if !ok {
                out.push(msg)
            }
        };
        for (j, f) in self.factors.iter().enumerate() {
            if let PhiChoice::Fixed(PhiPreset64::GaussianBump(a)) = f.phi {
                need(a >= 0.0, format!("φ_{} = {a}|z - z_j|² is not subharmonic", j + 1));
            }
        }
        let product = matches!(
            self.tag,
            Tag::Main11 | Tag::Main12 | Tag::Main21 | Tag::Main22 | Tag::Main23 | Tag::Main24
        );
        if product {
            need(s <= 1.0 + SUM_TOL, format!("needs Σ 1/p_j <= 1, got {s}"));
        }
        if matches!(self.tag, Tag::Main11 | Tag::Main21 | Tag::Main23) {
            need(n > 1, format!("needs at least two factors, got {n}"));
        }
        match self.tag {
            Tag::Main12 => {
                let ideal = self
                    .ideal
                    .clone()
                    .unwrap_or(JetIdeal64::Multiplier(self.exponents.clone()));
                need(
                    psi_ideal_contained(&ideal, &self.exponents).unwrap_or(false),
                    "needs the ideal to contain the multiplier ideal of ψ".into(),
                );
            }
            Tag::Main22 => need(
                self.ideal.is_none(),
                "is stated for the unconstrained kernels (β̃ = 0); drop `ideal`".into(),
            ),
            Tag::Main23 | Tag::Main24 => match self.box_orders() {
                None => need(false, "needs a box ideal `{ kind = \"box\", orders = [...] }`".into()),
                Some(b) if self.tag == Tag::Main24 => {
                    let w: f64 = b.iter().zip(&self.exponents).map(|(b, p)| (*b as f64 + 1.0) / p).sum();
                    need(w <= 1.0 + SUM_TOL, format!("needs Σ (β̃_j + 1)/p_j <= 1, got {w}"));
                }
                Some(_) => {}
            },
            Tag::SaitohStrict => {
                need(n == 1, "is a one-variable statement".into());
                if let Some(f) = self.factors.first() {
                    need(
                        f.domain.is_annulus(),
                        "needs a multiply connected (annulus) factor".into(),
                    );
                    need(
                        matches!(f.phi, PhiChoice::Fixed(PhiPreset64::Zero)),
                        "is stated for φ = 0".into(),
                    );
                }
                need(self.c.is_constant(), "is stated for c ≡ 1".into());
                need(self.exponents == [1.0], "is stated for p = 1".into());
            }
            Tag::Saitoh1d => {
                need(n == 1, "is a one-variable statement".into());
                if let (Some(f), Some(p)) = (self.factors.first(), self.exponents.first()) {
                    // Lelong number of φ + 2ψ at z₀: 2p from ψ plus 2·ord_{z₀} g from log|g|²
                    let pole = match &f.phi {
                        PhiChoice::Fixed(PhiPreset64::LogAbsPoly { g, .. }) => 2.0 * zero_order(g, f.basepoint) as f64,
                        _ => 0.0,
                    };
                    let nu = 2.0 * p + pole;
                    need(
                        nu >= 2.0 - SUM_TOL,
                        format!("needs the Lelong number of φ + 2ψ at z₀ to be >= 2, got {nu}"),
                    );
                }
            }
            Tag::HigherJet => {
                need(n == 1, "is a one-variable statement".into());
                if let Some(k) = self.jet_order {
                    need(
                        self.exponents == [(k + 1) as f64],
                        format!("uses ψ = (k+1) G, so p must be {}", k + 1),
                    );
                }
                need(
                    self.ideal.is_none(),
                    "fixes the ideal to jets of order k; drop `ideal`".into(),
                );
            }
            Tag::ProdS | Tag::ProdB => {
                if self.ideal.is_some() {
                    need(self.box_orders().is_some(), "product formulas need a box ideal".into());
                    need(
                        self.factor_targets.is_some(),
                        "a constrained product formula needs `factor_targets`".into(),
                    );
                }
                if self.tag == Tag::ProdB {
                    need(self.c.is_constant(), "the Bergman product formula needs c ≡ 1".into());
                }
            }
            Tag::App1 => {
                need(
                    matches!(&self.ideal, None | Some(JetIdeal64::Multiplier(_))),
                    "is stated for the multiplier ideal of ψ".into(),
                );
                let e1 = multiplier_complement(&self.exponents);
                for (alpha, d) in &self.target.terms {
                    need(d.norm() > 0.0, format!("coefficient of {alpha:?} must be nonzero"));
                    need(e1.contains(alpha), format!("{alpha:?} is not in E₁"));
                    let dominated = e1
                        .iter()
                        .any(|b| b != alpha && b.iter().zip(alpha).all(|(b, a)| b >= a));
                    need(!dominated, format!("{alpha:?} is not maximal in E₁"));
                }
            }
            Tag::Concavity => {
                let ideal = self
                    .ideal
                    .clone()
                    .unwrap_or(JetIdeal64::Multiplier(self.exponents.clone()));
                need(
                    psi_ideal_contained(&ideal, &self.exponents).unwrap_or(false),
                    "needs the ideal to contain the multiplier ideal of ψ".into(),
                );
            }
            _ => {}
        }
        out
    }

    /// Resolves tuned presets and solves the factor Green functions.
    fn context(&self) -> Result<KernelContext64, String> {
        let phis = self
            .factors
            .iter()
            .map(|f| match &f.phi {
                PhiChoice::Fixed(p) => Ok(p.clone()),
                PhiChoice::TunedLogPower => tuned_log_power(&f.domain, f.basepoint).map(PhiPreset64::HarmonicLogPower),
            })
            .collect::<Result<Vec<_>, String>>()?;
        let domain = ProductDomain::new(
            self.factors.iter().map(|f| f.domain).collect(),
            self.factors.iter().map(|f| f.basepoint).collect(),
        )
        .map_err(err)?;
        let setting = Setting::new(domain, self.exponents.clone(), WeightSpec::new(phis), self.c).map_err(err)?;
        KernelContext64::new(setting).map_err(err)
    }

    /// `(lhs, rhs, note)` at one degree.
    fn evaluate(&self, ctx: Option<&KernelContext64>, degree: usize) -> Result<(f64, f64, String), String> {
        let tr = self.truncation(degree);
        let p = &self.exponents;
        let n = p.len() as f64;
        let integral = self.c.integral();
        let ideal_or_psi = || self.ideal.clone().unwrap_or(JetIdeal64::Multiplier(p.clone()));
        if self.tag == Tag::M2Oracle {
            let lhs = m2_quadrature(p, &self.target.terms, self.t).map_err(err)?;
            return Ok((lhs, m2_formula(p, &self.target.terms, self.t), String::new()));
        }
        let ctx = ctx.ok_or("scenario has no kernel context")?;
        let v = |r: saitoh_core::Result<saitoh_core::KernelReport64>| r.map(|r| r.value).map_err(err);
        let beta_weight = |b: &[usize]| -> (f64, f64) {
            let prod = b.iter().map(|b| *b as f64 + 1.0).product();
            let sum = b.iter().zip(p).map(|(b, p)| (*b as f64 + 1.0) / p).sum();
            (prod, sum)
        };
        Ok(match self.tag {
            Tag::Main11 | Tag::SaitohStrict | Tag::Saitoh1d => (
                v(hardy_dm_kernel_at(ctx, &tr))?,
                integral * PI * v(bergman_kernel_at(ctx, &tr))?,
                String::new(),
            ),
            Tag::Main12 => {
                let ideal = ideal_or_psi();
                (
                    v(hardy_dm_min_at(ctx, &ideal, &self.target, &tr))?,
                    integral * PI * v(bergman_min_at(ctx, &ideal, &self.target, &tr))?,
                    String::new(),
                )
            }
            Tag::Main21 => (
                v(hardy_s_kernel_at(ctx, &tr))?,
                sum_inv(p) * PI.powf(n - 1.0) * v(hardy_dm_kernel_at(ctx, &tr))?,
                String::new(),
            ),
            Tag::Main22 => (
                v(hardy_s_kernel_at(ctx, &tr))?,
                sum_inv(p) * integral * PI.powf(n) * v(bergman_kernel_at(ctx, &tr))?,
                String::new(),
            ),
            Tag::Main23 | Tag::Main24 => {
                let ideal = self.ideal.clone().ok_or("missing box ideal")?;
                let b = self.box_orders().ok_or("missing box ideal")?;
                let (prod, sum) = beta_weight(b);
                let lhs = prod * v(hardy_s_min_at(ctx, &ideal, &self.target, &tr))?;
                let rhs = if self.tag == Tag::Main23 {
                    sum * PI.powf(n - 1.0) * v(hardy_dm_min_at(ctx, &ideal, &self.target, &tr))?
                } else {
                    sum * integral * PI.powf(n) * v(bergman_min_at(ctx, &ideal, &self.target, &tr))?
                };
                (lhs, rhs, String::new())
            }
            Tag::HigherJet => {
                let k = self.jet_order.ok_or("missing jet_order")?;
                let ideal = JetIdeal64::Box(vec![k]);
                let h = JetTarget64::monomial(vec![k]);
                (
                    v(hardy_dm_min_at(ctx, &ideal, &h, &tr))?,
                    integral * PI * v(bergman_min_at(ctx, &ideal, &h, &tr))?,
                    String::new(),
                )
            }
            Tag::ProdS | Tag::ProdB => {
                let bergman = self.tag == Tag::ProdB;
                let whole = match &self.ideal {
                    None if bergman => v(bergman_kernel_at(ctx, &tr))?,
                    None => v(hardy_s_kernel_at(ctx, &tr))?,
                    Some(i) if bergman => v(bergman_min_at(ctx, i, &self.target, &tr))?,
                    Some(i) => v(hardy_s_min_at(ctx, i, &self.target, &tr))?,
                };
                let mut product = 1.0;
                for j in 0..ctx.dim() {
                    let f = KernelContext64::new(ctx.setting().factor(j).map_err(err)?).map_err(err)?;
                    product *= match (self.box_orders(), &self.factor_targets) {
                        (Some(b), Some(h)) => {
                            let (i, t) = (JetIdeal64::Box(vec![b[j]]), JetTarget64::product(&[h[j].clone()]));
                            if bergman {
                                v(bergman_min_at(&f, &i, &t, &tr))?
                            } else {
                                v(hardy_s_min_at(&f, &i, &t, &tr))?
                            }
                        }
                        _ if bergman => v(bergman_kernel_at(&f, &tr))?,
                        _ => v(hardy_s_kernel_at(&f, &tr))?,
                    };
                }
                (whole, product, String::new())
            }
            Tag::App1 => {
                let ideal = ideal_or_psi();
                let lhs = 1.0 / v(hardy_s_min_at(ctx, &ideal, &self.target, &tr))?;
                let mut rhs = 0.0;
                for (alpha, d) in &self.target.terms {
                    let k = v(hardy_s_min_at(ctx, &ideal, &JetTarget64::monomial(alpha.clone()), &tr))?;
                    rhs += d.norm_sqr() / k;
                }
                (lhs, rhs, String::new())
            }
            Tag::Concavity => self.concavity(ctx, &tr)?,
            Tag::M2Oracle => unreachable!("handled above"),
        })
    }

    fn concavity(&self, ctx: &KernelContext64, tr: &Truncation) -> Result<(f64, f64, String), String> {
        let s = ctx.setting();
        let ideal = self
            .ideal
            .clone()
            .unwrap_or(JetIdeal64::Multiplier(self.exponents.clone()));
        let setup = MinL2Setup64::new(
            s.domain.clone(),
            s.exponents.clone(),
            s.weight.clone(),
            ideal,
            self.target.clone(),
        )
        .map_err(err)?;
        let ts = self.t_grid.clone().unwrap_or_else(default_t_grid);
        let gs = ts
            .iter()
            .map(|t| g_of_t(&setup, self.c, *t, tr))
            .collect::<saitoh_core::Result<Vec<_>>>()
            .map_err(err)?;
        let rep = concavity_report(&ts, &gs, &self.c).map_err(err)?;
        let mut note = format!("linear {}", rep.linear);
        if self.require_linear {
            // a line through the origin in r = h(t); for t = 0 the slope is G(0)/∫c e^{-t}
            let last = rep.r.len() - 1;
            let slope = rep.g[last] / rep.r[last];
            let spread = rep
                .r
                .iter()
                .zip(&rep.g)
                .map(|(r, g)| ((g / r) / slope - 1.0).abs())
                .fold(0.0, f64::max);
            note += &format!(", slope spread {spread:.3e}");
            if !(rep.linear && spread < 1e-6) {
                // reported as a failure through a violation larger than any tolerance
                return Ok((f64::INFINITY, gs[0], format!("expected a linear profile; {note}")));
            }
        }
        Ok((rep.max_violation, gs[0], note))
    }

    /// Runs the scenario. Never panics on numerical failures; they become [`Status::Error`].
    pub fn run(&self) -> RunReport {
        self.run_at(self.degree)
    }

    pub fn run_at(&self, degree: usize) -> RunReport {
        let start = Instant::now();
        let mut report = RunReport {
            id: self.id.clone(),
            tag: self.tag,
            lhs: None,
            rhs: None,
            ratio: None,
            pass: None,
            status: Status::Error,
            detail: String::new(),
            sweep: Vec::new(),
            seconds: 0.0,
        };
        let violations = self.hypothesis_violations();
        if !violations.is_empty() {
            report.status = Status::HypothesisViolation;
            report.detail = format!("{} {}", self.tag, violations.join("; "));
        } else if let Err(e) = self.judge(degree, &mut report) {
            report.status = Status::Error;
            report.detail = e;
        }
        report.seconds = start.elapsed().as_secs_f64();
        report
    }

    fn judge(&self, degree: usize, report: &mut RunReport) -> Result<(), String> {
        let ctx = if self.tag == Tag::M2Oracle {
            None
        } else {
            Some(self.context()?)
        };
        let (lhs, rhs, note) = self.evaluate(ctx.as_ref(), degree)?;
        report.sweep.push(SweepRow { degree, lhs, rhs });
        let (pass, verdict) = match self.relation {
            Relation::Equality { tol } => {
                let e = (lhs / rhs - 1.0).abs();
                (e <= tol, format!("|lhs/rhs - 1| = {e:.3e}, tol {tol:e}"))
            }
            Relation::Inequality { tol } => {
                let slack = lhs - rhs;
                (
                    slack >= -tol * rhs.abs(),
                    format!("lhs - rhs = {slack:.6e}, tol {tol:e}·|rhs|"),
                )
            }
            Relation::AtMost { tol } => (lhs <= tol * rhs, format!("lhs <= {tol:e}·rhs")),
            Relation::StrictGap {
                margin,
                reference_degree,
            } => {
                let reference = reference_degree.unwrap_or(degree + self.reference_step);
                let (lr, rr, _) = self.evaluate(ctx.as_ref(), reference)?;
                report.sweep.push(SweepRow {
                    degree: reference,
                    lhs: lr,
                    rhs: rr,
                });
                let gap = lhs - rhs;
                let estimate = (lhs - lr).abs() + (rhs - rr).abs();
                let need = margin.max(10.0 * estimate);
                (
                    gap > need,
                    format!("gap {gap:.6e}, truncation estimate {estimate:.3e} (N = {degree} vs {reference}), needs > {need:.3e}"),
                )
            }
        };
        report.lhs = Some(lhs);
        report.rhs = Some(rhs);
        report.ratio = Some(lhs / rhs);
        report.pass = Some(pass);
        report.status = if pass { Status::Pass } else { Status::Fail };
        report.detail = if note.is_empty() {
            verdict
        } else {
            format!("{verdict}; {note}")
        };
        Ok(())
    }

    /// Both sides across several degrees; violations and errors end the sweep.
    pub fn sweep(&self, degrees: &[usize]) -> Result<Vec<SweepRow>, String> {
        let violations = self.hypothesis_violations();
        if !violations.is_empty() {
            return Err(format!("hypothesis violation: {}", violations.join("; ")));
        }
        let ctx = if self.tag == Tag::M2Oracle {
            None
        } else {
            Some(self.context()?)
        };
        degrees
            .iter()
            .map(|&degree| {
                let (lhs, rhs, _) = self.evaluate(ctx.as_ref(), degree)?;
                Ok(SweepRow { degree, lhs, rhs })
            })
            .collect()
    }
}

/// `s` with `2 s log|z - c|` carrying the same character as the Green function at `z₀`.
fn tuned_log_power(d: &Domain64, z0: C64) -> Result<f64, String> {
    let Domain64::Annulus { center, r_inner, .. } = *d else {
        return Err("the tuned log-power weight needs an annulus factor".into());
    };
    let green = solve_green(d, z0, None).map_err(err)?;
    // any circle separating the inner boundary from z₀
    let radius = 0.5 * (r_inner + (z0 - center).norm());
    let period = character_period(d, &HarmonicFn::Green(green), radius, 256).map_err(err)?;
    Ok(-period.value / (2.0 * PI))
}
