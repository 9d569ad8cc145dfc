//! Acceptance suite: one line per criterion, nonzero exit if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use saitoh_core::green::{character_period, inner_harmonic_measure, HarmonicFn};
use saitoh_core::linalg::{dot, Cholesky};
use saitoh_core::minimal::{default_t_grid, m2_formula, m2_quadrature};
use saitoh_core::*;

struct Outcome {
    pass: bool,
    detail: String,
}

type Check = fn() -> Result<Outcome>;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn origin(n: usize) -> Vec<C64> {
    vec![cx(0.0, 0.0); n]
}

fn unit_polydisc(basepoint: Vec<C64>) -> ProductDomain64 {
    let n = basepoint.len();
    ProductDomain::new(vec![Domain::unit_disk(); n], basepoint).unwrap()
}

fn annulus() -> Domain64 {
    Domain::annulus(cx(0.0, 0.0), 0.5, 1.0).unwrap()
}

fn context(domain: ProductDomain64, p: Vec<f64>, w: WeightSpec64, c: CWeight64) -> Result<KernelContext64> {
    KernelContext::new(Setting::new(domain, p, w, c)?)
}

fn disk_baselines() -> Result<Outcome> {
    let ctx = context(
        unit_polydisc(origin(1)),
        vec![1.0],
        WeightSpec::flat(1),
        CWeight::Constant,
    )?;
    let tr = Truncation::new(8);
    let b = bergman_kernel_at(&ctx, &tr)?.value;
    let k = hardy_s_kernel_at(&ctx, &tr)?.value;
    let (eb, ek) = (rel(b, 1.0 / PI), rel(k, 1.0));
    Ok(Outcome {
        pass: eb < 1e-10 && ek < 1e-8,
        detail: format!("B(0)·π = {:.15}, rel {eb:.1e}; K_S(0) = {k:.15}, rel {ek:.1e}", b * PI),
    })
}

fn bidisc_main_equality() -> Result<Outcome> {
    let tr = Truncation::new(16);
    let mut pass = true;
    let mut detail = Vec::new();
    for (c, target, b_anchor) in [
        (CWeight::Constant, 1.0, 1.0 / (PI * PI)),
        (CWeight::Exponential(0.5), 2.0 / 3.0, 1.5 / (PI * PI)),
    ] {
        let ctx = context(unit_polydisc(origin(2)), vec![2.0, 2.0], WeightSpec::flat(2), c)?;
        let k = hardy_dm_kernel_at(&ctx, &tr)?.value;
        let b = bergman_kernel_at(&ctx, &tr)?.value;
        let ratio = k / (PI * b);
        let e = rel(ratio, target);
        pass &= e < 1e-4 && rel(k, 1.0 / PI) < 1e-4 && rel(b, b_anchor) < 1e-4;
        detail.push(format!("{c:?}: ratio {ratio:.12} vs {target:.12} (rel {e:.1e})"));
    }
    Ok(Outcome {
        pass,
        detail: detail.join("; "),
    })
}

fn s_versus_face() -> Result<Outcome> {
    let tr = Truncation::new(16);
    let p = vec![2.0, 2.0];
    let ctx = context(
        unit_polydisc(origin(2)),
        p.clone(),
        WeightSpec::flat(2),
        CWeight::Constant,
    )?;
    let ks = hardy_s_kernel_at(&ctx, &tr)?.value;
    let kd = hardy_dm_kernel_at(&ctx, &tr)?.value;
    let rhs = ctx.setting().exponent_sum() * PI * kd;
    let e = rel(ks, rhs);
    Ok(Outcome {
        pass: e < 1e-4 && rel(ks, 1.0) < 1e-4,
        detail: format!("K_S(0) = {ks:.15}, (Σ1/p)·π·K_∂M(0) = {rhs:.15}, rel {e:.1e}"),
    })
}

fn higher_jet_disk() -> Result<Outcome> {
    let tr = Truncation::new(8);
    let ctx = context(
        unit_polydisc(origin(1)),
        vec![2.0],
        WeightSpec::flat(1),
        CWeight::Constant,
    )?;
    let ideal = JetIdeal::Box(vec![1]);
    let h = JetTarget::monomial(vec![1]);
    let k = hardy_dm_min_at(&ctx, &ideal, &h, &tr)?.value;
    let b = PI * bergman_min_at(&ctx, &ideal, &h, &tr)?.value;
    let (ek, eb) = (rel(k, 2.0), rel(b, 2.0));
    Ok(Outcome {
        pass: ek < 1e-8 && eb < 1e-8,
        detail: format!("K⁽¹⁾(0) = {k:.15} (rel {ek:.1e}), π·B⁽¹⁾(0) = {b:.15} (rel {eb:.1e})"),
    })
}

/// `(K̂, πB)` on the annulus at a real basepoint.
fn annulus_pair(z0: f64, degree: usize) -> Result<(f64, f64)> {
    let ctx = context(
        ProductDomain::single(annulus(), cx(z0, 0.0))?,
        vec![1.0],
        WeightSpec::flat(1),
        CWeight::Constant,
    )?;
    let tr = Truncation::new(degree);
    Ok((
        hardy_dm_kernel_at(&ctx, &tr)?.value,
        PI * bergman_kernel_at(&ctx, &tr)?.value,
    ))
}

/// Gap `K̂ - πB` at `degree` against `10 ×` the change of both sides when the degree grows by `step`.
fn gap_check(z0: f64, degree: usize, step: usize) -> Result<(bool, f64, f64)> {
    let (k, b) = annulus_pair(z0, degree)?;
    let (kr, br) = annulus_pair(z0, degree + step)?;
    let gap = k - b;
    let estimate = (k - kr).abs() + (b - br).abs();
    Ok((gap > 10.0 * estimate, gap, estimate))
}

fn annulus_strict() -> Result<Outcome> {
    let start = Instant::now();
    let mut pass = true;
    let mut detail = Vec::new();
    for z0 in [0.6, 0.7, 0.8] {
        for n in [16, 24, 32] {
            let (ok, gap, est) = gap_check(z0, n, 8)?;
            pass &= ok;
            detail.push(format!(
                "z₀={z0} N={n}: gap {gap:.3e} est {est:.1e}{}",
                if ok { "" } else { " ✗" }
            ));
        }
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(60);
    // The same relation once the Laurent truncation has converged; reported, not graded.
    let mut resolved = Vec::new();
    for z0 in [0.6, 0.7, 0.8] {
        let (ok, gap, est) = gap_check(z0, 72, 8)?;
        resolved.push(format!(
            "z₀={z0}: gap {gap:.4e} est {est:.1e} {}",
            if ok { "ok" } else { "✗" }
        ));
    }
    Ok(Outcome {
        pass,
        detail: format!(
            "{} [primary window {elapsed:.1?}] | diagnostic at N=72 vs 80: {}",
            detail.join(", "),
            resolved.join(", ")
        ),
    })
}

fn product_formulas() -> Result<Outcome> {
    let z0 = vec![cx(0.3, 0.1), cx(0.0, -0.2)];
    let phis = vec![PhiPreset::Zero, PhiPreset::GaussianBump(0.5)];
    let domain = unit_polydisc(z0.clone());
    let ctx = context(domain, vec![1.0, 1.0], WeightSpec::new(phis.clone()), CWeight::Constant)?;
    let tr = Truncation::new(12);
    let factors: Vec<KernelContext64> = (0..2)
        .map(|j| KernelContext::new(ctx.setting().factor(j)?))
        .collect::<Result<_>>()?;
    let hs = [
        vec![cx(1.0, 0.0), cx(0.5, 0.0)],
        vec![cx(0.0, 0.0), cx(1.0, 0.0), cx(-0.3, 0.2)],
    ];
    let ideal = JetIdeal::Box(vec![1, 1]);
    let target = JetTarget::product(&hs);
    let per_factor = |j: usize, f: &dyn Fn(&KernelContext64, &JetIdeal64, &JetTarget64) -> Result<f64>| {
        f(
            &factors[j],
            &JetIdeal::Box(vec![1]),
            &JetTarget::product(&[hs[j].clone()]),
        )
    };
    let ks = hardy_s_kernel_at(&ctx, &tr)?.value;
    let ks_prod = factors
        .iter()
        .map(|f| hardy_s_kernel_at(f, &tr).map(|r| r.value))
        .product::<Result<f64>>()?;
    let kj = hardy_s_min_at(&ctx, &ideal, &target, &tr)?.value;
    let kj_prod = per_factor(0, &|c, i, h| Ok(hardy_s_min_at(c, i, h, &tr)?.value))?
        * per_factor(1, &|c, i, h| Ok(hardy_s_min_at(c, i, h, &tr)?.value))?;
    let bj = bergman_min_at(&ctx, &ideal, &target, &tr)?.value;
    let bj_prod = per_factor(0, &|c, i, h| Ok(bergman_min_at(c, i, h, &tr)?.value))?
        * per_factor(1, &|c, i, h| Ok(bergman_min_at(c, i, h, &tr)?.value))?;
    let errs = [rel(ks, ks_prod), rel(kj, kj_prod), rel(bj, bj_prod)];
    Ok(Outcome {
        pass: errs.iter().all(|e| *e < 1e-8),
        detail: format!(
            "K_S {ks:.12} vs {ks_prod:.12}; K_S^(I,h) {kj:.12} vs {kj_prod:.12}; B^(I,h) {bj:.12} vs {bj_prod:.12}; rel errs {:.1e}/{:.1e}/{:.1e}",
            errs[0], errs[1], errs[2]
        ),
    })
}

fn m2_oracle() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for p in [[2.0, 2.0], [1.5, 3.0]] {
        for a in 0..=4usize {
            for b in 0..=(4 - a) {
                for t in [0.0, 0.5, 1.0, 2.0] {
                    let f = vec![(vec![a, b], cx(1.0, 0.0))];
                    worst = worst.max(rel(m2_quadrature(&p, &f, t)?, m2_formula(&p, &f, t)));
                    count += 1;
                }
            }
        }
        let mixed = vec![
            (vec![0, 0], cx(1.0, -0.5)),
            (vec![1, 2], cx(0.25, 2.0)),
            (vec![4, 0], cx(-1.5, 0.0)),
        ];
        for t in [0.0, 0.5, 1.0, 2.0] {
            worst = worst.max(rel(m2_quadrature(&p, &mixed, t)?, m2_formula(&p, &mixed, t)));
            count += 1;
        }
    }
    Ok(Outcome {
        pass: worst < 1e-8,
        detail: format!("{count} cases, worst rel err {worst:.1e}"),
    })
}

fn concavity() -> Result<Outcome> {
    let ts = default_t_grid::<f64>();
    let tr = Truncation::new(8);
    let scenarios = [
        ("flat", [PhiPreset::Zero, PhiPreset::Zero], CWeight::Constant),
        (
            "bump",
            [PhiPreset::GaussianBump(0.5), PhiPreset::GaussianBump(0.5)],
            CWeight::Constant,
        ),
        (
            "mixed",
            [PhiPreset::Zero, PhiPreset::GaussianBump(0.5)],
            CWeight::Exponential(0.5),
        ),
    ];
    let mut pass = true;
    let mut detail = Vec::new();
    for (name, phis, c) in scenarios {
        let setup = MinL2Setup::new(
            unit_polydisc(origin(2)),
            vec![2.0, 2.0],
            WeightSpec::new(phis.to_vec()),
            JetIdeal::Multiplier(vec![2.0, 2.0]),
            JetTarget::constant(2, cx(1.0, 0.0)),
        )?;
        let gs = ts
            .iter()
            .map(|t| g_of_t(&setup, c, *t, &tr))
            .collect::<Result<Vec<_>>>()?;
        let rep = concavity_report(&ts, &gs, &c)?;
        let ok = rep.max_violation <= 1e-6 * gs[0];
        pass &= ok;
        let mut line = format!("{name}: max violation {:.1e}, linear {}", rep.max_violation, rep.linear);
        if name == "flat" {
            let slope = gs[0] / c.integral();
            let spread = rep
                .r
                .iter()
                .zip(&rep.g)
                .map(|(r, g)| rel(g / r, slope))
                .fold(0.0, f64::max);
            pass &= rep.linear && spread < 1e-6;
            line += &format!(", slope spread {spread:.1e}");
        }
        detail.push(line);
    }
    Ok(Outcome {
        pass,
        detail: detail.join("; "),
    })
}

fn tuned_character() -> Result<Outcome> {
    let d = annulus();
    let z0 = cx(0.7, 0.0);
    let green = solve_green(&d, z0, None)?;
    // period of G(·, z₀) around a circle inside |z| < |z₀| is -2π ω(z₀)
    let g_period = character_period(&d, &HarmonicFn::Green(green), 0.6, 256)?;
    let s = -g_period.value / (2.0 * PI);
    let omega = inner_harmonic_measure(&d, z0)?;
    let neg_u = |s: f64| HarmonicFn::LogAbs { center: cx(0.0, 0.0) }.scaled(-s);
    let tuned_ok = characters_equal(g_period, character_period(&d, &neg_u(s), 0.6, 256)?, 1e-8)?;
    let detuned_ok = characters_equal(g_period, character_period(&d, &neg_u(s + 0.25), 0.6, 256)?, 1e-8)?;
    let tr = Truncation::new(48);
    let ratio = |s: f64| -> Result<f64> {
        let w = WeightSpec::new(vec![PhiPreset::HarmonicLogPower(s)]);
        let ctx = context(ProductDomain::single(d, z0)?, vec![1.0], w, CWeight::Constant)?;
        Ok(hardy_dm_kernel_at(&ctx, &tr)?.value / (PI * bergman_kernel_at(&ctx, &tr)?.value))
    };
    let target = CWeight::<f64>::Constant.integral();
    let (rt, rd) = (ratio(s)?, ratio(s + 0.25)?);
    let tuned_pass = tuned_ok && !detuned_ok && rel(rt, target) < 1e-3 && (s - omega).abs() < 1e-8;
    let detuned_pass = rd - target > 1e-2;
    Ok(Outcome {
        pass: tuned_pass && detuned_pass,
        detail: format!(
            "s = {s:.10} (ω = {omega:.10}); tuned ratio {rt:.12} (rel {:.1e}) {}; detuned ratio - target = {:.3e} (needs > 1e-2) {}",
            rel(rt, target),
            if tuned_pass { "ok" } else { "✗" },
            rd - target,
            if detuned_pass { "ok" } else { "✗" }
        ),
    })
}

fn app1_identity() -> Result<Outcome> {
    let p = vec![4.0, 4.0];
    let ctx = context(
        unit_polydisc(origin(2)),
        p.clone(),
        WeightSpec::flat(2),
        CWeight::Constant,
    )?;
    let tr = Truncation::new(8);
    let ideal = JetIdeal::Multiplier(p);
    let terms = [(vec![1, 0], cx(1.0, 0.0)), (vec![0, 1], cx(2.0, 0.0))];
    let h0 = JetTarget { terms: terms.to_vec() };
    let lhs = 1.0 / hardy_s_min_at(&ctx, &ideal, &h0, &tr)?.value;
    let mut rhs = 0.0;
    for (a, d) in &terms {
        rhs += d.norm_sqr() / hardy_s_min_at(&ctx, &ideal, &JetTarget::monomial(a.clone()), &tr)?.value;
    }
    let e = rel(lhs, rhs);
    Ok(Outcome {
        pass: e < 1e-8,
        detail: format!("1/K = {lhs:.15}, Σ|d|²/K_α = {rhs:.15}, rel {e:.1e}"),
    })
}

type Kernel = Box<dyn Fn(&Truncation) -> Result<KernelReport64>>;

fn monotone_suite() -> Result<Outcome> {
    let degrees = [4, 8, 16, 24];
    let bidisc = || unit_polydisc(vec![cx(0.3, 0.0), cx(0.0, 0.2)]);
    let contexts: Vec<(&str, KernelContext64)> = vec![
        (
            "disk",
            context(
                unit_polydisc(vec![cx(0.5, 0.3)]),
                vec![2.0],
                WeightSpec::new(vec![PhiPreset::GaussianBump(0.5)]),
                CWeight::Constant,
            )?,
        ),
        (
            "bidisc",
            context(bidisc(), vec![2.0, 2.0], WeightSpec::flat(2), CWeight::Constant)?,
        ),
        (
            "bidisc layered",
            context(bidisc(), vec![2.0, 2.0], WeightSpec::flat(2), CWeight::Exponential(0.5))?,
        ),
        (
            "annulus",
            context(
                ProductDomain::single(annulus(), cx(0.0, -0.6))?,
                vec![1.0],
                WeightSpec::new(vec![PhiPreset::HarmonicLogPower(0.3)]),
                CWeight::Constant,
            )?,
        ),
    ];
    let jet1 = || (JetIdeal::Box(vec![1]), JetTarget::monomial(vec![1]));
    let jet2 = || (JetIdeal::Box(vec![0, 1]), JetTarget::monomial(vec![0, 1]));
    let mut kernels: Vec<(String, Kernel)> = Vec::new();
    for (name, ctx) in &contexts {
        let jet = if ctx.dim() == 1 { jet1() } else { jet2() };
        for kind in ["B", "K_S", "K_∂M", "B^I", "K_S^I", "K_∂M^I"] {
            let ctx = ctx.clone();
            let (ideal, target) = jet.clone();
            let f: Kernel = match kind {
                "B" => Box::new(move |tr| bergman_kernel_at(&ctx, tr)),
                "K_S" => Box::new(move |tr| hardy_s_kernel_at(&ctx, tr)),
                "K_∂M" => Box::new(move |tr| hardy_dm_kernel_at(&ctx, tr)),
                "B^I" => Box::new(move |tr| bergman_min_at(&ctx, &ideal, &target, tr)),
                "K_S^I" => Box::new(move |tr| hardy_s_min_at(&ctx, &ideal, &target, tr)),
                _ => Box::new(move |tr| hardy_dm_min_at(&ctx, &ideal, &target, tr)),
            };
            kernels.push((format!("{name} {kind}"), f));
        }
    }
    let mut pass = true;
    let mut worst_drop: f64 = 0.0;
    for (name, kernel) in &kernels {
        let values = degrees
            .iter()
            .map(|n| kernel(&Truncation::new(*n)).map(|r| r.value))
            .collect::<Result<Vec<_>>>()?;
        for w in values.windows(2) {
            let drop = (w[0] - w[1]) / w[0].abs();
            worst_drop = worst_drop.max(drop);
            if drop > 1e-10 {
                pass = false;
                eprintln!("  {name}: kernel decreased {values:?}");
            }
        }
    }
    let mut worst_herm: f64 = 0.0;
    let mut worst_repro: f64 = 0.0;
    let mut grams_checked = 0;
    let mut rng = StdRng::seed_from_u64(20_240_611);
    for (name, ctx) in &contexts {
        let tr = Truncation::new(8);
        let basis = ctx.basis(&tr);
        let z0 = ctx.setting().domain.basepoint().to_vec();
        let b_at = basis.eval(&z0);
        for g in [
            ctx.bergman_gram(&basis, &tr)?,
            ctx.s_gram(&basis, &tr)?,
            ctx.face_gram(&basis, &tr)?,
        ] {
            grams_checked += 1;
            let h = g.entries.hermitian_defect();
            worst_herm = worst_herm.max(h);
            if h > 1e-12 || Cholesky::factor(&g.entries).is_none() {
                pass = false;
                eprintln!("  {name}: {:?} Gram is not Hermitian positive definite", g.measure);
            }
            // κ = G⁻¹u reproduces f(z₀) = Σ a_k b_k(z₀) through ⟨f, κ⟩ = κᴴ G a
            let section = ctx.sup_kernel(&basis, &g, &tr)?.coeffs;
            for _ in 0..100 {
                let a: Vec<C64> = (0..basis.len())
                    .map(|_| cx(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect();
                let f = b_at.iter().zip(&a).fold(cx(0.0, 0.0), |s, (b, a)| s + b * a);
                let via_kernel = dot(&section, &g.entries.mul_vec(&a));
                let e = (via_kernel - f).norm() / f.norm();
                worst_repro = worst_repro.max(e);
                if e > 1e-8 {
                    eprintln!(
                        "  {name} {:?}: reproducing error {e:.1e}, |f| = {:.2e}",
                        g.measure,
                        f.norm()
                    );
                    pass = false;
                }
            }
        }
    }
    Ok(Outcome {
        pass,
        detail: format!(
            "{} kernels over N={degrees:?}: worst relative drop {worst_drop:.1e}; {grams_checked} Grams, Hermitian defect {worst_herm:.1e}; reproducing rel err {worst_repro:.1e} over 100 vectors each",
            kernels.len()
        ),
    })
}

fn main() -> ExitCode {
    let criteria: [(&str, Check, Option<Duration>); 11] = [
        ("disk baselines", disk_baselines, Some(Duration::from_secs(1))),
        (
            "bidisc main equality",
            bidisc_main_equality,
            Some(Duration::from_secs(30)),
        ),
        ("distinguished vs face Hardy", s_versus_face, None),
        ("higher jet on the disk", higher_jet_disk, None),
        ("annulus strict inequality", annulus_strict, None),
        ("product formulas", product_formulas, None),
        ("sublevel integral oracle", m2_oracle, None),
        ("concavity of minimal integrals", concavity, None),
        ("character-tuned equality", tuned_character, None),
        ("orthogonal decomposition identity", app1_identity, None),
        ("monotonicity and reproducing suite", monotone_suite, None),
    ];
    let mut failures = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let (mut pass, detail) = match result {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let mut timing = format!("{elapsed:.2?}");
        if let Some(b) = budget {
            if elapsed > *b {
                pass = false;
                timing += &format!(" exceeds {b:?}");
            }
        }
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {:>2} {:<36} {}  [{timing}] {detail}",
            i + 1,
            name,
            if pass { "PASS" } else { "FAIL" }
        );
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
