//! Comparisons against formulas that share no code with the solvers.

use std::f64::consts::PI;

use saitoh_core::basis::{gram_area, BasisKind};
use saitoh_core::geometry::{area_quadrature, sublevel_region};
use saitoh_core::minimal::{closed_form_g, g_of_t, m2_formula};
use saitoh_core::*;

/// `P(ζ) = (1 - ζ) Π_{k≥1} (1 - q^{2k} ζ)(1 - q^{2k}/ζ)`, the prime-function factor of the annulus `q < |ζ| < 1`.
fn prime(zeta: C64, q: f64) -> C64 {
    let mut p = cx(1.0, 0.0) - zeta;
    let mut qk = q * q;
    while qk > 1e-18 {
        p *= (cx(1.0, 0.0) - zeta * qk) * (cx(1.0, 0.0) - zeta.inv() * qk);
        qk *= q * q;
    }
    p
}

/// Green function of `{r < |z - c| < R}` from the prime function: the part
/// `log|P(ζ/α)| - log|P(ζ ᾱ)| + log|α|` vanishes on the outer circle and is
/// constant on the inner one, where `A log|ζ|` cancels it.
fn prime_green(c: C64, r: f64, big_r: f64, a: C64) -> impl Fn(C64) -> f64 {
    let q = r / big_r;
    let alpha = (a - c) / big_r;
    let base = move |z: C64| {
        let zeta = (z - c) / big_r;
        (prime(zeta / alpha, q).norm() / prime(zeta * alpha.conj(), q).norm()).ln() + alpha.norm().ln()
    };
    let inner = base(c + cx(r, 0.0));
    let coeff = -inner / q.ln();
    move |z: C64| base(z) + coeff * ((z - c).norm() / big_r).ln()
}

#[test]
fn annulus_green_matches_prime_function() {
    let c = cx(0.2, -0.1);
    for (r, big_r, a) in [
        (0.5, 1.0, cx(0.7, 0.0)),
        (0.3, 1.5, cx(0.2, 0.9)),
        (0.5, 1.0, cx(-0.1, -0.55)),
    ] {
        let d = Domain::annulus(c, r, big_r).unwrap();
        let a = c + a;
        let oracle = prime_green(c, r, big_r, a);
        // the oracle must vanish on both circles, not only where it was normalized
        for k in 0..12 {
            let e = cis_f(k as f64 * 0.5);
            assert!(oracle(c + e * r).abs() < 1e-12);
            assert!(oracle(c + e * big_r).abs() < 1e-12);
        }
        let g = solve_green(&d, a, None).unwrap();
        for z in [
            c + cx(0.0, 0.5 * (r + big_r)),
            c + cx(-0.8 * big_r, 0.1),
            a + cx(0.03, 0.02),
        ] {
            assert!(
                (g.value(z) - oracle(z)).abs() < 1e-10,
                "z={z}: {} vs {}",
                g.value(z),
                oracle(z)
            );
        }
    }
}

fn cis_f(t: f64) -> C64 {
    cx(t.cos(), t.sin())
}

/// Exact unweighted Bergman kernel of the centered annulus on the diagonal, with every
/// term of `Σ_k |z|^{2k} / ‖z^k‖²` rewritten so that nothing overflows.
fn annulus_bergman_series(r: f64, big_r: f64, z: f64) -> f64 {
    let q = r / big_r;
    let mut sum = 1.0 / (2.0 * PI * (big_r / r).ln() * z * z);
    for k in 0..2000 {
        let k1 = (k + 1) as f64;
        sum += k1 * (z / big_r).powi(2 * k) / (PI * big_r * big_r * (1.0 - q.powf(2.0 * k1)));
    }
    for m in 1..2000 {
        let mf = m as f64;
        sum += mf * (r / z).powi(2 * m) / (PI * z * z * (1.0 - q.powi(2 * m)));
    }
    sum
}

#[test]
fn annulus_bergman_matches_laurent_series() {
    let d = Domain::annulus(cx(0.0, 0.0), 0.5, 1.0).unwrap();
    for z in [0.65, 0.75, 0.85] {
        let ctx = KernelContext::new(Setting::planar(d, cx(z, 0.0), WeightSpec::flat(1), CWeight::Constant).unwrap())
            .unwrap();
        let b = bergman_kernel_at(&ctx, &Truncation::new(96)).unwrap().value;
        let exact = annulus_bergman_series(0.5, 1.0, z);
        assert!((b - exact).abs() < 1e-10 * exact, "z={z}: {b} vs {exact}");
    }
}

#[test]
fn disk_kernels_off_center() {
    // Bergman 1/(π(1-|a|²)²) and the Green-weighted Hardy kernel equal to πB on the unit disk
    let d = Domain::unit_disk();
    for a in [cx(0.3f64, -0.2), cx(-0.5, 0.4)] {
        let ctx = KernelContext::new(Setting::planar(d, a, WeightSpec::flat(1), CWeight::Constant).unwrap()).unwrap();
        let tr = Truncation::new(40);
        let exact = 1.0 / (PI * (1.0 - a.norm_sqr()).powi(2));
        let b = bergman_kernel_at(&ctx, &tr).unwrap().value;
        let k = hardy_dm_kernel_at(&ctx, &tr).unwrap().value;
        assert!((b - exact).abs() < 1e-9 * exact, "{b} vs {exact}");
        assert!((k - PI * exact).abs() < 1e-9 * PI * exact, "{k} vs {}", PI * exact);
    }
}

#[test]
fn disk_radial_weights() {
    // boundary value e^{-a}: K_S(0) = e^{a}; area: B(0) = a / (π (1 - e^{-a}))
    let d = Domain::unit_disk();
    for a in [0.5f64, 2.0] {
        let w = WeightSpec::new(vec![PhiPreset::GaussianBump(a)]);
        let ctx = KernelContext::new(Setting::planar(d, cx(0.0, 0.0), w, CWeight::Constant).unwrap()).unwrap();
        let tr = Truncation::new(6);
        let ks = hardy_s_kernel_at(&ctx, &tr).unwrap().value;
        let b = bergman_kernel_at(&ctx, &tr).unwrap().value;
        assert!((ks - a.exp()).abs() < 1e-12 * ks);
        let exact = a / (PI * (1.0 - (-a).exp()));
        assert!((b - exact).abs() < 1e-12 * exact);
    }
}

#[test]
fn taylor_coefficients_agree_with_cauchy_integrals() {
    let ann = Domain::annulus(cx(0.1, 0.0), 0.4, 1.2).unwrap();
    let disk = Domain::disk(cx(0.0, 0.3), 2.0).unwrap();
    for (d, z0, kind) in [
        (ann, cx(0.1, 0.8), BasisKind::LaurentAtCenter),
        (disk, cx(0.5, 0.0), BasisKind::MonomialAtPoint),
    ] {
        let b = BasisSpec::new(d, z0, 6, kind).unwrap();
        let exact = b.taylor_coeffs(z0, 4);
        let cauchy = b.taylor_coeffs_cauchy(z0, 4, 128);
        for i in 0..exact.rows() {
            for j in 0..exact.cols() {
                let e = exact[(i, j)];
                assert!((e - cauchy[(i, j)]).norm() < 1e-11 * (1.0 + e.norm()));
            }
        }
    }
}

#[test]
fn sublevel_gram_reproduces_lemma_formula() {
    // aᴴ G a on a sublevel polydisc equals the closed-form sum for every monomial of degree ≤ 4
    let p = [2.0f64, 3.0];
    let base = ProductDomain::new(vec![Domain::unit_disk(); 2], vec![cx(0.0, 0.0); 2]).unwrap();
    for t in [0.0, 0.5, 1.0, 2.0] {
        let region = sublevel_region(&base, &p, t).unwrap();
        let grams: Vec<_> = region
            .factors()
            .iter()
            .map(|d| {
                let b = BasisSpec::new(*d, cx(0.0, 0.0), 4, BasisKind::MonomialAtPoint).unwrap();
                let q = area_quadrature(d, 12, 32).unwrap();
                (gram_area(&b, &q, |_| 1.0).unwrap().entries, d.scale())
            })
            .collect();
        for a in 0..=4usize {
            for b in 0..=(4 - a) {
                // basis elements are normalized by the polydisc radii
                let scale = grams[0].1.powi(2 * a as i32) * grams[1].1.powi(2 * b as i32);
                let quad = grams[0].0[(a, a)].re * grams[1].0[(b, b)].re * scale;
                let exact = m2_formula(&p, &[(vec![a, b], cx(1.0, 0.0))], t);
                assert!((quad - exact).abs() < 1e-12 * exact);
            }
        }
    }
}

#[test]
fn minimal_integral_uses_pi_to_the_n() {
    // p = (4, 4): E = {(2,0), (1,1), (0,2)}; disks of radius 2 have capacity 1/2;
    // φ_1 = 2 log|1 + z/5| is harmonic with e^{-φ_1(0)} = 1.
    let d = Domain::disk(cx(0.0, 0.0), 2.0).unwrap();
    let domain = ProductDomain::new(vec![d, d], vec![cx(0.0, 0.0); 2]).unwrap();
    let phi1 = PhiPreset::LogAbsPoly {
        g: vec![cx(1.0, 0.0), cx(0.2, 0.0)],
        u: saitoh_core::green::HarmonicSeries::zero(),
    };
    let weight = WeightSpec::new(vec![phi1, PhiPreset::Zero]);
    let target = JetTarget {
        terms: vec![
            (vec![2, 0], cx(1.0, 0.0)),
            (vec![1, 1], cx(0.0, -2.0)),
            (vec![0, 2], cx(0.5, 0.5)),
        ],
    };
    let setup = MinL2Setup::new(
        domain,
        vec![4.0, 4.0],
        weight,
        JetIdeal::Multiplier(vec![4.0, 4.0]),
        target,
    )
    .unwrap();
    let c = CWeight::Exponential(0.5f64);
    let tr = Truncation::new(10);
    for t in [0.0, 0.8] {
        let numeric = g_of_t(&setup, c, t, &tr).unwrap();
        let closed = closed_form_g(&setup, &c, t).unwrap();
        assert!((numeric - closed).abs() < 1e-8 * closed, "t={t}: {numeric} vs {closed}");
        // the (2π)ⁿ normalization would be off by exactly 2ⁿ = 4
        assert!((numeric / closed - 4.0).abs() > 1.0);
    }
}

#[test]
fn flat_bidisc_golden_values() {
    let setup = MinL2Setup::unit_polydisc(vec![2.0, 2.0]).unwrap();
    let tr = Truncation::new(8);
    let g0 = g_of_t(&setup, CWeight::Constant, 0.0, &tr).unwrap();
    assert!((g0 - PI * PI).abs() < 1e-10 * PI * PI);
    let ctx = setup.context(CWeight::Constant).unwrap();
    let b = bergman_kernel_at(&ctx, &tr).unwrap().value;
    assert!((g0 * b - 1.0).abs() < 1e-8);
    for t in [1.0, 5.0, 20.0] {
        let ratio = g_of_t(&setup, CWeight::Constant, t, &tr).unwrap() / c_tail(&CWeight::Constant, t);
        assert!((ratio / (PI * PI) - 1.0).abs() < 1e-8);
    }
}
