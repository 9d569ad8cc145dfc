use std::f64::consts::PI;

use proptest::prelude::*;
use saitoh_core::green::CharacterPeriod;
use saitoh_core::linalg::{dot, Cholesky};
use saitoh_core::minimal::g_of_t;
use saitoh_core::*;

fn point_in_disk(max_r: f64) -> impl Strategy<Value = C64> {
    (0.0..max_r, 0.0..2.0 * PI).prop_map(|(r, t)| cx(r * t.cos(), r * t.sin()))
}

fn point_in_annulus() -> impl Strategy<Value = C64> {
    (0.58..0.92f64, 0.0..2.0 * PI).prop_map(|(r, t)| cx(r * t.cos(), r * t.sin()))
}

fn profile() -> impl Strategy<Value = CWeight64> {
    prop_oneof![
        Just(CWeight::Constant),
        (0.1..2.0f64).prop_map(CWeight::Exponential),
        (0.1..1.0f64).prop_map(CWeight::Affine),
    ]
}

fn disk_ctx(a: C64, bump: f64) -> KernelContext64 {
    let w = WeightSpec::new(vec![PhiPreset::GaussianBump(bump)]);
    KernelContext::new(Setting::planar(Domain::unit_disk(), a, w, CWeight::Constant).unwrap()).unwrap()
}

fn annulus_ctx(z: C64, s: f64) -> KernelContext64 {
    let d = Domain::annulus(cx(0.0, 0.0), 0.5, 1.0).unwrap();
    let w = WeightSpec::new(vec![PhiPreset::HarmonicLogPower(s)]);
    KernelContext::new(Setting::planar(d, z, w, CWeight::Constant).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn disk_kernels_grow_with_degree(a in point_in_disk(0.7), bump in 0.0..2.0f64, n in 2usize..10) {
        let ctx = disk_ctx(a, bump);
        let (lo, hi) = (Truncation::new(n), Truncation::new(n + 4));
        for f in [bergman_kernel_at::<f64>, hardy_s_kernel_at, hardy_dm_kernel_at] {
            let (x, y) = (f(&ctx, &lo).unwrap().value, f(&ctx, &hi).unwrap().value);
            prop_assert!(y >= x * (1.0 - 1e-10), "{x} then {y}");
        }
    }

    #[test]
    fn annulus_grams_are_hermitian_positive(z in point_in_annulus(), s in -1.0..1.0f64) {
        let ctx = annulus_ctx(z, s);
        let tr = Truncation::new(6);
        let basis = ctx.basis(&tr);
        for g in [ctx.bergman_gram(&basis, &tr).unwrap(), ctx.face_gram(&basis, &tr).unwrap()] {
            prop_assert!(g.entries.hermitian_defect() < 1e-12);
            prop_assert!(Cholesky::factor(&g.entries).is_some());
        }
    }

    #[test]
    fn kernel_section_reproduces_values(
        z1 in point_in_disk(0.6),
        z2 in point_in_disk(0.6),
        coeffs in proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 49),
    ) {
        let pd = ProductDomain::new(vec![Domain::unit_disk(); 2], vec![z1, z2]).unwrap();
        let w = WeightSpec::new(vec![PhiPreset::Zero, PhiPreset::GaussianBump(0.5)]);
        let ctx = KernelContext::new(Setting::new(pd, vec![2.0, 2.0], w, CWeight::Constant).unwrap()).unwrap();
        let tr = Truncation::new(6);
        let basis = ctx.basis(&tr);
        let g = ctx.face_gram(&basis, &tr).unwrap();
        let section = ctx.sup_kernel(&basis, &g, &tr).unwrap().coeffs;
        let a: Vec<C64> = coeffs.iter().map(|(x, y)| cx(*x, *y)).collect();
        let f = basis.eval(&[z1, z2]).iter().zip(&a).fold(cx(0.0, 0.0), |s, (b, a)| s + b * a);
        let via = dot(&section, &g.entries.mul_vec(&a));
        prop_assert!((via - f).norm() <= 1e-9 * (1.0 + f.norm()));
    }

    #[test]
    fn point_constraint_is_the_sup_kernel(z in point_in_annulus(), s in -1.0..1.0f64) {
        let ctx = annulus_ctx(z, s);
        let tr = Truncation::new(8);
        let sup = bergman_kernel_at(&ctx, &tr).unwrap().value;
        let min = bergman_min_at(&ctx, &JetIdeal::Maximal, &JetTarget::constant(1, cx(1.0, 0.0)), &tr).unwrap().value;
        prop_assert!((sup - min).abs() < 1e-9 * sup);
    }

    #[test]
    fn minimal_integral_is_nonincreasing(bump in 0.0..1.5f64, c in profile(), t in 0.0..2.0f64) {
        let pd = ProductDomain::new(vec![Domain::unit_disk(); 2], vec![cx(0.0, 0.0); 2]).unwrap();
        let w = WeightSpec::new(vec![PhiPreset::GaussianBump(bump), PhiPreset::Zero]);
        let setup = MinL2Setup::new(pd, vec![2.0, 2.0], w, JetIdeal::Multiplier(vec![2.0, 2.0]), JetTarget::constant(2, cx(1.0, 0.0))).unwrap();
        let tr = Truncation::new(3);
        let (a, b) = (g_of_t(&setup, c, t, &tr).unwrap(), g_of_t(&setup, c, t + 0.25, &tr).unwrap());
        prop_assert!(b <= a * (1.0 + 1e-12));
    }

    #[test]
    fn sublevel_regions_shrink(t in 0.0..3.0f64, dt in 0.01..1.0f64, p in 0.5..4.0f64, a in point_in_disk(0.5)) {
        let pd = ProductDomain::new(vec![Domain::unit_disk()], vec![a]).unwrap();
        let small = saitoh_core::geometry::sublevel_region(&pd, &[p], t + dt).unwrap();
        let big = saitoh_core::geometry::sublevel_region(&pd, &[p], t).unwrap();
        prop_assert!(small.factors()[0].area() < big.factors()[0].area());
        prop_assert!(small.factors()[0].contains(a));
    }

    #[test]
    fn profile_tail_is_monotone_and_invertible(c in profile(), t in 0.0..10.0f64) {
        prop_assert!(c.tail(t + 0.1) < c.tail(t));
        prop_assert!((c.tail_inverse(c.tail(t)) - t).abs() < 1e-8 * (1.0 + t));
    }

    #[test]
    fn character_comparison_is_modular(x in -20.0..20.0f64, k in -3i32..3) {
        let p = CharacterPeriod { value: x, generator: 0 };
        let q = CharacterPeriod { value: x + 2.0 * PI * k as f64, generator: 0 };
        prop_assert!(characters_equal(p, q, 1e-9).unwrap());
        prop_assert!(characters_equal(q, p, 1e-9).unwrap());
        let r = CharacterPeriod { value: x + 0.5, generator: 0 };
        prop_assert!(!characters_equal(p, r, 1e-9).unwrap());
    }
}
