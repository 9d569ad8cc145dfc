//! Point values of weighted Bergman and Hardy kernels and their jet-constrained versions.
//!
//! All kernels are computed on a finite tensor basis: a sup-type kernel is
//! `uᴴ G⁻¹ u` with `u` the conjugated evaluation vector, and a jet-constrained
//! kernel is the reciprocal of the minimal norm subject to linear constraints
//! on Taylor coefficients at the basepoint.

use std::f64::consts::PI;

use num_traits::Zero;

use crate::basis::{
    gram_area, gram_boundary, gram_face_sum, tensor_basis, tensor_gram, BasisSpec, GramMatrix, Measure, TensorBasis,
};
use crate::error::{LabError, Result};
use crate::geometry::{
    area_quadrature, boundary_quadrature, sublevel_region, BoundaryQuadrature, Domain, ProductDomain,
};
use crate::green::{solve_green, GreenSolution};
use crate::ideal::{JetIdeal, JetTarget};
use crate::linalg::{constrained_min, CMatrix, HermitianSolver, MinMethod};
use crate::quadrature::{composite_gauss_legendre, next_pow2};
use crate::scalar::{Cx, Real};
use crate::weight::{CWeight, WeightSpec};

/// Geometry, exponents `p_j`, weights `φ_j` and profile `c` of one kernel problem.
#[derive(Clone, Debug)]
pub struct Setting<T> {
    pub domain: ProductDomain<T>,
    pub exponents: Vec<T>,
    pub weight: WeightSpec<T>,
    pub c: CWeight<T>,
}

impl<T: Real> Setting<T> {
    pub fn new(domain: ProductDomain<T>, exponents: Vec<T>, weight: WeightSpec<T>, c: CWeight<T>) -> Result<Self> {
        let n = domain.dim();
        if exponents.len() != n || weight.len() != n {
            return Err(LabError::InvalidArgument(format!(
                "{n} factors, {} exponents, {} weights",
                exponents.len(),
                weight.len()
            )));
        }
        if exponents.iter().any(|p| !(*p > T::zero()) || !p.is_finite()) {
            return Err(LabError::InvalidArgument("exponents p_j must be positive".into()));
        }
        for (phi, d) in weight.phis.iter().zip(domain.factors()) {
            phi.validate(d)?;
        }
        c.validate()?;
        Ok(Self {
            domain,
            exponents,
            weight,
            c,
        })
    }

    /// A single factor with `p = 1`.
    pub fn planar(d: Domain<T>, z0: Cx<T>, weight: WeightSpec<T>, c: CWeight<T>) -> Result<Self> {
        Self::new(ProductDomain::single(d, z0)?, vec![T::one()], weight, c)
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// `Σ 1/p_j`.
    pub fn exponent_sum(&self) -> T {
        self.exponents.iter().fold(T::zero(), |a, p| a + T::one() / *p)
    }

    /// The `j`-th factor as a one-dimensional setting with the same `p_j`, `φ_j` and `c`.
    pub fn factor(&self, j: usize) -> Result<Self> {
        Self::new(
            ProductDomain::single(self.domain.factors()[j], self.domain.basepoint()[j])?,
            vec![self.exponents[j]],
            WeightSpec::new(vec![self.weight.phis[j].clone()]),
            self.c,
        )
    }
}

/// Truncation degree and quadrature resolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Truncation {
    pub degree: usize,
    pub boundary_nodes: Option<usize>,
    pub radial_nodes: Option<usize>,
    pub angular_nodes: Option<usize>,
}

impl Truncation {
    pub fn new(degree: usize) -> Self {
        Self {
            degree,
            boundary_nodes: None,
            radial_nodes: None,
            angular_nodes: None,
        }
    }

    pub fn boundary(&self) -> usize {
        self.boundary_nodes.unwrap_or(next_pow2(4 * self.degree + 256))
    }

    pub fn radial(&self) -> usize {
        self.radial_nodes.unwrap_or(self.degree + 24)
    }

    pub fn angular(&self) -> usize {
        self.angular_nodes.unwrap_or(next_pow2(4 * self.degree + 64))
    }
}

/// Result of one kernel or minimal-norm evaluation.
#[derive(Clone, Debug)]
pub struct KernelReport<T> {
    pub value: T,
    pub degree: usize,
    pub basis_size: usize,
    pub boundary_nodes: usize,
    pub area_nodes: (usize, usize),
    pub condition: T,
    /// Kernel section `G⁻¹u` (sup kernels) or minimizer (constrained problems).
    pub coeffs: Vec<Cx<T>>,
    pub method: Option<MinMethod>,
}

/// A setting with its factor Green functions solved once.
#[derive(Clone, Debug)]
pub struct KernelContext<T> {
    setting: Setting<T>,
    greens: Vec<GreenSolution<T>>,
}

impl<T: Real> KernelContext<T> {
    pub fn new(setting: Setting<T>) -> Result<Self> {
        let greens = setting
            .domain
            .factors()
            .iter()
            .zip(setting.domain.basepoint())
            .map(|(d, z)| solve_green(d, *z, None))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { setting, greens })
    }

    pub fn setting(&self) -> &Setting<T> {
        &self.setting
    }

    pub fn greens(&self) -> &[GreenSolution<T>] {
        &self.greens
    }

    pub fn dim(&self) -> usize {
        self.setting.dim()
    }

    pub fn basis(&self, tr: &Truncation) -> TensorBasis<T> {
        let d = &self.setting.domain;
        tensor_basis(
            d.factors()
                .iter()
                .zip(d.basepoint())
                .map(|(f, z)| BasisSpec::natural(*f, *z, tr.degree))
                .collect(),
        )
    }

    fn phi_weight(&self, j: usize) -> impl Fn(Cx<T>) -> T + '_ {
        let d = self.setting.domain.factors()[j];
        let z = self.setting.domain.basepoint()[j];
        let phi = &self.setting.weight.phis[j];
        move |w| phi.weight(w, &d, z)
    }

    /// Area Gram of factor `j` on `region` (the factor itself or a sublevel disk) with weight `e^{-φ_j}`.
    fn factor_area(&self, j: usize, region: &Domain<T>, b: &BasisSpec<T>, tr: &Truncation) -> Result<CMatrix<T>> {
        let q = area_quadrature(region, tr.radial(), tr.angular())?;
        Ok(gram_area(b, &q, self.phi_weight(j))?.entries)
    }

    /// Boundary Gram of factor `j` with weight `(∂G_j/∂v)^{-1} e^{-φ_j}`.
    fn factor_boundary(&self, j: usize, b: &BasisSpec<T>, tr: &Truncation) -> Result<CMatrix<T>> {
        let d = &self.setting.domain.factors()[j];
        let qs = boundary_quadrature(d, tr.boundary())?;
        let g = &self.greens[j];
        let w = self.phi_weight(j);
        Ok(gram_boundary(b, &qs, |z, n| w(z) / g.normal_derivative_with(z, n))?.entries)
    }

    pub fn area_grams(&self, basis: &TensorBasis<T>, tr: &Truncation) -> Result<Vec<CMatrix<T>>> {
        basis
            .factors()
            .iter()
            .enumerate()
            .map(|(j, b)| self.factor_area(j, &self.setting.domain.factors()[j], b, tr))
            .collect()
    }

    pub fn boundary_grams(&self, basis: &TensorBasis<T>, tr: &Truncation) -> Result<Vec<CMatrix<T>>> {
        basis
            .factors()
            .iter()
            .enumerate()
            .map(|(j, b)| self.factor_boundary(j, b, tr))
            .collect()
    }

    /// Gram of `∫_M |f|² c(-ψ) Π e^{-φ_j}`.
    pub fn bergman_gram(&self, basis: &TensorBasis<T>, tr: &Truncation) -> Result<GramMatrix<T>> {
        if self.setting.c.is_constant() {
            let areas = self.area_grams(basis, tr)?;
            let refs: Vec<&CMatrix<T>> = areas.iter().collect();
            return Ok(GramMatrix {
                entries: tensor_gram(&refs),
                measure: Measure::Area,
            });
        }
        self.layered_gram(basis, tr, T::zero())
    }

    /// Gram of `∫_{ψ < -t0} |f|² c(-ψ) Π e^{-φ_j}` through the layer-cake identity
    /// `c(-ψ) = c(t0) + ∫_{t0}^{-ψ} c'(s) ds` on `{ψ < -t0}`.
    pub fn layered_gram(&self, basis: &TensorBasis<T>, tr: &Truncation, t0: T) -> Result<GramMatrix<T>> {
        let s = &self.setting;
        let level = |t: T| -> Result<CMatrix<T>> {
            let region = sublevel_region(&s.domain, &s.exponents, t)?;
            let parts = basis
                .factors()
                .iter()
                .enumerate()
                .map(|(j, b)| self.factor_area(j, &region.factors()[j], b, tr))
                .collect::<Result<Vec<_>>>()?;
            let refs: Vec<&CMatrix<T>> = parts.iter().collect();
            Ok(tensor_gram(&refs))
        };
        if s.domain.factors().iter().any(|d| d.is_annulus()) {
            if !s.c.is_constant() {
                return Err(LabError::Unsupported(
                    "a non-constant profile c needs disk factors (sublevel sets of annuli are not available)".into(),
                ));
            }
            if !t0.is_zero() {
                return Err(LabError::Unsupported("sublevel sets of annulus factors".into()));
            }
        }
        let mut total = level(t0)?;
        total.scale(s.c.value(t0));
        if !s.c.is_constant() {
            let (nodes, weights) = composite_gauss_legendre(&layer_breaks(t0, s.exponent_sum()), 16);
            for (t, w) in nodes.iter().zip(&weights) {
                let g = level(*t)?;
                total.add_scaled(&g, *w * s.c.derivative(*t));
            }
        }
        Ok(GramMatrix {
            entries: total,
            measure: Measure::Layered,
        })
    }

    /// Gram of `‖·‖²_{S,λ}`, `λ = Π (∂G_j/∂v)^{-1} e^{-φ_j}` with the `(2π)^{-n}` normalization.
    pub fn s_gram(&self, basis: &TensorBasis<T>, tr: &Truncation) -> Result<GramMatrix<T>> {
        let bs = self.boundary_grams(basis, tr)?;
        let refs: Vec<&CMatrix<T>> = bs.iter().collect();
        Ok(GramMatrix {
            entries: tensor_gram(&refs),
            measure: Measure::Distinguished,
        })
    }

    /// Gram of `‖·‖²_{∂M,ρ}`.
    pub fn face_gram(&self, basis: &TensorBasis<T>, tr: &Truncation) -> Result<GramMatrix<T>> {
        let areas = self.area_grams(basis, tr)?;
        let bs = self.boundary_grams(basis, tr)?;
        gram_face_sum(&areas, &bs, &self.setting.exponents)
    }

    fn eval_vector(&self, basis: &TensorBasis<T>) -> Vec<Cx<T>> {
        basis
            .eval(self.setting.domain.basepoint())
            .into_iter()
            .map(|v| v.conj())
            .collect()
    }

    fn report_sizes(&self, tr: &Truncation, basis: &TensorBasis<T>) -> KernelReport<T> {
        KernelReport {
            value: T::zero(),
            degree: tr.degree,
            basis_size: basis.len(),
            boundary_nodes: tr.boundary(),
            area_nodes: (tr.radial(), tr.angular()),
            condition: T::one(),
            coeffs: Vec::new(),
            method: None,
        }
    }

    /// `sup |f(z0)|² / ‖f‖²` for the norm whose Gram is `g`.
    pub fn sup_kernel(&self, basis: &TensorBasis<T>, g: &GramMatrix<T>, tr: &Truncation) -> Result<KernelReport<T>> {
        let solver = HermitianSolver::new(&g.entries)?;
        let u = self.eval_vector(basis);
        let section = solver.solve(&u);
        let value = crate::linalg::dot(&u, &section).re;
        finite_positive(value)?;
        Ok(KernelReport {
            value,
            condition: solver.condition_estimate(),
            coeffs: section,
            ..self.report_sizes(tr, basis)
        })
    }

    /// Taylor-coefficient constraint matrix for the multi-indices outside `ideal`.
    pub fn jet_constraints(
        &self,
        basis: &TensorBasis<T>,
        ideal: &JetIdeal<T>,
        target: &JetTarget<T>,
        tr: &Truncation,
    ) -> Result<(CMatrix<T>, Vec<Cx<T>>)> {
        let n = self.dim();
        target.check_against(ideal)?;
        let rows = ideal.complement(n)?;
        let max_order = ideal.max_constrained_order(n)?;
        if max_order + 2 > tr.degree {
            return Err(LabError::InvalidArgument(format!(
                "constrained order {max_order} needs truncation degree at least {}, got {}",
                max_order + 2,
                tr.degree
            )));
        }
        if target.terms.iter().any(|(a, _)| a.len() != n) {
            return Err(LabError::InvalidArgument("target multi-index length mismatch".into()));
        }
        let z0 = self.setting.domain.basepoint();
        let taylor: Vec<CMatrix<T>> = basis
            .factors()
            .iter()
            .zip(z0)
            .map(|(b, z)| b.taylor_coeffs(*z, max_order))
            .collect();
        let dim = basis.len();
        let mut c = CMatrix::zeros(rows.len(), dim);
        for (r, alpha) in rows.iter().enumerate() {
            let parts: Vec<Vec<Cx<T>>> = taylor
                .iter()
                .zip(alpha)
                .map(|(t, a)| (0..t.cols()).map(|k| t[(*a, k)]).collect())
                .collect();
            let row = TensorBasis::combine(&parts);
            c.row_mut(r).copy_from_slice(&row);
        }
        let d = rows.iter().map(|a| target.coefficient(a)).collect();
        Ok((c, d))
    }

    /// `1 / inf { ‖f‖² : (f - h₀, z₀) ∈ I }` for the norm whose Gram is `g`.
    pub fn constrained_kernel(
        &self,
        basis: &TensorBasis<T>,
        g: &GramMatrix<T>,
        ideal: &JetIdeal<T>,
        target: &JetTarget<T>,
        tr: &Truncation,
    ) -> Result<KernelReport<T>> {
        let (c, d) = self.jet_constraints(basis, ideal, target, tr)?;
        let sol = constrained_min(&g.entries, &c, &d)?;
        finite_positive(sol.value)?;
        Ok(KernelReport {
            value: T::one() / sol.value,
            condition: sol.condition,
            coeffs: sol.coeffs,
            method: Some(sol.method),
            ..self.report_sizes(tr, basis)
        })
    }
}

fn finite_positive<T: Real>(v: T) -> Result<()> {
    if v.is_finite() && v > T::zero() {
        Ok(())
    } else {
        Err(LabError::SingularGram {
            condition: f64::INFINITY,
        })
    }
}

/// Panel breaks for the `s`-integral: refined near `t0`, width 2 further out,
/// up to where every Gram entry has decayed below `e^{-40}`.
fn layer_breaks<T: Real>(t0: T, exponent_sum: T) -> Vec<T> {
    let t_max = T::lit(40.0) / exponent_sum;
    let mut b = vec![t0];
    for x in [0.0625, 0.125, 0.25, 0.5, 1.0, 2.0] {
        b.push(t0 + T::lit(x));
    }
    let mut x = T::lit(2.0);
    while x < t_max {
        x += T::lit(2.0);
        b.push(t0 + x);
    }
    b
}

/// Weighted Bergman kernel `B_ρ̃(z₀)` with `ρ̃ = c(-ψ) Π e^{-φ_j}`.
pub fn bergman_kernel_at<T: Real>(ctx: &KernelContext<T>, tr: &Truncation) -> Result<KernelReport<T>> {
    let basis = ctx.basis(tr);
    let g = ctx.bergman_gram(&basis, tr)?;
    ctx.sup_kernel(&basis, &g, tr)
}

/// `B^{I,h₀}_ρ̃(z₀)`.
pub fn bergman_min_at<T: Real>(
    ctx: &KernelContext<T>,
    ideal: &JetIdeal<T>,
    target: &JetTarget<T>,
    tr: &Truncation,
) -> Result<KernelReport<T>> {
    let basis = ctx.basis(tr);
    let g = ctx.bergman_gram(&basis, tr)?;
    ctx.constrained_kernel(&basis, &g, ideal, target, tr)
}

/// `K_{S,λ}(z₀)`.
pub fn hardy_s_kernel_at<T: Real>(ctx: &KernelContext<T>, tr: &Truncation) -> Result<KernelReport<T>> {
    let basis = ctx.basis(tr);
    let g = ctx.s_gram(&basis, tr)?;
    ctx.sup_kernel(&basis, &g, tr)
}

/// `K^{I,h₀}_{S,λ}(z₀)`.
pub fn hardy_s_min_at<T: Real>(
    ctx: &KernelContext<T>,
    ideal: &JetIdeal<T>,
    target: &JetTarget<T>,
    tr: &Truncation,
) -> Result<KernelReport<T>> {
    let basis = ctx.basis(tr);
    let g = ctx.s_gram(&basis, tr)?;
    ctx.constrained_kernel(&basis, &g, ideal, target, tr)
}

/// `K_{∂M,ρ}(z₀)`.
pub fn hardy_dm_kernel_at<T: Real>(ctx: &KernelContext<T>, tr: &Truncation) -> Result<KernelReport<T>> {
    let basis = ctx.basis(tr);
    let g = ctx.face_gram(&basis, tr)?;
    ctx.sup_kernel(&basis, &g, tr)
}

/// `K^{I,h₀}_{∂M,ρ}(z₀)`.
pub fn hardy_dm_min_at<T: Real>(
    ctx: &KernelContext<T>,
    ideal: &JetIdeal<T>,
    target: &JetTarget<T>,
    tr: &Truncation,
) -> Result<KernelReport<T>> {
    let basis = ctx.basis(tr);
    let g = ctx.face_gram(&basis, tr)?;
    ctx.constrained_kernel(&basis, &g, ideal, target, tr)
}

/// Value reconstructed by the Cauchy integral, flagged when the point is close to the boundary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CauchyValue<T> {
    pub value: Cx<T>,
    pub near_boundary: bool,
}

/// `(1/2πi) ∮_{∂D} f(w) / (w - z) dw` from samples on every boundary circle of `d`.
pub fn cauchy_extend<T: Real>(
    d: &Domain<T>,
    qs: &[BoundaryQuadrature<T>],
    samples: &[Vec<Cx<T>>],
    z: Cx<T>,
) -> Result<CauchyValue<T>> {
    if qs.len() != d.circles().len() || samples.len() != qs.len() {
        return Err(LabError::InvalidArgument(
            "samples must cover every boundary circle of the domain".into(),
        ));
    }
    if !d.contains(z) {
        return Err(LabError::InvalidArgument("evaluation point must be interior".into()));
    }
    let mut acc = Cx::zero();
    for (q, f) in qs.iter().zip(samples) {
        if f.len() != q.len() {
            return Err(LabError::InvalidArgument("sample count differs from node count".into()));
        }
        // positively oriented dw = i n |dw|
        for (i, fi) in f.iter().enumerate() {
            acc += *fi * q.outward_normals[i] * q.weights[i] / (q.nodes[i] - z);
        }
    }
    Ok(CauchyValue {
        value: acc / T::lit(2.0 * PI),
        near_boundary: d.depth(z) < T::lit(1e-3) * d.scale(),
    })
}
