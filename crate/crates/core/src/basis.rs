//! Truncated holomorphic bases, weighted Gram matrices and ordered orthonormal bases.

use std::f64::consts::PI;

use num_traits::{One, Zero};

use crate::error::{LabError, Result};
use crate::geometry::{AreaQuadrature, BoundaryQuadrature, Domain};
use crate::linalg::{constrained_min, CMatrix};
use crate::scalar::{cis, powi, Cx, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisKind {
    /// `((w - z0)/ρ)^k`, `0 <= k <= N`, with `ρ` the largest distance from `z0` to the boundary.
    MonomialAtPoint,
    /// `((w - c)/R)^k`, `0 <= k <= N`, with `c` and `R` the center and radius of a disk.
    /// Spans the same polynomials as `MonomialAtPoint` with a far better conditioned Gram.
    MonomialAtCenter,
    /// `((w - c)/R)^k` for `0 <= k <= N` and `((w - c)/r)^k` for `-N <= k < 0`,
    /// with `c`, `r`, `R` the center and radii of the annulus.
    LaurentAtCenter,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BasisSpec<T> {
    domain: Domain<T>,
    center: Cx<T>,
    degree: usize,
    kind: BasisKind,
}

impl<T: Real> BasisSpec<T> {
    pub fn new(domain: Domain<T>, z0: Cx<T>, degree: usize, kind: BasisKind) -> Result<Self> {
        let center = match kind {
            BasisKind::MonomialAtPoint => z0,
            BasisKind::MonomialAtCenter => {
                if domain.is_annulus() {
                    return Err(LabError::InvalidArgument(
                        "centered monomials are only defined on disks".into(),
                    ));
                }
                domain.center()
            }
            BasisKind::LaurentAtCenter => {
                if !domain.is_annulus() {
                    return Err(LabError::InvalidArgument(
                        "Laurent bases are only defined on annuli".into(),
                    ));
                }
                domain.center()
            }
        };
        Ok(Self {
            domain,
            center,
            degree,
            kind,
        })
    }

    /// Monomials at the center on disks, Laurent monomials at the center on annuli.
    pub fn natural(domain: Domain<T>, z0: Cx<T>, degree: usize) -> Self {
        let kind = if domain.is_annulus() {
            BasisKind::LaurentAtCenter
        } else {
            BasisKind::MonomialAtCenter
        };
        Self::new(domain, z0, degree, kind).expect("natural basis is always valid")
    }

    pub fn domain(&self) -> &Domain<T> {
        &self.domain
    }

    pub fn center(&self) -> Cx<T> {
        self.center
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn exponents(&self) -> Vec<i64> {
        let n = self.degree as i64;
        match self.kind {
            BasisKind::MonomialAtPoint | BasisKind::MonomialAtCenter => (0..=n).collect(),
            BasisKind::LaurentAtCenter => (-n..=n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        match self.kind {
            BasisKind::MonomialAtPoint | BasisKind::MonomialAtCenter => self.degree + 1,
            BasisKind::LaurentAtCenter => 2 * self.degree + 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn eval(&self, z: Cx<T>) -> Vec<Cx<T>> {
        let mut out = Vec::with_capacity(self.len());
        self.eval_into(z, &mut out);
        out
    }

    /// Radii that normalize positive and negative powers to modulus at most 1 on the closure.
    fn radii(&self) -> (T, T) {
        match (self.kind, self.domain) {
            (BasisKind::LaurentAtCenter, Domain::Annulus { r_inner, r_outer, .. }) => (r_outer, r_inner),
            _ => {
                let far = (self.center - self.domain.center()).norm() + self.domain.scale();
                (far, far)
            }
        }
    }

    pub fn eval_into(&self, z: Cx<T>, out: &mut Vec<Cx<T>>) {
        out.clear();
        let (pos, neg) = self.radii();
        let u = z - self.center;
        let n = self.degree;
        if self.kind == BasisKind::LaurentAtCenter {
            let v = u / neg;
            let mut p = powi(v.inv(), n as i64);
            for _ in 0..n {
                out.push(p);
                p *= v;
            }
        }
        let v = u / pos;
        let mut p = Cx::one();
        for _ in 0..=n {
            out.push(p);
            p *= v;
        }
    }

    /// Taylor coefficients at `z0`: row `j` holds the coefficient of `(w - z0)^j` of every element.
    pub fn taylor_coeffs(&self, z0: Cx<T>, max_order: usize) -> CMatrix<T> {
        let zeta = z0 - self.center;
        let exps = self.exponents();
        let (pos, neg) = self.radii();
        let mut out = CMatrix::zeros(max_order + 1, exps.len());
        for (col, &k) in exps.iter().enumerate() {
            let norm = if k >= 0 { pos } else { neg }.powi(-(k as i32));
            if zeta.is_zero() {
                if k >= 0 && (k as usize) <= max_order {
                    out[(k as usize, col)] = Cx::new(norm, T::zero());
                }
                continue;
            }
            // generalized binomial series of (zeta + x)^k
            let mut c = powi(zeta, k) * norm;
            for j in 0..=max_order {
                out[(j, col)] = c;
                let kj = T::lit((k - j as i64) as f64);
                c = c * kj / (zeta * T::of(j + 1));
            }
        }
        out
    }

    /// Taylor coefficients by trapezoidal Cauchy integrals on the circle of radius
    /// half the distance from `z0` to the boundary.
    pub fn taylor_coeffs_cauchy(&self, z0: Cx<T>, max_order: usize, nodes: usize) -> CMatrix<T> {
        let rho = self.domain.depth(z0) / T::lit(2.0);
        let m = nodes.max(2 * max_order + 2);
        let h = T::lit(2.0 * PI) / T::of(m);
        let mut out = CMatrix::zeros(max_order + 1, self.len());
        let mut vals = Vec::new();
        for i in 0..m {
            let e = cis(h * T::of(i));
            self.eval_into(z0 + e * rho, &mut vals);
            let mut ej = Cx::one();
            for j in 0..=max_order {
                let f = ej.conj() / (T::of(m) * rho.powi(j as i32));
                for (col, v) in vals.iter().enumerate() {
                    out[(j, col)] += *v * f;
                }
                ej *= e;
            }
        }
        out
    }
}

/// What inner product a Gram matrix represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Measure {
    Area,
    Boundary,
    FaceSum,
    Distinguished,
    Layered,
}

/// `entries[(k, l)] = ⟨b_l, b_k⟩ = Σ w conj(b_k) b_l`, so that `‖Σ a_k b_k‖² = aᴴ G a`.
#[derive(Clone, Debug)]
pub struct GramMatrix<T> {
    pub entries: CMatrix<T>,
    pub measure: Measure,
}

impl<T: Real> GramMatrix<T> {
    pub fn dim(&self) -> usize {
        self.entries.rows()
    }
}

/// Accumulates `Σ_i w_i conj(v_i) v_iᵀ` over sample points.
fn accumulate<T: Real>(b: &BasisSpec<T>, samples: impl Iterator<Item = (Cx<T>, T)>) -> Result<CMatrix<T>> {
    let n = b.len();
    let mut g = CMatrix::zeros(n, n);
    let mut v = Vec::with_capacity(n);
    for (z, w) in samples {
        if !w.is_finite() {
            return Err(LabError::NonFiniteWeight(format!(
                "weight at ({}, {}) is {w}",
                z.re, z.im
            )));
        }
        if !(w > T::zero()) {
            return Err(LabError::NonFiniteWeight(format!(
                "weight at ({}, {}) is not positive: {w}",
                z.re, z.im
            )));
        }
        b.eval_into(z, &mut v);
        for k in 0..n {
            let ck = v[k].conj() * w;
            let row = g.row_mut(k);
            for l in k..n {
                row[l] += ck * v[l];
            }
        }
    }
    for k in 0..n {
        g[(k, k)].im = T::zero();
        for l in 0..k {
            g[(k, l)] = g[(l, k)].conj();
        }
    }
    Ok(g)
}

/// Area Gram with pointwise weight; `weight` is the full density (e.g. `c(-ψ) e^{-φ}`).
pub fn gram_area<T: Real>(
    b: &BasisSpec<T>,
    q: &AreaQuadrature<T>,
    weight: impl Fn(Cx<T>) -> T,
) -> Result<GramMatrix<T>> {
    let g = accumulate(b, q.nodes.iter().zip(&q.weights).map(|(z, w)| (*z, weight(*z) * *w)))?;
    Ok(GramMatrix {
        entries: g,
        measure: Measure::Area,
    })
}

/// Boundary Gram `(1/2π) ∮ conj(b_k) b_l ρ |dz|` over all given circles.
pub fn gram_boundary<T: Real>(
    b: &BasisSpec<T>,
    qs: &[BoundaryQuadrature<T>],
    weight: impl Fn(Cx<T>, Cx<T>) -> T,
) -> Result<GramMatrix<T>> {
    let inv = T::one() / T::lit(2.0 * PI);
    let samples = qs
        .iter()
        .flat_map(|q| (0..q.len()).map(move |i| (q.nodes[i], q.weights[i] * inv, q.outward_normals[i])));
    let g = accumulate(b, samples.map(|(z, w, n)| (z, weight(z, n) * w)))?;
    Ok(GramMatrix {
        entries: g,
        measure: Measure::Boundary,
    })
}

/// Kronecker product of factor Grams (first factor slowest).
pub fn tensor_gram<T: Real>(factors: &[&CMatrix<T>]) -> CMatrix<T> {
    let mut it = factors.iter();
    let first = (*it.next().expect("at least one factor")).clone();
    it.fold(first, |acc, g| acc.kron(g))
}

/// Gram of the mixed-face norm: `Σ_j (1/p_j) A_1 ⊗ … ⊗ B_j ⊗ … ⊗ A_n`.
///
/// `areas[j]` is the area Gram of factor `j` with weight `e^{-φ_j}` and
/// `boundaries[j]` its boundary Gram with weight `(∂G_j/∂v)^{-1} e^{-φ_j}`.
pub fn gram_face_sum<T: Real>(
    areas: &[CMatrix<T>],
    boundaries: &[CMatrix<T>],
    exponents: &[T],
) -> Result<GramMatrix<T>> {
    let n = areas.len();
    if boundaries.len() != n || exponents.len() != n || n == 0 {
        return Err(LabError::InvalidArgument(format!(
            "face sum needs matching factor data: {} area, {} boundary, {} exponents",
            areas.len(),
            boundaries.len(),
            exponents.len()
        )));
    }
    let mut total: Option<CMatrix<T>> = None;
    for (j, p) in exponents.iter().enumerate() {
        let parts: Vec<&CMatrix<T>> = (0..n)
            .map(|l| if l == j { &boundaries[l] } else { &areas[l] })
            .collect();
        let mut term = tensor_gram(&parts);
        term.scale(T::one() / *p);
        match total.as_mut() {
            None => total = Some(term),
            Some(t) => t.add_scaled(&term, T::one()),
        }
    }
    Ok(GramMatrix {
        entries: total.expect("n >= 1"),
        measure: Measure::FaceSum,
    })
}

/// Orthonormal elements `e_i = Σ_k coeffs[(k, i)] b_k` with strictly increasing vanishing orders.
#[derive(Clone, Debug)]
pub struct OrderedONBasis<T> {
    pub coeffs: CMatrix<T>,
    pub orders: Vec<usize>,
}

/// Successive minimal-norm elements with prescribed leading Taylor order at `z0`, normalized.
pub fn ordered_on_basis<T: Real>(g: &GramMatrix<T>, b: &BasisSpec<T>, z0: Cx<T>) -> Result<OrderedONBasis<T>> {
    let n = b.len();
    if g.dim() != n {
        return Err(LabError::InvalidArgument(format!(
            "Gram of size {} for a basis of {} elements",
            g.dim(),
            n
        )));
    }
    let taylor = b.taylor_coeffs(z0, n.saturating_sub(1));
    let mut cols: Vec<Vec<Cx<T>>> = Vec::new();
    let mut orders = Vec::new();
    for m in 0..n {
        let c = CMatrix::from_fn(m + 1, n, |i, k| taylor[(i, k)]);
        let mut d = vec![Cx::zero(); m + 1];
        d[m] = Cx::one();
        match constrained_min(&g.entries, &c, &d) {
            Ok(sol) => {
                let s = T::one() / sol.value.sqrt();
                cols.push(sol.coeffs.iter().map(|v| *v * s).collect());
                orders.push(m);
            }
            Err(LabError::Infeasible(_)) => break,
            Err(e) => return Err(e),
        }
    }
    let coeffs = CMatrix::from_fn(n, cols.len(), |k, i| cols[i][k]);
    Ok(OrderedONBasis { coeffs, orders })
}

/// Tensor product of factor bases; flat index is row-major in the factor multi-index.
#[derive(Clone, Debug)]
pub struct TensorBasis<T> {
    factors: Vec<BasisSpec<T>>,
}

pub fn tensor_basis<T: Real>(factors: Vec<BasisSpec<T>>) -> TensorBasis<T> {
    TensorBasis { factors }
}

impl<T: Real> TensorBasis<T> {
    pub fn factors(&self) -> &[BasisSpec<T>] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.iter().map(|f| f.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        multi.iter().zip(&self.factors).fold(0, |acc, (i, f)| acc * f.len() + i)
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        for (j, f) in self.factors.iter().enumerate().rev() {
            out[j] = flat % f.len();
            flat /= f.len();
        }
        out
    }

    /// Kronecker combination of per-factor vectors.
    pub fn combine(parts: &[Vec<Cx<T>>]) -> Vec<Cx<T>> {
        let mut out = vec![Cx::one()];
        for p in parts {
            let mut next = Vec::with_capacity(out.len() * p.len());
            for a in &out {
                for b in p {
                    next.push(*a * *b);
                }
            }
            out = next;
        }
        out
    }

    pub fn eval(&self, z: &[Cx<T>]) -> Vec<Cx<T>> {
        let parts: Vec<_> = self.factors.iter().zip(z).map(|(f, z)| f.eval(*z)).collect();
        Self::combine(&parts)
    }
}
