//! Planar factor domains, product domains, quadrature rules and sublevel sets.

use crate::error::{LabError, Result};
use crate::quadrature::gauss_legendre_on;
use crate::scalar::{cis, cx_real, Cx, Real};

/// A disk or a concentric annulus in the plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Domain<T> {
    Disk { center: Cx<T>, radius: T },
    Annulus { center: Cx<T>, r_inner: T, r_outer: T },
}

impl<T: Real> Domain<T> {
    pub fn disk(center: Cx<T>, radius: T) -> Result<Self> {
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(LabError::InvalidDomain(format!(
                "disk radius {radius} must be positive"
            )));
        }
        Ok(Domain::Disk { center, radius })
    }

    pub fn annulus(center: Cx<T>, r_inner: T, r_outer: T) -> Result<Self> {
        if !(r_inner > T::zero()) || !(r_inner < r_outer) || !r_outer.is_finite() {
            return Err(LabError::InvalidDomain(format!(
                "annulus radii must satisfy 0 < {r_inner} < {r_outer}"
            )));
        }
        Ok(Domain::Annulus {
            center,
            r_inner,
            r_outer,
        })
    }

    pub fn unit_disk() -> Self {
        Domain::Disk {
            center: cx_real(T::zero()),
            radius: T::one(),
        }
    }

    pub fn center(&self) -> Cx<T> {
        match *self {
            Domain::Disk { center, .. } | Domain::Annulus { center, .. } => center,
        }
    }

    /// Outer radius; the natural length scale of the factor.
    pub fn scale(&self) -> T {
        match *self {
            Domain::Disk { radius, .. } => radius,
            Domain::Annulus { r_outer, .. } => r_outer,
        }
    }

    pub fn is_annulus(&self) -> bool {
        matches!(self, Domain::Annulus { .. })
    }

    /// Signed distance to the boundary, positive inside.
    pub fn depth(&self, z: Cx<T>) -> T {
        let r = (z - self.center()).norm();
        match *self {
            Domain::Disk { radius, .. } => radius - r,
            Domain::Annulus { r_inner, r_outer, .. } => (r_outer - r).min(r - r_inner),
        }
    }

    pub fn contains(&self, z: Cx<T>) -> bool {
        self.depth(z) > T::zero()
    }

    pub fn area(&self) -> T {
        match *self {
            Domain::Disk { radius, .. } => T::PI() * radius * radius,
            Domain::Annulus { r_inner, r_outer, .. } => T::PI() * (r_outer * r_outer - r_inner * r_inner),
        }
    }

    /// Boundary circles as `(radius, outward orientation sign)`; the outer circle is component 0.
    pub fn circles(&self) -> Vec<(T, T)> {
        match *self {
            Domain::Disk { radius, .. } => vec![(radius, T::one())],
            Domain::Annulus { r_inner, r_outer, .. } => vec![(r_outer, T::one()), (r_inner, -T::one())],
        }
    }

    /// Distance from `z` to the nearest boundary circle, used to validate boundary points.
    pub fn boundary_distance(&self, z: Cx<T>) -> T {
        let r = (z - self.center()).norm();
        self.circles()
            .iter()
            .map(|(rad, _)| (r - *rad).abs())
            .fold(T::infinity(), T::min)
    }

    /// Outward unit normal at a boundary point, or an error if `w` is not on the boundary.
    pub fn outward_normal(&self, w: Cx<T>) -> Result<Cx<T>> {
        let tol = T::lit(1e-8).max(T::lit(100.0) * T::epsilon()) * self.scale();
        let u = w - self.center();
        let r = u.norm();
        for (rad, sign) in self.circles() {
            if (r - rad).abs() <= tol {
                return Ok(u / r * sign);
            }
        }
        Err(LabError::NotOnBoundary(format!(
            "point ({}, {}) is {:e} away from the boundary",
            w.re,
            w.im,
            self.boundary_distance(w).as_f64()
        )))
    }
}

/// Ordered product of planar factors together with an interior basepoint.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductDomain<T> {
    factors: Vec<Domain<T>>,
    basepoint: Vec<Cx<T>>,
}

impl<T: Real> ProductDomain<T> {
    pub fn new(factors: Vec<Domain<T>>, basepoint: Vec<Cx<T>>) -> Result<Self> {
        if factors.is_empty() {
            return Err(LabError::InvalidDomain("a product needs at least one factor".into()));
        }
        if factors.len() != basepoint.len() {
            return Err(LabError::InvalidDomain(format!(
                "{} factors but {} basepoint coordinates",
                factors.len(),
                basepoint.len()
            )));
        }
        for (j, (d, z)) in factors.iter().zip(&basepoint).enumerate() {
            if !d.contains(*z) {
                return Err(LabError::InvalidDomain(format!(
                    "basepoint coordinate {j} = ({}, {}) is not interior to its factor",
                    z.re, z.im
                )));
            }
        }
        Ok(Self { factors, basepoint })
    }

    pub fn single(d: Domain<T>, z0: Cx<T>) -> Result<Self> {
        Self::new(vec![d], vec![z0])
    }

    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[Domain<T>] {
        &self.factors
    }

    pub fn basepoint(&self) -> &[Cx<T>] {
        &self.basepoint
    }
}

/// Trapezoidal rule on one boundary circle.
#[derive(Clone, Debug)]
pub struct BoundaryQuadrature<T> {
    pub nodes: Vec<Cx<T>>,
    /// Arclength elements.
    pub weights: Vec<T>,
    pub outward_normals: Vec<Cx<T>>,
    pub component_id: usize,
}

impl<T: Real> BoundaryQuadrature<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Equispaced rule on the circle `|z - center| = radius` without node-count checks.
pub fn circle_rule<T: Real>(
    center: Cx<T>,
    radius: T,
    m: usize,
    orientation: T,
    component_id: usize,
) -> BoundaryQuadrature<T> {
    let h = T::lit(2.0) * T::PI() / T::of(m);
    let mut nodes = Vec::with_capacity(m);
    let mut normals = Vec::with_capacity(m);
    for j in 0..m {
        let e = cis(h * T::of(j));
        nodes.push(center + e * radius);
        normals.push(e * orientation);
    }
    BoundaryQuadrature {
        nodes,
        weights: vec![h * radius; m],
        outward_normals: normals,
        component_id,
    }
}

/// One equispaced rule per boundary circle (`m` nodes each).
pub fn boundary_quadrature<T: Real>(d: &Domain<T>, m: usize) -> Result<Vec<BoundaryQuadrature<T>>> {
    if m < 8 || !m.is_multiple_of(2) {
        return Err(LabError::InvalidArgument(format!(
            "boundary node count must be even and at least 8, got {m}"
        )));
    }
    Ok(d.circles()
        .into_iter()
        .enumerate()
        .map(|(id, (r, s))| circle_rule(d.center(), r, m, s, id))
        .collect())
}

/// Tensor rule: Gauss–Legendre in radius, trapezoid in angle, Jacobian included.
#[derive(Clone, Debug)]
pub struct AreaQuadrature<T> {
    pub nodes: Vec<Cx<T>>,
    pub weights: Vec<T>,
}

impl<T: Real> AreaQuadrature<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(Cx<T>) -> T) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (z, w)| acc + f(*z) * *w)
    }
}

pub fn area_quadrature<T: Real>(d: &Domain<T>, m_r: usize, m_theta: usize) -> Result<AreaQuadrature<T>> {
    if m_r < 4 || m_theta < 8 {
        return Err(LabError::InvalidArgument(format!(
            "area rule needs m_r >= 4 and m_theta >= 8, got {m_r} x {m_theta}"
        )));
    }
    let (a, b) = match *d {
        Domain::Disk { radius, .. } => (T::zero(), radius),
        Domain::Annulus { r_inner, r_outer, .. } => {
            if !(r_inner < r_outer) {
                return Err(LabError::InvalidDomain("degenerate annulus".into()));
            }
            (r_inner, r_outer)
        }
    };
    let (rs, wr) = gauss_legendre_on(a, b, m_r);
    let h = T::lit(2.0) * T::PI() / T::of(m_theta);
    let c = d.center();
    let dirs: Vec<Cx<T>> = (0..m_theta).map(|j| cis(h * (T::of(j) + T::lit(0.5)))).collect();
    let mut nodes = Vec::with_capacity(m_r * m_theta);
    let mut weights = Vec::with_capacity(m_r * m_theta);
    for (r, w) in rs.iter().zip(&wr) {
        for e in &dirs {
            nodes.push(c + *e * *r);
            weights.push(*w * *r * h);
        }
    }
    Ok(AreaQuadrature { nodes, weights })
}

/// The product of factor regions `{G_j(., z_j) < -t / (2 p_j)}`.
///
/// Disk factors map to exact Möbius-image disks. Annulus factors are only
/// accepted at `t = 0`.
pub fn sublevel_region<T: Real>(p: &ProductDomain<T>, exponents: &[T], t: T) -> Result<ProductDomain<T>> {
    if exponents.len() != p.dim() {
        return Err(LabError::InvalidArgument(format!(
            "{} exponents for {} factors",
            exponents.len(),
            p.dim()
        )));
    }
    if exponents.iter().any(|e| !(*e > T::zero())) {
        return Err(LabError::InvalidArgument("exponents must be positive".into()));
    }
    if !(t >= T::zero()) {
        return Err(LabError::InvalidArgument(format!(
            "sublevel parameter {t} must be non-negative"
        )));
    }
    if t.is_zero() {
        return Ok(p.clone());
    }
    let mut factors = Vec::with_capacity(p.dim());
    for ((d, z), pj) in p.factors().iter().zip(p.basepoint()).zip(exponents) {
        let s = (-t / (T::lit(2.0) * *pj)).exp();
        match *d {
            Domain::Disk { center, radius } => {
                let a = (*z - center) / radius;
                let a2 = a.norm_sqr();
                let den = T::one() - s * s * a2;
                let c_n = a * ((T::one() - s * s) / den);
                let r_n = s * (T::one() - a2) / den;
                factors.push(Domain::Disk {
                    center: center + c_n * radius,
                    radius: r_n * radius,
                });
            }
            Domain::Annulus { .. } => {
                return Err(LabError::Unsupported(
                    "sublevel sets of annulus factors are only available at t = 0".into(),
                ))
            }
        }
    }
    ProductDomain::new(factors, p.basepoint().to_vec())
}
