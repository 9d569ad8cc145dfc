//! Dense complex linear algebra for Gram matrices and jet-constrained minima.
//!
//! Everything here works on small-to-medium Hermitian systems (a few hundred
//! unknowns), so plain row-major storage and textbook factorizations suffice.
//! Gram matrices built from Laurent monomials span many orders of magnitude on
//! the diagonal; every solver therefore equilibrates with the inverse square
//! root of the diagonal before factoring.

use std::ops::{Index, IndexMut};

use num_traits::{One, Zero};

use crate::error::{LabError, Result};
use crate::scalar::{Cx, Real};

/// Relative diagonal shift added to an equilibrated Gram matrix before Cholesky.
pub const RIDGE: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Cx<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Cx::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Cx::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Cx<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Cx<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Cx<T>] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Cx<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&mut self, s: T) {
        for v in &mut self.data {
            *v *= s;
        }
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, other: &Self, s: T) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += *b * s;
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                let orow = other.row(k);
                let dst = out.row_mut(i);
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * *b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[Cx<T>]) -> Vec<Cx<T>> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).fold(Cx::zero(), |acc, (a, b)| acc + *a * *b))
            .collect()
    }

    /// Kronecker product; row-major multi-index flattening with the first factor slowest.
    pub fn kron(&self, other: &Self) -> Self {
        let (r2, c2) = (other.rows, other.cols);
        let mut out = Self::zeros(self.rows * r2, self.cols * c2);
        for i1 in 0..self.rows {
            for j1 in 0..self.cols {
                let a = self[(i1, j1)];
                if a.is_zero() {
                    continue;
                }
                for i2 in 0..r2 {
                    let base = (i1 * r2 + i2) * out.cols + j1 * c2;
                    let src = other.row(i2);
                    for (j2, b) in src.iter().enumerate() {
                        out.data[base + j2] = a * *b;
                    }
                }
            }
        }
        out
    }

    /// Largest `|A_ij - conj(A_ji)|`, relative to the largest diagonal magnitude.
    pub fn hermitian_defect(&self) -> T {
        assert_eq!(self.rows, self.cols);
        let mut scale = T::min_positive_value();
        for i in 0..self.rows {
            scale = scale.max(self[(i, i)].norm());
        }
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in 0..i {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
            worst = worst.max(self[(i, i)].im.abs());
        }
        worst / scale
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }

    pub fn diagonal(&self) -> Vec<Cx<T>> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `xᴴ A y`.
    pub fn form(&self, x: &[Cx<T>], y: &[Cx<T>]) -> Cx<T> {
        let ay = self.mul_vec(y);
        x.iter().zip(&ay).fold(Cx::zero(), |acc, (a, b)| acc + a.conj() * *b)
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = Cx<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Cx<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Cx<T> {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot<T: Real>(x: &[Cx<T>], y: &[Cx<T>]) -> Cx<T> {
    x.iter().zip(y).fold(Cx::zero(), |acc, (a, b)| acc + a.conj() * *b)
}

/// Lower-triangular Cholesky factor `A = L Lᴴ` of a Hermitian positive definite matrix.
#[derive(Clone, Debug)]
pub struct Cholesky<T> {
    l: CMatrix<T>,
}

impl<T: Real> Cholesky<T> {
    /// Returns `None` when a pivot is not strictly positive.
    pub fn factor(a: &CMatrix<T>) -> Option<Self> {
        let n = a.rows();
        let mut l = CMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if !(d > T::zero()) || !d.is_finite() {
                return None;
            }
            let djj = d.sqrt();
            l[(j, j)] = Cx::new(djj, T::zero());
            for i in (j + 1)..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / djj;
            }
        }
        Some(Self { l })
    }

    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    pub fn solve(&self, b: &[Cx<T>]) -> Vec<Cx<T>> {
        let n = self.dim();
        let l = &self.l;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= l[(i, k)] * y[k];
            }
            y[i] = s / l[(i, i)].re;
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= l[(k, i)].conj() * y[k];
            }
            y[i] = s / l[(i, i)].re;
        }
        y
    }

    /// Squared ratio of extreme pivots: a cheap lower bound on the condition number.
    pub fn condition_estimate(&self) -> T {
        let n = self.dim();
        if n == 0 {
            return T::one();
        }
        let (mut lo, mut hi) = (T::infinity(), T::zero());
        for i in 0..n {
            let d = self.l[(i, i)].re;
            lo = lo.min(d);
            hi = hi.max(d);
        }
        (hi / lo).powi(2)
    }
}

fn ridge<T: Real>() -> T {
    T::lit(RIDGE).max(T::lit(4.0) * T::epsilon())
}

/// Diagonal equilibration `S = D A D` with `D = diag(A)^{-1/2}`.
fn equilibrate<T: Real>(a: &CMatrix<T>) -> Result<(Vec<T>, CMatrix<T>)> {
    let n = a.rows();
    if a.cols() != n {
        return Err(LabError::InvalidArgument("Gram matrix must be square".into()));
    }
    if !a.is_finite() {
        return Err(LabError::SingularGram {
            condition: f64::INFINITY,
        });
    }
    let mut d = Vec::with_capacity(n);
    for i in 0..n {
        let g = a[(i, i)].re;
        if !(g > T::zero()) {
            return Err(LabError::SingularGram {
                condition: f64::INFINITY,
            });
        }
        d.push(T::one() / g.sqrt());
    }
    let s = CMatrix::from_fn(n, n, |i, j| a[(i, j)] * (d[i] * d[j]));
    Ok((d, s))
}

/// Regularized solver for Hermitian positive definite Gram systems.
#[derive(Clone, Debug)]
pub struct HermitianSolver<T> {
    scale: Vec<T>,
    chol: Cholesky<T>,
    shift: T,
}

impl<T: Real> HermitianSolver<T> {
    pub fn new(a: &CMatrix<T>) -> Result<Self> {
        let (scale, mut s) = equilibrate(a)?;
        let n = s.rows();
        // after equilibration trace(S)/n == 1
        let shift = ridge::<T>();
        for i in 0..n {
            s[(i, i)] += Cx::new(shift, T::zero());
        }
        let chol = Cholesky::factor(&s).ok_or(LabError::SingularGram {
            condition: f64::INFINITY,
        })?;
        let cond = chol.condition_estimate();
        if !(cond.as_f64() < 1.0 / (64.0 * T::epsilon().as_f64())) {
            return Err(LabError::SingularGram {
                condition: cond.as_f64(),
            });
        }
        Ok(Self { scale, chol, shift })
    }

    pub fn dim(&self) -> usize {
        self.scale.len()
    }

    /// Ridge applied to the equilibrated matrix.
    pub fn shift(&self) -> T {
        self.shift
    }

    pub fn condition_estimate(&self) -> T {
        self.chol.condition_estimate()
    }

    pub fn solve(&self, b: &[Cx<T>]) -> Vec<Cx<T>> {
        let db: Vec<_> = b.iter().zip(&self.scale).map(|(v, d)| *v * *d).collect();
        let y = self.chol.solve(&db);
        y.iter().zip(&self.scale).map(|(v, d)| *v * *d).collect()
    }

    /// `uᴴ A⁻¹ u` (real and non-negative for Hermitian PD `A`).
    pub fn inverse_form(&self, u: &[Cx<T>]) -> T {
        let x = self.solve(u);
        dot(u, &x).re
    }
}

/// Which algebraic route produced a constrained minimum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MinMethod {
    NullSpace,
    Kkt,
}

#[derive(Clone, Debug)]
pub struct ConstrainedMin<T> {
    /// Minimal value of `aᴴ G a`.
    pub value: T,
    /// Minimizing coefficient vector.
    pub coeffs: Vec<Cx<T>>,
    pub method: MinMethod,
    pub condition: T,
}

/// Householder reflector `P = I - 2 v vᴴ / (vᴴ v)`, acting on indices `start..`.
struct Reflector<T> {
    start: usize,
    v: Vec<Cx<T>>,
    beta: T,
}

impl<T: Real> Reflector<T> {
    fn apply_left(&self, m: &mut CMatrix<T>) {
        if self.beta.is_zero() {
            return;
        }
        for j in 0..m.cols() {
            let mut s = Cx::zero();
            for (k, vk) in self.v.iter().enumerate() {
                s += vk.conj() * m[(self.start + k, j)];
            }
            let s = s * self.beta;
            for (k, vk) in self.v.iter().enumerate() {
                let idx = (self.start + k, j);
                m[idx] -= *vk * s;
            }
        }
    }

    fn apply_right(&self, m: &mut CMatrix<T>) {
        if self.beta.is_zero() {
            return;
        }
        for i in 0..m.rows() {
            let row = m.row_mut(i);
            let mut s = Cx::zero();
            for (k, vk) in self.v.iter().enumerate() {
                s += row[self.start + k] * *vk;
            }
            let s = s * self.beta;
            for (k, vk) in self.v.iter().enumerate() {
                row[self.start + k] -= s * vk.conj();
            }
        }
    }

    fn apply_vec(&self, x: &mut [Cx<T>]) {
        if self.beta.is_zero() {
            return;
        }
        let mut s = Cx::zero();
        for (k, vk) in self.v.iter().enumerate() {
            s += vk.conj() * x[self.start + k];
        }
        let s = s * self.beta;
        for (k, vk) in self.v.iter().enumerate() {
            x[self.start + k] -= *vk * s;
        }
    }
}

/// Householder QR of a tall matrix `A = Q [R; 0]`; returns reflectors and `R`.
fn householder_qr<T: Real>(a: &CMatrix<T>) -> (Vec<Reflector<T>>, CMatrix<T>) {
    let (n, m) = (a.rows(), a.cols());
    assert!(m <= n);
    let mut work = a.clone();
    let mut refl = Vec::with_capacity(m);
    for j in 0..m {
        let x: Vec<Cx<T>> = (j..n).map(|i| work[(i, j)]).collect();
        let norm = x.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt();
        let mut v = x.clone();
        let beta = if norm.is_zero() {
            T::zero()
        } else {
            let phase = if x[0].norm().is_zero() {
                Cx::one()
            } else {
                x[0] / x[0].norm()
            };
            v[0] = x[0] + phase * norm;
            let vv = v.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b);
            T::lit(2.0) / vv
        };
        let r = Reflector { start: j, v, beta };
        r.apply_left(&mut work);
        refl.push(r);
    }
    let rmat = CMatrix::from_fn(m, m, |i, k| if i <= k { work[(i, k)] } else { Cx::zero() });
    (refl, rmat)
}

fn check_constraints<T: Real>(h: &CMatrix<T>, c: &CMatrix<T>, d: &[Cx<T>]) -> Result<()> {
    if c.cols() != h.rows() || c.rows() != d.len() {
        return Err(LabError::InvalidArgument(format!(
            "constraint shape {}x{} incompatible with Gram {} and target {}",
            c.rows(),
            c.cols(),
            h.rows(),
            d.len()
        )));
    }
    if c.rows() > c.cols() {
        return Err(LabError::Infeasible(format!(
            "{} constraints on a {}-dimensional space",
            c.rows(),
            c.cols()
        )));
    }
    Ok(())
}

/// Minimizes `aᴴ H a` subject to `C a = d` by the null-space method.
///
/// The constraint matrix is orthogonally split with a Householder QR of `Cᴴ`;
/// the reduced Hessian on the null space is factored by Cholesky. When that
/// factorization fails the KKT (Schur complement) route is used instead.
pub fn constrained_min<T: Real>(h: &CMatrix<T>, c: &CMatrix<T>, d: &[Cx<T>]) -> Result<ConstrainedMin<T>> {
    check_constraints(h, c, d)?;
    let n = h.rows();
    let m = c.rows();
    let (scale, hs) = equilibrate(h)?;
    let (cs, d) = normalized_rows(c, d, &scale);
    let d = &d[..];

    let (refl, r) = householder_qr(&cs.adjoint());
    let rmax = (0..m).map(|i| r[(i, i)].norm()).fold(T::zero(), T::max);
    let rmin = (0..m).map(|i| r[(i, i)].norm()).fold(T::infinity(), T::min);
    if m > 0 && !(rmin > T::lit(1e-11).max(T::lit(64.0) * T::epsilon()) * rmax) {
        return Err(LabError::Infeasible(format!(
            "constraint rows are dependent (pivot ratio {:e}); the truncated space cannot represent the target jet",
            (rmin / rmax).as_f64()
        )));
    }
    // R1ᴴ x1 = d
    let mut x1 = vec![Cx::zero(); m];
    for i in 0..m {
        let mut s = d[i];
        for k in 0..i {
            s -= r[(k, i)].conj() * x1[k];
        }
        x1[i] = s / r[(i, i)].conj();
    }

    let mut hh = hs.clone();
    for p in &refl {
        p.apply_left(&mut hh);
        p.apply_right(&mut hh);
    }
    let free: Vec<usize> = (m..n).collect();
    let fixed: Vec<usize> = (0..m).collect();
    let h22 = hh.submatrix(&free, &free);
    let h21 = hh.submatrix(&free, &fixed);
    let rhs: Vec<Cx<T>> = h21.mul_vec(&x1).into_iter().map(|v| -v).collect();

    let y = if free.is_empty() {
        Some((Vec::new(), T::one()))
    } else {
        HermitianSolver::new(&h22)
            .ok()
            .map(|s| (s.solve(&rhs), s.condition_estimate()))
    };
    let (y, condition) = match y {
        Some(v) => v,
        None => return kkt_scaled(&scale, &hs, &cs, d),
    };
    let mut z = x1;
    z.extend(y);
    let value = hh.form(&z, &z).re;
    for p in refl.iter().rev() {
        p.apply_vec(&mut z);
    }
    let coeffs = z.iter().zip(&scale).map(|(v, s)| *v * *s).collect();
    Ok(ConstrainedMin {
        value,
        coeffs,
        method: MinMethod::NullSpace,
        condition,
    })
}

/// Minimizes `aᴴ H a` subject to `C a = d` through the Schur complement
/// `C H⁻¹ Cᴴ` of the KKT system.
pub fn constrained_min_kkt<T: Real>(h: &CMatrix<T>, c: &CMatrix<T>, d: &[Cx<T>]) -> Result<ConstrainedMin<T>> {
    check_constraints(h, c, d)?;
    let (scale, hs) = equilibrate(h)?;
    let (cs, d) = normalized_rows(c, d, &scale);
    kkt_scaled(&scale, &hs, &cs, &d)
}

/// Column-scales `C` by the Gram equilibration and normalizes each row (and `d`) to unit length.
fn normalized_rows<T: Real>(c: &CMatrix<T>, d: &[Cx<T>], scale: &[T]) -> (CMatrix<T>, Vec<Cx<T>>) {
    let mut cs = CMatrix::from_fn(c.rows(), c.cols(), |i, j| c[(i, j)] * scale[j]);
    let mut d = d.to_vec();
    for (i, di) in d.iter_mut().enumerate() {
        let norm = cs
            .row(i)
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt();
        if norm > T::zero() {
            for v in cs.row_mut(i) {
                *v /= norm;
            }
            *di /= norm;
        }
    }
    (cs, d)
}

fn kkt_scaled<T: Real>(scale: &[T], hs: &CMatrix<T>, cs: &CMatrix<T>, d: &[Cx<T>]) -> Result<ConstrainedMin<T>> {
    let m = cs.rows();
    let solver = HermitianSolver::new(hs)?;
    let cols: Vec<Vec<Cx<T>>> = (0..m)
        .map(|i| {
            let ci: Vec<Cx<T>> = cs.row(i).iter().map(|v| v.conj()).collect();
            solver.solve(&ci)
        })
        .collect();
    let schur = CMatrix::from_fn(m, m, |i, j| {
        cs.row(i)
            .iter()
            .zip(&cols[j])
            .fold(Cx::zero(), |acc, (a, b)| acc + *a * *b)
    });
    let s_solver = HermitianSolver::new(&schur)
        .map_err(|_| LabError::Infeasible("Schur complement of the constraints is singular".into()))?;
    let mu = s_solver.solve(d);
    let value = dot(d, &mu).re;
    let n = hs.rows();
    let mut a = vec![Cx::zero(); n];
    for (col, mui) in cols.iter().zip(&mu) {
        for (ak, ck) in a.iter_mut().zip(col) {
            *ak += *ck * *mui;
        }
    }
    let coeffs = a.iter().zip(scale).map(|(v, s)| *v * *s).collect();
    Ok(ConstrainedMin {
        value,
        coeffs,
        method: MinMethod::Kkt,
        condition: solver.condition_estimate(),
    })
}
