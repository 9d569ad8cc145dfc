//! Monomial jet ideals at the basepoint and the target germ `h₀`.

use num_traits::Zero;

use crate::error::{LabError, Result};
use crate::scalar::{Cx, Real};

/// Slack used when comparing `Σ (α_j + 1) / p_j` with 1.
pub const MULTIPLIER_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum JetIdeal<T> {
    /// Germs whose Taylor coefficients vanish on `{α : α_j <= β̃_j for all j}`.
    Box(Vec<usize>),
    /// Multiplier ideal of `max_j 2 p_j G_j`: monomials with `Σ (α_j + 1)/p_j > 1`.
    Multiplier(Vec<T>),
    /// The maximal ideal (germs vanishing at the basepoint).
    Maximal,
}

/// Whether the monomial `w^α` belongs to the ideal.
pub fn ideal_contains<T: Real>(ideal: &JetIdeal<T>, alpha: &[usize]) -> bool {
    match ideal {
        JetIdeal::Box(b) => alpha.iter().zip(b).any(|(a, b)| a > b),
        JetIdeal::Multiplier(p) => multiplier_sum(alpha, p) > T::one() + T::lit(MULTIPLIER_TOL),
        JetIdeal::Maximal => alpha.iter().any(|a| *a > 0),
    }
}

fn multiplier_sum<T: Real>(alpha: &[usize], p: &[T]) -> T {
    alpha
        .iter()
        .zip(p)
        .fold(T::zero(), |acc, (a, p)| acc + T::of(a + 1) / *p)
}

/// `E₁ = {α : Σ (α_j + 1)/p_j <= 1}`, in lexicographic order.
pub fn multiplier_complement<T: Real>(p: &[T]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; p.len()];
    fn rec<T: Real>(j: usize, used: T, p: &[T], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let limit = T::one() + T::lit(MULTIPLIER_TOL);
        if j == p.len() {
            out.push(cur.clone());
            return;
        }
        let rest: T = p[j + 1..].iter().fold(T::zero(), |a, q| a + T::one() / *q);
        let mut a = 0;
        while used + T::of(a + 1) / p[j] + rest <= limit {
            cur[j] = a;
            rec(j + 1, used + T::of(a + 1) / p[j], p, cur, out);
            a += 1;
        }
        cur[j] = 0;
    }
    if p.iter().all(|q| *q > T::zero()) {
        rec(0, T::zero(), p, &mut cur, &mut out);
    }
    out
}

/// `E = {α : Σ (α_j + 1)/p_j = 1}`.
pub fn multiplier_boundary<T: Real>(p: &[T]) -> Vec<Vec<usize>> {
    multiplier_complement(p)
        .into_iter()
        .filter(|a| (multiplier_sum(a, p) - T::one()).abs() <= T::lit(MULTIPLIER_TOL))
        .collect()
}

impl<T: Real> JetIdeal<T> {
    /// Multi-indices outside the ideal, i.e. the Taylor coefficients that get constrained.
    pub fn complement(&self, n: usize) -> Result<Vec<Vec<usize>>> {
        match self {
            JetIdeal::Maximal => Ok(vec![vec![0; n]]),
            JetIdeal::Box(b) => {
                if b.len() != n {
                    return Err(LabError::InvalidArgument(format!(
                        "box ideal has {} entries for {} factors",
                        b.len(),
                        n
                    )));
                }
                let mut out = vec![Vec::new()];
                for bj in b {
                    out = out
                        .into_iter()
                        .flat_map(|pre| {
                            (0..=*bj).map(move |a| {
                                let mut v = pre.clone();
                                v.push(a);
                                v
                            })
                        })
                        .collect();
                }
                Ok(out)
            }
            JetIdeal::Multiplier(p) => {
                if p.len() != n {
                    return Err(LabError::InvalidArgument(format!(
                        "multiplier ideal has {} exponents for {} factors",
                        p.len(),
                        n
                    )));
                }
                if p.iter().any(|q| !(*q > T::zero())) {
                    return Err(LabError::InvalidArgument("exponents must be positive".into()));
                }
                let c = multiplier_complement(p);
                if c.is_empty() {
                    return Err(LabError::InvalidArgument(
                        "the multiplier ideal is the whole ring (Σ 1/p_j > 1)".into(),
                    ));
                }
                Ok(c)
            }
        }
    }

    /// Highest single-variable order among constrained multi-indices.
    pub fn max_constrained_order(&self, n: usize) -> Result<usize> {
        Ok(self
            .complement(n)?
            .iter()
            .flat_map(|a| a.iter().copied())
            .max()
            .unwrap_or(0))
    }
}

/// Whether `I(ψ) ⊆ I` for `ψ = max 2 p_j G_j`: every constrained monomial of `I` must lie in `E₁`.
pub fn psi_ideal_contained<T: Real>(ideal: &JetIdeal<T>, exponents: &[T]) -> Result<bool> {
    let comp = ideal.complement(exponents.len())?;
    Ok(comp
        .iter()
        .all(|a| !ideal_contains(&JetIdeal::Multiplier(exponents.to_vec()), a)))
}

/// A polynomial germ `h₀ = Σ d_α (w - z₀)^α`.
#[derive(Clone, Debug, PartialEq)]
pub struct JetTarget<T> {
    pub terms: Vec<(Vec<usize>, Cx<T>)>,
}

impl<T: Real> JetTarget<T> {
    pub fn constant(n: usize, value: Cx<T>) -> Self {
        Self {
            terms: vec![(vec![0; n], value)],
        }
    }

    pub fn monomial(alpha: Vec<usize>) -> Self {
        Self {
            terms: vec![(alpha, Cx::new(T::one(), T::zero()))],
        }
    }

    /// `Π_j h_j` with `h_j` given by ascending coefficients in `(w_j - z_j)`.
    pub fn product(factors: &[Vec<Cx<T>>]) -> Self {
        let mut terms: Vec<(Vec<usize>, Cx<T>)> = vec![(Vec::new(), Cx::new(T::one(), T::zero()))];
        for h in factors {
            terms = terms
                .into_iter()
                .flat_map(|(a, c)| {
                    h.iter().enumerate().filter(|(_, d)| !d.is_zero()).map(move |(k, d)| {
                        let mut a = a.clone();
                        a.push(k);
                        (a, c * *d)
                    })
                })
                .collect();
        }
        Self { terms }
    }

    pub fn coefficient(&self, alpha: &[usize]) -> Cx<T> {
        self.terms
            .iter()
            .filter(|(a, _)| a.as_slice() == alpha)
            .fold(Cx::zero(), |acc, (_, c)| acc + *c)
    }

    /// Ensures `(h₀, z₀) ∉ I`.
    pub fn check_against(&self, ideal: &JetIdeal<T>) -> Result<()> {
        let ok = self
            .terms
            .iter()
            .any(|(a, c)| !c.is_zero() && !ideal_contains(ideal, a));
        if ok {
            Ok(())
        } else {
            Err(LabError::InvalidArgument(
                "target germ lies in the ideal; the constrained problem is trivial".into(),
            ))
        }
    }
}
