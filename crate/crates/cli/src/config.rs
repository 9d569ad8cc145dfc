//! TOML scenario files.
//!
//! A file has an optional `[defaults]` table and any number of `[[scenario]]`
//! tables. Each scenario lists its factors as `[[scenario.factor]]` tables.

use std::collections::BTreeSet;
use std::fmt;

use saitoh_core::green::HarmonicSeries;
use saitoh_core::{cx, CWeight64, Domain64, JetIdeal64, JetTarget64, PhiPreset64, C64};
use serde::Deserialize;

use crate::CliError;

/// Tolerances and resolutions used when a scenario does not set its own.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Defaults {
    pub degree: usize,
    pub equality_tol: f64,
    pub inequality_tol: f64,
    pub concavity_tol: f64,
    pub gap_margin: f64,
    /// The strict-gap error estimate compares degree `N` with `N + reference_step`.
    pub reference_step: usize,
    pub boundary_nodes: Option<usize>,
    pub radial_nodes: Option<usize>,
    pub angular_nodes: Option<usize>,
}

impl Default for Defaults {
    fn default() -> Self {
        Self {
            degree: 16,
            equality_tol: 1e-4,
            inequality_tol: 1e-6,
            concavity_tol: 1e-6,
            gap_margin: 0.0,
            reference_step: 8,
            boundary_nodes: None,
            radial_nodes: None,
            angular_nodes: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Deserialize)]
pub enum Tag {
    #[serde(rename = "main1-1")]
    Main11,
    #[serde(rename = "main1-2")]
    Main12,
    #[serde(rename = "main2-1")]
    Main21,
    #[serde(rename = "main2-2")]
    Main22,
    #[serde(rename = "main2-3")]
    Main23,
    #[serde(rename = "main2-4")]
    Main24,
    #[serde(rename = "saitoh-strict")]
    SaitohStrict,
    #[serde(rename = "saitoh-1d")]
    Saitoh1d,
    #[serde(rename = "higher-jet")]
    HigherJet,
    #[serde(rename = "prod-S")]
    ProdS,
    #[serde(rename = "prod-B")]
    ProdB,
    #[serde(rename = "app1")]
    App1,
    #[serde(rename = "m2-oracle")]
    M2Oracle,
    #[serde(rename = "concavity")]
    Concavity,
}

impl Tag {
    pub fn name(self) -> &'static str {
        match self {
            Tag::Main11 => "main1-1",
            Tag::Main12 => "main1-2",
            Tag::Main21 => "main2-1",
            Tag::Main22 => "main2-2",
            Tag::Main23 => "main2-3",
            Tag::Main24 => "main2-4",
            Tag::SaitohStrict => "saitoh-strict",
            Tag::Saitoh1d => "saitoh-1d",
            Tag::HigherJet => "higher-jet",
            Tag::ProdS => "prod-S",
            Tag::ProdB => "prod-B",
            Tag::App1 => "app1",
            Tag::M2Oracle => "m2-oracle",
            Tag::Concavity => "concavity",
        }
    }

    /// Whether both sides are reproducing-kernel values, which can only grow with the degree.
    pub fn kernel_valued(self) -> bool {
        !matches!(self, Tag::App1 | Tag::M2Oracle | Tag::Concavity)
    }

    fn default_relation(self, d: &Defaults) -> Relation {
        match self {
            Tag::SaitohStrict => Relation::StrictGap {
                margin: d.gap_margin,
                reference_degree: None,
            },
            Tag::Concavity => Relation::AtMost { tol: d.concavity_tol },
            Tag::ProdS | Tag::ProdB | Tag::App1 | Tag::M2Oracle => Relation::Equality { tol: 1e-8 },
            _ => Relation::Inequality { tol: d.inequality_tol },
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Expected relation between the two sides.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Relation {
    /// `|lhs/rhs - 1| <= tol`.
    Equality { tol: f64 },
    /// `lhs >= rhs - tol·|rhs|`.
    Inequality { tol: f64 },
    /// `lhs - rhs > max(margin, 10·estimate)`, the estimate taken against a higher degree.
    StrictGap {
        margin: f64,
        reference_degree: Option<usize>,
    },
    /// `lhs <= tol·rhs`.
    AtMost { tol: f64 },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "kebab-case")]
enum RelationSpec {
    Equality {
        tol: Option<f64>,
    },
    Inequality {
        tol: Option<f64>,
    },
    StrictGap {
        margin: Option<f64>,
        reference_degree: Option<usize>,
    },
    AtMost {
        tol: Option<f64>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, tag = "preset", rename_all = "kebab-case")]
enum PhiSpec {
    Zero,
    /// `2 s log|z - c|` on an annulus.
    LogPower {
        s: f64,
    },
    /// `2 s log|z - c|` with `s` chosen so that the character of `-φ/2` matches the Green function's.
    LogPowerTuned,
    Gaussian {
        a: f64,
    },
    /// `2 log|g| + 2 u`, with `u = b log|z - u_center| + Re Σ u_k (z - u_center)^k`.
    LogAbsPoly {
        g: Vec<[f64; 2]>,
        #[serde(default)]
        u: Vec<[f64; 2]>,
        #[serde(default)]
        u_log: f64,
        #[serde(default)]
        u_center: [f64; 2],
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
enum FactorKind {
    Disk,
    Annulus,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FactorSpec {
    kind: FactorKind,
    #[serde(default)]
    center: [f64; 2],
    radius: Option<f64>,
    r_inner: Option<f64>,
    r_outer: Option<f64>,
    #[serde(default)]
    basepoint: [f64; 2],
    phi: Option<PhiSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "kebab-case")]
enum CSpec {
    Constant,
    Exponential { a: f64 },
    Affine { b: f64 },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "kebab-case")]
enum IdealSpec {
    Box { orders: Vec<usize> },
    Multiplier,
    Maximal,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermSpec {
    alpha: Vec<usize>,
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioSpec {
    id: String,
    tag: Tag,
    #[serde(default)]
    factor: Vec<FactorSpec>,
    exponents: Option<Vec<f64>>,
    c: Option<CSpec>,
    ideal: Option<IdealSpec>,
    target: Option<Vec<TermSpec>>,
    /// Per-factor germs `h_j`, ascending coefficients `[re, im]` in `(w_j - z_j)`.
    factor_targets: Option<Vec<Vec<[f64; 2]>>>,
    jet_order: Option<usize>,
    t: Option<f64>,
    t_grid: Option<Vec<f64>>,
    require_linear: Option<bool>,
    degree: Option<usize>,
    boundary_nodes: Option<usize>,
    radial_nodes: Option<usize>,
    angular_nodes: Option<usize>,
    relation: Option<RelationSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileSpec {
    #[serde(default)]
    defaults: Defaults,
    #[serde(default)]
    scenario: Vec<ScenarioSpec>,
}

/// φ of one factor before the tuned preset is resolved against the Green function.
#[derive(Clone, Debug)]
pub enum PhiChoice {
    Fixed(PhiPreset64),
    TunedLogPower,
}

#[derive(Clone, Debug)]
pub struct Factor {
    pub domain: Domain64,
    pub basepoint: C64,
    pub phi: PhiChoice,
}

/// A scenario with every default filled in.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub id: String,
    pub tag: Tag,
    pub factors: Vec<Factor>,
    pub exponents: Vec<f64>,
    pub c: CWeight64,
    /// `None` means the sup kernel (no jet constraint) where the tag allows it.
    pub ideal: Option<JetIdeal64>,
    pub target: JetTarget64,
    pub factor_targets: Option<Vec<Vec<C64>>>,
    pub jet_order: Option<usize>,
    pub t: f64,
    pub t_grid: Option<Vec<f64>>,
    pub require_linear: bool,
    pub degree: usize,
    pub boundary_nodes: Option<usize>,
    pub radial_nodes: Option<usize>,
    pub angular_nodes: Option<usize>,
    pub relation: Relation,
    pub reference_step: usize,
}

#[derive(Clone, Debug)]
pub struct Config {
    pub defaults: Defaults,
    pub scenarios: Vec<Scenario>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let spec: FileSpec = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        let mut seen = BTreeSet::new();
        let mut scenarios = Vec::with_capacity(spec.scenario.len());
        for s in spec.scenario {
            if !seen.insert(s.id.clone()) {
                return Err(CliError::Config {
                    id: s.id,
                    message: "duplicate scenario id".into(),
                });
            }
            let id = s.id.clone();
            scenarios.push(resolve(s, &spec.defaults).map_err(|message| CliError::Config { id, message })?);
        }
        scenarios.sort_by(|a, b| a.id.cmp(&b.id));
        Ok(Self {
            defaults: spec.defaults,
            scenarios,
        })
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Parse(m) => CliError::Parse(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn scenario(&self, id: &str) -> Result<&Scenario, CliError> {
        self.scenarios
            .iter()
            .find(|s| s.id == id)
            .ok_or_else(|| CliError::UnknownScenario(id.to_string()))
    }
}

fn point(p: [f64; 2]) -> C64 {
    cx(p[0], p[1])
}

fn resolve_phi(spec: Option<PhiSpec>) -> PhiChoice {
    match spec.unwrap_or(PhiSpec::Zero) {
        PhiSpec::Zero => PhiChoice::Fixed(PhiPreset64::Zero),
        PhiSpec::LogPower { s } => PhiChoice::Fixed(PhiPreset64::HarmonicLogPower(s)),
        PhiSpec::LogPowerTuned => PhiChoice::TunedLogPower,
        PhiSpec::Gaussian { a } => PhiChoice::Fixed(PhiPreset64::GaussianBump(a)),
        PhiSpec::LogAbsPoly { g, u, u_log, u_center } => PhiChoice::Fixed(PhiPreset64::LogAbsPoly {
            g: g.into_iter().map(point).collect(),
            u: HarmonicSeries {
                center: point(u_center),
                coeffs: u.into_iter().map(point).collect(),
                log_coeff: u_log,
            },
        }),
    }
}

fn resolve_factor(f: FactorSpec) -> Result<Factor, String> {
    let center = point(f.center);
    let domain = match f.kind {
        FactorKind::Disk => {
            if f.r_inner.is_some() || f.r_outer.is_some() {
                return Err("a disk takes `radius`, not `r_inner`/`r_outer`".into());
            }
            Domain64::disk(center, f.radius.ok_or("a disk needs `radius`")?)
        }
        FactorKind::Annulus => {
            if f.radius.is_some() {
                return Err("an annulus takes `r_inner` and `r_outer`, not `radius`".into());
            }
            let (r, big_r) = (
                f.r_inner.ok_or("an annulus needs `r_inner`")?,
                f.r_outer.ok_or("an annulus needs `r_outer`")?,
            );
            Domain64::annulus(center, r, big_r)
        }
    }
    .map_err(|e| e.to_string())?;
    Ok(Factor {
        domain,
        basepoint: point(f.basepoint),
        phi: resolve_phi(f.phi),
    })
}

fn resolve(s: ScenarioSpec, d: &Defaults) -> Result<Scenario, String> {
    let factors = s
        .factor
        .into_iter()
        .map(resolve_factor)
        .collect::<Result<Vec<_>, _>>()?;
    let n = match (&s.exponents, factors.len()) {
        (Some(p), 0) => p.len(),
        (_, k) => k,
    };
    if n == 0 {
        return Err("a scenario needs at least one factor or exponent".into());
    }
    if factors.is_empty() && s.tag != Tag::M2Oracle {
        return Err(format!("tag {} needs `[[scenario.factor]]` tables", s.tag));
    }
    let exponents = match (s.exponents, s.tag, s.jet_order) {
        (Some(p), _, _) => p,
        (None, Tag::HigherJet, Some(k)) => vec![(k + 1) as f64],
        (None, _, _) => return Err("missing `exponents`".into()),
    };
    if exponents.len() != n {
        return Err(format!("{n} factors but {} exponents", exponents.len()));
    }
    if exponents.iter().any(|p| !(*p > 0.0 && p.is_finite())) {
        return Err("exponents must be positive and finite".into());
    }
    if s.tag == Tag::HigherJet && s.jet_order.is_none() {
        return Err("tag higher-jet needs `jet_order`".into());
    }
    let c = match s.c.unwrap_or(CSpec::Constant) {
        CSpec::Constant => CWeight64::Constant,
        CSpec::Exponential { a } => CWeight64::Exponential(a),
        CSpec::Affine { b } => CWeight64::Affine(b),
    };
    c.validate().map_err(|e| e.to_string())?;
    let ideal = s.ideal.map(|i| match i {
        IdealSpec::Box { orders } => JetIdeal64::Box(orders),
        IdealSpec::Multiplier => JetIdeal64::Multiplier(exponents.clone()),
        IdealSpec::Maximal => JetIdeal64::Maximal,
    });
    if let Some(JetIdeal64::Box(b)) = &ideal {
        if b.len() != n {
            return Err(format!("box ideal has {} orders for {n} factors", b.len()));
        }
    }
    let factor_targets: Option<Vec<Vec<C64>>> = s
        .factor_targets
        .map(|f| f.into_iter().map(|h| h.into_iter().map(point).collect()).collect());
    if let Some(f) = &factor_targets {
        if f.len() != n {
            return Err(format!("{} factor targets for {n} factors", f.len()));
        }
        if s.target.is_some() {
            return Err("give either `target` or `factor_targets`, not both".into());
        }
    }
    let target = match (s.target, &factor_targets) {
        (Some(terms), _) => {
            if terms.iter().any(|t| t.alpha.len() != n) {
                return Err(format!("every target multi-index needs {n} entries"));
            }
            JetTarget64 {
                terms: terms.into_iter().map(|t| (t.alpha, cx(t.re, t.im))).collect(),
            }
        }
        (None, Some(f)) => JetTarget64::product(f),
        (None, None) => JetTarget64::constant(n, cx(1.0, 0.0)),
    };
    if target.terms.is_empty() {
        return Err("the target germ has no terms".into());
    }
    let relation = match s.relation {
        None => s.tag.default_relation(d),
        Some(RelationSpec::Equality { tol }) => Relation::Equality {
            tol: tol.unwrap_or(d.equality_tol),
        },
        Some(RelationSpec::Inequality { tol }) => Relation::Inequality {
            tol: tol.unwrap_or(d.inequality_tol),
        },
        Some(RelationSpec::StrictGap {
            margin,
            reference_degree,
        }) => Relation::StrictGap {
            margin: margin.unwrap_or(d.gap_margin),
            reference_degree,
        },
        Some(RelationSpec::AtMost { tol }) => Relation::AtMost {
            tol: tol.unwrap_or(d.concavity_tol),
        },
    };
    let t = s.t.unwrap_or(0.0);
    if !(t >= 0.0 && t.is_finite()) {
        return Err(format!("t must be a nonnegative number, got {t}"));
    }
    Ok(Scenario {
        id: s.id,
        tag: s.tag,
        factors,
        exponents,
        c,
        ideal,
        target,
        factor_targets,
        jet_order: s.jet_order,
        t,
        t_grid: s.t_grid,
        require_linear: s.require_linear.unwrap_or(false),
        degree: s.degree.unwrap_or(d.degree),
        boundary_nodes: s.boundary_nodes.or(d.boundary_nodes),
        radial_nodes: s.radial_nodes.or(d.radial_nodes),
        angular_nodes: s.angular_nodes.or(d.angular_nodes),
        relation,
        reference_step: d.reference_step,
    })
}
