use super::corpus::corpus;
use crate::error::{Error, Result};
use crate::geometry::MAP_CATALOG;
use crate::projection::{Parity, Variant};
use crate::spline::KnotSequence;
use crate::target::TestFunction;
use crate::tensor::{FieldFunction, ProjectorKind};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use std::fmt;

/// Degree and smoothness of one space family; `k` defaults to `p - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegreeSpec {
    pub p: usize,
    #[serde(default)]
    pub k: Option<i32>,
}

impl DegreeSpec {
    pub fn smoothness(&self) -> i32 {
        self.k.unwrap_or(self.p as i32 - 1)
    }
}

/// A target from the corpus: `{"id": "sin", "omega": 7.2}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSpec {
    pub id: String,
    #[serde(flatten)]
    pub params: Map<String, Value>,
}

impl TargetSpec {
    pub fn build(&self) -> Result<TestFunction> {
        corpus(&self.id, &self.params)
    }
}

/// Derivative order of the measured error: one order, or one per direction
/// for bivariate projectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Ell {
    One(usize),
    Pair([usize; 2]),
}

impl Ell {
    pub fn total(&self) -> usize {
        match *self {
            Ell::One(l) => l,
            Ell::Pair([a, b]) => a + b,
        }
    }
}

impl fmt::Display for Ell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ell::One(l) => write!(f, "{l}"),
            Ell::Pair([a, b]) => write!(f, "{a}:{b}"),
        }
    }
}

/// Which univariate estimate is checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    /// `C_{h,p,k,r}` and its Ritz products.
    #[default]
    Sharp,
    /// `(e h / (4(p-k)))^{r-ℓ}`, for `k <= p-2`.
    Simplified,
}

/// Parsed `projector` field.
#[derive(Debug, Clone, PartialEq)]
pub enum Projector {
    L2,
    Ritz(usize),
    Q,
    Reduced(Parity, Variant),
    Tensor(ProjectorKind),
    Mapped(ProjectorKind, String),
    MultiPatch,
}

fn kind(s: &str) -> Result<ProjectorKind> {
    match s {
        "l2" => Ok(ProjectorKind::L2),
        "ritz" => Ok(ProjectorKind::Ritz),
        "q" => Ok(ProjectorKind::Q),
        other => Err(Error::Config(format!("unknown tensor projector `{other}`"))),
    }
}

impl Projector {
    /// Parses `l2`, `ritz:q`, `q`, `reduced:parity:variant`, `tensor:kind`,
    /// `mapped:kind:map` and `multipatch`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::Config(format!("invalid projector `{s}`"));
        match parts.as_slice() {
            ["l2"] => Ok(Projector::L2),
            ["ritz", q] => Ok(Projector::Ritz(q.parse().map_err(|_| bad())?)),
            ["q"] => Ok(Projector::Q),
            ["reduced", parity, variant] => {
                let parity = match *parity {
                    "even" => Parity::Even,
                    "odd" => Parity::Odd,
                    _ => return Err(bad()),
                };
                let variant = match *variant {
                    "strict" => Variant::Strict,
                    "bar" => Variant::Bar,
                    _ => return Err(bad()),
                };
                Ok(Projector::Reduced(parity, variant))
            }
            ["tensor", k] => Ok(Projector::Tensor(kind(k)?)),
            ["mapped", k, map] => {
                if !MAP_CATALOG.contains(map) {
                    return Err(Error::UnknownId((*map).to_string()));
                }
                Ok(Projector::Mapped(kind(k)?, (*map).to_string()))
            }
            ["multipatch"] | ["multipatch", "two-patch-square"] => Ok(Projector::MultiPatch),
            _ => Err(bad()),
        }
    }

    pub fn is_bivariate(&self) -> bool {
        matches!(self, Projector::Tensor(_) | Projector::Mapped(..) | Projector::MultiPatch)
    }

    /// Order of the orthogonality relation, reported in the `q` column.
    pub fn order(&self) -> usize {
        match self {
            Projector::L2 | Projector::Tensor(ProjectorKind::L2) | Projector::Mapped(ProjectorKind::L2, _) => 0,
            Projector::Ritz(q) => *q,
            _ => 1,
        }
    }
}

fn unit_domain() -> [f64; 2] {
    [0.0, 1.0]
}

fn zero_ell() -> Vec<Ell> {
    vec![Ell::One(0)]
}

/// One experiment as read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Interval `(a, b)`; bivariate projectors use the unit square.
    #[serde(default = "unit_domain")]
    pub domain: [f64; 2],
    pub degrees: Vec<DegreeSpec>,
    /// Numbers of interior knots of the uniform meshes.
    #[serde(default)]
    pub schedule: Vec<usize>,
    /// Explicit break points including the end points; replaces `schedule`.
    #[serde(default)]
    pub knots: Option<Vec<f64>>,
    pub projector: String,
    pub target: TargetSpec,
    pub r: Vec<usize>,
    #[serde(default = "zero_ell")]
    pub ell: Vec<Ell>,
    #[serde(default)]
    pub bound: BoundKind,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn projector(&self) -> Result<Projector> {
        Projector::parse(&self.projector)
    }

    /// Schema checks beyond what serde enforces; all ids must resolve.
    pub fn validate(&self) -> Result<()> {
        let proj = self.projector()?;
        self.target.build()?;
        let [a, b] = self.domain;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::Config(format!("invalid domain ({a}, {b})")));
        }
        if proj.is_bivariate() && self.domain != unit_domain() {
            return Err(Error::Config("bivariate projectors act on the unit square".into()));
        }
        if self.degrees.is_empty() || self.r.is_empty() || self.ell.is_empty() {
            return Err(Error::Config("degrees, r and ell must be non-empty".into()));
        }
        for e in &self.ell {
            if matches!(e, Ell::Pair(_)) != proj.is_bivariate() {
                return Err(Error::Config(format!(
                    "ell `{e}` does not match the dimension of `{}`",
                    self.projector
                )));
            }
        }
        match (&self.knots, self.schedule.is_empty()) {
            (Some(_), false) => Err(Error::Config("give either schedule or knots".into())),
            (None, true) => Err(Error::Config("schedule must be non-empty".into())),
            _ => {
                self.meshes()?;
                Ok(())
            }
        }
    }

    /// The knot sequences of the experiment, in schedule order.
    pub fn meshes(&self) -> Result<Vec<KnotSequence>> {
        let [a, b] = self.domain;
        let mesh = |r: Result<KnotSequence>| r.map_err(|e| Error::Config(format!("knots: {e}")));
        match &self.knots {
            Some(k) => {
                let seq = mesh(KnotSequence::new(k.clone()))?;
                if seq.a() != a || seq.b() != b {
                    return Err(Error::Config("explicit knots must span the domain".into()));
                }
                Ok(vec![seq])
            }
            None => self.schedule.iter().map(|&n| mesh(KnotSequence::uniform(a, b, n))).collect(),
        }
    }

    /// The target as a field: itself for univariate projectors, the product
    /// `u(x) u(y)` otherwise.
    pub fn field(&self) -> Result<FieldFunction> {
        let u = self.target.build()?;
        Ok(FieldFunction::separable(vec![u.clone(), u]))
    }
}
