use crate::error::{Error, Result};
use crate::spline::SplineFunction;
use std::fmt;
use std::sync::Arc;

type Evaluator = Arc<dyn Fn(f64, usize) -> f64 + Send + Sync>;
type Seminorm = Arc<dyn Fn(usize, f64, f64) -> Option<f64> + Send + Sync>;

/// A univariate target `u` with derivatives up to `max_order`.
///
/// Break points mark where the highest derivatives may jump; quadrature
/// splits pieces there. An optional closed form returns `‖∂^r u‖_{L²(a,b)}`.
#[derive(Clone)]
pub struct TestFunction {
    name: String,
    eval: Evaluator,
    max_order: usize,
    breakpoints: Vec<f64>,
    seminorm: Option<Seminorm>,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("name", &self.name)
            .field("max_order", &self.max_order)
            .field("breakpoints", &self.breakpoints)
            .finish()
    }
}

impl TestFunction {
    /// `f(x, d)` must return the `d`-th derivative for `d <= max_order`.
    pub fn new(
        name: impl Into<String>,
        max_order: usize,
        f: impl Fn(f64, usize) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            eval: Arc::new(f),
            max_order,
            breakpoints: Vec::new(),
            seminorm: None,
        }
    }

    pub fn with_breakpoints(mut self, mut breaks: Vec<f64>) -> Self {
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        self.breakpoints = breaks;
        self
    }

    pub fn with_seminorm(
        mut self,
        f: impl Fn(usize, f64, f64) -> Option<f64> + Send + Sync + 'static,
    ) -> Self {
        self.seminorm = Some(Arc::new(f));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.eval)(x, 0)
    }

    pub fn eval(&self, x: f64, order: usize) -> Result<f64> {
        self.require(order)?;
        Ok((self.eval)(x, order))
    }

    pub fn require(&self, order: usize) -> Result<()> {
        if order > self.max_order {
            return Err(Error::MissingDerivative {
                requested: order,
                available: self.max_order,
            });
        }
        Ok(())
    }

    /// Closed-form `‖∂^r u‖` on `(a, b)` when available.
    pub fn exact_seminorm(&self, order: usize, a: f64, b: f64) -> Option<f64> {
        if order > self.max_order {
            return None;
        }
        self.seminorm.as_ref().and_then(|f| f(order, a, b))
    }

    pub fn constant(c: f64) -> Self {
        Self::polynomial(&[c])
    }

    /// `Σ c_m x^m`, all derivatives exact.
    pub fn polynomial(coeffs: &[f64]) -> Self {
        let coeffs = coeffs.to_vec();
        Self::new("poly", usize::MAX, move |x, d| poly_derivative(&coeffs, x, d))
    }

    /// A spline as a target; derivatives beyond the degree vanish piecewise.
    pub fn from_spline(s: SplineFunction) -> Self {
        let breaks = s.space().knots().interior().to_vec();
        let max = s.space().degree() + 1;
        Self::new("spline", max, move |x, d| s.eval(x, d).unwrap_or(f64::NAN))
            .with_breakpoints(breaks)
    }

    /// `∂u` as a target of its own.
    pub fn derivative(&self) -> Result<Self> {
        self.require(1)?;
        let inner = self.eval.clone();
        let semi = self.seminorm.clone();
        let mut d = Self::new(
            format!("d({})", self.name),
            self.max_order.saturating_sub(1),
            move |x, o| inner(x, o + 1),
        )
        .with_breakpoints(self.breakpoints.clone());
        if let Some(f) = semi {
            d = d.with_seminorm(move |r, a, b| f(r + 1, a, b));
        }
        Ok(d)
    }

    /// `x ↦ u(α + β x)`; used for edge restrictions and reflections.
    pub fn affine_pullback(&self, alpha: f64, beta: f64) -> Self {
        let inner = self.eval.clone();
        let breaks = self
            .breakpoints
            .iter()
            .map(|&t| (t - alpha) / beta)
            .collect();
        Self::new(self.name.clone(), self.max_order, move |x, d| {
            beta.powi(d as i32) * inner(alpha + beta * x, d)
        })
        .with_breakpoints(breaks)
    }
}

/// `d`-th derivative of `Σ c_m x^m` at `x`.
pub fn poly_derivative(coeffs: &[f64], x: f64, d: usize) -> f64 {
    if d >= coeffs.len() {
        return 0.0;
    }
    let mut acc = 0.0;
    for m in (d..coeffs.len()).rev() {
        let falling: f64 = ((m - d + 1)..=m).map(|v| v as f64).product();
        acc = acc * x + coeffs[m] * falling;
    }
    acc
}
