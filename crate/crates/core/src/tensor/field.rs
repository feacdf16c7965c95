use crate::error::{Error, Result};
use crate::projection::seminorm;
use crate::spline::KnotSequence;
use crate::target::TestFunction;
use std::fmt;
use std::sync::Arc;

type FieldEval = Arc<dyn Fn(&[f64], &[usize]) -> f64 + Send + Sync>;

/// A target on a box in `d` dimensions with partial derivatives up to
/// `max_order` in each variable.
///
/// `f(x, orders)` must return `∂_1^{o_1}⋯∂_d^{o_d} u(x)`. Separable targets
/// keep their factors so seminorms can be taken factor by factor.
#[derive(Clone)]
pub struct FieldFunction {
    name: String,
    dim: usize,
    max_order: usize,
    eval: FieldEval,
    breakpoints: Vec<Vec<f64>>,
    factors: Option<Vec<TestFunction>>,
}

impl fmt::Debug for FieldFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldFunction")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("max_order", &self.max_order)
            .finish()
    }
}

impl FieldFunction {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        max_order: usize,
        f: impl Fn(&[f64], &[usize]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            dim,
            max_order,
            eval: Arc::new(f),
            breakpoints: vec![Vec::new(); dim],
            factors: None,
        }
    }

    /// `u(x) = Π_i f_i(x_i)`.
    pub fn separable(factors: Vec<TestFunction>) -> Self {
        let name = factors
            .iter()
            .map(|f| f.name().to_string())
            .collect::<Vec<_>>()
            .join("*");
        let max_order = factors.iter().map(|f| f.max_order()).min().unwrap_or(0);
        let breakpoints = factors.iter().map(|f| f.breakpoints().to_vec()).collect();
        let inner = factors.clone();
        let mut out = Self::new(name, factors.len(), max_order, move |x, o| {
            inner
                .iter()
                .zip(x.iter().zip(o))
                .map(|(f, (&xi, &oi))| f.eval(xi, oi).unwrap_or(f64::NAN))
                .product()
        });
        out.breakpoints = breakpoints;
        out.factors = Some(factors);
        out
    }

    pub fn with_breakpoints(mut self, axis: usize, mut breaks: Vec<f64>) -> Self {
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        self.breakpoints[axis] = breaks;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn breakpoints(&self, axis: usize) -> &[f64] {
        &self.breakpoints[axis]
    }

    pub fn factors(&self) -> Option<&[TestFunction]> {
        self.factors.as_deref()
    }

    pub fn require(&self, orders: &[usize]) -> Result<()> {
        if orders.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: orders.len(),
            });
        }
        if let Some(&o) = orders.iter().find(|&&o| o > self.max_order) {
            return Err(Error::MissingDerivative {
                requested: o,
                available: self.max_order,
            });
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64], orders: &[usize]) -> Result<f64> {
        self.require(orders)?;
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok((self.eval)(x, orders))
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        (self.eval)(x, &vec![0; self.dim])
    }

    /// The univariate function `t ↦ u(x)` with `x[axis] = t`.
    pub fn slice(&self, axis: usize, at: &[f64]) -> TestFunction {
        let inner = self.eval.clone();
        let base = at.to_vec();
        let dim = self.dim;
        TestFunction::new(format!("{}|{axis}", self.name), self.max_order, move |t, d| {
            let mut x = base.clone();
            x[axis] = t;
            let mut o = vec![0; dim];
            o[axis] = d;
            inner(&x, &o)
        })
        .with_breakpoints(self.breakpoints[axis].clone())
    }

    /// Closed-form `‖∂^orders u‖` over the box when the target is separable
    /// (product of univariate seminorms).
    pub(crate) fn separable_seminorm(&self, orders: &[usize], knots: &[&KnotSequence]) -> Option<Result<f64>> {
        let factors = self.factors.as_ref()?;
        Some(
            factors
                .iter()
                .zip(orders)
                .zip(knots)
                .map(|((f, &o), k)| seminorm(f, o, k))
                .product(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separable_product_rule() {
        let u = FieldFunction::separable(vec![
            TestFunction::polynomial(&[0.0, 1.0, 1.0]),
            TestFunction::polynomial(&[2.0, 0.0, 0.0, 1.0]),
        ]);
        let x = [0.5, 2.0];
        assert_eq!(u.eval(&x, &[0, 0]).unwrap(), 0.75 * 10.0);
        assert_eq!(u.eval(&x, &[1, 1]).unwrap(), 2.0 * 12.0);
        assert_eq!(u.eval(&x, &[2, 3]).unwrap(), 2.0 * 6.0);
    }

    #[test]
    fn slice_picks_one_variable() {
        let u = FieldFunction::new("xy2", 2, 4, |x, o| match (o[0], o[1]) {
            (0, 0) => x[0] * x[1] * x[1],
            (0, 1) => 2.0 * x[0] * x[1],
            (0, 2) => 2.0 * x[0],
            _ => 0.0,
        });
        let s = u.slice(1, &[3.0, 0.0]);
        assert_eq!(s.eval(2.0, 0).unwrap(), 12.0);
        assert_eq!(s.eval(2.0, 1).unwrap(), 12.0);
        assert_eq!(s.eval(2.0, 2).unwrap(), 6.0);
    }

    #[test]
    fn order_checks() {
        let u = FieldFunction::new("f", 2, 1, |_, _| 0.0);
        assert!(matches!(u.eval(&[0.0, 0.0], &[2, 0]), Err(Error::MissingDerivative { .. })));
        assert!(matches!(u.eval(&[0.0], &[0]), Err(Error::DimensionMismatch { .. })));
    }
}
