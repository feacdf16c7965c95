use super::space::SplineSpace;
use crate::error::{Error, Result};

/// A spline `s = Σ c_i B_i` over a [`SplineSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct SplineFunction {
    space: SplineSpace,
    coeffs: Vec<f64>,
}

impl SplineFunction {
    pub fn new(space: SplineSpace, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: coeffs.len(),
            });
        }
        Ok(Self { space, coeffs })
    }

    pub fn zero(space: SplineSpace) -> Self {
        let n = space.dim();
        Self {
            space,
            coeffs: vec![0.0; n],
        }
    }

    pub fn space(&self) -> &SplineSpace {
        &self.space
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// `d`-th derivative at `x` (right limit at interior break points).
    pub fn eval(&self, x: f64, d: usize) -> Result<f64> {
        if d > self.space.degree() {
            self.space.knots().element_of(x)?;
            return Ok(0.0);
        }
        let (first, vals) = self.space.eval_basis(x, d)?;
        Ok(dot(&self.coeffs[first..], &vals))
    }

    /// `d`-th derivative of the polynomial piece on element `elem` at `x`.
    pub fn eval_on_element(&self, elem: usize, x: f64, d: usize) -> Result<f64> {
        if d > self.space.degree() {
            return Ok(0.0);
        }
        let (first, mut ders) = self.space.eval_on_element(elem, x, d)?;
        Ok(dot(&self.coeffs[first..], &ders.swap_remove(d)))
    }

    /// Left and right limits of the `d`-th derivative at interior break
    /// point `j` (1-based, as in `ξ_j`).
    pub fn one_sided(&self, j: usize, d: usize) -> Result<(f64, f64)> {
        let x = self.space.knots().breaks()[j];
        Ok((self.eval_on_element(j - 1, x, d)?, self.eval_on_element(j, x, d)?))
    }

    /// Exact derivative as a spline of degree `p-1` and smoothness `k-1`.
    pub fn derivative(&self) -> Result<SplineFunction> {
        let dspace = self.space.derivative_space()?;
        let p = self.space.degree() as f64;
        let t = self.space.knot_vector();
        let pd = self.space.degree();
        let coeffs = (1..self.coeffs.len())
            .map(|i| p * (self.coeffs[i] - self.coeffs[i - 1]) / (t[i + pd] - t[i]))
            .collect();
        SplineFunction::new(dspace, coeffs)
    }

    /// The spline `x ↦ value_at_a + ∫_a^x g` for `g` in the derivative space
    /// of `space`. Exact coefficient recurrence, no quadrature.
    pub fn antiderivative(space: &SplineSpace, g: &SplineFunction, value_at_a: f64) -> Result<Self> {
        let dspace = space.derivative_space()?;
        if g.space() != &dspace {
            return Err(Error::InvalidData(
                "antiderivative data must live in the derivative space".into(),
            ));
        }
        let p = space.degree();
        let t = space.knot_vector();
        let mut coeffs = Vec::with_capacity(space.dim());
        coeffs.push(value_at_a);
        for (i, &gi) in g.coeffs().iter().enumerate() {
            let i = i + 1;
            let prev = coeffs[i - 1];
            coeffs.push(prev + gi * (t[i + p] - t[i]) / p as f64);
        }
        SplineFunction::new(space.clone(), coeffs)
    }

    /// Embeds a polynomial `Σ c_m x^m` (monomial coefficients) of degree at
    /// most `p` exactly, using the blossom (Marsden's identity): the
    /// coefficient of `B_i` is `Σ_m c_m e_m(t_{i+1..i+p}) / binom(p, m)`.
    pub fn from_polynomial(space: &SplineSpace, poly: &[f64]) -> Result<Self> {
        let p = space.degree();
        let degree = poly
            .iter()
            .rposition(|&c| c != 0.0)
            .unwrap_or(0);
        if degree > p {
            return Err(Error::DegreeTooHigh { degree, p });
        }
        let t = space.knot_vector();
        let binom = binomials(p);
        let coeffs = (0..space.dim())
            .map(|i| {
                let e = elementary_symmetric(&t[i + 1..i + 1 + p]);
                poly.iter()
                    .enumerate()
                    .take(p + 1)
                    .map(|(m, &c)| c * e[m] / binom[m])
                    .sum()
            })
            .collect();
        SplineFunction::new(space.clone(), coeffs)
    }

    /// The same function expressed on the space with break point `x`
    /// added, by repeated knot insertion.
    pub fn insert_break(&self, x: f64) -> Result<Self> {
        let target = self.space.with_break(x)?;
        let p = self.space.degree();
        let mut t = self.space.knot_vector().to_vec();
        let mut c = self.coeffs.clone();
        for _ in 0..self.space.multiplicity() {
            let span = t.partition_point(|&v| v <= x) - 1;
            let mut next = Vec::with_capacity(c.len() + 1);
            for i in 0..=c.len() {
                let v = if i + p <= span {
                    c[i]
                } else if i > span {
                    c[i - 1]
                } else {
                    let alpha = (x - t[i]) / (t[i + p] - t[i]);
                    alpha * c[i] + (1.0 - alpha) * c[i - 1]
                };
                next.push(v);
            }
            t.insert(span + 1, x);
            c = next;
        }
        debug_assert_eq!(t.as_slice(), target.knot_vector());
        SplineFunction::new(target, c)
    }

    pub fn scaled_add(&self, alpha: f64, other: &SplineFunction) -> Result<SplineFunction> {
        if self.space != other.space {
            return Err(Error::InvalidData("splines live in different spaces".into()));
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + alpha * b)
            .collect();
        SplineFunction::new(self.space.clone(), coeffs)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `e_0..e_n` of the given values.
fn elementary_symmetric(values: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; values.len() + 1];
    e[0] = 1.0;
    for (n, &v) in values.iter().enumerate() {
        for m in (1..=n + 1).rev() {
            e[m] += v * e[m - 1];
        }
    }
    e
}

fn binomials(n: usize) -> Vec<f64> {
    let mut row = vec![1.0; n + 1];
    for m in 1..n {
        row[m] = row[m - 1] * (n - m + 1) as f64 / m as f64;
    }
    row
}
