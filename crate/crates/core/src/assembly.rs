use crate::error::{Error, Result};
use crate::linalg::BandedSymMatrix;
use crate::quadrature::{gauss_legendre, shifted_legendre};
use crate::spline::{KnotSequence, SplineSpace};
use crate::target::TestFunction;
use nalgebra::DMatrix;

/// Extra Gauss points per piece for load vectors of non-polynomial data.
pub const DEFAULT_OVERSAMPLE: usize = 12;

/// Integration pieces `(element, left, right)`: the elements of `knots`
/// split further at the given extra break points.
pub fn pieces(knots: &KnotSequence, extra: &[f64]) -> Vec<(usize, f64, f64)> {
    let mut out = Vec::with_capacity(knots.n_elements() + extra.len());
    for (j, (l, r)) in knots.elements().enumerate() {
        let mut left = l;
        for &x in extra.iter().filter(|&&x| x > l && x < r) {
            out.push((j, left, x));
            left = x;
        }
        out.push((j, left, r));
    }
    out
}

/// Quadrature points with their owning element, for evaluating functionals.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PointRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    pub elements: Vec<usize>,
}

impl PointRule {
    /// `n` Gauss points per piece on the elements of `space`, split at `extra`.
    pub fn composite(knots: &KnotSequence, extra: &[f64], n: usize) -> Result<Self> {
        let g = gauss_legendre(n)?;
        let mut rule = PointRule::default();
        for (elem, l, r) in pieces(knots, extra) {
            for (x, w) in g.mapped(l, r) {
                rule.points.push(x);
                rule.weights.push(w);
                rule.elements.push(elem);
            }
        }
        Ok(rule)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Highest derivative order whose Gram matrix is a conforming inner product.
pub fn max_conforming_order(space: &SplineSpace) -> usize {
    space.degree().min((space.smoothness() + 1) as usize)
}

/// Band matrix of `∫ ∂^ℓ B_i ∂^ℓ B_j`, exact with `p+1` Gauss points per
/// element.
pub fn assemble_gram(space: &SplineSpace, ell: usize) -> Result<BandedSymMatrix> {
    let max = max_conforming_order(space);
    if ell > max {
        return Err(Error::NonconformingOrder { order: ell, max });
    }
    let p = space.degree();
    let g = gauss_legendre(p + 1)?;
    let mut m = BandedSymMatrix::zeros(space.dim(), p);
    for (elem, (l, r)) in space.knots().elements().enumerate() {
        for (x, w) in g.mapped(l, r) {
            let (first, ders) = space.eval_on_element(elem, x, ell)?;
            let v = &ders[ell];
            for a in 0..=p {
                for b in 0..=a {
                    m.add(first + a, first + b, w * v[a] * v[b]);
                }
            }
        }
    }
    Ok(m)
}

/// Load vector `(∂^ℓ u, ∂^ℓ B_i)` with `p+1+oversample` points per piece,
/// pieces split at the break points of `u`.
pub fn assemble_load(
    space: &SplineSpace,
    u: &TestFunction,
    ell: usize,
    oversample: usize,
) -> Result<Vec<f64>> {
    u.require(ell)?;
    if ell > space.degree() {
        return Err(Error::DerivativeOrder {
            order: ell,
            max: space.degree(),
        });
    }
    let rule = PointRule::composite(space.knots(), u.breakpoints(), space.degree() + 1 + oversample)?;
    let mut b = vec![0.0; space.dim()];
    for ((&x, &w), &elem) in rule.points.iter().zip(&rule.weights).zip(&rule.elements) {
        let f = u.eval(x, ell)?;
        let (first, ders) = space.eval_on_element(elem, x, ell)?;
        for (a, v) in ders[ell].iter().enumerate() {
            b[first + a] += w * f * v;
        }
    }
    Ok(b)
}

/// Dense `dim × points` matrix `W` with `W[i][j] = w_j ∂^ℓ B_i(x_j)`, so that
/// the load vector of data sampled at the rule points is `W f`.
pub fn load_matrix(space: &SplineSpace, rule: &PointRule, ell: usize) -> Result<DMatrix<f64>> {
    let mut w = DMatrix::zeros(space.dim(), rule.len());
    for (j, ((&x, &wt), &elem)) in rule
        .points
        .iter()
        .zip(&rule.weights)
        .zip(&rule.elements)
        .enumerate()
    {
        let (first, ders) = space.eval_on_element(elem, x, ell)?;
        for (a, v) in ders[ell].iter().enumerate() {
            w[(first + a, j)] = wt * v;
        }
    }
    Ok(w)
}

/// Rows `(B_i, P_j)` for the first `m` Legendre polynomials shifted to
/// `(a, b)`.
pub fn moment_matrix(space: &SplineSpace, m: usize) -> Result<DMatrix<f64>> {
    let (a, b) = (space.a(), space.b());
    let g = gauss_legendre(space.degree() + m + 1)?;
    let mut c = DMatrix::zeros(m, space.dim());
    for (elem, (l, r)) in space.knots().elements().enumerate() {
        for (x, w) in g.mapped(l, r) {
            let (first, ders) = space.eval_on_element(elem, x, 0)?;
            for j in 0..m {
                let pj = shifted_legendre(j, a, b, x);
                for (i, v) in ders[0].iter().enumerate() {
                    c[(j, first + i)] += w * pj * v;
                }
            }
        }
    }
    Ok(c)
}

/// `(u, P_j)` for the first `m` shifted Legendre polynomials.
pub fn moment_rhs(space: &SplineSpace, u: &TestFunction, m: usize, oversample: usize) -> Result<Vec<f64>> {
    let (a, b) = (space.a(), space.b());
    let rule = PointRule::composite(space.knots(), u.breakpoints(), space.degree() + m + 1 + oversample)?;
    Ok((0..m)
        .map(|j| rule.integrate(|x| u.value(x) * shifted_legendre(j, a, b, x)))
        .collect())
}
