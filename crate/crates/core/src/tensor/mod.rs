//! Tensor-product spline spaces, their L2, Ritz and boundary-interpolating
//! projectors, and the corresponding error bounds.

mod field;
mod operator;

pub use field::FieldFunction;
pub use operator::{Channel, ProjectorKind, ProjectorMatrix};

use crate::assembly::pieces;
use crate::constants::c_hpkr_value;
use crate::error::{Error, Result};
use crate::projection::ERROR_NORM_EXTRA_POINTS;
use crate::quadrature::gauss_legendre;
use crate::spline::{KnotSequence, SplineSpace};
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

/// `S_1 ⊗ ⋯ ⊗ S_d`; coefficients are stored with the last index fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorSpace {
    spaces: Vec<SplineSpace>,
}

/// Row-major multi-index of `flat` in `shape`.
pub(crate) fn unravel(mut flat: usize, shape: &[usize]) -> Vec<usize> {
    let mut idx = vec![0; shape.len()];
    for (slot, &n) in idx.iter_mut().zip(shape).rev() {
        *slot = flat % n;
        flat /= n;
    }
    idx
}

fn ravel(idx: &[usize], shape: &[usize]) -> usize {
    idx.iter().zip(shape).fold(0, |acc, (&i, &n)| acc * n + i)
}

impl TensorSpace {
    pub fn new(spaces: Vec<SplineSpace>) -> Result<Self> {
        if spaces.is_empty() {
            return Err(Error::InvalidData("a tensor space needs at least one direction".into()));
        }
        Ok(Self { spaces })
    }

    /// `d` copies of `S^k_p` on `N` uniform interior knots of `(0, 1)`.
    pub fn uniform(d: usize, n: usize, p: usize, k: i32) -> Result<Self> {
        let s = SplineSpace::new(KnotSequence::uniform(0.0, 1.0, n)?, p, k)?;
        Self::new(vec![s; d])
    }

    pub fn spaces(&self) -> &[SplineSpace] {
        &self.spaces
    }

    pub fn space(&self, axis: usize) -> &SplineSpace {
        &self.spaces[axis]
    }

    pub fn n_dims(&self) -> usize {
        self.spaces.len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.spaces.iter().map(|s| s.dim()).collect()
    }

    /// Product of the univariate dimensions.
    pub fn dim(&self) -> usize {
        self.shape().iter().product()
    }

    /// `max_i h_i`.
    pub fn h(&self) -> f64 {
        self.spaces.iter().map(|s| s.knots().h()).fold(0.0, f64::max)
    }

    pub fn elements_of(&self, x: &[f64]) -> Result<Vec<usize>> {
        self.check_len(x.len())?;
        self.spaces
            .iter()
            .zip(x)
            .map(|(s, &xi)| s.knots().element_of(xi))
            .collect()
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if n != self.n_dims() {
            return Err(Error::DimensionMismatch {
                expected: self.n_dims(),
                found: n,
            });
        }
        Ok(())
    }
}

/// Element of a [`TensorSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct TensorFunction {
    space: TensorSpace,
    coeffs: Vec<f64>,
}

impl TensorFunction {
    pub fn new(space: TensorSpace, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: coeffs.len(),
            });
        }
        Ok(Self { space, coeffs })
    }

    /// Kronecker product of univariate coefficient vectors.
    pub fn from_factors(space: TensorSpace, factors: &[Vec<f64>]) -> Result<Self> {
        space.check_len(factors.len())?;
        let shape = space.shape();
        for (f, &n) in factors.iter().zip(&shape) {
            if f.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: f.len(),
                });
            }
        }
        let coeffs = (0..space.dim())
            .map(|flat| {
                unravel(flat, &shape)
                    .iter()
                    .zip(factors)
                    .map(|(&i, f)| f[i])
                    .product()
            })
            .collect();
        Self::new(space, coeffs)
    }

    pub fn space(&self) -> &TensorSpace {
        &self.space
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, x: &[f64], orders: &[usize]) -> Result<f64> {
        let elems = self.space.elements_of(x)?;
        self.eval_on_element(&elems, x, orders)
    }

    /// Partial derivative of the polynomial piece on the element with
    /// indices `elems` (one-sided limits on element boundaries). Orders
    /// above the degree give zero.
    pub fn eval_on_element(&self, elems: &[usize], x: &[f64], orders: &[usize]) -> Result<f64> {
        self.space.check_len(x.len())?;
        self.space.check_len(orders.len())?;
        let mut locals = Vec::with_capacity(x.len());
        for (((s, &e), &xi), &o) in self.space.spaces.iter().zip(elems).zip(x).zip(orders) {
            if o > s.degree() {
                return Ok(0.0);
            }
            let (first, mut ders) = s.eval_on_element(e, xi, o)?;
            locals.push((first, ders.swap_remove(o)));
        }
        let shape = self.space.shape();
        let local_shape: Vec<usize> = locals.iter().map(|(_, v)| v.len()).collect();
        let n_local: usize = local_shape.iter().product();
        let mut sum = 0.0;
        for f in 0..n_local {
            let loc = unravel(f, &local_shape);
            let mut w = 1.0;
            let mut idx = Vec::with_capacity(loc.len());
            for ((first, vals), &a) in locals.iter().zip(&loc) {
                w *= vals[a];
                idx.push(first + a);
            }
            sum += w * self.coeffs[ravel(&idx, &shape)];
        }
        Ok(sum)
    }
}

/// Applies `m` along `axis` of the row-major array `data` with `shape`.
fn mode_product(data: &[f64], shape: &[usize], axis: usize, m: &DMatrix<f64>) -> Vec<f64> {
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let n = shape[axis];
    let rows = m.nrows();
    let mut out = vec![0.0; outer * rows * inner];
    for o in 0..outer {
        for j in 0..n {
            let src = &data[(o * n + j) * inner..(o * n + j + 1) * inner];
            for i in 0..rows {
                let mij = m[(i, j)];
                if mij == 0.0 {
                    continue;
                }
                let dst = &mut out[(o * rows + i) * inner..(o * rows + i + 1) * inner];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += mij * s;
                }
            }
        }
    }
    out
}

/// Tensor-product projection `Π_1 ⊗ ⋯ ⊗ Π_d` with the same univariate
/// family in every direction.
///
/// Each univariate projector is a sum of matrices acting on sampled
/// derivative data, so the tensor projector needs the mixed partials
/// `∂^{o_1}_1 ⋯ ∂^{o_d}_d u` for every combination of channel orders.
pub fn tensor_project(tspace: &TensorSpace, u: &FieldFunction, kind: ProjectorKind) -> Result<TensorFunction> {
    tspace.check_len(u.dim())?;
    u.require(&vec![kind.data_order(); u.dim()])?;
    let ops = tspace
        .spaces
        .iter()
        .enumerate()
        .map(|(i, s)| ProjectorMatrix::build(s, kind, u.breakpoints(i)))
        .collect::<Result<Vec<_>>>()?;
    let counts: Vec<usize> = ops.iter().map(|o| o.channels().len()).collect();
    let mut coeffs = vec![0.0; tspace.dim()];
    for combo in 0..counts.iter().product() {
        let chans: Vec<&Channel> = unravel(combo, &counts)
            .iter()
            .zip(&ops)
            .map(|(&c, op)| &op.channels()[c])
            .collect();
        let orders: Vec<usize> = chans.iter().map(|c| c.order).collect();
        let mut shape: Vec<usize> = chans.iter().map(|c| c.points.len()).collect();
        let mut data = (0..shape.iter().product())
            .into_par_iter()
            .map(|flat| {
                let x: Vec<f64> = unravel(flat, &shape)
                    .iter()
                    .zip(&chans)
                    .map(|(&i, c)| c.points[i])
                    .collect();
                u.eval(&x, &orders)
            })
            .collect::<Result<Vec<f64>>>()?;
        for (axis, c) in chans.iter().enumerate() {
            data = mode_product(&data, &shape, axis, &c.matrix);
            shape[axis] = c.matrix.nrows();
        }
        for (acc, v) in coeffs.iter_mut().zip(data) {
            *acc += v;
        }
    }
    TensorFunction::new(tspace.clone(), coeffs)
}

/// L2-projection onto a tensor space of any dimension.
pub fn tensor_l2_project(tspace: &TensorSpace, u: &FieldFunction) -> Result<TensorFunction> {
    tensor_project(tspace, u, ProjectorKind::L2)
}

/// `R¹ ⊗ R¹`; needs `k_i >= 0` and the mixed first partials of `u`.
pub fn tensor_ritz_project(tspace: &TensorSpace, u: &FieldFunction) -> Result<TensorFunction> {
    tensor_project(tspace, u, ProjectorKind::Ritz)
}

/// `Q ⊗ Q`; interpolates `u` at the corners and reduces to the univariate
/// `Q` projection on every boundary edge.
pub fn tensor_q_project(tspace: &TensorSpace, u: &FieldFunction) -> Result<TensorFunction> {
    tensor_project(tspace, u, ProjectorKind::Q)
}

/// Per-axis tensor Gauss rule `(element, x, w)` on the pieces of the space
/// split at the target's break points.
pub(crate) fn axis_rules(tspace: &TensorSpace, u: &FieldFunction, points: impl Fn(usize) -> usize) -> Result<Vec<Vec<(usize, f64, f64)>>> {
    tspace
        .spaces
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let g = gauss_legendre(points(s.degree()))?;
            Ok(pieces(s.knots(), u.breakpoints(i))
                .into_iter()
                .flat_map(|(e, l, r)| g.mapped(l, r).map(move |(x, w)| (e, x, w)).collect::<Vec<_>>())
                .collect())
        })
        .collect()
}

/// `Σ_j w_j f(e_j, x_j)` over the tensor rule, summed in a fixed order.
pub(crate) fn integrate_box(
    rules: &[Vec<(usize, f64, f64)>],
    f: impl Fn(&[usize], &[f64]) -> Result<f64> + Sync,
) -> Result<f64> {
    let shape: Vec<usize> = rules.iter().map(|r| r.len()).collect();
    let rest: usize = shape[1..].iter().product();
    let partial = (0..shape[0])
        .into_par_iter()
        .map(|i0| {
            let mut sum = 0.0;
            let mut elems = vec![0; shape.len()];
            let mut x = vec![0.0; shape.len()];
            for f_rest in 0..rest {
                let mut idx = vec![i0];
                idx.extend(unravel(f_rest, &shape[1..]));
                let mut w = 1.0;
                for (a, &i) in idx.iter().enumerate() {
                    let (e, xi, wi) = rules[a][i];
                    elems[a] = e;
                    x[a] = xi;
                    w *= wi;
                }
                sum += w * f(&elems, &x)?;
            }
            Ok(sum)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(partial.iter().sum())
}

/// `‖∂^orders (u − s)‖_{L²(Ω)}` by tensor Gauss quadrature.
pub fn tensor_error_norm(u: &FieldFunction, s: &TensorFunction, orders: &[usize]) -> Result<f64> {
    u.require(orders)?;
    let rules = axis_rules(s.space(), u, |p| p + 1 + ERROR_NORM_EXTRA_POINTS)?;
    let sq = integrate_box(&rules, |e, x| {
        let d = u.eval(x, orders)? - s.eval_on_element(e, x, orders)?;
        Ok(d * d)
    })?;
    Ok(sq.sqrt())
}

/// `‖∂^orders u‖_{L²(Ω)}`: factorwise for separable targets, otherwise
/// 24-point Gauss per piece in each direction.
pub fn tensor_seminorm(u: &FieldFunction, orders: &[usize], tspace: &TensorSpace) -> Result<f64> {
    u.require(orders)?;
    tspace.check_len(orders.len())?;
    let knots: Vec<&KnotSequence> = tspace.spaces.iter().map(|s| s.knots()).collect();
    if let Some(v) = u.separable_seminorm(orders, &knots) {
        return v;
    }
    let rules = axis_rules(tspace, u, |_| 24)?;
    let sq = integrate_box(&rules, |_, x| {
        let v = u.eval(x, orders)?;
        Ok(v * v)
    })?;
    Ok(sq.sqrt())
}

/// `Σ_i C_{h_i,p_i,k_i,r} ‖∂_i^r u‖`, the L2 bound on a tensor space;
/// `seminorms[i] = ‖∂_i^r u‖`.
pub fn tensor_l2_bound(tspace: &TensorSpace, r: usize, seminorms: &[f64]) -> Result<f64> {
    tspace.check_len(seminorms.len())?;
    tspace
        .spaces
        .iter()
        .zip(seminorms)
        .map(|(s, &v)| {
            let k = s.knots();
            Ok(c_hpkr_value(k.h(), s.degree(), s.smoothness(), r, k.length())? * v)
        })
        .sum()
}

/// The four seminorms entering the bivariate Ritz and Q bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixedSeminorms {
    /// `‖∂_1^r u‖`
    pub d1r: f64,
    /// `‖∂_2^r u‖`
    pub d2r: f64,
    /// `‖∂_1 ∂_2^{r-1} u‖`
    pub d1_d2r1: f64,
    /// `‖∂_1^{r-1} ∂_2 u‖`
    pub d1r1_d2: f64,
}

impl MixedSeminorms {
    pub fn measure(u: &FieldFunction, tspace: &TensorSpace, r: usize) -> Result<Self> {
        if r < 2 {
            return Err(Error::precondition("sobolev-order", format!("need r >= 2, got {r}")));
        }
        Ok(Self {
            d1r: tensor_seminorm(u, &[r, 0], tspace)?,
            d2r: tensor_seminorm(u, &[0, r], tspace)?,
            d1_d2r1: tensor_seminorm(u, &[1, r - 1], tspace)?,
            d1r1_d2: tensor_seminorm(u, &[r - 1, 1], tspace)?,
        })
    }
}

/// Bound on `‖∂_1^{ℓ_1} ∂_2^{ℓ_2}(u − R u)‖` for the bivariate first-order
/// Ritz projection (the same bound holds for `Q ⊗ Q`), `ℓ_i ∈ {0, 1}`.
///
/// Built from `C_{h_i, p_i-1, k_i-1, s}` on the derivative spaces. Needs
/// `r >= 2`, `k_i >= 0` and `p_i >= r - 1`.
pub fn tensor_ritz_bound(tspace: &TensorSpace, r: usize, sem: &MixedSeminorms, ell: [usize; 2]) -> Result<f64> {
    if tspace.n_dims() != 2 {
        return Err(Error::precondition(
            "two-dimensional",
            format!("the Ritz bound is bivariate, got d = {}", tspace.n_dims()),
        ));
    }
    if r < 2 {
        return Err(Error::precondition("sobolev-order", format!("need r >= 2, got {r}")));
    }
    if let Some(&l) = ell.iter().find(|&&l| l > 1) {
        return Err(Error::DerivativeOrder { order: l, max: 1 });
    }
    for s in &tspace.spaces {
        if s.smoothness() < 0 {
            return Err(Error::precondition(
                "ritz-order",
                format!("need k_i >= 0, got k = {}", s.smoothness()),
            ));
        }
        if s.degree() + 1 < r {
            return Err(Error::precondition(
                "ritz-degree",
                format!("need p_i >= r - 1, got p = {}, r = {r}", s.degree()),
            ));
        }
    }
    let c = |i: usize, order: usize| -> Result<f64> {
        if order == 0 {
            return Ok(1.0);
        }
        let s = &tspace.spaces[i];
        let k = s.knots();
        c_hpkr_value(k.h(), s.degree() - 1, s.smoothness() - 1, order, k.length())
    };
    Ok(match ell {
        [0, 0] => {
            c(0, 1)? * c(0, r - 1)? * sem.d1r
                + c(1, 1)? * c(1, r - 1)? * sem.d2r
                + c(0, 1)? * c(1, 1)? * (c(1, r - 2)? * sem.d1_d2r1).min(c(0, r - 2)? * sem.d1r1_d2)
        }
        [1, 0] => c(0, r - 1)? * sem.d1r + c(1, 1)? * c(1, r - 2)? * sem.d1_d2r1,
        [0, 1] => c(0, 1)? * c(0, r - 2)? * sem.d1r1_d2 + c(1, r - 1)? * sem.d2r,
        _ => c(0, r - 2)? * sem.d1r1_d2 + c(1, r - 2)? * sem.d1_d2r1,
    })
}
