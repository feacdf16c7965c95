use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;
use crate::spline::SplineSpace;
use nalgebra::DMatrix;
use serde::Serialize;

/// Smallest accepted number of composite quadrature nodes.
pub const MIN_GRID: usize = 200;

/// Gauss nodes per composite cell.
const CELL_POINTS: usize = 8;

/// Numerical estimate of `‖(I − Z) K^r‖` on `L²(a,b)`, where `K` integrates
/// from the left and `Z` is the L2-projection onto the spline space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantEstimate {
    pub p: usize,
    pub k: i32,
    pub r: usize,
    /// Number of composite quadrature nodes actually used.
    pub grid: usize,
    pub value: f64,
}

/// Lagrange basis polynomial `j` on `nodes`, evaluated at `s`.
fn lagrange(nodes: &[f64], j: usize, s: f64) -> f64 {
    nodes
        .iter()
        .enumerate()
        .filter(|&(m, _)| m != j)
        .map(|(_, &t)| (s - t) / (nodes[j] - t))
        .product()
}

/// Discretizes `K` by composite Gauss quadrature; on the cell containing the
/// output node the partial integral uses the Lagrange interpolant through the
/// cell's nodes, which keeps the full order of the rule.
pub fn estimate_constant(space: &SplineSpace, r: usize, grid: usize) -> Result<ConstantEstimate> {
    if grid < MIN_GRID {
        return Err(Error::Resolution {
            found: grid,
            min: MIN_GRID,
        });
    }
    let g = gauss_legendre(CELL_POINTS)?;
    let knots = space.knots();
    let n_el = knots.n_elements();
    let per_elem = grid.div_ceil(CELL_POINTS * n_el);

    // cells: (element, left, right)
    let mut cells = Vec::with_capacity(n_el * per_elem);
    for (e, (l, rr)) in knots.elements().enumerate() {
        for c in 0..per_elem {
            let cl = l + (rr - l) * c as f64 / per_elem as f64;
            let cr = if c + 1 == per_elem {
                rr
            } else {
                l + (rr - l) * (c + 1) as f64 / per_elem as f64
            };
            cells.push((e, cl, cr));
        }
    }
    let m = cells.len() * CELL_POINTS;
    let mut x = Vec::with_capacity(m);
    let mut w = Vec::with_capacity(m);
    let mut elem_of = Vec::with_capacity(m);
    for &(e, l, rr) in &cells {
        for (xi, wi) in g.mapped(l, rr) {
            x.push(xi);
            w.push(wi);
            elem_of.push(e);
        }
    }

    let mut kmat = DMatrix::<f64>::zeros(m, m);
    for (ci, &(_, l, _)) in cells.iter().enumerate() {
        let base = ci * CELL_POINTS;
        let local = &x[base..base + CELL_POINTS];
        for a in 0..CELL_POINTS {
            let i = base + a;
            for j in 0..base {
                kmat[(i, j)] = w[j];
            }
            for b in 0..CELL_POINTS {
                kmat[(i, base + b)] = g.integrate(l, x[i], |s| lagrange(local, b, s));
            }
        }
    }

    // T = D^{1/2} K^r D^{-1/2}
    let sq: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
    let mut kr = DMatrix::<f64>::identity(m, m);
    for _ in 0..r {
        kr = &kmat * kr;
    }
    let t = DMatrix::from_fn(m, m, |i, j| sq[i] * kr[(i, j)] / sq[j]);

    // orthonormal basis of the weighted sampled spline space
    let n = space.dim();
    let mut bmat = DMatrix::<f64>::zeros(m, n);
    for i in 0..m {
        let (first, ders) = space.eval_on_element(elem_of[i], x[i], 0)?;
        for (a, v) in ders[0].iter().enumerate() {
            bmat[(i, first + a)] = sq[i] * v;
        }
    }
    let q = bmat.qr().q();
    let s = &t - &q * (q.transpose() * &t);
    let value = s.singular_values().max();
    Ok(ConstantEstimate {
        p: space.degree(),
        k: space.smoothness(),
        r,
        grid: m,
        value,
    })
}
