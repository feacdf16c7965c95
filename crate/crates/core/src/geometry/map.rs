use crate::error::{Error, Result};
use crate::spline::{KnotSequence, SplineSpace};
use crate::tensor::{tensor_l2_project, FieldFunction, TensorFunction, TensorSpace};

/// Parameterization `G: (0,1)² → Ω̃` of a physical domain.
///
/// Spline maps are piecewise polynomial; their derivatives are evaluated
/// per element (one-sided on element boundaries).
#[derive(Debug, Clone, PartialEq)]
pub enum GeometryMap {
    Identity,
    /// `G(x) = A x + b`.
    Affine { matrix: [[f64; 2]; 2], shift: [f64; 2] },
    /// Both components in the same tensor spline space on the unit square.
    Spline { components: [TensorFunction; 2] },
}

/// Names accepted by [`catalog_map`].
pub const MAP_CATALOG: [&str; 3] = ["identity", "affine", "quadratic-spline"];

fn unit_square(space: &TensorSpace) -> Result<()> {
    if space.n_dims() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: space.n_dims(),
        });
    }
    for s in space.spaces() {
        if s.a() != 0.0 || s.b() != 1.0 {
            return Err(Error::InvalidDomain { a: s.a(), b: s.b() });
        }
    }
    Ok(())
}

impl GeometryMap {
    pub fn spline(x: TensorFunction, y: TensorFunction) -> Result<Self> {
        unit_square(x.space())?;
        if x.space() != y.space() {
            return Err(Error::InvalidData("map components must share one spline space".into()));
        }
        Ok(GeometryMap::Spline { components: [x, y] })
    }

    /// Spline map obtained by L2-projecting the two component functions
    /// onto `space` (exact when they belong to it).
    pub fn project(space: &TensorSpace, x: &FieldFunction, y: &FieldFunction) -> Result<Self> {
        unit_square(space)?;
        Self::spline(tensor_l2_project(space, x)?, tensor_l2_project(space, y)?)
    }

    /// Element partition: the knots of a spline map, a single element
    /// otherwise.
    pub fn partition(&self) -> [KnotSequence; 2] {
        match self {
            GeometryMap::Spline { components } => {
                let s = components[0].space();
                [s.space(0).knots().clone(), s.space(1).knots().clone()]
            }
            _ => {
                let unit = KnotSequence::new(vec![0.0, 1.0]).expect("unit interval");
                [unit.clone(), unit]
            }
        }
    }

    /// Smallest smoothness `k` across element boundaries, `None` for maps
    /// that are globally smooth.
    pub fn smoothness(&self) -> Option<i32> {
        match self {
            GeometryMap::Spline { components } => components[0]
                .space()
                .spaces()
                .iter()
                .filter(|s| s.knots().n_interior() > 0)
                .map(SplineSpace::smoothness)
                .min(),
            _ => None,
        }
    }

    pub fn elements_of(&self, x: [f64; 2]) -> Result<[usize; 2]> {
        let [px, py] = self.partition();
        Ok([px.element_of(x[0])?, py.element_of(x[1])?])
    }

    /// `∂_1^{o_1} ∂_2^{o_2} G_c` at `x` on element `elems`.
    pub fn derivative_on(&self, c: usize, orders: [usize; 2], x: [f64; 2], elems: [usize; 2]) -> Result<f64> {
        for &v in &x {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfDomain { x: v, a: 0.0, b: 1.0 });
            }
        }
        Ok(match self {
            GeometryMap::Identity => match orders {
                [0, 0] => x[c],
                [1, 0] => (c == 0) as u8 as f64,
                [0, 1] => (c == 1) as u8 as f64,
                _ => 0.0,
            },
            GeometryMap::Affine { matrix, shift } => match orders {
                [0, 0] => matrix[c][0] * x[0] + matrix[c][1] * x[1] + shift[c],
                [1, 0] => matrix[c][0],
                [0, 1] => matrix[c][1],
                _ => 0.0,
            },
            GeometryMap::Spline { components } => components[c].eval_on_element(&elems, &x, &orders)?,
        })
    }

    pub fn derivative(&self, c: usize, orders: [usize; 2], x: [f64; 2]) -> Result<f64> {
        self.derivative_on(c, orders, x, self.elems_or_zero(x))
    }

    fn elems_or_zero(&self, x: [f64; 2]) -> [usize; 2] {
        self.elements_of(x).unwrap_or([0, 0])
    }

    pub fn point(&self, x: [f64; 2]) -> Result<[f64; 2]> {
        Ok([self.derivative(0, [0, 0], x)?, self.derivative(1, [0, 0], x)?])
    }

    /// `J[c][i] = ∂_i G_c`.
    pub fn jacobian_on(&self, x: [f64; 2], elems: [usize; 2]) -> Result<[[f64; 2]; 2]> {
        let mut j = [[0.0; 2]; 2];
        for (c, row) in j.iter_mut().enumerate() {
            row[0] = self.derivative_on(c, [1, 0], x, elems)?;
            row[1] = self.derivative_on(c, [0, 1], x, elems)?;
        }
        Ok(j)
    }

    pub fn jacobian(&self, x: [f64; 2]) -> Result<[[f64; 2]; 2]> {
        self.jacobian_on(x, self.elems_or_zero(x))
    }

    pub fn det_on(&self, x: [f64; 2], elems: [usize; 2]) -> Result<f64> {
        let j = self.jacobian_on(x, elems)?;
        Ok(j[0][0] * j[1][1] - j[0][1] * j[1][0])
    }

    /// Chebyshev–Lobatto samples `(elements, x)`, `n` per direction on each
    /// element of the partition.
    pub fn samples(&self, n: usize) -> Result<Vec<([usize; 2], [f64; 2])>> {
        if n < 2 {
            return Err(Error::Resolution { found: n, min: 2 });
        }
        let [px, py] = self.partition();
        let nodes = |(l, r): (f64, f64)| -> Vec<f64> {
            (0..n)
                .map(|m| {
                    let t = 0.5 * (1.0 - (m as f64 * std::f64::consts::PI / (n - 1) as f64).cos());
                    if m + 1 == n {
                        r
                    } else {
                        l + (r - l) * t
                    }
                })
                .collect()
        };
        let mut out = Vec::with_capacity(px.n_elements() * py.n_elements() * n * n);
        for (ex, ix) in px.elements().enumerate() {
            let xs = nodes(ix);
            for (ey, iy) in py.elements().enumerate() {
                let ys = nodes(iy);
                for &x in &xs {
                    for &y in &ys {
                        out.push(([ex, ey], [x, y]));
                    }
                }
            }
        }
        Ok(out)
    }

    /// `(min |det ∇G|, max |det ∇G|)` over the samples; a degenerate-map
    /// error when some `|det|` is below `1e-10`.
    pub fn det_range(&self, n: usize) -> Result<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for (e, x) in self.samples(n)? {
            let d = self.det_on(x, e)?.abs();
            if !(d >= 1e-10) {
                return Err(Error::DegenerateMap { det: d, x: x[0], y: x[1] });
            }
            lo = lo.min(d);
            hi = hi.max(d);
        }
        Ok((lo, hi))
    }
}

/// Quadratic `C¹` spline map with one interior knot per direction: the
/// Greville net of the identity with one interior row and one interior
/// column of control points pushed off the grid.
fn quadratic_spline_map() -> Result<GeometryMap> {
    let s = SplineSpace::new(KnotSequence::uniform(0.0, 1.0, 1)?, 2, 1)?;
    let g = s.greville();
    let n = g.len();
    let space = TensorSpace::new(vec![s.clone(), s])?;
    let mut cx = Vec::with_capacity(n * n);
    let mut cy = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            cx.push(g[i] + if i == 1 { 0.2 * g[j] } else { 0.0 });
            cy.push(g[j] + if j == n - 2 { 0.15 * g[i] * g[i] } else { 0.0 });
        }
    }
    GeometryMap::spline(
        TensorFunction::new(space.clone(), cx)?,
        TensorFunction::new(space, cy)?,
    )
}

/// Built-in maps: `identity`, `affine` and `quadratic-spline`.
pub fn catalog_map(id: &str) -> Result<GeometryMap> {
    match id {
        "identity" => Ok(GeometryMap::Identity),
        "affine" => Ok(GeometryMap::Affine {
            matrix: [[1.5, 0.3], [-0.2, 0.8]],
            shift: [0.1, -0.2],
        }),
        "quadratic-spline" => quadratic_spline_map(),
        other => Err(Error::UnknownId(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_maps_are_invertible() {
        for id in MAP_CATALOG {
            let g = catalog_map(id).unwrap();
            let (lo, hi) = g.det_range(12).unwrap();
            assert!(lo > 0.3 && hi < 3.0, "{id}: {lo} {hi}");
        }
        assert!(matches!(catalog_map("torus"), Err(Error::UnknownId(_))));
    }

    #[test]
    fn quadratic_map_keeps_corners_and_is_bent() {
        let g = catalog_map("quadratic-spline").unwrap();
        for c in [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]] {
            let p = g.point(c).unwrap();
            assert!((p[0] - c[0]).abs() < 1e-14 && (p[1] - c[1]).abs() < 1e-14);
        }
        assert_eq!(g.smoothness(), Some(1));
        // second derivative jumps across the interior knot
        let left = g.derivative_on(0, [2, 0], [0.5, 0.5], [0, 0]).unwrap();
        let right = g.derivative_on(0, [2, 0], [0.5, 0.5], [1, 0]).unwrap();
        assert!((left - right).abs() > 1e-3);
    }

    #[test]
    fn degenerate_map_is_rejected() {
        let g = GeometryMap::Affine {
            matrix: [[1.0, 2.0], [0.5, 1.0]],
            shift: [0.0, 0.0],
        };
        assert!(matches!(g.det_range(4), Err(Error::DegenerateMap { .. })));
    }

    #[test]
    fn samples_nest_under_refinement() {
        let g = GeometryMap::Identity;
        let coarse = g.samples(5).unwrap();
        let fine = g.samples(9).unwrap();
        for (_, x) in coarse {
            assert!(fine.iter().any(|(_, y)| (x[0] - y[0]).abs() < 1e-15 && (x[1] - y[1]).abs() < 1e-15));
        }
    }
}
