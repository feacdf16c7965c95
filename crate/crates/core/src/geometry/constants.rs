use super::faa::{faa_coefficient, faa_index_set};
use super::map::GeometryMap;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Default Chebyshev–Lobatto points per direction and element.
pub const DEFAULT_RESOLUTION: usize = 12;

/// Sup-norm flavor: over all of `Ω`, or the maximum over elements of
/// per-element sups (one-sided limits on element boundaries).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormFlavor {
    Global,
    Mesh,
}

/// Differentiation direction of a geometry constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `∂_1^r` (index 0) or `∂_2^r` (index 1).
    Axis(usize),
    /// `∂_1 ∂_2` (second order only).
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeometryConstant {
    pub direction: Direction,
    pub j: [usize; 2],
    pub value: f64,
}

/// `C_G` and the Faà di Bruno constants `C_{G,i,r,j}` of a map.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeometryConstants {
    pub r: usize,
    pub flavor: NormFlavor,
    pub resolution: usize,
    /// `sup |det ∇G|`
    pub det_sup: f64,
    /// `sup |1/det ∇G|`, which equals `sup |det ∇̃G⁻¹|` on `Ω̃`.
    pub inv_det_sup: f64,
    pub c_g: f64,
    pub entries: Vec<GeometryConstant>,
}

impl GeometryConstants {
    pub fn get(&self, direction: Direction, j: [usize; 2]) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.direction == direction && e.j == j)
            .map(|e| e.value)
    }

    /// Multi-indices `j` with `1 <= |j| <= r`, by total order then `j_1`
    /// descending.
    pub fn multi_indices(r: usize) -> Vec<[usize; 2]> {
        (1..=r)
            .flat_map(|t| (0..=t).rev().map(move |j1| [j1, t - j1]))
            .collect()
    }
}

/// Sampled `C_G` and `C_{G,i,r,j}`.
///
/// Each constant is the largest absolute value of its Faà di Bruno sum
/// over Chebyshev–Lobatto samples on every element of the map's partition.
/// Mixed-direction constants are included for `r = 2`. The global flavor
/// needs a map that is `W^{r,∞}` across element boundaries.
pub fn geometry_constants(g: &GeometryMap, r: usize, flavor: NormFlavor, resolution: usize) -> Result<GeometryConstants> {
    if r == 0 {
        return Err(Error::precondition("positive-order", "geometry constants need r >= 1"));
    }
    if flavor == NormFlavor::Global {
        if let Some(k) = g.smoothness() {
            if k + 1 < r as i32 {
                return Err(Error::precondition(
                    "smooth-geometry",
                    format!("a C^{k} spline map is not W^({r},inf) globally; use the mesh flavor"),
                ));
            }
        }
    }
    let (det_min, det_sup) = g.det_range(resolution)?;
    let inv_det_sup = 1.0 / det_min;
    let js = GeometryConstants::multi_indices(r);
    let sets: Vec<_> = js.iter().map(|j| faa_index_set(r, j, 2)).collect();
    let mixed = r == 2;
    let n_dir = if mixed { 3 } else { 2 };
    let mut sup = vec![vec![0.0f64; js.len()]; n_dir];
    for (e, x) in g.samples(resolution)? {
        for i in 0..2 {
            // d[m-1][c] = ∂_i^m G_c
            let d = (1..=r)
                .map(|m| {
                    let o = if i == 0 { [m, 0] } else { [0, m] };
                    Ok([g.derivative_on(0, o, x, e)?, g.derivative_on(1, o, x, e)?].to_vec())
                })
                .collect::<Result<Vec<_>>>()?;
            for (slot, set) in sup[i].iter_mut().zip(&sets) {
                *slot = slot.max(faa_coefficient(set, r, &d).abs());
            }
        }
        if mixed {
            let grad = g.jacobian_on(x, e)?;
            let cross = [g.derivative_on(0, [1, 1], x, e)?, g.derivative_on(1, [1, 1], x, e)?];
            for (slot, j) in sup[2].iter_mut().zip(&js) {
                let v = match *j {
                    [1, 0] => cross[0],
                    [0, 1] => cross[1],
                    [2, 0] => grad[0][0] * grad[0][1],
                    [0, 2] => grad[1][0] * grad[1][1],
                    _ => grad[0][0] * grad[1][1] + grad[0][1] * grad[1][0],
                };
                *slot = slot.max(v.abs());
            }
        }
    }
    let mut entries = Vec::with_capacity(n_dir * js.len());
    for (dir, row) in sup.iter().enumerate() {
        let direction = if dir < 2 { Direction::Axis(dir) } else { Direction::Mixed };
        for (j, &value) in js.iter().zip(row) {
            entries.push(GeometryConstant {
                direction,
                j: *j,
                value,
            });
        }
    }
    Ok(GeometryConstants {
        r,
        flavor,
        resolution,
        det_sup,
        inv_det_sup,
        c_g: det_sup * inv_det_sup,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::catalog_map;

    #[test]
    fn identity_constants() {
        let c = geometry_constants(&GeometryMap::Identity, 1, NormFlavor::Global, 4).unwrap();
        assert_eq!(c.get(Direction::Axis(0), [1, 0]), Some(1.0));
        assert_eq!(c.get(Direction::Axis(0), [0, 1]), Some(0.0));
        assert_eq!(c.get(Direction::Axis(1), [0, 1]), Some(1.0));
        assert_eq!(c.c_g, 1.0);
    }

    #[test]
    fn affine_second_order() {
        let g = catalog_map("affine").unwrap();
        let c = geometry_constants(&g, 2, NormFlavor::Global, 6).unwrap();
        let GeometryMap::Affine { matrix: a, .. } = g else { unreachable!() };
        for dir in [Direction::Axis(0), Direction::Axis(1), Direction::Mixed] {
            assert_eq!(c.get(dir, [1, 0]), Some(0.0));
            assert_eq!(c.get(dir, [0, 1]), Some(0.0));
        }
        let close = |x: Option<f64>, y: f64| (x.unwrap() - y).abs() < 1e-14;
        assert!(close(c.get(Direction::Axis(0), [2, 0]), a[0][0] * a[0][0]));
        assert!(close(c.get(Direction::Axis(1), [1, 1]), 2.0 * (a[0][1] * a[1][1]).abs()));
        assert!(close(c.get(Direction::Mixed, [1, 1]), (a[0][0] * a[1][1] + a[0][1] * a[1][0]).abs()));
        let det = (a[0][0] * a[1][1] - a[0][1] * a[1][0]).abs();
        assert!((c.c_g - 1.0).abs() < 1e-14 && (c.det_sup - det).abs() < 1e-14);
    }

    #[test]
    fn bent_map_needs_mesh_flavor_beyond_its_smoothness() {
        let g = catalog_map("quadratic-spline").unwrap();
        assert!(geometry_constants(&g, 2, NormFlavor::Global, 6).is_ok());
        assert!(matches!(
            geometry_constants(&g, 3, NormFlavor::Global, 6),
            Err(Error::Precondition { name: "smooth-geometry", .. })
        ));
        let c = geometry_constants(&g, 3, NormFlavor::Mesh, 6).unwrap();
        assert!(c.entries.iter().all(|e| e.value >= 0.0));
    }

    #[test]
    fn refinement_is_monotone() {
        let g = catalog_map("quadratic-spline").unwrap();
        let coarse = geometry_constants(&g, 2, NormFlavor::Mesh, 12).unwrap();
        let fine = geometry_constants(&g, 2, NormFlavor::Mesh, 23).unwrap();
        for (a, b) in coarse.entries.iter().zip(&fine.entries) {
            assert!(a.value <= b.value);
            assert!(b.value - a.value <= 0.01 * b.value.max(1e-300));
        }
        assert!(coarse.c_g <= fine.c_g);
    }
}
