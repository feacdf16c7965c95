use super::map::GeometryMap;
use super::mapped::{mapped_project, MappedResult};
use crate::error::{Error, Result};
use crate::spline::{KnotSequence, SplineSpace};
use crate::tensor::{FieldFunction, ProjectorKind, TensorSpace};
use serde::{Deserialize, Serialize};

/// Edge of the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Edge {
    /// `x = 0`
    Left,
    /// `x = 1`
    Right,
    /// `y = 0`
    Bottom,
    /// `y = 1`
    Top,
}

impl Edge {
    pub const ALL: [Edge; 4] = [Edge::Left, Edge::Right, Edge::Bottom, Edge::Top];

    /// Point at parameter `t` along the edge (increasing coordinate).
    pub fn point(self, t: f64) -> [f64; 2] {
        match self {
            Edge::Left => [0.0, t],
            Edge::Right => [1.0, t],
            Edge::Bottom => [t, 0.0],
            Edge::Top => [t, 1.0],
        }
    }

    /// Coordinate that varies along the edge.
    pub fn axis(self) -> usize {
        match self {
            Edge::Left | Edge::Right => 1,
            Edge::Bottom | Edge::Top => 0,
        }
    }

    fn contains(self, x: [f64; 2]) -> bool {
        let on = |v: f64, c: f64| (v - c).abs() <= 1e-14;
        match self {
            Edge::Left => on(x[0], 0.0),
            Edge::Right => on(x[0], 1.0),
            Edge::Bottom => on(x[1], 0.0),
            Edge::Top => on(x[1], 1.0),
        }
    }
}

/// One of the eight symmetries of the unit square: optional swap of the
/// coordinates, then optional reflections `x ↦ 1 - x`, `y ↦ 1 - y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct RigidMotion {
    #[serde(default)]
    pub swap: bool,
    #[serde(default)]
    pub flip_x: bool,
    #[serde(default)]
    pub flip_y: bool,
}

impl RigidMotion {
    pub fn all() -> Vec<RigidMotion> {
        (0..8)
            .map(|b| RigidMotion {
                swap: b & 1 != 0,
                flip_x: b & 2 != 0,
                flip_y: b & 4 != 0,
            })
            .collect()
    }

    pub fn apply(&self, x: [f64; 2]) -> [f64; 2] {
        let [mut u, mut v] = if self.swap { [x[1], x[0]] } else { x };
        if self.flip_x {
            u = 1.0 - u;
        }
        if self.flip_y {
            v = 1.0 - v;
        }
        [u, v]
    }
}

/// A mapped tensor patch.
#[derive(Debug, Clone, PartialEq)]
pub struct Patch {
    pub map: GeometryMap,
    pub space: TensorSpace,
}

/// Shared edge: `G_patch(R ξ) = G_other(ξ)` for `ξ` on `other_edge`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interface {
    pub patch: usize,
    pub edge: Edge,
    pub other: usize,
    pub other_edge: Edge,
    pub motion: RigidMotion,
}

/// Conforming patches glued along interfaces.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiPatch {
    patches: Vec<Patch>,
    interfaces: Vec<Interface>,
}

/// Samples used to validate interface geometry.
const INTERFACE_SAMPLES: usize = 101;

fn same_knots(a: &KnotSequence, b: &KnotSequence) -> bool {
    a.breaks().len() == b.breaks().len()
        && a.breaks().iter().zip(b.breaks()).all(|(x, y)| (x - y).abs() <= 1e-12)
}

fn edge_space(p: &Patch, e: Edge) -> &SplineSpace {
    p.space.space(e.axis())
}

impl MultiPatch {
    /// Validates indices, the rigid motions, agreement of the maps along
    /// every interface (to `1e-10`) and fully matching edge spaces.
    pub fn new(patches: Vec<Patch>, interfaces: Vec<Interface>) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidMultiPatch(m));
        for (i, p) in patches.iter().enumerate() {
            if p.space.n_dims() != 2 {
                return bad(format!("patch {i} is not bivariate"));
            }
            p.map.det_range(super::DEFAULT_RESOLUTION)?;
        }
        for (n, f) in interfaces.iter().enumerate() {
            if f.patch >= patches.len() || f.other >= patches.len() || f.patch == f.other {
                return bad(format!("interface {n} refers to invalid patches"));
            }
            let (start, end) = (f.motion.apply(f.other_edge.point(0.0)), f.motion.apply(f.other_edge.point(1.0)));
            if !f.edge.contains(start) || !f.edge.contains(end) {
                return bad(format!("interface {n}: the motion does not map {:?} onto {:?}", f.other_edge, f.edge));
            }
            let (pi, po) = (&patches[f.patch], &patches[f.other]);
            for s in 0..INTERFACE_SAMPLES {
                let xi = f.other_edge.point(s as f64 / (INTERFACE_SAMPLES - 1) as f64);
                let a = pi.map.point(f.motion.apply(xi))?;
                let b = po.map.point(xi)?;
                if (a[0] - b[0]).hypot(a[1] - b[1]) > 1e-10 {
                    return bad(format!("interface {n}: parameterizations differ at {xi:?}"));
                }
            }
            let reversed = start[f.edge.axis()] > end[f.edge.axis()];
            let (si, so) = (edge_space(pi, f.edge), edge_space(po, f.other_edge));
            let ko = if reversed { so.knots().reversed() } else { so.knots().clone() };
            if si.degree() != so.degree() || si.smoothness() != so.smoothness() || !same_knots(si.knots(), &ko) {
                return bad(format!("interface {n}: edge spaces are not fully matching"));
            }
        }
        Ok(Self { patches, interfaces })
    }

    pub fn patches(&self) -> &[Patch] {
        &self.patches
    }

    pub fn interfaces(&self) -> &[Interface] {
        &self.interfaces
    }

    /// Edges not shared with another patch.
    pub fn boundary_edges(&self) -> Vec<(usize, Edge)> {
        let mut out = Vec::new();
        for i in 0..self.patches.len() {
            for e in Edge::ALL {
                let shared = self
                    .interfaces
                    .iter()
                    .any(|f| (f.patch == i && f.edge == e) || (f.other == i && f.other_edge == e));
                if !shared {
                    out.push((i, e));
                }
            }
        }
        out
    }
}

/// The unit square cut along the curve `x = 1/2 + 2/5 y(1-y)`; the second
/// patch is parameterized with reversed orientation along the interface.
/// Both patches carry `space` in each direction.
pub fn two_patch_square(space: &TensorSpace) -> Result<MultiPatch> {
    let c = |y: f64| 0.5 + 0.4 * y * (1.0 - y);
    let geo = TensorSpace::uniform(2, 0, 2, 1)?;
    let field = |f: fn(f64, f64, &dyn Fn(f64) -> f64) -> f64| {
        FieldFunction::new("G", 2, 0, move |x, _| f(x[0], x[1], &c))
    };
    let g1 = GeometryMap::project(&geo, &field(|x, y, c| x * c(y)), &field(|_, y, _| y))?;
    let g2 = GeometryMap::project(
        &geo,
        &field(|x, y, c| 1.0 - x * (1.0 - c(1.0 - y))),
        &field(|_, y, _| 1.0 - y),
    )?;
    MultiPatch::new(
        vec![
            Patch {
                map: g1,
                space: space.clone(),
            },
            Patch {
                map: g2,
                space: space.clone(),
            },
        ],
        vec![Interface {
            patch: 0,
            edge: Edge::Right,
            other: 1,
            other_edge: Edge::Right,
            motion: RigidMotion {
                swap: false,
                flip_x: false,
                flip_y: true,
            },
        }],
    )
}

/// Mapped tensor `Q` projection on every patch; the result is continuous
/// across interfaces.
pub fn multipatch_q_project(mp: &MultiPatch, u: &FieldFunction) -> Result<Vec<MappedResult>> {
    mp.patches
        .iter()
        .map(|p| mapped_project(&p.map, &p.space, u, ProjectorKind::Q))
        .collect()
}

/// Largest value mismatch along each interface at `samples` points.
pub fn interface_jumps(mp: &MultiPatch, results: &[MappedResult], samples: usize) -> Result<Vec<f64>> {
    if results.len() != mp.patches.len() {
        return Err(Error::DimensionMismatch {
            expected: mp.patches.len(),
            found: results.len(),
        });
    }
    mp.interfaces
        .iter()
        .map(|f| {
            let mut jump = 0.0f64;
            for s in 0..samples {
                let xi = f.other_edge.point(s as f64 / (samples.max(2) - 1) as f64);
                let a = results[f.patch].eval_parametric(f.motion.apply(xi))?;
                let b = results[f.other].eval_parametric(xi)?;
                jump = jump.max((a - b).abs());
            }
            Ok(jump)
        })
        .collect()
}
