use super::config::{BoundKind, DegreeSpec, Ell, ExperimentConfig, Projector};
use super::report::{ErrorReport, Outcome, ReportRow};
use crate::constants::{c_hpkr_value, reduced_bound, ritz_bound, simplified_bound, RitzQuery};
use crate::error::{Error, Result};
use crate::geometry::{
    catalog_map, geometry_constants, interface_jumps, mapped_first_order_bound, mapped_l2_bound, mapped_project,
    multipatch_q_project, two_patch_square, GeometryConstants, GeometryMap, MappedResult, MultiPatch, NormFlavor,
    PhysicalSeminorms, DEFAULT_RESOLUTION,
};
use crate::projection::{
    build_reduced_space, error_norm, l2_project, q_project, ritz_project, ritz_reduced, seminorm, ProjectionResult,
};
use crate::spline::{KnotSequence, SplineFunction, SplineSpace};
use crate::target::TestFunction;
use crate::tensor::{
    tensor_error_norm, tensor_l2_bound, tensor_project, tensor_ritz_bound, tensor_seminorm, FieldFunction,
    MixedSeminorms, ProjectorKind, TensorFunction, TensorSpace,
};
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Smallest schedule accepted by [`run_convergence`].
pub const MIN_REFINEMENTS: usize = 4;

/// Samples per interface for the continuity check.
pub const INTERFACE_SAMPLES: usize = 100;

/// Largest interface jump of a conforming multi-patch projection.
pub const INTERFACE_TOLERANCE: f64 = 1e-9;

/// Global norms when the map is smooth enough, the mesh-dependent ones
/// otherwise.
pub fn flavor_for(g: &GeometryMap, r: usize) -> NormFlavor {
    match g.smoothness() {
        Some(k) if k + 1 < r as i32 => NormFlavor::Mesh,
        _ => NormFlavor::Global,
    }
}

/// Map-dependent data of one Sobolev order.
struct MapData {
    consts: Result<GeometryConstants>,
    sem: Result<PhysicalSeminorms>,
}

impl MapData {
    fn new(g: &GeometryMap, u: &FieldFunction, r: usize) -> Self {
        Self {
            consts: geometry_constants(g, r, flavor_for(g, r), DEFAULT_RESOLUTION),
            sem: PhysicalSeminorms::measure(g, u, r),
        }
    }

    fn get(&self) -> Result<(&GeometryConstants, &PhysicalSeminorms)> {
        let c = self.consts.as_ref().map_err(Clone::clone)?;
        let s = self.sem.as_ref().map_err(Clone::clone)?;
        Ok((c, s))
    }
}

/// Everything shared by the rows of one experiment.
enum Setup {
    Univariate(TestFunction),
    Tensor(FieldFunction),
    Mapped {
        u: FieldFunction,
        map: GeometryMap,
        data: BTreeMap<usize, MapData>,
    },
    MultiPatch {
        u: FieldFunction,
        data: Vec<BTreeMap<usize, MapData>>,
    },
}

/// The projection computed once per space.
enum Projected {
    Univariate(SplineFunction),
    Tensor(TensorSpace, TensorFunction),
    Mapped(TensorSpace, MappedResult),
    MultiPatch(MultiPatch, Vec<MappedResult>),
}

fn setup(cfg: &ExperimentConfig, proj: &Projector) -> Result<Setup> {
    Ok(match proj {
        Projector::Tensor(_) => Setup::Tensor(cfg.field()?),
        Projector::Mapped(_, id) => {
            let u = cfg.field()?;
            let map = catalog_map(id)?;
            let data = cfg.r.par_iter().map(|&r| (r, MapData::new(&map, &u, r))).collect();
            Setup::Mapped { u, map, data }
        }
        Projector::MultiPatch => {
            let u = cfg.field()?;
            let mp = two_patch_square(&TensorSpace::uniform(2, 0, 1, 0)?)?;
            let data = mp
                .patches()
                .iter()
                .map(|p| cfg.r.par_iter().map(|&r| (r, MapData::new(&p.map, &u, r))).collect())
                .collect();
            Setup::MultiPatch { u, data }
        }
        _ => Setup::Univariate(cfg.target.build()?),
    })
}

fn tensor_kind(proj: &Projector) -> ProjectorKind {
    match proj {
        Projector::Tensor(k) | Projector::Mapped(k, _) => *k,
        _ => ProjectorKind::Q,
    }
}

fn project(proj: &Projector, setup: &Setup, space: &SplineSpace) -> Result<Projected> {
    let tensor = || TensorSpace::new(vec![space.clone(), space.clone()]);
    Ok(match (setup, proj) {
        (Setup::Univariate(u), _) => {
            let res: ProjectionResult = match proj {
                Projector::L2 => l2_project(space, u)?,
                Projector::Ritz(q) => ritz_project(space, u, *q)?,
                Projector::Q => q_project(space, u)?,
                Projector::Reduced(parity, variant) => ritz_reduced(&build_reduced_space(space, *parity, *variant)?, u)?,
                _ => unreachable!("bivariate projectors have bivariate setups"),
            };
            Projected::Univariate(res.spline)
        }
        (Setup::Tensor(u), _) => {
            let t = tensor()?;
            let s = tensor_project(&t, u, tensor_kind(proj))?;
            Projected::Tensor(t, s)
        }
        (Setup::Mapped { u, map, .. }, _) => {
            let t = tensor()?;
            let s = mapped_project(map, &t, u, tensor_kind(proj))?;
            Projected::Mapped(t, s)
        }
        (Setup::MultiPatch { u, .. }, _) => {
            let mp = two_patch_square(&tensor()?)?;
            let res = multipatch_q_project(&mp, u)?;
            let jump = interface_jumps(&mp, &res, INTERFACE_SAMPLES)?
                .into_iter()
                .fold(0.0, f64::max);
            if !(jump <= INTERFACE_TOLERANCE) {
                return Err(Error::InvalidMultiPatch(format!("interface jump {jump:e}")));
            }
            Projected::MultiPatch(mp, res)
        }
    })
}

fn pair(ell: Ell) -> Result<[usize; 2]> {
    match ell {
        Ell::Pair(e) => Ok(e),
        Ell::One(_) => Err(Error::Config("bivariate projector with a scalar ell".into())),
    }
}

fn scalar(ell: Ell) -> Result<usize> {
    match ell {
        Ell::One(l) => Ok(l),
        Ell::Pair(_) => Err(Error::Config("univariate projector with a pair ell".into())),
    }
}

fn require_l2_order(ell: usize) -> Result<()> {
    if ell > 0 {
        return Err(Error::DerivativeOrder { order: ell, max: 0 });
    }
    Ok(())
}

fn require_not_maximal(p: usize, k: i32) -> Result<()> {
    if k == p as i32 - 1 {
        return Err(Error::precondition(
            "not-maximally-smooth",
            "the simplified estimate needs k <= p - 2",
        ));
    }
    Ok(())
}

/// `(error, bound)` of one row.
#[allow(clippy::too_many_arguments)]
fn measure(
    cfg: &ExperimentConfig,
    proj: &Projector,
    setup: &Setup,
    projected: &Projected,
    space: &SplineSpace,
    r: usize,
    ell: Ell,
) -> Result<(f64, f64)> {
    let knots = space.knots();
    let (h, p, k, length) = (knots.h(), space.degree(), space.smoothness(), knots.length());
    match (setup, projected) {
        (Setup::Univariate(u), Projected::Univariate(s)) => {
            let ell = scalar(ell)?;
            let factor = match proj {
                Projector::L2 => {
                    require_l2_order(ell)?;
                    match cfg.bound {
                        BoundKind::Sharp => c_hpkr_value(h, p, k, r, length)?,
                        BoundKind::Simplified => simplified_bound(h, p, k, r)?,
                    }
                }
                Projector::Ritz(_) | Projector::Q => {
                    let b = ritz_bound(&RitzQuery {
                        h,
                        p,
                        k,
                        r,
                        q: proj.order(),
                        ell,
                        length,
                    })?;
                    match cfg.bound {
                        BoundKind::Sharp => b.value,
                        BoundKind::Simplified => {
                            require_not_maximal(p, k)?;
                            b.simplified
                        }
                    }
                }
                Projector::Reduced(parity, variant) => {
                    if r != 1 || ell != 0 {
                        return Err(Error::precondition("reduced-order", "reduced-space estimates need r = 1, ell = 0"));
                    }
                    reduced_bound(*parity, *variant, p, h, knots.h_hat())
                }
                _ => unreachable!("univariate setup"),
            };
            let bound = factor * seminorm(u, r, knots)?;
            Ok((error_norm(u, s, ell)?, bound))
        }
        (Setup::Tensor(u), Projected::Tensor(t, s)) => {
            let ell = pair(ell)?;
            let bound = if tensor_kind(proj) == ProjectorKind::L2 {
                require_l2_order(ell[0] + ell[1])?;
                let sem = [tensor_seminorm(u, &[r, 0], t)?, tensor_seminorm(u, &[0, r], t)?];
                tensor_l2_bound(t, r, &sem)?
            } else {
                tensor_ritz_bound(t, r, &MixedSeminorms::measure(u, t, r)?, ell)?
            };
            Ok((tensor_error_norm(u, s, &ell)?, bound))
        }
        (Setup::Mapped { u, map, data }, Projected::Mapped(t, s)) => {
            let ell = pair(ell)?;
            let (consts, sem) = data[&r].get()?;
            let bound = if tensor_kind(proj) == ProjectorKind::L2 {
                require_l2_order(ell[0] + ell[1])?;
                mapped_l2_bound(t, map, consts, sem)?
            } else {
                mapped_first_order_bound(t, map, consts, sem, ell)?
            };
            Ok((s.physical_error(u, ell)?, bound))
        }
        (Setup::MultiPatch { u, data }, Projected::MultiPatch(mp, res)) => {
            let ell = pair(ell)?;
            let mut worst: Option<(f64, f64)> = None;
            for ((patch, s), d) in mp.patches().iter().zip(res).zip(data) {
                let (consts, sem) = d[&r].get()?;
                let bound = mapped_first_order_bound(&patch.space, &patch.map, consts, sem, ell)?;
                let error = s.physical_error(u, ell)?;
                if worst.is_none_or(|(e, b)| error / bound > e / b) {
                    worst = Some((error, bound));
                }
            }
            worst.ok_or_else(|| Error::InvalidMultiPatch("no patches".into()))
        }
        _ => unreachable!("projection matches its setup"),
    }
}

fn outcome(r: Result<(f64, f64)>) -> Outcome {
    match r {
        Ok((error, bound)) => Outcome::Measured { error, bound },
        Err(e) if e.is_precondition() => Outcome::Skipped { reason: e.reason() },
        Err(e) => Outcome::Failed { reason: e.reason() },
    }
}

/// Rows of one (degree, mesh) pair, indexed `[r][ell]`.
fn rows_for(
    cfg: &ExperimentConfig,
    proj: &Projector,
    setup: &Setup,
    deg: DegreeSpec,
    knots: &KnotSequence,
) -> Vec<Vec<ReportRow>> {
    let k = deg.smoothness();
    let space = SplineSpace::new(knots.clone(), deg.p, k);
    let projected = space.as_ref().map_err(Clone::clone).and_then(|s| project(proj, setup, s));
    cfg.r
        .iter()
        .map(|&r| {
            cfg.ell
                .iter()
                .map(|&ell| {
                    let result = match (&space, &projected) {
                        (Ok(s), Ok(pr)) => measure(cfg, proj, setup, pr, s, r, ell),
                        (Err(e), _) | (_, Err(e)) => Err(e.clone()),
                    };
                    ReportRow {
                        p: deg.p,
                        k,
                        q: proj.order(),
                        ell,
                        r,
                        n: knots.n_interior(),
                        h: knots.h(),
                        outcome: outcome(result),
                        order: None,
                    }
                })
                .collect()
        })
        .collect()
}

/// One row per degree, Sobolev order, derivative order and mesh (in that
/// nesting), with fitted orders; rows are computed in parallel and written
/// in config order.
pub fn run_verify(cfg: &ExperimentConfig) -> Result<ErrorReport> {
    cfg.validate()?;
    let proj = cfg.projector()?;
    let meshes = cfg.meshes()?;
    let setup = setup(cfg, &proj)?;
    let jobs: Vec<(usize, usize)> = (0..cfg.degrees.len())
        .flat_map(|d| (0..meshes.len()).map(move |m| (d, m)))
        .collect();
    let blocks: Vec<Vec<Vec<ReportRow>>> = jobs
        .par_iter()
        .map(|&(d, m)| rows_for(cfg, &proj, &setup, cfg.degrees[d], &meshes[m]))
        .collect();
    let mut rows = Vec::with_capacity(blocks.len() * cfg.r.len() * cfg.ell.len());
    for d in 0..cfg.degrees.len() {
        for ri in 0..cfg.r.len() {
            for li in 0..cfg.ell.len() {
                for m in 0..meshes.len() {
                    rows.push(blocks[d * meshes.len() + m][ri][li].clone());
                }
            }
        }
    }
    let mut report = ErrorReport { rows };
    report.fill_orders();
    Ok(report)
}

/// [`run_verify`] on a schedule of at least four refinements; check the
/// result with [`ErrorReport::slow_rows`].
pub fn run_convergence(cfg: &ExperimentConfig) -> Result<ErrorReport> {
    if cfg.knots.is_some() || cfg.schedule.len() < MIN_REFINEMENTS {
        return Err(Error::Config(format!(
            "convergence studies need a schedule of at least {MIN_REFINEMENTS} meshes"
        )));
    }
    run_verify(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(json: &str) -> ExperimentConfig {
        ExperimentConfig::from_json(json).unwrap()
    }

    #[test]
    fn sin_cubic_row_is_certified() {
        let c = config(
            r#"{"degrees":[{"p":3,"k":2}],"schedule":[8],"projector":"l2",
                "target":{"id":"sin","omega":7.225663103256524},"r":[3]}"#,
        );
        let rep = run_verify(&c).unwrap();
        assert_eq!(rep.rows.len(), 1);
        let eff = rep.rows[0].effectivity().unwrap();
        assert!(eff > 0.0 && eff <= 1.0, "{eff}");
    }

    #[test]
    fn polynomials_are_reproduced() {
        let c = config(
            r#"{"degrees":[{"p":3,"k":1},{"p":4}],"schedule":[2,5],"projector":"ritz:1",
                "target":{"id":"poly","coeffs":[0.3,-1.0,2.0,0.5]},"r":[1,2],"ell":[0,1]}"#,
        );
        for row in run_verify(&c).unwrap().rows {
            match row.outcome {
                Outcome::Measured { error, .. } => assert!(error <= 1e-10, "{row:?}"),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn reduced_even_parity_needs_zero_boundary_values() {
        let c = config(
            r#"{"degrees":[{"p":3}],"schedule":[4],"projector":"reduced:even:strict",
                "target":{"id":"exp"},"r":[1]}"#,
        );
        let rep = run_verify(&c).unwrap();
        assert_eq!(
            rep.rows[0].outcome,
            Outcome::Skipped {
                reason: "invalid-data".into()
            }
        );
        assert!(!rep.has_violation());
    }

    #[test]
    fn unmet_hypotheses_are_skipped() {
        let c = config(
            r#"{"degrees":[{"p":2,"k":-1}],"schedule":[3],"projector":"l2",
                "target":{"id":"sin"},"r":[4],"ell":[0,1]}"#,
        );
        let rep = run_verify(&c).unwrap();
        assert!(rep
            .rows
            .iter()
            .all(|r| matches!(&r.outcome, Outcome::Skipped { reason } if !reason.starts_with("error"))));
    }

    #[test]
    fn convergence_of_maximally_smooth_ritz() {
        let c = config(
            r#"{"degrees":[{"p":2},{"p":3}],"schedule":[4,8,16,32],"projector":"ritz:1",
                "target":{"id":"sin","omega":7.225663103256524},"r":[2,3],"ell":[0,1]}"#,
        );
        let rep = run_convergence(&c).unwrap();
        assert!(!rep.has_violation());
        assert!(rep.slow_rows().is_empty());
        let short = config(
            r#"{"degrees":[{"p":2}],"schedule":[4,8],"projector":"l2","target":{"id":"sin"},"r":[2]}"#,
        );
        assert!(matches!(run_convergence(&short), Err(Error::Config(_))));
    }

    #[test]
    fn piecewise_c1_rate_is_limited_by_smoothness() {
        let c = config(
            r#"{"degrees":[{"p":2},{"p":4}],"schedule":[3,7,15,31],"projector":"l2",
                "target":{"id":"piecewise_c1","x0":0.3333333333333333},"r":[2]}"#,
        );
        let rep = run_convergence(&c).unwrap();
        assert!(rep.slow_rows().is_empty());
        for row in &rep.rows {
            let o = row.order.unwrap();
            assert!((1.8..2.8).contains(&o), "{row:?}");
        }
        assert!(!rep.has_violation());
    }

    #[test]
    fn bivariate_projectors() {
        for proj in ["tensor:ritz", "tensor:q", "mapped:q:quadratic-spline", "multipatch"] {
            let c = config(&format!(
                r#"{{"degrees":[{{"p":2}}],"schedule":[3],"projector":"{proj}",
                    "target":{{"id":"sin","omega":3.141592653589793}},"r":[2],"ell":[[0,0],[1,1]]}}"#
            ));
            let rep = run_verify(&c).unwrap();
            assert_eq!(rep.rows.len(), 2);
            for row in &rep.rows {
                let eff = row.effectivity().unwrap_or_else(|| panic!("{proj}: {row:?}"));
                assert!(eff <= 1.0, "{proj}: {row:?}");
            }
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let c = config(
            r#"{"degrees":[{"p":1},{"p":3,"k":0}],"schedule":[2,4,8,16],"projector":"q",
                "target":{"id":"runge","c":2.0},"r":[1,2],"ell":[0,1]}"#,
        );
        assert_eq!(run_verify(&c).unwrap().to_csv(), run_verify(&c).unwrap().to_csv());
    }
}
