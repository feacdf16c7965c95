//! L2, Ritz, boundary-interpolating and reduced-space projectors, error
//! measurement and the numerical operator-norm estimator.

mod norm;
mod opnorm;
mod reduced;

pub use norm::{error_norm, seminorm, ERROR_NORM_EXTRA_POINTS};
pub use opnorm::{estimate_constant, ConstantEstimate, MIN_GRID};
pub use reduced::{build_reduced_space, ritz_reduced, Parity, ReducedSpace, Variant};

use crate::assembly::{
    assemble_gram, assemble_load, moment_matrix, moment_rhs, DEFAULT_OVERSAMPLE,
};
use crate::error::{Error, Result};
use crate::linalg::{solve_kkt, solve_spd, BandedSymMatrix};
use crate::spline::{SplineFunction, SplineSpace};
use crate::target::TestFunction;

/// Solver diagnostics attached to every projection.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Diagnostics {
    /// `‖A c − b‖ / ‖b‖` of the Galerkin system (absolute when `b = 0`).
    pub orthogonality_residual: f64,
    /// Largest violation of the moment or mean constraints.
    pub constraint_residual: f64,
    pub condition_estimate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionResult {
    pub spline: SplineFunction,
    pub diagnostics: Diagnostics,
}

impl ProjectionResult {
    pub fn eval(&self, x: f64, d: usize) -> Result<f64> {
        self.spline.eval(x, d)
    }
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn relative_residual(ac: &[f64], b: &[f64]) -> f64 {
    let r: Vec<f64> = ac.iter().zip(b).map(|(x, y)| x - y).collect();
    let bn = norm2(b);
    if bn > 0.0 {
        norm2(&r) / bn
    } else {
        norm2(&r)
    }
}

fn residual_of(a: &BandedSymMatrix, c: &[f64], b: &[f64]) -> f64 {
    relative_residual(&a.mul_vec(c), b)
}

/// L2-projection onto `space`.
pub fn l2_project(space: &SplineSpace, u: &TestFunction) -> Result<ProjectionResult> {
    let m = assemble_gram(space, 0)?;
    let b = assemble_load(space, u, 0, DEFAULT_OVERSAMPLE)?;
    let (c, cond) = solve_spd(&m, &b)?;
    Ok(ProjectionResult {
        diagnostics: Diagnostics {
            orthogonality_residual: residual_of(&m, &c, &b),
            constraint_residual: 0.0,
            condition_estimate: cond,
        },
        spline: SplineFunction::new(space.clone(), c)?,
    })
}

/// Order-`q` Ritz projection: `(∂^q(u − s), ∂^q v) = 0` for all `v` in the
/// space and `(s, g) = (u, g)` for polynomials `g` of degree `< q`.
pub fn ritz_project(space: &SplineSpace, u: &TestFunction, q: usize) -> Result<ProjectionResult> {
    if q == 0 {
        return l2_project(space, u);
    }
    let max = (space.smoothness() + 1).max(0) as usize;
    if q > max {
        return Err(Error::NonconformingOrder { order: q, max });
    }
    u.require(q)?;
    let a = assemble_gram(space, q)?;
    let b = assemble_load(space, u, q, DEFAULT_OVERSAMPLE)?;
    let c = moment_matrix(space, q)?;
    let crhs = moment_rhs(space, u, q, DEFAULT_OVERSAMPLE)?;
    let sol = solve_kkt(&a, &c, &b, &crhs)?;
    let crhs_scale = crhs.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    Ok(ProjectionResult {
        diagnostics: Diagnostics {
            orthogonality_residual: residual_of(&a, &sol.x, &b),
            constraint_residual: sol.constraint_residual / crhs_scale,
            condition_estimate: sol.condition,
        },
        spline: SplineFunction::new(space.clone(), sol.x)?,
    })
}

/// Boundary-interpolating projection `u(a) + ∫_a^x Z ∂u`, where `Z` is the
/// L2-projection onto the derivative space.
pub fn q_project(space: &SplineSpace, u: &TestFunction) -> Result<ProjectionResult> {
    let dspace = space.derivative_space()?;
    let du = u.derivative()?;
    let inner = l2_project(&dspace, &du)?;
    let spline = SplineFunction::antiderivative(space, &inner.spline, u.value(space.a()))?;
    Ok(ProjectionResult {
        spline,
        diagnostics: inner.diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spline::KnotSequence;
    use std::f64::consts::PI;

    fn sin_target(omega: f64) -> TestFunction {
        TestFunction::new("sin", 32, move |x, d| {
            omega.powi(d as i32) * (omega * x + d as f64 * PI / 2.0).sin()
        })
    }

    fn space(n: usize, p: usize, k: i32) -> SplineSpace {
        SplineSpace::new(KnotSequence::uniform(0.0, 1.0, n).unwrap(), p, k).unwrap()
    }

    #[test]
    fn l2_reproduces_members() {
        let s = space(4, 3, 1);
        let poly = [0.1, -0.5, 2.0, 1.0];
        let f = SplineFunction::from_polynomial(&s, &poly).unwrap();
        let r = l2_project(&s, &TestFunction::polynomial(&poly)).unwrap();
        for (a, b) in r.spline.coeffs().iter().zip(f.coeffs()) {
            assert!((a - b).abs() < 1e-10);
        }
        assert!(r.diagnostics.orthogonality_residual < 1e-12);
    }

    #[test]
    fn ritz_zero_is_l2() {
        let s = space(3, 2, 1);
        let u = sin_target(3.0);
        assert_eq!(ritz_project(&s, &u, 0).unwrap(), l2_project(&s, &u).unwrap());
    }

    #[test]
    fn ritz_nonconforming() {
        let s = space(3, 3, 0);
        assert_eq!(
            ritz_project(&s, &sin_target(1.0), 2).unwrap_err(),
            Error::NonconformingOrder { order: 2, max: 1 }
        );
    }

    #[test]
    fn ritz_interpolates_endpoints() {
        let u = sin_target(2.7);
        for p in 2..=5 {
            let s = space(5, p, p as i32 - 2);
            let r = ritz_project(&s, &u, 1).unwrap();
            assert!((r.eval(0.0, 0).unwrap() - u.value(0.0)).abs() < 1e-9);
            assert!((r.eval(1.0, 0).unwrap() - u.value(1.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn ritz_first_order_reproduces_linear() {
        let s = space(6, 2, 1);
        let r = ritz_project(&s, &TestFunction::polynomial(&[0.0, 1.0]), 1).unwrap();
        let e = SplineFunction::from_polynomial(&s, &[0.0, 1.0]).unwrap();
        for (a, b) in r.spline.coeffs().iter().zip(e.coeffs()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn q_projection_interpolates_and_matches_ritz() {
        let u = sin_target(4.1);
        for p in 1..=4 {
            for k in 0..p as i32 {
                let s = space(3, p, k);
                let q = q_project(&s, &u).unwrap();
                assert!((q.eval(0.0, 0).unwrap() - u.value(0.0)).abs() < 1e-10);
                assert!((q.eval(1.0, 0).unwrap() - u.value(1.0)).abs() < 1e-10);
                if p >= 2 {
                    let r = ritz_project(&s, &u, 1).unwrap();
                    for i in 0..100 {
                        let x = i as f64 / 99.0;
                        let d = q.eval(x, 0).unwrap() - r.eval(x, 0).unwrap();
                        assert!(d.abs() < 1e-9, "p={p} k={k} x={x}: {d}");
                    }
                }
            }
        }
    }

    #[test]
    fn q_projection_of_constant_is_exact() {
        let s = space(2, 2, 0);
        let q = q_project(&s, &TestFunction::constant(3.25)).unwrap();
        assert!(q.spline.coeffs().iter().all(|&c| c == 3.25));
    }

    #[test]
    fn q_projection_needs_continuity() {
        let s = space(2, 2, -1);
        assert!(matches!(
            q_project(&s, &sin_target(1.0)),
            Err(Error::Precondition { name: "continuous-space", .. })
        ));
    }
}
