use super::{l2_project, relative_residual, Diagnostics, ProjectionResult};
use crate::assembly::{assemble_gram, assemble_load, moment_matrix, moment_rhs, DEFAULT_OVERSAMPLE};
use crate::error::{Error, Result};
use crate::linalg::solve_dense_kkt;
use crate::spline::{SplineFunction, SplineSpace};
use crate::target::TestFunction;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Which boundary derivatives vanish: even or odd orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// `Strict` constrains orders `α <= p`, `Bar` only `α < p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Strict,
    Bar,
}

/// Maximally smooth splines with `∂^α s(a) = ∂^α s(b) = 0` for the selected
/// orders, represented by an orthonormal coefficient basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedSpace {
    parent: SplineSpace,
    parity: Parity,
    variant: Variant,
    basis: DMatrix<f64>,
}

/// Relative singular value cutoff for rank detection.
const RANK_CUTOFF: f64 = 1e-10;

impl ReducedSpace {
    pub fn parent(&self) -> &SplineSpace {
        &self.parent
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// Columns are parent coefficient vectors of the reduced basis.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Constrained derivative orders.
    pub fn orders(&self) -> Vec<usize> {
        constrained_orders(self.parent.degree(), self.parity, self.variant)
    }

    /// Spline with reduced coefficients `c`.
    pub fn element(&self, c: &[f64]) -> Result<SplineFunction> {
        if c.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: c.len(),
            });
        }
        let coeffs = &self.basis * DVector::from_column_slice(c);
        SplineFunction::new(self.parent.clone(), coeffs.iter().copied().collect())
    }
}

fn constrained_orders(p: usize, parity: Parity, variant: Variant) -> Vec<usize> {
    let top = match variant {
        Variant::Strict => p + 1,
        Variant::Bar => p,
    };
    let start = match parity {
        Parity::Even => 0,
        Parity::Odd => 1,
    };
    (start..top).step_by(2).collect()
}

/// Builds the reduced space as the nullspace of the (row-normalized)
/// boundary derivative constraints.
pub fn build_reduced_space(space: &SplineSpace, parity: Parity, variant: Variant) -> Result<ReducedSpace> {
    if !space.is_maximally_smooth() {
        return Err(Error::precondition(
            "maximal-smoothness",
            format!("reduced spaces need k = p - 1, got k = {}", space.smoothness()),
        ));
    }
    let n = space.dim();
    let orders = constrained_orders(space.degree(), parity, variant);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for &alpha in &orders {
        for x in [space.a(), space.b()] {
            let row = space.basis_row(x, alpha)?;
            let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                rows.push(row.iter().map(|v| v / norm).collect());
            }
        }
    }
    let basis = if rows.is_empty() {
        DMatrix::identity(n, n)
    } else {
        // pad to square so the SVD returns a complete right basis
        let mut c = DMatrix::zeros(n.max(rows.len()), n);
        for (i, row) in rows.iter().enumerate() {
            for j in 0..n {
                c[(i, j)] = row[j];
            }
        }
        let svd = c.svd(false, true);
        let v_t = svd.v_t.expect("right singular vectors requested");
        let smax = svd.singular_values.max();
        let null: Vec<usize> = (0..n)
            .filter(|&i| svd.singular_values[i] <= RANK_CUTOFF * smax)
            .collect();
        DMatrix::from_fn(n, null.len(), |r, c| v_t[(null[c], r)])
    };
    if basis.ncols() == 0 {
        return Err(Error::EmptySpace);
    }
    Ok(ReducedSpace {
        parent: space.clone(),
        parity,
        variant,
        basis,
    })
}

/// Ritz projection onto a reduced space.
///
/// Even parity solves the stiffness system (data must vanish at both
/// ends); odd parity adds the mean constraint `(s, 1) = (u, 1)`. For `p = 0`
/// there is no stiffness form and the L2-projection onto the reduced space
/// is used.
pub fn ritz_reduced(reduced: &ReducedSpace, u: &TestFunction) -> Result<ProjectionResult> {
    let space = reduced.parent();
    let b_mat = reduced.basis();
    if reduced.parity == Parity::Even {
        let scale = 1.0 + (0..=20)
            .map(|i| u.value(space.a() + space.knots().length() * i as f64 / 20.0).abs())
            .fold(0.0, f64::max);
        let (ua, ub) = (u.value(space.a()), u.value(space.b()));
        if ua.abs() > 1e-12 * scale || ub.abs() > 1e-12 * scale {
            return Err(Error::InvalidData(format!(
                "even-parity reduced Ritz needs u(a) = u(b) = 0, got {ua:e}, {ub:e}"
            )));
        }
    }
    if space.degree() == 0 {
        return l2_reduced(reduced, u);
    }
    let a = b_mat.transpose() * assemble_gram(space, 1)?.to_dense() * b_mat;
    let load = DVector::from_vec(assemble_load(space, u, 1, DEFAULT_OVERSAMPLE)?);
    let rhs: Vec<f64> = (b_mat.transpose() * load).iter().copied().collect();
    let (c, constraint) = match reduced.parity {
        Parity::Even => (solve_dense_kkt(&a, &DMatrix::zeros(0, a.nrows()), &rhs, &[])?, None),
        Parity::Odd => {
            let mean_row = moment_matrix(space, 1)? * b_mat;
            let mean = moment_rhs(space, u, 1, DEFAULT_OVERSAMPLE)?;
            (solve_dense_kkt(&a, &mean_row, &rhs, &mean)?, Some(mean[0]))
        }
    };
    let ac: Vec<f64> = (&a * DVector::from_column_slice(&c.x)).iter().copied().collect();
    let scale = constraint.map_or(1.0, |m| m.abs().max(1.0));
    Ok(ProjectionResult {
        diagnostics: Diagnostics {
            orthogonality_residual: relative_residual(&ac, &rhs),
            constraint_residual: c.constraint_residual / scale,
            condition_estimate: c.condition,
        },
        spline: reduced.element(&c.x)?,
    })
}

fn l2_reduced(reduced: &ReducedSpace, u: &TestFunction) -> Result<ProjectionResult> {
    let space = reduced.parent();
    if reduced.dim() == space.dim() {
        return l2_project(space, u);
    }
    let b_mat = reduced.basis();
    let m = b_mat.transpose() * assemble_gram(space, 0)?.to_dense() * b_mat;
    let load = DVector::from_vec(assemble_load(space, u, 0, DEFAULT_OVERSAMPLE)?);
    let rhs: Vec<f64> = (b_mat.transpose() * load).iter().copied().collect();
    let sol = solve_dense_kkt(&m, &DMatrix::zeros(0, m.nrows()), &rhs, &[])?;
    let ac: Vec<f64> = (&m * DVector::from_column_slice(&sol.x)).iter().copied().collect();
    Ok(ProjectionResult {
        diagnostics: Diagnostics {
            orthogonality_residual: relative_residual(&ac, &rhs),
            constraint_residual: 0.0,
            condition_estimate: sol.condition,
        },
        spline: reduced.element(&sol.x)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spline::KnotSequence;

    fn smooth(n: usize, p: usize) -> SplineSpace {
        SplineSpace::maximal(KnotSequence::uniform(0.0, 1.0, n).unwrap(), p).unwrap()
    }

    #[test]
    fn degree_zero_odd_is_full_space() {
        for variant in [Variant::Strict, Variant::Bar] {
            let r = build_reduced_space(&smooth(4, 0), Parity::Odd, variant).unwrap();
            assert_eq!(r.dim(), 5);
        }
        let r = build_reduced_space(&smooth(4, 0), Parity::Even, Variant::Bar).unwrap();
        assert_eq!(r.dim(), 5);
        let r = build_reduced_space(&smooth(4, 0), Parity::Even, Variant::Strict).unwrap();
        assert_eq!(r.dim(), 3);
        assert_eq!(
            build_reduced_space(&smooth(0, 0), Parity::Even, Variant::Strict).unwrap_err(),
            Error::EmptySpace
        );
    }

    #[test]
    fn linear_odd_strict_drops_two() {
        let s = SplineSpace::maximal(KnotSequence::new(vec![0.0, 0.3, 0.45, 1.0]).unwrap(), 1).unwrap();
        let r = build_reduced_space(&s, Parity::Odd, Variant::Strict).unwrap();
        assert_eq!(r.dim(), s.dim() - 2);
    }

    #[test]
    fn even_members_vanish_at_ends() {
        for p in 1..=5 {
            let r = build_reduced_space(&smooth(6, p), Parity::Even, Variant::Strict).unwrap();
            for j in 0..r.dim() {
                let mut c = vec![0.0; r.dim()];
                c[j] = 1.0;
                let s = r.element(&c).unwrap();
                for alpha in r.orders() {
                    assert!(s.eval(0.0, alpha).unwrap().abs() < 1e-10);
                    assert!(s.eval(1.0, alpha).unwrap().abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn needs_maximal_smoothness() {
        let s = SplineSpace::new(KnotSequence::uniform(0.0, 1.0, 2).unwrap(), 3, 1).unwrap();
        assert!(build_reduced_space(&s, Parity::Odd, Variant::Bar).is_err());
    }

    #[test]
    fn odd_parity_keeps_constants() {
        let r = build_reduced_space(&smooth(5, 3), Parity::Odd, Variant::Strict).unwrap();
        let p = ritz_reduced(&r, &TestFunction::constant(1.0)).unwrap();
        for i in 0..=20 {
            assert!((p.eval(i as f64 / 20.0, 0).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn even_parity_rejects_boundary_data() {
        let r = build_reduced_space(&smooth(5, 3), Parity::Even, Variant::Strict).unwrap();
        assert!(matches!(
            ritz_reduced(&r, &TestFunction::constant(1.0)),
            Err(Error::InvalidData(_))
        ));
    }
}
