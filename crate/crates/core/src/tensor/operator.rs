use crate::assembly::{assemble_gram, load_matrix, moment_matrix, PointRule, DEFAULT_OVERSAMPLE};
use crate::error::{Error, Result};
use crate::spline::{SplineFunction, SplineSpace};
use crate::target::TestFunction;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Univariate projector family used in each tensor direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProjectorKind {
    L2,
    /// First-order Ritz projection (stiffness plus mean).
    Ritz,
    /// Boundary-interpolating projection `u(a) + K Z ∂u`.
    Q,
}

impl ProjectorKind {
    /// Derivative order of the data the projector reads.
    pub fn data_order(self) -> usize {
        match self {
            ProjectorKind::L2 => 0,
            ProjectorKind::Ritz | ProjectorKind::Q => 1,
        }
    }
}

/// Samples of `∂^order u` at `points`, turned into coefficients by `matrix`.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    pub order: usize,
    pub points: Vec<f64>,
    pub matrix: DMatrix<f64>,
}

/// A univariate projector written as `Π u = Σ_c M_c [∂^{o_c} u(x_{c,j})]_j`.
///
/// Tensor-product projectors apply one of these along every axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorMatrix {
    kind: ProjectorKind,
    dim: usize,
    channels: Vec<Channel>,
}

fn rule_for(space: &SplineSpace, breaks: &[f64]) -> Result<PointRule> {
    PointRule::composite(space.knots(), breaks, space.degree() + 1 + DEFAULT_OVERSAMPLE)
}

/// `M⁻¹ W` for the L2-projection from samples on `rule`.
fn l2_matrix(space: &SplineSpace, rule: &PointRule) -> Result<DMatrix<f64>> {
    let chol = assemble_gram(space, 0)?.cholesky()?;
    let w = load_matrix(space, rule, 0)?;
    let mut out = DMatrix::zeros(space.dim(), rule.len());
    for j in 0..rule.len() {
        let col: Vec<f64> = w.column(j).iter().copied().collect();
        out.set_column(j, &DVector::from_vec(chol.solve(&col)));
    }
    Ok(out)
}

impl ProjectorMatrix {
    /// Materializes the projector onto `space`; `breaks` are extra split
    /// points of the data (where its derivatives jump).
    pub fn build(space: &SplineSpace, kind: ProjectorKind, breaks: &[f64]) -> Result<Self> {
        let dim = space.dim();
        let channels = match kind {
            ProjectorKind::L2 => {
                let rule = rule_for(space, breaks)?;
                vec![Channel {
                    order: 0,
                    matrix: l2_matrix(space, &rule)?,
                    points: rule.points,
                }]
            }
            ProjectorKind::Ritz => {
                if space.smoothness() < 0 {
                    return Err(Error::NonconformingOrder { order: 1, max: 0 });
                }
                let rule = rule_for(space, breaks)?;
                let n = rule.len();
                let a = assemble_gram(space, 1)?.to_dense();
                let c = moment_matrix(space, 1)?;
                let mut k = DMatrix::zeros(dim + 1, dim + 1);
                k.view_mut((0, 0), (dim, dim)).copy_from(&a);
                for j in 0..dim {
                    k[(dim, j)] = c[(0, j)];
                    k[(j, dim)] = c[(0, j)];
                }
                let mut rhs_d = DMatrix::zeros(dim + 1, n);
                rhs_d.view_mut((0, 0), (dim, n)).copy_from(&load_matrix(space, &rule, 1)?);
                let mut rhs_v = DMatrix::zeros(dim + 1, n);
                for (j, &w) in rule.weights.iter().enumerate() {
                    rhs_v[(dim, j)] = w;
                }
                let lu = k.lu();
                let solve = |b: &DMatrix<f64>| {
                    lu.solve(b)
                        .map(|x| x.rows(0, dim).into_owned())
                        .ok_or_else(|| Error::SingularSystem("bordered Ritz system".into()))
                };
                vec![
                    Channel {
                        order: 1,
                        matrix: solve(&rhs_d)?,
                        points: rule.points.clone(),
                    },
                    Channel {
                        order: 0,
                        matrix: solve(&rhs_v)?,
                        points: rule.points,
                    },
                ]
            }
            ProjectorKind::Q => {
                let dspace = space.derivative_space()?;
                let rule = rule_for(space, breaks)?;
                let z = l2_matrix(&dspace, &rule)?;
                let mut anti = DMatrix::zeros(dim, dspace.dim());
                for j in 0..dspace.dim() {
                    let mut e = vec![0.0; dspace.dim()];
                    e[j] = 1.0;
                    let g = SplineFunction::new(dspace.clone(), e)?;
                    let s = SplineFunction::antiderivative(space, &g, 0.0)?;
                    anti.set_column(j, &DVector::from_column_slice(s.coeffs()));
                }
                vec![
                    Channel {
                        order: 0,
                        points: vec![space.a()],
                        // partition of unity: the constant 1 has unit coefficients
                        matrix: DMatrix::from_element(dim, 1, 1.0),
                    },
                    Channel {
                        order: 1,
                        matrix: anti * z,
                        points: rule.points,
                    },
                ]
            }
        };
        Ok(Self {
            kind,
            dim,
            channels,
        })
    }

    pub fn kind(&self) -> ProjectorKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    /// Coefficients of the projection of a univariate target.
    pub fn apply(&self, u: &TestFunction) -> Result<Vec<f64>> {
        let mut out = DVector::zeros(self.dim);
        for ch in &self.channels {
            let data = ch
                .points
                .iter()
                .map(|&x| u.eval(x, ch.order))
                .collect::<Result<Vec<f64>>>()?;
            out += &ch.matrix * DVector::from_vec(data);
        }
        Ok(out.iter().copied().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projection::{l2_project, q_project, ritz_project};
    use crate::spline::KnotSequence;

    fn target() -> TestFunction {
        TestFunction::new("exp", 8, |x, d| 1.7f64.powi(d as i32) * (1.7 * x).exp())
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-10 * (1.0 + y.abs()))
    }

    #[test]
    fn matches_direct_projectors() {
        let u = target();
        for (p, k) in [(1, 0), (2, 1), (3, 1), (4, 3), (2, 0)] {
            let s = SplineSpace::new(KnotSequence::new(vec![0.0, 0.2, 0.5, 0.55, 1.0]).unwrap(), p, k).unwrap();
            let l2 = ProjectorMatrix::build(&s, ProjectorKind::L2, &[]).unwrap().apply(&u).unwrap();
            assert!(close(&l2, l2_project(&s, &u).unwrap().spline.coeffs()));
            let r = ProjectorMatrix::build(&s, ProjectorKind::Ritz, &[]).unwrap().apply(&u).unwrap();
            assert!(close(&r, ritz_project(&s, &u, 1).unwrap().spline.coeffs()), "ritz p={p} k={k}");
            let q = ProjectorMatrix::build(&s, ProjectorKind::Q, &[]).unwrap().apply(&u).unwrap();
            assert!(close(&q, q_project(&s, &u).unwrap().spline.coeffs()), "q p={p} k={k}");
        }
    }

    #[test]
    fn ritz_needs_continuity() {
        let s = SplineSpace::new(KnotSequence::uniform(0.0, 1.0, 2).unwrap(), 2, -1).unwrap();
        assert!(ProjectorMatrix::build(&s, ProjectorKind::Ritz, &[]).is_err());
        assert!(ProjectorMatrix::build(&s, ProjectorKind::Q, &[]).is_err());
    }
}
