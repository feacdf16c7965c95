use super::constants::{Direction, GeometryConstants, NormFlavor};
use super::map::GeometryMap;
use crate::constants::c_hpkr_value;
use crate::error::{Error, Result};
use crate::projection::ERROR_NORM_EXTRA_POINTS;
use crate::quadrature::gauss_legendre;
use crate::tensor::{
    axis_rules, integrate_box, tensor_error_norm, tensor_project, FieldFunction, ProjectorKind, TensorFunction,
    TensorSpace,
};
use serde::Serialize;
use std::f64::consts::PI;

fn unit(c: usize) -> [usize; 2] {
    let mut o = [0, 0];
    o[c] = 1;
    o
}

fn pullback_value(u: &FieldFunction, g: &GeometryMap, x: [f64; 2], o: [usize; 2]) -> Result<f64> {
    let e = g.elements_of(x)?;
    let y = [g.derivative_on(0, [0, 0], x, e)?, g.derivative_on(1, [0, 0], x, e)?];
    let du = |ord: [usize; 2]| u.eval(&y, &ord);
    match o {
        [0, 0] => du([0, 0]),
        [1, 0] | [0, 1] => {
            let i = o[1];
            let j = g.jacobian_on(x, e)?;
            Ok(du([1, 0])? * j[0][i] + du([0, 1])? * j[1][i])
        }
        [1, 1] => {
            let j = g.jacobian_on(x, e)?;
            let mut s = 0.0;
            for c in 0..2 {
                for d in 0..2 {
                    let mut ord = unit(c);
                    ord[d] += 1;
                    s += du(ord)? * j[c][0] * j[d][1];
                }
                s += du(unit(c))? * g.derivative_on(c, [1, 1], x, e)?;
            }
            Ok(s)
        }
        _ => Err(Error::MissingDerivative {
            requested: o[0].max(o[1]),
            available: 1,
        }),
    }
}

/// `u = ũ ∘ G` on the unit square with partials up to `∂_1 ∂_2` (chain
/// rule). Split points are the map's interior knots.
pub fn pullback(u: &FieldFunction, g: &GeometryMap) -> Result<FieldFunction> {
    if u.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: u.dim(),
        });
    }
    let max_order = if u.max_order() >= 2 { 1 } else { 0 };
    let (uu, gg) = (u.clone(), g.clone());
    let [px, py] = g.partition();
    Ok(FieldFunction::new(format!("{}∘G", u.name()), 2, max_order, move |x, o| {
        pullback_value(&uu, &gg, [x[0], x[1]], [o[0], o[1]]).unwrap_or(f64::NAN)
    })
    .with_breakpoints(0, px.interior().to_vec())
    .with_breakpoints(1, py.interior().to_vec()))
}

/// A projection computed on the parameter domain and pushed forward by `G`.
#[derive(Debug, Clone, PartialEq)]
pub struct MappedResult {
    pub map: GeometryMap,
    pub kind: ProjectorKind,
    /// `Π(ũ ∘ G)` on the unit square.
    pub spline: TensorFunction,
}

fn inverse(j: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    [[j[1][1] / det, -j[0][1] / det], [-j[1][0] / det, j[0][0] / det]]
}

impl MappedResult {
    /// Value at the physical point `G(x)`.
    pub fn eval_parametric(&self, x: [f64; 2]) -> Result<f64> {
        self.spline.eval(&x, &[0, 0])
    }

    /// Physical partial `∂̃_1^{ℓ_1} ∂̃_2^{ℓ_2}` of `s ∘ G⁻¹` at `G(x)`.
    fn physical_derivative(&self, elems: &[usize], x: [f64; 2], ell: [usize; 2]) -> Result<f64> {
        let s = |o: [usize; 2]| self.spline.eval_on_element(elems, &x, &o);
        if ell == [0, 0] {
            return s([0, 0]);
        }
        let g = &self.map;
        let e = g.elements_of(x)?;
        let jinv = inverse(g.jacobian_on(x, e)?);
        let grad = [s([1, 0])?, s([0, 1])?];
        // ∇s = Jᵀ ∇̃s̃
        let phys = [
            jinv[0][0] * grad[0] + jinv[1][0] * grad[1],
            jinv[0][1] * grad[0] + jinv[1][1] * grad[1],
        ];
        match ell {
            [1, 0] => Ok(phys[0]),
            [0, 1] => Ok(phys[1]),
            [1, 1] => {
                // ∇²s = Jᵀ ∇̃²s̃ J + Σ_c (∇̃s̃)_c ∇²G_c
                let mut m = [[s([2, 0])?, s([1, 1])?], [s([1, 1])?, s([0, 2])?]];
                for (c, pc) in phys.iter().enumerate() {
                    let h = [
                        [g.derivative_on(c, [2, 0], x, e)?, g.derivative_on(c, [1, 1], x, e)?],
                        [g.derivative_on(c, [1, 1], x, e)?, g.derivative_on(c, [0, 2], x, e)?],
                    ];
                    for a in 0..2 {
                        for b in 0..2 {
                            m[a][b] -= pc * h[a][b];
                        }
                    }
                }
                let mut v = 0.0;
                for a in 0..2 {
                    for b in 0..2 {
                        v += jinv[a][0] * m[a][b] * jinv[b][1];
                    }
                }
                Ok(v)
            }
            _ => Err(Error::DerivativeOrder {
                order: ell[0].max(ell[1]),
                max: 1,
            }),
        }
    }

    /// `‖∂̃^ℓ(ũ − Π̃ũ)‖_{L²(Ω̃)}`, pulled back to the unit square with weight
    /// `|det ∇G|`; `ℓ_i ∈ {0, 1}`.
    pub fn physical_error(&self, u: &FieldFunction, ell: [usize; 2]) -> Result<f64> {
        u.require(&ell)?;
        let pulled = pullback(u, &self.map)?;
        let rules = axis_rules(self.spline.space(), &pulled, |p| p + 1 + ERROR_NORM_EXTRA_POINTS)?;
        let g = &self.map;
        let sq = integrate_box(&rules, |e, x| {
            let x = [x[0], x[1]];
            let ge = g.elements_of(x)?;
            let y = g.point(x)?;
            let d = u.eval(&y, &ell)? - self.physical_derivative(e, x, ell)?;
            Ok(d * d * g.det_on(x, ge)?.abs())
        })?;
        Ok(sq.sqrt())
    }

    /// `‖∂^ℓ(u − Πu)‖_{L²(Ω)}` for `u = ũ ∘ G` on the parameter domain.
    pub fn parametric_error(&self, u: &FieldFunction, ell: [usize; 2]) -> Result<f64> {
        tensor_error_norm(&pullback(u, &self.map)?, &self.spline, &ell)
    }
}

/// `Π̃ũ = (Π(ũ ∘ G)) ∘ G⁻¹`, with `Π` the tensor projector of the given kind.
pub fn mapped_project(g: &GeometryMap, tspace: &TensorSpace, u: &FieldFunction, kind: ProjectorKind) -> Result<MappedResult> {
    for s in tspace.spaces() {
        if s.a() != 0.0 || s.b() != 1.0 {
            return Err(Error::InvalidDomain { a: s.a(), b: s.b() });
        }
    }
    g.det_range(super::DEFAULT_RESOLUTION)?;
    let pulled = pullback(u, g)?;
    Ok(MappedResult {
        map: g.clone(),
        kind,
        spline: tensor_project(tspace, &pulled, kind)?,
    })
}

/// `‖∂̃^j ũ‖_{L²(Ω̃)}` for all `1 <= |j| <= r`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhysicalSeminorms {
    pub r: usize,
    pub values: Vec<([usize; 2], f64)>,
}

impl PhysicalSeminorms {
    /// 24-point Gauss on four sub-pieces of every map element, weighted by
    /// `|det ∇G|`.
    pub fn measure(g: &GeometryMap, u: &FieldFunction, r: usize) -> Result<Self> {
        let gl = gauss_legendre(24)?;
        let rules: Vec<Vec<(usize, f64, f64)>> = g
            .partition()
            .iter()
            .map(|k| {
                let mut rule = Vec::new();
                for (e, (l, r)) in k.elements().enumerate() {
                    for q in 0..4 {
                        let a = l + (r - l) * q as f64 / 4.0;
                        let b = l + (r - l) * (q + 1) as f64 / 4.0;
                        rule.extend(gl.mapped(a, b).map(|(x, w)| (e, x, w)));
                    }
                }
                rule
            })
            .collect();
        let values = GeometryConstants::multi_indices(r)
            .into_iter()
            .map(|j| {
                u.require(&j)?;
                let sq = integrate_box(&rules, |e, x| {
                    let x = [x[0], x[1]];
                    let e = [e[0], e[1]];
                    let y = [g.derivative_on(0, [0, 0], x, e)?, g.derivative_on(1, [0, 0], x, e)?];
                    let v = u.eval(&y, &j)?;
                    Ok(v * v * g.det_on(x, e)?.abs())
                })?;
                Ok((j, sq.sqrt()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { r, values })
    }

    pub fn get(&self, j: [usize; 2]) -> Option<f64> {
        self.values.iter().find(|(k, _)| *k == j).map(|(_, v)| *v)
    }
}

/// The bent-geometry hypotheses for the mesh flavor: map breaks are knots
/// of the approximation space and `G ∈ W^{k_i+1,∞}`.
fn check_geometry_class(g: &GeometryMap, tspace: &TensorSpace, r: usize, flavor: NormFlavor) -> Result<()> {
    if flavor == NormFlavor::Global {
        return Ok(());
    }
    let part = g.partition();
    for (axis, (k, s)) in part.iter().zip(tspace.spaces()).enumerate() {
        for &t in k.interior() {
            if !s.knots().breaks().iter().any(|&b| (b - t).abs() <= 1e-12) {
                return Err(Error::precondition(
                    "geometry-mesh",
                    format!("map break {t} in direction {axis} is not a knot of the approximation space"),
                ));
            }
        }
        if let Some(kg) = g.smoothness() {
            let need = s.smoothness().min(r as i32 - 1);
            if kg < need {
                return Err(Error::precondition(
                    "geometry-smoothness",
                    format!("map smoothness C^{kg} below the required C^{need}"),
                ));
            }
        }
    }
    Ok(())
}

/// `C_G Σ_j (Σ_i C_{h_i,p_i,k_i,r} C_{G,i,r,j}) ‖∂̃^j ũ‖` for the mapped
/// L2-projection.
pub fn mapped_l2_bound(tspace: &TensorSpace, g: &GeometryMap, consts: &GeometryConstants, sem: &PhysicalSeminorms) -> Result<f64> {
    check_geometry_class(g, tspace, consts.r, consts.flavor)?;
    let r = consts.r;
    let c: Vec<f64> = tspace
        .spaces()
        .iter()
        .map(|s| c_hpkr_value(s.knots().h(), s.degree(), s.smoothness(), r, s.knots().length()))
        .collect::<Result<_>>()?;
    let mut sum = 0.0;
    for j in GeometryConstants::multi_indices(r) {
        let inner: f64 = (0..2)
            .map(|i| c[i] * consts.get(Direction::Axis(i), j).unwrap_or(0.0))
            .sum();
        sum += inner * sem.get(j).ok_or(Error::MissingDerivative {
            requested: j[0] + j[1],
            available: sem.r,
        })?;
    }
    Ok(consts.c_g * sum)
}

/// `C_G (h/π)^{2-ℓ_1-ℓ_2} Σ_{|j| <= 2} (C_{G,1,2,j} + C_{G,2,2,j} + C_{G,12,2,j}) ‖∂̃^j ũ‖`
/// for the mapped first-order Ritz and Q projections onto maximally smooth
/// spaces with `p_i >= 1`, `r = 2`.
pub fn mapped_first_order_bound(
    tspace: &TensorSpace,
    g: &GeometryMap,
    consts: &GeometryConstants,
    sem: &PhysicalSeminorms,
    ell: [usize; 2],
) -> Result<f64> {
    if consts.r != 2 {
        return Err(Error::precondition("sobolev-order", format!("needs r = 2, got {}", consts.r)));
    }
    if let Some(&l) = ell.iter().find(|&&l| l > 1) {
        return Err(Error::DerivativeOrder { order: l, max: 1 });
    }
    for s in tspace.spaces() {
        if s.degree() == 0 || !s.is_maximally_smooth() {
            return Err(Error::precondition(
                "maximal-smoothness",
                format!("needs k = p - 1 >= 0, got p = {}, k = {}", s.degree(), s.smoothness()),
            ));
        }
    }
    check_geometry_class(g, tspace, 2, consts.flavor)?;
    let mut sum = 0.0;
    for j in GeometryConstants::multi_indices(2) {
        let cj: f64 = [Direction::Axis(0), Direction::Axis(1), Direction::Mixed]
            .iter()
            .map(|&d| consts.get(d, j).unwrap_or(0.0))
            .sum();
        sum += cj * sem.get(j).ok_or(Error::MissingDerivative {
            requested: j[0] + j[1],
            available: sem.r,
        })?;
    }
    let h = tspace.h();
    Ok(consts.c_g * (h / PI).powi(2 - (ell[0] + ell[1]) as i32) * sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{catalog_map, geometry_constants, DEFAULT_RESOLUTION};
    use crate::target::TestFunction;

    fn sin_sin() -> FieldFunction {
        let f = TestFunction::new("sin", 16, |x, d| PI.powi(d as i32) * (PI * x + d as f64 * PI / 2.0).sin());
        FieldFunction::separable(vec![f.clone(), f])
    }

    #[test]
    fn identity_map_is_the_parametric_projector() {
        let t = TensorSpace::uniform(2, 3, 2, 1).unwrap();
        let u = sin_sin();
        let m = mapped_project(&GeometryMap::Identity, &t, &u, ProjectorKind::Ritz).unwrap();
        let direct = crate::tensor::tensor_ritz_project(&t, &u).unwrap();
        for (a, b) in m.spline.coeffs().iter().zip(direct.coeffs()) {
            assert!((a - b).abs() < 1e-13);
        }
        for ell in [[0, 0], [1, 0], [1, 1]] {
            let a = m.physical_error(&u, ell).unwrap();
            let b = m.parametric_error(&u, ell).unwrap();
            assert!((a - b).abs() < 1e-12 * b, "{ell:?}");
        }
    }

    #[test]
    fn physical_derivatives_of_a_pushed_forward_polynomial() {
        // ũ(x̃, ỹ) = x̃ ỹ is reproduced exactly only when G is affine; the
        // physical error of a member pushed forward must then vanish.
        let g = catalog_map("affine").unwrap();
        let u = FieldFunction::new("xy", 2, 2, |x, o| match (o[0], o[1]) {
            (0, 0) => x[0] * x[1],
            (1, 0) => x[1],
            (0, 1) => x[0],
            (1, 1) => 1.0,
            _ => 0.0,
        });
        let t = TensorSpace::uniform(2, 2, 2, 1).unwrap();
        let m = mapped_project(&g, &t, &u, ProjectorKind::L2).unwrap();
        for ell in [[0, 0], [1, 0], [0, 1], [1, 1]] {
            assert!(m.physical_error(&u, ell).unwrap() < 1e-10, "{ell:?}");
        }
    }

    #[test]
    fn first_order_bound_on_bent_map() {
        let g = catalog_map("quadratic-spline").unwrap();
        let u = sin_sin();
        let consts = geometry_constants(&g, 2, NormFlavor::Mesh, DEFAULT_RESOLUTION).unwrap();
        let sem = PhysicalSeminorms::measure(&g, &u, 2).unwrap();
        for p in 1..=3 {
            let t = TensorSpace::uniform(2, 3, p, p as i32 - 1).unwrap();
            let m = mapped_project(&g, &t, &u, ProjectorKind::Ritz).unwrap();
            for ell in [[0, 0], [1, 0], [0, 1], [1, 1]] {
                let err = m.physical_error(&u, ell).unwrap();
                let bound = mapped_first_order_bound(&t, &g, &consts, &sem, ell).unwrap();
                assert!(err <= bound, "p={p} {ell:?}: {err} > {bound}");
            }
        }
    }

    #[test]
    fn mesh_flavor_needs_aligned_knots() {
        let g = catalog_map("quadratic-spline").unwrap();
        let consts = geometry_constants(&g, 2, NormFlavor::Mesh, 4).unwrap();
        let sem = PhysicalSeminorms::measure(&g, &sin_sin(), 2).unwrap();
        let t = TensorSpace::uniform(2, 2, 2, 1).unwrap();
        assert!(matches!(
            mapped_first_order_bound(&t, &g, &consts, &sem, [0, 0]),
            Err(Error::Precondition { name: "geometry-mesh", .. })
        ));
    }
}
