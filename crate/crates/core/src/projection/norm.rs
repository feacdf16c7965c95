use crate::assembly::pieces;
use crate::error::Result;
use crate::quadrature::gauss_legendre;
use crate::spline::{KnotSequence, SplineFunction};
use crate::target::TestFunction;

/// Gauss points per piece beyond `p + 1` when measuring errors.
pub const ERROR_NORM_EXTRA_POINTS: usize = 16;

/// `‖∂^ℓ(u − s)‖_{L²(a,b)}`, with the derivative of `s` taken piecewise.
pub fn error_norm(u: &TestFunction, s: &SplineFunction, ell: usize) -> Result<f64> {
    u.require(ell)?;
    let space = s.space();
    let g = gauss_legendre(space.degree() + 1 + ERROR_NORM_EXTRA_POINTS)?;
    let mut sum = 0.0;
    for (elem, l, r) in pieces(space.knots(), u.breakpoints()) {
        for (x, w) in g.mapped(l, r) {
            let d = u.eval(x, ell)? - s.eval_on_element(elem, x, ell)?;
            sum += w * d * d;
        }
    }
    Ok(sum.sqrt())
}

/// `‖∂^r u‖` on the span of `knots`: the closed form when the target has
/// one, otherwise 24-point Gauss per piece (elements split at the target's
/// break points).
pub fn seminorm(u: &TestFunction, r: usize, knots: &KnotSequence) -> Result<f64> {
    u.require(r)?;
    if let Some(v) = u.exact_seminorm(r, knots.a(), knots.b()) {
        return Ok(v);
    }
    let g = gauss_legendre(24)?;
    let mut sum = 0.0;
    for (_, l, rr) in pieces(knots, u.breakpoints()) {
        for (x, w) in g.mapped(l, rr) {
            let v = u.eval(x, r)?;
            sum += w * v * v;
        }
    }
    Ok(sum.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spline::SplineSpace;
    use std::f64::consts::PI;

    #[test]
    fn zero_error_for_zero_data() {
        let s = SplineSpace::new(KnotSequence::uniform(0.0, 1.0, 3).unwrap(), 2, 1).unwrap();
        let z = SplineFunction::zero(s);
        assert_eq!(error_norm(&TestFunction::constant(0.0), &z, 0).unwrap(), 0.0);
    }

    #[test]
    fn sine_against_zero() {
        let s = SplineSpace::new(KnotSequence::uniform(0.0, 1.0, 3).unwrap(), 2, 1).unwrap();
        let z = SplineFunction::zero(s);
        let u = TestFunction::new("sin", 2, |x, d| match d {
            0 => (2.0 * PI * x).sin(),
            1 => 2.0 * PI * (2.0 * PI * x).cos(),
            _ => -4.0 * PI * PI * (2.0 * PI * x).sin(),
        });
        let e = error_norm(&u, &z, 0).unwrap();
        assert!((e - 0.5f64.sqrt()).abs() < 1e-10);
        let semi = seminorm(&u, 1, z.space().knots()).unwrap();
        assert!((semi - 2.0 * PI / 2f64.sqrt()).abs() < 1e-10);
    }
}
