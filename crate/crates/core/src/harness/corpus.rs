use crate::error::{Error, Result};
use crate::target::TestFunction;
use num_complex::Complex64;
use serde_json::{Map, Value};
use std::f64::consts::PI;

/// Identifiers accepted by [`corpus`].
pub const CORPUS: [&str; 5] = ["sin", "poly", "exp", "runge", "piecewise_c1"];

/// Derivative orders offered by the smooth targets.
const SMOOTH_ORDER: usize = 40;

fn number(params: &Map<String, Value>, key: &str, default: f64) -> Result<f64> {
    match params.get(key) {
        None => Ok(default),
        Some(v) => v
            .as_f64()
            .filter(|x| x.is_finite())
            .ok_or_else(|| Error::Config(format!("target parameter `{key}` must be a finite number"))),
    }
}

fn check_keys(id: &str, params: &Map<String, Value>, allowed: &[&str]) -> Result<()> {
    match params.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(Error::Config(format!("unknown parameter `{k}` for target `{id}`"))),
        None => Ok(()),
    }
}

/// `u(x) = sin(ω x + φ)`.
pub fn sin_target(omega: f64, phase: f64) -> TestFunction {
    TestFunction::new("sin", SMOOTH_ORDER, move |x, d| {
        omega.powi(d as i32) * (omega * x + phase + d as f64 * PI / 2.0).sin()
    })
    .with_seminorm(move |r, a, b| {
        let psi = phase + r as f64 * PI / 2.0;
        let sq = if omega == 0.0 {
            if r > 0 {
                0.0
            } else {
                psi.sin().powi(2) * (b - a)
            }
        } else {
            let w = omega.powi(2 * r as i32);
            w * ((b - a) / 2.0 - ((2.0 * (omega * b + psi)).sin() - (2.0 * (omega * a + psi)).sin()) / (4.0 * omega))
        };
        Some(sq.max(0.0).sqrt())
    })
}

/// `u(x) = e^{λ x}`.
pub fn exp_target(rate: f64) -> TestFunction {
    TestFunction::new("exp", SMOOTH_ORDER, move |x, d| rate.powi(d as i32) * (rate * x).exp())
        .with_seminorm(move |r, a, b| {
            let sq = if rate == 0.0 {
                if r > 0 {
                    0.0
                } else {
                    b - a
                }
            } else {
                rate.powi(2 * r as i32) * ((2.0 * rate * b).exp() - (2.0 * rate * a).exp()) / (2.0 * rate)
            };
            Some(sq.sqrt())
        })
}

/// `u(x) = 1 / (1 + c² x²) = Re 1/(1 - i c x)`, with
/// `u^{(n)} = Re n! (i c)^n / (1 - i c x)^{n+1}`.
pub fn runge_target(c: f64) -> TestFunction {
    TestFunction::new("runge", SMOOTH_ORDER, move |x, d| {
        let z = Complex64::new(1.0, -c * x);
        let fact: f64 = (1..=d).map(|v| v as f64).product();
        let num = Complex64::new(0.0, c).powu(d as u32) * fact;
        (num / z.powu(d as u32 + 1)).re
    })
}

/// `u(x) = x³ + s (x - x₀)|x - x₀|`: `C¹`, piecewise cubic, second
/// derivative jumps by `4s` at `x₀`.
pub fn piecewise_c1_target(x0: f64, s: f64) -> TestFunction {
    TestFunction::new("piecewise_c1", 2, move |x, d| {
        let t = x - x0;
        match d {
            0 => x.powi(3) + s * t * t.abs(),
            1 => 3.0 * x * x + 2.0 * s * t.abs(),
            _ => 6.0 * x + 2.0 * s * if t < 0.0 { -1.0 } else { 1.0 },
        }
    })
    .with_breakpoints(vec![x0])
}

/// Target `id` with JSON parameters:
/// - `sin`: `omega` (default `2π`), `phase` (0);
/// - `poly`: `coeffs` (monomial, lowest first) or `degree` (all ones);
/// - `exp`: `rate` (1);
/// - `runge`: `c` (5);
/// - `piecewise_c1`: `x0` (0.5), `s` (1).
pub fn corpus(id: &str, params: &Map<String, Value>) -> Result<TestFunction> {
    match id {
        "sin" => {
            check_keys(id, params, &["omega", "phase"])?;
            Ok(sin_target(number(params, "omega", 2.0 * PI)?, number(params, "phase", 0.0)?))
        }
        "poly" => {
            check_keys(id, params, &["coeffs", "degree"])?;
            let coeffs: Vec<f64> = match (params.get("coeffs"), params.get("degree")) {
                (Some(c), None) => serde_json::from_value(c.clone())
                    .map_err(|e| Error::Config(format!("poly coeffs: {e}")))?,
                (None, Some(d)) => {
                    let d = d
                        .as_u64()
                        .ok_or_else(|| Error::Config("poly degree must be a non-negative integer".into()))?;
                    vec![1.0; d as usize + 1]
                }
                (None, None) => vec![1.0],
                (Some(_), Some(_)) => return Err(Error::Config("give either coeffs or degree for poly".into())),
            };
            if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::Config("poly coeffs must be a non-empty list of finite numbers".into()));
            }
            Ok(TestFunction::polynomial(&coeffs))
        }
        "exp" => {
            check_keys(id, params, &["rate"])?;
            Ok(exp_target(number(params, "rate", 1.0)?))
        }
        "runge" => {
            check_keys(id, params, &["c"])?;
            Ok(runge_target(number(params, "c", 5.0)?))
        }
        "piecewise_c1" => {
            check_keys(id, params, &["x0", "s"])?;
            Ok(piecewise_c1_target(number(params, "x0", 0.5)?, number(params, "s", 1.0)?))
        }
        other => Err(Error::UnknownId(other.to_string())),
    }
}

/// `∫_a^b (∂^r u)²` by composite 24-point Gauss on 64 cells.
#[cfg(test)]
pub(crate) fn quadrature_seminorm(u: &TestFunction, r: usize, a: f64, b: f64) -> f64 {
    let g = crate::quadrature::gauss_legendre(24).unwrap();
    let cells = 64;
    let mut sum = 0.0;
    for c in 0..cells {
        let l = a + (b - a) * c as f64 / cells as f64;
        let rr = a + (b - a) * (c + 1) as f64 / cells as f64;
        for (x, w) in g.mapped(l, rr) {
            sum += w * u.eval(x, r).unwrap().powi(2);
        }
    }
    sum.sqrt()
}
