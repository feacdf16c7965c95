//! Explicit error constants, bound variants, degree-of-freedom metrics and
//! the tables behind the constant plots.

use crate::error::{Error, Result};
use crate::projection::{Parity, Variant};
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::{E, PI};
use std::fmt::Write as _;

/// Relative tolerance under which two candidates count as equal.
pub const TIE_TOLERANCE: f64 = 1e-15;

/// `ln(lo · (lo+1) ⋯ hi)`, zero for an empty range.
fn ln_product(lo: usize, hi: usize) -> f64 {
    (lo.max(1)..=hi).map(|i| (i as f64).ln()).sum()
}

/// `ln sqrt((p+1-r)! / (p+1+r)!)`.
fn ln_sqrt_factorial_ratio(p: usize, r: usize) -> f64 {
    -0.5 * ln_product(p + 2 - r, p + 1 + r)
}

fn check_degree(p: usize, r: usize) -> Result<()> {
    if p + 1 < r {
        return Err(Error::precondition(
            "degree-at-least-r-minus-1",
            format!("need p >= r - 1, got p = {p}, r = {r}"),
        ));
    }
    Ok(())
}

fn check_smoothness(p: usize, k: i32) -> Result<()> {
    if k < -1 || k > p as i32 - 1 {
        return Err(Error::InvalidSmoothness { p, k });
    }
    Ok(())
}

fn check_spacing(h: f64, length: f64) -> Result<()> {
    if !(h > 0.0 && length > 0.0 && h.is_finite() && length.is_finite()) {
        return Err(Error::precondition(
            "positive-spacing",
            format!("need h > 0 and b - a > 0, got h = {h}, b - a = {length}"),
        ));
    }
    Ok(())
}

/// Global polynomial approximation constant
/// `((b-a)/2)^r sqrt((p+1-r)!/(p+1+r)!)`.
pub fn poly_constant(p: usize, r: usize, length: f64) -> Result<f64> {
    check_degree(p, r)?;
    if r == 0 {
        return Ok(1.0);
    }
    Ok((r as f64 * (0.5 * length).ln() + ln_sqrt_factorial_ratio(p, r)).exp())
}

/// The constant `c_{p,k,r}` of the `h^r` estimate for `S^k_p`.
pub fn c_pkr(p: usize, k: i32, r: usize) -> Result<f64> {
    check_degree(p, r)?;
    check_smoothness(p, k)?;
    if r == 0 {
        return Ok(1.0);
    }
    if k == p as i32 - 1 {
        return Ok(PI.powi(-(r as i32)));
    }
    let m = (p as i32 - k) as f64;
    let ln_s = -0.5 * (m * (m + 1.0)).ln();
    let ln_half = -(r as f64) * 2f64.ln();
    let ln_rest = if k >= r as i32 - 2 {
        r as f64 * ln_s
    } else {
        // (p+1-r)! / (p-1+r-2k)!, both arguments nonnegative here
        let top = p + 1 - r;
        let bottom = (p as i32 - 1 + r as i32 - 2 * k) as usize;
        (k + 1) as f64 * ln_s - 0.5 * ln_product(top + 1, bottom)
    };
    Ok((ln_half + ln_rest).exp())
}

/// One named bound value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Candidate {
    pub name: String,
    pub value: f64,
}

/// Candidate values of a bound, their minimum and which one attains it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundBreakdown {
    pub candidates: Vec<Candidate>,
    pub minimum: f64,
    pub argmin: String,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub flags: BTreeMap<String, bool>,
}

impl BoundBreakdown {
    /// Minimum over `candidates`; the first listed wins within the tie
    /// tolerance and the label becomes `"tie"`.
    fn from_candidates(candidates: Vec<Candidate>) -> Self {
        let minimum = candidates.iter().map(|c| c.value).fold(f64::INFINITY, f64::min);
        let close: Vec<&Candidate> = candidates
            .iter()
            .filter(|c| (c.value - minimum).abs() <= TIE_TOLERANCE * minimum.abs())
            .collect();
        let argmin = if close.len() > 1 {
            "tie".to_string()
        } else {
            close[0].name.clone()
        };
        Self {
            minimum,
            argmin,
            candidates,
            flags: BTreeMap::new(),
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.candidates.iter().find(|c| c.name == name).map(|c| c.value)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("breakdown serializes")
    }
}

fn candidate(name: &str, value: f64) -> Candidate {
    Candidate {
        name: name.to_string(),
        value,
    }
}

/// `C_{h,p,k,r} = min{c_{p,k,r} h^r, poly_constant(p, r, b-a)}`.
pub fn c_hpkr(h: f64, p: usize, k: i32, r: usize, length: f64) -> Result<BoundBreakdown> {
    check_spacing(h, length)?;
    let spline = c_pkr(p, k, r)? * h.powi(r as i32);
    let poly = poly_constant(p, r, length)?;
    Ok(BoundBreakdown::from_candidates(vec![
        candidate("spline_h_power", spline),
        candidate("polynomial", poly),
    ]))
}

/// Scalar `C_{h,p,k,r}`.
pub fn c_hpkr_value(h: f64, p: usize, k: i32, r: usize, length: f64) -> Result<f64> {
    Ok(c_hpkr(h, p, k, r, length)?.minimum)
}

/// Bound variants for maximally smooth splines (`k = p-1`).
///
/// Flags: `polynomial_active` when the global polynomial argument is the
/// smaller one, `small_r_sharper` when the small-`r` harmonic form beats the
/// plain harmonic form, i.e. `p > e/(e-2) (r + 2/e - 2)`.
pub fn max_smooth_bounds(h: f64, p: usize, r: usize, length: f64) -> Result<BoundBreakdown> {
    check_spacing(h, length)?;
    check_degree(p, r)?;
    let ri = r as i32;
    let h_pi = (h / PI).powi(ri);
    let poly = poly_constant(p, r, length)?;
    let product: f64 = (0..r)
        .map(|i| c_hpkr_value(h, p - i, p as i32 - i as i32 - 1, 1, length))
        .product::<Result<f64>>()?;
    let harmonic = (2.0 * E * h * length / (E * PI * length + 4.0 * h * (p + 1) as f64)).powi(ri);
    let small_r = (2.0 * h * length / (PI * length + 2.0 * h * (p + 2 - r) as f64)).powi(ri);
    let mut b = BoundBreakdown::from_candidates(vec![
        candidate("h_over_pi", h_pi),
        candidate("polynomial", poly),
        candidate("product", product),
        candidate("harmonic", harmonic),
        candidate("harmonic_small_r", small_r),
    ]);
    b.flags.insert("polynomial_active".into(), poly < h_pi);
    b.flags.insert(
        "small_r_sharper".into(),
        p as f64 > E / (E - 2.0) * (r as f64 + 2.0 / E - 2.0),
    );
    Ok(b)
}

/// `(e h / (4(p-k)))^r`, valid for `k <= p-2`.
pub fn simplified_bound(h: f64, p: usize, k: i32, r: usize) -> Result<f64> {
    check_degree(p, r)?;
    check_smoothness(p, k)?;
    if k == p as i32 - 1 {
        return Err(Error::precondition(
            "not-maximally-smooth",
            "the simplified form needs k <= p - 2; use the maximal-smoothness bounds",
        ));
    }
    Ok((E * h / (4.0 * (p as i32 - k) as f64)).powi(r as i32))
}

/// Parameters of a Ritz-projection estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RitzQuery {
    pub h: f64,
    pub p: usize,
    pub k: i32,
    pub r: usize,
    pub q: usize,
    pub ell: usize,
    pub length: f64,
}

/// Bound on `‖∂^ℓ(u − R^{q,k}_p u)‖ / ‖∂^r u‖`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RitzBound {
    /// `C_{h,p-q,k-q,q-ℓ} C_{h,p-q,k-q,r-q}`.
    pub value: f64,
    /// `(e h / (4(p-k)))^{r-ℓ}`.
    pub simplified: f64,
}

pub fn check_ritz_query(q: &RitzQuery) -> Result<()> {
    check_spacing(q.h, q.length)?;
    check_smoothness(q.p, q.k)?;
    let max_q = ((q.k + 1).max(0) as usize).min(q.r);
    if q.q > max_q {
        return Err(Error::precondition(
            "ritz-order",
            format!("need q <= min(k+1, r) = {max_q}, got q = {}", q.q),
        ));
    }
    if q.ell > q.q {
        return Err(Error::precondition(
            "derivative-order",
            format!("need ell <= q, got ell = {}, q = {}", q.ell, q.q),
        ));
    }
    let need = [q.q as i64, q.r as i64 - 1, 2 * q.q as i64 - q.ell as i64 - 1]
        .into_iter()
        .max()
        .unwrap_or(0);
    if (q.p as i64) < need {
        return Err(Error::precondition(
            "ritz-degree",
            format!("need p >= max(q, r-1, 2q-ell-1) = {need}, got p = {}", q.p),
        ));
    }
    Ok(())
}

pub fn ritz_bound(query: &RitzQuery) -> Result<RitzBound> {
    check_ritz_query(query)?;
    let RitzQuery {
        h,
        p,
        k,
        r,
        q,
        ell,
        length,
    } = *query;
    let (pq, kq) = (p - q, k - q as i32);
    let value = c_hpkr_value(h, pq, kq, q - ell, length)? * c_hpkr_value(h, pq, kq, r - q, length)?;
    let simplified = (E * h / (4.0 * (p as i32 - k) as f64)).powi((r - ell) as i32);
    Ok(RitzBound { value, simplified })
}

/// `h/π` or `ĥ/π` for the reduced-space Ritz projections.
pub fn reduced_bound(parity: Parity, variant: Variant, p: usize, h: f64, h_hat: f64) -> f64 {
    let odd = p % 2 == 1;
    let use_hat = match (variant, parity) {
        (Variant::Bar, _) => false,
        (Variant::Strict, Parity::Odd) => odd,
        (Variant::Strict, Parity::Even) => !odd,
    };
    if use_hat {
        h_hat / PI
    } else {
        h / PI
    }
}

fn check_crossover(p: usize, r: usize, length: f64) -> Result<()> {
    if r == 0 {
        return Err(Error::precondition(
            "positive-order",
            "the crossover is undefined for r = 0 (both arguments equal 1)",
        ));
    }
    check_degree(p, r)?;
    check_spacing(length, length)
}

/// Spacing where `(h/π)^r` equals the polynomial argument, closed form
/// `π (b-a)/2 ((p+1-r)!/(p+1+r)!)^{1/(2r)}`.
pub fn crossover_h(p: usize, r: usize, length: f64) -> Result<f64> {
    check_crossover(p, r, length)?;
    Ok(PI * 0.5 * length * (ln_sqrt_factorial_ratio(p, r) / r as f64).exp())
}

/// The same crossover found by bisection on the log difference of the two
/// arguments.
pub fn crossover_h_bisection(p: usize, r: usize, length: f64) -> Result<f64> {
    check_crossover(p, r, length)?;
    let target = poly_constant(p, r, length)?.ln();
    let f = |h: f64| r as f64 * (h / PI).ln() - target;
    let (mut lo, mut hi) = (f64::MIN_POSITIVE, PI * length);
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `c_{p,k,r} (p-k)^r`.
pub fn dof_constant(p: usize, k: i32, r: usize) -> Result<f64> {
    Ok(c_pkr(p, k, r)? * ((p as i32 - k) as f64).powi(r as i32))
}

/// `c_{p-q,k-q,q-ℓ} c_{p-q,k-q,r-q} (p-k)^{r-ℓ}`.
pub fn ritz_dof_constant(p: usize, k: i32, r: usize, q: usize, ell: usize) -> Result<f64> {
    if q > p || ell > q || q > r || k - (q as i32) < -1 {
        return Err(Error::precondition(
            "ritz-order",
            format!("invalid (p, k, r, q, ell) = ({p}, {k}, {r}, {q}, {ell})"),
        ));
    }
    let (pq, kq) = (p - q, k - q as i32);
    Ok(c_pkr(pq, kq, q - ell)? * c_pkr(pq, kq, r - q)? * ((p as i32 - k) as f64).powi((r - ell) as i32))
}

/// Both sides of `c_{p-q,k-q,q-ℓ} c_{p-q,k-q,p+1-q} = c_{p-ℓ,k-ℓ,p+1-ℓ}`.
pub fn identity_sides(p: usize, k: i32, q: usize, ell: usize) -> Result<(f64, f64)> {
    let lower = (q as i32 - 1).max(2 * q as i32 - ell as i32 - 2);
    if ell > q || q > p || k < lower || k > p as i32 - 1 {
        return Err(Error::precondition(
            "identity-range",
            format!("need max(q-1, 2q-ell-2) <= k <= p-1 and ell <= q, got p={p} k={k} q={q} ell={ell}"),
        ));
    }
    let (pq, kq) = (p - q, k - q as i32);
    let lhs = c_pkr(pq, kq, q - ell)? * c_pkr(pq, kq, p + 1 - q)?;
    let rhs = c_pkr(p - ell, k - ell as i32, p + 1 - ell)?;
    Ok((lhs, rhs))
}

/// Whether the two sides agree to `1e-13` relative.
pub fn check_identity(p: usize, k: i32, q: usize, ell: usize) -> Result<bool> {
    let (lhs, rhs) = identity_sides(p, k, q, ell)?;
    Ok((lhs - rhs).abs() <= 1e-13 * rhs.abs().max(lhs.abs()))
}

/// Rows of one of the four constant plots.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureTable {
    pub id: u8,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

/// Formats a float with 17 significant digits.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

impl FigureTable {
    /// CSV with integer columns printed as integers and values with 17
    /// significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        let last = self.columns.len() - 1;
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    if i == last {
                        format_float(v)
                    } else {
                        format!("{}", v as i64)
                    }
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

/// Largest degree in the plotted grids.
pub const FIGURE_MAX_DEGREE: usize = 10;

/// Table `id`:
/// 1. `c_{p,k,3}(p-k)^3`, `p = 2..10`, `k = -1..p-1`;
/// 2. `c_{p,k,p+1}(p-k)^{p+1}`, `p = 1..10`;
/// 3. the Ritz variant with `r = p+1`, `q = 1`, `ℓ = 0, 1`, `k = 0..p-1`;
/// 4. `h*_{p,r}/(b-a)` for `r = 1..11`, `p = max(r-1, 0)..10`.
pub fn figure_table(id: u8) -> Result<FigureTable> {
    let mut rows = Vec::new();
    let columns = match id {
        1 => {
            for p in 2..=FIGURE_MAX_DEGREE {
                for k in -1..p as i32 {
                    rows.push(vec![p as f64, k as f64, dof_constant(p, k, 3)?]);
                }
            }
            vec!["p", "k", "value"]
        }
        2 => {
            for p in 1..=FIGURE_MAX_DEGREE {
                for k in -1..p as i32 {
                    rows.push(vec![p as f64, k as f64, dof_constant(p, k, p + 1)?]);
                }
            }
            vec!["p", "k", "value"]
        }
        3 => {
            for ell in 0..=1 {
                for p in 1..=FIGURE_MAX_DEGREE {
                    for k in 0..p as i32 {
                        let v = ritz_dof_constant(p, k, p + 1, 1, ell)?;
                        rows.push(vec![p as f64, k as f64, ell as f64, v]);
                    }
                }
            }
            vec!["p", "k", "ell", "value"]
        }
        4 => {
            for r in 1..=FIGURE_MAX_DEGREE + 1 {
                for p in r - 1..=FIGURE_MAX_DEGREE {
                    rows.push(vec![p as f64, r as f64, crossover_h(p, r, 1.0)?]);
                }
            }
            vec!["p", "r", "h_star_over_length"]
        }
        other => return Err(Error::UnknownId(format!("figure {other}"))),
    };
    Ok(FigureTable { id, columns, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn poly_constant_examples() {
        assert!(close(poly_constant(0, 1, 1.0).unwrap(), 1.0 / (2.0 * 2f64.sqrt()), 1e-14));
        assert_eq!(poly_constant(5, 0, 3.0).unwrap(), 1.0);
        assert!(close(poly_constant(1, 2, 2.0).unwrap(), (1.0f64 / 24.0).sqrt(), 1e-14));
        assert!(poly_constant(1, 3, 1.0).is_err());
    }

    #[test]
    fn c_pkr_examples() {
        for p in 2..8 {
            assert!(close(c_pkr(p, p as i32 - 1, 3).unwrap(), PI.powi(-3), 1e-15));
        }
        let c = c_pkr(3, -1, 3).unwrap();
        assert!(close(c, 0.125 * (1.0f64 / 5040.0).sqrt(), 1e-14));
        // k = -1 reduces to the polynomial constant on one element (h = 1)
        assert!(close(c, poly_constant(3, 3, 1.0).unwrap(), 1e-14));
        assert!(close(c_pkr(4, 2, 2).unwrap(), 1.0 / 24.0, 1e-14));
    }

    #[test]
    fn discontinuous_branch_matches_polynomial_constant() {
        // p = 0 is excluded: there k = -1 is also the maximally smooth case
        for p in 1..=10usize {
            for r in 0..=p + 1 {
                let c = c_pkr(p, -1, r).unwrap();
                assert!(close(c, poly_constant(p, r, 1.0).unwrap(), 1e-13), "p={p} r={r}");
            }
        }
    }

    #[test]
    fn spline_argument_wins_for_discontinuous() {
        for p in 0..6 {
            for r in 1..=p + 1 {
                let b = c_hpkr(0.3, p, -1, r, 1.0).unwrap();
                assert_ne!(b.argmin, "polynomial");
            }
        }
    }

    #[test]
    fn second_derivative_polynomial_regime() {
        for p in [4usize, 6, 9] {
            let h = 0.9 * PI / p as f64; // p > π/h
            let b = c_hpkr(h, p, p as i32 - 1, 2, 2.0).unwrap();
            let pf = p as f64;
            let exact = 1.0 / (pf * (pf + 1.0) * (pf + 2.0) * (pf + 3.0)).sqrt();
            assert_eq!(b.argmin, "polynomial");
            assert!(close(b.minimum, exact, 1e-13));
        }
        let b = c_hpkr(1e-4, 4, 3, 2, 1.0).unwrap();
        assert_eq!(b.argmin, "spline_h_power");
    }

    #[test]
    fn small_r_criterion() {
        for r in 1..8usize {
            let p = 4 * (r - 1).max(1);
            let b = max_smooth_bounds(0.05, p, r, 1.0).unwrap();
            assert!(b.flags["small_r_sharper"]);
            assert!(b.get("harmonic_small_r").unwrap() < b.get("harmonic").unwrap());
        }
        // below the threshold the plain harmonic form is sharper
        let b = max_smooth_bounds(0.05, 2, 3, 1.0).unwrap();
        assert!(!b.flags["small_r_sharper"]);
        assert!(b.get("harmonic_small_r").unwrap() > b.get("harmonic").unwrap());
    }

    #[test]
    fn product_window() {
        for p in 2..10usize {
            let pf = p as f64;
            let lo = PI / ((pf + 1.0) * (pf + 2.0)).sqrt();
            let hi = PI / (pf * (pf + 3.0)).sqrt();
            let h = 0.5 * (lo + hi);
            let b = max_smooth_bounds(h, p, 2, 2.0).unwrap();
            let c = c_hpkr_value(h, p, p as i32 - 1, 2, 2.0).unwrap();
            assert!(b.get("product").unwrap() < c, "p={p}");
            assert_eq!(b.argmin, "product");
        }
    }

    #[test]
    fn simplified_examples() {
        assert!(close(simplified_bound(1.0, 3, 2 - 1, 1).unwrap(), E / 8.0, 1e-15));
        assert!(close(simplified_bound(1.0, 2, 0, 1).unwrap(), E / 8.0, 1e-15));
        assert!(close(simplified_bound(1.0, 1, -1, 1).unwrap(), E / 8.0, 1e-15));
        assert_eq!(simplified_bound(0.3, 4, 1, 0).unwrap(), 1.0);
        assert!(simplified_bound(0.3, 4, 3, 2).is_err());
    }

    #[test]
    fn simplified_dominates() {
        for p in 0..=10usize {
            for k in -1..=p as i32 - 2 {
                for r in 0..=p + 1 {
                    let h: f64 = 0.37;
                    let c = c_pkr(p, k, r).unwrap() * h.powi(r as i32);
                    assert!(c <= simplified_bound(h, p, k, r).unwrap() * (1.0 + 1e-14));
                }
            }
        }
    }

    #[test]
    fn ritz_reduces_to_l2() {
        let q = RitzQuery {
            h: 0.1,
            p: 3,
            k: 1,
            r: 3,
            q: 0,
            ell: 0,
            length: 1.0,
        };
        let b = ritz_bound(&q).unwrap();
        assert_eq!(b.value, c_hpkr_value(0.1, 3, 1, 3, 1.0).unwrap());
    }

    #[test]
    fn smooth_ritz_below_h_over_pi() {
        for p in 1..=8usize {
            for r in 1..=p + 1 {
                for q in 0..=r.min(p) {
                    for ell in 0..=q {
                        let query = RitzQuery {
                            h: 0.05,
                            p,
                            k: p as i32 - 1,
                            r,
                            q,
                            ell,
                            length: 1.0,
                        };
                        if check_ritz_query(&query).is_err() {
                            continue;
                        }
                        let b = ritz_bound(&query).unwrap();
                        assert!(b.value <= (0.05 / PI).powi((r - ell) as i32) * (1.0 + 1e-14));
                    }
                }
            }
        }
    }

    #[test]
    fn ritz_precondition_names() {
        let q = RitzQuery {
            h: 0.1,
            p: 3,
            k: 0,
            r: 3,
            q: 2,
            ell: 0,
            length: 1.0,
        };
        assert!(matches!(
            ritz_bound(&q),
            Err(Error::Precondition { name: "ritz-order", .. })
        ));
    }

    #[test]
    fn reduced_table() {
        let (h, hh) = (0.1, 0.2);
        assert_eq!(reduced_bound(Parity::Even, Variant::Strict, 3, h, hh), h / PI);
        assert_eq!(reduced_bound(Parity::Even, Variant::Strict, 2, h, hh), hh / PI);
        assert_eq!(reduced_bound(Parity::Odd, Variant::Strict, 3, h, hh), hh / PI);
        assert_eq!(reduced_bound(Parity::Odd, Variant::Strict, 2, h, hh), h / PI);
        for p in 0..5 {
            for parity in [Parity::Even, Parity::Odd] {
                assert_eq!(reduced_bound(parity, Variant::Bar, p, h, hh), h / PI);
            }
        }
    }

    #[test]
    fn crossover_examples() {
        let hs = crossover_h(10, 11, 1.0).unwrap();
        assert!((hs - 0.17).abs() <= 0.01, "{hs}");
        assert_eq!((1.0 / crossover_h(10, 1, 1.0).unwrap()).floor(), 7.0);
        assert!(crossover_h(3, 0, 1.0).is_err());
        for r in 1..=11 {
            for p in r - 1..=10 {
                let a = crossover_h(p, r, 2.0).unwrap();
                let b = crossover_h_bisection(p, r, 2.0).unwrap();
                assert!(close(a, b, 1e-12), "p={p} r={r}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn bound_label_above_crossover() {
        let b = c_hpkr(0.2, 10, 9, 11, 1.0).unwrap();
        assert_eq!(b.argmin, "polynomial");
    }

    #[test]
    fn tie_reported() {
        let exact = BoundBreakdown::from_candidates(vec![candidate("a", 0.5), candidate("b", 0.5)]);
        assert_eq!(exact.argmin, "tie");
        assert_eq!(exact.minimum, 0.5);
    }

    #[test]
    fn identity_examples() {
        assert!(check_identity(4, 3, 1, 0).unwrap());
        assert!(check_identity(5, 2, 2, 1).unwrap());
        assert!(check_identity(5, 3, 2, 2).unwrap());
        assert!(check_identity(5, 0, 2, 1).is_err());
    }

    #[test]
    fn ritz_dof_matches_shifted_l2() {
        for p in 1..=10usize {
            for k in 0..p as i32 {
                for ell in 0..=1usize {
                    let a = ritz_dof_constant(p, k, p + 1, 1, ell).unwrap();
                    let b = dof_constant(p - ell, k - ell as i32, p + 1 - ell).unwrap();
                    assert!(close(a, b, 1e-13), "p={p} k={k} ell={ell}");
                }
            }
        }
    }

    #[test]
    fn figures_decrease_in_k() {
        for id in [1u8, 2] {
            let t = figure_table(id).unwrap();
            for w in t.rows.windows(2) {
                if w[0][0] == w[1][0] {
                    assert!(w[1][2] < w[0][2], "figure {id}: {:?}", w);
                }
            }
        }
        let t = figure_table(3).unwrap();
        for w in t.rows.windows(2) {
            if w[0][0] == w[1][0] && w[0][2] == w[1][2] {
                assert!(w[1][3] < w[0][3]);
            }
        }
        assert!(matches!(figure_table(5), Err(Error::UnknownId(_))));
    }

    #[test]
    fn large_degree_is_finite() {
        for r in [1usize, 50, 100] {
            let v = poly_constant(170, r, 1.0).unwrap();
            assert!(v.is_finite() && v > 0.0);
            let c = c_pkr(170, 3, r).unwrap();
            assert!(c.is_finite() && c > 0.0);
        }
    }

    #[test]
    fn csv_format() {
        let t = figure_table(1).unwrap();
        let csv = t.to_csv();
        assert!(csv.starts_with("p,k,value\n2,-1,"));
        assert!(csv.contains("2,1,3.2251534433199495e-2"));
    }
}
