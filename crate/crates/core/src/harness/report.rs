use super::config::Ell;
use crate::constants::format_float;
use serde::Serialize;
use std::fmt::Write;

/// Largest effectivity accepted as a verified bound.
pub const EFFECTIVITY_TOLERANCE: f64 = 1e-9;

/// Required margin of a fitted order below `r - ℓ`.
pub const ORDER_SLACK: f64 = 0.2;

/// Points used by the order fit.
pub const FIT_POINTS: usize = 4;

/// Coefficient of determination below which the coarsest point is dropped.
pub const FIT_R2: f64 = 0.999;

/// CSV header of every report.
pub const CSV_HEADER: &str = "p,k,q,ell,r,N,h,error,bound,effectivity,order";

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Outcome {
    Measured { error: f64, bound: f64 },
    /// A hypothesis of the estimate does not hold; carries the reason name.
    Skipped { reason: String },
    /// The computation itself failed.
    Failed { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub p: usize,
    pub k: i32,
    pub q: usize,
    pub ell: Ell,
    pub r: usize,
    pub n: usize,
    pub h: f64,
    pub outcome: Outcome,
    /// Fitted h-order of the row's configuration over the schedule.
    pub order: Option<f64>,
}

impl ReportRow {
    pub fn effectivity(&self) -> Option<f64> {
        match self.outcome {
            Outcome::Measured { error, bound } => Some(error / bound),
            _ => None,
        }
    }

    /// A failed computation or an effectivity above `1 + 1e-9`.
    pub fn violates(&self) -> bool {
        match self.outcome {
            Outcome::Measured { error, bound } => !(error <= bound * (1.0 + EFFECTIVITY_TOLERANCE)),
            Outcome::Failed { .. } => true,
            Outcome::Skipped { .. } => false,
        }
    }

    fn same_configuration(&self, other: &ReportRow) -> bool {
        (self.p, self.k, self.q, self.ell, self.r) == (other.p, other.k, other.q, other.ell, other.r)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ErrorReport {
    pub rows: Vec<ReportRow>,
}

/// Least-squares slope of `log e` against `log h` and its `R²`.
fn fit(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(h, e)| (h.ln(), e.ln())).collect();
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = logs.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { slope * sxy / syy };
    Some((slope, r2))
}

/// Order of `(h, error)` pairs ordered from coarse to fine: least squares
/// over the last four points, without the coarsest of them if it pulls
/// `R²` below `0.999`. Non-positive errors are ignored.
pub fn fit_order(points: &[(f64, f64)]) -> Option<f64> {
    let usable: Vec<(f64, f64)> = points.iter().copied().filter(|&(h, e)| h > 0.0 && e > 0.0).collect();
    let tail = &usable[usable.len().saturating_sub(FIT_POINTS)..];
    let (slope, r2) = fit(tail)?;
    if r2 < FIT_R2 && tail.len() > 2 {
        return fit(&tail[1..]).map(|f| f.0);
    }
    Some(slope)
}

impl ErrorReport {
    /// Fills the `order` column per configuration; rows of one
    /// configuration appear in schedule order.
    pub fn fill_orders(&mut self) {
        let n = self.rows.len();
        for i in 0..n {
            let group: Vec<usize> = (0..n).filter(|&j| self.rows[j].same_configuration(&self.rows[i])).collect();
            let points: Vec<(f64, f64)> = group
                .iter()
                .filter_map(|&j| match self.rows[j].outcome {
                    Outcome::Measured { error, .. } => Some((self.rows[j].h, error)),
                    _ => None,
                })
                .collect();
            self.rows[i].order = fit_order(&points);
        }
    }

    pub fn has_violation(&self) -> bool {
        self.rows.iter().any(ReportRow::violates)
    }

    /// Rows whose fitted order falls below `r - ℓ - 0.2`.
    pub fn slow_rows(&self) -> Vec<&ReportRow> {
        self.rows
            .iter()
            .filter(|row| match row.order {
                Some(o) => o < row.r as f64 - row.ell.total() as f64 - ORDER_SLACK,
                None => false,
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            let (error, bound, eff) = match &row.outcome {
                Outcome::Measured { error, bound } => {
                    (format_float(*error), format_float(*bound), format_float(error / bound))
                }
                Outcome::Skipped { reason } => (format!("skipped:{reason}"), String::new(), String::new()),
                Outcome::Failed { reason } => (format!("failed:{reason}"), String::new(), String::new()),
            };
            let order = row.order.map(format_float).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                row.p,
                row.k,
                row.q,
                row.ell,
                row.r,
                row.n,
                format_float(row.h),
                csv_field(&error),
                bound,
                eff,
                order
            );
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
