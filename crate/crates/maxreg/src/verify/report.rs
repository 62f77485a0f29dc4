use serde::Serialize;

use crate::sobolev::ExponentSet;
use crate::{Error, Result};

/// Outcome of one check: pass/fail plus the quantities that justify it.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub check_id: String,
    pub exponents: ExponentSet,
    pub grid_h: f64,
    pub points_total: usize,
    pub points_checked: usize,
    pub points_excluded: usize,
    /// Fraction of checked points satisfying the inequality.
    pub pass_fraction: f64,
    /// Smallest multiplicative constant making the inequality hold over the
    /// checked points (NaN when the check has no constant to estimate).
    pub empirical_constant: f64,
    /// Description of the additive tolerance used.
    pub tolerance_model: String,
    pub pass: bool,
    /// Advisory checks warn instead of failing the run.
    pub advisory: bool,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn exclusion_consistent(&self) -> bool {
        self.points_checked + self.points_excluded == self.points_total
    }
}

/// Fixed-width summary table, rows sorted by check id.
pub fn emit_report(reports: &[VerificationReport]) -> Result<String> {
    if reports.is_empty() {
        return Err(Error::NothingToReport);
    }
    let mut rows: Vec<&VerificationReport> = reports.iter().collect();
    rows.sort_by(|a, b| a.check_id.cmp(&b.check_id));
    let mut out = String::new();
    out.push_str(&format!(
        "{:<28} {:>10} {:>14} {:>20} {:>6}\n",
        "check_id", "q", "pass_fraction", "empirical_constant", "pass"
    ));
    for r in rows {
        let q = match r.exponents.q {
            Some(q) => format!("{q:.4}"),
            None => "inf".to_string(),
        };
        out.push_str(&format!(
            "{:<28} {:>10} {:>14.4} {:>20.6} {:>6}\n",
            r.check_id, q, r.pass_fraction, r.empirical_constant, r.pass
        ));
    }
    Ok(out)
}
