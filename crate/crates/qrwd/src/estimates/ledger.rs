//! Inner radii of the wandering domains and the inclusion test, all in log
//! scale against the reference orbit `x_0 = 1/2, x_{k+1} = 2cosh x_k`.

use std::cmp::Ordering;
use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::base_map::{OrbitLog, Schedule, ScheduleMode};
use crate::error::{QrwdError, Result};
use crate::numerics::Tower;

fn need_orbit(orbit: &[Tower], last: usize) -> Result<()> {
    if orbit.len() <= last {
        return Err(QrwdError::Precondition(format!("orbit has {} values, need index {last}", orbit.len())));
    }
    Ok(())
}

/// `-log ρ_n = n C5 + Σ_{j<n} x_j + x_{n-1}`, the magnitude of the (negative) log inner radius.
///
/// Returned as a [`Tower`] because from `n = 6` on the value no longer has an f64 log.
pub fn inner_radius_log(n: u32, c5: f64, orbit: &[Tower]) -> Result<Tower> {
    if n == 0 {
        return Err(QrwdError::Precondition("inner radius needs n >= 1".into()));
    }
    let n = n as usize;
    need_orbit(orbit, n - 1)?;
    let mut acc = Tower::from_f64(n as f64 * c5);
    for x in &orbit[..n] {
        acc = acc.add(x);
    }
    Ok(acc.add(&orbit[n - 1]))
}

/// The float-plus-symbolic log `logmag + Σ c_k ln x_k` as a tower, using `ln x_k = x_{k-1}`.
fn log_as_tower(v: &OrbitLog, orbit: &[Tower]) -> Result<Tower> {
    let mut acc = Tower::from_f64(v.logmag);
    for &(k, coef) in &v.terms {
        need_orbit(orbit, k as usize - 1)?;
        let term = Tower::from_f64(coef.abs()).mul(&orbit[k as usize - 1])?;
        acc = if coef > 0.0 { acc.add(&term) } else { acc.sub(&term) };
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InclusionRow {
    pub n: u32,
    /// `log(2 d_n log 2)`.
    pub lhs_log: Tower,
    /// `log((n+1) C5 + Σ_{j<=n} x_j + x_n)`.
    pub rhs_log: Tower,
    pub pass: bool,
}

fn inclusion_row(n: u32, c5: f64, schedule: &Schedule, orbit: &[Tower]) -> Result<InclusionRow> {
    if schedule.mode != ScheduleMode::TrueScale {
        return Err(QrwdError::Precondition("inclusion check needs the true-scale schedule".into()));
    }
    let entry = schedule.entry(n).ok_or_else(|| QrwdError::Invalid(format!("schedule has no level {n}")))?;
    need_orbit(orbit, n as usize)?;
    let lhs_log = log_as_tower(&entry.d.mul(&OrbitLog::of_value(2.0 * LN_2)?), orbit)?;
    let mut rhs = Tower::from_f64((n as f64 + 1.0) * c5);
    for x in &orbit[..=n as usize] {
        rhs = rhs.add(x);
    }
    let rhs_log = rhs.add(&orbit[n as usize]).ln()?;
    let pass = lhs_log.total_cmp(&rhs_log) == Ordering::Greater;
    Ok(InclusionRow { n, lhs_log, rhs_log, pass })
}

/// `2 d_n log 2 > (n+1) C5 + Σ_{j<=n} x_j + x_n`, i.e. `(1/2)^{2 d_n} < ρ_{n+1}`.
pub fn inclusion_check(n: u32, c5: f64, schedule: &Schedule, orbit: &[Tower]) -> Result<bool> {
    Ok(inclusion_row(n, c5, schedule, orbit)?.pass)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InclusionSweep {
    #[serde(rename = "C5")]
    pub c5: f64,
    pub rows: Vec<InclusionRow>,
    /// Smallest `n >= N` from which every checked level passes.
    pub measured_n1: Option<u32>,
}

/// Runs [`inclusion_check`] on every schedule level up to `n_hi`.
pub fn inclusion_sweep(c5: f64, schedule: &Schedule, orbit: &[Tower], n_hi: u32) -> Result<InclusionSweep> {
    let rows = schedule
        .entries
        .iter()
        .filter(|e| e.n <= n_hi)
        .map(|e| inclusion_row(e.n, c5, schedule, orbit))
        .collect::<Result<Vec<_>>>()?;
    let mut measured_n1 = None;
    for row in rows.iter().rev() {
        if row.n < schedule.first_index || !row.pass {
            break;
        }
        measured_n1 = Some(row.n);
    }
    Ok(InclusionSweep { c5, rows, measured_n1 })
}

/// Separation of two of the enlarged discs `D(±i h_n, 3R_n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationRow {
    pub n: u32,
    pub m: u32,
    pub same_side: bool,
    /// Log of (lower bound of `|z-z'|/sqrt(|z z'|)`) / (1/2); infinite when it does not fit a float.
    pub log_margin: f64,
    pub ok: bool,
}

fn margin(sep: &OrbitLog, a: &OrbitLog, b: &OrbitLog) -> Result<(f64, bool)> {
    // sep^2 >= (1/4) a b  <=>  C1 >= 1/2
    let rhs = OrbitLog::of_value(0.25)?.mul(a).mul(b);
    let q = sep.mul(sep).div(&rhs);
    let ok = q.total_cmp(&OrbitLog::constant(0.0)) != Ordering::Less;
    let log_margin = match q.terms.last() {
        None => q.logmag / 2.0,
        Some(_) if ok => f64::INFINITY,
        Some(_) => f64::NEG_INFINITY,
    };
    Ok((log_margin, ok))
}

/// Checks `|z - z'| >= (1/2) sqrt(|z z'|)` between the discs `D(±i h_n, 3R_n)` for `N <= n, m <= n_hi`.
pub fn paper_family_separation(schedule: &Schedule, n_hi: u32) -> Result<Vec<SeparationRow>> {
    if schedule.mode != ScheduleMode::TrueScale {
        return Err(QrwdError::Precondition("separation check needs the true-scale schedule".into()));
    }
    let three = OrbitLog::of_value(3.0)?;
    let levels: Vec<_> = schedule.entries.iter().filter(|e| e.n >= schedule.first_index && e.n <= n_hi).collect();
    let mut rows = Vec::new();
    for (a, lo) in levels.iter().enumerate() {
        for hi in &levels[a..] {
            let (r_lo, r_hi) = (lo.r.mul(&three), hi.r.mul(&three));
            // farthest points from the origin on each disc
            let (top_lo, top_hi) = (lo.h.add(&r_lo), hi.h.add(&r_hi));
            let spread = r_lo.add(&r_hi);
            if lo.n != hi.n {
                let sep = hi.h.sub(&lo.h.add(&spread))?;
                let (log_margin, ok) = margin(&sep, &top_lo, &top_hi)?;
                rows.push(SeparationRow { n: lo.n, m: hi.n, same_side: true, log_margin, ok });
            }
            let sep = hi.h.add(&lo.h).sub(&spread)?;
            let (log_margin, ok) = margin(&sep, &top_lo, &top_hi)?;
            rows.push(SeparationRow { n: lo.n, m: hi.n, same_side: false, log_margin, ok });
        }
    }
    Ok(rows)
}
