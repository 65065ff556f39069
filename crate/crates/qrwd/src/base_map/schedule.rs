//! The schedule `(d_n, R_n, h_n)` and the regions `E_{±n}`, `D_{±n}`, `Q_n`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{q_rect, reference_orbit};
use crate::error::{QrwdError, Result};
use super::orbit_log::OrbitLog;
use crate::numerics::{c, Disc, Rectangle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleMode {
    TrueScale,
    Toy,
}

/// Explicit geometry of one toy level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyLevel {
    pub d: u32,
    pub r: f64,
    pub h: f64,
    /// Real point with `2cosh x = h`; centre of `Q_n`.
    pub x: f64,
    pub e_plus: Rectangle,
    pub e_minus: Rectangle,
    pub d_plus: Disc,
    pub d_minus: Disc,
    pub q: Rectangle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub n: u32,
    pub x: OrbitLog,
    pub d: OrbitLog,
    pub r: OrbitLog,
    pub h: OrbitLog,
    /// The floors in `d_n`, `h_n` were not materialised.
    pub floor_skipped: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub toy: Option<ToyLevel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub mode: ScheduleMode,
    /// First modified index `N`.
    pub first_index: u32,
    pub entries: Vec<ScheduleEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToyParams {
    pub d: Vec<u32>,
    #[serde(default = "default_first_index")]
    pub first_index: u32,
    /// Lower bound on the first height.
    #[serde(default = "default_min_height")]
    pub min_height: f64,
    #[serde(default = "default_gap_factor")]
    pub gap_factor: f64,
}

fn default_first_index() -> u32 {
    1
}
fn default_min_height() -> f64 {
    150.0
}
fn default_gap_factor() -> f64 {
    1.5
}

impl ToyParams {
    pub fn new(d: Vec<u32>) -> Self {
        ToyParams {
            d,
            first_index: default_first_index(),
            min_height: default_min_height(),
            gap_factor: default_gap_factor(),
        }
    }
}

impl Schedule {
    pub fn entry(&self, n: u32) -> Option<&ScheduleEntry> {
        self.entries.iter().find(|e| e.n == n)
    }

    pub fn toy_levels(&self) -> Result<Vec<(u32, &ToyLevel)>> {
        if self.mode != ScheduleMode::Toy {
            return Err(QrwdError::Precondition(
                "explicit regions need a toy schedule; true-scale squares are not representable".into(),
            ));
        }
        Ok(self.entries.iter().filter_map(|e| e.toy.as_ref().map(|t| (e.n, t))).collect())
    }

    pub fn toy_level(&self, n: u32) -> Result<&ToyLevel> {
        self.entry(n)
            .and_then(|e| e.toy.as_ref())
            .ok_or_else(|| QrwdError::Invalid(format!("no toy level {n}")))
    }

    pub fn last_index(&self) -> u32 {
        self.entries.last().map(|e| e.n).unwrap_or(self.first_index)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedule serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| QrwdError::Invalid(format!("schedule json: {e}")))
    }
}

fn two_pi() -> f64 {
    2.0 * PI
}

/// Smallest multiple of `2π` that is `>= y`.
fn ceil_to_period(y: f64) -> f64 {
    two_pi() * (y / two_pi()).ceil()
}

pub fn build_schedule(n_max: u32, mode: ScheduleMode, toy: Option<&ToyParams>) -> Result<Schedule> {
    match mode {
        ScheduleMode::TrueScale => build_true(n_max),
        ScheduleMode::Toy => {
            let p = toy.ok_or_else(|| QrwdError::Precondition("toy schedule needs toy params".into()))?;
            build_toy(p)
        }
    }
}

fn build_true(n_max: u32) -> Result<Schedule> {
    if n_max as usize > super::MAX_ORBIT_LEN - 1 || n_max == 0 {
        return Err(QrwdError::Precondition(format!("true schedule needs 1 <= n_max <= 63, got {n_max}")));
    }
    let xs = reference_orbit(n_max as usize + 1)?;
    let third = OrbitLog::of_value(1.0 / 3.0)?;
    let pi = OrbitLog::of_value(PI)?;
    let mut entries = Vec::new();
    for n in 1..=n_max {
        let exact = match (xs[n as usize].to_f64(), xs[n as usize + 1].to_f64()) {
            (Some(a), Some(b)) if b < 2f64.powi(52) => Some((a, b)),
            _ => None,
        };
        let x = OrbitLog::orbit(n);
        let (d, h, floor_skipped) = match exact {
            Some((a, b)) => {
                let d = (b / a).floor();
                let h = two_pi() * ((b + PI) / two_pi()).floor();
                (OrbitLog::of_value(d)?, OrbitLog::of_value(h)?, false)
            }
            None => (OrbitLog::orbit(n + 1).div(&x), OrbitLog::orbit(n + 1), true),
        };
        let r = d.sub(&third)?.mul(&pi);
        entries.push(ScheduleEntry { n, x, d, r, h, floor_skipped, toy: None });
    }
    Ok(Schedule { mode: ScheduleMode::TrueScale, first_index: 3, entries })
}

fn build_toy(p: &ToyParams) -> Result<Schedule> {
    if p.d.is_empty() {
        return Err(QrwdError::Invalid("toy schedule needs at least one d_n".into()));
    }
    if let Some(bad) = p.d.iter().find(|&&d| d < 1) {
        return Err(QrwdError::Invalid(format!("toy d_n must be >= 1, got {bad}")));
    }
    if !(p.gap_factor >= 1.0) {
        return Err(QrwdError::Invalid(format!("gap_factor must be >= 1, got {}", p.gap_factor)));
    }
    let mut heights = Vec::with_capacity(p.d.len());
    let mut prev: Option<(f64, f64)> = None;
    for &d in &p.d {
        let half = 2.0 * d as f64 * PI;
        let h = match prev {
            None => ceil_to_period(p.min_height.max((1.0 + p.gap_factor) * half)),
            Some((h_prev, half_prev)) => ceil_to_period(h_prev + p.gap_factor * (half_prev + half)),
        };
        heights.push(h);
        prev = Some((h, half));
    }
    toy_schedule_from_heights(p.first_index, &p.d, &heights)
}

/// Toy schedule with explicit heights; each `h_n` must be a positive multiple of `2π`.
pub fn toy_schedule_from_heights(first_index: u32, ds: &[u32], heights: &[f64]) -> Result<Schedule> {
    if ds.len() != heights.len() || ds.is_empty() {
        return Err(QrwdError::Invalid("need one height per d_n".into()));
    }
    let mut entries = Vec::with_capacity(ds.len());
    for (k, (&d, &h)) in ds.iter().zip(heights).enumerate() {
        if d < 1 {
            return Err(QrwdError::Invalid(format!("toy d_n must be >= 1, got {d}")));
        }
        let periods = h / two_pi();
        if !(h > 0.0) || (periods - periods.round()).abs() > 1e-9 {
            return Err(QrwdError::Invalid(format!("toy height {h} is not a positive multiple of 2pi")));
        }
        let half = 2.0 * d as f64 * PI;
        let r = (d as f64 - 1.0 / 3.0) * PI;
        let x = (h / 2.0).acosh();
        let level = ToyLevel {
            d,
            r,
            h,
            x,
            e_plus: Rectangle::new(c(0.0, h), half, half)?,
            e_minus: Rectangle::new(c(0.0, -h), half, half)?,
            d_plus: Disc::new(c(0.0, h), r)?,
            d_minus: Disc::new(c(0.0, -h), r)?,
            q: q_rect(x),
        };
        entries.push(ScheduleEntry {
            n: first_index + k as u32,
            x: OrbitLog::of_value(x)?,
            d: OrbitLog::of_value(d as f64)?,
            r: OrbitLog::of_value(r)?,
            h: OrbitLog::of_value(h)?,
            floor_skipped: false,
            toy: Some(level),
        });
    }
    let s = Schedule { mode: ScheduleMode::Toy, first_index, entries };
    check_toy_disjoint(&s)?;
    Ok(s)
}

/// Rejects toy schedules whose squares `E_{±n}` overlap each other or the real axis.
pub(crate) fn check_toy_disjoint(s: &Schedule) -> Result<()> {
    let levels = s.toy_levels()?;
    let mut rects = Vec::new();
    for (n, l) in &levels {
        if l.h <= l.e_plus.half_height {
            return Err(QrwdError::Invalid(format!("E_{n} meets the real axis")));
        }
        rects.push((*n as i64, l.e_plus));
        rects.push((-(*n as i64), l.e_minus));
    }
    for i in 0..rects.len() {
        for j in i + 1..rects.len() {
            if rects[i].1.overlaps(&rects[j].1) {
                return Err(QrwdError::Invalid(format!(
                    "squares E_{} and E_{} overlap",
                    rects[i].0, rects[j].0
                )));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrowthRow {
    pub n: u32,
    pub inequality: String,
    /// Log of the smaller side as claimed.
    pub lhs: OrbitLog,
    pub rhs: OrbitLog,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrowthReport {
    pub applicable: bool,
    pub note: Option<String>,
    pub rows: Vec<GrowthRow>,
    /// `sum_{k > 5} R_k / h_k` over the checked range.
    pub tail_sum: f64,
    pub tail_pass: bool,
    pub all_pass: bool,
}

fn log_factorial_sq(n: u32) -> OrbitLog {
    OrbitLog::constant(2.0 * (1..=n).map(|k| (k as f64).ln()).sum::<f64>())
}

fn row(n: u32, name: &str, lhs: OrbitLog, rhs: OrbitLog) -> GrowthRow {
    let pass = lhs < rhs;
    GrowthRow { n, inequality: name.to_string(), lhs, rhs, pass }
}

/// Checks the growth inequalities for `n` in `n_lo..=n_hi` in log form,
/// plus `x_n > (n!)^2` for `1..=n_hi`.
pub fn verify_growth(s: &Schedule, n_lo: u32, n_hi: u32) -> Result<GrowthReport> {
    if s.mode == ScheduleMode::Toy {
        return Ok(GrowthReport {
            applicable: false,
            note: Some("not-applicable: toy inequalities checked individually".into()),
            rows: vec![],
            tail_sum: 0.0,
            tail_pass: true,
            all_pass: true,
        });
    }
    let get = |n: u32| {
        s.entry(n).ok_or_else(|| QrwdError::Precondition(format!("schedule lacks index {n}")))
    };
    let k = |v: f64| OrbitLog::constant(v.ln());
    let mut rows = Vec::new();
    for n in 1..=n_hi {
        rows.push(row(n, "x_n > (n!)^2", log_factorial_sq(n), get(n)?.x.clone()));
    }
    let mut tail_sum = 0.0;
    for n in n_lo..=n_hi {
        let (e, e1) = (get(n)?, get(n + 1)?);
        let f2 = log_factorial_sq(n);
        rows.push(row(n, "x_{n+1} > (n!)^2 x_n", f2.mul(&e.x), e1.x.clone()));
        rows.push(row(n, "R_n/h_n < 2pi/(n!)^2", e.r.mul(&f2), e.h.mul(&k(2.0 * PI))));
        rows.push(row(n, "h_{n+1}/h_n > (n!)^2", f2.mul(&e.h), e1.h.clone()));
        let left = e.h.add(&e.r.mul(&k(3.0 + 6.0 * n as f64))).mul(&f2);
        let right = e1.h.sub(&e1.r.mul(&k(3.0)))?.mul(&k(6.0));
        rows.push(row(n, "h_n + 3R_n + 6nR_n < 6/(n!)^2 (h_{n+1} - 3R_{n+1})", left, right));
        if n > 5 {
            tail_sum += e.r.ratio_f64(&e.h);
        }
    }
    let tail_pass = tail_sum < 1e-6;
    let all_pass = tail_pass && rows.iter().all(|r| r.pass);
    Ok(GrowthReport { applicable: true, note: None, rows, tail_sum, tail_pass, all_pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn true_schedule_values() {
        let s = build_schedule(11, ScheduleMode::TrueScale, None).unwrap();
        let e1 = s.entry(1).unwrap();
        let near = |v: &OrbitLog, want: f64| (v.to_f64().unwrap() - want).abs() < 1e-12 * want;
        assert!(near(&e1.d, 4.0));
        assert!(near(&e1.h, 4.0 * PI));
        assert!(!e1.floor_skipped);
        // floor(x_3/x_2) with 60-digit orbit values
        assert!(near(&s.entry(2).unwrap().d, 1597.0));
        let e3 = s.entry(3).unwrap();
        assert!(e3.floor_skipped);
        // log x_4 - log x_3 at 60 digits
        assert!((e3.d.logmag - 15_396.829_668_610_102).abs() < 1e-8);
        assert!(!e3.d.is_symbolic());
        assert!(s.entry(4).unwrap().d.is_symbolic());
        for e in &s.entries[..2] {
            let (d, r) = (e.d.to_f64().unwrap(), e.r.to_f64().unwrap());
            assert!((r - (d - 1.0 / 3.0) * PI).abs() < 1e-12 * r);
            let h = e.h.to_f64().unwrap();
            assert!(((h / (2.0 * PI)).round() * 2.0 * PI - h).abs() < 1e-12 * h);
        }
    }

    #[test]
    fn growth_passes_on_true_schedule() {
        let s = build_schedule(11, ScheduleMode::TrueScale, None).unwrap();
        let rep = verify_growth(&s, 3, 10).unwrap();
        for r in &rep.rows {
            assert!(r.pass, "{} at n = {}", r.inequality, r.n);
        }
        assert!(rep.all_pass);
        assert_eq!(rep.rows.len(), 10 + 8 * 4);
    }

    #[test]
    fn growth_on_toy_is_not_applicable() {
        let s = build_schedule(0, ScheduleMode::Toy, Some(&ToyParams::new(vec![2, 3]))).unwrap();
        let rep = verify_growth(&s, 3, 10).unwrap();
        assert!(!rep.applicable);
        assert!(rep.note.unwrap().starts_with("not-applicable"));
    }

    #[test]
    fn toy_schedule_rules() {
        let s = build_schedule(0, ScheduleMode::Toy, Some(&ToyParams::new(vec![2, 3, 4]))).unwrap();
        let levels = s.toy_levels().unwrap();
        assert!((levels[0].1.r - 5.0 * PI / 3.0).abs() < 1e-15);
        for w in levels.windows(2) {
            let (a, b) = (w[0].1, w[1].1);
            let need = 1.5 * (2.0 * a.d as f64 * PI + 2.0 * b.d as f64 * PI);
            assert!(b.h - a.h >= need - 1e-9);
            assert!(b.h - a.h - 2.0 * PI < need);
        }
        for (_, l) in &levels {
            let k = l.h / (2.0 * PI);
            assert!((k - k.round()).abs() < 1e-12);
            assert!((2.0 * l.x.cosh() - l.h).abs() < 1e-9 * l.h);
        }
        let bad = ToyParams::new(vec![2, 0]);
        assert!(build_schedule(0, ScheduleMode::Toy, Some(&bad)).is_err());
    }

    #[test]
    fn schedule_json_round_trip() {
        let s = build_schedule(6, ScheduleMode::TrueScale, None).unwrap();
        let js = s.to_json();
        assert!(js.contains("\"logmag\""));
        assert_eq!(Schedule::from_json(&js).unwrap(), s);
        let t = build_schedule(0, ScheduleMode::Toy, Some(&ToyParams::new(vec![1, 2]))).unwrap();
        assert_eq!(Schedule::from_json(&t.to_json()).unwrap(), t);
    }
}
