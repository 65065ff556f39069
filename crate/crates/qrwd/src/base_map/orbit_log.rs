//! Logs of schedule quantities written relative to the reference orbit.
//!
//! A value `v > 0` is stored as `ln v = logmag + Σ c_k ln x_k`, keeping only
//! the indices `k >= 5` symbolically. Those logs exceed `e^15000` and each
//! dwarfs any float multiple of the previous ones, so signs are decided by
//! the highest surviving index. Differences like `ln x_5 - ln d_4` then
//! cancel exactly instead of drowning in rounding.

use std::cmp::Ordering;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::reference_orbit;
use crate::error::{QrwdError, Result};
use crate::numerics::Tower;

/// Lowest orbit index kept symbolically.
pub const SYMBOLIC_FROM: u32 = 5;

fn small_orbit_logs() -> &'static [f64; 5] {
    static LOGS: OnceLock<[f64; 5]> = OnceLock::new();
    LOGS.get_or_init(|| {
        let xs = reference_orbit(4).expect("short orbit");
        let mut out = [0.0; 5];
        for (k, x) in xs.iter().enumerate() {
            out[k] = x.ln_f64().expect("x_k for k <= 4 has a float log");
        }
        out
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitLog {
    pub sign: i8,
    /// Float part of the log-magnitude.
    pub logmag: f64,
    /// `(k, c_k)` pairs, sorted by `k`, all `k >= 5`.
    #[serde(default, skip_serializing_if = "Vec::is_empty", rename = "orbit_log_terms")]
    pub terms: Vec<(u32, f64)>,
}

impl OrbitLog {
    pub fn constant(logmag: f64) -> Self {
        OrbitLog { sign: 1, logmag, terms: vec![] }
    }

    pub fn of_value(v: f64) -> Result<Self> {
        if !(v > 0.0) {
            return Err(QrwdError::Domain(format!("orbit log of non-positive {v}")));
        }
        Ok(Self::constant(v.ln()))
    }

    /// `ln x_k` of the reference orbit.
    pub fn orbit(k: u32) -> Self {
        if k < SYMBOLIC_FROM {
            Self::constant(small_orbit_logs()[k as usize])
        } else {
            OrbitLog { sign: 1, logmag: 0.0, terms: vec![(k, 1.0)] }
        }
    }

    fn combine(&self, other: &Self, s: f64) -> Self {
        let mut terms = self.terms.clone();
        for &(k, c) in &other.terms {
            match terms.iter_mut().find(|t| t.0 == k) {
                Some(t) => t.1 += s * c,
                None => terms.push((k, s * c)),
            }
        }
        terms.retain(|t| t.1 != 0.0);
        terms.sort_by_key(|t| t.0);
        OrbitLog { sign: 1, logmag: self.logmag + s * other.logmag, terms }
    }

    /// Log of the product.
    pub fn mul(&self, other: &Self) -> Self {
        self.combine(other, 1.0)
    }

    /// Log of the quotient.
    pub fn div(&self, other: &Self) -> Self {
        self.combine(other, -1.0)
    }

    pub fn is_symbolic(&self) -> bool {
        !self.terms.is_empty()
    }

    fn leading(&self) -> Option<(u32, f64)> {
        self.terms.last().copied()
    }

    /// Sign of the log itself, i.e. whether the value exceeds 1.
    fn log_sign(&self) -> Ordering {
        match self.leading() {
            Some((_, c)) => c.partial_cmp(&0.0).unwrap_or(Ordering::Equal),
            None => self.logmag.partial_cmp(&0.0).unwrap_or(Ordering::Equal),
        }
    }

    pub fn total_cmp(&self, other: &Self) -> Ordering {
        self.div(other).log_sign()
    }

    /// `ln(e^a + e^b)`.
    pub fn add(&self, other: &Self) -> Self {
        let (big, small) = if self.total_cmp(other) == Ordering::Less { (other, self) } else { (self, other) };
        let gap = small.div(big);
        if gap.is_symbolic() {
            return big.clone();
        }
        let mut out = big.clone();
        out.logmag += gap.logmag.exp().ln_1p();
        out
    }

    /// `ln(e^a - e^b)`, requiring `a > b`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        let gap = other.div(self);
        if gap.is_symbolic() {
            if gap.log_sign() == Ordering::Less {
                return Ok(self.clone());
            }
        } else if gap.logmag < 0.0 {
            let mut out = self.clone();
            out.logmag += (-gap.logmag.exp_m1()).ln();
            return Ok(out);
        }
        Err(QrwdError::Domain("orbit-log difference would be non-positive".into()))
    }

    /// `self / other` as a float; underflows to 0 and overflows to infinity.
    pub fn ratio_f64(&self, other: &Self) -> f64 {
        let q = self.div(other);
        match q.log_sign() {
            _ if !q.is_symbolic() => q.logmag.exp(),
            Ordering::Less => 0.0,
            _ => f64::INFINITY,
        }
    }

    pub fn to_f64(&self) -> Option<f64> {
        if self.is_symbolic() || self.logmag >= 709.0 {
            None
        } else {
            Some(self.logmag.exp())
        }
    }

    /// Level-index approximation; lower-order symbolic terms are dropped.
    pub fn to_tower(&self) -> Result<Tower> {
        let Some((k, c)) = self.leading() else {
            return Ok(Tower::from_f64(self.logmag).exp());
        };
        if c < 0.0 {
            return Ok(Tower::from_f64(0.0));
        }
        // ln x_k = x_{k-1}
        let xs = reference_orbit(k as usize)?;
        Ok(Tower::from_f64(c).mul(&xs[k as usize - 1])?.exp())
    }
}

impl PartialOrd for OrbitLog {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.total_cmp(other))
    }
}
