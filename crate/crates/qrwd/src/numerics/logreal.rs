//! Log-scale reals for the orbit and schedule quantities.
//!
//! [`LogReal`] stores a sign and the natural log of the magnitude. [`Tower`]
//! goes one step further and stores `exp^height(top)`, which is needed once
//! the log itself stops fitting in an `f64`.

use std::cmp::Ordering;
use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{QrwdError, Result};

/// Beyond this log-magnitude gap the smaller addend is dropped.
pub const ADD_CUTOFF: f64 = 40.0;
/// Largest log-magnitude that `decode` will exponentiate.
pub const DECODE_LIMIT: f64 = 700.0;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LogReal {
    pub sign: i8,
    pub logmag: f64,
}

impl LogReal {
    pub const ZERO: LogReal = LogReal { sign: 0, logmag: 0.0 };

    pub fn new(sign: i8, logmag: f64) -> Self {
        if sign == 0 {
            return Self::ZERO;
        }
        LogReal { sign: sign.signum(), logmag }
    }

    pub fn encode(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            LogReal { sign: if x > 0.0 { 1 } else { -1 }, logmag: x.abs().ln() }
        }
    }

    pub fn decode(self) -> Result<f64> {
        if self.sign == 0 {
            return Ok(0.0);
        }
        if !(self.logmag.abs() < DECODE_LIMIT) {
            return Err(QrwdError::OutOfRange(format!(
                "logmag {} outside (-{DECODE_LIMIT}, {DECODE_LIMIT})",
                self.logmag
            )));
        }
        Ok(self.sign as f64 * self.logmag.exp())
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    pub fn neg(self) -> Self {
        LogReal { sign: -self.sign, logmag: self.logmag }
    }

    pub fn abs(self) -> Self {
        LogReal { sign: self.sign.abs(), logmag: self.logmag }
    }

    pub fn add(self, other: Self) -> Self {
        if self.sign == 0 {
            return other;
        }
        if other.sign == 0 {
            return self;
        }
        let (big, small) = if self.logmag >= other.logmag { (self, other) } else { (other, self) };
        let gap = big.logmag - small.logmag;
        if gap > ADD_CUTOFF {
            return big;
        }
        if big.sign == small.sign {
            LogReal { sign: big.sign, logmag: big.logmag + (-gap).exp().ln_1p() }
        } else if gap == 0.0 {
            Self::ZERO
        } else {
            LogReal { sign: big.sign, logmag: big.logmag + (-(-gap).exp_m1()).ln() }
        }
    }

    pub fn sub(self, other: Self) -> Self {
        self.add(other.neg())
    }

    pub fn mul(self, other: Self) -> Self {
        if self.sign == 0 || other.sign == 0 {
            return Self::ZERO;
        }
        LogReal { sign: self.sign * other.sign, logmag: self.logmag + other.logmag }
    }

    pub fn div(self, other: Self) -> Result<Self> {
        if other.sign == 0 {
            return Err(QrwdError::DivisionByZero);
        }
        if self.sign == 0 {
            return Ok(Self::ZERO);
        }
        Ok(LogReal { sign: self.sign * other.sign, logmag: self.logmag - other.logmag })
    }

    pub fn total_cmp(&self, other: &Self) -> Ordering {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => match self.sign {
                0 => Ordering::Equal,
                1 => self.logmag.total_cmp(&other.logmag),
                _ => other.logmag.total_cmp(&self.logmag),
            },
            ord => ord,
        }
    }
}

impl PartialEq for LogReal {
    fn eq(&self, other: &Self) -> bool {
        self.total_cmp(other) == Ordering::Equal
    }
}

impl PartialOrd for LogReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.total_cmp(other))
    }
}

impl fmt::Display for LogReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "0"),
            s => write!(f, "{}exp({})", if s < 0 { "-" } else { "" }, self.logmag),
        }
    }
}

/// `exp` applied `height` times to `top`.
///
/// Canonical form: height 0 holds any finite value with `|v| < e^700`;
/// height `k >= 1` holds a positive value whose `(k-1)`-fold log is
/// `e^top` with `top >= 700`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tower {
    height: u32,
    top: f64,
}

fn float_limit() -> f64 {
    DECODE_LIMIT.exp()
}

impl Tower {
    pub fn from_f64(v: f64) -> Self {
        Tower { height: 0, top: v }.normalized()
    }

    /// Positive value `exp^height(top)`.
    pub fn from_parts(height: u32, top: f64) -> Self {
        Tower { height, top }.normalized()
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn top(&self) -> f64 {
        self.top
    }

    fn normalized(mut self) -> Self {
        loop {
            if self.height == 0 && self.top.abs() >= float_limit() && self.top > 0.0 {
                self = Tower { height: 1, top: self.top.ln() };
            } else if self.height >= 1 && self.top < DECODE_LIMIT {
                self = Tower { height: self.height - 1, top: self.top.exp() };
            } else if self.height >= 1 && self.top >= float_limit() {
                self = Tower { height: self.height + 1, top: self.top.ln() };
            } else {
                return self;
            }
        }
    }

    pub fn to_f64(&self) -> Option<f64> {
        match self.height {
            0 => Some(self.top),
            _ => None,
        }
    }

    /// Natural log as a float when it is representable.
    pub fn ln_f64(&self) -> Option<f64> {
        match self.height {
            0 if self.top > 0.0 => Some(self.top.ln()),
            1 => Some(self.top),
            _ => None,
        }
    }

    pub fn to_logreal(&self) -> Result<LogReal> {
        match self.height {
            0 => Ok(LogReal::encode(self.top)),
            1 => Ok(LogReal::new(1, self.top)),
            h => Err(QrwdError::OutOfRange(format!("tower of height {h} has no f64 log"))),
        }
    }

    pub fn from_logreal(v: LogReal) -> Result<Self> {
        match v.sign {
            0 => Ok(Self::from_f64(0.0)),
            1 => Ok(Tower { height: 0, top: v.logmag }.exp()),
            _ if v.logmag < DECODE_LIMIT => Ok(Self::from_f64(-v.logmag.exp())),
            _ => Err(QrwdError::OutOfRange("negative value below -e^700".into())),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.height > 0 || self.top > 0.0
    }

    pub fn exp(&self) -> Self {
        match self.height {
            0 if self.top < DECODE_LIMIT => Tower { height: 0, top: self.top.exp() },
            h => Tower { height: h + 1, top: self.top }.normalized(),
        }
    }

    pub fn ln(&self) -> Result<Self> {
        match self.height {
            0 if self.top > 0.0 => Ok(Tower { height: 0, top: self.top.ln() }),
            0 => Err(QrwdError::Domain(format!("log of non-positive {}", self.top))),
            1 => Ok(Tower { height: 0, top: self.top }),
            h => Ok(Tower { height: h - 1, top: self.top }),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, 1.0)
    }

    /// `self - other`; the result is exact when both are floats and
    /// otherwise follows the same log-sum rule as [`LogReal::add`].
    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, -1.0)
    }

    fn combine(&self, other: &Self, sign: f64) -> Self {
        if self.height == 0 && other.height == 0 {
            let s = self.top + sign * other.top;
            if s.is_finite() {
                return Tower::from_f64(s);
            }
        }
        let (big, small, small_coeff) = if self.total_cmp(other) == Ordering::Less {
            if sign < 0.0 {
                // Negative tall results are not representable.
                return Tower::from_f64(f64::NAN);
            }
            (other, self, 1.0)
        } else {
            (self, other, sign)
        };
        match (big.height, small.height) {
            (1, 0) => {
                let r = small_coeff * small.top * (-big.top).exp();
                if 1.0 + r <= 0.0 {
                    return Tower::from_f64(0.0);
                }
                Tower { height: 1, top: big.top + r.ln_1p() }.normalized()
            }
            (1, 1) => {
                let gap = small.top - big.top;
                let t = if small_coeff > 0.0 {
                    big.top + gap.exp().ln_1p()
                } else if gap == 0.0 {
                    return Tower::from_f64(0.0);
                } else {
                    big.top + (-gap.exp_m1()).ln()
                };
                Tower { height: 1, top: t }.normalized()
            }
            _ => *big,
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.height == 0 && other.height == 0 {
            let p = self.top * other.top;
            if p.is_finite() {
                return Ok(Tower::from_f64(p));
            }
        }
        if !self.is_positive() || !other.is_positive() {
            return Err(QrwdError::Domain("tower product needs positive factors".into()));
        }
        Ok(self.ln()?.add(&other.ln()?).exp())
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        if !self.is_positive() || !other.is_positive() {
            return Err(QrwdError::Domain("tower quotient needs positive operands".into()));
        }
        let l = self.ln()?.sub(&other.ln()?);
        if l.height == 0 && l.top.is_nan() {
            // ln(self) < ln(other) by more than float range: the ratio underflows.
            return Ok(Tower::from_f64(0.0));
        }
        Ok(l.exp())
    }

    /// `self / other` as a float, underflowing to zero.
    pub fn ratio_f64(&self, other: &Self) -> Result<f64> {
        if self.height == 0 && other.height == 0 {
            return Ok(self.top / other.top);
        }
        let (la, lb) = (self.ln()?, other.ln()?);
        match (la.to_f64(), lb.to_f64()) {
            (Some(a), Some(b)) => Ok((a - b).exp()),
            _ => match la.total_cmp(&lb) {
                Ordering::Less => Ok(0.0),
                Ordering::Equal => Ok(1.0),
                Ordering::Greater => Ok(f64::INFINITY),
            },
        }
    }

    pub fn total_cmp(&self, other: &Self) -> Ordering {
        match (self.height, other.height) {
            (0, 0) => self.top.total_cmp(&other.top),
            (a, b) if a != b => a.cmp(&b),
            _ => self.top.total_cmp(&other.top),
        }
    }
}

impl PartialOrd for Tower {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.total_cmp(other))
    }
}

impl Serialize for Tower {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.height {
            0 => {
                let lr = LogReal::encode(self.top);
                let mut m = s.serialize_map(Some(3))?;
                m.serialize_entry("sign", &lr.sign)?;
                m.serialize_entry("logmag", &lr.logmag)?;
                // Exact value alongside, so round trips are bit-exact.
                m.serialize_entry("value", &self.top)?;
                m.end()
            }
            1 => LogReal::new(1, self.top).serialize(s),
            _ => {
                let mut m = s.serialize_map(Some(3))?;
                m.serialize_entry("sign", &1)?;
                m.serialize_entry("height", &self.height)?;
                m.serialize_entry("top", &self.top)?;
                m.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for Tower {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Exact { value: f64 },
            Log { sign: i8, logmag: f64 },
            Tall { sign: i8, height: u32, top: f64 },
        }
        match Repr::deserialize(d)? {
            Repr::Exact { value } => Ok(Tower::from_f64(value)),
            Repr::Log { sign, logmag } => {
                Tower::from_logreal(LogReal::new(sign, logmag)).map_err(de::Error::custom)
            }
            Repr::Tall { sign: 1, height, top } => Ok(Tower { height, top }),
            Repr::Tall { .. } => Err(de::Error::custom("tall towers must be positive")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_examples() {
        let e = LogReal::encode(std::f64::consts::E);
        assert_eq!(e.sign, 1);
        assert!((e.logmag - 1.0).abs() < 1e-15);
        assert_eq!(LogReal::encode(0.0).sign, 0);
        let v = LogReal::encode(-2.0 * 0.5f64.cosh());
        assert_eq!(v.sign, -1);
        // log(2cosh(1/2)) to 40 digits via mpmath
        assert!((v.logmag - 0.813_261_687_518_222_8).abs() < 1e-14);
    }

    #[test]
    fn decode_out_of_range_is_an_error() {
        assert!(matches!(LogReal::new(1, 700.5).decode(), Err(QrwdError::OutOfRange(_))));
        assert!(LogReal::new(-1, 699.0).decode().is_ok());
    }

    #[test]
    fn arithmetic_examples() {
        let p = LogReal::new(1, 3.0).mul(LogReal::new(1, 4.0));
        assert_eq!((p.sign, p.logmag), (1, 7.0));
        let two = LogReal::encode(1.0).add(LogReal::encode(1.0));
        assert!((two.decode().unwrap() - 2.0).abs() < 1e-15);
        let big = LogReal::new(1, 15000.0).add(LogReal::new(1, 10.0));
        assert_eq!((big.sign, big.logmag), (1, 15000.0));
        assert_eq!(LogReal::encode(3.0).div(LogReal::ZERO), Err(QrwdError::DivisionByZero));
        assert!(LogReal::encode(2.0).sub(LogReal::encode(2.0)).is_zero());
        let d = LogReal::encode(2.0).sub(LogReal::encode(5.0)).decode().unwrap();
        assert!((d + 3.0).abs() < 1e-14);
    }

    #[test]
    fn tower_normal_form_and_order() {
        let a = Tower::from_f64(1e305);
        assert_eq!(a.height(), 1);
        let b = Tower::from_parts(2, 15400.0);
        assert_eq!(b.height(), 2);
        assert!(a < b);
        assert!(Tower::from_f64(-3.0) < Tower::from_f64(2.0));
        assert_eq!(Tower::from_parts(1, 3.0).to_f64(), Some(3f64.exp()));
    }

    #[test]
    fn tower_arith_matches_floats_in_range() {
        let a = Tower::from_f64(12.5);
        let b = Tower::from_f64(3.25);
        assert_eq!(a.add(&b).to_f64(), Some(15.75));
        assert_eq!(a.sub(&b).to_f64(), Some(9.25));
        assert_eq!(a.mul(&b).unwrap().to_f64(), Some(40.625));
        assert!((a.div(&b).unwrap().to_f64().unwrap() - 12.5 / 3.25).abs() < 1e-14);
    }

    #[test]
    fn tower_arith_beyond_float() {
        let x = Tower::from_parts(1, 15400.0);
        let y = Tower::from_parts(1, 15390.0);
        let s = x.add(&y);
        assert!((s.ln_f64().unwrap() - (15400.0 + (-10f64).exp().ln_1p())).abs() < 1e-9);
        let p = x.mul(&y).unwrap();
        assert!((p.ln_f64().unwrap() - 30790.0).abs() < 1e-9);
        let q = x.div(&y).unwrap();
        assert!((q.to_f64().unwrap() - 10f64.exp()).abs() < 1e-6);
        assert_eq!(y.ratio_f64(&Tower::from_parts(2, 15400.0)).unwrap(), 0.0);
    }

    #[test]
    fn tower_json_shapes() {
        let t = Tower::from_parts(1, 15400.0);
        let js = serde_json::to_string(&t).unwrap();
        assert_eq!(js, r#"{"sign":1,"logmag":15400.0}"#);
        let small = Tower::from_f64(-2.5);
        let js = serde_json::to_string(&small).unwrap();
        assert!(js.starts_with(r#"{"sign":-1,"logmag":0.916"#));
        assert_eq!(serde_json::from_str::<Tower>(&js).unwrap(), small);
        let tall = Tower::from_parts(3, 800.0);
        let js = serde_json::to_string(&tall).unwrap();
        assert_eq!(js, r#"{"sign":1,"height":3,"top":800.0}"#);
        let back: Tower = serde_json::from_str(&js).unwrap();
        assert_eq!(back, tall);
    }
}
