//! Minimal arbitrary-precision binary floating point on top of `BigInt`.
//!
//! Stores `mant * 2^exp` with the mantissa kept below `prec` bits and
//! rounded to nearest on every normalisation. Only the handful of
//! operations the pipeline needs are provided (field ops, sqrt,
//! comparisons, decimal conversion).

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigFloat {
    mant: BigInt,
    exp: i64,
    prec: u32,
}

impl BigFloat {
    pub fn zero(prec: u32) -> Self {
        BigFloat { mant: BigInt::zero(), exp: 0, prec }
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        BigFloat { mant: BigInt::from(v), exp: 0, prec }.normalized()
    }

    pub fn from_bigint(v: BigInt, prec: u32) -> Self {
        BigFloat { mant: v, exp: 0, prec }.normalized()
    }

    /// Exact conversion from an f64 (finite values only).
    pub fn from_f64(v: f64, prec: u32) -> Self {
        assert!(v.is_finite(), "non-finite f64");
        if v == 0.0 {
            return Self::zero(prec);
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, exp) = if biased == 0 {
            (frac, -1074)
        } else {
            (frac | (1 << 52), biased - 1075)
        };
        BigFloat { mant: BigInt::from(sign * mant as i64), exp, prec }.normalized()
    }

    /// Rounded conversion of `num/den` (den > 0).
    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Self {
        assert!(!den.is_zero(), "division by zero");
        if num.is_zero() {
            return Self::zero(prec);
        }
        let shift = prec as i64 + 2 + den.bits() as i64;
        let scaled = num << shift as u64;
        let q = scaled / den;
        BigFloat { mant: q, exp: -shift, prec }.normalized()
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    fn normalized(mut self) -> Self {
        if self.mant.is_zero() {
            self.exp = 0;
            return self;
        }
        let bits = self.mant.magnitude().bits();
        if bits > self.prec as u64 {
            let shift = bits - self.prec as u64;
            let half = BigUint::from(1u8) << (shift - 1);
            let mag = self.mant.magnitude() + &half;
            let mag = mag >> shift;
            self.mant = BigInt::from_biguint(self.mant.sign(), mag);
            self.exp += shift as i64;
        }
        // keep mantissas compact
        if !self.mant.is_zero() {
            let tz = self.mant.trailing_zeros().unwrap_or(0);
            if tz > 0 {
                self.mant >>= tz;
                self.exp += tz as i64;
            }
        }
        self
    }

    pub fn neg(&self) -> Self {
        BigFloat { mant: -&self.mant, exp: self.exp, prec: self.prec }
    }

    pub fn abs(&self) -> Self {
        BigFloat { mant: self.mant.abs(), exp: self.exp, prec: self.prec }
    }

    pub fn add(&self, other: &Self) -> Self {
        let prec = self.prec.min(other.prec);
        if self.is_zero() {
            let mut r = other.clone();
            r.prec = prec;
            return r.normalized();
        }
        if other.is_zero() {
            let mut r = self.clone();
            r.prec = prec;
            return r.normalized();
        }
        let (hi, lo) = if self.exp >= other.exp { (self, other) } else { (other, self) };
        let d = hi.exp - lo.exp;
        // lo is negligible beyond the working precision
        let hi_top = hi.exp + hi.mant.magnitude().bits() as i64;
        let lo_top = lo.exp + lo.mant.magnitude().bits() as i64;
        if hi_top - lo_top > prec as i64 + 8 {
            let mut r = hi.clone();
            r.prec = prec;
            return r.normalized();
        }
        let mant = (&hi.mant << d as u64) + &lo.mant;
        BigFloat { mant, exp: lo.exp, prec }.normalized()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let prec = self.prec.min(other.prec);
        BigFloat { mant: &self.mant * &other.mant, exp: self.exp + other.exp, prec }.normalized()
    }

    pub fn div(&self, other: &Self) -> Self {
        assert!(!other.is_zero(), "division by zero");
        let prec = self.prec.min(other.prec);
        if self.is_zero() {
            return Self::zero(prec);
        }
        let shift = prec as u64 + 2 + other.mant.magnitude().bits();
        let num = &self.mant << shift;
        let q = num / &other.mant;
        BigFloat { mant: q, exp: self.exp - other.exp - shift as i64, prec }.normalized()
    }

    /// Square root of a non-negative value.
    pub fn sqrt(&self) -> Self {
        assert!(!self.is_negative(), "sqrt of negative value");
        if self.is_zero() {
            return self.clone();
        }
        let bits = self.mant.magnitude().bits();
        let want = 2 * self.prec as u64 + 4;
        let mut t = want.saturating_sub(bits) as i64;
        if (self.exp - t) % 2 != 0 {
            t += 1;
        }
        let scaled: BigUint = self.mant.magnitude() << t as u64;
        let root = scaled.sqrt();
        BigFloat {
            mant: BigInt::from_biguint(Sign::Plus, root),
            exp: (self.exp - t) / 2,
            prec: self.prec,
        }
        .normalized()
    }

    pub fn cmp_value(&self, other: &Self) -> std::cmp::Ordering {
        let d = self.sub(other);
        if d.is_zero() {
            std::cmp::Ordering::Equal
        } else if d.is_negative() {
            std::cmp::Ordering::Less
        } else {
            std::cmp::Ordering::Greater
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.magnitude().bits();
        if bits <= 53 {
            let m: f64 = {
                let digits = self.mant.magnitude().to_u64_digits();
                digits.first().copied().unwrap_or(0) as f64
            };
            let signed = if self.mant.is_negative() { -m } else { m };
            return signed * (self.exp as f64).exp2();
        }
        let shift = bits - 53;
        // keep one extra bit to round to nearest instead of truncating
        let top = self.mant.magnitude() >> (shift - 1);
        let raw = top.to_u64_digits().first().copied().unwrap_or(0);
        let m = ((raw >> 1) + (raw & 1)) as f64;
        let signed = if self.mant.is_negative() { -m } else { m };
        signed * ((self.exp + shift as i64) as f64).exp2()
    }

    /// Scientific-notation decimal string with `sig` significant digits.
    pub fn to_decimal(&self, sig: usize) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let neg = self.mant.is_negative();
        let mag = self.mant.magnitude().clone();
        // value = mag * 2^exp; produce digits*10^dec_exp
        let (digits, dec_exp) = if self.exp >= 0 {
            let v: BigUint = mag << self.exp as u64;
            (v.to_string(), 0i64)
        } else {
            let shift = (-self.exp) as u64;
            // extra decimal digits so the integer part carries sig digits
            let extra = (shift as f64 * std::f64::consts::LOG10_2).ceil() as i64 + sig as i64;
            let pow10 = BigUint::from(10u8).pow(extra as u32);
            let v: BigUint = (mag * pow10) >> shift;
            (v.to_string(), -extra)
        };
        let ndig = digits.len() as i64;
        let keep = sig.min(digits.len());
        let kept = &digits[..keep];
        let exp10 = dec_exp + ndig - 1;
        let mantissa = if keep > 1 {
            format!("{}.{}", &kept[..1], kept[1..].trim_end_matches('0'))
        } else {
            kept.to_string()
        };
        let mantissa = mantissa.trim_end_matches('.').to_string();
        let sign = if neg { "-" } else { "" };
        if exp10 == 0 {
            format!("{sign}{mantissa}")
        } else {
            format!("{sign}{mantissa}e{exp10}")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bf(v: f64) -> BigFloat {
        BigFloat::from_f64(v, 256)
    }

    #[test]
    fn arithmetic_round_trip() {
        let a = bf(1.5);
        let b = bf(-0.25);
        assert_eq!(a.add(&b).to_f64(), 1.25);
        assert_eq!(a.mul(&b).to_f64(), -0.375);
        assert_eq!(a.sub(&a).to_f64(), 0.0);
        assert_eq!(a.div(&bf(2.0)).to_f64(), 0.75);
    }

    #[test]
    fn sqrt_is_accurate() {
        let two = bf(2.0);
        let r = two.sqrt();
        let err = r.mul(&r).sub(&two).abs();
        // error should be far below 2^-200
        let bound = BigFloat::from_ratio(
            &BigInt::from(1),
            &(BigInt::from(1) << 200u32),
            256,
        );
        assert_eq!(err.cmp_value(&bound), std::cmp::Ordering::Less);
    }

    #[test]
    fn ratio_conversion() {
        let x = BigFloat::from_ratio(&BigInt::from(1), &BigInt::from(3), 256);
        let approx = x.to_f64();
        assert!((approx - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn decimal_formatting() {
        assert_eq!(bf(0.0).to_decimal(10), "0");
        let s = bf(-0.125).to_decimal(10);
        assert_eq!(s, "-1.25e-1");
        assert_eq!(bf(3.0).to_decimal(10), "3");
    }
}
