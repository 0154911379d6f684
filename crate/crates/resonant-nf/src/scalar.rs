//! Complex coefficient scalars in two interchangeable modes: exact
//! rational (no rounding) and big-float with a fixed precision.
//!
//! A computation is homogeneous in one mode; series-level operations
//! check compatibility before arithmetic, so the scalar ops themselves
//! treat a mode mismatch as an internal bug.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::bigfloat::BigFloat;
use crate::error::{NfError, Result};

pub const DEFAULT_PREC: u32 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarMode {
    Exact,
    Float { prec: u32 },
}

impl ScalarMode {
    pub fn name(&self) -> String {
        match self {
            ScalarMode::Exact => "exact".into(),
            ScalarMode::Float { prec } => format!("float({prec})"),
        }
    }

    /// Default residual tolerance: 0 in exact mode, 2^(-prec/2) in float mode.
    pub fn default_tol(&self) -> f64 {
        match self {
            ScalarMode::Exact => 0.0,
            ScalarMode::Float { prec } => (-(*prec as f64) / 2.0).exp2(),
        }
    }

    pub fn check_compatible(&self, other: &ScalarMode) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(NfError::MixedScalarModes(self.name(), other.name()))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Exact { re: BigRational, im: BigRational },
    Float { re: BigFloat, im: BigFloat },
}

impl Scalar {
    pub fn mode(&self) -> ScalarMode {
        match self {
            Scalar::Exact { .. } => ScalarMode::Exact,
            Scalar::Float { re, .. } => ScalarMode::Float { prec: re.prec() },
        }
    }

    pub fn zero(mode: ScalarMode) -> Self {
        match mode {
            ScalarMode::Exact => Scalar::Exact { re: BigRational::zero(), im: BigRational::zero() },
            ScalarMode::Float { prec } => {
                Scalar::Float { re: BigFloat::zero(prec), im: BigFloat::zero(prec) }
            }
        }
    }

    pub fn one(mode: ScalarMode) -> Self {
        Scalar::from_i64(1, mode)
    }

    pub fn i(mode: ScalarMode) -> Self {
        Scalar::from_i64_pair(0, 1, mode)
    }

    pub fn from_i64(v: i64, mode: ScalarMode) -> Self {
        Scalar::from_i64_pair(v, 0, mode)
    }

    pub fn from_i64_pair(re: i64, im: i64, mode: ScalarMode) -> Self {
        match mode {
            ScalarMode::Exact => Scalar::Exact {
                re: BigRational::from_integer(BigInt::from(re)),
                im: BigRational::from_integer(BigInt::from(im)),
            },
            ScalarMode::Float { prec } => Scalar::Float {
                re: BigFloat::from_i64(re, prec),
                im: BigFloat::from_i64(im, prec),
            },
        }
    }

    pub fn from_rational_pair(re: BigRational, im: BigRational, mode: ScalarMode) -> Self {
        match mode {
            ScalarMode::Exact => Scalar::Exact { re, im },
            ScalarMode::Float { prec } => Scalar::Float {
                re: BigFloat::from_ratio(re.numer(), re.denom(), prec),
                im: BigFloat::from_ratio(im.numer(), im.denom(), prec),
            },
        }
    }

    pub fn from_f64_pair(re: f64, im: f64, prec: u32) -> Self {
        Scalar::Float { re: BigFloat::from_f64(re, prec), im: BigFloat::from_f64(im, prec) }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact { re, im } => re.is_zero() && im.is_zero(),
            Scalar::Float { re, im } => re.is_zero() && im.is_zero(),
        }
    }

    pub fn is_real(&self) -> bool {
        match self {
            Scalar::Exact { im, .. } => im.is_zero(),
            Scalar::Float { im, .. } => im.is_zero(),
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            Scalar::Exact { re, im } => Scalar::Exact { re: re.clone(), im: -im },
            Scalar::Float { re, im } => Scalar::Float { re: re.clone(), im: im.neg() },
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            Scalar::Exact { re, im } => Scalar::Exact { re: -re, im: -im },
            Scalar::Float { re, im } => Scalar::Float { re: re.neg(), im: im.neg() },
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        match (self, other) {
            (Scalar::Exact { re: a, im: b }, Scalar::Exact { re: c, im: d }) => {
                Scalar::Exact { re: a + c, im: b + d }
            }
            (Scalar::Float { re: a, im: b }, Scalar::Float { re: c, im: d }) => {
                Scalar::Float { re: a.add(c), im: b.add(d) }
            }
            _ => unreachable!("mixed scalar modes must be rejected before arithmetic"),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        match (self, other) {
            (Scalar::Exact { re: a, im: b }, Scalar::Exact { re: c, im: d }) => {
                Scalar::Exact { re: a * c - b * d, im: a * d + b * c }
            }
            (Scalar::Float { re: a, im: b }, Scalar::Float { re: c, im: d }) => Scalar::Float {
                re: a.mul(c).sub(&b.mul(d)),
                im: a.mul(d).add(&b.mul(c)),
            },
            _ => unreachable!("mixed scalar modes must be rejected before arithmetic"),
        }
    }

    pub fn div(&self, other: &Self) -> Self {
        match (self, other) {
            (Scalar::Exact { re: a, im: b }, Scalar::Exact { re: c, im: d }) => {
                let den = c * c + d * d;
                assert!(!den.is_zero(), "division by zero scalar");
                Scalar::Exact { re: (a * c + b * d) / &den, im: (b * c - a * d) / &den }
            }
            (Scalar::Float { re: a, im: b }, Scalar::Float { re: c, im: d }) => {
                let den = c.mul(c).add(&d.mul(d));
                assert!(!den.is_zero(), "division by zero scalar");
                Scalar::Float {
                    re: a.mul(c).add(&b.mul(d)).div(&den),
                    im: b.mul(c).sub(&a.mul(d)).div(&den),
                }
            }
            _ => unreachable!("mixed scalar modes must be rejected before arithmetic"),
        }
    }

    pub fn scale_i64(&self, v: i64) -> Self {
        self.mul(&Scalar::from_i64(v, self.mode()))
    }

    pub fn mul_i(&self) -> Self {
        match self {
            Scalar::Exact { re, im } => Scalar::Exact { re: -im, im: re.clone() },
            Scalar::Float { re, im } => Scalar::Float { re: im.neg(), im: re.clone() },
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = Scalar::one(self.mode());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn re_f64(&self) -> f64 {
        match self {
            Scalar::Exact { re, .. } => rational_to_f64(re),
            Scalar::Float { re, .. } => re.to_f64(),
        }
    }

    pub fn im_f64(&self) -> f64 {
        match self {
            Scalar::Exact { im, .. } => rational_to_f64(im),
            Scalar::Float { im, .. } => im.to_f64(),
        }
    }

    /// |value| as f64, for residual reporting.
    pub fn abs_f64(&self) -> f64 {
        self.re_f64().hypot(self.im_f64())
    }

    /// |value| as a real scalar. Exact mode requires the value to be real
    /// (the only case the pipeline needs exactly).
    pub fn abs_scalar(&self) -> Result<Scalar> {
        match self {
            Scalar::Exact { re, im } => {
                if !im.is_zero() {
                    return Err(NfError::ExactModeUnsupported(
                        "modulus of a non-real exact scalar".into(),
                    ));
                }
                Ok(Scalar::Exact { re: re.abs(), im: BigRational::zero() })
            }
            Scalar::Float { re, im } => {
                let m = re.mul(re).add(&im.mul(im)).sqrt();
                Ok(Scalar::Float { re: m, im: BigFloat::zero(re.prec()) })
            }
        }
    }

    /// Re c as a real scalar.
    pub fn re_part(&self) -> Scalar {
        self.add(&self.conj()).div(&Scalar::from_i64(2, self.mode()))
    }

    /// Im c as a real scalar.
    pub fn im_part(&self) -> Scalar {
        self.mul_i().neg().re_part()
    }

    /// Square root of a non-negative real scalar (float mode only).
    pub fn sqrt_scalar(&self) -> Result<Scalar> {
        match self {
            Scalar::Exact { .. } => {
                Err(NfError::ExactModeUnsupported("square root of an exact scalar".into()))
            }
            Scalar::Float { re, im } => {
                assert!(im.is_zero(), "sqrt of a non-real scalar");
                Ok(Scalar::Float { re: re.sqrt(), im: BigFloat::zero(re.prec()) })
            }
        }
    }

    /// True real part strictly positive.
    pub fn re_is_positive(&self) -> bool {
        match self {
            Scalar::Exact { re, .. } => re.is_positive(),
            Scalar::Float { re, .. } => !re.is_zero() && !re.is_negative(),
        }
    }

    /// exp(2 pi i q / n): the root of w^n = 1 in the sector of angle
    /// 2 pi q / n, refined from an f64 seed by Newton iteration.
    pub fn root_of_unity(n: u32, q: u32, prec: u32) -> Scalar {
        let theta = 2.0 * std::f64::consts::PI * (q % n) as f64 / n as f64;
        let mut w = Scalar::from_f64_pair(theta.cos(), theta.sin(), prec);
        let one = Scalar::from_i64(1, ScalarMode::Float { prec });
        let nn = Scalar::from_i64(n as i64, ScalarMode::Float { prec });
        for _ in 0..64 {
            let wn1 = w.pow(n - 1);
            let wn = wn1.mul(&w);
            let delta = wn.sub(&one).div(&nn.mul(&wn1));
            let next = w.sub(&delta);
            if next == w {
                break;
            }
            w = next;
        }
        w
    }

    /// The principal n-th root of a unit-modulus scalar, refined by
    /// Newton iteration from an f64 seed.
    pub fn unit_nth_root(&self, n: u32) -> Result<Scalar> {
        let prec = match self.mode() {
            ScalarMode::Float { prec } => prec,
            ScalarMode::Exact => {
                return Err(NfError::ExactModeUnsupported("n-th root of a unit scalar".into()))
            }
        };
        let theta = self.im_f64().atan2(self.re_f64()) / n as f64;
        let mut w = Scalar::from_f64_pair(theta.cos(), theta.sin(), prec);
        let nn = Scalar::from_i64(n as i64, ScalarMode::Float { prec });
        for _ in 0..64 {
            let wn1 = w.pow(n - 1);
            let wn = wn1.mul(&w);
            let delta = wn.sub(self).div(&nn.mul(&wn1));
            let next = w.sub(&delta);
            if next == w {
                break;
            }
            w = next;
        }
        Ok(w)
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    let prec = 64;
    BigFloat::from_ratio(r.numer(), r.denom(), prec).to_f64()
}
