//! JSON serialization of series and scalars. Coefficients travel as
//! strings: "p/q" rationals or decimal literals (with optional
//! exponent); exact mode round-trips rationals losslessly, float mode
//! parses decimals into software floats at the requested precision.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{NfError, Result};
use crate::scalar::{Scalar, ScalarMode, DEFAULT_PREC};
use crate::series::{FormalSeries, TRUNC_NONE};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermJson {
    pub k: u32,
    pub l: u32,
    #[serde(default)]
    pub j: u32,
    pub re: String,
    #[serde(default = "zero_string")]
    pub im: String,
}

fn zero_string() -> String {
    "0".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesJson {
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prec_bits: Option<u32>,
    pub trunc_total: u32,
    pub trunc_eps: u32,
    pub terms: Vec<TermJson>,
}

/// Parses "p/q", integer, or decimal (optionally with an exponent)
/// into an exact rational.
pub fn parse_number(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || NfError::Json(format!("cannot parse number {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let num: BigInt = p.trim().parse().map_err(|_| bad())?;
        let den: BigInt = q.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(NfError::Json(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(num, den));
    }
    let (mantissa, exp10) = match s.split_once(['e', 'E']) {
        Some((m, e)) => {
            let e: i64 = e.parse().map_err(|_| bad())?;
            (m, e)
        }
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let digits = format!(
        "{}{}",
        if int_part.is_empty() || int_part == "-" || int_part == "+" {
            format!("{int_part}0")
        } else {
            int_part.to_string()
        },
        frac_part
    );
    let num: BigInt = digits.parse().map_err(|_| bad())?;
    let shift = exp10 - frac_part.len() as i64;
    let ten = BigInt::from(10);
    Ok(if shift >= 0 {
        BigRational::from_integer(num * ten.pow(shift as u32))
    } else {
        BigRational::new(num, ten.pow((-shift) as u32))
    })
}

fn rational_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Renders one real component of a scalar as a JSON number string.
pub fn number_string(s: &Scalar, imag: bool) -> String {
    match s {
        Scalar::Exact { re, im } => rational_string(if imag { im } else { re }),
        Scalar::Float { re, im } => {
            let x = if imag { im } else { re };
            let sig = (x.prec() as f64 * 0.30103) as usize + 3;
            x.to_decimal(sig)
        }
    }
}

pub fn parse_scalar(re: &str, im: &str, mode: ScalarMode) -> Result<Scalar> {
    Ok(Scalar::from_rational_pair(parse_number(re)?, parse_number(im)?, mode))
}

pub fn parse_mode(mode: &str, prec_bits: Option<u32>) -> Result<ScalarMode> {
    match mode {
        "exact" => Ok(ScalarMode::Exact),
        "float" => Ok(ScalarMode::Float { prec: prec_bits.unwrap_or(DEFAULT_PREC) }),
        other => Err(NfError::Json(format!("unknown mode {other:?}"))),
    }
}

pub fn series_to_json(h: &FormalSeries) -> SeriesJson {
    let (mode, prec_bits) = match h.mode() {
        ScalarMode::Exact => ("exact".to_string(), None),
        ScalarMode::Float { prec } => ("float".to_string(), Some(prec)),
    };
    let terms = h
        .iter()
        .map(|((k, l, j), c)| TermJson {
            k: *k,
            l: *l,
            j: *j,
            re: number_string(c, false),
            im: number_string(c, true),
        })
        .collect();
    SeriesJson {
        mode,
        prec_bits,
        trunc_total: h.trunc_total(),
        trunc_eps: h.trunc_eps(),
        terms,
    }
}

pub fn series_from_json(doc: &SeriesJson) -> Result<FormalSeries> {
    let mode = parse_mode(&doc.mode, doc.prec_bits)?;
    let mut h = FormalSeries::zero(mode, doc.trunc_total, doc.trunc_eps);
    for t in &doc.terms {
        let c = parse_scalar(&t.re, &t.im, mode)?;
        h.add_term(t.k, t.l, t.j, c);
    }
    Ok(h)
}

/// Mode override applied from CLI flags onto a parsed series document.
pub fn apply_mode_flags(
    doc: &mut SeriesJson,
    mode: Option<&str>,
    prec: Option<u32>,
    trunc: Option<u32>,
) {
    if let Some(m) = mode {
        doc.mode = m.to_string();
    }
    if let Some(p) = prec {
        doc.prec_bits = Some(p);
    }
    if let Some(t) = trunc {
        doc.trunc_total = t;
    }
    if doc.trunc_total == 0 {
        doc.trunc_total = TRUNC_NONE;
    }
}
