//! Grade-by-grade reduction of a resonant real-valued Hamiltonian to
//! its unique normal form, and extraction of the invariant sequences.

use crate::basis::GradeBasis;
use crate::error::{NfError, Result};
use crate::homological::HomologicalOperator;
use crate::lie::lie_exp;
use crate::polar::PolarHamiltonian;
use crate::scalar::{Scalar, ScalarMode};
use crate::series::{FormalSeries, ResonanceContext, TRUNC_NONE};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    N5,
    N4,
    N3,
    Nonresonant,
    Family,
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::N5 => "n5",
            Regime::N4 => "n4",
            Regime::N3 => "n3",
            Regime::Nonresonant => "nonresonant",
            Regime::Family => "family",
        }
    }

    pub fn for_order(n: u32) -> Regime {
        match n {
            3 => Regime::N3,
            4 => Regime::N4,
            _ => Regime::N5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NormalFormResult {
    pub n: u32,
    pub regime: Regime,
    pub invariants: PolarHamiltonian,
    pub normalized_h: FormalSeries,
    /// Unit factor w of the initial rotation z -> w z.
    pub rotation: Scalar,
    pub rotation_angle: f64,
    /// Generators applied (in order) after the rotation.
    pub transform_log: Vec<FormalSeries>,
    pub residual_max: f64,
    /// Highest grade whose monomials are all inside the truncation;
    /// invariants are reported for grades up to here.
    pub grade_max: u32,
    pub a0: Scalar,
    pub b0: Scalar,
    /// Largest dropped coefficient beyond grade_max (incomplete grades).
    pub tail_max_abs: f64,
}

impl NormalFormResult {
    /// Number of action invariants a_k fully inside the truncation.
    pub fn a_len(&self) -> usize {
        let g = self.grade_max;
        match self.n {
            3 => (g / 2).saturating_sub(2) as usize,
            _ => g.saturating_sub(1) as usize,
        }
    }

    /// Number of resonant invariants b_k fully inside the truncation.
    pub fn b_len(&self) -> usize {
        let g = self.grade_max;
        match self.n {
            0 => 0,
            3 => {
                if g >= 3 {
                    ((g - 3) / 2 + 1) as usize
                } else {
                    0
                }
            }
            _ => {
                if g >= 2 {
                    ((g - 2) / 2 + 1) as usize
                } else {
                    0
                }
            }
        }
    }
}

/// Highest grade fully contained in total degree N.
pub fn grade_cap(n: u32, trunc_total: u32) -> u32 {
    match n {
        3 => trunc_total,
        4 => trunc_total / 2,
        _ => {
            let mut m = 0;
            while 2 * (m + 1) + (n - 4) * ((m + 1) / 2) <= trunc_total {
                m += 1;
            }
            m
        }
    }
}

/// Rotates z -> w z so the leading coefficient h_{n0} becomes the
/// positive real b0 = |h_{n0}|; returns the rotated series, w, and the
/// rotation angle theta = -arg(h_{n0}) / n.
pub fn rotate_leading(
    h: &FormalSeries,
    ctx: &ResonanceContext,
) -> Result<(FormalSeries, Scalar, f64)> {
    let mode = h.mode();
    let tol = mode.default_tol();
    let c = h.coeff(ctx.n, 0, 0);
    if c.abs_f64() <= tol {
        return Err(NfError::DegenerateLeadingTerm(format!(
            "leading resonant coefficient h_{{{},0}} vanishes",
            ctx.n
        )));
    }
    let angle = -c.im_f64().atan2(c.re_f64()) / ctx.n as f64;
    if c.is_real() && c.re_is_positive() {
        return Ok((h.clone(), Scalar::one(mode), 0.0));
    }
    let w = match mode {
        ScalarMode::Float { .. } => {
            let u = c.conj().div(&c.abs_scalar()?);
            u.unit_nth_root(ctx.n)?
        }
        ScalarMode::Exact => {
            return Err(NfError::ExactModeUnsupported(
                "leading-term rotation for a non-positive exact coefficient".into(),
            ))
        }
    };
    Ok((h.rotate(&w), w, angle))
}

/// Reduces a resonant real-valued Hamiltonian to the unique normal
/// form, sweeping grade by grade and recording the generators.
pub fn unique_normal_form(h: &FormalSeries, ctx: &ResonanceContext) -> Result<NormalFormResult> {
    let mode = h.mode();
    let tol = mode.default_tol();
    let n = ctx.n;
    h.assert_real_valued(tol)?;
    h.assert_resonant(n)?;
    let trunc = h.trunc_total();
    if trunc == TRUNC_NONE {
        return Err(NfError::InvalidInput(
            "normalization needs a finite truncation".into(),
        ));
    }
    let grading = GradeBasis::grading(n);
    let (h_rot, w, angle) = rotate_leading(h, ctx)?;
    let b0 = h_rot.coeff(n, 0, 0).re_part();
    let a0 = if n == 3 { h_rot.coeff(3, 3, 0).re_part() } else { h_rot.coeff(2, 2, 0).re_part() };
    let m_max = grade_cap(n, trunc);
    let p_start = if n == 3 { 3 } else { 2 };

    let mut cur = h_rot.clone();
    let mut log: Vec<FormalSeries> = Vec::new();
    for p in p_start..m_max {
        if GradeBasis::dim_formula(n, p) == 0 {
            continue;
        }
        let target_grade = p + 1;
        let t_el = cur.grade_slice(target_grade, ctx, grading);
        let op = HomologicalOperator::new(n, p, &a0, &b0)?;
        let (chi, normal) = op.complement_project(&t_el)?;
        if chi.is_zero() {
            continue;
        }
        let below: Vec<FormalSeries> =
            (1..target_grade).map(|g| cur.grade_slice(g, ctx, grading)).collect();
        let gen = chi.neg();
        cur = lie_exp(&gen, &cur)?;
        let scale = cur.max_abs_f64().max(1.0);
        let new_slice = cur.grade_slice(target_grade, ctx, grading);
        if new_slice.distance(&normal)? > tol * scale {
            return Err(NfError::Certification(format!(
                "grade {target_grade} did not land in its complement"
            )));
        }
        for (g, before) in below.iter().enumerate() {
            let after = cur.grade_slice(g as u32 + 1, ctx, grading);
            if after.distance(before)? > tol * scale {
                return Err(NfError::Certification(format!(
                    "normalizing grade {target_grade} disturbed grade {}",
                    g + 1
                )));
            }
        }
        log.push(gen);
    }

    // split retained grades from the incomplete tail
    let mut normalized = FormalSeries::zero(mode, trunc, h.trunc_eps());
    let mut tail_max_abs = 0.0f64;
    let noise = tol * cur.max_abs_f64().max(1.0);
    for ((k, l, j), c) in cur.iter() {
        if c.abs_f64() <= noise {
            continue;
        }
        let g = match grading {
            crate::series::Grading::Total => k + l,
            crate::series::Grading::HalfTotal => (k + l) / 2,
            crate::series::Grading::Delta => {
                crate::series::delta_order_int(*k, *l, n).unwrap() as u32
            }
        };
        if g <= m_max {
            normalized.add_term(*k, *l, *j, c.clone());
        } else {
            tail_max_abs = tail_max_abs.max(c.abs_f64());
        }
    }
    check_shape(&normalized, n, tol)?;

    // conjugacy residual: replay the transformation on the input
    let mut replayed = h.rotate(&w);
    for gen in &log {
        replayed = lie_exp(gen, &replayed)?;
    }
    let mut residual_max = 0.0f64;
    for g in 1..=m_max {
        let d = replayed
            .grade_slice(g, ctx, grading)
            .distance(&normalized.grade_slice(g, ctx, grading))?;
        residual_max = residual_max.max(d);
    }

    let invariants = PolarHamiltonian::from_series(&normalized, ctx)?;
    Ok(NormalFormResult {
        n,
        regime: Regime::for_order(n),
        invariants,
        normalized_h: normalized,
        rotation: w,
        rotation_angle: angle,
        transform_log: log,
        residual_max,
        grade_max: m_max,
        a0,
        b0,
        tail_max_abs,
    })
}

/// Structural constraints of the normal form: only action monomials
/// z^k zbar^k and resonant pairs z^(s+n) zbar^s appear; for n >= 4 the
/// resonant index s is even; for n = 3 both families exclude s = 2
/// (mod 3) and every total degree = 1 (mod 3) is empty.
fn check_shape(h: &FormalSeries, n: u32, tol: f64) -> Result<()> {
    for ((k, l, _), c) in h.iter() {
        if c.abs_f64() <= tol {
            continue;
        }
        let ok = if k == l {
            if n == 3 {
                *k >= 3 && (*k - 3) % 3 != 2
            } else {
                *k >= 2
            }
        } else {
            let (hi, lo) = if k > l { (*k, *l) } else { (*l, *k) };
            hi == lo + n
                && if n == 3 {
                    lo % 3 != 2
                } else {
                    lo % 2 == 0
                }
        };
        if !ok {
            return Err(NfError::Certification(format!(
                "normal form contains a stray monomial z^{k} zbar^{l}"
            )));
        }
        if n == 3 && (*k + *l) % 3 == 1 {
            return Err(NfError::Certification(format!(
                "normal form kept a degree {} term (should vanish)",
                k + l
            )));
        }
    }
    Ok(())
}

/// Degenerate path for a jet with no resonant coupling: the series
/// depends on z zbar only, B vanishes identically and the action part
/// encodes the twist coefficients.
pub fn nonresonant_normal_form(h: &FormalSeries) -> Result<NormalFormResult> {
    let mode = h.mode();
    let tol = mode.default_tol();
    h.assert_real_valued(tol)?;
    let trunc = h.trunc_total();
    if trunc == TRUNC_NONE {
        return Err(NfError::InvalidInput(
            "normalization needs a finite truncation".into(),
        ));
    }
    let mut action = std::collections::BTreeMap::new();
    for ((k, l, j), c) in h.iter() {
        if k != l || *j != 0 {
            return Err(NfError::InvalidInput(format!(
                "non-resonant normal form expects z zbar powers only, found z^{k} zbar^{l} eps^{j}"
            )));
        }
        action.insert(*k, c.re_part());
    }
    let invariants = PolarHamiltonian { n: 0, action, resonant: Default::default() };
    Ok(NormalFormResult {
        n: 0,
        regime: Regime::Nonresonant,
        invariants,
        normalized_h: h.clone(),
        rotation: Scalar::one(mode),
        rotation_angle: 0.0,
        transform_log: Vec::new(),
        residual_max: 0.0,
        grade_max: trunc / 2,
        a0: h.coeff(2, 2, 0).re_part(),
        b0: Scalar::zero(mode),
        tail_max_abs: 0.0,
    })
}
