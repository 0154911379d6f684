//! Normal forms for parameter families: the series carries a passive
//! graded parameter eps, blocks eps^j x (grade-g polynomial) are
//! normalized in increasing joint order s = g + j, j ascending within
//! each s, with generators eps^j chi and the same per-grade homological
//! operators as the single-map reduction.

use std::collections::BTreeMap;

use crate::basis::GradeBasis;
use crate::error::{NfError, Result};
use crate::homological::HomologicalOperator;
use crate::lie::lie_exp;
use crate::scalar::Scalar;
use crate::series::{delta_order_int, FormalSeries, Grading, ResonanceContext, TRUNC_NONE};
use crate::unique_nf::{grade_cap, rotate_leading};

#[derive(Debug, Clone)]
pub struct FamilyResult {
    pub n: u32,
    pub normalized_h: FormalSeries,
    pub rotation: Scalar,
    pub rotation_angle: f64,
    pub transform_log: Vec<FormalSeries>,
    pub residual_max: f64,
    /// a[k][m]: coefficient of (z zbar)^(k+1) eps^m; a[0][0] = 0.
    pub a: Vec<Vec<Scalar>>,
    /// b[k][m]: coefficient of (z^n + zbar^n)(z zbar)^sigma(k) eps^m
    /// with sigma(k) = 2k for n >= 4 and k for n = 3.
    pub b: Vec<Vec<Scalar>>,
    pub a0: Scalar,
    pub b0: Scalar,
    /// Twist-condition diagnostic: a[1][0] * b[0][0], nonzero when the
    /// family is nondegenerate at the origin.
    pub twist_product: Scalar,
    pub grade_max: u32,
    pub eps_max: u32,
    pub tail_max_abs: f64,
}

fn z_grade(n: u32, k: u32, l: u32, grading: Grading) -> u32 {
    match grading {
        Grading::Total => k + l,
        Grading::HalfTotal => (k + l) / 2,
        Grading::Delta => delta_order_int(k, l, n).unwrap() as u32,
    }
}

/// Terms of cur in blocks strictly before (s, j) in the sweep order.
fn prefix_blocks(
    cur: &FormalSeries,
    n: u32,
    grading: Grading,
    s: u32,
    j: u32,
) -> FormalSeries {
    let mut out = FormalSeries::zero(cur.mode(), TRUNC_NONE, TRUNC_NONE);
    for ((k, l, jj), c) in cur.iter() {
        let st = z_grade(n, *k, *l, grading) + jj;
        if st < s || (st == s && *jj < j) {
            out.add_term(*k, *l, *jj, c.clone());
        }
    }
    out
}

/// Reduces a real-valued resonant family Hamiltonian to the unique
/// parameter-dependent normal form and reads off the two-index
/// invariant tables.
pub fn family_normal_form(h: &FormalSeries, ctx: &ResonanceContext) -> Result<FamilyResult> {
    let mode = h.mode();
    let tol = mode.default_tol();
    let n = ctx.n;
    h.assert_real_valued(tol)?;
    h.assert_resonant(n)?;
    let trunc = h.trunc_total();
    let eps_max = h.trunc_eps();
    if trunc == TRUNC_NONE || eps_max == TRUNC_NONE {
        return Err(NfError::InvalidInput(
            "family normalization needs finite truncations in both degree and eps".into(),
        ));
    }
    if h.coeff(1, 1, 0).abs_f64() > tol {
        return Err(NfError::InvalidInput(
            "family input carries a z zbar term at eps^0; the unperturbed slice must be tangent to the identity".into(),
        ));
    }
    let grading = GradeBasis::grading(n);
    let (h_rot, w, angle) = rotate_leading(h, ctx)?;
    let b0 = h_rot.coeff(n, 0, 0).re_part();
    let a0 = if n == 3 { h_rot.coeff(3, 3, 0).re_part() } else { h_rot.coeff(2, 2, 0).re_part() };
    let m_cap = grade_cap(n, trunc);

    let mut cur = h_rot.clone();
    let mut log: Vec<FormalSeries> = Vec::new();
    let mut ops: BTreeMap<u32, HomologicalOperator> = BTreeMap::new();
    for s in 3..=(m_cap + eps_max) {
        for j in 0..=eps_max.min(s - 3) {
            let g = s - j;
            if g > m_cap || GradeBasis::dim_formula(n, g - 1) == 0 {
                continue;
            }
            let block = cur.grade_slice(g, ctx, grading).eps_slice(j);
            if block.is_zero() {
                continue;
            }
            if !ops.contains_key(&(g - 1)) {
                ops.insert(g - 1, HomologicalOperator::new(n, g - 1, &a0, &b0)?);
            }
            let op = &ops[&(g - 1)];
            let (chi, normal) = op.complement_project(&block)?;
            if chi.is_zero() {
                continue;
            }
            let before = prefix_blocks(&cur, n, grading, s, j);
            let gen = chi.mul_eps_pow(j, eps_max).neg();
            cur = lie_exp(&gen, &cur)?;
            let scale = cur.max_abs_f64().max(1.0);
            let new_block = cur.grade_slice(g, ctx, grading).eps_slice(j);
            if new_block.distance(&normal)? > tol * scale {
                return Err(NfError::Certification(format!(
                    "family block (grade {g}, eps^{j}) did not land in its complement"
                )));
            }
            let after = prefix_blocks(&cur, n, grading, s, j);
            if after.distance(&before)? > tol * scale {
                return Err(NfError::Certification(format!(
                    "family block (grade {g}, eps^{j}) disturbed earlier blocks"
                )));
            }
            log.push(gen);
        }
    }

    let mut normalized = FormalSeries::zero(mode, trunc, eps_max);
    let mut tail_max_abs = 0.0f64;
    let noise = tol * cur.max_abs_f64().max(1.0);
    for ((k, l, j), c) in cur.iter() {
        if c.abs_f64() <= noise {
            continue;
        }
        if z_grade(n, *k, *l, grading) <= m_cap {
            normalized.add_term(*k, *l, *j, c.clone());
        } else {
            tail_max_abs = tail_max_abs.max(c.abs_f64());
        }
    }
    check_family_shape(&normalized, n, tol)?;

    let mut replayed = h.rotate(&w);
    for gen in &log {
        replayed = lie_exp(gen, &replayed)?;
    }
    let mut residual_max = 0.0f64;
    for ((k, l, j), c) in replayed.iter() {
        if z_grade(n, *k, *l, grading) <= m_cap {
            residual_max = residual_max.max(c.sub(&normalized.coeff(*k, *l, *j)).abs_f64());
        }
    }
    for ((k, l, j), c) in normalized.iter() {
        if replayed.coeff(*k, *l, *j).is_zero() {
            residual_max = residual_max.max(c.abs_f64());
        }
    }

    // invariant tables
    let action_rows = match n {
        3 => (m_cap / 2) as usize,
        _ => m_cap as usize,
    };
    let a: Vec<Vec<Scalar>> = (0..action_rows)
        .map(|k| {
            (0..=eps_max)
                .map(|m| normalized.coeff(k as u32 + 1, k as u32 + 1, m).re_part())
                .collect()
        })
        .collect();
    let sigma = |k: u32| if n == 3 { k } else { 2 * k };
    let res_rows = {
        let mut r = 0u32;
        while z_grade(n, sigma(r) + n, sigma(r), grading) <= m_cap {
            r += 1;
        }
        r as usize
    };
    let b: Vec<Vec<Scalar>> = (0..res_rows)
        .map(|k| {
            (0..=eps_max)
                .map(|m| normalized.coeff(sigma(k as u32) + n, sigma(k as u32), m).re_part())
                .collect()
        })
        .collect();
    let twist_product = if a.len() > 1 && !b.is_empty() {
        a[1][0].mul(&b[0][0])
    } else {
        Scalar::zero(mode)
    };

    Ok(FamilyResult {
        n,
        normalized_h: normalized,
        rotation: w,
        rotation_angle: angle,
        transform_log: log,
        residual_max,
        a,
        b,
        a0,
        b0,
        twist_product,
        grade_max: m_cap,
        eps_max,
        tail_max_abs,
    })
}

/// Family shape: per eps-power only z zbar powers (at least one, none
/// at eps^0) and resonant pairs with the per-regime parity constraint;
/// for n = 3 every z-degree = 1 (mod 3) is empty at all eps-powers.
fn check_family_shape(h: &FormalSeries, n: u32, tol: f64) -> Result<()> {
    for ((k, l, j), c) in h.iter() {
        if c.abs_f64() <= tol {
            continue;
        }
        let ok = if k == l {
            *k >= 1
                && !(*k == 1 && *j == 0)
                && (n != 3 || *k % 3 != 2)
        } else {
            let (hi, lo) = if k > l { (*k, *l) } else { (*l, *k) };
            hi == lo + n && if n == 3 { lo % 3 != 2 } else { lo % 2 == 0 }
        };
        if !ok {
            return Err(NfError::Certification(format!(
                "family normal form contains a stray term z^{k} zbar^{l} eps^{j}"
            )));
        }
    }
    Ok(())
}
