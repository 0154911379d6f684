//! End-to-end normalization: Birkhoff reduction of the jet, splitting
//! off the rotation, Hamiltonian interpolation of the remainder, and
//! the graded reduction to the unique normal form; plus the
//! non-resonant branch and the conjugation-invariance check.

use crate::birkhoff::{birkhoff_normalize, linearize_elliptic, Linearized, PlanarJet};
use crate::error::{NfError, Result};
use crate::interp::{hamiltonian_from_divfree, interpolate};
use crate::lie::{assert_area_preserving, compose, time_one_map, MapJet};
use crate::scalar::Scalar;
use crate::series::{FormalSeries, ResonanceContext, TRUNC_NONE};
use crate::unique_nf::{nonresonant_normal_form, unique_normal_form, NormalFormResult};

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub result: NormalFormResult,
    /// Generators used by the map-level elimination stage.
    pub birkhoff_log: Vec<FormalSeries>,
    /// Interpolating Hamiltonian of the rotation-free factor.
    pub interpolant: FormalSeries,
}

/// Full chain for a resonant elliptic jet: eliminate non-resonant map
/// terms, factor out the rotation, interpolate, reduce to the unique
/// normal form.
pub fn normalize_jet(m: &MapJet, ctx: &ResonanceContext) -> Result<PipelineOutput> {
    let mode = m.mode();
    let tol = mode.default_tol();
    let (nj, blog) = birkhoff_normalize(m, ctx)?;
    let mu = ctx.mu(mode)?;
    // N = R_alpha o Phi, so Phi has jet conj(mu) f_N
    let tangent = MapJet::new(nj.f.scale(&mu.conj()))?;
    if tangent.mu.sub(&Scalar::one(mode)).abs_f64() > tol.max(1e-40) {
        return Err(NfError::Certification(
            "rotation-free factor is not tangent to the identity".into(),
        ));
    }
    let h_raw = interpolate(&tangent)?;
    let h = h_raw.resonant_projection(ctx);
    let stray = h_raw.sub(&h)?.max_abs_f64();
    if stray > tol.max(1e-40) * h_raw.max_abs_f64().max(1.0) {
        return Err(NfError::Certification(format!(
            "interpolant carries non-resonant terms (max {stray:.3e})"
        )));
    }
    let result = unique_normal_form(&h, ctx)?;
    Ok(PipelineOutput { result, birkhoff_log: blog, interpolant: h })
}

/// Eliminates every map exponent with k != l + 1, treating the
/// multiplier as non-resonant: divisors mu - mu^(k-l) must stay away
/// from zero for all exponent differences inside the truncation.
pub fn nonresonant_eliminate(m: &MapJet) -> Result<(MapJet, Vec<FormalSeries>)> {
    let mode = m.mode();
    let tol = mode.default_tol();
    let mu = m.mu.clone();
    let one = Scalar::one(mode);
    if mu.mul(&mu.conj()).sub(&one).abs_f64() > tol.max(1e-9) || mu.is_real() {
        return Err(NfError::NotElliptic(
            "non-resonant elimination needs a unit non-real multiplier".into(),
        ));
    }
    assert_area_preserving(m, tol)?;
    let t = m.f.trunc_total();
    if t == TRUNC_NONE {
        return Err(NfError::InvalidInput(
            "non-resonant elimination needs a finite truncation".into(),
        ));
    }
    let mu_diff = |k: u32, l: u32| -> Scalar {
        if k >= l { mu.pow(k - l) } else { mu.conj().pow(l - k) }
    };
    let mut cur = m.clone();
    let mut log = Vec::new();
    for p in 2..=t {
        let slice = cur.f.joint_slice(p);
        let mut v = FormalSeries::zero(mode, TRUNC_NONE, TRUNC_NONE);
        for ((k, l, j), c) in slice.iter() {
            if *k == l + 1 {
                continue;
            }
            let divisor = mu.sub(&mu_diff(*k, *l));
            if divisor.abs_f64() < 1e-9 {
                return Err(NfError::InvalidInput(format!(
                    "small divisor at z^{k} zbar^{l}: the multiplier is resonant within the truncation"
                )));
            }
            v.add_term(*k, *l, *j, c.neg().div(&divisor));
        }
        if v.is_zero() {
            continue;
        }
        let chi = hamiltonian_from_divfree(&v, tol.max(1e-40)).map_err(|e| {
            NfError::Certification(format!(
                "non-resonant elimination at order {p} is not Hamiltonian: {e}"
            ))
        })?;
        let phi = time_one_map(&chi, t, m.f.trunc_eps())?;
        let phi_inv = time_one_map(&chi.neg(), t, m.f.trunc_eps())?;
        cur = compose(&phi_inv, &compose(&cur, &phi)?)?;
        let leftover = cur
            .f
            .joint_slice(p)
            .iter()
            .filter(|((k, l, _), _)| *k != l + 1)
            .map(|(_, c)| c.abs_f64())
            .fold(0.0, f64::max);
        if leftover > tol.max(1e-40) {
            return Err(NfError::Certification(format!(
                "off-diagonal terms of order {p} survived elimination (max {leftover:.3e})"
            )));
        }
        log.push(chi);
    }
    Ok((cur, log))
}

/// Full chain for an elliptic jet whose multiplier is not a root of
/// unity within the truncation: the normal form is a pure twist.
pub fn normalize_nonresonant_jet(m: &MapJet) -> Result<PipelineOutput> {
    let mode = m.mode();
    let tol = mode.default_tol();
    let (nj, blog) = nonresonant_eliminate(m)?;
    let tangent = MapJet::new(nj.f.scale(&m.mu.conj()))?;
    if tangent.mu.sub(&Scalar::one(mode)).abs_f64() > tol.max(1e-40) {
        return Err(NfError::Certification(
            "rotation-free factor is not tangent to the identity".into(),
        ));
    }
    let h_raw = interpolate(&tangent)?;
    let mut h = FormalSeries::zero(mode, h_raw.trunc_total(), h_raw.trunc_eps());
    let mut stray = 0.0f64;
    for ((k, l, j), c) in h_raw.iter() {
        if k == l {
            h.add_term(*k, *l, *j, c.clone());
        } else {
            stray = stray.max(c.abs_f64());
        }
    }
    if stray > tol.max(1e-40) * h_raw.max_abs_f64().max(1.0) {
        return Err(NfError::Certification(format!(
            "non-resonant interpolant carries off-diagonal terms (max {stray:.3e})"
        )));
    }
    let result = nonresonant_normal_form(&h)?;
    Ok(PipelineOutput { result, birkhoff_log: blog, interpolant: h })
}

/// Resonance context for a linearized jet, honoring an explicit order
/// override; None means the multiplier is non-resonant within n_max.
pub fn resolve_resonance(
    lin: &Linearized,
    n_override: Option<u32>,
    trunc_total: u32,
) -> Result<Option<ResonanceContext>> {
    match n_override {
        Some(n) => {
            if n < 3 {
                return Err(NfError::InvalidInput(
                    "resonance order must be at least 3".into(),
                ));
            }
            let q_f = lin.alpha * n as f64 / (2.0 * std::f64::consts::PI);
            let q = (q_f.round() as i64).rem_euclid(n as i64) as u32;
            if num_integer::gcd(n, q) != 1 {
                return Err(NfError::InvalidInput(format!(
                    "rotation number {q}/{n} is not in lowest terms; the true resonance order is smaller"
                )));
            }
            Ok(Some(ResonanceContext::new(n, q, trunc_total)))
        }
        None => Ok(lin
            .resonance
            .map(|(n, q)| ResonanceContext::new(n, q, trunc_total))),
    }
}

/// Planar front end: linearize, pick the regime, run the matching
/// pipeline.
pub fn normalize_planar(
    p: &PlanarJet,
    n_override: Option<u32>,
    n_max: u32,
) -> Result<(PipelineOutput, f64)> {
    let lin = linearize_elliptic(p, n_max)?;
    let trunc = lin.jet.f.trunc_total();
    let out = match resolve_resonance(&lin, n_override, trunc)? {
        Some(ctx) if ctx.n >= 3 => normalize_jet(&lin.jet, &ctx)?,
        _ => normalize_nonresonant_jet(&lin.jet)?,
    };
    Ok((out, lin.alpha))
}

/// Runs the whole pipeline on m and on its conjugate by the time-one
/// flow of chi, returning the largest deviation between the two
/// invariant tables. This is the uniqueness statement in executable
/// form: the deviation must vanish to working precision.
pub fn invariance_check(m: &MapJet, ctx: &ResonanceContext, chi: &FormalSeries) -> Result<f64> {
    let t = m.f.trunc_total();
    let te = m.f.trunc_eps();
    let base = normalize_jet(m, ctx)?;
    let phi = time_one_map(chi, t, te)?;
    let phi_inv = time_one_map(&chi.neg(), t, te)?;
    let conj = compose(&phi_inv, &compose(m, &phi)?)?;
    let moved = normalize_jet(&conj, ctx)?;
    Ok(invariant_deviation(&base.result, &moved.result))
}

/// Uniqueness check at the Hamiltonian level: conjugating h by the
/// time-one flow of a resonant real-valued chi (which fixes the grade-2
/// part, so no re-rotation is needed) must preserve the invariants.
pub fn hamiltonian_invariance_check(
    h: &FormalSeries,
    ctx: &ResonanceContext,
    chi: &FormalSeries,
) -> Result<f64> {
    let base = unique_normal_form(h, ctx)?;
    let conj = crate::lie::lie_exp(chi, h)?;
    let moved = unique_normal_form(&conj, ctx)?;
    Ok(invariant_deviation(&base, &moved))
}

/// Max absolute difference of the retained invariant coefficients.
pub fn invariant_deviation(x: &NormalFormResult, y: &NormalFormResult) -> f64 {
    let a_len = x.a_len().min(y.a_len());
    let b_len = x.b_len().min(y.b_len());
    let mut worst = 0.0f64;
    for (u, v) in x
        .invariants
        .a_seq(a_len)
        .iter()
        .zip(y.invariants.a_seq(a_len).iter())
        .chain(x.invariants.b_seq(b_len).iter().zip(y.invariants.b_seq(b_len).iter()))
    {
        worst = worst.max(u.sub(v).abs_f64());
    }
    worst
}
