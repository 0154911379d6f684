//! Map-level Birkhoff normalization: linearization of an elliptic
//! planar jet into complex coordinates, then order-by-order elimination
//! of all non-resonant terms by conjugation with time-one flows of
//! real-valued generators.
//!
//! On the f-component an exponent (k, l) is resonant exactly when
//! k - l - 1 = 0 (mod n). The homological divisor for a non-resonant
//! exponent is mu - mu^(k-l); it is nonzero because mu is an exact
//! root of unity of order n.

use crate::error::{NfError, Result};
use crate::interp::hamiltonian_from_divfree;
use crate::lie::{assert_area_preserving, compose, subst, time_one_map, MapJet};
use crate::scalar::{Scalar, ScalarMode};
use crate::series::{FormalSeries, ResonanceContext, TRUNC_NONE};

/// A planar jet (X(x, y), Y(x, y)) with real coefficients; exponent
/// triples are read as x^k y^l eps^j.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarJet {
    pub x: FormalSeries,
    pub y: FormalSeries,
}

/// True when the f-exponent (k, l) survives conjugation by the
/// rotation of order n.
pub fn is_map_resonant(n: u32, k: u32, l: u32) -> bool {
    (k as i64 - l as i64 - 1).rem_euclid(n as i64) == 0
}

/// Result of linearization: the complex jet, the rotation angle, and
/// the detected resonance order (least n with mu^n = 1), if any.
#[derive(Debug, Clone)]
pub struct Linearized {
    pub jet: MapJet,
    pub alpha: f64,
    pub resonance: Option<(u32, u32)>,
}

fn planar_linear_part(p: &PlanarJet) -> [Scalar; 4] {
    [p.x.coeff(1, 0, 0), p.x.coeff(0, 1, 0), p.y.coeff(1, 0, 0), p.y.coeff(0, 1, 0)]
}

/// Detects the least n <= n_max with mu^n = 1 (within a fixed angular
/// tolerance), returning (n, q) with alpha = 2 pi q / n.
pub fn detect_resonance(mu: &Scalar, n_max: u32) -> Option<(u32, u32)> {
    let one = Scalar::one(mu.mode());
    for n in 1..=n_max {
        let p = mu.pow(n);
        if p.sub(&one).abs_f64() < 1e-9 {
            let alpha = mu.im_f64().atan2(mu.re_f64());
            let q = (alpha * n as f64 / (2.0 * std::f64::consts::PI)).round() as i64;
            let q = q.rem_euclid(n as i64) as u32;
            return Some((n, q));
        }
    }
    None
}

/// Converts a planar jet with elliptic linear part into a complex
/// MapJet with linear part mu z: an area-preserving linear change
/// brings the linear part to the rotation by alpha, then z = x + i y.
pub fn linearize_elliptic(p: &PlanarJet, n_max: u32) -> Result<Linearized> {
    let mode = p.x.mode();
    let [a, b, c, d] = planar_linear_part(p);
    let tol = mode.default_tol().max(1e-12);
    for s in [&p.x, &p.y] {
        for ((_, _, _), v) in s.iter() {
            if !v.is_real() {
                return Err(NfError::InvalidInput("planar jet must have real coefficients".into()));
            }
        }
    }
    let tr = a.add(&d);
    let tr_f = tr.re_f64();
    if tr_f.abs() >= 2.0 - 1e-12 {
        return Err(NfError::NotElliptic(format!("trace {tr_f}")));
    }

    let already_rotation =
        a.sub(&d).abs_f64() <= tol && b.add(&c).abs_f64() <= tol;
    let (px, py) = if already_rotation {
        (p.x.clone(), p.y.clone())
    } else {
        let prec = match mode {
            ScalarMode::Float { prec } => prec,
            ScalarMode::Exact => {
                return Err(NfError::ExactModeUnsupported(
                    "general elliptic linearization (use float mode)".into(),
                ))
            }
        };
        // column u = (1,0) or (0,1), w = (cos*u - M u)/sin; C = [u, -w]
        let half = Scalar::from_rational_pair(
            num_rational::BigRational::new(1.into(), 2.into()),
            num_traits::Zero::zero(),
            mode,
        );
        let cos_a = tr.mul(&half);
        let one = Scalar::one(mode);
        let sin_abs = one.sub(&cos_a.mul(&cos_a)).abs_scalar()?.sqrt_scalar()?;
        // orient sin so that det C > 0
        let use_e1 = c.abs_f64() > b.abs_f64();
        let sin_a = if use_e1 {
            if c.re_is_positive() { sin_abs.clone() } else { sin_abs.neg() }
        } else if b.re_is_positive() {
            sin_abs.neg()
        } else {
            sin_abs.clone()
        };
        let (u0, u1, m0, m1) = if use_e1 {
            (one.clone(), Scalar::zero(mode), a.clone(), c.clone())
        } else {
            (Scalar::zero(mode), one.clone(), b.clone(), d.clone())
        };
        let w0 = cos_a.mul(&u0).sub(&m0).div(&sin_a);
        let w1 = cos_a.mul(&u1).sub(&m1).div(&sin_a);
        // C = [[u0, -w0], [u1, -w1]], rescaled to det 1
        let det = u0.mul(&w1.neg()).sub(&u1.mul(&w0.neg()));
        if !det.re_is_positive() {
            return Err(NfError::Certification("linearization lost orientation".into()));
        }
        let s = det.abs_scalar()?.sqrt_scalar()?;
        let c00 = u0.div(&s);
        let c01 = w0.neg().div(&s);
        let c10 = u1.div(&s);
        let c11 = w1.neg().div(&s);
        // inverse of a det-1 2x2 matrix
        let i00 = c11.clone();
        let i01 = c01.neg();
        let i10 = c10.neg();
        let i11 = c00.clone();
        let tt = p.x.trunc_total();
        let te = p.x.trunc_eps();
        let lin = |e0: &Scalar, e1: &Scalar| -> FormalSeries {
            let mut s = FormalSeries::zero(mode, tt, te);
            s.add_term(1, 0, 0, e0.clone());
            s.add_term(0, 1, 0, e1.clone());
            s
        };
        let cx = lin(&c00, &c01);
        let cy = lin(&c10, &c11);
        let x1 = subst(&p.x, &cx, &cy)?;
        let y1 = subst(&p.y, &cx, &cy)?;
        let px = x1.scale(&i00).add(&y1.scale(&i01))?;
        let py = x1.scale(&i10).add(&y1.scale(&i11))?;
        let _ = prec;
        (px, py)
    };

    // z = x + i y with x = (z + zbar)/2, y = -i (z - zbar)/2
    let tt = px.trunc_total();
    let te = px.trunc_eps();
    let half = Scalar::from_rational_pair(
        num_rational::BigRational::new(1.into(), 2.into()),
        num_traits::Zero::zero(),
        mode,
    );
    let mhalf_i = half.mul_i().neg();
    let mut xz = FormalSeries::zero(mode, tt, te);
    xz.add_term(1, 0, 0, half.clone());
    xz.add_term(0, 1, 0, half.clone());
    let mut yz = FormalSeries::zero(mode, tt, te);
    yz.add_term(1, 0, 0, mhalf_i.clone());
    yz.add_term(0, 1, 0, mhalf_i.neg());
    let fx = subst(&px, &xz, &yz)?;
    let fy = subst(&py, &xz, &yz)?;
    let f = fx.add(&fy.mul_i())?;
    let jet = MapJet::new(f)?;
    let mu = jet.mu.clone();
    if mu.im_f64().abs() < 1e-12 {
        return Err(NfError::NotElliptic("real multiplier".into()));
    }
    let alpha = mu.im_f64().atan2(mu.re_f64());
    let resonance = detect_resonance(&mu, n_max);
    Ok(Linearized { jet, alpha, resonance })
}

/// Conjugates the jet to one commuting with the rotation by alpha,
/// eliminating all non-resonant f-exponents order by order. Returns
/// the normalized jet and the ordered list of generators used.
pub fn birkhoff_normalize(
    m: &MapJet,
    ctx: &ResonanceContext,
) -> Result<(MapJet, Vec<FormalSeries>)> {
    let mode = m.mode();
    let tol = mode.default_tol();
    let mu = ctx.mu(mode)?;
    if m.mu.sub(&mu).abs_f64() > tol.max(1e-9) {
        return Err(NfError::InvalidInput(format!(
            "jet multiplier {}+{}i does not match the resonance context",
            m.mu.re_f64(),
            m.mu.im_f64()
        )));
    }
    assert_area_preserving(m, tol)?;
    let t = m.f.trunc_total();
    if t == TRUNC_NONE {
        return Err(NfError::InvalidInput(
            "birkhoff normalization needs a finite truncation".into(),
        ));
    }
    // mu^e for e = 0..n-1
    let mut mu_pow = Vec::with_capacity(ctx.n as usize);
    let mut acc = Scalar::one(mode);
    for _ in 0..ctx.n {
        mu_pow.push(acc.clone());
        acc = acc.mul(&mu);
    }

    let mut cur = m.clone();
    let mut log = Vec::new();
    for p in 2..=t {
        let slice = cur.f.joint_slice(p);
        let mut v = FormalSeries::zero(mode, TRUNC_NONE, TRUNC_NONE);
        for ((k, l, j), c) in slice.iter() {
            if is_map_resonant(ctx.n, *k, *l) {
                continue;
            }
            let e = (*k as i64 - *l as i64).rem_euclid(ctx.n as i64) as usize;
            let divisor = mu.sub(&mu_pow[e]);
            debug_assert!(!divisor.is_zero(), "zero divisor on a non-resonant exponent");
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
            .filter(|((k, l, _), _)| !is_map_resonant(ctx.n, *k, *l))
            .map(|(_, c)| c.abs_f64())
            .fold(0.0, f64::max);
        if leftover > tol.max(1e-40) {
            return Err(NfError::Certification(format!(
                "non-resonant terms of order {p} survived elimination (max {leftover:.3e})"
            )));
        }
        log.push(chi);
    }
    let resid = commutation_residual(&cur, &mu)?;
    if resid > tol.max(1e-40) {
        return Err(NfError::Certification(format!(
            "normalized jet fails to commute with the rotation (residual {resid:.3e})"
        )));
    }
    Ok((cur, log))
}

/// Max coefficient of N o R_alpha - R_alpha o N on the f-component.
pub fn commutation_residual(m: &MapJet, mu: &Scalar) -> Result<f64> {
    let mut worst = 0.0f64;
    for ((k, l, _), c) in m.f.iter() {
        let factor = mu.pow(*k).mul(&mu.conj().pow(*l)).sub(mu);
        worst = worst.max(factor.mul(c).abs_f64());
    }
    Ok(worst)
}

/// Replays a generator log on a jet (conjugation by each time-one
/// flow in order), for conjugacy verification.
pub fn replay(m: &MapJet, log: &[FormalSeries]) -> Result<MapJet> {
    let t = m.f.trunc_total();
    let te = m.f.trunc_eps();
    let mut cur = m.clone();
    for chi in log {
        let phi = time_one_map(chi, t, te)?;
        let phi_inv = time_one_map(&chi.neg(), t, te)?;
        cur = compose(&phi_inv, &compose(&cur, &phi)?)?;
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::lie_exp;

    fn fmono(re: f64, im: f64, k: u32, l: u32, prec: u32) -> FormalSeries {
        FormalSeries::monomial(Scalar::from_f64_pair(re, im, prec), k, l, 0, TRUNC_NONE, TRUNC_NONE)
    }

    #[test]
    fn resonance_classes() {
        assert!(is_map_resonant(5, 1, 0));
        assert!(!is_map_resonant(5, 2, 0));
        // zbar^(n-1): k - l - 1 = -n
        assert!(is_map_resonant(5, 0, 4));
        assert!(is_map_resonant(4, 3, 2));
    }

    #[test]
    fn eliminates_quadratic_term_n5() {
        let prec = 256;
        let mode = ScalarMode::Float { prec };
        let ctx = ResonanceContext::new(5, 1, 6);
        let mu = ctx.mu(mode).unwrap();
        // f = mu (z + z^2 completed to an area-preserving jet):
        // build from a generator so area preservation is automatic.
        let chi = {
            let c = Scalar::from_f64_pair(0.0, 0.5, prec);
            let mut s = FormalSeries::zero(mode, TRUNC_NONE, TRUNC_NONE);
            s.add_term(3, 0, 0, c.clone());
            s.add_term(0, 3, 0, c.conj());
            s.add_term(2, 1, 0, Scalar::from_f64_pair(0.3, -0.1, prec));
            s.add_term(1, 2, 0, Scalar::from_f64_pair(0.3, 0.1, prec));
            s
        };
        let phi = time_one_map(&chi, 6, 0).unwrap();
        let m = compose(&MapJet::rotation(mu.clone(), 6, 0), &phi).unwrap();
        let (n, log) = birkhoff_normalize(&m, &ctx).unwrap();
        assert!(!log.is_empty());
        assert!(commutation_residual(&n, &mu).unwrap() < 1e-60);
        // replaying the log reproduces the output
        let again = replay(&m, &log).unwrap();
        assert!(again.f.distance(&n.f).unwrap() < 1e-60);
    }

    #[test]
    fn exact_mode_n4() {
        let mode = ScalarMode::Exact;
        let ctx = ResonanceContext::new(4, 1, 7);
        let mu = ctx.mu(mode).unwrap();
        assert_eq!(mu, Scalar::i(mode));
        let mut chi = FormalSeries::zero(mode, TRUNC_NONE, TRUNC_NONE);
        chi.add_term(3, 0, 0, Scalar::from_i64_pair(0, 2, mode));
        chi.add_term(0, 3, 0, Scalar::from_i64_pair(0, -2, mode));
        chi.add_term(2, 2, 0, Scalar::from_i64(1, mode));
        let phi = time_one_map(&chi, 7, 0).unwrap();
        let m = compose(&MapJet::rotation(mu.clone(), 7, 0), &phi).unwrap();
        let (n, log) = birkhoff_normalize(&m, &ctx).unwrap();
        assert_eq!(commutation_residual(&n, &mu).unwrap(), 0.0);
        for ((k, l, _), _) in n.f.iter() {
            assert!(is_map_resonant(4, *k, *l));
        }
        let again = replay(&m, &log).unwrap();
        assert_eq!(again.f, n.f);
    }

    #[test]
    fn linearize_pure_rotation() {
        let prec = 256;
        let mode = ScalarMode::Float { prec };
        let alpha: f64 = 2.0 * std::f64::consts::PI / 5.0;
        let (c, s) = (alpha.cos(), alpha.sin());
        let mut x = FormalSeries::zero(mode, 4, 0);
        x.add_term(1, 0, 0, Scalar::from_f64_pair(c, 0.0, prec));
        x.add_term(0, 1, 0, Scalar::from_f64_pair(-s, 0.0, prec));
        let mut y = FormalSeries::zero(mode, 4, 0);
        y.add_term(1, 0, 0, Scalar::from_f64_pair(s, 0.0, prec));
        y.add_term(0, 1, 0, Scalar::from_f64_pair(c, 0.0, prec));
        let lin = linearize_elliptic(&PlanarJet { x, y }, 12).unwrap();
        assert!((lin.alpha - alpha).abs() < 1e-14);
        let mu = lin.jet.mu.clone();
        assert!((mu.re_f64() - c).abs() < 1e-15 && (mu.im_f64() - s).abs() < 1e-15);
        assert_eq!(lin.resonance, Some((5, 1)));
        // f is exactly mu z
        assert_eq!(lin.jet.f.len(), 1);
    }

    #[test]
    fn linearize_general_elliptic() {
        let prec = 256;
        let mode = ScalarMode::Float { prec };
        // M = S R_alpha S^-1 with S = [[2, 1], [0, 1/2]] (det 1)
        let alpha: f64 = 1.1;
        let (c, s) = (alpha.cos(), alpha.sin());
        let (s00, s01, s10, s11) = (2.0, 1.0, 0.0, 0.5);
        let (t00, t01, t10, t11) = (0.5, -1.0, 0.0, 2.0); // S^-1
        let r = [[c, -s], [s, c]];
        let sr = [
            [s00 * r[0][0] + s01 * r[1][0], s00 * r[0][1] + s01 * r[1][1]],
            [s10 * r[0][0] + s11 * r[1][0], s10 * r[0][1] + s11 * r[1][1]],
        ];
        let m = [
            [sr[0][0] * t00 + sr[0][1] * t10, sr[0][0] * t01 + sr[0][1] * t11],
            [sr[1][0] * t00 + sr[1][1] * t10, sr[1][0] * t01 + sr[1][1] * t11],
        ];
        let mut x = FormalSeries::zero(mode, 3, 0);
        x.add_term(1, 0, 0, Scalar::from_f64_pair(m[0][0], 0.0, prec));
        x.add_term(0, 1, 0, Scalar::from_f64_pair(m[0][1], 0.0, prec));
        let mut y = FormalSeries::zero(mode, 3, 0);
        y.add_term(1, 0, 0, Scalar::from_f64_pair(m[1][0], 0.0, prec));
        y.add_term(0, 1, 0, Scalar::from_f64_pair(m[1][1], 0.0, prec));
        let lin = linearize_elliptic(&PlanarJet { x, y }, 12).unwrap();
        let mu = lin.jet.mu.clone();
        assert!((mu.re_f64() - c).abs() < 1e-12, "re {} vs {}", mu.re_f64(), c);
        assert!((mu.im_f64() - s).abs() < 1e-12);
        // off-linear residue bounded by the f64 rounding of the input
        // matrix (its determinant is 1 only to ~1e-16)
        for ((k, l, _), c) in lin.jet.f.iter() {
            if (*k, *l) != (1, 0) {
                assert!(c.abs_f64() < 1e-12, "stray term z^{k} zbar^{l}");
            }
        }
        assert_eq!(lin.resonance, None);
    }

    #[test]
    fn resonant_term_survives() {
        let mode = ScalarMode::Exact;
        let ctx = ResonanceContext::new(4, 1, 5);
        let mu = ctx.mu(mode).unwrap();
        // chi = z^2 zbar^2 gives a purely resonant perturbation
        let chi = FormalSeries::monomial(Scalar::from_i64(1, mode), 2, 2, 0, TRUNC_NONE, TRUNC_NONE);
        let z = FormalSeries::monomial(Scalar::one(mode), 1, 0, 0, 5, 0);
        let f = lie_exp(&chi, &z).unwrap().scale(&mu);
        let m = MapJet::new(f).unwrap();
        let (n, log) = birkhoff_normalize(&m, &ctx).unwrap();
        assert!(log.is_empty());
        assert_eq!(n.f, m.f);
    }
}
