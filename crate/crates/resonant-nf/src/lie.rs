//! Symplectic calculus in complex coordinates: Poisson bracket,
//! divergence, Lie derivatives and their exponentials, time-one maps
//! and the area-preservation identity.
//!
//! The conventions are fixed here once. The bracket is
//! {a,b} = a_z b_zbar - a_zbar b_z and the Lie derivative generated by
//! chi is L_chi g = -2i {g, chi}; every other module goes through these
//! two functions, so the -2i factor lives in exactly one place.

use crate::error::{NfError, Result};
use crate::scalar::{Scalar, ScalarMode};
use crate::series::{FormalSeries, TRUNC_NONE};

/// {a, b} = da/dz db/dzbar - da/dzbar db/dz; eps is a passive parameter.
pub fn poisson_bracket(a: &FormalSeries, b: &FormalSeries) -> Result<FormalSeries> {
    let t1 = a.diff_z().mul(&b.diff_zbar())?;
    let t2 = a.diff_zbar().mul(&b.diff_z())?;
    t1.sub(&t2)
}

/// div g = dg/dz + d(gbar)/dzbar, with gbar formed by real symmetry.
pub fn divergence(g: &FormalSeries) -> FormalSeries {
    let gbar = g.real_symmetry_conjugate();
    g.diff_z().add(&gbar.diff_zbar()).expect("same mode")
}

fn check_generator(chi: &FormalSeries) -> Result<()> {
    if let Some(p) = chi.min_joint_order() {
        if p < 3 {
            return Err(NfError::GeneratorOrderTooLow(p));
        }
    }
    Ok(())
}

/// L_chi g = -2i {g, chi}.
pub fn lie_derivative(chi: &FormalSeries, g: &FormalSeries) -> Result<FormalSeries> {
    check_generator(chi)?;
    let br = poisson_bracket(g, chi)?;
    Ok(br.mul_i().scale_i64(-2))
}

/// exp(L_chi) g = g + sum_k L_chi^k g / k!. Terminates because each
/// application of L_chi raises the minimal joint order by at least one
/// and g carries finite truncation bounds.
pub fn lie_exp(chi: &FormalSeries, g: &FormalSeries) -> Result<FormalSeries> {
    check_generator(chi)?;
    if !chi.is_zero()
        && (g.trunc_total() == TRUNC_NONE
            || (g.trunc_eps() == TRUNC_NONE && chi.iter().any(|((_, _, j), _)| *j > 0)))
    {
        return Err(NfError::InvalidInput(
            "lie_exp needs finite truncation bounds on its argument".into(),
        ));
    }
    let mut acc = g.clone();
    let mut term = g.clone();
    let mut k: i64 = 0;
    while !term.is_zero() {
        k += 1;
        term = lie_derivative(chi, &term)?;
        term = term.scale(&Scalar::from_i64(1, term.mode()).div(&Scalar::from_i64(k, term.mode())));
        acc = acc.add(&term)?;
        assert!(k < 10_000, "lie_exp failed to terminate");
    }
    Ok(acc)
}

/// Jet of an area-preserving map: the z-component f; the zbar-component
/// is its real-symmetry conjugate. mu is the coefficient of z.
#[derive(Debug, Clone, PartialEq)]
pub struct MapJet {
    pub f: FormalSeries,
    pub mu: Scalar,
}

impl MapJet {
    pub fn new(f: FormalSeries) -> Result<MapJet> {
        if !f.coeff(0, 0, 0).is_zero() {
            return Err(NfError::InvalidInput("map jet must fix the origin".into()));
        }
        let mu = f.coeff(1, 0, 0);
        Ok(MapJet { f, mu })
    }

    pub fn identity(mode: ScalarMode, trunc_total: u32, trunc_eps: u32) -> MapJet {
        let f = FormalSeries::monomial(Scalar::one(mode), 1, 0, 0, trunc_total, trunc_eps);
        MapJet { mu: Scalar::one(mode), f }
    }

    /// The rotation z -> mu z.
    pub fn rotation(mu: Scalar, trunc_total: u32, trunc_eps: u32) -> MapJet {
        let f = FormalSeries::monomial(mu.clone(), 1, 0, 0, trunc_total, trunc_eps);
        MapJet { mu, f }
    }

    pub fn mode(&self) -> ScalarMode {
        self.f.mode()
    }

    pub fn is_tangent_to_identity(&self) -> bool {
        self.mu.sub(&Scalar::one(self.mode())).is_zero()
    }

    /// f - z, the nonlinear-plus-rotation displacement.
    pub fn displacement(&self) -> FormalSeries {
        let z = FormalSeries::monomial(
            Scalar::one(self.mode()),
            1,
            0,
            0,
            self.f.trunc_total(),
            self.f.trunc_eps(),
        );
        self.f.sub(&z).expect("same mode")
    }
}

/// div g - {gbar, g} for g = f - z; identically zero iff the jet is
/// area-preserving. The residual is truncated to the orders it is
/// correct at (one below the jet's truncation).
pub fn check_area_preserving(m: &MapJet) -> Result<FormalSeries> {
    let g = m.displacement();
    let gbar = g.real_symmetry_conjugate();
    let residual = divergence(&g).sub(&poisson_bracket(&gbar, &g)?)?;
    let t = m.f.trunc_total();
    Ok(if t == TRUNC_NONE { residual } else { residual.truncate_total(t.saturating_sub(1)) })
}

/// Asserts the area-preservation residual vanishes to tolerance.
pub fn assert_area_preserving(m: &MapJet, tol: f64) -> Result<()> {
    let r = check_area_preserving(m)?;
    let max_abs = r.max_abs_f64();
    if max_abs > tol {
        let order = r.min_total_order().unwrap_or(0);
        return Err(NfError::NotAreaPreserving { order, max_abs });
    }
    Ok(())
}

/// The time-one map of a real-valued generator: f = exp(L_chi) z.
pub fn time_one_map(chi: &FormalSeries, trunc_total: u32, trunc_eps: u32) -> Result<MapJet> {
    chi.assert_real_valued(chi.mode().default_tol())?;
    let z = FormalSeries::monomial(Scalar::one(chi.mode()), 1, 0, 0, trunc_total, trunc_eps);
    let f = lie_exp(chi, &z)?;
    MapJet::new(f)
}

/// Substitutes z -> z_to, zbar -> zbar_to into a; eps passes through.
pub fn subst(
    a: &FormalSeries,
    z_to: &FormalSeries,
    zbar_to: &FormalSeries,
) -> Result<FormalSeries> {
    let tt = a.trunc_total().min(z_to.trunc_total()).min(zbar_to.trunc_total());
    let te = a.trunc_eps().min(z_to.trunc_eps()).min(zbar_to.trunc_eps());
    let mode = a.mode();
    let one = FormalSeries::monomial(Scalar::one(mode), 0, 0, 0, tt, te);
    let kmax = a.iter().map(|((k, _, _), _)| *k).max().unwrap_or(0) as usize;
    let lmax = a.iter().map(|((_, l, _), _)| *l).max().unwrap_or(0) as usize;
    let mut zp = Vec::with_capacity(kmax + 1);
    zp.push(one.clone());
    for i in 1..=kmax {
        let next = zp[i - 1].mul(z_to)?;
        zp.push(next);
    }
    let mut zbp = Vec::with_capacity(lmax + 1);
    zbp.push(one);
    for i in 1..=lmax {
        let next = zbp[i - 1].mul(zbar_to)?;
        zbp.push(next);
    }
    let mut out = FormalSeries::zero(mode, tt, te);
    for ((k, l, j), c) in a.iter() {
        let prod = zp[*k as usize].mul(&zbp[*l as usize])?;
        for ((pk, pl, pj), pc) in prod.iter() {
            out.add_term(*pk, *pl, pj + *j, pc.mul(c));
        }
    }
    Ok(out)
}

/// Jet of a after b (substitution of b into a).
pub fn compose(a: &MapJet, b: &MapJet) -> Result<MapJet> {
    let fb_bar = b.f.real_symmetry_conjugate();
    let f = subst(&a.f, &b.f, &fb_bar)?;
    MapJet::new(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::TRUNC_NONE;

    fn mono(re: i64, im: i64, k: u32, l: u32) -> FormalSeries {
        FormalSeries::monomial(
            Scalar::from_i64_pair(re, im, ScalarMode::Exact),
            k,
            l,
            0,
            TRUNC_NONE,
            TRUNC_NONE,
        )
    }

    #[test]
    fn bracket_on_monomials() {
        let z = mono(1, 0, 1, 0);
        let zb = mono(1, 0, 0, 1);
        assert_eq!(poisson_bracket(&z, &zb).unwrap(), mono(1, 0, 0, 0));
        let a = mono(1, 0, 2, 2);
        let b = mono(1, 0, 3, 0);
        // (k1 l2 - k2 l1) = (2*0 - 3*2) = -6 on z^4 zbar^1
        assert_eq!(poisson_bracket(&a, &b).unwrap(), mono(-6, 0, 4, 1));
        let h = mono(3, 1, 2, 1).add(&mono(0, 2, 1, 3)).unwrap();
        assert!(poisson_bracket(&h, &h).unwrap().is_zero());
    }

    #[test]
    fn divergence_cases() {
        assert!(divergence(&mono(1, 0, 0, 2)).is_zero());
        let d = divergence(&mono(1, 0, 2, 0));
        assert_eq!(d, mono(2, 0, 1, 0).add(&mono(2, 0, 0, 1)).unwrap());
        // Hamiltonian fields are divergence-free
        let h = mono(2, 0, 2, 2).add(&mono(0, 1, 3, 0)).unwrap().add(&mono(0, -1, 0, 3)).unwrap();
        assert!(h.is_real_valued(0.0));
        let g = h.diff_zbar().mul_i().scale_i64(-2);
        assert!(divergence(&g).is_zero());
    }

    #[test]
    fn lie_derivative_examples() {
        let chi = mono(1, 0, 2, 2);
        let z = mono(1, 0, 1, 0);
        let got = lie_derivative(&chi, &z).unwrap();
        assert_eq!(got, mono(0, -4, 2, 1));
        let c = mono(5, 0, 0, 0);
        assert!(lie_derivative(&chi, &c).unwrap().is_zero());
        let low = mono(1, 0, 1, 1);
        assert!(matches!(
            lie_derivative(&low, &z),
            Err(NfError::GeneratorOrderTooLow(2))
        ));
    }

    #[test]
    fn lie_exp_closed_form_flow() {
        // chi = z^2 zbar^2 generates z exp(-4 i z zbar)
        let chi = mono(1, 0, 2, 2);
        let z = mono(1, 0, 1, 0).with_trunc(5, 0);
        let f = lie_exp(&chi, &z).unwrap();
        assert_eq!(f.coeff(1, 0, 0), Scalar::one(ScalarMode::Exact));
        assert_eq!(f.coeff(2, 1, 0), Scalar::from_i64_pair(0, -4, ScalarMode::Exact));
        assert_eq!(f.coeff(3, 2, 0), Scalar::from_i64_pair(-8, 0, ScalarMode::Exact));
        // inverse flow undoes it
        let back = lie_exp(&chi.neg(), &f).unwrap();
        assert_eq!(back, z);
    }

    #[test]
    fn time_one_map_is_area_preserving() {
        let chi = mono(2, 0, 2, 2)
            .add(&mono(0, 3, 4, 1))
            .unwrap()
            .add(&mono(0, -3, 1, 4))
            .unwrap()
            .add(&mono(1, 0, 3, 3))
            .unwrap();
        assert!(chi.is_real_valued(0.0));
        let m = time_one_map(&chi, 9, 0).unwrap();
        let r = check_area_preserving(&m).unwrap();
        assert!(r.is_zero(), "residual {}", r.render());
    }

    #[test]
    fn area_preservation_detects_failure() {
        let f = mono(1, 0, 1, 0).add(&mono(1, 0, 2, 0)).unwrap().with_trunc(4, 0);
        let m = MapJet::new(f).unwrap();
        let r = check_area_preserving(&m).unwrap();
        assert_eq!(
            r.grade_slice(1, &crate::series::ResonanceContext::new(5, 1, 4), crate::series::Grading::Total),
            mono(2, 0, 1, 0).add(&mono(2, 0, 0, 1)).unwrap()
        );
        // order-2 jet z + zbar^2 is area-preserving to its truncation
        let f2 = mono(1, 0, 1, 0).add(&mono(1, 0, 0, 2)).unwrap().with_trunc(2, 0);
        let m2 = MapJet::new(f2).unwrap();
        assert!(check_area_preserving(&m2).unwrap().is_zero());
    }

    #[test]
    fn compose_basics() {
        let chi = mono(2, 0, 2, 2).add(&mono(1, 0, 3, 3)).unwrap();
        let m = time_one_map(&chi, 8, 0).unwrap();
        let id = MapJet::identity(ScalarMode::Exact, 8, 0);
        assert_eq!(compose(&m, &id).unwrap().f, m.f);
        let minv = time_one_map(&chi.neg(), 8, 0).unwrap();
        assert_eq!(compose(&m, &minv).unwrap().f, id.f);
        // rotations compose additively (exact mode, mu = i)
        let r1 = MapJet::rotation(Scalar::i(ScalarMode::Exact), 8, 0);
        let r2 = compose(&r1, &r1).unwrap();
        assert_eq!(r2.mu, Scalar::from_i64(-1, ScalarMode::Exact));
    }

    #[test]
    fn composition_matches_lie_exp() {
        // g compose Phi^1_chi = exp(L_chi) g
        let chi = mono(0, 1, 3, 0).add(&mono(0, -1, 0, 3)).unwrap();
        let m = time_one_map(&chi, 7, 0).unwrap();
        let g = mono(2, 0, 2, 1).add(&mono(0, 3, 1, 1)).unwrap().with_trunc(7, 0);
        let via_subst = subst(&g, &m.f, &m.f.real_symmetry_conjugate()).unwrap();
        let via_exp = lie_exp(&chi, &g).unwrap();
        assert_eq!(via_subst, via_exp);
    }

    #[test]
    fn jacobi_identity() {
        let a = mono(1, 2, 2, 1);
        let b = mono(0, 1, 1, 2).add(&mono(3, 0, 2, 0)).unwrap();
        let c = mono(1, 0, 0, 2);
        let j1 = poisson_bracket(&a, &poisson_bracket(&b, &c).unwrap()).unwrap();
        let j2 = poisson_bracket(&b, &poisson_bracket(&c, &a).unwrap()).unwrap();
        let j3 = poisson_bracket(&c, &poisson_bracket(&a, &b).unwrap()).unwrap();
        assert!(j1.add(&j2).unwrap().add(&j3).unwrap().is_zero());
    }
}
