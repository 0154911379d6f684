//! Seeded random generation of real-valued series, jets, and generic
//! Hamiltonians, used by the verification subcommands and the test
//! suites. All draws come from a counter-based generator so a seed
//! fully determines the output.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::lie::{compose, time_one_map, MapJet};
use crate::scalar::{Scalar, ScalarMode};
use crate::series::{FormalSeries, ResonanceContext, TRUNC_NONE};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small random nonzero scalar p/q + i r/q with |p|, |r| <= 4, q <= 3.
pub fn small_scalar(rng: &mut ChaCha8Rng, mode: ScalarMode, real_only: bool) -> Scalar {
    loop {
        let p = rng.gen_range(-4i64..=4);
        let r = if real_only { 0 } else { rng.gen_range(-4i64..=4) };
        let q = rng.gen_range(1i64..=3);
        let c = Scalar::from_i64_pair(p, r, mode).div(&Scalar::from_i64(q, mode));
        if !c.is_zero() {
            return c;
        }
    }
}

/// Random real-valued series with terms of total order in
/// [min_order, max_order]; exponents restricted to k = l (mod n) when
/// a resonance order is given. Term presence is an independent draw
/// per conjugate pair.
pub fn random_real_series(
    rng: &mut ChaCha8Rng,
    mode: ScalarMode,
    min_order: u32,
    max_order: u32,
    resonant: Option<u32>,
    density: f64,
) -> FormalSeries {
    let mut h = FormalSeries::zero(mode, TRUNC_NONE, TRUNC_NONE);
    for total in min_order..=max_order {
        for k in 0..=total {
            let l = total - k;
            if k < l {
                continue;
            }
            if let Some(n) = resonant {
                if (k - l) % n != 0 {
                    continue;
                }
            }
            if rng.gen_range(0.0..1.0) >= density {
                continue;
            }
            let c = small_scalar(rng, mode, k == l);
            h.add_term(k, l, 0, c.clone());
            if k != l {
                h.add_term(l, k, 0, c.conj());
            }
        }
    }
    h
}

/// Random area-preserving jet with the exact multiplier of ctx, built
/// as the rotation composed with the time-one flow of a random
/// real-valued generator (returned alongside).
pub fn random_jet(
    rng: &mut ChaCha8Rng,
    ctx: &ResonanceContext,
    mode: ScalarMode,
    trunc_total: u32,
) -> Result<(MapJet, FormalSeries)> {
    let mu = ctx.mu(mode)?;
    let n = ctx.n;
    let mut chi = random_real_series(rng, mode, 3, (trunc_total - 1).max(3), None, 0.6);
    // pin the slots that feed the genericity hypotheses downstream
    let b = Scalar::from_i64(rng.gen_range(1i64..=4), mode);
    chi.add_term(n, 0, 0, b.sub(&chi.coeff(n, 0, 0)));
    chi.add_term(0, n, 0, b.sub(&chi.coeff(0, n, 0)));
    let a = Scalar::from_i64(rng.gen_range(1i64..=4), mode);
    chi.add_term(2, 2, 0, a.sub(&chi.coeff(2, 2, 0)));
    let phi = time_one_map(&chi, trunc_total, 0)?;
    let m = compose(&MapJet::rotation(mu, trunc_total, 0), &phi)?;
    Ok((m, chi))
}

/// Random resonant real-valued Hamiltonian satisfying the genericity
/// hypotheses: b0 in 1..=4 (positive), a0 nonzero, plus random
/// resonant content of higher order.
pub fn random_generic_hamiltonian(
    rng: &mut ChaCha8Rng,
    ctx: &ResonanceContext,
    mode: ScalarMode,
    trunc_total: u32,
) -> FormalSeries {
    let n = ctx.n;
    let mut h = random_real_series(rng, mode, n.max(4) + 1, trunc_total, Some(n), 0.6);
    // pin the leading slots to generic values
    let b0 = Scalar::from_i64(rng.gen_range(1i64..=4), mode);
    let a0 = {
        let mut v = rng.gen_range(-4i64..=4);
        if v == 0 {
            v = 1;
        }
        Scalar::from_i64(v, mode)
    };
    let aslot = if n == 3 { 3 } else { 2 };
    h.add_term(aslot, aslot, 0, a0.sub(&h.coeff(aslot, aslot, 0)));
    h.add_term(n, 0, 0, b0.sub(&h.coeff(n, 0, 0)));
    h.add_term(0, n, 0, b0.sub(&h.coeff(0, n, 0)));
    h.with_trunc(trunc_total, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let mode = ScalarMode::Exact;
        let a = random_real_series(&mut rng_from_seed(7), mode, 3, 6, Some(5), 0.7);
        let b = random_real_series(&mut rng_from_seed(7), mode, 3, 6, Some(5), 0.7);
        let c = random_real_series(&mut rng_from_seed(8), mode, 3, 6, Some(5), 0.7);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.is_real_valued(0.0));
        assert!(a.is_resonant(5));
    }

    #[test]
    fn random_jet_is_area_preserving() {
        let mode = ScalarMode::Exact;
        let ctx = ResonanceContext::new(4, 1, 7);
        let (m, _) = random_jet(&mut rng_from_seed(3), &ctx, mode, 7).unwrap();
        crate::lie::assert_area_preserving(&m, 0.0).unwrap();
        assert_eq!(m.mu, Scalar::i(mode));
    }

    #[test]
    fn generic_hamiltonian_has_generic_leading() {
        let mode = ScalarMode::Exact;
        for n in [3u32, 4, 5] {
            let ctx = ResonanceContext::new(n, 1, 12);
            let h = random_generic_hamiltonian(&mut rng_from_seed(11), &ctx, mode, 12);
            assert!(h.is_real_valued(0.0));
            assert!(h.is_resonant(n));
            assert!(h.coeff(n, 0, 0).re_is_positive());
            let aslot = if n == 3 { 3 } else { 2 };
            assert!(!h.coeff(aslot, aslot, 0).is_zero());
        }
    }
}
