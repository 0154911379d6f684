//! Interpolation of a tangent-to-identity area-preserving jet by a
//! unique real-valued formal Hamiltonian: f = exp(L_h) z order by
//! order, with the divergence-free solve that inverts g = -2i dh/dzbar.

use std::collections::HashMap;

use crate::error::{NfError, Result};
use crate::lie::{assert_area_preserving, lie_derivative, MapJet};
use crate::scalar::Scalar;
use crate::series::{FormalSeries, TRUNC_NONE};

/// Solves g = -2i dh/dzbar for the unique real-valued h, given a
/// divergence-free g that is homogeneous in the joint degree k+l+j.
/// The coefficient formula is h_{k,l+1} = i g_{k,l} / (2(l+1)); the
/// zbar-free coefficients are fixed by h_{K,0} = h*_{0,K}.
pub fn hamiltonian_from_divfree(g: &FormalSeries, tol: f64) -> Result<FormalSeries> {
    let div = crate::lie::divergence(g);
    for ((k, l, j), c) in div.iter() {
        if c.abs_f64() > tol {
            return Err(NfError::NonzeroDivergence { k: *k, l: *l, j: *j });
        }
    }
    let mode = g.mode();
    let mut h = FormalSeries::zero(mode, TRUNC_NONE, TRUNC_NONE);
    for ((k, l, j), c) in g.iter() {
        let denom = Scalar::from_i64(2 * (*l as i64 + 1), mode);
        h.add_term(*k, l + 1, *j, c.mul_i().div(&denom));
    }
    let free: Vec<_> = h
        .iter()
        .filter(|((k, _, _), _)| *k == 0)
        .map(|((_, l, j), c)| (*l, *j, c.conj()))
        .collect();
    for (l, j, c) in free {
        h.add_term(l, 0, j, c);
    }
    h.assert_real_valued(tol)?;
    Ok(h)
}

/// The unique real-valued formal Hamiltonian h with f = exp(L_h) z to
/// the jet's truncation. Orders are measured in the joint degree
/// k+l+j, so the same induction serves parameter families.
pub fn interpolate(m: &MapJet) -> Result<FormalSeries> {
    let mode = m.mode();
    let tol = mode.default_tol();
    if m.mu.sub(&Scalar::one(mode)).abs_f64() > tol {
        return Err(NfError::MultiplierNotOne(format!(
            "{}+{}i",
            m.mu.re_f64(),
            m.mu.im_f64()
        )));
    }
    assert_area_preserving(m, tol)?;
    let t = m.f.trunc_total();
    if t == TRUNC_NONE {
        return Err(NfError::InvalidInput(
            "interpolation needs a finite truncation on the input jet".into(),
        ));
    }
    let te = m.f.trunc_eps();
    let g = m.displacement();
    let z = FormalSeries::monomial(Scalar::one(mode), 1, 0, 0, t, te);

    // gens[s] holds L_s's generator h_{s+2}; filled as the induction
    // proceeds. multi[(l, r)] caches the sums of all l-fold products
    // L_{s_1}...L_{s_l} z over compositions s_1+...+s_l = r.
    let mut gens: HashMap<u32, FormalSeries> = HashMap::new();
    let mut multi: HashMap<(u32, u32), FormalSeries> = HashMap::new();
    let mut h = FormalSeries::zero(mode, TRUNC_NONE, TRUNC_NONE);

    for step in 2..=t {
        let mut rhs = g.joint_slice(step);
        let mut inv_factorial = Scalar::one(mode);
        for l in 2..step {
            let r = step - 1;
            let mut v = FormalSeries::zero(mode, t, te);
            for s in 1..=(r - (l - 1)) {
                let prev = multi
                    .get(&(l - 1, r - s))
                    .expect("lower multi-bracket levels are filled first");
                if prev.is_zero() {
                    continue;
                }
                v = v.add(&lie_derivative(&gens[&s], prev)?)?;
            }
            multi.insert((l, r), v.clone());
            inv_factorial = inv_factorial.div(&Scalar::from_i64(l as i64, mode));
            rhs = rhs.sub(&v.scale(&inv_factorial))?;
        }
        let h_next = hamiltonian_from_divfree(&rhs, tol)?;
        let s = step - 1;
        let v1 = lie_derivative(&h_next, &z)?;
        multi.insert((1, s), v1);
        gens.insert(s, h_next.clone());
        h = h.add(&h_next)?;
    }
    h.assert_real_valued(tol)?;
    Ok(h.with_trunc(t + 1, if te == TRUNC_NONE { TRUNC_NONE } else { te }))
}

/// Time-one jet of the truncation of h to joint order m.
pub fn approximate_map(h: &FormalSeries, m: u32, trunc_total: u32, trunc_eps: u32) -> Result<MapJet> {
    let hm = h.truncate_joint(m).with_trunc(TRUNC_NONE, TRUNC_NONE);
    crate::lie::time_one_map(&hm, trunc_total, trunc_eps)
}
