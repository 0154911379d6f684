//! Sparse truncated formal power series in z, zbar and an optional
//! parameter eps, with the symmetry and grading predicates used by the
//! normal-form pipeline.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{NfError, Result};
use crate::scalar::{Scalar, ScalarMode};

/// Truncation cap meaning "exact polynomial, no unknown tail".
pub const TRUNC_NONE: u32 = u32::MAX;

/// Exponent triple: powers of z, zbar, eps.
pub type Exp = (u32, u32, u32);

#[derive(Debug, Clone)]
pub struct FormalSeries {
    mode: ScalarMode,
    trunc_total: u32,
    trunc_eps: u32,
    coeffs: BTreeMap<Exp, Scalar>,
}

/// Equality is coefficientwise; truncation bounds are metadata.
impl PartialEq for FormalSeries {
    fn eq(&self, other: &Self) -> bool {
        self.mode == other.mode && self.coeffs == other.coeffs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grading {
    /// 2|k-l|/n + min(k,l), triangular grading for n >= 5.
    Delta,
    /// (k+l)/2, used for n = 4.
    HalfTotal,
    /// k+l, used for n = 3.
    Total,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResonanceContext {
    pub n: u32,
    pub q: u32,
    pub trunc_total: u32,
}

impl ResonanceContext {
    pub fn new(n: u32, q: u32, trunc_total: u32) -> Self {
        assert!(n >= 3);
        assert!(num_integer::gcd(n, q) == 1, "q must be coprime to n");
        ResonanceContext { n, q, trunc_total }
    }

    pub fn alpha(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.q as f64 / self.n as f64
    }

    pub fn grading(&self) -> Grading {
        match self.n {
            3 => Grading::Total,
            4 => Grading::HalfTotal,
            _ => Grading::Delta,
        }
    }

    /// The multiplier exp(2 pi i q / n). Exact mode covers the cases
    /// where the root of unity is rational (n = 4, plus the trivial
    /// n-th powers that reduce to them).
    pub fn mu(&self, mode: ScalarMode) -> Result<Scalar> {
        match mode {
            ScalarMode::Float { prec } => Ok(Scalar::root_of_unity(self.n, self.q, prec)),
            ScalarMode::Exact => {
                let r = self.q % self.n;
                match (self.n, r) {
                    (4, 1) => Ok(Scalar::i(mode)),
                    (4, 3) => Ok(Scalar::i(mode).conj()),
                    _ => Err(NfError::ExactModeUnsupported(format!(
                        "exact root of unity of order {}",
                        self.n
                    ))),
                }
            }
        }
    }
}

impl FormalSeries {
    pub fn zero(mode: ScalarMode, trunc_total: u32, trunc_eps: u32) -> Self {
        FormalSeries { mode, trunc_total, trunc_eps, coeffs: BTreeMap::new() }
    }

    pub fn monomial(c: Scalar, k: u32, l: u32, j: u32, trunc_total: u32, trunc_eps: u32) -> Self {
        let mut s = FormalSeries::zero(c.mode(), trunc_total, trunc_eps);
        s.add_term(k, l, j, c);
        s
    }

    /// The coordinate z as an exactly-known polynomial.
    pub fn var_z(mode: ScalarMode) -> Self {
        FormalSeries::monomial(Scalar::one(mode), 1, 0, 0, TRUNC_NONE, TRUNC_NONE)
    }

    pub fn mode(&self) -> ScalarMode {
        self.mode
    }

    pub fn trunc_total(&self) -> u32 {
        self.trunc_total
    }

    pub fn trunc_eps(&self) -> u32 {
        self.trunc_eps
    }

    pub fn with_trunc(&self, trunc_total: u32, trunc_eps: u32) -> Self {
        let mut out = FormalSeries::zero(self.mode, trunc_total, trunc_eps);
        for ((k, l, j), c) in &self.coeffs {
            out.add_term(*k, *l, *j, c.clone());
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Exp, &Scalar)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, k: u32, l: u32, j: u32) -> Scalar {
        self.coeffs.get(&(k, l, j)).cloned().unwrap_or_else(|| Scalar::zero(self.mode))
    }

    /// Adds c to the (k, l, j) coefficient, dropping exponents past the
    /// truncation bounds and erasing resulting zeros.
    pub fn add_term(&mut self, k: u32, l: u32, j: u32, c: Scalar) {
        if c.is_zero() {
            return;
        }
        if self.trunc_total != TRUNC_NONE && k + l > self.trunc_total {
            return;
        }
        if self.trunc_eps != TRUNC_NONE && j > self.trunc_eps {
            return;
        }
        let entry = self.coeffs.entry((k, l, j));
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check_mode(&self, other: &FormalSeries) -> Result<()> {
        self.mode.check_compatible(&other.mode)
    }

    fn combined_trunc(&self, other: &FormalSeries) -> (u32, u32) {
        (self.trunc_total.min(other.trunc_total), self.trunc_eps.min(other.trunc_eps))
    }

    pub fn add(&self, other: &FormalSeries) -> Result<FormalSeries> {
        self.check_mode(other)?;
        let (tt, te) = self.combined_trunc(other);
        let mut out = FormalSeries::zero(self.mode, tt, te);
        for ((k, l, j), c) in self.coeffs.iter().chain(other.coeffs.iter()) {
            out.add_term(*k, *l, *j, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &FormalSeries) -> Result<FormalSeries> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> FormalSeries {
        let mut out = FormalSeries::zero(self.mode, self.trunc_total, self.trunc_eps);
        for ((k, l, j), c) in &self.coeffs {
            out.add_term(*k, *l, *j, c.neg());
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> FormalSeries {
        assert!(self.mode == c.mode() || self.is_zero(), "scalar mode mismatch");
        let mut out = FormalSeries::zero(self.mode, self.trunc_total, self.trunc_eps);
        for ((k, l, j), v) in &self.coeffs {
            out.add_term(*k, *l, *j, v.mul(c));
        }
        out
    }

    pub fn scale_i64(&self, v: i64) -> FormalSeries {
        self.scale(&Scalar::from_i64(v, self.mode))
    }

    /// Multiplication by the purely imaginary unit.
    pub fn mul_i(&self) -> FormalSeries {
        let mut out = FormalSeries::zero(self.mode, self.trunc_total, self.trunc_eps);
        for ((k, l, j), v) in &self.coeffs {
            out.add_term(*k, *l, *j, v.mul_i());
        }
        out
    }

    pub fn mul(&self, other: &FormalSeries) -> Result<FormalSeries> {
        self.check_mode(other)?;
        let (tt, te) = self.combined_trunc(other);
        let mut out = FormalSeries::zero(self.mode, tt, te);
        for ((k1, l1, j1), c1) in &self.coeffs {
            for ((k2, l2, j2), c2) in &other.coeffs {
                out.add_term(k1 + k2, l1 + l2, j1 + j2, c1.mul(c2));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<FormalSeries> {
        let mut acc = FormalSeries::monomial(
            Scalar::one(self.mode),
            0,
            0,
            0,
            self.trunc_total,
            self.trunc_eps,
        );
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    pub fn diff_z(&self) -> FormalSeries {
        let mut out = FormalSeries::zero(self.mode, self.trunc_total, self.trunc_eps);
        for ((k, l, j), c) in &self.coeffs {
            if *k > 0 {
                out.add_term(k - 1, *l, *j, c.scale_i64(*k as i64));
            }
        }
        out
    }

    pub fn diff_zbar(&self) -> FormalSeries {
        let mut out = FormalSeries::zero(self.mode, self.trunc_total, self.trunc_eps);
        for ((k, l, j), c) in &self.coeffs {
            if *l > 0 {
                out.add_term(*k, l - 1, *j, c.scale_i64(*l as i64));
            }
        }
        out
    }

    /// fbar with fbar_{klj} = f*_{lkj}.
    pub fn real_symmetry_conjugate(&self) -> FormalSeries {
        let mut out = FormalSeries::zero(self.mode, self.trunc_total, self.trunc_eps);
        for ((k, l, j), c) in &self.coeffs {
            out.add_term(*l, *k, *j, c.conj());
        }
        out
    }

    /// h_{klj} = h*_{lkj} for all stored exponents, within tol per
    /// coefficient (tol 0 in exact mode).
    pub fn is_real_valued(&self, tol: f64) -> bool {
        for ((k, l, j), c) in &self.coeffs {
            if k > l {
                continue;
            }
            let partner = self.coeff(*l, *k, *j).conj();
            if c.sub(&partner).abs_f64() > tol {
                return false;
            }
        }
        // exponents stored only on the k > l side still need a partner
        for ((k, l, j), c) in &self.coeffs {
            if k <= l {
                continue;
            }
            let partner = self.coeff(*l, *k, *j).conj();
            if c.sub(&partner).abs_f64() > tol {
                return false;
            }
        }
        true
    }

    pub fn assert_real_valued(&self, tol: f64) -> Result<()> {
        if self.is_real_valued(tol) {
            return Ok(());
        }
        for ((k, l, j), c) in &self.coeffs {
            let partner = self.coeff(*l, *k, *j).conj();
            if c.sub(&partner).abs_f64() > tol {
                return Err(NfError::NotRealValued { k: *k, l: *l, j: *j });
            }
        }
        unreachable!()
    }

    pub fn is_resonant(&self, n: u32) -> bool {
        self.coeffs.keys().all(|(k, l, _)| k.abs_diff(*l) % n == 0)
    }

    pub fn assert_resonant(&self, n: u32) -> Result<()> {
        for (k, l, _) in self.coeffs.keys() {
            if k.abs_diff(*l) % n != 0 {
                return Err(NfError::NotResonant { n, k: *k, l: *l });
            }
        }
        Ok(())
    }

    /// Retains the terms with k = l (mod n); eps exponents pass through.
    pub fn resonant_projection(&self, ctx: &ResonanceContext) -> FormalSeries {
        let mut out = FormalSeries::zero(self.mode, self.trunc_total, self.trunc_eps);
        for ((k, l, j), c) in &self.coeffs {
            if k.abs_diff(*l) % ctx.n == 0 {
                out.add_term(*k, *l, *j, c.clone());
            }
        }
        out
    }

    /// Terms of grade m in z, zbar under the selected grading; eps
    /// exponents pass through unchanged.
    pub fn grade_slice(&self, m: u32, ctx: &ResonanceContext, grading: Grading) -> FormalSeries {
        let mut out = FormalSeries::zero(self.mode, self.trunc_total, self.trunc_eps);
        for ((k, l, j), c) in &self.coeffs {
            let keep = match grading {
                Grading::Delta => delta_order_int(*k, *l, ctx.n) == Some(m as i64),
                Grading::HalfTotal => (k + l) % 2 == 0 && (k + l) / 2 == m,
                Grading::Total => k + l == m,
            };
            if keep {
                out.add_term(*k, *l, *j, c.clone());
            }
        }
        out
    }

    /// Terms of joint degree k+l+j equal to m.
    pub fn joint_slice(&self, m: u32) -> FormalSeries {
        let mut out = FormalSeries::zero(self.mode, self.trunc_total, self.trunc_eps);
        for ((k, l, j), c) in &self.coeffs {
            if k + l + j == m {
                out.add_term(*k, *l, *j, c.clone());
            }
        }
        out
    }

    /// Drops all terms of joint degree k+l+j above m.
    pub fn truncate_joint(&self, m: u32) -> FormalSeries {
        let mut out = FormalSeries::zero(self.mode, self.trunc_total, self.trunc_eps);
        for ((k, l, j), c) in &self.coeffs {
            if k + l + j <= m {
                out.add_term(*k, *l, *j, c.clone());
            }
        }
        out
    }

    /// Coefficient block of eps^j, as a series in z, zbar only.
    pub fn eps_slice(&self, j: u32) -> FormalSeries {
        let mut out = FormalSeries::zero(self.mode, self.trunc_total, 0);
        for ((k, l, jj), c) in &self.coeffs {
            if *jj == j {
                out.add_term(*k, *l, 0, c.clone());
            }
        }
        out
    }

    /// Shifts every term by eps^j.
    pub fn mul_eps_pow(&self, j: u32, trunc_eps: u32) -> FormalSeries {
        let mut out = FormalSeries::zero(self.mode, self.trunc_total, trunc_eps);
        for ((k, l, jj), c) in &self.coeffs {
            out.add_term(*k, *l, jj + j, c.clone());
        }
        out
    }

    /// Drops all terms of total z, zbar degree above t and lowers the cap.
    pub fn truncate_total(&self, t: u32) -> FormalSeries {
        let mut out = FormalSeries::zero(self.mode, t.min(self.trunc_total), self.trunc_eps);
        for ((k, l, j), c) in &self.coeffs {
            out.add_term(*k, *l, *j, c.clone());
        }
        out
    }

    /// Lowest total degree k+l over stored terms, or None if zero.
    pub fn min_total_order(&self) -> Option<u32> {
        self.coeffs.keys().map(|(k, l, _)| k + l).min()
    }

    /// Lowest joint degree k+l+j over stored terms, or None if zero.
    pub fn min_joint_order(&self) -> Option<u32> {
        self.coeffs.keys().map(|(k, l, j)| k + l + j).min()
    }

    pub fn max_total_order(&self) -> Option<u32> {
        self.coeffs.keys().map(|(k, l, _)| k + l).max()
    }

    pub fn max_abs_f64(&self) -> f64 {
        self.coeffs.values().map(|c| c.abs_f64()).fold(0.0, f64::max)
    }

    /// Max coefficient distance; modes must match.
    pub fn distance(&self, other: &FormalSeries) -> Result<f64> {
        Ok(self.sub(other)?.max_abs_f64())
    }

    /// Applies z -> w z, zbar -> w* zbar for a unit scalar w.
    pub fn rotate(&self, w: &Scalar) -> FormalSeries {
        let wc = w.conj();
        let mut out = FormalSeries::zero(self.mode, self.trunc_total, self.trunc_eps);
        for ((k, l, j), c) in &self.coeffs {
            let factor = w.pow(*k).mul(&wc.pow(*l));
            out.add_term(*k, *l, *j, c.mul(&factor));
        }
        out
    }

    /// Human-readable rendering for diagnostics.
    pub fn render(&self) -> String {
        if self.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for ((k, l, j), c) in &self.coeffs {
            let mut t = format!("({:.6e}{:+.6e}i)", c.re_f64(), c.im_f64());
            if *k > 0 {
                t += &format!(" z^{k}");
            }
            if *l > 0 {
                t += &format!(" zb^{l}");
            }
            if *j > 0 {
                t += &format!(" e^{j}");
            }
            parts.push(t);
        }
        parts.join(" + ")
    }
}

/// 2|k-l|/n + min(k, l) as an exact rational.
pub fn delta_order(k: u32, l: u32, n: u32) -> BigRational {
    let diff = k.abs_diff(l) as i64;
    let m = k.min(l) as i64;
    BigRational::new(BigInt::from(2 * diff), BigInt::from(n as i64))
        + BigRational::from_integer(BigInt::from(m))
}

/// Equivalent closed form (k+l)/2 - (n-4)|k-l|/(2n).
pub fn delta_order_alt(k: u32, l: u32, n: u32) -> BigRational {
    let sum = BigRational::new(BigInt::from((k + l) as i64), BigInt::from(2));
    let diff = BigRational::new(
        BigInt::from((n as i64 - 4) * k.abs_diff(l) as i64),
        BigInt::from(2 * n as i64),
    );
    sum - diff
}

/// Integer delta-order of a resonant exponent; None if non-resonant.
pub fn delta_order_int(k: u32, l: u32, n: u32) -> Option<i64> {
    if k.abs_diff(l) % n != 0 {
        return None;
    }
    let d = delta_order(k, l, n);
    debug_assert!(d.denom() == &BigInt::from(1), "delta-order must be integral on resonant terms");
    Some(d.numer().to_string().parse().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Zero};

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
    fn add_cancels_and_merges() {
        let z = mono(1, 0, 1, 0);
        assert!(z.add(&z.neg()).unwrap().is_zero());
        let s = mono(1, 0, 2, 0).add(&mono(1, 0, 0, 2)).unwrap();
        assert_eq!(s.len(), 2);
        let d = mono(1, 0, 2, 2).add(&mono(1, 0, 2, 2)).unwrap();
        assert_eq!(d.coeff(2, 2, 0), Scalar::from_i64(2, ScalarMode::Exact));
    }

    #[test]
    fn mul_truncates() {
        let z = mono(1, 0, 1, 0);
        let zb = mono(1, 0, 0, 1);
        let p = z.mul(&zb).unwrap();
        assert_eq!(p.coeff(1, 1, 0), Scalar::one(ScalarMode::Exact));
        let b = z.add(&zb).unwrap().pow(2).unwrap();
        assert_eq!(b.coeff(1, 1, 0), Scalar::from_i64(2, ScalarMode::Exact));
        assert_eq!(b.coeff(2, 0, 0), Scalar::one(ScalarMode::Exact));
        let z3 = mono(1, 0, 3, 0).with_trunc(5, 0);
        let zb3 = mono(1, 0, 0, 3).with_trunc(5, 0);
        assert!(z3.mul(&zb3).unwrap().is_zero());
    }

    #[test]
    fn real_valuedness() {
        assert!(mono(1, 0, 2, 2).is_real_valued(0.0));
        assert!(!mono(0, 1, 3, 0).is_real_valued(0.0));
        let h = mono(0, 1, 0, 3)
            .scale(&Scalar::from_rational_pair(
                BigRational::new(BigInt::from(1), BigInt::from(6)),
                BigRational::zero(),
                ScalarMode::Exact,
            ))
            .add(&mono(0, -1, 3, 0).scale(&Scalar::from_rational_pair(
                BigRational::new(BigInt::from(1), BigInt::from(6)),
                BigRational::zero(),
                ScalarMode::Exact,
            )))
            .unwrap();
        assert!(h.is_real_valued(0.0));
    }

    #[test]
    fn conjugate_is_involution() {
        let f = mono(2, 3, 2, 1).add(&mono(0, 1, 0, 2)).unwrap();
        assert_eq!(f.real_symmetry_conjugate().real_symmetry_conjugate(), f);
        let c = mono(5, 7, 2, 1).real_symmetry_conjugate();
        assert_eq!(c.coeff(1, 2, 0), Scalar::from_i64_pair(5, -7, ScalarMode::Exact));
    }

    #[test]
    fn resonant_projection_filters() {
        let ctx = ResonanceContext::new(5, 1, 10);
        let s = mono(1, 0, 2, 2).add(&mono(1, 0, 3, 0)).unwrap();
        let p = s.resonant_projection(&ctx);
        assert_eq!(p, mono(1, 0, 2, 2));
        let ctx4 = ResonanceContext::new(4, 1, 10);
        let s4 = mono(1, 0, 4, 0).add(&mono(1, 0, 0, 4)).unwrap().add(&mono(1, 0, 1, 3)).unwrap();
        let p4 = s4.resonant_projection(&ctx4);
        assert_eq!(p4.len(), 2);
        assert!(p4.coeff(1, 3, 0).is_zero());
    }

    #[test]
    fn delta_order_closed_forms_agree() {
        for n in [3u32, 4, 5, 6, 7] {
            for k in 0..=28u32 {
                for l in 0..=28u32 {
                    if k.abs_diff(l) % n != 0 {
                        continue;
                    }
                    let a = delta_order(k, l, n);
                    let b = delta_order_alt(k, l, n);
                    assert_eq!(a, b, "n={n} k={k} l={l}");
                    assert!(a.denom().is_one());
                }
            }
        }
        assert_eq!(delta_order_int(2, 2, 7), Some(2));
        assert_eq!(delta_order_int(5, 0, 5), Some(2));
        assert_eq!(delta_order_int(4, 1, 5), None);
        // Q_{m,j} has delta-order m
        for n in [5u32, 6, 7] {
            for m in 2..=9u32 {
                for j in 0..=(m / 2) {
                    let k = m + n * j - 2 * j;
                    let l = m - 2 * j;
                    assert_eq!(delta_order_int(k, l, n), Some(m as i64));
                }
            }
        }
    }

    #[test]
    fn grade_slice_per_regime() {
        let ctx6 = ResonanceContext::new(6, 1, 12);
        let h =
            mono(1, 0, 6, 0).add(&mono(1, 0, 2, 2)).unwrap().add(&mono(1, 0, 3, 3)).unwrap();
        let g2 = h.grade_slice(2, &ctx6, Grading::Delta);
        assert_eq!(g2.len(), 2);
        assert!(g2.coeff(3, 3, 0).is_zero());

        let ctx4 = ResonanceContext::new(4, 1, 12);
        let h4 = mono(1, 0, 4, 0).add(&mono(1, 0, 2, 4)).unwrap();
        let g = h4.grade_slice(2, &ctx4, Grading::HalfTotal);
        assert_eq!(g, mono(1, 0, 4, 0));

        let ctx3 = ResonanceContext::new(3, 1, 12);
        let h3 = mono(1, 0, 3, 0).add(&mono(1, 0, 2, 2)).unwrap();
        let g3 = h3.grade_slice(3, &ctx3, Grading::Total);
        assert_eq!(g3, mono(1, 0, 3, 0));
    }

    #[test]
    fn rotation_scales_exponents() {
        let w = Scalar::i(ScalarMode::Exact);
        let s = mono(1, 0, 4, 0).rotate(&w);
        // i^4 = 1
        assert_eq!(s, mono(1, 0, 4, 0));
        let s2 = mono(1, 0, 2, 1).rotate(&w);
        // i^2 * (-i)^1 = -1 * -i = i
        assert_eq!(s2.coeff(2, 1, 0), Scalar::from_i64_pair(0, 1, ScalarMode::Exact));
    }
}
