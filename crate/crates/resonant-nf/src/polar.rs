//! Polar representation of normal-form Hamiltonians: with I = z zbar / 2
//! and z = sqrt(2I) exp(i phi), a series of the shape
//! P(z zbar) + (z^n + zbar^n) Q(z zbar) becomes Atilde(I) + Btilde(I) cos(n phi),
//! from which the invariant sequences and the twist coefficients are read off.

use std::collections::BTreeMap;

use crate::error::{NfError, Result};
use crate::scalar::Scalar;
use crate::series::{FormalSeries, ResonanceContext, TRUNC_NONE};

/// H(I, phi) = sum_s action[s] (2I)^s + sum_s 2 resonant[s] (2I)^((n+2s)/2) cos(n phi).
///
/// action[s] is the coefficient of (z zbar)^s, resonant[s] the (real)
/// coefficient of (z^n + zbar^n)(z zbar)^s.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarHamiltonian {
    pub n: u32,
    pub action: BTreeMap<u32, Scalar>,
    pub resonant: BTreeMap<u32, Scalar>,
}

impl PolarHamiltonian {
    /// Decomposes a real-valued resonant series of normal-form shape.
    pub fn from_series(h: &FormalSeries, ctx: &ResonanceContext) -> Result<PolarHamiltonian> {
        let tol = h.mode().default_tol();
        h.assert_real_valued(tol)?;
        let n = ctx.n;
        let mut action = BTreeMap::new();
        let mut resonant = BTreeMap::new();
        for ((k, l, j), c) in h.iter() {
            if *j != 0 {
                return Err(NfError::InvalidInput(
                    "polar form does not carry parameter terms".into(),
                ));
            }
            if k == l {
                action.insert(*k, c.re_part());
            } else if *k == l + n {
                if c.im_f64().abs() > tol.max(c.abs_f64() * 1e-30) {
                    return Err(NfError::InvalidInput(format!(
                        "resonant coefficient at z^{k} zbar^{l} is not real"
                    )));
                }
                resonant.insert(*l, c.re_part());
            } else if *l == k + n {
                // conjugate partner of a handled term
            } else {
                return Err(NfError::InvalidInput(format!(
                    "term z^{k} zbar^{l} is outside the normal-form shape"
                )));
            }
        }
        Ok(PolarHamiltonian { n, action, resonant })
    }

    /// Inverse of from_series.
    pub fn to_series(&self) -> FormalSeries {
        let mode = self
            .action
            .values()
            .chain(self.resonant.values())
            .next()
            .map(|c| c.mode())
            .unwrap_or(crate::scalar::ScalarMode::Exact);
        let mut h = FormalSeries::zero(mode, TRUNC_NONE, TRUNC_NONE);
        for (s, c) in &self.action {
            h.add_term(*s, *s, 0, c.clone());
        }
        for (s, c) in &self.resonant {
            h.add_term(s + self.n, *s, 0, c.clone());
            h.add_term(*s, s + self.n, 0, c.conj());
        }
        h
    }

    /// a_k of the unique normal form: coefficients of A with the
    /// grading prefactor of the single-map theorem, i.e. the action
    /// coefficient at z zbar power k+2 (k+3 for n = 3).
    pub fn a_seq(&self, len: usize) -> Vec<Scalar> {
        let offset = if self.n == 3 { 3 } else { 2 };
        self.seq(&self.action, offset, 1, len)
    }

    /// b_k: the resonant coefficient at z zbar power 2k for n >= 4
    /// (only even powers appear), k for n = 3.
    pub fn b_seq(&self, len: usize) -> Vec<Scalar> {
        if self.n == 3 {
            self.seq(&self.resonant, 0, 1, len)
        } else {
            self.seq(&self.resonant, 0, 2, len)
        }
    }

    fn seq(&self, map: &BTreeMap<u32, Scalar>, offset: u32, stride: u32, len: usize) -> Vec<Scalar> {
        let mode = map
            .values()
            .chain(self.action.values())
            .chain(self.resonant.values())
            .next()
            .map(|c| c.mode())
            .unwrap_or(crate::scalar::ScalarMode::Exact);
        (0..len)
            .map(|k| {
                map.get(&(offset + stride * k as u32))
                    .cloned()
                    .unwrap_or_else(|| Scalar::zero(mode))
            })
            .collect()
    }

    /// Rotation-number expansion of the map R_alpha o Phi_H:
    /// omega(I) - alpha = sum_k omega_k I^k. With the bracket
    /// orientation fixed in the Lie module, the time-one flow of
    /// H(I) = sum c_s (2I)^s advances the angle by -dH/dI, so
    /// omega_k = -(k+1) 2^(k+1) c_{k+1}.
    pub fn twist(&self, len: usize) -> Vec<Scalar> {
        let mode = self
            .action
            .values()
            .next()
            .map(|c| c.mode())
            .unwrap_or(crate::scalar::ScalarMode::Exact);
        (0..len)
            .map(|k| {
                let s = k as u32 + 1;
                let c = self.action.get(&s).cloned().unwrap_or_else(|| Scalar::zero(mode));
                c.scale_i64(-((s as i64) << s))
            })
            .collect()
    }

    /// Leading invariants (A(0), B(0)) in the grading of the theorem.
    pub fn leading(&self) -> (Scalar, Scalar) {
        let a = self.a_seq(1).pop().unwrap();
        let b = self.b_seq(1).pop().unwrap();
        (a, b)
    }

    /// Evaluates H at a sample point (I, phi) in f64, for cross checks.
    pub fn eval_f64(&self, i_val: f64, phi: f64) -> f64 {
        let mut total = 0.0;
        for (s, c) in &self.action {
            total += c.re_f64() * (2.0 * i_val).powi(*s as i32);
        }
        for (s, c) in &self.resonant {
            let pw = (self.n as f64 + 2.0 * *s as f64) / 2.0;
            total += 2.0 * c.re_f64() * (2.0 * i_val).powf(pw) * (self.n as f64 * phi).cos();
        }
        total
    }
}
