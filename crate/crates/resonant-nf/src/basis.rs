//! Indexed resonant monomial bases of the graded spaces the
//! normalization sweeps through, with the dimension formulas and the
//! packing between real-valued elements and real coordinate vectors.
//!
//! For order n >= 5 the grade is the delta-order and Q_{m,j} pairs
//! z^(m+(n-2)j) zbar^(m-2j) with its conjugate at -j. For n = 4 the
//! grade is half the total degree, Q_{m,j} = z^(m+2j) zbar^(m-2j).
//! For n = 3 the grade is the total degree and Q_{m,j} =
//! z^((m+3j)/2) zbar^((m-3j)/2) with j = m (mod 2).

use crate::error::{NfError, Result};
use crate::scalar::{Scalar, ScalarMode};
use crate::series::{delta_order_int, FormalSeries, Grading, TRUNC_NONE};

#[derive(Debug, Clone)]
pub struct GradeBasis {
    pub n: u32,
    pub m: u32,
    /// Basis indices in increasing order, negative j included.
    pub js: Vec<i64>,
}

impl GradeBasis {
    pub fn new(n: u32, m: u32) -> GradeBasis {
        assert!(n >= 3 && m >= 1);
        let js: Vec<i64> = match n {
            3 => {
                let cap = (m / 3) as i64;
                (-cap..=cap).filter(|j| (j - m as i64) % 2 == 0).collect()
            }
            _ => {
                let cap = (m / 2) as i64;
                (-cap..=cap).collect()
            }
        };
        GradeBasis { n, m, js }
    }

    pub fn dim(&self) -> usize {
        self.js.len()
    }

    /// The closed-form dimension for this regime.
    pub fn dim_formula(n: u32, m: u32) -> usize {
        match n {
            3 => {
                let k = (m / 3) as usize;
                match m % 3 {
                    0 => k + 1,
                    1 => k,
                    _ => k + 1,
                }
            }
            _ => 1 + 2 * (m / 2) as usize,
        }
    }

    /// Exponent pair of Q_{m,j}.
    pub fn exponent(&self, j: i64) -> (u32, u32) {
        let m = self.m as i64;
        let (k, l) = match self.n {
            3 => ((m + 3 * j) / 2, (m - 3 * j) / 2),
            4 => (m + 2 * j, m - 2 * j),
            n => {
                if j >= 0 {
                    (m + (n as i64 - 2) * j, m - 2 * j)
                } else {
                    (m - 2 * (-j), m + (n as i64 - 2) * (-j))
                }
            }
        };
        assert!(k >= 0 && l >= 0, "basis exponent out of range");
        (k as u32, l as u32)
    }

    pub fn monomial(&self, j: i64, c: Scalar) -> FormalSeries {
        let (k, l) = self.exponent(j);
        FormalSeries::monomial(c, k, l, 0, TRUNC_NONE, TRUNC_NONE)
    }

    /// Whether the basis contains the self-conjugate j = 0 slot.
    pub fn has_zero(&self) -> bool {
        self.js.contains(&0)
    }

    /// Real dimension (= number of monomials, counting the reality
    /// constraint c_{-j} = c_j^*).
    pub fn real_dim(&self) -> usize {
        self.js.len()
    }

    /// Real coordinate directions of the real-valued subspace, in the
    /// packing order used by pack/unpack: Q_0 (if present), then for
    /// each j > 0 the pair Q_j + Q_{-j} and i(Q_j - Q_{-j}).
    pub fn real_directions(&self, mode: ScalarMode) -> Vec<FormalSeries> {
        let one = Scalar::one(mode);
        let mut out = Vec::with_capacity(self.real_dim());
        if self.has_zero() {
            out.push(self.monomial(0, one.clone()));
        }
        for &j in self.js.iter().filter(|j| **j > 0) {
            let re = self
                .monomial(j, one.clone())
                .add(&self.monomial(-j, one.clone()))
                .expect("same mode");
            let im = self
                .monomial(j, one.mul_i())
                .add(&self.monomial(-j, one.mul_i().conj()))
                .expect("same mode");
            out.push(re);
            out.push(im);
        }
        out
    }

    /// Packs a real-valued element of this graded space into real
    /// coordinates [c_0, Re c_1, Im c_1, Re c_2, ...].
    pub fn pack(&self, h: &FormalSeries, tol: f64) -> Result<Vec<Scalar>> {
        h.assert_real_valued(tol)?;
        let mut used = 0usize;
        let mut out = Vec::with_capacity(self.real_dim());
        if self.has_zero() {
            let (k, l) = self.exponent(0);
            let c = h.coeff(k, l, 0);
            used += usize::from(!c.is_zero());
            out.push(c.re_part());
        }
        for &j in self.js.iter().filter(|j| **j > 0) {
            let (k, l) = self.exponent(j);
            let c = h.coeff(k, l, 0);
            let (km, lm) = self.exponent(-j);
            used += usize::from(!c.is_zero()) + usize::from(!h.coeff(km, lm, 0).is_zero());
            out.push(c.re_part());
            out.push(c.im_part());
        }
        if used != h.len() {
            return Err(NfError::InvalidInput(format!(
                "element has terms outside the grade-{} basis of order {}",
                self.m, self.n
            )));
        }
        Ok(out)
    }

    /// Inverse of pack.
    pub fn unpack(&self, coords: &[Scalar], mode: ScalarMode) -> FormalSeries {
        assert_eq!(coords.len(), self.real_dim());
        let mut h = FormalSeries::zero(mode, TRUNC_NONE, TRUNC_NONE);
        let mut idx = 0;
        if self.has_zero() {
            let (k, l) = self.exponent(0);
            h.add_term(k, l, 0, coords[0].clone());
            idx = 1;
        }
        for &j in self.js.iter().filter(|j| **j > 0) {
            let c = coords[idx].add(&coords[idx + 1].mul_i());
            idx += 2;
            let (k, l) = self.exponent(j);
            h.add_term(k, l, 0, c.clone());
            let (km, lm) = self.exponent(-j);
            h.add_term(km, lm, 0, c.conj());
        }
        h
    }

    /// The grading this regime slices by.
    pub fn grading(n: u32) -> Grading {
        match n {
            3 => Grading::Total,
            4 => Grading::HalfTotal,
            _ => Grading::Delta,
        }
    }

    /// All resonant exponents of this grade, found by scanning total
    /// degrees up to the bound; must agree with the indexed basis.
    pub fn brute_enumerate(n: u32, m: u32, total_cap: u32) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for k in 0..=total_cap {
            for l in 0..=total_cap.saturating_sub(k) {
                if k.abs_diff(l) % n != 0 {
                    continue;
                }
                let keep = match n {
                    3 => k + l == m,
                    4 => (k + l) % 2 == 0 && (k + l) / 2 == m,
                    _ => delta_order_int(k, l, n) == Some(m as i64),
                };
                if keep {
                    out.push((k, l));
                }
            }
        }
        out
    }
}
