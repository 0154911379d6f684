//! Homological operators of the graded normalization: the action of
//! the leading Hamiltonian part on each graded space, its kernel and
//! complement structure, and the exact linear solves that project a
//! grade onto the normal-form complement.
//!
//! The operator maps chi in the grade-p space to the grade-(p+1) slice
//! of 2i {chi, lead}, where lead is a0 z^2 zbar^2 + b0 (z^n + zbar^n)
//! for n >= 4 and b0 (z^3 + zbar^3) for n = 3.

use std::collections::BTreeMap;

use crate::basis::GradeBasis;
use crate::error::{NfError, Result};
use crate::lie::poisson_bracket;
use crate::scalar::{Scalar, ScalarMode};
use crate::series::{FormalSeries, Grading, ResonanceContext, TRUNC_NONE};

/// The leading resonant part driving the homological operator.
pub fn leading_part(n: u32, a0: &Scalar, b0: &Scalar) -> FormalSeries {
    let mode = b0.mode();
    let mut h = FormalSeries::zero(mode, TRUNC_NONE, TRUNC_NONE);
    if n >= 4 {
        h.add_term(2, 2, 0, a0.clone());
    }
    h.add_term(n, 0, 0, b0.clone());
    h.add_term(0, n, 0, b0.conj());
    h
}

/// 2i {chi, lead} restricted to the given grade.
pub fn apply_leading(
    chi: &FormalSeries,
    lead: &FormalSeries,
    n: u32,
    grade: u32,
) -> Result<FormalSeries> {
    let br = poisson_bracket(chi, lead)?;
    let full = br.mul_i().scale_i64(2);
    let ctx = ResonanceContext::new(n, 1, TRUNC_NONE);
    Ok(full.grade_slice(grade, &ctx, GradeBasis::grading(n)))
}

/// Complex entries of the closed-form action: for source index j,
/// the coefficients of Q_{p+1,j'} in the image of Q_{p,j}.
pub fn closed_form_column(
    n: u32,
    p: u32,
    a0: &Scalar,
    b0: &Scalar,
    j: i64,
) -> BTreeMap<i64, Scalar> {
    let mode = b0.mode();
    let i2 = |v: i64| Scalar::from_i64(v, mode).mul_i();
    let mut col = BTreeMap::new();
    let pi = p as i64;
    let ni = n as i64;
    let mut put = |jp: i64, c: Scalar| {
        if !c.is_zero() {
            col.insert(jp, c);
        }
    };
    match n {
        3 => {
            // 6i b0 [ (p+3j)/2 Q_{p+1,j-1} - (p-3j)/2 Q_{p+1,j+1} ]
            put(j - 1, i2(3 * (pi + 3 * j)).mul(b0));
            put(j + 1, i2(-3 * (pi - 3 * j)).mul(b0));
        }
        4 => {
            put(j, i2(16 * j).mul(a0));
            put(j - 1, i2(8 * (pi + 2 * j)).mul(b0));
            put(j + 1, i2(-8 * (pi - 2 * j)).mul(b0));
        }
        _ => {
            if j == 0 {
                put(1, i2(-2 * ni * pi).mul(b0));
                put(-1, i2(2 * ni * pi).mul(b0));
            } else if j > 0 {
                put(j, i2(4 * ni * j).mul(a0));
                put(j + 1, i2(-2 * ni * (pi - 2 * j)).mul(b0));
            } else {
                let ja = -j;
                put(j, i2(-4 * ni * ja).mul(a0));
                put(j - 1, i2(2 * ni * (pi - 2 * ja)).mul(b0));
            }
        }
    }
    col
}

/// Structure report of a certified operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OperatorShape {
    pub rank: usize,
    pub codim: usize,
    pub kernel_dim: usize,
}

pub struct HomologicalOperator {
    pub n: u32,
    /// Source grade p; the target grade is p + 1.
    pub p: u32,
    pub source: GradeBasis,
    pub target: GradeBasis,
    pub lead: FormalSeries,
    /// Real matrix, columns indexed like source.real_directions.
    pub columns: Vec<Vec<Scalar>>,
    pub kernel: Option<FormalSeries>,
    pub complement: Vec<FormalSeries>,
}

fn pivot_tol(mode: ScalarMode) -> f64 {
    match mode {
        ScalarMode::Exact => 0.0,
        ScalarMode::Float { prec } => (-(prec as f64) * 0.75).exp2(),
    }
}

impl HomologicalOperator {
    pub fn new(n: u32, p: u32, a0: &Scalar, b0: &Scalar) -> Result<HomologicalOperator> {
        let mode = b0.mode();
        let tol = mode.default_tol();
        if b0.abs_f64() <= tol {
            return Err(NfError::DegenerateLeadingTerm(format!(
                "b0 vanishes at grade {p} (order {n})"
            )));
        }
        if n >= 5 && p % 2 == 0 && a0.abs_f64() <= tol {
            return Err(NfError::DegenerateLeadingTerm(format!(
                "a0 vanishes and grade {p} is even (order {n})"
            )));
        }
        let source = GradeBasis::new(n, p);
        let target = GradeBasis::new(n, p + 1);
        let lead = leading_part(n, a0, b0);

        // certify the closed-form action against the direct bracket
        for &j in &source.js {
            let q = source.monomial(j, Scalar::one(mode));
            let direct = apply_leading(&q, &lead, n, p + 1)?;
            let mut predicted = FormalSeries::zero(mode, TRUNC_NONE, TRUNC_NONE);
            for (jp, c) in closed_form_column(n, p, a0, b0, j) {
                predicted = predicted.add(&target.monomial(jp, c))?;
            }
            let err = direct.distance(&predicted)?;
            if err > tol {
                return Err(NfError::Certification(format!(
                    "closed-form action disagrees with the bracket at n={n} p={p} j={j} (err {err:.3e})"
                )));
            }
        }

        let mut columns = Vec::new();
        for dir in source.real_directions(mode) {
            let image = apply_leading(&dir, &lead, n, p + 1)?;
            let packed = target.pack(&image, tol).map_err(|e| {
                NfError::Certification(format!("operator image left the graded space: {e}"))
            })?;
            columns.push(packed);
        }

        let kernel = kernel_vector(n, p, &lead)?;
        if let Some(k) = &kernel {
            let img = apply_leading(k, &lead, n, p + 1)?;
            if img.max_abs_f64() > tol.max(k.max_abs_f64() * tol) {
                return Err(NfError::Certification(format!(
                    "kernel candidate is not annihilated at n={n} p={p}"
                )));
            }
        }
        let complement = complement_basis(n, p, mode);
        Ok(HomologicalOperator { n, p, source, target, lead, columns, kernel, complement })
    }

    /// Rank, image co-dimension and kernel dimension, computed from the
    /// real matrix and checked against the closed-form expectations.
    pub fn certify_shape(&self) -> Result<OperatorShape> {
        let rows = self.target.real_dim();
        let cols = self.source.real_dim();
        let mut a = vec![vec![Scalar::zero(self.lead.mode()); cols]; rows];
        for (c, col) in self.columns.iter().enumerate() {
            for (r, v) in col.iter().enumerate() {
                a[r][c] = v.clone();
            }
        }
        let rank = matrix_rank(&mut a, pivot_tol(self.lead.mode()));
        let shape = OperatorShape {
            rank,
            codim: rows - rank,
            kernel_dim: cols - rank,
        };
        let expected = expected_shape(self.n, self.p);
        if shape != expected {
            return Err(NfError::Certification(format!(
                "operator shape {shape:?} differs from expected {expected:?} at n={} p={}",
                self.n, self.p
            )));
        }
        if (shape.kernel_dim == 1) != self.kernel.is_some() {
            return Err(NfError::Certification(format!(
                "kernel bookkeeping mismatch at n={} p={}",
                self.n, self.p
            )));
        }
        if shape.codim != self.complement.len() {
            return Err(NfError::Certification(format!(
                "complement size mismatch at n={} p={}",
                self.n, self.p
            )));
        }
        Ok(shape)
    }

    /// Splits target = L(chi) + normal_part with normal_part in the
    /// declared complement and the kernel component of chi zero.
    pub fn complement_project(
        &self,
        target_el: &FormalSeries,
    ) -> Result<(FormalSeries, FormalSeries)> {
        let mode = self.lead.mode();
        let tol = mode.default_tol();
        let t = self.target.pack(target_el, tol)?;
        let sdim = self.source.real_dim();
        let cdim = self.complement.len();
        let rows_base = self.target.real_dim();
        let tie = self.kernel.is_some();
        let nrows = rows_base + usize::from(tie);
        let ncols = sdim + cdim;
        if nrows != ncols {
            return Err(NfError::Certification(format!(
                "homological system is not square ({nrows} x {ncols}) at n={} p={}",
                self.n, self.p
            )));
        }
        let mut a = vec![vec![Scalar::zero(mode); ncols]; nrows];
        let mut rhs = vec![Scalar::zero(mode); nrows];
        for (c, col) in self.columns.iter().enumerate() {
            for (r, v) in col.iter().enumerate() {
                a[r][c] = v.clone();
            }
        }
        for (i, comp) in self.complement.iter().enumerate() {
            let packed = self.target.pack(comp, tol)?;
            for (r, v) in packed.iter().enumerate() {
                a[r][sdim + i] = v.clone();
            }
        }
        rhs[..rows_base].clone_from_slice(&t);
        if let Some(kv) = &self.kernel {
            let packed = self.source.pack(kv, tol)?;
            for (c, v) in packed.iter().enumerate() {
                a[rows_base][c] = v.clone();
            }
        }
        let x = solve_square(a, rhs, pivot_tol(mode))?;
        let chi = self.source.unpack(&x[..sdim], mode);
        let mut normal = FormalSeries::zero(mode, TRUNC_NONE, TRUNC_NONE);
        for (i, comp) in self.complement.iter().enumerate() {
            normal = normal.add(&comp.scale(&x[sdim + i]))?;
        }
        // residual certification
        let image = apply_leading(&chi, &self.lead, self.n, self.p + 1)?;
        let recon = image.add(&normal)?;
        let err = recon.distance(target_el)?;
        let scale = target_el.max_abs_f64().max(1.0);
        if err > tol * scale {
            return Err(NfError::Certification(format!(
                "complement projection residual {err:.3e} at n={} p={}",
                self.n, self.p
            )));
        }
        Ok((chi, normal))
    }
}

/// Expected rank/codim/kernel per regime.
pub fn expected_shape(n: u32, p: u32) -> OperatorShape {
    match n {
        3 => {
            let sdim = GradeBasis::dim_formula(3, p);
            let tdim = GradeBasis::dim_formula(3, p + 1);
            let kernel_dim = usize::from(p % 3 == 0);
            let rank = sdim - kernel_dim;
            OperatorShape { rank, codim: tdim - rank, kernel_dim }
        }
        _ => {
            let sdim = GradeBasis::dim_formula(n, p);
            if p % 2 == 0 {
                OperatorShape { rank: sdim - 1, codim: 1, kernel_dim: 1 }
            } else {
                OperatorShape { rank: sdim, codim: 2, kernel_dim: 0 }
            }
        }
    }
}

/// The grade-p slice of the relevant power of the leading part, when
/// the kernel is nontrivial; None otherwise.
pub fn kernel_vector(n: u32, p: u32, lead: &FormalSeries) -> Result<Option<FormalSeries>> {
    let nontrivial = match n {
        3 => p % 3 == 0,
        _ => p % 2 == 0,
    };
    if !nontrivial {
        return Ok(None);
    }
    let e = if n == 3 { p / 3 } else { p / 2 };
    let power = lead.pow(e)?;
    let ctx = ResonanceContext::new(n, 1, TRUNC_NONE);
    let sliced = match GradeBasis::grading(n) {
        Grading::Delta => power.grade_slice(p, &ctx, Grading::Delta),
        g => power.grade_slice(p, &ctx, g),
    };
    Ok(Some(sliced))
}

/// The complement monomials surviving at target grade p + 1.
pub fn complement_basis(n: u32, p: u32, mode: ScalarMode) -> Vec<FormalSeries> {
    let target = GradeBasis::new(n, p + 1);
    let one = Scalar::one(mode);
    match n {
        3 => {
            let tp = p + 1;
            if tp % 3 == 1 {
                Vec::new()
            } else if tp % 2 == 0 {
                vec![target.monomial(0, one)]
            } else {
                vec![target
                    .monomial(1, one.clone())
                    .add(&target.monomial(-1, one))
                    .expect("same mode")]
            }
        }
        _ => {
            if p % 2 == 0 {
                vec![target.monomial(0, one)]
            } else {
                vec![
                    target.monomial(0, one.clone()),
                    target
                        .monomial(1, one.clone())
                        .add(&target.monomial(-1, one))
                        .expect("same mode"),
                ]
            }
        }
    }
}

/// Gaussian elimination rank with partial pivoting.
pub fn matrix_rank(a: &mut [Vec<Scalar>], tol: f64) -> usize {
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut rank = 0;
    let mut row = 0;
    for col in 0..cols {
        let mut best = row;
        let mut best_abs = 0.0f64;
        for r in row..rows {
            let v = a[r][col].abs_f64();
            if v > best_abs {
                best_abs = v;
                best = r;
            }
        }
        if best_abs <= tol {
            continue;
        }
        a.swap(row, best);
        let pivot = a[row][col].clone();
        for r in (row + 1)..rows {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].div(&pivot);
            for c in col..cols {
                let v = a[row][c].mul(&factor);
                a[r][c] = a[r][c].sub(&v);
            }
        }
        rank += 1;
        row += 1;
        if row == rows {
            break;
        }
    }
    rank
}

/// Solves a square linear system by Gaussian elimination with partial
/// pivoting; a vanishing pivot is a certification failure.
pub fn solve_square(
    mut a: Vec<Vec<Scalar>>,
    mut b: Vec<Scalar>,
    tol: f64,
) -> Result<Vec<Scalar>> {
    let nn = a.len();
    for col in 0..nn {
        let mut best = col;
        let mut best_abs = 0.0f64;
        for r in col..nn {
            let v = a[r][col].abs_f64();
            if v > best_abs {
                best_abs = v;
                best = r;
            }
        }
        if best_abs <= tol {
            return Err(NfError::Certification(format!(
                "singular homological system (pivot {best_abs:.3e} in column {col})"
            )));
        }
        a.swap(col, best);
        b.swap(col, best);
        let pivot = a[col][col].clone();
        for r in (col + 1)..nn {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].div(&pivot);
            for c in col..nn {
                let v = a[col][c].mul(&factor);
                a[r][c] = a[r][c].sub(&v);
            }
            let v = b[col].mul(&factor);
            b[r] = b[r].sub(&v);
        }
    }
    let mode = b[0].mode();
    let mut x = vec![Scalar::zero(mode); nn];
    for col in (0..nn).rev() {
        let mut acc = b[col].clone();
        for c in (col + 1)..nn {
            acc = acc.sub(&a[col][c].mul(&x[c]));
        }
        x[col] = acc.div(&a[col][col]);
    }
    Ok(x)
}
