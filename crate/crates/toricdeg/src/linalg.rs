//! Exact integer and rational linear algebra.
//!
//! Everything downstream (fan validation, intersection numbers, polytopes,
//! the minimal model program driver) reduces to a handful of primitives kept
//! here: primitive vectors, fraction-free determinants, Smith normal form
//! with unimodular transforms, exact linear solves, kernels, and linear
//! feasibility with certificates.
//!
//! Linear programs run through Fourier–Motzkin elimination when at most six
//! variables are eliminated and through an exact phase-one simplex with
//! Bland's rule otherwise. No floating point anywhere; every certificate is
//! re-verified by substitution before it leaves this module.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

pub type Int = BigInt;
pub type Rat = BigRational;
pub type IntVec = Vec<Int>;
pub type RatVec = Vec<Rat>;
/// Row-major integer matrix.
pub type IntMat = Vec<IntVec>;
/// Row-major rational matrix.
pub type RatMat = Vec<RatVec>;

/// Shorthand integer constructor.
pub fn int(n: i64) -> Int {
    Int::from(n)
}

/// Shorthand rational constructor.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(Int::from(n))
}

/// Integer vector from machine integers.
pub fn ivec(entries: &[i64]) -> IntVec {
    entries.iter().map(|&n| int(n)).collect()
}

/// Rational vector from machine integers.
pub fn rvec(entries: &[i64]) -> RatVec {
    entries.iter().map(|&n| rat(n)).collect()
}

/// Cast an integer vector to rationals.
pub fn to_rat_vec(v: &[Int]) -> RatVec {
    v.iter().map(|x| Rat::from_integer(x.clone())).collect()
}

/// Cast an integer matrix to rationals.
pub fn to_rat_mat(m: &[IntVec]) -> RatMat {
    m.iter().map(|r| to_rat_vec(r)).collect()
}

/// Exact rational dot product.
pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Rat::zero();
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

/// Dot product of an integer vector with a rational one.
pub fn dot_int_rat(a: &[Int], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Rat::zero();
    for (x, y) in a.iter().zip(b) {
        acc += Rat::from_integer(x.clone()) * y;
    }
    acc
}

/// Integer dot product.
pub fn dot_int(a: &[Int], b: &[Int]) -> Int {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Int::zero();
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

/// Matrix-vector product over the integers (rows × v).
pub fn mat_vec_int(m: &[IntVec], v: &[Int]) -> IntVec {
    m.iter().map(|row| dot_int(row, v)).collect()
}

/// Matrix-vector product with rational vector input.
pub fn mat_vec_int_rat(m: &[IntVec], v: &[Rat]) -> RatVec {
    m.iter().map(|row| dot_int_rat(row, v)).collect()
}

/// Identity matrix.
pub fn identity_int(n: usize) -> IntMat {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Int::one() } else { Int::zero() })
                .collect()
        })
        .collect()
}

/// Integer matrix product.
pub fn mat_mul_int(a: &[IntVec], b: &[IntVec]) -> IntMat {
    let rows = a.len();
    let inner = if rows > 0 { a[0].len() } else { 0 };
    let cols = if b.is_empty() { 0 } else { b[0].len() };
    debug_assert_eq!(inner, b.len());
    let mut out = vec![vec![Int::zero(); cols]; rows];
    for i in 0..rows {
        for (k, bk) in b.iter().enumerate() {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..cols {
                let prod = &a[i][k] * &bk[j];
                out[i][j] += prod;
            }
        }
    }
    out
}

/// Transpose.
pub fn transpose_int(m: &[IntVec]) -> IntMat {
    let rows = m.len();
    let cols = if rows > 0 { m[0].len() } else { 0 };
    (0..cols)
        .map(|j| (0..rows).map(|i| m[i][j].clone()).collect())
        .collect()
}

/// Make a nonzero integer vector primitive: divide by the gcd of its entries,
/// preserving direction. `(-3, 6, -9)` becomes `(-1, 2, -3)`.
pub fn primitive(v: &[Int]) -> Result<IntVec> {
    let mut g = Int::zero();
    for x in v {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return Err(Error::Internal(
            "primitive vector of the zero vector is undefined".into(),
        ));
    }
    Ok(v.iter().map(|x| x / &g).collect())
}

/// Scale a nonzero rational vector to a primitive integer vector with the
/// same direction.
pub fn primitive_of_rational(v: &[Rat]) -> Result<IntVec> {
    let mut lcm = Int::one();
    for x in v {
        lcm = lcm.lcm(x.denom());
    }
    let ints: IntVec = v
        .iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect();
    primitive(&ints)
}

/// Determinant by the Bareiss fraction-free algorithm.
pub fn det_bareiss(m: &[IntVec]) -> Result<Int> {
    let n = m.len();
    for row in m {
        if row.len() != n {
            return Err(Error::DimensionMismatch(
                "determinant of a non-square matrix".into(),
            ));
        }
    }
    if n == 0 {
        return Ok(Int::one());
    }
    let mut a: IntMat = m.to_vec();
    let mut sign = Int::one();
    let mut prev = Int::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            // Pivot search below the diagonal.
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return Ok(Int::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                let (q, r) = num.div_rem(&prev);
                debug_assert!(r.is_zero(), "Bareiss division must be exact");
                a[i][j] = q;
            }
            a[i][k] = Int::zero();
        }
        prev = a[k][k].clone();
    }
    Ok(sign * a[n - 1][n - 1].clone())
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut RatMat) -> Vec<usize> {
    let rows = m.len();
    let cols = if rows > 0 { m[0].len() } else { 0 };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r >= rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].clone();
        for x in m[r].iter_mut() {
            *x /= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pivot_row = m[r].clone();
                for (x, pr) in m[i].iter_mut().zip(&pivot_row) {
                    *x -= &f * pr;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank of a rational matrix.
pub fn rank(m: &[RatVec]) -> usize {
    let mut copy = m.to_vec();
    rref(&mut copy).len()
}

/// Rank of an integer matrix.
pub fn rank_int(m: &[IntVec]) -> usize {
    rank(&to_rat_mat(m))
}

/// Solve `a · x = b` exactly over the rationals. Returns `None` when the
/// system is inconsistent; with several solutions, free variables are set to
/// zero, which makes the answer deterministic.
pub fn solve_exact(a: &[RatVec], b: &[Rat]) -> Option<RatVec> {
    let rows = a.len();
    if rows != b.len() {
        return None;
    }
    let cols = if rows > 0 { a[0].len() } else { 0 };
    let mut aug: RatMat = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    // A pivot in the augmented column signals inconsistency.
    if pivots.contains(&cols) {
        return None;
    }
    let mut x = vec![Rat::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][cols].clone();
    }
    Some(x)
}

/// Integer-matrix convenience wrapper for [`solve_exact`].
pub fn solve_exact_int(a: &[IntVec], b: &[Rat]) -> Option<RatVec> {
    solve_exact(&to_rat_mat(a), b)
}

/// Basis of the right kernel `{x : a · x = 0}` over the rationals.
pub fn nullspace(a: &[RatVec]) -> Vec<RatVec> {
    let rows = a.len();
    let cols = if rows > 0 { a[0].len() } else { 0 };
    let mut m = a.to_vec();
    let pivots = rref(&mut m);
    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![Rat::zero(); cols];
        v[free] = Rat::one();
        for (r, &c) in pivots.iter().enumerate() {
            v[c] = -m[r][free].clone();
        }
        basis.push(v);
    }
    basis
}

// ---------------------------------------------------------------------------
// Smith normal form
// ---------------------------------------------------------------------------

/// Smith normal form `u · m · v = s` with unimodular `u`, `v` and a
/// nonnegative diagonal `s` whose entries divide in sequence.
#[derive(Debug, Clone)]
pub struct SnfResult {
    pub s: IntMat,
    pub u: IntMat,
    pub v: IntMat,
}

impl SnfResult {
    /// The nonzero diagonal invariants d₁ | d₂ | …
    pub fn invariants(&self) -> IntVec {
        let mut out = Vec::new();
        let rows = self.s.len();
        let cols = if rows > 0 { self.s[0].len() } else { 0 };
        for i in 0..rows.min(cols) {
            if !self.s[i][i].is_zero() {
                out.push(self.s[i][i].clone());
            }
        }
        out
    }
}

fn swap_rows(m: &mut IntMat, a: usize, b: usize) {
    m.swap(a, b);
}

fn swap_cols(m: &mut IntMat, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

fn add_row_multiple(m: &mut IntMat, dst: usize, src: usize, c: &Int) {
    if c.is_zero() {
        return;
    }
    let src_row = m[src].clone();
    for (d, s) in m[dst].iter_mut().zip(src_row.iter()) {
        *d += c * s;
    }
}

fn add_col_multiple(m: &mut IntMat, dst: usize, src: usize, c: &Int) {
    if c.is_zero() {
        return;
    }
    for row in m.iter_mut() {
        let s = row[src].clone();
        row[dst] += c * &s;
    }
}

fn negate_row(m: &mut IntMat, r: usize) {
    for x in m[r].iter_mut() {
        *x = -x.clone();
    }
}

/// Smith normal form with transforms, verified before returning.
///
/// The spec's running example: `[[2,-1,-1],[-1,2,-1]]` has invariants 1, 3.
pub fn smith_normal_form(m: &[IntVec]) -> Result<SnfResult> {
    let rows = m.len();
    let cols = if rows > 0 { m[0].len() } else { 0 };
    for row in m {
        if row.len() != cols {
            return Err(Error::DimensionMismatch("ragged matrix".into()));
        }
    }
    let mut s: IntMat = m.to_vec();
    let mut u = identity_int(rows);
    let mut v = identity_int(cols);

    let mut t = 0;
    while t < rows.min(cols) {
        // Move a minimal-magnitude nonzero entry of the trailing block to (t, t).
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if s[i][j].is_zero() {
                    continue;
                }
                if best
                    .map(|(bi, bj)| s[i][j].abs() < s[bi][bj].abs())
                    .unwrap_or(true)
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else {
            break; // trailing block is zero
        };
        if pi != t {
            swap_rows(&mut s, t, pi);
            swap_rows(&mut u, t, pi);
        }
        if pj != t {
            swap_cols(&mut s, t, pj);
            swap_cols(&mut v, t, pj);
        }
        if s[t][t].is_negative() {
            negate_row(&mut s, t);
            negate_row(&mut u, t);
        }

        // Clear the pivot row and column; a nonzero remainder becomes the new
        // (strictly smaller) pivot, so this terminates.
        let mut dirty = false;
        for i in t + 1..rows {
            if s[i][t].is_zero() {
                continue;
            }
            let (q, _r) = s[i][t].div_mod_floor(&s[t][t]);
            add_row_multiple(&mut s, i, t, &(-q.clone()));
            add_row_multiple(&mut u, i, t, &(-q));
            if !s[i][t].is_zero() {
                dirty = true;
            }
        }
        for j in t + 1..cols {
            if s[t][j].is_zero() {
                continue;
            }
            let (q, _r) = s[t][j].div_mod_floor(&s[t][t]);
            add_col_multiple(&mut s, j, t, &(-q.clone()));
            add_col_multiple(&mut v, j, t, &(-q));
            if !s[t][j].is_zero() {
                dirty = true;
            }
        }
        if dirty {
            continue; // smaller remainders exist; re-select the pivot
        }

        // Enforce the divisibility chain: absorb a non-divisible entry into
        // the pivot row and re-run this position.
        let mut fixed = true;
        'scan: for i in t + 1..rows {
            for j in t + 1..cols {
                if !(&s[i][j] % &s[t][t]).is_zero() {
                    add_row_multiple(&mut s, t, i, &Int::one());
                    add_row_multiple(&mut u, t, i, &Int::one());
                    fixed = false;
                    break 'scan;
                }
            }
        }
        if fixed {
            t += 1;
        }
    }

    let result = SnfResult { s, u, v };
    verify_snf(m, &result)?;
    Ok(result)
}

fn verify_snf(m: &[IntVec], snf: &SnfResult) -> Result<()> {
    let um = mat_mul_int(&snf.u, m);
    let umv = mat_mul_int(&um, &snf.v);
    if umv != snf.s {
        return Err(Error::Internal("Smith normal form: u·m·v ≠ s".into()));
    }
    let rows = snf.s.len();
    let cols = if rows > 0 { snf.s[0].len() } else { 0 };
    for i in 0..rows {
        for j in 0..cols {
            if i != j && !snf.s[i][j].is_zero() {
                return Err(Error::Internal("Smith normal form: s not diagonal".into()));
            }
        }
    }
    let inv = snf.invariants();
    for w in inv.windows(2) {
        if !(&w[1] % &w[0]).is_zero() {
            return Err(Error::Internal(
                "Smith normal form: divisibility chain broken".into(),
            ));
        }
    }
    for d in &inv {
        if d.is_negative() {
            return Err(Error::Internal("Smith normal form: negative invariant".into()));
        }
    }
    if det_bareiss(&snf.u)?.abs() != Int::one() || det_bareiss(&snf.v)?.abs() != Int::one() {
        return Err(Error::Internal(
            "Smith normal form: transform not unimodular".into(),
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Linear feasibility
// ---------------------------------------------------------------------------

/// Relation of a linear constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Ge,
    Le,
    Eq,
}

/// One linear constraint `coeffs · x REL rhs` over free rational variables.
#[derive(Debug, Clone)]
pub struct LinCon {
    pub coeffs: RatVec,
    pub rel: Rel,
    pub rhs: Rat,
}

impl LinCon {
    pub fn ge(coeffs: RatVec, rhs: Rat) -> Self {
        LinCon { coeffs, rel: Rel::Ge, rhs }
    }
    pub fn le(coeffs: RatVec, rhs: Rat) -> Self {
        LinCon { coeffs, rel: Rel::Le, rhs }
    }
    pub fn eq(coeffs: RatVec, rhs: Rat) -> Self {
        LinCon { coeffs, rel: Rel::Eq, rhs }
    }

    fn satisfied_by(&self, x: &[Rat]) -> bool {
        let lhs = dot(&self.coeffs, x);
        match self.rel {
            Rel::Ge => lhs >= self.rhs,
            Rel::Le => lhs <= self.rhs,
            Rel::Eq => lhs == self.rhs,
        }
    }
}

const FM_VAR_LIMIT: usize = 6;
const FM_ROW_CAP: usize = 50_000;

/// Decide feasibility of a system of linear constraints over free rational
/// variables; on success the witness point is re-verified against every
/// constraint. Uses Fourier–Motzkin elimination for at most
/// [`FM_VAR_LIMIT`] variables and the exact phase-one simplex beyond.
pub fn lp_feasible(num_vars: usize, cons: &[LinCon]) -> Result<Option<RatVec>> {
    for c in cons {
        if c.coeffs.len() != num_vars {
            return Err(Error::DimensionMismatch(
                "constraint arity differs from variable count".into(),
            ));
        }
    }
    let solution = if num_vars <= FM_VAR_LIMIT {
        match fourier_motzkin(num_vars, cons)? {
            FmOutcome::Feasible(x) => Some(x),
            FmOutcome::Infeasible => None,
            FmOutcome::Overflow => simplex_feasible(num_vars, cons)?,
        }
    } else {
        simplex_feasible(num_vars, cons)?
    };
    if let Some(x) = &solution {
        for c in cons {
            if !c.satisfied_by(x) {
                return Err(Error::Internal(
                    "feasibility witness failed re-verification".into(),
                ));
            }
        }
    }
    Ok(solution)
}

enum FmOutcome {
    Feasible(RatVec),
    Infeasible,
    Overflow,
}

/// Row of the normalized system `coeffs · x ≥ rhs`.
type GeRow = (RatVec, Rat);

fn normalize_ge_rows(cons: &[LinCon]) -> Vec<GeRow> {
    let mut rows = Vec::new();
    for c in cons {
        match c.rel {
            Rel::Ge => rows.push((c.coeffs.clone(), c.rhs.clone())),
            Rel::Le => rows.push((
                c.coeffs.iter().map(|x| -x.clone()).collect(),
                -c.rhs.clone(),
            )),
            Rel::Eq => {
                rows.push((c.coeffs.clone(), c.rhs.clone()));
                rows.push((
                    c.coeffs.iter().map(|x| -x.clone()).collect(),
                    -c.rhs.clone(),
                ));
            }
        }
    }
    rows
}

fn canonical_row(row: &GeRow) -> GeRow {
    // Scale so the first nonzero coefficient (or the constant) is ±1; keeps
    // the duplicate filter effective across proportional rows.
    let scale = row
        .0
        .iter()
        .find(|x| !x.is_zero())
        .cloned()
        .unwrap_or_else(|| row.1.clone());
    if scale.is_zero() {
        return row.clone();
    }
    let s = scale.abs();
    (
        row.0.iter().map(|x| x / &s).collect(),
        &row.1 / &s,
    )
}

fn dedupe_rows(rows: Vec<GeRow>) -> Vec<GeRow> {
    let mut canon: Vec<GeRow> = rows.iter().map(canonical_row).collect();
    canon.sort();
    canon.dedup();
    canon
}

fn fourier_motzkin(num_vars: usize, cons: &[LinCon]) -> Result<FmOutcome> {
    let mut rows = dedupe_rows(normalize_ge_rows(cons));
    // levels[k] holds the system right before x_k is eliminated.
    let mut levels: Vec<Vec<GeRow>> = Vec::with_capacity(num_vars);
    for k in (0..num_vars).rev() {
        levels.push(rows.clone());
        let mut next: Vec<GeRow> = Vec::new();
        let mut pos: Vec<GeRow> = Vec::new();
        let mut neg: Vec<GeRow> = Vec::new();
        for (c, r) in rows {
            if c[k].is_zero() {
                next.push((c, r));
            } else if c[k].is_positive() {
                pos.push((c, r));
            } else {
                neg.push((c, r));
            }
        }
        for (pc, pr) in &pos {
            let pk = pc[k].clone();
            for (nc, nr) in &neg {
                let nk = -nc[k].clone();
                // pk, nk > 0: (p/pk + n/nk) has zero k-coefficient.
                let mut c: RatVec = Vec::with_capacity(num_vars);
                for j in 0..num_vars {
                    c.push(&pc[j] / &pk + &nc[j] / &nk);
                }
                let r = pr / &pk + nr / &nk;
                next.push((c, r));
                if next.len() > FM_ROW_CAP {
                    return Ok(FmOutcome::Overflow);
                }
            }
        }
        rows = dedupe_rows(next);
    }
    // Fully eliminated: rows read `0 ≥ rhs`.
    for (_, r) in &rows {
        if r.is_positive() {
            return Ok(FmOutcome::Infeasible);
        }
    }
    // Back-substitute from x_0 upward; levels were pushed in reverse.
    let mut x = vec![Rat::zero(); num_vars];
    for k in 0..num_vars {
        let level = &levels[num_vars - 1 - k];
        let mut lower: Option<Rat> = None;
        let mut upper: Option<Rat> = None;
        for (c, r) in level {
            if c[k].is_zero() {
                continue;
            }
            // c_k x_k ≥ r − Σ_{j>k} c_j x_j  (x_j for j < k eliminated later,
            // hence zero coefficients at this level).
            let mut rest = r.clone();
            for j in 0..num_vars {
                if j != k && !c[j].is_zero() {
                    rest -= &c[j] * &x[j];
                }
            }
            let bound = &rest / &c[k];
            if c[k].is_positive() {
                lower = Some(match lower {
                    Some(l) if l >= bound => l,
                    _ => bound,
                });
            } else {
                upper = Some(match upper {
                    Some(u) if u <= bound => u,
                    _ => bound,
                });
            }
        }
        x[k] = match (lower, upper) {
            (Some(l), Some(u)) => {
                if l > u {
                    return Err(Error::Internal(
                        "Fourier–Motzkin back-substitution found an empty interval".into(),
                    ));
                }
                (&l + &u) / rat(2)
            }
            (Some(l), None) => l,
            (None, Some(u)) => u,
            (None, None) => Rat::zero(),
        };
    }
    Ok(FmOutcome::Feasible(x))
}

/// Exact phase-one simplex with Bland's rule. Free variables are split into
/// nonnegative pairs; each constraint gains a slack as needed, plus an
/// artificial variable whose total is minimized.
fn simplex_feasible(num_vars: usize, cons: &[LinCon]) -> Result<Option<RatVec>> {
    let m = cons.len();
    if m == 0 {
        return Ok(Some(vec![Rat::zero(); num_vars]));
    }
    let num_split = 2 * num_vars;
    let num_slack = cons
        .iter()
        .filter(|c| c.rel != Rel::Eq)
        .count();
    let total = num_split + num_slack + m; // + artificials
    // Tableau rows: [split vars | slacks | artificials | rhs]
    let mut tab: RatMat = vec![vec![Rat::zero(); total + 1]; m];
    let mut slack_idx = 0;
    for (i, c) in cons.iter().enumerate() {
        let flip = c.rhs.is_negative();
        let sign = if flip { -Rat::one() } else { Rat::one() };
        for j in 0..num_vars {
            tab[i][2 * j] = &sign * &c.coeffs[j];
            tab[i][2 * j + 1] = -(&sign * &c.coeffs[j]);
        }
        match c.rel {
            Rel::Ge => {
                // a·x − s = b (s ≥ 0); sign flip may turn it into +s.
                tab[i][num_split + slack_idx] = -sign.clone();
                slack_idx += 1;
            }
            Rel::Le => {
                tab[i][num_split + slack_idx] = sign.clone();
                slack_idx += 1;
            }
            Rel::Eq => {}
        }
        tab[i][num_split + num_slack + i] = Rat::one();
        tab[i][total] = if flip { -c.rhs.clone() } else { c.rhs.clone() };
    }
    let mut basis: Vec<usize> = (0..m).map(|i| num_split + num_slack + i).collect();

    // Reduced-cost row for minimizing the artificial sum: z = Σ rows.
    let mut zrow = vec![Rat::zero(); total + 1];
    for row in &tab {
        for (z, x) in zrow.iter_mut().zip(row) {
            *z += x;
        }
    }
    for z in zrow.iter_mut().take(total).skip(num_split + num_slack) {
        *z = Rat::zero();
    }

    // Bland: entering = lowest-index column with positive z-coefficient
    // (minimizing, tableau stores z as Σ of basic artificial rows).
    while let Some(enter) = (0..total).find(|&j| zrow[j].is_positive()) {
        // Ratio test, ties by lowest basis index.
        let mut leave: Option<usize> = None;
        let mut best: Option<Rat> = None;
        for i in 0..m {
            if tab[i][enter].is_positive() {
                let ratio = &tab[i][total] / &tab[i][enter];
                let better = match &best {
                    None => true,
                    Some(b) => {
                        ratio < *b || (ratio == *b && basis[i] < basis[leave.unwrap()])
                    }
                };
                if better {
                    best = Some(ratio);
                    leave = Some(i);
                }
            }
        }
        let Some(li) = leave else {
            return Err(Error::Internal(
                "phase-one simplex objective unbounded".into(),
            ));
        };
        pivot(&mut tab, &mut zrow, li, enter);
        basis[li] = enter;
    }

    if zrow[total].is_positive() {
        return Ok(None); // artificials cannot all vanish
    }
    // Drive any artificial still basic (at level zero) out of the basis.
    for i in 0..m {
        if basis[i] >= num_split + num_slack {
            if let Some(enter) =
                (0..num_split + num_slack).find(|&j| !tab[i][j].is_zero())
            {
                pivot(&mut tab, &mut zrow, i, enter);
                basis[i] = enter;
            }
        }
    }
    let mut x = vec![Rat::zero(); num_vars];
    for (i, &b) in basis.iter().enumerate() {
        if b < num_split {
            let var = b / 2;
            if b % 2 == 0 {
                x[var] += &tab[i][total];
            } else {
                x[var] -= &tab[i][total];
            }
        }
    }
    Ok(Some(x))
}

fn pivot(tab: &mut RatMat, zrow: &mut RatVec, li: usize, enter: usize) {
    let cols = tab[li].len();
    let p = tab[li][enter].clone();
    for x in tab[li].iter_mut() {
        *x /= &p;
    }
    let pivot_row = tab[li].clone();
    for (i, row) in tab.iter_mut().enumerate() {
        if i == li || row[enter].is_zero() {
            continue;
        }
        let f = row[enter].clone();
        for j in 0..cols {
            let sub = &f * &pivot_row[j];
            row[j] -= sub;
        }
    }
    if !zrow[enter].is_zero() {
        let f = zrow[enter].clone();
        for j in 0..cols {
            let sub = &f * &pivot_row[j];
            zrow[j] -= sub;
        }
    }
}

// ---------------------------------------------------------------------------
// Cone membership with certificates
// ---------------------------------------------------------------------------

/// Outcome of a cone-membership query. Exactly one of `combination` and
/// `separator` is present; both certificates are re-verified by substitution
/// before the value is constructed.
#[derive(Debug, Clone)]
pub struct ConeMembership {
    pub inside: bool,
    /// Nonnegative coefficients λ with Σ λᵢ·gᵢ = target.
    pub combination: Option<RatVec>,
    /// Hyperplane w with ⟨w, gᵢ⟩ ≥ 0 for all generators and ⟨w, target⟩ < 0.
    pub separator: Option<RatVec>,
}

/// Decide whether `target` lies in the convex cone spanned by `gens`.
///
/// Farkas duality guarantees one of the two certificates exists; failing to
/// find either is an internal error, never a silent answer.
pub fn cone_member(gens: &[RatVec], target: &[Rat]) -> Result<ConeMembership> {
    let dim = target.len();
    for g in gens {
        if g.len() != dim {
            return Err(Error::DimensionMismatch(
                "cone generator arity differs from target".into(),
            ));
        }
    }
    let k = gens.len();
    // Primal: λ ≥ 0 with Σ λᵢ gᵢ = target.
    let mut cons: Vec<LinCon> = Vec::with_capacity(k + dim);
    for i in 0..k {
        let mut c = vec![Rat::zero(); k];
        c[i] = Rat::one();
        cons.push(LinCon::ge(c, Rat::zero()));
    }
    for d in 0..dim {
        let coeffs: RatVec = gens.iter().map(|g| g[d].clone()).collect();
        cons.push(LinCon::eq(coeffs, target[d].clone()));
    }
    if let Some(lambda) = lp_feasible(k, &cons)? {
        let mut recomposed = vec![Rat::zero(); dim];
        for (l, g) in lambda.iter().zip(gens) {
            if l.is_negative() {
                return Err(Error::Internal("negative cone coefficient".into()));
            }
            for (r, x) in recomposed.iter_mut().zip(g) {
                *r += l * x;
            }
        }
        if recomposed != target {
            return Err(Error::Internal(
                "cone combination failed re-verification".into(),
            ));
        }
        return Ok(ConeMembership {
            inside: true,
            combination: Some(lambda),
            separator: None,
        });
    }
    // Dual: w with ⟨w, gᵢ⟩ ≥ 0 and ⟨w, target⟩ ≤ −1.
    let mut dual: Vec<LinCon> = Vec::with_capacity(k + 1);
    for g in gens {
        dual.push(LinCon::ge(g.clone(), Rat::zero()));
    }
    dual.push(LinCon::le(target.to_vec(), -Rat::one()));
    let Some(w) = lp_feasible(dim, &dual)? else {
        return Err(Error::Internal(
            "neither cone combination nor separating hyperplane exists".into(),
        ));
    };
    for g in gens {
        if dot(&w, g).is_negative() {
            return Err(Error::Internal("separator fails a generator".into()));
        }
    }
    if !dot(&w, target).is_negative() {
        return Err(Error::Internal("separator fails the target".into()));
    }
    Ok(ConeMembership {
        inside: false,
        combination: None,
        separator: Some(w),
    })
}

// ---------------------------------------------------------------------------

/// All k-element subsets of 0..n, lexicographically.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // Advance the rightmost index that can still move.
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + n - k {
                break;
            }
        }
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Parse a rational from "p/q" or plain integer text.
pub fn parse_rat(text: &str) -> Result<Rat> {
    let parts: Vec<&str> = text.split('/').collect();
    let parse_int = |s: &str| -> Result<Int> {
        s.trim()
            .parse::<Int>()
            .map_err(|e| Error::Parse(format!("bad integer {s:?}: {e}")))
    };
    match parts.as_slice() {
        [n] => Ok(Rat::from_integer(parse_int(n)?)),
        [n, d] => {
            let den = parse_int(d)?;
            if den.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {text:?}")));
            }
            Ok(Rat::new(parse_int(n)?, den))
        }
        _ => Err(Error::Parse(format!("malformed rational {text:?}"))),
    }
}

/// Display a rational as "p" or "p/q", reduced.
pub fn format_rat(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primitive_preserves_direction() {
        let v = ivec(&[-3, 6, -9]);
        assert_eq!(primitive(&v).unwrap(), ivec(&[-1, 2, -3]));
        assert!(primitive(&ivec(&[0, 0])).is_err());
    }

    #[test]
    fn bareiss_determinants() {
        assert_eq!(det_bareiss(&[ivec(&[1, 2]), ivec(&[3, 4])]).unwrap(), int(-2));
        // Generator pair of the singular cone of P(1,2,1).
        assert_eq!(
            det_bareiss(&[ivec(&[1, 0]), ivec(&[-1, -2])]).unwrap(),
            int(-2)
        );
        assert_eq!(det_bareiss(&identity_int(4)).unwrap(), int(1));
        assert_eq!(
            det_bareiss(&[ivec(&[1, 1]), ivec(&[2, 2])]).unwrap(),
            int(0)
        );
    }

    #[test]
    fn snf_of_torsion_ray_matrix() {
        // Ray matrix of the fan with class group Z ⊕ Z/3, transposed form.
        let m = vec![ivec(&[2, -1, -1]), ivec(&[-1, 2, -1])];
        let snf = smith_normal_form(&m).unwrap();
        assert_eq!(snf.invariants(), vec![int(1), int(3)]);
        assert_eq!(snf.s[0][2], int(0));
        assert_eq!(snf.s[1][2], int(0));
    }

    #[test]
    fn snf_shapes_and_edge_cases() {
        let snf = smith_normal_form(&identity_int(3)).unwrap();
        assert_eq!(snf.invariants(), vec![int(1), int(1), int(1)]);
        let zero = vec![ivec(&[0, 0]), ivec(&[0, 0])];
        let snf = smith_normal_form(&zero).unwrap();
        assert!(snf.invariants().is_empty());
        let single = vec![ivec(&[6, 10, 15])];
        let snf = smith_normal_form(&single).unwrap();
        assert_eq!(snf.invariants(), vec![int(1)]);
    }

    #[test]
    fn solve_exact_examples() {
        // Local Cartier datum of D₃ on P(1,2,1): m_σ = (0, 1/2).
        let a = vec![rvec(&[1, 0]), rvec(&[-1, -2])];
        let b = rvec(&[0, -1]);
        let x = solve_exact(&a, &b).unwrap();
        assert_eq!(x, vec![rat(0), Rat::new(int(1), int(2))]);

        let inconsistent = solve_exact(
            &[rvec(&[1, 1]), rvec(&[1, 1])],
            &[rat(0), rat(1)],
        );
        assert!(inconsistent.is_none());
    }

    #[test]
    fn nullspace_dimension() {
        let basis = nullspace(&[rvec(&[1, 1, 1])]);
        assert_eq!(basis.len(), 2);
        for v in &basis {
            assert!(dot(&rvec(&[1, 1, 1]), v).is_zero());
        }
    }

    #[test]
    fn fm_feasibility_small() {
        // x ≥ 1, y ≥ 1, x + y ≤ 3 is feasible.
        let cons = vec![
            LinCon::ge(rvec(&[1, 0]), rat(1)),
            LinCon::ge(rvec(&[0, 1]), rat(1)),
            LinCon::le(rvec(&[1, 1]), rat(3)),
        ];
        assert!(lp_feasible(2, &cons).unwrap().is_some());
        // …and x + y ≤ 1 is not.
        let cons = vec![
            LinCon::ge(rvec(&[1, 0]), rat(1)),
            LinCon::ge(rvec(&[0, 1]), rat(1)),
            LinCon::le(rvec(&[1, 1]), rat(1)),
        ];
        assert!(lp_feasible(2, &cons).unwrap().is_none());
    }

    #[test]
    fn simplex_matches_fm_on_larger_systems() {
        // 8 variables forces the simplex path: a transportation-style system.
        let mut cons = Vec::new();
        for i in 0..8 {
            let mut c = vec![Rat::zero(); 8];
            c[i] = Rat::one();
            cons.push(LinCon::ge(c, Rat::zero()));
        }
        cons.push(LinCon::eq(rvec(&[1, 1, 1, 1, 1, 1, 1, 1]), rat(4)));
        cons.push(LinCon::ge(rvec(&[1, 2, 3, 4, 5, 6, 7, 8]), rat(20)));
        let x = lp_feasible(8, &cons).unwrap().unwrap();
        assert_eq!(x.iter().fold(Rat::zero(), |a, b| a + b), rat(4));
    }

    #[test]
    fn cone_membership_certificates() {
        let gens = vec![rvec(&[1, 0]), rvec(&[0, 1])];
        let inside = cone_member(&gens, &rvec(&[1, 1])).unwrap();
        assert!(inside.inside);
        assert!(inside.combination.is_some());

        let outside = cone_member(&gens, &rvec(&[-1, 0])).unwrap();
        assert!(!outside.inside);
        let w = outside.separator.unwrap();
        assert!(dot(&w, &rvec(&[1, 0])) >= Rat::zero());
        assert!(dot(&w, &rvec(&[0, 1])) >= Rat::zero());
        assert!(dot(&w, &rvec(&[-1, 0])) < Rat::zero());
    }

    #[test]
    fn cone_membership_many_generators_uses_simplex() {
        let gens: Vec<RatVec> = (0..9)
            .map(|i| rvec(&[i as i64 + 1, 9 - i as i64]))
            .collect();
        let inside = cone_member(&gens, &rvec(&[10, 10])).unwrap();
        assert!(inside.inside);
        let outside = cone_member(&gens, &rvec(&[-1, -1])).unwrap();
        assert!(!outside.inside);
    }

    #[test]
    fn rational_round_trip() {
        assert_eq!(parse_rat("3/2").unwrap(), Rat::new(int(3), int(2)));
        assert_eq!(parse_rat("-7").unwrap(), rat(-7));
        assert_eq!(format_rat(&Rat::new(int(3), int(2))), "3/2");
        assert_eq!(format_rat(&rat(-7)), "-7");
        assert_eq!(format_rat(&Rat::new(int(2), int(4))), "1/2");
        assert!(parse_rat("1/0").is_err());
    }
}
