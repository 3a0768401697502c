//! Principal-level factorization: factor tables for both branches, the
//! ladder pairs built from them, and the eigenfunctions they generate.
//!
//! Every level `l` carries a linear superpotential `W_l = alpha x + beta` and
//! the ladder pair
//!
//! ```text
//! lower = p d - W0 + W_l        raise = -(p d - W0) + W_l
//! raise ∘ lower = p H0 - lambda p + E
//! ```
//!
//! Eigenfunctions are unnormalized; the squared norm `prod E_j` is tracked
//! next to each polynomial.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::diffop::DiffOp;
use crate::error::{Branch, Error, Result};
use crate::exact::rational::{serde_fraction, serde_fraction_opt};
use crate::exact::{frac, rat, Poly, Problem, QuasiFunction, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorEntry {
    pub branch: Branch,
    #[serde(rename = "l")]
    pub level: i64,
    #[serde(with = "serde_fraction")]
    pub alpha: Rational,
    #[serde(with = "serde_fraction")]
    pub beta: Rational,
    /// Minus branch: gap to level `l-1`, absent at `l = 0`.
    /// Plus branch: gap to level `l+1`, absent when `l+1` breaks down.
    #[serde(with = "serde_fraction_opt")]
    pub delta: Option<Rational>,
    #[serde(rename = "E", with = "serde_fraction")]
    pub energy: Rational,
    #[serde(with = "serde_fraction")]
    pub lambda: Rational,
}

impl FactorEntry {
    pub fn superpotential(&self) -> Poly {
        Poly::linear(self.alpha.clone(), self.beta.clone())
    }
}

/// `W0 = (p' - q) / 2`
pub fn superpotential_w0(prob: &Problem) -> Poly {
    (&prob.dp() - prob.q()).scale(&frac(1, 2))
}

fn half() -> Rational {
    frac(1, 2)
}

/// Level-0 data of the minus branch.
fn minus_seed(prob: &Problem) -> (Rational, Rational) {
    (
        (prob.p2() - prob.q1()) * half(),
        (prob.p1() - prob.q0()) * half(),
    )
}

/// Builds the table level by level from the initial data.
///
/// The minus branch covers `0..=max_level`, the plus branch `-1..=max_level`.
pub fn factor_table(prob: &Problem, branch: Branch, max_level: usize) -> Result<Vec<FactorEntry>> {
    let max = max_level as i64;
    let (a0, b0) = minus_seed(prob);
    let half_p2 = prob.p2() * half();
    let half_p1 = prob.p1() * half();
    match branch {
        Branch::Minus => {
            let mut out = vec![FactorEntry {
                branch,
                level: 0,
                alpha: a0,
                beta: b0,
                delta: None,
                energy: Rational::zero(),
                lambda: Rational::zero(),
            }];
            for l in 1..=max {
                let prev = out.last().expect("seeded");
                let alpha = &prev.alpha - &half_p2;
                if alpha.is_zero() {
                    return Err(Error::Breakdown { branch, level: l });
                }
                let ab = &prev.alpha * &prev.beta - &half_p1 * (&alpha + &prev.alpha);
                let beta = ab / &alpha;
                let delta =
                    prob.p0() * (&alpha + &prev.alpha) + &beta * &beta - &prev.beta * &prev.beta;
                let energy = &prev.energy + &delta;
                let lambda = &prev.lambda + &alpha * rat(2);
                out.push(FactorEntry {
                    branch,
                    level: l,
                    alpha,
                    beta,
                    delta: Some(delta),
                    energy,
                    lambda,
                });
            }
            Ok(out)
        }
        Branch::Plus => {
            // levels -1..=max+1; the last one only supplies delta
            let mut raw: Vec<(Rational, Rational)> = vec![(-a0, -b0)];
            let mut broke = None;
            for l in 0..=max + 1 {
                let (pa, pb) = raw.last().expect("seeded");
                let alpha = pa + &half_p2;
                if alpha.is_zero() {
                    broke = Some(l);
                    break;
                }
                let ab = pa * pb + &half_p1 * (&alpha + pa);
                let beta = ab / &alpha;
                raw.push((alpha, beta));
            }
            if let Some(l) = broke {
                if l <= max {
                    return Err(Error::Breakdown { branch, level: l });
                }
            }
            let mut out = Vec::with_capacity(max_level + 2);
            let mut energy = Rational::zero();
            let mut lambda = Rational::zero();
            for (i, level) in (-1..=max).enumerate() {
                let (alpha, beta) = raw[i].clone();
                let delta = raw
                    .get(i + 1)
                    .map(|(na, nb)| -(prob.p0() * (na + &alpha)) + nb * nb - &beta * &beta);
                out.push(FactorEntry {
                    branch,
                    level,
                    alpha: alpha.clone(),
                    beta,
                    delta: delta.clone(),
                    energy: energy.clone(),
                    lambda: lambda.clone(),
                });
                if let Some(d) = delta {
                    energy += d;
                }
                lambda -= alpha * rat(2);
            }
            Ok(out)
        }
    }
}

/// Closed form of the minus-branch eigenvalue `lambda_l`.
pub fn lambda_minus_closed(prob: &Problem, l: i64) -> Rational {
    rat(l) * (rat(l - 1) * prob.c(l) - rat(l + 1) * prob.c(l - 1))
}

fn minus_closed(prob: &Problem, l: i64) -> Result<(Rational, Rational, Rational)> {
    let (cm, c) = (prob.c(l - 1), prob.c(l));
    let (dm, d) = (prob.d(l - 1), prob.d(l));
    if cm.is_zero() {
        return Err(Error::Breakdown {
            branch: Branch::Minus,
            level: l,
        });
    }
    let lr = rat(l);
    let alpha = -cm.clone();
    let beta = ((&lr * &c - &cm) * &dm - &lr * &cm * &d) / (rat(2) * &cm);
    let bracket = &dm / (rat(4) * &cm * &cm) * (rat(2) * &cm * &d - (&cm + &c) * &dm) - prob.p0();
    let energy = &lr * bracket * (rat(l + 2) * &cm - &lr * &c);
    Ok((alpha, beta, energy))
}

fn plus_closed(prob: &Problem, l: i64) -> Result<(Rational, Rational, Rational)> {
    let (cm, c) = (prob.c(l - 1), prob.c(l));
    let (dm, d) = (prob.d(l - 1), prob.d(l));
    if c.is_zero() {
        return Err(Error::Breakdown {
            branch: Branch::Plus,
            level: l,
        });
    }
    let l1 = rat(l + 1);
    let alpha = c.clone();
    let beta = (-(&l1 * &c * &dm) + (&l1 * &cm + &c) * &d) / (rat(2) * &c);
    let bracket = &d / (rat(4) * &c * &c) * ((&cm + &c) * &d - rat(2) * &c * &dm) - prob.p0();
    let energy = &l1 * bracket * (&l1 * &cm - rat(l - 1) * &c);
    Ok((alpha, beta, energy))
}

/// The same table from the level-wise closed forms instead of recurrences.
pub fn direct_match_table(
    prob: &Problem,
    branch: Branch,
    max_level: usize,
) -> Result<Vec<FactorEntry>> {
    let max = max_level as i64;
    let (a0, b0) = minus_seed(prob);
    let shift = prob.p2() - prob.q1();
    match branch {
        Branch::Minus => {
            let mut rows = vec![(a0, b0, Rational::zero())];
            for l in 1..=max {
                rows.push(minus_closed(prob, l)?);
            }
            Ok(rows
                .iter()
                .enumerate()
                .map(|(i, (alpha, beta, energy))| FactorEntry {
                    branch,
                    level: i as i64,
                    alpha: alpha.clone(),
                    beta: beta.clone(),
                    delta: (i > 0).then(|| energy - &rows[i - 1].2),
                    energy: energy.clone(),
                    lambda: lambda_minus_closed(prob, i as i64),
                })
                .collect())
        }
        Branch::Plus => {
            let mut rows = vec![(-a0, -b0, Rational::zero())];
            for l in 0..=max {
                rows.push(plus_closed(prob, l)?);
            }
            let next = plus_closed(prob, max + 1).ok().map(|r| r.2);
            let mut out = Vec::with_capacity(rows.len());
            for (i, (alpha, beta, energy)) in rows.iter().enumerate() {
                let level = i as i64 - 1;
                let following = rows
                    .get(i + 1)
                    .map(|r| r.2.clone())
                    .or_else(|| next.clone());
                let lambda = if level == -1 {
                    Rational::zero()
                } else {
                    lambda_minus_closed(prob, level) + &shift
                };
                out.push(FactorEntry {
                    branch,
                    level,
                    alpha: alpha.clone(),
                    beta: beta.clone(),
                    delta: following.map(|f| f - energy),
                    energy: energy.clone(),
                    lambda,
                });
            }
            Ok(out)
        }
    }
}

/// Entry at `level` of a table produced by [`factor_table`].
pub fn entry_at(table: &[FactorEntry], level: i64) -> Option<&FactorEntry> {
    table.iter().find(|e| e.level == level)
}

/// Ladder operators of one level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LadderPair {
    pub lower: DiffOp,
    pub raise: DiffOp,
    pub superpotential: Poly,
}

impl LadderPair {
    pub fn from_superpotential(prob: &Problem, w: Poly) -> Self {
        let p = QuasiFunction::poly(prob.p().clone());
        let w0 = superpotential_w0(prob);
        let lower = DiffOp::first_order(p.clone(), QuasiFunction::poly(&w - &w0));
        let raise = DiffOp::first_order(p.neg(), QuasiFunction::poly(&w + &w0));
        LadderPair {
            lower,
            raise,
            superpotential: w,
        }
    }

    pub fn from_entry(prob: &Problem, e: &FactorEntry) -> Self {
        Self::from_superpotential(prob, e.superpotential())
    }
}

pub fn ladder_pair(prob: &Problem, branch: Branch, l: i64) -> Result<LadderPair> {
    let min = if branch == Branch::Minus { 0 } else { -1 };
    if l < min {
        return Err(Error::Domain(format!("{branch} branch has no level {l}")));
    }
    let table = factor_table(prob, branch, l.max(0) as usize)?;
    let e = entry_at(&table, l).expect("level in table");
    Ok(LadderPair::from_entry(prob, e))
}

/// An unnormalized principal eigenfunction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Eigenpair {
    pub level: i64,
    pub poly: Poly,
    #[serde(with = "serde_fraction")]
    pub lambda: Rational,
    #[serde(with = "serde_fraction")]
    pub normsq: Rational,
}

/// Polynomial value of `f` when it is `c p^k` with `k >= 0` an integer and no weight.
pub fn as_polynomial(f: &QuasiFunction, prob: &Problem) -> Option<Poly> {
    if f.is_zero() {
        return Some(Poly::zero());
    }
    if !f.e.is_zero() || !f.s.is_integer() || f.s < Rational::zero() {
        return None;
    }
    let k = crate::exact::rational::as_integer(&f.s)? as usize;
    Some(&f.c * &prob.p().pow(k))
}

/// `w^{-1} d^l (w p^l)`, evaluated in the quasi-function class.
pub fn rodrigues(prob: &Problem, l: usize) -> Result<Poly> {
    let seed = QuasiFunction::new(Poly::one(), rat(l as i64), Rational::one(), prob);
    let d = seed.derive_n(l, prob);
    let f = QuasiFunction::new(d.c, d.s, d.e - Rational::one(), prob);
    as_polynomial(&f, prob)
        .ok_or_else(|| Error::Domain("Rodrigues form left the polynomial class".into()))
}

/// Eigenfunctions for levels `0..=max_level`, each obtained by one raising
/// step from the previous one.
pub fn principal_eigenfunctions(prob: &Problem, max_level: usize) -> Result<Vec<Eigenpair>> {
    let table = factor_table(prob, Branch::Minus, max_level)?;
    let mut out = vec![Eigenpair {
        level: 0,
        poly: Poly::one(),
        lambda: Rational::zero(),
        normsq: Rational::one(),
    }];
    for e in table.iter().skip(1) {
        let prev = out.last().expect("seeded");
        let raise = LadderPair::from_entry(prob, e).raise;
        let f = raise.apply_poly(&prev.poly, prob);
        let poly = as_polynomial(&f, prob).ok_or(Error::Degree {
            level: e.level,
            found: -1,
        })?;
        let found = poly.degree().map_or(-1, |d| d as i64);
        if found != e.level {
            return Err(Error::Degree {
                level: e.level,
                found,
            });
        }
        let normsq = &prev.normsq * &e.energy;
        out.push(Eigenpair {
            level: e.level,
            poly,
            lambda: e.lambda.clone(),
            normsq,
        });
    }
    Ok(out)
}

pub fn principal_eigenfunction(prob: &Problem, l: usize) -> Result<Eigenpair> {
    Ok(principal_eigenfunctions(prob, l)?.pop().expect("nonempty"))
}

/// Eigenpair of degree `l` read off the triangular action of `H0` on monomials.
pub fn brute_force_eigen_oracle(prob: &Problem, l: usize) -> Result<(Poly, Rational)> {
    let (a2, a1, a0) = (prob.p().coeff(2), prob.p().coeff(1), prob.p().coeff(0));
    let (b1, b0) = (prob.q1(), prob.q0());
    let n = l + 1;
    // m[j][k]: coefficient of x^j in H0 x^k
    let mut m = vec![vec![Rational::zero(); n]; n];
    for k in 0..n {
        let kk = rat(k as i64);
        let kk1 = rat(k as i64 * (k as i64 - 1));
        m[k][k] = -(&a2 * &kk1) - &b1 * &kk;
        if k >= 1 {
            m[k - 1][k] = -(&a1 * &kk1) - &b0 * &kk;
        }
        if k >= 2 {
            m[k - 2][k] = -(&a0 * &kk1);
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if m[i][i] == m[j][j] {
                return Err(Error::OracleDegenerate {
                    i: i as i64,
                    j: j as i64,
                });
            }
        }
    }
    let lambda = m[l][l].clone();
    let mut v = vec![Rational::zero(); n];
    v[l] = Rational::one();
    for j in (0..l).rev() {
        let mut acc = Rational::zero();
        for k in j + 1..n {
            acc += &m[j][k] * &v[k];
        }
        v[j] = acc / (&lambda - &m[j][j]);
    }
    Ok((Poly::new(v), lambda))
}

/// `lower_l raise_l - raise_{l-1} lower_{l-1} - delta` (minus) or
/// `lower_l raise_l - raise_{l+1} lower_{l+1} + delta` (plus), with `delta`
/// supplied by the caller.
pub fn shape_invariance_residual(
    prob: &Problem,
    branch: Branch,
    l: i64,
    delta: &Rational,
) -> Result<DiffOp> {
    let (here, there) = match branch {
        Branch::Minus => (
            ladder_pair(prob, branch, l)?,
            ladder_pair(prob, branch, l - 1)?,
        ),
        Branch::Plus => (
            ladder_pair(prob, branch, l)?,
            ladder_pair(prob, branch, l + 1)?,
        ),
    };
    let lhs = here.lower.compose(&here.raise, prob);
    let rhs = there.raise.compose(&there.lower, prob);
    let gap = match branch {
        Branch::Minus => -delta.clone(),
        Branch::Plus => delta.clone(),
    };
    Ok(lhs.sub(&rhs, prob).plus_scalar(&gap, prob))
}

/// Shape-invariance residual with the table's own gap; zero when the identity holds.
pub fn shape_invariance_check(prob: &Problem, branch: Branch, l: i64) -> Result<DiffOp> {
    let table = factor_table(prob, branch, (l + 1).max(0) as usize)?;
    let delta = entry_at(&table, l)
        .and_then(|e| e.delta.clone())
        .ok_or_else(|| Error::Domain(format!("no gap recorded at {branch} level {l}")))?;
    shape_invariance_residual(prob, branch, l, &delta)
}

/// `raise ∘ lower - (p H - lambda p + E)` where `H` is `H0` on the minus
/// branch and `H0 + p'' - q'` on the plus branch.
pub fn factorization_residual(prob: &Problem, branch: Branch, l: i64) -> Result<DiffOp> {
    let table = factor_table(prob, branch, l.max(0) as usize)?;
    let e = entry_at(&table, l).ok_or_else(|| Error::Domain(format!("no level {l}")))?;
    let pair = LadderPair::from_entry(prob, e);
    let p = QuasiFunction::poly(prob.p().clone());
    let mut h = DiffOp::hypergeometric(prob);
    if branch == Branch::Plus {
        h = h.plus_scalar(&(prob.p2() - prob.q1()), prob);
    }
    let target = h
        .left_mul(&p, prob)
        .sub(&DiffOp::mul_by(p.scale(&e.lambda)), prob)
        .plus_scalar(&e.energy, prob);
    Ok(pair.raise.compose(&pair.lower, prob).sub(&target, prob))
}

/// Checks `lower_l Phi_l = k Phi_{l-1}` with `k^2 N_{l-1} = E_l N_l`.
pub fn lowering_check(prob: &Problem, l: usize) -> Result<bool> {
    if l == 0 {
        let pair = ladder_pair(prob, Branch::Minus, 0)?;
        return Ok(pair.lower.apply_poly(&Poly::one(), prob).is_zero());
    }
    let eig = principal_eigenfunctions(prob, l)?;
    let table = factor_table(prob, Branch::Minus, l)?;
    let e = &table[l];
    let lowered = LadderPair::from_entry(prob, e)
        .lower
        .apply_poly(&eig[l].poly, prob);
    let Some(lp) = as_polynomial(&lowered, prob) else {
        return Ok(false);
    };
    let Some(k) = lp.ratio_to(&eig[l - 1].poly) else {
        return Ok(false);
    };
    Ok(&k * &k * &eig[l - 1].normsq == &e.energy * &eig[l].normsq)
}

/// Residuals of the two three-term relations around level `l`:
///
/// ```text
/// Phi_{l+1} = (W_{l+1} + W_l) Phi_l - E_l Phi_{l-1}
/// Phi_{l+1} = (-2p d + 2 W0 + W_{l+1} - W_l) Phi_l + E_l Phi_{l-1}
/// ```
pub fn three_term_check(prob: &Problem, l: usize) -> Result<(QuasiFunction, QuasiFunction)> {
    let eig = principal_eigenfunctions(prob, l + 1)?;
    let table = factor_table(prob, Branch::Minus, l + 1)?;
    let (wl, wn) = (table[l].superpotential(), table[l + 1].superpotential());
    let el = &table[l].energy;
    let prev = if l == 0 {
        Poly::zero()
    } else {
        eig[l - 1].poly.clone()
    };
    let cur = &eig[l].poly;
    let next = QuasiFunction::poly(eig[l + 1].poly.clone());
    let e_prev = QuasiFunction::poly(prev.scale(el));

    let r1 = next
        .sub(&QuasiFunction::poly(&(&wn + &wl) * cur), prob)
        .add(&e_prev, prob);

    let w0 = superpotential_w0(prob);
    let op = DiffOp::first_order(
        QuasiFunction::poly(prob.p().scale(&rat(-2))),
        QuasiFunction::poly(&(&w0.scale(&rat(2)) + &wn) - &wl),
    );
    let r2 = next.sub(&op.apply_poly(cur, prob), prob).sub(&e_prev, prob);
    Ok((r1, r2))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceVerdict {
    pub level: i64,
    /// `H0 = H_l - 2 (W_l - W0) d`
    pub shifted_operator: bool,
    /// `p^{-1} lower_0 raise_0 Phi_l = lambda+_l Phi_l`
    pub partner_eigen: bool,
    /// `lambda+_l - lambda-_l = p'' - q'`
    pub lambda_shift: bool,
    /// conjugating `H0` by `exp(int (W_l - W0)/p)` gives `H_l + lambda_l - E_l/p`
    pub conjugated_operator: bool,
    /// `(p^s w^e)` realizing that conjugation, when one exists
    #[serde(with = "crate::exact::rational::serde_fraction_vec")]
    pub wrapper_exponents: Vec<Rational>,
    /// `(p H_l - E_l)(p^s w^e Phi_l) = 0`, checked when the wrapper exists
    pub wrapped_eigen: Option<bool>,
}

impl EquivalenceVerdict {
    pub fn passed(&self) -> bool {
        self.shifted_operator
            && self.partner_eigen
            && self.lambda_shift
            && self.conjugated_operator
            && self.wrapped_eigen.unwrap_or(true)
    }
}

/// `-p d^2 + (2 W_l - p') d`
pub fn shifted_operator(prob: &Problem, w: &Poly) -> DiffOp {
    DiffOp::new(vec![
        QuasiFunction::zero(),
        QuasiFunction::poly(&w.scale(&rat(2)) - &prob.dp()),
        QuasiFunction::poly(-prob.p()),
    ])
}

/// Solves `dw = s p' + e (q - p')` for `(s, e)`.
fn wrapper_exponents(prob: &Problem, dw: &Poly) -> Option<(Rational, Rational)> {
    let dp = prob.dp();
    let g = prob.q() - &dp;
    let (a1, a0) = (dp.coeff(1), dp.coeff(0));
    let (g1, g0) = (g.coeff(1), g.coeff(0));
    let (t1, t0) = (dw.coeff(1), dw.coeff(0));
    let det = &a1 * &g0 - &a0 * &g1;
    if !det.is_zero() {
        let s = (&t1 * &g0 - &t0 * &g1) / &det;
        let e = (&a1 * &t0 - &a0 * &t1) / &det;
        return Some((s, e));
    }
    // p' and q - p' are parallel (or one vanishes): try each alone
    if let Some(s) = Poly::ratio_to(dw, &dp).or_else(|| dw.is_zero().then(Rational::zero)) {
        if (&dp.scale(&s) - dw).is_zero() {
            return Some((s, Rational::zero()));
        }
    }
    if let Some(e) = Poly::ratio_to(dw, &g) {
        return Some((Rational::zero(), e));
    }
    None
}

pub fn equivalent_forms_check(prob: &Problem, l: usize) -> Result<EquivalenceVerdict> {
    let minus = factor_table(prob, Branch::Minus, l)?;
    let plus = factor_table(prob, Branch::Plus, l)?;
    let em = &minus[l];
    let ep = entry_at(&plus, l as i64).expect("level");
    let w0 = superpotential_w0(prob);
    let wl = em.superpotential();
    let dw = &wl - &w0;
    let h0 = DiffOp::hypergeometric(prob);
    let hl = shifted_operator(prob, &wl);

    let two_dw_d = DiffOp::first_order(
        QuasiFunction::poly(dw.scale(&rat(2))),
        QuasiFunction::zero(),
    );
    let shifted_ok = h0.op_equals(&hl.sub(&two_dw_d, prob), prob);

    let phi = principal_eigenfunction(prob, l)?.poly;
    let base = ladder_pair(prob, Branch::Minus, 0)?;
    let inv_p = QuasiFunction::with_power(Poly::one(), -Rational::one(), prob);
    let partner = base.lower.compose(&base.raise, prob).left_mul(&inv_p, prob);
    let partner_ok = partner
        .apply_poly(&phi, prob)
        .sub(&QuasiFunction::poly(phi.scale(&ep.lambda)), prob)
        .is_zero();

    let lambda_ok = &ep.lambda - &em.lambda == prob.p2() - prob.q1();

    let r = QuasiFunction::with_power(dw.clone(), -Rational::one(), prob);
    let conj = h0.conjugate_logderiv(&r, prob);
    let e_over_p =
        QuasiFunction::with_power(Poly::constant(em.energy.clone()), -Rational::one(), prob);
    let expect = hl
        .plus_scalar(&em.lambda, prob)
        .sub(&DiffOp::mul_by(e_over_p), prob);
    let conj_ok = conj.op_equals(&expect, prob);

    let mut exps = Vec::new();
    let mut wrapped = None;
    if let Some((s, e)) = wrapper_exponents(prob, &dw) {
        let via = h0.conjugate(&s, &e, prob);
        let phi_w = QuasiFunction::new(phi.clone(), s.clone(), e.clone(), prob);
        let p = QuasiFunction::poly(prob.p().clone());
        let php = hl.left_mul(&p, prob).plus_scalar(&-em.energy.clone(), prob);
        wrapped = Some(via.op_equals(&conj, prob) && php.apply(&phi_w, prob).is_zero());
        exps = vec![s, e];
    }

    Ok(EquivalenceVerdict {
        level: l as i64,
        shifted_operator: shifted_ok,
        partner_eigen: partner_ok,
        lambda_shift: lambda_ok,
        conjugated_operator: conj_ok,
        wrapper_exponents: exps,
        wrapped_eigen: wrapped,
    })
}

/// Relations tying level `l` of the plus branch to the minus branch.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryVerdict {
    pub level: i64,
    pub alpha: bool,
    pub beta: bool,
    pub delta: bool,
    pub energy: bool,
    pub lambda: bool,
    /// `lower+_l = -raise-_{l+1}` and `raise+_l = -lower-_{l+1}`
    pub operators: bool,
}

impl SymmetryVerdict {
    pub fn passed(&self) -> bool {
        self.alpha && self.beta && self.delta && self.energy && self.lambda && self.operators
    }
}

pub fn branch_symmetry_check(prob: &Problem, l: usize) -> Result<SymmetryVerdict> {
    let minus = factor_table(prob, Branch::Minus, l + 2)?;
    let plus = factor_table(prob, Branch::Plus, l)?;
    let p = entry_at(&plus, l as i64).expect("level");
    let (m1, m2) = (&minus[l + 1], &minus[l + 2]);
    let mp = LadderPair::from_entry(prob, p);
    let mm = LadderPair::from_entry(prob, m1);
    Ok(SymmetryVerdict {
        level: l as i64,
        alpha: p.alpha == -m1.alpha.clone(),
        beta: p.beta == -m1.beta.clone(),
        delta: p.delta.as_ref() == m2.delta.as_ref(),
        energy: p.energy == m1.energy,
        lambda: p.lambda == &minus[l].lambda + prob.p2() - prob.q1(),
        operators: mp.lower.op_equals(&mm.raise.neg(), prob)
            && mp.raise.op_equals(&mm.lower.neg(), prob),
    })
}
