//! Association levels: the `sqrt(p)` ladder tower built on top of `H0`.
//!
//! For `m >= 0` the level-`m` operator factorizes as `H_m = h_m h_m^+` with
//!
//! ```text
//! h_m^+ = sqrt(p) d - m sqrt(p)'
//! h_m   = -sqrt(p) d + 2 W0a - m sqrt(p)'     W0a = (p'/4 - q/2) / sqrt(p)
//! ```
//!
//! Negative levels use their own pair, `g_{-m} = -sqrt(p) d + m sqrt(p)'` and
//! `g_{-m}^+ = sqrt(p) d - 2 W0a + m sqrt(p)'`, with `H_{-m} = g_{-m}^+ g_{-m}`.
//! Half powers of `p` live in the exponent of the quasi-function class.

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::diffop::DiffOp;
use crate::error::{Branch, Error, Result};
use crate::exact::rational::{
    as_integer, rational_pow, rational_sqrt, serde_fraction, serde_fraction_vec,
};
use crate::exact::{frac, rat, Poly, Problem, QuasiFunction, Rational};
use crate::principal::{factor_table, principal_eigenfunction, LadderPair};

fn sqrt_p(prob: &Problem) -> QuasiFunction {
    QuasiFunction::with_power(Poly::one(), frac(1, 2), prob)
}

/// `(sqrt p)' = p' / (2 sqrt p)`
fn sqrt_p_prime(prob: &Problem) -> QuasiFunction {
    QuasiFunction::with_power(prob.dp().scale(&frac(1, 2)), frac(-1, 2), prob)
}

/// `W0a = (p'/4 - q/2) p^{-1/2}`
pub fn superpotential_w0a(prob: &Problem) -> QuasiFunction {
    let num = &prob.dp().scale(&frac(1, 4)) - &prob.q().scale(&frac(1, 2));
    QuasiFunction::with_power(num, frac(-1, 2), prob)
}

/// `(left, right)` with `H_m = left ∘ right`; for `m >= 0` these are
/// `(h_m, h_m^+)`, for `m < 0` they are `(g_m^+, g_m)`.
pub fn assoc_ladders(prob: &Problem, m: i64) -> (DiffOp, DiffOp) {
    if m < 0 {
        return negative_ladders(prob, -m);
    }
    let sp = sqrt_p(prob);
    let dsp = sqrt_p_prime(prob);
    let two_w0a = superpotential_w0a(prob).scale(&rat(2));
    let k = rat(m);
    let lower = DiffOp::first_order(sp.neg(), two_w0a.sub(&dsp.scale(&k), prob));
    let raise = DiffOp::first_order(sp, dsp.scale(&-k));
    (lower, raise)
}

/// `(g_{-k}^+, g_{-k})` for `k >= 0`, including the level-zero pair
/// `g_0 = -sqrt(p) d` and `g_0^+ = sqrt(p) d - 2 W0a`.
pub fn negative_ladders(prob: &Problem, k: i64) -> (DiffOp, DiffOp) {
    let sp = sqrt_p(prob);
    let dsp = sqrt_p_prime(prob).scale(&rat(k));
    let two_w0a = superpotential_w0a(prob).scale(&rat(2));
    let down = DiffOp::first_order(sp.neg(), dsp.clone());
    let up = DiffOp::first_order(sp, dsp.sub(&two_w0a, prob));
    (up, down)
}

/// `H_m` composed from its ladder pair.
pub fn assoc_operator(prob: &Problem, m: i64) -> DiffOp {
    let (a, b) = assoc_ladders(prob, m);
    a.compose(&b, prob)
}

/// `H0 + [(m/2) p'' p + (m/2)(q - p') p' + (m/2)^2 p'^2] / p` with `m -> |m|`.
pub fn h_a_expanded(prob: &Problem, m: i64) -> DiffOp {
    let k = rat(m.abs());
    let p = prob.p();
    let dp = prob.dp();
    let num = &(&p.scale(&(prob.p2() * &k * frac(1, 2)))
        + &(&(prob.q() - &dp) * &dp).scale(&(&k * frac(1, 2))))
        + &(&dp * &dp).scale(&(&k * &k * frac(1, 4)));
    let extra = QuasiFunction::with_power(num, -Rational::one(), prob);
    DiffOp::hypergeometric(prob).add(&DiffOp::mul_by(extra), prob)
}

/// `Delta_n = -q' - (n-1) p''`
pub fn delta_plus(prob: &Problem, n: i64) -> Rational {
    -prob.q1() - rat(n - 1) * prob.p2()
}

/// `lambda_l` from the closed form `-l q' - l(l-1) p''/2`.
pub fn lambda_principal(prob: &Problem, l: i64) -> Rational {
    prob.diagonal_eigenvalue(l)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssocEntry {
    pub l: i64,
    pub m: i64,
    #[serde(with = "serde_fraction")]
    pub lambda_lm: Rational,
    #[serde(with = "serde_fraction_vec")]
    pub deltas: Vec<Rational>,
}

fn check_range(l: i64, m: i64) -> Result<()> {
    if l < 0 || m.abs() > l {
        return Err(Error::Range { l, m });
    }
    Ok(())
}

pub fn assoc_entry(prob: &Problem, l: i64, m: i64) -> Result<AssocEntry> {
    check_range(l, m)?;
    let k = m.abs();
    Ok(AssocEntry {
        l,
        m,
        lambda_lm: lambda_principal(prob, l) - lambda_principal(prob, k),
        deltas: (1..=k).map(|n| delta_plus(prob, n)).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssocFunction {
    pub l: i64,
    pub m: i64,
    pub value: QuasiFunction,
    /// Squared-norm ratio to the seed of the path that built this function,
    /// a product of `lambda_lj`.
    #[serde(with = "serde_fraction")]
    pub normsq: Rational,
}

impl AssocFunction {
    /// The polynomial `g` with `value = p^{|m|/2} g`.
    pub fn polynomial_part(&self, prob: &Problem) -> Option<Poly> {
        if self.value.is_zero() {
            return Some(Poly::zero());
        }
        if !self.value.e.is_zero() {
            return None;
        }
        let rest = &self.value.s - frac(self.m.abs(), 2);
        if prob.is_constant_p() {
            let k = rational_pow(&prob.p0(), &rest)?;
            return Some(self.value.c.scale(&k));
        }
        if !rest.is_integer() || rest.is_negative() {
            return None;
        }
        let k = rest.to_integer().to_usize()?;
        Some(&self.value.c * &prob.p().pow(k))
    }

    pub fn proportional_to(&self, other: &AssocFunction, prob: &Problem) -> Option<Rational> {
        self.value.ratio_to(&other.value, prob)
    }
}

/// Raises `Phi_l` level by level with `h_j^+` (or `g_{-j}` for negative `m`).
pub fn assoc_bottom_up(prob: &Problem, l: i64, m: i64) -> Result<AssocFunction> {
    check_range(l, m)?;
    let base = principal_eigenfunction(prob, l as usize)?;
    Ok(bottom_up_from(prob, l, m, QuasiFunction::poly(base.poly)))
}

fn bottom_up_from(prob: &Problem, l: i64, m: i64, seed: QuasiFunction) -> AssocFunction {
    let mut f = seed.canonicalize(prob);
    let mut normsq = Rational::one();
    for j in 0..m.abs() {
        let step = if m < 0 {
            negative_ladders(prob, j).1
        } else {
            assoc_ladders(prob, j).1
        };
        f = step.apply(&f, prob);
        normsq *= lambda_principal(prob, l) - lambda_principal(prob, j);
    }
    AssocFunction {
        l,
        m,
        value: f,
        normsq,
    }
}

/// `sign w^{-1} p^{-|m|/2} d^{l-|m|} (w p^l)` with sign `(-1)^(l-m)` for
/// `m >= 0` and `(-1)^l` for `m < 0`.
pub fn assoc_top_down(prob: &Problem, l: i64, m: i64) -> Result<AssocFunction> {
    check_range(l, m)?;
    let k = m.abs();
    let seed = QuasiFunction::new(Poly::one(), rat(l), Rational::one(), prob);
    let d = seed.derive_n((l - k) as usize, prob);
    let unweighted = QuasiFunction::new(d.c, d.s, &d.e - Rational::one(), prob);
    let flip = if m >= 0 { (l - m) % 2 != 0 } else { l % 2 != 0 };
    let mut value = unweighted.shift_power(&frac(-k, 2), prob);
    if flip {
        value = value.neg();
    }
    let normsq = (k..l).fold(Rational::one(), |acc, j| {
        acc * (lambda_principal(prob, l) - lambda_principal(prob, j))
    });
    Ok(AssocFunction {
        l,
        m,
        value,
        normsq,
    })
}

/// Lowers from `Phi_ll = p^{l/2}` with `h_j`; the operator form of the top-down path.
pub fn assoc_top_down_iterated(prob: &Problem, l: i64, m: i64) -> Result<AssocFunction> {
    check_range(l, m)?;
    let k = m.abs();
    let mut f = QuasiFunction::with_power(Poly::one(), frac(l, 2), prob);
    for j in (k..l).rev() {
        f = assoc_ladders(prob, j).0.apply(&f, prob);
    }
    if m < 0 && k % 2 == 1 {
        f = f.neg();
    }
    let normsq = (k..l).fold(Rational::one(), |acc, j| {
        acc * (lambda_principal(prob, l) - lambda_principal(prob, j))
    });
    Ok(AssocFunction {
        l,
        m,
        value: f,
        normsq,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssocVerdict {
    pub l: i64,
    pub m: i64,
    /// ladder product equals the expanded operator
    pub expansion: bool,
    /// `H_m Phi_lm = lambda_lm Phi_lm`
    pub eigen: bool,
    /// `H_{-m} Phi_{l,-m} = lambda_lm Phi_{l,-m}`
    pub negative_eigen: bool,
    /// `Phi_{l,-m} = (-1)^m Phi_lm`
    pub sign_relation: bool,
    /// `H_{-m}` and `H_m` coincide as operators
    pub mirror_operator: bool,
    /// bottom-up and top-down results are proportional
    pub paths_agree: bool,
    /// polynomial part has degree `l - |m|`
    pub degree: bool,
    /// `h_l^+ Phi_ll = 0`, only checked at `m = l`
    pub annihilation: Option<bool>,
}

impl AssocVerdict {
    pub fn passed(&self) -> bool {
        self.expansion
            && self.eigen
            && self.negative_eigen
            && self.sign_relation
            && self.mirror_operator
            && self.paths_agree
            && self.degree
            && self.annihilation.unwrap_or(true)
    }
}

fn eigen_holds(op: &DiffOp, f: &QuasiFunction, lambda: &Rational, prob: &Problem) -> bool {
    op.apply(f, prob).sub(&f.scale(lambda), prob).is_zero()
}

/// Checks level `|m|` against principal level `l`, both signs of `m`.
pub fn verify_associated(prob: &Problem, l: i64, m: i64) -> Result<AssocVerdict> {
    check_range(l, m)?;
    let k = m.abs();
    let lambda = assoc_entry(prob, l, k)?.lambda_lm;
    let base = principal_eigenfunction(prob, l as usize)?;
    let seed = QuasiFunction::poly(base.poly);
    let pos = bottom_up_from(prob, l, k, seed.clone());
    let neg = bottom_up_from(prob, l, -k, seed);
    let h_pos = assoc_operator(prob, k);
    let h_neg = assoc_operator(prob, -k);
    let expansion = h_pos.op_equals(&h_a_expanded(prob, k), prob);
    let sign = if k % 2 == 0 { rat(1) } else { rat(-1) };
    let top = assoc_top_down(prob, l, k)?;
    let degree = pos
        .polynomial_part(prob)
        .and_then(|g| g.degree())
        .is_some_and(|d| d as i64 == l - k);
    let annihilation = (k == l).then(|| {
        let (_, raise) = assoc_ladders(prob, l);
        raise.apply(&pos.value, prob).is_zero()
    });
    Ok(AssocVerdict {
        l,
        m,
        expansion,
        eigen: eigen_holds(&h_pos, &pos.value, &lambda, prob),
        negative_eigen: eigen_holds(&h_neg, &neg.value, &lambda, prob),
        sign_relation: neg.value == pos.value.scale(&sign),
        mirror_operator: h_neg.op_equals(&h_pos, prob),
        paths_agree: top.proportional_to(&pos, prob).is_some(),
        degree,
        annihilation,
    })
}

/// `h_{n-1}^+ h_{n-1} - h_n h_n^+ - Delta_n` for `n >= 1`; for `n <= -1`
/// the descending form `g_{n+1} g_{n+1}^+ - g_n^+ g_n - Delta_{|n|}`.
pub fn assoc_shape_invariance(prob: &Problem, n: i64) -> Result<DiffOp> {
    if n == 0 {
        return Err(Error::Domain("shape invariance needs n != 0".into()));
    }
    let delta = delta_plus(prob, n.abs());
    let (lhs, rhs) = if n > 0 {
        let (lo, up) = assoc_ladders(prob, n - 1);
        (up.compose(&lo, prob), assoc_operator(prob, n))
    } else {
        let (up, down) = negative_ladders(prob, -(n + 1));
        let prev = down.compose(&up, prob);
        (prev, assoc_operator(prob, n))
    };
    Ok(lhs.sub(&rhs, prob).plus_scalar(&-delta, prob))
}

/// Residuals of the two association-level three-term relations at `m`:
///
/// ```text
/// Phi_{m+1} = -[2(m-1) sqrt(p)' + q/sqrt(p)] Phi_m - lambda_{l,m-1} Phi_{m-1}
/// Phi_{m+1} = [2 sqrt(p) d - 2 sqrt(p)' + q/sqrt(p)] Phi_m + lambda_{l,m-1} Phi_{m-1}
/// ```
///
/// At `m = 0` both relations collapse to `Phi_{l,1} + Phi_{l,-1} = 0`.
pub fn assoc_three_term(prob: &Problem, l: i64, m: i64) -> Result<(QuasiFunction, QuasiFunction)> {
    if m < 0 || m > l {
        return Err(Error::Range { l, m });
    }
    let base = QuasiFunction::poly(principal_eigenfunction(prob, l as usize)?.poly);
    if m == 0 {
        if l == 0 {
            return Ok((QuasiFunction::zero(), QuasiFunction::zero()));
        }
        let up = bottom_up_from(prob, l, 1, base.clone()).value;
        let down = bottom_up_from(prob, l, -1, base).value;
        let r = up.add(&down, prob);
        return Ok((r.clone(), r));
    }
    let prev = bottom_up_from(prob, l, m - 1, base.clone()).value;
    let cur = bottom_up_from(prob, l, m, base.clone()).value;
    let next = assoc_ladders(prob, m).1.apply(&cur, prob);
    let lam = assoc_entry(prob, l, m - 1)?.lambda_lm;
    let dsp = sqrt_p_prime(prob);
    let q_over = QuasiFunction::with_power(prob.q().clone(), frac(-1, 2), prob);

    let coef1 = dsp.scale(&rat(2 * (m - 1))).add(&q_over, prob).neg();
    let r1 = next
        .sub(&coef1.mul(&cur, prob), prob)
        .add(&prev.scale(&lam), prob);

    let op2 = DiffOp::first_order(
        sqrt_p(prob).scale(&rat(2)),
        q_over.sub(&dsp.scale(&rat(2)), prob),
    );
    let r2 = next
        .sub(&op2.apply(&cur, prob), prob)
        .sub(&prev.scale(&lam), prob);
    Ok((r1, r2))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrincipalFormVerdict {
    pub l: i64,
    pub m: i64,
    /// `h_{2m} h_0^+` is `H0` with `q -> q + m p'`
    pub substitution: bool,
    /// `p^{-m/2} Phi_lm` solves the substituted problem with eigenvalue `lambda_lm`
    pub eigen: bool,
    /// agrees with the substituted problem's own level `l - m` eigenpair
    pub cross_validated: bool,
    /// conjugation by `w^{1/2} p^{(2m+1)/4}` gives `(-sqrt(p) d + W)(sqrt(p) d + W)`
    pub supersymmetric: bool,
}

impl PrincipalFormVerdict {
    pub fn passed(&self) -> bool {
        self.substitution && self.eigen && self.cross_validated && self.supersymmetric
    }
}

pub fn principal_form_equivalence(prob: &Problem, l: i64, m: i64) -> Result<PrincipalFormVerdict> {
    check_range(l, m)?;
    let k = m.abs();
    let shifted = prob.shifted_q(&rat(k));
    let (lower_2m, _) = assoc_ladders(prob, 2 * k);
    let (_, raise_0) = assoc_ladders(prob, 0);
    let product = lower_2m.compose(&raise_0, prob);
    let substitution = product.op_equals(&DiffOp::hypergeometric(&shifted), prob);

    let lambda = assoc_entry(prob, l, k)?.lambda_lm;
    let phi = assoc_bottom_up(prob, l, k)?
        .value
        .shift_power(&frac(-k, 2), prob);
    let h_shift = DiffOp::hypergeometric(&shifted);
    let eigen = eigen_holds(&h_shift, &phi, &lambda, prob);
    let cross_validated = match principal_eigenfunction(&shifted, (l - k) as usize) {
        Ok(e) => e.lambda == lambda && phi.ratio_to(&QuasiFunction::poly(e.poly), prob).is_some(),
        Err(_) => false,
    };

    let conj = product.conjugate(&frac(2 * k + 1, 4), &frac(1, 2), prob);
    let kk = &prob.dp().scale(&(rat(k) - frac(1, 2))) + prob.q();
    let w = QuasiFunction::with_power(kk.scale(&frac(-1, 2)), frac(-1, 2), prob);
    let sp = sqrt_p(prob);
    let left = DiffOp::first_order(sp.neg(), w.clone());
    let right = DiffOp::first_order(sp, w);
    let supersymmetric = conj.op_equals(&left.compose(&right, prob), prob);

    Ok(PrincipalFormVerdict {
        l,
        m,
        substitution,
        eigen,
        cross_validated,
        supersymmetric,
    })
}

/// `second d^2 + first d + num/den`, the input to [`classify_expanded`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpandedOp {
    pub second: Poly,
    pub first: Poly,
    pub zeroth_num: Poly,
    pub zeroth_den: Poly,
}

impl ExpandedOp {
    /// `H_m - lambda_lm` for the given problem and levels.
    pub fn from_levels(prob: &Problem, l: i64, m: i64) -> Result<Self> {
        let lambda = assoc_entry(prob, l, m)?.lambda_lm;
        let k = rat(m.abs());
        let p = prob.p();
        let dp = prob.dp();
        let num = &(&(&p.scale(&(prob.p2() * &k * frac(1, 2)))
            + &(&(prob.q() - &dp) * &dp).scale(&(&k * frac(1, 2))))
            + &(&dp * &dp).scale(&(&k * &k * frac(1, 4))))
            - &p.scale(&lambda);
        Ok(ExpandedOp {
            second: -p,
            first: -prob.q(),
            zeroth_num: num,
            zeroth_den: p.clone(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub problem: Problem,
    /// `None` when the association level cannot be read off
    pub m: Option<i64>,
    pub l: Option<i64>,
    #[serde(with = "crate::exact::rational::serde_fraction_opt")]
    pub lambda_lm: Option<Rational>,
    /// every admissible `(l, m)` pair when more than one fits
    pub candidates: Vec<(i64, i64)>,
    pub note: Option<String>,
}

/// Solves `a x = b` over the rationals, returning a particular solution and a
/// nullspace basis.
fn solve_linear(
    a: Vec<Vec<Rational>>,
    b: Vec<Rational>,
) -> Option<(Vec<Rational>, Vec<Vec<Rational>>)> {
    let rows = a.len();
    let cols = a[0].len();
    let mut m: Vec<Vec<Rational>> = a
        .into_iter()
        .zip(b)
        .map(|(mut r, v)| {
            r.push(v);
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pr);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..=cols {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if m[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][cols].clone();
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let null = free
        .iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (i, &c) in pivots.iter().enumerate() {
                v[c] = -m[i][f].clone();
            }
            v
        })
        .collect();
    Some((x, null))
}

fn nonneg_int(r: &Rational) -> Option<i64> {
    as_integer(r).filter(|v| *v >= 0)
}

/// Rational roots of `a t^2 + b t + c`, or `None` when every `t` solves it.
fn rational_roots(a: &Rational, b: &Rational, c: &Rational) -> Option<Vec<Rational>> {
    if a.is_zero() {
        if b.is_zero() {
            return if c.is_zero() { None } else { Some(vec![]) };
        }
        return Some(vec![-c / b]);
    }
    let disc = b * b - rat(4) * a * c;
    if disc.is_negative() {
        return Some(vec![]);
    }
    let Some(sq) = rational_sqrt(&disc) else {
        return Some(vec![]);
    };
    let two_a = rat(2) * a;
    let mut v = vec![(-b + &sq) / &two_a, (-b - &sq) / &two_a];
    v.dedup();
    Some(v)
}

/// Recovers `(p, q)`, `m` and `l` from an expanded `H_m - lambda_lm`.
pub fn classify_expanded(op: &ExpandedOp) -> Result<Classification> {
    let prob = Problem::new(-&op.second, -&op.first)?;
    if op.zeroth_den.is_zero() {
        return Err(Error::Classify("zero denominator".into()));
    }
    let t = (&op.zeroth_num * prob.p())
        .exact_div(&op.zeroth_den)
        .map_err(|_| Error::Classify("zeroth-order term is not a polynomial over p".into()))?;
    if t.degree() > Some(2) {
        return Err(Error::Classify(
            "zeroth-order numerator has degree above 2".into(),
        ));
    }
    let p = prob.p().clone();
    let dp = prob.dp();
    if dp.is_zero() {
        return Ok(Classification {
            problem: prob,
            m: None,
            l: None,
            lambda_lm: None,
            candidates: vec![],
            note: Some("degenerate: m unidentifiable (p is constant)".into()),
        });
    }
    let a_term = (&p.scale(&prob.p2()) + &(&(prob.q() - &dp) * &dp)).scale(&frac(1, 2));
    let b_term = (&dp * &dp).scale(&frac(1, 4));
    let neg_p = -&p;
    let matrix: Vec<Vec<Rational>> = (0..3)
        .map(|k| vec![a_term.coeff(k), b_term.coeff(k), neg_p.coeff(k)])
        .collect();
    let rhs: Vec<Rational> = (0..3).map(|k| t.coeff(k)).collect();
    let Some((x0, null)) = solve_linear(matrix, rhs) else {
        return Err(Error::Classify(
            "no association level fits the zeroth-order term".into(),
        ));
    };
    // (m, mu = m^2, lambda)
    let mut solutions: Vec<(i64, Rational)> = Vec::new();
    match null.len() {
        0 => {
            if x0[1] == &x0[0] * &x0[0] {
                if let Some(m) = nonneg_int(&x0[0].abs()) {
                    solutions.push((m, x0[2].clone()));
                }
            }
        }
        1 => {
            let n = &null[0];
            let qa = &n[0] * &n[0];
            let qb = rat(2) * &x0[0] * &n[0] - &n[1];
            let qc = &x0[0] * &x0[0] - &x0[1];
            match rational_roots(&qa, &qb, &qc) {
                Some(ts) => {
                    for tt in ts {
                        let m = &x0[0] + &tt * &n[0];
                        if let Some(mi) = nonneg_int(&m.abs()) {
                            solutions.push((mi, &x0[2] + &tt * &n[2]));
                        }
                    }
                }
                None => {
                    return Ok(Classification {
                        problem: prob,
                        m: None,
                        l: None,
                        lambda_lm: None,
                        candidates: vec![],
                        note: Some("m unidentifiable: level terms are not independent".into()),
                    })
                }
            }
        }
        _ => {
            return Ok(Classification {
                problem: prob,
                m: None,
                l: None,
                lambda_lm: None,
                candidates: vec![],
                note: Some("m unidentifiable: level terms are not independent".into()),
            })
        }
    }
    solutions.sort();
    solutions.dedup();
    if solutions.is_empty() {
        return Err(Error::Classify("no integer association level fits".into()));
    }
    let mut candidates = Vec::new();
    for (m, lambda) in &solutions {
        // lambda_l = lambda + lambda_m; -(p''/2) l^2 + (p''/2 - q') l - target = 0
        let target = lambda + lambda_principal(&prob, *m);
        let a = -prob.p2() * frac(1, 2);
        let b = prob.p2() * frac(1, 2) - prob.q1();
        match rational_roots(&a, &b, &-target) {
            Some(roots) => {
                for r in roots {
                    if let Some(l) = nonneg_int(&r).filter(|l| l >= m) {
                        candidates.push((l, *m));
                    }
                }
            }
            None => {
                return Ok(Classification {
                    problem: prob,
                    m: Some(*m),
                    l: None,
                    lambda_lm: Some(lambda.clone()),
                    candidates: vec![],
                    note: Some("l unidentifiable: every level shares the eigenvalue".into()),
                })
            }
        }
    }
    candidates.sort();
    candidates.dedup();
    match candidates.as_slice() {
        [] => Err(Error::Classify("no integer principal level fits".into())),
        [(l, m)] => {
            let lambda = solutions
                .iter()
                .find(|(mm, _)| mm == m)
                .map(|(_, lam)| lam.clone());
            Ok(Classification {
                problem: prob,
                m: Some(*m),
                l: Some(*l),
                lambda_lm: lambda,
                candidates: vec![(*l, *m)],
                note: None,
            })
        }
        many => Ok(Classification {
            problem: prob,
            m: None,
            l: None,
            lambda_lm: None,
            candidates: many.to_vec(),
            note: Some("ambiguous: several (l, m) pairs fit".into()),
        }),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhmFactorization {
    pub l: i64,
    pub m: i64,
    #[serde(with = "serde_fraction")]
    pub shift: Rational,
    #[serde(rename = "E_lm", with = "serde_fraction")]
    pub energy: Rational,
    /// the quadratic terms cancel on both sides
    pub quadratic_cancels: bool,
    pub identity: bool,
}

/// `p H_m - lambda_lm p + E_lm = (raise_l + C)(lower_l + C)` with the
/// minus-branch ladders of level `l`.
pub fn ph_m_factorization(prob: &Problem, l: i64, m: i64) -> Result<PhmFactorization> {
    check_range(l, m)?;
    let k = m.abs();
    let table = factor_table(prob, Branch::Minus, l as usize)?;
    let e = &table[l as usize];
    let kr = rat(k);
    let shift = if k == 0 {
        Rational::zero()
    } else {
        let c = prob.c(l - 1);
        if c.is_zero() {
            return Err(Error::Breakdown {
                branch: Branch::Minus,
                level: l,
            });
        }
        &kr * frac(1, 4) * (prob.p1() * prob.q1() - prob.p2() * prob.q0()) / c
    };
    let energy = &e.energy
        + &shift * (&shift + rat(2) * &e.beta)
        + &kr * (prob.q1() + rat(k - 2) * prob.p2() * frac(1, 2)) * prob.p0()
        - &kr * frac(1, 2) * (prob.q0() + rat(k - 2) * prob.p1() * frac(1, 2)) * prob.p1();
    let lambda = assoc_entry(prob, l, k)?.lambda_lm;
    let p = QuasiFunction::poly(prob.p().clone());
    let lhs = h_a_expanded(prob, k)
        .left_mul(&p, prob)
        .sub(&DiffOp::mul_by(p.scale(&lambda)), prob)
        .plus_scalar(&energy, prob);
    let pair = LadderPair::from_entry(prob, e);
    let rhs = pair
        .raise
        .plus_scalar(&shift, prob)
        .compose(&pair.lower.plus_scalar(&shift, prob), prob);
    let diff = lhs.sub(&rhs, prob);
    let quadratic_cancels = diff
        .coeff(0)
        .clone()
        .canonicalize(prob)
        .c
        .degree()
        .is_none_or(|d| d < 2 || !diff.coeff(0).s.is_zero());
    Ok(PhmFactorization {
        l,
        m,
        shift,
        energy,
        quadratic_cancels,
        identity: diff.is_zero(),
    })
}

/// `T(raise_l lower_l)` against `P^{-1}[p S(H0)] - lambda_l p + E_l`, where `T`
/// conjugates by `w^{1/2}`, `S` by `p^{1/4} w^{1/2}` and `P` by `p^{1/4}`.
pub fn standard_hermitian_relation(prob: &Problem, l: i64) -> Result<bool> {
    let table = factor_table(prob, Branch::Minus, l.max(0) as usize)?;
    let e = &table[l as usize];
    let pair = LadderPair::from_entry(prob, e);
    let half = frac(1, 2);
    let quarter = frac(1, 4);
    let lhs = pair
        .raise
        .compose(&pair.lower, prob)
        .conjugate(&Rational::zero(), &half, prob);
    let p = QuasiFunction::poly(prob.p().clone());
    let s_h0 = DiffOp::hypergeometric(prob).conjugate(&quarter, &half, prob);
    let rhs = s_h0
        .left_mul(&p, prob)
        .conjugate(&-quarter, &Rational::zero(), prob)
        .sub(&DiffOp::mul_by(p.scale(&e.lambda)), prob)
        .plus_scalar(&e.energy, prob);
    Ok(lhs.op_equals(&rhs, prob))
}
