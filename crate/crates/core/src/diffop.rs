//! Linear differential operators `sum_k a_k(x) d^k` with quasi-function
//! coefficients.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::{rat, Poly, Problem, QuasiFunction, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiffOp {
    coeffs: Vec<QuasiFunction>,
}

fn binomial(n: usize, k: usize) -> Rational {
    let mut b = Rational::one();
    for i in 0..k {
        b = b * rat((n - i) as i64) / rat((i + 1) as i64);
    }
    b
}

impl DiffOp {
    pub fn new(mut coeffs: Vec<QuasiFunction>) -> Self {
        while coeffs.last().is_some_and(QuasiFunction::is_zero) {
            coeffs.pop();
        }
        DiffOp { coeffs }
    }

    pub fn zero() -> Self {
        DiffOp { coeffs: Vec::new() }
    }

    pub fn identity() -> Self {
        Self::scalar(Rational::one())
    }

    pub fn scalar(k: Rational) -> Self {
        Self::new(vec![QuasiFunction::constant(k)])
    }

    /// Multiplication by `f`.
    pub fn mul_by(f: QuasiFunction) -> Self {
        Self::new(vec![f])
    }

    pub fn mul_by_poly(f: Poly) -> Self {
        Self::mul_by(QuasiFunction::poly(f))
    }

    /// `d/dx`
    pub fn d() -> Self {
        Self::new(vec![
            QuasiFunction::zero(),
            QuasiFunction::constant(Rational::one()),
        ])
    }

    /// `a d + b`
    pub fn first_order(a: QuasiFunction, b: QuasiFunction) -> Self {
        Self::new(vec![b, a])
    }

    /// `-p d^2 - q d`
    pub fn hypergeometric(prob: &Problem) -> Self {
        Self::new(vec![
            QuasiFunction::zero(),
            QuasiFunction::poly(-prob.q()),
            QuasiFunction::poly(-prob.p()),
        ])
    }

    pub fn coeffs(&self) -> &[QuasiFunction] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> QuasiFunction {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(QuasiFunction::zero)
    }

    /// `None` for the zero operator.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, o: &DiffOp, prob: &Problem) -> DiffOp {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new(
            (0..n)
                .map(|k| self.coeff(k).add(&o.coeff(k), prob))
                .collect(),
        )
    }

    pub fn sub(&self, o: &DiffOp, prob: &Problem) -> DiffOp {
        self.add(&o.neg(), prob)
    }

    pub fn neg(&self) -> DiffOp {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, k: &Rational) -> DiffOp {
        Self::new(self.coeffs.iter().map(|a| a.scale(k)).collect())
    }

    /// `self + k` for a constant `k`.
    pub fn plus_scalar(&self, k: &Rational, prob: &Problem) -> DiffOp {
        self.add(&Self::scalar(k.clone()), prob)
    }

    /// `f * self`
    pub fn left_mul(&self, f: &QuasiFunction, prob: &Problem) -> DiffOp {
        Self::new(self.coeffs.iter().map(|a| a.mul(f, prob)).collect())
    }

    /// Leibniz product `self ∘ o`.
    pub fn compose(&self, o: &DiffOp, prob: &Problem) -> DiffOp {
        if self.is_zero() || o.is_zero() {
            return DiffOp::zero();
        }
        let n = self.coeffs.len() + o.coeffs.len() - 1;
        let mut out = vec![QuasiFunction::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                let mut db = b.clone();
                for k in 0..=i {
                    if db.is_zero() {
                        break;
                    }
                    let term = a.mul(&db, prob).scale(&binomial(i, k));
                    let slot = i - k + j;
                    out[slot] = out[slot].add(&term, prob);
                    db = db.derive(prob);
                }
            }
        }
        Self::new(out)
    }

    pub fn commutator(&self, o: &DiffOp, prob: &Problem) -> DiffOp {
        self.compose(o, prob).sub(&o.compose(self, prob), prob)
    }

    /// `F self F^{-1}` where `F'/F = r`, i.e. every `d` becomes `d - r`.
    pub fn conjugate_logderiv(&self, r: &QuasiFunction, prob: &Problem) -> DiffOp {
        let shifted_d = DiffOp::first_order(QuasiFunction::constant(Rational::one()), r.neg());
        let mut power = DiffOp::identity();
        let mut out = DiffOp::zero();
        for (k, a) in self.coeffs.iter().enumerate() {
            if k > 0 {
                power = power.compose(&shifted_d, prob);
            }
            if !a.is_zero() {
                out = out.add(&power.left_mul(a, prob), prob);
            }
        }
        out
    }

    /// `(p^s w^e) self (p^s w^e)^{-1}`
    pub fn conjugate(&self, s: &Rational, e: &Rational, prob: &Problem) -> DiffOp {
        let dp = prob.dp();
        let num = &dp.scale(s) + &(prob.q() - &dp).scale(e);
        let r = QuasiFunction::new(num, -Rational::one(), Rational::zero(), prob);
        self.conjugate_logderiv(&r, prob)
    }

    pub fn apply(&self, f: &QuasiFunction, prob: &Problem) -> QuasiFunction {
        let mut out = QuasiFunction::zero();
        let mut df = f.clone();
        for (k, a) in self.coeffs.iter().enumerate() {
            if k > 0 {
                df = df.derive(prob);
            }
            if !a.is_zero() && !df.is_zero() {
                out = out.add(&a.mul(&df, prob), prob);
            }
        }
        out
    }

    pub fn apply_poly(&self, f: &Poly, prob: &Problem) -> QuasiFunction {
        self.apply(&QuasiFunction::poly(f.clone()), prob)
    }

    /// Exact operator equality, order by order.
    pub fn op_equals(&self, o: &DiffOp, prob: &Problem) -> bool {
        let n = self.coeffs.len().max(o.coeffs.len());
        (0..n).all(|k| {
            let (a, b) = (self.coeff(k), o.coeff(k));
            a.compatible(&b) && a.sub(&b, prob).is_zero()
        })
    }

    /// The constant value of a zeroth-order operator.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.coeffs.as_slice() {
            [] => Some(Rational::zero()),
            [a] if a.s.is_zero() && a.e.is_zero() && a.c.degree() == Some(0) => Some(a.c.coeff(0)),
            _ => None,
        }
    }
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, a) in self.coeffs.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{a}")?;
            match k {
                0 => {}
                1 => write!(f, " d")?,
                _ => write!(f, " d^{k}")?,
            }
        }
        Ok(())
    }
}
