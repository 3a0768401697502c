//! Quasi-functions `c(x) p(x)^s w(x)^e`, closed under differentiation.
//!
//! The weight `w` never appears explicitly. It is known only through its
//! logarithmic derivative `w'/w = (q - p')/p`, which is all the derivative
//! rule needs.

use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::poly::Poly;
use super::problem::Problem;
use super::rational::{format_rational, pow_i, rational_pow, to_f64, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuasiFunction {
    pub c: Poly,
    #[serde(with = "super::rational::serde_fraction")]
    pub s: Rational,
    #[serde(with = "super::rational::serde_fraction")]
    pub e: Rational,
}

fn floor(r: &Rational) -> i64 {
    r.floor()
        .to_integer()
        .to_i64()
        .expect("exponent out of range")
}

impl QuasiFunction {
    /// Builds and canonicalizes.
    pub fn new(c: Poly, s: Rational, e: Rational, prob: &Problem) -> Self {
        QuasiFunction { c, s, e }.canonicalize(prob)
    }

    pub fn zero() -> Self {
        QuasiFunction {
            c: Poly::zero(),
            s: Rational::zero(),
            e: Rational::zero(),
        }
    }

    /// Wraps a polynomial without canonicalizing; every operation
    /// canonicalizes its output.
    pub fn poly(c: Poly) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        QuasiFunction {
            c,
            s: Rational::zero(),
            e: Rational::zero(),
        }
    }

    pub fn constant(k: Rational) -> Self {
        Self::poly(Poly::constant(k))
    }

    /// `c p^s` with no weight factor.
    pub fn with_power(c: Poly, s: Rational, prob: &Problem) -> Self {
        Self::new(c, s, Rational::zero(), prob)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_zero()
    }

    pub fn canonicalize(mut self, prob: &Problem) -> Self {
        if self.c.is_zero() {
            return Self::zero();
        }
        let p = prob.p();
        // w is identically 1 when q = p'
        if prob.q() == &prob.dp() {
            self.e = Rational::zero();
        }
        if prob.is_constant_p() {
            let p0 = prob.p0();
            if p0.is_one() {
                self.s = Rational::zero();
                return self;
            }
            let k = floor(&self.s);
            if k != 0 {
                self.c = self.c.scale(&pow_i(&p0, k as i32));
                self.s -= Rational::from_integer(k.into());
            }
            if !self.s.is_zero() {
                if let Some(f) = rational_pow(&p0, &self.s) {
                    self.c = self.c.scale(&f);
                    self.s = Rational::zero();
                }
            }
            return self;
        }
        loop {
            let (q, r) = self.c.div_rem(p);
            if !r.is_zero() {
                break;
            }
            self.c = q;
            self.s += Rational::one();
        }
        self
    }

    pub fn derive(&self, prob: &Problem) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let p = prob.p();
        let dp = prob.dp();
        let mut c = &self.c.derivative() * p;
        if !self.s.is_zero() {
            c = &c + &(&self.c * &dp).scale(&self.s);
        }
        if !self.e.is_zero() {
            let log_w = prob.q() - &dp;
            c = &c + &(&self.c * &log_w).scale(&self.e);
        }
        Self::new(c, &self.s - Rational::one(), self.e.clone(), prob)
    }

    pub fn derive_n(&self, n: usize, prob: &Problem) -> Self {
        (0..n).fold(self.clone(), |f, _| f.derive(prob))
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() || self.is_zero() {
            return Self::zero();
        }
        QuasiFunction {
            c: self.c.scale(k),
            s: self.s.clone(),
            e: self.e.clone(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn mul(&self, o: &Self, prob: &Problem) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        Self::new(&self.c * &o.c, &self.s + &o.s, &self.e + &o.e, prob)
    }

    pub fn mul_poly(&self, a: &Poly, prob: &Problem) -> Self {
        Self::new(&self.c * a, self.s.clone(), self.e.clone(), prob)
    }

    /// Multiplies by `p^k`.
    pub fn shift_power(&self, k: &Rational, prob: &Problem) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Self::new(self.c.clone(), &self.s + k, self.e.clone(), prob)
    }

    /// Drops the weight factor.
    pub fn without_weight(&self, prob: &Problem) -> Self {
        Self::new(self.c.clone(), self.s.clone(), Rational::zero(), prob)
    }

    /// Sum of two quasi-functions of the same class.
    ///
    /// # Panics
    /// When the weight exponents differ or the `p` exponents differ by a
    /// non-integer; such a sum leaves the class.
    pub fn add(&self, o: &Self, prob: &Problem) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        assert!(
            self.e == o.e,
            "cannot add quasi-functions with weight exponents {} and {}",
            self.e,
            o.e
        );
        let gap = &self.s - &o.s;
        assert!(
            gap.is_integer(),
            "cannot add quasi-functions with p-exponents {} and {}",
            self.s,
            o.s
        );
        let (lo, hi) = if gap.is_negative() {
            (self, o)
        } else {
            (o, self)
        };
        let n = gap.abs().to_integer().to_usize().expect("exponent gap");
        let lifted = &hi.c * &prob.p().pow(n);
        Self::new(&lo.c + &lifted, lo.s.clone(), lo.e.clone(), prob)
    }

    pub fn sub(&self, o: &Self, prob: &Problem) -> Self {
        self.add(&o.neg(), prob)
    }

    /// True when `self` and `o` lie in a common class, so `add` is defined.
    pub fn compatible(&self, o: &Self) -> bool {
        self.is_zero() || o.is_zero() || (self.e == o.e && (&self.s - &o.s).is_integer())
    }

    /// `k` with `self = k * other`.
    pub fn ratio_to(&self, o: &Self, prob: &Problem) -> Option<Rational> {
        let a = self.clone().canonicalize(prob);
        let b = o.clone().canonicalize(prob);
        if a.s != b.s || a.e != b.e {
            return None;
        }
        a.c.ratio_to(&b.c)
    }

    pub fn eval_f64(&self, prob: &Problem, x: f64, w: f64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let mut v = self.c.eval_f64(x);
        if !self.s.is_zero() {
            v *= prob.p().eval_f64(x).powf(to_f64(&self.s));
        }
        if !self.e.is_zero() {
            v *= w.powf(to_f64(&self.e));
        }
        v
    }
}

impl fmt::Display for QuasiFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.c)?;
        if !self.s.is_zero() {
            write!(f, " p^({})", format_rational(&self.s))?;
        }
        if !self.e.is_zero() {
            write!(f, " w^({})", format_rational(&self.e))?;
        }
        Ok(())
    }
}
