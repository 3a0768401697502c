use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::poly::Poly;
use super::rational::{frac, rat, Rational};
use crate::error::{Error, Result};

/// The operator `-p d^2 - q d` with `deg p <= 2`, `deg q <= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Problem {
    p: Poly,
    q: Poly,
}

impl Problem {
    pub fn new(p: Poly, q: Poly) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::Domain("p must not be the zero polynomial".into()));
        }
        if p.degree() > Some(2) {
            return Err(Error::Domain(format!("deg p must be at most 2, got {p}")));
        }
        if q.degree() > Some(1) {
            return Err(Error::Domain(format!("deg q must be at most 1, got {q}")));
        }
        Ok(Problem { p, q })
    }

    /// From the descending coefficient lists `[a2, a1, a0]` and `[b1, b0]`.
    pub fn from_coeffs(p: [Rational; 3], q: [Rational; 2]) -> Result<Self> {
        let [a2, a1, a0] = p;
        let [b1, b0] = q;
        Self::new(Poly::new(vec![a0, a1, a2]), Poly::new(vec![b0, b1]))
    }

    pub fn p(&self) -> &Poly {
        &self.p
    }

    pub fn q(&self) -> &Poly {
        &self.q
    }

    /// Second derivative of `p`, a constant.
    pub fn p2(&self) -> Rational {
        self.p.coeff(2) * rat(2)
    }

    /// `p'(0)`
    pub fn p1(&self) -> Rational {
        self.p.coeff(1)
    }

    pub fn p0(&self) -> Rational {
        self.p.coeff(0)
    }

    /// Slope of `q`.
    pub fn q1(&self) -> Rational {
        self.q.coeff(1)
    }

    pub fn q0(&self) -> Rational {
        self.q.coeff(0)
    }

    pub fn dp(&self) -> Poly {
        self.p.derivative()
    }

    pub fn is_constant_p(&self) -> bool {
        self.p.degree() == Some(0)
    }

    /// `c_l = (l p'' + q') / 2`
    pub fn c(&self, l: i64) -> Rational {
        (rat(l) * self.p2() + self.q1()) * frac(1, 2)
    }

    /// `d_l = l p'(0) + q(0)`
    pub fn d(&self, l: i64) -> Rational {
        rat(l) * self.p1() + self.q0()
    }

    /// Diagonal entry of the operator on `x^l`: `-l q' - l(l-1) p''/2`.
    pub fn diagonal_eigenvalue(&self, l: i64) -> Rational {
        -(rat(l) * self.q1()) - rat(l * (l - 1)) * self.p2() * frac(1, 2)
    }

    /// The problem with `q` replaced by `q + k p'`.
    pub fn shifted_q(&self, k: &Rational) -> Problem {
        Problem {
            p: self.p.clone(),
            q: &self.q + &self.dp().scale(k),
        }
    }

    pub fn is_zero_q(&self) -> bool {
        self.q.is_zero() || (self.q1().is_zero() && self.q0().is_zero())
    }
}
