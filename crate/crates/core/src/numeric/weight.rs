//! The weight `w = exp(∫ (q - p')/p)` as a float function.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exact::rational::{rational_sqrt, to_f64};
use crate::exact::{frac, rat, Problem, Rational};
use crate::numeric::grid::{sign_definite, FloatPoly, Grid};
use crate::numeric::quad::{integrate, DEFAULT_TOL};

/// Closed forms come from partial fractions of `(q - p')/p` when the roots of
/// `p` are rational.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum WeightFn {
    /// `exp(a x^2 + b x)`
    Gaussian { a: f64, b: f64 },
    /// `exp(c x) |x - r|^k`
    ExpPower { c: f64, r: f64, k: f64 },
    /// `|x - r1|^k1 |x - r2|^k2`
    TwoPowers { r1: f64, k1: f64, r2: f64, k2: f64 },
    /// `|x - r|^k exp(-d/(x - r))`
    DoubleRoot { r: f64, k: f64, d: f64 },
    /// `exp(∫_reference^x (q - p')/p)` by quadrature
    Quadrature {
        num: Vec<f64>,
        den: Vec<f64>,
        reference: f64,
    },
}

impl WeightFn {
    /// `reference` fixes the normalization of the quadrature form (`w = 1` there).
    pub fn new(prob: &Problem, reference: f64) -> Self {
        let num = prob.q() - &prob.dp();
        let (n1, n0) = (num.coeff(1), num.coeff(0));
        let a2 = prob.p().coeff(2);
        let a1 = prob.p().coeff(1);
        let a0 = prob.p().coeff(0);
        let at = |r: &Rational| &n1 * r + &n0;
        let f = to_f64;
        if prob.is_constant_p() {
            return WeightFn::Gaussian {
                a: f(&(&n1 * frac(1, 2) / &a0)),
                b: f(&(&n0 / &a0)),
            };
        }
        if a2 == rat(0) {
            let r = -&a0 / &a1;
            return WeightFn::ExpPower {
                c: f(&(&n1 / &a1)),
                k: f(&(at(&r) / &a1)),
                r: f(&r),
            };
        }
        let disc = &a1 * &a1 - rat(4) * &a2 * &a0;
        if let Some(sq) = rational_sqrt(&disc) {
            let two_a = &a2 * rat(2);
            let r1 = (-&a1 - &sq) / &two_a;
            let r2 = (-&a1 + &sq) / &two_a;
            if r1 == r2 {
                // (q - p')/p = n1/(a2 (x-r)) + N(r)/(a2 (x-r)^2)
                return WeightFn::DoubleRoot {
                    k: f(&(&n1 / &a2)),
                    d: f(&(at(&r1) / &a2)),
                    r: f(&r1),
                };
            }
            let k1 = at(&r1) / (&a2 * (&r1 - &r2));
            let k2 = at(&r2) / (&a2 * (&r2 - &r1));
            return WeightFn::TwoPowers {
                r1: f(&r1),
                k1: f(&k1),
                r2: f(&r2),
                k2: f(&k2),
            };
        }
        WeightFn::Quadrature {
            num: FloatPoly::from_poly(&num).0,
            den: FloatPoly::from_poly(prob.p()).0,
            reference,
        }
    }

    pub fn log_eval(&self, x: f64) -> Result<f64> {
        Ok(match self {
            WeightFn::Gaussian { a, b } => a * x * x + b * x,
            WeightFn::ExpPower { c, r, k } => c * x + k * (x - r).abs().ln(),
            WeightFn::TwoPowers { r1, k1, r2, k2 } => {
                k1 * (x - r1).abs().ln() + k2 * (x - r2).abs().ln()
            }
            WeightFn::DoubleRoot { r, k, d } => k * (x - r).abs().ln() - d / (x - r),
            WeightFn::Quadrature {
                num,
                den,
                reference,
            } => {
                let n = FloatPoly(num.clone());
                let p = FloatPoly(den.clone());
                integrate(|t| n.eval(t) / p.eval(t), *reference, x, DEFAULT_TOL)?
            }
        })
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.log_eval(x).map(f64::exp)
    }
}

/// `w` sampled on the grid; the quadrature form is normalized at the grid midpoint.
pub fn weight_numeric(prob: &Problem, grid: &Grid) -> Result<Vec<f64>> {
    let (lo, hi) = grid.bounds();
    sign_definite(prob, lo, hi)?;
    let wf = WeightFn::new(prob, 0.5 * (lo + hi));
    grid.nodes().iter().map(|&x| wf.eval(x)).collect()
}
