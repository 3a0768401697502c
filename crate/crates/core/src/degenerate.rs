//! Constant `p`: the association tower collapses onto the principal one.
//!
//! With `p = p0 > 0`, `x = a t + b` where `a^2 = -2 p0 / q'` turns `H0` into
//! `(-q'/2)(-d^2 + 2t d)` (Hermite) and `a^2 = 2 p0 / q'` turns it into
//! `(q'/2)(-d^2 - 2t d)` (quasi-Hermite).

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::associated::{assoc_bottom_up, assoc_entry, assoc_ladders, delta_plus};
use crate::diffop::DiffOp;
use crate::error::{Branch, Error, Result};
use crate::exact::rational::{rational_sqrt, serde_fraction};
use crate::exact::{rat, Poly, Problem, Rational};
use crate::principal::{ladder_pair, principal_eigenfunction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subcase {
    Hermite,
    QuasiHermite,
    Linear,
    Free,
}

/// Affine map `x = scale * t + shift` to the Hermite or quasi-Hermite variable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scaling {
    Exact {
        #[serde(with = "serde_fraction")]
        scale: Rational,
        #[serde(with = "serde_fraction")]
        shift: Rational,
    },
    /// `scale = sqrt(radicand)` is irrational
    Symbolic {
        #[serde(with = "serde_fraction")]
        radicand: Rational,
        #[serde(with = "serde_fraction")]
        shift: Rational,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegeneracyReport {
    pub is_degenerate: bool,
    pub subcase: Option<Subcase>,
    pub scaling: Option<Scaling>,
    /// quasi-Hermite eigenfunctions grow like `exp(t^2/2)`
    pub normalizable: Option<bool>,
}

pub fn detect(prob: &Problem) -> DegeneracyReport {
    let p0 = prob.p0();
    if !prob.is_constant_p() || !p0.is_positive() {
        return DegeneracyReport {
            is_degenerate: false,
            subcase: None,
            scaling: None,
            normalizable: None,
        };
    }
    let q1 = prob.q1();
    let q0 = prob.q0();
    let (subcase, scaling) = if q1.is_zero() {
        let sub = if q0.is_zero() {
            Subcase::Free
        } else {
            Subcase::Linear
        };
        (sub, None)
    } else {
        let sub = if q1.is_negative() {
            Subcase::Hermite
        } else {
            Subcase::QuasiHermite
        };
        let radicand = rat(2) * &p0 / q1.abs();
        let shift = -&q0 / &q1;
        let scaling = match rational_sqrt(&radicand) {
            Some(scale) => Scaling::Exact { scale, shift },
            None => Scaling::Symbolic { radicand, shift },
        };
        (sub, Some(scaling))
    };
    DegeneracyReport {
        is_degenerate: true,
        subcase: Some(subcase),
        normalizable: Some(subcase == Subcase::Hermite),
        scaling,
    }
}

/// `-d^2 + 2x d`, eigenvalue `2l` on `H_l`.
pub fn hermite_operator() -> Problem {
    Problem::new(Poly::one(), Poly::from_ints(&[0, -2])).expect("valid")
}

/// `-d^2 - 2x d`, eigenvalue `-2l` on the quasi-Hermite polynomials.
pub fn quasi_hermite_operator() -> Problem {
    Problem::new(Poly::one(), Poly::from_ints(&[0, 2])).expect("valid")
}

fn iterate(l: usize, step: impl Fn(&Poly) -> Poly) -> Poly {
    (0..l).fold(Poly::one(), |f, _| step(&f))
}

/// `B^l 1` with `B = -d + 2x`, and the eigenvalue `2l`.
pub fn hermite_generate(l: usize) -> (Poly, Rational) {
    let two_x = Poly::from_ints(&[0, 2]);
    let h = iterate(l, |f| &(&two_x * f) - &f.derivative());
    (h, rat(2 * l as i64))
}

/// `D^l 1` with `D = -d - 2x`, and the eigenvalue `-2l`.
pub fn quasi_hermite_generate(l: usize) -> (Poly, Rational) {
    let two_x = Poly::from_ints(&[0, 2]);
    let h = iterate(l, |f| -&(&f.derivative() + &(&two_x * f)));
    (h, rat(-2 * l as i64))
}

/// Quasi-Hermite coefficients read off `i^l H_l(i x)`: coefficient `k` is
/// `(-1)^((l+k)/2)` times that of `H_l`.
pub fn quasi_hermite_from_hermite(l: usize) -> Poly {
    let (h, _) = hermite_generate(l);
    let coeffs = h
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| {
            if !(l + k).is_multiple_of(2) {
                Rational::zero()
            } else if ((l + k) / 2).is_multiple_of(2) {
                c.clone()
            } else {
                -c
            }
        })
        .collect();
    Poly::new(coeffs)
}

/// `h^+ h - h h^+` for the level-`j` association pair.
pub fn assoc_commutator(prob: &Problem, j: i64) -> DiffOp {
    let (lo, up) = assoc_ladders(prob, j);
    up.compose(&lo, prob).sub(&lo.compose(&up, prob), prob)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseVerdict {
    pub l: i64,
    pub m: i64,
    pub subcase: Subcase,
    /// `lambda_lm = lambda_{l-m}`; `None` when the level table breaks down
    pub eigenvalue_coincidence: Option<bool>,
    /// `Phi_lm` is proportional to `Phi_{l-m}`
    pub eigenfunction_coincidence: Option<bool>,
    /// every `Delta_n` with `n <= l` equals `-q'`
    pub deltas_constant: bool,
    /// association ladders coincide at every level up to `l`
    pub ladders_level_independent: bool,
    /// association commutators equal `-q'` and principal ones `-q' p0`
    pub commutators: bool,
    /// polynomial solutions with eigenvalue zero, for the linear and free subcases
    pub zero_modes: Vec<Poly>,
}

impl CollapseVerdict {
    pub fn passed(&self) -> bool {
        self.eigenvalue_coincidence.unwrap_or(true)
            && self.eigenfunction_coincidence.unwrap_or(true)
            && self.deltas_constant
            && self.ladders_level_independent
            && self.commutators
    }
}

pub fn collapse_check(prob: &Problem, l: i64, m: i64) -> Result<CollapseVerdict> {
    let report = detect(prob);
    let Some(subcase) = report.subcase else {
        return Err(Error::Domain(
            "collapse check needs a constant positive p".into(),
        ));
    };
    if m < 0 || m > l {
        return Err(Error::Range { l, m });
    }
    let q1 = prob.q1();
    let deltas_constant = (1..=l.max(1)).all(|n| delta_plus(prob, n) == -&q1);
    let (lo0, up0) = assoc_ladders(prob, 0);
    let ladders_level_independent = (1..=l).all(|j| {
        let (lo, up) = assoc_ladders(prob, j);
        lo.op_equals(&lo0, prob) && up.op_equals(&up0, prob)
    });
    let assoc_ok = (0..=l).all(|j| assoc_commutator(prob, j).as_constant() == Some(-&q1));

    let (eigenvalue_coincidence, eigenfunction_coincidence, principal_ok, zero_modes) =
        match subcase {
            Subcase::Hermite | Subcase::QuasiHermite => {
                let lam = assoc_entry(prob, l, m)?.lambda_lm;
                let target = principal_eigenfunction(prob, (l - m) as usize)?;
                // with p constant the half powers are constant factors
                let v = assoc_bottom_up(prob, l, m)?.value;
                let func = v.e.is_zero() && v.c.ratio_to(&target.poly).is_some();
                let expect = -&q1 * prob.p0();
                let principal_ok = (0..=l).all(|j| match ladder_pair(prob, Branch::Minus, j) {
                    Ok(pair) => {
                        pair.lower.commutator(&pair.raise, prob).as_constant()
                            == Some(expect.clone())
                    }
                    Err(_) => false,
                });
                (Some(lam == target.lambda), Some(func), principal_ok, vec![])
            }
            Subcase::Linear | Subcase::Free => {
                let h0 = DiffOp::hypergeometric(prob);
                let candidates = if subcase == Subcase::Free {
                    vec![Poly::one(), Poly::x()]
                } else {
                    vec![Poly::one()]
                };
                let modes = candidates
                    .into_iter()
                    .filter(|f| h0.apply_poly(f, prob).is_zero())
                    .collect();
                (None, None, true, modes)
            }
        };
    Ok(CollapseVerdict {
        l,
        m,
        subcase,
        eigenvalue_coincidence,
        eigenfunction_coincidence,
        deltas_constant,
        ladders_level_independent,
        commutators: assoc_ok && principal_ok,
        zero_modes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{frac, QuasiFunction};
    use crate::principal::brute_force_eigen_oracle;

    #[test]
    fn detection() {
        let r = detect(&hermite_operator());
        assert_eq!(r.subcase, Some(Subcase::Hermite));
        assert_eq!(
            r.scaling,
            Some(Scaling::Exact {
                scale: rat(1),
                shift: rat(0)
            })
        );
        assert_eq!(
            detect(&quasi_hermite_operator()).subcase,
            Some(Subcase::QuasiHermite)
        );
        assert_eq!(detect(&quasi_hermite_operator()).normalizable, Some(false));
        let leg = Problem::new(Poly::from_ints(&[1, 0, -1]), Poly::from_ints(&[0, -2])).unwrap();
        assert!(!detect(&leg).is_degenerate);
        let lin = Problem::new(Poly::one(), Poly::from_ints(&[3])).unwrap();
        assert_eq!(detect(&lin).subcase, Some(Subcase::Linear));
        let free = Problem::new(Poly::constant(rat(2)), Poly::zero()).unwrap();
        assert_eq!(detect(&free).subcase, Some(Subcase::Free));
        let odd = Problem::new(Poly::one(), Poly::from_ints(&[1, -1])).unwrap();
        assert_eq!(
            detect(&odd).scaling,
            Some(Scaling::Symbolic {
                radicand: rat(2),
                shift: rat(1)
            })
        );
        let neg = Problem::new(Poly::constant(rat(-1)), Poly::from_ints(&[0, 1])).unwrap();
        assert!(!detect(&neg).is_degenerate);
    }

    #[test]
    fn scaling_maps_to_hermite() {
        // x = a t + b pulled back through H0 gives (-q'/2) times the Hermite operator
        let pr = Problem::new(Poly::constant(rat(2)), Poly::linear(rat(-4), rat(4))).unwrap();
        let Some(Scaling::Exact { scale, shift }) = detect(&pr).scaling else {
            panic!("expected exact scaling")
        };
        assert_eq!((scale.clone(), shift.clone()), (rat(1), rat(1)));
        let (h3, _) = hermite_generate(3);
        let inv = Poly::linear(scale.recip(), -&shift / &scale);
        let pulled = h3.substitute_affine(&inv.coeff(1), &inv.coeff(0));
        let out = DiffOp::hypergeometric(&pr).apply_poly(&pulled, &pr);
        assert_eq!(out, QuasiFunction::poly(pulled.scale(&rat(12))));
    }

    #[test]
    fn hermite_polynomials() {
        assert_eq!(hermite_generate(0).0, Poly::one());
        assert_eq!(hermite_generate(2).0, Poly::from_ints(&[-2, 0, 4]));
        assert_eq!(hermite_generate(3).0, Poly::from_ints(&[0, -12, 0, 8]));
        let pr = hermite_operator();
        for l in 0..8 {
            let (h, lam) = hermite_generate(l);
            let (oracle, olam) = brute_force_eigen_oracle(&pr, l).unwrap();
            assert_eq!(lam, olam);
            assert!(h.ratio_to(&oracle).is_some());
            let applied = DiffOp::hypergeometric(&pr).apply_poly(&h, &pr);
            assert_eq!(applied, QuasiFunction::poly(h.scale(&lam)));
        }
    }

    #[test]
    fn quasi_hermite_polynomials() {
        assert_eq!(quasi_hermite_generate(0).0, Poly::one());
        assert_eq!(quasi_hermite_generate(1).0, Poly::from_ints(&[0, -2]));
        assert_eq!(quasi_hermite_generate(2).0, Poly::from_ints(&[2, 0, 4]));
        let pr = quasi_hermite_operator();
        for l in 0..8 {
            let (h, lam) = quasi_hermite_generate(l);
            let applied = DiffOp::hypergeometric(&pr).apply_poly(&h, &pr);
            assert_eq!(applied, QuasiFunction::poly(h.scale(&lam)));
            assert_eq!(h, quasi_hermite_from_hermite(l));
        }
    }

    #[test]
    fn hermite_collapse() {
        let pr = hermite_operator();
        let v = collapse_check(&pr, 4, 1).unwrap();
        assert!(v.passed(), "{v:?}");
        assert_eq!(assoc_entry(&pr, 4, 1).unwrap().lambda_lm, rat(6));
        // d/dx H4 = 64x^3 - 96x = 8 H3
        let h4 = Poly::from_ints(&[12, 0, -48, 0, 16]);
        assert_eq!(h4.derivative(), hermite_generate(3).0.scale(&rat(8)));
        for l in 0..=6 {
            for m in 0..=l {
                assert!(collapse_check(&pr, l, m).unwrap().passed());
            }
        }
        let scaled =
            Problem::new(Poly::constant(frac(1, 3)), Poly::linear(rat(-1), rat(2))).unwrap();
        assert!(collapse_check(&scaled, 5, 2).unwrap().passed());
        let quasi = quasi_hermite_operator();
        assert!(collapse_check(&quasi, 4, 3).unwrap().passed());
    }

    #[test]
    fn commutator_up_to_ten() {
        for pr in [hermite_operator(), quasi_hermite_operator()] {
            for j in 0..=10 {
                assert_eq!(assoc_commutator(&pr, j).as_constant(), Some(-pr.q1()));
            }
        }
    }

    #[test]
    fn linear_and_free() {
        let lin = Problem::new(Poly::one(), Poly::from_ints(&[3])).unwrap();
        let v = collapse_check(&lin, 0, 0).unwrap();
        assert_eq!(v.zero_modes, vec![Poly::one()]);
        assert!(v.passed());
        let free = Problem::new(Poly::one(), Poly::zero()).unwrap();
        let v = collapse_check(&free, 1, 0).unwrap();
        assert_eq!(v.zero_modes, vec![Poly::one(), Poly::x()]);
    }

    #[test]
    fn classify_reports_degenerate() {
        use crate::associated::{classify_expanded, ExpandedOp};
        let op = ExpandedOp::from_levels(&hermite_operator(), 3, 2).unwrap();
        let c = classify_expanded(&op).unwrap();
        assert!(c.m.is_none());
        assert!(c.note.unwrap().contains("m unidentifiable"));
    }
}
