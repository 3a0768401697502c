//! Named presets for the classical equations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::rational::{format_rational, parse_rational};
use crate::exact::{rat, Poly, Problem, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Legendre,
    Jacobi {
        #[serde(with = "crate::exact::rational::serde_fraction")]
        alpha: Rational,
        #[serde(with = "crate::exact::rational::serde_fraction")]
        beta: Rational,
    },
    Laguerre {
        #[serde(with = "crate::exact::rational::serde_fraction")]
        alpha: Rational,
    },
    Hermite,
    /// Euler's equation `x(1-x) y'' + [c - (a+b+1) x] y' - a b y = 0`
    Hypergeom {
        #[serde(with = "crate::exact::rational::serde_fraction")]
        a: Rational,
        #[serde(with = "crate::exact::rational::serde_fraction")]
        b: Rational,
        #[serde(with = "crate::exact::rational::serde_fraction")]
        c: Rational,
    },
    /// Kummer's equation `x y'' + (m - x) y' - a y = 0`
    Confluent {
        #[serde(with = "crate::exact::rational::serde_fraction")]
        m: Rational,
    },
}

impl Family {
    /// Parses `legendre`, `jacobi:α,β`, `laguerre:α`, `hermite`,
    /// `hypergeom:a,b,c` or `confluent:m`.
    pub fn parse(s: &str) -> Result<Self> {
        let (name, args) = match s.split_once(':') {
            Some((n, a)) => (
                n,
                a.split(',')
                    .map(parse_rational)
                    .collect::<Result<Vec<_>>>()?,
            ),
            None => (s, Vec::new()),
        };
        let want = |n: usize| -> Result<()> {
            if args.len() == n {
                Ok(())
            } else {
                Err(Error::Parse(format!(
                    "{name} takes {n} parameter(s), got {}",
                    args.len()
                )))
            }
        };
        let a = |i: usize| args[i].clone();
        Ok(match name.trim().to_ascii_lowercase().as_str() {
            "legendre" => {
                want(0)?;
                Family::Legendre
            }
            "jacobi" => {
                want(2)?;
                Family::Jacobi {
                    alpha: a(0),
                    beta: a(1),
                }
            }
            "laguerre" => {
                if args.is_empty() {
                    Family::Laguerre { alpha: rat(0) }
                } else {
                    want(1)?;
                    Family::Laguerre { alpha: a(0) }
                }
            }
            "hermite" => {
                want(0)?;
                Family::Hermite
            }
            "hypergeom" => {
                want(3)?;
                Family::Hypergeom {
                    a: a(0),
                    b: a(1),
                    c: a(2),
                }
            }
            "confluent" => {
                want(1)?;
                Family::Confluent { m: a(0) }
            }
            other => return Err(Error::Parse(format!("unknown family {other:?}"))),
        })
    }

    pub fn problem(&self) -> Problem {
        let (p, q) = match self {
            Family::Legendre => (Poly::from_ints(&[1, 0, -1]), Poly::from_ints(&[0, -2])),
            Family::Jacobi { alpha, beta } => (
                Poly::from_ints(&[1, 0, -1]),
                Poly::linear(-(alpha + beta + rat(2)), beta - alpha),
            ),
            Family::Laguerre { alpha } => (Poly::x(), Poly::linear(rat(-1), alpha + rat(1))),
            Family::Hermite => (Poly::one(), Poly::from_ints(&[0, -2])),
            Family::Hypergeom { a, b, c } => (
                Poly::from_ints(&[0, -1, 1]),
                Poly::linear(a + b + rat(1), -c.clone()),
            ),
            Family::Confluent { m } => (Poly::x(), Poly::linear(rat(-1), m.clone())),
        };
        Problem::new(p, q).expect("preset coefficients are valid")
    }

    /// Interval on which the weight makes the polynomials orthogonal; ends may be infinite.
    pub fn natural_domain(&self) -> (f64, f64) {
        match self {
            Family::Legendre | Family::Jacobi { .. } => (-1.0, 1.0),
            Family::Laguerre { .. } | Family::Confluent { .. } => (0.0, f64::INFINITY),
            Family::Hermite => (f64::NEG_INFINITY, f64::INFINITY),
            Family::Hypergeom { .. } => (0.0, 1.0),
        }
    }

    pub fn name(&self) -> String {
        let f = format_rational;
        match self {
            Family::Legendre => "legendre".into(),
            Family::Jacobi { alpha, beta } => format!("jacobi:{},{}", f(alpha), f(beta)),
            Family::Laguerre { alpha } => format!("laguerre:{}", f(alpha)),
            Family::Hermite => "hermite".into(),
            Family::Hypergeom { a, b, c } => format!("hypergeom:{},{},{}", f(a), f(b), f(c)),
            Family::Confluent { m } => format!("confluent:{}", f(m)),
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::frac;

    #[test]
    fn parse_round_trip() {
        for s in [
            "legendre",
            "jacobi:1/2,3",
            "laguerre:-1/2",
            "hermite",
            "hypergeom:-3,2,1/2",
            "confluent:3/2",
        ] {
            assert_eq!(Family::parse(s).unwrap().name(), s);
        }
        assert_eq!(
            Family::parse("laguerre").unwrap(),
            Family::Laguerre { alpha: rat(0) }
        );
        assert!(Family::parse("jacobi:1").is_err());
        assert!(Family::parse("chebyshev").is_err());
        assert!(Family::parse("jacobi:1,x").is_err());
    }

    #[test]
    fn jacobi_reduces_to_legendre() {
        let j = Family::Jacobi {
            alpha: rat(0),
            beta: rat(0),
        }
        .problem();
        assert_eq!(j, Family::Legendre.problem());
    }

    #[test]
    fn diagonal_eigenvalues() {
        let jac = Family::Jacobi {
            alpha: frac(1, 2),
            beta: rat(2),
        };
        for n in 0..6i64 {
            let expect = rat(n) * (rat(n) + frac(7, 2));
            assert_eq!(jac.problem().diagonal_eigenvalue(n), expect);
        }
        let conf = Family::Confluent { m: frac(3, 2) }.problem();
        assert_eq!(conf.diagonal_eigenvalue(4), rat(4));
        // a = -3: lambda_3 = a b
        let hyp = Family::Hypergeom {
            a: rat(-3),
            b: frac(5, 2),
            c: rat(1),
        }
        .problem();
        assert_eq!(hyp.diagonal_eigenvalue(3), rat(-3) * frac(5, 2));
    }
}
