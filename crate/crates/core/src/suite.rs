//! Runs every exact identity check on one problem and collects verdicts.

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::associated::{
    assoc_shape_invariance, assoc_three_term, ph_m_factorization, principal_form_equivalence,
    standard_hermitian_relation, verify_associated,
};
use crate::degenerate::{collapse_check, detect, DegeneracyReport};
use crate::error::{Branch, Error, Result};
use crate::exact::rational::serde_fraction;
use crate::exact::{Problem, Rational};
use crate::principal::{
    branch_symmetry_check, brute_force_eigen_oracle, direct_match_table, entry_at,
    equivalent_forms_check, factor_table, factorization_residual, lowering_check,
    principal_eigenfunction, rodrigues, shape_invariance_residual, three_term_check,
};

/// Adds `amount` to the minus-branch gap at `level` before the shape-invariance check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Perturbation {
    pub level: i64,
    #[serde(with = "serde_fraction")]
    pub amount: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteOptions {
    pub max_level: usize,
    pub perturb: Option<Perturbation>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            max_level: 8,
            perturb: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// the check does not apply, e.g. a branch breaks down below the level
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub identity: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<i64>,
    pub status: Status,
    /// residual on failure, reason when skipped
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub problem: Problem,
    pub max_level: usize,
    pub degeneracy: DegeneracyReport,
    pub checks: Vec<Check>,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }
}

#[derive(Clone, Copy, Debug)]
enum Job {
    TableMatch(Branch),
    ShapeInvariance(Branch, i64),
    Factorization(Branch, i64),
    ThreeTerm(i64),
    Lowering(i64),
    Equivalence(i64),
    Symmetry(i64),
    Oracle(i64),
    Rodrigues(i64),
    Associated(i64, i64),
    AssocThreeTerm(i64, i64),
    PrincipalForm(i64, i64),
    Phm(i64, i64),
    AssocShape(i64),
    Hermitian(i64),
    Collapse(i64, i64),
}

impl Job {
    fn name(&self) -> String {
        match self {
            Job::TableMatch(b) => format!("table_match_{b}"),
            Job::ShapeInvariance(b, _) => format!("shape_invariance_{b}"),
            Job::Factorization(b, _) => format!("factorization_{b}"),
            Job::ThreeTerm(_) => "three_term".into(),
            Job::Lowering(_) => "lowering".into(),
            Job::Equivalence(_) => "equivalent_forms".into(),
            Job::Symmetry(_) => "branch_symmetry".into(),
            Job::Oracle(_) => "oracle".into(),
            Job::Rodrigues(_) => "rodrigues".into(),
            Job::Associated(..) => "associated".into(),
            Job::AssocThreeTerm(..) => "associated_three_term".into(),
            Job::PrincipalForm(..) => "principal_form".into(),
            Job::Phm(..) => "ph_m_factorization".into(),
            Job::AssocShape(_) => "associated_shape_invariance".into(),
            Job::Hermitian(_) => "standard_hermitian".into(),
            Job::Collapse(..) => "collapse".into(),
        }
    }

    fn levels(&self) -> (Option<i64>, Option<i64>) {
        match *self {
            Job::TableMatch(_) => (None, None),
            Job::ShapeInvariance(_, l)
            | Job::Factorization(_, l)
            | Job::ThreeTerm(l)
            | Job::Lowering(l)
            | Job::Equivalence(l)
            | Job::Symmetry(l)
            | Job::Oracle(l)
            | Job::Rodrigues(l)
            | Job::Hermitian(l) => (Some(l), None),
            Job::AssocShape(n) => (None, Some(n)),
            Job::Associated(l, m)
            | Job::AssocThreeTerm(l, m)
            | Job::PrincipalForm(l, m)
            | Job::Phm(l, m)
            | Job::Collapse(l, m) => (Some(l), Some(m)),
        }
    }

    /// `Ok(None)` passes, `Ok(Some(residual))` fails.
    fn run(&self, prob: &Problem, opts: &SuiteOptions) -> Result<Option<String>> {
        let verdict = |ok: bool, what: &dyn Fn() -> String| if ok { None } else { Some(what()) };
        let max = opts.max_level;
        Ok(match *self {
            Job::TableMatch(b) => {
                let t = factor_table(prob, b, max)?;
                let d = direct_match_table(prob, b, max)?;
                let bad = t.iter().zip(&d).find(|(x, y)| x != y);
                verdict(bad.is_none() && t.len() == d.len(), &|| match bad {
                    Some((x, y)) => format!("recurrence {x:?} vs direct {y:?}"),
                    None => format!("lengths {} vs {}", t.len(), d.len()),
                })
            }
            Job::ShapeInvariance(b, l) => {
                let table = factor_table(prob, b, (l + 1).max(0) as usize)?;
                let mut delta =
                    entry_at(&table, l)
                        .and_then(|e| e.delta.clone())
                        .ok_or(Error::Breakdown {
                            branch: b,
                            level: l + 1,
                        })?;
                if let Some(p) = opts
                    .perturb
                    .as_ref()
                    .filter(|p| b == Branch::Minus && p.level == l)
                {
                    delta += &p.amount;
                }
                let r = shape_invariance_residual(prob, b, l, &delta)?;
                verdict(r.is_zero(), &|| r.to_string())
            }
            Job::Factorization(b, l) => {
                let r = factorization_residual(prob, b, l)?;
                verdict(r.is_zero(), &|| r.to_string())
            }
            Job::ThreeTerm(l) => {
                let (a, b) = three_term_check(prob, l as usize)?;
                verdict(a.is_zero() && b.is_zero(), &|| format!("{a}; {b}"))
            }
            Job::Lowering(l) => verdict(lowering_check(prob, l as usize)?, &|| {
                "lowered function not proportional".into()
            }),
            Job::Equivalence(l) => {
                let v = equivalent_forms_check(prob, l as usize)?;
                verdict(v.passed(), &|| format!("{v:?}"))
            }
            Job::Symmetry(l) => {
                let v = branch_symmetry_check(prob, l as usize)?;
                verdict(v.passed(), &|| format!("{v:?}"))
            }
            Job::Oracle(l) => {
                let (poly, lambda) = brute_force_eigen_oracle(prob, l as usize)?;
                let e = principal_eigenfunction(prob, l as usize)?;
                let ok = lambda == e.lambda && poly.ratio_to(&e.poly).is_some_and(|r| !r.is_zero());
                verdict(ok, &|| {
                    format!(
                        "oracle ({poly}, {lambda}) vs ladder ({}, {})",
                        e.poly, e.lambda
                    )
                })
            }
            Job::Rodrigues(l) => {
                let r = rodrigues(prob, l as usize)?;
                let e = principal_eigenfunction(prob, l as usize)?;
                verdict(r.ratio_to(&e.poly).is_some_and(|k| !k.is_zero()), &|| {
                    format!("rodrigues {r} vs ladder {}", e.poly)
                })
            }
            Job::Associated(l, m) => {
                let v = verify_associated(prob, l, m)?;
                verdict(v.passed(), &|| format!("{v:?}"))
            }
            Job::AssocThreeTerm(l, m) => {
                let (a, b) = assoc_three_term(prob, l, m)?;
                verdict(a.is_zero() && b.is_zero(), &|| format!("{a}; {b}"))
            }
            Job::PrincipalForm(l, m) => {
                let v = principal_form_equivalence(prob, l, m)?;
                verdict(v.passed(), &|| format!("{v:?}"))
            }
            Job::Phm(l, m) => {
                let v = ph_m_factorization(prob, l, m)?;
                verdict(v.identity && v.quadratic_cancels, &|| format!("{v:?}"))
            }
            Job::AssocShape(n) => {
                let r = assoc_shape_invariance(prob, n)?;
                verdict(r.is_zero(), &|| r.to_string())
            }
            Job::Hermitian(l) => verdict(standard_hermitian_relation(prob, l)?, &|| {
                "conjugated forms differ".into()
            }),
            Job::Collapse(l, m) => {
                let v = collapse_check(prob, l, m)?;
                verdict(v.passed(), &|| format!("{v:?}"))
            }
        })
    }
}

fn jobs(max: i64, degenerate: bool) -> Vec<Job> {
    let mut out = vec![
        Job::TableMatch(Branch::Minus),
        Job::TableMatch(Branch::Plus),
    ];
    for l in 0..=max {
        if l >= 1 {
            out.push(Job::ShapeInvariance(Branch::Minus, l));
        }
        if l < max {
            out.push(Job::ShapeInvariance(Branch::Plus, l - 1));
            out.push(Job::ThreeTerm(l));
        }
        out.push(Job::Factorization(Branch::Minus, l));
        out.push(Job::Factorization(Branch::Plus, l - 1));
        out.extend([
            Job::Lowering(l),
            Job::Equivalence(l),
            Job::Symmetry(l),
            Job::Oracle(l),
            Job::Rodrigues(l),
            Job::Hermitian(l),
        ]);
        for m in 0..=l {
            out.extend([
                Job::Associated(l, m),
                Job::AssocThreeTerm(l, m),
                Job::PrincipalForm(l, m),
                Job::Phm(l, m),
            ]);
            if degenerate {
                out.push(Job::Collapse(l, m));
            }
        }
        if l >= 1 {
            out.push(Job::AssocShape(l));
            out.push(Job::AssocShape(-l));
        }
    }
    out
}

pub fn run_suite(prob: &Problem, opts: &SuiteOptions) -> SuiteReport {
    let degeneracy = detect(prob);
    let checks: Vec<Check> = jobs(opts.max_level as i64, degeneracy.is_degenerate)
        .par_iter()
        .map(|job| {
            let (l, m) = job.levels();
            let (status, detail) = match job.run(prob, opts) {
                Ok(None) => (Status::Pass, None),
                Ok(Some(r)) => (Status::Fail, Some(r)),
                Err(e @ (Error::Breakdown { .. } | Error::OracleDegenerate { .. })) => {
                    (Status::Skipped, Some(e.to_string()))
                }
                Err(e) => (Status::Fail, Some(e.to_string())),
            };
            Check {
                identity: job.name(),
                l,
                m,
                status,
                detail,
            }
        })
        .collect();
    let count = |s: Status| checks.iter().filter(|c| c.status == s).count();
    SuiteReport {
        problem: prob.clone(),
        max_level: opts.max_level,
        degeneracy,
        passed: count(Status::Pass),
        failed: count(Status::Fail),
        skipped: count(Status::Skipped),
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::families::Family;

    #[test]
    fn legendre_passes() {
        let r = run_suite(
            &Family::Legendre.problem(),
            &SuiteOptions {
                max_level: 5,
                perturb: None,
            },
        );
        let fails: Vec<_> = r.failures().collect();
        assert!(fails.is_empty(), "{fails:?}");
        assert_eq!(r.skipped, 0);
    }

    #[test]
    fn perturbation_is_targeted() {
        let opts = SuiteOptions {
            max_level: 4,
            perturb: Some(Perturbation {
                level: 3,
                amount: rat(1),
            }),
        };
        let r = run_suite(&Family::Legendre.problem(), &opts);
        let fails: Vec<_> = r.failures().collect();
        assert_eq!(fails.len(), 1);
        assert_eq!(fails[0].identity, "shape_invariance_minus");
        assert_eq!(fails[0].l, Some(3));
        assert_eq!(fails[0].detail.as_deref(), Some("(-1)"));
    }

    #[test]
    fn hermite_includes_collapse() {
        let r = run_suite(
            &Family::Hermite.problem(),
            &SuiteOptions {
                max_level: 4,
                perturb: None,
            },
        );
        assert!(r.all_passed(), "{:?}", r.failures().collect::<Vec<_>>());
        assert!(r.checks.iter().any(|c| c.identity == "collapse"));
    }
}
