use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use susyfactor::associated::{
    assoc_bottom_up, assoc_top_down, classify_expanded, AssocFunction, Classification, ExpandedOp,
};
use susyfactor::exact::rational::{serde_fraction, serde_fraction_opt};
use susyfactor::exact::{rat, Rational};
use susyfactor::numeric::quad::{integrate, DEFAULT_TOL};
use susyfactor::numeric::{
    auxiliary_plus, coordinate_maps, orthogonality, potentials, r_from_q1, schrodinger_residual,
    sl_full_susy_residual, sl_transform_type1, sl_transform_type2, FloatPoly, MapKind,
    ResidualSpec,
};
use susyfactor::principal::{
    direct_match_table, factor_table, principal_eigenfunction, rodrigues, FactorEntry,
};
use susyfactor::suite::{run_suite, Perturbation, Status, SuiteOptions};
use susyfactor::{Branch, Error, Poly, Problem};

use crate::error::CliError;
use crate::input::{
    default_anchor, parse_floats, parse_grid, parse_poly_any, parse_rationals, read_sl_csv,
    ProblemArgs,
};
use crate::output::{OutputArgs, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BranchArg {
    Minus,
    Plus,
}

impl From<BranchArg> for Branch {
    fn from(b: BranchArg) -> Self {
        match b {
            BranchArg::Minus => Branch::Minus,
            BranchArg::Plus => Branch::Plus,
        }
    }
}

#[derive(Args, Debug)]
pub struct FactorizeArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// highest level to build
    #[arg(long, default_value_t = 5)]
    pub levels: usize,
    #[arg(long, value_enum, default_value = "minus")]
    pub branch: BranchArg,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Serialize)]
struct FactorizeReport<'a> {
    problem: &'a Problem,
    branch: Branch,
    complete: bool,
    /// recurrence table equals the level-wise closed forms
    direct_match: bool,
    levels: Vec<FactorEntry>,
}

fn factor_rows(levels: &[FactorEntry]) -> Table {
    let f = |r: &Rational| susyfactor::exact::format_rational(r);
    Table {
        headers: ["branch", "l", "alpha", "beta", "delta", "E", "lambda"]
            .map(String::from)
            .to_vec(),
        rows: levels
            .iter()
            .map(|e| {
                vec![
                    e.branch.to_string(),
                    e.level.to_string(),
                    f(&e.alpha),
                    f(&e.beta),
                    e.delta.as_ref().map(f).unwrap_or_default(),
                    f(&e.energy),
                    f(&e.lambda),
                ]
            })
            .collect(),
    }
}

pub fn factorize(a: &FactorizeArgs) -> Result<(), CliError> {
    let prob = a.problem.problem()?;
    let branch: Branch = a.branch.into();
    let (levels, failure) = match factor_table(&prob, branch, a.levels) {
        Ok(t) => (t, None),
        Err(e @ Error::Breakdown { level, .. }) => {
            let partial = usize::try_from(level - 1)
                .ok()
                .map(|top| factor_table(&prob, branch, top))
                .transpose()?
                .unwrap_or_default();
            (partial, Some(e))
        }
        Err(e) => return Err(e.into()),
    };
    let top = levels.iter().map(|e| e.level).max().unwrap_or(-1);
    let direct_match = usize::try_from(top)
        .ok()
        .map(|t| direct_match_table(&prob, branch, t).map(|d| d == levels))
        .transpose()?
        .unwrap_or(levels.is_empty());
    let report = FactorizeReport {
        problem: &prob,
        branch,
        complete: failure.is_none(),
        direct_match,
        levels,
    };
    a.out.emit(&report, Some(factor_rows(&report.levels)))?;
    match failure {
        Some(source) => Err(CliError::Breakdown {
            source,
            partial: serde_json::to_value(&report.levels)?,
        }),
        None => Ok(()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EigenForm {
    Ladder,
    Rodrigues,
    Topdown,
    Bottomup,
}

#[derive(Args, Debug)]
pub struct EigenArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long)]
    pub l: i64,
    /// association level; negative values select the lower ladder
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<i64>,
    #[arg(long, value_enum, default_value = "ladder")]
    pub form: EigenForm,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Serialize)]
struct EigenReport {
    l: i64,
    m: i64,
    form: EigenForm,
    /// coefficients of the polynomial factor, constant term first
    coefficients: Vec<String>,
    /// exponent of p multiplying the polynomial factor
    #[serde(with = "serde_fraction")]
    s: Rational,
    /// exponent of the weight
    #[serde(with = "serde_fraction")]
    e: Rational,
    #[serde(with = "serde_fraction_opt")]
    normsq: Option<Rational>,
    #[serde(with = "serde_fraction")]
    eigenvalue: Rational,
    check: EigenCheck,
}

#[derive(Serialize)]
struct EigenCheck {
    against: EigenForm,
    proportional: bool,
    #[serde(with = "serde_fraction_opt")]
    ratio: Option<Rational>,
}

fn poly_strings(p: &Poly) -> Vec<String> {
    if p.is_zero() {
        return vec!["0".into()];
    }
    p.coeffs()
        .iter()
        .map(susyfactor::exact::format_rational)
        .collect()
}

pub fn eigenfunction(a: &EigenArgs) -> Result<(), CliError> {
    let prob = a.problem.problem()?;
    if a.l < 0 {
        return Err(Error::Range {
            l: a.l,
            m: a.m.unwrap_or(0),
        }
        .into());
    }
    let m = a.m.unwrap_or(0);
    let l = a.l;
    let report = match a.form {
        EigenForm::Ladder | EigenForm::Rodrigues => {
            if m != 0 {
                return Err(CliError::Input(
                    "ladder and rodrigues give principal functions only; use topdown or bottomup with --m".into(),
                ));
            }
            let ladder = principal_eigenfunction(&prob, l as usize)?;
            let rod = rodrigues(&prob, l as usize)?;
            let (mine, other, against) = match a.form {
                EigenForm::Ladder => (&ladder.poly, &rod, EigenForm::Rodrigues),
                _ => (&rod, &ladder.poly, EigenForm::Ladder),
            };
            let ratio = mine.ratio_to(other).filter(|r| *r != rat(0));
            EigenReport {
                l,
                m,
                form: a.form,
                coefficients: poly_strings(mine),
                s: rat(0),
                e: rat(0),
                normsq: (a.form == EigenForm::Ladder).then(|| ladder.normsq.clone()),
                eigenvalue: ladder.lambda.clone(),
                check: EigenCheck {
                    against,
                    proportional: ratio.is_some(),
                    ratio,
                },
            }
        }
        EigenForm::Topdown | EigenForm::Bottomup => {
            let up = assoc_bottom_up(&prob, l, m)?;
            let down = assoc_top_down(&prob, l, m)?;
            let (mine, other, against): (&AssocFunction, &AssocFunction, EigenForm) = match a.form {
                EigenForm::Bottomup => (&up, &down, EigenForm::Topdown),
                _ => (&down, &up, EigenForm::Bottomup),
            };
            let ratio = mine.proportional_to(other, &prob);
            let lambda = susyfactor::associated::assoc_entry(&prob, l, m)?.lambda_lm;
            EigenReport {
                l,
                m,
                form: a.form,
                coefficients: poly_strings(&mine.value.c),
                s: mine.value.s.clone(),
                e: mine.value.e.clone(),
                normsq: Some(mine.normsq.clone()),
                eigenvalue: lambda,
                check: EigenCheck {
                    against,
                    proportional: ratio.is_some(),
                    ratio,
                },
            }
        }
    };
    let table = Table {
        headers: vec!["k".into(), "coefficient".into()],
        rows: report
            .coefficients
            .iter()
            .enumerate()
            .map(|(k, c)| vec![k.to_string(), c.clone()])
            .collect(),
    };
    a.out.emit(&report, Some(table))?;
    if !report.check.proportional {
        return Err(CliError::Identity {
            count: 1,
            failures: json!([{ "identity": "cross_path", "against": report.check.against }]),
        });
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, default_value_t = 8)]
    pub levels: usize,
    /// add AMOUNT to the minus-branch gap at LEVEL: `LEVEL:AMOUNT`
    #[arg(long, allow_hyphen_values = true)]
    pub perturb: Option<String>,
    #[command(flatten)]
    pub out: OutputArgs,
}

fn parse_perturbation(s: &str) -> Result<Perturbation, CliError> {
    let (l, v) = s
        .split_once(':')
        .ok_or_else(|| CliError::Input("--perturb takes LEVEL:AMOUNT".into()))?;
    let level = l
        .trim()
        .parse::<i64>()
        .map_err(|e| CliError::Input(format!("--perturb level: {e}")))?;
    let amount = susyfactor::exact::parse_rational(v.trim())?;
    Ok(Perturbation { level, amount })
}

pub fn verify(a: &VerifyArgs) -> Result<(), CliError> {
    let prob = a.problem.problem()?;
    let opts = SuiteOptions {
        max_level: a.levels,
        perturb: a.perturb.as_deref().map(parse_perturbation).transpose()?,
    };
    let report = run_suite(&prob, &opts);
    let table = Table {
        headers: ["identity", "l", "m", "status", "detail"]
            .map(String::from)
            .to_vec(),
        rows: report
            .checks
            .iter()
            .map(|c| {
                vec![
                    c.identity.clone(),
                    c.l.map(|v| v.to_string()).unwrap_or_default(),
                    c.m.map(|v| v.to_string()).unwrap_or_default(),
                    format!("{:?}", c.status).to_lowercase(),
                    c.detail.clone().unwrap_or_default(),
                ]
            })
            .collect(),
    };
    a.out.emit(&report, Some(table))?;
    if report.all_passed() {
        Ok(())
    } else {
        let failures: Vec<_> = report
            .checks
            .iter()
            .filter(|c| c.status == Status::Fail)
            .collect();
        Err(CliError::Identity {
            count: failures.len(),
            failures: serde_json::to_value(failures)?,
        })
    }
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    /// coefficient of d^2, highest degree first
    #[arg(long, allow_hyphen_values = true, requires_all = ["first", "num", "den"], conflicts_with = "from_levels")]
    pub second: Option<String>,
    /// coefficient of d
    #[arg(long, allow_hyphen_values = true)]
    pub first: Option<String>,
    /// numerator of the zeroth-order term
    #[arg(long, allow_hyphen_values = true)]
    pub num: Option<String>,
    /// denominator of the zeroth-order term
    #[arg(long, allow_hyphen_values = true)]
    pub den: Option<String>,
    /// build the operator from a problem instead: `L,M`
    #[arg(long, allow_hyphen_values = true)]
    pub from_levels: Option<String>,
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Serialize)]
struct ClassifyReport {
    operator: ExpandedOp,
    classification: Classification,
}

pub fn classify(a: &ClassifyArgs) -> Result<(), CliError> {
    let op = match (&a.from_levels, &a.second, &a.first, &a.num, &a.den) {
        (Some(lm), ..) => {
            let v = parse_rationals(lm)?;
            let ints: Option<Vec<i64>> = v
                .iter()
                .map(susyfactor::exact::rational::as_integer)
                .collect();
            let Some([l, m]) = ints.as_deref().and_then(|s| <[i64; 2]>::try_from(s).ok()) else {
                return Err(CliError::Input(
                    "--from-levels takes two integers L,M".into(),
                ));
            };
            ExpandedOp::from_levels(&a.problem.problem()?, l, m)?
        }
        (None, Some(s), Some(f), Some(n), Some(d)) => ExpandedOp {
            second: parse_poly_any(s)?,
            first: parse_poly_any(f)?,
            zeroth_num: parse_poly_any(n)?,
            zeroth_den: parse_poly_any(d)?,
        },
        _ => {
            return Err(CliError::Input(
                "give --second, --first, --num and --den, or --from-levels with a problem".into(),
            ))
        }
    };
    let classification = classify_expanded(&op)?;
    a.out.emit(
        &ClassifyReport {
            operator: op,
            classification,
        },
        None,
    )
}

#[derive(Subcommand, Debug)]
pub enum NumericCmd {
    /// y = ∫dx/p and z = ∫dx/sqrt(p) on a grid
    Maps(MapsArgs),
    /// weights, superpotentials and potentials of a level on a grid
    Potentials(PotentialArgs),
    /// finite-difference residual of a Schrödinger form with refinement order
    Residual(ResidualArgs),
    /// ∫ w Phi_i Phi_j over the natural or given domain
    Orthogonality(OrthoArgs),
    /// w^{-1/2} ∫ w/p and its raising check
    Auxiliary(MapsArgs),
    /// first Sturm–Liouville transform of sampled x,P,Q,R
    Sl1(Sl1Args),
    /// second Sturm–Liouville transform of sampled x,P,Q,R
    Sl2(Sl2Args),
    /// full-factorization residual for sampled x,P,Q,R,Q1
    Slcheck(SlCheckArgs),
}

#[derive(Args, Debug)]
pub struct MapsArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// `a,b,n`: n uniform nodes on [a, b]
    #[arg(long, allow_hyphen_values = true)]
    pub grid: String,
    /// where the maps vanish; defaults to the grid midpoint
    #[arg(long, allow_hyphen_values = true)]
    pub anchor: Option<f64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct PotentialArgs {
    #[command(flatten)]
    pub maps: MapsArgs,
    #[arg(long, default_value_t = 0)]
    pub l: usize,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
    pub m: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormArg {
    Y,
    Z,
}

#[derive(Args, Debug)]
pub struct ResidualArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long)]
    pub l: usize,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
    pub m: i64,
    #[arg(long, value_enum)]
    pub form: FormArg,
    #[arg(long, default_value_t = 2000)]
    pub nodes: usize,
    /// `a,b` in the target coordinate
    #[arg(long, allow_hyphen_values = true)]
    pub range: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub anchor: Option<f64>,
    /// margin kept from the ends of a finite z interval
    #[arg(long, default_value_t = 1e-3)]
    pub inset: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct OrthoArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, default_value_t = 6)]
    pub max_degree: usize,
    /// `a,b`; `inf` and `-inf` allowed. Defaults to the family's domain
    #[arg(long, allow_hyphen_values = true)]
    pub domain: Option<String>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct Sl1Args {
    /// CSV with header x,P,Q,R and optionally psi
    #[arg(long)]
    pub csv: PathBuf,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub lambda: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub energy: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct Sl2Args {
    /// CSV with header x,P,Q,R and optionally psi
    #[arg(long)]
    pub csv: PathBuf,
    /// eigenvalue used for the residual of a supplied psi column
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub lambda: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct SlCheckArgs {
    /// CSV with header x,P,Q,R,Q1
    #[arg(long)]
    pub csv: PathBuf,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub lambda1: f64,
    /// replace R by the one the Q1 column implies, then check
    #[arg(long)]
    pub round_trip: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

pub fn numeric(cmd: &NumericCmd) -> Result<(), CliError> {
    match cmd {
        NumericCmd::Maps(a) => maps(a),
        NumericCmd::Potentials(a) => potentials_cmd(a),
        NumericCmd::Residual(a) => residual(a),
        NumericCmd::Orthogonality(a) => ortho(a),
        NumericCmd::Auxiliary(a) => auxiliary(a),
        NumericCmd::Sl1(a) => sl1(a),
        NumericCmd::Sl2(a) => sl2(a),
        NumericCmd::Slcheck(a) => slcheck(a),
    }
}

fn maps(a: &MapsArgs) -> Result<(), CliError> {
    let prob = a.problem.problem()?;
    let grid = parse_grid(&a.grid)?;
    let anchor = a
        .anchor
        .unwrap_or_else(|| default_anchor(None, Some(&grid)));
    let m = coordinate_maps(&prob, &grid, anchor)?;
    let t = Table::from_columns(vec![
        ("x", Some(&m.x)),
        ("y", Some(&m.y)),
        ("z", m.z.as_deref()),
    ]);
    a.out.emit(&m, Some(t))
}

fn potentials_cmd(a: &PotentialArgs) -> Result<(), CliError> {
    let prob = a.maps.problem.problem()?;
    let grid = parse_grid(&a.maps.grid)?;
    let anchor = a
        .maps
        .anchor
        .unwrap_or_else(|| default_anchor(None, Some(&grid)));
    let p = potentials(&prob, a.l, a.m, &grid, anchor)?;
    let t = Table::from_columns(vec![
        ("x", Some(&p.x)),
        ("w", Some(&p.w)),
        ("y", Some(&p.y)),
        ("z", p.z.as_deref()),
        ("W_l", Some(&p.w_l)),
        ("V_l", Some(&p.v_l)),
        ("V_s", Some(&p.v_s)),
        ("Psi", Some(&p.psi)),
        ("W_a", p.w_a.as_deref()),
        ("V_a", p.v_a.as_deref()),
        ("S_Phi", p.s_phi.as_deref()),
    ]);
    a.maps.out.emit(&p, Some(t))
}

/// Default z interval: up to the neighbouring roots of p (less `inset`), else `±5`.
fn default_z_range(prob: &Problem, anchor: f64, inset: f64) -> Result<(f64, f64), CliError> {
    let roots = susyfactor::numeric::grid::real_roots(prob.p());
    let lo = roots
        .iter()
        .cloned()
        .filter(|r| *r < anchor)
        .fold(f64::NEG_INFINITY, f64::max);
    let hi = roots
        .iter()
        .cloned()
        .filter(|r| *r > anchor)
        .fold(f64::INFINITY, f64::min);
    let p = FloatPoly::from_poly(prob.p());
    let end = |r: f64| -> Result<f64, CliError> {
        if !r.is_finite() {
            return Ok(5.0f64.copysign(r));
        }
        // x = r + (anchor - r) t^2 removes the square-root singularity at a simple root
        let d = anchor - r;
        let g = |t: f64| 2.0 * t * d / p.eval(r + d * t * t).sqrt();
        let z = -integrate(g, 0.0, 1.0, DEFAULT_TOL)?;
        Ok(z - inset * z.signum())
    };
    Ok((end(lo)?, end(hi)?))
}

fn residual(a: &ResidualArgs) -> Result<(), CliError> {
    let prob = a.problem.problem()?;
    let family = a.problem.family()?;
    let anchor = a
        .anchor
        .unwrap_or_else(|| default_anchor(family.as_ref(), None));
    let form = match a.form {
        FormArg::Y => MapKind::Y,
        FormArg::Z => MapKind::Z,
    };
    let range = match (&a.range, form) {
        (Some(r), _) => {
            let v = parse_floats(r, 2, "--range")?;
            (v[0], v[1])
        }
        (None, MapKind::Y) => (-5.0, 5.0),
        (None, MapKind::Z) => default_z_range(&prob, anchor, a.inset)?,
    };
    if a.nodes < 3 {
        return Err(CliError::Input("--nodes must be at least 3".into()));
    }
    let spec = ResidualSpec {
        form,
        l: a.l,
        m: a.m,
        nodes: a.nodes,
        range,
        anchor,
    };
    let report = schrodinger_residual(&prob, &spec)?;
    a.out.emit(&report, None)
}

fn ortho(a: &OrthoArgs) -> Result<(), CliError> {
    let prob = a.problem.problem()?;
    let (lo, hi) = match (&a.domain, a.problem.family()?) {
        (Some(d), _) => {
            let v = parse_floats(d, 2, "--domain")?;
            (v[0], v[1])
        }
        (None, Some(f)) => f.natural_domain(),
        (None, None) => {
            return Err(CliError::Input(
                "--domain is required without --family".into(),
            ))
        }
    };
    let r = orthogonality(&prob, a.max_degree, lo, hi)?;
    a.out.emit(&r, None)
}

fn auxiliary(a: &MapsArgs) -> Result<(), CliError> {
    let prob = a.problem.problem()?;
    let grid = parse_grid(&a.grid)?;
    let anchor = a
        .anchor
        .unwrap_or_else(|| default_anchor(None, Some(&grid)));
    let r = auxiliary_plus(&prob, &grid, anchor)?;
    let t = Table::from_columns(vec![("x", Some(&r.x)), ("psi", Some(&r.psi))]);
    a.out.emit(&r, Some(t))
}

fn sl1(a: &Sl1Args) -> Result<(), CliError> {
    let data = read_sl_csv(&a.csv)?;
    let s = &data.samples;
    let t = sl_transform_type1(s, a.lambda, a.energy);
    let residual = data.column("psi").map(|psi| t.eigen_residual(s, psi));
    let table = Table::from_columns(vec![
        ("x", Some(&t.x)),
        ("rho", Some(&t.rho)),
        ("G", Some(&t.g)),
        ("U", Some(&t.u)),
        ("u", Some(&t.u_map)),
    ]);
    a.out.emit(
        &json!({ "transform": t, "eigen_residual": residual }),
        Some(table),
    )
}

fn sl2(a: &Sl2Args) -> Result<(), CliError> {
    let data = read_sl_csv(&a.csv)?;
    let s = &data.samples;
    let t = sl_transform_type2(s)?;
    let residual = data
        .column("psi")
        .map(|psi| t.eigen_residual(s, psi, a.lambda));
    let table = Table::from_columns(vec![
        ("x", Some(&t.x)),
        ("rho", Some(&t.rho)),
        ("W_rho", Some(&t.w_rho)),
        ("V_rho", Some(&t.v_rho)),
        ("v", Some(&t.v_map)),
    ]);
    a.out.emit(
        &json!({ "transform": t, "eigen_residual": residual }),
        Some(table),
    )
}

fn slcheck(a: &SlCheckArgs) -> Result<(), CliError> {
    let data = read_sl_csv(&a.csv)?;
    let q1 = data
        .column("Q1")
        .ok_or_else(|| CliError::Input("CSV needs a Q1 column".into()))?
        .to_vec();
    let mut s = data.samples.clone();
    if a.round_trip {
        s.r = r_from_q1(&s, &q1, a.lambda1);
    }
    let res = sl_full_susy_residual(&s, &q1, a.lambda1)?;
    let table = Table::from_columns(vec![
        ("x", Some(&s.x)),
        ("R", Some(&s.r)),
        ("Q1", Some(&q1)),
    ]);
    a.out.emit(
        &json!({
            "lambda1": a.lambda1,
            "round_trip": a.round_trip,
            "residual": res,
        }),
        Some(table),
    )
}
