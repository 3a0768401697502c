use std::path::Path;

use clap::Args;
use susyfactor::exact::{parse_rational, Rational};
use susyfactor::numeric::{Grid, SlSamples};
use susyfactor::{Family, Poly, Problem};

use crate::error::CliError;

/// `(p, q)` from explicit coefficients or a named family.
#[derive(Args, Debug, Clone)]
pub struct ProblemArgs {
    /// p coefficients, highest degree first: a2,a1,a0
    #[arg(
        long,
        allow_hyphen_values = true,
        requires = "q",
        conflicts_with = "family"
    )]
    pub p: Option<String>,
    /// q coefficients, highest degree first: b1,b0
    #[arg(long, allow_hyphen_values = true, requires = "p")]
    pub q: Option<String>,
    /// legendre | jacobi:a,b | laguerre:a | hermite | hypergeom:a,b,c | confluent:m
    #[arg(long)]
    pub family: Option<String>,
}

impl ProblemArgs {
    pub fn family(&self) -> Result<Option<Family>, CliError> {
        Ok(self.family.as_deref().map(Family::parse).transpose()?)
    }

    pub fn problem(&self) -> Result<Problem, CliError> {
        if let Some(f) = self.family()? {
            return Ok(f.problem());
        }
        match (&self.p, &self.q) {
            (Some(p), Some(q)) => {
                let p = parse_poly_desc(p, 3, "--p")?;
                let q = parse_poly_desc(q, 2, "--q")?;
                Ok(Problem::new(p, q)?)
            }
            _ => Err(CliError::Input("give --family or both --p and --q".into())),
        }
    }
}

/// Comma-separated rationals, highest degree first, padded on the left to `len`.
pub fn parse_poly_desc(s: &str, max_len: usize, flag: &str) -> Result<Poly, CliError> {
    let mut c = parse_rationals(s)?;
    if c.is_empty() || c.len() > max_len {
        return Err(CliError::Input(format!(
            "{flag} takes 1 to {max_len} coefficients"
        )));
    }
    c.reverse();
    Ok(Poly::new(c))
}

pub fn parse_rationals(s: &str) -> Result<Vec<Rational>, CliError> {
    Ok(s.split(',')
        .map(|t| parse_rational(t.trim()))
        .collect::<susyfactor::Result<Vec<_>>>()?)
}

/// Free-form polynomial input with any number of coefficients, highest degree first.
pub fn parse_poly_any(s: &str) -> Result<Poly, CliError> {
    let mut c = parse_rationals(s)?;
    c.reverse();
    Ok(Poly::new(c))
}

pub fn parse_floats(s: &str, n: usize, flag: &str) -> Result<Vec<f64>, CliError> {
    let v = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Input(format!("{flag}: {e}")))?;
    if v.len() != n {
        return Err(CliError::Input(format!(
            "{flag} takes {n} comma-separated numbers"
        )));
    }
    Ok(v)
}

/// `a,b,n` for `n` uniform nodes on `[a, b]`.
pub fn parse_grid(s: &str) -> Result<Grid, CliError> {
    let v = parse_floats(s, 3, "--grid")?;
    if v[2] < 3.0 || v[2].fract() != 0.0 {
        return Err(CliError::Input(
            "--grid node count must be an integer >= 3".into(),
        ));
    }
    Ok(Grid::uniform(v[0], v[1], v[2] as usize)?)
}

/// Anchor for maps and weights: the family's domain midpoint, else 0.
pub fn default_anchor(family: Option<&Family>, grid: Option<&Grid>) -> f64 {
    if let Some(g) = grid {
        let (a, b) = g.bounds();
        return 0.5 * (a + b);
    }
    match family.map(Family::natural_domain) {
        Some((a, b)) if a.is_finite() && b.is_finite() => 0.5 * (a + b),
        Some((a, _)) if a.is_finite() => a + 1.0,
        Some((_, b)) if b.is_finite() => b - 1.0,
        _ => 0.0,
    }
}

/// Rows of `x,P,Q,R` plus any extra named columns (e.g. `psi`, `Q1`).
pub struct SlCsv {
    pub samples: SlSamples,
    pub extra: Vec<(String, Vec<f64>)>,
}

impl SlCsv {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.extra
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }
}

pub fn read_sl_csv(path: &Path) -> Result<SlCsv, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Input(format!("CSV header must contain {name}")))
    };
    let idx = [find("x")?, find("P")?, find("Q")?, find("R")?];
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); headers.len()];
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        for (j, field) in rec.iter().enumerate() {
            let v = field.parse::<f64>().map_err(|e| {
                CliError::Input(format!("row {}, column {}: {e}", row + 2, headers[j]))
            })?;
            cols[j].push(v);
        }
    }
    let take = |i: usize| cols[i].clone();
    let samples = SlSamples::new(take(idx[0]), take(idx[1]), take(idx[2]), take(idx[3]))?;
    let extra = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| !idx.contains(i))
        .map(|(i, h)| (h.clone(), take(i)))
        .collect();
    Ok(SlCsv { samples, extra })
}
