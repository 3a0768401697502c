use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::rational::to_f64;
use crate::exact::{Poly, Problem};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Uniform { h: f64 },
    Mapped,
}

/// Strictly increasing sample points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    nodes: Vec<f64>,
    spacing: Spacing,
}

impl Grid {
    /// `n` equally spaced nodes on `[a, b]`, endpoints included.
    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Self> {
        if n < 3 || !a.is_finite() || !b.is_finite() || a >= b {
            return Err(Error::Domain(format!(
                "uniform grid needs a < b finite and n >= 3, got [{a}, {b}] with n = {n}"
            )));
        }
        let h = (b - a) / (n - 1) as f64;
        let mut nodes: Vec<f64> = (0..n).map(|i| a + h * i as f64).collect();
        nodes[n - 1] = b;
        Ok(Grid {
            nodes,
            spacing: Spacing::Uniform { h },
        })
    }

    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::Domain("grid needs at least 3 nodes".into()));
        }
        if let Some(bad) = nodes.iter().find(|x| !x.is_finite()) {
            return Err(Error::Domain(format!("non-finite grid node {bad}")));
        }
        if let Some(w) = nodes.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::Domain(format!(
                "grid nodes must increase strictly: {} then {}",
                w[0], w[1]
            )));
        }
        Ok(Grid {
            nodes,
            spacing: Spacing::Mapped,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.nodes[0], self.nodes[self.nodes.len() - 1])
    }
}

/// `f64` copy of a polynomial for fast repeated evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatPoly(pub Vec<f64>);

impl FloatPoly {
    pub fn from_poly(p: &Poly) -> Self {
        FloatPoly(p.coeffs().iter().map(to_f64).collect())
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, a| acc * x + a)
    }

    pub fn derivative(&self) -> Self {
        FloatPoly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, a)| k as f64 * a)
                .collect(),
        )
    }
}

/// Real roots of `p`, in increasing order.
pub fn real_roots(p: &Poly) -> Vec<f64> {
    let c = FloatPoly::from_poly(p).0;
    match c.len() {
        0 | 1 => vec![],
        2 => vec![-c[0] / c[1]],
        _ => {
            let (a, b, cc) = (c[2], c[1], c[0]);
            let disc = b * b - 4.0 * a * cc;
            if disc < 0.0 {
                return vec![];
            }
            // cancellation-free pair
            let q = -0.5 * (b + b.signum() * disc.sqrt());
            let mut r = if q == 0.0 {
                vec![0.0]
            } else {
                vec![q / a, cc / q]
            };
            r.sort_by(f64::total_cmp);
            r.dedup();
            r
        }
    }
}

/// Sign of `p` on `[lo, hi]`, or `SingularGrid` at the first point where it
/// vanishes or changes sign.
pub fn sign_definite(prob: &Problem, lo: f64, hi: f64) -> Result<f64> {
    let p = FloatPoly::from_poly(prob.p());
    for x in [lo, hi] {
        if p.eval(x) == 0.0 {
            return Err(Error::SingularGrid { x });
        }
    }
    if let Some(&r) = real_roots(prob.p()).iter().find(|&&r| lo <= r && r <= hi) {
        return Err(Error::SingularGrid { x: r });
    }
    Ok(p.eval(0.5 * (lo + hi)).signum())
}

/// Checks every node and every gap between them.
pub fn check_grid(prob: &Problem, grid: &Grid) -> Result<f64> {
    let (lo, hi) = grid.bounds();
    sign_definite(prob, lo, hi)
}
