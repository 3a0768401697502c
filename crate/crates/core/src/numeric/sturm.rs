//! Sturm–Liouville operators `-P d^2 - Q d - R` on sampled data: the two
//! Schrödinger-form transforms and the full-factorization check.
//!
//! Derivatives use the three-point stencil of [`crate::numeric::fd`], so
//! quadratic `P` and linear `G` are differentiated without truncation error.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::fd::{cumulative_trapezoid, derivative, max_abs};
use crate::numeric::grid::Grid;

/// Coefficients of `-P d^2 - Q d - R` sampled on strictly increasing nodes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlSamples {
    pub x: Vec<f64>,
    #[serde(rename = "P")]
    pub p: Vec<f64>,
    #[serde(rename = "Q")]
    pub q: Vec<f64>,
    #[serde(rename = "R")]
    pub r: Vec<f64>,
}

impl SlSamples {
    pub fn new(x: Vec<f64>, p: Vec<f64>, q: Vec<f64>, r: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n < 3 || p.len() != n || q.len() != n || r.len() != n {
            return Err(Error::Domain("need at least 3 rows of x, P, Q, R".into()));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("x must be strictly increasing".into()));
        }
        if let Some(v) = x
            .iter()
            .chain(&p)
            .chain(&q)
            .chain(&r)
            .find(|v| !v.is_finite())
        {
            return Err(Error::Domain(format!("non-finite sample {v}")));
        }
        let sign = p[0].signum();
        if let Some(i) = p.iter().position(|&v| v == 0.0 || v.signum() != sign) {
            return Err(Error::SingularGrid { x: x[i] });
        }
        Ok(SlSamples { x, p, q, r })
    }

    pub fn from_fns(
        grid: &Grid,
        p: impl Fn(f64) -> f64,
        q: impl Fn(f64) -> f64,
        r: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let x = grid.nodes().to_vec();
        let col = |f: &dyn Fn(f64) -> f64| x.iter().map(|&t| f(t)).collect::<Vec<_>>();
        let (pv, qv, rv) = (col(&p), col(&q), col(&r));
        SlSamples::new(x, pv, qv, rv)
    }

    fn mid(&self) -> usize {
        self.x.len() / 2
    }

    /// `ρ = P^{-1} exp ∫ Q/P`, normalized so the exponential is 1 at the middle node.
    pub fn rho(&self) -> Vec<f64> {
        let ratio: Vec<f64> = self.q.iter().zip(&self.p).map(|(q, p)| q / p).collect();
        cumulative_trapezoid(&self.x, &ratio, self.mid())
            .iter()
            .zip(&self.p)
            .map(|(i, p)| i.exp() / p)
            .collect()
    }

    /// `∫ dx / P`, or `∫ dx / sqrt(P)` when `root` is set, from the middle node.
    fn coordinate(&self, root: bool) -> Vec<f64> {
        let f: Vec<f64> = self
            .p
            .iter()
            .map(|&p| if root { 1.0 / p.sqrt() } else { 1.0 / p })
            .collect();
        cumulative_trapezoid(&self.x, &f, self.mid())
    }

    fn require_positive(&self) -> Result<()> {
        match self.p.iter().position(|&v| v <= 0.0) {
            Some(i) => Err(Error::SingularGrid { x: self.x[i] }),
            None => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypeI {
    pub x: Vec<f64>,
    pub rho: Vec<f64>,
    #[serde(rename = "G")]
    pub g: Vec<f64>,
    #[serde(rename = "U")]
    pub u: Vec<f64>,
    /// `u = ∫ dx / P`
    pub u_map: Vec<f64>,
    pub lambda: f64,
    pub energy: f64,
}

/// `G = -(Q - P')/2` and `U = -P G' + G^2 - R - Λ P + E`.
pub fn sl_transform_type1(s: &SlSamples, lambda: f64, energy: f64) -> TypeI {
    let dp = derivative(&s.x, &s.p);
    let g: Vec<f64> = s.q.iter().zip(&dp).map(|(q, d)| -(q - d) / 2.0).collect();
    let dg = derivative(&s.x, &g);
    let u = (0..s.x.len())
        .map(|i| -s.p[i] * dg[i] + g[i] * g[i] - s.r[i] - lambda * s.p[i] + energy)
        .collect();
    TypeI {
        x: s.x.clone(),
        rho: s.rho(),
        g,
        u,
        u_map: s.coordinate(false),
        lambda,
        energy,
    }
}

impl TypeI {
    /// Relative residual of `-(P d)^2 Ψ + (U - E) Ψ` for `Ψ = ρ^{1/2} ψ`.
    pub fn eigen_residual(&self, s: &SlSamples, psi: &[f64]) -> f64 {
        let big: Vec<f64> = self
            .rho
            .iter()
            .zip(psi)
            .map(|(r, f)| r.abs().sqrt() * f)
            .collect();
        let pot: Vec<f64> = self.u.iter().map(|u| u - self.energy).collect();
        standard_residual(&s.x, &s.p, 1.0, &big, &pot)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypeII {
    pub x: Vec<f64>,
    pub rho: Vec<f64>,
    pub w_rho: Vec<f64>,
    pub v_rho: Vec<f64>,
    /// `v = ∫ dx / sqrt(P)`
    pub v_map: Vec<f64>,
}

/// `W_ρ = -(Q - P'/2) / (2 sqrt P)` and `V_ρ = -sqrt(P) W_ρ' + W_ρ^2 - R`; needs `P > 0`.
pub fn sl_transform_type2(s: &SlSamples) -> Result<TypeII> {
    s.require_positive()?;
    let dp = derivative(&s.x, &s.p);
    let w: Vec<f64> = (0..s.x.len())
        .map(|i| -(s.q[i] - dp[i] / 2.0) / (2.0 * s.p[i].sqrt()))
        .collect();
    let dw = derivative(&s.x, &w);
    let v = (0..s.x.len())
        .map(|i| -s.p[i].sqrt() * dw[i] + w[i] * w[i] - s.r[i])
        .collect();
    Ok(TypeII {
        x: s.x.clone(),
        rho: s.rho(),
        w_rho: w,
        v_rho: v,
        v_map: s.coordinate(true),
    })
}

impl TypeII {
    /// Relative residual of `-(sqrt(P) d)^2 Φ + (V_ρ - Λ) Φ` for `Φ = (ρ sqrt P)^{1/2} ψ`.
    pub fn eigen_residual(&self, s: &SlSamples, psi: &[f64], lambda: f64) -> f64 {
        let big: Vec<f64> = (0..psi.len())
            .map(|i| (self.rho[i] * s.p[i].sqrt()).sqrt() * psi[i])
            .collect();
        let pot: Vec<f64> = self.v_rho.iter().map(|v| v - lambda).collect();
        standard_residual(&s.x, &s.p, 0.5, &big, &pot)
    }
}

/// `max |-(P^a d)^2 f + pot f| / max |pot f|` over nodes at least two away from the ends.
fn standard_residual(x: &[f64], p: &[f64], a: f64, f: &[f64], pot: &[f64]) -> f64 {
    let pa: Vec<f64> = p.iter().map(|v| v.abs().powf(a)).collect();
    let d1: Vec<f64> = derivative(x, f)
        .iter()
        .zip(&pa)
        .map(|(d, s)| d * s)
        .collect();
    let d2: Vec<f64> = derivative(x, &d1)
        .iter()
        .zip(&pa)
        .map(|(d, s)| d * s)
        .collect();
    let n = x.len();
    if n < 5 {
        return f64::NAN;
    }
    let res: Vec<f64> = (2..n - 2).map(|i| -d2[i] + pot[i] * f[i]).collect();
    let vf: Vec<f64> = (2..n - 2).map(|i| pot[i] * f[i]).collect();
    let mut scale = max_abs(&vf);
    if scale == 0.0 {
        scale = max_abs(f);
    }
    let num = max_abs(&res);
    if scale == 0.0 {
        num
    } else {
        num / scale
    }
}

fn w_from_q1(s: &SlSamples, q1: &[f64]) -> Vec<f64> {
    q1.iter().zip(&s.p).map(|(a, p)| a / (2.0 * p)).collect()
}

/// `max |P (W' + W^2) + Q W + R + Λ1|` with `W = Q1 / (2P)`.
pub fn sl_full_susy_residual(s: &SlSamples, q1: &[f64], lambda1: f64) -> Result<f64> {
    if q1.len() != s.x.len() {
        return Err(Error::Domain("Q1 must have one sample per node".into()));
    }
    let w = w_from_q1(s, q1);
    let dw = derivative(&s.x, &w);
    let res: Vec<f64> = (0..w.len())
        .map(|i| s.p[i] * (dw[i] + w[i] * w[i]) + s.q[i] * w[i] + s.r[i] + lambda1)
        .collect();
    Ok(max_abs(&res))
}

/// The `R` for which a chosen `Q1` and `Λ1` satisfy the full-factorization condition.
pub fn r_from_q1(s: &SlSamples, q1: &[f64], lambda1: f64) -> Vec<f64> {
    let w = w_from_q1(s, q1);
    let dw = derivative(&s.x, &w);
    (0..w.len())
        .map(|i| -lambda1 - s.p[i] * (dw[i] + w[i] * w[i]) - s.q[i] * w[i])
        .collect()
}
