//! Coordinate maps `y = ∫ dx/p` and `z = ∫ dx/sqrt(p)` and their inverses.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::Problem;
use crate::numeric::grid::{sign_definite, FloatPoly, Grid};
use crate::numeric::quad::{integrate, DEFAULT_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapKind {
    /// `dy/dx = 1/p`
    Y,
    /// `dz/dx = 1/sqrt(p)`, needs `p > 0`
    Z,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoordinateMaps {
    pub anchor: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// absent when `p < 0` on the grid
    pub z: Option<Vec<f64>>,
}

fn cumulative<F: Fn(f64) -> f64>(f: F, anchor: f64, xs: &[f64]) -> Result<Vec<f64>> {
    // start from the node closest to the anchor and march outwards
    let start = xs
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - anchor).abs().total_cmp(&(b.1 - anchor).abs()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut out = vec![0.0; xs.len()];
    out[start] = integrate(&f, anchor, xs[start], DEFAULT_TOL)?;
    for i in start + 1..xs.len() {
        out[i] = out[i - 1] + integrate(&f, xs[i - 1], xs[i], DEFAULT_TOL)?;
    }
    for i in (0..start).rev() {
        out[i] = out[i + 1] - integrate(&f, xs[i], xs[i + 1], DEFAULT_TOL)?;
    }
    Ok(out)
}

/// `y` and `z` on the grid, both zero at `anchor`.
pub fn coordinate_maps(prob: &Problem, grid: &Grid, anchor: f64) -> Result<CoordinateMaps> {
    let (lo, hi) = grid.bounds();
    let sign = sign_definite(prob, lo.min(anchor), hi.max(anchor))?;
    let p = FloatPoly::from_poly(prob.p());
    let xs = grid.nodes();
    let y = cumulative(|x| 1.0 / p.eval(x), anchor, xs)?;
    let z = if sign > 0.0 {
        Some(cumulative(|x| 1.0 / p.eval(x).sqrt(), anchor, xs)?)
    } else {
        None
    };
    Ok(CoordinateMaps {
        anchor,
        x: xs.to_vec(),
        y,
        z,
    })
}

/// Solves `dx/du = p(x)` (or `sqrt(p(x))`) from `x(0) = anchor` with RK4 and
/// returns `x` at each target `u`. Steps shrink where the right-hand side
/// varies quickly; `sqrt(p)` is clamped at zero past a root.
pub fn invert_map(prob: &Problem, kind: MapKind, anchor: f64, targets: &[f64]) -> Result<Vec<f64>> {
    let p = FloatPoly::from_poly(prob.p());
    let dp = p.derivative();
    let sign = p.eval(anchor);
    if sign == 0.0 {
        return Err(Error::SingularGrid { x: anchor });
    }
    if kind == MapKind::Z && sign < 0.0 {
        return Err(Error::Domain("z-map needs p > 0".into()));
    }
    let rhs = |x: f64| -> f64 {
        let v = p.eval(x);
        match kind {
            MapKind::Y => v,
            MapKind::Z => v.max(0.0).sqrt(),
        }
    };
    // local Lipschitz bound of the right-hand side
    let lip = |x: f64| -> f64 {
        let v = p.eval(x).abs();
        match kind {
            MapKind::Y => dp.eval(x).abs(),
            MapKind::Z => dp.eval(x).abs() / (2.0 * v.max(1e-300).sqrt()),
        }
    };
    const H_MAX: f64 = 1e-3;
    const H_MIN: f64 = 1e-9;
    let step = |x: f64, h: f64| -> f64 {
        let k1 = rhs(x);
        let k2 = rhs(x + 0.5 * h * k1);
        let k3 = rhs(x + 0.5 * h * k2);
        let k4 = rhs(x + h * k3);
        x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    };
    let march = |from_u: f64, from_x: f64, to_u: f64| -> f64 {
        let mut u = from_u;
        let mut x = from_x;
        let dir = (to_u - from_u).signum();
        while (to_u - u) * dir > 0.0 {
            let h = (0.02 / lip(x).max(1e-12))
                .clamp(H_MIN, H_MAX)
                .min((to_u - u).abs());
            x = step(x, dir * h);
            u += dir * h;
        }
        x
    };
    let mut order: Vec<usize> = (0..targets.len()).collect();
    order.sort_by(|&a, &b| targets[a].total_cmp(&targets[b]));
    let mut out = vec![f64::NAN; targets.len()];
    let split = order.partition_point(|&i| targets[i] < 0.0);
    let (mut u, mut x) = (0.0, anchor);
    for &i in &order[split..] {
        x = march(u, x, targets[i]);
        u = targets[i];
        out[i] = x;
    }
    let (mut u, mut x) = (0.0, anchor);
    for &i in order[..split].iter().rev() {
        x = march(u, x, targets[i]);
        u = targets[i];
        out[i] = x;
    }
    Ok(out)
}
