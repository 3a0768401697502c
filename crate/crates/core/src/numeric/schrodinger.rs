//! Finite-difference residuals of the Schrödinger forms, numeric
//! orthogonality and the auxiliary plus-branch function.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::Problem;
use crate::numeric::fd::{cumulative_trapezoid, derivative, max_abs, second_uniform};
use crate::numeric::grid::{sign_definite, FloatPoly, Grid};
use crate::numeric::maps::{invert_map, MapKind};
use crate::numeric::profile::LevelFunctions;
use crate::numeric::quad::{integrate, DEFAULT_TOL};
use crate::numeric::weight::WeightFn;
use crate::principal::principal_eigenfunctions;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualSpec {
    pub form: MapKind,
    pub l: usize,
    /// association level; only the `z` form uses it
    pub m: i64,
    pub nodes: usize,
    /// interval in the target coordinate
    pub range: (f64, f64),
    /// `x` where the target coordinate is zero
    pub anchor: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub spec: ResidualSpec,
    /// `n`, `2n - 1`, `4n - 3`
    pub nodes: [usize; 3],
    /// relative L∞ residual on each grid
    pub residuals: [f64; 3],
    /// `log2` of successive residual ratios; absent when the residual is at rounding level
    pub orders: [Option<f64>; 2],
    pub energy: f64,
}

impl ResidualReport {
    pub fn residual(&self) -> f64 {
        self.residuals[0]
    }
}

/// One grid: returns `max |-Psi'' + (V - E) Psi| / max |(V - E) Psi|`.
fn residual_on(prob: &Problem, f: &LevelFunctions, spec: &ResidualSpec, n: usize) -> Result<f64> {
    let grid = Grid::uniform(spec.range.0, spec.range.1, n)?;
    let us = grid.nodes();
    let h = (spec.range.1 - spec.range.0) / (n - 1) as f64;
    let xs = invert_map(prob, spec.form, spec.anchor, us)?;
    let lo = xs
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
        .min(spec.anchor);
    let hi = xs
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max)
        .max(spec.anchor);
    sign_definite(prob, lo, hi)?;
    let (psi, pot): (Vec<f64>, Vec<f64>) = match spec.form {
        MapKind::Y => {
            let psi = xs.iter().map(|&x| f.psi(x)).collect::<Result<Vec<_>>>()?;
            let pot = xs.iter().map(|&x| f.v_l(x) - f.energy).collect();
            (psi, pot)
        }
        MapKind::Z => {
            let psi = xs.iter().map(|&x| f.s_phi(x)).collect::<Result<Vec<_>>>()?;
            let pot = xs.iter().map(|&x| f.v_a(x) - f.lambda_lm).collect();
            (psi, pot)
        }
    };
    let d2 = second_uniform(&psi, h);
    let mut num = 0.0f64;
    let mut scale = 0.0f64;
    for i in 1..n - 1 {
        let vpsi = pot[i] * psi[i];
        num = num.max((-d2[i] + vpsi).abs());
        scale = scale.max(vpsi.abs());
    }
    if !num.is_finite() {
        return Err(Error::SingularGrid { x: f64::NAN });
    }
    if scale == 0.0 {
        scale = max_abs(&psi);
    }
    Ok(if scale == 0.0 { num } else { num / scale })
}

/// Residual on `n`, `2n - 1` and `4n - 3` nodes (the spacing halves each time).
pub fn schrodinger_residual(prob: &Problem, spec: &ResidualSpec) -> Result<ResidualReport> {
    if spec.form == MapKind::Y && spec.m != 0 {
        return Err(Error::Domain("the y form is defined for m = 0 only".into()));
    }
    let f = LevelFunctions::new(prob, spec.l, spec.m, spec.anchor)?;
    let nodes = [spec.nodes, 2 * spec.nodes - 1, 4 * spec.nodes - 3];
    let r = nodes
        .par_iter()
        .map(|&n| residual_on(prob, &f, spec, n))
        .collect::<Result<Vec<_>>>()?;
    let order = |a: f64, b: f64| (a > 1e-13 && b > 1e-13).then(|| (a / b).log2());
    Ok(ResidualReport {
        spec: spec.clone(),
        nodes,
        residuals: [r[0], r[1], r[2]],
        orders: [order(r[0], r[1]), order(r[1], r[2])],
        energy: match spec.form {
            MapKind::Y => f.energy,
            MapKind::Z => f.lambda_lm,
        },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalityReport {
    pub max_degree: usize,
    /// integration interval after truncation
    pub interval: (f64, f64),
    pub gram: Vec<Vec<f64>>,
    /// `max |G_ij| / sqrt(G_ii G_jj)` over `i != j`
    pub max_relative_offdiag: f64,
}

/// Moves outward from `from` until `log w + 2 deg ln(1 + |x|)` has dropped by
/// `ln 1e16` below its largest value seen.
fn envelope_cutoff(wf: &WeightFn, degree: usize, from: f64, dir: f64) -> Result<f64> {
    let env = |x: f64| -> Result<f64> {
        Ok(wf.log_eval(x)? + 2.0 * degree as f64 * (1.0 + x.abs()).ln())
    };
    let drop = 1e16f64.ln();
    let mut peak = env(from)?;
    let mut step = 0.5;
    let mut x = from;
    for _ in 0..200 {
        x += dir * step;
        let e = env(x)?;
        peak = peak.max(e);
        if e < peak - drop {
            return Ok(x);
        }
        step = (step * 1.25).min(8.0);
    }
    Err(Error::Quadrature(
        "weight does not decay; interval cannot be truncated".into(),
    ))
}

/// `∫ w Phi_i Phi_j` for `i, j <= max_degree` on `(a, b)`; infinite ends are
/// truncated where the weighted envelope is negligible.
pub fn orthogonality(
    prob: &Problem,
    max_degree: usize,
    a: f64,
    b: f64,
) -> Result<OrthogonalityReport> {
    let mid = match (a.is_finite(), b.is_finite()) {
        (true, true) => 0.5 * (a + b),
        (true, false) => a + 1.0,
        (false, true) => b - 1.0,
        (false, false) => 0.0,
    };
    let wf = WeightFn::new(prob, mid);
    let lo = if a.is_finite() {
        a
    } else {
        envelope_cutoff(&wf, max_degree, mid, -1.0)?
    };
    let hi = if b.is_finite() {
        b
    } else {
        envelope_cutoff(&wf, max_degree, mid, 1.0)?
    };
    let polys: Vec<FloatPoly> = principal_eigenfunctions(prob, max_degree)?
        .iter()
        .map(|e| FloatPoly::from_poly(&e.poly))
        .collect();
    // x = lo + (hi - lo)(1 - cos t)/2 absorbs algebraic endpoint behaviour of w
    let half = 0.5 * (hi - lo);
    let entry = |i: usize, j: usize, tol: f64| {
        integrate(
            |t| {
                let x = lo + 2.0 * half * (0.5 * t).sin().powi(2);
                wf.eval(x).unwrap_or(f64::NAN)
                    * polys[i].eval(x)
                    * polys[j].eval(x)
                    * half
                    * t.sin()
            },
            0.0,
            std::f64::consts::PI,
            tol,
        )
    };
    let n = max_degree + 1;
    let diag = (0..n)
        .into_par_iter()
        .map(|i| {
            let rough = entry(i, i, 1e-6)?;
            entry(i, i, DEFAULT_TOL * rough.abs().max(1.0))
        })
        .collect::<Result<Vec<_>>>()?;
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let values = pairs
        .par_iter()
        .map(|&(i, j)| {
            entry(
                i,
                j,
                DEFAULT_TOL * (diag[i] * diag[j]).abs().sqrt().max(1.0),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let mut gram = vec![vec![0.0; n]; n];
    for (i, d) in diag.into_iter().enumerate() {
        gram[i][i] = d;
    }
    for (&(i, j), v) in pairs.iter().zip(values) {
        gram[i][j] = v;
        gram[j][i] = v;
    }
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                worst = worst.max(gram[i][j].abs() / (gram[i][i] * gram[j][j]).abs().sqrt());
            }
        }
    }
    Ok(OrthogonalityReport {
        max_degree,
        interval: (lo, hi),
        gram,
        max_relative_offdiag: worst,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuxiliaryReport {
    pub x: Vec<f64>,
    /// `w^{-1/2} ∫_anchor^x w/p`
    pub psi: Vec<f64>,
    /// `max |(p d - W0) psi - sqrt(w)| / max sqrt(w)` over the grid
    pub raising_residual: f64,
}

/// The plus-branch function below level zero, built by quadrature, and the
/// check that `p d - W0` sends it to `sqrt(w)`.
pub fn auxiliary_plus(prob: &Problem, grid: &Grid, anchor: f64) -> Result<AuxiliaryReport> {
    let (lo, hi) = grid.bounds();
    sign_definite(prob, lo.min(anchor), hi.max(anchor))?;
    let wf = WeightFn::new(prob, anchor);
    let p = FloatPoly::from_poly(prob.p());
    let xs = grid.nodes();
    let start = xs
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - anchor).abs().total_cmp(&(b.1 - anchor).abs()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut integral = vec![0.0; xs.len()];
    let g = |x: f64| wf.eval(x).unwrap_or(f64::NAN) / p.eval(x);
    integral[start] = integrate(g, anchor, xs[start], DEFAULT_TOL)?;
    for i in start + 1..xs.len() {
        integral[i] = integral[i - 1] + integrate(g, xs[i - 1], xs[i], DEFAULT_TOL)?;
    }
    for i in (0..start).rev() {
        integral[i] = integral[i + 1] - integrate(g, xs[i], xs[i + 1], DEFAULT_TOL)?;
    }
    let sw = xs
        .iter()
        .map(|&x| wf.eval(x).map(f64::sqrt))
        .collect::<Result<Vec<_>>>()?;
    let psi: Vec<f64> = integral.iter().zip(&sw).map(|(i, s)| i / s).collect();
    let dpsi = derivative(xs, &psi);
    let dp = p.derivative();
    let q = FloatPoly::from_poly(prob.q());
    let mut worst = 0.0f64;
    for (k, &x) in xs.iter().enumerate() {
        let w0 = 0.5 * (dp.eval(x) - q.eval(x));
        let lhs = p.eval(x) * dpsi[k] - w0 * psi[k];
        worst = worst.max((lhs - sw[k]).abs());
    }
    Ok(AuxiliaryReport {
        x: xs.to_vec(),
        psi,
        raising_residual: worst / max_abs(&sw),
    })
}

/// Trapezoid version of the same function, for callers with sampled data only.
pub fn auxiliary_plus_sampled(x: &[f64], w: &[f64], p: &[f64], start: usize) -> Vec<f64> {
    let g: Vec<f64> = w.iter().zip(p).map(|(a, b)| a / b).collect();
    cumulative_trapezoid(x, &g, start)
        .iter()
        .zip(w)
        .map(|(i, wv)| i / wv.sqrt())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{frac, rat, Poly};
    use std::f64::consts::FRAC_PI_2;

    fn legendre() -> Problem {
        Problem::new(Poly::from_ints(&[1, 0, -1]), Poly::from_ints(&[0, -2])).unwrap()
    }

    #[test]
    fn ground_state_is_exact() {
        let spec = ResidualSpec {
            form: MapKind::Y,
            l: 0,
            m: 0,
            nodes: 201,
            range: (-5.0, 5.0),
            anchor: 0.0,
        };
        let r = schrodinger_residual(&legendre(), &spec).unwrap();
        assert!(r.residuals.iter().all(|v| *v < 1e-12));
        assert_eq!(r.orders, [None, None]);
    }

    #[test]
    fn y_form_converges_at_second_order() {
        let spec = ResidualSpec {
            form: MapKind::Y,
            l: 4,
            m: 0,
            nodes: 401,
            range: (-5.0, 5.0),
            anchor: 0.0,
        };
        let r = schrodinger_residual(&legendre(), &spec).unwrap();
        for o in r.orders {
            let o = o.unwrap();
            assert!((1.8..2.2).contains(&o), "{r:?}");
        }
        assert_eq!(r.energy, 16.0);
    }

    #[test]
    fn z_form_interior_converges() {
        // away from the endpoints the profile is smooth
        let spec = ResidualSpec {
            form: MapKind::Z,
            l: 3,
            m: 1,
            nodes: 201,
            range: (-FRAC_PI_2 + 0.3, FRAC_PI_2 - 0.3),
            anchor: 0.0,
        };
        let r = schrodinger_residual(&legendre(), &spec).unwrap();
        let o = r.orders[1].unwrap();
        assert!((1.8..2.2).contains(&o), "{r:?}");
        assert_eq!(r.energy, 10.0);
    }

    #[test]
    fn y_form_rejects_association() {
        let spec = ResidualSpec {
            form: MapKind::Y,
            l: 3,
            m: 1,
            nodes: 11,
            range: (-1.0, 1.0),
            anchor: 0.0,
        };
        assert!(schrodinger_residual(&legendre(), &spec).is_err());
    }

    #[test]
    fn orthogonal_families() {
        let r = orthogonality(&legendre(), 6, -1.0, 1.0).unwrap();
        assert!(r.max_relative_offdiag < 1e-10, "{}", r.max_relative_offdiag);
        // ∫ P_2^2 = 2/5 for P_2 = (3x^2 - 1)/2
        let p2 = r.gram[2][2];
        let lead = principal_eigenfunctions(&legendre(), 2).unwrap()[2]
            .poly
            .leading();
        let scale = 1.5 / crate::exact::rational::to_f64(&lead);
        assert!((p2 * scale * scale - 0.4).abs() < 1e-12);
        let lag = Problem::new(Poly::x(), Poly::linear(rat(-1), frac(1, 2))).unwrap();
        let r = orthogonality(&lag, 6, 0.0, f64::INFINITY).unwrap();
        assert!(r.max_relative_offdiag < 1e-8, "{}", r.max_relative_offdiag);
        let her = Problem::new(Poly::one(), Poly::from_ints(&[0, -2])).unwrap();
        let r = orthogonality(&her, 6, f64::NEG_INFINITY, f64::INFINITY).unwrap();
        assert!(r.max_relative_offdiag < 1e-9);
        assert!((r.gram[0][0] - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn auxiliary_function() {
        let lag = Problem::new(Poly::x(), Poly::linear(rat(-1), frac(3, 2))).unwrap();
        let coarse = auxiliary_plus(&lag, &Grid::uniform(0.5, 3.0, 101).unwrap(), 1.0).unwrap();
        let fine = auxiliary_plus(&lag, &Grid::uniform(0.5, 3.0, 201).unwrap(), 1.0).unwrap();
        assert!(
            fine.raising_residual < 1e-3,
            "{} {}",
            coarse.raising_residual,
            fine.raising_residual
        );
        let order = (coarse.raising_residual / fine.raising_residual).log2();
        assert!(order > 1.7, "{order}");
    }
}
