//! Superpotentials and potentials of a level, sampled on a grid.

use serde::{Deserialize, Serialize};

use crate::associated::{assoc_bottom_up, assoc_entry};
use crate::error::Result;
use crate::exact::rational::to_f64;
use crate::exact::{Problem, QuasiFunction};
use crate::numeric::fd::max_abs;
use crate::numeric::grid::{FloatPoly, Grid};
use crate::numeric::maps::coordinate_maps;
use crate::numeric::weight::WeightFn;
use crate::principal::{factor_table, principal_eigenfunction};
use crate::Branch;

/// Float evaluators for the level-`l` and association-`m` quantities.
#[derive(Clone, Debug)]
pub struct LevelFunctions {
    pub l: usize,
    pub m: i64,
    p: FloatPoly,
    dp: FloatPoly,
    q: FloatPoly,
    p2: f64,
    q1: f64,
    pub alpha: f64,
    pub beta: f64,
    pub energy: f64,
    pub lambda: f64,
    pub lambda_lm: f64,
    phi: FloatPoly,
    phi_lm: QuasiFunction,
    prob: Problem,
    pub weight: WeightFn,
}

impl LevelFunctions {
    pub fn new(prob: &Problem, l: usize, m: i64, weight_reference: f64) -> Result<Self> {
        let table = factor_table(prob, Branch::Minus, l)?;
        let e = &table[l];
        let phi = principal_eigenfunction(prob, l)?;
        let lambda_lm = assoc_entry(prob, l as i64, m)?.lambda_lm;
        let phi_lm = assoc_bottom_up(prob, l as i64, m)?.value;
        Ok(LevelFunctions {
            l,
            m,
            p: FloatPoly::from_poly(prob.p()),
            dp: FloatPoly::from_poly(&prob.dp()),
            q: FloatPoly::from_poly(prob.q()),
            p2: to_f64(&prob.p2()),
            q1: to_f64(&prob.q1()),
            alpha: to_f64(&e.alpha),
            beta: to_f64(&e.beta),
            energy: to_f64(&e.energy),
            lambda: to_f64(&e.lambda),
            lambda_lm: to_f64(&lambda_lm),
            phi: FloatPoly::from_poly(&phi.poly),
            phi_lm,
            prob: prob.clone(),
            weight: WeightFn::new(prob, weight_reference),
        })
    }

    pub fn p(&self, x: f64) -> f64 {
        self.p.eval(x)
    }

    /// `W0 = (p' - q)/2`
    pub fn w0(&self, x: f64) -> f64 {
        0.5 * (self.dp.eval(x) - self.q.eval(x))
    }

    /// `V0 = -p W0' + W0^2`
    pub fn v0(&self, x: f64) -> f64 {
        let w = self.w0(x);
        -self.p(x) * 0.5 * (self.p2 - self.q1) + w * w
    }

    pub fn w_l(&self, x: f64) -> f64 {
        self.alpha * x + self.beta
    }

    /// `V_l = V0 - lambda_l p + E_l`
    pub fn v_l(&self, x: f64) -> f64 {
        self.v0(x) - self.lambda * self.p(x) + self.energy
    }

    /// `-p W_l' + W_l^2`
    pub fn v_l_riccati(&self, x: f64) -> f64 {
        let w = self.w_l(x);
        -self.p(x) * self.alpha + w * w
    }

    /// `V^s_l = p W_l' + W_l^2`
    pub fn v_s(&self, x: f64) -> f64 {
        let w = self.w_l(x);
        self.p(x) * self.alpha + w * w
    }

    /// `k_m = (m - 1/2) p' + q`
    fn k(&self, x: f64) -> f64 {
        (self.m.abs() as f64 - 0.5) * self.dp.eval(x) + self.q.eval(x)
    }

    fn dk(&self) -> f64 {
        (self.m.abs() as f64 - 0.5) * self.p2 + self.q1
    }

    /// `W^a_m = -k_m / (2 sqrt p)`
    pub fn w_a(&self, x: f64) -> f64 {
        -self.k(x) / (2.0 * self.p(x).sqrt())
    }

    /// `V^a_m = k (k - p') / (4p) + k'/2`
    pub fn v_a(&self, x: f64) -> f64 {
        let k = self.k(x);
        k * (k - self.dp.eval(x)) / (4.0 * self.p(x)) + 0.5 * self.dk()
    }

    /// `-sqrt(p) W^a' + (W^a)^2` with the derivative taken analytically
    pub fn v_a_riccati(&self, x: f64) -> f64 {
        let p = self.p(x);
        let sp = p.sqrt();
        let k = self.k(x);
        let dw = -self.dk() / (2.0 * sp) + k * self.dp.eval(x) / (4.0 * p * sp);
        let w = self.w_a(x);
        -sp * dw + w * w
    }

    pub fn weight(&self, x: f64) -> Result<f64> {
        self.weight.eval(x)
    }

    pub fn phi(&self, x: f64) -> f64 {
        self.phi.eval(x)
    }

    /// `sqrt(w) Phi_l`
    pub fn psi(&self, x: f64) -> Result<f64> {
        Ok(self.weight(x)?.sqrt() * self.phi(x))
    }

    pub fn phi_lm(&self, x: f64) -> Result<f64> {
        let w = self.weight(x)?;
        Ok(self.phi_lm.eval_f64(&self.prob, x, w))
    }

    /// `p^{1/4} w^{1/2} Phi_lm`
    pub fn s_phi(&self, x: f64) -> Result<f64> {
        let w = self.weight(x)?;
        Ok(self.p(x).powf(0.25) * w.sqrt() * self.phi_lm.eval_f64(&self.prob, x, w))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericProfile {
    pub l: usize,
    pub m: i64,
    pub x: Vec<f64>,
    pub w: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Option<Vec<f64>>,
    pub w_l: Vec<f64>,
    pub v_l: Vec<f64>,
    pub v_s: Vec<f64>,
    pub psi: Vec<f64>,
    pub w_a: Option<Vec<f64>>,
    pub v_a: Option<Vec<f64>>,
    pub s_phi: Option<Vec<f64>>,
    /// `max |V_l - (-p W_l' + W_l^2)|`
    pub riccati_residual: f64,
    /// `max |V^s_l - V_l - 2 alpha_l p|`
    pub superpartner_residual: f64,
    /// `max |V^a_m - (-sqrt(p) W^a' + (W^a)^2)|`, when `p > 0`
    pub associated_residual: Option<f64>,
}

pub fn potentials(
    prob: &Problem,
    l: usize,
    m: i64,
    grid: &Grid,
    anchor: f64,
) -> Result<NumericProfile> {
    let maps = coordinate_maps(prob, grid, anchor)?;
    let f = LevelFunctions::new(prob, l, m, anchor)?;
    let xs = grid.nodes();
    let col = |g: &dyn Fn(f64) -> f64| xs.iter().map(|&x| g(x)).collect::<Vec<f64>>();
    let w = xs
        .iter()
        .map(|&x| f.weight(x))
        .collect::<Result<Vec<_>>>()?;
    let psi = xs.iter().map(|&x| f.psi(x)).collect::<Result<Vec<_>>>()?;
    let v_l = col(&|x| f.v_l(x));
    let v_s = col(&|x| f.v_s(x));
    let riccati = xs
        .iter()
        .zip(&v_l)
        .map(|(&x, v)| v - f.v_l_riccati(x))
        .collect::<Vec<_>>();
    let partner = xs
        .iter()
        .zip(v_l.iter().zip(&v_s))
        .map(|(&x, (a, b))| b - a - 2.0 * f.alpha * f.p(x))
        .collect::<Vec<_>>();
    let positive = maps.z.is_some();
    let (w_a, v_a, s_phi, assoc) = if positive {
        let v_a = col(&|x| f.v_a(x));
        let res = xs
            .iter()
            .zip(&v_a)
            .map(|(&x, v)| v - f.v_a_riccati(x))
            .collect::<Vec<_>>();
        let s_phi = xs.iter().map(|&x| f.s_phi(x)).collect::<Result<Vec<_>>>()?;
        (
            Some(col(&|x| f.w_a(x))),
            Some(v_a),
            Some(s_phi),
            Some(max_abs(&res)),
        )
    } else {
        (None, None, None, None)
    };
    Ok(NumericProfile {
        l,
        m,
        x: xs.to_vec(),
        w,
        y: maps.y,
        z: maps.z,
        w_l: col(&|x| f.w_l(x)),
        v_l,
        v_s,
        psi,
        w_a,
        v_a,
        s_phi,
        riccati_residual: max_abs(&riccati),
        superpartner_residual: max_abs(&partner),
        associated_residual: assoc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{frac, rat, Poly};

    fn legendre() -> Problem {
        Problem::new(Poly::from_ints(&[1, 0, -1]), Poly::from_ints(&[0, -2])).unwrap()
    }

    #[test]
    fn poschl_teller() {
        let g = Grid::uniform(-0.95, 0.95, 39).unwrap();
        for l in 0..5usize {
            let prof = potentials(&legendre(), l, 0, &g, 0.0).unwrap();
            let ll = l as f64;
            for (v, y) in prof.v_l.iter().zip(&prof.y) {
                let sech = 1.0 / y.cosh();
                let expect = ll * ll - ll * (ll + 1.0) * sech * sech;
                assert!((v - expect).abs() < 1e-9, "l={l}");
            }
            assert!(prof.riccati_residual < 1e-12);
            assert!(prof.superpartner_residual < 1e-10);
            assert!(prof.associated_residual.unwrap() < 1e-9);
        }
    }

    #[test]
    fn shifted_oscillator() {
        let her = Problem::new(Poly::one(), Poly::from_ints(&[0, -2])).unwrap();
        let g = Grid::uniform(-3.0, 3.0, 25).unwrap();
        let prof = potentials(&her, 0, 0, &g, 0.0).unwrap();
        for (x, v) in prof.x.iter().zip(&prof.v_l) {
            assert!((v - (x * x - 1.0)).abs() < 1e-12);
        }
        assert!(prof.riccati_residual < 1e-12);
    }

    #[test]
    fn ground_state_potential() {
        let lag = Problem::new(Poly::x(), Poly::linear(rat(-1), frac(3, 2))).unwrap();
        let g = Grid::uniform(0.2, 6.0, 30).unwrap();
        let prof = potentials(&lag, 0, 0, &g, 1.0).unwrap();
        let f = LevelFunctions::new(&lag, 0, 0, 1.0).unwrap();
        for (x, v) in prof.x.iter().zip(&prof.v_l) {
            assert!((v - f.v0(*x)).abs() < 1e-12);
        }
    }

    #[test]
    fn negative_p_skips_associated() {
        let hyp =
            Problem::new(Poly::from_ints(&[0, -1, 1]), Poly::linear(rat(3), rat(-1))).unwrap();
        let g = Grid::uniform(0.2, 0.8, 9).unwrap();
        let prof = potentials(&hyp, 2, 1, &g, 0.5).unwrap();
        assert!(prof.v_a.is_none());
        assert!(prof.riccati_residual < 1e-10);
    }
}
