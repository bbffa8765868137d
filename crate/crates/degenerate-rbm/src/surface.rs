//! The kernel zero set: uniformization, automorphisms, step coefficient,
//! gluing functions and domain membership.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::DerivedConstants;

pub type C64 = Complex64;

const POLE_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfaceContext {
    pub mu1: f64,
    pub mu2: f64,
    pub r1: f64,
    pub r2: f64,
    pub s1: Option<f64>,
    pub s2: Option<f64>,
    pub s_minus: f64,
    pub s_plus: f64,
}

impl SurfaceContext {
    pub fn new(c: &DerivedConstants) -> Self {
        let f = c.floats();
        SurfaceContext {
            mu1: f.mu1,
            mu2: f.mu2,
            r1: f.r1,
            r2: f.r2,
            s1: f.s1,
            s2: f.s2,
            s_minus: f.s_minus,
            s_plus: f.s_plus,
        }
    }

    pub fn kernel(&self, x: C64, y: C64) -> C64 {
        let d = x - y;
        d * d - 2.0 * self.mu1 * x - 2.0 * self.mu2 * y
    }

    pub fn k1(&self, x: C64, y: C64) -> C64 {
        x + self.r1 * y
    }

    pub fn k2(&self, x: C64, y: C64) -> C64 {
        y + self.r2 * x
    }

    pub fn x_of(&self, s: C64) -> C64 {
        2.0 * s * (s + self.mu2)
    }

    pub fn y_of(&self, s: C64) -> C64 {
        2.0 * s * (s - self.mu1)
    }

    pub fn uniformize(&self, s: C64) -> (C64, C64) {
        (self.x_of(s), self.y_of(s))
    }

    /// Fixes `x`.
    pub fn zeta(&self, s: C64) -> C64 {
        -s - self.mu2
    }

    /// Fixes `y`.
    pub fn eta(&self, s: C64) -> C64 {
        -s + self.mu1
    }

    /// Preimage of `y` with `Re s >= mu1 / 2`.
    pub fn s_from_y(&self, y: C64) -> C64 {
        let z = 2.0 * y + self.mu1 * self.mu1;
        let r = z.sqrt();
        let r = if r.re < 0.0 { -r } else { r };
        0.5 * (self.mu1 + r)
    }

    /// Preimage of `x` with `Re s <= -mu2 / 2`.
    pub fn s_from_x(&self, x: C64) -> C64 {
        let z = 2.0 * x + self.mu2 * self.mu2;
        let r = z.sqrt();
        let r = if r.re < 0.0 { -r } else { r };
        0.5 * (-self.mu2 - r)
    }

    pub fn k1_on_surface(&self, s: C64) -> C64 {
        let (x, y) = self.uniformize(s);
        self.k1(x, y)
    }

    pub fn k2_on_surface(&self, s: C64) -> C64 {
        let (x, y) = self.uniformize(s);
        self.k2(x, y)
    }

    /// Factored coefficient `G` of `phi1(s + 1) = G(s) phi1(s)`, covering
    /// `r1 = -1` and `r2 = -1` as well.
    pub fn step_coefficient(&self, s: C64) -> Result<C64> {
        match (self.s1, self.s2) {
            (Some(s1), Some(s2)) => {
                let den = (s - s2) * (s + s1 + self.mu2);
                check_pole(&[s - s2, s + s1 + self.mu2], s, Error::PoleOfG)?;
                Ok((s - s1) * (s + s2 + self.mu2) / den)
            }
            (None, Some(_)) => self.step_coefficient_r1_minus_one(s),
            (Some(s1), None) => {
                check_pole(&[s + s1 + self.mu2], s, Error::PoleOfG)?;
                Ok(-(s - s1) / (s + s1 + self.mu2))
            }
            (None, None) => Err(Error::Internal("r1 = r2 = -1".into())),
        }
    }

    pub fn step_coefficient_r1_minus_one(&self, s: C64) -> Result<C64> {
        let s2 = self
            .s2
            .ok_or_else(|| Error::Precondition("r1 = -1".into()))?;
        let gamma2 = self.mu2 + 2.0 * s2;
        check_pole(&[s - s2], s, Error::PoleOfG)?;
        Ok(-(s - (s2 - gamma2)) / (s - s2))
    }

    /// `k1(s) k2(zeta s) / (k2(s) k1(zeta s))` from raw polynomial evaluations.
    pub fn step_coefficient_from_kernel(&self, s: C64) -> C64 {
        let z = self.zeta(s);
        self.k1_on_surface(s) * self.k2_on_surface(z)
            / (self.k2_on_surface(s) * self.k1_on_surface(z))
    }

    pub fn gluing_w1(&self, s: C64) -> Result<C64> {
        let a = PI * (s + self.mu2 - 0.5);
        let c = a.cos();
        if c.norm() < POLE_EPS {
            return Err(Error::PoleOfW1(format!("{s}")));
        }
        Ok(a.sin() / c)
    }

    pub fn gluing_w2(&self, s: C64) -> C64 {
        (2.0 * PI * (s - self.s_minus)).cos()
    }

    pub fn gluing_w1_inverse(&self, w: C64) -> C64 {
        0.5 - self.mu2 + w.atan() / PI
    }

    pub fn gluing_w2_inverse(&self, w: C64) -> C64 {
        let i = C64::i();
        let arg = w + i * (C64::new(1.0, 0.0) - w * w).sqrt();
        self.s_minus + arg.ln() / (2.0 * PI * i)
    }

    pub fn f_bounds(&self, b: f64) -> (f64, f64) {
        let r = (self.s_minus * self.s_minus + b * b).sqrt();
        (self.s_minus - r, self.s_minus + r)
    }

    pub fn g_bounds(&self, b: f64) -> (f64, f64) {
        let r = (self.s_plus * self.s_plus + b * b).sqrt();
        (self.s_plus - r, self.s_plus + r)
    }

    pub fn membership(&self, s: C64) -> Membership {
        let (fm, fp) = self.f_bounds(s.im);
        let (gm, gp) = self.g_bounds(s.im);
        Membership {
            in_delta_x: fm < s.re && s.re < fp,
            in_delta_y: gm < s.re && s.re < gp,
            in_b1: -self.mu2 < s.re && s.re < self.mu1,
            in_b2: self.s_minus < s.re && s.re < self.s_plus,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Membership {
    pub in_delta_x: bool,
    pub in_delta_y: bool,
    pub in_b1: bool,
    pub in_b2: bool,
}

impl Membership {
    pub fn in_delta(&self) -> bool {
        self.in_delta_x && self.in_delta_y
    }
}

fn check_pole(factors: &[C64], s: C64, err: fn(String) -> Error) -> Result<()> {
    if factors.iter().any(|f| f.norm() < POLE_EPS) {
        return Err(err(format!("{s}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{analyze, Preset};

    fn ctx(p: Preset) -> SurfaceContext {
        SurfaceContext::new(&analyze(&p.params()).unwrap().1)
    }

    #[test]
    fn automorphisms_fix_one_coordinate() {
        let sc = ctx(Preset::Transcendental);
        let s = C64::new(0.3, 1.7);
        assert!((sc.x_of(sc.zeta(s)) - sc.x_of(s)).norm() < 1e-13);
        assert!((sc.y_of(sc.eta(s)) - sc.y_of(s)).norm() < 1e-13);
        assert!((sc.zeta(sc.zeta(s)) - s).norm() < 1e-15);
        assert!((sc.s_from_y(sc.y_of(C64::new(0.9, 0.2))) - C64::new(0.9, 0.2)).norm() < 1e-12);
        assert!((sc.s_from_x(sc.x_of(C64::new(-0.8, 0.2))) - C64::new(-0.8, 0.2)).norm() < 1e-12);
    }

    #[test]
    fn factored_step_coefficient_matches_kernel_ratio() {
        for p in Preset::ALL {
            let sc = ctx(p);
            for s in [C64::new(0.37, 0.4), C64::new(-1.3, 2.1), C64::new(2.2, -0.7)] {
                let a = sc.step_coefficient(s).unwrap();
                let b = sc.step_coefficient_from_kernel(s);
                assert!((a - b).norm() < 1e-12 * b.norm(), "{p:?}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn gluing_functions_invert() {
        let sc = ctx(Preset::Symmetric);
        let s = C64::new(0.1, 0.3);
        assert!((sc.gluing_w1_inverse(sc.gluing_w1(s).unwrap()) - s).norm() < 1e-12);
        let w = sc.gluing_w2(s);
        let t = sc.gluing_w2_inverse(w);
        assert!((sc.gluing_w2(t) - w).norm() < 1e-12);
        assert!(sc.membership(C64::new(0.0, 0.5)).in_delta());
        assert!(!sc.membership(C64::new(0.0, 0.0)).in_delta());
    }
}
