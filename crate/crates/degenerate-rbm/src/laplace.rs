//! Closed-form Laplace transforms of the boundary measures and of the
//! stationary distribution.

use std::fmt::Write as _;

use num_traits::Signed;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{analyze, is_natural, to_float, DerivedConstants, ModelParams, NormalizedParams};
use crate::specfun::{
    decoupling_rational, decoupling_s_roots, GammaProduct, MeroProduct, RationalDecoupling, C64,
};
use crate::surface::SurfaceContext;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SignPattern {
    NegPos,
    NegNeg,
    PosPos,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CaseTag {
    RationalCase,
    GammaPosIntCase,
    Gamma12Case(u8),
    GeneralCase(SignPattern),
    R1MinusOne { gamma2_nat: bool, odd: bool },
    R2MinusOne { gamma1_nat: bool, odd: bool },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Formula {
    Mero(MeroProduct),
    Gamma(GammaProduct),
}

impl Formula {
    pub fn eval(&self, s: C64) -> Result<C64> {
        match self {
            Formula::Mero(m) => Ok(m.eval(s)),
            Formula::Gamma(g) => g.eval(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransformCase {
    pub tag: CaseTag,
    pub formula: Formula,
    pub decoupling: Option<RationalDecoupling>,
}

fn floats(v: &[crate::model::Rational]) -> Vec<f64> {
    v.iter().map(to_float).collect()
}

/// The reflection form, valid whenever no rational decoupling is used.
pub fn general_formula(c: &DerivedConstants) -> Result<(CaseTag, GammaProduct)> {
    let f = c.floats();
    let pi = std::f64::consts::PI;
    let mu2 = f.mu2;
    let g = |factors: Vec<(f64, f64, i32)>, scale: f64| GammaProduct { scale, factors };
    match (f.s1, f.s2) {
        (None, Some(s2)) => {
            let nat = c.gamma2.as_ref().is_some_and(is_natural);
            let odd = c.gamma2.is_some_and(|g| g.is_integer() && g.to_integer().rem_euclid(2) == 1);
            Ok((
                CaseTag::R1MinusOne { gamma2_nat: nat, odd },
                g(vec![(1.0, s2 + mu2, 1), (-1.0, 1.0 + s2, 1)], 1.0 / pi),
            ))
        }
        (Some(s1), None) => {
            let nat = c.gamma1.as_ref().is_some_and(is_natural);
            let odd = c.gamma1.is_some_and(|g| g.is_integer() && g.to_integer().rem_euclid(2) == 1);
            Ok((
                CaseTag::R2MinusOne { gamma1_nat: nat, odd },
                g(vec![(1.0, -s1, 1), (-1.0, 1.0 - s1 - mu2, 1)], 1.0 / pi),
            ))
        }
        (Some(s1), Some(s2)) => {
            let neg1 = c.s1.is_some_and(|s| s.is_negative());
            let neg2 = c.s2.is_some_and(|s| s.is_negative());
            match (neg1, neg2) {
                (true, false) => Ok((
                    CaseTag::GeneralCase(SignPattern::NegPos),
                    g(
                        vec![
                            (1.0, -s1, 1),
                            (1.0, s2 + mu2, 1),
                            (-1.0, 1.0 - s1 - mu2, 1),
                            (-1.0, 1.0 + s2, 1),
                        ],
                        1.0 / (pi * pi),
                    ),
                )),
                (true, true) => Ok((
                    CaseTag::GeneralCase(SignPattern::NegNeg),
                    g(
                        vec![
                            (1.0, -s1, 1),
                            (-1.0, 1.0 - s1 - mu2, 1),
                            (1.0, -s2, -1),
                            (-1.0, 1.0 - s2 - mu2, -1),
                        ],
                        1.0,
                    ),
                )),
                (false, false) => Ok((
                    CaseTag::GeneralCase(SignPattern::PosPos),
                    g(
                        vec![
                            (1.0, s2 + mu2, 1),
                            (-1.0, 1.0 + s2, 1),
                            (-1.0, 1.0 + s1, -1),
                            (1.0, s1 + mu2, -1),
                        ],
                        1.0,
                    ),
                )),
                (false, true) => Err(Error::Internal("s1 > 0 and s2 < 0".into())),
            }
        }
        (None, None) => Err(Error::Internal("r1 = r2 = -1".into())),
    }
}

/// Dispatches on the derived constants to the matching closed form.
pub fn build_case(c: &DerivedConstants) -> Result<TransformCase> {
    let Some(rational) = decoupling_rational(c)? else {
        let (tag, g) = general_formula(c)?;
        return Ok(TransformCase { tag, formula: Formula::Gamma(g), decoupling: None });
    };
    let roots = decoupling_s_roots(c).ok_or_else(|| Error::Internal("roots".into()))?;
    let f = c.floats();
    let zeros = floats(&roots.zeros);
    let poles = floats(&roots.poles);
    let (sm, sp) = (f.s_minus, f.s_plus);
    let (tag, mero) = if c.r1_minus_one() {
        let (tag, _) = general_formula(c)?;
        let odd = matches!(tag, CaseTag::R1MinusOne { odd: true, .. });
        let pole = if odd { sp } else { sp - 0.5 };
        (tag, MeroProduct { scale: 1.0, zeros, sin_poles: vec![pole], ..Default::default() })
    } else if c.r2_minus_one() {
        let (tag, _) = general_formula(c)?;
        let odd = matches!(tag, CaseTag::R2MinusOne { odd: true, .. });
        let pole = if odd { sp - 0.5 } else { sp };
        (tag, MeroProduct { scale: 1.0, zeros, sin_poles: vec![pole], ..Default::default() })
    } else {
        let g = c.gamma.ok_or_else(|| Error::Internal("gamma".into()))?;
        if g.is_integer() && g.is_negative() {
            (CaseTag::RationalCase, MeroProduct { scale: 1.0, poles, ..Default::default() })
        } else if g.is_integer() {
            let s1 = f.s1.unwrap();
            let scale = -(2f64.powi(g.to_integer() as i32 - 1));
            (
                CaseTag::GammaPosIntCase,
                MeroProduct { scale, zeros, sin_poles: vec![s1, f.mu1 - s1], ..Default::default() },
            )
        } else {
            let both_pos = c.gamma1.is_some_and(|g| g.is_positive())
                && c.gamma2.is_some_and(|g| g.is_positive());
            let base = MeroProduct { scale: 1.0, zeros, poles, ..Default::default() };
            match (rational.epsilon, both_pos) {
                (-1, _) => (
                    CaseTag::Gamma12Case(1),
                    MeroProduct { sin_zeros: vec![sm - 0.5], sin_poles: vec![sm], ..base },
                ),
                (1, false) => (
                    CaseTag::Gamma12Case(2),
                    MeroProduct { sin_zeros: vec![sm], sin_poles: vec![sm - 0.5], ..base },
                ),
                (1, true) => (
                    CaseTag::Gamma12Case(3),
                    MeroProduct { scale: 0.5, sin_poles: vec![sm, sm - 0.5], ..base },
                ),
                _ => return Err(Error::Internal("no closed form matches".into())),
            }
        }
    };
    Ok(TransformCase { tag, formula: Formula::Mero(mero), decoupling: Some(rational) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Axis {
    Phi1,
    Phi2,
}

/// `phi1` of normalized parameters (or `phi2`, through the swap), pinned to the
/// boundary mass at the origin.
#[derive(Clone, Debug)]
pub struct TransformEvaluator {
    pub case: TransformCase,
    pub norm_constant: f64,
    pub axis: Axis,
    pub consts: DerivedConstants,
    pub surface: SurfaceContext,
}

impl TransformEvaluator {
    /// `consts` are those of the parameters whose `phi1` is wanted; for
    /// `Axis::Phi2` pass the swapped constants.
    pub fn new(consts: &DerivedConstants, axis: Axis) -> Result<Self> {
        Self::with_case(consts, axis, build_case(consts)?)
    }

    pub fn with_case(consts: &DerivedConstants, axis: Axis, case: TransformCase) -> Result<Self> {
        let f = consts.floats();
        let det = 1.0 - f.r1 * f.r2;
        let target = 2.0 * (f.mu1 - f.r2 * f.mu2) / det;
        let at_zero = case.formula.eval(C64::new(f.mu1, 0.0))?;
        if !(at_zero.norm() > 0.0) || !at_zero.norm().is_finite() {
            return Err(Error::Internal(format!("transform at the origin is {at_zero}")));
        }
        Ok(TransformEvaluator {
            norm_constant: target / at_zero.re,
            case,
            axis,
            consts: consts.clone(),
            surface: SurfaceContext::new(consts),
        })
    }

    /// Forces the reflection form, whatever the case.
    pub fn general(consts: &DerivedConstants, axis: Axis) -> Result<Self> {
        let (tag, g) = general_formula(consts)?;
        let case = TransformCase { tag, formula: Formula::Gamma(g), decoupling: None };
        Self::with_case(consts, axis, case)
    }

    pub fn unnormalized(&self, s: C64) -> Result<C64> {
        self.case.formula.eval(s)
    }

    pub fn at_s(&self, s: C64) -> Result<C64> {
        let v = self.norm_constant * self.unnormalized(s)?;
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::PoleOfPhi1(format!("{s}")));
        }
        Ok(v)
    }

    /// Evaluates at the boundary variable (`y` for `phi1`, `x` for `phi2`).
    pub fn eval(&self, y: C64) -> Result<C64> {
        self.at_s(self.surface.s_from_y(y))
    }

    pub fn value_at_zero(&self) -> f64 {
        let f = self.consts.floats();
        2.0 * (f.mu1 - f.r2 * f.mu2) / (1.0 - f.r1 * f.r2)
    }

    /// `|phi(s + 1) - G(s) phi(s)| / |phi(s)|` for the unnormalized form.
    pub fn difference_residual(&self, s: C64) -> Result<f64> {
        let a = self.unnormalized(s + 1.0)?;
        let b = self.unnormalized(s)?;
        let g = self.surface.step_coefficient(s)?;
        Ok((a - g * b).norm() / b.norm())
    }
}

/// Transforms of a general parameter set, evaluated through the normalized
/// model and the homogeneity relations.
#[derive(Clone, Debug)]
pub struct StationaryLaplace {
    pub params: ModelParams,
    pub normalized: NormalizedParams,
    pub consts: DerivedConstants,
    pub phi1: TransformEvaluator,
    pub phi2: TransformEvaluator,
}

impl StationaryLaplace {
    pub fn new(params: &ModelParams) -> Result<Self> {
        let (normalized, consts) = analyze(params)?;
        let swapped = normalized.swap().derive()?;
        Ok(StationaryLaplace {
            params: params.clone(),
            phi1: TransformEvaluator::new(&consts, Axis::Phi1)?,
            phi2: TransformEvaluator::new(&swapped, Axis::Phi2)?,
            normalized,
            consts,
        })
    }

    fn scale(&self) -> (f64, f64, f64) {
        let s = &self.normalized.scale;
        (to_float(&s.q), to_float(&s.sigma1), to_float(&s.sigma2))
    }

    /// `phi1(y)` for the original parameters.
    pub fn phi1(&self, y: C64) -> Result<C64> {
        let (q, s1, s2) = self.scale();
        Ok(q * s1 * self.phi1.eval(s2 * y / q)?)
    }

    /// `phi2(x)` for the original parameters.
    pub fn phi2(&self, x: C64) -> Result<C64> {
        let (q, s1, s2) = self.scale();
        Ok(q * s2 * self.phi2.eval(s1 * x / q)?)
    }

    /// Boundary masses for the original parameters.
    pub fn boundary_masses(&self) -> (f64, f64) {
        let (a, b) = self.params.boundary_masses();
        (to_float(&a), to_float(&b))
    }

    pub fn kernel(&self, x: C64, y: C64) -> C64 {
        let p = &self.params;
        let (m1, m2, s1, s2) = (to_float(&p.mu1), to_float(&p.mu2), to_float(&p.sigma1), to_float(&p.sigma2));
        let d = s1 * x - s2 * y;
        d * d - 2.0 * m1 * x - 2.0 * m2 * y
    }

    /// `phi(x, y)` from the functional equation with the original kernel.
    pub fn phi(&self, x: C64, y: C64) -> Result<C64> {
        if x == C64::new(0.0, 0.0) && y == C64::new(0.0, 0.0) {
            return Ok(C64::new(1.0, 0.0));
        }
        let k = self.kernel(x, y);
        if k.norm() < 1e-12 {
            return Err(Error::OnKernelZeroSet);
        }
        let r1 = to_float(&self.params.r1);
        let r2 = to_float(&self.params.r2);
        let k1 = x + r1 * y;
        let k2 = y + r2 * x;
        let mut num = C64::new(0.0, 0.0);
        if k1 != C64::new(0.0, 0.0) {
            num += k1 * self.phi1(y)?;
        }
        if k2 != C64::new(0.0, 0.0) {
            num += k2 * self.phi2(x)?;
        }
        Ok(-num / k)
    }

    /// `phi` of the normalized parameters at `(x, y)`.
    pub fn phi_normalized(&self, x: C64, y: C64) -> Result<C64> {
        if x == C64::new(0.0, 0.0) && y == C64::new(0.0, 0.0) {
            return Ok(C64::new(1.0, 0.0));
        }
        let sc = &self.phi1.surface;
        let k = sc.kernel(x, y);
        if k.norm() < 1e-12 {
            return Err(Error::OnKernelZeroSet);
        }
        let num = sc.k1(x, y) * self.phi1.eval(y)? + sc.k2(x, y) * self.phi2.eval(x)?;
        Ok(-num / k)
    }

    /// Relative residual of the functional equation at the surface point `s`
    /// of the normalized model.
    pub fn surface_residual(&self, s: C64) -> Result<f64> {
        let sc = &self.phi1.surface;
        let (x, y) = sc.uniformize(s);
        let a = sc.k1(x, y) * self.phi1.eval(y)?;
        let b = sc.k2(x, y) * self.phi2.eval(x)?;
        Ok((a + b).norm() / (a.norm() + b.norm()))
    }

    /// CSV rows `x,y,re,im` of `phi` on a grid.
    pub fn grid_csv(&self, xs: &[f64], ys: &[f64]) -> Result<String> {
        let mut out = String::from("x,y,re,im\n");
        for &x in xs {
            for &y in ys {
                let v = self.phi(C64::new(x, 0.0), C64::new(y, 0.0))?;
                writeln!(out, "{x:.16e},{y:.16e},{:.16e},{:.16e}", v.re, v.im).unwrap();
            }
        }
        Ok(out)
    }
}

/// Maximum relative variation of the ratio between the special closed form
/// and the reflection form, over 50 fixed points.
pub fn consistency_check(c: &DerivedConstants) -> Result<f64> {
    let special = build_case(c)?;
    if special.decoupling.is_none() {
        return Err(Error::Precondition("a rational decoupling case".into()));
    }
    let general = TransformEvaluator::general(c, Axis::Phi1)?;
    let special = TransformEvaluator::with_case(c, Axis::Phi1, special)?;
    let mu1 = to_float(&c.mu1);
    let mut ratios = Vec::with_capacity(50);
    for k in 0..50 {
        let t = k as f64 / 49.0;
        let s = C64::new(mu1 / 2.0 + 0.05 + 1.3 * t, 2.0 * (t - 0.5));
        let a = special.unnormalized(s)?;
        let b = general.unnormalized(s)?;
        ratios.push(a / b);
    }
    let r0 = ratios[0];
    Ok(ratios.iter().map(|r| (r / r0 - 1.0).norm()).fold(0.0, f64::max))
}
