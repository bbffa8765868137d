//! The lateral density `nu1` (and `nu2` by swap) in the invertible cases,
//! with the quadrature oracle tying it back to the transforms.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::laplace::{build_case, Axis, CaseTag, TransformEvaluator};
use crate::model::{analyze, to_float, DerivedConstants, ModelParams, Rational};
use crate::specfun::{
    cos_sqrt, sinc_sqrt, Representation, ThetaKind, ThetaSeries, C64,
};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod<F: Fn(f64) -> Result<f64>>(f: &F, a: f64, b: f64) -> Result<(f64, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let x = h * XGK[i];
        let s = f(c - x)? + f(c + x)?;
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    Ok((k * h, ((k - g) * h).abs()))
}

/// Adaptive Gauss-Kronrod (7/15) quadrature on `[a, b]`.
pub fn integrate<F: Fn(f64) -> Result<f64>>(f: &F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    let (i0, e0) = kronrod(f, a, b)?;
    let mut parts = vec![(a, b, i0, e0)];
    for _ in 0..2000 {
        let total: f64 = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        if err <= rel_tol * total.abs() || err < 1e-300 {
            return Ok(total);
        }
        let (idx, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .unwrap();
        let (lo, hi, _, _) = parts.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (il, el) = kronrod(f, lo, mid)?;
        let (ir, er) = kronrod(f, mid, hi)?;
        parts.push((lo, mid, il, el));
        parts.push((mid, hi, ir, er));
    }
    let total: f64 = parts.iter().map(|p| p.2).sum();
    let err: f64 = parts.iter().map(|p| p.3).sum();
    if err <= 1e-9 * total.abs() {
        Ok(total)
    } else {
        Err(Error::NonConvergence(format!("quadrature on [{a}, {b}]: error {err:e}")))
    }
}

/// `int_0^inf f` over doubling panels, for `f` decaying at least like
/// `e^{-tail_rate v}`.
pub fn integrate_semi_infinite<F: Fn(f64) -> Result<f64>>(
    f: &F,
    tail_rate: f64,
    rel_tol: f64,
) -> Result<f64> {
    let limit = 200.0 / tail_rate;
    let mut total = 0.0;
    let mut lo = 0.0;
    let mut hi = 0.25;
    while lo < limit {
        let part = integrate(f, lo, hi, rel_tol)?;
        total += part;
        if lo >= 1.0 && part.abs() <= 1e-17 * total.abs() {
            return Ok(total);
        }
        lo = hi;
        hi *= 2.0;
    }
    Err(Error::NonConvergence(format!("tail not reached by v = {limit}")))
}

/// `int_0^inf e^{y v} density(v) dv` by quadrature.
pub fn laplace_quadrature_oracle<F: Fn(f64) -> Result<f64>>(
    density: &F,
    y: f64,
    tail_rate: f64,
) -> Result<f64> {
    if y > 0.0 {
        return Err(Error::Precondition("y <= 0".into()));
    }
    integrate_semi_infinite(&|v: f64| Ok((y * v).exp() * density(v)?), tail_rate - y, 1e-11)
}

/// Symmetric partial sum of `sin a / (cos sqrt z - cos a)`.
pub fn mittag_leffler_cos(z: C64, a: f64, n: i64) -> C64 {
    let tp = 2.0 * std::f64::consts::PI;
    (-n..=n)
        .map(|k| {
            let w = a + tp * k as f64;
            -2.0 * w / (z - w * w)
        })
        .sum()
}

pub fn mittag_leffler_cos_closed(z: C64, a: f64) -> C64 {
    a.sin() / (cos_sqrt(z) - a.cos())
}

/// Symmetric partial sum of `1 / (sqrt z sin sqrt z)`.
pub fn mittag_leffler_sin(z: C64, n: i64) -> C64 {
    let pi = std::f64::consts::PI;
    (-n..=n)
        .map(|k| {
            let w = pi * k as f64;
            let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            sign / (z - w * w)
        })
        .sum()
}

pub fn mittag_leffler_sin_closed(z: C64) -> C64 {
    1.0 / (z * sinc_sqrt(z))
}

/// `sum c_k e^{-rate_k v}` with rates increasing.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentialSum {
    pub terms: Vec<(f64, f64)>,
}

impl ExponentialSum {
    pub fn eval(&self, v: f64) -> f64 {
        self.terms.iter().map(|&(c, r)| c * (-r * v).exp()).sum()
    }

    pub fn laplace(&self, y: C64) -> C64 {
        self.terms.iter().map(|&(c, r)| c / (r - y)).sum()
    }

    pub fn mass(&self) -> f64 {
        self.terms.iter().map(|&(c, r)| c / r).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThetaDensityKind {
    GammaPosInt,
    Gamma12,
    R1MinusOne { odd: bool },
    R2MinusOne { odd: bool },
}

/// `constant * P(-d/dv) theta(e^{-v})`.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaOperatorSeries {
    pub kind: ThetaDensityKind,
    pub series: ThetaSeries,
    pub constant: f64,
}

impl ThetaOperatorSeries {
    pub fn eval(&self, v: f64) -> Result<f64> {
        Ok(self.constant * self.series.eval(v, Representation::Auto)?)
    }

    pub fn laplace(&self, y: C64) -> C64 {
        self.constant * self.series.laplace_with_operator(y)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DensityForm {
    Exponential(ExponentialSum),
    Theta(ThetaOperatorSeries),
}

/// The density of the normalized model.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedDensity {
    pub form: DensityForm,
    pub mass: f64,
    pub min_rate: f64,
}

const PIN: f64 = -1.0;

fn unsupported(tag: CaseTag) -> Error {
    Error::UnsupportedCase(format!("no density inversion for {tag:?}"))
}

impl NormalizedDensity {
    pub fn build(c: &DerivedConstants) -> Result<Self> {
        let case = build_case(c)?;
        let f = c.floats();
        let mass = 2.0 * (f.mu1 - f.r2 * f.mu2) / (1.0 - f.r1 * f.r2);
        let tag = case.tag;
        let Some(dec) = case.decoupling.clone() else {
            return Err(unsupported(tag));
        };
        let mut roots = dec.p_roots.clone();
        let with_centre = |mut r: Vec<Rational>| {
            r.push(c.y_of(c.s_plus));
            r
        };
        let series = match tag {
            CaseTag::RationalCase => return Self::exponential(c, &dec.q_roots, mass),
            CaseTag::GammaPosIntCase => {
                let g1 = c.gamma1.unwrap();
                if g1.is_integer() {
                    return Err(Error::UnsupportedCase(
                        "gamma in N with integer gamma1: the theta series vanishes".into(),
                    ));
                }
                (ThetaDensityKind::GammaPosInt, ThetaSeries::theta_a(g1, c.mu1))
            }
            CaseTag::Gamma12Case(3) => (ThetaDensityKind::Gamma12, ThetaSeries::theta_b(c.mu1)),
            CaseTag::R1MinusOne { gamma2_nat: true, odd } => {
                let kind = if odd {
                    roots = with_centre(roots);
                    ThetaKind::Alternating
                } else {
                    ThetaKind::Quarter
                };
                (ThetaDensityKind::R1MinusOne { odd }, ThetaSeries::new(kind, Rational::from_integer(0), c.mu1))
            }
            CaseTag::R2MinusOne { gamma1_nat: true, odd } => {
                let kind = if odd {
                    ThetaKind::Quarter
                } else {
                    roots = with_centre(roots);
                    ThetaKind::Alternating
                };
                (ThetaDensityKind::R2MinusOne { odd }, ThetaSeries::new(kind, Rational::from_integer(0), c.mu1))
            }
            _ => return Err(unsupported(tag)),
        };
        let (kind, series) = series;
        let series = series.with_operator(roots);
        if let Some((n, r)) = series.nonpositive_rates().first() {
            return Err(Error::Internal(format!("term {n} has nonpositive rate {r}")));
        }
        let phi1 = TransformEvaluator::with_case(c, Axis::Phi1, case)?;
        let target = phi1.eval(C64::new(PIN, 0.0))?.re;
        let unit = series.laplace_with_operator(C64::new(PIN, 0.0)).re;
        let min_rate = to_float(&series.min_active_rate());
        Ok(NormalizedDensity {
            form: DensityForm::Theta(ThetaOperatorSeries { kind, series, constant: target / unit }),
            mass,
            min_rate,
        })
    }

    fn exponential(c: &DerivedConstants, q_roots: &[Rational], mass: f64) -> Result<Self> {
        let mut rates: Vec<Rational> = q_roots.to_vec();
        rates.sort();
        if rates.iter().any(|r| *r <= Rational::from_integer(0)) {
            return Err(Error::Internal("nonpositive rate".into()));
        }
        let _ = c;
        let coeffs: Vec<f64> = rates
            .iter()
            .enumerate()
            .map(|(k, rk)| {
                rates
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != k)
                    .map(|(_, rj)| 1.0 / to_float(&(*rk - *rj)))
                    .product()
            })
            .collect();
        let unit: f64 = coeffs.iter().zip(&rates).map(|(c, r)| c / to_float(r)).sum();
        let scale = mass / unit;
        let terms = coeffs
            .iter()
            .zip(&rates)
            .map(|(c, r)| (scale * c, to_float(r)))
            .collect();
        Ok(NormalizedDensity {
            form: DensityForm::Exponential(ExponentialSum { terms }),
            mass,
            min_rate: to_float(&rates[0]),
        })
    }

    pub fn eval(&self, v: f64) -> Result<f64> {
        if v <= 0.0 || !v.is_finite() {
            return Err(Error::NonPositiveArgument(v));
        }
        match &self.form {
            DensityForm::Exponential(e) => Ok(e.eval(v)),
            DensityForm::Theta(t) => t.eval(v),
        }
    }

    pub fn laplace(&self, y: C64) -> C64 {
        match &self.form {
            DensityForm::Exponential(e) => e.laplace(y),
            DensityForm::Theta(t) => t.laplace(y),
        }
    }
}

/// `nu1` (or `nu2`) of general parameters: `factor * g(arg_scale * v)` with
/// `g` the normalized density.
#[derive(Clone, Debug, PartialEq)]
pub struct LateralDensity {
    pub normalized: NormalizedDensity,
    pub factor: f64,
    pub arg_scale: f64,
    pub axis: Axis,
}

pub fn nu1(params: &ModelParams) -> Result<LateralDensity> {
    let (n, c) = analyze(params)?;
    let q = to_float(&n.scale.q);
    let (s1, s2) = (to_float(&n.scale.sigma1), to_float(&n.scale.sigma2));
    Ok(LateralDensity {
        normalized: NormalizedDensity::build(&c)?,
        factor: q * q * s1 / s2,
        arg_scale: q / s2,
        axis: Axis::Phi1,
    })
}

pub fn nu2(params: &ModelParams) -> Result<LateralDensity> {
    let mut d = nu1(&params.swap())?;
    d.axis = Axis::Phi2;
    Ok(d)
}

impl LateralDensity {
    pub fn eval(&self, v: f64) -> Result<f64> {
        Ok(self.factor * self.normalized.eval(self.arg_scale * v)?)
    }

    pub fn laplace(&self, y: C64) -> C64 {
        self.factor / self.arg_scale * self.normalized.laplace(y / self.arg_scale)
    }

    pub fn mass(&self) -> f64 {
        self.factor / self.arg_scale * self.normalized.mass
    }

    pub fn tail_rate(&self) -> f64 {
        self.normalized.min_rate * self.arg_scale
    }

    pub fn quadrature_laplace(&self, y: f64) -> Result<f64> {
        laplace_quadrature_oracle(&|v| self.eval(v), y, self.tail_rate())
    }

    pub fn quadrature_mass(&self) -> Result<f64> {
        integrate_semi_infinite(&|v| self.eval(v), self.tail_rate(), 1e-12)
    }

    /// Values and cumulative mass on `points` equally spaced nodes of `(0, vmax]`.
    pub fn curve(&self, vmax: f64, points: usize) -> Result<Vec<(f64, f64, f64)>> {
        let mut out = Vec::with_capacity(points);
        let mut cum = 0.0;
        let mut prev = 0.0;
        for i in 1..=points {
            let v = vmax * i as f64 / points as f64;
            cum += integrate(&|t| if t > 0.0 { self.eval(t) } else { Ok(0.0) }, prev, v, 1e-12)?;
            out.push((v, self.eval(v)?, cum));
            prev = v;
        }
        Ok(out)
    }

    pub fn curve_csv(&self, vmax: f64, points: usize) -> Result<String> {
        let name = match self.axis {
            Axis::Phi1 => "nu1",
            Axis::Phi2 => "nu2",
        };
        let mut s = format!("v,{name},mass\n");
        for (v, d, m) in self.curve(vmax, points)? {
            writeln!(s, "{v:.16e},{d:.16e},{m:.16e}").unwrap();
        }
        Ok(s)
    }
}
