//! Special functions: complex log-Gamma, the entire functions `cos sqrt z` and
//! `sin sqrt z / sqrt z`, decoupling functions, stable meromorphic products and
//! theta-type series in their direct and Poisson-summed forms.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::model::{is_natural, to_float, DerivedConstants, Rational};

pub type C64 = Complex64;

const POLE_EPS: f64 = 1e-12;

// B_{2k} / (2k (2k - 1)), k = 1..10
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

/// Log-Gamma on a branch continuous along the positive real axis. Only
/// differences of it are ever exponentiated.
pub fn log_gamma(z: C64) -> Result<C64> {
    if z.re < 0.5 {
        let n = z.re.round();
        if n <= 0.0 && (z - n).norm() < POLE_EPS {
            return Err(Error::PoleOfGamma(format!("{z}")));
        }
        let rest = log_gamma(C64::new(1.0, 0.0) - z)?;
        return Ok(C64::new(PI.ln(), 0.0) - log_sin_pi(z) - rest);
    }
    let mut w = z;
    let mut prod = C64::new(1.0, 0.0);
    while w.norm() < 10.0 {
        prod *= w;
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = C64::new(0.0, 0.0);
    let mut pow = inv;
    for c in STIRLING {
        series += c * pow;
        pow *= inv2;
    }
    let stirling = (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + series;
    Ok(stirling - prod.ln())
}

pub fn gamma(z: C64) -> Result<C64> {
    Ok(log_gamma(z)?.exp())
}

/// `ln sin(pi z)` without overflow for large imaginary parts.
pub fn log_sin_pi(z: C64) -> C64 {
    let i = C64::i();
    if z.im > 20.0 {
        let e = (2.0 * PI * i * z).exp();
        -PI * i * z + (C64::new(1.0, 0.0) - e).ln() - (-2.0 * i).ln()
    } else if z.im < -20.0 {
        let e = (-2.0 * PI * i * z).exp();
        PI * i * z + (C64::new(1.0, 0.0) - e).ln() - (2.0 * i).ln()
    } else {
        (PI * z).sin().ln()
    }
}

fn series_even(z: C64, odd: bool) -> C64 {
    // sum (-z)^k / (2k)!  or  sum (-z)^k / (2k+1)!
    let mut term = C64::new(1.0, 0.0);
    let mut sum = term;
    let shift = if odd { 1.0 } else { 0.0 };
    for k in 1..40 {
        let k = k as f64;
        term *= -z / ((2.0 * k - 1.0 + shift) * (2.0 * k + shift));
        sum += term;
        if term.norm() < 1e-18 * sum.norm() {
            break;
        }
    }
    sum
}

/// `cos(sqrt z)`, entire in `z`.
pub fn cos_sqrt(z: C64) -> C64 {
    if z.norm() < 1.0 {
        series_even(z, false)
    } else {
        z.sqrt().cos()
    }
}

/// `sin(sqrt z) / sqrt z`, entire in `z`.
pub fn sinc_sqrt(z: C64) -> C64 {
    if z.norm() < 1.0 {
        series_even(z, true)
    } else {
        let r = z.sqrt();
        r.sin() / r
    }
}

/// `sin(pi t) / (pi t)`.
pub fn sinc_pi(t: C64) -> C64 {
    sinc_sqrt(PI * PI * t * t)
}

/// `sin(pi q)` for exact `q`, reduced modulo 2 first.
pub fn sin_pi_rational(q: &Rational) -> f64 {
    let two = Rational::from_integer(2);
    let r = *q - (*q / two).floor() * two;
    if r.is_integer() {
        return 0.0;
    }
    (PI * to_float(&r)).sin()
}

pub fn cos_pi_rational(q: &Rational) -> f64 {
    sin_pi_rational(&(*q + Rational::new(1, 2)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialReal {
    pub coefficients: Vec<f64>,
}

impl PolynomialReal {
    pub fn one() -> Self {
        PolynomialReal { coefficients: vec![1.0] }
    }

    pub fn from_roots(roots: &[f64]) -> Self {
        let mut c = vec![1.0];
        for &r in roots {
            let mut next = vec![0.0; c.len() + 1];
            for (i, &a) in c.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= r * a;
            }
            c = next;
        }
        PolynomialReal { coefficients: c }
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn eval(&self, x: C64) -> C64 {
        self.coefficients
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &a| acc * x + a)
    }

    pub fn eval_real(&self, x: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, &a| acc * x + a)
    }
}

/// Zeros and poles in `s` of a rational decoupling function,
/// `D(s) = prod (s - a) / prod (s - b)` with no extra constant.
#[derive(Clone, Debug, PartialEq)]
pub struct SRoots {
    pub zeros: Vec<Rational>,
    pub poles: Vec<Rational>,
}

/// Which Gamma quotients make up the decoupling function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecouplingGamma {
    pub s1: Option<f64>,
    pub s2: Option<f64>,
    pub mu2: f64,
}

impl DecouplingGamma {
    pub fn new(c: &DerivedConstants) -> Self {
        DecouplingGamma {
            s1: c.s1.as_ref().map(to_float),
            s2: c.s2.as_ref().map(to_float),
            mu2: to_float(&c.mu2),
        }
    }

    fn log_parts(&self, s: C64) -> (Vec<C64>, Vec<C64>) {
        let mut num = Vec::new();
        let mut den = Vec::new();
        if let Some(s1) = self.s1 {
            num.push(s - s1);
            den.push(s + s1 + self.mu2);
        }
        if let Some(s2) = self.s2 {
            num.push(s + s2 + self.mu2);
            den.push(s - s2);
        }
        (num, den)
    }

    pub fn log_eval(&self, s: C64) -> Result<Option<C64>> {
        let (num, den) = self.log_parts(s);
        let mut acc = C64::new(0.0, 0.0);
        for z in num {
            acc += log_gamma(z).map_err(|_| Error::PoleOfD(format!("{s}")))?;
        }
        for z in den {
            match log_gamma(z) {
                Ok(l) => acc -= l,
                Err(_) => return Ok(None),
            }
        }
        Ok(Some(acc))
    }

    pub fn eval(&self, s: C64) -> Result<C64> {
        Ok(self.log_eval(s)?.map_or(C64::new(0.0, 0.0), |l| l.exp()))
    }
}

/// Zeros and poles of the decoupling function when it is rational.
pub fn decoupling_s_roots(c: &DerivedConstants) -> Option<SRoots> {
    let one = Rational::one();
    let mut zeros = Vec::new();
    let mut poles = Vec::new();
    let range = |n: i128| (0..n).map(Rational::from_integer);
    let part_a = |g1: Rational, s1: Rational, zeros: &mut Vec<Rational>, poles: &mut Vec<Rational>| {
        let n = g1.to_integer();
        if n >= 1 {
            zeros.extend(range(n - 1).map(|k| s1 + k + one));
        } else {
            poles.extend(range(-n + 1).map(|k| s1 - k));
        }
    };
    let part_b = |g2: Rational, s2: Rational, zeros: &mut Vec<Rational>, poles: &mut Vec<Rational>| {
        let n = g2.to_integer();
        if n >= 1 {
            zeros.extend(range(n).map(|k| s2 - k));
        } else {
            poles.extend(range(-n).map(|k| s2 + k + one));
        }
    };
    match (c.s1, c.s2, c.gamma, c.gamma1, c.gamma2) {
        (Some(s1), Some(_), Some(g), Some(g1), Some(g2)) => {
            if g.is_integer() {
                let m = g.to_integer();
                if m < 0 {
                    poles.extend(range(-m).map(|j| s1 - j));
                    poles.extend(range(-m).map(|j| -s1 - c.mu2 + j + one));
                } else {
                    zeros.extend(range(m).map(|j| s1 + j + one));
                    zeros.extend(range(m).map(|j| -s1 - c.mu2 - j));
                }
            } else if g1.is_integer() && g2.is_integer() {
                part_a(g1, s1, &mut zeros, &mut poles);
                part_b(g2, c.s2.unwrap(), &mut zeros, &mut poles);
            } else {
                return None;
            }
        }
        (None, Some(s2), _, _, Some(g2)) if is_natural(&g2) => {
            part_b(g2, s2, &mut zeros, &mut poles);
        }
        (Some(s1), None, _, Some(g1), _) if is_natural(&g1) => {
            part_a(g1, s1, &mut zeros, &mut poles);
        }
        _ => return None,
    }
    Some(SRoots { zeros, poles })
}

/// `D(s) = prefactor * P(y(s)) / Q(y(s)) * (sqrt2 (s - s+))^epsilon`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalDecoupling {
    pub p_roots: Vec<Rational>,
    pub q_roots: Vec<Rational>,
    pub p: PolynomialReal,
    pub q: PolynomialReal,
    pub epsilon: i32,
    pub prefactor: f64,
    pub mu1: f64,
    pub s_plus: f64,
}

impl RationalDecoupling {
    pub fn eval(&self, s: C64) -> C64 {
        let y = 2.0 * s * (s - self.mu1);
        let mut v = self.prefactor * self.p.eval(y) / self.q.eval(y);
        let lin = std::f64::consts::SQRT_2 * (s - self.s_plus);
        match self.epsilon {
            1 => v *= lin,
            -1 => v /= lin,
            _ => {}
        }
        v
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DecouplingForm {
    GammaQuotient(DecouplingGamma),
    RationalForm(RationalDecoupling),
}

impl DecouplingForm {
    pub fn eval(&self, s: C64) -> Result<C64> {
        match self {
            DecouplingForm::GammaQuotient(g) => g.eval(s),
            DecouplingForm::RationalForm(r) => Ok(r.eval(s)),
        }
    }
}

/// Pairs `s`-roots under `s -> mu1 - s` into roots in `y`. Returns the
/// `y`-roots and whether an unpaired root is left at `s+`.
pub fn pair_roots(c: &DerivedConstants, roots: &[Rational]) -> Result<(Vec<Rational>, i32)> {
    let mut rest: Vec<Rational> = roots.to_vec();
    let mut ys = Vec::new();
    let mut centre = 0;
    while let Some(a) = rest.pop() {
        if a == c.s_plus {
            centre += 1;
            continue;
        }
        let partner = c.eta(a);
        match rest.iter().position(|&b| b == partner) {
            Some(i) => {
                rest.swap_remove(i);
                ys.push(c.y_of(a));
            }
            None => {
                return Err(Error::Internal(format!(
                    "root {a} of the decoupling function has no partner"
                )))
            }
        }
    }
    for _ in 0..centre / 2 {
        ys.push(c.y_of(c.s_plus));
    }
    ys.sort();
    Ok((ys, centre % 2))
}

/// The rational form, or `None` when no rational decoupling exists.
pub fn decoupling_rational(c: &DerivedConstants) -> Result<Option<RationalDecoupling>> {
    let Some(roots) = decoupling_s_roots(c) else {
        return Ok(None);
    };
    let (p_roots, ep) = pair_roots(c, &roots.zeros)?;
    let (q_roots, eq) = pair_roots(c, &roots.poles)?;
    let epsilon = ep - eq;
    if epsilon.abs() > 1 {
        return Err(Error::Internal("centre multiplicity above one".into()));
    }
    let d = roots.zeros.len() as i32 - roots.poles.len() as i32;
    let fl = |v: &Vec<Rational>| v.iter().map(to_float).collect::<Vec<_>>();
    Ok(Some(RationalDecoupling {
        p: PolynomialReal::from_roots(&fl(&p_roots)),
        q: PolynomialReal::from_roots(&fl(&q_roots)),
        p_roots,
        q_roots,
        epsilon,
        prefactor: 2f64.powf(-(d as f64) / 2.0),
        mu1: to_float(&c.mu1),
        s_plus: to_float(&c.s_plus),
    }))
}

/// `scale * prod (s - a) / prod (s - b) * prod sin pi(s - c) / prod sin pi(s - d)`,
/// evaluated so that a linear factor and a sine vanishing at the same point
/// cancel analytically.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct MeroProduct {
    pub scale: f64,
    pub zeros: Vec<f64>,
    pub poles: Vec<f64>,
    pub sin_zeros: Vec<f64>,
    pub sin_poles: Vec<f64>,
}

fn integer_offset(a: f64, b: f64) -> Option<i64> {
    let d = a - b;
    let k = d.round();
    ((d - k).abs() < 1e-9).then_some(k as i64)
}

fn parity(k: i64) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

fn nearest_partner(
    s: C64,
    roots: &[f64],
    used: &[bool],
    base: f64,
) -> Option<(usize, i64)> {
    roots
        .iter()
        .enumerate()
        .filter(|(i, _)| !used[*i])
        .filter_map(|(i, &a)| integer_offset(a, base).map(|k| (i, k, (s - a).norm())))
        .filter(|&(_, _, d)| d < 0.5)
        .min_by(|x, y| x.2.total_cmp(&y.2))
        .map(|(i, k, _)| (i, k))
}

fn sin_pi_factor(t: C64, v: &mut C64, lg: &mut C64, sign: f64) {
    if t.im.abs() > 20.0 {
        *lg += sign * log_sin_pi(t);
    } else if sign > 0.0 {
        *v *= (PI * t).sin();
    } else {
        *v /= (PI * t).sin();
    }
}

impl MeroProduct {
    pub fn eval(&self, s: C64) -> C64 {
        let mut v = C64::new(self.scale, 0.0);
        let mut lg = C64::new(0.0, 0.0);
        let mut zu = vec![false; self.zeros.len()];
        let mut pu = vec![false; self.poles.len()];
        for &d in &self.sin_poles {
            match nearest_partner(s, &self.zeros, &zu, d) {
                Some((i, k)) => {
                    zu[i] = true;
                    v *= parity(k) / (PI * sinc_pi(s - self.zeros[i]));
                }
                None => sin_pi_factor(s - d, &mut v, &mut lg, -1.0),
            }
        }
        for &c in &self.sin_zeros {
            match nearest_partner(s, &self.poles, &pu, c) {
                Some((i, k)) => {
                    pu[i] = true;
                    v *= parity(k) * PI * sinc_pi(s - self.poles[i]);
                }
                None => sin_pi_factor(s - c, &mut v, &mut lg, 1.0),
            }
        }
        for (i, &a) in self.zeros.iter().enumerate() {
            if !zu[i] {
                v *= s - a;
            }
        }
        for (i, &b) in self.poles.iter().enumerate() {
            if !pu[i] {
                v /= s - b;
            }
        }
        if lg != C64::new(0.0, 0.0) {
            v *= lg.exp();
        }
        v
    }
}

/// `scale * prod Gamma(sign * s + shift)^power`.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaProduct {
    pub scale: f64,
    pub factors: Vec<(f64, f64, i32)>,
}

impl GammaProduct {
    pub fn eval(&self, s: C64) -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for &(sign, shift, power) in &self.factors {
            match log_gamma(sign * s + shift) {
                Ok(l) => acc += f64::from(power) * l,
                Err(_) if power < 0 => return Ok(C64::new(0.0, 0.0)),
                Err(_) => return Err(Error::PoleOfPhi1(format!("{s}"))),
            }
        }
        Ok(self.scale * acc.exp())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThetaKind {
    /// weights `n + gamma1/2`, exponents `((2n + gamma1)^2 - mu1^2)/2`
    ThetaA,
    /// weights `(-1)^n n^2`, exponents `(n^2 - mu1^2)/2`
    ThetaB,
    /// weights `(-1)^n`, exponents `(4n^2 - mu1^2)/2`
    Alternating,
    /// weights `4n + 1`, exponents `((4n + 1)^2 - mu1^2)/2`
    Quarter,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    Direct,
    PoissonSummed,
    Auto,
}

/// A theta-type series in `q = e^{-v}`, optionally hit by the operator
/// `P(-d/dv)` for a monic `P` given by its roots.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaSeries {
    pub kind: ThetaKind,
    pub gamma1: Rational,
    pub mu1: Rational,
    pub truncation: f64,
    pub operator_roots: Vec<Rational>,
}

const MAX_TERMS: i64 = 2_000_000;

impl ThetaSeries {
    pub fn new(kind: ThetaKind, gamma1: Rational, mu1: Rational) -> Self {
        ThetaSeries { kind, gamma1, mu1, truncation: 1e-14, operator_roots: Vec::new() }
    }

    pub fn theta_a(gamma1: Rational, mu1: Rational) -> Self {
        Self::new(ThetaKind::ThetaA, gamma1, mu1)
    }

    pub fn theta_b(mu1: Rational) -> Self {
        Self::new(ThetaKind::ThetaB, Rational::zero(), mu1)
    }

    pub fn with_operator(mut self, roots: Vec<Rational>) -> Self {
        self.operator_roots = roots;
        self
    }

    pub fn alpha(&self, n: i64) -> Rational {
        let n = Rational::from_integer(n as i128);
        let two = Rational::from_integer(2);
        match self.kind {
            ThetaKind::ThetaA => two * n + self.gamma1,
            ThetaKind::ThetaB => n,
            ThetaKind::Alternating => two * n,
            ThetaKind::Quarter => Rational::from_integer(4) * n + Rational::one(),
        }
    }

    pub fn weight(&self, n: i64) -> f64 {
        let sign = parity(n);
        match self.kind {
            ThetaKind::ThetaA => to_float(&self.alpha(n)) / 2.0,
            ThetaKind::ThetaB => sign * (n as f64) * (n as f64),
            ThetaKind::Alternating => sign,
            ThetaKind::Quarter => to_float(&self.alpha(n)),
        }
    }

    pub fn rate(&self, n: i64) -> Rational {
        let a = self.alpha(n);
        (a * a - self.mu1 * self.mu1) / Rational::from_integer(2)
    }

    fn centre(&self) -> i64 {
        match self.kind {
            ThetaKind::ThetaA => (-self.gamma1 / Rational::from_integer(2)).round().to_integer() as i64,
            _ => 0,
        }
    }

    /// `P(rate_n)`, exactly zero when the rate is a root.
    pub fn operator_factor(&self, rate: &Rational) -> f64 {
        if self.operator_roots.iter().any(|r| r == rate) {
            return 0.0;
        }
        let x = to_float(rate);
        self.operator_roots.iter().map(|r| x - to_float(r)).product()
    }

    /// The term `weight * P(rate) * e^{-rate v}`, or zero when annihilated.
    pub fn term(&self, n: i64, v: f64) -> f64 {
        let rate = self.rate(n);
        let f = self.operator_factor(&rate);
        if f == 0.0 {
            return 0.0;
        }
        self.weight(n) * f * (-to_float(&rate) * v).exp()
    }

    /// Terms with nonzero coefficient whose exponent is not positive.
    pub fn nonpositive_rates(&self) -> Vec<(i64, Rational)> {
        let c = self.centre();
        let mut out = Vec::new();
        for n in (c - 64)..=(c + 64) {
            let rate = self.rate(n);
            if rate <= Rational::zero() && self.weight(n) != 0.0 && self.operator_factor(&rate) != 0.0 {
                out.push((n, rate));
            }
        }
        out
    }

    /// Smallest exponent among terms that survive the operator.
    pub fn min_active_rate(&self) -> Rational {
        let c = self.centre();
        ((c - 64)..=(c + 64))
            .filter(|&n| self.weight(n) != 0.0)
            .map(|n| self.rate(n))
            .filter(|r| self.operator_factor(r) != 0.0)
            .min()
            .unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, v: f64, rep: Representation) -> Result<f64> {
        if v <= 0.0 || !v.is_finite() {
            return Err(Error::NonPositiveArgument(v));
        }
        match rep {
            Representation::Direct => self.direct(v),
            Representation::PoissonSummed => self.poisson(v),
            Representation::Auto if v < 1.0 => self.poisson(v),
            Representation::Auto => self.direct(v),
        }
    }

    fn direct(&self, v: f64) -> Result<f64> {
        let c = self.centre();
        let deg = self.operator_roots.len() as f64;
        let tol = self.truncation;
        let mut sum = self.term(c, v);
        let mut quiet = 0;
        for m in 1..MAX_TERMS {
            let hi = self.term(c + m, v);
            let lo = self.term(c - m, v);
            sum += hi + lo;
            let a_hi = to_float(&self.alpha(c + m)).abs();
            let a_lo = to_float(&self.alpha(c - m)).abs();
            let past_peak = a_hi.min(a_lo).powi(2) * v >= 4.0 * (deg + 2.0);
            if past_peak && hi.abs() + lo.abs() <= tol * sum.abs().max(1e-300) {
                quiet += 1;
                if quiet >= 3 {
                    return Ok(sum);
                }
            } else {
                quiet = 0;
            }
        }
        Err(Error::NonConvergence(format!("direct theta series at v = {v}")))
    }

    /// Mode `k >= 1`: `(beta, leading power, coefficients)` of
    /// `sum_j c_j v^{p0 - j} e^{-beta / v}`, before the operator is applied.
    fn mode(&self, k: i64) -> (f64, f64, Vec<f64>) {
        let kf = k as f64;
        match self.kind {
            ThetaKind::ThetaA => {
                let s = sin_pi_rational(&(self.gamma1 * Rational::from_integer(k as i128)));
                (PI * PI * kf * kf / 2.0, -1.5, vec![2.0 * (PI / 2.0).powf(1.5) * kf * s])
            }
            ThetaKind::ThetaB => {
                let j = 2.0 * kf - 1.0;
                let c = 2.0 * (2.0 * PI).sqrt();
                (PI * PI * j * j / 2.0, -1.5, vec![c, -c * PI * PI * j * j])
            }
            ThetaKind::Alternating => {
                let j = 2.0 * kf - 1.0;
                (PI * PI * j * j / 8.0, -0.5, vec![2.0 * (PI / 2.0).sqrt()])
            }
            ThetaKind::Quarter => {
                let s = sin_pi_rational(&Rational::new(k as i128, 2));
                (PI * PI * kf * kf / 8.0, -1.5, vec![PI / 4.0 * (2.0 * PI).sqrt() * kf * s])
            }
        }
    }

    fn poisson(&self, v: f64) -> Result<f64> {
        let mu1 = to_float(&self.mu1);
        let a = mu1 * mu1 / 2.0;
        let roots: Vec<f64> = self.operator_roots.iter().map(to_float).collect();
        let mut sum = 0.0;
        let mut quiet = 0;
        for k in 1..MAX_TERMS {
            let (beta, p0, mut coeffs) = self.mode(k);
            let expo = a * v - beta / v;
            if expo < -745.0 {
                return Ok(sum);
            }
            for &rho in &roots {
                let mut next = vec![0.0; coeffs.len() + 2];
                for (j, &c) in coeffs.iter().enumerate() {
                    let p = p0 - j as f64;
                    next[j] -= (a + rho) * c;
                    next[j + 1] -= p * c;
                    next[j + 2] -= beta * c;
                }
                coeffs = next;
            }
            let laurent: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(j, &c)| c * v.powf(p0 - j as f64))
                .sum();
            let t = laurent * expo.exp();
            sum += t;
            if t.abs() <= self.truncation * sum.abs().max(1e-300) {
                quiet += 1;
                if quiet >= 2 && k >= 3 {
                    return Ok(sum);
                }
            } else {
                quiet = 0;
            }
        }
        Err(Error::NonConvergence(format!("Poisson theta series at v = {v}")))
    }

    /// Closed-form Laplace transform `int e^{yv} theta(e^{-v}) dv` (analytically
    /// continued), without the operator.
    pub fn laplace_closed_form(&self, y: C64) -> C64 {
        let mu1 = to_float(&self.mu1);
        let z = 2.0 * y + mu1 * mu1;
        match self.kind {
            ThetaKind::ThetaA => {
                let g = &self.gamma1;
                PI / 2.0 * sin_pi_rational(g) / (cos_sqrt(PI * PI * z) - cos_pi_rational(g))
            }
            ThetaKind::ThetaB => -2.0 / sinc_sqrt(PI * PI * z),
            ThetaKind::Alternating => -2.0 / (z * sinc_sqrt(PI * PI * z / 4.0)),
            ThetaKind::Quarter => PI / (2.0 * cos_sqrt(PI * PI * z / 4.0)),
        }
    }

    /// `P(y)` times the closed-form transform.
    pub fn laplace_with_operator(&self, y: C64) -> C64 {
        let p: C64 = self
            .operator_roots
            .iter()
            .map(|r| y - to_float(r))
            .product();
        p * self.laplace_closed_form(y)
    }
}

/// Whether `q` is a positive rational with `Re` sign checks done exactly.
pub fn is_positive(q: &Rational) -> bool {
    q.is_positive()
}
