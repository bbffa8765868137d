//! Model parameters in exact rational arithmetic: hypotheses, normalization,
//! derived constants and the differential classification.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::Error;

pub type Rational = Ratio<i128>;

pub fn rat(n: i128, d: i128) -> Rational {
    Ratio::new(n, d)
}

/// The single float gateway used by every evaluation module.
pub fn to_float(q: &Rational) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// Parses `p/q` or `p`. Decimal strings are rejected on purpose.
pub fn parse_rational(text: &str) -> Result<Rational, Error> {
    let t = text.trim();
    Rational::from_str(t).map_err(|_| Error::Parse(t.to_string()))
}

pub fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn is_natural(q: &Rational) -> bool {
    q.is_integer() && q.is_positive()
}

pub fn is_neg_natural(q: &Rational) -> bool {
    q.is_integer() && q.is_negative()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModelParams {
    pub mu1: Rational,
    pub mu2: Rational,
    pub sigma1: Rational,
    pub sigma2: Rational,
    pub r1: Rational,
    pub r2: Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Hypothesis {
    H1,
    H2,
    H3,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypothesisFailure {
    pub hypothesis: Hypothesis,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub failures: Vec<HypothesisFailure>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn failed(&self, h: Hypothesis) -> bool {
        self.failures.iter().any(|f| f.hypothesis == h)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return write!(f, "all hypotheses hold");
        }
        let parts: Vec<String> = self
            .failures
            .iter()
            .map(|x| format!("{:?}: {}", x.hypothesis, x.detail))
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}

impl ModelParams {
    pub fn new(
        mu1: Rational,
        mu2: Rational,
        sigma1: Rational,
        sigma2: Rational,
        r1: Rational,
        r2: Rational,
    ) -> Self {
        ModelParams { mu1, mu2, sigma1, sigma2, r1, r2 }
    }

    /// Unit variances.
    pub fn unit(mu1: Rational, mu2: Rational, r1: Rational, r2: Rational) -> Self {
        Self::new(mu1, mu2, Rational::one(), Rational::one(), r1, r2)
    }

    /// Builds normalized parameters with prescribed exponents `gamma1`, `gamma2`.
    pub fn from_exponents(mu1: Rational, gamma1: Rational, gamma2: Rational) -> Option<Self> {
        let one = Rational::one();
        let mu2 = one - mu1;
        let d1 = gamma1 + mu1;
        let d2 = gamma2 + mu2;
        if d1.is_zero() || d2.is_zero() {
            return None;
        }
        let r1 = (one + mu2 - gamma1) / d1;
        let r2 = (one + mu1 - gamma2) / d2;
        let p = Self::unit(mu1, mu2, r1, r2);
        p.validate().passed().then_some(p)
    }

    /// `r1 = -1` with prescribed `gamma2`.
    pub fn with_r1_minus_one(mu1: Rational, gamma2: Rational) -> Option<Self> {
        let one = Rational::one();
        let mu2 = one - mu1;
        let d2 = gamma2 + mu2;
        if d2.is_zero() {
            return None;
        }
        let r2 = (one + mu1 - gamma2) / d2;
        let p = Self::unit(mu1, mu2, -one, r2);
        p.validate().passed().then_some(p)
    }

    /// `r2 = -1` with prescribed `gamma1`.
    pub fn with_r2_minus_one(mu1: Rational, gamma1: Rational) -> Option<Self> {
        let one = Rational::one();
        let mu2 = one - mu1;
        let d1 = gamma1 + mu1;
        if d1.is_zero() {
            return None;
        }
        let r1 = (one + mu2 - gamma1) / d1;
        let p = Self::unit(mu1, mu2, r1, -one);
        p.validate().passed().then_some(p)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut failures = Vec::new();
        let one = Rational::one();
        let det = one - self.r1 * self.r2;
        if !(det.is_positive() || (self.r1.is_positive() && self.r2.is_positive())) {
            failures.push(HypothesisFailure {
                hypothesis: Hypothesis::H1,
                detail: format!(
                    "1 - r1*r2 = {} <= 0 and not both r1, r2 > 0",
                    fmt_rational(&det)
                ),
            });
        }
        let a = self.mu1 - self.r2 * self.mu2;
        let b = self.mu2 - self.r1 * self.mu1;
        if !a.is_positive() {
            failures.push(HypothesisFailure {
                hypothesis: Hypothesis::H2,
                detail: format!("mu1 - r2*mu2 = {} <= 0", fmt_rational(&a)),
            });
        }
        if !b.is_positive() {
            failures.push(HypothesisFailure {
                hypothesis: Hypothesis::H2,
                detail: format!("mu2 - r1*mu1 = {} <= 0", fmt_rational(&b)),
            });
        }
        if !self.mu1.is_positive() || !self.mu2.is_positive() {
            failures.push(HypothesisFailure {
                hypothesis: Hypothesis::H3,
                detail: format!(
                    "mu = ({}, {}) not positive",
                    fmt_rational(&self.mu1),
                    fmt_rational(&self.mu2)
                ),
            });
        }
        ValidationReport { failures }
    }

    pub fn normalize(&self) -> Result<NormalizedParams, Error> {
        if !self.sigma1.is_positive() || !self.sigma2.is_positive() {
            return Err(Error::NonPositiveSigma);
        }
        let report = self.validate();
        if !report.passed() {
            return Err(Error::Hypothesis(report));
        }
        let q = self.mu1 / self.sigma1 + self.mu2 / self.sigma2;
        Ok(NormalizedParams {
            mu1: self.mu1 / (self.sigma1 * q),
            mu2: self.mu2 / (self.sigma2 * q),
            r1: self.r1 * self.sigma1 / self.sigma2,
            r2: self.r2 * self.sigma2 / self.sigma1,
            scale: Scale { q, sigma1: self.sigma1, sigma2: self.sigma2 },
        })
    }

    pub fn is_normalized(&self) -> bool {
        self.sigma1.is_one() && self.sigma2.is_one() && (self.mu1 + self.mu2).is_one()
    }

    /// Boundary masses `(phi1(0), phi2(0))`, which do not depend on the variances.
    pub fn boundary_masses(&self) -> (Rational, Rational) {
        let det = Rational::one() - self.r1 * self.r2;
        let two = Rational::from_integer(2);
        (
            two * (self.mu1 - self.r2 * self.mu2) / det,
            two * (self.mu2 - self.r1 * self.mu1) / det,
        )
    }

    pub fn swap(&self) -> Self {
        Self::new(self.mu2, self.mu1, self.sigma2, self.sigma1, self.r2, self.r1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Preset {
    Symmetric,
    Skew,
    AppendixR1,
    AppendixR2,
    Transcendental,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::Symmetric,
        Preset::Skew,
        Preset::AppendixR1,
        Preset::AppendixR2,
        Preset::Transcendental,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Symmetric => "symmetric",
            Preset::Skew => "skew",
            Preset::AppendixR1 => "appendix-r1",
            Preset::AppendixR2 => "appendix-r2",
            Preset::Transcendental => "transcendental",
        }
    }

    pub fn params(self) -> ModelParams {
        let h = rat(1, 2);
        match self {
            Preset::Symmetric => ModelParams::unit(h, h, rat(-1, 2), rat(-1, 2)),
            Preset::Skew => ModelParams::unit(rat(1, 4), rat(3, 4), rat(1, 1), rat(-3, 1)),
            Preset::AppendixR1 => ModelParams::unit(h, h, rat(-1, 1), rat(1, 3)),
            Preset::AppendixR2 => ModelParams::unit(h, h, rat(1, 3), rat(-1, 1)),
            Preset::Transcendental => ModelParams::unit(h, h, rat(1, 2), rat(1, 3)),
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Preset::ALL
            .iter()
            .copied()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scale {
    pub q: Rational,
    pub sigma1: Rational,
    pub sigma2: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedParams {
    pub mu1: Rational,
    pub mu2: Rational,
    pub r1: Rational,
    pub r2: Rational,
    pub scale: Scale,
}

impl NormalizedParams {
    pub fn as_params(&self) -> ModelParams {
        ModelParams::unit(self.mu1, self.mu2, self.r1, self.r2)
    }

    pub fn swap(&self) -> Self {
        NormalizedParams {
            mu1: self.mu2,
            mu2: self.mu1,
            r1: self.r2,
            r2: self.r1,
            scale: Scale {
                q: self.scale.q,
                sigma1: self.scale.sigma2,
                sigma2: self.scale.sigma1,
            },
        }
    }

    pub fn derive(&self) -> Result<DerivedConstants, Error> {
        DerivedConstants::new(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedConstants {
    pub mu1: Rational,
    pub mu2: Rational,
    pub r1: Rational,
    pub r2: Rational,
    pub s1: Option<Rational>,
    pub s2: Option<Rational>,
    pub s_minus: Rational,
    pub s_plus: Rational,
    pub gamma: Option<Rational>,
    pub gamma1: Option<Rational>,
    pub gamma2: Option<Rational>,
}

impl DerivedConstants {
    fn new(p: &NormalizedParams) -> Result<Self, Error> {
        let one = Rational::one();
        let two = Rational::from_integer(2);
        let (mu1, mu2, r1, r2) = (p.mu1, p.mu2, p.r1, p.r2);
        let s1 = (!(one + r1).is_zero()).then(|| (r1 * mu1 - mu2) / (one + r1));
        let s2 = (!(one + r2).is_zero()).then(|| (mu1 - r2 * mu2) / (one + r2));
        let gamma1 = s1.map(|s| mu1 - two * s);
        let gamma2 = s2.map(|s| mu2 + two * s);
        let gamma = match (s1, s2) {
            (Some(a), Some(b)) => Some(b - a),
            _ => None,
        };
        let c = DerivedConstants {
            mu1,
            mu2,
            r1,
            r2,
            s1,
            s2,
            s_minus: -mu2 / two,
            s_plus: mu1 / two,
            gamma,
            gamma1,
            gamma2,
        };
        c.check()?;
        Ok(c)
    }

    fn check(&self) -> Result<(), Error> {
        let fail = |m: &str| Err(Error::Internal(m.to_string()));
        let zero = Rational::zero();
        if let Some(s1) = self.s1 {
            if s1 >= zero && s1 <= self.mu1 {
                return fail("s1 lies in [0, mu1]");
            }
        }
        if let Some(s2) = self.s2 {
            if s2 >= -self.mu2 && s2 <= zero {
                return fail("s2 lies in [-mu2, 0]");
            }
        }
        if self.s1.is_some() && self.s1 == self.s2 {
            return fail("s1 = s2");
        }
        if self.gamma1.is_some_and(|g| g.is_zero()) || self.gamma2.is_some_and(|g| g.is_zero()) {
            return fail("gamma1 or gamma2 vanishes");
        }
        if let (Some(g), Some(g1), Some(g2)) = (self.gamma, self.gamma1, self.gamma2) {
            if g.is_zero() {
                return fail("gamma vanishes");
            }
            if g1 + g2 != Rational::from_integer(2) * g + Rational::one() {
                return fail("gamma1 + gamma2 != 2 gamma + 1");
            }
            if g1.is_negative() && g2.is_negative() {
                return fail("gamma1 < 0 and gamma2 < 0");
            }
            if g.is_positive() && (g1.is_negative() != g2.is_negative()) {
                return fail("gamma1, gamma2 of opposite signs with gamma > 0");
            }
        }
        if self.s1.is_none() && !self.gamma2.is_some_and(|g| g.is_positive()) {
            return fail("gamma2 <= 0 with r1 = -1");
        }
        if self.s2.is_none() && !self.gamma1.is_some_and(|g| g.is_positive()) {
            return fail("gamma1 <= 0 with r2 = -1");
        }
        Ok(())
    }

    pub fn r1_minus_one(&self) -> bool {
        self.s1.is_none()
    }

    pub fn r2_minus_one(&self) -> bool {
        self.s2.is_none()
    }

    pub fn classify(&self) -> NatureClass {
        use Trigger::*;
        use Verdict::*;
        let (verdict, trigger) = if self.r1_minus_one() {
            if self.gamma2.as_ref().is_some_and(is_natural) {
                (DAlgebraicNotDFinite, R1MinusOneGamma2Nat)
            } else {
                (DTranscendental, NoDecoupling)
            }
        } else if self.r2_minus_one() {
            if self.gamma1.as_ref().is_some_and(is_natural) {
                (DAlgebraicNotDFinite, R2MinusOneGamma1Nat)
            } else {
                (DTranscendental, NoDecoupling)
            }
        } else {
            let g = self.gamma.expect("gamma present");
            let g1 = self.gamma1.expect("gamma1 present");
            let g2 = self.gamma2.expect("gamma2 present");
            if is_neg_natural(&g) {
                (Rational, GammaNegInt)
            } else if is_natural(&g) {
                (DAlgebraicNotDFinite, GammaPosInt)
            } else if g1.is_integer() && g2.is_integer() {
                (DAlgebraicNotDFinite, Gamma12Int)
            } else {
                (DTranscendental, NoDecoupling)
            }
        };
        NatureClass { verdict, trigger }
    }

    /// Float view used by the evaluation modules.
    pub fn floats(&self) -> FloatConstants {
        FloatConstants {
            mu1: to_float(&self.mu1),
            mu2: to_float(&self.mu2),
            r1: to_float(&self.r1),
            r2: to_float(&self.r2),
            s1: self.s1.as_ref().map(to_float),
            s2: self.s2.as_ref().map(to_float),
            s_minus: to_float(&self.s_minus),
            s_plus: to_float(&self.s_plus),
        }
    }

    /// `y(s) = 2 s (s - mu1)` in exact arithmetic.
    pub fn y_of(&self, s: Rational) -> Rational {
        Rational::from_integer(2) * s * (s - self.mu1)
    }

    /// `eta(s) = mu1 - s` in exact arithmetic.
    pub fn eta(&self, s: Rational) -> Rational {
        self.mu1 - s
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FloatConstants {
    pub mu1: f64,
    pub mu2: f64,
    pub r1: f64,
    pub r2: f64,
    pub s1: Option<f64>,
    pub s2: Option<f64>,
    pub s_minus: f64,
    pub s_plus: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Rational,
    DAlgebraicNotDFinite,
    DTranscendental,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Trigger {
    GammaNegInt,
    GammaPosInt,
    Gamma12Int,
    R1MinusOneGamma2Nat,
    R2MinusOneGamma1Nat,
    NoDecoupling,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct NatureClass {
    pub verdict: Verdict,
    pub trigger: Trigger,
}

/// Validates, normalizes and derives in one go.
pub fn analyze(params: &ModelParams) -> Result<(NormalizedParams, DerivedConstants), Error> {
    let n = params.normalize()?;
    let c = n.derive()?;
    Ok((n, c))
}
