//! Memoryless power-amplifier transfer functions with unit linear gain.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::types::ComplexVec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PaModel {
    IdealLinear,
    /// `y = x + a3·x·|x|²`. A complex `a3` adds AM/PM on top of AM/AM.
    ThirdOrder { a3: Complex64 },
    /// `y = x / (1 + |x/√p_sat|^{2S})^{1/(2S)}`.
    Rapp { smoothness: f64, p_sat: f64 },
    /// Phase-preserving clip at `√p_sat`: the output of an ideal per-antenna
    /// DPD followed by a saturating PA.
    SoftLimiter { p_sat: f64 },
}

impl PaModel {
    pub fn third_order(a3: f64) -> Self {
        PaModel::ThirdOrder { a3: Complex64::new(a3, 0.0) }
    }

    pub fn rapp(smoothness: f64, p_sat: f64) -> Result<Self> {
        let m = PaModel::Rapp { smoothness, p_sat };
        m.validate()?;
        Ok(m)
    }

    pub fn soft_limiter(p_sat: f64) -> Result<Self> {
        let m = PaModel::SoftLimiter { p_sat };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::param(format!("{name} must be positive and finite, got {v}")))
            }
        };
        match *self {
            PaModel::IdealLinear => Ok(()),
            PaModel::ThirdOrder { a3 } => {
                if a3.re.is_finite() && a3.im.is_finite() {
                    Ok(())
                } else {
                    Err(Error::param("a3 must be finite"))
                }
            }
            PaModel::Rapp { smoothness, p_sat } => {
                positive("smoothness S", smoothness)?;
                positive("p_sat", p_sat)
            }
            PaModel::SoftLimiter { p_sat } => positive("p_sat", p_sat),
        }
    }

    /// Same model with its saturation power replaced; models without one are
    /// returned unchanged.
    pub fn with_p_sat(self, p_sat: f64) -> Self {
        match self {
            PaModel::Rapp { smoothness, .. } => PaModel::Rapp { smoothness, p_sat },
            PaModel::SoftLimiter { .. } => PaModel::SoftLimiter { p_sat },
            other => other,
        }
    }

    pub fn p_sat(&self) -> Option<f64> {
        match *self {
            PaModel::Rapp { p_sat, .. } | PaModel::SoftLimiter { p_sat } => Some(p_sat),
            _ => None,
        }
    }

    #[inline]
    pub fn amplify(&self, x: Complex64) -> Complex64 {
        match *self {
            PaModel::IdealLinear => x,
            PaModel::ThirdOrder { a3 } => x + a3 * x * x.norm_sqr(),
            PaModel::Rapp { smoothness, p_sat } => {
                let ratio = x.norm_sqr() / p_sat;
                if ratio == 0.0 {
                    return x;
                }
                if smoothness == 2.0 {
                    x / (1.0 + ratio * ratio).sqrt().sqrt()
                } else {
                    x / (1.0 + ratio.powf(smoothness)).powf(0.5 / smoothness)
                }
            }
            PaModel::SoftLimiter { p_sat } => {
                let mag = x.norm();
                let limit = p_sat.sqrt();
                if mag <= limit {
                    x
                } else {
                    x * (limit / mag)
                }
            }
        }
    }

    pub fn amplify_vec(&self, x: &ComplexVec) -> ComplexVec {
        let y = x.iter().map(|&v| self.amplify(v)).collect();
        // Finite inputs map to finite outputs for every validated model.
        ComplexVec::new(y).expect("PA output stays finite")
    }
}

impl fmt::Display for PaModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PaModel::IdealLinear => write!(f, "linear"),
            PaModel::ThirdOrder { a3 } if a3.im == 0.0 => write!(f, "third-order:a3={}", a3.re),
            PaModel::ThirdOrder { a3 } => write!(f, "third-order:a3={},a3im={}", a3.re, a3.im),
            PaModel::Rapp { smoothness, p_sat } => write!(f, "rapp:S={smoothness},psat={p_sat}"),
            PaModel::SoftLimiter { p_sat } => write!(f, "softlim:psat={p_sat}"),
        }
    }
}

/// Parses `linear`, `third-order:a3=-0.05[,a3im=..]`, `rapp:S=2,psat=1`
/// and `softlim:psat=1`.
impl FromStr for PaModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, args) = match s.split_once(':') {
            Some((k, a)) => (k.trim(), a.trim()),
            None => (s, ""),
        };
        let mut pairs = Vec::new();
        for item in args.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::param(format!("PA argument `{item}` is not key=value")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::param(format!("PA argument `{item}` has a non-numeric value")))?;
            pairs.push((k.trim().to_string(), v));
        }
        let take = |pairs: &mut Vec<(String, f64)>, key: &str| -> Option<f64> {
            let pos = pairs.iter().position(|(k, _)| k.eq_ignore_ascii_case(key))?;
            Some(pairs.remove(pos).1)
        };
        let required = |v: Option<f64>, key: &str| {
            v.ok_or_else(|| Error::param(format!("PA model `{kind}` needs `{key}=`")))
        };
        let model = match kind {
            "linear" => PaModel::IdealLinear,
            "third-order" => {
                let re = required(take(&mut pairs, "a3"), "a3")?;
                let im = take(&mut pairs, "a3im").unwrap_or(0.0);
                PaModel::ThirdOrder { a3: Complex64::new(re, im) }
            }
            "rapp" => {
                let smoothness = required(take(&mut pairs, "S"), "S")?;
                let p_sat = required(take(&mut pairs, "psat"), "psat")?;
                PaModel::Rapp { smoothness, p_sat }
            }
            "softlim" => PaModel::SoftLimiter { p_sat: required(take(&mut pairs, "psat"), "psat")? },
            other => return Err(Error::param(format!("unknown PA model `{other}`"))),
        };
        if let Some((k, _)) = pairs.first() {
            return Err(Error::param(format!("unknown argument `{k}` for PA model `{kind}`")));
        }
        model.validate()?;
        Ok(model)
    }
}
