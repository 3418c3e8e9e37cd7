//! Open edit-based violation measures.
//!
//! The measure of a word is the cheapest weighted edit turning it into a
//! word of the prefix closure of a regular language.

mod measure;
mod script;
mod search;

use num_integer::Integer;
use num_rational::Rational64;
use serde::Serialize;

pub use measure::{
    approx_measures, m_star_bounded, open_edit_measure, properness_status, ApproxValues, Evaluation, MStar,
    MStarStatus, OpenEditMeasure, ProperCase, Properness, DEFAULT_SEARCH_BUDGET,
};
pub use script::{EditOp, EditScript, OpCounts};

use crate::cost::Cost;
use crate::error::{Error, Result};
use search::Scaled;

/// Costs of substitution, insertion, deletion and transposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct EditWeights {
    pub alpha: Cost,
    pub beta: Cost,
    pub gamma: Cost,
    pub delta: Cost,
}

impl EditWeights {
    pub fn new(alpha: Cost, beta: Cost, gamma: Cost, delta: Cost) -> Self {
        EditWeights { alpha, beta, gamma, delta }
    }

    pub fn uniform(c: Cost) -> Self {
        EditWeights::new(c, c, c, c)
    }

    pub fn ints(alpha: i64, beta: i64, gamma: i64, delta: i64) -> Self {
        EditWeights::new(Cost::int(alpha), Cost::int(beta), Cost::int(gamma), Cost::int(delta))
    }

    /// Parses `alpha,beta,gamma,delta`; each entry is a rational or `inf`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(',').collect();
        if parts.len() != 4 {
            return Err(Error::input(format!("expected four comma-separated weights, got `{text}`")));
        }
        let w: Vec<Cost> = parts.iter().map(|p| p.parse()).collect::<Result<_>>()?;
        Ok(EditWeights::new(w[0], w[1], w[2], w[3]))
    }

    pub fn as_array(&self) -> [Cost; 4] {
        [self.alpha, self.beta, self.gamma, self.delta]
    }

    /// Pointwise `<=`.
    pub fn le(&self, other: &EditWeights) -> bool {
        self.as_array().iter().zip(other.as_array()).all(|(a, b)| *a <= b)
    }

    fn scaled(&self) -> Result<(Scaled, i64)> {
        let finite: Vec<Rational64> = self.as_array().iter().filter_map(Cost::finite).collect();
        let denom = finite.iter().fold(1i64, |acc, r| acc.lcm(r.denom()));
        let conv = |c: Cost| -> Result<Option<u64>> {
            match c.finite() {
                None => Ok(None),
                Some(r) => {
                    let v = r.numer().checked_mul(denom / r.denom()).ok_or_else(|| {
                        Error::input("edit weights are too fine-grained to combine exactly")
                    })?;
                    Ok(Some(v as u64))
                }
            }
        };
        Ok((
            Scaled {
                alpha: conv(self.alpha)?,
                beta: conv(self.beta)?,
                gamma: conv(self.gamma)?,
                delta: conv(self.delta)?,
            },
            denom,
        ))
    }
}

impl std::fmt::Display for EditWeights {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{},{},{},{}", self.alpha, self.beta, self.gamma, self.delta)
    }
}

/// Why a measure is known to be contractible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Guarantee {
    /// Some weight is zero.
    ZeroWeight,
    /// `min(alpha, beta, gamma) <= delta`.
    CheapNonTransposition,
    /// The constraint is invariant under permutation.
    OrderFree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "reason", rename_all = "snake_case")]
pub enum Contractibility {
    Guaranteed(Guarantee),
    /// None of the sufficient conditions applies. This is not a proof that
    /// the measure is not contractible.
    NotGuaranteed,
}

pub fn contractibility_status(weights: &EditWeights, order_free: bool) -> Contractibility {
    let w = weights.as_array();
    if w.iter().any(Cost::is_zero) {
        Contractibility::Guaranteed(Guarantee::ZeroWeight)
    } else if weights.alpha.min(weights.beta).min(weights.gamma) <= weights.delta {
        Contractibility::Guaranteed(Guarantee::CheapNonTransposition)
    } else if order_free {
        Contractibility::Guaranteed(Guarantee::OrderFree)
    } else {
        Contractibility::NotGuaranteed
    }
}

/// The reweightings behind the four contractible approximations:
/// `alpha := delta`, `beta := delta`, `gamma := delta` and `delta := 0`.
pub fn approximation_weights(w: &EditWeights) -> [EditWeights; 4] {
    [
        EditWeights { alpha: w.delta, ..*w },
        EditWeights { beta: w.delta, ..*w },
        EditWeights { gamma: w.delta, ..*w },
        EditWeights { delta: Cost::ZERO, ..*w },
    ]
}
