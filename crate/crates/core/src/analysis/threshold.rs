use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Global,
    Blowup,
}

/// Amplitudes straddling the global/blowup threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdBracket {
    pub lambda_global: f64,
    pub lambda_blowup: f64,
    pub ratio: f64,
    /// Morrey estimates of `λφ` at the two ends, when the base estimate is known.
    pub morrey_global: Option<f64>,
    pub morrey_blowup: Option<f64>,
}

pub const MAX_BISECTION_ITERATIONS: usize = 40;

/// Resumable state of a geometric k-section on the amplitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdState {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub tol: f64,
    pub observations: Vec<(f64, Outcome)>,
    pub iterations: usize,
}

impl ThresholdState {
    pub fn new(lambda_min: f64, lambda_max: f64, tol: f64) -> Result<Self> {
        if !(lambda_min > 0.0 && lambda_max > lambda_min) || !lambda_max.is_finite() {
            return Err(domain!("need 0 < lambda_min < lambda_max"));
        }
        if !(tol > 0.0) {
            return Err(domain!("tolerance must be positive"));
        }
        Ok(Self { lambda_min, lambda_max, tol, observations: Vec::new(), iterations: 0 })
    }

    /// Largest Global and smallest Blowup amplitude observed so far; errors
    /// when a Global amplitude lies above a Blowup one.
    pub fn bracket(&self) -> Result<(Option<f64>, Option<f64>)> {
        let global = self.observations.iter().filter(|o| o.1 == Outcome::Global).map(|o| o.0).fold(None, max_opt);
        let blowup = self.observations.iter().filter(|o| o.1 == Outcome::Blowup).map(|o| o.0).fold(None, min_opt);
        if let (Some(g), Some(b)) = (global, blowup) {
            if g >= b {
                return Err(Error::Monotonicity(alloc::format!(
                    "amplitude {g} is global but {b} blows up"
                )));
            }
        }
        Ok((global, blowup))
    }

    pub fn converged(&self) -> Result<bool> {
        Ok(match self.bracket()? {
            (Some(g), Some(b)) => b / g <= 1.0 + self.tol,
            _ => false,
        })
    }

    /// Amplitudes to test next: the two ends first, then `k` geometrically
    /// spaced interior points.
    pub fn next_batch(&self, k: usize) -> Result<Vec<f64>> {
        match self.bracket()? {
            (None, None) => Ok(alloc::vec![self.lambda_min, self.lambda_max]),
            (None, Some(_)) => Ok(alloc::vec![self.lambda_min]),
            (Some(_), None) => Ok(alloc::vec![self.lambda_max]),
            (Some(g), Some(b)) => {
                let k = k.max(1);
                let ratio = libm::log(b / g);
                Ok((1..=k).map(|j| g * libm::exp(ratio * j as f64 / (k + 1) as f64)).collect())
            }
        }
    }

    pub fn record(&mut self, lambdas: &[f64], outcomes: &[Outcome]) -> Result<()> {
        if lambdas.len() != outcomes.len() {
            return Err(domain!("outcome count differs from amplitude count"));
        }
        self.observations.extend(lambdas.iter().copied().zip(outcomes.iter().copied()));
        self.iterations += 1;
        self.bracket().map(|_| ())
    }

    pub fn result(&self, base_morrey: Option<f64>) -> Result<ThresholdBracket> {
        match self.bracket()? {
            (Some(g), Some(b)) => Ok(ThresholdBracket {
                lambda_global: g,
                lambda_blowup: b,
                ratio: b / g,
                morrey_global: base_morrey.map(|m| m * g),
                morrey_blowup: base_morrey.map(|m| m * b),
            }),
            (None, _) => Err(domain!("lambda_min = {} does not give a global solution", self.lambda_min)),
            (_, None) => Err(domain!("lambda_max = {} does not blow up", self.lambda_max)),
        }
    }
}

fn max_opt(acc: Option<f64>, x: f64) -> Option<f64> {
    Some(acc.map_or(x, |a| a.max(x)))
}

fn min_opt(acc: Option<f64>, x: f64) -> Option<f64> {
    Some(acc.map_or(x, |a| a.min(x)))
}

/// Runs the k-section until the bracket ratio is at most `1 + tol` or the
/// iteration cap is hit. `eval` classifies a batch of amplitudes (possibly in
/// parallel); `checkpoint` sees the state after every batch.
pub fn classify_threshold<E, C>(
    state: &mut ThresholdState,
    k: usize,
    base_morrey: Option<f64>,
    mut eval: E,
    mut checkpoint: C,
) -> Result<ThresholdBracket>
where
    E: FnMut(&[f64]) -> Result<Vec<Outcome>>,
    C: FnMut(&ThresholdState) -> Result<()>,
{
    while !state.converged()? && state.iterations < MAX_BISECTION_ITERATIONS {
        let batch = state.next_batch(k)?;
        let outcomes = eval(&batch)?;
        state.record(&batch, &outcomes)?;
        checkpoint(state)?;
        if let (None, _) | (_, None) = state.bracket()? {
            break;
        }
    }
    state.result(base_morrey)
}
