//! Fits, threshold bisection, envelope formulas and convergence probes.

mod envelope;
mod fit;
mod probes;
mod threshold;

pub use envelope::{Envelope, EnvelopeMax};
pub use fit::{dyadic_times, fit_power_law, last_decade, FitResult, MIN_FIT_POINTS};
pub use probes::{
    l2_stability_exponent, ConvergenceProbe, ConvergenceRates, L2StabilityProbe, WeightedDecayProbe,
    DECAY_EXPONENTS,
};
pub use threshold::{
    classify_threshold, Outcome, ThresholdBracket, ThresholdState, MAX_BISECTION_ITERATIONS,
};
