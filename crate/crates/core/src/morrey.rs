//! Grid estimators for homogeneous Morrey norms
//! `‖u‖_{M^s_q} = sup_{x,R} R^{d/s − d/q}(∫_{B(x,R)} |u|^q)^{1/q}`.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::analysis::{fit_power_law, FitResult};
use crate::error::{domain, Result};
use crate::field::{Field, Grid, HeatSemigroup, Spectral};

/// Exponents, radii and center lattice of a Morrey estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorreyQuery {
    pub s: f64,
    pub q: f64,
    pub radii: Vec<f64>,
    /// Centers are the grid points whose per-axis indices are multiples of `stride`.
    pub stride: usize,
}

impl MorreyQuery {
    /// Dyadic radii `h·2^k` up to `L`, all centers.
    pub fn dyadic(grid: &Grid, s: f64, q: f64) -> Result<Self> {
        let h = grid.spacing();
        let mut radii = Vec::new();
        let mut r = h;
        while r <= grid.half_length() * (1.0 + 1e-12) {
            radii.push(r);
            r *= 2.0;
        }
        let query = Self { s, q, radii, stride: 1 };
        query.validate(grid)?;
        Ok(query)
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.stride = stride;
        self
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        if !(self.q >= 1.0) {
            return Err(domain!("Morrey q must be >= 1, got {}", self.q));
        }
        if !(self.s > self.q) || !self.s.is_finite() {
            return Err(domain!("Morrey s must exceed q, got s = {}, q = {}", self.s, self.q));
        }
        let (h, l) = (grid.spacing(), grid.half_length());
        if self.radii.is_empty() || self.radii.iter().any(|r| !(*r >= h * (1.0 - 1e-12) && *r <= l * (1.0 + 1e-12))) {
            return Err(domain!("Morrey radii must lie in [h, L]"));
        }
        if self.stride == 0 || self.stride > grid.n() {
            return Err(domain!("center stride must lie in 1..=n"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MorreyEstimate {
    pub value: f64,
    /// Flat index of the maximizing center.
    pub center: usize,
    pub radius: f64,
}

/// Indicator of `{|offset| ≤ R}` laid out in FFT order (offset 0 at index 0).
/// Cells centred exactly on the sphere get weight 1/2.
fn ball_mask(grid: &Grid, radius: f64) -> Vec<f64> {
    let h = grid.spacing();
    let d = grid.dim() as usize;
    let r2 = radius * radius;
    let (inner, outer) = (r2 * (1.0 - 1e-12), r2 * (1.0 + 1e-12));
    (0..grid.len())
        .map(|flat| {
            let idx = grid.unflatten(flat);
            let mut acc = 0.0;
            for i in idx.iter().take(d) {
                let x = grid.signed_mode(*i) as f64 * h;
                acc += x * x;
            }
            if acc < inner {
                1.0
            } else if acc <= outer {
                0.5
            } else {
                0.0
            }
        })
        .collect()
}

fn on_lattice(grid: &Grid, flat: usize, stride: usize) -> bool {
    stride == 1 || grid.unflatten(flat).iter().take(grid.dim() as usize).all(|i| i % stride == 0)
}

/// Maximum over centers and radii of `[R^{d(q/s−1)}·Σ_{B(x,R)} |u|^q h^d]^{1/q}`,
/// with ball membership decided by cell centers and periodic distances.
pub fn morrey_norm(field: &Field, query: &MorreyQuery, spectral: &Spectral) -> Result<MorreyEstimate> {
    let grid = *field.grid();
    if spectral.grid() != &grid {
        return Err(domain!("field and transform were built for different grids"));
    }
    query.validate(&grid)?;
    let q = query.q;
    let d = f64::from(grid.dim());
    let pow_q: Vec<f64> = field.values().iter().map(|v| libm::pow(libm::fabs(*v), q)).collect();
    let total: f64 = pow_q.iter().sum();
    let mut best = MorreyEstimate { value: 0.0, center: grid.origin(), radius: query.radii[0] };
    if total == 0.0 {
        return Ok(best);
    }
    let fq = spectral.forward(&pow_q);
    for &radius in &query.radii {
        let mask = spectral.forward(&ball_mask(&grid, radius));
        let sums = spectral.inverse_real(fq.iter().zip(&mask).map(|(a, b)| a * b).collect());
        let scale = libm::pow(radius, d * (q / query.s - 1.0)) * grid.cell_volume();
        for (i, s) in sums.iter().enumerate() {
            if !on_lattice(&grid, i, query.stride) {
                continue;
            }
            let v = libm::pow((s * scale).max(0.0), 1.0 / q);
            if v > best.value {
                best = MorreyEstimate { value: v, center: i, radius };
            }
        }
    }
    Ok(best)
}

/// Fits the decay of the `M^{p2}_q` estimate of `e^{−t(−Δ)^{α/2}}field`; the
/// expected exponent for `field ∈ M^{p1}` is `−(d/α)(1/p1 − 1/p2)`.
pub fn morrey_smoothing_probe(
    field: &Field,
    alpha: f64,
    (p1, p2): (f64, f64),
    q: f64,
    times: &[f64],
    window: Option<(f64, f64)>,
    spectral: &Spectral,
) -> Result<FitResult> {
    if !(p1 > 1.0 && p1 <= p2 && p2.is_finite()) {
        return Err(domain!("smoothing probe needs 1 < p1 <= p2 < inf"));
    }
    let heat = HeatSemigroup::new(spectral.clone(), alpha)?;
    let query = MorreyQuery::dyadic(field.grid(), p2, q)?;
    let mut values = Vec::with_capacity(times.len());
    for &t in times {
        let evolved = heat.apply(field, t)?;
        values.push(morrey_norm(&evolved, &query, spectral)?.value);
    }
    fit_power_law(times, &values, window)
}

/// `−(d/α)(1/p1 − 1/p2)`.
pub fn smoothing_exponent(d: u32, alpha: f64, p1: f64, p2: f64) -> f64 {
    -(f64::from(d) / alpha) * (1.0 / p1 - 1.0 / p2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{singular_morrey_norm, ModelParams};
    use crate::field::singular_profile;
    use crate::test_support::backend;
    use proptest::prelude::*;

    fn setup(d: u32, n: usize, l: f64) -> (Grid, Spectral) {
        let g = Grid::new(d, n, l).unwrap();
        (g, Spectral::new(g, &backend()))
    }

    #[test]
    fn query_validation() {
        let (g, _) = setup(1, 64, 8.0);
        assert!(MorreyQuery::dyadic(&g, 1.0, 1.0).is_err());
        assert!(MorreyQuery::dyadic(&g, 0.5, 1.0).is_err());
        let q = MorreyQuery::dyadic(&g, 4.0, 1.0).unwrap();
        assert_eq!(q.radii.len(), 6);
        assert!(q.clone().with_stride(0).validate(&g).is_err());
        assert!(MorreyQuery { radii: alloc::vec![0.01], ..q }.validate(&g).is_err());
    }

    #[test]
    fn constant_field_closed_form() {
        let (g, s) = setup(1, 256, 8.0);
        let c = 1.7;
        let f = Field::new(g, alloc::vec![c; 256]).unwrap();
        let est = morrey_norm(&f, &MorreyQuery::dyadic(&g, 3.0, 1.0).unwrap(), &s).unwrap();
        let exact = c * 2.0 * libm::pow(8.0, 1.0 / 3.0);
        assert!((est.value - exact).abs() < 0.03 * exact, "{est:?} {exact}");
        assert_eq!(est.radius, 8.0);
    }

    #[test]
    fn constant_field_in_two_dimensions() {
        let (g, s) = setup(2, 64, 8.0);
        let f = Field::new(g, alloc::vec![1.0; g.len()]).unwrap();
        let est = morrey_norm(&f, &MorreyQuery::dyadic(&g, 4.0, 1.0).unwrap(), &s).unwrap();
        let exact = core::f64::consts::PI * libm::pow(8.0, 0.5);
        assert!((est.value - exact).abs() < 0.05 * exact, "{est:?} {exact}");
    }

    #[test]
    fn capped_singular_profile_matches_the_sphere_formula() {
        let (g, s) = setup(1, 1 << 14, 512.0);
        let p = ModelParams::new(0.5, 1, 3.0).unwrap();
        let u = Field::new(g, singular_profile(&g, &p).unwrap()).unwrap();
        let est = morrey_norm(&u, &MorreyQuery::dyadic(&g, 4.0, 1.0).unwrap(), &s).unwrap();
        let exact = singular_morrey_norm(&p).unwrap();
        assert!((est.value - exact).abs() < 0.05 * exact, "{est:?} {exact}");
    }

    #[test]
    fn translation_and_scaling() {
        let (g, s) = setup(1, 256, 8.0);
        let f = Field::from_fn(g, |x| libm::exp(-x[0] * x[0]) + 0.3 * libm::exp(-(x[0] - 3.0) * (x[0] - 3.0))).unwrap();
        let q = MorreyQuery::dyadic(&g, 3.0, 1.5).unwrap();
        let a = morrey_norm(&f, &q, &s).unwrap().value;
        let b = morrey_norm(&f.shifted(&[37]), &q, &s).unwrap().value;
        let c = morrey_norm(&f.scaled(2.0), &q, &s).unwrap().value;
        assert!((a - b).abs() < 1e-12 * a);
        assert!((c - 2.0 * a).abs() < 1e-12 * a);
    }

    #[test]
    fn finer_radii_change_little() {
        let (g, s) = setup(1, 1024, 32.0);
        let f = Field::from_fn(g, |x| 1.0 / (1.0 + x[0] * x[0])).unwrap();
        let q = MorreyQuery::dyadic(&g, 3.0, 1.0).unwrap();
        let mut fine = q.clone();
        fine.radii = q.radii.iter().flat_map(|r| [*r, r * core::f64::consts::SQRT_2]).filter(|r| *r <= 32.0).collect();
        let a = morrey_norm(&f, &q, &s).unwrap().value;
        let b = morrey_norm(&f, &fine, &s).unwrap().value;
        assert!(b >= a && b < 1.1 * a, "{a} {b}");
    }

    #[test]
    fn evolution_contracts_and_ignores_amplitude() {
        let (g, s) = setup(1, 4096, 256.0);
        let f = Field::from_fn(g, |x| libm::exp(-x[0] * x[0])).unwrap();
        let times = crate::analysis::dyadic_times(0.25, 2, 8.0);
        let fit = morrey_smoothing_probe(&f, 0.5, (4.0, 4.0), 1.0, &times, None, &s).unwrap();
        assert!(fit.exponent <= 0.0, "{fit:?}");
        let heat = HeatSemigroup::new(s.clone(), 0.5).unwrap();
        let q = MorreyQuery::dyadic(&g, 4.0, 1.0).unwrap();
        let before = morrey_norm(&f, &q, &s).unwrap().value;
        let after = morrey_norm(&heat.apply(&f, 1.0).unwrap(), &q, &s).unwrap().value;
        assert!(after <= before * (1.0 + 1e-12));
        let big = morrey_smoothing_probe(&f.scaled(5.0), 0.5, (4.0, 4.0), 1.0, &times, None, &s).unwrap();
        assert!((big.exponent - fit.exponent).abs() < 1e-10);
        assert_eq!(smoothing_exponent(1, 0.5, 2.0, 4.0), -0.5);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn pointwise_order_is_kept(vals in proptest::collection::vec(0.0f64..3.0, 64), bump in proptest::collection::vec(0.0f64..1.0, 64)) {
            let (g, s) = setup(1, 64, 8.0);
            let q = MorreyQuery::dyadic(&g, 3.0, 1.0).unwrap();
            let u = Field::new(g, vals.clone()).unwrap();
            let v = Field::new(g, vals.iter().zip(&bump).map(|(a, b)| a + b).collect()).unwrap();
            prop_assert!(morrey_norm(&u, &q, &s).unwrap().value <= morrey_norm(&v, &q, &s).unwrap().value * (1.0 + 1e-12));
        }
    }
}
