use std::sync::{Arc, Mutex};

use fraclab_core::field::{Fft1d, FftBackend, Grid, Spectral};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

struct Plan {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Fft1d for Plan {
    fn len(&self) -> usize {
        self.fwd.len()
    }

    fn forward(&self, data: &mut [Complex64]) {
        self.fwd.process(data);
    }

    fn inverse(&self, data: &mut [Complex64]) {
        self.inv.process(data);
    }
}

struct Backend(Mutex<FftPlanner<f64>>);

impl FftBackend for Backend {
    fn plan(&self, n: usize) -> Arc<dyn Fft1d> {
        let mut planner = self.0.lock().unwrap();
        Arc::new(Plan { fwd: planner.plan_fft_forward(n), inv: planner.plan_fft_inverse(n) })
    }
}

pub fn spectral(d: u32, n: usize, l: f64) -> Spectral {
    Spectral::new(Grid::new(d, n, l).unwrap(), &Backend(Mutex::new(FftPlanner::new())))
}
