use alloc::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Mutex;

use crate::field::{Fft1d, FftBackend};

pub struct RustFftBackend {
    planner: Mutex<FftPlanner<f64>>,
}

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

impl FftBackend for RustFftBackend {
    fn plan(&self, n: usize) -> Arc<dyn Fft1d> {
        let mut planner = self.planner.lock().unwrap();
        Arc::new(Plan { fwd: planner.plan_fft_forward(n), inv: planner.plan_fft_inverse(n) })
    }
}

pub fn backend() -> RustFftBackend {
    RustFftBackend { planner: Mutex::new(FftPlanner::new()) }
}
