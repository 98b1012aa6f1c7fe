//! `rustfft` backend with a per-length plan cache.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use fraclab_core::field::{Fft1d, FftBackend};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

struct Plan {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Fft1d for Plan {
    fn len(&self) -> usize {
        self.len
    }

    fn forward(&self, data: &mut [Complex64]) {
        self.forward.process(data);
    }

    fn inverse(&self, data: &mut [Complex64]) {
        self.inverse.process(data);
    }
}

/// Thread-safe plan cache; clones share the cache.
#[derive(Clone, Default)]
pub struct RustFft {
    inner: Arc<Mutex<Cache>>,
}

struct Cache {
    planner: FftPlanner<f64>,
    plans: HashMap<usize, Arc<Plan>>,
}

impl Default for Cache {
    fn default() -> Self {
        Self { planner: FftPlanner::new(), plans: HashMap::new() }
    }
}

impl RustFft {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cached_lengths(&self) -> usize {
        self.inner.lock().expect("plan cache poisoned").plans.len()
    }
}

impl FftBackend for RustFft {
    fn plan(&self, n: usize) -> Arc<dyn Fft1d> {
        let mut cache = self.inner.lock().expect("plan cache poisoned");
        if let Some(p) = cache.plans.get(&n) {
            return p.clone();
        }
        let plan = Arc::new(Plan {
            len: n,
            forward: cache.planner.plan_fft_forward(n),
            inverse: cache.planner.plan_fft_inverse(n),
        });
        cache.plans.insert(n, plan.clone());
        plan
    }
}

impl std::fmt::Debug for RustFft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RustFft").field("cached_lengths", &self.cached_lengths()).finish()
    }
}
