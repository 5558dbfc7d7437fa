//! Fixtures shared by the benchmarks under `benches/`.

use faddeev_core::{integrate_profile, AnsatzParams, ProfileSolution, SolveConfig};

/// Profile with `c_lead = 1` and the default solver settings.
pub fn solved(m: i32, n: i32) -> ProfileSolution {
    integrate_profile(
        &AnsatzParams::new(m, n, 1.0).expect("nonzero windings"),
        &SolveConfig::default(),
    )
    .expect("default settings integrate")
}
