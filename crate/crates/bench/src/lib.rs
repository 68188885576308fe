//! Fixtures shared by the benchmarks.

use syzygp_core::gp::Dataset;
use syzygp_core::kernel::{pushforward_covariance, se_kernel_f64, OreOperator};
use syzygp_core::ore::{OreMatrix, OreRing};
use syzygp_core::{KernelVars, MatrixKernel, OperatorMatrix, Ring};

pub fn maxwell() -> OperatorMatrix {
    let ring = Ring::new(["dx", "dy", "dz", "dt"]).unwrap();
    OperatorMatrix::parse_rows(
        ring,
        &[
            "0, -dz, dy, dt, 0, 0, 0, 0, 0, 0",
            "dz, 0, -dx, 0, dt, 0, 0, 0, 0, 0",
            "-dy, dx, 0, 0, 0, dt, 0, 0, 0, 0",
            "0, 0, 0, dx, dy, dz, 0, 0, 0, 0",
            "-dt, 0, 0, 0, -dz, dy, -1, 0, 0, 0",
            "0, -dt, 0, dz, 0, -dx, 0, -1, 0, 0",
            "0, 0, -dt, -dy, dx, 0, 0, 0, -1, 0",
            "dx, dy, dz, 0, 0, 0, 0, 0, 0, -1",
        ],
    )
    .unwrap()
}

/// Independent SE priors on `n` latent components over `coords`.
pub fn se_prior(coords: &[&str], n: usize) -> MatrixKernel {
    let se = se_kernel_f64(coords.len(), 1.0, 1.0).unwrap();
    MatrixKernel::diagonal(KernelVars::new(coords.iter().copied()), &vec![se; n])
}

pub fn control_kernel() -> MatrixKernel {
    let b = OreOperator {
        matrix: OreMatrix::parse_rows(&OreRing::default(), &["1", "1/t^3*dt"]).unwrap(),
        coordinate: 0,
    };
    pushforward_covariance(&b, &se_prior(&["t"], 1)).unwrap()
}

/// `x(1) = 0` and `u(t) = 1/(t^4 + 1)` on `t = 1, 1.1, ..., 5`.
pub fn control_data() -> Dataset {
    let mut d = Dataset::new();
    d.push(vec![1.0], 0, 0.0).unwrap();
    for i in 0..=40 {
        let t = 1.0 + 0.1 * i as f64;
        d.push(vec![t], 1, 1.0 / (t.powi(4) + 1.0)).unwrap();
    }
    d
}
