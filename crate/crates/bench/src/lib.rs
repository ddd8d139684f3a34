//! Shared fixtures for the benchmarks.

use isacjam_core::jamming::{JammerSpec, TransferMatrix};
use isacjam_core::{Complex64, ComplexSequence};

/// Lengths exercised by every benchmark group.
pub const LENGTHS: [usize; 3] = [64, 256, 1024];

/// Unimodular quadratic-phase sequence, deterministic so runs compare.
pub fn chirp(len: usize) -> ComplexSequence {
    let phases: Vec<f64> = (0..len)
        .map(|k| std::f64::consts::PI * (k * k) as f64 / len as f64 + 0.3 * (k % 7) as f64)
        .collect();
    ComplexSequence::from_phases(&phases).expect("non-empty")
}

/// PPRJ operator intercepting `len/16` samples and forwarding four copies.
pub fn pprj(len: usize) -> TransferMatrix {
    JammerSpec::pprj(1.0, (len / 16) as f64, 4, len)
        .build()
        .expect("valid timing")
}

pub fn as_vec(x: &ComplexSequence) -> Vec<Complex64> {
    x.as_slice().to_vec()
}
