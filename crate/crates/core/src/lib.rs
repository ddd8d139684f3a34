//! Joint design of an ISAC transmit waveform and a receive mismatched filter
//! that suppresses signal-dependent modulated jamming (partial pulse repeater
//! and repetitive repeater DRFM jamming).
//!
//! The crate is organised bottom-up:
//!
//! * [`signal`] — complex sequences, aperiodic correlation and quality metrics.
//! * [`jamming`] — sparse jamming transfer operators.
//! * [`comm`] — multipath channel, constellations, equalisation, SER harness.
//! * [`dmm`] — the decoupled majorization-minimization solver.
//! * [`radar`] — echo synthesis, pulse compression, Delay-Doppler filter bank.
//! * [`baseline`] — LFM reference and trade-off ISAC waveform.
//! * [`rng`] — named, seedable random sub-streams.

pub mod baseline;
pub mod comm;
pub mod dmm;
mod error;
mod fft;
pub mod jamming;
#[cfg(feature = "oracle")]
pub mod oracle;
pub mod radar;
pub mod rng;
pub mod signal;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use signal::{ComplexSequence, CorrelationProfile};

/// Level reported in place of −∞ dB (zero sidelobes, orthogonal filters).
pub const NEG_INF_DB: f64 = -300.0;
