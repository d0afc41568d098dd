//! Desk-scale laboratory for unsupervised multichannel speech separation.
//!
//! The separator is a DNN-mask-driven MVDR beamformer: a small network
//! estimates a time-frequency mask per source, masks weight the spatial
//! covariance estimates, and the beamformer turns those into per-source
//! multichannel signals. Training is two-staged: the separator is first
//! trained adversarially against a pool of unpaired clean speech, then
//! fine-tuned with a remix-cycle-consistency loss that compares observed
//! mixtures against pseudo-mixtures obtained by alternately unmixing and
//! remixing pairs of observations.
//!
//! Everything runs on the CPU from a single seed: the microphone-array
//! simulator, the reverse-mode autodiff engine, the training loops and the
//! BSS-eval metrics are all in this crate.

pub mod autodiff;
#[cfg(feature = "cli")]
pub mod cli;
pub mod linalg;
pub mod metrics;
pub mod nn;
pub mod objectives;
pub mod separator;
pub mod signal;
pub mod sim;
pub mod trainer;
pub mod wav;

pub use signal::{Spectrogram, Waveform};
