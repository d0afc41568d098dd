//! Windowed STFT analysis/synthesis and the complex spectrogram data model.
//!
//! Analysis uses a periodic Hann window with reflect padding of `n_fft / 2`
//! samples on both ends, so the frame count is a deterministic function of
//! the input length. Synthesis is weighted overlap-add normalized by the
//! exact per-sample sum of squared windows, which reconstructs the input to
//! rounding error wherever that sum is bounded away from zero.

use num_complex::Complex64;
use thiserror::Error;

pub(crate) mod fft {
    //! Thin cache around rustfft plans, keyed by transform size.

    use num_complex::Complex64;
    use rustfft::{Fft, FftDirection, FftPlanner};
    use std::cell::RefCell;
    use std::collections::HashMap;
    use std::sync::Arc;

    thread_local! {
        static PLANS: RefCell<HashMap<(usize, bool), Arc<dyn Fft<f64>>>> =
            RefCell::new(HashMap::new());
    }

    fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
        PLANS.with(|p| {
            p.borrow_mut()
                .entry((n, inverse))
                .or_insert_with(|| {
                    let dir = if inverse {
                        FftDirection::Inverse
                    } else {
                        FftDirection::Forward
                    };
                    FftPlanner::new().plan_fft(n, dir)
                })
                .clone()
        })
    }

    /// In-place forward FFT (unnormalized).
    pub fn forward(buf: &mut [Complex64]) {
        plan(buf.len(), false).process(buf);
    }

    /// In-place inverse FFT (unnormalized; caller divides by `n`).
    pub fn inverse(buf: &mut [Complex64]) {
        plan(buf.len(), true).process(buf);
    }
}

#[derive(Debug, Error)]
pub enum SignalError {
    #[error("waveform has no channels or no samples")]
    EmptyWaveform,
    #[error("channel lengths differ: {0} vs {1}")]
    ChannelLengthMismatch(usize, usize),
    #[error("sample rate must be positive")]
    BadSampleRate,
    #[error("non-finite sample at channel {channel}, index {index}")]
    NonFiniteSample { channel: usize, index: usize },
    #[error("invalid frame parameters: n_fft={n_fft}, hop={hop} (need power-of-two n_fft and 0 < hop <= n_fft)")]
    BadFrameParams { n_fft: usize, hop: usize },
    #[error("waveform length {len} shorter than n_fft {n_fft}")]
    ShortWaveform { len: usize, n_fft: usize },
    #[error("window/hop metadata does not satisfy the constant overlap-add condition (n_fft={n_fft}, hop={hop})")]
    OlaNotConstant { n_fft: usize, hop: usize },
    #[error("spectrogram metadata mismatch: {0}")]
    MetadataMismatch(String),
}

/// Analysis window identifier. Only the periodic Hann variant is used; it
/// satisfies constant overlap-add of squared windows at hop = n_fft / 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    HannPeriodic,
}

impl Window {
    pub fn samples(&self, n: usize) -> Vec<f64> {
        match self {
            Window::HannPeriodic => (0..n)
                .map(|i| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / n as f64).cos())
                .collect(),
        }
    }
}

/// Multichannel time-domain signal. All channels have equal length and
/// finite samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    channels: Vec<Vec<f64>>,
    sample_rate: u32,
}

impl Waveform {
    pub fn new(channels: Vec<Vec<f64>>, sample_rate: u32) -> Result<Self, SignalError> {
        if sample_rate == 0 {
            return Err(SignalError::BadSampleRate);
        }
        if channels.is_empty() || channels[0].is_empty() {
            return Err(SignalError::EmptyWaveform);
        }
        let len = channels[0].len();
        for (c, ch) in channels.iter().enumerate() {
            if ch.len() != len {
                return Err(SignalError::ChannelLengthMismatch(len, ch.len()));
            }
            if let Some(index) = ch.iter().position(|x| !x.is_finite()) {
                return Err(SignalError::NonFiniteSample { channel: c, index });
            }
        }
        Ok(Waveform {
            channels,
            sample_rate,
        })
    }

    pub fn mono(samples: Vec<f64>, sample_rate: u32) -> Result<Self, SignalError> {
        Self::new(vec![samples], sample_rate)
    }

    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn channel(&self, c: usize) -> &[f64] {
        &self.channels[c]
    }

    pub fn channels(&self) -> &[Vec<f64>] {
        &self.channels
    }

    /// Single-channel view as a new waveform.
    pub fn extract_channel(&self, c: usize) -> Waveform {
        Waveform {
            channels: vec![self.channels[c].clone()],
            sample_rate: self.sample_rate,
        }
    }

    pub fn rms(&self) -> f64 {
        let n = (self.len() * self.n_channels()) as f64;
        let sum: f64 = self
            .channels
            .iter()
            .flat_map(|ch| ch.iter())
            .map(|x| x * x)
            .sum();
        (sum / n).sqrt()
    }

    /// Sample-wise sum of two waveforms of identical shape.
    pub fn add(&self, other: &Waveform) -> Result<Waveform, SignalError> {
        if self.n_channels() != other.n_channels() || self.len() != other.len() {
            return Err(SignalError::ChannelLengthMismatch(self.len(), other.len()));
        }
        let channels = self
            .channels
            .iter()
            .zip(&other.channels)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        Ok(Waveform {
            channels,
            sample_rate: self.sample_rate,
        })
    }

    pub fn scale(&self, g: f64) -> Waveform {
        Waveform {
            channels: self
                .channels
                .iter()
                .map(|ch| ch.iter().map(|x| x * g).collect())
                .collect(),
            sample_rate: self.sample_rate,
        }
    }
}

/// One-sided complex STFT tensor indexed (channel, frequency, frame),
/// frame index fastest. Carries the analysis metadata needed to invert it
/// and to check compatibility before combining spectrograms arithmetically.
#[derive(Debug, Clone)]
pub struct Spectrogram {
    data: Vec<Complex64>,
    n_channels: usize,
    n_freqs: usize,
    n_frames: usize,
    pub n_fft: usize,
    pub hop: usize,
    pub window: Window,
    /// Length of the analyzed waveform, so istft can trim the padding.
    pub signal_len: usize,
    pub sample_rate: u32,
}

impl Spectrogram {
    pub fn zeros(
        n_channels: usize,
        n_freqs: usize,
        n_frames: usize,
        n_fft: usize,
        hop: usize,
        sample_rate: u32,
    ) -> Spectrogram {
        Spectrogram {
            data: vec![Complex64::new(0.0, 0.0); n_channels * n_freqs * n_frames],
            n_channels,
            n_freqs,
            n_frames,
            n_fft,
            hop,
            window: Window::HannPeriodic,
            signal_len: if n_frames == 0 { 0 } else { (n_frames - 1) * hop },
            sample_rate,
        }
    }

    pub fn zeros_like(&self) -> Spectrogram {
        Spectrogram {
            data: vec![Complex64::new(0.0, 0.0); self.data.len()],
            ..self.clone()
        }
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn n_freqs(&self) -> usize {
        self.n_freqs
    }

    pub fn n_frames(&self) -> usize {
        self.n_frames
    }

    #[inline]
    pub fn index(&self, ch: usize, f: usize, t: usize) -> usize {
        (ch * self.n_freqs + f) * self.n_frames + t
    }

    #[inline]
    pub fn at(&self, ch: usize, f: usize, t: usize) -> Complex64 {
        self.data[self.index(ch, f, t)]
    }

    #[inline]
    pub fn at_mut(&mut self, ch: usize, f: usize, t: usize) -> &mut Complex64 {
        let i = self.index(ch, f, t);
        &mut self.data[i]
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    /// Frequency in Hz of bin `f`.
    pub fn bin_hz(&self, f: usize) -> f64 {
        f as f64 * self.sample_rate as f64 / self.n_fft as f64
    }

    /// Check that two spectrograms may be combined arithmetically.
    pub fn check_compatible(&self, other: &Spectrogram) -> Result<(), SignalError> {
        if self.n_channels != other.n_channels
            || self.n_freqs != other.n_freqs
            || self.n_frames != other.n_frames
        {
            return Err(SignalError::MetadataMismatch(format!(
                "shape ({},{},{}) vs ({},{},{})",
                self.n_channels,
                self.n_freqs,
                self.n_frames,
                other.n_channels,
                other.n_freqs,
                other.n_frames
            )));
        }
        if self.n_fft != other.n_fft
            || self.hop != other.hop
            || self.window != other.window
            || self.sample_rate != other.sample_rate
        {
            return Err(SignalError::MetadataMismatch(
                "analysis parameters differ".into(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Spectrogram) -> Result<Spectrogram, SignalError> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Spectrogram) -> Result<Spectrogram, SignalError> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        Ok(out)
    }

    pub fn scale(&self, g: f64) -> Spectrogram {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= g;
        }
        out
    }

    /// Squared Frobenius norm over all (channel, frequency, frame) bins.
    pub fn fro_norm_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn fro_norm(&self) -> f64 {
        self.fro_norm_sq().sqrt()
    }
}

fn reflect_index(i: isize, len: usize) -> usize {
    // numpy-style 'reflect' (no edge duplication); valid for |i| < 2 len.
    let len = len as isize;
    let mut j = i;
    if j < 0 {
        j = -j;
    }
    if j >= len {
        j = 2 * (len - 1) - j;
    }
    j as usize
}

/// Number of analysis frames for a signal of length `len` with reflect
/// padding of `n_fft / 2` on both sides.
pub fn n_frames_for(len: usize, n_fft: usize, hop: usize) -> usize {
    (len + 2 * (n_fft / 2) - n_fft) / hop + 1
}

/// One-sided STFT with periodic Hann analysis window.
pub fn stft(w: &Waveform, n_fft: usize, hop: usize) -> Result<Spectrogram, SignalError> {
    if w.len() == 0 {
        return Err(SignalError::EmptyWaveform);
    }
    if !n_fft.is_power_of_two() || n_fft < 2 || hop == 0 || hop > n_fft {
        return Err(SignalError::BadFrameParams { n_fft, hop });
    }
    if w.len() < n_fft {
        return Err(SignalError::ShortWaveform {
            len: w.len(),
            n_fft,
        });
    }

    let pad = n_fft / 2;
    let n_freqs = n_fft / 2 + 1;
    let n_frames = n_frames_for(w.len(), n_fft, hop);
    let window = Window::HannPeriodic;
    let win = window.samples(n_fft);

    let mut spec = Spectrogram {
        data: vec![Complex64::new(0.0, 0.0); w.n_channels() * n_freqs * n_frames],
        n_channels: w.n_channels(),
        n_freqs,
        n_frames,
        n_fft,
        hop,
        window,
        signal_len: w.len(),
        sample_rate: w.sample_rate(),
    };

    let mut frame = vec![Complex64::new(0.0, 0.0); n_fft];
    for ch in 0..w.n_channels() {
        let x = w.channel(ch);
        for t in 0..n_frames {
            let start = t as isize * hop as isize - pad as isize;
            for (i, slot) in frame.iter_mut().enumerate() {
                let src = reflect_index(start + i as isize, x.len());
                *slot = Complex64::new(x[src] * win[i], 0.0);
            }
            fft::forward(&mut frame);
            for f in 0..n_freqs {
                let idx = spec.index(ch, f, t);
                spec.data[idx] = frame[f];
            }
        }
    }
    Ok(spec)
}

/// Per-sample sum of squared windows for the overlap-add normalization.
fn window_sq_profile(win: &[f64], hop: usize, n_frames: usize, padded_len: usize) -> Vec<f64> {
    let mut den = vec![0.0; padded_len];
    for t in 0..n_frames {
        let start = t * hop;
        for (i, &w) in win.iter().enumerate() {
            if start + i < padded_len {
                den[start + i] += w * w;
            }
        }
    }
    den
}

/// Check the constant overlap-add condition for squared windows in the
/// steady state (one hop period once all overlapping frames contribute).
fn check_cola(win: &[f64], n_fft: usize, hop: usize) -> bool {
    if n_fft % hop != 0 {
        return false;
    }
    let k = n_fft / hop;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for r in 0..hop {
        let s: f64 = (0..k).map(|j| win[r + j * hop] * win[r + j * hop]).sum();
        lo = lo.min(s);
        hi = hi.max(s);
    }
    hi > 0.0 && (hi - lo) / hi < 1e-6
}

/// Weighted overlap-add synthesis. Perfect reconstruction up to rounding
/// for spectrograms produced by [`stft`].
pub fn istft(s: &Spectrogram) -> Result<Waveform, SignalError> {
    let n_fft = s.n_fft;
    let hop = s.hop;
    if !n_fft.is_power_of_two() || hop == 0 || hop > n_fft {
        return Err(SignalError::BadFrameParams { n_fft, hop });
    }
    if s.n_freqs != n_fft / 2 + 1 {
        return Err(SignalError::MetadataMismatch(format!(
            "n_freqs {} inconsistent with n_fft {}",
            s.n_freqs, n_fft
        )));
    }
    let win = s.window.samples(n_fft);
    if !check_cola(&win, n_fft, hop) {
        return Err(SignalError::OlaNotConstant { n_fft, hop });
    }

    let pad = n_fft / 2;
    let padded_len = (s.n_frames - 1) * hop + n_fft;
    let den = window_sq_profile(&win, hop, s.n_frames, padded_len);

    let mut channels = Vec::with_capacity(s.n_channels);
    let mut frame = vec![Complex64::new(0.0, 0.0); n_fft];
    for ch in 0..s.n_channels {
        let mut acc = vec![0.0; padded_len];
        for t in 0..s.n_frames {
            for f in 0..s.n_freqs {
                frame[f] = s.at(ch, f, t);
            }
            // Hermitian completion of the one-sided spectrum.
            for f in s.n_freqs..n_fft {
                frame[f] = frame[n_fft - f].conj();
            }
            fft::inverse(&mut frame);
            let start = t * hop;
            for i in 0..n_fft {
                acc[start + i] += frame[i].re / n_fft as f64 * win[i];
            }
        }
        let dmax = den.iter().cloned().fold(0.0, f64::max);
        let mut out = vec![0.0; s.signal_len];
        for (i, slot) in out.iter_mut().enumerate() {
            let j = i + pad;
            if den[j] > 1e-12 * dmax {
                *slot = acc[j] / den[j];
            }
        }
        channels.push(out);
    }
    Waveform::new(channels, s.sample_rate)
}
