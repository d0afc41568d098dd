//! Multichannel WAV I/O (16-bit PCM and 32-bit float, little-endian RIFF).

use crate::signal::Waveform;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WavError {
    #[error("wav i/o error: {0}")]
    Io(#[from] hound::Error),
    #[error("unsupported wav format: {0}")]
    Unsupported(String),
    #[error("invalid waveform: {0}")]
    Signal(#[from] crate::signal::SignalError),
}

/// Sample encoding used when writing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WavFormat {
    Pcm16,
    Float32,
}

pub fn write_wav(path: &Path, w: &Waveform, format: WavFormat) -> Result<(), WavError> {
    let spec = hound::WavSpec {
        channels: w.n_channels() as u16,
        sample_rate: w.sample_rate(),
        bits_per_sample: match format {
            WavFormat::Pcm16 => 16,
            WavFormat::Float32 => 32,
        },
        sample_format: match format {
            WavFormat::Pcm16 => hound::SampleFormat::Int,
            WavFormat::Float32 => hound::SampleFormat::Float,
        },
    };
    let mut writer = hound::WavWriter::create(path, spec)?;
    for i in 0..w.len() {
        for ch in 0..w.n_channels() {
            let x = w.channel(ch)[i];
            match format {
                WavFormat::Pcm16 => {
                    let q = (x * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
                    writer.write_sample(q)?;
                }
                WavFormat::Float32 => writer.write_sample(x as f32)?,
            }
        }
    }
    writer.finalize()?;
    Ok(())
}

pub fn read_wav(path: &Path) -> Result<Waveform, WavError> {
    let mut reader = hound::WavReader::open(path)?;
    let spec = reader.spec();
    let n_channels = spec.channels as usize;
    let mut channels: Vec<Vec<f64>> = vec![Vec::new(); n_channels];
    match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Int, 16) => {
            for (i, s) in reader.samples::<i16>().enumerate() {
                channels[i % n_channels].push(s? as f64 / 32768.0);
            }
        }
        (hound::SampleFormat::Float, 32) => {
            for (i, s) in reader.samples::<f32>().enumerate() {
                channels[i % n_channels].push(s? as f64);
            }
        }
        (fmt, bits) => {
            return Err(WavError::Unsupported(format!("{fmt:?} {bits}-bit")));
        }
    }
    Ok(Waveform::new(channels, spec.sample_rate)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn noise(seed: u64, n_channels: usize, len: usize) -> Waveform {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Waveform::new(
            (0..n_channels)
                .map(|_| (0..len).map(|_| rng.gen_range(-0.9..0.9)).collect())
                .collect(),
            16_000,
        )
        .unwrap()
    }

    #[test]
    fn float32_round_trip_is_cast_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f32.wav");
        let w = noise(5, 4, 1000);
        write_wav(&path, &w, WavFormat::Float32).unwrap();
        let r = read_wav(&path).unwrap();
        assert_eq!(r.n_channels(), 4);
        assert_eq!(r.sample_rate(), 16_000);
        for ch in 0..4 {
            for (a, b) in w.channel(ch).iter().zip(r.channel(ch)) {
                assert_eq!(*a as f32 as f64, *b);
            }
        }
    }

    #[test]
    fn pcm16_round_trip_within_quantization() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("i16.wav");
        let w = noise(6, 2, 512);
        write_wav(&path, &w, WavFormat::Pcm16).unwrap();
        let r = read_wav(&path).unwrap();
        for ch in 0..2 {
            for (a, b) in w.channel(ch).iter().zip(r.channel(ch)) {
                assert!((a - b).abs() <= 0.5 / 32768.0 + 1e-12);
            }
        }
    }
}
