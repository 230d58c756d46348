//! Direction-invariant frequency spectra of square images.
//!
//! The 2D DFT of each channel is reduced to a vector by summing coefficient
//! magnitudes along anti-diagonals: entry `d` collects every `|F[i][j]|` with
//! `i + j = d`. The constant term `d = 0` is dropped, so a spectrum of an
//! `N x N` image has `N - 1` entries indexed from 1.

use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::image_io::Image;

/// A reusable forward 2D DFT for `N x N` real matrices.
#[derive(Clone)]
pub struct Dft2 {
    side: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Dft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Dft2").field("side", &self.side).finish()
    }
}

impl Dft2 {
    pub fn new(side: usize) -> Result<Self> {
        if side < 2 {
            return Err(Error::InvalidArgument(format!(
                "DFT side must be at least 2, got {side}"
            )));
        }
        let fft = FftPlanner::new().plan_fft_forward(side);
        Ok(Self { side, fft })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    /// Transforms a row-major `side x side` matrix. Entry `[j * side + k]` of
    /// the result pairs row frequency `j` with column frequency `k`.
    pub fn transform(&self, matrix: &[f64]) -> Result<Vec<Complex64>> {
        let n = self.side;
        if matrix.len() != n * n {
            return Err(Error::ShapeMismatch(format!(
                "{} samples for a {n}x{n} DFT",
                matrix.len()
            )));
        }
        let mut rows: Vec<Complex64> = matrix.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let mut scratch = vec![Complex64::default(); self.fft.get_inplace_scratch_len()];
        self.fft.process_with_scratch(&mut rows, &mut scratch);
        // Column pass on the transpose, then transpose back.
        let mut cols = transpose(&rows, n);
        self.fft.process_with_scratch(&mut cols, &mut scratch);
        Ok(transpose(&cols, n))
    }
}

fn transpose(buf: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); n * n];
    for r in 0..n {
        for c in 0..n {
            out[c * n + r] = buf[r * n + c];
        }
    }
    out
}

/// 2D DFT of a `height x width` row-major matrix, which must be square.
pub fn dft2(matrix: &[f64], height: usize, width: usize) -> Result<Vec<Complex64>> {
    if height != width {
        return Err(Error::ShapeMismatch(format!(
            "DFT requires a square matrix, got {height}x{width}"
        )));
    }
    Dft2::new(height)?.transform(matrix)
}

/// Per-frequency sums of DFT magnitudes; `entries()[0]` is frequency 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    entries: Vec<f64>,
}

impl Spectrum {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if let Some(bad) = entries.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "spectrum entries must be finite and nonnegative, found {bad}"
            )));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// First `n` entries.
    pub fn cropped(&self, n: usize) -> Result<Spectrum> {
        if n == 0 || n > self.entries.len() {
            return Err(Error::InvalidArgument(format!(
                "spectrum size {n} outside 1..={}",
                self.entries.len()
            )));
        }
        Ok(Spectrum {
            entries: self.entries[..n].to_vec(),
        })
    }

    pub fn write_csv(&self, out: impl Write) -> std::io::Result<()> {
        write_indexed_csv(&self.entries, out)
    }
}

pub(crate) fn write_indexed_csv(values: &[f64], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "d,value")?;
    for (i, v) in values.iter().enumerate() {
        writeln!(out, "{},{}", i + 1, v)?;
    }
    Ok(())
}

/// A cropped spectrum scaled to unit L1 mass.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedSpectrum {
    entries: Vec<f64>,
}

impl NormalizedSpectrum {
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn into_entries(self) -> Vec<f64> {
        self.entries
    }
}

/// Magnitudes at or below this fraction of the input's L1 norm (an upper
/// bound on any DFT magnitude) are rounding noise and count as zero, so a
/// constant image has an exactly empty spectrum.
const NOISE_FLOOR: f64 = 1e-12;

/// Reduces one DFT to anti-diagonal magnitude sums for `d = 1..side-1`,
/// accumulating into `acc`.
fn accumulate_diagonals(dft: &[Complex64], side: usize, floor: f64, acc: &mut [f64]) {
    let mag = |z: &Complex64| {
        let m = z.norm();
        if m <= floor {
            0.0
        } else {
            m
        }
    };
    for (slot, d) in acc.iter_mut().zip(1..side) {
        *slot += (0..=d).map(|i| mag(&dft[i * side + (d - i)])).sum::<f64>();
    }
}

/// Full spectrum of a square image using a prepared transform.
pub fn spectrum_full_with(plan: &Dft2, image: &Image) -> Result<Spectrum> {
    if !image.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "spectrum requires a square image, got {}x{}",
            image.height(),
            image.width()
        )));
    }
    let side = image.height();
    if side != plan.side() {
        return Err(Error::ShapeMismatch(format!(
            "image side {side} does not match DFT side {}",
            plan.side()
        )));
    }
    let mut acc = vec![0.0; side - 1];
    for c in 0..image.channels() {
        let samples = image.channel(c);
        let floor = NOISE_FLOOR * samples.iter().map(|v| v.abs()).sum::<f64>();
        let dft = plan.transform(samples)?;
        accumulate_diagonals(&dft, side, floor, &mut acc);
    }
    Spectrum::new(acc)
}

/// Sum over channels of anti-diagonal DFT magnitudes, `d = 1..N-1`.
pub fn spectrum_full(image: &Image) -> Result<Spectrum> {
    if !image.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "spectrum requires a square image, got {}x{}",
            image.height(),
            image.width()
        )));
    }
    spectrum_full_with(&Dft2::new(image.height())?, image)
}

/// The first `n` spectrum entries, `1 <= n <= N - 1`.
pub fn spectrum_cropped(image: &Image, n: usize) -> Result<Spectrum> {
    spectrum_full(image)?.cropped(n)
}

/// Divides a spectrum by its L1 mass.
pub fn normalize(spectrum: &Spectrum) -> Result<NormalizedSpectrum> {
    let total: f64 = spectrum.entries.iter().sum();
    if total <= 0.0 || !total.is_finite() {
        return Err(Error::Degenerate(
            "spectrum has no mass outside the constant component".into(),
        ));
    }
    Ok(NormalizedSpectrum {
        entries: spectrum.entries.iter().map(|v| v / total).collect(),
    })
}
