use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::image_io::Image;

/// Grayscale sum of `terms` random plane waves rescaled to `[0, 1]`.
///
/// Each wave completes `p` periods across the image, `1 <= p <= max_periods`,
/// along a random direction in the first quadrant. Its frequency vector is
/// rounded to integers `(kx, ky)` so the wave tiles the image exactly and
/// its energy lands on spectrum index `d = kx + ky <= 2 * max_periods`, with
/// the conjugate at `2N - d` or `N - d`, far above any cropped spectrum of a
/// large image. Mixed-sign directions are excluded because they fold onto
/// indices near `N`. Period counts do not depend on the resolution, so
/// resampling to a working size leaves `d` unchanged.
pub fn synth_lowfreq(side: usize, max_periods: usize, terms: usize, seed: u64) -> Result<Image> {
    if side < 16 {
        return Err(Error::InvalidArgument(format!("side must be at least 16, got {side}")));
    }
    if max_periods == 0 || terms == 0 {
        return Err(Error::InvalidArgument("max_periods and terms must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let waves: Vec<(f64, f64, f64, f64)> = (0..terms)
        .map(|_| {
            let periods = rng.random_range(1..=max_periods) as f64;
            let angle = rng.random_range(0.0..PI / 2.0);
            let kx = (periods * angle.cos()).round();
            let ky = (periods * angle.sin()).round();
            let phase = rng.random_range(0.0..2.0 * PI);
            let amp = rng.random_range(0.5..1.0);
            (kx, ky, phase, amp)
        })
        .collect();
    let n = side as f64;
    let raw = Image::from_fn(1, side, side, |_, r, c| {
        waves
            .iter()
            .map(|&(kx, ky, phase, amp)| amp * (2.0 * PI * (kx * c as f64 + ky * r as f64) / n + phase).sin())
            .sum()
    })?;
    let lo = raw.data().iter().copied().fold(f64::INFINITY, f64::min);
    let hi = raw.data().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    Ok(raw.map(|v| if span > 0.0 { (v - lo) / span } else { 0.5 }))
}
