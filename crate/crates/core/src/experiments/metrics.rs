use crate::error::{Error, Result};
use crate::image_io::Image;

/// Reported PSNR when prediction and target are identical.
pub const PSNR_CAP: f64 = 99.0;

const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const SSIM_K1: f64 = 0.01;
const SSIM_K2: f64 = 0.03;

pub fn mse(pred: &Image, target: &Image) -> Result<f64> {
    pred.check_same_shape(target)?;
    let sum: f64 = pred
        .data()
        .iter()
        .zip(target.data())
        .map(|(a, b)| (a - b).powi(2))
        .sum();
    Ok(sum / pred.data().len() as f64)
}

/// `-10 log10(mse)`, capped at [`PSNR_CAP`].
pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse <= 0.0 {
        return PSNR_CAP;
    }
    (-10.0 * mse.log10()).min(PSNR_CAP)
}

/// PSNR in dB for unit-range images.
pub fn psnr(pred: &Image, target: &Image) -> Result<f64> {
    Ok(psnr_from_mse(mse(pred, target)?))
}

fn gaussian_window() -> [f64; SSIM_WINDOW] {
    let half = (SSIM_WINDOW / 2) as f64;
    let mut w = [0.0; SSIM_WINDOW];
    for (i, v) in w.iter_mut().enumerate() {
        let x = i as f64 - half;
        *v = (-x * x / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    w
}

/// Separable "valid" filtering of one plane with the normalized window.
fn filter_valid(plane: &[f64], height: usize, width: usize, w: &[f64; SSIM_WINDOW]) -> Vec<f64> {
    let (oh, ow) = (height + 1 - SSIM_WINDOW, width + 1 - SSIM_WINDOW);
    let mut rows = vec![0.0; height * ow];
    for r in 0..height {
        let line = &plane[r * width..(r + 1) * width];
        for c in 0..ow {
            rows[r * ow + c] = w.iter().zip(&line[c..]).map(|(k, v)| k * v).sum();
        }
    }
    let mut out = vec![0.0; oh * ow];
    for r in 0..oh {
        for c in 0..ow {
            out[r * ow + c] = w.iter().enumerate().map(|(i, k)| k * rows[(r + i) * ow + c]).sum();
        }
    }
    out
}

fn ssim_plane(a: &[f64], b: &[f64], height: usize, width: usize) -> f64 {
    let w = gaussian_window();
    let products = |f: fn(f64, f64) -> f64| -> Vec<f64> { a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect() };
    let mu_a = filter_valid(a, height, width, &w);
    let mu_b = filter_valid(b, height, width, &w);
    let aa = filter_valid(&products(|x, _| x * x), height, width, &w);
    let bb = filter_valid(&products(|_, y| y * y), height, width, &w);
    let ab = filter_valid(&products(|x, y| x * y), height, width, &w);
    let (c1, c2) = (SSIM_K1 * SSIM_K1, SSIM_K2 * SSIM_K2);
    let total: f64 = (0..mu_a.len())
        .map(|i| {
            let (ma, mb) = (mu_a[i], mu_b[i]);
            let va = aa[i] - ma * ma;
            let vb = bb[i] - mb * mb;
            let cov = ab[i] - ma * mb;
            ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2))
        })
        .sum();
    total / mu_a.len() as f64
}

/// Single-scale SSIM with an 11x11 Gaussian window (sigma 1.5), unit dynamic
/// range, averaged over window positions that fit inside the image.
///
/// RGB inputs are compared on their BT.601 luma.
pub fn ssim(pred: &Image, target: &Image) -> Result<f64> {
    pred.check_same_shape(target)?;
    if pred.height() < SSIM_WINDOW || pred.width() < SSIM_WINDOW {
        return Err(Error::InvalidArgument(format!(
            "SSIM needs at least {SSIM_WINDOW}x{SSIM_WINDOW} pixels, got {}x{}",
            pred.height(),
            pred.width()
        )));
    }
    let (a, b) = if pred.channels() == 3 {
        (pred.luma(), target.luma())
    } else {
        (pred.clone(), target.clone())
    };
    let (h, w) = (a.height(), a.width());
    let sum: f64 = (0..a.channels())
        .map(|c| ssim_plane(a.channel(c), b.channel(c), h, w))
        .sum();
    Ok(sum / a.channels() as f64)
}
