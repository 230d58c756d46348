use std::io::Write;

use crate::error::Result;
use crate::image_io::{resample_square, Image};
use crate::spectrum::spectrum_cropped;

/// Per-frequency ratio of residual spectra, `S_n(target - a) / S_n(target - b)`.
///
/// Entries below one mean `pred_a` leaves less error at that frequency.
/// A zero denominator yields `None`. Non-square residuals are resampled to
/// `resolution x resolution` first.
pub fn residual_spectrum_ratio(
    pred_a: &Image,
    pred_b: &Image,
    target: &Image,
    n: usize,
    resolution: usize,
) -> Result<Vec<Option<f64>>> {
    let square = |img: Image| -> Result<Image> {
        if img.is_square() {
            Ok(img)
        } else {
            resample_square(&img, resolution)
        }
    };
    let ra = square(target.sub(pred_a)?)?;
    let rb = square(target.sub(pred_b)?)?;
    let sa = spectrum_cropped(&ra, n)?;
    let sb = spectrum_cropped(&rb, n)?;
    Ok(sa
        .entries()
        .iter()
        .zip(sb.entries())
        .map(|(&a, &b)| (b > 0.0).then(|| a / b))
        .collect())
}

/// `d,ratio` with an empty field for missing entries.
pub fn write_ratio_csv(ratio: &[Option<f64>], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "d,ratio")?;
    for (i, r) in ratio.iter().enumerate() {
        match r {
            Some(v) => writeln!(out, "{},{}", i + 1, v)?,
            None => writeln!(out, "{},", i + 1)?,
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn target() -> Image {
        Image::from_fn(1, 16, 16, |_, r, c| ((r * 3 + c * 5) % 11) as f64 / 11.0).unwrap()
    }

    #[test]
    fn equal_predictions_give_ones() {
        let p = Image::filled(1, 16, 16, 0.2).unwrap();
        let r = residual_spectrum_ratio(&p, &p, &target(), 8, 16).unwrap();
        assert!(r.iter().all(|v| *v == Some(1.0)));
    }

    #[test]
    fn perfect_prediction_gives_zeros() {
        let p = Image::filled(1, 16, 16, 0.2).unwrap();
        let r = residual_spectrum_ratio(&target(), &p, &target(), 8, 16).unwrap();
        assert!(r.iter().all(|v| *v == Some(0.0)));
    }

    #[test]
    fn zero_denominator_is_missing() {
        let r = residual_spectrum_ratio(&Image::filled(1, 16, 16, 0.0).unwrap(), &target(), &target(), 4, 16).unwrap();
        assert!(r.iter().all(Option::is_none));
        let mut out = Vec::new();
        write_ratio_csv(&r, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap().lines().nth(1), Some("1,"));
    }

    #[test]
    fn shape_mismatch() {
        let p = Image::filled(1, 16, 15, 0.2).unwrap();
        assert!(residual_spectrum_ratio(&p, &p, &target(), 4, 16).is_err());
    }
}
