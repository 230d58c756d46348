//! Scalar abstraction over `f32` (training) and `f64` (verification).

use std::fmt::{Debug, Display};

use ndarray::{LinalgScalar, ScalarOperand};
use num_traits::Float;

pub trait Real:
    Float + LinalgScalar + ScalarOperand + Debug + Display + Default + Send + Sync + 'static
{
    fn from_f64(v: f64) -> Self;
    fn as_f64(self) -> f64;

    /// Writes `sin(x[i])` and `cos(x[i])` into the output slices.
    fn sin_cos_into(x: &[Self], sin: &mut [Self], cos: &mut [Self]);

    fn sin_into(x: &[Self], sin: &mut [Self]);
}

impl Real for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }

    fn as_f64(self) -> f64 {
        self
    }

    fn sin_cos_into(x: &[f64], sin: &mut [f64], cos: &mut [f64]) {
        for ((v, s), c) in x.iter().zip(sin.iter_mut()).zip(cos.iter_mut()) {
            (*s, *c) = v.sin_cos();
        }
    }

    fn sin_into(x: &[f64], sin: &mut [f64]) {
        for (v, s) in x.iter().zip(sin.iter_mut()) {
            *s = v.sin();
        }
    }
}

impl Real for f32 {
    fn from_f64(v: f64) -> Self {
        v as f32
    }

    fn as_f64(self) -> f64 {
        self as f64
    }

    fn sin_cos_into(x: &[f32], sin: &mut [f32], cos: &mut [f32]) {
        for ((v, s), c) in x.iter().zip(sin.iter_mut()).zip(cos.iter_mut()) {
            (*s, *c) = sin_cos_f32(*v);
        }
    }

    fn sin_into(x: &[f32], sin: &mut [f32]) {
        for (v, s) in x.iter().zip(sin.iter_mut()) {
            *s = sin_cos_f32(*v).0;
        }
    }
}

// pi/2 split into three parts so that q * PIO2_HI is exact for |q| < 2^15.
const PIO2_HI: f32 = 1.570_312_5;
#[allow(clippy::excessive_precision)]
const PIO2_MID: f32 = 4.837_512_969_970_703_125e-4;
#[allow(clippy::excessive_precision)]
const PIO2_LO: f32 = 7.549_789_954_891_882e-8;
// 1.5 * 2^23: adding and subtracting rounds to the nearest integer.
const ROUND_MAGIC: f32 = 12_582_912.0;

/// Branch-free single precision sine and cosine.
///
/// Cody-Waite reduction to `[-pi/4, pi/4]` followed by the cephes minimax
/// polynomials; absolute error stays below `2e-7` for `|x| < 1e4`. The body
/// is straight-line so slice loops over it vectorize.
#[inline(always)]
pub fn sin_cos_f32(x: f32) -> (f32, f32) {
    let q = (x * std::f32::consts::FRAC_2_PI + ROUND_MAGIC) - ROUND_MAGIC;
    let r = ((x - q * PIO2_HI) - q * PIO2_MID) - q * PIO2_LO;
    let r2 = r * r;
    let s = r + r * r2 * (-1.666_665_5e-1 + r2 * (8.332_161e-3 + r2 * -1.951_529_6e-4));
    let c = 1.0 - 0.5 * r2
        + r2 * r2 * (4.166_664_6e-2 + r2 * (-1.388_731_6e-3 + r2 * 2.443_315_7e-5));
    let quadrant = q as i32;
    let swap = quadrant & 1 != 0;
    let (sv, cv) = if swap { (c, s) } else { (s, c) };
    let sin_sign = ((quadrant & 2) as u32) << 30;
    let cos_sign = ((quadrant.wrapping_add(1) & 2) as u32) << 30;
    (
        f32::from_bits(sv.to_bits() ^ sin_sign),
        f32::from_bits(cv.to_bits() ^ cos_sign),
    )
}
