//! Rasters, PNG I/O, square resampling and pixel coordinate grids.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use crate::error::{Error, Result};

/// A channel-major raster of real samples.
///
/// Sample `(c, r, x)` lives at `data[(c * height + r) * width + x]`. Images
/// loaded from disk hold values in `[0, 1]`; intermediate images (residuals,
/// raw network renders) may leave that range.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    channels: usize,
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl Image {
    pub fn new(channels: usize, height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if channels == 0 || height == 0 || width == 0 {
            return Err(Error::InvalidArgument(format!(
                "image dimensions must be positive, got {channels}x{height}x{width}"
            )));
        }
        if data.len() != channels * height * width {
            return Err(Error::ShapeMismatch(format!(
                "{} samples for a {channels}x{height}x{width} image",
                data.len()
            )));
        }
        Ok(Self {
            channels,
            height,
            width,
            data,
        })
    }

    pub fn filled(channels: usize, height: usize, width: usize, value: f64) -> Result<Self> {
        Self::new(
            channels,
            height,
            width,
            vec![value; channels * height * width],
        )
    }

    /// Builds an image from `f(channel, row, col)`.
    pub fn from_fn(
        channels: usize,
        height: usize,
        width: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(channels * height * width);
        for c in 0..channels {
            for r in 0..height {
                for x in 0..width {
                    data.push(f(c, r, x));
                }
            }
        }
        Self::new(channels, height, width, data)
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn pixel_count(&self) -> usize {
        self.height * self.width
    }

    pub fn is_square(&self) -> bool {
        self.height == self.width
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, channel: usize, row: usize, col: usize) -> f64 {
        self.data[(channel * self.height + row) * self.width + col]
    }

    /// One channel as a row-major `height * width` slice.
    pub fn channel(&self, channel: usize) -> &[f64] {
        let plane = self.height * self.width;
        &self.data[channel * plane..(channel + 1) * plane]
    }

    pub fn same_shape(&self, other: &Image) -> bool {
        self.channels == other.channels && self.height == other.height && self.width == other.width
    }

    pub(crate) fn check_same_shape(&self, other: &Image) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "{}x{}x{} vs {}x{}x{}",
                self.channels, self.height, self.width, other.channels, other.height, other.width
            )))
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Image {
        Image {
            data: self.data.iter().map(|&v| f(v)).collect(),
            ..self.clone()
        }
    }

    pub fn scaled(&self, alpha: f64) -> Image {
        self.map(|v| v * alpha)
    }

    /// Elementwise `self - other`.
    pub fn sub(&self, other: &Image) -> Result<Image> {
        self.check_same_shape(other)?;
        Ok(Image {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
            ..self.clone()
        })
    }

    pub fn transposed(&self) -> Image {
        let (h, w) = (self.height, self.width);
        Image::from_fn(self.channels, w, h, |c, r, x| self.get(c, x, r))
            .expect("transpose preserves sample count")
    }

    pub fn clamped(&self) -> Image {
        self.map(|v| v.clamp(0.0, 1.0))
    }

    /// ITU-R BT.601 luma for RGB, identity for single-channel images.
    pub fn luma(&self) -> Image {
        if self.channels != 3 {
            return self.clone();
        }
        let plane = self.pixel_count();
        let data = (0..plane)
            .map(|i| 0.299 * self.data[i] + 0.587 * self.data[plane + i] + 0.114 * self.data[2 * plane + i])
            .collect();
        Image {
            channels: 1,
            height: self.height,
            width: self.width,
            data,
        }
    }

    /// A `side x side` window starting at `(row, col)`.
    pub fn crop(&self, row: usize, col: usize, height: usize, width: usize) -> Result<Image> {
        if row + height > self.height || col + width > self.width {
            return Err(Error::InvalidArgument(format!(
                "crop {height}x{width}+{row}+{col} exceeds {}x{}",
                self.height, self.width
            )));
        }
        Image::from_fn(self.channels, height, width, |c, r, x| self.get(c, row + r, col + x))
    }

    /// Samples of pixel `p` (row-major index) across channels.
    pub fn pixel(&self, p: usize) -> impl Iterator<Item = f64> + '_ {
        let plane = self.pixel_count();
        (0..self.channels).map(move |c| self.data[c * plane + p])
    }
}

/// Reads an 8-bit grayscale or RGB PNG, scaling bytes by 1/255.
///
/// Alpha channels are dropped with a warning. Other bit depths and palette
/// images are rejected.
pub fn load_png(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let decoder = png::Decoder::new(BufReader::new(file));
    let decode_err = |e: png::DecodingError| Error::Decode {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let mut reader = decoder.read_info().map_err(decode_err)?;
    let (color, depth) = {
        let info = reader.info();
        (info.color_type, info.bit_depth)
    };
    if depth != png::BitDepth::Eight {
        return Err(Error::UnsupportedPng {
            property: "bit depth",
            value: format!("{}", depth as u8),
        });
    }
    let (stored, kept) = match color {
        png::ColorType::Grayscale => (1, 1),
        png::ColorType::GrayscaleAlpha => (2, 1),
        png::ColorType::Rgb => (3, 3),
        png::ColorType::Rgba => (4, 3),
        png::ColorType::Indexed => {
            return Err(Error::UnsupportedPng {
                property: "color type",
                value: "indexed".into(),
            })
        }
    };
    if stored != kept {
        log::warn!("{}: dropping alpha channel", path.display());
    }
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::Decode {
            path: path.to_path_buf(),
            message: "image too large".into(),
        })?;
    let mut buf = vec![0u8; size];
    let frame = reader.next_frame(&mut buf).map_err(decode_err)?;
    let (width, height) = (frame.width as usize, frame.height as usize);
    let stride = frame.line_size;
    Image::from_fn(kept, height, width, |c, r, x| {
        buf[r * stride + x * stored + c] as f64 / 255.0
    })
}

/// Quantizes a sample to a byte: clamp to `[0, 1]`, then round half up.
pub fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0 + 0.5).floor() as u8
}

/// Writes an 8-bit grayscale (1 channel) or RGB (3 channels) PNG.
pub fn save_png(image: &Image, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let color = match image.channels {
        1 => png::ColorType::Grayscale,
        3 => png::ColorType::Rgb,
        c => {
            return Err(Error::InvalidArgument(format!(
                "cannot write a {c}-channel PNG"
            )))
        }
    };
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut encoder = png::Encoder::new(
        BufWriter::new(file),
        image.width as u32,
        image.height as u32,
    );
    encoder.set_color(color);
    encoder.set_depth(png::BitDepth::Eight);
    let encode_err = |e: png::EncodingError| match e {
        png::EncodingError::IoError(io) => Error::io(path, io),
        other => Error::InvalidArgument(other.to_string()),
    };
    let mut writer = encoder.write_header().map_err(encode_err)?;
    let plane = image.pixel_count();
    let mut bytes = Vec::with_capacity(plane * image.channels);
    for p in 0..plane {
        for c in 0..image.channels {
            bytes.push(quantize(image.data[c * plane + p]));
        }
    }
    writer.write_image_data(&bytes).map_err(encode_err)?;
    writer.finish().map_err(encode_err)
}

/// Bilinear resampling to `side x side` with half-pixel centers and edge
/// clamping. No anti-alias prefilter is applied.
pub fn resample_square(image: &Image, side: usize) -> Result<Image> {
    if side < 2 {
        return Err(Error::InvalidArgument(format!(
            "resample side must be at least 2, got {side}"
        )));
    }
    if image.height == side && image.width == side {
        return Ok(image.clone());
    }
    let rows = axis_taps(image.height, side);
    let cols = axis_taps(image.width, side);
    Image::from_fn(image.channels, side, side, |c, r, x| {
        let (r0, r1, fr) = rows[r];
        let (c0, c1, fc) = cols[x];
        let top = image.get(c, r0, c0) * (1.0 - fc) + image.get(c, r0, c1) * fc;
        let bottom = image.get(c, r1, c0) * (1.0 - fc) + image.get(c, r1, c1) * fc;
        top * (1.0 - fr) + bottom * fr
    })
}

/// Source index pair and blend weight for each destination index.
fn axis_taps(len_in: usize, len_out: usize) -> Vec<(usize, usize, f64)> {
    let scale = len_in as f64 / len_out as f64;
    let last = (len_in - 1) as f64;
    (0..len_out)
        .map(|i| {
            let src = ((i as f64 + 0.5) * scale - 0.5).clamp(0.0, last);
            let lo = src.floor();
            let i0 = lo as usize;
            let i1 = (i0 + 1).min(len_in - 1);
            (i0, i1, src - lo)
        })
        .collect()
}

/// Normalized pixel coordinates in `[-1, 1]^2`, row-major.
///
/// Pixel `(r, c)` maps to `(2c/(W-1) - 1, 2r/(H-1) - 1)`; a length-one axis
/// maps to 0.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordGrid {
    height: usize,
    width: usize,
    coords: Vec<[f64; 2]>,
}

impl CoordGrid {
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[[f64; 2]] {
        &self.coords
    }
}

fn axis_coord(i: usize, len: usize) -> f64 {
    if len == 1 {
        0.0
    } else {
        2.0 * i as f64 / (len - 1) as f64 - 1.0
    }
}

pub fn make_coord_grid(height: usize, width: usize) -> CoordGrid {
    let mut coords = Vec::with_capacity(height * width);
    for r in 0..height {
        let y = axis_coord(r, height);
        for c in 0..width {
            coords.push([axis_coord(c, width), y]);
        }
    }
    CoordGrid {
        height,
        width,
        coords,
    }
}
