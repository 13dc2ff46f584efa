//! Image carriers, file I/O, and the synthetic shape dataset.
//!
//! Two raster types cover the two regimes of the pipeline. [`Raster`] is an
//! unconstrained finite float grid used for noisy diffusion states, which
//! routinely leave `[0,1]`. [`Image`] wraps a raster that is guaranteed to
//! stay inside `[0,1]`, which is what file I/O, SSIM, and the distortions
//! operate on.

mod io;
mod synth;

pub use io::{load_image, save_image, write_manifest};
pub use synth::gen_shapes_dataset;

use crate::error::{Error, Result};

/// Minimum edge length for a valid [`Image`]; the SSIM window must fit.
pub const MIN_IMAGE_DIM: usize = 16;

/// A finite float grid in row-major, channel-interleaved layout.
///
/// Values may be any finite float. Diffusion states are carried as rasters
/// so that the inversion algebra is never distorted by clamping.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    height: usize,
    width: usize,
    channels: usize,
    data: Vec<f64>,
}

impl Raster {
    /// Build a raster, checking shape consistency and finiteness.
    pub fn new(height: usize, width: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if channels != 1 && channels != 3 {
            return Err(Error::parameter(format!(
                "channels must be 1 or 3, got {channels}"
            )));
        }
        if data.len() != height * width * channels {
            return Err(Error::parameter(format!(
                "data length {} does not match {height}x{width}x{channels}",
                data.len()
            )));
        }
        if let Some(v) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::parameter(format!("non-finite raster value {v}")));
        }
        Ok(Raster { height, width, channels, data })
    }

    /// All-zero raster of the given shape.
    pub fn zeros(height: usize, width: usize, channels: usize) -> Self {
        Raster { height, width, channels, data: vec![0.0; height * width * channels] }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn numel(&self) -> usize {
        self.data.len()
    }

    pub fn same_shape(&self, other: &Raster) -> bool {
        self.height == other.height
            && self.width == other.width
            && self.channels == other.channels
    }

    /// Value at `(y, x, ch)`.
    pub fn at(&self, y: usize, x: usize, ch: usize) -> f64 {
        self.data[(y * self.width + x) * self.channels + ch]
    }

    /// Element-wise map into a new raster of the same shape.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Raster {
        Raster {
            height: self.height,
            width: self.width,
            channels: self.channels,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Element-wise combination of two same-shape rasters.
    pub fn zip_map(&self,
        other: &Raster,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Raster> {
        if !self.same_shape(other) {
            return Err(Error::parameter("raster shape mismatch"));
        }
        Ok(Raster {
            height: self.height,
            width: self.width,
            channels: self.channels,
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub(crate) fn from_parts_unchecked(
        height: usize,
        width: usize,
        channels: usize,
        data: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(data.len(), height * width * channels);
        Raster { height, width, channels, data }
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }
}

/// A raster validated to lie in `[0,1]` with both edges at least 16 pixels.
///
/// Dereferences to [`Raster`] for read access.
#[derive(Debug, Clone, PartialEq)]
pub struct Image(Raster);

impl Image {
    /// Validate and wrap raw pixel data.
    pub fn new(height: usize, width: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        Image::try_from_raster(Raster::new(height, width, channels, data)?)
    }

    /// Validate an existing raster as an image.
    pub fn try_from_raster(raster: Raster) -> Result<Self> {
        if raster.height < MIN_IMAGE_DIM || raster.width < MIN_IMAGE_DIM {
            return Err(Error::parameter(format!(
                "image dims {}x{} below minimum {MIN_IMAGE_DIM}",
                raster.height, raster.width
            )));
        }
        if let Some(v) = raster.data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::parameter(format!("pixel value {v} outside [0,1]")));
        }
        Ok(Image(raster))
    }

    /// Clamp a raster into `[0,1]` and wrap it. Dims must still be valid.
    pub fn from_raster_clamped(raster: &Raster) -> Result<Self> {
        Image::try_from_raster(raster.map(|v| v.clamp(0.0, 1.0)))
    }

    pub fn raster(&self) -> &Raster {
        &self.0
    }

    pub fn into_raster(self) -> Raster {
        self.0
    }

    pub fn to_raster(&self) -> Raster {
        self.0.clone()
    }
}

impl std::ops::Deref for Image {
    type Target = Raster;

    fn deref(&self) -> &Raster {
        &self.0
    }
}

/// One dataset entry: a stable id, the image, and its class label.
#[derive(Debug, Clone)]
pub struct LabeledImage {
    pub id: u64,
    pub class: usize,
    pub image: Image,
}

/// Member and holdout splits plus the seed that regenerates them.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub members: Vec<LabeledImage>,
    pub holdout: Vec<LabeledImage>,
    pub seed: u64,
}

impl Dataset {
    pub fn k_classes(&self) -> usize {
        self.members
            .iter()
            .chain(self.holdout.iter())
            .map(|l| l.class + 1)
            .max()
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raster_rejects_bad_shapes() {
        assert!(Raster::new(4, 4, 2, vec![0.0; 32]).is_err());
        assert!(Raster::new(4, 4, 1, vec![0.0; 15]).is_err());
        assert!(Raster::new(4, 4, 1, vec![f64::NAN; 16]).is_err());
        assert!(Raster::new(4, 4, 1, vec![-3.5; 16]).is_ok());
    }

    #[test]
    fn image_enforces_range_and_dims() {
        assert!(Image::new(16, 16, 1, vec![0.5; 256]).is_ok());
        assert!(Image::new(16, 16, 1, vec![-0.01; 256]).is_err());
        assert!(Image::new(16, 16, 1, vec![1.01; 256]).is_err());
        assert!(Image::new(8, 16, 1, vec![0.5; 128]).is_err());
    }

    #[test]
    fn clamp_conversion() {
        let r = Raster::new(16, 16, 1, vec![1.75; 256]).unwrap();
        let img = Image::from_raster_clamped(&r).unwrap();
        assert!(img.data().iter().all(|&v| v == 1.0));
    }
}
