//! 8-bit PGM (P5) and PNG image files, plus the dataset manifest.
//!
//! Quantization is fixed: a pixel `v` is stored as `round(v * 255)` clamped
//! to `[0, 255]`, and decodes back as `byte / 255`. Saving then reloading an
//! already-quantized image is bit-identical.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

use super::{Dataset, Image};

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io { path: path.to_path_buf(), source }
}

fn format_err(path: &Path, reason: impl Into<String>) -> Error {
    Error::Format { path: path.to_path_buf(), reason: reason.into() }
}

fn quantize(v: f64) -> u8 {
    (v * 255.0).round().clamp(0.0, 255.0) as u8
}

/// Load an 8-bit PGM (grayscale) or PNG (grayscale or RGB) file.
pub fn load_image(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .unwrap_or_default();
    match ext.as_str() {
        "pgm" => load_pgm(path),
        "png" => load_png(path),
        other => Err(format_err(path, format!("unsupported extension '{other}'"))),
    }
}

/// Save an image as 8-bit PGM (1-channel only) or PNG, chosen by extension.
pub fn save_image(image: &Image, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .unwrap_or_default();
    match ext.as_str() {
        "pgm" => save_pgm(image, path),
        "png" => save_png(image, path),
        other => Err(format_err(path, format!("unsupported extension '{other}'"))),
    }
}

fn load_pgm(path: &Path) -> Result<Image> {
    let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
    let mut pos = 0usize;

    let mut next_token = |bytes: &[u8]| -> Result<String> {
        // Skip whitespace and '#' comment lines between header fields.
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(format_err(path, "truncated PGM header"));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };

    if next_token(&bytes)? != "P5" {
        return Err(format_err(path, "not a binary PGM (P5) file"));
    }
    let width: usize = next_token(&bytes)?
        .parse()
        .map_err(|_| format_err(path, "bad PGM width"))?;
    let height: usize = next_token(&bytes)?
        .parse()
        .map_err(|_| format_err(path, "bad PGM height"))?;
    let maxval: usize = next_token(&bytes)?
        .parse()
        .map_err(|_| format_err(path, "bad PGM maxval"))?;
    if maxval != 255 {
        return Err(format_err(path, format!("unsupported bit depth (maxval {maxval})")));
    }
    pos += 1; // single whitespace byte after maxval
    let need = width * height;
    if bytes.len() < pos + need {
        return Err(format_err(path, "PGM pixel data truncated"));
    }
    let data = bytes[pos..pos + need].iter().map(|&b| b as f64 / 255.0).collect();
    Image::new(height, width, 1, data)
        .map_err(|e| format_err(path, format!("invalid image content: {e}")))
}

fn save_pgm(image: &Image, path: &Path) -> Result<()> {
    if image.channels() != 1 {
        return Err(Error::parameter("PGM output requires a 1-channel image"));
    }
    let mut out = Vec::with_capacity(image.numel() + 32);
    write!(out, "P5\n{} {}\n255\n", image.width(), image.height())
        .expect("in-memory write");
    out.extend(image.data().iter().map(|&v| quantize(v)));
    fs::write(path, out).map_err(|e| io_err(path, e))
}

fn load_png(path: &Path) -> Result<Image> {
    let dynimg = image::open(path)
        .map_err(|e| format_err(path, format!("PNG decode failed: {e}")))?;
    match dynimg {
        image::DynamicImage::ImageLuma8(img) => {
            let (w, h) = img.dimensions();
            let data = img.into_raw().into_iter().map(|b| b as f64 / 255.0).collect();
            Image::new(h as usize, w as usize, 1, data)
                .map_err(|e| format_err(path, format!("invalid image content: {e}")))
        }
        image::DynamicImage::ImageRgb8(img) => {
            let (w, h) = img.dimensions();
            let data = img.into_raw().into_iter().map(|b| b as f64 / 255.0).collect();
            Image::new(h as usize, w as usize, 3, data)
                .map_err(|e| format_err(path, format!("invalid image content: {e}")))
        }
        other => Err(format_err(
            path,
            format!("unsupported PNG color type {:?}; expected 8-bit gray or RGB", other.color()),
        )),
    }
}

fn save_png(image: &Image, path: &Path) -> Result<()> {
    let bytes: Vec<u8> = image.data().iter().map(|&v| quantize(v)).collect();
    let w = image.width() as u32;
    let h = image.height() as u32;
    let result = match image.channels() {
        1 => image::GrayImage::from_raw(w, h, bytes)
            .expect("sized buffer")
            .save_with_format(path, image::ImageFormat::Png),
        3 => image::RgbImage::from_raw(w, h, bytes)
            .expect("sized buffer")
            .save_with_format(path, image::ImageFormat::Png),
        _ => unreachable!("raster channels validated at construction"),
    };
    result.map_err(|e| match e {
        image::ImageError::IoError(io) => io_err(path, io),
        other => format_err(path, format!("PNG encode failed: {other}")),
    })
}

/// Write the dataset manifest (`id,split,class,path`) next to saved images.
///
/// `paths[i]` is the already-saved location of the image with the same index
/// in `members ++ holdout` ordering.
pub fn write_manifest(dataset: &Dataset, paths: &[String], manifest_path: impl AsRef<Path>) -> Result<()> {
    let manifest_path = manifest_path.as_ref();
    let total = dataset.members.len() + dataset.holdout.len();
    if paths.len() != total {
        return Err(Error::parameter(format!(
            "manifest expects {total} paths, got {}",
            paths.len()
        )));
    }
    let mut out = String::from("id,split,class,path\n");
    for (entry, split, path) in dataset
        .members
        .iter()
        .map(|l| (l, "member"))
        .chain(dataset.holdout.iter().map(|l| (l, "holdout")))
        .zip(paths.iter())
        .map(|((l, s), p)| (l, s, p))
    {
        out.push_str(&format!("{},{},{},{}\n", entry.id, split, entry.class, path));
    }
    fs::write(manifest_path, out).map_err(|e| io_err(manifest_path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imagecore::Raster;

    #[test]
    fn black_pgm_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("black.pgm");
        let img = Image::new(16, 16, 1, vec![0.0; 256]).unwrap();
        save_image(&img, &path).unwrap();
        let back = load_image(&path).unwrap();
        assert!(back.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn range_endpoints_quantize_exactly() {
        assert_eq!(quantize(1.0), 255);
        assert_eq!(quantize(0.0), 0);
        // round-half-up at the midpoint
        assert_eq!(quantize(0.5), 128);
    }

    #[test]
    fn full_scale_decodes_to_one() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("white.pgm");
        let img = Image::new(16, 16, 1, vec![1.0; 256]).unwrap();
        save_image(&img, &path).unwrap();
        let back = load_image(&path).unwrap();
        assert!(back.data().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn save_load_save_is_bit_identical() {
        let dir = tempfile::tempdir().unwrap();
        let p1 = dir.path().join("a.png");
        let p2 = dir.path().join("b.png");
        let data: Vec<f64> = (0..16 * 16 * 3).map(|i| (i % 256) as f64 / 255.0).collect();
        let img = Image::new(16, 16, 3, data).unwrap();
        save_image(&img, &p1).unwrap();
        let once = load_image(&p1).unwrap();
        save_image(&once, &p2).unwrap();
        let twice = load_image(&p2).unwrap();
        assert_eq!(once.data(), twice.data());
    }

    #[test]
    fn out_of_range_rejected_before_save() {
        // The Image invariant fires at construction, ahead of any file write.
        let raster = Raster::new(16, 16, 1, vec![-0.01; 256]).unwrap();
        assert!(Image::try_from_raster(raster).is_err());
    }

    #[test]
    fn missing_file_reports_path() {
        let err = load_image("/nonexistent/no.pgm").unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("/nonexistent/no.pgm"), "message was: {msg}");
    }

    #[test]
    fn pgm_rejects_wrong_magic() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.pgm");
        std::fs::write(&path, b"P2\n4 4\n255\n").unwrap();
        assert!(load_image(&path).is_err());
    }
}
