//! Raster file I/O: PNG and binary PGM/PPM, 8-bit only.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{DynamicImage, ExtendedColorType, ImageEncoder, ImageError, ImageFormat, ImageReader};
use snakelet_core::{BinaryEdgeMap, RasterImage};

use crate::error::CliError;

/// Reads an image and normalizes 8-bit samples to `[0, 1]`. Alpha is
/// dropped; gray stays one channel, color becomes three.
pub fn load_image(path: &Path) -> Result<RasterImage, CliError> {
    let reader = ImageReader::open(path)
        .map_err(|e| CliError::io(path, e))?
        .with_guessed_format()
        .map_err(|e| CliError::io(path, e))?;
    let decoded = reader.decode().map_err(|e| match e {
        ImageError::IoError(e) => CliError::io(path, e),
        other => CliError::input(path, other.to_string()),
    })?;
    let (w, h) = (decoded.width() as usize, decoded.height() as usize);
    let (channels, bytes) = match decoded {
        DynamicImage::ImageLuma8(b) => (1, b.into_raw()),
        DynamicImage::ImageLumaA8(_) => (1, decoded.to_luma8().into_raw()),
        DynamicImage::ImageRgb8(b) => (3, b.into_raw()),
        DynamicImage::ImageRgba8(_) => (3, decoded.to_rgb8().into_raw()),
        DynamicImage::ImageLuma16(_)
        | DynamicImage::ImageLumaA16(_)
        | DynamicImage::ImageRgb16(_)
        | DynamicImage::ImageRgba16(_) => return Err(CliError::input(path, "16-bit images are not supported")),
        _ => return Err(CliError::input(path, "unsupported sample format")),
    };
    let data = bytes.iter().map(|&b| b as f64 / 255.0).collect();
    RasterImage::new(w, h, channels, data).map_err(|e| CliError::input(path, e.to_string()))
}

/// Quantizes a `[0, 1]` sample to a byte.
pub fn to_byte(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

pub fn edge_bytes(map: &BinaryEdgeMap) -> Vec<u8> {
    map.membership().iter().map(|&b| if b { 255 } else { 0 }).collect()
}

fn encoder_error(path: &Path, e: ImageError) -> CliError {
    match e {
        ImageError::IoError(e) => CliError::io(path, e),
        other => CliError::input(path, other.to_string()),
    }
}

/// Writes 8-bit gray (`channels = 1`) or RGB (`channels = 3`) as PNG.
pub fn write_png(path: &Path, width: usize, height: usize, channels: usize, bytes: &[u8]) -> Result<(), CliError> {
    let color = if channels == 3 { ExtendedColorType::Rgb8 } else { ExtendedColorType::L8 };
    image::save_buffer_with_format(path, bytes, width as u32, height as u32, color, ImageFormat::Png)
        .map_err(|e| encoder_error(path, e))
}

/// Writes an 8-bit binary graymap (P5).
pub fn write_pgm(path: &Path, width: usize, height: usize, bytes: &[u8]) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut out = BufWriter::new(file);
    PnmEncoder::new(&mut out)
        .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
        .write_image(bytes, width as u32, height as u32, ExtendedColorType::L8)
        .map_err(|e| encoder_error(path, e))?;
    out.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_edges(path: &Path, map: &BinaryEdgeMap) -> Result<(), CliError> {
    write_png(path, map.width(), map.height(), 1, &edge_bytes(map))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}
