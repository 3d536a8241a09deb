use std::path::Path;

use edgechroma::RgbImage;
use image::{ExtendedColorType, ImageFormat, ImageReader};

use crate::run::CliError;

/// Decodes a PNG or JPEG (or anything else `image` recognizes) to 8-bit RGB.
pub fn read_rgb(path: &Path) -> Result<RgbImage, CliError> {
    let fail = |e: &dyn std::fmt::Display| CliError::io(path, e);
    let decoded = ImageReader::open(path)
        .map_err(|e| fail(&e))?
        .with_guessed_format()
        .map_err(|e| fail(&e))?
        .decode()
        .map_err(|e| fail(&e))?
        .into_rgb8();
    let (w, h) = (decoded.width() as usize, decoded.height() as usize);
    RgbImage::from_raw(w, h, decoded.as_raw()).map_err(|e| fail(&e))
}

pub fn write_rgb_png(path: &Path, image: RgbImage) -> Result<(), CliError> {
    let (w, h) = image.dimensions();
    write_png(path, &image.into_raw(), w, h, ExtendedColorType::Rgb8)
}

pub fn write_gray_png(
    path: &Path,
    pixels: &[u8],
    width: usize,
    height: usize,
) -> Result<(), CliError> {
    write_png(path, pixels, width, height, ExtendedColorType::L8)
}

fn write_png(
    path: &Path,
    bytes: &[u8],
    width: usize,
    height: usize,
    color: ExtendedColorType,
) -> Result<(), CliError> {
    let dim = |v: usize| u32::try_from(v).map_err(|_| CliError::io(path, &"image too large"));
    image::save_buffer_with_format(
        path,
        bytes,
        dim(width)?,
        dim(height)?,
        color,
        ImageFormat::Png,
    )
    .map_err(|e| CliError::io(path, &e))
}
