//! Raster types and the convolution substrate shared by every pipeline stage.
//!
//! Field math is done in `f64` throughout; quantization to 8 bits only
//! happens when a caller encodes an image.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// An 8-bit RGB pixel.
pub type Rgb = [u8; 3];

/// BT.601 luma weights for R, G and B.
pub const LUMA_WEIGHTS: [f64; 3] = [0.299, 0.587, 0.114];

/// Luma of a (possibly fractional) RGB triple.
pub fn luma(rgb: [f64; 3]) -> f64 {
    LUMA_WEIGHTS[0] * rgb[0] + LUMA_WEIGHTS[1] * rgb[1] + LUMA_WEIGHTS[2] * rgb[2]
}

/// Row-major raster of 8-bit RGB pixels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    data: Vec<Rgb>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, data: Vec<Rgb>) -> Result<Self> {
        check_dims(width, height)?;
        if data.len() != width * height {
            return Err(Error::InvalidInput(format!(
                "{width}x{height} image needs {} pixels, got {}",
                width * height,
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Image filled with one color.
    pub fn filled(width: usize, height: usize, rgb: Rgb) -> Result<Self> {
        check_dims(width, height)?;
        Ok(Self {
            width,
            height,
            data: vec![rgb; width * height],
        })
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> Rgb) -> Result<Self> {
        check_dims(width, height)?;
        let data = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Builds an image from a packed `RGBRGB...` byte buffer.
    pub fn from_raw(width: usize, height: usize, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != width * height * 3 {
            return Err(Error::InvalidInput(format!(
                "{width}x{height} RGB buffer needs {} bytes, got {}",
                width * height * 3,
                bytes.len()
            )));
        }
        let data = bytes.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
        Self::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn pixels(&self) -> &[Rgb] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> Rgb {
        self.data[y * self.width + x]
    }

    pub fn into_raw(self) -> Vec<u8> {
        self.data.into_iter().flatten().collect()
    }

    pub fn transpose(&self) -> Self {
        Self {
            width: self.height,
            height: self.width,
            data: transpose_vec(&self.data, self.width, self.height),
        }
    }
}

/// Row-major grid of finite `f64` values.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl ScalarField {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        check_dims(width, height)?;
        if data.len() != width * height {
            return Err(Error::InvalidInput(format!(
                "{width}x{height} field needs {} values, got {}",
                width * height,
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite value {} at index {i}",
                data[i]
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let data = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        Self::new(width, height, data)
    }

    /// Callers guarantee the invariants.
    pub(crate) fn from_parts(width: usize, height: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), width * height);
        debug_assert!(data.iter().all(|v| v.is_finite()));
        Self {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn transpose(&self) -> Self {
        Self {
            width: self.height,
            height: self.width,
            data: transpose_vec(&self.data, self.width, self.height),
        }
    }

    /// Largest value in the field.
    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub(crate) fn ensure_same_dims(&self, other: &ScalarField) -> Result<()> {
        if self.dimensions() != other.dimensions() {
            return Err(Error::mismatch(self.dimensions(), other.dimensions()));
        }
        Ok(())
    }

    /// Applies `f` pairwise to two equally sized fields.
    pub(crate) fn zip_map(
        &self,
        other: &ScalarField,
        f: impl Fn(f64, f64) -> f64 + Sync,
    ) -> Result<ScalarField> {
        self.ensure_same_dims(other)?;
        let data = self
            .data
            .par_iter()
            .zip(other.data.par_iter())
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self::from_parts(self.width, self.height, data))
    }
}

/// Square, odd-sized convolution kernel with a scalar normalizer.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel {
    size: usize,
    weights: Vec<f64>,
    normalizer: f64,
}

impl Kernel {
    pub fn new(size: usize, weights: Vec<f64>, normalizer: f64) -> Result<Self> {
        if size == 0 || size.is_multiple_of(2) {
            return Err(Error::parameter(
                "size",
                format!("kernel size must be odd, got {size}"),
            ));
        }
        if weights.len() != size * size {
            return Err(Error::parameter(
                "weights",
                format!("expected {} weights, got {}", size * size, weights.len()),
            ));
        }
        if !normalizer.is_finite() || weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::parameter("weights", "kernel values must be finite"));
        }
        Ok(Self {
            size,
            weights,
            normalizer,
        })
    }

    pub fn identity() -> Self {
        Self {
            size: 1,
            weights: vec![1.0],
            normalizer: 1.0,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    pub fn weight(&self, row: usize, col: usize) -> f64 {
        self.weights[row * self.size + col]
    }

    pub fn transpose(&self) -> Self {
        Self {
            size: self.size,
            weights: transpose_vec(&self.weights, self.size, self.size),
            normalizer: self.normalizer,
        }
    }
}

/// Grayscale luminance with BT.601 weights, unrounded.
pub fn to_grayscale(image: &RgbImage) -> ScalarField {
    let data = image
        .data
        .par_iter()
        .map(|p| luma([f64::from(p[0]), f64::from(p[1]), f64::from(p[2])]))
        .collect();
    ScalarField::from_parts(image.width, image.height, data)
}

/// "Same"-size cross-correlation with replicate padding.
///
/// Each window is the correctly rounded sum of its `value * weight *
/// normalizer` products, so the result does not depend on the order the
/// taps are visited in. Transposing or mirroring field and kernel together
/// transposes or mirrors the output bit for bit, and a kernel whose weights
/// cancel yields exactly zero on a constant field.
pub fn convolve(field: &ScalarField, kernel: &Kernel) -> ScalarField {
    let (width, height) = field.dimensions();
    let n = kernel.size;
    let half = n / 2;
    let norm = kernel.normalizer;
    let src = &field.data;

    // Clamped source index for each (output coordinate, kernel tap).
    let col_index: Vec<usize> = (0..width)
        .flat_map(|x| (0..n).map(move |j| clamp_offset(x, j, half, width)))
        .collect();

    let mut out = vec![0.0; width * height];
    out.par_chunks_mut(width).enumerate().for_each(|(y, row)| {
        let rows: Vec<&[f64]> = (0..n)
            .map(|i| {
                let sy = clamp_offset(y, i, half, height);
                &src[sy * width..(sy + 1) * width]
            })
            .collect();
        let mut acc = ExactSum::with_capacity(n * n);
        for (x, slot) in row.iter_mut().enumerate() {
            let cols = &col_index[x * n..(x + 1) * n];
            acc.clear();
            for (i, src_row) in rows.iter().enumerate() {
                for (j, &col) in cols.iter().enumerate() {
                    acc.add(src_row[col] * kernel.weights[i * n + j] * norm);
                }
            }
            *slot = acc.value();
        }
    });
    ScalarField::from_parts(width, height, out)
}

/// Exact running sum of `f64` terms, rounded once when read.
///
/// Keeps the sum as a list of non-overlapping partials (Shewchuk's
/// expansion); `value` rounds that expansion to nearest, ties to even.
/// Terms must be finite and the sum must not overflow.
#[derive(Clone, Debug, Default)]
pub struct ExactSum {
    partials: Vec<f64>,
}

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        Self {
            partials: Vec::with_capacity(n),
        }
    }

    pub fn clear(&mut self) {
        self.partials.clear();
    }

    pub fn add(&mut self, mut x: f64) {
        let mut kept = 0;
        for k in 0..self.partials.len() {
            let mut y = self.partials[k];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                self.partials[kept] = lo;
                kept += 1;
            }
            x = hi;
        }
        self.partials.truncate(kept);
        self.partials.push(x);
    }

    pub fn value(&self) -> f64 {
        let p = &self.partials;
        let Some(mut n) = p.len().checked_sub(1) else {
            return 0.0;
        };
        let mut hi = p[n];
        let mut lo = 0.0;
        while n > 0 {
            let x = hi;
            n -= 1;
            let y = p[n];
            hi = x + y;
            lo = y - (hi - x);
            if lo != 0.0 {
                break;
            }
        }
        // Round-half-even correction when the remaining partials push a tie
        // one way or the other.
        if n > 0 && ((lo < 0.0 && p[n - 1] < 0.0) || (lo > 0.0 && p[n - 1] > 0.0)) {
            let y = lo * 2.0;
            let x = hi + y;
            if y == x - hi {
                hi = x;
            }
        }
        hi
    }
}

impl FromIterator<f64> for ExactSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut sum = Self::new();
        iter.into_iter().for_each(|x| sum.add(x));
        sum
    }
}

fn clamp_offset(center: usize, tap: usize, half: usize, len: usize) -> usize {
    (center + tap).saturating_sub(half).min(len - 1)
}

fn check_dims(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidInput(format!(
            "dimensions must be at least 1x1, got {width}x{height}"
        )));
    }
    Ok(())
}

pub(crate) fn transpose_vec<T: Copy>(data: &[T], width: usize, height: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(data.len());
    for x in 0..width {
        for y in 0..height {
            out.push(data[y * width + x]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn blur_kernel() -> Kernel {
        Kernel::new(3, vec![1., 2., 1., 2., 4., 2., 1., 2., 1.], 1.0 / 16.0).unwrap()
    }

    #[test]
    fn grayscale_of_white_is_255() {
        let img = RgbImage::filled(3, 2, [255, 255, 255]).unwrap();
        assert!(to_grayscale(&img).values().iter().all(|&v| v == 255.0));
    }

    #[test]
    fn grayscale_of_gray_is_identity() {
        for g in [0u8, 1, 17, 128, 254, 255] {
            let img = RgbImage::filled(2, 2, [g, g, g]).unwrap();
            for &v in to_grayscale(&img).values() {
                assert!((v - f64::from(g)).abs() < 1e-12, "{g} -> {v}");
            }
        }
    }

    #[test]
    fn grayscale_of_red() {
        let img = RgbImage::filled(1, 1, [255, 0, 0]).unwrap();
        assert!((to_grayscale(&img).get(0, 0) - 76.245).abs() < 1e-12);
    }

    #[test]
    fn constant_field_survives_blur() {
        let f = ScalarField::filled(6, 4, 42.5).unwrap();
        assert_eq!(convolve(&f, &blur_kernel()), f);
    }

    #[test]
    fn impulse_response_of_blur() {
        let f =
            ScalarField::from_fn(5, 5, |x, y| if (x, y) == (2, 2) { 16.0 } else { 0.0 }).unwrap();
        let out = convolve(&f, &blur_kernel());
        for y in 0..5usize {
            for x in 0..5usize {
                let (dx, dy) = (x.abs_diff(2), y.abs_diff(2));
                let expected = match (dx, dy) {
                    (0, 0) => 4.0,
                    (1, 0) | (0, 1) => 2.0,
                    (1, 1) => 1.0,
                    _ => 0.0,
                };
                assert_eq!(out.get(x, y), expected, "at ({x}, {y})");
            }
        }
    }

    #[test]
    fn identity_kernel_is_identity() {
        let f = ScalarField::from_fn(4, 3, |x, y| (x * 7 + y) as f64 * 0.37 - 1.0).unwrap();
        assert_eq!(convolve(&f, &Kernel::identity()), f);
    }

    #[test]
    fn single_pixel_field_replicates() {
        let f = ScalarField::filled(1, 1, 3.0).unwrap();
        assert_eq!(convolve(&f, &blur_kernel()).get(0, 0), 3.0);
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(Kernel::new(2, vec![0.0; 4], 1.0).is_err());
        assert!(Kernel::new(3, vec![0.0; 8], 1.0).is_err());
        assert!(Kernel::new(1, vec![f64::NAN], 1.0).is_err());
        assert!(ScalarField::new(2, 1, vec![0.0, f64::INFINITY]).is_err());
        assert!(ScalarField::new(0, 1, vec![]).is_err());
        assert!(RgbImage::new(2, 2, vec![[0; 3]; 3]).is_err());
    }

    fn field_strategy(w: usize, h: usize) -> impl Strategy<Value = ScalarField> {
        prop::collection::vec(-100.0f64..100.0, w * h)
            .prop_map(move |v| ScalarField::new(w, h, v).unwrap())
    }

    fn kernel_strategy() -> impl Strategy<Value = Kernel> {
        (prop::collection::vec(-5.0f64..5.0, 9), 0.1f64..2.0)
            .prop_map(|(w, n)| Kernel::new(3, w, n).unwrap())
    }

    #[test]
    fn exact_sum_cancels_and_rounds_once() {
        let sum = |xs: &[f64]| xs.iter().copied().collect::<ExactSum>().value();
        assert_eq!(sum(&[]), 0.0);
        assert_eq!(sum(&[1e100, 1.0, -1e100]), 1.0);
        assert_eq!(sum(&[0.1, 0.2, 0.3, -0.6]), 2.7755575615628914e-17);
        let c = 124.19;
        assert_eq!(sum(&[c, 2.0 * c, c, -c, -2.0 * c, -c]), 0.0);
        // 1 + 2^-53 is a tie between 1 and its successor; the extra tiny term breaks it upward.
        assert_eq!(
            sum(&[1.0, 2f64.powi(-53), 2f64.powi(-80)]),
            1.0 + f64::EPSILON
        );
        assert_eq!(sum(&[1.0, 2f64.powi(-53)]), 1.0);
    }

    proptest! {
        #[test]
        fn convolution_is_linear(
            f in field_strategy(5, 4),
            g in field_strategy(5, 4),
            k in kernel_strategy(),
            a in -3.0f64..3.0,
            b in -3.0f64..3.0,
        ) {
            let combo = f.zip_map(&g, |u, v| a * u + b * v).unwrap();
            let lhs = convolve(&combo, &k);
            let (cf, cg) = (convolve(&f, &k), convolve(&g, &k));
            let rhs = cf.zip_map(&cg, |u, v| a * u + b * v).unwrap();
            let scale = lhs.values().iter().chain(rhs.values()).fold(1.0f64, |m, v| m.max(v.abs()));
            for (l, r) in lhs.values().iter().zip(rhs.values()) {
                prop_assert!((l - r).abs() <= 1e-9 * scale);
            }
        }

        #[test]
        fn convolution_commutes_with_transpose(f in field_strategy(6, 4), k in kernel_strategy()) {
            prop_assert_eq!(convolve(&f.transpose(), &k.transpose()), convolve(&f, &k).transpose());
        }

        #[test]
        fn grayscale_stays_in_range(px in prop::collection::vec(any::<[u8; 3]>(), 12)) {
            let img = RgbImage::new(4, 3, px).unwrap();
            for &v in to_grayscale(&img).values() {
                prop_assert!((0.0..=255.0).contains(&v));
            }
        }
    }
}
