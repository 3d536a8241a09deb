//! Sobel edge detection: blur, derivatives, gradient magnitude and
//! direction, and relative magnitude thresholding.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::raster::{convolve, to_grayscale, transpose_vec, Kernel, RgbImage, ScalarField};

/// Relative threshold used when the caller does not pick one.
pub const DEFAULT_THRESHOLD: f64 = 0.2;

/// The fixed 3x3 blur, `1/16 * [1 2 1; 2 4 2; 1 2 1]`.
pub fn blur_kernel() -> Kernel {
    Kernel::new(3, vec![1., 2., 1., 2., 4., 2., 1., 2., 1.], 1.0 / 16.0).expect("valid kernel")
}

/// Horizontal Sobel kernel `[1 0 -1; 2 0 -2; 1 0 -1]`.
pub fn sobel_x() -> Kernel {
    Kernel::new(3, vec![1., 0., -1., 2., 0., -2., 1., 0., -1.], 1.0).expect("valid kernel")
}

/// Vertical Sobel kernel `[1 2 1; 0 0 0; -1 -2 -1]`, the transpose of [`sobel_x`].
pub fn sobel_y() -> Kernel {
    Kernel::new(3, vec![1., 2., 1., 0., 0., 0., -1., -2., -1.], 1.0).expect("valid kernel")
}

/// Derivatives, magnitude and direction of one image's gradient.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientField {
    pub dx: ScalarField,
    pub dy: ScalarField,
    pub magnitude: ScalarField,
    /// Radians in `(-pi, pi]`.
    pub direction: ScalarField,
}

impl GradientField {
    pub fn from_derivatives(dx: ScalarField, dy: ScalarField) -> Result<Self> {
        let magnitude = magnitude(&dx, &dy)?;
        let direction = direction(&dx, &dy)?;
        Ok(Self {
            dx,
            dy,
            magnitude,
            direction,
        })
    }

    pub fn dimensions(&self) -> (usize, usize) {
        self.magnitude.dimensions()
    }
}

/// Binary edge image: `true` marks an edge pixel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl EdgeMask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 || bits.len() != width * height {
            return Err(Error::InvalidInput(format!(
                "{width}x{height} mask cannot hold {} bits",
                bits.len()
            )));
        }
        Ok(Self {
            width,
            height,
            bits,
        })
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

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// True when every edge in `self` is also an edge in `other`.
    pub fn is_subset_of(&self, other: &EdgeMask) -> bool {
        self.dimensions() == other.dimensions()
            && self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    pub fn transpose(&self) -> Self {
        Self {
            width: self.height,
            height: self.width,
            bits: transpose_vec(&self.bits, self.width, self.height),
        }
    }

    /// 0/255 grayscale rendering.
    pub fn to_luma8(&self) -> Vec<u8> {
        self.bits.iter().map(|&b| if b { 255 } else { 0 }).collect()
    }
}

pub fn gaussian_blur(gray: &ScalarField) -> ScalarField {
    convolve(gray, &blur_kernel())
}

/// Returns `(dx, dy)`.
pub fn sobel_derivatives(blurred: &ScalarField) -> (ScalarField, ScalarField) {
    (convolve(blurred, &sobel_x()), convolve(blurred, &sobel_y()))
}

pub fn magnitude(dx: &ScalarField, dy: &ScalarField) -> Result<ScalarField> {
    dx.zip_map(dy, |a, b| (a * a + b * b).sqrt())
}

/// Quadrant-aware `atan2(dx, dy)`; zero where both derivatives vanish.
pub fn direction(dx: &ScalarField, dy: &ScalarField) -> Result<ScalarField> {
    dx.zip_map(dy, |a, b| {
        if a == 0.0 && b == 0.0 {
            return 0.0;
        }
        let theta = a.atan2(b);
        // atan2(-0.0, negative) is -pi, which lies outside the half-open range.
        if theta <= -PI {
            PI
        } else {
            theta
        }
    })
}

/// Marks pixels whose magnitude, relative to the global maximum, is at least `t`.
pub fn threshold(magnitude: &ScalarField, t: f64) -> Result<EdgeMask> {
    check_threshold(t)?;
    let (width, height) = magnitude.dimensions();
    let max = magnitude.max();
    let bits = if max > 0.0 {
        magnitude
            .values()
            .par_iter()
            .map(|&g| g / max >= t)
            .collect()
    } else {
        vec![false; width * height]
    };
    Ok(EdgeMask {
        width,
        height,
        bits,
    })
}

pub(crate) fn check_threshold(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::parameter(
            "t",
            format!("threshold must lie in [0, 1], got {t}"),
        ));
    }
    Ok(())
}

/// Grayscale, blur, Sobel, magnitude/direction and threshold in one pass.
pub fn detect_edges(image: &RgbImage, t: f64) -> Result<(GradientField, EdgeMask)> {
    check_threshold(t)?;
    let blurred = gaussian_blur(&to_grayscale(image));
    let (dx, dy) = sobel_derivatives(&blurred);
    let gradient = GradientField::from_derivatives(dx, dy)?;
    let mask = threshold(&gradient.magnitude, t)?;
    Ok((gradient, mask))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn single(v: f64) -> ScalarField {
        ScalarField::filled(1, 1, v).unwrap()
    }

    #[test]
    fn sobel_y_is_transposed_sobel_x() {
        assert_eq!(sobel_x().transpose(), sobel_y());
    }

    #[test]
    fn blur_keeps_constants_and_interior_ramps() {
        let c = ScalarField::filled(7, 5, -3.25).unwrap();
        assert_eq!(gaussian_blur(&c), c);

        let ramp = ScalarField::from_fn(8, 6, |x, _| x as f64).unwrap();
        let out = gaussian_blur(&ramp);
        for y in 0..6 {
            for x in 1..7 {
                assert_eq!(out.get(x, y), x as f64);
            }
        }
    }

    #[test]
    fn sobel_of_constant_is_zero() {
        let (dx, dy) = sobel_derivatives(&ScalarField::filled(5, 5, 9.0).unwrap());
        assert!(dx.values().iter().chain(dy.values()).all(|&v| v == 0.0));
    }

    #[test]
    fn sobel_on_vertical_step() {
        let step = ScalarField::from_fn(8, 6, |x, _| if x < 4 { 0.0 } else { 1.0 }).unwrap();
        let (dx, dy) = sobel_derivatives(&step);
        for y in 0..6 {
            for x in 0..8 {
                let expected = if x == 3 || x == 4 { -4.0 } else { 0.0 };
                assert_eq!(dx.get(x, y), expected, "dx at ({x}, {y})");
                assert_eq!(dy.get(x, y), 0.0);
            }
        }
    }

    #[test]
    fn magnitude_examples() {
        assert_eq!(
            magnitude(&single(3.0), &single(4.0)).unwrap().get(0, 0),
            5.0
        );
        assert_eq!(
            magnitude(&single(0.0), &single(0.0)).unwrap().get(0, 0),
            0.0
        );
        let diag = magnitude(&single(1.0), &single(1.0)).unwrap().get(0, 0);
        assert!((diag - std::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn direction_examples() {
        assert_eq!(
            direction(&single(0.0), &single(1.0)).unwrap().get(0, 0),
            0.0
        );
        assert_eq!(
            direction(&single(1.0), &single(0.0)).unwrap().get(0, 0),
            PI / 2.0
        );
        assert_eq!(
            direction(&single(1.0), &single(1.0)).unwrap().get(0, 0),
            FRAC_PI_4
        );
        assert_eq!(
            direction(&single(0.0), &single(0.0)).unwrap().get(0, 0),
            0.0
        );
        assert_eq!(
            direction(&single(-0.0), &single(-1.0)).unwrap().get(0, 0),
            PI
        );
    }

    #[test]
    fn mismatched_planes_are_rejected() {
        let a = ScalarField::filled(2, 2, 1.0).unwrap();
        let b = ScalarField::filled(2, 3, 1.0).unwrap();
        assert!(matches!(
            magnitude(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            direction(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn threshold_examples() {
        let g = ScalarField::new(4, 1, vec![0.1, 0.5, 0.3, 1.0]).unwrap();
        assert_eq!(
            threshold(&g, 0.3).unwrap().bits(),
            &[false, true, true, true]
        );
        assert_eq!(threshold(&g, 0.0).unwrap().count(), 4);

        let flat = ScalarField::filled(3, 3, 0.0).unwrap();
        for t in [0.0, 0.5, 1.0] {
            assert_eq!(threshold(&flat, t).unwrap().count(), 0);
        }
        assert!(matches!(
            threshold(&g, 1.5),
            Err(Error::InvalidParameter { name: "t", .. })
        ));
        assert!(threshold(&g, -0.1).is_err());
        assert!(threshold(&g, f64::NAN).is_err());
    }

    #[test]
    fn uniform_image_has_no_edges() {
        let img = RgbImage::filled(9, 7, [10, 200, 30]).unwrap();
        let (grad, mask) = detect_edges(&img, 0.0).unwrap();
        assert_eq!(mask.count(), 0);
        assert!(grad.magnitude.values().iter().all(|&g| g == 0.0));
    }

    #[test]
    fn half_black_half_white_marks_the_boundary_band() {
        let img = RgbImage::from_fn(8, 8, |x, _| if x < 4 { [0; 3] } else { [255; 3] }).unwrap();
        let (grad, mask) = detect_edges(&img, 0.5).unwrap();
        for y in 0..8 {
            for x in 0..8 {
                // Blurred row is 0, 0, 0, 63.75, 191.25, 255, ...; |dx| is 765 at
                // columns 3 and 4 and 255 (a third of the peak) at columns 2 and 5.
                assert_eq!(mask.get(x, y), x == 3 || x == 4, "({x}, {y})");
            }
        }
        let theta: Vec<f64> = (0..64)
            .filter(|&i| mask.bits()[i])
            .map(|i| grad.direction.values()[i])
            .collect();
        assert!(theta.iter().all(|&v| v == -PI / 2.0));
    }

    #[test]
    fn threshold_is_monotone() {
        let img = RgbImage::from_fn(12, 12, |x, y| {
            let v = ((x * 37 + y * 91) % 256) as u8;
            [v, v / 2, 255 - v]
        })
        .unwrap();
        let (grad, _) = detect_edges(&img, 0.0).unwrap();
        let masks: Vec<_> = (0..=10)
            .map(|i| threshold(&grad.magnitude, f64::from(i) / 10.0).unwrap())
            .collect();
        for pair in masks.windows(2) {
            assert!(pair[1].is_subset_of(&pair[0]));
        }
    }
}
