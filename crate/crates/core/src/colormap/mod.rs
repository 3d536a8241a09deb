//! Color maps from `[0, 1]` to 8-bit RGB and directional pseudo-coloring.

mod builtin;
mod file;

pub use builtin::{builtin, Family, BUILTINS};
pub use file::{load_colormap, parse_colormap, save_colormap, write_colormap};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gradient::EdgeMask;
use crate::raster::{Rgb, RgbImage, ScalarField};

/// Slack allowed when checking that segment widths cover `[0, 1]`.
pub const WIDTH_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Channel-wise interpolation between neighbouring stops.
    Linear,
    /// Piecewise constant; each stop owns an interval of its width.
    Segment,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Linear => "linear",
            Mode::Segment => "segment",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ColorStop {
    pub position: f64,
    pub color: Rgb,
    /// Only meaningful for segment maps; zero for linear maps.
    pub width: f64,
}

impl ColorStop {
    pub fn linear(position: f64, color: Rgb) -> Self {
        Self {
            position,
            color,
            width: 0.0,
        }
    }

    pub fn segment(position: f64, color: Rgb, width: f64) -> Self {
        Self {
            position,
            color,
            width,
        }
    }
}

/// Validated, immutable color map.
#[derive(Clone, Debug, PartialEq)]
pub struct ColorMap {
    mode: Mode,
    stops: Vec<ColorStop>,
}

impl ColorMap {
    pub fn new(mode: Mode, stops: Vec<ColorStop>) -> Result<Self> {
        validate(mode, &stops)?;
        Ok(Self { mode, stops })
    }

    /// Segment map whose segments are laid out back to back in order.
    pub fn from_segments(segments: impl IntoIterator<Item = (Rgb, f64)>) -> Result<Self> {
        let mut position = 0.0f64;
        let stops = segments
            .into_iter()
            .map(|(color, width)| {
                let stop = ColorStop::segment(position.min(1.0), color, width);
                position += width;
                stop
            })
            .collect();
        Self::new(Mode::Segment, stops)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn stops(&self) -> &[ColorStop] {
        &self.stops
    }

    /// Color at `u`; values outside `[0, 1]` (and NaN) are clamped.
    pub fn sample(&self, u: f64) -> Rgb {
        let u = if u.is_nan() { 0.0 } else { u.clamp(0.0, 1.0) };
        match self.mode {
            Mode::Linear => self.sample_linear(u),
            Mode::Segment => self.sample_segment(u),
        }
    }

    fn sample_linear(&self, u: f64) -> Rgb {
        let stops = &self.stops;
        let first = &stops[0];
        let last = &stops[stops.len() - 1];
        if u <= first.position {
            return first.color;
        }
        if u >= last.position {
            return last.color;
        }
        // First stop strictly past u; u > first.position so this is >= 1.
        let hi = stops.partition_point(|s| s.position <= u);
        let (a, b) = (&stops[hi - 1], &stops[hi]);
        let frac = (u - a.position) / (b.position - a.position);
        std::array::from_fn(|c| {
            let lo = f64::from(a.color[c]);
            round_half_up(lo + (f64::from(b.color[c]) - lo) * frac)
        })
    }

    fn sample_segment(&self, u: f64) -> Rgb {
        let mut end = 0.0;
        for stop in &self.stops {
            end += stop.width;
            if u < end {
                return stop.color;
            }
        }
        // u = 1 (or rounding left the cumulative sum just short of it).
        self.stops
            .iter()
            .rev()
            .find(|s| s.width > 0.0)
            .map_or(self.stops[self.stops.len() - 1].color, |s| s.color)
    }
}

/// Rounds to the nearest integer with ties going up, clamped to `[0, 255]`.
pub fn round_half_up(v: f64) -> u8 {
    (v + 0.5).floor().clamp(0.0, 255.0) as u8
}

fn validate(mode: Mode, stops: &[ColorStop]) -> Result<()> {
    let invalid = |msg: String| Err(Error::InvalidColorMap(msg));
    if stops.is_empty() {
        return invalid("a color map needs at least one stop".into());
    }
    for (i, s) in stops.iter().enumerate() {
        if !(0.0..=1.0).contains(&s.position) {
            return invalid(format!("stop {i}: position {} outside [0, 1]", s.position));
        }
        if !(0.0..=1.0).contains(&s.width) {
            return invalid(format!("stop {i}: width {} outside [0, 1]", s.width));
        }
    }
    match mode {
        Mode::Linear => {
            if let Some(i) = stops
                .windows(2)
                .position(|w| w[0].position >= w[1].position)
            {
                return invalid(format!(
                    "stop positions must be strictly ascending (stop {} at {} follows {})",
                    i + 1,
                    stops[i + 1].position,
                    stops[i].position
                ));
            }
            if stops.len() >= 2
                && (stops[0].position != 0.0 || stops[stops.len() - 1].position != 1.0)
            {
                return invalid(
                    "linear maps must start at position 0 and end at position 1".into(),
                );
            }
        }
        Mode::Segment => {
            if let Some(i) = stops.windows(2).position(|w| w[0].position > w[1].position) {
                return invalid(format!(
                    "segment positions must be ascending (stop {})",
                    i + 1
                ));
            }
            let total: f64 = stops.iter().map(|s| s.width).sum();
            if (total - 1.0).abs() > WIDTH_SUM_TOLERANCE {
                return invalid(format!("segment widths sum to {total}, expected 1"));
            }
        }
    }
    Ok(())
}

/// Range used to normalize gradient directions before sampling the map.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NormDomain {
    /// Min and max over edge pixels only.
    #[default]
    EdgePixels,
    /// Min and max over the whole direction plane.
    AllPixels,
}

/// Colors each edge pixel by its normalized direction; everything else is black.
///
/// When the direction range is degenerate every edge pixel samples the map at 0.
pub fn pseudo_color(
    mask: &EdgeMask,
    theta: &ScalarField,
    map: &ColorMap,
    domain: NormDomain,
) -> Result<RgbImage> {
    if mask.dimensions() != theta.dimensions() {
        return Err(Error::mismatch(mask.dimensions(), theta.dimensions()));
    }
    let (width, height) = theta.dimensions();
    let bits = mask.bits();
    let values = theta.values();

    let range = values
        .iter()
        .zip(bits)
        .filter(|&(_, &edge)| domain == NormDomain::AllPixels || edge)
        .fold(None, |acc: Option<(f64, f64)>, (&v, _)| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
        });
    let Some((lo, hi)) = range else {
        return RgbImage::filled(width, height, [0, 0, 0]);
    };
    let span = hi - lo;

    let data = values
        .par_iter()
        .zip(bits.par_iter())
        .map(|(&v, &edge)| {
            if !edge {
                [0, 0, 0]
            } else if span > 0.0 {
                map.sample((v - lo) / span)
            } else {
                map.sample(0.0)
            }
        })
        .collect();
    RgbImage::new(width, height, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn black_white() -> ColorMap {
        ColorMap::new(
            Mode::Linear,
            vec![
                ColorStop::linear(0.0, [0; 3]),
                ColorStop::linear(1.0, [255; 3]),
            ],
        )
        .unwrap()
    }

    const A: Rgb = [10, 20, 30];
    const B: Rgb = [200, 100, 0];

    #[test]
    fn linear_sampling() {
        let m = black_white();
        assert_eq!(m.sample(0.0), [0, 0, 0]);
        assert_eq!(m.sample(0.5), [128, 128, 128]);
        assert_eq!(m.sample(1.0), [255, 255, 255]);
        assert_eq!(m.sample(-3.0), [0, 0, 0]);
        assert_eq!(m.sample(7.0), [255, 255, 255]);
        assert_eq!(m.sample(f64::NAN), [0, 0, 0]);
    }

    #[test]
    fn three_stop_interpolation_uses_the_bracketing_pair() {
        let m = ColorMap::new(
            Mode::Linear,
            vec![
                ColorStop::linear(0.0, [0, 0, 0]),
                ColorStop::linear(0.25, [100, 0, 0]),
                ColorStop::linear(1.0, [100, 150, 0]),
            ],
        )
        .unwrap();
        assert_eq!(m.sample(0.25), [100, 0, 0]);
        assert_eq!(m.sample(0.125), [50, 0, 0]);
        assert_eq!(m.sample(0.625), [100, 75, 0]);
    }

    #[test]
    fn segment_sampling() {
        let m = ColorMap::from_segments([(A, 0.75), (B, 0.25)]).unwrap();
        assert_eq!(m.sample(0.7), A);
        assert_eq!(m.sample(0.75), B);
        assert_eq!(m.sample(0.8), B);
        assert_eq!(m.sample(1.0), B);
        assert_eq!(m.sample(0.0), A);
    }

    #[test]
    fn single_stop_maps_are_constant() {
        let lin = ColorMap::new(Mode::Linear, vec![ColorStop::linear(0.3, A)]).unwrap();
        let seg = ColorMap::from_segments([(B, 1.0)]).unwrap();
        for u in [0.0, 0.3, 0.99, 1.0] {
            assert_eq!(lin.sample(u), A);
            assert_eq!(seg.sample(u), B);
        }
    }

    #[test]
    fn invalid_maps_are_rejected() {
        assert!(ColorMap::new(Mode::Linear, vec![]).is_err());
        let unsorted = vec![
            ColorStop::linear(0.0, A),
            ColorStop::linear(0.6, B),
            ColorStop::linear(0.4, A),
            ColorStop::linear(1.0, B),
        ];
        assert!(ColorMap::new(Mode::Linear, unsorted).is_err());
        let open_ended = vec![ColorStop::linear(0.0, A), ColorStop::linear(0.9, B)];
        assert!(ColorMap::new(Mode::Linear, open_ended).is_err());
        assert!(ColorMap::from_segments([(A, 0.5), (B, 0.4)]).is_err());
        assert!(ColorMap::new(Mode::Linear, vec![ColorStop::linear(1.5, A)]).is_err());
    }

    fn mask_of(bits: &[bool]) -> EdgeMask {
        EdgeMask::new(bits.len(), 1, bits.to_vec()).unwrap()
    }

    fn row(values: &[f64]) -> ScalarField {
        ScalarField::new(values.len(), 1, values.to_vec()).unwrap()
    }

    #[test]
    fn empty_mask_renders_black() {
        let out = pseudo_color(
            &mask_of(&[false; 4]),
            &row(&[0.1, 0.2, 0.3, 0.4]),
            &black_white(),
            NormDomain::EdgePixels,
        )
        .unwrap();
        assert!(out.pixels().iter().all(|&p| p == [0, 0, 0]));
    }

    #[test]
    fn lone_edge_pixel_samples_the_start_of_the_map() {
        let map = ColorMap::new(
            Mode::Linear,
            vec![ColorStop::linear(0.0, A), ColorStop::linear(1.0, B)],
        )
        .unwrap();
        let out = pseudo_color(
            &mask_of(&[false, true, false]),
            &row(&[-1.0, 2.0, 3.0]),
            &map,
            NormDomain::EdgePixels,
        )
        .unwrap();
        assert_eq!(out.pixels(), &[[0, 0, 0], A, [0, 0, 0]]);
    }

    #[test]
    fn edge_range_normalization() {
        let out = pseudo_color(
            &mask_of(&[true, false, true]),
            &row(&[-FRAC_PI_2, 3.0, FRAC_PI_2]),
            &black_white(),
            NormDomain::EdgePixels,
        )
        .unwrap();
        assert_eq!(out.pixels(), &[[0, 0, 0], [0, 0, 0], [255, 255, 255]]);
    }

    #[test]
    fn all_pixel_normalization_uses_the_whole_plane() {
        let out = pseudo_color(
            &mask_of(&[true, false, true]),
            &row(&[0.0, 2.0, 1.0]),
            &black_white(),
            NormDomain::AllPixels,
        )
        .unwrap();
        assert_eq!(out.pixels(), &[[0, 0, 0], [0, 0, 0], [128, 128, 128]]);
    }

    #[test]
    fn mismatched_mask_is_rejected() {
        let err = pseudo_color(
            &mask_of(&[true; 3]),
            &row(&[0.0; 4]),
            &black_white(),
            NormDomain::EdgePixels,
        );
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    proptest! {
        #[test]
        fn linear_sampling_is_continuous(u in 0.0f64..=1.0, name in prop::sample::select(vec!["gray", "viridis", "coolwarm", "hsv"])) {
            let map = builtin(name).unwrap();
            let v = (u + 1e-6).min(1.0);
            let (a, b) = (map.sample(u), map.sample(v));
            for c in 0..3 {
                prop_assert!(a[c].abs_diff(b[c]) <= 1, "{name} at {u}: {a:?} vs {b:?}");
            }
        }
    }
}
