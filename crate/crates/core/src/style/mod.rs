//! Palette-based edge style transfer.
//!
//! A style image's dominant colors are found with k-means, chained into a
//! gradual sequence by nearest-neighbour ordering, and laid out as a segment
//! color map whose segment widths follow each cluster's share of the pixels.
//! That map then colors the content image's edges.

mod kmeans;

pub use kmeans::{kmeans_palette, KMeansConfig, MAX_CLUSTER_PIXELS};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::colormap::{pseudo_color, round_half_up, ColorMap, NormDomain};
use crate::error::{Error, Result};
use crate::gradient::detect_edges;
use crate::raster::{luma, RgbImage};
use kmeans::squared_distance;

/// Dominant colors with the fraction of pixels each one represents.
#[derive(Clone, Debug, PartialEq)]
pub struct Palette {
    colors: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

impl Palette {
    pub fn new(colors: Vec<[f64; 3]>, weights: Vec<f64>) -> Result<Self> {
        if colors.is_empty() || colors.len() != weights.len() {
            return Err(Error::InvalidInput(format!(
                "palette needs matching non-empty colors and weights, got {} and {}",
                colors.len(),
                weights.len()
            )));
        }
        if colors.iter().flatten().any(|c| !(0.0..=255.0).contains(c)) {
            return Err(Error::InvalidInput(
                "palette channels must lie in [0, 255]".into(),
            ));
        }
        if weights.iter().any(|w| !(0.0..=1.0).contains(w)) {
            return Err(Error::InvalidInput(
                "palette weights must lie in [0, 1]".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "palette weights sum to {total}, expected 1"
            )));
        }
        Ok(Self { colors, weights })
    }

    pub fn colors(&self) -> &[[f64; 3]] {
        &self.colors
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    fn permuted(&self, order: &[usize]) -> Self {
        Self {
            colors: order.iter().map(|&i| self.colors[i]).collect(),
            weights: order.iter().map(|&i| self.weights[i]).collect(),
        }
    }
}

/// Result of [`kmeans_palette`] with the diagnostics of the run.
#[derive(Clone, Debug)]
pub struct PaletteFit {
    pub palette: Palette,
    /// `k` as configured; the palette is smaller when the image has fewer distinct colors.
    pub requested_k: usize,
    /// Lloyd iterations performed.
    pub iterations: usize,
    /// Clustering objective after every assignment step, including the final one.
    pub objective: Vec<f64>,
}

impl PaletteFit {
    /// `(requested, used)` when `k` had to be reduced.
    pub fn k_adjustment(&self) -> Option<(usize, usize)> {
        (self.palette.len() != self.requested_k).then_some((self.requested_k, self.palette.len()))
    }
}

/// How the first color of an ordered palette is chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum StartColor {
    /// Lowest luma, lowest index on ties.
    #[default]
    Darkest,
    /// Uniformly random, seeded.
    Random(u64),
}

/// Greedy nearest-neighbour chain through the palette's colors.
pub fn order_palette(palette: &Palette, start: StartColor) -> Palette {
    let n = palette.len();
    let colors = palette.colors();
    let first = match start {
        StartColor::Darkest => (0..n).fold(0, |best, i| {
            if luma(colors[i]) < luma(colors[best]) {
                i
            } else {
                best
            }
        }),
        StartColor::Random(seed) => ChaCha8Rng::seed_from_u64(seed).random_range(0..n),
    };

    let mut used = vec![false; n];
    let mut order = Vec::with_capacity(n);
    used[first] = true;
    order.push(first);
    while order.len() < n {
        let last = colors[order[order.len() - 1]];
        let mut best: Option<(usize, f64)> = None;
        for i in (0..n).filter(|&i| !used[i]) {
            let d = squared_distance(&last, &colors[i]);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        let (next, _) = best.expect("an unused color remains");
        used[next] = true;
        order.push(next);
    }
    palette.permuted(&order)
}

/// Segment map with one segment per palette color, as wide as its weight.
pub fn palette_to_colormap(palette: &Palette) -> Result<ColorMap> {
    ColorMap::from_segments(
        palette
            .colors()
            .iter()
            .zip(palette.weights())
            .map(|(c, &w)| (c.map(round_half_up), w)),
    )
}

/// Clusters, orders and lays out a style image's colors as a color map.
pub fn learn_colormap(
    style: &RgbImage,
    cfg: &KMeansConfig,
    start: StartColor,
) -> Result<(ColorMap, PaletteFit)> {
    let fit = kmeans_palette(style, cfg)?;
    let map = palette_to_colormap(&order_palette(&fit.palette, start))?;
    Ok((map, fit))
}

/// Colors the content image's edges with a map learned from the style image.
pub fn style_transfer(
    content: &RgbImage,
    style: &RgbImage,
    t: f64,
    cfg: &KMeansConfig,
    start: StartColor,
) -> Result<RgbImage> {
    let (gradient, mask) = detect_edges(content, t)?;
    let (map, _) = learn_colormap(style, cfg, start)?;
    pseudo_color(&mask, &gradient.direction, &map, NormDomain::EdgePixels)
}
