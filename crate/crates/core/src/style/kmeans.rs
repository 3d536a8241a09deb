//! Lloyd's algorithm over pixel colors with k-means++ seeding.
//!
//! Pixels are collapsed to distinct colors with multiplicities before
//! clustering. Every step weights a color by its pixel count, so the result
//! is the same as clustering each pixel individually.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{Palette, PaletteFit};
use crate::error::{Error, Result};
use crate::raster::{Rgb, RgbImage};

/// Images with more pixels than this are subsampled before clustering.
pub const MAX_CLUSTER_PIXELS: usize = 512 * 512;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KMeansConfig {
    pub k: usize,
    pub seed: u64,
    pub max_iterations: usize,
    /// Stop once no centroid moves farther than this (RGB units).
    pub tolerance: f64,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        Self {
            k: 5,
            seed: 0,
            max_iterations: 100,
            tolerance: 1e-4,
        }
    }
}

impl KMeansConfig {
    pub fn with_k(k: usize) -> Self {
        Self {
            k,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::parameter("k", "cluster count must be at least 1"));
        }
        if self.max_iterations == 0 {
            return Err(Error::parameter("max_iterations", "must be at least 1"));
        }
        if self.tolerance.is_nan() || self.tolerance < 0.0 {
            return Err(Error::parameter("tolerance", "must be non-negative"));
        }
        Ok(())
    }
}

/// Distinct colors and how many clustered pixels carry each.
struct ColorCounts {
    colors: Vec<[f64; 3]>,
    counts: Vec<u64>,
    total: u64,
}

impl ColorCounts {
    fn from_pixels(mut pixels: Vec<Rgb>) -> Self {
        pixels.sort_unstable();
        let mut colors = Vec::new();
        let mut counts: Vec<u64> = Vec::new();
        let mut last: Option<Rgb> = None;
        for p in &pixels {
            if last == Some(*p) {
                *counts.last_mut().expect("run started") += 1;
            } else {
                colors.push(p.map(f64::from));
                counts.push(1);
                last = Some(*p);
            }
        }
        Self {
            colors,
            counts,
            total: pixels.len() as u64,
        }
    }

    fn len(&self) -> usize {
        self.colors.len()
    }
}

pub(crate) fn squared_distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    d[0] * d[0] + d[1] * d[1] + d[2] * d[2]
}

/// Index of the nearest centroid (lowest index on ties) and its squared distance.
fn nearest(point: &[f64; 3], centroids: &[[f64; 3]]) -> (usize, f64) {
    let mut best = (0, squared_distance(point, &centroids[0]));
    for (i, c) in centroids.iter().enumerate().skip(1) {
        let d = squared_distance(point, c);
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

/// Draws an index with probability proportional to `weights`.
fn weighted_pick(rng: &mut impl Rng, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut fallback = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        acc += w;
        fallback = i;
        if target < acc {
            return i;
        }
    }
    fallback
}

fn plus_plus_init(data: &ColorCounts, k: usize, rng: &mut impl Rng) -> Vec<[f64; 3]> {
    let counts: Vec<f64> = data.counts.iter().map(|&c| c as f64).collect();
    let mut centroids = vec![data.colors[weighted_pick(rng, &counts)]];
    let mut nearest_sq: Vec<f64> = data
        .colors
        .iter()
        .map(|p| squared_distance(p, &centroids[0]))
        .collect();
    while centroids.len() < k {
        let weights: Vec<f64> = nearest_sq.iter().zip(&counts).map(|(d, c)| d * c).collect();
        let next = data.colors[weighted_pick(rng, &weights)];
        for (d, p) in nearest_sq.iter_mut().zip(&data.colors) {
            *d = d.min(squared_distance(p, &next));
        }
        centroids.push(next);
    }
    centroids
}

struct Assignment {
    labels: Vec<usize>,
    distances: Vec<f64>,
    /// Sum over pixels of squared distance to the assigned centroid.
    objective: f64,
}

fn assign(data: &ColorCounts, centroids: &[[f64; 3]]) -> Assignment {
    let (labels, distances): (Vec<usize>, Vec<f64>) = data
        .colors
        .par_iter()
        .map(|p| nearest(p, centroids))
        .unzip();
    let objective = distances
        .iter()
        .zip(&data.counts)
        .map(|(d, &c)| d * c as f64)
        .sum();
    Assignment {
        labels,
        distances,
        objective,
    }
}

/// Per-cluster pixel counts and exact integer channel sums.
fn cluster_totals(data: &ColorCounts, labels: &[usize], k: usize) -> (Vec<u64>, Vec<[u64; 3]>) {
    let mut sizes = vec![0u64; k];
    let mut sums = vec![[0u64; 3]; k];
    for ((color, &count), &label) in data.colors.iter().zip(&data.counts).zip(labels) {
        sizes[label] += count;
        for c in 0..3 {
            sums[label][c] += color[c] as u64 * count;
        }
    }
    (sizes, sums)
}

fn update(data: &ColorCounts, assignment: &Assignment, k: usize) -> Vec<[f64; 3]> {
    let (sizes, sums) = cluster_totals(data, &assignment.labels, k);
    let mut spare = assignment.distances.clone();
    (0..k)
        .map(|j| {
            if sizes[j] > 0 {
                let n = sizes[j] as f64;
                return sums[j].map(|s| s as f64 / n);
            }
            // Empty cluster: move it onto the color farthest from its centroid.
            let far = spare
                .iter()
                .enumerate()
                .fold(0, |best, (i, &d)| if d > spare[best] { i } else { best });
            spare[far] = 0.0;
            data.colors[far]
        })
        .collect()
}

/// Clusters the style image's pixels into at most `cfg.k` dominant colors.
pub fn kmeans_palette(style: &RgbImage, cfg: &KMeansConfig) -> Result<PaletteFit> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let pixels = style.pixels();
    if pixels.is_empty() {
        return Err(Error::InvalidInput("style image has no pixels".into()));
    }
    let sample: Vec<Rgb> = if pixels.len() > MAX_CLUSTER_PIXELS {
        index::sample(&mut rng, pixels.len(), MAX_CLUSTER_PIXELS)
            .into_iter()
            .map(|i| pixels[i])
            .collect()
    } else {
        pixels.to_vec()
    };
    let data = ColorCounts::from_pixels(sample);
    let k = cfg.k.min(data.len());

    let mut centroids = plus_plus_init(&data, k, &mut rng);
    let mut objective = Vec::new();
    let mut iterations = 0;
    let mut assignment = assign(&data, &centroids);
    loop {
        objective.push(assignment.objective);
        let next = update(&data, &assignment, k);
        let shift = centroids
            .iter()
            .zip(&next)
            .map(|(a, b)| squared_distance(a, b).sqrt())
            .fold(0.0, f64::max);
        centroids = next;
        iterations += 1;
        assignment = assign(&data, &centroids);
        if shift < cfg.tolerance || iterations >= cfg.max_iterations {
            break;
        }
    }
    objective.push(assignment.objective);

    let (sizes, _) = cluster_totals(&data, &assignment.labels, k);
    let weights = sizes
        .iter()
        .map(|&n| n as f64 / data.total as f64)
        .collect();
    Ok(PaletteFit {
        palette: Palette::new(centroids, weights)?,
        requested_k: cfg.k,
        iterations,
        objective,
    })
}
