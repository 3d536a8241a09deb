//! Edge detection with directional pseudo-coloring.
//!
//! Images are converted to grayscale, blurred, and differentiated with Sobel
//! kernels. Pixels whose gradient magnitude clears a relative threshold are
//! colored by their gradient direction through a color map, so edges that
//! run the same way share a color. The [`style`] module learns such a map
//! from the dominant colors of another image.
//!
//! ```
//! use edgechroma::{builtin, detect_edges, pseudo_color, NormDomain, RgbImage};
//!
//! let image = RgbImage::from_fn(32, 32, |x, y| if x + y < 32 { [0; 3] } else { [255; 3] })?;
//! let (gradient, mask) = detect_edges(&image, 0.2)?;
//! let colored = pseudo_color(&mask, &gradient.direction, &builtin("viridis")?, NormDomain::EdgePixels)?;
//! assert_eq!(colored.dimensions(), (32, 32));
//! # Ok::<(), edgechroma::Error>(())
//! ```

pub mod colormap;
pub mod error;
pub mod gradient;
pub mod raster;
pub mod style;

pub use colormap::{
    builtin, load_colormap, pseudo_color, save_colormap, ColorMap, ColorStop, Mode, NormDomain,
};
pub use error::{Error, Result};
pub use gradient::{
    detect_edges, direction, gaussian_blur, magnitude, sobel_derivatives, threshold, EdgeMask,
    GradientField, DEFAULT_THRESHOLD,
};
pub use raster::{convolve, to_grayscale, ExactSum, Kernel, Rgb, RgbImage, ScalarField};
pub use style::{
    kmeans_palette, learn_colormap, order_palette, palette_to_colormap, style_transfer,
    KMeansConfig, Palette, PaletteFit, StartColor,
};
