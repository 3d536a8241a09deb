//! Built-in color maps, one or more per family.
//!
//! | name       | family      | mode    | description                                  |
//! |------------|-------------|---------|----------------------------------------------|
//! | `gray`     | sequential  | linear  | black to white                               |
//! | `viridis`  | sequential  | linear  | purple through teal to yellow, rising luma   |
//! | `magma`    | sequential  | linear  | black through purple and orange to cream     |
//! | `coolwarm` | diverging   | linear  | blue to light gray to red                    |
//! | `hsv`      | cyclic      | linear  | full hue wheel, red at both ends             |
//! | `twilight` | cyclic      | linear  | light gray through blue and dark red and back |
//! | `set6`     | qualitative | segment | six equal segments of distinct hues          |

use super::{ColorMap, ColorStop, Mode};
use crate::error::{Error, Result};
use crate::raster::Rgb;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Sequential,
    Diverging,
    Cyclic,
    Qualitative,
}

/// Every built-in map name with its family.
pub const BUILTINS: &[(&str, Family)] = &[
    ("gray", Family::Sequential),
    ("viridis", Family::Sequential),
    ("magma", Family::Sequential),
    ("coolwarm", Family::Diverging),
    ("hsv", Family::Cyclic),
    ("twilight", Family::Cyclic),
    ("set6", Family::Qualitative),
];

const GRAY: &[Rgb] = &[[0, 0, 0], [255, 255, 255]];

const VIRIDIS: &[Rgb] = &[
    [68, 1, 84],
    [59, 82, 139],
    [33, 145, 140],
    [94, 201, 98],
    [253, 231, 37],
];

const MAGMA: &[Rgb] = &[
    [0, 0, 4],
    [81, 18, 124],
    [183, 55, 121],
    [252, 137, 97],
    [252, 253, 191],
];

const COOLWARM: &[Rgb] = &[[59, 76, 192], [221, 221, 221], [180, 4, 38]];

const HSV: &[Rgb] = &[
    [255, 0, 0],
    [255, 255, 0],
    [0, 255, 0],
    [0, 255, 255],
    [0, 0, 255],
    [255, 0, 255],
    [255, 0, 0],
];

const TWILIGHT: &[Rgb] = &[
    [226, 217, 226],
    [94, 128, 185],
    [48, 20, 55],
    [168, 67, 64],
    [226, 217, 226],
];

const SET6: &[Rgb] = &[
    [228, 26, 28],
    [55, 126, 184],
    [77, 175, 74],
    [152, 78, 163],
    [255, 127, 0],
    [255, 255, 51],
];

/// Looks up a built-in map by name.
pub fn builtin(name: &str) -> Result<ColorMap> {
    let map = match name {
        "gray" => evenly_spaced(GRAY),
        "viridis" => evenly_spaced(VIRIDIS),
        "magma" => evenly_spaced(MAGMA),
        "coolwarm" => evenly_spaced(COOLWARM),
        "hsv" => evenly_spaced(HSV),
        "twilight" => evenly_spaced(TWILIGHT),
        "set6" => {
            let n = SET6.len();
            let stops = SET6
                .iter()
                .enumerate()
                .map(|(i, &c)| ColorStop::segment(i as f64 / n as f64, c, 1.0 / n as f64))
                .collect();
            ColorMap::new(Mode::Segment, stops)
        }
        _ => {
            return Err(Error::UnknownColorMap {
                name: name.to_string(),
                valid: BUILTINS
                    .iter()
                    .map(|(n, _)| *n)
                    .collect::<Vec<_>>()
                    .join(", "),
            })
        }
    };
    Ok(map.expect("built-in tables are valid"))
}

fn evenly_spaced(colors: &[Rgb]) -> Result<ColorMap> {
    let last = (colors.len() - 1) as f64;
    let stops = colors
        .iter()
        .enumerate()
        .map(|(i, &c)| ColorStop::linear(i as f64 / last, c))
        .collect();
    ColorMap::new(Mode::Linear, stops)
}
