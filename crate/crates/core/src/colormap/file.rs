//! GCMAP text format.
//!
//! ```text
//! GCMAP 1
//! mode linear
//! # position R G B [width]
//! stop 0 0 0 0
//! stop 1 255 255 255
//! ```
//!
//! `width` is required for `mode segment` and rejected for `mode linear`.
//! Lines starting with `#` and blank lines are ignored.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{ColorMap, ColorStop, Mode};
use crate::error::{Error, Result};

const MAGIC: &str = "GCMAP";
const VERSION: &str = "1";

pub fn load_colormap(path: impl AsRef<Path>) -> Result<ColorMap> {
    parse_colormap(&fs::read_to_string(path)?)
}

pub fn save_colormap(map: &ColorMap, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, write_colormap(map))?;
    Ok(())
}

/// Serializes a map. Floats use the shortest representation that parses
/// back to the same value, so loading the output reproduces `map` exactly.
pub fn write_colormap(map: &ColorMap) -> String {
    let mut out = format!("{MAGIC} {VERSION}\nmode {}\n", map.mode().as_str());
    for s in map.stops() {
        let [r, g, b] = s.color;
        match map.mode() {
            Mode::Linear => writeln!(out, "stop {} {r} {g} {b}", s.position),
            Mode::Segment => writeln!(out, "stop {} {r} {g} {b} {}", s.position, s.width),
        }
        .expect("writing to a String cannot fail");
    }
    out
}

pub fn parse_colormap(text: &str) -> Result<ColorMap> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (line, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields != [MAGIC, VERSION] {
        return Err(parse_err(
            line,
            format!("expected header `{MAGIC} {VERSION}`, found `{header}`"),
        ));
    }

    let (line, mode_line) = lines
        .next()
        .ok_or_else(|| parse_err(line + 1, "missing `mode` line"))?;
    let mode = match mode_line.split_whitespace().collect::<Vec<_>>()[..] {
        ["mode", "linear"] => Mode::Linear,
        ["mode", "segment"] => Mode::Segment,
        _ => {
            return Err(parse_err(
                line,
                format!("expected `mode linear` or `mode segment`, found `{mode_line}`"),
            ))
        }
    };

    let mut stops = Vec::new();
    for (line, text) in lines {
        stops.push(parse_stop(line, text, mode)?);
    }
    ColorMap::new(mode, stops)
}

fn parse_stop(line: usize, text: &str, mode: Mode) -> Result<ColorStop> {
    let fields: Vec<&str> = text.split_whitespace().collect();
    if fields[0] != "stop" {
        return Err(parse_err(
            line,
            format!("unexpected `{}`, expected `stop`", fields[0]),
        ));
    }
    let expected = match mode {
        Mode::Linear => 5,
        Mode::Segment => 6,
    };
    if fields.len() != expected {
        return Err(parse_err(
            line,
            format!(
                "`stop` in {} mode takes {} values, found {}",
                mode.as_str(),
                expected - 1,
                fields.len() - 1
            ),
        ));
    }
    let position = parse_unit(line, "position", fields[1])?;
    let mut color = [0u8; 3];
    for (c, field) in color.iter_mut().zip(&fields[2..5]) {
        *c = field.parse().map_err(|_| {
            parse_err(
                line,
                format!("channel `{field}` is not an integer in 0..=255"),
            )
        })?;
    }
    let width = match mode {
        Mode::Linear => 0.0,
        Mode::Segment => parse_unit(line, "width", fields[5])?,
    };
    Ok(ColorStop {
        position,
        color,
        width,
    })
}

fn parse_unit(line: usize, what: &str, field: &str) -> Result<f64> {
    match field.parse::<f64>() {
        Ok(v) if (0.0..=1.0).contains(&v) => Ok(v),
        _ => Err(parse_err(
            line,
            format!("{what} `{field}` is not a number in [0, 1]"),
        )),
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}
