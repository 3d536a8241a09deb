use std::fmt;
use std::path::Path;

use edgechroma::{
    builtin, detect_edges, learn_colormap, load_colormap, pseudo_color, save_colormap, ColorMap,
    KMeansConfig, PaletteFit,
};

use crate::args::{ColorizeArgs, Command, EdgesArgs, LearnMapArgs, PaletteArgs, StyleTransferArgs};
use crate::io::{read_rgb, write_gray_png, write_rgb_png};

#[derive(Debug)]
pub enum CliError {
    /// Reading, decoding or writing a file failed. Exit code 1.
    Io { path: String, message: String },
    /// A flag value was unusable. Exit code 2.
    Usage { flag: &'static str, message: String },
}

impl CliError {
    pub fn io(path: &Path, err: &dyn fmt::Display) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            message: single_line(&err.to_string()),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Usage { .. } => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io { path, message } => write!(f, "{path}: {message}"),
            CliError::Usage { flag, message } => write!(f, "invalid value for {flag}: {message}"),
        }
    }
}

fn single_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Edges(args) => edges(&args),
        Command::Colorize(args) => colorize(&args),
        Command::StyleTransfer(args) => style_transfer(&args),
        Command::LearnMap(args) => learn_map(&args),
    }
}

fn edges(args: &EdgesArgs) -> Result<(), CliError> {
    let image = read_rgb(&args.input)?;
    let (_, mask) = detect_edges(&image, args.threshold).map_err(threshold_error)?;
    write_gray_png(&args.output, &mask.to_luma8(), mask.width(), mask.height())
}

fn colorize(args: &ColorizeArgs) -> Result<(), CliError> {
    let map = resolve_map(&args.map)?;
    let image = read_rgb(&args.input)?;
    let (gradient, mask) = detect_edges(&image, args.threshold).map_err(threshold_error)?;
    let colored = pseudo_color(&mask, &gradient.direction, &map, args.norm.into())
        .map_err(|e| CliError::io(&args.input, &e))?;
    write_rgb_png(&args.output, colored)
}

fn style_transfer(args: &StyleTransferArgs) -> Result<(), CliError> {
    let content = read_rgb(&args.input)?;
    let map = learn(&args.style, &args.palette)?;
    let (gradient, mask) = detect_edges(&content, args.threshold).map_err(threshold_error)?;
    let colored = pseudo_color(&mask, &gradient.direction, &map, Default::default())
        .map_err(|e| CliError::io(&args.input, &e))?;
    write_rgb_png(&args.output, colored)
}

fn learn_map(args: &LearnMapArgs) -> Result<(), CliError> {
    let map = learn(&args.style, &args.palette)?;
    save_colormap(&map, &args.output).map_err(|e| CliError::io(&args.output, &e))
}

fn learn(style_path: &Path, args: &PaletteArgs) -> Result<ColorMap, CliError> {
    let style = read_rgb(style_path)?;
    let cfg = KMeansConfig {
        k: args.k,
        seed: args.seed,
        ..KMeansConfig::default()
    };
    let (map, fit) =
        learn_colormap(&style, &cfg, args.start_color()).map_err(|e| CliError::Usage {
            flag: "-k",
            message: e.to_string(),
        })?;
    report_adjustment(&fit);
    Ok(map)
}

fn report_adjustment(fit: &PaletteFit) {
    if let Some((requested, used)) = fit.k_adjustment() {
        eprintln!(
            "edgechroma: note: style image has only {used} distinct colors; using k = {used} instead of {requested}"
        );
    }
}

/// Built-in names win over files of the same name.
fn resolve_map(spec: &str) -> Result<ColorMap, CliError> {
    if let Ok(map) = builtin(spec) {
        return Ok(map);
    }
    let path = Path::new(spec);
    if path.is_file() {
        return load_colormap(path).map_err(|e| CliError::io(path, &e));
    }
    let unknown = builtin(spec).expect_err("checked above");
    Err(CliError::Usage {
        flag: "--map",
        message: format!("{unknown}, and no file `{spec}` exists"),
    })
}

fn threshold_error(e: edgechroma::Error) -> CliError {
    CliError::Usage {
        flag: "-t",
        message: e.to_string(),
    }
}
