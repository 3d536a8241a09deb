use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use edgechroma::{NormDomain, StartColor, DEFAULT_THRESHOLD};

#[derive(Debug, Parser)]
#[command(
    name = "edgechroma",
    version,
    about = "Directional pseudo-coloring of image edges"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the thresholded edge mask as a black-and-white PNG.
    Edges(EdgesArgs),
    /// Color edges by gradient direction through a color map.
    Colorize(ColorizeArgs),
    /// Color a content image's edges with colors learned from a style image.
    StyleTransfer(StyleTransferArgs),
    /// Learn a color map from a style image and save it as a GCMAP file.
    LearnMap(LearnMapArgs),
}

#[derive(Debug, Args)]
pub struct EdgesArgs {
    #[arg(short = 'i', long = "input", value_name = "IN")]
    pub input: PathBuf,
    #[arg(short = 'o', long = "output", value_name = "OUT")]
    pub output: PathBuf,
    #[arg(short = 't', long = "threshold", value_name = "THR", default_value_t = DEFAULT_THRESHOLD, value_parser = parse_threshold)]
    pub threshold: f64,
}

#[derive(Debug, Args)]
pub struct ColorizeArgs {
    #[arg(short = 'i', long = "input", value_name = "IN")]
    pub input: PathBuf,
    #[arg(short = 'o', long = "output", value_name = "OUT")]
    pub output: PathBuf,
    #[arg(short = 't', long = "threshold", value_name = "THR", default_value_t = DEFAULT_THRESHOLD, value_parser = parse_threshold)]
    pub threshold: f64,
    /// Built-in color map name or path to a GCMAP file.
    #[arg(long = "map", value_name = "NAME|FILE", default_value = "viridis")]
    pub map: String,
    /// Pixels whose directions set the normalization range.
    #[arg(long = "norm", value_enum, default_value_t = Norm::Edge)]
    pub norm: Norm,
}

#[derive(Debug, Args)]
pub struct PaletteArgs {
    /// Number of dominant colors to learn.
    #[arg(short = 'k', value_name = "N", default_value_t = 5, value_parser = parse_k)]
    pub k: usize,
    #[arg(long = "seed", value_name = "N", default_value_t = 0)]
    pub seed: u64,
    /// How the first color of the learned map is chosen.
    #[arg(long = "start", value_enum, default_value_t = Start::Darkest)]
    pub start: Start,
}

#[derive(Debug, Args)]
pub struct StyleTransferArgs {
    #[arg(short = 'i', long = "input", value_name = "CONTENT")]
    pub input: PathBuf,
    #[arg(short = 's', long = "style", value_name = "STYLE")]
    pub style: PathBuf,
    #[arg(short = 'o', long = "output", value_name = "OUT")]
    pub output: PathBuf,
    #[arg(short = 't', long = "threshold", value_name = "THR", default_value_t = DEFAULT_THRESHOLD, value_parser = parse_threshold)]
    pub threshold: f64,
    #[command(flatten)]
    pub palette: PaletteArgs,
}

#[derive(Debug, Args)]
pub struct LearnMapArgs {
    #[arg(short = 's', long = "style", value_name = "STYLE")]
    pub style: PathBuf,
    #[arg(short = 'o', long = "output", value_name = "OUT")]
    pub output: PathBuf,
    #[command(flatten)]
    pub palette: PaletteArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Norm {
    Edge,
    All,
}

impl From<Norm> for NormDomain {
    fn from(n: Norm) -> Self {
        match n {
            Norm::Edge => NormDomain::EdgePixels,
            Norm::All => NormDomain::AllPixels,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Start {
    Darkest,
    Random,
}

impl PaletteArgs {
    pub fn start_color(&self) -> StartColor {
        match self.start {
            Start::Darkest => StartColor::Darkest,
            Start::Random => StartColor::Random(self.seed),
        }
    }
}

fn parse_threshold(s: &str) -> Result<f64, String> {
    let t: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if (0.0..=1.0).contains(&t) {
        Ok(t)
    } else {
        Err(format!("threshold must lie in [0, 1], got {t}"))
    }
}

fn parse_k(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(k) if k >= 1 => Ok(k),
        _ => Err(format!("cluster count must be an integer >= 1, got `{s}`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn defaults() {
        let cli =
            Cli::try_parse_from(["edgechroma", "colorize", "-i", "a.png", "-o", "b.png"]).unwrap();
        let Command::Colorize(args) = cli.command else {
            panic!("wrong subcommand");
        };
        assert_eq!(args.threshold, 0.2);
        assert_eq!(args.map, "viridis");
        assert_eq!(args.norm, Norm::Edge);

        let cli = Cli::try_parse_from(["edgechroma", "learn-map", "-s", "a.png", "-o", "m.gcmap"])
            .unwrap();
        let Command::LearnMap(args) = cli.command else {
            panic!("wrong subcommand");
        };
        assert_eq!((args.palette.k, args.palette.seed), (5, 0));
        assert_eq!(args.palette.start_color(), StartColor::Darkest);
    }

    #[test]
    fn rejects_out_of_range_values() {
        for argv in [
            vec!["edgechroma", "edges", "-i", "a", "-o", "b", "-t", "1.5"],
            vec!["edgechroma", "edges", "-i", "a", "-o", "b", "-t", "x"],
            vec!["edgechroma", "learn-map", "-s", "a", "-o", "b", "-k", "0"],
            vec![
                "edgechroma",
                "colorize",
                "-i",
                "a",
                "-o",
                "b",
                "--norm",
                "sideways",
            ],
            vec!["edgechroma", "style-transfer", "-i", "a", "-o", "b"],
        ] {
            assert!(Cli::try_parse_from(&argv).is_err(), "{argv:?}");
        }
    }
}
