use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "affsurf", version, about = "L_p affine surface areas and their extremal values")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Seed for every Monte Carlo stream.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Number of random samples (command-specific default when omitted).
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Quadrature or search grid size.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Numerical tolerance (command-specific default when omitted).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AspMethodArg {
    Auto,
    Closed,
    Quadrature,
    Polytope,
    Floating,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MomentArg {
    Auto,
    Exact,
    Sampling,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    IsoInequality,
    Steiner,
    Equivariance,
}

/// Accepts decimal numbers and `inf`, `+inf`, `-inf`.
pub fn parse_p(s: &str) -> Result<f64, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" | "+infinity" => Ok(f64::INFINITY),
        "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
        t => match t.parse::<f64>() {
            Ok(x) if !x.is_nan() => Ok(x),
            _ => Err(format!("{s:?} is not a number or ±inf")),
        },
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate as_p of a body.
    Asp {
        #[arg(long)]
        body: PathBuf,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_p)]
        p: f64,
        #[arg(long, value_enum, default_value_t = AspMethodArg::Auto)]
        method: AspMethodArg,
    },
    /// Floating body of a planar body and its normalized volume defect.
    Floating {
        #[arg(long)]
        body: PathBuf,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
    },
    /// Minimum-volume enclosing (Löwner) ellipsoid.
    Mvee {
        #[arg(long)]
        body: PathBuf,
    },
    /// Maximum-volume inscribed (John) ellipsoid.
    John {
        #[arg(long)]
        body: PathBuf,
    },
    /// Affine map to isotropic position and the isotropic constant.
    Isotropic {
        #[arg(long)]
        body: PathBuf,
        #[arg(long, value_enum, default_value_t = MomentArg::Auto)]
        method: MomentArg,
    },
    /// Santaló point and volume product of a planar body.
    Santalo {
        #[arg(long)]
        body: PathBuf,
    },
    /// Extremal value of as_p over inner or outer bodies.
    Extremal {
        #[arg(long)]
        body: PathBuf,
        /// IS, is, OS or os.
        #[arg(long)]
        kind: String,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_p)]
        p: f64,
        /// Emit a witness sequence for a divergent or vanishing range instead of an estimate.
        #[arg(long)]
        probe: bool,
    },
    /// Thin-shell mass and shell partition in isotropic position.
    Thinshell {
        #[arg(long)]
        body: PathBuf,
        #[arg(long = "c-thin", default_value_t = 1.0)]
        c_thin: f64,
        /// Directions used for the spherical measure of the truncated cone.
        #[arg(long, default_value_t = 20000)]
        directions: usize,
    },
    /// Steiner coefficients, homogeneity degrees and the non-quermass table.
    Quermass {
        #[arg(long, required_unless_present = "non_quermass")]
        body: Option<PathBuf>,
        /// Comma-separated parallel-body radii.
        #[arg(long, value_delimiter = ',')]
        t: Option<Vec<f64>>,
        /// Fit the scaling degree of IS_1, os_-1 or OS_n2 instead of the Steiner polynomial.
        #[arg(long)]
        estimator: Option<String>,
        /// Comma-separated scale factors for the homogeneity fit.
        #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0, 2.0])]
        alphas: Vec<f64>,
        /// Comma-separated dimensions for the non-quermass table.
        #[arg(long = "non-quermass", value_delimiter = ',', conflicts_with_all = ["body", "estimator"])]
        non_quermass: Option<Vec<usize>>,
    },
    /// Run an invariant suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long)]
        body: Option<PathBuf>,
        /// random2d, polygons, symmetric-polygons, ellipses or smooth.
        #[arg(long, default_value = "random2d")]
        corpus: String,
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_parser_accepts_infinities() {
        assert_eq!(parse_p("inf"), Ok(f64::INFINITY));
        assert_eq!(parse_p("-inf"), Ok(f64::NEG_INFINITY));
        assert_eq!(parse_p("-1.5"), Ok(-1.5));
        assert!(parse_p("nan").is_err());
        assert!(parse_p("x").is_err());
    }

    #[test]
    fn lists_split_on_commas() {
        let cli = Cli::try_parse_from(["affsurf", "quermass", "--body", "b.json", "--alphas", "0.5,1,4"]).unwrap();
        match cli.command {
            Command::Quermass { alphas, .. } => assert_eq!(alphas, vec![0.5, 1.0, 4.0]),
            _ => unreachable!(),
        }
        assert!(Cli::try_parse_from(["affsurf", "quermass", "--non-quermass", "2,x"]).is_err());
    }

    #[test]
    fn negative_p_is_a_value() {
        let cli = Cli::try_parse_from(["affsurf", "asp", "--body", "b.json", "--p", "-1"]).unwrap();
        match cli.command {
            Command::Asp { p, .. } => assert_eq!(p, -1.0),
            _ => unreachable!(),
        }
    }
}
