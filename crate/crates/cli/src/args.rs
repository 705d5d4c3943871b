use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "hdcoding",
    version,
    about = "Orbits, exceptional curves and symbolic coding of f(x, y) = (x + 1/y, y - 1/y - x)"
)]
pub struct Cli {
    #[command(flatten)]
    pub run: RunArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Arithmetic: exact rationals or f64.
    #[arg(long, value_enum, default_value_t = Mode::Exact, global = true)]
    pub mode: Mode,
    /// Float mode: |v| below this counts as zero.
    #[arg(long, default_value_t = 1e-12, global = true)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 42, global = true)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Largest numerator or denominator, in bits, before a run aborts with exit code 3.
    #[arg(long, env = "HDCODING_MAX_BITS", global = true)]
    pub max_bits: Option<u64>,
    /// Refinement budget for cylinder searches.
    #[arg(long, env = "HDCODING_MAX_REFINEMENTS", default_value_t = 40, global = true)]
    pub max_refinements: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    /// Pre-images of {y = 0}: f^-n(t, 0).
    #[value(name = "R", alias = "r", alias = "preimage")]
    R,
    /// Images of {x + y = 0}: f^n(t, -t).
    #[value(name = "L", alias = "l", alias = "image")]
    L,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Iterate a point forward and backward.
    Orbit {
        /// "x,y" with rational ("p/q") or decimal components.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = 0)]
        fwd: usize,
        #[arg(long, default_value_t = 0)]
        bwd: usize,
    },
    /// Coordinate words and both symbol sequences of a point.
    Code {
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Orbit steps examined for each word.
        #[arg(long, default_value_t = 16)]
        depth: usize,
        /// Symbols per side; defaults to depth - 2.
        #[arg(long)]
        window: Option<usize>,
        /// Negate every entry and symbol (the coding of -p).
        #[arg(long)]
        mirror: bool,
    },
    /// Sample every branch of a level-n curve.
    Curves {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        level: usize,
        /// Initial samples per branch.
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Refine where consecutive samples are far apart.
        #[arg(long)]
        adaptive: bool,
        /// Largest level accepted.
        #[arg(long, default_value_t = 10)]
        max_level: usize,
    },
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Locate a point with given word prefixes, or a curve point of a Finite i-word.
    Decode {
        /// i-word prefix, comma separated, e.g. 2,-1.
        #[arg(long, allow_hyphen_values = true)]
        iword: String,
        /// j-word prefix; ignored with --finite.
        #[arg(long, allow_hyphen_values = true, default_value = "")]
        jword: String,
        /// "x_min,x_max,y_min,y_max".
        #[arg(long = "box", allow_hyphen_values = true, default_value = "-3,3,-3,3")]
        search_box: String,
        /// Target cell diameter.
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
        /// Treat the i-word as Finite and return a point of the pre-image curve.
        #[arg(long)]
        finite: bool,
    },
    /// Newton search for a periodic point with a given cycle of word entries.
    Periodic {
        #[arg(long, allow_hyphen_values = true)]
        icycle: String,
        /// Defaults to the i cycle reversed.
        #[arg(long, allow_hyphen_values = true)]
        jcycle: Option<String>,
        #[arg(long = "box", allow_hyphen_values = true, default_value = "-4,4,-4,4")]
        search_box: String,
    },
    /// The one-dimensional map B(x) = x - 1/x.
    Boole {
        #[command(subcommand)]
        op: BooleOp,
    },
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Points in the commutation sweep.
    #[arg(long)]
    pub points: Option<usize>,
    /// Orbit depth of the commutation sweep.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Samples per branch for monotonicity and disjointness.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub max_level: Option<usize>,
    #[arg(long)]
    pub boole_points: Option<usize>,
    #[arg(long)]
    pub boole_depth: Option<usize>,
    #[arg(long)]
    pub queries: Option<usize>,
    /// Print each check's wall time to stderr as "timing <check> <seconds>".
    #[arg(long)]
    pub timings: bool,
}

#[derive(Subcommand, Debug)]
pub enum BooleOp {
    /// Iterate B.
    Apply {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value_t = 1)]
        steps: usize,
    },
    /// Word and symbol sequence of x.
    Code {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Number of word entries (complete sign runs).
        #[arg(long, default_value_t = 12)]
        depth: usize,
    },
    /// Interval of points whose word starts with the given entries.
    Decode {
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        /// The word is Finite: the orbit reaches 0 right after it.
        #[arg(long)]
        finite: bool,
        /// Bracket width for interval ends.
        #[arg(long, default_value = "1/1000000000")]
        tol: String,
    },
    /// Pre-image weights 1/B'(x) sum to one at random y.
    CheckMeasure {
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
}
