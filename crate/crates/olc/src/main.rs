use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use olc::commands::{self, Base, CliError, CliResult, Format, Mode, Ordering, EXIT_INVALID};

#[derive(Parser)]
#[command(name = "olc", version, about = "Polygons and Hasse invariants of F-crystals with O_L-action")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InputArgs {
    /// Input JSON file, `-` for standard input.
    #[arg(long, short)]
    input: Option<PathBuf>,
    /// Input JSON file (same as --input).
    #[arg(conflicts_with = "input")]
    file: Option<PathBuf>,
    /// Working precision in p-adic digits, overriding the file.
    #[arg(long)]
    precision: Option<u32>,
}

#[derive(Args)]
struct DatumArgs {
    /// Residue characteristic.
    #[arg(long, short, default_value_t = 3)]
    p: u64,
    /// Degree of the residue field over F_p (default: f).
    #[arg(long, short)]
    n: Option<usize>,
    /// Rank h.
    #[arg(long)]
    h: usize,
    /// Datum: entries separated by commas, embeddings by semicolons, e.g. `2,1,0` or `1,0;2,1`.
    #[arg(long)]
    mu: String,
    /// Working precision in p-adic digits.
    #[arg(long)]
    precision: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Newton, Hodge and PR polygons of a crystal file.
    Polygons {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Randomized property suite over generated instances.
    RandomSuite {
        #[command(flatten)]
        datum: DatumArgs,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        /// Iteration bound of the Newton oracle, 0 to skip the oracle check.
        #[arg(long, default_value_t = 1 << 20)]
        oracle_bound: u64,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Draws the polygons of a crystal file or of `polygons --format json` output.
    Render {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = Format::Ascii)]
        format: Format,
    },
    /// Hasse invariants over the residue field or over an artinian base.
    Hasse {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = Base::Perfect)]
        base: Base,
        /// Seed for random preimage choices (artinian base only).
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Builds the explicit mu-ordinary crystal of a datum.
    Xord {
        #[command(flatten)]
        datum: DatumArgs,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Hodge-Newton splitting at a break abscissa.
    HnSplit {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        at: usize,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Certified block decomposition of a mu-ordinary crystal.
    MuDecompose {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Writes a random crystal with a PR filtration as JSON.
    Generate {
        #[command(flatten)]
        datum: DatumArgs,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Mode::Mixed)]
        mode: Mode,
    },
    /// Truncated data of a deformed mu-ordinary family over the dual numbers (e = 3, h = 2).
    DualFamily {
        #[arg(long, short, default_value_t = 3)]
        p: u64,
        #[arg(long, short, default_value_t = 1)]
        n: usize,
        /// Deformation parameter of the first generator.
        #[arg(long, allow_negative_numbers = true)]
        x: i64,
        /// Deformation parameter of the last generator.
        #[arg(long, allow_negative_numbers = true)]
        y: i64,
        #[arg(long, value_enum, default_value_t = Ordering::Ordered)]
        ordering: Ordering,
    },
}

fn read_input(args: &InputArgs) -> Result<String, CliError> {
    let path = args.input.as_ref().or(args.file.as_ref()).ok_or_else(|| CliError {
        code: EXIT_INVALID,
        message: "an input file is required (--input FILE, or - for standard input)".into(),
    })?;
    let mut text = String::new();
    let res = if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    res.map_err(|e| CliError { code: EXIT_INVALID, message: format!("{}: {e}", path.display()) })?;
    Ok(text)
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Polygons { input, format } => commands::polygons(&read_input(&input)?, input.precision, format),
        Command::RandomSuite { datum, trials, seed, oracle_bound, format } => {
            let mu = commands::parse_mu(&datum.mu, datum.h)?;
            commands::random_suite(datum.p, datum.n, &mu, trials, seed, datum.precision, oracle_bound, format)
        }
        Command::Render { input, format } => commands::render(&read_input(&input)?, input.precision, format),
        Command::Hasse { input, base, seed, format } => {
            commands::hasse(&read_input(&input)?, input.precision, base, seed, format)
        }
        Command::Xord { datum, format } => {
            let mu = commands::parse_mu(&datum.mu, datum.h)?;
            commands::xord(datum.p, datum.n, &mu, datum.precision, format)
        }
        Command::HnSplit { input, at, format } => {
            commands::hn_split_cmd(&read_input(&input)?, at, input.precision, format)
        }
        Command::MuDecompose { input, format } => commands::mu_decompose(&read_input(&input)?, input.precision, format),
        Command::Generate { datum, seed, mode } => {
            let mu = commands::parse_mu(&datum.mu, datum.h)?;
            commands::generate(datum.p, datum.n, &mu, seed, mode, datum.precision)
        }
        Command::DualFamily { p, n, x, y, ordering } => commands::dual_family(p, n, x, y, ordering),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}
