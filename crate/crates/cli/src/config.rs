use clap::{Args, ValueEnum};
use padist::{PadicError, PrimeContext, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Flags shared by every command.
#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// The prime.
    #[arg(short = 'p', long = "prime", global = true, default_value_t = 3)]
    pub p: u64,
    /// Absolute precision M.
    #[arg(long, global = true, default_value_t = 20)]
    pub precision: i64,
    /// Series truncation K.
    #[arg(long, visible_alias = "K", global = true, default_value_t = 32)]
    pub trunc: usize,
    /// BCH truncation degree D.
    #[arg(long, global = true, default_value_t = 10)]
    pub degree: usize,
    #[arg(long, global = true, default_value_t = padist::validation::DEFAULT_SEED)]
    pub seed: u64,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,
    /// Output format; binom-audit defaults to CSV, everything else to JSON.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub ctx: PrimeContext,
    pub precision: i64,
    pub trunc: usize,
    pub degree: usize,
    pub seed: u64,
}

impl RunConfig {
    pub fn from_args(args: &GlobalArgs) -> Result<Self> {
        let ctx = PrimeContext::new(args.p)?;
        if args.precision < 4 {
            return Err(PadicError::InvalidInput(format!(
                "precision must be at least 4, got {}",
                args.precision
            )));
        }
        if args.trunc < 8 {
            return Err(PadicError::InvalidInput(format!(
                "truncation must be at least 8, got {}",
                args.trunc
            )));
        }
        if args.degree < 2 {
            return Err(PadicError::InvalidInput(format!(
                "degree must be at least 2, got {}",
                args.degree
            )));
        }
        Ok(Self {
            ctx,
            precision: args.precision,
            trunc: args.trunc,
            degree: args.degree,
            seed: args.seed,
        })
    }
}
