//! Argument parsing and dispatch for the `crjoin` binary.

use std::io::Read;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crjoin_core::bounds::{BoundCalc, DEFAULT_BIT_CAP};
use crjoin_core::reduction::Limits;

use crate::commands::{self, JoinMode, Output, Strategy};
use crate::error::{CliError, CliResult};
use crate::harness::{HarnessConfig, Suite};
use crate::io;

#[derive(Debug, Parser)]
#[command(
    name = "crjoin",
    version,
    about = "Constructive Church-Rosser joins for the untyped λ-calculus"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Seed for random strategies and the property harness.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Cases per harness suite.
    #[arg(long, global = true, default_value_t = 100)]
    pub cases: usize,
    /// Largest generated term.
    #[arg(long = "max-size", global = true, default_value_t = 20)]
    pub max_size: u64,
    /// Step budget: reduction steps for `reduce`, path length for `check`.
    #[arg(long, global = true)]
    pub fuel: Option<usize>,
    /// Largest term any construction may build.
    #[arg(long = "term-cap", global = true, default_value_t = 1 << 22)]
    pub term_cap: u64,
    /// Longest path any construction may build.
    #[arg(long = "path-cap", global = true, default_value_t = 1 << 20)]
    pub path_cap: usize,
    /// Bit length beyond which bound values become `overflow`.
    #[arg(long = "bit-cap", global = true, default_value_t = DEFAULT_BIT_CAP)]
    pub bit_cap: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of to standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

impl GlobalArgs {
    pub fn limits(&self) -> Limits {
        Limits {
            max_term_size: self.term_cap,
            max_path_len: self.path_cap,
        }
    }

    pub fn calc(&self) -> BoundCalc {
        BoundCalc::new(self.bit_cap)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// A term given as a file (`-` for standard input) or inline.
#[derive(Debug, Args)]
pub struct TermInput {
    #[arg(required_unless_present = "expr")]
    pub file: Option<PathBuf>,
    #[arg(short = 'e', long, conflicts_with = "file")]
    pub expr: Option<String>,
}

impl TermInput {
    fn text(&self) -> CliResult<String> {
        match (&self.expr, &self.file) {
            (Some(e), _) => Ok(e.clone()),
            (None, Some(f)) => read_file(f),
            (None, None) => Err(CliError::Usage("no input given".into())),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a term, chain or certificate and print its canonical form.
    Parse {
        #[command(flatten)]
        input: TermInput,
        /// Read the input as a chain document.
        #[arg(long, conflicts_with = "certificate")]
        chain: bool,
        /// Read the input as a JSON certificate and replay it.
        #[arg(long)]
        certificate: bool,
    },
    /// Reduce a term step by step.
    Reduce {
        #[command(flatten)]
        input: TermInput,
        #[arg(long, value_enum, default_value_t = Strategy::Leftmost)]
        strategy: Strategy,
        /// Number of steps; defaults to --fuel, then 1000.
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Iterate the Takahashi translation.
    Star {
        #[command(flatten)]
        input: TermInput,
        #[arg(long = "iter", default_value_t = 1)]
        iterations: usize,
    },
    /// Join a chain, or a peak given as two paths from one source.
    Join {
        #[arg(required_unless_present = "peak")]
        chain: Option<PathBuf>,
        #[arg(long, num_args = 2, value_names = ["LEFT", "RIGHT"], conflicts_with = "chain")]
        peak: Option<Vec<PathBuf>>,
        #[arg(long, value_enum, default_value_t = JoinMode::Refined)]
        mode: JoinMode,
    },
    /// Evaluate a bound function, or tabulate it with --grid.
    Bounds {
        function: String,
        /// Numbers, or for `cr-eq` an arrow word such as `->,<-` followed by
        /// the first term size and the TermSize constant.
        #[arg(allow_hyphen_values = true)]
        args: Vec<String>,
        /// Tabulate every argument from its least value up to the one given.
        #[arg(long)]
        grid: bool,
    },
    /// Classify all arrow patterns of length k.
    Patterns { k: usize },
    /// Run the random-instance property harness.
    Check {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long = "max-chain", default_value_t = 6)]
        max_chain: usize,
        /// Largest source term of generated chains and peaks.
        #[arg(long = "max-source", default_value_t = 12)]
        max_source: u64,
    },
    /// Build and join the Church-numeral valley of size parameter n.
    Example2 {
        #[arg(default_value_t = 4)]
        n: u64,
        /// Also write the chain document here.
        #[arg(long = "chain-out")]
        chain_out: Option<PathBuf>,
    },
}

fn read_file(path: &PathBuf) -> CliResult<String> {
    let io_err = |source| CliError::Io {
        path: path.clone(),
        source,
    };
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(io_err)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(io_err)
    }
}

fn write_file(path: &PathBuf, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })
}

pub fn execute(cli: &Cli) -> CliResult<Output> {
    let g = &cli.global;
    let limits = g.limits();
    match &cli.command {
        Command::Parse {
            input,
            chain,
            certificate,
        } => {
            let text = input.text()?;
            if *certificate {
                commands::parse_certificate_cmd(&io::parse_certificates(&text)?, &limits)
            } else if *chain {
                Ok(commands::parse_chain_cmd(&io::parse_chain(&text)?))
            } else {
                Ok(commands::parse_term_cmd(&io::parse_term_doc(&text)?))
            }
        }
        Command::Reduce {
            input,
            strategy,
            steps,
        } => {
            let t = io::parse_term_doc(&input.text()?)?;
            let fuel = steps.or(g.fuel).unwrap_or(1000);
            commands::reduce_cmd(&t, *strategy, fuel, g.seed, &limits)
        }
        Command::Star { input, iterations } => {
            let t = io::parse_term_doc(&input.text()?)?;
            commands::star_cmd(&t, *iterations, &limits)
        }
        Command::Join { chain, peak, mode } => match (chain, peak) {
            (_, Some(files)) => {
                let left = io::parse_path(&read_file(&files[0])?, &limits)?;
                let right = io::parse_path(&read_file(&files[1])?, &limits)?;
                commands::join_peak_cmd(&left, &right, *mode, &g.calc(), &limits)
            }
            (Some(file), None) => {
                let c = io::parse_chain(&read_file(file)?)?;
                commands::join_chain_cmd(&c, *mode, &g.calc(), &limits)
            }
            (None, None) => Err(CliError::Usage(
                "give a chain file or --peak LEFT RIGHT".into(),
            )),
        },
        Command::Bounds {
            function,
            args,
            grid,
        } => commands::bounds_cmd(&g.calc(), function, args, *grid),
        Command::Patterns { k } => commands::patterns_cmd(*k),
        Command::Check {
            suite,
            max_chain,
            max_source,
        } => {
            let config = HarnessConfig {
                seed: g.seed,
                cases: g.cases,
                max_term_size: g.max_size,
                max_chain_length: *max_chain,
                max_source_size: *max_source,
                step_fuel: g.fuel.unwrap_or(6),
                limits,
                bit_cap: g.bit_cap,
            };
            Ok(commands::check_cmd(&config, *suite))
        }
        Command::Example2 { n, chain_out } => {
            let (out, chain) = commands::example2_cmd(*n, &limits)?;
            if let Some(path) = chain_out {
                write_file(path, &io::emit_chain(&chain))?;
            }
            Ok(out)
        }
    }
}

/// Runs a parsed command line, writes its report and returns the exit code.
pub fn run(cli: &Cli) -> u8 {
    let result = execute(cli).and_then(|out| {
        let mut text = match cli.global.format {
            Format::Text => out.text,
            Format::Json => serde_json::to_string_pretty(&out.json).expect("JSON values serialize"),
        };
        if !text.ends_with('\n') {
            text.push('\n');
        }
        match &cli.global.out {
            Some(path) => write_file(path, &text)?,
            None => print!("{text}"),
        }
        Ok(out.ok)
    });
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Stack for the worker thread: terms from `example2 4` nest 65 537 deep.
pub const STACK_SIZE: usize = 1 << 30;

/// Runs `f` on a thread with [`STACK_SIZE`] bytes of stack.
pub fn with_big_stack<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> T {
    std::thread::Builder::new()
        .stack_size(STACK_SIZE)
        .spawn(f)
        .expect("spawn worker thread")
        .join()
        .unwrap_or_else(|e| std::panic::resume_unwind(e))
}
