mod commands;
mod report;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use floerkit::fixtures::FixtureOptions;
use floerkit::novikov::Q;
use floerkit::specfile::SpecDocument;

use commands::InputError;
use report::{digest, ResultsDocument};

#[derive(Parser)]
#[command(
    name = "floerkit",
    version,
    about = "Check filtered A-infinity structures and their potentials"
)]
struct Cli {
    /// Energy cutoff, overriding the spec.
    #[arg(long, global = true)]
    cutoff: Option<Q>,
    /// Bound on the number of decorated trees per cell.
    #[arg(long, global = true)]
    limit: Option<usize>,
    /// Seed for random gauges.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Subcommand)]
enum Command {
    /// Verify the structural identities of every table in a spec.
    Check { spec: PathBuf },
    /// Transfer an algebra to its minimal model along the spec's contraction.
    Minimize {
        spec: PathBuf,
        #[arg(long)]
        algebra: Option<String>,
        /// Also transfer this pseudo-isotopy.
        #[arg(long)]
        isotopy: Option<String>,
    },
    /// Compute the potential and the obstruction series.
    Potential {
        spec: PathBuf,
        #[arg(long)]
        algebra: Option<String>,
    },
    /// Check the wall-crossing identities of a homomorphism.
    Wallcross {
        spec: PathBuf,
        #[arg(long)]
        map: Option<String>,
        #[arg(long)]
        source: Option<String>,
        #[arg(long)]
        target: Option<String>,
    },
    /// Push an algebra along the steps of the spec's plan.
    Continue {
        spec: PathBuf,
        #[arg(long)]
        algebra: Option<String>,
    },
    /// Print a spec for a built-in model.
    Fixtures {
        name: Option<String>,
        /// Add a random gauge and the transported algebra.
        #[arg(long)]
        pair: bool,
    },
}

fn load(path: &Path, cli: &Cli) -> Result<(SpecDocument, Vec<u8>), InputError> {
    let bytes = std::fs::read(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    let text =
        std::str::from_utf8(&bytes).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    let mut doc = SpecDocument::parse(text)?;
    if let Some(c) = &cli.cutoff {
        doc.context.cutoff = c.clone();
    }
    if let Some(l) = cli.limit {
        doc.context.limit = l;
    }
    Ok((doc, bytes))
}

fn options(cli: &Cli) -> FixtureOptions {
    let mut o = FixtureOptions::default();
    if let Some(c) = &cli.cutoff {
        o.cutoff = c.clone();
    }
    o
}

fn run(cli: &Cli) -> Result<Option<ResultsDocument>, InputError> {
    let start = Instant::now();
    let flags = format!(
        "cutoff={:?} limit={:?} seed={:?}",
        cli.cutoff.as_ref().map(ToString::to_string),
        cli.limit,
        cli.seed
    );
    let with_spec =
        |name: &str,
         spec: &Path,
         f: &mut dyn FnMut(&SpecDocument, &mut ResultsDocument) -> Result<(), InputError>| {
            let (doc, bytes) = load(spec, cli)?;
            let mut out =
                ResultsDocument::new(name, digest(&[name.as_bytes(), &bytes, flags.as_bytes()]));
            f(&doc, &mut out)?;
            out.timing_ms = start.elapsed().as_millis();
            Ok(Some(out))
        };
    match &cli.command {
        Command::Check { spec } => with_spec("check", spec, &mut |d, o| commands::check(d, o)),
        Command::Minimize {
            spec,
            algebra,
            isotopy,
        } => with_spec("minimize", spec, &mut |d, o| {
            commands::minimize(d, algebra.as_deref(), isotopy.as_deref(), o)
        }),
        Command::Potential { spec, algebra } => with_spec("potential", spec, &mut |d, o| {
            commands::potential(d, algebra.as_deref(), o)
        }),
        Command::Wallcross {
            spec,
            map,
            source,
            target,
        } => with_spec("wallcross", spec, &mut |d, o| {
            commands::wallcross(d, map.as_deref(), source.as_deref(), target.as_deref(), o)
        }),
        Command::Continue { spec, algebra } => with_spec("continue", spec, &mut |d, o| {
            commands::continue_plan(d, algebra.as_deref(), o)
        }),
        Command::Fixtures { name: None, .. } => {
            for n in commands::fixture_names() {
                println!("{n}");
            }
            Ok(None)
        }
        Command::Fixtures {
            name: Some(name),
            pair,
        } => {
            let seed = cli.seed.unwrap_or_else(rand::random);
            let doc = commands::fixture_doc(name, &options(cli), *pair, seed)?;
            let _ = std::io::stdout().write_all(doc.render().as_bytes());
            Ok(None)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(out)) => {
            let text = match cli.format {
                Format::Text => out.to_text(),
                Format::Machine => out.to_json() + "\n",
            };
            let _ = std::io::stdout().write_all(text.as_bytes());
            if out.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
