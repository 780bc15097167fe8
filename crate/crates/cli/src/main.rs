use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use qmarginal::lattice::{Boundary, CompassParams};
use qmarginal::report::{run, ModelSpec, RunConfig, Task, Tolerances, EXIT_ERROR};

/// Certify m-blindness of spin-lattice ground spaces and reproduce the
/// fermionic two-preimage counterexample.
#[derive(Parser)]
#[command(name = "qmarginal", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dense spectrum, ground space, parity sectors and A-basis decomposition.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Include every eigenvalue in the report.
        #[arg(long)]
        dump_spectrum: bool,
        /// Include the ground-state vectors in the report.
        #[arg(long)]
        dump_ground: bool,
    },
    /// Check that all ground states share their m-site marginals.
    Blindness {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        m: usize,
    },
    /// Knill-Laflamme check over the identity and all weight-1 Paulis.
    Kl {
        #[command(flatten)]
        common: Common,
    },
    /// Verify the spin-to-fermion map, 2-RDM assembly and penalized Fock ground space.
    FermionVerify {
        #[command(flatten)]
        common: Common,
    },
    /// Exhaustive low-weight logical search on a stabilizer code.
    Stabilizer {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        m: usize,
    },
    /// Full chain: ground space, 2-blindness, fermionic pre-images, verdict.
    Counterexample {
        #[command(flatten)]
        common: Common,
    },
    /// Compute golden quantities; compare with --golden when given.
    Golden {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        golden: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// compass | toric | custom
    #[arg(long, visible_alias = "code")]
    model: Option<String>,
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    jx: f64,
    #[arg(long, default_value_t = 1.0)]
    jz: f64,
    #[arg(long, default_value = "cyclic")]
    boundary: String,
    /// Toric lattice size.
    #[arg(long = "L")]
    l: Option<usize>,
    /// JSON descriptor for --model custom.
    #[arg(long)]
    file: Option<PathBuf>,
    /// Certificate tolerance (Frobenius, absolute).
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    threads: Option<usize>,
    /// Report path; `-` prints the JSON report instead of the summary.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn model(&self, default: &str) -> Result<ModelSpec> {
        let kind = self.model.as_deref().unwrap_or(default);
        Ok(match kind {
            "compass" => {
                let boundary: Boundary = self.boundary.parse()?;
                ModelSpec::Compass(CompassParams::new(self.n, self.jx, self.jz, boundary))
            }
            "toric" => match self.l {
                Some(l) => ModelSpec::Toric { l },
                None => bail!("--model toric needs --L"),
            },
            "custom" => match &self.file {
                Some(f) => ModelSpec::Custom(f.clone()),
                None => bail!("--model custom needs --file"),
            },
            other => bail!("unknown model {other:?} (expected compass, toric or custom)"),
        })
    }

    fn config(&self, task: Task, default_model: &str) -> Result<RunConfig> {
        let mut tol = Tolerances::default();
        if let Some(t) = self.tol {
            tol.certificate = t;
        }
        let to_stdout = self.out.as_deref() == Some(std::path::Path::new("-"));
        Ok(RunConfig {
            model: self.model(default_model)?,
            task,
            tol,
            threads: self.threads,
            out: self.out.clone().filter(|_| !to_stdout),
        })
    }
}

fn build(cmd: Command) -> Result<(RunConfig, bool)> {
    let (common, task, default_model) = match cmd {
        Command::Spectrum {
            common,
            dump_spectrum,
            dump_ground,
        } => (
            common,
            Task::Spectrum {
                dump_spectrum,
                dump_ground,
            },
            "compass",
        ),
        Command::Blindness { common, m } => (common, Task::Blindness { m }, "compass"),
        Command::Kl { common } => (common, Task::Kl, "compass"),
        Command::FermionVerify { common } => (common, Task::FermionVerify, "compass"),
        Command::Stabilizer { common, m } => (common, Task::Stabilizer { m }, "toric"),
        Command::Counterexample { common } => (common, Task::Counterexample, "compass"),
        Command::Golden { common, golden } => (common, Task::Golden { compare: golden }, "compass"),
    };
    let json_to_stdout = common.out.as_deref() == Some(std::path::Path::new("-"));
    Ok((common.config(task, default_model)?, json_to_stdout))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // usage errors are configuration errors, not failed certificates
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR as u8 } else { 0 });
        }
    };
    let (config, json_to_stdout) = match build(cli.command) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_ERROR as u8);
        }
    };
    let outcome = run(&config);
    if json_to_stdout {
        print!("{}", outcome.report_text());
    } else if outcome.exit_code == EXIT_ERROR {
        eprintln!("{}", outcome.summary.trim_end());
    } else {
        print!("{}", outcome.summary);
    }
    ExitCode::from(outcome.exit_code as u8)
}
