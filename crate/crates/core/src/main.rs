use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use diracsim::scenario::{self, RunOptions, ScenarioConfig, ScenarioError, ScenarioKind};

#[derive(Parser)]
#[command(
    name = "diracsim",
    about = "Dirac-equation dynamics on a four-level diamond and its transmon circuit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a TOML file.
    Run {
        config: PathBuf,
        /// Output root; results land in <out>/<scenario>/.
        #[arg(long, default_value = "results")]
        out: PathBuf,
        /// Worker threads (default: all cores). Results do not depend on it.
        #[arg(long)]
        threads: Option<usize>,
        /// Skip the SVG plots.
        #[arg(long)]
        no_svg: bool,
    },
    /// List the available scenarios.
    ListScenarios,
    /// Print the complete default configuration of a scenario as TOML.
    PrintDefaults { scenario: String },
    /// Print the version.
    Version,
}

fn execute(cmd: Command) -> Result<(), ScenarioError> {
    match cmd {
        Command::Run {
            config,
            out,
            threads,
            no_svg,
        } => {
            let cfg = ScenarioConfig::load(&config)?;
            let opts = RunOptions { threads, svg: !no_svg };
            let bundle = scenario::run(&cfg, &opts)?;
            let dir = out.join(cfg.kind().name());
            bundle.write(&dir, &cfg)?;
            for w in &bundle.warnings {
                eprintln!("warning: {w}");
            }
            for line in &bundle.summary {
                println!("{line}");
            }
            println!("results written to {}", dir.display());
        }
        Command::ListScenarios => {
            for kind in ScenarioKind::ALL {
                println!("{kind}");
            }
        }
        Command::PrintDefaults { scenario } => {
            let kind: ScenarioKind = scenario.parse()?;
            print!("{}", kind.default_config().to_toml());
        }
        Command::Version => println!("diracsim {}", env!("CARGO_PKG_VERSION")),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
