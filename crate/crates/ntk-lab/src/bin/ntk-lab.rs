//! Batch CLI over the library: scenario runs plus two scalar utilities.
//!
//! ```text
//! ntk-lab <scenario> [--config <path>] [--out <dir>] [--seed <u64>] [--threads <k>]
//! ntk-lab kernel --x <f> --y <f> [--d <int>]
//! ntk-lab roots --alpha <f> --jmax <int>
//! ```
//!
//! Exit codes: 0 success, 2 configuration problem (unknown scenario, bad
//! config file, bad flags), 3 numerical or I/O failure. `NTK_LAB_THREADS`
//! is the fallback for `--threads`.

use clap::Parser;
use ntk_lab::experiments::{load_config, run_to_files, ExperimentConfig, SCENARIOS};
use ntk_lab::kernels::{KernelSpec, Point};
use ntk_lab::spectral::mercer_spectrum;
use ntk_lab::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "ntk-lab",
    version,
    about = "Kernel-regression scenario runner (see `ntk-lab help` and the scenario list below)",
    after_help = "Scenarios: min_eig, edr, sandwich, interp_gap, early_stop, overfit_floor, \
                  uniform_kernel, uniform_function, stopping_rules"
)]
enum Cmd {
    /// Evaluate the closed-form kernel at two scalar inputs.
    Kernel {
        #[arg(long)]
        x: f64,
        #[arg(long)]
        y: f64,
        /// Ambient dimension of the kernel formula (scalars are embedded
        /// as (x, 0, ..., 0); the value is dimension-independent).
        #[arg(long, default_value_t = 1)]
        d: usize,
    },
    /// Print the transcendental spectrum as CSV (j, omega, lambda).
    Roots {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        jmax: usize,
    },
    /// A scenario name followed by its flags.
    #[command(external_subcommand)]
    Scenario(Vec<String>),
}

#[derive(Parser)]
#[command(name = "ntk-lab <scenario>", disable_help_flag = false)]
struct ScenarioArgs {
    /// Flat key-value config file; defaults to the scenario's built-ins.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Base seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; falls back to NTK_LAB_THREADS, then to all cores.
    #[arg(long)]
    threads: Option<usize>,
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>, Error> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("NTK_LAB_THREADS") {
        Ok(v) => {
            let k = v.parse::<usize>().map_err(|_| Error::ConfigParse {
                line: 0,
                message: format!("NTK_LAB_THREADS = `{v}` is not a thread count"),
            })?;
            Ok(Some(k))
        }
        Err(_) => Ok(None),
    }
}

fn run_scenario(name: &str, args: &[String]) -> Result<(), Error> {
    let parsed = match ScenarioArgs::try_parse_from(
        std::iter::once("ntk-lab".to_string()).chain(args.iter().cloned()),
    ) {
        Ok(p) => p,
        Err(e) => e.exit(), // clap prints usage and exits 2 (0 for --help)
    };

    let mut cfg = match &parsed.config {
        Some(path) => {
            let cfg = load_config(path)?;
            if cfg.name != name {
                return Err(Error::ConfigParse {
                    line: 0,
                    message: format!(
                        "config is for scenario `{}`, but `{name}` was requested",
                        cfg.name
                    ),
                });
            }
            cfg
        }
        None => ExperimentConfig::defaults_for(name)?,
    };
    if let Some(out) = parsed.out {
        cfg.output_dir = out;
    }
    if let Some(seed) = parsed.seed {
        cfg.seed = seed;
    }
    if let Some(k) = thread_count(parsed.threads)? {
        // A second global-pool initialization in one process is harmless;
        // rayon keeps the first, so only warn.
        if rayon::ThreadPoolBuilder::new().num_threads(k).build_global().is_err() {
            eprintln!("warning: thread pool already initialized; --threads ignored");
        }
    }

    let (csv_path, json_path) = run_to_files(&cfg)?;
    println!("wrote {}", csv_path.display());
    println!("wrote {}", json_path.display());
    Ok(())
}

fn real_main() -> Result<(), Error> {
    match Cmd::parse() {
        Cmd::Kernel { x, y, d } => {
            if d == 0 {
                return Err(Error::ConfigParse {
                    line: 0,
                    message: "--d must be at least 1".into(),
                });
            }
            let spec = if d == 1 { KernelSpec::Ntk1 } else { KernelSpec::NtkD { d } };
            let embed = |v: f64| {
                let mut coords = vec![0.0; d];
                coords[0] = v;
                Point::new(coords)
            };
            let value = spec.eval(&embed(x), &embed(y))?;
            println!("{value:.16e}");
        }
        Cmd::Roots { alpha, jmax } => {
            let sp = mercer_spectrum(alpha, jmax)?;
            println!("j,omega,lambda");
            for j in 1..=jmax {
                println!("{j},{:.16e},{:.16e}", sp.roots[j - 1], sp.eigenvalues[j - 1]);
            }
        }
        Cmd::Scenario(argv) => {
            let name = argv.first().expect("external subcommand always has a name").clone();
            if !SCENARIOS.contains(&name.as_str()) {
                return Err(Error::UnknownScenario(name));
            }
            run_scenario(&name, &argv[1..])?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
