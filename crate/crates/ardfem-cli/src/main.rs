//! Command-line front end: convergence studies and scenario simulations.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ardfem::analysis::{convergence_study, DensitySeries, StudyKind};
use ardfem::config::{parse_config, Mode, RunConfig};
use ardfem::error::Error;
use ardfem::output::{write_density_csv, write_snapshots, SnapshotSet};
use ardfem::presets::{preset, preset_names, preset_summary};
use ardfem::stepping::{run, Scheme, StepObserver};

#[derive(Parser)]
#[command(
    name = "ardfem",
    version,
    about = "Finite-element solver for N-species competition with advection, \
             stocking and harvesting"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a manufactured-solution refinement study and print the error table.
    ///
    /// Temporal studies on the fine meshes take a few minutes.
    Convergence {
        /// Time stepping scheme.
        #[arg(long, value_enum)]
        scheme: SchemeArg,
        /// Refine the mesh (spatial) or the time step (temporal).
        #[arg(long, value_enum)]
        study: StudyArg,
        /// Number of refinement levels.
        #[arg(long, default_value_t = 5)]
        levels: usize,
        /// Also write the table as CSV to this path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a competition scenario and write density / snapshot CSVs.
    Simulate {
        /// Named scenario; see `--list-presets`.
        #[arg(long, required_unless_present_any = ["config", "list_presets"], conflicts_with = "config")]
        preset: Option<String>,
        /// Configuration file path.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory (overrides `output.dir` from the config).
        #[arg(long)]
        out: Option<PathBuf>,
        /// List the available presets and exit.
        #[arg(long)]
        list_presets: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Dbe,
    Dbdf2,
}

#[derive(Clone, Copy, ValueEnum)]
enum StudyArg {
    Spatial,
    Temporal,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            // Usage and configuration problems exit 2, runtime failures 1.
            match e {
                Error::Config(_) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Convergence {
            scheme,
            study,
            levels,
            out,
        } => {
            let scheme = match scheme {
                SchemeArg::Dbe => Scheme::Dbe,
                SchemeArg::Dbdf2 => Scheme::Dbdf2,
            };
            let study = match study {
                StudyArg::Spatial => StudyKind::Spatial,
                StudyArg::Temporal => StudyKind::Temporal,
            };
            let report = convergence_study(scheme, study, levels)?;
            println!(
                "{} {} refinement, error |e|_(2,1) per species:",
                scheme.name(),
                study.name()
            );
            print!("{}", report.to_table());
            if let Some(path) = out {
                std::fs::write(&path, report.to_csv()).map_err(|e| Error::io(&path, e))?;
                println!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::Simulate {
            preset: preset_name,
            config,
            out,
            list_presets,
        } => {
            if list_presets {
                for name in preset_names() {
                    println!("{name:<24} {}", preset_summary(name).unwrap_or(""));
                }
                return Ok(());
            }
            let config = load_config(preset_name.as_deref(), config.as_deref())?;
            simulate(&config, out)
        }
    }
}

fn load_config(
    preset_name: Option<&str>,
    path: Option<&std::path::Path>,
) -> Result<RunConfig, Error> {
    let config = match (preset_name, path) {
        (Some(name), None) => preset(name)?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            parse_config(&text)?
        }
        _ => return Err(Error::config("pass exactly one of --preset or --config")),
    };
    if config.mode == Mode::Convergence {
        return Err(Error::config(
            "config requests mode = convergence; use the `convergence` subcommand",
        ));
    }
    Ok(config)
}

fn simulate(config: &RunConfig, out: Option<PathBuf>) -> Result<(), Error> {
    let problem = config.problem()?;
    let steps = problem.n_steps()?;
    let out_dir = out.unwrap_or_else(|| PathBuf::from(&config.output_dir));

    let mut densities = DensitySeries::new(&problem.space);
    let mut snapshots = SnapshotSet::new(config.output_stride, steps);
    let mut observers: [&mut dyn StepObserver; 2] = [&mut densities, &mut snapshots];
    run(&problem, config.scheme, &mut observers)?;

    std::fs::create_dir_all(&out_dir).map_err(|e| Error::io(&out_dir, e))?;
    let density_path = out_dir.join("density.csv");
    write_density_csv(&densities, &density_path)?;
    let snapshot_paths = write_snapshots(&snapshots, &problem.space, &out_dir)?;
    println!(
        "{} species, {} steps to T = {}; wrote {} and {} snapshots to {}",
        problem.n_species(),
        steps,
        problem.t_end,
        density_path.display(),
        snapshot_paths.len(),
        out_dir.display()
    );
    Ok(())
}
