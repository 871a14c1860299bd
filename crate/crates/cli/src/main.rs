use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use morphsynth_cli::commands::{self, OptimizeOverrides};
use morphsynth_cli::Result;

#[derive(Parser)]
#[command(name = "morphsynth", version, about = "Serial robot design synthesis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the optimization campaigns of a campaign file.
    Optimize {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for evaluations (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Print a JSON summary instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Score a URDF model against a target set.
    Evaluate {
        model: PathBuf,
        targets: PathBuf,
        /// Campaign file whose `[ik]` table supplies the solver options.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Seed of the inverse-kinematics restarts.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Write the URDF of a genotype (JSON) in a search space.
    ExportUrdf {
        space: PathBuf,
        genotype: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "robot")]
        name: String,
    },
    /// Regenerate the plots of completed campaigns.
    Report { dir: PathBuf },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Optimize {
            config,
            seed,
            trials,
            out,
            jobs,
            json,
        } => {
            let overrides = OptimizeOverrides { seed, trials, out };
            let summaries = commands::with_jobs(jobs, || commands::optimize(&config, &overrides))??;
            if json {
                println!("{}", serde_json::to_string_pretty(&summaries).expect("serializable"));
            } else {
                for s in &summaries {
                    println!(
                        "n_joint={} trials={} feasible={} front={} best_e_x={} dir={}",
                        s.n_joint,
                        s.trials,
                        s.feasible,
                        s.front_size,
                        s.best_e_x.map_or("-".into(), |v| v.to_string()),
                        s.dir.display()
                    );
                }
            }
            Ok(())
        }
        Command::Evaluate {
            model,
            targets,
            config,
            seed,
            jobs,
            json,
        } => {
            let mut ik = match &config {
                Some(path) => commands::load_ik_options(path)?,
                None => Default::default(),
            };
            if let Some(seed) = seed {
                ik.seed = seed;
            }
            let report = commands::with_jobs(jobs, || commands::evaluate_files(&model, &targets, &ik))??;
            if json {
                println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
            } else {
                print!("{}", commands::format_report(&report));
            }
            Ok(())
        }
        Command::ExportUrdf {
            space,
            genotype,
            out,
            name,
        } => {
            let doc = commands::export_genotype(&space, &genotype, &name)?;
            commands::write_output(out.as_deref(), &doc)
        }
        Command::Report { dir } => {
            for r in commands::report(&dir)? {
                println!(
                    "{} ({} skeleton plots)",
                    r.scatter.display(),
                    r.skeletons.len()
                );
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

