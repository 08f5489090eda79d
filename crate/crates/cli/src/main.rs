use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use decaylab::field::{stepanov_norm, v_norm, GridFn};
use decaylab::harness::{
    norms_csv, run_condition_report, run_experiment, BoxPerturbation, BumpConfig, DomainConfig,
    EntropyConfig, ExperimentConfig, InitialRecipe, NonDecayConfig, Report, Scenario,
    StefanSection,
};
use decaylab::model::{Directions, ModelConfig, ModelSpec};
use decaylab::solver::SolverConfig;
use decaylab::stefan::StefanConfig;
use decaylab::Error;

#[derive(Parser)]
#[command(
    name = "decaylab",
    version,
    about = "Long-time decay experiments for degenerate convection-diffusion equations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print F, the nd- and gn-conditions and the decay classification.
    CheckCondition {
        #[arg(long)]
        preset: String,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        mean: f64,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true)]
        range: Option<Vec<f64>>,
    },
    /// Evolve periodic (plus bump) data and print the norm table as CSV.
    Simulate(SimulateArgs),
    /// Build and verify the Stefan counterexample.
    Stefan(StefanArgs),
    /// Run any experiment config and print its report as JSON.
    DecayReport {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Norms of a grid function stored as `x,value` CSV.
    Norms {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        mean: f64,
        /// Treat the data as zero outside the grid instead of periodic.
        #[arg(long)]
        boxed: bool,
    },
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "burgers")]
    preset: String,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    mean: f64,
    #[arg(long, default_value_t = 0.5)]
    amplitude: f64,
    #[arg(long, default_value_t = 2.0)]
    length: f64,
    #[arg(long, default_value_t = 400)]
    n: usize,
    #[arg(long, default_value_t = 20.0)]
    t_end: f64,
    #[arg(long, default_value_t = 10)]
    samples: usize,
    /// Height of a bump `h (1 - s²)²` centred in the domain (0 for none).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    bump: f64,
    #[arg(long, default_value_t = 0.25)]
    bump_half_width: f64,
    /// Accumulate the entropy residual at k = mean and mean ± amplitude / 2.
    #[arg(long)]
    entropy: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StefanArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 400)]
    n_y: usize,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    refine: bool,
    /// Also run the perturbed problem with `v = -0.3` on `[2.2, 2.8]`.
    #[arg(long)]
    nondecay: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn simulate_config(a: &SimulateArgs) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(Scenario::Decay);
    cfg.model = ModelConfig {
        preset: Some(a.preset.clone()),
        ..Default::default()
    };
    cfg.mean = a.mean;
    cfg.domain = Some(DomainConfig {
        x_lo: -0.5 * a.length,
        length: a.length,
    });
    cfg.initial = Some(if a.bump != 0.0 {
        InitialRecipe::Perturbed {
            amplitude: a.amplitude,
            waves: 1,
            bump: BumpConfig {
                height: a.bump,
                center: 0.0,
                half_width: a.bump_half_width,
            },
        }
    } else {
        InitialRecipe::Periodic {
            amplitude: a.amplitude,
            waves: 1,
        }
    });
    cfg.solver = Some(SolverConfig::new(a.n, a.t_end).with_uniform_outputs(a.samples.max(1)));
    if a.entropy {
        let h = 0.5 * a.amplitude;
        cfg.entropy = Some(EntropyConfig {
            ks: vec![a.mean - h, a.mean, a.mean + h],
            windows: vec![[0.0, 0.25 * a.length]],
        });
    }
    cfg
}

fn stefan_config(a: &StefanArgs) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(Scenario::Stefan);
    cfg.stefan = Some(StefanSection {
        fixed: StefanConfig {
            alpha: a.alpha,
            n_y: a.n_y,
            t_end: a.t_end,
            ..Default::default()
        },
        refinement: a.refine,
        nondecay: a.nondecay.then(|| NonDecayConfig {
            perturbation: BoxPerturbation {
                value: -0.3,
                lo: 2.2,
                hi: 2.8,
            },
            periods: 2,
            solver: SolverConfig::new(800, 10.0).with_uniform_outputs(10),
        }),
        ..Default::default()
    });
    cfg
}

fn load_or(
    path: &Option<PathBuf>,
    build: impl FnOnce() -> ExperimentConfig,
) -> Result<ExperimentConfig, Error> {
    match path {
        Some(p) => ExperimentConfig::load(p).map_err(|e| match e {
            Error::Io(io) => Error::Config(format!("{}: {io}", p.display())),
            other => other,
        }),
        None => Ok(build()),
    }
}

fn with_out(mut cfg: ExperimentConfig, out: &Option<PathBuf>) -> ExperimentConfig {
    if out.is_some() {
        cfg.output_dir = out.clone();
    }
    cfg
}

fn print_failures(report: &Report) {
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    for r in report.failed_rules() {
        eprintln!(
            "FAILED {}: measured {} against threshold {}",
            r.rule, r.measured, r.threshold
        );
    }
}

fn status(report: &Report) -> ExitCode {
    print_failures(report);
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::CheckCondition {
            preset,
            mean,
            range,
        } => {
            let range = range.map_or((-1.0, 1.0), |r| (r[0], r[1]));
            let model = ModelSpec::preset(&preset, range)?;
            let c = run_condition_report(&model, &Directions::OneD, mean)?;
            println!("model: {} on [{}, {}]", c.model, c.range.0, c.range.1);
            println!("F = {}", c.f_set());
            println!("nd-condition: {}", c.nd_condition);
            println!("gn-condition: {}", c.gn_condition);
            println!("classification: {}", c.classification.as_str());
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate(a) => {
            let cfg = with_out(load_or(&a.config, || simulate_config(&a))?, &a.out);
            let report = run_experiment(&cfg)?;
            print!("{}", norms_csv(&report.samples));
            Ok(status(&report))
        }
        Command::Stefan(a) => {
            let cfg = with_out(load_or(&a.config, || stefan_config(&a))?, &a.out);
            let report = run_experiment(&cfg)?;
            for r in &report.rules {
                println!(
                    "{:<24} {:>14.6e} {:>14.6e} {}",
                    r.rule,
                    r.measured,
                    r.threshold,
                    if r.passed { "ok" } else { "FAILED" }
                );
            }
            Ok(status(&report))
        }
        Command::DecayReport { config, out } => {
            let cfg = with_out(load_or(&Some(config), || unreachable!())?, &out);
            let report = run_experiment(&cfg)?;
            println!("{}", report.to_json()?);
            Ok(status(&report))
        }
        Command::Norms {
            input,
            radius,
            mean,
            boxed,
        } => {
            let file = File::open(&input)
                .map_err(|e| Error::Config(format!("{}: {e}", input.display())))?;
            let u = GridFn::read_csv(BufReader::new(file), !boxed)?.map(|x| x - mean);
            println!("cells: {}", u.len());
            println!("l1: {}", u.l1_norm());
            println!("sup: {}", u.sup_norm());
            println!("stepanov_x: {}", stepanov_norm(&u, radius)?);
            println!(
                "v_norm(window = {}): {}",
                2.0 * radius,
                v_norm(&u, 2.0 * radius)?
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Parse(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
