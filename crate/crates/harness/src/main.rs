use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lfsgd::{ProblemConfig, RuleKind, SamplerKind};
use lfsgd_harness::{
    compare_optimizers, run_single, run_sweep, HarnessError, RunConfig, SweepGrid, DEFAULT_BETAS,
    DEFAULT_RHOS,
};

#[derive(Parser)]
#[command(
    name = "lfsgd",
    version,
    about = "Learning-rate-free subgradient experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One seeded run.
    Run {
        #[command(flatten)]
        run: RunArgs,
    },
    /// ρ × β grid over several seeds.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated ρ values.
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_RHOS.to_vec())]
        rhos: Vec<f64>,
        /// Comma-separated β values.
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_BETAS.to_vec())]
        betas: Vec<f64>,
        /// Comma-separated seeds; defaults to five seeds starting at the run seed.
        #[arg(long, value_delimiter = ',')]
        seeds: Vec<u64>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Same problem, seed and permutations under several rules.
    Compare {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated rules, one arm each.
        #[arg(long, value_delimiter = ',', default_values_t = ["dog".to_string(), "dowg".into(), "lfm".into(), "constant".into()])]
        rules: Vec<String>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    rule: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    rho: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    eps0: Option<f64>,
    /// Mini-batch size; values above 1 switch to mini-batch reshuffling.
    #[arg(long)]
    batch: Option<usize>,
    #[arg(long)]
    epochs: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    record_every: Option<u64>,
    /// Comma-separated monitor names.
    #[arg(long, value_delimiter = ',')]
    monitors: Option<Vec<String>>,
    /// Exit with status 4 when any monitor fails.
    #[arg(long)]
    strict: bool,
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig, HarnessError> {
        let mut c = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        if let Some(name) = &self.problem {
            if c.problem.name() != name {
                c.problem = ProblemConfig::by_name(name)?;
            }
        }
        if let Some(rule) = &self.rule {
            c.optimizer.rule = RuleKind::parse(rule)?;
        }
        if let Some(v) = self.rho {
            c.optimizer.rho = v;
        }
        if let Some(v) = self.beta {
            c.optimizer.beta = v;
        }
        if let Some(v) = self.eps0 {
            c.optimizer.eps0 = v;
        }
        if let Some(b) = self.batch {
            c.sampler.batch = b;
            if b > 1 {
                c.sampler.kind = SamplerKind::MinibatchReshuffle;
            }
        }
        if let Some(v) = self.epochs {
            c.epochs = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = &self.out {
            c.out = Some(v.clone());
        }
        if let Some(v) = self.record_every {
            c.record_every = v;
        }
        if let Some(v) = &self.monitors {
            c.monitors = v.clone();
        }
        c.validate()?;
        Ok(c)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command) -> Result<(), HarnessError> {
    match command {
        Command::Run { run } => {
            let config = run.resolve()?;
            let record = run_single(&config)?;
            println!(
                "{} {} epochs={} steps={} final_f={} wall_ms={}",
                record.manifest.problem_name,
                config.optimizer.rule.as_str(),
                config.epochs,
                record.summary.total_steps,
                record.final_f(),
                record.wall_clock_ms
            );
            for m in &record.monitors {
                println!("monitor {} {:?}: {}", m.name, m.verdict, m.note);
            }
            if run.strict {
                if let Some(m) = record.failed_monitor() {
                    return Err(HarnessError::MonitorFailed {
                        name: m.name.clone(),
                        note: m.note.clone(),
                    });
                }
            }
            Ok(())
        }
        Command::Sweep {
            run,
            rhos,
            betas,
            seeds,
            jobs,
        } => {
            let config = run.resolve()?;
            let seeds = if seeds.is_empty() {
                (config.seed..config.seed + 5).collect()
            } else {
                seeds
            };
            let grid = SweepGrid { rhos, betas };
            let summary = run_sweep(&config, &grid, &seeds, jobs, config.out.as_deref())?;
            println!("rho,beta,runs,failures,mean_final_f,std_final_f");
            for r in &summary.rows {
                println!(
                    "{},{},{},{},{},{}",
                    r.rho,
                    r.beta,
                    r.runs,
                    r.failures,
                    r.mean_final_f.map(|v| v.to_string()).unwrap_or_default(),
                    r.std_final_f.map(|v| v.to_string()).unwrap_or_default()
                );
            }
            Ok(())
        }
        Command::Compare { run, rules } => {
            let base = run.resolve()?;
            let configs = rules
                .iter()
                .map(|r| {
                    let mut c = base.clone();
                    c.optimizer.rule = RuleKind::parse(r)?;
                    Ok(c)
                })
                .collect::<Result<Vec<_>, HarnessError>>()?;
            let (comparison, _) = compare_optimizers(&configs, base.out.as_deref())?;
            for arm in &comparison.arms {
                println!("{} final_f={}", arm.label, arm.final_f);
            }
            Ok(())
        }
    }
}
