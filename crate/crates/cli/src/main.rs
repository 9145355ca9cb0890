use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cellbath::mean_field::{curie_temperature, effective_field, solve_gap, SolverOptions};
use cellbath_cli::config::{InitialState, RunConfig};
use cellbath_cli::recipes::{lookup, RunKind, RECIPES};
use cellbath_cli::run::{run, write_csv, RunOutput};
use cellbath_cli::sweep::{expand, run_sweep, Axis};
use cellbath_cli::verify::{run_verify, VerifyOptions};
use cellbath_cli::CliError;

#[derive(Parser)]
#[command(
    name = "cellbath",
    version,
    about = "Atom coupled to a mean-field ferromagnetic unit cell"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the mean-field gap equation and print m, the molecular field and the residual.
    Gap(ConfigArgs),
    /// Print the Curie temperature in units of J.
    Curie(ConfigArgs),
    /// Pure-dephasing time series (Ising coupling).
    Dephase(ConfigArgs),
    /// Atom density matrix under general coupling.
    Transition(ConfigArgs),
    /// Concurrence of a Bell pair, one cell per atom.
    Entangle(ConfigArgs),
    /// Cartesian parameter sweep, one CSV per configuration.
    Sweep(SweepArgs),
    /// Engine, oracle and figure checks plus printed-formula discrepancies.
    Verify {
        /// Oracle checks with at most three cell spins only.
        #[arg(long)]
        quick: bool,
    },
    /// Run a named figure preset.
    Recipe {
        name: Option<String>,
        /// List every preset.
        #[arg(long)]
        list: bool,
        /// Write CSV here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        n_points: Option<usize>,
    },
}

#[derive(Args, Clone, Default)]
struct ConfigArgs {
    /// Flat `key = value` file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    spin: Option<String>,
    #[arg(long)]
    coupling_sum: Option<f64>,
    #[arg(long)]
    eta: Option<usize>,
    #[arg(short = 'T', long)]
    temperature: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    hx: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    hy: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    hz: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    omega0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    n_points: Option<usize>,
    /// ground, plus or bell-pair
    #[arg(long)]
    initial: Option<InitialState>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// dephase, transition or entangle
    #[arg(long)]
    kind: String,
    /// `key=v1,v2,...`; repeat for more axes.
    #[arg(long = "vary", required = true)]
    vary: Vec<Axis>,
    #[arg(long)]
    out_dir: PathBuf,
    #[command(flatten)]
    base: ConfigArgs,
}

impl ConfigArgs {
    fn build(&self) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        if let Some(s) = &self.spin {
            cfg.set("spin", s)?;
        }
        let numbers = [
            ("coupling_sum", self.coupling_sum),
            ("temperature", self.temperature),
            ("hx", self.hx),
            ("hy", self.hy),
            ("hz", self.hz),
            ("omega0", self.omega0),
            ("alpha", self.alpha),
            ("gamma", self.gamma),
            ("lambda", self.lambda),
            ("t_max", self.t_max),
        ];
        for (key, v) in numbers {
            if let Some(v) = v {
                cfg.set(key, &v.to_string())?;
            }
        }
        if let Some(eta) = self.eta {
            cfg.eta = eta;
        }
        if let Some(n) = self.n_points {
            cfg.n_points = n;
        }
        if let Some(init) = self.initial {
            cfg.initial = Some(init);
        }
        if let Some(out) = &self.output {
            cfg.output = Some(out.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_kind(s: &str) -> Result<RunKind, CliError> {
    match s {
        "dephase" => Ok(RunKind::Dephase),
        "transition" => Ok(RunKind::Transition),
        "entangle" => Ok(RunKind::Entangle),
        other => Err(CliError::Config(format!(
            "unknown run kind '{other}' (expected dephase, transition or entangle)"
        ))),
    }
}

fn emit(out: &RunOutput, cfg: &RunConfig) -> Result<(), CliError> {
    for note in &out.notes {
        eprintln!("{note}");
    }
    match &cfg.output {
        Some(path) => write_csv(&out.table, BufWriter::new(File::create(path)?)),
        None => write_csv(&out.table, io::stdout().lock()),
    }
}

fn run_kind(kind: RunKind, cfg: &RunConfig) -> Result<(), CliError> {
    if let Some(w) = cfg.regime_warning() {
        eprintln!("{w}");
    }
    emit(&run(kind, cfg)?, cfg)
}

fn execute(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Gap(args) => {
            let cfg = args.build()?;
            if let Some(w) = cfg.regime_warning() {
                eprintln!("{w}");
            }
            let lat = cfg.lattice()?;
            let sol = solve_gap(&lat, cfg.field, cfg.thermal()?, SolverOptions::default())?;
            let b = effective_field(&sol, cfg.field, &lat).b;
            let mut out = io::stdout().lock();
            writeln!(out, "m = {:.16e}", sol.m)?;
            writeln!(
                out,
                "m_vec = [{:.16e}, {:.16e}, {:.16e}]",
                sol.m_vec[0], sol.m_vec[1], sol.m_vec[2]
            )?;
            writeln!(out, "b = [{:.16e}, {:.16e}, {:.16e}]", b[0], b[1], b[2])?;
            writeln!(out, "residual = {:.3e}", sol.residual)?;
            writeln!(out, "iterations = {}", sol.iterations)?;
            if !sol.converged {
                eprintln!("warning: gap solver did not reach its tolerance");
            }
        }
        Command::Curie(args) => {
            let cfg = args.build()?;
            println!("{}", curie_temperature(&cfg.lattice()?));
        }
        Command::Dephase(args) => run_kind(RunKind::Dephase, &args.build()?)?,
        Command::Transition(args) => run_kind(RunKind::Transition, &args.build()?)?,
        Command::Entangle(args) => run_kind(RunKind::Entangle, &args.build()?)?,
        Command::Sweep(args) => {
            let kind = parse_kind(&args.kind)?;
            let configs = expand(&args.base.build()?, &args.vary)?;
            let entries = run_sweep(kind, &configs, &args.out_dir)?;
            eprintln!("{} runs written to {}", entries.len(), args.out_dir.display());
        }
        Command::Verify { quick } => {
            let report = run_verify(VerifyOptions { quick })?;
            print!("{}", report.render());
            println!();
            for line in report.summary_lines() {
                println!("{line}");
            }
            if !report.all_passed() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Recipe {
            name,
            list,
            output,
            t_max,
            n_points,
        } => {
            if list || name.is_none() {
                for r in RECIPES {
                    println!("{:<9} {:<10} {}", r.name, r.kind.name(), r.caption);
                }
                return Ok(ExitCode::SUCCESS);
            }
            let recipe = lookup(name.as_deref().unwrap_or_default())?;
            let mut cfg = recipe.config();
            cfg.output = output;
            if let Some(t) = t_max {
                cfg.t_max = t;
            }
            if let Some(n) = n_points {
                cfg.n_points = n;
            }
            cfg.validate()?;
            eprintln!("{}: {}", recipe.name, recipe.caption);
            run_kind(recipe.kind, &cfg)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
