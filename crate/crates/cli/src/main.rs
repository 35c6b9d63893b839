//! `mafia-sim`: run scenarios and the built-in experiments, solve
//! equilibria and analyze feedback loops.
//!
//! Exit status is 0 on success, 1 on model or run failures and 2 on usage or
//! configuration errors.

mod chart;
mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::thread;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mafia_dynamics::equilibrium::DEFAULT_TOLERANCE;
use mafia_dynamics::loops::{build_causal_graph, enumerate_loops, find_named_loops};
use mafia_dynamics::scenario::{classify_outcomes_detailed, ExperimentRun, OutcomeDetail};
use mafia_dynamics::{
    verify_fixed_point, Experiment, FixedPointResult, IntegrationConfig, Method, Scenario,
    ScenarioError, SimulationError,
};

/// Threshold of the directional outcome classification.
const SIGN_THRESHOLD: f64 = 0.01;

#[derive(Debug, Parser)]
#[command(
    name = "mafia-sim",
    version,
    about = "Peasant/bandit/mafia protection economy simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a scenario file from its equilibrium.
    Run {
        scenario: PathBuf,
        /// Start from the file's [initial] stocks instead of solving for equilibrium.
        #[arg(long)]
        from_initial: bool,
        #[command(flatten)]
        opts: RunOptions,
    },
    /// Run a built-in experiment, or `all` of them.
    Experiment {
        name: String,
        /// Fail unless every classified row matches the published outcome table.
        #[arg(long = "check-table-6.3")]
        check_table: bool,
        #[command(flatten)]
        opts: RunOptions,
    },
    /// Solve and verify the initial equilibrium of a scenario file.
    Equilibrium {
        scenario: PathBuf,
        #[command(flatten)]
        opts: RunOptions,
    },
    /// Build the causal graph and report its feedback loops.
    Loops {
        /// Also list the loops through this node.
        #[arg(long)]
        through: Option<String>,
        #[command(flatten)]
        opts: RunOptions,
    },
}

#[derive(Debug, Args)]
struct RunOptions {
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Step size in months.
    #[arg(long)]
    dt: Option<f64>,
    /// Integration method: euler or rk4.
    #[arg(long, default_value = "euler", value_parser = parse_method)]
    method: Method,
    /// Months between recorded samples.
    #[arg(long)]
    sample_interval: Option<f64>,
    /// Override the scenario horizon in months.
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Accepted for scripting; runs never draw random numbers.
    #[arg(long)]
    seedless: bool,
    /// Print the effective scenario file and exit.
    #[arg(long)]
    dump_scenario: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: SimulationError| e.to_string())
}

impl RunOptions {
    fn config(&self) -> Result<IntegrationConfig, Failure> {
        let defaults = IntegrationConfig::default();
        let config = IntegrationConfig {
            dt: self.dt.unwrap_or(defaults.dt),
            method: self.method,
            sample_interval: self.sample_interval.unwrap_or(defaults.sample_interval),
        };
        config.validate()?;
        Ok(config)
    }

    fn apply_horizon(&self, scenario: &mut Scenario) -> Result<(), Failure> {
        if let Some(h) = self.horizon {
            scenario.horizon = h;
            scenario.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Run(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Run(_) => 1,
            Failure::Usage(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Run(m) => m,
        }
    }
}

impl From<SimulationError> for Failure {
    fn from(e: SimulationError) -> Self {
        match e {
            SimulationError::Config(_) | SimulationError::Scenario(_) => {
                Failure::Usage(e.to_string())
            }
            SimulationError::Model(_) | SimulationError::NonFinite { .. } => {
                Failure::Run(e.to_string())
            }
        }
    }
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::Simulation(inner) => inner.into(),
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents)
        .map_err(|e| Failure::Run(format!("cannot write {}: {e}", path.display())))
}

fn prepare_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir)
        .map_err(|e| Failure::Run(format!("cannot create {}: {e}", dir.display())))
}

fn load_scenario(path: &Path) -> Result<Scenario, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    Scenario::from_toml(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Writes the trajectory, chart and equilibrium report of one run.
fn write_run(
    dir: &Path,
    scenario: &Scenario,
    run: &ExperimentRun,
    format: Format,
) -> Result<(), Failure> {
    let stem = file_stem(&scenario.name);
    match format {
        Format::Csv => write_file(
            &dir.join(format!("{stem}.csv")),
            &output::trajectory_csv(&run.trajectory),
        )?,
        Format::Json => write_file(
            &dir.join(format!("{stem}.json")),
            &output::trajectory_json(&scenario.name, &run.trajectory),
        )?,
    }
    write_file(
        &dir.join(format!("{stem}.svg")),
        &chart::trajectory_svg(&scenario.name, &run.trajectory),
    )?;
    write_file(
        &dir.join(format!("{stem}.equilibrium.txt")),
        &output::equilibrium_report(scenario, &run.equilibrium),
    )
}

fn cmd_run(path: &Path, from_initial: bool, opts: &RunOptions) -> Result<(), Failure> {
    let mut scenario = load_scenario(path)?;
    opts.apply_horizon(&mut scenario)?;
    if opts.dump_scenario {
        print!("{}", scenario.to_toml());
        return Ok(());
    }
    let config = opts.config()?;
    let run = if from_initial {
        let initial = scenario.initial_guess.ok_or_else(|| {
            Failure::Usage(format!(
                "{}: --from-initial needs an [initial] section",
                path.display()
            ))
        })?;
        let residuals = verify_fixed_point(&initial, &scenario.initial_params, DEFAULT_TOLERANCE);
        ExperimentRun {
            equilibrium: FixedPointResult {
                state: initial,
                converged: residuals.passed,
                residuals,
                months: 0.0,
            },
            trajectory: scenario.run_from(&initial, &config)?,
        }
    } else {
        scenario.run(&config)?
    };
    prepare_dir(&opts.out)?;
    write_run(&opts.out, &scenario, &run, opts.format)?;
    println!(
        "{}: {} samples written to {}",
        scenario.name,
        run.trajectory.samples.len(),
        opts.out.display()
    );
    Ok(())
}

struct ExperimentOutcome {
    experiment: Experiment,
    detail: OutcomeDetail,
}

fn run_experiment(
    e: Experiment,
    opts: &RunOptions,
    config: &IntegrationConfig,
) -> Result<ExperimentOutcome, Failure> {
    let mut scenario = e.scenario();
    opts.apply_horizon(&mut scenario)?;
    let run = scenario.run(config)?;
    let (pre, post) = e.comparison_windows();
    let detail = classify_outcomes_detailed(&run.trajectory, pre, post, SIGN_THRESHOLD)?;
    write_run(&opts.out, &scenario, &run, opts.format)?;
    write_file(
        &opts.out.join(format!("{}.signs.txt", e.name())),
        &output::signs_report(
            e.name(),
            pre,
            post,
            SIGN_THRESHOLD,
            &detail,
            Some(e.published_outcome()),
        ),
    )?;
    Ok(ExperimentOutcome {
        experiment: e,
        detail,
    })
}

fn cmd_experiment(name: &str, check_table: bool, opts: &RunOptions) -> Result<(), Failure> {
    let experiments: Vec<Experiment> = if name == "all" {
        Experiment::ALL.to_vec()
    } else {
        vec![name.parse::<Experiment>().map_err(|_| {
            Failure::Usage(format!(
                "unknown experiment `{name}`; valid names: {}, all",
                Experiment::valid_names()
            ))
        })?]
    };
    if opts.dump_scenario {
        for (i, e) in experiments.iter().enumerate() {
            let mut scenario = e.scenario();
            opts.apply_horizon(&mut scenario)?;
            if i > 0 {
                println!();
            }
            print!("{}", scenario.to_toml());
        }
        return Ok(());
    }
    let config = opts.config()?;
    prepare_dir(&opts.out)?;

    let results: Vec<Result<ExperimentOutcome, Failure>> = thread::scope(|scope| {
        let handles: Vec<_> = experiments
            .iter()
            .map(|&e| scope.spawn(move || run_experiment(e, opts, &config)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("experiment thread panicked"))
            .collect()
    });
    let outcomes = results.into_iter().collect::<Result<Vec<_>, _>>()?;

    let mut summary = String::from(
        "experiment,Peasants,Bandits,Mafia,Lawlessness,Economic integrity,published,match\n",
    );
    let mut mismatches = Vec::new();
    for o in &outcomes {
        let published = o.experiment.published_outcome();
        let matched = published == o.detail.signs;
        if !matched {
            mismatches.push(format!(
                "{} computed [{}] published [{}]",
                o.experiment, o.detail.signs, published
            ));
        }
        let cells: Vec<String> = o.detail.signs.row().iter().map(|s| s.to_string()).collect();
        summary.push_str(&format!(
            "{},{},{},{}\n",
            o.experiment,
            cells.join(","),
            published,
            if matched { "yes" } else { "no" }
        ));
    }
    if name == "all" {
        write_file(&opts.out.join("summary.txt"), &summary)?;
    }
    print!("{summary}");
    if check_table && !mismatches.is_empty() {
        return Err(Failure::Run(format!(
            "outcome table mismatch: {}",
            mismatches.join("; ")
        )));
    }
    Ok(())
}

fn cmd_equilibrium(path: &Path, opts: &RunOptions) -> Result<(), Failure> {
    let mut scenario = load_scenario(path)?;
    opts.apply_horizon(&mut scenario)?;
    if opts.dump_scenario {
        print!("{}", scenario.to_toml());
        return Ok(());
    }
    let fp = scenario.equilibrium()?;
    let report = output::equilibrium_report(&scenario, &fp);
    prepare_dir(&opts.out)?;
    write_file(
        &opts
            .out
            .join(format!("{}.equilibrium.txt", file_stem(&scenario.name))),
        &report,
    )?;
    print!("{report}");
    if fp.converged {
        Ok(())
    } else {
        Err(Failure::Run(format!(
            "{}: equilibrium not converged (max residual {:e})",
            scenario.name,
            fp.max_residual()
        )))
    }
}

fn cmd_loops(through: Option<&str>, opts: &RunOptions) -> Result<(), Failure> {
    let g = build_causal_graph();
    if let Some(node) = through {
        if g.node_index(node).is_none() {
            return Err(Failure::Usage(format!("unknown node `{node}`")));
        }
    }
    prepare_dir(&opts.out)?;
    let report = output::loops_report(&g);
    write_file(&opts.out.join("loops.txt"), &report)?;
    write_file(&opts.out.join("graph.csv"), &g.to_edge_list())?;
    write_file(&opts.out.join("graph.dot"), &g.to_dot())?;
    print!("{report}");
    if let Some(node) = through {
        let loops = enumerate_loops(&g, Some(node));
        println!("\nloops through {node}: {}", loops.len());
        for lp in loops {
            println!("  {lp}");
        }
    }
    let named = find_named_loops(&g);
    if named.all_ok() {
        Ok(())
    } else {
        Err(Failure::Run(format!(
            "named loop check failed: {}",
            named.to_string().trim().replace('\n', "; ")
        )))
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Run {
            scenario,
            from_initial,
            opts,
        } => cmd_run(scenario, *from_initial, opts),
        Command::Experiment {
            name,
            check_table,
            opts,
        } => cmd_experiment(name, *check_table, opts),
        Command::Equilibrium { scenario, opts } => cmd_equilibrium(scenario, opts),
        Command::Loops { through, opts } => cmd_loops(through.as_deref(), opts),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("{first}");
            return ExitCode::from(2);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message().replace('\n', "; "));
            ExitCode::from(f.code())
        }
    }
}
