use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use gmdtsp::bnc::{self, Config, Status};
use gmdtsp::instance::{derive_gmdtsp, parse_instance, Instance};
use gmdtsp::model::{check_feasible, IntegerSolution, SolutionFile, VariableMap};
use gmdtsp::preprocess;
use gmdtsp::report::RunReport;
use gmdtsp::oracle;

/// Worker threads for separation and strong branching.
const THREADS_ENV: &str = "GMDTSP_THREADS";

#[derive(Parser)]
#[command(name = "gmdtsp", about = "Branch-and-cut solver for the generalized multiple-depot TSP")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one instance and write its JSON report.
    Solve {
        file: PathBuf,
        #[arg(long)]
        depots: usize,
        #[arg(long, default_value_t = 7200.0)]
        time_limit: f64,
        #[arg(long)]
        no_preprocess: bool,
        /// Report path; printed to stdout when absent.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Run every separation family in each round.
        #[arg(long)]
        all_families: bool,
        /// Write the final root LP in LP text format.
        #[arg(long)]
        dump_lp: Option<PathBuf>,
    },
    /// Exhaustive optimum of a small instance.
    Oracle {
        file: PathBuf,
        #[arg(long)]
        depots: usize,
    },
    /// Check a solution (plain solution file or run report).
    Validate {
        file: PathBuf,
        #[arg(long)]
        depots: usize,
        #[arg(long)]
        solution: PathBuf,
    },
    /// Aggregate run reports in a directory into bounds.csv and timing.csv.
    Report {
        dir: PathBuf,
        /// Output directory, defaults to `dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(file: &Path, depots: usize) -> Result<Instance> {
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let raw = parse_instance(&text).with_context(|| format!("parsing {}", file.display()))?;
    Ok(derive_gmdtsp(&raw, depots)?)
}

fn solve(
    file: &Path,
    depots: usize,
    config: Config,
    no_preprocess: bool,
    json: Option<&Path>,
    dump_lp: Option<&Path>,
) -> Result<Status> {
    let inst = load(file, depots)?;
    let (inst, log) = if no_preprocess {
        (inst, None)
    } else {
        let (red, log) = preprocess::reduce(&inst);
        log::info!("{}: {} -> {} targets", inst.name(), log.original_size, log.reduced_size);
        (red, Some(log))
    };
    let outcome = bnc::solve(&inst, &config);
    if let (Some(path), Some(text)) = (dump_lp, &outcome.root_lp) {
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    let report = RunReport::new(&inst, &outcome, log);
    let text = serde_json::to_string_pretty(&report)?;
    match json {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => println!("{text}"),
    }
    eprintln!(
        "{}: {:?} objective {} nodes {} in {:.2}s",
        report.name,
        report.status,
        report.objective.map_or("-".into(), |c| c.to_string()),
        report.stats.nodes,
        report.stats.total_time
    );
    Ok(outcome.status)
}

fn validate(file: &Path, depots: usize, solution: &Path) -> Result<i64> {
    let inst = load(file, depots)?;
    let text = fs::read_to_string(solution).with_context(|| format!("reading {}", solution.display()))?;
    let sol: SolutionFile = match serde_json::from_str::<SolutionFile>(&text) {
        Ok(s) => s,
        Err(_) => {
            let rep: RunReport = serde_json::from_str(&text).context("neither a solution nor a run report")?;
            rep.solution.context("report carries no solution")?
        }
    };
    let cycles = sol.to_cycles(&inst).map_err(anyhow::Error::msg)?;
    let map = VariableMap::new(&inst);
    let built = IntegerSolution::from_cycles(&inst, &map, cycles);
    let checked = check_feasible(&inst, &map, &built.x, &built.y).map_err(|v| anyhow::anyhow!("infeasible: {v}"))?;
    if checked.cost != sol.cost {
        bail!("stated cost {} but the cycles cost {}", sol.cost, checked.cost);
    }
    Ok(checked.cost)
}

fn report(dir: &Path, out: &Path) -> Result<usize> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut reports = Vec::new();
    for p in &paths {
        let text = fs::read_to_string(p)?;
        match serde_json::from_str::<RunReport>(&text) {
            Ok(r) => reports.push(r),
            Err(e) => log::warn!("skipping {}: {e}", p.display()),
        }
    }
    let mut bounds = csv::Writer::from_path(out.join("bounds.csv"))?;
    let mut timing = csv::Writer::from_path(out.join("timing.csv"))?;
    for r in &reports {
        bounds.serialize(r.bounds_row())?;
        timing.serialize(r.timing_row())?;
    }
    bounds.flush()?;
    timing.flush()?;
    Ok(reports.len())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Solve {
            file,
            depots,
            time_limit,
            no_preprocess,
            json,
            all_families,
            dump_lp,
        } => {
            let config = Config {
                time_limit,
                all_families,
                dump_root_lp: dump_lp.is_some(),
                ..Config::default()
            };
            let status = solve(&file, depots, config, no_preprocess, json.as_deref(), dump_lp.as_deref())?;
            Ok(match status {
                Status::Optimal => ExitCode::SUCCESS,
                Status::TimeLimit => ExitCode::from(2),
                Status::Infeasible => ExitCode::from(1),
            })
        }
        Cmd::Oracle { file, depots } => {
            let inst = load(&file, depots)?;
            if inst.num_targets() > 10 {
                bail!("oracle is limited to 10 targets, {} has {}", inst.name(), inst.num_targets());
            }
            let cost = oracle::optimal_cost(&inst).context("instance has no feasible solution")?;
            println!("{cost}");
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Validate { file, depots, solution } => {
            let cost = validate(&file, depots, &solution)?;
            println!("feasible, cost {cost}");
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Report { dir, out } => {
            let out = out.unwrap_or_else(|| dir.clone());
            let n = report(&dir, &out)?;
            println!("aggregated {n} runs into {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Ok(n) = std::env::var(THREADS_ENV) {
        std::env::set_var("RAYON_NUM_THREADS", n);
    }
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
