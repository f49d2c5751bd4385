use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use submod_kparity::analysis::{default_d, prune_down_monotone, verify_run};
use submod_kparity::bench::{
    brute_force_opt, generate_instance, greedy_baseline, run_experiment, write_csv, write_json, BaseMatroidKind,
    ExperimentSpec, GenParams, GeneratorKind, InstanceSpec, ObjectiveFamily, SolverMode,
};
use submod_kparity::nonmonotone::{repetitions, RepetitionsConfig};
use submod_kparity::solver::{run_efficient, run_reference, RunTrace};
use submod_kparity::{Scalar, SolverConfig, ValueOracle};

#[derive(Parser)]
#[command(name = "kparity", version, about = "Submodular maximization under k-parity constraints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Precision {
    F64,
    F32,
}

#[derive(Subcommand)]
enum Command {
    /// Run one solver on an instance and write its trace or result as JSON.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value = "hybrid")]
        mode: SolverMode,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Rounds for the nonmonotone mode; defaults to ceil(4 k^(2/3)).
        #[arg(long)]
        ell: Option<usize>,
        #[arg(long, value_enum, default_value = "f64")]
        precision: Precision,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the charging inequalities for a hybrid trace against a reference set.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        trace: PathBuf,
        /// Reference set as a JSON array of edge ids; defaults to the exhaustive optimum.
        #[arg(long)]
        reference: Option<String>,
        /// Defaults to 2 sqrt(k).
        #[arg(long)]
        d: Option<f64>,
        #[arg(long, value_enum, default_value = "f64")]
        precision: Precision,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run solvers over instances and write one CSV row per (instance, solver, trial).
    Bench {
        /// Instance files; may be repeated.
        #[arg(long)]
        instance: Vec<PathBuf>,
        /// Generate instances instead of (or in addition to) reading them.
        #[arg(long, value_parser = kebab::<GeneratorKind>)]
        gen: Option<GeneratorKind>,
        /// Number of generated instances, seeded `seed..seed+count`.
        #[arg(long, default_value_t = 10)]
        count: u64,
        #[command(flatten)]
        params: GenArgs,
        /// Comma-separated solver modes.
        #[arg(long, value_delimiter = ',', default_value = "hybrid,greedy")]
        mode: Vec<SolverMode>,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long)]
        ell: Option<usize>,
        /// Skip the exhaustive optimum.
        #[arg(long)]
        no_opt: bool,
        /// Write 0 in the millis column so reruns are byte-identical.
        #[arg(long)]
        no_timing: bool,
        /// CSV path; a JSON report with summary is written next to it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a seeded random instance as JSON.
    Gen {
        #[arg(long, default_value = "random-parity", value_parser = kebab::<GeneratorKind>)]
        kind: GeneratorKind,
        #[command(flatten)]
        params: GenArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct GenArgs {
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long = "edges", default_value_t = 8)]
    n_edges: usize,
    #[arg(long, default_value = "uniform", value_parser = kebab::<BaseMatroidKind>)]
    base: BaseMatroidKind,
    #[arg(long, default_value = "modular", value_parser = kebab::<ObjectiveFamily>)]
    objective: ObjectiveFamily,
    #[arg(long, default_value_t = 10)]
    max_weight: u32,
    #[arg(long)]
    side: Option<usize>,
    #[arg(long)]
    universe: Option<usize>,
}

impl GenArgs {
    fn params(&self) -> GenParams {
        GenParams {
            k: self.k,
            n_edges: self.n_edges,
            side: self.side,
            universe: self.universe,
            base: self.base,
            objective: self.objective,
            max_weight: self.max_weight,
            items: None,
        }
    }
}

fn kebab<T: serde::de::DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(json!(s)).map_err(|_| format!("unrecognised value {s:?}"))
}

fn open_out(out: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit(value: &impl serde::Serialize, out: Option<&Path>) -> anyhow::Result<()> {
    let mut w = open_out(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn load<T: Scalar>(path: &Path) -> anyhow::Result<InstanceSpec<T>> {
    InstanceSpec::load(path).with_context(|| format!("reading instance {}", path.display()))
}

fn solve<T: Scalar>(
    instance: &Path,
    mode: SolverMode,
    epsilon: f64,
    seed: u64,
    ell: Option<usize>,
    out: Option<&Path>,
) -> anyhow::Result<()> {
    let inst = load::<T>(instance)?.build()?;
    let (f, c) = (&inst.objective, &inst.constraint);
    let config = SolverConfig::new(epsilon, seed);
    match mode {
        SolverMode::Hybrid => emit(&run_efficient::<T, _>(f, c, &config)?, out),
        SolverMode::HybridReference => emit(&run_reference::<T, _>(f, c, &config)?, out),
        SolverMode::Greedy => {
            let set = greedy_baseline(f, c);
            let value = f.value(&set);
            emit(&json!({ "solver": "greedy", "output": set, "value": value.as_f64() }), out)
        }
        SolverMode::Nonmonotone => {
            let mut cfg = RepetitionsConfig::for_k(c.k(), seed);
            cfg.epsilon = epsilon;
            if let Some(ell) = ell {
                cfg.ell = ell;
            }
            emit(&repetitions::<T, _>(f, c, &cfg)?, out)
        }
    }
}

fn verify<T: Scalar>(
    instance: &Path,
    trace: &Path,
    reference: Option<&str>,
    d: Option<f64>,
    out: Option<&Path>,
) -> anyhow::Result<bool> {
    let inst = load::<T>(instance)?.build()?;
    let (f, c) = (&inst.objective, &inst.constraint);
    let text = std::fs::read_to_string(trace).with_context(|| format!("reading trace {}", trace.display()))?;
    let trace: RunTrace<T> = serde_json::from_str(&text).context("parsing trace JSON")?;
    let o = match reference {
        Some(s) => serde_json::from_str::<Vec<usize>>(s).context("parsing --reference")?,
        None => brute_force_opt(f, c)?.0,
    };
    let o = prune_down_monotone(f, &o);
    let d = d.unwrap_or_else(|| default_d(c.k()).max(2.0));
    let report = verify_run(&trace, f, c, &o, T::lit(d))?;
    emit(&report, out)?;
    Ok(report.passed())
}

#[allow(clippy::too_many_arguments)]
fn bench(
    instances: &[PathBuf],
    gen: Option<GeneratorKind>,
    count: u64,
    params: &GenParams,
    modes: Vec<SolverMode>,
    epsilon: f64,
    seed: u64,
    trials: usize,
    ell: Option<usize>,
    compute_opt: bool,
    timing: bool,
    out: Option<&Path>,
) -> anyhow::Result<()> {
    let mut built = Vec::new();
    for p in instances {
        let mut spec = load::<f64>(p)?;
        if spec.id.is_none() {
            spec.id = p.file_stem().map(|s| s.to_string_lossy().into_owned());
        }
        built.push(spec.build()?);
    }
    if let Some(kind) = gen {
        for s in seed..seed + count {
            built.push(generate_instance(kind, params, s)?.build()?);
        }
    }
    if modes.is_empty() {
        bail!("no solver modes given");
    }
    let spec = ExperimentSpec { instances: built, modes, trials, epsilon, seed, ell, compute_opt, timing };
    let rows = run_experiment(&spec)?;
    write_csv(&rows, open_out(out)?)?;
    if let Some(p) = out {
        let json_path = p.with_extension("json");
        write_json(&rows, BufWriter::new(File::create(&json_path)?))?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Solve { instance, mode, epsilon, seed, ell, precision, out } => {
            match precision {
                Precision::F64 => solve::<f64>(&instance, mode, epsilon, seed, ell, out.as_deref())?,
                Precision::F32 => solve::<f32>(&instance, mode, epsilon, seed, ell, out.as_deref())?,
            }
            Ok(true)
        }
        Command::Verify { instance, trace, reference, d, precision, out } => match precision {
            Precision::F64 => verify::<f64>(&instance, &trace, reference.as_deref(), d, out.as_deref()),
            Precision::F32 => verify::<f32>(&instance, &trace, reference.as_deref(), d, out.as_deref()),
        },
        Command::Bench {
            instance,
            gen,
            count,
            params,
            mode,
            epsilon,
            seed,
            trials,
            ell,
            no_opt,
            no_timing,
            out,
        } => {
            bench(
                &instance,
                gen,
                count,
                &params.params(),
                mode,
                epsilon,
                seed,
                trials,
                ell,
                !no_opt,
                !no_timing,
                out.as_deref(),
            )?;
            Ok(true)
        }
        Command::Gen { kind, params, seed, out } => {
            emit(&generate_instance(kind, &params.params(), seed)?, out.as_deref())?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
