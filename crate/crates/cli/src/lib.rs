//! Command-line front end: solve, generate, verify and bench.

pub mod bench;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use topstmin::engine::{self, csv_record, SolveResult, SolverConfig, Status, CSV_HEADER};
use topstmin::forge::{self, parse_manifest, InstanceCounts};
use topstmin::model::{
    check_solution, parse_instance, parse_solution, write_instance, write_solution, Instance,
    Variant,
};
use topstmin::separation::CutFamilies;

use bench::BenchRecord;

/// Environment variable naming the default solver config file.
pub const CONFIG_ENV: &str = "TOPSTMIN_CONFIG";

/// Extension of the instance files `bench` picks up.
pub const INSTANCE_EXT: &str = "topstmin";

#[derive(Debug, Parser)]
#[command(
    name = "topstmin",
    version,
    about = "Exact solver for the team orienteering problem with service times, mandatory and incompatible nodes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one instance and print its CSV row.
    Solve {
        instance: PathBuf,
        #[command(flatten)]
        opts: SolveOpts,
        /// Write the best solution found to this file.
        #[arg(long)]
        solution: Option<PathBuf>,
        /// Print the CSV header before the row.
        #[arg(long)]
        header: bool,
    },
    /// Run a generation manifest and print the summary CSV.
    Generate {
        manifest: PathBuf,
        /// Override the seed of every job.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check a solution file against an instance.
    Verify {
        instance: PathBuf,
        solution: PathBuf,
    },
    /// Solve every instance file in a directory and print the tables.
    Bench {
        directory: PathBuf,
        #[command(flatten)]
        opts: SolveOpts,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Formulation {
    Compact,
    Mixed,
}

#[derive(Debug, Clone, Args)]
pub struct SolveOpts {
    /// Solver config file (default: $TOPSTMIN_CONFIG if set).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Solve as variant P (logical pairs ignored) or PL.
    #[arg(long)]
    pub variant: Option<Variant>,
    #[arg(long, value_enum, default_value_t = Formulation::Compact)]
    pub formulation: Formulation,
    /// Cut families: `all`, `none` or a list such as `RI,SEC`.
    #[arg(long, conflicts_with = "no_cuts")]
    pub cuts: Option<CutFamilies>,
    /// Plain branch-and-bound without separation.
    #[arg(long)]
    pub no_cuts: bool,
    #[arg(long)]
    pub time_limit: Option<f64>,
    #[arg(long)]
    pub node_limit: Option<usize>,
    /// Accepted for symmetry with `generate`; the solver itself draws no
    /// random numbers.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Node-limited search with timing left out of the output.
    #[arg(long)]
    pub deterministic: bool,
}

impl SolveOpts {
    pub fn config(&self) -> Result<SolverConfig> {
        let path = self
            .config
            .clone()
            .or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
        let mut config = match path {
            Some(p) => {
                let text = fs::read_to_string(&p)
                    .with_context(|| format!("reading config {}", p.display()))?;
                SolverConfig::from_text(&text).with_context(|| format!("config {}", p.display()))?
            }
            None => SolverConfig::default(),
        };
        if let Some(c) = self.cuts {
            config.families = c;
        }
        if self.no_cuts {
            config.families = CutFamilies::NONE;
        }
        if let Some(t) = self.time_limit {
            config.time_limit = t;
        }
        if self.node_limit.is_some() {
            config.node_limit = self.node_limit;
        }
        if self.deterministic {
            config.deterministic = true;
        }
        config.validate()?;
        Ok(config)
    }

    pub fn prepare(&self, mut instance: Instance) -> Instance {
        if let Some(v) = self.variant {
            instance.variant = v;
            if v == Variant::P {
                instance.logical.clear();
            }
        }
        instance
    }

    pub fn run(&self, instance: &Instance, config: &SolverConfig) -> Result<SolveResult> {
        Ok(match self.formulation {
            Formulation::Compact => engine::solve(instance, config)?,
            Formulation::Mixed => engine::solve_mixed(instance, config)?,
        })
    }
}

fn read_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_instance(&text).with_context(|| format!("parsing {}", path.display()))
}

fn instance_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Runs a parsed command line. Returns the process exit code; errors map
/// to 1 in `main`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Solve {
            instance,
            opts,
            solution,
            header,
        } => cmd_solve(instance, opts, solution.as_deref(), *header, out),
        Command::Generate { manifest, seed } => cmd_generate(manifest, *seed, out),
        Command::Verify { instance, solution } => cmd_verify(instance, solution, out),
        Command::Bench {
            directory,
            opts,
            jobs,
            output,
        } => {
            let csv = cmd_bench(directory, opts, *jobs)?;
            match output {
                Some(path) => {
                    fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?
                }
                None => out.write_all(csv.as_bytes())?,
            }
            Ok(0)
        }
    }
}

/// Exit code of a finished solve: 0 when the run is conclusive.
pub fn status_code(status: Status) -> i32 {
    match status {
        Status::Opt | Status::Infs => 0,
        Status::NoOpt | Status::NoSols => 2,
    }
}

pub fn cmd_solve(
    path: &Path,
    opts: &SolveOpts,
    solution: Option<&Path>,
    header: bool,
    out: &mut dyn Write,
) -> Result<i32> {
    let config = opts.config()?;
    let instance = opts.prepare(read_instance(path)?);
    let result = opts.run(&instance, &config)?;
    if header {
        writeln!(out, "{CSV_HEADER}")?;
    }
    writeln!(
        out,
        "{}",
        csv_record(&instance_id(path), &instance, &result)
    )?;
    if let (Some(dest), Some(sol)) = (solution, &result.solution) {
        fs::write(dest, write_solution(sol))
            .with_context(|| format!("writing {}", dest.display()))?;
    }
    Ok(status_code(result.status))
}

pub fn cmd_verify(instance: &Path, solution: &Path, out: &mut dyn Write) -> Result<i32> {
    let instance = read_instance(instance)?;
    let text =
        fs::read_to_string(solution).with_context(|| format!("reading {}", solution.display()))?;
    let sol = parse_solution(&instance, &text)?;
    let report = check_solution(&instance, &sol);
    if report.is_feasible() {
        writeln!(out, "feasible profit {}", sol.profit)?;
        return Ok(0);
    }
    for v in &report.violations {
        writeln!(out, "{v}")?;
    }
    Ok(1)
}

pub const SUMMARY_HEADER: &str = "instance,scheme,seed,|N|,|A|,|M|,|I|,|C|,note";

/// Executes every manifest job; paths are relative to the manifest. A job
/// that fails is reported in the summary and the batch goes on. Exit code 1
/// if any job failed.
pub fn cmd_generate(manifest: &Path, seed: Option<u64>, out: &mut dyn Write) -> Result<i32> {
    let text =
        fs::read_to_string(manifest).with_context(|| format!("reading {}", manifest.display()))?;
    let mut jobs = parse_manifest(&text)?;
    let root = manifest.parent().unwrap_or(Path::new("."));
    writeln!(out, "{SUMMARY_HEADER}")?;
    let mut failed = false;
    for job in &mut jobs {
        if let Some(s) = seed {
            job.scheme.seed = s;
        }
        let id = instance_id(&job.out);
        let outcome = read_instance(&root.join(&job.base)).and_then(|base| {
            let generated = forge::generate(&base, &job.scheme)?;
            let dest = root.join(&job.out);
            if let Some(dir) = dest.parent() {
                fs::create_dir_all(dir)?;
            }
            fs::write(&dest, write_instance(&generated.instance)?)
                .with_context(|| format!("writing {}", dest.display()))?;
            Ok(generated)
        });
        let prefix = format!("{id},{},{}", job.scheme, job.scheme.seed);
        match outcome {
            Ok(g) => {
                let c = InstanceCounts::of(&g.instance);
                let mut notes = Vec::new();
                if g.repair.restored > 0 {
                    notes.push(format!("restored {} arcs", g.repair.restored));
                }
                if g.repair.conflict_warning {
                    notes.push("mandatory conflicts exceed fleet".to_string());
                }
                let note = if notes.is_empty() {
                    "ok".to_string()
                } else {
                    notes.join("; ")
                };
                writeln!(
                    out,
                    "{prefix},{},{},{},{},{},{note}",
                    c.nodes, c.arcs, c.mandatory, c.physical, c.logical
                )?;
            }
            Err(e) => {
                failed = true;
                let msg = format!("{e:#}").replace(',', ";");
                writeln!(out, "{prefix},NA,NA,NA,NA,NA,error: {msg}")?;
            }
        }
    }
    Ok(if failed { 1 } else { 0 })
}

/// Instance files of a directory, sorted by name.
pub fn instance_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
        let path = entry?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == INSTANCE_EXT) {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Solves the directory's instances in parallel and renders the bench CSV.
/// Row order does not depend on scheduling.
pub fn cmd_bench(dir: &Path, opts: &SolveOpts, jobs: Option<usize>) -> Result<String> {
    let config = opts.config()?;
    let files = instance_files(dir)?;
    if files.is_empty() {
        bail!("no .{INSTANCE_EXT} files in {}", dir.display());
    }
    let solve_one = |path: &PathBuf| -> Result<BenchRecord> {
        let instance = opts.prepare(read_instance(path)?);
        let result = opts
            .run(&instance, &config)
            .with_context(|| format!("solving {}", path.display()))?;
        Ok(BenchRecord::new(&instance_id(path), &instance, &result))
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()?;
    let records: Result<Vec<BenchRecord>> =
        pool.install(|| files.par_iter().map(solve_one).collect());
    Ok(bench::render(&mut records?))
}
