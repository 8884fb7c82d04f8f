use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;

use pcp_core::certificate::{certify, CertifyOptions, TangentSubspace};
use pcp_core::harness::{emit_heatmap, format_g9, run_sweep_to_csv, SweepConfig};
use pcp_core::matrix::DenseMatrix;
use pcp_core::problem::{default_j0, lambda_classic, lambda_dense, ProblemInstance, SupportModel, SupportSet};
use pcp_core::solver::{pcp_solve, SolverConfig};

/// Exit status of a sweep that stopped before every cell was written.
const EXIT_PARTIAL: u8 = 2;

#[derive(Parser)]
#[command(name = "pcp", version, about = "Principal component pursuit with dense corruptions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic instance D = L0 + S0.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value = "exact", value_parser = SupportModel::from_str)]
        model: SupportModel,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_l0: PathBuf,
        #[arg(long)]
        out_s0: PathBuf,
        #[arg(long)]
        out_d: PathBuf,
    },
    /// Split D into low-rank and sparse parts.
    Solve {
        #[arg(long)]
        d: PathBuf,
        /// `<value>`, `dense:<rho>,<C1>` or `classic`
        #[arg(long, value_parser = LambdaArg::from_str)]
        lambda: LambdaArg,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iters: Option<usize>,
        #[arg(long)]
        out_l: Option<PathBuf>,
        #[arg(long)]
        out_s: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Build the dual certificate for (L0, S0) and check it.
    Certify {
        #[arg(long)]
        l0: PathBuf,
        #[arg(long)]
        s0: PathBuf,
        #[arg(long, value_parser = LambdaArg::from_str)]
        lambda: LambdaArg,
        /// Number of golfing batches, or `auto` for 2⌈ln n⌉.
        #[arg(long, default_value = "auto")]
        j0: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run a phase-transition sweep.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_csv: Option<PathBuf>,
        #[arg(long)]
        out_pgm: Option<PathBuf>,
        /// Continue from this CSV; its sidecar must match the config.
        #[arg(long)]
        resume: Option<PathBuf>,
        #[arg(long, env = "PCP_JOBS")]
        jobs: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug)]
enum LambdaArg {
    Value(f64),
    Dense { rho: f64, c1: f64 },
    Classic,
}

impl FromStr for LambdaArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s == "classic" {
            return Ok(LambdaArg::Classic);
        }
        if let Some(rest) = s.strip_prefix("dense:") {
            let (rho, c1) = rest.split_once(',').ok_or("expected dense:<rho>,<C1>")?;
            let rho = rho.trim().parse().map_err(|_| format!("bad rho `{rho}`"))?;
            let c1 = c1.trim().parse().map_err(|_| format!("bad C1 `{c1}`"))?;
            return Ok(LambdaArg::Dense { rho, c1 });
        }
        match s.parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(LambdaArg::Value(v)),
            _ => Err(format!("expected a positive number, dense:<rho>,<C1> or classic, got `{s}`")),
        }
    }
}

impl LambdaArg {
    fn resolve(self, n: usize) -> Result<f64> {
        Ok(match self {
            LambdaArg::Value(v) => v,
            LambdaArg::Dense { rho, c1 } => lambda_dense(n, rho, c1)?,
            LambdaArg::Classic => lambda_classic(n),
        })
    }
}

#[derive(Serialize)]
struct GenSidecar<'a> {
    n: usize,
    r: usize,
    rho: f64,
    model: SupportModel,
    seed: u64,
    support_size: usize,
    l0: &'a Path,
    s0: &'a Path,
    d: &'a Path,
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load(path: &Path) -> Result<DenseMatrix> {
    DenseMatrix::load(path).with_context(|| format!("reading {}", path.display()))
}

fn sidecar_of(path: &Path) -> PathBuf {
    let mut p = path.as_os_str().to_owned();
    p.push(".json");
    PathBuf::from(p)
}

fn gen(n: usize, r: usize, rho: f64, model: SupportModel, seed: u64, out_l0: &Path, out_s0: &Path, out_d: &Path) -> Result<()> {
    let inst = ProblemInstance::generate(n, r, rho, model, seed)?;
    inst.l0.save(out_l0).with_context(|| format!("writing {}", out_l0.display()))?;
    inst.s0.save(out_s0).with_context(|| format!("writing {}", out_s0.display()))?;
    inst.d.save(out_d).with_context(|| format!("writing {}", out_d.display()))?;
    let sidecar = GenSidecar { n, r, rho, model, seed, support_size: inst.s0.count_nonzero(), l0: out_l0, s0: out_s0, d: out_d };
    write_json(&sidecar_of(out_d), &sidecar)?;
    println!("n={n} r={r} rho={rho} support={} seed={seed}", sidecar.support_size);
    Ok(())
}

fn solve(
    d: &Path,
    lambda: LambdaArg,
    tol: Option<f64>,
    max_iters: Option<usize>,
    out_l: Option<&Path>,
    out_s: Option<&Path>,
    report: Option<&Path>,
) -> Result<()> {
    let d = load(d)?;
    let lambda = lambda.resolve(d.rows())?;
    let mut cfg = SolverConfig::default();
    if let Some(tol) = tol {
        cfg.tol_feasibility = tol;
    }
    if let Some(max_iters) = max_iters {
        cfg.max_iters = max_iters;
    }
    let res = pcp_solve(&d, lambda, &cfg)?;
    if let Some(path) = out_l {
        res.l_hat.save(path).with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = out_s {
        res.s_hat.save(path).with_context(|| format!("writing {}", path.display()))?;
    }
    let summary = res.summary(lambda);
    if let Some(path) = report {
        write_json(path, &summary)?;
    }
    println!("{}", serde_json::to_string(&summary)?);
    Ok(())
}

fn certify_cmd(l0: &Path, s0: &Path, lambda: LambdaArg, j0: &str, seed: u64, report: Option<&Path>) -> Result<()> {
    let l0 = load(l0)?;
    let s0 = load(s0)?;
    if l0.shape() != s0.shape() || !l0.is_square() {
        bail!("L0 is {:?} and S0 is {:?}; both must be the same square shape", l0.shape(), s0.shape());
    }
    let n = l0.rows();
    let lambda = lambda.resolve(n)?;
    let j0 = match j0 {
        "auto" => default_j0(n),
        other => other.parse().with_context(|| format!("--j0 expects an integer or `auto`, got `{other}`"))?,
    };
    let t = TangentSubspace::from_matrix(&l0)?;
    let omega = SupportSet::support_of(&s0)?.sample_partition_given_support(j0, seed)?;
    let signs = s0.map(|x| if x == 0.0 { 0.0 } else { x.signum() });
    let cert = certify(&t, &omega, &signs, lambda, &CertifyOptions::default())?;
    if let Some(path) = report {
        write_json(path, &cert.report)?;
    }
    println!("{}", serde_json::to_string(&cert.report)?);
    Ok(())
}

fn sweep(config: &Path, out_csv: Option<&Path>, out_pgm: Option<&Path>, resume: Option<&Path>, jobs: Option<usize>) -> Result<ExitCode> {
    let cfg = SweepConfig::load(config).with_context(|| format!("loading {}", config.display()))?;
    let jobs = jobs.filter(|&j| j > 0).unwrap_or_else(|| cfg.jobs());
    let out_csv = out_csv.or(resume);
    let run = run_sweep_to_csv(&cfg, resume, out_csv, jobs)?;
    for agg in run.result.aggregates() {
        println!("n={} rho={} success={}/{}", agg.n, format_g9(agg.rho), agg.successes, agg.trials);
    }
    if let Some(err) = run.error {
        eprintln!("error: sweep stopped after {} cells: {err}", run.result.len());
        return Ok(ExitCode::from(EXIT_PARTIAL));
    }
    if let Some(path) = out_pgm {
        if let Err(err) = emit_heatmap(&run.result, path) {
            eprintln!("error: writing {}: {err}", path.display());
            return Ok(ExitCode::from(EXIT_PARTIAL));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen { n, r, rho, model, seed, out_l0, out_s0, out_d } => gen(n, r, rho, model, seed, &out_l0, &out_s0, &out_d)?,
        Command::Solve { d, lambda, tol, max_iters, out_l, out_s, report } => {
            solve(&d, lambda, tol, max_iters, out_l.as_deref(), out_s.as_deref(), report.as_deref())?
        }
        Command::Certify { l0, s0, lambda, j0, seed, report } => certify_cmd(&l0, &s0, lambda, &j0, seed, report.as_deref())?,
        Command::Sweep { config, out_csv, out_pgm, resume, jobs } => {
            return sweep(&config, out_csv.as_deref(), out_pgm.as_deref(), resume.as_deref(), jobs)
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors, which would read as a partial sweep
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { ExitCode::FAILURE } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
