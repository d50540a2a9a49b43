use std::fs::{self, File};
use std::io::{self, BufWriter};
use std::path::{Path, PathBuf};
use std::time::Instant;

use mpcore::linalg::{lu_factor_pp, lu_solve, max_rel_err, KernelPath, Kernels};
use mpcore::matfile::{load_matrix, load_vector, save_matrix, save_vector};
use mpcore::refine::{iterative_refinement, RefineConfig};
use mpcore::testgen::{build_system, LinearSystem, ProblemSpec};
use mpcore::{BigFloat, Execution, PrecisionContext, PrecisionTag};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::args::{
    BenchArgs, Cli, Command, DirectArgs, GenArgs, OutputArgs, ProblemArgs, RefineArgs, RefineFlags, SourceArgs,
};
use crate::report::{write_rows, Row};
use crate::CliError;

pub const A_FILE: &str = "A.mpmat";
pub const B_FILE: &str = "b.mpmat";
pub const X_FILE: &str = "x_true.mpmat";
pub const META_FILE: &str = "meta.json";

/// Digits printed for `max_rel_err`.
const ERR_DIGITS: usize = 17;

/// Generation parameters stored next to the matrix files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemMeta {
    pub n: usize,
    pub seed: u64,
    pub seed_used: u64,
    pub cond_exponent: u32,
    pub gen_bits: u32,
    pub long_bits: u32,
}

/// A loaded or generated system at its long precision.
#[derive(Clone, Debug)]
pub struct Problem {
    pub system: LinearSystem,
    pub ctx: PrecisionContext,
    pub seed: Option<u64>,
}

/// Runs a parsed command line. `Ok(0)` when every row succeeded, `Ok(1)` when
/// some row failed.
pub fn run(cli: &Cli) -> Result<u8, CliError> {
    match &cli.command {
        Command::Gen(a) => cmd_gen(a).map(|_| 0),
        Command::Direct(a) => emit(&[cmd_direct(a)?], &a.output),
        Command::Refine(a) => emit(&[cmd_refine(a)?], &a.output),
        Command::Bench(a) => emit(&cmd_bench(a)?, &a.output),
    }
}

fn emit(rows: &[Row], out: &OutputArgs) -> Result<u8, CliError> {
    match &out.out {
        Some(path) => write_rows(BufWriter::new(File::create(path)?), rows, out.format)?,
        None => write_rows(io::stdout().lock(), rows, out.format)?,
    }
    Ok(if rows.iter().all(Row::is_ok) { 0 } else { 1 })
}

fn long_ctx(bits: u32) -> Result<PrecisionContext, CliError> {
    PrecisionContext::new(bits).map_err(|e| CliError::Usage(format!("--long-bits: {e}")))
}

fn spec_of(p: &ProblemArgs) -> Result<ProblemSpec, CliError> {
    let spec = ProblemSpec { n: p.n, seed: p.seed, cond_exponent: p.cond_exponent, gen_bits: p.gen_bits };
    spec.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(spec)
}

fn generate(p: &ProblemArgs, ctx: &PrecisionContext) -> Result<(LinearSystem, SystemMeta), CliError> {
    let spec = spec_of(p)?;
    if ctx.bits() > spec.gen_bits {
        return Err(CliError::Usage(format!(
            "--long-bits {} exceeds --gen-bits {}",
            ctx.bits(),
            spec.gen_bits
        )));
    }
    let g = build_system(&spec)?;
    let meta = SystemMeta {
        n: spec.n,
        seed: spec.seed,
        seed_used: g.seed_used,
        cond_exponent: spec.cond_exponent,
        gen_bits: spec.gen_bits,
        long_bits: ctx.bits(),
    };
    Ok((g.export(ctx)?, meta))
}

pub fn cmd_gen(a: &GenArgs) -> Result<PathBuf, CliError> {
    let ctx = long_ctx(a.long_bits)?;
    let (sys, meta) = generate(&a.problem, &ctx)?;
    fs::create_dir_all(&a.out)?;
    save_matrix(&a.out.join(A_FILE), &sys.a, &ctx)?;
    save_vector(&a.out.join(B_FILE), &sys.b, &ctx)?;
    save_vector(&a.out.join(X_FILE), &sys.x_true, &ctx)?;
    fs::write(a.out.join(META_FILE), serde_json::to_string_pretty(&meta)? + "\n")?;
    Ok(a.out.clone())
}

/// Reads the files written by `gen`. `meta.json` is optional.
pub fn load_system(dir: &Path) -> Result<Problem, CliError> {
    let (a, ctx) = load_matrix::<BigFloat>(&dir.join(A_FILE))?;
    let (b, cb) = load_vector::<BigFloat>(&dir.join(B_FILE))?;
    let (x_true, cx) = load_vector::<BigFloat>(&dir.join(X_FILE))?;
    if cb != ctx || cx != ctx {
        return Err(CliError::Report("system files disagree on precision".into()));
    }
    if !a.is_square() || b.len() != a.rows() || x_true.len() != a.rows() {
        return Err(mpcore::Error::DimensionMismatch { expected: a.rows(), found: b.len() }.into());
    }
    let meta_path = dir.join(META_FILE);
    let seed = if meta_path.exists() {
        let meta: SystemMeta = serde_json::from_str(&fs::read_to_string(meta_path)?)?;
        Some(meta.seed)
    } else {
        None
    };
    Ok(Problem { system: LinearSystem { a, b, x_true }, ctx, seed })
}

fn obtain(src: &SourceArgs, long_bits: u32) -> Result<Problem, CliError> {
    match &src.sys {
        Some(dir) => load_system(dir),
        None => {
            let ctx = long_ctx(long_bits)?;
            let (system, meta) = generate(&src.problem, &ctx)?;
            Ok(Problem { system, ctx, seed: Some(meta.seed) })
        }
    }
}

fn kernels(path: KernelPath) -> Kernels {
    Kernels { path, exec: Execution::Sequential }
}

fn fmt_err(e: &BigFloat) -> String {
    e.format_decimal(ERR_DIGITS)
}

/// Wall-clock seconds of factor + solve and the resulting Max.RE.
pub fn direct_solve(p: &Problem, tag: PrecisionTag, path: KernelPath) -> mpcore::Result<(f64, BigFloat)> {
    match tag.components() {
        2 => direct_k::<2>(p, path),
        3 => direct_k::<3>(p, path),
        _ => direct_k::<4>(p, path),
    }
}

fn direct_k<const K: usize>(p: &Problem, path: KernelPath) -> mpcore::Result<(f64, BigFloat)> {
    let mut a = p.system.a.to_multicomp::<K>()?;
    let b = p.system.b.to_multicomp::<K>()?;
    let start = Instant::now();
    let piv = lu_factor_pp(&mut a, &(), kernels(path))?;
    let x = lu_solve(&a, &piv, &b, &())?;
    let secs = start.elapsed().as_secs_f64();
    let err = max_rel_err(&x.to_bigfloat(&p.ctx)?, &p.system.x_true, &p.ctx)?;
    Ok((secs, err))
}

/// BigFloat LU at the problem's long precision.
pub fn mp_direct_solve(p: &Problem) -> mpcore::Result<(f64, BigFloat)> {
    let mut a = p.system.a.clone();
    let start = Instant::now();
    let piv = lu_factor_pp(&mut a, &p.ctx, kernels(KernelPath::Scalar))?;
    let x = lu_solve(&a, &piv, &p.system.b, &p.ctx)?;
    let secs = start.elapsed().as_secs_f64();
    Ok((secs, max_rel_err(&x, &p.system.x_true, &p.ctx)?))
}

fn direct_row(p: &Problem, tag: PrecisionTag, path: KernelPath) -> Row {
    let row = Row::new("direct", tag.name(), p.system.n(), p.seed);
    match direct_solve(p, tag, path) {
        Ok((secs, err)) => Row { time_seconds: secs, max_rel_err: Some(fmt_err(&err)), ..row },
        Err(e) => row.fail(e),
    }
}

fn mp_direct_row(p: &Problem) -> Row {
    let row = Row { long_bits: Some(p.ctx.bits()), ..Row::new("mp_direct", "bf", p.system.n(), p.seed) };
    match mp_direct_solve(p) {
        Ok((secs, err)) => Row { time_seconds: secs, max_rel_err: Some(fmt_err(&err)), ..row },
        Err(e) => row.fail(e),
    }
}

fn refine_config(tag: PrecisionTag, long_bits: u32, f: &RefineFlags, path: KernelPath) -> Result<RefineConfig, CliError> {
    let ctx = long_ctx(long_bits)?;
    let rtol = BigFloat::parse(&f.rtol, &ctx).map_err(|e| CliError::Usage(format!("--rtol: {e}")))?;
    let atol = BigFloat::parse(&f.atol, &ctx).map_err(|e| CliError::Usage(format!("--atol: {e}")))?;
    let cfg = RefineConfig { long_bits, rtol, atol, max_iter: f.max_iter, kernels: kernels(path), ..RefineConfig::new(tag) };
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

fn refine_row(p: &Problem, cfg: &RefineConfig) -> Row {
    let row = Row { long_bits: Some(cfg.long_bits), ..Row::new("refine", cfg.short.name(), p.system.n(), p.seed) };
    let start = Instant::now();
    let result = iterative_refinement(&p.system.a, &p.system.b, cfg).and_then(|r| {
        let secs = start.elapsed().as_secs_f64();
        let ctx = PrecisionContext::new(cfg.long_bits)?;
        Ok((secs, max_rel_err(&r.solution, &p.system.x_true, &ctx)?, r))
    });
    match result {
        Ok((secs, err, r)) => Row {
            time_seconds: secs,
            max_rel_err: Some(fmt_err(&err)),
            iterations: Some(r.iterations),
            stop_reason: Some(r.stop_reason.to_string()),
            ..row
        },
        Err(e) => row.fail(e),
    }
}

pub fn cmd_direct(a: &DirectArgs) -> Result<Row, CliError> {
    let p = obtain(&a.source, a.long_bits)?;
    Ok(direct_row(&p, a.prec.tag(), a.simd.kernel_path()))
}

pub fn cmd_refine(a: &RefineArgs) -> Result<Row, CliError> {
    let cfg = refine_config(a.prec.tag(), a.long_bits, &a.refine, a.simd.kernel_path())?;
    let p = obtain(&a.source, a.long_bits)?;
    Ok(refine_row(&p, &cfg))
}

enum Task {
    Direct(PrecisionTag),
    Refine(RefineConfig),
    MpDirect,
}

/// Direct and refine rows per precision, then the BigFloat baseline.
pub fn cmd_bench(a: &BenchArgs) -> Result<Vec<Row>, CliError> {
    if a.precs.is_empty() {
        return Err(CliError::Usage("--precs is empty".into()));
    }
    let path = a.simd.kernel_path();
    let mut tasks = Vec::new();
    for prec in &a.precs {
        tasks.push(Task::Direct(prec.tag()));
        tasks.push(Task::Refine(refine_config(prec.tag(), a.long_bits, &a.refine, path)?));
    }
    tasks.push(Task::MpDirect);

    let ctx = long_ctx(a.long_bits)?;
    let (system, meta) = generate(&a.problem, &ctx)?;
    let p = Problem { system, ctx, seed: Some(meta.seed) };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("--jobs: {e}")))?;
    let rows = pool.install(|| {
        tasks
            .par_iter()
            .map(|t| match t {
                Task::Direct(tag) => direct_row(&p, *tag, path),
                Task::Refine(cfg) => refine_row(&p, cfg),
                Task::MpDirect => mp_direct_row(&p),
            })
            .collect()
    });
    Ok(rows)
}
