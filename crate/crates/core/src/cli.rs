//! Command-line runner: `run <config>`, `bench <suite>`, `list`.

use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{
    amplitude_spectrum, periodic_grid, relative_l2, spectrum_agreement_band, write_spectra_csv, ErrorReport,
    BAND_FLOOR, DEFAULT_BAND_TOL,
};
use crate::config::{axis_names, RunConfig};
use crate::error::Error;
use crate::geometry::{evaluation_grid, Geometry, Point};
use crate::pipeline::solve_linear;
use crate::problems::{make_problem, Overrides, ProblemSpec, REGISTRY};
use crate::reference::{reference_grid, ReferenceTable, REFERENCE_TIMES};
use crate::timestepper::march_observed;

/// Overrides the directory artifacts are written under (default `runs`).
pub const OUTPUT_ROOT_ENV: &str = "PIMWNN_OUTPUT_ROOT";

#[derive(Parser, Debug)]
#[command(name = "pimwnn", about = "Wavelet collocation PDE solver", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the problem described by a config file and write artifacts.
    Run { config: PathBuf },
    /// Re-run the benchmark tables and compare with the published errors.
    Bench { suite: Suite },
    /// Print the problem registry.
    List,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Table1,
    Table2,
    Table3,
    Table4,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Config,
    Solve,
    March,
    Analysis,
    Output,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Config => "config",
            Stage::Solve => "solve",
            Stage::March => "march",
            Stage::Analysis => "analysis",
            Stage::Output => "output",
        })
    }
}

#[derive(Debug)]
pub struct StageError {
    pub stage: Stage,
    pub error: Error,
}

impl fmt::Display for StageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} stage failed: {}", self.stage, self.error)
    }
}

impl std::error::Error for StageError {}

trait AtStage<T> {
    fn at(self, stage: Stage) -> Result<T, StageError>;
}

impl<T, E: Into<Error>> AtStage<T> for Result<T, E> {
    fn at(self, stage: Stage) -> Result<T, StageError> {
        self.map_err(|e| StageError {
            stage,
            error: e.into(),
        })
    }
}

/// Machine-readable record of one run.
#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub problem: String,
    pub params: std::collections::BTreeMap<String, f64>,
    pub ladders: Vec<(i32, i32)>,
    pub n_basis: usize,
    pub rows: usize,
    pub n_interior: usize,
    pub n_boundary: usize,
    pub n_initial: usize,
    pub strategy: String,
    pub seed: u64,
    pub row_scaling: String,
    pub solver: String,
    /// Relative L2 error on the evaluation grid.
    pub e_l2: Option<f64>,
    pub max_abs_error: Option<f64>,
    /// Space-time problems: relative L2 error along `t = t_end`.
    pub e_l2_final_time: Option<f64>,
    pub residual_norm: Option<f64>,
    pub rank: Option<usize>,
    pub condition: Option<f64>,
    pub spectrum_band: Option<usize>,
    pub spectrum_support: Option<usize>,
    /// Time-marched problems: `(t, e_l2)` against the reference table.
    pub reference_errors: Vec<(f64, f64)>,
    pub picard_passes: Option<usize>,
    pub wall_seconds: f64,
}

#[derive(Clone, Debug)]
pub struct RunArtifacts {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub summary: RunSummary,
}

pub fn output_root() -> PathBuf {
    std::env::var_os(OUTPUT_ROOT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("runs"))
}

/// Grid for errors and the solution CSV: `per_axis` points per axis over
/// the bounding box, restricted to the domain.
pub fn evaluation_points(p: &ProblemSpec, per_axis: usize) -> Vec<Point> {
    let bounds = p.geometry.bounds();
    let grid = evaluation_grid(&bounds, &vec![per_axis; bounds.len()]);
    match p.geometry {
        Geometry::Star { .. } => grid.into_iter().filter(|q| p.geometry.contains(q)).collect(),
        _ => grid,
    }
}

fn default_grid(dim: usize) -> usize {
    if dim == 1 {
        1000
    } else {
        100
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, StageError> {
    Ok(BufWriter::new(File::create(path).at(Stage::Output)?))
}

fn write_solution_csv(path: &Path, axes: &[&str], grid: &[Point], u: &[f64], exact: Option<&[f64]>) -> Result<(), StageError> {
    let mut out = create(path)?;
    let header = match exact {
        Some(_) => format!("{},u,u_exact", axes.join(",")),
        None => format!("{},u", axes.join(",")),
    };
    let mut write = || -> std::io::Result<()> {
        writeln!(out, "{header}")?;
        for (i, (q, v)) in grid.iter().zip(u).enumerate() {
            for c in q {
                write!(out, "{c:.16e},")?;
            }
            match exact {
                Some(e) => writeln!(out, "{v:.16e},{:.16e}", e[i])?,
                None => writeln!(out, "{v:.16e}")?,
            }
        }
        out.flush()
    };
    write().at(Stage::Output)
}

/// Builds, solves (or marches) and evaluates the configured problem,
/// writing artifacts under `root`.
pub fn run(cfg: &RunConfig, root: &Path) -> Result<RunArtifacts, StageError> {
    let p = cfg.problem_spec().at(Stage::Config)?;
    let dir = root.join(cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from(&p.name)));
    let result = if p.is_nonlinear() {
        run_march(cfg, &p, &dir)
    } else {
        run_linear(cfg, &p, &dir)
    }?;
    let path = dir.join("summary.json");
    let mut out = create(&path)?;
    serde_json::to_writer_pretty(&mut out, &result.summary).at(Stage::Output)?;
    writeln!(out).at(Stage::Output)?;
    out.flush().at(Stage::Output)?;
    let mut files = result.files;
    files.push(path);
    Ok(RunArtifacts { files, ..result })
}

fn run_linear(cfg: &RunConfig, p: &ProblemSpec, dir: &Path) -> Result<RunArtifacts, StageError> {
    let clock = Instant::now();
    let opts = cfg.linear_options(p);
    let solved = solve_linear(p, &opts).at(Stage::Solve)?;
    let sol = &solved.solution;
    let exec = opts.solve.execution;

    let grid = evaluation_points(p, cfg.grid_points.unwrap_or(default_grid(p.dim())));
    let u = sol.eval_many_with(&grid, exec).at(Stage::Analysis)?;
    let exact: Vec<f64> = grid.iter().map(|q| p.exact_eval(q)).collect::<Result<_, _>>().at(Stage::Analysis)?;
    let report = ErrorReport::from_values(grid.clone(), &u, &exact).at(Stage::Analysis)?;

    let e_final = match p.t_end() {
        Some(t_end) => {
            let (lo, hi) = p.geometry.bounds()[0];
            let line: Vec<Point> = (0..1000).map(|i| vec![lo + (hi - lo) * i as f64 / 999.0, t_end]).collect();
            let num = sol.eval_many_with(&line, exec).at(Stage::Analysis)?;
            let ex: Vec<f64> = line.iter().map(|q| p.exact_eval(q)).collect::<Result<_, _>>().at(Stage::Analysis)?;
            Some(relative_l2(&num, &ex).at(Stage::Analysis)?)
        }
        None => None,
    };

    fs::create_dir_all(dir).at(Stage::Output)?;
    let axes = axis_names(p);
    let mut files = Vec::new();
    let path = dir.join("solution.csv");
    write_solution_csv(&path, &axes, &grid, &u, Some(&exact))?;
    files.push(path);
    let path = dir.join("error.csv");
    report.write_csv(create(&path)?, &axes).at(Stage::Output)?;
    files.push(path);

    let (mut band, mut support) = (None, None);
    if p.dim() == 1 && cfg.spectrum_points >= 2 {
        let (lo, hi) = p.geometry.bounds()[0];
        let xs: Vec<Point> = periodic_grid(lo, hi, cfg.spectrum_points).into_iter().map(|x| vec![x]).collect();
        let num = sol.eval_many_with(&xs, exec).at(Stage::Analysis)?;
        let ex: Vec<f64> = xs.iter().map(|q| p.exact_eval(q)).collect::<Result<_, _>>().at(Stage::Analysis)?;
        let (se, sn) = (amplitude_spectrum(&ex).at(Stage::Analysis)?, amplitude_spectrum(&num).at(Stage::Analysis)?);
        band = spectrum_agreement_band(&se, &sn, DEFAULT_BAND_TOL).at(Stage::Analysis)?;
        support = Some(se.dominant_support(BAND_FLOOR));
        let path = dir.join("spectrum.csv");
        write_spectra_csv(create(&path)?, &se, &sn).at(Stage::Output)?;
        files.push(path);
    }

    let summary = RunSummary {
        problem: p.name.clone(),
        params: p.params.clone(),
        ladders: opts.ladders.clone(),
        n_basis: solved.cols,
        rows: solved.rows,
        n_interior: opts.n_interior,
        n_boundary: opts.n_boundary,
        n_initial: if p.geometry.is_time_dependent() { opts.n_initial } else { 0 },
        strategy: format!("{:?}", opts.strategy),
        seed: opts.seed,
        row_scaling: format!("{:?}", opts.row_scaling),
        solver: format!("{:?}", opts.solve.method),
        e_l2: Some(report.relative_l2),
        max_abs_error: Some(report.max_abs),
        e_l2_final_time: e_final,
        residual_norm: Some(solved.report.residual_norm),
        rank: Some(solved.report.rank),
        condition: Some(solved.report.condition_estimate).filter(|c| c.is_finite()),
        spectrum_band: band,
        spectrum_support: support,
        reference_errors: Vec::new(),
        picard_passes: None,
        wall_seconds: clock.elapsed().as_secs_f64(),
    };
    Ok(RunArtifacts {
        dir: dir.to_path_buf(),
        files,
        summary,
    })
}

fn run_march(cfg: &RunConfig, p: &ProblemSpec, dir: &Path) -> Result<RunArtifacts, StageError> {
    let clock = Instant::now();
    let mc = cfg.march_config(p).at(Stage::Config)?;
    let steps = mc.steps();
    let traj = march_observed(p, &mc, |step, t, passes| {
        if step % 100 == 0 || step == steps {
            eprintln!("  step {step}/{steps}  t = {t:.3}  picard passes = {passes}");
        }
    })
    .at(Stage::March)?;

    let table = ReferenceTable::bundled().at(Stage::Analysis)?;
    let xs = reference_grid();
    let mut reference_errors = Vec::new();
    for &t in REFERENCE_TIMES.iter().filter(|&&t| t <= mc.t_end + 1e-12) {
        let (Some(i), Some(r)) = (traj.index_of(t), table.at(t)) else {
            continue;
        };
        let u = traj.values_at(i, &xs).at(Stage::Analysis)?;
        reference_errors.push((t, relative_l2(&u, r).at(Stage::Analysis)?));
    }

    fs::create_dir_all(dir).at(Stage::Output)?;
    let last = traj.len() - 1;
    let t_last = traj.times[last];
    let u = traj.values_at(last, &xs).at(Stage::Analysis)?;
    let grid: Vec<Point> = xs.iter().map(|&x| vec![x]).collect();
    let mut files = Vec::new();
    let path = dir.join("solution.csv");
    write_solution_csv(&path, &["x"], &grid, &u, table.at(t_last))?;
    files.push(path);
    if let Some(r) = table.at(t_last) {
        let report = ErrorReport::from_values(grid.clone(), &u, r).at(Stage::Analysis)?;
        let path = dir.join("error.csv");
        report.write_csv(create(&path)?, &["x"]).at(Stage::Output)?;
        files.push(path);
    }
    let path = dir.join("trajectory.csv");
    let plot_grid: Vec<f64> = (0..201).map(|i| -1.0 + i as f64 / 100.0).collect();
    traj.write_csv(create(&path)?, &plot_grid, cfg.trajectory_stride)
        .at(Stage::Output)?;
    files.push(path);

    let final_error = reference_errors.iter().find(|(t, _)| (t - t_last).abs() < 1e-9).map(|e| e.1);
    let summary = RunSummary {
        problem: p.name.clone(),
        params: p.params.clone(),
        ladders: vec![mc.ladder],
        n_basis: traj.basis.len(),
        rows: mc.n_interior + mc.n_boundary.max(2),
        n_interior: mc.n_interior,
        n_boundary: mc.n_boundary.max(2),
        n_initial: 0,
        strategy: format!("{:?}", mc.strategy),
        seed: mc.seed,
        row_scaling: format!("{:?}", mc.row_scaling),
        solver: format!("{:?}", mc.solve.method),
        e_l2: final_error,
        max_abs_error: None,
        e_l2_final_time: final_error,
        residual_norm: None,
        rank: None,
        condition: None,
        spectrum_band: None,
        spectrum_support: None,
        reference_errors,
        picard_passes: Some(traj.picard_passes.iter().sum()),
        wall_seconds: clock.elapsed().as_secs_f64(),
    };
    Ok(RunArtifacts {
        dir: dir.to_path_buf(),
        files,
        summary,
    })
}

/// One benchmark row: a configuration, the published error and, for rows
/// that gate the build, the largest acceptable error.
#[derive(Clone, Debug)]
pub struct BenchRow {
    pub table: &'static str,
    pub config: RunConfig,
    pub published: f64,
    pub threshold: Option<f64>,
    /// Compare the final-time error rather than the global one.
    pub final_time: bool,
}

impl BenchRow {
    pub fn id(&self) -> String {
        let levels: Vec<String> = self.config.ladders.values().map(|(a, b)| format!("{a}_{b}")).collect();
        format!("{}_{}_{}", self.table, self.config.problem, levels.join("x"))
    }
}

fn row(table: &'static str, problem: &str, ladders: &[(&str, (i32, i32))], counts: (usize, usize, usize), published: f64, threshold: Option<f64>) -> BenchRow {
    let mut config = RunConfig::new(problem);
    for (axis, l) in ladders {
        config.ladders.insert(axis.to_string(), *l);
    }
    config.n_interior = Some(counts.0);
    config.n_boundary = Some(counts.1);
    if counts.2 > 0 {
        config.n_initial = Some(counts.2);
    }
    BenchRow {
        table,
        config,
        published,
        threshold,
        final_time: false,
    }
}

pub fn bench_rows(suite: Suite) -> Vec<BenchRow> {
    let mut rows = Vec::new();
    if matches!(suite, Suite::Table1 | Suite::All) {
        for (j, published, thr) in [(7, 1.055e-2, None), (9, 1.426e-3, Some(1e-2)), (11, 2.018e-4, Some(2e-3))] {
            rows.push(row("table1", "repr_f1", &[("x", (0, j))], (5000, 2, 0), published, thr));
        }
    }
    if matches!(suite, Suite::Table2 | Suite::All) {
        for (j, published, thr) in [(1, 1.185e-1, None), (2, 1.304e-3, None), (3, 1.181e-7, Some(1e-5))] {
            rows.push(row("table2", "repr_f2", &[("x", (0, j)), ("y", (0, j))], (2000, 400, 0), published, thr));
        }
    }
    if matches!(suite, Suite::Table3 | Suite::All) {
        let one_d: [(&str, [(i32, f64, Option<f64>); 3]); 3] = [
            ("adv1d", [(1, 3.175e-1, None), (2, 7.927e-3, None), (3, 1.318e-3, Some(1e-2))]),
            ("diff1d", [(1, 9.821e-3, None), (2, 1.316e-3, None), (3, 1.688e-4, Some(1e-3))]),
            ("advdiff1d", [(1, 1.632e-1, None), (3, 2.709e-3, None), (5, 1.228e-4, Some(1e-3))]),
        ];
        for (name, levels) in one_d {
            for (j, published, thr) in levels {
                rows.push(row("table3", name, &[("x", (0, j))], (100, 2, 0), published, thr));
            }
        }
        // the J = 7 error is published both as 2.174e-3 and as 6.887e-2; the threshold sits above either
        for (j, published, thr) in [(5, 4.592, None), (6, 2.356e-2, None), (7, 2.174e-3, Some(2e-1))] {
            rows.push(row("table3", "helmholtz1d", &[("x", (0, j))], (20000, 2, 0), published, thr));
        }
    }
    if matches!(suite, Suite::Table4 | Suite::All) {
        for (j, published, thr) in [(2, 1.235e-3, None), (3, 2.227e-4, None), (4, 1.074e-4, Some(1e-3))] {
            rows.push(row("table4", "adv2d", &[("x", (0, j)), ("y", (0, j))], (5000, 400, 0), published, thr));
        }
        for (j, published, thr) in [(1, 4.984e-3, None), (2, 5.117e-6, None), (3, 3.056e-7, Some(1e-5))] {
            rows.push(row("table4", "diff2d", &[("x", (0, j)), ("y", (0, j))], (1000, 100, 0), published, thr));
        }
        for (name, published) in [("adv_space_time_packet", 7.322e-4), ("adv_space_time_gauss", 3.413e-4)] {
            let mut r = row("table4", name, &[], (0, 0, 0), published, Some(1e-2));
            r.config.n_interior = None;
            r.config.n_boundary = None;
            r.final_time = true;
            rows.push(r);
        }
    }
    rows
}

#[derive(Clone, Debug)]
pub struct BenchOutcome {
    pub row: BenchRow,
    pub achieved: Result<f64, String>,
    pub n_basis: Option<usize>,
    pub seconds: f64,
}

impl BenchOutcome {
    /// `None` for informational rows.
    pub fn passed(&self) -> Option<bool> {
        let thr = self.row.threshold?;
        Some(matches!(self.achieved, Ok(e) if e <= thr))
    }
}

pub fn run_bench_row(row: &BenchRow, root: &Path) -> BenchOutcome {
    let clock = Instant::now();
    let mut config = row.config.clone();
    config.output_dir = Some(PathBuf::from(row.id()));
    let result = run(&config, root);
    let seconds = clock.elapsed().as_secs_f64();
    let (achieved, n_basis) = match result {
        Ok(a) => {
            let e = if row.final_time { a.summary.e_l2_final_time } else { a.summary.e_l2 };
            (e.ok_or_else(|| "no error metric".to_string()), Some(a.summary.n_basis))
        }
        Err(e) => (Err(e.to_string()), None),
    };
    BenchOutcome {
        row: row.clone(),
        achieved,
        n_basis,
        seconds,
    }
}

/// Runs every row of `suite`, prints a comparison table and writes
/// `bench_<suite>.csv`. Returns whether all gating rows passed.
pub fn bench<W: Write>(suite: Suite, root: &Path, mut out: W) -> std::io::Result<(Vec<BenchOutcome>, bool)> {
    let root = root.join("bench");
    fs::create_dir_all(&root)?;
    writeln!(
        out,
        "{:<7} {:<22} {:<12} {:>6} {:>11} {:>11} {:>9} {:>6} {:>9}",
        "table", "problem", "ladder", "N", "published", "achieved", "limit", "status", "time(s)"
    )?;
    let mut outcomes = Vec::new();
    for r in bench_rows(suite) {
        let o = run_bench_row(&r, &root);
        let ladder = r.config.ladders.values().map(|(a, b)| format!("{a}..{b}")).collect::<Vec<_>>().join("x");
        let achieved = match &o.achieved {
            Ok(e) => format!("{e:.3e}"),
            Err(_) => "error".into(),
        };
        let status = match o.passed() {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "info",
        };
        writeln!(
            out,
            "{:<7} {:<22} {:<12} {:>6} {:>11.3e} {:>11} {:>9} {:>6} {:>9.2}",
            r.table,
            r.config.problem,
            if ladder.is_empty() { "default".into() } else { ladder },
            o.n_basis.map_or("-".into(), |n| n.to_string()),
            r.published,
            achieved,
            r.threshold.map_or("-".into(), |t| format!("{t:.0e}")),
            status,
            o.seconds
        )?;
        if let Err(msg) = &o.achieved {
            writeln!(out, "        {msg}")?;
        }
        outcomes.push(o);
    }
    let name = format!("{suite:?}").to_lowercase();
    let mut csv = BufWriter::new(File::create(root.join(format!("bench_{name}.csv")))?);
    writeln!(csv, "table,row,published,achieved,threshold,status,seconds")?;
    for o in &outcomes {
        writeln!(
            csv,
            "{},{},{:e},{},{},{},{:.3}",
            o.row.table,
            o.row.id(),
            o.row.published,
            o.achieved.as_ref().map_or("".into(), |e| format!("{e:e}")),
            o.row.threshold.map_or("".into(), |t| format!("{t:e}")),
            match o.passed() {
                Some(true) => "pass",
                Some(false) => "fail",
                None => "info",
            },
            o.seconds
        )?;
    }
    csv.flush()?;
    let ok = outcomes.iter().all(|o| o.passed() != Some(false));
    Ok((outcomes, ok))
}

/// Registry listing with default parameters and provenance.
pub fn list_problems() -> String {
    let mut s = String::new();
    for name in REGISTRY {
        let p = make_problem(name, &Overrides::new()).expect("registry entries build with defaults");
        let params: Vec<String> = p.params.iter().map(|(k, v)| format!("{k} = {v}")).collect();
        s.push_str(&format!("{name}\n    {}\n", p.summary));
        if !params.is_empty() {
            s.push_str(&format!("    parameters: {}\n", params.join(", ")));
        }
        s.push_str(&format!("    ladders: {:?}\n    source: {}\n", p.ladders, p.provenance));
    }
    s
}

/// Parses `args` and executes the command.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match cli.command {
        Command::List => {
            print!("{}", list_problems());
            ExitCode::SUCCESS
        }
        Command::Run { config } => {
            let result = RunConfig::load(&config).at(Stage::Config).and_then(|c| run(&c, &output_root()));
            match result {
                Ok(a) => {
                    let s = &a.summary;
                    println!("{}: N = {}, e_L2 = {:?}, {:.2} s", s.problem, s.n_basis, s.e_l2, s.wall_seconds);
                    for (t, e) in &s.reference_errors {
                        println!("  t = {t}: e_L2 = {e:.3e}");
                    }
                    println!("artifacts in {}", a.dir.display());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::FAILURE
                }
            }
        }
        Command::Bench { suite } => match bench(suite, &output_root(), std::io::stdout().lock()) {
            Ok((_, true)) => ExitCode::SUCCESS,
            Ok((_, false)) => ExitCode::FAILURE,
            Err(e) => {
                eprintln!("error: output stage failed: {e}");
                ExitCode::FAILURE
            }
        },
    }
}
