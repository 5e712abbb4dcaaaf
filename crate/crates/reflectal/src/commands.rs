//! The four subcommands. Each takes the parsed config and an output
//! directory, writes its artifacts there and returns the paths it wrote.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use reflectal_core::bound::{eigensolve, VibrationalState};
use reflectal_core::curves::CurveSet;
use reflectal_core::observe::Branching;
use reflectal_core::tdse::{build_field, propagate, PropagationConfig, Trajectory};
use reflectal_core::units::{to_ev, UnitSystem, Unit};
use reflectal_core::zn::{find_control_frequency, transmission, ManifoldCurve, ManifoldProblem};
use reflectal_core::{Error as CoreError, RadialGrid};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{num, Header, Table};

/// Options shared by all subcommands.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out: PathBuf,
    /// Worker threads for scans and manifold batches; `None` uses every core.
    pub workers: Option<usize>,
}

struct Context {
    config: RunConfig,
    curves: CurveSet,
    grid: RadialGrid,
    header: Header,
    out: PathBuf,
    pool: rayon::ThreadPool,
}

impl Context {
    fn new(command: &str, config: &RunConfig, options: &RunOptions) -> Result<Self, CliError> {
        let curves = config.curve_set()?;
        let grid = config.grid.build()?;
        let (lo, hi) = curves.range();
        if grid.r_min() < lo - 1e-12 || grid.r_max() > hi + 1e-12 {
            return Err(CliError::Config(format!(
                "grid [{}, {}] bohr extends beyond the curve data range [{lo}, {hi}]",
                grid.r_min(),
                grid.r_max()
            )));
        }
        fs::create_dir_all(&options.out).map_err(|e| CliError::io(&options.out, e))?;
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = options.workers {
            if n == 0 {
                return Err(CliError::Config("--workers must be at least 1".into()));
            }
            builder = builder.num_threads(n);
        }
        let pool = builder.build().map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
        Ok(Self {
            config: config.clone(),
            curves,
            grid,
            header: Header::new(command, &config.to_json()),
            out: options.out.clone(),
            pool,
        })
    }

    fn levels(&self, n: usize) -> Result<Vec<VibrationalState>, CliError> {
        let v1 = self.curves.potential(1);
        Ok(eigensolve(|r| v1.value(r), self.curves.mass(), &self.grid, n)?)
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

fn fs_of(t: f64) -> f64 {
    UnitSystem::CODATA.from_au(t, Unit::Femtosecond)
}

/// Eigenstate files `eigenstate_v<v>.csv` and the level table `levels.csv`.
pub fn cmd_eigen(config: &RunConfig, options: &RunOptions) -> Result<Vec<PathBuf>, CliError> {
    let ctx = Context::new("eigen", config, options)?;
    let states = ctx.levels(ctx.config.eigen.n_states)?;
    let mut written = Vec::new();
    for s in &states {
        let path = ctx.path(&format!("eigenstate_v{}.csv", s.v));
        Table {
            header: &ctx.header,
            comments: vec![format!("E_v_hartree = {}", num(s.energy))],
            columns: &["R", "chi_v"],
            rows: (0..ctx.grid.len()).map(|i| vec![num(ctx.grid.r(i)), num(s.chi[i])]).collect(),
        }
        .write(&path)?;
        written.push(path);
    }
    let path = ctx.path("levels.csv");
    Table {
        header: &ctx.header,
        comments: vec![],
        columns: &["v", "E_v_eV"],
        rows: states.iter().map(|s| vec![s.v.to_string(), num(to_ev(s.energy))]).collect(),
    }
    .write(&path)?;
    written.push(path);
    log::info!("{} vibrational levels written to {}", states.len(), ctx.out.display());
    Ok(written)
}

/// Manifold files per (v, channel), their root tables, the control-frequency
/// report for the H + I pair and the single-channel roots that block I*.
pub fn cmd_manifold(config: &RunConfig, options: &RunOptions) -> Result<Vec<PathBuf>, CliError> {
    let ctx = Context::new("manifold", config, options)?;
    let section = &ctx.config.manifold;
    section.check_channels()?;
    let window = section.window()?;
    let f0 = ctx.config.field.f0()?;
    let tolerance = section.alignment_tolerance.au(reflectal_core::units::Dimension::Energy, "manifold.alignment_tolerance")?;
    let top = section.levels.iter().copied().max().ok_or_else(|| CliError::Config("manifold.levels is empty".into()))?;
    let states = ctx.levels(top + 1)?;

    let mut channels = section.channels.clone();
    for c in section.pair {
        if !channels.contains(&c) {
            channels.push(c);
        }
    }
    channels.sort_unstable();
    let jobs: Vec<(usize, usize)> =
        section.levels.iter().flat_map(|&v| channels.iter().map(move |&c| (v, c))).collect();
    let results: Vec<Result<ManifoldCurve<'_>, CoreError>> = ctx.pool.install(|| {
        jobs.par_iter()
            .map(|&(v, c)| ManifoldProblem::new(&ctx.curves, c, v, states[v].energy, f0)?.manifold(window, section.samples))
            .collect()
    });

    let mut written = Vec::new();
    let mut empty = Vec::new();
    let mut curves: Vec<((usize, usize), ManifoldCurve<'_>)> = Vec::new();
    for (&(v, c), result) in jobs.iter().zip(results) {
        match result {
            Ok(m) => {
                written.extend(write_manifold(&ctx, &m)?);
                curves.push(((v, c), m));
            }
            Err(e @ (CoreError::EmptyWindow(_) | CoreError::TopologyNotFound(_))) => {
                log::warn!("v = {v}, channel {c}: {e}");
                empty.push(format!("v = {v}, channel {c}: {e}"));
            }
            Err(e) => return Err(e.into()),
        }
    }
    let find = |v: usize, c: usize| curves.iter().find(|(k, _)| *k == (v, c)).map(|(_, m)| m);

    let [ca, cb] = section.pair;
    let mut rows = Vec::new();
    for &v in &section.levels {
        let (Some(a), Some(b)) = (find(v, ca), find(v, cb)) else { continue };
        for hit in find_control_frequency([a, b], tolerance) {
            rows.push(vec![
                v.to_string(),
                num(to_ev(hit.omega)),
                num(hit.quality),
                hit.roots[0].n.to_string(),
                num(to_ev(hit.roots[0].omega)),
                hit.roots[1].n.to_string(),
                num(to_ev(hit.roots[1].omega)),
            ]);
        }
    }
    let path = ctx.path("alignment.csv");
    let (na, oa, nb, ob) = (format!("n_ch{ca}"), format!("omega_ch{ca}_eV"), format!("n_ch{cb}"), format!("omega_ch{cb}_eV"));
    Table {
        header: &ctx.header,
        comments: vec![
            format!("roots of channels {ca} and {cb} within {} eV of each other, best first per level", num(to_ev(tolerance))),
            "quality = summed predicted transmission of both channels at omega_eV".into(),
        ],
        columns: &["v", "omega_eV", "quality", &na, &oa, &nb, &ob],
        rows,
    }
    .write(&path)?;
    written.push(path);

    // I* blocking: complete-reflection roots of the channel correlating with I*
    let istar: Vec<usize> = channels
        .iter()
        .copied()
        .filter(|&c| ctx.curves.fragment(c) == reflectal_core::curves::Fragment::IodineExcited)
        .collect();
    let others: Vec<usize> = channels.iter().copied().filter(|c| !istar.contains(c)).collect();
    let mut rows = Vec::new();
    for &v in &section.levels {
        for &c in &istar {
            let Some(m) = find(v, c) else { continue };
            for r in &m.roots {
                let mut row = vec![v.to_string(), c.to_string(), r.n.to_string(), num(to_ev(r.omega)), num(r.transmission)];
                for &o in &others {
                    let p = find(v, o)
                        .and_then(|m| m.problem.evaluate(r.omega).ok())
                        .map(|z| transmission(&z))
                        .unwrap_or(f64::NAN);
                    row.push(num(p));
                }
                rows.push(row);
            }
        }
    }
    let other_cols: Vec<String> = others.iter().map(|o| format!("P_ch{o}")).collect();
    let mut columns = vec!["v", "channel", "n", "omega_eV", "P"];
    columns.extend(other_cols.iter().map(String::as_str));
    let path = ctx.path("istar_block.csv");
    Table {
        header: &ctx.header,
        comments: vec!["complete-reflection roots of the H + I* channel; P_ch* are the other channels' transmissions there".into()],
        columns: &columns,
        rows,
    }
    .write(&path)?;
    written.push(path);

    if !empty.is_empty() {
        return Err(CliError::Empty(format!("no valid frequency window for {}", empty.join("; "))));
    }
    Ok(written)
}

fn write_manifold(ctx: &Context, m: &ManifoldCurve<'_>) -> Result<Vec<PathBuf>, CliError> {
    let (v, c) = (m.problem.v, m.problem.channel);
    let mut comments = vec![format!(
        "channel {c}, v = {v}, E_v_hartree = {}, F0_au = {}",
        num(m.problem.e_v),
        num(m.problem.f0)
    )];
    for &(a, b) in &m.gaps {
        comments.push(format!("gap: omega_eV {} to {}", num(to_ev(a)), num(to_ev(b))));
    }
    // samples and roots merged in omega order, so each root's P sits in this file
    let mut points: Vec<(f64, f64, f64)> = m
        .samples
        .iter()
        .filter_map(|s| Some((s.omega, s.psi_over_pi()?, s.transmission()?)))
        .chain(m.roots.iter().map(|r| (r.omega, r.psi_over_pi, r.transmission)))
        .collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let path = ctx.path(&format!("manifold_v{v}_ch{c}.csv"));
    Table {
        header: &ctx.header,
        comments,
        columns: &["omega_eV", "psi_over_pi", "P"],
        rows: points.iter().map(|&(w, p, t)| vec![num(to_ev(w)), num(p), num(t)]).collect(),
    }
    .write(&path)?;
    let roots = ctx.path(&format!("roots_v{v}_ch{c}.csv"));
    Table {
        header: &ctx.header,
        comments: vec![format!("channel {c}, v = {v}: Psi = (n + 1/2) pi")],
        columns: &["n", "omega_eV"],
        rows: m.roots.iter().map(|r| vec![r.n.to_string(), num(to_ev(r.omega))]).collect(),
    }
    .write(&roots)?;
    Ok(vec![path, roots])
}

/// Outcome of one propagation inside a scan or a single run.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub omega: f64,
    pub yields: [f64; 3],
    pub branching: Branching,
    pub ground_flux: f64,
    /// Norm left at R < R_c.
    pub residual: f64,
    /// `J1 + J2 + J3 + J4 + residual`.
    pub balance: f64,
}

fn summarize(omega: f64, traj: &Trajectory, grid: &RadialGrid, prop: &PropagationConfig) -> RunSummary {
    let yields = traj.flux.final_values();
    let residual = traj.final_state.interior_norm(grid, traj.flux.probe.min(prop.probe));
    RunSummary {
        omega,
        yields,
        branching: Branching::from_yields(yields),
        ground_flux: traj.ground_flux,
        residual,
        balance: yields.iter().sum::<f64>() + traj.ground_flux + residual,
    }
}

fn branching_row(s: &RunSummary) -> Vec<String> {
    let b = s.branching;
    vec![
        num(to_ev(s.omega)),
        num(s.yields[0]),
        num(s.yields[1]),
        num(s.yields[2]),
        num(b.p_i),
        num(b.p_istar),
        num(b.ratio),
    ]
}

const BRANCHING_COLUMNS: [&str; 7] = ["omega_eV", "J2", "J3", "J4", "P_I", "P_Istar", "ratio"];
const TRAJECTORY_COLUMNS: [&str; 8] = ["t_fs", "norm1", "norm2", "norm3", "norm4", "J2", "J3", "J4"];

fn write_trajectory(ctx: &Context, path: &Path, omega: f64, traj: &Trajectory) -> Result<(), CliError> {
    let rows = traj
        .times
        .iter()
        .zip(&traj.norms)
        .zip(&traj.flux.integrated)
        .map(|((&t, n), j)| {
            let mut row = vec![num(fs_of(t))];
            row.extend(n.iter().map(|&x| num(x)));
            row.extend(j.iter().map(|&x| num(x)));
            row
        })
        .collect();
    Table {
        header: &ctx.header,
        comments: vec![format!("omega_eV = {}, probe_bohr = {}", num(to_ev(omega)), num(traj.flux.probe))],
        columns: &TRAJECTORY_COLUMNS,
        rows,
    }
    .write(path)
}

fn initial_state(ctx: &Context) -> Result<VibrationalState, CliError> {
    let v = ctx.config.initial_v;
    Ok(ctx.levels(v + 1)?.remove(v))
}

/// Branching summary `branching.csv` over the photon-energy grid, with
/// per-run trajectories under `scan/` and norm-balance diagnostics.
pub fn cmd_scan(config: &RunConfig, options: &RunOptions) -> Result<Vec<PathBuf>, CliError> {
    let ctx = Context::new("scan", config, options)?;
    let omegas = ctx.config.field.scan_omegas()?;
    let prop = ctx.config.propagation.build()?;
    prop.validate(&ctx.grid)?;
    let specs = omegas.iter().map(|&w| ctx.config.field.spec(w)).collect::<Result<Vec<_>, _>>()?;
    let initial = initial_state(&ctx)?;
    let dir = ctx.path("scan");
    fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;

    let results: Vec<Result<RunSummary, CliError>> = ctx.pool.install(|| {
        specs
            .par_iter()
            .enumerate()
            .map(|(k, spec)| {
                let field = build_field(*spec);
                let traj = propagate(&initial, &ctx.curves, &field, &prop)?;
                write_trajectory(&ctx, &dir.join(format!("trajectory_{k:04}.csv")), spec.omega, &traj)?;
                Ok(summarize(spec.omega, &traj, &ctx.grid, &prop))
            })
            .collect()
    });

    let mut rows = Vec::new();
    let mut diagnostics = Vec::new();
    let mut comments = Vec::new();
    let mut unstable = Vec::new();
    for (k, (&omega, result)) in omegas.iter().zip(results).enumerate() {
        let file = format!("scan/trajectory_{k:04}.csv");
        match result {
            Ok(s) => {
                rows.push(branching_row(&s));
                diagnostics.push(vec![
                    num(to_ev(omega)),
                    "ok".into(),
                    num(s.ground_flux),
                    num(s.residual),
                    num(s.balance),
                    num(s.balance - 1.0),
                    file,
                ]);
            }
            Err(e @ CliError::Core(CoreError::Instability { .. })) => {
                log::warn!("omega = {} eV: {e}", to_ev(omega));
                comments.push(format!("unstable: omega_eV = {}: {e}", num(to_ev(omega))));
                unstable.push(to_ev(omega));
                let mut row = vec![num(to_ev(omega))];
                row.extend(std::iter::repeat(num(f64::NAN)).take(6));
                rows.push(row);
                diagnostics.push(vec![
                    num(to_ev(omega)),
                    "unstable".into(),
                    num(f64::NAN),
                    num(f64::NAN),
                    num(f64::NAN),
                    num(f64::NAN),
                    String::new(),
                ]);
            }
            Err(e) => return Err(e),
        }
    }
    let diag_path = ctx.path("scan_diagnostics.csv");
    Table {
        header: &ctx.header,
        comments: vec!["balance = J1 + J2 + J3 + J4 + norm at R < R_c; should be 1".into()],
        columns: &["omega_eV", "status", "J1", "residual_norm", "balance", "balance_minus_one", "trajectory"],
        rows: diagnostics,
    }
    .write(&diag_path)?;
    let path = ctx.path("branching.csv");
    Table { header: &ctx.header, comments, columns: &BRANCHING_COLUMNS, rows }.write(&path)?;
    if !unstable.is_empty() {
        return Err(CliError::Unstable(format!(
            "{} of {} runs flagged (omega_eV = {:?}); see {}",
            unstable.len(),
            omegas.len(),
            unstable,
            path.display()
        )));
    }
    Ok(vec![path, diag_path])
}

/// One propagation at `field.omega`: `trajectory.csv` and a one-row `branching.csv`.
pub fn cmd_propagate(config: &RunConfig, options: &RunOptions) -> Result<(Vec<PathBuf>, RunSummary), CliError> {
    let ctx = Context::new("propagate", config, options)?;
    let omega = ctx.config.field.single_omega()?;
    let spec = ctx.config.field.spec(omega)?;
    let prop = ctx.config.propagation.build()?;
    prop.validate(&ctx.grid)?;
    let initial = initial_state(&ctx)?;
    let traj = propagate(&initial, &ctx.curves, &build_field(spec), &prop)?;
    let summary = summarize(omega, &traj, &ctx.grid, &prop);
    let path = ctx.path("trajectory.csv");
    write_trajectory(&ctx, &path, omega, &traj)?;
    let bpath = ctx.path("branching.csv");
    Table {
        header: &ctx.header,
        comments: vec![format!(
            "v = {}, J1 = {}, residual_norm = {}, balance = {}",
            ctx.config.initial_v,
            num(summary.ground_flux),
            num(summary.residual),
            num(summary.balance)
        )],
        columns: &BRANCHING_COLUMNS,
        rows: vec![branching_row(&summary)],
    }
    .write(&bpath)?;
    Ok((vec![path, bpath], summary))
}
