//! Command-line front end.

mod output;
mod params;

pub use output::{fmt_g, Format};
pub use params::{ParamArgs, Preset, SUN_JUPITER_MU};

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::dynamics::{integrate, IntegrateOptions};
use crate::equilibria::{all_points, collinear_points, k_branch, triangular_points, EquilibriumPoint, Interval, Label};
use crate::error::Error;
use crate::model::{Model, State, SystemParams};
use crate::roots::scan_brackets;
use crate::stability::{classify, critical_mass, critical_mass_curves, l4_condition_terms, stability_band_scan};
use crate::zvc::{extract_contours, limit_diagnostics, region_components, sample_grid, Window, ZvField};
use output::{fmt_opt, Sink, Table};

pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_ZVC: i32 = 4;
pub const EXIT_CRITMASS: i32 = 5;
pub const EXIT_BANDS: i32 = 6;
pub const EXIT_INTEGRATE: i32 = 7;

#[derive(Debug, Parser)]
#[command(
    name = "chermnykh",
    version,
    about = "Equilibria, stability and zero-velocity curves of the restricted three-body problem with radiation, oblateness and a power-law disk"
)]
pub struct Cli {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Directory for data files. Without it only the summary is printed.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,
    /// Plot window as xmin,xmax,ymin,ymax.
    #[arg(long, global = true, value_parser = parse_window, allow_hyphen_values = true)]
    pub window: Option<Window>,
    /// Grid resolution as N or NXxNY.
    #[arg(long, global = true, value_parser = parse_grid)]
    pub grid: Option<(usize, usize)>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FieldArg {
    Omega,
    Force,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Collinear, series and triangular equilibrium points.
    Equilibria,
    /// Linear stability of every equilibrium.
    Stability,
    /// K(x) along each branch of the x-axis for several outer disk radii.
    Kcurve {
        /// Outer radii to sample (density factor held fixed).
        #[arg(long = "b-values", alias = "b", value_delimiter = ',', default_values_t = [1.0, 1.2, 1.5, 2.0])]
        b: Vec<f64>,
        /// Also sample the classical problem.
        #[arg(long = "classical-overlay", alias = "overlay")]
        overlay: bool,
        /// Samples per branch.
        #[arg(long, default_value_t = 2000)]
        samples: usize,
    },
    /// Zero-velocity curves at a Jacobi constant.
    Zvc {
        /// Jacobi constant C.
        #[arg(long = "C", short = 'C', allow_hyphen_values = true, conflicts_with = "at")]
        level: Option<f64>,
        /// Use C = 2Ω at this equilibrium (L1, L2, L3, l1, L4, L5).
        #[arg(long)]
        at: Option<String>,
        #[arg(long, value_enum, default_value_t = FieldArg::Omega)]
        field: FieldArg,
    },
    /// Critical mass ratio of L4: one value without a disk, otherwise the
    /// six curves against the outer disk radius.
    Critmass,
    /// Stable ranges of the outer disk radius for one equilibrium, disk mass fixed.
    Bands {
        #[arg(long, default_value = "L2")]
        point: String,
        #[arg(long = "b-min")]
        b_min: Option<f64>,
        #[arg(long = "b-max", default_value_t = 2.0)]
        b_max: f64,
        #[arg(long, default_value_t = 0.001)]
        step: f64,
    },
    /// Integrate the equations of motion.
    Integrate {
        /// Start at this equilibrium instead of --x/--y.
        #[arg(long, conflicts_with_all = ["x", "y"])]
        from: Option<String>,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        x: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        y: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        vx: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        vy: f64,
        /// Offset from the --from point.
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0, requires = "from")]
        dx: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0, requires = "from")]
        dy: f64,
        #[arg(long = "t-end", allow_hyphen_values = true, default_value_t = 20.0)]
        t_end: f64,
        #[arg(long, default_value_t = crate::dynamics::DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = crate::dynamics::DEFAULT_CADENCE)]
        cadence: f64,
    },
}

fn parse_window(s: &str) -> Result<Window, String> {
    let v: Vec<f64> =
        s.split(',').map(|t| t.trim().parse::<f64>().map_err(|e| e.to_string())).collect::<Result<_, _>>()?;
    match v.as_slice() {
        [x_min, x_max, y_min, y_max] => Ok(Window { x_min: *x_min, x_max: *x_max, y_min: *y_min, y_max: *y_max }),
        [h] => Ok(Window::square(*h)),
        _ => Err("expected xmin,xmax,ymin,ymax or a half-width".into()),
    }
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| e.to_string());
    match s.split_once(['x', 'X']) {
        Some((a, b)) => Ok((parse(a)?, parse(b)?)),
        None => {
            let n = parse(s)?;
            Ok((n, n))
        }
    }
}

/// Failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

fn fail(code: i32) -> impl Fn(Error) -> Failure {
    move |e| Failure {
        code: if matches!(e, Error::InvalidParams(_)) { EXIT_INVALID } else { code },
        message: e.to_string(),
    }
}

fn io_fail(code: i32) -> impl Fn(std::io::Error) -> Failure {
    move |e| Failure { code, message: format!("write failed: {e}") }
}

/// Apply CHERMNYKH_THREADS to the global thread pool.
fn configure_threads() {
    if let Some(n) = std::env::var("CHERMNYKH_THREADS").ok().and_then(|s| s.trim().parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

/// Parse arguments, run, and return the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    configure_threads();
    match execute(&cli) {
        Ok(summary) => {
            let _ = writeln!(out, "{summary}");
            0
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// Run a parsed command; returns the summary line.
pub fn execute(cli: &Cli) -> Result<String, Failure> {
    let params = cli.params.resolve().map_err(fail(EXIT_INVALID))?;
    let model = Model::new(params).map_err(fail(EXIT_INVALID))?;
    let mut sink = Sink::new(cli.out.clone(), cli.format);
    match &cli.command {
        Command::Equilibria => cmd_equilibria(&model, &mut sink),
        Command::Stability => cmd_stability(&model, &mut sink),
        Command::Kcurve { b, overlay, samples } => cmd_kcurve(&params, b, *overlay, *samples, &mut sink),
        Command::Zvc { level, at, field } => {
            let window = cli.window.unwrap_or_default();
            let (nx, ny) = cli.grid.unwrap_or((crate::zvc::DEFAULT_RESOLUTION, crate::zvc::DEFAULT_RESOLUTION));
            cmd_zvc(&model, *level, at.as_deref(), *field, window, nx, ny, &mut sink)
        }
        Command::Critmass => cmd_critmass(&params, &model, &mut sink),
        Command::Bands { point, b_min, b_max, step } => cmd_bands(&params, point, *b_min, *b_max, *step, &mut sink),
        Command::Integrate { from, x, y, dx, dy, vx, vy, t_end, tol, cadence } => {
            let start = match from {
                Some(label) => {
                    let p = find_point(&model, label, EXIT_INTEGRATE)?;
                    State::new(p.x + dx, p.y + dy, *vx, *vy)
                }
                None => State::new(*x, *y, *vx, *vy),
            };
            cmd_integrate(&model, start, *t_end, IntegrateOptions { tol: *tol, cadence: *cadence }, &mut sink)
        }
    }
}

fn parse_label(s: &str) -> Result<Label, Failure> {
    Label::parse(s).ok_or_else(|| Failure {
        code: EXIT_INVALID,
        message: format!("unknown point {s:?}; expected L1, L2, L3, l1, L4 or L5"),
    })
}

fn find_point(model: &Model, label: &str, code: i32) -> Result<EquilibriumPoint, Failure> {
    let label = parse_label(label)?;
    let pts = match label {
        Label::L4 | Label::L5 => {
            let t = triangular_points(model).map_err(fail(code))?;
            t.refined.to_vec()
        }
        _ => collinear_points(model).map_err(fail(code))?,
    };
    pts.into_iter()
        .find(|p| p.label == label)
        .ok_or_else(|| Failure { code, message: format!("{label} does not exist for these parameters") })
}

fn point_row(p: &EquilibriumPoint) -> Vec<String> {
    vec![
        p.label.to_string(),
        fmt_g(p.x),
        fmt_g(p.y),
        p.interval.as_str().into(),
        p.method.as_str().into(),
        fmt_g(p.residual),
        fmt_g(p.scaled_residual),
        p.in_interval.to_string(),
        p.converged.to_string(),
    ]
}

const POINT_HEADER: [&str; 9] =
    ["label", "x", "y", "interval", "method", "residual", "scaled_residual", "in_interval", "converged"];

fn cmd_equilibria(model: &Model, sink: &mut Sink) -> Result<String, Failure> {
    let all = all_points(model).map_err(fail(EXIT_NUMERIC))?;
    let mut table = Table::new(&POINT_HEADER);
    let mut points: Vec<EquilibriumPoint> = all.collinear.clone();
    if let Some(t) = &all.triangular {
        points.extend(t.refined);
        points.extend(t.series);
    }
    points.extend(all.series.iter().copied());
    for p in &points {
        table.push(point_row(p));
    }
    sink.emit("equilibria", &table, &all).map_err(io_fail(EXIT_NUMERIC))?;

    let mut parts: Vec<String> = all.collinear.iter().map(|p| format!("{}={}", p.label, fmt_g(p.x))).collect();
    if let Some(t) = &all.triangular {
        parts.push(format!("L4=({}, {})", fmt_g(t.l4().x), fmt_g(t.l4().y)));
    }
    let outside = all.series.iter().filter(|p| !p.in_interval).count();
    Ok(format!(
        "equilibria: {}; series points {} ({} outside their interval, {} not real)",
        parts.join(" "),
        all.series.len(),
        outside,
        all.series_skipped.len()
    ))
}

fn cmd_stability(model: &Model, sink: &mut Sink) -> Result<String, Failure> {
    let mut points = collinear_points(model).map_err(fail(EXIT_NUMERIC))?;
    let l4 = match triangular_points(model) {
        Ok(t) => {
            points.extend(t.refined);
            Some(l4_condition_terms(model).map_err(fail(EXIT_NUMERIC))?)
        }
        Err(Error::NoOffAxisEquilibrium(_)) => None,
        Err(e) => return Err(fail(EXIT_NUMERIC)(e)),
    };
    let reports =
        points.iter().map(|p| classify(p, model)).collect::<Result<Vec<_>, _>>().map_err(fail(EXIT_NUMERIC))?;

    let mut header = vec!["label", "x", "y", "p", "q", "discriminant", "omega_xx", "omega_yy", "omega_xy"];
    header.extend(["re1", "im1", "re2", "im2", "re3", "im3", "re4", "im4", "verdict", "sign_xx", "sign_yy"]);
    let mut table = Table::new(&header);
    for r in &reports {
        let h = r.quartic.hessian;
        let mut row = vec![r.point.label.to_string(), fmt_g(r.point.x), fmt_g(r.point.y)];
        row.extend([r.quartic.p, r.quartic.q, r.discriminant, h.xx, h.yy, h.xy].map(fmt_g));
        for z in r.lambdas {
            row.push(fmt_g(z.re));
            row.push(fmt_g(z.im));
        }
        row.extend([r.verdict.as_str().to_string(), r.sign_xx.to_string(), r.sign_yy.to_string()]);
        table.push(row);
    }
    sink.emit("stability", &table, &reports).map_err(io_fail(EXIT_NUMERIC))?;
    if let Some(c) = &l4 {
        let mut t = Table::new(&["p_closed", "q_closed", "gamma0", "p_direct", "q_direct", "closed_form_stable"]);
        t.push(vec![
            fmt_g(c.p_l4),
            fmt_g(c.q_l4),
            fmt_g(c.gamma0),
            fmt_g(c.direct.p),
            fmt_g(c.direct.q),
            c.closed_form_stable().to_string(),
        ]);
        sink.emit("l4_condition", &t, c).map_err(io_fail(EXIT_NUMERIC))?;
    }
    let parts: Vec<String> = reports.iter().map(|r| format!("{} {}", r.point.label, r.verdict.as_str())).collect();
    Ok(format!("stability: {}", parts.join(", ")))
}

fn cmd_kcurve(
    params: &SystemParams,
    bs: &[f64],
    overlay: bool,
    samples: usize,
    sink: &mut Sink,
) -> Result<String, Failure> {
    if samples < 2 {
        return Err(Failure { code: EXIT_INVALID, message: "--samples must be at least 2".into() });
    }
    let mut runs: Vec<(String, SystemParams)> = Vec::new();
    for &b in bs {
        let mut p = *params;
        p.disk = params.disk.with_outer_radius_fixed_density(b, params.pi_mode);
        runs.push((format!("b{}", fmt_g(b)), p));
    }
    if overlay {
        runs.push(("classical".into(), SystemParams::classical(params.mu)));
    }
    let mut summary = Vec::new();
    for (tag, p) in runs {
        let model = Model::new(p).map_err(fail(EXIT_INVALID))?;
        let mut counts = Vec::new();
        for iv in Interval::COLLINEAR {
            let (lo, hi) = iv.search_range(&model);
            let f = |x: f64| k_branch(&model, iv, x);
            counts.push(scan_brackets(f, lo, hi, crate::equilibria::SCAN_STEP).len());
            let mut t = Table::new(&["x", "k"]);
            let mut rows = Vec::with_capacity(samples);
            for k in 0..samples {
                let x = lo + (hi - lo) * k as f64 / (samples - 1) as f64;
                let v = f(x);
                t.push(vec![fmt_g(x), fmt_g(v)]);
                rows.push((x, v));
            }
            sink.emit(&format!("kcurve_{tag}_{}", iv.as_str()), &t, &rows).map_err(io_fail(EXIT_NUMERIC))?;
        }
        summary.push(format!("{tag}: {}", counts.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("/")));
    }
    Ok(format!("kcurve sign changes (right/mid-right/mid-left/left): {}", summary.join("; ")))
}

#[allow(clippy::too_many_arguments)]
fn cmd_zvc(
    model: &Model,
    level: Option<f64>,
    at: Option<&str>,
    field: FieldArg,
    window: Window,
    nx: usize,
    ny: usize,
    sink: &mut Sink,
) -> Result<String, Failure> {
    let field = match field {
        FieldArg::Omega => ZvField::Omega,
        FieldArg::Force => ZvField::ForcePotential,
    };
    let level = match (level, at) {
        (Some(c), _) => c,
        (None, Some(label)) => {
            let p = find_point(model, label, EXIT_ZVC)?;
            field.eval(model, p.position()).map_err(fail(EXIT_ZVC))?
        }
        (None, None) => return Err(Failure { code: EXIT_INVALID, message: "zvc needs --C or --at".into() }),
    };
    let grid = sample_grid(model, window, nx, ny, field).map_err(fail(EXIT_ZVC))?;
    let contours = extract_contours(&grid, level);
    let counts = region_components(&grid, level);

    if sink.dir().is_some() {
        let mut g = Table::new(&["x", "y", "two_omega"]);
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let p = grid.node(i, j);
                let v = grid.value(i, j);
                g.push(vec![fmt_g(p.x), fmt_g(p.y), if v.is_finite() { fmt_g(v) } else { String::new() }]);
            }
        }
        let grid_json = serde_json::json!({
            "window": grid.window, "nx": grid.nx, "ny": grid.ny,
            "values": grid.values.iter().map(|v| v.is_finite().then_some(*v)).collect::<Vec<_>>(),
        });
        sink.emit("zvc_grid", &g, &grid_json).map_err(io_fail(EXIT_ZVC))?;
        match sink.format() {
            Format::Csv => {
                let mut text = String::from("# x y\n");
                for (k, line) in contours.polylines.iter().enumerate() {
                    if k > 0 {
                        text.push('\n');
                    }
                    for &(x, y) in line {
                        text.push_str(&format!("{} {}\n", fmt_g(x), fmt_g(y)));
                    }
                }
                sink.emit_raw("zvc_contours.csv", &text).map_err(io_fail(EXIT_ZVC))?;
            }
            Format::Json => {
                sink.emit("zvc_contours", &Table::new(&[]), &contours).map_err(io_fail(EXIT_ZVC))?;
            }
        }
        let report =
            limit_diagnostics(model, level, field, &[2.0, 3.0, 5.0, 10.0, 20.0, 50.0], &[0.2, 0.1, 0.05, 0.02, 0.01]);
        let mut t = Table::new(&["kind", "radius", "level", "value"]);
        for s in &report.far {
            t.push(vec!["far_defect".into(), fmt_g(s.radius), fmt_g(s.level), fmt_g(s.defect)]);
        }
        for s in &report.near {
            t.push(vec!["near_rotation_share".into(), fmt_g(s.rho), fmt_g(level), fmt_g(s.rotation_share)]);
        }
        for s in &report.rays {
            t.push(vec!["ray_contour_radius".into(), fmt_g(s.circle_radius), fmt_g(level), fmt_opt(s.contour_radius)]);
        }
        sink.emit("zvc_limits", &t, &report).map_err(io_fail(EXIT_ZVC))?;
    }
    Ok(format!(
        "zvc: C={} polylines={} vertices={} forbidden_components={} allowed_components={}",
        fmt_g(level),
        contours.polylines.len(),
        contours.vertex_count(),
        counts.forbidden,
        counts.allowed
    ))
}

fn cmd_critmass(params: &SystemParams, model: &Model, sink: &mut Sink) -> Result<String, Failure> {
    if !model.has_disk() {
        let cm = critical_mass(params, 1e-4, 0.5).map_err(fail(EXIT_CRITMASS))?;
        let mut t = Table::new(&["q1", "a2", "mu_c", "saturated"]);
        t.push(vec![fmt_g(params.q1), fmt_g(params.a2), fmt_g(cm.mu_c), cm.saturated.to_string()]);
        sink.emit("critmass", &t, &cm).map_err(io_fail(EXIT_CRITMASS))?;
        return Ok(format!("{:.7}", cm.mu_c));
    }
    let curves = critical_mass_curves(params).map_err(fail(EXIT_CRITMASS))?;
    let mut parts = Vec::new();
    for c in &curves {
        let mut t = Table::new(&["b", "mu_c", "saturated"]);
        for s in &c.samples {
            t.push(vec![fmt_g(s.b), fmt_g(s.mu_c), s.saturated.to_string()]);
        }
        sink.emit(&format!("critmass_q1_{}_a2_{}", fmt_g(c.q1), fmt_g(c.a2)), &t, c).map_err(io_fail(EXIT_CRITMASS))?;
        parts.push(format!(
            "q1={} A2={}: {}..{}",
            fmt_g(c.q1),
            fmt_g(c.a2),
            fmt_opt(c.samples.first().map(|s| s.mu_c)),
            fmt_opt(c.samples.last().map(|s| s.mu_c))
        ));
    }
    Ok(format!("critmass mu_c(b=1..2): {}", parts.join("; ")))
}

fn cmd_bands(
    params: &SystemParams,
    point: &str,
    b_min: Option<f64>,
    b_max: f64,
    step: f64,
    sink: &mut Sink,
) -> Result<String, Failure> {
    let label = parse_label(point)?;
    let b_min = b_min.unwrap_or(params.disk.a + step);
    let scan = stability_band_scan(label, b_min, b_max, step, params).map_err(fail(EXIT_BANDS))?;
    let mut t = Table::new(&["b", "verdict", "x", "max_re"]);
    for s in &scan.samples {
        t.push(vec![fmt_g(s.b), s.verdict.map_or("absent", |v| v.as_str()).into(), fmt_opt(s.x), fmt_opt(s.max_re)]);
    }
    sink.emit(&format!("bands_{label}"), &t, &scan).map_err(io_fail(EXIT_BANDS))?;
    let bands: Vec<String> = scan.bands.iter().map(|(a, b)| format!("[{}, {}]", fmt_g(*a), fmt_g(*b))).collect();
    Ok(format!(
        "bands {label}: {}{}",
        if bands.is_empty() { "none".to_string() } else { bands.join(" ") },
        if scan.gaps.is_empty() { String::new() } else { format!(" ({} gaps)", scan.gaps.len()) }
    ))
}

fn cmd_integrate(
    model: &Model,
    s0: State,
    t_end: f64,
    opts: IntegrateOptions,
    sink: &mut Sink,
) -> Result<String, Failure> {
    let tr = integrate(model, s0, t_end, opts).map_err(fail(EXIT_INTEGRATE))?;
    let mut t = Table::new(&["t", "x", "y", "vx", "vy", "C"]);
    for s in &tr.samples {
        let st = s.state;
        t.push([s.t, st.x, st.y, st.vx, st.vy, s.c].map(fmt_g).to_vec());
    }
    sink.emit("trajectory", &t, &tr).map_err(io_fail(EXIT_INTEGRATE))?;
    let end = tr.last();
    let why = match &tr.termination {
        crate::dynamics::Termination::Completed => "completed".to_string(),
        other => format!("halted: {}", serde_json::to_string(other).unwrap_or_default()),
    };
    Ok(format!(
        "integrate: {} samples to t={} end=({}, {}) C_drift={} integral_drift={} {}",
        tr.samples.len(),
        fmt_g(end.t),
        fmt_g(end.state.x),
        fmt_g(end.state.y),
        fmt_g(tr.c_drift),
        fmt_g(tr.integral_drift),
        why
    ))
}
