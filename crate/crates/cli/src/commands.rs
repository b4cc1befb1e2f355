use std::fmt;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use tangentlab::compact_sets::{directed_hausdorff, eps_subset, PointCloudSet};
use tangentlab::io::{
    grid_for, read_point_cloud, write_point_cloud, write_point_cloud_csv, LimsupConfig,
    SecantConfig,
};
use tangentlab::null_lagrangian::{
    self, default_potential_sample, default_sample_grid, endpoint_action, euler_lagrange_trace,
    exactness_residuals, potential_from_exact_pair, velocity_dependence_report, ExactnessReport,
};
use tangentlab::secant_geometry::{
    flat_counterexample, tangent_coefficients, verify_upper_limit_inclusion, InclusionOptions,
    SecantExtractor,
};
use tangentlab::{Curve, Error, Expression, Grid, KineticEnergy, SeparableLagrangian, Tolerances};

use crate::config::{load, MechanicsConfig, PotentialConfig};
use crate::Common;

/// Why a command could not produce a verdict.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Numerical(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "configuration error: {m}"),
            Failure::Numerical(m) => write!(f, "numerical error: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Config(e.to_string())
        }
    }
}

type Outcome = Result<bool, Failure>;

const DEFAULT_SURFACE_GRID: usize = 201;
const DEFAULT_T_SAMPLES: usize = 1000;
const DEFAULT_POTENTIAL_GRID: usize = 21;
const POTENTIAL_FD_STEP: f64 = 1e-4;
const POTENTIAL_FD_TOLERANCE: f64 = 1e-6;

fn print_json(value: &impl Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Config(e.to_string()))?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "{text}").map_err(|e| Failure::Config(e.to_string()))
}

fn print_rows(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), Failure> {
    let io = |e: csv::Error| Failure::Config(e.to_string());
    let mut w = csv::Writer::from_writer(std::io::stdout().lock());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    w.flush().map_err(|e| Failure::Config(e.to_string()))
}

fn coords(p: &[f64; 3], dim: usize) -> Vec<f64> {
    p[..dim].to_vec()
}

fn grid_size(c: &Common, from_config: Option<usize>, default: usize) -> Result<usize, Failure> {
    let m = c.grid.or(from_config).unwrap_or(default);
    if m < 2 {
        return Err(Failure::Config(format!(
            "grid needs at least 2 points per axis, got {m}"
        )));
    }
    Ok(m)
}

fn positive(name: &str, v: Option<f64>) -> Result<Option<f64>, Failure> {
    match v {
        Some(x) if !(x.is_finite() && x >= f64::EPSILON) => Err(Failure::Config(format!(
            "{name} must be at least machine precision, got {x}"
        ))),
        other => Ok(other),
    }
}

fn ensure_out_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Failure::Config(format!("cannot create {}: {e}", dir.display())))
}

/// Writes `set` as `<out>/<name>.csv` or describes it inline.
fn emit_set(
    c: &Common,
    name: &str,
    set: &PointCloudSet,
    mut summary: Value,
) -> Result<(), Failure> {
    let dim = set.dim();
    summary["count"] = json!(set.len());
    summary["h"] = json!(set.resolution());
    summary["box"] = json!(set.domain().bounds());
    if let Some(dir) = &c.out {
        ensure_out_dir(dir)?;
        let path = dir.join(format!("{name}.csv"));
        let manifest = write_point_cloud(set, &path)?;
        summary["csv"] = json!(path);
        summary["manifest"] = json!(manifest);
    } else if c.csv {
        write_point_cloud_csv(set, std::io::stdout().lock())?;
        return Ok(());
    } else {
        summary["points"] = json!(set
            .points()
            .iter()
            .map(|p| coords(p, dim))
            .collect::<Vec<_>>());
    }
    print_json(&summary)
}

pub fn secant(c: &Common) -> Outcome {
    let cfg: SecantConfig = load(c.config.as_deref())?;
    let spec = cfg.surface.build()?;
    let m = grid_size(c, cfg.grid, DEFAULT_SURFACE_GRID)?;
    let grid = grid_for(&spec, m)?;
    let tangent = tangent_coefficients(&spec)?;
    let coeffs = cfg.coefficients.clone().unwrap_or_else(|| tangent.clone());
    let set = SecantExtractor::new(&spec, &grid)?.extract(&coeffs)?;
    let summary = json!({
        "command": "secant",
        "f": spec.field().to_string(),
        "base": spec.base(),
        "coefficients": coeffs,
        "tangent_coefficients": tangent,
        "grid": m,
    });
    emit_set(c, "secant", &set, summary)?;
    Ok(true)
}

pub fn counterexample(c: &Common, dim: usize, n: usize) -> Outcome {
    if !(2..=3).contains(&dim) {
        return Err(Failure::Config(format!("--dim must be 2 or 3, got {dim}")));
    }
    let m = grid_size(c, None, if dim == 2 { 401 } else { 101 })?;
    let (set, description) = flat_counterexample(dim, n, m)?;
    let summary = json!({
        "command": "counterexample",
        "grid": m,
        "description": description,
    });
    emit_set(c, "counterexample", &set, summary)?;
    Ok(true)
}

pub fn limsup(c: &Common) -> Outcome {
    let cfg: LimsupConfig = load(c.config.as_deref())?;
    let spec = cfg.surface.build()?;
    let m = grid_size(c, cfg.grid, DEFAULT_SURFACE_GRID)?;
    let grid = grid_for(&spec, m)?;
    let options = InclusionOptions {
        eps: positive("eps", c.eps.or(cfg.eps))?,
        tail_fraction: cfg
            .tail_fraction
            .unwrap_or(Tolerances::DEFAULT.tail_fraction),
    };
    let report = verify_upper_limit_inclusion(&spec, &cfg.sequence, &grid, options)?;
    if let Some(dir) = &c.out {
        ensure_out_dir(dir)?;
        write_point_cloud(&report.limsup, &dir.join("limsup.csv"))?;
        write_point_cloud(&report.tangent_set, &dir.join("tangent.csv"))?;
    }
    if c.csv {
        let dim = spec.dim();
        print_rows(
            &["role", "x", "y", "z"][..dim + 1],
            report
                .limsup
                .points()
                .iter()
                .map(|p| ("limsup", p))
                .chain(report.tangent_set.points().iter().map(|p| ("tangent", p)))
                .map(|(role, p)| {
                    std::iter::once(role.to_string())
                        .chain(p[..dim].iter().map(|v| v.to_string()))
                        .collect()
                }),
        )?;
    } else {
        let mut value =
            serde_json::to_value(&report).map_err(|e| Failure::Config(e.to_string()))?;
        value["grid"] = json!(m);
        value["f"] = json!(spec.field().to_string());
        value["base"] = json!(spec.base());
        print_json(&value)?;
    }
    Ok(report.inclusion)
}

pub fn hausdorff(c: &Common, a: &Path, b: &Path) -> Outcome {
    let sa = read_point_cloud(a)?;
    let sb = read_point_cloud(b)?;
    if sa.dim() != sb.dim() {
        return Err(Failure::Config(format!(
            "dimension mismatch: {} vs {}",
            sa.dim(),
            sb.dim()
        )));
    }
    let dim = sa.dim();
    let ab = directed_hausdorff(&sa, &sb)?;
    let ba = directed_hausdorff(&sb, &sa)?;
    let eps = positive("eps", c.eps)?;
    let inclusion = eps.map(|e| eps_subset(&sa, &sb, e)).transpose()?;
    if c.csv {
        print_rows(
            &["hausdorff", "a_to_b", "b_to_a"],
            [vec![
                ab.distance.max(ba.distance).to_string(),
                ab.distance.to_string(),
                ba.distance.to_string(),
            ]],
        )?;
    } else {
        print_json(&json!({
            "command": "hausdorff",
            "hausdorff": ab.distance.max(ba.distance),
            "a_to_b": {"distance": ab.distance, "witness": coords(&ab.witness, dim)},
            "b_to_a": {"distance": ba.distance, "witness": coords(&ba.witness, dim)},
            "eps_subset": inclusion.map(|i| json!({
                "eps": eps,
                "holds": i.holds,
                "distance": i.distance,
                "witness": i.witness.map(|w| coords(&w, dim)),
            })),
        }))?;
    }
    Ok(inclusion.is_none_or(|i| i.holds))
}

struct Mechanics {
    lagrangian: SeparableLagrangian,
    curves: Vec<Curve>,
    sample: Grid,
    t_samples: usize,
    panels: usize,
    kinetic: KineticEnergy,
}

fn load_mechanics(c: &Common) -> Result<Mechanics, Failure> {
    let cfg: MechanicsConfig = load(c.config.as_deref())?;
    let lagrangian = cfg.lagrangian.build()?;
    let curves = cfg
        .curves
        .iter()
        .map(|cc| cc.build())
        .collect::<Result<Vec<_>, _>>()?;
    let sample = match &cfg.sample {
        Some(s) => s.grid()?,
        None => default_sample_grid()?,
    };
    if sample.dim() != 4 {
        return Err(Failure::Config(format!(
            "exactness sample box must be 4-dimensional (t, x, y, z), got {}",
            sample.dim()
        )));
    }
    let panels = c
        .panels
        .or(cfg.panels)
        .unwrap_or(Tolerances::DEFAULT.simpson_panels);
    if panels == 0 || !panels.is_multiple_of(2) {
        return Err(Failure::Config(format!(
            "panels must be even and positive, got {panels}"
        )));
    }
    let t_samples = cfg.t_samples.unwrap_or(DEFAULT_T_SAMPLES);
    if t_samples == 0 {
        return Err(Failure::Config("t_samples must be positive".into()));
    }
    let kinetic = match &cfg.kinetic {
        Some(src) => KineticEnergy::parse(src)?,
        None => KineticEnergy::standard(),
    };
    Ok(Mechanics {
        lagrangian,
        curves,
        sample,
        t_samples,
        panels,
        kinetic,
    })
}

fn require_curves(m: &Mechanics) -> Result<(), Failure> {
    if m.curves.is_empty() {
        return Err(Failure::Config("config lists no curves".into()));
    }
    Ok(())
}

#[derive(Serialize)]
struct CurveResidual {
    curve: usize,
    interval: (f64, f64),
    max_residual: f64,
    components: [ComponentMax; 3],
}

/// Largest absolute residual of one component and the `t` where it occurs.
#[derive(Clone, Copy, Serialize)]
struct ComponentMax {
    max_abs: f64,
    t: f64,
}

fn el_residuals(m: &Mechanics) -> Result<(Vec<CurveResidual>, bool), Failure> {
    let mut out = Vec::new();
    let mut warning = false;
    for (i, curve) in m.curves.iter().enumerate() {
        let trace = euler_lagrange_trace(&m.lagrangian, curve, m.t_samples)?;
        let mut components = [ComponentMax {
            max_abs: 0.0,
            t: f64::NAN,
        }; 3];
        for r in &trace {
            warning |= r.exactness_warning;
            for k in 0..3 {
                let v = r.components[k].abs();
                if v > components[k].max_abs || components[k].t.is_nan() {
                    components[k] = ComponentMax { max_abs: v, t: r.t };
                }
            }
        }
        out.push(CurveResidual {
            curve: i,
            interval: curve.interval(),
            max_residual: components.iter().map(|c| c.max_abs).fold(0.0, f64::max),
            components,
        });
    }
    Ok((out, warning))
}

pub fn el_check(c: &Common) -> Outcome {
    let m = load_mechanics(c)?;
    require_curves(&m)?;
    let tol = Tolerances::DEFAULT.euler_lagrange;
    if c.csv {
        let mut rows = Vec::new();
        for (i, curve) in m.curves.iter().enumerate() {
            for r in euler_lagrange_trace(&m.lagrangian, curve, m.t_samples)? {
                rows.push(vec![
                    i.to_string(),
                    r.t.to_string(),
                    r.components[0].to_string(),
                    r.components[1].to_string(),
                    r.components[2].to_string(),
                ]);
            }
        }
        let worst = rows
            .iter()
            .flat_map(|r| r[2..].iter())
            .filter_map(|v| v.parse::<f64>().ok())
            .fold(0.0, |a: f64, b| a.max(b.abs()));
        print_rows(&["curve", "t", "r_x", "r_y", "r_z"], rows)?;
        return Ok(worst <= tol);
    }
    let (curves, warning) = el_residuals(&m)?;
    let worst = curves.iter().map(|r| r.max_residual).fold(0.0, f64::max);
    print_json(&json!({
        "command": "el-check",
        "tolerance": tol,
        "t_samples": m.t_samples,
        "max_residual": worst,
        "exactness_warning": warning,
        "curves": curves,
    }))?;
    Ok(worst <= tol)
}

#[derive(Serialize)]
struct ActionRow {
    curve: usize,
    interval: (f64, f64),
    action: f64,
    richardson_delta: f64,
    endpoint_action: Option<f64>,
}

fn actions(m: &Mechanics) -> Result<Vec<ActionRow>, Failure> {
    m.curves
        .iter()
        .enumerate()
        .map(|(i, curve)| {
            let q = null_lagrangian::action(&m.lagrangian, curve, m.panels)?;
            let endpoint = match m.lagrangian.generators() {
                Some(_) => Some(endpoint_action(&m.lagrangian, curve)?),
                None => None,
            };
            Ok(ActionRow {
                curve: i,
                interval: curve.interval(),
                action: q.value,
                richardson_delta: q.richardson_delta,
                endpoint_action: endpoint,
            })
        })
        .collect()
}

/// Agreement with the endpoint formula, when generators are known.
fn actions_agree(rows: &[ActionRow]) -> bool {
    let tol = Tolerances::DEFAULT.euler_lagrange;
    rows.iter().all(|r| {
        r.endpoint_action
            .is_none_or(|e| (r.action - e).abs() <= tol)
    })
}

pub fn action(c: &Common) -> Outcome {
    let m = load_mechanics(c)?;
    require_curves(&m)?;
    let rows = actions(&m)?;
    let ok = actions_agree(&rows);
    if c.csv {
        print_rows(
            &[
                "curve",
                "a",
                "b",
                "action",
                "richardson_delta",
                "endpoint_action",
            ],
            rows.iter().map(|r| {
                vec![
                    r.curve.to_string(),
                    r.interval.0.to_string(),
                    r.interval.1.to_string(),
                    r.action.to_string(),
                    r.richardson_delta.to_string(),
                    r.endpoint_action.map_or(String::new(), |e| e.to_string()),
                ]
            }),
        )?;
    } else {
        print_json(&json!({
            "command": "action",
            "panels": m.panels,
            "tolerance": Tolerances::DEFAULT.euler_lagrange,
            "actions": rows,
        }))?;
    }
    Ok(ok)
}

fn exactness_verdict(r: &ExactnessReport) -> bool {
    r.max() <= Tolerances::DEFAULT.exactness
}

pub fn exactness(c: &Common) -> Outcome {
    let m = load_mechanics(c)?;
    let r = exactness_residuals(&m.lagrangian, &m.sample)?;
    if c.csv {
        print_rows(
            &["equation", "max_residual", "t", "x", "y", "z"],
            (0..3).map(|i| {
                let mut row = vec![
                    ["x", "y", "z"][i].to_string(),
                    r.max_residuals[i].to_string(),
                ];
                row.extend(r.witnesses[i].iter().map(|v| v.to_string()));
                row
            }),
        )?;
    } else {
        print_json(&json!({
            "command": "exactness",
            "tolerance": Tolerances::DEFAULT.exactness,
            "report": r,
        }))?;
    }
    Ok(exactness_verdict(&r))
}

pub fn potential(c: &Common) -> Outcome {
    let cfg: PotentialConfig = load(c.config.as_deref())?;
    if cfg.var == "t" {
        return Err(Failure::Config(
            "the spatial variable must differ from t".into(),
        ));
    }
    let vars = ["t", cfg.var.as_str()];
    let p = Expression::parse(&cfg.p, &vars)?;
    let q = Expression::parse(&cfg.q, &vars)?;
    let sample = match &cfg.sample {
        Some(s) => s.grid()?,
        None => default_potential_sample()?,
    };
    let panels = c
        .panels
        .or(cfg.panels)
        .unwrap_or(Tolerances::DEFAULT.simpson_panels);
    let reference = (cfg.reference[0], cfg.reference[1]);
    let u = match potential_from_exact_pair(&p, &q, reference, &sample, panels) {
        Ok(u) => u,
        Err(Error::NotExact { residual, at }) => {
            print_json(&json!({
                "command": "potential",
                "exact": false,
                "tolerance": Tolerances::DEFAULT.exactness,
                "max_residual": residual,
                "at": at,
            }))?;
            return Ok(false);
        }
        Err(e) => return Err(e.into()),
    };
    let m = grid_size(c, None, DEFAULT_POTENTIAL_GRID)?;
    let check_grid = Grid::new(sample.domain().clone(), m)?;
    let consistency = u.consistency(&check_grid, POTENTIAL_FD_STEP)?;
    let values = cfg
        .at
        .iter()
        .map(|&[t, s]| Ok(json!({"t": t, "s": s, "u": u.eval(t, s)?})))
        .collect::<Result<Vec<_>, Error>>()?;
    let ok = consistency.max_dt_residual <= POTENTIAL_FD_TOLERANCE
        && consistency.max_ds_residual <= POTENTIAL_FD_TOLERANCE;
    if c.csv {
        print_rows(
            &["t", "s", "u"],
            cfg.at
                .iter()
                .zip(&values)
                .map(|(p, v)| vec![p[0].to_string(), p[1].to_string(), v["u"].to_string()]),
        )?;
    } else {
        print_json(&json!({
            "command": "potential",
            "exact": true,
            "var": cfg.var,
            "reference": cfg.reference,
            "panels": panels,
            "values": values,
            "consistency": consistency,
            "consistency_grid": m,
            "consistency_box": sample.domain().bounds(),
            "tolerance": POTENTIAL_FD_TOLERANCE,
        }))?;
    }
    Ok(ok)
}

pub fn mechanics(c: &Common) -> Outcome {
    if c.csv {
        return Err(Failure::Config("mechanics reports are JSON only".into()));
    }
    let m = load_mechanics(c)?;
    let exact = exactness_residuals(&m.lagrangian, &m.sample)?;
    let (el, _) = el_residuals(&m)?;
    let rows = actions(&m)?;
    let velocity = velocity_dependence_report(&m.kinetic, &m.lagrangian)?;
    let el_max = el.iter().map(|r| r.max_residual).fold(0.0, f64::max);
    let tol = Tolerances::DEFAULT;
    let ok = exactness_verdict(&exact) && el_max <= tol.euler_lagrange && actions_agree(&rows);
    print_json(&json!({
        "command": "mechanics",
        "verified": ok,
        "tolerances": {"exactness": tol.exactness, "euler_lagrange": tol.euler_lagrange},
        "t_samples": m.t_samples,
        "panels": m.panels,
        "exactness": exact,
        "euler_lagrange": {"max_residual": el_max, "curves": el},
        "actions": rows,
        "velocity_dependence": velocity,
    }))?;
    Ok(ok)
}
