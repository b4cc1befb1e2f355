//! wasm-bindgen bindings for the browser demo in `www/`.

use serde_json::json;
use tangentlab::null_lagrangian::{
    action, build_from_generators, endpoint_action, euler_lagrange_trace,
};
use tangentlab::secant_geometry::{
    verify_upper_limit_inclusion, InclusionOptions, SecantExtractor,
};
use tangentlab::{AxisBox, CoefficientSequence, Curve, Generators, GraphSpec, Grid, PointCloudSet};
use wasm_bindgen::prelude::*;

/// Largest grid the page may request; keeps a click under a second or so.
pub const MAX_GRID: usize = 301;

fn surface(f: &str, base: [f64; 2], grid: usize) -> Result<(GraphSpec, Grid), String> {
    if !(2..=MAX_GRID).contains(&grid) {
        return Err(format!("grid must be between 2 and {MAX_GRID}"));
    }
    let square = AxisBox::cube(2, -1.0, 1.0).map_err(|e| e.to_string())?;
    let spec = GraphSpec::parse(square.clone(), f, base.to_vec()).map_err(|e| e.to_string())?;
    let grid = Grid::new(square, grid).map_err(|e| e.to_string())?;
    Ok((spec, grid))
}

fn flatten(set: &PointCloudSet) -> Vec<f64> {
    set.points().iter().flat_map(|p| [p[0], p[1]]).collect()
}

/// Secant set of `f` on `[-1, 1]^2` as interleaved `x, y` coordinates.
pub fn secant_points(
    f: &str,
    base: [f64; 2],
    coeffs: [f64; 2],
    grid: usize,
) -> Result<Vec<f64>, String> {
    let (spec, grid) = surface(f, base, grid)?;
    let set = SecantExtractor::new(&spec, &grid)
        .and_then(|x| x.extract(&coeffs))
        .map_err(|e| e.to_string())?;
    Ok(flatten(&set))
}

/// Inclusion report for `tangent + direction / n`, `n = 1..=n_max`, as JSON,
/// with the upper limit and tangent set attached as flat coordinate lists.
pub fn upper_limit_json(
    f: &str,
    base: [f64; 2],
    direction: [f64; 2],
    n_max: usize,
    grid: usize,
) -> Result<String, String> {
    let (spec, grid) = surface(f, base, grid)?;
    let seq = CoefficientSequence::Approach {
        direction: direction.to_vec(),
        n_max,
    };
    let r = verify_upper_limit_inclusion(&spec, &seq, &grid, InclusionOptions::default())
        .map_err(|e| e.to_string())?;
    let mut v = serde_json::to_value(&r).map_err(|e| e.to_string())?;
    v["limsup_points"] = json!(flatten(&r.limsup));
    v["tangent_points"] = json!(flatten(&r.tangent_set));
    Ok(v.to_string())
}

/// Euler-Lagrange residual trace and action for a generator-built Lagrangian.
pub fn mechanics_json(
    generators: [&str; 3],
    curve: [&str; 3],
    a: f64,
    b: f64,
    samples: usize,
) -> Result<String, String> {
    let err = |e: tangentlab::Error| e.to_string();
    if !(1..=5000).contains(&samples) {
        return Err("samples must be between 1 and 5000".into());
    }
    let g = Generators::parse(generators[0], generators[1], generators[2]).map_err(err)?;
    let l = build_from_generators(g).map_err(err)?;
    let c = Curve::parse(curve[0], curve[1], curve[2], a, b).map_err(err)?;
    let trace = euler_lagrange_trace(&l, &c, samples).map_err(err)?;
    let q = action(&l, &c, 1024).map_err(err)?;
    let endpoint = endpoint_action(&l, &c).map_err(err)?;
    Ok(json!({
        "t": trace.iter().map(|r| r.t).collect::<Vec<_>>(),
        "residual": trace.iter().map(|r| r.norm_inf()).collect::<Vec<_>>(),
        "max_residual": trace.iter().map(|r| r.norm_inf()).fold(0.0, f64::max),
        "action": q.value,
        "richardson_delta": q.richardson_delta,
        "endpoint_action": endpoint,
        "lagrangian": {
            "P": l.p().to_string(),
            "Q": l.q().iter().map(|e| e.to_string()).collect::<Vec<_>>(),
        },
    })
    .to_string())
}

#[wasm_bindgen(js_name = secantSet)]
pub fn secant_set(
    f: &str,
    bx: f64,
    by: f64,
    cx: f64,
    cy: f64,
    grid: usize,
) -> Result<Vec<f64>, JsError> {
    secant_points(f, [bx, by], [cx, cy], grid).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = upperLimit)]
pub fn upper_limit(
    f: &str,
    bx: f64,
    by: f64,
    dx: f64,
    dy: f64,
    n_max: usize,
    grid: usize,
) -> Result<String, JsError> {
    upper_limit_json(f, [bx, by], [dx, dy], n_max, grid).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = nullLagrangian)]
#[allow(clippy::too_many_arguments)]
pub fn null_lagrangian(
    f: &str,
    g: &str,
    h: &str,
    x: &str,
    y: &str,
    z: &str,
    a: f64,
    b: f64,
    samples: usize,
) -> Result<String, JsError> {
    mechanics_json([f, g, h], [x, y, z], a, b, samples).map_err(|e| JsError::new(&e))
}
