//! Separable Lagrangians `L = P(t,x,y,z) + Q1(t,x) x' + Q2(t,y) y' + Q3(t,z) z'`,
//! their exactness conditions, Euler-Lagrange residuals along curves,
//! actions and potentials.

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::Expression;
use crate::numerics::{integrate_1d, integrate_between, AxisBox, Grid, Quadrature};
use crate::tolerances::Tolerances;

pub const STATE_VARS: [&str; 4] = ["t", "x", "y", "z"];
pub const PHASE_VARS: [&str; 7] = ["t", "x", "y", "z", "x'", "y'", "z'"];
pub const VELOCITY_VARS: [&str; 3] = ["x'", "y'", "z'"];
const SPATIAL: [&str; 3] = ["x", "y", "z"];

/// Re-declares `e` over `(t, x, y, z)`, rejecting variables outside `allowed`.
fn restrict(e: &Expression, allowed: &[&str], role: &str) -> Result<Expression> {
    for v in e.free_vars() {
        if !allowed.contains(&v) {
            return Err(Error::Precondition(format!(
                "{role} may only depend on {allowed:?}, but uses `{v}`"
            )));
        }
    }
    e.with_vars(&STATE_VARS)
}

fn sub_vars(i: usize) -> [&'static str; 2] {
    ["t", SPATIAL[i]]
}

/// Generator triple `f(t,x)`, `g(t,y)`, `h(t,z)`, stored over `(t,x,y,z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Generators {
    parts: [Expression; 3],
}

impl Generators {
    pub fn new(f: &Expression, g: &Expression, h: &Expression) -> Result<Self> {
        Ok(Self {
            parts: [
                restrict(f, &sub_vars(0), "generator f")?,
                restrict(g, &sub_vars(1), "generator g")?,
                restrict(h, &sub_vars(2), "generator h")?,
            ],
        })
    }

    pub fn parse(f: &str, g: &str, h: &str) -> Result<Self> {
        Self::new(
            &Expression::parse(f, &sub_vars(0))?,
            &Expression::parse(g, &sub_vars(1))?,
            &Expression::parse(h, &sub_vars(2))?,
        )
    }

    pub fn parts(&self) -> &[Expression; 3] {
        &self.parts
    }

    /// `f(t, x) + g(t, y) + h(t, z)` at a state point.
    pub fn total(&self, state: &[f64; 4]) -> Result<f64> {
        let mut sum = 0.0;
        for part in &self.parts {
            sum += part.eval_at(state)?;
        }
        Ok(sum)
    }
}

/// Per-equation maxima of `|∂P/∂q_i - ∂Q_i/∂t|` over a sample grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactnessReport {
    pub max_residuals: [f64; 3],
    pub witnesses: [Vec<f64>; 3],
    /// Same residuals with `P` replaced by its `i`-th summand, when `P` was given split.
    pub component_residuals: Option<[f64; 3]>,
    /// Largest pointwise gap between full and component residuals.
    pub component_agreement: Option<f64>,
    pub sample_points: usize,
    pub sample_box: Vec<[f64; 2]>,
    pub points_per_axis: usize,
}

impl ExactnessReport {
    pub fn max(&self) -> f64 {
        self.max_residuals.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug)]
pub struct SeparableLagrangian {
    p: Expression,
    q: [Expression; 3],
    p_parts: Option<[Expression; 3]>,
    generators: Option<Generators>,
    dp_dq: [Expression; 3],
    dq_dt: [Expression; 3],
    dq_dq: [Expression; 3],
    exactness: OnceLock<Option<f64>>,
}

impl Clone for SeparableLagrangian {
    fn clone(&self) -> Self {
        Self {
            p: self.p.clone(),
            q: self.q.clone(),
            p_parts: self.p_parts.clone(),
            generators: self.generators.clone(),
            dp_dq: self.dp_dq.clone(),
            dq_dt: self.dq_dt.clone(),
            dq_dq: self.dq_dq.clone(),
            exactness: OnceLock::new(),
        }
    }
}

impl SeparableLagrangian {
    pub fn new(p: &Expression, q1: &Expression, q2: &Expression, q3: &Expression) -> Result<Self> {
        let p = restrict(p, &STATE_VARS, "P")?;
        let q = [
            restrict(q1, &sub_vars(0), "Q1")?,
            restrict(q2, &sub_vars(1), "Q2")?,
            restrict(q3, &sub_vars(2), "Q3")?,
        ];
        Self::assemble(p, q, None, None)
    }

    /// `P = P1(t,x) + P2(t,y) + P3(t,z)`; keeps the summands for component residuals.
    pub fn from_split(p: [&Expression; 3], q: [&Expression; 3]) -> Result<Self> {
        let parts = [
            restrict(p[0], &sub_vars(0), "P1")?,
            restrict(p[1], &sub_vars(1), "P2")?,
            restrict(p[2], &sub_vars(2), "P3")?,
        ];
        let full = parts[0].clone() + parts[1].clone() + parts[2].clone();
        let q = [
            restrict(q[0], &sub_vars(0), "Q1")?,
            restrict(q[1], &sub_vars(1), "Q2")?,
            restrict(q[2], &sub_vars(2), "Q3")?,
        ];
        Self::assemble(full, q, Some(parts), None)
    }

    pub fn parse(p: &str, q1: &str, q2: &str, q3: &str) -> Result<Self> {
        Self::new(
            &Expression::parse(p, &STATE_VARS)?,
            &Expression::parse(q1, &sub_vars(0))?,
            &Expression::parse(q2, &sub_vars(1))?,
            &Expression::parse(q3, &sub_vars(2))?,
        )
    }

    fn assemble(
        p: Expression,
        q: [Expression; 3],
        p_parts: Option<[Expression; 3]>,
        generators: Option<Generators>,
    ) -> Result<Self> {
        let mut dp_dq = Vec::with_capacity(3);
        let mut dq_dt = Vec::with_capacity(3);
        let mut dq_dq = Vec::with_capacity(3);
        for i in 0..3 {
            dp_dq.push(p.differentiate(SPATIAL[i])?);
            dq_dt.push(q[i].differentiate("t")?);
            dq_dq.push(q[i].differentiate(SPATIAL[i])?);
        }
        let arr =
            |v: Vec<Expression>| -> [Expression; 3] { v.try_into().expect("three components") };
        Ok(Self {
            p,
            q,
            p_parts,
            generators,
            dp_dq: arr(dp_dq),
            dq_dt: arr(dq_dt),
            dq_dq: arr(dq_dq),
            exactness: OnceLock::new(),
        })
    }

    pub fn p(&self) -> &Expression {
        &self.p
    }

    pub fn q(&self) -> &[Expression; 3] {
        &self.q
    }

    pub fn p_parts(&self) -> Option<&[Expression; 3]> {
        self.p_parts.as_ref()
    }

    pub fn generators(&self) -> Option<&Generators> {
        self.generators.as_ref()
    }

    /// `L` as one expression over `(t, x, y, z, x', y', z')`.
    pub fn to_expression(&self) -> Result<Expression> {
        let mut l = self.p.with_vars(&PHASE_VARS)?;
        for (i, q) in self.q.iter().enumerate() {
            let v = Expression::variable(VELOCITY_VARS[i], &PHASE_VARS)?;
            l = l + q.with_vars(&PHASE_VARS)? * v;
        }
        Ok(l)
    }

    /// `L(t, q, q')` at a phase point ordered like [`PHASE_VARS`].
    pub fn eval(&self, phase: &[f64; 7]) -> Result<f64> {
        let state = &phase[..4];
        let mut l = self.p.eval_at(state)?;
        for (i, q) in self.q.iter().enumerate() {
            l += q.eval_at(state)? * phase[4 + i];
        }
        Ok(l)
    }

    /// Max exactness residual over the default sample, computed once.
    /// `None` when the sample could not be evaluated.
    pub fn cached_max_exactness(&self) -> Option<f64> {
        *self.exactness.get_or_init(|| {
            default_sample_grid()
                .ok()
                .and_then(|g| exactness_residuals(self, &g).ok())
                .map(|r| r.max())
        })
    }
}

/// `P = f_t + g_t + h_t`, `Q1 = f_x`, `Q2 = g_y`, `Q3 = h_z`.
pub fn build_from_generators(generators: Generators) -> Result<SeparableLagrangian> {
    let mut p_parts = Vec::with_capacity(3);
    let mut q = Vec::with_capacity(3);
    for (i, part) in generators.parts.iter().enumerate() {
        p_parts.push(part.differentiate("t")?);
        q.push(part.differentiate(SPATIAL[i])?);
    }
    let p = p_parts[0].clone() + p_parts[1].clone() + p_parts[2].clone();
    let p = p.with_vars(&STATE_VARS)?;
    let p_parts: [Expression; 3] = p_parts.try_into().expect("three components");
    let q: [Expression; 3] = q.try_into().expect("three components");
    SeparableLagrangian::assemble(p, q, Some(p_parts), Some(generators))
}

/// `[-1, 1]^4` with the default number of points per axis.
pub fn default_sample_grid() -> Result<Grid> {
    Grid::new(
        AxisBox::cube(4, -1.0, 1.0)?,
        Tolerances::DEFAULT.exactness_points_per_axis,
    )
}

pub fn exactness_residuals(l: &SeparableLagrangian, sample: &Grid) -> Result<ExactnessReport> {
    if sample.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: sample.dim(),
        });
    }
    if sample.is_empty() {
        return Err(Error::Precondition("exactness sample is empty".into()));
    }
    let mut max = [0.0f64; 3];
    let mut witnesses: [Vec<f64>; 3] = Default::default();
    let mut comp_max = [0.0f64; 3];
    let mut agreement = 0.0f64;
    let mut p = [0.0; 4];
    for k in 0..sample.len() {
        sample.point_into(k, &mut p);
        let located = |e: Error| e.at(&p);
        for i in 0..3 {
            let dq = l.q[i].partial_at(0, &p).map_err(located)?;
            let full = (l.p.partial_at(i + 1, &p).map_err(located)? - dq).abs();
            if full > max[i] || witnesses[i].is_empty() {
                max[i] = max[i].max(full);
                if full >= max[i] {
                    witnesses[i] = p.to_vec();
                }
            }
            if let Some(parts) = &l.p_parts {
                let comp = (parts[i].partial_at(i + 1, &p).map_err(located)? - dq).abs();
                comp_max[i] = comp_max[i].max(comp);
                agreement = agreement.max((full - comp).abs());
            }
        }
    }
    Ok(ExactnessReport {
        max_residuals: max,
        witnesses,
        component_residuals: l.p_parts.as_ref().map(|_| comp_max),
        component_agreement: l.p_parts.as_ref().map(|_| agreement),
        sample_points: sample.len(),
        sample_box: sample.domain().clone().into(),
        points_per_axis: sample.points_per_axis(),
    })
}

/// A curve `t ↦ (x(t), y(t), z(t))` on `(a, b)` with symbolic derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    coords: [Expression; 3],
    velocity: [Expression; 3],
    a: f64,
    b: f64,
}

impl Curve {
    pub fn new(x: &Expression, y: &Expression, z: &Expression, a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::Precondition(format!(
                "curve interval needs finite a < b, got ({a}, {b})"
            )));
        }
        let mut coords = Vec::with_capacity(3);
        let mut velocity = Vec::with_capacity(3);
        for (name, e) in SPATIAL.iter().zip([x, y, z]) {
            let e = restrict(e, &["t"], &format!("curve component {name}"))?.with_vars(&["t"])?;
            let d = e.differentiate("t")?;
            // Second derivative must exist symbolically as well.
            d.differentiate("t")?;
            coords.push(e);
            velocity.push(d);
        }
        Ok(Self {
            coords: coords.try_into().expect("three components"),
            velocity: velocity.try_into().expect("three components"),
            a,
            b,
        })
    }

    pub fn parse(x: &str, y: &str, z: &str, a: f64, b: f64) -> Result<Self> {
        let p = |s: &str| Expression::parse(s, &["t"]);
        Self::new(&p(x)?, &p(y)?, &p(z)?, a, b)
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn coords(&self) -> &[Expression; 3] {
        &self.coords
    }

    pub fn state(&self, t: f64) -> Result<[f64; 4]> {
        let mut s = [t, 0.0, 0.0, 0.0];
        for i in 0..3 {
            s[i + 1] = self.coords[i].eval_at(&[t])?;
        }
        Ok(s)
    }

    /// `(t, r(t), r'(t))`.
    pub fn phase(&self, t: f64) -> Result<[f64; 7]> {
        let s = self.state(t)?;
        let mut out = [s[0], s[1], s[2], s[3], 0.0, 0.0, 0.0];
        for i in 0..3 {
            out[4 + i] = self.velocity[i].eval_at(&[t])?;
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ElResidual {
    pub t: f64,
    pub components: [f64; 3],
    /// The Lagrangian's exactness residual exceeds tolerance (or could not be sampled).
    pub exactness_warning: bool,
}

impl ElResidual {
    pub fn norm_inf(&self) -> f64 {
        self.components.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

/// `∂L/∂q_i - d/dt ∂L/∂q_i'` at `t`, with `d/dt Q_i = ∂Q_i/∂t + ∂Q_i/∂q_i q_i'`.
pub fn euler_lagrange_residual(
    l: &SeparableLagrangian,
    curve: &Curve,
    t: f64,
) -> Result<ElResidual> {
    if !(t > curve.a && t < curve.b) {
        return Err(Error::Precondition(format!(
            "t = {t} lies outside the open interval ({}, {})",
            curve.a, curve.b
        )));
    }
    let phase = curve.phase(t)?;
    let state = &phase[..4];
    let mut components = [0.0; 3];
    for i in 0..3 {
        let v = phase[4 + i];
        let dq_dq = l.dq_dq[i].eval_at(state)?;
        let dl_dq = l.dp_dq[i].eval_at(state)? + dq_dq * v;
        let ddt = l.dq_dt[i].eval_at(state)? + dq_dq * v;
        components[i] = dl_dq - ddt;
    }
    let warn = l
        .cached_max_exactness()
        .is_none_or(|m| m > Tolerances::DEFAULT.euler_lagrange);
    Ok(ElResidual {
        t,
        components,
        exactness_warning: warn,
    })
}

/// Residuals at `samples` interior midpoints of `(a, b)`.
pub fn euler_lagrange_trace(
    l: &SeparableLagrangian,
    curve: &Curve,
    samples: usize,
) -> Result<Vec<ElResidual>> {
    let (a, b) = curve.interval();
    (0..samples)
        .map(|k| euler_lagrange_residual(l, curve, a + (b - a) * (k as f64 + 0.5) / samples as f64))
        .collect()
}

/// `∫_a^b L(t, r(t), r'(t)) dt` by composite Simpson.
pub fn action(l: &SeparableLagrangian, curve: &Curve, panels: usize) -> Result<Quadrature> {
    let (a, b) = curve.interval();
    integrate_1d(
        |t| l.eval(&curve.phase(t)?).map_err(|e| e.at(&[t])),
        a,
        b,
        panels,
    )
}

/// `(f + g + h)(b, r(b)) - (f + g + h)(a, r(a))`.
pub fn endpoint_action(l: &SeparableLagrangian, curve: &Curve) -> Result<f64> {
    let g = l
        .generators
        .as_ref()
        .ok_or_else(|| Error::Precondition("endpoint action needs generators".into()))?;
    let (a, b) = curve.interval();
    Ok(g.total(&curve.state(b)?)? - g.total(&curve.state(a)?)?)
}

/// `u(t, s) = ∫_{t1}^{t} P(τ, s) dτ + ∫_{s1}^{s} Q(t1, σ) dσ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialFunction {
    p: Expression,
    q: Expression,
    reference: (f64, f64),
    panels: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialConsistency {
    pub max_dt_residual: f64,
    pub max_ds_residual: f64,
    pub step: f64,
    pub points: usize,
}

impl PotentialFunction {
    pub fn reference(&self) -> (f64, f64) {
        self.reference
    }

    pub fn eval(&self, t: f64, s: f64) -> Result<f64> {
        let (t1, s1) = self.reference;
        let time = integrate_between(|tau| self.p.eval_at(&[tau, s]), t1, t, self.panels)?;
        let space = integrate_between(|sigma| self.q.eval_at(&[t1, sigma]), s1, s, self.panels)?;
        Ok(time.value + space.value)
    }

    /// Central-difference check of `∂u/∂t = P` and `∂u/∂s = Q` on a 2-D grid.
    pub fn consistency(&self, grid: &Grid, step: f64) -> Result<PotentialConsistency> {
        if grid.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: grid.dim(),
            });
        }
        let mut out = PotentialConsistency {
            max_dt_residual: 0.0,
            max_ds_residual: 0.0,
            step,
            points: grid.len(),
        };
        let mut p = [0.0; 2];
        for k in 0..grid.len() {
            grid.point_into(k, &mut p);
            let [t, s] = p;
            let du_dt = (self.eval(t + step, s)? - self.eval(t - step, s)?) / (2.0 * step);
            let du_ds = (self.eval(t, s + step)? - self.eval(t, s - step)?) / (2.0 * step);
            out.max_dt_residual = out.max_dt_residual.max((du_dt - self.p.eval_at(&p)?).abs());
            out.max_ds_residual = out.max_ds_residual.max((du_ds - self.q.eval_at(&p)?).abs());
        }
        Ok(out)
    }
}

/// Builds the potential of `P dt + Q ds` after checking `∂P/∂s = ∂Q/∂t`
/// on `sample` (a 2-D grid over `(t, s)`). `p` and `q` are declared over
/// the same two variables, time first.
pub fn potential_from_exact_pair(
    p: &Expression,
    q: &Expression,
    reference: (f64, f64),
    sample: &Grid,
    panels: usize,
) -> Result<PotentialFunction> {
    if p.vars().len() != 2 || p.vars() != q.vars() {
        return Err(Error::Precondition(format!(
            "P and Q must share two variables (time, space), got {:?} and {:?}",
            p.vars(),
            q.vars()
        )));
    }
    if sample.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: sample.dim(),
        });
    }
    let mut worst = (0.0f64, Vec::new());
    let mut pt = [0.0; 2];
    for k in 0..sample.len() {
        sample.point_into(k, &mut pt);
        let r = (p.partial_at(1, &pt).map_err(|e| e.at(&pt))?
            - q.partial_at(0, &pt).map_err(|e| e.at(&pt))?)
        .abs();
        if r > worst.0 || worst.1.is_empty() {
            worst = (r.max(worst.0), pt.to_vec());
        }
    }
    if worst.0 > Tolerances::DEFAULT.exactness {
        return Err(Error::NotExact {
            residual: worst.0,
            at: worst.1,
        });
    }
    Ok(PotentialFunction {
        p: p.clone(),
        q: q.clone(),
        reference,
        panels,
    })
}

pub fn default_potential_sample() -> Result<Grid> {
    Grid::new(
        AxisBox::cube(2, -1.0, 1.0)?,
        Tolerances::DEFAULT.exactness_points_per_axis,
    )
}

/// Kinetic energy over (a subset of) `(t, x, y, z, x', y', z')`.
#[derive(Debug, Clone, PartialEq)]
pub struct KineticEnergy {
    t: Expression,
}

impl KineticEnergy {
    pub fn new(t: &Expression) -> Result<Self> {
        Ok(Self {
            t: t.with_vars(&PHASE_VARS)?,
        })
    }

    pub fn parse(src: &str) -> Result<Self> {
        Self::new(&Expression::parse(src, &PHASE_VARS)?)
    }

    /// `(x'^2 + y'^2 + z'^2) / 2`.
    pub fn standard() -> Self {
        Self::parse("0.5*(x'^2 + y'^2 + z'^2)").expect("valid kinetic energy")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VelocityComponent {
    pub velocity: String,
    pub dependent: bool,
    /// `Q_i` is nonzero somewhere on the sample.
    pub q_induced: bool,
    /// `∂T/∂q_i'` is nonzero somewhere on the sample.
    pub t_induced: bool,
    pub max_abs_partial: f64,
    pub witness: Vec<f64>,
    pub partial: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VelocityReport {
    pub potential: String,
    pub velocity_dependent: bool,
    pub components: Vec<VelocityComponent>,
    pub samples: usize,
    pub seed: u64,
}

pub const VELOCITY_SAMPLES: usize = 64;
pub const VELOCITY_SEED: u64 = 0x5eed;
const NONZERO: f64 = 1e-12;

/// Forms `U = T - L` and tests `∂U/∂q_i' ≠ 0` at seeded random points of `[-1, 1]^7`.
pub fn velocity_dependence_report(
    kinetic: &KineticEnergy,
    l: &SeparableLagrangian,
) -> Result<VelocityReport> {
    let u = kinetic.t.clone() - l.to_expression()?;
    let mut rng = ChaCha8Rng::seed_from_u64(VELOCITY_SEED);
    let samples: Vec<[f64; 7]> = (0..VELOCITY_SAMPLES)
        .map(|_| std::array::from_fn(|_| rng.gen_range(-1.0..=1.0)))
        .collect();
    let mut components = Vec::with_capacity(3);
    for (i, v) in VELOCITY_VARS.iter().enumerate() {
        let du = u.differentiate(v)?;
        let dt = kinetic.t.differentiate(v)?;
        let mut comp = VelocityComponent {
            velocity: v.to_string(),
            dependent: false,
            q_induced: false,
            t_induced: false,
            max_abs_partial: 0.0,
            witness: Vec::new(),
            partial: du.to_string(),
        };
        for s in &samples {
            let val = du.eval_at(s).map_err(|e| e.at(s))?.abs();
            if val > comp.max_abs_partial {
                comp.max_abs_partial = val;
                comp.witness = s.to_vec();
            }
            comp.q_induced |= l.q[i].eval_at(&s[..4]).map_err(|e| e.at(s))?.abs() > NONZERO;
            comp.t_induced |= dt.eval_at(s).map_err(|e| e.at(s))?.abs() > NONZERO;
        }
        comp.dependent = comp.max_abs_partial > NONZERO;
        components.push(comp);
    }
    Ok(VelocityReport {
        potential: u.to_string(),
        velocity_dependent: components.iter().any(|c| c.dependent),
        components,
        samples: VELOCITY_SAMPLES,
        seed: VELOCITY_SEED,
    })
}
