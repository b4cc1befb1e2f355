//! Shared numerical substrate: box domains and grids, composite Simpson
//! quadrature, bracketed root finding and finite-difference checks.

use serde::{Deserialize, Serialize};

use crate::error::{DomainError, Error, Result};
use crate::expr::Expression;
use crate::tolerances::Tolerances;

pub const MAX_DIM: usize = 4;

/// Axis-aligned closed box `[lo_0, hi_0] x ... x [lo_{d-1}, hi_{d-1}]`
/// with nonempty interior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct AxisBox {
    bounds: Vec<[f64; 2]>,
}

impl AxisBox {
    pub fn new(bounds: Vec<[f64; 2]>) -> Result<Self> {
        if bounds.is_empty() || bounds.len() > MAX_DIM {
            return Err(Error::Precondition(format!(
                "box dimension must be 1..={MAX_DIM}, got {}",
                bounds.len()
            )));
        }
        for (axis, [lo, hi]) in bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::Precondition(format!(
                    "axis {axis}: need finite lo < hi, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self { bounds })
    }

    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![[lo, hi]; dim])
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[[f64; 2]] {
        &self.bounds
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && self
                .bounds
                .iter()
                .zip(p)
                .all(|([lo, hi], x)| lo <= x && x <= hi)
    }

    /// Strict interior membership.
    pub fn contains_interior(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && self
                .bounds
                .iter()
                .zip(p)
                .all(|([lo, hi], x)| lo < x && x < hi)
    }
}

impl TryFrom<Vec<[f64; 2]>> for AxisBox {
    type Error = Error;
    fn try_from(bounds: Vec<[f64; 2]>) -> Result<Self> {
        Self::new(bounds)
    }
}

impl From<AxisBox> for Vec<[f64; 2]> {
    fn from(b: AxisBox) -> Self {
        b.bounds
    }
}

/// Tensor grid with `m` points per axis, corners included.
pub const MAX_GRID_POINTS: usize = 1 << 25;

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    domain: AxisBox,
    m: usize,
    coords: Vec<Vec<f64>>,
}

impl Grid {
    pub fn new(domain: AxisBox, m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::Precondition(format!(
                "grid needs at least 2 points per axis, got {m}"
            )));
        }
        match m.checked_pow(domain.dim() as u32) {
            Some(n) if n <= MAX_GRID_POINTS => {}
            _ => {
                return Err(Error::Precondition(format!(
                    "{m}^{} grid exceeds the {MAX_GRID_POINTS}-point limit",
                    domain.dim()
                )))
            }
        }
        let coords = domain
            .bounds()
            .iter()
            .map(|&[lo, hi]| {
                (0..m)
                    .map(|i| {
                        if i == m - 1 {
                            hi
                        } else {
                            lo + (hi - lo) * (i as f64) / ((m - 1) as f64)
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(Self { domain, m, coords })
    }

    pub fn domain(&self) -> &AxisBox {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn points_per_axis(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.m.pow(self.dim() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        let [lo, hi] = self.domain.bounds()[axis];
        (hi - lo) / ((self.m - 1) as f64)
    }

    /// Largest spacing over all axes; the resolution tag of sampled sets.
    pub fn resolution(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).fold(0.0, f64::max)
    }

    pub fn axis_coords(&self, axis: usize) -> &[f64] {
        &self.coords[axis]
    }

    /// Stride of `axis` in the flat index; the last axis varies fastest.
    pub fn stride(&self, axis: usize) -> usize {
        self.m.pow((self.dim() - 1 - axis) as u32)
    }

    /// Per-axis index of a flat index.
    pub fn multi_index(&self, mut flat: usize, out: &mut [usize]) {
        for axis in (0..self.dim()).rev() {
            out[axis] = flat % self.m;
            flat /= self.m;
        }
    }

    pub fn point_into(&self, flat: usize, out: &mut [f64]) {
        let mut idx = [0usize; MAX_DIM];
        self.multi_index(flat, &mut idx[..self.dim()]);
        for axis in 0..self.dim() {
            out[axis] = self.coords[axis][idx[axis]];
        }
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        let mut p = vec![0.0; self.dim()];
        self.point_into(flat, &mut p);
        p
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }
}

/// Result of a fixed-panel composite Simpson rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quadrature {
    pub value: f64,
    /// `S(2n) - S(n)`: how much the estimate moves when the panel count doubles.
    pub richardson_delta: f64,
    pub panels: usize,
}

fn simpson_sum<F>(f: &mut F, a: f64, b: f64, panels: usize) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let h = (b - a) / panels as f64;
    let mut sample = |t: f64| -> Result<f64> {
        let v = f(t)?;
        if !v.is_finite() {
            return Err(DomainError::NonFinite {
                value: v,
                at: vec![t],
            }
            .into());
        }
        Ok(v)
    };
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..panels {
        let v = sample(a + h * i as f64)?;
        if i % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    let ends = sample(a)? + sample(b)?;
    Ok(h / 3.0 * (ends + 4.0 * odd + 2.0 * even))
}

/// Composite Simpson estimate of `∫_a^b f` with `panels` subintervals.
pub fn integrate_1d<F>(mut f: F, a: f64, b: f64, panels: usize) -> Result<Quadrature>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(a < b) {
        return Err(Error::Precondition(format!(
            "integration needs a < b, got [{a}, {b}]"
        )));
    }
    if panels == 0 || !panels.is_multiple_of(2) {
        return Err(Error::Precondition(format!(
            "panel count must be even and positive, got {panels}"
        )));
    }
    let value = simpson_sum(&mut f, a, b, panels)?;
    let refined = simpson_sum(&mut f, a, b, 2 * panels)?;
    Ok(Quadrature {
        value,
        richardson_delta: refined - value,
        panels,
    })
}

/// Oriented integral: zero when `a == b`, negated when `a > b`.
pub fn integrate_between<F>(f: F, a: f64, b: f64, panels: usize) -> Result<Quadrature>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(Quadrature {
            value: 0.0,
            richardson_delta: 0.0,
            panels,
        });
    }
    if a < b {
        return integrate_1d(f, a, b, panels);
    }
    let q = integrate_1d(f, b, a, panels)?;
    Ok(Quadrature {
        value: -q.value,
        richardson_delta: -q.richardson_delta,
        panels,
    })
}

/// Bisects a bracket with `f(lo)` and `f(hi)` of strictly opposite signs and
/// returns the midpoint of the final bracket.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, mut f_lo: f64) -> f64 {
    let tol = Tolerances::DEFAULT;
    for _ in 0..tol.root_max_iterations {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= tol.root_width || mid == lo || mid == hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid.abs() <= tol.root_residual {
            return mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn opposite_signs(a: f64, b: f64) -> bool {
    (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0)
}

/// Roots of a continuous function on `[a, b]`, ascending.
///
/// The interval is split into `scan_points` subintervals; every sign change
/// is bisected and every exact zero at a scan node is reported. Zeros where
/// the function touches the axis without changing sign can be missed.
pub fn find_roots<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, scan_points: usize) -> Vec<f64> {
    let n = scan_points.max(1);
    let node = |i: usize| {
        if i == n {
            b
        } else {
            a + (b - a) * i as f64 / n as f64
        }
    };
    let mut roots = Vec::new();
    let mut x_prev = node(0);
    let mut f_prev = f(x_prev);
    if f_prev == 0.0 {
        roots.push(x_prev);
    }
    for i in 1..=n {
        let x = node(i);
        let fx = f(x);
        if fx == 0.0 {
            roots.push(x);
        } else if f_prev.is_finite() && fx.is_finite() && opposite_signs(f_prev, fx) {
            roots.push(bisect(&mut f, x_prev, x, f_prev));
        }
        x_prev = x;
        f_prev = fx;
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup();
    roots
}

/// Forward-mode derivative next to a central difference, for cross-checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdCheck {
    pub ad_value: f64,
    pub fd_value: f64,
    pub abs_diff: f64,
}

pub fn fd_check(e: &Expression, var: &str, point: &[(&str, f64)]) -> Result<FdCheck> {
    let axis = e.var_index(var).ok_or_else(|| Error::UnknownVariable {
        name: var.into(),
        position: 0,
    })?;
    let mut values: Vec<f64> = e
        .vars()
        .iter()
        .map(|name| {
            point
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, v)| *v)
                .ok_or_else(|| Error::Unbound(name.clone()))
        })
        .collect::<Result<_>>()?;
    let ad_value = e.partial_at(axis, &values)?;
    let x = values[axis];
    let step = f64::EPSILON.cbrt() * x.abs().max(1.0);
    values[axis] = x + step;
    let up = e.eval_at(&values)?;
    values[axis] = x - step;
    let down = e.eval_at(&values)?;
    let fd_value = (up - down) / (2.0 * step);
    Ok(FdCheck {
        ad_value,
        fd_value,
        abs_diff: (ad_value - fd_value).abs(),
    })
}
