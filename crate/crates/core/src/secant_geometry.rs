//! Secant intersection sets of graphs `z = f(x, y)` and `t = f(x, y, z)`.
//!
//! The plane through `(base, f(base))` with slope coefficients `c` meets the
//! graph exactly over the zero set of the secant residual
//! `g(p) = f(p) - f(base) - c · (p - base)`. Its projection to the domain is
//! extracted from a grid, compared against the projection for the tangent
//! coefficients `∇f(base)`, and used to check that the upper limit of secant
//! sets lies inside the tangent set.

use serde::{Deserialize, Serialize};

use crate::compact_sets::{
    approx_upper_limit, directed_hausdorff, eps_subset, point_from_slice, Point, PointCloudSet,
    SetSequence,
};
use crate::error::{Error, Result};
use crate::expr::{Expression, Node};
use crate::numerics::{bisect, find_roots, AxisBox, Grid};
use crate::tolerances::Tolerances;

pub const AXIS_NAMES: [&str; 3] = ["x", "y", "z"];

/// Box domain, scalar field and interior base point of a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSpec {
    domain: AxisBox,
    f: Expression,
    base: Vec<f64>,
    f_base: f64,
}

impl GraphSpec {
    /// `f` must be declared over the axis names `x, y[, z]`.
    pub fn new(domain: AxisBox, f: Expression, base: Vec<f64>) -> Result<Self> {
        let dim = domain.dim();
        if !(2..=3).contains(&dim) {
            return Err(Error::Precondition(format!(
                "graph domains are 2- or 3-dimensional, got {dim}"
            )));
        }
        if base.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: base.len(),
            });
        }
        let f = f.with_vars(&AXIS_NAMES[..dim])?;
        if !domain.contains_interior(&base) {
            return Err(Error::Precondition(format!(
                "base point {base:?} must lie strictly inside the domain"
            )));
        }
        let f_base = f.eval_at(&base)?;
        Ok(Self {
            domain,
            f,
            base,
            f_base,
        })
    }

    pub fn parse(domain: AxisBox, source: &str, base: Vec<f64>) -> Result<Self> {
        let f = Expression::parse(source, &AXIS_NAMES[..domain.dim()])?;
        Self::new(domain, f, base)
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn domain(&self) -> &AxisBox {
        &self.domain
    }

    pub fn field(&self) -> &Expression {
        &self.f
    }

    pub fn base(&self) -> &[f64] {
        &self.base
    }

    /// `g(p)` from an already evaluated `f(p)`, associating exactly like
    /// the expression built by [`secant_residual`].
    fn residual_from(&self, f_value: f64, p: &[f64], coeffs: &[f64]) -> f64 {
        let mut g = f_value - self.f_base;
        for ((c, x), b) in coeffs.iter().zip(p).zip(&self.base) {
            g -= c * (x - b);
        }
        g
    }

    fn check_coeffs(&self, coeffs: &[f64]) -> Result<()> {
        if coeffs.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: coeffs.len(),
            });
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Precondition(format!(
                "secant coefficients must be finite, got {coeffs:?}"
            )));
        }
        Ok(())
    }
}

pub type SurfaceSpec = GraphSpec;
pub type HypersurfaceSpec = GraphSpec;
/// `(A, B)` or `(A, B, Γ)`.
pub type SecantCoefficients = Vec<f64>;

/// Secant residual `g = f - f(base) - Σ c_i (var_i - base_i)`; `g(base) = 0` exactly.
pub fn secant_residual(spec: &GraphSpec, coeffs: &[f64]) -> Result<Expression> {
    spec.check_coeffs(coeffs)?;
    let b = Box::new;
    let mut root = Node::Sub(b(spec.f.root().clone()), b(Node::Const(spec.f_base)));
    for (i, (c, base)) in coeffs.iter().zip(&spec.base).enumerate() {
        let shift = Node::Sub(b(Node::Var(i)), b(Node::Const(*base)));
        root = Node::Sub(b(root), b(Node::Mul(b(Node::Const(*c)), b(shift))));
    }
    Ok(Expression::from_node(root, spec.f.vars().to_vec()))
}

/// Gradient of `f` at the base point, by dual evaluation.
pub fn tangent_coefficients(spec: &GraphSpec) -> Result<Vec<f64>> {
    let (_, grad) = spec.f.gradient_at(&spec.base)?;
    if grad.iter().any(|g| !g.is_finite()) {
        return Err(Error::Precondition(format!(
            "non-finite partial derivatives {grad:?} at the base point"
        )));
    }
    Ok(grad)
}

/// Values and gradients of `f` sampled once on a grid; reused for every
/// coefficient vector.
pub struct SecantExtractor<'a> {
    spec: &'a GraphSpec,
    grid: &'a Grid,
    values: Vec<f64>,
    /// Row-major `len x dim` gradients.
    gradients: Vec<f64>,
}

impl<'a> SecantExtractor<'a> {
    pub fn new(spec: &'a GraphSpec, grid: &'a Grid) -> Result<Self> {
        if grid.domain() != spec.domain() {
            return Err(Error::Precondition(
                "the grid must cover the graph domain".into(),
            ));
        }
        let dim = spec.dim();
        let sample = |i: usize| -> Result<(f64, Vec<f64>)> { spec.f.gradient_at(&grid.point(i)) };
        #[cfg(feature = "parallel")]
        let samples: Vec<Result<(f64, Vec<f64>)>> = {
            use rayon::prelude::*;
            (0..grid.len()).into_par_iter().map(sample).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let samples: Vec<Result<(f64, Vec<f64>)>> = (0..grid.len()).map(sample).collect();

        let mut values = Vec::with_capacity(grid.len());
        let mut gradients = Vec::with_capacity(grid.len() * dim);
        for s in samples {
            let (v, g) = s?;
            values.push(v);
            gradients.extend_from_slice(&g);
        }
        Ok(Self {
            spec,
            grid,
            values,
            gradients,
        })
    }

    pub fn grid(&self) -> &Grid {
        self.grid
    }

    /// Grid points with `|g| <= floor + fraction * h * |∇g|`, midpoints of
    /// bisected sign-change edges, and the base point.
    pub fn extract(&self, coeffs: &[f64]) -> Result<PointCloudSet> {
        let spec = self.spec;
        spec.check_coeffs(coeffs)?;
        let tol = Tolerances::DEFAULT;
        let dim = spec.dim();
        let grid = self.grid;
        let h = grid.resolution();
        let mut p = [0.0; 3];

        let residuals: Vec<f64> = (0..grid.len())
            .map(|i| {
                grid.point_into(i, &mut p[..dim]);
                spec.residual_from(self.values[i], &p[..dim], coeffs)
            })
            .collect();

        let mut points: Vec<Point> = Vec::new();
        for (i, &g) in residuals.iter().enumerate() {
            let grad = &self.gradients[i * dim..(i + 1) * dim];
            let slope = grad
                .iter()
                .zip(coeffs)
                .map(|(d, c)| (d - c) * (d - c))
                .sum::<f64>()
                .sqrt();
            if g.abs() <= tol.fat_zero_floor + tol.fat_zero_cell_fraction * h * slope {
                grid.point_into(i, &mut p[..dim]);
                points.push(p);
            }
        }

        let m = grid.points_per_axis();
        let mut idx = [0usize; 3];
        for axis in 0..dim {
            let stride = grid.stride(axis);
            for i in 0..grid.len() {
                grid.multi_index(i, &mut idx[..dim]);
                if idx[axis] + 1 == m {
                    continue;
                }
                let (gi, gj) = (residuals[i], residuals[i + stride]);
                if !((gi < 0.0 && gj > 0.0) || (gi > 0.0 && gj < 0.0)) {
                    continue;
                }
                grid.point_into(i, &mut p[..dim]);
                let lo = p[axis];
                let hi = grid.axis_coords(axis)[idx[axis] + 1];
                let mut q = p;
                let mut failure = None;
                let root = bisect(
                    |s| {
                        q[axis] = s;
                        match spec.f.eval_at(&q[..dim]) {
                            Ok(v) => spec.residual_from(v, &q[..dim], coeffs),
                            Err(e) => {
                                failure.get_or_insert(e);
                                0.0
                            }
                        }
                    },
                    lo,
                    hi,
                    gi,
                );
                if let Some(e) = failure {
                    return Err(e);
                }
                let mut r = p;
                r[axis] = root;
                points.push(r);
            }
        }
        points.push(point_from_slice(&spec.base));
        PointCloudSet::new(spec.domain.clone(), h, points)
    }
}

/// Samples `C(A, B)` (2-D) or `H(A, B, Γ)` (3-D) on `grid`. An empty result is valid.
pub fn extract_secant_set(spec: &GraphSpec, coeffs: &[f64], grid: &Grid) -> Result<PointCloudSet> {
    SecantExtractor::new(spec, grid)?.extract(coeffs)
}

/// Coefficient sequence: an explicit list or `tangent + direction / n` for `n = 1..=n_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientSequence {
    Explicit(Vec<Vec<f64>>),
    Approach { direction: Vec<f64>, n_max: usize },
}

impl CoefficientSequence {
    pub fn resolve(&self, tangent: &[f64]) -> Result<Vec<Vec<f64>>> {
        match self {
            CoefficientSequence::Explicit(list) => Ok(list.clone()),
            CoefficientSequence::Approach { direction, n_max } => {
                if direction.len() != tangent.len() {
                    return Err(Error::DimensionMismatch {
                        expected: tangent.len(),
                        got: direction.len(),
                    });
                }
                Ok((1..=*n_max)
                    .map(|n| {
                        tangent
                            .iter()
                            .zip(direction)
                            .map(|(t, d)| t + d / n as f64)
                            .collect()
                    })
                    .collect())
            }
        }
    }
}

/// Whether `seq` approaches `tangent`: the last element must be within
/// `abs_tol + 2 max_n |c_n - tangent| / len` of it, so harmonic-rate
/// sequences pass and sequences bounded away from the tangent fail.
pub fn check_convergence(seq: &[Vec<f64>], tangent: &[f64]) -> Result<f64> {
    let tol = Tolerances::DEFAULT;
    if seq.len() < tol.min_sequence_len {
        return Err(Error::Precondition(format!(
            "coefficient sequence needs at least {} elements, got {}",
            tol.min_sequence_len,
            seq.len()
        )));
    }
    let dists: Vec<f64> = seq
        .iter()
        .map(|c| {
            if c.len() != tangent.len() {
                return Err(Error::DimensionMismatch {
                    expected: tangent.len(),
                    got: c.len(),
                });
            }
            Ok(c.iter()
                .zip(tangent)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt())
        })
        .collect::<Result<_>>()?;
    let max = dists.iter().copied().fold(0.0, f64::max);
    let last = *dists.last().unwrap();
    let allowed = tol.coefficient_convergence + 2.0 * max / seq.len() as f64;
    if !(last <= allowed) {
        return Err(Error::Precondition(format!(
            "coefficient sequence does not approach the tangent coefficients {tangent:?}: \
             last element is {last:e} away (allowed {allowed:e})"
        )));
    }
    Ok(last)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub role: String,
    pub point: Vec<f64>,
    pub distance: f64,
}

/// Outcome of checking `limsup C(c_n) ⊆ C(∇f(base))` at grid scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InclusionReport {
    pub n_list: Vec<usize>,
    pub eps: f64,
    pub h: f64,
    pub tail_fraction: f64,
    /// `2h + eps`, the tolerance of the inclusion test.
    pub inclusion_tolerance: f64,
    pub tangent_coefficients: Vec<f64>,
    /// Distance from the last coefficient vector to the tangent coefficients.
    pub coefficient_gap: f64,
    pub d_limsup_to_tangent: f64,
    pub d_tangent_to_limsup: f64,
    pub inclusion: bool,
    /// Directed distance tangent set → upper limit; near zero for equality,
    /// large for a proper inclusion.
    pub proper_gap: f64,
    pub witnesses: Vec<Witness>,
    pub set_sizes: Vec<usize>,
    pub limsup_size: usize,
    pub tangent_set_size: usize,
    #[serde(skip)]
    pub sets: Vec<PointCloudSet>,
    #[serde(skip)]
    pub limsup: PointCloudSet,
    #[serde(skip)]
    pub tangent_set: PointCloudSet,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InclusionOptions {
    /// Membership radius of the upper limit; `2h` when `None`.
    pub eps: Option<f64>,
    pub tail_fraction: f64,
}

impl Default for InclusionOptions {
    fn default() -> Self {
        Self {
            eps: None,
            tail_fraction: Tolerances::DEFAULT.tail_fraction,
        }
    }
}

pub fn verify_upper_limit_inclusion(
    spec: &GraphSpec,
    sequence: &CoefficientSequence,
    grid: &Grid,
    options: InclusionOptions,
) -> Result<InclusionReport> {
    let tangent = tangent_coefficients(spec)?;
    let coeffs = sequence.resolve(&tangent)?;
    let coefficient_gap = check_convergence(&coeffs, &tangent)?;

    let h = grid.resolution();
    let eps = options.eps.unwrap_or(Tolerances::DEFAULT.eps_cells * h);
    let extractor = SecantExtractor::new(spec, grid)?;
    let sets: Vec<PointCloudSet> = coeffs
        .iter()
        .map(|c| extractor.extract(c))
        .collect::<Result<_>>()?;
    let tangent_set = extractor.extract(&tangent)?;
    let limsup = approx_upper_limit(&SetSequence::new(sets.clone())?, eps, options.tail_fraction)?;

    let forward = directed_hausdorff(&limsup, &tangent_set)?;
    let backward = directed_hausdorff(&tangent_set, &limsup)?;
    let inclusion_tolerance = 2.0 * h + eps;
    let inclusion = eps_subset(&limsup, &tangent_set, inclusion_tolerance)?.holds;
    let dim = spec.dim();
    let witnesses = vec![
        Witness {
            role: "limsup_farthest_from_tangent".into(),
            point: forward.witness[..dim].to_vec(),
            distance: forward.distance,
        },
        Witness {
            role: "tangent_farthest_from_limsup".into(),
            point: backward.witness[..dim].to_vec(),
            distance: backward.distance,
        },
    ];
    Ok(InclusionReport {
        n_list: (1..=coeffs.len()).collect(),
        eps,
        h,
        tail_fraction: options.tail_fraction,
        inclusion_tolerance,
        tangent_coefficients: tangent,
        coefficient_gap,
        d_limsup_to_tangent: forward.distance,
        d_tangent_to_limsup: backward.distance,
        inclusion,
        proper_gap: backward.distance,
        witnesses,
        set_sizes: sets.iter().map(PointCloudSet::len).collect(),
        limsup_size: limsup.len(),
        tangent_set_size: tangent_set.len(),
        sets,
        limsup,
        tangent_set,
    })
}

/// Closed-form shape of the secant set of `phi(x)` at the origin with
/// coefficients `(1/n, 0[, 0])`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleDescription {
    pub dim: usize,
    pub n: usize,
    /// Roots of `exp(-1/x) = x/n` on `(0, 1]`; each contributes a slab `{x*} x [-1,1]^(dim-1)`.
    pub positive_roots: Vec<f64>,
    pub positive_branch_empty: bool,
    pub description: String,
}

pub fn phi_spec(dim: usize) -> Result<GraphSpec> {
    GraphSpec::parse(AxisBox::cube(dim, -1.0, 1.0)?, "phi(x)", vec![0.0; dim])
}

pub fn counterexample_coefficients(dim: usize, n: usize) -> Vec<f64> {
    let mut c = vec![0.0; dim];
    c[0] = 1.0 / n as f64;
    c
}

/// Roots of `exp(-1/x) - x/n` on `[cutoff, 1]`.
pub fn counterexample_roots(n: usize) -> Vec<f64> {
    let slope = 1.0 / n as f64;
    find_roots(
        |x| crate::expr::phi_derivative(0, x) - slope * x,
        Tolerances::DEFAULT.positive_cutoff,
        1.0,
        10_000,
    )
}

/// The secant set of the flat function `phi(x)` on `[-1, 1]^dim` for
/// coefficients `(1/n, 0[, 0])`, with its closed-form description.
pub fn flat_counterexample(
    dim: usize,
    n: usize,
    points_per_axis: usize,
) -> Result<(PointCloudSet, CounterexampleDescription)> {
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    let spec = phi_spec(dim)?;
    let grid = Grid::new(spec.domain().clone(), points_per_axis)?;
    let set = extract_secant_set(&spec, &counterexample_coefficients(dim, n), &grid)?;
    let roots = counterexample_roots(n);
    let slab = if dim == 2 {
        "[-1,1]".to_string()
    } else {
        format!("[-1,1]^{}", dim - 1)
    };
    let mut description = format!("{{0}} x {slab}");
    for r in &roots {
        description.push_str(&format!(" ∪ {{{r}}} x {slab}"));
    }
    Ok((
        set,
        CounterexampleDescription {
            dim,
            n,
            positive_branch_empty: roots.is_empty(),
            positive_roots: roots,
            description,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> AxisBox {
        AxisBox::cube(2, -1.0, 1.0).unwrap()
    }

    #[test]
    fn residual_examples() {
        let spec = GraphSpec::parse(square(), "x^2 + y^2", vec![0.0, 0.0]).unwrap();
        let g = secant_residual(&spec, &[0.0, 0.0]).unwrap();
        for &(x, y) in &[(0.3, -0.7), (1.0, 1.0)] {
            assert_eq!(g.eval_at(&[x, y]).unwrap(), x * x + y * y);
        }

        let phi = phi_spec(2).unwrap();
        let g = secant_residual(&phi, &[1.0 / 7.0, 0.0]).unwrap();
        for &x in &[-0.5, 0.0, 0.3, 0.9] {
            let expect = crate::expr::phi_derivative(0, x) - x / 7.0;
            assert!((g.eval_at(&[x, 0.2]).unwrap() - expect).abs() < 1e-16);
        }

        let spec = GraphSpec::parse(square(), "sin(x)*cos(y) + x*y^3", vec![0.2, 0.3]).unwrap();
        let g = secant_residual(&spec, &[0.7, -1.3]).unwrap();
        assert_eq!(g.eval_at(&[0.2, 0.3]).unwrap(), 0.0);
        assert!(secant_residual(&spec, &[1.0]).is_err());
    }

    #[test]
    fn residual_expression_matches_fast_path() {
        let spec = GraphSpec::parse(square(), "exp(x - y) * cos(3*x)", vec![0.1, -0.4]).unwrap();
        let c = [0.37, -2.1];
        let g = secant_residual(&spec, &c).unwrap();
        for &(x, y) in &[(0.9, 0.2), (-0.3, -0.6)] {
            let fast = spec.residual_from(spec.field().eval_at(&[x, y]).unwrap(), &[x, y], &c);
            assert_eq!(g.eval_at(&[x, y]).unwrap().to_bits(), fast.to_bits());
        }
    }

    #[test]
    fn base_must_be_interior() {
        assert!(GraphSpec::parse(square(), "x", vec![1.0, 0.0]).is_err());
        assert!(GraphSpec::parse(square(), "x", vec![0.0]).is_err());
        assert!(GraphSpec::parse(square(), "x + w", vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn tangent_coefficient_examples() {
        let spec = GraphSpec::parse(square(), "x^2 + y^2", vec![0.5, 0.25]).unwrap();
        assert_eq!(tangent_coefficients(&spec).unwrap(), vec![1.0, 0.5]);
        assert_eq!(
            tangent_coefficients(&phi_spec(2).unwrap()).unwrap(),
            vec![0.0, 0.0]
        );
        assert_eq!(
            tangent_coefficients(&phi_spec(3).unwrap()).unwrap(),
            vec![0.0, 0.0, 0.0]
        );
    }

    #[test]
    fn paraboloid_tangent_set_is_the_origin() {
        let spec = GraphSpec::parse(square(), "x^2 + y^2", vec![0.0, 0.0]).unwrap();
        let grid = Grid::new(square(), 201).unwrap();
        let set = extract_secant_set(&spec, &[0.0, 0.0], &grid).unwrap();
        assert_eq!(set.points(), &[[0.0, 0.0, 0.0]]);
    }

    #[test]
    fn flat_strip_is_captured() {
        let spec = phi_spec(2).unwrap();
        let grid = Grid::new(square(), 41).unwrap();
        let set = extract_secant_set(&spec, &[0.0, 0.0], &grid).unwrap();
        for i in 0..grid.len() {
            let p = grid.point(i);
            if p[0] <= 0.0 {
                assert!(set.contains_point(&point_from_slice(&p)), "missing {p:?}");
            }
        }
        // phi is flat beyond the origin too; nothing far right is captured.
        assert!(set.points().iter().all(|p| p[0] < 0.3));
    }

    #[test]
    fn counterexample_branches() {
        let (set, desc) = flat_counterexample(2, 1, 101).unwrap();
        assert!(desc.positive_branch_empty);
        assert!(set.points().iter().all(|p| p[0] == 0.0));
        assert_eq!(set.len(), 101);

        let (set, desc) = flat_counterexample(2, 3, 101).unwrap();
        assert_eq!(desc.positive_roots.len(), 1);
        let root = desc.positive_roots[0];
        assert!(root > 0.5 && root < 1.0);
        let right: Vec<_> = set.points().iter().filter(|p| p[0] > 0.0).collect();
        assert!(!right.is_empty());
        assert!(right
            .iter()
            .all(|p| (p[0] - root).abs() <= 0.25 * 0.02 + 1e-12));
        assert!(right.iter().any(|p| (p[0] - root).abs() < 1e-12));

        let (set, desc) = flat_counterexample(3, 10, 21).unwrap();
        assert_eq!(desc.positive_roots.len(), 1);
        assert!(set
            .points()
            .iter()
            .all(|p| p[0] == 0.0 || (p[0] - desc.positive_roots[0]).abs() < 0.1));
    }

    #[test]
    fn convergence_precondition() {
        let tangent = [0.0, 0.0];
        let good: Vec<Vec<f64>> = (1..=64).map(|n| vec![1.0 / n as f64, 0.0]).collect();
        assert!(check_convergence(&good, &tangent).is_ok());
        let bad: Vec<Vec<f64>> = (1..=64).map(|n| vec![1.0 + 1.0 / n as f64, 0.0]).collect();
        assert!(check_convergence(&bad, &tangent).is_err());
        assert!(check_convergence(&good[..5], &tangent).is_err());
        let exact = vec![vec![0.0, 0.0]; 10];
        assert!(check_convergence(&exact, &tangent).is_ok());
    }

    #[test]
    fn paraboloid_upper_limit_equals_tangent_set() {
        let spec = GraphSpec::parse(square(), "x^2 + y^2", vec![0.0, 0.0]).unwrap();
        let grid = Grid::new(square(), 201).unwrap();
        let seq = CoefficientSequence::Approach {
            direction: vec![1.0, 0.0],
            n_max: 64,
        };
        let r =
            verify_upper_limit_inclusion(&spec, &seq, &grid, InclusionOptions::default()).unwrap();
        assert!(r.inclusion);
        assert!(r.d_limsup_to_tangent <= r.inclusion_tolerance);
        assert!(r.d_tangent_to_limsup <= r.inclusion_tolerance);
    }

    #[test]
    fn phi_proper_gap() {
        let spec = phi_spec(2).unwrap();
        let grid = Grid::new(square(), 101).unwrap();
        let seq = CoefficientSequence::Approach {
            direction: vec![1.0, 0.0],
            n_max: 64,
        };
        let r =
            verify_upper_limit_inclusion(&spec, &seq, &grid, InclusionOptions::default()).unwrap();
        assert!((r.proper_gap - 1.0).abs() <= 0.1);
        assert_eq!(r.witnesses[1].point[0], -1.0);
    }

    #[test]
    fn diverging_sequence_is_rejected() {
        let spec = GraphSpec::parse(square(), "x^2 + y^2", vec![0.0, 0.0]).unwrap();
        let grid = Grid::new(square(), 21).unwrap();
        let seq = CoefficientSequence::Explicit(
            (1..=16).map(|n| vec![1.0 + 1.0 / n as f64, 0.0]).collect(),
        );
        assert!(matches!(
            verify_upper_limit_inclusion(&spec, &seq, &grid, InclusionOptions::default()),
            Err(Error::Precondition(_))
        ));
    }
}
