//! Finite point-cloud approximations of compact sets: the Hausdorff metric,
//! epsilon-inclusion and the approximate topological upper limit.
//!
//! The upper limit of a sequence `K_n` is the set of subsequential limits of
//! selections `x_n ∈ K_n`, i.e. the points whose distance to `K_n` has
//! liminf zero. On a finite window this is approximated by keeping the points
//! of the tail union that come within `eps` of at least two distinct tail sets.

mod kdtree;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::AxisBox;
use crate::tolerances::Tolerances;

use kdtree::KdTree;

/// Points are stored in three coordinates; unused trailing coordinates are zero.
pub type Point = [f64; 3];

#[inline]
pub(crate) fn dist(a: &Point, b: &Point) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

pub fn point_from_slice(p: &[f64]) -> Point {
    let mut out = [0.0; 3];
    out[..p.len()].copy_from_slice(p);
    out
}

#[cfg(feature = "parallel")]
fn map_points<T, F>(points: &[Point], f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&Point) -> T + Sync + Send,
{
    use rayon::prelude::*;
    points.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_points<T, F>(points: &[Point], f: F) -> Vec<T>
where
    F: Fn(&Point) -> T,
{
    points.iter().map(f).collect()
}

/// A finite point set inside a box, tagged with the spacing of the grid it
/// was sampled from. Points are deduplicated and sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloudSet {
    domain: AxisBox,
    resolution: f64,
    points: Vec<Point>,
}

impl PointCloudSet {
    pub fn new(domain: AxisBox, resolution: f64, mut points: Vec<Point>) -> Result<Self> {
        let dim = domain.dim();
        if dim > 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                got: dim,
            });
        }
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(Error::Precondition(format!(
                "resolution must be positive, got {resolution}"
            )));
        }
        for p in &points {
            if p[dim..].iter().any(|&c| c != 0.0) || !domain.contains(&p[..dim]) {
                return Err(Error::Precondition(format!(
                    "point {:?} lies outside {:?}",
                    &p[..dim],
                    domain.bounds()
                )));
            }
        }
        points.sort_by(|a, b| {
            a[0].total_cmp(&b[0])
                .then(a[1].total_cmp(&b[1]))
                .then(a[2].total_cmp(&b[2]))
        });
        points.dedup();
        Ok(Self {
            domain,
            resolution,
            points,
        })
    }

    pub fn empty(domain: AxisBox, resolution: f64) -> Result<Self> {
        Self::new(domain, resolution, Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn domain(&self) -> &AxisBox {
        &self.domain
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains_point(&self, p: &Point) -> bool {
        self.points
            .binary_search_by(|q| {
                q[0].total_cmp(&p[0])
                    .then(q[1].total_cmp(&p[1]))
                    .then(q[2].total_cmp(&p[2]))
            })
            .is_ok()
    }

    fn require_nonempty(&self) -> Result<()> {
        if self.is_empty() {
            Err(Error::EmptySet)
        } else {
            Ok(())
        }
    }
}

/// How nearest-point queries are answered. All strategies return identical values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    BruteForce,
    Indexed,
    /// Brute force for small query/target products, indexed above.
    #[default]
    Auto,
}

impl Strategy {
    fn use_index(self, queries: usize, targets: usize) -> bool {
        match self {
            Strategy::BruteForce => false,
            Strategy::Indexed => true,
            Strategy::Auto => {
                queries.saturating_mul(targets) > Tolerances::DEFAULT.brute_force_max_pairs
            }
        }
    }
}

fn brute_nearest(q: &Point, targets: &[Point]) -> f64 {
    targets
        .iter()
        .map(|p| dist(q, p))
        .fold(f64::INFINITY, f64::min)
}

/// Euclidean distance from `p` to the nearest point of `set`.
pub fn min_dist(p: &[f64], set: &PointCloudSet) -> Result<f64> {
    set.require_nonempty()?;
    if p.len() != set.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            got: p.len(),
        });
    }
    Ok(brute_nearest(&point_from_slice(p), set.points()))
}

fn check_pair(a: &PointCloudSet, b: &PointCloudSet) -> Result<()> {
    a.require_nonempty()?;
    b.require_nonempty()?;
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    Ok(())
}

/// Directed distance together with the point of the source that attains it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Directed {
    pub distance: f64,
    pub witness: Point,
}

/// Nearest-target distance for every query point, in query order.
fn nearest_distances(queries: &[Point], targets: &[Point], strategy: Strategy) -> Vec<f64> {
    if strategy.use_index(queries.len(), targets.len()) {
        let tree = KdTree::new(targets);
        map_points(queries, |q| tree.nearest(q))
    } else {
        map_points(queries, |q| brute_nearest(q, targets))
    }
}

pub fn directed_hausdorff_with(
    from: &PointCloudSet,
    to: &PointCloudSet,
    strategy: Strategy,
) -> Result<Directed> {
    check_pair(from, to)?;
    let d = nearest_distances(from.points(), to.points(), strategy);
    // First index attaining the maximum, so the witness does not depend on scheduling.
    let (mut arg, mut best) = (0, d[0]);
    for (i, &v) in d.iter().enumerate().skip(1) {
        if v > best {
            arg = i;
            best = v;
        }
    }
    Ok(Directed {
        distance: best,
        witness: from.points()[arg],
    })
}

/// `max_{p ∈ from} min_{q ∈ to} |p - q|`.
pub fn directed_hausdorff(from: &PointCloudSet, to: &PointCloudSet) -> Result<Directed> {
    directed_hausdorff_with(from, to, Strategy::Auto)
}

/// Hausdorff distance: the larger of the two directed distances.
pub fn hausdorff(a: &PointCloudSet, b: &PointCloudSet) -> Result<f64> {
    Ok(directed_hausdorff(a, b)?
        .distance
        .max(directed_hausdorff(b, a)?.distance))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Inclusion {
    pub holds: bool,
    pub distance: f64,
    /// Worst offending point of the first set when the inclusion fails.
    pub witness: Option<Point>,
}

/// Numerical inclusion `a ⊆_eps b`: every point of `a` is within `eps` of `b`.
pub fn eps_subset(a: &PointCloudSet, b: &PointCloudSet, eps: f64) -> Result<Inclusion> {
    let d = directed_hausdorff(a, b)?;
    let holds = d.distance <= eps;
    Ok(Inclusion {
        holds,
        distance: d.distance,
        witness: (!holds).then_some(d.witness),
    })
}

/// An ordered sequence of point sets sharing dimension and domain.
#[derive(Debug, Clone, PartialEq)]
pub struct SetSequence {
    sets: Vec<PointCloudSet>,
}

impl SetSequence {
    pub fn new(sets: Vec<PointCloudSet>) -> Result<Self> {
        if sets.len() < 2 {
            return Err(Error::Precondition(format!(
                "a set sequence needs at least 2 sets, got {}",
                sets.len()
            )));
        }
        let first = &sets[0];
        for s in &sets[1..] {
            if s.dim() != first.dim() {
                return Err(Error::DimensionMismatch {
                    expected: first.dim(),
                    got: s.dim(),
                });
            }
            if s.domain() != first.domain() {
                return Err(Error::Precondition(
                    "all sets of a sequence must share one domain".into(),
                ));
            }
        }
        Ok(Self { sets })
    }

    pub fn sets(&self) -> &[PointCloudSet] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// The last `ceil(tail_fraction * len)` sets.
    pub fn tail(&self, tail_fraction: f64) -> Result<&[PointCloudSet]> {
        if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
            return Err(Error::Precondition(format!(
                "tail fraction must lie in (0, 1], got {tail_fraction}"
            )));
        }
        let n = ((tail_fraction * self.len() as f64).ceil() as usize).min(self.len());
        if n < 2 {
            return Err(Error::Precondition(format!(
                "tail of {n} set(s) is too short; need at least 2"
            )));
        }
        Ok(&self.sets[self.len() - n..])
    }
}

/// Approximate topological upper limit over the tail window.
///
/// A point of the tail union is kept iff it lies within `eps` of at least two
/// distinct tail sets.
pub fn approx_upper_limit(
    seq: &SetSequence,
    eps: f64,
    tail_fraction: f64,
) -> Result<PointCloudSet> {
    approx_upper_limit_with(seq, eps, tail_fraction, Strategy::Auto)
}

pub fn approx_upper_limit_with(
    seq: &SetSequence,
    eps: f64,
    tail_fraction: f64,
    strategy: Strategy,
) -> Result<PointCloudSet> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Precondition(format!(
            "eps must be positive, got {eps}"
        )));
    }
    let tail = seq.tail(tail_fraction)?;
    for s in tail {
        s.require_nonempty()?;
    }
    let domain = tail[0].domain().clone();
    let resolution = tail.iter().map(|s| s.resolution()).fold(0.0, f64::max);
    let union = PointCloudSet::new(
        domain.clone(),
        resolution,
        tail.iter()
            .flat_map(|s| s.points().iter().copied())
            .collect(),
    )?;
    let queries = union.points();

    let keep: Vec<bool> = if tail
        .iter()
        .any(|s| strategy.use_index(queries.len(), s.len()))
    {
        let trees: Vec<KdTree> = tail.iter().map(|s| KdTree::new(s.points())).collect();
        map_points(queries, |q| {
            trees
                .iter()
                .filter(|t| t.any_within(q, eps))
                .take(2)
                .count()
                == 2
        })
    } else {
        map_points(queries, |q| {
            tail.iter()
                .filter(|s| s.points().iter().any(|p| dist(q, p) <= eps))
                .take(2)
                .count()
                == 2
        })
    };
    let kept = queries
        .iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(p, _)| *p)
        .collect();
    PointCloudSet::new(domain, resolution, kept)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> AxisBox {
        AxisBox::cube(2, -1.0, 1.0).unwrap()
    }

    fn cloud(points: &[[f64; 2]]) -> PointCloudSet {
        PointCloudSet::new(
            square(),
            0.1,
            points.iter().map(|p| [p[0], p[1], 0.0]).collect(),
        )
        .unwrap()
    }

    fn segment(x: f64, m: usize) -> PointCloudSet {
        let pts: Vec<[f64; 2]> = (0..m)
            .map(|i| [x, -1.0 + 2.0 * i as f64 / (m - 1) as f64])
            .collect();
        cloud(&pts)
    }

    #[test]
    fn construction_dedups_and_validates() {
        let s = cloud(&[[0.5, 0.0], [0.0, 0.0], [0.5, 0.0]]);
        assert_eq!(s.points(), &[[0.0, 0.0, 0.0], [0.5, 0.0, 0.0]]);
        assert!(PointCloudSet::new(square(), 0.1, vec![[2.0, 0.0, 0.0]]).is_err());
        assert!(PointCloudSet::new(square(), 0.0, vec![]).is_err());
    }

    #[test]
    fn min_dist_examples() {
        let s = PointCloudSet::new(
            AxisBox::cube(2, -5.0, 5.0).unwrap(),
            1.0,
            vec![[3.0, 4.0, 0.0]],
        )
        .unwrap();
        assert_eq!(min_dist(&[0.0, 0.0], &s).unwrap(), 5.0);
        assert_eq!(min_dist(&[3.0, 4.0], &s).unwrap(), 0.0);
        let seg = segment(0.0, 201);
        let d = min_dist(&[0.5, 0.0], &seg).unwrap();
        assert!((d - 0.5).abs() <= 0.01);
        let empty = PointCloudSet::empty(square(), 0.1).unwrap();
        assert_eq!(min_dist(&[0.0, 0.0], &empty), Err(Error::EmptySet));
    }

    #[test]
    fn directed_examples() {
        let a = cloud(&[[0.0, 0.0], [1.0, 0.0]]);
        let b = cloud(&[[0.0, 0.0]]);
        let d = directed_hausdorff(&a, &b).unwrap();
        assert_eq!(d.distance, 1.0);
        assert_eq!(d.witness, [1.0, 0.0, 0.0]);
        assert_eq!(directed_hausdorff(&b, &a).unwrap().distance, 0.0);
    }

    #[test]
    fn strip_to_segment_is_one() {
        let m = 41;
        let h = 2.0 / (m - 1) as f64;
        let mut strip = Vec::new();
        for i in 0..m {
            for j in 0..m {
                let x = -1.0 + i as f64 * h;
                if x <= 0.0 {
                    strip.push([x, -1.0 + j as f64 * h]);
                }
            }
        }
        let d = directed_hausdorff(&cloud(&strip), &segment(0.0, m)).unwrap();
        assert!((d.distance - 1.0).abs() <= h);
        assert_eq!(d.witness[0], -1.0);
    }

    #[test]
    fn hausdorff_of_shifted_segments() {
        let a = segment(0.0, 101);
        let b = segment(0.3, 101);
        assert_eq!(hausdorff(&a, &a).unwrap(), 0.0);
        assert!((hausdorff(&a, &b).unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn eps_subset_examples() {
        let seg = segment(0.0, 201);
        assert!(eps_subset(&seg, &seg, 0.0).unwrap().holds);
        let r = eps_subset(&cloud(&[[-0.5, 0.0]]), &seg, 0.1).unwrap();
        assert!(!r.holds);
        assert_eq!(r.witness, Some([-0.5, 0.0, 0.0]));
    }

    #[test]
    fn upper_limit_of_constant_and_alternating_sequences() {
        let k = segment(0.2, 21);
        let seq = SetSequence::new(vec![k.clone(); 6]).unwrap();
        assert_eq!(approx_upper_limit(&seq, 0.05, 0.5).unwrap(), k);

        let a = segment(-0.5, 11);
        let b = cloud(&[[0.5, 0.5], [0.5, -0.5]]);
        let seq = SetSequence::new(
            (0..8)
                .map(|i| if i % 2 == 0 { a.clone() } else { b.clone() })
                .collect(),
        )
        .unwrap();
        let l = approx_upper_limit(&seq, 0.01, 0.5).unwrap();
        let mut both: Vec<Point> = a.points().to_vec();
        both.extend_from_slice(b.points());
        assert_eq!(l, PointCloudSet::new(square(), 0.1, both).unwrap());
    }

    #[test]
    fn single_recurrence_is_not_enough() {
        let a = segment(-0.5, 11);
        let b = segment(0.5, 11);
        let seq = SetSequence::new(vec![a.clone(), a.clone(), a.clone(), b]).unwrap();
        assert_eq!(approx_upper_limit(&seq, 0.01, 1.0).unwrap(), a);
    }

    #[test]
    fn short_tail_is_rejected() {
        let k = segment(0.0, 5);
        let seq = SetSequence::new(vec![k.clone(), k.clone(), k]).unwrap();
        assert!(approx_upper_limit(&seq, 0.1, 0.3).is_err());
        assert!(approx_upper_limit(&seq, 0.0, 1.0).is_err());
        assert!(SetSequence::new(vec![segment(0.0, 3)]).is_err());
    }

    #[test]
    fn indexed_and_brute_agree_on_far_queries() {
        let strip: Vec<[f64; 2]> = (0..60)
            .flat_map(|i| (0..60).map(move |j| [-1.0 + i as f64 / 60.0, -1.0 + j as f64 / 30.0]))
            .collect();
        let a = cloud(&strip);
        let b = segment(0.9, 333);
        for (x, y) in [(&a, &b), (&b, &a)] {
            let brute = directed_hausdorff_with(x, y, Strategy::BruteForce).unwrap();
            let tree = directed_hausdorff_with(x, y, Strategy::Indexed).unwrap();
            assert_eq!(brute.distance.to_bits(), tree.distance.to_bits());
            assert_eq!(brute.witness, tree.witness);
        }
    }
}
