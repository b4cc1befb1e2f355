//! Every numerical threshold used by the library, in one place.

/// Default thresholds. Operations that expose a tolerance parameter take
/// their default from here; the rest read these values directly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Bisection stops once `|f(mid)|` falls to this value...
    pub root_residual: f64,
    /// ...or once the bracket is this narrow.
    pub root_width: f64,
    pub root_max_iterations: usize,
    /// Lower end of root scans on `(0, b]`; `phi` underflows below it.
    pub positive_cutoff: f64,
    /// Absolute floor of the fat-zero tolerance (`sqrt` of machine epsilon).
    pub fat_zero_floor: f64,
    /// Fraction of a grid cell used by the slope term of the fat-zero tolerance.
    pub fat_zero_cell_fraction: f64,
    /// Upper limit membership radius, in grid spacings.
    pub eps_cells: f64,
    pub tail_fraction: f64,
    /// Query/target pair count above which distance queries use the bucket index.
    pub brute_force_max_pairs: usize,
    /// Absolute part of the coefficient convergence check.
    pub coefficient_convergence: f64,
    pub min_sequence_len: usize,
    /// Exactness (`dP/dq = dQ/dt`) and Euler-Lagrange residual thresholds.
    pub exactness: f64,
    pub euler_lagrange: f64,
    pub simpson_panels: usize,
    /// Sample box `[-1, 1]^4` with this many points per axis for exactness checks.
    pub exactness_points_per_axis: usize,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        root_residual: 1e-13,
        root_width: 1e-14,
        root_max_iterations: 200,
        positive_cutoff: 1e-12,
        fat_zero_floor: 1.4901161193847656e-8,
        fat_zero_cell_fraction: 0.25,
        eps_cells: 2.0,
        tail_fraction: 0.5,
        brute_force_max_pairs: 4_000_000,
        coefficient_convergence: 1e-6,
        min_sequence_len: 8,
        exactness: 1e-8,
        euler_lagrange: 1e-8,
        simpson_panels: 1024,
        exactness_points_per_axis: 9,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
