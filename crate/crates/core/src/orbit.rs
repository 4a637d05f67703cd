//! Orbits `T^k(M)` of subspaces, empirical density scans, and the exact
//! invariants that certify when an orbit cannot be dense.
//!
//! Density results are evidence only. Every [`DensityReport`] carries
//! `empirical: true`; non-density is only claimed through the lock and
//! norm-ratio checks, which hold exactly up to rounding.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::linalg;
use crate::matrix::Matrix;
use crate::par::{self, Exec};
use crate::subspace::{check_operator, complement, grassmann_distance, residual_norm, Subspace};

/// Smallest singular value of `T * frame` below which the orbit is degenerate.
pub const COLLAPSE_TOL: f64 = 1e-12;
/// Default point-density threshold for unit targets.
pub const DEFAULT_POINT_EPS: f64 = 0.05;
/// Default chordal threshold on the Grassmannian.
pub const DEFAULT_GRASS_EPS: f64 = 0.02;
/// Default iterate budget.
pub const DEFAULT_K: usize = 100_000;
/// Condition number above which an operator is treated as singular.
pub const SINGULAR_COND: f64 = 1e12;
/// Tolerance of the rank and angle locks.
pub const LOCK_TOL: f64 = 1e-10;
/// Relative tolerance of the norm-ratio invariant.
pub const NORM_RATIO_TOL: f64 = 1e-9;

const CHUNK: usize = 2048;

/// Incrementally maintained orbit `M, T(M), T^2(M), ...`.
///
/// Each step maps the current orthonormal frame by `T` and
/// re-orthonormalizes; the raw image is only used to detect collapse.
#[derive(Debug, Clone)]
pub struct Orbit {
    t: DMatrix<f64>,
    frame: DMatrix<f64>,
    k: usize,
}

impl Orbit {
    pub fn new(t: &Matrix, m: &Subspace) -> Result<Self> {
        check_operator(t, m.ambient_dim())?;
        Ok(Orbit {
            t: t.as_dmatrix().clone(),
            frame: m.frame().clone(),
            k: 0,
        })
    }

    /// Index of the current iterate.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Orthonormal frame of `T^k(M)`.
    pub fn frame(&self) -> &DMatrix<f64> {
        &self.frame
    }

    pub fn subspace(&self) -> Subspace {
        Subspace::from_frame_unchecked(self.frame.clone())
    }

    /// Moves to `T^{k+1}(M)`.
    pub fn advance(&mut self) -> Result<()> {
        let raw = &self.t * &self.frame;
        let s = linalg::singular_values(&raw);
        let smin = s.last().copied().unwrap_or(0.0);
        if !(smin >= COLLAPSE_TOL) {
            return Err(Error::DegenerateOrbit {
                k: self.k + 1,
                sigma_min: smin,
            });
        }
        self.frame = linalg::orthonormalize(&raw);
        self.k += 1;
        Ok(())
    }
}

/// Budget, threshold and scheduling of a density scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityOptions {
    pub k_max: usize,
    pub eps: f64,
    pub exec: Exec,
    /// Keep each target's record-improvement trace `(k, distance)`.
    pub traces: bool,
}

impl DensityOptions {
    pub fn new(k_max: usize, eps: f64) -> Self {
        DensityOptions {
            k_max,
            eps,
            exec: Exec::default(),
            traces: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TargetResult {
    pub min_distance: f64,
    /// First iterate attaining the minimum.
    pub argmin_iterate: usize,
    /// Iterates where the running minimum strictly improved.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityReport {
    pub targets: usize,
    pub hits: usize,
    pub per_target: Vec<TargetResult>,
    #[serde(rename = "K")]
    pub k_max: usize,
    pub epsilon: f64,
    /// Wall-clock seconds.
    pub elapsed: f64,
    pub empirical: bool,
}

fn scan<D, F>(t: &Matrix, m: &Subspace, targets: &[D], opts: &DensityOptions, dist: F) -> Result<DensityReport>
where
    D: Sync,
    F: Fn(&DMatrix<f64>, &D) -> f64 + Sync + Send,
{
    if !(opts.eps > 0.0) {
        return Err(invalid("epsilon must be positive"));
    }
    let start = Instant::now();
    let mut orbit = Orbit::new(t, m)?;
    let mut results: Vec<TargetResult> = targets
        .iter()
        .map(|_| TargetResult {
            min_distance: f64::INFINITY,
            argmin_iterate: 0,
            trace: Vec::new(),
        })
        .collect();
    let mut chunk: Vec<DMatrix<f64>> = Vec::with_capacity(CHUNK.min(opts.k_max + 1));
    let mut base = 0usize;
    while base <= opts.k_max {
        chunk.clear();
        let len = CHUNK.min(opts.k_max + 1 - base);
        for j in 0..len {
            if j > 0 {
                orbit.advance()?;
            }
            chunk.push(orbit.frame().clone());
        }
        par::for_each_mut(opts.exec, &mut results, |i, r| {
            for (j, f) in chunk.iter().enumerate() {
                let d = dist(f, &targets[i]);
                if d < r.min_distance {
                    r.min_distance = d;
                    r.argmin_iterate = base + j;
                    if opts.traces {
                        r.trace.push((base + j, d));
                    }
                }
            }
        });
        base += len;
        if base <= opts.k_max {
            orbit.advance()?;
        }
    }
    let hits = results.iter().filter(|r| r.min_distance < opts.eps).count();
    Ok(DensityReport {
        targets: targets.len(),
        hits,
        per_target: results,
        k_max: opts.k_max,
        epsilon: opts.eps,
        elapsed: start.elapsed().as_secs_f64(),
        empirical: true,
    })
}

/// For each target, the smallest distance to `T^k(M)` over `0 <= k <= K`.
pub fn orbit_point_density(
    t: &Matrix,
    m: &Subspace,
    targets: &[Vec<f64>],
    opts: &DensityOptions,
) -> Result<DensityReport> {
    if let Some(x) = targets.iter().find(|x| x.len() != m.ambient_dim()) {
        return Err(Error::ShapeMismatch {
            expected: format!("targets of length {}", m.ambient_dim()),
            actual: format!("length {}", x.len()),
        });
    }
    scan(t, m, targets, opts, |f, x| residual_norm(f, x))
}

/// Chordal distance `|(I - A A^T) B|_F` between orthonormal frames.
fn chordal(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let cross = a.transpose() * b;
    (b - a * cross).norm()
}

/// For each target subspace, the smallest chordal distance to `T^k(M)` over
/// `0 <= k <= K`.
pub fn orbit_grassmann_density(
    t: &Matrix,
    m: &Subspace,
    targets: &[Subspace],
    opts: &DensityOptions,
) -> Result<DensityReport> {
    if let Some(s) = targets
        .iter()
        .find(|s| s.dim() != m.dim() || s.ambient_dim() != m.ambient_dim())
    {
        return Err(invalid(format!(
            "target is {}-dimensional in R^{}, orbit is {}-dimensional in R^{}",
            s.dim(),
            s.ambient_dim(),
            m.dim(),
            m.ambient_dim()
        )));
    }
    scan(t, m, targets, opts, |f, s| chordal(f, s.frame()))
}

/// Distance between two angles on the circle, in `[0, pi]`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Smallest `k <= K` with `k * theta_j` within `eps` of `phi_j` on the circle
/// for every `j`, by linear scan.
pub fn kronecker_find(angles: &[f64], phases: &[f64], eps: f64, k_max: u64) -> Result<Option<u64>> {
    kronecker_find_with(angles, phases, eps, k_max, Exec::default())
}

pub fn kronecker_find_with(angles: &[f64], phases: &[f64], eps: f64, k_max: u64, exec: Exec) -> Result<Option<u64>> {
    if angles.len() != phases.len() || angles.is_empty() {
        return Err(invalid(format!(
            "need matching non-empty angle and phase lists, got {} and {}",
            angles.len(),
            phases.len()
        )));
    }
    if !(eps > 0.0) {
        return Err(invalid("epsilon must be positive"));
    }
    Ok(par::find_first(exec, k_max, |k| {
        angles
            .iter()
            .zip(phases)
            .all(|(&th, &ph)| circular_distance(k as f64 * th, ph) < eps)
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualOperator {
    /// `(T^{-1})^T`.
    pub operator: Matrix,
    /// 2-norm condition number of `T`.
    pub condition: f64,
}

/// `(T^{-1})^T`, rejecting numerically singular `T`.
pub fn dual_operator(t: &Matrix) -> Result<DualOperator> {
    let n = t.require_square("operator")?;
    let (condition, sigma_min) = linalg::condition(t.as_dmatrix());
    if !(sigma_min > 0.0) || !(condition <= SINGULAR_COND) {
        return Err(Error::Singular { sigma_min, condition });
    }
    let inv = t
        .as_dmatrix()
        .clone()
        .try_inverse()
        .ok_or(Error::Singular { sigma_min, condition })?;
    debug_assert_eq!(inv.nrows(), n);
    Ok(DualOperator {
        operator: Matrix::from_dmatrix(inv.transpose())?,
        condition,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualityReport {
    pub i_max: usize,
    /// Largest chordal distance between `(T^i M)^perp` and `D^i(M^perp)`.
    pub worst_residual: f64,
    pub worst_iterate: usize,
    pub condition: f64,
}

/// Compares `complement(T^i(M))` with `D^i(complement(M))`, `D` the dual
/// operator, for `0 <= i <= i_max`. The two orbits are iterated independently.
pub fn duality_check(t: &Matrix, m: &Subspace, i_max: usize) -> Result<DualityReport> {
    check_operator(t, m.ambient_dim())?;
    let dual = dual_operator(t)?;
    let mut report = DualityReport {
        i_max,
        worst_residual: 0.0,
        worst_iterate: 0,
        condition: dual.condition,
    };
    if m.dim() == m.ambient_dim() {
        // both sides are the zero subspace
        return Ok(report);
    }
    let mut forward = Orbit::new(t, m)?;
    let mut backward = Orbit::new(&dual.operator, &complement(m)?)?;
    for i in 0..=i_max {
        if i > 0 {
            forward.advance()?;
            backward.advance()?;
        }
        let lhs = complement(&forward.subspace())?;
        let d = grassmann_distance(&lhs, &backward.subspace())?.chordal;
        if d > report.worst_residual {
            report.worst_residual = d;
            report.worst_iterate = i;
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Membership {
    pub member: bool,
    /// `dim(M ∩ (R^2 x {0}))`.
    pub first_plane_intersection: usize,
    /// `dim(M ∩ ({0} x R^2))`.
    pub second_plane_intersection: usize,
    /// Unit vectors spanning the two intersections when `member`.
    pub witnesses: Option<[Vec<f64>; 2]>,
}

fn is_plane_pair(m: &Subspace) -> Result<()> {
    if m.ambient_dim() != 4 || m.dim() != 2 {
        return Err(invalid(format!(
            "expected a 2-dimensional subspace of R^4, got {}-dimensional in R^{}",
            m.dim(),
            m.ambient_dim()
        )));
    }
    Ok(())
}

/// Kernel vector of a rank-one 2x2 block, mapped through the frame.
fn intersection_witness(frame: &DMatrix<f64>, block: &DMatrix<f64>) -> Vec<f64> {
    let svd = block.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let (imin, _) = svd.singular_values.argmin();
    let c = v_t.row(imin).transpose();
    let mut w: DVector<f64> = frame * c;
    w.unscale_mut(w.norm());
    let lead = w.iamax();
    if w[lead] < 0.0 {
        w.neg_mut();
    }
    w.iter().map(|x| if *x == 0.0 { 0.0 } else { *x }).collect()
}

/// Whether a 2-plane of R^4 meets each coordinate plane `R^2 x {0}` and
/// `{0} x R^2` in exactly a line.
pub fn esp2sup_membership(m: &Subspace) -> Result<Membership> {
    is_plane_pair(m)?;
    let f = m.frame();
    let top = f.rows(0, 2).into_owned();
    let bottom = f.rows(2, 2).into_owned();
    let rank_top = linalg::rank(&top, LOCK_TOL, 1.0);
    let rank_bottom = linalg::rank(&bottom, LOCK_TOL, 1.0);
    let first = 2 - rank_bottom;
    let second = 2 - rank_top;
    let member = first == 1 && second == 1;
    let witnesses = member.then(|| [intersection_witness(f, &bottom), intersection_witness(f, &top)]);
    Ok(Membership {
        member,
        first_plane_intersection: first,
        second_plane_intersection: second,
        witnesses,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LockReport {
    #[serde(rename = "K")]
    pub k_max: usize,
    /// Largest second singular value of the first two frame rows.
    pub worst_second_singular_value: f64,
    /// Largest `|pi/2 - max angle|` to `span{e1, e2}`.
    pub worst_angle_gap: f64,
    pub first_violation: Option<usize>,
    pub holds: bool,
}

/// Checks that every `T^k(M)` projects to a line in the first coordinate
/// plane and stays at max angle `pi/2` from it.
pub fn projection_rank_lock(t: &Matrix, m: &Subspace, k_max: usize) -> Result<LockReport> {
    is_plane_pair(m)?;
    check_operator(t, 4)?;
    let td = t.as_dmatrix();
    let split = (0..2).all(|i| (2..4).all(|j| td[(i, j)] == 0.0 && td[(j, i)] == 0.0));
    if !split {
        return Err(invalid(
            "operator must act block-diagonally on the two coordinate planes",
        ));
    }
    if !esp2sup_membership(m)?.member {
        return Err(invalid("subspace does not meet both coordinate planes in a line"));
    }
    let plane = Subspace::coordinate(4, &[0, 1])?;
    let mut orbit = Orbit::new(t, m)?;
    let mut report = LockReport {
        k_max,
        worst_second_singular_value: 0.0,
        worst_angle_gap: 0.0,
        first_violation: None,
        holds: true,
    };
    for k in 0..=k_max {
        if k > 0 {
            orbit.advance()?;
        }
        let s = linalg::singular_values(&orbit.frame().rows(0, 2).into_owned());
        let gap = (FRAC_PI_2 - grassmann_distance(&orbit.subspace(), &plane)?.max_angle).abs();
        report.worst_second_singular_value = report.worst_second_singular_value.max(s[1]);
        report.worst_angle_gap = report.worst_angle_gap.max(gap);
        if report.first_violation.is_none() && !(s[1] < LOCK_TOL && gap <= LOCK_TOL) {
            report.first_violation = Some(k);
        }
    }
    report.holds = report.first_violation.is_none();
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaledIsometryBlock {
    pub start: usize,
    pub len: usize,
    /// `a` with `B^T B = a^2 I`.
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormRatioReport {
    pub blocks: Vec<ScaledIsometryBlock>,
    #[serde(rename = "K")]
    pub k_max: usize,
    /// Largest `max_i r_i / min_i r_i - 1` with
    /// `r_i = |block_i(T^k x)| / (a_i^k |block_i(x)|)` over blocks where `x`
    /// is non-zero.
    pub worst_relative_error: f64,
    /// `ln |block_i(T^K x)|`; negative infinity where `x` vanishes on the block.
    pub final_log_norms: Vec<f64>,
    pub holds: bool,
}

/// Finest contiguous partition of the indices such that `t` is
/// block-diagonal (exact zeros outside the blocks).
fn diagonal_blocks(t: &DMatrix<f64>) -> Vec<(usize, usize)> {
    let n = t.nrows();
    let mut out = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        let mut i = start;
        while i < end {
            for j in 0..n {
                if t[(i, j)] != 0.0 || t[(j, i)] != 0.0 {
                    end = end.max(j + 1);
                }
            }
            i += 1;
        }
        out.push((start, end - start));
        start = end;
    }
    out
}

/// Verifies that each diagonal block of `t` scales norms by a constant
/// factor, so the block norms of `T^k x` keep fixed ratios after dividing out
/// `a_i^k`. The iteration runs on `x` with each block divided by its scale,
/// which avoids overflow and underflow.
pub fn norm_ratio_invariant(t: &Matrix, x: &[f64], k_max: usize) -> Result<NormRatioReport> {
    let n = t.require_square("operator")?;
    if x.len() != n {
        return Err(Error::ShapeMismatch {
            expected: format!("vector of length {n}"),
            actual: format!("length {}", x.len()),
        });
    }
    if x.iter().all(|v| *v == 0.0) {
        return Err(invalid("vector must be non-zero"));
    }
    let td = t.as_dmatrix();
    let mut blocks = Vec::new();
    let mut mats = Vec::new();
    for (start, len) in diagonal_blocks(td) {
        let b = td.view((start, start), (len, len)).into_owned();
        let gram = b.transpose() * &b;
        let a2 = gram.trace() / len as f64;
        if !(a2 > 0.0) || (gram - DMatrix::identity(len, len) * a2).amax() > NORM_RATIO_TOL * a2 {
            return Err(invalid(format!(
                "block at {start} of size {len} is not a multiple of an isometry"
            )));
        }
        let scale = a2.sqrt();
        mats.push(b / scale);
        blocks.push(ScaledIsometryBlock { start, len, scale });
    }
    let mut z: Vec<DVector<f64>> = blocks
        .iter()
        .map(|b| DVector::from_column_slice(&x[b.start..b.start + b.len]))
        .collect();
    let x_norms: Vec<f64> = z.iter().map(|v| v.norm()).collect();
    let live: Vec<usize> = (0..blocks.len()).filter(|&i| x_norms[i] > 0.0).collect();
    let mut worst = 0.0f64;
    for k in 0..=k_max {
        if k > 0 {
            for (zi, bi) in z.iter_mut().zip(&mats) {
                *zi = bi * &*zi;
            }
        }
        let ratios = live.iter().map(|&i| z[i].norm() / x_norms[i]);
        let (lo, hi) = ratios.fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r), hi.max(r)));
        if live.len() > 1 {
            worst = worst.max(hi / lo - 1.0);
        }
    }
    let final_log_norms = z
        .iter()
        .zip(&blocks)
        .map(|(zi, b)| zi.norm().ln() + k_max as f64 * b.scale.ln())
        .collect();
    Ok(NormRatioReport {
        blocks,
        k_max,
        worst_relative_error: worst,
        final_log_norms,
        holds: worst <= NORM_RATIO_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jordan::example_operator;
    use crate::matrix::rotation;
    use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

    fn double_rotation() -> Matrix {
        example_operator(&[1.0, SQRT_2], false).unwrap()
    }

    #[test]
    fn targets_in_m_at_k0() {
        let m = Subspace::coordinate(4, &[0, 2]).unwrap();
        let targets = vec![vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 0.0, -3.0, 0.0]];
        let r = orbit_point_density(&double_rotation(), &m, &targets, &DensityOptions::new(0, 0.05)).unwrap();
        assert_eq!(r.hits, 2);
        assert!(r
            .per_target
            .iter()
            .all(|t| t.min_distance == 0.0 && t.argmin_iterate == 0));
    }

    #[test]
    fn grassmann_targets() {
        let m = Subspace::coordinate(4, &[0, 2]).unwrap();
        let r = orbit_grassmann_density(
            &double_rotation(),
            &m,
            std::slice::from_ref(&m),
            &DensityOptions::new(0, 0.02),
        )
        .unwrap();
        assert_eq!(r.per_target[0].min_distance, 0.0);
        let bad = Subspace::coordinate(4, &[0]).unwrap();
        assert!(orbit_grassmann_density(&double_rotation(), &m, &[bad], &DensityOptions::new(0, 0.02)).is_err());
    }

    #[test]
    fn policies_match_and_traces_improve() {
        let m = Subspace::coordinate(2, &[0]).unwrap();
        let t = rotation(1.0).unwrap();
        let targets: Vec<Vec<f64>> = (0..7).map(|i| vec![(i as f64).cos(), (i as f64).sin()]).collect();
        let mut opts = DensityOptions::new(5000, 0.01);
        opts.traces = true;
        opts.exec = Exec::Sequential;
        let a = orbit_point_density(&t, &m, &targets, &opts).unwrap();
        opts.exec = Exec::Parallel;
        let b = orbit_point_density(&t, &m, &targets, &opts).unwrap();
        assert_eq!(a.per_target, b.per_target);
        for r in &a.per_target {
            assert!(r.trace.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 > w[1].1));
            assert_eq!(r.trace.last().unwrap().0, r.argmin_iterate);
        }
    }

    #[test]
    fn collapse_is_reported() {
        let t = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let m = Subspace::coordinate(2, &[1]).unwrap();
        let err = orbit_point_density(&t, &m, &[vec![1.0, 0.0]], &DensityOptions::new(3, 0.1)).unwrap_err();
        assert!(matches!(err, Error::DegenerateOrbit { k: 1, .. }));
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker_find(&[0.0], &[0.0], 1e-3, 10).unwrap(), Some(0));
        assert_eq!(
            kronecker_find(&[2.0 * PI / 3.0], &[4.0 * PI / 3.0], 1e-9, 10).unwrap(),
            Some(2)
        );
        assert_eq!(kronecker_find(&[0.0], &[1.0], 0.1, 100).unwrap(), None);
        assert!(kronecker_find(&[1.0], &[], 0.1, 10).is_err());
        assert!((circular_distance(0.1, TAU - 0.1) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn dual_examples() {
        let r = rotation(0.7).unwrap();
        assert!(dual_operator(&r).unwrap().operator.max_abs_diff(&r) < 1e-15);
        let d = Matrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 0.5]]).unwrap();
        let dd = dual_operator(&d).unwrap();
        assert_eq!(
            dd.operator,
            Matrix::from_rows(&[vec![0.5, 0.0], vec![0.0, 2.0]]).unwrap()
        );
        assert!((dd.condition - 4.0).abs() < 1e-12);
        let s = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(dual_operator(&s), Err(Error::Singular { .. })));
    }

    #[test]
    fn duality_trivial_and_orthogonal() {
        let m = Subspace::span(&[vec![1.0, 2.0, 0.0, 1.0]]).unwrap();
        let t = double_rotation();
        assert_eq!(duality_check(&t, &m, 0).unwrap().worst_residual, 0.0);
        assert!(duality_check(&t, &m, 1000).unwrap().worst_residual < 1e-9);
    }

    #[test]
    fn membership_examples() {
        let m = Subspace::coordinate(4, &[0, 2]).unwrap();
        let r = esp2sup_membership(&m).unwrap();
        assert!(r.member);
        assert_eq!(
            r.witnesses.unwrap(),
            [vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 0.0, 1.0, 0.0]]
        );
        let r = esp2sup_membership(&Subspace::coordinate(4, &[0, 1]).unwrap()).unwrap();
        assert!(!r.member);
        assert_eq!(r.second_plane_intersection, 0);
        let diag = Subspace::span(&[vec![1.0, 0.0, 1.0, 0.0], vec![0.0, 1.0, 0.0, 1.0]]).unwrap();
        let r = esp2sup_membership(&diag).unwrap();
        assert_eq!(
            (r.member, r.first_plane_intersection, r.second_plane_intersection),
            (false, 0, 0)
        );
        assert!(esp2sup_membership(&Subspace::coordinate(3, &[0, 1]).unwrap()).is_err());
    }

    #[test]
    fn lock_examples() {
        let t = double_rotation();
        let m = Subspace::coordinate(4, &[0, 2]).unwrap();
        let r = projection_rank_lock(&t, &m, 0).unwrap();
        assert!(r.holds);
        let r = projection_rank_lock(&t, &m, 2000).unwrap();
        assert!(r.holds, "{r:?}");
        assert!(projection_rank_lock(&t, &Subspace::coordinate(4, &[0, 1]).unwrap(), 10).is_err());
    }

    #[test]
    fn norm_ratio_examples() {
        let t = double_rotation();
        let x = [FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2, 0.0];
        let r = norm_ratio_invariant(&t, &x, 1000).unwrap();
        assert!(r.holds);
        assert_eq!(r.blocks.len(), 2);
        assert!((r.final_log_norms[0] - r.final_log_norms[1]).abs() < 1e-9);

        let single = rotation(0.3).unwrap();
        let r = norm_ratio_invariant(&single, &[1.0, 0.0], 50).unwrap();
        assert!(r.holds && r.worst_relative_error == 0.0);

        let mut mixed = double_rotation().into_dmatrix();
        mixed.view_mut((2, 2), (2, 2)).scale_mut(0.5);
        let mixed = Matrix::from_dmatrix(mixed).unwrap();
        let r = norm_ratio_invariant(&mixed, &x, 40).unwrap();
        assert!(r.holds);
        let decay = r.final_log_norms[1] - r.final_log_norms[0];
        assert!((decay + 40.0 * 2f64.ln()).abs() < 1e-9);

        let shear = Matrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        assert!(norm_ratio_invariant(&shear, &[1.0, 0.0], 3).is_err());
    }

    #[test]
    fn block_partition() {
        let t = DMatrix::from_row_slice(4, 4, &[1., 0., 0., 0., 0., 1., 0., 2., 0., 0., 3., 0., 0., 1., 0., 1.]);
        assert_eq!(diagonal_blocks(&t), vec![(0, 1), (1, 3)]);
    }
}
