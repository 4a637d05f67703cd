//! Basis reduction of a subspace against a Jordan structure.
//!
//! A vector of R^N is read as a stack of `rho` slices `chi_1(x), ..., chi_rho(x)`,
//! one per relative-size step of the blocks: a scalar where a classical block
//! acts and a coordinate pair where a real block acts. The reduction sweeps
//! the slices from `chi_rho` down to `chi_1`, and at each step turns the
//! not-yet-fixed vectors into at most two pivots with a non-zero slice plus
//! vectors whose slice is zero. The result is an inverse staircase:
//! `kappa_p` marks how many vectors have been fixed after `p` steps, and every
//! later vector vanishes on the slice of step `p`.

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::jordan::JordanStructure;
use crate::linalg;
use crate::subspace::{grassmann_distance, Subspace};

/// Default relative threshold for slice rank decisions.
pub const DEFAULT_REDUCTION_TOL: f64 = 1e-10;

/// Largest principal angle tolerated between the input and reduced spans.
pub const SPAN_ANGLE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChiSlice {
    /// 0-based first ambient coordinate.
    pub start: usize,
    /// 1 for a classical owner, 2 for a real owner.
    pub len: usize,
    /// 1-based number of the owning block.
    pub block: usize,
}

/// Slice layout of R^N for a Jordan structure.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiView {
    structure: JordanStructure,
    slices: Vec<ChiSlice>,
}

impl ChiView {
    pub fn new(structure: JordanStructure) -> Self {
        let mut slices = Vec::with_capacity(structure.relative_size());
        let mut offset = 0;
        for (p, b) in structure.blocks().iter().enumerate() {
            for r in 0..b.rho() {
                slices.push(ChiSlice {
                    start: offset + r * b.tau(),
                    len: b.tau(),
                    block: p + 1,
                });
            }
            offset += b.dim();
        }
        ChiView { structure, slices }
    }

    pub fn structure(&self) -> &JordanStructure {
        &self.structure
    }

    pub fn ambient_dim(&self) -> usize {
        self.structure.ambient_dim()
    }

    pub fn relative_size(&self) -> usize {
        self.slices.len()
    }

    /// Layout of `chi_i`, 1-based.
    pub fn slice(&self, i: usize) -> Result<ChiSlice> {
        if i == 0 || i > self.slices.len() {
            return Err(invalid(format!(
                "slice index {i} out of range 1..={}",
                self.slices.len()
            )));
        }
        Ok(self.slices[i - 1])
    }

    /// `chi_i(x)`: one coordinate or a coordinate pair.
    pub fn chi<'a>(&self, x: &'a [f64], i: usize) -> Result<&'a [f64]> {
        if x.len() != self.ambient_dim() {
            return Err(Error::ShapeMismatch {
                expected: format!("vector of length {}", self.ambient_dim()),
                actual: format!("length {}", x.len()),
            });
        }
        let s = self.slice(i)?;
        Ok(&x[s.start..s.start + s.len])
    }
}

/// Output of [`reduce`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReducedBasis {
    /// `y^1, ..., y^m`.
    pub vectors: Vec<Vec<f64>>,
    /// `kappa_0, ..., kappa_rho` (1-based vector positions).
    pub kappa: Vec<usize>,
    /// Dimension of the span of the slice set at each step.
    pub lambda_dims: Vec<usize>,
    /// Rank decisions whose ratio fell within two decades of the threshold.
    pub near_threshold: Vec<String>,
}

fn slice_of(v: &DVector<f64>, s: ChiSlice) -> Vector2<f64> {
    if s.len == 1 {
        Vector2::new(v[s.start], 0.0)
    } else {
        Vector2::new(v[s.start], v[s.start + 1])
    }
}

fn set_slice(v: &mut DVector<f64>, s: ChiSlice, value: Vector2<f64>) {
    v[s.start] = value[0];
    if s.len == 2 {
        v[s.start + 1] = value[1];
    }
}

/// Dimension of the span of 2-vectors `c` (second entries zero for scalar
/// slices). Zero when every entry is below `tol * vec_scale`; otherwise the
/// second singular value is compared to `tol` times the largest one.
fn slice_rank(cs: &[Vector2<f64>], tol: f64, vec_scale: f64, notes: &mut Vec<String>, step: usize) -> usize {
    let cmax = cs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    note_if_close(notes, step, "zero-slice", cmax / vec_scale.max(f64::MIN_POSITIVE), tol);
    if cmax <= tol * vec_scale || cs.is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(2, cs.len(), |r, c| cs[c][r]);
    let s = linalg::singular_values(&m);
    let ratio = s.get(1).copied().unwrap_or(0.0) / s[0];
    if ratio != 0.0 {
        note_if_close(notes, step, "second-direction", ratio, tol);
    }
    if ratio > tol {
        2
    } else {
        1
    }
}

fn note_if_close(notes: &mut Vec<String>, step: usize, what: &str, ratio: f64, tol: f64) {
    if ratio > tol / 100.0 && ratio < tol * 100.0 {
        notes.push(format!("step {step}: {what} ratio {ratio:.3e} vs threshold {tol:.1e}"));
    }
}

fn argmax_by(range: std::ops::Range<usize>, f: impl Fn(usize) -> f64) -> usize {
    let mut best = range.start;
    let mut best_val = f64::NEG_INFINITY;
    for j in range {
        let v = f(j);
        if v > best_val {
            best = j;
            best_val = v;
        }
    }
    best
}

/// Reduces `basis` (vectors of length N) against the slice layout of `view`.
pub fn reduce(view: &ChiView, basis: &[Vec<f64>], tol: f64) -> Result<ReducedBasis> {
    let n = view.ambient_dim();
    let rho = view.relative_size();
    let m = basis.len();
    if m > n {
        return Err(invalid(format!("{m} vectors cannot be independent in R^{n}")));
    }
    if let Some(v) = basis.iter().find(|v| v.len() != n) {
        return Err(Error::ShapeMismatch {
            expected: format!("vectors of length {n}"),
            actual: format!("length {}", v.len()),
        });
    }
    if !(tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    if m == 0 {
        return Ok(ReducedBasis {
            vectors: Vec::new(),
            kappa: vec![1; rho + 1],
            lambda_dims: vec![0; rho],
            near_threshold: Vec::new(),
        });
    }
    let input = DMatrix::from_fn(n, m, |i, j| basis[j][i]);
    let s = linalg::singular_values(&input);
    if !(s[m - 1] > tol * s[0]) {
        return Err(Error::RankDeficient(format!(
            "smallest singular value {:e} vs largest {:e}",
            s[m - 1],
            s[0]
        )));
    }

    let mut xs: Vec<DVector<f64>> = input.column_iter().map(|c| c.into_owned()).collect();
    let mut kappa = vec![1usize];
    let mut lambda_dims = Vec::with_capacity(rho);
    let mut notes = Vec::new();
    let swap_s = Matrix2::new(0.0, 1.0, 1.0, 0.0);

    for step in 0..rho {
        let sl = view.slices[rho - step - 1];
        let start = kappa[step] - 1; // 0-based first active vector
        let vec_scale = xs[start..].iter().map(|v| v.amax()).fold(0.0, f64::max);
        let cs: Vec<Vector2<f64>> = xs[start..].iter().map(|v| slice_of(v, sl)).collect();
        let dim = if start < m {
            slice_rank(&cs, tol, vec_scale, &mut notes, step)
        } else {
            0
        };

        match dim {
            0 => {}
            1 => {
                let p = argmax_by(start..m, |j| slice_of(&xs[j], sl).norm());
                xs.swap(start, p);
                let c = slice_of(&xs[start], sl);
                let norm = c.norm();
                xs[start] /= norm;
                let u = c / norm;
                set_slice(&mut xs[start], sl, u);
                let pivot = xs[start].clone();
                for x in xs.iter_mut().skip(start + 1) {
                    let alpha = slice_of(x, sl).dot(&u);
                    x.axpy(-alpha, &pivot, 1.0);
                    set_slice(x, sl, Vector2::zeros());
                }
            }
            _ => {
                let p1 = argmax_by(start..m, |j| slice_of(&xs[j], sl).norm());
                xs.swap(start, p1);
                let c1 = slice_of(&xs[start], sl);
                let u1 = c1 / c1.norm();
                let p2 = argmax_by(start + 1..m, |j| {
                    let c = slice_of(&xs[j], sl);
                    (c[0] * u1[1] - c[1] * u1[0]).abs()
                });
                xs.swap(start + 1, p2);
                let c = Matrix2::from_columns(&[c1, slice_of(&xs[start + 1], sl)]);
                let g = c.try_inverse().expect("rank-2 slice pair is invertible") * swap_s;
                let (xa, xb) = (xs[start].clone(), xs[start + 1].clone());
                let mut ya = &xa * g[(0, 0)] + &xb * g[(1, 0)];
                let mut yb = &xa * g[(0, 1)] + &xb * g[(1, 1)];
                set_slice(&mut ya, sl, Vector2::new(0.0, 1.0));
                set_slice(&mut yb, sl, Vector2::new(1.0, 0.0));
                for x in xs.iter_mut().skip(start + 2) {
                    let cj = slice_of(x, sl);
                    x.axpy(-cj[1], &ya, 1.0);
                    x.axpy(-cj[0], &yb, 1.0);
                    set_slice(x, sl, Vector2::zeros());
                }
                xs[start] = ya;
                xs[start + 1] = yb;
            }
        }
        lambda_dims.push(dim);
        kappa.push(kappa[step] + dim);
    }

    if kappa[rho] != m + 1 {
        return Err(Error::RankDeficient(format!(
            "{} vectors vanish on every slice after reduction",
            m + 1 - kappa[rho]
        )));
    }
    Ok(ReducedBasis {
        vectors: xs.iter().map(|v| v.iter().copied().collect()).collect(),
        kappa,
        lambda_dims,
        near_threshold: notes,
    })
}

/// Per-property verdicts for a reduced basis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionCheck {
    /// `kappa_0 = 1`.
    pub a_kappa_start: bool,
    /// `kappa_{i+1} = kappa_i + dim span(Lambda_i)`, with `Lambda_i` recomputed
    /// from the output vectors.
    pub b_kappa_steps: bool,
    /// Pivot slices of each step are linearly independent.
    pub c_pivots_independent: bool,
    /// `kappa_rho = m + 1`.
    pub d_kappa_end: bool,
    /// Every vector past `kappa_p` vanishes on the slice of step `p`.
    pub e_staircase: bool,
    /// Rank-2 steps have pivot slices exactly `(0,1)` and `(1,0)`.
    pub pair_normalization: bool,
    /// Input and output spans agree.
    pub span_preserved: bool,
    pub worst_staircase_residual: f64,
    pub span_max_angle: f64,
    pub passed: bool,
}

/// Checks the reduction properties of `rb` against `original`.
pub fn verify_reduction(rb: &ReducedBasis, view: &ChiView, original: &[Vec<f64>], tol: f64) -> ReductionCheck {
    let rho = view.relative_size();
    let m = rb.vectors.len();
    let n = view.ambient_dim();
    let shapes_ok = rb.kappa.len() == rho + 1
        && rb.lambda_dims.len() == rho
        && original.len() == m
        && rb.vectors.iter().chain(original).all(|v| v.len() == n)
        && rb.kappa.iter().all(|&k| (1..=m + 1).contains(&k))
        && rb.kappa.windows(2).all(|w| w[0] <= w[1]);
    if !shapes_ok {
        return ReductionCheck {
            a_kappa_start: rb.kappa.first() == Some(&1),
            b_kappa_steps: false,
            c_pivots_independent: false,
            d_kappa_end: rb.kappa.get(rho) == Some(&(m + 1)),
            e_staircase: false,
            pair_normalization: false,
            span_preserved: false,
            worst_staircase_residual: f64::INFINITY,
            span_max_angle: f64::INFINITY,
            passed: false,
        };
    }
    let ys: Vec<DVector<f64>> = rb.vectors.iter().map(|v| DVector::from_column_slice(v)).collect();
    let scale = ys.iter().map(|v| v.amax()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let slice_at = |step: usize| view.slices[rho - step - 1];

    let a = rb.kappa[0] == 1;
    let mut scratch = Vec::new();
    let mut b = true;
    let mut c = true;
    let mut normalized = true;
    for step in 0..rho {
        let sl = slice_at(step);
        let from = rb.kappa[step] - 1;
        let lam: Vec<Vector2<f64>> = ys[from..].iter().map(|v| slice_of(v, sl)).collect();
        let dim = slice_rank(&lam, tol, scale, &mut scratch, step);
        b &= rb.kappa[step + 1] == rb.kappa[step] + dim && rb.lambda_dims[step] == dim;

        let pivots: Vec<Vector2<f64>> = ys[from..rb.kappa[step + 1] - 1]
            .iter()
            .map(|v| slice_of(v, sl))
            .collect();
        c &= match pivots.len() {
            0 => true,
            1 => pivots[0].norm() > tol * scale,
            2 => {
                let mat = Matrix2::from_columns(&[pivots[0], pivots[1]]);
                let s = linalg::singular_values(&DMatrix::from_column_slice(2, 2, mat.as_slice()));
                sl.len == 2 && s[1] > tol * s[0]
            }
            _ => false,
        };
        if pivots.len() == 2 {
            normalized &= pivots[0] == Vector2::new(0.0, 1.0) && pivots[1] == Vector2::new(1.0, 0.0);
        }
    }
    let d = rb.kappa[rho] == m + 1;

    let mut worst = 0.0f64;
    for p in 1..=rho {
        let sl = view.slices[rho - p];
        for y in ys.iter().skip(rb.kappa[p] - 1) {
            worst = worst.max(slice_of(y, sl).norm());
        }
    }
    let e = worst <= tol * scale;

    let span_max_angle = if m == 0 {
        0.0
    } else {
        match (Subspace::span(original), Subspace::span(&rb.vectors)) {
            (Ok(s1), Ok(s2)) => grassmann_distance(&s1, &s2).map_or(f64::INFINITY, |g| g.max_angle),
            _ => f64::INFINITY,
        }
    };
    let span_preserved = span_max_angle < SPAN_ANGLE_TOL;
    ReductionCheck {
        a_kappa_start: a,
        b_kappa_steps: b,
        c_pivots_independent: c,
        d_kappa_end: d,
        e_staircase: e,
        pair_normalization: normalized,
        span_preserved,
        worst_staircase_residual: worst,
        span_max_angle,
        passed: a && b && c && d && e && normalized && span_preserved,
    }
}
