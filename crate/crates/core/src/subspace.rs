//! Subspaces of R^N as orthonormal frames, and the principal-angle metric on
//! the Grassmannian.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use serde::{Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::linalg;
use crate::matrix::Matrix;

/// Relative threshold below which a spanning set is considered rank deficient.
pub const SPAN_RANK_TOL: f64 = 1e-12;

/// An `n`-dimensional subspace of R^N stored as an `N x n` orthonormal frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    frame: DMatrix<f64>,
}

impl Subspace {
    /// Orthonormalizes the columns of `spanning`. Fails if they are dependent.
    pub fn from_columns(spanning: &DMatrix<f64>) -> Result<Self> {
        let (n_amb, n) = spanning.shape();
        if n == 0 || n > n_amb {
            return Err(invalid(format!(
                "subspace dimension must be between 1 and {n_amb}, got {n}"
            )));
        }
        if spanning.iter().any(|v| !v.is_finite()) {
            return Err(invalid("spanning vectors must be finite"));
        }
        let s = linalg::singular_values(spanning);
        let (max, min) = (s[0], s[s.len() - 1]);
        if max == 0.0 || min <= SPAN_RANK_TOL * max {
            return Err(Error::RankDeficient(format!(
                "spanning set of {n} vectors has singular values in [{min:e}, {max:e}]"
            )));
        }
        // Already-orthonormal input is kept as is, so coordinate frames keep their signs.
        let gram_err = (spanning.transpose() * spanning - DMatrix::identity(n, n)).amax();
        if gram_err <= 4.0 * f64::EPSILON {
            return Ok(Subspace {
                frame: spanning.clone(),
            });
        }
        Ok(Subspace {
            frame: linalg::orthonormalize(spanning),
        })
    }

    /// Span of the given vectors (each of length N).
    pub fn span(vectors: &[Vec<f64>]) -> Result<Self> {
        let n_amb = vectors.first().map(Vec::len).unwrap_or(0);
        if n_amb == 0 {
            return Err(invalid("a subspace needs at least one non-empty spanning vector"));
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != n_amb) {
            return Err(Error::ShapeMismatch {
                expected: format!("vectors of length {n_amb}"),
                actual: format!("length {}", v.len()),
            });
        }
        let m = DMatrix::from_fn(n_amb, vectors.len(), |i, j| vectors[j][i]);
        Self::from_columns(&m)
    }

    /// Span of the standard basis vectors `e_i` for the given 0-based indices.
    pub fn coordinate(ambient_dim: usize, indices: &[usize]) -> Result<Self> {
        if let Some(&i) = indices.iter().find(|&&i| i >= ambient_dim) {
            return Err(invalid(format!(
                "coordinate index {i} out of range for R^{ambient_dim}"
            )));
        }
        let m = DMatrix::from_fn(
            ambient_dim,
            indices.len(),
            |i, j| {
                if i == indices[j] {
                    1.0
                } else {
                    0.0
                }
            },
        );
        Self::from_columns(&m)
    }

    /// Wraps an already-orthonormal frame (checked to 1e-10).
    pub fn from_frame(frame: DMatrix<f64>) -> Result<Self> {
        let (n_amb, n) = frame.shape();
        if n == 0 || n > n_amb {
            return Err(invalid(format!(
                "frame must be N x n with 1 <= n <= N, got {n_amb}x{n}"
            )));
        }
        let gram = frame.transpose() * &frame;
        let err = (gram - DMatrix::identity(n, n)).amax();
        if !(err <= 1e-10) {
            return Err(invalid(format!("frame columns are not orthonormal (error {err:e})")));
        }
        Ok(Subspace { frame })
    }

    pub(crate) fn from_frame_unchecked(frame: DMatrix<f64>) -> Self {
        Subspace { frame }
    }

    pub fn ambient_dim(&self) -> usize {
        self.frame.nrows()
    }

    pub fn dim(&self) -> usize {
        self.frame.ncols()
    }

    pub fn frame(&self) -> &DMatrix<f64> {
        &self.frame
    }

    /// Basis vectors (frame columns).
    pub fn basis(&self) -> Vec<Vec<f64>> {
        self.frame.column_iter().map(|c| c.iter().copied().collect()).collect()
    }

    /// Orthogonal projection of `x` onto the subspace.
    pub fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.frame * (self.frame.transpose() * x)
    }

    /// Image under `t`, re-orthonormalized. Fails if the image collapses
    /// (smallest singular value of `t * frame` below `1e-12`).
    pub fn image(&self, t: &Matrix) -> Result<Subspace> {
        check_operator(t, self.ambient_dim())?;
        let raw = t.as_dmatrix() * &self.frame;
        let s = linalg::singular_values(&raw);
        let smin = s.last().copied().unwrap_or(0.0);
        if smin < 1e-12 {
            return Err(Error::DegenerateOrbit { k: 1, sigma_min: smin });
        }
        Ok(Subspace {
            frame: linalg::orthonormalize(&raw),
        })
    }
}

impl Serialize for Subspace {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.basis().serialize(s)
    }
}

pub(crate) fn check_operator(t: &Matrix, n: usize) -> Result<()> {
    if t.nrows() != n || t.ncols() != n {
        return Err(Error::ShapeMismatch {
            expected: format!("{n}x{n} operator"),
            actual: format!("{}x{}", t.nrows(), t.ncols()),
        });
    }
    Ok(())
}

/// Euclidean distance from `x` to `s`: the norm of the projection residual.
pub fn point_to_subspace_distance(x: &[f64], s: &Subspace) -> Result<f64> {
    if x.len() != s.ambient_dim() {
        return Err(Error::ShapeMismatch {
            expected: format!("vector of length {}", s.ambient_dim()),
            actual: format!("length {}", x.len()),
        });
    }
    Ok(residual_norm(s.frame(), x))
}

/// `|x - F F^T x|` without allocating.
pub(crate) fn residual_norm(frame: &DMatrix<f64>, x: &[f64]) -> f64 {
    let (n_amb, n) = frame.shape();
    let mut coef = [0.0f64; 64];
    let mut coef_vec;
    let c: &mut [f64] = if n <= 64 {
        &mut coef[..n]
    } else {
        coef_vec = vec![0.0; n];
        &mut coef_vec
    };
    for (j, cj) in c.iter_mut().enumerate() {
        let col = frame.column(j);
        *cj = (0..n_amb).map(|i| col[i] * x[i]).sum();
    }
    let mut acc = 0.0;
    for i in 0..n_amb {
        let mut r = x[i];
        for (j, cj) in c.iter().enumerate() {
            r -= frame[(i, j)] * cj;
        }
        acc += r * r;
    }
    acc.sqrt()
}

/// Principal-angle distance between two equal-dimensional subspaces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrassmannDistance {
    /// Principal angles in `[0, pi/2]`, non-increasing.
    pub principal_angles: Vec<f64>,
    /// `sqrt(sum sin^2)` of the principal angles.
    pub chordal: f64,
    /// Largest principal angle.
    pub max_angle: f64,
}

fn cmp_frames(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Ordering {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Principal angles between `a` and `b`.
///
/// Cosines come from the singular values of `A^T B` and sines from those of
/// `(I - A A^T) B`; each angle is taken from whichever is better conditioned.
/// The operands are put in a canonical order first, so the result is exactly
/// symmetric.
pub fn grassmann_distance(a: &Subspace, b: &Subspace) -> Result<GrassmannDistance> {
    if a.ambient_dim() != b.ambient_dim() || a.dim() != b.dim() {
        return Err(invalid(format!(
            "subspaces must share ambient and dimension: {}-dim in R^{} vs {}-dim in R^{}",
            a.dim(),
            a.ambient_dim(),
            b.dim(),
            b.ambient_dim()
        )));
    }
    if a.frame == b.frame {
        let n = a.dim();
        return Ok(GrassmannDistance {
            principal_angles: vec![0.0; n],
            chordal: 0.0,
            max_angle: 0.0,
        });
    }
    let (a, b) = match cmp_frames(&a.frame, &b.frame) {
        Ordering::Greater => (b, a),
        _ => (a, b),
    };
    let cross = a.frame.transpose() * &b.frame;
    let resid = &b.frame - &a.frame * &cross;
    let cosines = linalg::singular_values(&cross); // descending
    let mut sines = linalg::singular_values(&resid);
    sines.reverse(); // ascending, pairs with descending cosines
    let n = a.dim();
    let mut angles: Vec<f64> = (0..n)
        .map(|k| {
            let c = cosines[k].clamp(0.0, 1.0);
            let s = sines[k].clamp(0.0, 1.0);
            if c * c < 0.5 {
                c.acos()
            } else {
                s.asin()
            }
        })
        .collect();
    angles.sort_by(|x, y| y.total_cmp(x));
    let chordal = sines.iter().map(|s| s.min(1.0).powi(2)).sum::<f64>().sqrt();
    Ok(GrassmannDistance {
        max_angle: angles[0],
        principal_angles: angles,
        chordal,
    })
}

/// Orthogonal complement. Fails for the whole space (complement is `{0}`).
pub fn complement(s: &Subspace) -> Result<Subspace> {
    if s.dim() == s.ambient_dim() {
        return Err(invalid("the complement of the whole space is the zero subspace"));
    }
    Ok(Subspace {
        frame: linalg::complement_columns(&s.frame),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    #[test]
    fn point_distances() {
        let s = Subspace::coordinate(4, &[0]).unwrap();
        assert_eq!(point_to_subspace_distance(&[1.0, 0.0, 0.0, 0.0], &s).unwrap(), 0.0);
        assert_eq!(point_to_subspace_distance(&[0.0, 1.0, 0.0, 0.0], &s).unwrap(), 1.0);
        let x = [FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0, 0.0];
        let d = point_to_subspace_distance(&x, &s).unwrap();
        assert!((d - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(point_to_subspace_distance(&[1.0], &s).is_err());
    }

    #[test]
    fn grassmann_examples() {
        let a = Subspace::coordinate(3, &[0, 1]).unwrap();
        let d = grassmann_distance(&a, &a).unwrap();
        assert_eq!(d.principal_angles, vec![0.0, 0.0]);
        assert_eq!(d.chordal, 0.0);

        let e1 = Subspace::coordinate(2, &[0]).unwrap();
        let e2 = Subspace::coordinate(2, &[1]).unwrap();
        assert!((grassmann_distance(&e1, &e2).unwrap().max_angle - FRAC_PI_2).abs() < 1e-15);

        let a = Subspace::coordinate(4, &[0, 1]).unwrap();
        let b = Subspace::coordinate(4, &[0, 2]).unwrap();
        let d = grassmann_distance(&a, &b).unwrap();
        assert!((d.principal_angles[0] - FRAC_PI_2).abs() < 1e-15);
        assert!(d.principal_angles[1].abs() < 1e-15);
        assert!((d.chordal - 1.0).abs() < 1e-15);

        assert!(grassmann_distance(&a, &e1).is_err());
    }

    #[test]
    fn complements() {
        let e1 = Subspace::coordinate(2, &[0]).unwrap();
        assert_eq!(complement(&e1).unwrap(), Subspace::coordinate(2, &[1]).unwrap());
        let a = Subspace::coordinate(4, &[0, 1]).unwrap();
        assert_eq!(complement(&a).unwrap(), Subspace::coordinate(4, &[2, 3]).unwrap());
        let s = Subspace::span(&[vec![1.0, 2.0, 3.0, 4.0], vec![0.0, 1.0, -1.0, 2.0]]).unwrap();
        let cc = complement(&complement(&s).unwrap()).unwrap();
        assert!(grassmann_distance(&s, &cc).unwrap().chordal < 1e-14);
        assert!(complement(&Subspace::coordinate(2, &[0, 1]).unwrap()).is_err());
    }

    #[test]
    fn dependent_spans_rejected() {
        let err = Subspace::span(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap_err();
        assert!(matches!(err, Error::RankDeficient(_)));
        assert!(Subspace::span(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).is_err());
    }

    #[test]
    fn frame_check() {
        assert!(Subspace::from_frame(DMatrix::from_column_slice(2, 1, &[1.0, 1.0])).is_err());
        assert!(Subspace::from_frame(DMatrix::from_column_slice(2, 1, &[0.6, 0.8])).is_ok());
    }
}
