//! Dense real matrices, rotations and Jordan blocks.
//!
//! Jordan blocks follow the "repeated diagonal" convention: the first
//! super-diagonal (block super-diagonal for real blocks) carries the same
//! entry `A` as the diagonal, so a classical block of size 3 with eigenvalue
//! `mu` reads
//!
//! ```text
//! [ mu mu  0 ]
//! [  0 mu mu ]
//! [  0  0 mu ]
//! ```
//!
//! With that convention the `n`-th power has the closed form
//! `(block j, block j+k) = binom(n, k) * A^n`.

use std::fmt;
use std::ops::Mul;

use nalgebra::DMatrix;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};

/// Dense real matrix with finite entries and at least one row and column.
#[derive(Clone, PartialEq)]
pub struct Matrix(DMatrix<f64>);

impl Matrix {
    /// Builds a matrix from rows. All rows must have the same non-zero length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(invalid("matrix must have at least one row and one column"));
        }
        let cols = rows[0].len();
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(Error::ShapeMismatch {
                expected: format!("{cols} entries in every row"),
                actual: format!("{} entries in row {}", r.len(), i + 1),
            });
        }
        Self::from_dmatrix(DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
    }

    /// Wraps an nalgebra matrix after checking the invariants.
    pub fn from_dmatrix(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() == 0 || m.ncols() == 0 {
            return Err(invalid("matrix must have at least one row and one column"));
        }
        if let Some(pos) = m.iter().position(|v| !v.is_finite()) {
            let (j, i) = (pos / m.nrows(), pos % m.nrows());
            return Err(invalid(format!("non-finite entry at ({}, {})", i + 1, j + 1)));
        }
        Ok(Matrix(m))
    }

    pub fn identity(n: usize) -> Self {
        Matrix(DMatrix::identity(n, n))
    }

    pub fn nrows(&self) -> usize {
        self.0.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.nrows() == self.ncols()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn transpose(&self) -> Self {
        Matrix(self.0.transpose())
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.nrows())
            .map(|i| self.0.row(i).iter().copied().collect())
            .collect()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.0.amax()
    }

    /// Max-norm of the difference with `other`.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!(self.0.shape(), other.0.shape(), "shape mismatch");
        (&self.0 - &other.0).amax()
    }

    /// Product that reports shape mismatches and overflow instead of panicking.
    pub fn checked_mul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.ncols() != rhs.nrows() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} rows on the right operand", self.ncols()),
                actual: format!("{}", rhs.nrows()),
            });
        }
        Matrix::from_dmatrix(&self.0 * &rhs.0)
    }

    pub fn scale(&self, a: f64) -> Matrix {
        Matrix(&self.0 * a)
    }

    pub(crate) fn require_square(&self, what: &str) -> Result<usize> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch {
                expected: format!("square {what}"),
                actual: format!("{}x{}", self.nrows(), self.ncols()),
            });
        }
        Ok(self.nrows())
    }
}

impl Mul for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        Matrix(&self.0 * &rhs.0)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix{:?}", self.to_rows())
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        Matrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// Rotation by `theta` radians: `[[cos, -sin], [sin, cos]]`.
pub fn rotation(theta: f64) -> Result<Matrix> {
    if !theta.is_finite() {
        return Err(invalid(format!("rotation angle must be finite, got {theta}")));
    }
    Ok(Matrix(rotation_dm(theta)))
}

pub(crate) fn rotation_dm(theta: f64) -> DMatrix<f64> {
    let (s, c) = theta.sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockKind {
    /// Acts on one coordinate per relative-size step.
    Classical,
    /// Acts on a coordinate pair (bi-component) per relative-size step.
    Real,
}

impl BlockKind {
    /// Number of coordinates per relative-size step (1 or 2).
    pub fn tau(self) -> usize {
        match self {
            BlockKind::Classical => 1,
            BlockKind::Real => 2,
        }
    }
}

/// One Jordan block: kind, modulus, angle (real kind only) and relative size.
///
/// For classical blocks `modulus` is the (signed) eigenvalue. For real blocks
/// the diagonal entry is `modulus * R(angle)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBlockSpec", into = "RawBlockSpec")]
pub struct BlockSpec {
    kind: BlockKind,
    modulus: f64,
    angle: f64,
    rho: usize,
}

#[derive(Serialize, Deserialize)]
struct RawBlockSpec {
    kind: BlockKind,
    modulus: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    angle: Option<f64>,
    rho: usize,
}

impl TryFrom<RawBlockSpec> for BlockSpec {
    type Error = Error;

    fn try_from(raw: RawBlockSpec) -> Result<Self> {
        match (raw.kind, raw.angle) {
            (BlockKind::Classical, None) => BlockSpec::classical(raw.modulus, raw.rho),
            (BlockKind::Classical, Some(_)) => Err(invalid("classical blocks do not take an angle")),
            (BlockKind::Real, Some(theta)) => BlockSpec::real(raw.modulus, theta, raw.rho),
            (BlockKind::Real, None) => Err(invalid("real blocks require an angle")),
        }
    }
}

impl From<BlockSpec> for RawBlockSpec {
    fn from(b: BlockSpec) -> Self {
        RawBlockSpec {
            kind: b.kind,
            modulus: b.modulus,
            angle: (b.kind == BlockKind::Real).then_some(b.angle),
            rho: b.rho,
        }
    }
}

impl BlockSpec {
    pub fn classical(modulus: f64, rho: usize) -> Result<Self> {
        Self::validate(modulus, 0.0, rho)?;
        Ok(BlockSpec {
            kind: BlockKind::Classical,
            modulus,
            angle: 0.0,
            rho,
        })
    }

    pub fn real(modulus: f64, angle: f64, rho: usize) -> Result<Self> {
        Self::validate(modulus, angle, rho)?;
        Ok(BlockSpec {
            kind: BlockKind::Real,
            modulus,
            angle,
            rho,
        })
    }

    fn validate(modulus: f64, angle: f64, rho: usize) -> Result<()> {
        if !modulus.is_finite() || modulus == 0.0 {
            return Err(invalid(format!(
                "block modulus must be finite and non-zero, got {modulus}"
            )));
        }
        if !angle.is_finite() {
            return Err(invalid(format!("block angle must be finite, got {angle}")));
        }
        if rho == 0 {
            return Err(invalid("block relative size must be at least 1"));
        }
        Ok(())
    }

    pub fn kind(&self) -> BlockKind {
        self.kind
    }

    pub fn modulus(&self) -> f64 {
        self.modulus
    }

    /// Rotation angle; `None` for classical blocks.
    pub fn angle(&self) -> Option<f64> {
        (self.kind == BlockKind::Real).then_some(self.angle)
    }

    pub fn rho(&self) -> usize {
        self.rho
    }

    pub fn tau(&self) -> usize {
        self.kind.tau()
    }

    /// Number of ambient coordinates the block occupies (`tau * rho`).
    pub fn dim(&self) -> usize {
        self.tau() * self.rho
    }

    /// Same block with the modulus multiplied by `a`.
    pub fn scaled(&self, a: f64) -> Result<Self> {
        let mut out = *self;
        out.modulus *= a;
        Self::validate(out.modulus, out.angle, out.rho)?;
        Ok(out)
    }

    /// The diagonal entry `A` (1x1 or 2x2).
    fn diag_entry(&self) -> DMatrix<f64> {
        self.diag_entry_power(1)
    }

    /// `A^n` computed in closed form.
    fn diag_entry_power(&self, n: u64) -> DMatrix<f64> {
        let scale = pow_f64(self.modulus, n);
        match self.kind {
            BlockKind::Classical => DMatrix::from_element(1, 1, scale),
            BlockKind::Real => rotation_dm(self.angle * n as f64) * scale,
        }
    }
}

fn pow_f64(x: f64, n: u64) -> f64 {
    match i32::try_from(n) {
        Ok(k) => x.powi(k),
        Err(_) => x.powf(n as f64),
    }
}

/// Places `weights[k] * a` on the `k`-th block super-diagonal.
fn block_toeplitz(a: &DMatrix<f64>, rho: usize, weights: impl Fn(usize) -> f64) -> DMatrix<f64> {
    let t = a.nrows();
    let mut out = DMatrix::zeros(t * rho, t * rho);
    for j in 0..rho {
        for k in 0..rho - j {
            let w = weights(k);
            if w != 0.0 {
                out.view_mut((j * t, (j + k) * t), (t, t)).copy_from(&(a * w));
            }
        }
    }
    out
}

/// The Jordan block of `spec` with `A` on the diagonal and first super-diagonal.
pub fn jordan_block(spec: &BlockSpec) -> Matrix {
    let a = spec.diag_entry();
    Matrix(block_toeplitz(&a, spec.rho, |k| if k <= 1 { 1.0 } else { 0.0 }))
}

/// How binomial coefficients are produced for closed-form block powers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BinomialMode {
    /// Multiplicative rule in `f64`.
    #[default]
    Float,
    /// Exact big-integer coefficients, rounded to `f64` once.
    Exact,
}

/// `binom(n, k)` by the multiplicative rule `prod_j (n - k + j) / j`.
pub fn binomial_f64(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (1..=k).fold(1.0, |acc, j| acc * (n - k + j) as f64 / j as f64)
}

/// Exact `binom(n, k)`.
pub fn binomial_exact(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::ZERO;
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for j in 1..=k {
        acc *= n - k + j;
        acc /= j;
    }
    acc
}

/// Closed-form `n`-th power of the Jordan block of `spec`.
///
/// The float binomial path has relative error of order `k * eps` per
/// coefficient. Fails only if the result overflows `f64`.
pub fn jordan_block_power(spec: &BlockSpec, n: u64, mode: BinomialMode) -> Result<Matrix> {
    let a_n = spec.diag_entry_power(n);
    let out = block_toeplitz(&a_n, spec.rho, |k| match mode {
        BinomialMode::Float => binomial_f64(n, k as u64),
        BinomialMode::Exact => binomial_exact(n, k as u64).to_f64().unwrap_or(f64::INFINITY),
    });
    Matrix::from_dmatrix(out).map_err(|_| invalid(format!("block power overflows f64 at n = {n}")))
}

/// `t^n` by repeated squaring; `t^0` is the identity.
pub fn matrix_power(t: &Matrix, n: u64) -> Result<Matrix> {
    let size = t.require_square("matrix")?;
    let mut result = DMatrix::identity(size, size);
    let mut base = t.0.clone();
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            result = &result * &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    Matrix::from_dmatrix(result).map_err(|_| invalid(format!("matrix power overflows f64 at n = {n}")))
}

/// Jordan block in the textbook convention: `A` on the diagonal, identity on
/// the block super-diagonal.
pub fn standard_jordan_block(spec: &BlockSpec) -> Matrix {
    let a = spec.diag_entry();
    let t = a.nrows();
    let mut out = block_toeplitz(&a, spec.rho, |k| if k == 0 { 1.0 } else { 0.0 });
    for j in 0..spec.rho.saturating_sub(1) {
        out.view_mut((j * t, (j + 1) * t), (t, t)).fill_with_identity();
    }
    Matrix(out)
}

/// Block-diagonal `D = diag(I, A^-1, A^-2, ...)` with
/// `jordan_block(spec) = D * standard_jordan_block(spec) * D^-1`.
///
/// `A` commutes with its own powers, so `D` fixes the diagonal and turns the
/// identity super-diagonal into `A`. Exists because the modulus is non-zero.
pub fn convention_transform(spec: &BlockSpec) -> Matrix {
    let t = spec.tau();
    let inv = match spec.kind {
        BlockKind::Classical => DMatrix::from_element(1, 1, 1.0 / spec.modulus),
        BlockKind::Real => rotation_dm(-spec.angle) / spec.modulus,
    };
    let mut out = DMatrix::zeros(spec.dim(), spec.dim());
    let mut power = DMatrix::identity(t, t);
    for j in 0..spec.rho {
        out.view_mut((j * t, j * t), (t, t)).copy_from(&power);
        power = &power * &inv;
    }
    Matrix(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn assert_close(a: &Matrix, b: &Matrix, tol: f64) {
        let d = a.max_abs_diff(b);
        assert!(d <= tol, "max diff {d:e} > {tol:e}\n{a:?}\n{b:?}");
    }

    #[test]
    fn rotation_basics() {
        assert_close(&rotation(0.0).unwrap(), &Matrix::identity(2), 0.0);
        let quarter = Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        assert_close(&rotation(FRAC_PI_2).unwrap(), &quarter, 1e-16);
        let ab = &rotation(0.3).unwrap() * &rotation(0.7).unwrap();
        assert_close(&ab, &rotation(1.0).unwrap(), 1e-15);
        assert!(rotation(f64::NAN).is_err());
        assert!(rotation(f64::INFINITY).is_err());
    }

    #[test]
    fn classical_block_uses_repeated_diagonal() {
        let j = jordan_block(&BlockSpec::classical(2.0, 2).unwrap());
        assert_eq!(j.to_rows(), vec![vec![2.0, 2.0], vec![0.0, 2.0]]);
    }

    #[test]
    fn real_blocks() {
        let theta = 0.4;
        let r = rotation(theta).unwrap();
        assert_close(&jordan_block(&BlockSpec::real(1.0, theta, 1).unwrap()), &r, 0.0);

        let j = jordan_block(&BlockSpec::real(1.0, theta, 2).unwrap());
        let d = j.as_dmatrix();
        for (bi, bj, expect_r) in [(0, 0, true), (0, 1, true), (1, 0, false), (1, 1, true)] {
            let view = d.view((2 * bi, 2 * bj), (2, 2)).into_owned();
            let expect = if expect_r {
                r.as_dmatrix().clone()
            } else {
                DMatrix::zeros(2, 2)
            };
            assert_eq!(view, expect, "block ({bi},{bj})");
        }
    }

    #[test]
    fn block_power_examples() {
        let p = jordan_block_power(&BlockSpec::classical(1.0, 3).unwrap(), 4, BinomialMode::Float).unwrap();
        assert_eq!(
            p.to_rows(),
            vec![vec![1.0, 4.0, 6.0], vec![0.0, 1.0, 4.0], vec![0.0, 0.0, 1.0]]
        );

        let spec = BlockSpec::real(1.0, 0.5, 2).unwrap();
        let p = jordan_block_power(&spec, 7, BinomialMode::Exact).unwrap();
        let r = rotation(3.5).unwrap();
        let d = p.as_dmatrix();
        let tl = Matrix::from_dmatrix(d.view((0, 0), (2, 2)).into_owned()).unwrap();
        let tr = Matrix::from_dmatrix(d.view((0, 2), (2, 2)).into_owned()).unwrap();
        assert_close(&tl, &r, 1e-14);
        assert_close(&tr, &r.scale(7.0), 1e-13);
        assert_eq!(d.view((2, 0), (2, 2)).amax(), 0.0);

        for spec in [spec, BlockSpec::classical(-3.0, 4).unwrap()] {
            let id = jordan_block_power(&spec, 0, BinomialMode::Float).unwrap();
            assert_eq!(id, Matrix::identity(spec.dim()));
        }
    }

    #[test]
    fn matrix_power_examples() {
        let id = Matrix::identity(2);
        assert_eq!(matrix_power(&id, 1000).unwrap(), id);
        assert_close(
            &matrix_power(&rotation(0.1).unwrap(), 10).unwrap(),
            &rotation(1.0).unwrap(),
            1e-14,
        );
        let j = jordan_block(&BlockSpec::classical(2.0, 2).unwrap());
        assert_eq!(
            matrix_power(&j, 3).unwrap().to_rows(),
            vec![vec![8.0, 24.0], vec![0.0, 8.0]]
        );
        let rect = Matrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        assert!(matrix_power(&rect, 2).is_err());
    }

    #[test]
    fn binomials_agree() {
        for n in 0..70u64 {
            for k in 0..=n + 1 {
                let exact = binomial_exact(n, k).to_f64().unwrap();
                let float = binomial_f64(n, k);
                assert!((exact - float).abs() <= 1e-13 * exact.max(1.0), "n={n} k={k}");
            }
        }
        assert_eq!(binomial_exact(10, 3), BigUint::from(120u32));
    }

    #[test]
    fn overflow_is_reported() {
        let spec = BlockSpec::classical(10.0, 2).unwrap();
        assert!(jordan_block_power(&spec, 400, BinomialMode::Float).is_err());
    }

    #[test]
    fn convention_transform_conjugates_standard_form() {
        for spec in [
            BlockSpec::classical(-1.7, 4).unwrap(),
            BlockSpec::real(0.8, 1.1, 3).unwrap(),
        ] {
            let d = convention_transform(&spec);
            let d_inv = Matrix::from_dmatrix(d.as_dmatrix().clone().try_inverse().unwrap()).unwrap();
            let conj = &(&d * &standard_jordan_block(&spec)) * &d_inv;
            assert_close(&conj, &jordan_block(&spec), 1e-12);
        }
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(BlockSpec::classical(0.0, 1).is_err());
        assert!(BlockSpec::real(1.0, 0.3, 0).is_err());
        assert!(BlockSpec::real(f64::NAN, 0.3, 1).is_err());
        assert!(Matrix::from_rows(&[vec![1.0, f64::NAN]]).is_err());
        assert!(Matrix::from_rows(&[vec![1.0, 2.0], vec![1.0]]).is_err());
        assert!(Matrix::from_rows(&[]).is_err());
    }

    #[test]
    fn block_spec_json() {
        let b: BlockSpec = serde_json::from_str(r#"{"kind":"real","modulus":1.0,"angle":0.5,"rho":2}"#).unwrap();
        assert_eq!(b, BlockSpec::real(1.0, 0.5, 2).unwrap());
        let c: BlockSpec = serde_json::from_str(r#"{"kind":"classical","modulus":2,"rho":1}"#).unwrap();
        assert_eq!(
            serde_json::to_string(&c).unwrap(),
            r#"{"kind":"classical","modulus":2.0,"rho":1}"#
        );
        assert!(serde_json::from_str::<BlockSpec>(r#"{"kind":"real","modulus":1,"rho":1}"#).is_err());
        assert!(serde_json::from_str::<BlockSpec>(r#"{"kind":"classical","modulus":0,"rho":1}"#).is_err());
    }
}
