//! Operators assembled from Jordan blocks, recovery of the block structure of
//! a matrix, supercyclicity lower bounds and quotient operators.
//!
//! Recovery works on the supported class of matrices whose eigenvalue
//! clusters are well separated (farther apart than
//! [`RecoveryOptions::cluster_radius`]). Each cluster is handled on its own
//! generalized eigenspace: the eigenvalue is refined as the trace of the
//! restriction, the nilpotent part's kernel dimensions give the block sizes,
//! and Jordan chains are scaled so that the super-diagonal carries the
//! diagonal entry.

use nalgebra::{Complex, ComplexField, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::matrix::{jordan_block, BlockSpec, Matrix};
use crate::subspace::{check_operator, complement, Subspace};

type Complex64 = Complex<f64>;

/// Block decomposition of an operator on R^N.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStructure", into = "RawStructure")]
pub struct JordanStructure {
    blocks: Vec<BlockSpec>,
    transform: Option<Matrix>,
    residual: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawStructure {
    blocks: Vec<BlockSpec>,
    #[serde(rename = "N")]
    n: usize,
    rho: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    transform: Option<Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    residual: Option<f64>,
}

impl TryFrom<RawStructure> for JordanStructure {
    type Error = Error;

    fn try_from(raw: RawStructure) -> Result<Self> {
        let s = JordanStructure::new(raw.blocks)?;
        if s.ambient_dim() != raw.n {
            return Err(invalid(format!(
                "N = {} does not match the block sizes (sum tau*rho = {})",
                raw.n,
                s.ambient_dim()
            )));
        }
        if s.relative_size() != raw.rho {
            return Err(invalid(format!(
                "rho = {} does not match the blocks (sum rho_i = {})",
                raw.rho,
                s.relative_size()
            )));
        }
        match raw.transform {
            Some(p) => s.with_transform(p, raw.residual),
            None => Ok(s),
        }
    }
}

impl From<JordanStructure> for RawStructure {
    fn from(s: JordanStructure) -> Self {
        RawStructure {
            n: s.ambient_dim(),
            rho: s.relative_size(),
            blocks: s.blocks,
            transform: s.transform,
            residual: s.residual,
        }
    }
}

impl JordanStructure {
    pub fn new(blocks: Vec<BlockSpec>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(invalid("a Jordan structure needs at least one block"));
        }
        Ok(JordanStructure {
            blocks,
            transform: None,
            residual: None,
        })
    }

    fn with_transform(mut self, p: Matrix, residual: Option<f64>) -> Result<Self> {
        let n = self.ambient_dim();
        if p.nrows() != n || p.ncols() != n {
            return Err(Error::ShapeMismatch {
                expected: format!("{n}x{n} transform"),
                actual: format!("{}x{}", p.nrows(), p.ncols()),
            });
        }
        self.transform = Some(p);
        self.residual = residual;
        Ok(self)
    }

    pub fn blocks(&self) -> &[BlockSpec] {
        &self.blocks
    }

    /// `P` with `T = P J P^-1`, when the structure was recovered from a matrix.
    pub fn transform(&self) -> Option<&Matrix> {
        self.transform.as_ref()
    }

    /// `max|P J P^-1 - T| / max(1, max|T|)` measured during recovery.
    pub fn residual(&self) -> Option<f64> {
        self.residual
    }

    /// `N = sum tau_i rho_i`.
    pub fn ambient_dim(&self) -> usize {
        self.blocks.iter().map(BlockSpec::dim).sum()
    }

    /// `rho = sum rho_i`.
    pub fn relative_size(&self) -> usize {
        self.blocks.iter().map(BlockSpec::rho).sum()
    }

    /// The Jordan-form matrix `J`.
    pub fn jordan_matrix(&self) -> Matrix {
        assemble(&self.blocks, None).expect("structure has at least one block")
    }

    /// Reciprocal of the largest block modulus, the factor that brings the
    /// dominant modulus to 1.
    pub fn normalizing_scale(&self) -> f64 {
        1.0 / self.blocks.iter().map(|b| b.modulus().abs()).fold(0.0, f64::max)
    }
}

/// Block-diagonal operator `diag(a_1 J_1, ..., a_g J_g)`.
pub fn assemble(blocks: &[BlockSpec], scalars: Option<&[f64]>) -> Result<Matrix> {
    if blocks.is_empty() {
        return Err(invalid("cannot assemble an operator from an empty block list"));
    }
    if let Some(a) = scalars {
        if a.len() != blocks.len() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} block multipliers", blocks.len()),
                actual: format!("{}", a.len()),
            });
        }
    }
    let n: usize = blocks.iter().map(BlockSpec::dim).sum();
    let mut out = DMatrix::zeros(n, n);
    let mut at = 0;
    for (i, b) in blocks.iter().enumerate() {
        let a = scalars.map_or(1.0, |s| s[i]);
        let j = jordan_block(b).into_dmatrix() * a;
        out.view_mut((at, at), (b.dim(), b.dim())).copy_from(&j);
        at += b.dim();
    }
    Matrix::from_dmatrix(out)
}

/// Lower bounds on the supercyclicity constant of an operator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    #[serde(rename = "N")]
    pub ambient_dim: usize,
    /// Relative size `rho` of the operator.
    #[serde(rename = "rho")]
    pub relative_size: usize,
    /// No `n`-supercyclic subspace exists for `n < rho`.
    #[serde(rename = "specific")]
    pub lower_bound_specific: usize,
    /// No operator on R^N is `n`-supercyclic for `n < floor((N+1)/2)`.
    #[serde(rename = "universal")]
    pub lower_bound_universal: usize,
}

pub fn bounds(structure: &JordanStructure) -> BoundReport {
    let n = structure.ambient_dim();
    let rho = structure.relative_size();
    BoundReport {
        ambient_dim: n,
        relative_size: rho,
        lower_bound_specific: rho,
        lower_bound_universal: n.div_ceil(2),
    }
}

/// `diag(R(theta_1), ..., R(theta_N))`, with a trailing `[1]` block when `odd`.
pub fn example_operator(angles: &[f64], odd: bool) -> Result<Matrix> {
    Ok(example_structure(angles, odd)?.jordan_matrix())
}

/// Block structure of [`example_operator`].
pub fn example_structure(angles: &[f64], odd: bool) -> Result<JordanStructure> {
    if angles.is_empty() {
        return Err(invalid("at least one rotation angle is required"));
    }
    let mut blocks = angles
        .iter()
        .map(|&t| BlockSpec::real(1.0, t, 1))
        .collect::<Result<Vec<_>>>()?;
    if odd {
        blocks.push(BlockSpec::classical(1.0, 1)?);
    }
    JordanStructure::new(blocks)
}

/// Small integer relations `sum c_i theta_i in pi Z` among the angles, which
/// break the rational independence of `{pi, theta_1, ..., theta_N}`.
///
/// Searches coefficients in `[-8, 8]` over subsets of at most three angles.
/// An empty result is evidence of independence, not a proof.
pub fn independence_warnings(angles: &[f64]) -> Vec<String> {
    const BOUND: i64 = 8;
    const TOL: f64 = 1e-9;
    let mut out = Vec::new();
    let m = angles.len();
    let mut subsets: Vec<Vec<usize>> = (0..m).map(|i| vec![i]).collect();
    for i in 0..m {
        for j in i + 1..m {
            subsets.push(vec![i, j]);
            for k in j + 1..m {
                subsets.push(vec![i, j, k]);
            }
        }
    }
    'subset: for idx in subsets {
        let mut coef = vec![-BOUND; idx.len()];
        loop {
            if coef.iter().all(|&c| c != 0) && coef[0] > 0 {
                let s: f64 = idx.iter().zip(&coef).map(|(&i, &c)| c as f64 * angles[i]).sum();
                let k = (s / std::f64::consts::PI).round();
                if (s - k * std::f64::consts::PI).abs() < TOL {
                    let terms: Vec<String> = idx
                        .iter()
                        .zip(&coef)
                        .map(|(&i, &c)| format!("{c}*theta_{}", i + 1))
                        .collect();
                    out.push(format!("{} = {}*pi", terms.join(" + "), k as i64));
                    continue 'subset;
                }
            }
            // odometer over [-BOUND, BOUND]^len
            let mut p = 0;
            loop {
                if p == coef.len() {
                    continue 'subset;
                }
                coef[p] += 1;
                if coef[p] <= BOUND {
                    break;
                }
                coef[p] = -BOUND;
                p += 1;
            }
        }
    }
    out
}

/// Tolerances for [`recover_structure`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryOptions {
    /// Relative rank threshold, and the modulus below which an eigenvalue is
    /// treated as zero (relative to `max(1, max|T|)`).
    pub tol: f64,
    /// Eigenvalues closer than this (relative to `max(1, max|T|)`) are
    /// clustered together. Numerical eigenvalues of a size-`k` block spread
    /// like `eps^(1/k)`, so this has to be much coarser than `tol`.
    pub cluster_radius: f64,
    /// Largest accepted `max|P J P^-1 - T| / max(1, max|T|)`.
    pub residual_tol: f64,
}

impl Default for RecoveryOptions {
    fn default() -> Self {
        RecoveryOptions {
            tol: 1e-8,
            cluster_radius: 1e-3,
            residual_tol: 1e-6,
        }
    }
}

impl RecoveryOptions {
    pub fn with_tol(tol: f64) -> Self {
        RecoveryOptions {
            tol,
            ..Default::default()
        }
    }
}

struct Cluster {
    center: Complex64,
    size: usize,
}

fn cluster_eigenvalues(eigs: &[Complex64], radius: f64) -> Vec<Cluster> {
    // single linkage via union-find
    let n = eigs.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut c = i;
        while p[c] != r {
            let next = p[c];
            p[c] = r;
            c = next;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (eigs[i] - eigs[j]).norm() <= radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<Complex64>)> = Vec::new();
    for (i, &z) in eigs.iter().enumerate().take(n) {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|(root, _)| *root == r) {
            Some((_, g)) => g.push(z),
            None => groups.push((r, vec![z])),
        }
    }
    groups
        .into_iter()
        .map(|(_, g)| Cluster {
            center: g.iter().sum::<Complex64>() / g.len() as f64,
            size: g.len(),
        })
        .collect()
}

fn fmt_eig(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{:.6}", z.re)
    } else {
        format!("{:.6}{:+.6}i", z.re, z.im)
    }
}

/// Orthonormal basis (columns) of the `dim` right singular vectors of `x`
/// with the smallest singular values.
fn smallest_right_singular<F: ComplexField<RealField = f64>>(x: &DMatrix<F>, dim: usize) -> DMatrix<F> {
    let n = x.ncols();
    if dim == 0 {
        return DMatrix::zeros(n, 0);
    }
    let svd = x.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let rows = v_t.nrows();
    v_t.rows(rows - dim, dim).adjoint()
}

/// Orthonormal basis of the `count` dominant left singular vectors.
fn dominant_left_singular<F: ComplexField<RealField = f64>>(x: &DMatrix<F>, count: usize) -> DMatrix<F> {
    let svd = x.clone().svd(true, false);
    svd.u.expect("requested U").columns(0, count).into_owned()
}

fn power<F: ComplexField<RealField = f64>>(a: &DMatrix<F>, k: usize) -> DMatrix<F> {
    let n = a.nrows();
    (0..k).fold(DMatrix::identity(n, n), |acc, _| acc * a)
}

/// Jordan chains for one eigenvalue cluster of algebraic multiplicity `mult`.
///
/// Returns the refined eigenvalue and the chains `[w_1, ..., w_k]` sorted by
/// length descending, scaled so that `(T - z) w_j = z w_{j-1}` and
/// `(T - z) w_1 = 0`.
fn cluster_chains<F: ComplexField<RealField = f64>>(
    t: &DMatrix<F>,
    z0: F,
    mult: usize,
    tol: f64,
    label: &str,
) -> Result<(F, Vec<Vec<DVector<F>>>)> {
    let n = t.nrows();
    let id = DMatrix::<F>::identity(n, n);
    let a = t - &id * z0.clone();
    let gen_space = smallest_right_singular(&power(&a, mult), mult);
    // restriction of T to the generalized eigenspace
    let restricted = gen_space.adjoint() * t * &gen_space;
    let z = restricted.trace() / F::from_real(mult as f64);
    let nil = &restricted - DMatrix::<F>::identity(mult, mult) * z.clone();

    let unsupported = |reason: String| Error::UnsupportedStructure {
        cluster: label.to_string(),
        reason,
    };

    let invariance = (t * &gen_space - &gen_space * &restricted).camax();
    let scale = t.camax().max(1.0);
    if invariance > 1e3 * tol * scale {
        return Err(unsupported(format!(
            "generalized eigenspace of dimension {mult} is not invariant (residual {invariance:e})"
        )));
    }

    // kernel dimensions d_k = dim ker(nil^k)
    let ref_scale = z.clone().modulus().max(nil.camax());
    let mut kernel_dims = vec![0usize];
    let mut nil_power = DMatrix::<F>::identity(mult, mult);
    for k in 1..=mult {
        nil_power = &nil_power * &nil;
        let s = nil_power.clone().svd(false, false).singular_values;
        let thresh = tol * ref_scale.powi(k as i32);
        let rank = s.iter().filter(|&&v| v > thresh).count();
        kernel_dims.push(mult - rank);
        if rank == 0 {
            break;
        }
    }
    if *kernel_dims.last().unwrap() != mult {
        return Err(unsupported(format!(
            "restriction to the generalized eigenspace is not nilpotent (kernel dimensions {:?})",
            &kernel_dims[1..]
        )));
    }
    let top = kernel_dims.len() - 1;
    // at_least[k] = number of blocks of size >= k
    let at_least: Vec<usize> = (0..=top + 1)
        .map(|k| match k {
            0 => usize::MAX,
            k if k > top => 0,
            k => kernel_dims[k] - kernel_dims[k - 1],
        })
        .collect();
    if at_least.windows(2).skip(1).any(|w| w[1] > w[0]) {
        return Err(unsupported(format!(
            "inconsistent kernel dimensions {:?}",
            &kernel_dims[1..]
        )));
    }

    let mut heads: Vec<(usize, DVector<F>)> = Vec::new();
    for k in (1..=top).rev() {
        let new_count = at_least[k] - at_least[k + 1];
        if new_count == 0 {
            continue;
        }
        let w_k = smallest_right_singular(&power(&nil, k), kernel_dims[k]);
        let mut span_cols: Vec<DVector<F>> = smallest_right_singular(&power(&nil, k - 1), kernel_dims[k - 1])
            .column_iter()
            .map(|c| c.into_owned())
            .collect();
        for (len, v) in &heads {
            span_cols.push(power(&nil, len - k) * v);
        }
        let projected = if span_cols.is_empty() {
            w_k
        } else {
            let u = DMatrix::from_columns(&span_cols);
            let q = dominant_left_singular(&u, span_cols.len());
            &w_k - &q * (q.adjoint() * &w_k)
        };
        let chosen = dominant_left_singular(&projected, new_count);
        for c in chosen.column_iter() {
            heads.push((k, c.into_owned()));
        }
    }

    let chains = heads
        .into_iter()
        .map(|(len, head)| {
            let mut chain = vec![head];
            for _ in 1..len {
                let next = (&nil * chain.last().unwrap()) / z.clone();
                chain.push(next);
            }
            chain.reverse();
            chain.into_iter().map(|w| &gen_space * w).collect::<Vec<_>>()
        })
        .collect();
    Ok((z, chains))
}

/// Recovers the block structure of `t` and a transform `P` with `t = P J P^-1`.
///
/// Blocks are sorted by `|modulus|` ascending, then classical before real,
/// then relative size descending. Angles of real blocks lie in `(0, pi)`.
pub fn recover_structure(t: &Matrix, opts: &RecoveryOptions) -> Result<JordanStructure> {
    let n = t.require_square("operator")?;
    let dm = t.as_dmatrix();
    let scale = t.max_abs().max(1.0);
    let eigs: Vec<Complex64> = dm.complex_eigenvalues().iter().copied().collect();
    if let Some(z) = eigs.iter().find(|z| z.norm() < opts.tol * scale) {
        return Err(Error::ModulusZero {
            eigenvalue: fmt_eig(*z),
        });
    }
    let radius = opts.cluster_radius * scale;
    let clusters = cluster_eigenvalues(&eigs, radius);

    // (sort key, spec, columns of P)
    let mut pieces: Vec<(BlockSpec, Vec<DVector<f64>>)> = Vec::new();
    let mut accounted = 0;
    for c in &clusters {
        let label = fmt_eig(c.center);
        if c.center.im.abs() <= radius {
            let (mu, chains) = cluster_chains(dm, c.center.re, c.size, opts.tol, &label)?;
            for chain in chains {
                pieces.push((BlockSpec::classical(mu, chain.len())?, chain));
            }
            accounted += c.size;
        } else if c.center.im > 0.0 {
            let partner = clusters
                .iter()
                .any(|d| d.size == c.size && (d.center - c.center.conj()).norm() <= radius);
            if !partner {
                return Err(Error::UnsupportedStructure {
                    cluster: label,
                    reason: "no matching conjugate cluster".into(),
                });
            }
            let tc = dm.map(|v| Complex64::new(v, 0.0));
            let (z, chains) = cluster_chains(&tc, c.center, c.size, opts.tol, &label)?;
            if z.im <= 0.0 {
                return Err(Error::UnsupportedStructure {
                    cluster: label,
                    reason: "refined eigenvalue left the upper half plane".into(),
                });
            }
            for chain in chains {
                let cols = chain.iter().flat_map(|w| [w.map(|v| v.im), w.map(|v| v.re)]).collect();
                pieces.push((BlockSpec::real(z.norm(), z.arg(), chain.len())?, cols));
            }
            accounted += 2 * c.size;
        }
    }
    if accounted != n {
        return Err(Error::UnsupportedStructure {
            cluster: "spectrum".into(),
            reason: format!("clusters account for {accounted} of {n} dimensions"),
        });
    }

    pieces.sort_by(|(a, _), (b, _)| {
        a.modulus()
            .abs()
            .total_cmp(&b.modulus().abs())
            .then(a.kind().cmp(&b.kind()))
            .then(b.rho().cmp(&a.rho()))
            .then(a.angle().unwrap_or(0.0).total_cmp(&b.angle().unwrap_or(0.0)))
            .then(a.modulus().total_cmp(&b.modulus()))
    });
    let cols: Vec<DVector<f64>> = pieces.iter().flat_map(|(_, c)| c.iter().cloned()).collect();
    let p = DMatrix::from_columns(&cols);
    let blocks: Vec<BlockSpec> = pieces.into_iter().map(|(b, _)| b).collect();
    let structure = JordanStructure::new(blocks)?;
    let j = structure.jordan_matrix();
    let p_inv = p.clone().try_inverse().ok_or_else(|| Error::UnsupportedStructure {
        cluster: "spectrum".into(),
        reason: "assembled transform is singular".into(),
    })?;
    let rebuilt = &p * j.as_dmatrix() * &p_inv;
    let residual = (rebuilt - dm).amax() / scale;
    if !(residual <= opts.residual_tol) {
        return Err(Error::UnsupportedStructure {
            cluster: "spectrum".into(),
            reason: format!("reconstruction residual {residual:e} exceeds {:e}", opts.residual_tol),
        });
    }
    structure.with_transform(Matrix::from_dmatrix(p)?, Some(residual))
}

/// Default invariance tolerance for [`quotient_operator`], relative to
/// `max(1, max|T|)`.
pub const INVARIANCE_TOL: f64 = 1e-9;

/// `|(I - P_K) T F_K|_F` for the frame `F_K` of `k`.
pub fn invariance_residual(t: &Matrix, k: &Subspace) -> Result<f64> {
    check_operator(t, k.ambient_dim())?;
    let f = k.frame();
    let tf = t.as_dmatrix() * f;
    let inside = f * (f.transpose() * &tf);
    Ok((tf - inside).norm())
}

/// Matrix of the operator induced by `t` on `R^N / K`, written in the
/// orthonormal coordinates of `K^perp` (`C^T T C` for the complement frame `C`).
pub fn quotient_operator(t: &Matrix, k: &Subspace, tol: f64) -> Result<Matrix> {
    let residual = invariance_residual(t, k)?;
    if !(residual <= tol * t.max_abs().max(1.0)) {
        return Err(Error::InvarianceViolation { residual });
    }
    let c = complement(k)?;
    let q = c.frame().transpose() * t.as_dmatrix() * c.frame();
    Matrix::from_dmatrix(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{rotation, BlockKind};

    fn real(theta: f64, rho: usize) -> BlockSpec {
        BlockSpec::real(1.0, theta, rho).unwrap()
    }

    #[test]
    fn assemble_examples() {
        let t1 = 1.0;
        let t2 = 2f64.sqrt();
        let t = assemble(&[real(t1, 1), real(t2, 1)], None).unwrap();
        let d = t.as_dmatrix();
        assert_eq!(d.view((0, 0), (2, 2)), *rotation(t1).unwrap().as_dmatrix());
        assert_eq!(d.view((2, 2), (2, 2)), *rotation(t2).unwrap().as_dmatrix());
        assert_eq!(d.view((0, 2), (2, 2)).amax(), 0.0);
        assert_eq!(d.view((2, 0), (2, 2)).amax(), 0.0);

        let one = BlockSpec::classical(1.0, 1).unwrap();
        assert_eq!(assemble(&[one], None).unwrap().to_rows(), vec![vec![1.0]]);
        assert_eq!(assemble(&[one], Some(&[0.5])).unwrap().to_rows(), vec![vec![0.5]]);
        assert!(assemble(&[], None).is_err());
        assert!(assemble(&[one], Some(&[1.0, 2.0])).is_err());
    }

    #[test]
    fn bounds_examples() {
        let s = example_structure(&[1.0, 2f64.sqrt(), 3f64.sqrt()], false).unwrap();
        let b = bounds(&s);
        assert_eq!((b.relative_size, b.lower_bound_universal), (3, 3));

        let s = JordanStructure::new(vec![real(0.7, 2)]).unwrap();
        let b = bounds(&s);
        assert_eq!((b.lower_bound_specific, b.lower_bound_universal), (2, 2));

        for blocks in [
            vec![BlockSpec::classical(1.0, 3).unwrap()],
            vec![real(0.3, 1), BlockSpec::classical(2.0, 1).unwrap()],
        ] {
            let b = bounds(&JordanStructure::new(blocks).unwrap());
            assert_eq!(b.ambient_dim, 3);
            assert_eq!(b.lower_bound_universal, 2);
        }
    }

    #[test]
    fn example_operators() {
        let t = example_operator(&[1.0, 2f64.sqrt()], false).unwrap();
        assert_eq!((t.nrows(), t.ncols()), (4, 4));
        let t = example_operator(&[1.0], true).unwrap();
        assert_eq!(t.nrows(), 3);
        assert_eq!(t.get(2, 2), 1.0);
        assert_eq!(t.get(0, 2), 0.0);
        assert_eq!(example_operator(&[0.0], false).unwrap(), Matrix::identity(2));
        assert!(example_operator(&[], true).is_err());
    }

    #[test]
    fn independence_flags() {
        assert!(independence_warnings(&[1.0, 2f64.sqrt()]).is_empty());
        assert!(!independence_warnings(&[0.0]).is_empty());
        assert!(!independence_warnings(&[std::f64::consts::PI / 3.0]).is_empty());
        assert!(!independence_warnings(&[1.0, 2.0]).is_empty());
        assert!(!independence_warnings(&[0.5, 0.7, 1.2]).is_empty());
    }

    #[test]
    fn recover_double_rotation() {
        let t = example_operator(&[1.0, 2f64.sqrt()], false).unwrap();
        let s = recover_structure(&t, &RecoveryOptions::default()).unwrap();
        assert_eq!(s.relative_size(), 2);
        let mut angles: Vec<f64> = s.blocks().iter().map(|b| b.angle().unwrap()).collect();
        angles.sort_by(f64::total_cmp);
        assert!((angles[0] - 1.0).abs() < 1e-10);
        assert!((angles[1] - 2f64.sqrt()).abs() < 1e-10);
        assert!(s
            .blocks()
            .iter()
            .all(|b| (b.modulus() - 1.0).abs() < 1e-10 && b.rho() == 1));
        assert!(s.residual().unwrap() < 1e-12);
    }

    #[test]
    fn recover_identity() {
        let s = recover_structure(&Matrix::identity(3), &RecoveryOptions::default()).unwrap();
        assert_eq!(s.blocks().len(), 3);
        for b in s.blocks() {
            assert_eq!(b.kind(), BlockKind::Classical);
            assert_eq!(b.rho(), 1);
            assert!((b.modulus() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn recover_real_block_of_size_two() {
        let theta = 0.9;
        let t = jordan_block(&real(theta, 2));
        let s = recover_structure(&t, &RecoveryOptions::default()).unwrap();
        assert_eq!(s.blocks().len(), 1);
        let b = s.blocks()[0];
        assert_eq!((b.kind(), b.rho()), (BlockKind::Real, 2));
        assert!((b.angle().unwrap() - theta).abs() < 1e-9);
        assert!((b.modulus() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn recover_negative_angle_gives_positive_representative() {
        let t = jordan_block(&real(-0.6, 1));
        let s = recover_structure(&t, &RecoveryOptions::default()).unwrap();
        assert!((s.blocks()[0].angle().unwrap() - 0.6).abs() < 1e-12);
    }

    #[test]
    fn recover_rejects_zero_eigenvalue() {
        let t = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(
            recover_structure(&t, &RecoveryOptions::default()),
            Err(Error::ModulusZero { .. })
        ));
    }

    #[test]
    fn recover_mixed_sizes_same_eigenvalue() {
        let blocks = vec![
            BlockSpec::classical(2.0, 2).unwrap(),
            BlockSpec::classical(2.0, 1).unwrap(),
        ];
        let t = assemble(&blocks, None).unwrap();
        let s = recover_structure(&t, &RecoveryOptions::default()).unwrap();
        let rhos: Vec<usize> = s.blocks().iter().map(|b| b.rho()).collect();
        assert_eq!(rhos, vec![2, 1]);
    }

    #[test]
    fn structure_json_roundtrip_and_validation() {
        let s = example_structure(&[1.0], true).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains(r#""N":3"#) && json.contains(r#""rho":2"#));
        let back: JordanStructure = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        let bad = json.replace(r#""N":3"#, r#""N":4"#);
        assert!(serde_json::from_str::<JordanStructure>(&bad).is_err());
    }

    #[test]
    fn quotient_by_invariant_axis() {
        let blocks = vec![BlockSpec::classical(0.5, 2).unwrap(), real(1.0, 1)];
        let t = assemble(&blocks, None).unwrap();
        let k = Subspace::coordinate(4, &[0]).unwrap();
        let q = quotient_operator(&t, &k, INVARIANCE_TOL).unwrap();
        let trailing = t.as_dmatrix().view((1, 1), (3, 3)).into_owned();
        assert_eq!(q.as_dmatrix(), &trailing);

        let bad = Subspace::coordinate(4, &[1]).unwrap();
        match quotient_operator(&t, &bad, INVARIANCE_TOL) {
            Err(Error::InvarianceViolation { residual }) => assert!(residual > 1e-6),
            other => panic!("expected invariance violation, got {other:?}"),
        }
    }

    #[test]
    fn quotient_by_leading_real_plane() {
        let blocks = vec![real(0.4, 1), BlockSpec::classical(3.0, 2).unwrap()];
        let t = assemble(&blocks, None).unwrap();
        let k = Subspace::coordinate(4, &[0, 1]).unwrap();
        let q = quotient_operator(&t, &k, INVARIANCE_TOL).unwrap();
        assert_eq!(q.to_rows(), vec![vec![3.0, 3.0], vec![0.0, 3.0]]);
    }
}
