//! Complex adjoint representation of quaternionic matrices.
//!
//! Each quaternion `q = w + x i + y j + z k` is split as `q = a + b j` with
//! `a = w + x i` and `b = y + z i`, and mapped to the complex block
//! `[[a, b], [-conj(b), conj(a)]]`. This embedding is a unital ring
//! homomorphism that turns conjugate transposition into the complex
//! Hermitian adjoint, so rank, inversion and eigenvalues can be computed with
//! complex dense linear algebra and mapped back.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{QError, Result};
use crate::matrix::QMatrix;
use crate::quat::Quaternion;
use crate::spectral::SpectralSphere;

/// Shared relative threshold for rank and regularity decisions.
pub const RANK_TOL: f64 = 1e-9;

/// Two eigenvalues pair when `|z1 - conj(z2)| <= PAIR_TOL * (1 + |z1|)`.
pub const PAIR_TOL: f64 = 1e-8;

/// `2n x 2m` complex matrix in the image of the adjoint representation.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexBlockMatrix(pub DMatrix<Complex64>);

impl ComplexBlockMatrix {
    pub fn inner(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }

    /// Largest violation of the block structure `[[a, b], [-conj(b), conj(a)]]`.
    ///
    /// This is the entrywise form of `J C conj(J)^T = conj(C)`.
    pub fn symplectic_defect(&self) -> f64 {
        symplectic_defect(&self.0)
    }
}

fn split(q: Quaternion) -> (Complex64, Complex64) {
    (Complex64::new(q.w, q.x), Complex64::new(q.y, q.z))
}

fn merge(a: Complex64, b: Complex64) -> Quaternion {
    Quaternion::new(a.re, a.im, b.re, b.im)
}

pub fn chi(m: &QMatrix) -> ComplexBlockMatrix {
    let mut c = DMatrix::<Complex64>::zeros(2 * m.rows(), 2 * m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let (a, b) = split(m[(i, j)]);
            c[(2 * i, 2 * j)] = a;
            c[(2 * i, 2 * j + 1)] = b;
            c[(2 * i + 1, 2 * j)] = -b.conj();
            c[(2 * i + 1, 2 * j + 1)] = a.conj();
        }
    }
    ComplexBlockMatrix(c)
}

fn symplectic_defect(c: &DMatrix<Complex64>) -> f64 {
    if !c.nrows().is_multiple_of(2) || !c.ncols().is_multiple_of(2) {
        return f64::INFINITY;
    }
    let mut worst: f64 = 0.0;
    for i in 0..c.nrows() / 2 {
        for j in 0..c.ncols() / 2 {
            let a = c[(2 * i, 2 * j)];
            let b = c[(2 * i, 2 * j + 1)];
            worst = worst
                .max((c[(2 * i + 1, 2 * j)] + b.conj()).norm())
                .max((c[(2 * i + 1, 2 * j + 1)] - a.conj()).norm());
        }
    }
    worst
}

/// Inverse of `chi`; rejects matrices whose block structure deviates by more
/// than `1e-9 * (1 + max|entry|)`.
pub fn chi_inv(c: &DMatrix<Complex64>) -> Result<QMatrix> {
    let scale = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let dev = symplectic_defect(c);
    if dev > 1e-9 * (1.0 + scale) {
        return Err(QError::NotSymplectic(dev));
    }
    Ok(chi_inv_unchecked(c))
}

/// Reads the top row of every block, averaging in the bottom row.
fn chi_inv_unchecked(c: &DMatrix<Complex64>) -> QMatrix {
    QMatrix::from_fn(c.nrows() / 2, c.ncols() / 2, |i, j| {
        let a = (c[(2 * i, 2 * j)] + c[(2 * i + 1, 2 * j + 1)].conj()) * 0.5;
        let b = (c[(2 * i, 2 * j + 1)] - c[(2 * i + 1, 2 * j)].conj()) * 0.5;
        merge(a, b)
    })
}

/// Singular values of `chi(m)`, descending. Each quaternionic singular value
/// appears twice.
pub fn singular_values(m: &QMatrix) -> Vec<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = chi(m).0.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Threshold `tol * sigma_max * max(2n, 2m)` below which singular values count as zero.
pub fn rank_threshold(m: &QMatrix, sigma_max: f64, tol: f64) -> f64 {
    tol * sigma_max * (2 * m.rows().max(m.cols())) as f64
}

/// Quaternionic rank, i.e. half the complex rank of `chi(m)`.
pub fn rank_h(m: &QMatrix, tol: f64) -> Result<usize> {
    rank_h_scaled(m, 0.0, tol)
}

/// Rank with the threshold taken relative to `max(sigma_max, scale)`.
///
/// For a difference such as `I - U` or `A - qI`, `scale` is the size of the
/// operands; without it a difference that cancels to roundoff would be
/// measured against its own noise and read as full rank.
pub fn rank_h_scaled(m: &QMatrix, scale: f64, tol: f64) -> Result<usize> {
    let sv = singular_values(m);
    let Some(&smax) = sv.first() else { return Ok(0) };
    let reference = smax.max(scale);
    if reference == 0.0 {
        return Ok(0);
    }
    let thr = rank_threshold(m, reference, tol);
    let complex_rank = sv.iter().filter(|s| **s > thr).count();
    if complex_rank % 2 != 0 {
        return Err(QError::OddComplexRank(complex_rank));
    }
    Ok(complex_rank / 2)
}

/// Largest singular value, zero for an empty matrix.
pub fn spectral_norm(m: &QMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Smallest `c >= 0` with `|M v| >= c |v|` for all `v`; zero when `M` has
/// more columns than rows.
pub fn least_singular_value(m: &QMatrix) -> f64 {
    if m.cols() == 0 {
        return f64::INFINITY;
    }
    if m.cols() > m.rows() {
        return 0.0;
    }
    singular_values(m).last().copied().unwrap_or(0.0)
}

/// Solves `M X = rhs` for square, full-rank `M`.
pub fn qsolve(m: &QMatrix, rhs: &QMatrix) -> Result<QMatrix> {
    if !m.is_square() {
        return Err(QError::DimensionMismatch { expected: m.rows(), found: m.cols() });
    }
    if rhs.rows() != m.rows() {
        return Err(QError::DimensionMismatch { expected: m.rows(), found: rhs.rows() });
    }
    let n = m.rows();
    let rank = rank_h(m, RANK_TOL)?;
    if rank < n {
        return Err(QError::Singular { rank, required: n });
    }
    let c = chi(m).0;
    let b = chi(rhs).0;
    let x = c.lu().solve(&b).ok_or(QError::Singular { rank, required: n })?;
    Ok(chi_inv_unchecked(&x))
}

pub fn qinv(m: &QMatrix) -> Result<QMatrix> {
    qsolve(m, &QMatrix::identity(m.rows()))
}

/// Complex eigenvalues of `chi(m)` (`2n` of them, in conjugate pairs).
pub fn chi_eigenvalues(m: &QMatrix) -> Vec<Complex64> {
    let c = chi(m).0;
    let scale = m.max_abs();
    if m.hermitian_defect() <= 1e-13 * (1.0 + scale) {
        let h = (&c + c.adjoint()) * Complex64::new(0.5, 0.0);
        return h.symmetric_eigenvalues().iter().map(|r| Complex64::new(*r, 0.0)).collect();
    }
    match c.clone().schur().eigenvalues() {
        Some(ev) => ev.iter().copied().collect(),
        // The complex Schur form is triangular, so this is unreachable in
        // practice; fall back to the diagonal of the (quasi) triangular factor.
        None => {
            let (_, t) = c.schur().unpack();
            t.diagonal().iter().copied().collect()
        }
    }
}

/// Right-eigenvalue spheres and the worst conjugate-pairing mismatch seen.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSpheres {
    pub spheres: Vec<SpectralSphere>,
    pub max_pair_mismatch: f64,
    pub all_pairs_within_tol: bool,
}

/// Groups the eigenvalues of `chi(m)` into conjugate pairs `{z, conj(z)}`;
/// each pair gives the sphere `(Re z, |Im z|)`. Spheres closer than `tol`
/// are merged and the list is sorted by `(re, im_norm)`.
pub fn right_eigen_spheres(m: &QMatrix, tol: f64) -> Vec<SpectralSphere> {
    right_eigen_spheres_detailed(m, tol).spheres
}

pub fn right_eigen_spheres_detailed(m: &QMatrix, tol: f64) -> EigenSpheres {
    assert!(m.is_square(), "right eigenvalues need a square matrix");
    let mut ev = chi_eigenvalues(m);
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut used = vec![false; ev.len()];
    let mut raw = Vec::with_capacity(ev.len() / 2);
    let mut max_mismatch: f64 = 0.0;
    let mut all_ok = true;
    for i in 0..ev.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let z = ev[i];
        let partner = (0..ev.len())
            .filter(|&j| !used[j])
            .min_by(|&a, &b| (z - ev[a].conj()).norm().total_cmp(&(z - ev[b].conj()).norm()));
        let Some(j) = partner else { break };
        used[j] = true;
        let w = ev[j];
        let mismatch = (z - w.conj()).norm();
        max_mismatch = max_mismatch.max(mismatch);
        if mismatch > PAIR_TOL * (1.0 + z.norm()) {
            all_ok = false;
        }
        raw.push(SpectralSphere::new(0.5 * (z.re + w.re), 0.5 * (z.im.abs() + w.im.abs())));
    }
    EigenSpheres { spheres: dedup_spheres(raw, tol), max_pair_mismatch: max_mismatch, all_pairs_within_tol: all_ok }
}

pub(crate) fn dedup_spheres(mut raw: Vec<SpectralSphere>, tol: f64) -> Vec<SpectralSphere> {
    raw.sort_by(SpectralSphere::cmp_key);
    let mut out: Vec<SpectralSphere> = Vec::with_capacity(raw.len());
    for s in raw {
        if out.iter().any(|o| o.distance(&s) <= tol) {
            continue;
        }
        out.push(s);
    }
    out
}
