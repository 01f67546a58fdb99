//! The right quaternionic Hilbert space `H^n`: vectors, the quaternion-valued
//! inner product, Hilbert bases and the left scalar multiplication a basis
//! induces.
//!
//! Scalars act on vectors from the right, componentwise. The inner product is
//! conjugate-linear in its first slot: `<phi|psi> = sum_k conj(phi_k) psi_k`.
//! A left multiplication is not canonical; it is defined relative to a chosen
//! orthonormal basis `{phi_k}` as `q . phi = sum_k phi_k q <phi_k|phi>`.

use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{QError, Result};
use crate::matrix::QMatrix;
use crate::quat::Quaternion;

/// Maximum `|<phi_k|phi_l> - delta_kl|` accepted for a Hilbert basis.
pub const ORTHONORMAL_TOL: f64 = 1e-9;

/// Relative residual below which Gram-Schmidt declares dependence.
pub const GS_DEPENDENCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QVector(Vec<Quaternion>);

impl QVector {
    pub fn new(components: Vec<Quaternion>) -> Self {
        QVector(components)
    }

    pub fn zeros(n: usize) -> Self {
        QVector(vec![Quaternion::ZERO; n])
    }

    /// The `k`-th standard unit vector of `H^n`.
    pub fn unit(n: usize, k: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[k] = Quaternion::ONE;
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[Quaternion] {
        &self.0
    }

    pub fn into_components(self) -> Vec<Quaternion> {
        self.0
    }

    /// Right scalar action `(phi q)_k = phi_k q`.
    pub fn right_mul(&self, q: Quaternion) -> Self {
        QVector(self.0.iter().map(|c| *c * q).collect())
    }

    pub fn scale(&self, r: f64) -> Self {
        QVector(self.0.iter().map(|c| c.scale(r)).collect())
    }

    pub fn add(&self, other: &QVector) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(QVector(self.0.iter().zip(&other.0).map(|(a, b)| *a + *b).collect()))
    }

    pub fn sub(&self, other: &QVector) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(QVector(self.0.iter().zip(&other.0).map(|(a, b)| *a - *b).collect()))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Largest componentwise distance; infinite on dimension mismatch.
    pub fn max_abs_diff(&self, other: &QVector) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        self.0.iter().zip(&other.0).map(|(a, b)| (*a - *b).norm()).fold(0.0, f64::max)
    }

    pub fn as_column(&self) -> QMatrix {
        QMatrix::from_fn(self.dim(), 1, |i, _| self.0[i])
    }
}

impl Index<usize> for QVector {
    type Output = Quaternion;
    fn index(&self, k: usize) -> &Quaternion {
        &self.0[k]
    }
}

impl IndexMut<usize> for QVector {
    fn index_mut(&mut self, k: usize) -> &mut Quaternion {
        &mut self.0[k]
    }
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(QError::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `<phi|psi> = sum_k conj(phi_k) psi_k`.
pub fn inner(phi: &QVector, psi: &QVector) -> Result<Quaternion> {
    check_dims(phi.dim(), psi.dim())?;
    Ok(inner_unchecked(phi, psi))
}

fn inner_unchecked(phi: &QVector, psi: &QVector) -> Quaternion {
    phi.0.iter().zip(&psi.0).map(|(a, b)| a.conj() * *b).sum()
}

/// Recovers `<phi|psi>` from squared norms alone:
///
/// `1/4 (|phi+psi|^2 - |phi-psi|^2) + 1/4 sum_tau (|phi tau + psi|^2 - |phi tau - psi|^2) tau`
/// with `tau` ranging over `i, j, k`.
pub fn polarization(phi: &QVector, psi: &QVector) -> Result<Quaternion> {
    check_dims(phi.dim(), psi.dim())?;
    let diff = |a: &QVector| a.add(psi).unwrap().norm_sqr() - a.sub(psi).unwrap().norm_sqr();
    let mut out = Quaternion::real(0.25 * diff(phi));
    for tau in [Quaternion::I, Quaternion::J, Quaternion::K] {
        out += tau.scale(0.25 * diff(&phi.right_mul(tau)));
    }
    Ok(out)
}

/// An orthonormal basis of `H^n`, stored as its `n` columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct HilbertBasis {
    columns: Vec<QVector>,
}

impl HilbertBasis {
    /// Validates `n` vectors of dimension `n` for orthonormality.
    pub fn new(columns: Vec<QVector>) -> Result<Self> {
        let n = columns.len();
        if n == 0 {
            return Err(QError::InvalidBasis("basis is empty".into()));
        }
        if let Some(c) = columns.iter().find(|c| c.dim() != n) {
            return Err(QError::InvalidBasis(format!(
                "{n} vectors of dimension {} do not form a basis",
                c.dim()
            )));
        }
        let dev = orthonormality_defect(&columns);
        if dev > ORTHONORMAL_TOL {
            return Err(QError::InvalidBasis(format!("not orthonormal (max deviation {dev:e})")));
        }
        Ok(HilbertBasis { columns })
    }

    pub fn standard(n: usize) -> Self {
        HilbertBasis { columns: (0..n).map(|k| QVector::unit(n, k)).collect() }
    }

    /// Columns of a unitary quaternionic matrix.
    pub fn from_unitary(u: &QMatrix) -> Result<Self> {
        Self::new(u.columns())
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[QVector] {
        &self.columns
    }

    /// The `n x n` matrix with the basis vectors as columns.
    pub fn matrix(&self) -> QMatrix {
        QMatrix::from_columns(&self.columns).expect("basis columns share a dimension")
    }

    pub fn is_standard(&self) -> bool {
        let n = self.dim();
        self.columns.iter().enumerate().all(|(k, c)| *c == QVector::unit(n, k))
    }

    /// A basis obtained by permuting the columns.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        validate_permutation(perm, self.dim())?;
        Ok(HilbertBasis { columns: perm.iter().map(|&p| self.columns[p].clone()).collect() })
    }
}

impl<'de> Deserialize<'de> for HilbertBasis {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let cols = Vec::<QVector>::deserialize(d)?;
        HilbertBasis::new(cols).map_err(serde::de::Error::custom)
    }
}

pub(crate) fn validate_permutation(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(QError::InvalidArgument(format!(
            "permutation has length {}, expected {n}",
            perm.len()
        )));
    }
    for &p in perm {
        if p >= n || seen[p] {
            return Err(QError::InvalidArgument(format!("{perm:?} is not a permutation of 0..{n}")));
        }
        seen[p] = true;
    }
    Ok(())
}

/// `max_{k,l} |<v_k|v_l> - delta_kl|`.
pub fn orthonormality_defect(vectors: &[QVector]) -> f64 {
    let mut worst: f64 = 0.0;
    for (k, a) in vectors.iter().enumerate() {
        for (l, b) in vectors.iter().enumerate().skip(k) {
            if a.dim() != b.dim() {
                return f64::INFINITY;
            }
            let delta = if k == l { Quaternion::ONE } else { Quaternion::ZERO };
            worst = worst.max((inner_unchecked(a, b) - delta).norm());
        }
    }
    worst
}

/// Fourier coefficients `c_k = <phi_k|phi>`; `phi = sum_k phi_k c_k`.
pub fn expand(phi: &QVector, basis: &HilbertBasis) -> Result<Vec<Quaternion>> {
    check_dims(basis.dim(), phi.dim())?;
    Ok(basis.columns.iter().map(|c| inner_unchecked(c, phi)).collect())
}

/// `sum_k phi_k c_k`.
pub fn reconstruct(coeffs: &[Quaternion], basis: &HilbertBasis) -> Result<QVector> {
    check_dims(basis.dim(), coeffs.len())?;
    let mut out = QVector::zeros(basis.dim());
    for (col, c) in basis.columns.iter().zip(coeffs) {
        out = out.add(&col.right_mul(*c))?;
    }
    Ok(out)
}

/// Modified Gram-Schmidt with one re-orthogonalization pass.
///
/// Returns an orthonormal list with the same right span as `vectors`, or
/// `RankDeficient` when a residual drops below `GS_DEPENDENCE_TOL` times the
/// norm of the vector it came from.
pub fn orthonormalize(vectors: &[QVector]) -> Result<Vec<QVector>> {
    let n = vectors.first().map_or(0, QVector::dim);
    let mut out: Vec<QVector> = Vec::with_capacity(vectors.len());
    for (index, v) in vectors.iter().enumerate() {
        check_dims(n, v.dim())?;
        let original = v.norm();
        let mut r = v.clone();
        for _ in 0..2 {
            for e in &out {
                let c = inner_unchecked(e, &r);
                r = r.sub(&e.right_mul(c))?;
            }
        }
        let norm = r.norm();
        if original == 0.0 || norm <= GS_DEPENDENCE_TOL * original {
            return Err(QError::RankDeficient { index, residual: norm });
        }
        out.push(r.scale(1.0 / norm));
    }
    Ok(out)
}

/// Orthonormalizes `n` vectors of `H^n` into a Hilbert basis.
pub fn gram_schmidt(vectors: &[QVector]) -> Result<HilbertBasis> {
    let n = vectors.first().map_or(0, QVector::dim);
    if vectors.len() != n {
        return Err(QError::DimensionMismatch { expected: n, found: vectors.len() });
    }
    HilbertBasis::new(orthonormalize(vectors)?)
}

/// Basis-induced left scalar multiplication `q . phi = sum_k phi_k q <phi_k|phi>`.
pub fn left_mul(q: Quaternion, phi: &QVector, basis: &HilbertBasis) -> Result<QVector> {
    check_dims(basis.dim(), phi.dim())?;
    let mut out = QVector::zeros(phi.dim());
    for col in &basis.columns {
        let c = q * inner_unchecked(col, phi);
        for (o, b) in out.0.iter_mut().zip(&col.0) {
            *o += *b * c;
        }
    }
    Ok(out)
}

/// Matrix of `phi -> q . phi`, namely `sum_k phi_k q phi_k^dagger`.
///
/// In the standard basis this is exactly the scalar matrix `q I`.
pub fn left_mul_matrix(q: Quaternion, basis: &HilbertBasis) -> QMatrix {
    let n = basis.dim();
    if basis.is_standard() {
        return QMatrix::scalar(n, q);
    }
    QMatrix::from_fn(n, n, |a, b| basis.columns.iter().map(|c| c[a] * q * c[b].conj()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(w: f64, x: f64, y: f64, z: f64) -> Quaternion {
        Quaternion::new(w, x, y, z)
    }

    #[test]
    fn inner_examples() {
        let e1 = QVector::unit(2, 0);
        assert_eq!(inner(&e1, &e1).unwrap(), Quaternion::ONE);
        assert_eq!(inner(&e1.right_mul(Quaternion::J), &e1).unwrap(), -Quaternion::J);
        let phi = QVector::new(vec![Quaternion::ONE, Quaternion::I]);
        let psi = QVector::new(vec![Quaternion::J, Quaternion::ZERO]);
        assert_eq!(inner(&phi, &psi).unwrap(), Quaternion::J);
        assert!(matches!(inner(&e1, &QVector::unit(3, 0)), Err(QError::DimensionMismatch { .. })));
    }

    #[test]
    fn polarization_examples() {
        let e1 = QVector::unit(3, 0);
        assert!((polarization(&e1, &e1).unwrap() - Quaternion::ONE).norm() < 1e-15);
        let psi = QVector::new(vec![q(1.0, 2.0, 3.0, 4.0), q(0.0, -1.0, 0.5, 2.0), q(3.0, 0.0, 0.0, 1.0)]);
        assert!(polarization(&QVector::zeros(3), &psi).unwrap().norm() < 1e-15);
        let phi = QVector::new(vec![q(0.2, 0.0, -1.0, 4.0), q(1.0, 1.0, 1.0, 1.0), q(-3.0, 2.0, 0.0, 0.0)]);
        let d = polarization(&phi, &psi).unwrap() - inner(&phi, &psi).unwrap();
        assert!(d.norm() < 1e-12);
    }

    #[test]
    fn expand_in_standard_basis() {
        let b = HilbertBasis::standard(3);
        let c = expand(&QVector::unit(3, 1), &b).unwrap();
        assert_eq!(c, vec![Quaternion::ZERO, Quaternion::ONE, Quaternion::ZERO]);
        let phi = QVector::new(vec![q(1.0, 2.0, 3.0, 4.0), Quaternion::K, q(0.0, 0.0, -1.0, 0.0)]);
        assert_eq!(expand(&phi, &b).unwrap(), phi.components());
    }

    #[test]
    fn gram_schmidt_examples() {
        let std2 = vec![QVector::unit(2, 0), QVector::unit(2, 1)];
        assert_eq!(gram_schmidt(&std2).unwrap(), HilbertBasis::standard(2));

        let v1 = QVector::new(vec![Quaternion::ONE, Quaternion::ONE]);
        let v2 = QVector::new(vec![Quaternion::ONE, -Quaternion::ONE]);
        let b = gram_schmidt(&[v1, v2]).unwrap();
        let s = 1.0 / 2f64.sqrt();
        assert!(b.columns()[0].max_abs_diff(&QVector::new(vec![Quaternion::real(s); 2])) < 1e-15);
        assert!(
            b.columns()[1].max_abs_diff(&QVector::new(vec![Quaternion::real(s), Quaternion::real(-s)]))
                < 1e-15
        );

        let e1 = QVector::unit(2, 0);
        let err = gram_schmidt(&[e1.clone(), e1.right_mul(Quaternion::K)]).unwrap_err();
        assert!(matches!(err, QError::RankDeficient { index: 1, .. }));
    }

    #[test]
    fn left_mul_in_standard_basis_is_componentwise() {
        let b = HilbertBasis::standard(2);
        let p = QVector::new(vec![q(1.0, 2.0, 0.0, -1.0), q(0.5, 0.0, 3.0, 0.0)]);
        let out = left_mul(Quaternion::J, &p, &b).unwrap();
        assert_eq!(out, QVector::new(vec![Quaternion::J * p[0], Quaternion::J * p[1]]));
        let r = left_mul(Quaternion::real(2.5), &p, &b).unwrap();
        assert!(r.max_abs_diff(&p.right_mul(Quaternion::real(2.5))) < 1e-15);
    }

    #[test]
    fn basis_validation() {
        assert!(HilbertBasis::new(vec![QVector::unit(2, 0), QVector::unit(2, 0)]).is_err());
        assert!(HilbertBasis::new(vec![QVector::unit(3, 0)]).is_err());
        let j_twisted = vec![QVector::unit(2, 0).right_mul(Quaternion::J), QVector::unit(2, 1)];
        assert!(HilbertBasis::new(j_twisted).is_ok());
        assert!(serde_json::from_str::<HilbertBasis>("[[[2,0,0,0]]]").is_err());
    }
}
