//! Pseudo-resolvent, S-spectrum, regular points, defect numbers and
//! deficiency indices.
//!
//! At finite dimension the S-spectrum is exactly the set of right
//! eigenvalues, a finite union of spheres `{q : Re q = r, |Im q| = s}`.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::cayley::LambdaParam;
use crate::embed::{rank_h, rank_h_scaled, rank_threshold, right_eigen_spheres, singular_values, spectral_norm, RANK_TOL};
use crate::error::{QError, Result};
use crate::hspace::HilbertBasis;
use crate::matrix::QMatrix;
use crate::qop::{classify, is_isometric, Operator, PREDICATE_TOL};
use crate::quat::Quaternion;

/// The sphere `{q : Re q = re, |Im q| = im_norm}`; a single real point when
/// `im_norm = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralSphere {
    pub re: f64,
    pub im_norm: f64,
}

impl SpectralSphere {
    pub fn new(re: f64, im_norm: f64) -> Self {
        SpectralSphere { re, im_norm: im_norm.abs() }
    }

    /// Sphere through `q`.
    pub fn of(q: Quaternion) -> Self {
        SpectralSphere::new(q.re(), q.imag_norm())
    }

    /// Distance in `H = R^4` from `q` to the sphere.
    pub fn distance_to(&self, q: Quaternion) -> f64 {
        (q.re() - self.re).hypot(q.imag_norm() - self.im_norm)
    }

    pub fn distance(&self, other: &SpectralSphere) -> f64 {
        (self.re - other.re).hypot(self.im_norm - other.im_norm)
    }

    pub fn contains(&self, q: Quaternion, tol: f64) -> bool {
        self.distance_to(q) <= tol
    }

    /// The point `re + im_norm * unit` for an imaginary unit `unit`.
    pub fn point(&self, unit: Quaternion) -> Quaternion {
        Quaternion::real(self.re) + unit.scale(self.im_norm)
    }

    pub(crate) fn cmp_key(a: &SpectralSphere, b: &SpectralSphere) -> Ordering {
        a.re.total_cmp(&b.re).then(a.im_norm.total_cmp(&b.im_norm))
    }
}

/// `Q_q(A) = A^2 - 2 Re(q) A + |q|^2 I`. Only real scalars appear, so no
/// basis is involved.
pub fn pseudo_resolvent(a: &QMatrix, q: Quaternion) -> Result<QMatrix> {
    let a2 = a.mul(a)?;
    let id = QMatrix::identity(a.rows()).scale(q.norm_sqr());
    a2.sub(&a.scale(2.0 * q.re()))?.add(&id)
}

/// S-spectrum of a square matrix as a sorted list of spheres.
pub fn s_spectrum(a: &QMatrix, tol: f64) -> Result<Vec<SpectralSphere>> {
    if !a.is_square() {
        return Err(QError::DimensionMismatch { expected: a.rows(), found: a.cols() });
    }
    Ok(right_eigen_spheres(a, tol))
}

/// Whether `Q_q(A)` is invertible, decided by quaternionic rank.
pub fn in_s_resolvent(a: &QMatrix, q: Quaternion) -> Result<bool> {
    let s = spectral_norm(a);
    let scale = s * s + 2.0 * q.re().abs() * s + q.norm_sqr();
    Ok(rank_h_scaled(&pseudo_resolvent(a, q)?, scale, RANK_TOL)? == a.rows())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub spheres: Vec<SpectralSphere>,
    pub tol: f64,
}

/// Lower bound certificate for `|(A - qI) phi| >= c_q |phi|` on the domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularityCertificate {
    pub q: Quaternion,
    pub c_q: f64,
    pub is_regular: bool,
}

/// Regularity of `q` for `op`, with `q I` the left multiplication of `basis`.
///
/// `c_q` is the least singular value of the shifted operator on an
/// orthonormal domain frame; `q` is regular when `c_q` exceeds the shared
/// rank threshold.
pub fn regular_point(op: &Operator, q: Quaternion, basis: &HilbertBasis) -> Result<RegularityCertificate> {
    let (cert, _) = shifted_analysis(op, q, basis)?;
    Ok(cert)
}

fn shifted_analysis(op: &Operator, q: Quaternion, basis: &HilbertBasis) -> Result<(RegularityCertificate, usize)> {
    let m = op.shifted(q, basis)?;
    let d = m.cols();
    let sv = singular_values(&m);
    // Threshold relative to the operands of the shift, so a shift that
    // cancels exactly is not measured against its own roundoff.
    let smax = sv.first().copied().unwrap_or(0.0).max(spectral_norm(&op.action()) + q.norm());
    let thr = rank_threshold(&m, smax, RANK_TOL);
    let c_q = if d == 0 {
        f64::INFINITY
    } else if d > m.rows() {
        0.0
    } else {
        sv.last().copied().unwrap_or(0.0)
    };
    let is_regular = d == 0 || (smax > 0.0 && c_q > thr);
    let complex_rank = if smax == 0.0 { 0 } else { sv.iter().filter(|s| **s > thr).count() };
    if complex_rank % 2 != 0 {
        return Err(QError::OddComplexRank(complex_rank));
    }
    Ok((RegularityCertificate { q, c_q, is_regular }, complex_rank / 2))
}

/// `d_q(A) = dim ran(A - qI)^perp`, with the regularity of `q` attached.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DefectReport {
    pub q: Quaternion,
    pub d: usize,
    pub regular: bool,
    pub c_q: f64,
}

/// Defect number of `op` at `q`. The value is only meaningful for regular
/// `q`; for other points it is still the orthocomplement dimension of the
/// range, flagged by `regular = false`.
pub fn defect_number(op: &Operator, q: Quaternion, basis: &HilbertBasis) -> Result<DefectReport> {
    let (cert, rank) = shifted_analysis(op, q, basis)?;
    Ok(DefectReport { q, d: op.dim() - rank, regular: cert.is_regular, c_q: cert.c_q })
}

/// Deficiency index `n(A) = d_lambda(A)` of a class-Y operator.
pub fn deficiency_index(op: &Operator, lambda: &LambdaParam, basis: &HilbertBasis) -> Result<usize> {
    if !classify(op, basis, PREDICATE_TOL)?.in_y {
        return Err(QError::NotInClass("deficiency index needs a class-Y operator".into()));
    }
    Ok(defect_number(op, lambda.value(), basis)?.d)
}

/// Deficiency indices `(d^i, d^e)` of an isometry: `dim ran(U)^perp` and
/// `dim D(U)^perp`. `d^i` is evaluated at the interior point `mu = 0`.
pub fn iso_indices(op: &Operator) -> Result<(usize, usize)> {
    let defect = crate::qop::isometry_defect(op);
    if !is_isometric(op, PREDICATE_TOL) {
        return Err(QError::NotIsometric(defect));
    }
    let n = op.dim();
    let di = n - rank_h(&op.action(), RANK_TOL)?;
    let de = n - op.domain_dim();
    Ok((di, de))
}
