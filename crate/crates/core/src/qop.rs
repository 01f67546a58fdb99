//! Right-linear operators on `H^n`: dense matrices and operators defined on a
//! proper subspace, together with adjoints, symmetry and isometry predicates,
//! operator-level scalar multiplication and the operator classes X, Y, Z.
//!
//! Class membership is always relative to the basis that induces the left
//! scalar multiplication.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embed::{rank_h, rank_h_scaled, spectral_norm, RANK_TOL};
use crate::error::{QError, Result};
use crate::hspace::{inner, left_mul_matrix, orthonormality_defect, orthonormalize, HilbertBasis, QVector};
use crate::matrix::QMatrix;
use crate::quat::Quaternion;

/// Default tolerance for the symmetry, isometry and class predicates.
pub const PREDICATE_TOL: f64 = 1e-9;

const IMAGINARY_UNITS: [Quaternion; 3] = [Quaternion::I, Quaternion::J, Quaternion::K];

/// Operator with domain `span(domain_frame)`, a right subspace of `H^n`.
///
/// Column `l` of `action` is the image of column `l` of `domain_frame`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartialOperator {
    domain_frame: QMatrix,
    action: QMatrix,
    /// Treat this operator as a stand-in for a densely defined one, so that
    /// it can enter class Y and the Cayley transform.
    #[serde(default)]
    dense_stand_in: bool,
}

impl PartialOperator {
    /// Validates shapes and orthonormality of the frame.
    pub fn new(domain_frame: QMatrix, action: QMatrix) -> Result<Self> {
        let n = domain_frame.rows();
        let d = domain_frame.cols();
        if action.rows() != n || action.cols() != d {
            return Err(QError::InvalidOperator(format!(
                "action is {}x{}, domain_frame is {n}x{d}",
                action.rows(),
                action.cols()
            )));
        }
        if n == 0 {
            return Err(QError::InvalidOperator("ambient dimension is zero".into()));
        }
        if d > n {
            return Err(QError::InvalidOperator(format!("domain dimension {d} exceeds {n}")));
        }
        let dev = orthonormality_defect(&domain_frame.columns());
        if dev > crate::hspace::ORTHONORMAL_TOL {
            return Err(QError::InvalidOperator(format!(
                "domain_frame columns are not orthonormal (max deviation {dev:e})"
            )));
        }
        Ok(PartialOperator { domain_frame, action, dense_stand_in: false })
    }

    pub fn with_dense_stand_in(mut self, flag: bool) -> Self {
        self.dense_stand_in = flag;
        self
    }

    /// Restriction of a dense matrix to the right span of `vectors`.
    pub fn restrict(a: &QMatrix, vectors: &[QVector]) -> Result<Self> {
        let frame = QMatrix::from_columns(&orthonormalize(vectors)?)?;
        let action = a.mul(&frame)?;
        Self::new(frame, action)
    }

    pub fn domain_frame(&self) -> &QMatrix {
        &self.domain_frame
    }

    pub fn action(&self) -> &QMatrix {
        &self.action
    }

    pub fn dense_stand_in(&self) -> bool {
        self.dense_stand_in
    }

    /// Ambient dimension `n`.
    pub fn dim(&self) -> usize {
        self.domain_frame.rows()
    }

    pub fn domain_dim(&self) -> usize {
        self.domain_frame.cols()
    }

    /// Coordinates of `v` in the domain frame, failing when `v` is outside
    /// the domain by more than `tol * (1 + |v|)`.
    pub fn coordinates(&self, v: &QVector, tol: f64) -> Result<QVector> {
        let c = self.domain_frame.adjoint().apply(v)?;
        let back = self.domain_frame.apply(&c)?;
        let miss = back.sub(v)?.norm();
        if miss > tol * (1.0 + v.norm()) {
            return Err(QError::InvalidArgument(format!("vector lies outside the domain (distance {miss:e})")));
        }
        Ok(c)
    }

    pub fn apply(&self, v: &QVector) -> Result<QVector> {
        let c = self.coordinates(v, 1e-9)?;
        self.action.apply(&c)
    }

    /// Applies the operator to every column of `m` (all must lie in the domain).
    pub fn apply_matrix(&self, m: &QMatrix) -> Result<QMatrix> {
        let cols = m.columns().iter().map(|c| self.apply(c)).collect::<Result<Vec<_>>>()?;
        if cols.is_empty() {
            return Ok(QMatrix::zeros(self.dim(), 0));
        }
        QMatrix::from_columns(&cols)
    }

    /// Dense matrix `action * frame^dagger` when the domain is the whole space.
    pub fn to_dense(&self) -> Option<QMatrix> {
        if self.domain_dim() != self.dim() {
            return None;
        }
        self.action.mul(&self.domain_frame.adjoint()).ok()
    }

    /// Inverse operator with domain `ran(A)`; requires injectivity.
    pub fn inverse(&self) -> Result<PartialOperator> {
        let (frame, coeff) = frame_and_coefficients(&self.action)?;
        let coeff_inv = crate::embed::qinv(&coeff)?;
        let action = self.domain_frame.mul(&coeff_inv)?;
        Ok(PartialOperator::new(frame, action)?.with_dense_stand_in(self.dense_stand_in))
    }
}

/// Orthonormal frame `F` of `span(cols(m))` and coefficients `C = F^dagger m`
/// with `m = F C`. Fails when the columns are dependent.
pub(crate) fn frame_and_coefficients(m: &QMatrix) -> Result<(QMatrix, QMatrix)> {
    if m.cols() == 0 {
        return Ok((QMatrix::zeros(m.rows(), 0), QMatrix::zeros(0, 0)));
    }
    let frame = QMatrix::from_columns(&orthonormalize(&m.columns())?)?;
    let coeff = frame.adjoint().mul(m)?;
    Ok((frame, coeff))
}

/// A right-linear operator, either on all of `H^n` or on a subspace.
#[derive(Debug, Clone, PartialEq)]
pub enum Operator {
    Dense(QMatrix),
    Partial(PartialOperator),
}

impl From<QMatrix> for Operator {
    fn from(m: QMatrix) -> Self {
        Operator::Dense(m)
    }
}

impl From<PartialOperator> for Operator {
    fn from(p: PartialOperator) -> Self {
        Operator::Partial(p)
    }
}

impl Operator {
    pub fn dim(&self) -> usize {
        match self {
            Operator::Dense(m) => m.rows(),
            Operator::Partial(p) => p.dim(),
        }
    }

    pub fn domain_dim(&self) -> usize {
        match self {
            Operator::Dense(m) => m.cols(),
            Operator::Partial(p) => p.domain_dim(),
        }
    }

    pub fn is_dense(&self) -> bool {
        matches!(self, Operator::Dense(_))
    }

    /// Dense operators, and partial ones flagged as stand-ins.
    pub fn densely_defined(&self) -> bool {
        match self {
            Operator::Dense(_) => true,
            Operator::Partial(p) => p.dense_stand_in,
        }
    }

    pub fn as_dense(&self) -> Option<&QMatrix> {
        match self {
            Operator::Dense(m) => Some(m),
            Operator::Partial(_) => None,
        }
    }

    pub fn as_partial(&self) -> Option<&PartialOperator> {
        match self {
            Operator::Partial(p) => Some(p),
            Operator::Dense(_) => None,
        }
    }

    /// Orthonormal frame of the domain (the identity for dense operators).
    pub fn domain_frame(&self) -> QMatrix {
        match self {
            Operator::Dense(m) => QMatrix::identity(m.cols()),
            Operator::Partial(p) => p.domain_frame.clone(),
        }
    }

    /// Images of the domain frame columns.
    pub fn action(&self) -> QMatrix {
        match self {
            Operator::Dense(m) => m.clone(),
            Operator::Partial(p) => p.action.clone(),
        }
    }

    pub fn apply(&self, v: &QVector) -> Result<QVector> {
        match self {
            Operator::Dense(m) => m.apply(v),
            Operator::Partial(p) => p.apply(v),
        }
    }

    /// Range matrix of `A - q I` on the domain frame: `action - L_q * frame`.
    ///
    /// Its columns span `ran(A - q I)`, and `|(A - qI) F c| = |M c|` for the
    /// orthonormal frame `F`, so its least singular value is the best
    /// regularity constant.
    pub fn shifted(&self, q: Quaternion, basis: &HilbertBasis) -> Result<QMatrix> {
        check_basis(self.dim(), basis)?;
        let l = left_mul_matrix(q, basis);
        match self {
            Operator::Dense(m) => m.sub(&l),
            Operator::Partial(p) => p.action.sub(&l.mul(&p.domain_frame)?),
        }
    }

    /// Dense matrix when the domain is everything.
    pub fn to_dense(&self) -> Option<QMatrix> {
        match self {
            Operator::Dense(m) => Some(m.clone()),
            Operator::Partial(p) => p.to_dense(),
        }
    }

    /// Gram matrix `F^dagger (A F)` of the operator on its domain frame.
    pub fn gram(&self) -> QMatrix {
        match self {
            Operator::Dense(m) => m.clone(),
            Operator::Partial(p) => p.domain_frame.adjoint().mul(&p.action).expect("frame/action shapes agree"),
        }
    }
}

pub(crate) fn check_basis(n: usize, basis: &HilbertBasis) -> Result<()> {
    if basis.dim() != n {
        return Err(QError::DimensionMismatch { expected: n, found: basis.dim() });
    }
    Ok(())
}

/// Conjugate transpose; satisfies `<psi|A phi> = <A^dagger psi|phi>`.
pub fn adjoint(a: &QMatrix) -> QMatrix {
    a.adjoint()
}

/// Deterministic probe vectors in the domain of `op`: the frame columns,
/// their pairwise sums and a few fixed pseudo-random combinations.
pub fn domain_probes(op: &Operator) -> Vec<QVector> {
    let frame = op.domain_frame();
    let d = frame.cols();
    let mut coords: Vec<QVector> = (0..d).map(|k| QVector::unit(d, k)).collect();
    for a in 0..d {
        for b in a + 1..d {
            coords.push(QVector::unit(d, a).add(&QVector::unit(d, b).right_mul(Quaternion::new(0.5, 0.5, -0.5, 0.5))).unwrap());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x005e_ed0f_d0a1);
    for _ in 0..8 {
        coords.push(crate::random::vector(&mut rng, d));
    }
    coords.iter().filter(|_| d > 0).map(|c| frame.apply(c).unwrap()).collect()
}

/// Largest `|Im <A phi|phi>| / (|A phi| |phi|)` over the deterministic probes.
pub fn quadratic_form_imag_defect(op: &Operator) -> f64 {
    domain_probes(op)
        .iter()
        .map(|phi| {
            let a_phi = op.apply(phi).unwrap();
            let v = inner(&a_phi, phi).unwrap();
            v.imag_norm() / (1.0 + a_phi.norm() * phi.norm())
        })
        .fold(0.0, f64::max)
}

/// Symmetry `<A phi|psi> = <phi|A psi>` on the domain.
///
/// Dense: `max|A - A^dagger| <= tol`. Partial: the Gram certificate
/// `F^dagger X` is Hermitian within `tol` and the quadratic form is real on
/// the probe set.
pub fn is_symmetric(op: &Operator, tol: f64) -> bool {
    match op {
        Operator::Dense(m) => m.is_square() && m.hermitian_defect() <= tol,
        Operator::Partial(_) => op.gram().hermitian_defect() <= tol && quadratic_form_imag_defect(op) <= tol,
    }
}

/// Matrix of `phi -> q . (A phi)` with left multiplication in `basis`.
pub fn op_scalar_left(q: Quaternion, a: &QMatrix, basis: &HilbertBasis) -> Result<QMatrix> {
    check_basis(a.rows(), basis)?;
    left_mul_matrix(q, basis).mul(a)
}

/// Matrix of `phi -> A (q . phi)` with left multiplication in `basis`.
pub fn op_scalar_right(a: &QMatrix, q: Quaternion, basis: &HilbertBasis) -> Result<QMatrix> {
    check_basis(a.cols(), basis)?;
    a.mul(&left_mul_matrix(q, basis))
}

/// Whether `L_tau D(A) ⊆ D(A)` for `tau = i, j, k`.
pub fn domain_is_unit_invariant(op: &Operator, basis: &HilbertBasis) -> Result<bool> {
    let Operator::Partial(p) = op else { return Ok(true) };
    check_basis(p.dim(), basis)?;
    let d = p.domain_dim();
    for tau in IMAGINARY_UNITS {
        let moved = left_mul_matrix(tau, basis).mul(&p.domain_frame)?;
        if rank_h(&p.domain_frame.hstack(&moved)?, RANK_TOL)? != d {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Worst anti-symmetry residual of `tau A` on the domain, `tau = i, j, k`:
/// `max |(L_tau X)^dagger F + F^dagger (L_tau X)|`.
pub fn unit_multiple_antisymmetry_defect(op: &Operator, basis: &HilbertBasis) -> Result<f64> {
    check_basis(op.dim(), basis)?;
    let frame = op.domain_frame();
    let action = op.action();
    let mut worst: f64 = 0.0;
    for tau in IMAGINARY_UNITS {
        let ta = left_mul_matrix(tau, basis).mul(&action)?;
        let lhs = ta.adjoint().mul(&frame)?;
        let rhs = frame.adjoint().mul(&ta)?.scale(-1.0);
        worst = worst.max(lhs.max_abs_diff(&rhs));
    }
    Ok(worst)
}

/// Membership flags for the operator classes X, Y and Z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassFlags {
    pub in_x: bool,
    pub in_y: bool,
    pub in_z: bool,
}

/// Classifies `op` relative to the left multiplication induced by `basis`.
///
/// * X: the domain is invariant under `L_i, L_j, L_k` and `iA, jA, kA` are
///   anti-symmetric.
/// * Y: X plus symmetric and densely defined.
/// * Z: isometric with `ran(I - U)` dense, i.e. of full quaternionic rank.
pub fn classify(op: &Operator, basis: &HilbertBasis, tol: f64) -> Result<ClassFlags> {
    check_basis(op.dim(), basis)?;
    let square = match op {
        Operator::Dense(m) => m.is_square(),
        Operator::Partial(_) => true,
    };
    if !square {
        return Ok(ClassFlags { in_x: false, in_y: false, in_z: false });
    }
    let in_x = domain_is_unit_invariant(op, basis)? && unit_multiple_antisymmetry_defect(op, basis)? <= tol;
    let in_y = in_x && op.densely_defined() && is_symmetric(op, tol);
    let in_z = is_isometric(op, tol) && i_minus_u_rank(op)? == dense_range_requirement(op);
    Ok(ClassFlags { in_x, in_y, in_z })
}

/// Rank of `ran(I - U)`, spanned by `F - X` on the domain frame.
pub fn i_minus_u_rank(op: &Operator) -> Result<usize> {
    let action = op.action();
    let scale = 1f64.max(spectral_norm(&action));
    rank_h_scaled(&op.domain_frame().sub(&action)?, scale, RANK_TOL)
}

/// Rank that `ran(I - U)` must reach to count as dense: `n` for dense
/// operators, the domain dimension for flagged stand-ins.
pub fn dense_range_requirement(op: &Operator) -> usize {
    match op {
        Operator::Partial(p) if p.dense_stand_in => p.domain_dim(),
        _ => op.dim(),
    }
}

/// `|U phi| = |phi|` on the domain.
///
/// Dense: `max|U^dagger U - I| <= tol`; partial: the action columns are
/// orthonormal within `tol`.
pub fn is_isometric(op: &Operator, tol: f64) -> bool {
    isometry_defect(op) <= tol
}

pub fn isometry_defect(op: &Operator) -> f64 {
    match op {
        Operator::Dense(m) => match m.adjoint().mul(m) {
            Ok(g) => g.max_abs_diff(&QMatrix::identity(m.cols())),
            Err(_) => f64::INFINITY,
        },
        Operator::Partial(p) => orthonormality_defect(&p.action.columns()),
    }
}

/// Unitary: defined everywhere with `U U^dagger = U^dagger U = I`.
pub fn is_unitary(op: &Operator, tol: f64) -> bool {
    let Some(u) = op.to_dense() else { return false };
    if !u.is_square() {
        return false;
    }
    let id = QMatrix::identity(u.rows());
    let a = u.adjoint().mul(&u).map(|g| g.max_abs_diff(&id)).unwrap_or(f64::INFINITY);
    let b = u.mul(&u.adjoint()).map(|g| g.max_abs_diff(&id)).unwrap_or(f64::INFINITY);
    a <= tol && b <= tol
}

/// Self-adjoint: defined everywhere and equal to its adjoint.
pub fn is_self_adjoint(op: &Operator, tol: f64) -> bool {
    op.to_dense().is_some_and(|m| m.is_square() && m.hermitian_defect() <= tol)
}

/// `A ⊆ B`: `D(A) ⊆ D(B)` and `B` agrees with `A` on `D(A)`.
pub fn is_extension(a: &Operator, b: &Operator, tol: f64) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(QError::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    let fa = a.domain_frame();
    let fb = b.domain_frame();
    if rank_h(&fb.hstack(&fa)?, RANK_TOL)? != fb.cols() {
        return Ok(false);
    }
    let images = match b {
        Operator::Dense(m) => m.mul(&fa)?,
        Operator::Partial(p) => p.apply_matrix(&fa)?,
    };
    Ok(images.max_abs_diff(&a.action()) <= tol * (1.0 + a.action().max_abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(rows: &[&[f64]]) -> QMatrix {
        QMatrix::from_real_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
    }

    fn a_theta(t: f64) -> QMatrix {
        real(&[&[t.cos(), t.sin()], &[t.sin(), -t.cos()]])
    }

    #[test]
    fn adjoint_examples() {
        let m = real(&[&[1.0, 2.0], &[3.0, 4.0]]);
        assert_eq!(adjoint(&m), m.transpose());
        let i = QMatrix::from_diagonal(&[Quaternion::I]);
        assert_eq!(adjoint(&i), QMatrix::from_diagonal(&[-Quaternion::I]));
    }

    #[test]
    fn symmetry_examples() {
        assert!(is_symmetric(&a_theta(0.4).into(), PREDICATE_TOL));
        assert!(!is_symmetric(&QMatrix::from_diagonal(&[Quaternion::I]).into(), PREDICATE_TOL));
        assert!(is_symmetric(&real(&[&[2.0, -1.0], &[-1.0, 5.0]]).into(), PREDICATE_TOL));
    }

    #[test]
    fn partial_symmetry_uses_gram_certificate() {
        let s = 1.0 / 2f64.sqrt();
        let v = QVector::new(vec![Quaternion::real(s), Quaternion::real(s)]);
        let p = PartialOperator::restrict(&real(&[&[1.0, 0.0], &[0.0, 2.0]]), std::slice::from_ref(&v)).unwrap();
        assert!(is_symmetric(&p.clone().into(), PREDICATE_TOL));
        // Same domain, action j * image: quadratic form is imaginary.
        let twisted = PartialOperator::new(p.domain_frame().clone(), p.action().left_scale_entries(Quaternion::J)).unwrap();
        assert!(!is_symmetric(&twisted.into(), PREDICATE_TOL));
    }

    #[test]
    fn scalar_operator_examples() {
        let b = HilbertBasis::standard(2);
        let a = QMatrix::from_rows(vec![
            vec![Quaternion::new(1.0, 2.0, 0.0, 0.0), Quaternion::K],
            vec![Quaternion::new(0.0, 0.0, 1.0, -1.0), Quaternion::real(3.0)],
        ])
        .unwrap();
        let r = Quaternion::real(-1.5);
        assert!(op_scalar_left(r, &a, &b).unwrap().max_abs_diff(&a.scale(-1.5)) < 1e-15);
        assert!(op_scalar_right(&a, r, &b).unwrap().max_abs_diff(&a.scale(-1.5)) < 1e-15);
        assert_eq!(op_scalar_left(Quaternion::J, &a, &b).unwrap(), a.left_scale_entries(Quaternion::J));
    }

    #[test]
    fn classify_examples() {
        let b = HilbertBasis::standard(2);
        let f = classify(&a_theta(0.9).into(), &b, PREDICATE_TOL).unwrap();
        assert!(f.in_x && f.in_y);
        // A_theta is an involution with eigenvalue +1, so I - A_theta is singular.
        assert!(!f.in_z);
        let d = classify(&real(&[&[1.0, 0.0], &[0.0, -1.0]]).into(), &b, PREDICATE_TOL).unwrap();
        assert!(d.in_y && !d.in_z);
        let i = classify(&QMatrix::from_diagonal(&[Quaternion::I]).into(), &HilbertBasis::standard(1), PREDICATE_TOL)
            .unwrap();
        assert!(!i.in_y);
    }

    #[test]
    fn isometry_examples() {
        assert!(is_isometric(&QMatrix::identity(3).into(), PREDICATE_TOL));
        assert!(is_isometric(&a_theta(1.3).into(), PREDICATE_TOL));
        assert!(!is_isometric(&real(&[&[2.0, 0.0], &[0.0, 1.0]]).into(), PREDICATE_TOL));
        let shift = PartialOperator::new(real(&[&[1.0], &[0.0]]), real(&[&[0.0], &[1.0]])).unwrap();
        assert!(is_isometric(&shift.into(), PREDICATE_TOL));
    }

    #[test]
    fn partial_validation() {
        let bad_frame = PartialOperator::new(real(&[&[2.0], &[0.0]]), real(&[&[0.0], &[1.0]]));
        assert!(matches!(bad_frame, Err(QError::InvalidOperator(_))));
        let bad_shape = PartialOperator::new(real(&[&[1.0], &[0.0]]), real(&[&[0.0, 1.0], &[1.0, 0.0]]));
        assert!(bad_shape.is_err());
    }

    #[test]
    fn extension_order() {
        let a = real(&[&[1.0, 0.0], &[0.0, 2.0]]);
        let p = PartialOperator::restrict(&a, &[QVector::unit(2, 0)]).unwrap();
        assert!(is_extension(&p.clone().into(), &a.clone().into(), 1e-9).unwrap());
        assert!(!is_extension(&a.clone().into(), &p.into(), 1e-9).unwrap());
        let other = PartialOperator::restrict(&a.scale(2.0), &[QVector::unit(2, 0)]).unwrap();
        assert!(!is_extension(&other.into(), &a.into(), 1e-9).unwrap());
    }

    #[test]
    fn inverse_of_partial_shift() {
        let shift = PartialOperator::new(real(&[&[1.0], &[0.0]]), real(&[&[0.0], &[1.0]])).unwrap();
        let inv = shift.inverse().unwrap();
        assert!(inv.apply(&QVector::unit(2, 1)).unwrap().max_abs_diff(&QVector::unit(2, 0)) < 1e-15);
    }
}
