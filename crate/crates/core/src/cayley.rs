//! The quaternionic Cayley transform `U_A = (A - lambda I)(A - conj(lambda) I)^-1`,
//! its inverse `A_U = (lambda I - conj(lambda) U)(I - U)^-1`, the
//! block-diagonal involutions used as a test corpus, and basis invariance.
//!
//! `lambda I` and `conj(lambda) U` use the left scalar multiplication of the
//! chosen basis. The transform is defined for class-Y operators; on a partial
//! operator it is again a partial operator whose domain is
//! `ran(A - conj(lambda) I)`.

use serde::{Deserialize, Serialize};

use crate::embed::{qinv, rank_h, RANK_TOL};
use crate::error::{QError, Result};
use crate::hspace::{inner, left_mul_matrix, validate_permutation, HilbertBasis};
use crate::matrix::QMatrix;
use crate::qop::{
    check_basis, classify, dense_range_requirement, frame_and_coefficients, i_minus_u_rank, is_isometric,
    is_self_adjoint, is_unitary, isometry_defect, Operator, PartialOperator, PREDICATE_TOL,
};
use crate::quat::Quaternion;

/// Cayley parameter `lambda` with strictly positive imaginary components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct LambdaParam(Quaternion);

impl LambdaParam {
    pub fn new(value: Quaternion) -> Result<Self> {
        if value.x > 0.0 && value.y > 0.0 && value.z > 0.0 {
            Ok(LambdaParam(value))
        } else {
            Err(QError::InvalidLambda(value.to_string()))
        }
    }

    /// Accepts any non-real `lambda`. This goes beyond the sign conditions
    /// the transform is stated for and is meant for experiments only.
    pub fn new_relaxed(value: Quaternion) -> Result<Self> {
        if value.imag_norm() > 0.0 {
            Ok(LambdaParam(value))
        } else {
            Err(QError::InvalidLambda(format!("{value} is real")))
        }
    }

    pub fn value(&self) -> Quaternion {
        self.0
    }

    pub fn conj(&self) -> Quaternion {
        self.0.conj()
    }
}

/// `lambda = i + j + k`.
impl Default for LambdaParam {
    fn default() -> Self {
        LambdaParam(Quaternion::new(0.0, 1.0, 1.0, 1.0))
    }
}

impl<'de> Deserialize<'de> for LambdaParam {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        LambdaParam::new(Quaternion::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// A class-Y operator together with its Cayley transform.
#[derive(Debug, Clone, PartialEq)]
pub struct CayleyPair {
    pub source: Operator,
    pub transform: Operator,
    pub lambda: LambdaParam,
    pub basis: HilbertBasis,
}

/// Numerical residuals of the defining identities of a Cayley pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CayleyResiduals {
    /// `max |<U a|U b> - <a|b>|` over the domain frame of `U`.
    pub isometry: f64,
    /// `max |U (A - conj(lambda)) phi - (A - lambda) phi|` over the domain frame of `A`.
    pub defining_identity: f64,
    /// `ran(I - U) = D(A)` as a rank test.
    pub range_of_i_minus_u_is_domain: bool,
    /// Entrywise distance of the inverse transform of `U` from `A`.
    pub round_trip: f64,
}

impl CayleyPair {
    pub fn residuals(&self) -> Result<CayleyResiduals> {
        let lam = self.lambda;
        let minus_conj = self.source.shifted(lam.conj(), &self.basis)?;
        let minus_lam = self.source.shifted(lam.value(), &self.basis)?;
        let mapped = apply_to_columns(&self.transform, &minus_conj)?;
        let defining_identity = mapped.max_abs_diff(&minus_lam);
        let i_minus_u = self.transform.domain_frame().sub(&self.transform.action())?;
        let range_of_i_minus_u_is_domain = same_span(&i_minus_u, &self.source.domain_frame())?;
        let round_trip = match inverse_cayley(&self.transform, &lam, &self.basis) {
            Ok(inv) => operator_distance(&inv.operator, &self.source)?,
            Err(_) => f64::INFINITY,
        };
        Ok(CayleyResiduals {
            isometry: isometry_defect(&self.transform),
            defining_identity,
            range_of_i_minus_u_is_domain,
            round_trip,
        })
    }
}

/// Applies `op` to every column of `m`; the columns must lie in its domain.
pub fn apply_to_columns(op: &Operator, m: &QMatrix) -> Result<QMatrix> {
    match op {
        Operator::Dense(a) => a.mul(m),
        Operator::Partial(p) => p.apply_matrix(m),
    }
}

/// `span(cols(a)) = span(cols(b))`, tested as
/// `rank [a b] = rank a = rank b`.
pub fn same_span(a: &QMatrix, b: &QMatrix) -> Result<bool> {
    let ra = rank_h(a, RANK_TOL)?;
    let rb = rank_h(b, RANK_TOL)?;
    let rab = rank_h(&a.hstack(b)?, RANK_TOL)?;
    Ok(ra == rb && rb == rab)
}

/// Distance between two operators: for dense ones the entrywise maximum; for
/// partial ones the distance of `a`'s domain frame from `D(b)` combined with
/// the disagreement of the actions on `D(a)`.
pub fn operator_distance(a: &Operator, b: &Operator) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(QError::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    if let (Some(x), Some(y)) = (a.as_dense(), b.as_dense()) {
        return Ok(x.max_abs_diff(y));
    }
    let fa = a.domain_frame();
    let fb = b.domain_frame();
    if fa.cols() != fb.cols() {
        return Ok(f64::INFINITY);
    }
    // Project D(a) onto D(b) and compare the images there.
    let coords = fb.adjoint().mul(&fa)?;
    let projected = fb.mul(&coords)?;
    let domain_gap = projected.max_abs_diff(&fa);
    let b_on_a = b.action().mul(&coords)?;
    Ok(domain_gap.max(b_on_a.max_abs_diff(&a.action())))
}

/// Cayley transform of a class-Y operator.
pub fn cayley(op: &Operator, lambda: &LambdaParam, basis: &HilbertBasis) -> Result<CayleyPair> {
    if !classify(op, basis, PREDICATE_TOL)?.in_y {
        return Err(QError::NotInClassY("symmetric, densely defined, with iA, jA, kA anti-symmetric".into()));
    }
    let transform = cayley_unchecked(op, lambda, basis)?;
    Ok(CayleyPair { source: op.clone(), transform, lambda: *lambda, basis: basis.clone() })
}

/// The transform formula without the class-Y precondition.
pub fn cayley_unchecked(op: &Operator, lambda: &LambdaParam, basis: &HilbertBasis) -> Result<Operator> {
    check_basis(op.dim(), basis)?;
    let minus_conj = op.shifted(lambda.conj(), basis)?;
    let minus_lam = op.shifted(lambda.value(), basis)?;
    let singular = |e: QError| QError::InternalSingular(format!("A - conj(lambda) I: {e}"));
    match op {
        Operator::Dense(_) => {
            let inv = qinv(&minus_conj).map_err(singular)?;
            Ok(Operator::Dense(minus_lam.mul(&inv)?))
        }
        Operator::Partial(p) => {
            // D(U) is spanned by Y = (A - conj(lambda)) F; with Y = G C the
            // transform sends G to (A - lambda) F C^-1.
            let (frame, coeff) = frame_and_coefficients(&minus_conj).map_err(singular)?;
            let coeff_inv = qinv(&coeff).map_err(singular)?;
            let action = minus_lam.mul(&coeff_inv)?;
            Ok(Operator::Partial(PartialOperator::new(frame, action)?.with_dense_stand_in(p.dense_stand_in())))
        }
    }
}

/// Result of the inverse transform.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseCayley {
    pub operator: Operator,
    /// `U` is itself in class Y, the hypothesis under which `A_U` is
    /// guaranteed symmetric with Cayley transform `U`.
    pub symmetric_guaranteed: bool,
}

/// Inverse Cayley transform of an isometry with `ran(I - U)` dense.
pub fn inverse_cayley(op: &Operator, lambda: &LambdaParam, basis: &HilbertBasis) -> Result<InverseCayley> {
    check_basis(op.dim(), basis)?;
    if !is_isometric(op, PREDICATE_TOL) {
        return Err(QError::NotIsometric(isometry_defect(op)));
    }
    let required = dense_range_requirement(op);
    let rank = i_minus_u_rank(op)?;
    if rank < required {
        return Err(QError::RangeNotDense { rank, required });
    }
    let l_lam = left_mul_matrix(lambda.value(), basis);
    let l_conj = left_mul_matrix(lambda.conj(), basis);
    let frame = op.domain_frame();
    let action = op.action();
    let i_minus_u = frame.sub(&action)?;
    let numerator = l_lam.mul(&frame)?.sub(&l_conj.mul(&action)?)?;
    let singular = |e: QError| QError::InternalSingular(format!("I - U: {e}"));
    let operator = match op {
        Operator::Dense(_) => Operator::Dense(numerator.mul(&qinv(&i_minus_u).map_err(singular)?)?),
        Operator::Partial(p) => {
            let (g, coeff) = frame_and_coefficients(&i_minus_u).map_err(singular)?;
            let a = numerator.mul(&qinv(&coeff).map_err(singular)?)?;
            Operator::Partial(PartialOperator::new(g, a)?.with_dense_stand_in(p.dense_stand_in()))
        }
    };
    let symmetric_guaranteed = classify(op, basis, PREDICATE_TOL)?.in_y;
    Ok(InverseCayley { operator, symmetric_guaranteed })
}

/// Block-diagonal real involution built from 2x2 blocks
/// `[[cos t, sin t], [sin t, -cos t]]` and scalar `+-1` blocks.
///
/// Blocks are listed signs first, then thetas; `perm[k]` names the block
/// placed at position `k`.
pub fn gen_remark(thetas: &[f64], signs: &[i8], perm: Option<&[usize]>) -> Result<QMatrix> {
    enum Block {
        Sign(f64),
        Rot(f64),
    }
    let mut blocks: Vec<Block> = Vec::with_capacity(signs.len() + thetas.len());
    for &s in signs {
        match s {
            1 | -1 => blocks.push(Block::Sign(f64::from(s))),
            _ => return Err(QError::InvalidArgument(format!("sign block must be +1 or -1, got {s}"))),
        }
    }
    blocks.extend(thetas.iter().map(|t| Block::Rot(*t)));
    if blocks.is_empty() {
        return Err(QError::InvalidArgument("no blocks given".into()));
    }
    let order: Vec<usize> = match perm {
        Some(p) => {
            validate_permutation(p, blocks.len())?;
            p.to_vec()
        }
        None => (0..blocks.len()).collect(),
    };
    let n: usize = blocks.iter().map(|b| if matches!(b, Block::Sign(_)) { 1 } else { 2 }).sum();
    let mut m = QMatrix::zeros(n, n);
    let mut at = 0;
    for &k in &order {
        match blocks[k] {
            Block::Sign(s) => {
                m[(at, at)] = Quaternion::real(s);
                at += 1;
            }
            Block::Rot(t) => {
                let (s, c) = t.sin_cos();
                m[(at, at)] = Quaternion::real(c);
                m[(at, at + 1)] = Quaternion::real(s);
                m[(at + 1, at)] = Quaternion::real(s);
                m[(at + 1, at + 1)] = Quaternion::real(-c);
                at += 2;
            }
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelfAdjointUnitary {
    pub is_self_adjoint: bool,
    pub transform_is_unitary: bool,
}

/// Evaluates self-adjointness of `A` and unitarity of `U_A` independently.
pub fn self_adjoint_iff_unitary(op: &Operator, lambda: &LambdaParam, basis: &HilbertBasis) -> Result<SelfAdjointUnitary> {
    let pair = cayley(op, lambda, basis)?;
    Ok(SelfAdjointUnitary {
        is_self_adjoint: is_self_adjoint(op, PREDICATE_TOL),
        transform_is_unitary: is_unitary(&pair.transform, PREDICATE_TOL),
    })
}

/// Largest imaginary part among the cross inner products `<phi_k|theta_l>`.
pub fn basis_cross_imag(b1: &HilbertBasis, b2: &HilbertBasis) -> Result<f64> {
    if b1.dim() != b2.dim() {
        return Err(QError::DimensionMismatch { expected: b1.dim(), found: b2.dim() });
    }
    let mut worst: f64 = 0.0;
    for p in b1.columns() {
        for t in b2.columns() {
            worst = worst.max(inner(p, t)?.imag_norm());
        }
    }
    Ok(worst)
}

/// Two bases induce the same left multiplication iff every `<phi_k|theta_l>` is real.
pub fn basis_compatible(b1: &HilbertBasis, b2: &HilbertBasis, tol: f64) -> Result<bool> {
    Ok(basis_cross_imag(b1, b2)? <= tol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceReport {
    pub compatible: bool,
    pub cross_imag: f64,
    /// Distance between the transforms computed in the two bases.
    pub deviation: f64,
    pub u_a: Operator,
    pub v_a: Operator,
}

/// Computes `U_A` with the left multiplication of `b1` and `V_A` with that of
/// `b2` and compares them. No class check is made, so incompatible bases can
/// serve as a negative control.
pub fn cayley_invariance(
    op: &Operator,
    lambda: &LambdaParam,
    b1: &HilbertBasis,
    b2: &HilbertBasis,
    tol: f64,
) -> Result<InvarianceReport> {
    let cross_imag = basis_cross_imag(b1, b2)?;
    let u_a = cayley_unchecked(op, lambda, b1)?;
    let v_a = cayley_unchecked(op, lambda, b2)?;
    let deviation = operator_distance(&u_a, &v_a)?;
    Ok(InvarianceReport { compatible: cross_imag <= tol, cross_imag, deviation, u_a, v_a })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(rows: &[&[f64]]) -> QMatrix {
        QMatrix::from_real_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
    }

    #[test]
    fn lambda_validation() {
        assert!(LambdaParam::new(Quaternion::new(3.0, 1.0, 0.5, 2.0)).is_ok());
        assert!(LambdaParam::new(Quaternion::new(0.0, 1.0, 0.0, 1.0)).is_err());
        assert!(LambdaParam::new(Quaternion::new(0.0, -1.0, 1.0, 1.0)).is_err());
        assert!(LambdaParam::new_relaxed(Quaternion::new(0.0, -1.0, 0.0, 0.0)).is_ok());
        assert!(LambdaParam::new_relaxed(Quaternion::real(2.0)).is_err());
        assert_eq!(LambdaParam::default().value(), Quaternion::new(0.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn scalar_zero_maps_to_minus_one() {
        let b = HilbertBasis::standard(1);
        let pair = cayley(&QMatrix::zeros(1, 1).into(), &LambdaParam::default(), &b).unwrap();
        let u = pair.transform.as_dense().unwrap();
        assert!(u.max_abs_diff(&QMatrix::from_diagonal(&[Quaternion::real(-1.0)])) < 1e-15);
        let back = inverse_cayley(&pair.transform, &LambdaParam::default(), &b).unwrap();
        assert!(back.operator.as_dense().unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn diagonal_maps_entrywise() {
        let lam = LambdaParam::default().value();
        let a = real(&[&[1.0, 0.0], &[0.0, -1.0]]);
        let pair = cayley(&a.into(), &LambdaParam::default(), &HilbertBasis::standard(2)).unwrap();
        let expected = QMatrix::from_diagonal(&[
            -(Quaternion::ONE + lam).scale(0.5),
            (lam - Quaternion::ONE).scale(0.5),
        ]);
        assert!(pair.transform.as_dense().unwrap().max_abs_diff(&expected) < 1e-14);
        assert!((0..2).all(|k| (expected[(k, k)].norm() - 1.0).abs() < 1e-15));
    }

    #[test]
    fn identity_is_rejected_by_inverse() {
        let err = inverse_cayley(&QMatrix::identity(3).into(), &LambdaParam::default(), &HilbertBasis::standard(3));
        assert!(matches!(err, Err(QError::RangeNotDense { rank: 0, required: 3 })));
        let not_iso = inverse_cayley(&QMatrix::identity(2).scale(2.0).into(), &LambdaParam::default(), &HilbertBasis::standard(2));
        assert!(matches!(not_iso, Err(QError::NotIsometric(_))));
    }

    #[test]
    fn non_class_y_is_rejected() {
        let i = QMatrix::from_diagonal(&[Quaternion::I]);
        let err = cayley(&i.into(), &LambdaParam::default(), &HilbertBasis::standard(1));
        assert!(matches!(err, Err(QError::NotInClassY(_))));
    }

    #[test]
    fn remark_examples() {
        let m = gen_remark(&[std::f64::consts::FRAC_PI_2], &[], None).unwrap();
        assert!(m.max_abs_diff(&real(&[&[0.0, 1.0], &[1.0, 0.0]])) < 1e-15);
        assert_eq!(gen_remark(&[0.0], &[], None).unwrap(), real(&[&[1.0, 0.0], &[0.0, -1.0]]));
        let m = gen_remark(&[0.4, 2.0], &[-1], Some(&[1, 0, 2])).unwrap();
        assert_eq!(m.rows(), 5);
        assert_eq!(m[(2, 2)], Quaternion::real(-1.0));
        assert!(m.mul(&m).unwrap().max_abs_diff(&QMatrix::identity(5)) < 1e-12);
        assert!(m.max_abs_diff(&m.transpose()) < 1e-12);
        assert!(gen_remark(&[], &[], None).is_err());
        assert!(gen_remark(&[0.1], &[2], None).is_err());
        assert!(gen_remark(&[0.1, 0.2], &[], Some(&[0, 0])).is_err());
    }

    #[test]
    fn self_adjoint_unitary_examples() {
        let b = HilbertBasis::standard(2);
        let lam = LambdaParam::default();
        let s = self_adjoint_iff_unitary(&real(&[&[2.0, 1.0], &[1.0, 0.0]]).into(), &lam, &b).unwrap();
        assert!(s.is_self_adjoint && s.transform_is_unitary);
        let z = self_adjoint_iff_unitary(&QMatrix::zeros(1, 1).into(), &lam, &HilbertBasis::standard(1)).unwrap();
        assert!(z.is_self_adjoint && z.transform_is_unitary);
        let r = 1.0 / 2f64.sqrt();
        let v = crate::hspace::QVector::new(vec![Quaternion::real(r), Quaternion::real(r)]);
        let p = PartialOperator::restrict(&real(&[&[1.0, 0.0], &[0.0, 2.0]]), &[v]).unwrap().with_dense_stand_in(true);
        let s = self_adjoint_iff_unitary(&p.into(), &lam, &b).unwrap();
        assert!(!s.is_self_adjoint && !s.transform_is_unitary);
    }

    #[test]
    fn permuted_standard_basis_is_compatible() {
        let b1 = HilbertBasis::standard(3);
        let b2 = b1.permuted(&[2, 0, 1]).unwrap();
        assert!(basis_compatible(&b1, &b2, 1e-12).unwrap());
        let a = real(&[&[1.0, 2.0, 0.0], &[2.0, -1.0, 0.5], &[0.0, 0.5, 3.0]]);
        let r = cayley_invariance(&a.into(), &LambdaParam::default(), &b1, &b2, 1e-12).unwrap();
        assert!(r.compatible && r.deviation <= 1e-10);
    }

    #[test]
    fn j_twisted_basis_is_detected() {
        let b1 = HilbertBasis::standard(2);
        let mut cols = b1.columns().to_vec();
        cols[0] = cols[0].right_mul(Quaternion::J);
        let b2 = HilbertBasis::new(cols).unwrap();
        assert!(!basis_compatible(&b1, &b2, 1e-9).unwrap());
        let a = real(&[&[1.0, 2.0], &[2.0, -1.0]]);
        let r = cayley_invariance(&a.into(), &LambdaParam::default(), &b1, &b2, 1e-9).unwrap();
        assert!(!r.compatible && r.deviation > 0.1);
    }
}
