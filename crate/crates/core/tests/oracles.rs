//! Closed-form values worked out by hand, frozen against the public API.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use num_complex::Complex64;
use qcayley::cayley::{basis_compatible, cayley_invariance, self_adjoint_iff_unitary};
use qcayley::embed::{chi, qinv, qsolve, rank_h, right_eigen_spheres, RANK_TOL};
use qcayley::hspace::{expand, gram_schmidt, inner, left_mul, polarization};
use qcayley::qop::{adjoint, classify, is_isometric, is_symmetric, op_scalar_left};
use qcayley::random;
use qcayley::spectral::{deficiency_index, defect_number, iso_indices, pseudo_resolvent, regular_point, s_spectrum};
use qcayley::{
    cayley, gen_remark, inverse_cayley, HilbertBasis, LambdaParam, Operator, PartialOperator, QError, QMatrix, QVector,
    Quaternion, SpectralSphere,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const I: Quaternion = Quaternion::I;
const J: Quaternion = Quaternion::J;
const K: Quaternion = Quaternion::K;

fn r(x: f64) -> Quaternion {
    Quaternion::real(x)
}

fn e(n: usize, k: usize) -> QVector {
    QVector::unit(n, k)
}

fn col(n: usize, k: usize) -> QMatrix {
    e(n, k).as_column()
}

fn std_basis(n: usize) -> HilbertBasis {
    HilbertBasis::standard(n)
}

fn a_theta(t: f64) -> QMatrix {
    QMatrix::from_real_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => t.cos(),
        (1, 1) => -t.cos(),
        _ => t.sin(),
    })
}

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(2024)
}

/// The partial isometry `e1 -> e2` on `H^2`.
fn shift_e1_e2() -> Operator {
    PartialOperator::new(col(2, 0), col(2, 1)).unwrap().into()
}

#[test]
fn quaternion_products_and_inverses() {
    assert_eq!(I * J, K);
    assert_eq!(J * I, -K);
    let q = Quaternion::new(0.3, -1.2, 2.5, 0.7);
    assert_eq!(q * Quaternion::ONE, q);
    assert_eq!((I + J + K) * (I + J + K), r(-3.0));
    assert_eq!(Quaternion::ONE.inv().unwrap(), Quaternion::ONE);
    assert_eq!(I.inv().unwrap(), -I);
    assert!(matches!(Quaternion::ZERO.inv(), Err(QError::ZeroQuaternion(_))));
    assert!(I.in_sphere_s(1e-12));
    assert!(((I + J + K) / 3f64.sqrt()).in_sphere_s(1e-12));
    assert!(!Quaternion::ONE.in_sphere_s(1e-12));
}

#[test]
fn inner_products() {
    assert_eq!(inner(&e(2, 0), &e(2, 0)).unwrap(), Quaternion::ONE);
    assert_eq!(inner(&e(2, 0).right_mul(J), &e(2, 0)).unwrap(), -J);
    let phi = QVector::new(vec![Quaternion::ONE, I]);
    let psi = QVector::new(vec![J, Quaternion::ZERO]);
    assert_eq!(inner(&phi, &psi).unwrap(), J);
    assert!((polarization(&e(3, 0), &e(3, 0)).unwrap() - Quaternion::ONE).norm() < 1e-15);
    let psi = random::vector(&mut rng(), 3);
    assert!(polarization(&QVector::zeros(3), &psi).unwrap().norm() < 1e-15);
}

#[test]
fn expansions_and_orthonormalization() {
    let c = expand(&e(4, 1), &std_basis(4)).unwrap();
    assert_eq!(c, vec![Quaternion::ZERO, Quaternion::ONE, Quaternion::ZERO, Quaternion::ZERO]);
    let phi = random::vector(&mut rng(), 3);
    assert_eq!(expand(&phi, &std_basis(3)).unwrap(), phi.components().to_vec());

    let b = gram_schmidt(&[e(2, 0), e(2, 1)]).unwrap();
    assert_eq!(b.columns(), std_basis(2).columns());
    let v1 = QVector::new(vec![r(1.0), r(1.0)]);
    let v2 = QVector::new(vec![r(1.0), r(-1.0)]);
    let b = gram_schmidt(&[v1.clone(), v2.clone()]).unwrap();
    assert!(b.columns()[0].max_abs_diff(&v1.scale(FRAC_1_SQRT_2)) < 1e-15);
    assert!(b.columns()[1].max_abs_diff(&v2.scale(FRAC_1_SQRT_2)) < 1e-15);
    assert!(matches!(gram_schmidt(&[e(2, 0), e(2, 0).right_mul(K)]), Err(QError::RankDeficient { .. })));
}

#[test]
fn left_multiplication_in_the_standard_basis() {
    let phi = QVector::new(vec![Quaternion::new(1.0, 2.0, -0.5, 0.25), Quaternion::new(-3.0, 0.0, 1.0, 4.0)]);
    let got = left_mul(J, &phi, &std_basis(2)).unwrap();
    let expected = QVector::new(phi.components().iter().map(|p| J * *p).collect());
    assert!(got.max_abs_diff(&expected) < 1e-15);
    let got = left_mul(r(2.5), &phi, &random::basis(&mut rng(), 2)).unwrap();
    assert!(got.max_abs_diff(&phi.scale(2.5)) < 1e-14);
}

#[test]
fn adjoints_and_symmetry() {
    let a = QMatrix::from_real_fn(2, 3, |i, j| (i * 3 + j) as f64);
    assert_eq!(adjoint(&a), a.transpose());
    let ii = QMatrix::from_diagonal(&[I]);
    assert_eq!(adjoint(&ii), QMatrix::from_diagonal(&[-I]));
    assert!(is_symmetric(&a_theta(0.4).into(), 1e-9));
    assert!(!is_symmetric(&ii.into(), 1e-9));
    assert!(is_symmetric(&random::real_symmetric(&mut rng(), 4).into(), 1e-9));
}

#[test]
fn scalar_multiples_of_operators() {
    let a = random::matrix(&mut rng(), 3, 3);
    let b = random::basis(&mut rng(), 3);
    assert!(op_scalar_left(r(-1.5), &a, &b).unwrap().max_abs_diff(&a.scale(-1.5)) < 1e-13);
    let ja = op_scalar_left(J, &a, &std_basis(3)).unwrap();
    assert!(ja.max_abs_diff(&a.map(|x| J * x)) < 1e-15);
}

#[test]
fn class_membership() {
    let b = std_basis(2);
    let f = classify(&a_theta(1.1).into(), &b, 1e-9).unwrap();
    assert!(f.in_x && f.in_y);
    // A_theta fixes (cos(t/2), sin(t/2)), so ran(I - A_theta) is a line.
    assert!(!f.in_z);
    let f = classify(&QMatrix::from_diagonal(&[r(1.0), r(-1.0)]).into(), &b, 1e-9).unwrap();
    assert!(f.in_y && !f.in_z);
    let f = classify(&QMatrix::from_diagonal(&[I]).into(), &std_basis(1), 1e-9).unwrap();
    assert!(!f.in_y);
    let f = classify(&QMatrix::from_diagonal(&[r(-1.0), r(-1.0)]).into(), &b, 1e-9).unwrap();
    assert!(f.in_y && f.in_z);
}

#[test]
fn isometries() {
    assert!(is_isometric(&QMatrix::identity(3).into(), 1e-12));
    assert!(is_isometric(&a_theta(2.2).into(), 1e-12));
    assert!(!is_isometric(&QMatrix::from_diagonal(&[r(2.0), r(1.0)]).into(), 1e-9));
}

#[test]
fn complex_embedding() {
    let c = chi(&QMatrix::from_diagonal(&[J])).0;
    let expected = [[0.0, 1.0], [-1.0, 0.0]];
    for (i, row) in expected.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            assert_eq!(c[(i, j)], Complex64::new(*v, 0.0));
        }
    }
    let c = chi(&QMatrix::identity(3)).0;
    assert_eq!(c, nalgebra::DMatrix::identity(6, 6));
}

#[test]
fn ranks_and_solves() {
    assert_eq!(rank_h(&QMatrix::zeros(3, 2), RANK_TOL).unwrap(), 0);
    assert_eq!(rank_h(&QMatrix::from_diagonal(&[r(1.0), r(0.0)]), RANK_TOL).unwrap(), 1);
    let m = QMatrix::from_rows(vec![vec![Quaternion::ONE, I], vec![J, K]]).unwrap();
    assert_eq!(rank_h(&m, RANK_TOL).unwrap(), 2);
    let rhs = random::matrix(&mut rng(), 2, 3);
    assert!(qsolve(&QMatrix::identity(2), &rhs).unwrap().max_abs_diff(&rhs) < 1e-15);
    let inv = qinv(&QMatrix::from_diagonal(&[I, J])).unwrap();
    assert!(inv.max_abs_diff(&QMatrix::from_diagonal(&[-I, -J])) < 1e-15);
    assert!(matches!(qinv(&QMatrix::from_diagonal(&[r(1.0), r(0.0)])), Err(QError::Singular { .. })));
}

#[test]
fn spectral_spheres() {
    assert_eq!(right_eigen_spheres(&QMatrix::identity(3), 1e-9), vec![SpectralSphere::new(1.0, 0.0)]);
    let s = s_spectrum(&QMatrix::from_diagonal(&[I]), 1e-9).unwrap();
    assert_eq!(s.len(), 1);
    assert!(s[0].distance(&SpectralSphere::new(0.0, 1.0)) < 1e-14);
    let s = s_spectrum(&a_theta(0.9), 1e-9).unwrap();
    assert_eq!(s.len(), 2);
    assert!(s[0].distance(&SpectralSphere::new(-1.0, 0.0)) < 1e-14);
    assert!(s[1].distance(&SpectralSphere::new(1.0, 0.0)) < 1e-14);
}

#[test]
fn pseudo_resolvents() {
    let q = Quaternion::new(0.5, -1.0, 2.0, 0.3);
    let got = pseudo_resolvent(&QMatrix::identity(3), q).unwrap();
    let expected = QMatrix::identity(3).scale(1.0 - 2.0 * q.re() + q.norm_sqr());
    assert!(got.max_abs_diff(&expected) < 1e-14);
    let a = random::matrix(&mut rng(), 3, 3);
    assert!(pseudo_resolvent(&a, Quaternion::ZERO).unwrap().max_abs_diff(&a.mul(&a).unwrap()) < 1e-14);
}

#[test]
fn regular_points_and_defects() {
    let c = regular_point(&QMatrix::identity(2).into(), Quaternion::ZERO, &std_basis(2)).unwrap();
    assert!((c.c_q - 1.0).abs() < 1e-14 && c.is_regular);

    let mut g = rng();
    let b = random::basis(&mut g, 4);
    let a: Operator = random::class_y_dense(&mut g, &b).into();
    let ijk = I + J + K;
    let c = regular_point(&a, ijk, &b).unwrap();
    assert!(c.c_q >= 3f64.sqrt() - 1e-9);
    assert_eq!(defect_number(&a, ijk, &b).unwrap().d, 0);

    let d23: Operator = QMatrix::from_diagonal(&[r(2.0), r(3.0)]).into();
    let c = regular_point(&d23, r(2.0), &std_basis(2)).unwrap();
    assert!(c.c_q < 1e-15 && !c.is_regular);
    assert_eq!(defect_number(&d23, r(2.0), &std_basis(2)).unwrap().d, 1);

    assert_eq!(defect_number(&shift_e1_e2(), Quaternion::ZERO, &std_basis(2)).unwrap().d, 1);
}

#[test]
fn deficiency_indices() {
    let a: Operator = random::real_symmetric(&mut rng(), 3).into();
    assert_eq!(deficiency_index(&a, &LambdaParam::default(), &std_basis(3)).unwrap(), 0);
    assert_eq!(iso_indices(&shift_e1_e2()).unwrap(), (1, 1));
    assert_eq!(iso_indices(&random::unitary(&mut rng(), 4).into()).unwrap(), (0, 0));
}

#[test]
fn cayley_closed_forms() {
    let lam = LambdaParam::default();
    let l = lam.value();
    let b1 = std_basis(1);
    let u = cayley(&QMatrix::zeros(1, 1).into(), &lam, &b1).unwrap().transform;
    assert!(u.as_dense().unwrap().max_abs_diff(&QMatrix::from_diagonal(&[r(-1.0)])) < 1e-15);

    let d: Operator = QMatrix::from_diagonal(&[r(1.0), r(-1.0)]).into();
    let u = cayley(&d, &lam, &std_basis(2)).unwrap().transform;
    let expected = QMatrix::from_diagonal(&[-(Quaternion::ONE + l) / 2.0, (l - Quaternion::ONE) / 2.0]);
    assert!(u.as_dense().unwrap().max_abs_diff(&expected) < 1e-15);

    let back = inverse_cayley(&QMatrix::from_diagonal(&[r(-1.0)]).into(), &lam, &b1).unwrap().operator;
    assert!(back.as_dense().unwrap().max_abs() < 1e-15);
    assert!(matches!(
        inverse_cayley(&QMatrix::identity(2).into(), &lam, &std_basis(2)),
        Err(QError::RangeNotDense { .. })
    ));
}

#[test]
fn remark_generator() {
    let m = gen_remark(&[FRAC_PI_2], &[], None).unwrap();
    let swap = QMatrix::from_real_fn(2, 2, |i, j| if i != j { 1.0 } else { 0.0 });
    assert!(m.max_abs_diff(&swap) < 1e-15);
    let m = gen_remark(&[0.0], &[], None).unwrap();
    assert_eq!(m, QMatrix::from_diagonal(&[r(1.0), r(-1.0)]));
    let m = gen_remark(&[0.3, 2.0], &[-1, 1], Some(&[3, 0, 2, 1])).unwrap();
    assert_eq!(m.rows(), 6);
    assert!(m.mul(&m).unwrap().max_abs_diff(&QMatrix::identity(6)) < 1e-12);
    assert!(m.max_abs_diff(&m.transpose()) < 1e-12);
}

#[test]
fn self_adjoint_against_unitary() {
    let lam = LambdaParam::default();
    let a: Operator = random::real_symmetric(&mut rng(), 3).into();
    let s = self_adjoint_iff_unitary(&a, &lam, &std_basis(3)).unwrap();
    assert!(s.is_self_adjoint && s.transform_is_unitary);

    let v = QVector::new(vec![r(FRAC_1_SQRT_2), r(FRAC_1_SQRT_2)]);
    let diag12 = QMatrix::from_diagonal(&[r(1.0), r(2.0)]);
    let restricted: Operator = PartialOperator::restrict(&diag12, &[v]).unwrap().with_dense_stand_in(true).into();
    let s = self_adjoint_iff_unitary(&restricted, &lam, &std_basis(2)).unwrap();
    assert!(!s.is_self_adjoint && !s.transform_is_unitary);

    let s = self_adjoint_iff_unitary(&QMatrix::zeros(1, 1).into(), &lam, &std_basis(1)).unwrap();
    assert!(s.is_self_adjoint && s.transform_is_unitary);
}

#[test]
fn two_bases() {
    let lam = LambdaParam::default();
    let mut g = rng();
    let a: Operator = random::real_symmetric(&mut g, 3).into();
    let permuted = std_basis(3).permuted(&[2, 0, 1]).unwrap();
    let rep = cayley_invariance(&a, &lam, &std_basis(3), &permuted, 1e-10).unwrap();
    assert!(rep.compatible && rep.deviation <= 1e-10);

    let mut cols = std_basis(3).columns().to_vec();
    cols[0] = cols[0].right_mul(J);
    let twisted = HilbertBasis::new(cols).unwrap();
    assert!(!basis_compatible(&std_basis(3), &twisted, 1e-10).unwrap());
    let rep = cayley_invariance(&a, &lam, &std_basis(3), &twisted, 1e-10).unwrap();
    assert!(!rep.compatible && rep.deviation > 0.1, "deviation {}", rep.deviation);

    let b1 = random::basis(&mut g, 3);
    let b2 = HilbertBasis::from_unitary(&b1.matrix().mul(&random::real_orthogonal(&mut g, 3)).unwrap()).unwrap();
    let a: Operator = random::class_y_dense(&mut g, &b1).into();
    let rep = cayley_invariance(&a, &lam, &b1, &b2, 1e-10).unwrap();
    assert!(rep.compatible && rep.deviation <= 1e-9);
}
