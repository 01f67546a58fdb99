//! Seeded generators for quaternions, bases and the operator families the
//! property suites sample from.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::cayley::{gen_remark, LambdaParam};
use crate::hspace::{gram_schmidt, HilbertBasis, QVector};
use crate::matrix::QMatrix;
use crate::qop::PartialOperator;
use crate::quat::Quaternion;

pub fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Quaternion with independent standard normal components.
pub fn quaternion<R: Rng + ?Sized>(rng: &mut R) -> Quaternion {
    Quaternion::new(normal(rng), normal(rng), normal(rng), normal(rng))
}

/// Uniformly distributed point of the sphere of imaginary units.
pub fn imaginary_unit<R: Rng + ?Sized>(rng: &mut R) -> Quaternion {
    loop {
        let v = Quaternion::new(0.0, normal(rng), normal(rng), normal(rng));
        let n = v.norm();
        if n > 1e-3 {
            return v / n;
        }
    }
}

/// Quaternion with a nonzero imaginary part bounded away from zero.
pub fn non_real<R: Rng + ?Sized>(rng: &mut R) -> Quaternion {
    let mut q = quaternion(rng);
    while q.imag_norm() < 0.05 {
        q = quaternion(rng);
    }
    q
}

pub fn vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> QVector {
    QVector::new((0..n).map(|_| quaternion(rng)).collect())
}

pub fn matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> QMatrix {
    QMatrix::from_fn(rows, cols, |_, _| quaternion(rng))
}

pub fn real_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> QMatrix {
    QMatrix::from_real_fn(rows, cols, |_, _| normal(rng))
}

pub fn real_symmetric<R: Rng + ?Sized>(rng: &mut R, n: usize) -> QMatrix {
    let g = real_matrix(rng, n, n);
    g.add(&g.transpose()).unwrap().scale(0.5)
}

/// Random quaternionic unitary matrix (Gram-Schmidt of a Gaussian matrix).
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> QMatrix {
    loop {
        let cols: Vec<QVector> = (0..n).map(|_| vector(rng, n)).collect();
        if let Ok(b) = gram_schmidt(&cols) {
            return b.matrix();
        }
    }
}

/// Random real orthogonal matrix.
pub fn real_orthogonal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> QMatrix {
    loop {
        let g = real_matrix(rng, n, n);
        if let Ok(b) = gram_schmidt(&g.columns()) {
            return b.matrix();
        }
    }
}

pub fn basis<R: Rng + ?Sized>(rng: &mut R, n: usize) -> HilbertBasis {
    HilbertBasis::from_unitary(&unitary(rng, n)).expect("unitary columns are orthonormal")
}

/// A valid Cayley parameter: `lambda_0` normal, imaginary parts in `[0.2, 2]`.
pub fn lambda<R: Rng + ?Sized>(rng: &mut R) -> LambdaParam {
    let w = normal(rng);
    let [x, y, z]: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.2..2.0));
    LambdaParam::new(Quaternion::new(w, x, y, z)).expect("positive imaginary parts")
}

/// Dense class-Y operator relative to `basis`: `B S B^dagger` with `S` real symmetric.
pub fn class_y_dense<R: Rng + ?Sized>(rng: &mut R, basis: &HilbertBasis) -> QMatrix {
    let b = basis.matrix();
    let s = real_symmetric(rng, basis.dim());
    b.mul(&s).unwrap().mul(&b.adjoint()).unwrap()
}

/// Partial class-Y stand-in on a `d`-dimensional domain, relative to `basis`.
///
/// In standard coordinates the domain is spanned by real orthonormal vectors
/// `D` and the action is `D M + D_perp N` with `M` real symmetric and `N`
/// real, i.e. the restriction of a real symmetric matrix. Both are then
/// carried into `basis`.
pub fn class_y_partial<R: Rng + ?Sized>(rng: &mut R, basis: &HilbertBasis, d: usize) -> PartialOperator {
    let n = basis.dim();
    assert!(d <= n);
    let q = real_orthogonal(rng, n);
    let dom = q.column_range(0, d);
    let perp = q.column_range(d, n);
    let m = real_symmetric(rng, d);
    let action = dom.mul(&m).unwrap().add(&perp.mul(&real_matrix(rng, n - d, d)).unwrap()).unwrap();
    let b = basis.matrix();
    PartialOperator::new(b.mul(&dom).unwrap(), b.mul(&action).unwrap())
        .expect("orthonormal frame")
        .with_dense_stand_in(true)
}

/// Isometry from a random `d`-dimensional subspace onto another.
pub fn partial_isometry<R: Rng + ?Sized>(rng: &mut R, n: usize, d: usize) -> PartialOperator {
    let f = unitary(rng, n).column_range(0, d);
    let w = unitary(rng, n).column_range(0, d);
    PartialOperator::new(f, w).expect("orthonormal frame")
}

/// Parameters for `gen_remark`.
#[derive(Debug, Clone)]
pub struct RemarkParams {
    pub thetas: Vec<f64>,
    pub signs: Vec<i8>,
    pub perm: Vec<usize>,
}

/// Random parameters for an `n x n` block-diagonal rotation matrix: as many
/// rotation blocks as a coin decides, the rest filled with signs.
pub fn remark_params<R: Rng + ?Sized>(rng: &mut R, n: usize) -> RemarkParams {
    assert!(n >= 1);
    let lo = usize::from(n >= 2);
    let blocks = rng.random_range(lo..=n / 2);
    let thetas: Vec<f64> = (0..blocks).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
    let signs: Vec<i8> = (0..n - 2 * blocks).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect();
    let mut perm: Vec<usize> = (0..blocks + signs.len()).collect();
    perm.shuffle(rng);
    RemarkParams { thetas, signs, perm }
}

pub fn remark_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> QMatrix {
    let p = remark_params(rng, n);
    gen_remark(&p.thetas, &p.signs, Some(&p.perm)).expect("valid block parameters")
}

/// Block-rotation matrix carried into `basis`: `B M B^dagger`.
pub fn remark_in_basis<R: Rng + ?Sized>(rng: &mut R, basis: &HilbertBasis) -> QMatrix {
    let b = basis.matrix();
    let m = remark_matrix(rng, basis.dim());
    b.mul(&m).unwrap().mul(&b.adjoint()).unwrap()
}
