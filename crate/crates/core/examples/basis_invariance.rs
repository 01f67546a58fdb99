//! The Cayley transform survives a real orthogonal change of basis but not a twist by j.
use qcayley::cayley::{basis_cross_imag, cayley_invariance};
use qcayley::{random, HilbertBasis, LambdaParam, Operator, QMatrix, Quaternion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let n = 3;
    let b1 = random::basis(&mut rng, n);
    let a: Operator = random::class_y_dense(&mut rng, &b1).into();
    let lam = LambdaParam::default();

    let real = HilbertBasis::from_unitary(&b1.matrix().mul(&random::real_orthogonal(&mut rng, n)).unwrap()).unwrap();
    let twist = QMatrix::from_diagonal(&[Quaternion::new(0.6, 0.0, 0.8, 0.0), Quaternion::ONE, Quaternion::ONE]);
    let twisted = HilbertBasis::from_unitary(&b1.matrix().mul(&twist).unwrap()).unwrap();

    for (name, b2) in [("real orthogonal", &real), ("twisted", &twisted)] {
        let r = cayley_invariance(&a, &lam, &b1, b2, 1e-10).unwrap();
        println!(
            "{name:>15}: cross imag {:.2e}, compatible {}, |U_A - V_A| = {:.2e}",
            basis_cross_imag(&b1, b2).unwrap(),
            r.compatible,
            r.deviation
        );
    }
}
