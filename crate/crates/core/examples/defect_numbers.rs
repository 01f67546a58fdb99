//! Regular points and defect numbers for a dense operator and a partial isometry.
use qcayley::spectral::{defect_number, iso_indices};
use qcayley::{random, HilbertBasis, Operator, QMatrix, Quaternion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let a: Operator = QMatrix::from_diagonal(&[Quaternion::real(2.0), Quaternion::real(3.0)]).into();
    let b = HilbertBasis::standard(2);
    for q in [Quaternion::real(2.0), Quaternion::new(2.5, 0.0, 0.0, 1.0), Quaternion::new(0.0, 1.0, 1.0, 1.0)] {
        let r = defect_number(&a, q, &b).unwrap();
        println!("diag(2,3) at {q}: regular = {}, c_q = {:.4}, d = {}", r.regular, r.c_q, r.d);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 5;
    let u: Operator = random::partial_isometry(&mut rng, n, 3).into();
    let (di, de) = iso_indices(&u).unwrap();
    println!("partial isometry on 3 of {n} dims: d^i = {di}, d^e = {de}");
    let b = HilbertBasis::standard(n);
    for mu in [Quaternion::real(0.0), Quaternion::new(0.2, 0.5, -0.1, 0.3), Quaternion::real(3.0)] {
        let r = defect_number(&u, mu, &b).unwrap();
        println!("  at {mu}: |mu| = {:.2}, d = {}", mu.norm(), r.d);
    }
}
