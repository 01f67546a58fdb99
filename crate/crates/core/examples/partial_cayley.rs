//! Cayley transform of a symmetric operator defined on a proper subspace.
use qcayley::spectral::iso_indices;
use qcayley::{cayley, inverse_cayley, random, LambdaParam, Operator};
use qcayley::cayley::operator_distance;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let (n, d) = (5, 3);
    let b = random::basis(&mut rng, n);
    let a: Operator = random::class_y_partial(&mut rng, &b, d).into();
    let lam = LambdaParam::default();
    println!("dim D(A) = {} in H^{n}", a.domain_dim());

    let pair = cayley(&a, &lam, &b).unwrap();
    let (di, de) = iso_indices(&pair.transform).unwrap();
    println!("U is isometric on {} dims, d^i = {di}, d^e = {de}", pair.transform.domain_dim());
    println!("residuals: {:?}", pair.residuals().unwrap());

    let back = inverse_cayley(&pair.transform, &lam, &b).unwrap();
    println!("|A_U - A| = {:.2e}", operator_distance(&back.operator, &a).unwrap());
}
