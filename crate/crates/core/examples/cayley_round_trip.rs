//! Cayley transform of a symmetric operator and back, in a random basis.
use qcayley::cayley::operator_distance;
use qcayley::qop::classify;
use qcayley::{cayley, inverse_cayley, random, LambdaParam, Operator, Quaternion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = 4;
    let b = random::basis(&mut rng, n);
    let a: Operator = random::class_y_dense(&mut rng, &b).into();
    let lam = LambdaParam::new(Quaternion::new(0.3, 1.0, 0.5, 2.0)).unwrap();
    println!("A flags: {:?}", classify(&a, &b, 1e-9).unwrap());

    let pair = cayley(&a, &lam, &b).unwrap();
    let r = pair.residuals().unwrap();
    println!("isometry {:.2e}, defining identity {:.2e}, ran(I-U) = D(A): {}", r.isometry, r.defining_identity, r.range_of_i_minus_u_is_domain);
    println!("U flags: {:?}", classify(&pair.transform, &b, 1e-9).unwrap());

    let back = inverse_cayley(&pair.transform, &lam, &b).unwrap();
    println!("|A_U - A| = {:.2e}, symmetric guaranteed: {}", operator_distance(&back.operator, &a).unwrap(), back.symmetric_guaranteed);
}
