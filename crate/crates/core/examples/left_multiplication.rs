//! Left scalar multiplication depends on the chosen basis; right multiplication does not.
use qcayley::hspace::{inner, left_mul, left_mul_matrix};
use qcayley::{random, HilbertBasis, QMatrix, Quaternion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 3;
    let std = HilbertBasis::standard(n);
    let other = random::basis(&mut rng, n);
    let phi = random::vector(&mut rng, n);
    let q = Quaternion::J;

    let a = left_mul(q, &phi, &std).unwrap();
    let b = left_mul(q, &phi, &other).unwrap();
    println!("|j.phi (standard) - j.phi (random basis)| = {:.3e}", a.max_abs_diff(&b));

    // L_q is norm preserving for unit q, and L_q + L_conj(q) = 2 Re(q) I
    let lq = left_mul_matrix(Quaternion::new(0.5, 0.5, 0.5, 0.5), &other);
    println!("|<L phi, L phi> - <phi, phi>| = {:.3e}", {
        let v = lq.apply(&phi).unwrap();
        (inner(&v, &v).unwrap() - inner(&phi, &phi).unwrap()).norm()
    });
    let p = Quaternion::new(2.0, -1.0, 0.3, 4.0);
    let sum = left_mul_matrix(p, &other).add(&left_mul_matrix(p.conj(), &other)).unwrap();
    println!("|L_p + L_conj(p) - 2 Re(p) I| = {:.3e}", sum.max_abs_diff(&QMatrix::identity(n).scale(4.0)));
}
