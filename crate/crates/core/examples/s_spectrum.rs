//! Spherical spectra of a few matrices, as (real part, |imaginary part|) pairs.
use qcayley::spectral::s_spectrum;
use qcayley::{gen_remark, random, QMatrix, Quaternion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn show(name: &str, m: &QMatrix) {
    let spheres = s_spectrum(m, 1e-9).unwrap();
    let list: Vec<String> = spheres.iter().map(|s| format!("({:.6}, {:.6})", s.re, s.im_norm)).collect();
    println!("{name:>16}: {}", list.join(" "));
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    show("[[i]]", &QMatrix::from_diagonal(&[Quaternion::I]));
    show("diag(1+j, 2)", &QMatrix::from_diagonal(&[Quaternion::new(1.0, 0.0, 1.0, 0.0), Quaternion::real(2.0)]));
    show("block rotation", &gen_remark(&[0.4, 1.3], &[-1], None).unwrap());
    show("real symmetric", &random::real_symmetric(&mut rng, 4));
    show("random unitary", &random::unitary(&mut rng, 3));
}
