//! Hamilton products, conjugates, inverses and the complex 2x2 picture.
use qcayley::embed::chi;
use qcayley::{QMatrix, Quaternion};

fn main() {
    let (i, j, k) = (Quaternion::I, Quaternion::J, Quaternion::K);
    println!("ij = {}, ji = {}, ijk = {}", i * j, j * i, i * j * k);

    let q = Quaternion::new(1.0, 2.0, -1.0, 0.5);
    let inv = q.inv().expect("nonzero");
    println!("q = {q}, |q| = {:.6}", q.norm());
    println!("conj(q) = {}, q q^-1 = {}", q.conj(), q * inv);

    // a 1x1 quaternion matrix becomes a 2x2 complex block
    let m = QMatrix::from_diagonal(&[q]);
    println!("chi(q) = {}", chi(&m).0);
}
