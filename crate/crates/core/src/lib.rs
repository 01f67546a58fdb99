//! Quaternionic linear algebra on `H^n`: basis-induced left multiplication,
//! S-spectrum, regular points and defect numbers, and the quaternionic
//! Cayley transform of symmetric operators.
//!
//! Matrices act on column vectors from the left and scalars act on vectors
//! from the right. Dense decompositions go through the complex adjoint
//! representation in [`embed`].

pub mod cayley;
pub mod cli;
pub mod embed;
pub mod error;
pub mod hspace;
pub mod io;
pub mod matrix;
pub mod qop;
pub mod quat;
pub mod random;
pub mod spectral;
pub mod verify;

pub use cayley::{cayley, gen_remark, inverse_cayley, CayleyPair, LambdaParam};
pub use error::{QError, Result};
pub use hspace::{HilbertBasis, QVector};
pub use matrix::QMatrix;
pub use qop::{Operator, PartialOperator};
pub use quat::Quaternion;
pub use spectral::SpectralSphere;
