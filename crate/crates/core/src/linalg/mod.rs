//! Small dense kernels: products, top eigenvector of a symmetric PSD matrix,
//! and minimum-norm least squares.

mod matrix;
mod power;
mod qr;

pub use matrix::{dot, norm2, DenseMatrix};
pub use power::{top_singular_vector, PowerIteration};
pub use qr::{least_squares, least_squares_on_columns};
