//! Shared numerical kernels.

pub mod laplace;
pub mod quadrature;
pub mod special;
pub mod sum;
pub mod tridiag;

pub use laplace::{laplace_invert, laplace_invert_scaled, Inversion};
pub use quadrature::{integrate, Domain, Quadrature, QuadratureResult};
pub use sum::{compensated_sum, CompensatedSum};
pub use tridiag::{tridiag_eigen, tridiag_eigen_rows, SymTridiagonal, TridiagEigen};
