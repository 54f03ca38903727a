//! Small numerical building blocks: compensated summation, adaptive
//! Gauss-Kronrod quadrature and bracketing root refinement.

pub mod kahan;
pub mod quadrature;
pub mod roots;

pub use kahan::{KahanSum, KahanSumComplex};
pub use quadrature::{integrate_complex, QuadratureSpec};
pub use roots::bisect;
