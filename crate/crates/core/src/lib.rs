//! Small solutions of x1^2 + x2^2 ≡ x3^2 modulo odd prime powers.
//!
//! The crate covers exact arithmetic modulo p^n ([`arith`], [`poly`]), the
//! rational parametrization of the unit circle ([`circle`]), complete
//! exponential sums with a brute-force oracle next to the stationary-phase
//! closed form ([`expsum`]), Gaussian weights and Poisson summation
//! ([`weights`]), and the smoothed and exact solution counts ([`counter`]).

pub mod arith;
pub mod circle;
pub mod counter;
pub mod error;
pub mod expsum;
pub mod modulus;
pub mod poly;
pub mod reduce;
pub mod weights;

pub use error::{Error, Result};
pub use modulus::{PrimePowerModulus, Residue};
pub use num_complex::Complex64;
