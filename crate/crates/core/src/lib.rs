//! Exact and floating-point multiview geometry for pinhole cameras.

pub mod calibration;
pub mod cones;
pub mod epipolar;
pub mod error;
pub mod matrix;
pub mod multipoly;
pub mod multiview;
pub mod poly;
pub mod projective;
pub mod scene;
pub mod scalar;

pub use error::{GeomError, Result};
pub use matrix::Mat;
pub use scalar::{ExactField, Field, Gaussian, Rational};
