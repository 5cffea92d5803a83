//! Exact arithmetic over F_q[θ] and its Tate algebras, the Carlitz module,
//! matrix L-values and ω-values, representations of GL₂(F_q[θ]), vectorial
//! Eisenstein series and the Nagao amalgam.

#![allow(clippy::too_many_arguments, clippy::type_complexity, clippy::should_implement_trait, clippy::wrong_self_convention, clippy::suspicious_arithmetic_impl)]

pub mod algrep;
pub mod amalgam;
pub mod apoly;
pub mod carlitz;
pub mod combinat;
pub mod error;
pub mod field;
pub mod gamma;
pub mod lambda;
pub mod lfunc;
pub mod matrix;
pub mod meataxe;
pub mod modular;
pub mod mpoly;
pub mod parse;
pub mod ratfunc;
pub mod report;
pub mod ring;
pub mod series;
pub mod verify;

pub use error::{Error, Result};
