//! Exact derivation homology of free graded Lie algebras, the
//! C-infinity / Chen differential dictionary, and simplicial obstruction
//! classes with filtered non-abelian coefficients.
//!
//! Everything is exact over the rationals except [`models::sphere_integral_check`].

pub mod cinfty;
pub(crate) mod complex;
pub mod derivation;
pub mod error;
pub mod io;
pub mod linalg;
pub mod models;
pub mod lie;
pub mod random;
pub mod scalar;
pub mod simplicial;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/lie.md")]
    mod lie {}
    #[doc = include_str!("../../../book/src/derivations.md")]
    mod derivations {}
    #[doc = include_str!("../../../book/src/dictionary.md")]
    mod dictionary {}
    #[doc = include_str!("../../../book/src/simplicial.md")]
    mod simplicial {}
    #[doc = include_str!("../../../book/src/models.md")]
    mod models {}
}
