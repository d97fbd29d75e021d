//! Loewner chains of holomorphic covering mappings of the unit ball.
//!
//! The crate evaluates closed-form chains `t -> f_t`, lifts paths through
//! them, recovers the associated evolution family
//! `phi_{s,t} = f_t^{-1} o f_s`, and measures how well the defining
//! identities hold numerically.
//!
//! ```
//! use loewner::covers::ChainSpec;
//! use loewner::complex::CPoint;
//! use loewner::lifting::evolution_map;
//!
//! let chain = ChainSpec::annulus();
//! let z = CPoint::scalar(num_complex::Complex64::new(0.3, 0.1));
//! let w = evolution_map(&chain, 0.5, 1.0, &z, 1e-12).unwrap();
//! // f_1(phi_{0.5,1}(z)) = f_{0.5}(z)
//! let lhs = chain.eval(1.0, &w).unwrap();
//! let rhs = chain.eval(0.5, &z).unwrap();
//! assert!(lhs.dist(&rhs) < 1e-10);
//! ```

pub mod complex;
pub mod covers;
pub mod embed;
pub mod error;
pub mod io;
pub mod lifting;
pub mod sampling;
pub mod topology;
pub mod validate;

pub use complex::{CMatrix, CPoint, NormKind};
pub use num_complex::Complex64;
pub use covers::{ChainSpec, CoverSpec};
pub use error::{Error, Result};
pub use validate::{CheckRecord, ValidationReport, Verdict};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/covers.md")]
    mod covers {}
    #[doc = include_str!("../../../book/src/lifting.md")]
    mod lifting {}
    #[doc = include_str!("../../../book/src/topology.md")]
    mod topology {}
    #[doc = include_str!("../../../book/src/validation.md")]
    mod validation {}
    #[doc = include_str!("../../../book/src/embedding.md")]
    mod embedding {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
