//! Numerical laboratory for the resource theories of quantum coherence and
//! magic on small qudit systems.
//!
//! The crate covers discrete Wigner functions ([`phase_space`]), the
//! stabilizer polytope and distances to it ([`stabilizer`]), resource
//! quantifiers ([`monotones`]), quantum channels across the free-operation
//! hierarchy ([`channels`]), and seeded batch experiments ([`experiments`]).
//!
//! ```
//! use qmagic::linalg::{DensityMatrix, PureState};
//! use qmagic::monotones::sum_negativity;
//!
//! let strange = PureState::from_real(&[0.0, 1.0, -1.0]).unwrap();
//! let rho = DensityMatrix::from_pure(&strange);
//! assert!((sum_negativity(&rho).unwrap() - 2.0 / 3.0).abs() < 1e-12);
//! ```

pub mod audits;
pub mod channels;
pub mod error;
pub mod experiments;
pub mod io;
pub mod linalg;
pub mod monotones;
pub mod phase_space;
pub mod stabilizer;

pub use error::{Error, Result};

// The guide under book/ is compiled as doctests so its snippets stay honest.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/states.md")]
    pub mod states {}
    #[doc = include_str!("../../../book/src/phase_space.md")]
    pub mod phase_space {}
    #[doc = include_str!("../../../book/src/stabilizer.md")]
    pub mod stabilizer {}
    #[doc = include_str!("../../../book/src/monotones.md")]
    pub mod monotones {}
    #[doc = include_str!("../../../book/src/channels.md")]
    pub mod channels {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    pub mod experiments {}
}
