//! Numerical capacity regions of quantum broadcast channels.
//!
//! The crate is layered bottom-up:
//!
//! - [`state`], [`layout`], [`linalg`]: density matrices on labelled tensor
//!   layouts, partial traces, distances and entropies.
//! - [`channel`], [`degrade`]: Kraus channels, isometric extensions,
//!   broadcast marginals, generalized dephasing constructions and a numerical
//!   search for degrading maps.
//! - [`info`]: entropic functionals (conditional entropy, coherent and mutual
//!   information, Holevo quantity).
//! - [`region`]: frontier extraction for the classical, classical-quantum and
//!   fully quantum rate regions, plus merging-rate evaluators.
//! - [`oracle`]: exhaustive grid enumeration used to cross-check the optimizer.
//!
//! All logarithms are base 2.

pub mod channel;
pub mod degrade;
pub mod error;
pub mod info;
pub mod layout;
pub mod linalg;
pub mod optimize;
pub mod oracle;
pub mod random;
pub mod region;
pub mod state;

pub use channel::{BroadcastChannel, CqBroadcastChannel, DephasingSpec, IsometricExtension, KrausChannel};
pub use error::{Error, Result};
pub use layout::SystemLayout;
pub use optimize::OptimizerConfig;
pub use region::{Frontier, RatePoint, Witness};
pub use state::{CqState, DensityMatrix, PureState};
