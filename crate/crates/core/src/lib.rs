//! Rauzy-Veech-Zorich renormalization for interval exchange transformations,
//! Veech's zippered rectangles, and exact periodic-orbit counting for the
//! Teichmüller flow on the space of zippered rectangles.
//!
//! The crate is organized around the objects of the theory:
//!
//! * [`perm`]: irreducible permutations, the Rauzy operations, Rauzy classes;
//! * [`matrix`]: exact nonnegative unimodular renormalization matrices and
//!   Perron eigendata;
//! * [`symbolic`]: the countable alphabet, words, admissibility, canonical
//!   cyclic forms, cylinder volumes;
//! * [`induction`]: the induction map, the Zorich acceleration, coding,
//!   inverse branches, periodic points;
//! * [`rect`]: zippered rectangles in `(lambda, h, a, pi)` and delta
//!   coordinates, the flow, the map `U`, and the transversal's first-return
//!   map;
//! * [`counting`]: exhaustive enumeration of admissible words under a norm
//!   bound, orbit counting via canonical forms, and slope estimation;
//! * [`measure`]: seeded Monte-Carlo verification of the measure-theoretic
//!   identities.

pub mod counting;
pub mod error;
pub mod induction;
pub mod matrix;
pub mod measure;
pub mod perm;
pub mod rect;
pub mod scalar;
pub mod symbolic;

pub use error::{Error, Result};
pub use induction::{
    encode, inverse_branch, periodic_point, rv_step, zorich_step, IETPoint, IETPointF, IETPointQ,
    Sector, StepRecord,
};
pub use matrix::{perron, PerronData, RenormMatrix};
pub use perm::{Op, Permutation, RauzyClass};
pub use symbolic::{b_compat, cylinder_leb, Letter, Word};
