//! Finite state-to-function transition systems over abelian monoids:
//! bisimulation, reductions to weighted transition systems, and a
//! finite-conjunction modal logic.

pub mod bisim;
pub mod fixtures;
pub mod generate;
pub mod logic;
pub mod monoid;
pub mod reduce;
pub mod system;
pub mod textio;
pub mod weightfn;

pub use bisim::{largest_bisimulation, Partition};
pub use logic::Formula;
pub use monoid::{MonoidDesc, Weight};
pub use reduce::{Reduction, Stage};
pub use system::{Futs, Signature};
pub use weightfn::WeightTerm;
