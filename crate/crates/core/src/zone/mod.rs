//! Zones, zone sets and the operations the simulation check is built from.

pub mod bound;
pub mod cube;
pub mod dbm;
pub mod display;
pub mod formula;
mod index;
pub mod lh;
pub mod set;
pub mod time;
pub mod universe;

pub use bound::Bound;
pub use cube::Cube;
pub use dbm::Zone;
pub use formula::{Constraint, Formula};
pub use set::{Cell, CellStore, Point, SymbolicSet};
pub use universe::{Universe, VarKind};
