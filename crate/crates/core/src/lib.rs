//! Twisted products `x ∘ⁿ y = [x,y]ⁿ x y` on finite nilpotent groups of class
//! at most 2, the strings of groups they generate, and exhaustive checks of
//! their structural properties at desk scale.

pub mod arith;
pub mod catalog;
pub mod error;
pub mod group;
pub mod invariants;
pub mod twist;
pub mod verify;

pub use error::{Error, Result};
pub use group::{Element, Group};
