//! Exact supercharacter theories of finite algebra groups G(q^n) = 1 + A(q^n)
//! over a lattice of field levels, together with the descent that relates
//! levels: norm maps on twisted conjugacy classes, trace lifts on dual
//! characters, and the induced correspondence on supercharacters.
//!
//! Everything is enumerated and exact: values live in Z[ζ_p] with rational
//! coefficients, orbits and classes are materialized, and every claimed
//! identity is checked rather than assumed.  Enumerations that would exceed
//! the configured size bound are refused, never sampled.
//!
//! Entry points: [`AlgebraSpec`] + [`RunConfig`] → [`Engine`], then the
//! per-level tables and the cross-level operations on it.  The `commands`
//! module carries the CLI.

pub mod algebra;
pub mod commands;
pub mod cyclotomic;
pub mod engine;
pub mod error;
pub mod field;
pub mod input;
pub mod orbits;
pub mod report;
pub mod shintani;
pub mod superchar;
pub mod superdual;

pub use algebra::{AlgebraElement, GroupElement, NilpotentAlgebra};
pub use cyclotomic::CycValue;
pub use engine::{Engine, LevelTables};
pub use error::{Error, Result};
pub use field::{FieldElement, FieldTower};
pub use input::{parse_levels, AlgebraSpec, OutputFormat, RunConfig};
pub use orbits::{AdditiveCharacter, DualOrbit, FClass, Superclass};
pub use shintani::NormCorrespondence;
pub use superchar::{Supercharacter, SuperclassFunction};
pub use superdual::{SerreDualClass, SuperdualClass};
