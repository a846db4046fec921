//! Smooth lattice polytopes in dimensions 2 and 3.
//!
//! Exact integer geometry, normal fans, canonical forms, Cayley and blow-up
//! constructions, triangulation labels, the enumeration pipeline and toric
//! ideal checks.

pub mod catalog;
pub mod constructions;
pub mod enumerate2d;
pub mod enumerate3d;
pub mod error;
pub mod fans;
pub mod geometry;
pub mod iso;
pub mod labels;
pub mod lattice;
pub mod normality;

pub use error::{Error, Result};
pub use geometry::{hull, Face, Facet, FacetInequality, LatticePolytope};
pub use lattice::{LatticeVector, UnimodularAffineMap};
