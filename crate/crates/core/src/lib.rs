//! Exact verification of PBW deformations of skew group algebras `S # G` for
//! quadratic PBW algebras `S`.
//!
//! Two independent deciders are provided: explicit algebraic conditions on the
//! parameter maps ([`pbwcheck`]) and an overlap-resolution oracle on the
//! filtered rewriting system ([`diamond`]). The [`untwist`] module converts
//! nonmodular deformations of the group action into deformations with trivial
//! action deformation.

pub mod diamond;
pub mod fixtures;
pub mod group;
pub mod params;
pub mod pbwcheck;
pub mod quadratic;
pub mod random;
pub mod scalars;
pub mod sparse;
pub mod untwist;
