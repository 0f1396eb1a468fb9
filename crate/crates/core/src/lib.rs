//! Explicit charts for a compact non-Kahler complex surface fibered over
//! `CP^1`, together with the numerics needed to check its gluing, its
//! canonical form and bundles pulled back from the base.

pub mod atlas;
pub mod bundles;
pub mod holo;
pub mod surface;
