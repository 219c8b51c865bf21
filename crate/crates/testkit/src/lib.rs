//! Test support for the gaitnl crates.
//!
//! Everything in here is written straight from the textbook definitions and
//! deliberately shares no code with `gaitnl-core`: the oracles are O(N²)
//! double loops, the fixtures are plain generators with fixed seeds.

pub mod fixtures;
pub mod oracle;
