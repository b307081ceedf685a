//! Combinatorial tiling engine for the trilobite-and-crab tile pair.
//!
//! The two tiles are encoded in square-grid shorthand: the trilobite is a
//! 2x2 block and the crab a single cell, each in four rotations, with
//! matching expressed entirely as constraints on the decorations the tiles
//! present at lattice corner points, plus a parity constraint on
//! crab-separated trilobite pairs. This crate provides:
//!
//! - [`grid`]: coordinates, rotations, transforms, parities;
//! - [`atlas`]: the tile/rule data model, its text format, and validation;
//! - [`engine`]: patches, forced-move propagation with replayable traces,
//!   exhaustive region search, patch validation, neighbor-code
//!   classification, and exhaustive torus search;
//! - [`lemmas`]: the data-driven case-check runner that re-verifies each
//!   step of the aperiodicity argument by exhaustive search;
//! - [`hierarchy`]: supertile inflation, composition (the inverse), chain
//!   detection, and the half-plane shift that removes chains.
//!
//! The crate is `no_std` + `alloc`; all containers are ordered so results
//! are deterministic and independent of any parallel driver.

#![no_std]

extern crate alloc;

pub mod atlas;
pub mod engine;
pub mod grid;
pub mod hierarchy;
pub mod lemmas;
