//! Computational toolkit for totally separable packings and coverings of
//! spherical caps.
//!
//! A packing of caps on the unit sphere is *totally separable* (TS) when any
//! two caps can be separated by a great circle that avoids the interiors of
//! all caps in the packing; a covering is TS when the cells of a great-circle
//! tiling can be injectively assigned to caps that contain them.  This crate
//! provides the spherical geometry primitives, cell metrics, great-circle
//! arrangements, Delaunay-based decompositions, verification procedures,
//! closed-form bounds, higher-dimensional analogues, and a derivative-free
//! optimizer used to construct and audit such configurations.
//!
//! Everything is computed in radians on `f64`.  The crate is `no_std`
//! compatible (with `alloc`); the companion CLI crate carries IO and file
//! formats.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod arrangement;
pub mod covering;
pub mod geom;
pub mod highdim;
pub mod metrics;
pub mod molnar;
pub mod nd;
pub mod optimizer;
pub mod packing;
pub mod tol;

mod hull;

pub use tol::Tolerances;
