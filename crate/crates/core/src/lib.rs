//! Exact computational models for median graphs, almost-median graphs,
//! cocycle-built central extensions and a handful of explicit groups.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`]: finite graphs, distance matrices, δ-intervals, generators, I/O.
//! - [`median`]: median certification, almost-median frontiers, hyperplanes.
//! - [`groups`]: exact group models (free, free abelian, Heisenberg,
//!   lamplighter, twisted lamplighter extensions, surface groups, Thompson's T).
//! - [`cocycle`]: 2-cocycles, central extensions, quasimorphisms.
//! - [`presentation`]: finite presentations, relator checks, hom counting.
//! - [`experiments`]: Cayley balls, distortion profiles, embedding reports.

pub mod cocycle;
pub mod dyadic;
pub mod experiments;
pub mod graph;
pub mod groups;
pub mod median;
pub mod presentation;
pub mod registry;

/// Schema tag written into every JSON report.
pub const SCHEMA: &str = "median-lab/1";

/// Default element cap for Cayley-ball enumeration.
pub const DEFAULT_BALL_CAP: usize = 5_000_000;

/// Reads `MEDIAN_LAB_CAP` and falls back to `default` when unset or unparsable.
pub fn cap_from_env(default: usize) -> usize {
    std::env::var("MEDIAN_LAB_CAP")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(default)
}
