//! Compact routing on r-visibility graphs of histogram polygons.
//!
//! Two schemes are provided: a shortest-path scheme with one-bit routing
//! tables for simple histograms, and a scheme with stretch at most two and
//! logarithmic labels, tables and headers for double histograms. The
//! [`engine`] module runs either scheme hop by hop and verifies it against
//! breadth-first search.

pub mod bits;
pub mod engine;
pub mod landmarks;
pub mod oracle;
pub mod polygon;
pub mod scheme_double;
pub mod scheme_simple;
pub mod visibility;
