//! Command-line front end: classification reports, SVG renderings and
//! parameter sweeps.

pub mod render;
pub mod report;
pub mod spec;
pub mod sweep;
