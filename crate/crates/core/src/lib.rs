//! Sheet-metal process planning from boundary-representation models.

pub mod brep;
pub mod build;
pub mod classify;
pub mod features;
pub mod params;
pub mod pipeline;
pub mod report;
pub mod resources;
pub mod step;
