pub mod concepts;
pub mod dom;
pub mod pipeline;
pub mod render;
pub mod search;
pub mod segment;
pub mod service;
pub mod store;
pub mod summarize;
pub mod text;

/// Bumped whenever a change to ingest or segmentation invalidates stored records.
pub const PIPELINE_REVISION: u32 = 1;
