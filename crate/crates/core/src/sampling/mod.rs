//! Deterministic sampling on bipartite instances.

mod instance;
mod once;
mod pipeline;
mod spanset;

pub use instance::{choose2, BipartiteInstance};
pub(crate) use once::repeat_unchecked;
pub use once::{
    bad_nodes, gate_threshold, node_cost, repeat_degree_bound, sample_cost, subsample_once, subsample_repeat, RepeatResult,
};
pub use pipeline::{
    main_bad_set, main_shape, pipeline_sample, sample_main, subsample_exp_t, threshold, ExpTResult, Importance, MainResult,
    PipelineResult, PipelineShape, Trace, TraceNode,
};
pub use spanset::SpanSet;
