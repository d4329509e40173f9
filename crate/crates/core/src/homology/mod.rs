mod merge_tree;
mod step;
mod union_find;

pub use merge_tree::{Birth, Component, EdgeBranch, ForwardMap, Merge, MergeTree};
pub use step::{StepFunction, StepInterval};
