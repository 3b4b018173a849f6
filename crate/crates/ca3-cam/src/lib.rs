//! A content-addressable memory built from spiking populations.
//!
//! The memory stores associations between a cue (one of `cue_count` lines)
//! and a content pattern (a set of `cont_size` bits), and supports three
//! operations, all expressed as spike injections on a shared input layer:
//!
//! * **learn**: present cue and content together for three steps; the pair
//!   is stored one-shot. If the cue already held a different pattern, the
//!   superseded bits are actively forgotten and reported on the output.
//! * **recall by cue**: present the cue alone; the stored content appears on
//!   the output.
//! * **recall by content**: present a content fragment alone; every cue
//!   whose stored pattern intersects the fragment appears on the output.
//!
//! Recalls read through two plastic association stages without disturbing
//! them, so recall is non-destructive and repeatable. All timing is exact
//! and deterministic: a learn settles 7 steps after it starts, a recall
//! answers after 6, and operations may be pipelined back to back at that
//! spacing ([`TimingContract`]).
//!
//! [`CamSession`] runs operations eagerly one at a time; [`compile`] packs a
//! whole operation stream into a single stimulus schedule for batch runs.
//! [`testbench`] contains a scripted demonstration checked against a frozen
//! spike trace, a pattern-sweep exerciser and a randomized comparison
//! against the table-based [`OracleCam`]; [`gridmap`] applies the memory to
//! a toy occupancy-mapping task.

mod cam;
mod config;
mod ops;
mod oracle;

pub mod gridmap;
pub mod testbench;

pub use cam::{
    build_description, CamNetwork, InjectError, CONTENT_TO_CUE, CUE_TO_CONTENT, INPUT, MERGE_CONT,
    MERGE_CUE, OUTPUT, S1_CONT, S1_CUE, S2_COND, S2_CONT, S2_CUE, S2_INT,
};
pub use config::{CamConfig, CamParams, ParamError};
pub use ops::{
    compile, decode, CamSession, CompiledPlan, ContentSet, CueSet, MemoryPattern, OpError,
    OpRequest, Operation, OperationResult, Outcome, PlannedOp, TimingContract,
};
pub use oracle::OracleCam;
pub use snn_core::{Raster, SpikeEvent};
