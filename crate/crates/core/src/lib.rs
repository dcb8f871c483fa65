//! Request-response games: winning-region computation, waiting-time values
//! and synthesis of optimal finite-state strategies.

pub mod arena;
pub mod bounds;
pub mod buchi;
pub mod error;
pub mod format;
pub mod games;
pub mod meanpayoff;
pub mod optimal;
pub mod rr;

pub use arena::{
    extend_prefix, product, project, validate_arena, Arena, FiniteStateStrategy, LassoPlay,
    MemoryStructure, PlayPrefix, Player, Product, RawArena, StateId, Vertex, VertexId,
};
pub use error::{Error, ErrorKind, Result};
pub use optimal::{
    evaluate_strategy, playout, rr_oracle_optimal, rr_to_mpg, synthesize_optimal, Adversary,
    PlayStep, Provenance, RrMpg, SynthesisOutcome, Thresholds, WaitingMemory,
};
pub use rr::{
    annotate_prefix, lasso_value, penalty_pseudo_inverse, prefix_penalty, waiting_step,
    waiting_step_capped, CappedWaiting, PenaltyFn, RrCondition, RrGame, ValueResult, WaitingVector,
};
