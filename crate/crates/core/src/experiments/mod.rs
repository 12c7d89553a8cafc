//! Experiment drivers producing result tables.

pub mod finite;
pub mod flow;
pub mod suite;
pub mod table;

pub use finite::{general_sweep, symmetric_sweep, SweepParams};
pub use flow::{
    hodge_checks, lambda_sweep, potential_flow, FlowOutput, HodgeParams, LambdaSweepParams, PotentialFlowParams,
};
pub use suite::{random_suite, SuiteParams, SuiteReport};
pub use table::{Table, Value};
