//! Deterministic end-to-end simulation of the KDC, consortium nodes,
//! parking operators and drivers, with PIR fault injection.

mod audit;
mod config;
mod faults;
mod report;
mod reservation;
mod sim;
mod trace;

pub use audit::{
    audit, chi_square_homogeneity, chi_square_uniform, coalition_distinguisher, collusion_observe,
    degree_structure_holds, CollusionTranscript, NodeAudit, Observation, AUDIT_BINS,
};
pub use config::{Backend, FaultPlan, ScenarioConfig};
pub use faults::byzantine_wrap;
pub use report::OverheadReport;
pub use reservation::{PoDesk, PoReply, ReservationRecord, ReservationRequest, ReservationStatus};
pub use sim::{run_scenario, sample_request_bytes, ScenarioOutput, Simulation, Summary, SIM_EPOCH};
pub use trace::{Trace, TraceEvent};

use crate::anon_cred::CredentialError;
use crate::ledger::LedgerError;
use crate::pir::PirError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid config field `{field}`: {reason}")]
    Config { field: String, reason: String },
    #[error("retrieval failed: {0}")]
    Pir(#[from] PirError),
    #[error("ledger: {0}")]
    Ledger(#[from] LedgerError),
    #[error("credential: {0}")]
    Credential(#[from] CredentialError),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("{0}")]
    Usage(String),
}

impl HarnessError {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        HarnessError::Config { field: field.into(), reason: reason.into() }
    }
}
