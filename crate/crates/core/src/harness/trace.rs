use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// One transferred message.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub seq: u64,
    /// Simulated time at which the transfer completes.
    pub at_ns: u64,
    pub from: String,
    pub to: String,
    pub kind: String,
    pub bytes: usize,
    /// Hex SHA-256 of the payload.
    pub digest: String,
}

/// Message log over a single serial channel; the logical clock advances by
/// each message's transmission time.
#[derive(Debug, Clone)]
pub struct Trace {
    rate_bps: u64,
    now_ns: u64,
    events: Vec<TraceEvent>,
}

impl Trace {
    pub fn new(rate_bps: u64) -> Self {
        Trace { rate_bps, now_ns: 0, events: Vec::new() }
    }

    pub fn transmission_ns(&self, bytes: usize) -> u64 {
        (bytes as u128 * 8 * 1_000_000_000 / self.rate_bps as u128) as u64
    }

    pub fn record(&mut self, from: &str, to: &str, kind: &str, payload: &[u8]) {
        self.now_ns += self.transmission_ns(payload.len());
        self.events.push(TraceEvent {
            seq: self.events.len() as u64,
            at_ns: self.now_ns,
            from: from.to_string(),
            to: to.to_string(),
            kind: kind.to_string(),
            bytes: payload.len(),
            digest: hex::encode(Sha256::digest(payload)),
        });
    }

    pub fn now_ns(&self) -> u64 {
        self.now_ns
    }

    pub fn events(&self) -> &[TraceEvent] {
        &self.events
    }

    pub fn to_jsonl(&self) -> String {
        self.events
            .iter()
            .map(|e| serde_json::to_string(e).expect("trace events serialize") + "\n")
            .collect()
    }

    /// SHA-256 of the JSON-lines export.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_jsonl().as_bytes()))
    }

    pub fn bytes_of(&self, kind: &str) -> usize {
        self.events.iter().filter(|e| e.kind == kind).map(|e| e.bytes).sum()
    }
}
