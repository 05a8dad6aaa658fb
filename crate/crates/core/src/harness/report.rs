use num_rational::Ratio;
use serde::Serialize;

/// Per-phase byte accounting of one scenario, measured next to analytic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OverheadReport {
    pub retrievals: u64,
    /// PIR response payload bytes over all retrievals.
    pub retrieval_download_bytes: u64,
    /// PIR query payload bytes; excluded from the figure curves.
    pub retrieval_upload_bytes: u64,
    /// Serialized size of the last reservation request.
    pub reservation_request_bytes: u64,
    /// `Γ` plus its signature, per arrival.
    pub arrival_exchange_bytes: u64,
    #[serde(serialize_with = "ratio_str")]
    pub analytic_download_bytes: Ratio<u64>,
    pub analytic_upload_bytes: u64,
    pub analytic_reservation_bytes: u64,
    #[serde(serialize_with = "ratio_str")]
    pub retrieval_rate: Ratio<u64>,
    /// `M × capacity × 40`, per retrieval.
    pub trivial_bytes: u64,
}

fn ratio_str<S: serde::Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

impl OverheadReport {
    /// `(phase, measured, analytic)` rows; an empty cell has no counterpart.
    pub fn rows(&self) -> Vec<[String; 3]> {
        let analytic_download = crate::overhead::Bytes(self.analytic_download_bytes).to_string();
        vec![
            ["retrieval_download".into(), self.retrieval_download_bytes.to_string(), analytic_download],
            ["retrieval_upload".into(), self.retrieval_upload_bytes.to_string(), self.analytic_upload_bytes.to_string()],
            [
                "reservation_request".into(),
                self.reservation_request_bytes.to_string(),
                self.analytic_reservation_bytes.to_string(),
            ],
            ["arrival_exchange".into(), self.arrival_exchange_bytes.to_string(), String::new()],
            ["trivial_download".into(), String::new(), (self.trivial_bytes * self.retrievals).to_string()],
        ]
    }
}
