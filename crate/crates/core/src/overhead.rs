//! Analytic communication, storage and operation-count accounting.

use std::fmt;

use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::anon_cred::{
    driver_register, kdc_setup, measure, randomized_sign, reservation_encrypt, verify_sig, Bls12, DriverKeys,
    OpCounts, PoEncryptionKey, ReservationPlaintext,
};
use crate::ledger::{BLOCK_HEADER_LEN, BLOCK_TRAILER_LEN, OFFER_LEN};
use crate::pir::{retrieval_rate, PirError, PirParams};

/// Serialized element sizes for the analytic reservation accounting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SizeTable {
    pub g1: u64,
    pub scalar: u64,
    pub hash: u64,
    #[serde(default)]
    pub ciphertext_overhead: u64,
}

impl Default for SizeTable {
    fn default() -> Self {
        SizeTable { g1: 20, scalar: 20, hash: 32, ciphertext_overhead: 0 }
    }
}

impl SizeTable {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        let table: SizeTable = toml::from_str(text).map_err(|e| e.message().to_string())?;
        for (name, v) in [("g1", table.g1), ("scalar", table.scalar), ("hash", table.hash)] {
            if v == 0 {
                return Err(format!("{name} must be positive"));
            }
        }
        Ok(table)
    }

    /// Two G1-sized ciphertext components, the signature `(σ′1, σ′2, c, s)`
    /// as two G1 elements and two scalars, and two hashes.
    pub fn reservation_bytes(&self) -> u64 {
        2 * self.g1 + self.ciphertext_overhead + 2 * self.g1 + 2 * self.scalar + 2 * self.hash
    }
}

/// Download size of one cell of `offers` offers: `offers × 40 / R`.
pub fn pir_download_bytes(params: &PirParams, offers: u64) -> Ratio<u64> {
    let rate = retrieval_rate(params);
    Ratio::from_integer(offers * OFFER_LEN as u64) / rate
}

/// Downloading every cell in full.
pub fn trivial_download_bytes(cells: u64, offers: u64) -> u64 {
    cells * offers * OFFER_LEN as u64
}

/// A byte count that may be fractional.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Bytes(pub Ratio<u64>);

impl fmt::Display for Bytes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.to_integer())
        } else {
            write!(f, "{:.3}", *self.0.numer() as f64 / *self.0.denom() as f64)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CurvePoint {
    pub x: u64,
    pub pir_bytes: Bytes,
    pub trivial_bytes: u64,
}

fn fixed_params(n: usize, cells: usize) -> Result<PirParams, PirError> {
    PirParams::new(n, 1, 1, 1, cells, OFFER_LEN / 2)
}

/// Download versus offers per cell at fixed `n`. Offer counts that
/// are not a multiple of `L` are rounded up to whole stripes; the second
/// return value lists those that were.
pub fn fig4(n: usize, offers: &[u64], cells: usize) -> Result<(Vec<CurvePoint>, Vec<u64>), PirError> {
    let params = fixed_params(n, cells)?;
    let l = params.rows_per_stripe() as u64;
    let mut rounded = Vec::new();
    let points = offers
        .iter()
        .map(|&o| {
            let stored = o.div_ceil(l) * l;
            if stored != o {
                rounded.push(o);
            }
            CurvePoint {
                x: o,
                pir_bytes: Bytes(pir_download_bytes(&params, stored)),
                trivial_bytes: trivial_download_bytes(cells as u64, o),
            }
        })
        .collect();
    Ok((points, rounded))
}

/// Download of `offers` offers versus node count.
pub fn fig5(offers: u64, nodes: &[usize], cells: usize) -> Result<Vec<CurvePoint>, PirError> {
    nodes
        .iter()
        .map(|&n| {
            let params = fixed_params(n, cells)?;
            Ok(CurvePoint {
                x: n as u64,
                pir_bytes: Bytes(pir_download_bytes(&params, offers)),
                trivial_bytes: trivial_download_bytes(cells as u64, offers),
            })
        })
        .collect()
}

/// `blocks_per_day × days × (block_overhead + cells × offers_per_cell × offer_bytes)`.
pub fn storage_bytes(offers_per_cell: u64, cells: u64, offer_bytes: u64, block_overhead: u64, blocks_per_day: u64, days: u64) -> u64 {
    blocks_per_day * days * (block_overhead + cells * offers_per_cell * offer_bytes)
}

/// Header plus trailer of a serialized block.
pub const BLOCK_OVERHEAD: u64 = (BLOCK_HEADER_LEN + BLOCK_TRAILER_LEN) as u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OpCountRow {
    pub phase: &'static str,
    pub measured: OpCounts,
    /// The published breakdown, where one exists.
    pub published: Option<&'static str>,
}

/// Instrumented operation counts of one reservation request on BLS12-381.
pub fn opcount_table() -> Vec<OpCountRow> {
    let mut rng = ChaCha20Rng::seed_from_u64(0);
    let (params, mut kdc) = kdc_setup::<Bls12, _>(&mut rng);
    let driver = DriverKeys::generate(&params, &kdc.gpk, &mut rng);
    let cred = driver_register(&params, &driver, "opcount", &mut kdc, &mut rng).expect("honest registration");
    let po = PoEncryptionKey::generate(&mut rng);
    let plain = ReservationPlaintext { pk_d: [1; 32], t_s: 1_700_000_000, t_p: 3600 };

    let (ct, enc) = measure(|| reservation_encrypt(&po.public(), &plain, &mut rng));
    let (sig, sign) = measure(|| randomized_sign(&cred, ct.as_bytes(), &mut rng));
    let (ok, verify) = measure(|| verify_sig(&kdc.gpk, &sig, ct.as_bytes()));
    assert!(ok.is_ok(), "honest signature must verify");
    vec![
        OpCountRow { phase: "encrypt", measured: enc, published: Some("2 Mul, 1 Add") },
        OpCountRow { phase: "sign", measured: sign, published: Some("3 Exp, 1 Mul, 1 Add, 1 Hash") },
        OpCountRow { phase: "request", measured: enc + sign, published: None },
        OpCountRow { phase: "verify", measured: verify, published: None },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reservation_accounting() {
        assert_eq!(SizeTable::default().reservation_bytes(), 2 * 20 + 4 * 20 + 2 * 32);
        let doubled = SizeTable { g1: 40, scalar: 40, hash: 64, ciphertext_overhead: 0 };
        assert_eq!(doubled.reservation_bytes(), 368);
        assert_eq!(SizeTable::from_toml("g1 = 20\nscalar = 20\nhash = 32\n"), Ok(SizeTable::default()));
        assert!(SizeTable::from_toml("g1 = 0\nscalar = 20\nhash = 32\n").is_err());
    }

    #[test]
    fn fig5_points() {
        let pts = fig5(75, &[34, 10, 11], 100).unwrap();
        assert_eq!(pts[0].pir_bytes.to_string(), "3300");
        assert_eq!(pts[0].trivial_bytes, 300_000);
        // R = 6/9 and 7/10
        assert_eq!(pts[1].pir_bytes.0, Ratio::from_integer(4500));
        assert_eq!(pts[2].pir_bytes.0, Ratio::new(30_000, 7));
        assert_eq!(pts[2].pir_bytes.to_string(), "4285.714");
    }

    #[test]
    fn fig4_rounds_up_to_stripes() {
        let (pts, rounded) = fig4(44, &[0, 40, 41], 2).unwrap();
        assert_eq!(pts[0].pir_bytes.0, Ratio::from_integer(0));
        assert_eq!(pts[1].pir_bytes.0, Ratio::from_integer(1720));
        assert_eq!(pts[2].pir_bytes.0, Ratio::from_integer(3440));
        assert_eq!(rounded, vec![41]);
    }

    #[test]
    fn storage_examples() {
        assert_eq!(BLOCK_OVERHEAD, 80);
        assert_eq!(storage_bytes(1, 1, 40, 80, 1, 1), 120);
        assert_eq!(storage_bytes(50, 39, 40, 80, 144, 0), 0);
        let year = storage_bytes(50, 39, 40, 80, 144, 365);
        assert_eq!(year, 144 * 365 * (80 + 39 * 50 * 40));
        assert_eq!(year - 144 * 365 * 80, 4_099_680_000);
    }

    #[test]
    fn opcounts() {
        let rows = opcount_table();
        let sign = rows.iter().find(|r| r.phase == "sign").unwrap().measured;
        assert_eq!((sign.exp, sign.hash), (3, 1));
        let verify = rows.iter().find(|r| r.phase == "verify").unwrap().measured;
        assert_eq!(verify.pairing, 3);
        let enc = rows.iter().find(|r| r.phase == "encrypt").unwrap().measured;
        assert_eq!((enc.ec_mul, enc.pairing), (2, 0));
    }
}
