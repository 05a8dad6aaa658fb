use std::collections::BTreeSet;

use ed25519_dalek::Signature;
use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use super::audit::CollusionTranscript;
use super::faults::byzantine_wrap;
use super::reservation::{PoDesk, PoReply, ReservationRecord, ReservationRequest, ReservationStatus};
use super::{Backend, FaultPlan, HarnessError, OverheadReport, ScenarioConfig, Trace};
use crate::anon_cred::{
    challenge_sign, challenge_verify, kdc_setup, randomized_sign, reservation_encrypt, Bls12, DriverCredential,
    DriverKeys, EphemeralKeypair, GroupParams, GroupPublicKey, KdcKeys, Pairing, ReservationPlaintext, ToyPairing,
};
use crate::ledger::{
    Admission, CellLedger, KdcCertifier, Network, OfferId, OfferTx, ParkingOffer, ParkingOperator, TxKind, Coord,
    LEADER,
};
use crate::overhead::{pir_download_bytes, trivial_download_bytes, SizeTable};
use crate::pir::{
    answer_query, is_zero_row, retrieval_rate, retrieve_cell, wire, CellLayout, PirParams, PirQuery, PirResponse,
    PirServers,
};

/// Simulated wall clock at time zero, in epoch seconds.
pub const SIM_EPOCH: u64 = 1_700_000_000;
const PARKING_TIME: u64 = 3600;

struct PoActor {
    operator: ParkingOperator,
    desk: PoDesk,
}

#[derive(Debug, Clone)]
struct Booking {
    po: usize,
    offer: OfferId,
    ephemeral: EphemeralKeypair,
    handle: Option<u32>,
    status: ReservationStatus,
}

struct DriverActor<P: Pairing> {
    id: String,
    keys: DriverKeys<P>,
    credential: DriverCredential<P>,
    retrieved: Vec<(u16, ParkingOffer)>,
    booking: Option<Booking>,
}

#[derive(Debug, Clone, Copy, Default)]
struct Measured {
    retrievals: u64,
    download: u64,
    upload: u64,
    reservation_request: u64,
    arrival_exchange: u64,
}

/// Everything a finished scenario leaves behind.
#[derive(Debug, Clone)]
pub struct ScenarioOutput {
    pub ledger: CellLedger,
    pub trace: Trace,
    pub report: OverheadReport,
    pub records: Vec<ReservationRecord>,
    pub driver_status: Vec<Option<ReservationStatus>>,
    pub transcripts: Vec<CollusionTranscript>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub seed: u64,
    pub trace_digest: String,
    pub events: usize,
    pub ledger_height: u64,
    pub report: OverheadReport,
    pub driver_status: Vec<Option<ReservationStatus>>,
}

impl ScenarioOutput {
    pub fn summary(&self, seed: u64, height: u64) -> Summary {
        Summary {
            seed,
            trace_digest: self.trace.digest(),
            events: self.trace.events().len(),
            ledger_height: height,
            report: self.report.clone(),
            driver_status: self.driver_status.clone(),
        }
    }
}

/// Stepwise protocol simulation over one pairing backend.
pub struct Simulation<P: Pairing> {
    config: ScenarioConfig,
    params: PirParams,
    layout: CellLayout,
    rng: ChaCha20Rng,
    fault_rng: ChaCha20Rng,
    group: GroupParams<P>,
    kdc: KdcKeys<P>,
    certifier: KdcCertifier,
    network: Network,
    pos: Vec<PoActor>,
    drivers: Vec<DriverActor<P>>,
    trace: Trace,
    fault_override: Option<FaultPlan>,
    round: usize,
    transcripts: Vec<CollusionTranscript>,
    payments: BTreeSet<[u8; 32]>,
    measured: Measured,
}

fn node_name(id: u16) -> String {
    format!("node-{id}")
}

fn po_name(i: usize) -> String {
    format!("po-{}", i + 1)
}

/// The nodes a driver queries, answering from their current ledgers.
struct SimServers<'a> {
    network: &'a Network,
    layout: CellLayout,
    rows_per_stripe: usize,
    faults: &'a FaultPlan,
    fault_rng: &'a mut ChaCha20Rng,
    trace: &'a mut Trace,
    driver: &'a str,
    desired: usize,
    transcript: Option<&'a mut CollusionTranscript>,
    download: u64,
    upload: u64,
    error: Option<HarnessError>,
}

impl SimServers<'_> {
    fn round(&mut self, queries: &[PirQuery]) -> Result<Vec<PirResponse>, HarnessError> {
        if let Some(t) = self.transcript.as_deref_mut() {
            t.observe(queries, self.desired);
        }
        let mut out = Vec::with_capacity(queries.len());
        for q in queries {
            let node = q.node_index;
            let bytes = wire::encode_query(q)?;
            self.trace.record(self.driver, &node_name(node), "pir_query", &bytes);
            self.upload += wire::payload_bytes(q.entries.len()) as u64;
            if self.faults.is_unresponsive(node) {
                out.push(PirResponse::timeout(node, q.stripe_index));
                continue;
            }
            let received = wire::decode_query(&bytes)?;
            let rows = self.network.node(node)?.ledger().rows();
            let content = self.layout.stripe_content(rows, self.rows_per_stripe, usize::from(received.stripe_index));
            let mut response = answer_query(&received, &content)?;
            if self.faults.is_byzantine(node) {
                response = byzantine_wrap(response, self.fault_rng);
            }
            let bytes = wire::encode_response(&response)?;
            self.trace.record(&node_name(node), self.driver, "pir_response", &bytes);
            let response = wire::decode_response(&bytes)?;
            self.download += response.values().map_or(0, |v| wire::payload_bytes(v.len()) as u64);
            out.push(response);
        }
        Ok(out)
    }
}

impl PirServers for SimServers<'_> {
    fn dispatch(&mut self, queries: &[PirQuery]) -> Vec<PirResponse> {
        match self.round(queries) {
            Ok(r) => r,
            Err(e) => {
                self.error.get_or_insert(e);
                queries.iter().map(|q| PirResponse::timeout(q.node_index, q.stripe_index)).collect()
            }
        }
    }
}

impl<P: Pairing> Simulation<P> {
    /// Runs system initialization: KDC setup, PO certification and driver
    /// registration.
    pub fn new(config: ScenarioConfig) -> Result<Self, HarnessError> {
        config.validate()?;
        let params = config.pir_params()?;
        let mut rng = ChaCha20Rng::seed_from_u64(config.rng_seed);
        let fault_rng = ChaCha20Rng::seed_from_u64(rng.next_u64());
        let mut trace = Trace::new(config.channel_rate_bps);

        let (group, mut kdc) = kdc_setup::<P, _>(&mut rng);
        let gpk_bytes = [P::encode_g2(&kdc.gpk.g2), P::encode_g2(&kdc.gpk.x_tilde), P::encode_g2(&kdc.gpk.y_tilde)].concat();
        trace.record("kdc", "all", "group_public_key", &gpk_bytes);
        let certifier = KdcCertifier::generate(&mut rng);
        let network = Network::new(config.n, config.cells, config.cell_capacity, certifier.verifying_key())?;
        let layout = network.node(LEADER)?.ledger().layout();

        let mut pos = Vec::with_capacity(config.num_pos);
        for i in 0..config.num_pos {
            let operator = ParkingOperator::new(&certifier, &mut rng);
            let c = operator.certificate();
            trace.record("kdc", &po_name(i), "po_certificate", &[&c.signing_key[..], &c.encryption_key, &c.kdc_signature].concat());
            pos.push(PoActor { operator, desk: PoDesk::default() });
        }

        let mut drivers = Vec::with_capacity(config.num_drivers);
        for i in 0..config.num_drivers {
            let id = format!("driver-{}", i + 1);
            let keys = DriverKeys::generate(&group, &kdc.gpk, &mut rng);
            let req = keys.registration_request(&id, &group, &mut rng);
            trace.record(&id, "kdc", "registration_request", &req.to_bytes());
            let issued = kdc.register(&group, &req, &mut rng)?;
            trace.record("kdc", &id, "credential", &issued.to_bytes());
            let credential = keys.finish(issued);
            if !credential.is_valid(&kdc.gpk) {
                return Err(HarnessError::Invariant(format!("{id}: issued credential fails PS validity")));
            }
            drivers.push(DriverActor { id, keys, credential, retrieved: Vec::new(), booking: None });
        }

        Ok(Simulation {
            config,
            params,
            layout,
            rng,
            fault_rng,
            group,
            kdc,
            certifier,
            network,
            pos,
            drivers,
            trace,
            fault_override: None,
            round: 0,
            transcripts: Vec::new(),
            payments: BTreeSet::new(),
            measured: Measured::default(),
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn params(&self) -> &PirParams {
        &self.params
    }

    pub fn group(&self) -> &GroupParams<P> {
        &self.group
    }

    pub fn group_public_key(&self) -> &GroupPublicKey<P> {
        &self.kdc.gpk
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn trace(&self) -> &Trace {
        &self.trace
    }

    pub fn transcripts(&self) -> &[CollusionTranscript] {
        &self.transcripts
    }

    pub fn rng(&mut self) -> &mut ChaCha20Rng {
        &mut self.rng
    }

    pub fn certifier(&self) -> &KdcCertifier {
        &self.certifier
    }

    pub fn po_fingerprint(&self, po: usize) -> [u8; 20] {
        self.pos[po].operator.fingerprint()
    }

    pub fn po_records(&self, po: usize) -> &[ReservationRecord] {
        &self.pos[po].desk.records
    }

    pub fn driver_status(&self, driver: usize) -> Option<ReservationStatus> {
        self.drivers[driver].booking.as_ref().map(|b| b.status)
    }

    pub fn retrieved(&self, driver: usize) -> &[(u16, ParkingOffer)] {
        &self.drivers[driver].retrieved
    }

    /// Replaces the configured fault plan for all later rounds, without
    /// budget checks.
    pub fn inject_faults(&mut self, plan: FaultPlan) {
        self.fault_override = Some(plan);
    }

    fn current_faults(&self) -> FaultPlan {
        self.fault_override.clone().unwrap_or_else(|| self.config.faults_for_round(self.round).clone())
    }

    fn sync_ledger_clock(&mut self) {
        self.network.set_clock((SIM_EPOCH + self.trace.now_ns() / 1_000_000_000) as u32);
    }

    pub fn check_replicas(&self) -> Result<(), HarnessError> {
        if !self.network.replicas_consistent() {
            return Err(HarnessError::Invariant("replicas at equal height disagree".into()));
        }
        let online: Vec<_> = self.network.nodes().iter().filter(|n| n.online).collect();
        if online.windows(2).any(|w| w[0].height() == w[1].height() && w[0].ledger() != w[1].ledger()) {
            return Err(HarnessError::Invariant("online replicas hold different snapshots".into()));
        }
        Ok(())
    }

    pub fn check_bookings(&self) -> Result<(), HarnessError> {
        if let Some(i) = self.pos.iter().position(|p| !p.desk.no_double_booking()) {
            return Err(HarnessError::Invariant(format!("{} double-booked a space", po_name(i))));
        }
        Ok(())
    }

    /// Ledger-level availability of node `id`; a returning node catches up.
    pub fn set_node_online(&mut self, id: u16, online: bool) -> Result<(), HarnessError> {
        self.network.set_online(id, online)?;
        if online && id != LEADER {
            self.network.sync(id)?;
        }
        Ok(())
    }

    /// Submits transactions from `from` as one block and mirrors the
    /// committed effects into the owning POs' desks.
    pub fn submit(&mut self, from: &str, txs: Vec<OfferTx>) -> Vec<Result<Admission, HarnessError>> {
        for tx in &txs {
            self.trace.record(from, &node_name(LEADER), "offer_tx", &tx.to_bytes());
        }
        self.sync_ledger_clock();
        let before = self.network.height();
        let results = self.network.submit_batch(txs.clone());
        if self.network.height() > before {
            let block = self.network.node(LEADER).expect("leader exists").chain().last().expect("new block").clone();
            let bytes = block.to_bytes();
            for node in self.network.nodes().iter().filter(|n| n.online && n.id != LEADER).map(|n| n.id).collect::<Vec<_>>() {
                self.trace.record(&node_name(LEADER), &node_name(node), "block", &bytes);
            }
        }
        for (tx, res) in txs.iter().zip(&results) {
            if let Ok(Admission::Committed { cell, row, .. }) = res {
                self.mirror_commit(tx, *cell, *row);
            }
        }
        results.into_iter().map(|r| r.map_err(HarnessError::from)).collect()
    }

    /// Re-proposes transactions that earlier missed a quorum.
    pub fn retry_pending(&mut self) -> Vec<Result<Admission, HarnessError>> {
        let txs = self.network.pending().to_vec();
        self.sync_ledger_clock();
        let results = self.network.retry_pending();
        for (tx, res) in txs.iter().zip(&results) {
            if let Ok(Admission::Committed { cell, row, .. }) = res {
                self.mirror_commit(tx, *cell, *row);
            }
        }
        results.into_iter().map(|r| r.map_err(HarnessError::from)).collect()
    }

    fn mirror_commit(&mut self, tx: &OfferTx, cell: u16, row: u16) {
        let fp = tx.certificate.fingerprint();
        let Some(po) = self.pos.iter_mut().find(|p| p.operator.fingerprint() == fp) else {
            return;
        };
        let id = OfferId { po_key: fp, cell, row };
        match tx.kind {
            TxKind::Publish => po.desk.offers.push((id, tx.offer)),
            TxKind::Invalidate => po.desk.offers.retain(|(o, _)| *o != id),
        }
    }

    /// A random offer of PO `po` in `cell`.
    pub fn random_offer(&mut self, po: usize, cell: u16) -> ParkingOffer {
        let max_slots = self.config.max_slots;
        let rng = &mut self.rng;
        ParkingOffer {
            available: rng.gen_range(1..=max_slots),
            cell,
            po_key: self.pos[po].operator.fingerprint(),
            lat: Coord::new(rng.gen_range(-900_000..=900_000)).expect("latitude in range"),
            lon: Coord::new(rng.gen_range(-1_800_000..=1_800_000)).expect("longitude in range"),
            charging: rng.gen(),
            price: rng.gen(),
            available_from: SIM_EPOCH as u32,
            available_for: 12 * PARKING_TIME as u32,
        }
    }

    pub fn publish_offer(&mut self, po: usize, offer: ParkingOffer) -> Result<Admission, HarnessError> {
        let tx = self.pos[po].operator.publish(offer);
        let res = self.submit(&po_name(po), vec![tx]).pop().expect("one result");
        self.check_replicas()?;
        res
    }

    /// The offers phase: `num_pos × offers_per_po` offers, assigned to
    /// cells round-robin.
    pub fn publish_initial_offers(&mut self) -> Result<(), HarnessError> {
        for k in 0..self.config.num_pos * self.config.offers_per_po {
            let po = k % self.config.num_pos;
            let cell = (k % self.config.cells + 1) as u16;
            let offer = self.random_offer(po, cell);
            match self.publish_offer(po, offer)? {
                Admission::Committed { .. } => {}
                Admission::Pending => return Err(HarnessError::Invariant("initial offer missed the quorum".into())),
            }
        }
        Ok(())
    }

    /// Cells holding at least one live offer, per the leader.
    pub fn occupied_cells(&self) -> Vec<u16> {
        let ledger = self.network.node(LEADER).expect("leader exists").ledger();
        (1..=self.config.cells as u16).filter(|&c| !ledger.offers(c).is_empty()).collect()
    }

    /// Privately retrieves `cell` for `driver` and checks the result
    /// against the leader's column.
    pub fn retrieve(&mut self, driver: usize, cell: u16) -> Result<Vec<(u16, ParkingOffer)>, HarnessError> {
        let faults = self.current_faults();
        self.round += 1;
        let transcript = if faults.colluding.is_empty() {
            None
        } else {
            let pos = match self.transcripts.iter().position(|t| t.coalition == faults.colluding) {
                Some(p) => p,
                None => {
                    self.transcripts.push(CollusionTranscript::new(faults.colluding.clone()));
                    self.transcripts.len() - 1
                }
            };
            Some(&mut self.transcripts[pos])
        };
        let name = self.drivers[driver].id.clone();
        let mut servers = SimServers {
            network: &self.network,
            layout: self.layout,
            rows_per_stripe: self.params.rows_per_stripe(),
            faults: &faults,
            fault_rng: &mut self.fault_rng,
            trace: &mut self.trace,
            driver: &name,
            desired: usize::from(cell),
            transcript,
            download: 0,
            upload: 0,
            error: None,
        };
        let result = retrieve_cell(&mut servers, &self.params, &self.layout, usize::from(cell), &mut self.rng);
        if let Some(e) = servers.error.take() {
            return Err(e);
        }
        self.measured.download += servers.download;
        self.measured.upload += servers.upload;
        self.measured.retrievals += 1;
        let retrieved = result?;

        let truth: Vec<_> = self
            .network
            .node(LEADER)?
            .ledger()
            .column(cell)
            .iter()
            .enumerate()
            .filter(|(_, r)| !is_zero_row(r))
            .map(|(i, r)| (i, r.clone()))
            .collect();
        if retrieved.rows != truth {
            return Err(HarnessError::Invariant(format!("retrieval of cell {cell} disagrees with the ledger")));
        }
        let offers = retrieved
            .rows
            .iter()
            .map(|(i, r)| {
                ParkingOffer::from_row(r)?
                    .map(|o| (*i as u16, o))
                    .ok_or_else(|| HarnessError::Invariant("retrieved padding row".into()))
            })
            .collect::<Result<Vec<_>, HarnessError>>()?;
        self.drivers[driver].retrieved = offers.clone();
        Ok(offers)
    }

    /// Builds `driver`'s signed, encrypted request for the retrieved offer
    /// at `(cell, row)`; returns the PO index and request bytes.
    pub fn build_request(&mut self, driver: usize, cell: u16, row: u16) -> Result<(usize, Vec<u8>), HarnessError> {
        let offer = self.drivers[driver]
            .retrieved
            .iter()
            .find(|(r, o)| *r == row && o.cell == cell)
            .map(|(_, o)| *o)
            .ok_or_else(|| HarnessError::Usage(format!("driver {} has not retrieved cell {cell} row {row}", driver + 1)))?;
        let po = self
            .pos
            .iter()
            .position(|p| p.operator.fingerprint() == offer.po_key)
            .ok_or_else(|| HarnessError::Invariant("offer names an unknown PO".into()))?;

        let cert = *self.pos[po].operator.certificate();
        let name = self.drivers[driver].id.clone();
        self.trace.record(&po_name(po), &name, "po_certificate", &[&cert.signing_key[..], &cert.encryption_key, &cert.kdc_signature].concat());
        cert.verify(&self.certifier.verifying_key())?;
        if cert.fingerprint() != offer.po_key {
            return Err(HarnessError::Invariant("PO certificate does not match the offer's PK_PO".into()));
        }

        let ephemeral = EphemeralKeypair::generate(&mut self.rng);
        let t_s = u64::from(offer.available_from);
        let t_p = PARKING_TIME.min(u64::from(offer.available_for));
        let plain = ReservationPlaintext { pk_d: ephemeral.public_bytes(), t_s, t_p };
        let ciphertext = reservation_encrypt(&cert.encryption_key, &plain, &mut self.rng);
        let message = ReservationRequest::signed_message(cell, row, &ciphertext);
        let d = &self.drivers[driver];
        let sig = randomized_sign(&d.credential, &message, &mut self.rng);
        let bytes = ReservationRequest { cell, row, ciphertext, signature: sig.to_bytes() }.to_bytes();

        let long_term = [P::encode_g1(&d.keys.public_key), P::encode_g1(&d.keys.gamma), d.id.as_bytes().to_vec()];
        if long_term.iter().any(|needle| bytes.windows(needle.len()).any(|w| w == needle.as_slice())) {
            return Err(HarnessError::Invariant(format!("{name}'s reservation request carries a long-term identifier")));
        }
        self.drivers[driver].booking = Some(Booking {
            po,
            offer: OfferId { po_key: offer.po_key, cell, row },
            ephemeral,
            handle: None,
            status: ReservationStatus::Pending,
        });
        Ok((po, bytes))
    }

    /// Hands request bytes to PO `po` and records its answer for `driver`.
    pub fn deliver_request(&mut self, driver: usize, po: usize, bytes: &[u8]) -> Result<PoReply, HarnessError> {
        let name = self.drivers[driver].id.clone();
        self.trace.record(&name, &po_name(po), "reservation_request", bytes);
        self.measured.reservation_request = bytes.len() as u64;
        let actor = &mut self.pos[po];
        let reply = actor.desk.handle::<P>(actor.operator.encryption_key(), &self.kdc.gpk, bytes);
        if let Some(b) = reply.to_bytes() {
            let kind = if matches!(reply, PoReply::Ack(_)) { "ack" } else { "nack" };
            self.trace.record(&po_name(po), &name, kind, &b);
        }
        if let Some(booking) = self.drivers[driver].booking.as_mut().filter(|b| b.po == po) {
            match reply {
                PoReply::Ack(h) => {
                    booking.handle = Some(h);
                    booking.status = ReservationStatus::Ack;
                }
                PoReply::Nack => booking.status = ReservationStatus::Nack,
                PoReply::Discarded => {}
            }
        }
        self.check_bookings()?;
        Ok(reply)
    }

    /// Attaches a down payment to an ACKed booking.
    pub fn confirm(&mut self, driver: usize) -> Result<ReservationStatus, HarnessError> {
        let mut token = [0u8; 32];
        self.rng.fill_bytes(&mut token);
        let booking = self.drivers[driver].booking.clone().ok_or_else(|| HarnessError::Usage("no booking".into()))?;
        let handle = match (booking.status, booking.handle) {
            (ReservationStatus::Ack, Some(h)) => h,
            (s, _) => return Ok(s),
        };
        self.payments.insert(token);
        let name = self.drivers[driver].id.clone();
        self.trace.record(&name, &po_name(booking.po), "down_payment", &[&handle.to_be_bytes()[..], &token].concat());
        if !self.payments.contains(&token) || !self.pos[booking.po].desk.confirm(handle, token) {
            return Err(HarnessError::Invariant("down payment was not accepted".into()));
        }
        self.drivers[driver].booking.as_mut().expect("booking exists").status = ReservationStatus::Confirmed;
        self.check_bookings()?;
        Ok(ReservationStatus::Confirmed)
    }

    /// Request, answer, and down payment on ACK.
    pub fn reserve(&mut self, driver: usize, cell: u16, row: u16) -> Result<ReservationStatus, HarnessError> {
        let (po, bytes) = self.build_request(driver, cell, row)?;
        match self.deliver_request(driver, po, &bytes)? {
            PoReply::Ack(_) => self.confirm(driver),
            PoReply::Nack => Ok(ReservationStatus::Nack),
            PoReply::Discarded => Err(HarnessError::Invariant("honest reservation request was discarded".into())),
        }
    }

    /// Tries each retrieved offer in order until one is confirmed.
    pub fn reserve_any(&mut self, driver: usize) -> Result<ReservationStatus, HarnessError> {
        let mut status = ReservationStatus::Nack;
        for (row, offer) in self.drivers[driver].retrieved.clone() {
            status = self.reserve(driver, offer.cell, row)?;
            if status == ReservationStatus::Confirmed {
                break;
            }
        }
        Ok(status)
    }

    /// A fresh arrival challenge `Γ` from the PO of `driver`'s booking.
    pub fn challenge(&mut self, driver: usize) -> Result<[u8; 32], HarnessError> {
        let booking = self.drivers[driver].booking.clone().ok_or_else(|| HarnessError::Usage("no booking".into()))?;
        let handle = booking.handle.ok_or_else(|| HarnessError::Usage("booking was never acknowledged".into()))?;
        let mut gamma = [0u8; 32];
        self.rng.fill_bytes(&mut gamma);
        self.pos[booking.po].desk.set_challenge(handle, gamma);
        let name = self.drivers[driver].id.clone();
        self.trace.record(&po_name(booking.po), &name, "challenge", &gamma);
        Ok(gamma)
    }

    pub fn sign_challenge(&self, driver: usize, gamma: &[u8]) -> Signature {
        let booking = self.drivers[driver].booking.as_ref().expect("booking exists");
        challenge_sign(booking.ephemeral.secret(), gamma)
    }

    /// The PO checks `sig` against the outstanding challenge and the `PK_D`
    /// sealed in the reservation; on success it admits the driver and
    /// invalidates (and, if spaces remain, republishes) the offer.
    pub fn respond(&mut self, driver: usize, sig: &Signature) -> Result<ReservationStatus, HarnessError> {
        let booking = self.drivers[driver].booking.clone().ok_or_else(|| HarnessError::Usage("no booking".into()))?;
        let handle = booking.handle.ok_or_else(|| HarnessError::Usage("booking was never acknowledged".into()))?;
        let name = self.drivers[driver].id.clone();
        self.trace.record(&name, &po_name(booking.po), "challenge_response", &sig.to_bytes());
        self.measured.arrival_exchange = 32 + 64;

        let desk = &mut self.pos[booking.po].desk;
        let gamma = desk.take_challenge(handle);
        let record = &desk.records[handle as usize];
        let (Some(gamma), ReservationStatus::Confirmed) = (gamma, record.status) else {
            return Ok(record.status);
        };
        let pk: [u8; 32] = record.pk_d.as_slice().try_into().map_err(|_| HarnessError::Invariant("bad PK_D".into()))?;
        if challenge_verify(&pk, &gamma, sig).is_err() {
            return Ok(ReservationStatus::Confirmed);
        }
        desk.records[handle as usize].status = ReservationStatus::Arrived;
        self.drivers[driver].booking.as_mut().expect("booking exists").status = ReservationStatus::Arrived;

        let mut token = [0u8; 32];
        self.rng.fill_bytes(&mut token);
        self.payments.insert(token);
        self.trace.record(&name, &po_name(booking.po), "final_payment", &token);

        let (id, offer) = self.pos[booking.po]
            .desk
            .offer(booking.offer.cell, booking.offer.row)
            .ok_or_else(|| HarnessError::Invariant("booked offer is no longer live".into()))?;
        let operator = &self.pos[booking.po].operator;
        let mut txs = vec![operator.invalidate(id.row, offer)];
        if offer.available > 1 {
            txs.push(operator.publish(ParkingOffer { available: offer.available - 1, ..offer }));
        }
        let results = self.submit(&po_name(booking.po), txs);
        let mut committed = results.iter().map(|r| matches!(r, Ok(Admission::Committed { .. })));
        if !committed.all(|c| c) {
            if let Some(Err(e)) = results.into_iter().find(Result::is_err) {
                return Err(e);
            }
            return Ok(ReservationStatus::Arrived);
        }
        if let Some(Ok(Admission::Committed { row, .. })) = results.get(1) {
            let moved = OfferId { row: *row, ..id };
            for r in self.pos[booking.po].desk.records.iter_mut().filter(|r| r.offer == id && r.status.holds()) {
                r.offer = moved;
            }
        }
        self.pos[booking.po].desk.records[handle as usize].status = ReservationStatus::Completed;
        self.drivers[driver].booking.as_mut().expect("booking exists").status = ReservationStatus::Completed;
        self.check_replicas()?;
        self.check_bookings()?;
        Ok(ReservationStatus::Completed)
    }

    /// Challenge, signature and admission.
    pub fn arrive(&mut self, driver: usize) -> Result<ReservationStatus, HarnessError> {
        let gamma = self.challenge(driver)?;
        let sig = self.sign_challenge(driver, &gamma);
        self.respond(driver, &sig)
    }

    pub fn report(&self) -> OverheadReport {
        let m = &self.measured;
        let capacity = self.config.cell_capacity as u64;
        let stripes = self.layout.stripes(self.params.rows_per_stripe()) as u64;
        let upload_per = stripes * self.config.n as u64 * wire::payload_bytes(self.params.query_len()) as u64;
        OverheadReport {
            retrievals: m.retrievals,
            retrieval_download_bytes: m.download,
            retrieval_upload_bytes: m.upload,
            reservation_request_bytes: m.reservation_request,
            arrival_exchange_bytes: m.arrival_exchange,
            analytic_download_bytes: pir_download_bytes(&self.params, capacity) * Ratio::from_integer(m.retrievals),
            analytic_upload_bytes: upload_per * m.retrievals,
            analytic_reservation_bytes: SizeTable::default().reservation_bytes(),
            retrieval_rate: retrieval_rate(&self.params),
            trivial_bytes: trivial_download_bytes(self.config.cells as u64, capacity),
        }
    }

    pub fn finish(self) -> ScenarioOutput {
        let report = self.report();
        ScenarioOutput {
            ledger: self.network.node(LEADER).expect("leader exists").ledger().clone(),
            report,
            records: self.pos.iter().flat_map(|p| p.desk.records.clone()).collect(),
            driver_status: self.drivers.iter().map(|d| d.booking.as_ref().map(|b| b.status)).collect(),
            transcripts: self.transcripts,
            trace: self.trace,
        }
    }

    /// All five phases for every driver in turn.
    pub fn run(mut self) -> Result<(ScenarioOutput, u64), HarnessError> {
        self.publish_initial_offers()?;
        for driver in 0..self.drivers.len() {
            let cells = self.occupied_cells();
            let Some(&cell) = cells.choose(&mut self.rng) else {
                break;
            };
            self.retrieve(driver, cell)?;
            if self.reserve_any(driver)? == ReservationStatus::Confirmed {
                self.arrive(driver)?;
            }
            self.check_replicas()?;
            self.check_bookings()?;
        }
        let height = self.network.height();
        Ok((self.finish(), height))
    }
}

/// Runs a full scenario on the configured backend; also returns the final
/// ledger height.
pub fn run_scenario(config: &ScenarioConfig) -> Result<(ScenarioOutput, u64), HarnessError> {
    match config.backend {
        Backend::Bls12_381 => Simulation::<Bls12>::new(config.clone())?.run(),
        Backend::Toy => Simulation::<ToyPairing>::new(config.clone())?.run(),
    }
}

fn sample_request<P: Pairing>() -> Result<usize, HarnessError> {
    let config = ScenarioConfig {
        n: 5,
        t: 1,
        b: 1,
        r: 1,
        cells: 1,
        cell_capacity: 1,
        num_pos: 1,
        num_drivers: 1,
        offers_per_po: 1,
        max_slots: 1,
        rng_seed: 0,
        channel_rate_bps: 10_000_000,
        backend: Backend::default(),
        faults: FaultPlan::default(),
        round_faults: Vec::new(),
    };
    let mut sim = Simulation::<P>::new(config)?;
    sim.publish_initial_offers()?;
    sim.retrieve(0, 1)?;
    let (_, bytes) = sim.build_request(0, 1, 0)?;
    Ok(bytes.len())
}

/// Wire size of one honest reservation request on `backend`.
pub fn sample_request_bytes(backend: Backend) -> Result<usize, HarnessError> {
    match backend {
        Backend::Bls12_381 => sample_request::<Bls12>(),
        Backend::Toy => sample_request::<ToyPairing>(),
    }
}
