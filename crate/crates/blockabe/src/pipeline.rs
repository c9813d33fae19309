//! Deterministic simulation and measurement of the overlapped
//! encrypt→transmit and transmit→decrypt pipelines, the analytic timing
//! model, and benchmark sweeps against a monolithic single-ciphertext
//! baseline.
//!
//! The two-stage makespan is computed exactly with the classic flow-shop
//! recurrence; the closed-form approximations (first-stage-time + total
//! second stage, and vice versa) hold within one maximum stage time and are
//! asserted as bounds, not equalities.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::{CryptoRng, RngCore};
use rand_chacha::ChaCha20Rng;
use rand::SeedableRng;

use crate::abe::{
    self, AttributeKey, CiphertextBlock, DecryptPath, Manifest, MasterKey, PublicParams,
};
use crate::dem;
use crate::error::{Error, Result};
use crate::pairing::{hash_to_group, Scalar, SourceElement, SOURCE_BYTES};
use crate::policy::{self, AccessTree};
use crate::sharing;

// ---------------------------------------------------------------------------
// Channel and cost models
// ---------------------------------------------------------------------------

/// Simulated link parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelModel {
    /// Bytes per second; must be positive.
    pub bandwidth: f64,
    /// Fixed per-transmission latency in seconds.
    pub latency: f64,
    /// Framing overhead added to every transmission.
    pub per_block_overhead: u64,
}

impl ChannelModel {
    pub fn new(bandwidth: f64, latency: f64) -> Self {
        assert!(bandwidth > 0.0, "bandwidth must be positive");
        assert!(latency >= 0.0, "latency cannot be negative");
        ChannelModel { bandwidth, latency, per_block_overhead: 0 }
    }

    /// TT for one transmission of `bytes`.
    pub fn transmit_time(&self, bytes: u64) -> f64 {
        self.latency + (bytes + self.per_block_overhead) as f64 / self.bandwidth
    }
}

/// Deterministic stage-time model used by the simulated clock; the constants
/// approximate release-build pairing arithmetic on commodity hardware.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModel {
    pub encrypt_block_base: f64,
    pub encrypt_per_leaf: f64,
    pub decrypt_block_base: f64,
    pub decrypt_per_leaf: f64,
    pub per_byte: f64,
    /// att_check + integrity on the manifest.
    pub check: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel {
            encrypt_block_base: 3e-3,
            encrypt_per_leaf: 4e-3,
            decrypt_block_base: 2e-3,
            decrypt_per_leaf: 6e-3,
            per_byte: 2e-9,
            check: 1e-3,
        }
    }
}

impl CostModel {
    pub fn encrypt_time(&self, leaves: usize, bytes: usize) -> f64 {
        self.encrypt_block_base + self.encrypt_per_leaf * leaves as f64 + self.per_byte * bytes as f64
    }

    pub fn decrypt_time(&self, leaves: usize, bytes: usize) -> f64 {
        self.decrypt_block_base + self.decrypt_per_leaf * leaves as f64 + self.per_byte * bytes as f64
    }
}

/// Where per-block stage times come from in a simulated run.
#[derive(Debug, Clone)]
pub enum TimingSource {
    /// Wall-clock measurement of the real cryptographic work.
    Measured,
    /// The deterministic cost model (reproducible traces and CSV).
    Modeled(CostModel),
    /// Explicit per-block times.
    Injected(Vec<f64>),
}

/// Simulated single-threaded clock, or one real worker per stage connected
/// by a bounded buffer.
#[derive(Debug, Clone)]
pub enum ClockMode {
    Simulated(TimingSource),
    Real { buffer: usize },
}

// ---------------------------------------------------------------------------
// Stage times and analytic totals
// ---------------------------------------------------------------------------

/// Per-block ET_i, TT_i, DT_i.
#[derive(Debug, Clone, PartialEq)]
pub struct StageTimes {
    pub encrypt: Vec<f64>,
    pub transmit: Vec<f64>,
    pub decrypt: Vec<f64>,
}

impl StageTimes {
    pub fn n(&self) -> usize {
        self.encrypt.len()
    }

    fn validate(&self) -> Result<()> {
        if self.encrypt.len() != self.transmit.len() || self.transmit.len() != self.decrypt.len() {
            return Err(Error::InvalidInput("stage-time vectors differ in length".into()));
        }
        if self.encrypt.is_empty() {
            return Err(Error::InvalidInput("need at least one block".into()));
        }
        Ok(())
    }
}

/// Sequential baselines, exact pipelined makespans and the savings ΔT.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineTotals {
    pub sequential_enc_tx: f64,
    pub sequential_tx_dec: f64,
    pub pipelined_enc_tx: f64,
    pub pipelined_tx_dec: f64,
    pub delta_enc: f64,
    pub delta_dec: f64,
}

/// Exact two-stage flow-shop makespan for a fixed block order.
pub fn two_stage_makespan(a: &[f64], b: &[f64]) -> f64 {
    two_stage_schedule(a, b, 0.0).1.last().map_or(0.0, |w| w.end)
}

/// One start/end window on the simulated clock.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageWindow {
    pub start: f64,
    pub end: f64,
}

/// Per-block windows for both stages; stage 2 becomes available at
/// `b_ready` (manifest-first transmission uses this).
pub fn two_stage_schedule(a: &[f64], b: &[f64], b_ready: f64) -> (Vec<StageWindow>, Vec<StageWindow>) {
    assert_eq!(a.len(), b.len());
    let mut first = Vec::with_capacity(a.len());
    let mut second = Vec::with_capacity(a.len());
    let mut a_clock = 0.0f64;
    let mut b_clock = b_ready;
    for (&ai, &bi) in a.iter().zip(b) {
        let a_start = a_clock;
        a_clock += ai;
        first.push(StageWindow { start: a_start, end: a_clock });
        let b_start = b_clock.max(a_clock);
        b_clock = b_start + bi;
        second.push(StageWindow { start: b_start, end: b_clock });
    }
    (first, second)
}

/// Totals per the timing model: sequential sums, exact pipelined makespans
/// and their differences.
pub fn analytic_totals(times: &StageTimes) -> Result<PipelineTotals> {
    times.validate()?;
    let et: f64 = times.encrypt.iter().sum();
    let tt: f64 = times.transmit.iter().sum();
    let dt: f64 = times.decrypt.iter().sum();
    let sequential_enc_tx = et + tt;
    let sequential_tx_dec = tt + dt;
    let pipelined_enc_tx = two_stage_makespan(&times.encrypt, &times.transmit);
    let pipelined_tx_dec = two_stage_makespan(&times.transmit, &times.decrypt);
    Ok(PipelineTotals {
        sequential_enc_tx,
        sequential_tx_dec,
        pipelined_enc_tx,
        pipelined_tx_dec,
        delta_enc: sequential_enc_tx - pipelined_enc_tx,
        delta_dec: sequential_tx_dec - pipelined_tx_dec,
    })
}

// ---------------------------------------------------------------------------
// Traces
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Encrypt,
    Transmit,
    Decrypt,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Stage::Encrypt => write!(f, "encrypt"),
            Stage::Transmit => write!(f, "transmit"),
            Stage::Decrypt => write!(f, "decrypt"),
        }
    }
}

/// One stage occupancy; block 0 is the manifest (and the pre-decryption
/// checks on the receiving side).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEvent {
    pub block: u32,
    pub stage: Stage,
    pub start: f64,
    pub end: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineTrace {
    pub events: Vec<TraceEvent>,
    /// T_1: completion time of the overlapped schedule.
    pub pipelined_makespan: f64,
    /// T_2: the strictly sequential baseline over the same stage times.
    pub sequential_makespan: f64,
}

impl PipelineTrace {
    /// Line-delimited `block,stage,start,end` records.
    pub fn records(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&format!("{},{},{:.9},{:.9}\n", e.block, e.stage, e.start, e.end));
        }
        out
    }

    /// Assert the schedule's precedence constraints: stages process blocks
    /// in index order and a block never enters a stage before leaving the
    /// previous one.
    pub fn validate(&self) -> Result<()> {
        let eps = 1e-9;
        for stage in [Stage::Encrypt, Stage::Transmit, Stage::Decrypt] {
            let mut in_stage: Vec<&TraceEvent> =
                self.events.iter().filter(|e| e.stage == stage).collect();
            in_stage.sort_by_key(|e| e.block);
            for pair in in_stage.windows(2) {
                if pair[1].start + eps < pair[0].end {
                    return Err(Error::InvalidInput(format!(
                        "stage {stage} overlaps blocks {} and {}",
                        pair[0].block, pair[1].block
                    )));
                }
            }
        }
        for e in &self.events {
            if e.end + eps < e.start {
                return Err(Error::InvalidInput(format!(
                    "event for block {} ends before it starts",
                    e.block
                )));
            }
        }
        let order = [Stage::Encrypt, Stage::Transmit, Stage::Decrypt];
        for block in self.events.iter().map(|e| e.block).collect::<BTreeSet<_>>() {
            let mut last_end = f64::NEG_INFINITY;
            for stage in order {
                if let Some(e) =
                    self.events.iter().find(|e| e.block == block && e.stage == stage)
                {
                    if e.start + eps < last_end {
                        return Err(Error::InvalidInput(format!(
                            "block {block} enters {stage} before leaving the previous stage"
                        )));
                    }
                    last_end = e.end;
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Encrypt → transmit runs
// ---------------------------------------------------------------------------

#[derive(Debug)]
pub struct EncryptRun {
    pub trace: PipelineTrace,
    pub manifest: Manifest,
    pub blocks: Vec<CiphertextBlock>,
    pub stage_times: StageTimes,
}

fn manifest_wire_len(manifest: &Manifest) -> u64 {
    manifest.to_bytes().len() as u64
}

/// Drive the block stream through the two-stage encrypt→transmit schedule.
/// The manifest goes over the link first; block i+1 seals while block i is
/// in flight.
pub fn run_encrypt_transmit<R: RngCore + CryptoRng>(
    pk: &PublicParams,
    mk: &MasterKey,
    message: &[u8],
    tree: &AccessTree,
    channel: &ChannelModel,
    clock: &ClockMode,
    rng: &mut R,
) -> Result<EncryptRun> {
    match clock {
        ClockMode::Simulated(timing) => {
            let mut session = abe::EncryptSession::new(pk, mk, message, tree, rng)?;
            let manifest = session.manifest().clone();
            let mut blocks = Vec::with_capacity(session.block_count());
            let mut et = Vec::with_capacity(session.block_count());
            let mut idx = 0usize;
            while let Some(next) = session.next_block() {
                let begin = Instant::now();
                let block = next?;
                let measured = begin.elapsed().as_secs_f64();
                let cost = match timing {
                    TimingSource::Measured => measured,
                    TimingSource::Modeled(model) => {
                        model.encrypt_time(block.leaf_components.len(), block.payload.len())
                    }
                    TimingSource::Injected(values) => {
                        *values.get(idx).ok_or_else(|| {
                            Error::InvalidInput("injected encrypt times too short".into())
                        })?
                    }
                };
                et.push(cost);
                blocks.push(block);
                idx += 1;
            }
            let tt: Vec<f64> = manifest
                .block_spans
                .iter()
                .map(|s| channel.transmit_time(s.len))
                .collect();
            let manifest_tt = channel.transmit_time(manifest_wire_len(&manifest));

            let (enc_windows, tx_windows) = two_stage_schedule(&et, &tt, manifest_tt);
            let mut events = vec![TraceEvent {
                block: 0,
                stage: Stage::Transmit,
                start: 0.0,
                end: manifest_tt,
            }];
            for (i, (e, t)) in enc_windows.iter().zip(&tx_windows).enumerate() {
                events.push(TraceEvent {
                    block: (i + 1) as u32,
                    stage: Stage::Encrypt,
                    start: e.start,
                    end: e.end,
                });
                events.push(TraceEvent {
                    block: (i + 1) as u32,
                    stage: Stage::Transmit,
                    start: t.start,
                    end: t.end,
                });
            }
            let pipelined = tx_windows.last().map_or(manifest_tt, |w| w.end);
            let sequential =
                manifest_tt + et.iter().sum::<f64>() + tt.iter().sum::<f64>();
            let stage_times = StageTimes {
                decrypt: vec![0.0; et.len()],
                encrypt: et,
                transmit: tt,
            };
            let trace = PipelineTrace {
                events,
                pipelined_makespan: pipelined,
                sequential_makespan: sequential,
            };
            trace.validate()?;
            Ok(EncryptRun { trace, manifest, blocks, stage_times })
        }
        ClockMode::Real { buffer } => {
            run_encrypt_transmit_real(pk, mk, message, tree, channel, *buffer, rng)
        }
    }
}

/// One worker per stage: the sealing thread hands blocks to a transmitter
/// thread over a bounded buffer; the transmitter sleeps for each block's
/// modeled link occupancy. Timestamps are wall-clock.
fn run_encrypt_transmit_real<R: RngCore + CryptoRng>(
    pk: &PublicParams,
    mk: &MasterKey,
    message: &[u8],
    tree: &AccessTree,
    channel: &ChannelModel,
    buffer: usize,
    rng: &mut R,
) -> Result<EncryptRun> {
    use std::sync::mpsc;

    let mut session = abe::EncryptSession::new(pk, mk, message, tree, rng)?;
    let manifest = session.manifest().clone();
    let manifest_tt = channel.transmit_time(manifest_wire_len(&manifest));
    let spans = manifest.block_spans.clone();
    let channel = *channel;

    let epoch = Instant::now();
    let (tx, rx) = mpsc::sync_channel::<(usize, CiphertextBlock)>(buffer.max(1));
    let transmitter = std::thread::spawn(move || {
        let mut events = vec![TraceEvent {
            block: 0,
            stage: Stage::Transmit,
            start: 0.0,
            end: manifest_tt,
        }];
        std::thread::sleep(std::time::Duration::from_secs_f64(manifest_tt));
        let mut blocks = Vec::new();
        let mut tt = Vec::new();
        while let Ok((i, block)) = rx.recv() {
            let start = epoch.elapsed().as_secs_f64();
            let cost = channel.transmit_time(spans[i].len);
            std::thread::sleep(std::time::Duration::from_secs_f64(cost));
            events.push(TraceEvent {
                block: (i + 1) as u32,
                stage: Stage::Transmit,
                start,
                end: epoch.elapsed().as_secs_f64(),
            });
            tt.push(cost);
            blocks.push(block);
        }
        (events, blocks, tt)
    });

    let mut enc_events = Vec::new();
    let mut et = Vec::new();
    let mut i = 0usize;
    while let Some(next) = session.next_block() {
        let start = epoch.elapsed().as_secs_f64();
        let block = next?;
        let end = epoch.elapsed().as_secs_f64();
        enc_events.push(TraceEvent { block: (i + 1) as u32, stage: Stage::Encrypt, start, end });
        et.push(end - start);
        tx.send((i, block)).expect("transmitter lives until the channel closes");
        i += 1;
    }
    drop(tx);
    let (mut events, blocks, tt) = transmitter.join().expect("transmitter thread");
    events.extend(enc_events);
    events.sort_by(|a, b| a.block.cmp(&b.block).then(a.start.total_cmp(&b.start)));
    let pipelined = events
        .iter()
        .filter(|e| e.stage == Stage::Transmit)
        .map(|e| e.end)
        .fold(0.0f64, f64::max);
    let sequential = manifest_tt + et.iter().sum::<f64>() + tt.iter().sum::<f64>();
    let stage_times =
        StageTimes { decrypt: vec![0.0; et.len()], encrypt: et, transmit: tt };
    let trace =
        PipelineTrace { events, pipelined_makespan: pipelined, sequential_makespan: sequential };
    Ok(EncryptRun { trace, manifest, blocks, stage_times })
}

// ---------------------------------------------------------------------------
// Transmit → decrypt runs
// ---------------------------------------------------------------------------

#[derive(Debug)]
pub struct DecryptRun {
    pub trace: PipelineTrace,
    pub message: Vec<u8>,
    pub stage_times: StageTimes,
}

/// Simulate the receiving side: the manifest arrives first and funds the
/// attribute and integrity checks, then block i decrypts while block i+1 is
/// in flight. Dependency stalls (a block waiting for components or for its
/// parent's payload) appear as gaps in the decrypt lane.
pub fn run_transmit_decrypt(
    manifest: &Manifest,
    blocks: &[CiphertextBlock],
    sk: &AttributeKey,
    channel: &ChannelModel,
    clock: &ClockMode,
) -> Result<DecryptRun> {
    let timing = match clock {
        ClockMode::Simulated(t) => t.clone(),
        ClockMode::Real { .. } => TimingSource::Measured,
    };

    let check_begin = Instant::now();
    let outcome = abe::decrypt_with_report(manifest, blocks.to_vec(), sk)?;
    let measured_total = check_begin.elapsed().as_secs_f64();

    let n = manifest.n as usize;
    let dt: Vec<f64> = match &timing {
        TimingSource::Measured => outcome.reports.iter().map(|r| r.seconds).collect(),
        TimingSource::Modeled(model) => outcome
            .reports
            .iter()
            .map(|r| {
                let leaves = blocks[(r.index - 1) as usize].leaf_components.len();
                model.decrypt_time(leaves, blocks[(r.index - 1) as usize].payload.len())
            })
            .collect(),
        TimingSource::Injected(values) => {
            if values.len() < n {
                return Err(Error::InvalidInput("injected decrypt times too short".into()));
            }
            values[..n].to_vec()
        }
    };
    let check = match &timing {
        TimingSource::Measured => (measured_total - dt.iter().sum::<f64>()).max(0.0),
        TimingSource::Modeled(model) => model.check,
        TimingSource::Injected(_) => 0.0,
    };

    let manifest_tt = channel.transmit_time(manifest_wire_len(manifest));
    let tt: Vec<f64> =
        manifest.block_spans.iter().map(|s| channel.transmit_time(s.len)).collect();

    // transmissions are serialized behind the manifest
    let mut tx_windows = Vec::with_capacity(n);
    let mut clock_tx = manifest_tt;
    for &t in &tt {
        tx_windows.push(StageWindow { start: clock_tx, end: clock_tx + t });
        clock_tx += t;
    }

    // decrypt lane: in block order, gated by arrivals and dependencies
    let mut events = vec![
        TraceEvent { block: 0, stage: Stage::Transmit, start: 0.0, end: manifest_tt },
        TraceEvent { block: 0, stage: Stage::Decrypt, start: manifest_tt, end: manifest_tt + check },
    ];
    let mut dec_end = vec![0.0f64; n + 1];
    let mut lane = manifest_tt + check;
    for (i, report) in outcome.reports.iter().enumerate() {
        let arrival = |b: u32| tx_windows[(b - 1) as usize].end;
        // ABE stalls until every touched block has arrived; SYM stalls until
        // the parent block's payload has been opened.
        let dep = match report.path {
            DecryptPath::Abe => {
                report.blocks_touched.iter().map(|&b| arrival(b)).fold(0.0f64, f64::max)
            }
            DecryptPath::Sym { parent } => dec_end[parent as usize],
        };
        let start = lane.max(arrival(report.index)).max(dep);
        let end = start + dt[i];
        events.push(TraceEvent {
            block: report.index,
            stage: Stage::Transmit,
            start: tx_windows[i].start,
            end: tx_windows[i].end,
        });
        events.push(TraceEvent { block: report.index, stage: Stage::Decrypt, start, end });
        dec_end[report.index as usize] = end;
        lane = end;
    }

    let pipelined = lane;
    let sequential =
        manifest_tt + check + tt.iter().sum::<f64>() + dt.iter().sum::<f64>();
    let stage_times = StageTimes { encrypt: vec![0.0; n], transmit: tt, decrypt: dt };
    let trace =
        PipelineTrace { events, pipelined_makespan: pipelined, sequential_makespan: sequential };
    trace.validate()?;
    Ok(DecryptRun { trace, message: outcome.message, stage_times })
}

// ---------------------------------------------------------------------------
// Benchmark sweeps
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepDimension {
    Size,
    Leaves,
    Blocks,
}

impl std::fmt::Display for SweepDimension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SweepDimension::Size => write!(f, "size"),
            SweepDimension::Leaves => write!(f, "leaves"),
            SweepDimension::Blocks => write!(f, "blocks"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub dimension: SweepDimension,
    /// Message sizes in MiB for the size sweep.
    pub sizes_mib: Vec<u64>,
    pub leaf_counts: Vec<u32>,
    pub block_counts: Vec<u32>,
    pub fixed_size_mib: u64,
    pub fixed_leaves: u32,
    pub fixed_gates: u32,
    pub channel: ChannelModel,
    pub cost: CostModel,
    pub measured: bool,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            dimension: SweepDimension::Size,
            sizes_mib: vec![1, 2, 4, 8, 16],
            leaf_counts: vec![32, 64, 96, 128],
            block_counts: vec![1, 2, 4, 8],
            fixed_size_mib: 16,
            fixed_leaves: 96,
            fixed_gates: 10,
            channel: ChannelModel::new(10.0 * 1024.0 * 1024.0, 0.020),
            cost: CostModel::default(),
            measured: false,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub dimension: SweepDimension,
    pub value: u64,
    pub scheme: &'static str,
    pub total_seconds: f64,
    pub fill_seconds: f64,
    pub drain_seconds: f64,
}

pub const CSV_HEADER: &str = "dimension,value,scheme,total_seconds,fill_seconds,drain_seconds";

/// Fixed-precision CSV so identical seeds give identical bytes.
pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{:.9},{:.9},{:.9}\n",
            r.dimension, r.value, r.scheme, r.total_seconds, r.fill_seconds, r.drain_seconds
        ));
    }
    out
}

/// The single-ciphertext baseline: the whole tree in one block, no chaining.
#[derive(Debug, Clone)]
pub struct MonolithicCiphertext {
    pub c_prime: SourceElement,
    /// (leaf node id order) Ĉ_y, Ĉ'_y for every leaf of the whole tree.
    pub leaf_components: Vec<(SourceElement, SourceElement)>,
    pub payload: Vec<u8>,
}

impl MonolithicCiphertext {
    pub fn wire_len(&self) -> u64 {
        (SOURCE_BYTES + self.leaf_components.len() * 2 * SOURCE_BYTES + 4 + self.payload.len())
            as u64
    }
}

/// Encrypt a message as one ciphertext over the full tree: the classic
/// single-ciphertext CP-ABE structure the partitioned scheme collapses to
/// at n = 1.
pub fn encrypt_monolithic<R: RngCore + CryptoRng>(
    pk: &PublicParams,
    message: &[u8],
    tree: &AccessTree,
    rng: &mut R,
) -> Result<(MonolithicCiphertext, Scalar)> {
    let s = Scalar::random(rng);
    let shares = sharing::assign_shares(tree, s, rng);
    let mask = pk.a_t.exp(&s);
    let key = dem::derive_key(&mask, 0, b"monolithic");
    let payload = dem::seal(&key, message);
    let leaf_components = tree
        .node_ids()
        .filter_map(|id| {
            let node = tree.node(id);
            node.attribute().map(|attribute| {
                let share = shares.share(id).expect("all nodes hold shares");
                (pk.g.exp(&share), hash_to_group(attribute.as_bytes()).exp(&share))
            })
        })
        .collect();
    Ok((
        MonolithicCiphertext {
            c_prime: pk.h.exp(&s),
            leaf_components,
            payload,
        },
        s,
    ))
}

/// Run the configured sweep: for every point, both the partitioned scheme
/// and the monolithic baseline under the same channel and cost model.
pub fn benchmark_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    match config.dimension {
        SweepDimension::Leaves => {
            let need = config.fixed_gates.saturating_sub(1).max(1);
            if config.leaf_counts.iter().any(|&l| l < need) {
                return Err(Error::InvalidInput(format!(
                    "leaf counts must be at least {need} for {} gates",
                    config.fixed_gates
                )));
            }
        }
        SweepDimension::Blocks => {
            if config.block_counts.iter().any(|&b| {
                config.fixed_leaves < b.saturating_sub(1).max(1)
            }) {
                return Err(Error::InvalidInput(format!(
                    "{} fixed leaves cannot fill every swept block count",
                    config.fixed_leaves
                )));
            }
        }
        SweepDimension::Size => {
            if config.sizes_mib.is_empty() || config.fixed_leaves == 0 {
                return Err(Error::InvalidInput("empty size sweep".into()));
            }
        }
    }
    let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
    let (pk, mk) = abe::setup(abe::SecurityLevel::Standard128, &mut rng);

    let points: Vec<u64> = match config.dimension {
        SweepDimension::Size => config.sizes_mib.clone(),
        SweepDimension::Leaves => config.leaf_counts.iter().map(|&l| l as u64).collect(),
        SweepDimension::Blocks => config.block_counts.iter().map(|&b| b as u64).collect(),
    };

    let mut rows = Vec::with_capacity(points.len() * 2);
    for &value in &points {
        let (tree, message_len) = match config.dimension {
            SweepDimension::Size => (
                policy::synth::chain_tree(config.fixed_gates, config.fixed_leaves),
                value as usize * 1024 * 1024,
            ),
            SweepDimension::Leaves => (
                policy::synth::star_tree(config.fixed_gates, value as u32),
                config.fixed_size_mib as usize * 1024 * 1024,
            ),
            SweepDimension::Blocks => (
                policy::synth::star_tree(value as u32, config.fixed_leaves),
                config.fixed_size_mib as usize * 1024 * 1024,
            ),
        };
        let mut message = vec![0u8; message_len];
        rng.fill_bytes(&mut message);

        let timing = if config.measured {
            TimingSource::Measured
        } else {
            TimingSource::Modeled(config.cost)
        };
        let run = run_encrypt_transmit(
            &pk,
            &mk,
            &message,
            &tree,
            &config.channel,
            &ClockMode::Simulated(timing),
            &mut rng,
        )?;
        let fill = run
            .trace
            .events
            .iter()
            .filter(|e| e.stage == Stage::Transmit && e.block > 0)
            .map(|e| e.start)
            .fold(f64::INFINITY, f64::min);
        let last_encrypt_end = run
            .trace
            .events
            .iter()
            .filter(|e| e.stage == Stage::Encrypt)
            .map(|e| e.end)
            .fold(0.0f64, f64::max);
        rows.push(SweepRow {
            dimension: config.dimension,
            value,
            scheme: "partitioned",
            total_seconds: run.trace.pipelined_makespan,
            fill_seconds: fill,
            drain_seconds: run.trace.pipelined_makespan - last_encrypt_end,
        });

        // monolithic baseline: one sequential encryption + one transmission
        let begin = Instant::now();
        let (mono, _s) = encrypt_monolithic(&pk, &message, &tree, &mut rng)?;
        let et_mono = if config.measured {
            begin.elapsed().as_secs_f64()
        } else {
            config.cost.encrypt_time(tree.attributes().len(), mono.payload.len())
        };
        let tt_mono = config.channel.transmit_time(mono.wire_len());
        rows.push(SweepRow {
            dimension: config.dimension,
            value,
            scheme: "monolithic-baseline",
            total_seconds: et_mono + tt_mono,
            fill_seconds: et_mono,
            drain_seconds: tt_mono,
        });
    }
    Ok(rows)
}
