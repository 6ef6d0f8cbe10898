//! The two-channel transmission game: Alice sends `L` classical bits `p` and
//! `M` qubits `θ`; Bob runs `p` to get a circuit `(V, M)` and outputs
//! `V|θ0…⟩`. Cost is `L + M - log |⟨ψ|ψ'⟩|²`.

use serde::Serialize;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::machine::{combined_aux, k_hat, run, HaltingApprox, Outcome, UniverseSnapshot};
use crate::numeric::{within_log_bound, NegLog};
use crate::quantum::{best_input_overlap, fidelity, pad_and_apply, Circuit, PureState};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strategy {
    pub program: BitString,
    /// Quantum payload; `None` leaves the channel empty.
    pub theta: Option<PureState>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostReport {
    pub l: usize,
    pub m: usize,
    pub f: NegLog,
    pub strategy: Strategy,
}

impl CostReport {
    /// `L + M + F`, recomputed from the components.
    pub fn total(&self) -> NegLog {
        self.f.plus_bits((self.l + self.m) as i64)
    }

    pub fn classical_only(&self) -> bool {
        self.m == 0
    }
}

fn circuit_of(program: &BitString, snap: &UniverseSnapshot) -> Result<Circuit> {
    match run(program, &BitString::new(), snap.config().steps) {
        Outcome::Halted { output, .. } => Circuit::decode(&output).map_err(|_| Error::DecodeFailure),
        _ => Err(Error::DecodeFailure),
    }
}

/// Runs Bob's side and scores the result.
pub fn evaluate(psi: &PureState, strategy: &Strategy, snap: &UniverseSnapshot) -> Result<CostReport> {
    let circuit = circuit_of(&strategy.program, snap)?;
    if circuit.qubits() != psi.qubits() {
        return Err(Error::DimensionMismatch {
            expected: psi.qubits(),
            found: circuit.qubits(),
        });
    }
    let theta = strategy.theta.clone().unwrap_or_else(|| PureState::zero_state(0));
    let out = pad_and_apply(&circuit, &theta)?;
    Ok(CostReport {
        l: strategy.program.len(),
        m: circuit.inputs(),
        f: NegLog::of(fidelity(psi, &out)?),
        strategy: strategy.clone(),
    })
}

/// Circuits on `N` qubits among the snapshot's outputs on the empty
/// auxiliary string, each with its shortest program, in ξ order of the
/// program.
#[derive(Clone, Debug)]
pub struct StrategyPool {
    qubits: usize,
    entries: Vec<(BitString, Circuit)>,
}

impl StrategyPool {
    pub fn from_snapshot(snap: &UniverseSnapshot, qubits: usize) -> Self {
        let mut entries: Vec<(BitString, Circuit)> = snap
            .outputs(0)
            .into_iter()
            .filter_map(|(out, stats)| {
                let c = Circuit::decode(out).ok()?;
                (c.qubits() == qubits).then(|| (stats.shortest.clone(), c))
            })
            .collect();
        entries.sort_by(|a, b| a.0.xi_cmp(&b.0));
        Self { qubits, entries }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn entries(&self) -> &[(BitString, Circuit)] {
        &self.entries
    }
}

/// Keeps the first strictly smaller total.
fn consider(best: &mut Option<CostReport>, cand: CostReport) {
    if cand.f.is_infinite() {
        return;
    }
    if best.as_ref().map_or(true, |b| cand.total() < b.total()) {
        *best = Some(cand);
    }
}

/// Best strategy with an empty quantum channel.
pub fn best_classical(psi: &PureState, pool: &StrategyPool) -> Result<CostReport> {
    let mut best = None;
    for (p, c) in pool.entries.iter().filter(|(_, c)| c.inputs() == 0) {
        let out = pad_and_apply(c, &PureState::zero_state(0))?;
        consider(
            &mut best,
            CostReport {
                l: p.len(),
                m: 0,
                f: NegLog::of(fidelity(psi, &out)?),
                strategy: Strategy {
                    program: p.clone(),
                    theta: None,
                },
            },
        );
    }
    best.ok_or(Error::NoValidStrategy)
}

/// Best strategy over all circuits, with the optimal `θ` for each.
pub fn best_mixed(psi: &PureState, pool: &StrategyPool) -> Result<CostReport> {
    let mut best = None;
    for (p, c) in &pool.entries {
        let (overlap, witness) = best_input_overlap(c, psi)?;
        let theta = (c.inputs() > 0).then(|| witness.state(c.inputs())).transpose()?;
        consider(
            &mut best,
            CostReport {
                l: p.len(),
                m: c.inputs(),
                f: NegLog::of(overlap),
                strategy: Strategy {
                    program: p.clone(),
                    theta,
                },
            },
        );
    }
    best.ok_or(Error::NoValidStrategy)
}

/// Constants of the gap bound `c₅·log(mixed + 2) + c₆` and the halting
/// information above which a state counts as exotic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GapConstants {
    pub c5: u32,
    pub c6: i64,
    pub exotic_info: i64,
}

/// `K̂(⟨ψ⟩) - K̂(⟨ψ⟩|⟨⟩Ĥ)` as read off a snapshot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HaltingInfo {
    Finite(i64),
    /// Described only with the halting bits.
    Unbounded,
    /// No description with the halting bits either.
    Unknown,
}

impl HaltingInfo {
    pub fn of(x: &BitString, snap: &UniverseSnapshot, halting: &HaltingApprox) -> Result<Self> {
        let empty = BitString::new();
        let plain = k_hat(x, &empty, snap)?.bits;
        let with = k_hat(x, &combined_aux(&empty, halting), snap)?.bits;
        Ok(match (plain, with) {
            (Some(p), Some(w)) => HaltingInfo::Finite(p as i64 - w as i64),
            (None, Some(_)) => HaltingInfo::Unbounded,
            (_, None) => HaltingInfo::Unknown,
        })
    }

    pub fn at_least(&self, threshold: i64) -> bool {
        match self {
            HaltingInfo::Finite(i) => *i >= threshold,
            HaltingInfo::Unbounded => true,
            HaltingInfo::Unknown => false,
        }
    }
}

impl std::fmt::Display for HaltingInfo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HaltingInfo::Finite(i) => write!(f, "{i}"),
            HaltingInfo::Unbounded => write!(f, "unbounded"),
            HaltingInfo::Unknown => write!(f, "unknown"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapRow {
    pub id: String,
    pub classical: CostReport,
    pub mixed: CostReport,
    pub info: HaltingInfo,
    pub within_bound: bool,
    pub flagged: bool,
}

impl GapRow {
    pub fn gap(&self) -> NegLog {
        self.classical
            .total()
            .minus(&self.mixed.total())
            .expect("mixed total is finite")
    }

    /// A violation that counts: outside the bound and not flagged.
    pub fn fails(&self) -> bool {
        !self.within_bound && !self.flagged
    }

    pub fn csv_header() -> &'static str {
        "state,L,M,F,total_classical,total_mixed,gap,bound_ok,info,flag"
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.id,
            self.mixed.l,
            self.mixed.m,
            self.mixed.f,
            self.classical.total(),
            self.mixed.total(),
            self.gap(),
            self.within_bound,
            self.info,
            self.flagged
        )
    }
}

/// Per-state gap between the classical-only and mixed optima. A state is
/// flagged when its halting information is at least `exotic_info`.
pub fn noncompression_gap(
    states: &[(String, PureState)],
    pool: &StrategyPool,
    snap: &UniverseSnapshot,
    halting: &HaltingApprox,
    k: &GapConstants,
) -> Result<Vec<GapRow>> {
    states
        .iter()
        .map(|(id, psi)| {
            let classical = best_classical(psi, pool)?;
            let mixed = best_mixed(psi, pool)?;
            let info = HaltingInfo::of(&psi.encode(), snap, halting)?;
            let within_bound = within_log_bound(&classical.total(), &mixed.total(), k.c5, k.c6);
            Ok(GapRow {
                id: id.clone(),
                classical,
                mixed,
                info,
                within_bound,
                flagged: info.at_least(k.exotic_info),
            })
        })
        .collect()
}
