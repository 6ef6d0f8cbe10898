//! Two-qubit laboratory: a universe with planted state and circuit
//! programs, its catalog and strategy pool, and the populations scored
//! against them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::bits::BitString;
use crate::entropy::{dominance_constant, ChainConstants, EntropyReport, StateCatalog};
use crate::error::Result;
use crate::machine::{combined_aux, enumerate_universe, CircOp, HaltingApprox, MachineConfig, Program, UniverseSnapshot};
use crate::protocol::{noncompression_gap, GapConstants, GapRow, StrategyPool};
use crate::quantum::generate::{random_approximate_state, random_primitive_state, random_unitary, state_from_bits};
use crate::quantum::{Circuit, PureState};

pub const LAB_QUBITS: usize = 2;
pub const QUANTUM_CONFIG: MachineConfig = MachineConfig { lmax: 12, steps: 10_000 };
/// Halting bits read by the exotic state: those of programs up to 8 bits.
pub const EXOTIC_BITS: u64 = 510;
const PLANT_SEED: u64 = 11;
const POPULATION_SEED: u64 = 23;
const SEED_STATES: usize = 6;
const SEED_CIRCUITS: usize = 3;
const RANDOM_PRIMITIVE: usize = 100;
const RANDOM_APPROXIMATE: usize = 100;
const DOMINANCE_CAP: i64 = 256;

fn circ(op: CircOp) -> Program {
    Program::Circ(op)
}

/// `HSTATE` on the halting bits of the combined auxiliary string.
pub fn exotic_program() -> Program {
    Program::aux_tail(circ(CircOp::HState {
        qubits: LAB_QUBITS as u64,
        bits: EXOTIC_BITS,
    }))
}

/// Identity circuits, basis columns with their preparations, literal seed
/// states with their preparations, literal seed circuits with the columns
/// their inputs reach, and the exotic state.
pub fn quantum_plants(states: &[PureState], circuits: &[Circuit]) -> Vec<BitString> {
    let n = LAB_QUBITS as u64;
    let mut out: Vec<Program> = (0..=n).map(|m| circ(CircOp::Ident { qubits: n, inputs: m })).collect();
    let full = circ(CircOp::Ident { qubits: n, inputs: n });
    for j in 0..(1u64 << n) {
        let col = Program::pipe(full.clone(), circ(CircOp::Column(j)));
        out.push(col.clone());
        out.push(Program::pipe(col, circ(CircOp::Prep)));
    }
    for s in states {
        let lit = Program::lit(&s.encode());
        out.push(lit.clone());
        out.push(Program::pipe(lit, circ(CircOp::Prep)));
    }
    for c in circuits {
        let lit = Program::lit(&c.encode());
        out.push(lit.clone());
        let pad = c.qubits() - c.inputs();
        for a in 0..(1u64 << c.inputs()) {
            out.push(Program::pipe(lit.clone(), circ(CircOp::Column(a << pad))));
        }
    }
    out.push(exotic_program());
    out.iter().map(Program::encode).collect()
}

pub struct QuantumLab {
    pub snapshot: UniverseSnapshot,
    pub halting: HaltingApprox,
    pub catalog: StateCatalog,
    pub pool: StrategyPool,
    pub exotic: PureState,
    pub seed_states: Vec<PureState>,
    pub seed_circuits: Vec<Circuit>,
}

impl QuantumLab {
    /// Enumerates once on the empty auxiliary string for `Ĥ`, then again
    /// with `⟨⟩Ĥ` probed.
    pub fn build(workers: Option<usize>) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(PLANT_SEED);
        let seed_states: Vec<PureState> = (0..SEED_STATES)
            .map(|_| random_primitive_state(&mut rng, LAB_QUBITS, 3))
            .collect();
        let seed_circuits = (0..SEED_CIRCUITS)
            .map(|_| Circuit::new(random_unitary(&mut rng, LAB_QUBITS), 1))
            .collect::<Result<Vec<_>>>()?;
        let plants = quantum_plants(&seed_states, &seed_circuits);
        let stage_a = enumerate_universe(QUANTUM_CONFIG, &[], &plants, workers)?;
        let halting = HaltingApprox::from_snapshot(&stage_a);
        let snapshot = enumerate_universe(
            QUANTUM_CONFIG,
            &[combined_aux(&BitString::new(), &halting)],
            &plants,
            workers,
        )?;
        let exotic = state_from_bits(LAB_QUBITS, &halting.bits.as_slice()[..EXOTIC_BITS as usize]);
        Ok(Self {
            catalog: StateCatalog::from_snapshot(&snapshot, LAB_QUBITS),
            pool: StrategyPool::from_snapshot(&snapshot, LAB_QUBITS),
            snapshot,
            halting,
            exotic,
            seed_states,
            seed_circuits,
        })
    }
}

/// Catalog members, then random primitive and random approximate states.
pub fn population(catalog: &StateCatalog) -> Vec<(String, PureState)> {
    let mut rng = ChaCha8Rng::seed_from_u64(POPULATION_SEED);
    let mut out: Vec<(String, PureState)> = catalog
        .states()
        .iter()
        .enumerate()
        .map(|(i, s)| (format!("catalog-{i}"), s.state.clone()))
        .collect();
    for i in 0..RANDOM_PRIMITIVE {
        out.push((format!("primitive-{i}"), random_primitive_state(&mut rng, LAB_QUBITS, 4)));
    }
    for i in 0..RANDOM_APPROXIMATE {
        out.push((format!("approximate-{i}"), random_approximate_state(&mut rng, LAB_QUBITS)));
    }
    out
}

pub fn entropy_rows(
    states: &[(String, PureState)],
    catalog: &StateCatalog,
    workers: Option<usize>,
) -> Result<Vec<(String, EntropyReport)>> {
    super::in_pool(workers, || {
        states
            .par_iter()
            .map(|(id, psi)| Ok((id.clone(), EntropyReport::compute(psi, catalog)?)))
            .collect()
    })?
}

pub fn entropy_json(rows: &[(String, EntropyReport)], k: &ChainConstants) -> serde_json::Value {
    let violations = rows.iter().filter(|(_, r)| r.violations(k).any()).count();
    let route_mismatches = rows.iter().filter(|(_, r)| r.hg != r.hg_mu).count();
    json!({
        "constants": k,
        "states": rows.len(),
        "violations": violations,
        "route_mismatches": route_mismatches,
        "rows": rows.iter().map(|(id, r)| r.to_row(id)).collect::<Vec<_>>(),
    })
}

pub fn gap_rows(
    states: &[(String, PureState)],
    lab: &QuantumLab,
    k: &GapConstants,
    workers: Option<usize>,
) -> Result<Vec<GapRow>> {
    let rows: Result<Vec<Vec<GapRow>>> = super::in_pool(workers, || {
        states
            .par_iter()
            .map(|s| noncompression_gap(std::slice::from_ref(s), &lab.pool, &lab.snapshot, &lab.halting, k))
            .collect()
    })?;
    Ok(rows?.into_iter().flatten().collect())
}

pub fn gap_csv(rows: &[GapRow]) -> String {
    let mut out = String::from(GapRow::csv_header());
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv());
        out.push('\n');
    }
    out
}

/// Smallest certified dominance constant per catalog circuit.
pub fn dominance_table(catalog: &StateCatalog, workers: Option<usize>) -> Result<Vec<Option<i64>>> {
    super::in_pool(workers, || {
        (0..catalog.circuits().len())
            .into_par_iter()
            .map(|i| dominance_constant(catalog, i, DOMINANCE_CAP))
            .collect()
    })?
}

/// Concatenated state blocks, each optionally preceded by `# id NAME`.
pub fn write_states(states: &[(String, PureState)]) -> String {
    states
        .iter()
        .map(|(id, s)| format!("# id {id}\n{}", s.to_text()))
        .collect()
}

/// Inverse of [`write_states`]; unnamed blocks get `state-I`.
pub fn read_states(text: &str) -> Result<Vec<(String, PureState)>> {
    let mut blocks: Vec<(Option<String>, String)> = Vec::new();
    let mut pending: Option<String> = None;
    for line in text.lines() {
        let t = line.trim();
        if let Some(id) = t.strip_prefix("# id ") {
            pending = Some(id.trim().to_string());
        } else if t.starts_with("state ") {
            blocks.push((pending.take(), format!("{t}\n")));
        } else if let Some((_, body)) = blocks.last_mut() {
            body.push_str(line);
            body.push('\n');
        } else if !t.is_empty() && !t.starts_with('#') {
            return Err(crate::error::Error::Parse(format!("text before the first state: {t:?}")));
        }
    }
    blocks
        .into_iter()
        .enumerate()
        .map(|(i, (id, body))| Ok((id.unwrap_or_else(|| format!("state-{i}")), PureState::from_text(&body)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_lists_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let states = vec![
            ("a".to_string(), random_primitive_state(&mut rng, 2, 3)),
            ("b".to_string(), random_approximate_state(&mut rng, 1)),
        ];
        assert_eq!(read_states(&write_states(&states)).unwrap(), states);
        let bare = PureState::basis(1, 1).to_text();
        assert_eq!(read_states(&bare).unwrap()[0].0, "state-0");
        assert!(read_states("junk\nstate 1 primitive\n").is_err());
    }

    #[test]
    fn plants_parse_and_are_distinct() {
        let lab_states = vec![PureState::basis(2, 1)];
        let plants = quantum_plants(&lab_states, &[Circuit::identity(2, 1).unwrap()]);
        let mut sorted = plants.clone();
        sorted.sort_by(|a, b| a.xi_cmp(b));
        sorted.dedup();
        assert_eq!(sorted.len(), plants.len());
        for p in &plants {
            assert!(Program::parse(p.as_slice()).is_ok());
        }
    }
}
