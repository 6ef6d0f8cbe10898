//! Cataloged primitive states and circuits with their snapshot weights.

use std::fmt::Write as _;

use num_traits::Zero;

use crate::bits::BitString;
use crate::codec::Rational;
use crate::error::{Error, Result};
use crate::machine::UniverseSnapshot;
use crate::quantum::{mu_aggregate, parse_fraction, Circuit, PureState, SemiDensityMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogState {
    pub state: PureState,
    /// Shortest program for `⟨θ⟩`; its length is `K̂(θ)`.
    pub code: BitString,
    /// `m̂(⟨θ⟩)`.
    pub weight: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogCircuit {
    pub circuit: Circuit,
    pub code: BitString,
    pub weight: Rational,
}

/// Primitive states and circuits on `N` qubits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateCatalog {
    qubits: usize,
    states: Vec<CatalogState>,
    circuits: Vec<CatalogCircuit>,
}

impl StateCatalog {
    /// Checks dimensions, primitivity, that codes are prefix-free and that
    /// the weights sum to at most one.
    pub fn new(qubits: usize, states: Vec<CatalogState>, circuits: Vec<CatalogCircuit>) -> Result<Self> {
        for s in &states {
            if s.state.qubits() != qubits {
                return Err(Error::DimensionMismatch {
                    expected: qubits,
                    found: s.state.qubits(),
                });
            }
            if !s.state.is_primitive() {
                return Err(Error::NotNormalized);
            }
        }
        for c in &circuits {
            if c.circuit.qubits() != qubits {
                return Err(Error::DimensionMismatch {
                    expected: qubits,
                    found: c.circuit.qubits(),
                });
            }
        }
        let mut codes: Vec<&BitString> = states
            .iter()
            .map(|s| &s.code)
            .chain(circuits.iter().map(|c| &c.code))
            .collect();
        codes.sort();
        codes.dedup();
        if codes.windows(2).any(|w| w[0].is_prefix_of(w[1])) {
            return Err(Error::MalformedCode("catalog codes are not prefix-free".into()));
        }
        let total: Rational = states
            .iter()
            .map(|s| s.weight.clone())
            .chain(circuits.iter().map(|c| c.weight.clone()))
            .sum();
        if total > Rational::from_integer(1.into()) {
            return Err(Error::WeightOverflow);
        }
        Ok(Self {
            qubits,
            states,
            circuits,
        })
    }

    /// Every output on the empty auxiliary string that decodes to a
    /// primitive state or a circuit on `qubits`, in ξ order of the output.
    pub fn from_snapshot(snap: &UniverseSnapshot, qubits: usize) -> Self {
        let mut states = Vec::new();
        let mut circuits = Vec::new();
        for (out, stats) in snap.outputs(0) {
            if let Ok(state) = PureState::decode(out) {
                if state.qubits() == qubits && state.is_primitive() {
                    states.push(CatalogState {
                        state,
                        code: stats.shortest.clone(),
                        weight: stats.mass.clone(),
                    });
                }
            } else if let Ok(circuit) = Circuit::decode(out) {
                if circuit.qubits() == qubits {
                    circuits.push(CatalogCircuit {
                        circuit,
                        code: stats.shortest.clone(),
                        weight: stats.mass.clone(),
                    });
                }
            }
        }
        Self {
            qubits,
            states,
            circuits,
        }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn states(&self) -> &[CatalogState] {
        &self.states
    }

    pub fn circuits(&self) -> &[CatalogCircuit] {
        &self.circuits
    }

    pub fn state_index(&self, psi: &PureState) -> Option<usize> {
        self.states.iter().position(|s| &s.state == psi)
    }

    /// `μ = Σ m̂(θ)|θ⟩⟨θ|` over cataloged states.
    pub fn mu(&self) -> Result<SemiDensityMatrix> {
        let weighted: Vec<(PureState, Rational)> = self
            .states
            .iter()
            .map(|s| (s.state.clone(), s.weight.clone()))
            .collect();
        mu_aggregate(self.qubits, &weighted)
    }

    /// Keeps the first `states` states and `circuits` circuits.
    pub fn truncated(&self, states: usize, circuits: usize) -> Self {
        Self {
            qubits: self.qubits,
            states: self.states.iter().take(states).cloned().collect(),
            circuits: self.circuits.iter().take(circuits).cloned().collect(),
        }
    }

    /// Text form: `catalog N`, then one line per entry:
    /// `state CODE WEIGHT ENCODING` or `circuit CODE WEIGHT ENCODING`.
    pub fn to_text(&self) -> String {
        let mut out = format!("catalog {}\n", self.qubits);
        for s in &self.states {
            let _ = writeln!(out, "state {} {} {}", s.code.to_field(), s.weight, s.state.encode().to_field());
        }
        for c in &self.circuits {
            let _ = writeln!(out, "circuit {} {} {}", c.code.to_field(), c.weight, c.circuit.encode().to_field());
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty catalog".into()))?;
        let qubits = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["catalog", n] => n.parse().map_err(|_| Error::Parse(format!("bad qubit count {n:?}")))?,
            _ => return Err(Error::Parse(format!("bad catalog header {header:?}"))),
        };
        let mut states = Vec::new();
        let mut circuits = Vec::new();
        for line in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            match f.as_slice() {
                ["state", code, w, enc] => states.push(CatalogState {
                    state: PureState::decode(&BitString::from_field(enc)?)?,
                    code: BitString::from_field(code)?,
                    weight: parse_fraction(w)?,
                }),
                ["circuit", code, w, enc] => circuits.push(CatalogCircuit {
                    circuit: Circuit::decode(&BitString::from_field(enc)?)?,
                    code: BitString::from_field(code)?,
                    weight: parse_fraction(w)?,
                }),
                _ => return Err(Error::Parse(format!("bad catalog line {line:?}"))),
            }
        }
        Self::new(qubits, states, circuits)
    }

    pub fn total_weight(&self) -> Rational {
        self.states
            .iter()
            .map(|s| &s.weight)
            .chain(self.circuits.iter().map(|c| &c.weight))
            .fold(Rational::zero(), |acc, w| acc + w)
    }
}
