//! `Hg`, `Hv` and `Hc` over a catalog.

use num_traits::Zero;
use serde::Serialize;

use crate::codec::Rational;
use crate::error::{Error, Result};
use crate::numeric::{pow2, NegLog};
use crate::quantum::{
    best_input_overlap, fidelity, psd_dominates, Matrix, OverlapWitness, PureState, SemiDensityMatrix,
};

use super::catalog::StateCatalog;

/// `-log Σ m̂(θ)|⟨ψ|θ⟩|²` over cataloged states.
pub fn hg(psi: &PureState, catalog: &StateCatalog) -> Result<NegLog> {
    if catalog.states().is_empty() {
        return Err(Error::EmptyCatalog);
    }
    let mut sum = Rational::zero();
    for s in catalog.states() {
        sum += &s.weight * fidelity(psi, &s.state)?;
    }
    Ok(NegLog::of(sum))
}

/// `-log ⟨ψ|μ|ψ⟩` with `μ` aggregated from the same catalog.
pub fn hg_via_mu(psi: &PureState, catalog: &StateCatalog) -> Result<NegLog> {
    if catalog.states().is_empty() {
        return Err(Error::EmptyCatalog);
    }
    Ok(NegLog::of(catalog.mu()?.expectation(psi)?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HvValue {
    pub value: NegLog,
    /// Catalog index of the minimizing state; `None` when every term is `+∞`.
    pub witness: Option<usize>,
}

/// `min ‖code(θ)‖ - log |⟨ψ|θ⟩|²`, first minimum in catalog order.
pub fn hv(psi: &PureState, catalog: &StateCatalog) -> Result<HvValue> {
    if catalog.states().is_empty() {
        return Err(Error::EmptyCatalog);
    }
    let mut best = HvValue {
        value: NegLog::infinite(),
        witness: None,
    };
    for i in 0..catalog.states().len() {
        let v = hv_term(psi, catalog, i)?;
        if v.is_finite() && v < best.value {
            best = HvValue {
                value: v,
                witness: Some(i),
            };
        }
    }
    Ok(best)
}

/// The `Hv` term for catalog state `i`.
pub fn hv_term(psi: &PureState, catalog: &StateCatalog, i: usize) -> Result<NegLog> {
    let s = &catalog.states()[i];
    Ok(NegLog::of(fidelity(psi, &s.state)?).plus_bits(s.code.len() as i64))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HcValue {
    pub value: NegLog,
    /// Catalog index of the minimizing circuit.
    pub circuit: Option<usize>,
    /// Optimal input for that circuit.
    pub input: Option<OverlapWitness>,
}

/// `min ‖code(V,M)‖ + M - log max_θ |⟨ψ|V|θ0…⟩|²`, first minimum in
/// catalog order.
pub fn hc(psi: &PureState, catalog: &StateCatalog) -> Result<HcValue> {
    if catalog.circuits().is_empty() {
        return Err(Error::EmptyCatalog);
    }
    let mut best = HcValue {
        value: NegLog::infinite(),
        circuit: None,
        input: None,
    };
    for (i, c) in catalog.circuits().iter().enumerate() {
        let (overlap, witness) = best_input_overlap(&c.circuit, psi)?;
        let v = NegLog::of(overlap).plus_bits((c.code.len() + c.circuit.inputs()) as i64);
        if v.is_finite() && v < best.value {
            best = HcValue {
                value: v,
                circuit: Some(i),
                input: Some(witness),
            };
        }
    }
    Ok(best)
}

/// Re-evaluates an `Hc` witness.
pub fn hc_term(psi: &PureState, catalog: &StateCatalog, circuit: usize, input: &OverlapWitness) -> Result<NegLog> {
    let c = &catalog.circuits()[circuit];
    let overlap = input.evaluate(&c.circuit, psi)?;
    Ok(NegLog::of(overlap).plus_bits((c.code.len() + c.circuit.inputs()) as i64))
}

/// Frozen constants of the inequality chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ChainConstants {
    pub c1: i64,
    pub c2: i64,
    pub c3: u32,
    pub c4: i64,
}

/// Which chain inequalities fail.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ChainViolations {
    pub hg_hv: bool,
    pub hg_hc: bool,
    pub hc_hv: bool,
}

impl ChainViolations {
    pub fn any(&self) -> bool {
        self.hg_hv || self.hg_hc || self.hc_hv
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntropyReport {
    pub hg: NegLog,
    pub hg_mu: NegLog,
    pub hv: HvValue,
    pub hc: HcValue,
}

impl EntropyReport {
    pub fn compute(psi: &PureState, catalog: &StateCatalog) -> Result<Self> {
        Ok(Self {
            hg: hg(psi, catalog)?,
            hg_mu: hg_via_mu(psi, catalog)?,
            hv: hv(psi, catalog)?,
            hc: hc(psi, catalog)?,
        })
    }

    /// `hg ≤ hv + c₁`, `hg ≤ hc + c₂`, `hc ≤ hv + c₃·log(hv+2) + c₄`.
    pub fn violations(&self, k: &ChainConstants) -> ChainViolations {
        ChainViolations {
            hg_hv: !(self.hg <= self.hv.value.plus_bits(k.c1)),
            hg_hc: !(self.hg <= self.hc.value.plus_bits(k.c2)),
            hc_hv: !crate::numeric::within_log_bound(&self.hc.value, &self.hv.value, k.c3, k.c4),
        }
    }

    /// Re-evaluates both witnesses against the reported values.
    pub fn witnesses_reproduce(&self, psi: &PureState, catalog: &StateCatalog) -> Result<bool> {
        let hv_ok = match self.hv.witness {
            Some(i) => hv_term(psi, catalog, i)? == self.hv.value,
            None => self.hv.value.is_infinite(),
        };
        let hc_ok = match (self.hc.circuit, &self.hc.input) {
            (Some(i), Some(w)) => hc_term(psi, catalog, i, w)? == self.hc.value,
            _ => self.hc.value.is_infinite(),
        };
        Ok(hv_ok && hc_ok)
    }

    pub fn to_row(&self, id: &str) -> EntropyRow {
        EntropyRow {
            state: id.to_string(),
            hg: self.hg.to_string(),
            hg_exact: self.hg.argument().to_string(),
            hv: self.hv.value.to_string(),
            hv_witness: self.hv.witness,
            hc: self.hc.value.to_string(),
            hc_witness: self.hc.circuit,
        }
    }
}

/// Serializable row: values are decimal, `hg_exact` is the exact argument
/// of the logarithm.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EntropyRow {
    pub state: String,
    pub hg: String,
    pub hg_exact: String,
    pub hv: String,
    pub hv_witness: Option<usize>,
    pub hc: String,
    pub hc_witness: Option<usize>,
}

/// `2^-M V (I_M ⊗ |0…⟩⟨0…|) V*` for a catalog circuit.
pub fn circuit_density(catalog: &StateCatalog, circuit: usize) -> Result<SemiDensityMatrix> {
    let c = &catalog.circuits()[circuit].circuit;
    let pad = c.qubits() - c.inputs();
    let v = c.unitary().matrix();
    let mut sum = Matrix::zeros(v.dim());
    for a in 0..(1usize << c.inputs()) {
        sum = sum.add(&Matrix::outer(&v.column(a << pad)))?;
    }
    SemiDensityMatrix::new(sum.scale(&pow2(-(c.inputs() as i64))))
}

/// Smallest `c ≤ cap` with `m̂(V,M)·γ ⪯ 2^c·μ`, or `None`.
pub fn dominance_constant(catalog: &StateCatalog, circuit: usize, cap: i64) -> Result<Option<i64>> {
    let gamma = circuit_density(catalog, circuit)?;
    let weighted = SemiDensityMatrix::new(gamma.matrix().scale(&catalog.circuits()[circuit].weight))?;
    let mu = catalog.mu()?;
    let holds = |c: i64| psd_dominates(&weighted, &mu, &pow2(c));
    if holds(0)? {
        return Ok(Some(0));
    }
    if !holds(cap)? {
        return Ok(None);
    }
    // dominance is monotone in c
    let (mut lo, mut hi) = (0i64, cap);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if holds(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}
