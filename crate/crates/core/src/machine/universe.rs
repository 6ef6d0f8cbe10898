//! Bounded enumeration of the reference machine's halting programs.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use num_traits::Zero;
use rayon::prelude::*;

use crate::bits::BitString;
use crate::codec::{xi_string_to_index_u64, Rational};
use crate::error::{Error, Result};
use crate::numeric::pow2;
use crate::quantum::parse_fraction;

use super::interp::{run_program, Outcome};
use super::program::{ParseStatus, Program};

/// Identifier of the opcode table and step accounting.
pub const MACHINE_VERSION: &str = "qnc-rm-1";

/// Prefixes of this length are the units of parallel work.
const SPLIT_DEPTH: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub struct MachineConfig {
    /// Length budget `Lmax` in bits.
    pub lmax: usize,
    /// Step budget `T`.
    pub steps: u64,
}

impl Default for MachineConfig {
    fn default() -> Self {
        Self {
            lmax: 14,
            steps: 10_000,
        }
    }
}

/// All programs of length at most `lmax`, in ξ order.
pub fn enumerate_programs(lmax: usize) -> Vec<(BitString, Program)> {
    let mut frontier = Vec::new();
    let mut found = Vec::new();
    split(&BitString::new(), lmax, SPLIT_DEPTH.min(lmax), &mut frontier, &mut found);
    let nested: Vec<Vec<(BitString, Program)>> = frontier
        .par_iter()
        .map(|prefix| {
            let mut out = Vec::new();
            dfs(prefix, lmax, &mut out);
            out
        })
        .collect();
    found.extend(nested.into_iter().flatten());
    found.sort_by(|a, b| a.0.xi_cmp(&b.0));
    found
}

fn split(
    prefix: &BitString,
    lmax: usize,
    depth: usize,
    frontier: &mut Vec<BitString>,
    found: &mut Vec<(BitString, Program)>,
) {
    match Program::status(prefix.as_slice()) {
        ParseStatus::Complete(p) => found.push((prefix.clone(), p)),
        ParseStatus::Invalid => {}
        ParseStatus::Incomplete => {
            if prefix.len() >= lmax {
                return;
            }
            if prefix.len() == depth {
                frontier.push(prefix.clone());
                return;
            }
            for b in [false, true] {
                split(&prefix.child(b), lmax, depth, frontier, found);
            }
        }
    }
}

fn dfs(prefix: &BitString, lmax: usize, out: &mut Vec<(BitString, Program)>) {
    match Program::status(prefix.as_slice()) {
        ParseStatus::Complete(p) => out.push((prefix.clone(), p)),
        ParseStatus::Invalid => {}
        ParseStatus::Incomplete => {
            if prefix.len() < lmax {
                for b in [false, true] {
                    dfs(&prefix.child(b), lmax, out);
                }
            }
        }
    }
}

/// One halting run.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Record {
    pub program: BitString,
    /// Index into the snapshot's auxiliary list.
    pub aux: usize,
    pub output: BitString,
    pub steps: u64,
}

/// Per-output summary for one auxiliary string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutputStats {
    /// First shortest program in ξ order.
    pub shortest: BitString,
    /// `Σ 2^-‖p‖` over programs producing the output.
    pub mass: Rational,
    pub programs: usize,
}

/// Frozen result of running every enumerated and planted program on every
/// probed auxiliary string.
#[derive(Clone, Debug)]
pub struct UniverseSnapshot {
    config: MachineConfig,
    auxes: Vec<BitString>,
    aux_ids: HashMap<BitString, usize>,
    planted: Vec<BitString>,
    records: Vec<Record>,
    ranges: Vec<(usize, usize)>,
    omega_lower: Rational,
    index: Vec<HashMap<BitString, OutputStats>>,
}

/// Runs every program of length at most `lmax` plus the `planted` ones on
/// each auxiliary string. The empty auxiliary string is always probed, as
/// id 0. `workers` pins the thread count; results do not depend on it.
pub fn enumerate_universe(
    config: MachineConfig,
    auxes: &[BitString],
    planted: &[BitString],
    workers: Option<usize>,
) -> Result<UniverseSnapshot> {
    match workers {
        None => build(config, auxes, planted),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Config(e.to_string()))?;
            pool.install(|| build(config, auxes, planted))
        }
    }
}

fn build(config: MachineConfig, auxes: &[BitString], planted: &[BitString]) -> Result<UniverseSnapshot> {
    let aux_list = canonical_auxes(auxes);
    let mut programs = enumerate_programs(config.lmax);
    let known: HashSet<BitString> = programs.iter().map(|(b, _)| b.clone()).collect();
    let mut planted_list: Vec<BitString> = Vec::new();
    let mut seen = HashSet::new();
    for p in planted {
        if !seen.insert(p.clone()) {
            continue;
        }
        let parsed = Program::parse(p.as_slice())?;
        planted_list.push(p.clone());
        if !known.contains(p) {
            programs.push((p.clone(), parsed));
        }
    }
    planted_list.sort_by(|a, b| a.xi_cmp(b));
    programs.sort_by(|a, b| a.0.xi_cmp(&b.0));
    let mut records = Vec::new();
    for (aux_id, aux) in aux_list.iter().enumerate() {
        let halted: Vec<Option<Record>> = programs
            .par_iter()
            .map(|(bits, prog)| match run_program(prog, aux.as_slice(), config.steps) {
                Outcome::Halted { output, steps } => Some(Record {
                    program: bits.clone(),
                    aux: aux_id,
                    output,
                    steps,
                }),
                _ => None,
            })
            .collect();
        records.extend(halted.into_iter().flatten());
    }
    Ok(UniverseSnapshot::assemble(config, aux_list, planted_list, records))
}

fn canonical_auxes(auxes: &[BitString]) -> Vec<BitString> {
    let mut out = vec![BitString::new()];
    for a in auxes {
        if !out.contains(a) {
            out.push(a.clone());
        }
    }
    out
}

impl UniverseSnapshot {
    /// Builds a snapshot from explicit records, e.g. for hand-made fixtures.
    /// Programs must be prefix-free per auxiliary string.
    pub fn from_records(
        config: MachineConfig,
        auxes: Vec<BitString>,
        planted: Vec<BitString>,
        mut records: Vec<Record>,
    ) -> Result<Self> {
        if auxes.first().map(|a| !a.is_empty()).unwrap_or(true) {
            return Err(Error::Config("auxiliary 0 must be the empty string".into()));
        }
        let distinct: HashSet<&BitString> = auxes.iter().collect();
        if distinct.len() != auxes.len() {
            return Err(Error::Config("duplicate auxiliary string".into()));
        }
        if let Some(r) = records.iter().find(|r| r.aux >= auxes.len()) {
            return Err(Error::Config(format!("record refers to unknown auxiliary {}", r.aux)));
        }
        records.sort_by(|a, b| a.aux.cmp(&b.aux).then_with(|| a.program.xi_cmp(&b.program)));
        let snap = Self::assemble(config, auxes, planted, records);
        if let Some((a, b)) = snap.prefix_violation() {
            return Err(Error::MalformedCode(format!("program {a} is a prefix of {b}")));
        }
        Ok(snap)
    }

    fn assemble(config: MachineConfig, auxes: Vec<BitString>, planted: Vec<BitString>, records: Vec<Record>) -> Self {
        let mut ranges = vec![(0, 0); auxes.len()];
        let mut start = 0;
        for (id, range) in ranges.iter_mut().enumerate() {
            let end = start + records[start..].iter().take_while(|r| r.aux == id).count();
            *range = (start, end);
            start = end;
        }
        let mut index: Vec<HashMap<BitString, OutputStats>> = vec![HashMap::new(); auxes.len()];
        for r in &records {
            let w = pow2(-(r.program.len() as i64));
            index[r.aux]
                .entry(r.output.clone())
                .and_modify(|s| {
                    s.mass += &w;
                    s.programs += 1;
                    if r.program.xi_cmp(&s.shortest).is_lt() {
                        s.shortest = r.program.clone();
                    }
                })
                .or_insert_with(|| OutputStats {
                    shortest: r.program.clone(),
                    mass: w.clone(),
                    programs: 1,
                });
        }
        let omega_lower = records[ranges[0].0..ranges[0].1]
            .iter()
            .fold(Rational::zero(), |acc, r| acc + pow2(-(r.program.len() as i64)));
        let aux_ids = auxes.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        Self {
            config,
            auxes,
            aux_ids,
            planted,
            records,
            ranges,
            omega_lower,
            index,
        }
    }

    pub fn config(&self) -> MachineConfig {
        self.config
    }

    pub fn auxes(&self) -> &[BitString] {
        &self.auxes
    }

    pub fn planted(&self) -> &[BitString] {
        &self.planted
    }

    pub fn aux_id(&self, aux: &BitString) -> Result<usize> {
        self.aux_ids.get(aux).copied().ok_or(Error::AuxiliaryNotProbed)
    }

    pub fn is_probed(&self, aux: &BitString) -> bool {
        self.aux_ids.contains_key(aux)
    }

    /// All records, sorted by auxiliary id then program in ξ order.
    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn records_for(&self, aux_id: usize) -> &[Record] {
        let (a, b) = self.ranges[aux_id];
        &self.records[a..b]
    }

    pub fn output_stats(&self, x: &BitString, aux: &BitString) -> Result<Option<&OutputStats>> {
        let id = self.aux_id(aux)?;
        Ok(self.index[id].get(x))
    }

    /// Distinct outputs on `aux_id` with their summaries, in ξ order.
    pub fn outputs(&self, aux_id: usize) -> Vec<(&BitString, &OutputStats)> {
        let mut v: Vec<_> = self.index[aux_id].iter().collect();
        v.sort_by(|a, b| a.0.xi_cmp(b.0));
        v
    }

    /// `Σ 2^-‖p‖` over programs halting on the empty auxiliary string.
    pub fn omega_lower(&self) -> &Rational {
        &self.omega_lower
    }

    /// First pair `(p, q)` with `p` a proper prefix of `q` on the same
    /// auxiliary string.
    pub fn prefix_violation(&self) -> Option<(BitString, BitString)> {
        for id in 0..self.auxes.len() {
            let mut progs: Vec<&BitString> = self.records_for(id).iter().map(|r| &r.program).collect();
            progs.sort();
            for w in progs.windows(2) {
                if w[0].is_prefix_of(w[1]) {
                    return Some((w[0].clone(), w[1].clone()));
                }
            }
        }
        None
    }

    /// Text form; see the repository docs for the grammar.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        let mut s = String::new();
        let _ = writeln!(s, "qnc-universe 1");
        let _ = writeln!(s, "machine {MACHINE_VERSION}");
        let _ = writeln!(s, "lmax {}", self.config.lmax);
        let _ = writeln!(s, "steps {}", self.config.steps);
        let _ = writeln!(s, "omega_lower {}", self.omega_lower);
        for (i, a) in self.auxes.iter().enumerate() {
            let _ = writeln!(s, "aux {i} {}", a.to_field());
        }
        for p in &self.planted {
            let _ = writeln!(s, "planted {p}");
        }
        w.write_all(s.as_bytes())?;
        for r in &self.records {
            writeln!(w, "{}\t{}\t{}\t{}", r.program.to_field(), r.aux, r.output.to_field(), r.steps)?;
        }
        writeln!(w, "end omega_lower {}", self.omega_lower)?;
        Ok(())
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let mut config = MachineConfig::default();
        let mut auxes = Vec::new();
        let mut planted = Vec::new();
        let mut records = Vec::new();
        let mut omega_header = None;
        let mut omega_trailer = None;
        for line in r.lines() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            if line.contains('\t') {
                let f: Vec<&str> = line.split('\t').collect();
                if f.len() != 4 {
                    return Err(Error::Parse(format!("bad record line {line:?}")));
                }
                records.push(Record {
                    program: BitString::from_field(f[0])?,
                    aux: parse_num(f[1])?,
                    output: BitString::from_field(f[2])?,
                    steps: parse_num(f[3])?,
                });
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            match f.as_slice() {
                ["qnc-universe", "1"] => {}
                ["machine", v] if *v == MACHINE_VERSION => {}
                ["machine", v] => return Err(Error::Config(format!("snapshot is for machine {v}"))),
                ["lmax", n] => config.lmax = parse_num(n)?,
                ["steps", n] => config.steps = parse_num(n)?,
                ["omega_lower", q] => omega_header = Some(parse_fraction(q)?),
                ["aux", i, bits] => {
                    if parse_num::<usize>(i)? != auxes.len() {
                        return Err(Error::Parse("auxiliary ids out of order".into()));
                    }
                    auxes.push(BitString::from_field(bits)?);
                }
                ["planted", bits] => planted.push(BitString::from_field(bits)?),
                ["end", "omega_lower", q] => omega_trailer = Some(parse_fraction(q)?),
                _ => return Err(Error::Parse(format!("unrecognized line {line:?}"))),
            }
        }
        let trailer = omega_trailer.ok_or_else(|| Error::Parse("missing trailer".into()))?;
        let snap = Self::from_records(config, auxes, planted, records)?;
        if omega_header.as_ref() != Some(&trailer) || snap.omega_lower != trailer {
            return Err(Error::Parse("omega_lower does not match the records".into()));
        }
        Ok(snap)
    }

    /// Packed form: magic, budgets, auxiliary strings, planted programs and
    /// records, every bit string in [`BitString::to_packed`] form and every
    /// number as little-endian `u64`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(b"QNCU");
        let put = |out: &mut Vec<u8>, v: u64| out.extend_from_slice(&v.to_le_bytes());
        put(&mut out, self.config.lmax as u64);
        put(&mut out, self.config.steps);
        put(&mut out, self.auxes.len() as u64);
        for a in &self.auxes {
            out.extend(a.to_packed());
        }
        put(&mut out, self.planted.len() as u64);
        for p in &self.planted {
            out.extend(p.to_packed());
        }
        put(&mut out, self.records.len() as u64);
        for r in &self.records {
            out.extend(r.program.to_packed());
            put(&mut out, r.aux as u64);
            out.extend(r.output.to_packed());
            put(&mut out, r.steps);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut pos = 0usize;
        if bytes.get(..4) != Some(b"QNCU") {
            return Err(Error::Parse("not a packed universe snapshot".into()));
        }
        pos += 4;
        let num = |pos: &mut usize| -> Result<u64> {
            let b = bytes.get(*pos..*pos + 8).ok_or(Error::Truncated)?;
            *pos += 8;
            Ok(u64::from_le_bytes(b.try_into().expect("8 bytes")))
        };
        let lmax = num(&mut pos)? as usize;
        let steps = num(&mut pos)?;
        let bits = |pos: &mut usize| -> Result<BitString> {
            let (b, used) = BitString::from_packed(&bytes[*pos..])?;
            *pos += used;
            Ok(b)
        };
        let n_aux = num(&mut pos)?;
        let mut auxes = Vec::new();
        for _ in 0..n_aux {
            auxes.push(bits(&mut pos)?);
        }
        let n_planted = num(&mut pos)?;
        let mut planted = Vec::new();
        for _ in 0..n_planted {
            planted.push(bits(&mut pos)?);
        }
        let n_records = num(&mut pos)?;
        let mut records = Vec::new();
        for _ in 0..n_records {
            let program = bits(&mut pos)?;
            let aux = num(&mut pos)? as usize;
            let output = bits(&mut pos)?;
            let steps = num(&mut pos)?;
            records.push(Record {
                program,
                aux,
                output,
                steps,
            });
        }
        if pos != bytes.len() {
            return Err(Error::Parse("trailing bytes after snapshot".into()));
        }
        Self::from_records(MachineConfig { lmax, steps }, auxes, planted, records)
    }
}

fn parse_num<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Parse(format!("expected a number, found {s:?}")))
}

/// Budgeted characteristic string of the domain: bit `i` is set iff `ξ_i`
/// halts on the empty auxiliary string. Covers every `ξ_i` of length at
/// most `lmax`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HaltingApprox {
    pub bits: BitString,
    pub config: MachineConfig,
}

impl HaltingApprox {
    pub fn from_snapshot(snap: &UniverseSnapshot) -> Self {
        let lmax = snap.config.lmax;
        let len = (1usize << (lmax + 1)) - 2;
        let mut bits = vec![false; len];
        for r in snap.records_for(0) {
            if r.program.len() <= lmax && !r.program.is_empty() {
                let i = xi_string_to_index_u64(&r.program).expect("nonempty program") as usize;
                bits[i] = true;
            }
        }
        Self {
            bits: BitString::from_bits(bits),
            config: snap.config,
        }
    }

    /// Text form: `halting LMAX STEPS` then the bits on one line.
    pub fn to_text(&self) -> String {
        format!("halting {} {}\n{}\n", self.config.lmax, self.config.steps, self.bits.to_field())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty halting file".into()))?;
        let f: Vec<&str> = header.split_whitespace().collect();
        let ["halting", lmax, steps] = f.as_slice() else {
            return Err(Error::Parse(format!("bad halting header {header:?}")));
        };
        let bits = BitString::from_field(lines.next().unwrap_or("-").trim())?;
        Ok(Self {
            bits,
            config: MachineConfig {
                lmax: parse_num(lmax)?,
                steps: parse_num(steps)?,
            },
        })
    }
}
