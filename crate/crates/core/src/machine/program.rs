//! Program grammar of the reference machine.
//!
//! Opcodes form a complete prefix-free table:
//!
//! | bits       | opcode    | arguments        |
//! |------------|-----------|------------------|
//! | `00`       | `LIT`     | `⟨x⟩`            |
//! | `010`      | `AUXCOPY` | `⟨n⟩`            |
//! | `011`      | `CAT`     | `p q`            |
//! | `100`      | `PIPE`    | `p q`            |
//! | `101`      | `PAIR`    | `p q`            |
//! | `1100`     | `AUXTAIL` | `p`              |
//! | `1101`     | `AUXHEAD` | `p`              |
//! | `1110 kkk` | `XFORM`   | 3-bit selector   |
//! | `1111 kkk` | `CIRC`    | selector, args   |
//!
//! A bit string is a program iff it parses with no bits left over, so the
//! set of programs is prefix-free regardless of the auxiliary tape.

use crate::bits::BitString;
use crate::codec::{encode_efficient, encode_whole_u64, BitReader};
use crate::error::{Error, Result};

/// Nesting limit; deeper parses are grammar violations.
pub const MAX_DEPTH: usize = 512;

/// Transforms of the auxiliary tape.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Xform {
    Identity,
    Reverse,
    Complement,
    /// `⟨a,b⟩ ↦ ⟨b,a⟩` for a pair code.
    Swap,
    /// `a ↦ ⟨a,a⟩`.
    Dup,
    /// `⟨a⟩ ↦ a`.
    Unwrap,
    /// `a ↦ ⟨a⟩`.
    Wrap,
    /// Runs the tape as a program on an empty tape.
    Eval,
}

impl Xform {
    pub const ALL: [Xform; 8] = [
        Xform::Identity,
        Xform::Reverse,
        Xform::Complement,
        Xform::Swap,
        Xform::Dup,
        Xform::Unwrap,
        Xform::Wrap,
        Xform::Eval,
    ];

    fn selector(self) -> u64 {
        Self::ALL.iter().position(|x| *x == self).expect("listed") as u64
    }
}

/// Circuit and state constructors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CircOp {
    /// Identity circuit on `qubits` with `inputs` input qubits.
    Ident { qubits: u64, inputs: u64 },
    /// Tape holds a primitive state; outputs its preparation circuit.
    Prep,
    /// Tape holds a circuit; outputs column `index` of its unitary.
    Column(u64),
    /// Tape holds `(V, M)`; outputs `(V*, M)`.
    Adjoint,
    /// Tape holds the pair `⟨⟨(V,M)⟩, ⟨θ⟩⟩`; outputs `V|θ0…⟩`.
    Apply,
    /// State keyed to the first `bits` tape bits.
    HState { qubits: u64, bits: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Program {
    Lit(BitString),
    AuxCopy(u64),
    Cat(Box<Program>, Box<Program>),
    Pipe(Box<Program>, Box<Program>),
    Pair(Box<Program>, Box<Program>),
    AuxTail(Box<Program>),
    AuxHead(Box<Program>),
    Xform(Xform),
    Circ(CircOp),
}

/// Result of parsing a candidate prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseStatus {
    Complete(Program),
    /// A proper prefix of some program.
    Incomplete,
    /// Neither a program nor a prefix of one.
    Invalid,
}

fn bits_of(s: &str) -> BitString {
    BitString::from(s)
}

impl Program {
    pub fn lit(x: &BitString) -> Self {
        Program::Lit(x.clone())
    }

    pub fn cat(p: Program, q: Program) -> Self {
        Program::Cat(Box::new(p), Box::new(q))
    }

    pub fn pipe(p: Program, q: Program) -> Self {
        Program::Pipe(Box::new(p), Box::new(q))
    }

    pub fn pair(p: Program, q: Program) -> Self {
        Program::Pair(Box::new(p), Box::new(q))
    }

    pub fn aux_tail(p: Program) -> Self {
        Program::AuxTail(Box::new(p))
    }

    pub fn aux_head(p: Program) -> Self {
        Program::AuxHead(Box::new(p))
    }

    pub fn encode(&self) -> BitString {
        let mut out = BitString::new();
        self.encode_into(&mut out);
        out
    }

    fn encode_into(&self, out: &mut BitString) {
        match self {
            Program::Lit(x) => {
                out.extend_from(&bits_of("00"));
                out.extend_from(&encode_efficient(x));
            }
            Program::AuxCopy(n) => {
                out.extend_from(&bits_of("010"));
                out.extend_from(&encode_whole_u64(*n));
            }
            Program::Cat(p, q) | Program::Pipe(p, q) | Program::Pair(p, q) => {
                let op = match self {
                    Program::Cat(..) => "011",
                    Program::Pipe(..) => "100",
                    _ => "101",
                };
                out.extend_from(&bits_of(op));
                p.encode_into(out);
                q.encode_into(out);
            }
            Program::AuxTail(p) => {
                out.extend_from(&bits_of("1100"));
                p.encode_into(out);
            }
            Program::AuxHead(p) => {
                out.extend_from(&bits_of("1101"));
                p.encode_into(out);
            }
            Program::Xform(x) => {
                out.extend_from(&bits_of("1110"));
                out.extend_from(&BitString::from_u64(x.selector(), 3));
            }
            Program::Circ(op) => {
                out.extend_from(&bits_of("1111"));
                let (sel, args): (u64, Vec<u64>) = match op {
                    CircOp::Ident { qubits, inputs } => (0, vec![*qubits, *inputs]),
                    CircOp::Prep => (1, vec![]),
                    CircOp::Column(j) => (2, vec![*j]),
                    CircOp::Adjoint => (3, vec![]),
                    CircOp::Apply => (4, vec![]),
                    CircOp::HState { qubits, bits } => (5, vec![*qubits, *bits]),
                };
                out.extend_from(&BitString::from_u64(sel, 3));
                for a in args {
                    out.extend_from(&encode_whole_u64(a));
                }
            }
        }
    }

    /// Reads one program from the front of the reader.
    pub fn read(r: &mut BitReader<'_>) -> Result<Self> {
        Self::read_depth(r, 0)
    }

    fn read_depth(r: &mut BitReader<'_>, depth: usize) -> Result<Self> {
        if depth > MAX_DEPTH {
            return Err(Error::MalformedCode("program nesting too deep".into()));
        }
        let sub = |r: &mut BitReader<'_>| Self::read_depth(r, depth + 1).map(Box::new);
        let b0 = r.read_bit()?;
        let b1 = r.read_bit()?;
        Ok(match (b0, b1) {
            (false, false) => Program::Lit(r.read_efficient()?),
            (false, true) => {
                if r.read_bit()? {
                    let p = sub(r)?;
                    Program::Cat(p, sub(r)?)
                } else {
                    Program::AuxCopy(r.read_whole_u64()?)
                }
            }
            (true, false) => {
                let pair = r.read_bit()?;
                let p = sub(r)?;
                let q = sub(r)?;
                if pair {
                    Program::Pair(p, q)
                } else {
                    Program::Pipe(p, q)
                }
            }
            (true, true) => match (r.read_bit()?, r.read_bit()?) {
                (false, false) => Program::AuxTail(sub(r)?),
                (false, true) => Program::AuxHead(sub(r)?),
                (true, false) => Program::Xform(Xform::ALL[r.read_u64(3)? as usize]),
                (true, true) => Program::Circ(match r.read_u64(3)? {
                    0 => CircOp::Ident {
                        qubits: r.read_whole_u64()?,
                        inputs: r.read_whole_u64()?,
                    },
                    1 => CircOp::Prep,
                    2 => CircOp::Column(r.read_whole_u64()?),
                    3 => CircOp::Adjoint,
                    4 => CircOp::Apply,
                    5 => CircOp::HState {
                        qubits: r.read_whole_u64()?,
                        bits: r.read_whole_u64()?,
                    },
                    k => return Err(Error::MalformedCode(format!("unassigned circuit selector {k}"))),
                }),
            },
        })
    }

    /// Parses a string that must be exactly one program.
    pub fn parse(bits: &[bool]) -> Result<Self> {
        let mut r = BitReader::new(bits);
        let p = Self::read(&mut r)?;
        if !r.is_at_end() {
            return Err(Error::MalformedCode("bits left over after program".into()));
        }
        Ok(p)
    }

    /// Classifies a candidate string for prefix enumeration.
    pub fn status(bits: &[bool]) -> ParseStatus {
        let mut r = BitReader::new(bits);
        match Self::read(&mut r) {
            Ok(p) if r.is_at_end() => ParseStatus::Complete(p),
            Ok(_) => ParseStatus::Invalid,
            Err(Error::Truncated) => ParseStatus::Incomplete,
            Err(_) => ParseStatus::Invalid,
        }
    }
}
