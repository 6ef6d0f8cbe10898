//! Interpreter for the reference machine.

use crate::bits::BitString;
use crate::codec::{
    decode_exact, encode_efficient, encode_string_tuple, split_coded_head, CodeKind, Value,
};
use crate::quantum::{generate, pad_and_apply, synthesize_preparation, Circuit, PureState};

use super::program::{CircOp, Program, Xform};

/// Largest qubit count the circuit opcodes construct.
pub const MAX_QUBITS: u64 = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Halted { output: BitString, steps: u64 },
    /// Step budget exhausted.
    Diverged,
    /// Not a program: grammar violation, leftover bits or truncation.
    Invalid,
    /// A program whose run faults on this auxiliary tape.
    Undefined,
}

impl Outcome {
    pub fn output(&self) -> Option<&BitString> {
        match self {
            Outcome::Halted { output, .. } => Some(output),
            _ => None,
        }
    }
}

enum Stop {
    Diverged,
    Undefined,
}

struct Exec {
    steps: u64,
    limit: u64,
}

impl Exec {
    fn charge(&mut self, n: usize) -> Result<(), Stop> {
        self.steps = self.steps.saturating_add(n as u64);
        if self.steps > self.limit {
            Err(Stop::Diverged)
        } else {
            Ok(())
        }
    }

    fn eval(&mut self, p: &Program, aux: &[bool]) -> Result<BitString, Stop> {
        self.charge(1)?;
        let out = match p {
            Program::Lit(x) => x.clone(),
            Program::AuxCopy(n) => {
                let n = usize::try_from(*n).map_err(|_| Stop::Undefined)?;
                BitString::from_slice(aux.get(..n).ok_or(Stop::Undefined)?)
            }
            Program::Cat(p, q) => {
                let a = self.eval(p, aux)?;
                a.concat(&self.eval(q, aux)?)
            }
            Program::Pipe(p, q) => {
                let a = self.eval(p, aux)?;
                self.eval(q, a.as_slice())?
            }
            Program::Pair(p, q) => {
                let a = self.eval(p, aux)?;
                let b = self.eval(q, aux)?;
                encode_string_tuple(&[a, b])
            }
            Program::AuxTail(p) => {
                let (_, rest) = split_coded_head(aux).map_err(|_| Stop::Undefined)?;
                self.eval(p, rest)?
            }
            Program::AuxHead(p) => {
                let (head, _) = split_coded_head(aux).map_err(|_| Stop::Undefined)?;
                self.eval(p, head.as_slice())?
            }
            Program::Xform(x) => self.xform(*x, aux)?,
            Program::Circ(op) => circ(op, aux)?,
        };
        self.charge(out.len())?;
        Ok(out)
    }

    fn xform(&mut self, x: Xform, aux: &[bool]) -> Result<BitString, Stop> {
        let tape = BitString::from_slice(aux);
        Ok(match x {
            Xform::Identity => tape,
            Xform::Reverse => aux.iter().rev().copied().collect(),
            Xform::Complement => aux.iter().map(|b| !b).collect(),
            Xform::Swap => match decode_exact(&tape, CodeKind::StringTuple) {
                Ok(Value::StringTuple(v)) if v.len() == 2 => {
                    encode_string_tuple(&[v[1].clone(), v[0].clone()])
                }
                _ => return Err(Stop::Undefined),
            },
            Xform::Dup => encode_string_tuple(&[tape.clone(), tape]),
            Xform::Unwrap => match decode_exact(&tape, CodeKind::String) {
                Ok(Value::String(x)) => x,
                _ => return Err(Stop::Undefined),
            },
            Xform::Wrap => encode_efficient(&tape),
            Xform::Eval => {
                let inner = Program::parse(aux).map_err(|_| Stop::Undefined)?;
                self.eval(&inner, &[])?
            }
        })
    }
}

fn small_qubits(n: u64) -> Result<usize, Stop> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Stop::Undefined);
    }
    Ok(n as usize)
}

fn circ(op: &CircOp, aux: &[bool]) -> Result<BitString, Stop> {
    let tape = || BitString::from_slice(aux);
    let circuit = || Circuit::decode(&tape()).map_err(|_| Stop::Undefined);
    let out = match op {
        CircOp::Ident { qubits, inputs } => {
            let n = small_qubits(*qubits)?;
            if *inputs > *qubits {
                return Err(Stop::Undefined);
            }
            Circuit::identity(n, *inputs as usize)
                .map_err(|_| Stop::Undefined)?
                .encode()
        }
        CircOp::Prep => {
            let theta = PureState::decode(&tape()).map_err(|_| Stop::Undefined)?;
            if theta.qubits() as u64 > MAX_QUBITS {
                return Err(Stop::Undefined);
            }
            synthesize_preparation(&theta)
                .map_err(|_| Stop::Undefined)?
                .encode()
        }
        CircOp::Column(j) => {
            let c = circuit()?;
            let j = usize::try_from(*j).map_err(|_| Stop::Undefined)?;
            if j >= c.unitary().matrix().dim() {
                return Err(Stop::Undefined);
            }
            PureState::new(c.qubits(), c.unitary().matrix().column(j))
                .map_err(|_| Stop::Undefined)?
                .encode()
        }
        CircOp::Adjoint => {
            let c = circuit()?;
            Circuit::new(c.unitary().adjoint(), c.inputs())
                .map_err(|_| Stop::Undefined)?
                .encode()
        }
        CircOp::Apply => {
            let parts = match decode_exact(&tape(), CodeKind::StringTuple) {
                Ok(Value::StringTuple(v)) if v.len() == 2 => v,
                _ => return Err(Stop::Undefined),
            };
            let c = Circuit::decode(&parts[0]).map_err(|_| Stop::Undefined)?;
            let theta = PureState::decode(&parts[1]).map_err(|_| Stop::Undefined)?;
            pad_and_apply(&c, &theta)
                .map_err(|_| Stop::Undefined)?
                .encode()
        }
        CircOp::HState { qubits, bits } => {
            let n = small_qubits(*qubits)?;
            let k = usize::try_from(*bits).map_err(|_| Stop::Undefined)?;
            let head = aux.get(..k).ok_or(Stop::Undefined)?;
            generate::state_from_bits(n, head).encode()
        }
    };
    Ok(out)
}

/// Runs an already parsed program.
pub fn run_program(program: &Program, aux: &[bool], limit: u64) -> Outcome {
    let mut exec = Exec { steps: 0, limit };
    match exec.eval(program, aux) {
        Ok(output) => Outcome::Halted {
            output,
            steps: exec.steps,
        },
        Err(Stop::Diverged) => Outcome::Diverged,
        Err(Stop::Undefined) => Outcome::Undefined,
    }
}

/// Runs `program` on `aux` with at most `limit` steps. A step is one
/// opcode dispatch or one output bit produced by any node.
pub fn run(program: &BitString, aux: &BitString, limit: u64) -> Outcome {
    match Program::parse(program.as_slice()) {
        Ok(p) => run_program(&p, aux.as_slice(), limit),
        Err(_) => Outcome::Invalid,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        BitString::from(s)
    }

    fn out(p: &Program, aux: &str) -> BitString {
        run(&p.encode(), &bs(aux), 10_000).output().cloned().expect("halts")
    }

    #[test]
    fn literal_and_auxcopy() {
        assert_eq!(out(&Program::lit(&bs("101")), ""), bs("101"));
        assert_eq!(out(&Program::AuxCopy(3), "110110"), bs("110"));
        assert_eq!(
            run(&Program::AuxCopy(3).encode(), &bs("11"), 100),
            Outcome::Undefined
        );
    }

    #[test]
    fn extension_of_program_is_invalid() {
        let p = Program::lit(&bs("101")).encode();
        assert_eq!(run(&p.child(false), &BitString::new(), 100), Outcome::Invalid);
        assert_eq!(run(&p.prefix(p.len() - 1), &BitString::new(), 100), Outcome::Invalid);
    }

    #[test]
    fn budget_exhaustion() {
        let p = Program::lit(&BitString::repeat(true, 50));
        assert_eq!(run(&p.encode(), &BitString::new(), 10), Outcome::Diverged);
        assert!(matches!(run(&p.encode(), &BitString::new(), 51), Outcome::Halted { steps: 51, .. }));
    }

    #[test]
    fn composition() {
        let cat = Program::cat(Program::lit(&bs("1")), Program::AuxCopy(2));
        assert_eq!(out(&cat, "01"), bs("101"));
        let pipe = Program::pipe(Program::lit(&bs("0011")), Program::Xform(Xform::Reverse));
        assert_eq!(out(&pipe, ""), bs("1100"));
        let pair = Program::pair(Program::lit(&bs("1")), Program::lit(&bs("0")));
        assert_eq!(out(&pair, ""), encode_string_tuple(&[bs("1"), bs("0")]));
        let swapped = Program::pipe(pair, Program::Xform(Xform::Swap));
        assert_eq!(out(&swapped, ""), encode_string_tuple(&[bs("0"), bs("1")]));
    }

    #[test]
    fn aux_splitting_and_eval() {
        let aux = encode_efficient(&bs("11")).concat(&bs("0101"));
        assert_eq!(out(&Program::aux_tail(Program::AuxCopy(2)), &aux.to_string()), bs("01"));
        assert_eq!(out(&Program::aux_head(Program::Xform(Xform::Identity)), &aux.to_string()), bs("11"));
        let inner = Program::lit(&bs("111")).encode();
        assert_eq!(out(&Program::Xform(Xform::Eval), &inner.to_string()), bs("111"));
    }

    #[test]
    fn circuit_ops() {
        let ident = Program::Circ(CircOp::Ident { qubits: 1, inputs: 0 });
        let c = Circuit::decode(&out(&ident, "")).unwrap();
        assert!(c.unitary().matrix().is_identity());
        let col = Program::pipe(ident.clone(), Program::Circ(CircOp::Column(1)));
        assert_eq!(PureState::decode(&out(&col, "")).unwrap(), PureState::basis(1, 1));
        let prep = Program::pipe(col, Program::Circ(CircOp::Prep));
        let c = Circuit::decode(&out(&prep, "")).unwrap();
        assert_eq!(c.unitary().matrix().column(0), PureState::basis(1, 1).amplitudes());
        let h = Program::Circ(CircOp::HState { qubits: 1, bits: 2 });
        assert!(PureState::decode(&out(&h, "10")).unwrap().is_primitive());
        let bad = Program::Circ(CircOp::Ident { qubits: 1, inputs: 2 });
        assert_eq!(run(&bad.encode(), &BitString::new(), 1000), Outcome::Undefined);
    }
}
