#![allow(dead_code)]

use qfl_core::gate::Gate;
use rand::seq::SliceRandom;
use rand::Rng;

const ANGLES: [&str; 7] = ["pi/2", "0.3", "-1.25", "pi/3+0.1", "2*pi/7", "-pi/4", "pi-0.5"];

/// What a generated program may contain besides unitary gates.
#[derive(Debug, Clone, Copy, Default)]
pub struct Shape {
    pub measure_mid: bool,
    pub guards: bool,
    pub barrier_reset: bool,
    pub measure_all: bool,
}

impl Shape {
    pub fn unitary() -> Self {
        Shape::default()
    }

    pub fn everything() -> Self {
        Shape {
            measure_mid: true,
            guards: true,
            barrier_reset: true,
            measure_all: true,
        }
    }
}

fn gate_line<R: Rng>(rng: &mut R, qubits: usize) -> String {
    let usable: Vec<Gate> = Gate::ALL.iter().copied().filter(|g| g.arity() <= qubits).collect();
    let g = *usable.choose(rng).unwrap();
    let mut wires: Vec<usize> = (0..qubits).collect();
    wires.shuffle(rng);
    let operands: Vec<String> = wires[..g.arity()].iter().map(|w| format!("q[{w}]")).collect();
    let params = if g.param_count() == 0 {
        String::new()
    } else {
        format!("({})", ANGLES.choose(rng).unwrap())
    };
    format!("{}{} {};", g.name(), params, operands.join(","))
}

/// Random program text with `1..=max_qubits` qubits and up to `max_gates`
/// statements drawn according to `shape`.
pub fn random_source<R: Rng>(rng: &mut R, max_qubits: usize, max_gates: usize, shape: Shape) -> String {
    let n = rng.gen_range(1..=max_qubits);
    let len = rng.gen_range(0..=max_gates);
    let mut src = format!("qreg q[{n}];\ncreg c[{n}];\n");
    for _ in 0..len {
        let roll: u8 = rng.gen_range(0..10);
        let line = match roll {
            0 if shape.measure_mid => {
                let w = rng.gen_range(0..n);
                format!("measure q[{w}] -> c[{}];", rng.gen_range(0..n))
            }
            1 if shape.guards => format!("if (c=={}) {}", rng.gen_range(0..(1u64 << n)), gate_line(rng, n)),
            2 if shape.barrier_reset => {
                if rng.gen_bool(0.5) {
                    "barrier q;".to_string()
                } else {
                    format!("reset q[{}];", rng.gen_range(0..n))
                }
            }
            _ => gate_line(rng, n),
        };
        src.push_str(&line);
        src.push('\n');
    }
    if shape.measure_all {
        for w in 0..n {
            src.push_str(&format!("measure q[{w}] -> c[{w}];\n"));
        }
    }
    src
}
