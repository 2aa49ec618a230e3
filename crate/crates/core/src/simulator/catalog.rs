//! Unitary matrices for the gate vocabulary.
//!
//! Matrices are row-major over the local basis of the gate's operands, with
//! operand `j` mapped to bit `j` of the local index. For `cx a,b` the local
//! index is `a + 2b`, so the control is operand 0.

use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::gate::Gate;

/// Square matrix of dimension `2^arity`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub dim: usize,
    pub data: Vec<Complex64>,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

impl Matrix {
    fn from_rows(rows: &[&[Complex64]]) -> Self {
        let dim = rows.len();
        Matrix {
            dim,
            data: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    fn diagonal(diag: &[Complex64]) -> Self {
        let dim = diag.len();
        let mut data = vec![ZERO; dim * dim];
        for (i, d) in diag.iter().enumerate() {
            data[i * dim + i] = *d;
        }
        Matrix { dim, data }
    }

    /// Permutation matrix sending basis state `i` to `perm(i)`.
    fn permutation(dim: usize, perm: impl Fn(usize) -> usize) -> Self {
        let mut data = vec![ZERO; dim * dim];
        for i in 0..dim {
            data[perm(i) * dim + i] = ONE;
        }
        Matrix { dim, data }
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    /// Largest entry-wise deviation of `U†U` from the identity.
    pub fn unitarity_error(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut acc = ZERO;
                for k in 0..n {
                    acc += self.get(k, i).conj() * self.get(k, j);
                }
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((acc - target).norm());
            }
        }
        worst
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn phase(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

/// Unitary for `gate` with already-evaluated parameters.
pub fn matrix(gate: Gate, params: &[f64]) -> Matrix {
    let theta = params.first().copied().unwrap_or(0.0);
    let (ch, sh) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let r = FRAC_1_SQRT_2;
    match gate {
        Gate::Id => Matrix::diagonal(&[ONE, ONE]),
        Gate::X => Matrix::from_rows(&[&[ZERO, ONE], &[ONE, ZERO]]),
        Gate::Y => Matrix::from_rows(&[&[ZERO, c(0.0, -1.0)], &[c(0.0, 1.0), ZERO]]),
        Gate::Z => Matrix::diagonal(&[ONE, c(-1.0, 0.0)]),
        Gate::H => Matrix::from_rows(&[&[c(r, 0.0), c(r, 0.0)], &[c(r, 0.0), c(-r, 0.0)]]),
        Gate::S => Matrix::diagonal(&[ONE, c(0.0, 1.0)]),
        Gate::Sdg => Matrix::diagonal(&[ONE, c(0.0, -1.0)]),
        Gate::T => Matrix::diagonal(&[ONE, c(r, r)]),
        Gate::Tdg => Matrix::diagonal(&[ONE, c(r, -r)]),
        Gate::Rx => Matrix::from_rows(&[&[c(ch, 0.0), c(0.0, -sh)], &[c(0.0, -sh), c(ch, 0.0)]]),
        Gate::Ry => Matrix::from_rows(&[&[c(ch, 0.0), c(-sh, 0.0)], &[c(sh, 0.0), c(ch, 0.0)]]),
        Gate::Rz => Matrix::diagonal(&[phase(-theta / 2.0), phase(theta / 2.0)]),
        Gate::P => Matrix::diagonal(&[ONE, phase(theta)]),
        // control = bit 0, target = bit 1
        Gate::Cx => Matrix::permutation(4, |i| if i & 1 == 1 { i ^ 2 } else { i }),
        Gate::Cz => Matrix::diagonal(&[ONE, ONE, ONE, c(-1.0, 0.0)]),
        Gate::Swap => Matrix::permutation(4, |i| ((i & 1) << 1) | ((i >> 1) & 1)),
        // controls = bits 0,1; target = bit 2
        Gate::Ccx => Matrix::permutation(8, |i| if i & 3 == 3 { i ^ 4 } else { i }),
        // control = bit 0; swap bits 1 and 2
        Gate::Cswap => Matrix::permutation(8, |i| {
            if i & 1 == 1 {
                let (b1, b2) = ((i >> 1) & 1, (i >> 2) & 1);
                1 | (b2 << 1) | (b1 << 2)
            } else {
                i
            }
        }),
    }
}

/// Tolerance for the one-time unitarity check.
pub const UNITARITY_TOLERANCE: f64 = 1e-12;

/// Gate table checked for unitarity on first use.
#[derive(Debug)]
pub struct GateCatalog {
    _checked: (),
}

impl GateCatalog {
    /// Probe angles for parameterized gates.
    const PROBE_ANGLES: [f64; 6] = [0.0, 0.3, 1.0, std::f64::consts::PI, -2.5, 7.0];

    pub fn global() -> &'static GateCatalog {
        static CATALOG: OnceLock<GateCatalog> = OnceLock::new();
        CATALOG.get_or_init(|| {
            if let Err((gate, err)) = Self::verify(UNITARITY_TOLERANCE) {
                panic!("gate `{gate}` is not unitary (error {err:e})");
            }
            GateCatalog { _checked: () }
        })
    }

    /// Check every gate's matrix, returning the first offender.
    pub fn verify(tolerance: f64) -> Result<(), (Gate, f64)> {
        for gate in Gate::ALL {
            let angles: &[f64] = if gate.param_count() == 0 {
                &[0.0]
            } else {
                &Self::PROBE_ANGLES
            };
            for &a in angles {
                let m = matrix(gate, &[a]);
                assert_eq!(m.dim, 1 << gate.arity());
                let err = m.unitarity_error();
                if err > tolerance {
                    return Err((gate, err));
                }
            }
        }
        Ok(())
    }

    pub fn matrix(&self, gate: Gate, params: &[f64]) -> Matrix {
        matrix(gate, params)
    }
}
