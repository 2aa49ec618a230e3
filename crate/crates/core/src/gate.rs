//! The fixed gate vocabulary of the circuit language.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Every gate the language accepts. There are no user-defined gates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gate {
    Id,
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    T,
    Tdg,
    Rx,
    Ry,
    Rz,
    P,
    Cx,
    Cz,
    Swap,
    Ccx,
    Cswap,
}

impl Gate {
    pub const ALL: [Gate; 18] = [
        Gate::Id,
        Gate::X,
        Gate::Y,
        Gate::Z,
        Gate::H,
        Gate::S,
        Gate::Sdg,
        Gate::T,
        Gate::Tdg,
        Gate::Rx,
        Gate::Ry,
        Gate::Rz,
        Gate::P,
        Gate::Cx,
        Gate::Cz,
        Gate::Swap,
        Gate::Ccx,
        Gate::Cswap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Gate::Id => "id",
            Gate::X => "x",
            Gate::Y => "y",
            Gate::Z => "z",
            Gate::H => "h",
            Gate::S => "s",
            Gate::Sdg => "sdg",
            Gate::T => "t",
            Gate::Tdg => "tdg",
            Gate::Rx => "rx",
            Gate::Ry => "ry",
            Gate::Rz => "rz",
            Gate::P => "p",
            Gate::Cx => "cx",
            Gate::Cz => "cz",
            Gate::Swap => "swap",
            Gate::Ccx => "ccx",
            Gate::Cswap => "cswap",
        }
    }

    pub fn from_name(name: &str) -> Option<Gate> {
        Gate::ALL.iter().copied().find(|g| g.name() == name)
    }

    /// Number of qubit operands.
    pub fn arity(self) -> usize {
        match self {
            Gate::Cx | Gate::Cz | Gate::Swap => 2,
            Gate::Ccx | Gate::Cswap => 3,
            _ => 1,
        }
    }

    /// Number of angle parameters.
    pub fn param_count(self) -> usize {
        match self {
            Gate::Rx | Gate::Ry | Gate::Rz | Gate::P => 1,
            _ => 0,
        }
    }

    /// Gates sharing arity and parameter count, in catalog order. Gate
    /// replacement mutants stay inside this family so operands and
    /// parameters carry over unchanged.
    pub fn family(self) -> &'static [Gate] {
        const FIXED_1Q: [Gate; 9] = [
            Gate::Id,
            Gate::X,
            Gate::Y,
            Gate::Z,
            Gate::H,
            Gate::S,
            Gate::Sdg,
            Gate::T,
            Gate::Tdg,
        ];
        const ROTATIONS: [Gate; 4] = [Gate::Rx, Gate::Ry, Gate::Rz, Gate::P];
        const TWO_Q: [Gate; 3] = [Gate::Cx, Gate::Cz, Gate::Swap];
        const THREE_Q: [Gate; 2] = [Gate::Ccx, Gate::Cswap];
        match (self.arity(), self.param_count()) {
            (1, 0) => &FIXED_1Q,
            (1, _) => &ROTATIONS,
            (2, _) => &TWO_Q,
            _ => &THREE_Q,
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Gate {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Gate::from_name(s).ok_or_else(|| format!("unknown gate `{s}`"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for g in Gate::ALL {
            assert_eq!(Gate::from_name(g.name()), Some(g));
        }
        assert_eq!(Gate::from_name("u3"), None);
    }

    #[test]
    fn families_share_shape() {
        for g in Gate::ALL {
            let fam = g.family();
            assert!(fam.contains(&g));
            for other in fam {
                assert_eq!(other.arity(), g.arity());
                assert_eq!(other.param_count(), g.param_count());
            }
        }
        assert_eq!(Gate::H.family().len(), 9);
        assert_eq!(Gate::Ccx.family(), &[Gate::Ccx, Gate::Cswap]);
    }
}
