//! Independent validity deciders: truth tables, a contraction-free sequent
//! calculus for intuitionistic logic, a small Kripke-model enumerator used
//! to validate it, and stable logic by reduction to intuitionistic logic.

mod classical;
mod intuitionistic;
mod kripke;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::formula::Formula;

pub use classical::{classical_countermodel, classical_valid};
pub use intuitionistic::intuitionistic_valid;
pub use kripke::{kripke_countermodel, kripke_valid, KripkeCountermodel};

/// Verdict plus a diagnostic witness (a countermodel or a short note).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleVerdict {
    pub valid: bool,
    pub witness: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("stability antecedent needs at least one atom")]
pub struct EmptyAtomSet;

/// `(~~p1 -> p1) & ((~~p2 -> p2) & ...)`, right-nested, in the given order.
pub fn stability_antecedent<S: AsRef<str>>(ps: &[S]) -> Result<Formula, EmptyAtomSet> {
    let guard = |p: &S| {
        let a = Formula::atom(p.as_ref());
        Formula::implies(Formula::not(Formula::not(a.clone())), a)
    };
    let (last, init) = ps.split_last().ok_or(EmptyAtomSet)?;
    Ok(init
        .iter()
        .rev()
        .fold(guard(last), |acc, p| Formula::and(guard(p), acc)))
}

/// Validity in stable logic: intuitionistic validity of `G -> f`, where `G`
/// is the stability antecedent for the atoms of `f`.
pub fn stable_valid(f: &Formula) -> bool {
    match stability_antecedent(&f.atoms()) {
        Ok(g) => intuitionistic_valid(&Formula::implies(g, f.clone())),
        Err(EmptyAtomSet) => intuitionistic_valid(f),
    }
}

/// The logics an experiment can compare dialogical verdicts against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Oracle {
    Classical,
    Intuitionistic,
    Stable,
}

impl Oracle {
    pub fn name(self) -> &'static str {
        match self {
            Oracle::Classical => "classical",
            Oracle::Intuitionistic => "intuitionistic",
            Oracle::Stable => "stable",
        }
    }

    pub fn valid(self, f: &Formula) -> bool {
        match self {
            Oracle::Classical => classical_valid(f),
            Oracle::Intuitionistic => intuitionistic_valid(f),
            Oracle::Stable => stable_valid(f),
        }
    }

    pub fn verdict(self, f: &Formula) -> OracleVerdict {
        match self {
            Oracle::Classical => match classical_countermodel(f) {
                None => OracleVerdict {
                    valid: true,
                    witness: "true under every assignment".into(),
                },
                Some(v) => OracleVerdict {
                    valid: false,
                    witness: format!("false under {v:?}"),
                },
            },
            Oracle::Intuitionistic | Oracle::Stable => {
                let valid = self.valid(f);
                let witness = if valid {
                    "provable in G4ip".to_string()
                } else {
                    match kripke_countermodel(f, 3) {
                        Some(m) if self == Oracle::Intuitionistic => m.to_string(),
                        _ => "no G4ip proof".to_string(),
                    }
                };
                OracleVerdict { valid, witness }
            }
        }
    }
}

impl fmt::Display for Oracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown oracle `{0}` (expected classical, intuitionistic or stable)")]
pub struct UnknownOracle(pub String);

impl FromStr for Oracle {
    type Err = UnknownOracle;

    fn from_str(s: &str) -> Result<Oracle, UnknownOracle> {
        match s.to_ascii_lowercase().as_str() {
            "classical" | "cl" => Ok(Oracle::Classical),
            "intuitionistic" | "il" => Ok(Oracle::Intuitionistic),
            "stable" | "stab" => Ok(Oracle::Stable),
            _ => Err(UnknownOracle(s.to_string())),
        }
    }
}
