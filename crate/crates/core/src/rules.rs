//! Structural rules as move filters, and the ruleset registry.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dialogue::{Move, Player, Stance, Statement};
use crate::formula::Formula;

/// Identifier of a structural rule. The derived order is the evaluation
/// order used when naming the first violated rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StructuralRuleId {
    /// P may assert an atom only if O asserted it before.
    D10,
    /// D10, but O's earlier `~a` also licenses `a`.
    D10Star,
    /// D10, but O's earlier `~~a` also licenses `a`.
    D10Prime,
    /// A defense answers the most recent open attack of the other player.
    D11,
    /// No attack is defended twice.
    D12,
    /// O attacks each P assertion at most once.
    D13,
    /// O reacts only to the immediately preceding move.
    E,
}

impl StructuralRuleId {
    pub const ALL: [StructuralRuleId; 7] = [
        StructuralRuleId::D10,
        StructuralRuleId::D10Star,
        StructuralRuleId::D10Prime,
        StructuralRuleId::D11,
        StructuralRuleId::D12,
        StructuralRuleId::D13,
        StructuralRuleId::E,
    ];

    pub fn label(self) -> &'static str {
        match self {
            StructuralRuleId::D10 => "D10",
            StructuralRuleId::D10Star => "D10*",
            StructuralRuleId::D10Prime => "D10'",
            StructuralRuleId::D11 => "D11",
            StructuralRuleId::D12 => "D12",
            StructuralRuleId::D13 => "D13",
            StructuralRuleId::E => "E",
        }
    }

    /// One-line statement of the rule.
    pub fn description(self) -> &'static str {
        match self {
            StructuralRuleId::D10 => "P may assert an atom only after O has asserted it",
            StructuralRuleId::D10Star => {
                "P may assert an atom p only after O has asserted p or ~p"
            }
            StructuralRuleId::D10Prime => {
                "P may assert an atom p only after O has asserted p or ~~p"
            }
            StructuralRuleId::D11 => {
                "a defense must answer the most recent open attack of the other player"
            }
            StructuralRuleId::D12 => "an attack may be answered at most once",
            StructuralRuleId::D13 => "O may attack each assertion of P at most once",
            StructuralRuleId::E => "O must react to the immediately preceding move",
        }
    }

    fn is_atom_rule(self) -> bool {
        matches!(
            self,
            StructuralRuleId::D10 | StructuralRuleId::D10Star | StructuralRuleId::D10Prime
        )
    }
}

impl fmt::Display for StructuralRuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for StructuralRuleId {
    type Err = RulesetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "D10" => Ok(StructuralRuleId::D10),
            "D10*" | "D10Star" => Ok(StructuralRuleId::D10Star),
            "D10'" | "D10′" | "D10Prime" => Ok(StructuralRuleId::D10Prime),
            "D11" => Ok(StructuralRuleId::D11),
            "D12" => Ok(StructuralRuleId::D12),
            "D13" => Ok(StructuralRuleId::D13),
            "E" => Ok(StructuralRuleId::E),
            other => Err(RulesetError::UnknownRule(other.to_string())),
        }
    }
}

impl Serialize for StructuralRuleId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for StructuralRuleId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RulesetError {
    #[error("unknown ruleset `{0}` (expected D, E, CL, N, E*, E' or a comma-separated rule list)")]
    UnknownRuleset(String),
    #[error("unknown structural rule `{0}`")]
    UnknownRule(String),
    #[error("conflicting atom rules: at most one of D10, D10*, D10' may be present")]
    ConflictingAtomRules,
}

/// A named set of structural rules.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ruleset {
    name: String,
    rules: BTreeSet<StructuralRuleId>,
}

/// Names of the frozen presets, in registry order.
pub const PRESET_NAMES: [&str; 6] = ["D", "E", "CL", "N", "E*", "E'"];

impl Ruleset {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Rules in evaluation order.
    pub fn rules(&self) -> impl Iterator<Item = StructuralRuleId> + '_ {
        self.rules.iter().copied()
    }

    pub fn has(&self, id: StructuralRuleId) -> bool {
        self.rules.contains(&id)
    }

    /// The atom-assertion rule in force, if any.
    pub fn atom_rule(&self) -> Option<StructuralRuleId> {
        self.rules.iter().copied().find(|r| r.is_atom_rule())
    }

    /// Comma-separated rule list, accepted back by [`parse_ruleset`].
    pub fn rule_list(&self) -> String {
        self.rules
            .iter()
            .map(|r| r.label())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Text that [`parse_ruleset`] maps back to an equal rule set: the preset
    /// name for presets, the rule list otherwise.
    pub fn spec_text(&self) -> String {
        if PRESET_NAMES.contains(&self.name.as_str()) {
            self.name.clone()
        } else {
            self.rule_list()
        }
    }

    /// Same ruleset minus one rule; used for subsumption checks.
    pub fn without(&self, id: StructuralRuleId) -> Ruleset {
        let mut rules = self.rules.clone();
        rules.remove(&id);
        Ruleset {
            name: format!("{}-{}", self.name, id.label()),
            rules,
        }
    }
}

impl fmt::Display for Ruleset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {{{}}}", self.name, self.rule_list())
    }
}

impl Serialize for Ruleset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.spec_text())
    }
}

impl<'de> Deserialize<'de> for Ruleset {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_ruleset(&text).map_err(serde::de::Error::custom)
    }
}

/// Builds a custom ruleset. Fails if more than one D10 variant is present.
pub fn compose_ruleset(
    name: &str,
    ids: impl IntoIterator<Item = StructuralRuleId>,
) -> Result<Ruleset, RulesetError> {
    let rules: BTreeSet<StructuralRuleId> = ids.into_iter().collect();
    if rules.iter().filter(|r| r.is_atom_rule()).count() > 1 {
        return Err(RulesetError::ConflictingAtomRules);
    }
    Ok(Ruleset {
        name: name.to_string(),
        rules,
    })
}

/// One of the frozen presets `D`, `E`, `CL`, `N`, `E*`, `E'`.
pub fn named_ruleset(name: &str) -> Result<Ruleset, RulesetError> {
    use StructuralRuleId::*;
    let (canonical, ids): (&str, &[StructuralRuleId]) = match name.trim() {
        "D" => ("D", &[D10, D11, D12, D13]),
        "E" => ("E", &[D10, D11, D12, D13, E]),
        "CL" => ("CL", &[D10, D13, E]),
        "N" => ("N", &[D10, D13]),
        "E*" => ("E*", &[D10Star, D11, D12, D13, E]),
        "E'" | "E′" => ("E'", &[D10Prime, D11, D12, D13, E]),
        other => return Err(RulesetError::UnknownRuleset(other.to_string())),
    };
    compose_ruleset(canonical, ids.iter().copied())
}

/// Accepts a preset name or a comma-separated list of rule ids such as
/// `D10,D13,E`. The empty string and `bare` give the empty ruleset.
pub fn parse_ruleset(text: &str) -> Result<Ruleset, RulesetError> {
    let text = text.trim();
    if let Ok(rs) = named_ruleset(text) {
        return Ok(rs);
    }
    if text.is_empty() || text == "bare" {
        return compose_ruleset("bare", []);
    }
    let mut ids = Vec::new();
    for part in text.split(',') {
        match part.parse::<StructuralRuleId>() {
            Ok(id) => ids.push(id),
            Err(_) if !text.contains(',') => {
                return Err(RulesetError::UnknownRuleset(text.to_string()))
            }
            Err(e) => return Err(e),
        }
    }
    let name = ids.iter().map(|i| i.label()).collect::<Vec<_>>().join(",");
    compose_ruleset(&name, ids)
}

/// All presets, in registry order.
pub fn presets() -> Vec<Ruleset> {
    PRESET_NAMES
        .iter()
        .map(|n| named_ruleset(n).expect("preset"))
        .collect()
}

fn asserted(m: &Move) -> Option<&Formula> {
    match &m.statement {
        Statement::Formula(f) => Some(f),
        Statement::Symbolic(_) => None,
    }
}

fn defended(prefix: &[Move], attack: usize) -> bool {
    prefix
        .iter()
        .any(|x| x.stance == Stance::Defense && x.reference == Some(attack))
}

/// Most recent attack by `attacker` that no defense references yet.
pub(crate) fn most_recent_open_attack(prefix: &[Move], attacker: Player) -> Option<usize> {
    (0..prefix.len()).rev().find(|&i| {
        prefix[i].player == attacker && prefix[i].stance == Stance::Attack && !defended(prefix, i)
    })
}

/// Whether rule `id` allows appending `m` to `prefix`. `m` is assumed to be
/// particle-legal for the player to move.
pub fn rule_permits(id: StructuralRuleId, prefix: &[Move], m: &Move) -> bool {
    match id {
        StructuralRuleId::D10 | StructuralRuleId::D10Star | StructuralRuleId::D10Prime => {
            if m.player != Player::P {
                return true;
            }
            let name = match asserted(m).and_then(|f| f.atom_name()) {
                Some(name) => name,
                None => return true,
            };
            prefix.iter().filter(|x| x.player == Player::O).any(|x| {
                match asserted(x) {
                    Some(Formula::Atom(a)) => &**a == name,
                    Some(Formula::Not(inner)) => match (&**inner, id) {
                        (Formula::Atom(a), StructuralRuleId::D10Star) => &**a == name,
                        (Formula::Not(inner2), StructuralRuleId::D10Prime) => {
                            inner2.atom_name() == Some(name)
                        }
                        _ => false,
                    },
                    _ => false,
                }
            })
        }
        StructuralRuleId::D11 => {
            if m.stance != Stance::Defense {
                return true;
            }
            let attacker = m.player.other();
            m.reference.is_some() && m.reference == most_recent_open_attack(prefix, attacker)
        }
        StructuralRuleId::D12 => match (m.stance, m.reference) {
            (Stance::Defense, Some(r)) => !defended(prefix, r),
            _ => true,
        },
        StructuralRuleId::D13 => match (m.player, m.stance, m.reference) {
            (Player::O, Stance::Attack, Some(r)) => !prefix.iter().any(|x| {
                x.player == Player::O && x.stance == Stance::Attack && x.reference == Some(r)
            }),
            _ => true,
        },
        StructuralRuleId::E => {
            if m.player != Player::O {
                return true;
            }
            !prefix.is_empty() && m.reference == Some(prefix.len() - 1)
        }
    }
}

/// The first rule of `rs` (in evaluation order) that rejects `m`.
pub fn first_violation(rs: &Ruleset, prefix: &[Move], m: &Move) -> Option<StructuralRuleId> {
    rs.rules().find(|&id| !rule_permits(id, prefix, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use StructuralRuleId::*;

    #[test]
    fn presets_are_frozen() {
        let ids = |n: &str| named_ruleset(n).unwrap().rules().collect::<Vec<_>>();
        assert_eq!(ids("D"), vec![D10, D11, D12, D13]);
        assert_eq!(ids("E"), vec![D10, D11, D12, D13, E]);
        assert_eq!(ids("CL"), vec![D10, D13, E]);
        assert_eq!(ids("N"), vec![D10, D13]);
        assert_eq!(ids("E*"), vec![D10Star, D11, D12, D13, E]);
        assert_eq!(ids("E'"), vec![D10Prime, D11, D12, D13, E]);
        assert!(named_ruleset("X").is_err());
    }

    #[test]
    fn compose_checks_conflicts() {
        let rs = compose_ruleset("E-minus-D11", [D10, D12, D13, E]).unwrap();
        assert!(rs.has(D12) && !rs.has(D11));
        assert_eq!(
            compose_ruleset("bad", [D10, D10Star]),
            Err(RulesetError::ConflictingAtomRules)
        );
        let bare = compose_ruleset("bare", []).unwrap();
        assert_eq!(bare.rules().count(), 0);
    }

    #[test]
    fn parses_names_and_lists() {
        assert_eq!(parse_ruleset("CL").unwrap(), named_ruleset("CL").unwrap());
        let custom = parse_ruleset("D10,D13,E").unwrap();
        assert_eq!(custom.rules().collect::<Vec<_>>(), vec![D10, D13, E]);
        assert_eq!(
            parse_ruleset("D10*, D11").unwrap().rules().collect::<Vec<_>>(),
            vec![D10Star, D11]
        );
        assert_eq!(
            parse_ruleset("D10'").unwrap().rules().collect::<Vec<_>>(),
            vec![D10Prime]
        );
        assert!(matches!(
            parse_ruleset("D10,D99"),
            Err(RulesetError::UnknownRule(_))
        ));
        assert!(matches!(
            parse_ruleset("Q"),
            Err(RulesetError::UnknownRuleset(_))
        ));
        let rs = parse_ruleset("D10,D13,E").unwrap();
        assert_eq!(parse_ruleset(&rs.spec_text()).unwrap().rule_list(), rs.rule_list());
    }
}
