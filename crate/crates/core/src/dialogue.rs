//! Statements, moves, particle rules and dialogue state.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{parse, Formula, ParseError};
use crate::rules::{first_violation, StructuralRuleId, Ruleset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Player {
    P,
    O,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::P => Player::O,
            Player::O => Player::P,
        }
    }

    /// The player who moves at `position`: P at even positions.
    pub fn at(position: usize) -> Player {
        if position % 2 == 0 {
            Player::P
        } else {
            Player::O
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::P => "P",
            Player::O => "O",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Stance {
    #[serde(rename = "A")]
    Attack,
    #[serde(rename = "D")]
    Defense,
    #[serde(rename = "I")]
    Initial,
}

impl Stance {
    pub fn letter(self) -> &'static str {
        match self {
            Stance::Attack => "A",
            Stance::Defense => "D",
            Stance::Initial => "I",
        }
    }
}

/// Attack tokens that are not formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolicAttack {
    /// `?`, asking for a disjunct.
    Which,
    /// `&L`, asking for the left conjunct.
    Left,
    /// `&R`, asking for the right conjunct.
    Right,
}

impl SymbolicAttack {
    pub fn token(self) -> &'static str {
        match self {
            SymbolicAttack::Which => "?",
            SymbolicAttack::Left => "&L",
            SymbolicAttack::Right => "&R",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Statement {
    Formula(Formula),
    Symbolic(SymbolicAttack),
}

impl Statement {
    pub fn formula(&self) -> Option<&Formula> {
        match self {
            Statement::Formula(f) => Some(f),
            Statement::Symbolic(_) => None,
        }
    }

    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Formula(x) => write!(f, "{x}"),
            Statement::Symbolic(s) => f.write_str(s.token()),
        }
    }
}

impl FromStr for Statement {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "?" => Ok(Statement::Symbolic(SymbolicAttack::Which)),
            "&L" => Ok(Statement::Symbolic(SymbolicAttack::Left)),
            "&R" => Ok(Statement::Symbolic(SymbolicAttack::Right)),
            text => parse(text).map(Statement::Formula),
        }
    }
}

impl From<Formula> for Statement {
    fn from(f: Formula) -> Self {
        Statement::Formula(f)
    }
}

impl Serialize for Statement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.render())
    }
}

impl<'de> Deserialize<'de> for Statement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Attack statements against `s`.
pub fn attacks_against(s: &Statement) -> Vec<Statement> {
    match s {
        Statement::Symbolic(_) => vec![],
        Statement::Formula(f) => match f {
            Formula::Atom(_) => vec![],
            Formula::Not(a) => vec![Statement::Formula((**a).clone())],
            Formula::And(..) => vec![
                Statement::Symbolic(SymbolicAttack::Left),
                Statement::Symbolic(SymbolicAttack::Right),
            ],
            Formula::Or(..) => vec![Statement::Symbolic(SymbolicAttack::Which)],
            Formula::Implies(a, _) => vec![Statement::Formula((**a).clone())],
        },
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("`{attack}` is not an attack on `{attacked}`")]
pub struct NotApplicable {
    pub attacked: String,
    pub attack: String,
}

/// Defenses of `attacked` against `attack`; empty for negations.
pub fn defenses_against(attacked: &Formula, attack: &Statement) -> Result<Vec<Formula>, NotApplicable> {
    let bad = || NotApplicable {
        attacked: attacked.render(),
        attack: attack.render(),
    };
    match (attacked, attack) {
        (Formula::And(l, _), Statement::Symbolic(SymbolicAttack::Left)) => Ok(vec![(**l).clone()]),
        (Formula::And(_, r), Statement::Symbolic(SymbolicAttack::Right)) => Ok(vec![(**r).clone()]),
        (Formula::Or(l, r), Statement::Symbolic(SymbolicAttack::Which)) => {
            Ok(vec![(**l).clone(), (**r).clone()])
        }
        (Formula::Implies(a, b), Statement::Formula(x)) if **a == *x => Ok(vec![(**b).clone()]),
        (Formula::Not(a), Statement::Formula(x)) if **a == *x => Ok(vec![]),
        _ => Err(bad()),
    }
}

/// One dialogue step.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Move {
    pub player: Player,
    pub stance: Stance,
    pub statement: Statement,
    #[serde(rename = "ref")]
    pub reference: Option<usize>,
}

impl Move {
    pub fn initial(f: Formula) -> Move {
        Move {
            player: Player::P,
            stance: Stance::Initial,
            statement: Statement::Formula(f),
            reference: None,
        }
    }

    pub fn attack(player: Player, statement: Statement, target: usize) -> Move {
        Move {
            player,
            stance: Stance::Attack,
            statement,
            reference: Some(target),
        }
    }

    pub fn defense(player: Player, f: Formula, attack: usize) -> Move {
        Move {
            player,
            stance: Stance::Defense,
            statement: Statement::Formula(f),
            reference: Some(attack),
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.player, self.statement, self.stance.letter())?;
        if let Some(r) = self.reference {
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

/// Ways a move can break the particle rules or the turn order.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParticleViolation {
    #[error("it is {expected}'s turn")]
    WrongPlayer { expected: Player },
    #[error("the initial stance is reserved for P at position 0")]
    MisplacedInitial,
    #[error("the first move must be P's initial assertion")]
    MissingInitial,
    #[error("non-initial moves must reference an earlier position")]
    MissingReference,
    #[error("reference {0} does not point to an earlier move")]
    DanglingReference(usize),
    #[error("move {0} belongs to the same player")]
    OwnMove(usize),
    #[error("move {0} does not assert a formula")]
    NotAnAssertion(usize),
    #[error("`{statement}` is not an attack on move {target}")]
    NotAnAttackOn { target: usize, statement: String },
    #[error("move {0} is not an attack")]
    NotAnAttack(usize),
    #[error("`{statement}` is not a defense against attack {attack}")]
    NotADefenseAgainst { attack: usize, statement: String },
}

/// Why a move was rejected: a structural rule or a particle rule.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("{0}")]
    Rule(StructuralRuleId),
    #[error("particle rule: {0}")]
    Particle(ParticleViolation),
}

impl Violation {
    /// Rule label (`D10`, `E`, ...) or `particle`.
    pub fn code(&self) -> String {
        match self {
            Violation::Rule(id) => id.label().to_string(),
            Violation::Particle(_) => "particle".to_string(),
        }
    }

    pub fn rule(&self) -> Option<StructuralRuleId> {
        match self {
            Violation::Rule(id) => Some(*id),
            Violation::Particle(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DialogueError {
    #[error("initial move is illegal: {0}")]
    InitialMoveIllegal(Violation),
    #[error("illegal move at position {position}: {violation}")]
    IllegalMove { position: usize, violation: Violation },
    #[error("move {index} cannot be replayed: {cause}")]
    Replay { index: usize, cause: Violation },
}

impl DialogueError {
    pub fn violation(&self) -> &Violation {
        match self {
            DialogueError::InitialMoveIllegal(v) => v,
            DialogueError::IllegalMove { violation, .. } => violation,
            DialogueError::Replay { cause, .. } => cause,
        }
    }
}

/// A dialogue under a ruleset; every prefix was legal when extended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dialogue {
    ruleset: Ruleset,
    moves: Vec<Move>,
}

/// Particle check of `m` as the next move after `prefix`.
pub fn particle_check(prefix: &[Move], m: &Move) -> Result<(), ParticleViolation> {
    let position = prefix.len();
    let expected = Player::at(position);
    if m.player != expected {
        return Err(ParticleViolation::WrongPlayer { expected });
    }
    if position == 0 {
        return match (&m.stance, &m.statement) {
            (Stance::Initial, Statement::Formula(_)) => Ok(()),
            _ => Err(ParticleViolation::MissingInitial),
        };
    }
    if m.stance == Stance::Initial {
        return Err(ParticleViolation::MisplacedInitial);
    }
    let r = m.reference.ok_or(ParticleViolation::MissingReference)?;
    let target = prefix.get(r).ok_or(ParticleViolation::DanglingReference(r))?;
    if target.player == m.player {
        return Err(ParticleViolation::OwnMove(r));
    }
    match m.stance {
        Stance::Attack => {
            if target.statement.formula().is_none() {
                return Err(ParticleViolation::NotAnAssertion(r));
            }
            if !attacks_against(&target.statement).contains(&m.statement) {
                return Err(ParticleViolation::NotAnAttackOn {
                    target: r,
                    statement: m.statement.render(),
                });
            }
            Ok(())
        }
        Stance::Defense => {
            if target.stance != Stance::Attack {
                return Err(ParticleViolation::NotAnAttack(r));
            }
            let attacked = target
                .reference
                .and_then(|k| prefix[k].statement.formula())
                .expect("attacks target formula assertions");
            let ok = match (&m.statement, defenses_against(attacked, &target.statement)) {
                (Statement::Formula(f), Ok(ds)) => ds.contains(f),
                _ => false,
            };
            if ok {
                Ok(())
            } else {
                Err(ParticleViolation::NotADefenseAgainst {
                    attack: r,
                    statement: m.statement.render(),
                })
            }
        }
        Stance::Initial => unreachable!(),
    }
}

/// Full legality check: particle rules first, then structural rules in order.
pub fn check_move(rs: &Ruleset, prefix: &[Move], m: &Move) -> Result<(), Violation> {
    particle_check(prefix, m).map_err(Violation::Particle)?;
    match first_violation(rs, prefix, m) {
        Some(id) => Err(Violation::Rule(id)),
        None => Ok(()),
    }
}

/// Particle-legal candidates for the next move, in the contract order:
/// attacks before defenses, then by reference, then by statement text.
pub fn particle_candidates(prefix: &[Move]) -> Vec<Move> {
    let player = Player::at(prefix.len());
    let mut out: Vec<(u8, usize, String, Move)> = Vec::new();
    for (j, target) in prefix.iter().enumerate() {
        if target.player == player {
            continue;
        }
        for a in attacks_against(&target.statement) {
            let m = Move::attack(player, a, j);
            out.push((0, j, m.statement.render(), m));
        }
        if target.stance == Stance::Attack {
            let attacked = target
                .reference
                .and_then(|k| prefix[k].statement.formula())
                .expect("attacks target formula assertions");
            if let Ok(ds) = defenses_against(attacked, &target.statement) {
                for d in ds {
                    let m = Move::defense(player, d, j);
                    out.push((1, j, m.statement.render(), m));
                }
            }
        }
    }
    out.sort_by(|a, b| (a.0, a.1, &a.2).cmp(&(b.0, b.1, &b.2)));
    out.dedup_by(|a, b| a.3 == b.3);
    out.into_iter().map(|x| x.3).collect()
}

/// Legal next moves after `prefix` under `rs`.
pub fn legal_moves_after(rs: &Ruleset, prefix: &[Move]) -> Vec<Move> {
    if prefix.is_empty() {
        return vec![];
    }
    particle_candidates(prefix)
        .into_iter()
        .filter(|m| first_violation(rs, prefix, m).is_none())
        .collect()
}

impl Dialogue {
    /// Starts a dialogue with P's assertion of `f`, which must itself pass
    /// the structural rules.
    pub fn new(f: Formula, rs: Ruleset) -> Result<Dialogue, DialogueError> {
        let m = Move::initial(f);
        check_move(&rs, &[], &m).map_err(DialogueError::InitialMoveIllegal)?;
        Ok(Dialogue {
            ruleset: rs,
            moves: vec![m],
        })
    }

    pub fn ruleset(&self) -> &Ruleset {
        &self.ruleset
    }

    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn thesis(&self) -> &Formula {
        self.moves[0].statement.formula().expect("initial move asserts a formula")
    }

    pub fn to_move(&self) -> Player {
        Player::at(self.moves.len())
    }

    pub fn legal_moves(&self) -> Vec<Move> {
        legal_moves_after(&self.ruleset, &self.moves)
    }

    pub fn check(&self, m: &Move) -> Result<(), Violation> {
        check_move(&self.ruleset, &self.moves, m)
    }

    /// A new dialogue extended by `m`, if legal.
    pub fn apply_move(&self, m: &Move) -> Result<Dialogue, DialogueError> {
        let mut next = self.clone();
        next.push(m.clone())?;
        Ok(next)
    }

    /// In-place variant of [`Dialogue::apply_move`].
    pub fn push(&mut self, m: Move) -> Result<(), DialogueError> {
        self.check(&m).map_err(|violation| DialogueError::IllegalMove {
            position: self.moves.len(),
            violation,
        })?;
        self.moves.push(m);
        Ok(())
    }

    /// Drops moves after `len`; every prefix of a legal dialogue is legal.
    pub fn truncate(&mut self, len: usize) {
        assert!(len >= 1, "the initial move cannot be removed");
        self.moves.truncate(len);
    }

    pub fn proponent_wins(&self) -> bool {
        self.moves.last().map(|m| m.player) == Some(Player::P) && self.legal_moves().is_empty()
    }

    /// Same moves judged under another ruleset, without re-checking.
    pub fn with_ruleset(&self, rs: Ruleset) -> Dialogue {
        Dialogue {
            ruleset: rs,
            moves: self.moves.clone(),
        }
    }
}

/// Plays `ms` from the initial assertion of `f`. `ms` may start with the
/// initial move itself or directly with move 1. Error indices are dialogue
/// positions.
pub fn replay(f: &Formula, rs: &Ruleset, ms: &[Move]) -> Result<Dialogue, DialogueError> {
    let mut d = Dialogue::new(f.clone(), rs.clone()).map_err(|e| match e {
        DialogueError::InitialMoveIllegal(v) => DialogueError::Replay { index: 0, cause: v },
        other => other,
    })?;
    let rest = match ms.first() {
        Some(m0) if m0.stance == Stance::Initial => {
            if m0.statement != Statement::Formula(f.clone()) {
                return Err(DialogueError::Replay {
                    index: 0,
                    cause: Violation::Particle(ParticleViolation::MissingInitial),
                });
            }
            &ms[1..]
        }
        _ => ms,
    };
    for m in rest {
        let index = d.len();
        d.push(m.clone()).map_err(|e| DialogueError::Replay {
            index,
            cause: e.violation().clone(),
        })?;
    }
    Ok(d)
}
