//! Abstract positions: the part of a dialogue that determines which moves
//! are legal from now on, with subformulas interned as small ids.
//!
//! Two dialogues with equal positions have the same legal moves up to
//! references, and the same holds after any pair of corresponding moves,
//! so search can work on positions instead of move lists.

use std::collections::HashMap;

use smallvec::SmallVec;

use crate::dialogue::{Move, Player, Stance, Statement, SymbolicAttack};
use crate::formula::Formula;
use crate::rules::{Ruleset, StructuralRuleId};

use super::Constraint;

/// Maximum number of distinct subformulas a thesis may have.
pub(crate) const MAX_SUBFORMULAS: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Node {
    Atom,
    Not(u8),
    And(u8, u8),
    Or(u8, u8),
    Implies(u8, u8),
}

/// Interned subformulas of a thesis.
#[derive(Debug)]
pub(crate) struct Arena {
    pub nodes: Vec<Node>,
    pub formulas: Vec<Formula>,
    index: HashMap<Formula, u8>,
    /// For each atom id, the O assertions that license P asserting it.
    license: Vec<u128>,
    checks_atoms: bool,
}

impl Arena {
    pub fn new(thesis: &Formula, rs: &Ruleset) -> Option<Arena> {
        let mut arena = Arena {
            nodes: Vec::new(),
            formulas: Vec::new(),
            index: HashMap::new(),
            license: Vec::new(),
            checks_atoms: rs.atom_rule().is_some(),
        };
        arena.intern(thesis)?;
        let n = arena.nodes.len();
        arena.license = vec![0; n];
        for id in 0..n {
            if arena.nodes[id] != Node::Atom {
                continue;
            }
            let a = arena.formulas[id].clone();
            let mut bits = 1u128 << id;
            let extra = match rs.atom_rule() {
                Some(StructuralRuleId::D10Star) => Some(Formula::not(a)),
                Some(StructuralRuleId::D10Prime) => Some(Formula::not(Formula::not(a))),
                _ => None,
            };
            if let Some(&e) = extra.and_then(|e| arena.index.get(&e)) {
                bits |= 1u128 << e;
            }
            arena.license[id] = bits;
        }
        Some(arena)
    }

    fn intern(&mut self, f: &Formula) -> Option<u8> {
        if let Some(&id) = self.index.get(f) {
            return Some(id);
        }
        let node = match f {
            Formula::Atom(_) => Node::Atom,
            Formula::Not(a) => Node::Not(self.intern(a)?),
            Formula::And(a, b) => {
                let (a, b) = (self.intern(a)?, self.intern(b)?);
                Node::And(a, b)
            }
            Formula::Or(a, b) => {
                let (a, b) = (self.intern(a)?, self.intern(b)?);
                Node::Or(a, b)
            }
            Formula::Implies(a, b) => {
                let (a, b) = (self.intern(a)?, self.intern(b)?);
                Node::Implies(a, b)
            }
        };
        if self.nodes.len() >= MAX_SUBFORMULAS {
            return None;
        }
        let id = self.nodes.len() as u8;
        self.nodes.push(node);
        self.formulas.push(f.clone());
        self.index.insert(f.clone(), id);
        Some(id)
    }

    pub fn id(&self, f: &Formula) -> u8 {
        self.index[f]
    }

    pub fn is_compound(&self, id: u8) -> bool {
        self.nodes[id as usize] != Node::Atom
    }

    /// May P assert formula `id` given O's assertions `oset`?
    pub fn may_assert(&self, id: u8, oset: u128) -> bool {
        !self.checks_atoms || self.is_compound(id) || self.license[id as usize] & oset != 0
    }

    /// Attack contents available against formula `id`.
    pub fn attacks(&self, id: u8) -> SmallVec<[Att; 2]> {
        match self.nodes[id as usize] {
            Node::Atom => SmallVec::new(),
            Node::And(..) => smallvec::smallvec![Att::new(id, 1), Att::new(id, 2)],
            _ => smallvec::smallvec![Att::new(id, 0)],
        }
    }

    /// Formula asserted by the attack, if it is not symbolic.
    pub fn attack_formula(&self, att: Att) -> Option<u8> {
        match self.nodes[att.target() as usize] {
            Node::Not(a) | Node::Implies(a, _) => Some(a),
            _ => None,
        }
    }

    pub fn defenses(&self, att: Att) -> SmallVec<[u8; 2]> {
        match (self.nodes[att.target() as usize], att.side()) {
            (Node::And(l, _), 1) => smallvec::smallvec![l],
            (Node::And(_, r), 2) => smallvec::smallvec![r],
            (Node::Or(l, r), _) => {
                if l == r {
                    smallvec::smallvec![l]
                } else {
                    smallvec::smallvec![l, r]
                }
            }
            (Node::Implies(_, b), _) => smallvec::smallvec![b],
            _ => SmallVec::new(),
        }
    }

    pub fn defendable(&self, att: Att) -> bool {
        !matches!(self.nodes[att.target() as usize], Node::Not(_))
    }

    fn att_of(&self, target: &Formula, stmt: &Statement) -> Att {
        let side = match stmt {
            Statement::Symbolic(SymbolicAttack::Left) => 1,
            Statement::Symbolic(SymbolicAttack::Right) => 2,
            _ => 0,
        };
        Att::new(self.id(target), side)
    }
}

/// An attack content: the attacked formula and which attack was used.
/// Contents with equal value admit the same defenses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Att(u16);

impl Att {
    fn new(target: u8, side: u8) -> Att {
        Att(((target as u16) << 2) | side as u16)
    }

    pub fn target(self) -> u8 {
        (self.0 >> 2) as u8
    }

    fn side(self) -> u8 {
        (self.0 & 3) as u8
    }
}

/// How a store of attacks is represented, depending on the rules in force.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum StoreMode {
    /// Not consulted under the ruleset.
    Unused,
    /// Only the most recent open attack can ever be answered.
    Top,
    /// Open attacks above the most recent unanswerable one.
    Stack,
    /// Open answerable attacks as a sorted multiset.
    Multiset,
    /// Open answerable attacks in order of play.
    Ordered,
    /// Every answerable attack ever made, as a sorted set.
    Set,
    /// Every answerable attack ever made, by recency of its last occurrence.
    Recency,
    /// A stack whose top `cap` entries are exact; older entries survive as
    /// a set that P may answer repeatedly once the exact part is empty.
    /// Gives P at least the options of `Stack`.
    Bounded,
    /// The top `cap` entries of a stack; older ones are forgotten. Gives O
    /// at most the options of `Stack`.
    Truncated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum TargetMode {
    Unused,
    Multiset,
    Set,
    /// Multiset with at most `cap` copies of each formula.
    Capped,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Modes {
    pub o_att: StoreMode,
    pub p_att: StoreMode,
    pub targets: TargetMode,
    pub e: bool,
    pub constraint: Constraint,
    /// Size bound of the `Bounded`, `Truncated` and `Capped` modes.
    pub cap: usize,
}

impl Modes {
    pub fn new(rs: &Ruleset, constraint: Constraint) -> Modes {
        let d11 = rs.has(StructuralRuleId::D11);
        let d12 = rs.has(StructuralRuleId::D12);
        let d13 = rs.has(StructuralRuleId::D13);
        let e = rs.has(StructuralRuleId::E);
        let ordered = constraint == Constraint::AttackFirstDefendMostRecent;
        let o_att = match (e, d11, d12, ordered) {
            (true, true, _, _) => StoreMode::Top,
            (false, true, _, _) => StoreMode::Stack,
            (_, false, true, false) => StoreMode::Multiset,
            (_, false, true, true) => StoreMode::Ordered,
            (_, false, false, false) => StoreMode::Set,
            (_, false, false, true) => StoreMode::Recency,
        };
        let p_att = match (e, d11, d12) {
            (true, ..) => StoreMode::Unused,
            (false, true, _) => StoreMode::Stack,
            (false, false, true) => StoreMode::Multiset,
            (false, false, false) => StoreMode::Set,
        };
        let targets = match (e, d13) {
            (true, _) => TargetMode::Unused,
            (false, true) => TargetMode::Multiset,
            (false, false) => TargetMode::Set,
        };
        Modes {
            o_att,
            p_att,
            targets,
            e,
            constraint,
            cap: 0,
        }
    }

    /// Whether every store stays bounded, so the reachable game graph is
    /// finite.
    pub fn is_finite(&self) -> bool {
        !matches!(self.o_att, StoreMode::Stack | StoreMode::Multiset | StoreMode::Ordered)
            && !matches!(self.p_att, StoreMode::Stack | StoreMode::Multiset)
            && self.targets != TargetMode::Multiset
    }

    /// Finite over-approximation for P of modes with unbounded stacks:
    /// every P option of the exact game survives, and O gains none, so a
    /// position P cannot win here is not won in the exact game either.
    /// `None` when the modes are already finite or P is constrained.
    pub fn relaxed(&self, cap: usize) -> Option<Modes> {
        let unbounded = self.o_att == StoreMode::Stack || self.p_att == StoreMode::Stack;
        if !unbounded || self.constraint != Constraint::None || self.e {
            return None;
        }
        let relax = |m: StoreMode, to: StoreMode| if m == StoreMode::Stack { to } else { m };
        Some(Modes {
            o_att: relax(self.o_att, StoreMode::Bounded),
            p_att: relax(self.p_att, StoreMode::Truncated),
            targets: match self.targets {
                TargetMode::Multiset => TargetMode::Capped,
                t => t,
            },
            cap,
            ..*self
        })
    }
}

/// The last P move, as far as O's options under rule E are concerned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub(crate) struct Last {
    /// Compound formula asserted by the move.
    pub asserted: Option<u8>,
    /// Attack made by the move.
    pub attack: Option<Att>,
}

pub(crate) type Store = SmallVec<[Att; 4]>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct Position {
    pub p_to_move: bool,
    /// Formulas asserted by O.
    pub oset: u128,
    /// O's attacks on P: P's defense options.
    pub o_att: Store,
    /// Older entries of a `Bounded` store, sorted.
    pub o_over: Store,
    /// P's attacks on O: O's defense options.
    pub p_att: Store,
    /// P's compound assertions that O may still attack.
    pub targets: SmallVec<[u8; 6]>,
    pub last: Last,
    /// Attack contents P has used, sorted; kept only under a constraint,
    /// where repeating an attack does not postpone a defense.
    pub used: Store,
    /// Defenses P has made, by attack content and defense, sorted; kept
    /// only when defending the most recent attack is required.
    pub answered: SmallVec<[(Att, u8); 4]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum AMove {
    PAttack(Att),
    /// `idx` locates the answered attack in an ordered store.
    PDefend { att: Att, idx: u8, d: u8 },
    OAttack(Att),
    ODefend { att: Att, d: u8 },
}

fn push(store: &mut Store, mode: StoreMode, att: Att, defendable: bool, cap: usize) {
    match mode {
        StoreMode::Unused | StoreMode::Bounded => unreachable!("handled by the caller"),
        StoreMode::Truncated => {
            if defendable {
                store.push(att);
                if store.len() > cap {
                    store.remove(0);
                }
            } else {
                store.clear();
            }
        }
        StoreMode::Top => {
            store.clear();
            if defendable {
                store.push(att);
            }
        }
        StoreMode::Stack => {
            if defendable {
                store.push(att);
            } else {
                store.clear();
            }
        }
        StoreMode::Multiset => {
            if defendable {
                let at = store.partition_point(|&x| x <= att);
                store.insert(at, att);
            }
        }
        StoreMode::Ordered => {
            if defendable {
                store.push(att);
            }
        }
        StoreMode::Set => {
            if defendable {
                if let Err(at) = store.binary_search(&att) {
                    store.insert(at, att);
                }
            }
        }
        StoreMode::Recency => {
            if defendable {
                store.retain(|x| *x != att);
                store.push(att);
            }
        }
    }
}

fn answer(store: &mut Store, mode: StoreMode, att: Att, idx: u8) {
    match mode {
        StoreMode::Unused | StoreMode::Set | StoreMode::Recency => {}
        StoreMode::Top => store.clear(),
        StoreMode::Stack | StoreMode::Truncated | StoreMode::Bounded => {
            store.pop();
        }
        StoreMode::Multiset => {
            if let Some(i) = store.iter().position(|&x| x == att) {
                store.remove(i);
            }
        }
        StoreMode::Ordered => {
            store.remove(idx as usize);
        }
    }
}

/// Contents that may be answered now, with their store index.
fn answerable(store: &Store, mode: StoreMode) -> SmallVec<[(Att, u8); 4]> {
    match mode {
        StoreMode::Unused => SmallVec::new(),
        StoreMode::Top | StoreMode::Stack | StoreMode::Truncated | StoreMode::Bounded => {
            store.last().map(|&a| (a, 0)).into_iter().collect()
        }
        StoreMode::Multiset => {
            let mut out: SmallVec<[(Att, u8); 4]> = SmallVec::new();
            for &a in store.iter() {
                if out.last().map(|x| x.0) != Some(a) {
                    out.push((a, 0));
                }
            }
            out
        }
        StoreMode::Ordered => store.iter().enumerate().map(|(i, &a)| (a, i as u8)).collect(),
        StoreMode::Set | StoreMode::Recency => store.iter().map(|&a| (a, 0)).collect(),
    }
}

impl Position {
    /// Position right after P's initial assertion of the thesis.
    pub fn initial(arena: &Arena, modes: &Modes, thesis: u8) -> Position {
        let mut p = Position {
            p_to_move: false,
            oset: 0,
            o_att: Store::new(),
            o_over: Store::new(),
            p_att: Store::new(),
            targets: SmallVec::new(),
            last: Last::default(),
            used: Store::new(),
            answered: SmallVec::new(),
        };
        p.assert_by_p(arena, modes, thesis);
        if modes.e && arena.is_compound(thesis) {
            p.last.asserted = Some(thesis);
        }
        p
    }

    fn assert_by_p(&mut self, arena: &Arena, modes: &Modes, f: u8) {
        if !arena.is_compound(f) {
            return;
        }
        match modes.targets {
            TargetMode::Unused => {}
            TargetMode::Multiset => {
                let at = self.targets.partition_point(|&x| x <= f);
                self.targets.insert(at, f);
            }
            TargetMode::Capped => {
                let copies = self.targets.iter().filter(|&&x| x == f).count();
                if copies < modes.cap {
                    let at = self.targets.partition_point(|&x| x <= f);
                    self.targets.insert(at, f);
                }
            }
            TargetMode::Set => {
                if let Err(at) = self.targets.binary_search(&f) {
                    self.targets.insert(at, f);
                }
            }
        }
    }

    /// Moves available to the player to move, in a fixed order.
    pub fn moves(&self, arena: &Arena, modes: &Modes) -> Vec<AMove> {
        if self.p_to_move {
            self.p_moves(arena, modes)
        } else {
            self.o_moves(arena, modes)
        }
    }

    fn p_moves(&self, arena: &Arena, modes: &Modes) -> Vec<AMove> {
        let mut attacks = Vec::new();
        let mut bits = self.oset;
        while bits != 0 {
            let f = bits.trailing_zeros() as u8;
            bits &= bits - 1;
            for att in arena.attacks(f) {
                let ok = arena
                    .attack_formula(att)
                    .is_none_or(|s| arena.may_assert(s, self.oset));
                if ok {
                    attacks.push(AMove::PAttack(att));
                }
            }
        }
        if modes.constraint != Constraint::None && attacks.iter().any(|a| self.fresh(a)) {
            attacks.retain(|a| self.fresh(a));
            return attacks;
        }
        let mut defenses = Vec::new();
        let open = if modes.o_att == StoreMode::Bounded && self.o_att.is_empty() {
            self.o_over.iter().map(|&a| (a, 0)).collect()
        } else {
            answerable(&self.o_att, modes.o_att)
        };
        for (att, idx) in open {
            for d in arena.defenses(att) {
                if arena.may_assert(d, self.oset) {
                    defenses.push(AMove::PDefend { att, idx, d });
                }
            }
        }
        if modes.constraint == Constraint::AttackFirstDefendMostRecent {
            // the most recent attack with a defense not given before
            let newest = defenses.iter().rposition(|m| match *m {
                AMove::PDefend { att, d, .. } => self.answered.binary_search(&(att, d)).is_err(),
                _ => false,
            });
            if let Some(i) = newest {
                let AMove::PDefend { att, idx, .. } = defenses[i] else {
                    unreachable!()
                };
                defenses.retain(|m| match *m {
                    AMove::PDefend { att: a, idx: j, d } => {
                        a == att && j == idx && self.answered.binary_search(&(a, d)).is_err()
                    }
                    _ => false,
                });
                return defenses;
            }
        }
        defenses.extend(attacks);
        defenses
    }

    fn fresh(&self, m: &AMove) -> bool {
        matches!(m, AMove::PAttack(att) if self.used.binary_search(att).is_err())
    }

    fn o_moves(&self, arena: &Arena, modes: &Modes) -> Vec<AMove> {
        let mut out = Vec::new();
        if modes.e {
            if let Some(att) = self.last.attack {
                for d in arena.defenses(att) {
                    out.push(AMove::ODefend { att, d });
                }
            }
            if let Some(f) = self.last.asserted {
                for att in arena.attacks(f) {
                    out.push(AMove::OAttack(att));
                }
            }
            return out;
        }
        for (att, _) in answerable(&self.p_att, modes.p_att) {
            for d in arena.defenses(att) {
                out.push(AMove::ODefend { att, d });
            }
        }
        let mut prev = None;
        for &t in &self.targets {
            if prev == Some(t) {
                continue;
            }
            prev = Some(t);
            for att in arena.attacks(t) {
                out.push(AMove::OAttack(att));
            }
        }
        out
    }

    pub fn apply(&self, arena: &Arena, modes: &Modes, m: AMove) -> Position {
        let mut next = self.clone();
        next.p_to_move = !self.p_to_move;
        next.last = Last::default();
        match m {
            AMove::PAttack(att) => {
                if modes.constraint != Constraint::None {
                    if let Err(at) = next.used.binary_search(&att) {
                        next.used.insert(at, att);
                    }
                }
                let stmt = arena.attack_formula(att);
                if let Some(s) = stmt {
                    next.assert_by_p(arena, modes, s);
                }
                if modes.p_att != StoreMode::Unused {
                    push(&mut next.p_att, modes.p_att, att, arena.defendable(att), modes.cap);
                }
                if modes.e {
                    next.last = Last {
                        asserted: stmt.filter(|&s| arena.is_compound(s)),
                        attack: Some(att),
                    };
                }
            }
            AMove::PDefend { att, idx, d } => {
                if modes.constraint == Constraint::AttackFirstDefendMostRecent {
                    if let Err(at) = next.answered.binary_search(&(att, d)) {
                        next.answered.insert(at, (att, d));
                    }
                }
                // an empty bounded stack is answered from its overflow set
                answer(&mut next.o_att, modes.o_att, att, idx);
                next.assert_by_p(arena, modes, d);
                if modes.e {
                    next.last = Last {
                        asserted: Some(d).filter(|&d| arena.is_compound(d)),
                        attack: None,
                    };
                }
            }
            AMove::OAttack(att) => {
                if let Some(s) = arena.attack_formula(att) {
                    next.oset |= 1u128 << s;
                }
                if matches!(modes.targets, TargetMode::Multiset | TargetMode::Capped) {
                    let t = att.target();
                    if let Some(i) = next.targets.iter().position(|&x| x == t) {
                        next.targets.remove(i);
                    }
                }
                match modes.o_att {
                    StoreMode::Unused => {}
                    StoreMode::Bounded => next.push_bounded(att, arena.defendable(att), modes.cap),
                    mode => push(&mut next.o_att, mode, att, arena.defendable(att), modes.cap),
                }
            }
            AMove::ODefend { att, d } => {
                next.oset |= 1u128 << d;
                answer(&mut next.p_att, modes.p_att, att, 0);
            }
        }
        next
    }

    fn push_bounded(&mut self, att: Att, defendable: bool, cap: usize) {
        if !defendable {
            self.o_att.clear();
            self.o_over.clear();
            return;
        }
        self.o_att.push(att);
        if self.o_att.len() > cap {
            let old = self.o_att.remove(0);
            if let Err(at) = self.o_over.binary_search(&old) {
                self.o_over.insert(at, old);
            }
        }
    }

    /// Whether `ancestor` is at least as good for P as `self`, so that
    /// reaching `self` from `ancestor` cannot be part of a shortest win.
    pub fn dominated_by(&self, ancestor: &Position, modes: &Modes) -> bool {
        if self.p_to_move != ancestor.p_to_move || self.last != ancestor.last {
            return false;
        }
        let oset_ok = if modes.constraint == Constraint::None {
            self.oset & !ancestor.oset == 0
        } else {
            self.oset == ancestor.oset
        };
        oset_ok
            && self.used == ancestor.used
            && self.answered == ancestor.answered
            && self.o_over == ancestor.o_over
            && more_options(&ancestor.o_att, &self.o_att, modes.o_att)
            && more_options(&self.p_att, &ancestor.p_att, modes.p_att)
            && sub_multiset(&ancestor.targets, &self.targets)
    }
}

/// Does store `big` offer at least the answers of store `small`, now and
/// after any common continuation?
fn more_options(big: &Store, small: &Store, mode: StoreMode) -> bool {
    match mode {
        StoreMode::Unused => true,
        StoreMode::Top => small.is_empty() || small == big,
        StoreMode::Stack => big.ends_with(small),
        StoreMode::Multiset | StoreMode::Set => sub_multiset(small, big),
        StoreMode::Ordered | StoreMode::Recency | StoreMode::Bounded | StoreMode::Truncated => {
            small == big
        }
    }
}

/// Inclusion of sorted sequences as multisets.
fn sub_multiset<T: Ord + Copy>(small: &[T], big: &[T]) -> bool {
    if small.len() > big.len() {
        return false;
    }
    let mut j = 0;
    for &x in small {
        while j < big.len() && big[j] < x {
            j += 1;
        }
        if j == big.len() || big[j] != x {
            return false;
        }
        j += 1;
    }
    true
}

/// Abstract image of the concrete move `m` played after `prefix`.
pub(crate) fn abstract_move(arena: &Arena, modes: &Modes, prefix: &[Move], m: &Move) -> AMove {
    let r = m.reference.expect("non-initial move");
    let target = &prefix[r];
    match (m.player, m.stance) {
        (Player::P, Stance::Attack) => {
            let f = target.statement.formula().expect("attacks target formulas");
            AMove::PAttack(arena.att_of(f, &m.statement))
        }
        (Player::O, Stance::Attack) => {
            let f = target.statement.formula().expect("attacks target formulas");
            AMove::OAttack(arena.att_of(f, &m.statement))
        }
        (player, Stance::Defense) => {
            let attacked = prefix[target.reference.expect("attack reference")]
                .statement
                .formula()
                .expect("attacks target formulas");
            let att = arena.att_of(attacked, &target.statement);
            let d = arena.id(m.statement.formula().expect("defenses assert formulas"));
            match player {
                Player::O => AMove::ODefend { att, d },
                Player::P => {
                    let idx = if modes.o_att == StoreMode::Ordered {
                        open_answerable_o_attacks(arena, prefix)
                            .iter()
                            .position(|&j| j == r)
                            .expect("answered attack is open") as u8
                    } else {
                        0
                    };
                    AMove::PDefend { att, idx, d }
                }
            }
        }
        (_, Stance::Initial) => unreachable!("initial move has no abstract image"),
    }
}

fn attack_defendable(arena: &Arena, prefix: &[Move], i: usize) -> bool {
    let f = prefix[prefix[i].reference.unwrap()].statement.formula().unwrap();
    !matches!(arena.nodes[arena.id(f) as usize], Node::Not(_))
}

fn open_answerable_o_attacks(arena: &Arena, prefix: &[Move]) -> Vec<usize> {
    let mut open: Vec<bool> = vec![true; prefix.len()];
    for m in prefix {
        if m.stance == Stance::Defense {
            open[m.reference.unwrap()] = false;
        }
    }
    (0..prefix.len())
        .filter(|&i| {
            prefix[i].player == Player::O
                && prefix[i].stance == Stance::Attack
                && open[i]
                && attack_defendable(arena, prefix, i)
        })
        .collect()
}

/// Position reached by a concrete dialogue, folded from the thesis.
pub(crate) fn position_of(arena: &Arena, modes: &Modes, moves: &[Move]) -> Position {
    let thesis = moves[0].statement.formula().expect("thesis");
    let mut p = Position::initial(arena, modes, arena.id(thesis));
    for i in 1..moves.len() {
        let m = abstract_move(arena, modes, &moves[..i], &moves[i]);
        p = p.apply(arena, modes, m);
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dialogue::Dialogue;
    use crate::formula::enumerate_formulas;
    use crate::rules::{named_ruleset, PRESET_NAMES};
    use crate::strategy::solver::constrain;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn successors(arena: &Arena, modes: &Modes, d: &Dialogue) -> Vec<Position> {
        let mut legal = d.legal_moves();
        if d.to_move() == Player::P {
            legal = constrain(d.moves(), legal, modes.constraint);
        }
        let mut out: Vec<Position> = legal
            .iter()
            .map(|m| {
                let mut moves = d.moves().to_vec();
                moves.push(m.clone());
                position_of(arena, modes, &moves)
            })
            .collect();
        out.sort_by_key(|p| format!("{p:?}"));
        out.dedup();
        out
    }

    #[test]
    fn abstract_moves_mirror_concrete_moves() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let formulas: Vec<Formula> = enumerate_formulas(&["p", "q"], 4).step_by(97).collect();
        let constraints = [
            Constraint::None,
            Constraint::AttackFirst,
            Constraint::AttackFirstDefendMostRecent,
        ];
        let mut checked = 0;
        for f in &formulas {
            for name in PRESET_NAMES {
                let rs = named_ruleset(name).unwrap();
                let Ok(start) = Dialogue::new(f.clone(), rs.clone()) else {
                    continue;
                };
                let arena = Arena::new(f, &rs).unwrap();
                for c in constraints {
                    let modes = Modes::new(&rs, c);
                    for _ in 0..4 {
                        let mut d = start.clone();
                        for _ in 0..14 {
                            let pos = position_of(&arena, &modes, d.moves());
                            let mut abs: Vec<Position> = pos
                                .moves(&arena, &modes)
                                .into_iter()
                                .map(|m| pos.apply(&arena, &modes, m))
                                .collect();
                            abs.sort_by_key(|p| format!("{p:?}"));
                            abs.dedup();
                            let conc = successors(&arena, &modes, &d);
                            assert_eq!(abs, conc, "{f} under {name} {c:?} after {:?}", d.moves());
                            checked += 1;
                            let mut legal = d.legal_moves();
                            if d.to_move() == Player::P {
                                legal = constrain(d.moves(), legal, c);
                            }
                            if legal.is_empty() {
                                break;
                            }
                            let m = legal[rng.gen_range(0..legal.len())].clone();
                            d.push(m).unwrap();
                        }
                    }
                }
            }
        }
        assert!(checked > 1000, "{checked}");
    }

    #[test]
    fn multiset_inclusion() {
        assert!(sub_multiset(&[1, 2], &[1, 2, 2]));
        assert!(sub_multiset::<u8>(&[], &[]));
        assert!(!sub_multiset(&[2, 2], &[1, 2]));
        assert!(!sub_multiset(&[3], &[1, 2]));
    }
}
