//! Scans over enumerated formulas: oracle agreement, closure under modus
//! ponens and uniform substitution, the shape of N-valid implications, and
//! the absence of CL-valid formulas that entail a fresh atom.
//!
//! Verdicts are computed in parallel; reports list formulas in enumeration
//! order, so a report does not depend on the number of threads.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::formula::{enumerate_formulas, Formula};
use crate::oracles::Oracle;
use crate::rules::{named_ruleset, Ruleset};
use crate::strategy::{search_report, Constraint, SearchBudget, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanKind {
    Agreement,
    MpClosure,
    UniformSubstitution,
    ImplicationShape,
    NoExplosion,
}

impl fmt::Display for ScanKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScanKind::Agreement => "agreement",
            ScanKind::MpClosure => "mp_closure",
            ScanKind::UniformSubstitution => "uniform_substitution",
            ScanKind::ImplicationShape => "implication_shape",
            ScanKind::NoExplosion => "no_explosion",
        })
    }
}

/// Search outcome for one formula.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanEntry {
    pub formula: Formula,
    pub verdict: Verdict,
    pub depth: usize,
    pub nodes: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FindingKind {
    /// Search gave no definite answer within budget.
    Exhausted,
    /// Search found a strategy the oracle rejects.
    UnsoundWin,
    /// The oracle accepts a formula without a strategy.
    MissingWin,
    /// `phi` and `phi -> psi` are valid but `psi` is not.
    ModusPonens,
    /// A valid formula has an invalid substitution instance.
    Substitution,
    /// A valid implication whose antecedent is neither atomic nor a
    /// negation and whose consequent is invalid.
    Shape,
    /// A valid formula that entails a fresh atom.
    Explosion,
}

/// A formula related to a finding, with its verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Related {
    pub role: String,
    pub formula: Formula,
    pub verdict: Verdict,
}

/// A counterexample or an inconclusive case, with enough to re-check it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub kind: FindingKind,
    pub formula: Formula,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_valid: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub related: Vec<Related>,
    /// Whether the finding refutes the property under test. Exploratory
    /// findings (e.g. conjectured converses) are reported but not counted.
    pub violation: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub note: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ScanCounts {
    pub valid: usize,
    pub invalid: usize,
    pub exhausted: usize,
}

impl ScanCounts {
    fn add(&mut self, v: Verdict) {
        match v {
            Verdict::Valid => self.valid += 1,
            Verdict::Invalid => self.invalid += 1,
            Verdict::Unknown => self.exhausted += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.valid + self.invalid + self.exhausted
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub scan: ScanKind,
    pub ruleset: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<Oracle>,
    pub alphabet: Vec<String>,
    pub max_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub substitution_depth: Option<usize>,
    pub budget: SearchBudget,
    /// Verdicts over every formula searched, including derived instances.
    pub counts: ScanCounts,
    pub violations: usize,
    pub findings: Vec<Finding>,
    /// Every search performed, in enumeration order.
    #[serde(skip)]
    pub entries: Vec<ScanEntry>,
    pub wall_ms: f64,
}

impl ScanReport {
    fn new(scan: ScanKind, rs: &Ruleset, alphabet: &[&str], max_size: usize, b: &SearchBudget) -> Self {
        ScanReport {
            scan,
            ruleset: rs.name().to_string(),
            oracle: None,
            alphabet: alphabet.iter().map(|s| s.to_string()).collect(),
            max_size,
            substitution_depth: None,
            budget: b.clone(),
            counts: ScanCounts::default(),
            violations: 0,
            findings: Vec::new(),
            entries: Vec::new(),
            wall_ms: 0.0,
        }
    }

    fn finish(mut self, started: Instant) -> Self {
        self.counts = ScanCounts::default();
        for e in &self.entries {
            self.counts.add(e.verdict);
        }
        self.violations = self.findings.iter().filter(|f| f.violation).count();
        self.wall_ms = started.elapsed().as_secs_f64() * 1e3;
        self
    }

    /// Findings of a given kind.
    pub fn of_kind(&self, kind: FindingKind) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(move |f| f.kind == kind)
    }

    /// One-line summary.
    pub fn summary(&self) -> String {
        format!(
            "{} under {} over {{{}}} size <= {}: {} formulas ({} valid, {} invalid, {} exhausted), {} violations, {} findings, {:.0} ms",
            self.scan,
            self.ruleset,
            self.alphabet.join(","),
            self.max_size,
            self.counts.total(),
            self.counts.valid,
            self.counts.invalid,
            self.counts.exhausted,
            self.violations,
            self.findings.len(),
            self.wall_ms
        )
    }
}

/// Searches every formula under `rs`, in parallel, keeping input order.
pub fn classify(formulas: &[Formula], rs: &Ruleset, b: &SearchBudget, c: Constraint) -> Vec<ScanEntry> {
    formulas
        .par_iter()
        .map(|f| {
            let r = search_report(f, rs, b, c, false);
            ScanEntry {
                formula: f.clone(),
                verdict: r.result.verdict(),
                depth: r.depth,
                nodes: r.nodes,
            }
        })
        .collect()
}

fn enumerate(alphabet: &[&str], max_size: usize) -> Vec<Formula> {
    enumerate_formulas(alphabet, max_size).collect()
}

fn exhausted_findings(entries: &[ScanEntry]) -> Vec<Finding> {
    entries
        .iter()
        .filter(|e| e.verdict == Verdict::Unknown)
        .map(|e| Finding {
            kind: FindingKind::Exhausted,
            formula: e.formula.clone(),
            verdict: e.verdict,
            oracle_valid: None,
            related: vec![],
            violation: true,
            note: format!("no answer at depth {}", e.depth),
        })
        .collect()
}

fn verdict_map(entries: &[ScanEntry]) -> HashMap<&Formula, Verdict> {
    entries.iter().map(|e| (&e.formula, e.verdict)).collect()
}

fn related(role: &str, formula: &Formula, verdict: Verdict) -> Related {
    Related {
        role: role.to_string(),
        formula: formula.clone(),
        verdict,
    }
}

/// Compares search verdicts with an oracle. Wins the oracle rejects are
/// violations. Oracle validities without a win are violations except for
/// the stable oracle, where the converse is only conjectured.
pub fn agreement_scan(
    rs: &Ruleset,
    oracle: Oracle,
    alphabet: &[&str],
    max_size: usize,
    b: &SearchBudget,
) -> ScanReport {
    let started = Instant::now();
    let mut report = ScanReport::new(ScanKind::Agreement, rs, alphabet, max_size, b);
    report.oracle = Some(oracle);
    let formulas = enumerate(alphabet, max_size);
    report.entries = classify(&formulas, rs, b, Constraint::None);
    let oracle_values: Vec<bool> = formulas.par_iter().map(|f| oracle.valid(f)).collect();
    report.findings = exhausted_findings(&report.entries);
    for (e, &o) in report.entries.iter().zip(&oracle_values) {
        let kind = match (e.verdict, o) {
            (Verdict::Valid, false) => FindingKind::UnsoundWin,
            (Verdict::Invalid, true) => FindingKind::MissingWin,
            _ => continue,
        };
        report.findings.push(Finding {
            kind,
            formula: e.formula.clone(),
            verdict: e.verdict,
            oracle_valid: Some(o),
            related: vec![],
            violation: kind == FindingKind::UnsoundWin || oracle != Oracle::Stable,
            note: String::new(),
        });
    }
    report.finish(started)
}

/// Checks that `psi` is valid whenever `phi` and `phi -> psi` are.
pub fn mp_closure_scan(rs: &Ruleset, alphabet: &[&str], max_size: usize, b: &SearchBudget) -> ScanReport {
    let started = Instant::now();
    let mut report = ScanReport::new(ScanKind::MpClosure, rs, alphabet, max_size, b);
    let formulas = enumerate(alphabet, max_size);
    report.entries = classify(&formulas, rs, b, Constraint::None);
    report.findings = exhausted_findings(&report.entries);
    let verdicts = verdict_map(&report.entries);
    let mut found = Vec::new();
    for e in &report.entries {
        let Formula::Implies(phi, psi) = &e.formula else {
            continue;
        };
        if e.verdict != Verdict::Valid || verdicts[&**phi] != Verdict::Valid {
            continue;
        }
        let v = verdicts[&**psi];
        if v == Verdict::Valid {
            continue;
        }
        found.push(Finding {
            kind: if v == Verdict::Unknown {
                FindingKind::Exhausted
            } else {
                FindingKind::ModusPonens
            },
            formula: (**psi).clone(),
            verdict: v,
            oracle_valid: None,
            related: vec![
                related("minor premise", phi, Verdict::Valid),
                related("major premise", &e.formula, Verdict::Valid),
            ],
            violation: true,
            note: String::new(),
        });
    }
    report.findings.extend(found);
    report.finish(started)
}

/// Every substitution of formulas of size at most `depth` for the atoms of
/// `f`, other than the identity, in a fixed order.
fn substitutions(f: &Formula, pool: &[Formula]) -> Vec<BTreeMap<String, Formula>> {
    let atoms = f.atoms();
    let mut out = vec![BTreeMap::new()];
    for a in &atoms {
        out = out
            .into_iter()
            .flat_map(|s| {
                pool.iter().map(move |g| {
                    let mut s = s.clone();
                    s.insert(a.clone(), g.clone());
                    s
                })
            })
            .collect();
    }
    out.retain(|s| s.iter().any(|(a, g)| g.atom_name() != Some(a.as_str())));
    out
}

fn render_substitution(s: &BTreeMap<String, Formula>) -> String {
    let parts: Vec<String> = s.iter().map(|(a, g)| format!("{a} := {g}")).collect();
    format!("{{{}}}", parts.join(", "))
}

/// Checks that substitution instances of valid formulas stay valid.
pub fn uniform_substitution_scan(
    rs: &Ruleset,
    alphabet: &[&str],
    max_size: usize,
    substitution_depth: usize,
    b: &SearchBudget,
) -> ScanReport {
    let started = Instant::now();
    let mut report = ScanReport::new(ScanKind::UniformSubstitution, rs, alphabet, max_size, b);
    report.substitution_depth = Some(substitution_depth);
    let formulas = enumerate(alphabet, max_size);
    let base = classify(&formulas, rs, b, Constraint::None);
    report.findings = exhausted_findings(&base);
    let pool = enumerate(alphabet, substitution_depth);

    let mut cases = Vec::new();
    for e in base.iter().filter(|e| e.verdict == Verdict::Valid) {
        for s in substitutions(&e.formula, &pool) {
            cases.push((e.formula.clone(), s));
        }
    }
    let mut instances: Vec<Formula> = cases.iter().map(|(f, s)| f.substitute(s)).collect();
    instances.sort();
    instances.dedup();
    let known = verdict_map(&base);
    let fresh: Vec<Formula> = instances.into_iter().filter(|f| !known.contains_key(f)).collect();
    let extra = classify(&fresh, rs, b, Constraint::None);
    let mut all: HashMap<Formula, Verdict> = base.iter().map(|e| (e.formula.clone(), e.verdict)).collect();
    all.extend(extra.iter().map(|e| (e.formula.clone(), e.verdict)));

    for (f, s) in &cases {
        let inst = f.substitute(s);
        let v = all[&inst];
        if v == Verdict::Valid {
            continue;
        }
        report.findings.push(Finding {
            kind: if v == Verdict::Unknown {
                FindingKind::Exhausted
            } else {
                FindingKind::Substitution
            },
            formula: inst,
            verdict: v,
            oracle_valid: None,
            related: vec![related("instance of", f, Verdict::Valid)],
            violation: true,
            note: render_substitution(s),
        });
    }
    report.entries = base;
    report.entries.extend(extra);
    report.finish(started)
}

/// Checks, under N, that each valid implication has a valid consequent, an
/// atomic antecedent, or a negated antecedent.
pub fn implication_shape_scan(alphabet: &[&str], max_size: usize, b: &SearchBudget) -> ScanReport {
    let started = Instant::now();
    let rs = named_ruleset("N").expect("preset");
    let mut report = ScanReport::new(ScanKind::ImplicationShape, &rs, alphabet, max_size, b);
    let formulas = enumerate(alphabet, max_size);
    report.entries = classify(&formulas, &rs, b, Constraint::None);
    report.findings = exhausted_findings(&report.entries);
    let verdicts = verdict_map(&report.entries);
    let mut found = Vec::new();
    for e in &report.entries {
        let Formula::Implies(phi, psi) = &e.formula else {
            continue;
        };
        if e.verdict != Verdict::Valid || phi.is_atom() || phi.is_negation() {
            continue;
        }
        let v = verdicts[&**psi];
        if v == Verdict::Valid {
            continue;
        }
        found.push(Finding {
            kind: if v == Verdict::Unknown {
                FindingKind::Exhausted
            } else {
                FindingKind::Shape
            },
            formula: e.formula.clone(),
            verdict: e.verdict,
            oracle_valid: None,
            related: vec![related("consequent", psi, v)],
            violation: true,
            note: String::new(),
        });
    }
    report.findings.extend(found);
    report.finish(started)
}

/// An atom name outside `alphabet`.
pub fn fresh_atom(alphabet: &[&str]) -> String {
    ["q", "r", "s", "t", "u", "v", "w"]
        .iter()
        .map(|s| s.to_string())
        .chain((0..).map(|i| format!("z{i}")))
        .find(|a| !alphabet.contains(&a.as_str()))
        .expect("infinite supply")
}

/// Checks that no CL-valid formula makes a fresh atom CL-valid.
pub fn no_explosion_scan(alphabet: &[&str], max_size: usize, b: &SearchBudget) -> ScanReport {
    let started = Instant::now();
    let rs = named_ruleset("CL").expect("preset");
    let mut report = ScanReport::new(ScanKind::NoExplosion, &rs, alphabet, max_size, b);
    let formulas = enumerate(alphabet, max_size);
    let base = classify(&formulas, &rs, b, Constraint::None);
    report.findings = exhausted_findings(&base);
    let fresh = Formula::atom(&fresh_atom(alphabet));
    let premises: Vec<&ScanEntry> = base.iter().filter(|e| e.verdict == Verdict::Valid).collect();
    let implications: Vec<Formula> = premises
        .iter()
        .map(|e| Formula::implies(e.formula.clone(), fresh.clone()))
        .collect();
    let extra = classify(&implications, &rs, b, Constraint::None);
    for (p, e) in premises.iter().zip(&extra) {
        if e.verdict == Verdict::Invalid {
            continue;
        }
        report.findings.push(Finding {
            kind: if e.verdict == Verdict::Unknown {
                FindingKind::Exhausted
            } else {
                FindingKind::Explosion
            },
            formula: e.formula.clone(),
            verdict: e.verdict,
            oracle_valid: None,
            related: vec![related("premise", &p.formula, Verdict::Valid)],
            violation: true,
            note: String::new(),
        });
    }
    report.entries = base;
    report.entries.extend(extra);
    report.finish(started)
}
