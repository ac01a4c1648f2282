//! Certificates and their JSON file format.
//!
//! ```json
//! {"logic_n":2,"goal":"...","lines":[{"i":0,"f":"...","rule":"taut","prem":[]}]}
//! ```
//!
//! Formulas are written in the sugar-free grammar. Serialisation is compact
//! and newline-terminated, and `to_json(from_json(s)) == s` for any `s`
//! produced by `to_json`.
//!
//! Instance-level proofs about iterated substitutions mention formulas whose
//! trees are far larger than their DAGs. When the summed tree size exceeds
//! [`SHARE_ABOVE`], the file gains a `"shared"` array placed after
//! `logic_n`: entry `k` is a formula in which `#j` (`j < k`) stands for entry
//! `j`, and `goal` and line formulas may use `#j` for any entry. Sharing is
//! decided on structure alone, so the output is independent of how the
//! in-memory formulas happen to share nodes.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Formula, Kind, LogicIndex};
use crate::parse::{parse_internal, parse_with_refs, ParseError};
use crate::print::{print, print_with_refs};

/// Summed tree size of goal and lines above which subformulas are shared.
pub const SHARE_ABOVE: usize = 1 << 20;
/// Smallest tree size worth a shared entry.
const SHARE_MIN_SIZE: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Justification {
    /// Instance of a propositional tautology.
    Taut,
    /// `□(X → Y) → (□X → □Y)`
    AxK,
    /// `□(□ⁿX → X) → □X`
    AxWgl,
    /// Modus ponens: line `.0` is `X`, line `.1` is `X → this`.
    Mp(usize, usize),
    /// Necessitation: this is `□` of the cited line.
    Nec(usize),
}

impl Justification {
    pub fn premises(&self) -> Vec<usize> {
        match *self {
            Justification::Mp(i, j) => vec![i, j],
            Justification::Nec(i) => vec![i],
            _ => vec![],
        }
    }

    pub fn rule_name(&self) -> &'static str {
        match self {
            Justification::Taut => "taut",
            Justification::AxK => "axk",
            Justification::AxWgl => "axwgl",
            Justification::Mp(..) => "mp",
            Justification::Nec(_) => "nec",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofLine {
    pub formula: Formula,
    pub justification: Justification,
}

/// A numbered Hilbert-style derivation in `wGL_n`. Line indices are the
/// positions in `lines`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub logic: LogicIndex,
    pub lines: Vec<ProofLine>,
    pub goal: Formula,
}

#[derive(Debug, Error)]
pub enum CertFormatError {
    #[error("malformed certificate JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("line {line}: formula does not parse: {source}")]
    Formula {
        line: usize,
        #[source]
        source: ParseError,
    },
    #[error("goal does not parse: {0}")]
    Goal(#[source] ParseError),
    #[error("shared entry {entry}: formula does not parse: {source}")]
    Shared {
        entry: usize,
        #[source]
        source: ParseError,
    },
    #[error("line at position {pos} carries index {found}")]
    Index { pos: usize, found: usize },
    #[error("line {line}: rule {rule:?} with {count} premises")]
    Premises { line: usize, rule: String, count: usize },
    #[error("line {line}: unknown rule {rule:?}")]
    Rule { line: usize, rule: String },
    #[error("logic_n must be at least 1")]
    Logic,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLine {
    i: usize,
    f: String,
    rule: String,
    prem: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCert {
    logic_n: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    shared: Vec<String>,
    goal: String,
    lines: Vec<RawLine>,
}

impl Certificate {
    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn to_json(&self) -> String {
        let total = self
            .lines
            .iter()
            .fold(self.goal.size(), |acc, l| acc.saturating_add(l.formula.size()));
        let sharing = (total > SHARE_ABOVE).then(|| Sharing::new(&self.goal, self.lines.iter().map(|l| &l.formula)));
        let show = |f: &Formula| match &sharing {
            Some(sh) => sh.print(f),
            None => print(f, false),
        };
        let raw = RawCert {
            logic_n: self.logic.get(),
            shared: sharing.as_ref().map(Sharing::entries).unwrap_or_default(),
            goal: show(&self.goal),
            lines: self
                .lines
                .iter()
                .enumerate()
                .map(|(i, l)| RawLine {
                    i,
                    f: show(&l.formula),
                    rule: l.justification.rule_name().to_string(),
                    prem: l.justification.premises(),
                })
                .collect(),
        };
        let mut s = serde_json::to_string(&raw).expect("certificate serialises");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, CertFormatError> {
        let raw: RawCert = serde_json::from_str(text)?;
        let logic = LogicIndex::new(raw.logic_n).map_err(|_| CertFormatError::Logic)?;
        let mut shared = Vec::with_capacity(raw.shared.len());
        for (entry, text) in raw.shared.iter().enumerate() {
            let f = parse_with_refs(text, &shared).map_err(|source| CertFormatError::Shared { entry, source })?;
            shared.push(f);
        }
        let read = |text: &str| {
            if shared.is_empty() {
                parse_internal(text)
            } else {
                parse_with_refs(text, &shared)
            }
        };
        let goal = read(&raw.goal).map_err(CertFormatError::Goal)?;
        let mut lines = Vec::with_capacity(raw.lines.len());
        for (pos, l) in raw.lines.into_iter().enumerate() {
            if l.i != pos {
                return Err(CertFormatError::Index { pos, found: l.i });
            }
            let formula = read(&l.f).map_err(|source| CertFormatError::Formula { line: pos, source })?;
            let bad = |rule: &str| CertFormatError::Premises {
                line: pos,
                rule: rule.to_string(),
                count: l.prem.len(),
            };
            let justification = match (l.rule.as_str(), l.prem.as_slice()) {
                ("taut", []) => Justification::Taut,
                ("axk", []) => Justification::AxK,
                ("axwgl", []) => Justification::AxWgl,
                ("mp", [i, j]) => Justification::Mp(*i, *j),
                ("nec", [i]) => Justification::Nec(*i),
                (r @ ("taut" | "axk" | "axwgl" | "mp" | "nec"), _) => return Err(bad(r)),
                (r, _) => {
                    return Err(CertFormatError::Rule {
                        line: pos,
                        rule: r.to_string(),
                    })
                }
            };
            lines.push(ProofLine { formula, justification });
        }
        Ok(Certificate { logic, lines, goal })
    }
}

#[derive(PartialEq, Eq, Hash)]
enum Key {
    Falsum,
    Var(Arc<str>),
    Implies(usize, usize),
    Box(usize),
}

/// Structural hash-consing of a set of root formulas. Class ids are issued in
/// post-order of first occurrence, so children precede parents.
struct Sharing {
    class_of: HashMap<usize, usize>,
    reps: Vec<Formula>,
    entry_of: HashMap<usize, usize>,
}

impl Sharing {
    fn new<'a>(goal: &'a Formula, rest: impl Iterator<Item = &'a Formula>) -> Self {
        let mut class_of: HashMap<usize, usize> = HashMap::new();
        let mut classes: HashMap<Key, usize> = HashMap::new();
        let mut reps: Vec<Formula> = Vec::new();
        let mut indegree: Vec<usize> = Vec::new();
        for root in std::iter::once(goal).chain(rest) {
            let mut stack = vec![(root, false)];
            while let Some((f, expanded)) = stack.pop() {
                if class_of.contains_key(&f.ptr()) {
                    continue;
                }
                let kids: Vec<&Formula> = match f.kind() {
                    Kind::Falsum | Kind::Var(_) => vec![],
                    Kind::Implies(a, b) => vec![a, b],
                    Kind::Box(a) => vec![a],
                };
                if !expanded {
                    stack.push((f, true));
                    stack.extend(kids.into_iter().rev().map(|k| (k, false)));
                    continue;
                }
                let class = |k: &Formula| class_of[&k.ptr()];
                let key = match f.kind() {
                    Kind::Falsum => Key::Falsum,
                    Kind::Var(v) => Key::Var(v.clone()),
                    Kind::Implies(a, b) => Key::Implies(class(a), class(b)),
                    Kind::Box(a) => Key::Box(class(a)),
                };
                let id = match classes.get(&key) {
                    Some(&id) => id,
                    None => {
                        let id = reps.len();
                        for k in &kids {
                            indegree[class(k)] += 1;
                        }
                        classes.insert(key, id);
                        reps.push(f.clone());
                        indegree.push(0);
                        id
                    }
                };
                class_of.insert(f.ptr(), id);
            }
            indegree[class_of[&root.ptr()]] += 1;
        }
        let entry_of = (0..reps.len())
            .filter(|&c| indegree[c] >= 2 && reps[c].size() >= SHARE_MIN_SIZE)
            .enumerate()
            .map(|(e, c)| (c, e))
            .collect();
        Sharing {
            class_of,
            reps,
            entry_of,
        }
    }

    fn print(&self, f: &Formula) -> String {
        print_with_refs(f, &|g: &Formula| self.entry_of.get(&self.class_of[&g.ptr()]).copied())
    }

    fn entries(&self) -> Vec<String> {
        let mut by_entry: Vec<(usize, usize)> = self.entry_of.iter().map(|(&c, &e)| (e, c)).collect();
        by_entry.sort_unstable();
        by_entry.into_iter().map(|(_, c)| self.print(&self.reps[c])).collect()
    }
}
