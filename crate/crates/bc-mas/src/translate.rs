//! Translation of a ground action description and a horizon `l` into a
//! logic program whose stable models are the length-`l` paths of the
//! induced transition system.
//!
//! The program consists of, in order:
//!   (a) one rule per static law and time point `i <= l`, with the ifcons
//!       literals as doubly-negated body atoms at time `i`;
//!   (b) one rule per dynamic law and `i < l`, head at `i+1`, after part at
//!       `i`, ifcons doubly negated at `i+1`;
//!   (c) a time-0 choice (`a :- not not a`) for each polarity of each
//!       regular fluent;
//!   (d) a choice for each action atom and `i < l`;
//!   (e) for every fluent and `i <= l`, two integrity constraints compiling
//!       the exactly-one cardinality over `{i:f, i:-f}`;
//!   (f) the closure `i:-a :- not i:a` naming unperformed actions.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::model::{ActionDescription, FluentKind, Literal};

pub type AtomId = u32;

/// A labeled expression `i:lit`: a fluent literal at time `i <= l` or an
/// action literal at time `i < l`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimedLit {
    pub time: u32,
    pub lit: Literal,
}

impl std::fmt::Display for TimedLit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.time, self.lit)
    }
}

/// A normal rule, a constraint (`head == None`), or a choice encoded with a
/// doubly negated head in `nnaf`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Rule {
    pub head: Option<AtomId>,
    pub pos: Vec<AtomId>,
    pub naf: Vec<AtomId>,
    pub nnaf: Vec<AtomId>,
}

#[derive(Clone, Debug)]
pub struct LogicProgram {
    pub horizon: u32,
    atoms: Vec<TimedLit>,
    index: HashMap<TimedLit, AtomId>,
    complement: Vec<AtomId>,
    pub rules: Vec<Rule>,
    /// `(i:f, i:-f)` pairs, one per fluent per time point.
    pub exactly_one: Vec<(AtomId, AtomId)>,
    /// Positive action atoms for every `i < l`, in canonical order.
    pub action_atoms: Vec<AtomId>,
}

impl LogicProgram {
    pub fn new_raw(atoms: Vec<TimedLit>, rules: Vec<Rule>, horizon: u32) -> Self {
        let mut p = LogicProgram {
            horizon,
            atoms: Vec::new(),
            index: HashMap::new(),
            complement: Vec::new(),
            rules,
            exactly_one: Vec::new(),
            action_atoms: Vec::new(),
        };
        for atom in atoms {
            p.intern(atom);
        }
        p.complement = (0..p.atoms.len() as AtomId)
            .map(|id| {
                let t = &p.atoms[id as usize];
                let comp = TimedLit {
                    time: t.time,
                    lit: t.lit.complement(),
                };
                p.index.get(&comp).copied().unwrap_or(id)
            })
            .collect();
        p
    }

    fn intern(&mut self, t: TimedLit) -> AtomId {
        if let Some(&id) = self.index.get(&t) {
            return id;
        }
        let id = self.atoms.len() as AtomId;
        self.atoms.push(t.clone());
        self.index.insert(t, id);
        id
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom(&self, id: AtomId) -> &TimedLit {
        &self.atoms[id as usize]
    }

    pub fn atoms(&self) -> impl Iterator<Item = (AtomId, &TimedLit)> {
        self.atoms.iter().enumerate().map(|(i, t)| (i as AtomId, t))
    }

    pub fn lookup(&self, time: u32, lit: &Literal) -> Option<AtomId> {
        self.index
            .get(&TimedLit {
                time,
                lit: lit.clone(),
            })
            .copied()
    }

    pub fn complement_of(&self, id: AtomId) -> AtomId {
        self.complement[id as usize]
    }

    /// Same signature, different rule set; used by the reduct.
    pub fn clone_with_rules(&self, rules: Vec<Rule>) -> LogicProgram {
        LogicProgram {
            horizon: self.horizon,
            atoms: self.atoms.clone(),
            index: self.index.clone(),
            complement: self.complement.clone(),
            rules,
            exactly_one: self.exactly_one.clone(),
            action_atoms: self.action_atoms.clone(),
        }
    }
}

#[derive(Clone, Debug, thiserror::Error, PartialEq, Eq)]
pub enum TranslateError {
    #[error("horizon must be non-negative, got {0}")]
    NegativeHorizon(i64),
}

/// Build the program for `desc` at the given horizon.
pub fn translate(desc: &ActionDescription, horizon: i64) -> Result<LogicProgram, TranslateError> {
    if horizon < 0 {
        return Err(TranslateError::NegativeHorizon(horizon));
    }
    let l = horizon as u32;
    let sig = &desc.signature;

    let mut atoms = Vec::new();
    for i in 0..=l {
        for fluent in sig.fluents.keys() {
            for positive in [true, false] {
                atoms.push(TimedLit {
                    time: i,
                    lit: Literal {
                        atom: fluent.clone(),
                        positive,
                    },
                });
            }
        }
    }
    for i in 0..l {
        for action in sig.actions.keys() {
            for positive in [true, false] {
                atoms.push(TimedLit {
                    time: i,
                    lit: Literal {
                        atom: action.clone(),
                        positive,
                    },
                });
            }
        }
    }
    let mut p = LogicProgram::new_raw(atoms, Vec::new(), l);

    let at = |p: &LogicProgram, time: u32, lit: &Literal| -> AtomId {
        p.lookup(time, lit)
            .unwrap_or_else(|| panic!("atom {}:{} missing from program signature", time, lit))
    };

    // (a) static laws at every time point
    for law in &desc.statics {
        for i in 0..=l {
            p.rules.push(Rule {
                head: Some(at(&p, i, &law.head)),
                pos: law.if_part.iter().map(|x| at(&p, i, x)).collect(),
                naf: Vec::new(),
                nnaf: law.ifcons.iter().map(|x| at(&p, i, x)).collect(),
            });
        }
    }
    // (b) dynamic laws between consecutive time points
    for law in &desc.dynamics {
        for i in 0..l {
            p.rules.push(Rule {
                head: Some(at(&p, i + 1, &law.head)),
                pos: law.after.iter().map(|x| at(&p, i, x)).collect(),
                naf: Vec::new(),
                nnaf: law.ifcons.iter().map(|x| at(&p, i + 1, x)).collect(),
            });
        }
    }
    // (c) time-0 choice for each regular fluent, both polarities
    for fluent in sig.fluents.keys() {
        if sig.fluent_kind(fluent) != Some(FluentKind::Regular) {
            continue;
        }
        for positive in [true, false] {
            let id = at(
                &p,
                0,
                &Literal {
                    atom: fluent.clone(),
                    positive,
                },
            );
            p.rules.push(Rule {
                head: Some(id),
                nnaf: vec![id],
                ..Rule::default()
            });
        }
    }
    // (d) action choices
    for i in 0..l {
        for action in sig.actions.keys() {
            let id = at(&p, i, &Literal::pos(action.clone()));
            p.action_atoms.push(id);
            p.rules.push(Rule {
                head: Some(id),
                nnaf: vec![id],
                ..Rule::default()
            });
        }
    }
    // (e) exactly-one constraints per fluent per time point
    for i in 0..=l {
        for fluent in sig.fluents.keys() {
            let pos = at(&p, i, &Literal::pos(fluent.clone()));
            let neg = at(&p, i, &Literal::neg(fluent.clone()));
            p.exactly_one.push((pos, neg));
            p.rules.push(Rule {
                head: None,
                pos: vec![pos, neg],
                ..Rule::default()
            });
            p.rules.push(Rule {
                head: None,
                naf: vec![pos, neg],
                ..Rule::default()
            });
        }
    }
    // (f) closure naming unperformed actions
    for i in 0..l {
        for action in sig.actions.keys() {
            let pos = at(&p, i, &Literal::pos(action.clone()));
            let neg = at(&p, i, &Literal::neg(action.clone()));
            p.rules.push(Rule {
                head: Some(neg),
                naf: vec![pos],
                ..Rule::default()
            });
        }
    }
    Ok(p)
}

/// Deterministic, human-readable text form with `not` and `not not`
/// spelled out, one rule per line.
pub fn emit_text(p: &LogicProgram) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "% logic program: horizon {}, {} atoms, {} rules",
        p.horizon,
        p.atom_count(),
        p.rules.len()
    );
    for rule in &p.rules {
        out.push_str(&render_rule(p, rule));
        out.push('\n');
    }
    out
}

fn render_rule(p: &LogicProgram, rule: &Rule) -> String {
    let mut parts: Vec<String> = Vec::new();
    for &a in &rule.pos {
        parts.push(p.atom(a).to_string());
    }
    for &a in &rule.naf {
        parts.push(format!("not {}", p.atom(a)));
    }
    for &a in &rule.nnaf {
        parts.push(format!("not not {}", p.atom(a)));
    }
    match (&rule.head, parts.is_empty()) {
        (Some(h), true) => format!("{}.", p.atom(*h)),
        (Some(h), false) => format!("{} :- {}.", p.atom(*h), parts.join(", ")),
        (None, _) => format!(":- {}.", parts.join(", ")),
    }
}

#[derive(Serialize)]
struct ProgramDto {
    horizon: u32,
    atoms: Vec<String>,
    rules: Vec<RuleDto>,
    exactly_one: Vec<[String; 2]>,
}

#[derive(Serialize)]
struct RuleDto {
    head: Option<String>,
    pos: Vec<String>,
    naf: Vec<String>,
    nnaf: Vec<String>,
}

/// JSON dump of the program for external tooling.
pub fn emit_json(p: &LogicProgram) -> String {
    let name = |id: &AtomId| p.atom(*id).to_string();
    let dto = ProgramDto {
        horizon: p.horizon,
        atoms: p.atoms().map(|(_, t)| t.to_string()).collect(),
        rules: p
            .rules
            .iter()
            .map(|r| RuleDto {
                head: r.head.as_ref().map(name),
                pos: r.pos.iter().map(|a| name(a)).collect(),
                naf: r.naf.iter().map(|a| name(a)).collect(),
                nnaf: r.nnaf.iter().map(|a| name(a)).collect(),
            })
            .collect(),
        exactly_one: p
            .exactly_one
            .iter()
            .map(|(a, b)| [name(a), name(b)])
            .collect(),
    };
    serde_json::to_string_pretty(&dto).expect("program serialization cannot fail")
}

/// Exact rule count implied by the construction; used as a structural
/// self-check in tests.
pub fn expected_rule_count(desc: &ActionDescription, l: u32) -> usize {
    let statics = desc.statics.len();
    let dynamics = desc.dynamics.len();
    let regular = desc
        .signature
        .fluents
        .values()
        .filter(|i| i.kind == FluentKind::Regular)
        .count();
    let fluents = desc.signature.fluents.len();
    let actions = desc.signature.actions.len();
    let l = l as usize;
    statics * (l + 1)
        + dynamics * l
        + 2 * regular
        + actions * l
        + 2 * fluents * (l + 1)
        + actions * l
}
