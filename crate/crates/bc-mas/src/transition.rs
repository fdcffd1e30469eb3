//! Transition-system extraction: states are the time-0 projections of the
//! stable models of the horizon-0 program, transitions are the triples
//! `<from, performed actions, to>` read off the stable models of the
//! horizon-1 program.
//!
//! States range over the visible fluents (user fluents plus abnormality
//! fluents); the fresh contradiction-pair fluents of expanded abbreviations
//! are bookkeeping and never shown. Exports render DOT and JSON with
//! canonical ordering so identical systems produce identical bytes.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::model::{ActionDescription, Atom, FluentClass, Literal, Signature};
use crate::solver::{enumerate, EngineError, Interpretation, SolveOptions};
use crate::translate::{translate, AtomId, LogicProgram};

/// A complete assignment of one polarity per visible fluent.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct State {
    pub literals: Vec<Literal>,
}

impl State {
    pub fn new(mut literals: Vec<Literal>) -> Self {
        literals.sort();
        literals.dedup();
        State { literals }
    }

    pub fn contains(&self, lit: &Literal) -> bool {
        self.literals.binary_search(lit).is_ok()
    }

    pub fn positives(&self) -> impl Iterator<Item = &Literal> {
        self.literals.iter().filter(|l| l.positive)
    }

    /// Positive literals restricted to user fluents: the usual rendering of
    /// a state in figures.
    pub fn positive_user_atoms(&self, sig: &Signature) -> Vec<Atom> {
        self.positives()
            .filter(|l| sig.fluent_class(&l.atom) == Some(FluentClass::User))
            .map(|l| l.atom.clone())
            .collect()
    }

    /// Positive abnormality fluents in this state; a state of a composed
    /// system that contains one that no resolution law caused is one of the
    /// "superfluous" states unreachable from sound initial states.
    pub fn positive_ab_atoms(&self, sig: &Signature) -> Vec<Atom> {
        self.positives()
            .filter(|l| {
                matches!(
                    sig.fluent_class(&l.atom),
                    Some(FluentClass::AbStatic) | Some(FluentClass::AbDynamic)
                )
            })
            .map(|l| l.atom.clone())
            .collect()
    }
}

impl std::fmt::Display for State {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.positives().map(|l| l.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// The set of actions performed simultaneously in a transition.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct CompoundAction(pub BTreeSet<Atom>);

impl CompoundAction {
    pub fn empty() -> Self {
        CompoundAction(BTreeSet::new())
    }

    pub fn from_atoms(atoms: impl IntoIterator<Item = Atom>) -> Self {
        CompoundAction(atoms.into_iter().collect())
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.0.contains(atom)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::fmt::Display for CompoundAction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Transition {
    pub from: State,
    pub action: CompoundAction,
    pub to: State,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TransitionSystem {
    pub states: BTreeSet<State>,
    pub transitions: BTreeSet<Transition>,
}

impl TransitionSystem {
    pub fn outgoing<'a>(
        &'a self,
        from: &'a State,
    ) -> impl Iterator<Item = &'a Transition> + 'a {
        self.transitions.iter().filter(move |t| &t.from == from)
    }
}

// ---------------------------------------------------------------------------
// Extraction
// ---------------------------------------------------------------------------

/// Caches the horizon-0 and horizon-1 programs of a description and answers
/// state/transition queries against them.
pub struct TransitionOracle {
    sig: Signature,
    p0: LogicProgram,
    p1: LogicProgram,
    cap: u64,
}

impl TransitionOracle {
    pub fn new(desc: &ActionDescription) -> Self {
        Self::with_cap(desc, SolveOptions::default().candidate_cap)
    }

    pub fn with_cap(desc: &ActionDescription, cap: u64) -> Self {
        TransitionOracle {
            sig: desc.signature.clone(),
            p0: translate(desc, 0).expect("horizon 0 is valid"),
            p1: translate(desc, 1).expect("horizon 1 is valid"),
            cap,
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    fn opts(&self) -> SolveOptions {
        SolveOptions {
            candidate_cap: self.cap,
            ..SolveOptions::default()
        }
    }

    fn project(&self, p: &LogicProgram, model: &Interpretation, time: u32) -> State {
        let mut literals = Vec::new();
        for fluent in self.sig.visible_fluents() {
            let pos = Literal::pos(fluent.clone());
            let id = p
                .lookup(time, &pos)
                .expect("visible fluent is in the program signature");
            if model.contains(id) {
                literals.push(pos);
            } else {
                literals.push(Literal::neg(fluent.clone()));
            }
        }
        State::new(literals)
    }

    fn state_assumptions(
        &self,
        p: &LogicProgram,
        s: &State,
        time: u32,
    ) -> Result<Vec<(AtomId, bool)>, EngineError> {
        let mut out = Vec::new();
        for lit in &s.literals {
            match p.lookup(time, lit) {
                Some(id) => {
                    out.push((id, true));
                    out.push((p.complement_of(id), false));
                }
                // A literal over a fluent the program does not know cannot
                // be satisfied; rather than failing, return an impossible
                // assumption set by falsifying everything.
                None => return Ok(vec![(0, true), (0, false)]),
            }
        }
        Ok(out)
    }

    fn action_assumptions(&self, action: &CompoundAction) -> Vec<(AtomId, bool)> {
        let mut out = Vec::new();
        for atom in self.sig.actions.keys() {
            let performed = action.contains(atom);
            if let Some(id) = self.p1.lookup(0, &Literal::pos(atom.clone())) {
                out.push((id, performed));
                out.push((self.p1.complement_of(id), !performed));
            }
        }
        out
    }

    /// All states: time-0 projections of the horizon-0 stable models.
    pub fn states(&self) -> Result<BTreeSet<State>, EngineError> {
        let models = enumerate(&self.p0, &self.opts())?;
        Ok(models
            .iter()
            .map(|m| self.project(&self.p0, m, 0))
            .collect())
    }

    /// The full transition system.
    pub fn transitions(&self) -> Result<TransitionSystem, EngineError> {
        let states = self.states()?;
        let models = enumerate(&self.p1, &self.opts())?;
        let mut transitions = BTreeSet::new();
        for m in models.iter() {
            transitions.insert(self.triple(m));
        }
        Ok(TransitionSystem { states, transitions })
    }

    fn triple(&self, model: &Interpretation) -> Transition {
        let from = self.project(&self.p1, model, 0);
        let to = self.project(&self.p1, model, 1);
        let mut performed = BTreeSet::new();
        for atom in self.sig.actions.keys() {
            if let Some(id) = self.p1.lookup(0, &Literal::pos(atom.clone())) {
                if model.contains(id) {
                    performed.insert(atom.clone());
                }
            }
        }
        Transition {
            from,
            action: CompoundAction(performed),
            to,
        }
    }

    /// Is `s` a state of the description?
    pub fn contains_state(&self, s: &State) -> Result<bool, EngineError> {
        let assumptions = self.state_assumptions(&self.p0, s, 0)?;
        crate::solver::exists_model(&self.p0, assumptions, self.cap)
    }

    /// Does any transition leave `from` under exactly this compound action?
    pub fn has_any_successor(
        &self,
        from: &State,
        action: &CompoundAction,
    ) -> Result<bool, EngineError> {
        let mut assumptions = self.state_assumptions(&self.p1, from, 0)?;
        assumptions.extend(self.action_assumptions(action));
        crate::solver::exists_model(&self.p1, assumptions, self.cap)
    }

    /// All successor states of `from` under the compound action.
    pub fn successors(
        &self,
        from: &State,
        action: &CompoundAction,
    ) -> Result<Vec<State>, EngineError> {
        let mut assumptions = self.state_assumptions(&self.p1, from, 0)?;
        assumptions.extend(self.action_assumptions(action));
        let opts = SolveOptions {
            assumptions,
            candidate_cap: self.cap,
            ..SolveOptions::default()
        };
        let models = enumerate(&self.p1, &opts)?;
        let mut out: Vec<State> = models
            .iter()
            .map(|m| self.project(&self.p1, m, 1))
            .collect();
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// Membership test for a specific triple.
    pub fn has_transition(
        &self,
        from: &State,
        action: &CompoundAction,
        to: &State,
    ) -> Result<bool, EngineError> {
        let mut assumptions = self.state_assumptions(&self.p1, from, 0)?;
        assumptions.extend(self.action_assumptions(action));
        assumptions.extend(self.state_assumptions(&self.p1, to, 1)?);
        crate::solver::exists_model(&self.p1, assumptions, self.cap)
    }
}

/// States of a description (projection of the horizon-0 stable models).
pub fn states(desc: &ActionDescription) -> Result<BTreeSet<State>, EngineError> {
    TransitionOracle::new(desc).states()
}

/// The transition system of a description.
pub fn transitions(desc: &ActionDescription) -> Result<TransitionSystem, EngineError> {
    TransitionOracle::new(desc).transitions()
}

/// Build the complete state whose positive visible literals are exactly
/// `positives`; every other visible fluent is negative.
pub fn state_from_positives(sig: &Signature, positives: &[Literal]) -> Result<State, String> {
    let mut literals = Vec::new();
    for lit in positives {
        if !lit.positive {
            return Err(format!("`{}` is negative; list positive literals only", lit));
        }
        if sig.fluent_class(&lit.atom).map_or(true, |c| c == FluentClass::Fresh) {
            return Err(format!("`{}` is not a visible fluent of the description", lit.atom));
        }
    }
    for fluent in sig.visible_fluents() {
        let pos = Literal::pos(fluent.clone());
        if positives.iter().any(|l| l == &pos) {
            literals.push(pos);
        } else {
            literals.push(Literal::neg(fluent.clone()));
        }
    }
    Ok(State::new(literals))
}

// ---------------------------------------------------------------------------
// Exports
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, Default)]
pub struct DotOptions {
    pub show_negative: bool,
    pub show_ab: bool,
    pub show_self_loops: bool,
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn state_label(s: &State, sig: &Signature, opts: &DotOptions) -> String {
    let mut parts = Vec::new();
    for lit in &s.literals {
        let class = sig.fluent_class(&lit.atom);
        let is_ab = matches!(
            class,
            Some(FluentClass::AbStatic) | Some(FluentClass::AbDynamic)
        );
        if is_ab && !opts.show_ab {
            continue;
        }
        if !lit.positive && !opts.show_negative {
            continue;
        }
        parts.push(dot_escape(&lit.to_string()));
    }
    if parts.is_empty() {
        "{}".to_string()
    } else {
        parts.join("\\n")
    }
}

/// Render the system as a DOT digraph. Empty-action self loops are omitted
/// unless requested; node numbering follows the canonical state order.
pub fn export_dot(ts: &TransitionSystem, sig: &Signature, opts: &DotOptions) -> String {
    let states: Vec<&State> = ts.states.iter().collect();
    let index_of = |s: &State| states.iter().position(|x| *x == s).unwrap();
    let mut out = String::new();
    out.push_str("digraph transitions {\n");
    out.push_str("  rankdir=LR;\n");
    for (i, s) in states.iter().enumerate() {
        out.push_str(&format!(
            "  n{} [shape=box, label=\"{}\"];\n",
            i,
            state_label(s, sig, opts)
        ));
    }
    for t in &ts.transitions {
        if t.action.is_empty() && t.from == t.to && !opts.show_self_loops {
            continue;
        }
        let label = t
            .action
            .0
            .iter()
            .map(|a| a.to_string())
            .collect::<Vec<_>>()
            .join(", ");
        out.push_str(&format!(
            "  n{} -> n{} [label=\"{}\"];\n",
            index_of(&t.from),
            index_of(&t.to),
            dot_escape(&label)
        ));
    }
    out.push_str("}\n");
    out
}

#[derive(Serialize, Deserialize)]
struct TransitionDto {
    from: usize,
    actions: Vec<String>,
    to: usize,
}

#[derive(Serialize, Deserialize)]
struct SystemDto {
    states: Vec<Vec<String>>,
    transitions: Vec<TransitionDto>,
}

/// JSON export: states as literal-string arrays, transitions as index
/// triples, all canonically ordered.
pub fn export_json(ts: &TransitionSystem) -> String {
    let states: Vec<&State> = ts.states.iter().collect();
    let index_of = |s: &State| states.iter().position(|x| *x == s).unwrap();
    let dto = SystemDto {
        states: states
            .iter()
            .map(|s| s.literals.iter().map(|l| l.to_string()).collect())
            .collect(),
        transitions: ts
            .transitions
            .iter()
            .map(|t| TransitionDto {
                from: index_of(&t.from),
                actions: t.action.0.iter().map(|a| a.to_string()).collect(),
                to: index_of(&t.to),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&dto).expect("system serialization cannot fail")
}

/// Reader for the JSON export, mainly for round-trip checks in tests and
/// external tooling.
pub fn import_json(text: &str) -> Result<TransitionSystem, String> {
    let dto: SystemDto = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let parse_state = |row: &Vec<String>| -> Result<State, String> {
        let lits = crate::parser::parse_ground_literals(&row.join(","))
            .map_err(|e| e.to_string())?;
        Ok(State::new(lits))
    };
    let states: Vec<State> = dto.states.iter().map(parse_state).collect::<Result<_, _>>()?;
    let mut ts = TransitionSystem {
        states: states.iter().cloned().collect(),
        transitions: BTreeSet::new(),
    };
    for t in &dto.transitions {
        let from = states.get(t.from).ok_or("state index out of range")?.clone();
        let to = states.get(t.to).ok_or("state index out of range")?.clone();
        let actions = crate::parser::parse_ground_atoms(&t.actions.join(","))
            .map_err(|e| e.to_string())?;
        ts.transitions.insert(Transition {
            from,
            action: CompoundAction::from_atoms(actions),
            to,
        });
    }
    Ok(ts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grounder::ground;
    use crate::parser::parse;

    fn toy() -> ActionDescription {
        let spec = parse(
            "sort s = {x}.\n\
             fluent p(s) : regular.\n\
             action go(s).\n\
             inertial p(x).\n\
             -p(x) after go(x).",
        )
        .unwrap();
        ground(&spec).unwrap().0
    }

    #[test]
    fn toy_states_and_transitions() {
        let desc = toy();
        let ts = transitions(&desc).unwrap();
        assert_eq!(ts.states.len(), 2);
        // self loops on both states, go from p to -p, and go is idempotent
        // on the -p state only through inertia of the negative literal
        let lit = |s: &str| crate::parser::parse_ground_literals(s).unwrap();
        let p = State::new(lit("p(x)"));
        let np = State::new(lit("-p(x)"));
        let go = CompoundAction::from_atoms(lit("go(x)").into_iter().map(|l| l.atom));
        assert!(ts.transitions.contains(&Transition {
            from: p.clone(),
            action: CompoundAction::empty(),
            to: p.clone()
        }));
        assert!(ts.transitions.contains(&Transition {
            from: p.clone(),
            action: go.clone(),
            to: np.clone()
        }));
        assert!(ts.transitions.contains(&Transition {
            from: np.clone(),
            action: go.clone(),
            to: np.clone()
        }));
    }

    #[test]
    fn contradictory_statics_leave_no_states() {
        let spec = parse(
            "sort s = {x}. fluent p(s) : regular.\n\
             impossible p(x). impossible -p(x).",
        )
        .unwrap();
        let desc = ground(&spec).unwrap().0;
        assert!(states(&desc).unwrap().is_empty());
    }

    #[test]
    fn endpoints_of_transitions_are_states() {
        let desc = toy();
        let ts = transitions(&desc).unwrap();
        for t in &ts.transitions {
            assert!(ts.states.contains(&t.from));
            assert!(ts.states.contains(&t.to));
        }
    }

    #[test]
    fn oracle_queries_match_enumeration() {
        let desc = toy();
        let oracle = TransitionOracle::new(&desc);
        let ts = oracle.transitions().unwrap();
        for s in &ts.states {
            assert!(oracle.contains_state(s).unwrap());
            for t in ts.outgoing(s) {
                assert!(oracle.has_transition(&t.from, &t.action, &t.to).unwrap());
                assert!(oracle.has_any_successor(&t.from, &t.action).unwrap());
                let succ = oracle.successors(&t.from, &t.action).unwrap();
                assert!(succ.contains(&t.to));
            }
        }
    }

    #[test]
    fn dot_export_is_deterministic_and_suppresses_idle_loops() {
        let desc = toy();
        let ts = transitions(&desc).unwrap();
        let sig = &desc.signature;
        let a = export_dot(&ts, sig, &DotOptions::default());
        let b = export_dot(&ts, sig, &DotOptions::default());
        assert_eq!(a, b);
        assert_eq!(a.matches("->").count(), 2); // both empty self-loops hidden
        let c = export_dot(
            &ts,
            sig,
            &DotOptions {
                show_self_loops: true,
                ..DotOptions::default()
            },
        );
        assert_eq!(c.matches("->").count(), 4);
    }

    #[test]
    fn empty_system_exports() {
        let ts = TransitionSystem::default();
        let sig = Signature::new();
        let dot = export_dot(&ts, &sig, &DotOptions::default());
        assert_eq!(dot, "digraph transitions {\n  rankdir=LR;\n}\n");
        let json = export_json(&ts);
        let back = import_json(&json).unwrap();
        assert_eq!(back, ts);
    }

    #[test]
    fn json_round_trip() {
        let desc = toy();
        let ts = transitions(&desc).unwrap();
        let json = export_json(&ts);
        let back = import_json(&json).unwrap();
        assert_eq!(back, ts);
    }

    #[test]
    fn state_from_positives_completes_negatives() {
        let desc = toy();
        let lits = crate::parser::parse_ground_literals("p(x)").unwrap();
        let s = state_from_positives(&desc.signature, &lits).unwrap();
        assert_eq!(s.literals.len(), 1);
        assert!(s.contains(&lits[0]));
    }
}
