//! The two-stage composition of multi-agent systems.
//!
//! Stage one unions the per-agent descriptions, with their static laws made
//! defeasible through defined abnormality fluents (`ab(..)`), and adds the
//! conflict component. Potential conflicts of the result mark the
//! multi-agent aspects the single-agent views cannot express.
//!
//! Stage two makes the dynamic laws defeasible through regular abnormality
//! fluents (`ab'(..)`), so resolution laws can cause them, and adds the
//! resolution component. The constructive resolver builds such laws for a
//! chosen conflict and desired successor and verifies the transition they
//! produce.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::model::{
    ActionDescription, Atom, DynamicLaw, FluentClass, FluentInfo, FluentKind, LawId, LawKind,
    LawRole, Literal, ModelError, Signature, StaticLaw, AB_DYNAMIC_FUNCTOR, AB_STATIC_FUNCTOR,
};
use crate::solver::EngineError;
use crate::transition::{CompoundAction, State, Transition, TransitionOracle};

// ---------------------------------------------------------------------------
// Abnormality keying
// ---------------------------------------------------------------------------

/// How abnormality fluents are named. The default keys a law by its head
/// literal, except that the halves of an expanded `nonexecutable` or
/// `impossible` law share one fluent keyed by the law's group id, so a
/// single abnormality defeats the whole contradiction pair without leaking
/// into unrelated pairs. `PerLaw` keys every law by its group id.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AbKeying {
    #[default]
    HeadWithGroupPairs,
    PerLaw,
}

fn ab_inner(id: &LawId, head: &Literal, keying: AbKeying) -> crate::model::Term {
    let by_group = match keying {
        AbKeying::PerLaw => true,
        AbKeying::HeadWithGroupPairs => {
            matches!(id.role, LawRole::PairPositive | LawRole::PairNegative)
        }
    };
    if by_group {
        id.group.to_term()
    } else {
        head.to_term()
    }
}

/// The abnormality fluent a static law receives.
pub fn static_ab_atom(law: &StaticLaw, keying: AbKeying) -> Atom {
    Atom::new(AB_STATIC_FUNCTOR, vec![ab_inner(&law.id, &law.head, keying)])
}

/// The abnormality fluent a dynamic law receives.
pub fn dynamic_ab_atom(law: &DynamicLaw, keying: AbKeying) -> Atom {
    Atom::new(AB_DYNAMIC_FUNCTOR, vec![ab_inner(&law.id, &law.head, keying)])
}

fn exempt(role: LawRole) -> bool {
    // Completion laws pin fresh pair fluents and must stay indefeasible,
    // otherwise defeating a pair erases the fluent's value entirely;
    // abnormality defaults are never themselves made defeasible.
    matches!(role, LawRole::Completion | LawRole::AbnormalityDefault)
}

/// Make every static law defeasible: append `-ab(key)` to its ifcons part
/// and default the new fluent to false. Dynamic laws are copied unchanged.
pub fn make_statics_defeasible(desc: &ActionDescription, keying: AbKeying) -> ActionDescription {
    let mut sig = desc.signature.clone();
    let mut statics = Vec::with_capacity(desc.statics.len());
    let mut introduced = BTreeSet::new();
    for law in &desc.statics {
        if exempt(law.id.role) {
            statics.push(law.clone());
            continue;
        }
        let ab = static_ab_atom(law, keying);
        let mut guarded = law.clone();
        guarded.ifcons.push(Literal::neg(ab.clone()));
        statics.push(guarded);
        introduced.insert(ab);
    }
    for ab in &introduced {
        sig.declare_fluent(
            ab.clone(),
            FluentInfo {
                kind: FluentKind::Defined,
                class: FluentClass::AbStatic,
                provisional: false,
            },
        )
        .expect("abnormality fluents cannot clash with reserved declarations");
        statics.push(StaticLaw {
            id: LawId::new(ab.clone(), LawKind::Default, LawRole::AbnormalityDefault),
            head: Literal::neg(ab.clone()),
            if_part: Vec::new(),
            ifcons: vec![Literal::neg(ab.clone())],
        });
    }
    ActionDescription::new(sig, statics, desc.dynamics.clone())
}

/// Make every dynamic law defeasible: append `-ab'(key)` to its ifcons part
/// and default the new fluent to false. The new fluents are regular, so
/// resolution laws may cause them. Static laws are copied unchanged.
pub fn make_dynamics_defeasible(desc: &ActionDescription, keying: AbKeying) -> ActionDescription {
    let mut sig = desc.signature.clone();
    let mut dynamics = Vec::with_capacity(desc.dynamics.len());
    let mut statics = desc.statics.clone();
    let mut introduced = BTreeSet::new();
    for law in &desc.dynamics {
        if exempt(law.id.role) {
            dynamics.push(law.clone());
            continue;
        }
        let ab = dynamic_ab_atom(law, keying);
        let mut guarded = law.clone();
        guarded.ifcons.push(Literal::neg(ab.clone()));
        dynamics.push(guarded);
        introduced.insert(ab);
    }
    for ab in &introduced {
        sig.declare_fluent(
            ab.clone(),
            FluentInfo {
                kind: FluentKind::Regular,
                class: FluentClass::AbDynamic,
                provisional: false,
            },
        )
        .expect("abnormality fluents cannot clash with reserved declarations");
        statics.push(StaticLaw {
            id: LawId::new(ab.clone(), LawKind::Default, LawRole::AbnormalityDefault),
            head: Literal::neg(ab.clone()),
            if_part: Vec::new(),
            ifcons: vec![Literal::neg(ab.clone())],
        });
    }
    ActionDescription::new(sig, statics, dynamics)
}

/// The abnormality fluents `transformed` introduced over `base`.
pub fn introduced_ab_fluents(base: &ActionDescription, transformed: &ActionDescription) -> Vec<Atom> {
    transformed
        .signature
        .fluents
        .iter()
        .filter(|(atom, info)| {
            matches!(info.class, FluentClass::AbStatic | FluentClass::AbDynamic)
                && !base.signature.fluents.contains_key(*atom)
        })
        .map(|(atom, _)| atom.clone())
        .collect()
}

// ---------------------------------------------------------------------------
// Multi-agent composition
// ---------------------------------------------------------------------------

/// A multi-agent system: one description per agent, the conflict component,
/// and optionally the resolution component.
#[derive(Clone, Debug, Default)]
pub struct MasSpec {
    pub agents: BTreeMap<String, ActionDescription>,
    pub conflict: Option<ActionDescription>,
    pub resolution: Option<ActionDescription>,
}

#[derive(Clone, Debug, thiserror::Error)]
pub enum ComposeError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("abnormality fluents referenced but never introduced: {0}")]
    UnknownAbnormality(String),
    #[error("symbol `{0}` of the resolution component is not declared in the composed union")]
    UnknownResolutionSymbol(Atom),
    #[error("{0} actions make the compound-action space too large; pass a size bound")]
    TooManyActions(usize),
    #[error("`{action}` has a successor at `{state}`; it is not a potential conflict there")]
    NotAConflict { action: String, state: String },
    #[error("`{0}` is not a state of the description")]
    UnknownState(String),
    #[error("resolution verification failed for transition {0}; this indicates a defect in the resolver")]
    VerificationFailed(String),
}

fn union_of(parts: &[&ActionDescription]) -> Result<ActionDescription, ComposeError> {
    let mut sig = Signature::new();
    let mut statics = Vec::new();
    let mut dynamics = Vec::new();
    for part in parts {
        sig = sig.merge(&part.signature)?;
        statics.extend(part.statics.iter().cloned());
        dynamics.extend(part.dynamics.iter().cloned());
    }
    Ok(ActionDescription::new(sig, statics, dynamics))
}

fn check_no_provisional(desc: &ActionDescription) -> Result<(), ComposeError> {
    let dangling: Vec<String> = desc
        .signature
        .fluents
        .iter()
        .filter(|(_, info)| info.provisional)
        .map(|(atom, _)| atom.to_string())
        .collect();
    if dangling.is_empty() {
        Ok(())
    } else {
        Err(ComposeError::UnknownAbnormality(dangling.join(", ")))
    }
}

/// Stage one: the union of the agents' descriptions, statics made
/// defeasible, plus the conflict component.
pub fn compose_union(mas: &MasSpec, keying: AbKeying) -> Result<ActionDescription, ComposeError> {
    let transformed: Vec<ActionDescription> = mas
        .agents
        .values()
        .map(|d| make_statics_defeasible(d, keying))
        .collect();
    let mut parts: Vec<&ActionDescription> = transformed.iter().collect();
    if let Some(conflict) = &mas.conflict {
        parts.push(conflict);
    }
    let union = union_of(&parts)?;
    check_no_provisional(&union)?;
    Ok(union)
}

/// Stage two: dynamics of the union made defeasible, plus the resolution
/// component.
pub fn compose_global(
    union: &ActionDescription,
    resolution: &ActionDescription,
    keying: AbKeying,
) -> Result<ActionDescription, ComposeError> {
    let weakened = make_dynamics_defeasible(union, keying);
    for (atom, info) in &resolution.signature.fluents {
        if info.class == FluentClass::User && !weakened.signature.fluents.contains_key(atom) {
            return Err(ComposeError::UnknownResolutionSymbol(atom.clone()));
        }
    }
    for atom in resolution.signature.actions.keys() {
        if !weakened.signature.actions.contains_key(atom) {
            return Err(ComposeError::UnknownResolutionSymbol(atom.clone()));
        }
    }
    let global = union_of(&[&weakened, resolution])?;
    check_no_provisional(&global)?;
    Ok(global)
}

/// Both stages from a [`MasSpec`].
pub fn compose_stage(
    mas: &MasSpec,
    global: bool,
    keying: AbKeying,
) -> Result<ActionDescription, ComposeError> {
    let union = compose_union(mas, keying)?;
    if !global {
        return Ok(union);
    }
    let empty = ActionDescription::default();
    let resolution = mas.resolution.as_ref().unwrap_or(&empty);
    compose_global(&union, resolution, keying)
}

// ---------------------------------------------------------------------------
// Potential conflicts
// ---------------------------------------------------------------------------

/// Per state, the compound actions with no outgoing transition there.
#[derive(Clone, Debug, Default)]
pub struct ConflictReport {
    pub actions: Vec<Atom>,
    pub size_bound: Option<usize>,
    pub per_state: Vec<(State, Vec<CompoundAction>)>,
}

impl ConflictReport {
    pub fn contains(&self, state: &State, action: &CompoundAction) -> bool {
        self.per_state
            .iter()
            .find(|(s, _)| s == state)
            .map_or(false, |(_, cs)| cs.contains(action))
    }

    pub fn conflicts_at(&self, state: &State) -> Option<&[CompoundAction]> {
        self.per_state
            .iter()
            .find(|(s, _)| s == state)
            .map(|(_, cs)| cs.as_slice())
    }

    pub fn total(&self) -> usize {
        self.per_state.iter().map(|(_, cs)| cs.len()).sum()
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Entry {
            state: Vec<String>,
            conflicts: Vec<Vec<String>>,
        }
        #[derive(Serialize)]
        struct Dto {
            actions: Vec<String>,
            size_bound: Option<usize>,
            states: Vec<Entry>,
        }
        let dto = Dto {
            actions: self.actions.iter().map(|a| a.to_string()).collect(),
            size_bound: self.size_bound,
            states: self
                .per_state
                .iter()
                .map(|(s, cs)| Entry {
                    state: s.literals.iter().map(|l| l.to_string()).collect(),
                    conflicts: cs
                        .iter()
                        .map(|c| c.0.iter().map(|a| a.to_string()).collect())
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&dto).expect("report serialization cannot fail")
    }
}

/// All compound actions over `actions`, smallest first, capped by `bound`.
fn compound_actions(actions: &[Atom], bound: Option<usize>) -> Vec<CompoundAction> {
    let n = actions.len();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << n) {
        let size = mask.count_ones() as usize;
        if bound.map_or(false, |b| size > b) {
            continue;
        }
        let set: BTreeSet<Atom> = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| actions[i].clone())
            .collect();
        out.push(CompoundAction(set));
    }
    out.sort_by_key(|c| (c.0.len(), c.0.iter().cloned().collect::<Vec<_>>()));
    out
}

/// Compute the potential conflicts of every state: the compound actions
/// (up to the size bound) with no successor there.
pub fn potential_conflicts(
    desc: &ActionDescription,
    size_bound: Option<usize>,
) -> Result<ConflictReport, ComposeError> {
    let actions: Vec<Atom> = desc.signature.actions.keys().cloned().collect();
    if actions.len() > 16 {
        return Err(ComposeError::TooManyActions(actions.len()));
    }
    let oracle = TransitionOracle::new(desc);
    let ts = oracle.transitions()?;
    let all = compound_actions(&actions, size_bound);
    let mut per_state = Vec::new();
    for state in &ts.states {
        let outgoing: BTreeSet<&CompoundAction> =
            ts.outgoing(state).map(|t| &t.action).collect();
        let conflicts: Vec<CompoundAction> = all
            .iter()
            .filter(|c| !outgoing.contains(c))
            .cloned()
            .collect();
        per_state.push((state.clone(), conflicts));
    }
    Ok(ConflictReport {
        actions,
        size_bound,
        per_state,
    })
}

// ---------------------------------------------------------------------------
// Covered laws
// ---------------------------------------------------------------------------

/// A dynamic law is covered by a compound action at a state when its after
/// part holds there: performed actions are in the set, forbidden actions are
/// not, and its fluent literals are satisfied by the state.
pub fn is_covered(
    law: &DynamicLaw,
    action: &CompoundAction,
    state: &State,
    sig: &Signature,
) -> bool {
    law.after.iter().all(|lit| {
        if sig.is_action(&lit.atom) {
            if lit.positive {
                action.contains(&lit.atom)
            } else {
                !action.contains(&lit.atom)
            }
        } else {
            state.contains(lit)
        }
    })
}

/// The dynamic laws of `desc` covered by `action` at `state`.
pub fn covered_laws<'a>(
    desc: &'a ActionDescription,
    action: &CompoundAction,
    state: &State,
) -> Vec<&'a DynamicLaw> {
    desc.dynamics
        .iter()
        .filter(|law| is_covered(law, action, state, &desc.signature))
        .collect()
}

// ---------------------------------------------------------------------------
// Property suites
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct PropertyReport {
    pub property: String,
    pub cases: usize,
    pub skipped: usize,
    pub counterexamples: Vec<String>,
    pub notes: Vec<String>,
}

impl PropertyReport {
    pub fn holds(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

impl std::fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "{}: {} case(s), {} skipped, {} counterexample(s)",
            self.property,
            self.cases,
            self.skipped,
            self.counterexamples.len()
        )?;
        for note in &self.notes {
            writeln!(f, "  note: {}", note)?;
        }
        for ce in &self.counterexamples {
            writeln!(f, "  counterexample: {}", ce)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub keying: AbKeying,
    pub seed: u64,
    /// Enumerate all abnormality extensions when their count is at most
    /// this; otherwise sample (plus the all-negative one) and verify that
    /// time-0 abnormality atoms cannot influence any other atom.
    pub max_exhaustive_extensions: usize,
    pub sampled_extensions: usize,
    /// Bound on |compound action| when scanning the action space.
    pub action_size_bound: Option<usize>,
    /// Cap on (state, action) pairs sampled per description.
    pub max_pairs: Option<usize>,
    pub candidate_cap: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            keying: AbKeying::default(),
            seed: 0,
            max_exhaustive_extensions: 4096,
            sampled_extensions: 48,
            action_size_bound: None,
            max_pairs: None,
            candidate_cap: crate::solver::SolveOptions::default().candidate_cap,
        }
    }
}

/// Check that potential conflicts survive making the dynamic laws
/// defeasible: `c` is a conflict at `s` exactly when it is a conflict at
/// every state extending `s` with polarities for the new abnormality
/// fluents.
pub fn check_conflict_preservation(
    desc: &ActionDescription,
    opts: &CheckOptions,
) -> Result<PropertyReport, ComposeError> {
    let mut report = PropertyReport {
        property: "conflicts preserved under defeasible dynamics".into(),
        cases: 0,
        skipped: 0,
        counterexamples: Vec::new(),
        notes: Vec::new(),
    };
    let actions: Vec<Atom> = desc.signature.actions.keys().cloned().collect();
    if actions.len() > 16 {
        return Err(ComposeError::TooManyActions(actions.len()));
    }
    let oracle = TransitionOracle::with_cap(desc, opts.candidate_cap);
    let ts = oracle.transitions()?;
    let weakened = make_dynamics_defeasible(desc, opts.keying);
    let introduced = introduced_ab_fluents(desc, &weakened);
    let weak_oracle = TransitionOracle::with_cap(&weakened, opts.candidate_cap);

    let k = introduced.len();
    let exhaustive = k < 63 && (1usize << k) <= opts.max_exhaustive_extensions;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let masks: Vec<u64> = if exhaustive {
        (0..(1u64 << k)).collect()
    } else {
        if !time0_independent(&weakened, &introduced) {
            report.notes.push(
                "time-0 abnormality independence could not be verified; extension sampling is incomplete"
                    .into(),
            );
        } else {
            report.notes.push(format!(
                "{} abnormality fluents: extensions sampled under verified time-0 independence",
                k
            ));
        }
        let mut set: BTreeSet<u64> = [0u64].into_iter().collect();
        let limit = if k >= 63 { u64::MAX } else { (1u64 << k) - 1 };
        while set.len() < opts.sampled_extensions {
            set.insert(rng.gen_range(0..=limit));
        }
        set.into_iter().collect()
    };

    let compound = compound_actions(&actions, opts.action_size_bound);
    let mut pairs: Vec<(State, CompoundAction)> = Vec::new();
    for state in &ts.states {
        for c in &compound {
            pairs.push((state.clone(), c.clone()));
        }
    }
    if let Some(max) = opts.max_pairs {
        while pairs.len() > max {
            let idx = rng.gen_range(0..pairs.len());
            pairs.swap_remove(idx);
        }
        pairs.sort();
    }

    for (state, c) in &pairs {
        let lhs = !ts
            .outgoing(state)
            .any(|t| &t.action == c);
        for &mask in &masks {
            let mut literals = state.literals.clone();
            for (i, ab) in introduced.iter().enumerate() {
                let positive = i < 64 && (mask >> i) & 1 == 1;
                literals.push(Literal {
                    atom: ab.clone(),
                    positive,
                });
            }
            let extended = State::new(literals);
            if !weak_oracle.contains_state(&extended)? {
                report.skipped += 1;
                continue;
            }
            let rhs = !weak_oracle.has_any_successor(&extended, c)?;
            report.cases += 1;
            if lhs != rhs {
                report.counterexamples.push(format!(
                    "action {} at state {}: conflict={} before, {} after at extension {}",
                    c, state, lhs, rhs, extended
                ));
            }
        }
    }
    Ok(report)
}

fn ab_time0_atom_ids(
    p: &crate::translate::LogicProgram,
    ab: &[Atom],
) -> BTreeMap<crate::translate::AtomId, Atom> {
    let mut out = BTreeMap::new();
    for atom in ab {
        for positive in [true, false] {
            if let Some(id) = p.lookup(
                0,
                &Literal {
                    atom: atom.clone(),
                    positive,
                },
            ) {
                out.insert(id, atom.clone());
            }
        }
    }
    out
}

/// Verify structurally that time-0 abnormality atoms only occur in rules
/// about themselves (their choice, default, and exactly-one constraints),
/// so a state's abnormality polarities cannot influence anything else.
fn time0_independent(weakened: &ActionDescription, introduced: &[Atom]) -> bool {
    let Ok(p1) = crate::translate::translate(weakened, 1) else {
        return false;
    };
    let ab_ids = ab_time0_atom_ids(&p1, introduced);
    for rule in &p1.rules {
        let mentions: Vec<&Atom> = rule
            .pos
            .iter()
            .chain(&rule.naf)
            .chain(&rule.nnaf)
            .filter_map(|id| ab_ids.get(id))
            .collect();
        if mentions.is_empty() {
            continue;
        }
        // every atom of the rule (head included) must concern the same fluent
        let subject = mentions[0];
        let all_about_subject = rule
            .pos
            .iter()
            .chain(&rule.naf)
            .chain(&rule.nnaf)
            .chain(rule.head.iter())
            .all(|id| {
                let t = p1.atom(*id);
                t.time == 0 && &t.lit.atom == subject
            });
        if !all_about_subject {
            return false;
        }
    }
    true
}

/// Check that a transition exists exactly when it exists after removing
/// every dynamic law not covered by its compound action at its source.
pub fn check_covered_law_sufficiency(
    desc: &ActionDescription,
    opts: &CheckOptions,
) -> Result<PropertyReport, ComposeError> {
    let mut report = PropertyReport {
        property: "only covered laws matter for a transition".into(),
        cases: 0,
        skipped: 0,
        counterexamples: Vec::new(),
        notes: Vec::new(),
    };
    let actions: Vec<Atom> = desc.signature.actions.keys().cloned().collect();
    if actions.len() > 16 {
        return Err(ComposeError::TooManyActions(actions.len()));
    }
    let oracle = TransitionOracle::with_cap(desc, opts.candidate_cap);
    let ts = oracle.transitions()?;
    let compound = compound_actions(&actions, opts.action_size_bound);
    let states: Vec<&State> = ts.states.iter().collect();

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut pairs: Vec<(State, CompoundAction)> = Vec::new();
    for s in &states {
        for c in &compound {
            pairs.push(((*s).clone(), c.clone()));
        }
    }
    if let Some(max) = opts.max_pairs {
        while pairs.len() > max {
            let idx = rng.gen_range(0..pairs.len());
            pairs.swap_remove(idx);
        }
        pairs.sort();
    }

    for (s, c) in &pairs {
        let kept: Vec<DynamicLaw> = desc
            .dynamics
            .iter()
            .filter(|law| is_covered(law, c, s, &desc.signature))
            .cloned()
            .collect();
        let pruned = ActionDescription::new(
            desc.signature.clone(),
            desc.statics.clone(),
            kept,
        );
        let pruned_oracle = TransitionOracle::with_cap(&pruned, opts.candidate_cap);
        for s2 in &states {
            let lhs = ts.transitions.contains(&Transition {
                from: s.clone(),
                action: c.clone(),
                to: (*s2).clone(),
            });
            let rhs = pruned_oracle.has_transition(s, c, s2)?;
            report.cases += 1;
            if lhs != rhs {
                report.counterexamples.push(format!(
                    "transition {} --{}--> {}: present={} with all laws, {} with only covered laws",
                    s, c, s2, lhs, rhs
                ));
            }
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Constructive resolution
// ---------------------------------------------------------------------------

/// The output of the constructive resolver: dynamic laws that defeat every
/// covered law and cause the desired successor literals, plus the
/// abnormality literal set `d` the successor state carries.
#[derive(Clone, Debug)]
pub struct ResolutionSet {
    pub laws: Vec<DynamicLaw>,
    pub d: Vec<Literal>,
    pub verified: Transition,
}

impl ResolutionSet {
    /// Render the laws as `.bc` source a modeler can paste into a
    /// resolution file.
    pub fn render_bc(&self) -> String {
        let mut out = String::new();
        out.push_str("% generated resolution laws\n");
        for law in &self.laws {
            out.push_str(&law.to_string());
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Dto {
            laws: Vec<String>,
            d: Vec<String>,
            from: Vec<String>,
            action: Vec<String>,
            to: Vec<String>,
        }
        let dto = Dto {
            laws: self.laws.iter().map(|l| l.to_string()).collect(),
            d: self.d.iter().map(|l| l.to_string()).collect(),
            from: self.verified.from.literals.iter().map(|l| l.to_string()).collect(),
            action: self.verified.action.0.iter().map(|a| a.to_string()).collect(),
            to: self.verified.to.literals.iter().map(|l| l.to_string()).collect(),
        };
        serde_json::to_string_pretty(&dto).expect("resolution serialization cannot fail")
    }
}

/// Build and verify a resolution for the conflict `action` at `state` with
/// the desired successor `target`.
///
/// The generated laws share one canonical covered body: every action of the
/// compound action positively, the complement of every other action, and
/// every literal of the source state. Defeater laws cause the abnormality
/// fluent of every covered dynamic law; effect laws cause every regular
/// literal of the target (defined literals follow from the static laws).
pub fn auto_resolve(
    desc: &ActionDescription,
    action: &CompoundAction,
    state: &State,
    target: &State,
    opts: &CheckOptions,
) -> Result<ResolutionSet, ComposeError> {
    let oracle = TransitionOracle::with_cap(desc, opts.candidate_cap);
    if !oracle.contains_state(state)? {
        return Err(ComposeError::UnknownState(state.to_string()));
    }
    if !oracle.contains_state(target)? {
        return Err(ComposeError::UnknownState(target.to_string()));
    }
    if oracle.has_any_successor(state, action)? {
        return Err(ComposeError::NotAConflict {
            action: action.to_string(),
            state: state.to_string(),
        });
    }

    let weakened = make_dynamics_defeasible(desc, opts.keying);
    let introduced = introduced_ab_fluents(desc, &weakened);

    // canonical covered body
    let mut body: Vec<Literal> = Vec::new();
    for a in desc.signature.actions.keys() {
        body.push(Literal {
            atom: a.clone(),
            positive: action.contains(a),
        });
    }
    body.extend(state.literals.iter().cloned());

    let mut laws = Vec::new();
    let mut defeated: BTreeSet<Atom> = BTreeSet::new();
    for law in covered_laws(desc, action, state) {
        defeated.insert(dynamic_ab_atom(law, opts.keying));
    }
    for ab in &defeated {
        laws.push(DynamicLaw {
            id: LawId::core(Atom::new("defeat", vec![ab.to_term()])),
            head: Literal::pos(ab.clone()),
            after: body.clone(),
            ifcons: Vec::new(),
        });
    }
    for lit in &target.literals {
        if desc.signature.fluent_kind(&lit.atom) != Some(FluentKind::Regular) {
            continue;
        }
        laws.push(DynamicLaw {
            id: LawId::core(Atom::new("cause", vec![lit.to_term()])),
            head: lit.clone(),
            after: body.clone(),
            ifcons: Vec::new(),
        });
    }
    debug_assert!(laws
        .iter()
        .all(|law| is_covered(law, action, state, &desc.signature)));

    let d: Vec<Literal> = introduced
        .iter()
        .map(|ab| Literal {
            atom: ab.clone(),
            positive: defeated.contains(ab),
        })
        .collect();

    // assemble the verification instance: defeasible dynamics plus the
    // resolution laws, from the all-negative abnormality extension of the
    // source to the target extended by d
    let with_resolution = ActionDescription::new(
        weakened.signature.clone(),
        weakened.statics.clone(),
        weakened
            .dynamics
            .iter()
            .cloned()
            .chain(laws.iter().cloned())
            .collect(),
    );
    let mut from_literals = state.literals.clone();
    for ab in &introduced {
        from_literals.push(Literal::neg(ab.clone()));
    }
    let from = State::new(from_literals);
    let mut to_literals = target.literals.clone();
    to_literals.extend(d.iter().cloned());
    let to = State::new(to_literals);

    let resolved_oracle = TransitionOracle::with_cap(&with_resolution, opts.candidate_cap);
    let transition = Transition {
        from: from.clone(),
        action: action.clone(),
        to: to.clone(),
    };
    if !resolved_oracle.has_transition(&from, action, &to)? {
        return Err(ComposeError::VerificationFailed(format!(
            "{} --{}--> {}",
            from, action, to
        )));
    }
    Ok(ResolutionSet {
        laws,
        d,
        verified: transition,
    })
}
