//! Ground model of action descriptions: signatures, literals, static and
//! dynamic laws, and the expansion of abbreviation laws into core laws.
//!
//! Everything here is ground by construction: variables only exist in the
//! parser AST and are eliminated by the grounder. Values are immutable after
//! construction and safe to share across threads.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::diag::Diagnostic;

/// Functor of abnormality fluents attached to static laws. These are defined
/// fluents: their value is statically determined and false by default.
pub const AB_STATIC_FUNCTOR: &str = "ab";

/// Functor of abnormality fluents attached to dynamic laws. These are regular
/// fluents so that resolution laws can cause them.
pub const AB_DYNAMIC_FUNCTOR: &str = "ab'";

/// Abnormality functors cannot be declared by the user; they are introduced
/// by the defeasibility transforms and merely referenced in source files.
pub fn is_reserved_functor(name: &str) -> bool {
    name == AB_STATIC_FUNCTOR || name == AB_DYNAMIC_FUNCTOR
}

// ---------------------------------------------------------------------------
// Terms, atoms, literals
// ---------------------------------------------------------------------------

/// A ground term: an integer, a symbolic constant, a nested application
/// (used for abnormality fluents such as `ab'(at(a,3))`), or a negated inner
/// atom (`ab(-at(a,1))` names the abnormality of a negative-headed law).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Int(i64),
    Name(String),
    App(String, Vec<Term>),
    Neg(Box<Term>),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Int(n) => write!(f, "{}", n),
            Term::Name(s) => write!(f, "{}", s),
            Term::App(functor, args) => {
                write!(f, "{}(", functor)?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{}", a)?;
                }
                write!(f, ")")
            }
            Term::Neg(t) => write!(f, "-{}", t),
        }
    }
}

/// A ground atom: functor plus ground arguments. Used both for fluent and
/// action symbols and for law group identifiers.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub functor: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(functor: impl Into<String>, args: Vec<Term>) -> Self {
        Atom {
            functor: functor.into(),
            args,
        }
    }

    pub fn constant(functor: impl Into<String>) -> Self {
        Atom {
            functor: functor.into(),
            args: Vec::new(),
        }
    }

    /// The atom as a term, for nesting inside abnormality fluents.
    pub fn to_term(&self) -> Term {
        if self.args.is_empty() {
            Term::Name(self.functor.clone())
        } else {
            Term::App(self.functor.clone(), self.args.clone())
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_term())
    }
}

/// A fluent or action literal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub positive: bool,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal {
            atom,
            positive: true,
        }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal {
            atom,
            positive: false,
        }
    }

    pub fn complement(&self) -> Literal {
        Literal {
            atom: self.atom.clone(),
            positive: !self.positive,
        }
    }

    /// The literal as a term, for keying abnormality fluents by law head.
    pub fn to_term(&self) -> Term {
        let inner = self.atom.to_term();
        if self.positive {
            inner
        } else {
            Term::Neg(Box::new(inner))
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            write!(f, "-")?;
        }
        write!(f, "{}", self.atom)
    }
}

// ---------------------------------------------------------------------------
// Signature
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FluentKind {
    Regular,
    Defined,
}

/// Where a fluent comes from. `Fresh` fluents carry the contradiction pairs
/// of expanded `nonexecutable`/`impossible` laws and are hidden from states;
/// abnormality fluents are part of the composed system's visible state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FluentClass {
    User,
    Fresh,
    AbStatic,
    AbDynamic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FluentInfo {
    pub kind: FluentKind,
    pub class: FluentClass,
    /// Referenced in a source file before the transform that introduces it
    /// has run. Composition resolves provisional fluents or rejects them.
    pub provisional: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ActionInfo {
    pub agent: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub fluents: BTreeMap<Atom, FluentInfo>,
    pub actions: BTreeMap<Atom, ActionInfo>,
}

#[derive(Clone, Debug, thiserror::Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("symbol `{0}` is declared both as a fluent and as an action")]
    FluentActionOverlap(Atom),
    #[error("fluent `{0}` is declared both regular and defined")]
    ConflictingFluentKind(Atom),
    #[error("action `{atom}` is claimed by agents `{first}` and `{second}`")]
    ConflictingAgent {
        atom: Atom,
        first: String,
        second: String,
    },
    #[error("undeclared symbol `{0}`")]
    UndeclaredSymbol(Atom),
    #[error("head of law `{group}` must be a fluent literal, got action `{atom}`")]
    ActionHead { group: Atom, atom: Atom },
    #[error("head of dynamic law `{group}` must be a regular fluent, but `{atom}` is defined")]
    DefinedDynamicHead { group: Atom, atom: Atom },
    #[error("law `{group}`: `{atom}` is an action literal but only fluent literals are allowed here")]
    ActionLiteralNotAllowed { group: Atom, atom: Atom },
    #[error("fresh fluent `{0}` collides with a declared symbol; rename the law label")]
    FreshSymbolCollision(Atom),
    #[error("`inertial {0}` needs a regular fluent; `{0}` is defined")]
    InertialDefinedFluent(Atom),
    #[error("law `{group}`: `{atom}` is not an action")]
    NotAnAction { group: Atom, atom: Atom },
}

impl Signature {
    pub fn new() -> Self {
        Signature::default()
    }

    pub fn declare_fluent(&mut self, atom: Atom, info: FluentInfo) -> Result<(), ModelError> {
        if self.actions.contains_key(&atom) {
            return Err(ModelError::FluentActionOverlap(atom));
        }
        if let Some(existing) = self.fluents.get_mut(&atom) {
            if existing.kind != info.kind {
                return Err(ModelError::ConflictingFluentKind(atom));
            }
            // A concrete declaration wins over a provisional reference.
            if existing.provisional && !info.provisional {
                *existing = info;
            }
            return Ok(());
        }
        self.fluents.insert(atom, info);
        Ok(())
    }

    pub fn declare_action(&mut self, atom: Atom, info: ActionInfo) -> Result<(), ModelError> {
        if self.fluents.contains_key(&atom) {
            return Err(ModelError::FluentActionOverlap(atom));
        }
        if let Some(existing) = self.actions.get_mut(&atom) {
            match (&existing.agent, &info.agent) {
                (Some(a), Some(b)) if a != b => {
                    return Err(ModelError::ConflictingAgent {
                        atom,
                        first: a.clone(),
                        second: b.clone(),
                    })
                }
                (None, Some(_)) => *existing = info,
                _ => {}
            }
            return Ok(());
        }
        self.actions.insert(atom, info);
        Ok(())
    }

    pub fn merge(&self, other: &Signature) -> Result<Signature, ModelError> {
        let mut merged = self.clone();
        for (atom, info) in &other.fluents {
            merged.declare_fluent(atom.clone(), *info)?;
        }
        for (atom, info) in &other.actions {
            merged.declare_action(atom.clone(), info.clone())?;
        }
        Ok(merged)
    }

    pub fn is_fluent(&self, atom: &Atom) -> bool {
        self.fluents.contains_key(atom)
    }

    pub fn is_action(&self, atom: &Atom) -> bool {
        self.actions.contains_key(atom)
    }

    pub fn fluent_kind(&self, atom: &Atom) -> Option<FluentKind> {
        self.fluents.get(atom).map(|i| i.kind)
    }

    pub fn fluent_class(&self, atom: &Atom) -> Option<FluentClass> {
        self.fluents.get(atom).map(|i| i.class)
    }

    /// Fluents that show up in states: everything except the fresh
    /// contradiction-pair fluents of expanded abbreviations.
    pub fn visible_fluents(&self) -> impl Iterator<Item = &Atom> {
        self.fluents
            .iter()
            .filter(|(_, info)| info.class != FluentClass::Fresh)
            .map(|(atom, _)| atom)
    }

    pub fn regular_fluents(&self) -> impl Iterator<Item = &Atom> {
        self.fluents
            .iter()
            .filter(|(_, info)| info.kind == FluentKind::Regular)
            .map(|(atom, _)| atom)
    }

    /// The agent owning an action, if any.
    pub fn agent_of(&self, atom: &Atom) -> Option<&str> {
        self.actions.get(atom).and_then(|i| i.agent.as_deref())
    }
}

// ---------------------------------------------------------------------------
// Laws
// ---------------------------------------------------------------------------

/// The surface construct a ground law came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LawKind {
    Core,
    Inertial,
    Default,
    Nonexecutable,
    Impossible,
}

/// The role of a law within its group. `PairPositive`/`PairNegative` are the
/// contradiction halves of an expanded `nonexecutable`/`impossible` law;
/// `Completion` pins the fresh pair fluent to false everywhere else and is
/// exempt from the defeasibility transforms; `AbnormalityDefault` laws are
/// the `default -ab(..)` laws those transforms add.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LawRole {
    Direct,
    PairPositive,
    PairNegative,
    Completion,
    AbnormalityDefault,
}

/// Identity of a ground law: the group atom is shared by every law produced
/// from one abbreviation instance, so abnormality fluents can key whole
/// groups (e.g. `ab(imp(l))` defeats both halves of an impossible law).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LawId {
    pub group: Atom,
    pub kind: LawKind,
    pub role: LawRole,
}

impl LawId {
    pub fn new(group: Atom, kind: LawKind, role: LawRole) -> Self {
        LawId { group, kind, role }
    }

    pub fn core(group: Atom) -> Self {
        LawId::new(group, LawKind::Core, LawRole::Direct)
    }
}

/// `head if a1,..,am ifcons a(m+1),..,an` — intra-state causation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StaticLaw {
    pub id: LawId,
    pub head: Literal,
    pub if_part: Vec<Literal>,
    pub ifcons: Vec<Literal>,
}

/// `head after a1,..,am ifcons a(m+1),..,an` — inter-state causation. The
/// after part may contain action literals, including negative ones for
/// actions that are not performed.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DynamicLaw {
    pub id: LawId,
    pub head: Literal,
    pub after: Vec<Literal>,
    pub ifcons: Vec<Literal>,
}

impl fmt::Display for StaticLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        write_part(f, "if", &self.if_part)?;
        write_part(f, "ifcons", &self.ifcons)?;
        write!(f, ".")
    }
}

impl fmt::Display for DynamicLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        write_part(f, "after", &self.after)?;
        write_part(f, "ifcons", &self.ifcons)?;
        write!(f, ".")
    }
}

fn write_part(f: &mut fmt::Formatter<'_>, kw: &str, lits: &[Literal]) -> fmt::Result {
    if lits.is_empty() {
        return Ok(());
    }
    write!(f, " {} ", kw)?;
    for (i, lit) in lits.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{}", lit)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Pre-expansion law inputs
// ---------------------------------------------------------------------------

/// A ground law as produced by the grounder, before abbreviations are
/// rewritten into core static/dynamic laws. `group` is the law's identity:
/// the instantiated user label, or a generated id unique to the instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LawInput {
    Static {
        group: Atom,
        head: Literal,
        if_part: Vec<Literal>,
        ifcons: Vec<Literal>,
    },
    Dynamic {
        group: Atom,
        head: Literal,
        after: Vec<Literal>,
        ifcons: Vec<Literal>,
    },
    Inertial {
        group: Atom,
        fluent: Atom,
    },
    Default {
        group: Atom,
        literal: Literal,
    },
    Nonexecutable {
        group: Atom,
        actions: Vec<Literal>,
        condition: Vec<Literal>,
    },
    Impossible {
        group: Atom,
        condition: Vec<Literal>,
    },
}

impl LawInput {
    pub fn group(&self) -> &Atom {
        match self {
            LawInput::Static { group, .. }
            | LawInput::Dynamic { group, .. }
            | LawInput::Inertial { group, .. }
            | LawInput::Default { group, .. }
            | LawInput::Nonexecutable { group, .. }
            | LawInput::Impossible { group, .. } => group,
        }
    }
}

// ---------------------------------------------------------------------------
// Action descriptions
// ---------------------------------------------------------------------------

/// A finite set of ground static and dynamic laws over a signature.
/// Duplicate laws are removed by structural equality (ignoring ids), keeping
/// the first occurrence: descriptions have set semantics.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ActionDescription {
    pub signature: Signature,
    pub statics: Vec<StaticLaw>,
    pub dynamics: Vec<DynamicLaw>,
}

impl ActionDescription {
    pub fn new(
        signature: Signature,
        statics: Vec<StaticLaw>,
        dynamics: Vec<DynamicLaw>,
    ) -> Self {
        let mut desc = ActionDescription {
            signature,
            statics: Vec::new(),
            dynamics: Vec::new(),
        };
        let mut seen_s = BTreeSet::new();
        for law in statics {
            if seen_s.insert((law.head.clone(), law.if_part.clone(), law.ifcons.clone())) {
                desc.statics.push(law);
            }
        }
        let mut seen_d = BTreeSet::new();
        for law in dynamics {
            if seen_d.insert((law.head.clone(), law.after.clone(), law.ifcons.clone())) {
                desc.dynamics.push(law);
            }
        }
        desc
    }

    pub fn law_count(&self) -> usize {
        self.statics.len() + self.dynamics.len()
    }

    /// Diagnostics over a built description. These are reports, not
    /// failures: callers decide what severity to act on.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let check_lit = |lit: &Literal, what: &str, fluent_only: bool, out: &mut Vec<Diagnostic>| {
            let known =
                self.signature.is_fluent(&lit.atom) || self.signature.is_action(&lit.atom);
            if !known {
                out.push(Diagnostic::error(
                    None,
                    format!("undeclared symbol `{}` in {}", lit.atom, what),
                ));
            } else if fluent_only && self.signature.is_action(&lit.atom) {
                out.push(Diagnostic::error(
                    None,
                    format!("action literal `{}` not allowed in {}", lit, what),
                ));
            }
        };

        for law in &self.statics {
            let what = format!("static law `{}`", law.id.group);
            check_lit(&law.head, &what, true, &mut out);
            for l in law.if_part.iter().chain(&law.ifcons) {
                check_lit(l, &what, true, &mut out);
            }
        }
        for law in &self.dynamics {
            let what = format!("dynamic law `{}`", law.id.group);
            check_lit(&law.head, &what, true, &mut out);
            if self.signature.fluent_kind(&law.head.atom) == Some(FluentKind::Defined) {
                out.push(Diagnostic::error(
                    None,
                    format!(
                        "dynamic law `{}` has defined fluent `{}` as head; heads must be regular",
                        law.id.group, law.head.atom
                    ),
                ));
            }
            for l in &law.after {
                check_lit(l, &what, false, &mut out);
            }
            for l in &law.ifcons {
                check_lit(l, &what, true, &mut out);
            }
        }

        // A defined fluent that heads no static law can never be assigned by
        // a stable model, so every state and transition disappears.
        for (atom, info) in &self.signature.fluents {
            if info.kind == FluentKind::Defined && !info.provisional {
                let headed = self.statics.iter().any(|l| &l.head.atom == atom);
                if !headed {
                    out.push(Diagnostic::warning(
                        None,
                        format!(
                            "defined fluent `{}` heads no static law: no stable model can assign it",
                            atom
                        ),
                    ));
                }
            }
        }

        // Agent action sets must be pairwise disjoint; a single action
        // claimed by two agents is caught at merge time, so here we only
        // check structural leftovers (same agent tag reused is fine).
        let mut by_agent: BTreeMap<&str, Vec<&Atom>> = BTreeMap::new();
        for (atom, info) in &self.signature.actions {
            if let Some(agent) = info.agent.as_deref() {
                by_agent.entry(agent).or_default().push(atom);
            }
        }
        let mut seen: BTreeMap<&Atom, &str> = BTreeMap::new();
        for (agent, atoms) in &by_agent {
            for atom in atoms {
                if let Some(other) = seen.insert(atom, agent) {
                    if &other != agent {
                        out.push(Diagnostic::error(
                            None,
                            format!(
                                "action `{}` is shared by agents `{}` and `{}`",
                                atom, other, agent
                            ),
                        ));
                    }
                }
            }
        }

        out.sort_by(|a, b| (b.severity, &a.message).cmp(&(a.severity, &b.message)));
        out
    }

    pub fn has_errors(&self) -> bool {
        self.validate().iter().any(Diagnostic::is_error)
    }
}

// ---------------------------------------------------------------------------
// Abbreviation expansion
// ---------------------------------------------------------------------------

/// Rewrite abbreviation laws into core static/dynamic laws.
///
/// * `inertial f` becomes the pair `f after f ifcons f` and
///   `-f after -f ifcons -f`.
/// * `default l` becomes `l if ifcons l`.
/// * `nonexecutable c1,..,ck if F` becomes the contradiction pair
///   `n after c1,..,ck,F` / `-n after c1,..,ck,F` for a fresh regular
///   fluent `n` named by the law's group, plus the completion fact
///   `-n if` that pins `n` false at every other point.
/// * `impossible F` becomes the pair `m if F` / `-m if F` for a fresh
///   defined fluent `m`, plus the completion fact `-m if`.
///
/// Fresh symbols are a deterministic function of the group id, so expanding
/// the same input twice yields identical descriptions.
pub fn expand_abbreviations(
    signature: &Signature,
    laws: &[LawInput],
) -> Result<ActionDescription, ModelError> {
    let mut sig = signature.clone();
    let mut statics = Vec::new();
    let mut dynamics = Vec::new();

    // Resolve abnormality references that precede the transform introducing
    // them: register them provisionally so the description stays closed.
    let register = |sig: &mut Signature, lit: &Literal| -> Result<(), ModelError> {
        let atom = &lit.atom;
        if sig.is_fluent(atom) || sig.is_action(atom) {
            return Ok(());
        }
        match atom.functor.as_str() {
            AB_STATIC_FUNCTOR => sig.declare_fluent(
                atom.clone(),
                FluentInfo {
                    kind: FluentKind::Defined,
                    class: FluentClass::AbStatic,
                    provisional: true,
                },
            ),
            AB_DYNAMIC_FUNCTOR => sig.declare_fluent(
                atom.clone(),
                FluentInfo {
                    kind: FluentKind::Regular,
                    class: FluentClass::AbDynamic,
                    provisional: true,
                },
            ),
            _ => Err(ModelError::UndeclaredSymbol(atom.clone())),
        }
    };

    for law in laws {
        let group = law.group().clone();
        match law {
            LawInput::Static {
                head,
                if_part,
                ifcons,
                ..
            } => {
                for lit in std::iter::once(head).chain(if_part).chain(ifcons) {
                    register(&mut sig, lit)?;
                    if sig.is_action(&lit.atom) {
                        return Err(ModelError::ActionLiteralNotAllowed {
                            group,
                            atom: lit.atom.clone(),
                        });
                    }
                }
                statics.push(StaticLaw {
                    id: LawId::core(group),
                    head: head.clone(),
                    if_part: if_part.clone(),
                    ifcons: ifcons.clone(),
                });
            }
            LawInput::Dynamic {
                head,
                after,
                ifcons,
                ..
            } => {
                register(&mut sig, head)?;
                if sig.is_action(&head.atom) {
                    return Err(ModelError::ActionHead {
                        group,
                        atom: head.atom.clone(),
                    });
                }
                if sig.fluent_kind(&head.atom) == Some(FluentKind::Defined) {
                    return Err(ModelError::DefinedDynamicHead {
                        group,
                        atom: head.atom.clone(),
                    });
                }
                for lit in after {
                    register(&mut sig, lit)?;
                }
                for lit in ifcons {
                    register(&mut sig, lit)?;
                    if sig.is_action(&lit.atom) {
                        return Err(ModelError::ActionLiteralNotAllowed {
                            group,
                            atom: lit.atom.clone(),
                        });
                    }
                }
                dynamics.push(DynamicLaw {
                    id: LawId::core(group),
                    head: head.clone(),
                    after: after.clone(),
                    ifcons: ifcons.clone(),
                });
            }
            LawInput::Inertial { fluent, .. } => {
                if !sig.is_fluent(fluent) {
                    return Err(ModelError::UndeclaredSymbol(fluent.clone()));
                }
                if sig.fluent_kind(fluent) == Some(FluentKind::Defined) {
                    return Err(ModelError::InertialDefinedFluent(fluent.clone()));
                }
                for positive in [true, false] {
                    let lit = Literal {
                        atom: fluent.clone(),
                        positive,
                    };
                    dynamics.push(DynamicLaw {
                        id: LawId::new(group.clone(), LawKind::Inertial, LawRole::Direct),
                        head: lit.clone(),
                        after: vec![lit.clone()],
                        ifcons: vec![lit],
                    });
                }
            }
            LawInput::Default { literal, .. } => {
                register(&mut sig, literal)?;
                if sig.is_action(&literal.atom) {
                    return Err(ModelError::ActionLiteralNotAllowed {
                        group,
                        atom: literal.atom.clone(),
                    });
                }
                statics.push(StaticLaw {
                    id: LawId::new(group, LawKind::Default, LawRole::Direct),
                    head: literal.clone(),
                    if_part: Vec::new(),
                    ifcons: vec![literal.clone()],
                });
            }
            LawInput::Nonexecutable {
                actions, condition, ..
            } => {
                for lit in actions {
                    register(&mut sig, lit)?;
                    if !sig.is_action(&lit.atom) {
                        return Err(ModelError::NotAnAction {
                            group,
                            atom: lit.atom.clone(),
                        });
                    }
                }
                for lit in condition {
                    register(&mut sig, lit)?;
                }
                let fresh = group.clone();
                if sig.is_fluent(&fresh) || sig.is_action(&fresh) {
                    return Err(ModelError::FreshSymbolCollision(fresh));
                }
                sig.declare_fluent(
                    fresh.clone(),
                    FluentInfo {
                        kind: FluentKind::Regular,
                        class: FluentClass::Fresh,
                        provisional: false,
                    },
                )?;
                let mut after: Vec<Literal> = actions.clone();
                after.extend(condition.iter().cloned());
                for (positive, role) in [(true, LawRole::PairPositive), (false, LawRole::PairNegative)]
                {
                    dynamics.push(DynamicLaw {
                        id: LawId::new(group.clone(), LawKind::Nonexecutable, role),
                        head: Literal {
                            atom: fresh.clone(),
                            positive,
                        },
                        after: after.clone(),
                        ifcons: Vec::new(),
                    });
                }
                statics.push(StaticLaw {
                    id: LawId::new(group.clone(), LawKind::Nonexecutable, LawRole::Completion),
                    head: Literal::neg(fresh),
                    if_part: Vec::new(),
                    ifcons: Vec::new(),
                });
            }
            LawInput::Impossible { condition, .. } => {
                for lit in condition {
                    register(&mut sig, lit)?;
                    if sig.is_action(&lit.atom) {
                        return Err(ModelError::ActionLiteralNotAllowed {
                            group,
                            atom: lit.atom.clone(),
                        });
                    }
                }
                let fresh = group.clone();
                if sig.is_fluent(&fresh) || sig.is_action(&fresh) {
                    return Err(ModelError::FreshSymbolCollision(fresh));
                }
                sig.declare_fluent(
                    fresh.clone(),
                    FluentInfo {
                        kind: FluentKind::Defined,
                        class: FluentClass::Fresh,
                        provisional: false,
                    },
                )?;
                for (positive, role) in [(true, LawRole::PairPositive), (false, LawRole::PairNegative)]
                {
                    statics.push(StaticLaw {
                        id: LawId::new(group.clone(), LawKind::Impossible, role),
                        head: Literal {
                            atom: fresh.clone(),
                            positive,
                        },
                        if_part: condition.clone(),
                        ifcons: Vec::new(),
                    });
                }
                statics.push(StaticLaw {
                    id: LawId::new(group.clone(), LawKind::Impossible, LawRole::Completion),
                    head: Literal::neg(fresh),
                    if_part: Vec::new(),
                    ifcons: Vec::new(),
                });
            }
        }
    }

    Ok(ActionDescription::new(sig, statics, dynamics))
}

/// Convenience wrapper treating an already-core description as law inputs,
/// used to re-run expansion (which must be the identity).
pub fn core_law_inputs(desc: &ActionDescription) -> Vec<LawInput> {
    let mut out = Vec::new();
    for law in &desc.statics {
        out.push(LawInput::Static {
            group: law.id.group.clone(),
            head: law.head.clone(),
            if_part: law.if_part.clone(),
            ifcons: law.ifcons.clone(),
        });
    }
    for law in &desc.dynamics {
        out.push(LawInput::Dynamic {
            group: law.id.group.clone(),
            head: law.head.clone(),
            after: law.after.clone(),
            ifcons: law.ifcons.clone(),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diag::Severity;

    fn atom(s: &str) -> Atom {
        Atom::constant(s)
    }

    fn sig_with(fluents: &[(&str, FluentKind)], actions: &[&str]) -> Signature {
        let mut sig = Signature::new();
        for (name, kind) in fluents {
            sig.declare_fluent(
                atom(name),
                FluentInfo {
                    kind: *kind,
                    class: FluentClass::User,
                    provisional: false,
                },
            )
            .unwrap();
        }
        for name in actions {
            sig.declare_action(atom(name), ActionInfo::default()).unwrap();
        }
        sig
    }

    #[test]
    fn complement_is_involutive() {
        let lit = Literal::neg(Atom::new("at", vec![Term::Name("a".into()), Term::Int(1)]));
        assert_eq!(lit.complement().complement(), lit);
    }

    #[test]
    fn inertial_expands_to_both_polarities() {
        let sig = sig_with(&[("out", FluentKind::Regular)], &[]);
        let laws = vec![LawInput::Inertial {
            group: atom("g1"),
            fluent: atom("out"),
        }];
        let desc = expand_abbreviations(&sig, &laws).unwrap();
        assert_eq!(desc.statics.len(), 0);
        assert_eq!(desc.dynamics.len(), 2);
        let pos = &desc.dynamics[0];
        assert_eq!(pos.head, Literal::pos(atom("out")));
        assert_eq!(pos.after, vec![Literal::pos(atom("out"))]);
        assert_eq!(pos.ifcons, vec![Literal::pos(atom("out"))]);
        let neg = &desc.dynamics[1];
        assert_eq!(neg.head, Literal::neg(atom("out")));
        assert_eq!(neg.after, vec![Literal::neg(atom("out"))]);
        assert_eq!(neg.ifcons, vec![Literal::neg(atom("out"))]);
        assert_eq!(pos.id.group, neg.id.group);
    }

    #[test]
    fn default_expands_to_self_supporting_static() {
        let sig = sig_with(&[("ok", FluentKind::Regular)], &[]);
        let laws = vec![LawInput::Default {
            group: atom("g1"),
            literal: Literal::neg(atom("ok")),
        }];
        let desc = expand_abbreviations(&sig, &laws).unwrap();
        assert_eq!(desc.dynamics.len(), 0);
        assert_eq!(desc.statics.len(), 1);
        let law = &desc.statics[0];
        assert_eq!(law.head, Literal::neg(atom("ok")));
        assert!(law.if_part.is_empty());
        assert_eq!(law.ifcons, vec![Literal::neg(atom("ok"))]);
    }

    #[test]
    fn empty_input_expands_to_empty_description() {
        let sig = sig_with(&[], &[]);
        let desc = expand_abbreviations(&sig, &[]).unwrap();
        assert!(desc.statics.is_empty());
        assert!(desc.dynamics.is_empty());
    }

    #[test]
    fn nonexecutable_builds_contradiction_pair_and_completion() {
        let sig = sig_with(&[("out", FluentKind::Regular)], &["goLeft"]);
        let laws = vec![LawInput::Nonexecutable {
            group: atom("n7"),
            actions: vec![Literal::pos(atom("goLeft"))],
            condition: vec![Literal::pos(atom("out"))],
        }];
        let desc = expand_abbreviations(&sig, &laws).unwrap();
        assert_eq!(desc.dynamics.len(), 2);
        for law in &desc.dynamics {
            assert_eq!(law.head.atom, atom("n7"));
            assert_eq!(
                law.after,
                vec![Literal::pos(atom("goLeft")), Literal::pos(atom("out"))]
            );
            assert_eq!(law.id.group, atom("n7"));
        }
        assert_ne!(desc.dynamics[0].head, desc.dynamics[1].head);
        // completion fact keeps the fresh fluent false when the pair is idle
        assert_eq!(desc.statics.len(), 1);
        assert_eq!(desc.statics[0].head, Literal::neg(atom("n7")));
        assert_eq!(desc.statics[0].id.role, LawRole::Completion);
        assert_eq!(
            desc.signature.fluent_kind(&atom("n7")),
            Some(FluentKind::Regular)
        );
        assert_eq!(
            desc.signature.fluent_class(&atom("n7")),
            Some(FluentClass::Fresh)
        );
    }

    #[test]
    fn impossible_builds_defined_pair_and_completion() {
        let sig = sig_with(&[("p", FluentKind::Regular)], &[]);
        let laws = vec![LawInput::Impossible {
            group: atom("imp1"),
            condition: vec![Literal::neg(atom("p"))],
        }];
        let desc = expand_abbreviations(&sig, &laws).unwrap();
        assert_eq!(desc.statics.len(), 3);
        assert_eq!(
            desc.signature.fluent_kind(&atom("imp1")),
            Some(FluentKind::Defined)
        );
        let halves: Vec<_> = desc
            .statics
            .iter()
            .filter(|l| l.id.role != LawRole::Completion)
            .collect();
        assert_eq!(halves.len(), 2);
        for law in halves {
            assert_eq!(law.if_part, vec![Literal::neg(atom("p"))]);
        }
    }

    #[test]
    fn expansion_is_idempotent_on_core_descriptions() {
        let sig = sig_with(
            &[("p", FluentKind::Regular), ("q", FluentKind::Regular)],
            &["act"],
        );
        let laws = vec![
            LawInput::Static {
                group: atom("l1"),
                head: Literal::pos(atom("p")),
                if_part: vec![Literal::pos(atom("q"))],
                ifcons: vec![],
            },
            LawInput::Dynamic {
                group: atom("l2"),
                head: Literal::neg(atom("q")),
                after: vec![Literal::pos(atom("act"))],
                ifcons: vec![Literal::neg(atom("q"))],
            },
        ];
        let once = expand_abbreviations(&sig, &laws).unwrap();
        let twice = expand_abbreviations(&once.signature, &core_law_inputs(&once)).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn expansion_is_deterministic() {
        let sig = sig_with(&[("p", FluentKind::Regular)], &["act"]);
        let laws = vec![LawInput::Nonexecutable {
            group: atom("n1"),
            actions: vec![Literal::pos(atom("act"))],
            condition: vec![Literal::pos(atom("p"))],
        }];
        let a = expand_abbreviations(&sig, &laws).unwrap();
        let b = expand_abbreviations(&sig, &laws).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn duplicate_laws_are_deduplicated() {
        let sig = sig_with(&[("p", FluentKind::Regular)], &[]);
        let mk = |group: &str| LawInput::Static {
            group: atom(group),
            head: Literal::pos(atom("p")),
            if_part: vec![],
            ifcons: vec![Literal::pos(atom("p"))],
        };
        let desc = expand_abbreviations(&sig, &[mk("g1"), mk("g2")]).unwrap();
        assert_eq!(desc.statics.len(), 1);
        assert_eq!(desc.statics[0].id.group, atom("g1"));
    }

    #[test]
    fn dynamic_head_on_defined_fluent_is_rejected() {
        let sig = sig_with(&[("d", FluentKind::Defined)], &["act"]);
        let laws = vec![LawInput::Dynamic {
            group: atom("l1"),
            head: Literal::pos(atom("d")),
            after: vec![Literal::pos(atom("act"))],
            ifcons: vec![],
        }];
        let err = expand_abbreviations(&sig, &laws).unwrap_err();
        assert!(matches!(err, ModelError::DefinedDynamicHead { .. }));
    }

    #[test]
    fn undeclared_symbol_is_rejected() {
        let sig = sig_with(&[], &[]);
        let laws = vec![LawInput::Static {
            group: atom("l1"),
            head: Literal::pos(atom("ghost")),
            if_part: vec![],
            ifcons: vec![],
        }];
        let err = expand_abbreviations(&sig, &laws).unwrap_err();
        assert_eq!(err, ModelError::UndeclaredSymbol(atom("ghost")));
    }

    #[test]
    fn validate_flags_defined_dynamic_head() {
        let sig = sig_with(&[("d", FluentKind::Defined)], &["act"]);
        let desc = ActionDescription::new(
            sig,
            vec![StaticLaw {
                id: LawId::core(atom("s1")),
                head: Literal::neg(atom("d")),
                if_part: vec![],
                ifcons: vec![Literal::neg(atom("d"))],
            }],
            vec![DynamicLaw {
                id: LawId::core(atom("l1")),
                head: Literal::pos(atom("d")),
                after: vec![Literal::pos(atom("act"))],
                ifcons: vec![],
            }],
        );
        let diags = desc.validate();
        assert_eq!(diags.iter().filter(|d| d.is_error()).count(), 1);
    }

    #[test]
    fn validate_warns_on_underived_defined_fluent() {
        let sig = sig_with(&[("d", FluentKind::Defined)], &[]);
        let desc = ActionDescription::new(sig, vec![], vec![]);
        let diags = desc.validate();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].severity, Severity::Warning);
    }

    #[test]
    fn merge_rejects_action_claimed_by_two_agents() {
        let mut a = Signature::new();
        a.declare_action(
            atom("go"),
            ActionInfo {
                agent: Some("a".into()),
            },
        )
        .unwrap();
        let mut b = Signature::new();
        b.declare_action(
            atom("go"),
            ActionInfo {
                agent: Some("b".into()),
            },
        )
        .unwrap();
        let err = a.merge(&b).unwrap_err();
        assert!(matches!(err, ModelError::ConflictingAgent { .. }));
    }
}
