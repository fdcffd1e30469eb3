//! Grounding: expand schematic laws over their sorts, evaluate `where`
//! conditions, expand `all` macros, and hand the resulting ground laws to
//! abbreviation expansion.
//!
//! Grounding is deterministic: laws are instantiated in source order and
//! assignments are enumerated in lexicographic order of the bound values
//! (variables in first-occurrence order), so two runs produce identical
//! descriptions.

use std::collections::BTreeMap;

use crate::diag::Span;
use crate::model::{
    self, ActionDescription, ActionInfo, Atom, FluentClass, FluentInfo, LawInput, Literal,
    Signature, Term,
};
use crate::parser::{
    AtomPattern, CmpOp, Cond, EnumValue, Expr, LawBody, LawDecl, ListItem, LitPattern, SortValues,
    SpecFile, TermPattern,
};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroundingStats {
    pub schematic_laws: usize,
    pub ground_laws: usize,
    pub eliminated: usize,
}

#[derive(Clone, Debug, thiserror::Error, PartialEq, Eq)]
#[error("{}{message}", span.map(|s| format!("{}: ", s)).unwrap_or_default())]
pub struct GroundError {
    pub span: Option<Span>,
    pub message: String,
}

impl GroundError {
    fn new(span: impl Into<Option<Span>>, message: impl Into<String>) -> Self {
        GroundError {
            span: span.into(),
            message: message.into(),
        }
    }
}

impl From<model::ModelError> for GroundError {
    fn from(e: model::ModelError) -> Self {
        GroundError::new(None, e.to_string())
    }
}

/// Ground a parsed spec into an action description.
pub fn ground(spec: &SpecFile) -> Result<(ActionDescription, GroundingStats), GroundError> {
    ground_with_namespace(spec, "")
}

/// Like [`ground`], with a namespace prefixed to generated law ids. Multi-file
/// compositions use per-file namespaces so that generated fresh fluents from
/// different files cannot collide; user labels are never prefixed.
pub fn ground_with_namespace(
    spec: &SpecFile,
    namespace: &str,
) -> Result<(ActionDescription, GroundingStats), GroundError> {
    let sorts = build_sorts(spec)?;
    let (signature, fluent_schemas, action_schemas) = build_signature(spec, &sorts)?;

    let mut stats = GroundingStats {
        schematic_laws: spec.laws.len(),
        ..GroundingStats::default()
    };
    let mut inputs: Vec<LawInput> = Vec::new();
    // label atom -> (law ordinal, assignment) it was minted by
    let mut group_owners: BTreeMap<Atom, (usize, Vec<(String, Term)>)> = BTreeMap::new();

    for (idx, law) in spec.laws.iter().enumerate() {
        let ordinal = idx + 1;
        let expanded = expand_all_macros(law, &sorts)?;
        let schemas = Schemas {
            fluents: &fluent_schemas,
            actions: &action_schemas,
        };
        let domains = variable_domains(&expanded, law, &sorts, &schemas)?;
        let assignments = enumerate_assignments(&expanded, law, &domains, &mut stats)?;
        for assignment in assignments {
            let group = match &law.label {
                Some(label) => substitute_atom(label, &assignment, law.span)?,
                None => auto_group(namespace, ordinal, &law.body, &assignment),
            };
            if let Some((owner_ord, owner_assign)) =
                group_owners.insert(group.clone(), (ordinal, assignment.clone()))
            {
                if owner_ord != ordinal || owner_assign != assignment {
                    return Err(GroundError::new(
                        law.span,
                        format!("law id `{}` is not unique; include every law variable in the label", group),
                    ));
                }
            }
            push_ground_law(&expanded, &assignment, group, law.span, &mut inputs)?;
        }
    }
    stats.ground_laws = inputs.len();

    let desc = model::expand_abbreviations(&signature, &inputs)?;
    Ok((desc, stats))
}

fn build_sorts(spec: &SpecFile) -> Result<BTreeMap<String, Vec<Term>>, GroundError> {
    let mut sorts = BTreeMap::new();
    for decl in &spec.sorts {
        let values: Vec<Term> = match &decl.values {
            SortValues::Range(lo, hi) => (*lo..=*hi).map(Term::Int).collect(),
            SortValues::Enum(vals) => vals
                .iter()
                .map(|v| match v {
                    EnumValue::Name(s) => Term::Name(s.clone()),
                    EnumValue::Int(n) => Term::Int(*n),
                })
                .collect(),
        };
        if values.is_empty() {
            return Err(GroundError::new(
                decl.span,
                format!("sort `{}` is empty", decl.name),
            ));
        }
        sorts.insert(decl.name.clone(), values);
    }
    Ok(sorts)
}

struct Schemas<'a> {
    fluents: &'a BTreeMap<String, Vec<String>>,
    actions: &'a BTreeMap<String, Vec<String>>,
}

impl Schemas<'_> {
    fn params(&self, functor: &str) -> Option<&Vec<String>> {
        self.fluents.get(functor).or_else(|| self.actions.get(functor))
    }
}

type SchemaMap = BTreeMap<String, Vec<String>>;

fn build_signature(
    spec: &SpecFile,
    sorts: &BTreeMap<String, Vec<Term>>,
) -> Result<(Signature, SchemaMap, SchemaMap), GroundError> {
    let mut signature = Signature::new();
    let mut fluent_schemas = BTreeMap::new();
    let mut action_schemas = BTreeMap::new();

    for decl in &spec.fluents {
        fluent_schemas.insert(decl.functor.clone(), decl.params.clone());
        for args in sort_product(&decl.params, sorts, decl.span)? {
            signature
                .declare_fluent(
                    Atom::new(decl.functor.clone(), args),
                    FluentInfo {
                        kind: decl.kind,
                        class: FluentClass::User,
                        provisional: false,
                    },
                )
                .map_err(GroundError::from)?;
        }
    }
    for decl in &spec.actions {
        action_schemas.insert(decl.functor.clone(), decl.params.clone());
        for args in sort_product(&decl.params, sorts, decl.span)? {
            signature
                .declare_action(
                    Atom::new(decl.functor.clone(), args),
                    ActionInfo {
                        agent: decl.agent.clone(),
                    },
                )
                .map_err(GroundError::from)?;
        }
    }
    Ok((signature, fluent_schemas, action_schemas))
}

fn sort_product(
    params: &[String],
    sorts: &BTreeMap<String, Vec<Term>>,
    span: Span,
) -> Result<Vec<Vec<Term>>, GroundError> {
    let mut acc: Vec<Vec<Term>> = vec![Vec::new()];
    for p in params {
        let values = sorts
            .get(p)
            .ok_or_else(|| GroundError::new(span, format!("unknown sort `{}`", p)))?;
        let mut next = Vec::with_capacity(acc.len() * values.len());
        for prefix in &acc {
            for v in values {
                let mut row = prefix.clone();
                row.push(v.clone());
                next.push(row);
            }
        }
        acc = next;
    }
    Ok(acc)
}

/// A law body with `all` macros already expanded into plain literals.
#[derive(Clone, Debug)]
struct FlatLaw {
    body: LawBody,
    conds: Vec<Cond>,
}

fn expand_all_macros(
    law: &LawDecl,
    sorts: &BTreeMap<String, Vec<Term>>,
) -> Result<FlatLaw, GroundError> {
    let expand_items = |items: &[ListItem]| -> Result<Vec<ListItem>, GroundError> {
        let mut out = Vec::new();
        for item in items {
            match item {
                ListItem::Lit(l) => out.push(ListItem::Lit(l.clone())),
                ListItem::All { var, sort, literal } => {
                    let values = sorts.get(sort).ok_or_else(|| {
                        GroundError::new(law.span, format!("unknown sort `{}`", sort))
                    })?;
                    for v in values {
                        let lit = substitute_one_var_pattern(literal, var, v);
                        out.push(ListItem::Lit(lit));
                    }
                }
            }
        }
        Ok(out)
    };

    let body = match &law.body {
        LawBody::Core {
            head,
            if_part,
            after_part,
            ifcons_part,
        } => LawBody::Core {
            head: head.clone(),
            if_part: expand_items(if_part)?,
            after_part: expand_items(after_part)?,
            ifcons_part: expand_items(ifcons_part)?,
        },
        LawBody::Impossible { condition } => LawBody::Impossible {
            condition: expand_items(condition)?,
        },
        LawBody::Nonexecutable { actions, condition } => LawBody::Nonexecutable {
            actions: expand_items(actions)?,
            condition: expand_items(condition)?,
        },
        other => other.clone(),
    };
    Ok(FlatLaw {
        body,
        conds: law.conds.clone(),
    })
}

fn substitute_one_var_pattern(lit: &LitPattern, var: &str, value: &Term) -> LitPattern {
    fn subst_term(t: &TermPattern, var: &str, value: &Term) -> TermPattern {
        match t {
            TermPattern::Var(v) if v == var => term_to_pattern(value),
            TermPattern::App(f, args) => TermPattern::App(
                f.clone(),
                args.iter().map(|a| subst_term(a, var, value)).collect(),
            ),
            TermPattern::Neg(inner) => TermPattern::Neg(Box::new(subst_term(inner, var, value))),
            other => other.clone(),
        }
    }
    LitPattern {
        positive: lit.positive,
        atom: AtomPattern {
            functor: lit.atom.functor.clone(),
            args: lit
                .atom
                .args
                .iter()
                .map(|a| subst_term(a, var, value))
                .collect(),
        },
    }
}

fn term_to_pattern(t: &Term) -> TermPattern {
    match t {
        Term::Int(n) => TermPattern::Int(*n),
        Term::Name(s) => TermPattern::Const(s.clone()),
        Term::App(f, args) => {
            TermPattern::App(f.clone(), args.iter().map(term_to_pattern).collect())
        }
        Term::Neg(inner) => TermPattern::Neg(Box::new(term_to_pattern(inner))),
    }
}

/// Domains of the law's variables, in first-occurrence order. Variables
/// occurring at a declared functor's argument position range over that
/// parameter's sort; the rest must be derivable from `==` conditions.
struct Domains {
    /// (variable, sort values) for enumerated variables
    enumerated: Vec<(String, Vec<Term>)>,
    /// variables defined by equalities, in dependency order
    derived: Vec<String>,
}

fn variable_domains(
    flat: &FlatLaw,
    law: &LawDecl,
    sorts: &BTreeMap<String, Vec<Term>>,
    schemas: &Schemas<'_>,
) -> Result<Domains, GroundError> {
    let mut order: Vec<String> = Vec::new();
    let mut domains: BTreeMap<String, Vec<Term>> = BTreeMap::new();

    fn visit_atom(
        functor: &str,
        args: &[TermPattern],
        sorts: &BTreeMap<String, Vec<Term>>,
        schemas: &Schemas<'_>,
        order: &mut Vec<String>,
        domains: &mut BTreeMap<String, Vec<Term>>,
        span: Span,
    ) -> Result<(), GroundError> {
        let params = schemas.params(functor);
        for (i, arg) in args.iter().enumerate() {
            match arg {
                TermPattern::Var(v) => {
                    if !order.contains(v) {
                        order.push(v.clone());
                    }
                    if let Some(params) = params {
                        let sort = &params[i];
                        let values = sorts.get(sort).ok_or_else(|| {
                            GroundError::new(span, format!("unknown sort `{}`", sort))
                        })?;
                        match domains.get_mut(v) {
                            None => {
                                domains.insert(v.clone(), values.clone());
                            }
                            Some(existing) => existing.retain(|t| values.contains(t)),
                        }
                    }
                }
                TermPattern::App(f, inner) => {
                    visit_atom(f, inner, sorts, schemas, order, domains, span)?
                }
                TermPattern::Neg(inner) => {
                    if let TermPattern::App(f, inner_args) = inner.as_ref() {
                        visit_atom(f, inner_args, sorts, schemas, order, domains, span)?;
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    let visit_lit = |lit: &LitPattern,
                         order: &mut Vec<String>,
                         domains: &mut BTreeMap<String, Vec<Term>>|
     -> Result<(), GroundError> {
        visit_atom(
            &lit.atom.functor,
            &lit.atom.args,
            sorts,
            schemas,
            order,
            domains,
            law.span,
        )
    };

    match &flat.body {
        LawBody::Core {
            head,
            if_part,
            after_part,
            ifcons_part,
        } => {
            visit_lit(head, &mut order, &mut domains)?;
            for item in if_part.iter().chain(after_part).chain(ifcons_part) {
                if let ListItem::Lit(l) = item {
                    visit_lit(l, &mut order, &mut domains)?;
                }
            }
        }
        LawBody::Impossible { condition } => {
            for item in condition {
                if let ListItem::Lit(l) = item {
                    visit_lit(l, &mut order, &mut domains)?;
                }
            }
        }
        LawBody::Nonexecutable { actions, condition } => {
            for item in actions.iter().chain(condition) {
                if let ListItem::Lit(l) = item {
                    visit_lit(l, &mut order, &mut domains)?;
                }
            }
        }
        LawBody::Inertial { fluents } => {
            for f in fluents {
                visit_atom(
                    &f.functor, &f.args, sorts, schemas, &mut order, &mut domains, law.span,
                )?;
            }
        }
        LawBody::Default { literal } => visit_lit(literal, &mut order, &mut domains)?,
    }

    // Variables only mentioned in conditions or labels.
    let mut extra: Vec<String> = Vec::new();
    for cond in &flat.conds {
        cond.lhs.variables(&mut extra);
        cond.rhs.variables(&mut extra);
    }
    if let Some(label) = &law.label {
        label.variables(&mut extra);
    }
    for v in extra {
        if !order.contains(&v) {
            order.push(v);
        }
    }

    let mut enumerated = Vec::new();
    let mut pending: Vec<String> = Vec::new();
    for v in &order {
        match domains.get(v) {
            Some(values) => enumerated.push((v.clone(), values.clone())),
            None => pending.push(v.clone()),
        }
    }

    // Order the derived variables so each is computable from variables
    // before it.
    let mut derived = Vec::new();
    let mut known: Vec<String> = enumerated.iter().map(|(v, _)| v.clone()).collect();
    while !pending.is_empty() {
        let mut progressed = false;
        pending.retain(|v| {
            let definable = flat.conds.iter().any(|c| {
                if c.op != CmpOp::Eq {
                    return false;
                }
                let defines = |lhs: &Expr, rhs: &Expr| {
                    matches!(lhs, Expr::Var(x) if x == v) && {
                        let mut vs = Vec::new();
                        rhs.variables(&mut vs);
                        vs.iter().all(|x| known.contains(x))
                    }
                };
                defines(&c.lhs, &c.rhs) || defines(&c.rhs, &c.lhs)
            });
            if definable {
                derived.push(v.clone());
                known.push(v.clone());
                progressed = true;
                false
            } else {
                true
            }
        });
        if !progressed {
            return Err(GroundError::new(
                law.span,
                format!(
                    "cannot determine values for variable `{}`; bind it by a declared argument position or an equality",
                    pending[0]
                ),
            ));
        }
    }

    Ok(Domains { enumerated, derived })
}

type Assignment = Vec<(String, Term)>;

fn lookup<'a>(assignment: &'a Assignment, var: &str) -> Option<&'a Term> {
    assignment.iter().find(|(v, _)| v == var).map(|(_, t)| t)
}

fn enumerate_assignments(
    flat: &FlatLaw,
    law: &LawDecl,
    domains: &Domains,
    stats: &mut GroundingStats,
) -> Result<Vec<Assignment>, GroundError> {
    let mut out = Vec::new();
    let mut current: Assignment = Vec::new();
    enumerate_rec(flat, law, domains, 0, &mut current, &mut out, stats)?;
    Ok(out)
}

fn enumerate_rec(
    flat: &FlatLaw,
    law: &LawDecl,
    domains: &Domains,
    depth: usize,
    current: &mut Assignment,
    out: &mut Vec<Assignment>,
    stats: &mut GroundingStats,
) -> Result<(), GroundError> {
    if depth == domains.enumerated.len() {
        // Compute derived variables, then evaluate every condition.
        let mut assignment = current.clone();
        for v in &domains.derived {
            let mut value: Option<Term> = None;
            for cond in &flat.conds {
                if cond.op != CmpOp::Eq {
                    continue;
                }
                let try_define = |lhs: &Expr, rhs: &Expr| -> Result<Option<Term>, GroundError> {
                    if matches!(lhs, Expr::Var(x) if x == v) {
                        match eval_expr(rhs, &assignment, law.span) {
                            Ok(t) => Ok(Some(t)),
                            Err(Undetermined::Unbound) => Ok(None),
                            Err(Undetermined::Error(e)) => Err(e),
                        }
                    } else {
                        Ok(None)
                    }
                };
                if let Some(t) = try_define(&cond.lhs, &cond.rhs)? {
                    value = Some(t);
                    break;
                }
                if let Some(t) = try_define(&cond.rhs, &cond.lhs)? {
                    value = Some(t);
                    break;
                }
            }
            match value {
                Some(t) => assignment.push((v.clone(), t)),
                None => {
                    return Err(GroundError::new(
                        law.span,
                        format!("cannot determine values for variable `{}`", v),
                    ))
                }
            }
        }
        for cond in &flat.conds {
            if !eval_cond(cond, &assignment, law.span)? {
                stats.eliminated += 1;
                return Ok(());
            }
        }
        out.push(assignment);
        return Ok(());
    }
    let (var, values) = &domains.enumerated[depth];
    for v in values {
        current.push((var.clone(), v.clone()));
        enumerate_rec(flat, law, domains, depth + 1, current, out, stats)?;
        current.pop();
    }
    Ok(())
}

enum Undetermined {
    Unbound,
    Error(GroundError),
}

fn eval_expr(expr: &Expr, assignment: &Assignment, span: Span) -> Result<Term, Undetermined> {
    match expr {
        Expr::Int(n) => Ok(Term::Int(*n)),
        Expr::Const(s) => Ok(Term::Name(s.clone())),
        Expr::Var(v) => lookup(assignment, v)
            .cloned()
            .ok_or(Undetermined::Unbound),
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            let lhs = eval_expr(a, assignment, span)?;
            let rhs = eval_expr(b, assignment, span)?;
            match (lhs, rhs) {
                (Term::Int(x), Term::Int(y)) => Ok(Term::Int(match expr {
                    Expr::Add(..) => x + y,
                    _ => x - y,
                })),
                _ => Err(Undetermined::Error(GroundError::new(
                    span,
                    "arithmetic in a side condition needs integer-sorted operands",
                ))),
            }
        }
    }
}

fn eval_cond(cond: &Cond, assignment: &Assignment, span: Span) -> Result<bool, GroundError> {
    let eval = |e: &Expr| -> Result<Term, GroundError> {
        eval_expr(e, assignment, span).map_err(|u| match u {
            Undetermined::Unbound => GroundError::new(span, "side condition uses an unbound variable"),
            Undetermined::Error(e) => e,
        })
    };
    let lhs = eval(&cond.lhs)?;
    let rhs = eval(&cond.rhs)?;
    let ordered = |lhs: &Term, rhs: &Term| -> Result<(i64, i64), GroundError> {
        match (lhs, rhs) {
            (Term::Int(a), Term::Int(b)) => Ok((*a, *b)),
            _ => Err(GroundError::new(
                span,
                "ordering comparisons need integer-sorted operands",
            )),
        }
    };
    Ok(match cond.op {
        CmpOp::Eq => lhs == rhs,
        CmpOp::Ne => lhs != rhs,
        CmpOp::Lt => {
            let (a, b) = ordered(&lhs, &rhs)?;
            a < b
        }
        CmpOp::Le => {
            let (a, b) = ordered(&lhs, &rhs)?;
            a <= b
        }
        CmpOp::Gt => {
            let (a, b) = ordered(&lhs, &rhs)?;
            a > b
        }
        CmpOp::Ge => {
            let (a, b) = ordered(&lhs, &rhs)?;
            a >= b
        }
    })
}

fn auto_group(namespace: &str, ordinal: usize, body: &LawBody, assignment: &Assignment) -> Atom {
    let base = match body {
        LawBody::Core { .. } => "l",
        LawBody::Impossible { .. } => "imp",
        LawBody::Nonexecutable { .. } => "n",
        LawBody::Inertial { .. } => "inr",
        LawBody::Default { .. } => "dflt",
    };
    let functor = if namespace.is_empty() {
        format!("{}{}", base, ordinal)
    } else {
        format!("{}_{}{}", namespace, base, ordinal)
    };
    Atom::new(functor, assignment.iter().map(|(_, t)| t.clone()).collect())
}

fn substitute_term(
    t: &TermPattern,
    assignment: &Assignment,
    span: Span,
) -> Result<Term, GroundError> {
    Ok(match t {
        TermPattern::Int(n) => Term::Int(*n),
        TermPattern::Const(s) => Term::Name(s.clone()),
        TermPattern::Var(v) => lookup(assignment, v)
            .cloned()
            .ok_or_else(|| GroundError::new(span, format!("unbound variable `{}`", v)))?,
        TermPattern::App(f, args) => Term::App(
            f.clone(),
            args.iter()
                .map(|a| substitute_term(a, assignment, span))
                .collect::<Result<_, _>>()?,
        ),
        TermPattern::Neg(inner) => Term::Neg(Box::new(substitute_term(inner, assignment, span)?)),
    })
}

fn substitute_atom(
    atom: &AtomPattern,
    assignment: &Assignment,
    span: Span,
) -> Result<Atom, GroundError> {
    Ok(Atom::new(
        atom.functor.clone(),
        atom.args
            .iter()
            .map(|a| substitute_term(a, assignment, span))
            .collect::<Result<_, _>>()?,
    ))
}

fn substitute_lit(
    lit: &LitPattern,
    assignment: &Assignment,
    span: Span,
) -> Result<Literal, GroundError> {
    Ok(Literal {
        positive: lit.positive,
        atom: substitute_atom(&lit.atom, assignment, span)?,
    })
}

fn substitute_items(
    items: &[ListItem],
    assignment: &Assignment,
    span: Span,
) -> Result<Vec<Literal>, GroundError> {
    items
        .iter()
        .map(|item| match item {
            ListItem::Lit(l) => substitute_lit(l, assignment, span),
            ListItem::All { .. } => unreachable!("macros expanded before grounding"),
        })
        .collect()
}

fn push_ground_law(
    flat: &FlatLaw,
    assignment: &Assignment,
    group: Atom,
    span: Span,
    inputs: &mut Vec<LawInput>,
) -> Result<(), GroundError> {
    match &flat.body {
        LawBody::Core {
            head,
            if_part,
            after_part,
            ifcons_part,
        } => {
            let head = substitute_lit(head, assignment, span)?;
            let ifcons = substitute_items(ifcons_part, assignment, span)?;
            if after_part.is_empty() {
                inputs.push(LawInput::Static {
                    group,
                    head,
                    if_part: substitute_items(if_part, assignment, span)?,
                    ifcons,
                });
            } else {
                inputs.push(LawInput::Dynamic {
                    group,
                    head,
                    after: substitute_items(after_part, assignment, span)?,
                    ifcons,
                });
            }
        }
        LawBody::Impossible { condition } => {
            inputs.push(LawInput::Impossible {
                group,
                condition: substitute_items(condition, assignment, span)?,
            });
        }
        LawBody::Nonexecutable { actions, condition } => {
            inputs.push(LawInput::Nonexecutable {
                group,
                actions: substitute_items(actions, assignment, span)?,
                condition: substitute_items(condition, assignment, span)?,
            });
        }
        LawBody::Inertial { fluents } => {
            for (i, f) in fluents.iter().enumerate() {
                let atom = substitute_atom(f, assignment, span)?;
                let group = if fluents.len() == 1 {
                    group.clone()
                } else {
                    // one group per listed fluent, so pairs stay separate
                    let mut g = group.clone();
                    g.args.push(Term::Int(i as i64));
                    g
                };
                inputs.push(LawInput::Inertial { group, fluent: atom });
            }
        }
        LawBody::Default { literal } => {
            inputs.push(LawInput::Default {
                group,
                literal: substitute_lit(literal, assignment, span)?,
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    #[test]
    fn grounds_static_schema_over_two_slots() {
        // (L, L1) in {1,2}^2 with L != L1 leaves exactly 2 instances
        let spec = parse(
            "sort agent = {a}. sort slot = 1..2.\n\
             fluent at(agent, slot) : regular.\n\
             -at(A,L) if at(A,L1) where L != L1.",
        )
        .unwrap();
        let (desc, stats) = ground(&spec).unwrap();
        assert_eq!(desc.statics.len(), 2);
        assert_eq!(stats.schematic_laws, 1);
        assert_eq!(stats.ground_laws, 2);
        assert_eq!(stats.eliminated, 2);
    }

    #[test]
    fn unsatisfiable_condition_yields_no_instances() {
        let spec = parse(
            "sort slot = 1..3. fluent p(slot) : regular.\n\
             p(L) if p(L1) where L == L + 1.",
        )
        .unwrap();
        let (desc, stats) = ground(&spec).unwrap();
        assert_eq!(desc.statics.len(), 0);
        assert_eq!(stats.ground_laws, 0);
        assert_eq!(stats.eliminated, 9);
    }

    #[test]
    fn instance_count_matches_bruteforce_assignment_count() {
        // oracle: enumerate (L, L1) in {1..4}^2 by hand and count L == L1 + 1
        let spec = parse(
            "sort agent = {a}. sort slot = 1..4.\n\
             fluent at(agent, slot) : regular. action goRight(agent) agent a.\n\
             at(A,L) after goRight(A), at(A,L1) where L == L1 + 1.",
        )
        .unwrap();
        let mut expected = 0;
        for l in 1..=4 {
            for l1 in 1..=4 {
                if l == l1 + 1 {
                    expected += 1;
                }
            }
        }
        let (desc, stats) = ground(&spec).unwrap();
        assert_eq!(desc.dynamics.len(), expected);
        assert_eq!(stats.ground_laws, expected);
    }

    #[test]
    fn grounding_core_laws_is_identity_up_to_ordering() {
        let spec = parse(
            "sort s = {x}. fluent p(s) : regular.\n\
             p(x) if p(x).",
        )
        .unwrap();
        let (a, _) = ground(&spec).unwrap();
        let (b, _) = ground(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.statics.len(), 1);
    }

    #[test]
    fn derived_variable_from_equality() {
        // M is bound only through the abnormality argument and M == L + 1
        let spec = parse(
            "sort agent = {a,b}. sort slot = 1..4.\n\
             fluent at(agent, slot) : regular.\n\
             action goRight(agent). action goLeft(agent).\n\
             ab'(at(A,M)) after goRight(A), at(A,L), -goLeft(A) where M == L + 1.",
        )
        .unwrap();
        let (desc, _) = ground(&spec).unwrap();
        // L in 1..4 but M must land in the slot sort: L in 1..3
        assert_eq!(desc.dynamics.len(), 2 * 3);
        let heads: Vec<String> = desc.dynamics.iter().map(|l| l.head.to_string()).collect();
        assert!(heads.contains(&"ab'(at(a,2))".to_string()));
        assert!(!heads.iter().any(|h| h.contains("at(a,5)")));
    }

    #[test]
    fn empty_sort_is_an_error() {
        let spec = parse("sort s = {x}. sort t = 2..1. fluent p(t) : regular.").unwrap();
        let err = ground(&spec).unwrap_err();
        assert!(err.message.contains("empty"));
    }

    #[test]
    fn all_macro_expands_to_conjunction() {
        let spec = parse(
            "sort agent = {a}. sort slot = 1..2.\n\
             fluent at(agent, slot) : regular. fluent out(agent) : regular.\n\
             impossible all L in slot : -at(A,L), -out(A) label imp(A).",
        )
        .unwrap();
        let (desc, _) = ground(&spec).unwrap();
        // expansion: pair + completion share the group `imp(a)`
        assert_eq!(desc.statics.len(), 3);
        let law = &desc.statics[0];
        assert_eq!(law.if_part.len(), 3);
        assert_eq!(law.id.group.to_string(), "imp(a)");
    }

    #[test]
    fn namespaces_keep_generated_ids_apart() {
        let src = "sort s = {x}. fluent p(s) : regular. action go(s).\n\
                   nonexecutable go(x) if p(x).";
        let spec = parse(src).unwrap();
        let (left, _) = ground_with_namespace(&spec, "l").unwrap();
        let (right, _) = ground_with_namespace(&spec, "r").unwrap();
        let l_head = left.dynamics[0].head.atom.clone();
        let r_head = right.dynamics[0].head.atom.clone();
        assert_ne!(l_head, r_head);
        assert_eq!(l_head.functor, "l_n1");
        assert_eq!(r_head.functor, "r_n1");
    }

    #[test]
    fn nonunique_label_is_rejected() {
        let spec = parse(
            "sort s = {x,y}. fluent p(s) : regular.\n\
             -p(S) if p(S1) where S != S1 label only.",
        )
        .unwrap();
        let err = ground(&spec).unwrap_err();
        assert!(err.message.contains("not unique"));
    }

    #[test]
    fn derived_variable_outside_declared_sort_is_dropped() {
        // M == L + 1 with L = 4 would need at(a,5): filtered by the domain
        let spec = parse(
            "sort agent = {a}. sort slot = 1..4.\n\
             fluent at(agent, slot) : regular. action goRight(agent) agent a.\n\
             at(A,M) after goRight(A), at(A,L) where M == L + 1.",
        )
        .unwrap();
        let (desc, stats) = ground(&spec).unwrap();
        assert_eq!(desc.dynamics.len(), 3);
        // M and L both range over 1..4; 16 pairs, 3 satisfy M == L + 1
        assert_eq!(stats.eliminated, 16 - 3);
    }
}
