//! Parser and pretty-printer for the `.bc` dialect: sort declarations,
//! sorted fluent/action declarations, and schematic laws with variables,
//! `where` side conditions, bounded `all` conjunctions, and optional
//! `label` identities.
//!
//! Grammar sketch:
//!
//! ```text
//! file       := (sortdecl | fluentdecl | actiondecl | law)* ;
//! sortdecl   := "sort" NAME "=" (INT ".." INT | "{" elem ("," elem)* "}") "." ;
//! fluentdecl := "fluent" NAME ("(" NAME ("," NAME)* ")")? ":" ("regular"|"defined") "." ;
//! actiondecl := "action" NAME ("(" NAME ("," NAME)* ")")? ("agent" NAME)? "." ;
//! law        := corelaw | abbrlaw ;
//! corelaw    := LIT ("if" ITEMS)? ("after" ITEMS)? ("ifcons" ITEMS)? tail ;
//! abbrlaw    := "impossible" ITEMS tail
//!             | "nonexecutable" ITEMS ("if" ITEMS)? tail
//!             | "inertial" ATOM ("," ATOM)* tail
//!             | "default" LIT tail ;
//! tail       := ("where" COND ("," COND)*)? ("label" ATOM)? "." ;
//! ITEMS      := item ("," item)* ;  item := LIT | "all" VAR "in" NAME ":" LIT ;
//! ```
//!
//! Comments start with `%`. Identifiers beginning with an uppercase letter
//! are variables.

mod lexer;

use std::fmt::Write as _;

use crate::diag::{Diagnostic, Span};
use crate::model::{self, FluentKind};

use lexer::{lex, Tok, Token};

// ---------------------------------------------------------------------------
// AST
// ---------------------------------------------------------------------------

/// A parsed `.bc` file, before grounding. Laws preserve source order and
/// carry source locations.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SpecFile {
    pub sorts: Vec<SortDecl>,
    pub fluents: Vec<FluentDecl>,
    pub actions: Vec<ActionDecl>,
    pub laws: Vec<LawDecl>,
}

#[derive(Clone, Debug)]
pub struct SortDecl {
    pub name: String,
    pub values: SortValues,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SortValues {
    Range(i64, i64),
    Enum(Vec<EnumValue>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EnumValue {
    Name(String),
    Int(i64),
}

#[derive(Clone, Debug)]
pub struct FluentDecl {
    pub functor: String,
    pub params: Vec<String>,
    pub kind: FluentKind,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub struct ActionDecl {
    pub functor: String,
    pub params: Vec<String>,
    pub agent: Option<String>,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub struct LawDecl {
    pub body: LawBody,
    pub conds: Vec<Cond>,
    pub label: Option<AtomPattern>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LawBody {
    Core {
        head: LitPattern,
        if_part: Vec<ListItem>,
        after_part: Vec<ListItem>,
        ifcons_part: Vec<ListItem>,
    },
    Impossible {
        condition: Vec<ListItem>,
    },
    Nonexecutable {
        actions: Vec<ListItem>,
        condition: Vec<ListItem>,
    },
    Inertial {
        fluents: Vec<AtomPattern>,
    },
    Default {
        literal: LitPattern,
    },
}

/// An element of a literal list: a plain literal or a bounded conjunction
/// `all X in sort : lit` expanding to one literal per sort value.
#[derive(Clone, Debug, PartialEq)]
pub enum ListItem {
    Lit(LitPattern),
    All {
        var: String,
        sort: String,
        literal: LitPattern,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LitPattern {
    pub positive: bool,
    pub atom: AtomPattern,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomPattern {
    pub functor: String,
    pub args: Vec<TermPattern>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TermPattern {
    Int(i64),
    Const(String),
    Var(String),
    App(String, Vec<TermPattern>),
    Neg(Box<TermPattern>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cond {
    pub lhs: Expr,
    pub op: CmpOp,
    pub rhs: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Int(i64),
    Const(String),
    Var(String),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
}

// Structural equality ignores source locations so that the round-trip
// property `parse(pretty_print(s)) == s` is meaningful.
impl PartialEq for SortDecl {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.values == other.values
    }
}
impl PartialEq for FluentDecl {
    fn eq(&self, other: &Self) -> bool {
        self.functor == other.functor && self.params == other.params && self.kind == other.kind
    }
}
impl PartialEq for ActionDecl {
    fn eq(&self, other: &Self) -> bool {
        self.functor == other.functor && self.params == other.params && self.agent == other.agent
    }
}
impl PartialEq for LawDecl {
    fn eq(&self, other: &Self) -> bool {
        self.body == other.body && self.conds == other.conds && self.label == other.label
    }
}

impl TermPattern {
    pub fn variables(&self, out: &mut Vec<String>) {
        match self {
            TermPattern::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            TermPattern::App(_, args) => {
                for a in args {
                    a.variables(out);
                }
            }
            TermPattern::Neg(inner) => inner.variables(out),
            _ => {}
        }
    }
}

impl AtomPattern {
    pub fn variables(&self, out: &mut Vec<String>) {
        for a in &self.args {
            a.variables(out);
        }
    }
}

impl Expr {
    pub fn variables(&self, out: &mut Vec<String>) {
        match self {
            Expr::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                a.variables(out);
                b.variables(out);
            }
            _ => {}
        }
    }
}

impl LawDecl {
    /// Literal patterns of the law body, macro items included (their bound
    /// variable is reported separately by callers).
    pub fn items(&self) -> Vec<&ListItem> {
        match &self.body {
            LawBody::Core {
                if_part,
                after_part,
                ifcons_part,
                ..
            } => if_part.iter().chain(after_part).chain(ifcons_part).collect(),
            LawBody::Impossible { condition } => condition.iter().collect(),
            LawBody::Nonexecutable { actions, condition } => {
                actions.iter().chain(condition).collect()
            }
            LawBody::Inertial { .. } | LawBody::Default { .. } => Vec::new(),
        }
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.pos].tok.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, msg: impl Into<String>) -> Diagnostic {
        Diagnostic::error(self.span(), msg.into())
    }

    fn expect(&mut self, tok: Tok) -> Result<(), Diagnostic> {
        if self.peek() == &tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!(
                "expected {}, found {}",
                tok.describe(),
                self.peek().describe()
            )))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, Diagnostic> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => Err(self.error(format!("expected {}, found {}", what, other.describe()))),
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.at_keyword(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn file(&mut self) -> Result<SpecFile, Diagnostic> {
        let mut spec = SpecFile::default();
        loop {
            match self.peek() {
                Tok::Eof => break,
                Tok::Ident(s) if s == "sort" => spec.sorts.push(self.sort_decl()?),
                Tok::Ident(s) if s == "fluent" => spec.fluents.push(self.fluent_decl()?),
                Tok::Ident(s) if s == "action" => spec.actions.push(self.action_decl()?),
                _ => spec.laws.push(self.law()?),
            }
        }
        Ok(spec)
    }

    fn sort_decl(&mut self) -> Result<SortDecl, Diagnostic> {
        let span = self.span();
        self.bump(); // sort
        let name = self.ident("sort name")?;
        self.expect(Tok::Eq)?;
        let values = match self.peek().clone() {
            Tok::Int(lo) => {
                self.bump();
                self.expect(Tok::DotDot)?;
                match self.bump() {
                    Tok::Int(hi) => SortValues::Range(lo, hi),
                    other => {
                        return Err(self.error(format!(
                            "expected integer range bound, found {}",
                            other.describe()
                        )))
                    }
                }
            }
            Tok::LBrace => {
                self.bump();
                let mut values = Vec::new();
                loop {
                    match self.bump() {
                        Tok::Ident(s) => values.push(EnumValue::Name(s)),
                        Tok::Int(n) => values.push(EnumValue::Int(n)),
                        other => {
                            return Err(self.error(format!(
                                "expected sort element, found {}",
                                other.describe()
                            )))
                        }
                    }
                    match self.bump() {
                        Tok::Comma => continue,
                        Tok::RBrace => break,
                        other => {
                            return Err(self.error(format!(
                                "expected `,` or `}}` in sort, found {}",
                                other.describe()
                            )))
                        }
                    }
                }
                SortValues::Enum(values)
            }
            other => {
                return Err(self.error(format!(
                    "expected integer range or `{{..}}` after `=`, found {}",
                    other.describe()
                )))
            }
        };
        self.expect(Tok::Dot)?;
        Ok(SortDecl { name, values, span })
    }

    fn schema(&mut self) -> Result<(String, Vec<String>), Diagnostic> {
        let functor = self.ident("symbol name")?;
        let mut params = Vec::new();
        if self.peek() == &Tok::LParen {
            self.bump();
            loop {
                params.push(self.ident("sort name")?);
                match self.bump() {
                    Tok::Comma => continue,
                    Tok::RParen => break,
                    other => {
                        return Err(self.error(format!(
                            "expected `,` or `)` in parameter list, found {}",
                            other.describe()
                        )))
                    }
                }
            }
        }
        Ok((functor, params))
    }

    fn fluent_decl(&mut self) -> Result<FluentDecl, Diagnostic> {
        let span = self.span();
        self.bump(); // fluent
        let (functor, params) = self.schema()?;
        self.expect(Tok::Colon)?;
        let kind = match self.bump() {
            Tok::Ident(s) if s == "regular" => FluentKind::Regular,
            Tok::Ident(s) if s == "defined" => FluentKind::Defined,
            other => {
                return Err(self.error(format!(
                    "expected `regular` or `defined`, found {}",
                    other.describe()
                )))
            }
        };
        self.expect(Tok::Dot)?;
        Ok(FluentDecl {
            functor,
            params,
            kind,
            span,
        })
    }

    fn action_decl(&mut self) -> Result<ActionDecl, Diagnostic> {
        let span = self.span();
        self.bump(); // action
        let (functor, params) = self.schema()?;
        let agent = if self.eat_keyword("agent") {
            Some(self.ident("agent name")?)
        } else {
            None
        };
        self.expect(Tok::Dot)?;
        Ok(ActionDecl {
            functor,
            params,
            agent,
            span,
        })
    }

    fn law(&mut self) -> Result<LawDecl, Diagnostic> {
        let span = self.span();
        let body = if self.eat_keyword("impossible") {
            LawBody::Impossible {
                condition: self.items()?,
            }
        } else if self.eat_keyword("nonexecutable") {
            let actions = self.items()?;
            let condition = if self.eat_keyword("if") {
                self.items()?
            } else {
                Vec::new()
            };
            LawBody::Nonexecutable { actions, condition }
        } else if self.eat_keyword("inertial") {
            let mut fluents = vec![self.atom_pattern()?];
            while self.peek() == &Tok::Comma {
                self.bump();
                fluents.push(self.atom_pattern()?);
            }
            LawBody::Inertial { fluents }
        } else if self.eat_keyword("default") {
            LawBody::Default {
                literal: self.literal_pattern()?,
            }
        } else {
            let head = self.literal_pattern()?;
            let if_part = if self.eat_keyword("if") {
                self.items()?
            } else {
                Vec::new()
            };
            let after_part = if self.eat_keyword("after") {
                self.items()?
            } else {
                Vec::new()
            };
            let ifcons_part = if self.eat_keyword("ifcons") {
                self.items()?
            } else {
                Vec::new()
            };
            if !if_part.is_empty() && !after_part.is_empty() {
                return Err(Diagnostic::error(
                    span,
                    "a law cannot have both `if` and `after` parts; dynamic laws use `after`",
                ));
            }
            LawBody::Core {
                head,
                if_part,
                after_part,
                ifcons_part,
            }
        };
        let conds = if self.eat_keyword("where") {
            let mut conds = vec![self.cond()?];
            while self.peek() == &Tok::Comma {
                self.bump();
                conds.push(self.cond()?);
            }
            conds
        } else {
            Vec::new()
        };
        let label = if self.eat_keyword("label") {
            Some(self.atom_pattern()?)
        } else {
            None
        };
        self.expect(Tok::Dot)?;
        Ok(LawDecl {
            body,
            conds,
            label,
            span,
        })
    }

    fn items(&mut self) -> Result<Vec<ListItem>, Diagnostic> {
        let mut items = vec![self.item()?];
        // Lists end at a keyword (`if`, `ifcons`, `where`, ...), `.` or `)`.
        while self.peek() == &Tok::Comma {
            self.bump();
            items.push(self.item()?);
        }
        Ok(items)
    }

    fn item(&mut self) -> Result<ListItem, Diagnostic> {
        if self.eat_keyword("all") {
            let var = match self.bump() {
                Tok::Var(v) => v,
                other => {
                    return Err(self.error(format!(
                        "expected variable after `all`, found {}",
                        other.describe()
                    )))
                }
            };
            if !self.eat_keyword("in") {
                return Err(self.error("expected `in` after `all` variable"));
            }
            let sort = self.ident("sort name")?;
            self.expect(Tok::Colon)?;
            let literal = self.literal_pattern()?;
            Ok(ListItem::All { var, sort, literal })
        } else {
            Ok(ListItem::Lit(self.literal_pattern()?))
        }
    }

    fn literal_pattern(&mut self) -> Result<LitPattern, Diagnostic> {
        let positive = if self.peek() == &Tok::Minus {
            self.bump();
            false
        } else {
            true
        };
        Ok(LitPattern {
            positive,
            atom: self.atom_pattern()?,
        })
    }

    fn atom_pattern(&mut self) -> Result<AtomPattern, Diagnostic> {
        let functor = match self.bump() {
            Tok::Ident(s) => s,
            other => {
                return Err(self.error(format!("expected atom, found {}", other.describe())));
            }
        };
        let mut args = Vec::new();
        if self.peek() == &Tok::LParen {
            self.bump();
            loop {
                args.push(self.term_pattern()?);
                match self.bump() {
                    Tok::Comma => continue,
                    Tok::RParen => break,
                    other => {
                        return Err(self.error(format!(
                            "expected `,` or `)` in argument list, found {}",
                            other.describe()
                        )))
                    }
                }
            }
        }
        Ok(AtomPattern { functor, args })
    }

    fn term_pattern(&mut self) -> Result<TermPattern, Diagnostic> {
        match self.peek().clone() {
            Tok::Minus => {
                self.bump();
                let inner = self.term_pattern()?;
                Ok(TermPattern::Neg(Box::new(inner)))
            }
            Tok::Int(n) => {
                self.bump();
                Ok(TermPattern::Int(n))
            }
            Tok::Var(v) => {
                self.bump();
                Ok(TermPattern::Var(v))
            }
            Tok::Ident(s) => {
                self.bump();
                if self.peek() == &Tok::LParen {
                    self.bump();
                    let mut args = Vec::new();
                    loop {
                        args.push(self.term_pattern()?);
                        match self.bump() {
                            Tok::Comma => continue,
                            Tok::RParen => break,
                            other => {
                                return Err(self.error(format!(
                                    "expected `,` or `)` in argument list, found {}",
                                    other.describe()
                                )))
                            }
                        }
                    }
                    Ok(TermPattern::App(s, args))
                } else {
                    Ok(TermPattern::Const(s))
                }
            }
            other => Err(self.error(format!("expected term, found {}", other.describe()))),
        }
    }

    fn cond(&mut self) -> Result<Cond, Diagnostic> {
        let lhs = self.expr()?;
        let op = match self.bump() {
            Tok::EqEq => CmpOp::Eq,
            Tok::Ne => CmpOp::Ne,
            Tok::Lt => CmpOp::Lt,
            Tok::Le => CmpOp::Le,
            Tok::Gt => CmpOp::Gt,
            Tok::Ge => CmpOp::Ge,
            other => {
                return Err(self.error(format!(
                    "expected comparison operator, found {}",
                    other.describe()
                )))
            }
        };
        let rhs = self.expr()?;
        Ok(Cond { lhs, op, rhs })
    }

    fn expr(&mut self) -> Result<Expr, Diagnostic> {
        let mut acc = self.operand()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    let rhs = self.operand()?;
                    acc = Expr::Add(Box::new(acc), Box::new(rhs));
                }
                Tok::Minus => {
                    self.bump();
                    let rhs = self.operand()?;
                    acc = Expr::Sub(Box::new(acc), Box::new(rhs));
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn operand(&mut self) -> Result<Expr, Diagnostic> {
        match self.bump() {
            Tok::Int(n) => Ok(Expr::Int(n)),
            Tok::Var(v) => Ok(Expr::Var(v)),
            Tok::Ident(s) => Ok(Expr::Const(s)),
            Tok::Minus => match self.bump() {
                Tok::Int(n) => Ok(Expr::Int(-n)),
                other => Err(self.error(format!(
                    "expected integer after unary `-`, found {}",
                    other.describe()
                ))),
            },
            other => Err(self.error(format!(
                "expected expression operand, found {}",
                other.describe()
            ))),
        }
    }
}

const KEYWORDS: &[&str] = &[
    "sort",
    "fluent",
    "action",
    "agent",
    "regular",
    "defined",
    "if",
    "after",
    "ifcons",
    "impossible",
    "nonexecutable",
    "inertial",
    "default",
    "where",
    "label",
    "all",
    "in",
];

/// Parse a `.bc` file and run declaration-level checks: unknown sorts,
/// arity mismatches against the declared schemas, and unbound variables.
pub fn parse(text: &str) -> Result<SpecFile, Diagnostic> {
    let tokens = lex(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    let spec = parser.file()?;
    resolve(&spec)?;
    Ok(spec)
}

fn resolve(spec: &SpecFile) -> Result<(), Diagnostic> {
    use std::collections::BTreeMap;

    let mut sorts = BTreeMap::new();
    for s in &spec.sorts {
        if sorts.insert(s.name.clone(), s).is_some() {
            return Err(Diagnostic::error(
                s.span,
                format!("sort `{}` is declared twice", s.name),
            ));
        }
    }

    // functor -> (arity, is_action)
    let mut schemas: BTreeMap<&str, (usize, bool, Span)> = BTreeMap::new();
    for f in &spec.fluents {
        if model::is_reserved_functor(&f.functor) {
            return Err(Diagnostic::error(
                f.span,
                format!("`{}` is reserved for abnormality fluents", f.functor),
            ));
        }
        if KEYWORDS.contains(&f.functor.as_str()) {
            return Err(Diagnostic::error(
                f.span,
                format!("`{}` is a keyword and cannot name a fluent", f.functor),
            ));
        }
        if schemas
            .insert(&f.functor, (f.params.len(), false, f.span))
            .is_some()
        {
            return Err(Diagnostic::error(
                f.span,
                format!("symbol `{}` is declared twice", f.functor),
            ));
        }
        for p in &f.params {
            if !sorts.contains_key(p) {
                return Err(Diagnostic::error(f.span, format!("unknown sort `{}`", p)));
            }
        }
    }
    for a in &spec.actions {
        if model::is_reserved_functor(&a.functor) {
            return Err(Diagnostic::error(
                a.span,
                format!("`{}` is reserved for abnormality fluents", a.functor),
            ));
        }
        if KEYWORDS.contains(&a.functor.as_str()) {
            return Err(Diagnostic::error(
                a.span,
                format!("`{}` is a keyword and cannot name an action", a.functor),
            ));
        }
        if schemas
            .insert(&a.functor, (a.params.len(), true, a.span))
            .is_some()
        {
            return Err(Diagnostic::error(
                a.span,
                format!("symbol `{}` is declared twice", a.functor),
            ));
        }
        for p in &a.params {
            if !sorts.contains_key(p) {
                return Err(Diagnostic::error(a.span, format!("unknown sort `{}`", p)));
            }
        }
    }

    // Per-law checks: arity of declared functors (including atoms nested in
    // abnormality arguments) and variable boundness. A variable is anchored
    // if it occurs at an argument position of a declared functor or in some
    // equality side condition; the grounder derives the rest.
    for law in &spec.laws {
        let mut anchored: Vec<String> = Vec::new();
        let mut seen: Vec<String> = Vec::new();

        fn walk_term(
            t: &TermPattern,
            schemas: &BTreeMap<&str, (usize, bool, Span)>,
            anchored: &mut Vec<String>,
            seen: &mut Vec<String>,
            span: Span,
        ) -> Result<(), Diagnostic> {
            match t {
                TermPattern::Var(v) => {
                    if !seen.contains(v) {
                        seen.push(v.clone());
                    }
                }
                TermPattern::App(functor, args) => {
                    check_atom_like(functor, args, schemas, anchored, seen, span)?;
                }
                TermPattern::Neg(inner) => {
                    walk_term(inner, schemas, anchored, seen, span)?;
                }
                _ => {}
            }
            Ok(())
        }

        fn check_atom_like(
            functor: &str,
            args: &[TermPattern],
            schemas: &BTreeMap<&str, (usize, bool, Span)>,
            anchored: &mut Vec<String>,
            seen: &mut Vec<String>,
            span: Span,
        ) -> Result<(), Diagnostic> {
            if let Some((arity, _, _)) = schemas.get(functor) {
                if args.len() != *arity {
                    return Err(Diagnostic::error(
                        span,
                        format!(
                            "`{}` is declared with {} argument(s) but used with {}",
                            functor,
                            arity,
                            args.len()
                        ),
                    ));
                }
                for a in args {
                    if let TermPattern::Var(v) = a {
                        if !anchored.contains(v) {
                            anchored.push(v.clone());
                        }
                        if !seen.contains(v) {
                            seen.push(v.clone());
                        }
                    } else {
                        walk_term(a, schemas, anchored, seen, span)?;
                    }
                }
            } else {
                for a in args {
                    walk_term(a, schemas, anchored, seen, span)?;
                }
            }
            Ok(())
        }

        let check_lit = |lit: &LitPattern,
                             anchored: &mut Vec<String>,
                             seen: &mut Vec<String>|
         -> Result<(), Diagnostic> {
            check_atom_like(&lit.atom.functor, &lit.atom.args, &schemas, anchored, seen, law.span)
        };

        let mut macro_vars: Vec<String> = Vec::new();
        let mut lits: Vec<&LitPattern> = Vec::new();
        match &law.body {
            LawBody::Core { head, .. } => lits.push(head),
            LawBody::Default { literal } => lits.push(literal),
            LawBody::Inertial { fluents } => {
                for f in fluents {
                    check_atom_like(&f.functor, &f.args, &schemas, &mut anchored, &mut seen, law.span)?;
                    if let Some((_, true, _)) = schemas.get(f.functor.as_str()) {
                        return Err(Diagnostic::error(
                            law.span,
                            format!("`inertial {}` needs a fluent, not an action", f.functor),
                        ));
                    }
                }
            }
            _ => {}
        }
        for item in law.items() {
            match item {
                ListItem::Lit(l) => lits.push(l),
                ListItem::All { var, sort, literal } => {
                    if !sorts.contains_key(sort) {
                        return Err(Diagnostic::error(
                            law.span,
                            format!("unknown sort `{}` in `all`", sort),
                        ));
                    }
                    macro_vars.push(var.clone());
                    anchored.push(var.clone());
                    lits.push(literal);
                }
            }
        }
        for lit in lits {
            check_lit(lit, &mut anchored, &mut seen)?;
        }
        for cond in &law.conds {
            let mut vs = Vec::new();
            cond.lhs.variables(&mut vs);
            cond.rhs.variables(&mut vs);
            for v in vs {
                if !seen.contains(&v) {
                    seen.push(v.clone());
                }
                if cond.op == CmpOp::Eq && !anchored.contains(&v) {
                    anchored.push(v);
                }
            }
        }
        if let Some(label) = &law.label {
            let mut vs = Vec::new();
            label.variables(&mut vs);
            for v in vs {
                if !seen.contains(&v) {
                    seen.push(v);
                }
            }
        }
        for v in &seen {
            if !anchored.contains(v) {
                return Err(Diagnostic::error(
                    law.span,
                    format!("variable `{}` is not bound by any declared argument position or equality", v),
                ));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Pretty printer
// ---------------------------------------------------------------------------

/// Render a spec back to `.bc` text. Declarations are grouped by kind;
/// `parse(pretty_print(s))` is structurally equal to `s`.
pub fn pretty_print(spec: &SpecFile) -> String {
    let mut out = String::new();
    out.push_str("% generated by the bcmas pretty-printer\n");
    for s in &spec.sorts {
        match &s.values {
            SortValues::Range(lo, hi) => {
                let _ = writeln!(out, "sort {} = {}..{}.", s.name, lo, hi);
            }
            SortValues::Enum(vals) => {
                let body = vals
                    .iter()
                    .map(|v| match v {
                        EnumValue::Name(n) => n.clone(),
                        EnumValue::Int(n) => n.to_string(),
                    })
                    .collect::<Vec<_>>()
                    .join(", ");
                let _ = writeln!(out, "sort {} = {{{}}}.", s.name, body);
            }
        }
    }
    if !spec.sorts.is_empty() && (!spec.fluents.is_empty() || !spec.actions.is_empty()) {
        out.push('\n');
    }
    for f in &spec.fluents {
        let kind = match f.kind {
            FluentKind::Regular => "regular",
            FluentKind::Defined => "defined",
        };
        let _ = writeln!(out, "fluent {} : {}.", render_schema(&f.functor, &f.params), kind);
    }
    for a in &spec.actions {
        match &a.agent {
            Some(agent) => {
                let _ = writeln!(
                    out,
                    "action {} agent {}.",
                    render_schema(&a.functor, &a.params),
                    agent
                );
            }
            None => {
                let _ = writeln!(out, "action {}.", render_schema(&a.functor, &a.params));
            }
        }
    }
    if !spec.laws.is_empty() {
        out.push('\n');
    }
    for law in &spec.laws {
        out.push_str(&render_law(law));
        out.push('\n');
    }
    out
}

fn render_schema(functor: &str, params: &[String]) -> String {
    if params.is_empty() {
        functor.to_string()
    } else {
        format!("{}({})", functor, params.join(", "))
    }
}

fn render_items(items: &[ListItem]) -> String {
    items
        .iter()
        .map(|item| match item {
            ListItem::Lit(l) => render_lit(l),
            ListItem::All { var, sort, literal } => {
                format!("all {} in {} : {}", var, sort, render_lit(literal))
            }
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn render_lit(lit: &LitPattern) -> String {
    let sign = if lit.positive { "" } else { "-" };
    format!("{}{}", sign, render_atom(&lit.atom))
}

fn render_atom(atom: &AtomPattern) -> String {
    if atom.args.is_empty() {
        atom.functor.clone()
    } else {
        format!(
            "{}({})",
            atom.functor,
            atom.args
                .iter()
                .map(render_term)
                .collect::<Vec<_>>()
                .join(",")
        )
    }
}

fn render_term(t: &TermPattern) -> String {
    match t {
        TermPattern::Int(n) => n.to_string(),
        TermPattern::Const(s) => s.clone(),
        TermPattern::Var(v) => v.clone(),
        TermPattern::App(f, args) => format!(
            "{}({})",
            f,
            args.iter().map(render_term).collect::<Vec<_>>().join(",")
        ),
        TermPattern::Neg(inner) => format!("-{}", render_term(inner)),
    }
}

fn render_expr(e: &Expr) -> String {
    match e {
        Expr::Int(n) => n.to_string(),
        Expr::Const(s) => s.clone(),
        Expr::Var(v) => v.clone(),
        Expr::Add(a, b) => format!("{} + {}", render_expr(a), render_expr(b)),
        Expr::Sub(a, b) => format!("{} - {}", render_expr(a), render_expr(b)),
    }
}

fn render_cond(c: &Cond) -> String {
    let op = match c.op {
        CmpOp::Eq => "==",
        CmpOp::Ne => "!=",
        CmpOp::Lt => "<",
        CmpOp::Le => "<=",
        CmpOp::Gt => ">",
        CmpOp::Ge => ">=",
    };
    format!("{} {} {}", render_expr(&c.lhs), op, render_expr(&c.rhs))
}

fn render_law(law: &LawDecl) -> String {
    let mut s = match &law.body {
        LawBody::Core {
            head,
            if_part,
            after_part,
            ifcons_part,
        } => {
            let mut s = render_lit(head);
            if !if_part.is_empty() {
                let _ = write!(s, " if {}", render_items(if_part));
            }
            if !after_part.is_empty() {
                let _ = write!(s, " after {}", render_items(after_part));
            }
            if !ifcons_part.is_empty() {
                let _ = write!(s, " ifcons {}", render_items(ifcons_part));
            }
            s
        }
        LawBody::Impossible { condition } => format!("impossible {}", render_items(condition)),
        LawBody::Nonexecutable { actions, condition } => {
            let mut s = format!("nonexecutable {}", render_items(actions));
            if !condition.is_empty() {
                let _ = write!(s, " if {}", render_items(condition));
            }
            s
        }
        LawBody::Inertial { fluents } => format!(
            "inertial {}",
            fluents.iter().map(render_atom).collect::<Vec<_>>().join(", ")
        ),
        LawBody::Default { literal } => format!("default {}", render_lit(literal)),
    };
    if !law.conds.is_empty() {
        let _ = write!(
            s,
            " where {}",
            law.conds.iter().map(render_cond).collect::<Vec<_>>().join(", ")
        );
    }
    if let Some(label) = &law.label {
        let _ = write!(s, " label {}", render_atom(label));
    }
    s.push('.');
    s
}

// ---------------------------------------------------------------------------
// Ground helpers for CLI arguments
// ---------------------------------------------------------------------------

fn pattern_to_term(p: &TermPattern) -> Result<model::Term, Diagnostic> {
    Ok(match p {
        TermPattern::Int(n) => model::Term::Int(*n),
        TermPattern::Const(s) => model::Term::Name(s.clone()),
        TermPattern::Var(v) => {
            return Err(Diagnostic::error(
                None,
                format!("variable `{}` not allowed in a ground literal", v),
            ))
        }
        TermPattern::App(f, args) => model::Term::App(
            f.clone(),
            args.iter().map(pattern_to_term).collect::<Result<_, _>>()?,
        ),
        TermPattern::Neg(inner) => model::Term::Neg(Box::new(pattern_to_term(inner)?)),
    })
}

pub fn pattern_to_atom(p: &AtomPattern) -> Result<model::Atom, Diagnostic> {
    Ok(model::Atom::new(
        p.functor.clone(),
        p.args.iter().map(pattern_to_term).collect::<Result<_, _>>()?,
    ))
}

/// Parse a comma-separated list of ground literals, as used by CLI flags
/// like `--state "at(a,2),at(b,4)"`.
pub fn parse_ground_literals(text: &str) -> Result<Vec<model::Literal>, Diagnostic> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let tokens = lex(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    let mut out = Vec::new();
    loop {
        let lit = parser.literal_pattern()?;
        out.push(model::Literal {
            positive: lit.positive,
            atom: pattern_to_atom(&lit.atom)?,
        });
        match parser.bump() {
            Tok::Comma => continue,
            Tok::Eof => break,
            other => {
                return Err(Diagnostic::error(
                    None,
                    format!("expected `,` between literals, found {}", other.describe()),
                ))
            }
        }
    }
    Ok(out)
}

/// Parse a comma-separated list of ground atoms (an action set).
pub fn parse_ground_atoms(text: &str) -> Result<Vec<model::Atom>, Diagnostic> {
    let lits = parse_ground_literals(text)?;
    lits.into_iter()
        .map(|l| {
            if l.positive {
                Ok(l.atom)
            } else {
                Err(Diagnostic::error(None, "action sets list positive atoms"))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_schematic_static_law() {
        let spec = parse(
            "sort agent = {a}. sort slot = 1..2.\n\
             fluent at(agent, slot) : regular.\n\
             -at(A,L) if at(A,L1) where L != L1.",
        )
        .unwrap();
        assert_eq!(spec.laws.len(), 1);
        let law = &spec.laws[0];
        match &law.body {
            LawBody::Core {
                head,
                if_part,
                after_part,
                ifcons_part,
            } => {
                assert!(!head.positive);
                assert_eq!(head.atom.functor, "at");
                assert_eq!(if_part.len(), 1);
                assert!(after_part.is_empty());
                assert!(ifcons_part.is_empty());
            }
            other => panic!("unexpected body {:?}", other),
        }
        assert_eq!(law.conds.len(), 1);
        assert_eq!(law.conds[0].op, CmpOp::Ne);
    }

    #[test]
    fn parses_dynamic_law_with_arithmetic_condition() {
        let spec = parse(
            "sort agent = {a}. sort slot = 1..2.\n\
             fluent at(agent, slot) : regular.\n\
             action goRight(agent) agent a.\n\
             at(A,L) after goRight(A), at(A,L1) where L == L1 + 1.",
        )
        .unwrap();
        let law = &spec.laws[0];
        match &law.body {
            LawBody::Core {
                after_part,
                if_part,
                ..
            } => {
                assert_eq!(after_part.len(), 2);
                assert!(if_part.is_empty());
            }
            other => panic!("unexpected body {:?}", other),
        }
    }

    #[test]
    fn empty_file_parses() {
        let spec = parse("").unwrap();
        assert!(spec.laws.is_empty());
        assert!(spec.sorts.is_empty());
    }

    #[test]
    fn rejects_unknown_sort() {
        let err = parse("fluent at(slot) : regular.").unwrap_err();
        assert!(err.message.contains("unknown sort"));
    }

    #[test]
    fn rejects_arity_mismatch() {
        let err = parse(
            "sort slot = 1..2. fluent at(slot) : regular.\n\
             at(1,2).",
        )
        .unwrap_err();
        assert!(err.message.contains("argument"));
        assert_eq!(err.span.map(|s| s.line), Some(2));
    }

    #[test]
    fn rejects_unbound_variable() {
        let err = parse(
            "sort slot = 1..2. fluent p(slot) : regular.\n\
             p(L) if p(1) where X < 2.",
        )
        .unwrap_err();
        assert!(err.message.contains("`X`"));
    }

    #[test]
    fn rejects_mixed_if_after() {
        let err = parse(
            "sort s = {x}. fluent p(s) : regular. action go(s).\n\
             p(x) if p(x) after go(x).",
        )
        .unwrap_err();
        assert!(err.message.contains("both `if` and `after`"));
    }

    #[test]
    fn parses_all_macro_and_label() {
        let spec = parse(
            "sort agent = {a}. sort slot = 1..4.\n\
             fluent at(agent, slot) : regular. fluent out(agent) : regular.\n\
             impossible all L in slot : -at(A,L), -out(A) label imp(A).",
        )
        .unwrap();
        let law = &spec.laws[0];
        match &law.body {
            LawBody::Impossible { condition } => {
                assert_eq!(condition.len(), 2);
                assert!(matches!(condition[0], ListItem::All { .. }));
            }
            other => panic!("unexpected body {:?}", other),
        }
        assert!(law.label.is_some());
    }

    #[test]
    fn round_trips_through_pretty_printer() {
        let src = "sort agent = {a, b}. sort slot = 1..4.\n\
             fluent at(agent, slot) : regular. fluent out(agent) : regular.\n\
             action goLeft(agent). action goRight(agent).\n\
             -at(A,L) if at(A1,L) where A != A1.\n\
             nonexecutable goRight(A), goLeft(A1) if at(A,L), at(A1,M) where A != A1, M == L + 1 label n(A,A1,L).\n\
             ab'(at(A,M)) after goRight(A), at(A,L), -goLeft(A) where M == L + 1.\n\
             inertial at(A,L), out(A).\n\
             default -out(A).\n\
             impossible all L in slot : -at(A,L), -out(A) label imp(A).";
        let spec = parse(src).unwrap();
        let printed = pretty_print(&spec);
        let reparsed = parse(&printed).unwrap_or_else(|e| panic!("reparse failed: {} in\n{}", e, printed));
        assert_eq!(spec, reparsed);
    }

    #[test]
    fn pretty_print_of_empty_spec_has_header() {
        let spec = parse("").unwrap();
        let printed = pretty_print(&spec);
        assert!(printed.starts_with('%'));
        assert_eq!(parse(&printed).unwrap(), spec);
    }

    #[test]
    fn parses_ground_literal_lists() {
        let lits = parse_ground_literals("at(a,2),-out(b),ab'(at(a,3))").unwrap();
        assert_eq!(lits.len(), 3);
        assert!(!lits[1].positive);
        assert_eq!(lits[2].atom.functor, "ab'");
    }

    #[test]
    fn located_syntax_error() {
        // missing `.` after the declaration; the error points at the next token
        let err = parse("sort s = {a}.\nfluent p : regular fluent q : regular.").unwrap_err();
        assert!(err.message.contains("expected `.`"));
        assert_eq!(err.span.map(|s| s.line), Some(2));
    }
}
