//! Stable-model enumeration at desk scale.
//!
//! The structured enumerator runs a DFS over atom assignments with two
//! propagators (classical clause propagation over the rules, and support
//! propagation: an atom with no live rule deriving it must be false), then
//! filters complete candidates through the stability check. A naive mode
//! enumerates all subsets of the signature instead and serves as an oracle
//! on tiny programs.
//!
//! Stability follows the reduct construction: drop every rule with a `not a`
//! where `a` holds or a `not not a` where it does not, strip the remaining
//! negation, and compare the candidate with the least model of the positive
//! remainder. Constraints are checked directly against the candidate.

use std::collections::BTreeSet;

use crate::translate::{AtomId, LogicProgram, Rule};

// ---------------------------------------------------------------------------
// Interpretations and model sets
// ---------------------------------------------------------------------------

/// A set of labeled atoms taken to be true.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Interpretation(pub BTreeSet<AtomId>);

impl Interpretation {
    pub fn from_iter(iter: impl IntoIterator<Item = AtomId>) -> Self {
        Interpretation(iter.into_iter().collect())
    }

    pub fn contains(&self, id: AtomId) -> bool {
        self.0.contains(&id)
    }
}

/// Canonically ordered, duplicate-free list of interpretations.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ModelSet {
    models: Vec<Interpretation>,
}

impl ModelSet {
    fn from_models(mut models: Vec<Interpretation>) -> Self {
        models.sort();
        models.dedup();
        ModelSet { models }
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Interpretation> {
        self.models.iter()
    }

    /// JSON rendering: an array of arrays of atom strings.
    pub fn to_json(&self, p: &LogicProgram) -> String {
        let rows: Vec<Vec<String>> = self
            .models
            .iter()
            .map(|m| m.0.iter().map(|&id| p.atom(id).to_string()).collect())
            .collect();
        serde_json::to_string_pretty(&rows).expect("model serialization cannot fail")
    }
}

#[derive(Clone, Debug, thiserror::Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("candidate cap of {cap} exceeded; raise --cap if the instance is really this large")]
    CandidateCapExceeded { cap: u64 },
    #[error("naive enumeration over {atoms} atoms would exceed the candidate cap")]
    TooManyAtomsForNaive { atoms: usize },
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub naive: bool,
    pub candidate_cap: u64,
    pub assumptions: Vec<(AtomId, bool)>,
    pub first_only: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            naive: false,
            candidate_cap: 1 << 26,
            assumptions: Vec::new(),
            first_only: false,
        }
    }
}

// ---------------------------------------------------------------------------
// Reduct, least model, stability (reference route)
// ---------------------------------------------------------------------------

/// The program relative to a candidate: rules with a satisfied `not` or an
/// unsatisfied `not not` are dropped, the rest lose their negated parts.
pub fn reduct(p: &LogicProgram, x: &Interpretation) -> LogicProgram {
    let rules = p
        .rules
        .iter()
        .filter(|r| {
            r.naf.iter().all(|a| !x.contains(*a)) && r.nnaf.iter().all(|a| x.contains(*a))
        })
        .map(|r| Rule {
            head: r.head,
            pos: r.pos.clone(),
            naf: Vec::new(),
            nnaf: Vec::new(),
        })
        .collect();
    p.clone_with_rules(rules)
}

/// Least model of a positive program via monotone fixpoint iteration;
/// constraints are ignored. Panics if the program still carries negation.
pub fn least_model(p: &LogicProgram) -> Interpretation {
    let mut truths = vec![false; p.atom_count()];
    loop {
        let mut changed = false;
        for rule in &p.rules {
            assert!(
                rule.naf.is_empty() && rule.nnaf.is_empty(),
                "least_model needs a positive program"
            );
            let Some(head) = rule.head else { continue };
            if truths[head as usize] {
                continue;
            }
            if rule.pos.iter().all(|&b| truths[b as usize]) {
                truths[head as usize] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Interpretation::from_iter(
        truths
            .iter()
            .enumerate()
            .filter(|(_, &t)| t)
            .map(|(i, _)| i as AtomId),
    )
}

fn constraint_violated(rule: &Rule, x: &Interpretation) -> bool {
    rule.pos.iter().all(|a| x.contains(*a))
        && rule.naf.iter().all(|a| !x.contains(*a))
        && rule.nnaf.iter().all(|a| x.contains(*a))
}

/// A candidate is stable when it satisfies every constraint and equals the
/// least model of its reduct.
pub fn is_stable(p: &LogicProgram, x: &Interpretation) -> bool {
    for rule in &p.rules {
        if rule.head.is_none() && constraint_violated(rule, x) {
            return false;
        }
    }
    let mut r = reduct(p, x);
    r.rules.retain(|rule| rule.head.is_some());
    least_model(&r) == *x
}

// ---------------------------------------------------------------------------
// Mask-based stability check (fast path; equivalent to `is_stable`)
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
struct Bits {
    words: Vec<u64>,
}

impl Bits {
    fn new(n: usize) -> Self {
        Bits {
            words: vec![0; (n + 63) / 64],
        }
    }

    fn set(&mut self, i: AtomId) {
        self.words[i as usize / 64] |= 1u64 << (i % 64);
    }

    fn get(&self, i: AtomId) -> bool {
        self.words[i as usize / 64] & (1u64 << (i % 64)) != 0
    }

    fn is_subset_of(&self, other: &Bits) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    fn intersects(&self, other: &Bits) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }
}

struct MaskRule {
    head: Option<AtomId>,
    pos: Bits,
    naf: Bits,
    nnaf: Bits,
}

pub(crate) struct Masks {
    natoms: usize,
    rules: Vec<MaskRule>,
}

impl Masks {
    pub(crate) fn build(p: &LogicProgram) -> Self {
        let natoms = p.atom_count();
        let rules = p
            .rules
            .iter()
            .map(|r| {
                let mut pos = Bits::new(natoms);
                let mut naf = Bits::new(natoms);
                let mut nnaf = Bits::new(natoms);
                for &a in &r.pos {
                    pos.set(a);
                }
                for &a in &r.naf {
                    naf.set(a);
                }
                for &a in &r.nnaf {
                    nnaf.set(a);
                }
                MaskRule {
                    head: r.head,
                    pos,
                    naf,
                    nnaf,
                }
            })
            .collect();
        Masks { natoms, rules }
    }

    fn stable(&self, x: &Bits) -> bool {
        for r in &self.rules {
            if r.head.is_none()
                && r.pos.is_subset_of(x)
                && !r.naf.intersects(x)
                && r.nnaf.is_subset_of(x)
            {
                return false;
            }
        }
        let mut lm = Bits::new(self.natoms);
        loop {
            let mut changed = false;
            for r in &self.rules {
                let Some(head) = r.head else { continue };
                if lm.get(head) {
                    continue;
                }
                if !r.naf.intersects(x) && r.nnaf.is_subset_of(x) && r.pos.is_subset_of(&lm) {
                    lm.set(head);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        lm == *x
    }
}

fn interpretation_of(bits: &Bits, natoms: usize) -> Interpretation {
    Interpretation::from_iter((0..natoms as AtomId).filter(|&i| bits.get(i)))
}

// ---------------------------------------------------------------------------
// Structured search
// ---------------------------------------------------------------------------

const UNKNOWN: i8 = -1;
const FALSE: i8 = 0;
const TRUE: i8 = 1;

struct Search<'a> {
    p: &'a LogicProgram,
    masks: Masks,
    head_rules: Vec<Vec<u32>>,
    val: Vec<i8>,
    trail: Vec<AtomId>,
    branch_order: Vec<AtomId>,
    candidates: u64,
    cap: u64,
    first_only: bool,
    models: Vec<Bits>,
}

enum SearchOutcome {
    Done,
    FoundEnough,
}

impl<'a> Search<'a> {
    fn new(p: &'a LogicProgram, opts: &SolveOptions) -> Self {
        let n = p.atom_count();
        let mut head_rules = vec![Vec::new(); n];
        for (ri, rule) in p.rules.iter().enumerate() {
            if let Some(h) = rule.head {
                head_rules[h as usize].push(ri as u32);
            }
        }
        // Branch on time-0 fluent polarities first, then action atoms, then
        // later fluent groups; complements follow by propagation.
        let mut branch_order = Vec::with_capacity(n);
        let push = |order: &mut Vec<AtomId>, id: AtomId| {
            if !order.contains(&id) {
                order.push(id);
            }
        };
        for &(pos, _) in p.exactly_one.iter().filter(|(a, _)| p.atom(*a).time == 0) {
            push(&mut branch_order, pos);
        }
        for &a in &p.action_atoms {
            push(&mut branch_order, a);
        }
        for &(pos, _) in &p.exactly_one {
            push(&mut branch_order, pos);
        }
        for id in 0..n as AtomId {
            push(&mut branch_order, id);
        }
        Search {
            p,
            masks: Masks::build(p),
            head_rules,
            val: vec![UNKNOWN; n],
            trail: Vec::new(),
            branch_order,
            candidates: 0,
            cap: opts.candidate_cap,
            first_only: opts.first_only,
            models: Vec::new(),
        }
    }

    fn assign(&mut self, id: AtomId, value: bool) -> bool {
        match self.val[id as usize] {
            UNKNOWN => {
                self.val[id as usize] = value as i8;
                self.trail.push(id);
                true
            }
            v => v == value as i8,
        }
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let id = self.trail.pop().unwrap();
            self.val[id as usize] = UNKNOWN;
        }
    }

    /// Propagate to fixpoint. Returns false on conflict.
    fn propagate(&mut self) -> bool {
        loop {
            let mut changed = false;
            'rules: for ri in 0..self.p.rules.len() {
                let rule = &self.p.rules[ri];
                // Scan the body: skip the rule if some condition is already
                // false; otherwise remember the single unknown, if any.
                let mut unknowns = 0usize;
                let mut pivot: Option<(AtomId, bool)> = None; // value that falsifies
                for &b in &rule.pos {
                    match self.val[b as usize] {
                        FALSE => continue 'rules,
                        UNKNOWN => {
                            unknowns += 1;
                            pivot = Some((b, false));
                        }
                        _ => {}
                    }
                }
                for &a in &rule.naf {
                    match self.val[a as usize] {
                        TRUE => continue 'rules,
                        UNKNOWN => {
                            unknowns += 1;
                            pivot = Some((a, true));
                        }
                        _ => {}
                    }
                }
                for &a in &rule.nnaf {
                    match self.val[a as usize] {
                        FALSE => continue 'rules,
                        UNKNOWN => {
                            unknowns += 1;
                            pivot = Some((a, false));
                        }
                        _ => {}
                    }
                }
                let head_state = rule.head.map(|h| self.val[h as usize]);
                match (unknowns, head_state) {
                    // body satisfied: force the head
                    (0, None) | (0, Some(FALSE)) => return false,
                    (0, Some(UNKNOWN)) => {
                        let h = rule.head.unwrap();
                        self.assign(h, true);
                        changed = true;
                    }
                    // head unavailable and one unknown left: falsify it
                    (1, None) | (1, Some(FALSE)) => {
                        let (atom, value) = pivot.unwrap();
                        if !self.assign(atom, value) {
                            return false;
                        }
                        changed = true;
                    }
                    _ => {}
                }
            }

            // Support: an atom whose deriving rules are all dead is false.
            for id in 0..self.val.len() {
                if self.val[id] == FALSE {
                    continue;
                }
                let alive = self.head_rules[id].iter().any(|&ri| {
                    let rule = &self.p.rules[ri as usize];
                    rule.pos.iter().all(|&b| self.val[b as usize] != FALSE)
                        && rule.naf.iter().all(|&a| self.val[a as usize] != TRUE)
                        && rule.nnaf.iter().all(|&a| self.val[a as usize] != FALSE)
                });
                if !alive {
                    if self.val[id] == TRUE {
                        return false;
                    }
                    self.assign(id as AtomId, false);
                    changed = true;
                }
            }

            if !changed {
                return true;
            }
        }
    }

    fn run(&mut self) -> Result<SearchOutcome, EngineError> {
        self.candidates += 1;
        if self.candidates > self.cap {
            return Err(EngineError::CandidateCapExceeded { cap: self.cap });
        }
        let mark = self.trail.len();
        if !self.propagate() {
            self.undo_to(mark);
            return Ok(SearchOutcome::Done);
        }
        let next = self
            .branch_order
            .iter()
            .copied()
            .find(|&id| self.val[id as usize] == UNKNOWN);
        match next {
            None => {
                let mut x = Bits::new(self.val.len());
                for (id, &v) in self.val.iter().enumerate() {
                    if v == TRUE {
                        x.set(id as AtomId);
                    }
                }
                if self.masks.stable(&x) {
                    debug_assert!(is_stable(
                        self.p,
                        &interpretation_of(&x, self.val.len())
                    ));
                    self.models.push(x);
                    if self.first_only {
                        self.undo_to(mark);
                        return Ok(SearchOutcome::FoundEnough);
                    }
                }
                self.undo_to(mark);
                Ok(SearchOutcome::Done)
            }
            Some(id) => {
                for value in [true, false] {
                    let inner = self.trail.len();
                    self.assign(id, value);
                    match self.run()? {
                        SearchOutcome::FoundEnough => {
                            self.undo_to(mark);
                            return Ok(SearchOutcome::FoundEnough);
                        }
                        SearchOutcome::Done => self.undo_to(inner),
                    }
                }
                self.undo_to(mark);
                Ok(SearchOutcome::Done)
            }
        }
    }
}

/// Enumerate all stable models of `p`.
pub fn enumerate(p: &LogicProgram, opts: &SolveOptions) -> Result<ModelSet, EngineError> {
    if opts.naive {
        return enumerate_naive(p, opts);
    }
    let mut search = Search::new(p, opts);
    for &(id, value) in &opts.assumptions {
        if !search.assign(id, value) {
            return Ok(ModelSet::default());
        }
    }
    search.run()?;
    let n = p.atom_count();
    Ok(ModelSet::from_models(
        search
            .models
            .iter()
            .map(|b| interpretation_of(b, n))
            .collect(),
    ))
}

/// True when the program has a stable model consistent with the assumptions.
pub fn exists_model(
    p: &LogicProgram,
    assumptions: Vec<(AtomId, bool)>,
    cap: u64,
) -> Result<bool, EngineError> {
    let opts = SolveOptions {
        assumptions,
        first_only: true,
        candidate_cap: cap,
        ..SolveOptions::default()
    };
    Ok(!enumerate(p, &opts)?.is_empty())
}

fn enumerate_naive(p: &LogicProgram, opts: &SolveOptions) -> Result<ModelSet, EngineError> {
    let n = p.atom_count();
    if n >= 40 || (1u64 << n) > opts.candidate_cap {
        return Err(EngineError::TooManyAtomsForNaive { atoms: n });
    }
    let masks = Masks::build(p);
    let mut models = Vec::new();
    'subsets: for mask in 0u64..(1u64 << n) {
        let mut x = Bits::new(n);
        for i in 0..n {
            if mask & (1 << i) != 0 {
                x.set(i as AtomId);
            }
        }
        for &(id, value) in &opts.assumptions {
            if x.get(id) != value {
                continue 'subsets;
            }
        }
        if masks.stable(&x) {
            models.push(interpretation_of(&x, n));
            if opts.first_only {
                break;
            }
        }
    }
    Ok(ModelSet::from_models(models))
}
