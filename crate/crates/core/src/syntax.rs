//! Syntax of the ΛM-calculus: terms, commands and stacks with two disjoint
//! binder namespaces (variables `x, y, …` and names `'a, 'b, …`).
//!
//! The grammar implemented here:
//!
//! ```text
//! (Terms)    t ::= x | t t | \x. t | mu 'a. c | t[x := u]
//! (Commands) c ::= ['a] t | c['a := s > 'b] | c['a ~> 'b]
//! (Stacks)   s ::= t | t, s                       (non-empty)
//! ```
//!
//! Objects are immutable values; all binding-sensitive operations work
//! modulo α-conversion.  Smart constructors maintain the well-formedness
//! conventions by refreshing binders on demand:
//!
//! * `t[x := u]` with `x ∈ fv(u)` — the bound `x` is renamed,
//! * `c['a := s > 'b]` with `'a ∈ fn(s)` or `'a = 'b` — the bound `'a` is renamed,
//! * `c['a ~> 'b]` with `'a = 'b` — the bound `'a` is renamed.
//!
//! Only [`parse`] reports such violations as errors instead of repairing
//! them, so that literal input is never silently reinterpreted.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

// ---------------------------------------------------------------------------
// Identifiers
// ---------------------------------------------------------------------------

/// A term variable (`x`, `y1`, …).  Display form has no sigil.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ident(pub String);

/// A (continuation) name (`'a`, `'g2`, …).  Display form carries a leading `'`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NameId(pub String);

impl Ident {
    /// Builds an identifier from its bare text.
    pub fn new(s: impl Into<String>) -> Self {
        Ident(s.into())
    }
}

impl NameId {
    /// Builds a name from its bare text (without the `'` sigil).
    pub fn new(s: impl Into<String>) -> Self {
        NameId(s.into())
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for NameId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "'{}", self.0)
    }
}

// ---------------------------------------------------------------------------
// AST
// ---------------------------------------------------------------------------

/// Syntactic sort of an [`Object`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sort {
    /// Terms `t`.
    Term,
    /// Commands `c`.
    Command,
    /// Stacks `s`.
    Stack,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Term => write!(f, "term"),
            Sort::Command => write!(f, "command"),
            Sort::Stack => write!(f, "stack"),
        }
    }
}

/// ΛM terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    /// A variable `x`.
    Var(Ident),
    /// An application `t u`.
    App(Box<Term>, Box<Term>),
    /// A λ-abstraction `\x. t` binding `x` in `t`.
    Abs(Ident, Box<Term>),
    /// A μ-abstraction `mu 'a. c` binding `'a` in `c`.
    Mu(NameId, Box<Command>),
    /// An explicit substitution `t[x := u]` binding `x` in `t`.
    ESub(Box<Term>, Ident, Box<Term>),
}

/// ΛM commands.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Command {
    /// A named term `['a] t`; `'a` occurs free.
    Named(NameId, Box<Term>),
    /// An explicit replacement `c['a := s > 'b]` binding `'a` in `c`;
    /// the output name `'b` occurs free.
    ERepl(Box<Command>, NameId, Stack, NameId),
    /// An explicit renaming `c['a ~> 'b]` binding `'a` in `c`;
    /// the target `'b` occurs free.
    ERen(Box<Command>, NameId, NameId),
}

/// A non-empty stack of terms `t1, …, tn`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Stack(Vec<Term>);

impl Stack {
    /// Builds a stack; panics on an empty item list (stacks are non-empty
    /// by the grammar).
    pub fn new(items: Vec<Term>) -> Self {
        assert!(!items.is_empty(), "stacks are non-empty");
        Stack(items)
    }

    /// The stack items in order.
    pub fn items(&self) -> &[Term] {
        &self.0
    }

    /// Number of items.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Stacks are never empty; provided for clippy-compatibility.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Concatenation `s ++ s'` (associative).
    pub fn concat(&self, other: &Stack) -> Stack {
        let mut items = self.0.clone();
        items.extend(other.0.iter().cloned());
        Stack(items)
    }
}

/// A ΛM object: term, command, or stack, with its sort tag.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Object {
    /// A term object.
    Term(Term),
    /// A command object.
    Command(Command),
    /// A stack object.
    Stack(Stack),
}

impl Object {
    /// Sort tag of the payload.
    pub fn sort(&self) -> Sort {
        match self {
            Object::Term(_) => Sort::Term,
            Object::Command(_) => Sort::Command,
            Object::Stack(_) => Sort::Stack,
        }
    }

    /// Extracts a term, if this object is one.
    pub fn as_term(&self) -> Option<&Term> {
        match self {
            Object::Term(t) => Some(t),
            _ => None,
        }
    }

    /// Extracts a command, if this object is one.
    pub fn as_command(&self) -> Option<&Command> {
        match self {
            Object::Command(c) => Some(c),
            _ => None,
        }
    }

    /// Extracts a stack, if this object is one.
    pub fn as_stack(&self) -> Option<&Stack> {
        match self {
            Object::Stack(s) => Some(s),
            _ => None,
        }
    }

    /// Number of AST constructors (the size measure used by generators).
    pub fn size(&self) -> usize {
        match self {
            Object::Term(t) => term_size(t),
            Object::Command(c) => command_size(c),
            Object::Stack(s) => s.items().iter().map(term_size).sum::<usize>() + 1,
        }
    }
}

fn term_size(t: &Term) -> usize {
    match t {
        Term::Var(_) => 1,
        Term::App(f, a) => 1 + term_size(f) + term_size(a),
        Term::Abs(_, b) => 1 + term_size(b),
        Term::Mu(_, c) => 1 + command_size(c),
        Term::ESub(b, _, u) => 1 + term_size(b) + term_size(u),
    }
}

fn command_size(c: &Command) -> usize {
    match c {
        Command::Named(_, t) => 1 + term_size(t),
        Command::ERepl(b, _, s, _) => {
            1 + command_size(b) + s.items().iter().map(term_size).sum::<usize>()
        }
        Command::ERen(b, _, _) => 1 + command_size(b),
    }
}

// ---------------------------------------------------------------------------
// Free variables / names and occurrence counting
// ---------------------------------------------------------------------------

/// Result of [`analyze`]: free variables, free names, and free-occurrence
/// counts of names.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Analysis {
    /// Free term variables.
    pub fv: BTreeSet<Ident>,
    /// Free names.
    pub fn_: BTreeSet<NameId>,
    counts: std::collections::BTreeMap<NameId, usize>,
}

impl Analysis {
    /// Number of free occurrences of the name `a` (written `fn_a(o)`).
    pub fn count(&self, a: &NameId) -> usize {
        self.counts.get(a).copied().unwrap_or(0)
    }
}

/// Computes free variables, free names and free name-occurrence counts.
///
/// Free names follow the equations of the calculus; notably
/// `fn(c['a := s > 'b]) = (fn(c) ∖ {'a}) ∪ fn(s) ∪ {'b}` — the output name of
/// an explicit replacement is free — and
/// `fn(c['a ~> 'b]) = (fn(c) ∖ {'a}) ∪ {'b}`.
pub fn analyze(o: &Object) -> Analysis {
    let mut an = Analysis::default();
    match o {
        Object::Term(t) => analyze_term(t, &mut an),
        Object::Command(c) => analyze_command(c, &mut an),
        Object::Stack(s) => analyze_stack(s, &mut an),
    }
    an
}

fn bump(an: &mut Analysis, a: &NameId, n: usize) {
    if n > 0 {
        an.fn_.insert(a.clone());
        *an.counts.entry(a.clone()).or_insert(0) += n;
    }
}

fn analyze_term(t: &Term, an: &mut Analysis) {
    match t {
        Term::Var(x) => {
            an.fv.insert(x.clone());
        }
        Term::App(f, a) => {
            analyze_term(f, an);
            analyze_term(a, an);
        }
        Term::Abs(x, b) => {
            let mut inner = Analysis::default();
            analyze_term(b, &mut inner);
            inner.fv.remove(x);
            merge(an, inner);
        }
        Term::Mu(a, c) => {
            let mut inner = Analysis::default();
            analyze_command(c, &mut inner);
            drop_name(&mut inner, a);
            merge(an, inner);
        }
        Term::ESub(b, x, u) => {
            let mut inner = Analysis::default();
            analyze_term(b, &mut inner);
            inner.fv.remove(x);
            merge(an, inner);
            analyze_term(u, an);
        }
    }
}

fn analyze_command(c: &Command, an: &mut Analysis) {
    match c {
        Command::Named(a, t) => {
            bump(an, a, 1);
            analyze_term(t, an);
        }
        Command::ERepl(b, a, s, out) => {
            let mut inner = Analysis::default();
            analyze_command(b, &mut inner);
            drop_name(&mut inner, a);
            merge(an, inner);
            analyze_stack(s, an);
            bump(an, out, 1);
        }
        Command::ERen(b, a, tgt) => {
            let mut inner = Analysis::default();
            analyze_command(b, &mut inner);
            drop_name(&mut inner, a);
            merge(an, inner);
            bump(an, tgt, 1);
        }
    }
}

fn analyze_stack(s: &Stack, an: &mut Analysis) {
    for t in s.items() {
        analyze_term(t, an);
    }
}

fn drop_name(an: &mut Analysis, a: &NameId) {
    an.fn_.remove(a);
    an.counts.remove(a);
}

fn merge(an: &mut Analysis, other: Analysis) {
    an.fv.extend(other.fv);
    for (k, v) in other.counts {
        an.fn_.insert(k.clone());
        *an.counts.entry(k).or_insert(0) += v;
    }
}

/// All identifiers occurring anywhere in `o` (free or bound), split into the
/// variable namespace and the name namespace.  Used to pick fresh
/// identifiers relative to a whole ambient object.
pub fn all_idents(o: &Object) -> (HashSet<String>, HashSet<String>) {
    let mut vars = HashSet::new();
    let mut names = HashSet::new();
    collect_idents(o, &mut vars, &mut names);
    (vars, names)
}

fn collect_idents(o: &Object, vars: &mut HashSet<String>, names: &mut HashSet<String>) {
    match o {
        Object::Term(t) => collect_term(t, vars, names),
        Object::Command(c) => collect_command(c, vars, names),
        Object::Stack(s) => {
            for t in s.items() {
                collect_term(t, vars, names);
            }
        }
    }
}

fn collect_term(t: &Term, vars: &mut HashSet<String>, names: &mut HashSet<String>) {
    match t {
        Term::Var(x) => {
            vars.insert(x.0.clone());
        }
        Term::App(f, a) => {
            collect_term(f, vars, names);
            collect_term(a, vars, names);
        }
        Term::Abs(x, b) => {
            vars.insert(x.0.clone());
            collect_term(b, vars, names);
        }
        Term::Mu(a, c) => {
            names.insert(a.0.clone());
            collect_command(c, vars, names);
        }
        Term::ESub(b, x, u) => {
            vars.insert(x.0.clone());
            collect_term(b, vars, names);
            collect_term(u, vars, names);
        }
    }
}

fn collect_command(c: &Command, vars: &mut HashSet<String>, names: &mut HashSet<String>) {
    match c {
        Command::Named(a, t) => {
            names.insert(a.0.clone());
            collect_term(t, vars, names);
        }
        Command::ERepl(b, a, s, out) => {
            names.insert(a.0.clone());
            names.insert(out.0.clone());
            collect_command(b, vars, names);
            for t in s.items() {
                collect_term(t, vars, names);
            }
        }
        Command::ERen(b, a, tgt) => {
            names.insert(a.0.clone());
            names.insert(tgt.0.clone());
            collect_command(b, vars, names);
        }
    }
}

/// Picks a fresh identifier derived from `base` and not present in `avoid`.
///
/// The base's trailing digits are stripped, then `base1, base2, …` are tried
/// in order, so freshened identifiers always carry a numeric suffix.
pub fn fresh_ident(base: &str, avoid: &HashSet<String>) -> String {
    let root: &str = base.trim_end_matches(|ch: char| ch.is_ascii_digit());
    let root = if root.is_empty() { "g" } else { root };
    for i in 1.. {
        let cand = format!("{root}{i}");
        if !avoid.contains(&cand) {
            return cand;
        }
    }
    unreachable!()
}

// ---------------------------------------------------------------------------
// α-renaming of free occurrences (raw, namespace-level)
// ---------------------------------------------------------------------------

/// Renames the free occurrences of variable `x` to `y` in a term, assuming
/// `y` does not occur in `t` at all (so no capture can arise).  This is the
/// primitive used for binder refreshing; capture-avoiding substitution lives
/// in the `meta` module.
pub fn rename_free_var_term(t: &Term, x: &Ident, y: &Ident) -> Term {
    match t {
        Term::Var(v) if v == x => Term::Var(y.clone()),
        Term::Var(_) => t.clone(),
        Term::App(f, a) => Term::App(
            Box::new(rename_free_var_term(f, x, y)),
            Box::new(rename_free_var_term(a, x, y)),
        ),
        Term::Abs(v, _) if v == x => t.clone(),
        Term::Abs(v, b) => Term::Abs(v.clone(), Box::new(rename_free_var_term(b, x, y))),
        Term::Mu(a, c) => Term::Mu(a.clone(), Box::new(rename_free_var_command(c, x, y))),
        Term::ESub(b, v, u) => {
            let nb = if v == x {
                (**b).clone()
            } else {
                rename_free_var_term(b, x, y)
            };
            Term::ESub(
                Box::new(nb),
                v.clone(),
                Box::new(rename_free_var_term(u, x, y)),
            )
        }
    }
}

fn rename_free_var_command(c: &Command, x: &Ident, y: &Ident) -> Command {
    match c {
        Command::Named(a, t) => Command::Named(a.clone(), Box::new(rename_free_var_term(t, x, y))),
        Command::ERepl(b, a, s, out) => Command::ERepl(
            Box::new(rename_free_var_command(b, x, y)),
            a.clone(),
            Stack::new(s.items().iter().map(|t| rename_free_var_term(t, x, y)).collect()),
            out.clone(),
        ),
        Command::ERen(b, a, tgt) => Command::ERen(
            Box::new(rename_free_var_command(b, x, y)),
            a.clone(),
            tgt.clone(),
        ),
    }
}

/// Renames the free occurrences of name `a` to `b` in a command, assuming
/// `b` does not occur at all (no capture).  Primitive for binder refreshing.
pub fn rename_free_name_command(c: &Command, a: &NameId, b: &NameId) -> Command {
    match c {
        Command::Named(n, t) => {
            let n2 = if n == a { b.clone() } else { n.clone() };
            Command::Named(n2, Box::new(rename_free_name_term(t, a, b)))
        }
        Command::ERepl(body, bound, s, out) => {
            let nb = if bound == a {
                (**body).clone()
            } else {
                rename_free_name_command(body, a, b)
            };
            let out2 = if out == a { b.clone() } else { out.clone() };
            Command::ERepl(
                Box::new(nb),
                bound.clone(),
                Stack::new(s.items().iter().map(|t| rename_free_name_term(t, a, b)).collect()),
                out2,
            )
        }
        Command::ERen(body, bound, tgt) => {
            let nb = if bound == a {
                (**body).clone()
            } else {
                rename_free_name_command(body, a, b)
            };
            let tgt2 = if tgt == a { b.clone() } else { tgt.clone() };
            Command::ERen(Box::new(nb), bound.clone(), tgt2)
        }
    }
}

/// Term-level companion of [`rename_free_name_command`].
pub fn rename_free_name_term(t: &Term, a: &NameId, b: &NameId) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::App(f, g) => Term::App(
            Box::new(rename_free_name_term(f, a, b)),
            Box::new(rename_free_name_term(g, a, b)),
        ),
        Term::Abs(x, body) => Term::Abs(x.clone(), Box::new(rename_free_name_term(body, a, b))),
        Term::Mu(n, _) if n == a => t.clone(),
        Term::Mu(n, c) => Term::Mu(n.clone(), Box::new(rename_free_name_command(c, a, b))),
        Term::ESub(body, x, u) => Term::ESub(
            Box::new(rename_free_name_term(body, a, b)),
            x.clone(),
            Box::new(rename_free_name_term(u, a, b)),
        ),
    }
}

// ---------------------------------------------------------------------------
// Smart constructors
// ---------------------------------------------------------------------------

/// Builds `t[x := u]`, refreshing the bound `x` when `x ∈ fv(u)`.
pub fn esub(t: Term, x: Ident, u: Term) -> Term {
    let ua = analyze(&Object::Term(u.clone()));
    if ua.fv.contains(&x) {
        let (mut vars, _) = all_idents(&Object::Term(t.clone()));
        let (uv, _) = all_idents(&Object::Term(u.clone()));
        vars.extend(uv);
        let fresh = Ident::new(fresh_ident(&x.0, &vars));
        let t2 = rename_free_var_term(&t, &x, &fresh);
        Term::ESub(Box::new(t2), fresh, Box::new(u))
    } else {
        Term::ESub(Box::new(t), x, Box::new(u))
    }
}

/// Builds `c['a := s > 'out]`, refreshing the bound `'a` when `'a ∈ fn(s)`
/// or `'a = 'out`.
pub fn erepl(c: Command, a: NameId, s: Stack, out: NameId) -> Command {
    let sa = analyze(&Object::Stack(s.clone()));
    if sa.fn_.contains(&a) || a == out {
        let (_, mut names) = all_idents(&Object::Command(c.clone()));
        let (_, sn) = all_idents(&Object::Stack(s.clone()));
        names.extend(sn);
        names.insert(out.0.clone());
        let fresh = NameId::new(fresh_ident(&a.0, &names));
        let c2 = rename_free_name_command(&c, &a, &fresh);
        Command::ERepl(Box::new(c2), fresh, s, out)
    } else {
        Command::ERepl(Box::new(c), a, s, out)
    }
}

/// Builds `c['a ~> 'b]`, refreshing the bound `'a` when `'a = 'b`.
pub fn eren(c: Command, a: NameId, b: NameId) -> Command {
    if a == b {
        let (_, mut names) = all_idents(&Object::Command(c.clone()));
        names.insert(b.0.clone());
        let fresh = NameId::new(fresh_ident(&a.0, &names));
        let c2 = rename_free_name_command(&c, &a, &fresh);
        Command::ERen(Box::new(c2), fresh, b)
    } else {
        Command::ERen(Box::new(c), a, b)
    }
}

// ---------------------------------------------------------------------------
// α-equivalence via canonical numbering
// ---------------------------------------------------------------------------

/// A canonical string key: bound variables and names are numbered in
/// traversal order, free identifiers stay as themselves.  Two objects are
/// α-equivalent iff their keys coincide, so the key doubles as a hash key in
/// closure searches.
pub fn canonical_key(o: &Object) -> String {
    let mut out = String::new();
    let mut ctr = 0usize;
    match o {
        Object::Term(t) => key_term(t, &mut out, &mut ctr, &mut Vec::new(), &mut Vec::new()),
        Object::Command(c) => key_command(c, &mut out, &mut ctr, &mut Vec::new(), &mut Vec::new()),
        Object::Stack(s) => {
            out.push_str("stk(");
            for t in s.items() {
                key_term(t, &mut out, &mut ctr, &mut Vec::new(), &mut Vec::new());
                out.push(',');
            }
            out.push(')');
        }
    }
    out
}

type Scope = Vec<(String, usize)>;

fn lookup(scope: &Scope, id: &str) -> Option<usize> {
    scope.iter().rev().find(|(n, _)| n == id).map(|(_, i)| *i)
}

fn push_var(out: &mut String, scope: &Scope, id: &str) {
    match lookup(scope, id) {
        Some(i) => {
            out.push('#');
            out.push_str(&i.to_string());
        }
        None => {
            out.push('v');
            out.push_str(id);
        }
    }
}

fn push_name(out: &mut String, scope: &Scope, id: &str) {
    match lookup(scope, id) {
        Some(i) => {
            out.push('^');
            out.push_str(&i.to_string());
        }
        None => {
            out.push('n');
            out.push_str(id);
        }
    }
}

fn key_term(t: &Term, out: &mut String, ctr: &mut usize, vars: &mut Scope, names: &mut Scope) {
    match t {
        Term::Var(x) => {
            push_var(out, vars, &x.0);
        }
        Term::App(f, a) => {
            out.push_str("@(");
            key_term(f, out, ctr, vars, names);
            out.push(' ');
            key_term(a, out, ctr, vars, names);
            out.push(')');
        }
        Term::Abs(x, b) => {
            let i = *ctr;
            *ctr += 1;
            out.push_str(&format!("L{i}."));
            vars.push((x.0.clone(), i));
            key_term(b, out, ctr, vars, names);
            vars.pop();
        }
        Term::Mu(a, c) => {
            let i = *ctr;
            *ctr += 1;
            out.push_str(&format!("M{i}."));
            names.push((a.0.clone(), i));
            key_command(c, out, ctr, vars, names);
            names.pop();
        }
        Term::ESub(b, x, u) => {
            // The binder scopes the body only; the argument is keyed first
            // so its occurrences never see the binder.
            out.push_str("S[");
            key_term(u, out, ctr, vars, names);
            out.push(']');
            let i = *ctr;
            *ctr += 1;
            out.push_str(&format!("{i}."));
            vars.push((x.0.clone(), i));
            key_term(b, out, ctr, vars, names);
            vars.pop();
        }
    }
}

fn key_command(c: &Command, out: &mut String, ctr: &mut usize, vars: &mut Scope, names: &mut Scope) {
    match c {
        Command::Named(a, t) => {
            out.push('[');
            push_name(out, names, &a.0);
            out.push(']');
            key_term(t, out, ctr, vars, names);
        }
        Command::ERepl(b, a, s, outn) => {
            out.push_str("R[");
            for t in s.items() {
                key_term(t, out, ctr, vars, names);
                out.push(',');
            }
            out.push('>');
            push_name(out, names, &outn.0);
            out.push(']');
            let i = *ctr;
            *ctr += 1;
            out.push_str(&format!("{i}."));
            names.push((a.0.clone(), i));
            key_command(b, out, ctr, vars, names);
            names.pop();
        }
        Command::ERen(b, a, tgt) => {
            out.push_str("N[~>");
            push_name(out, names, &tgt.0);
            out.push(']');
            let i = *ctr;
            *ctr += 1;
            out.push_str(&format!("{i}."));
            names.push((a.0.clone(), i));
            key_command(b, out, ctr, vars, names);
            names.pop();
        }
    }
}

/// α-equivalence of two objects of the same sort.
///
/// Bound variables and names (the `x` of `Abs`/`ESub`, the `'a` of
/// `Mu`/`ERepl`/`ERen`) are compared up to canonical renumbering; free
/// identifiers — including the out-name of an explicit replacement — are
/// rigid.
pub fn alpha_equal(o: &Object, p: &Object) -> bool {
    o.sort() == p.sort() && canonical_key(o) == canonical_key(p)
}

// ---------------------------------------------------------------------------
// Positions (paths)
// ---------------------------------------------------------------------------

/// Number of immediate sub-objects.
pub fn child_count(o: &Object) -> usize {
    match o {
        Object::Term(Term::Var(_)) => 0,
        Object::Term(Term::App(..)) => 2,
        Object::Term(Term::Abs(..)) => 1,
        Object::Term(Term::Mu(..)) => 1,
        Object::Term(Term::ESub(..)) => 2,
        Object::Command(Command::Named(..)) => 1,
        Object::Command(Command::ERepl(..)) => 2,
        Object::Command(Command::ERen(..)) => 1,
        Object::Stack(s) => s.len(),
    }
}

/// The `i`-th immediate sub-object (cloned), if it exists.
///
/// Child order: `App(fun, arg)`, `ESub(body, arg)`, `ERepl(body, stack)`;
/// unary nodes expose their body; stacks expose their items.
pub fn child(o: &Object, i: usize) -> Option<Object> {
    match (o, i) {
        (Object::Term(Term::App(f, _)), 0) => Some(Object::Term((**f).clone())),
        (Object::Term(Term::App(_, a)), 1) => Some(Object::Term((**a).clone())),
        (Object::Term(Term::Abs(_, b)), 0) => Some(Object::Term((**b).clone())),
        (Object::Term(Term::Mu(_, c)), 0) => Some(Object::Command((**c).clone())),
        (Object::Term(Term::ESub(b, _, _)), 0) => Some(Object::Term((**b).clone())),
        (Object::Term(Term::ESub(_, _, u)), 1) => Some(Object::Term((**u).clone())),
        (Object::Command(Command::Named(_, t)), 0) => Some(Object::Term((**t).clone())),
        (Object::Command(Command::ERepl(b, _, _, _)), 0) => Some(Object::Command((**b).clone())),
        (Object::Command(Command::ERepl(_, _, s, _)), 1) => Some(Object::Stack(s.clone())),
        (Object::Command(Command::ERen(b, _, _)), 0) => Some(Object::Command((**b).clone())),
        (Object::Stack(s), i) if i < s.len() => Some(Object::Term(s.items()[i].clone())),
        _ => None,
    }
}

/// Rebuilds `o` with its `i`-th child replaced (sorts must match).
pub fn with_child(o: &Object, i: usize, new: Object) -> Object {
    match (o, i, new) {
        (Object::Term(Term::App(_, a)), 0, Object::Term(n)) => {
            Object::Term(Term::App(Box::new(n), a.clone()))
        }
        (Object::Term(Term::App(f, _)), 1, Object::Term(n)) => {
            Object::Term(Term::App(f.clone(), Box::new(n)))
        }
        (Object::Term(Term::Abs(x, _)), 0, Object::Term(n)) => {
            Object::Term(Term::Abs(x.clone(), Box::new(n)))
        }
        (Object::Term(Term::Mu(a, _)), 0, Object::Command(n)) => {
            Object::Term(Term::Mu(a.clone(), Box::new(n)))
        }
        (Object::Term(Term::ESub(_, x, u)), 0, Object::Term(n)) => {
            Object::Term(Term::ESub(Box::new(n), x.clone(), u.clone()))
        }
        (Object::Term(Term::ESub(b, x, _)), 1, Object::Term(n)) => {
            Object::Term(Term::ESub(b.clone(), x.clone(), Box::new(n)))
        }
        (Object::Command(Command::Named(a, _)), 0, Object::Term(n)) => {
            Object::Command(Command::Named(a.clone(), Box::new(n)))
        }
        (Object::Command(Command::ERepl(_, a, s, out)), 0, Object::Command(n)) => {
            Object::Command(Command::ERepl(Box::new(n), a.clone(), s.clone(), out.clone()))
        }
        (Object::Command(Command::ERepl(b, a, _, out)), 1, Object::Stack(n)) => {
            Object::Command(Command::ERepl(b.clone(), a.clone(), n, out.clone()))
        }
        (Object::Command(Command::ERen(_, a, t)), 0, Object::Command(n)) => {
            Object::Command(Command::ERen(Box::new(n), a.clone(), t.clone()))
        }
        (Object::Stack(s), i, Object::Term(n)) if i < s.len() => {
            let mut items = s.items().to_vec();
            items[i] = n;
            Object::Stack(Stack::new(items))
        }
        (o, i, n) => panic!(
            "with_child: invalid replacement at index {i} of {:?} with sort {:?}",
            o.sort(),
            n.sort()
        ),
    }
}

/// The sub-object at `path` (a list of child indices), if the path is valid.
pub fn subobject(o: &Object, path: &[usize]) -> Option<Object> {
    match path.split_first() {
        None => Some(o.clone()),
        Some((&i, rest)) => subobject(&child(o, i)?, rest),
    }
}

/// Rebuilds `o` with the sub-object at `path` replaced by `new`.
pub fn replace_at(o: &Object, path: &[usize], new: Object) -> Object {
    match path.split_first() {
        None => new,
        Some((&i, rest)) => {
            let c = child(o, i).expect("replace_at: invalid path");
            with_child(o, i, replace_at(&c, rest, new))
        }
    }
}

/// All positions of `o` in pre-order (leftmost-outermost first).
pub fn positions(o: &Object) -> Vec<Vec<usize>> {
    let mut acc = Vec::new();
    let mut stack = vec![(Vec::new(), o.clone())];
    while let Some((path, obj)) = stack.pop() {
        acc.push(path.clone());
        for i in (0..child_count(&obj)).rev() {
            let mut p = path.clone();
            p.push(i);
            stack.push((p, child(&obj, i).unwrap()));
        }
    }
    acc
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

/// Errors reported by [`parse`].
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    /// The text does not conform to the grammar at any sort.
    #[error("syntax error at byte {position}: expected {expected}")]
    Syntax {
        /// Byte offset of the offending token.
        position: usize,
        /// Human-readable description of what was expected.
        expected: String,
    },
    /// The text parses at a different sort than requested.
    #[error("sort error: text parses as a {found}, not a {requested}")]
    Sort {
        /// The sort requested by the caller.
        requested: Sort,
        /// A sort at which the text does parse.
        found: Sort,
    },
    /// A binding convention is violated by the literal input
    /// (e.g. an explicit replacement whose bound name occurs in its stack).
    #[error("invariant error: {0}")]
    Invariant(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Name(String),
    KwMu,
    Backslash,
    Dot,
    Comma,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Assign, // :=
    Arrow,  // ~>
    Gt,     // >
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0usize;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '(' => {
                toks.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, i));
                i += 1;
            }
            '[' => {
                toks.push((Tok::LBracket, i));
                i += 1;
            }
            ']' => {
                toks.push((Tok::RBracket, i));
                i += 1;
            }
            '\\' => {
                toks.push((Tok::Backslash, i));
                i += 1;
            }
            '.' => {
                toks.push((Tok::Dot, i));
                i += 1;
            }
            ',' => {
                toks.push((Tok::Comma, i));
                i += 1;
            }
            '>' => {
                toks.push((Tok::Gt, i));
                i += 1;
            }
            ':' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    toks.push((Tok::Assign, i));
                    i += 2;
                } else {
                    return Err(ParseError::Syntax {
                        position: i,
                        expected: "`:=`".into(),
                    });
                }
            }
            '~' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    toks.push((Tok::Arrow, i));
                    i += 2;
                } else {
                    return Err(ParseError::Syntax {
                        position: i,
                        expected: "`~>`".into(),
                    });
                }
            }
            '\'' => {
                let start = i + 1;
                if start >= bytes.len() || !(bytes[start] as char).is_ascii_alphabetic() {
                    return Err(ParseError::Syntax {
                        position: i,
                        expected: "a name identifier after `'`".into(),
                    });
                }
                let mut j = start + 1;
                while j < bytes.len()
                    && ((bytes[j] as char).is_ascii_alphanumeric() || bytes[j] == b'_')
                {
                    j += 1;
                }
                toks.push((Tok::Name(text[start..j].to_string()), i));
                i = j;
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                let mut j = i + 1;
                while j < bytes.len()
                    && ((bytes[j] as char).is_ascii_alphanumeric() || bytes[j] == b'_')
                {
                    j += 1;
                }
                let word = &text[start..j];
                if word == "mu" {
                    toks.push((Tok::KwMu, start));
                } else {
                    toks.push((Tok::Ident(word.to_string()), start));
                }
                i = j;
            }
            _ => {
                return Err(ParseError::Syntax {
                    position: i,
                    expected: "a token".into(),
                })
            }
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn err<T>(&self, expected: &str) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            position: self.here(),
            expected: expected.to_string(),
        })
    }

    fn eat(&mut self, t: Tok, expected: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(expected)
        }
    }

    fn ident(&mut self) -> Result<Ident, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(Ident::new(s))
            }
            _ => self.err("an identifier"),
        }
    }

    fn name(&mut self) -> Result<NameId, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Name(s)) => {
                self.pos += 1;
                Ok(NameId::new(s))
            }
            _ => self.err("a name ('ident)"),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        // Leading abstraction forms extend maximally right.
        match self.peek() {
            Some(Tok::Backslash) => {
                self.pos += 1;
                let x = self.ident()?;
                self.eat(Tok::Dot, "`.`")?;
                let body = self.term()?;
                Ok(Term::Abs(x, Box::new(body)))
            }
            Some(Tok::KwMu) => {
                self.pos += 1;
                let a = self.name()?;
                self.eat(Tok::Dot, "`.`")?;
                let c = self.command()?;
                Ok(Term::Mu(a, Box::new(c)))
            }
            _ => self.appterm(),
        }
    }

    fn appterm(&mut self) -> Result<Term, ParseError> {
        let mut t = self.atom()?;
        // An argument may itself be a leading abstraction only when
        // parenthesized, so only identifiers and `(` start an argument.
        while let Some(Tok::Ident(_) | Tok::LParen) = self.peek() {
            let a = self.atom()?;
            t = Term::App(Box::new(t), Box::new(a));
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        let mut t = match self.peek().cloned() {
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Term::Var(Ident::new(s))
            }
            Some(Tok::Backslash) | Some(Tok::KwMu) => self.term()?,
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.term()?;
                self.eat(Tok::RParen, "`)`")?;
                inner
            }
            _ => return self.err("a term"),
        };
        // Explicit-substitution postfix: `[` IDENT `:=` term `]`.
        while self.peek() == Some(&Tok::LBracket) && matches!(self.peek2(), Some(Tok::Ident(_))) {
            self.pos += 1;
            let x = self.ident()?;
            self.eat(Tok::Assign, "`:=`")?;
            let u = self.term()?;
            self.eat(Tok::RBracket, "`]`")?;
            let ua = analyze(&Object::Term(u.clone()));
            if ua.fv.contains(&x) {
                return Err(ParseError::Invariant(format!(
                    "explicit substitution binds `{x}` which occurs free in its argument"
                )));
            }
            t = Term::ESub(Box::new(t), x, Box::new(u));
        }
        Ok(t)
    }

    fn command(&mut self) -> Result<Command, ParseError> {
        match self.peek() {
            Some(Tok::LBracket) => {
                self.pos += 1;
                let a = self.name()?;
                self.eat(Tok::RBracket, "`]`")?;
                let t = self.term()?;
                Ok(Command::Named(a, Box::new(t)))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let mut c = self.command()?;
                self.eat(Tok::RParen, "`)`")?;
                while self.peek() == Some(&Tok::LBracket)
                    && matches!(self.peek2(), Some(Tok::Name(_)))
                {
                    self.pos += 1;
                    let a = self.name()?;
                    match self.peek() {
                        Some(Tok::Assign) => {
                            self.pos += 1;
                            let s = self.stack()?;
                            self.eat(Tok::Gt, "`>`")?;
                            let out = self.name()?;
                            self.eat(Tok::RBracket, "`]`")?;
                            let sa = analyze(&Object::Stack(s.clone()));
                            if sa.fn_.contains(&a) {
                                return Err(ParseError::Invariant(format!(
                                    "explicit replacement binds {a} which occurs free in its stack"
                                )));
                            }
                            if a == out {
                                return Err(ParseError::Invariant(format!(
                                    "explicit replacement binds {a} equal to its output name"
                                )));
                            }
                            c = Command::ERepl(Box::new(c), a, s, out);
                        }
                        Some(Tok::Arrow) => {
                            self.pos += 1;
                            let b = self.name()?;
                            self.eat(Tok::RBracket, "`]`")?;
                            if a == b {
                                return Err(ParseError::Invariant(format!(
                                    "explicit renaming binds {a} equal to its target"
                                )));
                            }
                            c = Command::ERen(Box::new(c), a, b);
                        }
                        _ => return self.err("`:=` or `~>`"),
                    }
                }
                Ok(c)
            }
            _ => self.err("a command (`['a] t` or `(c)[…]`)"),
        }
    }

    fn stack(&mut self) -> Result<Stack, ParseError> {
        let mut items = vec![self.term()?];
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            items.push(self.term()?);
        }
        Ok(Stack::new(items))
    }

    fn at_end(&self) -> bool {
        self.pos == self.toks.len()
    }
}

fn parse_at(text: &str, sort: Sort) -> Result<Object, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let o = match sort {
        Sort::Term => Object::Term(p.term()?),
        Sort::Command => Object::Command(p.command()?),
        Sort::Stack => Object::Stack(p.stack()?),
    };
    if p.at_end() {
        Ok(o)
    } else {
        p.err("end of input")
    }
}

/// Parses `text` at the requested sort.
///
/// When the text fails at the requested sort but succeeds at another, a
/// [`ParseError::Sort`] is reported (e.g. `mu 'a. ['a] x` is a term, not a
/// command).  Invariant violations in literal input (an explicit replacement
/// whose bound name occurs in its stack, a renaming with equal names, a
/// substitution whose binder occurs in its argument) are rejected rather
/// than repaired.
pub fn parse(text: &str, sort: Sort) -> Result<Object, ParseError> {
    match parse_at(text, sort) {
        Ok(o) => Ok(o),
        Err(e @ ParseError::Invariant(_)) => Err(e),
        Err(e) => {
            for other in [Sort::Term, Sort::Command, Sort::Stack] {
                if other != sort && parse_at(text, other).is_ok() {
                    return Err(ParseError::Sort {
                        requested: sort,
                        found: other,
                    });
                }
            }
            Err(e)
        }
    }
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

/// Renders an object with minimal parentheses; the output re-parses to an
/// α-equivalent (in fact equal) object.
pub fn render(o: &Object) -> String {
    match o {
        Object::Term(t) => render_term(t, 0),
        Object::Command(c) => render_command(c),
        Object::Stack(s) => render_stack(s),
    }
}

// prec: 0 = top (abstractions bare), 1 = function position, 2 = argument.
fn render_term(t: &Term, prec: u8) -> String {
    match t {
        Term::Var(x) => x.to_string(),
        Term::App(f, a) => {
            let s = format!("{} {}", render_term(f, 1), render_term(a, 2));
            if prec >= 2 {
                format!("({s})")
            } else {
                s
            }
        }
        Term::Abs(x, b) => {
            let s = format!("\\{x}. {}", render_term(b, 0));
            if prec >= 1 {
                format!("({s})")
            } else {
                s
            }
        }
        Term::Mu(a, c) => {
            let s = format!("mu {a}. {}", render_command(c));
            if prec >= 1 {
                format!("({s})")
            } else {
                s
            }
        }
        Term::ESub(b, x, u) => {
            format!("{}[{x} := {}]", render_term(b, 2), render_term(u, 0))
        }
    }
}

fn render_command(c: &Command) -> String {
    match c {
        Command::Named(a, t) => format!("[{a}] {}", render_term(t, 0)),
        Command::ERepl(b, a, s, out) => {
            format!("{}[{a} := {} > {out}]", render_command_operand(b), render_stack(s))
        }
        Command::ERen(b, a, tgt) => {
            format!("{}[{a} ~> {tgt}]", render_command_operand(b))
        }
    }
}

// A postfix operand must be parenthesized unless it is itself a postfix
// chain (which already starts with a parenthesized command).
fn render_command_operand(c: &Command) -> String {
    match c {
        Command::Named(..) => format!("({})", render_command(c)),
        _ => render_command(c),
    }
}

fn render_stack(s: &Stack) -> String {
    s.items()
        .iter()
        .map(|t| render_term(t, 0))
        .collect::<Vec<_>>()
        .join(", ")
}

// ---------------------------------------------------------------------------
// JSON export
// ---------------------------------------------------------------------------

/// Exports the AST as JSON: each node `{"k": <constructor>, …fields}`,
/// variables as `{"var": "x"}`, names as `{"name": "a"}`.
pub fn to_json(o: &Object) -> Value {
    match o {
        Object::Term(t) => term_json(t),
        Object::Command(c) => command_json(c),
        Object::Stack(s) => stack_json(s),
    }
}

fn var_json(x: &Ident) -> Value {
    json!({ "var": x.0 })
}

fn name_json(a: &NameId) -> Value {
    json!({ "name": a.0 })
}

fn term_json(t: &Term) -> Value {
    match t {
        Term::Var(x) => json!({"k": "Var", "x": var_json(x)}),
        Term::App(f, a) => json!({"k": "App", "fun": term_json(f), "arg": term_json(a)}),
        Term::Abs(x, b) => json!({"k": "Abs", "x": var_json(x), "body": term_json(b)}),
        Term::Mu(a, c) => json!({"k": "Mu", "a": name_json(a), "body": command_json(c)}),
        Term::ESub(b, x, u) => {
            json!({"k": "ESub", "body": term_json(b), "x": var_json(x), "arg": term_json(u)})
        }
    }
}

fn command_json(c: &Command) -> Value {
    match c {
        Command::Named(a, t) => json!({"k": "Named", "a": name_json(a), "t": term_json(t)}),
        Command::ERepl(b, a, s, out) => json!({
            "k": "ERepl", "body": command_json(b), "a": name_json(a),
            "s": stack_json(s), "out": name_json(out)
        }),
        Command::ERen(b, a, t) => {
            json!({"k": "ERen", "body": command_json(b), "a": name_json(a), "b": name_json(t)})
        }
    }
}

fn stack_json(s: &Stack) -> Value {
    json!({"k": "Stack", "items": s.items().iter().map(term_json).collect::<Vec<_>>()})
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
