//! The rewrite rules of the calculus and their plain/meaningful split.
//!
//! Eleven rules are implemented, closed under arbitrary contexts:
//!
//! * `dB` — `L[\x.t] u ↦ L[t[x := u]]`,
//! * `S`  — `t[x := u] ↦ t{x := u}` (fire the substitution),
//! * `dM` — `L[mu 'a.c] u ↦ L[mu 'b. c['a := u > 'b]]`, `'b` fresh,
//! * `N`, `C`, `W` — a replacement `c['a := s > 'b]` whose bound name has a
//!   *unique* occurrence sitting under a linear context acts there in place:
//!   at a named term (`N`), at the output of an inner replacement (`C`), or
//!   at the target of an inner renaming (`W`);
//! * `Nnl`, `Cnl`, `Wnl` — the same three patterns when the unique
//!   occurrence sits under a *non-linear* context (inside an application or
//!   substitution argument, or a stack);
//! * `Rnl` — a replacement whose bound name has `≠ 1` occurrences fires the
//!   implicit replacement wholesale.
//!
//! The plain subsystem `{dB, dM, N, C, W}` terminates (witnessed by the
//! polynomial weight measure [`plain_weight`]) and is confluent; its unique
//! normal forms are computed by [`plain_normal_form`].  The meaningful
//! relation steps with `{S, Rnl, Nnl, Cnl, Wnl}` and renormalizes, see
//! [`meaningful_steps`].  The two reference λμ rules (`Beta`, `MuLM`) are
//! provided for comparison on explicit-operator-free objects.

use serde_json::{json, Value};
use thiserror::Error;

use crate::meta::{apply_stack, replace_tracked, substitute};
use crate::syntax::{
    analyze, positions, render, replace_at, subobject, Command, NameId, Object, Stack, Term,
};

// ---------------------------------------------------------------------------
// Rule tags and steps
// ---------------------------------------------------------------------------

/// Tag of a reduction rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleTag {
    /// β at a distance: `L[\x.t] u ↦ L[t[x := u]]`.
    DB,
    /// Substitution: `t[x := u] ↦ t{x := u}`.
    S,
    /// μ at a distance: `L[mu 'a.c] u ↦ L[mu 'b. c['a := u > 'b]]`.
    DM,
    /// Linear replacement at a named term.
    N,
    /// Linear replacement composing with an inner replacement.
    C,
    /// Linear replacement commuting with an inner renaming.
    W,
    /// Non-linear variant of `N`.
    Nnl,
    /// Non-linear variant of `C`.
    Cnl,
    /// Non-linear variant of `W`.
    Wnl,
    /// Wholesale replacement when the occurrence count differs from 1.
    Rnl,
    /// λμ reference rule: `(\x.t) u ↦ t{x := u}`.
    Beta,
    /// λμ reference rule: `(mu 'a.c) u ↦ mu 'b. ⟨'b := 'a·u⟩c`.
    MuLM,
}

impl RuleTag {
    /// The plain (multiplicative) rules `{dB, dM, N, C, W}`.
    pub fn is_plain(self) -> bool {
        matches!(self, RuleTag::DB | RuleTag::DM | RuleTag::N | RuleTag::C | RuleTag::W)
    }

    /// The meaningful (exponential) rules `{S, Rnl, Nnl, Cnl, Wnl}`.
    pub fn is_meaningful(self) -> bool {
        matches!(
            self,
            RuleTag::S | RuleTag::Rnl | RuleTag::Nnl | RuleTag::Cnl | RuleTag::Wnl
        )
    }

    /// The λμ-only reference rules.
    pub fn is_lmu(self) -> bool {
        matches!(self, RuleTag::Beta | RuleTag::MuLM)
    }

    /// All eleven ΛM rules.
    pub fn all_lm() -> [RuleTag; 10] {
        [
            RuleTag::DB,
            RuleTag::S,
            RuleTag::DM,
            RuleTag::N,
            RuleTag::C,
            RuleTag::W,
            RuleTag::Nnl,
            RuleTag::Cnl,
            RuleTag::Wnl,
            RuleTag::Rnl,
        ]
    }

    /// The plain rules.
    pub fn plain() -> [RuleTag; 5] {
        [RuleTag::DB, RuleTag::DM, RuleTag::N, RuleTag::C, RuleTag::W]
    }

    /// The meaningful rules.
    pub fn meaningful() -> [RuleTag; 5] {
        [RuleTag::S, RuleTag::Rnl, RuleTag::Nnl, RuleTag::Cnl, RuleTag::Wnl]
    }
}

impl std::fmt::Display for RuleTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RuleTag::DB => "dB",
            RuleTag::S => "S",
            RuleTag::DM => "dM",
            RuleTag::N => "N",
            RuleTag::C => "C",
            RuleTag::W => "W",
            RuleTag::Nnl => "Nnl",
            RuleTag::Cnl => "Cnl",
            RuleTag::Wnl => "Wnl",
            RuleTag::Rnl => "Rnl",
            RuleTag::Beta => "beta",
            RuleTag::MuLM => "mu",
        };
        write!(f, "{s}")
    }
}

/// One reduction event.
#[derive(Debug, Clone)]
pub struct Step {
    /// The rule that fired.
    pub rule: RuleTag,
    /// Position of the rewritten sub-object (child indices from the root).
    pub path: Vec<usize>,
    /// The whole object before the step.
    pub before: Object,
    /// The whole object after the step.
    pub after: Object,
    /// Fresh names introduced by the step (dM, Wnl, and blocked renamings
    /// inside Rnl).
    pub fresh: Vec<NameId>,
}

impl Step {
    /// JSON trace entry `{rule, path, before, after, fresh}` with objects in
    /// text syntax.
    pub fn to_json(&self) -> Value {
        json!({
            "rule": self.rule.to_string(),
            "path": self.path,
            "before": render(&self.before),
            "after": render(&self.after),
            "fresh": self.fresh.iter().map(|n| n.to_string()).collect::<Vec<_>>(),
        })
    }
}

/// Errors of this module.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReductionError {
    /// [`meaningful_steps`] requires its input to be a plain normal form.
    #[error("object is not a plain normal form (a {0} redex remains)")]
    NotPlainForm(String),
    /// [`lmu_steps`] requires a pure λμ object (no explicit operators).
    #[error("object contains explicit operators; not a λμ object")]
    NotLambdaMu,
}

// ---------------------------------------------------------------------------
// Linear-context classification
// ---------------------------------------------------------------------------

/// Kind of the unique occurrence site of a replaced name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiteKind {
    /// The occurrence names a term: `['a] t`.
    Name,
    /// The occurrence is the output of an inner explicit replacement.
    Comp,
    /// The occurrence is the target of an inner explicit renaming.
    Swap,
}

/// Linearity classification of an explicit replacement's body with respect
/// to its bound name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinearityClass {
    /// The bound name has `≠ 1` free occurrences; rule `Rnl` applies.
    NonLinearCount,
    /// Unique occurrence under a linear context (the hole of the context
    /// never sits inside an application/substitution argument or a stack).
    Linear {
        /// Site kind, determining which of `N`/`C`/`W` applies.
        kind: SiteKind,
        /// Path from the replacement body to the occurrence site.
        focus: Vec<usize>,
    },
    /// Unique occurrence under a non-linear context; `Nnl`/`Cnl`/`Wnl`.
    NonLinear {
        /// Site kind, determining which of `Nnl`/`Cnl`/`Wnl` applies.
        kind: SiteKind,
        /// Path from the replacement body to the occurrence site.
        focus: Vec<usize>,
    },
}

/// Classifies the body `c` of an explicit replacement binding `'a`.
pub fn classify_replacement(c: &Command, a: &NameId) -> LinearityClass {
    if analyze(&Object::Command(c.clone())).count(a) != 1 {
        return LinearityClass::NonLinearCount;
    }
    let (focus, kind, linear) =
        locate_c(c, a, true).expect("count is 1, so the occurrence exists");
    if linear {
        LinearityClass::Linear { kind, focus }
    } else {
        LinearityClass::NonLinear { kind, focus }
    }
}

// Finds the unique free occurrence of `a`, returning its path, site kind,
// and whether every context edge from the root down to the site is linear.
fn locate_c(c: &Command, a: &NameId, linear: bool) -> Option<(Vec<usize>, SiteKind, bool)> {
    match c {
        Command::Named(n, t) => {
            if n == a {
                return Some((Vec::new(), SiteKind::Name, linear));
            }
            locate_t(t, a, linear).map(|(mut p, k, l)| {
                p.insert(0, 0);
                (p, k, l)
            })
        }
        Command::ERepl(b, g, s, out) => {
            if out == a {
                return Some((Vec::new(), SiteKind::Comp, linear));
            }
            if g != a {
                if let Some((mut p, k, l)) = locate_c(b, a, linear) {
                    p.insert(0, 0);
                    return Some((p, k, l));
                }
            }
            // Stack positions are never linear.
            for (i, t) in s.items().iter().enumerate() {
                if let Some((mut p, k, _)) = locate_t(t, a, false) {
                    p.insert(0, i);
                    p.insert(0, 1);
                    return Some((p, k, false));
                }
            }
            None
        }
        Command::ERen(b, g, tgt) => {
            if tgt == a {
                return Some((Vec::new(), SiteKind::Swap, linear));
            }
            if g != a {
                if let Some((mut p, k, l)) = locate_c(b, a, linear) {
                    p.insert(0, 0);
                    return Some((p, k, l));
                }
            }
            None
        }
    }
}

fn locate_t(t: &Term, a: &NameId, linear: bool) -> Option<(Vec<usize>, SiteKind, bool)> {
    match t {
        Term::Var(_) => None,
        Term::App(f, arg) => {
            if let Some((mut p, k, l)) = locate_t(f, a, linear) {
                p.insert(0, 0);
                return Some((p, k, l));
            }
            // Application arguments are non-linear positions.
            locate_t(arg, a, false).map(|(mut p, k, _)| {
                p.insert(0, 1);
                (p, k, false)
            })
        }
        Term::Abs(_, b) => locate_t(b, a, linear).map(|(mut p, k, l)| {
            p.insert(0, 0);
            (p, k, l)
        }),
        Term::Mu(g, c) => {
            if g == a {
                return None;
            }
            locate_c(c, a, linear).map(|(mut p, k, l)| {
                p.insert(0, 0);
                (p, k, l)
            })
        }
        Term::ESub(b, _, u) => {
            if let Some((mut p, k, l)) = locate_t(b, a, linear) {
                p.insert(0, 0);
                return Some((p, k, l));
            }
            // Substitution arguments are non-linear positions.
            locate_t(u, a, false).map(|(mut p, k, _)| {
                p.insert(0, 1);
                (p, k, false)
            })
        }
    }
}

// ---------------------------------------------------------------------------
// Step enumeration
// ---------------------------------------------------------------------------

/// Enumerates every redex of every requested rule, in leftmost-outermost
/// order, each with the full rewritten object.
pub fn steps(o: &Object, rules: &[RuleTag]) -> Vec<Step> {
    let mut out = Vec::new();
    for path in positions(o) {
        let sub = subobject(o, &path).expect("position is valid");
        for &rule in rules {
            if let Some((after_sub, fresh)) = try_rule(o, &sub, rule) {
                out.push(Step {
                    rule,
                    path: path.clone(),
                    before: o.clone(),
                    after: replace_at(o, &path, after_sub),
                    fresh,
                });
            }
        }
    }
    out
}

// Attempts to fire `rule` at the root of `sub`; `ambient` provides the
// identifier pool for fresh names.
fn try_rule(ambient: &Object, sub: &Object, rule: RuleTag) -> Option<(Object, Vec<NameId>)> {
    match rule {
        RuleTag::DB => try_db(sub),
        RuleTag::S => try_s(sub),
        RuleTag::DM => try_dm(ambient, sub),
        RuleTag::N | RuleTag::C | RuleTag::W | RuleTag::Nnl | RuleTag::Cnl | RuleTag::Wnl
        | RuleTag::Rnl => try_repl_rule(ambient, sub, rule),
        RuleTag::Beta => try_beta(sub),
        RuleTag::MuLM => try_mu_lm(ambient, sub),
    }
}

// Splits a term into its explicit-substitution spine (the L context) and
// its core: `t = core[x1:=u1]…[xk:=uk]`, outermost last.
fn split_spine(t: &Term) -> (Vec<(crate::syntax::Ident, Term)>, Term) {
    let mut spine = Vec::new();
    let mut cur = t.clone();
    while let Term::ESub(b, x, u) = cur {
        spine.push((x, (*u).clone()));
        cur = *b;
    }
    spine.reverse(); // innermost first
    (spine, cur)
}

fn rewrap_spine(core: Term, spine: &[(crate::syntax::Ident, Term)]) -> Term {
    let mut cur = core;
    for (x, u) in spine {
        cur = Term::ESub(Box::new(cur), x.clone(), Box::new(u.clone()));
    }
    cur
}

fn try_db(sub: &Object) -> Option<(Object, Vec<NameId>)> {
    let t = sub.as_term()?;
    let Term::App(f, u) = t else { return None };
    let (spine, core) = split_spine(f);
    let Term::Abs(x, body) = core else { return None };
    // Pull the argument under the spine, refreshing clashing binders.
    let (spine, x, body) = pull_under_spine(spine, x, *body, u);
    let inner = crate::syntax::esub(body, x, (**u).clone());
    Some((Object::Term(rewrap_spine(inner, &spine)), Vec::new()))
}

// Renames spine binders (and the core binder, handled by the smart
// constructor later) clashing with fv(u), so that u can move inside.
fn pull_under_spine(
    spine: Vec<(crate::syntax::Ident, Term)>,
    x: crate::syntax::Ident,
    body: Term,
    u: &Term,
) -> (Vec<(crate::syntax::Ident, Term)>, crate::syntax::Ident, Term) {
    use crate::syntax::rename_free_var_term;
    let ua = analyze(&Object::Term(u.clone()));
    if spine.iter().all(|(v, _)| !ua.fv.contains(v)) {
        return (spine, x, body);
    }
    let mut pool = crate::meta::Pool::of(&[&Object::Term(u.clone())]);
    for (v, arg) in &spine {
        pool.reserve_var(v);
        let (av, _) = crate::syntax::all_idents(&Object::Term(arg.clone()));
        for s in av {
            pool.reserve_var(&crate::syntax::Ident(s));
        }
    }
    let (bv, _) = crate::syntax::all_idents(&Object::Term(body.clone()));
    for s in bv {
        pool.reserve_var(&crate::syntax::Ident(s));
    }
    pool.reserve_var(&x);
    // entries[0] is innermost; binder i scopes the core body and the bodies
    // of entries 0..i — but *not* their substitution arguments.
    let mut spine = spine;
    let mut body = body;
    for i in 0..spine.len() {
        let (v, _) = spine[i].clone();
        if ua.fv.contains(&v) {
            let v2 = pool.fresh_var(&v.0);
            body = rename_free_var_term(&body, &v, &v2);
            for entry in spine.iter_mut().take(i) {
                entry.1 = entry.1.clone(); // arguments unaffected
                // bodies of inner entries are part of `body` reconstruction;
                // since we keep the spine flat, renaming the shared body and
                // inner arguments is done on the wrapped form below.
            }
            // The flat representation stores arguments separately; the body
            // of entry j (< i) is the wrapped (core + entries < j), which we
            // maintain solely through `body`; arguments of entries < i are
            // *outside* binder i's scope? No: t = core[x0:=u0]…[xk:=uk];
            // binder i scopes core[x0:=u0]…[x_{i-1}:=u_{i-1}], which
            // includes the inner arguments u_j for j < i.
            for entry in spine.iter_mut().take(i) {
                entry.1 = rename_free_var_term(&entry.1, &v, &v2);
            }
            spine[i].0 = v2;
        }
    }
    (spine, x, body)
}

fn try_s(sub: &Object) -> Option<(Object, Vec<NameId>)> {
    let t = sub.as_term()?;
    let Term::ESub(b, x, u) = t else { return None };
    Some((substitute(&Object::Term((**b).clone()), x, u), Vec::new()))
}

fn try_dm(ambient: &Object, sub: &Object) -> Option<(Object, Vec<NameId>)> {
    let t = sub.as_term()?;
    let Term::App(f, u) = t else { return None };
    let (spine, core) = split_spine(f);
    let Term::Mu(a, c) = core else { return None };
    let (spine, _, muterm) = pull_under_spine(spine, crate::syntax::Ident::new("_"), Term::Mu(a, c), u);
    let Term::Mu(a, c) = muterm else { unreachable!() };
    // Fresh output name, derived from 'a, avoiding the whole ambient object.
    let mut pool = crate::meta::Pool::of(&[ambient, &Object::Term((**u).clone())]);
    pool.reserve_name(&a);
    let aprime = pool.fresh_name(&a.0);
    // The bound 'a must avoid fn(u); the smart constructor refreshes if not.
    let inner = crate::syntax::erepl((*c).clone(), a, Stack::new(vec![(**u).clone()]), aprime.clone());
    let res = rewrap_spine(Term::Mu(aprime.clone(), Box::new(inner)), &spine);
    Some((Object::Term(res), vec![aprime]))
}

fn try_repl_rule(ambient: &Object, sub: &Object, rule: RuleTag) -> Option<(Object, Vec<NameId>)> {
    let cmd = sub.as_command()?;
    let Command::ERepl(body, a, s, out) = cmd else { return None };
    let class = classify_replacement(body, a);
    match (&class, rule) {
        (LinearityClass::NonLinearCount, RuleTag::Rnl) => {
            let (res, fresh) = replace_tracked(&Object::Command((**body).clone()), a, s, out);
            Some((res, fresh))
        }
        (LinearityClass::Linear { kind, focus }, RuleTag::N | RuleTag::C | RuleTag::W) => {
            let want = match rule {
                RuleTag::N => SiteKind::Name,
                RuleTag::C => SiteKind::Comp,
                _ => SiteKind::Swap,
            };
            if *kind != want {
                return None;
            }
            Some(fire_repl_at_site(ambient, body, a, s, out, focus, *kind, false))
        }
        (LinearityClass::NonLinear { kind, focus }, RuleTag::Nnl | RuleTag::Cnl | RuleTag::Wnl) => {
            let want = match rule {
                RuleTag::Nnl => SiteKind::Name,
                RuleTag::Cnl => SiteKind::Comp,
                _ => SiteKind::Swap,
            };
            if *kind != want {
                return None;
            }
            Some(fire_repl_at_site(ambient, body, a, s, out, focus, *kind, true))
        }
        _ => None,
    }
}

// Rewrites the unique occurrence site of `a` inside `body`, consuming the
// outer replacement `['a := s > 'out]`.
#[allow(clippy::too_many_arguments)]
fn fire_repl_at_site(
    ambient: &Object,
    body: &Command,
    a: &NameId,
    s: &Stack,
    out: &NameId,
    focus: &[usize],
    kind: SiteKind,
    nonlinear: bool,
) -> (Object, Vec<NameId>) {
    // Refresh binders of the body against the identifiers being moved in,
    // so the stack and output name cannot be captured at the site.
    let so = Object::Stack(s.clone());
    let sa = analyze(&so);
    let avoid_vars: std::collections::HashSet<String> =
        sa.fv.iter().map(|v| v.0.clone()).collect();
    let mut avoid_names: std::collections::HashSet<String> =
        sa.fn_.iter().map(|n| n.0.clone()).collect();
    avoid_names.insert(out.0.clone());
    let mut pool = crate::meta::Pool::of(&[ambient, &so]);
    pool.reserve_name(a);
    pool.reserve_name(out);
    let body_o = crate::meta::refresh_binders(
        &Object::Command(body.clone()),
        &avoid_vars,
        &avoid_names,
        &mut pool,
    );
    let site = subobject(&body_o, focus).expect("classified focus is valid");
    let site_cmd = site.as_command().expect("site is a command").clone();
    let mut fresh = Vec::new();
    let new_site = match (kind, site_cmd) {
        (SiteKind::Name, Command::Named(n, t)) => {
            debug_assert_eq!(&n, a);
            Command::Named(out.clone(), Box::new(apply_stack(&t, s)))
        }
        (SiteKind::Comp, Command::ERepl(c2, b, s2, o2)) => {
            debug_assert_eq!(&o2, a);
            Command::ERepl(c2, b, s2.concat(s), out.clone())
        }
        (SiteKind::Swap, Command::ERen(c2, b, tgt)) => {
            debug_assert_eq!(&tgt, a);
            let mid = if nonlinear {
                let g = pool.fresh_name(&a.0);
                fresh.push(g.clone());
                g
            } else {
                // Rule W reuses 'a (its unique occurrence is consumed here).
                a.clone()
            };
            Command::ERen(
                Box::new(Command::ERepl(c2, b, s.clone(), mid.clone())),
                mid,
                out.clone(),
            )
        }
        (k, c) => unreachable!("site kind {k:?} does not match site {c:?}"),
    };
    (replace_at(&body_o, focus, Object::Command(new_site)), fresh)
}

fn try_beta(sub: &Object) -> Option<(Object, Vec<NameId>)> {
    let t = sub.as_term()?;
    let Term::App(f, u) = t else { return None };
    let Term::Abs(x, body) = &**f else { return None };
    Some((substitute(&Object::Term((**body).clone()), x, u), Vec::new()))
}

fn try_mu_lm(ambient: &Object, sub: &Object) -> Option<(Object, Vec<NameId>)> {
    let t = sub.as_term()?;
    let Term::App(f, u) = t else { return None };
    let Term::Mu(a, c) = &**f else { return None };
    let mut pool = crate::meta::Pool::of(&[ambient]);
    pool.reserve_name(a);
    let aprime = pool.fresh_name(&a.0);
    let (res, mut fresh) = replace_tracked(
        &Object::Command((**c).clone()),
        a,
        &Stack::new(vec![(**u).clone()]),
        &aprime,
    );
    let cmd = res.as_command().expect("replace preserves sort").clone();
    fresh.insert(0, aprime.clone());
    Some((Object::Term(Term::Mu(aprime, Box::new(cmd))), fresh))
}

// ---------------------------------------------------------------------------
// Plain normal forms, meaningful steps, λμ steps
// ---------------------------------------------------------------------------

/// The unique normal form of `o` under the plain rules `{dB, dM, N, C, W}`
/// (written `fcan` in the library's documentation), computed by repeated
/// leftmost-outermost contraction.
pub fn plain_normal_form(o: &Object) -> Object {
    let mut cur = o.clone();
    loop {
        match first_step(&cur, &RuleTag::plain()) {
            Some(st) => cur = st.after,
            None => return cur,
        }
    }
}

// Like steps() but stops at the first redex found.
fn first_step(o: &Object, rules: &[RuleTag]) -> Option<Step> {
    for path in positions(o) {
        let sub = subobject(o, &path).expect("position is valid");
        for &rule in rules {
            if let Some((after_sub, fresh)) = try_rule(o, &sub, rule) {
                let after = replace_at(o, &path, after_sub);
                return Some(Step {
                    rule,
                    path,
                    before: o.clone(),
                    after,
                    fresh,
                });
            }
        }
    }
    None
}

/// The meaningful steps out of a plain normal form: each `{S, Rnl, Nnl,
/// Cnl, Wnl}` redex fired and the result renormalized with
/// [`plain_normal_form`].
pub fn meaningful_steps(o: &Object) -> Result<Vec<Step>, ReductionError> {
    if let Some(st) = first_step(o, &RuleTag::plain()) {
        return Err(ReductionError::NotPlainForm(st.rule.to_string()));
    }
    Ok(steps(o, &RuleTag::meaningful())
        .into_iter()
        .map(|mut st| {
            st.after = plain_normal_form(&st.after);
            st
        })
        .collect())
}

/// Whether `o` contains no explicit operators (is a pure λμ object).
pub fn is_lambda_mu(o: &Object) -> bool {
    positions(o).iter().all(|p| {
        let sub = subobject(o, p).unwrap();
        !matches!(
            sub,
            Object::Term(Term::ESub(..))
                | Object::Command(Command::ERepl(..))
                | Object::Command(Command::ERen(..))
        )
    })
}

/// The reference λμ steps (β and μ with implicit replacement) of a pure λμ
/// object.
pub fn lmu_steps(o: &Object) -> Result<Vec<Step>, ReductionError> {
    if !is_lambda_mu(o) {
        return Err(ReductionError::NotLambdaMu);
    }
    Ok(steps(o, &[RuleTag::Beta, RuleTag::MuLM]))
}

// ---------------------------------------------------------------------------
// Weight measure
// ---------------------------------------------------------------------------

/// The polynomial termination measure for the plain subsystem:
/// `⟦x⟧ = 3`, `⟦t u⟧ = ⟦t⟧·⟦u⟧`, `⟦\x.t⟧ = ⟦t⟧`, `⟦mu 'a.c⟧ = ⟦c⟧+1`,
/// `⟦t[x:=u]⟧ = ⟦t⟧+⟦u⟧`, `⟦['a]t⟧ = ⟦t⟧`, `⟦c['a:=s>'b]⟧ = ⟦c⟧·⟦s⟧+1`,
/// `⟦c['a~>'b]⟧ = ⟦c⟧+1`, `⟦t·s⟧ = ⟦t⟧·⟦s⟧`.
///
/// Every plain step strictly decreases this weight.
pub fn plain_weight(o: &Object) -> u128 {
    match o {
        Object::Term(t) => weight_t(t),
        Object::Command(c) => weight_c(c),
        Object::Stack(s) => weight_s(s),
    }
}

fn weight_t(t: &Term) -> u128 {
    match t {
        Term::Var(_) => 3,
        Term::App(f, a) => weight_t(f) * weight_t(a),
        Term::Abs(_, b) => weight_t(b),
        Term::Mu(_, c) => weight_c(c) + 1,
        Term::ESub(b, _, u) => weight_t(b) + weight_t(u),
    }
}

fn weight_c(c: &Command) -> u128 {
    match c {
        Command::Named(_, t) => weight_t(t),
        Command::ERepl(b, _, s, _) => weight_c(b) * weight_s(s) + 1,
        Command::ERen(b, _, _) => weight_c(b) + 1,
    }
}

fn weight_s(s: &Stack) -> u128 {
    s.items().iter().map(weight_t).product()
}
