//! The implicit (meta-level) operations of the calculus: capture-avoiding
//! substitution `o{x := u}`, implicit replacement `⟨'b := 'a·s⟩ o`, implicit
//! renaming `o⟨'a := 'b⟩`, and the stack-application abbreviation `t @ s`.
//!
//! All three operations are total: before recursing, the target object is
//! α-refreshed so that its binders clash neither with the operation's
//! parameters nor with the free identifiers being moved under them.  This
//! realizes the side conditions of the defining tables (`γ ∉ s`, `γ ≠ α'`,
//! …) uniformly.

use std::collections::HashSet;

use crate::syntax::{
    all_idents, analyze, fresh_ident, rename_free_name_command, rename_free_name_term,
    rename_free_var_term, Command, Ident, NameId, Object, Stack, Term,
};

// ---------------------------------------------------------------------------
// Binder refreshing
// ---------------------------------------------------------------------------

/// Mutable pool of identifiers already in use, for drawing fresh ones.
pub(crate) struct Pool {
    vars: HashSet<String>,
    names: HashSet<String>,
}

impl Pool {
    pub(crate) fn of(objects: &[&Object]) -> Pool {
        let mut vars = HashSet::new();
        let mut names = HashSet::new();
        for o in objects {
            let (v, n) = all_idents(o);
            vars.extend(v);
            names.extend(n);
        }
        Pool { vars, names }
    }

    pub(crate) fn reserve_var(&mut self, x: &Ident) {
        self.vars.insert(x.0.clone());
    }

    pub(crate) fn reserve_name(&mut self, a: &NameId) {
        self.names.insert(a.0.clone());
    }

    pub(crate) fn fresh_var(&mut self, base: &str) -> Ident {
        let s = fresh_ident(base, &self.vars);
        self.vars.insert(s.clone());
        Ident(s)
    }

    pub(crate) fn fresh_name(&mut self, base: &str) -> NameId {
        let s = fresh_ident(base, &self.names);
        self.names.insert(s.clone());
        NameId(s)
    }
}

/// Renames every binder of `o` whose identifier lies in the given avoid
/// sets, drawing replacements from `pool`.  The result is α-equivalent
/// to `o`.
pub(crate) fn refresh_binders(
    o: &Object,
    avoid_vars: &HashSet<String>,
    avoid_names: &HashSet<String>,
    pool: &mut Pool,
) -> Object {
    match o {
        Object::Term(t) => Object::Term(refresh_t(t, avoid_vars, avoid_names, pool)),
        Object::Command(c) => Object::Command(refresh_c(c, avoid_vars, avoid_names, pool)),
        Object::Stack(s) => Object::Stack(Stack::new(
            s.items().iter().map(|t| refresh_t(t, avoid_vars, avoid_names, pool)).collect(),
        )),
    }
}

fn refresh_t(t: &Term, av: &HashSet<String>, an: &HashSet<String>, pool: &mut Pool) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::App(f, a) => Term::App(
            Box::new(refresh_t(f, av, an, pool)),
            Box::new(refresh_t(a, av, an, pool)),
        ),
        Term::Abs(x, b) => {
            let (x2, b2) = refresh_var_binder(x, b, av, pool);
            Term::Abs(x2, Box::new(refresh_t(&b2, av, an, pool)))
        }
        Term::Mu(a, c) => {
            let (a2, c2) = refresh_name_binder(a, c, an, pool);
            Term::Mu(a2, Box::new(refresh_c(&c2, av, an, pool)))
        }
        Term::ESub(b, x, u) => {
            let (x2, b2) = refresh_var_binder(x, b, av, pool);
            Term::ESub(
                Box::new(refresh_t(&b2, av, an, pool)),
                x2,
                Box::new(refresh_t(u, av, an, pool)),
            )
        }
    }
}

fn refresh_c(c: &Command, av: &HashSet<String>, an: &HashSet<String>, pool: &mut Pool) -> Command {
    match c {
        Command::Named(a, t) => Command::Named(a.clone(), Box::new(refresh_t(t, av, an, pool))),
        Command::ERepl(b, a, s, out) => {
            let (a2, b2) = refresh_name_binder_c(a, b, an, pool);
            Command::ERepl(
                Box::new(refresh_c(&b2, av, an, pool)),
                a2,
                Stack::new(s.items().iter().map(|t| refresh_t(t, av, an, pool)).collect()),
                out.clone(),
            )
        }
        Command::ERen(b, a, tgt) => {
            let (a2, b2) = refresh_name_binder_c(a, b, an, pool);
            Command::ERen(Box::new(refresh_c(&b2, av, an, pool)), a2, tgt.clone())
        }
    }
}

fn refresh_var_binder(
    x: &Ident,
    body: &Term,
    avoid: &HashSet<String>,
    pool: &mut Pool,
) -> (Ident, Term) {
    if avoid.contains(&x.0) {
        let x2 = pool.fresh_var(&x.0);
        (x2.clone(), rename_free_var_term(body, x, &x2))
    } else {
        (x.clone(), body.clone())
    }
}

fn refresh_name_binder(
    a: &NameId,
    body: &Command,
    avoid: &HashSet<String>,
    pool: &mut Pool,
) -> (NameId, Command) {
    refresh_name_binder_c(a, body, avoid, pool)
}

fn refresh_name_binder_c(
    a: &NameId,
    body: &Command,
    avoid: &HashSet<String>,
    pool: &mut Pool,
) -> (NameId, Command) {
    if avoid.contains(&a.0) {
        let a2 = pool.fresh_name(&a.0);
        (a2.clone(), rename_free_name_command(body, a, &a2))
    } else {
        (a.clone(), body.clone())
    }
}

// ---------------------------------------------------------------------------
// Substitution
// ---------------------------------------------------------------------------

/// Capture-avoiding substitution `o{x := u}`: replaces every free occurrence
/// of `x` in `o` by `u`, refreshing binders of `o` that would capture free
/// identifiers of `u`.  The sort of `o` is preserved.
pub fn substitute(o: &Object, x: &Ident, u: &Term) -> Object {
    let uo = Object::Term(u.clone());
    let ua = analyze(&uo);
    let mut avoid_vars: HashSet<String> = ua.fv.iter().map(|v| v.0.clone()).collect();
    avoid_vars.insert(x.0.clone());
    let avoid_names: HashSet<String> = ua.fn_.iter().map(|n| n.0.clone()).collect();
    let mut pool = Pool::of(&[o, &uo]);
    pool.reserve_var(x);
    let o2 = refresh_binders(o, &avoid_vars, &avoid_names, &mut pool);
    subst_obj(&o2, x, u)
}

fn subst_obj(o: &Object, x: &Ident, u: &Term) -> Object {
    match o {
        Object::Term(t) => Object::Term(subst_t(t, x, u)),
        Object::Command(c) => Object::Command(subst_c(c, x, u)),
        Object::Stack(s) => Object::Stack(Stack::new(
            s.items().iter().map(|t| subst_t(t, x, u)).collect(),
        )),
    }
}

fn subst_t(t: &Term, x: &Ident, u: &Term) -> Term {
    match t {
        Term::Var(v) if v == x => u.clone(),
        Term::Var(_) => t.clone(),
        Term::App(f, a) => Term::App(Box::new(subst_t(f, x, u)), Box::new(subst_t(a, x, u))),
        // After refreshing, binders never clash with x or fv(u)/fn(u).
        Term::Abs(v, b) => Term::Abs(v.clone(), Box::new(subst_t(b, x, u))),
        Term::Mu(a, c) => Term::Mu(a.clone(), Box::new(subst_c(c, x, u))),
        Term::ESub(b, v, arg) => Term::ESub(
            Box::new(subst_t(b, x, u)),
            v.clone(),
            Box::new(subst_t(arg, x, u)),
        ),
    }
}

fn subst_c(c: &Command, x: &Ident, u: &Term) -> Command {
    match c {
        Command::Named(a, t) => Command::Named(a.clone(), Box::new(subst_t(t, x, u))),
        Command::ERepl(b, a, s, out) => Command::ERepl(
            Box::new(subst_c(b, x, u)),
            a.clone(),
            Stack::new(s.items().iter().map(|t| subst_t(t, x, u)).collect()),
            out.clone(),
        ),
        Command::ERen(b, a, tgt) => {
            Command::ERen(Box::new(subst_c(b, x, u)), a.clone(), tgt.clone())
        }
    }
}

// ---------------------------------------------------------------------------
// Implicit replacement
// ---------------------------------------------------------------------------

/// Implicit replacement `⟨'out := 'a·s⟩ o`: every free subcommand `['a] t`
/// becomes `['out] ((⟨…⟩t) @ s)`; an explicit replacement whose output name
/// is `'a` absorbs `s` onto its stack and redirects to `'out`; an explicit
/// renaming targeting `'a` blocks, producing a fresh intermediate name.
///
/// Preconditions `'a ∉ fn(s)` and `'a ≠ 'out` are required of the caller
/// (the calculus' α-convention); binders of `o` are refreshed internally.
pub fn replace(o: &Object, a: &NameId, s: &Stack, out: &NameId) -> Object {
    replace_tracked(o, a, s, out).0
}

/// Like [`replace`], also returning the fresh names introduced by blocked
/// explicit renamings (in left-to-right order).
pub fn replace_tracked(o: &Object, a: &NameId, s: &Stack, out: &NameId) -> (Object, Vec<NameId>) {
    let so = Object::Stack(s.clone());
    let sa = analyze(&so);
    debug_assert!(!sa.fn_.contains(a), "replace: 'a must not occur in s");
    debug_assert!(a != out, "replace: 'a must differ from 'out");
    let avoid_vars: HashSet<String> = sa.fv.iter().map(|v| v.0.clone()).collect();
    let mut avoid_names: HashSet<String> = sa.fn_.iter().map(|n| n.0.clone()).collect();
    avoid_names.insert(a.0.clone());
    avoid_names.insert(out.0.clone());
    let mut pool = Pool::of(&[o, &so]);
    pool.reserve_name(a);
    pool.reserve_name(out);
    let o2 = refresh_binders(o, &avoid_vars, &avoid_names, &mut pool);
    let mut fresh = Vec::new();
    let res = match &o2 {
        Object::Term(t) => Object::Term(repl_t(t, a, s, out, &mut pool, &mut fresh)),
        Object::Command(c) => Object::Command(repl_c(c, a, s, out, &mut pool, &mut fresh)),
        Object::Stack(st) => Object::Stack(Stack::new(
            st.items()
                .iter()
                .map(|t| repl_t(t, a, s, out, &mut pool, &mut fresh))
                .collect(),
        )),
    };
    (res, fresh)
}

fn repl_t(
    t: &Term,
    a: &NameId,
    s: &Stack,
    out: &NameId,
    pool: &mut Pool,
    fresh: &mut Vec<NameId>,
) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::App(f, g) => Term::App(
            Box::new(repl_t(f, a, s, out, pool, fresh)),
            Box::new(repl_t(g, a, s, out, pool, fresh)),
        ),
        Term::Abs(x, b) => Term::Abs(x.clone(), Box::new(repl_t(b, a, s, out, pool, fresh))),
        Term::Mu(n, c) => Term::Mu(n.clone(), Box::new(repl_c(c, a, s, out, pool, fresh))),
        Term::ESub(b, x, u) => Term::ESub(
            Box::new(repl_t(b, a, s, out, pool, fresh)),
            x.clone(),
            Box::new(repl_t(u, a, s, out, pool, fresh)),
        ),
    }
}

fn repl_c(
    c: &Command,
    a: &NameId,
    s: &Stack,
    out: &NameId,
    pool: &mut Pool,
    fresh: &mut Vec<NameId>,
) -> Command {
    match c {
        Command::Named(n, t) if n == a => {
            let t2 = repl_t(t, a, s, out, pool, fresh);
            Command::Named(out.clone(), Box::new(apply_stack(&t2, s)))
        }
        Command::Named(n, t) => {
            Command::Named(n.clone(), Box::new(repl_t(t, a, s, out, pool, fresh)))
        }
        Command::ERepl(b, g, s2, o2) => {
            let nb = repl_c(b, a, s, out, pool, fresh);
            let ns2 = Stack::new(
                s2.items()
                    .iter()
                    .map(|t| repl_t(t, a, s, out, pool, fresh))
                    .collect(),
            );
            if o2 == a {
                // Absorbing case: append s and redirect the output to out.
                Command::ERepl(Box::new(nb), g.clone(), ns2.concat(s), out.clone())
            } else {
                Command::ERepl(Box::new(nb), g.clone(), ns2, o2.clone())
            }
        }
        Command::ERen(b, g, tgt) if tgt == a => {
            // Blocking case: introduce a fresh intermediate name.
            let beta = pool.fresh_name(&out.0);
            fresh.push(beta.clone());
            let nb = repl_c(b, a, s, out, pool, fresh);
            Command::ERen(
                Box::new(Command::ERepl(Box::new(nb), g.clone(), s.clone(), beta.clone())),
                beta,
                out.clone(),
            )
        }
        Command::ERen(b, g, tgt) => Command::ERen(
            Box::new(repl_c(b, a, s, out, pool, fresh)),
            g.clone(),
            tgt.clone(),
        ),
    }
}

// ---------------------------------------------------------------------------
// Implicit renaming
// ---------------------------------------------------------------------------

/// Implicit renaming `o⟨'a := 'b⟩`: redirects every free occurrence of `'a`
/// to `'b` (`['a]t ↦ ['b]t`, output names and renaming targets likewise),
/// refreshing binders of `o` equal to `'b` to avoid capture.
///
/// Precondition `'a ≠ 'b` is required of the caller.
pub fn rename_name(o: &Object, a: &NameId, b: &NameId) -> Object {
    debug_assert!(a != b, "rename_name: names must differ");
    let mut avoid_names = HashSet::new();
    avoid_names.insert(a.0.clone());
    avoid_names.insert(b.0.clone());
    let mut pool = Pool::of(&[o]);
    pool.reserve_name(a);
    pool.reserve_name(b);
    let o2 = refresh_binders(o, &HashSet::new(), &avoid_names, &mut pool);
    match &o2 {
        Object::Term(t) => Object::Term(rename_free_name_term(t, a, b)),
        Object::Command(c) => Object::Command(rename_free_name_command(c, a, b)),
        Object::Stack(s) => Object::Stack(Stack::new(
            s.items().iter().map(|t| rename_free_name_term(t, a, b)).collect(),
        )),
    }
}

// ---------------------------------------------------------------------------
// Stack application
// ---------------------------------------------------------------------------

/// The abbreviation `t @ s`: the left-nested application `t t1 … tn` for
/// `s = t1, …, tn`.  Associative: `(t @ s) @ s' = t @ (s ++ s')`.
pub fn apply_stack(t: &Term, s: &Stack) -> Term {
    let mut acc = t.clone();
    for item in s.items() {
        acc = Term::App(Box::new(acc), Box::new(item.clone()));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{alpha_equal, parse, Sort};

    fn t(s: &str) -> Object {
        parse(s, Sort::Term).unwrap()
    }

    fn c(s: &str) -> Object {
        parse(s, Sort::Command).unwrap()
    }

    fn stk(s: &str) -> Stack {
        match parse(s, Sort::Stack).unwrap() {
            Object::Stack(st) => st,
            _ => unreachable!(),
        }
    }

    fn term(s: &str) -> Term {
        t(s).as_term().unwrap().clone()
    }

    #[test]
    fn substitute_under_mu() {
        // Substituting `\w.w` for x in `(mu 'a.['a]x) (\z. z x)`.
        let o = t("(mu 'a.['a]x) (\\z. z x)");
        let r = substitute(&o, &Ident::new("x"), &term("\\w.w"));
        assert!(alpha_equal(&r, &t("(mu 'a.['a](\\w.w)) (\\z. z (\\w.w))")));
    }

    #[test]
    fn substitute_not_free_is_identity() {
        let o = t("y");
        let r = substitute(&o, &Ident::new("x"), &term("u"));
        assert!(alpha_equal(&r, &o));
    }

    #[test]
    fn substitute_capture_avoidance() {
        // `\y. x` with x := y must refresh the binder.
        let o = t("\\y. x");
        let r = substitute(&o, &Ident::new("x"), &term("y"));
        assert!(alpha_equal(&r, &t("\\y1. y")));
        // Rendered form indeed refreshes with a numeric suffix.
        assert_eq!(crate::syntax::render(&r), "\\y1. y");
    }

    #[test]
    fn replace_named_base_case() {
        // ⟨'g := 'a·(y0,y1)⟩(['a] x) = ['g] x y0 y1
        let o = c("['a] x");
        let r = replace(&o, &NameId::new("a"), &stk("y0, y1"), &NameId::new("g"));
        assert!(alpha_equal(&r, &c("['g] x y0 y1")));
    }

    #[test]
    fn replace_absorbing_explicit_replacement() {
        // ⟨'g := 'a·y0⟩((['a] x)['b := z0 > 'a]) = (['g] x y0)['b := z0, y0 > 'g]
        let o = c("(['a] x)['b := z0 > 'a]");
        let r = replace(&o, &NameId::new("a"), &stk("y0"), &NameId::new("g"));
        assert!(alpha_equal(&r, &c("(['g] x y0)['b := z0, y0 > 'g]")));
    }

    #[test]
    fn replace_blocking_explicit_renaming() {
        // ⟨'g := 'a·(y0,y1)⟩((['a] x)['b ~> 'a])
        //   = ((['g] x y0 y1)['b := y0, y1 > 'g1])['g1 ~> 'g], 'g1 fresh.
        let o = c("(['a] x)['b ~> 'a]");
        let (r, fresh) =
            replace_tracked(&o, &NameId::new("a"), &stk("y0, y1"), &NameId::new("g"));
        assert_eq!(fresh.len(), 1);
        assert!(alpha_equal(
            &r,
            &c("((['g] x y0 y1)['b := y0, y1 > 'g1])['g1 ~> 'g]")
        ));
        // The concrete fresh name derives from the output name.
        assert_eq!(fresh[0].0, "g1");
    }

    #[test]
    fn replace_no_occurrence_is_identity_up_to_alpha() {
        let o = c("['b] x");
        let r = replace(&o, &NameId::new("a"), &stk("y"), &NameId::new("g"));
        assert!(alpha_equal(&r, &o));
    }

    #[test]
    fn rename_name_cases() {
        let a = NameId::new("a");
        let b = NameId::new("b");
        assert!(alpha_equal(&rename_name(&c("['a] x"), &a, &b), &c("['b] x")));
        assert!(alpha_equal(
            &rename_name(&c("(['c] x)['d := y > 'a]"), &a, &b),
            &c("(['c] x)['d := y > 'b]")
        ));
        assert!(alpha_equal(&rename_name(&c("['c] x"), &a, &b), &c("['c] x")));
        assert!(alpha_equal(
            &rename_name(&c("(['c] x)['d ~> 'a]"), &a, &b),
            &c("(['c] x)['d ~> 'b]")
        ));
    }

    #[test]
    fn rename_name_avoids_capture() {
        // `mu 'b. ['a] x` with 'a := 'b must refresh the bound 'b.
        let o = t("mu 'b. ['a] x");
        let r = rename_name(&o, &NameId::new("a"), &NameId::new("b"));
        assert!(alpha_equal(&r, &t("mu 'c. ['b] x")));
    }

    #[test]
    fn apply_stack_left_nested() {
        let r = apply_stack(&term("x"), &stk("y0, y1"));
        assert!(alpha_equal(&Object::Term(r), &t("x y0 y1")));
        let one = apply_stack(&term("x"), &stk("y"));
        assert!(alpha_equal(&Object::Term(one), &t("x y")));
        // Associativity of @ with stack concatenation.
        let lhs = apply_stack(&apply_stack(&term("x"), &stk("y")), &stk("z"));
        let rhs = apply_stack(&term("x"), &stk("y, z"));
        assert_eq!(lhs, rhs);
    }
}
