//! Randomized property tests driven by the seeded generator.
//!
//! Each test draws a deterministic corpus from `lm_core::gen` and checks a
//! structural law of the calculus: round-trips, free-variable equations,
//! termination measures, unique normal forms, subject reduction, soundness
//! of the equivalence search, and the proof-net simulation.

use proptest::prelude::*;
use rand::Rng;
use std::collections::{BTreeSet, HashSet, VecDeque};

use lm_core::equivalence::{equiv, fexp, neighbors, EquivConfig, Relation, Verdict};
use lm_core::gen::{gen_equiv_pair, gen_object, seeded, GenConfig};
use lm_core::meta::{rename_name, replace, substitute};
use lm_core::proofnets::{
    cut_redexes, fire_cut, mult_normal_form, ppn_equiv, simulate_check, translate, CutRule,
};
use lm_core::reduction::{lmu_steps, plain_normal_form, plain_weight, steps, RuleTag};
use lm_core::syntax::{
    alpha_equal, analyze, canonical_key, parse, render, Command, Ident, NameId, Object, Sort,
    Stack, Term,
};
use lm_core::typing::{infer, instance_of, subject_step_check};

fn cfg_sized(sort: Sort, max_size: usize) -> GenConfig {
    GenConfig {
        sort,
        max_size,
        ..GenConfig::default()
    }
}

fn term_obj(t: &Term) -> Object {
    Object::Term(t.clone())
}

fn cmd_obj(c: &Command) -> Object {
    Object::Command(c.clone())
}

fn fv(o: &Object) -> BTreeSet<Ident> {
    analyze(o).fv
}

fn fns(o: &Object) -> BTreeSet<NameId> {
    analyze(o).fn_
}

// ---------------------------------------------------------------------------
// Syntax
// ---------------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn parse_render_roundtrip(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        for sort in [Sort::Term, Sort::Command, Sort::Stack] {
            let o = gen_object(&mut rng, &cfg_sized(sort, 25));
            let back = parse(&render(&o), sort).expect("rendered text parses");
            prop_assert!(alpha_equal(&o, &back), "round-trip broke: {}", render(&o));
        }
    }

    #[test]
    fn alpha_equal_is_reflexive_and_canonical(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let o = gen_object(&mut rng, &cfg_sized(Sort::Term, 25));
        prop_assert!(alpha_equal(&o, &o));
        let back = parse(&render(&o), Sort::Term).unwrap();
        prop_assert_eq!(canonical_key(&o), canonical_key(&back));
        prop_assert!(alpha_equal(&back, &o), "alpha_equal is symmetric");
    }
}

/// Checks the binder invariants on every sub-object: an explicit
/// substitution never captures into its argument, an explicit replacement's
/// bound name is not free in its stack, and a renaming is never the
/// identity.
fn check_invariants(o: &Object) {
    match o {
        Object::Term(t) => match t {
            Term::Var(_) => {}
            Term::App(a, b) => {
                check_invariants(&term_obj(a));
                check_invariants(&term_obj(b));
            }
            Term::Abs(_, b) => check_invariants(&term_obj(b)),
            Term::Mu(_, c) => check_invariants(&cmd_obj(c)),
            Term::ESub(t1, x, u) => {
                assert!(
                    !fv(&term_obj(u)).contains(x),
                    "ESub argument captures {x:?}: {}",
                    render(o)
                );
                check_invariants(&term_obj(t1));
                check_invariants(&term_obj(u));
            }
        },
        Object::Command(c) => match c {
            Command::Named(_, t) => check_invariants(&term_obj(t)),
            Command::ERepl(c1, a, s, _) => {
                assert!(
                    !fns(&Object::Stack(s.clone())).contains(a),
                    "ERepl stack captures {a:?}: {}",
                    render(o)
                );
                check_invariants(&cmd_obj(c1));
                check_invariants(&Object::Stack(s.clone()));
            }
            Command::ERen(c1, a, b) => {
                assert_ne!(a, b, "identity renaming: {}", render(o));
                check_invariants(&cmd_obj(c1));
            }
        },
        Object::Stack(s) => {
            for t in s.items() {
                check_invariants(&term_obj(t));
            }
        }
    }
}

#[test]
fn binder_invariants_hold_in_generated_objects_and_reducts() {
    for seed in 0..40u64 {
        let mut rng = seeded(seed);
        for sort in [Sort::Term, Sort::Command, Sort::Stack] {
            let o = gen_object(&mut rng, &cfg_sized(sort, 25));
            check_invariants(&o);
            for step in steps(&o, &RuleTag::all_lm()) {
                check_invariants(&step.after);
            }
        }
    }
}

/// Checks the free-variable / free-name equations of every constructor
/// against the analysis of its children.
fn check_fv_fn(o: &Object) {
    let a = analyze(o);
    match o {
        Object::Term(t) => match t {
            Term::Var(x) => {
                assert_eq!(a.fv, BTreeSet::from([x.clone()]));
                assert!(a.fn_.is_empty());
            }
            Term::App(l, r) => {
                let (lo, ro) = (term_obj(l), term_obj(r));
                assert_eq!(a.fv, &fv(&lo) | &fv(&ro));
                assert_eq!(a.fn_, &fns(&lo) | &fns(&ro));
                check_fv_fn(&lo);
                check_fv_fn(&ro);
            }
            Term::Abs(x, b) => {
                let bo = term_obj(b);
                let mut want = fv(&bo);
                want.remove(x);
                assert_eq!(a.fv, want);
                assert_eq!(a.fn_, fns(&bo));
                check_fv_fn(&bo);
            }
            Term::Mu(n, c) => {
                let co = cmd_obj(c);
                let mut want = fns(&co);
                want.remove(n);
                assert_eq!(a.fn_, want);
                assert_eq!(a.fv, fv(&co));
                check_fv_fn(&co);
            }
            Term::ESub(b, x, u) => {
                let (bo, uo) = (term_obj(b), term_obj(u));
                let mut want = fv(&bo);
                want.remove(x);
                assert_eq!(a.fv, &want | &fv(&uo));
                assert_eq!(a.fn_, &fns(&bo) | &fns(&uo));
                check_fv_fn(&bo);
                check_fv_fn(&uo);
            }
        },
        Object::Command(c) => match c {
            Command::Named(n, t) => {
                let to = term_obj(t);
                let mut want = fns(&to);
                want.insert(n.clone());
                assert_eq!(a.fn_, want);
                assert_eq!(a.fv, fv(&to));
                check_fv_fn(&to);
            }
            Command::ERepl(b, n, s, out) => {
                let (bo, so) = (cmd_obj(b), Object::Stack(s.clone()));
                let mut want = fns(&bo);
                want.remove(n);
                want.extend(fns(&so));
                want.insert(out.clone());
                assert_eq!(a.fn_, want, "fn(c['a := s > 'b]) law: {}", render(o));
                assert_eq!(a.fv, &fv(&bo) | &fv(&so));
                check_fv_fn(&bo);
                check_fv_fn(&so);
            }
            Command::ERen(b, n, m) => {
                let bo = cmd_obj(b);
                let mut want = fns(&bo);
                want.remove(n);
                want.insert(m.clone());
                assert_eq!(a.fn_, want, "fn(c['a ~> 'b]) law: {}", render(o));
                assert_eq!(a.fv, fv(&bo));
                check_fv_fn(&bo);
            }
        },
        Object::Stack(s) => {
            let mut wv = BTreeSet::new();
            let mut wn = BTreeSet::new();
            for t in s.items() {
                wv.extend(fv(&term_obj(t)));
                wn.extend(fns(&term_obj(t)));
                check_fv_fn(&term_obj(t));
            }
            assert_eq!(a.fv, wv);
            assert_eq!(a.fn_, wn);
        }
    }
}

#[test]
fn free_variable_equations_are_structural() {
    for seed in 0..40u64 {
        let mut rng = seeded(seed);
        for sort in [Sort::Term, Sort::Command, Sort::Stack] {
            check_fv_fn(&gen_object(&mut rng, &cfg_sized(sort, 25)));
        }
    }
}

// ---------------------------------------------------------------------------
// Meta operations
// ---------------------------------------------------------------------------

#[test]
fn replace_eliminates_the_name_and_obeys_the_fn_law() {
    let out = NameId::new("gout");
    let stack = Stack::new(vec![Term::Var(Ident::new("q0")), Term::Var(Ident::new("q1"))]);
    let so = Object::Stack(stack.clone());
    let mut checked = 0;
    for seed in 0..60u64 {
        let mut rng = seeded(seed);
        let o = gen_object(&mut rng, &cfg_sized(Sort::Command, 25));
        let a = analyze(&o);
        let Some(name) = a.fn_.iter().next().cloned() else {
            continue;
        };
        let count = a.count(&name);
        let r = replace(&o, &name, &stack, &out);
        assert_eq!(analyze(&r).count(&name), 0, "residual {name:?} in {}", render(&r));
        if count >= 1 {
            let mut want = a.fn_.clone();
            want.remove(&name);
            want.extend(fns(&so));
            want.insert(out.clone());
            assert_eq!(fns(&r), want, "fn law after replace on {}", render(&o));
        }
        check_invariants(&r);
        checked += 1;
    }
    assert!(checked >= 30, "too few commands with a free name");
}

#[test]
fn substitution_and_renaming_are_identities_when_absent() {
    let fresh_var = Ident::new("qfresh");
    let fresh_name = NameId::new("qfresh");
    let u = Term::Var(Ident::new("q0"));
    let b = NameId::new("q1");
    for seed in 0..60u64 {
        let mut rng = seeded(seed);
        for sort in [Sort::Term, Sort::Command] {
            let o = gen_object(&mut rng, &cfg_sized(sort, 25));
            assert!(!fv(&o).contains(&fresh_var) && !fns(&o).contains(&fresh_name));
            assert!(alpha_equal(&substitute(&o, &fresh_var, &u), &o));
            assert!(alpha_equal(&rename_name(&o, &fresh_name, &b), &o));
        }
    }
}

// ---------------------------------------------------------------------------
// Reduction
// ---------------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn plain_steps_strictly_decrease_the_weight(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        for sort in [Sort::Term, Sort::Command] {
            let o = gen_object(&mut rng, &cfg_sized(sort, 30));
            for step in steps(&o, &RuleTag::plain()) {
                prop_assert!(
                    plain_weight(&step.after) < plain_weight(&step.before),
                    "{:?} did not decrease: {}",
                    step.rule,
                    render(&o)
                );
            }
        }
    }
}

fn random_plain_nf(rng: &mut rand_chacha::ChaCha8Rng, o: &Object) -> Object {
    let mut cur = o.clone();
    loop {
        let ss = steps(&cur, &RuleTag::plain());
        if ss.is_empty() {
            return cur;
        }
        cur = ss[rng.gen_range(0..ss.len())].after.clone();
    }
}

#[test]
fn plain_normal_forms_are_strategy_independent() {
    for seed in 0..25u64 {
        let mut rng = seeded(seed);
        let o = gen_object(&mut rng, &cfg_sized(Sort::Term, 30));
        let reference = canonical_key(&plain_normal_form(&o));
        for _ in 0..5 {
            let nf = random_plain_nf(&mut rng, &o);
            assert!(steps(&nf, &RuleTag::plain()).is_empty());
            assert_eq!(canonical_key(&nf), reference, "strategies split on {}", render(&o));
        }
    }
}

#[test]
fn replacement_rules_partition_erepl_redexes() {
    let family = [
        RuleTag::N,
        RuleTag::C,
        RuleTag::W,
        RuleTag::Nnl,
        RuleTag::Cnl,
        RuleTag::Wnl,
        RuleTag::Rnl,
    ];
    let mut sites = 0;
    for seed in 0..60u64 {
        let mut rng = seeded(seed);
        let o = gen_object(&mut rng, &cfg_sized(Sort::Command, 30));
        let all = steps(&o, &family);
        for path in lm_core::syntax::positions(&o) {
            let Some(Object::Command(Command::ERepl(..))) =
                lm_core::syntax::subobject(&o, &path)
            else {
                continue;
            };
            let hits: Vec<RuleTag> = all
                .iter()
                .filter(|s| s.path == path)
                .map(|s| s.rule)
                .collect();
            assert_eq!(
                hits.len(),
                1,
                "replacement site at {:?} matched {:?} in {}",
                path,
                hits,
                render(&o)
            );
            sites += 1;
        }
    }
    assert!(sites >= 50, "too few replacement sites sampled ({sites})");
}

/// Breadth-first search for a ΛM reduct alpha-equal to `target`.
fn reachable(from: &Object, target: &Object, depth: usize, node_cap: usize) -> bool {
    let goal = canonical_key(target);
    let mut seen = HashSet::new();
    let mut queue = VecDeque::from([(from.clone(), 0usize)]);
    while let Some((cur, d)) = queue.pop_front() {
        let key = canonical_key(&cur);
        if key == goal {
            return true;
        }
        if d >= depth || seen.len() >= node_cap || !seen.insert(key) {
            continue;
        }
        for s in steps(&cur, &RuleTag::all_lm()) {
            queue.push_back((s.after, d + 1));
        }
    }
    false
}

#[test]
fn explicit_steps_refine_lambda_mu_steps() {
    let cfg = GenConfig {
        max_size: 12,
        lambda_mu_only: true,
        ..GenConfig::default()
    };
    let mut checked = 0;
    for seed in 0..40u64 {
        let mut rng = seeded(seed);
        let o = gen_object(&mut rng, &cfg);
        for step in lmu_steps(&o).unwrap().into_iter().take(2) {
            let bound = o.size() + 4;
            assert!(
                reachable(&o, &step.after, bound, 50_000),
                "{:?} reduct of {} not reachable with explicit rules",
                step.rule,
                render(&o)
            );
            checked += 1;
        }
    }
    assert!(checked >= 20, "too few λμ steps sampled ({checked})");
}

#[test]
fn random_reduction_peaks_rejoin() {
    for seed in 0..20u64 {
        let mut rng = seeded(seed);
        let o = gen_object(&mut rng, &cfg_sized(Sort::Term, 18));
        // Two independent random reduction prefixes from the same object.
        let mut arms = Vec::new();
        for _ in 0..2 {
            let mut cur = o.clone();
            for _ in 0..3 {
                let ss = steps(&cur, &RuleTag::all_lm());
                if ss.is_empty() {
                    break;
                }
                cur = ss[rng.gen_range(0..ss.len())].after.clone();
            }
            arms.push(cur);
        }
        // The two reducts must rejoin within a bounded number of further
        // steps: grow both forward closures and look for an intersection.
        let mut frontiers: Vec<Vec<Object>> = arms.iter().map(|a| vec![a.clone()]).collect();
        let mut reached: Vec<HashSet<String>> = arms
            .iter()
            .map(|a| HashSet::from([canonical_key(a)]))
            .collect();
        let mut joined = reached[0].contains(&canonical_key(&arms[1]));
        'outer: for _ in 0..8 {
            for side in 0..2 {
                let mut next = Vec::new();
                for cur in frontiers[side].drain(..) {
                    for s in steps(&cur, &RuleTag::all_lm()) {
                        let key = canonical_key(&s.after);
                        if reached[1 - side].contains(&key) {
                            joined = true;
                            break 'outer;
                        }
                        if reached[side].insert(key) && reached[side].len() < 4_000 {
                            next.push(s.after);
                        }
                    }
                }
                frontiers[side] = next;
            }
            if frontiers.iter().all(Vec::is_empty) {
                break;
            }
        }
        assert!(joined, "peak failed to rejoin from {}", render(&o));
    }
}

// ---------------------------------------------------------------------------
// Typing
// ---------------------------------------------------------------------------

#[test]
fn typing_contexts_are_relevant() {
    let cfg = GenConfig {
        max_size: 20,
        require_typable: true,
        ..GenConfig::default()
    };
    for seed in 0..40u64 {
        let mut rng = seeded(seed);
        let o = gen_object(&mut rng, &cfg);
        let Ok(typing) = infer(&o) else { continue };
        let dom_vars: BTreeSet<Ident> = typing.var_ctx.keys().cloned().collect();
        let dom_names: BTreeSet<NameId> = typing.name_ctx.keys().cloned().collect();
        assert_eq!(dom_vars, fv(&o), "Γ not relevant for {}", render(&o));
        assert_eq!(dom_names, fns(&o), "Δ not relevant for {}", render(&o));
    }
}

#[test]
fn subject_reduction_holds_for_every_rule() {
    let cfg = GenConfig {
        max_size: 20,
        require_typable: true,
        ..GenConfig::default()
    };
    let mut checked = 0;
    for seed in 0..40u64 {
        let mut rng = seeded(seed);
        let o = gen_object(&mut rng, &cfg);
        if infer(&o).is_err() {
            continue;
        }
        for step in steps(&o, &RuleTag::all_lm()) {
            assert_eq!(
                subject_step_check(&step),
                Ok(true),
                "{:?} broke typing on {}",
                step.rule,
                render(&o)
            );
            checked += 1;
        }
    }
    assert!(checked >= 40, "too few typed steps sampled ({checked})");
}

#[test]
fn typability_and_principal_typing_are_stable_under_fcan_and_fexp() {
    for seed in 0..40u64 {
        let mut rng = seeded(seed);
        let o = gen_object(&mut rng, &cfg_sized(Sort::Term, 20));
        let nf = plain_normal_form(&o);
        let expanded = fexp(&o);
        assert_eq!(infer(&o).is_ok(), infer(&nf).is_ok(), "fcan changed typability of {}", render(&o));
        assert_eq!(infer(&o).is_ok(), infer(&expanded).is_ok(), "fexp changed typability of {}", render(&o));
        if let (Ok(a), Ok(b)) = (infer(&o), infer(&nf)) {
            assert!(
                instance_of(&a, &b) && instance_of(&b, &a),
                "principal typing drifted under fcan: {}",
                render(&o)
            );
        }
    }
}

#[test]
fn typability_is_invariant_under_single_sigma_moves() {
    for seed in 0..40u64 {
        let mut rng = seeded(seed);
        let o = gen_object(&mut rng, &cfg_sized(Sort::Term, 20));
        for mv in neighbors(&o, Relation::Sigma) {
            assert_eq!(
                infer(&o).is_ok(),
                infer(&mv.to).is_ok(),
                "axiom {} changed typability: {} vs {}",
                mv.axiom,
                render(&o),
                render(&mv.to)
            );
            if let (Ok(a), Ok(b)) = (infer(&o), infer(&mv.to)) {
                assert!(
                    instance_of(&a, &b) && instance_of(&b, &a),
                    "axiom {} changed the principal typing of {}",
                    mv.axiom,
                    render(&o)
                );
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Equivalence
// ---------------------------------------------------------------------------

#[test]
fn contracting_sigma_moves_preserve_plain_normal_forms() {
    // Expanding moves may leave the plain fragment (θ read right-to-left can
    // put a μ in function position, creating a dM redex); the search budget
    // covers those detours.  Non-expanding moves must stay on plain forms.
    let cfg = GenConfig {
        max_size: 25,
        require_plain: true,
        ..GenConfig::default()
    };
    for seed in 0..40u64 {
        let mut rng = seeded(seed);
        let o = gen_object(&mut rng, &cfg);
        assert!(steps(&o, &RuleTag::plain()).is_empty());
        for mv in neighbors(&o, Relation::Sigma) {
            if mv.expanding {
                continue;
            }
            assert!(
                steps(&mv.to, &RuleTag::plain()).is_empty(),
                "axiom {} left plain forms: {} -> {}",
                mv.axiom,
                render(&o),
                render(&mv.to)
            );
        }
    }
}

#[test]
fn equiv_confirms_generated_pairs_with_sound_witnesses() {
    let cfg = GenConfig {
        max_size: 18,
        require_plain: true,
        ..GenConfig::default()
    };
    let ecfg = EquivConfig::default();
    let mut confirmed = 0;
    for seed in 0..50u64 {
        let mut rng = seeded(seed);
        let (a, b, _) = gen_equiv_pair(&mut rng, &cfg, Relation::Sigma, 3);
        match equiv(&a, &b, Relation::Sigma, &ecfg).unwrap() {
            Verdict::Equivalent(witness) => {
                // The witness chains a to b.
                match witness.last() {
                    Some(last) => assert!(
                        alpha_equal(&last.object, &b),
                        "witness misses the target: {}",
                        render(&b)
                    ),
                    None => assert!(alpha_equal(&a, &b)),
                }
                confirmed += 1;
            }
            Verdict::Unknown => {}
            Verdict::NotEquivalent { .. } => {
                panic!("generated pair refuted: {} vs {}", render(&a), render(&b))
            }
        }
    }
    assert!(confirmed >= 40, "too few pairs confirmed ({confirmed})");
}

#[test]
fn sigma_equivalence_is_a_congruence_under_fcan() {
    let cfg = GenConfig {
        max_size: 12,
        require_plain: true,
        ..GenConfig::default()
    };
    let ecfg = EquivConfig::default();
    for seed in 0..20u64 {
        let mut rng = seeded(seed);
        let (a, b, _) = gen_equiv_pair(&mut rng, &cfg, Relation::Sigma, 1);
        let (Object::Term(ta), Object::Term(tb)) = (&a, &b) else {
            continue;
        };
        // Wrap both sides in the same closing contexts and compare the
        // canonical forms.
        let wrap = |t: &Term| -> Vec<Object> {
            vec![
                Object::Term(Term::Abs(Ident::new("wv"), Box::new(t.clone()))),
                Object::Term(Term::App(
                    Box::new(t.clone()),
                    Box::new(Term::Var(Ident::new("wz"))),
                )),
                Object::Command(Command::Named(NameId::new("wn"), Box::new(t.clone()))),
            ]
        };
        for (ca, cb) in wrap(ta).into_iter().zip(wrap(tb)) {
            let verdict = equiv(
                &plain_normal_form(&ca),
                &plain_normal_form(&cb),
                Relation::Sigma,
                &ecfg,
            )
            .unwrap();
            assert!(
                !matches!(verdict, Verdict::NotEquivalent { .. }),
                "congruence failed around {} vs {}",
                render(&ca),
                render(&cb)
            );
        }
    }
}

#[test]
fn substitution_contexts_permute_with_linear_contexts() {
    // Admissible permutation instances: an explicit substitution commutes
    // with an abstraction (when the binder avoids the argument) and with
    // the function position of an application (when the substituted
    // variable avoids the argument).  Both sides must have σ-equivalent
    // canonical forms.
    let inner = GenConfig {
        max_size: 8,
        free_vars: vec!["x".into(), "y".into(), "z".into()],
        ..GenConfig::default()
    };
    let arg = GenConfig {
        max_size: 5,
        free_vars: vec!["z".into(), "w".into()],
        free_names: vec!["e".into()],
        ..GenConfig::default()
    };
    let ecfg = EquivConfig::default();
    let x = Ident::new("x");
    let y = Ident::new("y");
    for seed in 0..25u64 {
        let mut rng = seeded(seed);
        let Object::Term(t) = gen_object(&mut rng, &inner) else {
            unreachable!()
        };
        let Object::Term(u) = gen_object(&mut rng, &arg) else {
            unreachable!()
        };
        let Object::Term(v) = gen_object(&mut rng, &arg) else {
            unreachable!()
        };
        // (\y. t)[x := u]  ≃σ  \y. (t[x := u])   with y ∉ fv(u), x ≠ y.
        let lam = |body: Term| Term::Abs(y.clone(), Box::new(body));
        let sub = |body: Term| Term::ESub(Box::new(body), x.clone(), Box::new(u.clone()));
        let pairs = [
            (sub(lam(t.clone())), lam(sub(t.clone()))),
            // (t v)[x := u]  ≃σ  (t[x := u]) v   with x ∉ fv(v).
            (
                sub(Term::App(Box::new(t.clone()), Box::new(v.clone()))),
                Term::App(Box::new(sub(t.clone())), Box::new(v.clone())),
            ),
        ];
        for (lhs, rhs) in pairs {
            let (lo, ro) = (Object::Term(lhs), Object::Term(rhs));
            let verdict = equiv(
                &plain_normal_form(&lo),
                &plain_normal_form(&ro),
                Relation::Sigma,
                &ecfg,
            )
            .unwrap();
            assert!(
                !matches!(verdict, Verdict::NotEquivalent { .. }),
                "permutation instance refuted: {} vs {}",
                render(&lo),
                render(&ro)
            );
        }
    }
}

// ---------------------------------------------------------------------------
// Proof nets
// ---------------------------------------------------------------------------

fn typable_corpus(count: usize, max_size: usize) -> Vec<Object> {
    let cfg = GenConfig {
        max_size,
        require_typable: true,
        ..GenConfig::default()
    };
    let mut out = Vec::new();
    let mut seed = 0u64;
    while out.len() < count && seed < 10 * count as u64 {
        let mut rng = seeded(seed);
        let o = gen_object(&mut rng, &cfg);
        if infer(&o).is_ok() {
            out.push(o);
        }
        seed += 1;
    }
    out
}

#[test]
fn nets_stay_well_formed_under_cut_elimination() {
    for o in typable_corpus(20, 14) {
        let mut net = translate(&o).unwrap();
        net.validate().unwrap();
        for _ in 0..30 {
            let redexes = cut_redexes(&net);
            let Some((cut, rule)) = redexes.first().cloned() else {
                break;
            };
            fire_cut(&mut net, cut, rule);
            net.validate()
                .unwrap_or_else(|e| panic!("{e} after {rule:?} on {}", render(&o)));
        }
    }
}

#[test]
fn multiplicative_normal_forms_are_cut_free_and_stable() {
    for o in typable_corpus(20, 14) {
        let net = translate(&o).unwrap();
        let nf = mult_normal_form(&net);
        nf.validate().unwrap();
        assert!(
            cut_redexes(&nf)
                .iter()
                .all(|(_, r)| !CutRule::multiplicative().contains(r)),
            "multiplicative redex survives in ⟦{}⟧",
            render(&o)
        );
        assert!(ppn_equiv(&nf, &mult_normal_form(&nf)), "mnf not idempotent");
        assert!(ppn_equiv(&nf, &nf.clone()), "ppn_equiv not reflexive");
        // α-variants translate to equivalent nets.
        let back = parse(&render(&o), Sort::Term)
            .or_else(|_| parse(&render(&o), Sort::Command))
            .unwrap();
        assert!(ppn_equiv(&nf, &mult_normal_form(&translate(&back).unwrap())));
    }
}

#[test]
fn sigma_moves_preserve_the_multiplicative_normal_form() {
    let mut checked = 0;
    for o in typable_corpus(25, 14) {
        let nf = mult_normal_form(&translate(&o).unwrap());
        for mv in neighbors(&o, Relation::Sigma).into_iter().take(2) {
            if infer(&mv.to).is_err() {
                continue;
            }
            let nf2 = mult_normal_form(&translate(&mv.to).unwrap());
            assert!(
                ppn_equiv(&nf, &nf2),
                "axiom {} changed the net of {}",
                mv.axiom,
                render(&o)
            );
            checked += 1;
        }
    }
    assert!(checked >= 15, "too few σ moves on typable objects ({checked})");
}

#[test]
fn canonicalization_preserves_the_multiplicative_normal_form() {
    for o in typable_corpus(20, 14) {
        let nf = mult_normal_form(&translate(&o).unwrap());
        for variant in [plain_normal_form(&o), fexp(&o)] {
            assert!(infer(&variant).is_ok());
            let nf2 = mult_normal_form(&translate(&variant).unwrap());
            assert!(
                ppn_equiv(&nf, &nf2),
                "net drifted between {} and {}",
                render(&o),
                render(&variant)
            );
        }
    }
}

#[test]
fn every_typed_step_is_simulated() {
    let mut checked = 0;
    for o in typable_corpus(25, 16) {
        for step in steps(&o, &RuleTag::all_lm()).into_iter().take(3) {
            assert_eq!(
                simulate_check(&step).map_err(|e| e.to_string()),
                Ok(true),
                "{:?} not simulated on {}",
                step.rule,
                render(&o)
            );
            checked += 1;
        }
    }
    assert!(checked >= 25, "too few simulated steps ({checked})");
}
