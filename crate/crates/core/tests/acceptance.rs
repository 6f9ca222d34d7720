//! Acceptance gate: ten end-to-end checks, one per headline claim of the
//! workbench.  Each test prints a single `ACCEPTANCE … pass` line (visible
//! with `--nocapture`); a failing criterion fails its test.

use std::collections::HashSet;
use std::time::Instant;

use rand::Rng;

use lm_core::equivalence::{
    bisim_check, correspondence, equiv, fexp, lmu_bisim_check, neighbors, BisimVerdict,
    EquivConfig, Relation, Verdict,
};
use lm_core::gen::{enumerate_lmu, gen_equiv_pair, gen_object, seeded, GenConfig};
use lm_core::meta::replace;
use lm_core::proofnets::{mult_normal_form, ppn_equiv, simulate_check, translate};
use lm_core::reduction::{plain_normal_form, plain_weight, steps, RuleTag};
use lm_core::syntax::{
    alpha_equal, analyze, canonical_key, parse, render, NameId, Object, Sort, Stack, Term,
};
use lm_core::typing::{infer, subject_step_check};

fn t(s: &str) -> Object {
    parse(s, Sort::Term).unwrap()
}

fn c(s: &str) -> Object {
    parse(s, Sort::Command).unwrap()
}

fn corpus(n: usize, max_size: usize, seed0: u64, cfg: &GenConfig) -> Vec<Object> {
    let cfg = GenConfig {
        max_size,
        ..cfg.clone()
    };
    let mut out = Vec::new();
    let mut seed = seed0;
    while out.len() < n {
        let mut rng = seeded(seed);
        for sort in [Sort::Term, Sort::Command] {
            out.push(gen_object(&mut rng, &GenConfig { sort, ..cfg.clone() }));
        }
        seed += 1;
    }
    out.truncate(n);
    out
}

#[test]
fn criterion_01_weight_decrease_termination() {
    let start = Instant::now();
    let objs = corpus(1_000, 40, 1, &GenConfig::default());
    let mut checked = 0usize;
    for o in &objs {
        for step in steps(o, &RuleTag::plain()) {
            assert!(
                plain_weight(&step.after) < plain_weight(&step.before),
                "{:?} failed to decrease on {}",
                step.rule,
                render(o)
            );
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    assert!(checked >= 1_000, "corpus too inert ({checked} plain steps)");
    assert!(elapsed.as_secs() < 10, "took {elapsed:?}");
    println!(
        "ACCEPTANCE 01 weight-decrease: pass ({} objects, {} plain steps, {:?})",
        objs.len(),
        checked,
        elapsed
    );
}

#[test]
fn criterion_02_unique_plain_normal_forms() {
    // Randomized maximal strategies all land on the same normal form.
    let objs = corpus(1_000, 30, 101, &GenConfig::default());
    let mut strat = seeded(0xFC);
    for o in &objs {
        let reference = canonical_key(&plain_normal_form(o));
        for _ in 0..20 {
            let mut cur = o.clone();
            loop {
                let ss = steps(&cur, &RuleTag::plain());
                if ss.is_empty() {
                    break;
                }
                cur = ss[strat.gen_range(0..ss.len())].after.clone();
            }
            assert_eq!(canonical_key(&cur), reference, "strategies split on {}", render(o));
        }
    }
    // The three replacement-rule critical pairs converge, as exact diagrams:
    // each peak admits the two stated plain steps and both sides reach the
    // same normal form.
    let peaks = [
        // N–C: the inner replacement can fire, or the outer can absorb it.
        (
            "((['a] x)['a := y > 'b])['b := z > 'g]",
            RuleTag::N,
            RuleTag::C,
            "['g] x y z",
        ),
        // C–C: stack concatenation is associative.
        (
            "(((['a] x)['a := y0 > 'b])['b := y1 > 'g])['g := y2 > 'd]",
            RuleTag::C,
            RuleTag::C,
            "['d] x y0 y1 y2",
        ),
        // W–C: a blocked renaming commutes with the outer absorption.
        (
            "(((['a] x)['a ~> 'b])['b := y > 'g])['g := z > 'd]",
            RuleTag::W,
            RuleTag::C,
            "(['b] x y z)['b ~> 'd]",
        ),
    ];
    for (src, r1, r2, joined) in peaks {
        let o = c(src);
        let ss = steps(&o, &RuleTag::plain());
        assert!(ss.len() >= 2, "no peak at {src}");
        assert!(ss.iter().any(|s| s.rule == r1), "{r1:?} missing at {src}");
        assert!(ss.iter().any(|s| s.rule == r2), "{r2:?} missing at {src}");
        for s in &ss {
            assert!(
                alpha_equal(&plain_normal_form(&s.after), &c(joined)),
                "critical pair {src} did not rejoin via {:?}",
                s.rule
            );
        }
    }
    println!("ACCEPTANCE 02 unique-plain-nf: pass (1000 objects x 20 strategies, 3 critical pairs)");
}

#[test]
fn criterion_03_strong_bisimulation() {
    let ecfg = EquivConfig::default();
    let mut unknown = 0usize;
    let mut total = 0usize;
    let mut seed = 0u64;
    while total < 500 {
        let mut rng = seeded(0xB15 + seed);
        seed += 1;
        let cfg = GenConfig {
            max_size: rng.gen_range(8..=25),
            require_plain: true,
            ..GenConfig::default()
        };
        let (a, b, _) = gen_equiv_pair(&mut rng, &cfg, Relation::Sigma, 3);
        // The diagram is stated on plain forms; an expanding move can step
        // outside the fragment, so such pairs are regenerated.
        if !steps(&b, &RuleTag::plain()).is_empty() {
            continue;
        }
        total += 1;
        match bisim_check(&a, &b, Relation::Sigma, &ecfg).unwrap() {
            BisimVerdict::Bisimilar { .. } => {}
            BisimVerdict::Unknown => unknown += 1,
            BisimVerdict::NotBisimilar { side, step } => {
                panic!("diagram broke ({side}) at {step} for {} vs {}", render(&a), render(&b))
            }
        }
    }
    let rate = unknown as f64 / total as f64;
    assert!(rate < 0.02, "Unknown rate {rate:.3} over {total} pairs");
    println!(
        "ACCEPTANCE 03 strong-bisimulation: pass ({total} pairs, {unknown} unknown = {:.2}%)",
        100.0 * rate
    );
}

#[test]
fn criterion_04_negative_control() {
    let ecfg = EquivConfig::default();
    let o = t("(mu 'a. ['a] x) y");
    let p = t("x y");
    // The reference λμ diagram fails on the unmatched μ-step.
    let lv = lmu_bisim_check(&o, &p, &ecfg).unwrap();
    let BisimVerdict::NotBisimilar { step, .. } = lv else {
        panic!("λμ diagram unexpectedly closed: {lv:?}");
    };
    let witness = parse(&step, Sort::Term).expect("witness parses");
    assert!(
        alpha_equal(&witness, &t("mu 'a1. ['a1] x y")),
        "unexpected witness {step}"
    );
    // On plain forms the diagram closes via θ.
    let (fo, fp) = (plain_normal_form(&o), plain_normal_form(&p));
    assert!(alpha_equal(&fo, &t("mu 'a1. ['a1] x y")));
    let bv = bisim_check(&fo, &fp, Relation::Sigma, &ecfg).unwrap();
    assert!(matches!(bv, BisimVerdict::Bisimilar { .. }), "got {bv:?}");
    println!("ACCEPTANCE 04 negative-control: pass (μ-step witness `mu 'a1. ['a1] x y`)");
}

#[test]
fn criterion_05_peirce() {
    let peirce = t(r"\x. mu 'a. ['a] (x (\y. mu 'd. ['a] y))");
    let typing = infer(&peirce).unwrap(); // warm-up
    let start = Instant::now();
    let again = infer(&peirce).unwrap();
    let elapsed = start.elapsed();
    assert_eq!(typing.display(), again.display());
    assert!(typing.var_ctx.is_empty() && typing.name_ctx.is_empty());
    assert_eq!(typing.display(), " |- _ : ((A -> B) -> A) -> A | ");
    assert!(elapsed.as_millis() < 10, "took {elapsed:?}");
    println!("ACCEPTANCE 05 peirce: pass ( ((A -> B) -> A) -> A in {elapsed:?})");
}

#[test]
fn criterion_06_subject_reduction_and_expansion() {
    let cfg = GenConfig {
        max_size: 22,
        require_typable: true,
        ..GenConfig::default()
    };
    let mut typed = 0usize;
    let mut checked = 0usize;
    let mut seed = 0u64;
    while typed < 300 {
        let mut rng = seeded(0x5B + seed);
        seed += 1;
        let o = gen_object(&mut rng, &cfg);
        if infer(&o).is_err() {
            continue;
        }
        typed += 1;
        let before = analyze(&o);
        for step in steps(&o, &RuleTag::all_lm()) {
            // Preservation (and, for plain rules, the expansion direction).
            assert_eq!(
                subject_step_check(&step),
                Ok(true),
                "{:?} broke typing on {}",
                step.rule,
                render(&o)
            );
            // Context inclusion: by relevance, Γ′ ⊆ Γ and Δ′ ⊆ Δ amount to
            // fv/fn inclusion of the reduct.
            let after = analyze(&step.after);
            assert!(after.fv.is_subset(&before.fv), "Γ grew on {}", render(&o));
            assert!(
                after.fn_.iter().all(|n| before.fn_.contains(n) || step.fresh.contains(n)),
                "Δ grew on {}",
                render(&o)
            );
            checked += 1;
        }
    }
    println!("ACCEPTANCE 06 subject-reduction: pass ({typed} typed objects, {checked} steps)");
}

#[test]
fn criterion_07_simulation_table() {
    let cfg = GenConfig {
        max_size: 16,
        require_typable: true,
        ..GenConfig::default()
    };
    let mut instances = 0usize;
    let mut seed = 0u64;
    while instances < 100 && seed < 4_000 {
        let mut rng = seeded(0x51 + seed);
        seed += 1;
        let o = gen_object(&mut rng, &cfg);
        if infer(&o).is_err() {
            continue;
        }
        let net = translate(&o).unwrap();
        if net.size() > 30 {
            continue;
        }
        for step in steps(&o, &RuleTag::all_lm()).into_iter().take(3) {
            assert_eq!(
                simulate_check(&step).map_err(|e| e.to_string()),
                Ok(true),
                "{:?} not simulated on {}",
                step.rule,
                render(&o)
            );
            instances += 1;
        }
        // Multiplicative normal forms are invariant under plain steps and
        // under canonicalization / expansion.
        let nf = mult_normal_form(&net);
        for variant in steps(&o, &RuleTag::plain())
            .into_iter()
            .map(|s| s.after)
            .take(2)
            .chain([plain_normal_form(&o), fexp(&o)])
        {
            let nf2 = mult_normal_form(&translate(&variant).unwrap());
            assert!(
                ppn_equiv(&nf, &nf2),
                "mnf drifted between {} and {}",
                render(&o),
                render(&variant)
            );
        }
    }
    assert!(instances >= 100, "only {instances} simulated steps");
    println!("ACCEPTANCE 07 simulation-table: pass ({instances} typed steps simulated)");
}

#[test]
fn criterion_08_sigma_soundness_into_net_equivalence() {
    let cfg = GenConfig {
        max_size: 16,
        require_typable: true,
        ..GenConfig::default()
    };
    let mut checked = 0usize;
    let mut seed = 0u64;
    while checked < 100 && seed < 4_000 {
        let mut rng = seeded(0x8E + seed);
        seed += 1;
        let (a, b, used) = gen_equiv_pair(&mut rng, &cfg, Relation::Sigma, 2);
        if used.is_empty() || infer(&a).is_err() || infer(&b).is_err() {
            continue;
        }
        let na = mult_normal_form(&translate(&a).unwrap());
        let nb = mult_normal_form(&translate(&b).unwrap());
        assert!(
            ppn_equiv(&na, &nb),
            "σ pair ({}) has distinct nets: {} vs {}",
            used.join(","),
            render(&a),
            render(&b)
        );
        checked += 1;
    }
    assert!(checked >= 100, "only {checked} typed σ pairs");
    println!("ACCEPTANCE 08 sigma-into-net-equivalence: pass ({checked} typed pairs)");
}

#[test]
fn criterion_09_correspondence() {
    let corpus = enumerate_lmu(7, &["x", "y"], &["a", "b"], 5_000);
    assert!(corpus.len() >= 500, "corpus too small ({})", corpus.len());
    let base = EquivConfig::default();
    let deeper = EquivConfig {
        expand_depth: 2,
        ..base
    };
    let mut rng = seeded(0xC0);
    let mut sampled = 0usize;
    let mut joint_unknown = 0usize;
    let mut seen = HashSet::new();
    while sampled < 2_000 {
        let i = rng.gen_range(0..corpus.len());
        let j = rng.gen_range(0..corpus.len());
        if !seen.insert((i, j)) {
            continue;
        }
        let (o, p) = (&corpus[i], &corpus[j]);
        sampled += 1;
        let (lau, er) = correspondence(o, p, &base).unwrap();
        let verdict = match (&lau, &er) {
            (Verdict::Unknown, _) | (_, Verdict::Unknown) => {
                // Retry once with a deeper expansion bound before giving up.
                correspondence(o, p, &deeper).unwrap()
            }
            _ => (lau, er),
        };
        match verdict {
            (Verdict::Unknown, _) | (_, Verdict::Unknown) => joint_unknown += 1,
            (lau, er) => assert_eq!(
                lau.is_equivalent(),
                er.is_equivalent(),
                "correspondence disagrees on {} vs {}",
                render(o),
                render(p)
            ),
        }
    }
    println!(
        "ACCEPTANCE 09 correspondence: pass ({} objects, {sampled} pairs, {joint_unknown} joint-unknown)",
        corpus.len()
    );
}

#[test]
fn criterion_10_worked_examples() {
    // The three replacement examples.
    let s2 = Stack::new(vec![
        Term::Var(lm_core::syntax::Ident::new("y0")),
        Term::Var(lm_core::syntax::Ident::new("y1")),
    ]);
    let s1 = Stack::new(vec![Term::Var(lm_core::syntax::Ident::new("y0"))]);
    let a = NameId::new("a");
    let g = NameId::new("g");
    assert!(alpha_equal(&replace(&c("['a] x"), &a, &s2, &g), &c("['g] x y0 y1")));
    assert!(alpha_equal(
        &replace(&c("(['a] x)['b := z0 > 'a]"), &a, &s1, &g),
        &c("(['g] x y0)['b := z0, y0 > 'g]")
    ));
    let blocked = replace(&c("(['a] x)['b ~> 'a]"), &a, &s2, &g);
    assert!(alpha_equal(
        &blocked,
        &c("((['g] x y0 y1)['b := y0, y1 > 'g1])['g1 ~> 'g]")
    ));
    assert_eq!(analyze(&blocked).count(&a), 0);
    // The expansion table rows.
    assert!(alpha_equal(&fexp(&t("x[x := y]")), &t("(\\x. x) y")));
    assert!(alpha_equal(
        &fexp(&c("(['a] x)['a := y, z > 'b]")),
        &c("['b] ((mu 'a. ['a] x) y z)")
    ));
    assert!(alpha_equal(
        &fexp(&c("(['a] x)['a ~> 'b]")),
        &c("['b] mu 'a. ['a] x")
    ));
    // The replacement-divergence example closes up to the structural
    // equivalence.
    let o = c("['a1] ((mu 'g. ['a1] ((mu 'd. ['e] z)[y := w]))[x := w])");
    let p = c("['a1] ((mu 'd. ['a1] ((mu 'g. ['e] z)[x := w]))[y := w])");
    let v = equiv(&o, &p, Relation::Sigma, &EquivConfig::default()).unwrap();
    assert!(v.is_equivalent());
    // Single-axiom moves from the canonical θ redex include its contractum.
    let theta = t("mu 'a1. ['a1] x y");
    assert!(neighbors(&theta, Relation::Sigma)
        .iter()
        .any(|m| alpha_equal(&m.to, &t("x y"))));
    println!("ACCEPTANCE 10 worked-examples: pass (replacement, expansion, divergence closure)");
}
