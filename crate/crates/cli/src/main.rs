//! `lm` — batch front-end for the ΛM rewriting workbench.
//!
//! Every subcommand is a thin adapter over `lm-core`.  Object arguments
//! accept inline text or `@file`; `--sort {term,command,stack}`
//! disambiguates (the default tries each sort in that order).  `--json`
//! switches every subcommand to machine output.
//!
//! Exit codes: 0 success / equivalent / property pass; 1 not-equivalent /
//! property fail; 2 usage or parse error; 3 unknown (budget exhausted).

use std::io::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use lm_core::equivalence::{
    bisim_check, correspondence, equiv, fexp, lmu_bisim_check, BisimVerdict, EquivConfig,
    Relation, Verdict,
};
use lm_core::gen::{gen_equiv_pair, gen_object, seeded, GenConfig};
use lm_core::proofnets::{mult_normal_form, net_to_dot, net_to_json, simulate_check, translate};
use lm_core::reduction::{
    lmu_steps, meaningful_steps, plain_normal_form, plain_weight, steps, RuleTag, Step,
};
use lm_core::syntax::{alpha_equal, parse, render, to_json, Object, Sort};
use lm_core::typing::{derive, infer, subject_step_check, SubjectType};

const EXIT_OK: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_UNKNOWN: u8 = 3;

#[derive(Parser)]
#[command(name = "lm", version, about = "ΛM-calculus rewriting workbench")]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum SortArg {
    Term,
    Command,
    Stack,
}

impl From<SortArg> for Sort {
    fn from(s: SortArg) -> Sort {
        match s {
            SortArg::Term => Sort::Term,
            SortArg::Command => Sort::Command,
            SortArg::Stack => Sort::Stack,
        }
    }
}

#[derive(Args)]
struct ObjArg {
    /// Object in text syntax, or @file.
    object: String,
    /// Sort of the object (default: try term, command, stack in order).
    #[arg(long, value_enum)]
    sort: Option<SortArg>,
}

#[derive(Args)]
struct PairArg {
    /// Left object in text syntax, or @file.
    left: String,
    /// Right object in text syntax, or @file.
    right: String,
    /// Sort of both objects (default: try term, command, stack in order).
    #[arg(long, value_enum)]
    sort: Option<SortArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleSet {
    /// The terminating plain rules dB, dM, N, C, W.
    Plain,
    /// The meaningful rules S, Nnl, Cnl, Wnl, Rnl (from plain forms).
    Meaningful,
    /// All 10 ΛM rules.
    Lm,
    /// The reference λμ rules beta and mu.
    Lmu,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse an object and report its sort and canonical rendering.
    Parse(ObjArg),
    /// Parse and pretty-print an object with minimal parentheses.
    Render(ObjArg),
    /// Compute the plain normal form (canonical form).
    Fcan(ObjArg),
    /// List the available reduction steps.
    Steps {
        #[command(flatten)]
        obj: ObjArg,
        /// Which rule family to use.
        #[arg(long, value_enum, default_value = "plain")]
        rules: RuleSet,
    },
    /// Reduce by iterating the first available step, with a bound.
    Reduce {
        #[command(flatten)]
        obj: ObjArg,
        #[arg(long, value_enum, default_value = "plain")]
        rules: RuleSet,
        /// Maximum number of steps.
        #[arg(long, default_value_t = 100)]
        max: usize,
    },
    /// The termination weight of an object.
    Weight(ObjArg),
    /// Principal type (terms/stacks) or typability (commands).
    Typeof(ObjArg),
    /// Full typing derivation as JSON.
    Derive(ObjArg),
    /// Decide structural equivalence of two objects.
    Equiv {
        #[command(flatten)]
        pair: PairArg,
        /// Use the ≃er relation (adds the renaming axiom).
        #[arg(long, conflicts_with = "laurent")]
        er: bool,
        /// Use the λμ σ-equivalence (pure λμ objects only).
        #[arg(long)]
        laurent: bool,
        /// Search budget (nodes explored).
        #[arg(long, default_value_t = 50_000)]
        budget: usize,
        /// Expansion depth for the expanding axiom directions.
        #[arg(long, default_value_t = 1)]
        expand: usize,
    },
    /// Unfold explicit operators into their implicit λμ forms.
    Fexp(ObjArg),
    /// Translate a typable object to its polarized proof net.
    Translate {
        #[command(flatten)]
        obj: ObjArg,
        /// Output Graphviz DOT instead of JSON.
        #[arg(long)]
        dot: bool,
        /// Normalize multiplicative cuts first.
        #[arg(long)]
        mnf: bool,
    },
    /// Decide structural equivalence ≡ of the nets of two objects.
    PpnEquiv {
        #[command(flatten)]
        pair: PairArg,
        /// Compare multiplicative normal forms.
        #[arg(long)]
        mnf: bool,
    },
    /// Check the proof-net simulation of every step of an object.
    Simulate {
        #[command(flatten)]
        obj: ObjArg,
        #[arg(long, value_enum, default_value = "lm")]
        rules: RuleSet,
    },
    /// One-level strong bisimulation check between two objects.
    Bisim {
        #[command(flatten)]
        pair: PairArg,
        /// Use ≃er as the candidate relation.
        #[arg(long, conflicts_with = "laurent")]
        er: bool,
        /// Check the λμ diagram with the σ-equivalence.
        #[arg(long)]
        laurent: bool,
        #[arg(long, default_value_t = 50_000)]
        budget: usize,
        #[arg(long, default_value_t = 1)]
        expand: usize,
    },
    /// Run a randomized property suite.
    Fuzz {
        /// Suite: roundtrip, confluence, weight, typing, equiv, simulate,
        /// correspondence.
        suite: String,
        /// Seed (default: LM_SEED or 0).
        #[arg(long)]
        seed: Option<u64>,
        /// Number of cases.
        #[arg(long, default_value_t = 100)]
        n: usize,
        /// Object size bound.
        #[arg(long, default_value_t = 20)]
        size: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(run(cli))
}

fn resolve_text(arg: &str) -> Result<String, String> {
    if let Some(path) = arg.strip_prefix('@') {
        std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))
    } else {
        Ok(arg.to_string())
    }
}

fn parse_obj(arg: &str, sort: Option<SortArg>) -> Result<Object, String> {
    let text = resolve_text(arg)?;
    match sort {
        Some(s) => parse(&text, s.into()).map_err(|e| e.to_string()),
        None => {
            let mut last = String::new();
            for s in [Sort::Term, Sort::Command, Sort::Stack] {
                match parse(&text, s) {
                    Ok(o) => return Ok(o),
                    Err(e) => last = e.to_string(),
                }
            }
            Err(last)
        }
    }
}

fn parse_pair(pair: &PairArg) -> Result<(Object, Object), String> {
    let a = parse_obj(&pair.left, pair.sort)?;
    let sort = match pair.sort {
        Some(s) => Some(s),
        None => Some(match a.sort() {
            Sort::Term => SortArg::Term,
            Sort::Command => SortArg::Command,
            Sort::Stack => SortArg::Stack,
        }),
    };
    let b = parse_obj(&pair.right, sort)?;
    Ok((a, b))
}

fn usage_error(msg: &str) -> u8 {
    eprintln!("error: {msg}");
    EXIT_USAGE
}

fn emit(json_mode: bool, value: Value, text: String) {
    if json_mode {
        println!("{value}");
    } else {
        println!("{text}");
    }
}

fn steps_of(o: &Object, rules: RuleSet) -> Result<Vec<Step>, String> {
    match rules {
        RuleSet::Plain => Ok(steps(o, &RuleTag::plain())),
        RuleSet::Lm => Ok(steps(o, &RuleTag::all_lm())),
        RuleSet::Meaningful => meaningful_steps(o).map_err(|e| e.to_string()),
        RuleSet::Lmu => lmu_steps(o).map_err(|e| e.to_string()),
    }
}

fn run(cli: Cli) -> u8 {
    let json_mode = cli.json;
    match cli.cmd {
        Cmd::Parse(arg) => match parse_obj(&arg.object, arg.sort) {
            Ok(o) => {
                emit(
                    json_mode,
                    json!({"sort": o.sort().to_string(), "object": to_json(&o), "text": render(&o)}),
                    format!("{}: {}", o.sort(), render(&o)),
                );
                EXIT_OK
            }
            Err(e) => usage_error(&e),
        },
        Cmd::Render(arg) => match parse_obj(&arg.object, arg.sort) {
            Ok(o) => {
                emit(json_mode, json!({"text": render(&o)}), render(&o));
                EXIT_OK
            }
            Err(e) => usage_error(&e),
        },
        Cmd::Fcan(arg) => match parse_obj(&arg.object, arg.sort) {
            Ok(o) => {
                let nf = plain_normal_form(&o);
                emit(
                    json_mode,
                    json!({"text": render(&nf), "object": to_json(&nf)}),
                    render(&nf),
                );
                EXIT_OK
            }
            Err(e) => usage_error(&e),
        },
        Cmd::Steps { obj, rules } => match parse_obj(&obj.object, obj.sort) {
            Ok(o) => match steps_of(&o, rules) {
                Ok(list) => {
                    let lines: Vec<String> = list
                        .iter()
                        .map(|s| {
                            let path: Vec<String> =
                                s.path.iter().map(|i| i.to_string()).collect();
                            format!("{} @[{}]  {}", s.rule, path.join(","), render(&s.after))
                        })
                        .collect();
                    emit(
                        json_mode,
                        json!({"steps": list.iter().map(Step::to_json).collect::<Vec<_>>()}),
                        lines.join("\n"),
                    );
                    EXIT_OK
                }
                Err(e) => usage_error(&e),
            },
            Err(e) => usage_error(&e),
        },
        Cmd::Reduce { obj, rules, max } => match parse_obj(&obj.object, obj.sort) {
            Ok(o) => {
                let mut cur = o;
                let mut trace = Vec::new();
                for _ in 0..max {
                    let list = match steps_of(&cur, rules) {
                        Ok(l) => l,
                        Err(e) => return usage_error(&e),
                    };
                    match list.into_iter().next() {
                        Some(s) => {
                            trace.push(s.to_json());
                            cur = s.after;
                        }
                        None => break,
                    }
                }
                emit(
                    json_mode,
                    json!({"steps": trace.len(), "trace": trace, "result": render(&cur)}),
                    format!("{}  [{} steps]", render(&cur), trace.len()),
                );
                EXIT_OK
            }
            Err(e) => usage_error(&e),
        },
        Cmd::Weight(arg) => match parse_obj(&arg.object, arg.sort) {
            Ok(o) => {
                let w = plain_weight(&o);
                emit(json_mode, json!({"weight": w.to_string()}), w.to_string());
                EXIT_OK
            }
            Err(e) => usage_error(&e),
        },
        Cmd::Typeof(arg) => match parse_obj(&arg.object, arg.sort) {
            Ok(o) => match infer(&o) {
                Ok(t) => {
                    let text = if t.var_ctx.is_empty() && t.name_ctx.is_empty() {
                        match &t.subject {
                            SubjectType::Term(ty) => ty.to_string(),
                            SubjectType::Stack(st) => st.to_string(),
                            SubjectType::Command => "typable".to_string(),
                        }
                    } else {
                        t.display()
                    };
                    emit(json_mode, t.to_json(), text);
                    EXIT_OK
                }
                Err(e) => {
                    eprintln!("untypable: {e}");
                    EXIT_FAIL
                }
            },
            Err(e) => usage_error(&e),
        },
        Cmd::Derive(arg) => match parse_obj(&arg.object, arg.sort) {
            Ok(o) => match derive(&o) {
                Ok(d) => {
                    let v = d.to_json();
                    if json_mode {
                        println!("{v}");
                    } else {
                        println!("{}", serde_json::to_string_pretty(&v).expect("valid json"));
                    }
                    EXIT_OK
                }
                Err(e) => {
                    eprintln!("untypable: {e}");
                    EXIT_FAIL
                }
            },
            Err(e) => usage_error(&e),
        },
        Cmd::Equiv {
            pair,
            er,
            laurent,
            budget,
            expand,
        } => {
            let (a, b) = match parse_pair(&pair) {
                Ok(p) => p,
                Err(e) => return usage_error(&e),
            };
            let rel = if laurent {
                Relation::Laurent
            } else if er {
                Relation::SigmaEr
            } else {
                Relation::Sigma
            };
            let cfg = EquivConfig {
                budget,
                expand_depth: expand,
            };
            match equiv(&a, &b, rel, &cfg) {
                Ok(v) => {
                    let text = match &v {
                        Verdict::Equivalent(w) => {
                            format!("equivalent ({} axiom steps)", w.len())
                        }
                        Verdict::NotEquivalent { closed_size } => {
                            format!("not equivalent (closure size {closed_size})")
                        }
                        Verdict::Unknown => "unknown (budget exhausted)".to_string(),
                    };
                    emit(json_mode, v.to_json(), text);
                    match v {
                        Verdict::Equivalent(_) => EXIT_OK,
                        Verdict::NotEquivalent { .. } => EXIT_FAIL,
                        Verdict::Unknown => EXIT_UNKNOWN,
                    }
                }
                Err(e) => usage_error(&e.to_string()),
            }
        }
        Cmd::Fexp(arg) => match parse_obj(&arg.object, arg.sort) {
            Ok(o) => {
                let u = fexp(&o);
                emit(json_mode, json!({"text": render(&u)}), render(&u));
                EXIT_OK
            }
            Err(e) => usage_error(&e),
        },
        Cmd::Translate { obj, dot, mnf } => match parse_obj(&obj.object, obj.sort) {
            Ok(o) => match translate(&o) {
                Ok(net) => {
                    let net = if mnf { mult_normal_form(&net) } else { net };
                    if dot {
                        print!("{}", net_to_dot(&net));
                    } else {
                        let v = net_to_json(&net);
                        if json_mode {
                            println!("{v}");
                        } else {
                            println!("{}", serde_json::to_string_pretty(&v).expect("valid json"));
                        }
                    }
                    EXIT_OK
                }
                Err(e) => {
                    eprintln!("{e}");
                    EXIT_FAIL
                }
            },
            Err(e) => usage_error(&e),
        },
        Cmd::PpnEquiv { pair, mnf } => {
            let (a, b) = match parse_pair(&pair) {
                Ok(p) => p,
                Err(e) => return usage_error(&e),
            };
            let (na, nb) = match (translate(&a), translate(&b)) {
                (Ok(x), Ok(y)) => (x, y),
                (Err(e), _) | (_, Err(e)) => {
                    eprintln!("{e}");
                    return EXIT_FAIL;
                }
            };
            let (na, nb) = if mnf {
                (mult_normal_form(&na), mult_normal_form(&nb))
            } else {
                (na, nb)
            };
            let eqv = lm_core::proofnets::ppn_equiv(&na, &nb);
            emit(
                json_mode,
                json!({"equivalent": eqv}),
                if eqv { "equivalent" } else { "not equivalent" }.to_string(),
            );
            if eqv {
                EXIT_OK
            } else {
                EXIT_FAIL
            }
        }
        Cmd::Simulate { obj, rules } => match parse_obj(&obj.object, obj.sort) {
            Ok(o) => {
                let list = match steps_of(&o, rules) {
                    Ok(l) => l,
                    Err(e) => return usage_error(&e),
                };
                let mut rows = Vec::new();
                let mut all_ok = true;
                for s in &list {
                    let outcome = match simulate_check(s) {
                        Ok(true) => "ok".to_string(),
                        Ok(false) => {
                            all_ok = false;
                            "FAIL".to_string()
                        }
                        Err(e) => format!("skipped ({e})"),
                    };
                    rows.push((s, outcome));
                }
                let lines: Vec<String> = rows
                    .iter()
                    .map(|(s, out)| format!("{}  {}  {}", s.rule, render(&s.after), out))
                    .collect();
                emit(
                    json_mode,
                    json!({"results": rows.iter().map(|(s, out)| json!({
                        "rule": s.rule.to_string(),
                        "after": render(&s.after),
                        "outcome": out,
                    })).collect::<Vec<_>>()}),
                    lines.join("\n"),
                );
                if all_ok {
                    EXIT_OK
                } else {
                    EXIT_FAIL
                }
            }
            Err(e) => usage_error(&e),
        },
        Cmd::Bisim {
            pair,
            er,
            laurent,
            budget,
            expand,
        } => {
            let (a, b) = match parse_pair(&pair) {
                Ok(p) => p,
                Err(e) => return usage_error(&e),
            };
            let cfg = EquivConfig {
                budget,
                expand_depth: expand,
            };
            let verdict = if laurent {
                lmu_bisim_check(&a, &b, &cfg)
            } else {
                let rel = if er { Relation::SigmaEr } else { Relation::Sigma };
                bisim_check(&a, &b, rel, &cfg)
            };
            match verdict {
                Ok(v) => {
                    let text = match &v {
                        BisimVerdict::Bisimilar { steps_matched } => {
                            format!("bisimilar ({steps_matched} steps matched)")
                        }
                        BisimVerdict::NotBisimilar { side, step } => {
                            format!("not bisimilar: unmatched step on side {side}: {step}")
                        }
                        BisimVerdict::Unknown => "unknown (budget exhausted)".to_string(),
                    };
                    emit(json_mode, v.to_json(), text);
                    match v {
                        BisimVerdict::Bisimilar { .. } => EXIT_OK,
                        BisimVerdict::NotBisimilar { .. } => EXIT_FAIL,
                        BisimVerdict::Unknown => EXIT_UNKNOWN,
                    }
                }
                Err(e) => usage_error(&e.to_string()),
            }
        }
        Cmd::Fuzz {
            suite,
            seed,
            n,
            size,
        } => {
            let seed = seed
                .or_else(|| {
                    std::env::var("LM_SEED")
                        .ok()
                        .and_then(|s| s.parse().ok())
                })
                .unwrap_or(0);
            run_fuzz(&suite, seed, n, size, json_mode)
        }
    }
}

fn dump_failure(suite: &str, index: usize, text: &str) {
    let path = format!("fuzz-{suite}-{index}.txt");
    if let Ok(mut f) = std::fs::File::create(&path) {
        let _ = writeln!(f, "{text}");
        eprintln!("failing case written to {path}");
    }
}

fn run_fuzz(suite: &str, seed: u64, n: usize, size: usize, json_mode: bool) -> u8 {
    let mut rng = seeded(seed);
    let mut failures = 0usize;
    let base = GenConfig {
        max_size: size,
        ..GenConfig::default()
    };
    let sorts = [Sort::Term, Sort::Command, Sort::Stack];
    for i in 0..n {
        let sort = sorts[i % sorts.len()];
        let ok = match suite {
            "roundtrip" => {
                let cfg = GenConfig { sort, ..base.clone() };
                let o = gen_object(&mut rng, &cfg);
                let ok = parse(&render(&o), o.sort())
                    .map(|p| alpha_equal(&o, &p))
                    .unwrap_or(false);
                if !ok {
                    dump_failure(suite, i, &render(&o));
                }
                ok
            }
            "confluence" => {
                let cfg = GenConfig { sort, ..base.clone() };
                let o = gen_object(&mut rng, &cfg);
                let nf1 = plain_normal_form(&o);
                let nf2 = random_strategy_nf(&mut rng, &o);
                let ok = alpha_equal(&nf1, &nf2);
                if !ok {
                    dump_failure(suite, i, &render(&o));
                }
                ok
            }
            "weight" => {
                let cfg = GenConfig { sort, ..base.clone() };
                let o = gen_object(&mut rng, &cfg);
                let ok = steps(&o, &RuleTag::plain())
                    .iter()
                    .all(|s| plain_weight(&s.after) < plain_weight(&s.before));
                if !ok {
                    dump_failure(suite, i, &render(&o));
                }
                ok
            }
            "typing" => {
                let cfg = GenConfig {
                    sort,
                    require_typable: true,
                    max_size: size.min(15),
                    ..base.clone()
                };
                let o = gen_object(&mut rng, &cfg);
                let ok = steps(&o, &RuleTag::all_lm())
                    .iter()
                    .all(|s| subject_step_check(s).unwrap_or(false));
                if !ok {
                    dump_failure(suite, i, &render(&o));
                }
                ok
            }
            "equiv" => {
                let cfg = GenConfig {
                    sort,
                    require_plain: true,
                    ..base.clone()
                };
                let (a, b, _) = gen_equiv_pair(&mut rng, &cfg, Relation::Sigma, 2);
                let cfg2 = EquivConfig::default();
                let ok = !matches!(
                    bisim_check(&a, &b, Relation::Sigma, &cfg2),
                    Ok(BisimVerdict::NotBisimilar { .. })
                );
                if !ok {
                    dump_failure(suite, i, &format!("{}\n{}", render(&a), render(&b)));
                }
                ok
            }
            "simulate" => {
                let cfg = GenConfig {
                    sort,
                    require_typable: true,
                    max_size: size.min(15),
                    ..base.clone()
                };
                let o = gen_object(&mut rng, &cfg);
                let ok = steps(&o, &RuleTag::all_lm())
                    .iter()
                    .filter(|s| !s.rule.is_lmu())
                    .all(|s| simulate_check(s).unwrap_or(true));
                if !ok {
                    dump_failure(suite, i, &render(&o));
                }
                ok
            }
            "correspondence" => {
                let cfg = GenConfig {
                    sort: Sort::Term,
                    lambda_mu_only: true,
                    max_size: size.min(10),
                    ..base.clone()
                };
                let a = gen_object(&mut rng, &cfg);
                let b = gen_object(&mut rng, &cfg);
                let ok = match correspondence(&a, &b, &EquivConfig::default()) {
                    Ok((lau, er)) => !matches!(
                        (&lau, &er),
                        (Verdict::Equivalent(_), Verdict::NotEquivalent { .. })
                            | (Verdict::NotEquivalent { .. }, Verdict::Equivalent(_))
                    ),
                    Err(_) => true,
                };
                if !ok {
                    dump_failure(suite, i, &format!("{}\n{}", render(&a), render(&b)));
                }
                ok
            }
            other => {
                return usage_error(&format!(
                    "unknown suite `{other}` (expected roundtrip, confluence, weight, \
                     typing, equiv, simulate, or correspondence)"
                ));
            }
        };
        if !ok {
            failures += 1;
        }
    }
    emit(
        json_mode,
        json!({"suite": suite, "cases": n, "failures": failures, "seed": seed}),
        format!("{suite}: {n} cases, {failures} failures (seed {seed})"),
    );
    if failures == 0 {
        EXIT_OK
    } else {
        EXIT_FAIL
    }
}

// Normalizes by picking a random plain redex at each step.
fn random_strategy_nf(rng: &mut rand_chacha::ChaCha8Rng, o: &Object) -> Object {
    use rand::Rng as _;
    let mut cur = o.clone();
    loop {
        let list = steps(&cur, &RuleTag::plain());
        if list.is_empty() {
            return cur;
        }
        let k = rng.gen_range(0..list.len());
        cur = list.into_iter().nth(k).expect("index in range").after;
    }
}
