//! Acceptance suite: one line per criterion, with its runtime limit.
//!
//! Runs as a plain binary (`harness = false`) so that the summary lines reach
//! the test log unfiltered. Exits nonzero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;
use std::time::{Duration, Instant};

use genkripke::construct::{
    choice_violations, complete_to_constant_domain_with, extend_choice, partition_upward_closed,
    unravel_strict, TreeModel, UpwardClosedSet,
};
use genkripke::search::{
    all_formulas, check_cd_to_classical, check_kripke_to_cd, classify_connectives, decide, for_each_model,
    generate_corpus, random_formula, random_model, CorpusConfig, Mode, SearchBounds, Shape,
    TransferOutcome, Verdict,
};
use genkripke::semantics::{assignments_over, eval_sequent, Assignment, ElementId, Evaluator, KripkeModel, WorldId};
use genkripke::synthesize::{kstar, synthesize};
use genkripke::syntax::{parse_sequent, Connective, Formula, Signature};
use genkripke::truthfun::{enumerate_truth_functions, BUILTIN_NAMES};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Outcome);

fn builtins(names: &[&str]) -> Vec<Connective> {
    names.iter().map(|n| Connective::builtin(n).unwrap()).collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn binary_classification() -> Outcome {
    let census = classify_connectives(2).map_err(|e| e.to_string())?;
    let bad: Vec<String> = census
        .where_supermultiplicative(false)
        .iter()
        .map(|f| f.table_string())
        .collect();
    ensure(bad == ["0110", "0111"], || format!("non-supermultiplicative tables {bad:?}"))?;
    Ok("non-supermultiplicative binary tables: 0110 (xor), 0111 (or)".into())
}

fn meet_closure_equivalence() -> Outcome {
    let mut sm = 0;
    for f in enumerate_truth_functions(3).unwrap() {
        let pairwise = f.is_supermultiplicative();
        sm += usize::from(pairwise);
        // a single argument imposes nothing, so n = 1 only has the forward direction
        ensure(!pairwise || f.nary_meet_closure(1), || {
            format!("table {} is supermultiplicative but not closed at n = 1", f.table_string())
        })?;
        for n in 2..=4 {
            ensure(f.nary_meet_closure(n) == pairwise, || {
                format!("table {} disagrees at n = {n}", f.table_string())
            })?;
        }
    }
    Ok(format!("256 ternary tables agree for n = 2..4, forward direction at n = 1 ({sm} supermultiplicative)"))
}

fn synthesizer_soundness() -> Outcome {
    let k = kstar();
    let mut count = 0;
    let mut cases = BTreeMap::new();
    for arity in 0..=3 {
        for f in enumerate_truth_functions(arity).unwrap() {
            if f.is_supermultiplicative() {
                continue;
            }
            let c = Connective::new("c", f);
            let cert = synthesize(&c, None).map_err(|e| e.to_string())?;
            let value = eval_sequent(&k, WorldId(0), &Assignment::empty(), &cert.sequent)
                .map_err(|e| e.to_string())?;
            ensure(!value, || {
                format!("table {} gives {} value 1 at K*, w1", c.func.table_string(), cert.sequent)
            })?;
            *cases.entry(cert.case.to_string()).or_insert(0) += 1;
            count += 1;
        }
    }
    Ok(format!("{count} certificates refuted at (K*, w1, empty); cases {cases:?}"))
}

fn separation_at_bounds() -> Outcome {
    let mut parts = Vec::new();
    for name in ["or", "xor"] {
        let cert = synthesize(&Connective::builtin(name).unwrap(), None).map_err(|e| e.to_string())?;
        let cd = decide(&cert.sequent, Mode::Cd, SearchBounds::new(3, 2, Shape::Tree))
            .map_err(|e| e.to_string())?;
        ensure(!cd.is_refuted(), || format!("{name}: constant-domain countermodel found"))?;
        match decide(&cert.sequent, Mode::Kripke, SearchBounds::new(2, 2, Shape::Tree))
            .map_err(|e| e.to_string())?
        {
            Verdict::Refuted { model, .. } => parts.push(format!(
                "{name}: cd valid at |W|<=3 tree |D|<=2, kripke refuted with {} worlds",
                model.world_count()
            )),
            Verdict::ValidUpToBounds(_) => return Err(format!("{name}: no Kripke countermodel with 2 worlds")),
        }
    }
    Ok(parts.join("; "))
}

fn xor_and_double_negation() -> Outcome {
    let sig = Signature::with_builtins();
    let mut sig = sig;
    sig.add_predicate("p", 1).unwrap();
    sig.add_predicate("r", 0).unwrap();
    let xor = parse_sequent("forall x. xor(p(x), r) => xor(forall x. p(x), r)", &sig).unwrap();
    let v = decide(&xor, Mode::Kripke, SearchBounds::new(3, 2, Shape::AnyPreorder)).map_err(|e| e.to_string())?;
    ensure(!v.is_refuted(), || "xor sequent refuted".into())?;
    let mut sig0 = Signature::with_builtins();
    sig0.add_predicate("p", 0).unwrap();
    let dn = parse_sequent("not(not(p)) => p", &sig0).unwrap();
    match decide(&dn, Mode::Kripke, SearchBounds::new(2, 1, Shape::AnyPreorder)).map_err(|e| e.to_string())? {
        Verdict::Refuted { model, world, assignment } => {
            let chain = model.world_count() == 2 && model.leq(WorldId(0), WorldId(1)) && !model.leq(WorldId(1), WorldId(0));
            ensure(chain, || "countermodel is not a 2-world chain".into())?;
            ensure(!eval_sequent(&model, world, &assignment, &dn).unwrap(), || "witness does not re-check".into())?;
        }
        Verdict::ValidUpToBounds(_) => return Err("double negation not refuted".into()),
    }
    Ok("xor sequent valid at |W|<=3 |D|<=2 (any preorder); not(not(p)) => p refuted on a 2-chain".into())
}

/// Depth-1 formulas exhaustively plus a seeded sample of depth-3 ones.
fn formula_pool(rng: &mut ChaCha8Rng, sample: usize) -> Vec<Formula> {
    let conns = builtins(&BUILTIN_NAMES);
    let mut pool = all_formulas(&conns, 1);
    pool.extend((0..sample).map(|_| random_formula(rng, &conns, 3)));
    pool
}

fn preds_pqr() -> BTreeMap<String, usize> {
    [("p".to_string(), 1), ("q".to_string(), 1), ("r".to_string(), 0)].into()
}

fn heredity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut checks = 0usize;
    for i in 0..500 {
        let k = random_model(&mut rng, &preds_pqr(), 4, 2, Shape::AnyPreorder);
        ensure(k.validate().is_empty(), || format!("model {i} invalid"))?;
        let pool = formula_pool(&mut rng, 200);
        let mut ev = Evaluator::new(&k);
        for phi in &pool {
            let vars = phi.free_vars();
            for w in k.worlds() {
                for rho in assignments_over(&k, w, &vars) {
                    if !ev.eval(w, &rho, phi).unwrap() {
                        continue;
                    }
                    for v in k.successors(w) {
                        checks += 1;
                        ensure(ev.eval(v, &rho, phi).unwrap(), || {
                            format!("model {i}: {phi} drops from {} to {}", k.world_name(w), k.world_name(v))
                        })?;
                    }
                }
            }
        }
    }
    Ok(format!("500 models, 257 formulas each, {checks} upward checks"))
}

fn property_one() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut nodes = 0usize;
    for i in 0..100 {
        let k = random_model(&mut rng, &preds_pqr(), 4, 2, Shape::Poset);
        let start = WorldId(rand::Rng::gen_range(&mut rng, 0..k.world_count()));
        let t = unravel_strict(&k, start).map_err(|e| e.to_string())?;
        let last = t.last_map().unwrap().to_vec();
        let pool = formula_pool(&mut rng, 200);
        let mut ev_k = Evaluator::new(&k);
        let mut ev_t = Evaluator::new(t.model());
        for phi in &pool {
            let vars = phi.free_vars();
            for n in t.model().worlds() {
                for rho in assignments_over(t.model(), n, &vars) {
                    let a = ev_t.eval(n, &rho, phi).unwrap();
                    let b = ev_k.eval(last[n.0], &rho, phi).unwrap();
                    ensure(a == b, || {
                        format!("poset {i}: {phi} at node {} differs from its last world", t.model().world_name(n))
                    })?;
                }
            }
        }
        nodes += t.node_count();
    }
    Ok(format!("100 posets, {nodes} tree nodes, 257 formulas each"))
}

/// Rooted trees on `n` labeled nodes with parent(i) < i.
fn parent_arrays(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for i in 1..n {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                (0..i).map(move |q| {
                    let mut p = p.clone();
                    p.push(q);
                    p
                })
            })
            .collect();
    }
    out
}

/// Root has domain {a}; every other node {a, b}.
fn tree_from_parents(parents: &[usize]) -> TreeModel {
    let n = parents.len() + 1;
    let order: Vec<(WorldId, WorldId)> = parents.iter().enumerate().map(|(i, &p)| (WorldId(p), WorldId(i + 1))).collect();
    let domains = (0..n)
        .map(|i| if i == 0 { vec![ElementId(0)] } else { vec![ElementId(0), ElementId(1)] })
        .collect();
    let k = KripkeModel::new(
        (0..n).map(|i| format!("n{i}")).collect(),
        vec!["a".into(), "b".into()],
        &order,
        domains,
        Vec::<(WorldId, String, Vec<ElementId>)>::new(),
    );
    TreeModel::from_model(k).unwrap()
}

fn upward_closed_subsets(t: &TreeModel) -> Vec<BTreeSet<WorldId>> {
    let n = t.node_count();
    (0u32..1 << n)
        .map(|mask| (0..n).filter(|&i| mask >> i & 1 == 1).map(WorldId).collect::<BTreeSet<_>>())
        .filter(|s| UpwardClosedSet::new(t, s.clone()).is_ok())
        .collect()
}

fn partitions_and_choices() -> Outcome {
    let (mut sets, mut extensions) = (0usize, 0usize);
    for n in 1..=6 {
        for parents in parent_arrays(n) {
            let t = tree_from_parents(&parents);
            let all = upward_closed_subsets(&t);
            for s in &all {
                sets += 1;
                let v = UpwardClosedSet::new(&t, s.clone()).unwrap();
                let blocks = partition_upward_closed(&t, &v);
                let mut covered = BTreeSet::new();
                for b in &blocks {
                    ensure(b.nodes.iter().all(|x| !covered.contains(x)), || "blocks overlap".into())?;
                    covered.extend(b.nodes.iter().copied());
                    ensure(UpwardClosedSet::new(&t, b.nodes.clone()).is_ok(), || "block not upward closed".into())?;
                    ensure(b.nodes.iter().all(|&x| t.model().leq(b.min, x)) && b.nodes.contains(&b.min), || {
                        "block minimum is not least".into()
                    })?;
                }
                ensure(&covered == s, || "blocks do not cover the set".into())?;
                if !genkripke::construct::bars(&t, t.root(), s) {
                    continue;
                }
                for w in t.model().worlds() {
                    let inner: BTreeSet<WorldId> = t.upset(w).intersection(s).copied().collect();
                    let minima: Vec<WorldId> = partition_upward_closed(&t, &UpwardClosedSet::new(&t, inner).unwrap())
                        .iter()
                        .map(|b| b.min)
                        .collect();
                    let options: Vec<Vec<ElementId>> = minima.iter().map(|&m| t.model().domain(m).to_vec()).collect();
                    let mut combos: Vec<Vec<ElementId>> = vec![Vec::new()];
                    for opt in &options {
                        combos = combos
                            .into_iter()
                            .flat_map(|c| opt.iter().map(move |&e| { let mut c = c.clone(); c.push(e); c }))
                            .collect();
                    }
                    for combo in combos {
                        let pins: BTreeMap<WorldId, ElementId> = minima.iter().copied().zip(combo).collect();
                        let g = extend_choice(&t, &v, w, &pins).map_err(|e| e.to_string())?;
                        extensions += 1;
                        let bad = choice_violations(&t, &g);
                        ensure(bad.is_empty(), || format!("extension violates {bad:?}"))?;
                        ensure(pins.iter().all(|(&m, &a)| g.get(m) == Some(a)), || "pin not respected".into())?;
                        let dom = g.dom();
                        ensure(t.upset(w).intersection(s).all(|x| dom.contains(x)), || "V' not covered".into())?;
                    }
                }
            }
        }
    }
    Ok(format!("{sets} upward-closed sets on trees of <= 6 nodes, {extensions} extensions checked"))
}

fn completion_validity() -> Outcome {
    let preds: BTreeMap<String, usize> = [("p".to_string(), 1), ("r".to_string(), 0)].into();
    let mut count = 0usize;
    let mut failure = None;
    for_each_model(&preds, &SearchBounds::new(4, 2, Shape::Tree), |k| {
        let t = TreeModel::from_model(k).expect("tree shape yields trees");
        match complete_to_constant_domain_with(&t, &preds, 1 << 16) {
            Ok(c) => {
                let v = c.model.validate();
                if !v.is_empty() || !c.model.is_constant_domain() {
                    failure = Some(format!("completion invalid: {v:?}"));
                    return ControlFlow::Break(());
                }
                count += 1;
                ControlFlow::Continue(())
            }
            Err(e) => {
                failure = Some(e.to_string());
                ControlFlow::Break(())
            }
        }
    })
    .map_err(|e| e.to_string())?;
    match failure {
        Some(f) => Err(f),
        None => Ok(format!("{count} tree models (<= 4 nodes, |D| <= 2, p/1 and r/0) complete to valid constant-domain models")),
    }
}

fn relations_at_desk_scale() -> Outcome {
    let cfg = CorpusConfig { seed: 10, size: 200, max_depth: 3, max_side: 2 };
    let sm = generate_corpus(&builtins(&["not", "and", "imp"]), &cfg);
    let kripke = SearchBounds::new(3, 2, Shape::Poset);
    let cd = SearchBounds::new(2, 2, Shape::Poset);
    let r1 = check_kripke_to_cd(&sm, kripke, cd).map_err(|e| e.to_string())?;
    let mono = generate_corpus(&builtins(&["and", "or"]), &cfg);
    let r2 = check_cd_to_classical(&mono, SearchBounds::new(3, 2, Shape::Poset), 4).map_err(|e| e.to_string())?;
    let violations = r1.count(TransferOutcome::Violation) + r2.count(TransferOutcome::Violation);
    let rate = (r1.count(TransferOutcome::Inconclusive) + r2.count(TransferOutcome::Inconclusive)) as f64
        / (r1.outcomes.len() + r2.outcomes.len()) as f64;
    let detail = format!("{{not, and, imp}}: {r1}; {{and, or}}: {r2}; inconclusive {:.1}%", rate * 100.0);
    ensure(violations == 0 && rate < 0.05, || detail.clone())?;
    Ok(detail)
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("binary classification", 1, binary_classification),
        ("meet closure equivalence on ternary functions", 10, meet_closure_equivalence),
        ("synthesizer soundness at K*", 60, synthesizer_soundness),
        ("separation at bounds for or and xor", 300, separation_at_bounds),
        ("xor and double negation verdicts", 60, xor_and_double_negation),
        ("heredity on random models", 120, heredity),
        ("value preservation under strict unraveling", 120, property_one),
        ("partitions and choice-function extension", 120, partitions_and_choices),
        ("constant-domain completion validity", 60, completion_validity),
        ("logic relations on the seeded corpus", 600, relations_at_desk_scale),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*limit);
        let (status, detail) = match (&outcome, in_time) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("over the {limit} s limit; {d}")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "criterion {:>2} {status} [{:.2} s, limit {limit} s] {name}: {detail}",
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 10 acceptance criteria passed");
}
