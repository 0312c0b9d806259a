//! Acceptance suite. Each criterion prints one PASS/FAIL line; the test fails if any does.
//!
//! The lines go straight to stdout so they show up even when test output is captured.

mod common;

use std::collections::BTreeSet;
use std::f64::consts::LN_2;
use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stepdecode::constraints::ConstraintSet;
use stepdecode::generation::remote::RemoteGenerator;
use stepdecode::generation::toy::ToyLm;
use stepdecode::generation::toytask::{build_toy_task, ToyTaskSet};
use stepdecode::generation::{
    FinishReason, GeneratedStep, GenerationContext, GenerationError, StepGenerator,
};
use stepdecode::harness::{run_experiment, ExperimentSpec, Mode, RunReport, TaskInstance};
use stepdecode::http::HttpJson;
use stepdecode::search::{
    expand_leaf, prune_frontier, run_end_to_end, run_tree_search, token_bound,
};
use stepdecode::selection::{
    ngram_set, ngram_similarity, select_by_ngram, select_by_pairwise, NGramScorer,
    SelfConsistencyScorer, TaskKind,
};
use stepdecode::{
    score_step, CandidatePool, DecodeConfig, NodeId, NodeStatus, PoolOrigin, ReasoningChain,
    ReasoningStep, ReasoningTree, Token, TokenSamplingParams,
};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// Sampling schedule for toy runs: the full answer distribution stays reachable.
fn toy_schedule() -> Vec<TokenSamplingParams> {
    vec![TokenSamplingParams {
        temperature: 1.0,
        top_k: Some(40),
        top_p: Some(1.0),
    }]
}

fn toy_instances(set: &ToyTaskSet) -> Vec<TaskInstance> {
    set.problems
        .iter()
        .map(|p| TaskInstance {
            id: p.id.clone(),
            question: p.question.clone(),
            prompt: p.question.clone(),
            gold_answer: p.gold_answer.clone(),
            task_kind: TaskKind::Numeric,
        })
        .collect()
}

/// Counts every token any call returns.
struct Counting<'a> {
    inner: &'a dyn StepGenerator,
    tokens: AtomicUsize,
    calls: AtomicUsize,
}

impl<'a> Counting<'a> {
    fn new(inner: &'a dyn StepGenerator) -> Self {
        Counting {
            inner,
            tokens: AtomicUsize::new(0),
            calls: AtomicUsize::new(0),
        }
    }
}

impl StepGenerator for Counting<'_> {
    fn name(&self) -> &str {
        "counting"
    }

    fn generate_step(
        &self,
        ctx: &GenerationContext,
        rng: &mut dyn RngCore,
    ) -> Result<GeneratedStep, GenerationError> {
        let out = self.inner.generate_step(ctx, rng)?;
        self.tokens.fetch_add(out.tokens.len(), Ordering::Relaxed);
        self.calls.fetch_add(1, Ordering::Relaxed);
        Ok(out)
    }
}

/// Emits a fixed text per call, chosen by a closure over the context.
struct Fixed<F: Fn(&GenerationContext) -> String + Send + Sync>(F);

impl<F: Fn(&GenerationContext) -> String + Send + Sync> StepGenerator for Fixed<F> {
    fn name(&self) -> &str {
        "fixed"
    }

    fn generate_step(
        &self,
        ctx: &GenerationContext,
        _: &mut dyn RngCore,
    ) -> Result<GeneratedStep, GenerationError> {
        Ok(GeneratedStep {
            tokens: vec![Token::new((self.0)(ctx), -0.5).unwrap()],
            finish_reason: FinishReason::StopMarker,
        })
    }
}

fn criterion_1() -> Outcome {
    let ln3 = 3f64.ln();
    // (logprobs, lambda, hand-computed score)
    let cases: Vec<(Vec<f64>, f64, f64)> = vec![
        (vec![-1.0], 0.0, -1.0),
        (vec![-1.0], 1.0, -1.0),
        (vec![-1.0], 2.0, -1.0),
        (vec![-1.0, -2.0, -3.0], 0.0, -6.0),
        (vec![-1.0, -2.0, -3.0], 1.0, -2.0),
        (vec![-1.0, -2.0, -3.0], 2.0, -2.0 / 3.0),
        (vec![-0.5, -0.5], 0.0, -1.0),
        (vec![-0.5, -0.5], 1.0, -0.5),
        (vec![-0.5, -0.5], 2.0, -0.25),
        (vec![0.0, 0.0, 0.0, 0.0], 1.0, 0.0),
        (vec![-2.0; 4], 0.0, -8.0),
        (vec![-2.0; 4], 1.0, -2.0),
        (vec![-2.0; 4], 2.0, -0.5),
        (vec![-0.1, -0.2, -0.3, -0.4, -0.5], 0.0, -1.5),
        (vec![-0.1, -0.2, -0.3, -0.4, -0.5], 1.0, -0.3),
        (vec![-0.1, -0.2, -0.3, -0.4, -0.5], 2.0, -0.06),
        (vec![-LN_2], 1.0, -LN_2),
        (vec![-LN_2, -LN_2], 0.5, -(2f64.sqrt()) * LN_2),
        (vec![-10.0; 10], 0.0, -100.0),
        (vec![-10.0; 10], 1.0, -10.0),
        (vec![-10.0; 10], 2.0, -1.0),
        (vec![-3.0, -1.0], 1.0, -2.0),
        (vec![-1.5, -2.5, -3.0, -1.0], 0.5, -4.0),
        (vec![-7.0, -1.0, -1.0], 1.5, -(3f64.sqrt())),
        (vec![-ln3, -ln3, -ln3], 1.0, -ln3),
    ];
    for (lp, lambda, want) in &cases {
        let got = score_step(lp, *lambda).map_err(|e| e.to_string())?;
        check(
            (got - want).abs() <= 1e-12,
            format!("{lp:?} lambda {lambda}: got {got}, want {want}"),
        )?;
    }
    check(score_step(&[], 1.0).is_err(), "empty step must be rejected")?;
    Ok(format!("{} analytic cases within 1e-12", cases.len()))
}

fn criterion_2() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for trial in 0..1000 {
        let n = rng.random_range(1..30);
        let capacity = rng.random_range(1..12);
        // coarse values so ties are common
        let leaves: Vec<(NodeId, f64)> = (0..n)
            .map(|i| (NodeId(i * 3 + 1), -(rng.random_range(0..8) as f64) * 0.5))
            .collect();
        let mut order = leaves.clone();
        order.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0 .0.cmp(&b.0 .0)));
        let want: BTreeSet<NodeId> = order.iter().take(capacity).map(|l| l.0).collect();
        let got: BTreeSet<NodeId> = prune_frontier(&leaves, capacity, 1e-9, &mut rng)
            .into_iter()
            .collect();
        check(
            got == want,
            format!("trial {trial}: kept {got:?}, top-b is {want:?}"),
        )?;
    }
    let secs = started.elapsed().as_secs_f64();
    check(secs < 1.0, format!("took {secs:.2}s"))?;
    Ok(format!(
        "1000 vectors match top-b with lowest-id ties in {secs:.3}s"
    ))
}

fn criterion_3() -> Outcome {
    let leaves = [(NodeId(1), 0.0), (NodeId(2), -(3f64.ln()))];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let trials = 100_000;
    let first = (0..trials)
        .filter(|_| prune_frontier(&leaves, 1, 1.0, &mut rng) == vec![NodeId(1)])
        .count();
    let rate = first as f64 / trials as f64;
    check(
        (rate - 0.75).abs() <= 0.01,
        format!("first leaf kept {rate:.4}, expected 0.75 +- 0.01"),
    )?;
    Ok(format!(
        "first leaf kept at rate {rate:.4} over {trials} trials"
    ))
}

fn criterion_4() -> Outcome {
    // Fresh text every call so the chain never repeats or terminates before max depth.
    let generator = Fixed(|ctx: &GenerationContext| {
        format!("w{} v{}", ctx.seed.unwrap_or(0), ctx.prior_steps.len())
    });
    let config = DecodeConfig {
        branching_factor: 1,
        buffer_size: 1,
        step_temperature: 1.0,
        annealing_factor: 0.5,
        max_depth: 11,
        ..DecodeConfig::default()
    };
    let out = run_tree_search(
        "Q: go\nA:",
        "go",
        &generator,
        &ConstraintSet::default(),
        &config,
    )
    .map_err(|e| e.to_string())?;
    let depths: Vec<usize> = out.trace.depths.iter().map(|d| d.depth).collect();
    check(
        depths == (0..=10).collect::<Vec<_>>(),
        format!("recorded depths {depths:?}"),
    )?;
    let mut expected = 1.0;
    for d in &out.trace.depths {
        check(
            (d.temperature - expected).abs() <= 1e-12,
            format!(
                "depth {}: temperature {}, expected {expected}",
                d.depth, d.temperature
            ),
        )?;
        expected *= 0.5;
    }
    Ok("depths 0..=10 record 1.0 * 0.5^d within 1e-12".into())
}

fn criterion_5() -> Outcome {
    let vocab = ["the", "cat", "sat", "on", "a", "mat", "so", "it", "is", "4"];
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let oracle = |texts: &[String]| -> usize {
        let grams = |t: &str| -> Vec<[String; 3]> {
            let w: Vec<String> = t.split_whitespace().map(str::to_lowercase).collect();
            let mut out: Vec<[String; 3]> = Vec::new();
            for i in 0..w.len().saturating_sub(2) {
                let g = [w[i].clone(), w[i + 1].clone(), w[i + 2].clone()];
                if !out.contains(&g) {
                    out.push(g);
                }
            }
            out
        };
        let mut best = (0, -1i64);
        for j in 0..texts.len() {
            let gj = grams(&texts[j]);
            let mut total = 0i64;
            for (k, other) in texts.iter().enumerate() {
                if k != j {
                    let gk = grams(other);
                    total += gj.iter().filter(|g| gk.contains(g)).count() as i64;
                }
            }
            if total > best.1 {
                best = (j, total);
            }
        }
        best.0
    };
    for trial in 0..200 {
        let k = rng.random_range(1..=16);
        let mut pool = CandidatePool::new(PoolOrigin::Tree);
        let mut texts = Vec::with_capacity(k);
        for _ in 0..k {
            let steps: Vec<ReasoningStep> = (0..rng.random_range(1..4))
                .map(|_| {
                    let len = rng.random_range(1..8);
                    let text = (0..len)
                        .map(|_| vocab[rng.random_range(0..vocab.len())])
                        .collect::<Vec<_>>()
                        .join(" ");
                    ReasoningStep::from_tokens(vec![Token::new(text, -1.0).unwrap()], 1.0, false)
                        .unwrap()
                })
                .collect();
            let chain = ReasoningChain::new(steps);
            texts.push(chain.text());
            pool.candidates.push(chain);
        }
        let want = oracle(&texts);
        let sets: Vec<_> = texts.iter().map(|t| ngram_set(t, 3).unwrap()).collect();
        let pairwise = select_by_pairwise(&pool, "trigram", |a, b| {
            Ok(ngram_similarity(&sets[a], &sets[b])? as f64)
        })
        .map_err(|e| e.to_string())?;
        let builtin = select_by_ngram(&pool, 3).map_err(|e| e.to_string())?;
        check(
            pairwise.chosen_index == want && builtin.chosen_index == want,
            format!(
                "pool {trial}: oracle {want}, pairwise {}, ngram {}",
                pairwise.chosen_index, builtin.chosen_index
            ),
        )?;
    }
    Ok("200 random pools agree with the brute-force oracle".into())
}

fn criterion_6() -> Outcome {
    let config = DecodeConfig {
        branching_factor: 3,
        max_regeneration_attempts: 2,
        ..DecodeConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(6);

    // A copy of any ancestor is rejected, whatever that ancestor says.
    for trial in 0..50 {
        let mut tree = ReasoningTree::new("Q: q\nA:", config.clone());
        let mut node = ReasoningTree::ROOT;
        let mut ancestors = Vec::new();
        for d in 0..rng.random_range(1..5) {
            let text = format!(
                "fact{trial}x{d} holds for item{}",
                rng.random_range(0..1000)
            );
            let step = ReasoningStep::from_tokens(
                vec![Token::new(text.clone(), -0.5).unwrap()],
                1.0,
                false,
            )
            .unwrap();
            node = tree.add_child(node, step).map_err(|e| e.to_string())?;
            ancestors.push(text);
        }
        let pick = ancestors[rng.random_range(0..ancestors.len())].clone();
        let generator = Fixed(move |_: &GenerationContext| pick.clone());
        let out = expand_leaf(
            &mut tree,
            node,
            "q",
            &generator,
            &ConstraintSet::default(),
            &config,
            &mut rng,
        )
        .map_err(|e| e.to_string())?;
        check(
            out.produced.is_empty(),
            format!("trial {trial}: ancestor copy accepted"),
        )?;
        check(
            out.generator_calls == 9 && out.pruned_by_constraint == 9,
            format!("trial {trial}: {out:?}"),
        )?;
    }

    // Every attempt on every branch violates: three attempts each, then the node is exhausted.
    let generator = Fixed(|_: &GenerationContext| "x = 1".to_string());
    let steady = Fixed(|ctx: &GenerationContext| format!("x = {}", 2 + ctx.prior_steps.len()));
    let single = DecodeConfig {
        branching_factor: 1,
        buffer_size: 4,
        max_depth: 4,
        ..config.clone()
    };
    let out = run_tree_search(
        "Q: x = 1\nA:",
        "x = 1",
        &generator,
        &ConstraintSet::default(),
        &single,
    )
    .map_err(|e| e.to_string())?;
    let root = out
        .tree
        .node(ReasoningTree::ROOT)
        .map_err(|e| e.to_string())?;
    check(
        root.status == NodeStatus::Exhausted,
        format!("root status {:?}", root.status),
    )?;
    check(root.children.is_empty(), "exhausted root has children")?;
    check(
        out.trace.generator_calls == 3,
        format!("{} calls, expected 3", out.trace.generator_calls),
    )?;
    check(out.trace.depths.len() == 1, "exhausted node was revisited")?;

    // Contradicting the question's assignment is also a violation.
    let out = run_tree_search(
        "Q: x = 1\nA:",
        "x = 1",
        &steady,
        &ConstraintSet::default(),
        &single,
    )
    .map_err(|e| e.to_string())?;
    check(
        out.tree.nodes.len() == 1 && out.trace.generator_calls == 3,
        "contradiction was accepted",
    )?;
    Ok("ancestor copies always rejected; three failed attempts exhaust the branch".into())
}

fn criterion_7() -> Outcome {
    let set = build_toy_task(7, 100);
    let lm = ToyLm::new(set.spec.clone()).map_err(|e| e.to_string())?;
    let mut violations = 0;
    let mut trees = 0;
    for (i, p) in set.problems.iter().enumerate() {
        let branching = [2, 4, 8][i % 3];
        let buffer = [4, 8, 16][(i / 3) % 3];
        let config = DecodeConfig {
            branching_factor: branching,
            buffer_size: buffer,
            rng_seed: i as u64,
            token_sampling_schedule: toy_schedule(),
            ..DecodeConfig::default()
        };
        let out = run_tree_search(
            &p.question,
            &p.question,
            &lm,
            &ConstraintSet::default(),
            &config,
        )
        .map_err(|e| e.to_string())?;
        trees += 1;
        for depth in 1..=out.tree.nodes.iter().map(|n| n.depth).max().unwrap_or(0) {
            let survivors = out
                .tree
                .nodes
                .iter()
                .filter(|n| n.depth == depth && n.status != NodeStatus::Pruned)
                .count();
            if survivors > buffer {
                violations += 1;
            }
        }
        violations += out
            .trace
            .depths
            .iter()
            .filter(|d| d.frontier_after > buffer)
            .count();
        violations += out
            .tree
            .nodes
            .iter()
            .filter(|n| n.children.len() > branching)
            .count();
        if out.pool.len() > buffer {
            violations += 1;
        }
    }
    check(violations == 0, format!("{violations} violations"))?;
    Ok(format!("{trees} trees, 0 violations"))
}

fn criterion_8() -> Outcome {
    let set = build_toy_task(8, 30);
    let lm = ToyLm::new(set.spec.clone()).map_err(|e| e.to_string())?;
    let mut checked = 0;
    for (i, p) in set.problems.iter().enumerate() {
        let config = DecodeConfig {
            branching_factor: [1, 2, 4, 8][i % 4],
            buffer_size: [1, 4, 8][i % 3],
            max_depth: [2, 3, 16][i % 3],
            max_step_tokens: 64,
            rng_seed: i as u64,
            token_sampling_schedule: toy_schedule(),
            ..DecodeConfig::default()
        };
        let counting = Counting::new(&lm);
        let out = run_tree_search(
            &p.question,
            &p.question,
            &counting,
            &ConstraintSet::default(),
            &config,
        )
        .map_err(|e| e.to_string())?;
        let counted = counting.tokens.load(Ordering::Relaxed);
        let per_depth: usize = out.trace.depths.iter().map(|d| d.tokens).sum();
        check(
            out.trace.total_generated_tokens == counted,
            format!(
                "tree {i}: reported {} counted {counted}",
                out.trace.total_generated_tokens
            ),
        )?;
        check(
            per_depth == counted,
            format!("tree {i}: per-depth sum {per_depth} counted {counted}"),
        )?;
        check(
            out.trace.generator_calls == counting.calls.load(Ordering::Relaxed),
            format!("tree {i}: call count"),
        )?;
        let bound = config.branching_factor
            * config.buffer_size
            * config.max_depth
            * config.max_step_tokens
            * (1 + config.max_regeneration_attempts);
        check(
            bound == token_bound(&config) && counted <= bound,
            format!("tree {i}: {counted} tokens over bound {bound}"),
        )?;

        let counting = Counting::new(&lm);
        let e2e = run_end_to_end(&p.question, &counting, &config, 4).map_err(|e| e.to_string())?;
        check(
            e2e.total_generated_tokens == counting.tokens.load(Ordering::Relaxed),
            format!("end-to-end {i}: token total"),
        )?;
        checked += 2;
    }
    Ok(format!(
        "{checked} runs: totals equal the per-call sum and stay under the bound"
    ))
}

fn criterion_9(reports: &mut Vec<RunReport>) -> Outcome {
    let started = Instant::now();
    let set = build_toy_task(9, 500);
    let data = toy_instances(&set);
    let lm = ToyLm::new(set.spec.clone()).map_err(|e| e.to_string())?;
    let constraints = ConstraintSet::default();
    let base = DecodeConfig {
        branching_factor: 4,
        buffer_size: 8,
        rng_seed: 9,
        token_sampling_schedule: toy_schedule(),
        ..DecodeConfig::default()
    };
    let run = |spec: &ExperimentSpec, scorer: &dyn stepdecode::selection::Scorer| {
        run_experiment(&data, spec, scorer, &lm, &constraints)
            .map(|o| o.report)
            .map_err(|e| e.to_string())
    };

    let greedy_spec = ExperimentSpec {
        samples: 1,
        ..ExperimentSpec::new(
            Mode::EndToEnd,
            DecodeConfig {
                token_sampling_schedule: vec![TokenSamplingParams::greedy()],
                ..base.clone()
            },
        )
    };
    let greedy = run(&greedy_spec, &SelfConsistencyScorer)?;
    let tree = run(
        &ExperimentSpec::new(Mode::Tree, base.clone()),
        &NGramScorer { n: 3 },
    )?;
    let selfcons = run(
        &ExperimentSpec::new(Mode::EndToEnd, base.clone()),
        &SelfConsistencyScorer,
    )?;
    let secs = started.elapsed().as_secs_f64();
    let traps = set.problems.iter().filter(|p| !p.greedy_correct).count();
    let line = format!(
        "greedy {:.3}, tree+trigram {:.3}, self-consistency@16 {:.3} ({} trap problems, {:.1}s)",
        greedy.accuracy, tree.accuracy, selfcons.accuracy, traps, secs
    );
    let ok = tree.accuracy > greedy.accuracy && selfcons.accuracy > greedy.accuracy && secs < 120.0;
    let failed = greedy.failed + tree.failed + selfcons.failed;
    reports.extend([greedy, tree, selfcons]);
    check(failed == 0, format!("{failed} instances failed; {line}"))?;
    check(ok, line.clone())?;
    Ok(line)
}

fn criterion_10(reports: &[RunReport]) -> Outcome {
    for r in reports {
        check(
            r.accuracy <= r.upper_bound_accuracy,
            format!(
                "{} {:?}: accuracy {} above upper bound {}",
                r.scorer, r.mode, r.accuracy, r.upper_bound_accuracy
            ),
        )?;
        let correct = r.records.iter().filter(|x| x.correct).count();
        let upper = r.records.iter().filter(|x| x.upper_bound).count();
        check(
            r.records.iter().all(|x| !x.correct || x.upper_bound),
            "a correct record lacks the upper bound flag",
        )?;
        check(correct <= upper, "record counts disagree")?;
    }
    Ok(format!(
        "{} reports satisfy accuracy <= upper bound",
        reports.len()
    ))
}

fn run_binary(args: &[&str], cwd: &Path) -> Result<Vec<u8>, String> {
    let o = Command::new(env!("CARGO_BIN_EXE_stepdecode"))
        .args(args)
        .current_dir(cwd)
        .output()
        .map_err(|e| e.to_string())?;
    if !o.status.success() {
        return Err(format!("{args:?}: {}", String::from_utf8_lossy(&o.stderr)));
    }
    Ok(o.stdout)
}

fn read_dir_sorted(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        out.push((
            path.file_name().unwrap().to_string_lossy().into_owned(),
            std::fs::read(&path).map_err(|e| e.to_string())?,
        ));
    }
    out.sort();
    Ok(out)
}

fn criterion_11(reports: &mut Vec<RunReport>) -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    run_binary(
        &[
            "toygen",
            "--count",
            "40",
            "--seed",
            "11",
            "--out",
            "toy.jsonl",
        ],
        d,
    )?;
    let mut compared = 0;
    for format in ["json", "dot"] {
        let run = |tag: &str| -> Result<(), String> {
            let report = format!("{tag}.json");
            let trees = format!("trees-{tag}");
            run_binary(
                &[
                    "run",
                    "toy.jsonl",
                    "--top-p",
                    "1",
                    "--seed",
                    "17",
                    "--out",
                    &report,
                    "--emit-tree",
                    &trees,
                    "--tree-format",
                    format,
                ],
                d,
            )?;
            Ok(())
        };
        run(&format!("a-{format}"))?;
        run(&format!("b-{format}"))?;
        let a = std::fs::read(d.join(format!("a-{format}.json"))).map_err(|e| e.to_string())?;
        let b = std::fs::read(d.join(format!("b-{format}.json"))).map_err(|e| e.to_string())?;
        check(a == b, "reports differ")?;
        let ta = read_dir_sorted(&d.join(format!("trees-a-{format}")))?;
        let tb = read_dir_sorted(&d.join(format!("trees-b-{format}")))?;
        check(
            ta.len() == 40 && ta == tb,
            format!("{format} tree exports differ"),
        )?;
        compared += 1 + ta.len();
        reports.push(serde_json::from_slice(&a).map_err(|e| e.to_string())?);
    }
    let e2e = [
        "run",
        "toy.jsonl",
        "--mode",
        "end2end",
        "--scorer",
        "selfcons",
        "--top-p",
        "1",
        "--seed",
        "17",
    ];
    let a = run_binary(&e2e, d)?;
    check(a == run_binary(&e2e, d)?, "end-to-end reports differ")?;
    reports.push(serde_json::from_slice(&a).map_err(|e| e.to_string())?);
    Ok(format!(
        "{} files byte-identical across repeated runs",
        compared + 1
    ))
}

fn criterion_12() -> Outcome {
    // Model-scale accuracies and GPU-hours are not reproduced here; the remote
    // path is checked for protocol conformance against a stub server.
    let server = common::StubServer::start(|body, _| {
        let depth = body["prompt"]
            .as_str()
            .unwrap_or("")
            .matches("step")
            .count();
        let seed = body["seed"].as_u64().unwrap_or(0) % 97;
        let text = if depth >= 1 {
            format!(" The answer is {}.", seed % 3)
        } else {
            format!(" step {seed} begins")
        };
        (200, common::completion(&[text.as_str()], &[-0.2], "stop"))
    });
    let generator = RemoteGenerator::new(
        Box::new(HttpJson::new(&server.url, Duration::from_secs(5))),
        1,
    );
    let config = DecodeConfig {
        branching_factor: 2,
        buffer_size: 4,
        ..DecodeConfig::default()
    };
    let out = run_tree_search(
        "Q: q\nA:",
        "q",
        &generator,
        &ConstraintSet::default(),
        &config,
    )
    .map_err(|e| e.to_string())?;
    let requests = server.requests();
    check(!out.pool.is_empty(), "remote search produced no chains")?;
    check(
        out.trace.generator_calls == requests.len(),
        "call count differs from requests served",
    )?;
    check(
        requests
            .iter()
            .all(|r| r["logprobs"] == true && r["stop"].is_array()),
        "request shape",
    )?;
    check(
        out.trace.total_generated_tokens == requests.len(),
        "one canned token per response",
    )?;
    Ok(format!(
        "model-scale accuracies and GPU-hours not reproduced (declared); remote protocol verified over {} stub requests",
        requests.len()
    ))
}

#[test]
fn acceptance() {
    let mut reports = Vec::new();
    let mut results: Vec<(usize, &str, Outcome)> = vec![
        (1, "step score exactness", criterion_1()),
        (2, "greedy pruning limit", criterion_2()),
        (3, "pruning sampling fidelity", criterion_3()),
        (4, "temperature annealing", criterion_4()),
        (5, "pairwise selection oracle", criterion_5()),
        (6, "constraint semantics", criterion_6()),
        (7, "buffer and branching bounds", criterion_7()),
        (8, "token accounting", criterion_8()),
        (9, "toy task gain over greedy", criterion_9(&mut reports)),
    ];
    // 10 checks every report the other criteria produced, so it runs after 11.
    let determinism = criterion_11(&mut reports);
    results.push((10, "upper bound ordering", criterion_10(&reports)));
    results.push((11, "run determinism", determinism));
    results.push((12, "model-scale results", criterion_12()));

    // bypasses libtest capture
    let mut stdout = std::io::stdout().lock();
    let mut failures = 0;
    for (n, name, outcome) in &results {
        match outcome {
            Ok(detail) => {
                let _ = writeln!(stdout, "criterion {n:>2} PASS  {name}: {detail}");
            }
            Err(detail) => {
                failures += 1;
                let _ = writeln!(stdout, "criterion {n:>2} FAIL  {name}: {detail}");
            }
        }
    }
    assert_eq!(failures, 0, "{failures} acceptance criteria failed");
}
