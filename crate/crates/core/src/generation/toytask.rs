//! Synthetic multi-step arithmetic word problems with a matching toy grammar.
//!
//! Every problem has three answers reachable through the grammar: the correct one with
//! total path probability 0.4 and two distractors with 0.3 each. The correct mass is
//! split over two paraphrased paths. In a *trap* problem the split happens at the first
//! step, so each correct first step (0.2) loses to each distractor (0.3) and greedy
//! decoding answers wrong. Otherwise the correct first step is modal (0.4) and the split
//! happens one step later, so greedy decoding answers right.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::toy::{Production, ToyLmSpec};

const NAMES: [&str; 8] = ["Tom", "Ana", "Ravi", "Mei", "Olu", "Sara", "Ivan", "Lena"];
const ITEMS: [&str; 8] = [
    "apples", "marbles", "stickers", "books", "coins", "pencils", "shells", "cards",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyProblem {
    pub id: String,
    pub question: String,
    pub gold_answer: String,
    /// Arithmetic that yields the gold answer, e.g. "15 + 3 - 6".
    pub expression: String,
    /// Whether greedy decoding reaches the gold answer.
    pub greedy_correct: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyTaskSet {
    pub problems: Vec<ToyProblem>,
    pub spec: ToyLmSpec,
}

#[derive(Debug, Clone, Copy)]
pub struct ToyTaskOptions {
    /// Expected fraction of problems on which greedy decoding is wrong. Majority vote
    /// over 16 samples at answer mass 0.4/0.3/0.3 is right about 54% of the time, so
    /// greedy must fail on well over half the problems for voting to clearly win.
    pub trap_fraction: f64,
}

impl Default for ToyTaskOptions {
    fn default() -> Self {
        ToyTaskOptions {
            trap_fraction: 0.75,
        }
    }
}

pub fn build_toy_task(seed: u64, count: usize) -> ToyTaskSet {
    build_toy_task_with(seed, count, ToyTaskOptions::default())
}

pub fn build_toy_task_with(seed: u64, count: usize, opts: ToyTaskOptions) -> ToyTaskSet {
    assert!(count >= 1, "count must be >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spec = ToyLmSpec {
        seed,
        ..ToyLmSpec::default()
    };
    let mut problems = Vec::with_capacity(count);
    for idx in 0..count {
        let trap = rng.random::<f64>() < opts.trap_fraction;
        let (problem, states) = one_problem(seed, idx, trap, &mut rng);
        let start = format!("p{idx}.root");
        for (name, prods) in states {
            spec.states.insert(name, prods);
        }
        spec.starts.insert(problem.question.clone(), start);
        spec.answer_table
            .insert(problem.id.clone(), problem.gold_answer.clone());
        problems.push(problem);
    }
    ToyTaskSet { problems, spec }
}

fn one_problem(
    seed: u64,
    idx: usize,
    trap: bool,
    rng: &mut ChaCha8Rng,
) -> (ToyProblem, Vec<(String, Vec<Production>)>) {
    let who = NAMES[rng.random_range(0..NAMES.len())];
    let item = ITEMS[rng.random_range(0..ITEMS.len())];
    let a: i64 = rng.random_range(10..60);
    let b: i64 = rng.random_range(2..20);
    let c: i64 = rng.random_range(2..a);
    let s = a + b;
    let r = s - c;
    // arithmetic slip in the first step
    let slip = *[-1i64, 1, 2].choose(rng).expect("non-empty");
    let s1 = s + slip;
    let r1 = s1 - c;
    // misread "gives away" as "receives"
    let r2 = s + c;

    let id = format!("toy-{seed}-{idx:04}");
    let question = format!(
        "[{id}] {who} has {a} {item}. {who} buys {b} more and then gives away {c}. \
         How many {item} does {who} have now?"
    );
    let st = |n: &str| format!("p{idx}.{n}");

    let ca = format!("{who} starts with {a} {item} and buys {b} more , so {a} + {b} = {s} .");
    let cb = format!("Buying {b} more gives {who} {a} + {b} = {s} {item} .");
    let w1 = format!("{who} has {a} {item} plus {b} which makes {s1} .");
    let w2 = format!("{who} gets {b} extra {item} on top of {a} .");
    let mid_a = format!("Then {who} gives away {c} , so {s} - {c} = {r} .");
    let mid_b = format!("Giving away {c} leaves {who} with {s} - {c} = {r} {item} .");
    let mid_w1 = format!("After giving away {c} , {who} keeps {s1} - {c} = {r1} .");
    let mid_w2 = format!("Receiving {c} more means {s} + {c} = {r2} .");
    let ans = |v: i64| format!("The answer is {v} .");

    let mut root = vec![
        Production::new(w1, Some(&st("mid_w1")), 0.3),
        Production::new(w2, Some(&st("mid_w2")), 0.3),
    ];
    let mut states = Vec::new();
    if trap {
        root.push(Production::new(ca, Some(&st("mid_c")), 0.2));
        root.push(Production::new(cb, Some(&st("mid_c")), 0.2));
        states.push((
            st("mid_c"),
            vec![Production::new(mid_a, Some(&st("ans_c")), 1.0)],
        ));
    } else {
        root.push(Production::new(ca, Some(&st("mid_c")), 0.4));
        states.push((
            st("mid_c"),
            vec![
                Production::new(mid_a, Some(&st("ans_c")), 0.5),
                Production::new(mid_b, Some(&st("ans_c")), 0.5),
            ],
        ));
    }
    root.shuffle(rng);
    states.push((st("root"), root));
    states.push((st("ans_c"), vec![Production::new(ans(r), None, 1.0)]));
    states.push((
        st("mid_w1"),
        vec![Production::new(mid_w1, Some(&st("ans_w1")), 1.0)],
    ));
    states.push((st("ans_w1"), vec![Production::new(ans(r1), None, 1.0)]));
    states.push((
        st("mid_w2"),
        vec![Production::new(mid_w2, Some(&st("ans_w2")), 1.0)],
    ));
    states.push((st("ans_w2"), vec![Production::new(ans(r2), None, 1.0)]));

    let problem = ToyProblem {
        id,
        question,
        gold_answer: r.to_string(),
        expression: format!("{a} + {b} - {c}"),
        greedy_correct: !trap,
    };
    (problem, states)
}
