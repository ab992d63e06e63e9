//! Constructing admissible colorings by iterated cuts.
//!
//! The engine keeps a multiset `S` of uncolored complete components
//! (initially `{K_n}`) and a residual count per color. Each step removes a
//! largest component `K_a`, splits it as `K_{a1} + K_{a2}`, colors all
//! `a1*a2` cut edges with one color `i` whose residual covers that cost,
//! and decrements the residual. A branch is stuck at `K_a` when every
//! residual is below `a-1`, the cheapest possible cut. The search
//! backtracks over (split, color) choices in a strategy-specific order,
//! pruning repeated `(S, residual)` states, until some branch decomposes
//! everything into singletons.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::bounds;
use crate::coloring::{ColoringBuilder, EdgeColoring};
use crate::seqcore::{binom2, GallaiSequence};

pub const DEFAULT_CUT_BUDGET: u64 = 1_000_000;

/// Choice ordering for the backtracking search.
///
/// * `GreedyLargest`: colors by descending residual, splits most balanced
///   first. The default.
/// * `StarFirst`: splits `1 + (a-1)` first; for each split, colors whose
///   residual equals the cost exactly come before larger ones.
/// * `Halving`: for an odd color count `2j-1` on `n = 2*t(j)` vertices with
///   a dominant first class, cut into two halves of `t(j)` vertices and
///   route the remaining classes alternately into the two halves. Refused
///   when the preconditions fail.
/// * `PaperOrder`: splits most balanced first, colors by ascending index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    GreedyLargest,
    StarFirst,
    Halving,
    PaperOrder,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::GreedyLargest,
        Strategy::StarFirst,
        Strategy::Halving,
        Strategy::PaperOrder,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::GreedyLargest => "greedy_largest",
            Strategy::StarFirst => "star_first",
            Strategy::Halving => "halving",
            Strategy::PaperOrder => "paper_order",
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown strategy {0:?}; expected one of greedy_largest, star_first, halving, paper_order")]
pub struct StrategyParseError(String);

impl FromStr for Strategy {
    type Err = StrategyParseError;

    fn from_str(s: &str) -> Result<Self, StrategyParseError> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| StrategyParseError(s.to_string()))
    }
}

/// One cut: a component of size `a` split into `a1 + a2`, the `a1*a2`
/// cross edges taking `color` (0-based index into the sequence order).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CutStep {
    pub a: i64,
    pub a1: i64,
    pub a2: i64,
    pub color: usize,
}

impl CutStep {
    pub fn cost(&self) -> i64 {
        self.a1 * self.a2
    }
}

/// Search state snapshot before a step. `comps` lists component sizes of at
/// least 2 in non-increasing order; singletons are never cut and are left
/// implicit. `step` is `None` on the terminal node: finished when `comps`
/// is empty, stuck otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceNode {
    pub depth: usize,
    pub comps: Vec<i64>,
    pub residual: Vec<i64>,
    pub step: Option<CutStep>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutTrace {
    pub n: i64,
    pub k: usize,
    pub nodes: Vec<TraceNode>,
}

impl CutTrace {
    pub fn steps(&self) -> Vec<CutStep> {
        self.nodes.iter().filter_map(|node| node.step).collect()
    }

    /// Deterministic replay of the recorded cuts onto concrete vertices.
    pub fn materialize(&self) -> EdgeColoring {
        realize(self.n as usize, self.k, &self.steps())
    }

    pub fn contains_state(&self, comps: &[i64], residual: &[i64]) -> bool {
        self.nodes
            .iter()
            .any(|node| node.comps == comps && node.residual == residual)
    }
}

impl fmt::Display for CutTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for node in &self.nodes {
            let comps: Vec<String> = node.comps.iter().map(|c| c.to_string()).collect();
            let residual: Vec<String> = node.residual.iter().map(|r| r.to_string()).collect();
            write!(
                f,
                "{} | {{{}}} | {} | ",
                node.depth,
                comps.join(","),
                residual.join(",")
            )?;
            match node.step {
                Some(step) => writeln!(
                    f,
                    "cut({}->{}+{}, color {})",
                    step.a,
                    step.a1,
                    step.a2,
                    step.color + 1
                )?,
                None if node.comps.is_empty() => writeln!(f, "done")?,
                None => writeln!(f, "stuck({})", node.comps[0])?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrreducibleReport {
    /// Smallest component size at which any explored branch got stuck.
    pub stuck_size: i64,
    /// Path to a node stuck at `stuck_size`.
    pub trace: CutTrace,
}

#[derive(Debug)]
pub enum RunOutcome {
    Success {
        coloring: EdgeColoring,
        trace: CutTrace,
    },
    Irreducible(IrreducibleReport),
    BudgetExhausted {
        nodes_explored: u64,
    },
    /// The strategy's preconditions do not apply to this input.
    Refused {
        reason: String,
    },
}

impl RunOutcome {
    pub fn is_success(&self) -> bool {
        matches!(self, RunOutcome::Success { .. })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CutError {
    #[error("node budget of {budget} exhausted after exploring {explored} states")]
    BudgetExhausted { budget: u64, explored: u64 },
}

fn insert_component(comps: &mut Vec<i64>, size: i64) {
    if size >= 2 {
        let pos = comps.partition_point(|&c| c > size);
        comps.insert(pos, size);
    }
}

fn remove_component(comps: &mut Vec<i64>, size: i64) {
    if size >= 2 {
        let pos = comps
            .iter()
            .position(|&c| c == size)
            .expect("component present");
        comps.remove(pos);
    }
}

/// All legal `(a1, color)` choices for cutting `K_a`, in strategy order.
/// `a1` ranges over `1..=a/2`; a choice is legal when `a1*(a-a1)` fits in
/// that color's residual.
fn legal_choices(a: i64, residual: &[i64], strategy: Strategy) -> Vec<(i64, usize)> {
    let half = a / 2;
    let mut out = Vec::new();
    match strategy {
        Strategy::PaperOrder => {
            for a1 in (1..=half).rev() {
                let cost = a1 * (a - a1);
                for (i, &r) in residual.iter().enumerate() {
                    if r >= cost {
                        out.push((a1, i));
                    }
                }
            }
        }
        Strategy::GreedyLargest => {
            let mut colors: Vec<usize> = (0..residual.len()).collect();
            colors.sort_by_key(|&i| (std::cmp::Reverse(residual[i]), i));
            for &i in &colors {
                for a1 in (1..=half).rev() {
                    let cost = a1 * (a - a1);
                    if residual[i] >= cost {
                        out.push((a1, i));
                    }
                }
            }
        }
        Strategy::StarFirst => {
            for a1 in 1..=half {
                let cost = a1 * (a - a1);
                for (i, &r) in residual.iter().enumerate() {
                    if r == cost {
                        out.push((a1, i));
                    }
                }
                let mut over: Vec<usize> = (0..residual.len())
                    .filter(|&i| residual[i] > cost)
                    .collect();
                over.sort_by_key(|&i| (std::cmp::Reverse(residual[i]), i));
                for i in over {
                    out.push((a1, i));
                }
            }
        }
        Strategy::Halving => unreachable!("halving does not use the generic search"),
    }
    out
}

struct CutSearch {
    strategy: Strategy,
    budget: u64,
    explored: u64,
    out_of_budget: bool,
    visited: HashSet<(Vec<i64>, Vec<i64>)>,
    path: Vec<CutStep>,
    best_stuck: Option<(i64, Vec<CutStep>)>,
}

impl CutSearch {
    fn new(strategy: Strategy, budget: u64) -> Self {
        CutSearch {
            strategy,
            budget,
            explored: 0,
            out_of_budget: false,
            visited: HashSet::new(),
            path: Vec::new(),
            best_stuck: None,
        }
    }

    /// Depth-first over cut choices; true when every component reached
    /// singletons. On success `self.path` holds the winning steps.
    fn go(&mut self, comps: &mut Vec<i64>, residual: &mut Vec<i64>) -> bool {
        if comps.is_empty() {
            debug_assert!(residual.iter().all(|&r| r == 0), "leftover residual");
            return true;
        }
        if self.explored >= self.budget {
            self.out_of_budget = true;
            return false;
        }
        self.explored += 1;
        if !self.visited.insert((comps.clone(), residual.clone())) {
            return false;
        }
        let a = comps[0];
        let choices = legal_choices(a, residual, self.strategy);
        if choices.is_empty() {
            if self.best_stuck.as_ref().is_none_or(|(s, _)| a < *s) {
                self.best_stuck = Some((a, self.path.clone()));
            }
            return false;
        }
        for (a1, color) in choices {
            let a2 = a - a1;
            let step = CutStep { a, a1, a2, color };
            self.path.push(step);
            comps.remove(0);
            insert_component(comps, a1);
            insert_component(comps, a2);
            residual[color] -= step.cost();
            let won = self.go(comps, residual);
            residual[color] += step.cost();
            remove_component(comps, a1);
            remove_component(comps, a2);
            insert_component(comps, a);
            if won {
                return true;
            }
            self.path.pop();
            if self.out_of_budget {
                return false;
            }
        }
        false
    }
}

/// Rebuilds the node-by-node trace for a step list, checking along the way
/// that each step cuts a current largest component and can pay its cost.
fn trace_from_steps(n: i64, counts: &[i64], steps: &[CutStep]) -> CutTrace {
    let mut comps = Vec::new();
    insert_component(&mut comps, n);
    let mut residual = counts.to_vec();
    let mut nodes = Vec::with_capacity(steps.len() + 1);
    for (depth, &step) in steps.iter().enumerate() {
        assert_eq!(step.a, comps[0], "step must cut a largest component");
        assert!(step.a1 >= 1 && step.a1 <= step.a2 && step.a1 + step.a2 == step.a);
        assert!(residual[step.color] >= step.cost(), "cut cost exceeds residual");
        nodes.push(TraceNode {
            depth,
            comps: comps.clone(),
            residual: residual.clone(),
            step: Some(step),
        });
        remove_component(&mut comps, step.a);
        insert_component(&mut comps, step.a1);
        insert_component(&mut comps, step.a2);
        residual[step.color] -= step.cost();
    }
    nodes.push(TraceNode {
        depth: steps.len(),
        comps,
        residual,
        step: None,
    });
    CutTrace {
        n,
        k: counts.len(),
        nodes,
    }
}

/// Replays cuts onto concrete vertices. Among equal-size components the one
/// holding the smallest vertex is cut first, and the first part takes the
/// lowest `a1` vertices, so replay is deterministic.
pub(crate) fn realize(n: usize, k: usize, steps: &[CutStep]) -> EdgeColoring {
    let mut comps: Vec<Vec<usize>> = if n >= 2 { vec![(0..n).collect()] } else { Vec::new() };
    let mut builder = ColoringBuilder::new(n, k.max(1));
    for step in steps {
        let idx = comps
            .iter()
            .enumerate()
            .filter(|(_, c)| c.len() == step.a as usize)
            .min_by_key(|(_, c)| c[0])
            .map(|(i, _)| i)
            .expect("component of the step's size exists");
        let comp = comps.swap_remove(idx);
        let (part1, part2) = comp.split_at(step.a1 as usize);
        for &u in part1 {
            for &v in part2 {
                builder.set(u, v, (step.color + 1) as u32);
            }
        }
        if part1.len() >= 2 {
            comps.push(part1.to_vec());
        }
        if part2.len() >= 2 {
            comps.push(part2.to_vec());
        }
    }
    builder.finish()
}

/// Runs the cut search for `s` under the given strategy and node budget.
pub fn run_cut_algorithm(s: &GallaiSequence, strategy: Strategy, budget: u64) -> RunOutcome {
    if strategy == Strategy::Halving {
        return halving_construct(s, budget);
    }
    let mut comps = Vec::new();
    insert_component(&mut comps, s.n());
    let mut residual = s.counts().to_vec();
    let mut search = CutSearch::new(strategy, budget);
    if search.go(&mut comps, &mut residual) {
        let steps = search.path;
        let trace = trace_from_steps(s.n(), s.counts(), &steps);
        let coloring = realize(s.n() as usize, s.k(), &steps);
        return RunOutcome::Success { coloring, trace };
    }
    if search.out_of_budget {
        return RunOutcome::BudgetExhausted {
            nodes_explored: search.explored,
        };
    }
    let (stuck_size, steps) = search.best_stuck.expect("failed search saw a stuck node");
    let trace = trace_from_steps(s.n(), s.counts(), &steps);
    RunOutcome::Irreducible(IrreducibleReport { stuck_size, trace })
}

/// Smallest component size at which the search can get stuck, over every
/// branch of the cut tree; 1 when some branch decomposes fully.
pub fn lowest_stopping_point(s: &GallaiSequence, budget: u64) -> Result<i64, CutError> {
    match run_cut_algorithm(s, Strategy::GreedyLargest, budget) {
        RunOutcome::Success { .. } => Ok(1),
        RunOutcome::Irreducible(report) => Ok(report.stuck_size),
        RunOutcome::BudgetExhausted { nodes_explored } => Err(CutError::BudgetExhausted {
            budget,
            explored: nodes_explored,
        }),
        RunOutcome::Refused { .. } => unreachable!("greedy order is never refused"),
    }
}

/// Known least vertex counts beyond which every class-size prescription on
/// that many colors is realizable; the halving maneuver leans on them.
fn guaranteed_threshold(colors: usize) -> Option<i64> {
    match colors {
        3 => Some(5),
        4 => Some(8),
        5 => Some(10),
        _ => None,
    }
}

/// Cuts `K_{2t}` into two `K_t` halves paid by the dominant class, then
/// routes the classes at even sorted positions into one half and the odd
/// positions into the other, topping both halves up with the dominant
/// class's remainder. Each half is finished by the greedy search.
fn halving_construct(s: &GallaiSequence, budget: u64) -> RunOutcome {
    let refuse = |reason: String| RunOutcome::Refused { reason };
    let key = s.canonical_key();
    let k_used = key.counts.len();
    if k_used < 5 || k_used.is_multiple_of(2) {
        return refuse(format!(
            "halving needs an odd number of used colors of at least 5, got {k_used}"
        ));
    }
    let j = k_used.div_ceil(2);
    let Some(t) = guaranteed_threshold(j) else {
        return refuse(format!("no guaranteed threshold is known for {j} colors"));
    };
    if key.n != 2 * t {
        return refuse(format!(
            "halving with {k_used} colors needs n = {}, got {}",
            2 * t,
            key.n
        ));
    }
    let dominant_need = t * t;
    if key.counts[0] < dominant_need {
        return refuse(format!(
            "largest class has {} edges, the cross cut needs {dominant_need}",
            key.counts[0]
        ));
    }

    // Positions sorted by residual after paying for the cross cut.
    let mut residual = key.counts.clone();
    residual[0] -= dominant_need;
    let mut tagged: Vec<(i64, usize)> = residual.iter().copied().zip(0..k_used).collect();
    tagged.sort_by_key(|&(amount, idx)| (std::cmp::Reverse(amount), idx));

    let half_edges = binom2(t).expect("desk scale");
    let sum_even: i64 = (1..k_used).step_by(2).map(|i| tagged[i].0).sum();
    let sum_odd: i64 = (2..k_used).step_by(2).map(|i| tagged[i].0).sum();
    let fill_even = half_edges - sum_even;
    let fill_odd = half_edges - sum_odd;
    assert!(fill_even >= 0 && fill_odd >= 0, "sorted halves fit by pairing");
    assert_eq!(fill_even + fill_odd, tagged[0].0, "dominant remainder splits exactly");

    let half_classes = |positions: std::iter::StepBy<std::ops::Range<usize>>, fill: i64| {
        let mut classes: Vec<(i64, usize)> = positions
            .map(|i| tagged[i])
            .filter(|&(amount, _)| amount > 0)
            .collect();
        if fill > 0 {
            classes.push((fill, tagged[0].1));
        }
        classes.sort_by_key(|&(amount, idx)| (std::cmp::Reverse(amount), idx));
        classes
    };
    let halves = [
        half_classes((1..k_used).step_by(2), fill_even),
        half_classes((2..k_used).step_by(2), fill_odd),
    ];

    let mut half_steps: [Vec<CutStep>; 2] = [Vec::new(), Vec::new()];
    for (side, classes) in halves.iter().enumerate() {
        let amounts: Vec<i64> = classes.iter().map(|&(amount, _)| amount).collect();
        let sub = GallaiSequence::from_sorted_unchecked(t, amounts);
        match run_cut_algorithm(&sub, Strategy::GreedyLargest, budget) {
            RunOutcome::Success { trace, .. } => {
                half_steps[side] = trace
                    .steps()
                    .into_iter()
                    .map(|step| CutStep {
                        color: classes[step.color].1,
                        ..step
                    })
                    .collect();
            }
            RunOutcome::BudgetExhausted { nodes_explored } => {
                return RunOutcome::BudgetExhausted {
                    nodes_explored,
                };
            }
            _ => {
                return refuse(format!(
                    "half {side} resisted cut construction; its classes were {classes:?}"
                ));
            }
        }
    }

    // Interleave so a globally largest component is always cut first; each
    // half's own step sizes are non-increasing, so a merge by size works.
    let mut steps = vec![CutStep {
        a: key.n,
        a1: t,
        a2: t,
        color: 0,
    }];
    let [mut ia, mut ib] = [0usize, 0usize];
    let [sa, sb] = &half_steps;
    while ia < sa.len() || ib < sb.len() {
        let take_a = match (sa.get(ia), sb.get(ib)) {
            (Some(x), Some(y)) => x.a >= y.a,
            (Some(_), None) => true,
            _ => false,
        };
        if take_a {
            steps.push(sa[ia]);
            ia += 1;
        } else {
            steps.push(sb[ib]);
            ib += 1;
        }
    }

    // The search above ran per half; rebuild the global trace and coloring.
    let stripped = key.to_sequence();
    let trace = trace_from_steps(stripped.n(), stripped.counts(), &steps);
    let coloring = realize(stripped.n() as usize, stripped.k(), &steps);
    RunOutcome::Success { coloring, trace }
}

/// For `n` at or above the guaranteed construction threshold, peels blocks
/// of shrinking size off the main component (each peel paid by a currently
/// largest class), then finishes the `K_{2k}` core and all peeled blocks
/// with the star-first search. Refuses below the threshold.
pub fn construct_large_n(s: &GallaiSequence, budget: u64) -> RunOutcome {
    let k = s.nonzero_count() as i64;
    if k < 2 {
        return RunOutcome::Refused {
            reason: "needs at least two used colors".to_string(),
        };
    }
    let report = match bounds::upper_bound_n0(k) {
        Ok(report) => report,
        Err(e) => return RunOutcome::Refused { reason: e.to_string() },
    };
    let (n0, threshold) = (report.n0, report.threshold);
    if s.n() < threshold {
        return RunOutcome::Refused {
            reason: format!(
                "n = {} is below the guaranteed threshold {threshold} for k = {k}",
                s.n()
            ),
        };
    }

    let mut residual = s.counts().to_vec();
    let mut steps = Vec::new();
    let mut comps = Vec::new();
    insert_component(&mut comps, s.n());
    let mut main = s.n();
    let peel = |j: i64, main: &mut i64, residual: &mut Vec<i64>, steps: &mut Vec<CutStep>| {
        let cost = j * (*main - j);
        let color = (0..residual.len())
            .max_by_key(|&i| (residual[i], std::cmp::Reverse(i)))
            .expect("nonempty");
        assert!(
            residual[color] >= cost,
            "internal: no class can fund peeling {j} off {main}"
        );
        steps.push(CutStep {
            a: *main,
            a1: j,
            a2: *main - j,
            color,
        });
        residual[color] -= cost;
        *main -= j;
    };
    let mut blocks = Vec::new();
    for j in (2..=n0).rev() {
        while main - j >= 2 * k * j {
            peel(j, &mut main, &mut residual, &mut steps);
            blocks.push(j);
        }
    }
    while main > 2 * k {
        peel(1, &mut main, &mut residual, &mut steps);
    }
    debug_assert_eq!(main, 2 * k);

    let surplus: i64 = blocks.iter().map(|&j| binom2(j).expect("small")).sum();
    assert!(
        2 * surplus >= 3 * k * k - 7 * k + 2,
        "internal: peeled blocks carry too little surplus"
    );

    let mut final_comps = vec![main];
    for &j in &blocks {
        insert_component(&mut final_comps, j);
    }
    final_comps.sort_unstable_by(|a, b| b.cmp(a));
    let mut search = CutSearch::new(Strategy::StarFirst, budget);
    if !search.go(&mut final_comps, &mut residual) {
        if search.out_of_budget {
            return RunOutcome::BudgetExhausted {
                nodes_explored: search.explored,
            };
        }
        let (stuck_size, tail) = search.best_stuck.expect("stuck node recorded");
        let mut all = steps;
        all.extend(tail);
        return RunOutcome::Irreducible(IrreducibleReport {
            stuck_size,
            trace: trace_from_steps(s.n(), s.counts(), &all),
        });
    }
    steps.extend(search.path);
    let trace = trace_from_steps(s.n(), s.counts(), &steps);
    let coloring = realize(s.n() as usize, s.k(), &steps);
    RunOutcome::Success { coloring, trace }
}
