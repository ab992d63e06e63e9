//! Acceptance checklist for the library: one test per claim, each printing
//! a single `[PASS]`/`[FAIL]` line (visible with `--nocapture`) and
//! enforcing a wall-clock budget. Frozen expected values come from
//! independent computation: exhaustive oracles, brute-force partition
//! scans, and hand-checked small cases.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use gallai_core::bounds::{
    block_cubic, brute_force_internal, build_lower_instance, ceil_sqrt, check_step2, check_step4,
    max_internal_edges, upper_bound_n0, BoundsError,
};
use gallai_core::coloring::verify_certificate;
use gallai_core::cut_engine::{run_cut_algorithm, RunOutcome, Strategy, DEFAULT_CUT_BUDGET};
use gallai_core::exact::{tiny_oracle, ExactConfig, ExactSolver, SweepOptions};
use gallai_core::seqcore::{binom2, enumerate_sequences};
use gallai_core::{EdgeColoring, GallaiSequence};

macro_rules! check {
    ($fails:ident, $cond:expr, $($msg:tt)+) => {
        if !$cond {
            $fails.push(format!($($msg)+));
        }
    };
}

fn report(
    id: &str,
    what: &str,
    budget: Duration,
    started: Instant,
    mut fails: Vec<String>,
) -> Result<(), String> {
    let elapsed = started.elapsed();
    if elapsed > budget {
        fails.push(format!(
            "over budget: took {elapsed:.2?}, allowed {budget:.2?}"
        ));
    }
    if fails.is_empty() {
        println!("[PASS] {id} — {what} ({elapsed:.2?})");
        Ok(())
    } else {
        println!("[FAIL] {id} — {what} ({elapsed:.2?})");
        for f in &fails {
            println!("       {f}");
        }
        Err(fails.join("; "))
    }
}

fn solver() -> ExactSolver {
    ExactSolver::new(ExactConfig::default())
}

fn seq(n: i64, counts: &[i64]) -> GallaiSequence {
    GallaiSequence::new(n, counts).expect("valid test sequence")
}

fn counterexample_set(s: &ExactSolver, n: i64, k: usize) -> BTreeSet<Vec<i64>> {
    s.sweep(n, k, &SweepOptions::default())
        .expect("sweep within scale cap")
        .counterexamples
        .into_iter()
        .map(|ce| ce.counts().to_vec())
        .collect()
}

#[test]
fn a01_three_color_threshold_is_five() -> Result<(), String> {
    let started = Instant::now();
    let mut fails = Vec::new();
    let s = solver();

    let at_four = counterexample_set(&s, 4, 3);
    check!(
        fails,
        at_four.contains(&vec![2, 2, 2]),
        "2,2,2 missing from the non-realizable list at n=4: {at_four:?}"
    );
    let oracle = tiny_oracle(&seq(4, &[2, 2, 2])).expect("within oracle cap");
    check!(fails, !oracle, "exhaustive oracle realizes 2,2,2 on K_4");
    for n in [5, 6, 7] {
        let ces = counterexample_set(&s, n, 3);
        check!(fails, ces.is_empty(), "counterexamples at n={n}: {ces:?}");
    }

    report(
        "01",
        "every three-color prescription is realizable from five vertices on",
        Duration::from_secs(5),
        started,
        fails,
    )
}

#[test]
fn a02_four_color_counterexample_lists_are_exact() -> Result<(), String> {
    let started = Instant::now();
    let mut fails = Vec::new();
    let s = solver();

    let at_six = counterexample_set(&s, 6, 4);
    let expect_six: BTreeSet<Vec<i64>> = [
        vec![7, 4, 2, 2],
        vec![7, 3, 3, 2],
        vec![6, 3, 3, 3],
        vec![4, 4, 4, 3],
    ]
    .into_iter()
    .collect();
    check!(
        fails,
        at_six == expect_six,
        "n=6 list {at_six:?} differs from expected {expect_six:?}"
    );

    let at_seven = counterexample_set(&s, 7, 4);
    let expect_seven: BTreeSet<Vec<i64>> = [vec![9, 4, 4, 4]].into_iter().collect();
    check!(
        fails,
        at_seven == expect_seven,
        "n=7 list {at_seven:?} differs from expected {expect_seven:?}"
    );

    report(
        "02",
        "the non-realizable four-color prescriptions at n=6 and n=7 are exactly the known five",
        Duration::from_secs(60),
        started,
        fails,
    )
}

#[test]
fn a03_four_color_threshold_is_eight() -> Result<(), String> {
    let started = Instant::now();
    let mut fails = Vec::new();
    let s = solver();

    for n in [8, 9] {
        let ces = counterexample_set(&s, n, 4);
        check!(fails, ces.is_empty(), "counterexamples at n={n}: {ces:?}");
    }

    report(
        "03",
        "every four-color prescription on eight or nine vertices is realizable",
        Duration::from_secs(600),
        started,
        fails,
    )
}

#[test]
fn a04_five_color_threshold_is_ten() -> Result<(), String> {
    let started = Instant::now();
    let mut fails = Vec::new();

    let single = solver();
    let verdict = single
        .decide(&seq(9, &[12, 6, 6, 6, 6]), false)
        .expect("within scale cap");
    check!(fails, !verdict.yes, "12,6,6,6,6 decided realizable on K_9");

    // Single-threaded, with every realizable prescription's witness
    // materialized and verified (the sweep asserts each one internally).
    let opts = SweepOptions {
        jobs: 1,
        verify_witnesses: true,
    };
    let swept = single.sweep(10, 5, &opts).expect("within scale cap");
    check!(
        fails,
        swept.counterexamples.is_empty(),
        "single-threaded: {} counterexamples at n=10",
        swept.counterexamples.len()
    );

    // The same sweep on a fresh solver across a worker pool.
    let pooled = solver();
    let opts = SweepOptions {
        jobs: 4,
        verify_witnesses: true,
    };
    let swept = pooled.sweep(10, 5, &opts).expect("within scale cap");
    check!(
        fails,
        swept.counterexamples.is_empty(),
        "4 workers: {} counterexamples at n=10",
        swept.counterexamples.len()
    );

    report(
        "04",
        "12,6,6,6,6 is not realizable on K_9 while every five-color prescription on K_10 is",
        Duration::from_secs(3600),
        started,
        fails,
    )
}

#[test]
fn a05_worked_eight_vertex_construction_replays() -> Result<(), String> {
    let started = Instant::now();
    let mut fails = Vec::new();

    let s = seq(8, &[14, 8, 3, 3]);
    match run_cut_algorithm(&s, Strategy::PaperOrder, DEFAULT_CUT_BUDGET) {
        RunOutcome::Success { coloring, trace } => {
            check!(
                fails,
                trace.contains_state(&[6, 2], &[2, 8, 3, 3]),
                "trace misses the state {{6,2}} | 2,8,3,3:\n{trace}"
            );
            check!(
                fails,
                verify_certificate(&coloring, &s).is_ok(),
                "final coloring does not verify"
            );
        }
        other => fails.push(format!("construction did not succeed: {other:?}")),
    }

    report(
        "05",
        "the in-order cut construction for 14,8,3,3 on K_8 passes through {6,2} | 2,8,3,3",
        Duration::from_secs(1),
        started,
        fails,
    )
}

#[test]
fn a06_internal_edge_formula_matches_brute_force() -> Result<(), String> {
    let started = Instant::now();
    let mut fails = Vec::new();

    let mut cases = 0;
    for n in 3..=12 {
        for j in (n / 2 + 1)..n {
            let formula = max_internal_edges(n, j).expect("in domain");
            let brute = brute_force_internal(n, j).expect("in domain");
            check!(
                fails,
                formula == brute,
                "(n={n}, j={j}): formula {formula}, brute force {brute}"
            );
            cases += 1;
        }
    }
    check!(fails, cases == 30, "expected 30 domain cases, saw {cases}");

    report(
        "06",
        "max internal edges with a fixed largest part: closed form equals brute force, n <= 12",
        Duration::from_secs(5),
        started,
        fails,
    )
}

#[test]
fn a07_cut_funding_arithmetic() -> Result<(), String> {
    let started = Instant::now();
    let mut fails = Vec::new();

    // At n = 2kj - j + 1 the surplus of n(n-1) over 2kj(n-j) is exactly
    // j(j-1): the average class size strictly exceeds the j-cut cost
    // j(n-j) for every j >= 2, and meets it with equality at j = 1 (where
    // a separate one-vertex argument applies from n = 2k - 1 on).
    for k in 2i64..=12 {
        for j in 1i64..=6 {
            let n = 2 * k * j - j + 1;
            let surplus = n * (n - 1) - 2 * k * j * (n - j);
            check!(
                fails,
                surplus == j * (j - 1),
                "(k={k}, j={j}): surplus {surplus} != {}",
                j * (j - 1)
            );
            if j >= 2 {
                check!(
                    fails,
                    n * (n - 1) > 2 * k * j * (n - j),
                    "(k={k}, j={j}): average class does not exceed the cut cost"
                );
            }
        }
        // One vertex can always be removed from K_{2k-1}: the average
        // class size there rounds up to exactly 2k - 2 = n - 1.
        let total = binom2(2 * k - 1).expect("small");
        let per_class = (total + k - 1) / k;
        check!(
            fails,
            per_class == 2 * k - 2,
            "k={k}: ceil of the average class is {per_class}, not {}",
            2 * k - 2
        );
    }

    report(
        "07",
        "cut funding arithmetic: j-cut surplus is j(j-1) and the one-vertex bound is 2k-2",
        Duration::from_secs(1),
        started,
        fails,
    )
}

#[test]
fn a08_candidate_family_is_sound_and_certifies_from_58_on() -> Result<(), String> {
    let started = Instant::now();
    let mut fails = Vec::new();

    // The two-level candidate prescription (one class of a+c edges,
    // ceil(k/2)-1 of a, floor(k/2) of b on f vertices) must hit its
    // defining identities wherever it exists. The full chain — instance
    // defined, big-class check, counting check — first passes at k=54,
    // stumbles once more on the degenerate island k=57, and from k*=58 on
    // passes without exception.
    let mut failing: Vec<i64> = Vec::new();
    for k in 10i64..=10_000 {
        match build_lower_instance(k, 1, 2) {
            Ok(inst) => {
                if fails.len() < 8 {
                    let total: i64 = inst.sequence.counts().iter().sum();
                    check!(
                        fails,
                        total == binom2(inst.f).expect("small"),
                        "k={k}: classes sum to {total}, not all of K_{}",
                        inst.f
                    );
                    check!(
                        fails,
                        inst.c >= 0 && inst.c < (k + 1) / 2,
                        "k={k}: remainder c={} outside [0, {})",
                        inst.c,
                        (k + 1) / 2
                    );
                    check!(
                        fails,
                        9 * inst.a < inst.b * inst.b && inst.tight_regime,
                        "k={k}: a={} not below b^2/9 (b={})",
                        inst.a,
                        inst.b
                    );
                }
                let s2 = check_step2(&inst, false);
                let s4 = check_step4(&inst);
                if !(s2.all_pass && s2.checked > 0 && s4.holds) {
                    failing.push(k);
                }
            }
            Err(BoundsError::Degenerate { .. }) => failing.push(k),
            Err(other) => fails.push(format!("k={k}: {other}")),
        }
    }
    let expected_failing: Vec<i64> = (10..=53).chain([57]).collect();
    check!(
        fails,
        failing == expected_failing,
        "chain fails exactly below 54 plus at 57; saw deviations {:?}",
        failing
            .iter()
            .filter(|k| !expected_failing.contains(k))
            .chain(expected_failing.iter().filter(|k| !failing.contains(k)))
            .collect::<Vec<_>>()
    );

    // Spot checks across two more decades (thinned big-class grid).
    for k in [100_000i64, 1_000_000] {
        let inst = build_lower_instance(k, 1, 2).expect("non-degenerate at large k");
        let s2 = check_step2(&inst, false);
        let s4 = check_step4(&inst);
        check!(
            fails,
            s2.all_pass && s2.checked > 0 && s4.holds,
            "k={k}: counting checks fail (step2 {}, step4 {})",
            s2.all_pass,
            s4.holds
        );
    }

    report(
        "08",
        "candidate prescriptions: identities hold where defined; counting checks pass for every k >= 58",
        Duration::from_secs(120),
        started,
        fails,
    )
}

#[test]
fn a09_block_cubic_positive_and_block_sizes_track_sqrt_3k() -> Result<(), String> {
    let started = Instant::now();
    let mut fails = Vec::new();

    // Exact integer arithmetic: the margin cubic is positive at the
    // witness block size ceil(2*sqrt(k)) for every k up to a million.
    for k in 2i64..=1_000_000 {
        let witness = ceil_sqrt(4 * k);
        if block_cubic(k, witness) <= 0 && fails.len() < 4 {
            check!(fails, false, "cubic not positive at k={k}, n={witness}");
        }
    }

    // The least sufficient block size settles toward sqrt(3k) from above.
    let mut prev = f64::INFINITY;
    for exp in 2..=6 {
        let k = 10i64.pow(exp);
        let n0 = upper_bound_n0(k).expect("in range").n0;
        let ratio = n0 as f64 / (3.0 * k as f64).sqrt();
        let bounded = ratio <= 1.35;
        check!(
            fails,
            bounded,
            "k=10^{exp}: n0/sqrt(3k) = {ratio:.4} exceeds 1.35"
        );
        let decreased = ratio < prev;
        check!(
            fails,
            decreased,
            "k=10^{exp}: ratio {ratio:.4} did not decrease from {prev:.4}"
        );
        prev = ratio;
    }

    report(
        "09",
        "peeling margin is positive at ceil(2*sqrt(k)) for all k <= 10^6; n0/sqrt(3k) decreases by decade",
        Duration::from_secs(60),
        started,
        fails,
    )
}

#[test]
fn a10_decider_agrees_with_the_exhaustive_oracle() -> Result<(), String> {
    let started = Instant::now();
    let mut fails = Vec::new();
    let s = solver();

    let mut compared = 0;
    let mut grid: Vec<(i64, usize)> = Vec::new();
    for n in 2..=5 {
        for k in 1..=4usize {
            grid.push((n, k));
        }
    }
    grid.push((6, 3));
    for (n, k) in grid {
        if (k as i64) > binom2(n).expect("small") {
            continue;
        }
        for sequence in enumerate_sequences(n, k, true).expect("valid level") {
            let decided = s.decide(&sequence, false).expect("within scale cap").yes;
            let oracle = tiny_oracle(&sequence).expect("within oracle cap");
            check!(
                fails,
                decided == oracle,
                "{sequence} on K_{n}: decided {decided}, oracle {oracle}"
            );
            compared += 1;
        }
    }
    check!(fails, compared > 50, "only {compared} sequences compared");

    report(
        "10",
        "structural decision equals exhaustive search on every strict prescription, n <= 5 plus (6,3)",
        Duration::from_secs(600),
        started,
        fails,
    )
}

/// Splitmix-style generator so the sample is deterministic without
/// pulling in an RNG dependency.
struct Lcg(u64);

impl Lcg {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        self.0 >> 11
    }

    fn below(&mut self, bound: u64) -> u64 {
        self.next() % bound
    }
}

#[test]
fn a11_random_soundness_suite() -> Result<(), String> {
    let started = Instant::now();
    let mut fails = Vec::new();
    let s = solver();
    let mut rng = Lcg(0x5eed_cafe_f00d_0001);

    let mut successes = 0;
    let mut rainbows_caught = 0;
    for round in 0..500 {
        let n = 3 + rng.below(7) as i64;
        let edges = binom2(n).expect("small");
        let k = (2 + rng.below(5) as i64).min(edges) as usize;
        // A uniform-ish composition of the edge count into k parts.
        let mut cuts: Vec<i64> = (0..k - 1).map(|_| rng.below(edges as u64 + 1) as i64).collect();
        cuts.sort_unstable();
        let mut parts = Vec::with_capacity(k);
        let mut prev = 0;
        for c in cuts {
            parts.push(c - prev);
            prev = c;
        }
        parts.push(edges - prev);
        let sample = seq(n, &parts);

        let RunOutcome::Success { coloring, trace: _ } =
            run_cut_algorithm(&sample, Strategy::GreedyLargest, DEFAULT_CUT_BUDGET)
        else {
            continue;
        };
        successes += 1;
        if fails.len() >= 8 {
            break;
        }
        check!(
            fails,
            verify_certificate(&coloring, &sample).is_ok(),
            "round {round}: constructed coloring for {sample} does not verify"
        );
        check!(
            fails,
            s.decide(&sample, false).expect("within scale cap").yes,
            "round {round}: construction succeeded but {sample} decided NO"
        );

        // Recolor one random edge with a brand-new color and require the
        // validator to reject exactly when an independent triangle scan
        // says the mutation created a rainbow triangle.
        let mut mutated = coloring.colors().to_vec();
        let idx = rng.below(mutated.len() as u64) as usize;
        let fresh = sample.k() as u32 + 1;
        mutated[idx] = fresh;
        let mutant = EdgeColoring::new(n as usize, sample.k() + 1, mutated)
            .expect("mutant keeps the coloring shape");
        let mut scan_found = false;
        for u in 0..n as usize {
            for v in (u + 1)..n as usize {
                for w in (v + 1)..n as usize {
                    let (x, y, z) = (
                        mutant.color_of(u, v),
                        mutant.color_of(u, w),
                        mutant.color_of(v, w),
                    );
                    if x != y && y != z && x != z {
                        scan_found = true;
                    }
                }
            }
        }
        check!(
            fails,
            mutant.check_gallai().is_some() == scan_found,
            "round {round}: validator rainbow scan disagrees with the independent scan"
        );
        if scan_found {
            rainbows_caught += 1;
            check!(
                fails,
                verify_certificate(&mutant, &sample).is_err(),
                "round {round}: validator accepted a mutant with a rainbow triangle"
            );
        }
    }
    check!(fails, successes >= 100, "only {successes} of 500 samples constructible");
    check!(fails, rainbows_caught >= 20, "only {rainbows_caught} mutants made a rainbow");

    report(
        "11",
        "500-sample soundness: constructions verify and decide YES; mutated certificates are rejected",
        Duration::from_secs(300),
        started,
        fails,
    )
}
