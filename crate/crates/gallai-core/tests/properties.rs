use gallai_core::coloring::{verify_certificate, Certificate, EdgeColoring};
use gallai_core::cut_engine::{run_cut_algorithm, RunOutcome, Strategy as CutStrategy, DEFAULT_CUT_BUDGET};
use gallai_core::exact::{ExactConfig, ExactSolver, SweepOptions};
use gallai_core::seqcore::{binom2, validate, GallaiSequence};
use proptest::prelude::*;

/// Splits `binom(n,2)` edges over `k` classes proportionally to random
/// weights, dumping the rounding remainder on the first class.
fn sequence_from_weights(n: i64, weights: &[u32]) -> GallaiSequence {
    let total = binom2(n).unwrap();
    let weight_sum: i64 = weights.iter().map(|&w| w as i64).sum();
    let mut counts: Vec<i64> = weights
        .iter()
        .map(|&w| total * w as i64 / weight_sum)
        .collect();
    let assigned: i64 = counts.iter().sum();
    counts[0] += total - assigned;
    validate(n, &counts).unwrap()
}

fn arb_sequence(max_n: i64, max_k: usize) -> impl Strategy<Value = GallaiSequence> {
    (2..=max_n, 1..=max_k).prop_flat_map(move |(n, k)| {
        proptest::collection::vec(1u32..=100, k)
            .prop_map(move |weights| sequence_from_weights(n, &weights))
    })
}

proptest! {
    /// The canonical key ignores input order and zero classes.
    #[test]
    fn canonical_key_is_permutation_and_zero_invariant(
        seq in arb_sequence(9, 5),
        zeros in 0usize..3,
        shuffle_seed in any::<u64>(),
    ) {
        let mut raw = seq.counts().to_vec();
        raw.extend(std::iter::repeat_n(0, zeros));
        // Cheap deterministic shuffle; proptest's seed drives it.
        let mut state = shuffle_seed | 1;
        for i in (1..raw.len()).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            raw.swap(i, (state >> 33) as usize % (i + 1));
        }
        let reordered = validate(seq.n(), &raw).unwrap();
        prop_assert_eq!(seq.canonical_key(), reordered.canonical_key());
    }

    /// Certificates re-serialize byte-identically.
    #[test]
    fn certificate_json_round_trip_is_byte_exact(
        n in 2usize..=7,
        k in 1usize..=4,
        seed in proptest::collection::vec(any::<u32>(), 21),
    ) {
        let edges = n * (n - 1) / 2;
        let colors: Vec<u32> = (0..edges).map(|i| seed[i % seed.len()] % k as u32 + 1).collect();
        let coloring = EdgeColoring::new(n, k, colors).unwrap();
        let (census, _) = coloring.census();
        let cert = Certificate::from_parts(&coloring, &census);
        let text = cert.to_json();
        let reparsed = Certificate::from_json(&text).unwrap();
        prop_assert_eq!(&reparsed, &cert);
        prop_assert_eq!(reparsed.to_json(), text);
    }

    /// Two-class prescriptions always succeed under the greedy strategy,
    /// and the result verifies.
    #[test]
    fn two_color_sequences_are_always_cut_constructible(
        n in 2i64..=10,
        first_share in 0u32..=100,
    ) {
        let total = binom2(n).unwrap();
        let first = total * first_share as i64 / 100;
        let seq = validate(n, &[first, total - first]).unwrap();
        match run_cut_algorithm(&seq, CutStrategy::GreedyLargest, DEFAULT_CUT_BUDGET) {
            RunOutcome::Success { coloring, trace } => {
                prop_assert!(verify_certificate(&coloring, &seq).is_ok());
                prop_assert_eq!(trace.materialize(), coloring);
            }
            other => prop_assert!(false, "expected success, got {:?}", other),
        }
    }

    /// Successful traces conserve edges at every node: residual counts sum
    /// to the edges still internal to uncut components.
    #[test]
    fn successful_traces_conserve_edges(seq in arb_sequence(9, 4)) {
        if let RunOutcome::Success { trace, .. } =
            run_cut_algorithm(&seq, CutStrategy::GreedyLargest, DEFAULT_CUT_BUDGET)
        {
            for node in &trace.nodes {
                let uncut: i64 = node.comps.iter().map(|&c| binom2(c).unwrap()).sum();
                prop_assert_eq!(node.residual.iter().sum::<i64>(), uncut);
            }
            let last = trace.nodes.last().unwrap();
            prop_assert!(last.comps.is_empty() && last.step.is_none());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Every YES verdict at small scale can be materialized into a
    /// verified certificate.
    #[test]
    fn yes_verdicts_carry_verifiable_witnesses(seq in arb_sequence(6, 4)) {
        let solver = ExactSolver::new(ExactConfig::default());
        let verdict = solver.decide(&seq, true).unwrap();
        if verdict.yes {
            let cert = verdict.witness.unwrap();
            let coloring = cert.coloring().unwrap();
            prop_assert!(verify_certificate(&coloring, &seq).is_ok());
        } else {
            prop_assert!(verdict.witness.is_none());
        }
    }

    /// Sweep answers do not depend on the worker count.
    #[test]
    fn sweep_is_job_count_invariant(jobs in 1usize..=4) {
        let solver = ExactSolver::new(ExactConfig::default());
        let opts = SweepOptions { jobs, verify_witnesses: false };
        let result = solver.sweep(6, 4, &opts).unwrap();
        let counts: Vec<Vec<i64>> = result
            .counterexamples
            .iter()
            .map(|s| s.counts().to_vec())
            .collect();
        prop_assert_eq!(
            counts,
            vec![
                vec![7, 4, 2, 2],
                vec![7, 3, 3, 2],
                vec![6, 3, 3, 3],
                vec![4, 4, 4, 3],
            ]
        );
    }
}
