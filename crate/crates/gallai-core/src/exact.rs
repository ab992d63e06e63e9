//! Exact decision of realizability at desk scale.
//!
//! A prescription with at most two used colors is always realizable (any
//! two-coloring is admissible), as is anything on at most two vertices.
//! Beyond that, every admissible coloring splits its vertex set into
//! `m >= 2` complete parts such that the edges between any two parts are
//! monochromatic and all such cross colors come from a base set of at most
//! two colors; the parts induce admissible colorings of their own. The
//! converse holds too — gluing admissible parts across a two-colored
//! quotient never creates a three-colored triangle — so realizability is
//! decided by searching these decompositions directly. Verdicts are
//! memoized per canonical key; a bounded run of the cut engine serves as
//! an accelerating pre-pass that also yields compact witnesses.
//!
//! Cache files written by [`ExactSolver::save_cache`] are trusted state:
//! loading a tampered file can poison verdicts. Keep them private.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use dashmap::DashMap;
use rayon::prelude::*;
use thiserror::Error;

use crate::coloring::{
    edge_count, pair_rank, sequential_fill, verify_certificate, Certificate, ColoringBuilder,
    EdgeColoring,
};
use crate::cut_engine::{self, CutStep, RunOutcome, Strategy};
use crate::seqcore::{binom2, enumerate_sequences, GallaiSequence, SeqError, SeqKey};

#[derive(Debug, Error)]
pub enum ExactError {
    #[error("n = {n} exceeds the configured exact-decision cap {max_n}")]
    ScaleCap { n: i64, max_n: i64 },
    #[error("oracle space {k}^{edges} exceeds the cap of {cap:.0e} combinations")]
    OracleCap { k: usize, edges: usize, cap: f64 },
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error("thread pool: {0}")]
    ThreadPool(String),
    #[error("cache i/o: {0}")]
    CacheIo(#[from] std::io::Error),
}

#[derive(Debug, Clone)]
pub struct ExactConfig {
    /// Hard cap on the root vertex count; the decomposition search is
    /// exponential and this keeps accidental huge inputs from hanging.
    pub max_n: i64,
    /// Node budget for the cut-engine pre-pass on each fresh key.
    pub cut_prepass_budget: u64,
    /// Enables the two search cutoffs backed by the decomposition theory:
    /// skipping base colors with fewer than `n - 1` edges, and skipping
    /// child prescriptions that use three or more colors but whose largest
    /// class is below `n_child - 1`. Verdicts do not depend on this flag.
    pub pruning: bool,
}

impl Default for ExactConfig {
    fn default() -> Self {
        ExactConfig {
            max_n: 12,
            cut_prepass_budget: 50_000,
            pruning: true,
        }
    }
}

/// How a memoized YES key can be turned into a concrete coloring.
#[derive(Debug, Clone)]
enum Choice {
    /// At most two used colors (or at most two vertices): fill edges in
    /// pair-rank order.
    Trivial,
    /// The cut pre-pass succeeded; replay its steps.
    Cut(Vec<CutStep>),
    /// A decomposition: `parts` descending, `base` holds one or two color
    /// indices, `pair_base[idx]` picks the base color of the idx-th part
    /// pair in lexicographic order, `assign[p]` is part p's residual count
    /// per color.
    Decomp {
        parts: Vec<i64>,
        base: Vec<usize>,
        pair_base: Vec<u8>,
        assign: Vec<Vec<i64>>,
    },
}

#[derive(Debug, Clone)]
struct MemoEntry {
    yes: bool,
    choice: Option<Choice>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub keys_decided: u64,
    pub memo_hits: u64,
    pub trivial_wins: u64,
    pub cut_wins: u64,
    pub decomp_wins: u64,
    pub no_verdicts: u64,
}

#[derive(Debug)]
pub struct Verdict {
    pub yes: bool,
    pub witness: Option<Certificate>,
    /// Cumulative solver counters at the time of the verdict. Counter
    /// values depend on memo state and thread interleaving; treat them as
    /// diagnostics, not as part of the result.
    pub stats: SolverStats,
}

pub struct ExactSolver {
    cfg: ExactConfig,
    memo: DashMap<SeqKey, MemoEntry>,
    keys_decided: AtomicU64,
    memo_hits: AtomicU64,
    trivial_wins: AtomicU64,
    cut_wins: AtomicU64,
    decomp_wins: AtomicU64,
    no_verdicts: AtomicU64,
}

impl ExactSolver {
    pub fn new(cfg: ExactConfig) -> Self {
        ExactSolver {
            cfg,
            memo: DashMap::new(),
            keys_decided: AtomicU64::new(0),
            memo_hits: AtomicU64::new(0),
            trivial_wins: AtomicU64::new(0),
            cut_wins: AtomicU64::new(0),
            decomp_wins: AtomicU64::new(0),
            no_verdicts: AtomicU64::new(0),
        }
    }

    pub fn config(&self) -> &ExactConfig {
        &self.cfg
    }

    pub fn stats(&self) -> SolverStats {
        SolverStats {
            keys_decided: self.keys_decided.load(Ordering::Relaxed),
            memo_hits: self.memo_hits.load(Ordering::Relaxed),
            trivial_wins: self.trivial_wins.load(Ordering::Relaxed),
            cut_wins: self.cut_wins.load(Ordering::Relaxed),
            decomp_wins: self.decomp_wins.load(Ordering::Relaxed),
            no_verdicts: self.no_verdicts.load(Ordering::Relaxed),
        }
    }

    /// Decides whether `s` is realizable; with `want_witness`, a YES comes
    /// with a verified coloring certificate.
    pub fn decide(&self, s: &GallaiSequence, want_witness: bool) -> Result<Verdict, ExactError> {
        if s.n() > self.cfg.max_n {
            return Err(ExactError::ScaleCap {
                n: s.n(),
                max_n: self.cfg.max_n,
            });
        }
        let key = s.canonical_key();
        let yes = self.decide_key(&key);
        let witness = if yes && want_witness {
            let coloring = self.materialize_key(&key);
            debug_assert!(verify_certificate(&coloring, s).is_ok());
            Some(Certificate::from_parts(&coloring, s))
        } else {
            None
        };
        Ok(Verdict {
            yes,
            witness,
            stats: self.stats(),
        })
    }

    fn decide_key(&self, key: &SeqKey) -> bool {
        if let Some(entry) = self.memo.get(key) {
            self.memo_hits.fetch_add(1, Ordering::Relaxed);
            return entry.yes;
        }
        self.keys_decided.fetch_add(1, Ordering::Relaxed);
        let (yes, choice) = self.decide_fresh(key);
        self.memo.insert(key.clone(), MemoEntry { yes, choice });
        yes
    }

    fn decide_fresh(&self, key: &SeqKey) -> (bool, Option<Choice>) {
        if key.n <= 2 || key.counts.len() <= 2 {
            self.trivial_wins.fetch_add(1, Ordering::Relaxed);
            return (true, Some(Choice::Trivial));
        }
        let prepass = cut_engine::run_cut_algorithm(
            &key.to_sequence(),
            Strategy::GreedyLargest,
            self.cfg.cut_prepass_budget,
        );
        if let RunOutcome::Success { trace, .. } = prepass {
            self.cut_wins.fetch_add(1, Ordering::Relaxed);
            return (true, Some(Choice::Cut(trace.steps())));
        }
        match self.search_decomp(key) {
            Some(choice) => {
                self.decomp_wins.fetch_add(1, Ordering::Relaxed);
                (true, Some(choice))
            }
            None => {
                self.no_verdicts.fetch_add(1, Ordering::Relaxed);
                (false, None)
            }
        }
    }

    /// Complete search over decompositions: partition (descending, at
    /// least two parts), base set of one or two colors, a feasible split
    /// of the cross-edge total, and a residual distribution whose children
    /// all decide YES. Which part pairs carry which base color does not
    /// affect feasibility — any subset achieving the split works — so the
    /// split is searched over subset sums and a witness subset is kept for
    /// materialization.
    fn search_decomp(&self, key: &SeqKey) -> Option<Choice> {
        let n = key.n;
        let counts = &key.counts;
        let k_eff = counts.len();
        for parts in partitions_desc(n) {
            let m = parts.len();
            let mut prods = Vec::with_capacity(m * (m - 1) / 2);
            for i in 0..m {
                for j in i + 1..m {
                    prods.push(parts[i] * parts[j]);
                }
            }
            let total_cross: i64 = prods.iter().sum();
            // One base color pays for every cross edge. Its class then has
            // at least total_cross >= n - 1 edges, so the base-size cutoff
            // is automatic here.
            for b in 0..k_eff {
                if counts[b] < total_cross {
                    continue;
                }
                let mut rest = counts.clone();
                rest[b] -= total_cross;
                if let Some(assign) = self.distribute(&parts, &rest) {
                    return Some(Choice::Decomp {
                        parts,
                        base: vec![b],
                        pair_base: vec![0; prods.len()],
                        assign,
                    });
                }
            }
            // Two base colors split the cross total as t1 + t2, t_i >= 1;
            // t1 must be a subset sum of the pair products.
            let sums = SubsetSums::new(&prods, total_cross);
            for b1 in 0..k_eff {
                if self.cfg.pruning && counts[b1] < n - 1 {
                    continue;
                }
                for b2 in b1 + 1..k_eff {
                    if self.cfg.pruning && counts[b2] < n - 1 {
                        continue;
                    }
                    let t1_hi = counts[b1].min(total_cross - 1);
                    let t1_lo = 1.max(total_cross - counts[b2]);
                    for t1 in (t1_lo..=t1_hi).rev() {
                        if !sums.reachable(t1) {
                            continue;
                        }
                        let mut rest = counts.clone();
                        rest[b1] -= t1;
                        rest[b2] -= total_cross - t1;
                        if let Some(assign) = self.distribute(&parts, &rest) {
                            let pair_base = sums
                                .witness(t1)
                                .into_iter()
                                .map(|in_first| if in_first { 0 } else { 1 })
                                .collect();
                            return Some(Choice::Decomp {
                                parts,
                                base: vec![b1, b2],
                                pair_base,
                                assign,
                            });
                        }
                    }
                }
            }
        }
        None
    }

    /// Distributes the residual counts over the parts: part p receives a
    /// per-color vector summing to `binom(parts[p], 2)`. Parts of equal
    /// size are forced into non-increasing lexicographic order to skip
    /// symmetric re-assignments.
    fn distribute(&self, parts: &[i64], rest: &[i64]) -> Option<Vec<Vec<i64>>> {
        let needs: Vec<i64> = parts
            .iter()
            .map(|&p| binom2(p).expect("desk scale"))
            .collect();
        debug_assert_eq!(rest.iter().sum::<i64>(), needs.iter().sum::<i64>());
        let mut st = DistState {
            parts,
            needs,
            rest: rest.to_vec(),
            assign: Vec::with_capacity(parts.len()),
        };
        self.fill_part(&mut st, 0).then_some(st.assign)
    }

    fn fill_part(&self, st: &mut DistState, p: usize) -> bool {
        if p == st.parts.len() {
            debug_assert!(st.rest.iter().all(|&r| r == 0));
            return true;
        }
        let lex = (p > 0 && st.parts[p] == st.parts[p - 1]).then(|| st.assign[p - 1].clone());
        let mut current = vec![0i64; st.rest.len()];
        let need = st.needs[p];
        self.fill_colors(st, p, 0, need, lex.as_deref(), lex.is_some(), &mut current)
    }

    /// Enumerates part p's vector color by color, larger amounts first, so
    /// children concentrate on few colors and hit the trivial base often.
    /// `tight` tracks whether the prefix still equals the previous equal
    /// part's vector, in which case the current color is capped by it.
    #[allow(clippy::too_many_arguments)]
    fn fill_colors(
        &self,
        st: &mut DistState,
        p: usize,
        c: usize,
        need: i64,
        lex: Option<&[i64]>,
        tight: bool,
        current: &mut Vec<i64>,
    ) -> bool {
        if c == st.rest.len() {
            debug_assert_eq!(need, 0);
            let size = st.parts[p];
            if size >= 2 {
                if self.cfg.pruning {
                    let used = current.iter().filter(|&&x| x > 0).count();
                    let largest = current.iter().copied().max().unwrap_or(0);
                    // A realizable child on >= 3 colors must have a class
                    // of at least size - 1 edges (its own decomposition's
                    // base colors are that large).
                    if used >= 3 && largest < size - 1 {
                        return false;
                    }
                }
                let mut child: Vec<i64> = current.iter().copied().filter(|&x| x > 0).collect();
                child.sort_unstable_by(|a, b| b.cmp(a));
                if !self.decide_key(&SeqKey {
                    n: size,
                    counts: child,
                }) {
                    return false;
                }
            }
            st.assign.push(current.clone());
            if self.fill_part(st, p + 1) {
                return true;
            }
            st.assign.pop();
            return false;
        }
        let cap_after: i64 = st.rest[c + 1..].iter().sum();
        let mut hi = st.rest[c].min(need);
        if tight {
            hi = hi.min(lex.expect("tight implies a predecessor")[c]);
        }
        let lo = (need - cap_after).max(0);
        let mut amount = hi;
        while amount >= lo {
            let still_tight = tight && amount == lex.expect("tight")[c];
            current[c] = amount;
            st.rest[c] -= amount;
            if self.fill_colors(st, p, c + 1, need - amount, lex, still_tight, current) {
                return true;
            }
            st.rest[c] += amount;
            amount -= 1;
        }
        current[c] = 0;
        false
    }

    /// Turns a memoized YES key into a coloring. Keys loaded from a cache
    /// file carry no recorded choice; the search is redone for them (it is
    /// deterministic, and children answer from the memo).
    fn materialize_key(&self, key: &SeqKey) -> EdgeColoring {
        let recorded = {
            let entry = self.memo.get(key).expect("materialize requires a verdict");
            assert!(entry.yes, "cannot materialize a NO key");
            entry.choice.clone()
        };
        let choice = recorded.unwrap_or_else(|| {
            let (yes, choice) = self.decide_fresh(key);
            assert!(
                yes,
                "cached YES for {key} cannot be reconstructed; the cache file is inconsistent"
            );
            let choice = choice.expect("fresh YES records a choice");
            self.memo.insert(
                key.clone(),
                MemoEntry {
                    yes: true,
                    choice: Some(choice.clone()),
                },
            );
            choice
        });
        let n = key.n as usize;
        let k_eff = key.counts.len();
        match choice {
            Choice::Trivial => sequential_fill(n, &key.counts),
            Choice::Cut(steps) => cut_engine::realize(n, k_eff.max(1), &steps),
            Choice::Decomp {
                parts,
                base,
                pair_base,
                assign,
            } => {
                let mut builder = ColoringBuilder::new(n, k_eff);
                let mut offsets = Vec::with_capacity(parts.len());
                let mut off = 0usize;
                for &p in &parts {
                    offsets.push(off);
                    off += p as usize;
                }
                let mut pair_idx = 0;
                for i in 0..parts.len() {
                    for j in i + 1..parts.len() {
                        let color = base[pair_base[pair_idx] as usize];
                        pair_idx += 1;
                        for u in offsets[i]..offsets[i] + parts[i] as usize {
                            for v in offsets[j]..offsets[j] + parts[j] as usize {
                                builder.set(u, v, (color + 1) as u32);
                            }
                        }
                    }
                }
                for (p, &size) in parts.iter().enumerate() {
                    if size < 2 {
                        continue;
                    }
                    let amounts = &assign[p];
                    // Child color ranks sort by (amount desc, parent index
                    // asc); map them back when embedding.
                    let mut order: Vec<usize> = (0..k_eff).filter(|&c| amounts[c] > 0).collect();
                    order.sort_by_key(|&c| (std::cmp::Reverse(amounts[c]), c));
                    let child_key = SeqKey {
                        n: size,
                        counts: order.iter().map(|&c| amounts[c]).collect(),
                    };
                    let sub = self.materialize_key(&child_key);
                    for u in 0..sub.n() {
                        for v in u + 1..sub.n() {
                            let child_rank = sub.color_of(u, v) as usize - 1;
                            let parent_color = order[child_rank];
                            builder.set(offsets[p] + u, offsets[p] + v, (parent_color + 1) as u32);
                        }
                    }
                }
                builder.finish()
            }
        }
    }

    /// Decides every sequence at level `(n, k)` (zeros allowed, so "at most
    /// k colors") and returns the non-realizable ones in enumeration
    /// order. `jobs > 0` runs on a dedicated pool of that many threads;
    /// results are independent of thread count.
    pub fn sweep(&self, n: i64, k: usize, opts: &SweepOptions) -> Result<SweepResult, ExactError> {
        if n > self.cfg.max_n {
            return Err(ExactError::ScaleCap {
                n,
                max_n: self.cfg.max_n,
            });
        }
        let seqs: Vec<GallaiSequence> = enumerate_sequences(n, k, false)?.collect();
        let run = || {
            seqs.par_iter()
                .map(|s| {
                    let key = s.canonical_key();
                    let yes = self.decide_key(&key);
                    if yes && opts.verify_witnesses {
                        let coloring = self.materialize_key(&key);
                        assert!(
                            verify_certificate(&coloring, s).is_ok(),
                            "materialized witness for {s} failed verification"
                        );
                    }
                    yes
                })
                .collect::<Vec<bool>>()
        };
        let verdicts = if opts.jobs > 0 {
            rayon::ThreadPoolBuilder::new()
                .num_threads(opts.jobs)
                .build()
                .map_err(|e| ExactError::ThreadPool(e.to_string()))?
                .install(run)
        } else {
            run()
        };
        let counterexamples = seqs
            .into_iter()
            .zip(&verdicts)
            .filter(|(_, &yes)| !yes)
            .map(|(s, _)| s)
            .collect();
        Ok(SweepResult {
            n,
            k,
            total: verdicts.len() as u64,
            counterexamples,
        })
    }

    /// Scans levels `n = 2..=n_max` and reports the least level from which
    /// every scanned level upward is counterexample-free. The value is
    /// conclusive for the true threshold only when `n_max` is known to be
    /// at or beyond it.
    pub fn threshold_scan(
        &self,
        k: usize,
        n_max: i64,
        opts: &SweepOptions,
    ) -> Result<ThresholdScan, ExactError> {
        let mut g = 2;
        let mut last = None;
        let mut levels = Vec::new();
        for n in 2..=n_max {
            let level = self.sweep(n, k, opts)?;
            levels.push((n, level.counterexamples.len() as u64));
            if let Some(first) = level.counterexamples.first() {
                g = n + 1;
                last = Some(first.clone());
            }
        }
        Ok(ThresholdScan {
            k,
            n_max,
            g,
            highest_counterexample: last,
            levels,
        })
    }

    /// Locates the realizability threshold for `k` colors: the least `n`
    /// such that every scanned level from `n` through `n_max` is free of
    /// counterexamples. The threshold is unique by definition (levels stay
    /// empty once they empty), so the scan is conclusive exactly when the
    /// top level is clean; otherwise counterexamples persist at `n_max` and
    /// only the lower evidence `g(k) >= n_max + 1` is returned.
    pub fn g_of_k(&self, k: usize, n_max: i64, opts: &SweepOptions) -> Result<GOfK, ExactError> {
        let scan = self.threshold_scan(k, n_max, opts)?;
        Ok(if scan.g > n_max {
            GOfK::LowerEvidence { at_least: scan.g }
        } else {
            GOfK::Threshold {
                g: scan.g,
                checked_to: n_max,
            }
        })
    }

    /// Writes all non-trivial memoized verdicts. Returns how many.
    pub fn save_cache(&self, path: &Path) -> Result<usize, ExactError> {
        let mut entries: Vec<(SeqKey, bool)> = self
            .memo
            .iter()
            .filter(|r| r.key().n >= 3 && r.key().counts.len() >= 3)
            .map(|r| (r.key().clone(), r.value().yes))
            .collect();
        entries.sort_by(|a, b| (a.0.n, &a.0.counts).cmp(&(b.0.n, &b.0.counts)));
        let mut out = String::from(CACHE_HEADER);
        out.push('\n');
        for (key, yes) in &entries {
            out.push_str(&format!("{key} {}\n", if *yes { "YES" } else { "NO" }));
        }
        std::fs::write(path, out)?;
        Ok(entries.len())
    }

    /// Loads verdicts saved by [`save_cache`](Self::save_cache). Lines that
    /// fail to parse are counted in `skipped`, never trusted. Existing memo
    /// entries (which may carry witnesses) are not overwritten.
    pub fn load_cache(&self, path: &Path) -> Result<CacheLoadReport, ExactError> {
        let text = std::fs::read_to_string(path)?;
        let mut lines = text.lines();
        let mut report = CacheLoadReport::default();
        if lines.next().map(str::trim) != Some(CACHE_HEADER) {
            report.skipped = 1;
            return Ok(report);
        }
        for line in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let parsed = (|| {
                let (key_text, verdict) = line.split_once(' ')?;
                let key: SeqKey = key_text.parse().ok()?;
                let sum: i64 = key.counts.iter().sum();
                if sum != binom2(key.n).ok()? {
                    return None;
                }
                let yes = match verdict.trim() {
                    "YES" => true,
                    "NO" => false,
                    _ => return None,
                };
                Some((key, yes))
            })();
            match parsed {
                Some((key, yes)) => {
                    self.memo
                        .entry(key)
                        .or_insert(MemoEntry { yes, choice: None });
                    report.loaded += 1;
                }
                None => report.skipped += 1,
            }
        }
        Ok(report)
    }
}

struct DistState<'a> {
    parts: &'a [i64],
    needs: Vec<i64>,
    rest: Vec<i64>,
    assign: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, Default)]
pub struct SweepOptions {
    /// 0 inherits the global rayon pool; otherwise a dedicated pool size.
    pub jobs: usize,
    /// Additionally materialize and verify a witness for every YES.
    pub verify_witnesses: bool,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub n: i64,
    pub k: usize,
    pub total: u64,
    /// Non-realizable sequences, in descending-lexicographic order.
    pub counterexamples: Vec<GallaiSequence>,
}

/// Outcome of [`ExactSolver::g_of_k`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GOfK {
    /// `g` is the threshold, provided it lies within the scanned range;
    /// every level from `g` through `checked_to` was verified empty.
    Threshold { g: i64, checked_to: i64 },
    /// The top scanned level still has counterexamples, so the threshold
    /// is at least `at_least` and the scan must go higher to locate it.
    LowerEvidence { at_least: i64 },
}

#[derive(Debug, Clone)]
pub struct ThresholdScan {
    pub k: usize,
    pub n_max: i64,
    /// Least scanned level from which no counterexample appears again.
    pub g: i64,
    pub highest_counterexample: Option<GallaiSequence>,
    /// `(n, counterexample count)` per scanned level.
    pub levels: Vec<(i64, u64)>,
}

pub const CACHE_HEADER: &str = "gallai-memo v1";
pub const CACHE_ENV_VAR: &str = "GALLAI_CACHE_DIR";

/// Default cache file under the directory named by `GALLAI_CACHE_DIR`.
pub fn cache_path_from_env() -> Option<PathBuf> {
    std::env::var_os(CACHE_ENV_VAR).map(|dir| PathBuf::from(dir).join("memo-v1.txt"))
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct CacheLoadReport {
    pub loaded: usize,
    pub skipped: usize,
}

/// All partitions of `n` with at least two parts, parts non-increasing,
/// in descending lexicographic order: (n-1,1), (n-2,2), (n-2,1,1), ...
fn partitions_desc(n: i64) -> Vec<Vec<i64>> {
    fn rec(remaining: i64, max_part: i64, acc: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if remaining == 0 {
            if acc.len() >= 2 {
                out.push(acc.clone());
            }
            return;
        }
        let mut part = max_part.min(remaining);
        while part >= 1 {
            acc.push(part);
            rec(remaining - part, part, acc, out);
            acc.pop();
            part -= 1;
        }
    }
    let mut out = Vec::new();
    rec(n, n - 1, &mut Vec::new(), &mut out);
    out
}

/// 0/1 subset sums over the pair products, with parent pointers for
/// extracting one witness subset per reachable sum.
struct SubsetSums {
    prods: Vec<i64>,
    reach: Vec<bool>,
    from: Vec<usize>,
}

impl SubsetSums {
    fn new(prods: &[i64], cap: i64) -> Self {
        let capu = cap as usize;
        let mut reach = vec![false; capu + 1];
        let mut from = vec![usize::MAX; capu + 1];
        reach[0] = true;
        for (idx, &p) in prods.iter().enumerate() {
            let pu = p as usize;
            // Descending, so each product is used at most once; the parent
            // index chain is strictly decreasing, hence a valid subset.
            for s in (pu..=capu).rev() {
                if !reach[s] && reach[s - pu] {
                    reach[s] = true;
                    from[s] = idx;
                }
            }
        }
        SubsetSums {
            prods: prods.to_vec(),
            reach,
            from,
        }
    }

    fn reachable(&self, sum: i64) -> bool {
        self.reach[sum as usize]
    }

    /// Membership flags per product for one subset reaching `sum`.
    fn witness(&self, mut sum: i64) -> Vec<bool> {
        debug_assert!(self.reachable(sum));
        let mut used = vec![false; self.prods.len()];
        while sum > 0 {
            let idx = self.from[sum as usize];
            debug_assert!(idx != usize::MAX && !used[idx]);
            used[idx] = true;
            sum -= self.prods[idx];
        }
        used
    }
}

pub const DEFAULT_ORACLE_CAP: f64 = 1e8;

/// Independent exhaustive check, for cross-validating the decomposition
/// search at tiny sizes: backtracks over edges in pair-rank order, keeping
/// per-color budgets and rejecting three-colored triangles as soon as the
/// closing edge appears. The first edge is pinned to the first color
/// (vertex relabeling makes that lossless). Refuses when `k^edges`
/// exceeds [`DEFAULT_ORACLE_CAP`].
pub fn tiny_oracle(s: &GallaiSequence) -> Result<bool, ExactError> {
    tiny_oracle_with_cap(s, DEFAULT_ORACLE_CAP)
}

/// [`tiny_oracle`] with an explicit combination cap, for callers that
/// deliberately accept a longer run.
pub fn tiny_oracle_with_cap(s: &GallaiSequence, cap: f64) -> Result<bool, ExactError> {
    let n = s.n() as usize;
    let key = s.canonical_key();
    let k_eff = key.counts.len();
    if n <= 2 || k_eff <= 1 {
        return Ok(true);
    }
    let edges = edge_count(n);
    if (edges as f64) * (k_eff as f64).ln() > cap.ln() {
        return Err(ExactError::OracleCap {
            k: k_eff,
            edges,
            cap,
        });
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    debug_assert!(pairs
        .iter()
        .enumerate()
        .all(|(idx, &(u, v))| pair_rank(n, u, v) == idx));
    let mut colors = vec![0u32; edges];
    let mut remaining = key.counts.clone();

    fn backtrack(
        idx: usize,
        n: usize,
        pairs: &[(usize, usize)],
        colors: &mut Vec<u32>,
        remaining: &mut Vec<i64>,
    ) -> bool {
        if idx == pairs.len() {
            return true;
        }
        let (u, v) = pairs[idx];
        let last = if idx == 0 { 1 } else { remaining.len() };
        for c in 0..last {
            if remaining[c] == 0 {
                continue;
            }
            let cand = (c + 1) as u32;
            // Triangles close exactly when their highest-rank edge (u,v)
            // with w < u arrives, so this check is complete.
            let clash = (0..u).any(|w| {
                let c1 = colors[pair_rank(n, w, u)];
                let c2 = colors[pair_rank(n, w, v)];
                c1 != c2 && c1 != cand && c2 != cand
            });
            if clash {
                continue;
            }
            colors[idx] = cand;
            remaining[c] -= 1;
            if backtrack(idx + 1, n, pairs, colors, remaining) {
                return true;
            }
            remaining[c] += 1;
        }
        colors[idx] = 0;
        false
    }

    Ok(backtrack(0, n, &pairs, &mut colors, &mut remaining))
}
