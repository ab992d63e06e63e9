//! Threshold estimates: how many vertices force every class-size
//! prescription on `k` colors to be realizable, and candidate prescriptions
//! below that point for which realizability provably fails.
//!
//! The upper side evaluates an explicit cubic whose first positive value
//! yields a block size `n0`; the peeling construction then covers every
//! prescription on at least `2k(n0+1)` vertices. The lower side builds a
//! two-level prescription (a few large classes, many small ones) and checks
//! the two counting conditions under which it cannot be realized.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::seqcore::{binom2, GallaiSequence, SeqError};

/// Largest `k` for which the cubic scan stays comfortably inside `i64`.
pub const MAX_K: i64 = 100_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BoundsError {
    #[error("k must be at least {min}, got {k}")]
    SmallK { k: i64, min: i64 },
    #[error("k = {k} exceeds the supported maximum {max}")]
    LargeK { k: i64, max: i64 },
    #[error("alpha must be a positive rational, got {num}/{den}")]
    BadAlpha { num: i64, den: i64 },
    #[error("degenerate instance at k = {k}: f = {f}, a = {a}, b = {b}")]
    Degenerate { k: i64, f: i64, a: i64, b: i64 },
    #[error("instance size overflows exact arithmetic: {0}")]
    Overflow(#[from] SeqError),
    #[error("positivity witness failed for k = {k}: value {value} at n = {n}")]
    WitnessFailed { k: i64, n: i64, value: i64 },
}

/// The cubic whose positivity drives the block-size choice:
/// The margin polynomial of the peeling construction,
/// `q(n) = -n^3 + 3k n^2 + (1-3k) n - 9k^2 + 21k - 6`: a block size `n`
/// with `q(n) > 0` leaves enough surplus internal edges to finish on the
/// final `2k` vertices.
pub fn block_cubic(k: i64, n: i64) -> i64 {
    -n * n * n + 3 * k * n * n + (1 - 3 * k) * n - 9 * k * k + 21 * k - 6
}

/// Least `r >= 0` with `r * r >= x`.
pub fn ceil_sqrt(x: i64) -> i64 {
    debug_assert!(x >= 0);
    let mut r = ((x as f64).sqrt() as i64 - 2).max(0);
    while r * r < x {
        r += 1;
    }
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UpperBoundReport {
    pub k: i64,
    /// Least block size with a positive cubic value.
    pub n0: i64,
    /// `2k(n0+1)`: from this many vertices on, every prescription on `k`
    /// colors is realizable.
    pub threshold: i64,
    pub q_at_n0: i64,
}

/// Finds the least `n0 >= 1` with `q(n0) > 0` by an ascending scan. The
/// scan is capped at `ceil(2*sqrt(k))`, where the cubic is verified to be
/// positive; a non-positive value there is reported as an error instead of
/// silently scanning on.
pub fn upper_bound_n0(k: i64) -> Result<UpperBoundReport, BoundsError> {
    if k < 2 {
        return Err(BoundsError::SmallK { k, min: 2 });
    }
    if k > MAX_K {
        return Err(BoundsError::LargeK { k, max: MAX_K });
    }
    let witness = ceil_sqrt(4 * k);
    let witness_value = block_cubic(k, witness);
    if witness_value <= 0 {
        return Err(BoundsError::WitnessFailed {
            k,
            n: witness,
            value: witness_value,
        });
    }
    for n in 1..=witness {
        let q = block_cubic(k, n);
        if q > 0 {
            debug_assert!(n == 1 || block_cubic(k, n - 1) <= 0);
            return Ok(UpperBoundReport {
                k,
                n0: n,
                threshold: 2 * k * (n + 1),
                q_at_n0: q,
            });
        }
    }
    unreachable!("the witness index itself is positive")
}

/// A two-level prescription on `f` vertices: one class of `a + c` edges,
/// `ceil(k/2) - 1` classes of `a`, and `floor(k/2)` classes of `b`.
/// When the counting conditions of [`check_step2`] and [`check_step4`]
/// hold, no coloring realizes it, so the threshold for `k` colors exceeds
/// `f`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowerInstance {
    pub k: i64,
    pub f: i64,
    pub a: i64,
    pub b: i64,
    /// Remainder folded into the first class; always in `[0, ceil(k/2))`.
    pub c: i64,
    /// True when `9a < b^2`, the regime the counting argument aims for.
    pub tight_regime: bool,
    pub sequence: GallaiSequence,
}

/// Builds the candidate prescription for `k` colors with scale factor
/// `alpha = alpha_num / alpha_den`:
/// `f = floor(alpha * k^1.5 / ln k)` (evaluated in f64; the floor of the
/// float value is the definition used throughout), `b = 3 * ceil(f / sqrt(k))`
/// with an exact integer ceiling, and `a` the largest value making the
/// class sizes sum to `binom(f, 2)`.
pub fn build_lower_instance(
    k: i64,
    alpha_num: i64,
    alpha_den: i64,
) -> Result<LowerInstance, BoundsError> {
    if k < 2 {
        return Err(BoundsError::SmallK { k, min: 2 });
    }
    if alpha_num <= 0 || alpha_den <= 0 {
        return Err(BoundsError::BadAlpha {
            num: alpha_num,
            den: alpha_den,
        });
    }
    let alpha = alpha_num as f64 / alpha_den as f64;
    let f = (alpha * (k as f64).powf(1.5) / (k as f64).ln()).floor() as i64;
    if f < 2 {
        return Err(BoundsError::Degenerate { k, f, a: 0, b: 0 });
    }
    let total = binom2(f)?;
    // Least t with t^2 * k >= f^2, i.e. the exact ceiling of f / sqrt(k).
    let ff = (f as i128) * (f as i128);
    let mut t = (((ff / k as i128) as f64).sqrt() as i64 - 2).max(0);
    while (t as i128) * (t as i128) * (k as i128) < ff {
        t += 1;
    }
    let b = 3 * t;
    let small_classes = k / 2;
    let large_classes = k - small_classes; // ceil(k/2)
    let leftover = total - small_classes * b;
    if leftover < large_classes {
        return Err(BoundsError::Degenerate { k, f, a: leftover / large_classes, b });
    }
    let a = leftover / large_classes;
    let c = leftover - a * large_classes;
    assert!((0..large_classes).contains(&c));
    assert_eq!(a * large_classes + b * small_classes + c, total);
    if a <= b {
        return Err(BoundsError::Degenerate { k, f, a, b });
    }
    let mut counts = Vec::with_capacity(k as usize);
    counts.push(a + c);
    counts.extend(std::iter::repeat_n(a, large_classes as usize - 1));
    counts.extend(std::iter::repeat_n(b, small_classes as usize));
    let sequence = GallaiSequence::new(f, &counts)?;
    Ok(LowerInstance {
        k,
        f,
        a,
        b,
        c,
        tight_regime: 9 * a < b * b,
        sequence,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Step2Failure {
    pub x: i64,
    pub h: i64,
    pub internal_edges_ok: bool,
    pub chain_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step2Report {
    pub k: i64,
    pub x_lo: i64,
    pub x_hi: i64,
    pub checked: u64,
    /// True when the range was thinned to a logarithmic grid.
    pub sampled: bool,
    pub all_pass: bool,
    pub first_failure: Option<Step2Failure>,
    /// True when the stronger `x > 3h` margin held at every checked point.
    pub wide_margin_everywhere: bool,
}

const STEP2_SAMPLING_CUTOFF: i64 = 100_000;

/// Checks, for every candidate big-class order `x` in `[b+2, f]`, that a
/// part meeting `h(x) = ceil(3(a+1)/x)` large classes cannot exist: the
/// internal edge count `binom(x,2) - 2(a+1)` must exceed
/// `binom(x-h,2) + binom(h,2)`, and the chaining step needs `x > 2h`.
/// Ranges longer than 100k points are thinned to a logarithmic grid that
/// always keeps both endpoints, unless `full_range` is set.
pub fn check_step2(inst: &LowerInstance, full_range: bool) -> Step2Report {
    let (a, b, f) = (inst.a, inst.b, inst.f);
    let x_lo = b + 2;
    let x_hi = f;
    let span = x_hi - x_lo + 1;
    let sampled = !full_range && span > STEP2_SAMPLING_CUTOFF;
    let mut checked = 0;
    let mut all_pass = true;
    let mut first_failure = None;
    let mut wide_margin = true;
    let mut x = x_lo;
    while x <= x_hi {
        let h = (3 * (a + 1) + x - 1) / x;
        let internal = binom2(x).expect("guarded at build") - 2 * (a + 1);
        let split = binom2(x - h).expect("x-h < f") + binom2(h).expect("h < f");
        let internal_edges_ok = internal > split;
        let chain_ok = x > 2 * h;
        checked += 1;
        if !(internal_edges_ok && chain_ok) {
            all_pass = false;
            if first_failure.is_none() {
                first_failure = Some(Step2Failure {
                    x,
                    h,
                    internal_edges_ok,
                    chain_ok,
                });
            }
        }
        if x <= 3 * h {
            wide_margin = false;
        }
        if sampled {
            // ~1% logarithmic stride, snapping to the far endpoint.
            let next = (x + x / 100).max(x + 1);
            x = if x < x_hi && next > x_hi { x_hi } else { next };
        } else {
            x += 1;
        }
    }
    Step2Report {
        k: inst.k,
        x_lo,
        x_hi,
        checked,
        sampled,
        all_pass,
        first_failure,
        wide_margin_everywhere: wide_margin,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step4Report {
    pub k: i64,
    pub holds: bool,
    /// True when the float comparison was too close to call and the
    /// verdict came from certified rational log bounds.
    pub certified: bool,
    pub lhs: i64,
    pub rhs_float: f64,
}

const STEP4_FLOAT_MARGIN: f64 = 1e-9;

/// Checks the global counting condition `(k-2) b > 3(a+1) ln k + b^2`.
/// Decided in f64 when the two sides are far apart; otherwise escalated to
/// rational interval bounds on `ln k` with a certified truncation tail.
pub fn check_step4(inst: &LowerInstance) -> Step4Report {
    let (k, a, b) = (inst.k, inst.a, inst.b);
    let lhs = (k - 2) * b;
    let rhs_float = 3.0 * (a + 1) as f64 * (k as f64).ln() + (b * b) as f64;
    let scale = (lhs as f64).abs().max(rhs_float.abs()).max(1.0);
    if ((lhs as f64) - rhs_float).abs() > STEP4_FLOAT_MARGIN * scale {
        return Step4Report {
            k,
            holds: (lhs as f64) > rhs_float,
            certified: false,
            lhs,
            rhs_float,
        };
    }
    Step4Report {
        k,
        holds: step4_certified(k, a, b),
        certified: true,
        lhs,
        rhs_float,
    }
}

fn big_ratio(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Rational `[lo, hi]` enclosure of `ln y` for `1 <= y <= 2`, via
/// `ln y = 2 atanh(z)` with `z = (y-1)/(y+1) <= 1/3`. The truncation tail
/// after `terms` odd powers is bounded by `2 z^(2T+1) / ((2T+1)(1-z^2))`.
fn ln_enclosure_unit(y: &BigRational, terms: usize) -> (BigRational, BigRational) {
    let one = BigRational::one();
    debug_assert!(*y >= one && *y <= big_ratio(2));
    let z = (y - &one) / (y + &one);
    let z2 = &z * &z;
    let mut power = z.clone();
    let mut sum = BigRational::zero();
    for j in 0..terms {
        sum += &power / big_ratio(2 * j as i64 + 1);
        power *= &z2;
    }
    let lo = &sum * big_ratio(2);
    let tail = big_ratio(2) * power / (big_ratio(2 * terms as i64 + 1) * (one - z2));
    debug_assert!(!tail.is_negative());
    let hi = &lo + tail;
    (lo, hi)
}

/// Rational enclosure of `ln k` via `k = 2^s * r` with `r` in `[1, 2)`.
fn ln_enclosure(k: i64, terms: usize) -> (BigRational, BigRational) {
    debug_assert!(k >= 2);
    let s = 63 - (k as u64).leading_zeros() as i64;
    let r = BigRational::new(BigInt::from(k), BigInt::one() << s);
    let (two_lo, two_hi) = ln_enclosure_unit(&big_ratio(2), terms);
    let (r_lo, r_hi) = ln_enclosure_unit(&r, terms);
    (
        &two_lo * big_ratio(s) + r_lo,
        &two_hi * big_ratio(s) + r_hi,
    )
}

fn step4_certified(k: i64, a: i64, b: i64) -> bool {
    let lhs = big_ratio((k - 2) * b);
    let coef = big_ratio(3 * (a + 1));
    let quad = big_ratio(b * b);
    let mut terms = 20;
    loop {
        let (lo, hi) = ln_enclosure(k, terms);
        if lhs > &coef * hi + &quad {
            return true;
        }
        if lhs <= &coef * lo + &quad {
            return false;
        }
        terms *= 2;
        assert!(terms <= 5120, "log enclosure failed to separate the sides");
    }
}

/// One inequality of the bracket computation, by name, with its outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NamedCheck {
    pub name: &'static str,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    pub k: i64,
    /// The `alpha = alpha_num / alpha_den` the candidate family used.
    pub alpha_num: i64,
    pub alpha_den: i64,
    /// The threshold for `k` colors is at least this value.
    pub lower: i64,
    /// ... and at most this value (`2k(n0 + 1)`).
    pub upper: i64,
    /// Least block size whose margin cubic is positive.
    pub n0: i64,
    /// `f` when the candidate prescription on `f` vertices was fully
    /// checked non-realizable; only lifts `lower` once it beats the
    /// generic `2k - 2` floor (around `k ~ 700` for `alpha = 1/2`).
    pub instance_lower: Option<i64>,
    /// Every inequality consulted, in evaluation order.
    pub checks: Vec<NamedCheck>,
}

/// Brackets the realizability threshold for `k` colors. The upper side is
/// the peeling-construction threshold `2k(n0+1)`. The lower side is `f`
/// when the candidate prescription exists and both counting conditions
/// pass over the full `x` range; otherwise the generic floor `2k - 2`,
/// improvable via `exact_floor` (e.g. a value established by exhaustive
/// search at small `k` — never computed implicitly here, it is costly).
pub fn g_bracket(
    k: i64,
    alpha_num: i64,
    alpha_den: i64,
    exact_floor: Option<i64>,
) -> Result<BoundReport, BoundsError> {
    let ub = upper_bound_n0(k)?;
    let mut checks = Vec::new();
    let mut check = |name: &'static str, holds: bool| {
        checks.push(NamedCheck { name, holds });
        holds
    };
    check("block-cubic-positive-at-n0", ub.q_at_n0 > 0);
    let instance_lower = match build_lower_instance(k, alpha_num, alpha_den) {
        Ok(inst) => {
            let s2 = check_step2(&inst, true);
            let s4 = check_step4(&inst);
            let family = check("candidate-family-valid", true);
            let orders = check("big-class-orders", s2.all_pass && s2.checked > 0);
            let counting = check("counting-condition", s4.holds);
            (family && orders && counting).then_some(inst.f)
        }
        Err(BoundsError::Degenerate { .. }) => {
            check("candidate-family-valid", false);
            None
        }
        Err(other) => return Err(other),
    };
    let lower = (2 * k - 2)
        .max(instance_lower.unwrap_or(0))
        .max(exact_floor.unwrap_or(0));
    Ok(BoundReport {
        k,
        alpha_num,
        alpha_den,
        lower,
        upper: ub.threshold,
        n0: ub.n0,
        instance_lower,
        checks,
    })
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InternalEdgesError {
    #[error("requires n > j > n/2, got n = {n}, j = {j}")]
    Domain { n: i64, j: i64 },
    #[error("requires 1 <= j <= n, got n = {n}, j = {j}")]
    OutOfRange { n: i64, j: i64 },
    #[error(transparent)]
    Overflow(#[from] SeqError),
}

/// Most edges a union of complete parts on `n` vertices can keep internal
/// when its largest part has exactly `j` vertices and `j` exceeds `n/2`:
/// the rest is best left whole, giving `binom(j,2) + binom(n-j,2)`.
pub fn max_internal_edges(n: i64, j: i64) -> Result<i64, InternalEdgesError> {
    if !(n > j && 2 * j > n) {
        return Err(InternalEdgesError::Domain { n, j });
    }
    Ok(binom2(j)? + binom2(n - j)?)
}

/// Exhaustive reference for [`max_internal_edges`] without the `j > n/2`
/// restriction: maximizes total internal edges over all partitions of `n`
/// whose largest part is exactly `j`.
pub fn brute_force_internal(n: i64, j: i64) -> Result<i64, InternalEdgesError> {
    if !(1..=n).contains(&j) {
        return Err(InternalEdgesError::OutOfRange { n, j });
    }
    fn best(remaining: i64, cap: i64) -> i64 {
        if remaining == 0 {
            return 0;
        }
        (1..=cap.min(remaining))
            .map(|part| binom2(part).expect("small") + best(remaining - part, part))
            .max()
            .expect("cap >= 1")
    }
    Ok(binom2(j)? + best(n - j, j))
}
