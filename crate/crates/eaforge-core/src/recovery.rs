//! EA-equivalence recovery for quadratic functions.
//!
//! Given quadratic `F`, `G`, the recovery searches for a tuple
//! `(A0, B0, C0, a)` with `G(x) = A0 F(B0 x) + C0 x + a`. The key fact is
//! the chain rule `J_G(x) = A0 J_F(B0 x) B0`: a guessed pair `(v, w)`
//! with `B0 v = w` makes `(A0^(-1), B0)` a solution of the affine system
//!
//! ```text
//! X J_G(v) - J_F(w) Y = 0,    Y v = w
//! ```
//!
//! over the `m^2 + n^2` unknown matrix entries. Guesses are steered by
//! the rank table: `B0` maps inputs of a given Jacobian rank of `G` onto
//! inputs of the same rank of `F`, so reference vectors are drawn from
//! the rarest nonzero rank buckets and candidates from the matching
//! buckets of `G`.

use alloc::vec::Vec;

use crate::bits::{BitMatrix, BitVector, SolutionSpace, DEFAULT_ENUM_CAP};
use crate::jacobian::{linear_jacobian, rank_table, LinearJacobian, RankTable};
use crate::vbf::{EaTuple, Vbf};
use crate::Error;

/// Tuning of the recovery search.
#[derive(Clone, Debug)]
pub struct RecoveryConfig {
    /// Number of simultaneous guesses. `None` selects 3, or 2 when the
    /// rank distribution is the APN one with `n = m`, which trades more
    /// guesses for much cheaper ones.
    pub s: Option<usize>,
    /// Largest solution-space dimension that is enumerated directly.
    pub threshold: usize,
    /// Refine over-threshold guesses with one extra reference vector
    /// instead of skipping them.
    pub exhaustive: bool,
    /// Hard cap on the number of enumerated solutions per system.
    pub enumeration_cap: u64,
    /// Parallelism hint: `Some(1)` forces the sequential path. With the
    /// `rayon` feature the guess loop otherwise runs data-parallel,
    /// returning the canonically first success either way.
    pub jobs: Option<usize>,
}

impl Default for RecoveryConfig {
    fn default() -> Self {
        RecoveryConfig {
            s: None,
            threshold: 10,
            exhaustive: false,
            enumeration_cap: DEFAULT_ENUM_CAP,
            jobs: None,
        }
    }
}

/// Outcome of [`recover`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RecoveryVerdict {
    /// A verified tuple: `G = A0 F(B0 x) + C0 x + a` holds entrywise.
    Tuple(EaTuple),
    /// The rank distributions differ, which proves inequivalence.
    NotEquivalent,
    /// The guess space was exhausted without finding a tuple.
    NoEquivalenceFound {
        guesses_tried: u64,
        threshold_exceeded: u64,
    },
}

/// Builds the affine system for a set of guessed pairs `(v_i, w_i)`.
///
/// Unknowns are the entries of `X` (row-major, `m^2` bits) followed by
/// the entries of `Y` (row-major, `n^2` bits). Every guess contributes
/// `mn` homogeneous rows `X J_G(v) - J_F(w) Y = 0` followed by `n`
/// affine rows `Y v = w`.
pub fn build_guess_system(
    jf: &LinearJacobian,
    jg: &LinearJacobian,
    guesses: &[(u32, u32)],
) -> Result<(BitMatrix, BitVector), Error> {
    let (n, m) = (jf.input_dim(), jf.output_dim());
    if jg.input_dim() != n || jg.output_dim() != m {
        return Err(Error::DimensionMismatch);
    }
    let cols = m * m + n * n;
    let rows_per_guess = m * n + n;
    let mut rows = Vec::with_capacity(guesses.len() * rows_per_guess);
    let mut rhs = BitVector::zero(guesses.len() * rows_per_guess);
    for (gi, &(v, w)) in guesses.iter().enumerate() {
        let base = gi * rows_per_guess;
        for i in 0..m {
            for j in 0..n {
                let mut row = BitVector::zero(cols);
                let jg_col = jg.column_at(j, v);
                for k in 0..m {
                    if jg_col >> k & 1 == 1 {
                        row.set(i * m + k, true);
                    }
                }
                for l in 0..n {
                    if jf.column_at(l, w) >> i & 1 == 1 {
                        row.set(m * m + l * n + j, true);
                    }
                }
                rows.push(row);
            }
        }
        for j in 0..n {
            let mut row = BitVector::zero(cols);
            for l in 0..n {
                if v >> l & 1 == 1 {
                    row.set(m * m + j * n + l, true);
                }
            }
            rows.push(row);
            rhs.set(base + m * n + j, w >> j & 1 == 1);
        }
    }
    Ok((BitMatrix::from_rows(rows, cols), rhs))
}

/// Chooses up to `s` linearly independent reference vectors from the
/// rank table, preferring the least frequently occurring nonzero ranks.
///
/// When the rarest bucket lacks enough independent vectors the plan
/// continues into the next-larger buckets, which realises the hybrid
/// strategy: the fixed references from the small bucket get paired
/// against every ordering of the matching candidate bucket. Returns
/// `(w, rank)` pairs; fewer than `s` when independence runs out, and
/// [`Error::NoUsableRank`] when every nonzero input has rank 0.
pub fn choose_references(table: &RankTable, s: usize) -> Result<Vec<(u32, usize)>, Error> {
    let mut order: Vec<usize> = (1..=table.max_rank())
        .filter(|&r| !table.bucket(r).is_empty())
        .collect();
    if order.is_empty() {
        return Err(Error::NoUsableRank);
    }
    order.sort_by_key(|&r| (table.bucket(r).len(), r));
    let mut refs = Vec::with_capacity(s);
    let mut span = XorBasis::new();
    'outer: for &r in &order {
        for &w in table.bucket(r) {
            if refs.len() == s {
                break 'outer;
            }
            if span.insert(w) {
                refs.push((w, r));
            }
        }
    }
    Ok(refs)
}

/// Recovers, if it exists, a verified tuple with
/// `G = A0 F(B0 x) + C0 x + a`.
///
/// The guess loop enumerates linearly independent candidate tuples in
/// ascending lexicographic order of their integer encodings and returns
/// the first verified tuple; the result is deterministic for fixed
/// inputs and configuration, also under the parallel feature.
pub fn recover(f: &Vbf, g: &Vbf, cfg: &RecoveryConfig) -> Result<RecoveryVerdict, Error> {
    let (n, m) = (f.input_dim(), f.output_dim());
    if g.input_dim() != n || g.output_dim() != m {
        return Err(Error::DimensionMismatch);
    }
    let jf = linear_jacobian(f)?;
    let jg = linear_jacobian(g)?;
    let tf = rank_table(&jf);
    let tg = rank_table(&jg);
    let dist = tf.distribution();
    if dist != tg.distribution() {
        return Ok(RecoveryVerdict::NotEquivalent);
    }
    let auto = cfg.s.is_none();
    let mut s = cfg.s.unwrap_or_else(|| {
        if n == m && dist.is_apn_shape(n) {
            2
        } else {
            3
        }
    });
    let mut total_tried = 0;
    let mut total_exceeded = 0;
    loop {
        let refs = choose_references(&tf, s)?;
        // One spare reference for the exhaustive refinement of guesses
        // whose solution space exceeds the threshold.
        let spare = if cfg.exhaustive {
            choose_references(&tf, refs.len() + 1)?
                .get(refs.len())
                .copied()
        } else {
            None
        };
        let could_extend = refs.len() == s;
        let ctx = SearchContext {
            f,
            g,
            jf: &jf,
            jg: &jg,
            tg: &tg,
            refs: &refs,
            spare,
            cfg,
        };
        match run_search(&ctx) {
            RecoveryVerdict::Tuple(t) => return Ok(RecoveryVerdict::Tuple(t)),
            RecoveryVerdict::NoEquivalenceFound {
                guesses_tried,
                threshold_exceeded,
            } => {
                total_tried += guesses_tried;
                total_exceeded += threshold_exceeded;
                // Skipped guesses mean s may be underestimated; in auto
                // mode restart with one more simultaneous guess while
                // independent references remain.
                if auto && threshold_exceeded > 0 && could_extend && s < n {
                    s += 1;
                    continue;
                }
                return Ok(RecoveryVerdict::NoEquivalenceFound {
                    guesses_tried: total_tried,
                    threshold_exceeded: total_exceeded,
                });
            }
            RecoveryVerdict::NotEquivalent => unreachable!("search never returns NotEquivalent"),
        }
    }
}

struct SearchContext<'a> {
    f: &'a Vbf,
    g: &'a Vbf,
    jf: &'a LinearJacobian,
    jg: &'a LinearJacobian,
    tg: &'a RankTable,
    refs: &'a [(u32, usize)],
    spare: Option<(u32, usize)>,
    cfg: &'a RecoveryConfig,
}

enum GuessOutcome {
    Found(EaTuple),
    Rejected,
    ThresholdExceeded,
}

fn run_search(ctx: &SearchContext<'_>) -> RecoveryVerdict {
    let first_bucket = ctx.tg.bucket(ctx.refs[0].1);
    let mut guesses_tried = 0u64;
    let mut threshold_exceeded = 0u64;
    for &v1 in first_bucket {
        let mut chunk = Vec::new();
        let mut prefix = Vec::with_capacity(ctx.refs.len());
        prefix.push(v1);
        let mut span = XorBasis::new();
        span.insert(v1);
        collect_tuples(ctx, &mut prefix, &mut span, &mut chunk);
        let (outcome, exceeded) = evaluate_chunk(ctx, &chunk);
        guesses_tried += chunk.len() as u64;
        threshold_exceeded += exceeded;
        if let Some(tuple) = outcome {
            return RecoveryVerdict::Tuple(tuple);
        }
    }
    RecoveryVerdict::NoEquivalenceFound {
        guesses_tried,
        threshold_exceeded,
    }
}

/// All completions of `prefix` into independent tuples, in ascending
/// lexicographic order.
fn collect_tuples(
    ctx: &SearchContext<'_>,
    prefix: &mut Vec<u32>,
    span: &mut XorBasis,
    out: &mut Vec<Vec<u32>>,
) {
    if prefix.len() == ctx.refs.len() {
        out.push(prefix.clone());
        return;
    }
    let bucket = ctx.tg.bucket(ctx.refs[prefix.len()].1);
    for &v in bucket {
        let mut extended = *span;
        if !extended.insert(v) {
            continue;
        }
        prefix.push(v);
        collect_tuples(ctx, prefix, &mut extended, out);
        prefix.pop();
    }
}

#[cfg(feature = "rayon")]
fn evaluate_chunk(ctx: &SearchContext<'_>, chunk: &[Vec<u32>]) -> (Option<EaTuple>, u64) {
    use core::sync::atomic::{AtomicU64, Ordering};
    use rayon::prelude::*;
    if ctx.cfg.jobs == Some(1) {
        return evaluate_chunk_sequential(ctx, chunk);
    }
    let exceeded = AtomicU64::new(0);
    let found = chunk
        .par_iter()
        .find_map_first(|tuple| match evaluate_guess(ctx, tuple) {
            GuessOutcome::Found(t) => Some(t),
            GuessOutcome::Rejected => None,
            GuessOutcome::ThresholdExceeded => {
                exceeded.fetch_add(1, Ordering::Relaxed);
                None
            }
        });
    (found, exceeded.into_inner())
}

#[cfg(not(feature = "rayon"))]
fn evaluate_chunk(ctx: &SearchContext<'_>, chunk: &[Vec<u32>]) -> (Option<EaTuple>, u64) {
    evaluate_chunk_sequential(ctx, chunk)
}

fn evaluate_chunk_sequential(
    ctx: &SearchContext<'_>,
    chunk: &[Vec<u32>],
) -> (Option<EaTuple>, u64) {
    let mut exceeded = 0;
    for tuple in chunk {
        match evaluate_guess(ctx, tuple) {
            GuessOutcome::Found(t) => return (Some(t), exceeded),
            GuessOutcome::Rejected => {}
            GuessOutcome::ThresholdExceeded => exceeded += 1,
        }
    }
    (None, exceeded)
}

fn evaluate_guess(ctx: &SearchContext<'_>, tuple: &[u32]) -> GuessOutcome {
    let guesses: Vec<(u32, u32)> = tuple
        .iter()
        .zip(ctx.refs)
        .map(|(&v, &(w, _))| (v, w))
        .collect();
    let (mat, rhs) =
        build_guess_system(ctx.jf, ctx.jg, &guesses).expect("dimensions agree by construction");
    let Some(space) = mat.solve_affine(&rhs) else {
        return GuessOutcome::Rejected;
    };
    if ctx.refs.len() == 1 {
        // Single-guess rank bound r(m+n-r) + (n-r), sharp in practice.
        let (n, m) = (ctx.jf.input_dim(), ctx.jf.output_dim());
        let r = ctx.refs[0].1;
        debug_assert!(m * m + n * n - space.dim() <= r * (m + n - r) + (n - r));
    }
    if space.dim() <= ctx.cfg.threshold {
        return scan_space(ctx, &space);
    }
    if !ctx.cfg.exhaustive {
        return GuessOutcome::ThresholdExceeded;
    }
    refine_guess(ctx, &guesses, &space)
}

/// One level of refinement for an over-threshold guess: extend by a
/// spare reference and try every matching candidate. Falls back to
/// enumerating an over-threshold space directly when no spare reference
/// exists or a refined system still exceeds the threshold, as long as
/// the enumeration cap allows; completeness is then limited only by the
/// cap.
fn refine_guess(
    ctx: &SearchContext<'_>,
    guesses: &[(u32, u32)],
    space: &SolutionSpace,
) -> GuessOutcome {
    let Some((w_extra, rank_extra)) = ctx.spare else {
        return match scan_space(ctx, space) {
            GuessOutcome::Rejected => GuessOutcome::ThresholdExceeded,
            other => other,
        };
    };
    let mut span = XorBasis::new();
    for &(v, _) in guesses {
        span.insert(v);
    }
    let mut exceeded_any = false;
    for &v_extra in ctx.tg.bucket(rank_extra) {
        let mut extended_span = span;
        if !extended_span.insert(v_extra) {
            continue;
        }
        let mut extended = guesses.to_vec();
        extended.push((v_extra, w_extra));
        let (mat, rhs) = build_guess_system(ctx.jf, ctx.jg, &extended)
            .expect("dimensions agree by construction");
        let Some(refined) = mat.solve_affine(&rhs) else {
            continue;
        };
        if refined.dim() > ctx.cfg.threshold {
            exceeded_any = true;
        }
        if let GuessOutcome::Found(t) = scan_space(ctx, &refined) {
            return GuessOutcome::Found(t);
        }
    }
    if exceeded_any {
        GuessOutcome::ThresholdExceeded
    } else {
        GuessOutcome::Rejected
    }
}

/// Walks a solution space looking for a pair of nonsingular matrices
/// that finishes into a verified tuple.
fn scan_space(ctx: &SearchContext<'_>, space: &SolutionSpace) -> GuessOutcome {
    let (n, m) = (ctx.jf.input_dim(), ctx.jf.output_dim());
    let Ok(iter) = space.enumerate(ctx.cfg.enumeration_cap) else {
        return GuessOutcome::ThresholdExceeded;
    };
    for solution in iter {
        let y = unpack_matrix(&solution, m * m, n, n);
        if !y.is_nonsingular() {
            continue;
        }
        let x = unpack_matrix(&solution, 0, m, m);
        let Some(a0) = x.invert() else { continue };
        let b0 = y;
        if let Some((c0, a)) = finish(ctx.f, ctx.g, &a0, &b0) {
            let tuple = EaTuple::new(a0, b0, c0, a).expect("checked nonsingular");
            // finish() already checks the defining identity pointwise,
            // but a tuple is only ever returned through this gate.
            if verify(ctx.f, ctx.g, &tuple) {
                return GuessOutcome::Found(tuple);
            }
        }
    }
    GuessOutcome::Rejected
}

fn unpack_matrix(solution: &BitVector, offset: usize, rows: usize, cols: usize) -> BitMatrix {
    let mut mat = BitMatrix::zero(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            if solution.get(offset + i * cols + j) {
                mat.set(i, j, true);
            }
        }
    }
    mat
}

/// Completes a candidate pair `(A0, B0)` into the full tuple, or rejects
/// it: with `G1(x) = A0 F(B0 x)`, the constant is `a = G(0) + G1(0)` and
/// `D(x) = G(x) + G1(x) + a` must be linear, in which case `C0` is read
/// off the unit vectors.
pub fn finish(f: &Vbf, g: &Vbf, a0: &BitMatrix, b0: &BitMatrix) -> Option<(BitMatrix, BitVector)> {
    let (n, m) = (f.input_dim(), f.output_dim());
    let g1 = |x: u32| -> u32 {
        a0.mul_element(u64::from(f.eval(b0.mul_element(u64::from(x)) as u32))) as u32
    };
    let a = g.eval(0) ^ g1(0);
    let mut c0 = BitMatrix::zero(m, n);
    for j in 0..n {
        let column = g.eval(1 << j) ^ g1(1 << j) ^ a;
        for i in 0..m {
            if column >> i & 1 == 1 {
                c0.set(i, j, true);
            }
        }
    }
    // D must agree with its linear interpolation everywhere.
    for x in 0..1u32 << n {
        let d = g.eval(x) ^ g1(x) ^ a;
        if c0.mul_element(u64::from(x)) as u32 != d {
            return None;
        }
    }
    Some((c0, BitVector::from_element(u64::from(a), m)))
}

/// Total correctness gate: does `compose_ea(F, t)` equal `G` entrywise?
pub fn verify(f: &Vbf, g: &Vbf, tuple: &EaTuple) -> bool {
    f.compose_ea(tuple).map(|h| &h == g).unwrap_or(false)
}

/// Tiny fixed-capacity echelon for independence checks of 32-bit
/// elements; copyable so search prefixes can fork it cheaply.
#[derive(Clone, Copy)]
struct XorBasis {
    echelon: [u32; 32],
}

impl XorBasis {
    fn new() -> Self {
        XorBasis { echelon: [0; 32] }
    }

    /// Inserts `v` if independent of the current span; returns whether
    /// it was inserted.
    fn insert(&mut self, v: u32) -> bool {
        let mut v = v;
        while v != 0 {
            let lead = (31 - v.leading_zeros()) as usize;
            if self.echelon[lead] == 0 {
                self.echelon[lead] = v;
                return true;
            }
            v ^= self.echelon[lead];
        }
        false
    }
}
