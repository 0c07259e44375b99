//! Subcommand implementations. Each command reads parsed inputs, runs
//! the library, and emits one JSON object per line on the given writer;
//! per-function work is parallelised with output reassembled in input
//! order, so results never depend on the worker count.

use std::io::Write;

use anyhow::{anyhow, bail, Context, Result};
use rand_core::SeedableRng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use eaforge_core::bits::{BitMatrix, BitVector};
use eaforge_core::ccz;
use eaforge_core::invariants::{self, Invariant};
use eaforge_core::jacobian::{linear_jacobian, rank_table};
use eaforge_core::recovery::{recover, RecoveryConfig, RecoveryVerdict};
use eaforge_core::vbf::{random_quadratic, Spectrum, Vbf};

use crate::format::{t_record, FunctionFile};

/// Exit code for a successful run (for `ea-recover`: tuple found).
pub const EXIT_OK: i32 = 0;
/// Usage or data error.
pub const EXIT_ERROR: i32 = 1;
/// `ea-recover`: proven not EA-equivalent.
pub const EXIT_NOT_EQUIVALENT: i32 = 2;
/// `ea-recover`: guess space exhausted without a tuple.
pub const EXIT_NO_EQUIVALENCE_FOUND: i32 = 3;

fn spectrum_json(s: &Spectrum) -> Value {
    let mut map = Map::new();
    for &(value, mult) in s.entries() {
        map.insert(value.to_string(), json!(mult));
    }
    Value::Object(map)
}

fn thickness_json(t: &ccz::ThicknessSpectrum) -> Value {
    let mut map = Map::new();
    for (j, &count) in t.counts().iter().enumerate() {
        if count > 0 {
            map.insert(j.to_string(), json!(count));
        }
    }
    Value::Object(map)
}

fn counts_json(counts: &[u64]) -> Value {
    let mut map = Map::new();
    for (r, &count) in counts.iter().enumerate() {
        if count > 0 {
            map.insert(r.to_string(), json!(count));
        }
    }
    Value::Object(map)
}

fn matrix_hex(m: &BitMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| json!(m.row(i).to_hex())).collect())
}

fn vector_hex(v: &BitVector) -> Value {
    json!(v.to_hex())
}

/// Maps each function to a JSON line in parallel, preserving input order.
fn per_function_lines<F>(file: &FunctionFile, op: F) -> Result<Vec<String>>
where
    F: Fn(usize, &Vbf) -> Result<Value> + Sync,
{
    file.entries
        .par_iter()
        .enumerate()
        .map(|(index, entry)| {
            let value = op(index, &entry.vbf)
                .with_context(|| format!("function #{index} (line {})", entry.line))?;
            Ok(value.to_string())
        })
        .collect()
}

pub fn spectra(file: &FunctionFile, out: &mut impl Write) -> Result<i32> {
    let lines = per_function_lines(file, |index, f| {
        Ok(json!({
            "index": index,
            "n": f.input_dim(),
            "m": f.output_dim(),
            "degree": f.degree(),
            "differential_spectrum": spectrum_json(&f.differential_spectrum()),
            "extended_walsh_spectrum": spectrum_json(&f.extended_walsh_spectrum()),
            "linearity": f.linearity(),
            "apn": f.is_apn().ok(),
            "permutation": f.is_permutation(),
        }))
    })?;
    emit(out, &lines)
}

pub fn ranktable(file: &FunctionFile, out: &mut impl Write) -> Result<i32> {
    let lines = per_function_lines(file, |index, f| {
        let j = linear_jacobian(f)?;
        let dist = rank_table(&j).distribution();
        Ok(json!({
            "index": index,
            "rank_distribution": counts_json(dist.counts()),
        }))
    })?;
    emit(out, &lines)
}

pub fn ortho(file: &FunctionFile, out: &mut impl Write) -> Result<i32> {
    let lines = per_function_lines(file, |index, f| {
        let label = invariants::ortho_label(f)?;
        Ok(json!({
            "index": index,
            "label": label.serialized(),
        }))
    })?;
    emit(out, &lines)
}

pub fn partition(file: &FunctionFile, selectors: &[String], out: &mut impl Write) -> Result<i32> {
    if selectors.is_empty() {
        bail!("--use needs at least one invariant");
    }
    let selectors: Vec<Invariant> = selectors
        .iter()
        .map(|name| {
            Invariant::from_name(name)
                .ok_or_else(|| anyhow!("unknown invariant {name:?} (see --help)"))
        })
        .collect::<Result<_>>()?;
    let labels: Vec<String> = file
        .entries
        .par_iter()
        .enumerate()
        .map(|(index, entry)| {
            invariants::partition_label(&entry.vbf, &selectors).map_err(|(inv, e)| {
                anyhow!(
                    "function #{index} (line {}): invariant {inv} not applicable: {e}",
                    entry.line
                )
            })
        })
        .collect::<Result<_>>()?;
    let mut buckets: std::collections::BTreeMap<&str, Vec<usize>> = Default::default();
    for (index, label) in labels.iter().enumerate() {
        buckets.entry(label).or_default().push(index);
    }
    let lines: Vec<String> = buckets
        .into_iter()
        .map(|(label, members)| json!({ "label": label, "members": members }).to_string())
        .collect();
    emit(out, &lines)
}

pub struct RecoverArgs {
    pub s: Option<usize>,
    pub threshold: Option<usize>,
    pub exhaustive: bool,
    pub jobs: Option<usize>,
}

pub fn ea_recover(
    file_f: &FunctionFile,
    file_g: &FunctionFile,
    args: &RecoverArgs,
    out: &mut impl Write,
) -> Result<i32> {
    let f = &first(file_f, "F")?.vbf;
    let g = &first(file_g, "G")?.vbf;
    let mut cfg = RecoveryConfig {
        s: args.s,
        exhaustive: args.exhaustive,
        jobs: args.jobs,
        ..RecoveryConfig::default()
    };
    if let Some(t) = args.threshold {
        cfg.threshold = t;
    }
    let verdict = recover(f, g, &cfg)?;
    let (line, code) = match verdict {
        RecoveryVerdict::Tuple(t) => (
            json!({
                "verdict": "EQUIVALENT",
                "a0": matrix_hex(t.a0()),
                "b0": matrix_hex(t.b0()),
                "c0": matrix_hex(t.c0()),
                "a": vector_hex(t.a()),
            }),
            EXIT_OK,
        ),
        RecoveryVerdict::NotEquivalent => (
            json!({ "verdict": "NOT EQUIVALENT" }),
            EXIT_NOT_EQUIVALENT,
        ),
        RecoveryVerdict::NoEquivalenceFound {
            guesses_tried,
            threshold_exceeded,
        } => (
            json!({
                "verdict": "NO EQUIVALENCE FOUND",
                "guesses_tried": guesses_tried,
                "threshold_exceeded": threshold_exceeded,
            }),
            EXIT_NO_EQUIVALENCE_FOUND,
        ),
    };
    writeln!(out, "{line}")?;
    Ok(code)
}

fn first<'a>(file: &'a FunctionFile, role: &str) -> Result<&'a crate::format::Entry> {
    file.entries
        .first()
        .ok_or_else(|| anyhow!("file for {role} contains no function"))
}

pub fn spaces(file: &FunctionFile, out: &mut impl Write) -> Result<i32> {
    let lines = per_function_lines(file, |index, f| {
        let found = ccz::dim_n_spaces(&ccz::walsh_zeroes(f));
        let spectrum = ccz::thickness_spectrum(&found, f.output_dim());
        Ok(json!({
            "index": index,
            "count": found.len(),
            "thickness": thickness_json(&spectrum),
        }))
    })?;
    emit(out, &lines)
}

pub fn ccz_expand(file: &FunctionFile, out: &mut impl Write) -> Result<i32> {
    let lines = per_function_lines(file, |index, f| {
        let (lower, upper, report) = ccz::ea_class_bounds(f)?;
        let classes: Vec<Value> = report
            .iter()
            .map(|group| {
                json!({
                    "thickness": group.thickness,
                    "degrees": group.degrees,
                    "count": group.count,
                })
            })
            .collect();
        Ok(json!({
            "index": index,
            "lower": lower,
            "upper": upper,
            "classes": classes,
        }))
    })?;
    emit(out, &lines)
}

pub fn gamma_delta(file: &FunctionFile, out: &mut impl Write) -> Result<i32> {
    let lines = per_function_lines(file, |index, f| {
        Ok(json!({
            "index": index,
            "gamma_rank": invariants::gamma_rank(f, false)?,
            "delta_rank": invariants::delta_rank(f, false)?,
        }))
    })?;
    emit(out, &lines)
}

pub fn sigma(file: &FunctionFile, k: usize, out: &mut impl Write) -> Result<i32> {
    let lines = per_function_lines(file, |index, f| {
        let multiplicities = invariants::sigma_multiplicities(f, k)?;
        Ok(json!({
            "index": index,
            "k": k,
            "multiplicities": spectrum_json(&multiplicities),
        }))
    })?;
    emit(out, &lines)
}

pub struct GenArgs {
    pub n: usize,
    pub m: usize,
    pub count: usize,
    pub seed: u64,
    pub apn_only: bool,
}

pub fn gen_quadratic(args: &GenArgs, out: &mut impl Write) -> Result<i32> {
    if args.n == 0 || args.n > 16 || args.m == 0 || args.m > 16 {
        bail!("dimensions out of the supported range 1..=16");
    }
    if args.apn_only && args.m < args.n {
        bail!("--apn-only needs m >= n");
    }
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(args.seed);
    let mut produced = 0;
    while produced < args.count {
        let f = random_quadratic(args.n, args.m, &mut rng);
        if args.apn_only && !f.is_apn().unwrap_or(false) {
            continue;
        }
        writeln!(out, "{}", t_record(&f))?;
        produced += 1;
    }
    Ok(EXIT_OK)
}

fn emit(out: &mut impl Write, lines: &[String]) -> Result<i32> {
    for line in lines {
        writeln!(out, "{line}")?;
    }
    Ok(EXIT_OK)
}
