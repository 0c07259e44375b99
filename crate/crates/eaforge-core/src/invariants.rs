//! EA- and CCZ-class invariants and the partition pipeline.
//!
//! The workhorse is the ortho-derivative of a quadratic APN function: for
//! each nonzero `a` the evaluated Jacobian `J_F(a)` has rank `n - 1`, so
//! its left kernel is spanned by a single nonzero vector `pi(a)`. The
//! differential and extended Walsh spectra of `pi` are cheap to compute
//! and separate EA-classes in practice far better than any other known
//! invariant. Functions in distinct buckets are certifiably inequivalent;
//! equal labels leave the question open.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::bits::BitMatrix;
use crate::jacobian::{linear_jacobian, LinearJacobian};
use crate::vbf::{Spectrum, Vbf};
use crate::Error;

/// Largest `n` for which the Gamma/Delta incidence matrices are built
/// without being forced (the matrices have `4^n` bits).
pub const RANK_SIZE_CAP: usize = 7;

/// The ortho-derivative of a quadratic APN function with `n = m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthoDerivative {
    map: Vbf,
}

impl OrthoDerivative {
    pub fn map(&self) -> &Vbf {
        &self.map
    }

    pub fn into_map(self) -> Vbf {
        self.map
    }
}

/// Computes the ortho-derivative.
///
/// `pi(0) = 0`, and for nonzero `a`, `pi(a)` is the unique nonzero vector
/// in the left kernel of `J_F(a)`. If some kernel is not one-dimensional
/// the function is not APN and [`Error::NotApn`] is returned.
pub fn ortho_derivative(f: &Vbf) -> Result<OrthoDerivative, Error> {
    if f.input_dim() != f.output_dim() {
        return Err(Error::DimensionMismatch);
    }
    if f.degree() != 2 {
        return Err(Error::NotQuadratic);
    }
    let j = linear_jacobian(f)?;
    let n = j.input_dim();
    let mut table = vec![0u32; 1 << n];
    for a in 1..1u32 << n {
        table[a as usize] = left_kernel_generator(&j, a).ok_or(Error::NotApn)?;
    }
    let map = Vbf::from_table(n, n, table).expect("kernel vectors are n-bit");
    Ok(OrthoDerivative { map })
}

/// The single nonzero left-kernel vector of `J_F(a)`, or `None` if the
/// kernel dimension is not exactly 1.
///
/// `u` lies in the left kernel iff it is orthogonal to every column of
/// `J_F(a)`, so this reduces the column words and reads the kernel off
/// the free coordinate of the reduced echelon form.
fn left_kernel_generator(j: &LinearJacobian, a: u32) -> Option<u32> {
    let (n, m) = (j.input_dim(), j.output_dim());
    let mut pivots: Vec<(u32, u32)> = Vec::with_capacity(m); // (pivot bit, row)
    for jj in 0..n {
        let mut v = j.column_at(jj, a);
        for &(c, r) in &pivots {
            if v >> c & 1 == 1 {
                v ^= r;
            }
        }
        if v != 0 {
            let c = v.trailing_zeros();
            for (_, r) in pivots.iter_mut() {
                if *r >> c & 1 == 1 {
                    *r ^= v;
                }
            }
            pivots.push((c, v));
        }
    }
    if pivots.len() != m - 1 {
        return None;
    }
    let pivot_mask = pivots.iter().fold(0u32, |acc, &(c, _)| acc | 1 << c);
    let free = (0..m as u32).find(|&i| pivot_mask >> i & 1 == 0)?;
    let mut u = 1u32 << free;
    for &(c, r) in &pivots {
        if r >> free & 1 == 1 {
            u |= 1 << c;
        }
    }
    debug_assert!((0..n).all(|jj| (j.column_at(jj, a) & u).count_ones() & 1 == 0));
    Some(u)
}

/// The canonical partition key of a quadratic APN function: the
/// differential spectrum and extended Walsh spectrum of its
/// ortho-derivative.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InvariantLabel {
    ortho_diff: Spectrum,
    ortho_walsh: Spectrum,
}

impl InvariantLabel {
    pub fn ortho_diff(&self) -> &Spectrum {
        &self.ortho_diff
    }

    pub fn ortho_walsh(&self) -> &Spectrum {
        &self.ortho_walsh
    }

    /// Canonical serialized form `D{v:m,...}|W{v:m,...}`, ascending values.
    pub fn serialized(&self) -> String {
        let mut s = String::from("D");
        s.push_str(&self.ortho_diff.canonical());
        s.push_str("|W");
        s.push_str(&self.ortho_walsh.canonical());
        s
    }

    /// Parses the output of [`InvariantLabel::serialized`].
    pub fn parse(text: &str) -> Option<InvariantLabel> {
        let rest = text.strip_prefix('D')?;
        let (diff, walsh) = rest.split_once("|W")?;
        Some(InvariantLabel {
            ortho_diff: Spectrum::parse(diff)?,
            ortho_walsh: Spectrum::parse(walsh)?,
        })
    }
}

/// Computes the ortho-derivative label of a quadratic APN function.
pub fn ortho_label(f: &Vbf) -> Result<InvariantLabel, Error> {
    let pi = ortho_derivative(f)?;
    Ok(InvariantLabel {
        ortho_diff: pi.map().differential_spectrum(),
        ortho_walsh: pi.map().extended_walsh_spectrum(),
    })
}

/// Invariants selectable for partitioning.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Invariant {
    /// Differential spectrum of the ortho-derivative.
    OrthoDiff,
    /// Extended Walsh spectrum of the ortho-derivative.
    OrthoWalsh,
    /// Algebraic degree.
    Degree,
    /// Differential spectrum of the function itself.
    DiffSpectrum,
    /// Extended Walsh spectrum of the function itself.
    WalshSpectrum,
    /// Gamma-rank (CCZ-invariant, requires `n = m` and small `n`).
    GammaRank,
    /// Delta-rank (CCZ-invariant, requires `n = m` and small `n`).
    DeltaRank,
    /// Sigma-4 multiplicities.
    Sigma4,
    /// Thickness spectrum of the Walsh zeroes.
    ThicknessSpectrum,
}

pub const ALL_INVARIANTS: [Invariant; 9] = [
    Invariant::OrthoDiff,
    Invariant::OrthoWalsh,
    Invariant::Degree,
    Invariant::DiffSpectrum,
    Invariant::WalshSpectrum,
    Invariant::GammaRank,
    Invariant::DeltaRank,
    Invariant::Sigma4,
    Invariant::ThicknessSpectrum,
];

impl Invariant {
    pub fn name(self) -> &'static str {
        match self {
            Invariant::OrthoDiff => "ortho_diff",
            Invariant::OrthoWalsh => "ortho_walsh",
            Invariant::Degree => "degree",
            Invariant::DiffSpectrum => "diff_spectrum",
            Invariant::WalshSpectrum => "walsh_spectrum",
            Invariant::GammaRank => "gamma_rank",
            Invariant::DeltaRank => "delta_rank",
            Invariant::Sigma4 => "sigma4",
            Invariant::ThicknessSpectrum => "thickness",
        }
    }

    pub fn from_name(name: &str) -> Option<Invariant> {
        ALL_INVARIANTS.into_iter().find(|inv| inv.name() == name)
    }

    /// Canonical text value of this invariant for one function.
    pub fn compute(self, f: &Vbf) -> Result<String, Error> {
        use core::fmt::Write;
        let mut out = String::new();
        match self {
            Invariant::OrthoDiff => {
                let pi = ortho_derivative(f)?;
                out.push_str(&pi.map().differential_spectrum().canonical());
            }
            Invariant::OrthoWalsh => {
                let pi = ortho_derivative(f)?;
                out.push_str(&pi.map().extended_walsh_spectrum().canonical());
            }
            Invariant::Degree => write!(out, "{}", f.degree()).unwrap(),
            Invariant::DiffSpectrum => out.push_str(&f.differential_spectrum().canonical()),
            Invariant::WalshSpectrum => out.push_str(&f.extended_walsh_spectrum().canonical()),
            Invariant::GammaRank => write!(out, "{}", gamma_rank(f, false)?).unwrap(),
            Invariant::DeltaRank => write!(out, "{}", delta_rank(f, false)?).unwrap(),
            Invariant::Sigma4 => out.push_str(&sigma_multiplicities(f, 4)?.canonical()),
            Invariant::ThicknessSpectrum => {
                let zeroes = crate::ccz::walsh_zeroes(f);
                let spaces = crate::ccz::dim_n_spaces(&zeroes);
                let spectrum = crate::ccz::thickness_spectrum(&spaces, f.output_dim());
                out.push_str(&spectrum.canonical());
            }
        }
        Ok(out)
    }
}

/// A partition of a function list into buckets keyed by invariant labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    buckets: BTreeMap<String, Vec<usize>>,
}

impl Partition {
    /// Buckets keyed by the combined label, each listing function indices
    /// in input order.
    pub fn buckets(&self) -> &BTreeMap<String, Vec<usize>> {
        &self.buckets
    }

    pub fn len(&self) -> usize {
        self.buckets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buckets.is_empty()
    }

    pub fn is_all_singletons(&self) -> bool {
        self.buckets.values().all(|members| members.len() == 1)
    }
}

/// Buckets `fns` by the concatenation of the selected invariants'
/// canonical labels, in selector order.
///
/// Functions landing in distinct buckets are certifiably EA-inequivalent.
/// Any function a selected invariant does not apply to aborts with
/// [`Error::InapplicableInvariant`].
pub fn partition(fns: &[Vbf], selectors: &[Invariant]) -> Result<Partition, Error> {
    let mut buckets: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (index, f) in fns.iter().enumerate() {
        let label = partition_label(f, selectors).map_err(|(invariant, _)| {
            Error::InapplicableInvariant { index, invariant }
        })?;
        buckets.entry(label).or_default().push(index);
    }
    Ok(Partition { buckets })
}

/// The combined canonical label for one function; on failure names the
/// invariant that did not apply.
pub fn partition_label(
    f: &Vbf,
    selectors: &[Invariant],
) -> Result<String, (&'static str, Error)> {
    let mut parts = Vec::with_capacity(selectors.len());
    for inv in selectors {
        match inv.compute(f) {
            Ok(value) => {
                let mut piece = String::from(inv.name());
                piece.push('=');
                piece.push_str(&value);
                parts.push(piece);
            }
            Err(e) => return Err((inv.name(), e)),
        }
    }
    Ok(parts.join(";"))
}

/// Multiset of the multiplicities of k-subset output sums over zero-sum
/// input subsets: over all `{x_0, ..., x_(k-1)}` of distinct elements
/// with XOR 0, count how often each value `F(x_0) + ... + F(x_(k-1))`
/// occurs, and return the multiset of those counts.
///
/// `k` must be even and larger than 2. For `k = 4` a Walsh-power-sum
/// fast path handles any supported dimension; other `k` fall back to
/// subset enumeration, which is only practical for small `n`.
pub fn sigma_multiplicities(f: &Vbf, k: usize) -> Result<Spectrum, Error> {
    if k <= 2 || k % 2 != 0 {
        return Err(Error::KTooSmall);
    }
    if k == 4 {
        return Ok(sigma4_fast(f));
    }
    if f.input_dim() > 8 {
        return Err(Error::SizeCap {
            n: f.input_dim(),
            cap: 8,
        });
    }
    Ok(sigma_bruteforce(f, k))
}

/// Direct enumeration of zero-sum k-subsets, independent of the fast
/// path so the two can cross-check each other.
pub fn sigma_bruteforce(f: &Vbf, k: usize) -> Spectrum {
    let size = 1u32 << f.input_dim();
    let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
    let mut chosen = vec![0u32; k - 1];
    sigma_rec(f, size, 0, k, 0, 0, 0, &mut counts, &mut chosen);
    Spectrum::from_values(counts.into_values())
}

#[allow(clippy::too_many_arguments)]
fn sigma_rec(
    f: &Vbf,
    size: u32,
    depth: usize,
    k: usize,
    xor: u32,
    sum: u32,
    min: u32,
    counts: &mut BTreeMap<u32, u64>,
    chosen: &mut [u32],
) {
    if depth == k - 1 {
        // The last element is forced; it must exceed the previous one to
        // count each subset once with all elements distinct.
        if xor > chosen[k - 2] {
            *counts.entry(sum ^ f.eval(xor)).or_insert(0) += 1;
        }
        return;
    }
    for x in min..size {
        chosen[depth] = x;
        sigma_rec(f, size, depth + 1, k, xor ^ x, sum ^ f.eval(x), x + 1, counts, chosen);
    }
}

/// Walsh-power-sum evaluation of the Sigma-4 multiplicities.
///
/// The number of ordered 4-tuples with XOR 0 and output sum `v` is the
/// 4-fold convolution of the graph indicator, recovered from the fourth
/// powers of the Walsh coefficients. Tuples with repeated entries all
/// collapse onto `v = 0` (equal pairs cancel in both sums), contributing
/// `2^n (3 * 2^n - 2)` ordered tuples, and each genuine 4-subset is
/// counted `4! = 24` times.
fn sigma4_fast(f: &Vbf) -> Spectrum {
    let (n, m) = (f.input_dim(), f.output_dim());
    let walsh = f.walsh_table();
    let mut power_sums = vec![0i128; 1 << m];
    for b in 0..1u32 << m {
        power_sums[b as usize] = walsh
            .component(b)
            .iter()
            .map(|&w| {
                let w = w as i128;
                w * w * w * w
            })
            .sum();
    }
    // Inverse transform over b alone; the input-side frequency is pinned
    // to t = 0 by the zero-sum condition.
    let mut h = 1;
    while h < power_sums.len() {
        let mut x = 0;
        while x < power_sums.len() {
            for j in x..x + h {
                let (p, q) = (power_sums[j], power_sums[j + h]);
                power_sums[j] = p + q;
                power_sums[j + h] = p - q;
            }
            x += h << 1;
        }
        h <<= 1;
    }
    let norm = 1i128 << (n + m);
    let degenerate = (1i128 << n) * (3 * (1i128 << n) - 2);
    let counts = (0..1usize << m).map(|v| {
        debug_assert_eq!(power_sums[v] % norm, 0);
        let mut ordered = power_sums[v] / norm;
        if v == 0 {
            ordered -= degenerate;
        }
        debug_assert_eq!(ordered % 24, 0);
        (ordered / 24) as u64
    });
    Spectrum::from_values(counts.filter(|&c| c > 0))
}

/// F_2-rank of the incidence matrix `M[u][v] = 1 iff u + v in S` for
/// `S` the graph `{(x, F(x))}` of the function.
pub fn gamma_rank(f: &Vbf, force_large: bool) -> Result<usize, Error> {
    let n = check_rank_dims(f, force_large)?;
    let support: Vec<u32> = (0..1u32 << n).map(|x| x | f.eval(x) << n).collect();
    Ok(incidence_rank(&support, 2 * n))
}

/// F_2-rank of the incidence matrix for `S = {(a, b) : a != 0,
/// ddt[a][b] != 0}`, the support of the DDT minus the trivial row.
pub fn delta_rank(f: &Vbf, force_large: bool) -> Result<usize, Error> {
    let n = check_rank_dims(f, force_large)?;
    let ddt = f.ddt();
    let mut support = Vec::new();
    for a in 1..1u32 << n {
        for (b, &d) in ddt.row(a).iter().enumerate() {
            if d != 0 {
                support.push(a | (b as u32) << n);
            }
        }
    }
    Ok(incidence_rank(&support, 2 * n))
}

fn check_rank_dims(f: &Vbf, force_large: bool) -> Result<usize, Error> {
    if f.input_dim() != f.output_dim() {
        return Err(Error::DimensionMismatch);
    }
    let n = f.input_dim();
    if n > RANK_SIZE_CAP && !force_large {
        return Err(Error::SizeCap {
            n,
            cap: RANK_SIZE_CAP,
        });
    }
    Ok(n)
}

/// Rank over F_2 of the `2^dim x 2^dim` matrix whose row `u` has ones at
/// `{u + s : s in support}`.
fn incidence_rank(support: &[u32], dim: usize) -> usize {
    let size = 1usize << dim;
    let words = size.div_ceil(64);
    let mut pivot_rows: Vec<Vec<u64>> = Vec::new();
    let mut pivot_of_bit: Vec<u32> = vec![u32::MAX; size];
    for u in 0..size as u32 {
        let mut row = vec![0u64; words];
        for &s in support {
            let bit = (s ^ u) as usize;
            row[bit / 64] |= 1 << (bit % 64);
        }
        while let Some(lead) = lowest_set(&row) {
            let p = pivot_of_bit[lead];
            if p == u32::MAX {
                pivot_of_bit[lead] = pivot_rows.len() as u32;
                pivot_rows.push(row);
                break;
            }
            let pivot = &pivot_rows[p as usize];
            for (a, b) in row.iter_mut().zip(pivot) {
                *a ^= b;
            }
        }
    }
    pivot_rows.len()
}

fn lowest_set(words: &[u64]) -> Option<usize> {
    words
        .iter()
        .position(|&w| w != 0)
        .map(|i| i * 64 + words[i].trailing_zeros() as usize)
}

/// The ortho-derivative of an EA image, predicted from the original: for
/// `G = A0 F(B0 x) + C0 x + a` it holds that
/// `pi_G(x) = (A0^T)^(-1) pi_F(B0 x)`.
pub fn ortho_covariant(pi_f: &Vbf, a0: &BitMatrix, b0: &BitMatrix) -> Result<Vbf, Error> {
    let n = pi_f.input_dim();
    if a0.rows() != n || b0.rows() != n {
        return Err(Error::DimensionMismatch);
    }
    let a0t_inv = a0.transpose().invert().ok_or(Error::DependentInput)?;
    let table = (0..1u32 << n)
        .map(|x| {
            let inner = pi_f.eval(b0.mul_element(u64::from(x)) as u32);
            a0t_inv.mul_element(u64::from(inner)) as u32
        })
        .collect();
    Vbf::from_table(n, n, table)
}
