//! Walsh zeroes, the search for dimension-n vector spaces inside them,
//! thickness spectra, and generation of EA-class representatives within
//! a CCZ-class.
//!
//! A pair `(a, b)` is encoded as the `(n+m)`-bit integer `a | b << n`.
//! The input space `V0 = {(x, 0)}` therefore occupies the low `n` bits
//! and the output space `W0 = {(0, y)}` the high `m` bits. A linear
//! permutation `L` of `F_2^(n+m)` with `L^T(V0)` inside the Walsh zeroes
//! of `F` maps the graph of `F` onto the graph of another function; every
//! EA-class inside the CCZ-class of `F` is reached this way.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::bits::{complete_to_basis, BitVector};
use crate::vbf::{Spectrum, Vbf};
use crate::Error;

/// The set `Z_F = {(a, b) : W_F(a, b) = 0} + {(0, 0)}` as a bitset over
/// `F_2^(n+m)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalshZeroes {
    n: usize,
    m: usize,
    bits: Vec<u64>,
}

/// Computes the Walsh zeroes of a function. `(0, 0)` is always included
/// even though `W_F(0, 0) = 2^n`.
pub fn walsh_zeroes(f: &Vbf) -> WalshZeroes {
    let (n, m) = (f.input_dim(), f.output_dim());
    let walsh = f.walsh_table();
    let size = 1usize << (n + m);
    let mut bits = vec![0u64; size.div_ceil(64)];
    for b in 0..1u32 << m {
        let component = walsh.component(b);
        for a in 0..1usize << n {
            if component[a] == 0 {
                let z = a | (b as usize) << n;
                bits[z / 64] |= 1 << (z % 64);
            }
        }
    }
    bits[0] |= 1;
    WalshZeroes { n, m, bits }
}

impl WalshZeroes {
    pub fn input_dim(&self) -> usize {
        self.n
    }

    pub fn output_dim(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn contains(&self, z: u32) -> bool {
        self.bits[z as usize / 64] >> (z % 64) & 1 == 1
    }

    /// Number of members, including the forced `(0, 0)`.
    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Members in ascending order.
    pub fn elements(&self) -> Vec<u32> {
        (0..1u32 << (self.n + self.m))
            .filter(|&z| self.contains(z))
            .collect()
    }
}

/// A linear subspace of `F_2^ambient` in canonical reduced echelon form:
/// basis vectors ascending, with strictly increasing leading (most
/// significant) bits, and each leading bit appearing in no other basis
/// vector. Two equal spaces have identical bases.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubspaceBasis {
    ambient: usize,
    basis: Vec<u32>,
}

impl SubspaceBasis {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &[u32] {
        &self.basis
    }

    /// All `2^dim` elements, deterministically ordered.
    pub fn elements(&self) -> Vec<u32> {
        let mut out = vec![0u32];
        for &b in &self.basis {
            for i in 0..out.len() {
                out.push(out[i] ^ b);
            }
        }
        out
    }

    /// Dimension of the projection onto the high `m` coordinates, `n`
    /// being the size of the low part.
    pub fn thickness(&self, n: usize) -> usize {
        let mut echelon = [0u32; 32];
        let mut dim = 0;
        for &b in &self.basis {
            let mut v = b >> n;
            while v != 0 {
                let lead = (31 - v.leading_zeros()) as usize;
                if echelon[lead] == 0 {
                    echelon[lead] = v;
                    dim += 1;
                    break;
                }
                v ^= echelon[lead];
            }
        }
        dim
    }
}

/// Finds every n-dimensional linear subspace contained in the Walsh
/// zeroes, as canonical bases in ascending lexicographic order.
///
/// Depth-first search over echelon structures: a partial basis with
/// leading bits `p_1 < ... < p_k` is extended only by members whose
/// leading bit exceeds `p_k`, which are zero at all previous leading
/// bits, and whose coset `v + span` stays inside the membership bitset.
/// Each subspace is met exactly once, already in canonical form.
pub fn dim_n_spaces(zeroes: &WalshZeroes) -> Vec<SubspaceBasis> {
    let target = zeroes.n;
    let ambient = zeroes.n + zeroes.m;
    let members = zeroes.elements();
    let mut found = Vec::new();
    let mut basis: Vec<u32> = Vec::new();
    let mut span: Vec<u32> = vec![0];
    search(zeroes, &members, target, ambient, &mut basis, &mut span, &mut found);
    found
}

fn search(
    zeroes: &WalshZeroes,
    members: &[u32],
    target: usize,
    ambient: usize,
    basis: &mut Vec<u32>,
    span: &mut Vec<u32>,
    found: &mut Vec<SubspaceBasis>,
) {
    if basis.len() == target {
        found.push(SubspaceBasis {
            ambient,
            basis: basis.clone(),
        });
        return;
    }
    let min_value = match basis.last() {
        Some(&b) => match 1u32.checked_shl(32 - b.leading_zeros()) {
            Some(v) => v,
            None => return,
        },
        None => 1,
    };
    // Remaining levels need strictly increasing leading bits, so the
    // current leading bit cannot exceed ambient - (levels still to fill).
    let max_lead = (ambient - (target - basis.len())) as u32;
    let lead_mask: u32 = basis
        .iter()
        .fold(0, |acc, &b| acc | 1 << (31 - b.leading_zeros()));
    let start = members.partition_point(|&z| z < min_value);
    for &v in &members[start..] {
        let lead = 31 - v.leading_zeros();
        if lead > max_lead {
            break;
        }
        if v & lead_mask != 0 {
            continue;
        }
        // Closure check: the whole new coset must lie inside Z.
        if span.iter().any(|&s| !zeroes.contains(s ^ v)) {
            continue;
        }
        let old_len = span.len();
        for i in 0..old_len {
            let s = span[i] ^ v;
            span.push(s);
        }
        basis.push(v);
        search(zeroes, members, target, ambient, basis, span, found);
        basis.pop();
        span.truncate(old_len);
    }
}

/// The thickness spectrum of a list of spaces: entry `j` counts the
/// spaces whose projection onto the output half has dimension `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThicknessSpectrum {
    counts: Vec<u64>,
}

pub fn thickness_spectrum(spaces: &[SubspaceBasis], m: usize) -> ThicknessSpectrum {
    let mut counts = vec![0u64; m + 1];
    for space in spaces {
        let n = space.ambient() - m;
        counts[space.thickness(n)] += 1;
    }
    ThicknessSpectrum { counts }
}

impl ThicknessSpectrum {
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Canonical text form `{j:count,...}` over nonzero entries.
    pub fn canonical(&self) -> String {
        Spectrum::from_counts(
            self.counts
                .iter()
                .enumerate()
                .filter(|&(_, &c)| c > 0)
                .map(|(j, &c)| (j as u64, c))
                .collect::<BTreeMap<_, _>>(),
        )
        .canonical()
    }
}

/// Builds the EA-class representative attached to one dimension-n space
/// of the Walsh zeroes of `F`: a nonsingular `L` with `L^T` mapping `V0`
/// onto the space is completed greedily, and `G` is read off
/// `(y, z) = L(x, F(x))`, i.e. the graph of `G` is `L` applied to the
/// graph of `F`.
///
/// Fails with [`Error::NotAGraph`] if the image is not a function graph,
/// which signals a space not actually contained in the Walsh zeroes.
pub fn ea_representative(f: &Vbf, space: &SubspaceBasis) -> Result<Vbf, Error> {
    let (n, m) = (f.input_dim(), f.output_dim());
    if space.ambient() != n + m || space.dim() != n {
        return Err(Error::DimensionMismatch);
    }
    let ambient = n + m;
    let columns: Vec<BitVector> = space
        .basis()
        .iter()
        .map(|&b| BitVector::from_element(u64::from(b), ambient))
        .collect();
    let l_transposed = complete_to_basis(&columns, ambient)?;
    let l = l_transposed.transpose();
    let mut table = vec![u32::MAX; 1 << n];
    for x in 0..1u32 << n {
        let point = u64::from(x) | u64::from(f.eval(x)) << n;
        let image = l.mul_element(point);
        let y = (image & ((1 << n) - 1)) as usize;
        let z = (image >> n) as u32;
        if table[y] != u32::MAX {
            return Err(Error::NotAGraph);
        }
        table[y] = z;
    }
    Vbf::from_table(n, m, table)
}

/// Report entry of [`ea_class_bounds`]: one distinct thickness spectrum,
/// the degrees observed among its representatives and how many spaces
/// produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassGroup {
    pub thickness: String,
    pub degrees: Vec<usize>,
    pub count: u64,
}

/// Bounds on the number of EA-classes within the CCZ-class of `F`.
///
/// The upper bound is the number of dimension-n spaces in the Walsh
/// zeroes. The lower bound counts the distinct thickness spectra among
/// the representatives generated from those spaces, each spectrum being
/// derived by a fresh space search on the representative itself.
pub fn ea_class_bounds(f: &Vbf) -> Result<(u64, u64, Vec<ClassGroup>), Error> {
    if f.input_dim() != f.output_dim() {
        return Err(Error::DimensionMismatch);
    }
    let spaces = dim_n_spaces(&walsh_zeroes(f));
    let upper = spaces.len() as u64;
    let mut groups: BTreeMap<String, (Vec<usize>, u64)> = BTreeMap::new();
    for space in &spaces {
        let g = ea_representative(f, space)?;
        let g_spaces = dim_n_spaces(&walsh_zeroes(&g));
        let spectrum = thickness_spectrum(&g_spaces, g.output_dim()).canonical();
        let entry = groups.entry(spectrum).or_default();
        let degree = g.degree();
        if !entry.0.contains(&degree) {
            entry.0.push(degree);
            entry.0.sort_unstable();
        }
        entry.1 += 1;
    }
    let lower = groups.len() as u64;
    let report = groups
        .into_iter()
        .map(|(thickness, (degrees, count))| ClassGroup {
            thickness,
            degrees,
            count,
        })
        .collect();
    Ok((lower, upper, report))
}
