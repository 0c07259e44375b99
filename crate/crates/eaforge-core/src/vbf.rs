//! Vectorial Boolean functions as truth tables, and their classical
//! statistics: ANF, degree, DDT, Walsh transform, APN and permutation
//! tests, EA composition and random generation.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::bits::{BitMatrix, BitVector};
use crate::Error;

/// A function `F: F_2^n -> F_2^m` stored as its truth table: entry `x` is
/// the m-bit output for the input whose integer encoding is `x`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Vbf {
    n: usize,
    m: usize,
    table: Vec<u32>,
}

impl Vbf {
    pub fn from_table(n: usize, m: usize, table: Vec<u32>) -> Result<Vbf, Error> {
        if n > 24 || m > 32 || table.len() != 1 << n {
            return Err(Error::DimensionMismatch);
        }
        if m < 32 && table.iter().any(|&y| y >> m != 0) {
            return Err(Error::DimensionMismatch);
        }
        Ok(Vbf { n, m, table })
    }

    /// The identity map on `F_2^n`.
    pub fn identity(n: usize) -> Vbf {
        Vbf {
            n,
            m: n,
            table: (0..1u32 << n).collect(),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.n
    }

    pub fn output_dim(&self) -> usize {
        self.m
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    #[inline]
    pub fn eval(&self, x: u32) -> u32 {
        self.table[x as usize]
    }

    /// Coordinate-wise binary Moebius transform of the truth table.
    pub fn anf(&self) -> Anf {
        let mut coefficients = self.table.clone();
        moebius_in_place(&mut coefficients, self.n);
        Anf {
            n: self.n,
            m: self.m,
            coefficients,
        }
    }

    /// Algebraic degree: the largest Hamming weight of a monomial with a
    /// nonzero ANF coefficient. Constants have degree 0.
    pub fn degree(&self) -> usize {
        self.anf().degree()
    }

    /// The difference distribution table, `ddt[a][b] = #{x : F(x+a)+F(x) = b}`.
    pub fn ddt(&self) -> Ddt {
        let mut counts = vec![0u32; 1 << (self.n + self.m)];
        for a in 0..1usize << self.n {
            let row = &mut counts[a << self.m..(a + 1) << self.m];
            for x in 0..1usize << self.n {
                row[(self.table[x] ^ self.table[x ^ a]) as usize] += 1;
            }
        }
        Ddt {
            n: self.n,
            m: self.m,
            counts,
        }
    }

    /// Multiset of DDT entries over `a != 0` and all `b`.
    pub fn differential_spectrum(&self) -> Spectrum {
        self.ddt().differential_spectrum()
    }

    /// Largest DDT entry over `a != 0`.
    pub fn differential_uniformity(&self) -> u32 {
        self.ddt().uniformity()
    }

    /// Walsh transform values `W(a, b)` for all pairs.
    pub fn walsh_table(&self) -> WalshTable {
        let size_n = 1usize << self.n;
        let mut values = vec![0i64; size_n << self.m];
        let mut buf = vec![0i64; size_n];
        for b in 0..1u32 << self.m {
            for x in 0..size_n {
                let bit = (self.table[x] & b).count_ones() & 1;
                buf[x] = 1 - 2 * i64::from(bit);
            }
            fwht_in_place(&mut buf);
            values[(b as usize) << self.n..((b as usize) + 1) << self.n].copy_from_slice(&buf);
        }
        WalshTable {
            n: self.n,
            m: self.m,
            values,
        }
    }

    /// Multiset of `|W(a, b)|` over all `a` and all `b != 0`.
    pub fn extended_walsh_spectrum(&self) -> Spectrum {
        self.walsh_table().extended_spectrum()
    }

    /// Largest `|W(a, b)|` over `b != 0`.
    pub fn linearity(&self) -> u64 {
        self.extended_walsh_spectrum().max_value()
    }

    /// APN test: differential uniformity equals 2. Requires `m >= n`.
    pub fn is_apn(&self) -> Result<bool, Error> {
        if self.m < self.n {
            return Err(Error::DimensionMismatch);
        }
        Ok(self.differential_uniformity() == 2)
    }

    /// True iff `n = m` and the table is a bijection.
    pub fn is_permutation(&self) -> bool {
        if self.n != self.m {
            return false;
        }
        let mut seen = vec![false; 1 << self.n];
        for &y in &self.table {
            if seen[y as usize] {
                return false;
            }
            seen[y as usize] = true;
        }
        true
    }

    /// The EA image `x -> A0 F(B0 x) + C0 x + a`.
    pub fn compose_ea(&self, t: &EaTuple) -> Result<Vbf, Error> {
        if t.b0.rows() != self.n || t.a0.rows() != self.m {
            return Err(Error::DimensionMismatch);
        }
        let table = (0..1u32 << self.n)
            .map(|x| {
                let inner = self.table[t.b0.mul_element(u64::from(x)) as usize];
                (t.a0.mul_element(u64::from(inner))
                    ^ t.c0.mul_element(u64::from(x))
                    ^ t.a.to_element()) as u32
            })
            .collect();
        Ok(Vbf {
            n: self.n,
            m: self.m,
            table,
        })
    }
}

impl core::fmt::Debug for Vbf {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "Vbf({}->{}) [", self.n, self.m)?;
        for (i, y) in self.table.iter().take(16).enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{y:x}")?;
        }
        if self.table.len() > 16 {
            write!(f, " ...")?;
        }
        write!(f, "]")
    }
}

/// Algebraic normal form: entry `u` holds, per coordinate, the coefficient
/// of the monomial `prod_(i: u_i = 1) x_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Anf {
    n: usize,
    m: usize,
    coefficients: Vec<u32>,
}

impl Anf {
    pub fn from_coefficients(n: usize, m: usize, coefficients: Vec<u32>) -> Result<Anf, Error> {
        if coefficients.len() != 1 << n || (m < 32 && coefficients.iter().any(|&c| c >> m != 0)) {
            return Err(Error::DimensionMismatch);
        }
        Ok(Anf { n, m, coefficients })
    }

    pub fn coefficients(&self) -> &[u32] {
        &self.coefficients
    }

    pub fn coefficient(&self, monomial: u32) -> u32 {
        self.coefficients[monomial as usize]
    }

    pub fn degree(&self) -> usize {
        self.coefficients
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c != 0)
            .map(|(u, _)| u.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    /// Inverse Moebius transform, back to the truth table.
    pub fn to_vbf(&self) -> Vbf {
        let mut table = self.coefficients.clone();
        moebius_in_place(&mut table, self.n);
        Vbf {
            n: self.n,
            m: self.m,
            table,
        }
    }
}

/// The binary Moebius transform, its own inverse; operates on all m
/// coordinates at once via word-wide XOR.
fn moebius_in_place(data: &mut [u32], n: usize) {
    for i in 0..n {
        let half = 1usize << i;
        let mut x = 0;
        while x < data.len() {
            for j in x..x + half {
                data[j + half] ^= data[j];
            }
            x += half << 1;
        }
    }
}

/// Signed in-place fast Walsh-Hadamard butterfly.
fn fwht_in_place(data: &mut [i64]) {
    let mut h = 1;
    while h < data.len() {
        let mut x = 0;
        while x < data.len() {
            for j in x..x + h {
                let (a, b) = (data[j], data[j + h]);
                data[j] = a + b;
                data[j + h] = a - b;
            }
            x += h << 1;
        }
        h <<= 1;
    }
}

/// Difference distribution table.
pub struct Ddt {
    n: usize,
    m: usize,
    counts: Vec<u32>,
}

impl Ddt {
    #[inline]
    pub fn get(&self, a: u32, b: u32) -> u32 {
        self.counts[((a as usize) << self.m) | b as usize]
    }

    pub fn row(&self, a: u32) -> &[u32] {
        &self.counts[(a as usize) << self.m..((a as usize) + 1) << self.m]
    }

    /// Multiset of entries over `a != 0`, all `b`.
    pub fn differential_spectrum(&self) -> Spectrum {
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        for a in 1..1u32 << self.n {
            for &d in self.row(a) {
                *counts.entry(u64::from(d)).or_insert(0) += 1;
            }
        }
        Spectrum::from_counts(counts)
    }

    pub fn uniformity(&self) -> u32 {
        (1..1u32 << self.n)
            .flat_map(|a| self.row(a).iter().copied())
            .max()
            .unwrap_or(0)
    }
}

/// Walsh transform table, all `W(a, b)`.
pub struct WalshTable {
    n: usize,
    m: usize,
    values: Vec<i64>,
}

impl WalshTable {
    #[inline]
    pub fn get(&self, a: u32, b: u32) -> i64 {
        self.values[((b as usize) << self.n) | a as usize]
    }

    pub fn component(&self, b: u32) -> &[i64] {
        &self.values[(b as usize) << self.n..((b as usize) + 1) << self.n]
    }

    /// Multiset of `|W(a, b)|` over all `a`, `b != 0`.
    pub fn extended_spectrum(&self) -> Spectrum {
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        for b in 1..1u32 << self.m {
            for &w in self.component(b) {
                *counts.entry(w.unsigned_abs()).or_insert(0) += 1;
            }
        }
        Spectrum::from_counts(counts)
    }
}

/// A multiset of integers, stored as sorted `(value, multiplicity)` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Spectrum {
    entries: Vec<(u64, u64)>,
}

impl Spectrum {
    pub fn from_counts(counts: BTreeMap<u64, u64>) -> Spectrum {
        Spectrum {
            entries: counts.into_iter().filter(|&(_, m)| m > 0).collect(),
        }
    }

    pub fn from_values(values: impl IntoIterator<Item = u64>) -> Spectrum {
        let mut counts = BTreeMap::new();
        for v in values {
            *counts.entry(v).or_insert(0u64) += 1;
        }
        Spectrum::from_counts(counts)
    }

    /// `(value, multiplicity)` pairs, ascending in value.
    pub fn entries(&self) -> &[(u64, u64)] {
        &self.entries
    }

    pub fn multiplicity(&self, value: u64) -> u64 {
        self.entries
            .iter()
            .find(|&&(v, _)| v == value)
            .map_or(0, |&(_, m)| m)
    }

    pub fn max_value(&self) -> u64 {
        self.entries.last().map_or(0, |&(v, _)| v)
    }

    pub fn total_multiplicity(&self) -> u64 {
        self.entries.iter().map(|&(_, m)| m).sum()
    }

    /// Canonical text form `{v:m,v:m,...}` with strictly ascending values.
    pub fn canonical(&self) -> String {
        use core::fmt::Write;
        let mut s = String::from("{");
        for (i, (v, m)) in self.entries.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            write!(s, "{v}:{m}").unwrap();
        }
        s.push('}');
        s
    }

    /// Parses the output of [`Spectrum::canonical`].
    pub fn parse(text: &str) -> Option<Spectrum> {
        let inner = text.strip_prefix('{')?.strip_suffix('}')?;
        let mut entries = Vec::new();
        if !inner.is_empty() {
            for part in inner.split(',') {
                let (v, m) = part.split_once(':')?;
                entries.push((v.parse().ok()?, m.parse().ok()?));
            }
        }
        let sorted = entries.windows(2).all(|w| w[0].0 < w[1].0);
        (sorted && entries.iter().all(|&(_, m)| m > 0)).then_some(Spectrum { entries })
    }
}

/// The tuple `(A0, B0, C0, a)` of an extended-affine transformation
/// `G(x) = A0 F(B0 x) + C0 x + a` with `A0`, `B0` nonsingular.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EaTuple {
    a0: BitMatrix,
    b0: BitMatrix,
    c0: BitMatrix,
    a: BitVector,
}

impl EaTuple {
    pub fn new(a0: BitMatrix, b0: BitMatrix, c0: BitMatrix, a: BitVector) -> Result<EaTuple, Error> {
        let (m, n) = (a0.rows(), b0.rows());
        if c0.rows() != m || c0.cols() != n || a.len() != m {
            return Err(Error::DimensionMismatch);
        }
        if !a0.is_nonsingular() || !b0.is_nonsingular() {
            return Err(Error::DependentInput);
        }
        Ok(EaTuple { a0, b0, c0, a })
    }

    pub fn identity(n: usize, m: usize) -> EaTuple {
        EaTuple {
            a0: BitMatrix::identity(m),
            b0: BitMatrix::identity(n),
            c0: BitMatrix::zero(m, n),
            a: BitVector::zero(m),
        }
    }

    pub fn a0(&self) -> &BitMatrix {
        &self.a0
    }

    pub fn b0(&self) -> &BitMatrix {
        &self.b0
    }

    pub fn c0(&self) -> &BitMatrix {
        &self.c0
    }

    pub fn a(&self) -> &BitVector {
        &self.a
    }

    /// The tuple undoing this one: applying it to `compose_ea(F, self)`
    /// restores `F`. Only defined when `m = n`.
    pub fn inverse(&self) -> EaTuple {
        let a0_inv = self.a0.invert().expect("A0 is nonsingular");
        let b0_inv = self.b0.invert().expect("B0 is nonsingular");
        let c0 = a0_inv.mul(&self.c0).mul(&b0_inv);
        let a = a0_inv.mul_vec(&self.a);
        EaTuple {
            a0: a0_inv,
            b0: b0_inv,
            c0,
            a,
        }
    }
}

/// Uniform random function of degree at most 2: every ANF coefficient of
/// monomial weight at most 2 is drawn uniformly.
pub fn random_quadratic(n: usize, m: usize, rng: &mut impl RngCore) -> Vbf {
    let mask = if m == 32 { u32::MAX } else { (1u32 << m) - 1 };
    let coefficients = (0..1u32 << n)
        .map(|u| {
            if u.count_ones() <= 2 {
                rng.next_u32() & mask
            } else {
                0
            }
        })
        .collect();
    Anf {
        n,
        m,
        coefficients,
    }
    .to_vbf()
}

/// Uniform random nonsingular matrix by rejection sampling.
pub fn random_nonsingular(dim: usize, rng: &mut impl RngCore) -> BitMatrix {
    loop {
        let mut mat = BitMatrix::zero(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                mat.set(i, j, rng.next_u32() & 1 == 1);
            }
        }
        if mat.is_nonsingular() {
            return mat;
        }
    }
}

/// Random EA tuple: `A0`, `B0` uniform nonsingular, `C0` and `a` uniform.
pub fn random_ea_tuple(n: usize, m: usize, rng: &mut impl RngCore) -> EaTuple {
    let a0 = random_nonsingular(m, rng);
    let b0 = random_nonsingular(n, rng);
    let mut c0 = BitMatrix::zero(m, n);
    for i in 0..m {
        for j in 0..n {
            c0.set(i, j, rng.next_u32() & 1 == 1);
        }
    }
    let mut a = BitVector::zero(m);
    for i in 0..m {
        a.set(i, rng.next_u32() & 1 == 1);
    }
    EaTuple { a0, b0, c0, a }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_core::SeedableRng;

    type Rng = rand_chacha::ChaCha12Rng;

    fn gold_cube(n: usize) -> Vbf {
        use crate::field::{vbf_from_univariate, FieldSpec, UnivariateSpec};
        let modulus = match n {
            6 => 0x5b,
            7 => 0x83, // x^7 + x + 1
            8 => 0x11b,
            _ => panic!("unsupported"),
        };
        let field = FieldSpec::new(n, modulus).unwrap();
        vbf_from_univariate(&UnivariateSpec::new(field, vec![(1, 3)]).unwrap())
    }

    #[test]
    fn anf_of_constant_and_identity() {
        let zero = Vbf::from_table(3, 2, vec![0; 8]).unwrap();
        assert!(zero.anf().coefficients().iter().all(|&c| c == 0));
        assert_eq!(zero.degree(), 0);

        let id = Vbf::identity(4);
        let anf = id.anf();
        for u in 0..16u32 {
            let expected = if u.count_ones() == 1 { u } else { 0 };
            assert_eq!(anf.coefficient(u), expected);
        }
        assert_eq!(id.degree(), 1);
    }

    #[test]
    fn anf_round_trip() {
        let mut rng = Rng::seed_from_u64(11);
        for _ in 0..20 {
            let table: Vec<u32> = (0..1 << 6).map(|_| rng.next_u32() & 0xff).collect();
            let f = Vbf::from_table(6, 8, table).unwrap();
            assert_eq!(f.anf().to_vbf(), f);
        }
    }

    #[test]
    fn cube_is_quadratic() {
        assert_eq!(gold_cube(6).degree(), 2);
    }

    #[test]
    fn ddt_of_linear_map() {
        // For linear L the only nonzero DDT entries are ddt[a][La] = 2^n.
        let mut rng = Rng::seed_from_u64(12);
        let l = random_nonsingular(4, &mut rng);
        let table: Vec<u32> = (0..16u32).map(|x| l.mul_element(u64::from(x)) as u32).collect();
        let f = Vbf::from_table(4, 4, table).unwrap();
        let ddt = f.ddt();
        for a in 0..16u32 {
            let la = l.mul_element(u64::from(a)) as u32;
            for b in 0..16u32 {
                assert_eq!(ddt.get(a, b), if b == la { 16 } else { 0 });
            }
        }
    }

    #[test]
    fn ddt_rows_sum_and_are_even() {
        let mut rng = Rng::seed_from_u64(13);
        let f = random_quadratic(5, 5, &mut rng);
        let ddt = f.ddt();
        for a in 1..32u32 {
            let row = ddt.row(a);
            assert_eq!(row.iter().sum::<u32>(), 32);
            assert!(row.iter().all(|&d| d % 2 == 0));
        }
    }

    #[test]
    fn cube_over_gf64_statistics() {
        let f = gold_cube(6);
        assert!(f.is_apn().unwrap());
        assert_eq!(f.differential_uniformity(), 2);
        assert_eq!(f.linearity(), 16);
        let spectrum = f.differential_spectrum();
        assert!(spectrum.entries().iter().all(|&(v, _)| v == 0 || v == 2));
    }

    #[test]
    fn gold_cube_dimension7_is_apn_permutation() {
        let f = gold_cube(7);
        assert!(f.is_apn().unwrap());
        assert!(f.is_permutation());
    }

    #[test]
    fn identity_is_not_apn() {
        let id = Vbf::identity(4);
        assert!(!id.is_apn().unwrap());
        assert_eq!(id.differential_uniformity(), 16);
    }

    #[test]
    fn apn_requires_m_at_least_n() {
        let f = Vbf::from_table(3, 2, vec![0; 8]).unwrap();
        assert_eq!(f.is_apn(), Err(Error::DimensionMismatch));
    }

    #[test]
    fn walsh_normalisation_and_parseval() {
        let mut rng = Rng::seed_from_u64(14);
        let f = random_quadratic(6, 6, &mut rng);
        let w = f.walsh_table();
        assert_eq!(w.get(0, 0), 64);
        for b in 0..64u32 {
            let energy: i64 = w.component(b).iter().map(|&v| v * v).sum();
            assert_eq!(energy, 1 << 12);
        }
    }

    #[test]
    fn extended_spectrum_of_constant() {
        let f = Vbf::from_table(4, 3, vec![5; 16]).unwrap();
        let spec = f.extended_walsh_spectrum();
        // W(a, b) = +-16 exactly at a = 0; zero elsewhere.
        assert_eq!(spec.multiplicity(16), 7);
        assert_eq!(spec.multiplicity(0), 15 * 7);
        assert_eq!(spec.total_multiplicity(), 16 * 7);
    }

    #[test]
    fn extended_spectrum_total_multiplicity() {
        let mut rng = Rng::seed_from_u64(15);
        let f = random_quadratic(6, 6, &mut rng);
        assert_eq!(f.extended_walsh_spectrum().total_multiplicity(), 64 * 63);
    }

    #[test]
    fn cube_over_gf256_extended_spectrum() {
        let spec = gold_cube(8).extended_walsh_spectrum();
        assert_eq!(spec.canonical(), "{0:16320,16:43520,32:5440}");
        assert_eq!(spec.total_multiplicity(), 65280); // 2^8 * (2^8 - 1)
    }

    #[test]
    fn compose_with_identity_tuple() {
        let mut rng = Rng::seed_from_u64(16);
        let f = random_quadratic(5, 5, &mut rng);
        let t = EaTuple::identity(5, 5);
        assert_eq!(f.compose_ea(&t).unwrap(), f);
    }

    #[test]
    fn compose_then_inverse_restores() {
        let mut rng = Rng::seed_from_u64(17);
        for _ in 0..10 {
            let f = random_quadratic(6, 6, &mut rng);
            let t = random_ea_tuple(6, 6, &mut rng);
            let g = f.compose_ea(&t).unwrap();
            assert_eq!(g.compose_ea(&t.inverse()).unwrap(), f);
        }
    }

    #[test]
    fn ea_composition_preserves_spectra() {
        let mut rng = Rng::seed_from_u64(18);
        for _ in 0..5 {
            let f = random_quadratic(6, 6, &mut rng);
            let t = random_ea_tuple(6, 6, &mut rng);
            let g = f.compose_ea(&t).unwrap();
            assert_eq!(f.differential_spectrum(), g.differential_spectrum());
            assert_eq!(f.extended_walsh_spectrum(), g.extended_walsh_spectrum());
        }
    }

    #[test]
    fn random_quadratic_degree_and_determinism() {
        let f1 = random_quadratic(6, 6, &mut Rng::seed_from_u64(19));
        let f2 = random_quadratic(6, 6, &mut Rng::seed_from_u64(19));
        assert_eq!(f1, f2);
        assert!(f1.degree() <= 2);
        let g = random_quadratic(6, 6, &mut Rng::seed_from_u64(20));
        assert_ne!(f1, g);
    }

    #[test]
    fn nonsingular_sampling_acceptance_rate() {
        // The fraction of nonsingular matrices in GL(6, 2) terms is
        // prod_(i=1..6) (1 - 2^-i) ~ 0.2897; loosely check the rejection
        // sampler is in that regime by counting attempts.
        let mut rng = Rng::seed_from_u64(21);
        let mut singular = 0usize;
        let trials = 600;
        for _ in 0..trials {
            let mut mat = BitMatrix::zero(6, 6);
            for i in 0..6 {
                for j in 0..6 {
                    mat.set(i, j, rng.next_u32() & 1 == 1);
                }
            }
            if !mat.is_nonsingular() {
                singular += 1;
            }
        }
        let rate = 1.0 - singular as f64 / trials as f64;
        assert!((rate - 0.2897).abs() < 0.08, "acceptance rate {rate}");
    }

    #[test]
    fn spectrum_canonical_round_trip() {
        let s = Spectrum::from_values([0, 0, 2, 8, 8, 8]);
        assert_eq!(s.canonical(), "{0:2,2:1,8:3}");
        assert_eq!(Spectrum::parse(&s.canonical()).unwrap(), s);
        assert!(Spectrum::parse("{1:2,0:1}").is_none());
    }
}
