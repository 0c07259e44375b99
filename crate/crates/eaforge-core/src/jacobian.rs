//! The linear part of the Jacobian of a quadratic function, its rank
//! table, and the correspondence between rank distribution and DDT.
//!
//! For quadratic `F` the matrix `J_F(x)` with entries
//! `J_(i,j)(x) = D_(e_j)F_i(x) + D_(e_j)F_i(0)` is linear in `x` and
//! carries all second-order difference data: `J_F(x) a = D_a F(x) + D_a F(0)`
//! for every `a`, `x`. Column `j` of `J_F(x)` is
//! `F(x+e_j) + F(x) + F(e_j) + F(0)`, so everything here works straight
//! off the truth table.

use alloc::vec;
use alloc::vec::Vec;

use crate::bits::BitMatrix;
use crate::vbf::Vbf;
use crate::Error;

/// The linear part `J_F` of the Jacobian of a quadratic function: an
/// `m x n` grid of linear forms in `n` variables, each stored as the
/// bit mask of its coefficient vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearJacobian {
    n: usize,
    m: usize,
    /// `forms[i * n + j]` is the coefficient mask of `J_(i,j)`.
    forms: Vec<u32>,
    /// `columns[j * 2^n + x]` caches column `j` of `J_F(x)` as an m-bit
    /// word: `F(x+e_j) + F(x) + F(e_j) + F(0)`.
    columns: Vec<u32>,
}

/// Builds the linear Jacobian of a quadratic function.
///
/// Fails with [`Error::DegreeTooHigh`] if `deg F > 2`.
pub fn linear_jacobian(f: &Vbf) -> Result<LinearJacobian, Error> {
    let degree = f.degree();
    if degree > 2 {
        return Err(Error::DegreeTooHigh { degree });
    }
    let (n, m) = (f.input_dim(), f.output_dim());
    let f0 = f.eval(0);
    let mut forms = vec![0u32; m * n];
    for j in 0..n {
        let fej = f.eval(1 << j);
        for k in 0..n {
            // Column j of J evaluated at e_k.
            let v = f.eval((1 << k) ^ (1 << j)) ^ f.eval(1 << k) ^ fej ^ f0;
            for i in 0..m {
                if v >> i & 1 == 1 {
                    forms[i * n + j] |= 1 << k;
                }
            }
        }
    }
    let mut columns = vec![0u32; n << n];
    for j in 0..n {
        let fej = f.eval(1 << j);
        let base = j << n;
        for x in 0..1u32 << n {
            columns[base + x as usize] = f.eval(x ^ (1 << j)) ^ f.eval(x) ^ fej ^ f0;
        }
    }
    Ok(LinearJacobian {
        n,
        m,
        forms,
        columns,
    })
}

impl LinearJacobian {
    pub fn input_dim(&self) -> usize {
        self.n
    }

    pub fn output_dim(&self) -> usize {
        self.m
    }

    /// Coefficient mask of the linear form at `(i, j)`.
    pub fn form(&self, i: usize, j: usize) -> u32 {
        self.forms[i * self.n + j]
    }

    /// Column `j` of `J_F(x)`, packed as an m-bit word.
    #[inline]
    pub fn column_at(&self, j: usize, x: u32) -> u32 {
        self.columns[(j << self.n) + x as usize]
    }

    /// The evaluated matrix `J_F(x)`.
    pub fn eval(&self, x: u32) -> BitMatrix {
        let mut mat = BitMatrix::zero(self.m, self.n);
        for j in 0..self.n {
            let col = self.column_at(j, x);
            for i in 0..self.m {
                if col >> i & 1 == 1 {
                    mat.set(i, j, true);
                }
            }
        }
        mat
    }

    /// Rank of `J_F(x)` without materialising the matrix, using the fact
    /// that row and column ranks agree.
    pub fn rank_at(&self, x: u32) -> usize {
        let mut echelon = [0u32; 32];
        let mut rank = 0;
        for j in 0..self.n {
            let mut v = self.column_at(j, x);
            while v != 0 {
                let lead = 31 - v.leading_zeros() as usize;
                if echelon[lead] == 0 {
                    echelon[lead] = v;
                    rank += 1;
                    break;
                }
                v ^= echelon[lead];
            }
        }
        rank
    }

    /// Applies `J_F(x)` to the element `a`, i.e. computes
    /// `D_a F(x) + D_a F(0)` as an m-bit word.
    pub fn apply(&self, x: u32, a: u32) -> u32 {
        let mut acc = 0;
        for j in 0..self.n {
            if a >> j & 1 == 1 {
                acc ^= self.column_at(j, x);
            }
        }
        acc
    }
}

/// Buckets of inputs by the rank of the evaluated Jacobian.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankTable {
    /// `buckets[r]` lists, ascending, the `x` with `rank J_F(x) = r`.
    buckets: Vec<Vec<u32>>,
}

/// Computes the rank table of a linear Jacobian.
pub fn rank_table(j: &LinearJacobian) -> RankTable {
    let max_rank = j.input_dim().min(j.output_dim());
    let mut buckets = vec![Vec::new(); max_rank + 1];
    for x in 0..1u32 << j.input_dim() {
        buckets[j.rank_at(x)].push(x);
    }
    RankTable { buckets }
}

impl RankTable {
    pub fn max_rank(&self) -> usize {
        self.buckets.len() - 1
    }

    /// Inputs of rank `r`, ascending.
    pub fn bucket(&self, r: usize) -> &[u32] {
        &self.buckets[r]
    }

    pub fn distribution(&self) -> RankDistribution {
        RankDistribution {
            counts: self.buckets.iter().map(|b| b.len() as u64).collect(),
        }
    }
}

/// Sizes of the rank-table buckets; `counts[r]` inputs have rank `r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankDistribution {
    counts: Vec<u64>,
}

impl RankDistribution {
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// The distribution of a quadratic APN function with `n = m`:
    /// one input of rank 0 and all others of rank `n - 1`.
    pub fn is_apn_shape(&self, n: usize) -> bool {
        self.counts.len() == n + 1
            && self.counts[0] == 1
            && self.counts[n - 1] == (1 << n) - 1
            && self
                .counts
                .iter()
                .enumerate()
                .all(|(r, &c)| r == 0 || r == n - 1 || c == 0)
    }
}

/// Verifies the one-to-one correspondence between the rank distribution
/// and the DDT entry multiplicities: for every rank `r`,
/// `counts[r] * 2^r` must equal the number of pairs `(a, b)` over the full
/// input space (including `a = 0`) with `ddt[a][b] = 2^(n-r)`.
pub fn ddt_rank_crosscheck(f: &Vbf) -> Result<bool, Error> {
    let j = linear_jacobian(f)?;
    let dist = rank_table(&j).distribution();
    let ddt = f.ddt();
    let n = f.input_dim();
    let mut by_value = alloc::collections::BTreeMap::new();
    for a in 0..1u32 << n {
        for &d in ddt.row(a) {
            *by_value.entry(u64::from(d)).or_insert(0u64) += 1;
        }
    }
    for (r, &count) in dist.counts().iter().enumerate() {
        let expected_pairs = by_value.get(&(1u64 << (n - r))).copied().unwrap_or(0);
        if count << r != expected_pairs {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vbf::{random_ea_tuple, random_quadratic, Anf};
    use rand_core::SeedableRng;

    type Rng = rand_chacha::ChaCha12Rng;

    fn and_gate() -> Vbf {
        // F(x1, x2) = x1 x2
        Vbf::from_table(2, 1, vec![0, 0, 0, 1]).unwrap()
    }

    #[test]
    fn affine_function_has_zero_jacobian() {
        let f = Vbf::identity(4);
        let j = linear_jacobian(&f).unwrap();
        for x in 0..16 {
            assert_eq!(j.eval(x), BitMatrix::zero(4, 4));
            assert_eq!(j.rank_at(x), 0);
        }
    }

    #[test]
    fn jacobian_of_and_gate() {
        // J F(x) = (x2  x1)
        let j = linear_jacobian(&and_gate()).unwrap();
        assert_eq!(j.form(0, 0), 0b10);
        assert_eq!(j.form(0, 1), 0b01);
    }

    #[test]
    fn cubic_rejected() {
        let mut table = vec![0u32; 8];
        table[0b111] = 1; // x1 x2 x3 has degree 3
        let f = Anf::from_coefficients(3, 1, table).unwrap().to_vbf();
        assert!(matches!(
            linear_jacobian(&f),
            Err(Error::DegreeTooHigh { degree: 3 })
        ));
    }

    #[test]
    fn derivative_identity_and_symmetry() {
        // J(x) a = D_a F(x) + D_a F(0) and J(x) a = J(a) x for all a, x.
        let mut rng = Rng::seed_from_u64(31);
        let f = random_quadratic(6, 6, &mut rng);
        let j = linear_jacobian(&f).unwrap();
        for x in 0..64u32 {
            for a in 0..64u32 {
                let derivative = f.eval(x ^ a) ^ f.eval(x) ^ f.eval(a) ^ f.eval(0);
                assert_eq!(j.apply(x, a), derivative);
                assert_eq!(j.apply(x, a), j.apply(a, x));
            }
        }
    }

    #[test]
    fn kernel_contains_evaluation_point() {
        let mut rng = Rng::seed_from_u64(32);
        let f = random_quadratic(7, 5, &mut rng);
        let j = linear_jacobian(&f).unwrap();
        for a in 0..128u32 {
            assert_eq!(j.apply(a, a), 0);
        }
    }

    #[test]
    fn eval_matches_forms() {
        let mut rng = Rng::seed_from_u64(33);
        let f = random_quadratic(5, 4, &mut rng);
        let j = linear_jacobian(&f).unwrap();
        for x in 0..32u32 {
            let mat = j.eval(x);
            for i in 0..4 {
                for jj in 0..5 {
                    let expected = (j.form(i, jj) & x).count_ones() & 1 == 1;
                    assert_eq!(mat.get(i, jj), expected);
                }
            }
            assert_eq!(mat.rank(), j.rank_at(x));
        }
    }

    #[test]
    fn chain_rule_under_ea_moves() {
        // J_G(x) = A0 J_F(B0 x) B0 for G = A0 F(B0 x) + C0 x + a.
        let mut rng = Rng::seed_from_u64(34);
        for _ in 0..5 {
            let f = random_quadratic(5, 5, &mut rng);
            let t = random_ea_tuple(5, 5, &mut rng);
            let g = f.compose_ea(&t).unwrap();
            let jf = linear_jacobian(&f).unwrap();
            let jg = linear_jacobian(&g).unwrap();
            for x in 0..32u32 {
                let bx = t.b0().mul_element(u64::from(x)) as u32;
                let expected = t.a0().mul(&jf.eval(bx)).mul(t.b0());
                assert_eq!(jg.eval(x), expected);
            }
        }
    }

    #[test]
    fn rank_distribution_of_linear_function() {
        let f = Vbf::identity(5);
        let j = linear_jacobian(&f).unwrap();
        let dist = rank_table(&j).distribution();
        assert_eq!(dist.counts()[0], 32);
        assert!(dist.counts()[1..].iter().all(|&c| c == 0));
    }

    #[test]
    fn rank_zero_bucket_contains_origin() {
        let mut rng = Rng::seed_from_u64(35);
        let f = random_quadratic(6, 6, &mut rng);
        let table = rank_table(&linear_jacobian(&f).unwrap());
        assert!(table.bucket(0).contains(&0));
    }

    #[test]
    fn crosscheck_on_random_quadratics() {
        let mut rng = Rng::seed_from_u64(36);
        for _ in 0..10 {
            let f = random_quadratic(6, 6, &mut rng);
            assert!(ddt_rank_crosscheck(&f).unwrap());
        }
        for _ in 0..5 {
            let f = random_quadratic(5, 7, &mut rng);
            assert!(ddt_rank_crosscheck(&f).unwrap());
        }
    }

    #[test]
    fn top_rank_bucket_empty_when_m_at_least_n() {
        // DDT entries of a quadratic function are even, so rank n cannot
        // occur when m >= n.
        let mut rng = Rng::seed_from_u64(37);
        for _ in 0..10 {
            let f = random_quadratic(5, 6, &mut rng);
            let dist = rank_table(&linear_jacobian(&f).unwrap()).distribution();
            assert_eq!(*dist.counts().last().unwrap(), 0);
        }
    }
}
