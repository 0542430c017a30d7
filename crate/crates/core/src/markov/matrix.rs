use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::parse::parse_rational;
use crate::Rational;

use super::scalar::Scalar;

/// Row-stochastic matrix, `p[x][y]` being the probability of moving from
/// `x` to `y`. Distributions are row vectors and evolve as `v M`.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> StochasticMatrix<T> {
    pub fn new(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::invalid("matrix has no rows"));
        }
        let mut data = Vec::with_capacity(n * n);
        for (x, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::invalid(format!("row {} has {} entries, expected {n}", x + 1, row.len())));
            }
            let mut sum = T::zero();
            for v in &row {
                if *v < T::zero() {
                    return Err(Error::invalid(format!("negative entry {v} in row {}", x + 1)));
                }
                sum = sum + v.clone();
            }
            if (sum.clone() - T::one()).abs() > T::row_tolerance() {
                return Err(Error::invalid(format!("row {} sums to {sum}", x + 1)));
            }
            data.extend(row);
        }
        Ok(StochasticMatrix { n, data })
    }

    pub(crate) fn from_flat(n: usize, data: Vec<T>) -> Self {
        debug_assert_eq!(data.len(), n * n);
        StochasticMatrix { n, data }
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![T::zero(); n * n];
        for x in 0..n {
            data[x * n + x] = T::one();
        }
        StochasticMatrix { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, x: usize, y: usize) -> &T {
        &self.data[x * self.n + y]
    }

    pub fn row(&self, x: usize) -> &[T] {
        &self.data[x * self.n..(x + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.n).map(<[T]>::to_vec).collect()
    }

    /// `v M`.
    pub fn left_apply(&self, v: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.n];
        for (x, vx) in v.iter().enumerate() {
            if vx.is_zero() {
                continue;
            }
            for (y, p) in self.row(x).iter().enumerate() {
                if !p.is_zero() {
                    out[y] = out[y].clone() + vx.clone() * p.clone();
                }
            }
        }
        out
    }

    /// `self · other`: one step of `self`, then one of `other`.
    pub fn then(&self, other: &StochasticMatrix<T>) -> StochasticMatrix<T> {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let data = (0..self.n).flat_map(|x| other.left_apply(self.row(x))).collect();
        StochasticMatrix { n: self.n, data }
    }

    pub fn min_entry(&self) -> T {
        self.data
            .iter()
            .cloned()
            .reduce(|a, b| if b < a { b } else { a })
            .expect("non-empty matrix")
    }

    pub fn column_sums(&self) -> Vec<T> {
        let mut sums = vec![T::zero(); self.n];
        for row in self.data.chunks(self.n) {
            for (s, v) in sums.iter_mut().zip(row) {
                *s = s.clone() + v.clone();
            }
        }
        sums
    }

    pub fn row_sums(&self) -> Vec<T> {
        self.data.chunks(self.n).map(|r| r.iter().cloned().fold(T::zero(), |a, b| a + b)).collect()
    }

    /// Largest deviation of any row or column sum from 1.
    pub fn margin_error(&self) -> f64 {
        self.row_sums()
            .into_iter()
            .chain(self.column_sums())
            .map(|s| (s - T::one()).abs().to_f64_lossy())
            .fold(0.0, f64::max)
    }

    pub fn is_doubly_stochastic(&self, tol: f64) -> bool {
        self.margin_error() <= tol
    }

    /// Positivity pattern, row-major.
    pub fn support(&self) -> Vec<bool> {
        self.data.iter().map(|v| *v > T::zero()).collect()
    }

    pub fn to_f64(&self) -> StochasticMatrix<f64> {
        StochasticMatrix { n: self.n, data: self.data.iter().map(Scalar::to_f64_lossy).collect() }
    }
}

pub fn l1_distance<T: Scalar>(a: &[T], b: &[T]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x.clone() - y.clone()).abs().to_f64_lossy()).sum()
}

fn csv_cells(text: &str) -> Vec<Vec<&str>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split(',').map(str::trim).collect())
        .collect()
}

/// CSV, one row per line; entries are decimals or fractions.
pub fn parse_matrix_csv(text: &str) -> Result<StochasticMatrix<f64>> {
    let rows = csv_cells(text)
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|c| c.parse::<f64>().or_else(|_| parse_exact_cell(c).map(|r| r.to_f64_lossy())))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    StochasticMatrix::new(rows)
}

pub fn parse_matrix_csv_exact(text: &str) -> Result<StochasticMatrix<Rational>> {
    let rows = csv_cells(text)
        .into_iter()
        .map(|row| row.into_iter().map(parse_exact_cell).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    StochasticMatrix::new(rows)
}

fn parse_exact_cell(c: &str) -> Result<Rational> {
    parse_rational(c).ok_or_else(|| Error::invalid(format!("not a number: {c:?}")))
}

pub fn format_matrix_csv<T: Scalar>(m: &StochasticMatrix<T>) -> String {
    let mut out = String::new();
    for x in 0..m.dim() {
        let row: Vec<String> = m.row(x).iter().map(ToString::to_string).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Assignment of states to disjoint, non-empty blocks numbered `0..k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPartition {
    block_of: Vec<usize>,
    blocks: usize,
}

impl BlockPartition {
    /// Block ids may be any integers; they are renumbered in ascending order.
    pub fn new(ids: &[usize]) -> Result<Self> {
        if ids.is_empty() {
            return Err(Error::invalid("partition covers no states"));
        }
        let renumber: BTreeMap<usize, usize> =
            ids.iter().copied().collect::<std::collections::BTreeSet<_>>().into_iter().zip(0..).collect();
        Ok(BlockPartition { block_of: ids.iter().map(|i| renumber[i]).collect(), blocks: renumber.len() })
    }

    pub fn singletons(n: usize) -> Self {
        BlockPartition { block_of: (0..n).collect(), blocks: n }
    }

    pub fn whole(n: usize) -> Self {
        BlockPartition { block_of: vec![0; n], blocks: 1 }
    }

    /// `{A, A^c}` with `A` as block 0.
    pub fn two_block(n: usize, a: &[usize]) -> Result<Self> {
        let mut ids = vec![1; n];
        for &x in a {
            *ids.get_mut(x).ok_or_else(|| Error::invalid(format!("state {x} out of range")))? = 0;
        }
        if ids.iter().all(|&b| b == 0) || ids.iter().all(|&b| b == 1) {
            return Err(Error::invalid("both blocks must be non-empty"));
        }
        Ok(BlockPartition { block_of: ids, blocks: 2 })
    }

    pub fn states(&self) -> usize {
        self.block_of.len()
    }

    pub fn block_count(&self) -> usize {
        self.blocks
    }

    pub fn block_of(&self, x: usize) -> usize {
        self.block_of[x]
    }

    pub fn members(&self, block: usize) -> Vec<usize> {
        (0..self.block_of.len()).filter(|&x| self.block_of[x] == block).collect()
    }

    pub fn block_sums<T: Scalar>(&self, v: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.blocks];
        for (x, vx) in v.iter().enumerate() {
            let b = self.block_of[x];
            out[b] = out[b].clone() + vx.clone();
        }
        out
    }
}

/// One block id per line.
pub fn parse_partition(text: &str) -> Result<BlockPartition> {
    let ids = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.parse::<usize>().map_err(|_| Error::invalid(format!("not a block id: {l:?}"))))
        .collect::<Result<Vec<_>>>()?;
    BlockPartition::new(&ids)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(StochasticMatrix::new(vec![vec![0.5, 0.5], vec![0.2, 0.9]]).is_err());
        assert!(StochasticMatrix::new(vec![vec![1.5, -0.5], vec![0.5, 0.5]]).is_err());
        assert!(StochasticMatrix::new(vec![vec![1.0, 0.0]]).is_err());
        let m = parse_matrix_csv("0.9, 0.1\n1/5, 0.8\n").unwrap();
        assert_eq!(*m.get(1, 0), 0.2);
        let e = parse_matrix_csv_exact("1/3,2/3\n1,0").unwrap();
        assert!(!e.is_doubly_stochastic(0.0));
    }

    #[test]
    fn composition() {
        let m = StochasticMatrix::new(vec![vec![0.5, 0.5], vec![1.0, 0.0]]).unwrap();
        let sq = m.then(&m);
        assert_eq!(sq.rows(), vec![vec![0.75, 0.25], vec![0.5, 0.5]]);
        assert_eq!(m.left_apply(&[1.0, 0.0]), vec![0.5, 0.5]);
    }

    #[test]
    fn partitions() {
        let p = parse_partition("7\n3\n7\n").unwrap();
        assert_eq!(p.block_count(), 2);
        assert_eq!(p.members(1), vec![0, 2]);
        assert!(BlockPartition::two_block(3, &[0, 1, 2]).is_err());
        assert_eq!(p.block_sums(&[0.25, 0.5, 0.25]), vec![0.5, 0.5]);
    }
}
