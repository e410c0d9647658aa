//! Sparse exact linear algebra over `F_p`, used by the frame and gauge solvers.

use std::collections::HashMap;
use std::hash::Hash;

use super::prime::mod_pow;

/// A kernel basis vector: the free column it was generated from (value 1
/// there) plus the pivot values it forces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelVector {
    pub free_col: usize,
    pub entries: Vec<(usize, u64)>,
}

/// Collects the columns of a sparse linear map, keying rows by arbitrary labels.
pub struct LinearSystem<K> {
    p: u64,
    ncols: usize,
    row_index: HashMap<K, usize>,
    rows: Vec<Vec<(usize, u64)>>,
}

impl<K: Hash + Eq> LinearSystem<K> {
    pub fn new(p: u64, ncols: usize) -> Self {
        Self {
            p,
            ncols,
            row_index: HashMap::new(),
            rows: Vec::new(),
        }
    }

    pub fn add(&mut self, col: usize, row: K, coeff: u64) {
        let coeff = coeff % self.p;
        if coeff == 0 {
            return;
        }
        let next = self.rows.len();
        let r = *self.row_index.entry(row).or_insert(next);
        if r == next {
            self.rows.push(Vec::new());
        }
        self.rows[r].push((col, coeff));
    }

    pub fn kernel(self) -> Vec<KernelVector> {
        kernel(self.p, self.ncols, self.rows)
    }
}

fn normalize(p: u64, mut row: Vec<(usize, u64)>) -> Vec<(usize, u64)> {
    row.sort_unstable_by_key(|&(c, _)| c);
    let mut out: Vec<(usize, u64)> = Vec::with_capacity(row.len());
    for (c, v) in row {
        match out.last_mut() {
            Some((lc, lv)) if *lc == c => *lv = (*lv + v) % p,
            _ => out.push((c, v % p)),
        }
    }
    out.retain(|&(_, v)| v != 0);
    out
}

/// `a - c * b` for sorted sparse rows.
fn axpy(p: u64, a: &[(usize, u64)], c: u64, b: &[(usize, u64)]) -> Vec<(usize, u64)> {
    let neg = (p - c % p) % p;
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i]);
            i += 1;
        } else if take_b {
            out.push((b[j].0, b[j].1 * neg % p));
            j += 1;
        } else {
            let v = (a[i].1 + b[j].1 * neg) % p;
            if v != 0 {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Basis of `{x : A x = 0}` for the sparse matrix with the given rows.
///
/// Pivots sit at the smallest column of each reduced row, so callers that
/// want "simple" kernel vectors order their unknowns from most to least
/// complex.
pub fn kernel(p: u64, ncols: usize, rows: Vec<Vec<(usize, u64)>>) -> Vec<KernelVector> {
    let mut pivots: HashMap<usize, Vec<(usize, u64)>> = HashMap::new();
    for row in rows {
        let mut row = normalize(p, row);
        while let Some(&(lead, c)) = row.first() {
            match pivots.get(&lead) {
                Some(piv) => row = axpy(p, &row, c, piv),
                None => {
                    let inv = mod_pow(c, p - 2, p);
                    let row: Vec<_> = row.into_iter().map(|(j, v)| (j, v * inv % p)).collect();
                    pivots.insert(lead, row);
                    break;
                }
            }
        }
    }
    // Back-substitute into reduced row echelon form, highest pivot first, so
    // every reduced row carries its pivot plus free columns only.
    let mut order: Vec<usize> = pivots.keys().copied().collect();
    order.sort_unstable_by(|a, b| b.cmp(a));
    let mut reduced: HashMap<usize, Vec<(usize, u64)>> = HashMap::with_capacity(order.len());
    for &c in &order {
        let mut row = pivots.remove(&c).expect("pivot present");
        let hits: Vec<(usize, u64)> = row[1..]
            .iter()
            .copied()
            .filter(|(j, _)| reduced.contains_key(j))
            .collect();
        for (j, v) in hits {
            row = axpy(p, &row, v, &reduced[&j]);
        }
        reduced.insert(c, row);
    }
    let mut by_free: HashMap<usize, Vec<(usize, u64)>> = HashMap::new();
    for (&c, row) in &reduced {
        for &(j, v) in &row[1..] {
            by_free.entry(j).or_default().push((c, (p - v) % p));
        }
    }
    (0..ncols)
        .filter(|c| !reduced.contains_key(c))
        .map(|f| {
            let mut entries = by_free.remove(&f).unwrap_or_default();
            entries.push((f, 1));
            entries.sort_unstable_by_key(|&(c, _)| c);
            KernelVector {
                free_col: f,
                entries,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn apply(p: u64, rows: &[Vec<(usize, u64)>], x: &KernelVector, ncols: usize) -> Vec<u64> {
        let mut dense = vec![0u64; ncols];
        for &(c, v) in &x.entries {
            dense[c] = v;
        }
        rows.iter()
            .map(|r| r.iter().map(|&(c, v)| v * dense[c]).sum::<u64>() % p)
            .collect()
    }

    #[test]
    fn kernel_of_small_system() {
        // x0 + x1 + x2 = 0, x1 + 2 x2 = 0 over F_5
        let rows = vec![vec![(0, 1), (1, 1), (2, 1)], vec![(1, 1), (2, 2)]];
        let ker = kernel(5, 3, rows.clone());
        assert_eq!(ker.len(), 1);
        assert_eq!(ker[0].free_col, 2);
        assert!(apply(5, &rows, &ker[0], 3).iter().all(|&v| v == 0));
    }

    #[test]
    fn dependent_rows_and_empty_columns() {
        let rows = vec![
            vec![(0, 2), (3, 1)],
            vec![(0, 4), (3, 2)],
            vec![(1, 1), (3, 6)],
        ];
        let ker = kernel(7, 5, rows.clone());
        assert_eq!(ker.len(), 3);
        for k in &ker {
            assert!(apply(7, &rows, k, 5).iter().all(|&v| v == 0));
        }
        let frees: Vec<usize> = ker.iter().map(|k| k.free_col).collect();
        assert_eq!(frees, vec![2, 3, 4]);
    }

    #[test]
    fn random_systems_have_valid_kernels() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let p = [3u64, 5, 7][rng.gen_range(0..3)];
            let ncols = rng.gen_range(1..12);
            let nrows = rng.gen_range(0..12);
            let rows: Vec<Vec<(usize, u64)>> = (0..nrows)
                .map(|_| {
                    (0..rng.gen_range(1..4))
                        .map(|_| (rng.gen_range(0..ncols), rng.gen_range(0..p)))
                        .collect()
                })
                .collect();
            let ker = kernel(p, ncols, rows.clone());
            for k in &ker {
                assert!(apply(p, &rows, k, ncols).iter().all(|&v| v == 0));
            }
            // rank + nullity = ncols, checked against a dense elimination.
            assert_eq!(ker.len(), ncols - dense_rank(p, &rows, ncols));
        }
    }

    fn dense_rank(p: u64, rows: &[Vec<(usize, u64)>], ncols: usize) -> usize {
        let mut m: Vec<Vec<u64>> = rows
            .iter()
            .map(|r| {
                let mut d = vec![0u64; ncols];
                for &(c, v) in r {
                    d[c] = (d[c] + v) % p;
                }
                d
            })
            .collect();
        let mut rank = 0;
        for col in 0..ncols {
            let Some(piv) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
                continue;
            };
            m.swap(rank, piv);
            let inv = mod_pow(m[rank][col], p - 2, p);
            for r in 0..m.len() {
                if r != rank && m[r][col] != 0 {
                    let f = m[r][col] * inv % p;
                    for c in 0..ncols {
                        m[r][c] = (m[r][c] + p * p - f * m[rank][c] % p) % p;
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}
