//! Row reduction over a prime field.

use crate::field::Field;

/// Rank of the matrix whose rows are `rows`. Works on a private copy.
pub fn rank(field: &Field, rows: &[&[u32]]) -> usize {
    let mut m: Vec<Vec<u32>> = rows.iter().map(|r| r.to_vec()).collect();
    rank_in_place(field, &mut m)
}

/// Gaussian elimination in place; returns the rank.
pub fn rank_in_place(field: &Field, m: &mut [Vec<u32>]) -> usize {
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = field.inv_raw(m[rank][col]);
        for x in m[rank].iter_mut() {
            *x = field.mul_raw(*x, inv);
        }
        let (head, tail) = m.split_at_mut(rank + 1);
        let prow = &head[rank];
        for row in tail.iter_mut() {
            let c = row[col];
            if c != 0 {
                for (x, &p) in row.iter_mut().zip(prow.iter()) {
                    *x = field.sub_raw(*x, field.mul_raw(c, p));
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// An echelon basis that vectors can be tested against and appended to.
///
/// Each stored row has a pivot entry equal to 1 and zeros in the pivot
/// columns of earlier rows.
#[derive(Clone, Debug, Default)]
pub struct EchelonBasis {
    rows: Vec<(usize, Vec<u32>)>,
}

impl EchelonBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Reduces `v` against the basis in place. Returns true when the
    /// remainder is zero, i.e. `v` lies in the span.
    pub fn reduce(&self, field: &Field, v: &mut [u32]) -> bool {
        for (pc, row) in &self.rows {
            let c = v[*pc];
            if c != 0 {
                for (x, &r) in v.iter_mut().zip(row.iter()) {
                    *x = field.sub_raw(*x, field.mul_raw(c, r));
                }
            }
        }
        v.iter().all(|&x| x == 0)
    }

    /// Adds `v` to the basis unless it is already in the span. Returns
    /// whether the basis grew.
    pub fn insert(&mut self, field: &Field, v: &[u32]) -> bool {
        let mut r = v.to_vec();
        if self.reduce(field, &mut r) {
            return false;
        }
        let pc = r.iter().position(|&x| x != 0).unwrap();
        let inv = field.inv_raw(r[pc]);
        for x in r.iter_mut() {
            *x = field.mul_raw(*x, inv);
        }
        // new rows are zero in all earlier pivot columns, so reducing in
        // insertion order is exact and `pop` restores the previous span
        self.rows.push((pc, r));
        true
    }

    pub fn pop(&mut self) {
        self.rows.pop();
    }
}
