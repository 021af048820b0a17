//! Caps from a fixed order of points.
//!
//! The cap starts with the first two points of the order. Every later point,
//! taken in order, is added if it is not yet on a bisecant. Since coverage
//! only grows, a single forward pass suffices.

use bitvec::prelude::*;

use crate::cap::{verify_complete_cap, Cap, Provenance, Verdict};
use crate::capfile::ORACLE_POINT_LIMIT;
use crate::error::{Error, Result};
use crate::space::ProjSpace;
use crate::tracker::{CoverageTracker, MemoryBudget};

/// Order in which the points are offered to the cap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PointOrder {
    Lexicographic,
    /// `perm[k]` is the index of the point in position `k + 1`.
    Explicit(Vec<u64>),
}

impl PointOrder {
    /// Checks that an explicit order is a permutation of `1..=point_count`.
    pub fn validate(&self, space: &ProjSpace) -> Result<()> {
        let PointOrder::Explicit(perm) = self else {
            return Ok(());
        };
        let n = space.point_count();
        if perm.len() as u64 != n {
            return Err(Error::InvalidOrder(format!(
                "order lists {} points, the space has {n}",
                perm.len()
            )));
        }
        let mut seen = bitvec![u64, Lsb0; 0; n as usize];
        for (k, &i) in perm.iter().enumerate() {
            if i == 0 || i > n {
                return Err(Error::InvalidOrder(format!("position {}: index {i} out of range", k + 1)));
            }
            if seen.replace((i - 1) as usize, true) {
                return Err(Error::InvalidOrder(format!("position {}: index {i} repeated", k + 1)));
            }
        }
        Ok(())
    }

    /// Parses a permutation given as whitespace-separated indices.
    pub fn parse_explicit(text: &str) -> Result<Self> {
        let mut perm = Vec::new();
        for (line_no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap();
            for tok in line.split_whitespace() {
                perm.push(tok.parse().map_err(|_| Error::ParseError {
                    line: line_no + 1,
                    message: format!("`{tok}` is not a point index"),
                })?);
            }
        }
        Ok(PointOrder::Explicit(perm))
    }
}

/// Snapshot passed to the progress callback.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FopProgress {
    pub scanned: u64,
    pub cap_size: usize,
    pub covered_fraction: f64,
}

const PROGRESS_STRIDE: u64 = 1 << 20;

/// Runs the fixed-order algorithm to completion.
pub fn fop_run(
    space: &ProjSpace,
    order: &PointOrder,
    progress: Option<&mut dyn FnMut(FopProgress)>,
) -> Result<Cap> {
    fop_run_with_budget(space, order, MemoryBudget::DEFAULT, progress)
}

pub fn fop_run_with_budget(
    space: &ProjSpace,
    order: &PointOrder,
    budget: MemoryBudget,
    mut progress: Option<&mut dyn FnMut(FopProgress)>,
) -> Result<Cap> {
    order.validate(space)?;
    let mut t = CoverageTracker::with_budget(space, budget)?;
    let total = space.point_count();
    let mut next_report = PROGRESS_STRIDE;
    let mut report = |t: &CoverageTracker, scanned: u64| {
        if let Some(cb) = progress.as_deref_mut() {
            cb(FopProgress {
                scanned,
                cap_size: t.cap_len(),
                covered_fraction: t.covered_count() as f64 / total as f64,
            });
        }
    };

    match order {
        PointOrder::Lexicographic => {
            t.add_index(1)?;
            t.add_index(2)?;
            let mut last = 2;
            while let Some(i) = t.first_uncovered_from(last + 1) {
                t.add_index(i)?;
                last = i;
                if i >= next_report {
                    report(&t, i);
                    next_report = (i / PROGRESS_STRIDE + 1) * PROGRESS_STRIDE;
                }
            }
            report(&t, total);
        }
        PointOrder::Explicit(perm) => {
            t.add_index(perm[0])?;
            t.add_index(perm[1])?;
            for (k, &i) in perm.iter().enumerate().skip(2) {
                if t.is_complete() {
                    break;
                }
                if !t.is_covered(i) {
                    t.add_index(i)?;
                }
                if (k as u64 + 1) % PROGRESS_STRIDE == 0 {
                    report(&t, k as u64 + 1);
                }
            }
            report(&t, total);
        }
    }

    if !t.is_complete() || t.covered_bits().count_ones() as u64 != t.covered_count() {
        return Err(Error::VerificationFailed("scan ended with an incomplete cap".into()));
    }
    let cap = t.into_cap(Provenance::Fop);
    if space.point_count() <= ORACLE_POINT_LIMIT {
        match verify_complete_cap(space, cap.points())? {
            Verdict::CompleteCap => {}
            v => return Err(Error::VerificationFailed(format!("oracle verdict {v:?}"))),
        }
    }
    Ok(cap)
}

/// Size of the lexicographic cap of `PG(dim, q)`.
pub fn lexicap_size(dim: usize, q: u64) -> Result<usize> {
    let space = ProjSpace::new(dim, q)?;
    Ok(fop_run(&space, &PointOrder::Lexicographic, None)?.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capfile::cap_to_string;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_xoshiro::SplitMix64;

    #[test]
    fn small_lexicaps() {
        for (n, q, size) in [(3, 2, 8), (3, 3, 8), (3, 5, 16), (3, 7, 23), (3, 13, 49), (4, 3, 16), (4, 5, 44)] {
            assert_eq!(lexicap_size(n, q).unwrap(), size, "PG({n},{q})");
        }
    }

    #[test]
    fn pg32_lexicap_points() {
        let s = ProjSpace::new(3, 2).unwrap();
        let cap = fop_run(&s, &PointOrder::Lexicographic, None).unwrap();
        assert_eq!(cap.indices(), vec![1, 2, 4, 7, 8, 11, 13, 14]);
        assert!(cap.is_complete());
        assert_eq!(cap.provenance(), &Provenance::Fop);
    }

    #[test]
    fn deterministic_and_monotone() {
        let s = ProjSpace::new(3, 11).unwrap();
        let a = fop_run(&s, &PointOrder::Lexicographic, None).unwrap();
        let b = fop_run(&s, &PointOrder::Lexicographic, None).unwrap();
        assert_eq!(cap_to_string(&a), cap_to_string(&b));
        assert!(a.indices().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn identity_order_equals_lexicographic() {
        let s = ProjSpace::new(3, 5).unwrap();
        let id = PointOrder::Explicit((1..=s.point_count()).collect());
        let a = fop_run(&s, &id, None).unwrap();
        let b = fop_run(&s, &PointOrder::Lexicographic, None).unwrap();
        assert_eq!(a.indices(), b.indices());
    }

    #[test]
    fn shuffled_orders_give_complete_caps() {
        let s = ProjSpace::new(3, 7).unwrap();
        let mut rng = SplitMix64::seed_from_u64(3);
        for _ in 0..5 {
            let mut perm: Vec<u64> = (1..=s.point_count()).collect();
            perm.shuffle(&mut rng);
            let rank: std::collections::HashMap<u64, usize> =
                perm.iter().enumerate().map(|(k, &i)| (i, k)).collect();
            let cap = fop_run(&s, &PointOrder::Explicit(perm), None).unwrap();
            assert!(cap.is_complete());
            let pos: Vec<usize> = cap.indices().iter().map(|i| rank[i]).collect();
            assert!(pos.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn bad_orders_rejected() {
        let s = ProjSpace::new(3, 2).unwrap();
        let short = PointOrder::Explicit((1..15).collect());
        assert!(matches!(fop_run(&s, &short, None), Err(Error::InvalidOrder(_))));
        let mut dup: Vec<u64> = (1..=15).collect();
        dup[3] = 1;
        assert!(matches!(fop_run(&s, &PointOrder::Explicit(dup), None), Err(Error::InvalidOrder(_))));
        let mut out: Vec<u64> = (1..=15).collect();
        out[0] = 16;
        assert!(matches!(fop_run(&s, &PointOrder::Explicit(out), None), Err(Error::InvalidOrder(_))));
    }

    #[test]
    fn progress_reports_final_state() {
        let s = ProjSpace::new(3, 5).unwrap();
        let mut last = None;
        let mut cb = |p: FopProgress| last = Some(p);
        let cap = fop_run(&s, &PointOrder::Lexicographic, Some(&mut cb)).unwrap();
        let p = last.unwrap();
        assert_eq!(p.cap_size, cap.len());
        assert_eq!(p.covered_fraction, 1.0);
    }
}
