//! Incremental objective evaluation for the greedy search.
//!
//! For a cap `S` with `s >= 2` points and a candidate `P` (uncovered), the
//! lines `PB`, `B` in `S`, are pairwise distinct and each holds `q - 1`
//! points besides `P` and `B`. Adding `P` therefore covers
//!
//! ```text
//! gain(P) = 1 + s(q - 1) - penalty(P)
//! ```
//!
//! new points, where `penalty(P)` is the number of already covered points
//! on those lines other than the cap points. The engine keeps `penalty`
//! up to date for every candidate:
//!
//! * when a point `R` becomes covered, every candidate on a line `CR`,
//!   `C` an earlier cap point, gains one;
//! * the new cap point `A` contributes, to each candidate on a line through
//!   `A`, the number of covered points on that line other than `A`.

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::space::{pivot, ProjPoint, ProjSpace};
use crate::tracker::{bitmap_bytes, CoverageTracker, MemoryBudget};

const ABSENT: u32 = u32::MAX;

/// Greedy search state: coverage plus the candidate list and penalties.
#[derive(Clone, Debug)]
pub struct GreedyEngine<'s> {
    tracker: CoverageTracker<'s>,
    /// Candidate point indices, in no particular order.
    cand: Vec<u32>,
    /// `pos[i - 1]` is the position of point `i` in `cand`, or `ABSENT`.
    pos: Vec<u32>,
    penalty: Vec<u32>,
    trace: Vec<u64>,
}

/// Bytes the engine allocates for a space with `point_count` points.
pub fn engine_bytes(point_count: u64) -> u64 {
    bitmap_bytes(point_count) + 12 * point_count
}

/// Calls `f` with every normalized vector of length `len` over `F_q`.
fn for_each_normalized(len: usize, q: u32, buf: &mut [u32], mut f: impl FnMut(&[u32])) {
    for lead in (0..len).rev() {
        buf[..len].fill(0);
        buf[lead] = 1;
        loop {
            f(&buf[..len]);
            let mut i = len;
            loop {
                if i == lead + 1 {
                    break;
                }
                i -= 1;
                buf[i] += 1;
                if buf[i] < q {
                    break;
                }
                buf[i] = 0;
            }
            if buf[lead + 1..len].iter().all(|&x| x == 0) {
                break;
            }
        }
    }
}

impl<'s> GreedyEngine<'s> {
    pub fn new(space: &'s ProjSpace, budget: MemoryBudget) -> Result<Self> {
        let pc = space.point_count();
        budget.check(engine_bytes(pc))?;
        if pc >= ABSENT as u64 {
            return Err(Error::TooLarge(format!("{pc} points exceed the greedy engine index range")));
        }
        let tracker = CoverageTracker::with_budget(space, budget)?;
        Ok(GreedyEngine {
            tracker,
            cand: (1..=pc as u32).collect(),
            pos: (0..pc as u32).collect(),
            penalty: vec![0; pc as usize],
            trace: Vec::new(),
        })
    }

    /// Engine whose cap is `s0`; fails with `S0NotACap` if `s0` is not a cap.
    pub fn with_start(space: &'s ProjSpace, s0: &[ProjPoint], budget: MemoryBudget) -> Result<Self> {
        let mut e = Self::new(space, budget)?;
        for p in s0 {
            e.add(p).map_err(|err| match err {
                Error::PointCovered(_) | Error::DuplicatePoint(_) => Error::S0NotACap,
                other => other,
            })?;
        }
        e.clear_trace();
        Ok(e)
    }

    pub fn tracker(&self) -> &CoverageTracker<'s> {
        &self.tracker
    }

    pub fn into_tracker(self) -> CoverageTracker<'s> {
        self.tracker
    }

    /// Covered counts recorded after each addition since the start state.
    pub fn trace(&self) -> &[u64] {
        &self.trace
    }

    pub(crate) fn clear_trace(&mut self) {
        self.trace.clear();
    }

    pub fn candidate_count(&self) -> usize {
        self.cand.len()
    }

    pub fn is_complete(&self) -> bool {
        self.cand.is_empty()
    }

    /// Number of points that adding candidate `index` would newly cover.
    pub fn gain(&self, index: u64) -> u64 {
        let s = self.tracker.cap_len() as u64;
        let q = self.tracker.space().q() as u64;
        match s {
            0 => 0,
            1 => q + 1,
            _ => 1 + s * (q - 1) - self.penalty[(index - 1) as usize] as u64,
        }
    }

    fn remove_candidate(&mut self, index: u64) {
        let p = self.pos[(index - 1) as usize];
        if p == ABSENT {
            return;
        }
        let last = *self.cand.last().unwrap();
        self.cand.swap_remove(p as usize);
        if last as u64 != index {
            self.pos[(last - 1) as usize] = p;
        }
        self.pos[(index - 1) as usize] = ABSENT;
    }

    /// Adds `p` to the cap and updates all penalties.
    pub fn add(&mut self, p: &ProjPoint) -> Result<()> {
        let space = self.tracker.space();
        let n = space.coord_len();
        let s_old = self.tracker.cap_len();
        let mut newly: Vec<(usize, u64)> = Vec::new();
        let mut newly_coords: Vec<u32> = Vec::new();
        self.tracker.add_point_with(p, |k, idx, c| {
            newly.push((k, idx));
            newly_coords.extend_from_slice(c);
        })?;
        self.remove_candidate(p.index());
        for &(_, idx) in &newly {
            self.remove_candidate(idx);
        }

        // from here on the cap has at least two points, so the candidates
        // are exactly the uncovered points
        let penalty = &mut self.penalty;
        let words = self.tracker.covered_words();
        let uncovered = |z: usize| (words[z >> 6] >> (z & 63)) & 1 == 0;
        for (r, &(kr, idx)) in newly.iter().enumerate() {
            if idx == p.index() {
                continue;
            }
            let rc = &newly_coords[r * n..(r + 1) * n];
            for k in 0..s_old {
                if k == kr {
                    continue;
                }
                space.for_each_index_on_line(self.tracker.cap_coords(k), rc, |j| {
                    let z = (j - 1) as usize;
                    if uncovered(z) {
                        penalty[z] += 1;
                    }
                });
            }
        }

        if s_old >= 1 && !self.cand.is_empty() {
            let a = p.coords();
            let lead = pivot(a).unwrap();
            let mut dir = [0u32; crate::space::MAX_COORDS];
            let mut y = [0u32; crate::space::MAX_COORDS];
            let mut line: Vec<u64> = Vec::with_capacity(space.q() as usize + 1);
            for_each_normalized(n - 1, space.q(), &mut dir, |d| {
                y[..lead].copy_from_slice(&d[..lead]);
                y[lead] = 0;
                y[lead + 1..n].copy_from_slice(&d[lead..n - 1]);
                line.clear();
                let mut count = 0u32;
                space.for_each_index_on_line(a, &y[..n], |j| {
                    if j != p.index() {
                        if uncovered((j - 1) as usize) {
                            line.push(j);
                        } else {
                            count += 1;
                        }
                    }
                });
                if count > 0 {
                    for &j in &line {
                        penalty[(j - 1) as usize] += count;
                    }
                }
            });
        }
        self.trace.push(self.tracker.covered_count());
        Ok(())
    }

    /// Candidate maximizing the gain; ties broken uniformly with `rng`.
    pub fn best_candidate<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<u64> {
        self.argmax(self.cand.iter().map(|&i| i as u64), rng)
    }

    /// Best of `pool_size` distinct candidates drawn uniformly.
    pub fn best_of_sample<R: Rng + ?Sized>(&self, pool_size: usize, rng: &mut R) -> Result<u64> {
        if self.cand.is_empty() {
            return Err(Error::NoCandidates);
        }
        let k = pool_size.max(1).min(self.cand.len());
        let picks = index::sample(rng, self.cand.len(), k);
        let sample: Vec<u64> = picks.iter().map(|p| self.cand[p] as u64).collect();
        self.argmax(sample.into_iter(), rng)
    }

    fn argmax<R: Rng + ?Sized>(&self, it: impl Iterator<Item = u64>, rng: &mut R) -> Result<u64> {
        let mut best = None;
        let mut best_gain = 0;
        let mut ties = 0u64;
        for i in it {
            let g = self.gain(i);
            if best.is_none() || g > best_gain {
                best = Some(i);
                best_gain = g;
                ties = 1;
            } else if g == best_gain {
                ties += 1;
                if rng.gen_range(0..ties) == 0 {
                    best = Some(i);
                }
            }
        }
        best.ok_or(Error::NoCandidates)
    }

    pub fn add_index(&mut self, index: u64) -> Result<()> {
        let p = self.tracker.space().point_at(index)?;
        self.add(&p)
    }
}
