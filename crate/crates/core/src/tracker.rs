//! Incremental bisecant coverage for a growing cap.

use bitvec::prelude::*;

use crate::cap::{Cap, Provenance};
use crate::error::{Error, Result};
use crate::space::{ProjPoint, ProjSpace};

/// Upper bound on the bytes a single search may allocate for its large
/// per-point structures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MemoryBudget(pub u64);

impl MemoryBudget {
    pub const DEFAULT: MemoryBudget = MemoryBudget(4 << 30);

    pub fn from_gib(gib: f64) -> Self {
        MemoryBudget((gib * (1u64 << 30) as f64) as u64)
    }

    pub fn bytes(self) -> u64 {
        self.0
    }

    pub(crate) fn check(self, requested: u64) -> Result<()> {
        if requested > self.0 {
            return Err(Error::AllocationFailure {
                requested,
                budget: self.0,
            });
        }
        Ok(())
    }
}

impl Default for MemoryBudget {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Bytes needed for a one-bit-per-point bitmap.
pub fn bitmap_bytes(point_count: u64) -> u64 {
    point_count.div_ceil(64) * 8
}

/// Tracks which points of the space lie on a bisecant of the current cap.
///
/// Cap points count as covered once the cap has two or more points. Bits are
/// never cleared.
#[derive(Clone, Debug)]
pub struct CoverageTracker<'s> {
    space: &'s ProjSpace,
    cap: Vec<u64>,
    cap_coords: Vec<u32>,
    covered: BitVec<u64, Lsb0>,
    covered_count: u64,
}

impl<'s> CoverageTracker<'s> {
    pub fn new(space: &'s ProjSpace) -> Result<Self> {
        Self::with_budget(space, MemoryBudget::DEFAULT)
    }

    pub fn with_budget(space: &'s ProjSpace, budget: MemoryBudget) -> Result<Self> {
        budget.check(bitmap_bytes(space.point_count()))?;
        let len = usize::try_from(space.point_count()).map_err(|_| Error::AllocationFailure {
            requested: bitmap_bytes(space.point_count()),
            budget: budget.bytes(),
        })?;
        Ok(CoverageTracker {
            space,
            cap: Vec::new(),
            cap_coords: Vec::new(),
            covered: bitvec![u64, Lsb0; 0; len],
            covered_count: 0,
        })
    }

    pub fn space(&self) -> &'s ProjSpace {
        self.space
    }

    pub fn cap_len(&self) -> usize {
        self.cap.len()
    }

    /// Indices of the cap points in insertion order.
    pub fn cap_indices(&self) -> &[u64] {
        &self.cap
    }

    pub(crate) fn cap_coords(&self, k: usize) -> &[u32] {
        let n = self.space.coord_len();
        &self.cap_coords[k * n..(k + 1) * n]
    }

    pub fn cap_points(&self) -> Vec<ProjPoint> {
        (0..self.cap.len())
            .map(|k| self.space.point(self.cap_coords(k)).unwrap())
            .collect()
    }

    pub fn covered_count(&self) -> u64 {
        self.covered_count
    }

    pub fn uncovered_count(&self) -> u64 {
        self.space.point_count() - self.covered_count
    }

    #[inline]
    pub fn is_covered(&self, index: u64) -> bool {
        self.covered[(index - 1) as usize]
    }

    /// The coverage bitmap; bit `i - 1` belongs to point `i`.
    pub fn covered_bits(&self) -> &BitSlice<u64, Lsb0> {
        &self.covered
    }

    /// Raw storage of the bitmap, 64 points per word.
    pub(crate) fn covered_words(&self) -> &[u64] {
        self.covered.as_raw_slice()
    }

    pub fn is_complete(&self) -> bool {
        self.covered_count == self.space.point_count()
    }

    pub fn contains(&self, index: u64) -> bool {
        self.cap.contains(&index)
    }

    /// Whether `p` may be added without breaking the cap property.
    pub fn can_add(&self, index: u64) -> bool {
        !self.is_covered(index) && !self.contains(index)
    }

    pub fn add_point(&mut self, p: &ProjPoint) -> Result<()> {
        self.add_point_with(p, |_, _, _| {})
    }

    pub fn add_index(&mut self, index: u64) -> Result<()> {
        let p = self.space.point_at(index)?;
        self.add_point(&p)
    }

    /// Adds `p` and reports every newly covered point through `on_new`,
    /// together with the position of the cap point whose line covered it.
    pub(crate) fn add_point_with(
        &mut self,
        p: &ProjPoint,
        mut on_new: impl FnMut(usize, u64, &[u32]),
    ) -> Result<()> {
        let n = self.space.coord_len();
        if p.coords().len() != n {
            return Err(Error::WrongLength {
                expected: n,
                found: p.coords().len(),
            });
        }
        if self.contains(p.index()) {
            return Err(Error::DuplicatePoint(p.index()));
        }
        if self.is_covered(p.index()) {
            return Err(Error::PointCovered(p.index()));
        }
        let space = self.space;
        let covered = &mut self.covered;
        let mut gained = 0u64;
        for k in 0..self.cap.len() {
            let b = &self.cap_coords[k * n..(k + 1) * n];
            space.for_each_on_line(p.coords(), b, |idx, c| {
                let mut bit = covered.get_mut((idx - 1) as usize).unwrap();
                if !*bit {
                    bit.set(true);
                    gained += 1;
                    on_new(k, idx, c);
                }
            });
        }
        self.covered_count += gained;
        self.cap.push(p.index());
        self.cap_coords.extend_from_slice(p.coords());
        Ok(())
    }

    /// Smallest uncovered index `>= start`, scanning the bitmap a word at
    /// a time.
    pub fn first_uncovered_from(&self, start: u64) -> Option<u64> {
        let start = start.max(1);
        if start > self.space.point_count() {
            return None;
        }
        self.covered[(start - 1) as usize..]
            .first_zero()
            .map(|off| start + off as u64)
    }

    /// Number of points that adding `p` would newly cover. Does not mutate.
    pub fn what_if_gain(&self, p: &ProjPoint) -> u64 {
        let n = self.space.coord_len();
        let mut gain = 0u64;
        for k in 0..self.cap.len() {
            let b = &self.cap_coords[k * n..(k + 1) * n];
            self.space.for_each_on_line(p.coords(), b, |idx, _| {
                if idx != p.index() && !self.covered[(idx - 1) as usize] {
                    gain += 1;
                }
            });
        }
        if !self.cap.is_empty() && !self.is_covered(p.index()) {
            gain += 1;
        }
        gain
    }

    pub fn into_cap(self, provenance: Provenance) -> Cap {
        let complete = self.is_complete();
        Cap::from_parts(self.space, self.cap_points(), complete, provenance)
    }
}
