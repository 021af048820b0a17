//! Caps and the brute-force completeness check.
//!
//! [`verify_complete_cap`] shares no code with [`CoverageTracker`]: the
//! collinearity test is a rank computation and the coverage is recomputed
//! from [`ProjSpace::line_points`].
//!
//! [`CoverageTracker`]: crate::tracker::CoverageTracker

use bitvec::prelude::*;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::EchelonBasis;
use crate::space::{ProjPoint, ProjSpace};

/// Where a cap came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Fop,
    Greedy {
        seed: u64,
        params_digest: Option<String>,
    },
    External,
}

/// An ordered point set with the no-three-collinear property.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cap {
    dim: usize,
    q: u32,
    points: Vec<ProjPoint>,
    complete: bool,
    provenance: Provenance,
    note: String,
}

impl Cap {
    pub(crate) fn from_parts(
        space: &ProjSpace,
        points: Vec<ProjPoint>,
        complete: bool,
        provenance: Provenance,
    ) -> Self {
        Cap {
            dim: space.dim(),
            q: space.q(),
            points,
            complete,
            provenance,
            note: String::new(),
        }
    }

    /// Builds a cap from arbitrary points, checking the cap property and
    /// completeness with the brute-force oracle.
    pub fn verified(space: &ProjSpace, points: Vec<ProjPoint>, provenance: Provenance) -> Result<Self> {
        match verify_complete_cap(space, &points)? {
            Verdict::NotACap(t) => Err(Error::VerificationFailed(format!(
                "points {}, {}, {} are collinear",
                t.0, t.1, t.2
            ))),
            v => Ok(Cap::from_parts(space, points, v == Verdict::CompleteCap, provenance)),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[ProjPoint] {
        &self.points
    }

    pub fn indices(&self) -> Vec<u64> {
        self.points.iter().map(|p| p.index()).collect()
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Free text carried on the provenance line of a cap file.
    pub fn note(&self) -> &str {
        &self.note
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub(crate) fn set_complete(&mut self, complete: bool) {
        self.complete = complete;
    }

    pub fn space(&self) -> Result<ProjSpace> {
        ProjSpace::new(self.dim, self.q as u64)
    }
}

/// Outcome of [`verify_complete_cap`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    CompleteCap,
    /// The smallest index of a point on no bisecant.
    IncompleteCap(u64),
    /// 1-based positions (in the input list) of the first collinear triple.
    NotACap((usize, usize, usize)),
}

/// First collinear triple in lexicographic order of positions, if any.
///
/// For each pair the two coordinate rows are put in echelon form once; a
/// third row is collinear with them exactly when it reduces to zero.
pub fn find_collinear_triple(field: &Field, points: &[ProjPoint]) -> Option<(usize, usize, usize)> {
    let mut scratch = Vec::new();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let mut basis = EchelonBasis::new();
            basis.insert(field, points[i].coords());
            basis.insert(field, points[j].coords());
            for k in j + 1..points.len() {
                scratch.clear();
                scratch.extend_from_slice(points[k].coords());
                if basis.reduce(field, &mut scratch) {
                    return Some((i + 1, j + 1, k + 1));
                }
            }
        }
    }
    None
}

/// Points lying on a line through two distinct members of `points`,
/// recomputed from scratch. Bit `i - 1` belongs to point `i`.
pub fn oracle_coverage(space: &ProjSpace, points: &[ProjPoint]) -> BitVec<u64, Lsb0> {
    let mut covered = bitvec![u64, Lsb0; 0; space.point_count() as usize];
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            for p in space.line_points(&points[i], &points[j]).unwrap() {
                covered.set((p.index() - 1) as usize, true);
            }
        }
    }
    covered
}

/// Decides whether `points` form a complete cap by exhaustive triple and
/// bisecant enumeration.
pub fn verify_complete_cap(space: &ProjSpace, points: &[ProjPoint]) -> Result<Verdict> {
    let mut seen = std::collections::HashSet::with_capacity(points.len());
    for p in points {
        let idx = space.index_of(p.coords())?;
        if idx != p.index() {
            return Err(Error::NotNormalized);
        }
        if !seen.insert(idx) {
            return Err(Error::DuplicatePoints);
        }
    }
    if let Some(t) = find_collinear_triple(space.field(), points) {
        return Ok(Verdict::NotACap(t));
    }
    let covered = oracle_coverage(space, points);
    Ok(match covered.first_zero() {
        None => Verdict::CompleteCap,
        Some(i) => Verdict::IncompleteCap(i as u64 + 1),
    })
}
