//! Points and lines of `PG(N,q)` in lexicographic order.
//!
//! A point is stored in normalized form: the leftmost nonzero coordinate is
//! 1. Points are numbered `1..=point_count` following the lexicographic order
//! of their normalized coordinate tuples, so `(0,...,0,1)` is point 1 and
//! `(1,q-1,...,q-1)` is the last one.
//!
//! A point whose leading 1 sits at position `j` (0-based) and whose trailing
//! `N-j` coordinates read as the base-`q` integer `v` has index
//! `(q^(N-j) - 1)/(q - 1) + v + 1`.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg;

/// Coordinate vectors never exceed this length.
pub const MAX_COORDS: usize = 32;

/// The projective space `PG(N,q)` over a prime field.
#[derive(Clone, Debug)]
pub struct ProjSpace {
    dim: usize,
    field: Field,
    point_count: u64,
    /// `offsets[m] = (q^m - 1)/(q - 1)`, the number of points whose leading
    /// 1 is in one of the last `m` positions.
    offsets: Vec<u64>,
    /// `weights[i] = q^(N - i)`, the place value of coordinate `i`.
    weights: Vec<u64>,
}

impl PartialEq for ProjSpace {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.field == other.field
    }
}

impl Eq for ProjSpace {}

/// A normalized point together with its lexicographic index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint {
    index: u64,
    coords: Vec<u32>,
}

impl ProjPoint {
    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Position of the first nonzero entry.
#[inline]
pub(crate) fn pivot(v: &[u32]) -> Option<usize> {
    v.iter().position(|&x| x != 0)
}

/// Exact `(q^(N+1) - 1)/(q - 1)`, or `None` if it does not fit in `u64`.
pub fn point_count_exact(dim: usize, q: u64) -> Option<u128> {
    let mut total: u128 = 0;
    let mut power: u128 = 1;
    for _ in 0..=dim {
        total = total.checked_add(power)?;
        power = power.checked_mul(q as u128)?;
    }
    Some(total)
}

impl ProjSpace {
    pub fn new(dim: usize, q: u64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionTooSmall(dim));
        }
        let field = Field::new(q)?;
        if dim + 1 > MAX_COORDS {
            return Err(Error::SpaceTooLarge { dim, q });
        }
        let count = point_count_exact(dim, q)
            .filter(|&c| c <= u64::MAX as u128)
            .ok_or(Error::SpaceTooLarge { dim, q })? as u64;
        let mut offsets = Vec::with_capacity(dim + 2);
        let mut acc = 0u64;
        let mut power = 1u64;
        offsets.push(0);
        for _ in 0..=dim {
            acc += power;
            offsets.push(acc);
            power = power.saturating_mul(q);
        }
        let weights = (0..=dim).map(|i| (q as u64).pow((dim - i) as u32)).collect();
        Ok(ProjSpace {
            dim,
            field,
            point_count: count,
            offsets,
            weights,
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of homogeneous coordinates, `N + 1`.
    #[inline]
    pub fn coord_len(&self) -> usize {
        self.dim + 1
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.field.order()
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    #[inline]
    pub fn point_count(&self) -> u64 {
        self.point_count
    }

    fn check_raw(&self, raw: &[u32]) -> Result<()> {
        if raw.len() != self.coord_len() {
            return Err(Error::WrongLength {
                expected: self.coord_len(),
                found: raw.len(),
            });
        }
        if let Some(&bad) = raw.iter().find(|&&x| x >= self.q()) {
            return Err(Error::CoordinateOutOfRange {
                value: bad as u64,
                q: self.q(),
            });
        }
        Ok(())
    }

    /// Scales `raw` so that its leftmost nonzero entry is 1.
    pub fn normalize(&self, raw: &[u32]) -> Result<ProjPoint> {
        self.check_raw(raw)?;
        let mut coords = raw.to_vec();
        let p = pivot(&coords).ok_or(Error::ZeroVector)?;
        let inv = self.field.inv_raw(coords[p]);
        for x in coords[p..].iter_mut() {
            *x = self.field.mul_raw(*x, inv);
        }
        let index = self.rank_unchecked(&coords);
        Ok(ProjPoint { index, coords })
    }

    /// Index of already-normalized coordinates.
    pub fn index_of(&self, coords: &[u32]) -> Result<u64> {
        self.check_raw(coords)?;
        match pivot(coords) {
            None => Err(Error::ZeroVector),
            Some(p) if coords[p] != 1 => Err(Error::NotNormalized),
            Some(_) => Ok(self.rank_unchecked(coords)),
        }
    }

    /// Builds a point from normalized coordinates.
    pub fn point(&self, coords: &[u32]) -> Result<ProjPoint> {
        let index = self.index_of(coords)?;
        Ok(ProjPoint {
            index,
            coords: coords.to_vec(),
        })
    }

    /// Rank of a normalized vector; no validation.
    #[inline]
    pub(crate) fn rank_unchecked(&self, coords: &[u32]) -> u64 {
        let p = pivot(coords).expect("nonzero vector");
        self.rank_with_pivot(coords, p)
    }

    #[inline]
    pub(crate) fn rank_with_pivot(&self, coords: &[u32], p: usize) -> u64 {
        let q = self.q() as u64;
        let mut v = 0u64;
        for &c in &coords[p + 1..] {
            v = v * q + c as u64;
        }
        self.offsets[self.dim - p] + v + 1
    }

    pub fn point_at(&self, index: u64) -> Result<ProjPoint> {
        if index < 1 || index > self.point_count {
            return Err(Error::IndexOutOfRange {
                index,
                count: self.point_count,
            });
        }
        let mut coords = vec![0u32; self.coord_len()];
        self.decode_into(index, &mut coords);
        Ok(ProjPoint { index, coords })
    }

    /// Writes the coordinates of point `index` (assumed in range) into `out`.
    pub(crate) fn decode_into(&self, index: u64, out: &mut [u32]) {
        let z = index - 1;
        // largest m with offsets[m] <= z gives the leading position dim - m
        let m = self.offsets.partition_point(|&o| o <= z) - 1;
        let lead = self.dim - m;
        let mut v = z - self.offsets[m];
        out[..lead].fill(0);
        out[lead] = 1;
        let q = self.q() as u64;
        for x in out[lead + 1..].iter_mut().rev() {
            *x = (v % q) as u32;
            v /= q;
        }
    }

    /// Iterates all points in index order.
    pub fn points(&self) -> impl Iterator<Item = ProjPoint> + '_ {
        (1..=self.point_count).map(move |i| self.point_at(i).unwrap())
    }

    fn check_point(&self, p: &ProjPoint) -> Result<()> {
        if p.coords.len() != self.coord_len() {
            return Err(Error::WrongLength {
                expected: self.coord_len(),
                found: p.coords.len(),
            });
        }
        Ok(())
    }

    /// All `q + 1` points on the line through `p` and `r`:
    /// `r` itself and the normalizations of `p + t*r` for `t` in `F_q`.
    pub fn line_points(&self, p: &ProjPoint, r: &ProjPoint) -> Result<Vec<ProjPoint>> {
        self.check_point(p)?;
        self.check_point(r)?;
        if p.index == r.index {
            return Err(Error::SamePoint);
        }
        let f = &self.field;
        let mut out = Vec::with_capacity(self.q() as usize + 1);
        out.push(r.clone());
        let mut v = vec![0u32; self.coord_len()];
        for t in 0..self.q() {
            for (x, (&a, &b)) in v.iter_mut().zip(p.coords.iter().zip(r.coords.iter())) {
                *x = f.add_raw(a, f.mul_raw(t, b));
            }
            out.push(self.normalize(&v)?);
        }
        debug_assert!({
            let mut ids: Vec<u64> = out.iter().map(|x| x.index).collect();
            ids.sort_unstable();
            ids.windows(2).all(|w| w[0] != w[1])
        });
        Ok(out)
    }

    /// Whether three pairwise distinct points lie on a common line, decided
    /// by the rank of their coordinate matrix.
    pub fn collinear(&self, a: &ProjPoint, b: &ProjPoint, c: &ProjPoint) -> Result<bool> {
        for p in [a, b, c] {
            self.check_point(p)?;
        }
        if a.index == b.index || a.index == c.index || b.index == c.index {
            return Err(Error::DuplicatePoints);
        }
        Ok(linalg::rank(&self.field, &[&a.coords, &b.coords, &c.coords]) <= 2)
    }

    /// Visits every point of the line through the distinct normalized
    /// vectors `a` and `b`, passing its index and normalized coordinates.
    ///
    /// The pair is first reduced to `x`, `y` with `pivot(x) < pivot(y)`; the
    /// line is then `y` together with `x + t*y`, all already normalized, so
    /// the loop body is additions only.
    #[inline]
    pub(crate) fn for_each_on_line(&self, a: &[u32], b: &[u32], mut visit: impl FnMut(u64, &[u32])) {
        let n = self.coord_len();
        let f = &self.field;
        let mut x = [0u32; MAX_COORDS];
        let mut y = [0u32; MAX_COORDS];
        let pa = pivot(a).unwrap();
        let pb = pivot(b).unwrap();
        let (px, py);
        if pa == pb {
            x[..n].copy_from_slice(b);
            for i in 0..n {
                y[i] = f.sub_raw(a[i], b[i]);
            }
            let p = pivot(&y[..n]).expect("distinct points");
            let inv = f.inv_raw(y[p]);
            for v in y[p..n].iter_mut() {
                *v = f.mul_raw(*v, inv);
            }
            px = pa;
            py = p;
        } else if pa < pb {
            x[..n].copy_from_slice(a);
            y[..n].copy_from_slice(b);
            px = pa;
            py = pb;
        } else {
            x[..n].copy_from_slice(b);
            y[..n].copy_from_slice(a);
            px = pb;
            py = pa;
        }
        visit(self.rank_with_pivot(&y[..n], py), &y[..n]);
        for _ in 0..self.q() {
            visit(self.rank_with_pivot(&x[..n], px), &x[..n]);
            for i in py..n {
                x[i] = f.add_raw(x[i], y[i]);
            }
        }
    }

    /// Like [`Self::for_each_on_line`] but passes indices only. After the
    /// first point of `x + t*y` the index is updated from the place values
    /// of the changing coordinates instead of being recomputed.
    #[inline]
    pub(crate) fn for_each_index_on_line(&self, a: &[u32], b: &[u32], mut visit: impl FnMut(u64)) {
        match self.coord_len() {
            3 => self.walk_fixed::<3>(a, b, visit),
            4 => self.walk_fixed::<4>(a, b, visit),
            5 => self.walk_fixed::<5>(a, b, visit),
            6 => self.walk_fixed::<6>(a, b, visit),
            _ => self.for_each_on_line(a, b, |i, _| visit(i)),
        }
    }

    #[inline(always)]
    fn walk_fixed<const L: usize>(&self, a: &[u32], b: &[u32], mut visit: impl FnMut(u64)) {
        let f = &self.field;
        let q = self.q();
        let a: &[u32; L] = a.try_into().unwrap();
        let b: &[u32; L] = b.try_into().unwrap();
        let pa = pivot(a).unwrap();
        let pb = pivot(b).unwrap();
        let (mut x, mut y, px, py);
        if pa == pb {
            x = *b;
            y = [0u32; L];
            for i in 0..L {
                y[i] = f.sub_raw(a[i], b[i]);
            }
            let p = pivot(&y).expect("distinct points");
            let inv = f.inv_raw(y[p]);
            for v in y[p + 1..].iter_mut() {
                *v = f.mul_raw(*v, inv);
            }
            y[p] = 1;
            px = pa;
            py = p;
        } else if pa < pb {
            (x, y, px, py) = (*a, *b, pa, pb);
        } else {
            (x, y, px, py) = (*b, *a, pb, pa);
        }
        visit(self.rank_with_pivot(&y, py));
        let idx = self.rank_with_pivot(&x, px);
        visit(idx);
        let mut yw = [0u64; L];
        let mut qw = [0u64; L];
        for i in 0..L {
            yw[i] = y[i] as u64 * self.weights[i];
            qw[i] = q as u64 * self.weights[i];
        }
        // y is zero before py, so those coordinates never move
        match py {
            0 => walk_from::<L, 0>(q, &mut x, &y, &yw, &qw, idx, visit),
            1 => walk_from::<L, 1>(q, &mut x, &y, &yw, &qw, idx, visit),
            2 => walk_from::<L, 2>(q, &mut x, &y, &yw, &qw, idx, visit),
            _ => walk_from::<L, 3>(q, &mut x, &y, &yw, &qw, idx, visit),
        }
    }
}

/// Steps `x` through `x + t*y`, `t = 1..q`, updating `idx` from the place
/// values of coordinates `S..L`; requires `y[i] = 0` for `i < S`.
#[inline(always)]
fn walk_from<const L: usize, const S: usize>(
    q: u32,
    x: &mut [u32; L],
    y: &[u32; L],
    yw: &[u64; L],
    qw: &[u64; L],
    mut idx: u64,
    mut visit: impl FnMut(u64),
) {
    let start = S.min(L - 1);
    for _ in 1..q {
        for i in start..L {
            let c = x[i] + y[i];
            let wrap = c >= q;
            x[i] = if wrap { c - q } else { c };
            idx = idx + yw[i] - if wrap { qw[i] } else { 0 };
        }
        visit(idx);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_xoshiro::SplitMix64;
    use std::collections::BTreeSet;

    /// All normalized tuples in lexicographic order, by brute force.
    fn lex_enumeration(dim: usize, q: u32) -> Vec<Vec<u32>> {
        let n = dim + 1;
        let total = (q as u64).pow(n as u32);
        let mut out = Vec::new();
        for code in 0..total {
            let mut v = vec![0u32; n];
            let mut c = code;
            for x in v.iter_mut().rev() {
                *x = (c % q as u64) as u32;
                c /= q as u64;
            }
            if let Some(p) = v.iter().position(|&x| x != 0) {
                if v[p] == 1 {
                    out.push(v);
                }
            }
        }
        // base-q codes enumerate tuples lexicographically
        out
    }

    #[test]
    fn point_counts() {
        assert_eq!(ProjSpace::new(3, 2).unwrap().point_count(), 15);
        assert_eq!(ProjSpace::new(4, 3).unwrap().point_count(), 121);
        let big = ProjSpace::new(3, 7001).unwrap();
        assert_eq!(big.point_count() as u128, (7001u128.pow(4) - 1) / 7000);
        assert!(matches!(ProjSpace::new(1, 5), Err(Error::DimensionTooSmall(1))));
        assert!(matches!(ProjSpace::new(3, 9), Err(Error::NotPrime(9))));
        assert!(matches!(
            ProjSpace::new(20, 2147483647),
            Err(Error::SpaceTooLarge { .. })
        ));
    }

    #[test]
    fn normalize_examples() {
        let s = ProjSpace::new(3, 5).unwrap();
        assert_eq!(s.normalize(&[0, 2, 3, 1]).unwrap().coords(), &[0, 1, 4, 3]);
        let s7 = ProjSpace::new(3, 7).unwrap();
        assert_eq!(s7.normalize(&[1, 4, 0, 6]).unwrap().coords(), &[1, 4, 0, 6]);
        assert!(matches!(s7.normalize(&[0, 0, 0, 0]), Err(Error::ZeroVector)));
        assert!(matches!(
            s.normalize(&[0, 0, 7, 1]),
            Err(Error::CoordinateOutOfRange { value: 7, q: 5 })
        ));
        assert!(matches!(s.index_of(&[0, 2, 0, 0]), Err(Error::NotNormalized)));
    }

    #[test]
    fn pg32_ranks() {
        let s = ProjSpace::new(3, 2).unwrap();
        let lex = lex_enumeration(3, 2);
        assert_eq!(lex.len(), 15);
        assert_eq!(s.point_at(1).unwrap().coords(), &[0, 0, 0, 1]);
        assert_eq!(s.index_of(&[1, 0, 0, 0]).unwrap(), 8);
        assert_eq!(s.index_of(&[0, 0, 1, 1]).unwrap(), 3);
        let pos = |v: &[u32]| lex.iter().position(|w| w == v).unwrap() as u64 + 1;
        assert_eq!(pos(&[1, 0, 0, 0]), 8);
        assert_eq!(pos(&[0, 0, 1, 1]), 3);
        assert!(matches!(s.point_at(0), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(s.point_at(16), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn lex_order_matches_enumeration() {
        for (dim, q) in [(2, 2), (2, 13), (3, 2), (3, 3), (3, 7), (3, 13), (4, 2), (4, 3), (4, 5)] {
            let s = ProjSpace::new(dim, q).unwrap();
            let lex = lex_enumeration(dim, q as u32);
            assert_eq!(lex.len() as u64, s.point_count());
            for (i, v) in lex.iter().enumerate() {
                let idx = i as u64 + 1;
                assert_eq!(s.point_at(idx).unwrap().coords(), v.as_slice());
                assert_eq!(s.index_of(v).unwrap(), idx);
            }
        }
    }

    #[test]
    fn round_trip_sampled_large() {
        let s = ProjSpace::new(3, 4673).unwrap();
        let mut rng = SplitMix64::seed_from_u64(5);
        for _ in 0..10_000 {
            let i = rng.gen_range(1..=s.point_count());
            let p = s.point_at(i).unwrap();
            assert_eq!(s.index_of(p.coords()).unwrap(), i);
        }
        assert_eq!(s.point_at(s.point_count()).unwrap().coords(), &[1, 4672, 4672, 4672]);
    }

    #[test]
    fn scale_invariance() {
        for q in [2u64, 3, 5, 7, 11, 13] {
            let s = ProjSpace::new(2, q).unwrap();
            let f = s.field().clone();
            for p in s.points() {
                for lambda in 1..q as u32 {
                    let scaled: Vec<u32> = p.coords().iter().map(|&c| f.mul_raw(c, lambda)).collect();
                    assert_eq!(s.normalize(&scaled).unwrap(), p);
                }
            }
        }
    }

    #[test]
    fn line_examples() {
        let s = ProjSpace::new(3, 2).unwrap();
        let a = s.point(&[0, 0, 0, 1]).unwrap();
        let b = s.point(&[0, 0, 1, 0]).unwrap();
        let line: BTreeSet<Vec<u32>> = s
            .line_points(&a, &b)
            .unwrap()
            .into_iter()
            .map(|p| p.coords().to_vec())
            .collect();
        let expected: BTreeSet<Vec<u32>> =
            [vec![0, 0, 0, 1], vec![0, 0, 1, 0], vec![0, 0, 1, 1]].into_iter().collect();
        assert_eq!(line, expected);
        assert!(matches!(s.line_points(&a, &a), Err(Error::SamePoint)));

        let c = s.point(&[0, 0, 1, 1]).unwrap();
        let d = s.point(&[0, 1, 0, 0]).unwrap();
        assert!(s.collinear(&a, &b, &c).unwrap());
        assert!(!s.collinear(&a, &b, &d).unwrap());
        assert!(matches!(s.collinear(&a, &a, &d), Err(Error::DuplicatePoints)));
    }

    #[test]
    fn lines_symmetric_and_sized() {
        let s = ProjSpace::new(3, 5).unwrap();
        let s3 = ProjSpace::new(3, 3).unwrap();
        let mut rng = SplitMix64::seed_from_u64(9);
        for _ in 0..100 {
            let i = rng.gen_range(1..=s.point_count());
            let j = rng.gen_range(1..=s.point_count());
            if i == j {
                continue;
            }
            let (p, r) = (s.point_at(i).unwrap(), s.point_at(j).unwrap());
            let l1: BTreeSet<u64> = s.line_points(&p, &r).unwrap().iter().map(|x| x.index()).collect();
            let l2: BTreeSet<u64> = s.line_points(&r, &p).unwrap().iter().map(|x| x.index()).collect();
            assert_eq!(l1, l2);
            assert_eq!(l1.len(), 6);
            assert!(l1.contains(&i) && l1.contains(&j));

            let (a, b) = (1 + i % s3.point_count(), 1 + j % s3.point_count());
            if a != b {
                let l = s3.line_points(&s3.point_at(a).unwrap(), &s3.point_at(b).unwrap()).unwrap();
                assert_eq!(l.len(), 4);
            }
        }
    }

    #[test]
    fn collinear_against_rank_oracle() {
        let s = ProjSpace::new(3, 7).unwrap();
        let f = s.field().clone();
        let mut rng = SplitMix64::seed_from_u64(3);
        let n = s.point_count();
        for _ in 0..20 {
            let (i, j) = (rng.gen_range(1..=n), rng.gen_range(1..=n));
            if i == j {
                continue;
            }
            let (p, r) = (s.point_at(i).unwrap(), s.point_at(j).unwrap());
            let line = s.line_points(&p, &r).unwrap();
            let on: BTreeSet<u64> = line.iter().map(|x| x.index()).collect();
            for x in line.iter().filter(|x| x.index() != i && x.index() != j) {
                assert!(s.collinear(&p, &r, x).unwrap());
            }
            let mut off = 0;
            while off < 50 {
                let k = rng.gen_range(1..=n);
                if on.contains(&k) {
                    continue;
                }
                let x = s.point_at(k).unwrap();
                assert!(!s.collinear(&p, &r, &x).unwrap());
                assert_eq!(linalg::rank(&f, &[p.coords(), r.coords(), x.coords()]), 3);
                off += 1;
            }
        }
    }

    /// The line through two points is the set of points inside their row
    /// space, and it is the only line holding both.
    #[test]
    fn unique_line_through_two_points() {
        for (dim, q) in [(2, 7), (3, 3), (3, 5), (3, 7)] {
            let s = ProjSpace::new(dim, q).unwrap();
            let f = s.field().clone();
            let mut rng = SplitMix64::seed_from_u64(q);
            for _ in 0..15 {
                let (i, j) = (rng.gen_range(1..=s.point_count()), rng.gen_range(1..=s.point_count()));
                if i == j {
                    continue;
                }
                let (p, r) = (s.point_at(i).unwrap(), s.point_at(j).unwrap());
                let span: BTreeSet<u64> = s
                    .points()
                    .filter(|x| linalg::rank(&f, &[p.coords(), r.coords(), x.coords()]) == 2)
                    .map(|x| x.index())
                    .collect();
                let line: BTreeSet<u64> = s.line_points(&p, &r).unwrap().iter().map(|x| x.index()).collect();
                assert_eq!(span, line);
                // any other pair on the same line spans the same line
                let on: Vec<u64> = line.iter().copied().collect();
                let (u, w) = (s.point_at(on[0]).unwrap(), s.point_at(on[on.len() - 1]).unwrap());
                let again: BTreeSet<u64> = s.line_points(&u, &w).unwrap().iter().map(|x| x.index()).collect();
                assert_eq!(again, line);
            }
        }
    }

    #[test]
    fn fast_line_walk_matches_line_points() {
        let mut rng = SplitMix64::seed_from_u64(21);
        for (dim, q) in [(3, 2), (3, 5), (3, 13), (4, 3), (4, 7), (2, 31), (5, 5), (3, 4673)] {
            let s = ProjSpace::new(dim, q).unwrap();
            for _ in 0..200 {
                let (i, j) = (rng.gen_range(1..=s.point_count()), rng.gen_range(1..=s.point_count()));
                if i == j {
                    continue;
                }
                let (p, r) = (s.point_at(i).unwrap(), s.point_at(j).unwrap());
                let slow: BTreeSet<u64> = s.line_points(&p, &r).unwrap().iter().map(|x| x.index()).collect();
                let mut fast = Vec::new();
                s.for_each_on_line(p.coords(), r.coords(), |idx, c| {
                    assert_eq!(s.index_of(c).unwrap(), idx);
                    fast.push(idx);
                });
                assert_eq!(fast.len(), q as usize + 1);
                assert_eq!(fast.iter().copied().collect::<BTreeSet<_>>(), slow);
                let mut by_index = Vec::new();
                s.for_each_index_on_line(p.coords(), r.coords(), |idx| by_index.push(idx));
                assert_eq!(by_index.len(), q as usize + 1);
                assert_eq!(by_index.into_iter().collect::<BTreeSet<_>>(), slow);
            }
        }
    }
}
