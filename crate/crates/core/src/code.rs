//! Linear codes whose parity-check matrix has the points of a cap as
//! columns.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::cap::Cap;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{rank, EchelonBasis};

/// Largest number of subset combinations a distance search may examine.
pub const SEARCH_BUDGET: u64 = 2_000_000_000;
/// Largest syndrome space the covering-radius enumeration accepts.
pub const SYNDROME_LIMIT: u64 = 100_000_000;

/// An `(N+1) x n` matrix over `F_q`, stored by columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityCheck {
    field: Field,
    rows: usize,
    cols: Vec<Vec<u32>>,
}

impl ParityCheck {
    pub fn from_columns(q: u64, rows: usize, cols: Vec<Vec<u32>>) -> Result<Self> {
        let field = Field::new(q)?;
        if cols.is_empty() {
            return Err(Error::EmptyCap);
        }
        for c in &cols {
            if c.len() != rows {
                return Err(Error::WrongLength { expected: rows, found: c.len() });
            }
            if let Some(&v) = c.iter().find(|&&v| v >= field.order()) {
                return Err(Error::CoordinateOutOfRange { value: v as u64, q: field.order() });
            }
        }
        Ok(ParityCheck { field, rows, cols })
    }

    pub fn q(&self) -> u32 {
        self.field.order()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Code length.
    pub fn n(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, j: usize) -> &[u32] {
        &self.cols[j]
    }

    pub fn rank(&self) -> usize {
        let rows: Vec<&[u32]> = self.cols.iter().map(|c| c.as_slice()).collect();
        rank(&self.field, &rows)
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.rows
    }

    /// Rows of space-separated entries.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for i in 0..self.rows {
            let row: Vec<String> = self.cols.iter().map(|c| c[i].to_string()).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }

    /// Scales `v` to make its leading entry 1 and packs it base `q`.
    fn key(&self, v: &mut [u32]) -> Option<u128> {
        let p = v.iter().position(|&x| x != 0)?;
        let inv = self.field.inv_raw(v[p]);
        let q = self.q() as u128;
        let mut k = 0u128;
        for x in v.iter_mut() {
            *x = self.field.mul_raw(*x, inv);
            k = k * q + *x as u128;
        }
        Some(k)
    }

    /// `a + t b` into `out`.
    fn axpy(&self, a: &[u32], t: u32, b: &[u32], out: &mut [u32]) {
        for ((o, &x), &y) in out.iter_mut().zip(a).zip(b) {
            *o = self.field.add_raw(x, self.field.mul_raw(t, y));
        }
    }
}

/// The parity-check matrix of `cap`: column `j` holds the coordinates of
/// point `j`.
pub fn parity_check(cap: &Cap) -> Result<ParityCheck> {
    if cap.is_empty() {
        return Err(Error::EmptyCap);
    }
    let cols = cap.points().iter().map(|p| p.coords().to_vec()).collect();
    ParityCheck::from_columns(cap.q() as u64, cap.dim() + 1, cols)
}

/// Result of a bounded minimum-distance search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Distance {
    Exactly(usize),
    /// No dependent set of fewer columns exists.
    AtLeast(usize),
}

impl Distance {
    /// The distance, or its lower bound.
    pub fn lower_bound(self) -> usize {
        match self {
            Distance::Exactly(d) | Distance::AtLeast(d) => d,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Exactly(d) => write!(f, "{d}"),
            Distance::AtLeast(d) => write!(f, ">={d}"),
        }
    }
}

fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

fn budget(what: &str, cost: u64) -> Result<()> {
    if cost > SEARCH_BUDGET {
        return Err(Error::TooLarge(format!("{what} needs about {cost} steps")));
    }
    Ok(())
}

/// Smallest number `w <= limit` of linearly dependent columns, i.e. the
/// minimum distance of the code, or `AtLeast(limit + 1)`.
pub fn min_distance(h: &ParityCheck, limit: usize) -> Result<Distance> {
    let n = h.n();
    let q = h.q();
    let mut buf = vec![0u32; h.rows];

    if h.cols.iter().any(|c| c.iter().all(|&x| x == 0)) {
        return Ok(Distance::Exactly(1));
    }
    if limit < 2 {
        return Ok(Distance::AtLeast(2));
    }
    let mut col_keys = HashSet::with_capacity(n);
    for c in &h.cols {
        buf.copy_from_slice(c);
        if !col_keys.insert(h.key(&mut buf).unwrap()) {
            return Ok(Distance::Exactly(2));
        }
    }
    if limit < 3 {
        return Ok(Distance::AtLeast(3));
    }

    // points on the line through two columns, other than the columns
    let pairs = binom(n as u64, 2);
    budget("the triple search", pairs * (q as u64 - 1))?;
    let mut interior = HashSet::new();
    let mut third_hit = false;
    let mut fourth_hit = false;
    'pairs: for i in 0..n {
        for j in i + 1..n {
            for t in 1..q {
                h.axpy(&h.cols[i], t, &h.cols[j], &mut buf);
                let k = h.key(&mut buf).unwrap();
                if col_keys.contains(&k) {
                    third_hit = true;
                    break 'pairs;
                }
                if !interior.insert(k) {
                    fourth_hit = true;
                }
            }
        }
    }
    if third_hit {
        return Ok(Distance::Exactly(3));
    }
    // with no dependent triple, two pairs meeting off the columns are
    // disjoint and span a dependent 4-set
    if limit < 4 {
        return Ok(Distance::AtLeast(4));
    }
    if fourth_hit {
        return Ok(Distance::Exactly(4));
    }
    if limit < 5 {
        return Ok(Distance::AtLeast(5));
    }

    let q1 = q as u64 - 1;
    budget("the 5-set search", binom(n as u64, 3).saturating_mul(q1 * q1))?;
    let mut ab = vec![0u32; h.rows];
    for i in 0..n {
        for j in i + 1..n {
            for b in 1..q {
                h.axpy(&h.cols[i], b, &h.cols[j], &mut ab);
                for k in j + 1..n {
                    for c in 1..q {
                        h.axpy(&ab, c, &h.cols[k], &mut buf);
                        if let Some(key) = h.key(&mut buf) {
                            if interior.contains(&key) {
                                return Ok(Distance::Exactly(5));
                            }
                        }
                    }
                }
            }
        }
    }
    if limit < 6 {
        return Ok(Distance::AtLeast(6));
    }

    for w in 6..=limit {
        budget("the subset search", binom(n as u64, w as u64 - 1).saturating_mul(n as u64))?;
        let mut basis = EchelonBasis::new();
        if dependent_subset(h, &mut basis, 0, w) {
            return Ok(Distance::Exactly(w));
        }
    }
    Ok(Distance::AtLeast(limit + 1))
}

/// Depth-first search for `w` dependent columns extending an independent
/// set held in `basis`, using columns from `from` on.
fn dependent_subset(h: &ParityCheck, basis: &mut EchelonBasis, from: usize, w: usize) -> bool {
    for j in from..h.n() {
        if basis.len() + 1 == w {
            let mut v = h.cols[j].clone();
            if basis.reduce(&h.field, &mut v) {
                return true;
            }
        } else if basis.insert(&h.field, &h.cols[j]) {
            let found = dependent_subset(h, basis, j + 1, w);
            basis.pop();
            if found {
                return true;
            }
        }
    }
    false
}

/// Covering radius of the code: the largest number of columns needed to
/// write a syndrome in the column space of `h`.
pub fn covering_radius(h: &ParityCheck) -> Result<usize> {
    let q = h.q() as u64;
    let total = (q as u128).checked_pow(h.rows as u32).filter(|&t| t <= SYNDROME_LIMIT as u128);
    let Some(total) = total else {
        return Err(Error::TooLarge(format!("{q}^{} syndromes", h.rows)));
    };
    let total = total as usize;
    let reachable = q.pow(h.rank() as u32) as usize;
    const UNSET: u8 = u8::MAX;
    let mut dist = vec![UNSET; total];
    let enc = |v: &[u32]| v.iter().fold(0usize, |a, &x| a * q as usize + x as usize);
    dist[0] = 0;
    let mut reached = 1usize;
    if reachable == 1 {
        return Ok(0);
    }

    let multiples: Vec<Vec<u32>> = h
        .cols
        .iter()
        .flat_map(|c| (1..q as u32).map(move |a| c.iter().map(|&x| h.field.mul_raw(a, x)).collect()))
        .collect();
    let mark = |code: usize, d: u8, dist: &mut [u8]| {
        let fresh = dist[code] == UNSET;
        if fresh {
            dist[code] = d;
        }
        fresh as usize
    };
    for m in &multiples {
        reached += mark(enc(m), 1, &mut dist);
    }
    let mut radius = 1;
    if reached < reachable {
        radius = 2;
        let mut buf = vec![0u32; h.rows];
        let per_col = q as usize - 1;
        for i in 0..multiples.len() {
            // skip multiples of the same column
            let first_other = (i / per_col + 1) * per_col;
            for b in &multiples[first_other..] {
                for ((o, &x), &y) in buf.iter_mut().zip(&multiples[i]).zip(b) {
                    *o = h.field.add_raw(x, y);
                }
                reached += mark(enc(&buf), 2, &mut dist);
            }
        }
    }
    let mut digits = vec![0u32; h.rows];
    let mut buf = vec![0u32; h.rows];
    while reached < reachable {
        radius += 1;
        let prev = (radius - 1) as u8;
        let mut fresh = Vec::new();
        for s in 0..total {
            if dist[s] != UNSET {
                continue;
            }
            let mut x = s;
            for d in digits.iter_mut().rev() {
                *d = (x % q as usize) as u32;
                x /= q as usize;
            }
            let hit = multiples.iter().any(|m| {
                for ((o, &a), &b) in buf.iter_mut().zip(&digits).zip(m) {
                    *o = h.field.sub_raw(a, b);
                }
                dist[enc(&buf)] == prev
            });
            if hit {
                fresh.push(s);
            }
        }
        if fresh.is_empty() {
            return Err(Error::VerificationFailed("syndrome enumeration stalled".into()));
        }
        for s in fresh {
            dist[s] = radius as u8;
            reached += 1;
        }
    }
    Ok(radius)
}

/// `sum_{i<=r} (q-1)^i C(n,i) / q^(n-k)`, exactly and as a double.
#[derive(Clone, Debug, PartialEq)]
pub struct Density {
    pub exact: BigRational,
    pub value: f64,
}

impl Density {
    pub fn is_one(&self) -> bool {
        self.exact.is_one()
    }
}

impl fmt::Display for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({:.6})", self.exact, self.value)
    }
}

pub fn covering_density(n: u64, k: u64, r: u64, q: u64) -> Result<Density> {
    if k > n || r > n || q < 2 {
        return Err(Error::DomainError(format!("covering density needs k <= n, r <= n, q >= 2; got n={n}, k={k}, r={r}, q={q}")));
    }
    let qm1 = BigUint::from(q - 1);
    let mut term = BigUint::one();
    let mut sum = BigUint::zero();
    for i in 0..=r {
        if i > 0 {
            term = term * &qm1 * BigUint::from(n - i + 1) / BigUint::from(i);
        }
        sum += &term;
    }
    let denom = BigUint::from(q).pow((n - k) as u32);
    let exact = BigRational::new(sum.into(), denom.into());
    let value = exact.to_f64().unwrap_or(f64::INFINITY);
    Ok(Density { exact, value })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CodeProfile {
    pub n: usize,
    pub k: usize,
    /// Rank of the parity-check matrix; `k = n - rank`.
    pub rank: usize,
    pub full_rank: bool,
    pub d: Distance,
    pub r: usize,
    pub mu: Density,
    /// `r <= floor((d-1)/2) + 1`. Perfect codes, where `r = floor((d-1)/2)`,
    /// are included.
    pub quasi_perfect: bool,
    /// `mu = 1`.
    pub perfect: bool,
}

impl fmt::Display for CodeProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n={} k={} d={} r={}", self.n, self.k, self.d, self.r)?;
        writeln!(f, "mu={}", self.mu)?;
        write!(f, "quasi_perfect={} perfect={} full_rank={}", self.quasi_perfect, self.perfect, self.full_rank)
    }
}

pub fn profile(cap: &Cap) -> Result<CodeProfile> {
    profile_matrix(&parity_check(cap)?, 5)
}

pub fn profile_matrix(h: &ParityCheck, limit: usize) -> Result<CodeProfile> {
    let n = h.n();
    let rank = h.rank();
    let k = n - rank;
    let d = min_distance(h, limit)?;
    let r = covering_radius(h)?;
    let mu = covering_density(n as u64, k as u64, r as u64, h.q() as u64)?;
    let t = (d.lower_bound() - 1) / 2;
    Ok(CodeProfile {
        n,
        k,
        rank,
        full_rank: rank == h.rows(),
        d,
        r,
        quasi_perfect: r <= t + 1,
        perfect: mu.is_one(),
        mu,
    })
}
