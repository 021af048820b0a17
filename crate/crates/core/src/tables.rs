//! Bundled reference sizes of complete caps in `PG(3,q)` and `PG(4,q)`.
//!
//! Each table is a `q,size` CSV file; `manifest.csv` records the expected
//! row count and SHA-256 of every file and is checked on load.

use std::fmt;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::is_prime;

/// Which construction a table records.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    /// Lexicographic caps.
    L,
    /// Randomized greedy caps.
    G,
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tag::L => "L",
            Tag::G => "G",
        })
    }
}

impl FromStr for Tag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "L" | "l" => Ok(Tag::L),
            "G" | "g" => Ok(Tag::G),
            _ => Err(Error::DataCorrupt(format!("unknown tag `{s}`"))),
        }
    }
}

const MANIFEST: &str = include_str!("../data/manifest.csv");

fn raw_table(n: usize, tag: Tag) -> Option<&'static str> {
    Some(match (n, tag) {
        (3, Tag::L) => include_str!("../data/t2_n3_L.csv"),
        (3, Tag::G) => include_str!("../data/t2_n3_G.csv"),
        (4, Tag::L) => include_str!("../data/t2_n4_L.csv"),
        (4, Tag::G) => include_str!("../data/t2_n4_G.csv"),
        _ => return None,
    })
}

/// The q values a table covers: all primes up to `max_prime`, the listed
/// extra primes, minus the primes absent from the source listing.
struct Coverage {
    max_prime: u64,
    extra: &'static [u64],
    missing: &'static [u64],
}

fn coverage(n: usize, tag: Tag) -> Coverage {
    match (n, tag) {
        (3, Tag::L) => Coverage { max_prime: 4673, extra: &[5003, 6007, 7001, 8009], missing: &[] },
        (3, Tag::G) => Coverage { max_prime: 3701, extra: &[3803, 3907, 4001, 4289], missing: &[] },
        // the published listing skips q = 1069 and q = 1327
        (4, Tag::L) => Coverage { max_prime: 1361, extra: &[1409], missing: &[1069, 1327] },
        _ => Coverage { max_prime: 463, extra: &[], missing: &[] },
    }
}

impl Coverage {
    fn expected(&self) -> Vec<u64> {
        (2..=self.max_prime)
            .filter(|&p| is_prime(p) && !self.missing.contains(&p))
            .chain(self.extra.iter().copied())
            .collect()
    }
}

/// Sizes `t(N, q)` for one construction, sorted by `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReferenceTable {
    pub n: usize,
    pub tag: Tag,
    pub entries: Vec<(u64, u64)>,
}

impl ReferenceTable {
    pub fn get(&self, q: u64) -> Option<u64> {
        self.entries
            .binary_search_by_key(&q, |e| e.0)
            .ok()
            .map(|i| self.entries[i].1)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn qs(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.iter().map(|e| e.0)
    }
}

/// Parses `q,size` CSV text with a header line.
pub fn parse_table_csv(text: &str) -> Result<Vec<(u64, u64)>> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some("q,size") {
        return Err(Error::DataCorrupt("missing `q,size` header".into()));
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let bad = || Error::DataCorrupt(format!("row {}: `{l}`", i + 1));
            let (q, s) = l.split_once(',').ok_or_else(bad)?;
            Ok((q.trim().parse().map_err(|_| bad())?, s.trim().parse().map_err(|_| bad())?))
        })
        .collect()
}

fn manifest_entry(n: usize, tag: Tag) -> Result<(usize, String)> {
    for line in MANIFEST.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() == 4 && f[0] == n.to_string() && f[1] == tag.to_string() {
            let rows = f[2].parse().map_err(|_| Error::DataCorrupt(format!("manifest row `{line}`")))?;
            return Ok((rows, f[3].to_string()));
        }
    }
    Err(Error::DataCorrupt(format!("manifest has no entry for N={n}, tag={tag}")))
}

/// Loads and checks a bundled table.
pub fn load_table(n: usize, tag: Tag) -> Result<ReferenceTable> {
    let raw = raw_table(n, tag).ok_or(Error::UnknownTable(n))?;
    let (rows, sha) = manifest_entry(n, tag)?;
    let actual = hex::encode(Sha256::digest(raw.as_bytes()));
    if actual != sha {
        return Err(Error::DataCorrupt(format!("N={n} {tag}: checksum {actual} does not match manifest")));
    }
    let entries = parse_table_csv(raw)?;
    if entries.len() != rows {
        return Err(Error::DataCorrupt(format!(
            "N={n} {tag}: {} rows, manifest says {rows}",
            entries.len()
        )));
    }
    check_entries(n, tag, &entries)?;
    Ok(ReferenceTable { n, tag, entries })
}

fn check_entries(n: usize, tag: Tag, entries: &[(u64, u64)]) -> Result<()> {
    if let Some(w) = entries.windows(2).find(|w| w[0].0 >= w[1].0) {
        return Err(Error::DataCorrupt(format!("q not increasing at {}", w[1].0)));
    }
    if let Some(&(q, _)) = entries.iter().find(|e| !is_prime(e.0)) {
        return Err(Error::DataCorrupt(format!("{q} is not prime")));
    }
    let qs: Vec<u64> = entries.iter().map(|e| e.0).collect();
    if qs != coverage(n, tag).expected() {
        return Err(Error::DataCorrupt(format!("N={n} {tag}: q set differs from the expected primes")));
    }
    Ok(())
}

/// One computed size next to its reference value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ComparisonRow {
    pub q: u64,
    pub computed: u64,
    pub reference: u64,
}

impl ComparisonRow {
    pub fn delta(&self) -> i64 {
        self.computed as i64 - self.reference as i64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonReport {
    pub n: usize,
    pub tag: Tag,
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonReport {
    /// Rows whose size differs from the reference.
    pub fn mismatches(&self) -> impl Iterator<Item = &ComparisonRow> {
        self.rows.iter().filter(|r| r.delta() != 0)
    }

    /// Lexicap sizes are deterministic, so an `L` comparison passes only on
    /// exact agreement. `G` comparisons always pass; see [`Self::summary`].
    pub fn passed(&self) -> bool {
        self.tag == Tag::G || self.mismatches().next().is_none()
    }

    pub fn summary(&self) -> DeltaSummary {
        let mut s = DeltaSummary::default();
        for r in &self.rows {
            match r.delta() {
                d if d < 0 => s.smaller += 1,
                0 => s.equal += 1,
                _ => s.larger += 1,
            }
        }
        let deltas = self.rows.iter().map(ComparisonRow::delta);
        s.min = deltas.clone().min().unwrap_or(0);
        s.max = deltas.clone().max().unwrap_or(0);
        s.total = deltas.sum();
        s
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("q,computed,reference,delta,match\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{},{}\n", r.q, r.computed, r.reference, r.delta(), r.delta() == 0));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DeltaSummary {
    pub smaller: usize,
    pub equal: usize,
    pub larger: usize,
    pub min: i64,
    pub max: i64,
    pub total: i64,
}

/// Compares computed `(q, size)` pairs against a bundled table.
pub fn compare(computed: &[(u64, u64)], n: usize, tag: Tag) -> Result<ComparisonReport> {
    compare_with(computed, &load_table(n, tag)?)
}

pub fn compare_with(computed: &[(u64, u64)], table: &ReferenceTable) -> Result<ComparisonReport> {
    let rows = computed
        .iter()
        .map(|&(q, size)| {
            let reference = table.get(q).ok_or(Error::UnknownQ(q))?;
            Ok(ComparisonRow { q, computed: size, reference })
        })
        .collect::<Result<_>>()?;
    Ok(ComparisonReport { n: table.n, tag: table.tag, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_tables_load() {
        for (n, tag, rows) in [(3, Tag::L, 636), (3, Tag::G, 521), (4, Tag::L, 217), (4, Tag::G, 90)] {
            assert_eq!(load_table(n, tag).unwrap().len(), rows, "N={n} {tag}");
        }
        assert!(matches!(load_table(5, Tag::L), Err(Error::UnknownTable(5))));
    }

    #[test]
    fn corrupt_rows_rejected() {
        let good = parse_table_csv(raw_table(4, Tag::G).unwrap()).unwrap();
        assert!(check_entries(4, Tag::G, &good).is_ok());
        let mut swapped = good.clone();
        swapped.swap(3, 4);
        assert!(check_entries(4, Tag::G, &swapped).is_err());
        let mut dropped = good.clone();
        dropped.remove(10);
        assert!(check_entries(4, Tag::G, &dropped).is_err());
        let mut composite = good;
        composite[1].0 = 4;
        assert!(check_entries(4, Tag::G, &composite).is_err());
        assert!(parse_table_csv("q,size\n5,x\n").is_err());
        assert!(parse_table_csv("5,16\n").is_err());
    }

    #[test]
    fn comparison() {
        let r = compare(&[(5, 17), (7, 23)], 3, Tag::L).unwrap();
        assert_eq!(r.rows[0].delta(), 1);
        assert!(!r.passed());
        assert_eq!(r.mismatches().count(), 1);
        let g = compare(&[(7, 18)], 3, Tag::G).unwrap();
        assert_eq!(g.rows[0].delta(), 1);
        assert!(g.passed());
        assert_eq!(g.summary().larger, 1);
        assert!(matches!(compare(&[(4, 10)], 3, Tag::L), Err(Error::UnknownQ(4))));
    }
}
