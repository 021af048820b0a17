//! The normalized size `beta = t / (q^((N-1)/2) sqrt(ln q))` and the two
//! upper-bound curves it is compared against.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_traits::Float;

use crate::error::{Error, Result};

/// Which size series a record belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SeriesTag {
    L,
    G,
    /// Pointwise minimum of `L` and `G`, `L` where no `G` value exists.
    Min,
}

impl fmt::Display for SeriesTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SeriesTag::L => "L",
            SeriesTag::G => "G",
            SeriesTag::Min => "Min",
        })
    }
}

impl FromStr for SeriesTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l" => Ok(SeriesTag::L),
            "g" => Ok(SeriesTag::G),
            "min" => Ok(SeriesTag::Min),
            _ => Err(Error::DomainError(format!("unknown series `{s}`, expected L, G or min"))),
        }
    }
}

fn cast<T: Float>(x: f64) -> T {
    T::from(x).unwrap()
}

/// `size / (q^((n-1)/2) sqrt(ln q))`.
pub fn beta<T: Float>(n: usize, q: u64, size: u64) -> Result<T> {
    if n < 2 || q < 2 || size < 1 {
        return Err(Error::DomainError(format!("beta needs N >= 2, q >= 2, size >= 1; got N={n}, q={q}, size={size}")));
    }
    Ok(cast::<T>(size as f64) / scale::<T>(n, q))
}

/// `q^((n-1)/2) sqrt(ln q)`.
fn scale<T: Float>(n: usize, q: u64) -> T {
    let q: T = cast(q as f64);
    q.powf(cast((n as f64 - 1.0) / 2.0)) * q.ln().sqrt()
}

/// `(sqrt(n+2), sqrt(n+1) + 1.3 / ln(2q))`.
pub fn bound_values<T: Float>(n: usize, q: u64) -> (T, T) {
    let n: T = cast(n as f64);
    let two_q: T = cast(2.0 * q as f64);
    ((n + cast(2.0)).sqrt(), (n + T::one()).sqrt() + cast::<T>(1.3) / two_q.ln())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundRecord<T = f64> {
    pub n: usize,
    pub q: u64,
    pub size: u64,
    pub tag: SeriesTag,
    pub beta: T,
    pub bound_const: T,
    pub bound_dec: T,
    pub holds_const: bool,
    pub holds_dec: bool,
}

pub type BoundRecordF64 = BoundRecord<f64>;

impl<T: Float> BoundRecord<T> {
    pub fn new(n: usize, q: u64, size: u64, tag: SeriesTag) -> Result<Self> {
        let beta = beta::<T>(n, q, size)?;
        let (bound_const, bound_dec) = bound_values::<T>(n, q);
        Ok(BoundRecord {
            n,
            q,
            size,
            tag,
            beta,
            bound_const,
            bound_dec,
            holds_const: beta < bound_const,
            holds_dec: beta < bound_dec,
        })
    }
}

/// Percentage differences for one `q`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PercentDiffs<T = f64> {
    /// `(t_L - t_G) / t_L * 100`, when a `G` record was given.
    pub pct_lg: Option<T>,
    /// `(sqrt(N+2) - beta) / sqrt(N+2) * 100`.
    pub pct_bound: T,
    /// The same quantity from sizes: `(sqrt(N+2) s - t) / (sqrt(N+2) s) * 100`
    /// with `s = q^((N-1)/2) sqrt(ln q)`.
    pub pct_bound_sizes: T,
}

pub type PercentDiffsF64 = PercentDiffs<f64>;

pub fn percent_diffs<T: Float>(l: &BoundRecord<T>, g: Option<&BoundRecord<T>>) -> Result<PercentDiffs<T>> {
    let hundred: T = cast(100.0);
    let pct_lg = match g {
        Some(g) if (g.n, g.q) != (l.n, l.q) => return Err(Error::MismatchedRecords),
        Some(g) => {
            let (tl, tg): (T, T) = (cast(l.size as f64), cast(g.size as f64));
            Some((tl - tg) / tl * hundred)
        }
        None => None,
    };
    let c = l.bound_const;
    let line = c * scale::<T>(l.n, l.q);
    Ok(PercentDiffs {
        pct_lg,
        pct_bound: (c - l.beta) / c * hundred,
        pct_bound_sizes: (line - cast(l.size as f64)) / line * hundred,
    })
}

/// Pointwise minimum of two `(q, size)` series; `q` values present in only
/// one of them keep that value.
pub fn min_series(l: &[(u64, u64)], g: &[(u64, u64)]) -> Vec<(u64, u64)> {
    let mut m: BTreeMap<u64, u64> = l.iter().copied().collect();
    for &(q, s) in g {
        m.entry(q).and_modify(|v| *v = (*v).min(s)).or_insert(s);
    }
    m.into_iter().collect()
}

/// One row of a curve file.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveRow<T = f64> {
    pub record: BoundRecord<T>,
    pub diffs: PercentDiffs<T>,
}

/// Records of series `tag` for dimension `n`, with the `L` vs `G`
/// difference filled in wherever both sizes are known.
pub fn series<T: Float>(n: usize, tag: SeriesTag, l: &[(u64, u64)], g: &[(u64, u64)]) -> Result<Vec<CurveRow<T>>> {
    let entries = match tag {
        SeriesTag::L => l.to_vec(),
        SeriesTag::G => g.to_vec(),
        SeriesTag::Min => min_series(l, g),
    };
    let lm: BTreeMap<u64, u64> = l.iter().copied().collect();
    let gm: BTreeMap<u64, u64> = g.iter().copied().collect();
    entries
        .into_iter()
        .map(|(q, size)| {
            let record = BoundRecord::<T>::new(n, q, size, tag)?;
            let mut diffs = percent_diffs(&record, None)?;
            if let (Some(&tl), Some(&tg)) = (lm.get(&q), gm.get(&q)) {
                let rl = BoundRecord::<T>::new(n, q, tl, SeriesTag::L)?;
                let rg = BoundRecord::<T>::new(n, q, tg, SeriesTag::G)?;
                diffs.pct_lg = percent_diffs(&rl, Some(&rg))?.pct_lg;
            }
            Ok(CurveRow { record, diffs })
        })
        .collect()
}

/// Decimal rendering with 12 significant digits.
pub fn fmt_sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let e = x.abs().log10().floor() as i32;
    let decimals = (11 - e).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // rounding can carry into a new leading digit, e.g. 9.9999999999995
    let digits = s.chars().filter(|c| c.is_ascii_digit()).skip_while(|&c| c == '0').count();
    if digits > 12 && decimals > 0 {
        format!("{x:.prec$}", prec = decimals - 1)
    } else {
        s
    }
}

pub const CURVE_HEADER: &str = "q,size,beta,bound_const,bound_dec,pct_LG,pct_bound";

/// Writes one curve as CSV. `pct_LG` is empty where no `G` value exists.
pub fn emit_curves<T: Float, W: Write>(rows: &[CurveRow<T>], mut sink: W) -> Result<()> {
    let f = |x: T| fmt_sig12(x.to_f64().unwrap());
    writeln!(sink, "{CURVE_HEADER}")?;
    for r in rows {
        let b = &r.record;
        writeln!(
            sink,
            "{},{},{},{},{},{},{}",
            b.q,
            b.size,
            f(b.beta),
            f(b.bound_const),
            f(b.bound_dec),
            r.diffs.pct_lg.map(f).unwrap_or_default(),
            f(r.diffs.pct_bound)
        )?;
    }
    Ok(())
}

pub fn curves_to_string<T: Float>(rows: &[CurveRow<T>]) -> String {
    let mut buf = Vec::new();
    emit_curves(rows, &mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

/// A row read back from a curve file.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParsedCurveRow {
    pub q: u64,
    pub size: u64,
    pub beta: f64,
    pub bound_const: f64,
    pub bound_dec: f64,
    pub pct_lg: Option<f64>,
    pub pct_bound: f64,
}

pub fn parse_curves(text: &str) -> Result<Vec<ParsedCurveRow>> {
    let mut lines = text.lines();
    if lines.next() != Some(CURVE_HEADER) {
        return Err(Error::ParseError { line: 1, message: "unexpected curve header".into() });
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let bad = || Error::ParseError { line: i + 2, message: format!("bad curve row `{line}`") };
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 7 {
                return Err(bad());
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
            Ok(ParsedCurveRow {
                q: f[0].parse().map_err(|_| bad())?,
                size: f[1].parse().map_err(|_| bad())?,
                beta: num(f[2])?,
                bound_const: num(f[3])?,
                bound_dec: num(f[4])?,
                pct_lg: if f[5].is_empty() { None } else { Some(num(f[5])?) },
                pct_bound: num(f[6])?,
            })
        })
        .collect()
}

/// Writes one `beta_N{n}_{tag}.csv` file per `(N, tag)` series found in
/// `rows` and returns the paths written.
pub fn emit_curve_files<T: Float>(rows: &[CurveRow<T>], dir: &std::path::Path) -> Result<Vec<std::path::PathBuf>> {
    let mut groups: BTreeMap<(usize, SeriesTag), Vec<CurveRow<T>>> = BTreeMap::new();
    for r in rows {
        groups.entry((r.record.n, r.record.tag)).or_default().push(*r);
    }
    let mut paths = Vec::new();
    for ((n, tag), mut g) in groups {
        g.sort_by_key(|r| r.record.q);
        let path = dir.join(format!("beta_N{n}_{tag}.csv"));
        emit_curves(&g, std::io::BufWriter::new(std::fs::File::create(&path)?))?;
        paths.push(path);
    }
    Ok(paths)
}

/// Which bound a record exceeds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    Constant,
    Decreasing,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Violation<T = f64> {
    pub n: usize,
    pub q: u64,
    pub tag: SeriesTag,
    pub kind: BoundKind,
    pub beta: T,
    pub bound: T,
}

/// Outcome of checking both bounds over a set of records.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundCheck<T = f64> {
    /// Violations inside the range where the bounds are claimed.
    pub failures: Vec<Violation<T>>,
    /// Violations at small `q` below that range.
    pub exceptions: Vec<Violation<T>>,
    pub checked: usize,
}

impl<T> BoundCheck<T> {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Smallest `q` from which the bounds are expected to hold: `q = 5` for
/// `N = 3`, `q = 3` for `N = 4`. The bounds concern the smallest known
/// caps, so a lexicap series alone is never expected to satisfy them
/// (its `N = 3` values exceed `sqrt(5)` up to `q = 17`).
pub fn verified_from(n: usize, tag: SeriesTag) -> Option<u64> {
    match (n, tag) {
        (_, SeriesTag::L) => None,
        (3, _) => Some(5),
        (4, _) => Some(3),
        _ => Some(2),
    }
}

pub fn check_bounds<T: Float>(records: &[BoundRecord<T>]) -> BoundCheck<T> {
    let mut out = BoundCheck { failures: Vec::new(), exceptions: Vec::new(), checked: records.len() };
    for r in records {
        for (kind, holds, bound) in [
            (BoundKind::Constant, r.holds_const, r.bound_const),
            (BoundKind::Decreasing, r.holds_dec, r.bound_dec),
        ] {
            if holds {
                continue;
            }
            let v = Violation { n: r.n, q: r.q, tag: r.tag, kind, beta: r.beta, bound };
            if verified_from(r.n, r.tag).map_or(true, |q0| r.q < q0) {
                out.exceptions.push(v);
            } else {
                out.failures.push(v);
            }
        }
    }
    out
}

/// Least-squares slope of `beta` against `q`.
pub fn trend_slope<T: Float>(records: &[BoundRecord<T>]) -> Option<T> {
    if records.len() < 2 {
        return None;
    }
    let n: T = cast(records.len() as f64);
    let xs = records.iter().map(|r| cast::<T>(r.q as f64));
    let mx = xs.clone().fold(T::zero(), |a, x| a + x) / n;
    let my = records.iter().fold(T::zero(), |a, r| a + r.beta) / n;
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for (x, r) in xs.zip(records) {
        sxy = sxy + (x - mx) * (r.beta - my);
        sxx = sxx + (x - mx) * (x - mx);
    }
    (sxx > T::zero()).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_values() {
        assert!((beta::<f64>(3, 4673, 28667).unwrap() - 2.1103).abs() < 1e-3);
        assert!((beta::<f64>(3, 2, 5).unwrap() - 3.0026).abs() < 1e-3);
        assert!((beta::<f64>(4, 3, 11).unwrap() - 2.0194).abs() < 1e-3);
        assert!(matches!(beta::<f64>(3, 1, 5), Err(Error::DomainError(_))));
        assert!(matches!(beta::<f64>(3, 5, 0), Err(Error::DomainError(_))));
        let b32: f32 = beta(3, 4673, 28667).unwrap();
        assert!((b32 as f64 - 2.1103).abs() < 1e-3);
    }

    #[test]
    fn bounds() {
        let (c, d) = bound_values::<f64>(3, 5);
        assert!((c - 5f64.sqrt()).abs() < 1e-15);
        assert!((d - 2.5646).abs() < 1e-3);
        assert!((bound_values::<f64>(4, 97).0 - 6f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn diffs() {
        let l = BoundRecord::<f64>::new(3, 503, 2692, SeriesTag::L).unwrap();
        let g = BoundRecord::<f64>::new(3, 503, 2478, SeriesTag::G).unwrap();
        let d = percent_diffs(&l, Some(&g)).unwrap();
        assert!((d.pct_lg.unwrap() - 7.949).abs() < 1e-3);
        assert!(((d.pct_bound - d.pct_bound_sizes) / d.pct_bound).abs() < 1e-9);
        assert_eq!(percent_diffs(&l, None).unwrap().pct_lg, None);
        let other = BoundRecord::<f64>::new(3, 509, 2478, SeriesTag::G).unwrap();
        assert!(matches!(percent_diffs(&l, Some(&other)), Err(Error::MismatchedRecords)));
    }

    #[test]
    fn sig12() {
        assert_eq!(fmt_sig12(2.110312345678912), "2.11031234568");
        assert_eq!(fmt_sig12(7.949), "7.94900000000");
        assert_eq!(fmt_sig12(-0.5), "-0.500000000000");
        assert_eq!(fmt_sig12(9.99999999999951), "10.0000000000");
        assert_eq!(fmt_sig12(123456789012345.0), "123456789012345");
    }

    #[test]
    fn curve_round_trip() {
        let rows = series::<f64>(3, SeriesTag::L, &[(5, 16), (7, 23)], &[(7, 17)]).unwrap();
        let text = curves_to_string(&rows);
        assert_eq!(text.lines().count(), 3);
        let back = parse_curves(&text).unwrap();
        assert_eq!(back[0].pct_lg, None);
        for (p, r) in back.iter().zip(&rows) {
            assert_eq!((p.q, p.size), (r.record.q, r.record.size));
            assert!(((p.beta - r.record.beta) / r.record.beta).abs() <= 5e-12);
            assert_eq!(beta::<f64>(3, p.q, p.size).unwrap(), r.record.beta);
        }
    }

    #[test]
    fn min_series_prefers_smaller() {
        assert_eq!(min_series(&[(5, 16), (7, 23)], &[(5, 12), (7, 17), (11, 30)]), vec![(5, 12), (7, 17), (11, 30)]);
    }

    #[test]
    fn small_q_violations_are_exceptions() {
        let recs: Vec<BoundRecord> = [(2, 5), (3, 8), (5, 12)]
            .iter()
            .map(|&(q, s)| BoundRecord::new(3, q, s, SeriesTag::Min).unwrap())
            .collect();
        let c = check_bounds(&recs);
        assert!(c.passed());
        assert!(c.exceptions.iter().any(|v| v.q == 2) && c.exceptions.iter().any(|v| v.q == 3));
        let big = BoundRecord::<f64>::new(3, 101, 2000, SeriesTag::Min).unwrap();
        assert!(!check_bounds(&[big]).passed());
        let lex = BoundRecord::<f64>::new(3, 17, 69, SeriesTag::L).unwrap();
        let c = check_bounds(&[lex]);
        assert!(c.passed() && c.exceptions.len() == 2);
    }

    #[test]
    fn slope_sign() {
        let recs: Vec<BoundRecord> = [(5, 16), (7, 23), (11, 37)]
            .iter()
            .map(|&(q, s)| BoundRecord::new(3, q, s, SeriesTag::L).unwrap())
            .collect();
        assert!(trend_slope(&recs).unwrap() < 0.0);
        assert_eq!(trend_slope(&recs[..1]), None);
    }
}
