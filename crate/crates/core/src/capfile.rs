//! Text format for caps.
//!
//! ```text
//! PG <N> <q> <size>
//! # provenance: <FOP | greedy seed=<u64> | external> [free text]
//! <x0> <x1> ... <xN>
//! ...
//! ```
//!
//! Rows are normalized points in insertion order. Further `#` lines are
//! comments and are dropped on reading.

use std::io::{BufRead, Write};

use crate::cap::{verify_complete_cap, Cap, Provenance, Verdict};
use crate::error::{Error, Result};
use crate::space::{ProjPoint, ProjSpace};
use crate::tracker::CoverageTracker;

/// Spaces up to this many points are re-verified with the brute-force
/// oracle on reading; larger ones by rebuilding the coverage bitmap.
pub const ORACLE_POINT_LIMIT: u64 = 1_000_000;

fn provenance_line(cap: &Cap) -> String {
    let mut line = String::from("# provenance: ");
    match cap.provenance() {
        Provenance::Fop => line.push_str("FOP"),
        Provenance::Greedy { seed, params_digest } => {
            line.push_str(&format!("greedy seed={seed}"));
            if let Some(d) = params_digest {
                line.push_str(&format!(" params={d}"));
            }
        }
        Provenance::External => line.push_str("external"),
    }
    if !cap.note().is_empty() {
        line.push(' ');
        line.push_str(cap.note());
    }
    line
}

pub fn write_cap<W: Write>(cap: &Cap, mut sink: W) -> Result<()> {
    writeln!(sink, "PG {} {} {}", cap.dim(), cap.q(), cap.len())?;
    writeln!(sink, "{}", provenance_line(cap))?;
    let mut row = String::new();
    for p in cap.points() {
        row.clear();
        for (i, c) in p.coords().iter().enumerate() {
            if i > 0 {
                row.push(' ');
            }
            row.push_str(&c.to_string());
        }
        writeln!(sink, "{row}")?;
    }
    Ok(())
}

pub fn cap_to_string(cap: &Cap) -> String {
    let mut buf = Vec::new();
    write_cap(cap, &mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

fn parse_provenance(body: &str) -> (Provenance, String) {
    let mut words = body.splitn(2, ' ');
    let head = words.next().unwrap_or("");
    let rest = words.next().unwrap_or("").to_string();
    match head {
        "FOP" => (Provenance::Fop, rest),
        "external" => (Provenance::External, rest),
        "greedy" => {
            let mut parts = rest.splitn(2, ' ');
            let seed_tok = parts.next().unwrap_or("");
            let Some(seed) = seed_tok.strip_prefix("seed=").and_then(|s| s.parse().ok()) else {
                return (Provenance::External, body.to_string());
            };
            let mut rest = parts.next().unwrap_or("").to_string();
            let mut params_digest = None;
            if let Some(tail) = rest.strip_prefix("params=") {
                let (d, note) = tail.split_once(' ').unwrap_or((tail, ""));
                params_digest = Some(d.to_string());
                rest = note.to_string();
            }
            (Provenance::Greedy { seed, params_digest }, rest)
        }
        _ => (Provenance::External, body.to_string()),
    }
}

/// A parsed cap file before any geometric verification.
#[derive(Clone, Debug)]
pub struct CapFile {
    pub space: ProjSpace,
    pub points: Vec<ProjPoint>,
    pub provenance: Provenance,
    pub note: String,
}

/// Parses a cap file, checking syntax, coordinate ranges and
/// normalization but not the cap property.
pub fn parse_cap<R: BufRead>(source: R) -> Result<CapFile> {
    let mut lines = source.lines().enumerate();
    let parse_err = |line: usize, message: String| Error::ParseError { line, message };

    let (header_no, header) = loop {
        match lines.next() {
            None => return Err(parse_err(1, "missing header".into())),
            Some((i, l)) => {
                let l = l?;
                if !l.trim().is_empty() {
                    break (i + 1, l);
                }
            }
        }
    };
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != "PG" {
        return Err(parse_err(header_no, format!("expected `PG <N> <q> <size>`, got `{header}`")));
    }
    let num = |s: &str| -> Result<u64> {
        s.parse::<u64>()
            .map_err(|_| parse_err(header_no, format!("`{s}` is not a non-negative integer")))
    };
    let (dim, q, size) = (num(fields[1])? as usize, num(fields[2])?, num(fields[3])? as usize);
    let space = ProjSpace::new(dim, q)
        .map_err(|e| Error::InconsistentHeader(format!("PG({dim},{q}): {e}")))?;

    let mut provenance = Provenance::External;
    let mut note = String::new();
    let mut seen_provenance = false;
    let mut points = Vec::with_capacity(size);
    let mut raw = Vec::with_capacity(space.coord_len());
    for (i, line) in lines {
        let line = line?;
        let line_no = i + 1;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(c) = t.strip_prefix('#') {
            if let Some(body) = c.trim_start().strip_prefix("provenance:") {
                if !seen_provenance {
                    (provenance, note) = parse_provenance(body.trim());
                    seen_provenance = true;
                }
            }
            continue;
        }
        raw.clear();
        for tok in t.split_whitespace() {
            let v: u64 = tok
                .parse()
                .map_err(|_| parse_err(line_no, format!("`{tok}` is not a coordinate")))?;
            if v >= q {
                return Err(parse_err(line_no, format!("coordinate {v} is not below q = {q}")));
            }
            raw.push(v as u32);
        }
        if raw.len() != space.coord_len() {
            return Err(parse_err(
                line_no,
                format!("expected {} coordinates, got {}", space.coord_len(), raw.len()),
            ));
        }
        let p = space
            .point(&raw)
            .map_err(|e| parse_err(line_no, e.to_string()))?;
        points.push(p);
    }
    if points.len() != size {
        return Err(Error::InconsistentHeader(format!(
            "header announces {size} points, file has {}",
            points.len()
        )));
    }
    Ok(CapFile {
        space,
        points,
        provenance,
        note,
    })
}

/// Reads a cap and re-verifies it. Fails if the points are not a cap;
/// completeness is recorded in the returned flag.
pub fn read_cap<R: BufRead>(source: R) -> Result<Cap> {
    let file = parse_cap(source)?;
    let complete = if file.space.point_count() <= ORACLE_POINT_LIMIT {
        match verify_complete_cap(&file.space, &file.points) {
            Ok(Verdict::CompleteCap) => true,
            Ok(Verdict::IncompleteCap(_)) => false,
            Ok(Verdict::NotACap(t)) => {
                return Err(Error::VerificationFailed(format!(
                    "points {}, {}, {} are collinear",
                    t.0, t.1, t.2
                )))
            }
            Err(e) => return Err(Error::VerificationFailed(e.to_string())),
        }
    } else {
        rebuild_coverage(&file.space, &file.points)?.is_complete()
    };
    let mut cap = Cap::from_parts(&file.space, file.points, complete, file.provenance).with_note(file.note);
    cap.set_complete(complete);
    Ok(cap)
}

/// Replays `points` into a fresh tracker; fails on the first point that
/// would break the cap property.
pub fn rebuild_coverage<'s>(space: &'s ProjSpace, points: &[ProjPoint]) -> Result<CoverageTracker<'s>> {
    let mut t = CoverageTracker::new(space)?;
    for (k, p) in points.iter().enumerate() {
        t.add_point(p).map_err(|e| match e {
            Error::PointCovered(i) | Error::DuplicatePoint(i) => {
                Error::VerificationFailed(format!("point #{} (index {i}) breaks the cap property", k + 1))
            }
            other => other,
        })?;
    }
    Ok(t)
}

pub fn read_cap_str(text: &str) -> Result<Cap> {
    read_cap(text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    const FRAME: &str = "PG 3 2 5\n# provenance: greedy seed=7 params=abc stage one\n1 0 0 0\n0 1 0 0\n0 0 1 0\n0 0 0 1\n1 1 1 1\n";

    #[test]
    fn round_trip_is_byte_identical() {
        let cap = read_cap_str(FRAME).unwrap();
        assert!(cap.is_complete());
        assert_eq!(cap.len(), 5);
        assert_eq!(
            cap.provenance(),
            &Provenance::Greedy {
                seed: 7,
                params_digest: Some("abc".into())
            }
        );
        assert_eq!(cap.note(), "stage one");
        let text = cap_to_string(&cap);
        assert_eq!(text, FRAME);
        assert_eq!(read_cap_str(&text).unwrap(), cap);
    }

    #[test]
    fn extra_comments_are_dropped() {
        let with_comments = "PG 3 2 5\n# provenance: FOP\n# scanned 15\n1 0 0 0\n0 1 0 0\n\n0 0 1 0\n0 0 0 1\n1 1 1 1\n";
        let cap = read_cap_str(with_comments).unwrap();
        assert_eq!(cap.provenance(), &Provenance::Fop);
        assert_eq!(cap_to_string(&cap), "PG 3 2 5\n# provenance: FOP\n1 0 0 0\n0 1 0 0\n0 0 1 0\n0 0 0 1\n1 1 1 1\n");
    }

    #[test]
    fn size_mismatch() {
        let mut text = String::from("PG 3 5 16\n");
        let s = ProjSpace::new(3, 5).unwrap();
        for i in 1..=15 {
            let p = s.point_at(i).unwrap();
            text.push_str(&format!("{} {} {} {}\n", p.coords()[0], p.coords()[1], p.coords()[2], p.coords()[3]));
        }
        assert!(matches!(parse_cap(text.as_bytes()), Err(Error::InconsistentHeader(_))));
    }

    #[test]
    fn bad_rows() {
        let err = parse_cap("PG 3 5 1\n0 0 7 1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::ParseError { line: 2, .. }), "{err}");
        let err = parse_cap("PG 3 5 1\n# provenance: FOP\n0 0 2 1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::ParseError { line: 3, .. }), "{err}");
        let err = parse_cap("PG 3 5 1\n0 1 1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::ParseError { line: 2, .. }));
        let err = parse_cap("PC 3 5 1\n0 0 0 1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::ParseError { line: 1, .. }));
        assert!(matches!(
            parse_cap("PG 3 6 0\n".as_bytes()),
            Err(Error::InconsistentHeader(_))
        ));
    }

    #[test]
    fn collinear_points_fail_verification() {
        let text = "PG 3 2 3\n0 0 0 1\n0 0 1 0\n0 0 1 1\n";
        assert!(matches!(read_cap_str(text), Err(Error::VerificationFailed(_))));
        assert_eq!(parse_cap(text.as_bytes()).unwrap().points.len(), 3);
    }

    #[test]
    fn incomplete_cap_reads_with_flag_cleared() {
        let cap = read_cap_str("PG 3 2 2\n# provenance: external\n0 0 0 1\n0 0 1 0\n").unwrap();
        assert!(!cap.is_complete());
        assert_eq!(cap.provenance(), &Provenance::External);
    }
}
