use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use capsearch::bounds::{self, CurveRow, SeriesTag};
use capsearch::capfile::{parse_cap, rebuild_coverage, write_cap, ORACLE_POINT_LIMIT};
use capsearch::code::{self, ParityCheck};
use capsearch::fop::{fop_run_with_budget, FopProgress};
use capsearch::greedy::{greedy_search, RunOptions};
use capsearch::tables::{self, parse_table_csv, Tag};
use capsearch::{read_cap, verify_complete_cap, Cap, Error, GreedyParams, MemoryBudget, PointOrder, ProjSpace, Verdict};

#[derive(Parser)]
#[command(name = "capsearch", version, about = "Small complete caps in PG(N,q)")]
struct Cli {
    /// Memory budget for coverage bitmaps and search state, in GiB.
    #[arg(long, global = true, env = "CAPSEARCH_MEM_GIB", default_value_t = 4.0)]
    mem_gib: f64,
    /// Throttled progress messages on stderr.
    #[arg(long, global = true)]
    progress: bool,
    /// Worker threads for greedy attempts (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lexicographic (or fixed-order) complete cap.
    Fop(FopArgs),
    /// Two-stage randomized greedy search.
    Greedy(GreedyArgs),
    /// Check that a cap file holds a complete cap.
    Verify(VerifyArgs),
    /// Normalized sizes against the upper-bound curves, as CSV.
    Bounds(BoundsArgs),
    /// Parameters of the code with the cap as parity-check matrix.
    Code(CodeArgs),
    /// Compare computed sizes with the bundled reference tables.
    Compare(CompareArgs),
}

#[derive(Args)]
struct FopArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    q: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// `lex`, or `file:<path>` with a permutation of the point indices.
    #[arg(long, default_value = "lex")]
    order: String,
}

#[derive(Args)]
struct GreedyArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    q: u64,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of stage-2 attempts.
    #[arg(long)]
    attempts: Option<usize>,
    /// Cap file whose leading points start stage 2.
    #[arg(long)]
    warm_start: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    cap: PathBuf,
    /// Use the brute-force verifier regardless of the space size.
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    n: usize,
    /// L, G or min.
    #[arg(long)]
    tag: String,
    /// `reference`, or `file:<path>` with `q,size` rows.
    #[arg(long, default_value = "reference")]
    source: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CodeArgs {
    #[arg(long)]
    cap: PathBuf,
    #[arg(long)]
    density: bool,
    #[arg(long)]
    min_distance: bool,
    #[arg(long)]
    covering_radius: bool,
    /// Print the parity-check matrix instead.
    #[arg(long)]
    matrix: bool,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    tag: String,
    /// `q,size` CSV of computed sizes.
    #[arg(long)]
    computed: PathBuf,
}

/// Exit status of a failed command.
enum Failure {
    Verification(String),
    Usage(String),
    Resource(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::VerificationFailed(_) => Failure::Verification(e.to_string()),
            Error::AllocationFailure { .. } | Error::TooLarge(_) | Error::SpaceTooLarge { .. } => {
                Failure::Resource(e.to_string())
            }
            Error::Io(ref io) if io.kind() != io::ErrorKind::NotFound => Failure::Resource(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Error::Io(e).into()
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let budget = MemoryBudget::from_gib(cli.mem_gib);
    let result = match &cli.command {
        Command::Fop(a) => fop(a, budget, cli.progress),
        Command::Greedy(a) => greedy(a, budget, cli.progress, cli.jobs),
        Command::Verify(a) => verify(a),
        Command::Bounds(a) => bounds_cmd(a),
        Command::Code(a) => code_cmd(a),
        Command::Compare(a) => compare(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (code, msg) = match f {
                Failure::Verification(m) => (1, m),
                Failure::Usage(m) => (2, m),
                Failure::Resource(m) => (3, m),
            };
            eprintln!("capsearch: {msg}");
            ExitCode::from(code)
        }
    }
}

/// Writes `text` to `out`, or stdout.
fn emit(out: Option<&Path>, text: &str) -> CmdResult {
    match out {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn cap_text(cap: &Cap) -> String {
    let mut buf = Vec::new();
    write_cap(cap, &mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

fn load_cap(path: &Path) -> Result<Cap, Failure> {
    Ok(read_cap(BufReader::new(fs::File::open(path)?))?)
}

fn fop(a: &FopArgs, budget: MemoryBudget, progress: bool) -> CmdResult {
    let space = ProjSpace::new(a.n, a.q)?;
    let order = match a.order.as_str() {
        "lex" => PointOrder::Lexicographic,
        o => match o.strip_prefix("file:") {
            Some(p) => PointOrder::parse_explicit(&fs::read_to_string(p)?)?,
            None => return Err(Failure::Usage(format!("unknown order `{o}`, expected lex or file:<path>"))),
        },
    };
    let mut report = |p: FopProgress| {
        eprintln!("scanned {} points, cap size {}, covered {:.4}", p.scanned, p.cap_size, p.covered_fraction)
    };
    let cb: Option<&mut dyn FnMut(FopProgress)> = if progress { Some(&mut report) } else { None };
    let cap = fop_run_with_budget(&space, &order, budget, cb)?;
    emit(a.out.as_deref(), &cap_text(&cap))
}

fn greedy(a: &GreedyArgs, budget: MemoryBudget, progress: bool, jobs: Option<usize>) -> CmdResult {
    let space = ProjSpace::new(a.n, a.q)?;
    let (mut params, config_seed) = match &a.config {
        Some(p) => {
            let text = fs::read_to_string(p)?;
            let has_seed = text
                .lines()
                .any(|l| l.split('#').next().unwrap().trim_start().starts_with("master_seed"));
            (GreedyParams::parse_config(&text)?, has_seed)
        }
        None => (GreedyParams::default(), false),
    };
    params.master_seed = match a.seed {
        Some(s) => s,
        None if config_seed => params.master_seed,
        None => rand::random(),
    };
    if let Some(n) = a.attempts {
        params.n_q = n;
    }
    let warm_path = a.warm_start.clone().or_else(|| params.warm_start.clone().map(PathBuf::from));
    let warm = warm_path.as_deref().map(load_cap).transpose()?;
    if let Some(w) = &warm {
        if (w.dim(), w.q() as u64) != (a.n, a.q) {
            return Err(Failure::Usage(format!("warm-start cap lives in PG({},{})", w.dim(), w.q())));
        }
    }
    eprintln!("seed={}", params.master_seed);
    let options = RunOptions { jobs: jobs.unwrap_or(0), budget };
    let report = greedy_search(&space, &params, warm.as_ref(), options)?;
    if progress {
        eprintln!("stage 1 size {}", report.stage1.len());
        if let Some(s2) = &report.stage2 {
            eprintln!("stage 2 best size {} (attempt {})", s2.best.cap.len(), s2.best.attempt_index);
        }
    }
    let best = report.best();
    match &a.out {
        Some(p) => {
            fs::write(p, cap_text(best))?;
            println!("GREEDY size={} seed={}", best.len(), params.master_seed);
            if let Some(s2) = &report.stage2 {
                let sizes: Vec<String> = s2.sizes.iter().map(|s| s.to_string()).collect();
                println!("sizes={}", sizes.join(","));
            }
            Ok(())
        }
        None => emit(None, &cap_text(best)),
    }
}

fn verify(a: &VerifyArgs) -> CmdResult {
    let file = parse_cap(BufReader::new(fs::File::open(&a.cap)?))?;
    let size = file.points.len();
    let verdict = if a.oracle || file.space.point_count() <= ORACLE_POINT_LIMIT {
        verify_complete_cap(&file.space, &file.points)?
    } else {
        match rebuild_coverage(&file.space, &file.points) {
            Ok(t) => match t.first_uncovered_from(1) {
                None => Verdict::CompleteCap,
                Some(i) => Verdict::IncompleteCap(i),
            },
            Err(Error::VerificationFailed(m)) => {
                println!("NOT A CAP size={size}");
                return Err(Failure::Verification(m));
            }
            Err(e) => return Err(e.into()),
        }
    };
    match verdict {
        Verdict::CompleteCap => {
            println!("COMPLETE CAP size={size}");
            Ok(())
        }
        Verdict::IncompleteCap(i) => {
            println!("INCOMPLETE CAP size={size} uncovered={i}");
            Err(Failure::Verification(format!("point {i} lies on no bisecant")))
        }
        Verdict::NotACap((i, j, k)) => {
            println!("NOT A CAP size={size}");
            Err(Failure::Verification(format!("points #{i}, #{j}, #{k} are collinear")))
        }
    }
}

fn read_pairs(path: &Path) -> Result<Vec<(u64, u64)>, Failure> {
    Ok(parse_table_csv(&fs::read_to_string(path)?)?)
}

fn bounds_cmd(a: &BoundsArgs) -> CmdResult {
    let tag: SeriesTag = a.tag.parse()?;
    let rows: Vec<CurveRow> = match a.source.as_str() {
        "reference" => {
            let l = tables::load_table(a.n, Tag::L)?.entries;
            let g = tables::load_table(a.n, Tag::G)?.entries;
            bounds::series(a.n, tag, &l, &g)?
        }
        s => match s.strip_prefix("file:") {
            Some(p) => {
                let entries = read_pairs(Path::new(p))?;
                let (l, g) = match tag {
                    SeriesTag::G => (Vec::new(), entries),
                    _ => (entries, Vec::new()),
                };
                bounds::series(a.n, tag, &l, &g)?
            }
            None => return Err(Failure::Usage(format!("unknown source `{s}`"))),
        },
    };
    let records: Vec<_> = rows.iter().map(|r| r.record).collect();
    let check = bounds::check_bounds(&records);
    for v in &check.exceptions {
        eprintln!("exception: q={} beta={:.6} exceeds {:?} bound {:.6}", v.q, v.beta, v.kind, v.bound);
    }
    for v in &check.failures {
        eprintln!("violation: q={} beta={:.6} exceeds {:?} bound {:.6}", v.q, v.beta, v.kind, v.bound);
    }
    emit(a.out.as_deref(), &bounds::curves_to_string(&rows))
}

fn code_cmd(a: &CodeArgs) -> CmdResult {
    let cap = load_cap(&a.cap)?;
    let h: ParityCheck = code::parity_check(&cap)?;
    if a.matrix {
        return emit(None, &h.to_text());
    }
    let all = !(a.density || a.min_distance || a.covering_radius);
    let mut out = String::new();
    if all {
        let p = code::profile_matrix(&h, 5)?;
        out = format!("{p}\n");
    } else {
        out.push_str(&format!("n={} k={}\n", h.n(), h.n() - h.rank()));
        if a.min_distance {
            out.push_str(&format!("d={}\n", code::min_distance(&h, 5)?));
        }
        if a.covering_radius || a.density {
            let r = code::covering_radius(&h)?;
            if a.covering_radius {
                out.push_str(&format!("r={r}\n"));
            }
            if a.density {
                let k = (h.n() - h.rank()) as u64;
                let mu = code::covering_density(h.n() as u64, k, r as u64, h.q() as u64)?;
                out.push_str(&format!("mu={mu}\n"));
            }
        }
    }
    emit(None, &out)
}

fn compare(a: &CompareArgs) -> CmdResult {
    let tag: Tag = a.tag.parse()?;
    let computed = read_pairs(&a.computed)?;
    let report = tables::compare(&computed, a.n, tag)?;
    emit(None, &report.to_csv())?;
    let s = report.summary();
    eprintln!("smaller={} equal={} larger={} total_delta={}", s.smaller, s.equal, s.larger, s.total);
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verification(format!("{} lexicap sizes differ from the reference", report.mismatches().count())))
    }
}
