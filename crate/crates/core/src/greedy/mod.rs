//! Two-stage randomized greedy search for small complete caps.
//!
//! Stage 1 starts from the frame, makes `delta_q` random steps and then
//! only objective-maximizing steps until the cap is complete. Stage 2 runs
//! `n_q` independent attempts from a common start set `S0`, a few of whose
//! first five steps are random.
//!
//! A random step draws `d_{q,i}` distinct uncovered points and keeps the one
//! covering the most new points; a non-random step does the same over all
//! uncovered points. Ties are broken uniformly.
//!
//! Randomness comes from [`SplitMix64`]. Stage 1 is seeded with the master
//! seed, attempt `k` with [`child_seed`]`(master_seed, k)`.

mod engine;
mod params;

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;

pub use engine::{engine_bytes, GreedyEngine};
pub use params::{default_pool_size, GreedyParams, Prefix};

use crate::cap::{verify_complete_cap, Cap, Provenance, Verdict};
use crate::capfile::ORACLE_POINT_LIMIT;
use crate::error::{Error, Result};
use crate::space::{ProjPoint, ProjSpace};
use crate::tracker::{CoverageTracker, MemoryBudget};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// The SplitMix64 output function.
pub fn mix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of stage-2 attempt `k`: `mix64(master_seed ^ k * 0x9E3779B97F4A7C15)`.
pub fn child_seed(master_seed: u64, k: u64) -> u64 {
    mix64(master_seed ^ k.wrapping_mul(GOLDEN))
}

pub fn rng_from_seed(seed: u64) -> SplitMix64 {
    SplitMix64::seed_from_u64(seed)
}

/// The unit points `e_0, ..., e_N` followed by `(1, ..., 1)`.
pub fn frame(space: &ProjSpace) -> Vec<ProjPoint> {
    let n = space.coord_len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let mut v = vec![0u32; n];
        v[i] = 1;
        out.push(space.point(&v).unwrap());
    }
    out.push(space.point(&vec![1; n]).unwrap());
    out
}

fn argmax_by_gain<R: Rng + ?Sized>(
    tracker: &CoverageTracker,
    candidates: impl Iterator<Item = u64>,
    rng: &mut R,
) -> Result<ProjPoint> {
    let space = tracker.space();
    let mut best: Option<ProjPoint> = None;
    let mut best_gain = 0;
    let mut ties = 0u64;
    for i in candidates {
        let p = space.point_at(i)?;
        let g = tracker.what_if_gain(&p);
        if best.is_none() || g > best_gain {
            best = Some(p);
            best_gain = g;
            ties = 1;
        } else if g == best_gain {
            ties += 1;
            if rng.gen_range(0..ties) == 0 {
                best = Some(p);
            }
        }
    }
    best.ok_or(Error::NoCandidates)
}

fn candidate_count(tracker: &CoverageTracker) -> u64 {
    let extra = if tracker.cap_len() < 2 { tracker.cap_len() as u64 } else { 0 };
    tracker.uncovered_count() - extra
}

/// The uncovered point whose addition covers the most new points, chosen
/// by exhaustive what-if evaluation.
pub fn step_nonrandom<R: Rng + ?Sized>(tracker: &CoverageTracker, rng: &mut R) -> Result<ProjPoint> {
    let n = tracker.space().point_count();
    argmax_by_gain(tracker, (1..=n).filter(|&i| tracker.can_add(i)), rng)
}

/// Best of `min(pool_size, #uncovered)` distinct uncovered points drawn
/// uniformly: rejection sampling while uncovered points are plentiful,
/// reservoir sampling over a scan otherwise.
pub fn step_random<R: Rng + ?Sized>(
    tracker: &CoverageTracker,
    pool_size: usize,
    rng: &mut R,
) -> Result<ProjPoint> {
    let total = candidate_count(tracker);
    if total == 0 {
        return Err(Error::NoCandidates);
    }
    let k = (pool_size.max(1) as u64).min(total) as usize;
    let n = tracker.space().point_count();
    let mut sample = Vec::with_capacity(k);
    if total >= 2 * k as u64 {
        let mut chosen = HashSet::with_capacity(k);
        while sample.len() < k {
            let i = rng.gen_range(1..=n);
            if tracker.can_add(i) && chosen.insert(i) {
                sample.push(i);
            }
        }
    } else {
        let mut seen = 0u64;
        for i in (1..=n).filter(|&i| tracker.can_add(i)) {
            seen += 1;
            if sample.len() < k {
                sample.push(i);
            } else {
                let j = rng.gen_range(0..seen);
                if (j as usize) < k {
                    sample[j as usize] = i;
                }
            }
        }
    }
    argmax_by_gain(tracker, sample.into_iter(), rng)
}

/// One finished stage-2 attempt.
#[derive(Clone, Debug)]
pub struct AttemptResult {
    pub cap: Cap,
    pub attempt_index: usize,
    pub seed_used: u64,
    /// Covered count after each step of the attempt.
    pub f_trace: Option<Vec<u64>>,
}

/// Best attempt of a stage-2 run and the size of every attempt.
#[derive(Clone, Debug)]
pub struct AttemptsReport {
    pub best: AttemptResult,
    pub sizes: Vec<usize>,
}

/// Runtime options that do not affect results.
#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    /// Worker threads for stage 2; 0 uses all available cores.
    pub jobs: usize,
    pub budget: MemoryBudget,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            jobs: 0,
            budget: MemoryBudget::DEFAULT,
        }
    }
}

fn finish(engine: GreedyEngine, provenance: Provenance) -> Result<Cap> {
    let tracker = engine.into_tracker();
    if !tracker.is_complete() {
        return Err(Error::VerificationFailed("search stopped before completeness".into()));
    }
    Ok(tracker.into_cap(provenance))
}

/// Re-checks a returned cap with the brute-force oracle when the space is
/// small enough.
fn oracle_check(space: &ProjSpace, cap: &Cap) -> Result<()> {
    if space.point_count() <= ORACLE_POINT_LIMIT {
        match verify_complete_cap(space, cap.points())? {
            Verdict::CompleteCap => {}
            v => return Err(Error::VerificationFailed(format!("oracle verdict {v:?}"))),
        }
    }
    Ok(())
}

/// Runs steps until complete. `random_pool(step)` gives the pool size when
/// step `step` (1-based, counted from the start state) is random.
fn run_to_completion<'s, R: Rng + ?Sized>(
    engine: &mut GreedyEngine<'s>,
    rng: &mut R,
    random_pool: impl Fn(usize) -> Option<usize>,
    mut after_step: impl FnMut(&GreedyEngine<'s>),
) -> Result<()> {
    let mut step = 0;
    while !engine.is_complete() {
        step += 1;
        let pick = match random_pool(step) {
            Some(d) => engine.best_of_sample(d, rng)?,
            None => engine.best_candidate(rng)?,
        };
        engine.add_index(pick)?;
        after_step(engine);
    }
    Ok(())
}

/// Stage 1: frame, `delta_q` random steps, then non-random steps.
pub fn greedy_stage1(space: &ProjSpace, params: &GreedyParams, budget: MemoryBudget) -> Result<Cap> {
    Ok(stage1_with_snapshot(space, params, budget, None)?.0)
}

/// Stage 1, also returning a copy of the search state at the moment the
/// cap reached `snapshot_at` points (if it ever had exactly that many).
fn stage1_with_snapshot<'s>(
    space: &'s ProjSpace,
    params: &GreedyParams,
    budget: MemoryBudget,
    snapshot_at: Option<usize>,
) -> Result<(Cap, Option<GreedyEngine<'s>>)> {
    params.validate()?;
    let mut rng = rng_from_seed(params.master_seed);
    let mut engine = GreedyEngine::with_start(space, &frame(space), budget)?;
    let mut snapshot = None;
    if snapshot_at == Some(engine.tracker().cap_len()) {
        snapshot = Some(engine.clone());
    }
    let q = space.q();
    run_to_completion(
        &mut engine,
        &mut rng,
        |step| (step <= params.delta_q).then(|| params.pool_size(q, step)),
        |e| {
            if snapshot_at == Some(e.tracker().cap_len()) {
                let mut copy = e.clone();
                copy.clear_trace();
                snapshot = Some(copy);
            }
        },
    )?;
    let cap = finish(
        engine,
        Provenance::Greedy {
            seed: params.master_seed,
            params_digest: Some(params.digest()),
        },
    )?;
    oracle_check(space, &cap)?;
    Ok((cap, snapshot))
}

fn run_attempt(start: &GreedyEngine, params: &GreedyParams, k: usize) -> Result<AttemptResult> {
    let seed = child_seed(params.master_seed, k as u64);
    let mut rng = rng_from_seed(seed);
    let mut engine = start.clone();
    let q = engine.tracker().space().q();
    run_to_completion(
        &mut engine,
        &mut rng,
        |step| {
            params
                .random_positions
                .iter()
                .position(|&p| p == step)
                .map(|i| params.pool_size(q, i + 1))
        },
        |_| {},
    )?;
    let trace = engine.trace().to_vec();
    let cap = finish(
        engine,
        Provenance::Greedy {
            seed,
            params_digest: Some(params.digest()),
        },
    )?;
    Ok(AttemptResult {
        cap,
        attempt_index: k,
        seed_used: seed,
        f_trace: Some(trace),
    })
}

/// Stage 2: `n_q` seed-isolated attempts from `s0`. Returns the smallest
/// cap (lowest attempt index among equals) and all sizes in attempt order.
pub fn greedy_attempts(
    space: &ProjSpace,
    params: &GreedyParams,
    s0: &[ProjPoint],
    options: RunOptions,
) -> Result<AttemptsReport> {
    params.validate()?;
    if params.n_q == 0 {
        return Err(Error::EmptyRun);
    }
    let start = GreedyEngine::with_start(space, s0, options.budget)?;
    attempts_from(&start, params, options)
}

fn attempts_from(start: &GreedyEngine, params: &GreedyParams, options: RunOptions) -> Result<AttemptsReport> {
    if params.n_q == 0 {
        return Err(Error::EmptyRun);
    }
    let run = || -> Result<Vec<AttemptResult>> {
        (0..params.n_q)
            .into_par_iter()
            .map(|k| run_attempt(start, params, k))
            .collect()
    };
    let results = if options.jobs == 1 {
        (0..params.n_q).map(|k| run_attempt(start, params, k)).collect::<Result<Vec<_>>>()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(options.jobs)
            .build()
            .map_err(|e| Error::InvalidParams(format!("thread pool: {e}")))?
            .install(run)?
    };
    let sizes: Vec<usize> = results.iter().map(|r| r.cap.len()).collect();
    let best = results
        .into_iter()
        .min_by_key(|r| (r.cap.len(), r.attempt_index))
        .unwrap();
    oracle_check(start.tracker().space(), &best.cap)?;
    Ok(AttemptsReport { best, sizes })
}

/// Outcome of both stages.
#[derive(Clone, Debug)]
pub struct GreedyReport {
    pub stage1: Cap,
    pub stage2: Option<AttemptsReport>,
}

impl GreedyReport {
    /// The smallest cap found; the stage-1 cap wins ties.
    pub fn best(&self) -> &Cap {
        match &self.stage2 {
            Some(r) if r.best.cap.len() < self.stage1.len() => &r.best.cap,
            _ => &self.stage1,
        }
    }
}

/// The start set of stage 2: the first `warm_start_prefix` points of
/// `warm` (or of `stage1` without a warm-start cap), else the frame.
pub fn stage2_start(space: &ProjSpace, params: &GreedyParams, stage1: &Cap, warm: Option<&Cap>) -> Vec<ProjPoint> {
    let source = warm.unwrap_or(stage1);
    match params.warm_start_prefix {
        Some(m) => source.points()[..m.resolve(source.len())].to_vec(),
        None if warm.is_some() => source.points().to_vec(),
        None => frame(space),
    }
}

/// Both stages; stage 2 is skipped when `n_q = 0`.
pub fn greedy_search(
    space: &ProjSpace,
    params: &GreedyParams,
    warm: Option<&Cap>,
    options: RunOptions,
) -> Result<GreedyReport> {
    // With a percentage the stage-1 size is unknown in advance, so the
    // snapshot is taken by replaying the start set instead.
    let snapshot_at = match (warm, params.warm_start_prefix) {
        (None, Some(Prefix::Points(m))) if params.n_q > 0 => Some(m),
        _ => None,
    };
    let (stage1, snapshot) = stage1_with_snapshot(space, params, options.budget, snapshot_at)?;
    let stage2 = match (params.n_q, snapshot) {
        (0, _) => None,
        (_, Some(start)) => Some(attempts_from(&start, params, options)?),
        (_, None) => {
            let s0 = stage2_start(space, params, &stage1, warm);
            Some(greedy_attempts(space, params, &s0, options)?)
        }
    };
    Ok(GreedyReport { stage1, stage2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_points() {
        let s = ProjSpace::new(3, 2).unwrap();
        let f: Vec<Vec<u32>> = frame(&s).iter().map(|p| p.coords().to_vec()).collect();
        assert_eq!(f, vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1], vec![1, 1, 1, 1]]);
        assert_eq!(frame(&ProjSpace::new(4, 3).unwrap()).len(), 6);
    }

    #[test]
    fn nonrandom_completes_pg32_frame() {
        let s = ProjSpace::new(3, 2).unwrap();
        let mut t = CoverageTracker::new(&s).unwrap();
        let f = frame(&s);
        for p in &f[..4] {
            t.add_point(p).unwrap();
        }
        let mut rng = rng_from_seed(1);
        let p = step_nonrandom(&t, &mut rng).unwrap();
        t.add_point(&p).unwrap();
        assert_eq!(t.covered_count(), 15);
        assert!(matches!(step_nonrandom(&t, &mut rng), Err(Error::NoCandidates)));
        assert!(matches!(step_random(&t, 3, &mut rng), Err(Error::NoCandidates)));
    }

    #[test]
    fn nonrandom_maximizes_objective() {
        let mut rng = rng_from_seed(2);
        for q in [3u64, 5, 7] {
            let s = ProjSpace::new(3, q).unwrap();
            let mut t = CoverageTracker::new(&s).unwrap();
            for p in frame(&s) {
                t.add_point(&p).unwrap();
            }
            while !t.is_complete() {
                let p = step_nonrandom(&t, &mut rng).unwrap();
                let g = t.what_if_gain(&p);
                let max = (1..=s.point_count())
                    .filter(|&i| t.can_add(i))
                    .map(|i| t.what_if_gain(&s.point_at(i).unwrap()))
                    .max()
                    .unwrap();
                assert_eq!(g, max);
                t.add_point(&p).unwrap();
            }
        }
    }

    #[test]
    fn single_candidate_is_returned() {
        let s = ProjSpace::new(3, 3).unwrap();
        let mut found = false;
        for seed in 0..200 {
            let mut rng = rng_from_seed(seed);
            let mut t = CoverageTracker::new(&s).unwrap();
            while candidate_count(&t) > 1 {
                let c: Vec<u64> = (1..=s.point_count()).filter(|&i| t.can_add(i)).collect();
                t.add_index(c[rng.gen_range(0..c.len())]).unwrap();
            }
            if candidate_count(&t) == 1 {
                let only = (1..=s.point_count()).find(|&i| t.can_add(i)).unwrap();
                for k in 0..5 {
                    let mut rng = rng_from_seed(k);
                    assert_eq!(step_nonrandom(&t, &mut rng).unwrap().index(), only);
                    assert_eq!(step_random(&t, 4, &mut rng).unwrap().index(), only);
                }
                found = true;
                break;
            }
        }
        assert!(found);
    }

    #[test]
    fn random_step_samples_only_candidates() {
        let s = ProjSpace::new(3, 5).unwrap();
        let mut t = CoverageTracker::new(&s).unwrap();
        for p in frame(&s) {
            t.add_point(&p).unwrap();
        }
        let mut rng = rng_from_seed(42);
        for pool in [1, 3, 50, 10_000] {
            let p = step_random(&t, pool, &mut rng).unwrap();
            assert!(t.can_add(p.index()));
        }
        let a = step_random(&t, 3, &mut rng_from_seed(42)).unwrap();
        let b = step_random(&t, 3, &mut rng_from_seed(42)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn stage1_pg32_is_frame() {
        let s = ProjSpace::new(3, 2).unwrap();
        for seed in 0..10 {
            let cap = greedy_stage1(&s, &GreedyParams::default().with_seed(seed), MemoryBudget::DEFAULT).unwrap();
            assert_eq!(cap.points(), &frame(&s)[..]);
        }
    }

    #[test]
    fn attempts_are_deterministic_across_jobs() {
        let s = ProjSpace::new(3, 7).unwrap();
        let params = GreedyParams {
            n_q: 12,
            ..GreedyParams::default().with_seed(11)
        };
        let f = frame(&s);
        let a = greedy_attempts(&s, &params, &f, RunOptions { jobs: 1, ..Default::default() }).unwrap();
        let b = greedy_attempts(&s, &params, &f, RunOptions { jobs: 3, ..Default::default() }).unwrap();
        assert_eq!(a.sizes, b.sizes);
        assert_eq!(a.best.cap, b.best.cap);
        assert_eq!(a.best.attempt_index, b.best.attempt_index);
        assert!(a.sizes.iter().all(|&n| n >= 17));
        let empty = GreedyParams { n_q: 0, ..params };
        assert!(matches!(greedy_attempts(&s, &empty, &f, RunOptions::default()), Err(Error::EmptyRun)));
    }

    #[test]
    fn child_seeds_differ() {
        let seeds: HashSet<u64> = (0..1000).map(|k| child_seed(7, k)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_eq!(mix64(0), 0xE220_A839_7B1D_CDAF);
    }
}
