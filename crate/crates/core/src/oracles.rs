//! Monte Carlo oracles for the almost-sure rank statements, and a
//! randomized search that tries to beat the linear converse.
//!
//! Every trial is a pure function of `(parameters, trial seed)` where the
//! trial seed is `derive_seed(master, index)`, so trials run in parallel and
//! any counterexample can be replayed from its stored seed.
//!
//! The converse search only ever provides evidence: it samples schemes, it
//! cannot enumerate all of them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::channel::{sample_realization, stack, LegitimateCsi, SystemDims, Transmitter, RESAMPLE_LIMIT};
use crate::codec::{format_rational, matrix_to_text};
use crate::error::{Result, SdofError};
use crate::matcore::{block_diag, hconcat, RationalMatrix};
use crate::sampling::{derive_seed, rng_from_seed, RationalGrid, SeededRng};
use crate::scheme::{construct_wth_scheme, LinearScheme};
use crate::verifier::{full_space_ratio, verify};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Counterexample {
    pub trial: u64,
    pub seed: u64,
    pub observed: String,
    pub expected: String,
    /// Everything needed to re-check the trial by hand.
    pub replay: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialSummary {
    pub operation: &'static str,
    pub parameters: Value,
    pub master_seed: u64,
    pub trials: u64,
    pub successes: u64,
    pub counterexamples: Vec<Counterexample>,
}

impl TrialSummary {
    pub fn all_passed(&self) -> bool {
        self.counterexamples.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes") + "\n"
    }
}

/// Outcome of one trial.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialOutcome {
    pub success: bool,
    pub observed: String,
    pub expected: String,
    pub replay: Value,
}

fn run_trials(
    operation: &'static str,
    parameters: Value,
    trials: u64,
    master_seed: u64,
    trial: impl Fn(u64) -> Result<TrialOutcome> + Sync,
) -> Result<TrialSummary> {
    let outcomes: Vec<Result<TrialOutcome>> = (0..trials)
        .into_par_iter()
        .map(|i| trial(derive_seed(master_seed, i)))
        .collect();
    let mut successes = 0;
    let mut counterexamples = Vec::new();
    for (i, outcome) in outcomes.into_iter().enumerate() {
        let outcome = outcome?;
        if outcome.success {
            successes += 1;
        } else {
            counterexamples.push(Counterexample {
                trial: i as u64,
                seed: derive_seed(master_seed, i as u64),
                observed: outcome.observed,
                expected: outcome.expected,
                replay: outcome.replay,
            });
        }
    }
    Ok(TrialSummary {
        operation,
        parameters,
        master_seed,
        trials,
        successes,
        counterexamples,
    })
}

fn bump(rejections: &mut usize, what: &'static str) -> Result<()> {
    *rejections += 1;
    if *rejections > RESAMPLE_LIMIT {
        return Err(SdofError::ResampleLimitExceeded {
            what,
            limit: RESAMPLE_LIMIT,
        });
    }
    Ok(())
}

/// Random `rows x cols` matrix of rank exactly `rank`, built as a product of
/// two full-rank grid matrices.
pub fn sample_rank_deficient(
    rows: usize,
    cols: usize,
    rank: usize,
    grid: RationalGrid,
    rng: &mut SeededRng,
) -> Result<RationalMatrix> {
    if rank > rows.min(cols) {
        return Err(SdofError::InvalidRank(format!("rank {rank} impossible for a {rows}x{cols} matrix")));
    }
    let mut rejections = 0;
    loop {
        let m = grid.sample_matrix(rows, rank, rng).mul(&grid.sample_matrix(rank, cols, rng))?;
        if m.rank() == rank {
            return Ok(m);
        }
        bump(&mut rejections, "rank-deficient matrix")?;
    }
}

/// Which entries of each `K x N` eavesdropper matrix are redrawn per trial.
/// `false` entries are drawn once from the master seed and then held fixed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RandomMask {
    pub rows: usize,
    pub cols: usize,
    pub random: Vec<bool>,
}

impl RandomMask {
    pub fn all_random(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            random: vec![true; rows * cols],
        }
    }

    /// Every row and every column must hold at least one redrawn entry.
    pub fn covers_rows_and_columns(&self) -> bool {
        let row_ok = (0..self.rows).all(|i| (0..self.cols).any(|j| self.random[i * self.cols + j]));
        let col_ok = (0..self.cols).all(|j| (0..self.rows).any(|i| self.random[i * self.cols + j]));
        row_ok && col_ok
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankLemmaParams {
    pub n_antennas: usize,
    pub k_eve: usize,
    pub p1: usize,
    pub p2: usize,
    /// Column counts of the fixed precoders; default `N`.
    pub m1: usize,
    pub m2: usize,
    pub mask: Option<RandomMask>,
}

impl RankLemmaParams {
    pub fn new(n_antennas: usize, k_eve: usize, p1: usize, p2: usize) -> Self {
        Self {
            n_antennas,
            k_eve,
            p1,
            p2,
            m1: n_antennas,
            m2: n_antennas,
            mask: None,
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.n_antennas;
        if n == 0 || self.k_eve == 0 {
            return Err(SdofError::InvalidRegime("rank lemma needs N >= 1 and K >= 1".into()));
        }
        for (p, m) in [(self.p1, self.m1), (self.p2, self.m2)] {
            if p > n.min(m) {
                return Err(SdofError::InvalidRank(format!("p = {p} exceeds min(N, m) = {}", n.min(m))));
            }
        }
        if let Some(mask) = &self.mask {
            if (mask.rows, mask.cols) != (self.k_eve, n) || mask.random.len() != self.k_eve * n {
                return Err(SdofError::mismatch("random mask", format!("{}x{n}", self.k_eve), format!("{}x{}", mask.rows, mask.cols)));
            }
            if !mask.covers_rows_and_columns() {
                return Err(SdofError::InvalidRegime(
                    "mask needs a random entry in every row and every column".into(),
                ));
            }
        }
        Ok(())
    }
}

/// One trial of `rank [G1 P1, G2 P2] = min(p1 + p2, K)`.
pub fn rank_lemma_single(
    params: &RankLemmaParams,
    fixed: &[RationalMatrix; 2],
    trial_seed: u64,
    grid: RationalGrid,
) -> Result<TrialOutcome> {
    let (n, k) = (params.n_antennas, params.k_eve);
    let mut rng = rng_from_seed(trial_seed);
    let p1 = sample_rank_deficient(n, params.m1, params.p1, grid, &mut rng)?;
    let p2 = sample_rank_deficient(n, params.m2, params.p2, grid, &mut rng)?;
    let mask = params.mask.clone().unwrap_or_else(|| RandomMask::all_random(k, n));
    let mut rejections = 0;
    let mut draw_g = |fixed: &RationalMatrix, rng: &mut SeededRng| -> Result<RationalMatrix> {
        loop {
            let g = RationalMatrix::from_fn(k, n, |i, j| {
                if mask.random[i * n + j] {
                    grid.sample(rng)
                } else {
                    fixed.get(i, j).clone()
                }
            });
            if g.rank() == k.min(n) {
                return Ok(g);
            }
            bump(&mut rejections, "eavesdropper matrix")?;
        }
    };
    let g1 = draw_g(&fixed[0], &mut rng)?;
    let g2 = draw_g(&fixed[1], &mut rng)?;
    let observed = hconcat(&[&g1.mul(&p1)?, &g2.mul(&p2)?])?.rank();
    let expected = (params.p1 + params.p2).min(k);
    Ok(TrialOutcome {
        success: observed == expected,
        observed: observed.to_string(),
        expected: expected.to_string(),
        replay: json!({
            "P1": matrix_to_text(&p1),
            "P2": matrix_to_text(&p2),
            "G1": matrix_to_text(&g1),
            "G2": matrix_to_text(&g2),
        }),
    })
}

pub fn rank_lemma_trial(params: &RankLemmaParams, trials: u64, seed: u64, grid: RationalGrid) -> Result<TrialSummary> {
    params.validate()?;
    let fixed = rank_lemma_fixed_entries(params, seed, grid);
    run_trials(
        "oracle-rank",
        serde_json::to_value(params).expect("params serialize"),
        trials,
        seed,
        |s| rank_lemma_single(params, &fixed, s, grid),
    )
}

/// Held-fixed entries for masked trials, drawn from the master seed.
pub fn rank_lemma_fixed_entries(params: &RankLemmaParams, seed: u64, grid: RationalGrid) -> [RationalMatrix; 2] {
    let mut rng = rng_from_seed(derive_seed(seed, u64::MAX));
    let (k, n) = (params.k_eve, params.n_antennas);
    [grid.sample_matrix(k, n, &mut rng), grid.sample_matrix(k, n, &mut rng)]
}

/// Precoder families for the least-alignment oracle. All of them see only
/// the legitimate links.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AlignmentMode {
    /// `A_i = barH_i^{-1} C` with a common `C`: fully aligned at the
    /// legitimate receiver.
    Aligned,
    /// Independent random `A_i`.
    Independent,
    /// Each trial picks aligned, independent or partially aligned precoders.
    Mixed,
}

fn alignment_precoders(
    csi: LegitimateCsi<'_>,
    mode: AlignmentMode,
    grid: RationalGrid,
    rng: &mut SeededRng,
) -> Result<(RationalMatrix, RationalMatrix, &'static str)> {
    let nn = csi.dims().stacked_n();
    let mode = match mode {
        AlignmentMode::Mixed => match rng.random_range(0..3) {
            0 => AlignmentMode::Aligned,
            1 => AlignmentMode::Independent,
            _ => AlignmentMode::Mixed,
        },
        m => m,
    };
    let aligned = |c: &RationalMatrix| -> Result<(RationalMatrix, RationalMatrix)> {
        Ok((
            csi.stacked_h_inverse(Transmitter::First)?.mul(c)?,
            csi.stacked_h_inverse(Transmitter::Second)?.mul(c)?,
        ))
    };
    match mode {
        AlignmentMode::Aligned => {
            let cols = rng.random_range(1..=nn);
            let c = grid.sample_matrix(nn, cols, rng);
            let (a1, a2) = aligned(&c)?;
            Ok((a1, a2, "aligned"))
        }
        AlignmentMode::Independent => {
            let (c1, c2) = (rng.random_range(1..=nn), rng.random_range(1..=nn));
            Ok((grid.sample_matrix(nn, c1, rng), grid.sample_matrix(nn, c2, rng), "independent"))
        }
        AlignmentMode::Mixed => {
            let shared = rng.random_range(1..=nn);
            let c = grid.sample_matrix(nn, shared, rng);
            let (a1, a2) = aligned(&c)?;
            let (e1, e2) = (rng.random_range(0..=nn), rng.random_range(0..=nn));
            let a1 = hconcat(&[&a1, &grid.sample_matrix(nn, e1, rng)])?;
            let a2 = hconcat(&[&a2, &grid.sample_matrix(nn, e2, rng)])?;
            Ok((a1, a2, "partial"))
        }
    }
}

/// One trial of `rank [barG1 A1, barG2 A2] >= rank [barH1 A1, barH2 A2]`
/// with `K = N` and `A_i` built from the legitimate links only.
pub fn least_alignment_single(
    n_antennas: usize,
    n_slots: usize,
    mode: AlignmentMode,
    trial_seed: u64,
    grid: RationalGrid,
) -> Result<TrialOutcome> {
    let dims = SystemDims::new(n_antennas, n_antennas, n_slots)?;
    let r = sample_realization(dims, derive_seed(trial_seed, 0), grid)?;
    let mut rng = rng_from_seed(derive_seed(trial_seed, 1));
    let (a1, a2, family) = alignment_precoders(r.legitimate(), mode, grid, &mut rng)?;
    let c = stack(&r);
    let rank_through = |x1: &RationalMatrix, x2: &RationalMatrix| -> Result<usize> {
        Ok(hconcat(&[&x1.mul(&a1)?, &x2.mul(&a2)?])?.rank())
    };
    let legit = rank_through(c.bar_h(Transmitter::First), c.bar_h(Transmitter::Second))?;
    let eve = rank_through(c.bar_g(Transmitter::First), c.bar_g(Transmitter::Second))?;
    Ok(TrialOutcome {
        success: eve >= legit,
        observed: eve.to_string(),
        expected: format!(">= {legit}"),
        replay: json!({
            "family": family,
            "realization": serde_json::from_str::<Value>(&r.to_json()).expect("valid json"),
            "A1": matrix_to_text(&a1),
            "A2": matrix_to_text(&a2),
        }),
    })
}

pub fn least_alignment_trial(
    n_antennas: usize,
    n_slots: usize,
    mode: AlignmentMode,
    trials: u64,
    seed: u64,
    grid: RationalGrid,
) -> Result<TrialSummary> {
    SystemDims::new(n_antennas, n_antennas, n_slots)?;
    run_trials(
        "oracle-align",
        json!({ "n_antennas": n_antennas, "n_slots": n_slots, "mode": mode }),
        trials,
        seed,
        |s| least_alignment_single(n_antennas, n_slots, mode, s, grid),
    )
}

/// One trial: build and verify the two-slot helper scheme, then require the
/// noise to fill all `K n` eavesdropper dimensions whenever the scheme
/// delivers positive s.d.o.f.
pub fn full_space_single(n_antennas: usize, k_eve: usize, trial_seed: u64, grid: RationalGrid) -> Result<TrialOutcome> {
    let r = sample_realization(SystemDims::new(n_antennas, k_eve, 2)?, derive_seed(trial_seed, 0), grid)?;
    let s = construct_wth_scheme(r.legitimate(), derive_seed(trial_seed, 1), grid)?;
    let c = stack(&r);
    let report = verify(&s, &c)?;
    let ratio = full_space_ratio(&s, &c)?;
    let positive = report.achieved_sum_sdof.as_ref().is_some_and(|d| !d.is_zero());
    let success = report.ok() && (!positive || ratio.is_one());
    Ok(TrialOutcome {
        success,
        observed: format_rational(&ratio),
        expected: if positive { "1".into() } else { "any (zero s.d.o.f.)".into() },
        replay: json!({
            "realization": serde_json::from_str::<Value>(&r.to_json()).expect("valid json"),
            "scheme": serde_json::from_str::<Value>(&s.to_json()).expect("valid json"),
            "report": serde_json::to_value(&report).expect("report serializes"),
        }),
    })
}

pub fn full_space_trial(n_antennas: usize, k_eve: usize, trials: u64, seed: u64, grid: RationalGrid) -> Result<TrialSummary> {
    if k_eve == 0 {
        return Err(SdofError::InvalidRegime("full-space oracle needs K >= 1".into()));
    }
    if k_eve > 2 * n_antennas {
        return Err(SdofError::InvalidRegime(format!("K = {k_eve} exceeds 2N = {}", 2 * n_antennas)));
    }
    run_trials(
        "oracle-fullspace",
        json!({ "n_antennas": n_antennas, "k_eve": k_eve }),
        trials,
        seed,
        |s| full_space_single(n_antennas, k_eve, s, grid),
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchParams {
    pub n_antennas: usize,
    pub k_eve: usize,
    pub n_slots: usize,
    /// Accept schemes leaking up to this many dimensions.
    pub leak_budget: usize,
}

impl SearchParams {
    /// `max(ceil(n (2N - K) / 2), 0) + leak_budget`.
    pub fn bound(&self) -> usize {
        let num = self.n_slots as i64 * (2 * self.n_antennas as i64 - self.k_eve as i64);
        let ceil = Integer::div_ceil(&num, &2).max(0) as usize;
        ceil + self.leak_budget
    }
}

/// Scheme families sampled by the converse search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SchemeFamily {
    /// Every precoder and every symbol count random.
    FullyRandom,
    /// Block-diagonal precoders with independent per-slot symbol counts.
    PerSlot,
    /// Random information precoders over noise aligned as `barH_i^{-1} C`.
    AlignedNoise,
    /// The two-slot aligned-noise construction with perturbed symbol counts.
    PerturbedConstruction,
}

const FAMILIES: [SchemeFamily; 4] = [
    SchemeFamily::FullyRandom,
    SchemeFamily::PerSlot,
    SchemeFamily::AlignedNoise,
    SchemeFamily::PerturbedConstruction,
];

/// Draws one candidate scheme. Only the legitimate links are visible here.
pub fn sample_candidate_scheme(
    csi: LegitimateCsi<'_>,
    grid: RationalGrid,
    rng: &mut SeededRng,
) -> Result<(LinearScheme, SchemeFamily)> {
    let dims = csi.dims();
    let (n, k, slots) = (dims.n_antennas, dims.k_eve, dims.n_slots);
    let nn = dims.stacked_n();
    let family = FAMILIES[rng.random_range(0..FAMILIES.len())];
    let random = |cols: usize, rng: &mut SeededRng| grid.sample_matrix(nn, cols, rng);
    let aligned_noise = |cols: usize, rng: &mut SeededRng| -> Result<(RationalMatrix, RationalMatrix)> {
        let c = random(cols, rng);
        Ok((
            csi.stacked_h_inverse(Transmitter::First)?.mul(&c)?,
            csi.stacked_h_inverse(Transmitter::Second)?.mul(&c)?,
        ))
    };
    let scheme = match family {
        SchemeFamily::FullyRandom => {
            let counts: [usize; 4] = std::array::from_fn(|_| rng.random_range(0..=nn));
            LinearScheme::new(
                dims,
                random(counts[0], rng),
                random(counts[1], rng),
                random(counts[2], rng),
                random(counts[3], rng),
            )?
        }
        SchemeFamily::PerSlot => {
            let mut blocks: [Vec<RationalMatrix>; 4] = Default::default();
            for _ in 0..slots {
                for list in blocks.iter_mut() {
                    let cols = rng.random_range(0..=n);
                    list.push(grid.sample_matrix(n, cols, rng));
                }
            }
            let [p1, p2, q1, q2] = blocks.map(|b| block_diag(&b));
            LinearScheme::new(dims, p1, p2, q1, q2)?
        }
        SchemeFamily::AlignedNoise => {
            let noise = rng.random_range(0..=nn);
            let (q1, q2) = aligned_noise(noise, rng)?;
            let m1 = rng.random_range(0..=nn);
            let m2 = rng.random_range(0..=nn - m1);
            LinearScheme::new(dims, random(m1, rng), random(m2, rng), q1, q2)?
        }
        SchemeFamily::PerturbedConstruction => {
            let base_noise = (k * slots / 2) as i64;
            let base_info = ((2 * n).saturating_sub(k) * slots / 2) as i64;
            let clamp = |x: i64| x.clamp(0, nn as i64) as usize;
            let noise = clamp(base_noise + rng.random_range(-2..=2));
            let info = clamp(base_info + rng.random_range(-1..=2));
            let (mut q1, mut q2) = aligned_noise(noise, rng)?;
            if rng.random_bool(0.25) {
                // Extra unaligned noise at one transmitter.
                let extra = rng.random_range(1..=n);
                if rng.random_bool(0.5) {
                    q1 = hconcat(&[&q1, &random(extra, rng)])?;
                } else {
                    q2 = hconcat(&[&q2, &random(extra, rng)])?;
                }
            }
            let m1 = rng.random_range(0..=info);
            LinearScheme::new(dims, random(m1, rng), random(info - m1, rng), q1, q2)?
        }
    };
    Ok((scheme, family))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchOutcome {
    pub parameters: SearchParams,
    pub master_seed: u64,
    pub trials: u64,
    /// Largest `m1 + m2` among schemes that are decodable and leak at most
    /// the budget.
    pub best_found: usize,
    pub bound: usize,
    /// Trial index and symbol counts `(m1, m2, n1, n2)` of the best scheme.
    pub best_trial: Option<(u64, [usize; 4])>,
    /// Accepted schemes per family, in [`SchemeFamily`] declaration order.
    pub accepted_per_family: [u64; 4],
    pub counterexamples: Vec<Counterexample>,
}

impl SearchOutcome {
    pub fn found_counterexample(&self) -> bool {
        !self.counterexamples.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("search outcome serializes") + "\n"
    }
}

struct Candidate {
    accepted: bool,
    family: SchemeFamily,
    info: usize,
    counts: [usize; 4],
    replay: Option<Value>,
}

pub fn converse_single(params: &SearchParams, trial_seed: u64, grid: RationalGrid) -> Result<(Option<usize>, TrialOutcome)> {
    let c = evaluate_candidate(params, trial_seed, grid)?;
    let bound = params.bound();
    let outcome = TrialOutcome {
        success: !(c.accepted && c.info > bound),
        observed: c.info.to_string(),
        expected: format!("<= {bound}"),
        replay: c.replay.unwrap_or(Value::Null),
    };
    Ok((c.accepted.then_some(c.info), outcome))
}

fn evaluate_candidate(params: &SearchParams, trial_seed: u64, grid: RationalGrid) -> Result<Candidate> {
    let dims = SystemDims::new(params.n_antennas, params.k_eve, params.n_slots)?;
    let r = sample_realization(dims, derive_seed(trial_seed, 0), grid)?;
    let mut rng = rng_from_seed(derive_seed(trial_seed, 1));
    let (scheme, family) = sample_candidate_scheme(r.legitimate(), grid, &mut rng)?;
    let report = verify(&scheme, &stack(&r))?;
    let accepted = report.decodability_ok && report.leakage_dims <= params.leak_budget;
    let info = scheme.info_symbols();
    let replay = (accepted && info > params.bound()).then(|| {
        json!({
            "family": family,
            "realization": serde_json::from_str::<Value>(&r.to_json()).expect("valid json"),
            "scheme": serde_json::from_str::<Value>(&scheme.to_json()).expect("valid json"),
            "report": serde_json::to_value(&report).expect("report serializes"),
        })
    });
    Ok(Candidate {
        accepted,
        family,
        info,
        counts: [scheme.m1(), scheme.m2(), scheme.nn1(), scheme.nn2()],
        replay,
    })
}

/// Randomized falsification harness for the linear converse
/// `m1 + m2 <= ceil(n (2N - K) / 2)`.
pub fn converse_search(params: &SearchParams, trials: u64, seed: u64, grid: RationalGrid) -> Result<SearchOutcome> {
    SystemDims::new(params.n_antennas, params.k_eve, params.n_slots)?;
    let candidates: Vec<Result<Candidate>> = (0..trials)
        .into_par_iter()
        .map(|i| evaluate_candidate(params, derive_seed(seed, i), grid))
        .collect();
    let bound = params.bound();
    let mut best_found = 0;
    let mut best_trial = None;
    let mut accepted_per_family = [0u64; 4];
    let mut counterexamples = Vec::new();
    for (i, c) in candidates.into_iter().enumerate() {
        let c = c?;
        if !c.accepted {
            continue;
        }
        let slot = FAMILIES.iter().position(|f| *f == c.family).expect("known family");
        accepted_per_family[slot] += 1;
        if best_trial.is_none() || c.info > best_found {
            best_found = c.info;
            best_trial = Some((i as u64, c.counts));
        }
        if c.info > bound {
            counterexamples.push(Counterexample {
                trial: i as u64,
                seed: derive_seed(seed, i as u64),
                observed: c.info.to_string(),
                expected: format!("<= {bound}"),
                replay: c.replay.unwrap_or(Value::Null),
            });
        }
    }
    Ok(SearchOutcome {
        parameters: params.clone(),
        master_seed: seed,
        trials,
        best_found,
        bound,
        best_trial,
        accepted_per_family,
        counterexamples,
    })
}

/// `(m1 + m2) / n` for the best scheme of a search.
pub fn best_sdof(outcome: &SearchOutcome) -> BigRational {
    BigRational::new(BigInt::from(outcome.best_found), BigInt::from(outcome.parameters.n_slots))
}
