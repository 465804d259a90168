//! Event-by-event Monte Carlo of the EPR-Bohm run with click timestamps and
//! time-window coincidence matching.
//!
//! Each photon pair is one record. Both detectors click at the pair's
//! emission time plus independent Gaussian jitter; whichever side clicks
//! first measures first. The first outcome is a fair ±1 coin (the singlet
//! marginal). The second outcome is drawn from a branch measure that depends
//! only on the first station's setting and outcome — never on the second
//! station's setting. The second station then responds to that draw using
//! its own local angle: [`BranchMeasure::draw`] takes the local angle and a
//! uniform variate, and nothing else. That separation is the locality
//! structure of the sampler, and the test suite instruments it directly.
//!
//! All per-pair randomness is pulled from a dedicated ChaCha substream keyed
//! by (seed, pair_id), so results are bit-identical regardless of how pairs
//! are batched across workers.

use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::eprbohm::Convention;
use crate::error::{Error, Result};

/// Simulation parameters for one experimental run.
#[derive(Debug, Clone, Copy)]
pub struct SimConfig {
    pub n_pairs: u64,
    /// Analyzer angle at station 1 (radians).
    pub theta_a: f64,
    /// Analyzer angle at station 2 (radians).
    pub theta_b: f64,
    /// Coincidence window Δ in seconds; `f64::INFINITY` accepts every pair.
    pub window_delta: f64,
    /// Std deviation of each side's click-time jitter, seconds (> 0).
    pub jitter_sigma: f64,
    /// Probability that a click is actually recorded, in (0, 1].
    pub detector_efficiency: f64,
    pub seed: u64,
    pub convention: Convention,
    /// Matched pairs with |t1 − t2| ≤ tie_epsilon count as simultaneous.
    pub tie_epsilon: f64,
}

impl SimConfig {
    /// Lossless wide-window configuration: every generated pair is matched.
    pub fn ideal(n_pairs: u64, theta_a: f64, theta_b: f64, seed: u64) -> Self {
        Self {
            n_pairs,
            theta_a,
            theta_b,
            window_delta: f64::INFINITY,
            jitter_sigma: 1e-6,
            detector_efficiency: 1.0,
            seed,
            convention: Convention::SpinHalf,
            tie_epsilon: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if !self.theta_a.is_finite() || !self.theta_b.is_finite() {
            return bad("angles must be finite".into());
        }
        if self.window_delta.is_nan() || self.window_delta < 0.0 {
            return bad(format!("window_delta {} must be nonnegative", self.window_delta));
        }
        if self.jitter_sigma.is_nan() || self.jitter_sigma <= 0.0 || self.jitter_sigma.is_infinite()
        {
            return bad(format!("jitter_sigma {} must be positive", self.jitter_sigma));
        }
        if !(self.detector_efficiency > 0.0 && self.detector_efficiency <= 1.0) {
            return bad(format!(
                "detector_efficiency {} must lie in (0, 1]",
                self.detector_efficiency
            ));
        }
        if self.tie_epsilon.is_nan() || self.tie_epsilon < 0.0 {
            return bad(format!("tie_epsilon {} must be nonnegative", self.tie_epsilon));
        }
        if self.window_delta > 0.0 && self.tie_epsilon > 0.0 && self.tie_epsilon >= self.window_delta
        {
            return bad(format!(
                "tie_epsilon {} must be smaller than window_delta {}",
                self.tie_epsilon, self.window_delta
            ));
        }
        Ok(())
    }

    fn effective(&self, theta: f64) -> f64 {
        self.convention.effective_angle(theta)
    }
}

/// Which station's detector fired first (decided before any losses).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FirstClick {
    Side1,
    Side2,
}

/// One simulated pair. A click time is present iff its outcome is present;
/// both are dropped together when the detector misses.
#[derive(Debug, Clone, PartialEq)]
pub struct EventRecord {
    pub pair_id: u64,
    pub t1: Option<f64>,
    pub t2: Option<f64>,
    pub outcome1: Option<i8>,
    pub outcome2: Option<i8>,
    pub branch: FirstClick,
}

/// The conditional outcome measure for the measurement that happens second.
///
/// Parameterized by the first station's (effective) angle and outcome only.
/// The remote station is not an input, by construction: the measure is fixed
/// before the second station's setting is ever consulted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchMeasure {
    conditioning_angle: f64,
    first_outcome: i8,
}

impl BranchMeasure {
    pub fn new(conditioning_angle_eff: f64, first_outcome: i8) -> Self {
        debug_assert!(first_outcome == 1 || first_outcome == -1);
        Self { conditioning_angle: conditioning_angle_eff, first_outcome }
    }

    /// P(second = +1) when the second station measures at `local_angle_eff`:
    /// ½(1 − α cos(θ_first − θ_local)).
    pub fn probability_plus(&self, local_angle_eff: f64) -> f64 {
        0.5 * (1.0
            - f64::from(self.first_outcome) * (self.conditioning_angle - local_angle_eff).cos())
    }

    /// The second station's response: a deterministic function of its own
    /// angle and the uniform variate `u` drawn against this measure.
    pub fn draw(&self, local_angle_eff: f64, u: f64) -> i8 {
        if u < self.probability_plus(local_angle_eff) {
            1
        } else {
            -1
        }
    }
}

/// Every random variate a pair consumes, drawn before any setting is read.
/// The draw count is fixed, so streams stay aligned across parameter changes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairRandomness {
    /// Standard-normal jitters for the two click times.
    pub z1: f64,
    pub z2: f64,
    /// Uniform for the first outcome's fair coin.
    pub u_first: f64,
    /// Uniform consumed by the second outcome's branch draw.
    pub u_branch: f64,
    /// Uniforms for the two detector-loss coins.
    pub u_keep1: f64,
    pub u_keep2: f64,
}

/// Dedicated random substream for one pair.
pub fn pair_rng(seed: u64, pair_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(pair_id);
    rng
}

/// Pull a pair's fixed randomness budget from its substream.
pub fn draw_pair_randomness(rng: &mut ChaCha8Rng) -> PairRandomness {
    PairRandomness {
        z1: rng.sample(StandardNormal),
        z2: rng.sample(StandardNormal),
        u_first: rng.random(),
        u_branch: rng.random(),
        u_keep1: rng.random(),
        u_keep2: rng.random(),
    }
}

/// Deterministically turn a pair's randomness into an event record.
pub fn realize_event(pair_id: u64, r: &PairRandomness, cfg: &SimConfig) -> EventRecord {
    let t0 = pair_id as f64;
    let t1 = t0 + cfg.jitter_sigma * r.z1;
    let t2 = t0 + cfg.jitter_sigma * r.z2;
    let branch = if t1 <= t2 { FirstClick::Side1 } else { FirstClick::Side2 };

    let alpha: i8 = if r.u_first < 0.5 { 1 } else { -1 };

    // The branch measure sees the *first* station's setting and outcome; the
    // second station contributes only its own angle to the response.
    let (measure, second_angle) = match branch {
        FirstClick::Side1 => (BranchMeasure::new(cfg.effective(cfg.theta_a), alpha), cfg.theta_b),
        FirstClick::Side2 => (BranchMeasure::new(cfg.effective(cfg.theta_b), alpha), cfg.theta_a),
    };
    let beta = measure.draw(cfg.effective(second_angle), r.u_branch);

    let (o1, o2) = match branch {
        FirstClick::Side1 => (alpha, beta),
        FirstClick::Side2 => (beta, alpha),
    };

    let keep1 = r.u_keep1 < cfg.detector_efficiency;
    let keep2 = r.u_keep2 < cfg.detector_efficiency;
    EventRecord {
        pair_id,
        t1: keep1.then_some(t1),
        t2: keep2.then_some(t2),
        outcome1: keep1.then_some(o1),
        outcome2: keep2.then_some(o2),
        branch,
    }
}

/// Simulate one pair from its substream. The config must already be valid.
pub fn sample_pair(rng: &mut ChaCha8Rng, pair_id: u64, cfg: &SimConfig) -> EventRecord {
    let randomness = draw_pair_randomness(rng);
    realize_event(pair_id, &randomness, cfg)
}

/// Simulate the full run: `n_pairs` records, bit-reproducible from the seed.
pub fn run_experiment(cfg: &SimConfig) -> Result<Vec<EventRecord>> {
    cfg.validate()?;
    let mut events = Vec::with_capacity(cfg.n_pairs as usize);
    for pair_id in 0..cfg.n_pairs {
        let mut rng = pair_rng(cfg.seed, pair_id);
        events.push(sample_pair(&mut rng, pair_id, cfg));
    }
    Ok(events)
}

/// Coincidence-matched counting statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct CoincidenceStats {
    /// `counts[r][c]` over matched pairs, sign order (+1, −1) on both axes.
    pub counts: [[u64; 2]; 2],
    /// Matched pairs where station 1 clicked first.
    pub n_g12: u64,
    /// Matched pairs where station 2 clicked first.
    pub n_g21: u64,
    /// Matched pairs with |t1 − t2| ≤ tie_epsilon.
    pub n_simultaneous: u64,
    /// Pairs with a missing click or |t1 − t2| beyond the window.
    pub n_unmatched: u64,
    /// (N₊₊ + N₋₋ − N₊₋ − N₋₊) / N_matched; `None` when nothing matched.
    pub e_hat: Option<f64>,
    /// √((1 − ê²)/N_matched); `None` when nothing matched.
    pub std_err: Option<f64>,
}

impl CoincidenceStats {
    pub fn n_matched(&self) -> u64 {
        self.n_g12 + self.n_g21 + self.n_simultaneous
    }

    pub fn count(&self, outcome1: i8, outcome2: i8) -> u64 {
        self.counts[sign_index(outcome1)][sign_index(outcome2)]
    }
}

#[inline]
fn sign_index(outcome: i8) -> usize {
    if outcome == 1 {
        0
    } else {
        1
    }
}

/// Classify pairs by the time window and accumulate outcome counts.
///
/// A pair is matched iff both clicks are present and |t1 − t2| ≤ Δ. Matched
/// pairs split into simultaneous (within `tie_epsilon`) and the two
/// click-order groups; the estimator runs over all matched pairs.
pub fn match_coincidences(events: &[EventRecord], cfg: &SimConfig) -> CoincidenceStats {
    let mut stats = CoincidenceStats {
        counts: [[0; 2]; 2],
        n_g12: 0,
        n_g21: 0,
        n_simultaneous: 0,
        n_unmatched: 0,
        e_hat: None,
        std_err: None,
    };
    for event in events {
        let (Some(t1), Some(t2), Some(o1), Some(o2)) =
            (event.t1, event.t2, event.outcome1, event.outcome2)
        else {
            stats.n_unmatched += 1;
            continue;
        };
        let delta = (t1 - t2).abs();
        if delta > cfg.window_delta {
            stats.n_unmatched += 1;
            continue;
        }
        if delta <= cfg.tie_epsilon {
            stats.n_simultaneous += 1;
        } else if t1 < t2 {
            stats.n_g12 += 1;
        } else {
            stats.n_g21 += 1;
        }
        stats.counts[sign_index(o1)][sign_index(o2)] += 1;
    }
    let matched = stats.n_matched();
    if matched > 0 {
        let agree = stats.counts[0][0] + stats.counts[1][1];
        let differ = stats.counts[0][1] + stats.counts[1][0];
        let e = (agree as f64 - differ as f64) / matched as f64;
        stats.e_hat = Some(e);
        stats.std_err = Some(((1.0 - e * e).max(0.0) / matched as f64).sqrt());
    }
    stats
}

/// Correlation estimate with its statistical error and the raw statistics.
#[derive(Debug, Clone)]
pub struct CorrelationEstimate {
    pub e_hat: f64,
    pub std_err: f64,
    pub stats: CoincidenceStats,
}

/// Run, match, and estimate in one call.
///
/// When no pair survives matching there is no estimate; that case is an
/// explicit error rather than a NaN.
pub fn empirical_correlation(cfg: &SimConfig) -> Result<CorrelationEstimate> {
    let events = run_experiment(cfg)?;
    let stats = match_coincidences(&events, cfg);
    match (stats.e_hat, stats.std_err) {
        (Some(e_hat), Some(std_err)) => Ok(CorrelationEstimate { e_hat, std_err, stats }),
        _ => Err(Error::NoMatchedPairs),
    }
}

pub const CSV_HEADER: &str = "pair_id,theta_a,theta_b,t1,t2,outcome1,outcome2";

/// Write events as CSV: times in seconds with 9 decimal digits, empty fields
/// for missing clicks.
pub fn write_events_csv<W: Write>(w: &mut W, events: &[EventRecord], cfg: &SimConfig) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for e in events {
        let time = |t: Option<f64>| t.map(|v| format!("{v:.9}")).unwrap_or_default();
        let outcome = |o: Option<i8>| o.map(|v| v.to_string()).unwrap_or_default();
        writeln!(
            w,
            "{},{:.9},{:.9},{},{},{},{}",
            e.pair_id,
            cfg.theta_a,
            cfg.theta_b,
            time(e.t1),
            time(e.t2),
            outcome(e.outcome1),
            outcome(e.outcome2),
        )?;
    }
    Ok(())
}

/// Read events back from CSV.
///
/// The branch flag is not serialized; it is re-derived from the click order
/// where both times are present. Matching never consults it, so re-ingested
/// events yield the same statistics.
pub fn read_events_csv<R: BufRead>(reader: R) -> Result<Vec<EventRecord>> {
    let mut lines = reader.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::CsvParse { line: 1, msg: "empty input".into() })?;
    let header = header?;
    if header.trim_end() != CSV_HEADER {
        return Err(Error::CsvParse { line: 1, msg: format!("unexpected header '{header}'") });
    }

    let mut events = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(Error::CsvParse {
                line: line_no,
                msg: format!("expected 7 fields, found {}", fields.len()),
            });
        }
        let parse_err = |msg: String| Error::CsvParse { line: line_no, msg };
        let pair_id: u64 =
            fields[0].parse().map_err(|e| parse_err(format!("pair_id: {e}")))?;
        let opt_f64 = |s: &str, what: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                Ok(Some(s.parse().map_err(|e| parse_err(format!("{what}: {e}")))?))
            }
        };
        let opt_outcome = |s: &str, what: &str| -> Result<Option<i8>> {
            match s {
                "" => Ok(None),
                "1" | "+1" => Ok(Some(1)),
                "-1" => Ok(Some(-1)),
                other => Err(parse_err(format!("{what}: invalid outcome '{other}'"))),
            }
        };
        let t1 = opt_f64(fields[3], "t1")?;
        let t2 = opt_f64(fields[4], "t2")?;
        let outcome1 = opt_outcome(fields[5], "outcome1")?;
        let outcome2 = opt_outcome(fields[6], "outcome2")?;
        if t1.is_some() != outcome1.is_some() || t2.is_some() != outcome2.is_some() {
            return Err(parse_err("a click time and its outcome must appear together".into()));
        }
        let branch = match (t1, t2) {
            (Some(a), Some(b)) if b < a => FirstClick::Side2,
            (None, Some(_)) => FirstClick::Side2,
            _ => FirstClick::Side1,
        };
        events.push(EventRecord { pair_id, t1, t2, outcome1, outcome2, branch });
    }
    Ok(events)
}
