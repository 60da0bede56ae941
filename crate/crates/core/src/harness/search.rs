//! Uniform and adversarial searches for monochromatic configurations.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::coloring::Coloring;
use super::generate::{check_mode_dim, sample_configuration, Mode, Ranges, State};
use crate::box_invariant::invariant_j;
use crate::config::{ConfigFile, Configuration};
use crate::error::{Error, Result};
use crate::nd_coloring::MARGIN_FLOOR;
use crate::plane::invariant_i;
use crate::rng::{trial_rng, TrialRng};

/// Margin-floor resamples allowed per trial.
pub const RESAMPLE_BUDGET: usize = 64;
/// Witnesses kept in a report (lowest trial indices first).
pub const MAX_WITNESSES: usize = 32;

const ADVERSARIAL_SALT: u64 = 0x5EED_AD5E_0000_0001;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialSpec {
    pub mode: Mode,
    pub trials: u64,
    pub seed: u64,
    pub n: usize,
    pub ranges: Ranges,
    pub margin_floor: f64,
}

impl TrialSpec {
    pub fn new(mode: Mode, n: usize, trials: u64, seed: u64) -> Self {
        Self {
            mode,
            trials,
            seed,
            n,
            ranges: Ranges::default(),
            margin_floor: MARGIN_FLOOR,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Precondition("at least one trial is required".into()));
        }
        if !(self.margin_floor >= 0.0 && self.margin_floor.is_finite()) {
            return Err(Error::Precondition(
                "margin floor must be a finite nonnegative number".into(),
            ));
        }
        check_mode_dim(self.mode, self.n)?;
        self.ranges.validate()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdversarialSpec {
    pub restarts: u64,
    pub steps: u64,
    /// Steps without a strict improvement before the walk is re-randomized.
    pub patience: u64,
}

impl Default for AdversarialSpec {
    fn default() -> Self {
        Self {
            restarts: 1000,
            steps: 1000,
            patience: 200,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub trial: u64,
    pub config: ConfigFile,
    pub vertices: Vec<Vec<f64>>,
    pub colors: Vec<String>,
    pub min_margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdversarialStats {
    pub restarts: u64,
    pub steps: u64,
    pub evaluations: u64,
    pub accepted_moves: u64,
    pub plateau_restarts: u64,
    /// Lowest disagreeing-pair count reached by any walk.
    pub best_score: usize,
    /// Accepted moves that raised the score; always zero.
    pub score_increases: u64,
    /// Position of the first hit if the walks were run one after another.
    pub evaluations_to_first_hit: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    /// Sound coloring, nothing found.
    Pass,
    /// Sound coloring, monochromatic configuration found.
    Failure,
    /// Control coloring with at least one witness.
    ControlHit,
    /// Control coloring that was never broken.
    ControlMiss,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchReport {
    pub coloring: String,
    pub mode: Mode,
    pub n: usize,
    pub seed: u64,
    pub trials: u64,
    pub resamples: u64,
    pub counterexamples: u64,
    pub first_hit: Option<u64>,
    pub min_agreement_gap: usize,
    pub invariant_checks: u64,
    pub invariant_violations: u64,
    pub fast_path_resolved: u64,
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub adversarial: Option<AdversarialStats>,
    pub witnesses: Vec<Witness>,
    pub wall_clock_ms: u64,
}

impl SearchReport {
    pub fn is_failure(&self) -> bool {
        self.outcome == Outcome::Failure
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One row per witness vertex.
    pub fn witnesses_csv(&self) -> String {
        let mut s = String::from("trial,vertex,coordinates,color\n");
        for w in &self.witnesses {
            for (k, (v, c)) in w.vertices.iter().zip(&w.colors).enumerate() {
                let coords: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                let _ = writeln!(s, "{},{k},{},{c}", w.trial, coords.join(" "));
            }
        }
        s
    }

    /// `key,value` summary rows.
    pub fn summary_csv(&self) -> String {
        let mut s = String::from("key,value\n");
        let first = self.first_hit.map(|v| v.to_string()).unwrap_or_default();
        for (k, v) in [
            ("coloring", self.coloring.clone()),
            ("mode", format!("{:?}", self.mode)),
            ("n", self.n.to_string()),
            ("seed", self.seed.to_string()),
            ("trials", self.trials.to_string()),
            ("resamples", self.resamples.to_string()),
            ("counterexamples", self.counterexamples.to_string()),
            ("first_hit", first),
            ("min_agreement_gap", self.min_agreement_gap.to_string()),
            (
                "invariant_violations",
                self.invariant_violations.to_string(),
            ),
            ("outcome", format!("{:?}", self.outcome)),
            ("wall_clock_ms", self.wall_clock_ms.to_string()),
        ] {
            let _ = writeln!(s, "{k},{v}");
        }
        s
    }
}

/// Per-trial tallies, merged associatively.
#[derive(Clone, Debug, Default)]
struct Tally {
    resamples: u64,
    counterexamples: u64,
    first_hit: Option<u64>,
    min_gap: Option<usize>,
    inv_checks: u64,
    inv_violations: u64,
    fast_path: u64,
    witnesses: Vec<Witness>,
}

fn min_opt<T: Ord>(a: Option<T>, b: Option<T>) -> Option<T> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.resamples += other.resamples;
        self.counterexamples += other.counterexamples;
        self.first_hit = min_opt(self.first_hit, other.first_hit);
        self.min_gap = min_opt(self.min_gap, other.min_gap);
        self.inv_checks += other.inv_checks;
        self.inv_violations += other.inv_violations;
        self.fast_path += other.fast_path;
        self.witnesses.extend(other.witnesses);
        self.witnesses.sort_by_key(|w| w.trial);
        self.witnesses.truncate(MAX_WITNESSES);
        self
    }
}

fn witness(coloring: &Coloring, trial: u64, cfg: &Configuration, min_margin: f64) -> Witness {
    let vertices = cfg.points();
    Witness {
        trial,
        config: cfg.to_file(),
        colors: vertices.iter().map(|p| coloring.label(p)).collect(),
        vertices,
        min_margin,
    }
}

/// Invariants that must hold for any configuration of the mode, whatever
/// the coloring: `|I| = 2` for unit-product parallelograms and, for boxes on
/// a certified net, `|J| ∈ (3/4, 5/4)` after undoing the covering rotation.
fn cross_check(coloring: &Coloring, cfg: &Configuration) -> Result<Option<bool>> {
    match cfg {
        Configuration::Rectangle(p) | Configuration::Parallelogram(p) => {
            Ok(Some((invariant_i(p).norm() - 2.0).abs() <= 1e-9))
        }
        Configuration::Box(b) => match coloring.net() {
            Some(net) if net.spec().is_certified() => {
                let i = net.lookup(b.rotation())?;
                let j = invariant_j(&b.rotated_back(&net.member(i)))?.value.abs();
                Ok(Some(j > 0.75 && j < 1.25))
            }
            _ => Ok(None),
        },
        _ => Ok(None),
    }
}

fn draw(
    rng: &mut TrialRng,
    spec: &TrialSpec,
    coloring: &Coloring,
    resamples: &mut u64,
) -> Result<(State, Configuration, super::coloring::Judgement)> {
    for _ in 0..RESAMPLE_BUDGET {
        let (state, cfg) = sample_configuration(rng, spec.mode, spec.n, &spec.ranges)?;
        let j = coloring.judge(&cfg)?;
        if j.min_margin < spec.margin_floor {
            *resamples += 1;
            continue;
        }
        return Ok((state, cfg, j));
    }
    Err(Error::ResampleBudget(RESAMPLE_BUDGET))
}

fn run_trial(spec: &TrialSpec, coloring: &Coloring, trial: u64) -> Result<Tally> {
    let mut rng = trial_rng(spec.seed, trial);
    let mut t = Tally::default();
    let (_, cfg, j) = draw(&mut rng, spec, coloring, &mut t.resamples)?;
    t.min_gap = Some(j.gap);
    if j.fast_path {
        t.fast_path = 1;
    }
    if let Some(ok) = cross_check(coloring, &cfg)? {
        t.inv_checks = 1;
        t.inv_violations = u64::from(!ok);
    }
    if j.monochromatic {
        t.counterexamples = 1;
        t.first_hit = Some(trial);
        t.witnesses
            .push(witness(coloring, trial, &cfg, j.min_margin));
    }
    Ok(t)
}

fn outcome(coloring: &Coloring, hits: u64) -> Outcome {
    match (coloring.is_theorem(), hits > 0) {
        (true, false) => Outcome::Pass,
        (true, true) => Outcome::Failure,
        (false, true) => Outcome::ControlHit,
        (false, false) => Outcome::ControlMiss,
    }
}

fn report(spec: &TrialSpec, coloring: &Coloring, t: Tally, started: Instant) -> SearchReport {
    SearchReport {
        coloring: coloring.name(),
        mode: spec.mode,
        n: spec.n,
        seed: spec.seed,
        trials: spec.trials,
        resamples: t.resamples,
        counterexamples: t.counterexamples,
        first_hit: t.first_hit,
        min_agreement_gap: t.min_gap.unwrap_or(0),
        invariant_checks: t.inv_checks,
        invariant_violations: t.inv_violations,
        fast_path_resolved: t.fast_path,
        outcome: outcome(coloring, t.counterexamples),
        adversarial: None,
        witnesses: t.witnesses,
        wall_clock_ms: started.elapsed().as_millis() as u64,
    }
}

/// Uniform random search. Trial `i` draws from its own stream, so the report
/// (apart from the wall clock) does not depend on the thread count.
pub fn run_search(spec: &TrialSpec, coloring: &Coloring) -> Result<SearchReport> {
    spec.validate()?;
    let started = Instant::now();
    let tally = (0..spec.trials)
        .into_par_iter()
        .map(|i| run_trial(spec, coloring, i))
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
    Ok(report(spec, coloring, tally, started))
}

#[derive(Clone, Debug, Default)]
struct WalkTally {
    base: Tally,
    evaluations: u64,
    accepted: u64,
    plateaus: u64,
    best: Option<usize>,
    increases: u64,
    first_hit_eval: Option<u64>,
}

impl WalkTally {
    fn merge(self, o: WalkTally) -> WalkTally {
        WalkTally {
            base: self.base.merge(o.base),
            evaluations: self.evaluations + o.evaluations,
            accepted: self.accepted + o.accepted,
            plateaus: self.plateaus + o.plateaus,
            best: min_opt(self.best, o.best),
            increases: self.increases + o.increases,
            first_hit_eval: min_opt(self.first_hit_eval, o.first_hit_eval),
        }
    }
}

fn scored(
    rng: &mut TrialRng,
    spec: &TrialSpec,
    coloring: &Coloring,
    t: &mut WalkTally,
) -> Result<(State, usize)> {
    for _ in 0..RESAMPLE_BUDGET {
        let (state, cfg) = sample_configuration(rng, spec.mode, spec.n, &spec.ranges)?;
        let (score, margin) = coloring.disagreeing_pairs(&cfg)?;
        t.evaluations += 1;
        if margin < spec.margin_floor {
            t.base.resamples += 1;
            continue;
        }
        return Ok((state, score));
    }
    Err(Error::ResampleBudget(RESAMPLE_BUDGET))
}

fn walk(
    spec: &TrialSpec,
    adv: &AdversarialSpec,
    coloring: &Coloring,
    restart: u64,
) -> Result<WalkTally> {
    let mut rng = trial_rng(spec.seed ^ ADVERSARIAL_SALT, restart);
    let mut t = WalkTally::default();
    let (mut state, mut score) = scored(&mut rng, spec, coloring, &mut t)?;
    let offset = restart * (adv.steps + 1);
    let mut since_improvement = 0;
    let mut step = 0;
    loop {
        t.best = min_opt(t.best, Some(score));
        if score == 0 {
            let cfg = state.decode()?;
            let j = coloring.judge(&cfg)?;
            if j.monochromatic {
                t.base.counterexamples = 1;
                t.base.first_hit = Some(restart);
                t.first_hit_eval = Some(offset + step + 1);
                t.base
                    .witnesses
                    .push(witness(coloring, restart, &cfg, j.min_margin));
            }
            break;
        }
        if step == adv.steps {
            break;
        }
        step += 1;
        if since_improvement >= adv.patience {
            t.plateaus += 1;
            since_improvement = 0;
            (state, score) = scored(&mut rng, spec, coloring, &mut t)?;
            continue;
        }
        let scale = if rand::Rng::random_bool(&mut rng, 0.2) {
            1.0
        } else {
            0.05
        };
        let cand = state.perturb(&mut rng, &spec.ranges, scale);
        let cfg = cand.decode()?;
        let (s, margin) = coloring.disagreeing_pairs(&cfg)?;
        t.evaluations += 1;
        if margin < spec.margin_floor {
            t.base.resamples += 1;
            since_improvement += 1;
            continue;
        }
        if s <= score {
            t.accepted += 1;
            if s > score {
                t.increases += 1;
            }
            since_improvement = if s < score { 0 } else { since_improvement + 1 };
            state = cand;
            score = s;
        } else {
            since_improvement += 1;
        }
    }
    Ok(t)
}

/// Local descent on the number of disagreeing vertex pairs, with random
/// restarts. `spec.trials` is ignored in favour of `adv.restarts`.
pub fn adversarial_search(
    spec: &TrialSpec,
    adv: &AdversarialSpec,
    coloring: &Coloring,
) -> Result<SearchReport> {
    spec.validate()?;
    if adv.restarts == 0 {
        return Err(Error::Precondition(
            "at least one restart is required".into(),
        ));
    }
    let started = Instant::now();
    let t = (0..adv.restarts)
        .into_par_iter()
        .map(|r| walk(spec, adv, coloring, r))
        .try_reduce(WalkTally::default, |a, b| Ok(a.merge(b)))?;
    let stats = AdversarialStats {
        restarts: adv.restarts,
        steps: adv.steps,
        evaluations: t.evaluations,
        accepted_moves: t.accepted,
        plateau_restarts: t.plateaus,
        best_score: t.best.unwrap_or(0),
        score_increases: t.increases,
        evaluations_to_first_hit: t.first_hit_eval,
    };
    let mut r = report(
        &TrialSpec {
            trials: adv.restarts,
            ..spec.clone()
        },
        coloring,
        t.base,
        started,
    );
    r.min_agreement_gap = 0;
    r.adversarial = Some(stats);
    Ok(r)
}

/// Runs `f` on a pool with `threads` workers (`None` keeps the global pool).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strip(mut r: SearchReport) -> SearchReport {
        r.wall_clock_ms = 0;
        r
    }

    #[test]
    fn plane25_rectangles_small_run() {
        let spec = TrialSpec::new(Mode::Rect2d, 2, 2000, 7);
        let r = run_search(&spec, &Coloring::Plane25).unwrap();
        assert_eq!(r.counterexamples, 0);
        assert_eq!(r.outcome, Outcome::Pass);
        assert_eq!(r.invariant_checks, 2000);
        assert_eq!(r.invariant_violations, 0);
        assert!(r.min_agreement_gap >= 1);
    }

    #[test]
    fn quadrant_control_hits() {
        let spec = TrialSpec::new(Mode::Rect2d, 2, 2000, 1);
        let r = run_search(&spec, &Coloring::Quadrant4).unwrap();
        assert!(r.counterexamples > 0);
        assert_eq!(r.outcome, Outcome::ControlHit);
        let w = &r.witnesses[0];
        assert_eq!(w.vertices.len(), 4);
        assert!(w.colors.iter().all(|c| c == &w.colors[0]));
        assert!(r.witnesses.windows(2).all(|p| p[0].trial < p[1].trial));
        assert!(r.witnesses_csv().lines().count() > 4);
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let spec = TrialSpec::new(Mode::Rect2d, 2, 500, 3);
        let a = with_threads(Some(1), || run_search(&spec, &Coloring::Quadrant4))
            .unwrap()
            .unwrap();
        let b = with_threads(Some(4), || run_search(&spec, &Coloring::Quadrant4))
            .unwrap()
            .unwrap();
        assert_eq!(strip(a).to_json().unwrap(), strip(b).to_json().unwrap());
    }

    #[test]
    fn adversarial_plane25_never_reaches_zero() {
        let spec = TrialSpec::new(Mode::Rect2d, 2, 1, 5);
        let adv = AdversarialSpec {
            restarts: 16,
            steps: 200,
            patience: 50,
        };
        let r = adversarial_search(&spec, &adv, &Coloring::Plane25).unwrap();
        let stats = r.adversarial.as_ref().unwrap();
        assert_eq!(r.counterexamples, 0);
        assert!(stats.best_score >= 1);
        assert_eq!(stats.score_increases, 0);
    }

    #[test]
    fn adversarial_finds_quadrant_witness() {
        let spec = TrialSpec::new(Mode::Rect2d, 2, 1, 5);
        let adv = AdversarialSpec {
            restarts: 4,
            steps: 500,
            patience: 100,
        };
        let r = adversarial_search(&spec, &adv, &Coloring::Quadrant4).unwrap();
        assert!(r.counterexamples > 0);
        assert!(r.adversarial.unwrap().evaluations_to_first_hit.is_some());
    }

    #[test]
    fn invalid_specs() {
        let mut spec = TrialSpec::new(Mode::Rect2d, 2, 0, 1);
        assert!(run_search(&spec, &Coloring::Plane25).is_err());
        spec.trials = 1;
        spec.ranges.aspect = (0.0, 1.0);
        assert!(run_search(&spec, &Coloring::Plane25).is_err());
        let spec = TrialSpec::new(Mode::BoxNd, 3, 1, 1);
        assert!(run_search(&spec, &Coloring::Plane25).is_err());
    }
}
