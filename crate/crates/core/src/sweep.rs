//! Time series, maxima over time, field sweeps and engine comparisons.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{
    bogoliubov_spectrum, envelope_am, pair_observables, resonance_fields, resonant_a_approx, resonant_c2_peak,
    two_qubit_observables, ResonanceTable, TwoQubitSolution,
};
use crate::error::{Error, Result};
use crate::hilbert::{
    all_down_state, build_hamiltonian_capped, parity_expectation, reduced_density, Propagator, StateVector,
    DEFAULT_MAX_SITES,
};
use crate::measures::{pair_density_from_matrix, parity_concurrence, Channel, PairDensity};
use crate::observables::PairObservables;
use crate::params::ChainParams;

/// Largest allowed disagreement between engines when both are run.
pub const ENGINE_AGREEMENT: f64 = 1e-9;
/// Tolerance for the parity and block-structure checks of [`oracle_compare`].
pub const STRUCTURE_TOL: f64 = 1e-10;
/// Upper limit on automatically chosen time horizons.
pub const MAX_HORIZON: f64 = 1e4;
const GOLDEN_ITERATIONS: usize = 50;
// used when no mode frequency is available to set the time scale
const FALLBACK_HORIZON: f64 = 10.0 * PI;
const EVEN_RING_HORIZON: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// Closed forms: two spins, or the fermionic solution for odd rings.
    #[default]
    Analytic,
    /// Dense exact diagonalization.
    Oracle,
    /// Both, failing if they disagree; analytic values are reported.
    Both,
}

impl Engine {
    pub fn label(self) -> &'static str {
        match self {
            Engine::Analytic => "analytic",
            Engine::Oracle => "oracle",
            Engine::Both => "both",
        }
    }

    /// Checks that the engine can handle `params` without doing any work.
    pub fn check(self, params: &ChainParams) -> Result<()> {
        params.validate()?;
        if self != Engine::Oracle && !(params.n == 2 || params.is_odd_chain()) {
            return Err(Error::Unsupported(format!(
                "the analytic engine needs n = 2 or odd n >= 3, got n = {}",
                params.n
            )));
        }
        if self != Engine::Analytic {
            if params.n < 2 {
                return Err(Error::Unsupported("the oracle needs at least two sites".into()));
            }
            if params.n > DEFAULT_MAX_SITES {
                return Err(Error::Capacity { n: params.n, max: DEFAULT_MAX_SITES });
            }
        }
        Ok(())
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "analytic" => Ok(Engine::Analytic),
            "oracle" => Ok(Engine::Oracle),
            "both" => Ok(Engine::Both),
            other => Err(Error::validation(format!("unknown engine '{other}'"))),
        }
    }
}

enum Source {
    TwoQubit { b: f64, g: f64 },
    Fermionic(ChainParams),
    Oracle { propagator: Propagator, psi0: StateVector },
}

impl Source {
    fn analytic(params: &ChainParams) -> Result<Self> {
        Engine::Analytic.check(params)?;
        if params.n == 2 {
            Ok(Source::TwoQubit { b: params.b, g: params.g })
        } else {
            Ok(Source::Fermionic(*params))
        }
    }

    fn oracle(params: &ChainParams) -> Result<Self> {
        Engine::Oracle.check(params)?;
        let h = build_hamiltonian_capped(params, DEFAULT_MAX_SITES)?;
        Ok(Source::Oracle { propagator: Propagator::new(&h), psi0: all_down_state(params)? })
    }

    fn observe(&self, t: f64) -> Result<PairObservables> {
        Ok(self.pair_state(t)?.0)
    }

    /// Observables plus the two-site state; the oracle reads populations straight off `ρ₂`.
    fn pair_state(&self, t: f64) -> Result<(PairObservables, PairDensity)> {
        let obs = match self {
            Source::TwoQubit { b, g } => two_qubit_observables(*b, *g, t),
            Source::Fermionic(p) => pair_observables(p, t)?,
            Source::Oracle { propagator, psi0 } => {
                let rho2 = reduced_density(&propagator.evolve(psi0, t)?, &[0, 1])?;
                return Ok((PairObservables::from_pair_matrix(&rho2)?, pair_density_from_matrix(&rho2)?));
            }
        };
        Ok((obs, obs.pair_density()?))
    }
}

/// Evaluates nearest-neighbour observables for one parameter set with a chosen engine.
///
/// Expensive setup (the oracle's diagonalization) happens once in [`Solver::new`].
pub struct Solver {
    primary: Source,
    cross_check: Option<Source>,
}

impl Solver {
    pub fn new(params: &ChainParams, engine: Engine) -> Result<Self> {
        engine.check(params)?;
        Ok(match engine {
            Engine::Analytic => Self { primary: Source::analytic(params)?, cross_check: None },
            Engine::Oracle => Self { primary: Source::oracle(params)?, cross_check: None },
            Engine::Both => Self { primary: Source::analytic(params)?, cross_check: Some(Source::oracle(params)?) },
        })
    }

    pub fn observables(&self, t: f64) -> Result<PairObservables> {
        Ok(self.pair_state(t)?.0)
    }

    fn pair_state(&self, t: f64) -> Result<(PairObservables, PairDensity)> {
        let state = self.primary.pair_state(t)?;
        if let Some(other) = &self.cross_check {
            let deviation = state.0.max_abs_diff(&other.observe(t)?);
            if deviation > ENGINE_AGREEMENT {
                return Err(Error::EngineMismatch { t, deviation });
            }
        }
        Ok(state)
    }

    pub fn point(&self, t: f64) -> Result<TimePoint> {
        Ok(self.sample(t)?.point)
    }

    fn sample(&self, t: f64) -> Result<Sample> {
        let (obs, pd) = self.pair_state(t)?;
        Ok(Sample::new(t, &obs, &pd))
    }
}

/// One row of a time series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimePoint {
    pub t: f64,
    /// Up-spin probability `⟨S^z⟩ + 1/2`.
    pub a: f64,
    /// One-vs-rest concurrence.
    pub c1: f64,
    /// Nearest-neighbour pair concurrence.
    pub c2: f64,
    pub channel: Channel,
}

impl TimePoint {
    pub fn from_observables(t: f64, obs: &PairObservables) -> Result<Self> {
        Ok(Sample::new(t, obs, &obs.pair_density()?).point)
    }
}

struct Sample {
    point: TimePoint,
    pos: f64,
    neg: f64,
}

impl Sample {
    fn new(t: f64, obs: &PairObservables, pd: &PairDensity) -> Self {
        let a = obs.a().clamp(0.0, 1.0);
        let c2 = parity_concurrence(pd);
        Self {
            point: TimePoint { t, a, c1: 2.0 * (a * (1.0 - a)).sqrt(), c2: c2.value, channel: c2.channel },
            pos: pd.positive_branch(),
            neg: pd.negative_branch(),
        }
    }

    fn objective(&self, k: usize) -> f64 {
        match k {
            0 => self.point.c1,
            1 => self.pos,
            _ => self.neg,
        }
    }
}

/// `steps` equally spaced times from 0 to `t_max` inclusive.
pub fn uniform_grid(t_max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::validation(format!("time horizon must be positive, got {t_max}")));
    }
    if steps < 2 {
        return Err(Error::validation(format!("need at least 2 time steps, got {steps}")));
    }
    let last = (steps - 1) as f64;
    Ok((0..steps).map(|k| t_max * k as f64 / last).collect())
}

/// `(t, a, c1, c2, channel)` on the given times, in input order.
pub fn time_series(params: &ChainParams, t_grid: &[f64], engine: Engine) -> Result<Vec<TimePoint>> {
    let solver = Solver::new(params, engine)?;
    t_grid.par_iter().map(|&t| solver.point(t)).collect()
}

/// Maxima over time for one field value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub b: f64,
    pub c1_max: f64,
    pub t_at_c1_max: f64,
    pub c2_max_pos: f64,
    pub c2_max_neg: f64,
    /// Upper envelope of `a(t)`; unknown for even rings with `n ≥ 4`.
    pub a_envelope: Option<f64>,
}

/// Closed-form upper envelope of `a(t)` when one is available.
pub fn a_envelope(params: &ChainParams) -> Option<f64> {
    if params.n == 2 {
        Some(TwoQubitSolution::new(params.b, params.g).a_m)
    } else {
        envelope_am(params).ok()
    }
}

/// `10π/λ_min` capped at [`MAX_HORIZON`], where `λ_min` is the slowest nonzero mode.
pub fn default_horizon(params: &ChainParams) -> f64 {
    let lambdas: Vec<f64> = if params.n == 2 {
        vec![params.b.hypot(params.g)]
    } else if let Ok(modes) = bogoliubov_spectrum(params) {
        modes.iter().map(|m| m.lambda).collect()
    } else {
        return EVEN_RING_HORIZON;
    };
    lambdas
        .into_iter()
        .filter(|&l| l > 1e-12)
        .min_by(f64::total_cmp)
        .map_or(FALLBACK_HORIZON, |l| (10.0 * PI / l).min(MAX_HORIZON))
}

fn golden_max<F>(f: &F, lo: f64, hi: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..GOLDEN_ITERATIONS {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc >= fd { (c, fc) } else { (d, fd) })
}

/// Scans `t_steps` times over `[0, t_horizon]` for the largest `c1` and the largest
/// pair concurrence in each parity channel, optionally polishing each grid
/// maximum by golden-section search between its neighbours.
pub fn max_over_time(
    params: &ChainParams,
    t_horizon: f64,
    t_steps: usize,
    refine: bool,
    engine: Engine,
) -> Result<SweepRow> {
    let grid = uniform_grid(t_horizon, t_steps)?;
    let solver = Solver::new(params, engine)?;
    let samples: Vec<Sample> = grid.par_iter().map(|&t| solver.sample(t)).collect::<Result<_>>()?;

    let mut best = [(0.0, f64::NEG_INFINITY); 3];
    for (k, slot) in best.iter_mut().enumerate() {
        let mut arg = 0;
        for (i, s) in samples.iter().enumerate() {
            if s.objective(k) > samples[arg].objective(k) {
                arg = i;
            }
        }
        *slot = (grid[arg], samples[arg].objective(k));
        if refine {
            let lo = grid[arg.saturating_sub(1)];
            let hi = grid[(arg + 1).min(grid.len() - 1)];
            let f = |t: f64| solver.sample(t).map(|s| s.objective(k));
            let (t, v) = golden_max(&f, lo, hi)?;
            if v > slot.1 {
                *slot = (t, v);
            }
        }
    }
    Ok(SweepRow {
        b: params.b,
        c1_max: best[0].1.clamp(0.0, 1.0),
        t_at_c1_max: best[0].0,
        c2_max_pos: best[1].1.clamp(0.0, 1.0),
        c2_max_neg: best[2].1.clamp(0.0, 1.0),
        a_envelope: a_envelope(params),
    })
}

/// A sweep over the transverse field with everything else held fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Chain parameters; `b` is replaced by each swept value.
    pub params: ChainParams,
    /// `(min, max, steps)`, both ends included.
    pub b_range: (f64, f64, usize),
    /// Fixed horizon, or `None` for [`default_horizon`] at each field.
    pub t_horizon: Option<f64>,
    pub t_steps: usize,
    pub refine: bool,
    pub engine: Engine,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi, steps) = self.b_range;
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(Error::validation(format!("invalid field range [{lo}, {hi}]")));
        }
        if steps < 2 {
            return Err(Error::validation(format!("need at least 2 field steps, got {steps}")));
        }
        if let Some(h) = self.t_horizon {
            if !(h.is_finite() && h > 0.0) {
                return Err(Error::validation(format!("time horizon must be positive, got {h}")));
            }
        }
        if self.t_steps < 2 {
            return Err(Error::validation(format!("need at least 2 time steps, got {}", self.t_steps)));
        }
        self.engine.check(&self.params)
    }

    pub fn fields(&self) -> Vec<f64> {
        let (lo, hi, steps) = self.b_range;
        let last = (steps - 1) as f64;
        (0..steps).map(|k| lo + (hi - lo) * k as f64 / last).collect()
    }
}

/// One [`SweepRow`] per field value, in increasing `b`.
pub fn field_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    config
        .fields()
        .par_iter()
        .map(|&b| {
            let p = config.params.with_field(b);
            let horizon = config.t_horizon.unwrap_or_else(|| default_horizon(&p));
            max_over_time(&p, horizon, config.t_steps, config.refine, config.engine)
        })
        .collect()
}

/// Indices of local maxima of `ys` whose topographic prominence is at least
/// `min_prominence`. A flat top counts once, at its middle sample; the two end
/// samples never count.
pub fn prominent_peaks(ys: &[f64], min_prominence: f64) -> Vec<usize> {
    let mut peaks = Vec::new();
    let mut i = 1;
    while i + 1 < ys.len() {
        if ys[i] > ys[i - 1] {
            let mut right = i;
            while right + 1 < ys.len() && ys[right + 1] == ys[i] {
                right += 1;
            }
            if right + 1 < ys.len() && ys[right + 1] < ys[i] {
                let top = ys[i];
                let left_min = ys[..i].iter().rev().take_while(|&&y| y <= top).fold(top, |m, &y| m.min(y));
                let right_min = ys[right + 1..].iter().take_while(|&&y| y <= top).fold(top, |m, &y| m.min(y));
                if top - left_min.max(right_min) >= min_prominence {
                    peaks.push((i + right) / 2);
                }
            }
            i = right + 1;
        } else {
            i += 1;
        }
    }
    peaks
}

/// One `(b, v, g, t)` sample for engine comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub b: f64,
    pub v: f64,
    pub g: f64,
    pub t: f64,
}

/// `points` samples with `|b|, |v|, |g| ≤ 3` and `t ∈ [0, 10]`, reproducible from `seed`.
pub fn random_grid(points: usize, seed: u64) -> Vec<GridPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..points)
        .map(|_| GridPoint {
            b: rng.random_range(-3.0..=3.0),
            v: rng.random_range(-3.0..=3.0),
            g: rng.random_range(-3.0..=3.0),
            t: rng.random_range(0.0..=10.0),
        })
        .collect()
}

/// Largest absolute deviation of each observable.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FieldDeviations {
    pub sz: f64,
    pub spm: f64,
    pub spp: f64,
    pub szz: f64,
}

impl FieldDeviations {
    pub fn max(&self) -> f64 {
        self.sz.max(self.spm).max(self.spp).max(self.szz)
    }

    fn between(a: &PairObservables, b: &PairObservables) -> Self {
        Self {
            sz: (a.sz - b.sz).abs(),
            spm: (a.spm - b.spm).abs(),
            spp: (a.spp - b.spp).norm(),
            szz: (a.szz - b.szz).abs(),
        }
    }

    fn merge(self, o: Self) -> Self {
        Self { sz: self.sz.max(o.sz), spm: self.spm.max(o.spm), spp: self.spp.max(o.spp), szz: self.szz.max(o.szz) }
    }
}

/// Outcome of comparing the analytic engine with the oracle on a grid.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub n: usize,
    pub points: usize,
    /// `|analytic − oracle|` per observable.
    pub deviation: FieldDeviations,
    /// Oracle `⟨S^z S^z⟩` against the Wick combination of the oracle's other observables.
    pub wick: f64,
    /// `|⟨P⟩ − 1|` of the evolved state.
    pub parity: f64,
    /// Largest off-diagonal magnitude of the one-site reduced matrix.
    pub rho1_offdiag: f64,
    /// Largest entry outside the parity-symmetric two-site pattern, including the
    /// gap between the two middle diagonal entries.
    pub rho2_off_pattern: f64,
    /// Largest entry difference between two-site reductions on different bonds.
    pub translation: f64,
}

impl CompareReport {
    pub fn structure_max(&self) -> f64 {
        self.parity.max(self.rho1_offdiag).max(self.rho2_off_pattern).max(self.translation)
    }

    /// Observables and Wick within `tolerance`; structure within [`STRUCTURE_TOL`].
    pub fn passes(&self, tolerance: f64) -> bool {
        self.deviation.max() <= tolerance && self.wick <= tolerance && self.structure_max() <= STRUCTURE_TOL
    }

    fn merge(self, o: Self) -> Self {
        Self {
            n: self.n,
            points: self.points + o.points,
            deviation: self.deviation.merge(o.deviation),
            wick: self.wick.max(o.wick),
            parity: self.parity.max(o.parity),
            rho1_offdiag: self.rho1_offdiag.max(o.rho1_offdiag),
            rho2_off_pattern: self.rho2_off_pattern.max(o.rho2_off_pattern),
            translation: self.translation.max(o.translation),
        }
    }
}

fn compare_point(n: usize, p: &GridPoint) -> Result<CompareReport> {
    let params = ChainParams::new(n, p.b, p.v, p.g)?;
    let analytic = Source::analytic(&params)?.observe(p.t)?;
    let h = build_hamiltonian_capped(&params, DEFAULT_MAX_SITES)?;
    let psi = Propagator::new(&h).evolve(&all_down_state(&params)?, p.t)?;

    let rho2 = reduced_density(&psi, &[0, 1])?;
    let m = rho2.matrix();
    const OFF_PATTERN: [(usize, usize); 8] = [(0, 1), (0, 2), (1, 0), (2, 0), (1, 3), (2, 3), (3, 1), (3, 2)];
    let off_pattern = OFF_PATTERN.iter().map(|&(r, c)| m[(r, c)].norm()).fold((m[(1, 1)] - m[(2, 2)]).norm(), f64::max);
    let mut translation = 0.0f64;
    for i in 1..n {
        let other = reduced_density(&psi, &[i, (i + 1) % n])?;
        translation = (other.matrix() - m).iter().map(|z| z.norm()).fold(translation, f64::max);
    }

    let oracle = PairObservables::from_pair_matrix(&rho2)?;
    let wick = PairObservables::from_wick(oracle.sz, oracle.spm, oracle.spp);
    Ok(CompareReport {
        n,
        points: 1,
        deviation: FieldDeviations::between(&analytic, &oracle),
        wick: (wick.szz - oracle.szz).abs(),
        parity: (parity_expectation(&psi) - 1.0).abs(),
        rho1_offdiag: reduced_density(&psi, &[0])?.entry(0, 1).norm(),
        rho2_off_pattern: off_pattern,
        translation,
    })
}

/// Runs both engines on every grid point of an `n`-site ring and reports the worst deviations.
pub fn oracle_compare(n: usize, grid: &[GridPoint]) -> Result<CompareReport> {
    let probe = ChainParams::new(n, 0.0, 1.0, 1.0)?;
    Engine::Both.check(&probe)?;
    let reports: Vec<CompareReport> = grid.par_iter().map(|p| compare_point(n, p)).collect::<Result<_>>()?;
    Ok(reports.into_iter().fold(CompareReport { n, ..Default::default() }, CompareReport::merge))
}

/// Time series at one field of a [`ResonanceReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceSeries {
    pub label: String,
    pub b: f64,
    pub max_a: f64,
    pub max_c2_neg: f64,
    pub points: Vec<TimePoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApproxPoint {
    pub t: f64,
    pub a: f64,
}

/// Behaviour on and near the `j`-th resonance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceReport {
    pub params: ChainParams,
    pub j: usize,
    pub table: ResonanceTable,
    /// `b_adjacent − b_j`, the signed distance to the neighbouring resonance.
    pub delta: f64,
    pub t_horizon: f64,
    /// On the peak, a tenth of the way to the neighbour, and halfway.
    pub series: Vec<ResonanceSeries>,
    /// Single-mode approximation `(2/n) sin²(λ_j t)` on the same times.
    pub approximation: Vec<ApproxPoint>,
    pub predicted_c2_peak: f64,
}

/// Time series at `b_j`, `b_j + δ/10` and `b_j + δ/2`, where `δ` points to the
/// neighbouring resonance (`j − 1`, or `j + 1` for `j = 1`).
pub fn resonance_report(
    params: &ChainParams,
    j: usize,
    t_horizon: Option<f64>,
    t_steps: usize,
) -> Result<ResonanceReport> {
    let table = resonance_fields(params)?;
    let count = table.fields.len();
    if j == 0 || j > count {
        return Err(Error::validation(format!("mode {j} out of range; valid modes are 1..={count}")));
    }
    if count < 2 {
        return Err(Error::validation(format!("n = {} has a single resonance, so no spacing is defined", params.n)));
    }
    let here = table.fields[j - 1];
    let adjacent = if j == 1 { table.fields[1] } else { table.fields[j - 2] };
    let delta = adjacent.b_center - here.b_center;
    let t_horizon = match t_horizon {
        Some(h) => h,
        None if here.lambda_res > 1e-12 => (10.0 * PI / here.lambda_res).min(MAX_HORIZON),
        None => FALLBACK_HORIZON,
    };
    let grid = uniform_grid(t_horizon, t_steps)?;

    let series = [("on_peak", 0.0), ("tenth", 0.1), ("mid", 0.5)]
        .into_iter()
        .map(|(label, frac)| {
            let b = here.b_center + frac * delta;
            let points = time_series(&params.with_field(b), &grid, Engine::Analytic)?;
            let max_a = points.iter().map(|p| p.a).fold(0.0, f64::max);
            let max_c2_neg =
                points.iter().filter(|p| p.channel == Channel::NegativeParity).map(|p| p.c2).fold(0.0, f64::max);
            Ok(ResonanceSeries { label: label.to_string(), b, max_a, max_c2_neg, points })
        })
        .collect::<Result<Vec<_>>>()?;

    let approximation =
        grid.iter().map(|&t| ApproxPoint { t, a: resonant_a_approx(params.n, params.g, j, t) }).collect();
    Ok(ResonanceReport {
        params: *params,
        j,
        table,
        delta,
        t_horizon,
        series,
        approximation,
        predicted_c2_peak: resonant_c2_peak(params.n, j),
    })
}
