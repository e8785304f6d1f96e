//! Sample paths of the stochastic GLV model.
//!
//! Paths are generated with the Euler-Maruyama scheme applied to the
//! log-abundances `u = log x`:
//!
//! ```text
//! u_{j+1} = u_j + (R + A e^{u_j}) Δ + σ ∘ √Δ ε_j
//! ```
//!
//! so every emitted abundance is strictly positive. Observation schedules
//! must land on the fine grid; values are read off at exact grid indices.
//! Noise is consumed species-by-species within each step.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, ObservationSeries};
use crate::numerics::{DenseMatrix, RngStream};

/// `u` beyond this magnitude makes `e^u` overflow-prone; the replicate is
/// aborted instead of clamped.
const LOG_EXPLOSION: f64 = 700.0;
const GRID_TOL: f64 = 1e-9;

/// Distribution of observation gaps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingSchedule {
    pub gaps: Vec<f64>,
    pub probs: Vec<f64>,
    pub n_obs: usize,
}

impl SamplingSchedule {
    pub fn new(gaps: Vec<f64>, probs: Vec<f64>, n_obs: usize) -> Result<Self> {
        let s = Self { gaps, probs, n_obs };
        s.validate()?;
        Ok(s)
    }

    /// Gaps 0.1/0.3/0.5 with probabilities 0.7/0.2/0.1.
    pub fn irregular_default(n_obs: usize) -> Self {
        Self {
            gaps: vec![0.1, 0.3, 0.5],
            probs: vec![0.7, 0.2, 0.1],
            n_obs,
        }
    }

    /// Every gap equal to `gap`.
    pub fn uniform(gap: f64, n_obs: usize) -> Self {
        Self {
            gaps: vec![gap],
            probs: vec![1.0],
            n_obs,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.gaps.is_empty() || self.gaps.len() != self.probs.len() {
            return Err(Error::InvalidInput(
                "schedule needs matching, non-empty gap and probability lists".into(),
            ));
        }
        if self.gaps.iter().any(|&g| !(g > 0.0 && g.is_finite())) {
            return Err(Error::InvalidInput("schedule gaps must be positive".into()));
        }
        if self.probs.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::InvalidInput("probabilities must be nonnegative".into()));
        }
        let total: f64 = self.probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("probabilities sum to {total}, not 1")));
        }
        if self.n_obs < 2 {
            return Err(Error::InvalidInput("schedule needs at least 2 observations".into()));
        }
        Ok(())
    }
}

/// Fine-grid settings of a simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub fine_dt: f64,
    pub x0: Vec<f64>,
    pub seed: u64,
    pub stream_id: u64,
}

impl SimConfig {
    pub fn new(x0: Vec<f64>, seed: u64, stream_id: u64) -> Self {
        Self {
            fine_dt: 0.01,
            x0,
            seed,
            stream_id,
        }
    }

    pub fn rng(&self) -> RngStream {
        RngStream::new(self.seed, self.stream_id)
    }

    fn validate(&self, n: usize) -> Result<()> {
        if !(self.fine_dt > 0.0 && self.fine_dt.is_finite()) {
            return Err(Error::InvalidInput("fine_dt must be positive".into()));
        }
        if self.x0.len() != n {
            return Err(Error::Dimension(format!(
                "x0 has {} entries, model has {n} species",
                self.x0.len()
            )));
        }
        if self.x0.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::InvalidInput("x0 must be strictly positive".into()));
        }
        Ok(())
    }

    /// Number of fine steps covering `span`, which must be a grid multiple.
    pub fn steps_for(&self, span: f64) -> Result<usize> {
        let steps = (span / self.fine_dt).round();
        if !(steps >= 0.0) || (steps * self.fine_dt - span).abs() > GRID_TOL * span.abs().max(1.0) {
            return Err(Error::InvalidInput(format!(
                "{span} is not a multiple of the fine step {}",
                self.fine_dt
            )));
        }
        Ok(steps as usize)
    }
}

/// Log-abundance path on the fine grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub fine_dt: f64,
    /// `(steps + 1) × N` log-abundances.
    pub log_values: DenseMatrix,
}

impl Trajectory {
    pub fn n_points(&self) -> usize {
        self.log_values.rows()
    }

    pub fn time(&self, j: usize) -> f64 {
        j as f64 * self.fine_dt
    }

    pub fn x(&self, j: usize) -> Vec<f64> {
        self.log_values.row(j).iter().map(|u| u.exp()).collect()
    }
}

/// Draws observation times `t_1 = 0 < t_2 < ...` with i.i.d. gaps.
pub fn sample_schedule(schedule: &SamplingSchedule, rng: &mut RngStream) -> Result<Vec<f64>> {
    schedule.validate()?;
    let mut times = Vec::with_capacity(schedule.n_obs);
    let mut t = 0.0;
    times.push(t);
    for _ in 1..schedule.n_obs {
        t += schedule.gaps[draw_category(&schedule.probs, rng)];
        times.push(t);
    }
    Ok(times)
}

fn draw_category(probs: &[f64], rng: &mut RngStream) -> usize {
    let u = rng.uniform();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // Rounding in the cumulative sum: fall back to the last positive entry.
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(probs.len() - 1)
}

struct Stepper<'a> {
    params: &'a ModelParams,
    growth: Vec<f64>,
    noise_scale: Vec<f64>,
    dt: f64,
    u: Vec<f64>,
    x: Vec<f64>,
    step: usize,
}

impl<'a> Stepper<'a> {
    fn new(params: &'a ModelParams, config: &SimConfig) -> Result<Self> {
        config.validate(params.n_species())?;
        let sq = config.fine_dt.sqrt();
        Ok(Self {
            params,
            growth: params.corrected_growth(),
            noise_scale: params.sigma().iter().map(|s| s * sq).collect(),
            dt: config.fine_dt,
            u: config.x0.iter().map(|x| x.ln()).collect(),
            x: config.x0.clone(),
            step: 0,
        })
    }

    fn advance(&mut self, rng: &mut RngStream) -> Result<()> {
        let a = self.params.a();
        let n = self.u.len();
        for k in 0..n {
            let drift = self.growth[k] + a.row(k).iter().zip(&self.x).map(|(akl, xl)| akl * xl).sum::<f64>();
            self.u[k] += drift * self.dt + self.noise_scale[k] * rng.normal();
        }
        self.step += 1;
        for k in 0..n {
            if !(self.u[k].abs() <= LOG_EXPLOSION) {
                return Err(Error::Explosion {
                    step: self.step,
                    time: self.step as f64 * self.dt,
                });
            }
            self.x[k] = self.u[k].exp();
        }
        Ok(())
    }
}

/// Euler-Maruyama path of `u = log x` over `[0, horizon]`.
pub fn simulate_log_euler(
    params: &ModelParams,
    config: &SimConfig,
    horizon: f64,
    rng: &mut RngStream,
) -> Result<Trajectory> {
    let steps = config.steps_for(horizon)?;
    let mut stepper = Stepper::new(params, config)?;
    let n = params.n_species();
    let mut data = Vec::with_capacity((steps + 1) * n);
    data.extend_from_slice(&stepper.u);
    for _ in 0..steps {
        stepper.advance(rng)?;
        data.extend_from_slice(&stepper.u);
    }
    Ok(Trajectory {
        fine_dt: config.fine_dt,
        log_values: DenseMatrix::from_row_major(steps + 1, n, data)?,
    })
}

/// Simulates on the fine grid and records the state at `times`, which must
/// start at 0 and fall on grid points. Emitted times are exact grid times.
pub fn simulate_at_times(
    params: &ModelParams,
    config: &SimConfig,
    times: &[f64],
    rng: &mut RngStream,
) -> Result<ObservationSeries> {
    let indices = times.iter().map(|&t| config.steps_for(t)).collect::<Result<Vec<_>>>()?;
    if indices.first() != Some(&0) {
        return Err(Error::InvalidInput("observation times must start at t = 0".into()));
    }
    if indices.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(
            "observation times must be strictly increasing on the fine grid".into(),
        ));
    }
    let mut stepper = Stepper::new(params, config)?;
    let n = params.n_species();
    let mut data = Vec::with_capacity(indices.len() * n);
    for &target in &indices {
        while stepper.step < target {
            stepper.advance(rng)?;
        }
        data.extend_from_slice(&stepper.x);
    }
    ObservationSeries::new(
        indices.iter().map(|&j| j as f64 * config.fine_dt).collect(),
        DenseMatrix::from_row_major(indices.len(), n, data)?,
    )
}

/// Draws a schedule, then simulates and subsamples at it.
pub fn simulate_observed(
    params: &ModelParams,
    config: &SimConfig,
    schedule: &SamplingSchedule,
    rng: &mut RngStream,
) -> Result<ObservationSeries> {
    for &g in &schedule.gaps {
        config.steps_for(g)?;
    }
    let times = sample_schedule(schedule, rng)?;
    simulate_at_times(params, config, &times, rng)
}

/// Classical GLV `dx/dt = x ∘ (r + A x)` by fourth-order Runge-Kutta.
pub fn deterministic_glv_flow(params: &ModelParams, x0: &[f64], t_end: f64, dt: f64) -> Result<Vec<f64>> {
    let n = params.n_species();
    if x0.len() != n {
        return Err(Error::Dimension("x0 length differs from species count".into()));
    }
    if x0.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::InvalidInput("x0 must be strictly positive".into()));
    }
    if !(dt > 0.0) || !(t_end >= 0.0) {
        return Err(Error::InvalidInput("need dt > 0 and t_end >= 0".into()));
    }
    let rhs = |x: &[f64]| -> Vec<f64> {
        let ax = params.a().mat_vec(x);
        x.iter()
            .zip(params.r())
            .zip(ax)
            .map(|((xk, rk), axk)| xk * (rk + axk))
            .collect()
    };
    let axpy = |x: &[f64], h: f64, k: &[f64]| -> Vec<f64> { x.iter().zip(k).map(|(a, b)| a + h * b).collect() };
    let full_steps = (t_end / dt).floor() as usize;
    let remainder = t_end - full_steps as f64 * dt;
    let mut x = x0.to_vec();
    let mut t = 0.0;
    let rk4 = |x: &mut Vec<f64>, h: f64| {
        let k1 = rhs(x);
        let k2 = rhs(&axpy(x, 0.5 * h, &k1));
        let k3 = rhs(&axpy(x, 0.5 * h, &k2));
        let k4 = rhs(&axpy(x, h, &k3));
        for i in 0..x.len() {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    };
    for _ in 0..full_steps {
        rk4(&mut x, dt);
        t += dt;
        if x.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::LeftOrthant { time: t });
        }
    }
    if remainder > 1e-12 * dt {
        rk4(&mut x, remainder);
        if x.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::LeftOrthant { time: t_end });
        }
    }
    Ok(x)
}

/// Writes `time,x_1,...,x_N` with 17 significant digits per value.
pub fn write_series_csv(series: &ObservationSeries, mut out: impl Write) -> std::io::Result<()> {
    write!(out, "time")?;
    for label in series.labels() {
        write!(out, ",{label}")?;
    }
    writeln!(out)?;
    for i in 0..series.n_obs() {
        write!(out, "{:.16e}", series.times()[i])?;
        for v in series.x(i) {
            write!(out, ",{v:.16e}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn save_series_csv(series: &ObservationSeries, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    write_series_csv(series, &mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

/// Reads a `time,<label_1>,...` series CSV.
pub fn load_series_csv(path: impl AsRef<Path>) -> Result<ObservationSeries> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    if headers.get(0) != Some("time") || headers.len() < 2 {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: "header must be `time,<species>...`".into(),
        });
    }
    let labels: Vec<String> = headers.iter().skip(1).map(str::to_owned).collect();
    let mut times = Vec::new();
    let mut data = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let parse = |s: &str| -> Result<f64> {
            s.parse::<f64>().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line,
                message: format!("`{s}` is not a number"),
            })
        };
        times.push(parse(&record[0])?);
        for field in record.iter().skip(1) {
            data.push(parse(field)?);
        }
    }
    let rows = times.len();
    ObservationSeries::with_labels(times, DenseMatrix::from_row_major(rows, labels.len(), data)?, labels)
}

pub(crate) fn csv_error(path: &Path, e: csv::Error) -> Error {
    if e.is_io_error() {
        if let csv::ErrorKind::Io(source) = e.into_kind() {
            return Error::io(path, source);
        }
        unreachable!("checked io kind");
    }
    let line = e.position().map_or(0, |p| p.line());
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: e.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn logistic(sigma: f64) -> ModelParams {
        ModelParams::new(
            vec![1.0],
            DenseMatrix::from_rows(vec![vec![-1.0]]).unwrap(),
            vec![sigma],
        )
        .unwrap()
    }

    #[test]
    fn degenerate_schedule() {
        let s = SamplingSchedule::new(vec![0.1, 0.3, 0.5], vec![1.0, 0.0, 0.0], 4).unwrap();
        let t = sample_schedule(&s, &mut RngStream::new(1, 0)).unwrap();
        let expect = [0.0, 0.1, 0.2, 0.3];
        assert_eq!(t.len(), 4);
        for (a, b) in t.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn two_point_schedule_draws_one_gap() {
        let s = SamplingSchedule::irregular_default(2);
        let mut rng = RngStream::new(3, 0);
        let t = sample_schedule(&s, &mut rng).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(rng.counter(), 1);
    }

    #[test]
    fn invalid_probabilities_rejected() {
        assert!(SamplingSchedule::new(vec![0.1, 0.2], vec![0.5, 0.6], 3).is_err());
        assert!(SamplingSchedule::new(vec![0.1], vec![1.0], 1).is_err());
    }

    #[test]
    fn fixed_point_stays_put() {
        let cfg = SimConfig::new(vec![1.0], 0, 0);
        let traj = simulate_log_euler(&logistic(0.0), &cfg, 5.0, &mut cfg.rng()).unwrap();
        assert_eq!(traj.n_points(), 501);
        assert!(traj.log_values.as_slice().iter().all(|&u| u == 0.0));
    }

    #[test]
    fn fixed_point_observed_values_are_one() {
        let cfg = SimConfig::new(vec![1.0], 0, 0);
        let sched = SamplingSchedule::irregular_default(50);
        let s = simulate_observed(&logistic(0.0), &cfg, &sched, &mut cfg.rng()).unwrap();
        assert!(s.values().as_slice().iter().all(|&x| x == 1.0));
    }

    #[test]
    fn off_grid_times_rejected() {
        let cfg = SimConfig::new(vec![1.0], 0, 0);
        let r = simulate_at_times(&logistic(0.1), &cfg, &[0.0, 0.015], &mut cfg.rng());
        assert!(matches!(r, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn explosion_flagged() {
        let p = ModelParams::new(vec![1.0], DenseMatrix::from_rows(vec![vec![5.0]]).unwrap(), vec![0.1]).unwrap();
        let cfg = SimConfig::new(vec![1.0], 0, 0);
        let r = simulate_log_euler(&p, &cfg, 10.0, &mut cfg.rng());
        assert!(matches!(r, Err(Error::Explosion { .. })));
    }

    #[test]
    fn logistic_rk4_equilibrium() {
        let x = deterministic_glv_flow(&logistic(0.0), &[1.0], 7.3, 0.01).unwrap();
        assert_eq!(x, vec![1.0]);
    }

    #[test]
    fn logistic_rk4_closed_form() {
        let x = deterministic_glv_flow(&logistic(0.0), &[0.5], 5.0, 1e-3).unwrap();
        let exact = 1.0 / (1.0 + (-5.0f64).exp());
        assert!((x[0] - exact).abs() < 1e-8);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let cfg = SimConfig::new(vec![0.3], 5, 2);
        let s = simulate_observed(
            &logistic(0.2),
            &cfg,
            &SamplingSchedule::irregular_default(20),
            &mut cfg.rng(),
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        save_series_csv(&s, &path).unwrap();
        assert_eq!(load_series_csv(&path).unwrap(), s);
    }
}
