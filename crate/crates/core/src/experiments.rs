//! Monte Carlo harnesses: recovery phase diagrams over `(p, q)` grids and
//! distance statistics against their regime predictions, with CSV output
//! and a JSON envelope for exact replay.

use std::io::{Read, Write};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distance::{distance_stats, predicted_regime, DistanceStats, Regime, RegimePrediction};
use crate::error::{Error, Result};
use crate::metric::{lp_recovery_verdict, MetricOptions, VerdictKind};
use crate::rng::derive_seed;
use crate::sampling::sample_sbm;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseConfig {
    pub n: usize,
    /// Within-side edge probabilities, one grid row each.
    pub p: Vec<f64>,
    /// Cross edge probabilities; only `q < p` cells are run.
    pub q: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    /// Worker threads; 0 uses the global pool.
    pub threads: usize,
    pub metric: MetricOptions,
}

/// `start, start + step, ...` up to `stop` inclusive, rounded to 1e-12.
pub fn axis(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    (0..count)
        .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
        .collect()
}

impl PhaseConfig {
    /// `n = 40`, `p, q ∈ {0.50, 0.55, ..., 0.95}`, 10 trials per cell.
    pub fn desk(seed: u64) -> Self {
        Self {
            n: 40,
            p: axis(0.5, 0.95, 0.05),
            q: axis(0.5, 0.95, 0.05),
            trials: 10,
            seed,
            threads: 0,
            metric: MetricOptions::default(),
        }
    }

    /// `n = 100`, `p, q ∈ {0.00, 0.05, ..., 1.00}`, 20 trials per cell.
    /// Expect several hours on a desktop.
    pub fn full(seed: u64) -> Self {
        Self {
            n: 100,
            p: axis(0.0, 1.0, 0.05),
            q: axis(0.0, 1.0, 0.05),
            trials: 20,
            seed,
            threads: 0,
            metric: MetricOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 4 || self.n % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "n = {} must be even and >= 4",
                self.n
            )));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if let Some(x) = self
            .p
            .iter()
            .chain(&self.q)
            .find(|x| !(0.0..=1.0).contains(*x))
        {
            return Err(Error::InvalidParameter(format!(
                "probability {x} outside [0, 1]"
            )));
        }
        Ok(())
    }

    /// Cells in row-major order (by `p`, then `q`) with their grid index.
    pub fn cells(&self) -> Vec<(u64, f64, f64)> {
        let mut out = Vec::new();
        for (a, &p) in self.p.iter().enumerate() {
            for (b, &q) in self.q.iter().enumerate() {
                if q < p {
                    out.push(((a * self.q.len() + b) as u64, p, q));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub seed: u64,
    /// `None` when the trial failed; see `error`.
    pub kind: Option<VerdictKind>,
    pub lp_value: f64,
    pub planted_value: f64,
    pub delta: Option<f64>,
    pub ms: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub p: f64,
    pub q: f64,
    pub n: usize,
    pub trials: usize,
    pub successes: usize,
    /// Mean of `|E0| - lp` over trials that finished.
    pub mean_gap: f64,
    pub mean_ms: f64,
    pub records: Vec<TrialRecord>,
}

impl CellResult {
    pub fn fraction(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }

    pub fn errors(&self) -> usize {
        self.records.iter().filter(|r| r.error.is_some()).count()
    }
}

fn run_trial(n: usize, p: f64, q: f64, seed: u64, opts: &MetricOptions) -> TrialRecord {
    let start = Instant::now();
    let outcome = sample_sbm(n, p, q, seed).and_then(|inst| lp_recovery_verdict(&inst, opts));
    let ms = start.elapsed().as_secs_f64() * 1e3;
    match outcome {
        Ok(v) => TrialRecord {
            seed,
            kind: Some(v.kind),
            lp_value: v.lp_value,
            planted_value: v.planted_value,
            delta: v.delta,
            ms,
            error: None,
        },
        Err(e) => TrialRecord {
            seed,
            kind: None,
            lp_value: f64::NAN,
            planted_value: f64::NAN,
            delta: None,
            ms,
            error: Some(e.to_string()),
        },
    }
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if threads == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Runs every `q < p` cell of the grid. Trial failures are recorded in the
/// cell and count as non-recoveries.
pub fn run_phase_diagram(cfg: &PhaseConfig) -> Result<Vec<CellResult>> {
    run_cells(cfg, &cfg.cells())
}

/// Runs a subset of cells, each given as `(grid index, p, q)` from
/// [`PhaseConfig::cells`]. Seeds depend only on the grid index, so a cell
/// gives the same result whether run alone or within the full grid.
pub fn run_cells(cfg: &PhaseConfig, cells: &[(u64, f64, f64)]) -> Result<Vec<CellResult>> {
    cfg.validate()?;
    let tasks: Vec<(usize, u64, f64, f64)> = cells
        .iter()
        .enumerate()
        .flat_map(|(c, &(idx, p, q))| {
            (0..cfg.trials as u64).map(move |t| (c, derive_seed(cfg.seed, idx, t), p, q))
        })
        .collect();
    let records: Vec<TrialRecord> = in_pool(cfg.threads, || {
        tasks
            .par_iter()
            .map(|&(_, seed, p, q)| run_trial(cfg.n, p, q, seed, &cfg.metric))
            .collect()
    })?;
    let mut out = Vec::with_capacity(cells.len());
    for (c, chunk) in records.chunks(cfg.trials).enumerate() {
        let (_, p, q) = cells[c];
        let finished: Vec<&TrialRecord> = chunk.iter().filter(|r| r.error.is_none()).collect();
        let mean_gap = if finished.is_empty() {
            f64::NAN
        } else {
            finished
                .iter()
                .map(|r| r.planted_value - r.lp_value)
                .sum::<f64>()
                / finished.len() as f64
        };
        out.push(CellResult {
            p,
            q,
            n: cfg.n,
            trials: cfg.trials,
            successes: chunk
                .iter()
                .filter(|r| r.kind == Some(VerdictKind::Recovered))
                .count(),
            mean_gap,
            mean_ms: chunk.iter().map(|r| r.ms).sum::<f64>() / chunk.len() as f64,
            records: chunk.to_vec(),
        });
    }
    Ok(out)
}

/// Writes `p,q,n,trials,successes,mean_gap,mean_ms`.
pub fn write_phase_csv<W: Write>(cells: &[CellResult], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["p", "q", "n", "trials", "successes", "mean_gap", "mean_ms"])?;
    for c in cells {
        out.write_record([
            c.p.to_string(),
            c.q.to_string(),
            c.n.to_string(),
            c.trials.to_string(),
            c.successes.to_string(),
            format!("{:.9}", c.mean_gap),
            format!("{:.3}", c.mean_ms),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// One row of the phase CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseRow {
    pub p: f64,
    pub q: f64,
    pub n: usize,
    pub trials: usize,
    pub successes: usize,
    pub mean_gap: f64,
    pub mean_ms: f64,
}

pub fn read_phase_csv<R: Read>(r: R) -> Result<Vec<PhaseRow>> {
    let mut rd = csv::Reader::from_reader(r);
    let headers = rd.headers()?.clone();
    let expected = ["p", "q", "n", "trials", "successes", "mean_gap", "mean_ms"];
    if headers.iter().ne(expected) {
        return Err(Error::Parse {
            line: 1,
            msg: format!("unexpected header {headers:?}"),
        });
    }
    Ok(rd.deserialize().collect::<std::result::Result<_, _>>()?)
}

/// Everything needed to rerun a phase diagram and check the result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseEnvelope {
    pub version: String,
    pub config: PhaseConfig,
    /// Trial seeds per cell, in cell order.
    pub seeds: Vec<Vec<u64>>,
    pub cells: Vec<CellResult>,
}

impl PhaseEnvelope {
    pub fn new(config: PhaseConfig, cells: Vec<CellResult>) -> Self {
        let seeds = cells
            .iter()
            .map(|c| c.records.iter().map(|r| r.seed).collect())
            .collect();
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            seeds,
            cells,
        }
    }

    pub fn write<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, self)?;
        Ok(())
    }

    pub fn read<R: Read>(r: R) -> Result<Self> {
        Ok(serde_json::from_reader(r)?)
    }

    /// Reruns the stored configuration.
    pub fn replay(&self) -> Result<Vec<CellResult>> {
        run_phase_diagram(&self.config)
    }
}

/// Where the success fraction of a row first drops below 1/2, scanning
/// upward in `q` and interpolating linearly between the neighbouring cells.
/// `None` if the row never drops below 1/2 or starts below it.
pub fn half_contour(row: &[CellResult]) -> Option<f64> {
    let mut sorted: Vec<&CellResult> = row.iter().collect();
    sorted.sort_by(|a, b| a.q.total_cmp(&b.q));
    let k = sorted.iter().position(|c| c.fraction() < 0.5)?;
    if k == 0 {
        return None;
    }
    let (lo, hi) = (sorted[k - 1], sorted[k]);
    let (fl, fh) = (lo.fraction(), hi.fraction());
    Some(lo.q + (hi.q - lo.q) * (fl - 0.5) / (fl - fh))
}

/// Rows where the success fraction rises by more than `noise` from one `q`
/// to the next, counted per `p`.
pub fn monotonicity_violations(cells: &[CellResult], noise: f64) -> Vec<(f64, usize)> {
    let mut ps: Vec<f64> = cells.iter().map(|c| c.p).collect();
    ps.dedup();
    ps.into_iter()
        .map(|p| {
            let mut row: Vec<&CellResult> = cells.iter().filter(|c| c.p == p).collect();
            row.sort_by(|a, b| a.q.total_cmp(&b.q));
            let bad = row
                .windows(2)
                .filter(|w| w[1].fraction() > w[0].fraction() + noise)
                .count();
            (p, bad)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceConfig {
    pub n: usize,
    pub regime: Regime,
    pub seeds: usize,
    pub seed: u64,
    pub eps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceRow {
    pub seed: u64,
    pub p: f64,
    pub q: f64,
    pub stats: DistanceStats,
    pub prediction: RegimePrediction,
    pub rho_max_ok: bool,
    pub pass: bool,
}

/// Edge probabilities of a regime at size `n`.
pub fn regime_probabilities(n: usize, regime: Regime) -> (f64, f64) {
    let nf = n as f64;
    match regime {
        Regime::VeryDense { p, q } => (p, q),
        Regime::Dense { omega, alpha, beta } => (alpha * nf.powf(-omega), beta * nf.powf(-omega)),
        Regime::Log { alpha, beta } => (alpha * nf.ln() / nf, beta * nf.ln() / nf),
    }
}

/// Samples one block model per seed and checks its distances against the
/// predicted band. Refuses regimes without a prediction.
pub fn run_distance_experiment(cfg: &DistanceConfig) -> Result<Vec<DistanceRow>> {
    let prediction = predicted_regime(cfg.n, cfg.regime, cfg.eps)?;
    let (p, q) = regime_probabilities(cfg.n, cfg.regime);
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidParameter(format!(
            "regime gives probabilities p = {p}, q = {q} at n = {}",
            cfg.n
        )));
    }
    (0..cfg.seeds as u64)
        .into_par_iter()
        .map(|t| {
            let seed = derive_seed(cfg.seed, 0, t);
            let inst = sample_sbm(cfg.n, p, q, seed)?;
            let stats = distance_stats(inst.graph());
            let rho_max_ok = stats.rho_max.is_some_and(|m| {
                let m = f64::from(m);
                if prediction.rho_max_exact {
                    m == prediction.rho_max
                } else {
                    m <= prediction.rho_max
                }
            });
            Ok(DistanceRow {
                seed,
                p,
                q,
                pass: prediction.contains(&stats),
                stats,
                prediction,
                rho_max_ok,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(seed: u64) -> PhaseConfig {
        PhaseConfig {
            n: 12,
            p: vec![0.9, 1.0],
            q: vec![0.0, 0.2, 0.8],
            trials: 3,
            seed,
            threads: 0,
            metric: MetricOptions::default(),
        }
    }

    fn deterministic_csv(cells: &[CellResult]) -> String {
        let mut buf = Vec::new();
        write_phase_csv(cells, &mut buf).unwrap();
        // wall-clock column dropped
        String::from_utf8(buf)
            .unwrap()
            .lines()
            .map(|l| l.rsplit_once(',').unwrap().0.to_string())
            .collect::<Vec<_>>()
            .join("\n")
    }

    #[test]
    fn axes_and_cells() {
        let a = axis(0.5, 0.95, 0.05);
        assert_eq!(a.len(), 10);
        assert_eq!(a[3], 0.65);
        assert_eq!(*a.last().unwrap(), 0.95);
        assert_eq!(PhaseConfig::desk(0).cells().len(), 45);
        assert!(PhaseConfig {
            trials: 0,
            ..tiny(0)
        }
        .validate()
        .is_err());
    }

    #[test]
    fn disconnected_communities_always_recover() {
        let cfg = PhaseConfig {
            n: 16,
            p: vec![1.0],
            q: vec![0.0],
            trials: 5,
            ..tiny(3)
        };
        let cells = run_phase_diagram(&cfg).unwrap();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].successes, 5);
        assert_eq!(cells[0].mean_gap, 0.0);
    }

    #[test]
    fn same_result_on_any_thread_count() {
        let one = run_phase_diagram(&PhaseConfig {
            threads: 1,
            ..tiny(9)
        })
        .unwrap();
        let two = run_phase_diagram(&PhaseConfig {
            threads: 2,
            ..tiny(9)
        })
        .unwrap();
        assert_eq!(deterministic_csv(&one), deterministic_csv(&two));
        assert_eq!(one.len(), 6);
    }

    #[test]
    fn single_cells_match_the_grid() {
        let cfg = tiny(5);
        let all = run_phase_diagram(&cfg).unwrap();
        let cells = cfg.cells();
        let one = run_cells(&cfg, &cells[4..5]).unwrap();
        assert_eq!(
            one[0].records.iter().map(|r| r.seed).collect::<Vec<_>>(),
            all[4].records.iter().map(|r| r.seed).collect::<Vec<_>>()
        );
        assert_eq!(one[0].successes, all[4].successes);
    }

    #[test]
    fn envelope_replays() {
        let cfg = tiny(21);
        let cells = run_phase_diagram(&cfg).unwrap();
        let env = PhaseEnvelope::new(cfg, cells);
        let mut buf = Vec::new();
        env.write(&mut buf).unwrap();
        let back = PhaseEnvelope::read(buf.as_slice()).unwrap();
        assert_eq!(back.config, env.config);
        assert_eq!(back.seeds, env.seeds);
        let again = back.replay().unwrap();
        assert_eq!(deterministic_csv(&again), deterministic_csv(&env.cells));
        for (a, b) in again.iter().zip(&env.cells) {
            for (x, y) in a.records.iter().zip(&b.records) {
                assert_eq!((x.seed, x.kind, x.delta), (y.seed, y.kind, y.delta));
            }
        }
    }

    #[test]
    fn csv_round_trip_and_schema() {
        let cells = run_phase_diagram(&tiny(4)).unwrap();
        let mut buf = Vec::new();
        write_phase_csv(&cells, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("p,q,n,trials,successes,mean_gap,mean_ms\n0.9,0,12,3,"));
        let rows = read_phase_csv(buf.as_slice()).unwrap();
        assert_eq!(rows.len(), cells.len());
        for (r, c) in rows.iter().zip(&cells) {
            assert_eq!(
                (r.p, r.q, r.n, r.trials, r.successes),
                (c.p, c.q, c.n, c.trials, c.successes)
            );
        }
        assert!(read_phase_csv("a,b\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn contour_interpolation() {
        let cell = |q: f64, s: usize| CellResult {
            p: 0.9,
            q,
            n: 10,
            trials: 10,
            successes: s,
            mean_gap: 0.0,
            mean_ms: 0.0,
            records: Vec::new(),
        };
        let row = vec![cell(0.2, 6), cell(0.1, 10), cell(0.3, 2)];
        assert!((half_contour(&row).unwrap() - 0.225).abs() < 1e-12);
        assert_eq!(half_contour(&[cell(0.1, 10)]), None);
        assert_eq!(monotonicity_violations(&row, 0.0), vec![(0.9, 0)]);
    }

    #[test]
    fn distance_regimes() {
        let rows = run_distance_experiment(&DistanceConfig {
            n: 200,
            regime: Regime::VeryDense { p: 0.9, q: 0.7 },
            seeds: 5,
            seed: 1,
            eps: 0.1,
        })
        .unwrap();
        assert!(rows.iter().all(|r| r.rho_max_ok && r.pass));
        let refused = run_distance_experiment(&DistanceConfig {
            n: 200,
            regime: Regime::Log {
                alpha: 1.2,
                beta: 0.6,
            },
            seeds: 5,
            seed: 1,
            eps: 0.1,
        });
        assert!(refused.is_err());
    }
}
