//! Physical-consistency certification for the single-qubit channel.
//!
//! Three layers of diagnosis:
//!
//! * **Complete positivity** — the channel's Choi matrix, obtained by
//!   evolving one half of a maximally entangled pair.  Its spectrum
//!   certifies complete positivity of the map at each instant.
//! * **CP-divisibility** — because the closed-form propagator is a
//!   one-parameter semigroup, the intermediate map between times `s` and
//!   `s + tau` is the `tau`-map itself; a single scan over `tau` settles
//!   divisibility for every starting time at once.
//! * **Trajectory analysis** — sampled series of concurrence, mutual
//!   information, Choi minimum eigenvalue and positivity minors, plus a
//!   sequential pass extracting entanglement-increase intervals,
//!   oscillation cycles, sudden death, the onset of complete positivity,
//!   and mutual-information monotonicity violations.

use crate::bath::BathParameters;
use crate::dynamics::{big_omega, PropagatorMatrices};
use crate::entanglement::{mutual_information, XState};
use crate::numerics::hermitian_eig;
use crate::Error;

/// Thresholds separating numerical noise from genuine violations.
#[derive(Clone, Copy, Debug)]
pub struct AnalysisTolerances {
    /// Slack on positive-semidefiniteness checks of 4x4 spectra.
    pub psd: f64,
    /// A forward difference above this counts as a genuine rise.
    pub rise: f64,
    /// Concurrence at or below this counts as dead.
    pub alive: f64,
}

impl Default for AnalysisTolerances {
    fn default() -> Self {
        AnalysisTolerances {
            psd: 1e-11,
            rise: 1e-12,
            alive: 1e-9,
        }
    }
}

/// Spectrum of the Choi matrix of the time-`t` map.
#[derive(Clone, Copy, Debug)]
pub struct ChoiReport {
    pub t: f64,
    /// Smallest Choi eigenvalue; negative values certify that the map is
    /// not completely positive at this `t`.
    pub min_eig: f64,
    /// `min_eig >= -tol` for the tolerance the report was built with.
    pub is_cp: bool,
    /// All four eigenvalues, ascending.  They sum to 1: the evolution
    /// preserves the trace, and the input pair state has trace 1.
    pub spectrum: [f64; 4],
}

/// Sampled trajectory of every per-instant diagnostic.
///
/// All columns have the same length as `grid`.  Samples where the
/// evolved state fails positivity carry NaN for `concurrence` and
/// `mutual_info` — the quantities are undefined there — while the
/// minors and diagnostics columns always carry the raw data showing
/// exactly how positivity failed.
#[derive(Clone, Debug)]
pub struct TimeSeries {
    pub grid: Vec<f64>,
    pub concurrence: Vec<f64>,
    pub mutual_info: Vec<f64>,
    pub choi_min_eig: Vec<f64>,
    pub minor1: Vec<f64>,
    pub minor2: Vec<f64>,
    pub diag_min: Vec<f64>,
    /// System-marginal polarization `R03(t)`.
    pub r03: Vec<f64>,
    /// Determinant of the system-marginal Bloch state, `(1 - R03^2)/4`.
    pub bloch_det: Vec<f64>,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    fn assert_well_formed(&self) {
        let n = self.grid.len();
        for (name, col) in [
            ("concurrence", &self.concurrence),
            ("mutual_info", &self.mutual_info),
            ("choi_min_eig", &self.choi_min_eig),
            ("minor1", &self.minor1),
            ("minor2", &self.minor2),
            ("diag_min", &self.diag_min),
            ("r03", &self.r03),
            ("bloch_det", &self.bloch_det),
        ] {
            assert_eq!(col.len(), n, "column {name} length must match the grid");
        }
    }
}

/// What a trajectory shows, extracted grid-resolved (no root-finding:
/// every reported time is a grid sample, uncertain by one step).
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryFindings {
    /// Maximal runs of rising concurrence, as `(t_start, t_end)`;
    /// disjoint and ordered.
    pub increase_intervals: Vec<(f64, f64)>,
    /// Strict three-point local maxima of concurrence above the alive
    /// threshold, before death.
    pub n_cycles: usize,
    /// First sample from which concurrence stays at or below the alive
    /// threshold to the end of the grid; `None` if it revives or the
    /// grid ends alive.
    pub death_time: Option<f64>,
    /// First sample from which the Choi spectrum stays above `-psd` to
    /// the end of the grid; `None` if the last sample still violates.
    pub t_cp: Option<f64>,
    /// Samples with rising mutual information occurring entirely after
    /// `t_cp`; empty when `t_cp` is `None`.
    pub mi_violations: Vec<f64>,
}

/// Choi matrix spectrum of the time-`t` map, built by evolving one half
/// of the maximally entangled pair `(|00> + |11>)/sqrt(2)`.
///
/// The pair projector is itself an X-state, so the construction runs
/// entirely through the X-state evolution; `tol_psd` only decides the
/// `is_cp` verdict, never the spectrum.
pub fn choi_at(params: &BathParameters, t: f64, tol_psd: f64) -> Result<ChoiReport, Error> {
    let evolved = XState::bell_plus().evolve(params, t)?;
    let spec = hermitian_eig(&evolved.dense())?;
    let spectrum = [
        spec.eigenvalues[0],
        spec.eigenvalues[1],
        spec.eigenvalues[2],
        spec.eigenvalues[3],
    ];
    Ok(ChoiReport {
        t,
        min_eig: spectrum[0],
        is_cp: spectrum[0] >= -tol_psd,
        spectrum,
    })
}

/// Minimum Choi eigenvalue of the intermediate map for each `tau` in
/// `tau_grid`, as `(tau, min_eig)` pairs.
///
/// The propagator family is a semigroup — the map from time `s` to
/// `s + tau` depends only on `tau` — so the `tau`-map Choi answers the
/// divisibility question for every starting time simultaneously.  A
/// negative value at small `tau` means no instant of the evolution is
/// completely positive as a step, even if the cumulative map already is.
pub fn cp_divisibility_scan(
    params: &BathParameters,
    tau_grid: &[f64],
    tol_psd: f64,
) -> Result<Vec<(f64, f64)>, Error> {
    let mut out = Vec::with_capacity(tau_grid.len());
    for &tau in tau_grid {
        if !tau.is_finite() || tau <= 0.0 {
            return Err(Error::InvalidInput {
                context: "divisibility scan".into(),
                detail: format!("step durations must be positive and finite, got {tau}"),
            });
        }
        out.push((tau, choi_at(params, tau, tol_psd)?.min_eig));
    }
    Ok(out)
}

fn validate_grid(grid: &[f64], params: &BathParameters) -> Result<(), Error> {
    if grid.is_empty() {
        return Err(Error::BadTimeGrid);
    }
    if grid.iter().any(|t| !t.is_finite()) || grid[0] < 0.0 {
        return Err(Error::BadTimeGrid);
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::BadTimeGrid);
    }
    // Resolve the coherent oscillation: at least 20 samples per
    // half-revolution, or peak counting aliases.
    let bound = std::f64::consts::PI / big_omega(params) / 20.0;
    let max_step = grid
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0f64, f64::max);
    if max_step > bound {
        return Err(Error::GridTooCoarse {
            step: max_step,
            bound,
        });
    }
    Ok(())
}

/// Evaluates every per-sample diagnostic of the evolved pair state over
/// `grid`.
///
/// The grid must be finite, start at or after 0, increase strictly, and
/// resolve the coherent oscillation (step at most `pi/(20 Omega)`).
pub fn scan_trajectory(
    x0: &XState,
    params: &BathParameters,
    grid: &[f64],
    tol: &AnalysisTolerances,
) -> Result<TimeSeries, Error> {
    validate_grid(grid, params)?;
    let n = grid.len();
    let mut series = TimeSeries {
        grid: grid.to_vec(),
        concurrence: Vec::with_capacity(n),
        mutual_info: Vec::with_capacity(n),
        choi_min_eig: Vec::with_capacity(n),
        minor1: Vec::with_capacity(n),
        minor2: Vec::with_capacity(n),
        diag_min: Vec::with_capacity(n),
        r03: Vec::with_capacity(n),
        bloch_det: Vec::with_capacity(n),
    };
    for &t in grid {
        let coeffs = PropagatorMatrices::at(params, t)?;
        let state = x0.evolve_with(&coeffs);
        let (m1, m2, diag_min) = state.positivity_minors();
        series.minor1.push(m1);
        series.minor2.push(m2);
        series.diag_min.push(diag_min);
        let bloch = state.system_bloch();
        series.r03.push(bloch.r3);
        series.bloch_det.push(bloch.determinant());
        series.choi_min_eig.push(choi_at(params, t, tol.psd)?.min_eig);
        if state.is_physical() {
            series.concurrence.push(state.concurrence()?);
            match mutual_information(&state.dense()) {
                Ok(mi) => series.mutual_info.push(mi),
                // A state can graze the positivity tolerance from below.
                Err(Error::NotPositiveSemidefinite { .. }) => series.mutual_info.push(f64::NAN),
                Err(e) => return Err(e),
            }
        } else {
            series.concurrence.push(f64::NAN);
            series.mutual_info.push(f64::NAN);
        }
    }
    Ok(series)
}

/// Sequential pass over an assembled series.
///
/// NaN samples (undefined concurrence or mutual information) never
/// qualify as rises, maxima, or death — they break runs and push death
/// detection later, which errs on the side of under-reporting.
///
/// Death is reported no earlier than the end of the last increase run,
/// so `death_time >= last interval end` holds by construction even when
/// sub-threshold rises occur inside an otherwise dead tail.
pub fn analyze(series: &TimeSeries, tol: &AnalysisTolerances) -> TrajectoryFindings {
    series.assert_well_formed();
    let n = series.len();
    let grid = &series.grid;
    let c = &series.concurrence;

    // Maximal runs of rising concurrence, as sample index ranges.
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut run_start: Option<usize> = None;
    for i in 0..n.saturating_sub(1) {
        let rising = c[i + 1] - c[i] > tol.rise;
        if rising {
            run_start.get_or_insert(i);
        } else if let Some(s) = run_start.take() {
            runs.push((s, i));
        }
    }
    if let Some(s) = run_start {
        runs.push((s, n - 1));
    }
    let last_rise_end = runs.last().map_or(0, |&(_, e)| e);

    // Death: first sample from which concurrence persists at or below
    // the alive threshold, clamped behind the last rise.
    let last_alive = (0..n).rev().find(|&j| !(c[j] <= tol.alive));
    let death_idx = match last_alive {
        None if n > 0 => Some(last_rise_end),
        Some(j) if j + 1 < n => Some((j + 1).max(last_rise_end)),
        _ => None,
    };

    // Cycles: strict three-point local maxima above threshold, before
    // death.
    let stop = death_idx.unwrap_or(n);
    let n_cycles = (1..n.saturating_sub(1))
        .filter(|&i| i < stop)
        .filter(|&i| c[i] > tol.alive && c[i] > c[i - 1] && c[i] > c[i + 1])
        .count();

    // Onset of complete positivity: first sample from which the Choi
    // spectrum persists above -psd.
    let last_bad = (0..n).rev().find(|&j| series.choi_min_eig[j] < -tol.psd);
    let t_cp_idx = match last_bad {
        None if n > 0 => Some(0),
        Some(j) if j + 1 < n => Some(j + 1),
        _ => None,
    };

    // Mutual-information rises lying entirely after the CP onset.
    let mut mi_violations = Vec::new();
    if let Some(cp) = t_cp_idx {
        let mi = &series.mutual_info;
        for i in cp..n.saturating_sub(1) {
            if mi[i + 1] - mi[i] > tol.rise {
                mi_violations.push(grid[i + 1]);
            }
        }
    }

    TrajectoryFindings {
        increase_intervals: runs.iter().map(|&(s, e)| (grid[s], grid[e])).collect(),
        n_cycles,
        death_time: death_idx.map(|i| grid[i]),
        t_cp: t_cp_idx.map(|i| grid[i]),
        mi_violations,
    }
}
