//! Scenario configuration, resolution, and artifact writers.
//!
//! A scenario is described by a flat `key = value` text file with `#`
//! comments and dotted key groups:
//!
//! ```text
//! mode = redfield            # or davies
//! bath.omega = 1.0           # frequency, sets the unit system
//! bath.a = 0.005             # rates as fractions of omega
//! bath.b = 0.05
//! bath.alpha = 0.001
//! bath.gamma = 0.001
//! bath.ratio = 0.5           # w/gamma; or bath.beta (units 1/omega)
//! state.mu = 0.025           # four-parameter family ...
//! state.nu = 0.1
//! state.u = 0.02
//! state.v = 0.125
//! grid.t_max = 400.0         # units 1/omega
//! grid.samples = 8001
//! ```
//!
//! Alternatives: `bath.correlations = samples.csv` with `bath.coupling`
//! (and optional `bath.beta`) resolves the rates by quadrature of
//! sampled correlation functions; `state.rho11 ... state.im23` give the
//! initial X-state entrywise; `tol.psd`, `tol.rise`, `tol.alive`
//! override analysis thresholds; `sweep.<key> = start:stop:points`
//! declares parameter sweep axes (used by the sweep command, ignored by
//! the others).
//!
//! Times in every output CSV are in units of `1/omega`, so outputs are
//! invariant under rescaling `omega` at fixed fractional rates.  All
//! floats are written with 17 significant digits: identical
//! configuration yields byte-identical artifacts.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::bath::{BathParameters, CorrelationSamples};
use crate::diagnostics::{
    analyze, choi_at, cp_divisibility_scan, scan_trajectory, AnalysisTolerances, TimeSeries,
    TrajectoryFindings,
};
use crate::dynamics::davies_average;
use crate::entanglement::{concurrence_slope_zero_temperature, FamilyParams, XState};
use crate::Error;

/// A failure carrying the process phase it occurred in, which fixes the
/// exit code: configuration and validation problems exit 2, runtime
/// resolution problems exit 3.
#[derive(Debug)]
pub enum Failure {
    Config(Error),
    Runtime(Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            Failure::Runtime(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(e) => write!(f, "configuration error: {e}"),
            Failure::Runtime(e) => write!(f, "runtime error: {e}"),
        }
    }
}

/// Command-line overrides applied on top of a parsed configuration.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    /// Replaces `grid.samples`.
    pub grid: Option<usize>,
    /// Replaces `tol.psd`.
    pub tol_psd: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Redfield,
    Davies,
}

impl Mode {
    fn as_str(self) -> &'static str {
        match self {
            Mode::Redfield => "redfield",
            Mode::Davies => "davies",
        }
    }
}

/// Initial two-qubit state: either the four-parameter family or
/// explicit X-state entries.
#[derive(Clone, Copy, Debug)]
pub enum InitialState {
    Family(FamilyParams),
    Explicit(XState),
}

impl InitialState {
    pub fn to_xstate(&self) -> Result<XState, Error> {
        match self {
            InitialState::Family(f) => f.to_xstate(),
            InitialState::Explicit(x) => Ok(*x),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct GridSpec {
    /// Horizon in units of `1/omega`.
    pub t_max: f64,
    /// Number of samples including `t = 0`.
    pub samples: usize,
}

impl GridSpec {
    /// Sample times in units of `1/omega` (the CSV `t` column).
    pub fn times(&self) -> Vec<f64> {
        let n = self.samples;
        (0..n)
            .map(|i| self.t_max * i as f64 / (n - 1) as f64)
            .collect()
    }
}

/// A fully resolved run description.
#[derive(Clone, Debug)]
pub struct Scenario {
    /// Bath parameters before any mode transformation.
    pub params: BathParameters,
    pub mode: Mode,
    pub initial: InitialState,
    pub grid: GridSpec,
    pub tol: AnalysisTolerances,
    /// Sweep axes: key -> (start, stop, points), sorted by key.
    pub sweeps: BTreeMap<String, (f64, f64, usize)>,
}

impl Scenario {
    /// Parameters the dynamics actually runs with: the configured rates,
    /// ergodically averaged in Davies mode.
    pub fn effective_params(&self) -> BathParameters {
        match self.mode {
            Mode::Redfield => self.params,
            Mode::Davies => davies_average(&self.params),
        }
    }

    /// Sample times in absolute units (rates and times both carry
    /// `omega`; outputs divide it back out).
    fn absolute_times(&self) -> Vec<f64> {
        let omega = self.params.omega();
        self.grid.times().into_iter().map(|t| t / omega).collect()
    }

    /// The built-in reference scenario: the oscillatory-entanglement
    /// demonstration rates and initial family state, on a grid that
    /// resolves every oscillation and extends well past sudden death.
    pub fn builtin_reference() -> Scenario {
        Scenario::from_config_text(BUILTIN_REFERENCE_CONFIG, Path::new("."))
            .expect("the built-in configuration must resolve")
    }

    /// Parses and fully validates a configuration text.  `base_dir`
    /// anchors relative paths (correlation-sample CSV files).
    pub fn from_config_text(text: &str, base_dir: &Path) -> Result<Scenario, Error> {
        let map = ConfigMap::parse(text)?;
        Scenario::from_map(&map, base_dir)
    }

    fn from_map(map: &ConfigMap, base_dir: &Path) -> Result<Scenario, Error> {
        map.check_known_keys()?;

        let mode = match map.get_str("mode")?.unwrap_or("redfield") {
            "redfield" => Mode::Redfield,
            "davies" => Mode::Davies,
            other => {
                return Err(Error::InvalidInput {
                    context: "config".into(),
                    detail: format!("mode must be `redfield` or `davies`, got `{other}`"),
                })
            }
        };

        let omega = map.get_f64("bath.omega")?.unwrap_or(1.0);
        let params = if map.contains("bath.correlations") {
            Scenario::bath_from_correlations(map, base_dir, omega)?
        } else {
            Scenario::bath_from_rates(map, omega)?
        };

        let initial = Scenario::initial_from_map(map)?;
        // Validate the initial state up front, whatever its form.
        initial.to_xstate()?;

        let t_max = map.require_f64("grid.t_max")?;
        if !t_max.is_finite() || t_max <= 0.0 {
            return Err(Error::InvalidInput {
                context: "config".into(),
                detail: format!("grid.t_max must be positive and finite, got {t_max}"),
            });
        }
        let samples = map.require_usize("grid.samples")?;
        if samples < 2 {
            return Err(Error::InvalidInput {
                context: "config".into(),
                detail: format!("grid.samples must be at least 2, got {samples}"),
            });
        }

        let defaults = AnalysisTolerances::default();
        let tol = AnalysisTolerances {
            psd: map.get_f64("tol.psd")?.unwrap_or(defaults.psd),
            rise: map.get_f64("tol.rise")?.unwrap_or(defaults.rise),
            alive: map.get_f64("tol.alive")?.unwrap_or(defaults.alive),
        };
        for (name, value) in [("tol.psd", tol.psd), ("tol.rise", tol.rise), ("tol.alive", tol.alive)]
        {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidInput {
                    context: "config".into(),
                    detail: format!("{name} must be nonnegative and finite, got {value}"),
                });
            }
        }

        let sweeps = Scenario::sweeps_from_map(map)?;

        Ok(Scenario {
            params,
            mode,
            initial,
            grid: GridSpec { t_max, samples },
            tol,
            sweeps,
        })
    }

    fn bath_from_rates(map: &ConfigMap, omega: f64) -> Result<BathParameters, Error> {
        let mut rates = [0.0; 4];
        for (slot, key) in rates
            .iter_mut()
            .zip(["bath.a", "bath.b", "bath.alpha", "bath.gamma"])
        {
            *slot = map.require_f64(key)? * omega;
        }
        let [a, b, alpha, gamma] = rates;
        let ratio = map.get_f64("bath.ratio")?;
        let beta = map.get_f64("bath.beta")?;
        let params = match (ratio, beta) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidInput {
                    context: "config".into(),
                    detail: "give either bath.ratio or bath.beta, not both".into(),
                })
            }
            (None, None) => {
                return Err(Error::InvalidInput {
                    context: "config".into(),
                    detail: "the thermal state needs bath.ratio (w/gamma) or bath.beta".into(),
                })
            }
            (Some(r), None) => BathParameters::with_ratio(omega, a, b, alpha, gamma, r)?,
            (None, Some(beta_frac)) => {
                // beta is configured in units 1/omega.
                let beta = beta_frac / omega;
                let w = gamma * (beta * omega).tanh();
                BathParameters::new(omega, omega, a, b, alpha, gamma, w, beta)?
            }
        };
        match map.get_f64("bath.omega_tilde")? {
            Some(frac) => params.with_omega_tilde(frac * omega),
            None => Ok(params),
        }
    }

    fn bath_from_correlations(
        map: &ConfigMap,
        base_dir: &Path,
        omega: f64,
    ) -> Result<BathParameters, Error> {
        for forbidden in [
            "bath.a",
            "bath.b",
            "bath.alpha",
            "bath.gamma",
            "bath.ratio",
            "bath.omega_tilde",
        ] {
            if map.contains(forbidden) {
                return Err(Error::InvalidInput {
                    context: "config".into(),
                    detail: format!(
                        "{forbidden} cannot be combined with bath.correlations (rates are derived)"
                    ),
                });
            }
        }
        let rel = map.require_str("bath.correlations")?;
        let path: PathBuf = base_dir.join(rel);
        let coupling = map.require_f64("bath.coupling")?;
        let samples = CorrelationSamples::from_csv_path(&path, coupling)?;
        // beta in units 1/omega, as in the direct-rate form.
        let beta = map.get_f64("bath.beta")?.map(|frac| frac / omega);
        let (params, _) = samples.to_bath_parameters(omega, beta)?;
        Ok(params)
    }

    fn initial_from_map(map: &ConfigMap) -> Result<InitialState, Error> {
        const FAMILY: [&str; 4] = ["state.mu", "state.nu", "state.u", "state.v"];
        const EXPLICIT: [&str; 8] = [
            "state.rho11",
            "state.rho22",
            "state.rho33",
            "state.rho44",
            "state.re14",
            "state.im14",
            "state.re23",
            "state.im23",
        ];
        let n_family = FAMILY.iter().filter(|k| map.contains(k)).count();
        let n_explicit = EXPLICIT.iter().filter(|k| map.contains(k)).count();
        match (n_family, n_explicit) {
            (4, 0) => {
                let f = FamilyParams::new(
                    map.require_f64("state.mu")?,
                    map.require_f64("state.nu")?,
                    map.require_f64("state.u")?,
                    map.require_f64("state.v")?,
                );
                f.validate()?;
                Ok(InitialState::Family(f))
            }
            (0, 8) => {
                let x = XState::new(
                    map.require_f64("state.rho11")?,
                    map.require_f64("state.rho22")?,
                    map.require_f64("state.rho33")?,
                    map.require_f64("state.rho44")?,
                    Complex64::new(map.require_f64("state.re14")?, map.require_f64("state.im14")?),
                    Complex64::new(map.require_f64("state.re23")?, map.require_f64("state.im23")?),
                )?;
                if !x.is_physical() {
                    return Err(Error::UnphysicalState {
                        detail: "the explicit initial state fails positivity".into(),
                    });
                }
                Ok(InitialState::Explicit(x))
            }
            (0, 0) => Err(Error::InvalidInput {
                context: "config".into(),
                detail: "an initial state is required: state.mu/nu/u/v or state.rho11..state.im23"
                    .into(),
            }),
            _ => Err(Error::InvalidInput {
                context: "config".into(),
                detail: "give the complete family block (state.mu/nu/u/v) or the complete \
                         explicit block (state.rho11..state.im23), not a mixture"
                    .into(),
            }),
        }
    }

    fn sweeps_from_map(map: &ConfigMap) -> Result<BTreeMap<String, (f64, f64, usize)>, Error> {
        let mut sweeps = BTreeMap::new();
        for (key, value) in map.with_prefix("sweep.") {
            let target = key.strip_prefix("sweep.").unwrap();
            if !SWEEPABLE_KEYS.contains(&target) {
                return Err(Error::InvalidInput {
                    context: "config".into(),
                    detail: format!(
                        "{key}: `{target}` is not sweepable (allowed: {})",
                        SWEEPABLE_KEYS.join(", ")
                    ),
                });
            }
            let parts: Vec<&str> = value.split(':').collect();
            let bad = |detail: String| Error::InvalidInput {
                context: format!("config key {key}"),
                detail,
            };
            if parts.len() != 3 {
                return Err(bad(format!(
                    "sweep ranges are start:stop:points, got `{value}`"
                )));
            }
            let start: f64 = parts[0]
                .trim()
                .parse()
                .map_err(|_| bad(format!("bad start `{}`", parts[0])))?;
            let stop: f64 = parts[1]
                .trim()
                .parse()
                .map_err(|_| bad(format!("bad stop `{}`", parts[1])))?;
            let points: usize = parts[2]
                .trim()
                .parse()
                .map_err(|_| bad(format!("bad point count `{}`", parts[2])))?;
            if !start.is_finite() || !stop.is_finite() {
                return Err(bad("sweep endpoints must be finite".into()));
            }
            sweeps.insert(target.to_string(), (start, stop, points));
        }
        Ok(sweeps)
    }

    /// The configuration echo: every resolved parameter, in config
    /// syntax, with full float precision.  Parsing this text back
    /// reproduces the run.
    pub fn echo_config(&self) -> String {
        let mut s = String::new();
        let omega = self.params.omega();
        let _ = writeln!(s, "mode = {}", self.mode.as_str());
        let _ = writeln!(s, "bath.omega = {}", fmt_float(omega));
        let _ = writeln!(s, "bath.a = {}", fmt_float(self.params.a() / omega));
        let _ = writeln!(s, "bath.b = {}", fmt_float(self.params.b() / omega));
        let _ = writeln!(s, "bath.alpha = {}", fmt_float(self.params.alpha() / omega));
        let _ = writeln!(s, "bath.gamma = {}", fmt_float(self.params.gamma() / omega));
        let _ = writeln!(s, "bath.ratio = {}", fmt_float(self.params.kms_ratio()));
        let _ = writeln!(
            s,
            "bath.omega_tilde = {}",
            fmt_float(self.params.omega_tilde() / omega)
        );
        match &self.initial {
            InitialState::Family(f) => {
                let _ = writeln!(s, "state.mu = {}", fmt_float(f.mu));
                let _ = writeln!(s, "state.nu = {}", fmt_float(f.nu));
                let _ = writeln!(s, "state.u = {}", fmt_float(f.u));
                let _ = writeln!(s, "state.v = {}", fmt_float(f.v));
            }
            InitialState::Explicit(x) => {
                let _ = writeln!(s, "state.rho11 = {}", fmt_float(x.rho11()));
                let _ = writeln!(s, "state.rho22 = {}", fmt_float(x.rho22()));
                let _ = writeln!(s, "state.rho33 = {}", fmt_float(x.rho33()));
                let _ = writeln!(s, "state.rho44 = {}", fmt_float(x.rho44()));
                let _ = writeln!(s, "state.re14 = {}", fmt_float(x.rho14().re));
                let _ = writeln!(s, "state.im14 = {}", fmt_float(x.rho14().im));
                let _ = writeln!(s, "state.re23 = {}", fmt_float(x.rho23().re));
                let _ = writeln!(s, "state.im23 = {}", fmt_float(x.rho23().im));
            }
        }
        let _ = writeln!(s, "grid.t_max = {}", fmt_float(self.grid.t_max));
        let _ = writeln!(s, "grid.samples = {}", self.grid.samples);
        let _ = writeln!(s, "tol.psd = {}", fmt_float(self.tol.psd));
        let _ = writeln!(s, "tol.rise = {}", fmt_float(self.tol.rise));
        let _ = writeln!(s, "tol.alive = {}", fmt_float(self.tol.alive));
        for (key, (start, stop, points)) in &self.sweeps {
            let _ = writeln!(
                s,
                "sweep.{key} = {}:{}:{points}",
                fmt_float(*start),
                fmt_float(*stop)
            );
        }
        s
    }
}

/// Keys a sweep may vary.
const SWEEPABLE_KEYS: [&str; 9] = [
    "bath.a",
    "bath.alpha",
    "bath.b",
    "bath.gamma",
    "bath.ratio",
    "state.mu",
    "state.nu",
    "state.u",
    "state.v",
];

/// Every key the parser accepts (besides the `sweep.` prefix).
const KNOWN_KEYS: [&str; 28] = [
    "mode",
    "bath.omega",
    "bath.a",
    "bath.b",
    "bath.alpha",
    "bath.gamma",
    "bath.ratio",
    "bath.beta",
    "bath.omega_tilde",
    "bath.correlations",
    "bath.coupling",
    "state.mu",
    "state.nu",
    "state.u",
    "state.v",
    "state.rho11",
    "state.rho22",
    "state.rho33",
    "state.rho44",
    "state.re14",
    "state.im14",
    "state.re23",
    "state.im23",
    "grid.t_max",
    "grid.samples",
    "tol.psd",
    "tol.rise",
    "tol.alive",
];

const BUILTIN_REFERENCE_CONFIG: &str = "\
mode = redfield
bath.omega = 1.0
bath.a = 0.005
bath.b = 0.05
bath.alpha = 0.001
bath.gamma = 0.001
bath.ratio = 0.5
state.mu = 0.025
state.nu = 0.1
state.u = 0.02
state.v = 0.125
grid.t_max = 400.0
grid.samples = 8001
";

/// Parsed `key = value` lines, with duplicate and unknown-key detection.
#[derive(Clone, Debug, Default)]
pub struct ConfigMap {
    entries: BTreeMap<String, (String, usize)>,
}

impl ConfigMap {
    pub fn parse(text: &str) -> Result<ConfigMap, Error> {
        let mut entries = BTreeMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::InvalidInput {
                    context: "config".into(),
                    detail: format!("line {line_no}: expected `key = value`, got `{line}`"),
                });
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() || value.is_empty() {
                return Err(Error::InvalidInput {
                    context: "config".into(),
                    detail: format!("line {line_no}: empty key or value"),
                });
            }
            if let Some((_, first)) = entries.insert(key.clone(), (value, line_no)) {
                return Err(Error::InvalidInput {
                    context: "config".into(),
                    detail: format!("line {line_no}: `{key}` already set on line {first}"),
                });
            }
        }
        Ok(ConfigMap { entries })
    }

    fn check_known_keys(&self) -> Result<(), Error> {
        for (key, (_, line_no)) in &self.entries {
            if !KNOWN_KEYS.contains(&key.as_str()) && !key.starts_with("sweep.") {
                return Err(Error::InvalidInput {
                    context: "config".into(),
                    detail: format!("line {line_no}: unknown key `{key}`"),
                });
            }
        }
        Ok(())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    /// Sets a key to a new value (sweep overrides).
    pub fn set(&mut self, key: &str, value: String) {
        self.entries.insert(key.to_string(), (value, 0));
    }

    fn with_prefix<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = (&'a str, &'a str)> {
        self.entries
            .iter()
            .filter(move |(k, _)| k.starts_with(prefix))
            .map(|(k, (v, _))| (k.as_str(), v.as_str()))
    }

    fn get_str(&self, key: &str) -> Result<Option<&str>, Error> {
        Ok(self.entries.get(key).map(|(v, _)| v.as_str()))
    }

    fn require_str(&self, key: &str) -> Result<&str, Error> {
        self.get_str(key)?.ok_or_else(|| Error::InvalidInput {
            context: "config".into(),
            detail: format!("missing required key `{key}`"),
        })
    }

    fn get_f64(&self, key: &str) -> Result<Option<f64>, Error> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((v, line_no)) => v.parse().map(Some).map_err(|_| Error::InvalidInput {
                context: "config".into(),
                detail: format!("line {line_no}: `{key}` is not a number: `{v}`"),
            }),
        }
    }

    fn require_f64(&self, key: &str) -> Result<f64, Error> {
        self.get_f64(key)?.ok_or_else(|| Error::InvalidInput {
            context: "config".into(),
            detail: format!("missing required key `{key}`"),
        })
    }

    fn require_usize(&self, key: &str) -> Result<usize, Error> {
        match self.entries.get(key) {
            None => Err(Error::InvalidInput {
                context: "config".into(),
                detail: format!("missing required key `{key}`"),
            }),
            Some((v, line_no)) => v.parse().map_err(|_| Error::InvalidInput {
                context: "config".into(),
                detail: format!("line {line_no}: `{key}` is not a whole number: `{v}`"),
            }),
        }
    }
}

/// 17-significant-digit scientific notation: parses back to the same
/// double, and identical runs yield identical bytes.
fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(path: &Path, content: &str) -> Result<(), Failure> {
    fs::write(path, content).map_err(|e| {
        Failure::Runtime(Error::Io(format!("writing {}: {e}", path.display())))
    })
}

fn read_config(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| {
        Failure::Config(Error::Io(format!("reading {}: {e}", path.display())))
    })
}

fn load_scenario(config_path: &Path, overrides: &Overrides) -> Result<Scenario, Failure> {
    let text = read_config(config_path)?;
    let base_dir = config_path.parent().unwrap_or_else(|| Path::new("."));
    let mut scenario =
        Scenario::from_config_text(&text, base_dir).map_err(Failure::Config)?;
    apply_overrides(&mut scenario, overrides)?;
    Ok(scenario)
}

fn apply_overrides(scenario: &mut Scenario, overrides: &Overrides) -> Result<(), Failure> {
    if let Some(n) = overrides.grid {
        if n < 2 {
            return Err(Failure::Config(Error::InvalidInput {
                context: "--grid".into(),
                detail: format!("needs at least 2 samples, got {n}"),
            }));
        }
        scenario.grid.samples = n;
    }
    if let Some(psd) = overrides.tol_psd {
        if !psd.is_finite() || psd < 0.0 {
            return Err(Failure::Config(Error::InvalidInput {
                context: "--tol-psd".into(),
                detail: format!("must be nonnegative and finite, got {psd}"),
            }));
        }
        scenario.tol.psd = psd;
    }
    Ok(())
}

fn ensure_out_dir(out_dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(out_dir).map_err(|e| {
        Failure::Runtime(Error::Io(format!("creating {}: {e}", out_dir.display())))
    })
}

/// Runs the scan for a scenario and returns the series with times in
/// units of `1/omega` alongside the findings.
fn run_scan(scenario: &Scenario) -> Result<(TimeSeries, TrajectoryFindings), Failure> {
    let x0 = scenario.initial.to_xstate().map_err(Failure::Config)?;
    let params = scenario.effective_params();
    let grid = scenario.absolute_times();
    let mut series = scan_trajectory(&x0, &params, &grid, &scenario.tol).map_err(|e| match e {
        Error::BadTimeGrid | Error::GridTooCoarse { .. } => Failure::Runtime(e),
        other => Failure::Runtime(other),
    })?;
    // Report times in units of 1/omega.
    let omega = scenario.params.omega();
    for t in &mut series.grid {
        *t *= omega;
    }
    let findings = analyze(&series, &scenario.tol);
    Ok((series, findings))
}

fn series_csv(series: &TimeSeries) -> String {
    let mut s = String::with_capacity(series.len() * 160 + 64);
    s.push_str("t,concurrence,mutual_info,choi_min_eig,minor1,minor2,diag_min,r03_t\n");
    for i in 0..series.len() {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            fmt_float(series.grid[i]),
            fmt_float(series.concurrence[i]),
            fmt_float(series.mutual_info[i]),
            fmt_float(series.choi_min_eig[i]),
            fmt_float(series.minor1[i]),
            fmt_float(series.minor2[i]),
            fmt_float(series.diag_min[i]),
            fmt_float(series.r03[i]),
        );
    }
    s
}

fn report_text(
    command: &str,
    scenario: &Scenario,
    series: &TimeSeries,
    findings: &TrajectoryFindings,
) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "tool = {} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"));
    let _ = writeln!(s, "command = {command}");
    let _ = writeln!(s, "== resolved configuration ==");
    s.push_str(&scenario.echo_config());
    let _ = writeln!(s, "== findings ==");
    let _ = writeln!(s, "samples = {}", series.len());
    let c0 = series.concurrence.first().copied().unwrap_or(f64::NAN);
    let _ = writeln!(s, "initial_concurrence = {}", fmt_float(c0));
    let _ = writeln!(s, "n_cycles = {}", findings.n_cycles);
    match findings.death_time {
        Some(t) => {
            let _ = writeln!(s, "death_time = {}", fmt_float(t));
        }
        None => {
            let _ = writeln!(s, "death_time = none");
        }
    }
    match findings.t_cp {
        Some(t) => {
            let _ = writeln!(s, "t_cp = {}", fmt_float(t));
        }
        None => {
            let _ = writeln!(s, "t_cp = none");
        }
    }
    let _ = writeln!(s, "increase_intervals = {}", findings.increase_intervals.len());
    for (start, end) in &findings.increase_intervals {
        let _ = writeln!(s, "increase_interval = {} {}", fmt_float(*start), fmt_float(*end));
    }
    let _ = writeln!(s, "mi_violations = {}", findings.mi_violations.len());
    for t in &findings.mi_violations {
        let _ = writeln!(s, "mi_violation = {}", fmt_float(*t));
    }
    s
}

fn run_series_command(
    command: &str,
    scenario: &Scenario,
    out_dir: &Path,
) -> Result<(), Failure> {
    ensure_out_dir(out_dir)?;
    let (series, findings) = run_scan(scenario)?;
    write_file(&out_dir.join("series.csv"), &series_csv(&series))?;
    write_file(
        &out_dir.join("report.txt"),
        &report_text(command, scenario, &series, &findings),
    )?;
    Ok(())
}

/// `simulate`: scan a configured scenario into `series.csv` plus
/// `report.txt`.
pub fn cmd_simulate(config_path: &Path, out_dir: &Path, overrides: &Overrides) -> Result<(), Failure> {
    let scenario = load_scenario(config_path, overrides)?;
    run_series_command("simulate", &scenario, out_dir)
}

/// `fig1`: the built-in reference scenario, no configuration needed.
pub fn cmd_fig1(out_dir: &Path, overrides: &Overrides) -> Result<(), Failure> {
    let mut scenario = Scenario::builtin_reference();
    apply_overrides(&mut scenario, overrides)?;
    run_series_command("fig1", &scenario, out_dir)
}

/// `choi`: the Choi spectrum over the scenario grid (`choi.csv`), plus
/// the intermediate-map scan (`divisibility.csv`) when requested.
pub fn cmd_choi(
    config_path: &Path,
    out_dir: &Path,
    overrides: &Overrides,
    divisibility: bool,
) -> Result<(), Failure> {
    let scenario = load_scenario(config_path, overrides)?;
    ensure_out_dir(out_dir)?;
    let params = scenario.effective_params();
    let omega = scenario.params.omega();
    let times = scenario.absolute_times();

    let mut csv = String::with_capacity(times.len() * 120 + 40);
    csv.push_str("t,eig1,eig2,eig3,eig4,is_cp\n");
    for &t in &times {
        let report = choi_at(&params, t, scenario.tol.psd).map_err(Failure::Runtime)?;
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            fmt_float(t * omega),
            fmt_float(report.spectrum[0]),
            fmt_float(report.spectrum[1]),
            fmt_float(report.spectrum[2]),
            fmt_float(report.spectrum[3]),
            report.is_cp,
        );
    }
    write_file(&out_dir.join("choi.csv"), &csv)?;

    if divisibility {
        let taus = &times[1..];
        let scan = cp_divisibility_scan(&params, taus, scenario.tol.psd)
            .map_err(Failure::Runtime)?;
        let mut csv = String::with_capacity(scan.len() * 50 + 20);
        csv.push_str("tau,choi_min_eig\n");
        for (tau, min_eig) in scan {
            let _ = writeln!(csv, "{},{}", fmt_float(tau * omega), fmt_float(min_eig));
        }
        write_file(&out_dir.join("divisibility.csv"), &csv)?;
    }
    Ok(())
}

/// `sweep`: evaluate the scenario over a cartesian parameter grid; one
/// row per grid point, in lexicographic order of the sorted axis keys.
pub fn cmd_sweep(config_path: &Path, out_dir: &Path, overrides: &Overrides) -> Result<(), Failure> {
    let text = read_config(config_path)?;
    let base_dir = config_path.parent().unwrap_or_else(|| Path::new("."));
    let base_map = ConfigMap::parse(&text).map_err(Failure::Config)?;
    let base = Scenario::from_map(&base_map, base_dir).map_err(Failure::Config)?;
    if base.sweeps.is_empty() {
        return Err(Failure::Config(Error::InvalidInput {
            context: "config".into(),
            detail: "the sweep command needs at least one sweep.<key> axis".into(),
        }));
    }
    for key in base.sweeps.keys() {
        if key.starts_with("state.") && !matches!(base.initial, InitialState::Family(_)) {
            return Err(Failure::Config(Error::InvalidInput {
                context: "config".into(),
                detail: format!(
                    "sweep.{key} varies a family parameter, but the initial state is explicit"
                ),
            }));
        }
    }
    ensure_out_dir(out_dir)?;

    // Axes sorted by key (BTreeMap order); last axis varies fastest.
    let axes: Vec<(String, Vec<f64>)> = base
        .sweeps
        .iter()
        .map(|(key, &(start, stop, points))| (key.clone(), linspace(start, stop, points)))
        .collect();

    let mut csv = String::new();
    for (key, _) in &axes {
        let _ = write!(csv, "{key},");
    }
    csv.push_str("c0,slope,has_increase,death_time\n");

    let total: usize = axes.iter().map(|(_, v)| v.len()).product();
    let mut indices = vec![0usize; axes.len()];
    for _ in 0..total {
        let mut map = base_map.clone();
        for (axis, &i) in axes.iter().zip(&indices) {
            // Display round-trips f64 exactly, so the override is the
            // grid value itself.
            map.set(&axis.0, axis.1[i].to_string());
        }
        let mut point = Scenario::from_map(&map, base_dir).map_err(Failure::Config)?;
        apply_overrides(&mut point, overrides)?;

        let x0 = point.initial.to_xstate().map_err(Failure::Config)?;
        let c0 = x0.concurrence().map_err(Failure::Config)?;
        let slope = match point.initial {
            InitialState::Family(f) => {
                match concurrence_slope_zero_temperature(&point.effective_params(), &f) {
                    Ok(v) => v,
                    Err(Error::FiniteTemperature { .. }) | Err(Error::FamilyConstraint { .. }) => {
                        f64::NAN
                    }
                    Err(e) => return Err(Failure::Config(e)),
                }
            }
            InitialState::Explicit(_) => f64::NAN,
        };
        let (_, findings) = run_scan(&point)?;

        for (axis, &i) in axes.iter().zip(&indices) {
            let _ = write!(csv, "{},", fmt_float(axis.1[i]));
        }
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            fmt_float(c0),
            fmt_float(slope),
            !findings.increase_intervals.is_empty(),
            fmt_float(findings.death_time.unwrap_or(f64::NAN)),
        );

        // Odometer increment, last axis fastest.
        for pos in (0..indices.len()).rev() {
            indices[pos] += 1;
            if indices[pos] < axes[pos].1.len() {
                break;
            }
            indices[pos] = 0;
        }
    }

    write_file(&out_dir.join("sweep.csv"), &csv)
}

fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        n => (0..n)
            .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}
