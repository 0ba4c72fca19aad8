//! Physical parameterization of the qubit-bath coupling.
//!
//! The dissipative dynamics is fixed by five real rates `a`, `b`, `alpha`,
//! `gamma`, `w`, the renormalized qubit frequency `omega_tilde`, and the
//! inverse bath temperature `beta`.  These can be supplied directly (the
//! primary entry mode, with rates quoted as fractions of `omega`) or
//! computed by quadrature from sampled bath correlation functions.  In
//! either case the set is validated against the physical constraints:
//! nonnegative decay rates, the thermal detailed-balance relation
//! `w/gamma = tanh(beta*omega)`, and an underdamped coherence rotation
//! (`Omega^2 > 0`).
//!
//! The same rates can be repackaged as the 3x3 coefficient matrix of the
//! dissipator ([`KossakowskiMatrix`]); its smallest eigenvalue decides
//! whether the generated semigroup is completely positive, and for the
//! dynamics studied here it is genuinely allowed to be negative.

use num_complex::Complex64;

use crate::Error;

/// Detailed-balance consistency tolerance on `w/gamma - tanh(beta*omega)`.
const KMS_TOL: f64 = 1e-10;

/// A correlation channel must decay below this fraction of its peak by the
/// last sample for the truncated quadrature to be meaningful.
const DECAY_RATIO: f64 = 1e-8;

/// Allowed relative deviation of the sample grid from uniform spacing.
const GRID_UNIFORMITY_TOL: f64 = 1e-6;

/// Exact CSV header for correlation samples.
const CSV_HEADER: &str = "s,re_g11,im_g11,re_g22,im_g22,re_g33,im_g33";

/// Validated physical parameters of the dissipative qubit dynamics.
///
/// All rates are in the same inverse-time units as `omega`; `beta` is in
/// inverse-rate units and may be `+inf` (zero temperature).  Instances can
/// only be built through the validating constructors, so a value of this
/// type always satisfies:
///
/// - `a >= 0`, `alpha >= 0`, `gamma >= 0`,
/// - `|w/gamma - tanh(beta*omega)| <= 1e-10` when `gamma > 0`, and `w = 0`
///   when `gamma = 0`,
/// - `Omega^2 = 4*omega_tilde^2 - 4*b^2 - (a-alpha)^2 > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BathParameters {
    omega: f64,
    omega_tilde: f64,
    a: f64,
    b: f64,
    alpha: f64,
    gamma: f64,
    w: f64,
    beta: f64,
}

impl BathParameters {
    /// Builds a fully specified parameter set and validates it.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        omega: f64,
        omega_tilde: f64,
        a: f64,
        b: f64,
        alpha: f64,
        gamma: f64,
        w: f64,
        beta: f64,
    ) -> Result<Self, Error> {
        BathParameters {
            omega,
            omega_tilde,
            a,
            b,
            alpha,
            gamma,
            w,
            beta,
        }
        .validate()
    }

    /// Direct entry mode: rates plus the thermal ratio `w/gamma`.
    ///
    /// `omega_tilde` defaults to `omega` (frequency shift absorbed), `w`
    /// is `ratio * gamma`, and `beta` is derived by inverting the
    /// detailed-balance relation: `beta = atanh(ratio)/omega`, with
    /// `beta = +inf` at `ratio = 1`.
    pub fn with_ratio(
        omega: f64,
        a: f64,
        b: f64,
        alpha: f64,
        gamma: f64,
        ratio: f64,
    ) -> Result<Self, Error> {
        let beta = beta_from_ratio(ratio, omega)?;
        Self::new(omega, omega, a, b, alpha, gamma, ratio * gamma, beta)
    }

    /// Replaces the renormalized frequency, re-validating the result.
    pub fn with_omega_tilde(self, omega_tilde: f64) -> Result<Self, Error> {
        BathParameters {
            omega_tilde,
            ..self
        }
        .validate()
    }

    /// Checks every invariant, returning the value unchanged on success.
    pub fn validate(self) -> Result<Self, Error> {
        for (name, value) in [
            ("omega", self.omega),
            ("omega_tilde", self.omega_tilde),
            ("a", self.a),
            ("b", self.b),
            ("alpha", self.alpha),
            ("gamma", self.gamma),
            ("w", self.w),
        ] {
            if !value.is_finite() {
                return Err(Error::NonFinite { name, value });
            }
        }
        if self.beta.is_nan() || self.beta < 0.0 {
            return Err(Error::InvalidInput {
                context: "beta".into(),
                detail: format!("inverse temperature must be in [0, +inf], got {}", self.beta),
            });
        }
        if self.omega <= 0.0 {
            return Err(Error::NonPositiveFrequency {
                name: "omega",
                value: self.omega,
            });
        }
        if self.omega_tilde <= 0.0 {
            return Err(Error::NonPositiveFrequency {
                name: "omega_tilde",
                value: self.omega_tilde,
            });
        }
        for (name, value) in [("a", self.a), ("alpha", self.alpha), ("gamma", self.gamma)] {
            if value < 0.0 {
                return Err(Error::NegativeRate { name, value });
            }
        }

        let expected = (self.beta * self.omega).tanh();
        if self.gamma > 0.0 {
            let ratio = self.w / self.gamma;
            if (ratio - expected).abs() > KMS_TOL {
                return Err(Error::DetailedBalance { ratio, expected });
            }
        } else if self.w.abs() > KMS_TOL * self.omega {
            let ratio = if self.w > 0.0 {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            };
            return Err(Error::DetailedBalance { ratio, expected });
        }

        let radicand = self.omega_radicand();
        if radicand <= 0.0 {
            return Err(Error::StrongCoupling { radicand });
        }
        Ok(self)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn omega_tilde(&self) -> f64 {
        self.omega_tilde
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Thermal ratio `w/gamma` (0 when `gamma = 0`, where `w = 0` too).
    pub fn kms_ratio(&self) -> f64 {
        if self.gamma > 0.0 {
            self.w / self.gamma
        } else {
            0.0
        }
    }

    /// True when the bath is at zero temperature (`w = gamma`, including
    /// the degenerate `w = gamma = 0`).
    pub fn is_zero_temperature(&self) -> bool {
        (self.w - self.gamma).abs() <= KMS_TOL * self.gamma.max(self.omega * f64::EPSILON)
    }

    /// The radicand `4*omega_tilde^2 - 4*b^2 - (a-alpha)^2`; positive for
    /// every validated instance.
    pub(crate) fn omega_radicand(&self) -> f64 {
        4.0 * self.omega_tilde * self.omega_tilde
            - 4.0 * self.b * self.b
            - (self.a - self.alpha) * (self.a - self.alpha)
    }
}

/// Inverts the detailed-balance relation `ratio = tanh(beta*omega)`.
fn beta_from_ratio(ratio: f64, omega: f64) -> Result<f64, Error> {
    if omega <= 0.0 || !omega.is_finite() {
        return Err(Error::NonPositiveFrequency {
            name: "omega",
            value: omega,
        });
    }
    if !(0.0..=1.0).contains(&ratio) {
        return Err(Error::InvalidInput {
            context: "thermal ratio".into(),
            detail: format!("w/gamma must lie in [0, 1], got {ratio}"),
        });
    }
    if ratio == 1.0 {
        Ok(f64::INFINITY)
    } else {
        Ok(ratio.atanh() / omega)
    }
}

/// The 3x3 Hermitian coefficient matrix of the dissipator.
///
/// Only the block pattern that keeps the dynamics X-shape-preserving is
/// representable: real diagonal `(c11, c22, c33)`, one complex
/// off-diagonal pair `c12 = c21*`, and structural zeros in the third row
/// and column off the diagonal.  The semigroup generated by these
/// coefficients is completely positive exactly when this matrix is
/// positive semidefinite; for the dynamics studied here it often is not,
/// which is the point of reporting [`min_eigenvalue`].
///
/// [`min_eigenvalue`]: KossakowskiMatrix::min_eigenvalue
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KossakowskiMatrix {
    c11: f64,
    c22: f64,
    c33: f64,
    c12: Complex64,
}

impl KossakowskiMatrix {
    pub fn new(c11: f64, c22: f64, c33: f64, c12: Complex64) -> Result<Self, Error> {
        for (name, value) in [
            ("c11", c11),
            ("c22", c22),
            ("c33", c33),
            ("Re c12", c12.re),
            ("Im c12", c12.im),
        ] {
            if !value.is_finite() {
                return Err(Error::NonFinite { name, value });
            }
        }
        Ok(KossakowskiMatrix { c11, c22, c33, c12 })
    }

    /// Repackages the dissipative rates as coefficient-matrix entries:
    /// `c11 = (alpha+gamma-a)/2`, `c22 = (a+gamma-alpha)/2`,
    /// `c33 = (a+alpha-gamma)/2`, `c12 = -b - i*w/2`.
    pub fn from_params(p: &BathParameters) -> Self {
        KossakowskiMatrix {
            c11: 0.5 * (p.alpha() + p.gamma() - p.a()),
            c22: 0.5 * (p.a() + p.gamma() - p.alpha()),
            c33: 0.5 * (p.a() + p.alpha() - p.gamma()),
            c12: Complex64::new(-p.b(), -0.5 * p.w()),
        }
    }

    /// Inverse of [`from_params`]: `a = c22+c33`, `alpha = c11+c33`,
    /// `gamma = c11+c22`, `b = -Re c12`, `w = -2 Im c12`.
    ///
    /// `beta` may be given explicitly (then checked by validation) or
    /// left `None` to be derived from the detailed-balance ratio
    /// `w/gamma`; the derivation needs `gamma > 0`.
    ///
    /// [`from_params`]: KossakowskiMatrix::from_params
    pub fn to_params(
        &self,
        omega: f64,
        omega_tilde: f64,
        beta: Option<f64>,
    ) -> Result<BathParameters, Error> {
        let a = self.c22 + self.c33;
        let alpha = self.c11 + self.c33;
        let gamma = self.c11 + self.c22;
        let b = -self.c12.re;
        let w = -2.0 * self.c12.im;
        let beta = match beta {
            Some(beta) => beta,
            None if gamma > 0.0 => beta_from_ratio(w / gamma, omega)?,
            None => {
                return Err(Error::InvalidInput {
                    context: "beta".into(),
                    detail: "gamma = 0 leaves the temperature undetermined; supply beta".into(),
                })
            }
        };
        BathParameters::new(omega, omega_tilde, a, b, alpha, gamma, w, beta)
    }

    pub fn c11(&self) -> f64 {
        self.c11
    }

    pub fn c22(&self) -> f64 {
        self.c22
    }

    pub fn c33(&self) -> f64 {
        self.c33
    }

    pub fn c12(&self) -> Complex64 {
        self.c12
    }

    /// All three eigenvalues, ascending.
    ///
    /// The sparsity pattern block-diagonalizes the matrix into the
    /// `(1,2)` sub-block and the scalar `c33`, so the spectrum is closed
    /// form — this is what makes it usable as an oracle for the
    /// positivity checks.
    pub fn eigenvalues(&self) -> [f64; 3] {
        let mean = 0.5 * (self.c11 + self.c22);
        let disc = (0.25 * (self.c11 - self.c22) * (self.c11 - self.c22)
            + self.c12.norm_sqr())
        .sqrt();
        let mut eigs = [mean - disc, mean + disc, self.c33];
        eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        eigs
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol
    }

    /// Dense 3x3 form, row-major, for reporting.
    pub fn as_rows(&self) -> [[Complex64; 3]; 3] {
        let z = Complex64::new(0.0, 0.0);
        [
            [Complex64::new(self.c11, 0.0), self.c12, z],
            [self.c12.conj(), Complex64::new(self.c22, 0.0), z],
            [z, z, Complex64::new(self.c33, 0.0)],
        ]
    }
}

/// Sampled bath correlation functions on a uniform grid `s_k = k*step`.
///
/// Only `s >= 0` is stored; values at negative arguments are recovered as
/// complex conjugates, which is what the reduced quadrature formulas
/// below use.  Construction enforces that every nonzero channel decays
/// below `1e-8` of its peak magnitude by the last sample, so truncating
/// the integrals at the grid end is admissible.
#[derive(Clone, Debug)]
pub struct CorrelationSamples {
    step: f64,
    coupling: f64,
    g11: Vec<Complex64>,
    g22: Vec<Complex64>,
    g33: Vec<Complex64>,
}

impl CorrelationSamples {
    pub fn new(
        step: f64,
        coupling: f64,
        g11: Vec<Complex64>,
        g22: Vec<Complex64>,
        g33: Vec<Complex64>,
    ) -> Result<Self, Error> {
        if !step.is_finite() || step <= 0.0 {
            return Err(Error::BadSampleGrid {
                detail: format!("step must be positive and finite, got {step}"),
            });
        }
        if !coupling.is_finite() || coupling < 0.0 {
            return Err(Error::InvalidInput {
                context: "coupling".into(),
                detail: format!("coupling constant must be nonnegative, got {coupling}"),
            });
        }
        let n = g11.len();
        if n < 2 {
            return Err(Error::BadSampleGrid {
                detail: format!("need at least 2 samples, got {n}"),
            });
        }
        if g22.len() != n || g33.len() != n {
            return Err(Error::BadSampleGrid {
                detail: format!(
                    "channel lengths differ: g11 has {n}, g22 has {}, g33 has {}",
                    g22.len(),
                    g33.len()
                ),
            });
        }
        let samples = CorrelationSamples {
            step,
            coupling,
            g11,
            g22,
            g33,
        };
        for (name, channel) in samples.channels() {
            for z in channel {
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::BadSampleGrid {
                        detail: format!("channel {name} contains a non-finite sample"),
                    });
                }
            }
            let peak = channel.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let tail = channel.last().map(|z| z.norm()).unwrap_or(0.0);
            if peak > 0.0 && tail > DECAY_RATIO * peak {
                return Err(Error::UndampedCorrelations {
                    channel: name,
                    tail,
                    peak,
                });
            }
        }
        Ok(samples)
    }

    /// Parses the CSV sample format: header
    /// `s,re_g11,im_g11,re_g22,im_g22,re_g33,im_g33`, one row per grid
    /// point, `s` starting at 0 and uniformly spaced.
    pub fn from_csv_str(text: &str, coupling: f64) -> Result<Self, Error> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| Error::BadSampleGrid {
            detail: "empty correlation file".into(),
        })?;
        let normalized: String = header.split(',').map(|f| f.trim()).collect::<Vec<_>>().join(",");
        if normalized != CSV_HEADER {
            return Err(Error::InvalidInput {
                context: "correlation csv".into(),
                detail: format!("expected header `{CSV_HEADER}`, got `{}`", header.trim()),
            });
        }

        let mut s = Vec::new();
        let mut g11 = Vec::new();
        let mut g22 = Vec::new();
        let mut g33 = Vec::new();
        for (lineno, line) in lines {
            let fields: Vec<f64> = line
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| Error::InvalidInput {
                    context: "correlation csv".into(),
                    detail: format!("line {}: {e}", lineno + 1),
                })?;
            if fields.len() != 7 {
                return Err(Error::InvalidInput {
                    context: "correlation csv".into(),
                    detail: format!("line {}: expected 7 fields, got {}", lineno + 1, fields.len()),
                });
            }
            s.push(fields[0]);
            g11.push(Complex64::new(fields[1], fields[2]));
            g22.push(Complex64::new(fields[3], fields[4]));
            g33.push(Complex64::new(fields[5], fields[6]));
        }
        if s.len() < 2 {
            return Err(Error::BadSampleGrid {
                detail: format!("need at least 2 samples, got {}", s.len()),
            });
        }
        let step = s[1] - s[0];
        if step <= 0.0 {
            return Err(Error::BadSampleGrid {
                detail: "grid must be strictly increasing".into(),
            });
        }
        if s[0].abs() > GRID_UNIFORMITY_TOL * step {
            return Err(Error::BadSampleGrid {
                detail: format!("grid must start at s = 0, got {}", s[0]),
            });
        }
        for (k, &sk) in s.iter().enumerate() {
            if (sk - k as f64 * step).abs() > GRID_UNIFORMITY_TOL * step {
                return Err(Error::BadSampleGrid {
                    detail: format!(
                        "grid is not uniform: s[{k}] = {sk}, expected {}",
                        k as f64 * step
                    ),
                });
            }
        }
        Self::new(step, coupling, g11, g22, g33)
    }

    pub fn from_csv_path(path: &std::path::Path, coupling: f64) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)?;
        Self::from_csv_str(&text, coupling)
    }

    pub fn len(&self) -> usize {
        self.g11.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires >= 2 samples
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    fn channels(&self) -> [(&'static str, &[Complex64]); 3] {
        [
            ("g11", &self.g11),
            ("g22", &self.g22),
            ("g33", &self.g33),
        ]
    }

    /// Composite trapezoid rule on the sample grid.
    fn trapezoid(&self, f: impl Fn(usize) -> f64) -> f64 {
        let n = self.len();
        let mut acc = 0.5 * (f(0) + f(n - 1));
        for k in 1..n - 1 {
            acc += f(k);
        }
        acc * self.step
    }

    /// Coefficient matrix and frequency-shift integral by quadrature.
    ///
    /// Using the conjugation symmetry of the correlations at negative
    /// arguments, the full-line integrals reduce to `s >= 0` forms:
    ///
    /// - `c11 = 2 L^2 Int cos(2 omega s) Re g11(s) ds` (`c22` alike),
    /// - `c33 = 2 L^2 Int Re g33(s) ds`,
    /// - `c12 = L^2 Int sin(2 omega s) (g22(s) - g11(s)*) ds`,
    /// - `delta_omega = 2 Int sin(2 omega s) Re(g11(s) + g22(s)) ds`,
    ///
    /// with `L` the coupling constant.  The returned shift is the bare
    /// integral; the renormalized frequency is
    /// `omega + (L^2/2) * delta_omega` (see [`to_bath_parameters`]).
    ///
    /// [`to_bath_parameters`]: CorrelationSamples::to_bath_parameters
    pub fn kossakowski(&self, omega: f64) -> Result<(KossakowskiMatrix, f64), Error> {
        if !omega.is_finite() || omega <= 0.0 {
            return Err(Error::NonPositiveFrequency {
                name: "omega",
                value: omega,
            });
        }
        let l2 = self.coupling * self.coupling;
        let s_at = |k: usize| k as f64 * self.step;

        let c11 = 2.0 * l2 * self.trapezoid(|k| (2.0 * omega * s_at(k)).cos() * self.g11[k].re);
        let c22 = 2.0 * l2 * self.trapezoid(|k| (2.0 * omega * s_at(k)).cos() * self.g22[k].re);
        let c33 = 2.0 * l2 * self.trapezoid(|k| self.g33[k].re);
        let c12_re = l2
            * self.trapezoid(|k| {
                (2.0 * omega * s_at(k)).sin() * (self.g22[k].re - self.g11[k].re)
            });
        let c12_im = l2
            * self.trapezoid(|k| {
                (2.0 * omega * s_at(k)).sin() * (self.g22[k].im + self.g11[k].im)
            });
        let delta_omega = 2.0
            * self.trapezoid(|k| {
                (2.0 * omega * s_at(k)).sin() * (self.g11[k].re + self.g22[k].re)
            });

        let c = KossakowskiMatrix::new(c11, c22, c33, Complex64::new(c12_re, c12_im))?;
        Ok((c, delta_omega))
    }

    /// Full quadrature pipeline: coefficients, renormalized frequency
    /// `omega_tilde = omega + (coupling^2/2) * delta_omega`, and validated
    /// rates.  `beta = None` derives the temperature from the computed
    /// detailed-balance ratio.
    pub fn to_bath_parameters(
        &self,
        omega: f64,
        beta: Option<f64>,
    ) -> Result<(BathParameters, KossakowskiMatrix), Error> {
        let (c, delta_omega) = self.kossakowski(omega)?;
        let omega_tilde = omega + 0.5 * self.coupling * self.coupling * delta_omega;
        let params = c.to_params(omega, omega_tilde, beta)?;
        Ok((params, c))
    }
}
