//! Two-qubit X-states under a local dissipative channel.
//!
//! The setting is an inert ancilla (first tensor factor) statically
//! correlated with a system qubit (second factor) that evolves under the
//! single-qubit dynamics of [`crate::dynamics`].  States with entries
//! only on the two diagonals — X-states — are closed under this
//! evolution, so the whole analysis runs on six stored entries.
//!
//! The module provides the Pauli-product (Fano) coefficients of an
//! X-state, the exact entrywise evolution under `id (x) gamma_t`, the
//! closed-form concurrence, a four-parameter family of initial states
//! whose positivity survives the evolution, the small-time rate of change
//! of the dominant concurrence branch at zero temperature, and mutual
//! information between ancilla and system.
//!
//! Everything here is exact linear algebra on the six entries; the only
//! numerics are the eigendecompositions inside [`mutual_information`].

use num_complex::Complex64;

use crate::bath::BathParameters;
use crate::dynamics::{BlochState, PropagatorMatrices};
use crate::numerics::{
    hermitian_eig, kron, matrix_log_psd, partial_trace, ComplexMatrix, Subsystem,
    DEFAULT_LOG_FLOOR,
};
use crate::Error;

/// Trace-normalization tolerance at construction.
const TRACE_TOL: f64 = 1e-12;

/// Slack on the positivity checks behind the `physical` flag.
const PHYSICAL_TOL: f64 = 1e-12;

/// Eigenvalues above this are treated as genuine support when choosing
/// the mutual-information evaluation path.
const FULL_SUPPORT_THRESHOLD: f64 = 1e-12;

/// Inputs to [`mutual_information`] may dip this far below zero before
/// being rejected as non-positive.
const MI_PSD_TOL: f64 = 1e-10;

/// Two-qubit density matrix supported on the two diagonals.
///
/// Stored entries are the four reals `rho11..rho44` and the two complex
/// corners `rho14`, `rho23`; the conjugates `rho41`, `rho32` are
/// implicit.  Construction enforces unit trace (to 1e-12) and finiteness
/// only — positivity is deliberately *not* enforced, because evolving
/// and diagnosing unphysical states is the library's purpose.  Use
/// [`is_physical`] to query positivity.
///
/// [`is_physical`]: XState::is_physical
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XState {
    rho11: f64,
    rho22: f64,
    rho33: f64,
    rho44: f64,
    rho14: Complex64,
    rho23: Complex64,
}

impl XState {
    pub fn new(
        rho11: f64,
        rho22: f64,
        rho33: f64,
        rho44: f64,
        rho14: Complex64,
        rho23: Complex64,
    ) -> Result<Self, Error> {
        for (name, value) in [
            ("rho11", rho11),
            ("rho22", rho22),
            ("rho33", rho33),
            ("rho44", rho44),
            ("Re rho14", rho14.re),
            ("Im rho14", rho14.im),
            ("Re rho23", rho23.re),
            ("Im rho23", rho23.im),
        ] {
            if !value.is_finite() {
                return Err(Error::NonFinite { name, value });
            }
        }
        let trace = rho11 + rho22 + rho33 + rho44;
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::Normalization { trace });
        }
        Ok(XState {
            rho11,
            rho22,
            rho33,
            rho44,
            rho14,
            rho23,
        })
    }

    /// The maximally entangled state `(|00> + |11>)/sqrt(2)` as a
    /// projector: `rho11 = rho44 = rho14 = 1/2`.
    pub fn bell_plus() -> Self {
        XState {
            rho11: 0.5,
            rho22: 0.0,
            rho33: 0.0,
            rho44: 0.5,
            rho14: Complex64::new(0.5, 0.0),
            rho23: Complex64::new(0.0, 0.0),
        }
    }

    pub fn rho11(&self) -> f64 {
        self.rho11
    }

    pub fn rho22(&self) -> f64 {
        self.rho22
    }

    pub fn rho33(&self) -> f64 {
        self.rho33
    }

    pub fn rho44(&self) -> f64 {
        self.rho44
    }

    pub fn rho14(&self) -> Complex64 {
        self.rho14
    }

    pub fn rho23(&self) -> Complex64 {
        self.rho23
    }

    pub fn trace(&self) -> f64 {
        self.rho11 + self.rho22 + self.rho33 + self.rho44
    }

    /// The two principal 2x2 minors and the smallest diagonal entry:
    /// `(rho11*rho44 - |rho14|^2, rho22*rho33 - |rho23|^2, min diag)`.
    /// All three nonnegative (with the diagonals) is exactly positivity
    /// of the full 4x4 matrix.
    pub fn positivity_minors(&self) -> (f64, f64, f64) {
        let m1 = self.rho11 * self.rho44 - self.rho14.norm_sqr();
        let m2 = self.rho22 * self.rho33 - self.rho23.norm_sqr();
        let diag_min = self.rho11.min(self.rho22).min(self.rho33).min(self.rho44);
        (m1, m2, diag_min)
    }

    /// Whether the state is a genuine density matrix (within 1e-12).
    pub fn is_physical(&self) -> bool {
        let (m1, m2, diag_min) = self.positivity_minors();
        diag_min >= -PHYSICAL_TOL && m1 >= -PHYSICAL_TOL && m2 >= -PHYSICAL_TOL
    }

    /// Pauli-product coefficients of the state.
    pub fn to_fano(&self) -> FanoCoefficients {
        FanoCoefficients {
            r03: self.rho11 - self.rho22 + self.rho33 - self.rho44,
            r30: self.rho11 + self.rho22 - self.rho33 - self.rho44,
            r11: 2.0 * (self.rho14.re + self.rho23.re),
            r22: 2.0 * (self.rho23.re - self.rho14.re),
            r12: 2.0 * (self.rho23.im - self.rho14.im),
            r21: -2.0 * (self.rho14.im + self.rho23.im),
            r33: self.rho11 + self.rho44 - self.rho22 - self.rho33,
        }
    }

    /// Dense 4x4 matrix in the product basis (ancilla index major).
    pub fn dense(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(4);
        m.set(0, 0, Complex64::new(self.rho11, 0.0));
        m.set(1, 1, Complex64::new(self.rho22, 0.0));
        m.set(2, 2, Complex64::new(self.rho33, 0.0));
        m.set(3, 3, Complex64::new(self.rho44, 0.0));
        m.set(0, 3, self.rho14);
        m.set(3, 0, self.rho14.conj());
        m.set(1, 2, self.rho23);
        m.set(2, 1, self.rho23.conj());
        m
    }

    /// Bloch vector of the system (second-factor) marginal: `(0, 0, R03)`.
    pub fn system_bloch(&self) -> BlochState {
        BlochState::new(0.0, 0.0, self.to_fano().r03)
    }

    /// Bloch vector of the ancilla (first-factor) marginal: `(0, 0, R30)`.
    /// Invariant under the evolution — the ancilla is untouched.
    pub fn ancilla_bloch(&self) -> BlochState {
        BlochState::new(0.0, 0.0, self.to_fano().r30)
    }

    /// Evolves the state for time `t >= 0` under `id (x) gamma_t`.
    pub fn evolve(&self, params: &BathParameters, t: f64) -> Result<XState, Error> {
        Ok(self.evolve_with(&PropagatorMatrices::at(params, t)?))
    }

    /// Applies pre-evaluated propagator coefficients.
    ///
    /// The entry formulas are the exact image of the Pauli-coefficient
    /// transport under the single-qubit map: populations mix through
    /// `exp_gamma` and `lambda_t`, corners through the 2x2 coherence
    /// block.  X-shape is preserved identically — only the six stored
    /// entries are ever produced.
    pub fn evolve_with(&self, m: &PropagatorMatrices) -> XState {
        let f = self.to_fano();
        let e = m.exp_gamma;
        let lam = m.lambda_t;
        let pop_sym = e * (f.r03 + f.r33);
        let pop_asym = e * (f.r03 - f.r33);
        XState {
            rho11: 0.25 * ((1.0 + lam) * (1.0 + f.r30) + pop_sym),
            rho22: 0.25 * ((1.0 - lam) * (1.0 + f.r30) - pop_sym),
            rho33: 0.25 * ((1.0 + lam) * (1.0 - f.r30) + pop_asym),
            rho44: 0.25 * ((1.0 - lam) * (1.0 - f.r30) - pop_asym),
            rho14: Complex64::new(
                0.25 * (m.m11 * f.r11 + m.m12 * f.r12 - m.m21 * f.r21 - m.m22 * f.r22),
                -0.25 * (m.m21 * f.r11 + m.m22 * f.r12 + m.m11 * f.r21 + m.m12 * f.r22),
            ),
            rho23: Complex64::new(
                0.25 * (m.m11 * f.r11 + m.m12 * f.r12 + m.m21 * f.r21 + m.m22 * f.r22),
                0.25 * (m.m21 * f.r11 + m.m22 * f.r12 - m.m11 * f.r21 - m.m12 * f.r22),
            ),
        }
    }

    /// Concurrence of an X-state:
    /// `2 max{0, |rho23| - sqrt(rho11 rho44), |rho14| - sqrt(rho22 rho33)}`.
    ///
    /// Defined only for physical states; an unphysical input is refused
    /// rather than silently quantified.
    pub fn concurrence(&self) -> Result<f64, Error> {
        if !self.is_physical() {
            let (m1, m2, diag_min) = self.positivity_minors();
            return Err(Error::UnphysicalState {
                detail: format!(
                    "concurrence undefined: minors ({m1:.3e}, {m2:.3e}), min diagonal {diag_min:.3e}"
                ),
            });
        }
        // Positivity holds to within tolerance; clamp tiny negative
        // products on boundary states before the square root.
        let branch1 = self.rho23.norm() - (self.rho11 * self.rho44).max(0.0).sqrt();
        let branch2 = self.rho14.norm() - (self.rho22 * self.rho33).max(0.0).sqrt();
        Ok(2.0 * branch1.max(branch2).max(0.0))
    }
}

/// Coefficients of an X-state in the Pauli product basis: the seven
/// components that can be nonzero, as real numbers.
///
/// `r03`/`r30` are the system/ancilla marginal polarizations, `r33` the
/// diagonal correlation, and `(r11, r22, r12, r21)` the coherence block
/// feeding the corners.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FanoCoefficients {
    pub r03: f64,
    pub r30: f64,
    pub r11: f64,
    pub r22: f64,
    pub r12: f64,
    pub r21: f64,
    pub r33: f64,
}

impl FanoCoefficients {
    /// Inverse of [`XState::to_fano`]; exact linear map.
    pub fn to_xstate(&self) -> XState {
        XState {
            rho11: 0.25 * (1.0 + self.r03 + self.r30 + self.r33),
            rho22: 0.25 * (1.0 - self.r03 + self.r30 - self.r33),
            rho33: 0.25 * (1.0 + self.r03 - self.r30 - self.r33),
            rho44: 0.25 * (1.0 - self.r03 - self.r30 + self.r33),
            rho14: Complex64::new(
                0.25 * (self.r11 - self.r22),
                -0.25 * (self.r12 + self.r21),
            ),
            rho23: Complex64::new(
                0.25 * (self.r11 + self.r22),
                0.25 * (self.r12 - self.r21),
            ),
        }
    }
}

/// Four-parameter family of initial X-states:
/// diagonal `(mu, nu, 1-2mu-nu, mu)`, corners `rho14 = u`, `rho23 = iv`.
///
/// The admissibility inequalities (checked by [`validate`]) are exactly
/// positivity of the density matrix.
///
/// [`validate`]: FamilyParams::validate
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FamilyParams {
    pub mu: f64,
    pub nu: f64,
    pub u: f64,
    pub v: f64,
}

impl FamilyParams {
    pub fn new(mu: f64, nu: f64, u: f64, v: f64) -> Self {
        FamilyParams { mu, nu, u, v }
    }

    /// Checks the five admissibility inequalities, naming the first one
    /// violated.
    pub fn validate(&self) -> Result<(), Error> {
        for (name, value) in [
            ("mu", self.mu),
            ("nu", self.nu),
            ("u", self.u),
            ("v", self.v),
        ] {
            if !value.is_finite() {
                return Err(Error::NonFinite { name, value });
            }
        }
        let fail = |constraint: String| Err(Error::FamilyConstraint { constraint });
        if self.mu < 0.0 {
            return fail(format!("mu >= 0 violated: mu = {}", self.mu));
        }
        if self.nu < 0.0 {
            return fail(format!("nu >= 0 violated: nu = {}", self.nu));
        }
        let rest = 2.0 * self.mu + self.nu;
        if rest > 1.0 {
            return fail(format!("2*mu + nu <= 1 violated: 2*mu + nu = {rest}"));
        }
        if self.u * self.u > self.mu * self.mu {
            return fail(format!(
                "u^2 <= mu^2 violated: u^2 = {}, mu^2 = {}",
                self.u * self.u,
                self.mu * self.mu
            ));
        }
        let slack = self.nu * (1.0 - 2.0 * self.mu - self.nu);
        if self.v * self.v > slack {
            return fail(format!(
                "v^2 <= nu(1 - 2mu - nu) violated: v^2 = {}, bound = {slack}",
                self.v * self.v
            ));
        }
        Ok(())
    }

    /// Builds the family state, rejecting inadmissible parameters.
    pub fn to_xstate(&self) -> Result<XState, Error> {
        self.validate()?;
        Ok(XState {
            rho11: self.mu,
            rho22: self.nu,
            rho33: 1.0 - 2.0 * self.mu - self.nu,
            rho44: self.mu,
            rho14: Complex64::new(self.u, 0.0),
            rho23: Complex64::new(0.0, self.v),
        })
    }
}

/// System-marginal Bloch vector after evolving for time `t`, in closed
/// form: `(0, 0, exp(-2 gamma t) R03 + Lambda(t))`.
///
/// Always inside the Bloch ball when the initial state is physical —
/// the single-qubit marginal never exposes the positivity defect.
pub fn reduced_system_state(
    x: &XState,
    params: &BathParameters,
    t: f64,
) -> Result<BlochState, Error> {
    let m = PropagatorMatrices::at(params, t)?;
    let r03 = m.exp_gamma * x.to_fano().r03 + m.lambda_t;
    Ok(BlochState::new(0.0, 0.0, r03))
}

/// First-order rate of change of the dominant concurrence branch
/// `|rho23(t)| - sqrt(rho11(t) rho44(t))` at `t = 0`, for a family state
/// evolving at zero temperature:
///
/// ```text
/// slope = gamma (3 mu + nu - 1) - ((a + alpha) v + 2 b u)
/// ```
///
/// Requires zero-temperature parameters (`w = gamma`) and a nonzero `v`;
/// the branch is not differentiable at `v = 0`.  Negative `v` is folded
/// to positive by the sign flip `(u, v) -> (-u, -v)`, which is a local
/// unitary on the ancilla and changes nothing observable.  The expansion
/// behind the formula assumes `mu > 0`; at `mu = 0` exactly, the
/// square-root term vanishes identically instead of contributing its
/// linearization.
pub fn concurrence_slope_zero_temperature(
    params: &BathParameters,
    family: &FamilyParams,
) -> Result<f64, Error> {
    if !params.is_zero_temperature() {
        return Err(Error::FiniteTemperature {
            ratio: params.kms_ratio(),
        });
    }
    family.validate()?;
    let (u, v) = if family.v < 0.0 {
        (-family.u, -family.v)
    } else {
        (family.u, family.v)
    };
    if v == 0.0 {
        return Err(Error::FamilyConstraint {
            constraint: "the branch rate needs v != 0 (corner rho23 = iv must not vanish)".into(),
        });
    }
    Ok(params.gamma() * (3.0 * family.mu + family.nu - 1.0)
        - ((params.a() + params.alpha()) * v + 2.0 * params.b() * u))
}

/// Mutual information between ancilla and system in nats:
/// `I = S(rho_A) + S(rho_S) - S(rho_AS)`, evaluated through that entropy
/// sum when the state has full support and through the defining relative
/// entropy `Tr[rho (log rho - log rho_A (x) rho_S)]` with a spectral
/// floor otherwise.
pub fn mutual_information(rho: &ComplexMatrix) -> Result<f64, Error> {
    let spectrum = checked_spectrum(rho)?;
    if spectrum.iter().all(|&l| l > FULL_SUPPORT_THRESHOLD) {
        mutual_information_entropy_sum(rho)
    } else {
        mutual_information_relative_entropy(rho)
    }
}

fn checked_spectrum(rho: &ComplexMatrix) -> Result<Vec<f64>, Error> {
    if rho.dim() != 4 {
        return Err(Error::InvalidInput {
            context: "mutual information".into(),
            detail: format!("expected a 4x4 state, got dimension {}", rho.dim()),
        });
    }
    let trace = rho.trace();
    if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
        return Err(Error::Normalization { trace: trace.re });
    }
    let spec = hermitian_eig(rho)?;
    if spec.eigenvalues[0] < -MI_PSD_TOL {
        return Err(Error::NotPositiveSemidefinite {
            eigenvalue: spec.eigenvalues[0],
        });
    }
    Ok(spec.eigenvalues)
}

/// Von Neumann entropy in nats from an eigenvalue list, with the
/// convention `0 log 0 = 0`.
fn entropy(eigenvalues: &[f64]) -> f64 {
    -eigenvalues
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| l * l.ln())
        .sum::<f64>()
}

/// Entropy-sum route; accurate when all joint eigenvalues are away from
/// zero.
pub(crate) fn mutual_information_entropy_sum(rho: &ComplexMatrix) -> Result<f64, Error> {
    let joint = hermitian_eig(rho)?;
    let ancilla = hermitian_eig(&partial_trace(rho, Subsystem::Second))?;
    let system = hermitian_eig(&partial_trace(rho, Subsystem::First))?;
    let value =
        entropy(&ancilla.eigenvalues) + entropy(&system.eigenvalues) - entropy(&joint.eigenvalues);
    Ok(value.max(0.0))
}

/// Defining relative-entropy route with spectral floor; handles
/// rank-deficient states.
pub(crate) fn mutual_information_relative_entropy(rho: &ComplexMatrix) -> Result<f64, Error> {
    let rho_a = partial_trace(rho, Subsystem::Second);
    let rho_s = partial_trace(rho, Subsystem::First);
    let log_rho = matrix_log_psd(rho, DEFAULT_LOG_FLOOR)?;
    let log_prod = matrix_log_psd(&kron(&rho_a, &rho_s), DEFAULT_LOG_FLOOR)?;
    let diff = log_rho.sub(&log_prod);
    let value = rho.matmul(&diff).trace().re;
    Ok(value.max(0.0))
}
