//! C ABI for the qubit-channel toolkit.
//!
//! Conventions:
//!
//! - Every fallible call returns an [`RfStatus`]; results leave through
//!   out-pointers, written only on `RF_STATUS_OK`.
//! - Bath parameter sets are opaque handles created by
//!   [`rf_bath_new`] / [`rf_bath_with_ratio`] and released with
//!   [`rf_bath_free`].
//! - Two-qubit X-states cross the boundary by value as [`RfXState`];
//!   Bloch vectors as plain `double[3]` arrays.
//! - No call stores internal state: handles are immutable after
//!   creation, so they may be shared across threads freely.
//!
//! The matching header `include/redfield.h` is regenerated on every
//! build.

use std::os::raw::c_char;

use redfield::diagnostics::choi_at;
use redfield::dynamics::{
    big_omega, davies_average, det_rate_at_zero, gibbs_state, positivity_witness, propagate,
};
use redfield::entanglement::{concurrence_slope_zero_temperature, mutual_information};
use redfield::{BathParameters, BlochState, Error, FamilyParams, XState};

/// Result code of a toolkit call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RfStatus {
    /// The call succeeded and the out-parameters are valid.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument was out of range, non-finite, or otherwise malformed.
    InvalidArgument = 2,
    /// The rates violate a physical requirement (negativity, detailed
    /// balance, coupling strength).
    InvalidRates = 3,
    /// The state is not an admissible density matrix.
    UnphysicalState = 4,
    /// The initial-state family constraints are violated.
    FamilyConstraint = 5,
    /// The requested quantity needs a dissipative fixed point and
    /// `gamma = 0` provides none.
    NoEquilibrium = 6,
    /// The requested quantity is only defined at zero temperature.
    FiniteTemperature = 7,
    /// An internal numerical routine failed to converge.
    NumericalFailure = 8,
}

fn status_of(err: &Error) -> RfStatus {
    match err {
        Error::NegativeRate { .. }
        | Error::NonPositiveFrequency { .. }
        | Error::DetailedBalance { .. }
        | Error::StrongCoupling { .. } => RfStatus::InvalidRates,
        Error::UnphysicalState { .. } | Error::Normalization { .. } => RfStatus::UnphysicalState,
        Error::FamilyConstraint { .. } => RfStatus::FamilyConstraint,
        Error::NoEquilibrium => RfStatus::NoEquilibrium,
        Error::FiniteTemperature { .. } => RfStatus::FiniteTemperature,
        Error::NotHermitian { .. } | Error::NotPositiveSemidefinite { .. } => {
            RfStatus::NumericalFailure
        }
        _ => RfStatus::InvalidArgument,
    }
}

/// Opaque bath-parameter handle.
pub struct RfBath {
    params: BathParameters,
}

/// A two-qubit X-state by value: diagonal entries and the two
/// anti-diagonal coherences split into real and imaginary parts.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct RfXState {
    pub rho11: f64,
    pub rho22: f64,
    pub rho33: f64,
    pub rho44: f64,
    pub re14: f64,
    pub im14: f64,
    pub re23: f64,
    pub im23: f64,
}

impl RfXState {
    fn to_xstate(self) -> Result<XState, Error> {
        XState::new(
            self.rho11,
            self.rho22,
            self.rho33,
            self.rho44,
            num_complex_from(self.re14, self.im14),
            num_complex_from(self.re23, self.im23),
        )
    }

    fn from_xstate(x: &XState) -> Self {
        RfXState {
            rho11: x.rho11(),
            rho22: x.rho22(),
            rho33: x.rho33(),
            rho44: x.rho44(),
            re14: x.rho14().re,
            im14: x.rho14().im,
            re23: x.rho23().re,
            im23: x.rho23().im,
        }
    }
}

fn num_complex_from(re: f64, im: f64) -> num_complex::Complex64 {
    num_complex::Complex64::new(re, im)
}

/// Builds a bath handle from the full parameter set
/// `(omega, omega_tilde, a, b, alpha, gamma, w, beta)`.
///
/// # Safety
/// `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn rf_bath_new(
    omega: f64,
    omega_tilde: f64,
    a: f64,
    b: f64,
    alpha: f64,
    gamma: f64,
    w: f64,
    beta: f64,
    out: *mut *mut RfBath,
) -> RfStatus {
    if out.is_null() {
        return RfStatus::NullPointer;
    }
    match BathParameters::new(omega, omega_tilde, a, b, alpha, gamma, w, beta) {
        Ok(params) => {
            *out = Box::into_raw(Box::new(RfBath { params }));
            RfStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Builds a bath handle from rates plus the thermal ratio `w/gamma`,
/// with the renormalized frequency defaulting to `omega`.
///
/// # Safety
/// `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn rf_bath_with_ratio(
    omega: f64,
    a: f64,
    b: f64,
    alpha: f64,
    gamma: f64,
    ratio: f64,
    out: *mut *mut RfBath,
) -> RfStatus {
    if out.is_null() {
        return RfStatus::NullPointer;
    }
    match BathParameters::with_ratio(omega, a, b, alpha, gamma, ratio) {
        Ok(params) => {
            *out = Box::into_raw(Box::new(RfBath { params }));
            RfStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Releases a bath handle.  Passing null is a no-op.
///
/// # Safety
/// `bath` must be a handle produced by this library, released at most
/// once.
#[no_mangle]
pub unsafe extern "C" fn rf_bath_free(bath: *mut RfBath) {
    if !bath.is_null() {
        drop(Box::from_raw(bath));
    }
}

/// Creates a new handle carrying the ergodic average of `bath`:
/// transversal rates averaged, `b` dropped.
///
/// # Safety
/// `bath` must be a valid handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rf_bath_davies(bath: *const RfBath, out: *mut *mut RfBath) -> RfStatus {
    if bath.is_null() || out.is_null() {
        return RfStatus::NullPointer;
    }
    let params = davies_average(&(*bath).params);
    *out = Box::into_raw(Box::new(RfBath { params }));
    RfStatus::Ok
}

/// The coherent rotation frequency
/// `Omega = sqrt(4 omega_tilde^2 - 4 b^2 - (a - alpha)^2)`.
///
/// # Safety
/// `bath` must be a valid handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rf_bath_big_omega(bath: *const RfBath, out: *mut f64) -> RfStatus {
    if bath.is_null() || out.is_null() {
        return RfStatus::NullPointer;
    }
    *out = big_omega(&(*bath).params);
    RfStatus::Ok
}

/// The thermal fixed point as a Bloch vector `(0, 0, -w/gamma)`.
///
/// # Safety
/// `bath` must be a valid handle; `bloch_out` must point to 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn rf_bath_gibbs(bath: *const RfBath, bloch_out: *mut f64) -> RfStatus {
    if bath.is_null() || bloch_out.is_null() {
        return RfStatus::NullPointer;
    }
    match gibbs_state(&(*bath).params) {
        Ok(state) => {
            write_bloch(bloch_out, &state);
            RfStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

unsafe fn write_bloch(out: *mut f64, state: &BlochState) {
    *out = state.r1;
    *out.add(1) = state.r2;
    *out.add(2) = state.r3;
}

/// Evolves a single-qubit Bloch vector for a time `t >= 0`.
///
/// # Safety
/// `bath` must be a valid handle; `bloch_in` and `bloch_out` must point
/// to 3 doubles each (they may alias).
#[no_mangle]
pub unsafe extern "C" fn rf_propagate(
    bath: *const RfBath,
    t: f64,
    bloch_in: *const f64,
    bloch_out: *mut f64,
) -> RfStatus {
    if bath.is_null() || bloch_in.is_null() || bloch_out.is_null() {
        return RfStatus::NullPointer;
    }
    let state = BlochState::new(*bloch_in, *bloch_in.add(1), *bloch_in.add(2));
    match propagate(&(*bath).params, &state, t) {
        Ok(evolved) => {
            write_bloch(bloch_out, &evolved);
            RfStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Initial rate of change of the Bloch-ball determinant function along
/// the evolution started from `bloch_in`; negative values witness
/// positivity loss.
///
/// # Safety
/// `bath` must be a valid handle; `bloch_in` must point to 3 doubles;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rf_det_rate_at_zero(
    bath: *const RfBath,
    bloch_in: *const f64,
    out: *mut f64,
) -> RfStatus {
    if bath.is_null() || bloch_in.is_null() || out.is_null() {
        return RfStatus::NullPointer;
    }
    let state = BlochState::new(*bloch_in, *bloch_in.add(1), *bloch_in.add(2));
    *out = det_rate_at_zero(&(*bath).params, &state);
    RfStatus::Ok
}

/// Looks for a pure state contracted at a negative determinant rate at
/// `t = 0`.  Writes 1 to `found_out` and the state to `bloch_out` when
/// one exists (`b^2 > a * alpha`), 0 otherwise.
///
/// # Safety
/// `bath` must be a valid handle; `bloch_out` must point to 3 doubles;
/// `found_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rf_positivity_witness(
    bath: *const RfBath,
    bloch_out: *mut f64,
    found_out: *mut i32,
) -> RfStatus {
    if bath.is_null() || bloch_out.is_null() || found_out.is_null() {
        return RfStatus::NullPointer;
    }
    match positivity_witness(&(*bath).params) {
        Some(state) => {
            write_bloch(bloch_out, &state);
            *found_out = 1;
        }
        None => {
            *found_out = 0;
        }
    }
    RfStatus::Ok
}

/// Builds the four-parameter initial X-state
/// `diag(mu, nu, 1 - 2 mu - nu, mu)` with coherences `rho14 = u`,
/// `rho23 = i v`, validating the admissibility constraints.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rf_family_state(
    mu: f64,
    nu: f64,
    u: f64,
    v: f64,
    out: *mut RfXState,
) -> RfStatus {
    if out.is_null() {
        return RfStatus::NullPointer;
    }
    match FamilyParams::new(mu, nu, u, v).to_xstate() {
        Ok(x) => {
            *out = RfXState::from_xstate(&x);
            RfStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Evolves an X-state under `id (x) map_t` for a time `t >= 0`: the
/// first (ancilla) factor is untouched, the second factor evolves.
///
/// # Safety
/// `bath` must be a valid handle; `state_in` and `state_out` must be
/// valid (they may alias).
#[no_mangle]
pub unsafe extern "C" fn rf_evolve(
    bath: *const RfBath,
    state_in: *const RfXState,
    t: f64,
    state_out: *mut RfXState,
) -> RfStatus {
    if bath.is_null() || state_in.is_null() || state_out.is_null() {
        return RfStatus::NullPointer;
    }
    let x = match (*state_in).to_xstate() {
        Ok(x) => x,
        Err(e) => return status_of(&e),
    };
    match x.evolve(&(*bath).params, t) {
        Ok(evolved) => {
            *state_out = RfXState::from_xstate(&evolved);
            RfStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Concurrence of a physical X-state.
///
/// # Safety
/// `state` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rf_concurrence(state: *const RfXState, out: *mut f64) -> RfStatus {
    if state.is_null() || out.is_null() {
        return RfStatus::NullPointer;
    }
    let x = match (*state).to_xstate() {
        Ok(x) => x,
        Err(e) => return status_of(&e),
    };
    match x.concurrence() {
        Ok(c) => {
            *out = c;
            RfStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Mutual information between the two qubits of an X-state.
///
/// # Safety
/// `state` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rf_mutual_information(
    state: *const RfXState,
    out: *mut f64,
) -> RfStatus {
    if state.is_null() || out.is_null() {
        return RfStatus::NullPointer;
    }
    let x = match (*state).to_xstate() {
        Ok(x) => x,
        Err(e) => return status_of(&e),
    };
    match mutual_information(&x.dense()) {
        Ok(mi) => {
            *out = mi;
            RfStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Smallest eigenvalue of the Choi matrix of the time-`t` map; negative
/// values mean the map is not completely positive.
///
/// # Safety
/// `bath` must be a valid handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rf_choi_min_eig(
    bath: *const RfBath,
    t: f64,
    out: *mut f64,
) -> RfStatus {
    if bath.is_null() || out.is_null() {
        return RfStatus::NullPointer;
    }
    match choi_at(&(*bath).params, t, 0.0) {
        Ok(report) => {
            *out = report.min_eig;
            RfStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Initial growth rate of the dominant concurrence branch for a family
/// state under zero-temperature rates.
///
/// # Safety
/// `bath` must be a valid handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rf_concurrence_slope_zero_temperature(
    bath: *const RfBath,
    mu: f64,
    nu: f64,
    u: f64,
    v: f64,
    out: *mut f64,
) -> RfStatus {
    if bath.is_null() || out.is_null() {
        return RfStatus::NullPointer;
    }
    match concurrence_slope_zero_temperature(&(*bath).params, &FamilyParams::new(mu, nu, u, v)) {
        Ok(slope) => {
            *out = slope;
            RfStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// A static, null-terminated name for a status code.
#[no_mangle]
pub extern "C" fn rf_status_name(status: RfStatus) -> *const c_char {
    let name: &'static [u8] = match status {
        RfStatus::Ok => b"ok\0",
        RfStatus::NullPointer => b"null pointer\0",
        RfStatus::InvalidArgument => b"invalid argument\0",
        RfStatus::InvalidRates => b"invalid rates\0",
        RfStatus::UnphysicalState => b"unphysical state\0",
        RfStatus::FamilyConstraint => b"family constraint violated\0",
        RfStatus::NoEquilibrium => b"no dissipative fixed point\0",
        RfStatus::FiniteTemperature => b"requires zero temperature\0",
        RfStatus::NumericalFailure => b"numerical failure\0",
    };
    name.as_ptr().cast()
}
