use thiserror::Error;

/// Errors raised by the models. Values are carried as `f64` so the error type
/// stays independent of the scalar parameter.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error(
        "no finite altitude gives global coverage: inclination {inclination_deg:.3} deg \
         must exceed minimum elevation {min_elevation_deg:.3} deg"
    )]
    NoGlobalCoverage {
        inclination_deg: f64,
        min_elevation_deg: f64,
    },

    #[error(
        "effective satellite count diverges: |user latitude| {latitude_deg:.3} deg \
         is not below inclination {inclination_deg:.3} deg"
    )]
    EffectiveCountSingular { latitude_deg: f64, inclination_deg: f64 },

    #[error(
        "quadrature did not converge: value {value}, estimated error {abs_error} after {subdivisions} subdivisions"
    )]
    QuadratureNotConverged {
        value: f64,
        abs_error: f64,
        subdivisions: usize,
    },

    #[error("walker constellation {planes}x{sats_per_plane} does not match n_act = {n_act}")]
    WalkerMismatch {
        planes: usize,
        sats_per_plane: usize,
        n_act: usize,
    },

    #[error("sweep needs at least two grid points, got {0}")]
    SweepTooShort(usize),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Fails with [`Error::InvalidParameter`] unless `ok`.
pub(crate) fn ensure(ok: bool, name: &'static str, value: f64, reason: &'static str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, value, reason })
    }
}
