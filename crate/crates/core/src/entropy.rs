//! Finite-power Gaussian entropies and mutual informations for linear
//! schemes, plus high-SNR slope estimation.
//!
//! With Gaussian symbols of variance `alpha * P` and identity-covariance
//! receiver noise, an output `A x + z` has differential entropy
//! `1/2 ln det(2 pi e (alpha P A A^T + I))`, which grows like
//! `rank(A) * (1/2 ln P)`. Fitting that slope numerically gives a float-side
//! check of every exact rank computed elsewhere.
//!
//! Rational precoders are converted to `f64` once, when a
//! [`GaussianLinearSystem`] is built; nothing exact happens past that point.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::channel::{StackedChannel, Transmitter};
use crate::error::{Result, SdofError};
use crate::matcore::RationalMatrix;
use crate::scheme::LinearScheme;

/// `P` values `1e2, 1e4, ..., 1e10`.
pub const DEFAULT_POWER_GRID: [f64; 5] = [1e2, 1e4, 1e6, 1e8, 1e10];

pub fn to_dmatrix(m: &RationalMatrix) -> DMatrix<f64> {
    let rows = m.to_f64_rows();
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| rows[i][j])
}

/// `1/2 ln det(2 pi e (alpha P A A^T + I_M))` in nats.
pub fn gaussian_entropy(map: &DMatrix<f64>, power: f64, alpha: f64) -> Result<f64> {
    if power.is_nan() || power <= 0.0 {
        return Err(SdofError::NumericalFailure(format!("power must be positive, got {power}")));
    }
    let m = map.nrows();
    if m == 0 {
        return Ok(0.0);
    }
    let mut cov = map * map.transpose() * (alpha * power);
    for i in 0..m {
        cov[(i, i)] += 1.0;
    }
    let chol = cov.cholesky().ok_or_else(|| {
        SdofError::NumericalFailure(format!("covariance lost positive definiteness at P = {power:e}"))
    })?;
    let log_det: f64 = 2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>();
    Ok(0.5 * (m as f64 * (2.0 * PI * std::f64::consts::E).ln() + log_det))
}

/// Symbol variance scale shared by every symbol: one over the largest number
/// of symbols (information plus noise) any single transmitter sends.
pub fn symbol_variance_scale(s: &LinearScheme) -> f64 {
    let busiest = (s.m1() + s.nn1()).max(s.m2() + s.nn2()).max(1);
    1.0 / busiest as f64
}

/// Receiver output `info_map v + noise_map u + z`.
#[derive(Clone, Debug)]
pub struct GaussianLinearSystem {
    info_map: DMatrix<f64>,
    noise_map: DMatrix<f64>,
    alpha: f64,
}

impl GaussianLinearSystem {
    pub fn new(info_map: DMatrix<f64>, noise_map: DMatrix<f64>, alpha: f64) -> Result<Self> {
        if info_map.nrows() != noise_map.nrows() {
            return Err(SdofError::mismatch(
                "gaussian system",
                format!("{} output rows", info_map.nrows()),
                noise_map.nrows(),
            ));
        }
        Ok(Self {
            info_map,
            noise_map,
            alpha,
        })
    }

    /// Output seen through `barH_1, barH_2`.
    pub fn legitimate(s: &LinearScheme, c: &StackedChannel) -> Result<Self> {
        Self::through(s, c, |tx| c.bar_h(tx))
    }

    /// Output seen through `barG_1, barG_2`.
    pub fn eavesdropper(s: &LinearScheme, c: &StackedChannel) -> Result<Self> {
        Self::through(s, c, |tx| c.bar_g(tx))
    }

    fn through<'a>(
        s: &LinearScheme,
        c: &'a StackedChannel,
        channel: impl Fn(Transmitter) -> &'a RationalMatrix,
    ) -> Result<Self> {
        use Transmitter::{First, Second};
        if s.dims() != c.dims() {
            return Err(SdofError::mismatch(
                "gaussian system",
                format!("{:?}", c.dims()),
                format!("{:?}", s.dims()),
            ));
        }
        let exact = |tx: Transmitter, precoder: &RationalMatrix| channel(tx).mul(precoder).map(|m| to_dmatrix(&m));
        let info = hstack(&exact(First, s.bar_p(First))?, &exact(Second, s.bar_p(Second))?);
        let noise = hstack(&exact(First, s.bar_q(First))?, &exact(Second, s.bar_q(Second))?);
        Self::new(info, noise, symbol_variance_scale(s))
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn info_map(&self) -> &DMatrix<f64> {
        &self.info_map
    }

    pub fn noise_map(&self) -> &DMatrix<f64> {
        &self.noise_map
    }

    /// `I(v; y) = h(y) - h(y | v)`.
    pub fn mutual_information(&self, power: f64) -> Result<f64> {
        if self.info_map.nrows() == 0 {
            return Ok(0.0);
        }
        let joint = hstack(&self.info_map, &self.noise_map);
        let h = gaussian_entropy(&joint, power, self.alpha)?;
        let h_given_info = gaussian_entropy(&self.noise_map, power, self.alpha)?;
        Ok(h - h_given_info)
    }
}

fn hstack(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    out.columns_mut(0, a.ncols()).copy_from(a);
    out.columns_mut(a.ncols(), b.ncols()).copy_from(b);
    out
}

/// `I(v1, v2; barZ)` in nats.
pub fn leakage_mi(s: &LinearScheme, c: &StackedChannel, power: f64) -> Result<f64> {
    GaussianLinearSystem::eavesdropper(s, c)?.mutual_information(power)
}

/// `I(v1, v2; barY)` in nats.
pub fn legitimate_mi(s: &LinearScheme, c: &StackedChannel, power: f64) -> Result<f64> {
    GaussianLinearSystem::legitimate(s, c)?.mutual_information(power)
}

/// Secrecy rate per channel use in units of `1/2 ln P`.
pub fn secrecy_rate_proxy(s: &LinearScheme, c: &StackedChannel, power: f64) -> Result<f64> {
    let rate = legitimate_mi(s, c, power)? - leakage_mi(s, c, power)?;
    Ok(rate / (s.dims().n_slots as f64 * 0.5 * power.ln()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MISweep {
    pub powers: Vec<f64>,
    pub values: Vec<f64>,
    /// Least-squares slope of `values` against `1/2 ln P` over the top half
    /// of the grid.
    pub fitted_slope: f64,
    /// Root-mean-square residual of that fit.
    pub residual: f64,
}

fn check_power_grid(powers: &[f64]) -> Result<()> {
    if powers.len() < 4 {
        return Err(SdofError::InvalidPowerGrid(format!("need at least 4 points, got {}", powers.len())));
    }
    if powers.iter().any(|&p| !p.is_finite() || p < 1e2) {
        return Err(SdofError::InvalidPowerGrid("every power must be finite and >= 1e2".into()));
    }
    if powers.windows(2).any(|w| w[1] <= w[0]) {
        return Err(SdofError::InvalidPowerGrid("powers must be strictly increasing".into()));
    }
    if (powers[powers.len() - 1] / powers[0]).log10() < 6.0 - 1e-9 {
        return Err(SdofError::InvalidPowerGrid("grid must span at least 6 decades".into()));
    }
    Ok(())
}

/// Evaluates `f` on the grid and fits the d.o.f. slope. Low-power points are
/// dominated by the constant terms, so only the top half of the grid enters
/// the fit.
pub fn dof_slope(mut f: impl FnMut(f64) -> Result<f64>, powers: &[f64]) -> Result<MISweep> {
    check_power_grid(powers)?;
    let values = powers.iter().map(|&p| f(p)).collect::<Result<Vec<_>>>()?;
    let start = powers.len() / 2;
    let xs: Vec<f64> = powers[start..].iter().map(|p| 0.5 * p.ln()).collect();
    let ys = &values[start..];
    let (slope, residual) = least_squares_slope(&xs, ys);
    Ok(MISweep {
        powers: powers.to_vec(),
        values,
        fitted_slope: slope,
        residual,
    })
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    (slope, (sse / n).sqrt())
}

/// Legitimate and leakage sweeps for one scheme over one realization.
#[derive(Clone, Debug, Serialize)]
pub struct SchemeSweep {
    pub legitimate: MISweep,
    pub leakage: MISweep,
    pub alpha: f64,
}

pub const SWEEP_CSV_HEADER: &str = "P,mi_legitimate_nats,mi_leakage_nats";

impl SchemeSweep {
    pub fn run(s: &LinearScheme, c: &StackedChannel, powers: &[f64]) -> Result<Self> {
        let bob = GaussianLinearSystem::legitimate(s, c)?;
        let eve = GaussianLinearSystem::eavesdropper(s, c)?;
        Ok(Self {
            legitimate: dof_slope(|p| bob.mutual_information(p), powers)?,
            leakage: dof_slope(|p| eve.mutual_information(p), powers)?,
            alpha: bob.alpha(),
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(SWEEP_CSV_HEADER);
        out.push('\n');
        for ((p, a), b) in self.legitimate.powers.iter().zip(&self.legitimate.values).zip(&self.leakage.values) {
            out.push_str(&format!("{p:e},{a:.12},{b:.12}\n"));
        }
        out
    }
}
