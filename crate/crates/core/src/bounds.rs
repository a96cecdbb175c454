//! Closed-form sum s.d.o.f. values and comparison curves.
//!
//! Without eavesdropper CSIT the optimal linear sum s.d.o.f. is
//! `max((2N - K)/2, 0)`. The general (not necessarily linear) upper bound
//! coincides with it for `K <= N` and `K >= 2N`, and is
//! `min(N/2, 2N(2N - K)/(4N - K))` in between. For comparison the curves
//! also carry the full-CSIT values and the arbitrarily varying eavesdropper
//! value `max(N - K, 0)`, each only in the regimes where it is known.

use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::codec::format_rational;
use crate::error::{Result, SdofError};

fn frac(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

fn clamp_nonneg(x: BigRational) -> BigRational {
    if x.is_negative() {
        BigRational::zero()
    } else {
        x
    }
}

/// `max((2N - K)/2, 0)`.
pub fn linear_sum_sdof(n: usize, k: usize) -> BigRational {
    let (n, k) = (n as i64, k as i64);
    clamp_nonneg(frac(2 * n - k, 2))
}

pub fn general_upper_sdof(n: usize, k: usize) -> BigRational {
    let (n, k) = (n as i64, k as i64);
    if k <= n {
        frac(2 * n - k, 2)
    } else if k < 2 * n {
        frac(n, 2).min(frac(2 * n * (2 * n - k), 4 * n - k))
    } else {
        BigRational::zero()
    }
}

/// Full-CSIT MAC-WT sum s.d.o.f. `min(N, 2/3 (2N - K))`, known for `K <= N`.
pub fn fullcsit_macwt_sdof(n: usize, k: usize) -> Option<BigRational> {
    let (n, k) = (n as i64, k as i64);
    (k <= n).then(|| frac(n, 1).min(frac(2 * (2 * n - k), 3)))
}

/// Full-CSIT helper-model s.d.o.f.: `(2N - K)/2` for `K <= N` and
/// `min(N/2, 2N - K)` for `4N/3 <= K <= 2N`; unknown in between. Beyond `2N`
/// the value is zero.
pub fn fullcsit_wth_sdof(n: usize, k: usize) -> Option<BigRational> {
    let (n, k) = (n as i64, k as i64);
    if k <= n {
        Some(frac(2 * n - k, 2))
    } else if 3 * k >= 4 * n {
        Some(clamp_nonneg(frac(n, 2).min(frac(2 * n - k, 1))))
    } else {
        None
    }
}

/// Arbitrarily varying eavesdropper: `max(N - K, 0)`.
pub fn avc_sdof(n: usize, k: usize) -> BigRational {
    clamp_nonneg(frac(n as i64 - k as i64, 1))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundPoint {
    pub n_antennas: usize,
    pub k_eve: usize,
    pub linear_optimal: BigRational,
    pub general_upper: BigRational,
    pub fullcsit_macwt: Option<BigRational>,
    pub fullcsit_wth: Option<BigRational>,
    pub avc_value: BigRational,
}

pub fn comparison_curves(n: usize, k: usize) -> BoundPoint {
    BoundPoint {
        n_antennas: n,
        k_eve: k,
        linear_optimal: linear_sum_sdof(n, k),
        general_upper: general_upper_sdof(n, k),
        fullcsit_macwt: fullcsit_macwt_sdof(n, k),
        fullcsit_wth: fullcsit_wth_sdof(n, k),
        avc_value: avc_sdof(n, k),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveFormat {
    Csv,
    Json,
    /// Whitespace-separated decimal columns, `#` header, `NaN` for unknown.
    Gnuplot,
}

impl FromStr for CurveFormat {
    type Err = SdofError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(CurveFormat::Csv),
            "json" => Ok(CurveFormat::Json),
            "gnuplot" | "dat" => Ok(CurveFormat::Gnuplot),
            _ => Err(SdofError::UnsupportedFormat(s.to_string())),
        }
    }
}

pub const CURVE_CSV_HEADER: &str = "N,K,linear_optimal,general_upper,fullcsit_macwt,fullcsit_wth,avc";

pub fn curve_points(n: usize, k_range: std::ops::RangeInclusive<usize>) -> Vec<BoundPoint> {
    k_range.map(|k| comparison_curves(n, k)).collect()
}

/// Renders one row per `K`. Unknown comparison values are empty in CSV,
/// `null` in JSON and `NaN` in the gnuplot layout.
pub fn emit_curve(n: usize, k_range: std::ops::RangeInclusive<usize>, format: CurveFormat) -> String {
    let points = curve_points(n, k_range);
    match format {
        CurveFormat::Csv => {
            let mut out = String::from(CURVE_CSV_HEADER);
            out.push('\n');
            for p in &points {
                let opt = |x: &Option<BigRational>| x.as_ref().map(format_rational).unwrap_or_default();
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    p.n_antennas,
                    p.k_eve,
                    format_rational(&p.linear_optimal),
                    format_rational(&p.general_upper),
                    opt(&p.fullcsit_macwt),
                    opt(&p.fullcsit_wth),
                    format_rational(&p.avc_value)
                )
                .unwrap();
            }
            out
        }
        CurveFormat::Json => {
            let rows: Vec<JsonPoint> = points.iter().map(JsonPoint::from).collect();
            serde_json::to_string_pretty(&rows).expect("curve serializes") + "\n"
        }
        CurveFormat::Gnuplot => {
            let mut out = String::from("# N K linear_optimal general_upper fullcsit_macwt fullcsit_wth avc\n");
            let dec = |x: &BigRational| format!("{:.6}", x.to_f64().unwrap_or(f64::NAN));
            let opt = |x: &Option<BigRational>| x.as_ref().map_or_else(|| "NaN".to_string(), dec);
            for p in &points {
                writeln!(
                    out,
                    "{} {} {} {} {} {} {}",
                    p.n_antennas,
                    p.k_eve,
                    dec(&p.linear_optimal),
                    dec(&p.general_upper),
                    opt(&p.fullcsit_macwt),
                    opt(&p.fullcsit_wth),
                    dec(&p.avc_value)
                )
                .unwrap();
            }
            out
        }
    }
}

#[derive(Serialize)]
struct JsonPoint {
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "K")]
    k: usize,
    linear_optimal: String,
    general_upper: String,
    fullcsit_macwt: Option<String>,
    fullcsit_wth: Option<String>,
    avc: String,
}

impl From<&BoundPoint> for JsonPoint {
    fn from(p: &BoundPoint) -> Self {
        JsonPoint {
            n: p.n_antennas,
            k: p.k_eve,
            linear_optimal: format_rational(&p.linear_optimal),
            general_upper: format_rational(&p.general_upper),
            fullcsit_macwt: p.fullcsit_macwt.as_ref().map(format_rational),
            fullcsit_wth: p.fullcsit_wth.as_ref().map(format_rational),
            avc: format_rational(&p.avc_value),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_values() {
        assert_eq!(linear_sum_sdof(1, 1), frac(1, 2));
        assert_eq!(linear_sum_sdof(4, 8), frac(0, 1));
        assert_eq!(linear_sum_sdof(3, 2), frac(2, 1));
        assert_eq!(linear_sum_sdof(2, 9), frac(0, 1));
    }

    #[test]
    fn general_upper_values() {
        assert_eq!(general_upper_sdof(2, 3), frac(4, 5));
        // K = 4N/3: both expressions meet at N/2.
        assert_eq!(frac(2 * 3 * (6 - 4), 12 - 4), frac(3, 2));
        assert_eq!(general_upper_sdof(3, 4), frac(3, 2));
        assert_eq!(general_upper_sdof(1, 1), frac(1, 2));
        assert_eq!(general_upper_sdof(2, 5), frac(0, 1));
    }

    #[test]
    fn comparison_examples() {
        let p = comparison_curves(2, 1);
        assert_eq!(p.fullcsit_macwt, Some(frac(2, 1)));
        assert_eq!(p.linear_optimal, frac(3, 2));
        assert_eq!(p.avc_value, frac(1, 1));
        assert_eq!(comparison_curves(2, 2).avc_value, frac(0, 1));

        let p = comparison_curves(1, 0);
        let one = frac(1, 1);
        assert_eq!(p.linear_optimal, one);
        assert_eq!(p.general_upper, one);
        assert_eq!(p.fullcsit_macwt, Some(one.clone()));
        assert_eq!(p.fullcsit_wth, Some(one.clone()));
        assert_eq!(p.avc_value, one);
    }

    #[test]
    fn comparison_columns_absent_outside_their_regimes() {
        // N = 3: MAC-WT known for K <= 3, helper model for K <= 3 and K >= 4.
        assert!(fullcsit_macwt_sdof(3, 4).is_none());
        assert!(fullcsit_wth_sdof(3, 4).is_some());
        // N = 4: 4N/3 = 16/3, so K = 5 has no stated helper-model value.
        assert!(fullcsit_wth_sdof(4, 5).is_none());
        assert_eq!(fullcsit_wth_sdof(4, 6), Some(frac(2, 1)));
        assert_eq!(fullcsit_wth_sdof(4, 7), Some(frac(1, 1)));
    }

    #[test]
    fn csv_layout() {
        let csv = emit_curve(4, 0..=2, CurveFormat::Csv);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CURVE_CSV_HEADER);
        assert_eq!(lines[1], "4,0,4,4,4,4,4");
        assert_eq!(lines[2], "4,1,7/2,7/2,4,7/2,3");
        assert_eq!(lines.len(), 4);
        let far = emit_curve(4, 9..=9, CurveFormat::Csv);
        assert_eq!(far.lines().nth(1), Some("4,9,0,0,,0,0"));
    }

    #[test]
    fn gnuplot_and_json_layouts() {
        let g = emit_curve(2, 3..=3, CurveFormat::Gnuplot);
        assert_eq!(g.lines().nth(1), Some("2 3 0.500000 0.800000 NaN 1.000000 0.000000"));
        let j: serde_json::Value = serde_json::from_str(&emit_curve(2, 3..=3, CurveFormat::Json)).unwrap();
        assert_eq!(j[0]["general_upper"], "4/5");
        assert!(j[0]["fullcsit_macwt"].is_null());
        assert!(matches!("xml".parse::<CurveFormat>(), Err(SdofError::UnsupportedFormat(_))));
    }

    #[test]
    fn every_column_is_non_increasing() {
        for n in 1..=8 {
            let pts = curve_points(n, 0..=2 * n + 2);
            let cols: [fn(&BoundPoint) -> Option<BigRational>; 5] = [
                |p| Some(p.linear_optimal.clone()),
                |p| Some(p.general_upper.clone()),
                |p| p.fullcsit_macwt.clone(),
                |p| p.fullcsit_wth.clone(),
                |p| Some(p.avc_value.clone()),
            ];
            for col in cols {
                let vals: Vec<_> = pts.iter().filter_map(col).collect();
                assert!(vals.windows(2).all(|w| w[0] >= w[1]), "N={n}");
            }
        }
    }

    #[test]
    fn orderings_between_curves() {
        for n in 1..=8usize {
            for k in 0..=2 * n {
                let p = comparison_curves(n, k);
                if k <= n || k >= 2 * n {
                    assert_eq!(p.general_upper, p.linear_optimal);
                } else {
                    assert!(p.general_upper >= p.linear_optimal);
                }
                if k > 0 && k < 2 * n {
                    assert!(p.avc_value < p.linear_optimal);
                }
            }
            if n >= 2 {
                let k = 2 * n - 1;
                assert_eq!(general_upper_sdof(n, k), frac(2 * n as i64, 2 * n as i64 + 1));
                assert!(general_upper_sdof(n, k) > linear_sum_sdof(n, k));
            }
        }
    }
}
