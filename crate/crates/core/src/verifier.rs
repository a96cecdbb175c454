//! Rank-based decodability and secrecy checks for linear schemes.
//!
//! At the legitimate receiver the information is decodable when the
//! received information subspace keeps all `m1 + m2` dimensions outside the
//! noise subspace. At the eavesdropper, the leakage `L(n)` counts the
//! information dimensions that stick out of the noise subspace. Both are
//! differences of two exact ranks.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Serialize, Serializer};

use crate::channel::{StackedChannel, Transmitter};
use crate::codec::format_rational;
use crate::error::{Result, SdofError};
use crate::matcore::{hconcat, RationalMatrix};
use crate::scheme::LinearScheme;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub n_antennas: usize,
    pub k_eve: usize,
    pub n_slots: usize,
    pub m1: usize,
    pub m2: usize,
    pub n1: usize,
    pub n2: usize,
    pub decodable_dims: usize,
    pub leakage_dims: usize,
    pub eve_space_rank: usize,
    pub decodability_ok: bool,
    /// Requires `L(n) = 0` exactly.
    pub security_ok: bool,
    #[serde(serialize_with = "serialize_opt_rational")]
    pub achieved_sum_sdof: Option<BigRational>,
}

pub const REPORT_CSV_HEADER: &str = "N,K,n,m1,m2,n1,n2,decodable_dims,leakage_dims,eve_rank,sdof,ok";

impl VerificationReport {
    pub fn ok(&self) -> bool {
        self.decodability_ok && self.security_ok
    }

    /// One CSV row matching [`REPORT_CSV_HEADER`]; `sdof` is empty when the
    /// scheme fails either check.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.n_antennas,
            self.k_eve,
            self.n_slots,
            self.m1,
            self.m2,
            self.n1,
            self.n2,
            self.decodable_dims,
            self.leakage_dims,
            self.eve_space_rank,
            self.achieved_sum_sdof.as_ref().map(format_rational).unwrap_or_default(),
            self.ok()
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

fn serialize_opt_rational<S: Serializer>(x: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(x) => s.serialize_some(&format_rational(x)),
        None => s.serialize_none(),
    }
}

fn check_dims(s: &LinearScheme, c: &StackedChannel) -> Result<()> {
    if s.dims() != c.dims() {
        return Err(SdofError::mismatch(
            "verification",
            format!("{:?}", c.dims()),
            format!("{:?}", s.dims()),
        ));
    }
    Ok(())
}

/// Ranks of `[X1 P1, X2 P2, X1 Q1, X2 Q2]` and of `[X1 Q1, X2 Q2]`.
fn signal_and_noise_ranks(
    s: &LinearScheme,
    channel: impl Fn(Transmitter) -> RationalMatrix,
) -> Result<(usize, usize)> {
    use Transmitter::{First, Second};
    let x1 = channel(First);
    let x2 = channel(Second);
    let p1 = x1.mul(s.bar_p(First))?;
    let p2 = x2.mul(s.bar_p(Second))?;
    let q1 = x1.mul(s.bar_q(First))?;
    let q2 = x2.mul(s.bar_q(Second))?;
    let all = hconcat(&[&p1, &p2, &q1, &q2])?.rank();
    let noise = hconcat(&[&q1, &q2])?.rank();
    Ok((all, noise))
}

pub fn decodable_dimensions(s: &LinearScheme, c: &StackedChannel) -> Result<usize> {
    check_dims(s, c)?;
    let (all, noise) = signal_and_noise_ranks(s, |tx| c.bar_h(tx).clone())?;
    Ok(all - noise)
}

/// `L(n)`.
pub fn leakage_dimensions(s: &LinearScheme, c: &StackedChannel) -> Result<usize> {
    check_dims(s, c)?;
    let (all, noise) = signal_and_noise_ranks(s, |tx| c.bar_g(tx).clone())?;
    Ok(all - noise)
}

pub fn verify(s: &LinearScheme, c: &StackedChannel) -> Result<VerificationReport> {
    check_dims(s, c)?;
    let (bob_all, bob_noise) = signal_and_noise_ranks(s, |tx| c.bar_h(tx).clone())?;
    let (eve_all, eve_noise) = signal_and_noise_ranks(s, |tx| c.bar_g(tx).clone())?;
    let dims = s.dims();
    let decodable_dims = bob_all - bob_noise;
    let leakage_dims = eve_all - eve_noise;
    let decodability_ok = decodable_dims == s.info_symbols();
    let security_ok = leakage_dims == 0;
    let achieved_sum_sdof = (decodability_ok && security_ok)
        .then(|| BigRational::new(BigInt::from(s.info_symbols()), BigInt::from(dims.n_slots)));
    Ok(VerificationReport {
        n_antennas: dims.n_antennas,
        k_eve: dims.k_eve,
        n_slots: dims.n_slots,
        m1: s.m1(),
        m2: s.m2(),
        n1: s.nn1(),
        n2: s.nn2(),
        decodable_dims,
        leakage_dims,
        eve_space_rank: eve_noise,
        decodability_ok,
        security_ok,
        achieved_sum_sdof,
    })
}

/// Fraction of the eavesdropper's `K n` dimensions filled by artificial noise.
pub fn full_space_ratio(s: &LinearScheme, c: &StackedChannel) -> Result<BigRational> {
    check_dims(s, c)?;
    let kn = c.dims().stacked_k();
    if kn == 0 {
        return Err(SdofError::InvalidRegime("full-space ratio needs K >= 1".into()));
    }
    let (_, noise) = signal_and_noise_ranks(s, |tx| c.bar_g(tx).clone())?;
    Ok(BigRational::new(noise.into(), kn.into()))
}

/// Pass counts over a batch of reports, e.g. one per seed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerificationTally {
    pub runs: usize,
    pub decodable: usize,
    pub secure: usize,
    pub both: usize,
}

impl VerificationTally {
    pub fn record(&mut self, r: &VerificationReport) {
        self.runs += 1;
        self.decodable += usize::from(r.decodability_ok);
        self.secure += usize::from(r.security_ok);
        self.both += usize::from(r.ok());
    }
}

impl<'a> FromIterator<&'a VerificationReport> for VerificationTally {
    fn from_iter<I: IntoIterator<Item = &'a VerificationReport>>(iter: I) -> Self {
        let mut t = Self::default();
        for r in iter {
            t.record(r);
        }
        t
    }
}
