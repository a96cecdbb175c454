//! Linear precoding schemes over stacked channel uses.
//!
//! Transmitter `i` sends `barP_i v_i + barQ_i u_i`, where `v_i` holds `m_i`
//! information symbols and `u_i` holds `n_i` artificial-noise symbols. All
//! precoders have `N n` rows.
//!
//! The two-slot helper construction picks one common `2N x K` noise basis
//! `barQ` and sets `barQ_i = barH_i^{-1} barQ`, so both noise signals land in
//! the same `K`-dimensional subspace at the legitimate receiver while staying
//! spread out at the eavesdropper, whose channels the transmitters never see.

use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::channel::{json_error_field, LegitimateCsi, SystemDims, Transmitter, RESAMPLE_LIMIT};
use crate::codec::{matrix_from_text, matrix_to_text, MatrixText};
use crate::error::{Result, SdofError};
use crate::matcore::{block_diag, hconcat, RationalMatrix};
use crate::sampling::{derive_seed, rng_from_seed, RationalGrid};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearScheme {
    dims: SystemDims,
    bar_p1: RationalMatrix,
    bar_p2: RationalMatrix,
    bar_q1: RationalMatrix,
    bar_q2: RationalMatrix,
}

impl LinearScheme {
    /// Symbol counts are the column counts of the precoders; every precoder
    /// must have `N n` rows.
    pub fn new(
        dims: SystemDims,
        bar_p1: RationalMatrix,
        bar_p2: RationalMatrix,
        bar_q1: RationalMatrix,
        bar_q2: RationalMatrix,
    ) -> Result<Self> {
        dims.validate()?;
        let rows = dims.stacked_n();
        for (name, m) in [("barP1", &bar_p1), ("barP2", &bar_p2), ("barQ1", &bar_q1), ("barQ2", &bar_q2)] {
            if m.rows() != rows {
                return Err(SdofError::mismatch(
                    "linear scheme",
                    format!("{name} with {rows} rows"),
                    format!("{} rows", m.rows()),
                ));
            }
        }
        Ok(Self {
            dims,
            bar_p1,
            bar_p2,
            bar_q1,
            bar_q2,
        })
    }

    pub fn dims(&self) -> SystemDims {
        self.dims
    }

    pub fn m1(&self) -> usize {
        self.bar_p1.cols()
    }

    pub fn m2(&self) -> usize {
        self.bar_p2.cols()
    }

    pub fn nn1(&self) -> usize {
        self.bar_q1.cols()
    }

    pub fn nn2(&self) -> usize {
        self.bar_q2.cols()
    }

    pub fn info_symbols(&self) -> usize {
        self.m1() + self.m2()
    }

    pub fn bar_p(&self, tx: Transmitter) -> &RationalMatrix {
        match tx {
            Transmitter::First => &self.bar_p1,
            Transmitter::Second => &self.bar_p2,
        }
    }

    pub fn bar_q(&self, tx: Transmitter) -> &RationalMatrix {
        match tx {
            Transmitter::First => &self.bar_q1,
            Transmitter::Second => &self.bar_q2,
        }
    }

    /// `(m1/n, m2/n)`: the per-user linear s.d.o.f. the scheme targets.
    pub fn nominal_sdof_pair(&self) -> (BigRational, BigRational) {
        let n = BigInt::from(self.dims.n_slots);
        (
            BigRational::new(self.m1().into(), n.clone()),
            BigRational::new(self.m2().into(), n),
        )
    }

    /// Runs `self` and then `later` on consecutive slots. Precoders are
    /// combined block-diagonally, so neither scheme's symbols touch the
    /// other's slots.
    pub fn concat(&self, later: &LinearScheme) -> Result<LinearScheme> {
        let (a, b) = (self.dims, later.dims);
        if (a.n_antennas, a.k_eve) != (b.n_antennas, b.k_eve) {
            return Err(SdofError::mismatch(
                "scheme concatenation",
                format!("N={}, K={}", a.n_antennas, a.k_eve),
                format!("N={}, K={}", b.n_antennas, b.k_eve),
            ));
        }
        let join = |x: &RationalMatrix, y: &RationalMatrix| block_diag(&[x.clone(), y.clone()]);
        Ok(LinearScheme {
            dims: SystemDims {
                n_slots: a.n_slots + b.n_slots,
                ..a
            },
            bar_p1: join(&self.bar_p1, &later.bar_p1),
            bar_p2: join(&self.bar_p2, &later.bar_p2),
            bar_q1: join(&self.bar_q1, &later.bar_q1),
            bar_q2: join(&self.bar_q2, &later.bar_q2),
        })
    }

    pub fn to_json(&self) -> String {
        let file = SchemeFile {
            dims: self.dims,
            m1: self.m1(),
            m2: self.m2(),
            n1: self.nn1(),
            n2: self.nn2(),
            bar_p1: matrix_to_text(&self.bar_p1),
            bar_p2: matrix_to_text(&self.bar_p2),
            bar_q1: matrix_to_text(&self.bar_q1),
            bar_q2: matrix_to_text(&self.bar_q2),
        };
        serde_json::to_string_pretty(&file).expect("scheme serializes") + "\n"
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: SchemeFile =
            serde_json::from_str(s).map_err(|e| SdofError::malformed(json_error_field(&e), e.to_string()))?;
        file.dims
            .validate()
            .map_err(|e| SdofError::malformed("dims", e.to_string()))?;
        let rows = file.dims.stacked_n();
        let bar_p1 = matrix_from_text(&file.bar_p1, rows, file.m1, "barP1")?;
        let bar_p2 = matrix_from_text(&file.bar_p2, rows, file.m2, "barP2")?;
        let bar_q1 = matrix_from_text(&file.bar_q1, rows, file.n1, "barQ1")?;
        let bar_q2 = matrix_from_text(&file.bar_q2, rows, file.n2, "barQ2")?;
        Self::new(file.dims, bar_p1, bar_p2, bar_q1, bar_q2)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemeFile {
    dims: SystemDims,
    m1: usize,
    m2: usize,
    n1: usize,
    n2: usize,
    #[serde(rename = "barP1")]
    bar_p1: MatrixText,
    #[serde(rename = "barP2")]
    bar_p2: MatrixText,
    #[serde(rename = "barQ1")]
    bar_q1: MatrixText,
    #[serde(rename = "barQ2")]
    bar_q2: MatrixText,
}

/// Two-slot helper scheme with transmitter 1 sending `2N - K` information
/// symbols and both transmitters sending `K` aligned noise symbols.
pub fn construct_wth_scheme(csi: LegitimateCsi<'_>, seed: u64, grid: RationalGrid) -> Result<LinearScheme> {
    construct_helper_scheme(csi, Transmitter::First, seed, grid)
}

/// Same construction with an arbitrary choice of message sender; the other
/// transmitter acts as the helper.
pub fn construct_helper_scheme(
    csi: LegitimateCsi<'_>,
    sender: Transmitter,
    seed: u64,
    grid: RationalGrid,
) -> Result<LinearScheme> {
    let dims = csi.dims();
    let (n, k) = (dims.n_antennas, dims.k_eve);
    if dims.n_slots != 2 {
        return Err(SdofError::InvalidRegime(format!(
            "the helper construction spans exactly 2 slots, got {}",
            dims.n_slots
        )));
    }
    if k > 2 * n {
        return Err(SdofError::InvalidRegime(format!("K = {k} exceeds 2N = {}", 2 * n)));
    }
    let dim = 2 * n;
    let mut rng = rng_from_seed(seed);
    let mut attempts = 0;
    let mut bump = || {
        attempts += 1;
        if attempts > RESAMPLE_LIMIT {
            Err(SdofError::ResampleLimitExceeded {
                what: "helper scheme precoders",
                limit: RESAMPLE_LIMIT,
            })
        } else {
            Ok(())
        }
    };

    let common_noise = loop {
        let q = grid.sample_matrix(dim, k, &mut rng);
        if q.rank() == k {
            break q;
        }
        bump()?;
    };
    let bar_q1 = csi.stacked_h_inverse(Transmitter::First)?.mul(&common_noise)?;
    let bar_q2 = csi.stacked_h_inverse(Transmitter::Second)?.mul(&common_noise)?;

    let sender_h = csi.stacked_h(sender);
    let info = loop {
        let p = grid.sample_matrix(dim, dim - k, &mut rng);
        let received = sender_h.mul(&p)?;
        if hconcat(&[&received, &common_noise])?.rank() == dim {
            break p;
        }
        bump()?;
    };

    let empty = RationalMatrix::zeros(dim, 0);
    let (bar_p1, bar_p2) = match sender {
        Transmitter::First => (info, empty),
        Transmitter::Second => (empty, info),
    };
    LinearScheme::new(dims, bar_p1, bar_p2, bar_q1, bar_q2)
}

/// Multiple-access time sharing: transmitter 1 sends over the first
/// realization with transmitter 2 as helper, then the roles swap over the
/// second realization. Concatenated, the pair is `(1/4 (2N-K), 1/4 (2N-K))`.
pub fn compose_mac_timeshare(
    first: LegitimateCsi<'_>,
    second: LegitimateCsi<'_>,
    seed: u64,
    grid: RationalGrid,
) -> Result<(LinearScheme, LinearScheme)> {
    if first.dims() != second.dims() {
        return Err(SdofError::mismatch(
            "time sharing",
            format!("{:?}", first.dims()),
            format!("{:?}", second.dims()),
        ));
    }
    let a = construct_helper_scheme(first, Transmitter::First, derive_seed(seed, 0), grid)?;
    let b = construct_helper_scheme(second, Transmitter::Second, derive_seed(seed, 1), grid)?;
    Ok((a, b))
}
