//! Channel realizations for the two-transmitter wiretap models.
//!
//! Both transmitters and the legitimate receiver carry `N` antennas and the
//! eavesdropper carries `K`. Per slot, `h_i(t)` is the `N x N` link from
//! transmitter `i` to the legitimate receiver and `g_i(t)` the `K x N` link to
//! the eavesdropper. Stacking `n` slots gives block-diagonal matrices.
//!
//! Transmitters only know the legitimate links. Code that builds precoders
//! takes a [`LegitimateCsi`] view, which has no access to `g1`/`g2`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::codec::{matrix_from_text, matrix_to_text, MatrixText};
use crate::error::{Result, SdofError};
use crate::matcore::{block_diag, RationalMatrix};
use crate::sampling::{rng_from_seed, RationalGrid};

/// Upper bound on rejected draws while sampling one realization.
pub const RESAMPLE_LIMIT: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SystemDims {
    /// `N`: antennas at each transmitter and at the legitimate receiver.
    pub n_antennas: usize,
    /// `K`: eavesdropper antennas.
    pub k_eve: usize,
    /// `n`: channel uses stacked together.
    pub n_slots: usize,
}

impl SystemDims {
    pub fn new(n_antennas: usize, k_eve: usize, n_slots: usize) -> Result<Self> {
        let dims = Self {
            n_antennas,
            k_eve,
            n_slots,
        };
        dims.validate()?;
        Ok(dims)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_antennas == 0 {
            return Err(SdofError::InvalidRegime("N must be at least 1".into()));
        }
        if self.n_slots == 0 {
            return Err(SdofError::InvalidRegime("n_slots must be at least 1".into()));
        }
        Ok(())
    }

    /// `N n`, the stacked dimension of a transmit or legitimate-receive vector.
    pub fn stacked_n(&self) -> usize {
        self.n_antennas * self.n_slots
    }

    /// `K n`, the stacked eavesdropper dimension.
    pub fn stacked_k(&self) -> usize {
        self.k_eve * self.n_slots
    }
}

/// The two transmitters. In the helper model, `First` is the message sender.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Transmitter {
    First,
    Second,
}

impl Transmitter {
    pub fn other(self) -> Self {
        match self {
            Transmitter::First => Transmitter::Second,
            Transmitter::Second => Transmitter::First,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChannelRealization {
    dims: SystemDims,
    h1: Vec<RationalMatrix>,
    h2: Vec<RationalMatrix>,
    g1: Vec<RationalMatrix>,
    g2: Vec<RationalMatrix>,
}

impl ChannelRealization {
    /// Checks list lengths, per-slot shapes, and invertibility of every `h_i(t)`.
    pub fn new(
        dims: SystemDims,
        h1: Vec<RationalMatrix>,
        h2: Vec<RationalMatrix>,
        g1: Vec<RationalMatrix>,
        g2: Vec<RationalMatrix>,
    ) -> Result<Self> {
        dims.validate()?;
        let n = dims.n_antennas;
        for (name, list, rows) in [("h1", &h1, n), ("h2", &h2, n), ("g1", &g1, dims.k_eve), ("g2", &g2, dims.k_eve)] {
            if list.len() != dims.n_slots {
                return Err(SdofError::mismatch(
                    "channel realization",
                    format!("{} slots in {name}", dims.n_slots),
                    list.len(),
                ));
            }
            if let Some(bad) = list.iter().find(|m| m.shape() != (rows, n)) {
                return Err(SdofError::mismatch(
                    "channel realization",
                    format!("{rows}x{n} blocks in {name}"),
                    format!("{}x{}", bad.rows(), bad.cols()),
                ));
            }
        }
        for (name, list) in [("h1", &h1), ("h2", &h2)] {
            if let Some(t) = list.iter().position(|m| m.rank() < n) {
                return Err(SdofError::InvalidRegime(format!("{name}[{t}] is not invertible")));
            }
        }
        Ok(Self { dims, h1, h2, g1, g2 })
    }

    pub fn dims(&self) -> SystemDims {
        self.dims
    }

    pub fn h(&self, tx: Transmitter) -> &[RationalMatrix] {
        match tx {
            Transmitter::First => &self.h1,
            Transmitter::Second => &self.h2,
        }
    }

    pub fn g(&self, tx: Transmitter) -> &[RationalMatrix] {
        match tx {
            Transmitter::First => &self.g1,
            Transmitter::Second => &self.g2,
        }
    }

    /// The part of the realization known at the transmitters.
    pub fn legitimate(&self) -> LegitimateCsi<'_> {
        LegitimateCsi {
            dims: self.dims,
            h1: &self.h1,
            h2: &self.h2,
        }
    }

    /// Same legitimate links, different eavesdropper links.
    pub fn with_eavesdropper(&self, g1: Vec<RationalMatrix>, g2: Vec<RationalMatrix>) -> Result<Self> {
        Self::new(self.dims, self.h1.clone(), self.h2.clone(), g1, g2)
    }

    /// Appends the slots of `later` after the slots of `self`.
    pub fn concat(&self, later: &ChannelRealization) -> Result<Self> {
        if (self.dims.n_antennas, self.dims.k_eve) != (later.dims.n_antennas, later.dims.k_eve) {
            return Err(SdofError::mismatch(
                "realization concatenation",
                format!("N={}, K={}", self.dims.n_antennas, self.dims.k_eve),
                format!("N={}, K={}", later.dims.n_antennas, later.dims.k_eve),
            ));
        }
        let join = |a: &[RationalMatrix], b: &[RationalMatrix]| a.iter().chain(b).cloned().collect::<Vec<_>>();
        Ok(Self {
            dims: SystemDims {
                n_slots: self.dims.n_slots + later.dims.n_slots,
                ..self.dims
            },
            h1: join(&self.h1, &later.h1),
            h2: join(&self.h2, &later.h2),
            g1: join(&self.g1, &later.g1),
            g2: join(&self.g2, &later.g2),
        })
    }

    pub fn to_json(&self) -> String {
        let text = |list: &[RationalMatrix]| list.iter().map(matrix_to_text).collect::<Vec<_>>();
        let file = RealizationFile {
            dims: self.dims,
            h1: text(&self.h1),
            h2: text(&self.h2),
            g1: text(&self.g1),
            g2: text(&self.g2),
        };
        serde_json::to_string_pretty(&file).expect("realization serializes") + "\n"
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: RealizationFile =
            serde_json::from_str(s).map_err(|e| SdofError::malformed(json_error_field(&e), e.to_string()))?;
        let dims = file.dims;
        dims.validate()
            .map_err(|e| SdofError::malformed("dims", e.to_string()))?;
        let parse = |name: &str, list: &[MatrixText], rows: usize| -> Result<Vec<RationalMatrix>> {
            if list.len() != dims.n_slots {
                return Err(SdofError::malformed(
                    name,
                    format!("expected {} slots, found {}", dims.n_slots, list.len()),
                ));
            }
            list.iter()
                .enumerate()
                .map(|(t, m)| matrix_from_text(m, rows, dims.n_antennas, &format!("{name}[{t}]")))
                .collect()
        };
        let n = dims.n_antennas;
        let k = dims.k_eve;
        let h1 = parse("h1", &file.h1, n)?;
        let h2 = parse("h2", &file.h2, n)?;
        let g1 = parse("g1", &file.g1, k)?;
        let g2 = parse("g2", &file.g2, k)?;
        Self::new(dims, h1, h2, g1, g2).map_err(|e| SdofError::malformed("h", e.to_string()))
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
struct RealizationFile {
    dims: SystemDims,
    h1: Vec<MatrixText>,
    h2: Vec<MatrixText>,
    g1: Vec<MatrixText>,
    g2: Vec<MatrixText>,
}

pub(crate) fn json_error_field(e: &serde_json::Error) -> String {
    // serde_json reports missing/unknown fields in the message itself.
    let msg = e.to_string();
    msg.split('`').nth(1).map_or_else(|| "<root>".to_string(), str::to_string)
}

/// Legitimate-link channel state, the only CSI available to transmitters.
#[derive(Clone, Copy, Debug)]
pub struct LegitimateCsi<'a> {
    dims: SystemDims,
    h1: &'a [RationalMatrix],
    h2: &'a [RationalMatrix],
}

impl<'a> LegitimateCsi<'a> {
    pub fn dims(&self) -> SystemDims {
        self.dims
    }

    pub fn h(&self, tx: Transmitter) -> &'a [RationalMatrix] {
        match tx {
            Transmitter::First => self.h1,
            Transmitter::Second => self.h2,
        }
    }

    pub fn stacked_h(&self, tx: Transmitter) -> RationalMatrix {
        block_diag(self.h(tx))
    }

    /// `barH^{-1}`, assembled from the per-slot inverses.
    pub fn stacked_h_inverse(&self, tx: Transmitter) -> Result<RationalMatrix> {
        let blocks = self.h(tx).iter().map(RationalMatrix::inverse).collect::<Result<Vec<_>>>()?;
        Ok(block_diag(&blocks))
    }
}

/// Block-diagonal stacked channels over all slots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StackedChannel {
    dims: SystemDims,
    bar_h1: RationalMatrix,
    bar_h2: RationalMatrix,
    bar_g1: RationalMatrix,
    bar_g2: RationalMatrix,
}

impl StackedChannel {
    pub fn dims(&self) -> SystemDims {
        self.dims
    }

    pub fn bar_h(&self, tx: Transmitter) -> &RationalMatrix {
        match tx {
            Transmitter::First => &self.bar_h1,
            Transmitter::Second => &self.bar_h2,
        }
    }

    pub fn bar_g(&self, tx: Transmitter) -> &RationalMatrix {
        match tx {
            Transmitter::First => &self.bar_g1,
            Transmitter::Second => &self.bar_g2,
        }
    }
}

pub fn stack(r: &ChannelRealization) -> StackedChannel {
    StackedChannel {
        dims: r.dims,
        bar_h1: block_diag(&r.h1),
        bar_h2: block_diag(&r.h2),
        bar_g1: block_diag(&r.g1),
        bar_g2: block_diag(&r.g2),
    }
}

/// Draws a realization with i.i.d. grid entries. Any `h_i(t)` that is not
/// invertible, or `g_i(t)` without rank `min(K, N)`, is redrawn.
pub fn sample_realization(dims: SystemDims, seed: u64, grid: RationalGrid) -> Result<ChannelRealization> {
    dims.validate()?;
    let mut rng = rng_from_seed(seed);
    let mut rejections = 0;
    let n = dims.n_antennas;
    let mut draw = |rows: usize| -> Result<RationalMatrix> {
        let full = rows.min(n);
        loop {
            let m = grid.sample_matrix(rows, n, &mut rng);
            if m.rank() == full {
                return Ok(m);
            }
            rejections += 1;
            if rejections > RESAMPLE_LIMIT {
                return Err(SdofError::ResampleLimitExceeded {
                    what: "channel realization",
                    limit: RESAMPLE_LIMIT,
                });
            }
        }
    };
    let mut per_slot = |rows: usize| (0..dims.n_slots).map(|_| draw(rows)).collect::<Result<Vec<_>>>();
    let h1 = per_slot(n)?;
    let h2 = per_slot(n)?;
    let g1 = per_slot(dims.k_eve)?;
    let g2 = per_slot(dims.k_eve)?;
    Ok(ChannelRealization { dims, h1, h2, g1, g2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn dims(n: usize, k: usize, slots: usize) -> SystemDims {
        SystemDims::new(n, k, slots).unwrap()
    }

    #[test]
    fn scalar_realization_shape() {
        let r = sample_realization(dims(1, 1, 2), 7, RationalGrid::default()).unwrap();
        for tx in [Transmitter::First, Transmitter::Second] {
            assert_eq!(r.h(tx).len(), 2);
            assert_eq!(r.g(tx).len(), 2);
            for m in r.h(tx).iter().chain(r.g(tx)) {
                assert_eq!(m.shape(), (1, 1));
                assert!(!m.get(0, 0).is_zero());
            }
        }
    }

    #[test]
    fn mimo_realization_shape_and_invertibility() {
        let r = sample_realization(dims(2, 1, 2), 3, RationalGrid::default()).unwrap();
        for tx in [Transmitter::First, Transmitter::Second] {
            assert!(r.h(tx).iter().all(|m| m.shape() == (2, 2) && m.rank() == 2));
            assert!(r.g(tx).iter().all(|m| m.shape() == (1, 2)));
        }
        assert!(r.h1.iter().chain(&r.g2).all(|m| m.entries().iter().all(|x| !x.is_zero())));
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let d = dims(3, 2, 2);
        let grid = RationalGrid::default();
        assert_eq!(sample_realization(d, 11, grid).unwrap(), sample_realization(d, 11, grid).unwrap());
        assert_ne!(sample_realization(d, 11, grid).unwrap(), sample_realization(d, 12, grid).unwrap());
    }

    #[test]
    fn zero_eavesdropper_antennas_give_empty_blocks() {
        let r = sample_realization(dims(2, 0, 2), 1, RationalGrid::default()).unwrap();
        let c = stack(&r);
        assert_eq!(c.bar_g(Transmitter::First).shape(), (0, 4));
    }

    #[test]
    fn single_slot_stack_is_the_slot_matrix() {
        let r = sample_realization(dims(3, 2, 1), 5, RationalGrid::default()).unwrap();
        let c = stack(&r);
        assert_eq!(c.bar_h(Transmitter::First), &r.h1[0]);
        assert_eq!(c.bar_g(Transmitter::Second), &r.g2[0]);
    }

    #[test]
    fn stacked_eavesdropper_blocks_are_block_diagonal() {
        let r = sample_realization(dims(2, 1, 2), 9, RationalGrid::default()).unwrap();
        let c = stack(&r);
        let g = c.bar_g(Transmitter::First);
        assert_eq!(g.shape(), (2, 4));
        assert!(g.get(0, 2).is_zero() && g.get(0, 3).is_zero());
        assert!(g.get(1, 0).is_zero() && g.get(1, 1).is_zero());
        assert_eq!(g.get(0, 0), r.g1[0].get(0, 0));
        assert_eq!(g.get(1, 3), r.g1[1].get(0, 1));
    }

    #[test]
    fn stacked_ranks_on_many_samples() {
        let grid = RationalGrid::default();
        for seed in 0..100 {
            let d = dims(1 + (seed as usize % 3), seed as usize % 3, 2);
            let r = sample_realization(d, seed, grid).unwrap();
            let c = stack(&r);
            for tx in [Transmitter::First, Transmitter::Second] {
                assert_eq!(c.bar_h(tx).rank(), d.stacked_n());
                assert_eq!(c.bar_g(tx).rank(), d.stacked_k().min(d.stacked_n()));
            }
        }
    }

    #[test]
    fn stacked_inverse_is_exact() {
        let r = sample_realization(dims(3, 1, 2), 21, RationalGrid::default()).unwrap();
        let csi = r.legitimate();
        for tx in [Transmitter::First, Transmitter::Second] {
            let prod = csi.stacked_h(tx).mul(&csi.stacked_h_inverse(tx).unwrap()).unwrap();
            assert_eq!(prod, RationalMatrix::identity(6));
        }
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let r = sample_realization(dims(2, 3, 2), 4, RationalGrid::default()).unwrap();
        let text = r.to_json();
        let back = ChannelRealization::from_json(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn json_rejects_wrong_slot_shape() {
        let r = sample_realization(dims(2, 1, 2), 4, RationalGrid::default()).unwrap();
        let mut v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        v["g2"][1] = serde_json::json!([["1", "2", "3"]]);
        let err = ChannelRealization::from_json(&v.to_string()).unwrap_err();
        assert!(err.to_string().contains("g2[1][0]"), "{err}");
    }

    #[test]
    fn json_rejects_singular_legitimate_link() {
        let text = r#"{"dims":{"n_antennas":1,"k_eve":0,"n_slots":1},"h1":[[["0"]]],"h2":[[["1"]]],"g1":[[]],"g2":[[]]}"#;
        let err = ChannelRealization::from_json(text).unwrap_err();
        assert!(matches!(err, SdofError::MalformedFile { .. }), "{err}");
    }

    #[test]
    fn concat_appends_slots() {
        let grid = RationalGrid::default();
        let a = sample_realization(dims(2, 1, 2), 1, grid).unwrap();
        let b = sample_realization(dims(2, 1, 2), 2, grid).unwrap();
        let ab = a.concat(&b).unwrap();
        assert_eq!(ab.dims().n_slots, 4);
        assert_eq!(ab.h(Transmitter::Second)[2], b.h2[0]);
        let c = sample_realization(dims(2, 2, 2), 2, grid).unwrap();
        assert!(a.concat(&c).is_err());
    }
}
