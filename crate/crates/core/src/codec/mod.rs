//! The `(2kn, k)` tail-biting baker's map code.
//!
//! Branch `j` is seeded with `(u_j, u_{j+1})`, indices cyclic, so every source
//! symbol appears as the x-seed of one branch and the y-seed of the previous
//! one. Each branch emits `n` states, i.e. `2n` real symbols.

mod decoder;
mod oracle;

pub use decoder::{closed_form_estimates, constrained_estimates, ml_decode, objective, support_interval, MlDecoder};
pub use oracle::{grid_oracle_decode, grid_oracle_decode_exhaustive, grid_points};

use crate::chaos::{iterate, AnalogValue, BranchTrajectory, PlanePoint, SignSequence};
use crate::{Error, Result};

/// Exhaustive decoding enumerates `2^(k(n-1))` sign combinations; larger
/// codes are refused.
pub const MAX_SIGN_BITS: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CodeParams {
    k: usize,
    n: usize,
    systematic_duplicated: bool,
}

impl CodeParams {
    /// `k` branches of `n` states each, both systematic copies transmitted.
    pub fn new(k: usize, n: usize) -> Result<Self> {
        Self::with_layout(k, n, true)
    }

    /// Only the duplicated-systematic layout is implemented; passing `false`
    /// is an error.
    pub fn with_layout(k: usize, n: usize, systematic_duplicated: bool) -> Result<Self> {
        if k < 2 {
            return Err(Error::argument(format!("need at least 2 branches, got k = {k}")));
        }
        if n < 2 {
            return Err(Error::argument(format!("need at least 2 states per branch, got n = {n}")));
        }
        if !systematic_duplicated {
            return Err(Error::argument(
                "the non-duplicated (2kn - k) layout is not supported",
            ));
        }
        Ok(CodeParams {
            k,
            n,
            systematic_duplicated,
        })
    }

    /// The default (12, 3) code: three branches, two states each.
    pub fn triple_branch(n: usize) -> Result<Self> {
        Self::new(3, n)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn systematic_duplicated(&self) -> bool {
        self.systematic_duplicated
    }

    /// Real symbols per codeword.
    pub fn codeword_len(&self) -> usize {
        2 * self.k * self.n
    }

    /// Real channel symbols per source symbol (`2n`).
    pub fn symbols_per_source(&self) -> usize {
        2 * self.n
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.codeword_len() as f64
    }

    pub(crate) fn sign_bits(&self) -> usize {
        self.k * (self.n - 1)
    }
}

/// `k` source symbols forming one code block.
#[derive(Clone, Debug, PartialEq)]
pub struct SourceBlock(Vec<AnalogValue>);

impl SourceBlock {
    pub fn new(values: Vec<AnalogValue>) -> Self {
        SourceBlock(values)
    }

    pub fn from_f64(values: &[f64]) -> Result<Self> {
        values
            .iter()
            .map(|&v| AnalogValue::new(v))
            .collect::<Result<Vec<_>>>()
            .map(SourceBlock)
    }

    pub fn values(&self) -> &[AnalogValue] {
        &self.0
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|v| v.get()).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Codeword {
    branches: Vec<BranchTrajectory>,
}

impl Codeword {
    pub fn branches(&self) -> &[BranchTrajectory] {
        &self.branches
    }

    pub fn k(&self) -> usize {
        self.branches.len()
    }

    pub fn n(&self) -> usize {
        self.branches.first().map_or(0, BranchTrajectory::len)
    }

    pub fn symbol_count(&self) -> usize {
        2 * self.k() * self.n()
    }
}

/// Noisy per-branch observations `rx[j][i]`, `ry[j][i]`. Values are unbounded.
#[derive(Clone, Debug, PartialEq)]
pub struct ReceivedCodeword {
    rx: Vec<Vec<f64>>,
    ry: Vec<Vec<f64>>,
}

impl ReceivedCodeword {
    pub fn new(rx: Vec<Vec<f64>>, ry: Vec<Vec<f64>>) -> Result<Self> {
        let k = rx.len();
        if k == 0 || ry.len() != k {
            return Err(Error::argument(format!(
                "need matching non-empty branch lists, got {} x-chains and {} y-chains",
                k,
                ry.len()
            )));
        }
        let n = rx[0].len();
        if n == 0 || rx.iter().chain(&ry).any(|c| c.len() != n) {
            return Err(Error::argument("all chains must share the same non-zero length"));
        }
        Ok(ReceivedCodeword { rx, ry })
    }

    /// The noiseless observation of `cw`.
    pub fn from_codeword(cw: &Codeword) -> Self {
        ReceivedCodeword {
            rx: cw.branches.iter().map(|b| b.xs().collect()).collect(),
            ry: cw.branches.iter().map(|b| b.ys().collect()).collect(),
        }
    }

    pub fn k(&self) -> usize {
        self.rx.len()
    }

    pub fn n(&self) -> usize {
        self.rx[0].len()
    }

    pub fn rx(&self) -> &[Vec<f64>] {
        &self.rx
    }

    pub fn ry(&self) -> &[Vec<f64>] {
        &self.ry
    }

    pub fn rx_mut(&mut self) -> &mut [Vec<f64>] {
        &mut self.rx
    }

    pub fn ry_mut(&mut self) -> &mut [Vec<f64>] {
        &mut self.ry
    }

    /// Every observation, x-chains first.
    pub fn observations_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.rx.iter_mut().chain(self.ry.iter_mut()).flatten()
    }

    pub(crate) fn check(&self, params: &CodeParams) -> Result<()> {
        if self.k() != params.k() || self.n() != params.n() {
            return Err(Error::argument(format!(
                "received codeword is {}x{}, code expects k = {}, n = {}",
                self.k(),
                self.n(),
                params.k(),
                params.n()
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeResult {
    pub estimates: Vec<AnalogValue>,
    pub best_signs: Vec<SignSequence>,
    /// Residual sum of squares of the returned estimate against the
    /// (combined) observation.
    pub objective: f64,
}

impl DecodeResult {
    pub fn estimates_f64(&self) -> Vec<f64> {
        self.estimates.iter().map(|v| v.get()).collect()
    }
}

#[inline]
pub(crate) fn next(j: usize, k: usize) -> usize {
    (j + 1) % k
}

#[inline]
pub(crate) fn prev(j: usize, k: usize) -> usize {
    (j + k - 1) % k
}

/// Runs the `k` tail-biting branches for one source block.
pub fn encode(block: &SourceBlock, params: &CodeParams) -> Result<Codeword> {
    let k = params.k();
    if block.len() != k {
        return Err(Error::argument(format!(
            "source block has {} symbols, code expects {k}",
            block.len()
        )));
    }
    let u = block.values();
    let branches = (0..k)
        .map(|j| {
            let seed = PlanePoint::new(u[j].get(), u[next(j, k)].get())?;
            iterate(seed, params.n())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Codeword { branches })
}

/// Equal-gain combining of the two received copies of each source symbol:
/// `rx[j][0]` and `ry[j-1][0]` are both replaced by their mean.
pub fn combine_systematic(r: &ReceivedCodeword, params: &CodeParams) -> Result<ReceivedCodeword> {
    r.check(params)?;
    let k = r.k();
    let mut out = r.clone();
    for j in 0..k {
        let p = prev(j, k);
        let mean = 0.5 * (r.rx[j][0] + r.ry[p][0]);
        out.rx[j][0] = mean;
        out.ry[p][0] = mean;
    }
    Ok(out)
}
