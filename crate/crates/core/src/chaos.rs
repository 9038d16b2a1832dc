//! The folded baker's map on `[-1, 1]²` and the affine view of its iterates.
//!
//! Within one segment of the piecewise-linear map, the `i`-th state is an
//! affine function of the seed:
//!
//! ```text
//! x[i] = a[i] * x[0] + b[i]
//! y[i] = c[i] * y[0] + d[i]
//! ```
//!
//! The segment is labelled by the signs of `x[0..n-1]`, which is what the
//! decoder enumerates. All map coefficients are `±2`, `±1/2` and `±1`, so
//! dyadic-rational inputs are propagated exactly in `f64`.

use std::fmt;

use crate::{Error, Result};

/// A real symbol constrained to `[-1, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct AnalogValue(f64);

impl AnalogValue {
    pub const MIN: f64 = -1.0;
    pub const MAX: f64 = 1.0;

    pub fn new(value: f64) -> Result<Self> {
        if (Self::MIN..=Self::MAX).contains(&value) {
            Ok(AnalogValue(value))
        } else {
            Err(Error::Domain {
                what: "analog value",
                value,
                lo: Self::MIN,
                hi: Self::MAX,
            })
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl From<AnalogValue> for f64 {
    fn from(v: AnalogValue) -> f64 {
        v.0
    }
}

impl TryFrom<f64> for AnalogValue {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        AnalogValue::new(value)
    }
}

/// One state `(x, y)` of the map, both coordinates in `[-1, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanePoint {
    x: f64,
    y: f64,
}

impl PlanePoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        AnalogValue::new(x)?;
        AnalogValue::new(y)?;
        Ok(PlanePoint { x, y })
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.x
    }

    #[inline]
    pub fn y(&self) -> f64 {
        self.y
    }
}

/// Segment label of one x-state. `Neg < Pos`, which fixes the decoder's
/// tie-breaking order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Neg,
    Pos,
}

impl Sign {
    /// Sign of `x`, with zero mapped to `Pos` to agree with the branch choice
    /// of [`baker_forward`].
    #[inline]
    pub fn of(x: f64) -> Sign {
        if x < 0.0 {
            Sign::Neg
        } else {
            Sign::Pos
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        match self {
            Sign::Neg => -1.0,
            Sign::Pos => 1.0,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Neg => "-",
            Sign::Pos => "+",
        })
    }
}

/// Signs of `x[0..=n-2]` of one branch trajectory (length `n - 1`).
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignSequence(Vec<Sign>);

impl SignSequence {
    pub fn new(signs: Vec<Sign>) -> Self {
        SignSequence(signs)
    }

    /// Builds a sequence from `±1` values; anything else is rejected.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        values
            .iter()
            .map(|&v| match v {
                1.0 => Ok(Sign::Pos),
                -1.0 => Ok(Sign::Neg),
                v => Err(Error::argument(format!("sign must be -1 or +1, got {v}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(SignSequence)
    }

    /// The `index`-th sequence of length `len` in lexicographic order
    /// (`Neg < Pos`, first element most significant).
    pub fn from_index(index: u64, len: usize) -> Self {
        debug_assert!(len < 64);
        let signs = (0..len)
            .map(|i| {
                if (index >> (len - 1 - i)) & 1 == 1 {
                    Sign::Pos
                } else {
                    Sign::Neg
                }
            })
            .collect();
        SignSequence(signs)
    }

    /// Every sign sequence of length `len`, in lexicographic order.
    pub fn all(len: usize) -> impl Iterator<Item = SignSequence> {
        (0..1u64 << len).map(move |i| SignSequence::from_index(i, len))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn signs(&self) -> &[Sign] {
        &self.0
    }
}

impl fmt::Display for SignSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Coefficients relating state `i` to the seed within one segment.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineParams {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub d: Vec<f64>,
}

impl AffineParams {
    /// Number of states covered (`n`).
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    #[inline]
    pub fn x_at(&self, i: usize, x0: f64) -> f64 {
        self.a[i] * x0 + self.b[i]
    }

    #[inline]
    pub fn y_at(&self, i: usize, y0: f64) -> f64 {
        self.c[i] * y0 + self.d[i]
    }
}

/// The `n` states generated from one seed; `states[0]` is the seed.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchTrajectory {
    states: Vec<PlanePoint>,
}

impl BranchTrajectory {
    pub fn states(&self) -> &[PlanePoint] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn seed(&self) -> PlanePoint {
        self.states[0]
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        self.states.iter().map(PlanePoint::x)
    }

    pub fn ys(&self) -> impl Iterator<Item = f64> + '_ {
        self.states.iter().map(PlanePoint::y)
    }
}

#[inline]
fn forward_unchecked(x: f64, y: f64) -> (f64, f64) {
    if x < 0.0 {
        (2.0 * x + 1.0, (y - 1.0) / 2.0)
    } else {
        (1.0 - 2.0 * x, (1.0 - y) / 2.0)
    }
}

/// One step of the folded baker's map.
pub fn baker_forward(p: PlanePoint) -> PlanePoint {
    let (x, y) = forward_unchecked(p.x, p.y);
    PlanePoint { x, y }
}

/// Inverse step, given the sign of the previous x-state.
pub fn baker_inverse(p: PlanePoint, s: Sign) -> PlanePoint {
    let s = s.value();
    PlanePoint {
        x: -0.5 * s * (p.x - 1.0),
        y: -2.0 * s * p.y + 1.0,
    }
}

/// `n` states starting at `seed`.
pub fn iterate(seed: PlanePoint, n: usize) -> Result<BranchTrajectory> {
    if n == 0 {
        return Err(Error::argument("trajectory length must be at least 1"));
    }
    let mut states = Vec::with_capacity(n);
    states.push(seed);
    for i in 1..n {
        let prev = states[i - 1];
        states.push(baker_forward(prev));
    }
    Ok(BranchTrajectory { states })
}

/// Signs of the x-states at indices `0..n-1`. The final state's sign does not
/// select any segment and is omitted.
pub fn sign_of_trajectory(t: &BranchTrajectory) -> SignSequence {
    let n = t.len();
    SignSequence(
        t.states[..n.saturating_sub(1)]
            .iter()
            .map(|p| Sign::of(p.x))
            .collect(),
    )
}

/// Segment coefficients for a sign sequence of length `n - 1`.
pub fn affine_params(s: &SignSequence) -> AffineParams {
    let n = s.len() + 1;
    let mut ap = AffineParams {
        a: Vec::with_capacity(n),
        b: Vec::with_capacity(n),
        c: Vec::with_capacity(n),
        d: Vec::with_capacity(n),
    };
    ap.a.push(1.0);
    ap.b.push(0.0);
    ap.c.push(1.0);
    ap.d.push(0.0);
    for (i, sign) in s.signs().iter().enumerate() {
        let s = sign.value();
        ap.a.push(-2.0 * s * ap.a[i]);
        ap.b.push(1.0 - 2.0 * s * ap.b[i]);
        ap.c.push(-0.5 * s * ap.c[i]);
        ap.d.push(0.5 * s * (1.0 - ap.d[i]));
    }
    ap
}
