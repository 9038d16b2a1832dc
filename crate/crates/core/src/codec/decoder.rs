//! Exact maximum-likelihood decoding.
//!
//! For a fixed choice of one sign sequence per branch, every state is affine
//! in the source symbols and the squared-error objective is a separable
//! quadratic: `u_j` enters only the x-chain of branch `j` and the y-chain of
//! branch `j - 1`. Its unconstrained minimiser is closed form; clamping it into
//! the segment selected by branch `j`'s signs gives the constrained minimiser
//! for that hypothesis. The decoder scores every hypothesis and keeps the best.
//!
//! Segments are half-open: a state exactly at `x = 0` takes the `+` branch, and
//! the y-map jumps there. A winning estimate clamped onto an endpoint that its
//! own sign sequence excludes is moved by the smallest representable step into
//! the segment, so the returned estimate always has the returned signs.

use crate::chaos::{affine_params, iterate, sign_of_trajectory, AffineParams, AnalogValue, PlanePoint, SignSequence};
use crate::codec::{combine_systematic, prev, CodeParams, DecodeResult, ReceivedCodeword, MAX_SIGN_BITS};
use crate::{Error, Result};

/// Range of seeds `u` for which `|a[n-1] u + b[n-1]| <= 1`, intersected with
/// `[-1, 1]`.
pub fn support_interval(ap: &AffineParams) -> (f64, f64) {
    let last = ap.len() - 1;
    let (a, b) = (ap.a[last], ap.b[last]);
    let e1 = (1.0 - b) / a;
    let e2 = (-1.0 - b) / a;
    (e1.min(e2).max(-1.0), e1.max(e2).min(1.0))
}

fn check_signs(r: &ReceivedCodeword, signs: &[SignSequence]) -> Result<()> {
    if signs.len() != r.k() {
        return Err(Error::argument(format!(
            "{} sign sequences for {} branches",
            signs.len(),
            r.k()
        )));
    }
    if let Some(s) = signs.iter().find(|s| s.len() + 1 != r.n()) {
        return Err(Error::argument(format!(
            "sign sequence of length {} does not match n = {}",
            s.len(),
            r.n()
        )));
    }
    Ok(())
}

#[inline]
fn branch_residual(rx: &[f64], ry: &[f64], ap: &AffineParams, u_x: f64, u_y: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..rx.len() {
        let ex = rx[i] - ap.x_at(i, u_x);
        let ey = ry[i] - ap.y_at(i, u_y);
        acc += ex * ex + ey * ey;
    }
    acc
}

/// Residual sum of squares of the affine model for `signs` at source `u`.
///
/// `u` is not range-checked so that it can be probed by finite differences.
pub fn objective(r: &ReceivedCodeword, u: &[f64], signs: &[SignSequence]) -> Result<f64> {
    check_signs(r, signs)?;
    let k = r.k();
    if u.len() != k {
        return Err(Error::argument(format!("{} source values for k = {k}", u.len())));
    }
    Ok((0..k)
        .map(|j| {
            let ap = affine_params(&signs[j]);
            branch_residual(&r.rx()[j], &r.ry()[j], &ap, u[j], u[(j + 1) % k])
        })
        .sum())
}

#[derive(Clone, Copy, Debug, Default)]
struct ChainSums {
    num: f64,
    den: f64,
}

fn x_sums(rx: &[f64], ap: &AffineParams) -> ChainSums {
    let mut s = ChainSums::default();
    for (i, &r) in rx.iter().enumerate() {
        s.num += r * ap.a[i] - ap.a[i] * ap.b[i];
        s.den += ap.a[i] * ap.a[i];
    }
    s
}

fn y_sums(ry: &[f64], ap: &AffineParams) -> ChainSums {
    let mut s = ChainSums::default();
    for (i, &r) in ry.iter().enumerate() {
        s.num += r * ap.c[i] - ap.c[i] * ap.d[i];
        s.den += ap.c[i] * ap.c[i];
    }
    s
}

#[inline]
fn ratio(x: ChainSums, y: ChainSums) -> f64 {
    (x.num + y.num) / (x.den + y.den)
}

/// Unconstrained minimisers `u*_j` of [`objective`] for fixed `signs`.
pub fn closed_form_estimates(r: &ReceivedCodeword, signs: &[SignSequence]) -> Result<Vec<f64>> {
    check_signs(r, signs)?;
    let k = r.k();
    let params: Vec<_> = signs.iter().map(affine_params).collect();
    Ok((0..k)
        .map(|j| {
            let p = prev(j, k);
            ratio(x_sums(&r.rx()[j], &params[j]), y_sums(&r.ry()[p], &params[p]))
        })
        .collect())
}

/// Constrained minimisers for fixed `signs`: each `u*_j` clamped into the
/// support interval of branch `j`'s sign sequence.
pub fn constrained_estimates(r: &ReceivedCodeword, signs: &[SignSequence]) -> Result<Vec<f64>> {
    let star = closed_form_estimates(r, signs)?;
    Ok(star
        .into_iter()
        .zip(signs)
        .map(|(u, s)| {
            let (lo, hi) = support_interval(&affine_params(s));
            u.clamp(lo, hi)
        })
        .collect())
}

/// Decoder with the per-segment coefficient tables precomputed for one code.
#[derive(Clone, Debug)]
pub struct MlDecoder {
    params: CodeParams,
    /// Indexed by sign-sequence number (lexicographic order).
    segments: Vec<Segment>,
}

#[derive(Clone, Debug)]
struct Segment {
    signs: SignSequence,
    affine: AffineParams,
    support: (f64, f64),
}

impl MlDecoder {
    pub fn new(params: CodeParams) -> Result<Self> {
        if params.sign_bits() > MAX_SIGN_BITS {
            return Err(Error::argument(format!(
                "k(n-1) = {} exceeds the exhaustive-search limit of {MAX_SIGN_BITS}",
                params.sign_bits()
            )));
        }
        let segments = SignSequence::all(params.n() - 1)
            .map(|signs| {
                let affine = affine_params(&signs);
                let support = support_interval(&affine);
                Segment {
                    signs,
                    affine,
                    support,
                }
            })
            .collect();
        Ok(MlDecoder { params, segments })
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn decode(&self, r: &ReceivedCodeword) -> Result<DecodeResult> {
        let r = combine_systematic(r, &self.params)?;
        let k = self.params.k();
        let per_branch = self.params.n() - 1;
        let mask = (1usize << per_branch) - 1;

        let xs: Vec<Vec<ChainSums>> = (0..k)
            .map(|j| self.segments.iter().map(|s| x_sums(&r.rx()[j], &s.affine)).collect())
            .collect();
        let ys: Vec<Vec<ChainSums>> = (0..k)
            .map(|j| self.segments.iter().map(|s| y_sums(&r.ry()[j], &s.affine)).collect())
            .collect();

        let mut seg = vec![0usize; k];
        let mut u = vec![0.0; k];
        let mut best_u = vec![0.0; k];
        let mut best_seg = vec![0usize; k];
        let mut best = f64::INFINITY;

        // Combination index order equals lexicographic order of the
        // concatenated sign vectors, branch 0 most significant; only a strict
        // improvement replaces the incumbent.
        for combo in 0..1usize << self.params.sign_bits() {
            for (j, s) in seg.iter_mut().enumerate() {
                *s = (combo >> ((k - 1 - j) * per_branch)) & mask;
            }
            for j in 0..k {
                let p = prev(j, k);
                let star = ratio(xs[j][seg[j]], ys[p][seg[p]]);
                let (lo, hi) = self.segments[seg[j]].support;
                u[j] = star.clamp(lo, hi);
            }
            let mut total = 0.0;
            for j in 0..k {
                total += branch_residual(
                    &r.rx()[j],
                    &r.ry()[j],
                    &self.segments[seg[j]].affine,
                    u[j],
                    u[(j + 1) % k],
                );
                if total >= best {
                    break;
                }
            }
            if total < best {
                best = total;
                best_u.copy_from_slice(&u);
                best_seg.copy_from_slice(&seg);
            }
        }

        for (v, &s) in best_u.iter_mut().zip(&best_seg) {
            *v = settle(*v, &self.segments[s]);
        }
        let best = (0..k)
            .map(|j| {
                branch_residual(
                    &r.rx()[j],
                    &r.ry()[j],
                    &self.segments[best_seg[j]].affine,
                    best_u[j],
                    best_u[(j + 1) % k],
                )
            })
            .sum();

        Ok(DecodeResult {
            estimates: best_u
                .iter()
                .map(|&v| AnalogValue::new(v))
                .collect::<Result<_>>()?,
            best_signs: best_seg.iter().map(|&s| self.segments[s].signs.clone()).collect(),
            objective: best,
        })
    }
}

/// Steps `u` towards the middle of `seg` until its trajectory follows
/// `seg.signs`.
fn settle(u: f64, seg: &Segment) -> f64 {
    let len = seg.signs.len();
    let (lo, hi) = seg.support;
    let mid = 0.5 * (lo + hi);
    let mut v = u;
    for _ in 0..64 {
        let on_segment = PlanePoint::new(v, 0.0)
            .and_then(|p| iterate(p, len + 1))
            .is_ok_and(|t| sign_of_trajectory(&t) == seg.signs);
        if on_segment {
            return v;
        }
        v = if v < mid { v.next_up() } else { v.next_down() };
    }
    u
}

/// One-shot maximum-likelihood decode; prefer [`MlDecoder`] for many blocks.
pub fn ml_decode(r: &ReceivedCodeword, params: &CodeParams) -> Result<DecodeResult> {
    MlDecoder::new(*params)?.decode(r)
}
