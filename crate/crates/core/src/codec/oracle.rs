//! Brute-force grid search used as an independent check on the ML decoder.
//!
//! Candidates are scored by running the forward map and summing squared
//! distances to the observation; no affine coefficients, closed forms or
//! support intervals are involved.
//!
//! The literal search over `G^k` grid points is only practical for coarse
//! grids. [`grid_oracle_decode`] returns the same minimum over the same grid
//! using the ring structure of the code: the cost splits into per-branch terms
//! `X_j(u_j) + Y_j(u_j, u_{j+1})`, and `Y_j` depends on `u_j` only through
//! the sign pattern of branch `j`'s x-chain, of which there are at most
//! `2^(n-1)`. Classes are read off the forward trajectories of the grid
//! points themselves.

use std::collections::HashMap;

use crate::chaos::{iterate, sign_of_trajectory, AnalogValue, PlanePoint, SignSequence};
use crate::codec::{combine_systematic, encode, CodeParams, DecodeResult, ReceivedCodeword, SourceBlock};
use crate::{Error, Result};

/// `{-1, -1 + step, ..., 1}`; the last point is `1` when `2 / step` is an
/// integer.
pub fn grid_points(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::argument(format!("grid step must be positive, got {step}")));
    }
    let ratio = 2.0 / step;
    let rounded = ratio.round();
    let count = if (ratio - rounded).abs() < 1e-9 * ratio.max(1.0) {
        rounded as usize
    } else {
        ratio.floor() as usize
    };
    Ok((0..=count)
        .map(|i| (-1.0 + i as f64 * step).min(1.0))
        .collect())
}

fn chain_sq_dist(observed: &[f64], produced: impl Iterator<Item = f64>) -> f64 {
    observed.iter().zip(produced).map(|(r, v)| (r - v) * (r - v)).sum()
}

/// Scores `u` by encoding it and summing squared distances to `r`.
fn direct_cost(r: &ReceivedCodeword, u: &[f64], params: &CodeParams) -> Result<(f64, Vec<SignSequence>)> {
    let cw = encode(&SourceBlock::from_f64(u)?, params)?;
    let mut cost = 0.0;
    for (j, b) in cw.branches().iter().enumerate() {
        cost += chain_sq_dist(&r.rx()[j], b.xs());
        cost += chain_sq_dist(&r.ry()[j], b.ys());
    }
    Ok((cost, cw.branches().iter().map(sign_of_trajectory).collect()))
}

fn finish(r: &ReceivedCodeword, u: Vec<f64>, params: &CodeParams) -> Result<DecodeResult> {
    let (objective, best_signs) = direct_cost(r, &u, params)?;
    Ok(DecodeResult {
        estimates: u.into_iter().map(AnalogValue::new).collect::<Result<_>>()?,
        best_signs,
        objective,
    })
}

/// Encodes every point of the `k`-dimensional grid. Cost `G^k` encodes.
pub fn grid_oracle_decode_exhaustive(
    r: &ReceivedCodeword,
    params: &CodeParams,
    step: f64,
) -> Result<DecodeResult> {
    let r = combine_systematic(r, params)?;
    let grid = grid_points(step)?;
    let k = params.k();
    let mut idx = vec![0usize; k];
    let mut u = vec![0.0; k];
    let mut best = (f64::INFINITY, vec![0.0; k]);
    'outer: loop {
        for j in 0..k {
            u[j] = grid[idx[j]];
        }
        let (cost, _) = direct_cost(&r, &u, params)?;
        if cost < best.0 {
            best = (cost, u.clone());
        }
        // Odometer, last coordinate fastest.
        for j in (0..k).rev() {
            idx[j] += 1;
            if idx[j] < grid.len() {
                continue 'outer;
            }
            idx[j] = 0;
        }
        break;
    }
    finish(&r, best.1, params)
}

/// Per-branch data on the grid.
struct BranchTable {
    /// x-chain cost of each grid value as this branch's x-seed.
    x_cost: Vec<f64>,
    /// Sign class of each grid value.
    class_of: Vec<usize>,
    /// `y_cost[c][w]`: y-chain cost with x-seed in class `c` and y-seed `grid[w]`.
    y_cost: Vec<Vec<f64>>,
    n_classes: usize,
}

fn branch_table(r: &ReceivedCodeword, j: usize, grid: &[f64], n: usize) -> Result<BranchTable> {
    let mut classes: HashMap<SignSequence, usize> = HashMap::new();
    let mut reps = Vec::new();
    let mut x_cost = Vec::with_capacity(grid.len());
    let mut class_of = Vec::with_capacity(grid.len());
    for &v in grid {
        let t = iterate(PlanePoint::new(v, 0.0)?, n)?;
        x_cost.push(chain_sq_dist(&r.rx()[j], t.xs()));
        let next_id = classes.len();
        let id = *classes.entry(sign_of_trajectory(&t)).or_insert_with(|| {
            reps.push(v);
            next_id
        });
        class_of.push(id);
    }
    let y_cost = reps
        .iter()
        .map(|&rep| {
            grid.iter()
                .map(|&w| Ok(chain_sq_dist(&r.ry()[j], iterate(PlanePoint::new(rep, w)?, n)?.ys())))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BranchTable {
        x_cost,
        class_of,
        y_cost,
        n_classes: reps.len(),
    })
}

/// Best grid point for the combined observation of `r`, found exactly over
/// the full grid `{-1, -1 + step, ..., 1}^k`.
pub fn grid_oracle_decode(r: &ReceivedCodeword, params: &CodeParams, step: f64) -> Result<DecodeResult> {
    let r = combine_systematic(r, params)?;
    let grid = grid_points(step)?;
    let k = params.k();
    let g = grid.len();
    let tables = (0..k)
        .map(|j| branch_table(&r, j, &grid, params.n()))
        .collect::<Result<Vec<_>>>()?;

    let mut best_cost = f64::INFINITY;
    let mut best_idx = vec![0usize; k];

    for c0 in 0..tables[0].n_classes {
        // value[j][w]: least cost of branches 0..j-1 plus X_j(grid[w]), given
        // u_0 in class c0 and u_j = grid[w]. back[j][w]: grid index of u_{j-1}.
        let mut value = vec![vec![f64::INFINITY; g]; k];
        let mut back = vec![vec![usize::MAX; g]; k];
        for w in 0..g {
            value[1][w] = tables[1].x_cost[w] + tables[0].y_cost[c0][w];
        }
        for j in 1..k - 1 {
            let (cls_best, cls_arg) = class_minima(&value[j], &tables[j]);
            for w in 0..g {
                let (cost, arg) = (0..tables[j].n_classes)
                    .filter(|&c| cls_arg[c] != usize::MAX)
                    .map(|c| (cls_best[c] + tables[j].y_cost[c][w], cls_arg[c]))
                    .fold((f64::INFINITY, usize::MAX), |a, b| if b.0 < a.0 { b } else { a });
                value[j + 1][w] = tables[j + 1].x_cost[w] + cost;
                back[j + 1][w] = arg;
            }
        }
        let last = k - 1;
        let (cls_best, cls_arg) = class_minima(&value[last], &tables[last]);
        for v in 0..g {
            if tables[0].class_of[v] != c0 {
                continue;
            }
            for c in 0..tables[last].n_classes {
                if cls_arg[c] == usize::MAX {
                    continue;
                }
                let cost = tables[0].x_cost[v] + cls_best[c] + tables[last].y_cost[c][v];
                if cost < best_cost {
                    best_cost = cost;
                    best_idx[0] = v;
                    best_idx[last] = cls_arg[c];
                    for j in (1..last).rev() {
                        best_idx[j] = back[j + 1][best_idx[j + 1]];
                    }
                }
            }
        }
    }

    let u = best_idx.iter().map(|&i| grid[i]).collect();
    finish(&r, u, params)
}

/// Per-class minimum of `values` and its grid index.
fn class_minima(values: &[f64], table: &BranchTable) -> (Vec<f64>, Vec<usize>) {
    let mut best = vec![f64::INFINITY; table.n_classes];
    let mut arg = vec![usize::MAX; table.n_classes];
    for (w, &v) in values.iter().enumerate() {
        let c = table.class_of[w];
        if v < best[c] {
            best[c] = v;
            arg[c] = w;
        }
    }
    (best, arg)
}
