// SPDX-License-Identifier: Apache-2.0
//! Block grid, rotations and the neighbour permutation.

use super::EigenError;
use crate::oracle::DenseMatrix;

/// `[[c, s], [-s, c]]` with `|s| <= c`; `t = s / c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationPair {
    pub c: f64,
    pub s: f64,
    pub t: f64,
    /// The element the rotation annihilates.
    pub beta: f64,
    /// False for the identity used when `beta` is zero or below threshold.
    pub performed: bool,
}

impl RotationPair {
    pub fn identity(beta: f64) -> Self {
        RotationPair { c: 1.0, s: 0.0, t: 0.0, beta, performed: false }
    }
}

/// Rotation that diagonalises `[[alpha, beta], [beta, delta]]`, with
/// `|theta| <= pi/4`.
pub fn jacobi_rotation(alpha: f64, beta: f64, delta: f64) -> RotationPair {
    if beta == 0.0 {
        return RotationPair::identity(beta);
    }
    let tau = (delta - alpha) / (2.0 * beta);
    let sign = if tau >= 0.0 { 1.0 } else { -1.0 };
    let t = sign / (tau.abs() + (1.0 + tau * tau).sqrt());
    let c = 1.0 / (1.0 + t * t).sqrt();
    RotationPair { c, s: t * c, t, beta, performed: true }
}

/// Block `[alpha, beta, gamma, delta]` of a diagonal cell after its own
/// rotation.
pub fn apply_diagonal(x: [f64; 4], r: &RotationPair) -> [f64; 4] {
    if !r.performed {
        return x;
    }
    [x[0] - r.t * x[1], 0.0, 0.0, x[3] + r.t * x[1]]
}

/// `R_i^T X R_j` for an off-diagonal block.
pub fn rotate_block(x: [f64; 4], ri: &RotationPair, rj: &RotationPair) -> [f64; 4] {
    let (ci, si, cj, sj) = (ri.c, ri.s, rj.c, rj.s);
    let y00 = ci * x[0] - si * x[2];
    let y01 = ci * x[1] - si * x[3];
    let y10 = si * x[0] + ci * x[2];
    let y11 = si * x[1] + ci * x[3];
    [y00 * cj - y01 * sj, y00 * sj + y01 * cj, y10 * cj - y11 * sj, y10 * sj + y11 * cj]
}

/// The rotations of the diagonal cells in one step.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StepRotations {
    pub rotations: Vec<RotationPair>,
}

impl StepRotations {
    pub fn performed(&self) -> usize {
        self.rotations.iter().filter(|r| r.performed).count()
    }

    /// Nonzero targets left alone because of the threshold.
    pub fn skipped(&self) -> usize {
        self.rotations.iter().filter(|r| !r.performed && r.beta != 0.0).count()
    }

    /// `sum beta^2` over performed rotations.
    pub fn annihilated(&self) -> f64 {
        self.rotations.iter().filter(|r| r.performed).map(|r| r.beta * r.beta).sum()
    }
}

/// For each position `q` after a step, the position it came from.
///
/// In 1-based cycle notation the forward map is
/// `(3 5 7 ... 2h-1 2h 2h-2 ... 4 2)`: position 1 stays, odd positions move
/// two places up, even positions two places down, with turns at both ends.
pub fn permutation_source(size: usize) -> Vec<usize> {
    assert!(size >= 2 && size % 2 == 0, "size must be even and positive");
    let mut fwd = vec![0; size];
    if size == 2 {
        return vec![0, 1];
    }
    for (q, f) in fwd.iter_mut().enumerate() {
        *f = match q {
            0 => 0,
            1 => 2,
            _ if q == size - 2 => size - 1,
            _ if q == size - 1 => size - 3,
            _ if q % 2 == 0 => q + 2,
            _ => q - 2,
        };
    }
    let mut src = vec![0; size];
    for (q, &f) in fwd.iter().enumerate() {
        src[f] = q;
    }
    src
}

/// `h x h` blocks of a symmetric matrix of even size `2h`, plus the
/// original index at each position. Odd orders get one zero row and
/// column, index `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockGrid {
    n: usize,
    h: usize,
    blocks: Vec<[f64; 4]>,
    tracker: Vec<usize>,
}

impl BlockGrid {
    pub fn from_matrix(a: &DenseMatrix) -> Result<Self, EigenError> {
        let n = a.order();
        if n == 0 {
            return Err(EigenError::Empty);
        }
        let h = n.div_ceil(2);
        let at = |p: usize, q: usize| if p < n && q < n { a.get(p, q) } else { 0.0 };
        let blocks = (0..h * h)
            .map(|k| {
                let (i, j) = (2 * (k / h), 2 * (k % h));
                [at(i, j), at(i, j + 1), at(i + 1, j), at(i + 1, j + 1)]
            })
            .collect();
        Ok(BlockGrid { n, h, blocks, tracker: (0..2 * h).collect() })
    }

    pub(crate) fn from_parts(n: usize, h: usize, blocks: Vec<[f64; 4]>, tracker: Vec<usize>) -> Self {
        BlockGrid { n, h, blocks, tracker }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn half(&self) -> usize {
        self.h
    }

    /// `2h`, the padded size.
    pub fn size(&self) -> usize {
        2 * self.h
    }

    pub fn steps_per_sweep(&self) -> usize {
        2 * self.h - 1
    }

    pub fn block(&self, i: usize, j: usize) -> [f64; 4] {
        self.blocks[i * self.h + j]
    }

    pub fn blocks(&self) -> &[[f64; 4]] {
        &self.blocks
    }

    /// Original index at each position.
    pub fn tracker(&self) -> &[usize] {
        &self.tracker
    }

    /// Position of each original index (padding included).
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.tracker.len()];
        for (p, &i) in self.tracker.iter().enumerate() {
            pos[i] = p;
        }
        pos
    }

    /// Entry at positions `(p, q)`.
    pub fn entry(&self, p: usize, q: usize) -> f64 {
        self.block(p / 2, q / 2)[2 * (p % 2) + q % 2]
    }

    /// Position-indexed matrix of size `2h`.
    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.size(), |p, q| self.entry(p, q))
    }

    /// Matrix in original index order, padding dropped.
    pub fn to_original(&self) -> DenseMatrix {
        let pos = self.positions();
        DenseMatrix::from_fn(self.n, |i, j| self.entry(pos[i], pos[j]))
    }

    pub fn off_norm(&self) -> f64 {
        let big = self.size();
        let mut s = 0.0;
        for p in 0..big {
            for q in 0..big {
                if p != q {
                    s += self.entry(p, q).powi(2);
                }
            }
        }
        s.sqrt()
    }

    pub fn frobenius(&self) -> f64 {
        self.blocks.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.size()).map(|p| self.entry(p, p)).sum()
    }

    /// Largest of `|alpha_ij - alpha_ji|`, `|delta_ij - delta_ji|`,
    /// `|beta_ij - gamma_ji|`.
    pub fn symmetry_error(&self) -> f64 {
        let mut e: f64 = 0.0;
        for i in 0..self.h {
            for j in 0..self.h {
                let (x, y) = (self.block(i, j), self.block(j, i));
                e = e.max((x[0] - y[0]).abs()).max((x[3] - y[3]).abs()).max((x[1] - y[2]).abs());
            }
        }
        e
    }

    /// Original index pairs held by the diagonal cells.
    pub fn diagonal_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.h).map(|i| (self.tracker[2 * i], self.tracker[2 * i + 1])).collect()
    }

    /// Diagonal entry belonging to each original index `0..n`.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let pos = self.positions();
        (0..self.n).map(|i| self.entry(pos[i], pos[i])).collect()
    }
}

/// Rows, then columns, moved by [`permutation_source`].
pub fn permute(g: &BlockGrid) -> BlockGrid {
    let src = permutation_source(g.size());
    let h = g.h;
    let blocks = (0..h * h)
        .map(|k| {
            let (i, j) = (2 * (k / h), 2 * (k % h));
            [
                g.entry(src[i], src[j]),
                g.entry(src[i], src[j + 1]),
                g.entry(src[i + 1], src[j]),
                g.entry(src[i + 1], src[j + 1]),
            ]
        })
        .collect();
    let tracker = src.iter().map(|&s| g.tracker[s]).collect();
    BlockGrid { n: g.n, h, blocks, tracker }
}

/// Rotation of diagonal block `i` under threshold `thr`.
pub(crate) fn diagonal_rotation(x: [f64; 4], thr: f64) -> RotationPair {
    let beta = x[1];
    if beta != 0.0 && beta.abs() >= thr {
        jacobi_rotation(x[0], beta, x[3])
    } else {
        RotationPair::identity(beta)
    }
}

/// One step with broadcast rotation parameters, followed by the
/// permutation.
pub fn grid_step(g: &BlockGrid, threshold: f64) -> (BlockGrid, StepRotations) {
    let h = g.h;
    let rotations: Vec<RotationPair> = (0..h).map(|i| diagonal_rotation(g.block(i, i), threshold)).collect();
    let blocks = (0..h * h)
        .map(|k| {
            let (i, j) = (k / h, k % h);
            if i == j {
                apply_diagonal(g.block(i, i), &rotations[i])
            } else {
                rotate_block(g.block(i, j), &rotations[i], &rotations[j])
            }
        })
        .collect();
    let rotated = BlockGrid { n: g.n, h, blocks, tracker: g.tracker.clone() };
    (permute(&rotated), StepRotations { rotations })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs_one_based(g: &BlockGrid) -> Vec<(usize, usize)> {
        g.diagonal_pairs().into_iter().map(|(a, b)| (a + 1, b + 1)).collect()
    }

    #[test]
    fn rotation_examples() {
        assert_eq!(jacobi_rotation(1.0, 0.0, 5.0), RotationPair::identity(0.0));
        let r = jacobi_rotation(1.0, 1.0, 1.0);
        let h = 0.5f64.sqrt();
        assert!((r.c - h).abs() < 1e-15 && (r.s - h).abs() < 1e-15);
        let d = apply_diagonal([2.0, 1.0, 1.0, 2.0], &jacobi_rotation(2.0, 1.0, 2.0));
        let mut ev = [d[0], d[3]];
        ev.sort_by(f64::total_cmp);
        assert!((ev[0] - 1.0).abs() < 1e-15 && (ev[1] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn first_ordering_row() {
        let a = DenseMatrix::from_fn(8, |i, j| (i * 8 + j) as f64);
        let g = permute(&BlockGrid::from_matrix(&a).unwrap());
        assert_eq!(pairs_one_based(&g), vec![(1, 4), (2, 6), (3, 8), (5, 7)]);
    }

    #[test]
    fn permutation_moves_at_most_two() {
        for size in (2..=20).step_by(2) {
            let src = permutation_source(size);
            for (q, &s) in src.iter().enumerate() {
                assert!(q.abs_diff(s) <= 2);
            }
        }
    }

    #[test]
    fn diagonal_block_example() {
        let a = DenseMatrix::from_rows(&[
            vec![0.0, 1.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
            vec![0.0, 0.0, 1.0, 0.0],
        ])
        .unwrap();
        let g = BlockGrid::from_matrix(&a).unwrap();
        let (_, rots) = grid_step(&g, 0.0);
        assert_eq!(rots.performed(), 2);
        let d = apply_diagonal(g.block(0, 0), &rots.rotations[0]);
        assert_eq!(d[0].abs(), 1.0);
        assert_eq!(d[3].abs(), 1.0);
    }
}
