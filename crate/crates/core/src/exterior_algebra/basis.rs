//! Sorted multi-index bookkeeping for forms in dimension <= 7.
//!
//! A basis monomial `dx_{i1} ^ ... ^ dx_{ip}` with `i1 < ... < ip` is encoded as
//! the bitmask `sum 1 << ik`. Within a degree, monomials are ordered
//! lexicographically by their index tuples.

use std::sync::OnceLock;

pub const MAX_DIM: usize = 7;

struct Tables {
    /// masks[dim][degree]
    masks: Vec<Vec<Vec<u8>>>,
    /// position[dim][mask]
    position: Vec<[u16; 128]>,
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut masks = vec![Vec::new(); MAX_DIM + 1];
        let mut position = vec![[u16::MAX; 128]; MAX_DIM + 1];
        for dim in 0..=MAX_DIM {
            let mut per_degree = vec![Vec::new(); dim + 1];
            for (p, out) in per_degree.iter_mut().enumerate() {
                let mut current = Vec::with_capacity(p);
                combinations(dim, p, 0, &mut current, out);
                for (k, &m) in out.iter().enumerate() {
                    position[dim][m as usize] = k as u16;
                }
            }
            masks[dim] = per_degree;
        }
        Tables { masks, position }
    })
}

fn combinations(n: usize, p: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<u8>) {
    if current.len() == p {
        out.push(current.iter().fold(0u8, |m, &i| m | (1 << i)));
        return;
    }
    for i in start..n {
        current.push(i);
        combinations(n, p, i + 1, current, out);
        current.pop();
    }
}

/// Ordered basis masks of degree `p` in dimension `dim`.
pub fn masks(dim: usize, p: usize) -> &'static [u8] {
    &tables().masks[dim][p]
}

/// Position of `mask` in `masks(dim, popcount(mask))`.
#[inline]
pub fn position(dim: usize, mask: u8) -> usize {
    let pos = tables().position[dim][mask as usize];
    debug_assert!(pos != u16::MAX, "mask {mask:#b} outside dimension {dim}");
    pos as usize
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

pub fn full_mask(dim: usize) -> u8 {
    ((1u16 << dim) - 1) as u8
}

/// Sign of `e^a ^ e^b` relative to `e^{a|b}`; zero when the masks overlap.
#[inline]
pub fn wedge_sign(a: u8, b: u8) -> i8 {
    if a & b != 0 {
        return 0;
    }
    // count pairs (i in a, j in b) with i > j
    let mut inversions = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        inversions += (a >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sign of `e^mask ^ e^complement` relative to the volume form.
#[inline]
pub fn complement_sign(dim: usize, mask: u8) -> i8 {
    wedge_sign(mask, full_mask(dim) & !mask)
}

/// Indices of a mask in ascending order.
pub fn indices(mask: u8) -> Vec<usize> {
    (0..8).filter(|&i| mask & (1 << i) != 0).collect()
}

/// Sorts `idx` and returns the mask and permutation sign, or `None` for a repeated index.
pub fn sort_indices(idx: &[usize]) -> Option<(u8, i8)> {
    let mut mask = 0u8;
    let mut inversions = 0usize;
    for (k, &i) in idx.iter().enumerate() {
        if i >= 8 || mask & (1 << i) != 0 {
            return None;
        }
        mask |= 1 << i;
        inversions += idx[..k].iter().filter(|&&j| j > i).count();
    }
    Some((mask, if inversions % 2 == 0 { 1 } else { -1 }))
}

/// Position of `i` inside the mask, counted from the lowest index.
#[inline]
pub fn rank_in(mask: u8, i: usize) -> u32 {
    (mask & ((1u16 << i) - 1) as u8).count_ones()
}
