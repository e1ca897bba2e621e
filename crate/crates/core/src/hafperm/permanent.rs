use super::sum::{chunked_sum, Compensated, Parallelism};
use super::Ring;
use crate::densela::Matrix;
use crate::error::{Error, Result};

/// Largest order accepted by Ryser's formula.
pub const PERM_LIMIT: usize = 30;

const GRAY_STEPS_PER_CHUNK: u64 = 4096;

/// Permanent by Ryser's inclusion-exclusion formula in Gray-code order.
///
/// Each chunk of Gray-code steps recomputes its row sums from scratch, so
/// incremental drift is bounded by the chunk length.
pub fn perm_ryser<T: Ring>(x: &Matrix<T>) -> Result<T> {
    perm_ryser_with(x, Parallelism::default())
}

pub fn perm_ryser_with<T: Ring>(x: &Matrix<T>, par: Parallelism) -> Result<T> {
    let p = x.ensure_square()?;
    if p > PERM_LIMIT {
        return Err(Error::TooLarge {
            n: p,
            limit: PERM_LIMIT,
        });
    }
    if p == 0 {
        return Ok(T::one());
    }
    let total = 1u64 << p;
    let sum = chunked_sum(total, GRAY_STEPS_PER_CHUNK, par, |start, end| {
        let start = start.max(1);
        if start >= end {
            return T::zero();
        }
        let mut gray = start ^ (start >> 1);
        let mut rows: Vec<T> = (0..p)
            .map(|i| {
                (0..p)
                    .filter(|&j| gray & (1 << j) != 0)
                    .fold(T::zero(), |s, j| s + x[(i, j)])
            })
            .collect();
        let mut acc = Compensated::new();
        let mut k = start;
        loop {
            let prod = rows.iter().fold(T::one(), |a, &b| a * b);
            if gray.count_ones() % 2 == 0 {
                acc.add(prod);
            } else {
                acc.add(-prod);
            }
            k += 1;
            if k >= end {
                break;
            }
            let bit = k.trailing_zeros() as usize;
            gray ^= 1 << bit;
            if gray & (1 << bit) != 0 {
                for (i, r) in rows.iter_mut().enumerate() {
                    *r = *r + x[(i, bit)];
                }
            } else {
                for (i, r) in rows.iter_mut().enumerate() {
                    *r = *r - x[(i, bit)];
                }
            }
        }
        acc.value()
    });
    Ok(if p % 2 == 0 { sum } else { -sum })
}
