use num_traits::FromPrimitive;

use super::sum::{chunked_sum, Compensated, Parallelism};
use super::Ring;
use crate::densela::Matrix;
use crate::error::{Error, Result};

/// Largest order accepted by the matching enumeration.
pub const HAF_ENUM_LIMIT: usize = 12;
/// Largest order accepted by the power-trace algorithm.
pub const HAF_FAST_LIMIT: usize = 40;

const SUBSETS_PER_CHUNK: u64 = 64;

/// Hafnian by direct enumeration of perfect matchings.
///
/// Reads the strict upper triangle only. Odd order gives zero, order zero gives one.
pub fn haf_enum<T: Ring>(a: &Matrix<T>) -> Result<T> {
    let n = a.ensure_square()?;
    if n > HAF_ENUM_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: HAF_ENUM_LIMIT,
        });
    }
    if n % 2 == 1 {
        return Ok(T::zero());
    }
    Ok(matchings(a, (1u32 << n) - 1))
}

fn matchings<T: Ring>(a: &Matrix<T>, mask: u32) -> T {
    if mask == 0 {
        return T::one();
    }
    let i = mask.trailing_zeros() as usize;
    let rest = mask & !(1 << i);
    let mut sum = T::zero();
    let mut m = rest;
    while m != 0 {
        let j = m.trailing_zeros() as usize;
        m &= m - 1;
        sum = sum + a[(i, j)] * matchings(a, rest & !(1 << j));
    }
    sum
}

/// Hafnian by the power-trace formula, summing over subsets of index pairs
/// `(2i, 2i+1)`:
///
/// `haf(A) = sum_Z (-1)^(n/2 - |Z|) [x^(n/2)] exp(sum_j tr((X A_Z)^j) x^j / (2j))`
///
/// where `X` swaps the two members of each pair. The diagonal is ignored.
pub fn haf_fast<T>(a: &Matrix<T>) -> Result<T>
where
    T: Ring + FromPrimitive,
{
    haf_fast_with(a, Parallelism::default())
}

pub fn haf_fast_with<T>(a: &Matrix<T>, par: Parallelism) -> Result<T>
where
    T: Ring + FromPrimitive,
{
    let n = a.ensure_square()?;
    if n > HAF_FAST_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: HAF_FAST_LIMIT,
        });
    }
    if n % 2 == 1 {
        return Ok(T::zero());
    }
    if n == 0 {
        return Ok(T::one());
    }
    let half = n / 2;
    let sym = Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Less => a[(i, j)],
        std::cmp::Ordering::Greater => a[(j, i)],
        std::cmp::Ordering::Equal => T::zero(),
    });
    // 1/(2j) and 1/k as ring elements
    let halves: Vec<T> = (0..=half).map(|k| inverse_of(2 * k.max(1))).collect();
    let inverses: Vec<T> = (0..=half).map(|k| inverse_of(k.max(1))).collect();
    let ints: Vec<T> = (0..=half)
        .map(|k| T::from_usize(k).expect("small integer"))
        .collect();

    let weights = Weights {
        halves: &halves,
        inverses: &inverses,
        ints: &ints,
    };
    let total = 1u64 << half;
    let value = chunked_sum(total, SUBSETS_PER_CHUNK, par, |start, end| {
        let mut acc = Compensated::new();
        for mask in start..end {
            let term = subset_term(&sym, half, mask, &weights);
            if (half - mask.count_ones() as usize).is_multiple_of(2) {
                acc.add(term);
            } else {
                acc.add(-term);
            }
        }
        acc.value()
    });
    Ok(value)
}

fn inverse_of<T: Ring + FromPrimitive>(k: usize) -> T {
    T::one() / T::from_usize(k).expect("small integer is representable")
}

struct Weights<'a, T> {
    halves: &'a [T],
    inverses: &'a [T],
    ints: &'a [T],
}

fn subset_term<T: Ring>(a: &Matrix<T>, half: usize, mask: u64, w: &Weights<T>) -> T {
    let idx: Vec<usize> = (0..half)
        .filter(|&i| mask & (1 << i) != 0)
        .flat_map(|i| [2 * i, 2 * i + 1])
        .collect();
    let k = idx.len();
    if k == 0 {
        return T::zero();
    }
    // C = X B: row r of C is row partner(r) of B
    let c = Matrix::from_fn(k, k, |r, col| a[(idx[r ^ 1], idx[col])]);
    let mut power = c.clone();
    // g[j] = tr(C^j) / (2j)
    let mut g = vec![T::zero(); half + 1];
    for j in 1..=half {
        if j > 1 {
            power = &power * &c;
        }
        g[j] = power.trace() * w.halves[j];
    }
    // coefficients of exp(sum_j g_j x^j): e_k = (1/k) sum_j j g_j e_{k-j}
    let mut e = vec![T::zero(); half + 1];
    e[0] = T::one();
    for kk in 1..=half {
        let mut s = T::zero();
        for j in 1..=kk {
            s = s + w.ints[j] * g[j] * e[kk - j];
        }
        e[kk] = s * w.inverses[kk];
    }
    e[half]
}
