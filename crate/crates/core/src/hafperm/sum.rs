use rayon::prelude::*;

use super::Ring;

/// Whether chunked sums run on the rayon pool. Both modes give identical bits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Parallelism {
    Serial,
    #[default]
    Parallel,
}

/// Kahan-compensated accumulator.
#[derive(Clone, Copy, Debug)]
pub struct Compensated<T> {
    sum: T,
    carry: T,
}

impl<T: Ring> Compensated<T> {
    pub fn new() -> Self {
        Compensated {
            sum: T::zero(),
            carry: T::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, x: T) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum
    }
}

impl<T: Ring> Default for Compensated<T> {
    fn default() -> Self {
        Self::new()
    }
}

/// Sums `chunk(start, end)` over fixed-size ranges covering `0..total`, then
/// reduces the partial sums in index order.
pub(crate) fn chunked_sum<T, F>(total: u64, chunk_len: u64, par: Parallelism, chunk: F) -> T
where
    T: Ring,
    F: Fn(u64, u64) -> T + Sync,
{
    let chunks = total.div_ceil(chunk_len.max(1));
    let range = |c: u64| (c * chunk_len, ((c + 1) * chunk_len).min(total));
    let partials: Vec<T> = match par {
        Parallelism::Parallel if chunks > 1 => (0..chunks)
            .into_par_iter()
            .map(|c| {
                let (s, e) = range(c);
                chunk(s, e)
            })
            .collect(),
        _ => (0..chunks)
            .map(|c| {
                let (s, e) = range(c);
                chunk(s, e)
            })
            .collect(),
    };
    let mut acc = Compensated::new();
    for p in partials {
        acc.add(p);
    }
    acc.value()
}
