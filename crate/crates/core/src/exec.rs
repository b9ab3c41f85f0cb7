//! Execution policy for the data-parallel kernels.
//!
//! Every kernel splits its work into fixed-size blocks and combines the block
//! results in block order, so [`Exec::Sequential`] and [`Exec::Parallel`]
//! produce bit-identical output regardless of the number of worker threads.
//! Without the `parallel` feature, `Exec::Parallel` runs the sequential path.

use num_complex::Complex64;

use crate::numeric::{lane_sum, ComplexSum};

/// Block length for amplitude reductions and updates.
pub(crate) const AMPLITUDE_BLOCK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// Whether this policy actually fans out to a thread pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// Compensated sum of `data`, reduced block by block in index order.
    pub(crate) fn sum(self, data: &[Complex64]) -> Complex64 {
        let partials: Vec<ComplexSum> = self.map_blocks(data, AMPLITUDE_BLOCK, lane_sum);
        let mut total = ComplexSum::new();
        for p in &partials {
            total.merge(p);
        }
        total.value()
    }

    /// Apply `f` to every element.
    pub(crate) fn for_each_mut<F>(self, data: &mut [Complex64], f: F)
    where
        F: Fn(&mut Complex64) + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() && data.len() > AMPLITUDE_BLOCK {
            use rayon::prelude::*;
            data.par_chunks_mut(AMPLITUDE_BLOCK)
                .for_each(|block| block.iter_mut().for_each(&f));
            return;
        }
        data.iter_mut().for_each(f);
    }

    /// Apply `f` to every element and return the compensated sum of the
    /// results, reduced in block order.
    pub(crate) fn update_and_sum<F>(self, data: &mut [Complex64], f: F) -> Complex64
    where
        F: Fn(&mut Complex64) + Sync + Send,
    {
        let block_fn = |block: &mut [Complex64]| {
            block.iter_mut().for_each(&f);
            lane_sum(block)
        };
        #[cfg(feature = "parallel")]
        let partials: Vec<ComplexSum> = if self.is_parallel() && data.len() > AMPLITUDE_BLOCK {
            use rayon::prelude::*;
            data.par_chunks_mut(AMPLITUDE_BLOCK).map(block_fn).collect()
        } else {
            data.chunks_mut(AMPLITUDE_BLOCK).map(block_fn).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let partials: Vec<ComplexSum> = data.chunks_mut(AMPLITUDE_BLOCK).map(block_fn).collect();
        let mut total = ComplexSum::new();
        for p in &partials {
            total.merge(p);
        }
        total.value()
    }

    /// Map each block of `data` to a value; results are returned in block order.
    pub(crate) fn map_blocks<T, F>(self, data: &[Complex64], block: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&[Complex64]) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() && data.len() > block {
            use rayon::prelude::*;
            return data.par_chunks(block).map(f).collect();
        }
        data.chunks(block).map(f).collect()
    }

    /// Evaluate `f(i)` for `i in 0..count`, results in index order.
    pub(crate) fn map_indices<T, F>(self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() && count > 1 {
            use rayon::prelude::*;
            return (0..count).into_par_iter().map(f).collect();
        }
        (0..count).map(f).collect()
    }
}
