//! Block scheduling.
//!
//! Long enumerations are cut into numbered blocks. An [`Executor`] evaluates
//! every block and hands the results back in block order, so a caller that
//! folds them left to right gets the same bits whatever the schedule.

use alloc::vec::Vec;

pub trait Executor: Sync {
    /// Evaluates `f(0), …, f(count - 1)` and returns them in index order.
    fn map_blocks<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync;
}

/// Runs every block on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map_blocks<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync,
    {
        (0..count).map(f).collect()
    }
}

impl<E: Executor + ?Sized> Executor for &E {
    fn map_blocks<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync,
    {
        (**self).map_blocks(count, f)
    }
}
