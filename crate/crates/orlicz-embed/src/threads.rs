use std::sync::atomic::{AtomicUsize, Ordering};
use std::thread;

use orlicz_embed_core::Executor;

/// Runs blocks on up to `threads` scoped worker threads. Workers claim block
/// indices from a shared counter; results are put back in index order.
#[derive(Debug, Clone, Copy)]
pub struct Threaded {
    threads: usize,
}

impl Threaded {
    /// `0` means one worker per available CPU.
    pub fn new(threads: usize) -> Self {
        let threads = if threads == 0 {
            thread::available_parallelism().map_or(1, |n| n.get())
        } else {
            threads
        };
        Threaded { threads }
    }

    pub fn threads(&self) -> usize {
        self.threads
    }
}

impl Executor for Threaded {
    fn map_blocks<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync,
    {
        let workers = self.threads.min(count);
        if workers <= 1 {
            return (0..count).map(f).collect();
        }
        let next = AtomicUsize::new(0);
        let mut tagged: Vec<(usize, T)> = thread::scope(|s| {
            let handles: Vec<_> = (0..workers)
                .map(|_| {
                    s.spawn(|| {
                        let mut out = Vec::new();
                        loop {
                            let b = next.fetch_add(1, Ordering::Relaxed);
                            if b >= count {
                                break out;
                            }
                            out.push((b, f(b)));
                        }
                    })
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("worker panicked"))
                .collect()
        });
        tagged.sort_unstable_by_key(|(b, _)| *b);
        tagged.into_iter().map(|(_, t)| t).collect()
    }
}
