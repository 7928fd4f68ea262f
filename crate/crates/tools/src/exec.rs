use kcore::bsp::Executor;
use rayon::prelude::*;

/// Runs partitions on a dedicated rayon pool with a fixed number of lanes.
///
/// Each item is handed to exactly one lane per call, so partitions are never
/// shared between threads within a phase.
pub struct Threaded {
    pool: rayon::ThreadPool,
}

impl Threaded {
    pub fn new(workers: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .thread_name(|i| format!("kcore-lane-{i}"))
            .build()?;
        Ok(Self { pool })
    }

    pub fn lanes(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Executor for Threaded {
    fn for_each_mut<T, F>(&self, items: &mut [T], f: F)
    where
        T: Send,
        F: Fn(&mut T) + Sync + Send,
    {
        self.pool
            .install(|| items.par_iter_mut().with_max_len(1).for_each(f));
    }
}
