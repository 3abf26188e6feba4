use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use crate::error::CliError;

/// Environment variable capping worker threads; `0` runs everything on the
/// calling thread.
pub const THREADS_ENV: &str = "EHP_DUFFING_THREADS";

/// Worker limit from the environment, defaulting to the available cores.
pub fn thread_limit() -> Result<usize, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| {
            CliError::Usage(format!(
                "{THREADS_ENV} must be a non-negative integer, got '{v}'"
            ))
        }),
        Err(_) => Ok(thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// Applies `f` to every item on up to `threads` workers and returns the
/// results in input order.
pub fn map_ordered<T, R, F>(items: &[T], threads: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let workers = threads.min(items.len());
    if workers <= 1 {
        return items.iter().map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<R>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(item) = items.get(i) else { break };
                let r = f(item);
                slots.lock().expect("worker panicked")[i] = Some(r);
            });
        }
    });
    slots
        .into_inner()
        .expect("worker panicked")
        .into_iter()
        .map(|r| r.expect("every slot filled"))
        .collect()
}
