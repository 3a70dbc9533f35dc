//! Ordered parallel map for independent jobs.
//!
//! Work items are claimed from a shared counter and results are returned in
//! input order, so the output is identical for any thread count as long as
//! each item's computation is itself deterministic. `jobs == 1` runs inline.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

pub fn ordered_map<T, R, F>(jobs: usize, items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(usize, T) -> R + Sync,
{
    let n = items.len();
    if jobs <= 1 || n <= 1 {
        return items.into_iter().enumerate().map(|(i, t)| f(i, t)).collect();
    }
    let slots: Vec<Mutex<Option<T>>> = items.into_iter().map(|t| Mutex::new(Some(t))).collect();
    let mut out: Vec<Option<R>> = (0..n).map(|_| None).collect();
    let results: Vec<Mutex<&mut Option<R>>> = out.iter_mut().map(Mutex::new).collect();
    let next = AtomicUsize::new(0);
    let workers = jobs.min(n);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let item = slots[i].lock().unwrap().take().unwrap();
                let r = f(i, item);
                **results[i].lock().unwrap() = Some(r);
            });
        }
    });
    drop(results);
    out.into_iter().map(|r| r.unwrap()).collect()
}
