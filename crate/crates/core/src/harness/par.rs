//! Replica execution: data-parallel over replica indices when the
//! `parallel` feature is on, with a sequential path for comparison and for
//! builds without rayon.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    /// Parallel across replicas (falls back to sequential without the
    /// `parallel` feature).
    #[default]
    Parallel,
    Sequential,
    /// Sequential, last replica first. Results are still returned in
    /// replica order.
    Reversed,
}

/// Evaluate `f` on replica indices `0..n`, returning results in index order
/// whatever the execution order.
pub fn map_replicas<T, F>(n: u64, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    match exec {
        Execution::Parallel => parallel(n, f),
        Execution::Sequential => (0..n).map(f).collect(),
        Execution::Reversed => {
            let mut out: Vec<T> = (0..n).rev().map(f).collect();
            out.reverse();
            out
        }
    }
}

#[cfg(feature = "parallel")]
fn parallel<T: Send, F: Fn(u64) -> T + Sync + Send>(n: u64, f: F) -> Vec<T> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn parallel<T: Send, F: Fn(u64) -> T + Sync + Send>(n: u64, f: F) -> Vec<T> {
    (0..n).map(f).collect()
}
