//! Data-parallel helpers.
//!
//! With the `parallel` feature (default) batch work is spread over the rayon
//! thread pool; without it every helper runs sequentially. Output order
//! always follows input order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How a batch of independent work items is executed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    /// Falls back to sequential when built without the `parallel` feature.
    #[default]
    Parallel,
}

impl Exec {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

/// Maps `f` over `items`, preserving order.
pub fn map<T, R, F>(exec: Exec, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Maps `f` over `lo..hi`, preserving order.
pub fn map_range<R, F>(exec: Exec, lo: u64, hi: u64, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(u64) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (lo..hi).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (lo..hi).map(f).collect()
}

/// Balanced product tree over `items`. `combine` must be associative.
pub fn reduce_tree<T, F>(exec: Exec, mut items: Vec<T>, identity: T, combine: F) -> T
where
    T: Send + Sync + Clone,
    F: Fn(&T, &T) -> T + Sync + Send,
{
    if items.is_empty() {
        return identity;
    }
    while items.len() > 1 {
        let pairs: Vec<&[T]> = items.chunks(2).collect();
        items = map(exec, &pairs, |chunk| match chunk {
            [x, y] => combine(x, y),
            [x] => x.clone(),
            _ => unreachable!(),
        });
    }
    items.pop().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_order() {
        let xs: Vec<u64> = (0..1000).collect();
        for exec in [Exec::Sequential, Exec::Parallel] {
            let ys = map(exec, &xs, |x| x * x);
            assert_eq!(ys, xs.iter().map(|x| x * x).collect::<Vec<_>>());
            assert_eq!(map_range(exec, 5, 10, |i| i), vec![5, 6, 7, 8, 9]);
        }
    }

    #[test]
    fn tree_reduction() {
        for exec in [Exec::Sequential, Exec::Parallel] {
            let xs: Vec<u64> = (1..=20).collect();
            assert_eq!(reduce_tree(exec, xs, 0, |a, b| a + b), 210);
            assert_eq!(reduce_tree(exec, vec![], 1u64, |a, b| a * b), 1);
            let strs: Vec<String> = ["a", "b", "c", "d", "e"].iter().map(|s| s.to_string()).collect();
            assert_eq!(reduce_tree(exec, strs, String::new(), |a, b| format!("{a}{b}")), "abcde");
        }
    }
}
