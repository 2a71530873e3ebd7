//! Sequential and data-parallel execution of search loops.
//!
//! Every scan in this crate (pair scans, vertex-tuple checks, sample sweeps)
//! funnels through these helpers so that the `parallel` feature changes only
//! the schedule, never the answer. Witness searches reduce to the *minimum
//! index* satisfying the predicate, which makes the parallel result identical
//! to the sequential one.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Index and value of the first item (lowest index) matching `pred`.
pub fn seq_first<T, P>(items: &[T], pred: P) -> Option<(usize, &T)>
where
    P: Fn(&T) -> bool + Sync + Send,
{
    items.iter().enumerate().find(|(_, t)| pred(t))
}

#[cfg(feature = "parallel")]
pub fn par_first<T, P>(items: &[T], pred: P) -> Option<(usize, &T)>
where
    T: Sync,
    P: Fn(&T) -> bool + Sync + Send,
{
    items
        .par_iter()
        .enumerate()
        .filter(|(_, t)| pred(t))
        .min_by_key(|(i, _)| *i)
}

/// Dispatches to the parallel scan when the feature is on.
pub fn first<T, P>(items: &[T], pred: P) -> Option<(usize, &T)>
where
    T: Sync,
    P: Fn(&T) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        par_first(items, pred)
    }
    #[cfg(not(feature = "parallel"))]
    {
        seq_first(items, pred)
    }
}

pub fn seq_all<T, P>(items: &[T], pred: P) -> bool
where
    P: Fn(&T) -> bool + Sync + Send,
{
    items.iter().all(pred)
}

#[cfg(feature = "parallel")]
pub fn par_all<T, P>(items: &[T], pred: P) -> bool
where
    T: Sync,
    P: Fn(&T) -> bool + Sync + Send,
{
    items.par_iter().all(pred)
}

pub fn all<T, P>(items: &[T], pred: P) -> bool
where
    T: Sync,
    P: Fn(&T) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        par_all(items, pred)
    }
    #[cfg(not(feature = "parallel"))]
    {
        seq_all(items, pred)
    }
}

/// Map `f` over `0..n` preserving index order in the output.
pub fn seq_map_collect<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn par_map_collect<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

pub fn map_collect<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        par_map_collect(n, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        seq_map_collect(n, f)
    }
}

/// Lowest index in `0..n` matching `pred`, scanning a virtual range instead
/// of a materialized slice (tuple spaces can be large).
pub fn seq_first_index<P>(n: usize, pred: P) -> Option<usize>
where
    P: Fn(usize) -> bool + Sync + Send,
{
    (0..n).find(|&i| pred(i))
}

#[cfg(feature = "parallel")]
pub fn par_first_index<P>(n: usize, pred: P) -> Option<usize>
where
    P: Fn(usize) -> bool + Sync + Send,
{
    (0..n).into_par_iter().filter(|&i| pred(i)).min()
}

pub fn first_index<P>(n: usize, pred: P) -> Option<usize>
where
    P: Fn(usize) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        par_first_index(n, pred)
    }
    #[cfg(not(feature = "parallel"))]
    {
        seq_first_index(n, pred)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_returns_lowest_index() {
        let items: Vec<u32> = (0..1000).collect();
        let hit = |x: &u32| *x % 7 == 3;
        assert_eq!(seq_first(&items, hit), Some((3, &3)));
        #[cfg(feature = "parallel")]
        assert_eq!(par_first(&items, hit), Some((3, &3)));
        assert_eq!(first(&items, hit), Some((3, &3)));
        assert_eq!(first(&items, |x| *x > 5000), None);
    }

    #[test]
    fn first_index_matches_seq() {
        let pred = |i: usize| i >= 137;
        assert_eq!(seq_first_index(10_000, pred), Some(137));
        #[cfg(feature = "parallel")]
        assert_eq!(par_first_index(10_000, pred), Some(137));
        assert_eq!(first_index(100, |_| false), None);
    }

    #[test]
    fn map_collect_preserves_order() {
        let out = map_collect(100, |i| i * i);
        assert_eq!(out, (0..100).map(|i| i * i).collect::<Vec<_>>());
    }

    #[test]
    fn all_agrees() {
        let items: Vec<u32> = (0..100).collect();
        assert!(all(&items, |x| *x < 100));
        assert!(!all(&items, |x| *x < 99));
    }
}
