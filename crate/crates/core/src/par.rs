//! Execution policy for the data-parallel loops (pair batches, seed
//! optimisation, characteristic grids).
//!
//! With the `parallel` feature the loops run on rayon; without it, or with
//! [`Exec::Sequential`], they run in order on the calling thread. Results
//! are always collected in input order, so outputs do not depend on the
//! policy.

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Exec {
    #[cfg_attr(not(feature = "parallel"), default)]
    Sequential,
    #[cfg(feature = "parallel")]
    #[default]
    Parallel,
}

impl Exec {
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            Exec::Sequential => items.iter().map(f).collect(),
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(f).collect()
            }
        }
    }

    pub fn map_range<R, F>(self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        match self {
            Exec::Sequential => (0..n).map(f).collect(),
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(f).collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policies_agree_and_keep_order() {
        let xs: Vec<u64> = (0..100).collect();
        let a = Exec::Sequential.map(&xs, |x| x * x);
        let b = Exec::default().map(&xs, |x| x * x);
        assert_eq!(a, b);
        assert_eq!(Exec::default().map_range(5, |i| i), vec![0, 1, 2, 3, 4]);
    }
}
