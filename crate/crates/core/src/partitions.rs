//! Set partitions of `{0, …, n-1}`, Bell numbers and partition-factored probabilities.

use crate::error::{Error, Result};
use crate::measures::DiscreteMeasure;

/// Largest `n` for which [`enumerate_partitions`] materializes the full list.
pub const MAX_ENUMERATE_N: usize = 12;

/// Largest `n` whose Bell number fits in a `u64`.
pub const MAX_BELL_N: usize = 25;

/// Tolerance on the total mass of a probability.
pub const MASS_TOL: f64 = 1e-9;

/// A set partition of `{0, …, n-1}` into nonempty blocks.
///
/// Blocks are sorted internally and ordered by their minimum element. Indices are
/// 0-based, like every variable index in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Validates and canonicalizes a block list.
    pub fn new(n: usize, mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        for block in &mut blocks {
            if block.is_empty() {
                return Err(Error::Index("partition has an empty block".into()));
            }
            block.sort_unstable();
            for &i in block.iter() {
                if i >= n {
                    return Err(Error::Index(format!("element {i} out of range for n = {n}")));
                }
                if seen[i] {
                    return Err(Error::Index(format!("element {i} appears in two blocks")));
                }
                seen[i] = true;
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::Index(format!("element {i} is not covered")));
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(Self { n, blocks })
    }

    /// Partition encoded by a restricted-growth string: element `i` lies in block `rgs[i]`.
    fn from_rgs(rgs: &[usize]) -> Self {
        let count = rgs.iter().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); count];
        for (i, &b) in rgs.iter().enumerate() {
            blocks[b].push(i);
        }
        Self { n: rgs.len(), blocks }
    }

    /// The single-block partition `{{0, …, n-1}}`.
    pub fn whole(n: usize) -> Self {
        Self { n, blocks: vec![(0..n).collect()] }
    }

    /// The partition into singletons.
    pub fn singletons(n: usize) -> Self {
        Self { n, blocks: (0..n).map(|i| vec![i]).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Block count `|π|`.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

/// Iterator over the partitions of `{0, …, n-1}` in restricted-growth-string order.
#[derive(Debug, Clone)]
pub struct PartitionIter {
    rgs: Vec<usize>,
    // maxima[i] = max(rgs[0..=i])
    maxima: Vec<usize>,
    done: bool,
}

impl PartitionIter {
    pub fn new(n: usize) -> Self {
        Self { rgs: vec![0; n], maxima: vec![0; n], done: n == 0 }
    }

    fn advance(&mut self) {
        let n = self.rgs.len();
        let mut i = n;
        while i > 1 {
            i -= 1;
            if self.rgs[i] <= self.maxima[i - 1] {
                self.rgs[i] += 1;
                self.maxima[i] = self.maxima[i - 1].max(self.rgs[i]);
                for j in i + 1..n {
                    self.rgs[j] = 0;
                    self.maxima[j] = self.maxima[i];
                }
                return;
            }
        }
        self.done = true;
    }
}

impl Iterator for PartitionIter {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        let out = Partition::from_rgs(&self.rgs);
        self.advance();
        Some(out)
    }
}

/// All partitions of `{0, …, n-1}`, `1 <= n <= 12`, in restricted-growth-string order.
pub fn enumerate_partitions(n: usize) -> Result<Vec<Partition>> {
    if !(1..=MAX_ENUMERATE_N).contains(&n) {
        return Err(Error::Arity(format!("partition enumeration needs 1 <= n <= {MAX_ENUMERATE_N}, got {n}")));
    }
    Ok(PartitionIter::new(n).collect())
}

/// Bell number `B_n` for `0 <= n <= 25`.
pub fn bell(n: usize) -> Result<u64> {
    if n > MAX_BELL_N {
        return Err(Error::Arity(format!("Bell numbers are limited to n <= {MAX_BELL_N}, got {n}")));
    }
    // B_{m+1} = Σ_j C(m, j) B_j, with the binomials taken from a running Pascal row
    let mut b = vec![1u128];
    let mut row = vec![1u128];
    for m in 0..n {
        let next: u128 = row.iter().zip(&b).map(|(c, bj)| c * bj).sum();
        b.push(next);
        let mut new_row = vec![1u128; m + 2];
        for j in 1..=m {
            new_row[j] = row[j - 1] + row[j];
        }
        row = new_row;
    }
    Ok(b[n] as u64)
}

/// `a_π = (-1)^{|π|-1} (|π|-1)!`.
pub fn streitberg_coefficient(pi: &Partition) -> i64 {
    let m = pi.len() as i64;
    let fact: i64 = (1..m).product();
    if m % 2 == 1 {
        fact
    } else {
        -fact
    }
}

/// Checks that `p` is a probability: nonnegative weights, total mass `1 ± 1e-9`.
pub fn ensure_probability(p: &DiscreteMeasure) -> Result<()> {
    if let Some(a) = p.atoms().iter().find(|a| a.weight < 0.0) {
        return Err(Error::Mass(format!("negative weight {} in a probability", a.weight)));
    }
    let mass = p.total_mass();
    if (mass - 1.0).abs() > MASS_TOL {
        return Err(Error::Mass(format!("total mass {mass} differs from 1")));
    }
    Ok(())
}

/// `P_π = ⨉_{F ∈ π} P_F`, with atoms reassembled into the original variable order.
pub fn partition_factor(p: &DiscreteMeasure, pi: &Partition) -> Result<DiscreteMeasure> {
    ensure_probability(p)?;
    factor_unchecked(p, pi)
}

pub(crate) fn factor_unchecked(p: &DiscreteMeasure, pi: &Partition) -> Result<DiscreteMeasure> {
    if pi.n() != p.n() {
        return Err(Error::Shape(format!("partition of {} elements for a measure on {} variables", pi.n(), p.n())));
    }
    if pi.len() == 1 {
        return Ok(p.clone());
    }
    let marginals: Vec<DiscreteMeasure> = pi.blocks().iter().map(|b| p.project(b)).collect();
    let parts: Vec<(&[usize], &DiscreteMeasure)> = pi.blocks().iter().map(Vec::as_slice).zip(&marginals).collect();
    Ok(DiscreteMeasure::product_on(p.shape(), &parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{ProductPoint, SpaceShape};
    use proptest::prelude::*;

    fn blocks(n: usize) -> Vec<Vec<Vec<usize>>> {
        enumerate_partitions(n).unwrap().into_iter().map(|p| p.blocks().to_vec()).collect()
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(blocks(1), vec![vec![vec![0]]]);
        assert_eq!(
            blocks(3),
            vec![
                vec![vec![0, 1, 2]],
                vec![vec![0, 1], vec![2]],
                vec![vec![0, 2], vec![1]],
                vec![vec![0], vec![1, 2]],
                vec![vec![0], vec![1], vec![2]],
            ]
        );
        assert_eq!(blocks(4).len(), 15);
        assert!(matches!(enumerate_partitions(0), Err(Error::Arity(_))));
        assert!(matches!(enumerate_partitions(13), Err(Error::Arity(_))));
    }

    #[test]
    fn bell_examples() {
        assert_eq!(bell(0).unwrap(), 1);
        assert_eq!(bell(3).unwrap(), 5);
        assert_eq!(bell(5).unwrap(), 52);
        assert_eq!(bell(25).unwrap(), 4_638_590_332_229_999_353);
        assert!(matches!(bell(26), Err(Error::Arity(_))));
    }

    #[test]
    fn bell_matches_enumeration() {
        for n in 1..=MAX_ENUMERATE_N {
            assert_eq!(PartitionIter::new(n).count() as u64, bell(n).unwrap(), "n = {n}");
        }
        assert_eq!(enumerate_partitions(12).unwrap().len(), 4_213_597);
    }

    #[test]
    fn enumeration_is_distinct_and_valid() {
        let all = enumerate_partitions(6).unwrap();
        let set: std::collections::HashSet<_> = all.iter().cloned().collect();
        assert_eq!(set.len(), all.len());
        for p in &all {
            assert_eq!(&Partition::new(6, p.blocks().to_vec()).unwrap(), p);
        }
    }

    #[test]
    fn coefficient_examples() {
        assert_eq!(streitberg_coefficient(&Partition::whole(4)), 1);
        assert_eq!(streitberg_coefficient(&Partition::new(3, vec![vec![0, 1], vec![2]]).unwrap()), -1);
        assert_eq!(streitberg_coefficient(&Partition::singletons(3)), 2);
        assert_eq!(streitberg_coefficient(&Partition::singletons(5)), 24);
    }

    #[test]
    fn coefficient_sum_vanishes() {
        // Σ_π a_π = 0 for n >= 2: the coefficients cancel on a point mass
        for n in 2..=9 {
            let s: i64 = PartitionIter::new(n).map(|p| streitberg_coefficient(&p)).sum();
            assert_eq!(s, 0, "n = {n}");
        }
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(3, vec![vec![0], vec![1]]).is_err());
        assert!(Partition::new(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(Partition::new(2, vec![vec![0], vec![], vec![1]]).is_err());
        let p = Partition::new(3, vec![vec![2, 1], vec![0]]).unwrap();
        assert_eq!(p.blocks(), &[vec![0], vec![1, 2]]);
    }

    #[test]
    fn factor_examples() {
        let shape = SpaceShape::uniform(3, 1).unwrap();
        let p = DiscreteMeasure::from_flat(
            shape.clone(),
            [(vec![0.0, 0.0, 1.0], 0.5), (vec![1.0, 1.0, 0.0], 0.25), (vec![1.0, 0.0, 0.0], 0.25)],
        )
        .unwrap();
        assert_eq!(partition_factor(&p, &Partition::whole(3)).unwrap(), p);

        let delta = DiscreteMeasure::dirac(shape.clone(), ProductPoint::scalars(&[1.0, 2.0, 3.0])).unwrap();
        assert_eq!(partition_factor(&delta, &Partition::singletons(3)).unwrap(), delta);

        let p12 = DiscreteMeasure::from_flat(
            SpaceShape::uniform(2, 1).unwrap(),
            [(vec![0.0, 1.0], 0.5), (vec![2.0, 3.0], 0.5)],
        )
        .unwrap();
        let p3 = DiscreteMeasure::from_flat(SpaceShape::uniform(1, 1).unwrap(), [(vec![7.0], 0.5), (vec![8.0], 0.5)])
            .unwrap();
        let dec = DiscreteMeasure::product(&[p12, p3]).unwrap();
        let pi = Partition::new(3, vec![vec![0, 1], vec![2]]).unwrap();
        assert_eq!(partition_factor(&dec, &pi).unwrap(), dec);

        let half = delta.scaled(0.5);
        assert!(matches!(partition_factor(&half, &pi), Err(Error::Mass(_))));
    }

    fn probability(n: usize) -> impl Strategy<Value = DiscreteMeasure> {
        prop::collection::vec((prop::collection::vec(0i32..3, n), 0.01f64..1.0), 1..10).prop_map(move |pairs| {
            let total: f64 = pairs.iter().map(|p| p.1).sum();
            DiscreteMeasure::from_flat(
                SpaceShape::uniform(n, 1).unwrap(),
                pairs.into_iter().map(|(c, w)| (c.into_iter().map(f64::from).collect(), w / total)),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn factor_is_probability(p in probability(4), idx in 0usize..15) {
            let pi = &enumerate_partitions(4).unwrap()[idx];
            let f = partition_factor(&p, pi).unwrap();
            prop_assert!((f.total_mass() - 1.0).abs() <= MASS_TOL);
            prop_assert!(f.atoms().iter().all(|a| a.weight > 0.0));
        }

        #[test]
        fn factor_keeps_block_marginals(p in probability(4), idx in 0usize..15) {
            let pi = &enumerate_partitions(4).unwrap()[idx];
            let f = partition_factor(&p, pi).unwrap();
            for block in pi.blocks() {
                let diff = DiscreteMeasure::combine(1.0, &f.marginal(block).unwrap(), -1.0, &p.marginal(block).unwrap()).unwrap();
                prop_assert!(diff.max_abs_weight() <= 1e-12);
            }
        }
    }
}
