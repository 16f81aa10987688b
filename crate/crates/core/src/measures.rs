//! Finitely supported signed measures on a product of Euclidean spaces.
//!
//! A [`DiscreteMeasure`] lives on `ℝ^{d_1} × … × ℝ^{d_n}` (a [`SpaceShape`]).
//! Atoms are identified by bitwise equality of their coordinates, with `-0.0`
//! folded into `+0.0`; duplicate atoms are merged and zero weights dropped on
//! construction. Atoms are kept sorted by their canonical bit pattern so that
//! every traversal order is reproducible.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use itertools::Itertools;

/// Absolute tolerance under which an aggregated marginal weight counts as zero.
pub const MARGINAL_TOL: f64 = 1e-12;

/// Largest variable count accepted by [`DiscreteMeasure::is_member_mk`].
pub const MAX_MEMBERSHIP_VARS: usize = 16;

/// Block dimensions `(d_1, …, d_n)` of a product space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpaceShape {
    dims: Vec<usize>,
    offsets: Vec<usize>,
}

impl SpaceShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Shape("a product space needs at least one variable".into()));
        }
        if let Some(i) = dims.iter().position(|&d| d == 0) {
            return Err(Error::Shape(format!("variable {} has dimension 0", i + 1)));
        }
        let mut offsets = Vec::with_capacity(dims.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for d in &dims {
            acc += d;
            offsets.push(acc);
        }
        Ok(Self { dims, offsets })
    }

    /// `n` copies of `ℝ^d`.
    pub fn uniform(n: usize, d: usize) -> Result<Self> {
        Self::new(vec![d; n])
    }

    /// Number of variables `n`.
    pub fn n(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Length of a flattened point.
    pub fn total_dim(&self) -> usize {
        self.offsets[self.dims.len()]
    }

    /// Coordinates of variable `i` inside a flattened point.
    #[inline]
    pub fn block<'a>(&self, coords: &'a [f64], i: usize) -> &'a [f64] {
        &coords[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Shape of the sub-space spanned by `vars`, in the given order.
    pub fn select(&self, vars: &[usize]) -> Result<Self> {
        Self::new(vars.iter().map(|&i| self.dims[i]).collect())
    }

    fn concat<'a>(shapes: impl IntoIterator<Item = &'a SpaceShape>) -> Result<Self> {
        Self::new(shapes.into_iter().flat_map(|s| s.dims.iter().copied()).collect())
    }

    /// Blockwise squared Euclidean distances between two flattened points.
    pub fn squared_distances(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let (a, b) = (self.block(x, i), self.block(y, i));
            *o = a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum();
        }
    }
}

/// A point `(x_1, …, x_n)` with `x_i ∈ ℝ^{d_i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductPoint {
    blocks: Vec<Vec<f64>>,
}

impl ProductPoint {
    pub fn new(blocks: Vec<Vec<f64>>) -> Self {
        Self { blocks }
    }

    /// Point with one scalar coordinate per variable.
    pub fn scalars(values: &[f64]) -> Self {
        Self { blocks: values.iter().map(|&v| vec![v]).collect() }
    }

    pub fn blocks(&self) -> &[Vec<f64>] {
        &self.blocks
    }

    pub fn conforms(&self, shape: &SpaceShape) -> bool {
        self.blocks.len() == shape.n() && self.blocks.iter().zip(shape.dims()).all(|(b, &d)| b.len() == d)
    }

    pub fn flatten(&self) -> Vec<f64> {
        self.blocks.iter().flatten().copied().collect()
    }

    pub fn from_flat(shape: &SpaceShape, coords: &[f64]) -> Self {
        Self { blocks: (0..shape.n()).map(|i| shape.block(coords, i).to_vec()).collect() }
    }
}

/// One weighted support point, coordinates flattened block after block.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub coords: Vec<f64>,
    pub weight: f64,
}

#[inline]
fn canonical_bits(x: f64) -> u64 {
    if x == 0.0 {
        0
    } else {
        x.to_bits()
    }
}

/// Accumulates weighted flattened points, merging bitwise-equal ones.
#[derive(Debug, Clone)]
pub(crate) struct MeasureBuilder {
    shape: SpaceShape,
    map: BTreeMap<Vec<u64>, f64>,
}

impl MeasureBuilder {
    pub(crate) fn new(shape: SpaceShape) -> Self {
        Self { shape, map: BTreeMap::new() }
    }

    #[inline]
    pub(crate) fn add(&mut self, coords: &[f64], weight: f64) {
        debug_assert_eq!(coords.len(), self.shape.total_dim());
        let key: Vec<u64> = coords.iter().map(|&x| canonical_bits(x)).collect();
        *self.map.entry(key).or_insert(0.0) += weight;
    }

    pub(crate) fn add_measure(&mut self, scale: f64, mu: &DiscreteMeasure) {
        for atom in &mu.atoms {
            self.add(&atom.coords, scale * atom.weight);
        }
    }

    pub(crate) fn finish(self) -> DiscreteMeasure {
        let atoms = self
            .map
            .into_iter()
            .filter(|(_, w)| *w != 0.0)
            .map(|(key, weight)| Atom { coords: key.into_iter().map(f64::from_bits).collect(), weight })
            .collect();
        DiscreteMeasure { shape: self.shape, atoms }
    }
}

/// A finitely supported signed measure on a product space.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    shape: SpaceShape,
    atoms: Vec<Atom>,
}

impl DiscreteMeasure {
    /// The zero measure.
    pub fn empty(shape: SpaceShape) -> Self {
        Self { shape, atoms: Vec::new() }
    }

    /// Builds a measure from weighted points, summing duplicates.
    pub fn from_atoms(shape: SpaceShape, pairs: impl IntoIterator<Item = (ProductPoint, f64)>) -> Result<Self> {
        let mut builder = MeasureBuilder::new(shape.clone());
        for (point, weight) in pairs {
            if !point.conforms(&shape) {
                return Err(Error::Shape(format!(
                    "point with block lengths {:?} does not fit dims {:?}",
                    point.blocks.iter().map(Vec::len).collect::<Vec<_>>(),
                    shape.dims()
                )));
            }
            let coords = point.flatten();
            if coords.iter().any(|x| !x.is_finite()) || !weight.is_finite() {
                return Err(Error::Input("coordinates and weights must be finite".into()));
            }
            builder.add(&coords, weight);
        }
        Ok(builder.finish())
    }

    /// Same as [`from_atoms`](Self::from_atoms) with already flattened points.
    pub fn from_flat(shape: SpaceShape, pairs: impl IntoIterator<Item = (Vec<f64>, f64)>) -> Result<Self> {
        let mut builder = MeasureBuilder::new(shape.clone());
        for (coords, weight) in pairs {
            if coords.len() != shape.total_dim() {
                return Err(Error::Shape(format!(
                    "flattened point of length {} does not fit dims {:?}",
                    coords.len(),
                    shape.dims()
                )));
            }
            if coords.iter().any(|x| !x.is_finite()) || !weight.is_finite() {
                return Err(Error::Input("coordinates and weights must be finite".into()));
            }
            builder.add(&coords, weight);
        }
        Ok(builder.finish())
    }

    /// Unit point mass `δ_x`.
    pub fn dirac(shape: SpaceShape, point: ProductPoint) -> Result<Self> {
        Self::from_atoms(shape, [(point, 1.0)])
    }

    pub fn shape(&self) -> &SpaceShape {
        &self.shape
    }

    pub fn n(&self) -> usize {
        self.shape.n()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    /// `Σ |w|`.
    pub fn total_variation(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight.abs()).sum()
    }

    pub fn max_abs_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight.abs()).fold(0.0, f64::max)
    }

    /// Weight of the atom at `point`, zero if absent.
    pub fn weight_at(&self, point: &ProductPoint) -> f64 {
        let key: Vec<u64> = point.flatten().iter().map(|&x| canonical_bits(x)).collect();
        self.atoms
            .binary_search_by(|a| a.coords.iter().map(|&x| canonical_bits(x)).cmp(key.iter().copied()))
            .map(|i| self.atoms[i].weight)
            .unwrap_or(0.0)
    }

    /// `∫ f dμ`.
    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.atoms.iter().map(|a| a.weight * f(&a.coords)).sum()
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::Shape(format!(
                "measures live on different spaces: {:?} vs {:?}",
                self.shape.dims(),
                other.shape.dims()
            )));
        }
        Ok(())
    }

    /// `a μ + b ν`.
    pub fn combine(a: f64, mu: &Self, b: f64, nu: &Self) -> Result<Self> {
        mu.same_shape(nu)?;
        let mut builder = MeasureBuilder::new(mu.shape.clone());
        builder.add_measure(a, mu);
        builder.add_measure(b, nu);
        Ok(builder.finish())
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut builder = MeasureBuilder::new(self.shape.clone());
        builder.add_measure(c, self);
        builder.finish()
    }

    /// Pushes the measure forward onto the variables `vars`, in that order.
    /// Indices must be distinct and in range; this is not checked here.
    pub(crate) fn project(&self, vars: &[usize]) -> Self {
        let shape = self.shape.select(vars).expect("projection onto a nonempty variable list");
        let mut builder = MeasureBuilder::new(shape);
        let mut buf = Vec::with_capacity(builder.shape.total_dim());
        for atom in &self.atoms {
            buf.clear();
            for &i in vars {
                buf.extend_from_slice(self.shape.block(&atom.coords, i));
            }
            builder.add(&buf, atom.weight);
        }
        builder.finish()
    }

    /// Marginal onto the variable subset `keep` (0-based, listed in any order);
    /// the result keeps the variables in increasing index order.
    pub fn marginal(&self, keep: &[usize]) -> Result<Self> {
        let vars: Vec<usize> = keep.iter().copied().sorted_unstable().dedup().collect();
        if vars.is_empty() {
            return Err(Error::Index("marginal needs at least one variable".into()));
        }
        if let Some(&bad) = vars.iter().find(|&&i| i >= self.n()) {
            return Err(Error::Index(format!("variable index {bad} out of range for n = {}", self.n())));
        }
        Ok(self.project(&vars))
    }

    /// Product measure `μ_1 × … × μ_m`; the shapes are concatenated.
    pub fn product(factors: &[Self]) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Arity("product of an empty factor list".into()));
        }
        let shape = SpaceShape::concat(factors.iter().map(|f| &f.shape))?;
        let mut builder = MeasureBuilder::new(shape);
        if factors.iter().any(|f| f.is_empty()) {
            return Ok(builder.finish());
        }
        let mut buf = Vec::with_capacity(builder.shape.total_dim());
        for combo in factors.iter().map(|f| f.atoms.iter()).multi_cartesian_product() {
            buf.clear();
            let mut w = 1.0;
            for atom in combo {
                buf.extend_from_slice(&atom.coords);
                w *= atom.weight;
            }
            builder.add(&buf, w);
        }
        Ok(builder.finish())
    }

    /// Product of measures living on disjoint variable groups, reassembled
    /// into the variable order `0..n`. `parts[i]` holds the sorted variable list
    /// of `factors[i]`; the lists must partition `0..n`.
    pub(crate) fn product_on(shape: &SpaceShape, parts: &[(&[usize], &Self)]) -> Self {
        let mut builder = MeasureBuilder::new(shape.clone());
        if parts.iter().any(|(_, f)| f.is_empty()) {
            return builder.finish();
        }
        let mut buf = vec![0.0; shape.total_dim()];
        for combo in parts.iter().map(|(_, f)| f.atoms.iter()).multi_cartesian_product() {
            let mut w = 1.0;
            for ((vars, factor), atom) in parts.iter().zip(&combo) {
                for (pos, &v) in vars.iter().enumerate() {
                    let src = factor.shape.block(&atom.coords, pos);
                    let start = shape.offsets[v];
                    buf[start..start + src.len()].copy_from_slice(src);
                }
                w *= atom.weight;
            }
            builder.add(&buf, w);
        }
        builder.finish()
    }

    /// Whether every marginal onto at most `k - 1` variables vanishes, together
    /// with the total mass when `k >= 1`. Every `μ` belongs to `M_0`.
    pub fn is_member_mk(&self, k: usize) -> Result<bool> {
        let n = self.n();
        if k > n {
            return Err(Error::Arity(format!("order k = {k} exceeds n = {n}")));
        }
        if n > MAX_MEMBERSHIP_VARS {
            return Err(Error::Arity(format!("membership test supports n <= {MAX_MEMBERSHIP_VARS}, got {n}")));
        }
        if k == 0 {
            return Ok(true);
        }
        if self.total_mass().abs() > MARGINAL_TOL {
            return Ok(false);
        }
        for size in 1..k {
            for vars in (0..n).combinations(size) {
                if self.project(&vars).max_abs_weight() > MARGINAL_TOL {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Jordan decomposition `μ = μ⁺ − μ⁻` into nonnegative parts with disjoint supports.
    pub fn hahn_jordan(&self) -> (Self, Self) {
        let split = |positive: bool| Self {
            shape: self.shape.clone(),
            atoms: self
                .atoms
                .iter()
                .filter(|a| (a.weight > 0.0) == positive)
                .map(|a| Atom { coords: a.coords.clone(), weight: a.weight.abs() })
                .collect(),
        };
        (split(true), split(false))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn line() -> SpaceShape {
        SpaceShape::uniform(1, 1).unwrap()
    }

    fn diff(a: f64, b: f64) -> DiscreteMeasure {
        DiscreteMeasure::from_atoms(line(), [(ProductPoint::scalars(&[a]), 1.0), (ProductPoint::scalars(&[b]), -1.0)])
            .unwrap()
    }

    #[test]
    fn from_atoms_merges_and_drops() {
        let shape = SpaceShape::uniform(2, 1).unwrap();
        let p = ProductPoint::scalars(&[1.0, 2.0]);
        let q = ProductPoint::scalars(&[3.0, -0.0]);
        let cancelled = DiscreteMeasure::from_atoms(shape.clone(), [(p.clone(), 1.0), (p.clone(), -1.0)]).unwrap();
        assert!(cancelled.is_empty());

        let two = DiscreteMeasure::from_atoms(shape.clone(), [(p.clone(), 0.5), (q.clone(), 0.5)]).unwrap();
        assert_eq!(two.len(), 2);
        assert_eq!(two.total_mass(), 1.0);

        let signed = DiscreteMeasure::from_atoms(shape.clone(), [(p.clone(), 2.0), (q.clone(), -1.0)]).unwrap();
        assert_eq!(signed.total_mass(), 1.0);
        // -0.0 and +0.0 name the same atom
        assert_eq!(signed.weight_at(&ProductPoint::scalars(&[3.0, 0.0])), -1.0);

        let bad = DiscreteMeasure::from_atoms(shape, [(ProductPoint::scalars(&[1.0]), 1.0)]);
        assert!(matches!(bad, Err(Error::Shape(_))));
    }

    #[test]
    fn combine_examples() {
        let shape = SpaceShape::uniform(2, 1).unwrap();
        let p = DiscreteMeasure::dirac(shape.clone(), ProductPoint::scalars(&[0.0, 1.0])).unwrap();
        let q = DiscreteMeasure::dirac(shape.clone(), ProductPoint::scalars(&[2.0, 1.0])).unwrap();
        assert!(DiscreteMeasure::combine(1.0, &p, -1.0, &p).unwrap().is_empty());
        let doubled = DiscreteMeasure::combine(2.0, &p, 0.0, &q).unwrap();
        assert_eq!(doubled, p.scaled(2.0));
        let sum = DiscreteMeasure::combine(1.0, &p, 1.0, &q).unwrap();
        assert_eq!(sum.len(), 2);
        let other = DiscreteMeasure::empty(line());
        assert!(matches!(DiscreteMeasure::combine(1.0, &p, 1.0, &other), Err(Error::Shape(_))));
    }

    #[test]
    fn marginal_examples() {
        let shape = SpaceShape::new(vec![1, 2]).unwrap();
        let x = ProductPoint::new(vec![vec![1.5], vec![0.0, 2.0]]);
        let delta = DiscreteMeasure::dirac(shape, x).unwrap();
        let m = delta.marginal(&[0]).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m.atoms()[0].coords, vec![1.5]);
        assert!(matches!(delta.marginal(&[]), Err(Error::Index(_))));
        assert!(matches!(delta.marginal(&[2]), Err(Error::Index(_))));

        let p1 = DiscreteMeasure::from_flat(line(), [(vec![0.0], 0.25), (vec![1.0], 0.75)]).unwrap();
        let p2 = DiscreteMeasure::from_flat(line(), [(vec![4.0], 0.5), (vec![5.0], 0.5)]).unwrap();
        let joint = DiscreteMeasure::product(&[p1, p2.clone()]).unwrap();
        assert_eq!(joint.marginal(&[1]).unwrap(), p2);
    }

    #[test]
    fn product_examples() {
        let sq = DiscreteMeasure::product(&[diff(0.0, 1.0), diff(0.0, 1.0)]).unwrap();
        assert_eq!(sq.len(), 4);
        let mut weights: Vec<f64> = sq.atoms().iter().map(|a| a.weight).collect();
        weights.sort_by(f64::total_cmp);
        assert_eq!(weights, vec![-1.0, -1.0, 1.0, 1.0]);
        assert_eq!(sq.weight_at(&ProductPoint::scalars(&[1.0, 1.0])), 1.0);

        let with_empty = DiscreteMeasure::product(&[diff(0.0, 1.0), DiscreteMeasure::empty(line())]).unwrap();
        assert!(with_empty.is_empty());
        assert_eq!(with_empty.n(), 2);

        let cube = DiscreteMeasure::product(&[diff(0.0, 1.0), diff(2.0, 3.0), diff(4.0, 5.0)]).unwrap();
        assert_eq!(cube.len(), 8);
        assert!(matches!(DiscreteMeasure::product(&[]), Err(Error::Arity(_))));
    }

    #[test]
    fn membership_examples() {
        let shape = SpaceShape::uniform(3, 1).unwrap();
        let delta = DiscreteMeasure::dirac(shape, ProductPoint::scalars(&[1.0, 2.0, 3.0])).unwrap();
        assert!(!delta.is_member_mk(1).unwrap());
        assert!(delta.is_member_mk(0).unwrap());

        let prod = DiscreteMeasure::product(&[diff(0.0, 1.0), diff(0.5, 2.0), diff(-1.0, 1.0)]).unwrap();
        for k in 0..=3 {
            assert!(prod.is_member_mk(k).unwrap());
        }
        assert!(matches!(prod.is_member_mk(4), Err(Error::Arity(_))));
    }

    #[test]
    fn hahn_jordan_examples() {
        let mu = DiscreteMeasure::from_flat(line(), [(vec![0.0], 2.0), (vec![1.0], -1.0)]).unwrap();
        let (pos, neg) = mu.hahn_jordan();
        assert_eq!(pos, DiscreteMeasure::from_flat(line(), [(vec![0.0], 2.0)]).unwrap());
        assert_eq!(neg, DiscreteMeasure::from_flat(line(), [(vec![1.0], 1.0)]).unwrap());

        let (p, q) = DiscreteMeasure::empty(line()).hahn_jordan();
        assert!(p.is_empty() && q.is_empty());
        let (p, q) = diff(3.0, 3.0).hahn_jordan();
        assert!(p.is_empty() && q.is_empty());
    }

    fn small_measure(n: usize) -> impl Strategy<Value = DiscreteMeasure> {
        prop::collection::vec((prop::collection::vec(0i32..3, n), -2.0f64..2.0), 1..12).prop_map(move |pairs| {
            DiscreteMeasure::from_flat(
                SpaceShape::uniform(n, 1).unwrap(),
                pairs.into_iter().map(|(c, w)| (c.into_iter().map(f64::from).collect(), w)),
            )
            .unwrap()
        })
    }

    fn single_var() -> impl Strategy<Value = (DiscreteMeasure, bool)> {
        (prop::collection::vec(-1.0f64..1.0, 1..4), any::<bool>()).prop_map(|(ws, centred)| {
            let mut pairs: Vec<(Vec<f64>, f64)> =
                ws.iter().enumerate().map(|(i, &w)| (vec![i as f64], w + 0.01_f64.copysign(w))).collect();
            if centred {
                let mass: f64 = pairs.iter().map(|p| p.1).sum();
                pairs.push((vec![10.0], -mass));
            } else {
                pairs.push((vec![10.0], 1.0 - pairs.iter().map(|p| p.1).sum::<f64>()));
            }
            (DiscreteMeasure::from_flat(line(), pairs).unwrap(), centred)
        })
    }

    proptest! {
        #[test]
        fn marginal_consistency(mu in small_measure(4), g in prop::sample::subsequence(vec![0usize, 1, 2, 3], 1..=4), h_mask in 1u8..16) {
            let inner = mu.marginal(&g).unwrap();
            let h: Vec<usize> = (0..g.len()).filter(|i| h_mask >> i & 1 == 1).collect();
            prop_assume!(!h.is_empty());
            let composed: Vec<usize> = h.iter().map(|&i| g[i]).collect();
            let lhs = inner.marginal(&h).unwrap();
            let rhs = mu.marginal(&composed).unwrap();
            prop_assert!(DiscreteMeasure::combine(1.0, &lhs, -1.0, &rhs).unwrap().max_abs_weight() <= 1e-12);
        }

        #[test]
        fn pigeonhole_membership(factors in prop::collection::vec(single_var(), 1..=4)) {
            let centred = factors.iter().filter(|f| f.1).count();
            let measures: Vec<DiscreteMeasure> = factors.into_iter().map(|f| f.0).collect();
            let prod = DiscreteMeasure::product(&measures).unwrap();
            for k in 0..=centred {
                prop_assert!(prod.is_member_mk(k).unwrap());
            }
        }

        #[test]
        fn nesting(mu in small_measure(3)) {
            for k in (1..=3).rev() {
                if mu.is_member_mk(k).unwrap() {
                    for j in 0..=k {
                        prop_assert!(mu.is_member_mk(j).unwrap());
                    }
                }
            }
        }

        #[test]
        fn functional_nullity(factors in prop::collection::vec(single_var(), 3), a in -2.0f64..2.0, b in -2.0f64..2.0) {
            let centred = factors.iter().filter(|f| f.1).count();
            let measures: Vec<DiscreteMeasure> = factors.into_iter().map(|f| f.0).collect();
            let prod = DiscreteMeasure::product(&measures).unwrap();
            // test functions that read at most k - 1 = centred - 1 variables
            if centred >= 2 {
                let f = |x: &[f64]| (a * x[0]).sin() + b * x[0] * x[0];
                prop_assert!(prod.integrate(f).abs() <= 1e-12);
            }
            if centred >= 3 {
                let f = |x: &[f64]| (a * x[0] + b * x[2]).cos() * x[2];
                prop_assert!(prod.integrate(f).abs() <= 1e-12);
            }
        }

        #[test]
        fn hahn_jordan_reconstructs(mu in small_measure(2)) {
            let (pos, neg) = mu.hahn_jordan();
            prop_assert!(pos.atoms().iter().all(|a| a.weight > 0.0));
            prop_assert!(neg.atoms().iter().all(|a| a.weight > 0.0));
            prop_assert_eq!(DiscreteMeasure::combine(1.0, &pos, -1.0, &neg).unwrap(), mu);
        }
    }
}
