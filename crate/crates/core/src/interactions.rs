//! Interaction measures: the `μ_k^n` witnesses, the generalized Lancaster
//! interaction `Λ_k^n[P, Q]`, the Streitberg interaction and the factor witness.

use itertools::Itertools;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measures::{DiscreteMeasure, MeasureBuilder, ProductPoint, SpaceShape};
use crate::partitions::{ensure_probability, factor_unchecked, streitberg_coefficient, PartitionIter};
use crate::symfun::layer_coefficient;

/// Largest variable count accepted by [`InteractionOrder`].
pub const MAX_VARS: usize = 16;

/// Largest variable count accepted by [`streitberg`].
pub const MAX_STREITBERG_N: usize = 10;

/// Relative tolerance used to classify a factor as having zero total mass.
pub const ZERO_MASS_TOL: f64 = 1e-12;

/// Pair `(n, k)` with `1 <= k <= n <= 16`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct InteractionOrder {
    n: usize,
    k: usize,
}

impl InteractionOrder {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n == 0 || n > MAX_VARS {
            return Err(Error::Arity(format!("variable count must be in 1..={MAX_VARS}, got {n}")));
        }
        if k == 0 || k > n {
            return Err(Error::Arity(format!("order k must be in 1..={n}, got {k}")));
        }
        Ok(Self { n, k })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

/// Subsets of `0..n` of size `j`, as sorted index lists.
fn subsets(n: usize, j: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..n).combinations(j)
}

fn complement(n: usize, f: &[usize]) -> Vec<usize> {
    (0..n).filter(|i| !f.contains(i)).collect()
}

/// `μ_k^n[x, y] = δ_x + Σ_{j<k} (-1)^{k-j} C(n-j-1, n-k) Σ_{|F|=j} δ_{(x_F, y_{F^c})}`.
pub fn mu_kn(x: &ProductPoint, y: &ProductPoint, order: InteractionOrder) -> Result<DiscreteMeasure> {
    let shape = SpaceShape::new(x.blocks().iter().map(Vec::len).collect())?;
    if !y.conforms(&shape) || shape.n() != order.n() {
        return Err(Error::Shape(format!("points must share {} blocks of equal dimensions", order.n())));
    }
    let n = order.n();
    let mut builder = MeasureBuilder::new(shape);
    let (xs, ys) = (x.blocks(), y.blocks());
    let mut buf = Vec::new();
    let mut push = |f: &[usize], w: f64, builder: &mut MeasureBuilder| {
        buf.clear();
        for i in 0..n {
            buf.extend_from_slice(if f.contains(&i) { &xs[i] } else { &ys[i] });
        }
        builder.add(&buf, w);
    };
    if xs.iter().chain(ys).flatten().any(|v| !v.is_finite()) {
        return Err(Error::Input("coordinates must be finite".into()));
    }
    push(&(0..n).collect::<Vec<_>>(), 1.0, &mut builder);
    for j in 0..order.k() {
        let c = layer_coefficient(n, order.k(), j);
        for f in subsets(n, j) {
            push(&f, c, &mut builder);
        }
    }
    Ok(builder.finish())
}

fn check_order(p: &DiscreteMeasure, order: InteractionOrder) -> Result<()> {
    if p.n() != order.n() {
        return Err(Error::Shape(format!("measure on {} variables, order built for n = {}", p.n(), order.n())));
    }
    Ok(())
}

/// `Λ_k^n[P, Q] = P + Σ_{j<k} (-1)^{k-j} C(n-j-1, n-k) Σ_{|F|=j} P_F × Q_{F^c}`.
///
/// `q = None` takes `Q = ⨉ P_i`. An explicit `Q` is accepted as defined, but only
/// the default has an established statistical reading.
pub fn lancaster_general(
    p: &DiscreteMeasure,
    q: Option<&DiscreteMeasure>,
    order: InteractionOrder,
) -> Result<DiscreteMeasure> {
    ensure_probability(p)?;
    check_order(p, order)?;
    let (n, k) = (order.n(), order.k());
    let shape = p.shape().clone();
    let mut builder = MeasureBuilder::new(shape.clone());
    builder.add_measure(1.0, p);

    match q {
        Some(q) => {
            ensure_probability(q)?;
            if q.shape() != p.shape() {
                return Err(Error::Shape("P and Q live on different spaces".into()));
            }
            for j in 0..k {
                let c = layer_coefficient(n, k, j);
                for f in subsets(n, j) {
                    if f.is_empty() {
                        builder.add_measure(c, q);
                        continue;
                    }
                    let fc = complement(n, &f);
                    let (pf, qf) = (p.project(&f), q.project(&fc));
                    let term = DiscreteMeasure::product_on(&shape, &[(&f, &pf), (&fc, &qf)]);
                    builder.add_measure(c, &term);
                }
            }
        }
        None => {
            let singles: Vec<DiscreteMeasure> = (0..n).map(|i| p.project(&[i])).collect();
            let vars: Vec<[usize; 1]> = (0..n).map(|i| [i]).collect();
            // |F| <= 1 gives ⨉ P_i every time
            let mut product_coef = layer_coefficient(n, k, 0);
            if k >= 2 {
                product_coef += n as f64 * layer_coefficient(n, k, 1);
            }
            let full: Vec<(&[usize], &DiscreteMeasure)> = vars.iter().map(|v| v.as_slice()).zip(&singles).collect();
            builder.add_measure(product_coef, &DiscreteMeasure::product_on(&shape, &full));
            for j in 2..k {
                let c = layer_coefficient(n, k, j);
                for f in subsets(n, j) {
                    let pf = p.project(&f);
                    let mut parts: Vec<(&[usize], &DiscreteMeasure)> = vec![(&f, &pf)];
                    parts.extend((0..n).filter(|i| !f.contains(i)).map(|i| (vars[i].as_slice(), &singles[i])));
                    builder.add_measure(c, &DiscreteMeasure::product_on(&shape, &parts));
                }
            }
        }
    }
    Ok(builder.finish())
}

/// Classical Lancaster interaction `Λ[P] = Λ_n^n[P]`.
pub fn lancaster(p: &DiscreteMeasure) -> Result<DiscreteMeasure> {
    lancaster_general(p, None, InteractionOrder::new(p.n(), p.n())?)
}

/// Streitberg interaction `Σ[P] = Σ_π (-1)^{|π|-1} (|π|-1)! P_π`, for `n <= 10`.
pub fn streitberg(p: &DiscreteMeasure) -> Result<DiscreteMeasure> {
    let n = p.n();
    if n > MAX_STREITBERG_N {
        return Err(Error::Arity(format!("Streitberg interaction supports n <= {MAX_STREITBERG_N}, got {n}")));
    }
    ensure_probability(p)?;
    let mut builder = MeasureBuilder::new(p.shape().clone());
    let partitions: Vec<_> = PartitionIter::new(n).collect();
    for chunk in partitions.chunks(256) {
        let terms: Vec<(f64, DiscreteMeasure)> = chunk
            .par_iter()
            .map(|pi| Ok((streitberg_coefficient(pi) as f64, factor_unchecked(p, pi)?)))
            .collect::<Result<_>>()?;
        for (c, term) in &terms {
            builder.add_measure(*c, term);
        }
    }
    Ok(builder.finish())
}

fn normalized(mu: &DiscreteMeasure) -> DiscreteMeasure {
    mu.scaled(1.0 / mu.total_mass())
}

fn origin_mass(mu: &DiscreteMeasure) -> DiscreteMeasure {
    let dims = mu.shape().dims().to_vec();
    let point = ProductPoint::new(dims.iter().map(|&d| vec![0.0; d]).collect());
    DiscreteMeasure::dirac(mu.shape().clone(), point).expect("origin fits its own shape")
}

/// A probability `P` and `M >= 0` with `Λ_k^n[P] = M (-1)^n ⨉ μ_i`.
///
/// Each factor is a measure on a single variable. At least `max(k, 2)` factors
/// must have zero total mass (`Λ_1^n = Λ_2^n`); the first `max(k, 2)` of them
/// play the role of the centred factors in the parity construction and the rest are split by Hahn-Jordan. If some
/// factor is the zero measure the result is `M = 0` with a product probability.
pub fn witness_from_factors(factors: &[DiscreteMeasure], k: usize) -> Result<(DiscreteMeasure, f64)> {
    let n = factors.len();
    InteractionOrder::new(n, k).map_err(|e| Error::Witness(e.to_string()))?;
    if let Some(i) = factors.iter().position(|f| f.n() != 1) {
        return Err(Error::Witness(format!("factor {} lives on {} variables, expected 1", i + 1, factors[i].n())));
    }

    if factors.iter().any(DiscreteMeasure::is_empty) {
        let parts: Vec<DiscreteMeasure> = factors
            .iter()
            .map(|f| {
                if f.is_empty() {
                    origin_mass(f)
                } else {
                    let tv = f.total_variation();
                    let (pos, neg) = f.hahn_jordan();
                    DiscreteMeasure::combine(1.0 / tv, &pos, 1.0 / tv, &neg).expect("same shape")
                }
            })
            .collect();
        return Ok((DiscreteMeasure::product(&parts)?, 0.0));
    }

    // order 1 and order 2 coincide, so the construction always needs two centred factors
    let k_eff = k.max(2);
    if k_eff > n {
        return Err(Error::Witness(format!("no witness on {n} variable(s): the interaction vanishes identically")));
    }
    let centred: Vec<usize> = factors
        .iter()
        .enumerate()
        .filter(|(_, f)| f.total_mass().abs() <= ZERO_MASS_TOL * f.total_variation().max(1.0))
        .map(|(i, _)| i)
        .take(k_eff)
        .collect();
    if centred.len() < k_eff {
        return Err(Error::Witness(format!(
            "need at least {k_eff} factors with zero total mass, found {}",
            centred.len()
        )));
    }

    // components[i] = [(weight, probability); 2]; index 1 carries the minus sign
    let mut components: Vec<[(f64, DiscreteMeasure); 2]> = Vec::with_capacity(n);
    let mut d = 2f64.powi(k_eff as i32 - 1);
    let mut b_prod = 1.0;
    for (i, f) in factors.iter().enumerate() {
        let (pos, neg) = f.hahn_jordan();
        let (c1, c2) = (pos.total_mass(), neg.total_mass());
        let part = |m: DiscreteMeasure, c: f64| if c > 0.0 { normalized(&m) } else { m };
        if centred.contains(&i) {
            b_prod *= 0.5 * (c1 + c2);
            components.push([(1.0, part(pos, c1)), (1.0, part(neg, c2))]);
        } else {
            d *= c1 + c2;
            components.push([(c1, part(pos, c1)), (c2, part(neg, c2))]);
        }
    }

    let mut builder =
        MeasureBuilder::new(DiscreteMeasure::product(factors)?.shape().clone());
    for mask in 0u32..(1 << n) {
        if (mask.count_ones() as usize) % 2 != n % 2 {
            continue;
        }
        let mut w = 1.0 / d;
        let mut chosen = Vec::with_capacity(n);
        for (i, comp) in components.iter().enumerate() {
            let (c, m) = &comp[(mask >> i & 1) as usize];
            w *= c;
            chosen.push(m.clone());
        }
        if w == 0.0 {
            continue;
        }
        builder.add_measure(w, &DiscreteMeasure::product(&chosen)?);
    }
    Ok((builder.finish(), 1.0 / (2.0 * d * b_prod)))
}
