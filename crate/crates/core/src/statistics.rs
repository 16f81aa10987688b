//! Signed quadratic-form energies `(-1)^k ∬ g dμ dμ`, empirical interaction
//! statistics and permutation p-values.

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interactions::{lancaster_general, streitberg, InteractionOrder, MAX_STREITBERG_N};
use crate::kernels::{CompiledKernel, Factor, KernelSpec, ProductTerm};
use crate::measures::{DiscreteMeasure, MeasureBuilder, ProductPoint, SpaceShape};
use crate::symfun::layer_coefficient;

/// Relative tolerance of the nonnegativity check, scaled by `(Σ|w|)²`.
pub const ENERGY_TOL: f64 = 1e-9;

/// Atom count above which the interaction energy is expanded into marginal
/// cross-terms whenever the kernel allows it.
pub const CROSS_TERM_THRESHOLD: usize = 50_000;

/// Atom count above which direct materialization is refused.
pub const MAX_DIRECT_ATOMS: usize = 5_000_000;

/// `1e-9 · (Σ|w|)²`, the tolerance below zero allowed for a PDI energy.
pub fn energy_tolerance(mu: &DiscreteMeasure) -> f64 {
    ENERGY_TOL * mu.total_variation().powi(2)
}

/// `m` observations on a product space.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    shape: SpaceShape,
    rows: Vec<Vec<f64>>,
}

impl Sample {
    pub fn new(shape: SpaceShape, rows: &[ProductPoint]) -> Result<Self> {
        if let Some(i) = rows.iter().position(|r| !r.conforms(&shape)) {
            return Err(Error::Shape(format!("row {} does not fit dims {:?}", i + 1, shape.dims())));
        }
        Self::from_flat(shape, rows.iter().map(ProductPoint::flatten).collect())
    }

    /// Rows given as flattened coordinate vectors.
    pub fn from_flat(shape: SpaceShape, rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Input("a sample needs at least one row".into()));
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != shape.total_dim() {
                return Err(Error::Shape(format!(
                    "row {} has {} values, expected {}",
                    i + 1,
                    r.len(),
                    shape.total_dim()
                )));
            }
            if r.iter().any(|x| !x.is_finite()) {
                return Err(Error::Input(format!("row {} has a non-finite value", i + 1)));
            }
        }
        Ok(Self { shape, rows })
    }

    pub fn shape(&self) -> &SpaceShape {
        &self.shape
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Empirical probability with weight `1/m` on every row.
    pub fn empirical(&self) -> DiscreteMeasure {
        let w = 1.0 / self.m() as f64;
        let mut builder = MeasureBuilder::new(self.shape.clone());
        for r in &self.rows {
            builder.add(r, w);
        }
        builder.finish()
    }

    /// The sample after replacing variable `i` of row `a` by variable `i` of row `perms[i][a]`.
    fn permuted(&self, perms: &[Vec<usize>]) -> Self {
        let rows = (0..self.m())
            .map(|a| {
                let mut row = Vec::with_capacity(self.shape.total_dim());
                for (i, perm) in perms.iter().enumerate() {
                    row.extend_from_slice(self.shape.block(&self.rows[perm[a]], i));
                }
                row
            })
            .collect();
        Self { shape: self.shape.clone(), rows }
    }
}

/// Which interaction measure a statistic is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `Λ_k^n[P]` with the default product reference.
    Lancaster,
    /// `Σ[P]`, requires `k = n`.
    Streitberg,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Lancaster => "lancaster",
            Mode::Streitberg => "streitberg",
        })
    }
}

/// How an energy was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    /// Double sum over the materialized atoms.
    Direct,
    /// Expansion into per-variable Gram averages of the sample rows.
    Cross,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub statistic: f64,
    pub order: usize,
    pub mode: Mode,
    pub kernel: String,
    /// Atoms of the interaction measure for the direct route, distinct sample rows otherwise.
    pub atoms: usize,
    pub route: Route,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub permutations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn sign(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `(-1)^k Σ_{u,v} w_u w_v g(‖u_1 - v_1‖², …, ‖u_n - v_n‖²)` for an arbitrary `g`.
pub fn energy_with<G>(g: G, mu: &DiscreteMeasure, k: usize) -> f64
where
    G: Fn(&[f64]) -> f64 + Sync,
{
    let shape = mu.shape();
    let atoms = mu.atoms();
    let n = shape.n();
    let partial: Vec<f64> = (0..atoms.len())
        .into_par_iter()
        .map(|a| {
            let mut t = vec![0.0; n];
            let u = &atoms[a];
            shape.squared_distances(&u.coords, &u.coords, &mut t);
            let mut acc = 0.5 * u.weight * g(&t);
            for v in &atoms[a + 1..] {
                shape.squared_distances(&u.coords, &v.coords, &mut t);
                acc += v.weight * g(&t);
            }
            2.0 * u.weight * acc
        })
        .collect();
    sign(k) * partial.iter().sum::<f64>()
}

fn check_energy_args(kernel: &CompiledKernel, mu: &DiscreteMeasure, k: usize) -> Result<()> {
    if k != kernel.order() {
        return Err(Error::Arity(format!("energy of order {k} requested for a kernel of order {}", kernel.order())));
    }
    if mu.n() != kernel.n() {
        return Err(Error::Shape(format!("measure on {} variables, kernel on {}", mu.n(), kernel.n())));
    }
    Ok(())
}

/// `(-1)^k ∬ g dμ dμ`; `k` must be the order of the kernel.
pub fn quadratic_energy(spec: &KernelSpec, mu: &DiscreteMeasure, k: usize) -> Result<f64> {
    let kernel = spec.compile()?;
    check_energy_args(&kernel, mu, k)?;
    Ok(energy_with(|t| kernel.eval_unchecked(t), mu, k))
}

/// Per-variable kernel matrices of one factor over the distinct rows.
struct FactorGram {
    var: usize,
    factor: Factor,
    matrix: Vec<f64>,
    row_mean: Vec<f64>,
    grand_mean: f64,
}

/// Energy of `Λ_k^n[P]` (default reference) written through the rows of `P`:
/// `Λ = Σ_F c_F P_F × ⨉_{i∉F} P_i`, and each product term of the kernel turns
/// `∬ ∏ h_i d(P_F × …) d(P_G × …)` into sums over pairs of rows where only the
/// variables in `F ∩ G` are shared.
fn lancaster_energy_cross(p: &DiscreteMeasure, order: InteractionOrder, terms: &[ProductTerm]) -> f64 {
    let (n, k) = (order.n(), order.k());
    let shape = p.shape();
    let atoms = p.atoms();
    let m = atoms.len();
    let w: Vec<f64> = atoms.iter().map(|a| a.weight).collect();

    let full: u32 = (1u32 << n) - 1;
    let mut components: Vec<(f64, u32)> = vec![(1.0, full)];
    let mut product_coef = layer_coefficient(n, k, 0);
    if k >= 2 {
        product_coef += n as f64 * layer_coefficient(n, k, 1);
    }
    components.push((product_coef, 0));
    for j in 2..k {
        let c = layer_coefficient(n, k, j);
        for f in itertools::Itertools::combinations(0..n, j) {
            components.push((c, f.iter().fold(0, |mask, i| mask | 1 << i)));
        }
    }

    let mut grams: Vec<FactorGram> = Vec::new();
    for term in terms {
        for &(var, factor) in &term.factors {
            if grams.iter().any(|g| g.var == var && g.factor == factor) {
                continue;
            }
            let matrix: Vec<f64> = (0..m)
                .into_par_iter()
                .flat_map_iter(|a| {
                    let x = shape.block(&atoms[a].coords, var);
                    (0..m).map(move |b| {
                        let y = shape.block(&atoms[b].coords, var);
                        factor.eval(x.iter().zip(y).map(|(u, v)| (u - v) * (u - v)).sum())
                    })
                })
                .collect();
            let row_mean: Vec<f64> = (0..m).map(|a| (0..m).map(|b| w[b] * matrix[a * m + b]).sum()).collect();
            let grand_mean = (0..m).map(|a| w[a] * row_mean[a]).sum();
            grams.push(FactorGram { var, factor, matrix, row_mean, grand_mean });
        }
    }

    let c = components.len();
    let work: Vec<(usize, usize, usize)> =
        (0..terms.len()).flat_map(|t| (0..c * c).map(move |fg| (t, fg / c, fg % c))).collect();
    let values: Vec<f64> = work
        .par_iter()
        .map(|&(t, fi, gi)| {
            let term = &terms[t];
            let (cf, f) = components[fi];
            let (cg, g) = components[gi];
            let mut constant = term.coef * cf * cg;
            let mut alpha = w.clone();
            let mut beta = w.clone();
            let mut shared: Vec<&FactorGram> = Vec::new();
            for &(var, factor) in &term.factors {
                let gram = grams.iter().find(|x| x.var == var && x.factor == factor).expect("gram computed above");
                match (f >> var & 1 == 1, g >> var & 1 == 1) {
                    (true, true) => shared.push(gram),
                    (true, false) => alpha.iter_mut().zip(&gram.row_mean).for_each(|(a, r)| *a *= r),
                    (false, true) => beta.iter_mut().zip(&gram.row_mean).for_each(|(b, r)| *b *= r),
                    (false, false) => constant *= gram.grand_mean,
                }
            }
            if shared.is_empty() {
                return constant * alpha.iter().sum::<f64>() * beta.iter().sum::<f64>();
            }
            let mut total = 0.0;
            for a in 0..m {
                let mut row = 0.0;
                for b in 0..m {
                    let mut prod = beta[b];
                    for s in &shared {
                        prod *= s.matrix[a * m + b];
                    }
                    row += prod;
                }
                total += alpha[a] * row;
            }
            constant * total
        })
        .collect();
    sign(k) * values.iter().sum::<f64>()
}

/// Upper bound on the atom count of `Λ_k^n[P]` with the default reference.
fn lancaster_atom_bound(p: &DiscreteMeasure, order: InteractionOrder) -> f64 {
    let n = order.n();
    let singles: Vec<f64> = (0..n).map(|i| p.project(&[i]).len() as f64).collect();
    let product: f64 = singles.iter().product();
    let mut bound = p.len() as f64 + product;
    for j in 2..order.k() {
        for f in itertools::Itertools::combinations(0..n, j) {
            let rest: f64 = (0..n).filter(|i| !f.contains(i)).map(|i| singles[i]).product();
            bound += (p.len() as f64).min(f.iter().map(|&i| singles[i]).product()) * rest;
        }
    }
    bound
}

fn energy_report_parts(
    p: &DiscreteMeasure,
    k: usize,
    kernel: &CompiledKernel,
    mode: Mode,
) -> Result<(f64, usize, Route)> {
    let n = p.n();
    if kernel.n() != n {
        return Err(Error::Shape(format!("sample has {n} variables, kernel has {}", kernel.n())));
    }
    if k != kernel.order() {
        return Err(Error::Arity(format!("order {k} requested for a kernel of order {}", kernel.order())));
    }
    match mode {
        Mode::Streitberg => {
            if k != n || n > MAX_STREITBERG_N {
                return Err(Error::Arity(format!(
                    "streitberg mode needs k = n <= {MAX_STREITBERG_N}, got k = {k}, n = {n}"
                )));
            }
            let sigma = streitberg(p)?;
            Ok((energy_with(|t| kernel.eval_unchecked(t), &sigma, k), sigma.len(), Route::Direct))
        }
        Mode::Lancaster => {
            let order = InteractionOrder::new(n, k)?;
            let bound = lancaster_atom_bound(p, order);
            let terms = kernel.product_terms();
            let use_cross = terms.as_ref().is_some_and(|terms| {
                let components = 2.0 + (2..k).map(|j| crate::symfun::binom_f64(n, j)).sum::<f64>();
                let rows = p.len() as f64;
                let cross_cost = terms.len() as f64 * components * components * rows * rows * n as f64;
                let direct_cost = bound * bound * n as f64 * 0.5;
                bound > CROSS_TERM_THRESHOLD as f64 || cross_cost < direct_cost
            });
            if use_cross {
                let terms = terms.expect("checked above");
                return Ok((lancaster_energy_cross(p, order, &terms), p.len(), Route::Cross));
            }
            if bound > MAX_DIRECT_ATOMS as f64 {
                return Err(Error::Input(format!(
                    "the interaction measure may have {bound:.0} atoms and the kernel does not split into product terms"
                )));
            }
            let lambda = lancaster_general(p, None, order)?;
            Ok((energy_with(|t| kernel.eval_unchecked(t), &lambda, k), lambda.len(), Route::Direct))
        }
    }
}

/// Energy of the interaction measure of a probability `p`.
pub fn interaction_energy(p: &DiscreteMeasure, k: usize, spec: &KernelSpec, mode: Mode) -> Result<EnergyReport> {
    let kernel = spec.compile()?;
    let (statistic, atoms, route) = energy_report_parts(p, k, &kernel, mode)?;
    Ok(EnergyReport {
        statistic,
        order: k,
        mode,
        kernel: spec.describe(),
        atoms,
        route,
        p_value: None,
        permutations: None,
        seed: None,
    })
}

/// Energy of `Λ_k^n[P̂]` or `Σ[P̂]` for the empirical probability of a sample.
pub fn interaction_statistic(sample: &Sample, k: usize, spec: &KernelSpec, mode: Mode) -> Result<EnergyReport> {
    interaction_energy(&sample.empirical(), k, spec, mode)
}

/// Permutation p-value `(1 + #{permuted >= observed}) / (B + 1)`. Each
/// replicate permutes every variable's column independently, using a
/// ChaCha8 generator seeded with `seed` on stream `b` for replicate `b`.
pub fn permutation_pvalue(
    sample: &Sample,
    k: usize,
    spec: &KernelSpec,
    mode: Mode,
    permutations: usize,
    seed: u64,
) -> Result<EnergyReport> {
    if permutations == 0 {
        return Err(Error::Arity("at least one permutation is required".into()));
    }
    if sample.m() < 2 {
        return Err(Error::Input("permutation test needs at least two rows".into()));
    }
    let kernel = spec.compile()?;
    let mut report = interaction_statistic(sample, k, spec, mode)?;
    let n = sample.shape().n();
    let m = sample.m();
    let replicates: Vec<f64> = (0..permutations)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let perms: Vec<Vec<usize>> = (0..n)
                .map(|_| {
                    let mut perm: Vec<usize> = (0..m).collect();
                    perm.shuffle(&mut rng);
                    perm
                })
                .collect();
            let shuffled = sample.permuted(&perms).empirical();
            energy_report_parts(&shuffled, k, &kernel, mode).map(|r| r.0)
        })
        .collect::<Result<_>>()?;
    let exceed = replicates.iter().filter(|&&s| s >= report.statistic).count();
    report.p_value = Some((1 + exceed) as f64 / (permutations + 1) as f64);
    report.permutations = Some(permutations);
    report.seed = Some(seed);
    Ok(report)
}
