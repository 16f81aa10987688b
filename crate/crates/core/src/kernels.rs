//! Radial kernels `g(‖x_1 - y_1‖², …, ‖x_n - y_n‖²)` that are positive definite
//! on measures with vanishing lower-order marginals.
//!
//! Three families are provided through [`KernelSpec`]:
//!
//! * `product`: `∏ g_i(t_i)` with one-variable Bernstein functions `g_i`, order `n`;
//! * `orderk`: `Σ_F ψ^F(t_F) + Σ_j w_j (-1)^k E_k^n(r_j ⊙ t) p_k(r_j + 1)/p_k(r_j)`, order `k`;
//! * `sumcm`: `(-1)^ℓ ψ(t_1 + … + t_n)` with `(-1)^ℓ ψ^{(ℓ)}` completely monotone,
//!   always border-corrected, order `ℓ`.

use std::collections::BTreeMap;

use itertools::Itertools;
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interactions::MAX_VARS;
use crate::measures::{ProductPoint, SpaceShape};
use crate::symfun::{layer_coefficient, positive_count, shifted_ratio, signed_h_complement};

/// Largest number of product terms [`CompiledKernel::product_terms`] will expand to.
pub const MAX_PRODUCT_TERMS: usize = 4096;

/// Bernstein function of one variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", deny_unknown_fields)]
pub enum Bernstein1D {
    /// `1 - e^{-rate·t}`
    #[serde(rename = "exp")]
    ExpSaturating { rate: f64 },
    /// `t^exponent`, exponent in `(0, 1]`
    #[serde(rename = "power")]
    Power {
        #[serde(rename = "a")]
        exponent: f64,
    },
    /// `log(1 + t/shift)`
    #[serde(rename = "logshift")]
    LogShift {
        #[serde(rename = "c")]
        shift: f64,
    },
}

impl Bernstein1D {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Bernstein1D::ExpSaturating { rate } => rate.is_finite() && rate > 0.0,
            Bernstein1D::Power { exponent } => exponent > 0.0 && exponent <= 1.0,
            Bernstein1D::LogShift { shift } => shift.is_finite() && shift > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("invalid Bernstein parameters {self:?}")))
        }
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Bernstein1D::ExpSaturating { rate } => -(-rate * t).exp_m1(),
            Bernstein1D::Power { exponent } => {
                if exponent == 1.0 {
                    t
                } else {
                    t.powf(exponent)
                }
            }
            Bernstein1D::LogShift { shift } => (t / shift).ln_1p(),
        }
    }
}

/// Function `ψ` on `[0, ∞)` with `(-1)^ℓ ψ^{(ℓ)}` completely monotone; `ℓ` is
/// supplied by the enclosing [`SumCmSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum CmFamily {
    /// `(-1)^ℓ t^a`, `a ∈ (ℓ-1, ℓ]`
    Power {
        #[serde(rename = "a")]
        exponent: f64,
    },
    /// `(-1)^ℓ t^{ℓ-1} log t`, `ℓ >= 2`
    Log,
    /// `(-1)^ℓ (shift + t)^a`, `a ∈ (ℓ-1, ℓ]`
    ShiftPower {
        #[serde(rename = "c")]
        shift: f64,
        #[serde(rename = "a")]
        exponent: f64,
    },
    /// `e^{-rate·t}`
    Exp { rate: f64 },
}

impl CmFamily {
    pub fn validate(&self, ell: usize) -> Result<()> {
        let l = ell as f64;
        let in_band = |a: f64| a > l - 1.0 && a <= l;
        let ok = ell >= 1
            && match *self {
                CmFamily::Power { exponent } => in_band(exponent),
                CmFamily::Log => ell >= 2,
                CmFamily::ShiftPower { shift, exponent } => shift.is_finite() && shift > 0.0 && in_band(exponent),
                CmFamily::Exp { rate } => rate.is_finite() && rate > 0.0,
            };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("invalid parameters {self:?} for order {ell}")))
        }
    }

    /// `ψ(t)` for `t >= 0`; the log family is extended by its limit 0 at the origin.
    #[inline]
    pub fn eval(&self, ell: usize, t: f64) -> f64 {
        let sign = if ell % 2 == 0 { 1.0 } else { -1.0 };
        match *self {
            CmFamily::Power { exponent } => sign * t.powf(exponent),
            CmFamily::Log => {
                if t == 0.0 {
                    0.0
                } else {
                    sign * t.powi(ell as i32 - 1) * t.ln()
                }
            }
            CmFamily::ShiftPower { shift, exponent } => sign * (shift + t).powf(exponent),
            CmFamily::Exp { rate } => (-rate * t).exp(),
        }
    }
}

fn default_scale() -> f64 {
    1.0
}

fn is_unit(x: &f64) -> bool {
    *x == 1.0
}

/// `scale · ∏ g_i(t_i)`. A negative scale gives a kernel of the wrong sign,
/// which is useful for exercising the verification routines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductBernstein {
    pub parts: Vec<Bernstein1D>,
    #[serde(default = "default_scale", skip_serializing_if = "is_unit")]
    pub scale: f64,
}

impl ProductBernstein {
    pub fn new(parts: Vec<Bernstein1D>) -> Self {
        Self { parts, scale: 1.0 }
    }

    /// `∏ (1 - e^{-t_i})` on `n` variables.
    pub fn gaussian(n: usize) -> Self {
        Self::new(vec![Bernstein1D::ExpSaturating { rate: 1.0 }; n])
    }

    fn validate(&self) -> Result<()> {
        if self.parts.is_empty() || self.parts.len() > MAX_VARS {
            return Err(Error::Arity(format!("product kernel needs 1..={MAX_VARS} parts, got {}", self.parts.len())));
        }
        if !self.scale.is_finite() {
            return Err(Error::Domain("kernel scale must be finite".into()));
        }
        self.parts.iter().try_for_each(Bernstein1D::validate)
    }

    #[inline]
    fn eval(&self, t: &[f64]) -> f64 {
        self.scale * self.parts.iter().zip(t).map(|(g, &x)| g.eval(x)).product::<f64>()
    }
}

/// One atom of the mixing measure of an [`OrderKSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EtaAtom {
    pub r: Vec<f64>,
    #[serde(rename = "w")]
    pub weight: f64,
}

mod one_based {
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(vars: &[usize], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(vars.iter().map(|v| v + 1))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<usize>, D::Error> {
        let raw = Vec::<usize>::deserialize(d)?;
        raw.into_iter()
            .map(|v| v.checked_sub(1).ok_or_else(|| D::Error::custom("variable indices are 1-based")))
            .collect()
    }
}

/// Term `ψ^F(t_F) = ∏_{i ∈ F} g_i(t_i)` on a `k`-subset `F` of the variables.
/// `vars` is 0-based here and 1-based in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossTerm {
    #[serde(with = "one_based")]
    pub vars: Vec<usize>,
    pub parts: Vec<Bernstein1D>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrderKSpec {
    pub n: usize,
    pub k: usize,
    #[serde(default)]
    pub eta: Vec<EtaAtom>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cross: Vec<CrossTerm>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SumCmSpec {
    pub n: usize,
    pub ell: usize,
    pub psi: CmFamily,
}

/// A kernel family with its parameters; serializes as `{"family": ..., ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum KernelSpec {
    #[serde(rename = "product")]
    Product(ProductBernstein),
    #[serde(rename = "orderk")]
    OrderK(OrderKSpec),
    #[serde(rename = "sumcm")]
    SumCm(SumCmSpec),
}

impl KernelSpec {
    /// Number of variables.
    pub fn n(&self) -> usize {
        match self {
            KernelSpec::Product(p) => p.parts.len(),
            KernelSpec::OrderK(o) => o.n,
            KernelSpec::SumCm(s) => s.n,
        }
    }

    /// The order `k` such that the kernel is positive definite on `M_k`.
    pub fn order(&self) -> usize {
        match self {
            KernelSpec::Product(p) => p.parts.len(),
            KernelSpec::OrderK(o) => o.k,
            KernelSpec::SumCm(s) => s.ell,
        }
    }

    /// Short human-readable descriptor.
    pub fn describe(&self) -> String {
        match self {
            KernelSpec::Product(p) => format!("product(n={})", p.parts.len()),
            KernelSpec::OrderK(o) => {
                format!("orderk(n={}, k={}, atoms={}, cross={})", o.n, o.k, o.eta.len(), o.cross.len())
            }
            KernelSpec::SumCm(s) => format!("sumcm(n={}, ell={}, psi={:?})", s.n, s.ell, s.psi),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.compile().map(|_| ())
    }

    /// Validates the parameters and precomputes what evaluation needs.
    pub fn compile(&self) -> Result<CompiledKernel> {
        let inner = match self {
            KernelSpec::Product(p) => {
                p.validate()?;
                Compiled::Product(p.clone())
            }
            KernelSpec::OrderK(o) => compile_orderk(o)?,
            KernelSpec::SumCm(s) => {
                if s.ell == 0 || s.ell > s.n || s.n > MAX_VARS {
                    return Err(Error::Arity(format!(
                        "sumcm needs 1 <= ell <= n <= {MAX_VARS}, got ell = {}, n = {}",
                        s.ell, s.n
                    )));
                }
                s.psi.validate(s.ell)?;
                let mut correction = Vec::new();
                for j in 0..s.ell {
                    let c = layer_coefficient(s.n, s.ell, j);
                    correction.extend((0..s.n).combinations(j).map(|f| (c, f.iter().fold(0u32, |m, i| m | 1 << i))));
                }
                Compiled::SumCm { n: s.n, ell: s.ell, psi: s.psi, correction }
            }
        };
        Ok(CompiledKernel { n: self.n(), order: self.order(), inner })
    }
}

fn compile_orderk(o: &OrderKSpec) -> Result<Compiled> {
    let (n, k) = (o.n, o.k);
    if n == 0 || n > MAX_VARS || k == 0 || k > n {
        return Err(Error::Arity(format!("orderk needs 1 <= k <= n <= {MAX_VARS}, got k = {k}, n = {n}")));
    }
    if o.eta.is_empty() && o.cross.is_empty() {
        return Err(Error::Input("orderk kernel needs at least one eta atom or cross term".into()));
    }
    let mut atoms = Vec::with_capacity(o.eta.len());
    for (idx, atom) in o.eta.iter().enumerate() {
        if atom.r.len() != n {
            return Err(Error::Arity(format!("eta atom {} has {} rates, expected {n}", idx + 1, atom.r.len())));
        }
        if atom.r.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::Domain(format!("eta atom {} has a negative or non-finite rate", idx + 1)));
        }
        if !(atom.weight.is_finite() && atom.weight > 0.0) {
            return Err(Error::Domain(format!("eta atom {} needs a positive weight", idx + 1)));
        }
        if positive_count(&atom.r) <= k {
            return Err(Error::DegenerateSupport(format!(
                "eta atom {} has {} positive rates, at least {} are required",
                idx + 1,
                positive_count(&atom.r),
                k + 1
            )));
        }
        atoms.push((atom.r.clone(), atom.weight * shifted_ratio(&atom.r, k)?));
    }
    for (idx, term) in o.cross.iter().enumerate() {
        let distinct = term.vars.iter().all_unique();
        if term.vars.len() != k || term.parts.len() != k || !distinct || term.vars.iter().any(|&v| v >= n) {
            return Err(Error::Arity(format!(
                "cross term {} must name {k} distinct variables in 1..={n} with {k} parts",
                idx + 1
            )));
        }
        term.parts.iter().try_for_each(Bernstein1D::validate)?;
    }
    Ok(Compiled::OrderK { k, atoms, cross: o.cross.clone() })
}

#[derive(Debug, Clone)]
enum Compiled {
    Product(ProductBernstein),
    OrderK { k: usize, atoms: Vec<(Vec<f64>, f64)>, cross: Vec<CrossTerm> },
    SumCm { n: usize, ell: usize, psi: CmFamily, correction: Vec<(f64, u32)> },
}

/// Factor of a product term, a function of one squared distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Factor {
    Bern(Bernstein1D),
    /// `e^{-rate·t}`
    Decay(f64),
}

impl Factor {
    #[inline]
    pub(crate) fn eval(&self, t: f64) -> f64 {
        match self {
            Factor::Bern(b) => b.eval(t),
            Factor::Decay(r) => (-r * t).exp(),
        }
    }
}

/// `coef · ∏_{(i, f) ∈ factors} f(t_i)`; variables not listed contribute 1.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ProductTerm {
    pub coef: f64,
    pub factors: Vec<(usize, Factor)>,
}

/// A validated kernel ready for repeated evaluation.
#[derive(Debug, Clone)]
pub struct CompiledKernel {
    n: usize,
    order: usize,
    inner: Compiled,
}

impl CompiledKernel {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `g(t)` with argument checks.
    pub fn eval(&self, t: &[f64]) -> Result<f64> {
        if t.len() != self.n {
            return Err(Error::Arity(format!("kernel on {} variables evaluated at {} arguments", self.n, t.len())));
        }
        if let Some(x) = t.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::Domain(format!("kernel arguments must be finite and nonnegative, got {x}")));
        }
        Ok(self.eval_unchecked(t))
    }

    /// `g(t)` for `t ∈ [0, ∞)^n`, without checks.
    pub fn eval_unchecked(&self, t: &[f64]) -> f64 {
        match &self.inner {
            Compiled::Product(p) => p.eval(t),
            Compiled::OrderK { k, atoms, cross, .. } => {
                let mut total: f64 = cross
                    .iter()
                    .map(|c| c.vars.iter().zip(&c.parts).map(|(&v, g)| g.eval(t[v])).product::<f64>())
                    .sum();
                let mut b = Vec::with_capacity(t.len());
                for (r, w) in atoms {
                    b.clear();
                    b.extend(r.iter().zip(t).map(|(ri, ti)| -(-ri * ti).exp_m1()));
                    total += w * signed_h_complement(&b, *k);
                }
                total
            }
            Compiled::SumCm { n, ell, psi, correction } => {
                let sign = if ell % 2 == 0 { 1.0 } else { -1.0 };
                let g = |s: f64| sign * psi.eval(*ell, s);
                let support: u32 = (0..*n).filter(|&i| t[i] != 0.0).fold(0, |m, i| m | 1 << i);
                if support.count_ones() as usize == *n {
                    let mut total = g(t.iter().sum());
                    for (c, f) in correction {
                        total += c * g((0..*n).filter(|i| f >> i & 1 == 1).map(|i| t[i]).sum());
                    }
                    return total;
                }
                // g(t_F) only sees F ∩ supp(t); merging the integer coefficients
                // first makes the boundary cancellation exact
                let mut merged: BTreeMap<u32, f64> = BTreeMap::new();
                *merged.entry(support).or_insert(0.0) += 1.0;
                for (c, f) in correction {
                    *merged.entry(f & support).or_insert(0.0) += c;
                }
                merged
                    .into_iter()
                    .filter(|(_, c)| *c != 0.0)
                    .map(|(u, c)| c * g((0..*n).filter(|i| u >> i & 1 == 1).map(|i| t[i]).sum()))
                    .sum()
            }
        }
    }

    /// Writes the kernel as a sum of products of one-variable factors, when
    /// that is possible with at most [`MAX_PRODUCT_TERMS`] terms.
    pub(crate) fn product_terms(&self) -> Option<Vec<ProductTerm>> {
        match &self.inner {
            Compiled::Product(p) => Some(vec![ProductTerm {
                coef: p.scale,
                factors: p.parts.iter().enumerate().map(|(i, g)| (i, Factor::Bern(*g))).collect(),
            }]),
            Compiled::OrderK { k, atoms, cross, .. } => {
                let mut terms: Vec<ProductTerm> = cross
                    .iter()
                    .map(|c| ProductTerm {
                        coef: 1.0,
                        factors: c.vars.iter().zip(&c.parts).map(|(&v, g)| (v, Factor::Bern(*g))).collect(),
                    })
                    .collect();
                // (-1)^k E_k^n(r ⊙ t) = Σ_{|S| >= k} (-1)^{|S|-k} ∏_{i ∈ S} (1 - e^{-r_i t_i})
                for (r, w) in atoms {
                    let support: Vec<usize> = (0..r.len()).filter(|&i| r[i] > 0.0).collect();
                    for size in *k..=support.len() {
                        let sign = if (size - k) % 2 == 0 { 1.0 } else { -1.0 };
                        for s in support.iter().combinations(size) {
                            if terms.len() >= MAX_PRODUCT_TERMS {
                                return None;
                            }
                            terms.push(ProductTerm {
                                coef: sign * w,
                                factors: s
                                    .into_iter()
                                    .map(|&i| (i, Factor::Bern(Bernstein1D::ExpSaturating { rate: r[i] })))
                                    .collect(),
                            });
                        }
                    }
                }
                Some(terms)
            }
            Compiled::SumCm { n, ell, psi: CmFamily::Exp { rate }, correction } => {
                let sign = if ell % 2 == 0 { 1.0 } else { -1.0 };
                let decay =
                    |mask: u32| (0..*n).filter(|i| mask >> i & 1 == 1).map(|i| (i, Factor::Decay(*rate))).collect();
                let mut terms = vec![ProductTerm { coef: sign, factors: decay(u32::MAX) }];
                terms.extend(correction.iter().map(|(c, f)| ProductTerm { coef: sign * c, factors: decay(*f) }));
                (terms.len() <= MAX_PRODUCT_TERMS).then_some(terms)
            }
            Compiled::SumCm { .. } => None,
        }
    }
}

/// `g(t)` for a kernel specification.
pub fn eval_kernel(spec: &KernelSpec, t: &[f64]) -> Result<f64> {
    spec.compile()?.eval(t)
}

/// `G(t) = g(t) + Σ_{j<k} (-1)^{k-j} C(n-j-1, n-k) Σ_{|F|=j} g(t_F)`, where `t_F`
/// keeps the coordinates in `F` and zeroes the others.
pub fn border_correct(g: impl Fn(&[f64]) -> f64, k: usize, t: &[f64]) -> Result<f64> {
    let n = t.len();
    if k == 0 || k > n {
        return Err(Error::Arity(format!("border correction needs 1 <= k <= n = {n}, got {k}")));
    }
    let mut total = g(t);
    let mut buf = vec![0.0; n];
    for j in 0..k {
        let c = layer_coefficient(n, k, j);
        for f in (0..n).combinations(j) {
            buf.iter_mut().for_each(|x| *x = 0.0);
            for &i in &f {
                buf[i] = t[i];
            }
            total += c * g(&buf);
        }
    }
    Ok(total)
}

/// `(ω_ℓ(s), e_ℓ(s)) = (Σ_{j<ℓ} (-s)^j/j!, e^{-s} Σ_{j<ℓ} s^j/j!)`.
pub fn truncated_exp_pair(ell: usize, s: f64) -> Result<(f64, f64)> {
    if ell == 0 {
        return Err(Error::Arity("truncation order must be at least 1".into()));
    }
    if !(s.is_finite() && s >= 0.0) {
        return Err(Error::Domain(format!("truncated exponentials need s >= 0, got {s}")));
    }
    let (mut omega, mut partial, mut term) = (0.0, 0.0, 1.0);
    for j in 0..ell {
        if j > 0 {
            term *= s / j as f64;
        }
        partial += term;
        omega += if j % 2 == 0 { term } else { -term };
    }
    Ok((omega, (-s).exp() * partial))
}

/// Gram matrix `[g(‖x_1 - y_1‖², …, ‖x_n - y_n‖²)]` over the given points.
pub fn gram(spec: &KernelSpec, points: &[ProductPoint]) -> Result<DMatrix<f64>> {
    let kernel = spec.compile()?;
    let Some(first) = points.first() else {
        return Ok(DMatrix::zeros(0, 0));
    };
    let shape = SpaceShape::new(first.blocks().iter().map(Vec::len).collect())?;
    if shape.n() != kernel.n() {
        return Err(Error::Shape(format!("points have {} blocks, kernel has {} variables", shape.n(), kernel.n())));
    }
    if let Some(i) = points.iter().position(|p| !p.conforms(&shape)) {
        return Err(Error::Shape(format!("point {} does not share the shape of the first point", i + 1)));
    }
    let flat: Vec<Vec<f64>> = points.iter().map(ProductPoint::flatten).collect();
    if flat.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Input("coordinates must be finite".into()));
    }
    let m = flat.len();
    let rows: Vec<Vec<f64>> = (0..m)
        .into_par_iter()
        .map(|a| {
            let mut t = vec![0.0; shape.n()];
            (0..m)
                .map(|b| {
                    shape.squared_distances(&flat[a], &flat[b], &mut t);
                    kernel.eval_unchecked(&t)
                })
                .collect()
        })
        .collect();
    Ok(DMatrix::from_fn(m, m, |a, b| rows[a][b]))
}
