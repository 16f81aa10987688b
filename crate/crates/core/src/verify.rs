//! Numerical checks of positive definiteness, conditional negative
//! definiteness, complete monotonicity, the Fréchet identities and the
//! inequalities behind the kernel families.

use itertools::Itertools;
use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interactions::{lancaster_general, mu_kn, InteractionOrder};
use crate::kernels::{Bernstein1D, KernelSpec, ProductBernstein};
use crate::measures::{DiscreteMeasure, ProductPoint, SpaceShape};
use crate::statistics::{energy_with, ENERGY_TOL};
use crate::symfun::{binom_f64, elem_sym_all, elem_sym_poly, h_poly};

/// Largest finite-difference window above the base order.
pub const MAX_FD_ORDER: usize = 8;

/// Relative step of the central differences.
pub const FD_STEP: f64 = 1e-2;

/// Tolerance of the inequality suite, relative to the size of the compared values.
pub const INEQUALITY_TOL: f64 = 1e-12;

/// Tolerance of the Fréchet identities, relative to the size of the summed terms.
pub const FRECHET_TOL: f64 = 1e-10;

/// Outcome of a check. `passed` holds exactly when `worst_violation <= tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub name: String,
    pub trials: usize,
    pub worst_violation: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub seed: u64,
}

impl VerifyReport {
    fn new(name: &str, trials: usize, worst_violation: f64, tolerance: f64, seed: u64) -> Self {
        Self { name: name.to_string(), trials, worst_violation, tolerance, passed: worst_violation <= tolerance, seed }
    }
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64))
}

/// Max absolute row sum.
fn row_norm(k: &DMatrix<f64>) -> f64 {
    k.row_iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Smallest eigenvalue and the norm used to scale the tolerance.
fn min_eigen(matrix: &DMatrix<f64>) -> Result<(f64, f64)> {
    if !matrix.is_square() {
        return Err(Error::Input(format!("Gram matrix is {}×{}", matrix.nrows(), matrix.ncols())));
    }
    if matrix.iter().any(|x| !x.is_finite()) {
        return Err(Error::Input("Gram matrix has non-finite entries".into()));
    }
    let norm = row_norm(matrix);
    let asym = (matrix - matrix.transpose()).amax();
    if asym > 1e-10 * norm.max(1.0) {
        return Err(Error::Input(format!("matrix is not symmetric (max deviation {asym:e})")));
    }
    if matrix.nrows() == 0 {
        return Ok((0.0, 0.0));
    }
    let sym = (matrix + matrix.transpose()) * 0.5;
    let lambda = SymmetricEigen::new(sym).eigenvalues.min();
    Ok((lambda, norm))
}

/// Positive semidefiniteness: passes when `λ_min >= -tol·‖K‖` with `‖K‖` the max row sum.
pub fn gram_psd_check(matrix: &DMatrix<f64>, tol: f64) -> Result<VerifyReport> {
    let (lambda, norm) = min_eigen(matrix)?;
    Ok(VerifyReport::new("gram_psd", 1, (-lambda).max(0.0), tol * norm, 0))
}

/// Violation of positive semidefiniteness relative to the matrix norm.
fn relative_psd_violation(matrix: &DMatrix<f64>) -> Result<f64> {
    let (lambda, norm) = min_eigen(matrix)?;
    Ok(if norm == 0.0 { 0.0 } else { (-lambda).max(0.0) / norm })
}

/// Conditional negative definiteness of `γ(x, y) = ψ(‖x - y‖²)` on the given
/// points: `e^{-rγ}` must be positive semidefinite for `r ∈ {0.1, 1, 10}`, and so
/// must `γ(x, w) + γ(w, y) - γ(x, y) - γ(w, w)` with `w` the first point.
/// Violations are reported relative to each matrix norm.
pub fn cnd_check(psi: impl Fn(f64) -> f64, points: &[Vec<f64>], tol: f64) -> Result<VerifyReport> {
    if points.len() < 2 {
        return Err(Error::Arity("a CND check needs at least two points".into()));
    }
    let d = points[0].len();
    if points.iter().any(|p| p.len() != d) {
        return Err(Error::Shape("points have different dimensions".into()));
    }
    let m = points.len();
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>();
    let gamma = DMatrix::from_fn(m, m, |i, j| psi(dist(&points[i], &points[j])));
    let mut worst: f64 = 0.0;
    for r in [0.1, 1.0, 10.0] {
        worst = worst.max(relative_psd_violation(&gamma.map(|g| (-r * g).exp()))?);
    }
    let k = DMatrix::from_fn(m, m, |i, j| gamma[(i, 0)] + gamma[(0, j)] - gamma[(i, j)] - gamma[(0, 0)]);
    worst = worst.max(relative_psd_violation(&k)?);
    Ok(VerifyReport::new("cnd", 1, worst, tol, 0))
}

/// Central difference `Δ_h^p ψ(t) = Σ_j (-1)^j C(p, j) ψ(t + (p/2 - j) h)` and the
/// sum of the absolute values of its terms.
fn central_difference(psi: &impl Fn(f64) -> f64, p: usize, t: f64, h: f64) -> (f64, f64) {
    let (mut value, mut scale) = (0.0, 0.0);
    for j in 0..=p {
        let c = binom_f64(p, j);
        let v = psi(t + (p as f64 / 2.0 - j as f64) * h);
        value += if j % 2 == 0 { c * v } else { -c * v };
        scale += c * v.abs();
    }
    (value, scale)
}

/// Sign pattern `(-1)^p ψ^{(p)} >= 0` for `ℓ <= p <= ℓ + max_order` on the grid, by
/// central differences with step `1e-2·t`. A finite difference has the sign of
/// the derivative at some interior point, so a wrong sign is a real violation;
/// the converse only holds on the tested window.
pub fn complete_monotone_check(
    psi: impl Fn(f64) -> f64,
    ell: usize,
    grid: &[f64],
    max_order: usize,
    tol: f64,
) -> Result<VerifyReport> {
    if max_order > MAX_FD_ORDER {
        return Err(Error::Arity(format!("finite-difference window is capped at {MAX_FD_ORDER}, got {max_order}")));
    }
    if grid.is_empty() {
        return Err(Error::Domain("empty grid".into()));
    }
    if grid.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(Error::Domain("grid points must be positive and finite".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("grid must be strictly increasing".into()));
    }
    let mut worst: f64 = 0.0;
    for &t in grid {
        for p in ell..=ell + max_order {
            let (value, scale) = central_difference(&psi, p, t, FD_STEP * t);
            let signed = if p % 2 == 0 { value } else { -value };
            if signed < 0.0 && scale > 0.0 {
                worst = worst.max(-signed / scale);
            }
        }
    }
    Ok(VerifyReport::new("complete_monotone", grid.len(), worst, tol, 0))
}

/// `Σ_{F ⊆ {1..ℓ}} (-1)^{ℓ-|F|} (Σ_{i∈F} t_i)^k`, which is `0` for `k < ℓ` and
/// `ℓ! ∏ t_i` for `k = ℓ`.
pub fn frechet_check(ell: usize, t: &[f64], k: usize) -> Result<VerifyReport> {
    if t.len() != ell {
        return Err(Error::Arity(format!("expected {ell} values, got {}", t.len())));
    }
    if k > ell {
        return Err(Error::Arity(format!("power k = {k} exceeds ell = {ell}")));
    }
    if ell > 30 {
        return Err(Error::Arity("ell is limited to 30".into()));
    }
    if t.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(Error::Domain("Fréchet arguments must be positive".into()));
    }
    let (mut sum, mut scale) = (0.0, 0.0);
    for mask in 0u64..(1 << ell) {
        let s: f64 = (0..ell).filter(|i| mask >> i & 1 == 1).map(|i| t[i]).sum();
        let term = s.powi(k as i32);
        let sign = if (ell - mask.count_ones() as usize) % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * term;
        scale += term.abs();
    }
    let expected =
        if k == ell { (1..=ell).map(|i| i as f64).product::<f64>() * t.iter().product::<f64>() } else { 0.0 };
    let violation = (sum - expected).abs() / scale.max(expected.abs()).max(f64::MIN_POSITIVE);
    Ok(VerifyReport::new("frechet", 1, violation, FRECHET_TOL, 0))
}

fn random_point(rng: &mut ChaCha8Rng, n: usize, d: usize, lattice: bool) -> ProductPoint {
    ProductPoint::new(
        (0..n)
            .map(|_| {
                (0..d)
                    .map(|_| if lattice { f64::from(rng.gen_range(0..3)) } else { rng.gen_range(-1.5..1.5) })
                    .collect()
            })
            .collect(),
    )
}

fn random_factor(rng: &mut ChaCha8Rng, d: usize, centred: bool, lattice: bool) -> DiscreteMeasure {
    let shape = SpaceShape::uniform(1, d).expect("d >= 1");
    let atoms = rng.gen_range(1..=3);
    let mut pairs: Vec<(ProductPoint, f64)> = (0..atoms)
        .map(|_| {
            let w: f64 = rng.gen_range(0.2..1.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            (random_point(rng, 1, d, lattice), w)
        })
        .collect();
    let mass: f64 = pairs.iter().map(|p| p.1).sum();
    let fix = if centred { -mass } else { rng.gen_range(0.5..1.5) - mass };
    pairs.push((random_point(rng, 1, d, lattice), fix));
    DiscreteMeasure::from_atoms(shape, pairs).expect("finite atoms")
}

fn random_probability(rng: &mut ChaCha8Rng, n: usize, d: usize, lattice: bool) -> DiscreteMeasure {
    let shape = SpaceShape::uniform(n, d).expect("n, d >= 1");
    let rows = rng.gen_range(2..=4);
    let weights: Vec<f64> = (0..rows).map(|_| rng.gen_range(0.1..1.0)).collect();
    let total: f64 = weights.iter().sum();
    DiscreteMeasure::from_atoms(shape, weights.into_iter().map(|w| (random_point(rng, n, d, lattice), w / total)))
        .expect("finite atoms")
}

/// A random element of `M_k` on `(ℝ^d)^n`, cycling through three constructions:
/// products with at least `k` centred factors, `Λ_k^n[P, Q]` of random discrete
/// probabilities, and scaled `μ_k^n[x, y]`.
pub fn random_member(
    rng: &mut ChaCha8Rng,
    n: usize,
    k: usize,
    d: usize,
    construction: usize,
) -> Result<DiscreteMeasure> {
    let order = InteractionOrder::new(n, k)?;
    if d == 0 {
        return Err(Error::Arity("dimension d must be at least 1".into()));
    }
    let lattice = rng.gen_bool(0.3);
    match construction % 3 {
        0 => {
            let centred = rng.gen_range(k..=n);
            let mut flags: Vec<bool> = (0..n).map(|i| i < centred).collect();
            for i in (1..n).rev() {
                flags.swap(i, rng.gen_range(0..=i));
            }
            let factors: Vec<DiscreteMeasure> = flags.iter().map(|&c| random_factor(rng, d, c, lattice)).collect();
            DiscreteMeasure::product(&factors)
        }
        1 => {
            let p = random_probability(rng, n, d, lattice);
            let q = random_probability(rng, n, d, lattice);
            let explicit = rng.gen_bool(0.5);
            lancaster_general(&p, explicit.then_some(&q), order)
        }
        _ => {
            let x = random_point(rng, n, d, lattice);
            let y = random_point(rng, n, d, lattice);
            let scale: f64 = rng.gen_range(0.5..2.0);
            Ok(mu_kn(&x, &y, order)?.scaled(scale))
        }
    }
}

/// Worst value of `-E/(Σ|w|)²` over random `μ ∈ M_k`; passes at `1e-9`.
pub fn pdi_random_check(spec: &KernelSpec, k: usize, trials: usize, seed: u64, d: usize) -> Result<VerifyReport> {
    if trials == 0 {
        return Err(Error::Arity("at least one trial is required".into()));
    }
    let kernel = spec.compile()?;
    if k != kernel.order() {
        return Err(Error::Arity(format!("order {k} requested for a kernel of order {}", kernel.order())));
    }
    let n = kernel.n();
    let violations: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let mu = random_member(&mut rng, n, k, d, trial)?;
            let tv2 = mu.total_variation().powi(2);
            if tv2 == 0.0 {
                return Ok(0.0);
            }
            let energy = energy_with(|t| kernel.eval_unchecked(t), &mu, k);
            Ok((-energy).max(0.0) / tv2)
        })
        .collect::<Result<_>>()?;
    let worst = violations.into_iter().fold(0.0, f64::max);
    Ok(VerifyReport::new("pdi_random", trials, worst, ENERGY_TOL, seed))
}

/// `(1 - e^{-rt})(1 + r)/r`, with value `t` at `r = 0`.
fn bern_ratio(r: f64, t: f64) -> f64 {
    if r == 0.0 {
        t
    } else {
        -(-r * t).exp_m1() * (1.0 + r) / r
    }
}

/// Records `lhs <= rhs` relative to the size of the two sides.
fn leq(worst: &mut f64, lhs: f64, rhs: f64) {
    let v = (lhs - rhs) / lhs.abs().max(rhs.abs()).max(1.0);
    if v > *worst {
        *worst = v;
    }
}

fn random_bernstein(rng: &mut ChaCha8Rng) -> Bernstein1D {
    match rng.gen_range(0..3) {
        0 => Bernstein1D::ExpSaturating { rate: rng.gen_range(0.1..5.0) },
        1 => Bernstein1D::Power { exponent: rng.gen_range(0.05..=1.0) },
        _ => Bernstein1D::LogShift { shift: rng.gen_range(0.1..5.0) },
    }
}

fn inequality_trial(rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0;
    let n = rng.gen_range(2..=6);
    let k = rng.gen_range(1..=n);
    let binom = binom_f64(n, k);
    let r: Vec<f64> = (0..n).map(|_| if rng.gen_bool(0.15) { 0.0 } else { rng.gen_range(0.0..6.0) }).collect();
    let a: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..=1.0)).collect();

    // one-variable Bernstein bounds
    let s: f64 = if rng.gen_bool(0.1) { 0.0 } else { rng.gen_range(0.0..30.0) };
    let f = if s == 0.0 { 1.0 } else { bern_ratio(s, 1.0) };
    leq(&mut worst, 1.0, f);
    leq(&mut worst, f, 2.0);
    let (rr, t): (f64, f64) = (r[0], rng.gen_range(0.0..10.0));
    leq(&mut worst, t.min(1.0), bern_ratio(rr, t));
    leq(&mut worst, bern_ratio(rr, t), 2.0 * t.max(1.0));

    // sandwich of (-1)^k H_k^n(a)
    let one_minus: Vec<f64> = a.iter().map(|x| 1.0 - x).collect();
    let pk = elem_sym_poly(&one_minus, k).expect("k <= n");
    let signed_h = if k % 2 == 0 { 1.0 } else { -1.0 } * h_poly(&a, k).expect("k <= n");
    leq(&mut worst, 0.0, pk / binom);
    leq(&mut worst, pk / binom, signed_h);
    leq(&mut worst, signed_h, pk);

    // submultiplicativity
    let u: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..3.0)).collect();
    let prod: Vec<f64> = r.iter().zip(&u).map(|(x, y)| x * y).collect();
    leq(&mut worst, elem_sym_poly(&prod, k).unwrap(), elem_sym_poly(&r, k).unwrap() * elem_sym_poly(&u, k).unwrap());

    // shifted elementary polynomials
    let shifted: Vec<f64> = r.iter().map(|x| 1.0 + x).collect();
    let p = elem_sym_all(&r, n);
    let head: f64 = p[..=k].iter().sum();
    let pk_shift = elem_sym_poly(&shifted, k).unwrap();
    let pk_r = p[k];
    leq(&mut worst, head, pk_shift);
    leq(&mut worst, pk_shift, binom * head);

    let mut idx: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        idx.swap(i, rng.gen_range(0..=i));
    }
    let f_set = &idx[..k];
    let prod_r: f64 = f_set.iter().map(|&i| r[i]).product();
    let prod_1r: f64 = f_set.iter().map(|&i| 1.0 + r[i]).product();
    leq(&mut worst, head * prod_r, pk_r * prod_1r);

    let l = rng.gen_range(0..=k);
    let (big_l, rest) = idx.split_at(l);
    let r_rest: Vec<f64> = rest.iter().map(|&i| r[i]).collect();
    let r_rest_shift: Vec<f64> = r_rest.iter().map(|x| 1.0 + x).collect();
    let lhs = pk_shift * elem_sym_poly(&r_rest, k - l).unwrap() * big_l.iter().map(|&i| r[i]).product::<f64>();
    let rhs = binom
        * pk_r
        * elem_sym_poly(&r_rest_shift, k - l).unwrap()
        * big_l.iter().map(|&i| 1.0 + r[i]).product::<f64>();
    leq(&mut worst, lhs, rhs);

    let ratio: Vec<f64> = r.iter().map(|x| x / (1.0 + x)).collect();
    leq(&mut worst, elem_sym_poly(&ratio, k).unwrap(), binom * binom * pk_r / pk_shift);

    // random product kernel
    let g = ProductBernstein::new((0..n).map(|_| random_bernstein(rng)).collect());
    let kernel = KernelSpec::Product(g).compile().expect("valid parts");
    let eval = |t: &[f64]| kernel.eval_unchecked(t);
    let t1: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..5.0)).collect();
    let t2: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..5.0)).collect();
    let factor: f64 = t1.iter().zip(&t2).map(|(x, y)| (x / y).max(1.0)).product();
    leq(&mut worst, eval(&t1), factor * eval(&t2));
    leq(&mut worst, eval(&t1), eval(&vec![1.0; n]) * t1.iter().map(|x| 1.0 + x).product::<f64>());
    let sum: Vec<f64> = t1.iter().zip(&t2).map(|(x, y)| x + y).collect();
    let bound: f64 = (0..n).map(|i| [t1[i], t2[i]]).multi_cartesian_product().map(|pick| eval(&pick)).sum();
    leq(&mut worst, eval(&sum), bound);
    worst
}

/// Randomized audit of the scalar inequalities used by the kernel theory.
pub fn inequality_suite(seed: u64, trials: usize) -> Result<VerifyReport> {
    if trials == 0 {
        return Err(Error::Arity("at least one trial is required".into()));
    }
    let worst = (0..trials)
        .into_par_iter()
        .map(|trial| inequality_trial(&mut trial_rng(seed, trial)))
        .collect::<Vec<f64>>()
        .into_iter()
        .fold(0.0, f64::max);
    Ok(VerifyReport::new("inequalities", trials, worst, INEQUALITY_TOL, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{CmFamily, EtaAtom, OrderKSpec, SumCmSpec};
    use approx::assert_relative_eq;

    #[test]
    fn psd_examples() {
        let id = DMatrix::<f64>::identity(4, 4);
        assert!(gram_psd_check(&id, 1e-12).unwrap().passed);
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        let r = gram_psd_check(&bad, 1e-12).unwrap();
        assert!(!r.passed);
        assert_relative_eq!(r.worst_violation, 1.0, max_relative = 1e-12);
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.5, 1.0]);
        assert!(matches!(gram_psd_check(&asym, 1e-12), Err(Error::Input(_))));

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<Vec<f64>> = (0..30).map(|_| vec![rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)]).collect();
        let g =
            DMatrix::from_fn(30, 30, |i, j| (-(pts[i][0] - pts[j][0]).powi(2) - (pts[i][1] - pts[j][1]).powi(2)).exp());
        assert!(gram_psd_check(&g, 1e-12).unwrap().passed);
    }

    #[test]
    fn cnd_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pts: Vec<Vec<f64>> = (0..12).map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        assert!(cnd_check(|t| t, &pts, 1e-12).unwrap().passed);
        assert!(!cnd_check(|t| -t, &pts, 1e-12).unwrap().passed);
        assert!(cnd_check(|t| t, &vec![vec![1.0, 2.0]; 3], 1e-12).unwrap().passed);
        assert!(matches!(cnd_check(|t| t, &pts[..1], 1e-12), Err(Error::Arity(_))));
        for _ in 0..20 {
            let b = random_bernstein(&mut rng);
            assert!(cnd_check(|t| b.eval(t), &pts, 1e-12).unwrap().passed, "{b:?}");
        }
    }

    #[test]
    fn complete_monotone_examples() {
        let grid: Vec<f64> = (1..=20).map(|i| 0.25 * i as f64).collect();
        assert!(complete_monotone_check(|t| (-t).exp(), 0, &grid, 8, 1e-12).unwrap().passed);
        assert!(complete_monotone_check(|t| t.powf(1.5), 2, &grid, 8, 1e-12).unwrap().passed);
        assert!(!complete_monotone_check(|t| t.powf(2.5), 2, &grid, 8, 1e-12).unwrap().passed);
        assert!(matches!(complete_monotone_check(|t| t, 1, &[0.0, 1.0], 2, 1e-12), Err(Error::Domain(_))));
        assert!(matches!(complete_monotone_check(|t| t, 1, &[1.0], 9, 1e-12), Err(Error::Arity(_))));
        for ell in 1..=4 {
            for psi in [
                CmFamily::Power { exponent: ell as f64 - 0.3 },
                CmFamily::ShiftPower { shift: 0.7, exponent: ell as f64 },
                CmFamily::Exp { rate: 1.3 },
            ] {
                assert!(complete_monotone_check(|t| psi.eval(ell, t), ell, &grid, 6, 1e-12).unwrap().passed, "{psi:?}");
            }
            if ell >= 2 {
                assert!(complete_monotone_check(|t| CmFamily::Log.eval(ell, t), ell, &grid, 6, 1e-12).unwrap().passed);
            }
        }
    }

    #[test]
    fn frechet_examples() {
        let r = frechet_check(2, &[1.0, 2.0], 1).unwrap();
        assert!(r.passed && r.worst_violation == 0.0);
        assert!(frechet_check(2, &[1.0, 2.0], 2).unwrap().passed);
        assert!(frechet_check(5, &[1.0, 2.0, 0.5, 3.0, 0.1], 0).unwrap().passed);
        assert!(matches!(frechet_check(2, &[1.0, 2.0], 3), Err(Error::Arity(_))));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for ell in 1..=6 {
            for k in 0..=ell {
                let t: Vec<f64> = (0..ell).map(|_| rng.gen_range(0.01..10.0)).collect();
                assert!(frechet_check(ell, &t, k).unwrap().passed, "ell {ell} k {k}");
            }
        }
    }

    #[test]
    fn pdi_examples() {
        let gauss = KernelSpec::Product(ProductBernstein::gaussian(3));
        assert!(pdi_random_check(&gauss, 3, 60, 1, 1).unwrap().passed);
        let broken =
            KernelSpec::Product(ProductBernstein { parts: vec![Bernstein1D::Power { exponent: 1.0 }; 3], scale: -1.0 });
        assert!(!pdi_random_check(&broken, 3, 30, 1, 1).unwrap().passed);
        assert!(matches!(pdi_random_check(&gauss, 3, 0, 1, 1), Err(Error::Arity(_))));
        assert!(matches!(pdi_random_check(&gauss, 2, 5, 1, 1), Err(Error::Arity(_))));

        let orderk = KernelSpec::OrderK(OrderKSpec {
            n: 4,
            k: 2,
            eta: vec![EtaAtom { r: vec![1.0, 0.5, 2.0, 0.0], weight: 1.0 }],
            cross: vec![],
        });
        assert!(pdi_random_check(&orderk, 2, 60, 4, 2).unwrap().passed);
        let sum = KernelSpec::SumCm(SumCmSpec { n: 3, ell: 2, psi: CmFamily::Log });
        assert!(pdi_random_check(&sum, 2, 60, 4, 2).unwrap().passed);
    }

    #[test]
    fn random_members_are_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for i in 0..60 {
            let n = 2 + i % 3;
            let k = 1 + i % n;
            let mu = random_member(&mut rng, n, k, 1, i).unwrap();
            assert!(mu.is_member_mk(k).unwrap(), "construction {} n {n} k {k}", i % 3);
        }
    }

    #[test]
    fn inequality_examples() {
        assert_relative_eq!(bern_ratio(1.0, 1.0), 2.0 * (1.0 - (-1f64).exp()), max_relative = 1e-15);
        assert_eq!(bern_ratio(0.0, 0.7), 0.7);
        let a = [0.5; 3];
        let lower = elem_sym_poly(&a, 2).unwrap() / 3.0;
        assert_relative_eq!(lower, 0.25, max_relative = 1e-15);
        assert_relative_eq!(h_poly(&a, 2).unwrap(), 0.625, max_relative = 1e-15);
        let r = inequality_suite(17, 500).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r, inequality_suite(17, 500).unwrap());
    }
}
