//! Algebraic and geometric identities, each reduced to a worst residual.

use std::fmt::Write as _;

use rand::Rng;
use serde::Serialize;
use slicereg::evaluation::{product_coeff_bound, t_map_with_floor};
use slicereg::sampling::{
    random_invertible_series, random_orthogonal_unit, random_point_in_ball, random_series, random_series_bounded,
    random_slice_point, stream, Stream,
};
use slicereg::{
    averaging_identity_check_with_root, check_extremal_coefficients, equivalence_coefficient_margins, eval, exp_slice,
    kernel_eval_closed, kernel_series, leibniz_residual, mix_series, mobius_transform, pointwise_star_eval, split,
    t_map, tail_bound, ExtremalCheck, HerglotzMix, KernelSpec, QSeries, Quaternion, UnitImaginary,
};

use super::fan_out;
use crate::config::{Format, RunConfig};
use crate::error::Result;
use crate::report::{emit, to_json, VERSION};

/// `(residual, allowance)` pairs; the sample passes when every
/// `residual - allowance <= tolerance`. An empty list marks a skipped sample.
type Sample = Vec<(f64, f64)>;

type Check = fn(&mut Stream, &RunConfig, usize) -> slicereg::Result<Sample>;

const CHECKS: &[(&str, Check)] = &[
    ("star_oracle", star_oracle),
    ("star_associativity", star_associativity),
    ("conjugate_reverses", conjugate_reverses),
    ("symmetrization", symmetrization),
    ("reciprocal", reciprocal),
    ("leibniz", leibniz),
    ("subseries_compose", subseries_compose),
    ("t_map_geometry", t_map_geometry),
    ("t_map_inverse", t_map_inverse),
    ("pointwise_coherence", pointwise_coherence),
    ("split", split_reconstruction),
    ("mix_positivity", mix_positivity),
    ("schwarz", schwarz),
    ("kernel_equality", kernel_equality),
    ("kernel_coefficients", kernel_coefficients),
    ("extremal_law", extremal_law),
    ("averaging", averaging),
    ("equivalence", equivalence),
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityResult {
    pub name: &'static str,
    pub samples: usize,
    pub skipped: usize,
    pub worst_residual: f64,
    /// Largest `residual - allowance`.
    pub worst_excess: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Serialize)]
struct IdentityReport<'a> {
    command: &'static str,
    version: &'static str,
    seed: u64,
    config: &'a RunConfig,
    passed: bool,
    identities: &'a [IdentityResult],
}

pub fn cmd_check_identities(config: &RunConfig) -> Result<(bool, Vec<IdentityResult>)> {
    let mut results = Vec::with_capacity(CHECKS.len());
    for (k, &(name, check)) in CHECKS.iter().enumerate() {
        let samples = fan_out(config, config.n_functions, |i| {
            let mut rng = stream(config.seed, ((k as u64 + 1) << 32) | i as u64);
            Ok(check(&mut rng, config, i)?)
        })?;
        let tolerance = config.tol(name);
        let mut worst_residual = f64::NEG_INFINITY;
        let mut worst_excess = f64::NEG_INFINITY;
        let mut skipped = 0;
        for sample in &samples {
            if sample.is_empty() {
                skipped += 1;
            }
            for &(residual, allowance) in sample {
                worst_residual = worst_residual.max(residual);
                worst_excess = worst_excess.max(residual - allowance);
            }
        }
        results.push(IdentityResult {
            name,
            samples: samples.len(),
            skipped,
            worst_residual,
            worst_excess,
            tolerance,
            passed: worst_excess <= tolerance && skipped < samples.len(),
        });
    }
    let passed = results.iter().all(|r| r.passed);
    let text = match config.format {
        Format::Json => to_json(&IdentityReport {
            command: "check-identities",
            version: VERSION,
            seed: config.seed,
            config,
            passed,
            identities: &results,
        }),
        Format::Csv => {
            let mut s = String::from("identity,samples,skipped,worst_residual,worst_excess,tolerance,passed\n");
            for r in &results {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{}",
                    r.name, r.samples, r.skipped, r.worst_residual, r.worst_excess, r.tolerance, r.passed
                );
            }
            s
        }
    };
    emit(config, &text)?;
    Ok((passed, results))
}

fn max_diff(a: &QSeries, b: &QSeries) -> f64 {
    (a - b).max_coeff_norm()
}

fn unit_series<R: Rng>(rng: &mut R, order: usize) -> QSeries {
    random_series_bounded(rng, order, 1.0)
}

fn random_mix<R: Rng>(rng: &mut R, config: &RunConfig) -> QSeries {
    mix_series(&HerglotzMix::random(rng, config.max_kernels), config.order)
}

fn star_oracle(rng: &mut Stream, c: &RunConfig, _: usize) -> slicereg::Result<Sample> {
    let f = unit_series(rng, c.order);
    let g = unit_series(rng, c.order);
    let mut brute = vec![Quaternion::ZERO; c.order + 1];
    for (j, a) in f.coeffs().iter().enumerate() {
        for (k, b) in g.coeffs().iter().enumerate() {
            if j + k <= c.order {
                brute[j + k] += *a * *b;
            }
        }
    }
    Ok(vec![(max_diff(&f.star(&g), &QSeries::new(brute)?), 0.0)])
}

fn star_associativity(rng: &mut Stream, c: &RunConfig, _: usize) -> slicereg::Result<Sample> {
    let (f, g, h) = (
        unit_series(rng, c.order),
        unit_series(rng, c.order),
        unit_series(rng, c.order),
    );
    Ok(vec![(max_diff(&f.star(&g).star(&h), &f.star(&g.star(&h))), 0.0)])
}

fn conjugate_reverses(rng: &mut Stream, c: &RunConfig, _: usize) -> slicereg::Result<Sample> {
    let (f, g) = (unit_series(rng, c.order), unit_series(rng, c.order));
    let lhs = f.star(&g).regular_conjugate();
    let rhs = g.regular_conjugate().star(&f.regular_conjugate());
    Ok(vec![(max_diff(&lhs, &rhs), 0.0)])
}

fn symmetrization(rng: &mut Stream, c: &RunConfig, _: usize) -> slicereg::Result<Sample> {
    let f = unit_series(rng, c.order);
    let s = f.symmetrization();
    let imag = s.coeffs().iter().map(|a| a.im_norm()).fold(0.0, f64::max);
    let commute = max_diff(&s, &f.regular_conjugate().star(&f));
    Ok(vec![(imag, 0.0), (commute, 0.0)])
}

/// Drawn zero-free on the closed ball (`Σ_{n>=1} |aₙ| <= 0.9 |a0|`), where the
/// reciprocal coefficients stay bounded and the residual measures the algorithm.
fn reciprocal(rng: &mut Stream, c: &RunConfig, _: usize) -> slicereg::Result<Sample> {
    let mut f = random_invertible_series(rng, c.order, 0.5);
    let a0 = f.coeffs()[0].norm();
    let rest: f64 = f.coeffs().iter().skip(1).map(|a| a.norm()).sum();
    if rest > 0.9 * a0 {
        let t = 0.9 * a0 / rest;
        for a in f.coeffs_mut().iter_mut().skip(1) {
            *a = *a * t;
        }
    }
    let inv = f.regular_reciprocal()?;
    let one = QSeries::one(c.order);
    Ok(vec![
        (max_diff(&inv.star(&f), &one), 0.0),
        (max_diff(&f.star(&inv), &one), 0.0),
    ])
}

fn leibniz(rng: &mut Stream, c: &RunConfig, _: usize) -> slicereg::Result<Sample> {
    let (f, g) = (unit_series(rng, c.order), unit_series(rng, c.order));
    Ok(vec![(leibniz_residual(&f, &g), 0.0)])
}

fn subseries_compose(rng: &mut Stream, c: &RunConfig, i: usize) -> slicereg::Result<Sample> {
    let f = unit_series(rng, c.order);
    let n0 = 1 + i % 6;
    let round = f.subseries(n0).compose_power(n0);
    let worst = (0..=round.order())
        .map(|n| {
            let expected = if n % n0 == 0 { f.coeffs()[n] } else { Quaternion::ZERO };
            (round.coeffs()[n] - expected).norm()
        })
        .fold(0.0, f64::max);
    Ok(vec![(worst, 0.0)])
}

fn t_map_geometry(rng: &mut Stream, c: &RunConfig, _: usize) -> slicereg::Result<Sample> {
    let f = unit_series(rng, c.order);
    let mut out = Vec::new();
    for _ in 0..c.n_points {
        let q = random_point_in_ball(rng, 0.95);
        if let Ok(t) = t_map(&f, q) {
            out.push(((t.norm() - q.norm()).abs().max((t.re() - q.re()).abs()), 0.0));
        }
    }
    Ok(out)
}

/// Points where `f^c` or `f` nearly vanish are skipped; there the conjugation
/// loses all accuracy.
fn t_map_inverse(rng: &mut Stream, c: &RunConfig, _: usize) -> slicereg::Result<Sample> {
    let f = unit_series(rng, c.order);
    let fc = f.regular_conjugate();
    let mut out = Vec::new();
    for _ in 0..c.n_points {
        let q = random_point_in_ball(rng, 0.9);
        if let Ok(t) = t_map_with_floor(&f, q, 0.1) {
            if eval(&f, t).norm() > 0.1 {
                out.push(((t_map(&fc, t)? - q).norm(), 0.0));
            }
        }
    }
    Ok(out)
}

fn pointwise_coherence(rng: &mut Stream, c: &RunConfig, _: usize) -> slicereg::Result<Sample> {
    let (f, g) = (unit_series(rng, c.order), unit_series(rng, c.order));
    let fg = f.star(&g);
    let bound = product_coeff_bound(&f, &g);
    let mut out = Vec::new();
    for _ in 0..c.n_points {
        let q = random_point_in_ball(rng, 0.5);
        let residual = (eval(&fg, q) - pointwise_star_eval(&f, &g, q)).norm();
        out.push((residual, tail_bound(bound, c.order, q.norm())?));
    }
    Ok(out)
}

fn split_reconstruction(rng: &mut Stream, c: &RunConfig, _: usize) -> slicereg::Result<Sample> {
    let f = unit_series(rng, c.order);
    let unit = slicereg::quaternion::random_unit_imaginary(rng);
    let mut out = Vec::new();
    for _ in 0..2 {
        let pair = split(&f, unit, random_orthogonal_unit(rng, unit))?;
        for n in 0..=f.order() {
            out.push(((pair.coefficient(n) - f.coeffs()[n]).norm(), 0.0));
        }
        for _ in 0..c.n_points {
            let z = random_slice_point(rng, unit, 0.95);
            out.push(((pair.eval(z) - eval(&f, z)).norm(), 0.0));
        }
    }
    Ok(out)
}

/// `-Re f(q)` for a mixture, which must not exceed the truncation tail.
fn mix_positivity(rng: &mut Stream, c: &RunConfig, _: usize) -> slicereg::Result<Sample> {
    let f = random_mix(rng, c);
    let mut out = Vec::new();
    for _ in 0..c.n_points {
        let q = random_point_in_ball(rng, 0.95);
        out.push((-eval(&f, q).re(), tail_bound(2.0, c.order, q.norm())?));
    }
    Ok(out)
}

/// For `g = (f-1)⋆(f+1)^{-⋆}`: `|g'(0)| <= 1` and `|g(q)| <= |q|`. A single
/// kernel must give exactly `g = q e^{Iθ}`.
fn schwarz(rng: &mut Stream, c: &RunConfig, i: usize) -> slicereg::Result<Sample> {
    if i.is_multiple_of(4) {
        let spec = KernelSpec::random(rng);
        let g = mobius_transform(&kernel_series(spec, c.order))?;
        let expected = QSeries::monomial(1, spec.rotation(), c.order);
        return Ok(vec![(max_diff(&g, &expected), 0.0)]);
    }
    let g = mobius_transform(&random_mix(rng, c))?;
    let mut out = vec![(g.coeff(1).norm() - 1.0, 0.0)];
    for _ in 0..c.n_points {
        let q = random_point_in_ball(rng, 0.6);
        out.push((eval(&g, q).norm() - q.norm(), tail_bound(1.0, c.order, q.norm())?));
    }
    Ok(out)
}

/// The kernel attains `(1+r)/(1-r)` at `r e^{-Iθ}` and `(1-r)/(1+r)` at `-r e^{-Iθ}`.
fn kernel_equality(rng: &mut Stream, c: &RunConfig, _: usize) -> slicereg::Result<Sample> {
    let spec = KernelSpec::random(rng);
    let f = kernel_series(spec, c.order);
    let r: f64 = rng.random_range(0.05..=0.5);
    let tail = tail_bound(2.0, c.order, r)?;
    let q = exp_slice(spec.unit, -spec.theta) * r;
    let (hi, lo) = ((1.0 + r) / (1.0 - r), (1.0 - r) / (1.0 + r));
    let mut out = Vec::new();
    for (point, target) in [(q, hi), (-q, lo)] {
        let target = Quaternion::real(target);
        out.push(((eval(&f, point) - target).norm(), tail));
        out.push(((kernel_eval_closed(spec, point)? - target).norm(), 0.0));
    }
    Ok(out)
}

fn kernel_coefficients(rng: &mut Stream, c: &RunConfig, _: usize) -> slicereg::Result<Sample> {
    let spec = KernelSpec::random(rng);
    let f = kernel_series(spec, c.order);
    let mut out = vec![((f.coeffs()[0] - Quaternion::ONE).norm(), 0.0)];
    let step = spec.rotation();
    let mut power = Quaternion::ONE;
    for n in 1..=c.order {
        // the power is built by repeated multiplication, independently of exp_slice
        power *= step;
        out.push(((f.coeffs()[n] - power * 2.0).norm(), 0.0));
        out.push(((f.coeffs()[n].norm() - 2.0).abs(), 0.0));
    }
    Ok(out)
}

fn extremal_law(rng: &mut Stream, c: &RunConfig, i: usize) -> slicereg::Result<Sample> {
    let spec = KernelSpec::random(rng);
    let n0 = 1 + i % 4;
    let f = kernel_series(spec, c.order).compose_power(n0);
    let residual = match check_extremal_coefficients(&f, n0) {
        ExtremalCheck::Residual(r) => r,
        ExtremalCheck::Inapplicable { .. } => f64::INFINITY,
    };
    Ok(vec![(residual, 0.0)])
}

fn smallest_other_root(n0: usize) -> usize {
    (2..n0).find(|&k| gcd(k, n0) == 1).unwrap_or(1)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Kernels and mixtures alternate; `n0` cycles through 1..=6. Each sample uses
/// the principal root and the smallest other primitive root, when there is one.
fn averaging(rng: &mut Stream, c: &RunConfig, i: usize) -> slicereg::Result<Sample> {
    let f = if i.is_multiple_of(2) {
        kernel_series(KernelSpec::random(rng), c.order)
    } else {
        random_mix(rng, c)
    };
    let n0 = 1 + (i / 2) % 6;
    let unit: UnitImaginary = slicereg::quaternion::random_unit_imaginary(rng);
    let zs: Vec<Quaternion> = (0..c.n_points).map(|_| random_slice_point(rng, unit, 0.9)).collect();
    let tail = tail_bound(2.0, c.order, 0.9)?;
    let mut out = Vec::new();
    for k in [1, smallest_other_root(n0)] {
        out.push((averaging_identity_check_with_root(&f, n0, unit, &zs, k)?, tail));
    }
    Ok(out)
}

/// Coefficient margins through the normalized form against the direct ones.
fn equivalence(rng: &mut Stream, c: &RunConfig, _: usize) -> slicereg::Result<Sample> {
    let f = random_series(rng, c.order);
    let re0 = f.coeffs()[0].re();
    let a_sup = re0 + rng.random_range(0.5..3.0);
    let via = equivalence_coefficient_margins(&f, a_sup)?;
    let gap = a_sup - re0;
    let worst = f
        .coeffs()
        .iter()
        .skip(1)
        .zip(&via)
        .map(|(a, m)| (2.0 * gap - a.norm() - m).abs())
        .fold(0.0, f64::max);
    Ok(vec![(worst, 0.0)])
}
