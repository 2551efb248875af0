use std::path::PathBuf;

use rand::Rng;
use serde::Serialize;
use slicereg::sampling::{random_point_in_ball, random_quaternion, random_series, stream};
use slicereg::{
    check_borel_caratheodory, equivalence_coefficient_margins, kernel_series, sup_re_estimate, BorelReport, Inequality,
    KernelSpec, QSeries, Quaternion, TailBound,
};

use super::ct::Outcome;
use super::{fan_out, input_labels, read_series};
use crate::config::RunConfig;
use crate::error::Result;
use crate::report::{emit, reduce, render, MarginReport, Row, VERSION};

#[derive(Debug, Clone, Serialize)]
pub struct FunctionInfo {
    pub index: usize,
    /// `affine_kernel` (A exact), `polynomial` or `input` (A sampled).
    pub family: &'static str,
    pub a_sup: f64,
}

struct Case {
    f: QSeries,
    a_sup: f64,
    tail: TailBound,
    family: &'static str,
    tol: f64,
}

/// `b - s K` for a random kernel `K`: its real part stays below `Re b` and
/// approaches it at the boundary, so `A = Re b` exactly.
fn affine_kernel_case<R: Rng>(rng: &mut R, config: &RunConfig) -> Case {
    let spec = KernelSpec::random(rng);
    let b = random_quaternion(rng);
    let s: f64 = rng.random_range(0.25..2.0);
    let f = &QSeries::constant(b, config.order) - &kernel_series(spec, config.order).scale_real(s);
    Case {
        f,
        a_sup: b.re(),
        tail: TailBound::new(2.0 * s, config.order),
        family: "affine_kernel",
        tol: config.tol("bct_known"),
    }
}

fn sampled_case(f: QSeries, family: &'static str, config: &RunConfig) -> Case {
    let a_sup = sup_re_estimate(&f, config.sup_theta, config.sup_sphere);
    let order = f.order();
    Case {
        f,
        a_sup,
        tail: TailBound::none(order),
        family,
        tol: config.tol("bct_sampled"),
    }
}

fn rows_for(i: usize, report: &BorelReport, points: &[Quaternion], tol: f64) -> Vec<Row> {
    let row = |inequality: Inequality, index, point: Option<usize>, margin, allowance| Row {
        function: i,
        point,
        q: point.map(|p| points[p]),
        inequality: inequality.name().to_string(),
        statement: inequality.statement().to_string(),
        index,
        margin,
        allowance,
        tolerance: tol,
    };
    let mut rows = Vec::new();
    for (k, &m) in report.coefficient_margins.iter().enumerate() {
        rows.push(row(Inequality::BctCoefficient, k + 1, None, m, 0.0));
    }
    for (p, &m) in report.growth_margins.iter().enumerate() {
        rows.push(row(Inequality::BctGrowth, 0, Some(p), m, report.tail));
    }
    for (p, &m) in report.realpart_margins.iter().enumerate() {
        rows.push(row(Inequality::BctRealPart, 0, Some(p), m, report.tail));
    }
    for (k, ms) in report.derivative_margins.iter().enumerate() {
        for (p, &m) in ms.iter().enumerate() {
            rows.push(row(
                Inequality::BctDerivative,
                k + 1,
                Some(p),
                m,
                report.derivative_tails[k],
            ));
        }
    }
    rows
}

/// Borel-Carathéodory margins on the ball of radius `r_max`, plus the
/// equivalence-transform round trip of the coefficient margins.
pub fn cmd_check_bct(config: &RunConfig, inputs: &[PathBuf]) -> Result<Outcome> {
    let n = if inputs.is_empty() {
        config.n_functions
    } else {
        inputs.len()
    };
    let eq_tol = config.tol("equivalence");

    let per_function = fan_out(config, n, |i| {
        let mut rng = stream(config.seed, i as u64);
        let case = if !inputs.is_empty() {
            sampled_case(read_series(&inputs[i])?, "input", config)
        } else if i % 2 == 0 {
            sampled_case(random_series(&mut rng, config.order), "polynomial", config)
        } else {
            affine_kernel_case(&mut rng, config)
        };
        let points: Vec<Quaternion> = (0..config.n_points)
            .map(|_| random_point_in_ball(&mut rng, config.r_max))
            .collect();
        let n_max = config.n_max.min(case.f.order());
        let report = check_borel_caratheodory(&case.f, case.a_sup, config.r_max, &points, n_max, case.tail)?;
        let mut rows = rows_for(i, &report, &points, case.tol);

        // constant inputs have A = Re f(0) and no normalized form
        if case.a_sup - report.re_f0 > 1e-9 {
            let via = equivalence_coefficient_margins(&case.f, case.a_sup)?;
            let residual = via
                .iter()
                .zip(&report.coefficient_margins)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            rows.push(Row {
                function: i,
                point: None,
                q: None,
                inequality: "equivalence".into(),
                statement: "coefficient margins via the normalized form equal the direct ones".into(),
                index: 0,
                margin: -residual,
                allowance: 0.0,
                tolerance: eq_tol,
            });
        }
        let info = FunctionInfo {
            index: i,
            family: case.family,
            a_sup: case.a_sup,
        };
        Ok((info, rows))
    })?;

    let (infos, row_sets): (Vec<FunctionInfo>, Vec<Vec<Row>>) = per_function.into_iter().unzip();
    let rows: Vec<Row> = row_sets.into_iter().flatten().collect();
    let reduced = reduce(&rows);
    let report = MarginReport {
        command: "check-bct",
        version: VERSION,
        seed: config.seed,
        config,
        inputs: input_labels(inputs),
        functions: infos,
        passed: reduced.passed(),
        margins: reduced.margins.clone(),
        worst_case: reduced.worst_case.clone(),
        violation_count: reduced.violation_count,
        violations: reduced.violations.clone(),
    };
    let text = render(config, &report, &rows);
    emit(config, &text)?;
    Ok(Outcome {
        passed: reduced.passed(),
        text,
        rows,
        violation_count: reduced.violation_count,
        worst_case: reduced.worst_case,
    })
}
