use slicereg::caratheodory::coefficient_margins;
use slicereg::sampling::{random_point_in_ball, stream};
use slicereg::{check_caratheodory_bounds, Margin, Quaternion, TailBound};

use super::{fan_out, generated_mix, input_labels, read_series};
use crate::config::RunConfig;
use crate::error::Result;
use crate::report::{emit, reduce, render, MarginReport, Row, VERSION};

pub struct Outcome {
    pub passed: bool,
    pub text: String,
    pub rows: Vec<Row>,
    pub violation_count: usize,
    pub worst_case: Option<Row>,
}

pub(crate) fn margin_row(function: usize, point: Option<(usize, Quaternion)>, m: &Margin, tol: f64) -> Row {
    Row {
        function,
        point: point.map(|p| p.0),
        q: point.map(|p| p.1),
        inequality: m.inequality.name().to_string(),
        statement: m.inequality.statement().to_string(),
        index: m.index,
        margin: m.value,
        allowance: m.allowance,
        tolerance: tol,
    }
}

/// Carathéodory chain and coefficient bound over generated mixtures, or over
/// the series in `inputs` when any are given (treated as exact polynomials).
pub fn cmd_check_ct(config: &RunConfig, inputs: &[std::path::PathBuf]) -> Result<Outcome> {
    let tol = config.tol("ct");
    let n = if inputs.is_empty() {
        config.n_functions
    } else {
        inputs.len()
    };

    let per_function = fan_out(config, n, |i| {
        let (f, tail, mut rng) = if inputs.is_empty() {
            let (_, f, rng) = generated_mix(config, i);
            (f, TailBound::new(2.0, config.order), rng)
        } else {
            let f = read_series(&inputs[i])?;
            let order = f.order();
            (f, TailBound::none(order), stream(config.seed, i as u64))
        };
        let mut rows: Vec<Row> = coefficient_margins(&f)
            .iter()
            .map(|m| margin_row(i, None, m, tol))
            .collect();
        for p in 0..config.n_points {
            let q = random_point_in_ball(&mut rng, config.r_max);
            let report = check_caratheodory_bounds(&f, q, tail)?;
            rows.extend(report.margins().iter().map(|m| margin_row(i, Some((p, q)), m, tol)));
        }
        Ok(rows)
    })?;
    let rows: Vec<Row> = per_function.into_iter().flatten().collect();
    let reduced = reduce(&rows);

    let report = MarginReport {
        command: "check-ct",
        version: VERSION,
        seed: config.seed,
        config,
        inputs: input_labels(inputs),
        functions: n,
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

impl Outcome {
    /// One line for stderr naming the verdict and, on failure, the first violation.
    pub fn summary(&self, command: &str) -> String {
        let first = self.rows.iter().find(|r| !r.holds());
        match (self.passed, first, &self.worst_case) {
            (false, Some(row), _) => format!(
                "{command}: FAIL, {} violation(s); first: {}",
                self.violation_count,
                row.describe()
            ),
            (_, _, Some(w)) => format!("{command}: PASS, worst case {}", w.describe()),
            _ => format!("{command}: PASS"),
        }
    }
}
