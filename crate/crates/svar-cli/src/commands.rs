//! Subcommand implementations. Each handler computes its payload, emits one
//! artifact (JSON or CSV per the configuration) and returns the process
//! exit status.

use serde_json::json;

use svar_core::checks::{validate_model, CheckResult};
use svar_core::cumulants::{cumulant_engines, cumulants_moment_route};
use svar_core::expansion::{ExpansionKind, ExpansionSpec};
use svar_core::oracles::{exact_cumulants, exact_law, gamma_reference, simulate_ar1};
use svar_core::process::ProcessModel;
use svar_core::symmetric::build_tables;
use svar_core::CumulantSet;

use crate::config::{EngineChoice, OutputFormat, ProcessSpec, RunConfig};
use crate::output::{csv_artifact, emit, fmt_f64, json_artifact};
use crate::CliError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION_FAILED: i32 = 2;

fn format_of(config: &RunConfig) -> OutputFormat {
    config.format.unwrap_or(OutputFormat::Json)
}

fn opt(value: Option<f64>) -> String {
    value.map(fmt_f64).unwrap_or_default()
}

pub fn cumulants(config: &RunConfig) -> Result<i32, CliError> {
    let model = config.build_model()?;
    let max_order = config.effective_max_order();
    let engine = config.engine.unwrap_or(EngineChoice::Both);
    let sets: Vec<CumulantSet> = match engine {
        EngineChoice::Moment => vec![cumulants_moment_route(&model, config.n, max_order)?],
        EngineChoice::Cumulant => {
            let pair = cumulant_engines(&model, config.n, max_order)?;
            vec![pair.table]
        }
        EngineChoice::Both => {
            let pair = cumulant_engines(&model, config.n, max_order)?;
            vec![pair.moment, pair.table]
        }
    };
    let content = match format_of(config) {
        OutputFormat::Json => json_artifact(
            config,
            json!({"n": config.n, "cumulants": sets}),
        ),
        OutputFormat::Csv => {
            let rows: Vec<Vec<String>> = sets
                .iter()
                .map(|set| {
                    vec![
                        serde_json::to_value(set.engine)
                            .unwrap()
                            .as_str()
                            .unwrap()
                            .to_string(),
                        set.n.to_string(),
                        fmt_f64(set.k1),
                        fmt_f64(set.k2),
                        opt(set.k3),
                        opt(set.k4),
                        opt(set.residuals.r2),
                        opt(set.residuals.r3),
                        opt(set.residuals.r3_alt),
                        opt(set.residuals.r4),
                    ]
                })
                .collect();
            csv_artifact(
                config,
                &[
                    "engine", "n", "k1", "k2", "k3", "k4", "r2", "r3", "r3_alt", "r4",
                ],
                &rows,
            )
        }
    };
    emit(config.out.as_deref(), &content)?;
    Ok(EXIT_OK)
}

pub fn moments(config: &RunConfig) -> Result<i32, CliError> {
    let model = config.build_model()?;
    let max_group = config
        .max_group
        .unwrap_or_else(|| (config.n / 2).clamp(1, 4) as u8);
    let tables = build_tables(&model, config.n, max_group)?;
    let content = match format_of(config) {
        OutputFormat::Json => json_artifact(
            config,
            json!({"n": config.n, "tables": tables}),
        ),
        OutputFormat::Csv => {
            let mut rows = Vec::new();
            for table in &tables {
                for (pattern, value) in table.entries() {
                    rows.push(vec![
                        table.group.to_string(),
                        pattern.to_string(),
                        fmt_f64(value),
                    ]);
                }
            }
            csv_artifact(config, &["group", "pattern", "value"], &rows)
        }
    };
    emit(config.out.as_deref(), &content)?;
    Ok(EXIT_OK)
}

/// Which series a grid column evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Column {
    Normal,
    Gc(u8),
    Edgeworth(u8),
    Reference,
}

impl Column {
    fn parse(name: &str) -> Result<Self, CliError> {
        Ok(match name {
            "normal" => Column::Normal,
            "gc3" => Column::Gc(3),
            "gc4" => Column::Gc(4),
            "gc6" => Column::Gc(6),
            "edgeworth1" => Column::Edgeworth(1),
            "edgeworth2" => Column::Edgeworth(2),
            "reference" => Column::Reference,
            other => {
                return Err(CliError::Config(format!(
                    "unknown grid column {other:?} (expected normal, gc3, gc4, gc6, \
                     edgeworth1, edgeworth2, reference)"
                )))
            }
        })
    }

    fn name(&self) -> String {
        match self {
            Column::Normal => "normal".into(),
            Column::Gc(order) => format!("gc{order}"),
            Column::Edgeworth(order) => format!("edgeworth{order}"),
            Column::Reference => "reference".into(),
        }
    }

    fn required_cumulant_order(&self) -> u8 {
        match self {
            Column::Normal | Column::Reference => 2,
            Column::Gc(3) | Column::Edgeworth(1) => 3,
            _ => 4,
        }
    }
}

fn grid_columns(config: &RunConfig) -> Result<Vec<Column>, CliError> {
    let mut columns: Vec<Column> = if let Some(names) = &config.columns {
        names
            .iter()
            .map(|name| Column::parse(name))
            .collect::<Result<_, _>>()?
    } else if let Some(expansion) = &config.expansion {
        let series = match (expansion.kind, expansion.order) {
            (ExpansionKind::GramCharlier, 0) => Column::Normal,
            (ExpansionKind::GramCharlier, order) => Column::Gc(order),
            (ExpansionKind::Edgeworth, order) => Column::Edgeworth(order),
        };
        if series == Column::Normal {
            vec![Column::Normal]
        } else {
            vec![Column::Normal, series]
        }
    } else {
        vec![
            Column::Normal,
            Column::Gc(3),
            Column::Gc(4),
            Column::Edgeworth(1),
            Column::Edgeworth(2),
        ]
    };
    // The Gamma reference is exact only for i.i.d. normal data; add it there,
    // silently drop it elsewhere rather than emit an approximation.
    let is_iid_normal = config.iid_normal_sigma().is_some();
    if is_iid_normal {
        if !columns.contains(&Column::Reference) {
            columns.push(Column::Reference);
        }
    } else {
        columns.retain(|c| *c != Column::Reference);
    }
    if columns.is_empty() {
        return Err(CliError::Config("no grid columns requested".into()));
    }
    Ok(columns)
}

pub fn grid(config: &RunConfig, cdf: bool) -> Result<i32, CliError> {
    let model = config.build_model()?;
    let grid = config.grid.ok_or_else(|| {
        CliError::Config("density/cdf need a grid block {min, max, points}".into())
    })?;
    let columns = grid_columns(config)?;
    let needed_order = columns
        .iter()
        .map(Column::required_cumulant_order)
        .max()
        .unwrap_or(2)
        .max(2);
    if config.n < 2 * needed_order as usize {
        return Err(CliError::Config(format!(
            "violated precondition: requested series need kappa_{needed_order}, i.e. n >= {} \
             (got n = {})",
            2 * needed_order,
            config.n
        )));
    }
    let cumulants = cumulants_moment_route(&model, config.n, needed_order)?;
    if cumulants.k2 <= 0.0 {
        // Degenerate case (e.g. the constant process): s^2 is a point mass,
        // there is no density to expand. Warn and emit the point-mass
        // artifact instead of failing.
        eprintln!(
            "warning: the sample variance is a point mass at {} for this process \
             (kappa_2 = 0); emitting the point mass instead of a grid",
            fmt_f64(cumulants.k1)
        );
        let content = match format_of(config) {
            OutputFormat::Json => json_artifact(
                config,
                json!({
                    "kind": if cdf { "cdf" } else { "density" },
                    "point_mass_at": cumulants.k1,
                }),
            ),
            OutputFormat::Csv => csv_artifact(
                config,
                &["point_mass_at"],
                &[vec![fmt_f64(cumulants.k1)]],
            ),
        };
        emit(config.out.as_deref(), &content)?;
        return Ok(EXIT_OK);
    }

    type Evaluator = Box<dyn Fn(f64) -> Result<f64, CliError>>;
    let mut evaluators: Vec<(String, Evaluator)> = Vec::new();
    for column in &columns {
        let name = column.name();
        match column {
            Column::Normal => {
                let spec = ExpansionSpec::new(ExpansionKind::GramCharlier, 0, &cumulants)?;
                evaluators.push((
                    name,
                    Box::new(move |x| Ok(if cdf { spec.cdf(x) } else { spec.density(x) })),
                ));
            }
            Column::Gc(order) => {
                let spec = ExpansionSpec::new(ExpansionKind::GramCharlier, *order, &cumulants)?;
                evaluators.push((
                    name,
                    Box::new(move |x| Ok(if cdf { spec.cdf(x) } else { spec.density(x) })),
                ));
            }
            Column::Edgeworth(order) => {
                let spec = ExpansionSpec::new(ExpansionKind::Edgeworth, *order, &cumulants)?;
                evaluators.push((
                    name,
                    Box::new(move |x| Ok(if cdf { spec.cdf(x) } else { spec.density(x) })),
                ));
            }
            Column::Reference => {
                let sigma = config
                    .iid_normal_sigma()
                    .expect("reference column implies iid normal");
                let n = config.n;
                evaluators.push((
                    name,
                    Box::new(move |x| {
                        let (density, cdf_value) = gamma_reference(n, sigma, x.max(0.0))?;
                        Ok(if cdf { cdf_value } else { density })
                    }),
                ));
            }
        }
    }

    let step = (grid.max - grid.min) / (grid.points - 1) as f64;
    let mut header: Vec<String> = vec!["x".into()];
    header.extend(evaluators.iter().map(|(name, _)| name.clone()));
    let mut rows: Vec<Vec<String>> = Vec::with_capacity(grid.points);
    let mut json_rows: Vec<Vec<f64>> = Vec::with_capacity(grid.points);
    for k in 0..grid.points {
        let x = if k + 1 == grid.points {
            grid.max
        } else {
            grid.min + step * k as f64
        };
        let mut row_values = vec![x];
        for (_, evaluate) in &evaluators {
            row_values.push(evaluate(x)?);
        }
        rows.push(row_values.iter().map(|v| fmt_f64(*v)).collect());
        json_rows.push(row_values);
    }

    let content = match format_of(config) {
        OutputFormat::Csv => {
            let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
            csv_artifact(config, &header_refs, &rows)
        }
        OutputFormat::Json => json_artifact(
            config,
            json!({
                "kind": if cdf { "cdf" } else { "density" },
                "columns": header,
                "rows": json_rows,
            }),
        ),
    };
    emit(config.out.as_deref(), &content)?;
    Ok(EXIT_OK)
}

pub fn validate(config: &RunConfig) -> Result<i32, CliError> {
    let model = config.build_model()?;
    let tolerances = config.tolerances.unwrap_or_default();
    let max_order = config.effective_max_order();
    let mut results = validate_model(&model, config.n, max_order, &tolerances)?;

    // An i.i.d. process with an explicit finite marginal also gets the
    // exact-enumeration comparison through its product-measure twin.
    if let Some((support, probs)) = config.iid_support() {
        if let Ok(joint) = ProcessModel::finite_joint_from_iid_marginal(&support, &probs, config.n)
        {
            let oracle = exact_cumulants(&exact_law(&joint)?);
            let engine = cumulants_moment_route(&model, config.n, max_order)?;
            let pairs: Vec<(&str, f64, Option<f64>)> = vec![
                ("k1", engine.k1, Some(oracle.k1)),
                ("k2", engine.k2, Some(oracle.k2)),
                ("k3", engine.k3.unwrap_or(0.0), engine.k3.and(oracle.k3)),
                ("k4", engine.k4.unwrap_or(0.0), engine.k4.and(oracle.k4)),
            ];
            for (label, got, want) in pairs {
                if let Some(want) = want {
                    let measured = (got - want).abs();
                    let tolerance = (tolerances.relative * want.abs()).max(tolerances.absolute);
                    results.push(CheckResult {
                        name: format!("iid product-measure oracle {label}"),
                        measured,
                        tolerance,
                        passed: measured <= tolerance,
                    });
                }
            }
        }
    }

    let passed = results.iter().all(|check| check.passed);
    for check in &results {
        println!(
            "{} {} (measured {:.3e}, tolerance {:.3e})",
            if check.passed { "PASS" } else { "FAIL" },
            check.name,
            check.measured,
            check.tolerance
        );
    }
    let content = match format_of(config) {
        OutputFormat::Json => json_artifact(
            config,
            json!({"passed": passed, "checks": results}),
        ),
        OutputFormat::Csv => {
            let rows: Vec<Vec<String>> = results
                .iter()
                .map(|check| {
                    vec![
                        check.name.clone(),
                        fmt_f64(check.measured),
                        fmt_f64(check.tolerance),
                        check.passed.to_string(),
                    ]
                })
                .collect();
            csv_artifact(config, &["check", "measured", "tolerance", "passed"], &rows)
        }
    };
    if config.out.is_some() {
        emit(config.out.as_deref(), &content)?;
    }
    Ok(if passed { EXIT_OK } else { EXIT_VALIDATION_FAILED })
}

pub fn simulate(config: &RunConfig) -> Result<i32, CliError> {
    let (phi, innovation_sd) = match &config.process {
        ProcessSpec::GaussianAr1 { phi, innovation_sd } => (*phi, *innovation_sd),
        ProcessSpec::Iid {
            normal_sigma: Some(sigma),
            ..
        } => (0.0, *sigma),
        _ => {
            return Err(CliError::Config(
                "simulate needs a gaussian-ar1 process (or iid normal, simulated as phi = 0)"
                    .into(),
            ))
        }
    };
    let draws = config.draws.unwrap_or(100_000);
    let seed = config.seed.unwrap_or(0);
    let summary = simulate_ar1(phi, innovation_sd, config.n, draws, seed)?;
    let content = match format_of(config) {
        OutputFormat::Json => json_artifact(config, serde_json::to_value(&summary)?),
        OutputFormat::Csv => {
            // Histogram as CSV; the scalar summary stays in the JSON artifact.
            let rows: Vec<Vec<String>> = summary
                .histogram
                .masses
                .iter()
                .enumerate()
                .map(|(bin, mass)| {
                    vec![fmt_f64(summary.histogram.edges[bin]), fmt_f64(*mass)]
                })
                .collect();
            csv_artifact(config, &["edge", "mass"], &rows)
        }
    };
    emit(config.out.as_deref(), &content)?;
    Ok(EXIT_OK)
}

pub fn chisq_check(config: &RunConfig) -> Result<i32, CliError> {
    let covariance = config.chisq_covariance()?;
    let tol = config.chisq_tol.unwrap_or(1e-10);
    let check = svar_core::chisq_exactness_check(&covariance, tol)?;
    println!(
        "{} (max deviation {:.3e}, tolerance {:.3e})",
        if check.exact { "exact" } else { "not-exact" },
        check.max_deviation,
        tol
    );
    let content = match format_of(config) {
        OutputFormat::Json => json_artifact(
            config,
            json!({"exact": check.exact, "max_deviation": check.max_deviation, "tol": tol}),
        ),
        OutputFormat::Csv => csv_artifact(
            config,
            &["exact", "max_deviation", "tol"],
            &[vec![
                check.exact.to_string(),
                fmt_f64(check.max_deviation),
                fmt_f64(tol),
            ]],
        ),
    };
    if config.out.is_some() {
        emit(config.out.as_deref(), &content)?;
    }
    Ok(EXIT_OK)
}
