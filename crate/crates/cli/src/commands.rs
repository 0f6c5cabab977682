//! One handler per subcommand. Each returns the JSON text and a flat table;
//! [`render`] picks the encoding.

use std::sync::Arc;

use serde::Serialize;
use wtrv::data::{self, Descriptive, MomentConvention, Series};
use wtrv::fit::{self, FitResult, Model, NormalizedSample};
use wtrv::gof::{self, bootstrap_pvalue, DfConvention, GofEntry, GofReport, PValueMethod};
use wtrv::grid::quantile_grid;
use wtrv::orders::{
    check_order, emit_ratio_curve, randomized_theorem_audit, theorem_fixture, AuditReport,
    OrderTheorem, OrderVerdict, StochasticOrder, TheoremFixture, TheoremReport, FIXTURE_NAMES,
};
use wtrv::reliability::{check_theorem_conditions, classify_aging, AgingReport, ConditionReport};
use wtrv::wtrv::{table1_oracle_suite, Table1Row};
use wtrv::{construct, Distribution, DistributionHandle, WeightFunction};

use crate::table::{flag, maybe, num, short, Table};
use crate::{CliError, Command, DfRule, FitArgs, Format, GofArgs, InputArgs, OrderChoice, RunConfig};

struct Output {
    json: String,
    table: Table,
    default: Format,
}

impl Output {
    fn new<T: Serialize>(value: &T, table: Table, default: Format) -> Result<Self, CliError> {
        let json = serde_json::to_string_pretty(value).map_err(CliError::output)?;
        Ok(Self { json, table, default })
    }
}

/// Run `config` and return the encoded output.
pub fn render(config: &RunConfig) -> Result<String, CliError> {
    let out = dispatch(config)?;
    match config.format.unwrap_or(out.default) {
        Format::Json => Ok(out.json + "\n"),
        Format::Csv => out.table.to_csv(),
        Format::Table => Ok(out.table.to_text()),
    }
}

fn dispatch(config: &RunConfig) -> Result<Output, CliError> {
    let seed = config.seed;
    match &config.command {
        Command::Construct { dist, weight, points } => construct_grid(dist, *weight, *points),
        Command::CheckAging { dist, weight, theorem, grid } => match theorem {
            Some(th) => {
                let w = weight.ok_or_else(|| CliError::Usage("--theorem requires --weight".into()))?;
                conditions(check_theorem_conditions(dist.clone(), w, *th))
            }
            None => aging(&with_weight(dist, *weight)?, *grid),
        },
        Command::CheckOrder { x, y, wx, wy, order, grid } => {
            orders(&with_weight(x, *wx)?, &with_weight(y, *wy)?, *order, *grid)
        }
        Command::VerifyTheorem { target, x, y, w1, w2, emit_ratio, points, audit } => {
            if let Some(trials) = audit {
                let which: OrderTheorem = target.parse().map_err(|e: wtrv::Error| CliError::Usage(e.to_string()))?;
                return audit_report(randomized_theorem_audit(which, *trials, seed)?);
            }
            let fixture = resolve_fixture(target, x, y, *w1, *w2)?;
            if *emit_ratio {
                ratio_curve(&fixture, *points)
            } else {
                theorem(fixture.verify())
            }
        }
        Command::Table1Audit => table1(table1_oracle_suite()),
        Command::Describe { input, convention } => {
            let series = load(input)?;
            describe(&series, *convention)
        }
        Command::Fit { input, model, fit, emit_density } => {
            let series = load(input)?;
            let sample = fit::normalize(&series.values, fit.policy)?;
            let result = fit_model(&sample, *model, fit, seed)?;
            if let Some(path) = emit_density {
                std::fs::write(path, density_csv(&sample, &result)?).map_err(CliError::output)?;
            }
            fit_output(&series, &sample, result)
        }
        Command::Gof { input, model, fit, gof } => {
            let series = load(input)?;
            let sample = fit::normalize(&series.values, fit.policy)?;
            let result = fit_model(&sample, *model, fit, seed)?;
            let report = run_gof(&sample, &result, gof, seed)?;
            let mut table = gof_table();
            push_gof_rows(&mut table, &report);
            Output::new(&GofOutput { fit: &result, gof: &report }, table, Format::Json)
        }
        Command::Report { input, convention, fit, gof } => report(&load(input)?, *convention, fit, gof, seed),
        Command::Simulate { dist, weight, n } => simulate(&with_weight(dist, *weight)?, *n, seed),
    }
}

fn with_weight(dist: &DistributionHandle, w: Option<WeightFunction>) -> Result<DistributionHandle, CliError> {
    Ok(match w {
        Some(w) => Arc::new(construct(dist.clone(), w)?),
        None => dist.clone(),
    })
}

fn load(input: &InputArgs) -> Result<Series, CliError> {
    Ok(data::read_csv(&input.input, &input.column, input.year_column.as_deref())?)
}

// ---- construction and checks ----

#[derive(Serialize)]
struct GridPoint {
    x: f64,
    pdf: f64,
    cdf: f64,
    sf: f64,
}

#[derive(Serialize)]
struct ConstructOutput {
    base: String,
    weight: String,
    normalizer: f64,
    support: [f64; 2],
    points: Vec<GridPoint>,
}

fn construct_grid(dist: &DistributionHandle, w: WeightFunction, points: usize) -> Result<Output, CliError> {
    if points < 2 {
        return Err(CliError::Usage(format!("--points must be at least 2, got {points}")));
    }
    let xw = construct(dist.clone(), w)?;
    let grid: Vec<GridPoint> = quantile_grid(&xw, points)
        .into_iter()
        .map(|x| GridPoint { x, pdf: xw.pdf(x), cdf: xw.cdf(x), sf: xw.sf(x) })
        .collect();
    let mut table = Table::new(["x", "pdf", "cdf", "sf"]);
    for p in &grid {
        table.push(vec![num(p.x), num(p.pdf), num(p.cdf), num(p.sf)]);
    }
    let support = xw.support();
    let value = ConstructOutput {
        base: dist.label(),
        weight: w.to_string(),
        normalizer: xw.normalizer(),
        support: [support.lo, support.hi],
        points: grid,
    };
    Output::new(&value, table, Format::Csv)
}

fn aging(dist: &DistributionHandle, grid: usize) -> Result<Output, CliError> {
    let report: AgingReport = classify_aging(dist.as_ref(), grid)?;
    let mut table = Table::new(["class", "holds", "witness_x1", "witness_x2"]);
    for (name, holds) in report.classes.named() {
        let w = report.witnesses.get(name);
        table.push(vec![
            name.to_string(),
            flag(holds),
            w.map(|v| num(v.x1)).unwrap_or_default(),
            w.map(|v| num(v.x2)).unwrap_or_default(),
        ]);
    }
    Output::new(&report, table, Format::Json)
}

fn conditions(report: ConditionReport) -> Result<Output, CliError> {
    let mut table = Table::new(["item", "holds", "witness_x1"]);
    for h in &report.hypotheses {
        table.push(vec![h.name.clone(), flag(h.holds), h.witness.map(|v| num(v.x1)).unwrap_or_default()]);
    }
    table.push(vec![format!("conclusion: {}", report.conclusion), maybe(report.conclusion_holds), String::new()]);
    Output::new(&report, table, Format::Json)
}

fn orders(x: &DistributionHandle, y: &DistributionHandle, choice: OrderChoice, grid: usize) -> Result<Output, CliError> {
    let list: Vec<StochasticOrder> = match choice {
        OrderChoice::Lr => vec![StochasticOrder::Lr],
        OrderChoice::Fr => vec![StochasticOrder::Fr],
        OrderChoice::Rfr => vec![StochasticOrder::Rfr],
        OrderChoice::St => vec![StochasticOrder::St],
        OrderChoice::All => StochasticOrder::ALL.to_vec(),
    };
    let verdicts = list
        .into_iter()
        .map(|o| check_order(x.as_ref(), y.as_ref(), o, grid))
        .collect::<Result<Vec<OrderVerdict>, _>>()?;
    let mut table = Table::new(["order", "holds", "bounds_ok", "restricted_holds", "violation_x1", "violation_x2"]);
    for v in &verdicts {
        table.push(vec![
            v.order.to_string(),
            flag(v.holds_on_grid),
            flag(v.bounds_ok),
            flag(v.restricted_holds),
            v.first_violation.map(|w| num(w.x1)).unwrap_or_default(),
            v.first_violation.map(|w| num(w.x2)).unwrap_or_default(),
        ]);
    }
    Output::new(&verdicts, table, Format::Json)
}

fn resolve_fixture(
    target: &str,
    x: &Option<DistributionHandle>,
    y: &Option<DistributionHandle>,
    w1: Option<WeightFunction>,
    w2: Option<WeightFunction>,
) -> Result<TheoremFixture, CliError> {
    if FIXTURE_NAMES.contains(&target) {
        if x.is_some() || y.is_some() || w1.is_some() || w2.is_some() {
            return Err(CliError::Usage(format!("fixture {target} takes no --x, --y, --w1 or --w2")));
        }
        return Ok(theorem_fixture(target)?);
    }
    let theorem: OrderTheorem = target.parse().map_err(|_| {
        CliError::Usage(format!(
            "`{target}` is neither a fixture ({}) nor a theorem (thm5i, thm5ii, thm6, thm7, thm8, thm9, thm10)",
            FIXTURE_NAMES.join(", ")
        ))
    })?;
    let missing = |flag: &str| CliError::Usage(format!("{target} needs {flag}"));
    let w1 = w1.ok_or_else(|| missing("--w1"))?;
    Ok(TheoremFixture {
        name: "custom",
        theorem,
        x: x.clone().ok_or_else(|| missing("--x"))?,
        y: y.clone().ok_or_else(|| missing("--y"))?,
        w1,
        w2: w2.unwrap_or(w1),
    })
}

fn theorem(report: TheoremReport) -> Result<Output, CliError> {
    let mut table = Table::new(["item", "holds", "witness_x1"]);
    for h in &report.hypotheses {
        table.push(vec![h.name.clone(), flag(h.holds), h.witness.map(|v| num(v.x1)).unwrap_or_default()]);
    }
    table.push(vec![format!("conclusion: {}", report.conclusion), maybe(report.conclusion_holds), String::new()]);
    Output::new(&report, table, Format::Json)
}

/// Plot data is CSV whatever `--format` says.
fn ratio_curve(fixture: &TheoremFixture, points: usize) -> Result<Output, CliError> {
    let curve = emit_ratio_curve(fixture, points)?;
    let mut table = Table::new(["x", "ratio"]);
    for (x, r) in &curve {
        table.push(vec![num(*x), num(*r)]);
    }
    let csv = table.to_csv()?;
    Ok(Output { json: csv.trim_end().to_string(), table, default: Format::Csv })
}

fn audit_report(report: AuditReport) -> Result<Output, CliError> {
    let mut table = Table::new(["theorem", "requested", "attempts", "hypothesis_passing", "conclusion_passes", "inconclusive", "counterexamples"]);
    table.push(vec![
        report.theorem.to_string(),
        report.requested.to_string(),
        report.attempts.to_string(),
        report.hypothesis_passing.to_string(),
        report.conclusion_passes.to_string(),
        report.inconclusive.to_string(),
        report.counterexamples.len().to_string(),
    ]);
    Output::new(&report, table, Format::Json)
}

fn table1(rows: Vec<Table1Row>) -> Result<Output, CliError> {
    let mut table = Table::new(["row", "base", "weight", "target", "sup_norm", "passed", "note"]);
    for r in &rows {
        table.push(vec![
            r.row.to_string(),
            r.base.clone(),
            r.weight.clone(),
            r.target.clone(),
            short(r.sup_norm),
            flag(r.passed),
            r.note.clone().or_else(|| r.error.clone()).unwrap_or_default(),
        ]);
    }
    Output::new(&rows, table, Format::Json)
}

fn simulate(dist: &DistributionHandle, n: usize, seed: u64) -> Result<Output, CliError> {
    let values = wtrv::distributions::sample(dist.as_ref(), n, seed);
    let mut table = Table::new(["value"]);
    for v in &values {
        table.push(vec![num(*v)]);
    }
    #[derive(Serialize)]
    struct Simulated<'a> {
        distribution: String,
        seed: u64,
        values: &'a [f64],
    }
    let value = Simulated { distribution: dist.label(), seed, values: &values };
    Output::new(&value, table, Format::Csv)
}

// ---- data pipeline ----

fn stat_rows(table: &mut Table, d: &Descriptive) {
    for (name, v) in [
        ("n", d.n as f64),
        ("mean", d.mean),
        ("median", d.median),
        ("mode", d.mode),
        ("std_dev", d.std_dev),
        ("variance", d.variance),
        ("skewness", d.skewness),
        ("kurtosis", d.kurtosis),
        ("min", d.min),
        ("max", d.max),
    ] {
        table.push(vec![name.to_string(), num(v)]);
    }
}

#[derive(Serialize)]
struct DescribeOutput<'a> {
    label: &'a str,
    skipped: usize,
    statistics: Descriptive,
}

fn describe(series: &Series, convention: MomentConvention) -> Result<Output, CliError> {
    let statistics = data::describe(&series.values, convention)?;
    let mut table = Table::new(["statistic", "value"]);
    stat_rows(&mut table, &statistics);
    let value = DescribeOutput { label: &series.label, skipped: series.skipped, statistics };
    Output::new(&value, table, Format::Json)
}

fn fit_model(sample: &NormalizedSample, model: Model, args: &FitArgs, seed: u64) -> Result<FitResult, CliError> {
    if args.starts == 0 {
        return Err(CliError::Usage("--starts must be positive".into()));
    }
    Ok(fit::fit_mle(sample, model, args.starts, seed)?)
}

#[derive(Serialize)]
struct Normalization {
    n: usize,
    n_likelihood: usize,
    z_min: f64,
    z_max: f64,
}

impl Normalization {
    fn of(sample: &NormalizedSample) -> Self {
        Self {
            n: sample.n,
            n_likelihood: sample.likelihood_values().len(),
            z_min: sample.z_min,
            z_max: sample.z_max,
        }
    }
}

#[derive(Serialize)]
struct FitOutput<'a> {
    label: &'a str,
    normalization: Normalization,
    fit: FitResult,
}

fn fit_table() -> Table {
    Table::new(["model", "params", "loglik", "aic", "bic", "rmse"])
}

fn push_fit_row(table: &mut Table, f: &FitResult) {
    let params: Vec<String> = f.params.iter().map(|p| format!("{}={}", p.name, short(p.value))).collect();
    table.push(vec![
        f.model.to_string(),
        params.join(" "),
        short(f.loglik),
        short(f.aic),
        short(f.bic),
        short(f.rmse),
    ]);
}

fn fit_output(series: &Series, sample: &NormalizedSample, fit: FitResult) -> Result<Output, CliError> {
    let mut table = fit_table();
    push_fit_row(&mut table, &fit);
    let value = FitOutput { label: &series.label, normalization: Normalization::of(sample), fit };
    Output::new(&value, table, Format::Json)
}

/// Fitted density on the unit interval and on the original scale.
fn density_csv(sample: &NormalizedSample, fit: &FitResult) -> Result<String, CliError> {
    const POINTS: usize = 200;
    let d = fit.distribution()?;
    let span = sample.z_max - sample.z_min;
    let mut table = Table::new(["x", "pdf", "z", "pdf_z"]);
    for i in 1..=POINTS {
        let x = i as f64 / (POINTS + 1) as f64;
        let f = d.pdf(x);
        table.push(vec![num(x), num(f), num(sample.denormalize(x)), num(f / span)]);
    }
    table.to_csv()
}

fn df_convention(rule: DfRule, model: Model) -> DfConvention {
    match rule {
        DfRule::BinsMinusOne => DfConvention::BinsMinusOne,
        DfRule::BinsMinusOneMinusK => DfConvention::BinsMinusOneMinusK(model.param_count()),
        DfRule::Fixed(v) => DfConvention::Fixed(v),
    }
}

fn run_gof(sample: &NormalizedSample, fit: &FitResult, args: &GofArgs, seed: u64) -> Result<GofReport, CliError> {
    if args.tests.is_empty() {
        return Err(CliError::Usage("--tests is empty".into()));
    }
    let model = fit.distribution()?;
    let df = df_convention(args.df, fit.model);
    let mut report = gof::gof_report(sample.likelihood_values(), model.as_ref(), &args.tests, args.bins, df)?;
    if args.pvalue == PValueMethod::Bootstrap {
        let params = fit.values();
        for (i, entry) in report.tests.iter_mut().enumerate() {
            let boot = bootstrap_pvalue(
                sample,
                fit.model,
                &params,
                entry.test,
                args.replicates,
                args.bins,
                seed.wrapping_add(i as u64),
            )?;
            *entry = GofEntry {
                test: entry.test,
                statistic: boot.observed,
                p_value: boot.p_value,
                method: PValueMethod::Bootstrap,
                df: None,
            };
        }
    }
    Ok(report)
}

#[derive(Serialize)]
struct GofOutput<'a> {
    fit: &'a FitResult,
    gof: &'a GofReport,
}

fn gof_table() -> Table {
    Table::new(["model", "test", "statistic", "p_value", "method", "df"])
}

fn push_gof_rows(table: &mut Table, report: &GofReport) {
    for e in &report.tests {
        table.push(vec![
            report.model.clone(),
            e.test.to_string(),
            short(e.statistic),
            short(e.p_value),
            e.method.to_string(),
            e.df.map(num).unwrap_or_default(),
        ]);
    }
}

#[derive(Serialize)]
struct ModelSummary {
    fit: FitResult,
    gof: GofReport,
}

#[derive(Serialize)]
struct ReportOutput<'a> {
    label: &'a str,
    skipped: usize,
    statistics: Descriptive,
    normalization: Normalization,
    models: Vec<ModelSummary>,
}

fn report(
    series: &Series,
    convention: MomentConvention,
    fit_args: &FitArgs,
    gof_args: &GofArgs,
    seed: u64,
) -> Result<Output, CliError> {
    let statistics = data::describe(&series.values, convention)?;
    let sample = fit::normalize(&series.values, fit_args.policy)?;
    let mut models = Vec::new();
    for model in [Model::Beta, Model::Kw, Model::Wk] {
        let fit = fit_model(&sample, model, fit_args, seed)?;
        let gof = run_gof(&sample, &fit, gof_args, seed)?;
        models.push(ModelSummary { fit, gof });
    }

    // One long table: statistics, then fits, then tests.
    let mut table = Table::new(["section", "name", "value", "detail"]);
    let mut stats = Table::new(["statistic", "value"]);
    stat_rows(&mut stats, &statistics);
    for row in stats.rows {
        table.push(vec!["statistics".into(), row[0].clone(), row[1].clone(), String::new()]);
    }
    for m in &models {
        let f = &m.fit;
        let params: Vec<String> = f.params.iter().map(|p| format!("{}={}", p.name, num(p.value))).collect();
        let model = f.model.to_string();
        table.push(vec!["fit".into(), model.clone(), num(f.loglik), format!("loglik; {}", params.join(" "))]);
        table.push(vec!["fit".into(), model.clone(), num(f.aic), "aic".into()]);
        table.push(vec!["fit".into(), model.clone(), num(f.bic), "bic".into()]);
        table.push(vec!["fit".into(), model.clone(), num(f.rmse), "rmse".into()]);
        for e in &m.gof.tests {
            table.push(vec!["gof".into(), format!("{model} {}", e.test), num(e.statistic), "statistic".into()]);
            table.push(vec!["gof".into(), format!("{model} {}", e.test), num(e.p_value), format!("p-value ({})", e.method)]);
        }
    }
    let value = ReportOutput {
        label: &series.label,
        skipped: series.skipped,
        statistics,
        normalization: Normalization::of(&sample),
        models,
    };
    Output::new(&value, table, Format::Json)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn df_rule_maps_to_parameter_count() {
        assert_eq!(df_convention(DfRule::BinsMinusOneMinusK, Model::Wk), DfConvention::BinsMinusOneMinusK(3));
        assert_eq!(DfConvention::BinsMinusOneMinusK(3).df(10), 6.0);
    }
}
