//! Summary reports: a method-versus-baselines table over five metrics,
//! rendered as Markdown and as machine-readable CSV.

use serde::{Deserialize, Serialize};

use crate::baselines::{
    case1_random_scores, case2_input_norm_scores, case3_untrained_model_scores, NormalizationSpec,
    RandomModelConfig, ScoreForm, WindowSpec,
};
use crate::curves::roc_pr;
use crate::error::Result;
use crate::io::format_sig9;
use crate::protocol::ProtocolConfig;
use crate::series::{LabelSeries, ScoreSeries, TimeSeries};
use crate::sweep::{k_sweep, sweep_best_f1, ThresholdCandidates};

/// The five headline metrics for one score series.
///
/// `f1` and `f1_pa` come from independent best-F1 sweeps; `pa_k_auc` is the
/// area under the F1-vs-K curve evaluated at the best point-wise threshold
/// (a fixed-threshold curve, so its K=100 endpoint equals `f1`); `auroc` and
/// `aupr` are threshold-free.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreEvaluation {
    pub f1: f64,
    pub f1_pa: f64,
    pub pa_k_auc: f64,
    pub auroc: f64,
    pub aupr: f64,
    pub best_point_threshold: f64,
    pub best_pa_threshold: f64,
}

/// Evaluate one score series against labels across all headline metrics.
pub fn evaluate_scores(
    scores: &ScoreSeries,
    labels: &LabelSeries,
    k_grid: &[f64],
    candidates: &ThresholdCandidates,
) -> Result<ScoreEvaluation> {
    let point = sweep_best_f1(scores, labels, &ProtocolConfig::point(), candidates)?;
    let pa = sweep_best_f1(scores, labels, &ProtocolConfig::point_adjust(), candidates)?;
    let curve = k_sweep(scores, labels, point.best_threshold, k_grid)?;
    let curves = roc_pr(scores, labels)?;
    Ok(ScoreEvaluation {
        f1: point.best_f1,
        f1_pa: pa.best_f1,
        pa_k_auc: curve.auc,
        auroc: curves.auroc,
        aupr: curves.aupr,
        best_point_threshold: point.best_threshold,
        best_pa_threshold: pa.best_threshold,
    })
}

/// Mean and sample standard deviation over repeated runs (std is 0 for a
/// single run).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub mean: f64,
    pub std: f64,
}

fn summarize(values: &[f64]) -> MetricSummary {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() < 2 {
        0.0
    } else {
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        (ss / (n - 1.0)).sqrt()
    };
    MetricSummary { mean, std }
}

/// One table row: a named score source with summarized metrics. `improved`
/// is `None` for the baseline rows themselves and `Some(verdict)` for method
/// rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub name: String,
    pub f1: MetricSummary,
    pub f1_pa: MetricSummary,
    pub pa_k_auc: MetricSummary,
    pub auroc: MetricSummary,
    pub aupr: MetricSummary,
    pub improved: Option<bool>,
}

/// The full comparison table: Case 1-3 baseline rows followed by method rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub rows: Vec<ReportRow>,
    pub repeats: usize,
}

/// Everything needed to build a report.
pub struct ReportInputs<'a> {
    pub test: &'a TimeSeries,
    /// Training series for normalization; `None` falls back to the test
    /// series itself.
    pub train: Option<&'a TimeSeries>,
    pub labels: &'a LabelSeries,
    /// Named external score series to compare against the baselines.
    pub methods: &'a [(String, ScoreSeries)],
    pub wspec: WindowSpec,
    pub nspec: NormalizationSpec,
    pub form: ScoreForm,
    pub hidden_size: usize,
    pub weight_sigma: f64,
    pub seed: u64,
    pub repeats: usize,
    pub k_grid: &'a [f64],
    pub candidates: ThresholdCandidates,
}

fn summarize_rows(name: &str, evals: &[ScoreEvaluation]) -> ReportRow {
    let pull = |f: fn(&ScoreEvaluation) -> f64| summarize(&evals.iter().map(f).collect::<Vec<_>>());
    ReportRow {
        name: name.to_string(),
        f1: pull(|e| e.f1),
        f1_pa: pull(|e| e.f1_pa),
        pa_k_auc: pull(|e| e.pa_k_auc),
        auroc: pull(|e| e.auroc),
        aupr: pull(|e| e.aupr),
        improved: None,
    }
}

/// Build the comparison table. Randomized baselines (Cases 1 and 3) run
/// `repeats` times with seeds `seed, seed+1, …` and report mean ± std;
/// Case 2 and external methods are deterministic and run once.
///
/// A method row is marked improved only when its point-wise F1 strictly
/// exceeds both input-norm baselines' (Cases 2 and 3) and its PA F1 strictly
/// exceeds the random-score baseline's (Case 1) — beating only the adjusted
/// metric is exactly what a random scorer achieves.
pub fn build_report(inputs: &ReportInputs<'_>) -> Result<Report> {
    let repeats = inputs.repeats.max(1);
    let candidates = &inputs.candidates;

    let mut case1_evals = Vec::with_capacity(repeats);
    let mut case3_evals = Vec::with_capacity(repeats);
    for i in 0..repeats {
        let seed = inputs.seed + i as u64;
        let c1 = case1_random_scores(inputs.labels.len(), seed)?;
        case1_evals.push(evaluate_scores(
            &c1,
            inputs.labels,
            inputs.k_grid,
            candidates,
        )?);
        let mconfig = RandomModelConfig::new(inputs.hidden_size, inputs.weight_sigma, seed)?;
        let c3 = case3_untrained_model_scores(
            inputs.test,
            inputs.train,
            &inputs.wspec,
            &inputs.nspec,
            inputs.form,
            &mconfig,
        )?;
        case3_evals.push(evaluate_scores(
            &c3,
            inputs.labels,
            inputs.k_grid,
            candidates,
        )?);
    }
    let c2 = case2_input_norm_scores(
        inputs.test,
        inputs.train,
        &inputs.wspec,
        &inputs.nspec,
        inputs.form,
    )?;
    let case2_eval = evaluate_scores(&c2, inputs.labels, inputs.k_grid, candidates)?;

    let case1_row = summarize_rows("case1-random", &case1_evals);
    let case2_row = summarize_rows("case2-input-norm", &[case2_eval]);
    let case3_row = summarize_rows("case3-untrained", &case3_evals);

    let f1_bar = case2_row.f1.mean.max(case3_row.f1.mean);
    let f1_pa_bar = case1_row.f1_pa.mean;

    let mut rows = vec![case1_row, case2_row, case3_row];
    for (name, scores) in inputs.methods {
        let eval = evaluate_scores(scores, inputs.labels, inputs.k_grid, candidates)?;
        let mut row = summarize_rows(name, &[eval]);
        row.improved = Some(row.f1.mean > f1_bar && row.f1_pa.mean > f1_pa_bar);
        rows.push(row);
    }
    Ok(Report { rows, repeats })
}

fn format_summary(s: &MetricSummary) -> String {
    if s.std > 0.0 {
        format!("{:.4} ± {:.4}", s.mean, s.std)
    } else {
        format!("{:.4}", s.mean)
    }
}

/// Render the report as a Markdown table. Method rows carry an up or down
/// marker for the improvement verdict; baseline rows carry a dash.
pub fn to_markdown(report: &Report) -> String {
    let mut out = String::new();
    out.push_str("| method | F1 | F1_PA | F1_PA%K AUC | AUROC | AUPR | vs baselines |\n");
    out.push_str("|---|---|---|---|---|---|---|\n");
    for row in &report.rows {
        let marker = match row.improved {
            None => "—",
            Some(true) => "↑",
            Some(false) => "↓",
        };
        out.push_str(&format!(
            "| {} | {} | {} | {} | {} | {} | {} |\n",
            row.name,
            format_summary(&row.f1),
            format_summary(&row.f1_pa),
            format_summary(&row.pa_k_auc),
            format_summary(&row.auroc),
            format_summary(&row.aupr),
            marker,
        ));
    }
    out
}

/// Render the report as CSV with 9-significant-digit numbers.
pub fn to_csv(report: &Report) -> String {
    let mut out = String::from(
        "method,f1_mean,f1_std,f1_pa_mean,f1_pa_std,pa_k_auc_mean,pa_k_auc_std,\
         auroc_mean,auroc_std,aupr_mean,aupr_std,improved\n",
    );
    for row in &report.rows {
        let verdict = match row.improved {
            None => "",
            Some(true) => "yes",
            Some(false) => "no",
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            row.name,
            format_sig9(row.f1.mean),
            format_sig9(row.f1.std),
            format_sig9(row.f1_pa.mean),
            format_sig9(row.f1_pa.std),
            format_sig9(row.pa_k_auc.mean),
            format_sig9(row.pa_k_auc.std),
            format_sig9(row.auroc.mean),
            format_sig9(row.auroc.std),
            format_sig9(row.aupr.mean),
            format_sig9(row.aupr.std),
            verdict,
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::default_k_grid;
    use crate::synth::{generate, BaseSignal, InjectionKind, InjectionSpec, SynthSpec};

    fn small_dataset() -> (TimeSeries, TimeSeries, LabelSeries) {
        let spec = SynthSpec {
            t_len: 400,
            channels: 2,
            base_signal: BaseSignal::SineMix,
            noise_std: 0.1,
            seed: 77,
            injections: vec![InjectionSpec {
                kind: InjectionKind::Point,
                start: 150,
                end: 200,
                channels: vec![0, 1],
                magnitude: 8.0,
            }],
        };
        let data = generate(&spec).unwrap();
        (data.train, data.test, data.test_labels)
    }

    fn small_inputs<'a>(
        train: &'a TimeSeries,
        test: &'a TimeSeries,
        labels: &'a LabelSeries,
        methods: &'a [(String, ScoreSeries)],
        k_grid: &'a [f64],
    ) -> ReportInputs<'a> {
        ReportInputs {
            test,
            train: Some(train),
            labels,
            methods,
            wspec: WindowSpec::last(20).unwrap(),
            nspec: NormalizationSpec::minmax(),
            form: ScoreForm::ScaledL2,
            hidden_size: 8,
            weight_sigma: 0.02_f64.sqrt(),
            seed: 1,
            repeats: 3,
            k_grid,
            candidates: ThresholdCandidates::AllUniqueScores,
        }
    }

    #[test]
    fn perfect_method_is_marked_improved_and_noise_is_not() {
        let (train, test, labels) = small_dataset();
        let perfect = ScoreSeries::new(
            labels.as_slice().iter().map(|&v| f64::from(v)).collect(),
            "perfect",
        )
        .unwrap();
        let noise = case1_random_scores(labels.len(), 999).unwrap();
        let methods = vec![
            ("perfect".to_string(), perfect),
            ("noise".to_string(), noise),
        ];
        let k_grid = default_k_grid();
        let report =
            build_report(&small_inputs(&train, &test, &labels, &methods, &k_grid)).unwrap();

        assert_eq!(report.rows.len(), 5);
        assert_eq!(report.rows[0].improved, None);
        let perfect_row = &report.rows[3];
        assert_eq!(perfect_row.improved, Some(true), "{perfect_row:?}");
        assert!((perfect_row.f1.mean - 1.0).abs() < 1e-12);
        let noise_row = &report.rows[4];
        assert_eq!(noise_row.improved, Some(false), "{noise_row:?}");
    }

    #[test]
    fn rendering_contains_all_rows_and_markers() {
        let (train, test, labels) = small_dataset();
        let methods = vec![(
            "perfect".to_string(),
            ScoreSeries::new(
                labels.as_slice().iter().map(|&v| f64::from(v)).collect(),
                "perfect",
            )
            .unwrap(),
        )];
        let k_grid = default_k_grid();
        let report =
            build_report(&small_inputs(&train, &test, &labels, &methods, &k_grid)).unwrap();
        let md = to_markdown(&report);
        assert!(md.contains("case1-random"));
        assert!(md.contains("case2-input-norm"));
        assert!(md.contains("case3-untrained"));
        assert!(md.contains("↑"));
        let csv = to_csv(&report);
        assert_eq!(csv.lines().count(), 1 + report.rows.len());
        assert!(csv.lines().nth(4).unwrap().ends_with("yes"));
    }

    #[test]
    fn randomized_rows_report_spread_across_seeds() {
        let (train, test, labels) = small_dataset();
        let methods: Vec<(String, ScoreSeries)> = vec![];
        let k_grid = default_k_grid();
        let report =
            build_report(&small_inputs(&train, &test, &labels, &methods, &k_grid)).unwrap();
        assert!(report.rows[0].f1.std > 0.0, "case1 varies across seeds");
        assert_eq!(report.rows[1].f1.std, 0.0, "case2 is deterministic");
    }
}
