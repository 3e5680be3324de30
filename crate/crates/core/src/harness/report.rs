use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::cv::GridPoint;
use super::run::AlgorithmRun;
use crate::error::{Error, Result};
use crate::eval::{aggregate, paired_t_one_tailed, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Table,
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "table" => Ok(Format::Table),
            "csv" => Ok(Format::Csv),
            "json" | "json-like" => Ok(Format::Json),
            other => Err(Error::invalid(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub algorithm: String,
    pub mean: f64,
    pub stderr: f64,
    pub values: Vec<f64>,
    /// Best mean for this metric.
    pub best: bool,
    /// Within one standard error of the best mean (the best included).
    pub within_stderr: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricTable {
    pub metric: String,
    pub higher_is_better: bool,
    pub rows: Vec<MetricRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TTest {
    pub metric: String,
    pub a: String,
    pub b: String,
    pub verdict: Verdict,
}

/// Parameters chosen for one algorithm, per run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionTrace {
    pub algorithm: String,
    pub tag: String,
    pub points: Vec<GridPoint>,
    pub cv_scores: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub algorithms: Vec<String>,
    pub runs: usize,
    pub t_test_level: f64,
    pub metrics: Vec<MetricTable>,
    pub t_tests: Vec<TTest>,
    pub selections: Vec<SelectionTrace>,
}

impl Report {
    pub fn new(algorithms: Vec<String>, runs: usize, t_test_level: f64) -> Self {
        Report {
            algorithms,
            runs,
            t_test_level,
            metrics: Vec::new(),
            t_tests: Vec::new(),
            selections: Vec::new(),
        }
    }

    pub fn metric(&self, name: &str) -> Option<&MetricTable> {
        self.metrics.iter().find(|m| m.metric == name)
    }

    /// Aggregated row for `algorithm` under `metric`.
    pub fn row(&self, metric: &str, algorithm: &str) -> Option<&MetricRow> {
        self.metric(metric)?.rows.iter().find(|r| r.algorithm == algorithm)
    }

    /// Adds a metric from per-algorithm run values, aggregated; marks and
    /// t-tests are filled in by [`Report::finish`].
    pub fn add_metric(&mut self, metric: impl Into<String>, higher_is_better: bool, values: Vec<Vec<f64>>) -> Result<()> {
        if values.len() != self.algorithms.len() {
            return Err(Error::invalid("one value list per algorithm is required"));
        }
        let rows = self
            .algorithms
            .iter()
            .zip(values)
            .map(|(a, v)| {
                let agg = aggregate(&v)?;
                Ok(MetricRow {
                    algorithm: a.clone(),
                    mean: agg.mean,
                    stderr: agg.stderr,
                    values: v,
                    best: false,
                    within_stderr: false,
                })
            })
            .collect::<Result<_>>()?;
        self.metrics.push(MetricTable { metric: metric.into(), higher_is_better, rows });
        Ok(())
    }

    /// Adds the metrics of one experiment; `runs` is indexed `[run][algorithm]`.
    pub(crate) fn add_runs(&mut self, runs: &[Vec<AlgorithmRun>], suffix: &str, weighted: bool, emphasis: Option<f64>) -> Result<()> {
        let n = self.algorithms.len();
        let column = |f: &dyn Fn(&AlgorithmRun) -> f64| -> Vec<Vec<f64>> {
            (0..n).map(|a| runs.iter().map(|r| f(&r[a])).collect()).collect()
        };
        self.add_metric(format!("test_cost{suffix}"), false, column(&|r| r.result.test_cost))?;
        self.add_metric(format!("test_error{suffix}"), false, column(&|r| r.result.test_error))?;
        if weighted {
            self.add_metric(format!("weighted_error{suffix}"), false, column(&|r| r.result.weighted_error))?;
            self.add_metric(format!("g_mean{suffix}"), true, column(&|r| r.result.g_mean.unwrap_or(0.0)))?;
        }
        if let Some(u) = emphasis {
            self.add_metric(format!("scaled_cost{suffix}"), false, column(&|r| r.result.test_cost / u))?;
        }
        for (a, name) in self.algorithms.clone().into_iter().enumerate() {
            self.selections.push(SelectionTrace {
                algorithm: name,
                tag: suffix.to_string(),
                points: runs.iter().map(|r| r[a].point).collect(),
                cv_scores: runs.iter().map(|r| r[a].cv_score).collect(),
            });
        }
        Ok(())
    }

    /// Marks best and within-one-stderr rows and runs the pairwise t-tests.
    pub fn finish(&mut self) -> Result<()> {
        self.t_tests.clear();
        for table in &mut self.metrics {
            let sign = if table.higher_is_better { -1.0 } else { 1.0 };
            let best = (0..table.rows.len())
                .min_by(|&i, &j| (sign * table.rows[i].mean).total_cmp(&(sign * table.rows[j].mean)))
                .ok_or_else(|| Error::invalid("metric without rows"))?;
            let (bm, bs) = (sign * table.rows[best].mean, table.rows[best].stderr);
            for (i, row) in table.rows.iter_mut().enumerate() {
                row.best = i == best;
                row.within_stderr = sign * row.mean <= bm + bs;
            }
            for i in 0..table.rows.len() {
                for j in i + 1..table.rows.len() {
                    let flip = |v: &[f64]| v.iter().map(|x| sign * x).collect::<Vec<_>>();
                    let verdict = paired_t_one_tailed(&flip(&table.rows[i].values), &flip(&table.rows[j].values), self.t_test_level)?;
                    self.t_tests.push(TTest {
                        metric: table.metric.clone(),
                        a: table.rows[i].algorithm.clone(),
                        b: table.rows[j].algorithm.clone(),
                        verdict,
                    });
                }
            }
        }
        Ok(())
    }
}

fn marks(row: &MetricRow) -> &'static str {
    match (row.best, row.within_stderr) {
        (true, _) => "*+",
        (false, true) => "+",
        _ => "",
    }
}

fn emit_table(report: &Report) -> String {
    let width = report.algorithms.iter().map(|a| a.len()).max().unwrap_or(0).max(9);
    let mut out = String::new();
    for table in &report.metrics {
        let _ = writeln!(out, "{}", table.metric);
        for row in &table.rows {
            let _ = writeln!(
                out,
                "  {:<width$}  {:>12.6} ± {:<10.6} {}",
                row.algorithm,
                row.mean,
                row.stderr,
                marks(row)
            );
        }
        out.push('\n');
    }
    out.push_str("* best mean, + within one standard error of the best\n");
    if report.algorithms.len() > 1 {
        let _ = writeln!(
            out,
            "\npaired one-tailed t-tests at level {} (row vs column: < better, > worse, = tie)",
            report.t_test_level
        );
        for table in &report.metrics {
            let _ = writeln!(out, "{}", table.metric);
            let _ = write!(out, "  {:<width$}", "");
            for a in &report.algorithms {
                let _ = write!(out, " {a:>width$}");
            }
            out.push('\n');
            for a in &report.algorithms {
                let _ = write!(out, "  {a:<width$}");
                for b in &report.algorithms {
                    let cell = if a == b {
                        "."
                    } else {
                        match verdict(report, &table.metric, a, b) {
                            Some(Verdict::ABetter) => "<",
                            Some(Verdict::BBetter) => ">",
                            _ => "=",
                        }
                    };
                    let _ = write!(out, " {cell:>width$}");
                }
                out.push('\n');
            }
        }
    }
    out
}

/// Verdict of `a` against `b` on `metric`, from whichever order was tested.
pub fn verdict(report: &Report, metric: &str, a: &str, b: &str) -> Option<Verdict> {
    report.t_tests.iter().find_map(|t| {
        if t.metric != metric {
            None
        } else if t.a == a && t.b == b {
            Some(t.verdict)
        } else if t.a == b && t.b == a {
            Some(t.verdict.swapped())
        } else {
            None
        }
    })
}

fn emit_csv(report: &Report) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["algorithm".to_string(), "metric".into(), "mean".into(), "stderr".into()];
    header.extend((1..=report.runs).map(|i| format!("run_{i}")));
    w.write_record(&header).expect("in-memory write");
    for table in &report.metrics {
        for row in &table.rows {
            let mut rec = vec![row.algorithm.clone(), table.metric.clone(), row.mean.to_string(), row.stderr.to_string()];
            rec.extend(row.values.iter().map(|v| v.to_string()));
            w.write_record(&rec).expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

pub fn emit_report(report: &Report, format: Format) -> String {
    match format {
        Format::Table => emit_table(report),
        Format::Csv => emit_csv(report),
        Format::Json => serde_json::to_string_pretty(report).expect("report serializes") + "\n",
    }
}

/// One parsed CSV line of a report.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub algorithm: String,
    pub metric: String,
    pub mean: f64,
    pub stderr: f64,
    pub values: Vec<f64>,
}

pub fn parse_report_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let num = |s: &str| s.parse::<f64>().map_err(|e| Error::invalid(format!("bad number {s:?}: {e}")));
    r.records()
        .map(|rec| {
            let rec = rec?;
            if rec.len() < 4 {
                return Err(Error::invalid("report row has fewer than 4 columns"));
            }
            Ok(CsvRow {
                algorithm: rec[0].to_string(),
                metric: rec[1].to_string(),
                mean: num(&rec[2])?,
                stderr: num(&rec[3])?,
                values: rec.iter().skip(4).map(num).collect::<Result<_>>()?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two(means: (f64, f64)) -> Report {
        let mut r = Report::new(vec!["a".into(), "b".into()], 2, 0.05);
        let v = |m: f64| vec![m - 2.0, m + 2.0];
        r.add_metric("test_cost", false, vec![v(means.0), v(means.1)]).unwrap();
        r.finish().unwrap();
        r
    }

    #[test]
    fn marks_follow_one_stderr_rule() {
        let r = two((10.0, 11.0));
        let t = r.metric("test_cost").unwrap();
        assert_eq!((t.rows[0].mean, t.rows[0].stderr), (10.0, 2.0));
        assert!(t.rows[0].best && t.rows[0].within_stderr);
        assert!(!t.rows[1].best && t.rows[1].within_stderr);
        let far = two((10.0, 20.0));
        assert!(!far.metric("test_cost").unwrap().rows[1].within_stderr);
        assert!(emit_report(&r, Format::Table).contains("t-tests"));
    }

    #[test]
    fn single_algorithm_has_no_t_tests() {
        let mut r = Report::new(vec!["osr".into()], 3, 0.05);
        r.add_metric("test_cost", false, vec![vec![1.0, 2.0, 3.0]]).unwrap();
        r.finish().unwrap();
        assert!(r.metrics[0].rows[0].best);
        assert!(r.t_tests.is_empty());
        assert!(!emit_report(&r, Format::Table).contains("t-tests"));
    }

    #[test]
    fn higher_is_better_metrics() {
        let mut r = Report::new(vec!["a".into(), "b".into()], 3, 0.05);
        r.add_metric("g_mean", true, vec![vec![0.1, 0.2, 0.15], vec![0.9, 0.8, 0.85]]).unwrap();
        r.finish().unwrap();
        assert!(r.metrics[0].rows[1].best);
        assert_eq!(verdict(&r, "g_mean", "b", "a"), Some(Verdict::ABetter));
    }

    #[test]
    fn csv_round_trip() {
        let mut r = Report::new(vec!["x,y".into(), "soft-osr".into()], 3, 0.05);
        r.add_metric("test_cost", false, vec![vec![0.1, 1.0 / 3.0, 2e-17], vec![5.0, 6.25, 7.125]]).unwrap();
        r.finish().unwrap();
        let rows = parse_report_csv(&emit_report(&r, Format::Csv)).unwrap();
        assert_eq!(rows.len(), 2);
        for (row, orig) in rows.iter().zip(&r.metrics[0].rows) {
            assert_eq!(row.algorithm, orig.algorithm);
            assert_eq!((row.mean, row.stderr), (orig.mean, orig.stderr));
            assert_eq!(row.values, orig.values);
        }
        let json: Report = serde_json::from_str(&emit_report(&r, Format::Json)).unwrap();
        assert_eq!(json, r);
    }
}
