//! `sweep`: Cartesian product of parameter axes over a base scenario.
//!
//! Axis paths are dotted keys with numeric array indices, e.g.
//! `cracks.0.depth` or `rpm.rpm`. A path must name a key either present in
//! the base as written or produced by serializing the resolved base, so a
//! defaulted field can be swept without first spelling it out. Values are
//! written into the base as written and every run is parsed and resolved
//! afresh, so derived defaults follow the swept inputs.

use std::path::Path;

use rayon::prelude::*;
use rotorsim::solver::simulate;
use rotorsim::{Error, Scenario};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};
use crate::io::{create_dir, read_text, write_json};
use crate::simulate::write_run;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub path: String,
    pub values: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub base: Value,
    #[serde(default)]
    pub axes: Vec<Axis>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    InvalidInput,
    NumericalFailure,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub directory: String,
    pub assignment: Vec<Value>,
    pub status: RunStatus,
    pub message: String,
}

/// Supervised-learning label of one run.
#[derive(Debug, Serialize)]
struct Labels<'a> {
    run: usize,
    axes: serde_json::Map<String, Value>,
    cracks: &'a [rotorsim::sections::CrackSpec],
    fbo: &'a [rotorsim::solver::FboEvent],
    fod: &'a [rotorsim::solver::FodEvent],
}

impl SweepSpec {
    pub fn from_json(text: &str) -> rotorsim::Result<Self> {
        let spec: SweepSpec = serde_json::from_str(text).map_err(|e| Error::validation("sweep", e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Checks the base and that every axis path resolves.
    pub fn validate(&self) -> rotorsim::Result<()> {
        let base: Scenario = serde_json::from_value(self.base.clone()).map_err(|e| Error::validation("base", e.to_string()))?;
        let resolved = serde_json::to_value(base.resolve()?).expect("scenarios serialize");
        for (a, axis) in self.axes.iter().enumerate() {
            let field = format!("axes[{a}]");
            let segments = parse_path(&axis.path).ok_or_else(|| Error::validation(format!("{field}.path"), format!("malformed path `{}`", axis.path)))?;
            if lookup(&self.base, &segments).is_none() && lookup(&resolved, &segments).is_none() {
                return Err(Error::validation(
                    format!("{field}.path"),
                    format!("`{}` does not name a scenario field", axis.path),
                ));
            }
            if axis.values.is_empty() {
                return Err(Error::validation(format!("{field}.values"), "must not be empty"));
            }
        }
        Ok(())
    }

    /// Every combination of axis values; the first axis varies slowest.
    pub fn combinations(&self) -> Vec<Vec<Value>> {
        self.axes.iter().fold(vec![Vec::new()], |acc, axis| {
            acc.iter()
                .flat_map(|prefix| {
                    axis.values.iter().map(move |v| {
                        let mut next = prefix.clone();
                        next.push(v.clone());
                        next
                    })
                })
                .collect()
        })
    }

    /// The scenario of one combination, parsed strictly and resolved.
    pub fn scenario(&self, assignment: &[Value]) -> rotorsim::Result<Scenario> {
        let mut raw = self.base.clone();
        for (axis, value) in self.axes.iter().zip(assignment) {
            let segments = parse_path(&axis.path).expect("validated");
            assign(&mut raw, &segments, value.clone())
                .ok_or_else(|| Error::validation(axis.path.clone(), "cannot be set on this base"))?;
        }
        let scenario: Scenario = serde_json::from_value(raw).map_err(|e| Error::validation("config", e.to_string()))?;
        scenario.resolve()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Segment {
    Key(String),
    Index(usize),
}

fn parse_path(path: &str) -> Option<Vec<Segment>> {
    path.split('.')
        .map(|s| match s.parse::<usize>() {
            Ok(i) => Some(Segment::Index(i)),
            Err(_) if !s.is_empty() => Some(Segment::Key(s.to_owned())),
            Err(_) => None,
        })
        .collect()
}

fn lookup<'a>(value: &'a Value, path: &[Segment]) -> Option<&'a Value> {
    path.iter().try_fold(value, |v, s| match s {
        Segment::Key(k) => v.as_object()?.get(k),
        Segment::Index(i) => v.as_array()?.get(*i),
    })
}

/// Sets `path` to `new`, creating missing object keys along the way.
fn assign(value: &mut Value, path: &[Segment], new: Value) -> Option<()> {
    let (last, parents) = path.split_last()?;
    let mut v = value;
    for s in parents {
        v = match s {
            Segment::Key(k) => {
                let obj = v.as_object_mut()?;
                let slot = obj.entry(k.clone()).or_insert(Value::Null);
                if slot.is_null() {
                    *slot = Value::Object(Default::default());
                }
                slot
            }
            Segment::Index(i) => v.as_array_mut()?.get_mut(*i)?,
        };
    }
    match last {
        Segment::Key(k) => {
            v.as_object_mut()?.insert(k.clone(), new);
        }
        Segment::Index(i) => *v.as_array_mut()?.get_mut(*i)? = new,
    }
    Some(())
}

pub fn run_sweep(config: &Path, jobs: usize, out: &Path) -> CliResult<Vec<RunRecord>> {
    if jobs == 0 {
        return Err(Error::validation("jobs", "must be positive (got 0)").into());
    }
    let spec = SweepSpec::from_json(&read_text(config)?)?;
    create_dir(out)?;
    let combinations = spec.combinations();
    let width = combinations.len().saturating_sub(1).to_string().len().max(4);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::input(config, format!("cannot start {jobs} workers: {e}")))?;
    let records: Vec<RunRecord> = pool.install(|| {
        combinations
            .par_iter()
            .enumerate()
            .map(|(run, assignment)| execute(&spec, run, assignment, &out.join(format!("run_{run:0width$}")), width))
            .collect()
    });
    write_index(&spec, &records, &out.join("index.csv"))?;
    let failed = records.iter().filter(|r| r.status != RunStatus::Ok).count();
    if failed > 0 {
        return Err(CliError::Sweep {
            failed,
            total: records.len(),
            numerical: records.iter().any(|r| r.status == RunStatus::NumericalFailure),
        });
    }
    Ok(records)
}

fn execute(spec: &SweepSpec, run: usize, assignment: &[Value], dir: &Path, width: usize) -> RunRecord {
    let directory = format!("run_{run:0width$}");
    let outcome = (|| -> CliResult<()> {
        create_dir(dir)?;
        let scenario = spec.scenario(assignment)?;
        let labels = Labels {
            run,
            axes: spec.axes.iter().map(|a| a.path.clone()).zip(assignment.iter().cloned()).collect(),
            cracks: &scenario.cracks,
            fbo: &scenario.fbo,
            fod: &scenario.fod,
        };
        write_json(&dir.join("labels.json"), &labels)?;
        let output = simulate(&scenario)?;
        write_run(&scenario, &output, dir)?;
        Ok(())
    })();
    let (status, message) = match outcome {
        Ok(()) => (RunStatus::Ok, String::new()),
        Err(e) => {
            let status = if e.exit_code() == 2 { RunStatus::NumericalFailure } else { RunStatus::InvalidInput };
            (status, e.to_string())
        }
    };
    RunRecord {
        directory,
        assignment: assignment.to_vec(),
        status,
        message,
    }
}

fn write_index(spec: &SweepSpec, records: &[RunRecord], path: &Path) -> CliResult<()> {
    let fail = |e: csv::Error| CliError::io(path, e.into());
    let mut w = csv::Writer::from_path(path).map_err(fail)?;
    let mut header = vec!["run".to_owned(), "directory".to_owned(), "status".to_owned()];
    header.extend(spec.axes.iter().map(|a| a.path.clone()));
    header.push("message".to_owned());
    w.write_record(&header).map_err(fail)?;
    for (run, r) in records.iter().enumerate() {
        let status = serde_json::to_value(r.status).expect("status serializes");
        let mut row = vec![run.to_string(), r.directory.clone(), status.as_str().unwrap_or_default().to_owned()];
        row.extend(r.assignment.iter().map(|v| match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        }));
        row.push(r.message.clone());
        w.write_record(&row).map_err(fail)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}
