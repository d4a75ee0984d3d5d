//! One-parameter sweeps over grid, radius or contrast, written as CSV.

use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::config::{InclusionConfig, ScenarioConfig};
use crate::error::{HarnessError, HarnessResult};
use crate::pipeline::{bound, simulate, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Grid,
    Radius,
    Contrast,
}

impl FromStr for SweepAxis {
    type Err = HarnessError;
    fn from_str(s: &str) -> HarnessResult<Self> {
        match s {
            "grid" => Ok(SweepAxis::Grid),
            "radius" => Ok(SweepAxis::Radius),
            "contrast" => Ok(SweepAxis::Contrast),
            _ => Err(HarnessError::Usage(format!("unknown sweep axis '{s}' (expected grid, radius or contrast)"))),
        }
    }
}

impl SweepAxis {
    pub fn default_values(self) -> Vec<f64> {
        match self {
            SweepAxis::Grid => vec![24.0, 32.0, 48.0, 64.0],
            SweepAxis::Radius => vec![0.1, 0.15, 0.2, 0.25],
            SweepAxis::Contrast => vec![2.0, 5.0, 10.0],
        }
    }

    fn name(self) -> &'static str {
        match self {
            SweepAxis::Grid => "grid",
            SweepAxis::Radius => "radius",
            SweepAxis::Contrast => "contrast",
        }
    }

    /// The base config with this axis set to `value`.
    pub fn apply(self, base: &ScenarioConfig, value: f64) -> HarnessResult<ScenarioConfig> {
        let mut cfg = base.clone();
        match self {
            SweepAxis::Grid => {
                if value.fract() != 0.0 || value < 1.0 {
                    return Err(HarnessError::Usage(format!("grid value {value} is not a positive integer")));
                }
                cfg.domain.grid = [value as usize; 3];
            }
            SweepAxis::Radius => match &mut cfg.inclusion {
                InclusionConfig::Sphere { radius, .. } => *radius = value,
                _ => return Err(HarnessError::Usage("radius sweep needs a sphere inclusion".into())),
            },
            SweepAxis::Contrast => cfg.materials.sigma1 = value * cfg.materials.sigma2,
        }
        cfg.output.report = None;
        cfg.output.field_dump = None;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SweepRow {
    pub axis: String,
    pub value: f64,
    pub grid: usize,
    pub sigma1: f64,
    pub sigma2: f64,
    pub realized_f1: Option<f64>,
    pub upper_trace: Option<f64>,
    pub upper_special: Option<f64>,
    pub upper_pairwise: Option<f64>,
    pub f1_star: Option<f64>,
    pub lower_general: Option<f64>,
    pub lower_special_neumann: Option<f64>,
    pub lower_milton: Option<f64>,
    pub allowance: Option<f64>,
    pub violations: Option<usize>,
    pub route_residual_a: Option<f64>,
    pub route_residual_aprime: Option<f64>,
    pub route_residual_m: Option<f64>,
    pub r1: Option<f64>,
    pub r2: Option<f64>,
    pub iterations: Option<usize>,
    pub wall_time_s: f64,
    pub error: Option<String>,
}

impl SweepRow {
    fn fill(&mut self, rep: &Report) {
        let b = &rep.bounds;
        let v = |x: Option<incbound_core::bounds::BoundValue<f64>>| x.map(|b| b.value);
        self.realized_f1 = Some(rep.truth_f1);
        self.upper_trace = v(b.upper_trace);
        self.upper_special = v(b.upper_special);
        self.upper_pairwise = v(b.upper_pairwise);
        self.f1_star = b.feasible_interval.as_ref().map(|f| f.f1_star);
        self.lower_general = v(b.lower_general);
        self.lower_special_neumann = v(b.lower_special_neumann);
        self.lower_milton = v(b.lower_milton);
        self.allowance = Some(b.allowance);
        self.violations = Some(b.violations.len());
        self.route_residual_a = rep.response.route_residuals.a;
        self.route_residual_aprime = rep.response.route_residuals.aprime;
        self.route_residual_m = rep.response.route_residuals.m;
        self.r1 = rep.attainability.and_then(|a| a.r1);
        self.r2 = rep.attainability.map(|a| a.r2);
        let s = &rep.solver;
        self.iterations = Some(
            s.dirichlet.iter().flat_map(|d| d.iter().map(|x| x.iterations)).chain(s.neumann.map(|n| n.iterations)).sum(),
        );
    }
}

/// Runs the base scenario once per value; a failed run is recorded in its
/// row and the sweep continues.
pub fn sweep(base: &ScenarioConfig, axis: SweepAxis, values: &[f64]) -> Vec<SweepRow> {
    values
        .iter()
        .map(|&value| {
            let start = Instant::now();
            let mut row = SweepRow { axis: axis.name().into(), value, ..SweepRow::default() };
            let result = axis.apply(base, value).and_then(|cfg| {
                row.grid = cfg.domain.grid[0];
                row.sigma1 = cfg.materials.sigma1;
                row.sigma2 = cfg.materials.sigma2;
                bound(&simulate(&cfg)?)
            });
            match result {
                Ok(rep) => row.fill(&rep),
                Err(e) => row.error = Some(e.to_string()),
            }
            row.wall_time_s = start.elapsed().as_secs_f64();
            row
        })
        .collect()
}

pub fn write_csv<W: Write>(w: W, rows: &[SweepRow]) -> HarnessResult<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r).map_err(|e| HarnessError::Io(format!("csv: {e}")))?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failed_runs_are_recorded() {
        let base = ScenarioConfig::sphere(6, 0.2, 2.0, 1.0);
        let rows = sweep(&base, SweepAxis::Radius, &[0.0, 0.9]);
        assert!(rows[0].error.is_none(), "{:?}", rows[0].error);
        assert!(rows[1].error.as_deref().unwrap().contains("inside"));
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.starts_with("axis,value,grid"));
    }

    #[test]
    fn axis_parsing() {
        assert_eq!("grid".parse::<SweepAxis>().unwrap(), SweepAxis::Grid);
        assert_eq!("nope".parse::<SweepAxis>().unwrap_err().exit_code(), 2);
    }
}
