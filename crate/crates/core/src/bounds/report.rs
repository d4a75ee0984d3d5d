use serde::{Deserialize, Serialize};

use super::feasibility::{feasibility_interval, Feasibility, ScanOptions};
use super::gfunc::GValue;
use super::lower::{lower_bound_general, lower_bound_special_neumann};
use super::upper::{pairwise_bound_affine, upper_bound_special, upper_bound_trace, BoundValue};
use crate::tensor::{check_conductivities, limit_tensor_with, Matrix3, PhaseAverage, Tensor4};
use crate::{Real, Result};

/// Normalized, diagonalized Dirichlet measurements.
#[derive(Debug, Clone)]
pub struct DirichletInputs<T> {
    pub lambda: [T; 3],
    /// `M` in the eigenbasis of `A`.
    pub m: Tensor4<T>,
    /// Set for `V⁰ = x` data, where `A` is the Dirichlet tensor.
    pub affine: bool,
}

/// Normalized Neumann measurements.
#[derive(Debug, Clone)]
pub struct NeumannInputs<T> {
    pub aprime: Matrix3<T>,
    /// Set for `q = −n` data, where `A′⁻¹` is the Neumann tensor.
    pub special: bool,
    pub g: Option<GValue<T>>,
}

#[derive(Debug, Clone)]
pub struct BoundInputs<T> {
    pub sigma1: T,
    pub sigma2: T,
    pub dirichlet: Option<DirichletInputs<T>>,
    pub neumann: Option<NeumannInputs<T>>,
    pub truth: Option<T>,
    /// Declared discretization allowance used by [`BoundReport::violations`].
    pub allowance: T,
    pub scan: ScanOptions,
}

/// Numeric limit tensor coefficients against the closed form at one `f₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitDiscrepancy {
    pub f1: f64,
    pub a_numeric: f64,
    pub a_closed: f64,
    pub b_numeric: f64,
    pub b_closed: f64,
    /// `max |numeric − closed_form|` over all entries.
    pub max_abs: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct BoundReport<T> {
    pub upper_trace: Option<BoundValue<T>>,
    pub upper_special: Option<BoundValue<T>>,
    pub upper_pairwise: Option<BoundValue<T>>,
    pub feasible_interval: Option<Feasibility>,
    pub lower_general: Option<BoundValue<T>>,
    pub lower_special_neumann: Option<BoundValue<T>>,
    pub lower_milton: Option<BoundValue<T>>,
    /// Set when `σ₁I − σ_N` is singular.
    pub lower_milton_singular: bool,
    pub g: Option<GValue<T>>,
    pub limit_tensor: Option<LimitDiscrepancy>,
    pub truth: Option<T>,
    pub allowance: T,
    pub notes: Vec<String>,
}

/// Tolerance of the `f₁* ≤ upper_trace` consistency check.
pub const FEASIBILITY_SLACK: f64 = 1e-6;

fn record<T>(notes: &mut Vec<String>, what: &str, r: Result<T>) -> Option<T> {
    r.map_err(|e| notes.push(format!("{what}: {e}"))).ok()
}

/// Evaluates every applicable bound. Failures of individual bounds are
/// recorded in `notes`; only invalid conductivities are an error.
pub fn evaluate<T: Real>(inp: &BoundInputs<T>) -> Result<BoundReport<T>> {
    let (s1, s2) = (inp.sigma1, inp.sigma2);
    check_conductivities(s1, s2)?;
    let mut notes = Vec::new();
    let mut rep = BoundReport {
        upper_trace: None,
        upper_special: None,
        upper_pairwise: None,
        feasible_interval: None,
        lower_general: None,
        lower_special_neumann: None,
        lower_milton: None,
        lower_milton_singular: false,
        g: inp.neumann.as_ref().and_then(|n| n.g),
        limit_tensor: None,
        truth: inp.truth,
        allowance: inp.allowance,
        notes: Vec::new(),
    };

    if let Some(d) = &inp.dirichlet {
        rep.upper_trace = record(&mut notes, "upper_trace", upper_bound_trace(d.lambda, &d.m, s1, s2));
        let a = Matrix3::from_diagonal(d.lambda);
        if d.affine {
            rep.upper_special = record(&mut notes, "upper_special", upper_bound_special(&a, s1, s2));
            rep.upper_pairwise = record(&mut notes, "upper_pairwise", pairwise_bound_affine(d.lambda, &d.m, s1, s2));
        }
        rep.feasible_interval = record(&mut notes, "feasible_interval", feasibility_interval(&a, &d.m, s1, s2, &inp.scan));
        if let Some(f) = &rep.feasible_interval {
            if !f.interval_structure {
                notes.push("feasible_interval: feasible set is not an interval on the pre-scan".into());
            }
        }
    }

    if let Some(n) = &inp.neumann {
        match n.g {
            Some(g) => {
                rep.lower_general = record(&mut notes, "lower_general", lower_bound_general(n.aprime.trace(), g.value, s1, s2));
            }
            None => notes.push("lower_general: no g or g⁻ available, bound not produced".into()),
        }
        if n.special {
            match n.aprime.symmetric_part().inverse() {
                Some(sn) => {
                    if let Some(b) = record(&mut notes, "lower_special_neumann", lower_bound_special_neumann(&sn, s1, s2)) {
                        rep.lower_special_neumann = Some(b.translation);
                        rep.lower_milton = Some(b.resolvent);
                        rep.lower_milton_singular = b.resolvent_singular;
                    }
                }
                None => notes.push("lower_special_neumann: A' is singular".into()),
            }
        }
    }

    let f_ref = inp.truth.map(|t| t.as_f64()).or(rep.feasible_interval.as_ref().map(|f| f.f1_star));
    if let Some(f) = f_ref.filter(|&f| f > 0.0) {
        let pa = PhaseAverage::new(T::lit(f), s1, s2)?;
        if let Some(lim) = record(&mut notes, "limit_tensor", limit_tensor_with(&pa, &inp.scan.limit_exponents)) {
            rep.limit_tensor = Some(LimitDiscrepancy {
                f1: f,
                a_numeric: lim.a_numeric.as_f64(),
                a_closed: lim.a_closed.as_f64(),
                b_numeric: lim.b_numeric.as_f64(),
                b_closed: lim.b_closed.map_or(f64::NAN, |b| b.as_f64()),
                max_abs: lim.discrepancy.map_or(0.0, |d| d.as_f64()),
            });
        }
    }

    for (name, b) in rep.named_bounds() {
        if b.was_clamped() {
            notes.push(format!("{name}: raw value {} clamped to {}", b.raw, b.value));
        }
    }
    rep.notes = notes;
    Ok(rep)
}

impl<T: Real> BoundReport<T> {
    /// `(name, value)` of every produced upper bound.
    pub fn upper_bounds(&self) -> Vec<(&'static str, BoundValue<T>)> {
        [("upper_trace", self.upper_trace), ("upper_special", self.upper_special), ("upper_pairwise", self.upper_pairwise)]
            .into_iter()
            .filter_map(|(n, b)| b.map(|b| (n, b)))
            .collect()
    }

    pub fn lower_bounds(&self) -> Vec<(&'static str, BoundValue<T>)> {
        [
            ("lower_general", self.lower_general),
            ("lower_special_neumann", self.lower_special_neumann),
            ("lower_milton", self.lower_milton),
        ]
        .into_iter()
        .filter_map(|(n, b)| b.map(|b| (n, b)))
        .collect()
    }

    fn named_bounds(&self) -> Vec<(&'static str, BoundValue<T>)> {
        let mut v = self.upper_bounds();
        v.extend(self.lower_bounds());
        v
    }

    /// Violations of the validity sandwich and of `f₁* ≤ upper_trace`.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let tol = self.allowance;
        if let Some(t) = self.truth {
            for (name, b) in self.lower_bounds() {
                if b.value > t + tol {
                    out.push(format!("{name} = {} exceeds f1 = {t} + {tol}", b.value));
                }
            }
            for (name, b) in self.upper_bounds() {
                if b.value < t - tol {
                    out.push(format!("{name} = {} below f1 = {t} - {tol}", b.value));
                }
            }
            if let Some(f) = &self.feasible_interval {
                if f.f1_bracket_high < t.as_f64() - tol.as_f64() {
                    out.push(format!("feasible f1* bracket [{}, {}] below f1 = {t} - {tol}", f.f1_star, f.f1_bracket_high));
                }
            }
        }
        if let (Some(f), Some(u)) = (&self.feasible_interval, self.upper_trace) {
            if f.f1_star > u.value.as_f64() + FEASIBILITY_SLACK {
                out.push(format!("feasible f1* = {} exceeds upper_trace = {}", f.f1_star, u.value));
            }
        }
        out
    }
}
