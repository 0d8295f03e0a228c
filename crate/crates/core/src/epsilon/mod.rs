//! Approximate stateless sections: target sets, Chebyshev centers,
//! obstruction depth and Helly checks.
//!
//! An ε-section over a patch assigns to each interpretable input a value
//! within ε of every target value over that input. Feasibility at one input
//! is therefore the question whether the Chebyshev radius of the targets
//! (restricted to the output domain) is at most ε. Comparisons use an
//! absolute tolerance of [`EPS_TOL`]; values within it of ε are reported as
//! marginal.

mod meb;

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Execution;

pub use meb::{circumball, min_enclosing_ball, Ball, MAX_DIMENSION};

/// Absolute tolerance of every ε comparison.
pub const EPS_TOL: f64 = 1e-9;

/// Iterations of the projected subgradient method on constrained domains.
pub const SUBGRADIENT_STEPS: usize = 500;

/// Largest patch family [`obstruction_depth`] searches.
pub const MAX_PATCHES: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EpsilonError {
    #[error("empty point set")]
    EmptyInput,
    #[error("epsilon must be non-negative, got {0}")]
    NegativeEpsilon(f64),
    #[error("point of dimension {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dimension {dimension} exceeds the supported bound {bound}")]
    DimensionTooLarge { dimension: usize, bound: usize },
    #[error("value of input `{0}` is not finite")]
    NotFinite(String),
    #[error("value of input `{0}` does not lie on the probability simplex")]
    OffSimplex(String),
    #[error("box bounds must have the instance dimension and lo <= hi")]
    BadBox,
    #[error("duplicate input `{0}`")]
    DuplicateInput(String),
    #[error("unknown input `{0}`")]
    UnknownInput(String),
    #[error("{count} patches exceed the search bound {bound}")]
    TooManyPatches { count: usize, bound: usize },
    #[error("no ε-section over the union at `{fiber}`")]
    Infeasible { fiber: String },
    #[error("value of patch {patch} at `{fiber}` is not within ε of its targets")]
    InvalidSection { patch: usize, fiber: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Euclidean,
    /// Distance 0 between equal points, 1 otherwise.
    Discrete,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum OutputDomain {
    #[default]
    Full,
    /// Section values are confined to the box; targets may lie outside it.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// The probability simplex `{y ≥ 0, Σ y = 1}`.
    Simplex,
}

impl OutputDomain {
    fn project(&self, y: &DVector<f64>) -> DVector<f64> {
        match self {
            OutputDomain::Full => y.clone(),
            OutputDomain::Box { lo, hi } => {
                DVector::from_fn(y.len(), |i, _| y[i].clamp(lo[i], hi[i]))
            }
            OutputDomain::Simplex => project_to_simplex(y),
        }
    }

    fn contains(&self, y: &DVector<f64>) -> bool {
        match self {
            OutputDomain::Full => true,
            OutputDomain::Box { lo, hi } => {
                (0..y.len()).all(|i| y[i] >= lo[i] - EPS_TOL && y[i] <= hi[i] + EPS_TOL)
            }
            OutputDomain::Simplex => {
                y.iter().all(|&v| v >= -EPS_TOL) && (y.sum() - 1.0).abs() <= EPS_TOL
            }
        }
    }

    /// The value used where no target constrains a section.
    fn canonical_point(&self, dim: usize) -> DVector<f64> {
        match self {
            OutputDomain::Full => DVector::zeros(dim),
            OutputDomain::Box { lo, .. } => DVector::from_column_slice(lo),
            OutputDomain::Simplex => DVector::from_element(dim, 1.0 / dim as f64),
        }
    }
}

/// Euclidean projection onto the probability simplex (sort and threshold).
pub fn project_to_simplex(y: &DVector<f64>) -> DVector<f64> {
    let mut u: Vec<f64> = y.iter().copied().collect();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (k, &v) in u.iter().enumerate() {
        cumulative += v;
        let t = (cumulative - 1.0) / (k + 1) as f64;
        if v - t > 0.0 {
            theta = t;
        }
    }
    y.map(|v| (v - theta).max(0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDoc {
    pub name: String,
    /// `j_I` of the input.
    pub fiber: String,
    /// `j_O(f(i))`.
    pub value: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonDoc {
    pub dimension: usize,
    #[serde(default)]
    pub metric: Metric,
    #[serde(default)]
    pub domain: OutputDomain,
    pub inputs: Vec<InputDoc>,
    /// Patches as lists of input names.
    pub patches: Vec<Vec<String>>,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Input {
    pub name: String,
    pub fiber: String,
    pub value: DVector<f64>,
}

/// A stateless system with pre-interpreted outputs in `ℝ^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonInstance {
    dimension: usize,
    metric: Metric,
    domain: OutputDomain,
    inputs: Vec<Input>,
}

/// A checked instance together with a patch family and an ε.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonProblem {
    pub instance: EpsilonInstance,
    /// Patches as sorted input positions.
    pub patches: Vec<Vec<usize>>,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetSet {
    pub fiber: String,
    pub points: Vec<DVector<f64>>,
    /// Some input of the patch lies over `fiber`.
    pub in_image: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityResult {
    pub center: Vec<f64>,
    /// Largest distance from `center` to a target.
    pub radius: f64,
    /// A lower bound on the true constrained radius.
    pub lower_bound: f64,
    pub feasible: bool,
    /// Within tolerance of flipping, or not certified either way on a
    /// constrained domain.
    pub marginal: bool,
    /// No target constrains the value.
    pub unconstrained: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Depth {
    pub k: usize,
    /// Positions of a smallest infeasible subfamily of patches.
    pub subfamily: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DepthReport {
    pub fiber: String,
    pub epsilon: f64,
    /// Largest Chebyshev radius over pairs of patches.
    pub radius_pairwise: f64,
    pub radius_full: f64,
    pub depth: Option<usize>,
    pub subfamily: Vec<usize>,
}

impl EpsilonInstance {
    pub fn new(
        dimension: usize,
        metric: Metric,
        domain: OutputDomain,
        mut inputs: Vec<Input>,
    ) -> Result<Self, EpsilonError> {
        if dimension > MAX_DIMENSION {
            return Err(EpsilonError::DimensionTooLarge {
                dimension,
                bound: MAX_DIMENSION,
            });
        }
        if let OutputDomain::Box { lo, hi } = &domain {
            if lo.len() != dimension
                || hi.len() != dimension
                || lo.iter().zip(hi).any(|(a, b)| a > b)
            {
                return Err(EpsilonError::BadBox);
            }
        }
        inputs.sort_by(|a, b| a.name.cmp(&b.name));
        for w in inputs.windows(2) {
            if w[0].name == w[1].name {
                return Err(EpsilonError::DuplicateInput(w[0].name.clone()));
            }
        }
        for i in &inputs {
            if i.value.len() != dimension {
                return Err(EpsilonError::DimensionMismatch {
                    expected: dimension,
                    found: i.value.len(),
                });
            }
            if !i.value.iter().all(|v| v.is_finite()) {
                return Err(EpsilonError::NotFinite(i.name.clone()));
            }
            if domain == OutputDomain::Simplex && !domain.contains(&i.value) {
                return Err(EpsilonError::OffSimplex(i.name.clone()));
            }
        }
        Ok(EpsilonInstance {
            dimension,
            metric,
            domain,
            inputs,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn domain(&self) -> &OutputDomain {
        &self.domain
    }

    pub fn inputs(&self) -> &[Input] {
        &self.inputs
    }

    pub fn position(&self, name: &str) -> Result<usize, EpsilonError> {
        self.inputs
            .binary_search_by(|i| i.name.as_str().cmp(name))
            .map_err(|_| EpsilonError::UnknownInput(name.to_string()))
    }

    /// Interpretable inputs, sorted.
    pub fn fibers(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self.inputs.iter().map(|i| i.fiber.as_str()).collect();
        set.into_iter().map(String::from).collect()
    }

    /// Every input position, as the patch covering the whole system.
    pub fn whole(&self) -> Vec<usize> {
        (0..self.inputs.len()).collect()
    }
}

impl EpsilonProblem {
    pub fn from_doc(doc: &EpsilonDoc) -> Result<Self, EpsilonError> {
        let instance = EpsilonInstance::new(
            doc.dimension,
            doc.metric,
            doc.domain.clone(),
            doc.inputs
                .iter()
                .map(|i| Input {
                    name: i.name.clone(),
                    fiber: i.fiber.clone(),
                    value: DVector::from_column_slice(&i.value),
                })
                .collect(),
        )?;
        if doc.epsilon < 0.0 {
            return Err(EpsilonError::NegativeEpsilon(doc.epsilon));
        }
        let patches = doc
            .patches
            .iter()
            .map(|p| {
                let mut v = p
                    .iter()
                    .map(|n| instance.position(n))
                    .collect::<Result<Vec<_>, _>>()?;
                v.sort_unstable();
                v.dedup();
                Ok(v)
            })
            .collect::<Result<Vec<_>, EpsilonError>>()?;
        Ok(EpsilonProblem {
            instance,
            patches,
            epsilon: doc.epsilon,
        })
    }

    pub fn to_doc(&self) -> EpsilonDoc {
        let inst = &self.instance;
        EpsilonDoc {
            dimension: inst.dimension,
            metric: inst.metric,
            domain: inst.domain.clone(),
            inputs: inst
                .inputs
                .iter()
                .map(|i| InputDoc {
                    name: i.name.clone(),
                    fiber: i.fiber.clone(),
                    value: i.value.iter().copied().collect(),
                })
                .collect(),
            patches: self
                .patches
                .iter()
                .map(|p| p.iter().map(|&k| inst.inputs[k].name.clone()).collect())
                .collect(),
            epsilon: self.epsilon,
        }
    }
}

/// Targets `j_O(f(i))` for the inputs of `patch` over `fiber`.
pub fn target_set(inst: &EpsilonInstance, patch: &[usize], fiber: &str) -> TargetSet {
    let points: Vec<DVector<f64>> = patch
        .iter()
        .map(|&k| &inst.inputs[k])
        .filter(|i| i.fiber == fiber)
        .map(|i| i.value.clone())
        .collect();
    TargetSet {
        fiber: fiber.to_string(),
        in_image: !points.is_empty(),
        points,
    }
}

fn max_distance(metric: Metric, y: &DVector<f64>, points: &[DVector<f64>]) -> f64 {
    points
        .iter()
        .map(|p| match metric {
            Metric::Euclidean => (p - y).norm(),
            Metric::Discrete => {
                if p == y {
                    0.0
                } else {
                    1.0
                }
            }
        })
        .fold(0.0, f64::max)
}

/// Chebyshev center within the output domain: `(center, radius, lower bound)`.
fn chebyshev(
    inst: &EpsilonInstance,
    points: &[DVector<f64>],
) -> Result<(DVector<f64>, f64, f64), EpsilonError> {
    if points.is_empty() {
        return Ok((inst.domain.canonical_point(inst.dimension), 0.0, 0.0));
    }
    if inst.metric == Metric::Discrete {
        let r = max_distance(Metric::Discrete, &points[0], points);
        return Ok((points[0].clone(), r, r));
    }
    let ball = min_enclosing_ball(points)?;
    if inst.domain.contains(&ball.center) {
        return Ok((ball.center, ball.radius, ball.radius));
    }
    let mut y = inst.domain.project(&ball.center);
    let mut best = (y.clone(), max_distance(Metric::Euclidean, &y, points));
    let scale = best.1.max(f64::MIN_POSITIVE);
    for t in 1..=SUBGRADIENT_STEPS {
        let far = points
            .iter()
            .max_by(|a, b| (*a - &y).norm().total_cmp(&(*b - &y).norm()))
            .expect("non-empty");
        let d = &y - far;
        let n = d.norm();
        if n == 0.0 {
            break;
        }
        y = inst
            .domain
            .project(&(&y - d * (scale / (t as f64).sqrt() / n)));
        let r = max_distance(Metric::Euclidean, &y, points);
        if r < best.1 {
            best = (y.clone(), r);
        }
    }
    Ok((best.0, best.1, ball.radius))
}

/// Whether an ε-section value exists for one target set.
pub fn feasibility(
    inst: &EpsilonInstance,
    targets: &TargetSet,
    eps: f64,
) -> Result<FeasibilityResult, EpsilonError> {
    if eps < 0.0 || eps.is_nan() {
        return Err(EpsilonError::NegativeEpsilon(eps));
    }
    let (center, radius, lower_bound) = chebyshev(inst, &targets.points)?;
    let feasible = radius <= eps + EPS_TOL;
    let marginal = (radius - eps).abs() <= EPS_TOL || (!feasible && lower_bound <= eps + EPS_TOL);
    Ok(FeasibilityResult {
        center: center.iter().copied().collect(),
        radius,
        lower_bound,
        feasible,
        marginal,
        unconstrained: !targets.in_image,
    })
}

/// Chebyshev radius of the union of the given patches over `fiber`.
pub fn union_radius(
    inst: &EpsilonInstance,
    patches: &[&[usize]],
    fiber: &str,
) -> Result<f64, EpsilonError> {
    let union: Vec<usize> = patches.iter().flat_map(|p| p.iter().copied()).collect();
    Ok(chebyshev(inst, &target_set(inst, &union, fiber).points)?.1)
}

fn feasible_union(
    inst: &EpsilonInstance,
    patches: &[&[usize]],
    fiber: &str,
    eps: f64,
) -> Result<bool, EpsilonError> {
    Ok(union_radius(inst, patches, fiber)? <= eps + EPS_TOL)
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Smallest infeasible subfamily of `patches` at `fiber`, searching by size
/// and then lexicographically; `None` when the whole family is feasible.
pub fn obstruction_depth(
    inst: &EpsilonInstance,
    patches: &[Vec<usize>],
    eps: f64,
    fiber: &str,
    exec: Execution,
) -> Result<Option<Depth>, EpsilonError> {
    if eps < 0.0 {
        return Err(EpsilonError::NegativeEpsilon(eps));
    }
    if patches.len() > MAX_PATCHES {
        return Err(EpsilonError::TooManyPatches {
            count: patches.len(),
            bound: MAX_PATCHES,
        });
    }
    let all: Vec<&[usize]> = patches.iter().map(Vec::as_slice).collect();
    if feasible_union(inst, &all, fiber, eps)? {
        return Ok(None);
    }
    for k in 1..=patches.len() {
        let combos = combinations(patches.len(), k);
        let hit = exec.find_map_first(&combos, |c| {
            let fam: Vec<&[usize]> = c.iter().map(|&a| patches[a].as_slice()).collect();
            match feasible_union(inst, &fam, fiber, eps) {
                Ok(true) => None,
                Ok(false) => Some(Ok(c.clone())),
                Err(e) => Some(Err(e)),
            }
        });
        if let Some(r) = hit {
            return Ok(Some(Depth { k, subfamily: r? }));
        }
    }
    unreachable!("the full family is infeasible")
}

pub fn depth_report(
    inst: &EpsilonInstance,
    patches: &[Vec<usize>],
    eps: f64,
    fiber: &str,
    exec: Execution,
) -> Result<DepthReport, EpsilonError> {
    let all: Vec<&[usize]> = patches.iter().map(Vec::as_slice).collect();
    let radius_full = union_radius(inst, &all, fiber)?;
    let mut radius_pairwise = if patches.len() < 2 { radius_full } else { 0.0 };
    for pair in combinations(patches.len(), 2) {
        let r = union_radius(inst, &[&patches[pair[0]], &patches[pair[1]]], fiber)?;
        radius_pairwise = radius_pairwise.max(r);
    }
    let depth = obstruction_depth(inst, patches, eps, fiber, exec)?;
    Ok(DepthReport {
        fiber: fiber.to_string(),
        epsilon: eps,
        radius_pairwise,
        radius_full,
        depth: depth.as_ref().map(|d| d.k),
        subfamily: depth.map(|d| d.subfamily).unwrap_or_default(),
    })
}

/// A glued ε-section value at one interpretable input.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GluedValue {
    pub value: Vec<f64>,
    pub unconstrained: bool,
}

/// Glues per-patch ε-sections (values keyed by interpretable input) into a
/// section over the union, using the Chebyshev center at each input.
pub fn eps_glue(
    inst: &EpsilonInstance,
    patches: &[Vec<usize>],
    sections: &[BTreeMap<String, Vec<f64>>],
    eps: f64,
) -> Result<BTreeMap<String, GluedValue>, EpsilonError> {
    if eps < 0.0 {
        return Err(EpsilonError::NegativeEpsilon(eps));
    }
    for (a, (patch, g)) in patches.iter().zip(sections).enumerate() {
        for fiber in inst.fibers() {
            let targets = target_set(inst, patch, &fiber);
            if !targets.in_image {
                continue;
            }
            let bad = || EpsilonError::InvalidSection {
                patch: a,
                fiber: fiber.clone(),
            };
            let v = g.get(&fiber).ok_or_else(bad)?;
            if v.len() != inst.dimension {
                return Err(bad());
            }
            let y = DVector::from_column_slice(v);
            if max_distance(inst.metric, &y, &targets.points) > eps + EPS_TOL {
                return Err(bad());
            }
        }
    }
    let union: Vec<usize> = {
        let set: BTreeSet<usize> = patches.iter().flatten().copied().collect();
        set.into_iter().collect()
    };
    inst.fibers()
        .into_iter()
        .map(|fiber| {
            let r = feasibility(inst, &target_set(inst, &union, &fiber), eps)?;
            if !r.feasible {
                return Err(EpsilonError::Infeasible { fiber });
            }
            Ok((
                fiber,
                GluedValue {
                    value: r.center,
                    unconstrained: r.unconstrained,
                },
            ))
        })
        .collect()
}

/// Vertices of a regular simplex with `d + 1` vertices in `ℝ^d`, edge `√2`.
pub fn regular_simplex(d: usize) -> Vec<DVector<f64>> {
    let mut out: Vec<DVector<f64>> = (0..d)
        .map(|i| DVector::from_fn(d, |j, _| if i == j { 1.0 } else { 0.0 }))
        .collect();
    let t = (1.0 - ((d + 1) as f64).sqrt()) / d as f64;
    out.push(DVector::from_element(d, t));
    out
}

/// Singleton patches at the vertices of a regular simplex, one fiber, with ε
/// halfway between the facet and full circumradii.
pub fn simplex_problem(d: usize) -> Result<EpsilonProblem, EpsilonError> {
    let verts = regular_simplex(d);
    let inputs: Vec<Input> = verts
        .iter()
        .enumerate()
        .map(|(k, v)| Input {
            name: format!("v{k}"),
            fiber: "⋆".into(),
            value: v.clone(),
        })
        .collect();
    let full = min_enclosing_ball(&verts)?.radius;
    let facet = min_enclosing_ball(&verts[..d])?.radius;
    let instance = EpsilonInstance::new(d, Metric::Euclidean, OutputDomain::Full, inputs)?;
    Ok(EpsilonProblem {
        patches: (0..=d).map(|k| vec![k]).collect(),
        instance,
        epsilon: (full + facet) / 2.0,
    })
}

#[cfg(test)]
mod tests;
