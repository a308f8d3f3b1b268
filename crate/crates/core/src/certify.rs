//! Budget constants, budget inequalities and absence-of-eigenvalue verdicts.
//!
//! Every constant `c` enters through its square `c² = sup ∫W|ψ|² / ∫|∇_Aψ|²`
//! for a nonnegative weight `W`, computed variationally on a truncated grid
//! or bounded pointwise by `ess sup W / (±B)`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::eigensolve::{sup_rayleigh, SolverOptions};
use crate::error::{Error, Result};
use crate::field::{AngularFluxDensity, VectorPotentialField};
use crate::forms::{assemble_dirichlet_form, assemble_weight, assemble_weighted_dirichlet_form, hamiltonian_form, Sign};
use crate::hardy::GridSummary;
use crate::mesh::{GridSpec, Point, PolarGrid};
use crate::potential::PotentialModel;
use crate::scalar::Real;

/// Strict budget inequalities are decided as `value ≤ 1 - STRICT_SLACK`.
pub const STRICT_SLACK: f64 = 1e-9;
/// Largest relative change of a squared constant over the last doubling of
/// `r_max` for the variational value to be trusted.
pub const SWEEP_DRIFT: f64 = 0.01;
/// `ε` used when the optimal choice would be zero.
pub const EPSILON_FLOOR: f64 = 1e-6;

/// Constants of the budget inequalities (not squared).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Budget {
    pub a1: f64,
    pub a2: f64,
    pub b: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub b4: f64,
    pub b5: f64,
    pub b6: f64,
    pub epsilon: Option<f64>,
    pub d: usize,
    pub beta: Option<f64>,
}

impl Budget {
    pub fn new() -> Self {
        Self {
            d: 2,
            ..Self::default()
        }
    }

    fn slot(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "a1" => &mut self.a1,
            "a2" => &mut self.a2,
            "b" => &mut self.b,
            "b1" => &mut self.b1,
            "b2" => &mut self.b2,
            "b3" => &mut self.b3,
            "b4" => &mut self.b4,
            "b5" => &mut self.b5,
            "b6" => &mut self.b6,
            _ => return None,
        })
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        let mut c = *self;
        c.slot(name).map(|v| *v)
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let slot = self
            .slot(name)
            .ok_or_else(|| Error::Rejected(format!("unknown budget constant '{name}'")))?;
        *slot = value;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum TheoremId {
    #[serde(rename = "Thm1")]
    Thm1,
    #[serde(rename = "Thm2_budget")]
    Thm2Budget,
    #[serde(rename = "Thm3_nsa")]
    Thm3Nsa,
    #[serde(rename = "Thm4_robust")]
    Thm4Robust,
    #[serde(rename = "Thm5_AB")]
    Thm5Ab,
}

impl TheoremId {
    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::Thm1 => "Thm1",
            TheoremId::Thm2Budget => "Thm2_budget",
            TheoremId::Thm3Nsa => "Thm3_nsa",
            TheoremId::Thm4Robust => "Thm4_robust",
            TheoremId::Thm5Ab => "Thm5_AB",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Certified,
    NotCertified,
    Inapplicable,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Certified => "certified",
            Verdict::NotCertified => "not_certified",
            Verdict::Inapplicable => "inapplicable",
        }
    }
}

/// How a constant was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Variational,
    Pointwise,
    Supplied,
}

/// One strict inequality `value < limit` entering a verdict.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Condition {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub holds: bool,
}

impl Condition {
    fn strict(name: &str, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            holds: value <= limit - STRICT_SLACK,
        }
    }
}

/// Squared constant values at each swept radius and the relative drift over
/// the last step.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantDrift {
    pub name: String,
    pub r_max: Vec<f64>,
    pub squared: Vec<f64>,
    pub relative_drift: f64,
    pub stable: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub grid: Option<GridSummary>,
    pub conditions: Vec<Condition>,
    pub provenance: BTreeMap<String, Provenance>,
    pub sweep: Vec<ConstantDrift>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateReport {
    pub theorem_id: TheoremId,
    pub constants: Budget,
    pub budget_value: f64,
    pub margin: f64,
    pub verdict: Verdict,
    pub diagnostics: Diagnostics,
}

impl CertificateReport {
    fn decide(theorem_id: TheoremId, constants: Budget, budget_value: f64, mut conditions: Vec<Condition>) -> Self {
        conditions.push(Condition::strict("budget", budget_value, 1.0));
        let verdict = if conditions.iter().all(|c| c.holds) {
            Verdict::Certified
        } else {
            Verdict::NotCertified
        };
        Self {
            theorem_id,
            constants,
            budget_value,
            margin: 1.0 - budget_value,
            verdict,
            diagnostics: Diagnostics {
                conditions,
                ..Diagnostics::default()
            },
        }
    }

    /// Report for a theorem whose hypotheses the scenario does not meet.
    pub fn inapplicable(theorem_id: TheoremId, constants: Budget, note: &str) -> Self {
        Self {
            theorem_id,
            constants,
            budget_value: f64::INFINITY,
            margin: f64::NEG_INFINITY,
            verdict: Verdict::Inapplicable,
            diagnostics: Diagnostics {
                notes: vec![note.into()],
                ..Diagnostics::default()
            },
        }
    }

    /// Attaches the constants' provenance and sweep record. A certified
    /// verdict is withdrawn when a constant that enters the budget drifted
    /// beyond [`SWEEP_DRIFT`] and no pointwise bound replaced it.
    pub fn with_constants(mut self, computed: &ComputedConstants) -> Self {
        self.diagnostics.grid = computed.grid;
        for e in &computed.entries {
            self.diagnostics.provenance.insert(e.name.clone(), e.provenance);
        }
        self.diagnostics.sweep = computed.sweep.clone();
        self.diagnostics.notes.extend(computed.notes.iter().cloned());
        let unstable: Vec<&str> = computed
            .entries
            .iter()
            .filter(|e| !e.stable && e.value > 0.0)
            .map(|e| e.name.as_str())
            .collect();
        if !unstable.is_empty() && self.verdict == Verdict::Certified {
            self.verdict = Verdict::NotCertified;
            self.diagnostics.notes.push(format!(
                "certification withheld: constants {} are not stable under r_max doubling",
                unstable.join(", ")
            ));
        }
        self
    }
}

fn below_one(names: &[&str], b: &Budget) -> Vec<Condition> {
    names
        .iter()
        .map(|n| Condition::strict(n, b.get(n).unwrap_or(f64::NAN), 1.0))
        .collect()
}

/// `b₁ + b₂² + b₃² + b₄ < 1` together with `b < 1`.
pub fn check_budget_thm1(budget: &Budget) -> CertificateReport {
    let value = budget.b1 + budget.b2.powi(2) + budget.b3.powi(2) + budget.b4;
    CertificateReport::decide(TheoremId::Thm1, *budget, value, below_one(&["b", "b1"], budget))
}

/// `b₁ + b₂² + (d-1) b₃² + b₄ < 1`; pure arithmetic in `d`.
pub fn check_budget_multi(d: usize, budget: &Budget) -> CertificateReport {
    let mut constants = *budget;
    constants.d = d;
    if d == 0 {
        return CertificateReport::inapplicable(TheoremId::Thm2Budget, constants, "dimension must be at least 1");
    }
    let value = budget.b1 + budget.b2.powi(2) + (d as f64 - 1.0) * budget.b3.powi(2) + budget.b4;
    let mut r = CertificateReport::decide(TheoremId::Thm2Budget, constants, value, below_one(&["b", "b1"], budget));
    if d != 2 {
        r.diagnostics
            .notes
            .push("arithmetic only: constants were supplied for a dimension without a grid".into());
    }
    r
}

/// Outcome of the positivity precondition of the non-self-adjoint theorem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ObviousOutcome {
    Holds,
    Fails,
    PointwiseShortcut,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObviousCheck {
    pub outcome: ObviousOutcome,
    /// Largest eigenvalue of `1/(2r)` against `∫r|∇_Aψ|² + ∫r Re V₊ |ψ|²`.
    pub constant: Option<f64>,
    pub converged: bool,
    pub notes: Vec<String>,
}

/// Pointwise shortcut `Re V₊ ≥ 1/(4r²)` at every unknown, otherwise the
/// variational test `sup ∫|ψ|²/(2r) / (∫r|∇_Aψ|² + ∫r Re V₊|ψ|²) ≤ 1`.
pub fn check_obvious_condition<T: Real>(
    a: &VectorPotentialField<T>,
    v: &PotentialModel<T>,
    grid: &PolarGrid<T>,
    opts: &SolverOptions<T>,
) -> Result<ObviousCheck> {
    let shortcut = grid.nodes().iter().enumerate().all(|(k, n)| {
        grid.dof_of_node(k).is_none() || {
            let r = n.r;
            r > T::zero() && v.v_plus(n.point) * T::lit(4.0) * r * r >= T::one()
        }
    });
    if shortcut {
        return Ok(ObviousCheck {
            outcome: ObviousOutcome::PointwiseShortcut,
            constant: None,
            converged: true,
            notes: vec![
                "Re V₊ ≥ 1/(4r²) is not integrable at infinity; the shortcut is used on the truncated domain".into(),
            ],
        });
    }
    let k = assemble_weighted_dirichlet_form(a, grid, |r| r)?;
    let pot = assemble_weight(grid, |p: Point<T>| p.r() * v.v_plus(p))?;
    let form = hamiltonian_form(&k, &pot)?;
    let w = assemble_weight(grid, |p: Point<T>| T::one() / (T::two() * p.r()))?;
    let c = sup_rayleigh(&w, &form, opts)?;
    let value = c.value.to_f64_lossy();
    Ok(ObviousCheck {
        outcome: if value <= 1.0 {
            ObviousOutcome::Holds
        } else {
            ObviousOutcome::Fails
        },
        constant: Some(value),
        converged: c.converged,
        notes: Vec::new(),
    })
}

/// `b₁ + b₂² + b₃² + b₄ + b₅ + b₆a₂ < 1` with `a₁, a₂ < 1`, under the
/// positivity precondition. The pointwise shortcut drops `b₅` and `b₆`.
pub fn check_budget_nsa(budget: &Budget, obvious: ObviousOutcome) -> CertificateReport {
    let mut b = *budget;
    if obvious == ObviousOutcome::PointwiseShortcut {
        b.b5 = 0.0;
        b.b6 = 0.0;
    }
    let value = b.b1 + b.b2.powi(2) + b.b3.powi(2) + b.b4 + b.b5 + b.b6 * b.a2;
    let mut conditions = below_one(&["a1", "a2", "b1"], &b);
    conditions.push(Condition {
        name: "obvious".into(),
        value: if obvious == ObviousOutcome::Fails { 1.0 } else { 0.0 },
        limit: 1.0,
        holds: obvious != ObviousOutcome::Fails,
    });
    CertificateReport::decide(TheoremId::Thm3Nsa, b, value, conditions)
}

fn auto_epsilon(optimal: f64) -> f64 {
    if optimal > 0.0 {
        optimal.min(1.0)
    } else {
        EPSILON_FLOOR
    }
}

/// `b₁ + b₂² + b₃² + b₄ + b₅ + b₆a₂ + 17a₂²/ε + 4ε < 1`; `ε` defaults to the
/// minimiser `(√17/2) a₂`.
pub fn check_budget_robust(budget: &Budget, epsilon: Option<f64>) -> CertificateReport {
    let eps = epsilon.unwrap_or_else(|| auto_epsilon(17f64.sqrt() / 2.0 * budget.a2));
    let mut b = *budget;
    b.epsilon = Some(eps);
    let base = b.b1 + b.b2.powi(2) + b.b3.powi(2) + b.b4 + b.b5 + b.b6 * b.a2;
    let value = if eps > 0.0 {
        base + 17.0 * b.a2.powi(2) / eps + 4.0 * eps
    } else {
        f64::INFINITY
    };
    let mut r = CertificateReport::decide(TheoremId::Thm4Robust, b, value, below_one(&["a1", "a2", "b1"], &b));
    if epsilon.is_none() {
        r.diagnostics.notes.push(format!("epsilon chosen automatically: {eps}"));
    }
    r
}

/// Aharonov–Bohm budget
/// `b₂² + b₃² + b₄ + b₅ + b₆a₂ + (1/4 - β²)(ε + a₂²/(β²ε)) < 1` with `b₁`
/// absent; `ε` defaults to `a₂/β`.
pub fn check_budget_ab<T: Real>(alpha: &AngularFluxDensity<T>, budget: &Budget, epsilon: Option<f64>) -> CertificateReport {
    let beta = alpha.flux_distance().to_f64_lossy();
    let mut b = *budget;
    b.beta = Some(beta);
    b.b1 = 0.0;
    if beta == 0.0 {
        return CertificateReport::inapplicable(
            TheoremId::Thm5Ab,
            b,
            "integer total flux (β = 0): the potential can be gauged out",
        );
    }
    let eps = epsilon.unwrap_or_else(|| auto_epsilon(b.a2 / beta));
    b.epsilon = Some(eps);
    let gap = 0.25 - beta * beta;
    let base = b.b2.powi(2) + b.b3.powi(2) + b.b4 + b.b5 + b.b6 * b.a2;
    let value = if eps > 0.0 {
        base + gap * eps + gap * b.a2.powi(2) / (beta * beta * eps)
    } else {
        f64::INFINITY
    };
    let mut r = CertificateReport::decide(TheoremId::Thm5Ab, b, value, below_one(&["a1", "a2"], &b));
    if epsilon.is_none() {
        r.diagnostics.notes.push(format!("epsilon chosen automatically: {eps}"));
    }
    r
}

/// A constant with its square and origin.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantValue {
    pub name: String,
    pub squared: f64,
    pub value: f64,
    pub provenance: Provenance,
    pub converged: bool,
    pub iterations: usize,
    pub stable: bool,
}

/// Constants of one theorem together with the budget they populate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComputedConstants {
    pub budget: Budget,
    pub entries: Vec<ConstantValue>,
    pub grid: Option<GridSummary>,
    pub sweep: Vec<ConstantDrift>,
    pub notes: Vec<String>,
}

impl ComputedConstants {
    pub fn entry(&self, name: &str) -> Option<&ConstantValue> {
        self.entries.iter().find(|e| e.name == name)
    }
}

/// Which family of constants to compute.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantSet {
    /// `b, b₁ … b₄` of the self-adjoint theorem.
    SelfAdjoint,
    /// Adds `a₁, a₂, b₅, b₆` for complex potentials.
    NonSelfAdjoint,
}

type WeightFn<'a, T> = Box<dyn Fn(Point<T>) -> T + 'a>;

fn weights<'a, T: Real>(
    set: ConstantSet,
    a: &'a VectorPotentialField<T>,
    v: &'a PotentialModel<T>,
) -> Vec<(&'static str, WeightFn<'a, T>)> {
    let four = T::lit(4.0);
    let mut w: Vec<(&'static str, WeightFn<'a, T>)> = vec![
        ("b", Box::new(move |p| v.v_minus(p))),
        (
            "b1",
            Box::new(move |p| {
                let (r, b) = (p.r(), a.field_value(p));
                four * r * r * b * b
            }),
        ),
        ("b2", Box::new(move |p| v.d_rv1_plus(p))),
        ("b3", Box::new(move |p| v.v2_abs(p))),
        ("b4", Box::new(move |p| four * v.r2_v2_sq(p))),
    ];
    if set == ConstantSet::NonSelfAdjoint {
        w.push(("a1", Box::new(move |p| v.v_minus(p))));
        w.push(("a2", Box::new(move |p| v.im_abs(p))));
        w.push(("b5", Box::new(move |p| four * v.r2_im_sq(p))));
        w.push(("b5_display", Box::new(move |p| four * v.r2_im_abs(p))));
        w.push(("b6", Box::new(move |p| v.r2_re_minus_sq(p))));
    }
    w
}

fn fill_budget(entries: &[ConstantValue]) -> Budget {
    let mut budget = Budget::new();
    for e in entries {
        if e.name == "b5" || e.name == "b5_display" {
            budget.b5 = budget.b5.max(e.value);
        } else {
            budget.set(&e.name, e.value).expect("known constant");
        }
    }
    budget
}

fn variational_constants<T: Real>(
    set: ConstantSet,
    a: &VectorPotentialField<T>,
    v: &PotentialModel<T>,
    grid: &PolarGrid<T>,
    opts: &SolverOptions<T>,
) -> Result<ComputedConstants> {
    if set == ConstantSet::SelfAdjoint && !v.is_real() {
        return Err(Error::Rejected(
            "the self-adjoint constants need a real potential; use the non-self-adjoint set".into(),
        ));
    }
    let k = assemble_dirichlet_form(a, grid)?;
    let mut entries = Vec::new();
    let mut notes = Vec::new();
    for (name, w) in weights(set, a, v) {
        let wm = assemble_weight(grid, w)?;
        let c = sup_rayleigh(&wm, &k, opts)?;
        if !c.converged {
            notes.push(format!("solver for {name} did not reach the requested tolerance"));
        }
        let sq = c.value.to_f64_lossy();
        entries.push(ConstantValue {
            name: name.into(),
            squared: sq,
            value: sq.sqrt(),
            provenance: Provenance::Variational,
            converged: c.converged,
            iterations: c.iterations,
            stable: true,
        });
    }
    if set == ConstantSet::NonSelfAdjoint {
        let b5 = entries.iter().find(|e| e.name == "b5").map(|e| e.squared);
        let alt = entries.iter().find(|e| e.name == "b5_display").map(|e| e.squared);
        if let (Some(x), Some(y)) = (b5, alt) {
            notes.push(format!(
                "b5 weight 4r²|Im V|² gives b5² = {x}; the displayed weight 4r²|Im V| gives {y}; the larger drives the budget"
            ));
        }
    }
    Ok(ComputedConstants {
        budget: fill_budget(&entries),
        entries,
        grid: Some(GridSummary::of(grid)),
        sweep: Vec::new(),
        notes,
    })
}

/// `b² = sup(V₋)`, `b₁² = sup(4r²|B|²)`, `b₂² = sup([∂_r(rV⁽¹⁾)]₊)`,
/// `b₃² = sup(|V⁽²⁾|)`, `b₄² = sup(4r²|V⁽²⁾|²)` against `∫|∇_Aψ|²`.
pub fn constants_thm1<T: Real>(
    a: &VectorPotentialField<T>,
    v: &PotentialModel<T>,
    grid: &PolarGrid<T>,
    opts: &SolverOptions<T>,
) -> Result<ComputedConstants> {
    variational_constants(ConstantSet::SelfAdjoint, a, v, grid, opts)
}

/// [`constants_thm1`] plus `a₁² = sup(Re V₋)`, `a₂² = sup(|Im V|)`,
/// `b₅² = sup(4r²|Im V|²)` (and the variant `4r²|Im V|`, the larger of the
/// two is kept) and `b₆² = sup(r²|Re V₋|²)`.
pub fn constants_nsa<T: Real>(
    a: &VectorPotentialField<T>,
    v: &PotentialModel<T>,
    grid: &PolarGrid<T>,
    opts: &SolverOptions<T>,
) -> Result<ComputedConstants> {
    variational_constants(ConstantSet::NonSelfAdjoint, a, v, grid, opts)
}

/// Squared pointwise bounds `ess sup W / (±B)` for one sign choice.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointwiseBounds {
    pub sign: Sign,
    /// Squared bounds by constant name; `f64::INFINITY` where the numerator
    /// is positive but `±B ≤ 0`.
    pub squared: BTreeMap<String, f64>,
    pub applicable: bool,
}

impl PointwiseBounds {
    pub fn max_ratio(&self) -> f64 {
        self.squared.values().copied().fold(0.0, f64::max)
    }

    /// Fills a budget from the bounds (square roots).
    pub fn budget(&self) -> Budget {
        let mut b = Budget::new();
        for (k, v) in &self.squared {
            b.set(k, v.sqrt()).expect("known constant");
        }
        b
    }
}

/// Both sign choices and the selected one.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointwiseChoice {
    pub selected: PointwiseBounds,
    pub other: PointwiseBounds,
}

/// Pointwise route: for each sign, the essential sup over unknowns of
/// `V₋, 4r²|B|², [∂_r(rV⁽¹⁾)]₊, |V⁽²⁾|, 4r²|V⁽²⁾|²` divided by `±B`, over
/// nodes where the numerator is positive. The sign with the smaller maximum
/// is selected.
///
/// A node sitting on a jump of a radial field is a null set; there the
/// more favourable one-sided limit of `B` is used.
pub fn pointwise_sufficient<T: Real>(
    a: &VectorPotentialField<T>,
    v: &PotentialModel<T>,
    grid: &PolarGrid<T>,
) -> Result<PointwiseChoice> {
    let plus = pointwise_for(Sign::Plus, a, v, grid)?;
    let minus = pointwise_for(Sign::Minus, a, v, grid)?;
    Ok(if minus.max_ratio() < plus.max_ratio() {
        PointwiseChoice {
            selected: minus,
            other: plus,
        }
    } else {
        PointwiseChoice {
            selected: plus,
            other: minus,
        }
    })
}

fn pointwise_for<T: Real>(
    sign: Sign,
    a: &VectorPotentialField<T>,
    v: &PotentialModel<T>,
    grid: &PolarGrid<T>,
) -> Result<PointwiseBounds> {
    let s: T = sign.factor();
    let profile = a.flux_function().map(|f| f.profile().clone());
    let mut sup: BTreeMap<String, f64> = BTreeMap::new();
    let ws = weights(ConstantSet::SelfAdjoint, a, v);
    for (name, _) in &ws {
        sup.insert((*name).into(), 0.0);
    }
    for (k, n) in grid.nodes().iter().enumerate() {
        if grid.dof_of_node(k).is_none() {
            continue;
        }
        let p = n.point;
        let mut fields = vec![s * a.field_value(p)];
        if let Some(prof) = &profile {
            fields.push(s * prof.field_left(n.r));
        }
        for (name, w) in &ws {
            let num = if *name == "b1" {
                // 4r²|B|² with B taken on the same side as the divisor.
                None
            } else {
                Some(w(p))
            };
            let mut best = f64::INFINITY;
            for &sb in &fields {
                let numer = num.unwrap_or_else(|| T::lit(4.0) * n.r * n.r * sb * sb);
                if !numer.is_finite() {
                    return Err(crate::mesh::non_finite(k, n, "pointwise numerator"));
                }
                let ratio = if numer <= T::zero() {
                    0.0
                } else if sb > T::zero() {
                    (numer / sb).to_f64_lossy()
                } else {
                    f64::INFINITY
                };
                best = best.min(ratio);
            }
            let e = sup.get_mut(*name).expect("inserted");
            *e = e.max(best);
        }
    }
    let applicable = sup.values().all(|v| v.is_finite());
    Ok(PointwiseBounds {
        sign,
        squared: sup,
        applicable,
    })
}

/// Constants over increasing truncation radii. The values at the largest
/// radius are kept when their squared drift over the last step is at most
/// [`SWEEP_DRIFT`]; a drifting constant falls back to its finite pointwise
/// bound when one is supplied and is otherwise marked unstable.
pub fn constants_sweep<T: Real>(
    set: ConstantSet,
    a: &VectorPotentialField<T>,
    v: &PotentialModel<T>,
    spec: &GridSpec<T>,
    radii: &[T],
    opts: &SolverOptions<T>,
    pointwise: Option<&PointwiseBounds>,
) -> Result<ComputedConstants> {
    if radii.is_empty() {
        return Err(Error::Rejected("sweep needs at least one radius".into()));
    }
    let mut runs = Vec::with_capacity(radii.len());
    for &r in radii {
        let g = spec.with_r_max(r).build()?;
        runs.push(variational_constants(set, a, v, &g, opts)?);
    }
    let mut resolved = runs.pop().expect("radii is non-empty");
    let prev = runs.last();
    let r_list: Vec<f64> = radii.iter().map(|r| r.to_f64_lossy()).collect();
    let mut sweep = Vec::new();
    for e in &mut resolved.entries {
        let mut squared: Vec<f64> = runs
            .iter()
            .map(|c| c.entry(&e.name).map_or(f64::NAN, |x| x.squared))
            .collect();
        squared.push(e.squared);
        let drift = match prev.and_then(|p| p.entry(&e.name)) {
            None => {
                e.stable = false;
                f64::NAN
            }
            Some(p) => {
                let d = (e.squared - p.squared).abs();
                let scale = e.squared.abs().max(p.squared.abs());
                let rel = if scale <= 1e-14 { 0.0 } else { d / scale };
                e.stable = rel <= SWEEP_DRIFT;
                rel
            }
        };
        sweep.push(ConstantDrift {
            name: e.name.clone(),
            r_max: r_list.clone(),
            squared,
            relative_drift: drift,
            stable: e.stable,
        });
        if !e.stable {
            let bound = pointwise
                .filter(|_| e.name != "b5_display" && e.name != "a1" && e.name != "a2" && e.name != "b5" && e.name != "b6")
                .and_then(|pw| pw.squared.get(&e.name).copied())
                .filter(|b| b.is_finite());
            if let Some(b) = bound {
                resolved.notes.push(format!(
                    "{}: drift {drift:.3e} over the last doubling; pointwise bound {b} used instead",
                    e.name
                ));
                e.squared = b;
                e.value = b.sqrt();
                e.provenance = Provenance::Pointwise;
                e.stable = true;
            } else {
                resolved.notes.push(format!(
                    "{}: drift {drift:.3e} over the last doubling exceeds {SWEEP_DRIFT}",
                    e.name
                ));
            }
        }
    }
    resolved.budget = fill_budget(&resolved.entries);
    resolved.sweep = sweep;
    Ok(resolved)
}
