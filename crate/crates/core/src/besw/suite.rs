use std::fmt::Write;
use std::time::Instant;

use serde::Serialize;

use crate::checker::{check, CheckError, CheckOptions};
use crate::data::Value;
use crate::lts::{explore, ExploreLimits, Lts};
use crate::model::{parse_model, typecheck, TypedModel};
use crate::mucalc::{parse_formula, Signature};

use super::config::{validate_config, PumpId, ScenarioConfig, COMPARTMENTS};
use super::corpus::{property_corpus, Property, Variant};
use super::generate::{generate_model, GenOptions};
use super::BeswError;

/// Properties whose verdict may legitimately change under a fault.
pub const SWEEP_EXCLUDED: [&str; 2] = ["P7", "P9-dso"];

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub workers: usize,
    pub limits: ExploreLimits,
    pub gen: GenOptions,
    /// Restrict the run to these property ids.
    pub only: Option<Vec<String>>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { workers: 1, limits: ExploreLimits::default(), gen: GenOptions::default(), only: None }
    }
}

pub struct BuiltModel {
    pub text: String,
    pub model: TypedModel,
    pub lts: Lts,
    pub millis: u128,
}

impl BuiltModel {
    pub fn signature(&self) -> Signature {
        Signature::from_model(&self.model)
    }
}

/// Generates, typechecks and explores the model of a scenario.
pub fn build_model(c: &ScenarioConfig, gen: &GenOptions, workers: usize, limits: ExploreLimits) -> Result<BuiltModel, BeswError> {
    validate_config(c)?;
    let start = Instant::now();
    let text = generate_model(c, gen);
    let src = parse_model(&text).map_err(|e| BeswError::Generator(e.to_string()))?;
    let model = typecheck(&src).map_err(|e| BeswError::Generator(e.to_string()))?;
    let lts = explore(&model, limits, workers)?;
    Ok(BuiltModel { text, model, lts, millis: start.elapsed().as_millis() })
}

/// The scenario used for properties of the uncorrected ballast table: if
/// no primary ballast pump has failed, primary pump 0 is failed so that the
/// uncorrected rows are reachable.
pub fn dso_variant(c: &ScenarioConfig) -> ScenarioConfig {
    let mut v = c.clone();
    let primary_failed = v.failed_pumps.iter().any(|p| matches!(p, PumpId::Ballast(n) if (*n as usize) < COMPARTMENTS));
    if !primary_failed {
        v.failed_pumps.insert(PumpId::Ballast(0));
    }
    v
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Checked { holds: bool, equations: usize, millis: u128, trace: Option<Vec<String>> },
    Skipped,
}

#[derive(Debug, Clone)]
pub struct PropertyResult {
    pub property: Property,
    pub outcome: Outcome,
    pub states: u32,
    pub transitions: usize,
}

impl PropertyResult {
    /// Skipped properties count as matching.
    pub fn matches(&self) -> bool {
        match &self.outcome {
            Outcome::Checked { holds, .. } => *holds == self.property.expected,
            Outcome::Skipped => true,
        }
    }

    pub fn verdict(&self) -> Option<bool> {
        match &self.outcome {
            Outcome::Checked { holds, .. } => Some(*holds),
            Outcome::Skipped => None,
        }
    }
}

/// One line of the machine-readable report.
#[derive(Debug, Clone, Serialize)]
pub struct PropertyRecord {
    pub id: String,
    /// `null` for skipped properties.
    pub verdict: Option<bool>,
    pub expected: bool,
    #[serde(rename = "match")]
    pub matches: bool,
    pub states: u32,
    pub transitions: usize,
    pub equations: usize,
    pub millis: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<String>>,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub results: Vec<PropertyResult>,
    /// `(variant, states, transitions, millis)` per explored model.
    pub models: Vec<(Variant, u32, usize, u128)>,
}

impl SuiteReport {
    pub fn all_match(&self) -> bool {
        self.results.iter().all(PropertyResult::matches)
    }

    pub fn verdict(&self, id: &str) -> Option<bool> {
        self.results.iter().find(|r| r.property.id == id).and_then(PropertyResult::verdict)
    }

    pub fn records(&self) -> Vec<PropertyRecord> {
        self.results
            .iter()
            .map(|r| {
                let (equations, millis, trace) = match &r.outcome {
                    Outcome::Checked { equations, millis, trace, .. } => (*equations, *millis, trace.clone()),
                    Outcome::Skipped => (0, 0, None),
                };
                PropertyRecord {
                    id: r.property.id.to_string(),
                    verdict: r.verdict(),
                    expected: r.property.expected,
                    matches: r.matches(),
                    states: r.states,
                    transitions: r.transitions,
                    equations,
                    millis,
                    trace,
                }
            })
            .collect()
    }

    /// Human-readable table.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (v, states, transitions, millis) in &self.models {
            let _ = writeln!(s, "model {v:?}: {states} states, {transitions} transitions ({millis} ms)");
        }
        let _ = writeln!(s, "{:<9} {:<8} {:<8} {:<6} {:>10} {:>8}  title", "id", "verdict", "expected", "match", "equations", "ms");
        for r in &self.results {
            let (verdict, eqs, ms) = match &r.outcome {
                Outcome::Checked { holds, equations, millis, .. } => (holds.to_string(), equations.to_string(), millis.to_string()),
                Outcome::Skipped => ("skipped".into(), "-".into(), "-".into()),
            };
            let _ = writeln!(
                s,
                "{:<9} {:<8} {:<8} {:<6} {:>10} {:>8}  {}",
                r.property.id,
                verdict,
                r.property.expected,
                if r.matches() { "yes" } else { "NO" },
                eqs,
                ms,
                r.property.title
            );
            if let Outcome::Checked { trace: Some(t), holds: false, .. } = &r.outcome {
                if !r.matches() {
                    let _ = writeln!(s, "          trace: {}", t.join(" . "));
                }
            }
        }
        let mismatches = self.results.iter().filter(|r| !r.matches()).count();
        let _ = writeln!(s, "{} properties, {} mismatches", self.results.len(), mismatches);
        s
    }
}

fn check_property(built: &BuiltModel, sig: &Signature, p: &Property) -> Result<Outcome, BeswError> {
    let err = |source: CheckError| BeswError::Check { id: p.id.to_string(), source };
    let start = Instant::now();
    let (_, f) = parse_formula(&p.text, sig).map_err(|e| err(e.into()))?;
    let r = check(&built.lts, &f, sig, CheckOptions::default()).map_err(err)?;
    let trace = r.counterexample.map(|cx| cx.labels.iter().map(|l| l.to_string()).collect());
    Ok(Outcome::Checked { holds: r.holds, equations: r.stats.equations, millis: start.elapsed().as_millis(), trace })
}

/// Explores each needed model variant once and checks every applicable
/// corpus property against it.
pub fn run_suite(c: &ScenarioConfig, opts: &SuiteOptions) -> Result<SuiteReport, BeswError> {
    validate_config(c)?;
    let corpus: Vec<Property> = property_corpus()
        .into_iter()
        .filter(|p| opts.only.as_ref().is_none_or(|ids| ids.iter().any(|i| i == p.id)))
        .collect();
    let mut report = SuiteReport { results: Vec::new(), models: Vec::new() };
    for variant in [Variant::Standard, Variant::DsoTable] {
        let props: Vec<&Property> = corpus.iter().filter(|p| p.variant == variant).collect();
        if props.is_empty() {
            continue;
        }
        let (cfg, gen) = match variant {
            Variant::Standard => (c.clone(), opts.gen),
            Variant::DsoTable => (dso_variant(c), GenOptions { dso_table: true, ..opts.gen }),
        };
        let applicable: Vec<&&Property> = props.iter().filter(|p| p.applies_to(&cfg)).collect();
        let built = if applicable.is_empty() { None } else { Some(build_model(&cfg, &gen, opts.workers, opts.limits)?) };
        let (states, transitions) = built.as_ref().map_or((0, 0), |b| (b.lts.num_states, b.lts.transitions.len()));
        if let Some(b) = &built {
            report.models.push((variant, states, transitions, b.millis));
        }
        let sig = built.as_ref().map(BuiltModel::signature);
        for p in props {
            let outcome = match (&built, &sig) {
                (Some(b), Some(sig)) if p.applies_to(&cfg) => check_property(b, sig, p)?,
                _ => Outcome::Skipped,
            };
            report.results.push(PropertyResult { property: p.clone(), outcome, states, transitions });
        }
    }
    let order: Vec<&str> = corpus.iter().map(|p| p.id).collect();
    report.results.sort_by_key(|r| order.iter().position(|id| *id == r.property.id));
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct SweepEntry {
    pub config: ScenarioConfig,
    /// Property ids whose verdict differs from the expectation.
    pub changed: Vec<String>,
    pub states: u32,
    pub millis: u128,
}

/// Runs the suite, minus the properties in [`SWEEP_EXCLUDED`], for every
/// configuration with exactly one failed pump or valve.
pub fn fault_sweep(base: &ScenarioConfig, opts: &SuiteOptions) -> Result<Vec<SweepEntry>, BeswError> {
    let ids: Vec<String> =
        property_corpus().iter().filter(|p| !SWEEP_EXCLUDED.contains(&p.id)).map(|p| p.id.to_string()).collect();
    let opts = SuiteOptions { only: Some(ids), ..opts.clone() };
    let mut out = Vec::new();
    for c in base.single_failures() {
        let start = Instant::now();
        let report = run_suite(&c, &opts)?;
        out.push(SweepEntry {
            changed: report.results.iter().filter(|r| !r.matches()).map(|r| r.property.id.to_string()).collect(),
            states: report.models.first().map_or(0, |m| m.1),
            millis: start.elapsed().as_millis(),
            config: c,
        });
    }
    Ok(out)
}

/// Grid values of a threshold comparison, keyed by the compared quantity.
type Candidates = Vec<(i64, Vec<i64>)>;

/// Grid coverage of one comparison constant of the corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdAudit {
    pub name: &'static str,
    pub threshold: i64,
    /// Grid value (or river/dock pair for head thresholds) closest below and
    /// above the threshold; `None` when the grid has no value on that side.
    pub below: Option<Vec<i64>>,
    pub above: Option<Vec<i64>>,
    /// Whether a path exercising the comparison exists for that value.
    pub witness_below: bool,
    pub witness_above: bool,
}

impl ThresholdAudit {
    pub fn straddled(&self) -> bool {
        self.below.is_some() && self.above.is_some() && self.witness_below && self.witness_above
    }
}

fn rat(x: i64) -> String {
    Value::Rat(x).to_string()
}

/// Candidates strictly below and strictly above `t`, closest first.
fn sides<T: Clone>(cands: &[(i64, T)], t: i64) -> (Vec<T>, Vec<T>) {
    let mut below: Vec<&(i64, T)> = cands.iter().filter(|(v, _)| *v < t).collect();
    let mut above: Vec<&(i64, T)> = cands.iter().filter(|(v, _)| *v > t).collect();
    below.sort_by_key(|(v, _)| -*v);
    above.sort_by_key(|(v, _)| *v);
    (below.into_iter().map(|x| x.1.clone()).collect(), above.into_iter().map(|x| x.1.clone()).collect())
}

/// Checks that every threshold printed in the corpus has grid values on
/// both sides and that each side is reachable in the model, by diamond
/// queries that end in the action the threshold guards.
pub fn grid_audit(c: &ScenarioConfig, built: &BuiltModel) -> Result<Vec<ThresholdAudit>, BeswError> {
    let sig = built.signature();
    let holds = |text: String| -> Result<bool, BeswError> {
        let err = |source: CheckError| BeswError::Check { id: "grid audit".into(), source };
        let (_, f) = parse_formula(&text, &sig).map_err(|e| err(e.into()))?;
        Ok(check(&built.lts, &f, &sig, CheckOptions::default()).map_err(err)?.holds)
    };
    let within = |process: &str, steps: &[String], target: &str| {
        let mut s = format!("<true* . internal_controlStart(operational, {process}, active) . (!internal_controlEnd)*");
        for step in steps {
            let _ = write!(s, " . {step} . (!internal_controlEnd)*");
        }
        let _ = write!(s, " . {target}>true");
        s
    };

    let mut out = Vec::new();
    let single = |values: &[i64]| values.iter().map(|v| (*v, vec![*v])).collect::<Vec<_>>();
    let heads: Vec<(i64, Vec<i64>)> =
        c.river_levels.iter().flat_map(|r| c.dock_levels.iter().map(move |d| (r - d, vec![*r, *d]))).collect();
    let cases: [(&'static str, i64, Candidates); 4] = [
        ("dock level (P4)", -240, single(&c.dock_levels)),
        ("wall slit (P3)", 350, single(&c.wall_slits)),
        ("head, fasten (P6)", 70, heads.clone()),
        ("head, loosen (P6)", 100, heads),
    ];
    for (name, threshold, cands) in cases {
        let (below, above) = sides(&cands, threshold);
        let witness = |v: &[i64]| -> Result<bool, BeswError> {
            let text = match threshold {
                -240 => within("processReachRestLevel", &[format!("input_dockLevel({})", rat(v[0]))], "output_dockGatesOpen"),
                350 => within("processSubmerge", &[format!("input_wallSlit({})", rat(v[0]))], "output_beslSpringSetting"),
                _ => within(
                    "processEqualiseLevel",
                    &[format!("internal_riverLevel({})", rat(v[0])), format!("input_dockLevel({})", rat(v[1]))],
                    "output_dockCatchFasten",
                ),
            };
            holds(text)
        };
        // The closest grid value on each side that reaches the guarded action.
        let first_witness = |vals: Vec<Vec<i64>>| -> Result<(Option<Vec<i64>>, bool), BeswError> {
            let fallback = vals.first().cloned();
            for v in vals {
                if witness(&v)? {
                    return Ok((Some(v), true));
                }
            }
            Ok((fallback, false))
        };
        let (below, witness_below) = first_witness(below)?;
        let (above, witness_above) = first_witness(above)?;
        out.push(ThresholdAudit { name, threshold, below, above, witness_below, witness_above });
    }
    Ok(out)
}
