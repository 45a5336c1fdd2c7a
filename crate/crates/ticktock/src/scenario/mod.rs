//! Named scenarios: configuration parsing, validation, execution, figure
//! reproduction, parameter sweeps, and the self-check suite.
//!
//! Every scenario that has a closed form emits both the brute-force and the
//! closed-form series plus their pointwise discrepancy, and running it fails
//! with [`Error::Discrepancy`] if the two disagree beyond
//! [`DISCREPANCY_LIMIT`].

pub mod series;

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::density::{binary_entropy, partial_trace, Keep};
use crate::error::{Error, Result};
use crate::multi_particle::{
    radiators_joint_entropy, statistics_entropy_curves, RadiatorSpec,
};
use crate::operators::{check_unitarity, line_basis, ScatterParams, StepOperator};
use crate::pinch::{
    demon_step, interior_exterior_entropy, interior_probability, pinch_step,
    ring_survival_curve, DemonSpec, PinchTopology, PortUnitary, Schedule,
};
use crate::single_particle::{
    asymptotic_profile, continuum_entropy, decay_entropy, evolve, internal_coherence,
    residual_entropy, shadow_entropy, source_state,
};
use crate::state::{BasisLabel, Level, PureState, Site};

use series::{Column, Format, Metadata, SeriesOutput};

/// Brute-force-vs-closed-form tolerance enforced on every scenario run.
pub const DISCREPANCY_LIMIT: f64 = 1e-8;

/// The named scenarios the runner understands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    SingleDecay,
    Shadow,
    Statistics,
    Residual,
    Asymptotic,
    Pinch,
    Demon,
    Radiators,
}

pub const SCENARIO_NAMES: [&str; 8] = [
    "single_decay",
    "shadow",
    "statistics",
    "residual",
    "asymptotic",
    "pinch",
    "demon",
    "radiators",
];

impl ScenarioKind {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "single_decay" => Ok(ScenarioKind::SingleDecay),
            "shadow" => Ok(ScenarioKind::Shadow),
            "statistics" => Ok(ScenarioKind::Statistics),
            "residual" => Ok(ScenarioKind::Residual),
            "asymptotic" => Ok(ScenarioKind::Asymptotic),
            "pinch" => Ok(ScenarioKind::Pinch),
            "demon" => Ok(ScenarioKind::Demon),
            "radiators" => Ok(ScenarioKind::Radiators),
            other => Err(Error::Config(format!(
                "scenario must be one of {}, got {other}",
                SCENARIO_NAMES.join(", ")
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::SingleDecay => "single_decay",
            ScenarioKind::Shadow => "shadow",
            ScenarioKind::Statistics => "statistics",
            ScenarioKind::Residual => "residual",
            ScenarioKind::Asymptotic => "asymptotic",
            ScenarioKind::Pinch => "pinch",
            ScenarioKind::Demon => "demon",
            ScenarioKind::Radiators => "radiators",
        }
    }
}

/// One entry of a pinch port schedule, as it appears in config files.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleEntryConfig {
    pub step: u64,
    /// `identity`, `swap`, or `near_decoupling`.
    pub port: String,
    /// Required when `port` is `near_decoupling`, forbidden otherwise.
    #[serde(default)]
    pub survival_amplitude: Option<f64>,
}

impl ScheduleEntryConfig {
    fn to_port(&self) -> Result<PortUnitary> {
        match (self.port.as_str(), self.survival_amplitude) {
            ("identity", None) => Ok(PortUnitary::identity()),
            ("swap", None) => Ok(PortUnitary::swap()),
            ("near_decoupling", Some(s)) => PortUnitary::near_decoupling(s),
            ("near_decoupling", None) => Err(Error::Config(
                "schedule entry with port near_decoupling needs survival_amplitude".into(),
            )),
            (p @ ("identity" | "swap"), Some(_)) => Err(Error::Config(format!(
                "schedule entry with port {p} must not set survival_amplitude"
            ))),
            (other, _) => Err(Error::Config(format!(
                "schedule port must be identity, swap, or near_decoupling, got {other}"
            ))),
        }
    }
}

/// One radiator of a many-source run, as it appears in config files.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadiatorEntry {
    pub q: f64,
    #[serde(default)]
    pub start_site: i64,
}

/// A scenario configuration as read from JSON. Unknown keys are rejected;
/// fields that a scenario does not use must be absent.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: String,
    #[serde(default)]
    pub q: Option<f64>,
    #[serde(default)]
    pub alpha_phase: Option<f64>,
    #[serde(default)]
    pub steps: Option<u64>,
    #[serde(default)]
    pub ring_len: Option<u32>,
    #[serde(default)]
    pub survival: Option<f64>,
    #[serde(default)]
    pub schedule: Option<Vec<ScheduleEntryConfig>>,
    #[serde(default)]
    pub radiators: Option<Vec<RadiatorEntry>>,
    #[serde(default)]
    pub xi_max: Option<u64>,
    #[serde(default)]
    pub start_site: Option<i64>,
    #[serde(default)]
    pub prune_epsilon: Option<f64>,
}

/// Parse a config JSON document, rejecting unknown keys by name.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid config: {e}")))
}

/// Command-line overrides applied on top of a config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub scenario: Option<String>,
    pub q: Option<f64>,
    pub steps: Option<u64>,
    pub prune_epsilon: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ScenarioConfig) {
        if let Some(s) = &self.scenario {
            cfg.scenario = s.clone();
        }
        if let Some(q) = self.q {
            cfg.q = Some(q);
        }
        if let Some(steps) = self.steps {
            cfg.steps = Some(steps);
        }
        if let Some(eps) = self.prune_epsilon {
            cfg.prune_epsilon = Some(eps);
        }
    }
}

fn check_open_unit(name: &str, v: f64) -> Result<f64> {
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::Config(format!(
            "{name} = {v} is outside the open interval (0, 1)"
        )));
    }
    Ok(v)
}

fn forbid<T>(field: &Option<T>, field_name: &str, scenario: &str) -> Result<()> {
    if field.is_some() {
        return Err(Error::Config(format!(
            "field {field_name} does not apply to scenario {scenario}"
        )));
    }
    Ok(())
}

struct Plan {
    kind: ScenarioKind,
    q: f64,
    alpha_phase: f64,
    steps: u64,
    ring_len: u32,
    survival: f64,
    schedule: Option<Vec<(u64, PortUnitary)>>,
    radiators: Vec<RadiatorSpec>,
    xi_max: u64,
    start_site: Option<i64>,
    prune_epsilon: Option<f64>,
}

fn default_steps(kind: ScenarioKind) -> u64 {
    match kind {
        ScenarioKind::SingleDecay => 50,
        ScenarioKind::Shadow => 150,
        ScenarioKind::Statistics => 60,
        ScenarioKind::Residual => 200,
        ScenarioKind::Asymptotic => 45,
        ScenarioKind::Pinch => 100,
        ScenarioKind::Demon => 1000,
        ScenarioKind::Radiators => 40,
    }
}

fn validate(cfg: &ScenarioConfig) -> Result<Plan> {
    let kind = ScenarioKind::parse(&cfg.scenario)?;
    let name = kind.name();

    // Reject fields the scenario does not use, by name.
    match kind {
        ScenarioKind::SingleDecay | ScenarioKind::Shadow | ScenarioKind::Residual => {
            forbid(&cfg.ring_len, "ring_len", name)?;
            forbid(&cfg.survival, "survival", name)?;
            forbid(&cfg.schedule, "schedule", name)?;
            forbid(&cfg.radiators, "radiators", name)?;
            forbid(&cfg.xi_max, "xi_max", name)?;
            forbid(&cfg.start_site, "start_site", name)?;
        }
        ScenarioKind::Statistics => {
            forbid(&cfg.alpha_phase, "alpha_phase", name)?;
            forbid(&cfg.ring_len, "ring_len", name)?;
            forbid(&cfg.survival, "survival", name)?;
            forbid(&cfg.schedule, "schedule", name)?;
            forbid(&cfg.radiators, "radiators", name)?;
            forbid(&cfg.xi_max, "xi_max", name)?;
            forbid(&cfg.start_site, "start_site", name)?;
            forbid(&cfg.prune_epsilon, "prune_epsilon", name)?;
        }
        ScenarioKind::Asymptotic => {
            forbid(&cfg.ring_len, "ring_len", name)?;
            forbid(&cfg.survival, "survival", name)?;
            forbid(&cfg.schedule, "schedule", name)?;
            forbid(&cfg.radiators, "radiators", name)?;
            forbid(&cfg.start_site, "start_site", name)?;
            forbid(&cfg.prune_epsilon, "prune_epsilon", name)?;
        }
        ScenarioKind::Pinch => {
            forbid(&cfg.q, "q", name)?;
            forbid(&cfg.alpha_phase, "alpha_phase", name)?;
            forbid(&cfg.radiators, "radiators", name)?;
            forbid(&cfg.xi_max, "xi_max", name)?;
        }
        ScenarioKind::Demon => {
            forbid(&cfg.q, "q", name)?;
            forbid(&cfg.alpha_phase, "alpha_phase", name)?;
            forbid(&cfg.survival, "survival", name)?;
            forbid(&cfg.schedule, "schedule", name)?;
            forbid(&cfg.radiators, "radiators", name)?;
            forbid(&cfg.xi_max, "xi_max", name)?;
            forbid(&cfg.prune_epsilon, "prune_epsilon", name)?;
        }
        ScenarioKind::Radiators => {
            forbid(&cfg.alpha_phase, "alpha_phase", name)?;
            forbid(&cfg.ring_len, "ring_len", name)?;
            forbid(&cfg.survival, "survival", name)?;
            forbid(&cfg.schedule, "schedule", name)?;
            forbid(&cfg.xi_max, "xi_max", name)?;
            forbid(&cfg.start_site, "start_site", name)?;
            forbid(&cfg.prune_epsilon, "prune_epsilon", name)?;
        }
    }

    let q = match cfg.q {
        Some(v) => check_open_unit("q", v)?,
        None => 0.9,
    };
    let alpha_phase = cfg.alpha_phase.unwrap_or(0.0);
    let steps = cfg.steps.unwrap_or(default_steps(kind));
    if steps == 0 && kind != ScenarioKind::Asymptotic {
        return Err(Error::Config("steps must be at least 1".into()));
    }
    if let Some(eps) = cfg.prune_epsilon {
        if !(0.0..1.0).contains(&eps) {
            return Err(Error::Config(format!(
                "prune_epsilon = {eps} is outside [0, 1)"
            )));
        }
    }

    let ring_len = match (kind, cfg.ring_len) {
        (ScenarioKind::Demon, v) => {
            let l = v.unwrap_or(600);
            if l < 2 {
                return Err(Error::Config(format!(
                    "ring_len = {l} is too small for scenario demon (needs at least 2)"
                )));
            }
            l
        }
        (_, Some(l)) => {
            if l < 1 {
                return Err(Error::Config("ring_len must be at least 1".into()));
            }
            l
        }
        (_, None) => 4,
    };

    let survival = match cfg.survival {
        Some(v) => {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::Config(format!(
                    "survival = {v} is outside the interval (0, 1]"
                )));
            }
            v
        }
        None => 0.9,
    };

    let schedule = match &cfg.schedule {
        Some(entries) => {
            if entries.is_empty() {
                return Err(Error::Config("schedule must not be empty".into()));
            }
            let mut built = Vec::with_capacity(entries.len());
            for e in entries {
                built.push((e.step, e.to_port()?));
            }
            if cfg.survival.is_some() {
                return Err(Error::Config(
                    "set either survival (constant leak) or schedule, not both".into(),
                ));
            }
            Some(built)
        }
        None => None,
    };
    if kind == ScenarioKind::Pinch && cfg.start_site.is_some() && schedule.is_none() {
        return Err(Error::Config(
            "start_site on scenario pinch requires an explicit schedule \
             (the constant-leak closed form assumes an interior start)"
                .into(),
        ));
    }

    let radiators = match &cfg.radiators {
        Some(list) => {
            if list.is_empty() || list.len() > 3 {
                return Err(Error::Config(format!(
                    "radiators must list between 1 and 3 sources, got {}",
                    list.len()
                )));
            }
            let mut specs = Vec::with_capacity(list.len());
            for (i, r) in list.iter().enumerate() {
                check_open_unit(&format!("radiators[{i}].q"), r.q)?;
                if r.start_site > 0 {
                    return Err(Error::Config(format!(
                        "radiators[{i}].start_site = {} must be at most 0",
                        r.start_site
                    )));
                }
                specs.push(RadiatorSpec {
                    q: r.q,
                    start_site: r.start_site,
                });
            }
            specs
        }
        None => vec![
            RadiatorSpec { q, start_site: 0 },
            RadiatorSpec { q, start_site: 0 },
        ],
    };

    let xi_max = cfg.xi_max.unwrap_or(30);
    if kind == ScenarioKind::Asymptotic && xi_max >= steps {
        return Err(Error::Config(format!(
            "xi_max = {xi_max} must be smaller than steps = {steps}"
        )));
    }

    Ok(Plan {
        kind,
        q,
        alpha_phase,
        steps,
        ring_len,
        survival,
        schedule,
        radiators,
        xi_max,
        start_site: cfg.start_site,
        prune_epsilon: cfg.prune_epsilon,
    })
}

fn push_param(meta: &mut Metadata, name: &str, value: String) {
    meta.parameters.push((name.into(), value));
}

fn finish(
    mut meta: Metadata,
    columns: Vec<Column>,
    max_discrepancy: Option<f64>,
) -> Result<SeriesOutput> {
    if let Some(d) = max_discrepancy {
        meta.max_discrepancy = Some(d);
        if d > DISCREPANCY_LIMIT {
            return Err(Error::Discrepancy {
                context: format!("scenario {}", meta.scenario),
                found: d,
                limit: DISCREPANCY_LIMIT,
            });
        }
    }
    Ok(SeriesOutput {
        metadata: meta,
        columns,
    })
}

/// Run a validated scenario and return its output table.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<SeriesOutput> {
    let plan = validate(cfg)?;
    match plan.kind {
        ScenarioKind::SingleDecay => run_single_decay(&plan),
        ScenarioKind::Shadow => run_shadow(&plan),
        ScenarioKind::Statistics => run_statistics(&plan),
        ScenarioKind::Residual => run_residual(&plan),
        ScenarioKind::Asymptotic => run_asymptotic(&plan),
        ScenarioKind::Pinch => run_pinch(&plan),
        ScenarioKind::Demon => run_demon(&plan),
        ScenarioKind::Radiators => run_radiators(&plan),
    }
}

fn scatter(plan: &Plan) -> Result<ScatterParams> {
    ScatterParams::with_phase(plan.q, plan.alpha_phase)
}

fn run_single_decay(plan: &Plan) -> Result<SeriesOutput> {
    let op = StepOperator::standard(scatter(plan)?);
    let mut state = source_state(0);
    let rows = plan.steps as usize + 1;
    let (mut brute, mut closed, mut disc) =
        (Vec::with_capacity(rows), Vec::with_capacity(rows), Vec::with_capacity(rows));
    let mut worst: f64 = 0.0;
    for n in 0..=plan.steps {
        let b = partial_trace(&state, Keep::Internal)?.entropy_bits();
        let c = decay_entropy(n, plan.q)?;
        let d = (b - c).abs();
        worst = worst.max(d);
        brute.push(b);
        closed.push(c);
        disc.push(d);
        if n < plan.steps {
            state = op.apply(&state)?;
            if let Some(eps) = plan.prune_epsilon {
                state.prune(eps);
            }
        }
    }
    let mut meta = Metadata::new("single_decay");
    push_param(&mut meta, "q", plan.q.to_string());
    push_param(&mut meta, "alpha_phase", plan.alpha_phase.to_string());
    push_param(&mut meta, "steps", plan.steps.to_string());
    if let Some(eps) = plan.prune_epsilon {
        push_param(&mut meta, "prune_epsilon", eps.to_string());
    }
    finish(
        meta,
        vec![
            Column::ints("n", (0..=plan.steps as i64).collect()),
            Column::reals("entropy_bruteforce", brute),
            Column::reals("entropy_closed", closed),
            Column::reals("discrepancy", disc),
        ],
        Some(worst),
    )
}

fn run_shadow(plan: &Plan) -> Result<SeriesOutput> {
    let op = StepOperator::standard(scatter(plan)?);
    let mut state = evolve(&op, &source_state(-1), 1)?;
    let rows = plan.steps as usize;
    let (mut brute, mut closed, mut disc) =
        (Vec::with_capacity(rows), Vec::with_capacity(rows), Vec::with_capacity(rows));
    let mut worst: f64 = 0.0;
    for n in 1..=plan.steps {
        let b = partial_trace(&state, Keep::Internal)?.entropy_bits();
        let c = shadow_entropy(n, plan.q)?;
        let d = (b - c).abs();
        worst = worst.max(d);
        brute.push(b);
        closed.push(c);
        disc.push(d);
        if n < plan.steps {
            state = op.apply(&state)?;
            if let Some(eps) = plan.prune_epsilon {
                state.prune(eps);
            }
        }
    }
    let mut meta = Metadata::new("shadow");
    push_param(&mut meta, "q", plan.q.to_string());
    push_param(&mut meta, "alpha_phase", plan.alpha_phase.to_string());
    push_param(&mut meta, "steps", plan.steps.to_string());
    finish(
        meta,
        vec![
            Column::ints("n", (1..=plan.steps as i64).collect()),
            Column::reals("entropy_bruteforce", brute),
            Column::reals("entropy_closed", closed),
            Column::reals("discrepancy", disc),
        ],
        Some(worst),
    )
}

fn run_statistics(plan: &Plan) -> Result<SeriesOutput> {
    let curves = statistics_entropy_curves(plan.q, plan.steps)?;
    let rows = plan.steps as usize + 1;
    let mut disc = Vec::with_capacity(rows);
    let mut worst: f64 = 0.0;
    for i in 0..rows {
        let d = (curves.fermi[i] - curves.fermi_closed[i])
            .abs()
            .max((curves.bose[i] - curves.bose_closed[i]).abs())
            .max((curves.distinguishable[i] - curves.distinguishable_closed[i]).abs());
        worst = worst.max(d);
        disc.push(d);
    }
    let mut meta = Metadata::new("statistics");
    push_param(&mut meta, "q", plan.q.to_string());
    push_param(&mut meta, "steps", plan.steps.to_string());
    finish(
        meta,
        vec![
            Column::ints("n", (0..=plan.steps as i64).collect()),
            Column::reals("fermi", curves.fermi),
            Column::reals("bose", curves.bose),
            Column::reals("distinguishable", curves.distinguishable),
            Column::reals("fermi_closed", curves.fermi_closed),
            Column::reals("bose_closed", curves.bose_closed),
            Column::reals("distinguishable_closed", curves.distinguishable_closed),
            Column::reals("discrepancy", disc),
        ],
        Some(worst),
    )
}

fn run_residual(plan: &Plan) -> Result<SeriesOutput> {
    let op = StepOperator::moved_detector(scatter(plan)?);
    let mut state = source_state(0);
    let rows = plan.steps as usize + 1;
    let (mut brute, mut closed, mut disc, mut coh) = (
        Vec::with_capacity(rows),
        Vec::with_capacity(rows),
        Vec::with_capacity(rows),
        Vec::with_capacity(rows),
    );
    let mut worst: f64 = 0.0;
    for n in 0..=plan.steps {
        let b = partial_trace(&state, Keep::Internal)?.entropy_bits();
        let c = residual_entropy(n, plan.q)?;
        let d = (b - c).abs();
        worst = worst.max(d);
        brute.push(b);
        closed.push(c);
        disc.push(d);
        coh.push(internal_coherence(&state)?);
        if n < plan.steps {
            state = op.apply(&state)?;
            if let Some(eps) = plan.prune_epsilon {
                state.prune(eps);
            }
        }
    }
    let mut meta = Metadata::new("residual");
    push_param(&mut meta, "q", plan.q.to_string());
    push_param(&mut meta, "alpha_phase", plan.alpha_phase.to_string());
    push_param(&mut meta, "steps", plan.steps.to_string());
    finish(
        meta,
        vec![
            Column::ints("n", (0..=plan.steps as i64).collect()),
            Column::reals("entropy_bruteforce", brute),
            Column::reals("entropy_closed", closed),
            Column::reals("discrepancy", disc),
            Column::reals("coherence", coh),
        ],
        Some(worst),
    )
}

fn run_asymptotic(plan: &Plan) -> Result<SeriesOutput> {
    let params = scatter(plan)?;
    let t = plan.steps;
    let basic = evolve(
        &StepOperator::standard(params),
        &source_state(0),
        t as usize,
    )?;
    let moved = evolve(
        &StepOperator::moved_detector(params),
        &source_state(0),
        t as usize,
    )?;
    let basic_profile = asymptotic_profile(&basic, t, plan.xi_max)?;
    let moved_profile = asymptotic_profile(&moved, t, plan.xi_max)?;

    let rows = plan.xi_max as usize + 1;
    let mut cols: Vec<Vec<f64>> = vec![Vec::with_capacity(rows); 7];
    let mut worst: f64 = 0.0;
    let alpha = params.alpha();
    let beta = params.beta();
    for (bp, mp) in basic_profile.iter().zip(&moved_profile) {
        let xi = bp.xi;
        let expect = beta * alpha.powu(xi as u32);
        // The plain detector radiates onto the ground register; the moved
        // detector radiates onto a register that alternates with xi.
        let (basic_on, basic_off) = (bp.ground, bp.excited);
        let (moved_on, moved_off) = match Level::after_flips(xi) {
            Level::Excited => (mp.excited, mp.ground),
            Level::Ground => (mp.ground, mp.excited),
        };
        let off = basic_off.norm().max(moved_off.norm());
        let d = (basic_on - expect)
            .norm()
            .max((moved_on - expect).norm())
            .max(off);
        worst = worst.max(d);
        cols[0].push(basic_on.re);
        cols[1].push(basic_on.im);
        cols[2].push(moved_on.re);
        cols[3].push(moved_on.im);
        cols[4].push(expect.re);
        cols[5].push(expect.im);
        cols[6].push(d);
    }
    let mut meta = Metadata::new("asymptotic");
    push_param(&mut meta, "q", plan.q.to_string());
    push_param(&mut meta, "alpha_phase", plan.alpha_phase.to_string());
    push_param(&mut meta, "steps", t.to_string());
    push_param(&mut meta, "xi_max", plan.xi_max.to_string());
    let mut it = cols.into_iter();
    finish(
        meta,
        vec![
            Column::ints("xi", (0..=plan.xi_max as i64).collect()),
            Column::reals("basic_re", it.next().unwrap()),
            Column::reals("basic_im", it.next().unwrap()),
            Column::reals("moved_re", it.next().unwrap()),
            Column::reals("moved_im", it.next().unwrap()),
            Column::reals("closed_re", it.next().unwrap()),
            Column::reals("closed_im", it.next().unwrap()),
            Column::reals("discrepancy", it.next().unwrap()),
        ],
        Some(worst),
    )
}

fn run_pinch(plan: &Plan) -> Result<SeriesOutput> {
    let topo = PinchTopology::new(plan.ring_len)?;
    let mut meta = Metadata::new("pinch");
    push_param(&mut meta, "ring_len", plan.ring_len.to_string());
    push_param(&mut meta, "steps", plan.steps.to_string());

    if let Some(entries) = &plan.schedule {
        // Scheduled ports: report the brute-force interior curve.
        push_param(&mut meta, "schedule_entries", entries.len().to_string());
        let schedule = Schedule::new(entries.clone())?;
        let mut state = match plan.start_site {
            Some(x) => topo.basis_state(Site::Line(x), Level::Excited)?,
            None => topo.basis_state(Site::Ring(0), Level::Excited)?,
        };
        if let Some(x) = plan.start_site {
            push_param(&mut meta, "start_site", x.to_string());
        }
        let rows = plan.steps as usize + 1;
        let (mut prob, mut ent) = (Vec::with_capacity(rows), Vec::with_capacity(rows));
        for n in 0..=plan.steps {
            prob.push(interior_probability(&state));
            ent.push(interior_exterior_entropy(&state)?);
            if n < plan.steps {
                state = pinch_step(&topo, schedule.port_at(n)?, &state)?;
                if let Some(eps) = plan.prune_epsilon {
                    state.prune(eps);
                }
            }
        }
        finish(
            meta,
            vec![
                Column::ints("n", (0..=plan.steps as i64).collect()),
                Column::reals("interior_probability", prob),
                Column::reals("entropy", ent),
            ],
            None,
        )
    } else {
        // Constant leak from an interior start: closed form available.
        push_param(&mut meta, "survival", plan.survival.to_string());
        let curve = ring_survival_curve(
            &topo,
            plan.survival.sqrt(),
            plan.steps,
            plan.prune_epsilon,
        )?;
        let rows = curve.len();
        let mut cols: Vec<Vec<f64>> = vec![Vec::with_capacity(rows); 5];
        let mut worst: f64 = 0.0;
        for p in &curve {
            let d = (p.interior - p.interior_closed)
                .abs()
                .max((p.entropy - p.entropy_closed).abs());
            worst = worst.max(d);
            cols[0].push(p.interior);
            cols[1].push(p.interior_closed);
            cols[2].push(p.entropy);
            cols[3].push(p.entropy_closed);
            cols[4].push(d);
        }
        let mut it = cols.into_iter();
        finish(
            meta,
            vec![
                Column::ints("n", (0..=plan.steps as i64).collect()),
                Column::reals("interior_probability", it.next().unwrap()),
                Column::reals("interior_closed", it.next().unwrap()),
                Column::reals("entropy", it.next().unwrap()),
                Column::reals("entropy_closed", it.next().unwrap()),
                Column::reals("discrepancy", it.next().unwrap()),
            ],
            Some(worst),
        )
    }
}

/// Deterministic interior probability of the standard demon run: a particle
/// released at `start < 0` with a ground register is captured at the end of
/// step |start| and deterministically escapes at the end of step
/// |start| + 2 * ring_len (the one-bit door memory re-opens the door after
/// two passes of the interior detector).
pub fn demon_closed_interior(start: i64, ring_len: u32, n: u64) -> f64 {
    if start >= 0 {
        return 0.0;
    }
    let s = (-start) as u64;
    let l = ring_len as u64;
    if n >= s && n < s + 2 * l {
        1.0
    } else {
        0.0
    }
}

fn run_demon(plan: &Plan) -> Result<SeriesOutput> {
    let topo = PinchTopology::new(plan.ring_len)?;
    let spec = DemonSpec::standard();
    let start = plan.start_site.unwrap_or(-5);
    let mut state = topo.basis_state(Site::Line(start), Level::Ground)?;
    let rows = plan.steps as usize + 1;
    let (mut prob, mut closed, mut disc, mut drift) = (
        Vec::with_capacity(rows),
        Vec::with_capacity(rows),
        Vec::with_capacity(rows),
        Vec::with_capacity(rows),
    );
    let mut worst: f64 = 0.0;
    for n in 0..=plan.steps {
        let p = interior_probability(&state);
        let c = demon_closed_interior(start, plan.ring_len, n);
        let d = (p - c).abs();
        worst = worst.max(d);
        prob.push(p);
        closed.push(c);
        disc.push(d);
        drift.push((state.norm() - 1.0).abs());
        if n < plan.steps {
            state = demon_step(&topo, &spec, &state)?;
        }
    }
    let mut meta = Metadata::new("demon");
    push_param(&mut meta, "ring_len", plan.ring_len.to_string());
    push_param(&mut meta, "start_site", start.to_string());
    push_param(&mut meta, "steps", plan.steps.to_string());
    finish(
        meta,
        vec![
            Column::ints("n", (0..=plan.steps as i64).collect()),
            Column::reals("interior_probability", prob),
            Column::reals("interior_closed", closed),
            Column::reals("discrepancy", disc),
            Column::reals("norm_deviation", drift),
        ],
        Some(worst),
    )
}

fn run_radiators(plan: &Plan) -> Result<SeriesOutput> {
    let rows = plan.steps as usize + 1;
    let (mut brute, mut closed, mut disc) =
        (Vec::with_capacity(rows), Vec::with_capacity(rows), Vec::with_capacity(rows));
    let mut worst: f64 = 0.0;
    for n in 0..=plan.steps {
        let b = radiators_joint_entropy(&plan.radiators, n)?;
        let c = crate::multi_particle::independent_radiators_entropy(&plan.radiators, n)?;
        let d = (b - c).abs();
        worst = worst.max(d);
        brute.push(b);
        closed.push(c);
        disc.push(d);
    }
    let mut meta = Metadata::new("radiators");
    push_param(&mut meta, "radiators", plan.radiators.len().to_string());
    for (i, r) in plan.radiators.iter().enumerate() {
        push_param(&mut meta, &format!("radiators[{i}].q"), r.q.to_string());
        push_param(
            &mut meta,
            &format!("radiators[{i}].start_site"),
            r.start_site.to_string(),
        );
    }
    push_param(&mut meta, "steps", plan.steps.to_string());
    finish(
        meta,
        vec![
            Column::ints("n", (0..=plan.steps as i64).collect()),
            Column::reals("entropy_bruteforce", brute),
            Column::reals("entropy_closed", closed),
            Column::reals("discrepancy", disc),
        ],
        Some(worst),
    )
}

/// Reproduce one of the three reference figures.
///
/// * `fig1`: source-radiation entanglement entropy on the continuum clock,
///   t in [0, 10] with grid 0.01 (peaks at exactly one bit at t = 1).
/// * `fig2`: shadow-site entropy at q = 0.95 for n in [1, 150].
/// * `fig3`: two-particle statistics comparison at q = 0.9 for n in [0, 60].
pub fn reproduce_figure(which: &str) -> Result<SeriesOutput> {
    match which {
        "fig1" => {
            let rows = 1001;
            let mut t_col = Vec::with_capacity(rows);
            let (mut ent, mut ident, mut disc) = (
                Vec::with_capacity(rows),
                Vec::with_capacity(rows),
                Vec::with_capacity(rows),
            );
            let mut worst: f64 = 0.0;
            for i in 0..rows {
                let t = i as f64 * 0.01;
                let e = continuum_entropy(t)?;
                let b = binary_entropy((-t).exp2());
                let d = (e - b).abs();
                worst = worst.max(d);
                t_col.push(t);
                ent.push(e);
                ident.push(b);
                disc.push(d);
            }
            let mut meta = Metadata::new("fig1");
            push_param(&mut meta, "t_max", "10".into());
            push_param(&mut meta, "grid", "0.01".into());
            finish(
                meta,
                vec![
                    Column::reals("t", t_col),
                    Column::reals("entropy", ent),
                    Column::reals("entropy_binary", ident),
                    Column::reals("discrepancy", disc),
                ],
                Some(worst),
            )
        }
        "fig2" => {
            let cfg = ScenarioConfig {
                q: Some(0.95),
                steps: Some(150),
                ..blank_config("shadow")
            };
            let mut out = run_scenario(&cfg)?;
            out.metadata.scenario = "fig2".into();
            Ok(out)
        }
        "fig3" => {
            let cfg = ScenarioConfig {
                q: Some(0.9),
                steps: Some(60),
                ..blank_config("statistics")
            };
            let mut out = run_scenario(&cfg)?;
            out.metadata.scenario = "fig3".into();
            Ok(out)
        }
        other => Err(Error::Config(format!(
            "figure must be fig1, fig2, or fig3, got {other}"
        ))),
    }
}

/// A config with only the scenario name set.
pub fn blank_config(scenario: &str) -> ScenarioConfig {
    ScenarioConfig {
        scenario: scenario.into(),
        q: None,
        alpha_phase: None,
        steps: None,
        ring_len: None,
        survival: None,
        schedule: None,
        radiators: None,
        xi_max: None,
        start_site: None,
        prune_epsilon: None,
    }
}

/// One line of the self-check report.
#[derive(Debug, Clone)]
pub struct CheckLine {
    pub name: String,
    pub worst: f64,
    pub limit: f64,
}

impl CheckLine {
    pub fn passed(&self) -> bool {
        self.worst <= self.limit
    }
}

/// Exhaustive brute-force-vs-closed-form self-checks, one line each.
/// Returns the lines; the first failing line, if any, is an error the caller
/// maps to exit code 2 after printing.
pub fn check_all() -> Result<Vec<CheckLine>> {
    let mut lines = Vec::new();

    // Source decay entropy against the closed form across survival values.
    {
        let mut worst: f64 = 0.0;
        for q in [0.5, 0.8, 0.9, 0.95] {
            let op = StepOperator::standard(ScatterParams::from_survival(q)?);
            let mut state = source_state(0);
            for n in 0..=200u64 {
                let b = partial_trace(&state, Keep::Internal)?.entropy_bits();
                worst = worst.max((b - decay_entropy(n, q)?).abs());
                if n < 200 {
                    state = op.apply(&state)?;
                }
            }
        }
        lines.push(CheckLine {
            name: "decay entropy closed form".into(),
            worst,
            limit: 1e-10,
        });
    }

    // Shadow-site entropy.
    {
        let mut worst: f64 = 0.0;
        for q in [0.5, 0.95] {
            let op = StepOperator::standard(ScatterParams::from_survival(q)?);
            let mut state = evolve(&op, &source_state(-1), 1)?;
            for n in 1..=150u64 {
                let b = partial_trace(&state, Keep::Internal)?.entropy_bits();
                worst = worst.max((b - shadow_entropy(n, q)?).abs());
                if n < 150 {
                    state = op.apply(&state)?;
                }
            }
        }
        lines.push(CheckLine {
            name: "shadow entropy closed form".into(),
            worst,
            limit: 1e-10,
        });
    }

    // Moved-detector residual entropy and coherence.
    {
        let mut worst: f64 = 0.0;
        let mut worst_coh: f64 = 0.0;
        for q in [0.5, 0.9] {
            let op = StepOperator::moved_detector(ScatterParams::from_survival(q)?);
            let mut state = source_state(0);
            for n in 0..=300u64 {
                let b = partial_trace(&state, Keep::Internal)?.entropy_bits();
                worst = worst.max((b - residual_entropy(n, q)?).abs());
                worst_coh = worst_coh.max(internal_coherence(&state)?);
                if n < 300 {
                    state = op.apply(&state)?;
                }
            }
        }
        lines.push(CheckLine {
            name: "residual entropy closed form".into(),
            worst,
            limit: 1e-10,
        });
        lines.push(CheckLine {
            name: "residual internal coherence".into(),
            worst: worst_coh,
            limit: 1e-14,
        });
    }

    // Two-particle statistics curves.
    {
        let curves = statistics_entropy_curves(0.9, 60)?;
        lines.push(CheckLine {
            name: "statistics entropy closed forms".into(),
            worst: curves.max_discrepancy(),
            limit: 1e-10,
        });
        let mut worst_sum: f64 = 0.0;
        for n in 0..=60u64 {
            let probs = crate::multi_particle::bose_internal_closed(n, 0.9)?;
            worst_sum = worst_sum.max((probs.iter().sum::<f64>() - 1.0).abs());
        }
        lines.push(CheckLine {
            name: "symmetric-pair spectrum normalization".into(),
            worst: worst_sum,
            limit: 1e-12,
        });
    }

    // Continuum-clock entropy identity.
    {
        let mut worst: f64 = 0.0;
        for i in 0..=1000 {
            let t = i as f64 * 0.01;
            worst = worst.max((continuum_entropy(t)? - binary_entropy((-t).exp2())).abs());
        }
        lines.push(CheckLine {
            name: "continuum entropy identity".into(),
            worst,
            limit: 1e-12,
        });
    }

    // Co-moving front profile: stationary and geometric.
    {
        let params = ScatterParams::from_survival(0.9)?;
        let op = StepOperator::standard(params);
        let s1 = evolve(&op, &source_state(0), 45)?;
        let s2 = evolve(&op, &s1, 10)?;
        let p1 = asymptotic_profile(&s1, 45, 30)?;
        let p2 = asymptotic_profile(&s2, 55, 30)?;
        let mut worst: f64 = 0.0;
        for (a, b) in p1.iter().zip(&p2) {
            worst = worst.max((a.ground - b.ground).norm());
            worst = worst.max((a.excited - b.excited).norm());
            let expect = params.beta() * params.alpha().powu(a.xi as u32);
            worst = worst.max((a.ground - expect).norm());
        }
        lines.push(CheckLine {
            name: "front profile stationarity".into(),
            worst,
            limit: 1e-13,
        });
    }

    // Leaky-ring survival.
    {
        let topo = PinchTopology::new(4)?;
        let curve = ring_survival_curve(&topo, 0.9, 80, None)?;
        let mut worst: f64 = 0.0;
        for p in &curve {
            worst = worst.max((p.interior - p.interior_closed).abs());
            worst = worst.max((p.entropy - p.entropy_closed).abs());
        }
        lines.push(CheckLine {
            name: "ring survival closed form".into(),
            worst,
            limit: 1e-12,
        });
    }

    // Demon capture window determinism and norm preservation.
    {
        let topo = PinchTopology::new(9)?;
        let spec = DemonSpec::standard();
        let mut state = topo.basis_state(Site::Line(-5), Level::Ground)?;
        let mut worst: f64 = 0.0;
        let mut worst_norm: f64 = 0.0;
        for n in 0..=40u64 {
            let p = interior_probability(&state);
            worst = worst.max((p - demon_closed_interior(-5, 9, n)).abs());
            worst_norm = worst_norm.max((state.norm() - 1.0).abs());
            if n < 40 {
                state = demon_step(&topo, &spec, &state)?;
            }
        }
        lines.push(CheckLine {
            name: "demon capture window".into(),
            worst,
            limit: 1e-12,
        });
        lines.push(CheckLine {
            name: "demon norm preservation".into(),
            worst: worst_norm,
            limit: 1e-12,
        });
    }

    // Step unitarity on finite windows.
    {
        let params = ScatterParams::from_survival(0.9)?;
        let window = line_basis(-6, 25);
        let standard = StepOperator::standard(params);
        let moved = StepOperator::moved_detector(params);
        let r1 = check_unitarity(|s: &PureState| standard.apply(s), &window)?;
        let r2 = check_unitarity(|s: &PureState| moved.apply(s), &window)?;

        let topo = PinchTopology::new(5)?;
        let port = PortUnitary::near_decoupling(0.9f64.sqrt())?;
        let pinch_window = topo.window_basis(-6, 12);
        let r3 = check_unitarity(|s: &PureState| pinch_step(&topo, &port, s), &pinch_window)?;
        let spec = DemonSpec::standard();
        let r4 = check_unitarity(|s: &PureState| demon_step(&topo, &spec, s), &pinch_window)?;

        let worst = [&r1, &r2, &r3, &r4]
            .iter()
            .map(|r| r.max_norm_deviation.max(r.max_cross_overlap))
            .fold(0.0f64, f64::max);
        lines.push(CheckLine {
            name: "step unitarity on finite windows".into(),
            worst,
            limit: 1e-12,
        });
    }

    Ok(lines)
}

/// A parameter sweep: a base config plus a grid of per-field value lists.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub base: serde_json::Value,
    pub grid: serde_json::Map<String, serde_json::Value>,
}

/// Parse a sweep config document.
pub fn parse_sweep(text: &str) -> Result<SweepConfig> {
    let cfg: SweepConfig =
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid sweep config: {e}")))?;
    if !cfg.base.is_object() {
        return Err(Error::Config("sweep base must be a config object".into()));
    }
    if cfg.grid.is_empty() {
        return Err(Error::Config("sweep grid must not be empty".into()));
    }
    for (k, v) in &cfg.grid {
        match v.as_array() {
            Some(a) if !a.is_empty() => {}
            _ => {
                return Err(Error::Config(format!(
                    "sweep grid entry {k} must be a non-empty array of values"
                )));
            }
        }
    }
    Ok(cfg)
}

/// One resolved sweep point: the file stem and the config to run.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub stem: String,
    pub config: ScenarioConfig,
}

/// Expand the grid into the full cross product, in deterministic order
/// (grid keys sorted, values in listed order).
pub fn expand_sweep(cfg: &SweepConfig) -> Result<Vec<SweepPoint>> {
    let keys: Vec<&String> = cfg.grid.keys().collect();
    let lists: Vec<&Vec<serde_json::Value>> = keys
        .iter()
        .map(|k| cfg.grid[*k].as_array().expect("validated"))
        .collect();
    let mut points = Vec::new();
    let total: usize = lists.iter().map(|l| l.len()).product();
    for idx in 0..total {
        let mut rem = idx;
        let mut value = cfg.base.clone();
        let mut stem_parts = Vec::with_capacity(keys.len());
        for (k, list) in keys.iter().zip(&lists) {
            let i = rem % list.len();
            rem /= list.len();
            let v = &list[i];
            value
                .as_object_mut()
                .expect("validated")
                .insert((*k).clone(), v.clone());
            stem_parts.push(format!("{k}={v}"));
        }
        let config: ScenarioConfig = serde_json::from_value(value)
            .map_err(|e| Error::Config(format!("invalid sweep point: {e}")))?;
        let stem = format!("{}_{}", config.scenario, stem_parts.join("_"));
        points.push(SweepPoint { stem, config });
    }
    Ok(points)
}

/// Run every sweep point and write one output file per point into `outdir`.
/// Points run in parallel; file names are deterministic. Returns the
/// written paths in expansion order.
pub fn run_sweep(cfg: &SweepConfig, outdir: &Path, format: Format) -> Result<Vec<PathBuf>> {
    let points = expand_sweep(cfg)?;
    std::fs::create_dir_all(outdir)?;
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let n = points.len();
    let results: Vec<std::sync::Mutex<Option<Result<PathBuf>>>> =
        (0..n).map(|_| std::sync::Mutex::new(None)).collect();
    let next = std::sync::atomic::AtomicUsize::new(0);
    let workers = std::thread::available_parallelism()
        .map(|p| p.get())
        .unwrap_or(1)
        .min(n.max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let point = &points[i];
                let outcome = run_scenario(&point.config)
                    .and_then(|series| series.render(format, false))
                    .and_then(|text| {
                        let path = outdir.join(format!("{}.{ext}", point.stem));
                        series::write_atomic(&path, &text)?;
                        Ok(path)
                    });
                *results[i].lock().expect("sweep worker poisoned") = Some(outcome);
            });
        }
    });
    let mut paths = Vec::with_capacity(n);
    for cell in results {
        match cell.into_inner().expect("sweep worker poisoned") {
            Some(Ok(path)) => paths.push(path),
            Some(Err(e)) => return Err(e),
            None => return Err(Error::Numeric("sweep point did not run".into())),
        }
    }
    Ok(paths)
}

/// Shared helper for runs that must agree with [`BasisLabel`]-level
/// expectations in integration tests.
pub fn single_site_label(x: i64, level: Level) -> BasisLabel {
    BasisLabel::single(Site::Line(x), level)
}
