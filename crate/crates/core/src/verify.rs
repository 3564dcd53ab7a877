//! Seeded property suites: moment condition, equivariance, rank law,
//! certificate consistency and flow monotonicity.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cones::zero_fiber_obstruction;
use crate::error::{Error, Result};
use crate::flow::{classify_point, constant_norm_certificate, flow_minimize, FlowConfig, Verdict};
use crate::lie::{c, coadjoint_action, exp_group, GroupDescriptor};
use crate::moment::{
    moment_jacobian, numerical_rank, orbit_dimension, random_compact, random_full, random_unit_vector,
    verify_moment_condition, KahlerModel, Leaf, ModelPoint, MomentEvaluator, RadialFamily,
};
use crate::rep::{build_representation, ProjectivePoint, RepTree};
use crate::scenario::{build_y_point, BuiltinScenario, UnipotentScenario};

/// Residual bound of the moment-condition suite at `h = 1e-4`.
pub const MOMENT_CONDITION_TOL: f64 = 1e-5;
/// Accepted range of the residual ratio between `h = 1e-3` and `h = 1e-4`.
pub const MOMENT_RATIO_RANGE: (f64, f64) = (50.0, 200.0);
pub const EQUIVARIANCE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    MomentCondition,
    Equivariance,
    RankLaw,
    ConeConsistency,
    FlowMonotonicity,
}

impl Suite {
    pub fn all() -> [Suite; 5] {
        [Suite::MomentCondition, Suite::Equivariance, Suite::RankLaw, Suite::ConeConsistency, Suite::FlowMonotonicity]
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::MomentCondition => "moment-condition",
            Suite::Equivariance => "equivariance",
            Suite::RankLaw => "rank-law",
            Suite::ConeConsistency => "cone-consistency",
            Suite::FlowMonotonicity => "flow-monotonicity",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::all().into_iter().find(|x| x.name() == s).ok_or_else(|| Error::Parse(format!("unknown suite '{s}'")))
    }
}

/// One measured quantity and whether it met its bound.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub label: String,
    pub value: f64,
    pub bound: String,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> Result<SuiteReport> {
    let checks = match suite {
        Suite::MomentCondition => moment_condition_suite(seed)?,
        Suite::Equivariance => equivariance_suite(seed)?,
        Suite::RankLaw => rank_law_suite(seed)?,
        Suite::ConeConsistency => cone_consistency_suite(seed)?,
        Suite::FlowMonotonicity => flow_monotonicity_suite(seed)?,
    };
    Ok(SuiteReport { suite, checks })
}

/// The models exercised by the moment-condition and equivariance suites.
pub fn reference_models() -> Result<Vec<(&'static str, MomentEvaluator)>> {
    let sl2 = GroupDescriptor::sl2();
    let std = Arc::new(build_representation(&sl2, RepTree::standard(0))?);
    let pair = GroupDescriptor::sl2_sl2();
    let sum = RepTree::direct_sum(vec![RepTree::standard(0), RepTree::standard(1)]);
    let half = Arc::new(build_representation(&pair, sum.clone().scale_form(0.5))?);
    let full = Arc::new(build_representation(&pair, sum)?);
    Ok(vec![
        ("flat", MomentEvaluator::new(&sl2, &KahlerModel::flat(std.clone()))?),
        ("log_c2", MomentEvaluator::new(&sl2, &KahlerModel::radial(std.clone(), RadialFamily::Log { c: 2.0 }))?),
        ("fubini_study", MomentEvaluator::new(&sl2, &KahlerModel::fubini_study(std))?),
        (
            "sl2xsl2_product",
            MomentEvaluator::new(
                &pair,
                &KahlerModel::ProductSum(vec![KahlerModel::flat(half), KahlerModel::fubini_study(full)]),
            )?,
        ),
    ])
}

/// Random point: linear slots of modulus in `[0.5, 1.5]`, unit projective slots.
pub fn random_model_point<R: Rng>(rng: &mut R, ev: &MomentEvaluator) -> ModelPoint {
    ModelPoint::new(
        ev.leaves()
            .iter()
            .map(|l| {
                let v = random_unit_vector(rng, l.rep().dim());
                match l {
                    Leaf::Linear { .. } => v * c(0.5 + rng.gen::<f64>()),
                    Leaf::Projective { .. } => v,
                }
            })
            .collect(),
    )
}

fn random_tangent<R: Rng>(rng: &mut R, ev: &MomentEvaluator) -> ModelPoint {
    ModelPoint::new(ev.leaves().iter().map(|l| random_unit_vector(rng, l.rep().dim())).collect())
}

fn check(label: impl Into<String>, value: f64, bound: impl Into<String>, passed: bool) -> Check {
    Check { label: label.into(), value, bound: bound.into(), passed }
}

/// Largest residual at `h = 1e-4` and the ratio of summed residuals between
/// `h = 1e-3` and `h = 1e-4` over `samples` seeded triples.
pub fn moment_condition_stats(ev: &MomentEvaluator, samples: usize, seed: u64) -> Result<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut worst, mut coarse, mut fine) = (0.0f64, 0.0, 0.0);
    for _ in 0..samples {
        let p = random_model_point(&mut rng, ev);
        let w = random_tangent(&mut rng, ev);
        let xi = random_compact(&mut rng, ev.group(), 1.0);
        let r4 = verify_moment_condition(ev, &p, &xi, &w, 1e-4)?;
        let r3 = verify_moment_condition(ev, &p, &xi, &w, 1e-3)?;
        worst = worst.max(r4);
        fine += r4;
        coarse += r3;
    }
    Ok((worst, coarse / fine))
}

fn moment_condition_suite(seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (name, ev) in reference_models()? {
        let (worst, ratio) = moment_condition_stats(&ev, 50, seed)?;
        out.push(check(format!("{name}: max residual (h=1e-4)"), worst, "< 1e-5", worst < MOMENT_CONDITION_TOL));
        let (lo, hi) = MOMENT_RATIO_RANGE;
        out.push(check(format!("{name}: residual ratio 1e-3/1e-4"), ratio, "in [50, 200]", (lo..=hi).contains(&ratio)));
    }
    Ok(out)
}

/// `max |mu(k p) - Ad*_k mu(p)|` over seeded compact `k` and points.
pub fn equivariance_residual(ev: &MomentEvaluator, samples: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let p = random_model_point(&mut rng, ev);
        let k = exp_group(&random_compact(&mut rng, ev.group(), 3.0))?;
        let lhs = ev.evaluate(&ev.act_group(&k, &p)?)?;
        let rhs = coadjoint_action(&k, &ev.evaluate(&p)?)?;
        worst = worst.max(lhs.add(&rhs.scaled(-1.0))?.max_abs_entry());
    }
    Ok(worst)
}

fn equivariance_suite(seed: u64) -> Result<Vec<Check>> {
    reference_models()?
        .into_iter()
        .map(|(name, ev)| {
            let r = equivariance_residual(&ev, 100, seed)?;
            Ok(check(format!("{name}: max residual"), r, "< 1e-10", r < EQUIVARIANCE_TOL))
        })
        .collect()
}

/// Built-in scenarios with the flow parameters used by the suites.
pub fn suite_scenarios() -> Result<Vec<UnipotentScenario>> {
    BuiltinScenario::all().into_iter().map(BuiltinScenario::materialize).collect()
}

/// Points of `Y`: images of sampled `x`, moved by a random group element.
fn scenario_points(s: &UnipotentScenario, n: usize, seed: u64) -> Result<Vec<ModelPoint>> {
    let ev = &s.setup()?.evaluator;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    crate::scenario::random_points(s.x_dim(), n, seed)
        .iter()
        .map(|x| {
            let p = build_y_point(s, x)?;
            let g = exp_group(&random_full(&mut rng, s.group(), 0.5))?;
            ev.act_group(&g, &p)
        })
        .collect()
}

/// `(rank of the moment Jacobian, dim K.p)` at `p`.
pub fn rank_pair(ev: &MomentEvaluator, p: &ModelPoint) -> Result<(usize, usize)> {
    let jac = moment_jacobian(ev, p, 1e-6)?;
    Ok((numerical_rank(&jac, 1e-6), orbit_dimension(ev, p)?))
}

fn rank_law_suite(seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for s in suite_scenarios()? {
        let ev = &s.setup()?.evaluator;
        let mut mismatches = 0;
        for p in scenario_points(&s, 20, seed)? {
            let (r, d) = rank_pair(ev, &p)?;
            if r != d {
                mismatches += 1;
            }
        }
        out.push(check(
            format!("{}: rank mismatches over 20 points", s.id()),
            mismatches as f64,
            "= 0",
            mismatches == 0,
        ));
    }
    Ok(out)
}

fn cone_consistency_suite(seed: u64) -> Result<Vec<Check>> {
    let cfg = FlowConfig { max_iters: 2000, ..FlowConfig::default() };
    let mut scenarios = suite_scenarios()?;
    scenarios.push(BuiltinScenario::Sl2LogC(0.5).materialize()?);
    let mut out = Vec::new();
    for s in &scenarios {
        let setup = s.setup()?;
        let cone_fires = match &setup.cone {
            Some(h) => zero_fiber_obstruction(&h.cone, &h.targets)?.is_some(),
            None => false,
        };
        let slice_fires = setup.slice_report()?.is_some_and(|r| !r.attained);
        let mut conflicts = 0;
        for x in s.sample_points(10, seed) {
            let p = build_y_point(s, &x)?;
            let certified =
                cone_fires || slice_fires || constant_norm_certificate(&setup.evaluator, &p, &cfg)?.is_some();
            let (_, flow) = flow_minimize(&setup.evaluator, &p, &cfg)?;
            if certified && flow.is_witness() {
                conflicts += 1;
            }
        }
        out.push(check(format!("{}: witness/certificate conflicts", s.id()), conflicts as f64, "= 0", conflicts == 0));
    }
    Ok(out)
}

/// Start point of `X` used for the translation-invariance check.
pub fn representative_point(s: &UnipotentScenario) -> ProjectivePoint {
    let coords: Vec<f64> = match s.x_dim() {
        2 => vec![0.6, 0.8],
        3 => vec![0.0, 0.0, 1.0],
        n => (0..n).map(|i| if i + 1 == n { 1.0 } else { 0.0 }).collect(),
    };
    ProjectivePoint::new(crate::lie::CVector::from_iterator(coords.len(), coords.into_iter().map(c))).expect("nonzero")
}

/// Verdict category: witness, certificate kind, or undetermined.
pub fn verdict_class(v: &Verdict) -> &'static str {
    match v {
        Verdict::SemistableWitness { .. } => "semistable",
        Verdict::UnstableCertificate(cert) => cert.kind().as_str(),
        Verdict::Undetermined { .. } => "undetermined",
    }
}

/// Verdict classes at `p` and at 10 translates `g p` with `|log g| <= 1`;
/// also returns whether every flow trace was monotone.
pub fn translation_classes(s: &UnipotentScenario, cfg: &FlowConfig, seed: u64) -> Result<(Vec<&'static str>, bool)> {
    let setup = s.setup()?;
    let ev = &setup.evaluator;
    let p = build_y_point(s, &representative_point(s))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts = vec![p.clone()];
    for _ in 0..10 {
        let scale = rng.gen_range(0.1..1.0);
        let g = exp_group(&random_full(&mut rng, s.group(), scale))?;
        starts.push(ev.act_group(&g, &p)?);
    }
    let mut classes = Vec::new();
    let mut monotone = true;
    for q in &starts {
        classes.push(verdict_class(&classify_point(setup, q, cfg)?));
        let (trace, _) = flow_minimize(ev, q, cfg)?;
        monotone &= trace.is_monotone();
    }
    Ok((classes, monotone))
}

fn flow_monotonicity_suite(seed: u64) -> Result<Vec<Check>> {
    let cfg = FlowConfig::default();
    let mut out = Vec::new();
    for s in suite_scenarios()? {
        let (classes, monotone) = translation_classes(&s, &cfg, seed)?;
        let distinct = classes.iter().filter(|c| **c != classes[0]).count();
        out.push(check(format!("{}: monotone traces", s.id()), f64::from(u8::from(monotone)), "= 1", monotone));
        out.push(check(
            format!("{}: verdicts differing from '{}' over 10 translates", s.id(), classes[0]),
            distinct as f64,
            "= 0",
            distinct == 0,
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::all() {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn moment_condition_stats_per_model() {
        for (name, ev) in reference_models().unwrap() {
            let (worst, ratio) = moment_condition_stats(&ev, 10, 7).unwrap();
            assert!(worst < MOMENT_CONDITION_TOL, "{name}: {worst}");
            assert!((50.0..=200.0).contains(&ratio), "{name}: ratio {ratio}");
        }
    }

    #[test]
    fn equivariance_per_model() {
        for (name, ev) in reference_models().unwrap() {
            let r = equivariance_residual(&ev, 20, 3).unwrap();
            assert!(r < EQUIVARIANCE_TOL, "{name}: {r}");
        }
    }
}
