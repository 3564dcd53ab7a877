//! Gradient flow of `|mu|^2` along group orbits and point classification.
//!
//! A step moves `p` to `exp(-eta beta) p` where `beta = mu(p)` is read as a
//! Hermitian element of `g`; this is the downhill direction of `|mu|^2` along
//! the orbit. Step sizes follow an Armijo rule on the exact slope
//! `<mu, d mu(-beta p)>`.

use std::sync::OnceLock;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cones::{zero_fiber_obstruction, ObstructionCertificate, RationalCone, RationalVector};
use crate::error::{Error, Result};
use crate::lie::{
    exp_group, AlgebraElement, AlgebraKind, CVector, CoadjointVector, GroupDescriptor, SimpleFactor, C64,
};
use crate::moment::{random_full, KahlerModel, Leaf, ModelPoint, MomentEvaluator, RadialFamily};
use crate::rep::{build_representation, RepTree};

/// Relative decrease below which an iteration counts towards a stall.
const STALL_DECREASE: f64 = 1e-12;
/// Largest step the adaptive rule may grow to.
const MAX_STEP: f64 = 1e3;
/// Backtracking halvings before a step is abandoned.
const MAX_BACKTRACKS: usize = 80;
/// Group translates sampled by the constant-norm check.
pub const CONSTANT_NORM_SAMPLES: usize = 100;
/// Relative spread allowed by the constant-norm check.
pub const CONSTANT_NORM_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FlowConfig {
    pub max_iters: usize,
    /// `|mu|` at or below which a point is a semistable witness.
    pub tol: f64,
    pub initial_step: f64,
    pub armijo_shrink: f64,
    pub armijo_decrease: f64,
    pub stall_window: usize,
    /// Seed for randomised certificate checks.
    pub seed: u64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            max_iters: 10_000,
            tol: 1e-8,
            initial_step: 0.1,
            armijo_shrink: 0.5,
            armijo_decrease: 1e-4,
            stall_window: 200,
            seed: 0,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::domain("max_iters must be at least 1"));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::domain(format!("tol must be positive, got {}", self.tol)));
        }
        if !(self.armijo_shrink > 0.0 && self.armijo_shrink < 1.0) {
            return Err(Error::domain(format!("shrink factor must lie in (0, 1), got {}", self.armijo_shrink)));
        }
        if !(self.armijo_decrease > 0.0 && self.armijo_decrease < 1.0) {
            return Err(Error::domain(format!(
                "sufficient-decrease constant must lie in (0, 1), got {}",
                self.armijo_decrease
            )));
        }
        if !(self.initial_step > 0.0 && self.initial_step.is_finite()) {
            return Err(Error::domain(format!("initial step must be positive, got {}", self.initial_step)));
        }
        if self.stall_window == 0 {
            return Err(Error::domain("stall_window must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowSample {
    pub iteration: usize,
    pub norm_squared: f64,
    pub step: f64,
}

#[derive(Clone, Debug)]
pub struct FlowTrace {
    pub iterates: Vec<FlowSample>,
    pub final_point: ModelPoint,
    /// `|mu|` at the final point.
    pub final_residual: f64,
    pub iterations: usize,
    pub stalled: bool,
}

impl FlowTrace {
    pub fn is_monotone(&self) -> bool {
        self.iterates.windows(2).all(|w| w[1].norm_squared <= w[0].norm_squared)
    }
}

/// Minimisation of `|mu|` over the slice `((z, r), [0:1])`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceReport {
    /// Smallest `|mu|` found at a finite point.
    pub infimum_finite: f64,
    /// Extrapolated limit of `|mu|` at infinity along the minimising ray.
    pub tail_limit: f64,
    /// `min(infimum_finite, max(tail_limit, 0))`.
    pub infimum: f64,
    /// `[re z, im z, r]` of the best finite point.
    pub argmin: [f64; 3],
    /// The infimum is reached at a finite point (zero fibre nonempty).
    pub attained: bool,
    /// Not attained, but the values tend to zero at infinity.
    pub boundary: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    ConstantNorm,
    ConeObstruction,
    SliceInfimum,
}

impl CertificateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CertificateKind::ConstantNorm => "constant_norm",
            CertificateKind::ConeObstruction => "cone_obstruction",
            CertificateKind::SliceInfimum => "slice_infimum",
        }
    }
}

/// Evidence that a point is not semistable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// `|mu|` takes the same positive value on sampled group translates.
    ConstantNorm {
        value: f64,
        spread: f64,
        samples: usize,
    },
    ConeObstruction(ObstructionCertificate),
    SliceInfimum(SliceReport),
}

impl Certificate {
    pub fn kind(&self) -> CertificateKind {
        match self {
            Certificate::ConstantNorm { .. } => CertificateKind::ConstantNorm,
            Certificate::ConeObstruction(_) => CertificateKind::ConeObstruction,
            Certificate::SliceInfimum(_) => CertificateKind::SliceInfimum,
        }
    }

    /// Lower bound on `|mu|` carried by the certificate, when it has one.
    pub fn value(&self) -> Option<f64> {
        match self {
            Certificate::ConstantNorm { value, .. } => Some(*value),
            Certificate::ConeObstruction(_) => None,
            Certificate::SliceInfimum(r) => Some(r.infimum),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Verdict {
    SemistableWitness { point: ModelPoint, residual: f64, iterations: usize },
    UnstableCertificate(Certificate),
    Undetermined { best_residual: f64, iterations: usize, stalled: bool },
}

impl Verdict {
    pub fn kind_str(&self) -> &'static str {
        match self {
            Verdict::SemistableWitness { .. } => "semistable",
            Verdict::UnstableCertificate(_) => "unstable",
            Verdict::Undetermined { .. } => "undetermined",
        }
    }

    pub fn is_witness(&self) -> bool {
        matches!(self, Verdict::SemistableWitness { .. })
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Verdict::UnstableCertificate(c) => Some(c),
            _ => None,
        }
    }

    /// `|mu|` at the witness, the certificate's bound, or the best flow value.
    pub fn residual(&self) -> Option<f64> {
        match self {
            Verdict::SemistableWitness { residual, .. } => Some(*residual),
            Verdict::UnstableCertificate(c) => c.value(),
            Verdict::Undetermined { best_residual, .. } => Some(*best_residual),
        }
    }

    pub fn iterations(&self) -> usize {
        match self {
            Verdict::SemistableWitness { iterations, .. } | Verdict::Undetermined { iterations, .. } => *iterations,
            Verdict::UnstableCertificate(_) => 0,
        }
    }
}

/// Cone data enabling the obstruction pre-check.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeHook {
    pub cone: RationalCone,
    pub targets: Vec<RationalVector>,
}

/// A moment evaluator together with the certificate pre-checks that apply.
#[derive(Debug)]
pub struct StabilitySetup {
    pub evaluator: MomentEvaluator,
    pub cone: Option<ConeHook>,
    /// When false, points without a certificate are left undetermined.
    pub flow_enabled: bool,
    slice: OnceLock<Option<SliceReport>>,
}

impl Clone for StabilitySetup {
    fn clone(&self) -> Self {
        Self {
            evaluator: self.evaluator.clone(),
            cone: self.cone.clone(),
            flow_enabled: self.flow_enabled,
            slice: self.slice.clone(),
        }
    }
}

impl StabilitySetup {
    pub fn new(evaluator: MomentEvaluator) -> Self {
        Self { evaluator, cone: None, flow_enabled: true, slice: OnceLock::new() }
    }

    pub fn with_cone(mut self, hook: ConeHook) -> Self {
        self.cone = Some(hook);
        self
    }

    pub fn without_flow(mut self) -> Self {
        self.flow_enabled = false;
        self
    }

    /// Slice analysis, computed once when the model has the slice shape.
    pub fn slice_report(&self) -> Result<Option<&SliceReport>> {
        if let Some(r) = self.slice.get() {
            return Ok(r.as_ref());
        }
        let report = match slice_family(&self.evaluator) {
            Some(_) => Some(slice_infimum(&self.evaluator)?),
            None => None,
        };
        Ok(self.slice.get_or_init(|| report).as_ref())
    }
}

/// The Hermitian moment value `mu(p)` as an element of `g`; zero iff `mu(p) = 0`.
pub fn descent_direction(ev: &MomentEvaluator, p: &ModelPoint) -> Result<AlgebraElement> {
    direction_from_coords(ev.group(), &ev.coords(p)?)
}

fn direction_from_coords(group: &GroupDescriptor, m: &[f64]) -> Result<AlgebraElement> {
    let mu = CoadjointVector::from_coords(group, m)?;
    AlgebraElement::new(group, mu.blocks().to_vec(), AlgebraKind::Full)
}

/// `d/dt |mu|^2` along `t -> exp(-t beta) p` at `t = 0`.
fn descent_slope(ev: &MomentEvaluator, p: &ModelPoint, m: &[f64], beta: &AlgebraElement) -> Result<f64> {
    let w = ev.act_algebra(beta, p)?.scaled(-1.0);
    let dm = ev.coords_derivative(p, &w)?;
    Ok(m.iter().zip(&dm).map(|(a, b)| a * b).sum())
}

/// Exact slope of `|mu|^2` along the descent direction at `p`.
pub fn descent_rate(ev: &MomentEvaluator, p: &ModelPoint) -> Result<f64> {
    let m = ev.coords(p)?;
    descent_slope(ev, p, &m, &descent_direction(ev, p)?)
}

/// Armijo-controlled descent of `|mu|^2` along the orbit of `p0`.
pub fn flow_minimize(ev: &MomentEvaluator, p0: &ModelPoint, cfg: &FlowConfig) -> Result<(FlowTrace, Verdict)> {
    cfg.validate()?;
    let mut p = ev.normalize(p0);
    let mut f = ev.norm_squared(&p)?;
    let mut eta = cfg.initial_step;
    let mut iterates = vec![FlowSample { iteration: 0, norm_squared: f, step: 0.0 }];
    let mut iterations = 0;
    let mut stalled = false;
    let mut reference = f;
    let mut since_decrease = 0;

    while f.sqrt() > cfg.tol && iterations < cfg.max_iters {
        let m = ev.coords(&p)?;
        let beta = direction_from_coords(ev.group(), &m)?;
        let slope = descent_slope(ev, &p, &m, &beta)?;
        if !(slope < 0.0) {
            stalled = true;
            break;
        }
        let mut accepted = None;
        let mut exp_failures = 0;
        for _ in 0..MAX_BACKTRACKS {
            let trial = exp_group(&beta.scaled(-eta))
                .and_then(|g| ev.act_group(&g, &p))
                .map(|q| ev.normalize(&q))
                .and_then(|q| ev.norm_squared(&q).map(|fq| (q, fq)));
            match trial {
                Ok((q, fq)) if fq.is_finite() && fq <= f + cfg.armijo_decrease * eta * slope => {
                    accepted = Some((q, fq));
                    break;
                }
                Ok(_) => {}
                Err(_) => exp_failures += 1,
            }
            eta *= cfg.armijo_shrink;
        }
        let Some((q, fq)) = accepted else {
            if exp_failures == MAX_BACKTRACKS {
                return Err(Error::Flow {
                    message: "group exponential overflowed at every backtracking step".into(),
                    iterations,
                    best_residual: f.sqrt(),
                });
            }
            stalled = true;
            break;
        };
        if fq > f {
            return Err(Error::Flow {
                message: format!("accepted step increased |mu|^2 from {f} to {fq}"),
                iterations,
                best_residual: f.sqrt(),
            });
        }
        iterations += 1;
        iterates.push(FlowSample { iteration: iterations, norm_squared: fq, step: eta });
        p = q;
        f = fq;
        if f <= reference * (1.0 - STALL_DECREASE) {
            reference = f;
            since_decrease = 0;
        } else {
            since_decrease += 1;
            if since_decrease >= cfg.stall_window {
                stalled = true;
                break;
            }
        }
        eta = (eta * 2.0).min(MAX_STEP);
    }

    let residual = f.sqrt();
    let verdict = if residual <= cfg.tol {
        Verdict::SemistableWitness { point: p.clone(), residual, iterations }
    } else {
        Verdict::Undetermined { best_residual: residual, iterations, stalled }
    };
    let trace = FlowTrace { iterates, final_point: p, final_residual: residual, iterations, stalled };
    Ok((trace, verdict))
}

/// `|mu|` is constant on sampled complex-group translates of `p`; only
/// attempted on compact models.
pub fn constant_norm_certificate(
    ev: &MomentEvaluator,
    p: &ModelPoint,
    cfg: &FlowConfig,
) -> Result<Option<Certificate>> {
    if !ev.is_compact() {
        return Ok(None);
    }
    let value = ev.norm_squared(p)?.sqrt();
    if value <= cfg.tol {
        return Ok(None);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut spread: f64 = 0.0;
    for _ in 0..CONSTANT_NORM_SAMPLES {
        let g = exp_group(&random_full(&mut rng, ev.group(), 1.0))?;
        let q = ev.act_group(&g, p)?;
        spread = spread.max((ev.norm_squared(&q)?.sqrt() - value).abs());
        if spread > CONSTANT_NORM_TOL * value.max(1.0) {
            return Ok(None);
        }
    }
    Ok(Some(Certificate::ConstantNorm { value, spread, samples: CONSTANT_NORM_SAMPLES }))
}

/// Certificate pre-checks in the order cone, slice, constant norm; then the flow.
pub fn classify_point(setup: &StabilitySetup, p: &ModelPoint, cfg: &FlowConfig) -> Result<Verdict> {
    cfg.validate()?;
    setup.evaluator.check_point(p)?;
    if let Some(hook) = &setup.cone {
        if let Some(cert) = zero_fiber_obstruction(&hook.cone, &hook.targets)? {
            return Ok(Verdict::UnstableCertificate(Certificate::ConeObstruction(cert)));
        }
    }
    if let Some(report) = setup.slice_report()? {
        if !report.attained {
            return Ok(Verdict::UnstableCertificate(Certificate::SliceInfimum(report.clone())));
        }
    }
    if let Some(cert) = constant_norm_certificate(&setup.evaluator, p, cfg)? {
        return Ok(Verdict::UnstableCertificate(cert));
    }
    if !setup.flow_enabled {
        let best_residual = setup.evaluator.norm_squared(p)?.sqrt();
        return Ok(Verdict::Undetermined { best_residual, iterations: 0, stalled: false });
    }
    flow_minimize(&setup.evaluator, p, cfg).map(|(_, v)| v)
}

fn is_a1_standard(leaf: &Leaf) -> bool {
    let rep = leaf.rep();
    rep.group().factors() == [SimpleFactor::A1] && *rep.tree() == RepTree::standard(0)
}

/// The radial profile when the model is a radial factor on `C^2` times `P1`.
pub fn slice_family(ev: &MomentEvaluator) -> Option<&RadialFamily> {
    match ev.leaves() {
        [lin @ Leaf::Linear { family, .. }, proj @ Leaf::Projective { .. }]
            if is_a1_standard(lin) && is_a1_standard(proj) && !matches!(family, RadialFamily::Power) =>
        {
            Some(family)
        }
        _ => None,
    }
}

/// Largest modulus explored on the slice.
pub const SLICE_RADIUS_MAX: f64 = 1e3;
/// `|mu|` below which the slice infimum counts as attained.
pub const SLICE_ATTAINED_TOL: f64 = 1e-10;
/// Tail limit below which an unattained infimum is a boundary case.
pub const SLICE_BOUNDARY_TOL: f64 = 1e-6;

/// Minimises `|mu|` over `((z, r), [0:1])`, `z` complex and `r >= 0`, by a
/// log-spaced grid followed by compass search.
pub fn slice_infimum(ev: &MomentEvaluator) -> Result<SliceReport> {
    if slice_family(ev).is_none() {
        return Err(Error::structural("slice analysis needs a radial model on C^2 times P1"));
    }
    let eval = |x: &[f64; 3]| -> Result<f64> {
        let v = CVector::from_row_slice(&[C64::new(x[0], x[1]), C64::new(x[2], 0.0)]);
        let fs = CVector::from_row_slice(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
        Ok(ev.norm_squared(&ModelPoint::new(vec![v, fs]))?.sqrt())
    };

    let radii: Vec<f64> =
        std::iter::once(0.0).chain((0..=60).map(|k| 10f64.powf(-3.0 + 6.0 * k as f64 / 60.0))).collect();
    let mut best = ([0.0; 3], f64::INFINITY);
    for &a in &radii {
        for &r in &radii {
            for phase in [0.0, std::f64::consts::FRAC_PI_2, 2.0] {
                let x = [a * f64::cos(phase), a * f64::sin(phase), r];
                let h = eval(&x)?;
                if h < best.1 {
                    best = (x, h);
                }
            }
        }
    }

    let clamp = |mut x: [f64; 3]| {
        x[2] = x[2].clamp(0.0, SLICE_RADIUS_MAX);
        let a = x[0].hypot(x[1]);
        if a > SLICE_RADIUS_MAX {
            x[0] *= SLICE_RADIUS_MAX / a;
            x[1] *= SLICE_RADIUS_MAX / a;
        }
        x
    };
    let norm3 = |x: &[f64; 3]| (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    let mut step = 0.25 * norm3(&best.0).max(1e-3);
    while step > 1e-15 * norm3(&best.0).max(1.0) {
        let mut improved = false;
        for k in 0..3 {
            for sign in [1.0, -1.0] {
                let mut x = best.0;
                x[k] += sign * step;
                let x = clamp(x);
                let h = eval(&x)?;
                if h < best.1 {
                    best = (x, h);
                    improved = true;
                }
            }
        }
        if improved {
            step *= 2.0;
        } else {
            step *= 0.5;
        }
    }

    let n = norm3(&best.0);
    let dir = if n > 0.0 { best.0.map(|x| x / n) } else { [1.0, 0.0, 0.0] };
    let far = eval(&dir.map(|x| x * SLICE_RADIUS_MAX))?;
    let half = eval(&dir.map(|x| x * SLICE_RADIUS_MAX / 2.0))?;
    let tail_limit = (4.0 * far - half) / 3.0;

    let attained = best.1 <= SLICE_ATTAINED_TOL;
    Ok(SliceReport {
        infimum_finite: best.1,
        tail_limit,
        infimum: best.1.min(tail_limit.max(0.0)),
        argmin: best.0,
        attained,
        boundary: !attained && tail_limit < SLICE_BOUNDARY_TOL,
    })
}

/// Slice analysis for the radial profile on `C^2` times the Fubini-Study `P1`.
pub fn slice_infimum_for(family: RadialFamily) -> Result<SliceReport> {
    let g = GroupDescriptor::sl2();
    let std = std::sync::Arc::new(build_representation(&g, RepTree::standard(0))?);
    let model = KahlerModel::ProductSum(vec![KahlerModel::radial(std.clone(), family), KahlerModel::fubini_study(std)]);
    slice_infimum(&MomentEvaluator::new(&g, &model)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{c, CMatrix};
    use crate::moment::random_unit_vector;
    use crate::rep::Representation;
    use std::sync::Arc;

    fn std_a1() -> Arc<Representation> {
        Arc::new(build_representation(&GroupDescriptor::sl2(), RepTree::standard(0)).unwrap())
    }

    fn vecc(v: &[f64]) -> CVector {
        CVector::from_iterator(v.len(), v.iter().map(|&x| c(x)))
    }

    fn log_model(cc: f64) -> MomentEvaluator {
        let r = std_a1();
        let model = KahlerModel::ProductSum(vec![
            KahlerModel::radial(r.clone(), RadialFamily::Log { c: cc }),
            KahlerModel::fubini_study(r),
        ]);
        MomentEvaluator::new(&GroupDescriptor::sl2(), &model).unwrap()
    }

    fn p1_p1() -> MomentEvaluator {
        let r = std_a1();
        let model = KahlerModel::ProductSum(vec![KahlerModel::fubini_study(r.clone()), KahlerModel::fubini_study(r)]);
        MomentEvaluator::new(&GroupDescriptor::sl2(), &model).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(FlowConfig::default().validate().is_ok());
        for bad in [
            FlowConfig { max_iters: 0, ..Default::default() },
            FlowConfig { tol: 0.0, ..Default::default() },
            FlowConfig { armijo_shrink: 1.0, ..Default::default() },
        ] {
            assert!(matches!(bad.validate(), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn direction_examples() {
        let ev = log_model(2.0);
        let zero = ModelPoint::new(vec![vecc(&[1.0, 0.0]), vecc(&[0.0, 1.0])]);
        assert!(descent_direction(&ev, &zero).unwrap().norm() < 1e-15);

        let r = std_a1();
        let fs = MomentEvaluator::new(r.group(), &KahlerModel::fubini_study(r.clone())).unwrap();
        let d = descent_direction(&fs, &ModelPoint::single(vecc(&[1.0, 0.0]))).unwrap();
        let want = CMatrix::from_row_slice(2, 2, &[c(0.5), c(0.0), c(0.0), c(-0.5)]);
        assert!((&d.blocks()[0] - want).norm() < 1e-15);
        assert_eq!(d.kind(), AlgebraKind::Full);
    }

    #[test]
    fn direction_decreases_norm() {
        let ev = log_model(1.5);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let p = ModelPoint::new(vec![random_unit_vector(&mut rng, 2) * c(1.7), random_unit_vector(&mut rng, 2)]);
            let beta = descent_direction(&ev, &p).unwrap();
            let h = 1e-6;
            let at = |t: f64| {
                let q = ev.act_group(&exp_group(&beta.scaled(-t)).unwrap(), &p).unwrap();
                ev.norm_squared(&q).unwrap()
            };
            let fd = (at(h) - at(-h)) / (2.0 * h);
            assert!(fd <= 1e-9, "slope {fd}");
            // |mu|^2 here is the half-trace norm, whose slope is sum m_a dm_a
            let exact = descent_rate(&ev, &p).unwrap();
            assert!((fd - exact).abs() < 1e-6, "fd {fd} exact {exact}");
        }
    }

    #[test]
    fn zero_start_is_immediate_witness() {
        let ev = log_model(2.0);
        let p = ModelPoint::new(vec![vecc(&[1.0, 0.0]), vecc(&[0.0, 1.0])]);
        let (trace, v) = flow_minimize(&ev, &p, &FlowConfig::default()).unwrap();
        assert!(v.is_witness());
        assert_eq!(trace.iterations, 0);
    }

    #[test]
    fn log_flow_converges_for_large_c() {
        let ev = log_model(2.0);
        let p = ModelPoint::new(vec![vecc(&[3.0, 0.2]), vecc(&[0.0, 1.0])]);
        let (trace, v) = flow_minimize(&ev, &p, &FlowConfig::default()).unwrap();
        assert!(v.is_witness(), "{v:?}");
        assert!(trace.final_residual < 1e-8);
        assert!(trace.is_monotone());
    }

    #[test]
    fn diagonal_p1_examples() {
        let ev = p1_p1();
        let cfg = FlowConfig::default();
        let p = ModelPoint::new(vec![vecc(&[1.0, 0.0]), vecc(&[1.0, 1.0])]);
        let (_, v) = flow_minimize(&ev, &p, &cfg).unwrap();
        assert!(v.is_witness(), "{v:?}");

        let q = ModelPoint::new(vec![vecc(&[1.0, 0.0]), vecc(&[1.0, 0.0])]);
        let (_, v) = flow_minimize(&ev, &q, &cfg).unwrap();
        match v {
            Verdict::Undetermined { best_residual, .. } => assert!(best_residual >= 0.9),
            other => panic!("expected undetermined, got {other:?}"),
        }
        let setup = StabilitySetup::new(ev);
        match classify_point(&setup, &q, &cfg).unwrap() {
            Verdict::UnstableCertificate(Certificate::ConstantNorm { value, .. }) => {
                assert!((value - 1.0).abs() < 1e-12)
            }
            other => panic!("expected constant norm, got {other:?}"),
        }
    }

    #[test]
    fn single_p1_is_never_semistable() {
        let r = std_a1();
        let ev = MomentEvaluator::new(r.group(), &KahlerModel::fubini_study(r.clone())).unwrap();
        let cfg = FlowConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let setup = StabilitySetup::new(ev.clone());
        for _ in 0..5 {
            let p = ModelPoint::single(random_unit_vector(&mut rng, 2));
            let (_, v) = flow_minimize(&ev, &p, &cfg).unwrap();
            match v {
                Verdict::Undetermined { best_residual, .. } => assert!((best_residual - 0.5).abs() < 1e-12),
                other => panic!("{other:?}"),
            }
            match classify_point(&setup, &p, &cfg).unwrap() {
                Verdict::UnstableCertificate(Certificate::ConstantNorm { value, .. }) => {
                    assert!((value - 0.5).abs() < 1e-12)
                }
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn slice_threshold() {
        for cc in [1.1, 1.5, 2.0, 4.0] {
            let r = slice_infimum(&log_model(cc)).unwrap();
            assert!(r.attained && r.infimum < 1e-10, "c = {cc}: {r:?}");
        }
        // for c < 1 the infimum (1 - c)/2 is approached as |z| grows along r = 0
        for cc in [0.25, 0.5, 0.9] {
            let r = slice_infimum(&log_model(cc)).unwrap();
            let oracle = (1.0 - cc) / 2.0;
            assert!(!r.attained && !r.boundary);
            assert!((r.infimum - oracle).abs() < 1e-6, "c = {cc}: {} vs {oracle}", r.infimum);
            assert!(r.infimum_finite > oracle);
        }
        let r = slice_infimum(&log_model(1.0)).unwrap();
        assert!(!r.attained && r.boundary && r.infimum_finite > 0.0, "{r:?}");
    }

    #[test]
    fn slice_attained_where_expected() {
        // (c - 1)|z|^2 = 1 and r = 0
        let r = slice_infimum(&log_model(2.0)).unwrap();
        assert!((r.argmin[0].hypot(r.argmin[1]) - 1.0).abs() < 1e-6);
        assert!(r.argmin[2] < 1e-6);
        let r = slice_infimum(&log_model(5.0)).unwrap();
        assert!((r.argmin[0].hypot(r.argmin[1]) - 0.5).abs() < 1e-6);
    }

    #[test]
    fn slice_rejects_other_shapes() {
        assert!(matches!(slice_infimum(&p1_p1()), Err(Error::Structural(_))));
    }

    #[test]
    fn certificates_take_priority() {
        let setup = StabilitySetup::new(log_model(0.5));
        let p = ModelPoint::new(vec![vecc(&[1.0, 0.0]), vecc(&[0.3, 1.0])]);
        let v = classify_point(&setup, &p, &FlowConfig::default()).unwrap();
        assert_eq!(v.certificate().map(Certificate::kind), Some(CertificateKind::SliceInfimum));
    }

    #[test]
    fn verdict_invariant_under_translation() {
        let ev = log_model(2.0);
        let setup = StabilitySetup::new(ev.clone());
        let cfg = FlowConfig::default();
        let p = ModelPoint::new(vec![vecc(&[1.0, 0.0]), vecc(&[0.2, 1.0])]);
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        for _ in 0..10 {
            let g = exp_group(&random_full(&mut rng, ev.group(), 0.9)).unwrap();
            let q = ev.act_group(&g, &p).unwrap();
            assert!(classify_point(&setup, &q, &cfg).unwrap().is_witness());
        }
    }
}
