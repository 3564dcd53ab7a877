//! Unipotent semistability scenarios.
//!
//! A scenario pairs a projective variety `X` carrying an action of a unipotent
//! group `N` with a `G`-space `Y = G/N x Z` (or just `Z`) and an
//! `N`-equivariant embedding `X -> Z`. A point `x` is tested by classifying
//! `(v_base, iota(x))` in `Y`.

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cones::{cone_from_highest_weights, projective_dominant_targets};
use crate::error::{Error, Result};
use crate::flow::{classify_point, ConeHook, FlowConfig, SliceReport, StabilitySetup, Verdict};
use crate::lie::{
    c, exp_group, AlgebraElement, AlgebraKind, CMatrix, CVector, GroupDescriptor, GroupElement, Weight, C64,
};
use crate::moment::{random_unit_vector, KahlerModel, ModelPoint, MomentEvaluator, RadialFamily};
use crate::rep::{
    build_representation, projective_distance, stabilizer_check, ProjectivePoint, RepTree, Representation,
};

/// Stabilizer residual accepted by validation.
pub const STABILIZER_TOL: f64 = 1e-10;
/// Equivariance residual (projective distance) accepted by validation.
pub const EQUIVARIANCE_TOL: f64 = 1e-8;

/// Kähler model on the `G/N` factor.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrbitModel {
    Flat,
    Radial { family: RadialFamily },
}

#[derive(Clone, Debug)]
pub struct OrbitFactor {
    pub rep: Arc<Representation>,
    pub v_base: CVector,
    pub model: OrbitModel,
}

/// One projective factor `P(W)` with its Fubini-Study weight.
#[derive(Clone, Debug)]
pub struct ExtensionPart {
    pub rep: Arc<Representation>,
    pub weight: f64,
}

/// Coordinates of one extension factor as a function of `x`.
#[derive(Clone, Debug, PartialEq)]
pub enum EmbeddingSlot {
    Linear(CMatrix),
    Constant(CVector),
}

#[derive(Clone, Debug, PartialEq)]
pub enum XDomain {
    /// All of `P^{n-1}`.
    Full,
    Points(Vec<ProjectivePoint>),
}

/// Plain description of a scenario; see [`UnipotentScenario::new`].
#[derive(Clone, Debug)]
pub struct ScenarioSpec {
    pub id: String,
    pub group: GroupDescriptor,
    /// Basis of `Lie(N)` inside `g`.
    pub n_basis: Vec<AlgebraElement>,
    /// Matrices of the basis acting on the homogeneous coordinates of `X`.
    pub x_action: Vec<CMatrix>,
    pub x_dim: usize,
    pub orbit: Option<OrbitFactor>,
    pub extension: Vec<ExtensionPart>,
    pub embedding: Vec<EmbeddingSlot>,
    pub domain: XDomain,
    /// Highest weights whose cone is the moment image of the orbit closure.
    pub cone_metadata: Option<Vec<Weight>>,
    pub flow_enabled: bool,
}

#[derive(Debug)]
pub struct UnipotentScenario {
    spec: ScenarioSpec,
    setup: OnceLock<StabilitySetup>,
}

impl Clone for UnipotentScenario {
    fn clone(&self) -> Self {
        Self { spec: self.spec.clone(), setup: self.setup.clone() }
    }
}

impl UnipotentScenario {
    /// Checks shapes and group consistency; numerical invariants are left to
    /// [`validate_scenario`].
    pub fn new(spec: ScenarioSpec) -> Result<Self> {
        let g = &spec.group;
        if spec.x_dim < 2 {
            return Err(Error::structural("X needs at least two homogeneous coordinates"));
        }
        if spec.n_basis.len() != spec.x_action.len() {
            return Err(Error::structural(format!(
                "{} unipotent generators but {} action matrices on X",
                spec.n_basis.len(),
                spec.x_action.len()
            )));
        }
        for xi in &spec.n_basis {
            AlgebraElement::new(g, xi.blocks().to_vec(), AlgebraKind::Full)?;
        }
        for m in &spec.x_action {
            if m.shape() != (spec.x_dim, spec.x_dim) {
                return Err(Error::structural(format!(
                    "action matrix of shape {:?} on X of dimension {}",
                    m.shape(),
                    spec.x_dim
                )));
            }
        }
        if let Some(o) = &spec.orbit {
            if o.rep.group() != g {
                return Err(Error::structural("orbit representation belongs to a different group"));
            }
            if o.v_base.len() != o.rep.dim() {
                return Err(Error::structural("base vector does not match the orbit representation"));
            }
        }
        if spec.extension.is_empty() {
            return Err(Error::structural("scenario needs at least one extension factor"));
        }
        if spec.embedding.len() != spec.extension.len() {
            return Err(Error::structural("one embedding slot per extension factor is required"));
        }
        for (part, slot) in spec.extension.iter().zip(&spec.embedding) {
            if part.rep.group() != g {
                return Err(Error::structural("extension representation belongs to a different group"));
            }
            let ok = match slot {
                EmbeddingSlot::Linear(m) => m.shape() == (part.rep.dim(), spec.x_dim),
                EmbeddingSlot::Constant(v) => v.len() == part.rep.dim() && v.iter().any(|z| z.norm() > 0.0),
            };
            if !ok {
                return Err(Error::structural("embedding slot does not match its extension factor"));
            }
        }
        if let XDomain::Points(pts) = &spec.domain {
            if pts.iter().any(|p| p.coords().len() != spec.x_dim) {
                return Err(Error::structural("domain point of the wrong dimension"));
            }
        }
        if let Some(ws) = &spec.cone_metadata {
            if ws.iter().any(|w| w.coords().len() != g.rank()) {
                return Err(Error::structural("cone weight does not match the group rank"));
            }
        }
        Ok(Self { spec, setup: OnceLock::new() })
    }

    pub fn spec(&self) -> &ScenarioSpec {
        &self.spec
    }

    pub fn into_spec(self) -> ScenarioSpec {
        self.spec
    }

    pub fn id(&self) -> &str {
        &self.spec.id
    }

    pub fn group(&self) -> &GroupDescriptor {
        &self.spec.group
    }

    pub fn x_dim(&self) -> usize {
        self.spec.x_dim
    }

    /// Kähler model on `Y`: the orbit factor (if any) followed by the
    /// Fubini-Study factors.
    pub fn model(&self) -> KahlerModel {
        let mut parts = Vec::new();
        if let Some(o) = &self.spec.orbit {
            parts.push(match &o.model {
                OrbitModel::Flat => KahlerModel::flat(o.rep.clone()),
                OrbitModel::Radial { family } => KahlerModel::radial(o.rep.clone(), family.clone()),
            });
        }
        parts.extend(
            self.spec.extension.iter().map(|e| KahlerModel::FubiniStudy { rep: e.rep.clone(), weight: e.weight }),
        );
        KahlerModel::ProductSum(parts)
    }

    fn build_setup(&self) -> Result<StabilitySetup> {
        let ev = MomentEvaluator::new(&self.spec.group, &self.model())?;
        let mut setup = StabilitySetup::new(ev);
        if let Some(ws) = &self.spec.cone_metadata {
            let cone = cone_from_highest_weights(&self.spec.group, ws)?;
            let targets = projective_dominant_targets(&self.spec.extension[0].rep, true)?;
            setup = setup.with_cone(ConeHook { cone, targets });
        }
        if !self.spec.flow_enabled {
            setup = setup.without_flow();
        }
        Ok(setup)
    }

    /// Moment evaluator and certificate hooks, built once.
    pub fn setup(&self) -> Result<&StabilitySetup> {
        if let Some(s) = self.setup.get() {
            return Ok(s);
        }
        let s = self.build_setup()?;
        Ok(self.setup.get_or_init(|| s))
    }

    /// Slice analysis of the `Y` model; structural error when it does not
    /// have the radial-times-`P1` shape.
    pub fn slice_report(&self) -> Result<SliceReport> {
        self.setup()?
            .slice_report()?
            .cloned()
            .ok_or_else(|| Error::structural(format!("scenario '{}' has no slice form", self.spec.id)))
    }

    /// `exp(sum t_i xi_i)` acting on the coordinates of `X`.
    pub fn x_group_matrix(&self, coeffs: &[f64]) -> Result<CMatrix> {
        self.check_coeffs(coeffs)?;
        let mut m = CMatrix::zeros(self.spec.x_dim, self.spec.x_dim);
        for (t, a) in coeffs.iter().zip(&self.spec.x_action) {
            m += a * c(*t);
        }
        Ok(m.exp())
    }

    /// `exp(sum t_i xi_i)` as an element of `G`.
    pub fn n_element(&self, coeffs: &[f64]) -> Result<GroupElement> {
        self.check_coeffs(coeffs)?;
        let mut acc = AlgebraElement::zero(&self.spec.group, AlgebraKind::Full);
        for (t, xi) in coeffs.iter().zip(&self.spec.n_basis) {
            acc = acc.add(&xi.scaled(*t))?;
        }
        exp_group(&acc)
    }

    fn check_coeffs(&self, coeffs: &[f64]) -> Result<()> {
        if coeffs.len() != self.spec.n_basis.len() {
            return Err(Error::structural(format!(
                "{} coefficients for {} unipotent generators",
                coeffs.len(),
                self.spec.n_basis.len()
            )));
        }
        Ok(())
    }

    fn embed(&self, x: &CVector) -> Result<Vec<CVector>> {
        self.spec
            .embedding
            .iter()
            .map(|slot| match slot {
                EmbeddingSlot::Constant(v) => Ok(v.clone()),
                EmbeddingSlot::Linear(m) => {
                    let y = m * x;
                    if y.iter().all(|z| z.norm() == 0.0) {
                        Err(Error::domain("point lies where the embedding is undefined"))
                    } else {
                        Ok(y)
                    }
                }
            })
            .collect()
    }

    /// Up to `n` sample points of `X`: the listed points, the P1 grid, or
    /// seeded random points.
    pub fn sample_points(&self, n: usize, seed: u64) -> Vec<ProjectivePoint> {
        match &self.spec.domain {
            XDomain::Points(pts) => pts.iter().take(n).cloned().collect(),
            XDomain::Full if self.spec.x_dim == 2 => p1_grid(n),
            XDomain::Full => random_points(self.spec.x_dim, n, seed),
        }
    }
}

/// The point of `Y` at which semistability of `x` is tested.
pub fn build_y_point(s: &UnipotentScenario, x: &ProjectivePoint) -> Result<ModelPoint> {
    if x.coords().len() != s.spec.x_dim {
        return Err(Error::structural(format!("point has {} coordinates, X has {}", x.coords().len(), s.spec.x_dim)));
    }
    if let XDomain::Points(pts) = &s.spec.domain {
        if !pts.iter().any(|p| p.distance(x) < 1e-12) {
            return Err(Error::domain("point is not in the scenario's point list"));
        }
    }
    let mut slots = Vec::new();
    if let Some(o) = &s.spec.orbit {
        slots.push(o.v_base.clone());
    }
    slots.extend(s.embed(x.coords())?);
    Ok(ModelPoint::new(slots))
}

/// Classifies `x` through its image in `Y`.
pub fn classify_n_semistable(s: &UnipotentScenario, x: &ProjectivePoint, cfg: &FlowConfig) -> Result<Verdict> {
    let p = build_y_point(s, x)?;
    classify_point(s.setup()?, &p, cfg)
}

#[derive(Clone, Debug)]
pub struct SweepRow {
    pub point: ProjectivePoint,
    pub verdict: Verdict,
}

/// Classifies every sample point; rows come back in input order.
pub fn sweep_semistable_set(
    s: &UnipotentScenario,
    sample: &[ProjectivePoint],
    cfg: &FlowConfig,
) -> Result<Vec<SweepRow>> {
    s.setup()?.slice_report()?;
    sample
        .par_iter()
        .map(|x| classify_n_semistable(s, x, cfg).map(|verdict| SweepRow { point: x.clone(), verdict }))
        .collect()
}

/// `n` points of `P1` spread by polar angle `pi k/(n-1)` and golden-angle
/// longitude; the first is `[1:0]`.
pub fn p1_grid(n: usize) -> Vec<ProjectivePoint> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let theta = if n > 1 { std::f64::consts::PI * k as f64 / (n - 1) as f64 } else { 0.0 };
            let phi = golden * k as f64;
            let x = [c((theta / 2.0).cos()), C64::from_polar((theta / 2.0).sin(), phi)];
            ProjectivePoint::from_slice(&x).expect("unit vector")
        })
        .collect()
}

/// Seeded uniformly random points of `P^{dim-1}`.
pub fn random_points(dim: usize, n: usize, seed: u64) -> Vec<ProjectivePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| ProjectivePoint::new(random_unit_vector(&mut rng, dim)).expect("unit vector")).collect()
}

fn is_diagonal_sl2(g: &GroupElement) -> bool {
    let b = &g.blocks()[0];
    b.nrows() == 2 && b[(0, 1)].norm() == 0.0 && b[(1, 0)].norm() == 0.0
}

fn is_upper_unipotent(g: &GroupElement) -> bool {
    let b = &g.blocks()[0];
    b.nrows() == 2
        && b[(1, 0)].norm() == 0.0
        && (b[(0, 0)] - c(1.0)).norm() < 1e-14
        && (b[(1, 1)] - c(1.0)).norm() < 1e-14
}

/// Borel action `(t u) . (s, x) = (t s, (s^-1 u s) . x)` with `x` in the
/// defining representation of `SL(2)`.
pub fn group_twist_action(
    t: &GroupElement,
    u: &GroupElement,
    s: &GroupElement,
    x: &CVector,
) -> Result<(GroupElement, CVector)> {
    for g in [t, u, s] {
        if g.blocks().len() != 1 || g.blocks()[0].nrows() != 2 {
            return Err(Error::structural("twist action is defined on SL(2)"));
        }
    }
    if !is_diagonal_sl2(t) || !is_diagonal_sl2(s) {
        return Err(Error::structural("t and s must lie in the diagonal torus"));
    }
    if !is_upper_unipotent(u) {
        return Err(Error::structural("u must be upper unipotent"));
    }
    if x.len() != 2 {
        return Err(Error::structural("x must be a vector of C^2"));
    }
    let twisted = s.inverse()?.mul(u)?.mul(s)?;
    Ok((t.mul(s)?, &twisted.blocks()[0] * x))
}

/// Residuals of the scenario invariants; usable iff `issues` is empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub stabilizer_residual: f64,
    pub equivariance_residual: f64,
    pub model_compatible: bool,
    pub issues: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Checks that `N` fixes `v_base`, that the embedding is `N`-equivariant on
/// 20 seeded points for `t` in {0.3, 1}, and that the model can be built.
pub fn validate_scenario(s: &UnipotentScenario) -> ValidationReport {
    let mut issues = Vec::new();
    let spec = &s.spec;

    let stabilizer_residual = match &spec.orbit {
        Some(o) => match stabilizer_check(&o.rep, &o.v_base, &spec.n_basis) {
            Ok(r) => r.max_residual(),
            Err(e) => {
                issues.push(format!("stabilizer check failed: {e}"));
                f64::INFINITY
            }
        },
        None => 0.0,
    };
    if !(stabilizer_residual < STABILIZER_TOL || stabilizer_residual.is_infinite()) {
        issues.push(format!("N does not fix the base vector (residual {stabilizer_residual:.3e})"));
    }

    let equivariance_residual = match equivariance_residual(s) {
        Ok(r) => r,
        Err(e) => {
            issues.push(format!("equivariance check failed: {e}"));
            f64::INFINITY
        }
    };
    if !(equivariance_residual < EQUIVARIANCE_TOL || equivariance_residual.is_infinite()) {
        issues.push(format!("embedding is not N-equivariant (residual {equivariance_residual:.3e})"));
    }

    let model_compatible = match s.build_setup() {
        Ok(_) => true,
        Err(e) => {
            issues.push(format!("model cannot be built: {e}"));
            false
        }
    };

    ValidationReport { stabilizer_residual, equivariance_residual, model_compatible, issues }
}

fn equivariance_residual(s: &UnipotentScenario) -> Result<f64> {
    let spec = &s.spec;
    let xs: Vec<ProjectivePoint> = match &spec.domain {
        XDomain::Points(pts) => pts.iter().take(20).cloned().collect(),
        XDomain::Full => random_points(spec.x_dim, 20, 0),
    };
    let k = spec.n_basis.len();
    let mut directions: Vec<Vec<f64>> = (0..k).map(|i| (0..k).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    if k > 1 {
        directions.push((0..k).map(|j| 0.7 - 0.4 * j as f64).collect());
    }
    let mut worst: f64 = 0.0;
    for dir in &directions {
        for t in [0.3, 1.0] {
            let coeffs: Vec<f64> = dir.iter().map(|d| d * t).collect();
            let nx = s.x_group_matrix(&coeffs)?;
            let ng = s.n_element(&coeffs)?;
            for x in &xs {
                let moved = s.embed(&(&nx * x.coords()))?;
                let image = s.embed(x.coords())?;
                for ((m, y), part) in moved.iter().zip(&image).zip(&spec.extension) {
                    let translated = part.rep.group_matrix(&ng)? * y;
                    worst = worst.max(projective_distance(m, &translated));
                }
            }
        }
    }
    Ok(worst)
}

/// Tags of the built-in scenarios.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinScenario {
    /// `X = Z = P1` with `G = SL(2)`.
    NaiveP1Z1,
    /// `X = P1` inside `Z = P1 x P1` as `x -> ([1:0], x)`, diagonal `SL(2)`.
    NaiveP1Z3,
    /// `C^2 \ {0}` with potential `c log(1 + |v|^2)`, times `P1`.
    Sl2LogC(f64),
    /// `SL(2) x SL(2)` on `C^2 + C^2` (flat, half the standard form) times `P3`,
    /// with `X = P2` embedded as `[z0:z2:z1:z2]`.
    Sl2xSl2P2,
    /// `SL(3)` with a highest-weight cone for the orbit closure and `X = P2`.
    Sl3GrosshansCone,
}

/// Default `c` for the radial built-in.
pub const DEFAULT_LOG_C: f64 = 2.0;

impl BuiltinScenario {
    pub fn all() -> Vec<BuiltinScenario> {
        vec![
            BuiltinScenario::NaiveP1Z1,
            BuiltinScenario::NaiveP1Z3,
            BuiltinScenario::Sl2LogC(DEFAULT_LOG_C),
            BuiltinScenario::Sl2xSl2P2,
            BuiltinScenario::Sl3GrosshansCone,
        ]
    }

    pub fn materialize(self) -> Result<UnipotentScenario> {
        match self {
            BuiltinScenario::NaiveP1Z1 => naive(false),
            BuiltinScenario::NaiveP1Z3 => naive(true),
            BuiltinScenario::Sl2LogC(cc) => sl2_log(cc),
            BuiltinScenario::Sl2xSl2P2 => sl2xsl2_p2(),
            BuiltinScenario::Sl3GrosshansCone => sl3_cone(),
        }
    }

    /// Replaces a named model parameter; only `c` of the radial scenario exists.
    pub fn with_param(self, name: &str, value: f64) -> Result<Self> {
        match (self, name) {
            (BuiltinScenario::Sl2LogC(_), "c") => Ok(BuiltinScenario::Sl2LogC(value)),
            _ => Err(Error::domain(format!("scenario '{self}' has no parameter '{name}'"))),
        }
    }
}

impl fmt::Display for BuiltinScenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuiltinScenario::NaiveP1Z1 => f.write_str("naive_p1_z1"),
            BuiltinScenario::NaiveP1Z3 => f.write_str("naive_p1_z3"),
            BuiltinScenario::Sl2LogC(cc) => write!(f, "sl2_log_c({cc})"),
            BuiltinScenario::Sl2xSl2P2 => f.write_str("sl2xsl2_p2"),
            BuiltinScenario::Sl3GrosshansCone => f.write_str("sl3_grosshans_cone"),
        }
    }
}

impl FromStr for BuiltinScenario {
    type Err = Error;

    /// Accepts `sl2_log_c`, `sl2_log_c:0.5` and `sl2_log_c(0.5)` for the radial tag.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("sl2_log_c") {
            let arg = rest.strip_prefix(':').or_else(|| rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')));
            let cc = match (rest, arg) {
                ("", _) => DEFAULT_LOG_C,
                (_, Some(a)) => a.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad parameter in '{s}'")))?,
                _ => return Err(Error::Parse(format!("unknown builtin '{s}'"))),
            };
            return Ok(BuiltinScenario::Sl2LogC(cc));
        }
        match s {
            "naive_p1_z1" => Ok(BuiltinScenario::NaiveP1Z1),
            "naive_p1_z3" => Ok(BuiltinScenario::NaiveP1Z3),
            "sl2xsl2_p2" => Ok(BuiltinScenario::Sl2xSl2P2),
            "sl3_grosshans_cone" => Ok(BuiltinScenario::Sl3GrosshansCone),
            _ => Err(Error::Parse(format!("unknown builtin '{s}'"))),
        }
    }
}

/// `E_ij` in block `f` of `g`, zero elsewhere.
pub fn elementary(group: &GroupDescriptor, f: usize, i: usize, j: usize) -> Result<AlgebraElement> {
    let blocks = group
        .block_sizes()
        .into_iter()
        .enumerate()
        .map(|(k, n)| {
            let mut m = CMatrix::zeros(n, n);
            if k == f {
                m[(i, j)] = c(1.0);
            }
            m
        })
        .collect();
    AlgebraElement::new(group, blocks, AlgebraKind::Full)
}

fn e_matrix(n: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    m[(i, j)] = c(1.0);
    m
}

fn cvec(v: &[f64]) -> CVector {
    CVector::from_iterator(v.len(), v.iter().map(|&x| c(x)))
}

fn std_rep(group: &GroupDescriptor, factor: usize) -> Result<Arc<Representation>> {
    Ok(Arc::new(build_representation(group, RepTree::standard(factor))?))
}

fn naive(with_fixed_factor: bool) -> Result<UnipotentScenario> {
    let g = GroupDescriptor::sl2();
    let std = std_rep(&g, 0)?;
    let fs = ExtensionPart { rep: std.clone(), weight: 1.0 };
    let (id, extension, embedding) = if with_fixed_factor {
        (
            "naive_p1_z3",
            vec![fs.clone(), fs],
            vec![EmbeddingSlot::Constant(cvec(&[1.0, 0.0])), EmbeddingSlot::Linear(CMatrix::identity(2, 2))],
        )
    } else {
        ("naive_p1_z1", vec![fs], vec![EmbeddingSlot::Linear(CMatrix::identity(2, 2))])
    };
    UnipotentScenario::new(ScenarioSpec {
        id: id.into(),
        group: g.clone(),
        n_basis: vec![elementary(&g, 0, 0, 1)?],
        x_action: vec![e_matrix(2, 0, 1)],
        x_dim: 2,
        orbit: None,
        extension,
        embedding,
        domain: XDomain::Full,
        cone_metadata: None,
        flow_enabled: true,
    })
}

fn sl2_log(cc: f64) -> Result<UnipotentScenario> {
    let family = RadialFamily::Log { c: cc };
    family.validate()?;
    let g = GroupDescriptor::sl2();
    let std = std_rep(&g, 0)?;
    UnipotentScenario::new(ScenarioSpec {
        id: format!("sl2_log_c({cc})"),
        group: g.clone(),
        n_basis: vec![elementary(&g, 0, 0, 1)?],
        x_action: vec![e_matrix(2, 0, 1)],
        x_dim: 2,
        orbit: Some(OrbitFactor { rep: std.clone(), v_base: cvec(&[1.0, 0.0]), model: OrbitModel::Radial { family } }),
        extension: vec![ExtensionPart { rep: std, weight: 1.0 }],
        embedding: vec![EmbeddingSlot::Linear(CMatrix::identity(2, 2))],
        domain: XDomain::Full,
        cone_metadata: None,
        flow_enabled: true,
    })
}

fn sl2xsl2_p2() -> Result<UnipotentScenario> {
    let g = GroupDescriptor::sl2_sl2();
    let sum = RepTree::direct_sum(vec![RepTree::standard(0), RepTree::standard(1)]);
    let orbit_rep = Arc::new(build_representation(&g, sum.clone().scale_form(0.5))?);
    let ext_rep = Arc::new(build_representation(&g, sum)?);
    // [z0:z1:z2] -> [z0:z2:z1:z2]
    let mut iota = CMatrix::zeros(4, 3);
    for (row, col) in [(0, 0), (1, 2), (2, 1), (3, 2)] {
        iota[(row, col)] = c(1.0);
    }
    UnipotentScenario::new(ScenarioSpec {
        id: "sl2xsl2_p2".into(),
        group: g.clone(),
        n_basis: vec![elementary(&g, 0, 0, 1)?, elementary(&g, 1, 0, 1)?],
        x_action: vec![e_matrix(3, 0, 2), e_matrix(3, 1, 2)],
        x_dim: 3,
        orbit: Some(OrbitFactor { rep: orbit_rep, v_base: cvec(&[1.0, 0.0, 1.0, 0.0]), model: OrbitModel::Flat }),
        extension: vec![ExtensionPart { rep: ext_rep, weight: 1.0 }],
        embedding: vec![EmbeddingSlot::Linear(iota)],
        domain: XDomain::Full,
        cone_metadata: None,
        flow_enabled: true,
    })
}

fn sl3_cone() -> Result<UnipotentScenario> {
    let g = GroupDescriptor::sl3();
    let std = std_rep(&g, 0)?;
    let pairs = [(0, 1), (0, 2), (1, 2)];
    UnipotentScenario::new(ScenarioSpec {
        id: "sl3_grosshans_cone".into(),
        group: g.clone(),
        n_basis: pairs.iter().map(|&(i, j)| elementary(&g, 0, i, j)).collect::<Result<_>>()?,
        x_action: pairs.iter().map(|&(i, j)| e_matrix(3, i, j)).collect(),
        x_dim: 3,
        orbit: None,
        extension: vec![ExtensionPart { rep: std, weight: 1.0 }],
        embedding: vec![EmbeddingSlot::Linear(CMatrix::identity(3, 3))],
        domain: XDomain::Full,
        cone_metadata: Some(vec![Weight::new(vec![1, 1]), Weight::new(vec![2, 1])]),
        flow_enabled: false,
    })
}
