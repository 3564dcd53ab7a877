//! Moment maps for flat, radial and Fubini-Study Kähler models.
//!
//! Normalisation: for a linear model with potential `phi(<v,v>_H)` the moment
//! map pairs with `i T_a` as `phi'(s) <R_a v, v>_H`, so the flat model gives
//! `-i <xi.v, v>_H` and on `C^2` reproduces `phi'(|z|^2) (z z*)_0`. The
//! Fubini-Study model is the radial model with potential `log s`, which puts
//! `mu([0:1])` at `diag(-1/2, 1/2)` for `P1`. With `omega = i ddbar rho` and the
//! fundamental field `xi_Z(v) = d/dt exp(-t xi) v` these maps satisfy
//! `d mu^xi = omega(xi_Z, .)` exactly; the analytic derivative
//! `d rho(J xi_Z)` is twice the pairing (see [`POTENTIAL_NORMALIZATION`]).

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{
    c, exp_group, AlgebraElement, AlgebraKind, CVector, CoadjointVector, GroupDescriptor, GroupElement, C64, I,
};
use crate::rep::Representation;

/// `trace_pairing(xi, mu) = POTENTIAL_NORMALIZATION * d rho(J xi_Z)`.
pub const POTENTIAL_NORMALIZATION: f64 = 0.5;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// User-supplied radial profile with its first two derivatives.
#[derive(Clone)]
pub struct CustomRadial {
    pub name: String,
    pub phi: ScalarFn,
    pub dphi: ScalarFn,
    pub d2phi: ScalarFn,
}

impl fmt::Debug for CustomRadial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomRadial").field("name", &self.name).finish_non_exhaustive()
    }
}

/// Profile `phi` of a radial potential `rho(v) = phi(<v,v>_H)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum RadialFamily {
    /// `phi(s) = s`
    Power,
    /// `phi(s) = c log(1 + s)`
    Log {
        c: f64,
    },
    /// `phi(s) = value`
    Constant {
        value: f64,
    },
    #[serde(skip)]
    Custom(CustomRadial),
    Sum {
        terms: Vec<RadialFamily>,
    },
}

impl RadialFamily {
    pub fn custom(
        name: impl Into<String>,
        phi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dphi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2phi: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        RadialFamily::Custom(CustomRadial {
            name: name.into(),
            phi: Arc::new(phi),
            dphi: Arc::new(dphi),
            d2phi: Arc::new(d2phi),
        })
    }

    pub fn value(&self, s: f64) -> f64 {
        match self {
            RadialFamily::Power => s,
            RadialFamily::Log { c } => c * s.ln_1p(),
            RadialFamily::Constant { value } => *value,
            RadialFamily::Custom(f) => (f.phi)(s),
            RadialFamily::Sum { terms } => terms.iter().map(|t| t.value(s)).sum(),
        }
    }

    pub fn d1(&self, s: f64) -> f64 {
        match self {
            RadialFamily::Power => 1.0,
            RadialFamily::Log { c } => c / (1.0 + s),
            RadialFamily::Constant { .. } => 0.0,
            RadialFamily::Custom(f) => (f.dphi)(s),
            RadialFamily::Sum { terms } => terms.iter().map(|t| t.d1(s)).sum(),
        }
    }

    pub fn d2(&self, s: f64) -> f64 {
        match self {
            RadialFamily::Power | RadialFamily::Constant { .. } => 0.0,
            RadialFamily::Log { c } => -c / ((1.0 + s) * (1.0 + s)),
            RadialFamily::Custom(f) => (f.d2phi)(s),
            RadialFamily::Sum { terms } => terms.iter().map(|t| t.d2(s)).sum(),
        }
    }

    /// `phi(s + ds) - phi(s)`, computed without cancellation where possible.
    pub fn increment(&self, s: f64, ds: f64) -> f64 {
        match self {
            RadialFamily::Power => ds,
            RadialFamily::Log { c } => c * (ds / (1.0 + s)).ln_1p(),
            RadialFamily::Constant { .. } => 0.0,
            RadialFamily::Custom(f) => (f.phi)(s + ds) - (f.phi)(s),
            RadialFamily::Sum { terms } => terms.iter().map(|t| t.increment(s, ds)).sum(),
        }
    }

    /// Whether `phi'` blows up at the origin.
    pub fn singular_at_zero(&self) -> bool {
        !self.d1(0.0).is_finite()
    }

    /// Checks the profile parameters. `Log` needs `c > 0`; custom profiles need
    /// `phi' > 0` at 100 log-spaced points of `(0, inf)`.
    pub fn validate(&self) -> Result<()> {
        match self {
            RadialFamily::Log { c } if !(*c > 0.0 && c.is_finite()) => {
                Err(Error::domain(format!("log profile needs c > 0, got {c}")))
            }
            RadialFamily::Custom(f) => {
                for k in 0..100 {
                    let s = 10f64.powf(-6.0 + 12.0 * k as f64 / 99.0);
                    let d = (f.dphi)(s);
                    if !(d > 0.0) {
                        return Err(Error::domain(format!("custom profile '{}' has phi'({s:.3e}) = {d} <= 0", f.name)));
                    }
                }
                Ok(())
            }
            RadialFamily::Sum { terms } => terms.iter().try_for_each(|t| match t {
                // a sum may include non-convex shifts; only check parameters
                RadialFamily::Custom(_) => Ok(()),
                other => other.validate(),
            }),
            _ => Ok(()),
        }
    }

    /// The `c` parameter of a `Log` profile.
    pub fn log_c(&self) -> Option<f64> {
        match self {
            RadialFamily::Log { c } => Some(*c),
            _ => None,
        }
    }
}

/// Kähler model on a product of linear and projective factors.
#[derive(Clone, Debug)]
pub enum KahlerModel {
    /// Potential `<v,v>_H`.
    Flat { rep: Arc<Representation> },
    /// Potential `phi(<v,v>_H)`.
    Radial { rep: Arc<Representation>, family: RadialFamily },
    /// `weight` times the Fubini-Study form of `P(V)`.
    FubiniStudy { rep: Arc<Representation>, weight: f64 },
    /// Sum of forms on a product; each summand owns its own point slots.
    ProductSum(Vec<KahlerModel>),
}

impl KahlerModel {
    pub fn flat(rep: Arc<Representation>) -> Self {
        KahlerModel::Flat { rep }
    }

    pub fn radial(rep: Arc<Representation>, family: RadialFamily) -> Self {
        KahlerModel::Radial { rep, family }
    }

    pub fn fubini_study(rep: Arc<Representation>) -> Self {
        KahlerModel::FubiniStudy { rep, weight: 1.0 }
    }

    fn collect_leaves(&self, out: &mut Vec<Leaf>) -> Result<()> {
        match self {
            KahlerModel::Flat { rep } => out.push(Leaf::Linear { rep: rep.clone(), family: RadialFamily::Power }),
            KahlerModel::Radial { rep, family } => {
                family.validate()?;
                out.push(Leaf::Linear { rep: rep.clone(), family: family.clone() })
            }
            KahlerModel::FubiniStudy { rep, weight } => {
                if !(*weight > 0.0 && weight.is_finite()) {
                    return Err(Error::domain(format!("Fubini-Study weight must be positive, got {weight}")));
                }
                out.push(Leaf::Projective { rep: rep.clone(), weight: *weight })
            }
            KahlerModel::ProductSum(parts) => {
                for p in parts {
                    p.collect_leaves(out)?;
                }
            }
        }
        Ok(())
    }
}

/// One factor of a product model.
#[derive(Clone, Debug)]
pub enum Leaf {
    Linear { rep: Arc<Representation>, family: RadialFamily },
    Projective { rep: Arc<Representation>, weight: f64 },
}

impl Leaf {
    pub fn rep(&self) -> &Arc<Representation> {
        match self {
            Leaf::Linear { rep, .. } | Leaf::Projective { rep, .. } => rep,
        }
    }

    pub fn is_projective(&self) -> bool {
        matches!(self, Leaf::Projective { .. })
    }

    /// `q_a = <R_a v, v>_H` for every basis element.
    fn raw_coords(&self, v: &CVector) -> Vec<f64> {
        self.rep().form_generators().iter().map(|hr| (v.adjoint() * hr * v)[(0, 0)].re).collect()
    }

    fn coords(&self, v: &CVector) -> Result<Vec<f64>> {
        let s = self.rep().norm_squared(v);
        match self {
            Leaf::Linear { family, .. } => {
                let d = family.d1(s);
                if !d.is_finite() {
                    return Err(Error::domain("radial profile is singular at this point"));
                }
                Ok(self.raw_coords(v).into_iter().map(|q| d * q).collect())
            }
            Leaf::Projective { weight, .. } => {
                if !(s > 0.0) {
                    return Err(Error::domain("Fubini-Study moment map at the zero vector"));
                }
                Ok(self.raw_coords(v).into_iter().map(|q| weight * q / s).collect())
            }
        }
    }

    /// Directional derivative of the coordinates along `w`.
    fn coords_derivative(&self, v: &CVector, w: &CVector) -> Result<Vec<f64>> {
        let rep = self.rep();
        let s = rep.norm_squared(v);
        let ds = 2.0 * (v.adjoint() * rep.form() * w)[(0, 0)].re;
        let pairs: Vec<(f64, f64)> = rep
            .form_generators()
            .iter()
            .map(|hr| {
                let vh = v.adjoint() * hr;
                ((&vh * v)[(0, 0)].re, 2.0 * (&vh * w)[(0, 0)].re)
            })
            .collect();
        match self {
            Leaf::Linear { family, .. } => {
                let (d1, d2) = (family.d1(s), family.d2(s));
                if !d1.is_finite() || !d2.is_finite() {
                    return Err(Error::domain("radial profile is singular at this point"));
                }
                Ok(pairs.into_iter().map(|(q, dq)| d2 * ds * q + d1 * dq).collect())
            }
            Leaf::Projective { weight, .. } => {
                if !(s > 0.0) {
                    return Err(Error::domain("Fubini-Study moment map at the zero vector"));
                }
                Ok(pairs.into_iter().map(|(q, dq)| weight * (dq / s - q * ds / (s * s))).collect())
            }
        }
    }

    /// `rho(v + delta) - rho(v)`.
    fn potential_increment(&self, v: &CVector, delta: &CVector) -> f64 {
        let rep = self.rep();
        let s = rep.norm_squared(v);
        let ds = 2.0 * (v.adjoint() * rep.form() * delta)[(0, 0)].re + rep.norm_squared(delta);
        match self {
            Leaf::Linear { family, .. } => family.increment(s, ds),
            Leaf::Projective { weight, .. } => weight * (ds / s).ln_1p(),
        }
    }
}

/// A point of a product model: one homogeneous or linear coordinate vector per
/// factor.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelPoint {
    pub slots: Vec<CVector>,
}

impl ModelPoint {
    pub fn new(slots: Vec<CVector>) -> Self {
        Self { slots }
    }

    pub fn single(v: CVector) -> Self {
        Self { slots: vec![v] }
    }

    pub fn axpy(&self, t: f64, dir: &ModelPoint) -> ModelPoint {
        ModelPoint { slots: self.slots.iter().zip(&dir.slots).map(|(a, b)| a + b * c(t)).collect() }
    }

    pub fn scaled(&self, t: f64) -> ModelPoint {
        ModelPoint { slots: self.slots.iter().map(|a| a * c(t)).collect() }
    }

    pub fn times_i(&self) -> ModelPoint {
        ModelPoint { slots: self.slots.iter().map(|a| a * I).collect() }
    }

    pub fn norm(&self) -> f64 {
        self.slots.iter().map(|s| s.norm_squared()).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.slots.iter().all(|s| s.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }

    /// Real dimension of the ambient coordinate space.
    pub fn real_dim(&self) -> usize {
        2 * self.slots.iter().map(|s| s.len()).sum::<usize>()
    }

    /// The `k`-th real unit direction of the ambient coordinate space.
    pub fn real_direction(&self, k: usize) -> ModelPoint {
        let mut slots: Vec<CVector> = self.slots.iter().map(|s| CVector::zeros(s.len())).collect();
        let mut idx = k / 2;
        for s in slots.iter_mut() {
            if idx < s.len() {
                s[idx] = if k.is_multiple_of(2) { c(1.0) } else { I };
                break;
            }
            idx -= s.len();
        }
        ModelPoint { slots }
    }
}

/// Evaluates the moment map of a Kähler model for a fixed group.
#[derive(Clone, Debug)]
pub struct MomentEvaluator {
    group: GroupDescriptor,
    leaves: Vec<Leaf>,
}

impl MomentEvaluator {
    pub fn new(group: &GroupDescriptor, model: &KahlerModel) -> Result<Self> {
        let mut leaves = Vec::new();
        model.collect_leaves(&mut leaves)?;
        if leaves.is_empty() {
            return Err(Error::structural("Kähler model has no factors"));
        }
        for l in &leaves {
            if l.rep().group() != group {
                return Err(Error::structural("model factor is a representation of a different group"));
            }
        }
        Ok(Self { group: group.clone(), leaves })
    }

    pub fn from_leaves(group: &GroupDescriptor, leaves: Vec<Leaf>) -> Result<Self> {
        let model = KahlerModel::ProductSum(
            leaves
                .into_iter()
                .map(|l| match l {
                    Leaf::Linear { rep, family } => KahlerModel::Radial { rep, family },
                    Leaf::Projective { rep, weight } => KahlerModel::FubiniStudy { rep, weight },
                })
                .collect(),
        );
        Self::new(group, &model)
    }

    pub fn group(&self) -> &GroupDescriptor {
        &self.group
    }

    pub fn leaves(&self) -> &[Leaf] {
        &self.leaves
    }

    /// True when every factor is projective, i.e. the model space is compact.
    pub fn is_compact(&self) -> bool {
        self.leaves.iter().all(Leaf::is_projective)
    }

    pub fn check_point(&self, p: &ModelPoint) -> Result<()> {
        if p.slots.len() != self.leaves.len() {
            return Err(Error::structural(format!(
                "point has {} slots, model has {} factors",
                p.slots.len(),
                self.leaves.len()
            )));
        }
        for (v, l) in p.slots.iter().zip(&self.leaves) {
            if v.len() != l.rep().dim() {
                return Err(Error::structural(format!(
                    "slot of length {} for a factor of dimension {}",
                    v.len(),
                    l.rep().dim()
                )));
            }
        }
        if !p.is_finite() {
            return Err(Error::numeric("point has non-finite coordinates"));
        }
        Ok(())
    }

    /// Moment-map coordinates `m_a`.
    pub fn coords(&self, p: &ModelPoint) -> Result<Vec<f64>> {
        self.check_point(p)?;
        let mut out = vec![0.0; self.group.algebra_dim()];
        for (v, l) in p.slots.iter().zip(&self.leaves) {
            for (o, x) in out.iter_mut().zip(l.coords(v)?) {
                *o += x;
            }
        }
        Ok(out)
    }

    pub fn evaluate(&self, p: &ModelPoint) -> Result<CoadjointVector> {
        CoadjointVector::from_coords(&self.group, &self.coords(p)?)
    }

    /// `|mu(p)|^2` in the half-trace normalisation.
    pub fn norm_squared(&self, p: &ModelPoint) -> Result<f64> {
        Ok(0.5 * self.coords(p)?.iter().map(|x| x * x).sum::<f64>())
    }

    /// Analytic derivative of the coordinates along the tangent vector `w`.
    pub fn coords_derivative(&self, p: &ModelPoint, w: &ModelPoint) -> Result<Vec<f64>> {
        self.check_point(p)?;
        self.check_point(w)?;
        let mut out = vec![0.0; self.group.algebra_dim()];
        for ((v, dv), l) in p.slots.iter().zip(&w.slots).zip(&self.leaves) {
            for (o, x) in out.iter_mut().zip(l.coords_derivative(v, dv)?) {
                *o += x;
            }
        }
        Ok(out)
    }

    /// Sum of the factor potentials' increments `rho(p + delta) - rho(p)`.
    pub fn potential_increment(&self, p: &ModelPoint, delta: &ModelPoint) -> f64 {
        p.slots.iter().zip(&delta.slots).zip(&self.leaves).map(|((v, d), l)| l.potential_increment(v, d)).sum()
    }

    /// `g . p`, slot by slot.
    pub fn act_group(&self, g: &GroupElement, p: &ModelPoint) -> Result<ModelPoint> {
        self.check_point(p)?;
        let slots = p
            .slots
            .iter()
            .zip(&self.leaves)
            .map(|(v, l)| Ok(l.rep().group_matrix(g)? * v))
            .collect::<Result<Vec<_>>>()?;
        Ok(ModelPoint { slots })
    }

    /// Infinitesimal action `X . p` (tangent vector) for `X` in `k` or `g`.
    pub fn act_algebra(&self, x: &AlgebraElement, p: &ModelPoint) -> Result<ModelPoint> {
        self.check_point(p)?;
        let slots = p
            .slots
            .iter()
            .zip(&self.leaves)
            .map(|(v, l)| Ok(l.rep().algebra_matrix(x)? * v))
            .collect::<Result<Vec<_>>>()?;
        Ok(ModelPoint { slots })
    }

    /// Projective slots rescaled to unit norm for their form.
    pub fn normalize(&self, p: &ModelPoint) -> ModelPoint {
        ModelPoint {
            slots: p
                .slots
                .iter()
                .zip(&self.leaves)
                .map(|(v, l)| {
                    if l.is_projective() {
                        let n = l.rep().norm_squared(v).sqrt();
                        if n > 0.0 {
                            return v / c(n);
                        }
                    }
                    v.clone()
                })
                .collect(),
        }
    }

    /// Fundamental vector field `xi_Z(p) = -xi . p`, with projective slots
    /// projected to the `H`-orthogonal complement of the point's line.
    pub fn fundamental_field(&self, xi: &AlgebraElement, p: &ModelPoint) -> Result<ModelPoint> {
        let raw = self.act_algebra(xi, p)?;
        let slots = raw
            .slots
            .into_iter()
            .zip(&p.slots)
            .zip(&self.leaves)
            .map(|((w, v), l)| {
                let w = -w;
                if l.is_projective() {
                    let rep = l.rep();
                    let s = rep.norm_squared(v);
                    let coef = rep.inner(&w, v) / c(s);
                    w - v * coef
                } else {
                    w
                }
            })
            .collect();
        Ok(ModelPoint { slots })
    }
}

/// Flat moment map `-i <xi.v, v>_H`.
pub fn moment_flat(rep: &Arc<Representation>, v: &CVector) -> Result<CoadjointVector> {
    MomentEvaluator::new(rep.group(), &KahlerModel::flat(rep.clone()))?.evaluate(&ModelPoint::single(v.clone()))
}

/// `phi'(<v,v>_H)` times the flat moment map.
pub fn moment_radial(rep: &Arc<Representation>, family: &RadialFamily, v: &CVector) -> Result<CoadjointVector> {
    if v.iter().all(|z| z.norm() == 0.0) && family.singular_at_zero() {
        return Err(Error::domain("radial moment map is singular at the origin"));
    }
    MomentEvaluator::new(rep.group(), &KahlerModel::radial(rep.clone(), family.clone()))?
        .evaluate(&ModelPoint::single(v.clone()))
}

/// Fubini-Study moment map of `P(V)`, invariant under rescaling of `p`.
pub fn moment_fubini_study(rep: &Arc<Representation>, p: &CVector) -> Result<CoadjointVector> {
    if p.iter().all(|z| z.norm() == 0.0) {
        return Err(Error::domain("Fubini-Study moment map at the zero vector"));
    }
    MomentEvaluator::new(rep.group(), &KahlerModel::fubini_study(rep.clone()))?.evaluate(&ModelPoint::single(p.clone()))
}

/// Blockwise sum of several evaluations.
pub fn moment_sum(parts: &[(&MomentEvaluator, &ModelPoint)]) -> Result<CoadjointVector> {
    let (first, rest) = parts.split_first().ok_or_else(|| Error::structural("moment sum of no parts"))?;
    let group = first.0.group();
    let mut acc = first.0.evaluate(first.1)?;
    for (ev, p) in rest {
        if ev.group() != group {
            return Err(Error::structural("moment sum over different groups"));
        }
        acc = acc.add(&ev.evaluate(p)?)?;
    }
    Ok(acc)
}

/// `d rho_v(J xi_Z(v))` for the radial potential `rho = phi(<v,v>_H)`.
pub fn moment_from_potential(
    rep: &Representation,
    family: &RadialFamily,
    xi: &AlgebraElement,
    v: &CVector,
) -> Result<f64> {
    if xi.kind() != AlgebraKind::Compact {
        return Err(Error::structural("potential moment map needs an element of the compact algebra"));
    }
    let s = rep.norm_squared(v);
    let d = family.d1(s);
    if !d.is_finite() {
        return Err(Error::domain("potential is not differentiable at this point"));
    }
    let xi_z = -(rep.algebra_matrix(xi)? * v);
    let j_xi_z = xi_z * I;
    Ok(d * 2.0 * (v.adjoint() * rep.form() * j_xi_z)[(0, 0)].re)
}

/// Adds the radial potential `phi` to the linear factor in `slot`.
/// A radial function of a projective factor's normalised representative is
/// constant, so shifting a projective slot leaves it unchanged.
pub fn shift_moment(base: &MomentEvaluator, slot: usize, phi: RadialFamily) -> Result<MomentEvaluator> {
    let mut leaves = base.leaves.clone();
    let leaf = leaves.get_mut(slot).ok_or_else(|| Error::structural(format!("model has no slot {slot}")))?;
    if let Leaf::Linear { family, .. } = leaf {
        *family = RadialFamily::Sum { terms: vec![family.clone(), phi] };
    }
    Ok(MomentEvaluator { group: base.group.clone(), leaves })
}

/// `omega(u, w)` from second differences of the potential increments,
/// `omega(u, w) = (D^2 rho(Ju, w) - D^2 rho(u, Jw)) / 2`.
pub fn kahler_form_fd(ev: &MomentEvaluator, p: &ModelPoint, u: &ModelPoint, w: &ModelPoint, h: f64) -> f64 {
    let hess = |a: &ModelPoint, b: &ModelPoint| {
        let d = |sa: f64, sb: f64| {
            let delta = a.scaled(sa * h).axpy(sb * h, b);
            ev.potential_increment(p, &delta)
        };
        (d(1.0, 1.0) - d(1.0, -1.0) - d(-1.0, 1.0) + d(-1.0, -1.0)) / (4.0 * h * h)
    };
    0.5 * (hess(&u.times_i(), w) - hess(u, &w.times_i()))
}

/// `|d mu^xi(w) - omega(xi_Z(p), w)|` with every ingredient taken by central
/// differences of step `h`: the moment map along `w`, the flow
/// `t -> exp(-t xi) p` for `xi_Z`, and the potential for `omega`.
pub fn verify_moment_condition(
    ev: &MomentEvaluator,
    p: &ModelPoint,
    xi: &AlgebraElement,
    w: &ModelPoint,
    h: f64,
) -> Result<f64> {
    if !(h > 1e-12 && h.is_finite() && h < 1.0) {
        return Err(Error::domain(format!("finite-difference step {h} is degenerate")));
    }
    if xi.kind() != AlgebraKind::Compact {
        return Err(Error::structural("moment condition is checked on the compact algebra"));
    }
    ev.check_point(p)?;
    ev.check_point(w)?;
    let x = xi.compact_coords(&ev.group)?;
    let pair = |q: &ModelPoint| -> Result<f64> { Ok(ev.coords(q)?.iter().zip(&x).map(|(a, b)| a * b).sum()) };
    let dmu = (pair(&p.axpy(h, w))? - pair(&p.axpy(-h, w))?) / (2.0 * h);

    let fwd = ev.act_group(&exp_group(&xi.scaled(-h))?, p)?;
    let bwd = ev.act_group(&exp_group(&xi.scaled(h))?, p)?;
    let xi_z = fwd.axpy(-1.0, &bwd).scaled(1.0 / (2.0 * h));

    let omega = kahler_form_fd(ev, p, &xi_z, w, h);
    Ok((dmu - omega).abs())
}

/// Finite-difference Jacobian of the moment coordinates over the real
/// coordinates of the point (rows: algebra basis, columns: real directions).
pub fn moment_jacobian(ev: &MomentEvaluator, p: &ModelPoint, h: f64) -> Result<DMatrix<f64>> {
    let n = p.real_dim();
    let m = ev.group.algebra_dim();
    let mut jac = DMatrix::zeros(m, n);
    for k in 0..n {
        let dir = p.real_direction(k);
        let plus = ev.coords(&p.axpy(h, &dir))?;
        let minus = ev.coords(&p.axpy(-h, &dir))?;
        for a in 0..m {
            jac[(a, k)] = (plus[a] - minus[a]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// Real matrix of `xi -> xi_Z(p)` over the compact basis.
pub fn infinitesimal_action_matrix(ev: &MomentEvaluator, p: &ModelPoint) -> Result<DMatrix<f64>> {
    let dim = ev.group.algebra_dim();
    let n = p.real_dim();
    let mut out = DMatrix::zeros(n, dim);
    for a in 0..dim {
        let mut x = vec![0.0; dim];
        x[a] = 1.0;
        let xi = AlgebraElement::from_compact_coords(&ev.group, &x)?;
        let field = ev.fundamental_field(&xi, p)?;
        let mut row = 0;
        for s in &field.slots {
            for z in s.iter() {
                out[(row, a)] = z.re;
                out[(row + 1, a)] = z.im;
                row += 2;
            }
        }
    }
    Ok(out)
}

/// Numerical rank: singular values above `rel_tol` times the largest.
pub fn numerical_rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * top).count()
}

/// `dim K.p = dim k - dim k_p`, with `k_p` the kernel of the infinitesimal action.
pub fn orbit_dimension(ev: &MomentEvaluator, p: &ModelPoint) -> Result<usize> {
    Ok(numerical_rank(&infinitesimal_action_matrix(ev, p)?, 1e-8))
}

/// Uniformly random unit vector of `C^n`.
pub fn random_unit_vector<R: rand::Rng>(rng: &mut R, n: usize) -> CVector {
    let v = CVector::from_fn(n, |_, _| C64::new(gauss(rng), gauss(rng)));
    let norm = v.norm();
    v / c(norm)
}

fn gauss<R: rand::Rng>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Random element of the compact algebra with coordinates scaled so that
/// the Frobenius norm is `scale` in expectation direction.
pub fn random_compact<R: rand::Rng>(rng: &mut R, group: &GroupDescriptor, scale: f64) -> AlgebraElement {
    let x: Vec<f64> = (0..group.algebra_dim()).map(|_| gauss(rng)).collect();
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let x: Vec<f64> = x.into_iter().map(|v| v * scale / n).collect();
    AlgebraElement::from_compact_coords(group, &x).expect("dimension matches")
}

/// Random element of `g` of Frobenius norm `scale`.
pub fn random_full<R: rand::Rng>(rng: &mut R, group: &GroupDescriptor, scale: f64) -> AlgebraElement {
    let z: Vec<C64> = (0..group.algebra_dim()).map(|_| C64::new(gauss(rng), gauss(rng))).collect();
    let n = z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let z: Vec<C64> = z.into_iter().map(|v| v * (scale / n)).collect();
    AlgebraElement::from_complex_coords(group, &z).expect("dimension matches")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{coadjoint_action, trace_pairing, CMatrix};
    use crate::rep::{build_representation, RepTree};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn std_a1() -> Arc<Representation> {
        Arc::new(build_representation(&GroupDescriptor::sl2(), RepTree::standard(0)).unwrap())
    }

    fn c4_half() -> Arc<Representation> {
        let tree = RepTree::direct_sum(vec![RepTree::standard(0), RepTree::standard(1)]).scale_form(0.5);
        Arc::new(build_representation(&GroupDescriptor::sl2_sl2(), tree).unwrap())
    }

    fn c4() -> Arc<Representation> {
        let tree = RepTree::direct_sum(vec![RepTree::standard(0), RepTree::standard(1)]);
        Arc::new(build_representation(&GroupDescriptor::sl2_sl2(), tree).unwrap())
    }

    fn czero() -> C64 {
        C64::new(0.0, 0.0)
    }

    fn vecc(v: &[f64]) -> CVector {
        CVector::from_iterator(v.len(), v.iter().map(|&x| c(x)))
    }

    fn diag2(a: f64) -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(a), czero(), czero(), c(-a)])
    }

    fn close_blocks(beta: &CoadjointVector, want: &[CMatrix], tol: f64) -> bool {
        beta.blocks().iter().zip(want).all(|(a, b)| (a - b).norm() <= tol)
    }

    #[test]
    fn flat_examples() {
        let r = c4_half();
        assert_eq!(moment_flat(&r, &CVector::zeros(4)).unwrap().max_abs_entry(), 0.0);
        let mu = moment_flat(&r, &vecc(&[1.0, 0.0, 1.0, 0.0])).unwrap();
        assert!(close_blocks(&mu, &[diag2(0.25), diag2(0.25)], 1e-15));
    }

    #[test]
    fn flat_is_quadratic() {
        let r = std_a1();
        let v = CVector::from_row_slice(&[C64::new(0.3, -1.0), C64::new(2.0, 0.5)]);
        let a = moment_flat(&r, &v).unwrap();
        let b = moment_flat(&r, &(&v * c(-2.5))).unwrap();
        assert!(close_blocks(&b, a.scaled(6.25).blocks(), 1e-13));
    }

    #[test]
    fn flat_pairing_formula() {
        // pairing(xi, mu_flat(v)) = -i <xi.v, v>_H computed directly
        let r = c4_half();
        let g = r.group().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let v = random_unit_vector(&mut rng, 4) * c(1.7);
            let xi = random_compact(&mut rng, &g, 1.3);
            let direct = (-I * r.inner(&(r.algebra_matrix(&xi).unwrap() * &v), &v)).re;
            let paired = trace_pairing(&xi, &moment_flat(&r, &v).unwrap()).unwrap();
            assert!((direct - paired).abs() < 1e-13);
        }
    }

    #[test]
    fn radial_examples() {
        let r = std_a1();
        let mu = moment_radial(&r, &RadialFamily::Log { c: 2.0 }, &vecc(&[1.0, 0.0])).unwrap();
        assert!(close_blocks(&mu, &[diag2(0.5)], 1e-15));

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let v = random_unit_vector(&mut rng, 2) * c(3.0 * rng.gen::<f64>());
            let a = moment_radial(&r, &RadialFamily::Power, &v).unwrap();
            let b = moment_flat(&r, &v).unwrap();
            assert!(close_blocks(&a, b.blocks(), 1e-12));
        }
    }

    #[test]
    fn radial_singular_at_origin() {
        let r = std_a1();
        let fam = RadialFamily::custom("log s", |s: f64| s.ln(), |s| 1.0 / s, |s| -1.0 / (s * s));
        assert!(matches!(moment_radial(&r, &fam, &CVector::zeros(2)), Err(Error::Domain(_))));
        assert!(moment_radial(&r, &RadialFamily::Log { c: 1.0 }, &CVector::zeros(2)).is_ok());
    }

    #[test]
    fn radial_validation() {
        let r = std_a1();
        let bad = KahlerModel::radial(r.clone(), RadialFamily::Log { c: 0.0 });
        assert!(matches!(MomentEvaluator::new(r.group(), &bad), Err(Error::Domain(_))));
        let decreasing = RadialFamily::custom("neg", |s: f64| -s, |_| -1.0, |_| 0.0);
        assert!(decreasing.validate().is_err());
    }

    // The slice matrix on S = {((z, r), [0:1])} written out by hand: the radial
    // summand c/(1+|z|^2+r^2) [[(|z|^2-r^2)/2, conj(z) r], [z r, -(...)]] in
    // the (z z*)_0 orientation, plus diag(-1/2, 1/2).
    fn slice_oracle(cc: f64, z: C64, r: f64) -> CMatrix {
        let s = z.norm_sqr() + r * r;
        let pre = cc / (1.0 + s);
        let d = (z.norm_sqr() - r * r) / 2.0;
        CMatrix::from_row_slice(2, 2, &[c(pre * d - 0.5), z * (pre * r), z.conj() * (pre * r), c(-pre * d + 0.5)])
    }

    #[test]
    fn radial_plus_fs_matches_slice_formula() {
        let r = std_a1();
        let g = r.group().clone();
        let model = KahlerModel::ProductSum(vec![
            KahlerModel::radial(r.clone(), RadialFamily::Log { c: 2.0 }),
            KahlerModel::fubini_study(r.clone()),
        ]);
        let ev = MomentEvaluator::new(&g, &model).unwrap();
        for (z, rr) in [(C64::new(0.7, -0.2), 0.3), (C64::new(1.0, 0.0), 0.0), (C64::new(-2.0, 1.0), 1.5)] {
            let p = ModelPoint::new(vec![CVector::from_row_slice(&[z, c(rr)]), vecc(&[0.0, 1.0])]);
            let mu = ev.evaluate(&p).unwrap();
            assert!(close_blocks(&mu, &[slice_oracle(2.0, z, rr)], 1e-14));
        }
        // zero exactly when (c - 1)|z|^2 = 1 and r = 0
        let p = ModelPoint::new(vec![vecc(&[1.0, 0.0]), vecc(&[0.0, 1.0])]);
        assert!(ev.evaluate(&p).unwrap().norm() < 1e-15);
    }

    #[test]
    fn fubini_study_examples() {
        let r = std_a1();
        let mu = moment_fubini_study(&r, &vecc(&[0.0, 1.0])).unwrap();
        assert!(close_blocks(&mu, &[diag2(-0.5)], 1e-15));
        let mu = moment_fubini_study(&r, &vecc(&[0.0, 3.0])).unwrap();
        assert!(close_blocks(&mu, &[diag2(-0.5)], 1e-15));

        let r4 = c4();
        let mu = moment_fubini_study(&r4, &vecc(&[0.0, 1.0, 0.0, 1.0])).unwrap();
        assert!(close_blocks(&mu, &[diag2(-0.25), diag2(-0.25)], 1e-15));

        assert!(matches!(moment_fubini_study(&r, &CVector::zeros(2)), Err(Error::Domain(_))));

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let v = random_unit_vector(&mut rng, 2) * c(0.1 + 5.0 * rng.gen::<f64>());
            let n = moment_fubini_study(&r, &v).unwrap().norm();
            assert!((n - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn sum_examples() {
        let g = GroupDescriptor::sl2_sl2();
        let flat = MomentEvaluator::new(&g, &KahlerModel::flat(c4_half())).unwrap();
        let fs = MomentEvaluator::new(&g, &KahlerModel::fubini_study(c4())).unwrap();
        let pv = ModelPoint::single(vecc(&[1.0, 0.0, 1.0, 0.0]));
        let px = ModelPoint::single(vecc(&[0.0, 1.0, 0.0, 1.0]));
        let total = moment_sum(&[(&flat, &pv), (&fs, &px)]).unwrap();
        assert_eq!(total.max_abs_entry(), 0.0);

        let single = moment_sum(&[(&flat, &pv)]).unwrap();
        assert_eq!(single, flat.evaluate(&pv).unwrap());

        let a = flat.evaluate(&pv).unwrap();
        let other = ModelPoint::single(vecc(&[0.3, 1.0, -0.5, 0.2]));
        let b = fs.evaluate(&other).unwrap();
        let s = moment_sum(&[(&flat, &pv), (&fs, &other)]).unwrap();
        assert!(s.norm() <= a.norm() + b.norm() + 1e-15);

        let a1 = MomentEvaluator::new(&GroupDescriptor::sl2(), &KahlerModel::flat(std_a1())).unwrap();
        let p1 = ModelPoint::single(vecc(&[1.0, 0.0]));
        assert!(matches!(moment_sum(&[(&flat, &pv), (&a1, &p1)]), Err(Error::Structural(_))));
    }

    #[test]
    fn potential_route_matches_pairing() {
        let r = std_a1();
        let g = r.group().clone();
        let xi = AlgebraElement::new(
            &g,
            vec![CMatrix::from_row_slice(2, 2, &[I, czero(), czero(), -I])],
            AlgebraKind::Compact,
        )
        .unwrap();
        let v = vecc(&[1.0, 0.0]);
        let raw = moment_from_potential(&r, &RadialFamily::Power, &xi, &v).unwrap();
        // d rho(J xi_Z) = 2 for rho = |v|^2 at e_1 and xi = i diag(1,-1)
        assert!((raw - 2.0).abs() < 1e-15);
        let paired = trace_pairing(&xi, &moment_flat(&r, &v).unwrap()).unwrap();
        assert!((POTENTIAL_NORMALIZATION * raw - paired).abs() < 1e-15);

        let zero = AlgebraElement::zero(&g, AlgebraKind::Compact);
        assert_eq!(moment_from_potential(&r, &RadialFamily::Log { c: 3.0 }, &zero, &v).unwrap(), 0.0);
    }

    #[test]
    fn potential_route_matches_finite_differences() {
        let r = std_a1();
        let g = r.group().clone();
        let fam = RadialFamily::Log { c: 2.0 };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let v = random_unit_vector(&mut rng, 2) * c(0.2 + 2.0 * rng.gen::<f64>());
            let xi = random_compact(&mut rng, &g, 1.0);
            let dir = -(r.algebra_matrix(&xi).unwrap() * &v) * I;
            let h = 1e-5;
            let rho = |x: &CVector| fam.value(r.norm_squared(x));
            let fd = (rho(&(&v + &dir * c(h))) - rho(&(&v - &dir * c(h)))) / (2.0 * h);
            let an = moment_from_potential(&r, &fam, &xi, &v).unwrap();
            assert!((fd - an).abs() < 1e-6, "fd {fd} analytic {an}");
        }
    }

    #[test]
    fn shift_examples() {
        let r = std_a1();
        let g = r.group().clone();
        let base = MomentEvaluator::new(&g, &KahlerModel::flat(r.clone())).unwrap();
        let p = ModelPoint::single(vecc(&[0.4, -1.2]));
        let same = shift_moment(&base, 0, RadialFamily::Constant { value: 3.0 }).unwrap();
        assert_eq!(same.evaluate(&p).unwrap(), base.evaluate(&p).unwrap());

        let shifted = shift_moment(&base, 0, RadialFamily::Log { c: 0.7 }).unwrap();
        let s = r.norm_squared(&p.slots[0]);
        let direct = moment_flat(&r, &p.slots[0]).unwrap().scaled(1.0 + 0.7 / (1.0 + s));
        assert!(close_blocks(&shifted.evaluate(&p).unwrap(), direct.blocks(), 1e-14));

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let xi = random_compact(&mut rng, &g, 1.0);
            let w = ModelPoint::single(random_unit_vector(&mut rng, 2));
            let res = verify_moment_condition(&shifted, &p, &xi, &w, 1e-4).unwrap();
            assert!(res < 1e-6);
        }
        assert!(shift_moment(&base, 3, RadialFamily::Power).is_err());
    }

    #[test]
    fn moment_condition_flat_and_log() {
        let g = GroupDescriptor::sl2_sl2();
        let r = c4_half();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for fam in [RadialFamily::Power, RadialFamily::Log { c: 2.0 }] {
            let ev = MomentEvaluator::new(&g, &KahlerModel::radial(r.clone(), fam)).unwrap();
            for _ in 0..20 {
                let p = ModelPoint::single(random_unit_vector(&mut rng, 4) * c(1.5));
                let w = ModelPoint::single(random_unit_vector(&mut rng, 4));
                let xi = random_compact(&mut rng, &g, 1.0);
                assert!(verify_moment_condition(&ev, &p, &xi, &w, 1e-4).unwrap() < 1e-6);
            }
        }
    }

    #[test]
    fn moment_condition_rejects_bad_step() {
        let r = std_a1();
        let ev = MomentEvaluator::new(r.group(), &KahlerModel::flat(r.clone())).unwrap();
        let p = ModelPoint::single(vecc(&[1.0, 0.0]));
        let xi = AlgebraElement::zero(r.group(), AlgebraKind::Compact);
        for h in [0.0, -1e-3, f64::NAN] {
            assert!(matches!(verify_moment_condition(&ev, &p, &xi, &p, h), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn equivariance_fs_and_flat() {
        let g = GroupDescriptor::sl2_sl2();
        let model = KahlerModel::ProductSum(vec![KahlerModel::flat(c4_half()), KahlerModel::fubini_study(c4())]);
        let ev = MomentEvaluator::new(&g, &model).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let p = ModelPoint::new(vec![random_unit_vector(&mut rng, 4), random_unit_vector(&mut rng, 4)]);
            let k = exp_group(&random_compact(&mut rng, &g, 2.0)).unwrap();
            let lhs = ev.evaluate(&ev.act_group(&k, &p).unwrap()).unwrap();
            let rhs = coadjoint_action(&k, &ev.evaluate(&p).unwrap()).unwrap();
            assert!(close_blocks(&lhs, rhs.blocks(), 1e-12));
        }
    }

    #[test]
    fn analytic_derivative_matches_fd() {
        let g = GroupDescriptor::sl2();
        let r = std_a1();
        let model = KahlerModel::ProductSum(vec![
            KahlerModel::radial(r.clone(), RadialFamily::Log { c: 1.5 }),
            KahlerModel::FubiniStudy { rep: r.clone(), weight: 2.0 },
        ]);
        let ev = MomentEvaluator::new(&g, &model).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let p = ModelPoint::new(vec![random_unit_vector(&mut rng, 2) * c(1.3), random_unit_vector(&mut rng, 2)]);
            let w = ModelPoint::new(vec![random_unit_vector(&mut rng, 2), random_unit_vector(&mut rng, 2)]);
            let an = ev.coords_derivative(&p, &w).unwrap();
            let h = 1e-6;
            let a = ev.coords(&p.axpy(h, &w)).unwrap();
            let b = ev.coords(&p.axpy(-h, &w)).unwrap();
            for k in 0..an.len() {
                assert!((an[k] - (a[k] - b[k]) / (2.0 * h)).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn rank_law_on_p1() {
        let r = std_a1();
        let ev = MomentEvaluator::new(r.group(), &KahlerModel::fubini_study(r.clone())).unwrap();
        let p = ModelPoint::single(vecc(&[0.6, 0.8]));
        let jac = moment_jacobian(&ev, &p, 1e-6).unwrap();
        assert_eq!(numerical_rank(&jac, 1e-6), 2);
        assert_eq!(orbit_dimension(&ev, &p).unwrap(), 2);
    }
}
