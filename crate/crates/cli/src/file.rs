//! Declarative scenario files (TOML).
//!
//! Complex matrices are written as nested arrays of `[re, im]` pairs. A file
//! describes exactly the data of a [`ScenarioSpec`]; nothing is evaluated.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use unistab_core::lie::{AlgebraElement, AlgebraKind, CMatrix, CVector, GroupDescriptor, SimpleFactor, Weight, C64};
use unistab_core::rep::{build_representation, ProjectivePoint, RepTree, Representation};
use unistab_core::scenario::{
    EmbeddingSlot, ExtensionPart, OrbitFactor, OrbitModel, ScenarioSpec, UnipotentScenario, XDomain,
};
use unistab_core::{Error, FlowConfig, Result};

pub type Entry = [f64; 2];
pub type VectorLit = Vec<Entry>;
pub type MatrixLit = Vec<Vec<Entry>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub id: String,
    pub group: GroupSection,
    pub unipotent: UnipotentSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbit: Option<OrbitSection>,
    pub extension: ExtensionSection,
    pub embedding: EmbeddingSection,
    pub domain: DomainSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cone: Option<ConeSection>,
    #[serde(default)]
    pub flow: FlowSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSection {
    pub factors: Vec<SimpleFactor>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnipotentSection {
    /// Each element of `Lie(N)` as its list of blocks.
    pub basis: Vec<Vec<MatrixLit>>,
    /// The same elements acting on the homogeneous coordinates of `X`.
    pub x_action: Vec<MatrixLit>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitSection {
    pub v_base: VectorLit,
    pub rep: RepTree,
    pub model: OrbitModelLit,
}

/// `{ kind = "flat" }` or `{ kind = "radial", family = "log", c = 2.0 }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OrbitModelLit {
    Flat,
    Radial {
        family: RadialKind,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c: Option<f64>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialKind {
    Power,
    Log,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionSection {
    pub parts: Vec<ExtensionPartLit>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionPartLit {
    #[serde(default = "unit_weight")]
    pub weight: f64,
    pub rep: RepTree,
}

fn unit_weight() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingSection {
    pub slots: Vec<SlotLit>,
}

/// `{ linear = [[...]] }` or `{ constant = [...] }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotLit {
    Linear(MatrixLit),
    Constant(VectorLit),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSection {
    /// Number of homogeneous coordinates of `X`.
    pub dim: usize,
    /// Restricts `X` to these points when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<VectorLit>>,
    /// Default sample size for sweeps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeSection {
    pub highest_weights: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowSection {
    #[serde(default = "enabled")]
    pub enabled: bool,
    #[serde(flatten)]
    pub config: FlowConfig,
}

fn enabled() -> bool {
    true
}

impl Default for FlowSection {
    fn default() -> Self {
        Self { enabled: true, config: FlowConfig::default() }
    }
}

fn to_vector(v: &[Entry]) -> CVector {
    CVector::from_iterator(v.len(), v.iter().map(|[re, im]| C64::new(*re, *im)))
}

fn from_vector(v: &CVector) -> VectorLit {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn to_matrix(m: &MatrixLit) -> Result<CMatrix> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    if m.iter().any(|r| r.len() != cols) {
        return Err(Error::Parse("matrix literal has ragged rows".into()));
    }
    Ok(CMatrix::from_fn(rows, cols, |i, j| C64::new(m[i][j][0], m[i][j][1])))
}

fn from_matrix(m: &CMatrix) -> MatrixLit {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Writes a scenario out; custom radial profiles have no file form.
    pub fn from_scenario(s: &UnipotentScenario) -> Result<Self> {
        let spec = s.spec();
        let orbit = spec
            .orbit
            .as_ref()
            .map(|o| {
                let model = match &o.model {
                    OrbitModel::Flat => OrbitModelLit::Flat,
                    OrbitModel::Radial { family } => match family {
                        unistab_core::RadialFamily::Power => {
                            OrbitModelLit::Radial { family: RadialKind::Power, c: None }
                        }
                        unistab_core::RadialFamily::Log { c } => {
                            OrbitModelLit::Radial { family: RadialKind::Log, c: Some(*c) }
                        }
                        other => {
                            return Err(Error::Unsupported(format!("radial profile {other:?} has no file form")));
                        }
                    },
                };
                Ok(OrbitSection { v_base: from_vector(&o.v_base), rep: o.rep.tree().clone(), model })
            })
            .transpose()?;
        Ok(Self {
            id: spec.id.clone(),
            group: GroupSection { factors: spec.group.factors().to_vec() },
            unipotent: UnipotentSection {
                basis: spec.n_basis.iter().map(|xi| xi.blocks().iter().map(from_matrix).collect()).collect(),
                x_action: spec.x_action.iter().map(from_matrix).collect(),
            },
            orbit,
            extension: ExtensionSection {
                parts: spec
                    .extension
                    .iter()
                    .map(|p| ExtensionPartLit { weight: p.weight, rep: p.rep.tree().clone() })
                    .collect(),
            },
            embedding: EmbeddingSection {
                slots: spec
                    .embedding
                    .iter()
                    .map(|slot| match slot {
                        EmbeddingSlot::Linear(m) => SlotLit::Linear(from_matrix(m)),
                        EmbeddingSlot::Constant(v) => SlotLit::Constant(from_vector(v)),
                    })
                    .collect(),
            },
            domain: DomainSection {
                dim: spec.x_dim,
                points: match &spec.domain {
                    XDomain::Full => None,
                    XDomain::Points(pts) => Some(pts.iter().map(|p| from_vector(p.coords())).collect()),
                },
                grid: None,
            },
            cone: spec
                .cone_metadata
                .as_ref()
                .map(|ws| ConeSection { highest_weights: ws.iter().map(|w| w.coords().to_vec()).collect() }),
            flow: FlowSection { enabled: spec.flow_enabled, config: FlowConfig::default() },
        })
    }

    pub fn to_scenario(&self) -> Result<UnipotentScenario> {
        let group = GroupDescriptor::new(self.group.factors.clone())?;
        let rep = |tree: &RepTree| -> Result<Arc<Representation>> {
            Ok(Arc::new(build_representation(&group, tree.clone())?))
        };
        let n_basis = self
            .unipotent
            .basis
            .iter()
            .map(|blocks| {
                let blocks = blocks.iter().map(to_matrix).collect::<Result<Vec<_>>>()?;
                AlgebraElement::new(&group, blocks, AlgebraKind::Full)
            })
            .collect::<Result<Vec<_>>>()?;
        let orbit = self
            .orbit
            .as_ref()
            .map(|o| {
                let model = match &o.model {
                    OrbitModelLit::Flat => OrbitModel::Flat,
                    OrbitModelLit::Radial { family: RadialKind::Power, .. } => {
                        OrbitModel::Radial { family: unistab_core::RadialFamily::Power }
                    }
                    OrbitModelLit::Radial { family: RadialKind::Log, c } => OrbitModel::Radial {
                        family: unistab_core::RadialFamily::Log {
                            c: c.ok_or_else(|| Error::Parse("log profile needs a value for c".into()))?,
                        },
                    },
                };
                if let OrbitModel::Radial { family } = &model {
                    family.validate()?;
                }
                Ok(OrbitFactor { rep: rep(&o.rep)?, v_base: to_vector(&o.v_base), model })
            })
            .transpose()?;
        let extension = self
            .extension
            .parts
            .iter()
            .map(|p| Ok(ExtensionPart { rep: rep(&p.rep)?, weight: p.weight }))
            .collect::<Result<Vec<_>>>()?;
        let embedding = self
            .embedding
            .slots
            .iter()
            .map(|s| match s {
                SlotLit::Linear(m) => to_matrix(m).map(EmbeddingSlot::Linear),
                SlotLit::Constant(v) => Ok(EmbeddingSlot::Constant(to_vector(v))),
            })
            .collect::<Result<Vec<_>>>()?;
        let domain = match &self.domain.points {
            None => XDomain::Full,
            Some(pts) => {
                XDomain::Points(pts.iter().map(|p| ProjectivePoint::new(to_vector(p))).collect::<Result<_>>()?)
            }
        };
        UnipotentScenario::new(ScenarioSpec {
            id: self.id.clone(),
            group,
            n_basis,
            x_action: self.unipotent.x_action.iter().map(to_matrix).collect::<Result<_>>()?,
            x_dim: self.domain.dim,
            orbit,
            extension,
            embedding,
            domain,
            cone_metadata: self.cone.as_ref().map(|c| c.highest_weights.iter().cloned().map(Weight::new).collect()),
            flow_enabled: self.flow.enabled,
        })
    }

    /// Replaces the `c` of a log profile on the orbit factor.
    pub fn with_param(&self, name: &str, value: f64) -> Result<Self> {
        let mut out = self.clone();
        match (name, out.orbit.as_mut().map(|o| &mut o.model)) {
            ("c", Some(OrbitModelLit::Radial { family: RadialKind::Log, c })) => {
                *c = Some(value);
                Ok(out)
            }
            _ => Err(Error::Domain(format!("scenario '{}' has no parameter '{name}'", self.id))),
        }
    }
}
