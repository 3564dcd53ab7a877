//! Finite-dimensional representations built from defining representations.
//!
//! A representation is described by a [`RepTree`] over the group's factors.
//! From the tree we derive the matrices `R_a = rho(T_a)` of the Hermitian
//! basis (so `rho(i T_a) = i R_a` on the compact algebra), an invariant
//! Hermitian form `H` for which every `R_a` is self-adjoint, the group action,
//! and a weight decomposition.

use nalgebra::{Cholesky, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{c, AlgebraElement, CMatrix, CVector, GroupDescriptor, GroupElement, Weight, C64};

/// Construction tree of a representation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum RepTree {
    /// Defining representation of one factor; the other factors act trivially.
    Standard {
        factor: usize,
    },
    Dual {
        inner: Box<RepTree>,
    },
    Adjoint {
        factor: usize,
    },
    Sym {
        k: usize,
        inner: Box<RepTree>,
    },
    Tensor {
        left: Box<RepTree>,
        right: Box<RepTree>,
    },
    DirectSum {
        parts: Vec<RepTree>,
    },
    /// Same action, invariant form multiplied by `c > 0`.
    ScaleForm {
        c: f64,
        inner: Box<RepTree>,
    },
}

impl RepTree {
    pub fn standard(factor: usize) -> Self {
        RepTree::Standard { factor }
    }

    pub fn dual(self) -> Self {
        RepTree::Dual { inner: Box::new(self) }
    }

    pub fn adjoint(factor: usize) -> Self {
        RepTree::Adjoint { factor }
    }

    pub fn sym(self, k: usize) -> Self {
        RepTree::Sym { k, inner: Box::new(self) }
    }

    pub fn tensor(self, other: RepTree) -> Self {
        RepTree::Tensor { left: Box::new(self), right: Box::new(other) }
    }

    pub fn direct_sum(parts: Vec<RepTree>) -> Self {
        RepTree::DirectSum { parts }
    }

    pub fn scale_form(self, c: f64) -> Self {
        RepTree::ScaleForm { c, inner: Box::new(self) }
    }

    /// Strips `ScaleForm` wrappers.
    pub fn unscaled(&self) -> &RepTree {
        match self {
            RepTree::ScaleForm { inner, .. } => inner.unscaled(),
            other => other,
        }
    }
}

/// A representation with its invariant form and weight data.
#[derive(Clone, Debug)]
pub struct Representation {
    group: GroupDescriptor,
    tree: RepTree,
    dim: usize,
    gens: Vec<CMatrix>,
    form: CMatrix,
    form_gens: Vec<CMatrix>,
    weights: Vec<(Weight, CVector)>,
}

impl PartialEq for Representation {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.tree == other.tree
    }
}

/// Tolerance for the invariance of the Hermitian form.
pub const FORM_TOL: f64 = 1e-10;
const CLUSTER_TOL: f64 = 1e-8;

/// Builds and validates a representation from its construction tree.
pub fn build_representation(group: &GroupDescriptor, tree: RepTree) -> Result<Representation> {
    let (gens, form) = algebra_data(group, &tree)?;
    let dim = form.nrows();
    let form_gens: Vec<CMatrix> = gens.iter().map(|r| &form * r).collect();
    for (r, hr) in gens.iter().zip(&form_gens) {
        // R_a self-adjoint for H  <=>  (i R_a)* H + H (i R_a) = 0
        let defect = (r.adjoint() * &form - hr).norm();
        if defect > FORM_TOL * (1.0 + hr.norm()) {
            return Err(Error::numeric(format!("hermitian form is not invariant (defect {defect:.3e})")));
        }
    }
    let weights = weight_decomposition(group, &gens, &form)?;
    Ok(Representation { group: group.clone(), tree, dim, gens, form, form_gens, weights })
}

impl Representation {
    pub fn group(&self) -> &GroupDescriptor {
        &self.group
    }

    pub fn tree(&self) -> &RepTree {
        &self.tree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `rho(T_a)` for the global Hermitian basis.
    pub fn generators(&self) -> &[CMatrix] {
        &self.gens
    }

    /// `H rho(T_a)`; these are Hermitian matrices.
    pub fn form_generators(&self) -> &[CMatrix] {
        &self.form_gens
    }

    pub fn form(&self) -> &CMatrix {
        &self.form
    }

    pub fn weights(&self) -> &[(Weight, CVector)] {
        &self.weights
    }

    pub fn weight_list(&self) -> Vec<Weight> {
        self.weights.iter().map(|(w, _)| w.clone()).collect()
    }

    /// `<v, v>_H`.
    pub fn norm_squared(&self, v: &CVector) -> f64 {
        (v.adjoint() * &self.form * v)[(0, 0)].re
    }

    /// `<a, b>_H = b* H a`, linear in the first slot.
    pub fn inner(&self, a: &CVector, b: &CVector) -> C64 {
        (b.adjoint() * &self.form * a)[(0, 0)]
    }

    /// `rho(X)` for an element of `k` or `g`.
    pub fn algebra_matrix(&self, x: &AlgebraElement) -> Result<CMatrix> {
        if x.blocks().len() != self.group.factors().len() {
            return Err(Error::structural("algebra element does not match the representation's group"));
        }
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for (coef, r) in x.complex_coords(&self.group).into_iter().zip(&self.gens) {
            if coef != C64::new(0.0, 0.0) {
                m += r * coef;
            }
        }
        Ok(m)
    }

    /// `rho(g)` computed functorially from the construction tree.
    pub fn group_matrix(&self, g: &GroupElement) -> Result<CMatrix> {
        if g.blocks().len() != self.group.factors().len() {
            return Err(Error::structural("group element does not match the representation's group"));
        }
        group_matrix(&self.group, &self.tree, g)
    }

    fn check_vector(&self, v: &CVector) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::structural(format!(
                "vector of length {} for a representation of dimension {}",
                v.len(),
                self.dim
            )));
        }
        Ok(())
    }
}

/// `xi . v`.
pub fn act_algebra(rep: &Representation, xi: &AlgebraElement, v: &CVector) -> Result<CVector> {
    rep.check_vector(v)?;
    Ok(rep.algebra_matrix(xi)? * v)
}

/// `g . v`; for projective points apply to any homogeneous representative.
pub fn act_group(rep: &Representation, g: &GroupElement, v: &CVector) -> Result<CVector> {
    rep.check_vector(v)?;
    Ok(rep.group_matrix(g)? * v)
}

/// Residuals of the claim that `n` stabilises `v`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilizerReport {
    /// `max_xi |xi . v|` over the supplied basis.
    pub algebra_residual: f64,
    /// `(t, max_xi |exp(t xi) v - v|)` for `t` in {0.5, 1, 2}.
    pub exp_residuals: Vec<(f64, f64)>,
}

impl StabilizerReport {
    pub fn max_residual(&self) -> f64 {
        self.exp_residuals.iter().map(|(_, r)| *r).fold(self.algebra_residual, f64::max)
    }
}

pub fn stabilizer_check(rep: &Representation, v: &CVector, n_basis: &[AlgebraElement]) -> Result<StabilizerReport> {
    rep.check_vector(v)?;
    let mut algebra_residual: f64 = 0.0;
    let mut exp_residuals: Vec<(f64, f64)> = [0.5, 1.0, 2.0].iter().map(|&t| (t, 0.0)).collect();
    for xi in n_basis {
        let m = rep.algebra_matrix(xi)?;
        algebra_residual = algebra_residual.max((&m * v).norm());
        for (t, r) in exp_residuals.iter_mut() {
            let e = (&m * c(*t)).exp();
            *r = r.max((e * v - v).norm());
        }
    }
    Ok(StabilizerReport { algebra_residual, exp_residuals })
}

fn factor_index(group: &GroupDescriptor, factor: usize) -> Result<()> {
    if factor >= group.factors().len() {
        return Err(Error::structural(format!(
            "factor {factor} does not exist in a group with {} factors",
            group.factors().len()
        )));
    }
    Ok(())
}

fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

fn block_diag(parts: &[CMatrix]) -> CMatrix {
    let n: usize = parts.iter().map(|p| p.nrows()).sum();
    let mut m = CMatrix::zeros(n, n);
    let mut off = 0;
    for p in parts {
        m.view_mut((off, off), (p.nrows(), p.ncols())).copy_from(p);
        off += p.nrows();
    }
    m
}

/// Symmetrisation data for `Sym^k` of a `d`-dimensional space: columns are the
/// (unnormalised) symmetrised tensors of each multiset of indices.
struct SymEmbedding {
    s: CMatrix,
    s_pinv: CMatrix,
}

fn multisets(d: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(d: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..d {
            cur.push(i);
            rec(d, k, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, k, 0, &mut Vec::new(), &mut out);
    out
}

fn sym_embedding(d: usize, k: usize) -> SymEmbedding {
    let sets = multisets(d, k);
    let big = d.pow(k as u32);
    let mut s = CMatrix::zeros(big, sets.len());
    for idx in 0..big {
        let mut digits = Vec::with_capacity(k);
        let mut r = idx;
        for _ in 0..k {
            digits.push(r % d);
            r /= d;
        }
        digits.sort_unstable();
        let col = sets.iter().position(|m| *m == digits).expect("multiset present");
        s[(idx, col)] = c(1.0);
    }
    let gram = s.adjoint() * &s;
    let inv = CMatrix::from_diagonal(&gram.diagonal().map(|z| c(1.0 / z.re)));
    let s_pinv = inv * s.adjoint();
    SymEmbedding { s, s_pinv }
}

fn tensor_power_derivation(x: &CMatrix, k: usize) -> CMatrix {
    let d = x.nrows();
    let mut out = CMatrix::zeros(d.pow(k as u32), d.pow(k as u32));
    for slot in 0..k {
        let mut term = CMatrix::identity(1, 1);
        for j in 0..k {
            let f = if j == slot { x.clone() } else { CMatrix::identity(d, d) };
            term = kron(&term, &f);
        }
        out += term;
    }
    out
}

fn tensor_power(x: &CMatrix, k: usize) -> CMatrix {
    let mut out = CMatrix::identity(1, 1);
    for _ in 0..k {
        out = kron(&out, x);
    }
    out
}

fn algebra_data(group: &GroupDescriptor, tree: &RepTree) -> Result<(Vec<CMatrix>, CMatrix)> {
    match tree {
        RepTree::Standard { factor } => {
            factor_index(group, *factor)?;
            let n = group.factors()[*factor].block_size();
            let gens =
                group.basis().map(|(f, t)| if f == *factor { t.clone() } else { CMatrix::zeros(n, n) }).collect();
            Ok((gens, CMatrix::identity(n, n)))
        }
        RepTree::Dual { inner } => {
            let (gens, form) = algebra_data(group, inner)?;
            let gens = gens.iter().map(|r| -r.transpose()).collect();
            let form = form.transpose().try_inverse().ok_or_else(|| Error::numeric("singular hermitian form"))?;
            Ok((gens, hermitize(&form)))
        }
        RepTree::Adjoint { factor } => {
            factor_index(group, *factor)?;
            let basis = group.factors()[*factor].hermitian_basis();
            let n = basis.len();
            let gens = group
                .basis()
                .map(|(f, t)| {
                    let mut m = CMatrix::zeros(n, n);
                    if f == *factor {
                        for (col, tc) in basis.iter().enumerate() {
                            let br = t * tc - tc * t;
                            for (row, ta) in basis.iter().enumerate() {
                                m[(row, col)] = (ta * &br).trace();
                            }
                        }
                    }
                    m
                })
                .collect();
            Ok((gens, CMatrix::identity(n, n)))
        }
        RepTree::Sym { k, inner } => {
            if *k == 0 {
                return Err(Error::domain("symmetric power needs k >= 1"));
            }
            let (gens, form) = algebra_data(group, inner)?;
            let d = form.nrows();
            let emb = sym_embedding(d, *k);
            let gens = gens.iter().map(|r| &emb.s_pinv * tensor_power_derivation(r, *k) * &emb.s).collect();
            let form = emb.s.adjoint() * tensor_power(&form, *k) * &emb.s;
            Ok((gens, form))
        }
        RepTree::Tensor { left, right } => {
            let (lg, lf) = algebra_data(group, left)?;
            let (rg, rf) = algebra_data(group, right)?;
            let il = CMatrix::identity(lf.nrows(), lf.nrows());
            let ir = CMatrix::identity(rf.nrows(), rf.nrows());
            let gens = lg.iter().zip(&rg).map(|(a, b)| kron(a, &ir) + kron(&il, b)).collect();
            Ok((gens, kron(&lf, &rf)))
        }
        RepTree::DirectSum { parts } => {
            if parts.is_empty() {
                return Err(Error::structural("direct sum of no representations"));
            }
            let data = parts.iter().map(|p| algebra_data(group, p)).collect::<Result<Vec<_>>>()?;
            let gens = (0..group.algebra_dim())
                .map(|a| block_diag(&data.iter().map(|(g, _)| g[a].clone()).collect::<Vec<_>>()))
                .collect();
            let form = block_diag(&data.iter().map(|(_, f)| f.clone()).collect::<Vec<_>>());
            Ok((gens, form))
        }
        RepTree::ScaleForm { c: scale, inner } => {
            if !(*scale > 0.0) || !scale.is_finite() {
                return Err(Error::domain(format!("form scale must be positive, got {scale}")));
            }
            let (gens, form) = algebra_data(group, inner)?;
            Ok((gens, form * c(*scale)))
        }
    }
}

fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c(0.5)
}

fn group_matrix(group: &GroupDescriptor, tree: &RepTree, g: &GroupElement) -> Result<CMatrix> {
    match tree {
        RepTree::Standard { factor } => {
            factor_index(group, *factor)?;
            Ok(g.blocks()[*factor].clone())
        }
        RepTree::Dual { inner } => {
            let m = group_matrix(group, inner, g)?;
            Ok(m.try_inverse().ok_or_else(|| Error::numeric("singular group matrix"))?.transpose())
        }
        RepTree::Adjoint { factor } => {
            factor_index(group, *factor)?;
            let basis = group.factors()[*factor].hermitian_basis();
            let gb = &g.blocks()[*factor];
            let gi = gb.clone().try_inverse().ok_or_else(|| Error::numeric("singular group matrix"))?;
            let n = basis.len();
            let mut m = CMatrix::zeros(n, n);
            for (col, tc) in basis.iter().enumerate() {
                let img = gb * tc * &gi;
                for (row, ta) in basis.iter().enumerate() {
                    m[(row, col)] = (ta * &img).trace();
                }
            }
            Ok(m)
        }
        RepTree::Sym { k, inner } => {
            let m = group_matrix(group, inner, g)?;
            let emb = sym_embedding(m.nrows(), *k);
            Ok(&emb.s_pinv * tensor_power(&m, *k) * &emb.s)
        }
        RepTree::Tensor { left, right } => Ok(kron(&group_matrix(group, left, g)?, &group_matrix(group, right, g)?)),
        RepTree::DirectSum { parts } => {
            let ms = parts.iter().map(|p| group_matrix(group, p, g)).collect::<Result<Vec<_>>>()?;
            Ok(block_diag(&ms))
        }
        RepTree::ScaleForm { inner, .. } => group_matrix(group, inner, g),
    }
}

/// Simultaneous eigenvectors of the coroot actions. The coroot matrices are
/// self-adjoint for `H`, so after the Cholesky change of basis they become
/// commuting Hermitian matrices; a generic real combination separates the
/// joint eigenspaces.
fn weight_decomposition(group: &GroupDescriptor, gens: &[CMatrix], form: &CMatrix) -> Result<Vec<(Weight, CVector)>> {
    let dim = form.nrows();
    let chol =
        Cholesky::new(hermitize(form)).ok_or_else(|| Error::numeric("hermitian form is not positive definite"))?;
    let l = chol.l();
    let l_adj = l.adjoint();
    let l_adj_inv = l_adj.clone().try_inverse().ok_or_else(|| Error::numeric("singular Cholesky factor"))?;

    let coroot_mats: Vec<CMatrix> = group
        .coroots()
        .into_iter()
        .map(|(f, h)| {
            let mut m = CMatrix::zeros(dim, dim);
            for ((bf, t), r) in group.basis().zip(gens) {
                if bf == f {
                    m += r * (t * &h).trace();
                }
            }
            hermitize(&(&l_adj * m * &l_adj_inv))
        })
        .collect();

    let mixers = [1.0, std::f64::consts::SQRT_2, 3f64.sqrt(), 5f64.sqrt(), 7f64.sqrt(), 11f64.sqrt()];
    let mut combo = CMatrix::zeros(dim, dim);
    for (m, r) in coroot_mats.iter().zip(mixers.iter().cycle()) {
        combo += m * c(*r);
    }
    let eig = SymmetricEigen::new(combo);

    let mut out = Vec::with_capacity(dim);
    for j in 0..dim {
        let u: CVector = eig.eigenvectors.column(j).into_owned();
        let mut coords = Vec::with_capacity(coroot_mats.len());
        for m in &coroot_mats {
            let val = (u.adjoint() * m * &u)[(0, 0)].re;
            let rounded = val.round();
            if (val - rounded).abs() > CLUSTER_TOL.sqrt() {
                return Err(Error::numeric(format!("non-integral weight coordinate {val}")));
            }
            coords.push(rounded as i64);
        }
        // eigenvector of the combination only; confirm it is a joint eigenvector
        for (m, &w) in coroot_mats.iter().zip(&coords) {
            let resid = (m * &u - &u * c(w as f64)).norm();
            if resid > CLUSTER_TOL {
                return Err(Error::numeric(format!("weight vector residual {resid:.3e}")));
            }
        }
        out.push((Weight::new(coords), &l_adj_inv * u));
    }
    out.sort_by(|a, b| b.0.cmp(&a.0));
    Ok(out)
}

/// Nonzero vector up to scale.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectivePoint {
    coords: CVector,
}

impl ProjectivePoint {
    pub fn new(coords: CVector) -> Result<Self> {
        if !coords.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::numeric("projective point has non-finite coordinates"));
        }
        if coords.iter().all(|z| z.norm() == 0.0) {
            return Err(Error::domain("projective point needs a nonzero coordinate"));
        }
        Ok(Self { coords })
    }

    pub fn from_slice(coords: &[C64]) -> Result<Self> {
        Self::new(CVector::from_row_slice(coords))
    }

    pub fn coords(&self) -> &CVector {
        &self.coords
    }

    pub fn into_coords(self) -> CVector {
        self.coords
    }

    /// Representative of unit norm for the form of `rep`.
    pub fn normalized(&self, rep: &Representation) -> CVector {
        let n = rep.norm_squared(&self.coords).sqrt();
        &self.coords / c(n)
    }

    /// Sine of the Fubini-Study angle to `other` in the standard metric.
    pub fn distance(&self, other: &ProjectivePoint) -> f64 {
        projective_distance(&self.coords, &other.coords)
    }
}

/// Sine of the angle between the lines, `|b - P_a b| / |b|`, computed from the
/// orthogonal residual to keep full precision near coincidence.
pub fn projective_distance(a: &CVector, b: &CVector) -> f64 {
    let na = a.norm();
    let nb = b.norm();
    if na == 0.0 || nb == 0.0 {
        return f64::INFINITY;
    }
    let ua = a / c(na);
    let residual = b - &ua * ua.dotc(b);
    (residual.norm() / nb).min(1.0)
}

/// Standard complex basis vector.
pub fn basis_vector(dim: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    v[i] = c(1.0);
    v
}
