//! Compact Lie algebra infrastructure for products of `A1` and `A2` factors.
//!
//! Every factor is realised by its defining matrices: `su(2)`/`sl(2)` as 2x2
//! blocks and `su(3)`/`sl(3)` as 3x3 blocks. The dual of the compact algebra is
//! identified with traceless Hermitian blocks through the trace form, so a
//! coadjoint vector `beta` pairs with `xi` as `sum_b Re tr(beta_b (-i xi_b))`.
//!
//! Each factor carries a fixed Hermitian basis `T_a`, orthonormal for
//! `tr(T_a T_b)`. Compact elements are `sum x_a (i T_a)` with real `x_a`,
//! coadjoint vectors are `sum m_a T_a` with real `m_a`, and the pairing of the
//! two is the Euclidean product of the coordinate vectors.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::{Num, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Tolerance for the traceless / Hermitian structure checks.
pub const STRUCTURE_TOL: f64 = 1e-12;
/// Tolerance for unitarity checks on group elements.
pub const UNITARY_TOL: f64 = 1e-10;

pub(crate) fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// A simple factor of the group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SimpleFactor {
    A1,
    A2,
}

impl SimpleFactor {
    pub fn block_size(self) -> usize {
        match self {
            SimpleFactor::A1 => 2,
            SimpleFactor::A2 => 3,
        }
    }

    pub fn rank(self) -> usize {
        self.block_size() - 1
    }

    pub fn algebra_dim(self) -> usize {
        let n = self.block_size();
        n * n - 1
    }

    pub fn weyl_order(self) -> usize {
        match self {
            SimpleFactor::A1 => 2,
            SimpleFactor::A2 => 6,
        }
    }

    /// Orthonormal Hermitian basis of the traceless matrices of this block size.
    pub fn hermitian_basis(self) -> &'static [CMatrix] {
        static A1: OnceLock<Vec<CMatrix>> = OnceLock::new();
        static A2: OnceLock<Vec<CMatrix>> = OnceLock::new();
        match self {
            SimpleFactor::A1 => A1.get_or_init(|| build_hermitian_basis(2)),
            SimpleFactor::A2 => A2.get_or_init(|| build_hermitian_basis(3)),
        }
    }

    /// Simple coroot `E_ii - E_(i+1)(i+1)`.
    pub fn coroot(self, i: usize) -> CMatrix {
        let n = self.block_size();
        assert!(i + 1 < n, "coroot index out of range");
        let mut h = CMatrix::zeros(n, n);
        h[(i, i)] = c(1.0);
        h[(i + 1, i + 1)] = c(-1.0);
        h
    }
}

fn build_hermitian_basis(n: usize) -> Vec<CMatrix> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut basis = Vec::with_capacity(n * n - 1);
    // diagonal (Cartan) part first
    for l in 1..n {
        let norm = ((l * (l + 1)) as f64).sqrt();
        let mut m = CMatrix::zeros(n, n);
        for j in 0..l {
            m[(j, j)] = c(1.0 / norm);
        }
        m[(l, l)] = c(-(l as f64) / norm);
        basis.push(m);
    }
    for j in 0..n {
        for k in (j + 1)..n {
            let mut sym = CMatrix::zeros(n, n);
            sym[(j, k)] = c(s);
            sym[(k, j)] = c(s);
            basis.push(sym);
            let mut anti = CMatrix::zeros(n, n);
            anti[(j, k)] = C64::new(0.0, -s);
            anti[(k, j)] = C64::new(0.0, s);
            basis.push(anti);
        }
    }
    basis
}

/// Ordered list of simple factors; `G` is the product of the factors' special
/// linear groups, `K` the product of the special unitary ones.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<SimpleFactor>", into = "Vec<SimpleFactor>")]
pub struct GroupDescriptor {
    factors: Vec<SimpleFactor>,
}

impl TryFrom<Vec<SimpleFactor>> for GroupDescriptor {
    type Error = Error;

    fn try_from(factors: Vec<SimpleFactor>) -> Result<Self> {
        GroupDescriptor::new(factors)
    }
}

impl From<GroupDescriptor> for Vec<SimpleFactor> {
    fn from(g: GroupDescriptor) -> Self {
        g.factors
    }
}

impl GroupDescriptor {
    pub fn new(factors: Vec<SimpleFactor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::structural("group needs at least one simple factor"));
        }
        Ok(Self { factors })
    }

    pub fn sl2() -> Self {
        Self { factors: vec![SimpleFactor::A1] }
    }

    pub fn sl3() -> Self {
        Self { factors: vec![SimpleFactor::A2] }
    }

    pub fn sl2_sl2() -> Self {
        Self { factors: vec![SimpleFactor::A1, SimpleFactor::A1] }
    }

    pub fn factors(&self) -> &[SimpleFactor] {
        &self.factors
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.block_size()).collect()
    }

    /// Dimension of the ambient block-diagonal matrix space.
    pub fn ambient_dim(&self) -> usize {
        self.factors.iter().map(|f| f.block_size()).sum()
    }

    pub fn rank(&self) -> usize {
        self.factors.iter().map(|f| f.rank()).sum()
    }

    pub fn algebra_dim(&self) -> usize {
        self.factors.iter().map(|f| f.algebra_dim()).sum()
    }

    /// Iterates over the global basis as `(factor index, T_a)`.
    pub fn basis(&self) -> impl Iterator<Item = (usize, &'static CMatrix)> + '_ {
        self.factors.iter().enumerate().flat_map(|(f, factor)| factor.hermitian_basis().iter().map(move |t| (f, t)))
    }

    /// Offset of factor `f` in the concatenated basis.
    pub fn algebra_offset(&self, f: usize) -> usize {
        self.factors[..f].iter().map(|x| x.algebra_dim()).sum()
    }

    /// Offset of factor `f` in concatenated weight coordinates.
    pub fn rank_offset(&self, f: usize) -> usize {
        self.factors[..f].iter().map(|x| x.rank()).sum()
    }

    /// All simple coroots as `(factor, matrix)` in weight-coordinate order.
    pub fn coroots(&self) -> Vec<(usize, CMatrix)> {
        self.factors
            .iter()
            .enumerate()
            .flat_map(|(f, factor)| (0..factor.rank()).map(move |i| (f, factor.coroot(i))))
            .collect()
    }

    fn check_blocks(&self, blocks: &[CMatrix], what: &str) -> Result<()> {
        if blocks.len() != self.factors.len() {
            return Err(Error::structural(format!(
                "{what}: expected {} blocks, got {}",
                self.factors.len(),
                blocks.len()
            )));
        }
        for (b, f) in blocks.iter().zip(&self.factors) {
            let n = f.block_size();
            if b.nrows() != n || b.ncols() != n {
                return Err(Error::structural(format!(
                    "{what}: block of shape {}x{} where {n}x{n} expected",
                    b.nrows(),
                    b.ncols()
                )));
            }
        }
        Ok(())
    }
}

/// Whether an algebra element lives in the compact form `k` or in `g = k ⊗ C`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgebraKind {
    Compact,
    Full,
}

/// Element of `k` (anti-Hermitian traceless blocks) or of `g` (traceless blocks).
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    blocks: Vec<CMatrix>,
    kind: AlgebraKind,
}

impl AlgebraElement {
    pub fn new(group: &GroupDescriptor, blocks: Vec<CMatrix>, kind: AlgebraKind) -> Result<Self> {
        group.check_blocks(&blocks, "algebra element")?;
        for b in &blocks {
            if !b.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::numeric("algebra element has non-finite entries"));
            }
            if b.trace().norm() > STRUCTURE_TOL * (1.0 + b.norm()) {
                return Err(Error::structural("algebra element block is not traceless"));
            }
            if kind == AlgebraKind::Compact && (b.adjoint() + b).norm() > STRUCTURE_TOL * (1.0 + b.norm()) {
                return Err(Error::structural("compact algebra element block is not anti-Hermitian"));
            }
        }
        Ok(Self { blocks, kind })
    }

    pub fn zero(group: &GroupDescriptor, kind: AlgebraKind) -> Self {
        let blocks = group.block_sizes().into_iter().map(|n| CMatrix::zeros(n, n)).collect();
        Self { blocks, kind }
    }

    /// `sum_a x_a (i T_a)`.
    pub fn from_compact_coords(group: &GroupDescriptor, x: &[f64]) -> Result<Self> {
        let m = combine_basis(group, x.iter().map(|&v| c(v)), "compact coordinates", x.len())?;
        Ok(Self { blocks: m.into_iter().map(|b| b * I).collect(), kind: AlgebraKind::Compact })
    }

    /// `sum_a c_a T_a` for complex coefficients, an element of `g`.
    pub fn from_complex_coords(group: &GroupDescriptor, coeffs: &[C64]) -> Result<Self> {
        let blocks = combine_basis(group, coeffs.iter().copied(), "complex coordinates", coeffs.len())?;
        Ok(Self { blocks, kind: AlgebraKind::Full })
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn kind(&self) -> AlgebraKind {
        self.kind
    }

    /// Coefficients `c_a = tr(T_a X)` with `X = sum c_a T_a`.
    pub fn complex_coords(&self, group: &GroupDescriptor) -> Vec<C64> {
        group.basis().map(|(f, t)| (t * &self.blocks[f]).trace()).collect()
    }

    /// Real coordinates `x_a` of a compact element `sum x_a (i T_a)`.
    pub fn compact_coords(&self, group: &GroupDescriptor) -> Result<Vec<f64>> {
        if self.kind != AlgebraKind::Compact {
            return Err(Error::structural("compact coordinates requested for a non-compact element"));
        }
        Ok(self.complex_coords(group).into_iter().map(|z| z.im).collect())
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { blocks: self.blocks.iter().map(|b| b * c(s)).collect(), kind: self.kind }
    }

    /// Multiplication by a complex scalar; the result is in `g`.
    pub fn scaled_complex(&self, s: C64) -> Self {
        Self { blocks: self.blocks.iter().map(|b| b * s).collect(), kind: AlgebraKind::Full }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.blocks.len() != other.blocks.len() {
            return Err(Error::structural("algebra elements have different block structure"));
        }
        let kind = if self.kind == other.kind { self.kind } else { AlgebraKind::Full };
        Ok(Self { blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a + b).collect(), kind })
    }

    /// Frobenius norm over all blocks.
    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(|b| b.norm_squared()).sum::<f64>().sqrt()
    }

    /// `Ad(g) X = g X g^-1`.
    pub fn adjoint_by(&self, g: &GroupElement) -> Result<Self> {
        if g.blocks.len() != self.blocks.len() {
            return Err(Error::structural("group element and algebra element differ in block structure"));
        }
        let inv = g.inverse()?;
        Ok(Self {
            blocks: self.blocks.iter().zip(g.blocks.iter().zip(&inv.blocks)).map(|(x, (gb, gi))| gb * x * gi).collect(),
            kind: self.kind,
        })
    }
}

fn combine_basis(
    group: &GroupDescriptor,
    coeffs: impl Iterator<Item = C64>,
    what: &str,
    len: usize,
) -> Result<Vec<CMatrix>> {
    if len != group.algebra_dim() {
        return Err(Error::structural(format!("{what}: expected {} entries, got {len}", group.algebra_dim())));
    }
    let mut blocks: Vec<CMatrix> = group.block_sizes().into_iter().map(|n| CMatrix::zeros(n, n)).collect();
    for ((f, t), z) in group.basis().zip(coeffs) {
        blocks[f] += t * z;
    }
    Ok(blocks)
}

/// Block-diagonal element of `G`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    blocks: Vec<CMatrix>,
}

impl GroupElement {
    pub fn new(group: &GroupDescriptor, blocks: Vec<CMatrix>) -> Result<Self> {
        group.check_blocks(&blocks, "group element")?;
        for b in &blocks {
            let d = b.determinant();
            if (d - c(1.0)).norm() > 1e-8 * (1.0 + b.norm()) {
                return Err(Error::structural(format!("group element block has determinant {d}")));
            }
        }
        Ok(Self { blocks })
    }

    pub fn identity(group: &GroupDescriptor) -> Self {
        Self { blocks: group.block_sizes().into_iter().map(|n| CMatrix::identity(n, n)).collect() }
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.blocks.len() != other.blocks.len() {
            return Err(Error::structural("group elements differ in block structure"));
        }
        Ok(Self { blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a * b).collect() })
    }

    pub fn inverse(&self) -> Result<Self> {
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.clone().try_inverse().ok_or_else(|| Error::numeric("singular group element")))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { blocks })
    }

    /// Largest `|g* g - 1|` over the blocks.
    pub fn unitarity_defect(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| (b.adjoint() * b - CMatrix::identity(b.nrows(), b.ncols())).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    /// Largest deviation from the identity, Frobenius per block.
    pub fn distance_to_identity(&self) -> f64 {
        self.blocks.iter().map(|b| (b - CMatrix::identity(b.nrows(), b.ncols())).norm()).fold(0.0, f64::max)
    }
}

/// Element of `k*` realised as traceless Hermitian blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct CoadjointVector {
    blocks: Vec<CMatrix>,
}

impl CoadjointVector {
    pub fn new(group: &GroupDescriptor, blocks: Vec<CMatrix>) -> Result<Self> {
        group.check_blocks(&blocks, "coadjoint vector")?;
        for b in &blocks {
            let scale = 1.0 + b.norm();
            if b.trace().norm() > STRUCTURE_TOL * scale {
                return Err(Error::structural("coadjoint block is not traceless"));
            }
            if (b.adjoint() - b).norm() > STRUCTURE_TOL * scale {
                return Err(Error::structural("coadjoint block is not Hermitian"));
            }
        }
        Ok(Self { blocks })
    }

    pub fn zero(group: &GroupDescriptor) -> Self {
        Self { blocks: group.block_sizes().into_iter().map(|n| CMatrix::zeros(n, n)).collect() }
    }

    /// `sum_a m_a T_a`.
    pub fn from_coords(group: &GroupDescriptor, m: &[f64]) -> Result<Self> {
        let blocks = combine_basis(group, m.iter().map(|&v| c(v)), "coadjoint coordinates", m.len())?;
        Ok(Self { blocks })
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    /// `m_a = tr(beta T_a)`.
    pub fn coords(&self, group: &GroupDescriptor) -> Vec<f64> {
        group.basis().map(|(f, t)| (&self.blocks[f] * t).trace().re).collect()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.blocks.len() != other.blocks.len()
            || self.blocks.iter().zip(&other.blocks).any(|(a, b)| a.shape() != b.shape())
        {
            return Err(Error::structural("coadjoint vectors differ in block structure"));
        }
        Ok(Self { blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a + b).collect() })
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { blocks: self.blocks.iter().map(|b| b * c(s)).collect() }
    }

    /// Squared norm `(1/2) sum_b tr(beta_b^2)`.
    ///
    /// With this normalisation a 2x2 block `diag(a, -a)` has norm `|a|`, so the
    /// Fubini-Study image of `P1` sits at norm 1/2.
    pub fn norm_squared(&self) -> f64 {
        0.5 * self.blocks.iter().map(|b| b.norm_squared()).sum::<f64>()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.blocks.iter().flat_map(|b| b.iter()).map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        self.blocks.iter().all(|b| (0..b.nrows()).all(|i| (0..b.ncols()).all(|j| i == j || b[(i, j)].norm() <= tol)))
    }

    /// Coordinates `tr(beta H_i)` against the simple coroots; for a diagonal
    /// vector these are its fundamental-weight coordinates.
    pub fn coroot_coords(&self, group: &GroupDescriptor) -> Vec<f64> {
        group.coroots().into_iter().map(|(f, h)| (&self.blocks[f] * h).trace().re).collect()
    }

    /// The same vector viewed as an element of `i k ⊂ g`.
    pub fn as_algebra_element(&self) -> AlgebraElement {
        AlgebraElement { blocks: self.blocks.clone(), kind: AlgebraKind::Full }
    }
}

/// `sum_b Re tr(beta_b (-i xi_b))`.
pub fn trace_pairing(xi: &AlgebraElement, beta: &CoadjointVector) -> Result<f64> {
    if xi.kind != AlgebraKind::Compact {
        return Err(Error::structural("trace pairing needs an element of the compact algebra"));
    }
    if xi.blocks.len() != beta.blocks.len() || xi.blocks.iter().zip(&beta.blocks).any(|(a, b)| a.shape() != b.shape()) {
        return Err(Error::structural("trace pairing: block structures differ"));
    }
    Ok(xi.blocks.iter().zip(&beta.blocks).map(|(x, b)| (b * x * (-I)).trace().re).sum())
}

/// Block-wise matrix exponential.
pub fn exp_group(x: &AlgebraElement) -> Result<GroupElement> {
    let mut blocks = Vec::with_capacity(x.blocks.len());
    for b in &x.blocks {
        if !b.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::numeric("exponential of a non-finite algebra element"));
        }
        let e = b.exp();
        if !e.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::numeric("matrix exponential overflowed"));
        }
        blocks.push(e);
    }
    Ok(GroupElement { blocks })
}

/// `beta -> k beta k*` for unitary `k`.
pub fn coadjoint_action(k: &GroupElement, beta: &CoadjointVector) -> Result<CoadjointVector> {
    if k.blocks.len() != beta.blocks.len() || k.blocks.iter().zip(&beta.blocks).any(|(a, b)| a.shape() != b.shape()) {
        return Err(Error::structural("coadjoint action: block structures differ"));
    }
    let defect = k.unitarity_defect();
    if defect > UNITARY_TOL {
        return Err(Error::numeric(format!("coadjoint action needs a unitary element (defect {defect:.3e})")));
    }
    Ok(CoadjointVector { blocks: k.blocks.iter().zip(&beta.blocks).map(|(g, b)| g * b * g.adjoint()).collect() })
}

/// Integral weight in fundamental-weight coordinates, concatenated over factors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weight(pub Vec<i64>);

impl Weight {
    pub fn new(coords: Vec<i64>) -> Self {
        Self(coords)
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_dominant(&self) -> bool {
        self.0.iter().all(|&x| x >= 0)
    }

    pub fn neg(&self) -> Self {
        Self(self.0.iter().map(|x| -x).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

fn check_rank(group: &GroupDescriptor, len: usize) -> Result<()> {
    if len != group.rank() {
        return Err(Error::structural(format!("weight has {len} coordinates, group rank is {}", group.rank())));
    }
    Ok(())
}

// Fundamental-weight coordinates of one factor to diagonal entries (up to a shift).
fn lift<T: Num + Clone>(coords: &[T]) -> Vec<T> {
    let mut d = vec![T::zero(); coords.len() + 1];
    for i in (0..coords.len()).rev() {
        d[i] = d[i + 1].clone() + coords[i].clone();
    }
    d
}

fn lower<T: Num + Clone>(d: &[T]) -> Vec<T> {
    d.windows(2).map(|w| w[0].clone() - w[1].clone()).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    match n {
        2 => vec![vec![0, 1], vec![1, 0]],
        3 => vec![vec![0, 1, 2], vec![0, 2, 1], vec![1, 0, 2], vec![1, 2, 0], vec![2, 0, 1], vec![2, 1, 0]],
        _ => unreachable!("only A1 and A2 factors are supported"),
    }
}

/// The full Weyl orbit, acting by permutations of the diagonal entries.
/// Duplicates are kept (one entry per group element).
pub fn weyl_orbit<T: Num + Clone>(group: &GroupDescriptor, coords: &[T]) -> Result<Vec<Vec<T>>> {
    check_rank(group, coords.len())?;
    let mut orbit: Vec<Vec<T>> = vec![Vec::new()];
    for (f, factor) in group.factors().iter().enumerate() {
        let off = group.rank_offset(f);
        let d = lift(&coords[off..off + factor.rank()]);
        let images: Vec<Vec<T>> = permutations(factor.block_size())
            .into_iter()
            .map(|p| lower(&p.iter().map(|&i| d[i].clone()).collect::<Vec<_>>()))
            .collect();
        orbit = orbit
            .into_iter()
            .flat_map(|prefix| {
                images.iter().map(move |img| {
                    let mut v = prefix.clone();
                    v.extend(img.iter().cloned());
                    v
                })
            })
            .collect();
    }
    Ok(orbit)
}

/// Dominant Weyl-orbit representative of a vector in weight coordinates.
pub fn dominant_coords<T: Num + Clone + PartialOrd>(group: &GroupDescriptor, coords: &[T]) -> Result<Vec<T>> {
    check_rank(group, coords.len())?;
    let mut out = Vec::with_capacity(coords.len());
    for (f, factor) in group.factors().iter().enumerate() {
        let off = group.rank_offset(f);
        let mut d = lift(&coords[off..off + factor.rank()]);
        d.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        out.extend(lower(&d));
    }
    Ok(out)
}

/// Dominant representative of an integral weight.
pub fn dominant_representative(group: &GroupDescriptor, w: &Weight) -> Result<Weight> {
    dominant_coords(group, &w.0).map(Weight)
}

/// Dominant representative of a diagonal coadjoint vector: diagonal entries
/// sorted in decreasing order within each block.
pub fn dominant_coadjoint(group: &GroupDescriptor, beta: &CoadjointVector) -> Result<CoadjointVector> {
    group.check_blocks(&beta.blocks, "coadjoint vector")?;
    if !beta.is_diagonal(STRUCTURE_TOL) {
        return Err(Error::structural("dominant representative needs a diagonal coadjoint vector"));
    }
    let blocks = beta
        .blocks
        .iter()
        .map(|b| {
            let mut d: Vec<f64> = (0..b.nrows()).map(|i| b[(i, i)].re).collect();
            d.sort_by(|a, b| b.total_cmp(a));
            CMatrix::from_diagonal(&CVector::from_iterator(d.len(), d.into_iter().map(c)))
        })
        .collect();
    Ok(CoadjointVector { blocks })
}

/// True iff every fundamental-weight coordinate is strictly positive.
pub fn is_chamber_interior<T: Zero + PartialOrd>(coords: &[T]) -> bool {
    !coords.is_empty() && coords.iter().all(|x| *x > T::zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn diag(entries: &[C64]) -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_row_slice(entries))
    }

    fn offdiag(a: f64, b: f64) -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(0.0), c(a), c(b), c(0.0)])
    }

    #[test]
    fn basis_is_orthonormal() {
        for f in [SimpleFactor::A1, SimpleFactor::A2] {
            let b = f.hermitian_basis();
            assert_eq!(b.len(), f.algebra_dim());
            for (i, x) in b.iter().enumerate() {
                assert!((x.adjoint() - x).norm() < 1e-15);
                assert!(x.trace().norm() < 1e-15);
                for (j, y) in b.iter().enumerate() {
                    let ip = (x * y).trace();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((ip - c(want)).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn trace_pairing_examples() {
        let g = GroupDescriptor::sl2();
        let xi = AlgebraElement::new(&g, vec![diag(&[I, -I])], AlgebraKind::Compact).unwrap();
        let beta = CoadjointVector::new(&g, vec![diag(&[c(0.5), c(-0.5)])]).unwrap();
        assert!(close(trace_pairing(&xi, &beta).unwrap(), 1.0, 1e-15));

        let zero = AlgebraElement::zero(&g, AlgebraKind::Compact);
        assert_eq!(trace_pairing(&zero, &beta).unwrap(), 0.0);

        let off = CoadjointVector::new(&g, vec![offdiag(1.0, 1.0)]).unwrap();
        assert_eq!(trace_pairing(&xi, &off).unwrap(), 0.0);
    }

    #[test]
    fn trace_pairing_rejects_mismatched_blocks() {
        let xi = AlgebraElement::zero(&GroupDescriptor::sl2(), AlgebraKind::Compact);
        let beta = CoadjointVector::zero(&GroupDescriptor::sl3());
        assert!(matches!(trace_pairing(&xi, &beta), Err(Error::Structural(_))));
    }

    #[test]
    fn coordinates_match_pairing() {
        let g = GroupDescriptor::sl2_sl2();
        let x = [0.3, -1.2, 0.7, 2.0, 0.1, -0.4];
        let m = [1.0, 0.5, -0.25, 0.0, 3.0, 1.5];
        let xi = AlgebraElement::from_compact_coords(&g, &x).unwrap();
        let beta = CoadjointVector::from_coords(&g, &m).unwrap();
        let dot: f64 = x.iter().zip(&m).map(|(a, b)| a * b).sum();
        assert!(close(trace_pairing(&xi, &beta).unwrap(), dot, 1e-13));
        let back = xi.compact_coords(&g).unwrap();
        for (a, b) in back.iter().zip(&x) {
            assert!(close(*a, *b, 1e-14));
        }
    }

    #[test]
    fn exp_examples() {
        let g = GroupDescriptor::sl2();
        let id = exp_group(&AlgebraElement::zero(&g, AlgebraKind::Full)).unwrap();
        assert!(id.distance_to_identity() < 1e-15);

        let t = 2.5;
        let nil = AlgebraElement::new(
            &g,
            vec![CMatrix::from_row_slice(2, 2, &[c(0.0), c(t), c(0.0), c(0.0)])],
            AlgebraKind::Full,
        )
        .unwrap();
        let e = exp_group(&nil).unwrap();
        let want = CMatrix::from_row_slice(2, 2, &[c(1.0), c(t), c(0.0), c(1.0)]);
        assert!((&e.blocks()[0] - want).norm() < 1e-14);

        let h = std::f64::consts::FRAC_PI_2;
        let rot = AlgebraElement::new(&g, vec![diag(&[I * h, -I * h])], AlgebraKind::Compact).unwrap();
        let e = exp_group(&rot).unwrap();
        assert!((&e.blocks()[0] - diag(&[I, -I])).norm() < 1e-14);
    }

    #[test]
    fn exp_rejects_nan() {
        let g = GroupDescriptor::sl2();
        let mut x = AlgebraElement::zero(&g, AlgebraKind::Full);
        x.blocks[0][(0, 1)] = C64::new(f64::NAN, 0.0);
        assert!(matches!(exp_group(&x), Err(Error::Numeric(_))));
    }

    #[test]
    fn coadjoint_action_examples() {
        let g = GroupDescriptor::sl2();
        let k = GroupElement::new(&g, vec![diag(&[I, -I])]).unwrap();
        let beta = CoadjointVector::new(&g, vec![offdiag(1.0, 1.0)]).unwrap();
        let out = coadjoint_action(&k, &beta).unwrap();
        assert!((&out.blocks()[0] - offdiag(-1.0, -1.0)).norm() < 1e-15);
        let same = coadjoint_action(&GroupElement::identity(&g), &beta).unwrap();
        assert_eq!(same, beta);

        let nonunitary = GroupElement::new(&g, vec![diag(&[c(2.0), c(0.5)])]).unwrap();
        assert!(matches!(coadjoint_action(&nonunitary, &beta), Err(Error::Numeric(_))));
    }

    #[test]
    fn dominant_examples() {
        let a1 = GroupDescriptor::sl2();
        let a2 = GroupDescriptor::sl3();
        assert_eq!(dominant_representative(&a1, &Weight::new(vec![-3])).unwrap(), Weight::new(vec![3]));
        assert_eq!(dominant_representative(&a2, &Weight::new(vec![1, 0])).unwrap(), Weight::new(vec![1, 0]));
        assert_eq!(dominant_representative(&a2, &Weight::new(vec![-1, 0])).unwrap(), Weight::new(vec![0, 1]));
        assert!(dominant_representative(&a2, &Weight::new(vec![1])).is_err());
    }

    // Independent route: simple reflections s_i(w) = w - w_i alpha_i in
    // fundamental-weight coordinates, closed under composition by search.
    fn reflection_orbit(w: Vec<i64>) -> Vec<Vec<i64>> {
        let alphas = [[2i64, -1], [-1, 2]];
        let mut seen = vec![w];
        let mut i = 0;
        while i < seen.len() {
            let cur = seen[i].clone();
            for (k, a) in alphas.iter().enumerate() {
                let img: Vec<i64> = (0..2).map(|j| cur[j] - cur[k] * a[j]).collect();
                if !seen.contains(&img) {
                    seen.push(img);
                }
            }
            i += 1;
        }
        seen
    }

    #[test]
    fn a2_orbits_match_reflection_search() {
        let g = GroupDescriptor::sl3();
        for a in -3..=3 {
            for b in -3..=3 {
                let mut perm: Vec<Vec<i64>> = weyl_orbit(&g, &[a, b]).unwrap();
                perm.sort();
                perm.dedup();
                let mut refl = reflection_orbit(vec![a, b]);
                refl.sort();
                assert_eq!(perm, refl, "orbit of ({a},{b})");
                let dom = dominant_coords(&g, &[a, b]).unwrap();
                let dominant_in_orbit: Vec<_> = refl.iter().filter(|v| v.iter().all(|&x| x >= 0)).collect();
                assert_eq!(dominant_in_orbit, vec![&dom]);
                assert_eq!(dominant_coords(&g, &dom).unwrap(), dom);
            }
        }
    }

    #[test]
    fn chamber_interior_examples() {
        assert!(is_chamber_interior(&[1i64, 1]));
        assert!(!is_chamber_interior(&[0i64, 1]));
        assert!(!is_chamber_interior(&[0i64, 0]));
    }

    #[test]
    fn dominant_coadjoint_sorts_and_rejects_offdiagonal() {
        let g = GroupDescriptor::sl3();
        let beta = CoadjointVector::new(&g, vec![diag(&[c(-0.5), c(0.25), c(0.25)])]).unwrap();
        let dom = dominant_coadjoint(&g, &beta).unwrap();
        let cc = dom.coroot_coords(&g);
        assert!(close(cc[0], 0.0, 1e-15) && close(cc[1], 0.75, 1e-15));
        let off = CoadjointVector::new(&GroupDescriptor::sl2(), vec![offdiag(1.0, 1.0)]).unwrap();
        assert!(dominant_coadjoint(&GroupDescriptor::sl2(), &off).is_err());
    }
}
