//! Exact rational cones in weight space.
//!
//! Coordinates are fundamental-weight coordinates. Membership is decided by
//! enumerating linearly independent generator subsets (Carathéodory), and
//! non-membership is witnessed by a Farkas functional: a vector `y` with
//! `y . g >= 0` on every generator and `y . p < 0` at the query point.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lie::{dominant_coords, GroupDescriptor, Weight};
use crate::rep::Representation;

/// Exact rational serialised as `"p/q"` (or `"p"` when integral).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(pub BigRational);

pub type RationalVector = Vec<Rational>;

impl Rational {
    pub fn from_integer(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn new(num: i64, den: i64) -> Self {
        Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("not a rational: '{s}'"));
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(Rational(BigRational::new(n, d)))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn to_big(v: &[Rational]) -> Vec<BigRational> {
    v.iter().map(|r| r.0.clone()).collect()
}

fn from_big(v: Vec<BigRational>) -> RationalVector {
    v.into_iter().map(Rational).collect()
}

/// Rational vector from integer weight coordinates.
pub fn weight_vector(w: &Weight) -> RationalVector {
    w.coords().iter().map(|&x| Rational::from_integer(x)).collect()
}

fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
}

/// Reduced row echelon form in place; returns the pivot columns.
fn rref(m: &mut [Vec<BigRational>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][col].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in 0..cols {
                    let delta = &f * &m[r][j];
                    m[i][j] -= delta;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

fn rank(vectors: &[&Vec<BigRational>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = vectors.iter().map(|v| (*v).clone()).collect();
    rref(&mut m).len()
}

/// Solves `sum_j a_j cols[j] = target` exactly for linearly independent `cols`.
fn solve_independent(cols: &[&Vec<BigRational>], target: &[BigRational]) -> Option<Vec<BigRational>> {
    let d = target.len();
    let k = cols.len();
    let mut m: Vec<Vec<BigRational>> = (0..d)
        .map(|i| {
            let mut row: Vec<BigRational> = cols.iter().map(|c| c[i].clone()).collect();
            row.push(target[i].clone());
            row
        })
        .collect();
    let pivots = rref(&mut m);
    if pivots.contains(&k) {
        return None;
    }
    let mut sol = vec![BigRational::zero(); k];
    for (row, &p) in pivots.iter().enumerate() {
        sol[p] = m[row][k].clone();
    }
    Some(sol)
}

/// Basis of the null space of the rows of `m` (as row vectors).
fn null_space(m: &[Vec<BigRational>], cols: usize) -> Vec<Vec<BigRational>> {
    let mut a = m.to_vec();
    let pivots = rref(&mut a);
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![BigRational::zero(); cols];
            v[free] = BigRational::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -a[row][free].clone();
            }
            v
        })
        .collect()
}

/// Rescales to a primitive integer vector with the same direction.
fn primitive(v: Vec<BigRational>) -> Vec<BigRational> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return v;
    }
    ints.into_iter().map(|x| BigRational::from_integer(x / &g)).collect()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Largest rank supported by the subset enumeration.
pub const MAX_CONE_RANK: usize = 4;
/// Largest generator count supported by the subset enumeration.
pub const MAX_GENERATORS: usize = 8;

/// Cone of nonnegative rational combinations of nonzero generators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalCone {
    rank: usize,
    generators: Vec<RationalVector>,
}

impl RationalCone {
    pub fn new(rank: usize, generators: Vec<RationalVector>) -> Result<Self> {
        if rank > MAX_CONE_RANK {
            return Err(Error::Unsupported(format!("cone rank {rank} exceeds {MAX_CONE_RANK}")));
        }
        if generators.len() > MAX_GENERATORS {
            return Err(Error::Unsupported(format!("{} generators exceed {MAX_GENERATORS}", generators.len())));
        }
        for g in &generators {
            if g.len() != rank {
                return Err(Error::structural(format!("generator of length {} in a rank-{rank} cone", g.len())));
            }
            if g.iter().all(|x| x.0.is_zero()) {
                return Err(Error::structural("cone generators must be nonzero"));
            }
        }
        Ok(Self { rank, generators })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn generators(&self) -> &[RationalVector] {
        &self.generators
    }

    fn big_generators(&self) -> Vec<Vec<BigRational>> {
        self.generators.iter().map(|g| to_big(g)).collect()
    }
}

/// Outcome of an exact membership test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Membership {
    /// Nonnegative coefficients, one per generator, reconstructing the point.
    Member { coefficients: RationalVector },
    /// Functional nonnegative on the cone and negative at the point.
    Separated { functional: RationalVector },
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member { .. })
    }

    /// Re-checks the certificate in exact arithmetic.
    pub fn verify(&self, cone: &RationalCone, point: &[Rational]) -> bool {
        if point.len() != cone.rank {
            return false;
        }
        let p = to_big(point);
        let gens = cone.big_generators();
        match self {
            Membership::Member { coefficients } => {
                if coefficients.len() != gens.len() || coefficients.iter().any(|a| a.0.is_negative()) {
                    return false;
                }
                (0..cone.rank).all(|i| {
                    let sum = gens.iter().zip(coefficients).fold(BigRational::zero(), |acc, (g, a)| acc + &g[i] * &a.0);
                    sum == p[i]
                })
            }
            Membership::Separated { functional } => {
                if functional.len() != cone.rank {
                    return false;
                }
                let y = to_big(functional);
                gens.iter().all(|g| !dot(&y, g).is_negative()) && dot(&y, &p).is_negative()
            }
        }
    }
}

/// Cone generated by dominant highest weights; zero weights are dropped.
pub fn cone_from_highest_weights(group: &GroupDescriptor, weights: &[Weight]) -> Result<RationalCone> {
    for w in weights {
        if w.coords().len() != group.rank() {
            return Err(Error::structural(format!(
                "weight {:?} does not match group rank {}",
                w.coords(),
                group.rank()
            )));
        }
        if !w.is_dominant() {
            return Err(Error::domain(format!("weight {:?} is not dominant", w.coords())));
        }
    }
    let gens = weights.iter().filter(|w| w.coords().iter().any(|&x| x != 0)).map(weight_vector).collect();
    RationalCone::new(group.rank(), gens)
}

/// Exact membership decision with coefficients or a Farkas separator.
pub fn cone_contains(cone: &RationalCone, point: &[Rational]) -> Result<Membership> {
    if point.len() != cone.rank {
        return Err(Error::structural(format!("point of length {} for a rank-{} cone", point.len(), cone.rank)));
    }
    let p = to_big(point);
    let gens = cone.big_generators();
    let n = gens.len();

    for k in 0..=n.min(cone.rank) {
        for subset in subsets(n, k) {
            let cols: Vec<&Vec<BigRational>> = subset.iter().map(|&i| &gens[i]).collect();
            if rank(&cols) < k {
                continue;
            }
            if let Some(a) = solve_independent(&cols, &p) {
                if a.iter().all(|x| !x.is_negative()) {
                    let mut coefficients = vec![BigRational::zero(); n];
                    for (&i, x) in subset.iter().zip(a) {
                        coefficients[i] = x;
                    }
                    return Ok(Membership::Member { coefficients: from_big(coefficients) });
                }
            }
        }
    }
    separator(&gens, &p, cone.rank)
        .map(|y| Membership::Separated { functional: from_big(primitive(y)) })
        .ok_or_else(|| Error::numeric("no separating functional found for a non-member"))
}

fn separator(gens: &[Vec<BigRational>], p: &[BigRational], dim: usize) -> Option<Vec<BigRational>> {
    let all: Vec<&Vec<BigRational>> = gens.iter().collect();
    let mut basis_rows: Vec<Vec<BigRational>> = gens.to_vec();
    let pivots = rref(&mut basis_rows);
    let basis: Vec<Vec<BigRational>> = basis_rows.into_iter().take(pivots.len()).collect();
    let m = basis.len();

    // outside the span: minus the orthogonal component
    let orth = null_space(&basis, dim);
    if !orth.is_empty() {
        let gram: Vec<Vec<BigRational>> = orth.iter().map(|u| orth.iter().map(|v| dot(u, v)).collect()).collect();
        let rhs: Vec<BigRational> = orth.iter().map(|u| dot(u, p)).collect();
        let cols: Vec<&Vec<BigRational>> = gram.iter().collect();
        if let Some(c) = solve_independent(&cols, &rhs) {
            let mut comp = vec![BigRational::zero(); dim];
            for (ci, u) in c.iter().zip(&orth) {
                for j in 0..dim {
                    comp[j] += ci * &u[j];
                }
            }
            if comp.iter().any(|x| !x.is_zero()) {
                return Some(comp.into_iter().map(|x| -x).collect());
            }
        }
    }

    // inside the span: a facet normal taken within the span
    for subset in subsets(gens.len(), m.saturating_sub(1)) {
        let cols: Vec<&Vec<BigRational>> = subset.iter().map(|&i| all[i]).collect();
        if rank(&cols) + 1 != m.max(1) {
            continue;
        }
        let system: Vec<Vec<BigRational>> = cols.iter().map(|s| basis.iter().map(|b| dot(s, b)).collect()).collect();
        let ns = null_space(&system, m);
        let [coef] = ns.as_slice() else { continue };
        let mut normal = vec![BigRational::zero(); dim];
        for (ci, b) in coef.iter().zip(&basis) {
            for j in 0..dim {
                normal[j] += ci * &b[j];
            }
        }
        let signs: Vec<BigRational> = gens.iter().map(|g| dot(&normal, g)).collect();
        let normal = if signs.iter().all(|s| !s.is_negative()) {
            normal
        } else if signs.iter().all(|s| !s.is_positive()) {
            normal.into_iter().map(|x| -x).collect()
        } else {
            continue;
        };
        if dot(&normal, p).is_negative() {
            return Some(normal);
        }
    }
    None
}

/// Full dominant chamber: the cone on all fundamental weights.
pub fn grosshans_chamber_cone(group: &GroupDescriptor) -> RationalCone {
    let r = group.rank();
    let gens = (0..r).map(|i| (0..r).map(|j| Rational::from_integer(i64::from(i == j))).collect()).collect();
    RationalCone::new(r, gens).expect("rank of a supported group fits")
}

/// Dominant representatives of the negated weights of a representation whose
/// projectivisation is a single compact orbit. Duplicates are removed.
pub fn projective_dominant_targets(rep: &Representation, transitive: bool) -> Result<Vec<RationalVector>> {
    if !transitive {
        return Err(Error::Unsupported("dominant targets need a transitive action on the projective space".into()));
    }
    let group = rep.group();
    let mut out: Vec<RationalVector> = Vec::new();
    for w in rep.weight_list() {
        let neg = to_big(&weight_vector(&w.neg()));
        let dom = from_big(dominant_coords(group, &neg)?);
        if !out.contains(&dom) {
            out.push(dom);
        }
    }
    Ok(out)
}

/// Exact proof that no target ray meets the cone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObstructionCertificate {
    pub cone: RationalCone,
    pub targets: Vec<RationalVector>,
    /// One separating functional per target.
    pub separators: Vec<RationalVector>,
}

impl ObstructionCertificate {
    /// Re-runs every exclusion from the stored data.
    pub fn verify(&self) -> bool {
        !self.targets.is_empty()
            && self.targets.len() == self.separators.len()
            && self
                .targets
                .iter()
                .zip(&self.separators)
                .all(|(t, y)| Membership::Separated { functional: y.clone() }.verify(&self.cone, t))
    }
}

/// Fires when no positive multiple of any target lies in the cone.
pub fn zero_fiber_obstruction(
    cone: &RationalCone,
    targets: &[RationalVector],
) -> Result<Option<ObstructionCertificate>> {
    if targets.is_empty() {
        return Ok(None);
    }
    let mut separators = Vec::with_capacity(targets.len());
    for t in targets {
        match cone_contains(cone, t)? {
            Membership::Member { .. } => return Ok(None),
            Membership::Separated { functional } => separators.push(functional),
        }
    }
    Ok(Some(ObstructionCertificate { cone: cone.clone(), targets: targets.to_vec(), separators }))
}
