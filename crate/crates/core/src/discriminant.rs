//! Newton polytopes of discriminants: hypersurfaces, complete intersections
//! through the Cayley configuration, resultant multiplicities and
//! bifurcation sets.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{check_dim, Error, Result};
use crate::fiber::{fiber_polytope, mixed_fiber_monomial, SplitPolytope};
use crate::lattice::{integer_rows, lattice_index, quotient_chart, IntMatrix};
use crate::obstruction::{config_faces, milnor_number_c, obstruction_table, ConfigFace, PointConfiguration};
use crate::polytope::{normal_fan, Polytope, VirtualPolytope};
use crate::rational::{dot, q, qvec, rank, sub, unit, QVec, Q};
use crate::volume::{compositions, mixed_volume_lattice};

/// A configuration A ⊂ Z^k with a coefficient polytope Δ_a ⊂ R^n for every a.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientSpec {
    config: PointConfiguration,
    n: usize,
    /// Aligned with `config.points()`.
    coeffs: Vec<Polytope>,
}

impl CoefficientSpec {
    pub fn new(config: PointConfiguration, coeffs: Vec<Polytope>) -> Result<Self> {
        if coeffs.len() != config.len() {
            return Err(Error::InvalidInput(format!(
                "{} coefficient polytopes for {} points",
                coeffs.len(),
                config.len()
            )));
        }
        let n = coeffs[0].ambient_dim();
        for c in &coeffs {
            check_dim(n, c.ambient_dim())?;
        }
        Ok(CoefficientSpec { config, n, coeffs })
    }

    /// Builds the spec from (point, polytope) pairs in any order.
    pub fn from_pairs(k: usize, pairs: Vec<(Vec<i64>, Polytope)>) -> Result<Self> {
        let config = PointConfiguration::new(k, pairs.iter().map(|(a, _)| a.clone()).collect())?;
        let mut coeffs = vec![None; config.len()];
        for (a, p) in pairs {
            let i = config.index_of(&a).expect("point was inserted");
            coeffs[i] = Some(p);
        }
        Self::new(config, coeffs.into_iter().map(|c| c.expect("one polytope per point")).collect())
    }

    /// Δ_a = {e_a} in R^A: every coefficient is an independent variable.
    pub fn universal(config: PointConfiguration) -> Self {
        let n = config.len();
        let coeffs = (0..n).map(|i| Polytope::point(unit(n, i))).collect();
        CoefficientSpec { config, n, coeffs }
    }

    /// Universal specs for a family A_0..A_l sharing one coefficient space
    /// R^{|A_0| + .. + |A_l|}.
    pub fn universal_family(parts: &[PointConfiguration]) -> Vec<CoefficientSpec> {
        let n: usize = parts.iter().map(|p| p.len()).sum();
        let mut offset = 0;
        parts
            .iter()
            .map(|a| {
                let coeffs = (0..a.len()).map(|i| Polytope::point(unit(n, offset + i))).collect();
                offset += a.len();
                CoefficientSpec { config: a.clone(), n, coeffs }
            })
            .collect()
    }

    pub fn config(&self) -> &PointConfiguration {
        &self.config
    }

    pub fn coeffs(&self) -> &[Polytope] {
        &self.coeffs
    }

    /// Dimension of the coefficient space.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.config.ambient_dim()
    }

    pub fn coeff(&self, a: &[i64]) -> Option<&Polytope> {
        self.config.index_of(a).map(|i| &self.coeffs[i])
    }

    fn preimage_of(&self, idx: &[usize]) -> SplitPolytope {
        let mut pts = Vec::new();
        for &i in idx {
            let a = qvec(&self.config.points()[i]);
            for v in self.coeffs[i].vertices() {
                let mut w = v.clone();
                w.extend(a.iter().cloned());
                pts.push(w);
            }
        }
        SplitPolytope::new(self.n, self.k(), Polytope::hull_of(&pts)).expect("consistent dimensions")
    }

    /// Δ = conv ∪_a Δ_a × {a}.
    pub fn assembled(&self) -> SplitPolytope {
        self.preimage_of(&(0..self.config.len()).collect::<Vec<_>>())
    }
}

/// Δ(A') for a face A' of the configuration.
pub fn face_preimage(spec: &CoefficientSpec, a_prime: &[Vec<i64>]) -> Result<SplitPolytope> {
    let mut pts = a_prime.to_vec();
    pts.sort();
    pts.dedup();
    let face = config_faces(&spec.config)
        .into_iter()
        .find(|f| spec.config.face_points(f) == pts)
        .ok_or_else(|| Error::NotAFace(format!("{pts:?}")))?;
    Ok(spec.preimage_of(&face.points))
}

/// Index of the lattice generated by A × {1} in its saturation.
pub fn discriminant_multiplicity(a: &PointConfiguration) -> BigInt {
    let rows: Vec<Vec<i64>> = a.points().iter().map(|p| p.iter().copied().chain([1]).collect()).collect();
    lattice_index(&IntMatrix::from_i64(&rows, a.ambient_dim() + 1))
}

/// Σ over faces A' of e^{A',A} ∫Δ(A'). With `reduced`, divided by the
/// multiplicity of the discriminant.
pub fn newton_discriminant_hypersurface(spec: &CoefficientSpec, reduced: bool) -> Result<Polytope> {
    let table = obstruction_table(&spec.config)?;
    let col = table.top_column();
    let terms: Vec<(BigInt, Polytope)> = table
        .faces
        .par_iter()
        .zip(col.par_iter())
        .filter(|(_, e)| !e.is_zero())
        .map(|(f, e)| (e.clone(), fiber_polytope(&spec.preimage_of(&f.points))))
        .collect();
    let mut v = VirtualPolytope::zero(spec.n);
    for (e, p) in terms {
        v.add_term(Q::from_integer(e), &p)?;
    }
    let r = v.realize()?;
    if reduced {
        Ok(r.scale(&(Q::one() / Q::from_integer(discriminant_multiplicity(&spec.config)))))
    } else {
        Ok(r)
    }
}

/// A family A_0..A_l ⊂ Z^k and its Cayley configurations A_J.
#[derive(Clone, Debug)]
pub struct CayleyConfig {
    parts: Vec<PointConfiguration>,
}

impl CayleyConfig {
    pub fn new(parts: Vec<PointConfiguration>) -> Result<Self> {
        let Some(first) = parts.first() else {
            return Err(Error::InvalidInput("empty family".into()));
        };
        for p in &parts {
            check_dim(first.ambient_dim(), p.ambient_dim())?;
        }
        Ok(CayleyConfig { parts })
    }

    pub fn parts(&self) -> &[PointConfiguration] {
        &self.parts
    }

    pub fn k(&self) -> usize {
        self.parts[0].ambient_dim()
    }

    pub fn l(&self) -> usize {
        self.parts.len() - 1
    }

    /// ∪_{j∈J} A_j × {e_j} in Z^{k+l+1}.
    pub fn lifted(&self, j: &[usize]) -> PointConfiguration {
        let k = self.k();
        let m = self.parts.len();
        let mut pts = Vec::new();
        for &i in j {
            for a in self.parts[i].points() {
                let mut p = a.clone();
                p.extend((0..m).map(|t| i64::from(t == i)));
                pts.push(p);
            }
        }
        PointConfiguration::new(k + m, pts).expect("lifted points are distinct")
    }

    /// dim Σ_{j∈J} A_j − |J|.
    pub fn codim(&self, j: &[usize]) -> i64 {
        sum_dim(j.iter().map(|&i| &self.parts[i])) as i64 - j.len() as i64
    }

    /// Nonempty subsets of {0..l}, as sorted index lists.
    pub fn subsets(&self) -> Vec<Vec<usize>> {
        nonempty_subsets(self.parts.len())
    }
}

fn nonempty_subsets(m: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> =
        (1usize..1 << m).map(|mask| (0..m).filter(|i| mask >> i & 1 == 1).collect()).collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    out
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.contains(x))
}

/// Dimension of the Minkowski sum of the given point sets.
fn sum_dim<'a>(parts: impl Iterator<Item = &'a PointConfiguration>) -> usize {
    let mut diffs: Vec<QVec> = Vec::new();
    for a in parts {
        let p = a.qpoints();
        diffs.extend(p[1..].iter().map(|x| sub(x, &p[0])));
    }
    rank(&diffs)
}

fn sum_dim_points(parts: &[&[Vec<i64>]]) -> usize {
    let mut diffs: Vec<QVec> = Vec::new();
    for a in parts {
        let p0 = qvec(&a[0]);
        diffs.extend(a[1..].iter().map(|x| sub(&qvec(x), &p0)));
    }
    rank(&diffs)
}

/// Subsets J with codim J ≤ codim J' for every J' ⊇ J, together with codim J.
pub fn admissible_subsets(parts: &[PointConfiguration]) -> Result<Vec<(Vec<usize>, i64)>> {
    let cc = CayleyConfig::new(parts.to_vec())?;
    let all: Vec<(Vec<usize>, i64)> = cc
        .subsets()
        .into_iter()
        .map(|j| {
            let c = cc.codim(&j);
            (j, c)
        })
        .collect();
    Ok(all.iter().filter(|(j, c)| all.iter().all(|(j2, c2)| !is_subset(j, j2) || c <= c2)).cloned().collect())
}

fn check_family(specs: &[CoefficientSpec]) -> Result<(usize, usize)> {
    let Some(first) = specs.first() else {
        return Err(Error::InvalidInput("empty family".into()));
    };
    for s in specs {
        check_dim(first.k(), s.k())?;
        check_dim(first.n, s.n)?;
    }
    Ok((first.n, first.k()))
}

/// The spec on A_J carrying Δ_{(a, e_j)} = Δ_a of the j-th spec.
pub fn cayley_spec(specs: &[CoefficientSpec], j: &[usize]) -> Result<CoefficientSpec> {
    let (_, k) = check_family(specs)?;
    let m = specs.len();
    let mut pairs = Vec::new();
    for &i in j {
        for (a, p) in specs[i].config.points().iter().zip(&specs[i].coeffs) {
            let mut lifted = a.clone();
            lifted.extend((0..m).map(|t| i64::from(t == i)));
            pairs.push((lifted, p.clone()));
        }
    }
    CoefficientSpec::from_pairs(k + m, pairs)
}

/// Newton polytope of the discriminant of a system with supports A_0..A_l:
/// the sum over admissible J of the hypersurface discriminant of A_J.
pub fn newton_ci_discriminant(specs: &[CoefficientSpec], reduced: bool) -> Result<Polytope> {
    let (n, k) = check_family(specs)?;
    let l = specs.len() - 1;
    if l > k {
        return Err(Error::Precondition(format!("{} equations in dimension {k}", l + 1)));
    }
    let parts: Vec<PointConfiguration> = specs.iter().map(|s| s.config.clone()).collect();
    let mut total = Polytope::origin(n);
    for (j, _) in admissible_subsets(&parts)? {
        let d = newton_discriminant_hypersurface(&cayley_spec(specs, &j)?, reduced)?;
        total = total.minkowski_sum(&d)?;
    }
    Ok(total)
}

/// The set conv(0 ∪ Q) ∖ Q up to equality: Q itself when it is not
/// full-dimensional, otherwise the facets of Q visible from the origin.
fn link_shape(rest: &Polytope, d: usize) -> Vec<Polytope> {
    if rest.dim() < d {
        return vec![rest.clone()];
    }
    let origin = vec![Q::zero(); d];
    let mut out: Vec<Polytope> = rest
        .faces()
        .iter()
        .filter(|f| {
            f.dim + 1 == d && f.facets.ones().all(|j| dot(&rest.facets()[j].normal, &origin) < rest.facets()[j].offset)
        })
        .map(|f| rest.face_polytope(f))
        .collect();
    out.sort_by(|a, b| a.vertices().cmp(b.vertices()));
    out
}

/// Faces of A_0 with the corresponding faces of every A_i, each as point
/// indices, after checking that the configurations are analogous.
fn corresponding_faces(parts: &[PointConfiguration]) -> Result<Vec<Vec<ConfigFace>>> {
    let k = parts[0].ambient_dim();
    for (i, a) in parts.iter().enumerate() {
        if a.affine_dim() != k {
            return Err(Error::Precondition(format!("configuration {i} lies in an affine hyperplane")));
        }
    }
    let hulls: Vec<Polytope> = parts.iter().map(|a| a.hull()).collect();
    let fan0 = normal_fan(&hulls[0]);
    for (i, h) in hulls.iter().enumerate().skip(1) {
        if !fan0.same_as(&normal_fan(h)) {
            return Err(Error::NotAnalogous(format!("configurations 0 and {i} have different normal fans")));
        }
    }
    let mut out = Vec::new();
    for f in hulls[0].faces() {
        let tuple: Vec<ConfigFace> =
            parts.iter().map(|a| ConfigFace { points: a.minimizers(&f.functional), dim: f.dim }).collect();
        if f.dim < k {
            let chart = |a: &PointConfiguration, face: &ConfigFace| {
                let pts = a.face_points(face);
                let p0 = qvec(&pts[0]);
                let dirs: Vec<QVec> = pts[1..].iter().map(|p| sub(&qvec(p), &p0)).collect();
                (integer_rows(&dirs, k), p0)
            };
            let (kernel, _) = chart(&parts[0], &tuple[0]);
            let qc = quotient_chart(&kernel, k, q(1));
            let link = |a: &PointConfiguration, face: &ConfigFace| {
                let (_, p0) = chart(a, face);
                let s0 = qc.project(&p0);
                let img = |p: &Vec<i64>| sub(&qc.project(&qvec(p)), &s0);
                let rest: Vec<QVec> = a
                    .points()
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !face.points.contains(i))
                    .map(|(_, p)| img(p))
                    .collect();
                link_shape(&Polytope::hull_of(&rest), qc.quotient_dim())
            };
            let l0 = link(&parts[0], &tuple[0]);
            for (i, (a, face)) in parts.iter().zip(&tuple).enumerate().skip(1) {
                if link(a, face) != l0 {
                    return Err(Error::NotAnalogous(format!(
                        "links differ at faces {:?} of configuration 0 and {:?} of configuration {i}",
                        parts[0].face_points(&tuple[0]),
                        a.face_points(face)
                    )));
                }
            }
        }
        out.push(tuple);
    }
    Ok(out)
}

/// Σ over corresponding faces (A'_0..A'_l) of e^{A'_0,A_0} times the sum of
/// MF(Δ_0(A'_0)^{a_0}, .., Δ_l(A'_l)^{a_l}) over a_i > 0, Σ a_i = dim A'_0 + 1.
pub fn higher_mixed_fiber(specs: &[CoefficientSpec]) -> Result<Polytope> {
    let (n, _) = check_family(specs)?;
    let parts: Vec<PointConfiguration> = specs.iter().map(|s| s.config.clone()).collect();
    let tuples = corresponding_faces(&parts)?;
    let table = obstruction_table(&parts[0])?;
    let col = table.top_column();
    let m = specs.len();
    let mut jobs: Vec<(BigInt, Vec<(SplitPolytope, usize)>)> = Vec::new();
    for tuple in &tuples {
        let Some(t) = table.index_of(&tuple[0]) else {
            return Err(Error::Defect("face missing from the obstruction table".into()));
        };
        let e = &col[t];
        if e.is_zero() || tuple[0].dim + 1 < m {
            continue;
        }
        let pre: Vec<SplitPolytope> = specs.iter().zip(tuple).map(|(s, f)| s.preimage_of(&f.points)).collect();
        for comp in compositions(tuple[0].dim + 1, m) {
            if comp.contains(&0) {
                continue;
            }
            jobs.push((e.clone(), pre.iter().cloned().zip(comp).collect()));
        }
    }
    let parts_mf: Vec<(BigInt, Polytope)> =
        jobs.par_iter().map(|(e, args)| Ok((e.clone(), mixed_fiber_monomial(args)?))).collect::<Result<_>>()?;
    let mut v = VirtualPolytope::zero(n);
    for (e, p) in parts_mf {
        v.add_term(Q::from_integer(e), &p)?;
    }
    v.realize()
}

/// |Z^k / M| for M generated by the differences of A_0 + .. + A_l.
pub fn difference_index(parts: &[PointConfiguration]) -> BigInt {
    let k = parts[0].ambient_dim();
    let mut rows = Vec::new();
    for a in parts {
        let m = a.difference_lattice();
        rows.extend(m.entries);
    }
    let m = IntMatrix::from_rows(rows, k);
    lattice_index(&m)
}

/// HP(specs) / |Z^k/M|, the reduced discriminant of a system with analogous supports.
pub fn losung_fast_path(specs: &[CoefficientSpec]) -> Result<Polytope> {
    let hp = higher_mixed_fiber(specs)?;
    let parts: Vec<PointConfiguration> = specs.iter().map(|s| s.config.clone()).collect();
    Ok(hp.scale(&(Q::one() / Q::from_integer(difference_index(&parts)))))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultantMultiplicity {
    /// Some subfamily has codim < -1, so the resultant is identically 1.
    pub trivial: bool,
    pub minimal_subset: Option<Vec<usize>>,
    pub d1: BigInt,
    pub d2: BigInt,
    pub multiplicity: BigInt,
}

pub fn resultant_multiplicity(parts: &[PointConfiguration]) -> Result<ResultantMultiplicity> {
    let cc = CayleyConfig::new(parts.to_vec())?;
    let k = cc.k();
    let subsets = cc.subsets();
    if subsets.iter().any(|j| cc.codim(j) < -1) {
        return Ok(ResultantMultiplicity {
            trivial: true,
            minimal_subset: None,
            d1: BigInt::one(),
            d2: BigInt::one(),
            multiplicity: BigInt::zero(),
        });
    }
    if parts.len() != k + 1 {
        return Err(Error::Precondition(format!("{} configurations in dimension {k}", parts.len())));
    }
    // subsets are sorted by size, so the first hit is minimal
    let j0 = subsets.into_iter().find(|j| cc.codim(j) == -1).expect("the whole family has codim -1");
    let mut sum: Vec<Vec<i64>> = vec![vec![0; k]];
    for &j in &j0 {
        let mut next = HashSet::new();
        for s in &sum {
            for a in parts[j].points() {
                next.insert(s.iter().zip(a).map(|(x, y)| x + y).collect::<Vec<i64>>());
            }
        }
        sum = next.into_iter().collect();
        sum.sort();
    }
    let lifted: Vec<Vec<i64>> = sum.iter().map(|p| p.iter().copied().chain([1]).collect()).collect();
    let lz = IntMatrix::from_i64(&lifted, k + 1);
    let d1 = lattice_index(&lz);
    let rest: Vec<usize> = (0..parts.len()).filter(|j| !j0.contains(j)).collect();
    let d2 = if rest.is_empty() {
        BigInt::one()
    } else {
        let chart = quotient_chart(&lz, k + 1, q(1));
        let hulls: Vec<Polytope> = rest
            .iter()
            .map(|&j| {
                let pts: Vec<QVec> = parts[j]
                    .points()
                    .iter()
                    .map(|a| chart.project(&qvec(&a.iter().copied().chain([1]).collect::<Vec<_>>())))
                    .collect();
                Polytope::hull_of(&pts)
            })
            .collect();
        let mv = mixed_volume_lattice(&hulls)?;
        if !mv.is_integer() {
            return Err(Error::Defect(format!("normalized mixed volume {mv} is not an integer")));
        }
        mv.to_integer()
    };
    let multiplicity = &d1 * &d2;
    Ok(ResultantMultiplicity { trivial: false, minimal_subset: Some(j0), d1, d2, multiplicity })
}

#[derive(Clone, Debug)]
pub struct BifurcationFactor {
    pub subset: Vec<usize>,
    /// The faces A'_j for j in `subset`.
    pub faces: Vec<Vec<Vec<i64>>>,
    pub newton: Polytope,
}

#[derive(Clone, Debug)]
pub struct Bifurcation {
    pub factors: Vec<BifurcationFactor>,
    pub newton: Polytope,
}

/// Factors of the bifurcation discriminant: Cayley discriminants of
/// sub-collections of compatible faces passing the dimension filter.
pub fn bifurcation_newton(specs: &[CoefficientSpec], reduced: bool) -> Result<Bifurcation> {
    let (n, _) = check_family(specs)?;
    let m = specs.len();
    let hulls: Vec<Polytope> = specs.iter().map(|s| s.config.hull()).collect();
    let sum = Polytope::sum_all(&hulls)?;
    let mut collections: Vec<Vec<Vec<usize>>> = Vec::new();
    for f in sum.faces() {
        let c: Vec<Vec<usize>> = specs.iter().map(|s| s.config.minimizers(&f.functional)).collect();
        if !collections.contains(&c) {
            collections.push(c);
        }
    }
    let subsets = nonempty_subsets(m);
    let mut seen: HashSet<(Vec<usize>, Vec<Vec<Vec<i64>>>)> = HashSet::new();
    let mut candidates: Vec<(Vec<usize>, Vec<Vec<Vec<i64>>>)> = Vec::new();
    for c in &collections {
        let pts: Vec<Vec<Vec<i64>>> =
            specs.iter().zip(c).map(|(s, idx)| idx.iter().map(|&i| s.config.points()[i].clone()).collect()).collect();
        let dim_of = |j: &[usize]| sum_dim_points(&j.iter().map(|&i| pts[i].as_slice()).collect::<Vec<_>>()) as i64;
        for j0 in &subsets {
            let d0 = dim_of(j0);
            let ok =
                subsets.iter().filter(|j| is_subset(j0, j)).all(|j| dim_of(j) - d0 >= j.len() as i64 - j0.len() as i64);
            if !ok {
                continue;
            }
            let key = (j0.clone(), j0.iter().map(|&i| pts[i].clone()).collect::<Vec<_>>());
            if seen.insert(key.clone()) {
                candidates.push(key);
            }
        }
    }
    let factors: Vec<Option<BifurcationFactor>> = candidates
        .par_iter()
        .map(|(j0, faces)| {
            let sub_specs: Vec<CoefficientSpec> = j0
                .iter()
                .zip(faces)
                .map(|(&j, face)| {
                    let s = &specs[j];
                    let pairs = face.iter().map(|a| (a.clone(), s.coeff(a).expect("face point").clone())).collect();
                    CoefficientSpec::from_pairs(s.k(), pairs)
                })
                .collect::<Result<_>>()?;
            let all: Vec<usize> = (0..sub_specs.len()).collect();
            let newton = newton_discriminant_hypersurface(&cayley_spec(&sub_specs, &all)?, reduced)?;
            // a monomial such as a single coefficient still cuts out a component
            let constant = newton.is_point() && newton.vertices()[0].iter().all(|x| x.is_zero());
            Ok((!constant).then(|| BifurcationFactor { subset: j0.clone(), faces: faces.clone(), newton }))
        })
        .collect::<Result<_>>()?;
    let factors: Vec<BifurcationFactor> = factors.into_iter().flatten().collect();
    let mut newton = Polytope::origin(n);
    for f in &factors {
        newton = newton.sum_unchecked(&f.newton);
    }
    Ok(Bifurcation { factors, newton })
}

/// The exponent d^{Γ̃,Γ}: Γ̃ is the face of the discriminant polytope minimizing
/// `gamma_tilde` ∈ (R^n)*, Γ the face of Δ minimizing `gamma` ∈ (R^{n+k})*.
pub fn leading_exponent(spec: &CoefficientSpec, gamma_tilde: &[Q], gamma: &[Q]) -> Result<BigInt> {
    let n = spec.n;
    let k = spec.k();
    check_dim(n, gamma_tilde.len())?;
    check_dim(n + k, gamma.len())?;
    let delta = spec.assembled();
    let a = &spec.config;
    let table = obstruction_table(a)?;
    let col = table.top_column();

    let gmin = delta.polytope.support(gamma);
    let gamma_face: Vec<QVec> = delta.polytope.argmin(gamma);
    let a_gamma: Vec<Vec<i64>> = (0..a.len())
        .filter(|&i| spec.coeffs[i].support(&gamma[..n]) + dot(&gamma[n..], &qvec(&a.points()[i])) == gmin)
        .map(|i| a.points()[i].clone())
        .collect();

    // faces of Δ minimized by (γ̃, β) are preimages of the faces of the image P
    // under (γ̃, id) minimized by some (1, β)
    let img = delta.height_image(gamma_tilde);
    let lineality_moves_height = img.direction_basis().len() < img.ambient_dim()
        && crate::rational::nullspace(img.direction_basis(), img.ambient_dim()).iter().any(|v| !v[0].is_zero());
    let project = |v: &QVec| {
        let mut w = vec![dot(gamma_tilde, &v[..n])];
        w.extend(v[n..].iter().cloned());
        w
    };
    let mut total = BigInt::zero();
    for f in img.faces() {
        let lower = lineality_moves_height || f.facets.ones().any(|j| img.facets()[j].normal[0].is_positive());
        if !lower {
            continue;
        }
        let on_face = |x: &QVec| {
            let y = project(x);
            f.facets.ones().all(|j| dot(&img.facets()[j].normal, &y) == img.facets()[j].offset)
        };
        if !gamma_face.iter().all(on_face) {
            continue;
        }
        let a_prime: Vec<usize> = (0..a.len())
            .filter(|&i| {
                let ai = qvec(&a.points()[i]);
                spec.coeffs[i].vertices().iter().any(|v| {
                    let mut w = v.clone();
                    w.extend(ai.iter().cloned());
                    on_face(&w)
                })
            })
            .collect();
        let sub = a.subconfig(&a_prime);
        let Some(t) = (0..table.faces.len())
            .filter(|&t| is_subset(&a_prime, &table.faces[t].points))
            .min_by_key(|&t| table.faces[t].points.len())
        else {
            continue;
        };
        if sub.affine_dim() != table.faces[t].dim || col[t].is_zero() {
            continue;
        }
        total += milnor_number_c(&a_gamma, &sub)? * &col[t];
    }
    Ok(total)
}

/// σ_m(t_1, .., t_l) = Σ_{a_i > 0, Σ a_i = m} t_1^a_1 ⋯ t_l^a_l.
pub fn sigma(m: usize, ts: &[Q]) -> Q {
    compositions(m, ts.len())
        .into_iter()
        .map(|a| a.iter().zip(ts).fold(Q::one(), |acc, (&ai, t)| acc * num_traits::pow(t.clone(), ai)))
        .sum()
}

/// The right side of the higher additivity expansion of σ_m(t_0 + t̃_0, t_1, .., t_l).
pub fn higher_additivity_expansion(m: usize, t0: &Q, t0_tilde: &Q, rest: &[Q]) -> Q {
    let args = |a: usize, b: usize| -> Vec<Q> {
        let mut v = vec![t0.clone(); a];
        v.extend(std::iter::repeat_n(t0_tilde.clone(), b));
        v.extend(rest.iter().cloned());
        v
    };
    let mut total = Q::zero();
    let mut mu = 1;
    while 2 * mu - 1 + rest.len() <= m {
        total += sigma(m, &args(mu, mu - 1)) + sigma(m, &args(mu - 1, mu)) + q(2) * sigma(m, &args(mu, mu));
        mu += 1;
    }
    total
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalCounts {
    /// Critical points of the height on f = g = 0.
    pub curve: BigInt,
    /// Critical points of the height on f = 0.
    pub surface: BigInt,
}

/// Critical points of the first coordinate on generic curves f = g = 0 and
/// surfaces f = 0 with Newton polytope `delta` ⊂ R^3.
pub fn critical_points_counts(delta: &Polytope) -> Result<CriticalCounts> {
    if delta.ambient_dim() != 3 || delta.dim() != 3 {
        return Err(Error::InvalidInput("expected a 3-dimensional polytope in R^3".into()));
    }
    if !delta.is_integral() {
        return Err(Error::InvalidInput("expected an integer polytope".into()));
    }
    let config = PointConfiguration::new(3, delta.lattice_points())?;
    let table = obstruction_table(&config)?;
    let col = table.top_column();
    let e_at = |f: &crate::polytope::Face| -> Result<BigInt> {
        let face = ConfigFace { points: config.minimizers(&f.functional), dim: f.dim };
        let t = table.index_of(&face).ok_or_else(|| Error::Defect("face missing from the obstruction table".into()))?;
        Ok(col[t].clone())
    };
    let vertical = unit(3, 0);
    let is_vertical = |f: &crate::polytope::Face| {
        let p = delta.face_polytope(f);
        let mut dirs = p.direction_basis().to_vec();
        dirs.push(vertical.clone());
        rank(&dirs) == f.dim
    };
    let mut areas = Q::zero();
    let mut lengths = Q::zero();
    for f in delta.faces() {
        if (f.dim == 2 || f.dim == 1) && is_vertical(f) {
            let w = Q::from_integer(e_at(f)?) * delta.face_polytope(f).relative_volume();
            if f.dim == 2 {
                areas += w;
            } else {
                lengths += w;
            }
        }
    }
    let vol = delta.volume();
    let curve = q(12) * &vol + q(2) * &areas;
    let surface = q(6) * &vol + q(2) * &areas + &lengths;
    if !curve.is_integer() || !surface.is_integer() {
        return Err(Error::Defect(format!("non-integral critical point counts {curve}, {surface}")));
    }
    Ok(CriticalCounts { curve: curve.to_integer(), surface: surface.to_integer() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::obstruction::degree_a;
    use crate::polytope::{cube, standard_simplex};

    fn cfg(dim: usize, pts: &[&[i64]]) -> PointConfiguration {
        PointConfiguration::new(dim, pts.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    fn line(pts: &[i64]) -> PointConfiguration {
        cfg(1, &pts.iter().map(std::slice::from_ref).collect::<Vec<_>>())
    }

    #[test]
    fn preimages() {
        let spec = CoefficientSpec::universal(line(&[0, 1, 2]));
        let v = face_preimage(&spec, &[vec![0]]).unwrap();
        assert_eq!(v.polytope, Polytope::from_i64(&[vec![1, 0, 0, 0]]));
        assert_eq!(face_preimage(&spec, &[vec![0], vec![1], vec![2]]).unwrap(), spec.assembled());
        assert!(matches!(face_preimage(&spec, &[vec![1]]), Err(Error::NotAFace(_))));
    }

    #[test]
    fn quadratic_discriminant() {
        let spec = CoefficientSpec::universal(line(&[0, 1, 2]));
        let d = newton_discriminant_hypersurface(&spec, false).unwrap();
        assert_eq!(d, Polytope::from_i64(&[vec![0, 2, 0], vec![1, 0, 1]]));
    }

    #[test]
    fn sparse_quadratics() {
        let d = newton_discriminant_hypersurface(&CoefficientSpec::universal(line(&[0, 2])), false).unwrap();
        assert!(d.is_point());
        let spec = CoefficientSpec::universal(line(&[0, 2, 4]));
        let d = newton_discriminant_hypersurface(&spec, false).unwrap();
        assert_eq!(d, Polytope::from_i64(&[vec![0, 4, 0], vec![2, 0, 2]]));
        let r = newton_discriminant_hypersurface(&spec, true).unwrap();
        assert_eq!(r, Polytope::from_i64(&[vec![0, 2, 0], vec![1, 0, 1]]));
    }

    #[test]
    fn cubic_and_triangle() {
        let spec = CoefficientSpec::universal(line(&[0, 1, 2, 3]));
        let d = newton_discriminant_hypersurface(&spec, false).unwrap();
        let ones = vec![q(1); 4];
        assert_eq!(d.support(&ones), q(4));
        // c1²c2² and c0c3 · (...) monomials of the cubic discriminant
        assert!(d.contains(&qvec(&[0, 2, 2, 0])));
        assert!(d.contains(&qvec(&[2, 0, 0, 2])));
        let tri = CoefficientSpec::universal(cfg(2, &[&[0, 0], &[1, 0], &[0, 1]]));
        assert!(newton_discriminant_hypersurface(&tri, false).unwrap().is_point());
    }

    #[test]
    fn degree_matches_minimum_of_total_degree() {
        for a in [line(&[0, 1, 3]), cfg(2, &[&[0, 0], &[1, 0], &[0, 1], &[1, 1]])] {
            let spec = CoefficientSpec::universal(a.clone());
            let d = newton_discriminant_hypersurface(&spec, false).unwrap();
            let ones = vec![q(1); a.len()];
            assert_eq!(d.support(&ones), Q::from_integer(degree_a(&a).unwrap()));
        }
    }

    #[test]
    fn admissibility() {
        let a0 = cfg(2, &[&[0, 0], &[1, 0], &[2, 0]]);
        let a1 = cfg(2, &[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        let adm: Vec<Vec<usize>> = admissible_subsets(&[a0, a1.clone()]).unwrap().into_iter().map(|x| x.0).collect();
        assert_eq!(adm, vec![vec![0], vec![0, 1]]);
        let full: Vec<Vec<usize>> =
            admissible_subsets(&[a1.clone(), a1.clone()]).unwrap().into_iter().map(|x| x.0).collect();
        assert_eq!(full, vec![vec![0, 1]]);
        assert_eq!(admissible_subsets(&[a1]).unwrap().len(), 1);
    }

    #[test]
    fn ci_of_one_equation_is_hypersurface() {
        let spec = CoefficientSpec::universal(line(&[0, 1, 2]));
        assert_eq!(
            newton_ci_discriminant(&[spec.clone()], false).unwrap(),
            newton_discriminant_hypersurface(&spec, false).unwrap()
        );
        let bad = CoefficientSpec::universal_family(&[line(&[0, 1]), line(&[0, 1]), line(&[0, 1])]);
        assert!(newton_ci_discriminant(&bad, false).is_err());
    }

    #[test]
    fn elimination_is_mixed_fiber() {
        let specs = CoefficientSpec::universal_family(&[line(&[0, 1]), line(&[0, 1, 2])]);
        let ci = newton_ci_discriminant(&specs, false).unwrap();
        let mf = crate::fiber::mixed_fiber_polytope(&specs.iter().map(|s| s.assembled()).collect::<Vec<_>>()).unwrap();
        assert_eq!(ci, mf);
        // the resultant of a linear and a quadratic: degree 2 in the first, 1 in the second
        assert_eq!(ci.support(&qvec(&[1, 1, 0, 0, 0])), q(2));
        assert_eq!(ci.support(&qvec(&[0, 0, 1, 1, 1])), q(1));
    }

    #[test]
    fn losung_agrees_with_cayley() {
        let specs = CoefficientSpec::universal_family(&[line(&[0, 1, 2]), line(&[0, 1, 3, 4])]);
        let hp = higher_mixed_fiber(&specs).unwrap();
        assert_eq!(hp, newton_ci_discriminant(&specs, false).unwrap());
        let sq = cfg(2, &[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        let specs = CoefficientSpec::universal_family(&[sq.clone(), sq]);
        let fast = losung_fast_path(&specs).unwrap();
        assert_eq!(fast, newton_ci_discriminant(&specs, true).unwrap());
        assert!(!fast.is_point());
    }

    #[test]
    fn losung_rescales_by_the_difference_lattice() {
        let spec = CoefficientSpec::universal(line(&[0, 2, 4]));
        let fast = losung_fast_path(&[spec.clone()]).unwrap();
        assert_eq!(fast, newton_discriminant_hypersurface(&spec, true).unwrap());
    }

    #[test]
    fn non_analogous_rejected() {
        let specs = CoefficientSpec::universal_family(&[
            cfg(2, &[&[0, 0], &[1, 0], &[0, 1]]),
            cfg(2, &[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]),
        ]);
        assert!(matches!(higher_mixed_fiber(&specs), Err(Error::NotAnalogous(_))));
        // same fan, different links at the origin
        let specs = CoefficientSpec::universal_family(&[line(&[0, 1, 2]), line(&[0, 2])]);
        assert!(matches!(higher_mixed_fiber(&specs), Err(Error::NotAnalogous(_))));
    }

    #[test]
    fn higher_mixed_fiber_vanishes_above_dimension() {
        let specs = CoefficientSpec::universal_family(&[line(&[0, 1]), line(&[0, 1]), line(&[0, 1])]);
        assert!(higher_mixed_fiber(&specs).unwrap().is_point());
    }

    #[test]
    fn resultant_multiplicities() {
        let r = resultant_multiplicity(&[line(&[0, 1]), line(&[0, 1])]).unwrap();
        assert_eq!(r.multiplicity, BigInt::one());
        let r = resultant_multiplicity(&[line(&[0, 2]), line(&[0, 2])]).unwrap();
        assert_eq!((r.d1.clone(), r.d2.clone(), r.multiplicity.clone()), (2.into(), 1.into(), 2.into()));
        let r = resultant_multiplicity(&[line(&[0]), line(&[0]), line(&[0, 1])]).unwrap();
        assert!(r.trivial);
        // J0 = {0}: a constant-free first equation forces d2 from the rest
        let r = resultant_multiplicity(&[line(&[0]), line(&[0, 3])]).unwrap();
        assert_eq!(r.minimal_subset, Some(vec![0]));
        assert_eq!(r.multiplicity, BigInt::from(3));
    }

    #[test]
    fn five_bifurcation_components() {
        let a0 = cfg(2, &[&[0, 0], &[1, 0], &[2, 0]]);
        let a1 = cfg(2, &[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        let specs = CoefficientSpec::universal_family(&[a0, a1]);
        let b = bifurcation_newton(&specs, true).unwrap();
        assert_eq!(b.factors.len(), 5, "{:?}", b.factors.iter().map(|f| (&f.subset, &f.faces)).collect::<Vec<_>>());
    }

    #[test]
    fn leading_exponents_of_the_quadratic() {
        let spec = CoefficientSpec::universal(line(&[0, 1, 2]));
        let whole = leading_exponent(&spec, &qvec(&[0, 0, 0]), &qvec(&[0, 0, 0, 0])).unwrap();
        assert_eq!(whole, BigInt::one());
        // the truncation at the vertex (1,0,1) is -4·c0·c2; the edge over {0, 2}
        // has a constant discriminant
        let gt = qvec(&[0, 1, 0]);
        let d = |g: &[i64]| leading_exponent(&spec, &gt, &qvec(g)).unwrap();
        assert_eq!(d(&[0, 1, 1, 0]), BigInt::one());
        assert_eq!(d(&[1, 1, 0, 0]), BigInt::one());
        assert_eq!(d(&[1, 0, 1, 0]), BigInt::zero());
        assert_eq!(d(&[0, 1, 0, 0]), BigInt::one());
    }

    #[test]
    fn higher_additivity() {
        let (t0, tt, t1) = (q(2), crate::rational::qf(1, 3), q(-5));
        for m in 2..7 {
            let lhs = sigma(m, &[&t0 + &tt, t1.clone()]);
            assert_eq!(lhs, higher_additivity_expansion(m, &t0, &tt, std::slice::from_ref(&t1)), "m = {m}");
        }
        assert_eq!(sigma(3, &[q(1), q(1)]), q(2));
    }

    #[test]
    fn critical_points() {
        let s = critical_points_counts(&standard_simplex(3)).unwrap();
        assert_eq!((s.curve, s.surface), (0.into(), 0.into()));
        let c = critical_points_counts(&cube(3, 1)).unwrap();
        assert_eq!((c.curve.clone(), c.surface.clone()), (4.into(), 2.into()));
        let moved = cube(3, 1).translate(&qvec(&[2, -1, 5]));
        assert_eq!(critical_points_counts(&moved).unwrap(), c);
        assert!(critical_points_counts(&cube(2, 1)).is_err());
    }
}
