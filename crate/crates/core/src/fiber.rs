//! Fiber polytopes through chamber complexes, mixed fiber polytopes by
//! polarization, and the shadow-volume formula for their support function.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{check_dim, Error, Result};
use crate::lattice::LatticeFrame;
use crate::polytope::Polytope;
use crate::rational::{binomial, centroid, dot, factorial, nullspace, primitive_integer, q, solve, sub, to_q, QVec, Q};
use crate::volume::{compositions, shadow_volume};

/// A polytope in R^n ⊕ R^k; the last k coordinates are the base.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitPolytope {
    pub n: usize,
    pub k: usize,
    pub polytope: Polytope,
    base: Polytope,
}

impl SplitPolytope {
    pub fn new(n: usize, k: usize, polytope: Polytope) -> Result<Self> {
        check_dim(n + k, polytope.ambient_dim())?;
        let base = polytope.project(&(n..n + k).collect::<Vec<_>>());
        Ok(SplitPolytope { n, k, polytope, base })
    }

    /// `fiber × base` for polytopes in R^n and R^k.
    pub fn product(fiber: &Polytope, base: &Polytope) -> Self {
        let n = fiber.ambient_dim();
        let k = base.ambient_dim();
        SplitPolytope::new(n, k, fiber.product(base)).expect("dimensions add up")
    }

    /// Image q(Δ) in the base.
    pub fn base(&self) -> &Polytope {
        &self.base
    }

    pub fn fiber_part(&self, x: &[Q]) -> QVec {
        x[..self.n].to_vec()
    }

    pub fn sum(&self, other: &SplitPolytope) -> Result<SplitPolytope> {
        if self.n != other.n || self.k != other.k {
            return Err(Error::DimensionMismatch { expected: self.n + self.k, got: other.n + other.k });
        }
        SplitPolytope::new(self.n, self.k, self.polytope.minkowski_sum(&other.polytope)?)
    }

    pub fn scale(&self, c: &Q) -> SplitPolytope {
        SplitPolytope::new(self.n, self.k, self.polytope.scale(c)).expect("same split")
    }

    /// Image under (γ, id): R^n ⊕ R^k → R ⊕ R^k.
    pub fn height_image(&self, gamma: &[Q]) -> Polytope {
        self.polytope.map_points(|v| {
            let mut w = vec![dot(gamma, &v[..self.n])];
            w.extend(v[self.n..].iter().cloned());
            w
        })
    }
}

#[derive(Clone, Debug)]
pub struct Chamber {
    /// Chamber in base coordinates R^k.
    pub polytope: Polytope,
    pub barycenter: QVec,
    /// (1 + dim S)! times Lebesgue measure on the lattice of the span S.
    pub volume: Q,
}

#[derive(Clone, Debug)]
pub struct ChamberComplex {
    pub chambers: Vec<Chamber>,
}

/// Hyperplane h·y = c in frame coordinates, normalized for deduplication.
fn wall(points: &[QVec], s: usize) -> Option<(QVec, Q)> {
    let diffs: Vec<QVec> = points[1..].iter().map(|p| sub(p, &points[0])).collect();
    let ns = nullspace(&diffs, s);
    if ns.len() != 1 {
        return None;
    }
    let mut h = to_q(&primitive_integer(&ns[0]));
    if h.iter().find(|x| !x.is_zero()).is_some_and(|x| *x < Q::zero()) {
        h = crate::rational::neg(&h);
    }
    let c = dot(&h, &points[0]);
    Some((h, c))
}

fn split_cell(cell: &Polytope, h: &[Q], c: &Q) -> Vec<Polytope> {
    let vals: Vec<Q> = cell.vertices().iter().map(|v| dot(h, v) - c).collect();
    let has_pos = vals.iter().any(|x| *x > Q::zero());
    let has_neg = vals.iter().any(|x| *x < Q::zero());
    if !(has_pos && has_neg) {
        return vec![cell.clone()];
    }
    let mut cut = Vec::new();
    for (i, a) in cell.vertices().iter().enumerate() {
        for (j, b) in cell.vertices().iter().enumerate() {
            if vals[i] > Q::zero() && vals[j] < Q::zero() {
                let t = &vals[i] / (&vals[i] - &vals[j]);
                cut.push(a.iter().zip(b).map(|(x, y)| x + &t * (y - x)).collect::<QVec>());
            }
        }
    }
    let mut out = Vec::new();
    for side in [1, -1] {
        let mut pts = cut.clone();
        for (v, x) in cell.vertices().iter().zip(&vals) {
            let keep = if side == 1 { *x >= Q::zero() } else { *x <= Q::zero() };
            if keep {
                pts.push(v.clone());
            }
        }
        out.push(Polytope::hull_of(&pts));
    }
    out
}

/// Center of mass of a full-dimensional polytope; the fiber map is affine on
/// a chamber, so its integral is the volume times the value here.
fn mass_centroid(cell: &Polytope) -> QVec {
    let vs = cell.vertices();
    let mut total = Q::zero();
    let mut acc = vec![Q::zero(); cell.ambient_dim()];
    for simplex in cell.triangulation() {
        let p0 = &vs[simplex[0]];
        let rows: Vec<QVec> = simplex[1..].iter().map(|&i| sub(&vs[i], p0)).collect();
        let w = crate::rational::abs(&crate::rational::det(&rows));
        let c = centroid(&simplex.iter().map(|&i| vs[i].clone()).collect::<Vec<_>>());
        for (a, x) in acc.iter_mut().zip(&c) {
            *a += &w * x;
        }
        total += w;
    }
    acc.iter().map(|a| a / &total).collect()
}

pub fn chamber_complex(d: &SplitPolytope) -> ChamberComplex {
    let base = d.base();
    let s = base.dim();
    if s == 0 {
        return ChamberComplex {
            chambers: vec![Chamber {
                polytope: base.clone(),
                barycenter: base.vertices()[0].clone(),
                volume: Q::one(),
            }],
        };
    }
    let frame = LatticeFrame::new(base.vertices()[0].clone(), base.direction_basis());
    let qcoords = |v: &QVec| frame.coords(&v[d.n..]);

    let mut walls: Vec<(QVec, Q)> = Vec::new();
    for f in d.polytope.faces() {
        let imgs: Vec<QVec> = f.vertices.iter().map(|&i| qcoords(&d.polytope.vertices()[i])).collect();
        if let Some(w) = wall(&imgs, s) {
            if !walls.contains(&w) {
                walls.push(w);
            }
        }
    }
    walls.sort();

    let mut cells = vec![base.map_points(|v| frame.coords(v))];
    for (h, c) in &walls {
        cells = cells.iter().flat_map(|cell| split_cell(cell, h, c)).collect();
    }
    let weight = q(s as i64 + 1);
    let mut chambers: Vec<Chamber> = cells
        .into_iter()
        .map(|cell| {
            let volume = cell.lattice_volume() * &weight;
            let barycenter = frame.point(&mass_centroid(&cell));
            let polytope = cell.map_points(|v| frame.point(v));
            Chamber { polytope, barycenter, volume }
        })
        .collect();
    chambers.sort_by(|a, b| a.barycenter.cmp(&b.barycenter));
    ChamberComplex { chambers }
}

/// Faces G with dim G = dim q(G) = dim q(Δ), each given by a base point and
/// direction vectors, ready for solving q(y) = x.
struct Sections {
    faces: Vec<(Polytope, QVec, Vec<QVec>)>,
}

impl Sections {
    fn new(d: &SplitPolytope) -> Self {
        let s = d.base().dim();
        let mut faces = Vec::new();
        for f in d.polytope.faces() {
            if f.dim != s {
                continue;
            }
            let g = d.polytope.face_polytope(f);
            let g0 = g.vertices()[0].clone();
            let dirs: Vec<QVec> = g.vertices()[1..].iter().map(|v| sub(v, &g0)).collect();
            let qdirs: Vec<QVec> = dirs.iter().map(|v| v[d.n..].to_vec()).collect();
            if crate::rational::rank(&qdirs) == s {
                let basis = g.direction_basis().to_vec();
                faces.push((g, g0, basis));
            }
        }
        Sections { faces }
    }

    /// Vertices of the fiber over a generic base point `x`, projected to R^n.
    fn fiber(&self, d: &SplitPolytope, x: &[Q]) -> Polytope {
        let mut pts = Vec::new();
        for (g, g0, basis) in &self.faces {
            // y = g0 + Σ t_j basis_j with q(y) = x
            let rows: Vec<QVec> = (0..d.k).map(|i| basis.iter().map(|b| b[d.n + i].clone()).collect()).collect();
            let rhs: QVec = (0..d.k).map(|i| &x[i] - &g0[d.n + i]).collect();
            let Some(t) = solve(&rows, &rhs) else { continue };
            let mut y = g0.clone();
            for (tj, bj) in t.iter().zip(basis) {
                for (yi, bi) in y.iter_mut().zip(bj) {
                    *yi += tj * bi;
                }
            }
            if g.contains_affine(&y) {
                pts.push(y[..d.n].to_vec());
            }
        }
        Polytope::hull_of(&pts)
    }
}

/// The fiber polytope, with chamber weights (1 + dim S)! × Lebesgue, summed
/// chamber by chamber. Slow when the chamber complex is large; kept as the
/// reference construction.
pub fn fiber_polytope_by_chambers(d: &SplitPolytope) -> Polytope {
    if d.base().dim() == 0 {
        return d.polytope.project(&(0..d.n).collect::<Vec<_>>());
    }
    let cc = chamber_complex(d);
    let sections = Sections::new(d);
    let parts: Vec<Polytope> =
        cc.chambers.par_iter().map(|ch| sections.fiber(d, &ch.barycenter).scale(&ch.volume)).collect();
    Polytope::sum_all(&parts).expect("fibers share the ambient space")
}

/// The fiber polytope, rebuilt from its vertices in tight directions.
pub fn fiber_polytope(d: &SplitPolytope) -> Polytope {
    if d.base().dim() == 0 {
        return d.polytope.project(&(0..d.n).collect::<Vec<_>>());
    }
    let ds = std::slice::from_ref(d);
    Envelope::new(ds, vec![(Q::one(), vec![1])]).reconstruct().unwrap_or_else(|_| fiber_polytope_by_chambers(d))
}

/// Σ_j coef_j Σ(Σ_i c_ji Δ_i): a signed combination of fiber polytopes of
/// nonnegative integer combinations of split polytopes with a common base span.
struct Envelope<'a> {
    n: usize,
    s: usize,
    ds: &'a [SplitPolytope],
    /// Per summand, per vertex: linear base coordinates in a lattice frame.
    base: Vec<Vec<QVec>>,
    terms: Vec<(Q, Vec<usize>)>,
}

impl<'a> Envelope<'a> {
    fn new(ds: &'a [SplitPolytope], terms: Vec<(Q, Vec<usize>)>) -> Self {
        let n = ds[0].n;
        let origin =
            ds.iter().fold(vec![Q::zero(); ds[0].k], |acc, d| crate::rational::add(&acc, &d.base().vertices()[0]));
        let dirs: Vec<QVec> = ds.iter().flat_map(|d| d.base().direction_basis().to_vec()).collect();
        let frame = LatticeFrame::new(origin, &dirs);
        let zero = frame.coords(&vec![Q::zero(); ds[0].k]);
        let base: Vec<Vec<QVec>> = ds
            .iter()
            .map(|d| d.polytope.vertices().iter().map(|v| sub(&frame.coords(&v[n..]), &zero)).collect())
            .collect();
        Envelope { n, s: frame.rank, ds, base, terms }
    }

    /// Vertices of the lower hull of points in R^s ⊕ R (all of them when the
    /// hull is not full-dimensional), and the lower facet normals.
    fn lower(&self, pts: &[QVec]) -> (Vec<QVec>, Vec<QVec>) {
        let s = self.s;
        let h = Polytope::hull_of(pts);
        if h.dim() < s + 1 {
            // a non-vertical hyperplane piece is its own lower facet
            let mut normals = Vec::new();
            if h.dim() == s {
                let nu = nullspace(h.direction_basis(), s + 1).remove(0);
                if !nu[s].is_zero() {
                    normals.push(nu.iter().map(|x| x / &nu[s]).collect());
                }
            }
            return (h.vertices().to_vec(), normals);
        }
        let mut keep = fixedbitset::FixedBitSet::with_capacity(h.vertices().len());
        let mut normals = Vec::new();
        for f in h.facets().iter().filter(|f| f.normal[s] > Q::zero()) {
            keep.union_with(&f.vertices);
            normals.push(f.normal.clone());
        }
        (keep.ones().map(|i| h.vertices()[i].clone()).collect(), normals)
    }

    /// Inner normals of the lower cells of the lifted polytopes (b, γ·p).
    fn lower_normals(&self, heights: &[Vec<Q>]) -> Vec<QVec> {
        let s = self.s;
        // lower vertices of a Minkowski sum are sums of lower vertices
        let mut acc: Vec<QVec> = vec![vec![Q::zero(); s + 1]];
        let mut normals = Vec::new();
        for (b, h) in self.base.iter().zip(heights) {
            let lifted: Vec<QVec> = b
                .iter()
                .zip(h)
                .map(|(x, y)| {
                    let mut w = x.clone();
                    w.push(y.clone());
                    w
                })
                .collect();
            let (low, _) = self.lower(&lifted);
            let sums: Vec<QVec> =
                acc.iter().flat_map(|a| low.iter().map(move |x| crate::rational::add(a, x))).collect();
            (acc, normals) = self.lower(&sums);
        }
        // a term whose heights are affine is a single cell with its own normal
        let mut supports: Vec<Vec<usize>> =
            self.terms.iter().map(|(_, cs)| (0..cs.len()).filter(|&i| cs[i] > 0).collect()).collect();
        supports.sort();
        supports.dedup();
        for support in supports {
            let m = support.len();
            let mut rows = Vec::new();
            for (slot, &i) in support.iter().enumerate() {
                for (x, y) in self.base[i].iter().zip(&heights[i]) {
                    let mut r = x.clone();
                    r.extend((0..m).map(|t| if t == slot { Q::one() } else { Q::zero() }));
                    r.push(y.clone());
                    rows.push(r);
                }
            }
            if let Some(v) = nullspace(&rows, s + m + 1).into_iter().find(|v| !v[s + m].is_zero()) {
                let mut normal: QVec = v[..s].iter().map(|x| x / &v[s + m]).collect();
                normal.push(Q::one());
                if !normals.contains(&normal) {
                    normals.push(normal);
                }
            }
        }
        normals
    }

    /// Value and, when the section is unique for every term, the vertex.
    /// Each term contributes (1 + s)! times the integral of a section running
    /// along the lower envelope of the heights γ·p over its base.
    fn probe(&self, gamma: &[Q]) -> (Q, Option<QVec>) {
        let (n, s) = (self.n, self.s);
        let heights: Vec<Vec<Q>> =
            self.ds.iter().map(|d| d.polytope.vertices().iter().map(|v| dot(gamma, &v[..n])).collect()).collect();
        let normals = self.lower_normals(&heights);
        // per normal and summand, the vertices minimizing it
        let faces: Vec<Vec<Vec<usize>>> = normals
            .iter()
            .map(|nu| {
                self.base
                    .iter()
                    .zip(&heights)
                    .map(|(b, h)| {
                        let vals: Vec<Q> = b.iter().zip(h).map(|(x, y)| dot(&nu[..s], x) + &nu[s] * y).collect();
                        let lo = vals.iter().min().expect("nonempty");
                        (0..vals.len()).filter(|&j| vals[j] == *lo).collect()
                    })
                    .collect()
            })
            .collect();
        let mut point = vec![Q::zero(); n];
        let mut tight = true;
        for (coef, counts) in &self.terms {
            let mut seen: Vec<Vec<&Vec<usize>>> = Vec::new();
            let mut acc = vec![Q::zero(); n];
            for f in &faces {
                let key: Vec<&Vec<usize>> = counts.iter().zip(f).filter(|(&c, _)| c > 0).map(|(_, x)| x).collect();
                if seen.contains(&key) {
                    continue;
                }
                // the cell Σ c_i F_i as points (base coords, fiber part)
                let mut cell: Vec<(QVec, QVec)> = vec![(vec![Q::zero(); s], vec![Q::zero(); n])];
                for (i, (&c, fi)) in counts.iter().zip(f).enumerate() {
                    if c == 0 {
                        continue;
                    }
                    let c = &q(c as i64);
                    let verts = self.ds[i].polytope.vertices();
                    cell = cell
                        .iter()
                        .flat_map(|(b, p)| {
                            fi.iter().map(move |&j| {
                                let b: QVec = b.iter().zip(&self.base[i][j]).map(|(x, y)| x + c * y).collect();
                                let p: QVec = p.iter().zip(&verts[j][..n]).map(|(x, y)| x + c * y).collect();
                                (b, p)
                            })
                        })
                        .collect();
                }
                cell.sort();
                cell.dedup();
                let bdirs: Vec<QVec> = cell[1..].iter().map(|(b, _)| sub(b, &cell[0].0)).collect();
                if crate::rational::rank(&bdirs) < s {
                    continue;
                }
                seen.push(key);
                // the section is unique when the face maps injectively to its base
                let dirs: Vec<QVec> = cell[1..]
                    .iter()
                    .map(|(b, p)| {
                        let mut d = sub(b, &cell[0].0);
                        d.extend(sub(p, &cell[0].1));
                        d
                    })
                    .collect();
                tight &= crate::rational::rank(&dirs) == s;
                // any point over each base point: they share the envelope height
                cell.dedup_by(|a, b| a.0 == b.0);
                let mut add_simplex = |idx: &[usize]| {
                    let rows: Vec<QVec> = idx[1..].iter().map(|&i| sub(&cell[i].0, &cell[idx[0]].0)).collect();
                    let w = crate::rational::abs(&crate::rational::det(&rows));
                    for &i in idx {
                        for (a, x) in acc.iter_mut().zip(&cell[i].1) {
                            *a += &w * x;
                        }
                    }
                };
                if cell.len() == s + 1 {
                    add_simplex(&(0..=s).collect::<Vec<_>>());
                } else {
                    let shadow = Polytope::hull_of(&cell.iter().map(|(b, _)| b.clone()).collect::<Vec<_>>());
                    let at = |b: &QVec| cell.binary_search_by(|(x, _)| x.cmp(b)).expect("base point of the cell");
                    for simplex in shadow.triangulation() {
                        let idx: Vec<usize> = simplex.iter().map(|&j| at(&shadow.vertices()[j])).collect();
                        add_simplex(&idx);
                    }
                }
            }
            for (a, x) in point.iter_mut().zip(&acc) {
                *a += coef * x;
            }
        }
        (dot(gamma, &point), tight.then_some(point))
    }

    /// A vertex on the face minimizing `a`, found in a tight direction close to `a`.
    fn vertex_toward(&self, a: &[Q], value: &Q, rng: &mut ChaCha8Rng) -> Result<QVec> {
        let ai = to_q(&primitive_integer(a));
        let mut m = Q::from_integer(16.into());
        for _ in 0..48 {
            let g: QVec = ai.iter().map(|x| x * &m + q(rng.random_range(-8..=8))).collect();
            if let (_, Some(v)) = self.probe(&g) {
                if dot(a, &v) == *value {
                    return Ok(v);
                }
            }
            m *= Q::from_integer(4.into());
        }
        Err(Error::Defect("no tight direction found near a facet normal".into()))
    }

    /// The hull, from the support function and vertices in tight directions:
    /// points are added beyond unconfirmed facets until every facet supports.
    fn reconstruct(&self) -> Result<Polytope> {
        let n = self.n;
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let probe_vertex = |a: &[Q], rng: &mut ChaCha8Rng| -> Result<(Q, QVec)> {
            match self.probe(a) {
                (value, Some(v)) => Ok((value, v)),
                (value, None) => Ok((value.clone(), self.vertex_toward(a, &value, rng)?)),
            }
        };
        let start: QVec = (0..n).map(|_| q(rng.random_range(-1000..=1000))).collect();
        let mut pts = vec![probe_vertex(&start, &mut rng)?.1];
        let mut equations: Vec<QVec> = Vec::new();
        loop {
            let mut rows: Vec<QVec> = pts.iter().map(|p| sub(p, &pts[0])).collect();
            rows.extend(equations.iter().cloned());
            let Some(l) = nullspace(&rows, n).into_iter().next() else { break };
            let c = dot(&l, &pts[0]);
            let (lo, v) = self.probe(&l);
            if lo < c {
                pts.push(match v {
                    Some(v) => v,
                    None => self.vertex_toward(&l, &lo, &mut rng)?,
                });
                continue;
            }
            let nl = crate::rational::neg(&l);
            let (hi, v) = self.probe(&nl);
            if hi < -c {
                pts.push(match v {
                    Some(v) => v,
                    None => self.vertex_toward(&nl, &hi, &mut rng)?,
                });
            } else {
                equations.push(l);
            }
        }
        let mut confirmed: std::collections::HashSet<QVec> = std::collections::HashSet::new();
        loop {
            let h = Polytope::hull_of(&pts);
            let mut fresh = Vec::new();
            for f in h.facets() {
                if confirmed.contains(&f.normal) {
                    continue;
                }
                let (value, v) = self.probe(&f.normal);
                if value < f.offset {
                    fresh.push(match v {
                        Some(v) => v,
                        None => self.vertex_toward(&f.normal, &value, &mut rng)?,
                    });
                } else {
                    confirmed.insert(f.normal.clone());
                }
            }
            if fresh.is_empty() {
                return Ok(h);
            }
            pts = h.vertices().to_vec();
            pts.extend(fresh);
        }
    }
}

/// Dimension of the base of Σ Δ_i, read off the direction spaces.
fn joint_base_dim(ds: &[&SplitPolytope]) -> usize {
    let dirs: Vec<QVec> = ds.iter().flat_map(|d| d.base().direction_basis().to_vec()).collect();
    crate::rational::rank(&dirs)
}

fn check_split(ds: &[SplitPolytope]) -> Result<(usize, usize)> {
    let Some(first) = ds.first() else {
        return Err(Error::InvalidInput("no split polytopes".into()));
    };
    for d in ds {
        if d.n != first.n || d.k != first.k {
            return Err(Error::DimensionMismatch { expected: first.n + first.k, got: d.n + d.k });
        }
    }
    Ok((first.n, first.k))
}

/// Mixed fiber polytope MF(Δ_0^{a_0}, .., Δ_p^{a_p}) of r = Σ a_i arguments
/// whose joint base has dimension r - 1; it is {0} when that dimension is smaller.
pub fn mixed_fiber_monomial(args: &[(SplitPolytope, usize)]) -> Result<Polytope> {
    let ds: Vec<SplitPolytope> = args.iter().map(|(d, _)| d.clone()).collect();
    let (n, _) = check_split(&ds)?;
    let r: usize = args.iter().map(|(_, a)| a).sum();
    let l = joint_base_dim(&ds.iter().collect::<Vec<_>>());
    if l + 1 < r {
        return Ok(Polytope::origin(n));
    }
    if l + 1 > r {
        return Err(Error::Precondition(format!("{r} arguments over a base of dimension {l}")));
    }
    if ds.iter().all(|d| d.polytope == ds[0].polytope) {
        return Ok(fiber_polytope(&ds[0]));
    }
    let mut terms: Vec<(Q, Vec<usize>)> = Vec::new();
    let mut counts = vec![0usize; args.len()];
    loop {
        // odometer over 0 <= c_i <= a_i
        let mut i = 0;
        while i < args.len() && counts[i] == args[i].1 {
            counts[i] = 0;
            i += 1;
        }
        if i == args.len() {
            break;
        }
        counts[i] += 1;
        let size: usize = counts.iter().sum();
        let mut coef = Q::from_integer(
            counts.iter().zip(args).fold(num_bigint::BigInt::one(), |acc, (&c, (_, a))| acc * binomial(*a, c)),
        );
        if (r - size) % 2 == 1 {
            coef = -coef;
        }
        terms.push((coef, counts.clone()));
    }
    let norm = Q::one() / Q::from_integer(factorial(r));
    let kept: Vec<(Q, Vec<usize>)> = terms
        .into_iter()
        // sums over a smaller base contribute the origin
        .filter(|(_, cs)| {
            joint_base_dim(&cs.iter().zip(&ds).filter(|(&c, _)| c > 0).map(|(_, d)| d).collect::<Vec<_>>()) == l
        })
        .map(|(coef, cs)| (coef * &norm, cs))
        .collect();
    Envelope::new(&ds, kept).reconstruct()
}

/// MF(Δ_0, .., Δ_k) for k + 1 polytopes over a k-dimensional base.
pub fn mixed_fiber_polytope(ds: &[SplitPolytope]) -> Result<Polytope> {
    let (_, k) = check_split(ds)?;
    if ds.len() != k + 1 {
        return Err(Error::InvalidInput(format!("expected {} split polytopes, got {}", k + 1, ds.len())));
    }
    let args: Vec<(SplitPolytope, usize)> = ds.iter().map(|d| (d.clone(), 1)).collect();
    mixed_fiber_monomial(&args)
}

/// The prism hull of Δ_i × {e_i} in R^n ⊕ R^k ⊕ R^l (e_0 = 0), split over R^{k+l}.
pub fn split_prism(ds: &[SplitPolytope]) -> Result<SplitPolytope> {
    let (n, k) = check_split(ds)?;
    let l = ds.len() - 1;
    let mut pts = Vec::new();
    for (i, d) in ds.iter().enumerate() {
        for v in d.polytope.vertices() {
            let mut w = v.clone();
            w.extend((1..=l).map(|j| if j == i { Q::one() } else { Q::zero() }));
            pts.push(w);
        }
    }
    SplitPolytope::new(n, k + l, Polytope::hull_of(&pts))
}

/// The two sides of the prism identity: MF of k + l + 1 copies of the prism,
/// and Σ_{a_i >= 0, Σ a_i = k + 1} Δ_0^a_0 ⋯ Δ_l^a_l.
pub fn prism_fiber_sides(ds: &[SplitPolytope]) -> Result<(Polytope, Polytope)> {
    let (n, k) = check_split(ds)?;
    let l = ds.len() - 1;
    let prism = split_prism(ds)?;
    let lhs = mixed_fiber_monomial(&[(prism, k + l + 1)])?;
    let mut rhs = Polytope::origin(n);
    for a in compositions(k + 1 + ds.len(), ds.len()) {
        let args: Vec<(SplitPolytope, usize)> =
            a.iter().zip(ds).filter(|(&ai, _)| ai > 1).map(|(&ai, d)| (d.clone(), ai - 1)).collect();
        rhs = rhs.sum_unchecked(&mixed_fiber_monomial(&args)?);
    }
    Ok((lhs, rhs))
}

/// Minimum of `gamma` over MF(ds), computed from shadow volumes of the
/// height images alone.
pub fn mf_support_oracle(ds: &[SplitPolytope], gamma: &[Q]) -> Result<Q> {
    let (n, _) = check_split(ds)?;
    check_dim(n, gamma.len())?;
    let neg = crate::rational::neg(gamma);
    let imgs: Vec<Polytope> = ds.iter().map(|d| d.height_image(&neg)).collect();
    let p = imgs.len();
    let mut total = Q::zero();
    for mask in 1usize..1 << p {
        let s = shadow_volume(&crate::volume::subset_sum(&imgs, mask), &Q::one());
        if (p - mask.count_ones() as usize) % 2 == 0 {
            total += s;
        } else {
            total -= s;
        }
    }
    Ok(-total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::cube;
    use crate::polytope::VirtualPolytope;
    use crate::rational::qvec;

    fn triangle() -> SplitPolytope {
        SplitPolytope::new(3, 1, Polytope::from_i64(&[vec![1, 0, 0, 0], vec![0, 1, 0, 1], vec![0, 0, 1, 2]])).unwrap()
    }

    fn unit(n: usize) -> Polytope {
        cube(n, 1)
    }

    #[test]
    fn prism_of_two_splits() {
        let a = SplitPolytope::new(1, 1, Polytope::from_i64(&[vec![0, 0], vec![2, 0], vec![0, 1]])).unwrap();
        let b =
            SplitPolytope::new(1, 1, Polytope::from_i64(&[vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 1]])).unwrap();
        let (lhs, rhs) = prism_fiber_sides(&[a, b]).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn chambers_of_triangle() {
        let cc = chamber_complex(&triangle());
        assert_eq!(cc.chambers.len(), 2);
        for ch in &cc.chambers {
            assert_eq!(ch.volume, q(2));
        }
        assert_eq!(cc.chambers[0].barycenter, vec![crate::rational::qf(1, 2)]);
    }

    #[test]
    fn product_has_one_chamber() {
        let d = SplitPolytope::product(&unit(2), &Polytope::from_i64(&[vec![0], vec![3]]));
        assert_eq!(chamber_complex(&d).chambers.len(), 1);
        let pt = SplitPolytope::product(&unit(1), &Polytope::from_i64(&[vec![4, 4]]));
        let cc = chamber_complex(&pt);
        assert_eq!(cc.chambers.len(), 1);
        assert_eq!(cc.chambers[0].volume, q(1));
    }

    #[test]
    fn fiber_examples() {
        let d = SplitPolytope::product(&unit(1), &unit(1));
        assert_eq!(fiber_polytope(&d), Polytope::from_i64(&[vec![0], vec![2]]));
        assert_eq!(fiber_polytope(&triangle()), Polytope::from_i64(&[vec![1, 2, 1], vec![2, 0, 2]]));
        let v = SplitPolytope::new(2, 1, Polytope::from_i64(&[vec![3, 1, 5]])).unwrap();
        assert_eq!(fiber_polytope(&v), Polytope::from_i64(&[vec![3, 1]]));
    }

    /// Polarization over chamber-built fiber polytopes.
    fn mf_by_chambers(ds: &[SplitPolytope]) -> Polytope {
        let r = ds.len();
        let mut v = VirtualPolytope::zero(ds[0].n);
        for mask in 1usize..1 << r {
            let parts: Vec<&SplitPolytope> = (0..r).filter(|i| mask >> i & 1 == 1).map(|i| &ds[i]).collect();
            if joint_base_dim(&parts) + 1 < r {
                continue;
            }
            let mut x = parts[0].clone();
            for d in &parts[1..] {
                x = x.sum(d).unwrap();
            }
            let sign = if (r - parts.len()) % 2 == 0 { Q::one() } else { -Q::one() };
            v.add_term(sign / Q::from_integer(factorial(r)), &fiber_polytope_by_chambers(&x)).unwrap();
        }
        v.realize().unwrap()
    }

    #[test]
    fn mixed_envelopes_agree_with_chambers() {
        let a = SplitPolytope::new(1, 1, Polytope::from_i64(&[vec![0, 2], vec![2, 0], vec![3, 1]])).unwrap();
        let b = SplitPolytope::new(1, 1, Polytope::from_i64(&[vec![2, 2], vec![3, 1], vec![3, 2]])).unwrap();
        for d in [&a, &b] {
            assert_eq!(fiber_polytope(d), fiber_polytope_by_chambers(d));
        }
        let ab = a.sum(&b).unwrap();
        assert_eq!(fiber_polytope(&ab), fiber_polytope_by_chambers(&ab));
        assert_eq!(mixed_fiber_polytope(&[a.clone(), b.clone()]).unwrap(), mf_by_chambers(&[a, b]));
    }

    #[test]
    fn envelopes_agree_with_chambers() {
        let cases = [
            SplitPolytope::new(
                1,
                2,
                Polytope::from_i64(&[vec![0, 0, 0], vec![2, 1, 0], vec![1, 0, 2], vec![3, 2, 2], vec![0, 1, 1]]),
            ),
            SplitPolytope::new(
                2,
                1,
                Polytope::from_i64(&[vec![0, 0, 0], vec![1, 2, 0], vec![2, 0, 1], vec![0, 1, 3], vec![1, 1, 2]]),
            ),
            SplitPolytope::new(2, 2, cube(4, 1)),
            SplitPolytope::new(1, 2, Polytope::from_i64(&[vec![0, 0, 0], vec![1, 1, 1], vec![2, 2, 2], vec![0, 2, 2]])),
        ];
        for d in cases {
            let d = d.unwrap();
            assert_eq!(fiber_polytope(&d), fiber_polytope_by_chambers(&d));
        }
        assert_eq!(fiber_polytope(&triangle()), fiber_polytope_by_chambers(&triangle()));
    }

    #[test]
    fn mixed_fiber_examples() {
        let t = triangle();
        assert_eq!(mixed_fiber_polytope(&[t.clone(), t.clone()]).unwrap(), fiber_polytope(&t));
        let sq = SplitPolytope::product(&unit(1), &unit(1));
        let mf = mixed_fiber_polytope(&[sq.clone(), sq.clone()]).unwrap();
        assert_eq!(mf, Polytope::from_i64(&[vec![0], vec![2]]));
        // a shifted argument moves the result by the fiber part of the shift
        let shifted = SplitPolytope::new(1, 1, sq.polytope.translate(&qvec(&[1, 1]))).unwrap();
        let mf2 = mixed_fiber_polytope(&[sq.clone(), shifted]).unwrap();
        assert_eq!(mf2, mf.translate(&qvec(&[1])));
        let flat = SplitPolytope::new(1, 1, Polytope::from_i64(&[vec![0, 0], vec![1, 0]])).unwrap();
        assert_eq!(mixed_fiber_polytope(&[flat.clone(), flat]).unwrap(), Polytope::origin(1));
    }

    #[test]
    fn oracle_examples() {
        let t = triangle();
        let g = qvec(&[1, 0, 0]);
        assert_eq!(mf_support_oracle(&[t.clone(), t.clone()], &g).unwrap(), q(1));
        assert_eq!(fiber_polytope(&t).support(&g), q(1));
        let p = Polytope::from_i64(&[vec![0, 1], vec![2, 0], vec![1, 3]]);
        let base = Polytope::from_i64(&[vec![0], vec![3]]);
        let d = SplitPolytope::product(&p, &base);
        let g = qvec(&[2, -1]);
        assert_eq!(mf_support_oracle(&[d.clone(), d], &g).unwrap(), q(6) * p.support(&g));
    }
}
