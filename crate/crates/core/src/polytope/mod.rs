//! Exact V-polytopes with lazily built face lattices, normal fans, support
//! functions, Minkowski sums and differences.

mod fan;
mod hull;
mod measure;
mod virt;

use std::collections::HashSet;
use std::fmt;
use std::sync::{Arc, OnceLock};

use fixedbitset::FixedBitSet;
use num_traits::Zero;

use crate::error::{check_dim, Error, Result};
use crate::lattice::LatticeFrame;
use crate::rational::{add, dot, q, rank, scale, sub, zeros, QVec, Q};

pub use fan::{common_refinement, normal_fan, Cone, NormalFan};
pub use hull::Facet;
pub use virt::VirtualPolytope;

/// A linear functional, applied to points by the dot product.
pub type LinearFunctional = QVec;

#[derive(Clone, Debug)]
pub struct Face {
    /// Indices into the parent polytope's vertex list, ascending.
    pub vertices: Vec<usize>,
    pub bits: FixedBitSet,
    pub facets: FixedBitSet,
    pub dim: usize,
    /// Minimized over the polytope exactly on this face.
    pub functional: LinearFunctional,
}

#[derive(Clone)]
pub struct Polytope {
    ambient: usize,
    vertices: Vec<QVec>,
    hull: Arc<hull::HullData>,
    faces: Arc<OnceLock<Vec<Face>>>,
}

impl PartialEq for Polytope {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.vertices == other.vertices
    }
}

impl Eq for Polytope {}

impl std::hash::Hash for Polytope {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.ambient.hash(state);
        self.vertices.hash(state);
    }
}

impl fmt::Debug for Polytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<Vec<String>> = self.vertices.iter().map(|v| v.iter().map(|x| x.to_string()).collect()).collect();
        write!(f, "Polytope(dim {} in R^{}, {:?})", self.dim(), self.ambient, vs)
    }
}

pub fn convex_hull(points: &[QVec]) -> Result<Polytope> {
    let Some(first) = points.first() else {
        return Err(Error::InvalidInput("convex hull of an empty point set".into()));
    };
    for p in points {
        check_dim(first.len(), p.len())?;
    }
    Ok(Polytope::hull_of(points))
}

impl Polytope {
    /// Hull of a nonempty list of points of equal length.
    pub fn hull_of(points: &[QVec]) -> Polytope {
        let ambient = points[0].len();
        let (vertices, data) = hull::hull(points);
        Polytope { ambient, vertices, hull: Arc::new(data), faces: Arc::new(OnceLock::new()) }
    }

    pub fn from_i64(points: &[Vec<i64>]) -> Polytope {
        let pts: Vec<QVec> = points.iter().map(|p| crate::rational::qvec(p)).collect();
        Polytope::hull_of(&pts)
    }

    pub fn point(x: QVec) -> Polytope {
        Polytope::hull_of(&[x])
    }

    pub fn origin(ambient: usize) -> Polytope {
        Polytope::point(zeros(ambient))
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.hull.pivots.len()
    }

    pub fn vertices(&self) -> &[QVec] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.hull.facets
    }

    pub fn is_point(&self) -> bool {
        self.vertices.len() == 1
    }

    /// Basis of the linear space parallel to the affine hull.
    pub fn direction_basis(&self) -> &[QVec] {
        &self.hull.lin
    }

    pub fn is_integral(&self) -> bool {
        self.vertices.iter().all(|v| crate::rational::is_integral(v))
    }

    pub fn support(&self, l: &[Q]) -> Q {
        self.vertices.iter().map(|v| dot(l, v)).min().expect("polytopes are nonempty")
    }

    /// Minimum of `l` and the face on which it is attained.
    pub fn support_data(&self, l: &[Q]) -> (Q, Face) {
        let value = self.support(l);
        let mut bits = FixedBitSet::with_capacity(self.vertices.len());
        for (i, v) in self.vertices.iter().enumerate() {
            if dot(l, v) == value {
                bits.insert(i);
            }
        }
        let face = self.faces().iter().find(|f| f.bits == bits).expect("minimizing set is a face").clone();
        (value, face)
    }

    /// Vertices on which `l` attains its minimum.
    pub fn argmin(&self, l: &[Q]) -> Vec<QVec> {
        let value = self.support(l);
        self.vertices.iter().filter(|v| dot(l, v) == value).cloned().collect()
    }

    pub fn minkowski_sum(&self, other: &Polytope) -> Result<Polytope> {
        check_dim(self.ambient, other.ambient)?;
        Ok(self.sum_unchecked(other))
    }

    pub(crate) fn sum_unchecked(&self, other: &Polytope) -> Polytope {
        if other.is_point() {
            return self.translate(&other.vertices[0]);
        }
        if self.is_point() {
            return other.translate(&self.vertices[0]);
        }
        let mut pts = Vec::with_capacity(self.vertices.len() * other.vertices.len());
        for a in &self.vertices {
            for b in &other.vertices {
                pts.push(add(a, b));
            }
        }
        Polytope::hull_of(&pts)
    }

    /// Minkowski sum of a nonempty list.
    pub fn sum_all(ps: &[Polytope]) -> Result<Polytope> {
        let Some(first) = ps.first() else {
            return Err(Error::InvalidInput("empty Minkowski sum".into()));
        };
        for p in ps {
            check_dim(first.ambient, p.ambient)?;
        }
        Ok(Polytope::sum_many(ps))
    }

    /// Minkowski sum of many summands without forming the partial sums: the
    /// hull is grown from points of the sum minimizing its own facet normals
    /// until every facet is confirmed by the summed support function.
    pub(crate) fn sum_many(ps: &[Polytope]) -> Polytope {
        if ps.len() <= 2 {
            return ps[1..].iter().fold(ps[0].clone(), |acc, p| acc.sum_unchecked(p));
        }
        let n = ps[0].ambient;
        // first minimizing vertex of every summand
        let extreme = |l: &[Q]| -> (Q, QVec) {
            let mut value = Q::zero();
            let mut point = zeros(n);
            for p in ps {
                let (v, x) = p.vertices.iter().map(|v| (dot(l, v), v)).min_by(|a, b| a.0.cmp(&b.0)).expect("nonempty");
                value += v;
                point = add(&point, x);
            }
            (value, point)
        };
        let mut lin: Vec<QVec> = ps.iter().flat_map(|p| p.hull.lin.iter().cloned()).collect();
        let d = crate::rational::rref(&mut lin).len();
        lin.truncate(d);

        let mut pts = vec![extreme(&zeros(n)).1];
        while rank(&pts.iter().map(|p| sub(p, &pts[0])).collect::<Vec<_>>()) < d {
            let diffs: Vec<QVec> = pts.iter().map(|p| sub(p, &pts[0])).collect();
            let l = crate::rational::nullspace(&diffs, n)
                .into_iter()
                .find(|l| lin.iter().any(|b| !dot(l, b).is_zero()))
                .expect("the span of the sum is not exhausted");
            let c = dot(&l, &pts[0]);
            let (lo, x) = extreme(&l);
            if lo < c {
                pts.push(x);
            } else {
                pts.push(extreme(&crate::rational::neg(&l)).1);
            }
        }

        let mut confirmed: HashSet<QVec> = HashSet::new();
        loop {
            let h = Polytope::hull_of(&pts);
            let mut fresh = Vec::new();
            for f in h.facets() {
                if confirmed.contains(&f.normal) {
                    continue;
                }
                let (value, x) = extreme(&f.normal);
                if value < f.offset {
                    fresh.push(x);
                } else {
                    confirmed.insert(f.normal.clone());
                }
            }
            if fresh.is_empty() {
                return h;
            }
            pts = h.vertices.clone();
            pts.extend(fresh);
        }
    }

    pub fn translate(&self, t: &[Q]) -> Polytope {
        // translation preserves the combinatorics, so reuse the hull data
        let vertices: Vec<QVec> = self.vertices.iter().map(|v| add(v, t)).collect();
        let mut data = (*self.hull).clone();
        for f in data.facets.iter_mut() {
            f.offset = &f.offset + dot(&f.normal, t);
        }
        let faces = Arc::new(OnceLock::new());
        if let Some(fs) = self.faces.get() {
            let _ = faces.set(fs.clone());
        }
        Polytope { ambient: self.ambient, vertices, hull: Arc::new(data), faces }
    }

    pub fn scale(&self, c: &Q) -> Polytope {
        if c.is_zero() {
            return Polytope::origin(self.ambient);
        }
        let pts: Vec<QVec> = self.vertices.iter().map(|v| scale(v, c)).collect();
        Polytope::hull_of(&pts)
    }

    /// Image under the linear map with the given matrix rows.
    pub fn map_linear(&self, rows: &[QVec]) -> Polytope {
        let pts: Vec<QVec> = self.vertices.iter().map(|v| rows.iter().map(|r| dot(r, v)).collect()).collect();
        Polytope::hull_of(&pts)
    }

    /// Image under an arbitrary affine map of the vertices.
    pub fn map_points(&self, f: impl Fn(&QVec) -> QVec) -> Polytope {
        let pts: Vec<QVec> = self.vertices.iter().map(f).collect();
        Polytope::hull_of(&pts)
    }

    /// Coordinate projection onto the listed coordinates.
    pub fn project(&self, coords: &[usize]) -> Polytope {
        self.map_points(|v| coords.iter().map(|&i| v[i].clone()).collect())
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        if x.len() != self.ambient {
            return false;
        }
        let d = sub(x, &self.vertices[0]);
        let mut rows = self.hull.lin.clone();
        rows.push(d);
        if rank(&rows) > self.dim() {
            return false;
        }
        self.hull.facets.iter().all(|f| dot(&f.normal, x) >= f.offset)
    }

    /// Containment for a point already known to lie in the affine hull.
    pub(crate) fn contains_affine(&self, x: &[Q]) -> bool {
        self.hull.facets.iter().all(|f| dot(&f.normal, x) >= f.offset)
    }

    /// Containment as sets, P ⊆ self.
    pub fn contains_polytope(&self, p: &Polytope) -> bool {
        p.vertices.iter().all(|v| self.contains(v))
    }

    pub fn lattice_frame(&self) -> LatticeFrame {
        LatticeFrame::new(self.vertices[0].clone(), &self.hull.lin)
    }

    /// All faces including the polytope itself, ordered by (dim, vertex list).
    pub fn faces(&self) -> &[Face] {
        self.faces.get_or_init(|| self.build_faces())
    }

    pub fn faces_of_dim(&self, d: usize) -> impl Iterator<Item = &Face> {
        self.faces().iter().filter(move |f| f.dim == d)
    }

    pub fn face_polytope(&self, f: &Face) -> Polytope {
        let pts: Vec<QVec> = f.vertices.iter().map(|&i| self.vertices[i].clone()).collect();
        Polytope::hull_of(&pts)
    }

    /// Faces of `self` properly contained in face `f` with dimension one less.
    pub fn facets_of_face(&self, f: &Face) -> Vec<&Face> {
        if f.dim == 0 {
            return vec![];
        }
        self.faces().iter().filter(|g| g.dim + 1 == f.dim && g.bits.is_subset(&f.bits)).collect()
    }

    fn build_faces(&self) -> Vec<Face> {
        let nv = self.vertices.len();
        let nf = self.hull.facets.len();
        let mut all = FixedBitSet::with_capacity(nv);
        all.insert_range(..);
        let mut seen: HashSet<FixedBitSet> = HashSet::new();
        let mut order: Vec<FixedBitSet> = vec![all.clone()];
        seen.insert(all);
        let facet_sets: Vec<&FixedBitSet> = self.hull.facets.iter().map(|f| &f.vertices).collect();
        for fs in &facet_sets {
            if seen.insert((*fs).clone()) {
                order.push((*fs).clone());
            }
        }
        let mut i = 1;
        while i < order.len() {
            let cur = order[i].clone();
            for fs in &facet_sets {
                let mut x = cur.clone();
                x.intersect_with(fs);
                if x.count_ones(..) > 0 && seen.insert(x.clone()) {
                    order.push(x);
                }
            }
            i += 1;
        }
        let mut faces: Vec<Face> = order
            .into_iter()
            .map(|bits| {
                let vertices: Vec<usize> = bits.ones().collect();
                let mut facets = FixedBitSet::with_capacity(nf);
                let mut functional = zeros(self.ambient);
                for (j, f) in self.hull.facets.iter().enumerate() {
                    if bits.is_subset(&f.vertices) {
                        facets.insert(j);
                        functional = add(&functional, &f.normal);
                    }
                }
                let v0 = &self.vertices[vertices[0]];
                let diffs: Vec<QVec> = vertices[1..].iter().map(|&k| sub(&self.vertices[k], v0)).collect();
                let dim = rank(&diffs);
                Face { vertices, bits, facets, dim, functional }
            })
            .collect();
        faces.sort_by(|a, b| (a.dim, &a.vertices).cmp(&(b.dim, &b.vertices)));
        faces
    }

    /// A functional minimized exactly at vertex `i`.
    pub fn vertex_functional(&self, i: usize) -> LinearFunctional {
        let mut functional = zeros(self.ambient);
        for f in &self.hull.facets {
            if f.vertices.contains(i) {
                functional = add(&functional, &f.normal);
            }
        }
        functional
    }

    /// Lattice-normalized volume relative to the affine span: (dim)! times the
    /// Lebesgue volume in unimodular coordinates. A point has volume 1.
    pub fn lattice_volume(&self) -> Q {
        measure::lattice_volume(self)
    }

    /// Lebesgue volume in the ambient space (zero unless full-dimensional).
    pub fn volume(&self) -> Q {
        if self.dim() < self.ambient {
            return Q::zero();
        }
        self.relative_volume()
    }

    /// Lebesgue volume relative to the lattice of the affine span.
    pub fn relative_volume(&self) -> Q {
        let f = Q::from_integer(crate::rational::factorial(self.dim()));
        self.lattice_volume() / f
    }

    /// Simplices (as vertex index lists) of a triangulation of this polytope.
    pub fn triangulation(&self) -> Vec<Vec<usize>> {
        measure::triangulate(self)
    }

    /// Cartesian product.
    pub fn product(&self, other: &Polytope) -> Polytope {
        let mut pts = Vec::new();
        for a in &self.vertices {
            for b in &other.vertices {
                let mut v = a.clone();
                v.extend(b.iter().cloned());
                pts.push(v);
            }
        }
        Polytope::hull_of(&pts)
    }

    /// Hull of the union.
    pub fn join(&self, other: &Polytope) -> Polytope {
        let mut pts = self.vertices.clone();
        pts.extend(other.vertices.iter().cloned());
        Polytope::hull_of(&pts)
    }

    /// Integer points of the polytope, by scanning the bounding box.
    pub fn lattice_points(&self) -> Vec<Vec<i64>> {
        use num_traits::ToPrimitive;
        let lo: Vec<i64> = (0..self.ambient)
            .map(|i| self.vertices.iter().map(|v| v[i].ceil()).min().unwrap().to_integer().to_i64().expect("small"))
            .collect();
        let hi: Vec<i64> = (0..self.ambient)
            .map(|i| self.vertices.iter().map(|v| v[i].floor()).max().unwrap().to_integer().to_i64().expect("small"))
            .collect();
        let mut out = Vec::new();
        let mut cur = lo.clone();
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return out;
        }
        loop {
            if self.contains(&crate::rational::qvec(&cur)) {
                out.push(cur.clone());
            }
            let mut i = 0;
            while i < self.ambient && cur[i] == hi[i] {
                cur[i] = lo[i];
                i += 1;
            }
            if i == self.ambient {
                break;
            }
            cur[i] += 1;
        }
        out.sort();
        out
    }
}

/// Standard simplex conv{0, e_1, .., e_k} in R^k.
pub fn standard_simplex(k: usize) -> Polytope {
    let mut pts = vec![zeros(k)];
    for i in 0..k {
        pts.push(crate::rational::unit(k, i));
    }
    Polytope::hull_of(&pts)
}

/// The cube [0, s]^k.
pub fn cube(k: usize, s: i64) -> Polytope {
    let mut pts = Vec::new();
    for mask in 0..(1usize << k) {
        pts.push((0..k).map(|i| if mask >> i & 1 == 1 { q(s) } else { Q::zero() }).collect());
    }
    Polytope::hull_of(&pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{qf, qvec};

    #[test]
    fn hull_examples() {
        let p = convex_hull(&[qvec(&[0, 0]), qvec(&[1, 0]), qvec(&[0, 1]), qvec(&[1, 1]), vec![qf(1, 2), qf(1, 2)]])
            .unwrap();
        assert_eq!(p.vertices().len(), 4);
        assert_eq!(p.dim(), 2);
        let s = convex_hull(&[qvec(&[0]), qvec(&[1]), qvec(&[2])]).unwrap();
        assert_eq!(s.vertices(), &[qvec(&[0]), qvec(&[2])]);
        assert_eq!(s.dim(), 1);
        let pt = convex_hull(&[qvec(&[3, 4])]).unwrap();
        assert_eq!(pt.dim(), 0);
        assert!(convex_hull(&[]).is_err());
    }

    #[test]
    fn support_examples() {
        let sq = cube(2, 1);
        let (v, f) = sq.support_data(&qvec(&[1, 1]));
        assert_eq!(v, q(0));
        assert_eq!(f.vertices.len(), 1);
        assert_eq!(sq.vertices()[f.vertices[0]], qvec(&[0, 0]));
        let (v, f) = sq.support_data(&qvec(&[-1, 0]));
        assert_eq!(v, q(-1));
        assert_eq!(f.dim, 1);
        assert!(f.vertices.iter().all(|&i| sq.vertices()[i][0] == q(1)));
        let seg = Polytope::from_i64(&[vec![0], vec![2]]);
        let (v, f) = seg.support_data(&qvec(&[3]));
        assert_eq!(v, q(0));
        assert_eq!(seg.vertices()[f.vertices[0]], qvec(&[0]));
    }

    #[test]
    fn face_counts() {
        assert_eq!(cube(2, 1).faces().len(), 9);
        assert_eq!(cube(3, 1).faces().len(), 27);
        assert_eq!(standard_simplex(3).faces().len(), 15);
        let seg = Polytope::from_i64(&[vec![0, 0, 0], vec![1, 1, 1]]);
        assert_eq!(seg.faces().len(), 3);
        for f in cube(3, 1).faces() {
            let l = &f.functional;
            let c = cube(3, 1);
            let (_, g) = c.support_data(l);
            assert_eq!(g.vertices, f.vertices);
        }
    }

    #[test]
    fn minkowski_examples() {
        let sq = cube(2, 1);
        assert_eq!(sq.minkowski_sum(&sq).unwrap(), cube(2, 2));
        let sx = Polytope::from_i64(&[vec![0, 0], vec![1, 0]]);
        let sy = Polytope::from_i64(&[vec![0, 0], vec![0, 1]]);
        assert_eq!(sx.minkowski_sum(&sy).unwrap(), sq);
        let t = Polytope::point(qvec(&[2, 3]));
        assert_eq!(sq.minkowski_sum(&t).unwrap(), sq.translate(&qvec(&[2, 3])));
        assert!(sq.minkowski_sum(&Polytope::origin(3)).is_err());
    }

    #[test]
    fn scale_examples() {
        assert_eq!(cube(2, 1).scale(&q(2)), cube(2, 2));
        assert_eq!(cube(2, 1).scale(&q(0)), Polytope::origin(2));
        let s = Polytope::from_i64(&[vec![0], vec![3]]);
        assert_eq!(s.scale(&qf(1, 3)), Polytope::from_i64(&[vec![0], vec![1]]));
    }

    #[test]
    fn volume_examples() {
        assert_eq!(standard_simplex(3).lattice_volume(), q(1));
        assert_eq!(Polytope::from_i64(&[vec![0], vec![2]]).lattice_volume(), q(2));
        assert_eq!(Polytope::point(qvec(&[1, 1])).lattice_volume(), q(1));
        assert_eq!(cube(3, 1).lattice_volume(), q(6));
        assert_eq!(cube(3, 2).volume(), q(8));
        // a segment on a coarse line still has lattice length 2
        let s = Polytope::from_i64(&[vec![0, 0], vec![2, 4]]);
        assert_eq!(s.lattice_volume(), q(2));
        assert_eq!(s.volume(), q(0));
    }

    #[test]
    fn lattice_point_enumeration() {
        assert_eq!(cube(2, 1).lattice_points().len(), 4);
        assert_eq!(standard_simplex(3).scale(&q(2)).lattice_points().len(), 10);
        assert_eq!(Polytope::point(vec![qf(1, 2)]).lattice_points().len(), 0);
    }

    #[test]
    fn containment() {
        let sq = cube(2, 2);
        assert!(sq.contains(&qvec(&[1, 1])));
        assert!(sq.contains(&qvec(&[2, 0])));
        assert!(!sq.contains(&qvec(&[3, 0])));
        let seg = Polytope::from_i64(&[vec![0, 0], vec![2, 2]]);
        assert!(seg.contains(&qvec(&[1, 1])));
        assert!(!seg.contains(&qvec(&[1, 0])));
    }
}
