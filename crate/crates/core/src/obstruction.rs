//! Point configurations, their faces, the combinatorial Milnor numbers
//! c^{A',A}, Euler obstructions e^{A',A}, the degree of A and dual defect tests.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{check_dim, Error, Result};
use crate::lattice::{integer_rows, quotient_chart, IntMatrix, LatticeFrame};
use crate::polytope::Polytope;
use crate::rational::{q, qvec, rank, row_space, sub, QVec, Q};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PointConfiguration {
    dim: usize,
    points: Vec<Vec<i64>>,
}

/// A face A' of a configuration, as indices into its (sorted) point list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConfigFace {
    pub points: Vec<usize>,
    pub dim: usize,
}

impl PointConfiguration {
    /// Points are stored sorted; duplicates are rejected.
    pub fn new(dim: usize, mut points: Vec<Vec<i64>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("empty point configuration".into()));
        }
        for p in &points {
            check_dim(dim, p.len())?;
        }
        points.sort();
        if points.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput("duplicate points in configuration".into()));
        }
        Ok(PointConfiguration { dim, points })
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<i64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn qpoints(&self) -> Vec<QVec> {
        self.points.iter().map(|p| qvec(p)).collect()
    }

    pub fn hull(&self) -> Polytope {
        Polytope::hull_of(&self.qpoints())
    }

    /// Affine dimension.
    pub fn affine_dim(&self) -> usize {
        let p = self.qpoints();
        let diffs: Vec<QVec> = p[1..].iter().map(|x| sub(x, &p[0])).collect();
        rank(&diffs)
    }

    /// Generators of the lattice of pairwise differences.
    pub fn difference_lattice(&self) -> IntMatrix {
        let p0 = &self.points[0];
        IntMatrix::from_i64(
            &self.points[1..].iter().map(|p| p.iter().zip(p0).map(|(a, b)| a - b).collect()).collect::<Vec<_>>(),
            self.dim,
        )
    }

    pub fn index_of(&self, p: &[i64]) -> Option<usize> {
        self.points.binary_search_by(|x| x.as_slice().cmp(p)).ok()
    }

    pub fn subconfig(&self, idx: &[usize]) -> PointConfiguration {
        PointConfiguration::new(self.dim, idx.iter().map(|&i| self.points[i].clone()).collect())
            .expect("distinct points")
    }

    pub fn face_points(&self, f: &ConfigFace) -> Vec<Vec<i64>> {
        f.points.iter().map(|&i| self.points[i].clone()).collect()
    }

    pub fn face_config(&self, f: &ConfigFace) -> PointConfiguration {
        self.subconfig(&f.points)
    }

    /// Points of A minimizing `l`.
    pub fn minimizers(&self, l: &[Q]) -> Vec<usize> {
        let vals: Vec<Q> = self.qpoints().iter().map(|p| crate::rational::dot(l, p)).collect();
        let m = vals.iter().min().expect("nonempty").clone();
        (0..self.len()).filter(|&i| vals[i] == m).collect()
    }

    pub fn whole(&self) -> ConfigFace {
        ConfigFace { points: (0..self.len()).collect(), dim: self.affine_dim() }
    }

    /// Lattice-normalized volume of the convex hull.
    pub fn lattice_volume(&self) -> Q {
        self.hull().lattice_volume()
    }
}

/// All faces of A, ordered by (dimension, sorted point list).
pub fn config_faces(a: &PointConfiguration) -> Vec<ConfigFace> {
    let hull = a.hull();
    let pts = a.qpoints();
    let mut seen = HashSet::new();
    let mut faces: Vec<ConfigFace> = Vec::new();
    for f in hull.faces() {
        let vals: Vec<Q> = pts.iter().map(|p| crate::rational::dot(&f.functional, p)).collect();
        let m = vals.iter().min().expect("nonempty").clone();
        let idx: Vec<usize> = (0..pts.len()).filter(|&i| vals[i] == m).collect();
        if seen.insert(idx.clone()) {
            faces.push(ConfigFace { points: idx, dim: f.dim });
        }
    }
    faces.sort_by(|x, y| (x.dim, a.face_points(x)).cmp(&(y.dim, a.face_points(y))));
    faces
}

/// Whether the point subset is a face of A.
pub fn is_face(sub: &[Vec<i64>], a: &PointConfiguration) -> bool {
    let mut s = sub.to_vec();
    s.sort();
    config_faces(a).iter().any(|f| a.face_points(f) == s)
}

/// c^{A',A}: the normalized volume of conv s(A) minus conv s(A∖A') after
/// collapsing the direction space of A'.
pub fn milnor_number_c(a_prime: &[Vec<i64>], a: &PointConfiguration) -> Result<BigInt> {
    for p in a_prime {
        check_dim(a.ambient_dim(), p.len())?;
    }
    let mut sub_pts = a_prime.to_vec();
    sub_pts.sort();
    sub_pts.dedup();
    if sub_pts.as_slice() == a.points() {
        return Ok(BigInt::one());
    }
    if sub_pts.is_empty() || !is_face(&sub_pts, a) {
        return Ok(BigInt::zero());
    }
    Ok(c_of_face(&sub_pts, a))
}

fn c_of_face(sub_pts: &[Vec<i64>], a: &PointConfiguration) -> BigInt {
    let pts = a.qpoints();
    let frame = LatticeFrame::from_points(&pts);
    let r = frame.rank;
    let local = |p: &Vec<i64>| frame.coords(&qvec(p));
    let s0 = local(&sub_pts[0]);
    let kernel: Vec<QVec> = sub_pts[1..].iter().map(|p| sub(&local(p), &s0)).collect();
    let chart = quotient_chart(&integer_rows(&kernel, r), r, q(1));
    let d = chart.quotient_dim();
    let img_all: Vec<QVec> = a.points().iter().map(|p| chart.project(&local(p))).collect();
    let img_rest: Vec<QVec> =
        a.points().iter().filter(|p| !sub_pts.contains(p)).map(|p| chart.project(&local(p))).collect();
    let big = Polytope::hull_of(&img_all);
    let small = Polytope::hull_of(&img_rest);
    let vb = if big.dim() == d { big.lattice_volume() } else { Q::zero() };
    let vs = if small.dim() == d { small.lattice_volume() } else { Q::zero() };
    let c = vb - vs;
    debug_assert!(c.is_integer());
    c.to_integer()
}

#[derive(Clone, Debug)]
pub struct ObstructionTable {
    pub faces: Vec<ConfigFace>,
    /// c[i][j] = c^{F_i, F_j}.
    pub c: Vec<Vec<BigInt>>,
    /// The integer inverse of `c`.
    pub e: Vec<Vec<BigInt>>,
}

impl ObstructionTable {
    pub fn index_of(&self, f: &ConfigFace) -> Option<usize> {
        self.faces.iter().position(|g| g.points == f.points)
    }

    /// e^{F, A} for every face F, in face order.
    pub fn top_column(&self) -> Vec<BigInt> {
        let last = self.faces.len() - 1;
        self.e.iter().map(|row| row[last].clone()).collect()
    }
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.binary_search(x).is_ok())
}

pub fn obstruction_table(a: &PointConfiguration) -> Result<ObstructionTable> {
    let faces = config_faces(a);
    let n = faces.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i..n).map(move |j| (i, j)))
        .filter(|&(i, j)| is_subset(&faces[i].points, &faces[j].points))
        .collect();
    let values: Vec<((usize, usize), BigInt)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let v = if i == j {
                BigInt::one()
            } else {
                let fj = a.face_config(&faces[j]);
                c_of_face(&a.face_points(&faces[i]), &fj)
            };
            ((i, j), v)
        })
        .collect();
    let mut c = vec![vec![BigInt::zero(); n]; n];
    for ((i, j), v) in values {
        c[i][j] = v;
    }
    // back substitution on the unitriangular matrix
    let mut e = vec![vec![BigInt::zero(); n]; n];
    for j in 0..n {
        e[j][j] = BigInt::one();
        for i in (0..j).rev() {
            let mut s = BigInt::zero();
            for t in i + 1..=j {
                if !c[i][t].is_zero() && !e[t][j].is_zero() {
                    s += &c[i][t] * &e[t][j];
                }
            }
            e[i][j] = -s;
        }
    }
    for i in 0..n {
        for j in 0..n {
            let s: BigInt = (0..n).map(|t| &c[i][t] * &e[t][j]).sum();
            let want = if i == j { BigInt::one() } else { BigInt::zero() };
            if s != want {
                return Err(Error::Defect(format!("C·E is not the identity at ({i}, {j})")));
            }
        }
    }
    Ok(ObstructionTable { faces, c, e })
}

/// Σ over faces F of e^{F,A} (dim F + 1) Vol(F).
pub fn degree_a(a: &PointConfiguration) -> Result<BigInt> {
    let t = obstruction_table(a)?;
    Ok(degree_from_table(a, &t))
}

pub fn degree_from_table(a: &PointConfiguration, t: &ObstructionTable) -> BigInt {
    let col = t.top_column();
    let mut total = BigInt::zero();
    for (f, e) in t.faces.iter().zip(col) {
        if e.is_zero() {
            continue;
        }
        let vol = a.face_config(f).lattice_volume();
        total += e * BigInt::from(f.dim + 1) * vol.to_integer();
    }
    total
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualDefectReport {
    pub degree: BigInt,
    pub degree_zero: bool,
    pub two_hyperplanes: bool,
    /// Base point followed by the blocks B_1, .., B_p.
    pub iterated_circuit: Option<Vec<Vec<Vec<i64>>>>,
}

pub fn dual_defect_report(a: &PointConfiguration) -> Result<DualDefectReport> {
    let degree = degree_a(a)?;
    Ok(DualDefectReport {
        degree_zero: degree.is_zero(),
        degree,
        two_hyperplanes: in_two_parallel_hyperplanes(a),
        iterated_circuit: find_iterated_circuit(a),
    })
}

/// Intrinsic coordinates of A in Z^r, r = dim A.
fn intrinsic(a: &PointConfiguration) -> (usize, Vec<QVec>) {
    let pts = a.qpoints();
    let frame = LatticeFrame::from_points(&pts);
    (frame.rank, pts.iter().map(|p| frame.coords(p)).collect())
}

/// A lies in the union of two parallel hyperplanes of its affine span.
pub fn in_two_parallel_hyperplanes(a: &PointConfiguration) -> bool {
    let (r, pts) = intrinsic(a);
    if r == 0 {
        return false;
    }
    let n = pts.len();
    // point 0 always goes to the first part
    (0u64..1 << (n - 1)).any(|mask| {
        let side = |i: usize| i > 0 && (mask >> (i - 1)) & 1 == 1;
        let first: Vec<usize> = (0..n).filter(|&i| !side(i)).collect();
        let second: Vec<usize> = (0..n).filter(|&i| side(i)).collect();
        if second.is_empty() {
            return false;
        }
        let mut dirs: Vec<QVec> = first[1..].iter().map(|&i| sub(&pts[i], &pts[first[0]])).collect();
        dirs.extend(second[1..].iter().map(|&i| sub(&pts[i], &pts[second[0]])));
        rank(&dirs) < r
    })
}

/// d + 2 points in a d-dimensional space, every d + 1 of them affinely independent.
fn is_circuit(points: &[QVec], d: usize) -> bool {
    if points.len() != d + 2 {
        return false;
    }
    (0..points.len()).all(|skip| {
        let rest: Vec<&QVec> = points.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, p)| p).collect();
        let diffs: Vec<QVec> = rest[1..].iter().map(|p| sub(p, rest[0])).collect();
        rank(&diffs) == d
    })
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Exhaustive search for an iterated circuit spanning the affine hull of A.
pub fn find_iterated_circuit(a: &PointConfiguration) -> Option<Vec<Vec<Vec<i64>>>> {
    let (r, pts) = intrinsic(a);
    if r == 0 {
        return None;
    }
    for base in 0..pts.len() {
        let shifted: Vec<QVec> = pts.iter().map(|p| sub(p, &pts[base])).collect();
        let mut failed: HashSet<Vec<QVec>> = HashSet::new();
        if let Some(blocks) = grow(&shifted, r, &[], &mut failed) {
            let mut out = vec![vec![a.points()[base].clone()]];
            for b in blocks {
                out.push(b.iter().map(|&i| a.points()[i].clone()).collect());
            }
            return Some(out);
        }
    }
    None
}

fn grow(pts: &[QVec], r: usize, span: &[QVec], failed: &mut HashSet<Vec<QVec>>) -> Option<Vec<Vec<usize>>> {
    if span.len() == r {
        return Some(vec![]);
    }
    if failed.contains(span) {
        return None;
    }
    let chart = quotient_chart(&integer_rows(span, r), r, q(1));
    let imgs: Vec<QVec> = pts.iter().map(|p| chart.project(p)).collect();
    let outside: Vec<usize> = (0..pts.len()).filter(|&i| imgs[i].iter().any(|x| !x.is_zero())).collect();
    let room = r - span.len();
    for d in 1..=room {
        for combo in combinations(outside.len(), d + 1) {
            let chosen: Vec<usize> = combo.iter().map(|&i| outside[i]).collect();
            let mut cand: Vec<QVec> = chosen.iter().map(|&i| imgs[i].clone()).collect();
            if rank(&cand) != d {
                continue;
            }
            cand.push(vec![Q::zero(); room]);
            let mut uniq = cand.clone();
            uniq.sort();
            uniq.dedup();
            if uniq.len() != cand.len() || !is_circuit(&cand, d) {
                continue;
            }
            let mut rows = span.to_vec();
            rows.extend(chosen.iter().map(|&i| pts[i].clone()));
            let (next, _) = row_space(&rows);
            if let Some(mut rest) = grow(pts, r, &next, failed) {
                rest.insert(0, chosen);
                return Some(rest);
            }
        }
    }
    failed.insert(span.to_vec());
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(dim: usize, pts: &[&[i64]]) -> PointConfiguration {
        PointConfiguration::new(dim, pts.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    fn line(xs: &[i64]) -> PointConfiguration {
        PointConfiguration::new(1, xs.iter().map(|&x| vec![x]).collect()).unwrap()
    }

    #[test]
    fn face_examples() {
        let a = line(&[0, 1, 2]);
        let f = config_faces(&a);
        assert_eq!(f.len(), 3);
        assert_eq!(a.face_points(&f[0]), vec![vec![0]]);
        assert_eq!(a.face_points(&f[1]), vec![vec![2]]);
        assert_eq!(f[2].points, vec![0, 1, 2]);
        let sq = cfg(2, &[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        assert_eq!(config_faces(&sq).len(), 9);
        let t = cfg(2, &[&[0, 0], &[2, 0], &[0, 2], &[1, 1]]);
        assert!(is_face(&[vec![2, 0], vec![0, 2], vec![1, 1]], &t));
        assert!(!is_face(&[vec![2, 0], vec![0, 2]], &t));
        assert!(PointConfiguration::new(1, vec![vec![0], vec![0]]).is_err());
    }

    #[test]
    fn milnor_examples() {
        assert_eq!(milnor_number_c(&[vec![0]], &line(&[0, 1, 2])).unwrap(), BigInt::from(1));
        assert_eq!(milnor_number_c(&[vec![0]], &line(&[0, 2])).unwrap(), BigInt::from(2));
        assert_eq!(milnor_number_c(&[vec![1]], &line(&[0, 1, 2])).unwrap(), BigInt::from(0));
        let a = line(&[0, 1, 2]);
        assert_eq!(milnor_number_c(a.points(), &a).unwrap(), BigInt::from(1));
        let tri = cfg(2, &[&[0, 0], &[1, 0], &[2, 0], &[0, 1], &[1, 1], &[0, 2]]);
        assert_eq!(milnor_number_c(&[vec![0, 0]], &tri).unwrap(), BigInt::from(1));
    }

    #[test]
    fn table_of_three_points() {
        let t = obstruction_table(&line(&[0, 1, 2])).unwrap();
        assert_eq!(t.top_column(), vec![BigInt::from(-1), BigInt::from(-1), BigInt::from(1)]);
    }

    #[test]
    fn a2_interval_at_the_vertical_edge() {
        let p = Polytope::from_i64(&[vec![0, 0, 0], vec![0, 0, 2], vec![4, 2, 0], vec![2, 4, 2]]);
        let a = PointConfiguration::new(3, p.lattice_points()).unwrap();
        let t = obstruction_table(&a).unwrap();
        let edge = t
            .faces
            .iter()
            .position(|f| f.dim == 1 && a.face_points(f) == vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 0, 2]])
            .unwrap();
        let above: Vec<usize> =
            (0..t.faces.len()).filter(|&j| is_subset(&t.faces[edge].points, &t.faces[j].points)).collect();
        assert_eq!(above.len(), 4);
        let sub: Vec<Vec<i64>> =
            above.iter().map(|&i| above.iter().map(|&j| i64::try_from(&t.c[i][j]).unwrap()).collect()).collect();
        assert_eq!(sub, vec![vec![1, 1, 1, 2], vec![0, 1, 0, 1], vec![0, 0, 1, 1], vec![0, 0, 0, 1]]);
        assert_eq!(t.e[edge][t.faces.len() - 1], BigInt::from(0));
    }

    #[test]
    fn degree_examples() {
        assert_eq!(degree_a(&line(&[0, 1, 2])).unwrap(), BigInt::from(2));
        assert_eq!(degree_a(&line(&[0, 1, 2, 3])).unwrap(), BigInt::from(4));
        assert_eq!(degree_a(&cfg(2, &[&[0, 0], &[1, 0], &[0, 1]])).unwrap(), BigInt::from(0));
    }

    #[test]
    fn dual_defect_examples() {
        let r = dual_defect_report(&line(&[0, 1])).unwrap();
        assert!(r.degree_zero && r.two_hyperplanes && r.iterated_circuit.is_none());
        let r = dual_defect_report(&line(&[0, 1, 2])).unwrap();
        assert_eq!(r.degree, BigInt::from(2));
        let w = r.iterated_circuit.unwrap();
        let mut all: Vec<Vec<i64>> = w.into_iter().flatten().collect();
        all.sort();
        assert_eq!(all, vec![vec![0], vec![1], vec![2]]);
        let r = dual_defect_report(&cfg(2, &[&[0, 0], &[1, 0], &[0, 1]])).unwrap();
        assert!(r.degree_zero && r.two_hyperplanes);
        // the lattice points of the unit ball: pairs of opposite points
        let ball = cfg(2, &[&[0, 0], &[1, 0], &[-1, 0], &[0, 1], &[0, -1]]);
        assert!(find_iterated_circuit(&ball).is_some());
    }
}
