//! Exact convex hulls by double description over the homogenized cone.
//!
//! Points are first written in coordinates of their affine hull, so the
//! cone {(a, b) : a·y + b ≥ 0 for every point y} is pointed and its extreme
//! rays are exactly the facets.

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::rational::{dot, inverse, primitive_integer, rref, sub, QVec, Q};

#[derive(Clone, Debug)]
pub struct Facet {
    /// Inner normal: `normal·x >= offset` on the polytope, equality on the facet.
    pub normal: QVec,
    pub offset: Q,
    pub vertices: FixedBitSet,
}

#[derive(Clone, Debug)]
pub struct HullData {
    /// Reduced echelon basis of the direction space.
    pub lin: Vec<QVec>,
    pub pivots: Vec<usize>,
    pub facets: Vec<Facet>,
}

/// Sorted, deduplicated vertices and the facet description.
pub fn hull(points: &[QVec]) -> (Vec<QVec>, HullData) {
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    let p0 = pts[0].clone();
    let mut diffs: Vec<QVec> = pts[1..].iter().map(|p| sub(p, &p0)).collect();
    let small: Option<Vec<Vec<i64>>> = diffs.iter().map(|d| d.iter().map(small_integer).collect()).collect();
    if let Some(picked) = small.and_then(|d| small::independent_rows(&d)) {
        // the reduced echelon basis depends only on the row space
        diffs = picked.into_iter().map(|i| diffs[i].clone()).collect();
    }
    let pivots = rref(&mut diffs);
    diffs.truncate(pivots.len());
    let lin = diffs;
    let r = pivots.len();
    if r == 0 {
        return (vec![p0], HullData { lin, pivots, facets: vec![] });
    }

    let integral = pts.iter().all(|p| p.iter().all(|x| x.is_integer()));
    let rows: Vec<Vec<BigInt>> = pts
        .iter()
        .map(|p| {
            if integral {
                let mut g: Vec<BigInt> = pivots.iter().map(|&j| p[j].numer() - p0[j].numer()).collect();
                g.push(BigInt::from(1));
                return g;
            }
            let mut g: QVec = pivots.iter().map(|&j| &p[j] - &p0[j]).collect();
            g.push(Q::from_integer(1.into()));
            primitive_integer(&g)
        })
        .collect();
    let rays = double_description(&rows, r + 1);

    // a point is a vertex iff the facets through it meet only in it
    let n = pts.len();
    let mut is_vertex = vec![false; n];
    for (i, flag) in is_vertex.iter_mut().enumerate() {
        let mut common = FixedBitSet::with_capacity(n);
        common.insert_range(..);
        let mut any = false;
        for (_, z) in &rays {
            if z.contains(i) {
                common.intersect_with(z);
                any = true;
            }
        }
        *flag = any && common.count_ones(..) == 1;
    }
    let vertices: Vec<QVec> = pts.iter().zip(&is_vertex).filter(|(_, &v)| v).map(|(p, _)| p.clone()).collect();

    // position of each point among the vertices
    let mut slot = vec![usize::MAX; n];
    for (k, i) in (0..n).filter(|&i| is_vertex[i]).enumerate() {
        slot[i] = k;
    }
    let facets = rays
        .iter()
        .map(|(ray, z)| {
            let mut normal = vec![Q::zero(); p0.len()];
            let a: QVec = ray[..r].iter().cloned().map(Q::from_integer).collect();
            let a = crate::rational::to_q(&primitive_integer(&a));
            for (k, &j) in pivots.iter().enumerate() {
                normal[j] = a[k].clone();
            }
            let mut vs = FixedBitSet::with_capacity(vertices.len());
            for i in z.ones().filter(|&i| is_vertex[i]) {
                vs.insert(slot[i]);
            }
            let first = vs.ones().next().expect("a facet has vertices");
            let offset = dot(&normal, &vertices[first]);
            Facet { normal, offset, vertices: vs }
        })
        .collect();
    (vertices, HullData { lin, pivots, facets })
}

fn small_integer(x: &Q) -> Option<i64> {
    if x.is_integer() {
        x.numer().to_i64()
    } else {
        None
    }
}

fn int_dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).fold(BigInt::zero(), |acc, (x, y)| acc + x * y)
}

fn make_primitive(v: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for x in v.iter() {
        g = g.gcd(x);
    }
    if !g.is_zero() && g != BigInt::from(1) {
        for x in v.iter_mut() {
            *x = &*x / &g;
        }
    }
}

/// Extreme rays of {z : row·z >= 0 for all rows}, assuming the rows have full
/// rank `dim`. Each ray comes with the set of rows it is tight on.
fn double_description(rows: &[Vec<BigInt>], dim: usize) -> Vec<(Vec<BigInt>, FixedBitSet)> {
    let small: Option<Vec<Vec<i64>>> = rows.iter().map(|r| r.iter().map(|x| x.to_i64()).collect()).collect();
    if let Some(rays) = small.and_then(|rows| small::double_description(&rows, dim)) {
        return rays.into_iter().map(|(r, z)| (r.into_iter().map(BigInt::from).collect(), z)).collect();
    }
    let n = rows.len();
    // greedy basis of linearly independent rows
    let mut basis: Vec<usize> = Vec::new();
    let mut echelon: Vec<QVec> = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let mut trial = echelon.clone();
        trial.push(row.iter().cloned().map(Q::from_integer).collect());
        if rref(&mut trial).len() > echelon.len() {
            trial.truncate(echelon.len() + 1);
            echelon = trial;
            basis.push(i);
            if basis.len() == dim {
                break;
            }
        }
    }
    assert_eq!(basis.len(), dim, "constraint rows must have full rank");

    let b: Vec<QVec> = basis.iter().map(|&i| rows[i].iter().cloned().map(Q::from_integer).collect()).collect();
    let binv = inverse(&b).expect("basis is invertible");
    let mut rays: Vec<(Vec<BigInt>, FixedBitSet)> = (0..dim)
        .map(|j| {
            let col: QVec = (0..dim).map(|i| binv[i][j].clone()).collect();
            let mut z = FixedBitSet::with_capacity(n);
            for (k, &bi) in basis.iter().enumerate() {
                if k != j {
                    z.insert(bi);
                }
            }
            (primitive_integer(&col), z)
        })
        .collect();

    let mut in_basis = FixedBitSet::with_capacity(n);
    for &i in &basis {
        in_basis.insert(i);
    }
    for (i, row) in rows.iter().enumerate() {
        if in_basis.contains(i) {
            continue;
        }
        let vals: Vec<BigInt> = rays.iter().map(|(r, _)| int_dot(row, r)).collect();
        if vals.iter().all(|v| !v.is_negative()) {
            for ((_, z), v) in rays.iter_mut().zip(&vals) {
                if v.is_zero() {
                    z.insert(i);
                }
            }
            continue;
        }
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_negative()).collect();
        let mut next: Vec<(Vec<BigInt>, FixedBitSet)> = Vec::new();
        for &p in &pos {
            for &q in &neg {
                let mut common = rays[p].1.clone();
                common.intersect_with(&rays[q].1);
                if common.count_ones(..) + 2 < dim {
                    continue;
                }
                let adjacent = rays.iter().enumerate().all(|(t, (_, zt))| t == p || t == q || !common.is_subset(zt));
                if !adjacent {
                    continue;
                }
                let mut v: Vec<BigInt> =
                    rays[q].0.iter().zip(&rays[p].0).map(|(xq, xp)| &vals[p] * xq - &vals[q] * xp).collect();
                make_primitive(&mut v);
                common.insert(i);
                next.push((v, common));
            }
        }
        let mut kept: Vec<(Vec<BigInt>, FixedBitSet)> = Vec::new();
        for (k, (r, mut z)) in rays.into_iter().enumerate() {
            if vals[k].is_negative() {
                continue;
            }
            if vals[k].is_zero() {
                z.insert(i);
            }
            kept.push((r, z));
        }
        kept.extend(next);
        rays = kept;
    }
    rays
}

/// The same iteration in checked machine integers; None on overflow, so the
/// caller can redo it with big integers.
mod small {
    use fixedbitset::FixedBitSet;
    use num_integer::Integer;

    fn make_primitive(v: &mut [i128]) {
        let g = v.iter().fold(0i128, |g, x| g.gcd(x));
        if g > 1 {
            for x in v.iter_mut() {
                *x /= g;
            }
        }
    }

    fn dot(a: &[i128], b: &[i128]) -> Option<i128> {
        a.iter().zip(b).try_fold(0i128, |acc, (x, y)| acc.checked_add(x.checked_mul(*y)?))
    }

    /// Bareiss elimination.
    fn det(mut m: Vec<Vec<i128>>) -> Option<i128> {
        let n = m.len();
        let (mut prev, mut sign) = (1i128, 1i128);
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| m[i][c] != 0) else { return Some(0) };
            if p != c {
                m.swap(p, c);
                sign = -sign;
            }
            for i in c + 1..n {
                for j in c + 1..n {
                    let t = m[c][c].checked_mul(m[i][j])?.checked_sub(m[i][c].checked_mul(m[c][j])?)?;
                    m[i][j] = t / prev;
                }
            }
            prev = m[c][c];
        }
        if n == 0 {
            return Some(1);
        }
        m[n - 1][n - 1].checked_mul(sign)
    }

    /// Indices of a maximal independent subset, chosen greedily.
    pub(super) fn independent_rows(rows: &[Vec<i64>]) -> Option<Vec<usize>> {
        let mut picked = Vec::new();
        let mut echelon: Vec<(usize, Vec<i128>)> = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            let mut r: Vec<i128> = row.iter().map(|&x| x as i128).collect();
            for (c, e) in &echelon {
                if r[*c] != 0 {
                    let (a, b) = (e[*c], r[*c]);
                    for t in 0..r.len() {
                        r[t] = a.checked_mul(r[t])?.checked_sub(b.checked_mul(e[t])?)?;
                    }
                    make_primitive(&mut r);
                }
            }
            if let Some(c) = r.iter().position(|&x| x != 0) {
                echelon.push((c, r));
                picked.push(i);
            }
        }
        Some(picked)
    }

    pub(super) fn double_description(rows: &[Vec<i64>], dim: usize) -> Option<Vec<(Vec<i128>, FixedBitSet)>> {
        let n = rows.len();
        let rows: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
        let mut basis: Vec<usize> = Vec::new();
        let mut echelon: Vec<(usize, Vec<i128>)> = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            let mut r = row.clone();
            for (c, e) in &echelon {
                if r[*c] != 0 {
                    let (a, b) = (e[*c], r[*c]);
                    for t in 0..dim {
                        r[t] = a.checked_mul(r[t])?.checked_sub(b.checked_mul(e[t])?)?;
                    }
                    make_primitive(&mut r);
                }
            }
            if let Some(c) = r.iter().position(|&x| x != 0) {
                echelon.push((c, r));
                basis.push(i);
                if basis.len() == dim {
                    break;
                }
            }
        }
        if basis.len() < dim {
            return None;
        }
        let mut rays: Vec<(Vec<i128>, FixedBitSet)> = Vec::with_capacity(dim);
        for j in 0..dim {
            // generalized cross product of the other basis rows
            let others: Vec<&Vec<i128>> =
                basis.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &i)| &rows[i]).collect();
            let mut z = Vec::with_capacity(dim);
            for c in 0..dim {
                let minor: Vec<Vec<i128>> = others
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(t, _)| t != c).map(|(_, &x)| x).collect())
                    .collect();
                let d = det(minor)?;
                z.push(if c % 2 == 0 { d } else { d.checked_neg()? });
            }
            make_primitive(&mut z);
            if dot(&rows[basis[j]], &z)? < 0 {
                for x in z.iter_mut() {
                    *x = -*x;
                }
            }
            let mut tight = FixedBitSet::with_capacity(n);
            for (k, &bi) in basis.iter().enumerate() {
                if k != j {
                    tight.insert(bi);
                }
            }
            rays.push((z, tight));
        }

        let mut in_basis = FixedBitSet::with_capacity(n);
        for &i in &basis {
            in_basis.insert(i);
        }
        for (i, row) in rows.iter().enumerate() {
            if in_basis.contains(i) {
                continue;
            }
            let vals: Vec<i128> = rays.iter().map(|(r, _)| dot(row, r)).collect::<Option<_>>()?;
            if vals.iter().all(|&v| v >= 0) {
                for ((_, z), &v) in rays.iter_mut().zip(&vals) {
                    if v == 0 {
                        z.insert(i);
                    }
                }
                continue;
            }
            let mut next: Vec<(Vec<i128>, FixedBitSet)> = Vec::new();
            for p in (0..rays.len()).filter(|&k| vals[k] > 0) {
                for q in (0..rays.len()).filter(|&k| vals[k] < 0) {
                    let mut common = rays[p].1.clone();
                    common.intersect_with(&rays[q].1);
                    if common.count_ones(..) + 2 < dim {
                        continue;
                    }
                    let adjacent =
                        rays.iter().enumerate().all(|(t, (_, zt))| t == p || t == q || !common.is_subset(zt));
                    if !adjacent {
                        continue;
                    }
                    let mut v = Vec::with_capacity(dim);
                    for (xq, xp) in rays[q].0.iter().zip(&rays[p].0) {
                        v.push(vals[p].checked_mul(*xq)?.checked_sub(vals[q].checked_mul(*xp)?)?);
                    }
                    make_primitive(&mut v);
                    common.insert(i);
                    next.push((v, common));
                }
            }
            let mut kept: Vec<(Vec<i128>, FixedBitSet)> = Vec::with_capacity(rays.len() + next.len());
            for (k, (r, mut z)) in rays.into_iter().enumerate() {
                if vals[k] < 0 {
                    continue;
                }
                if vals[k] == 0 {
                    z.insert(i);
                }
                kept.push((r, z));
            }
            kept.extend(next);
            rays = kept;
        }
        Some(rays)
    }
}
