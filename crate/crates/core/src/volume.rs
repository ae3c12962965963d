//! Mixed volumes of polytopes and of pairs of polyhedra with a common
//! recession cone, shadow volumes, and the Euler characteristic arithmetic.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{check_dim, Error, Result};
use crate::polytope::Polytope;
use crate::rational::{add, dot, factorial, primitive_integer, scale, to_q, QVec, Q};

/// A bounded polytope plus a pointed cone spanned by integer rays.
#[derive(Clone, Debug)]
pub struct ConePolyhedron {
    pub bounded: Polytope,
    pub rays: Vec<QVec>,
}

/// Ordered pair of polyhedra `bounded + cone(rays)` sharing their recession cone.
#[derive(Clone, Debug)]
pub struct PolytopePair {
    pub big: Polytope,
    pub small: Polytope,
    pub rays: Vec<QVec>,
}

impl PolytopePair {
    pub fn bounded(big: Polytope, small: Polytope) -> Self {
        PolytopePair { big, small, rays: vec![] }
    }

    pub fn big_polyhedron(&self) -> ConePolyhedron {
        ConePolyhedron { bounded: self.big.clone(), rays: self.rays.clone() }
    }

    pub fn small_polyhedron(&self) -> ConePolyhedron {
        ConePolyhedron { bounded: self.small.clone(), rays: self.rays.clone() }
    }
}

pub(crate) fn subset_sum(ps: &[Polytope], mask: usize) -> Polytope {
    let mut acc: Option<Polytope> = None;
    for (i, p) in ps.iter().enumerate() {
        if mask >> i & 1 == 1 {
            acc = Some(match acc {
                None => p.clone(),
                Some(a) => a.sum_unchecked(p),
            });
        }
    }
    acc.expect("nonempty subset")
}

fn sign(e: usize) -> Q {
    if e % 2 == 0 {
        Q::one()
    } else {
        -Q::one()
    }
}

/// Mixed volume with MV(P, .., P) = Vol(P), Lebesgue normalization.
pub fn mixed_volume(ps: &[Polytope]) -> Result<Q> {
    let m = ps.len();
    if m == 0 {
        return Err(Error::InvalidInput("mixed volume of no polytopes".into()));
    }
    for p in ps {
        check_dim(m, p.ambient_dim())?;
    }
    let total: Q = (1usize..1 << m)
        .into_par_iter()
        .map(|mask| sign(m - mask.count_ones() as usize) * subset_sum(ps, mask).volume())
        .reduce(Q::zero, |a, b| a + b);
    Ok(total / Q::from_integer(factorial(m)))
}

/// Mixed volume normalized so that MV(S, .., S) = 1 for the standard simplex.
pub fn mixed_volume_lattice(ps: &[Polytope]) -> Result<Q> {
    Ok(mixed_volume(ps)? * Q::from_integer(factorial(ps.len())))
}

/// True iff some subfamily of size J has a Minkowski sum of dimension < J.
pub fn mv_zero_criterion(ps: &[Polytope]) -> bool {
    (1usize..1 << ps.len()).any(|mask| subset_sum(ps, mask).dim() < mask.count_ones() as usize)
}

/// A functional strictly positive on every nonzero vector of cone(rays).
fn interior_dual(rays: &[QVec], n: usize) -> Result<QVec> {
    let mut pts = vec![vec![Q::zero(); n]];
    pts.extend(rays.iter().cloned());
    let p = Polytope::hull_of(&pts);
    let zero = vec![Q::zero(); n];
    let Some(i) = p.vertices().iter().position(|v| *v == zero) else {
        return Err(Error::Precondition("recession cone contains a line".into()));
    };
    if p.vertices().len() == 1 {
        return Ok(zero);
    }
    Ok(p.vertex_functional(i))
}

fn normalized_rays(rays: &[QVec]) -> Vec<Vec<BigInt>> {
    let mut rs: Vec<Vec<BigInt>> =
        rays.iter().filter(|r| r.iter().any(|x| !x.is_zero())).map(|r| primitive_integer(r)).collect();
    rs.sort();
    rs.dedup();
    rs
}

/// conv(V) + cone(R) cut by {g <= c}.
fn truncate(p: &Polytope, rays: &[QVec], g: &[Q], c: &Q) -> Polytope {
    let mut pts: Vec<QVec> = p.vertices().to_vec();
    for v in p.vertices() {
        let gap = c - dot(g, v);
        for r in rays {
            let t = &gap / dot(g, r);
            pts.push(add(v, &scale(r, &t)));
        }
    }
    Polytope::hull_of(&pts)
}

/// Section of conv(V) + cone(R) at level `g = c`, valid when `c` exceeds `g` on V.
fn slice(p: &Polytope, rays: &[QVec], g: &[Q], c: &Q) -> Polytope {
    let mut pts = Vec::new();
    for v in p.vertices() {
        let gap = c - dot(g, v);
        for r in rays {
            pts.push(add(v, &scale(r, &(&gap / dot(g, r)))));
        }
    }
    Polytope::hull_of(&pts)
}

/// Mixed volume of pairs, truncating each pair far out along the cone.
pub fn mixed_volume_pairs(pairs: &[PolytopePair]) -> Result<Q> {
    mixed_volume_pairs_at(pairs, &Q::one())
}

/// Same as `mixed_volume_pairs` with the cut placed `depth > 0` beyond the data.
pub fn mixed_volume_pairs_at(pairs: &[PolytopePair], depth: &Q) -> Result<Q> {
    let m = pairs.len();
    if m == 0 {
        return Err(Error::InvalidInput("no pairs".into()));
    }
    let rays = normalized_rays(&pairs[0].rays);
    for p in pairs {
        check_dim(m, p.big.ambient_dim())?;
        check_dim(m, p.small.ambient_dim())?;
        if normalized_rays(&p.rays) != rays {
            return Err(Error::Precondition("pairs must share one recession cone".into()));
        }
    }
    let bigs: Vec<Polytope> = pairs.iter().map(|p| p.big.clone()).collect();
    let smalls: Vec<Polytope> = pairs.iter().map(|p| p.small.clone()).collect();
    if rays.is_empty() {
        return Ok(mixed_volume(&bigs)? - mixed_volume(&smalls)?);
    }
    let rays: Vec<QVec> = rays.iter().map(|r| to_q(r)).collect();
    let g = interior_dual(&rays, m)?;
    let top = bigs.iter().chain(&smalls).flat_map(|p| p.vertices().iter().map(|v| dot(&g, v))).max().expect("nonempty");
    let c = top + depth;
    for p in pairs {
        if slice(&p.big, &rays, &g, &c) != slice(&p.small, &rays, &g, &c) {
            return Err(Error::UnboundedDifference);
        }
    }
    let tb: Vec<Polytope> = bigs.iter().map(|p| truncate(p, &rays, &g, &c)).collect();
    let ts: Vec<Polytope> = smalls.iter().map(|p| truncate(p, &rays, &g, &c)).collect();
    Ok(mixed_volume(&tb)? - mixed_volume(&ts)?)
}

/// Integral over the projection of the upper height function, where the
/// first coordinate is the height; `scale` multiplies Lebesgue measure.
pub fn shadow_volume(b: &Polytope, scale: &Q) -> Q {
    let m = b.ambient_dim() - 1;
    let base = b.project(&(1..=m).collect::<Vec<_>>());
    if base.dim() < m {
        return Q::zero();
    }
    let s0 = b.vertices().iter().map(|v| v[0].clone()).min().expect("nonempty");
    let mut pts = b.vertices().to_vec();
    for v in base.vertices() {
        let mut w = vec![s0.clone()];
        w.extend(v.iter().cloned());
        pts.push(w);
    }
    let under = Polytope::hull_of(&pts);
    (under.volume() + &s0 * base.volume()) * scale
}

/// Polarized shadow volume of m+1 bodies in R ⊕ R^m.
pub fn mixed_shadow_volume(bs: &[Polytope], scale: &Q) -> Result<Q> {
    let p = bs.len();
    if p == 0 {
        return Err(Error::InvalidInput("no bodies".into()));
    }
    for b in bs {
        check_dim(p, b.ambient_dim())?;
    }
    let total: Q = (1usize..1 << p)
        .into_par_iter()
        .map(|mask| sign(p - mask.count_ones() as usize) * shadow_volume(&subset_sum(bs, mask), scale))
        .reduce(Q::zero, |a, b| a + b);
    Ok(total / Q::from_integer(factorial(p)))
}

/// P_I: the hull of P_i × {e_i} ⊂ R^m ⊕ R^l over i ∈ I, with e_0 = 0.
pub fn cayley_prism(ps: &[Polytope], subset: &[usize]) -> Polytope {
    let l = ps.len() - 1;
    let mut pts = Vec::new();
    for &i in subset {
        for v in ps[i].vertices() {
            let mut w = v.clone();
            w.extend((1..=l).map(|j| if j == i { Q::one() } else { Q::zero() }));
            pts.push(w);
        }
    }
    Polytope::hull_of(&pts)
}

/// The two sides of the prism identity for P_0, .., P_l ⊂ R^m:
/// Σ_I (-1)^(l+1-|I|) (m+|I|-1)! Vol(P_I) and m! Σ_{a_i > 0, Σ a_i = m} P_0^a_0 ⋯ P_l^a_l.
pub fn prism_volume_sides(ps: &[Polytope]) -> Result<(Q, Q)> {
    let Some(first) = ps.first() else {
        return Err(Error::InvalidInput("no polytopes".into()));
    };
    let m = first.ambient_dim();
    for p in ps {
        check_dim(m, p.ambient_dim())?;
    }
    let l = ps.len() - 1;
    let mut lhs = Q::zero();
    for mask in 1usize..1 << ps.len() {
        let subset: Vec<usize> = (0..ps.len()).filter(|i| mask >> i & 1 == 1).collect();
        let d = m + subset.len() - 1;
        let p = cayley_prism(ps, &subset);
        if p.dim() == d {
            lhs += sign(l + 1 - subset.len()) * Q::from_integer(factorial(d)) * p.relative_volume();
        }
    }
    let mut rhs = Q::zero();
    for a in compositions(m, ps.len()) {
        let args: Vec<Polytope> =
            a.iter().enumerate().flat_map(|(i, &ai)| std::iter::repeat_n(ps[i].clone(), ai)).collect();
        rhs += mixed_volume(&args)?;
    }
    Ok((lhs, rhs * Q::from_integer(factorial(m))))
}

/// Compositions of `total` into `parts` positive integers.
pub fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn go(total: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 0 {
            if total == 0 {
                out.push(cur.clone());
            }
            return;
        }
        if total < parts {
            return;
        }
        for a in 1..=total - (parts - 1) {
            cur.push(a);
            go(total - a, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(total, parts, &mut Vec::new(), &mut out);
    out
}

/// The signed integer (-1)^(m-k) m! Σ over positive compositions of m of the
/// pair mixed-volume monomials.
pub fn milnor_fiber_euler(pairs: &[PolytopePair], m: usize) -> Result<BigInt> {
    let k = pairs.len();
    if k == 0 || k > m {
        return Err(Error::Precondition(format!("need 1 <= k <= m, got k = {k}, m = {m}")));
    }
    let mut sum = Q::zero();
    for a in compositions(m, k) {
        let args: Vec<PolytopePair> =
            a.iter().enumerate().flat_map(|(i, &ai)| std::iter::repeat_n(pairs[i].clone(), ai)).collect();
        sum += mixed_volume_pairs(&args)?;
    }
    let v = sign(m - k) * Q::from_integer(factorial(m)) * sum;
    if !v.is_integer() {
        return Err(Error::Defect(format!("non-integral Euler characteristic {v}")));
    }
    Ok(v.to_integer())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::cube;
    use crate::rational::{q, qf, qvec};

    fn seg_x() -> Polytope {
        Polytope::from_i64(&[vec![0, 0], vec![1, 0]])
    }

    fn seg_y() -> Polytope {
        Polytope::from_i64(&[vec![0, 0], vec![0, 1]])
    }

    #[test]
    fn prism_of_two_squares() {
        let sq = cube(2, 1);
        assert_eq!(prism_volume_sides(&[sq.clone(), sq.clone()]).unwrap(), (q(2), q(2)));
        let tri = Polytope::from_i64(&[vec![0, 0], vec![2, 0], vec![0, 1]]);
        let (lhs, rhs) = prism_volume_sides(&[sq, tri]).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn mixed_volume_examples() {
        let sq = cube(2, 1);
        assert_eq!(mixed_volume(&[sq.clone(), sq.clone()]).unwrap(), q(1));
        assert_eq!(mixed_volume(&[seg_x(), seg_y()]).unwrap(), qf(1, 2));
        assert_eq!(mixed_volume(&[seg_x(), seg_x()]).unwrap(), q(0));
        assert!(mixed_volume(&[sq]).is_err());
    }

    #[test]
    fn zero_criterion_examples() {
        assert!(mv_zero_criterion(&[seg_x(), seg_x()]));
        assert!(!mv_zero_criterion(&[cube(2, 1), cube(2, 1)]));
        assert!(!mv_zero_criterion(&[seg_x(), seg_y()]));
    }

    #[test]
    fn pair_examples() {
        let p = Polytope::from_i64(&[vec![0, 0], vec![2, 1], vec![1, 3]]);
        let qq = cube(2, 1);
        let pairs = vec![PolytopePair::bounded(p.clone(), qq.clone()), PolytopePair::bounded(p.clone(), qq.clone())];
        let want = mixed_volume(&[p.clone(), p.clone()]).unwrap() - mixed_volume(&[qq.clone(), qq.clone()]).unwrap();
        assert_eq!(mixed_volume_pairs(&pairs).unwrap(), want);

        let same = vec![PolytopePair::bounded(p.clone(), p.clone()), PolytopePair::bounded(qq.clone(), qq.clone())];
        assert_eq!(mixed_volume_pairs(&same).unwrap(), q(0));

        let ray = vec![qvec(&[1])];
        let half = |a: i64, b: i64| PolytopePair {
            big: Polytope::from_i64(&[vec![a]]),
            small: Polytope::from_i64(&[vec![b]]),
            rays: ray.clone(),
        };
        assert_eq!(mixed_volume_pairs(&[half(2, 7)]).unwrap(), q(5));
    }

    #[test]
    fn unbounded_difference_detected() {
        let quad = vec![qvec(&[1, 0]), qvec(&[0, 1])];
        let pair = PolytopePair {
            big: Polytope::from_i64(&[vec![0, 0]]),
            small: Polytope::from_i64(&[vec![1, 0]]),
            rays: quad,
        };
        assert_eq!(mixed_volume_pairs(&[pair.clone(), pair]), Err(Error::UnboundedDifference));
    }

    #[test]
    fn truncation_depth_is_irrelevant() {
        let quad = vec![qvec(&[1, 0]), qvec(&[0, 1])];
        let a = PolytopePair {
            big: Polytope::from_i64(&[vec![0, 0]]),
            small: Polytope::from_i64(&[vec![2, 0], vec![0, 1]]),
            rays: quad.clone(),
        };
        let b = PolytopePair {
            big: Polytope::from_i64(&[vec![0, 1], vec![1, 0]]),
            small: Polytope::from_i64(&[vec![3, 0], vec![0, 3]]),
            rays: quad,
        };
        let v1 = mixed_volume_pairs_at(&[a.clone(), b.clone()], &q(1)).unwrap();
        let v2 = mixed_volume_pairs_at(&[a, b], &q(7)).unwrap();
        assert_eq!(v1, v2);
    }

    #[test]
    fn shadow_examples() {
        assert_eq!(shadow_volume(&cube(2, 1), &q(1)), q(1));
        let tri = Polytope::from_i64(&[vec![0, 0], vec![1, 0], vec![0, 1]]);
        assert_eq!(shadow_volume(&tri, &q(1)), qf(1, 2));
        let low = cube(2, 1).translate(&qvec(&[-1, 0]));
        assert_eq!(shadow_volume(&low, &q(1)), q(0));
    }

    #[test]
    fn mixed_shadow_examples() {
        let b = Polytope::from_i64(&[vec![0, 0], vec![1, 0], vec![2, 1], vec![0, 2]]);
        assert_eq!(mixed_shadow_volume(&[b.clone(), b.clone()], &q(1)).unwrap(), shadow_volume(&b, &q(1)));
        let b0 = cube(2, 1).translate(&qvec(&[2, 0]));
        assert_eq!(mixed_shadow_volume(&[b0, cube(2, 1)], &q(1)).unwrap(), q(2));
        // stretching every argument along t by s scales the value by s
        let c = Polytope::from_i64(&[vec![1, 0], vec![0, 3], vec![2, 1]]);
        let d3 = |p: &Polytope| p.map_points(|v| vec![&v[0] * q(3), v[1].clone()]);
        assert_eq!(
            mixed_shadow_volume(&[d3(&b), d3(&c)], &q(1)).unwrap(),
            q(3) * mixed_shadow_volume(&[b, c], &q(1)).unwrap()
        );
    }

    #[test]
    fn milnor_examples() {
        let pos = vec![qvec(&[1])];
        for a in 1..4 {
            let pair = PolytopePair {
                big: Polytope::from_i64(&[vec![0]]),
                small: Polytope::from_i64(&[vec![a]]),
                rays: pos.clone(),
            };
            assert_eq!(milnor_fiber_euler(&[pair], 1).unwrap(), BigInt::from(a));
        }
        let quad = vec![qvec(&[1, 0]), qvec(&[0, 1])];
        let pair = PolytopePair {
            big: Polytope::from_i64(&[vec![0, 0]]),
            small: Polytope::from_i64(&[vec![1, 0], vec![0, 1]]),
            rays: quad.clone(),
        };
        // 2!·V = 1, with sign (-1)^(m-k)
        assert_eq!(mixed_volume_pairs(&[pair.clone(), pair.clone()]).unwrap() * q(2), q(1));
        assert_eq!(milnor_fiber_euler(&[pair], 2).unwrap(), BigInt::from(-1));
        let trivial = PolytopePair {
            big: Polytope::from_i64(&[vec![0, 0]]),
            small: Polytope::from_i64(&[vec![0, 0]]),
            rays: quad,
        };
        assert_eq!(milnor_fiber_euler(&[trivial], 2).unwrap(), BigInt::from(0));
    }

    #[test]
    fn composition_counts() {
        assert_eq!(compositions(4, 2).len(), 3);
        assert_eq!(compositions(2, 3).len(), 0);
        assert_eq!(compositions(3, 3), vec![vec![1, 1, 1]]);
    }
}
