//! Formal rational Minkowski combinations and their realization.

use num_traits::{Signed, Zero};

use super::Polytope;
use crate::error::{check_dim, Error, Result};
use crate::rational::{sub, QVec, Q};

#[derive(Clone, Debug)]
pub struct VirtualPolytope {
    ambient: usize,
    terms: Vec<(Q, Polytope)>,
}

impl VirtualPolytope {
    pub fn zero(ambient: usize) -> Self {
        VirtualPolytope { ambient, terms: vec![] }
    }

    pub fn from_polytope(p: &Polytope) -> Self {
        VirtualPolytope { ambient: p.ambient_dim(), terms: vec![(Q::from_integer(1.into()), p.clone())] }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn terms(&self) -> &[(Q, Polytope)] {
        &self.terms
    }

    pub fn add_term(&mut self, c: Q, p: &Polytope) -> Result<()> {
        check_dim(self.ambient, p.ambient_dim())?;
        if !c.is_zero() {
            self.terms.push((c, p.clone()));
        }
        Ok(())
    }

    pub fn plus(&self, other: &VirtualPolytope) -> Result<VirtualPolytope> {
        check_dim(self.ambient, other.ambient)?;
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        Ok(out)
    }

    pub fn minus(&self, other: &VirtualPolytope) -> Result<VirtualPolytope> {
        self.plus(&other.scale_signed(&-Q::from_integer(1.into())))
    }

    /// Scaling by `c >= 0`.
    pub fn scale(&self, c: &Q) -> Result<VirtualPolytope> {
        if c.is_negative() {
            return Err(Error::Precondition("virtual polytopes scale by nonnegative factors".into()));
        }
        Ok(self.scale_signed(c))
    }

    pub(crate) fn scale_signed(&self, c: &Q) -> VirtualPolytope {
        if c.is_zero() {
            return VirtualPolytope::zero(self.ambient);
        }
        VirtualPolytope { ambient: self.ambient, terms: self.terms.iter().map(|(a, p)| (a * c, p.clone())).collect() }
    }

    /// Support function value at `l` (minimum convention).
    pub fn support(&self, l: &[Q]) -> Q {
        self.terms.iter().fold(Q::zero(), |acc, (c, p)| acc + c * p.support(l))
    }

    /// Positive and negative parts as genuine polytopes, `self = pos - neg`.
    pub fn split(&self) -> (Polytope, Polytope) {
        let mut pos = Polytope::origin(self.ambient);
        let mut neg = Polytope::origin(self.ambient);
        for (c, p) in &self.terms {
            if c.is_positive() {
                pos = pos.sum_unchecked(&p.scale(c));
            } else {
                neg = neg.sum_unchecked(&p.scale(&-c));
            }
        }
        (pos, neg)
    }

    /// Equality of support functions, decided by `pos_a + neg_b = pos_b + neg_a`.
    pub fn equals(&self, other: &VirtualPolytope) -> bool {
        if self.ambient != other.ambient {
            return false;
        }
        let (pa, na) = self.split();
        let (pb, nb) = other.split();
        pa.sum_unchecked(&nb) == pb.sum_unchecked(&na)
    }

    /// The polytope R with `R + neg = pos`, if there is one.
    pub fn realize(&self) -> Result<Polytope> {
        let (pos, neg) = self.split();
        if neg.is_point() {
            return Ok(pos.translate(&crate::rational::neg(&neg.vertices()[0])));
        }
        let joint = pos.sum_unchecked(&neg);
        let mut cands: Vec<QVec> = Vec::with_capacity(joint.vertices().len());
        for i in 0..joint.vertices().len() {
            let g = joint.vertex_functional(i);
            let a = pos.argmin(&g);
            let b = neg.argmin(&g);
            debug_assert!(a.len() == 1 && b.len() == 1);
            cands.push(sub(&a[0], &b[0]));
        }
        let r = Polytope::hull_of(&cands);
        let back = r.sum_unchecked(&neg);
        if back == pos {
            return Ok(r);
        }
        let witness = back
            .facets()
            .iter()
            .chain(pos.facets())
            .map(|f| f.normal.clone())
            .find(|l| back.support(l) != pos.support(l))
            .or_else(|| {
                (0..pos.vertices().len()).map(|i| pos.vertex_functional(i)).find(|l| back.support(l) != pos.support(l))
            })
            .unwrap_or_default();
        Err(Error::NotRealizable { witness: witness.iter().map(|x| x.to_string()).collect() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::cube;
    use crate::rational::q;

    #[test]
    fn square_difference() {
        let v =
            VirtualPolytope::from_polytope(&cube(2, 2)).minus(&VirtualPolytope::from_polytope(&cube(2, 1))).unwrap();
        assert_eq!(v.realize().unwrap(), cube(2, 1));
    }

    #[test]
    fn triangle_minus_segment_fails() {
        let t = Polytope::from_i64(&[vec![0, 0], vec![1, 0], vec![0, 1]]);
        let s = Polytope::from_i64(&[vec![0, 0], vec![1, 0]]);
        let v = VirtualPolytope::from_polytope(&t).minus(&VirtualPolytope::from_polytope(&s)).unwrap();
        match v.realize() {
            Err(Error::NotRealizable { witness }) => assert_eq!(witness.len(), 2),
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn equality_and_scaling() {
        let a = VirtualPolytope::from_polytope(&cube(2, 2));
        let b = VirtualPolytope::from_polytope(&cube(2, 1)).scale(&q(2)).unwrap();
        assert!(a.equals(&b));
        assert!(a.scale(&q(-1)).is_err());
        assert!(a.minus(&b).unwrap().realize().unwrap().is_point());
        assert_eq!(a.support(&crate::rational::qvec(&[-1, 0])), q(-2));
    }
}
