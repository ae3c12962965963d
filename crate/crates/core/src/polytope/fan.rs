use super::Polytope;
use crate::error::Result;
use crate::rational::{nullspace, QVec};

/// Normal cone of one face: functionals minimized on (a superset of) it.
#[derive(Clone, Debug)]
pub struct Cone {
    /// Index of the face in the source polytope's face list.
    pub face: usize,
    /// Inner facet normals of the facets containing the face.
    pub generators: Vec<QVec>,
    /// Functionals constant on the polytope.
    pub lineality: Vec<QVec>,
    pub dim: usize,
}

#[derive(Clone, Debug)]
pub struct NormalFan {
    pub source: Polytope,
    pub cones: Vec<Cone>,
}

impl NormalFan {
    pub fn maximal_cones(&self) -> impl Iterator<Item = &Cone> {
        let n = self.source.ambient_dim();
        self.cones.iter().filter(move |c| c.dim == n)
    }

    /// Two complete fans agree iff their common refinement has no more cones
    /// than either of them.
    pub fn same_as(&self, other: &NormalFan) -> bool {
        let joint = self.source.sum_unchecked(&other.source);
        let n = joint.faces().len();
        n == self.cones.len() && n == other.cones.len()
    }
}

pub fn normal_fan(p: &Polytope) -> NormalFan {
    let n = p.ambient_dim();
    let lineality = nullspace(p.direction_basis(), n);
    let cones = p
        .faces()
        .iter()
        .enumerate()
        .map(|(i, f)| Cone {
            face: i,
            generators: f.facets.ones().map(|j| p.facets()[j].normal.clone()).collect(),
            lineality: lineality.clone(),
            dim: n - f.dim,
        })
        .collect();
    NormalFan { source: p.clone(), cones }
}

/// The normal fan of a Minkowski sum refines the fans of its summands and is
/// their coarsest common refinement.
pub fn common_refinement(fans: &[NormalFan]) -> Result<NormalFan> {
    let sources: Vec<Polytope> = fans.iter().map(|f| f.source.clone()).collect();
    Ok(normal_fan(&Polytope::sum_all(&sources)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::cube;

    #[test]
    fn square_fan() {
        let f = normal_fan(&cube(2, 1));
        assert_eq!(f.maximal_cones().count(), 4);
        let r = common_refinement(&[f.clone(), f.clone()]).unwrap();
        assert!(r.same_as(&f));
    }

    #[test]
    fn segments_refine_to_quadrants() {
        let sx = normal_fan(&Polytope::from_i64(&[vec![0, 0], vec![1, 0]]));
        let sy = normal_fan(&Polytope::from_i64(&[vec![0, 0], vec![0, 1]]));
        assert_eq!(sx.maximal_cones().count(), 2);
        assert_eq!(sx.cones[0].lineality.len(), 1);
        let r = common_refinement(&[sx.clone(), sy]).unwrap();
        assert!(r.same_as(&normal_fan(&cube(2, 1))));
        assert!(!r.same_as(&sx));
    }
}
