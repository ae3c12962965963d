//! Pulling triangulations and lattice-normalized volumes.

use std::collections::HashMap;

use num_traits::{Signed, Zero};

use super::Polytope;
use crate::rational::{det, sub, QVec, Q};

/// Pulling triangulation from the smallest vertex, recursing through the
/// facets of each face that avoid it.
pub fn triangulate(p: &Polytope) -> Vec<Vec<usize>> {
    let faces = p.faces();
    let top = faces.len() - 1;
    let mut memo: HashMap<usize, Vec<Vec<usize>>> = HashMap::new();
    pull(p, top, &mut memo)
}

fn pull(p: &Polytope, idx: usize, memo: &mut HashMap<usize, Vec<Vec<usize>>>) -> Vec<Vec<usize>> {
    if let Some(s) = memo.get(&idx) {
        return s.clone();
    }
    let faces = p.faces();
    let f = &faces[idx];
    let out = if f.dim == 0 {
        vec![f.vertices.clone()]
    } else {
        let v0 = f.vertices[0];
        let mut out = Vec::new();
        for (gi, g) in faces.iter().enumerate() {
            if g.dim + 1 != f.dim || !g.bits.is_subset(&f.bits) || g.bits.contains(v0) {
                continue;
            }
            for mut s in pull(p, gi, memo) {
                s.insert(0, v0);
                out.push(s);
            }
        }
        out
    };
    memo.insert(idx, out.clone());
    out
}

pub fn lattice_volume(p: &Polytope) -> Q {
    let d = p.dim();
    if d == 0 {
        return Q::from_integer(1.into());
    }
    let frame = p.lattice_frame();
    let coords: Vec<QVec> = p.vertices().iter().map(|v| frame.coords(v)).collect();
    let mut total = Q::zero();
    for s in triangulate(p) {
        let m: Vec<QVec> = s[1..].iter().map(|&i| sub(&coords[i], &coords[s[0]])).collect();
        total += det(&m).abs();
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{cube, standard_simplex};

    #[test]
    fn simplex_counts() {
        assert_eq!(triangulate(&standard_simplex(3)).len(), 1);
        assert_eq!(triangulate(&cube(2, 1)).len(), 2);
        assert_eq!(triangulate(&cube(3, 1)).len(), 6);
    }
}
