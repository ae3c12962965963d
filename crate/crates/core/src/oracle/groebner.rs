//! Counting torus solutions of zero-dimensional systems over F_p.
//!
//! Random integer coefficients reduced mod a large prime behave generically
//! with overwhelming probability, so the quotient dimension of the saturated
//! ideal is the number of solutions in (C*)^n counted with multiplicity.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SparsePoly;
use crate::error::{Error, Result};
use crate::polytope::Polytope;

const P: u64 = 2_147_483_647;

fn inv(a: u64) -> u64 {
    let (mut base, mut e, mut acc) = (a % P, P - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % P;
        }
        base = base * base % P;
        e >>= 1;
    }
    acc
}

fn grevlex(a: &[u32], b: &[u32]) -> Ordering {
    let (da, db): (u32, u32) = (a.iter().sum(), b.iter().sum());
    da.cmp(&db).then_with(|| {
        for i in (0..a.len()).rev() {
            if a[i] != b[i] {
                return b[i].cmp(&a[i]);
            }
        }
        Ordering::Equal
    })
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// Terms sorted by descending grevlex, no zero coefficients.
#[derive(Clone, Debug)]
struct FpPoly(Vec<(Vec<u32>, u64)>);

impl FpPoly {
    fn from_int(p: &SparsePoly, nvars: usize) -> Self {
        let modulus = BigInt::from(P);
        let mut terms: Vec<(Vec<u32>, u64)> = p
            .terms()
            .map(|(e, c)| {
                let mut m = e.clone();
                m.resize(nvars, 0);
                (m, c.mod_floor(&modulus).to_u64().expect("reduced mod p"))
            })
            .filter(|(_, c)| *c != 0)
            .collect();
        terms.sort_by(|a, b| grevlex(&b.0, &a.0));
        FpPoly(terms)
    }

    fn lead(&self) -> &[u32] {
        &self.0[0].0
    }

    fn monic(mut self) -> Self {
        if let Some(&(_, c)) = self.0.first() {
            let ci = inv(c);
            for t in &mut self.0 {
                t.1 = t.1 * ci % P;
            }
        }
        self
    }

    /// self - c·m·g
    fn sub_scaled(&self, c: u64, m: &[u32], g: &FpPoly) -> FpPoly {
        let shifted = g.0.iter().map(|(e, x)| {
            let e: Vec<u32> = e.iter().zip(m).map(|(a, b)| a + b).collect();
            (e, (P - c * x % P) % P)
        });
        let mut out = Vec::with_capacity(self.0.len() + g.0.len());
        let mut left = self.0.iter().cloned().peekable();
        let mut right = shifted.peekable();
        loop {
            let ord = match (left.peek(), right.peek()) {
                (None, None) => break,
                (Some(_), None) => Ordering::Greater,
                (None, Some(_)) => Ordering::Less,
                (Some(a), Some(b)) => grevlex(&a.0, &b.0),
            };
            match ord {
                Ordering::Greater => out.push(left.next().expect("peeked")),
                Ordering::Less => out.push(right.next().expect("peeked")),
                Ordering::Equal => {
                    let (e, x) = left.next().expect("peeked");
                    let (_, y) = right.next().expect("peeked");
                    let s = (x + y) % P;
                    if s != 0 {
                        out.push((e, s));
                    }
                }
            }
        }
        FpPoly(out.into_iter().filter(|t| t.1 != 0).collect())
    }
}

fn reduce(f: &FpPoly, basis: &[FpPoly]) -> FpPoly {
    let mut p = f.clone();
    let mut rest = Vec::new();
    while let Some((m, c)) = p.0.first().cloned() {
        match basis.iter().find(|g| divides(g.lead(), &m)) {
            Some(g) => {
                let q: Vec<u32> = m.iter().zip(g.lead()).map(|(a, b)| a - b).collect();
                p = p.sub_scaled(c * inv(g.0[0].1) % P, &q, g);
            }
            None => {
                rest.push((m, c));
                p.0.remove(0);
            }
        }
    }
    FpPoly(rest)
}

fn lcm(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

/// Reduced grevlex basis by Buchberger with the coprime-leads criterion.
fn groebner(gens: Vec<FpPoly>) -> Vec<FpPoly> {
    let mut g: Vec<FpPoly> = gens.into_iter().filter(|f| !f.0.is_empty()).map(FpPoly::monic).collect();
    let mut pairs: Vec<(usize, usize)> = (0..g.len()).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
    while !pairs.is_empty() {
        // normal strategy: smallest lcm first
        let pick = (0..pairs.len())
            .min_by(|&s, &t| {
                let l = |(i, j): (usize, usize)| lcm(g[i].lead(), g[j].lead());
                grevlex(&l(pairs[s]), &l(pairs[t]))
            })
            .expect("nonempty");
        let (i, j) = pairs.swap_remove(pick);
        let (a, b) = (g[i].lead().to_vec(), g[j].lead().to_vec());
        if a.iter().zip(&b).all(|(x, y)| *x == 0 || *y == 0) {
            continue;
        }
        let l = lcm(&a, &b);
        let ma: Vec<u32> = l.iter().zip(&a).map(|(x, y)| x - y).collect();
        let mb: Vec<u32> = l.iter().zip(&b).map(|(x, y)| x - y).collect();
        let zero = FpPoly(Vec::new());
        let s = zero.sub_scaled(P - 1, &ma, &g[i]).sub_scaled(1, &mb, &g[j]);
        let r = reduce(&s, &g);
        if !r.0.is_empty() {
            let n = g.len();
            g.push(r.monic());
            pairs.extend((0..n).map(|k| (k, n)));
        }
    }
    let mut minimal: Vec<FpPoly> = Vec::new();
    for (idx, f) in g.iter().enumerate() {
        let redundant = g
            .iter()
            .enumerate()
            .any(|(other, h)| other != idx && divides(h.lead(), f.lead()) && (h.lead() != f.lead() || other < idx));
        if !redundant {
            minimal.push(f.clone());
        }
    }
    (0..minimal.len())
        .map(|i| {
            let others: Vec<FpPoly> =
                minimal.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, h)| h.clone()).collect();
            let head = FpPoly(vec![minimal[i].0[0].clone()]);
            let tail = reduce(&FpPoly(minimal[i].0[1..].to_vec()), &others);
            FpPoly(head.0.into_iter().chain(tail.0).collect())
        })
        .collect()
}

fn standard_monomial_count(basis: &[FpPoly], nvars: usize) -> Result<usize> {
    let leads: Vec<&[u32]> = basis.iter().map(|f| f.lead()).collect();
    if leads.iter().any(|l| l.iter().all(|&x| x == 0)) {
        return Ok(0);
    }
    let mut bounds = Vec::with_capacity(nvars);
    for i in 0..nvars {
        let pure = leads.iter().filter(|l| l.iter().enumerate().all(|(j, &x)| j == i || x == 0)).map(|l| l[i]).min();
        bounds.push(pure.ok_or_else(|| Error::Precondition("system is not zero-dimensional".into()))?);
    }
    let mut count = 0;
    let mut m = vec![0u32; nvars];
    'odometer: loop {
        if !leads.iter().any(|l| divides(l, &m)) {
            count += 1;
        }
        for i in 0..nvars {
            m[i] += 1;
            if m[i] < bounds[i] {
                continue 'odometer;
            }
            m[i] = 0;
        }
        break;
    }
    Ok(count)
}

/// Solutions in (C*)^n with multiplicity, computed mod p after saturating by
/// the product of the variables.
pub fn torus_solution_count(system: &[SparsePoly]) -> Result<usize> {
    let n = system.first().map(|f| f.nvars()).ok_or_else(|| Error::InvalidInput("empty system".into()))?;
    if system.iter().any(|f| f.nvars() != n) {
        return Err(Error::InvalidInput("polynomials in different rings".into()));
    }
    let mut gens: Vec<FpPoly> = system.iter().map(|f| FpPoly::from_int(f, n + 1)).collect();
    gens.push(FpPoly(vec![(vec![1; n + 1], 1), (vec![0; n + 1], P - 1)]));
    standard_monomial_count(&groebner(gens), n + 1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalSystemCounts {
    pub curve: usize,
    pub surface: usize,
}

/// Solves the critical systems of the first coordinate for random
/// polynomials supported on the lattice points of `delta` ⊂ R^3.
pub fn critical_point_oracle(delta: &Polytope, seed: u64) -> Result<CriticalSystemCounts> {
    if delta.ambient_dim() != 3 {
        return Err(Error::InvalidInput("expected a polytope in R^3".into()));
    }
    let pts = delta.lattice_points();
    let lo: Vec<i64> = (0..3).map(|i| pts.iter().map(|p| p[i]).min().unwrap_or(0)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut random_poly = || {
        let mut f = SparsePoly::zero(3);
        for p in &pts {
            let e: Vec<u32> = p.iter().zip(&lo).map(|(x, l)| (x - l) as u32).collect();
            let mut c = 0i64;
            while c == 0 {
                c = rng.random_range(-50..=50);
            }
            f = &f + &SparsePoly::monomial(3, e, c);
        }
        f
    };
    let f = random_poly();
    let g = random_poly();
    let y = SparsePoly::var(3, 1);
    let z = SparsePoly::var(3, 2);
    let log_y = |h: &SparsePoly| &y * &h.derivative(1);
    let log_z = |h: &SparsePoly| &z * &h.derivative(2);
    let jac = &(&log_y(&f) * &log_z(&g)) - &(&log_z(&f) * &log_y(&g));
    Ok(CriticalSystemCounts {
        curve: torus_solution_count(&[f.clone(), g, jac])?,
        surface: torus_solution_count(&[f.clone(), log_y(&f), log_z(&f)])?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{cube, standard_simplex};

    #[test]
    fn counts_points_in_the_torus() {
        // (x - 1)(x - 2) = 0, y^2 = 4 has four solutions; x·(x - 1) only one
        let x = SparsePoly::var(2, 0);
        let y = SparsePoly::var(2, 1);
        let c = |v: i64| SparsePoly::constant(2, v);
        let f = &(&x - &c(1)) * &(&x - &c(2));
        let g = &(&y * &y) - &c(4);
        assert_eq!(torus_solution_count(&[f, g.clone()]).unwrap(), 4);
        let h = &x * &(&x - &c(1));
        assert_eq!(torus_solution_count(&[h, g]).unwrap(), 2);
        assert!(torus_solution_count(&[&x - &c(1)]).is_err());
    }

    #[test]
    fn simplex_and_cube() {
        for seed in 0..2 {
            let s = critical_point_oracle(&standard_simplex(3), seed).unwrap();
            assert_eq!((s.curve, s.surface), (0, 0));
            let c = critical_point_oracle(&cube(3, 1), seed).unwrap();
            assert_eq!((c.curve, c.surface), (4, 2));
        }
    }
}
