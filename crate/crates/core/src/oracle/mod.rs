//! Symbolic ground truth at desk scale: sparse integer polynomials,
//! Sylvester resultants and univariate discriminants.

mod groebner;

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Signed, Zero};

use crate::error::{check_dim, Error, Result};
use crate::obstruction::PointConfiguration;
use crate::polytope::Polytope;
use crate::rational::q;

pub use groebner::{critical_point_oracle, torus_solution_count, CriticalSystemCounts};

/// Largest degree in the eliminated variable that resultants accept.
pub const DEGREE_CAP: usize = 6;

/// Polynomial with integer coefficients; exponent vectors are keys, zero
/// coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SparsePoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl SparsePoly {
    pub fn zero(nvars: usize) -> Self {
        SparsePoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: impl Into<BigInt>) -> Self {
        Self::monomial(nvars, vec![0; nvars], c)
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(nvars, e, 1)
    }

    pub fn monomial(nvars: usize, exps: Vec<u32>, c: impl Into<BigInt>) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(exps, c.into());
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, BigInt)>) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            check_dim(nvars, e.len())?;
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, e: Vec<u32>, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Vec<u32>, &BigInt)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        SparsePoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect() }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::constant(self.nvars, 1);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn degree_in(&self, var: usize) -> usize {
        self.terms.keys().map(|e| e[var] as usize).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> usize {
        self.terms.keys().map(|e| e.iter().map(|&x| x as usize).sum()).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    /// Coefficients of var^0, var^1, ..; each has the exponent of `var` cleared.
    pub fn coeffs_in(&self, var: usize) -> Vec<SparsePoly> {
        let mut out = vec![Self::zero(self.nvars); self.degree_in(var) + 1];
        for (e, c) in &self.terms {
            let mut f = e.clone();
            let d = f[var] as usize;
            f[var] = 0;
            out[d].add_term(f, c.clone());
        }
        out
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[var] > 0 {
                let mut f = e.clone();
                f[var] -= 1;
                out.add_term(f, c * BigInt::from(e[var]));
            }
        }
        out
    }

    /// Exact quotient, or None when `d` does not divide `self`.
    pub fn div_exact(&self, d: &SparsePoly) -> Option<SparsePoly> {
        let (ld, lc) = d.terms.iter().next_back()?;
        let mut r = self.clone();
        let mut quot = Self::zero(self.nvars);
        while let Some((lr, cr)) = r.terms.iter().next_back() {
            if lr.iter().zip(ld).any(|(a, b)| a < b) {
                return None;
            }
            let (qc, rem) = cr.div_rem(lc);
            if !rem.is_zero() {
                return None;
            }
            let e: Vec<u32> = lr.iter().zip(ld).map(|(a, b)| a - b).collect();
            let t = Self::monomial(self.nvars, e, qc);
            r = &r - &(&t * d);
            quot = &quot + &t;
        }
        Some(quot)
    }

    /// Gcd of the coefficients.
    pub fn content(&self) -> BigInt {
        self.terms.values().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divides out the content and makes the lex-leading coefficient positive.
    pub fn primitive(&self) -> Self {
        let mut c = self.content();
        if c.is_zero() {
            return self.clone();
        }
        if self.terms.values().next_back().is_some_and(|x| x.is_negative()) {
            c = -c;
        }
        SparsePoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, x)| (e.clone(), x / &c)).collect() }
    }

    /// Divides out the largest monomial dividing every term.
    pub fn strip_monomial(&self) -> Self {
        let Some(first) = self.terms.keys().next() else {
            return self.clone();
        };
        let m: Vec<u32> = (0..self.nvars).map(|i| self.terms.keys().map(|e| e[i]).min().unwrap_or(first[i])).collect();
        SparsePoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().zip(&m).map(|(a, b)| a - b).collect(), c.clone()))
                .collect(),
        }
    }

    /// Drops variables listed in `vars`; they must not occur.
    pub fn drop_vars(&self, vars: &[usize]) -> Result<Self> {
        let keep: Vec<usize> = (0..self.nvars).filter(|i| !vars.contains(i)).collect();
        let mut out = Self::zero(keep.len());
        for (e, c) in &self.terms {
            if vars.iter().any(|&v| e[v] != 0) {
                return Err(Error::Precondition("dropped variable occurs".into()));
            }
            out.add_term(keep.iter().map(|&i| e[i]).collect(), c.clone());
        }
        Ok(out)
    }

    pub fn newton_polytope(&self) -> Polytope {
        if self.is_zero() {
            return Polytope::origin(self.nvars);
        }
        let pts: Vec<_> = self.terms.keys().map(|e| e.iter().map(|&x| q(x as i64)).collect()).collect();
        Polytope::hull_of(&pts)
    }
}

impl fmt::Debug for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().rev().map(|(e, c)| format!("{c}*{e:?}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Add for &SparsePoly {
    type Output = SparsePoly;
    fn add(self, rhs: &SparsePoly) -> SparsePoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &SparsePoly {
    type Output = SparsePoly;
    fn sub(self, rhs: &SparsePoly) -> SparsePoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl Neg for &SparsePoly {
    type Output = SparsePoly;
    fn neg(self) -> SparsePoly {
        self.scale(&-BigInt::one())
    }
}

impl Mul for &SparsePoly {
    type Output = SparsePoly;
    fn mul(self, rhs: &SparsePoly) -> SparsePoly {
        let mut terms: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                let e: Vec<u32> = a.iter().zip(b).map(|(s, t)| s + t).collect();
                *terms.entry(e).or_insert_with(BigInt::zero) += x * y;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        SparsePoly { nvars: self.nvars, terms }
    }
}

/// Determinant by fraction-free elimination; every division is exact.
fn bareiss_det(mut m: Vec<Vec<SparsePoly>>, nvars: usize) -> SparsePoly {
    let n = m.len();
    if n == 0 {
        return SparsePoly::constant(nvars, 1);
    }
    let mut prev = SparsePoly::constant(nvars, 1);
    let mut negate = false;
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return SparsePoly::zero(nvars);
            };
            m.swap(k, r);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = t.div_exact(&prev).expect("Bareiss division is exact");
            }
            m[i][k] = SparsePoly::zero(nvars);
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if negate {
        -&d
    } else {
        d
    }
}

/// Res_var(f, g), the determinant of the Sylvester matrix in `var`.
pub fn sylvester_resultant(f: &SparsePoly, g: &SparsePoly, var: usize) -> Result<SparsePoly> {
    check_dim(f.nvars, g.nvars)?;
    let m = f.degree_in(var);
    let n = g.degree_in(var);
    for d in [m, n] {
        if d > DEGREE_CAP {
            return Err(Error::DegreeCap { degree: d, cap: DEGREE_CAP });
        }
    }
    let (fc, gc) = (f.coeffs_in(var), g.coeffs_in(var));
    let size = m + n;
    let zero = SparsePoly::zero(f.nvars);
    let mut mat = vec![vec![zero.clone(); size]; size];
    // row i holds y^i f (or y^i g), coefficients from the top degree down
    for i in 0..n {
        for (d, c) in fc.iter().enumerate() {
            mat[i][i + m - d] = c.clone();
        }
    }
    for i in 0..m {
        for (d, c) in gc.iter().enumerate() {
            mat[n + i][i + n - d] = c.clone();
        }
    }
    Ok(bareiss_det(mat, f.nvars))
}

#[derive(Clone, Debug)]
pub struct UnivariateDiscriminant {
    /// In the variables c_a, a ∈ A in sorted order, raised to the index |J|.
    pub poly: SparsePoly,
    pub newton: Polytope,
    pub degree: usize,
    /// Index of the lattice generated by A × {1}.
    pub multiplicity: u32,
}

/// The A-discriminant of Σ c_a y^a for A ⊂ Z, raised to its multiplicity.
pub fn univariate_discriminant(a: &PointConfiguration) -> Result<UnivariateDiscriminant> {
    check_dim(1, a.ambient_dim())?;
    let pts: Vec<i64> = a.points().iter().map(|p| p[0]).collect();
    if pts.len() > DEGREE_CAP {
        return Err(Error::DegreeCap { degree: pts.len(), cap: DEGREE_CAP });
    }
    let m = pts.len();
    if m == 1 {
        let poly = SparsePoly::var(1, 0);
        return Ok(UnivariateDiscriminant { newton: poly.newton_polytope(), poly, degree: 1, multiplicity: 1 });
    }
    let g = pts.iter().map(|x| x - pts[0]).fold(0i64, |acc, x| acc.gcd(&x));
    let b: Vec<u32> = pts.iter().map(|x| ((x - pts[0]) / g) as u32).collect();
    let top = *b.last().expect("nonempty") as usize;
    if top > DEGREE_CAP {
        return Err(Error::DegreeCap { degree: top, cap: DEGREE_CAP });
    }
    // variables c_0..c_{m-1}, then y
    let y = m;
    let mut phi = SparsePoly::zero(m + 1);
    for (i, &e) in b.iter().enumerate() {
        let mut exps = vec![0; m + 1];
        exps[i] = 1;
        exps[y] = e;
        phi = &phi + &SparsePoly::monomial(m + 1, exps, 1);
    }
    let res = sylvester_resultant(&phi, &phi.derivative(y), y)?.drop_vars(&[y])?;
    let core = res.strip_monomial().primitive();
    let poly = core.pow(g as u32);
    Ok(UnivariateDiscriminant {
        newton: poly.newton_polytope(),
        degree: poly.total_degree(),
        poly,
        multiplicity: g as u32,
    })
}

/// Evaluates at an integer point.
pub fn evaluate(p: &SparsePoly, x: &[BigInt]) -> Result<BigInt> {
    check_dim(p.nvars, x.len())?;
    Ok(p.terms.iter().map(|(e, c)| e.iter().zip(x).fold(c.clone(), |acc, (&k, xi)| acc * Pow::pow(xi, k))).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qvec;

    fn bi(x: i64) -> BigInt {
        BigInt::from(x)
    }

    /// Polynomial in y = var 0 with independent coefficient variables 1..
    fn generic(exps: &[u32], offset: usize, nvars: usize) -> SparsePoly {
        let mut p = SparsePoly::zero(nvars);
        for (i, &e) in exps.iter().enumerate() {
            let mut v = vec![0; nvars];
            v[0] = e;
            v[offset + i] = 1;
            p = &p + &SparsePoly::monomial(nvars, v, 1);
        }
        p
    }

    #[test]
    fn linear_resultant() {
        let f = generic(&[0, 1], 1, 5);
        let g = generic(&[0, 1], 3, 5);
        let r = sylvester_resultant(&f, &g, 0).unwrap();
        // a0 b1 - a1 b0
        let want = &SparsePoly::monomial(5, vec![0, 1, 0, 0, 1], 1) - &SparsePoly::monomial(5, vec![0, 0, 1, 1, 0], 1);
        assert_eq!(r.primitive(), want.primitive());
    }

    #[test]
    fn squared_resultant() {
        let f = generic(&[0, 2], 1, 5);
        let g = generic(&[0, 2], 3, 5);
        let r = sylvester_resultant(&f, &g, 0).unwrap();
        let lin = &SparsePoly::monomial(5, vec![0, 1, 0, 0, 1], 1) - &SparsePoly::monomial(5, vec![0, 0, 1, 1, 0], 1);
        assert_eq!(r.primitive(), lin.pow(2).primitive());
    }

    #[test]
    fn quadratic_discriminant() {
        let a = PointConfiguration::new(1, vec![vec![0], vec![1], vec![2]]).unwrap();
        let d = univariate_discriminant(&a).unwrap();
        assert_eq!(d.degree, 2);
        // c1² - 4 c0 c2
        let want = &SparsePoly::monomial(3, vec![0, 2, 0], 1) - &SparsePoly::monomial(3, vec![1, 0, 1], 4);
        assert_eq!(d.poly, want.primitive());
        assert_eq!(d.newton, Polytope::from_i64(&[vec![0, 2, 0], vec![1, 0, 1]]));
    }

    #[test]
    fn cubic_and_linear() {
        let a = PointConfiguration::new(1, (0..4).map(|i| vec![i]).collect()).unwrap();
        assert_eq!(univariate_discriminant(&a).unwrap().degree, 4);
        let a = PointConfiguration::new(1, vec![vec![0], vec![1]]).unwrap();
        assert_eq!(univariate_discriminant(&a).unwrap().degree, 0);
    }

    #[test]
    fn sparse_discriminant_carries_its_multiplicity() {
        let a = PointConfiguration::new(1, vec![vec![0], vec![2], vec![4]]).unwrap();
        let d = univariate_discriminant(&a).unwrap();
        assert_eq!(d.multiplicity, 2);
        assert_eq!(d.newton, Polytope::from_i64(&[vec![0, 4, 0], vec![2, 0, 2]]));
        // the classical discriminant of c0 + c2 y² + c4 y⁴ agrees up to monomials
        let phi = generic(&[0, 2, 4], 1, 4);
        let res = sylvester_resultant(&phi, &phi.derivative(0), 0).unwrap().drop_vars(&[0]).unwrap();
        assert_eq!(res.strip_monomial().primitive(), d.poly);
    }

    #[test]
    fn multiplicativity() {
        let f1 = generic(&[0, 1], 1, 7);
        let f2 = generic(&[0, 2], 3, 7);
        let g = generic(&[0, 1, 2], 4, 7);
        let lhs = sylvester_resultant(&(&f1 * &f2), &g, 0).unwrap();
        let rhs = &sylvester_resultant(&f1, &g, 0).unwrap() * &sylvester_resultant(&f2, &g, 0).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn degree_cap() {
        let f = generic(&[0, 7], 1, 3);
        assert!(matches!(sylvester_resultant(&f, &f, 0), Err(Error::DegreeCap { .. })));
    }

    #[test]
    fn exact_division_and_evaluation() {
        let x = SparsePoly::var(2, 0);
        let y = SparsePoly::var(2, 1);
        let p = &(&x + &y) * &(&x - &y);
        assert_eq!(p.div_exact(&(&x + &y)).unwrap(), &x - &y);
        assert!(p.div_exact(&(&x + &x)).is_none());
        assert_eq!(evaluate(&p, &[bi(3), bi(1)]).unwrap(), bi(8));
        assert_eq!(p.newton_polytope().support(&qvec(&[1, 0])), q(0));
    }
}
