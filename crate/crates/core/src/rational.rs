//! Rational scalars, vectors and small dense linear algebra over Q.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;
pub type QVec = Vec<Q>;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qvec(xs: &[i64]) -> QVec {
    xs.iter().map(|&x| q(x)).collect()
}

pub fn zeros(n: usize) -> QVec {
    vec![Q::zero(); n]
}

pub fn unit(n: usize, i: usize) -> QVec {
    let mut v = zeros(n);
    v[i] = Q::one();
    v
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Parses `"p/q"`, `"p"` or a JSON integer rendered as text.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Q::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Q::from_integer),
    }
}

/// Integers print as `"p"`, everything else as `"p/q"`.
pub fn fmt_q(x: &Q) -> String {
    x.to_string()
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    // integer vectors skip the gcd normalization of every partial sum
    if a.iter().chain(b).all(|x| x.denom().is_one()) {
        let s: BigInt = a.iter().zip(b).map(|(x, y)| x.numer() * y.numer()).sum();
        return Q::from_integer(s);
    }
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

pub fn add(a: &[Q], b: &[Q]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Q], b: &[Q]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[Q], c: &Q) -> QVec {
    a.iter().map(|x| x * c).collect()
}

pub fn neg(a: &[Q]) -> QVec {
    a.iter().map(|x| -x).collect()
}

pub fn is_zero_vec(a: &[Q]) -> bool {
    a.iter().all(|x| x.is_zero())
}

pub fn is_integral(a: &[Q]) -> bool {
    a.iter().all(|x| x.is_integer())
}

/// Average of a nonempty list of points.
pub fn centroid(points: &[QVec]) -> QVec {
    let n = points[0].len();
    let mut acc = zeros(n);
    for p in points {
        for (a, x) in acc.iter_mut().zip(p) {
            *a += x;
        }
    }
    let m = q(points.len() as i64);
    acc.iter().map(|x| x / &m).collect()
}

/// Smallest positive integer multiple of `v` (primitive up to sign kept).
pub fn primitive_integer(v: &[Q]) -> Vec<BigInt> {
    let mut l = BigInt::one();
    for x in v {
        l = l.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Q::from_integer(l.clone())).to_integer()).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

pub fn to_q(v: &[BigInt]) -> QVec {
    v.iter().cloned().map(Q::from_integer).collect()
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(m: &mut [QVec]) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return vec![];
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let t = &m[r][j] * &f;
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &[QVec]) -> usize {
    let mut a = m.to_vec();
    rref(&mut a).len()
}

/// Basis of the row space in reduced echelon form, with its pivot columns.
pub fn row_space(m: &[QVec]) -> (Vec<QVec>, Vec<usize>) {
    let mut a = m.to_vec();
    let piv = rref(&mut a);
    a.truncate(piv.len());
    (a, piv)
}

/// Basis of {x : m x = 0}.
pub fn nullspace(m: &[QVec], cols: usize) -> Vec<QVec> {
    let mut a = m.to_vec();
    let piv = rref(&mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = zeros(cols);
            v[f] = Q::one();
            for (r, &p) in piv.iter().enumerate() {
                v[p] = -a[r][f].clone();
            }
            v
        })
        .collect()
}

/// Some solution of m x = b, if one exists.
pub fn solve(m: &[QVec], b: &[Q]) -> Option<QVec> {
    let cols = if m.is_empty() { 0 } else { m[0].len() };
    let mut aug: Vec<QVec> = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let piv = rref(&mut aug);
    if piv.last() == Some(&cols) {
        return None;
    }
    let mut x = zeros(cols);
    for (r, &p) in piv.iter().enumerate() {
        x[p] = aug[r][cols].clone();
    }
    Some(x)
}

pub fn det(m: &[QVec]) -> Q {
    let n = m.len();
    let mut a = m.to_vec();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= &a[c][c];
        let inv = a[c][c].recip();
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] * &inv;
            for j in c..n {
                let t = &a[c][j] * &f;
                a[i][j] -= t;
            }
        }
    }
    d
}

pub fn inverse(m: &[QVec]) -> Option<Vec<QVec>> {
    let n = m.len();
    let mut aug: Vec<QVec> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend(unit(n, i));
            r
        })
        .collect();
    let piv = rref(&mut aug);
    if piv.len() < n || piv[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_q("3/6"), Some(qf(1, 2)));
        assert_eq!(parse_q("-4"), Some(q(-4)));
        assert_eq!(parse_q("1/0"), None);
        assert_eq!(fmt_q(&qf(-2, 4)), "-1/2");
        assert_eq!(fmt_q(&q(7)), "7");
    }

    #[test]
    fn nullspace_and_solve() {
        let m = vec![qvec(&[1, 1, 0]), qvec(&[0, 1, 1])];
        let ns = nullspace(&m, 3);
        assert_eq!(ns.len(), 1);
        assert!(m.iter().all(|r| dot(r, &ns[0]).is_zero()));
        let x = solve(&m, &qvec(&[2, 3])).unwrap();
        assert_eq!(dot(&m[0], &x), q(2));
        assert_eq!(dot(&m[1], &x), q(3));
        assert!(solve(&[qvec(&[1, 1]), qvec(&[2, 2])], &qvec(&[1, 3])).is_none());
    }

    #[test]
    fn determinant_and_inverse() {
        let m = vec![qvec(&[2, 1]), qvec(&[1, 1])];
        assert_eq!(det(&m), q(1));
        let inv = inverse(&m).unwrap();
        assert_eq!(inv, vec![qvec(&[1, -1]), qvec(&[-1, 2])]);
        assert_eq!(det(&[qvec(&[1, 2]), qvec(&[2, 4])]), q(0));
    }

    #[test]
    fn primitive_vectors() {
        let v = vec![qf(1, 2), qf(-3, 4)];
        assert_eq!(primitive_integer(&v), vec![BigInt::from(2), BigInt::from(-3)]);
    }
}
