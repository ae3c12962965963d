//! The acceptance suite, shared by `polydisc selftest` and the acceptance
//! integration test. Every check is seeded and exact.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::discriminant::{
    admissible_subsets, bifurcation_newton, critical_points_counts, higher_additivity_expansion,
    newton_discriminant_hypersurface, resultant_multiplicity, sigma, CoefficientSpec,
};
use crate::error::{Error, Result};
use crate::fiber::{mf_support_oracle, mixed_fiber_polytope, prism_fiber_sides, SplitPolytope};
use crate::obstruction::{degree_a, find_iterated_circuit, obstruction_table, PointConfiguration};
use crate::oracle::{critical_point_oracle, sylvester_resultant, univariate_discriminant, SparsePoly};
use crate::polytope::{cube, standard_simplex, Polytope, VirtualPolytope};
use crate::rational::{qf, qvec, QVec, Q};
use crate::volume::{mixed_volume, mv_zero_criterion, prism_volume_sides};

#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Duration,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        format!(
            "criterion {} [{}] {} ({:.2}s, limit {}s): {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.elapsed.as_secs_f64(),
            self.limit.as_secs(),
            self.detail
        )
    }
}

pub const TITLES: [&str; 8] = [
    "golden obstruction matrices",
    "univariate discriminant Newton polytopes",
    "mixed fiber support oracle",
    "prism identities",
    "critical point counts",
    "Cayley admissibility and bifurcation components",
    "resultant multiplicities",
    "property suite",
];

const LIMITS: [u64; 8] = [1, 30, 60, 60, 120, 5, 1, 300];

pub fn run_criterion(id: u8) -> CriterionReport {
    let start = Instant::now();
    let outcome = match id {
        1 => golden_matrices(),
        2 => univariate_discriminants(),
        3 => support_oracle(),
        4 => prism_identities(),
        5 => critical_points(),
        6 => bifurcation(),
        7 => resultant_multiplicities(),
        8 => property_suite(),
        _ => Err(Error::InvalidInput(format!("no criterion {id}"))),
    };
    let elapsed = start.elapsed();
    let idx = (id as usize).clamp(1, 8) - 1;
    let limit = Duration::from_secs(LIMITS[idx]);
    let (passed, detail) = match outcome {
        Ok(Ok(d)) if elapsed <= limit => (true, d),
        Ok(Ok(d)) => (false, format!("{d}; over the time limit")),
        Ok(Err(why)) => (false, why),
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionReport { id, title: TITLES[idx], passed, detail, elapsed, limit }
}

pub fn run_all() -> Vec<CriterionReport> {
    (1..=8).map(run_criterion).collect()
}

/// Ok(Ok(detail)) on success, Ok(Err(why)) on a failed comparison.
type Check = Result<std::result::Result<String, String>>;

macro_rules! ensure {
    ($cond:expr, $($why:tt)+) => {
        if !$cond {
            return Ok(Err(format!($($why)+)));
        }
    };
}

fn cfg(dim: usize, pts: &[&[i64]]) -> PointConfiguration {
    PointConfiguration::new(dim, pts.iter().map(|p| p.to_vec()).collect()).expect("valid configuration")
}

fn line(xs: &[i64]) -> PointConfiguration {
    PointConfiguration::new(1, xs.iter().map(|&x| vec![x]).collect()).expect("valid configuration")
}

fn golden_matrices() -> Check {
    let p = Polytope::from_i64(&[vec![0, 0, 0], vec![0, 0, 2], vec![4, 2, 0], vec![2, 4, 2]]);
    let a = PointConfiguration::new(3, p.lattice_points())?;
    let t = obstruction_table(&a)?;
    let vertical = vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 0, 2]];
    let Some(edge) = t.faces.iter().position(|f| f.dim == 1 && a.face_points(f) == vertical) else {
        return Ok(Err("the vertical edge is not a face".into()));
    };
    let above: Vec<usize> =
        (0..t.faces.len()).filter(|&j| t.faces[edge].points.iter().all(|x| t.faces[j].points.contains(x))).collect();
    ensure!(above.len() == 4, "{} faces contain the vertical edge", above.len());
    let sub: Vec<Vec<BigInt>> = above.iter().map(|&i| above.iter().map(|&j| t.c[i][j].clone()).collect()).collect();
    let golden: Vec<Vec<BigInt>> = [[1, 1, 1, 2], [0, 1, 0, 1], [0, 0, 1, 1], [0, 0, 0, 1]]
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    ensure!(sub == golden, "C = {sub:?}");
    let sub_e: Vec<Vec<BigInt>> = above.iter().map(|&i| above.iter().map(|&j| t.e[i][j].clone()).collect()).collect();
    ensure!(sub_e[0][3].is_zero(), "top right of the inverse is {}", sub_e[0][3]);
    Ok(Ok(format!("{} faces, C and C^-1 match, e = {}", t.faces.len(), sub_e[0][3])))
}

fn univariate_discriminants() -> Check {
    let mut notes = Vec::new();
    for d in 2..=5i64 {
        let a = line(&(0..=d).collect::<Vec<_>>());
        let ours = newton_discriminant_hypersurface(&CoefficientSpec::universal(a.clone()), false)?;
        let oracle = univariate_discriminant(&a)?;
        ensure!(ours == oracle.newton, "d = {d}: Newton polytopes differ");
        let ones = vec![Q::one(); a.len()];
        let min = ours.support(&ones);
        ensure!(min == Q::from_integer((2 * d - 2).into()), "d = {d}: min Σλ = {min}");
        let deg = degree_a(&a)?;
        ensure!(deg == BigInt::from(oracle.degree), "d = {d}: degree_A = {deg}, oracle {}", oracle.degree);
        notes.push(format!("{}", oracle.degree));
    }
    Ok(Ok(format!("degrees {}", notes.join(", "))))
}

fn random_points(rng: &mut ChaCha8Rng, dim: usize, count: usize, hi: i64) -> Vec<QVec> {
    (0..count).map(|_| qvec(&(0..dim).map(|_| rng.random_range(0..=hi)).collect::<Vec<_>>())).collect()
}

/// A full-dimensional split polytope in R^n ⊕ R^k with coordinates in [0, hi].
fn random_split(rng: &mut ChaCha8Rng, n: usize, k: usize, hi: i64) -> SplitPolytope {
    loop {
        let count = rng.random_range(n + k + 1..=n + k + 3);
        let pts = random_points(rng, n + k, count, hi);
        let p = Polytope::hull_of(&pts);
        if p.dim() == n + k {
            return SplitPolytope::new(n, k, p).expect("matching split");
        }
    }
}

fn random_functional(rng: &mut ChaCha8Rng, n: usize) -> QVec {
    qvec(&(0..n).map(|_| rng.random_range(-3..=3)).collect::<Vec<_>>())
}

fn support_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut compared = 0;
    for inst in 0..20 {
        let n = rng.random_range(1..=3);
        let k = rng.random_range(1..=2);
        let ds: Vec<SplitPolytope> = (0..=k).map(|_| random_split(&mut rng, n, k, 3)).collect();
        let mf = mixed_fiber_polytope(&ds)?;
        for _ in 0..20 {
            let g = random_functional(&mut rng, n);
            let (ours, theirs) = (mf.support(&g), mf_support_oracle(&ds, &g)?);
            ensure!(ours == theirs, "instance {inst} (n = {n}, k = {k}), functional {g:?}: {ours} vs {theirs}");
            compared += 1;
        }
    }
    Ok(Ok(format!("{compared} support values agree")))
}

fn prism_identities() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for inst in 0..10 {
        let ps: Vec<Polytope> = (0..2)
            .map(|_| {
                let c = rng.random_range(2..=5);
                Polytope::hull_of(&random_points(&mut rng, 2, c, 3))
            })
            .collect();
        let (lhs, rhs) = prism_volume_sides(&ps)?;
        ensure!(lhs == rhs, "volume instance {inst}: {lhs} vs {rhs}");
    }
    for inst in 0..10 {
        let n = rng.random_range(1..=2);
        let ds: Vec<SplitPolytope> = (0..2).map(|_| random_split(&mut rng, n, 1, 3)).collect();
        let (lhs, rhs) = prism_fiber_sides(&ds)?;
        ensure!(lhs == rhs, "fiber instance {inst}: sides differ");
    }
    Ok(Ok("10 + 10 instances agree".into()))
}

fn critical_points() -> Check {
    let simplex = standard_simplex(3);
    let s = critical_points_counts(&simplex)?;
    ensure!(s.curve.is_zero() && s.surface.is_zero(), "simplex gives ({}, {})", s.curve, s.surface);
    let direct = critical_point_oracle(&simplex, 0)?;
    ensure!(direct.curve == 0 && direct.surface == 0, "simplex systems have solutions: {direct:?}");
    let c = critical_points_counts(&cube(3, 1))?;
    ensure!(c.curve == BigInt::from(4) && c.surface == BigInt::from(2), "cube gives ({}, {})", c.curve, c.surface);
    for seed in 0..3 {
        let o = critical_point_oracle(&cube(3, 1), seed)?;
        ensure!(o.curve == 4 && o.surface == 2, "cube, draw {seed}: oracle counts {o:?}");
    }
    Ok(Ok("simplex (0, 0), cube (4, 2) on 3 draws".into()))
}

fn bifurcation() -> Check {
    let a0 = cfg(2, &[&[0, 0], &[1, 0], &[2, 0]]);
    let a1 = cfg(2, &[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
    let adm: Vec<Vec<usize>> = admissible_subsets(&[a0.clone(), a1.clone()])?.into_iter().map(|(j, _)| j).collect();
    ensure!(adm == vec![vec![0], vec![0, 1]], "admissible subsets {adm:?}");
    let b = bifurcation_newton(&CoefficientSpec::universal_family(&[a0, a1]), true)?;
    ensure!(b.factors.len() == 5, "{} factors", b.factors.len());
    Ok(Ok("admissible {0}, {0,1}; 5 factors".into()))
}

/// a_0 + a_1 y^e and b_0 + b_1 y^e, in variables (y, a_0, a_1, b_0, b_1).
fn binomial_pair(e: u32) -> (SparsePoly, SparsePoly) {
    let m = |exps: [u32; 5]| SparsePoly::monomial(5, exps.to_vec(), 1);
    (&m([0, 1, 0, 0, 0]) + &m([e, 0, 1, 0, 0]), &m([0, 0, 0, 1, 0]) + &m([e, 0, 0, 0, 1]))
}

fn resultant_multiplicities() -> Check {
    let (f1, g1) = binomial_pair(1);
    let r1 = sylvester_resultant(&f1, &g1, 0)?.primitive();
    // a_0 b_1 - a_1 b_0 is linear in a_0 with coprime coefficients, hence irreducible
    let base = &SparsePoly::monomial(5, vec![0, 1, 0, 0, 1], 1) - &SparsePoly::monomial(5, vec![0, 0, 1, 1, 0], 1);
    ensure!(r1 == base.primitive(), "Res({{0,1}}, {{0,1}}) = {r1:?}");
    let (f2, g2) = binomial_pair(2);
    let r2 = sylvester_resultant(&f2, &g2, 0)?.primitive();
    ensure!(r2 == base.pow(2).primitive(), "Res({{0,2}}, {{0,2}}) = {r2:?}");
    for (pts, want) in [(&[0i64, 1][..], 1), (&[0, 2][..], 2)] {
        let m = resultant_multiplicity(&[line(pts), line(pts)])?;
        ensure!(m.multiplicity == BigInt::from(want), "{pts:?}: multiplicity {}", m.multiplicity);
    }
    Ok(Ok("multiplicities 1 and 2 match the oracle powers".into()))
}

fn split_1_1(rng: &mut ChaCha8Rng) -> SplitPolytope {
    random_split(rng, 1, 1, 3)
}

fn property_suite() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut counts = Vec::new();

    // mixed fiber symmetry, multilinearity, monotonicity
    for inst in 0..10 {
        let (d0, d0b, d1) = (split_1_1(&mut rng), split_1_1(&mut rng), split_1_1(&mut rng));
        let m01 = mixed_fiber_polytope(&[d0.clone(), d1.clone()])?;
        ensure!(m01 == mixed_fiber_polytope(&[d1.clone(), d0.clone()])?, "MF symmetry, instance {inst}");
        let sum = mixed_fiber_polytope(&[d0.sum(&d0b)?, d1.clone()])?;
        let parts = m01.minkowski_sum(&mixed_fiber_polytope(&[d0b.clone(), d1.clone()])?)?;
        ensure!(sum == parts, "MF multilinearity, instance {inst}");
        // enlarge d0 without changing its base
        let mut pts = d0.polytope.vertices().to_vec();
        let b = d0.base().vertices()[0][0].clone();
        pts.push(vec![Q::from_integer(rng.random_range(-3..=6).into()), b]);
        let bigger = SplitPolytope::new(1, 1, Polytope::hull_of(&pts))?;
        let big = mixed_fiber_polytope(&[bigger, d1.clone()])?;
        ensure!(big.contains_polytope(&m01), "MF monotonicity, instance {inst}");
    }
    counts.push("MF 10");

    // Minkowski difference round trip
    for inst in 0..20 {
        let p = Polytope::hull_of(&random_points(&mut rng, 2, 4, 3));
        let qp = Polytope::hull_of(&random_points(&mut rng, 2, 4, 3));
        let mut v = VirtualPolytope::from_polytope(&p.minkowski_sum(&qp)?);
        v.add_term(-Q::one(), &qp)?;
        ensure!(v.realize()? == p, "Minkowski difference, instance {inst}");
    }
    counts.push("difference 20");

    // vanishing of mixed volumes versus the dimension criterion
    for inst in 0..40 {
        let ps: Vec<Polytope> = (0..2)
            .map(|_| {
                let c = rng.random_range(1..=3);
                Polytope::hull_of(&random_points(&mut rng, 2, c, 2))
            })
            .collect();
        let zero = mixed_volume(&ps)?.is_zero();
        ensure!(zero == mv_zero_criterion(&ps), "zero mixed volume criterion, instance {inst}");
    }
    counts.push("zero MV 40");

    // C·E = I and E·C = I on random plane configurations
    for inst in 0..20 {
        let a = random_config(&mut rng, 6);
        let t = obstruction_table(&a)?;
        let n = t.faces.len();
        for i in 0..n {
            for j in 0..n {
                let ce: BigInt = (0..n).map(|s| &t.c[i][s] * &t.e[s][j]).sum();
                let ec: BigInt = (0..n).map(|s| &t.e[i][s] * &t.c[s][j]).sum();
                let want = if i == j { BigInt::one() } else { BigInt::zero() };
                ensure!(ce == want && ec == want, "Möbius duality fails, instance {inst} at ({i}, {j})");
            }
        }
    }
    counts.push("duality 20");

    // higher additivity of σ_m
    for m in 1..=6 {
        for l in 1..=3 {
            let r = |rng: &mut ChaCha8Rng| qf(rng.random_range(-9..=9), rng.random_range(1..=5));
            let (t0, tt) = (r(&mut rng), r(&mut rng));
            let rest: Vec<Q> = (0..l).map(|_| r(&mut rng)).collect();
            let mut args = vec![&t0 + &tt];
            args.extend(rest.iter().cloned());
            ensure!(sigma(m, &args) == higher_additivity_expansion(m, &t0, &tt, &rest), "σ_{m}, l = {l}");
        }
    }
    counts.push("σ_m 18");

    // an iterated circuit forces a positive degree
    let mut with_circuit = 0;
    for inst in 0..200 {
        let a = random_config(&mut rng, 7);
        if find_iterated_circuit(&a).is_some() {
            with_circuit += 1;
            let d = degree_a(&a)?;
            ensure!(d > BigInt::zero(), "instance {inst}: iterated circuit but degree {d}");
        }
    }
    let note = format!("{}; circuits {with_circuit}/200", counts.join(", "));
    Ok(Ok(note))
}

fn random_config(rng: &mut ChaCha8Rng, max: usize) -> PointConfiguration {
    let size = rng.random_range(1..=max);
    let mut pts: Vec<Vec<i64>> = (0..size).map(|_| vec![rng.random_range(0..=3), rng.random_range(0..=3)]).collect();
    pts.sort();
    pts.dedup();
    PointConfiguration::new(2, pts).expect("deduplicated")
}
