//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use toddsum::ehrhart::{ehrhart_sum, expansion_stability_check, symbol_expansion, StabilityOptions, SymbolComponent};
use toddsum::emcore::{
    convergence_study, em_estimate, em_expansion_regular, em_expansion_simple, loglog_fit, riemann_sum_1d_halfline,
};
use toddsum::exactnum::{int, rat, to_f64, todd_value};
use toddsum::expr::{parse, SmoothFn};
use toddsum::latalg::{complement_basis, dual_basis, smith_normal_form, torsion_group, IntMat};
use toddsum::{ExpansionOptions, Facet, HPolytope, Integrand, Poly, PolyhomSymbol, Rational, SumValue};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn polytope(dim: usize, facets: &[(&[i64], i64)]) -> HPolytope {
    HPolytope::new(dim, facets.iter().map(|(u, c)| Facet::new(u.to_vec(), *c)).collect()).unwrap()
}

/// Lattice points of `NΔ` by scanning a box, independent of the library's
/// enumerator.
fn brute_count(p: &HPolytope, n: i64, radius: i64) -> i64 {
    let dim = p.dim();
    let mut x = vec![-radius * n; dim];
    let mut count = 0;
    loop {
        if p.facets().iter().all(|f| f.u.iter().zip(&x).map(|(a, b)| a * b).sum::<i64>() <= f.c * n) {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == dim {
                return count;
            }
            x[i] += 1;
            if x[i] <= radius * n {
                break;
            }
            x[i] = -radius * n;
            i += 1;
        }
    }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let took = start.elapsed();
    o.detail = format!("{} [{:.2}s]", o.detail, took.as_secs_f64());
    if let Some(limit) = limit {
        if took > limit {
            o.pass = false;
            o.detail = format!("{} exceeds {:.0}s", o.detail, limit.as_secs_f64());
        }
    }
    o
}

fn criterion_1() -> Outcome {
    let mut worst: f64 = 0.0;
    for (lam_src, lam) in [("1/2", 0.5), ("1", 1.0), ("2", 2.0)] {
        let f = parse(&format!("exp({lam_src}*x1)"), 1).unwrap().to_smooth();
        for n in [5u64, 10, 50] {
            // tail e^{-λ kmax/N} < 1e-17
            let kmax = (40.0 * n as f64 / lam).ceil() as u64;
            let sum = riemann_sum_1d_halfline(&f, n, Some(kmax)).unwrap();
            let tau = todd_value(lam / n as f64) / lam;
            let geometric = 1.0 / (n as f64 * (1.0 - (-lam / n as f64).exp()));
            worst = worst.max((sum - tau).abs() / tau).max((geometric - tau).abs() / tau);
        }
    }
    outcome(worst < 1e-12, format!("max relative error {worst:.3e} (tol 1e-12)"))
}

fn criterion_2() -> Outcome {
    let cases = [
        ("interval", HPolytope::unit_cube(1)),
        ("square", HPolytope::unit_cube(2)),
        ("2-simplex", HPolytope::standard_simplex(2, 1)),
        ("cube", HPolytope::unit_cube(3)),
    ];
    let mut failures = Vec::new();
    for (name, p) in &cases {
        let n = p.dim();
        let one = Integrand::Poly(Poly::one(n));
        let opts = ExpansionOptions::with_order(n);
        let series = em_expansion_regular(p, &one, &opts).unwrap();
        for big_n in 1..=20u64 {
            let count = brute_count(p, big_n as i64, 1);
            let want = Rational::new(count.into(), BigInt::from(big_n).pow(n as u32));
            let got = em_estimate(p, &one, big_n, &opts).unwrap();
            if got != SumValue::Exact(want.clone()) || series.evaluate_exact(big_n) != Some(want) {
                failures.push(format!("{name} N={big_n}"));
            }
        }
    }
    outcome(failures.is_empty(), format!("4 polytopes x N=1..20 exact; mismatches: {failures:?}"))
}

fn criterion_3() -> Outcome {
    let triangle = polytope(2, &[(&[0, -1], 0), (&[1, 0], 1), (&[-2, 1], 0)]);
    // vertex (0, 0) has normals (0,-1), (-3,1): determinant 3
    let order3 = polytope(2, &[(&[0, -1], 0), (&[1, 0], 1), (&[-3, 1], 0)]);
    let mut failures = Vec::new();
    let mut groups = Vec::new();
    for (name, p) in [("triangle", &triangle), ("order-3 triangle", &order3)] {
        let max_group = p.faces().unwrap().iter().map(|f| f.torsion.order()).max().unwrap();
        groups.push(format!("{name}: max |Γ_F| = {max_group}"));
        let one = Integrand::Poly(Poly::one(2));
        let series = em_expansion_simple(p, &one, &ExpansionOptions::with_order(2)).unwrap();
        for n in 1..=20u64 {
            let count = brute_count(p, n as i64, 4);
            if name == "triangle" && count != ((n + 1) * (n + 1)) as i64 {
                failures.push(format!("{name} brute force N={n}"));
            }
            let want = Rational::new(count.into(), BigInt::from(n * n));
            if series.evaluate_exact(n) != Some(want) {
                failures.push(format!("{name} N={n}"));
            }
        }
    }
    let shape_ok = groups == ["triangle: max |Γ_F| = 2", "order-3 triangle: max |Γ_F| = 3"];
    outcome(failures.is_empty() && shape_ok, format!("{}; mismatches: {failures:?}", groups.join(", ")))
}

fn criterion_4() -> Outcome {
    let p = HPolytope::unit_cube(2);
    let f = parse("exp(-x1^2 - x2^2)", 2).unwrap();
    let ns = [10u64, 14, 20, 28, 40, 56, 80];
    let mut pass = true;
    let mut parts = Vec::new();
    for (m, bound) in [(0usize, -0.7), (1, -1.7), (2, -2.7)] {
        let report = convergence_study(&p, &f, &ns, &ExpansionOptions::with_order(m)).unwrap();
        let slope = report.slope.unwrap_or(f64::NAN);
        pass &= slope <= bound;
        parts.push(format!("M={m} slope {slope:.3} (need <= {bound})"));
    }
    outcome(pass, parts.join(", "))
}

fn twisted_fullline_sum(f: &SmoothFn, n: u64, p: i64, q: i64) -> f64 {
    let nf = n as f64;
    let (mut re, mut im) = (0.0, 0.0);
    for k in -(n as i64)..=(n as i64) {
        let v = f.eval(&[k as f64 / nf]).unwrap();
        let w = Complex64::from_polar(1.0, 2.0 * PI * (p * k).rem_euclid(q) as f64 / q as f64);
        re += w.re * v;
        im += w.im * v;
    }
    Complex64::new(re, im).norm()
}

fn criterion_5() -> Outcome {
    let f = SmoothFn::bump(1, int(1), vec![]).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, p, q) in [("ω=-1", 1i64, 2i64), ("ω=e^(2πi/3)", 1, 3)] {
        let pts: Vec<(f64, f64)> = (8..=64u64).map(|n| (n as f64, twisted_fullline_sum(&f, n, p, q))).collect();
        let slope = loglog_fit(&pts).map_or(f64::NAN, |fit| fit.0);
        pass &= slope <= -6.0;
        parts.push(format!("{name} slope {slope:.3}"));
    }
    outcome(pass, format!("{} (need <= -6 over N=8..64)", parts.join(", ")))
}

fn random_poly(rng: &mut ChaCha8Rng, deg: u32) -> Poly {
    let mut p = Poly::zero(2);
    for _ in 0..6 {
        let a = rng.random_range(0..=deg);
        let b = rng.random_range(0..=deg - a);
        p.add_term(vec![a, b], rat(rng.random_range(-6..7), rng.random_range(1..4)));
    }
    p
}

fn criterion_6() -> Outcome {
    let square = HPolytope::unit_cube(2);
    let triangle = polytope(2, &[(&[0, -1], 0), (&[1, 0], 1), (&[-2, 1], 0)]);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst_rel: f64 = 0.0;
    let mut worst_abs: f64 = 0.0;
    let mut failures = 0;
    for _ in 0..10 {
        let f = Integrand::Poly(random_poly(&mut rng, 4));
        for p in [&square, &triangle] {
            let opts = ExpansionOptions::with_order(3);
            let exact = em_expansion_simple(p, &f, &opts).unwrap();
            let numeric = em_expansion_simple(p, &f, &opts.clone().numeric()).unwrap();
            for j in 0..=3 {
                let want = to_f64(&exact.coeff_exact(j).unwrap());
                let got = numeric.coeff_f64(j);
                let abs = (got - want).abs();
                let rel = if want == 0.0 { 0.0 } else { abs / want.abs() };
                if rel > 1e-6 && abs > 1e-8 {
                    failures += 1;
                }
                worst_rel = worst_rel.max(rel);
                worst_abs = worst_abs.max(abs);
            }
        }
    }
    outcome(failures == 0, format!("20 expansions, M=3; {failures} coefficient(s) off; worst relative {worst_rel:.2e}, worst absolute {worst_abs:.2e} (tol 1e-6 rel / 1e-8 abs)"))
}

fn criterion_7() -> Outcome {
    let mut failures = Vec::new();
    for (name, p) in [("interval", HPolytope::unit_cube(1)), ("square", HPolytope::unit_cube(2))] {
        let n = p.dim();
        let cone = format!("x{}", n + 1);
        for (deg, src) in [(0, "1".to_string()), (1, cone.clone()), (1, "x1".to_string()), (2, format!("x1*{cone}"))] {
            let f = parse(&src, n + 1).unwrap();
            let sym = PolyhomSymbol::new(n + 1, vec![SymbolComponent { degree: deg, f }]).unwrap();
            let series = symbol_expansion(&sym, &p, &ExpansionOptions::with_order(deg as usize + n)).unwrap();
            for big_n in 1..=20u64 {
                let want = ehrhart_sum(&sym, &p, big_n).unwrap();
                if series.evaluate(big_n) != want || want.as_exact().is_none() {
                    failures.push(format!("{name} {src} N={big_n}"));
                }
            }
        }
    }
    outcome(failures.is_empty(), format!("8 symbols x N=1..20 exact; mismatches: {failures:?}"))
}

fn criterion_8() -> Outcome {
    let p = HPolytope::unit_cube(2);
    let f = parse("sqrt(x1^2 + x2^2 + x3^2)", 3).unwrap();
    let sym = PolyhomSymbol::new(3, vec![SymbolComponent { degree: 1, f }]).unwrap();
    let a: Vec<u64> = (20..=40).collect();
    let b: Vec<u64> = (41..=80).collect();
    let r = expansion_stability_check(&sym, &p, [&a, &b], &StabilityOptions::default()).unwrap();
    let top: Vec<f64> = r.rel_disagreement.iter().take(3).copied().collect();
    let pass = top.iter().all(|d| *d < 1e-3);
    let coeffs: Vec<String> = r.second.iter().take(3).map(|c| format!("{c:.8}")).collect();
    outcome(
        pass,
        format!(
            "powers {:?}, coefficients [{}], relative disagreement {:?} (tol 1e-3), condition {:.1e}",
            &r.powers[..3],
            coeffs.join(", "),
            top.iter().map(|d| format!("{d:.1e}")).collect::<Vec<_>>(),
            r.condition[0].max(r.condition[1])
        ),
    )
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> IntMat {
    let data: Vec<Vec<i64>> = (0..rows).map(|_| (0..cols).map(|_| rng.random_range(-6..7)).collect()).collect();
    IntMat::from_rows(&data, cols)
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut failures: Vec<String> = Vec::new();

    // Smith normal form: U A V = D, U and V unimodular, d_i | d_{i+1}
    for t in 0..60 {
        let (r, c) = (rng.random_range(1..5), rng.random_range(1..5));
        let a = random_matrix(&mut rng, r, c);
        let s = smith_normal_form(&a);
        let d = s.diagonal();
        let divides =
            d.windows(2).all(|w| w[0].is_zero() && w[1].is_zero() || !w[0].is_zero() && (&w[1] % &w[0]).is_zero());
        let diagonal_only = (0..r).all(|i| (0..c).all(|j| i == j || s.d[(i, j)].is_zero()));
        let vv = &s.v * &s.v_inv;
        if &(&s.u * &a) * &s.v != s.d
            || !s.u.is_unimodular()
            || !s.v.is_unimodular()
            || !divides
            || !diagonal_only
            || vv != IntMat::identity(c)
        {
            failures.push(format!("snf #{t}"));
        }
    }

    // dual bases: ⟨u_i, α_j⟩ = δ_ij exactly; character sums over Γ collapse
    let mut tested = 0;
    while tested < 25 {
        let n = rng.random_range(2..4);
        let a = random_matrix(&mut rng, n, n);
        if a.det().is_zero()
            || a.rows().any(|r| r.iter().fold(BigInt::zero(), |g, x| num_integer::Integer::gcd(&g, x)) != BigInt::one())
        {
            continue;
        }
        tested += 1;
        let alpha = dual_basis(&a).unwrap();
        for i in 0..n {
            for (j, aj) in alpha.iter().enumerate() {
                let dot: Rational = a.row(i).iter().zip(aj).map(|(u, x)| Rational::from_integer(u.clone()) * x).sum();
                if dot != if i == j { Rational::one() } else { Rational::zero() } {
                    failures.push(format!("dual basis {i},{j}"));
                }
            }
        }
        let g = torsion_group(&a).unwrap();
        if BigInt::from(g.order()) != a.det().magnitude().clone().into() {
            failures.push("|Γ| != |det|".into());
        }
        // x = Σ m_j α_j with small integer m
        for _ in 0..6 {
            let m: Vec<i64> = (0..n).map(|_| rng.random_range(-3..4)).collect();
            let x: Vec<Rational> =
                (0..n).map(|k| alpha.iter().zip(&m).map(|(aj, &mj)| &aj[k] * int(mj)).sum()).collect();
            let avg: Complex64 = g
                .elements
                .iter()
                .map(|e| {
                    let pair: Rational =
                        e.representative.iter().zip(&x).map(|(gi, xi)| Rational::from_integer(gi.clone()) * xi).sum();
                    Complex64::from_polar(1.0, 2.0 * PI * to_f64(&pair))
                })
                .sum::<Complex64>()
                / g.order() as f64;
            let integral = x.iter().all(|v| v.is_integer());
            let want = if integral { 1.0 } else { 0.0 };
            if (avg - want).norm() > 1e-12 {
                failures.push(format!("character sum {avg}"));
            }
        }
    }

    // Γ_E ⊆ Γ_F: the elements of Γ_F from E number |Γ_E|; starred parts partition Γ_F
    let polys = [
        polytope(2, &[(&[0, -1], 0), (&[1, 0], 1), (&[-2, 1], 0)]),
        polytope(2, &[(&[0, -1], 0), (&[-4, 1], 0), (&[1, 0], 2), (&[0, 1], 4)]),
        polytope(3, &[(&[-1, 0, 0], 0), (&[0, -1, 0], 0), (&[0, 0, -1], 0), (&[1, 1, 2], 2)]),
        polytope(3, &[(&[-1, 0, 0], 0), (&[0, -1, 0], 0), (&[0, 0, -1], 0), (&[2, 3, 6], 6)]),
    ];
    for p in &polys {
        let faces = p.faces().unwrap();
        for f in &faces {
            let mut starred_total = 0;
            for e in faces.iter().filter(|e| e.facets.iter().all(|i| f.facets.contains(i))) {
                let local: Vec<usize> = e.facets.iter().map(|i| f.local_index(*i).unwrap()).collect();
                let inside = f.torsion.elements.iter().filter(|g| f.torsion.lies_in_subsystem(g, &local)).count();
                if inside != e.torsion.order() {
                    failures.push(format!("embedding {:?} in {:?}", e.facets, f.facets));
                }
                starred_total += e.starred.len();
            }
            if starred_total != f.torsion.order() {
                failures.push(format!("starred partition {:?}", f.facets));
            }
        }
    }

    // regular and simple expansions coincide on regular polytopes
    let regular = [HPolytope::unit_cube(2), HPolytope::unit_cube(3), HPolytope::standard_simplex(3, 2)];
    for p in &regular {
        for src in ["1", "x1^2*x2 - 3", "x1*x2 + x2^3/5"] {
            let f = parse(src, p.dim()).unwrap();
            let o = ExpansionOptions::with_order(p.dim() + 3);
            if em_expansion_regular(p, &f, &o).unwrap() != em_expansion_simple(p, &f, &o).unwrap() {
                failures.push(format!("regular/simple {src}"));
            }
        }
    }

    // other complements: unimodular change plus multiples of the face normals
    let scrambled = |rows: &IntMat| {
        let c = complement_basis(rows)?;
        let n = c.ncols();
        let mut out: Vec<Vec<BigInt>> = c.rows().map(|r| r.to_vec()).collect();
        let k = out.len();
        for i in 0..k {
            for (r, row) in rows.rows().enumerate() {
                for j in 0..n {
                    out[i][j] += BigInt::from(3 + r as i64 - i as i64) * &row[j];
                }
            }
            if i > 0 {
                let prev = out[i - 1].clone();
                for j in 0..n {
                    out[i][j] += &prev[j] * 2;
                }
            }
        }
        Ok(IntMat::from_rows(&out, n))
    };
    for p in &polys {
        let f = parse(if p.dim() == 2 { "x1^3 - x1*x2 + 2" } else { "x1*x3^2 + x2 - 1" }, p.dim()).unwrap();
        let o = ExpansionOptions::with_order(p.dim() + 3);
        let faces = p.faces_with_complements(scrambled).unwrap();
        let other = toddsum::emcore::em_expansion_simple_with_faces(p, &faces, &f, &o).unwrap();
        if other != em_expansion_simple(p, &f, &o).unwrap() {
            failures.push("complement choice".into());
        }
    }
    outcome(
        failures.is_empty(),
        format!("SNF x60, dual/character x25, embeddings, consistency, complements; failures: {failures:?}"),
    )
}

/// Name, runtime limit in seconds, check.
type Criterion = (&'static str, Option<u64>, fn() -> Outcome);

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("1-D exponential identity", Some(1), criterion_1),
        ("exact lattice counts, regular", Some(10), criterion_2),
        ("exact lattice counts, non-regular", Some(10), criterion_3),
        ("truncation-order slopes", Some(60), criterion_4),
        ("twisted full-line decay", Some(10), criterion_5),
        ("backend agreement", None, criterion_6),
        ("polynomial symbols", None, criterion_7),
        ("non-polynomial symbol stability", None, criterion_8),
        ("structural invariants", None, criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.into_iter().enumerate() {
        let o = timed(limit.map(Duration::from_secs), run);
        println!("{} criterion {} ({name}): {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("{failed} of 9 criteria failed");
    if failed > 0 {
        std::process::exit(1);
    }
}
