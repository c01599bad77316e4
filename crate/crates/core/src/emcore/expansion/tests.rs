use super::*;
use crate::emcore::riemann::riemann_sum_exact;
use crate::exactnum::{int, rat, to_f64};
use crate::expr::parse;
use crate::latalg::{complement_basis, IntMat};
use crate::polytope::Facet;
use crate::quad::integrate_numeric;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn poly(dim: usize, facets: &[(&[i64], i64)]) -> HPolytope {
    HPolytope::new(dim, facets.iter().map(|(u, c)| Facet::new(u.to_vec(), *c)).collect()).unwrap()
}

fn interval() -> HPolytope {
    HPolytope::unit_cube(1)
}

fn triangle2() -> HPolytope {
    poly(2, &[(&[0, -1], 0), (&[1, 0], 1), (&[-2, 1], 0)])
}

fn quad4() -> HPolytope {
    poly(2, &[(&[0, -1], 0), (&[-4, 1], 0), (&[1, 0], 2), (&[0, 1], 4)])
}

fn pentagon() -> HPolytope {
    poly(2, &[(&[-1, 0], 0), (&[0, -1], 0), (&[1, 0], 2), (&[0, 1], 2), (&[1, 1], 3)])
}

fn tet2() -> HPolytope {
    poly(3, &[(&[-1, 0, 0], 0), (&[0, -1, 0], 0), (&[0, 0, -1], 0), (&[1, 1, 2], 2)])
}

/// Rational vertices: `{x ≥ 0, y ≥ 0, x + 2y ≤ 1}` has vertex `(0, 1/2)`.
fn half_triangle() -> HPolytope {
    poly(2, &[(&[-1, 0], 0), (&[0, -1], 0), (&[1, 2], 1)])
}

fn integrand(src: &str, n: usize) -> Integrand {
    parse(src, n).unwrap()
}

fn exact(series: &ExpansionSeries) -> Vec<Rational> {
    (0..=series.order as i64).map(|j| series.coeff_exact(j).unwrap()).collect()
}

fn opts(m: usize) -> ExpansionOptions {
    ExpansionOptions::with_order(m)
}

#[test]
fn regular_examples() {
    let one = integrand("1", 2);
    let s = em_expansion_regular(&HPolytope::unit_cube(2), &one, &opts(2)).unwrap();
    assert_eq!(s.backend, Backend::Exact);
    assert_eq!(exact(&s), vec![int(1), int(2), int(1)]);
    let s = em_expansion_regular(&interval(), &integrand("1", 1), &opts(1)).unwrap();
    assert_eq!(exact(&s), vec![int(1), int(1)]);
    assert_eq!(em_expansion_regular(&triangle2(), &one, &opts(2)), Err(Error::NonRegular));
}

#[test]
fn simple_examples() {
    let one = integrand("1", 2);
    let s = em_expansion_simple(&triangle2(), &one, &opts(2)).unwrap();
    assert_eq!(exact(&s), vec![int(1), int(2), int(1)]);
    assert_eq!(s.evaluate_exact(2).unwrap() * int(4), int(9));
    let s = em_expansion_simple(&HPolytope::standard_simplex(2, 1), &one, &opts(2)).unwrap();
    assert_eq!(exact(&s), vec![rat(1, 2), rat(3, 2), int(1)]);
    for n in 1..=20u64 {
        let count = int(((n + 1) * (n + 1)) as i64) / int((n * n) as i64);
        assert_eq!(em_expansion_simple(&triangle2(), &one, &opts(2)).unwrap().evaluate_exact(n).unwrap(), count);
    }
}

#[test]
fn twisted_operator_has_the_expected_terms() {
    let faces = triangle2().faces().unwrap();
    let op = ToddOperator::from_faces(&faces, &triangle2());
    // F = ∅ plus one twisted term at the vertex of index 2
    assert_eq!(op.terms.len(), 2);
    assert_eq!(op.modulus(), 2);
    let t = &op.terms[1];
    assert_eq!(t.face.len(), 2);
    assert!(t.face.iter().all(|&i| t.twists[i] == rat(1, 2)));
    // two vertices with groups of order 4, three starred elements each
    let op = ToddOperator::from_faces(&quad4().faces().unwrap(), &quad4());
    assert_eq!(op.terms.len(), 7);
    assert_eq!(op.period(), 1);
    assert_eq!(op.modulus(), 4);
    let op = ToddOperator::from_faces(&half_triangle().faces().unwrap(), &half_triangle());
    assert_eq!(op.period(), 2);
}

#[test]
fn regular_and_simple_agree_on_regular_polytopes() {
    let polys = [HPolytope::unit_cube(2), HPolytope::unit_cube(3), HPolytope::standard_simplex(3, 2), pentagon()];
    for p in polys {
        let n = p.dim();
        for src in ["1", "x1", "x1^2 - 3*x2 + 1/3", "x1*x2^2"] {
            let f = integrand(src, n);
            let a = em_expansion_regular(&p, &f, &opts(n + 3)).unwrap();
            let b = em_expansion_simple(&p, &f, &opts(n + 3)).unwrap();
            assert_eq!(a, b, "{src}");
        }
    }
}

fn random_poly(rng: &mut ChaCha8Rng, n: usize, deg: u32) -> Poly {
    let mut terms = Vec::new();
    for _ in 0..5 {
        let e: Vec<u32> = (0..n).map(|_| rng.random_range(0..=deg)).collect();
        if e.iter().sum::<u32>() <= deg {
            terms.push((e, rat(rng.random_range(-9..10), rng.random_range(1..5))));
        }
    }
    terms.push((vec![0; n], int(1)));
    Poly::from_terms(n, terms)
}

#[test]
fn polynomial_exactness_against_lattice_sums() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let polys = [HPolytope::unit_cube(2), triangle2(), quad4(), pentagon(), half_triangle(), tet2(), interval()];
    for p in &polys {
        let n = p.dim();
        for deg in [0u32, 1, 3, 6] {
            let f = random_poly(&mut rng, n, deg);
            let m = deg as usize + n;
            let top = if n == 3 { 12 } else { 20 };
            for big_n in 1..=top {
                let s = em_expansion_simple(p, &Integrand::Poly(f.clone()), &opts(m).at_residue(big_n)).unwrap();
                assert_eq!(s.evaluate_exact(big_n).unwrap(), riemann_sum_exact(p, &f, big_n), "{f} N={big_n}");
            }
        }
    }
}

#[test]
fn higher_order_terms_vanish_for_polynomials() {
    let f = integrand("x1^2*x2", 2);
    let s = em_expansion_simple(&quad4(), &f, &opts(9)).unwrap();
    for j in 6..=9 {
        assert_eq!(s.coeff_exact(j).unwrap(), int(0));
    }
}

/// A complement differing from the default by a unimodular change and by
/// multiples of the wedge rows.
fn scrambled_complement(rows: &IntMat) -> Result<IntMat> {
    let c = complement_basis(rows)?;
    let n = c.ncols();
    let k = c.nrows();
    let mut out: Vec<Vec<BigInt>> = (0..k).map(|i| c.row(i).to_vec()).collect();
    for i in 0..k {
        for (r, row) in rows.rows().enumerate() {
            let mult = BigInt::from(2 + i as i64 + 3 * r as i64);
            for j in 0..n {
                out[i][j] += &mult * &row[j];
            }
        }
        if i + 1 < k {
            let next = out[i + 1].clone();
            for j in 0..n {
                out[i][j] -= &next[j] * 5;
            }
        }
        for x in out[i].iter_mut() {
            *x = -x.clone();
        }
    }
    Ok(IntMat::from_rows(&out, n))
}

#[test]
fn complement_choice_does_not_matter() {
    for p in [triangle2(), quad4(), tet2(), half_triangle()] {
        let f = Integrand::Poly(random_poly(&mut ChaCha8Rng::seed_from_u64(3), p.dim(), 3));
        let o = opts(p.dim() + 3);
        let default = em_expansion_simple(&p, &f, &o).unwrap();
        let faces = p.faces_with_complements(scrambled_complement).unwrap();
        assert_ne!(faces, p.faces().unwrap());
        let other = em_expansion_simple_with_faces(&p, &faces, &f, &o).unwrap();
        assert_eq!(default, other);
    }
}

#[test]
fn interior_support_leaves_only_the_integral() {
    let p = HPolytope::unit_cube(2);
    let f = SmoothFn::bump(2, rat(1, 4), vec![rat(1, 2), rat(1, 2)]).unwrap();
    let s = em_expansion_regular(&p, &f.clone().into(), &opts(3)).unwrap();
    assert_eq!(s.backend, Backend::Numeric);
    let integral = integrate_numeric(&f, &p, &[int(0), int(0), int(0), int(0)], &QuadOptions::default()).unwrap();
    assert!((s.coeff_f64(0) - integral).abs() < 1e-12);
    for j in 1..=3 {
        assert!(s.coeff_f64(j).abs() < 1e-9, "c_{j} = {}", s.coeff_f64(j));
    }
}

#[test]
fn numeric_backend_matches_exact() {
    for p in [triangle2(), quad4(), HPolytope::unit_cube(2)] {
        let f = integrand("x1^2*x2 - x2 + 2", 2);
        let e = em_expansion_simple(&p, &f, &opts(3)).unwrap();
        let nmr = em_expansion_simple(&p, &f, &opts(3).numeric()).unwrap();
        for j in 0..=3 {
            let want = to_f64(&e.coeff_exact(j).unwrap());
            assert!((nmr.coeff_f64(j) - want).abs() < 1e-7 * want.abs().max(1.0), "j={j}");
        }
    }
}

#[test]
fn twisted_numeric_series_is_real() {
    let f = integrand("exp(-x1^2 - x2^2)", 2);
    let s = em_expansion_simple(&triangle2(), &f, &opts(3)).unwrap();
    assert!(s.coeff_f64(0) > 0.0);
    assert!(em_expansion_simple(&quad4(), &f, &opts(3)).is_ok());
}

#[test]
fn support_away_from_a_facet_ignores_its_todd_coefficients() {
    let p = HPolytope::unit_cube(2);
    // touches only the facet -x1 <= 0 (index 0)
    let f = SmoothFn::bump(2, rat(3, 10), vec![int(0), rat(1, 2)]).unwrap();
    let m = 3;
    let op = ToddOperator::untwisted(4);
    let o = opts(m);
    let inert = inert_facets(&p, &f, m, &o.fd);
    assert_eq!(inert, vec![false, true, true, true]);
    let indices: Vec<Vec<u32>> =
        multi_indices(4, m as u32).into_iter().filter(|a| a[1] == 0 && a[2] == 0 && a[3] == 0).collect();
    let derivs = h_derivatives_numeric(&f, &p, &indices, &o.quad, &o.fd).unwrap();
    // the skipped derivatives are zero up to quadrature noise
    let all = h_derivatives_numeric(&f, &p, &multi_indices(4, m as u32), &o.quad, &o.fd).unwrap();
    for (a, v) in &all {
        if !derivs.contains_key(a) {
            assert!(v.abs() < 1e-9, "{a:?}: {v}");
        }
    }
    let tables = op.numeric_tables(m).unwrap();
    let base = apply_operator_numeric(&op, &derivs, m, 0, |_, r| tables[r].clone()).unwrap();
    let perturbed = apply_operator_numeric(&op, &derivs, m, 0, |i, r| {
        let mut t = tables[r].clone();
        if i != 0 {
            for (j, c) in t.iter_mut().enumerate().skip(1) {
                *c += Complex64::new(0.37 * j as f64, -0.2);
            }
        }
        t
    })
    .unwrap();
    for big_n in [5.0, 10.0, 40.0] {
        let eval = |c: &[f64]| c.iter().enumerate().map(|(j, x)| x * f64::powi(big_n, -(j as i32))).sum::<f64>();
        assert!((eval(&base) - eval(&perturbed)).abs() < 1e-12, "N={big_n}");
    }
    // perturbing the touched facet does change the result
    let touched = apply_operator_numeric(&op, &derivs, m, 0, |i, r| {
        let mut t = tables[r].clone();
        if i == 0 {
            t[1] += Complex64::new(0.5, 0.0);
        }
        t
    })
    .unwrap();
    assert!((touched[1] - base[1]).abs() > 1e-3);
}

#[test]
fn exact_localization_on_polynomial_data() {
    // I(h) independent of h_2: twisting or perturbing variable 2 has no effect
    let op = ToddOperator::untwisted(3);
    let derivs = vec![(vec![0, 0, 0], int(2)), (vec![1, 0, 0], int(3)), (vec![1, 1, 0], int(-1))];
    let tables = op.exact_tables(2).unwrap();
    let base = apply_operator_exact(&op, &derivs, 2, 0, |_, r| tables[r].clone()).unwrap();
    assert_eq!(base, vec![int(2), rat(3, 2), rat(-1, 4)]);
    let other = apply_operator_exact(&op, &derivs, 2, 0, |i, r| {
        let mut t = tables[r].clone();
        if i == 2 {
            t[1] = CycloElem::scalar(1, int(17));
        }
        t
    })
    .unwrap();
    assert_eq!(base, other);
}

#[test]
fn non_real_assembly_is_reported() {
    // a lone twisted factor with ω = i is not real
    let op = ToddOperator {
        nvars: 1,
        terms: vec![OperatorTerm { face: vec![0], element: 1, twists: vec![rat(1, 4)], phase: int(0) }],
    };
    let tables = op.exact_tables(2).unwrap();
    let r = apply_operator_exact(&op, &[(vec![1], int(1))], 2, 0, |_, r| tables[r].clone());
    assert!(matches!(r, Err(Error::NotReal { power: 1, .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_triangles_count_exactly(a in 1i64..4, b in 1i64..4, k in 0u32..3, seed in 0u64..1000) {
        // {y ≥ 0, x ≤ a, b·y ≤ x}: vertex (0,0) has normals (0,-1), (-1,b)... primitive since gcd(1, b) = 1
        let p = poly(2, &[(&[0, -1], 0), (&[1, 0], a), (&[-1, b], 0)]);
        let f = random_poly(&mut ChaCha8Rng::seed_from_u64(seed), 2, k);
        for n in 1..=8u64 {
            let s = em_expansion_simple(&p, &Integrand::Poly(f.clone()), &opts(k as usize + 2).at_residue(n)).unwrap();
            prop_assert_eq!(s.evaluate_exact(n).unwrap(), riemann_sum_exact(&p, &f, n));
        }
    }
}
