use super::*;
use crate::exactnum::{int, rat};
use crate::expr::{parse, Integrand, Poly};
use crate::polytope::Facet;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn triangle2() -> HPolytope {
    HPolytope::new(2, vec![Facet::new(vec![0, -1], 0), Facet::new(vec![1, 0], 1), Facet::new(vec![-2, 1], 0)]).unwrap()
}

fn test_polytopes() -> Vec<HPolytope> {
    vec![
        HPolytope::unit_cube(1),
        HPolytope::unit_cube(2),
        HPolytope::unit_cube(3),
        HPolytope::standard_simplex(2, 1),
        HPolytope::standard_simplex(3, 2),
        triangle2(),
        HPolytope::new(
            2,
            vec![
                Facet::new(vec![0, -1], 0),
                Facet::new(vec![-4, 1], 0),
                Facet::new(vec![1, 0], 2),
                Facet::new(vec![0, 1], 4),
            ],
        )
        .unwrap(),
        HPolytope::new(2, vec![Facet::new(vec![-1, 0], 0), Facet::new(vec![0, -1], 0), Facet::new(vec![1, 2], 1)])
            .unwrap(),
    ]
}

fn poly_of(src: &str, n: usize) -> Poly {
    match parse(src, n).unwrap() {
        Integrand::Poly(p) => p,
        Integrand::Smooth(_) => panic!("not a polynomial: {src}"),
    }
}

/// Volume via the vertex formula: Σ_v ⟨c, v⟩^n / (n! Π_i ⟨c, α_i⟩ |det U_v|) for
/// generic `c`, with `α_i` the edge directions `-U_v^{-1} e_i`.
fn lawrence_volume(p: &HPolytope) -> Rational {
    use crate::exactnum::linalg::{determinant, inverse};
    let n = p.dim();
    let c: Vec<Rational> = [3, 7, 11, 13][..n].iter().map(|&x| int(x)).collect();
    let mut total = Rational::zero();
    for v in p.vertices() {
        let u: Vec<Vec<Rational>> =
            v.incident.iter().map(|&i| p.facets()[i].u.iter().map(|&x| int(x)).collect()).collect();
        let inv = inverse(&u).unwrap();
        let det = determinant(&u);
        let mut denom = det.abs();
        for col in 0..n {
            // edge direction is -U^{-1} e_col
            let ca: Rational = (0..n).map(|r| &inv[r][col] * &c[r]).sum();
            denom *= ca;
        }
        let cv: Rational = c.iter().zip(&v.coords).map(|(a, b)| a * b).sum();
        let fact: Rational = (1..=n as i64).map(int).fold(int(1), |a, b| a * b);
        total += num_traits::pow(cv, n) / (denom * fact);
    }
    total
}

#[test]
fn triangulation_examples() {
    assert_eq!(triangulate(&triangle2()).unwrap().len(), 1);
    let sq = triangulate(&HPolytope::unit_cube(2)).unwrap();
    assert_eq!(sq.len(), 2);
    assert!(sq.iter().all(|s| s.indices[0] == 0));
    let vol = integrate_poly_symbolic(&Poly::one(2), &HPolytope::unit_cube(2)).unwrap();
    assert_eq!(vol.eval(&vec![int(0); 4]), int(1));
    assert_eq!(triangulate(&HPolytope::unit_cube(3)).unwrap().len(), 6);
}

#[test]
fn symbolic_examples() {
    let sq = HPolytope::unit_cube(2);
    // facets: -x1 ≤ 0 (h1), x1 ≤ 1 (h2), -x2 ≤ 0 (h3), x2 ≤ 1 (h4)
    let i = integrate_poly_symbolic(&Poly::one(2), &sq).unwrap();
    let side1 = &(&Poly::one(4) + &Poly::var(4, 0)) + &Poly::var(4, 1);
    let side2 = &(&Poly::one(4) + &Poly::var(4, 2)) + &Poly::var(4, 3);
    assert_eq!(i, &side1 * &side2);

    let s = HPolytope::standard_simplex(2, 1);
    let zero = vec![int(0); 3];
    assert_eq!(integrate_poly_symbolic(&poly_of("x1", 2), &s).unwrap().eval(&zero), rat(1, 6));
    assert_eq!(integrate_poly_symbolic(&poly_of("x1*x2", 2), &s).unwrap().eval(&zero), rat(1, 24));
}

#[test]
fn triangulation_is_measure_exact() {
    for p in test_polytopes() {
        let vol = integrate_poly_symbolic(&Poly::one(p.dim()), &p).unwrap();
        assert_eq!(vol.eval(&vec![int(0); p.num_facets()]), lawrence_volume(&p), "{p:?}");
    }
}

#[test]
fn symbolic_matches_shifted_polytope() {
    // I(h) at a rational h equals the symbolic integral over the explicitly shifted polytope
    let t = triangle2();
    let f = poly_of("x1^2*x2 + 3*x2 - 1/2", 2);
    let i = integrate_poly_symbolic(&f, &t).unwrap();
    let h = [rat(1, 10), rat(1, 5), rat(-1, 7)];
    // Δ_h has vertices given by the vertex paths; integrate over that fixed triangle
    let verts: Vec<Vec<Rational>> = t.vertices().iter().map(|v| t.shifted_vertex(v, &h).unwrap()).collect();
    let s = Simplex {
        indices: vec![0, 1, 2],
        vertices: verts.iter().map(|v| v.iter().map(|c| Poly::constant(0, c.clone())).collect()).collect(),
    };
    let direct = integrate_over_simplex(&f, &s, 0);
    assert_eq!(i.eval(&h), direct.eval(&[]));
}

#[test]
fn numeric_examples() {
    let o = QuadOptions::default();
    let sq = HPolytope::unit_cube(2);
    let one = parse("1", 2).unwrap().to_smooth();
    assert!((integrate_numeric(&one, &sq, &vec![int(0); 4], &o).unwrap() - 1.0).abs() < 1e-12);
    let x1 = parse("x1", 2).unwrap().to_smooth();
    let s = HPolytope::standard_simplex(2, 1);
    assert!((integrate_numeric(&x1, &s, &vec![int(0); 3], &o).unwrap() - 1.0 / 6.0).abs() < 1e-11);
    let e = parse("exp(x1 + x2)", 2).unwrap().to_smooth();
    let want = (1f64.exp() - 1.0).powi(2);
    assert!((integrate_numeric(&e, &sq, &vec![int(0); 4], &o).unwrap() - want).abs() < 1e-9);
    // bump inside the square: ∫ = π R² ∫_0^1 exp(-1/s) ds, the radial integral by 1-D Gauss
    let b = crate::expr::SmoothFn::bump(2, rat(1, 3), vec![rat(1, 2), rat(1, 2)]).unwrap();
    let v = integrate_numeric(&b, &sq, &vec![int(0); 4], &o).unwrap();
    let g = GaussLegendre::new(20).composite(8);
    let radial: f64 = g.nodes.iter().zip(&g.weights).map(|(s, w)| w * (-1.0 / s).exp()).sum();
    let want = std::f64::consts::PI / 9.0 * radial;
    assert!((v - want).abs() < 1e-9 * want, "{v} vs {want}");
}

#[test]
fn quadrature_is_exact_for_low_degree() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let o = QuadOptions::default();
    for p in test_polytopes() {
        let n = p.dim();
        for _ in 0..3 {
            let mut f = Poly::zero(n);
            for _ in 0..6 {
                let e: Vec<u32> = (0..n).map(|_| rng.random_range(0..3)).collect();
                f.add_term(e, rat(rng.random_range(-5..6), rng.random_range(1..4)));
            }
            let exact = integrate_poly_symbolic(&f, &p).unwrap().eval(&vec![int(0); p.num_facets()]);
            let exact = to_f64(&exact);
            let num = integrate_numeric(&crate::expr::SmoothFn::from_poly(&f), &p, &vec![int(0); p.num_facets()], &o)
                .unwrap();
            assert!((num - exact).abs() <= 1e-12 * exact.abs().max(1.0), "{num} vs {exact}");
        }
    }
}

#[test]
fn h_derivative_examples() {
    let sq = HPolytope::unit_cube(2);
    let one = parse("1", 2).unwrap().to_smooth();
    let idx = vec![vec![1, 0, 0, 0], vec![1, 1, 0, 0], vec![2, 0, 0, 0], vec![1, 0, 1, 0]];
    let d = h_derivatives_numeric(&one, &sq, &idx, &QuadOptions::default(), &FdOptions::default()).unwrap();
    assert!((d[&idx[0]] - 1.0).abs() < 1e-8);
    assert!((d[&idx[1]] - 0.0).abs() < 1e-8);
    assert!((d[&idx[2]] - 0.0).abs() < 1e-8);
    assert!((d[&idx[3]] - 1.0).abs() < 1e-8);
}

#[test]
fn backend_agreement_on_h_derivatives() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for p in [HPolytope::unit_cube(2), triangle2(), HPolytope::standard_simplex(2, 1)] {
        let d = p.num_facets();
        let mut f = Poly::zero(2);
        for _ in 0..5 {
            let e: Vec<u32> = (0..2).map(|_| rng.random_range(0..3)).collect();
            f.add_term(e, rat(rng.random_range(-5..6), rng.random_range(1..4)));
        }
        let exact = integrate_poly_symbolic(&f, &p).unwrap();
        let idx = multi_indices(d, 4);
        let num = h_derivatives_numeric(
            &crate::expr::SmoothFn::from_poly(&f),
            &p,
            &idx,
            &QuadOptions::default(),
            &FdOptions::default(),
        )
        .unwrap();
        for a in &idx {
            let mut q = exact.clone();
            for (v, &k) in a.iter().enumerate() {
                for _ in 0..k {
                    q = q.derivative(v);
                }
            }
            let want = to_f64(&q.eval(&vec![int(0); d]));
            let got = num[a];
            let ok = if want == 0.0 { got.abs() < 1e-8 } else { (got - want).abs() <= 1e-6 * want.abs() };
            assert!(ok, "{a:?}: {got} vs {want}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn symbolic_integral_is_additive(c1 in -5i64..6, c2 in -5i64..6, k in 0u32..4) {
        let t = triangle2();
        let f = &Poly::monomial(2, vec![k, 1], int(c1)) + &Poly::monomial(2, vec![1, k], int(c2));
        let g = Poly::monomial(2, vec![k, 1], int(c1));
        let h = Poly::monomial(2, vec![1, k], int(c2));
        let lhs = integrate_poly_symbolic(&f, &t).unwrap();
        let rhs = &integrate_poly_symbolic(&g, &t).unwrap() + &integrate_poly_symbolic(&h, &t).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
