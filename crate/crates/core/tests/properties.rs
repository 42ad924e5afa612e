use proptest::prelude::*;

use ballcover::covering::{adversary_uncovered, merge_collinear};
use ballcover::derivatives::{rho_analytic, rho_finite_difference};
use ballcover::separation::{positively_separates, selection_oracle_exhaustive, SelectionInstance};
use ballcover::witness::{gap, negative_witness, positive_witness, witness_bruteforce_oracle, Side};
use ballcover::{Ball, Space, Vector};

type Sp = Space<f64>;
type V = Vector<f64>;

fn v(c: &[f64]) -> V {
    V::from_f64s(c).unwrap()
}

fn space_strategy() -> impl Strategy<Value = Sp> {
    (2usize..=4, 0usize..6).prop_flat_map(|(n, kind)| {
        let gens = prop::collection::vec(prop::collection::vec(-1.0f64..1.0, n), n.max(3)..=6);
        (Just(n), Just(kind), gens).prop_map(|(n, kind, gens)| match kind {
            0 => Sp::lp(n, 1.0).unwrap(),
            1 => Sp::lp(n, 1.5).unwrap(),
            2 => Sp::lp(n, 2.0).unwrap(),
            3 => Sp::lp(n, 4.0).unwrap(),
            4 => Sp::linf(n).unwrap(),
            _ => {
                let mut rows = gens;
                // Adding the basis keeps the generators spanning.
                for i in 0..n {
                    let mut e = vec![0.0; n];
                    e[i] = 1.0;
                    rows.push(e);
                }
                let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
                Sp::polyhedral(n, &refs).unwrap()
            }
        })
    })
}

fn with_vectors(k: usize) -> impl Strategy<Value = (Sp, Vec<Vec<f64>>)> {
    space_strategy().prop_flat_map(move |s| {
        let n = s.dim();
        (Just(s), prop::collection::vec(prop::collection::vec(-3.0f64..3.0, n), k))
    })
}

fn nonzero(c: &[f64]) -> bool {
    c.iter().map(|t| t.abs()).sum::<f64>() > 1e-3
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn norm_axioms((s, vs) in with_vectors(2), a in -5.0f64..5.0) {
        let (x, y) = (v(&vs[0]), v(&vs[1]));
        let (nx, ny) = (s.norm(&x).unwrap(), s.norm(&y).unwrap());
        let sum: Vec<f64> = vs[0].iter().zip(&vs[1]).map(|(p, q)| p + q).collect();
        prop_assert!(s.norm(&v(&sum)).unwrap() <= (nx + ny) * (1.0 + 1e-14));
        let scaled: Vec<f64> = vs[0].iter().map(|p| a * p).collect();
        let ns = s.norm(&v(&scaled)).unwrap();
        prop_assert!((ns - a.abs() * nx).abs() <= 1e-13 * (1.0 + ns));
        prop_assert!(nx >= 0.0);
        prop_assert_eq!(nx == 0.0, vs[0].iter().all(|c| *c == 0.0));
    }

    #[test]
    fn derivative_identities((s, vs) in with_vectors(2), a in -3.0f64..3.0, t in 0.1f64..4.0) {
        prop_assume!(nonzero(&vs[0]));
        let (x, y) = (v(&vs[0]), v(&vs[1]));
        let nx = s.norm(&x).unwrap();
        let ny = s.norm(&y).unwrap();
        let tol = 1e-10 * (1.0 + nx * (ny + a.abs() * nx + t * ny));
        let r = rho_analytic(&s, &x, &y).unwrap();
        prop_assert!(r.rho_minus <= r.rho_plus + tol);
        prop_assert!(r.rho_plus.abs() <= nx * ny * (1.0 + 1e-12) + 1e-15);

        let neg: Vec<f64> = vs[1].iter().map(|c| -c).collect();
        let rn = rho_analytic(&s, &x, &v(&neg)).unwrap();
        prop_assert!((rn.rho_plus + r.rho_minus).abs() <= tol);
        prop_assert!((rn.rho_minus + r.rho_plus).abs() <= tol);

        let shifted: Vec<f64> = vs[1].iter().zip(&vs[0]).map(|(q, p)| q + a * p).collect();
        let rs = rho_analytic(&s, &x, &v(&shifted)).unwrap();
        prop_assert!((rs.rho_plus - r.rho_plus - a * nx * nx).abs() <= tol);
        prop_assert!((rs.rho_minus - r.rho_minus - a * nx * nx).abs() <= tol);

        let ty: Vec<f64> = vs[1].iter().map(|c| t * c).collect();
        let rt = rho_analytic(&s, &x, &v(&ty)).unwrap();
        prop_assert!((rt.rho_plus - t * r.rho_plus).abs() <= tol);

        let rx = rho_analytic(&s, &x, &x).unwrap();
        prop_assert!((rx.rho_plus - nx * nx).abs() <= tol && (rx.rho_minus - nx * nx).abs() <= tol);
    }

    #[test]
    fn finite_differences_bracket_the_analytic_value((s, vs) in with_vectors(2)) {
        prop_assume!(nonzero(&vs[0]));
        let (x, y) = (v(&vs[0]), v(&vs[1]));
        let a = rho_analytic(&s, &x, &y).unwrap();
        let f = rho_finite_difference(&s, &x, &y).unwrap();
        let scale = 1.0f64.max(s.norm(&x).unwrap() * s.norm(&y).unwrap());
        prop_assert!((a.rho_plus - f.rho_plus).abs() <= 1e-5 * scale, "{a:?} vs {f:?}");
        prop_assert!((a.rho_minus - f.rho_minus).abs() <= 1e-5 * scale, "{a:?} vs {f:?}");
    }

    #[test]
    fn witness_exists_exactly_when_the_left_derivative_is_positive((s, vs) in with_vectors(2)) {
        prop_assume!(nonzero(&vs[0]) && nonzero(&vs[1]));
        let (x, y) = (v(&vs[0]), v(&vs[1]));
        let r = rho_analytic(&s, &x, &y).unwrap();
        let scale = s.norm(&x).unwrap() * s.norm(&y).unwrap();
        prop_assume!(r.rho_minus.abs() > 1e-6 * scale);
        let out = positive_witness(&s, &x, &y).unwrap();
        prop_assert_eq!(out.is_found(), r.rho_minus > 0.0);
        if let Some(w) = out.witness() {
            prop_assert!(w.lambda > 0.0);
            prop_assert!(w.verify(&s, &x, &y).unwrap());
            let d = s.dist(&x.scale(w.lambda), &y).unwrap();
            prop_assert!(d < w.radius && w.radius <= w.lambda * s.norm(&x).unwrap());
        }
        prop_assert_eq!(witness_bruteforce_oracle(&s, &x, &y, Side::Positive).unwrap(), r.rho_minus > 0.0);
    }

    #[test]
    fn negative_side_mirrors_the_positive_side_on_minus_x((s, vs) in with_vectors(2)) {
        prop_assume!(nonzero(&vs[0]) && nonzero(&vs[1]));
        let (x, y) = (v(&vs[0]), v(&vs[1]));
        let mx = x.scale(-1.0);
        let neg = negative_witness(&s, &x, &y).unwrap();
        let pos = positive_witness(&s, &mx, &y).unwrap();
        prop_assert_eq!(neg.is_found(), pos.is_found());
        if let (Some(a), Some(b)) = (neg.witness(), pos.witness()) {
            prop_assert!(a.lambda < 0.0);
            prop_assert!((a.lambda + b.lambda).abs() <= 1e-12 * b.lambda.abs());
            prop_assert!(a.verify(&s, &x, &y).unwrap());
        }
    }

    #[test]
    fn gap_is_nonincreasing_on_the_positive_axis((s, vs) in with_vectors(2), l1 in 0.01f64..50.0, l2 in 0.01f64..50.0) {
        prop_assume!(nonzero(&vs[0]));
        let (x, y) = (v(&vs[0]), v(&vs[1]));
        let (lo, hi) = if l1 < l2 { (l1, l2) } else { (l2, l1) };
        let g_lo = gap(&s, &x, &y, lo).unwrap();
        let g_hi = gap(&s, &x, &y, hi).unwrap();
        let scale = 1.0 + hi * s.norm(&x).unwrap() + s.norm(&y).unwrap();
        prop_assert!(g_hi <= g_lo + 1e-13 * scale);
        prop_assert!(g_hi.abs() <= s.norm(&y).unwrap() * (1.0 + 1e-12) + 1e-13 * scale);
    }

    #[test]
    fn merged_ball_contains_each_ball((s, vs) in with_vectors(1), ls in prop::collection::vec(0.2f64..5.0, 1..5),
                                      fr in prop::collection::vec(0.1f64..0.95, 4), t in 0.0f64..3.0) {
        prop_assume!(nonzero(&vs[0]));
        let x = v(&vs[0]);
        let nx = s.norm(&x).unwrap();
        let balls: Vec<Ball<f64>> = ls.iter().zip(fr.iter().cycle())
            .map(|(l, f)| Ball::new(x.scale(*l), f * l * nx).unwrap())
            .collect();
        let target = ls.iter().copied().fold(0.0, f64::max) + t;
        let m = merge_collinear(&s, &balls, &x, target).unwrap();
        prop_assert!(m.radius <= target * nx * (1.0 + 1e-12));
        for b in &balls {
            // B(c, r) ⊂ B(c', r') iff ‖c − c'‖ + r ≤ r' in a normed space.
            prop_assert!(s.dist(&b.center, &m.center).unwrap() + b.radius <= m.radius * (1.0 + 1e-12));
        }
    }

    #[test]
    fn adversary_point_escapes_every_ball((s, vs) in with_vectors(3), rs in prop::collection::vec(0.05f64..0.999, 3)) {
        let balls: Vec<Ball<f64>> = vs.iter().zip(&rs).filter(|(c, _)| nonzero(c))
            .map(|(c, f)| Ball::new(v(c), f * s.norm(&v(c)).unwrap()).unwrap()).collect();
        prop_assume!(!balls.is_empty() && balls.len() < s.dim());
        let u = adversary_uncovered(&s, &balls, false).unwrap();
        prop_assert!((s.norm(&u.point).unwrap() - 1.0).abs() <= 1e-12);
        for (b, slack) in balls.iter().zip(&u.per_ball_slack) {
            let direct = b.radius - s.dist(&b.center, &u.point).unwrap();
            prop_assert_eq!(direct, *slack);
            let scale = 1.0 + s.norm(&b.center).unwrap();
            prop_assert!(direct <= 1e-12 * scale);
        }
    }

    #[test]
    fn space_json_round_trip(s in space_strategy()) {
        let text = serde_json::to_string(&s).unwrap();
        let back: Sp = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn separation_matches_exhaustive_selections(
        kind in 0usize..3,
        dirs in prop::collection::vec(prop::collection::vec(-2i32..=2, 2), 1..4),
        pts in prop::collection::vec(prop::collection::vec(-2i32..=2, 2), 1..6),
    ) {
        let s = match kind {
            0 => Sp::lp(2, 1.0).unwrap(),
            1 => Sp::linf(2).unwrap(),
            _ => Sp::polyhedral(2, &[&[1.0, 0.0], &[0.0, 1.0], &[0.6, 0.8]]).unwrap(),
        };
        // Integer coordinates put many points on kinks and make ties exact.
        let to_v = |c: &Vec<i32>| v(&[c[0] as f64, c[1] as f64]);
        let dirs: Vec<V> = dirs.iter().filter(|c| c.iter().any(|t| *t != 0)).map(to_v)
            .map(|d| d.scale(1.0 / s.norm(&d).unwrap())).collect();
        let pts: Vec<V> = pts.iter().filter(|c| c.iter().any(|t| *t != 0)).map(to_v).collect();
        prop_assume!(!dirs.is_empty() && !pts.is_empty());
        let inst = SelectionInstance::new(s, dirs, pts).unwrap();
        let fast = positively_separates(&inst).unwrap();
        let slow = selection_oracle_exhaustive(&inst).unwrap();
        prop_assert_eq!(fast.separated, slow);
        prop_assert_eq!(fast.separated, fast.failing_point.is_none());
    }
}
