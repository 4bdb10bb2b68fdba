use num_complex::Complex64;
use polyroots::annulus::{interleaving_check, MAX_DEVIATION};
use polyroots::tracer::{arc_residual_ratio, extrema_count, slope_deviation};
use polyroots::{
    all_roots, compute_matchings, descent_step, gauss_run, perturb_regular, reich_radius, resolve_annulus, GaussOptions,
    Poly, StepControl,
};
use proptest::prelude::*;

fn complex(r: f64) -> impl Strategy<Value = Complex64> {
    (-r..r, -r..r).prop_map(|(a, b)| Complex64::new(a, b))
}

fn poly(max_degree: usize) -> impl Strategy<Value = Poly> {
    (1..=max_degree)
        .prop_flat_map(|n| (prop::collection::vec(complex(2.0), n), complex(2.0)))
        .prop_filter("leading coefficient away from zero", |(_, lead)| lead.norm() > 0.1)
        .prop_map(|(mut coeffs, lead)| {
            coeffs.push(lead);
            Poly::new(coeffs)
        })
}

fn naive_eval(p: &Poly, z: Complex64) -> Complex64 {
    p.coeffs().iter().enumerate().map(|(k, a)| a * z.powu(k as u32)).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn horner_matches_power_sum(p in poly(8), z in complex(2.0)) {
        let scale: f64 = p.coeffs().iter().enumerate().map(|(k, a)| a.norm() * z.norm().powi(k as i32)).sum();
        prop_assert!((p.eval(z) - naive_eval(&p, z)).norm() <= 1e-13 * (1.0 + scale));
    }

    #[test]
    fn taylor_shift_round_trip(p in poly(8), v in complex(1.5)) {
        let back = p.taylor_shift(v).taylor_shift(-v);
        let size = p.coeffs().iter().map(|c| c.norm()).fold(1.0, f64::max);
        for (a, b) in p.coeffs().iter().zip(back.coeffs()) {
            prop_assert!((a - b).norm() <= 1e-9 * size);
        }
    }

    #[test]
    fn taylor_shift_evaluates_at_offset(p in poly(8), v in complex(1.5), w in complex(0.5)) {
        let shifted = p.taylor_shift(v);
        let want = p.eval(v + w);
        prop_assert!((shifted.eval(w) - want).norm() <= 1e-10 * (1.0 + want.norm()));
    }

    #[test]
    fn deflation_recovers_quotient(q in poly(6), r in complex(2.0)) {
        let p = Poly::from_roots(&[r]);
        let product: Vec<Complex64> = {
            let mut out = vec![Complex64::new(0.0, 0.0); q.coeffs().len() + 1];
            for (i, a) in q.coeffs().iter().enumerate() {
                for (j, b) in p.coeffs().iter().enumerate() {
                    out[i + j] += a * b;
                }
            }
            out
        };
        let deflated = Poly::new(product).deflate(r);
        for (a, b) in q.coeffs().iter().zip(deflated.coeffs()) {
            prop_assert!((a - b).norm() <= 1e-9 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn harmonic_parts_satisfy_cauchy_riemann(p in poly(6), z in complex(2.0)) {
        let he = p.harmonic_eval(z.re, z.im);
        prop_assert_eq!(he.gx, he.hy);
        prop_assert_eq!(he.gy, -he.hx);
        let f = p.eval(z);
        prop_assert!((he.g - f.re).abs() <= 1e-12 * (1.0 + f.norm()));
    }

    #[test]
    fn descent_step_decreases(p in poly(8), v in complex(1.4), t in complex(4.0)) {
        prop_assume!((p.eval(v) - t).norm() > 1e-6);
        let r = descent_step(&p, v, t, None).unwrap();
        prop_assert!(r.after < r.before);
        prop_assert!(r.conditions_hold());
        prop_assert!(r.phase_error() <= 1e-9);
    }

    #[test]
    fn descent_respects_radius_cap(p in poly(6), v in complex(0.7), t in complex(4.0)) {
        prop_assume!((p.eval(v) - t).norm() > 1e-6);
        let r = descent_step(&p, v, t, Some(1.5)).unwrap();
        prop_assert!((v + r.p).norm() < 1.5);
    }

    #[test]
    fn all_roots_have_small_residuals(p in poly(8)) {
        let roots = all_roots(&p, 1e-10).unwrap();
        prop_assert_eq!(roots.len(), p.degree());
        for z in roots {
            prop_assert!(p.eval(z).norm() <= 1e-8);
        }
    }

    #[test]
    fn reich_bound_holds(p in poly(8), theta in 0.0..std::f64::consts::TAU) {
        let r = reich_radius(&p).unwrap();
        for radius in [r, 1.5 * r, 3.0 * r] {
            let z = Complex64::from_polar(radius, theta);
            let bound = 0.5 * p.leading().norm() * radius.powi(p.degree() as i32);
            prop_assert!(p.eval(z).norm() >= bound * (1.0 - 1e-12));
        }
    }

    #[test]
    fn annulus_nodes_interleave(p in poly(6)) {
        let ns = resolve_annulus(&p).unwrap();
        prop_assert_eq!(ns.nodes.len(), 4 * p.degree());
        prop_assert!(interleaving_check(&ns).is_ok());
        prop_assert!(ns.max_deviation() <= MAX_DEVIATION);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gauss_root_residual(p in poly(6)) {
        let run = gauss_run(&p, &GaussOptions::default()).unwrap();
        prop_assert!(run.residual <= 1e-9);
        prop_assert!(run.crossing.bx.contains(&[run.crossing.x, run.crossing.y]));
    }

    #[test]
    fn traced_arcs_pass_audits(p in poly(5)) {
        let monic = p.monic();
        let prob = perturb_regular(&monic, 1e-13).unwrap();
        let ns = resolve_annulus(&prob.shifted()).unwrap();
        let ctrl = StepControl::for_problem(&prob, ns.radius);
        let m = compute_matchings(&prob, &ns, &ctrl).unwrap();
        let n = p.degree();
        for arc in m.p_arcs.iter().chain(&m.q_arcs) {
            prop_assert!(arc_residual_ratio(&prob, arc, &ctrl) <= 1.0);
            prop_assert!(extrema_count(arc) <= 2 * n * n.saturating_sub(1).max(1));
            prop_assert!(slope_deviation(&prob, arc, 10) <= 1e-2);
            prop_assert!(arc.samples.windows(2).all(|w| (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1) <= ctrl.max_step));
        }
    }
}

#[test]
fn parallel_tracing_is_deterministic() {
    let p = Poly::from_real(&[1.0, -1.0, 0.0, 0.0, 0.0, 1.0]);
    let seq = gauss_run(&p, &GaussOptions::default()).unwrap();
    let par = gauss_run(&p, &GaussOptions { jobs: 4, ..GaussOptions::default() }).unwrap();
    assert_eq!(seq.root, par.root);
    assert_eq!(seq.matchings, par.matchings);
    assert_eq!(seq.pair, par.pair);
}

#[test]
fn high_degree_unity_roots() {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); 13];
    coeffs[0] = Complex64::new(-1.0, 0.0);
    coeffs[12] = Complex64::new(1.0, 0.0);
    let p = Poly::new(coeffs);
    let run = gauss_run(&p, &GaussOptions::default()).unwrap();
    assert!((run.root.norm() - 1.0).abs() < 1e-9);
    assert!(run.residual <= 1e-9);
}

#[test]
fn clustered_roots() {
    let roots: Vec<Complex64> = (0..6).map(|k| Complex64::new(1.0 + 1e-3 * k as f64, 0.0)).collect();
    let p = Poly::from_roots(&roots);
    let run = gauss_run(&p, &GaussOptions::default()).unwrap();
    assert!(run.residual <= 1e-9);
}
