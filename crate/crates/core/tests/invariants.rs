use std::sync::OnceLock;

use proptest::prelude::*;

use liftbv::covers::{self, DeckElement, Q8};
use liftbv::field::{synth, FieldHeader, SampledField, FIELD_FORMAT_VERSION};
use liftbv::lift::{lift_pa_field, loop_monodromy, LiftConfig, LiftedField};
use liftbv::polygeom::linalg::dist;
use liftbv::scaffold::{build_analytic_scaffold, build_generic_scaffold, Scaffold};

fn header(lambda: f64) -> FieldHeader {
    FieldHeader {
        version: FIELD_FORMAT_VERSION,
        target: "circle".into(),
        lo: vec![-1.0],
        hi: vec![1.0],
        resolution: vec![3],
        lambda,
    }
}

fn grid_circle() -> &'static Scaffold {
    static S: OnceLock<Scaffold> = OnceLock::new();
    S.get_or_init(|| build_generic_scaffold("circle", 8, 2.0, None).unwrap())
}

fn vortex_lift() -> &'static LiftedField {
    static L: OnceLock<LiftedField> = OnceLock::new();
    L.get_or_init(|| {
        let f = synth::vortex(16).unwrap();
        let (u, _) = liftbv::field::interpolate_pa(&f).unwrap();
        let mut s = build_analytic_scaffold("circle", 2.0, Some(0.25)).unwrap();
        s.certify(500, 1);
        let cfg = LiftConfig {
            trials: 4,
            ..Default::default()
        };
        lift_pa_field(&u, &s, &cfg).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn clamping_is_idempotent(
        vals in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 4),
        lambda in 0.5f64..3.0,
    ) {
        let samples: Vec<Vec<f64>> = vals.iter().map(|&(a, b)| vec![a, b]).collect();
        let mut f = SampledField::new(header(lambda), samples).unwrap();
        f.clamp_to_cube();
        let once = f.samples.clone();
        prop_assert!(once.iter().flatten().all(|v| v.abs() <= lambda));
        prop_assert_eq!(f.clamp_to_cube(), 0);
        prop_assert_eq!(&f.samples, &once);
    }

    #[test]
    fn field_text_round_trips(vals in prop::collection::vec((-1.7f64..1.7, -1.7f64..1.7), 4)) {
        let samples: Vec<Vec<f64>> = vals.iter().map(|&(a, b)| vec![a, b]).collect();
        let f = SampledField::new(header(1.75), samples).unwrap();
        let back = SampledField::parse(&f.to_text()).unwrap();
        prop_assert_eq!(back.samples, f.samples);
    }

    #[test]
    fn deck_identify_inverts_apply(k in -20i64..20, l in -20i64..20, axis in 0u8..4, neg: bool, seed: u64) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for (id, g) in [
            ("circle", DeckElement::Lattice(vec![k])),
            ("clifford_torus", DeckElement::Lattice(vec![k, l])),
            ("so3_mod_v4", DeckElement::Unit(Q8 { neg, axis })),
        ] {
            let t = covers::target(id).unwrap();
            let w = t.sample_cover(&mut rng);
            prop_assert_eq!(t.deck_identify(&w, &t.apply(&g, &w)).unwrap(), g);
        }
    }

    #[test]
    fn retraction_fixes_the_circle(a in 0.0f64..std::f64::consts::TAU) {
        let z = [a.cos(), a.sin()];
        let r = grid_circle().rho(&z).unwrap();
        prop_assert!(dist(&r, &z) <= 1e-9);
    }

    #[test]
    fn retraction_lands_on_the_circle(x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let s = grid_circle();
        prop_assume!(s.dist_to_singular(&[x, y]) > 1e-6);
        let r = s.rho(&[x, y]).unwrap();
        prop_assert!((r[0].hypot(r[1]) - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn loops_around_the_vortex_pick_up_the_generator(
        r in 0.3f64..0.9,
        phase in 0.0f64..1.0,
        n in 5usize..12,
        ccw: bool,
    ) {
        let lf = vortex_lift();
        let mut pts: Vec<Vec<f64>> = (0..n)
            .map(|k| {
                let a = std::f64::consts::TAU * (k as f64 + phase) / n as f64;
                vec![r * a.cos(), r * a.sin()]
            })
            .collect();
        if !ccw {
            pts.reverse();
        }
        match loop_monodromy(lf, &pts) {
            Ok(g) => prop_assert_eq!(g.name(), if ccw { "g" } else { "g^-1" }),
            Err(e) => prop_assert!(matches!(e, liftbv::error::LiftError::IllPosedLoop)),
        }
    }

    #[test]
    fn loops_away_from_the_vortex_are_trivial(cx in -0.8f64..0.8, r in 0.02f64..0.15, n in 4usize..9) {
        let lf = vortex_lift();
        let c = synth::vortex_centre(16);
        prop_assume!((cx - c[0]).abs() > r + 0.05);
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / n as f64;
                vec![cx + r * a.cos(), 0.5 + r * a.sin()]
            })
            .collect();
        if let Ok(g) = loop_monodromy(lf, &pts) {
            prop_assert!(g.is_identity());
        }
    }
}
