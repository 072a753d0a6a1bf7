use std::collections::HashMap;

use procmvs::math::vec2;
use procmvs::noise::NoiseField;
use procmvs::scene::{make_shape, SizeClass};
use procmvs::seed::{rng_from, Stream};
use procmvs::shapegen::{
    displace_mesh, gen_profile, gen_stem, parallel_transport_frames, DisplaceSpec, ProfileSpec,
    StemSpec, TriangleMesh,
};
use procmvs::GeneratorConfig;
use proptest::prelude::*;

fn stem_spec(n_steps: usize) -> StemSpec<f64> {
    StemSpec {
        n_steps,
        step_sigma: 0.5,
        turn_sigma: 0.6,
        degree: 3,
    }
}

/// Face count per undirected edge, with vertices welded by exact position
/// (flat-shaded caps duplicate their rim vertices).
fn edge_uses(mesh: &TriangleMesh<f64>) -> HashMap<([u64; 3], [u64; 3]), usize> {
    let key = |i: u32| {
        let p = mesh.positions[i as usize];
        [p.x.to_bits(), p.y.to_bits(), p.z.to_bits()]
    };
    let mut uses = HashMap::new();
    for t in &mesh.triangles {
        for k in 0..3 {
            let (a, b) = (key(t[k]), key(t[(k + 1) % 3]));
            *uses.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }
    uses
}

#[test]
fn stem_reach_grows_with_steps() {
    let mut rng = rng_from(10);
    let mean_reach: Vec<f64> = [2, 4, 8, 16]
        .iter()
        .map(|&n| {
            let total: f64 = (0..100)
                .map(|_| {
                    let stem = gen_stem(&mut rng, &stem_spec(n)).unwrap();
                    let (a, b) = stem.domain();
                    (stem.point(b).unwrap() - stem.point(a).unwrap()).norm()
                })
                .sum();
            total / 100.0
        })
        .collect();
    for w in mean_reach.windows(2) {
        assert!(w[1] > w[0], "{mean_reach:?}");
    }
}

#[test]
fn transported_normals_turn_smoothly() {
    let mut rng = rng_from(11);
    for _ in 0..100 {
        let stem = gen_stem(&mut rng, &stem_spec(8)).unwrap();
        let (a, b) = stem.domain();
        let tangents: Vec<_> = (0..=200)
            .map(|i| {
                let t = a + (b - a) * i as f64 / 200.0;
                stem.point_and_tangent(t).unwrap().1.normalized()
            })
            .collect();
        let frames = parallel_transport_frames(&tangents, procmvs::math::vec3(0.0, 0.0, 1.0));
        for f in &frames {
            assert!(f.normal.dot(f.tangent).abs() < 1e-9);
            assert!((f.normal.cross(f.binormal) - f.tangent).norm() < 1e-9);
        }
        for w in frames.windows(2) {
            assert!(w[0].normal.dot(w[1].normal) > 0.0);
        }
    }
}

#[test]
fn generated_shapes_are_closed_and_repeatable() {
    let config = GeneratorConfig::default();
    for (stream, class) in [
        (Stream::LargeShapes, SizeClass::Large),
        (Stream::SmallShapes, SizeClass::Small),
        (Stream::GroundScatter, SizeClass::Tiny),
    ] {
        for index in 0..4 {
            let mesh = make_shape(77, stream, index, class, &config).unwrap();
            let again = make_shape(77, stream, index, class, &config).unwrap();
            assert_eq!(mesh, again);
            let open = edge_uses(&mesh)
                .into_iter()
                .filter(|&(_, n)| n != 2)
                .count();
            assert_eq!(
                open, 0,
                "{class:?} {index}: {open} edges not shared by two faces"
            );
            let (c, r) = mesh.bounding_sphere();
            assert!(c.norm() < 1e-9 && (r - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn displacement_moves_vertices_at_most_the_combined_magnitude() {
    let sphere = TriangleMesh::<f64>::uv_sphere(1.0, 48, 25);
    let spec = DisplaceSpec {
        coarse_field: NoiseField::Perlin {
            seed: 5,
            scale: 3.0,
            octaves: 4,
        },
        coarse_magnitude: 0.05,
        fine_field: NoiseField::Brick {
            brick_size: vec2(0.2, 0.1),
            mortar_width: 0.02,
            row_offset: 0.5,
            seed: 6,
        },
        fine_magnitude: 0.01,
        subdivision_level: 1,
    };
    let base = sphere.subdivide();
    let out = displace_mesh(&sphere, &spec).unwrap();
    assert_eq!(out.vertex_count(), base.vertex_count());
    let worst = out
        .positions
        .iter()
        .zip(&base.positions)
        .map(|(a, b)| (*a - *b).norm())
        .fold(0.0, f64::max);
    assert!(worst <= spec.max_travel() + 1e-12, "{worst}");
    assert!(worst > 0.5 * spec.max_travel());
}

#[test]
fn degrees_outside_one_to_three_are_rejected() {
    let mut rng = rng_from(12);
    for degree in [0, 4] {
        assert!(gen_profile(&mut rng, &ProfileSpec::starfish(10, 0.1, 0.1, degree)).is_err());
        assert!(gen_stem(
            &mut rng,
            &StemSpec {
                degree,
                ..stem_spec(6)
            }
        )
        .is_err());
    }
    for degree in 1..=3 {
        assert_eq!(
            gen_profile(&mut rng, &ProfileSpec::starfish(10, 0.1, 0.1, degree))
                .unwrap()
                .degree(),
            degree
        );
        assert_eq!(
            gen_stem(
                &mut rng,
                &StemSpec {
                    degree,
                    ..stem_spec(6)
                }
            )
            .unwrap()
            .degree(),
            degree
        );
    }
}

#[test]
fn noiseless_starfish_is_a_rounded_regular_polygon() {
    let n = 16;
    let spec = ProfileSpec::<f64>::starfish(n, 0.0, 0.0, 3);
    let c = gen_profile::<f64, _>(&mut rng_from(13), &spec).unwrap();
    // uniform cubic B-spline over a regular n-gon: radius at knots and at span midpoints
    let theta = std::f64::consts::TAU / n as f64;
    let at_knot = (4.0 + 2.0 * theta.cos()) / 6.0;
    let at_mid = (2.0 * (1.5 * theta).cos() + 46.0 * (0.5 * theta).cos()) / 48.0;
    let (lo, hi) = (at_knot.min(at_mid), at_knot.max(at_mid));
    let radii: Vec<f64> = c.sample(4000).iter().map(|p| p.norm()).collect();
    for &r in &radii {
        assert!(
            r >= lo - 1e-12 && r <= hi + 1e-12,
            "{r} outside [{lo}, {hi}]"
        );
    }
    let observed_lo = radii.iter().copied().fold(f64::INFINITY, f64::min);
    let observed_hi = radii.iter().copied().fold(0.0, f64::max);
    assert!((observed_lo - lo).abs() < 1e-9 && (observed_hi - hi).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reptile_profiles_are_unit_radius(seed in any::<u64>(), steps in 1usize..6) {
        let spec = ProfileSpec::reptile(steps, 0.5, 0.4, 3);
        let c = gen_profile(&mut rng_from(seed), &spec).unwrap();
        prop_assert!(c.is_closed());
        let r = c.sample(256).iter().map(|p| p.norm()).fold(0.0, f64::max);
        prop_assert!(r <= 1.0 + 1e-9 && r > 0.5);
    }
}
