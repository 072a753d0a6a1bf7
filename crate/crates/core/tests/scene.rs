use procmvs::materials::MaterialConfig;
use procmvs::math::{vec3, Aabb};
use procmvs::scene::{
    add_room_box, build_scene, place_cameras, place_lights, place_small_uniform, scatter_ground,
    spherical_angles, CameraModel, LightConfig, RigParams, ScatterConfig,
};
use procmvs::seed::{rng_from, stream_rng, Stream};
use procmvs::GeneratorConfig;
use proptest::prelude::*;

fn unit_content() -> Aabb<f64> {
    Aabb {
        min: vec3(-1.0, -1.0, -1.0),
        max: vec3(1.0, 1.0, 1.0),
    }
}

#[test]
fn uniform_small_placement_is_centered_in_the_box() {
    let bbox = Aabb {
        min: vec3(-2.0, 0.0, 1.0),
        max: vec3(4.0, 3.0, 2.0),
    };
    let mut rng = rng_from(30);
    let n = 10_000;
    let mut sum = vec3(0.0, 0.0, 0.0);
    for _ in 0..n {
        let t = place_small_uniform(&mut rng, &bbox, (0.1, 0.2));
        assert!(bbox.contains(t.translation));
        assert!((0.1..=0.2).contains(&t.scale));
        sum += t.translation;
    }
    let mean = sum / n as f64;
    let (c, e) = (bbox.center(), bbox.extent());
    for (m, (c, e)) in [
        (mean.x, (c.x, e.x)),
        (mean.y, (c.y, e.y)),
        (mean.z, (c.z, e.z)),
    ] {
        assert!((m - c).abs() < 0.02 * e, "{m} vs {c}");
    }
}

#[test]
fn room_box_appears_half_the_time() {
    let config = GeneratorConfig::default();
    let cameras = place_cameras(&mut rng_from(31), &config.rig, 1.0, 64, 48);
    let n = 10_000;
    let hits = (0..n)
        .filter(|&seed| {
            let mut rng = stream_rng(seed, Stream::RoomBox, 0);
            let room = &config.room_box;
            add_room_box(
                &mut rng,
                &unit_content(),
                &cameras,
                room.probability,
                room.scale,
                room.camera_margin,
                &config.materials,
            )
            .inspect(|r| {
                assert!(r.bounds.contains_box_strictly(&Aabb {
                    min: vec3(-1.0, -1.0, -0.5),
                    max: vec3(1.0, 1.0, 1.0)
                }));
                for c in &cameras {
                    assert!(r.bounds.contains_strictly(c.center()));
                }
            })
            .is_some()
        })
        .count();
    let rate = hits as f64 / n as f64;
    assert!((rate - 0.5).abs() < 0.02, "{rate}");
}

#[test]
fn ground_scatter_appears_half_the_time() {
    let config = ScatterConfig::default();
    let n = 10_000;
    let hits = (0..n)
        .filter(|&seed| {
            let mut rng = stream_rng(seed, Stream::GroundScatter, 0);
            scatter_ground(
                &mut rng,
                &config,
                -1.0,
                vec3(0.0, 0.0, 0.0),
                2.0,
                None,
                None,
                |_| None,
            )
            .is_some()
        })
        .count();
    let rate = hits as f64 / n as f64;
    assert!((rate - 0.5).abs() < 0.02, "{rate}");
}

#[test]
fn lights_default_to_eighty_inside_the_room() {
    let config = GeneratorConfig::default();
    let cameras = place_cameras(&mut rng_from(32), &config.rig, 1.0, 64, 48);
    for seed in 0..50 {
        let room = add_room_box(
            &mut rng_from(seed),
            &unit_content(),
            &cameras,
            1.0,
            (1.5, 3.0),
            0.5,
            &MaterialConfig::default(),
        )
        .unwrap();
        let lights = place_lights(
            &mut rng_from(seed + 1000),
            &LightConfig::default(),
            &unit_content(),
            Some(&room),
        );
        assert_eq!(lights.len(), 80);
        for l in &lights {
            for corner in [l.point(0.0, 0.0), l.point(1.0, 1.0)] {
                assert!(room.bounds.contains_strictly(corner));
            }
            assert!(l.center.z > unit_content().max.z);
            assert_eq!(l.normal, vec3(0.0, 0.0, -1.0));
        }
        let open = place_lights(
            &mut rng_from(seed),
            &LightConfig::default(),
            &unit_content(),
            None,
        );
        assert_eq!(open.len(), 80);
    }
}

#[test]
fn scenes_rebuild_identically() {
    let mut config = GeneratorConfig::default();
    config.image.width = 64;
    config.image.height = 48;
    let a = build_scene(1234, &config).unwrap();
    let b = build_scene(1234, &config).unwrap();
    assert_eq!(a, b);
    let c = build_scene(1235, &config).unwrap();
    assert_ne!(a.cameras, c.cameras);
}

#[test]
fn rig_respects_its_ranges_over_many_seeds() {
    let params = RigParams::default();
    for seed in 0..2_000 {
        let cams = place_cameras(&mut rng_from(seed), &params, 1.0, 640, 480);
        assert_eq!(cams.len(), 8);
        let azimuths: Vec<f64> = cams
            .iter()
            .map(|c| spherical_angles(c.center()).1)
            .collect();
        for (c, _) in cams.iter().zip(&azimuths) {
            let (elevation, _) = spherical_angles(c.center());
            let deg = elevation.to_degrees();
            assert!((-5.0 - 1e-9..=30.0 + 1e-9).contains(&deg), "{deg}");
            let r = c.center().norm();
            assert!((2.5 - 1e-9..=4.0 + 1e-9).contains(&r));
            assert!((35.0f64.to_radians()..=65.0f64.to_radians()).contains(&c.fov_y));
            assert!((c.aspect() - 4.0 / 3.0).abs() < 1e-12);
        }
        // azimuth spread measured around the circular mean
        let (s, co) = azimuths
            .iter()
            .fold((0.0, 0.0), |(s, c), a| (s + a.sin(), c + a.cos()));
        let mean = s.atan2(co);
        let spread = azimuths
            .iter()
            .map(|a| {
                (a - mean + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU)
                    - std::f64::consts::PI
            })
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| {
                (lo.min(d), hi.max(d))
            });
        assert!((spread.1 - spread.0).to_degrees() <= 45.0 + 1e-9);
    }
}

#[test]
fn camera_rays_follow_the_pinhole_model() {
    let fov = 50.0f64.to_radians();
    let cam = CameraModel::look_at(vec3(3.0, -1.0, 0.7), vec3(0.0, 0.0, 0.0), fov, 640, 480);
    let forward = cam.forward();
    let center = cam.ray_direction(320.0, 240.0);
    assert!((center.normalized() - forward).norm() < 1e-12);
    assert!((forward - (vec3(0.0, 0.0, 0.0) - cam.center()).normalized()).norm() < 1e-12);
    let top = cam.ray_direction(320.0, 0.0).normalized();
    assert!((top.dot(forward).acos() - fov / 2.0).abs() < 1e-12);
    let mut last = f64::NEG_INFINITY;
    for x in 0..640 {
        let d = cam.primary_ray(x, 100, (0.5, 0.5)).dir;
        let cx = cam.to_camera(cam.center() + d).x;
        assert!(cx > last);
        last = cx;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn project_inverts_unproject(seed in any::<u64>(), px in 0.0f64..640.0, py in 0.0f64..480.0, depth in 0.1f64..50.0) {
        let cams = place_cameras(&mut rng_from(seed), &RigParams::default(), 1.0, 640, 480);
        for cam in &cams {
            let (u, v, z) = cam.project(cam.unproject(px, py, depth)).unwrap();
            prop_assert!((u - px).abs() < 1e-7 && (v - py).abs() < 1e-7 && (z - depth).abs() < 1e-9);
        }
    }
}
