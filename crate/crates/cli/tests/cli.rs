use std::path::Path;
use std::process::{Command, Output};

fn procmvs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_procmvs"))
        .args(args)
        .env("PROCMVS_WORKERS", "1")
        .output()
        .unwrap()
}

fn tiny_config(dir: &Path) -> String {
    let path = dir.join("tiny.toml");
    let text = "seed = 5\nn_scenes = 1\n\n[image]\nwidth = 32\nheight = 24\n\n[arrangement]\nn_large = 2\nn_small = 4\n\n[ground_scatter]\nprobability = 0.0\n\n[lights]\ncount = [4, 4]\n";
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn generate_then_preview() {
    let dir = tempfile::tempdir().unwrap();
    let config = tiny_config(dir.path());
    let out = dir.path().join("out");
    let run = procmvs(&[
        "generate",
        "--config",
        &config,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let scene = out.join("scene_00000");
    for name in ["manifest.json", "cameras.txt", "image_0.png", "depth_7.pfm"] {
        assert!(scene.join(name).is_file(), "{name}");
    }
    assert!(out.join("dataset.json").is_file() && out.join("config.toml").is_file());

    let sheet = dir.path().join("sheet.png");
    let run = procmvs(&[
        "preview",
        "--scene",
        scene.to_str().unwrap(),
        "--out",
        sheet.to_str().unwrap(),
    ]);
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let img = image::open(&sheet).unwrap();
    assert_eq!((img.width(), img.height()), (8 * 32, 24));
}

#[test]
fn export_mesh_writes_obj() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("shape.obj");
    let run = procmvs(&[
        "export-mesh",
        "--seed",
        "3",
        "--class",
        "small",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.lines().filter(|l| l.starts_with("f ")).count() > 100);
    assert!(text.lines().any(|l| l.starts_with("vn ")));
}

#[test]
fn bad_config_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "[rig]\nelevation_deg = [30.0, -5.0]\n").unwrap();
    let out = dir.path().join("out");
    let run = procmvs(&[
        "generate",
        "--config",
        path.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stderr).contains("elevation"));
    assert!(!out.exists());

    std::fs::write(&path, "[render]\nspp_typo = 4\n").unwrap();
    let run = procmvs(&[
        "generate",
        "--config",
        path.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stderr).contains("spp_typo"));
}

#[test]
fn missing_arguments_exit_with_one() {
    assert_eq!(procmvs(&["generate"]).status.code(), Some(1));
    assert_eq!(procmvs(&["--help"]).status.code(), Some(0));
}
