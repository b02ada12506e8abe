//! Black-box tests of the `snakefit` binary: exit codes, file formats
//! and determinism of the subcommands.

use std::path::Path;
use std::process::Command;

use snakefit_core::curve::{read_curve_json, write_curve_json, Curve};
use snakefit_core::Vec2;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_snakefit"))
}

fn make_disk(dir: &Path) -> (std::path::PathBuf, std::path::PathBuf) {
    let image = dir.join("disk.pgm");
    let init = dir.join("init.json");
    let st = bin()
        .args(["scene", "--kind", "disk", "--size", "96", "--radius", "30"])
        .arg("--out-image")
        .arg(&image)
        .status()
        .unwrap();
    assert!(st.success());
    let knots = (0..12)
        .map(|i| {
            let th = 2.0 * std::f64::consts::PI * i as f64 / 12.0;
            Vec2::new(48.0 + 40.0 * th.cos(), 48.0 + 40.0 * th.sin())
        })
        .collect();
    write_curve_json(&Curve::new(knots, true).unwrap(), &init).unwrap();
    (image, init)
}

#[test]
fn bad_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let (image, init) = make_disk(dir.path());

    let unknown_model = bin()
        .args(["run", "--model", "nope"])
        .arg("--image")
        .arg(&image)
        .arg("--init")
        .arg(&init)
        .output()
        .unwrap();
    assert_eq!(unknown_model.status.code(), Some(2));

    let even_window = bin()
        .args(["run", "--model", "prob", "--window", "6"])
        .arg("--image")
        .arg(&image)
        .arg("--init")
        .arg(&init)
        .output()
        .unwrap();
    assert_eq!(even_window.status.code(), Some(2));

    let too_few_reps = bin()
        .args(["bench", "--reps", "1"])
        .arg("--image")
        .arg(&image)
        .arg("--init")
        .arg(&init)
        .output()
        .unwrap();
    assert_eq!(too_few_reps.status.code(), Some(2));
}

#[test]
fn missing_image_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let (_, init) = make_disk(dir.path());
    let out = bin()
        .args(["run", "--model", "prob"])
        .arg("--image")
        .arg(dir.path().join("no_such.pgm"))
        .arg("--init")
        .arg(&init)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn casp_with_open_init_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let (image, _) = make_disk(dir.path());
    let open_init = dir.path().join("open.json");
    let open = Curve::new(
        vec![Vec2::new(10.0, 40.0), Vec2::new(50.0, 42.0), Vec2::new(90.0, 40.0)],
        false,
    )
    .unwrap();
    write_curve_json(&open, &open_init).unwrap();
    let out = bin()
        .args(["run", "--model", "casp"])
        .arg("--image")
        .arg(&image)
        .arg("--init")
        .arg(&open_init)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("casp requires closed curve"),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn curve_files_round_trip_to_nine_significant_digits() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.json");
    let knots = vec![
        Vec2::new(1.234567891234, 98.7654321987),
        Vec2::new(-0.000123456789, 45.0),
        Vec2::new(77.7777777777, 3.14159265358979),
    ];
    let original = Curve::new(knots, false).unwrap();
    write_curve_json(&original, &path).unwrap();
    let reread = read_curve_json::<f64>(&path).unwrap();
    for (a, b) in original.knots().iter().zip(reread.knots()) {
        for (x, y) in [(a.x, b.x), (a.y, b.y)] {
            let rel = (x - y).abs() / x.abs().max(1.0);
            assert!(rel < 1e-9, "{x} vs {y}");
        }
    }
}

#[test]
fn overlay_matches_input_dimensions_and_only_curve_pixels_differ() {
    let dir = tempfile::tempdir().unwrap();
    let (image, init) = make_disk(dir.path());
    let overlay = dir.path().join("overlay.ppm");
    let st = bin()
        .args(["run", "--model", "prob"])
        .arg("--image")
        .arg(&image)
        .arg("--init")
        .arg(&init)
        .arg("--out-overlay")
        .arg(&overlay)
        .status()
        .unwrap();
    assert!(st.success());

    let bytes = std::fs::read(&overlay).unwrap();
    let text = String::from_utf8_lossy(&bytes[..20]);
    assert!(text.starts_with("P6"), "overlay must be a P6 pixmap");
    assert!(text.contains("96 96"), "overlay header: {text}");

    // Every pixel is either gray (r=g=b, same as the input) or pure red.
    let header_end = bytes
        .windows(4)
        .position(|w| w == b"255\n")
        .map(|p| p + 4)
        .unwrap();
    let px = &bytes[header_end..];
    assert_eq!(px.len(), 96 * 96 * 3);
    let mut red = 0;
    for c in px.chunks(3) {
        if c == [255, 0, 0] {
            red += 1;
        } else {
            assert!(c[0] == c[1] && c[1] == c[2], "unexpected pixel {c:?}");
        }
    }
    assert!(red > 0, "overlay must contain drawn curve pixels");
}

#[test]
fn scene_generation_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let render = |path: &Path| {
        let st = bin()
            .args([
                "scene",
                "--kind",
                "two-region-gaussian",
                "--size",
                "64",
                "--radius",
                "20",
                "--seed",
                "7",
            ])
            .arg("--out-image")
            .arg(path)
            .status()
            .unwrap();
        assert!(st.success());
    };
    let a = dir.path().join("a.pgm");
    let b = dir.path().join("b.pgm");
    render(&a);
    render(&b);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn background_variance_of_gaussian_scene_near_nominal() {
    let dir = tempfile::tempdir().unwrap();
    let image = dir.path().join("g.pgm");
    let st = bin()
        .args([
            "scene",
            "--kind",
            "two-region-gaussian",
            "--size",
            "128",
            "--radius",
            "30",
            "--sigma",
            "10",
            "--seed",
            "1",
        ])
        .arg("--out-image")
        .arg(&image)
        .status()
        .unwrap();
    assert!(st.success());
    let img = snakefit_core::raster::load_image::<f64>(&image).unwrap();
    // Sample far corners, well outside the disk.
    let mut vals = Vec::new();
    for y in 0..30 {
        for x in 0..30 {
            vals.push(img.get(x, y));
            vals.push(img.get(127 - x, 127 - y));
        }
    }
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    assert!(
        (var - 100.0).abs() / 100.0 < 0.15,
        "background variance {var} not within 15% of 100"
    );
}
