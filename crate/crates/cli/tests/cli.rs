use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use apvd_core::{read_image, write_image, ImageBuffer, ImageFormat};
use tempfile::TempDir;

fn apvd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_apvd"))
        .args(args)
        .env_remove("APVD_SEED")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn textured(w: usize, h: usize, ch: usize, salt: usize) -> ImageBuffer {
    ImageBuffer::from_fn(w, h, ch, |c, r, col| {
        ((r * 31 + col * 17 + c * 59 + salt * 7) % 251) as u8
    })
}

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        let f = Fixture {
            dir: tempfile::tempdir().unwrap(),
        };
        f.save("cover.pgm", &textured(128, 128, 1, 0));
        f.save("cover_rgb.png", &textured(96, 64, 3, 1));
        f.save("secret.pgm", &textured(32, 32, 1, 2));
        f.save("big_secret.pgm", &textured(128, 128, 1, 3));
        fs::write(f.path("note.txt"), b"meet me by the old mill").unwrap();
        f
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn p(&self, name: &str) -> String {
        self.path(name).to_string_lossy().into_owned()
    }

    fn save(&self, name: &str, img: &ImageBuffer) {
        let path = self.path(name);
        let format = ImageFormat::from_path(&path, img.channels()).unwrap();
        write_image(img, &path, format).unwrap();
    }
}

fn read(path: &Path) -> ImageBuffer {
    read_image(path).unwrap()
}

#[test]
fn image_round_trip_through_binary() {
    let f = Fixture::new();
    let o = apvd(&[
        "embed",
        "--cover",
        &f.p("cover.pgm"),
        "--secret",
        &f.p("secret.pgm"),
        "--out",
        &f.p("stego.pgm"),
        "--seed",
        "0x2a",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("seed: 0x000000000000002a"), "{text}");
    assert!(
        text.contains("embedded: 8288 bits (64 header + 8224 payload)"),
        "{text}"
    );
    assert!(text.contains("psnr:"), "{text}");

    let o = apvd(&[
        "extract",
        "--stego",
        &f.p("stego.pgm"),
        "--out",
        &f.p("out.pgm"),
        "--seed",
        "42",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read(&f.path("out.pgm")), read(&f.path("secret.pgm")));
}

#[test]
fn raw_payload_with_passphrase_and_png_rgb() {
    let f = Fixture::new();
    let o = apvd(&[
        "embed",
        "--cover",
        &f.p("cover_rgb.png"),
        "--payload",
        &f.p("note.txt"),
        "--out",
        &f.p("stego.png"),
        "--key",
        "hunter2",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = apvd(&[
        "extract",
        "--stego",
        &f.p("stego.png"),
        "--out",
        &f.p("note.out"),
        "--key",
        "hunter2",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        fs::read(f.path("note.out")).unwrap(),
        b"meet me by the old mill"
    );
}

#[test]
fn seed_from_environment() {
    let f = Fixture::new();
    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_apvd"))
            .args(args)
            .env("APVD_SEED", "12345")
            .output()
            .unwrap()
    };
    assert_eq!(
        code(&run(&[
            "embed",
            "--cover",
            &f.p("cover.pgm"),
            "--payload",
            &f.p("note.txt"),
            "--out",
            &f.p("s.pgm")
        ])),
        0
    );
    assert_eq!(
        code(&apvd(&[
            "extract",
            "--stego",
            &f.p("s.pgm"),
            "--out",
            &f.p("n"),
            "--seed",
            "12345"
        ])),
        0
    );
    assert_eq!(fs::read(f.path("n")).unwrap(), b"meet me by the old mill");
}

#[test]
fn lsb_and_sequential_modes_round_trip() {
    let f = Fixture::new();
    for mode in [
        ["--mode", "apvd-seq", "--k-lsb", "1"],
        ["--mode", "lsb", "--k-lsb", "3"],
    ] {
        let mut args = vec![
            "embed",
            "--cover",
            &f.p("cover.pgm"),
            "--payload",
            &f.p("note.txt"),
            "--out",
            &f.p("s.pgm"),
            "--seed",
            "9",
        ]
        .into_iter()
        .map(String::from)
        .collect::<Vec<_>>();
        args.extend(mode.iter().map(|s| s.to_string()));
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_eq!(code(&apvd(&refs)), 0);

        let mut args = vec![
            "extract".to_string(),
            "--stego".into(),
            f.p("s.pgm"),
            "--out".into(),
            f.p("n"),
            "--seed".into(),
            "9".into(),
        ];
        args.extend(mode.iter().map(|s| s.to_string()));
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_eq!(code(&apvd(&refs)), 0, "{mode:?}");
        assert_eq!(fs::read(f.path("n")).unwrap(), b"meet me by the old mill");
    }
}

#[test]
fn wrong_key_or_mode_exits_4() {
    let f = Fixture::new();
    apvd(&[
        "embed",
        "--cover",
        &f.p("cover.pgm"),
        "--secret",
        &f.p("secret.pgm"),
        "--out",
        &f.p("s.pgm"),
        "--seed",
        "1",
    ]);
    let o = apvd(&[
        "extract",
        "--stego",
        &f.p("s.pgm"),
        "--out",
        &f.p("x"),
        "--seed",
        "2",
    ]);
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("apvd: "));
    let o = apvd(&[
        "extract",
        "--stego",
        &f.p("s.pgm"),
        "--out",
        &f.p("x"),
        "--seed",
        "1",
        "--mode",
        "apvd-seq",
    ]);
    assert_eq!(code(&o), 4);
    assert!(!f.path("x").exists());
}

#[test]
fn oversized_secret_exits_2() {
    let f = Fixture::new();
    let o = apvd(&[
        "embed",
        "--cover",
        &f.p("cover.pgm"),
        "--secret",
        &f.p("big_secret.pgm"),
        "--out",
        &f.p("s.pgm"),
        "--seed",
        "1",
    ]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("short by"));
    assert!(!f.path("s.pgm").exists());
}

#[test]
fn io_problems_exit_3() {
    let f = Fixture::new();
    let o = apvd(&[
        "embed",
        "--cover",
        &f.p("missing.pgm"),
        "--payload",
        &f.p("note.txt"),
        "--out",
        &f.p("s.pgm"),
        "--seed",
        "1",
    ]);
    assert_eq!(code(&o), 3);
    fs::write(f.path("junk.pgm"), b"not an image").unwrap();
    assert_eq!(code(&apvd(&["capacity", "--cover", &f.p("junk.pgm")])), 3);
}

#[test]
fn usage_errors_exit_64() {
    let f = Fixture::new();
    let cover = f.p("cover.pgm");
    let note = f.p("note.txt");
    let out = f.p("s.pgm");
    let bmp = f.p("s.bmp");
    let cases: Vec<Vec<&str>> = vec![
        vec!["embed", "--cover", &cover, "--out", &out, "--seed", "1"],
        vec![
            "embed",
            "--cover",
            &cover,
            "--payload",
            &note,
            "--out",
            &out,
        ],
        vec![
            "embed",
            "--cover",
            &cover,
            "--payload",
            &note,
            "--out",
            &out,
            "--seed",
            "1",
            "--key",
            "x",
        ],
        vec![
            "embed",
            "--cover",
            &cover,
            "--payload",
            &note,
            "--out",
            &out,
            "--seed",
            "nope",
        ],
        vec![
            "embed",
            "--cover",
            &cover,
            "--payload",
            &note,
            "--out",
            &out,
            "--seed",
            "1",
            "--k-lsb",
            "5",
        ],
        vec![
            "embed",
            "--cover",
            &cover,
            "--payload",
            &note,
            "--out",
            &out,
            "--seed",
            "1",
            "--table",
            "no-such-table",
        ],
        vec![
            "embed",
            "--cover",
            &cover,
            "--payload",
            &note,
            "--out",
            &bmp,
            "--seed",
            "1",
        ],
        vec!["frobnicate"],
    ];
    for args in cases {
        assert_eq!(code(&apvd(&args)), 64, "{args:?}");
    }
    assert_eq!(code(&apvd(&["--help"])), 0);
}

#[test]
fn custom_table_file() {
    let f = Fixture::new();
    fs::write(
        f.path("table.txt"),
        "# narrow ranges\n0 3\n4,7\n8 15\n16 255\n",
    )
    .unwrap();
    let t = f.p("table.txt");
    assert_eq!(
        code(&apvd(&[
            "embed",
            "--cover",
            &f.p("cover.pgm"),
            "--payload",
            &f.p("note.txt"),
            "--out",
            &f.p("s.pgm"),
            "--seed",
            "5",
            "--table",
            &t
        ])),
        0
    );
    assert_eq!(
        code(&apvd(&[
            "extract",
            "--stego",
            &f.p("s.pgm"),
            "--out",
            &f.p("n"),
            "--seed",
            "5",
            "--table",
            &t
        ])),
        0
    );
    assert_eq!(fs::read(f.path("n")).unwrap(), b"meet me by the old mill");
    // the default table reads a different slot stream
    assert_eq!(
        code(&apvd(&[
            "extract",
            "--stego",
            &f.p("s.pgm"),
            "--out",
            &f.p("n2"),
            "--seed",
            "5"
        ])),
        4
    );

    fs::write(f.path("bad.txt"), "0 100\n90 255\n").unwrap();
    assert_eq!(
        code(&apvd(&[
            "capacity",
            "--cover",
            &f.p("cover.pgm"),
            "--table",
            &f.p("bad.txt")
        ])),
        64
    );
}

#[test]
fn capacity_formats() {
    let f = Fixture::new();
    let json = apvd(&["capacity", "--cover", &f.p("cover.pgm"), "--format", "json"]);
    assert_eq!(code(&json), 0);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    let total = v["total_bits"].as_u64().unwrap();
    assert!(total > 0);
    assert_eq!(v["max_payload_bits"].as_u64().unwrap(), total - 64);
    assert_eq!(
        v["usable_pairs"].as_u64().unwrap() + v["skipped_pairs"].as_u64().unwrap(),
        128 * 64
    );
    let ranges = v["ranges"].as_array().unwrap();
    assert_eq!(ranges.len(), 6);
    let from_ranges: u64 = ranges
        .iter()
        .map(|r| r["bits"].as_u64().unwrap() * r["pairs"].as_u64().unwrap())
        .sum();
    assert_eq!(from_ranges, total);

    let csv = stdout(&apvd(&[
        "capacity",
        "--cover",
        &f.p("cover.pgm"),
        "--format",
        "csv",
    ]));
    assert_eq!(csv.lines().next(), Some("lower,upper,bits,pairs"));
    assert_eq!(csv.lines().count(), 7);

    let md = stdout(&apvd(&["capacity", "--cover", &f.p("cover.pgm")]));
    assert!(md.contains(&format!("total usable bits: {total}")), "{md}");
    assert!(md.contains("| [128, 255] | 7 |"), "{md}");

    let lsb = apvd(&[
        "capacity",
        "--cover",
        &f.p("cover.pgm"),
        "--mode",
        "lsb",
        "--k-lsb",
        "2",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&lsb.stdout).unwrap();
    assert_eq!(v["total_bits"].as_u64().unwrap(), 128 * 128 * 2);
}

#[test]
fn quality_formats() {
    let f = Fixture::new();
    let cover = f.p("cover.pgm");
    let json = apvd(&[
        "quality", "--cover", &cover, "--stego", &cover, "--format", "json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["mse"], 0.0);
    assert_eq!(v["psnr"], "inf");
    assert_eq!(v["ssim"], 1.0);

    let mut shifted = read(&f.path("cover.pgm"));
    shifted
        .samples_mut()
        .iter_mut()
        .step_by(2)
        .for_each(|s| *s ^= 1);
    f.save("shifted.pgm", &shifted);
    let csv = stdout(&apvd(&[
        "quality",
        "--cover",
        &cover,
        "--stego",
        &f.p("shifted.pgm"),
        "--format",
        "csv",
    ]));
    let row: Vec<f64> = csv
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert_eq!(row[0], 0.5);
    assert!((row[1] - 51.1411).abs() < 1e-3, "{csv}");

    let md = stdout(&apvd(&["quality", "--cover", &cover, "--stego", &cover]));
    assert!(md.contains("| 0.000000 | inf |"), "{md}");

    assert_eq!(
        code(&apvd(&[
            "quality",
            "--cover",
            &cover,
            "--stego",
            &f.p("cover_rgb.png")
        ])),
        3
    );
}

#[test]
fn report_is_deterministic_and_complete() {
    let f = Fixture::new();
    let (covers, secrets) = (f.path("covers"), f.path("secrets"));
    fs::create_dir_all(&covers).unwrap();
    fs::create_dir_all(&secrets).unwrap();
    for (i, name) in ["a", "b", "c"].iter().enumerate() {
        let img = textured(80, 80, 1, 10 + i);
        write_image(&img, covers.join(format!("{name}.pgm")), ImageFormat::Pgm).unwrap();
        write_image(&img, secrets.join(format!("{name}.png")), ImageFormat::Png).unwrap();
    }
    let args = |fmt: &'static str, out: String| {
        vec![
            "report".to_string(),
            "--covers".into(),
            covers.to_string_lossy().into_owned(),
            "--secrets".into(),
            secrets.to_string_lossy().into_owned(),
            "--seed".into(),
            "3".into(),
            "--cover-size".into(),
            "64".into(),
            "--secret-size".into(),
            "16".into(),
            "--format".into(),
            fmt.into(),
            "--out".into(),
            out,
        ]
    };
    let run = |a: Vec<String>| apvd(&a.iter().map(String::as_str).collect::<Vec<_>>());

    assert_eq!(code(&run(args("csv", f.p("r1.csv")))), 0);
    assert_eq!(code(&run(args("csv", f.p("r2.csv")))), 0);
    let r1 = fs::read_to_string(f.path("r1.csv")).unwrap();
    assert_eq!(r1, fs::read_to_string(f.path("r2.csv")).unwrap());
    let lines: Vec<&str> = r1.lines().collect();
    assert_eq!(lines[0], "cover,secret,psnr,ssim,uiq,recovered,note");
    // every cover with every secret of a different name
    assert_eq!(lines.len(), 1 + 6);
    assert!(lines[1].starts_with("a,b,"), "{r1}");
    assert!(lines[1..].iter().all(|l| l.contains(",true,")), "{r1}");

    assert_eq!(code(&run(args("json", f.p("r.json")))), 0);
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(f.path("r.json")).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 6);

    assert_eq!(code(&run(args("markdown", f.p("r.md")))), 0);
    let md = fs::read_to_string(f.path("r.md")).unwrap();
    assert_eq!(md.matches("| yes |").count(), 6, "{md}");

    // secrets too large for the covers produce failed rows and exit 1
    let mut big = args("csv", f.p("r3.csv"));
    big[8] = "16".into();
    big[10] = "64".into();
    assert_eq!(code(&run(big)), 1);
    assert!(fs::read_to_string(f.path("r3.csv"))
        .unwrap()
        .contains(",false,"));
}
