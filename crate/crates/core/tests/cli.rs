use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ctcfx::cli::{EXIT_COLLAPSE, EXIT_DATA, EXIT_OK, EXIT_USAGE};
use ctcfx::io::{write_logits, LogitsFile};
use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn ctcfx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctcfx")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

// fixture alphabet: a c d g o r t _ (blank is label 9)
fn label(c: char) -> usize {
    "acdgort_".find(c).unwrap()
}

/// Two peaked frames per character with a blank frame after each. `alt`
/// gives a runner-up character per position.
fn spell(text: &str, alt: &[(usize, char)]) -> Vec<Vec<f32>> {
    let mut rows = Vec::new();
    for (i, c) in text.chars().enumerate() {
        let mut row = vec![0.0f32; 9];
        row[label(c)] = 6.0;
        if let Some(&(_, a)) = alt.iter().find(|(j, _)| *j == i) {
            row[label(a)] = 5.0;
        }
        rows.push(row.clone());
        rows.push(row);
        let mut blank = vec![0.0f32; 9];
        blank[8] = 6.0;
        rows.push(blank);
    }
    rows
}

fn logits(dir: &TempDir, name: &str, rows: &[Vec<f32>]) -> PathBuf {
    let path = dir.path().join(name);
    write_logits(&path, &LogitsFile::from_f32_rows(rows).unwrap()).unwrap();
    path
}

fn compiled(dir: &TempDir) -> PathBuf {
    let out = dir.path().join("toy.dict");
    let o = ctcfx(&[
        "compile-dict",
        "--words",
        p(&fixture("words.txt")),
        "--alphabet",
        p(&fixture("alphabet.txt")),
        "--out",
        p(&out),
    ]);
    assert_eq!(o.status.code(), Some(EXIT_OK), "{o:?}");
    out
}

#[test]
fn compile_and_inspect() {
    let dir = TempDir::new().unwrap();
    let dict = compiled(&dir);
    let alpha = fixture("alphabet.txt");
    let o = ctcfx(&["inspect-dict", "--dict", p(&dict), "--alphabet", p(&alpha), "--enumerate"]);
    assert_eq!(o.status.code(), Some(EXIT_OK));
    let text = stdout(&o);
    // root, c, ca, cat, car, cart, d, do, dog
    assert!(text.contains("nodes: 9"), "{text}");
    assert!(text.contains("words: 5"));
    let tail: Vec<&str> = text.lines().rev().take(5).collect();
    let mut words = tail.clone();
    words.sort();
    assert_eq!(words, ["car", "cart", "cat", "do", "dog"]);

    let o = ctcfx(&["inspect-dict", "--dict", p(&dict), "--alphabet", p(&alpha), "--probe", "ca"]);
    let text = stdout(&o);
    assert!(text.contains("probe \"ca\": pointer"), "{text}");
    assert!(text.contains("  r ->") && text.contains("  t ->"));
    assert!(!text.contains("  _ ->"));

    let o = ctcfx(&["inspect-dict", "--dict", p(&dict), "--alphabet", p(&alpha), "--probe", "ct"]);
    assert!(stdout(&o).contains("not in dictionary"));
}

#[test]
fn compile_is_deterministic() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let x = std::fs::read(compiled(&a)).unwrap();
    let y = std::fs::read(compiled(&b)).unwrap();
    assert_eq!(x, y);
}

#[test]
fn decode_follows_the_dictionary() {
    let dir = TempDir::new().unwrap();
    let dict = compiled(&dir);
    let alpha = fixture("alphabet.txt");
    let config = fixture("decode.toml");
    let input = logits(&dir, "cot.ctcl", &spell("cot", &[(1, 'a')]));

    let free = ctcfx(&["decode", "--logits", p(&input), "--alphabet", p(&alpha), "--config", p(&config)]);
    assert_eq!(free.status.code(), Some(EXIT_OK), "{free:?}");
    assert_eq!(stdout(&free).trim(), "cot");

    let trace = dir.path().join("trace.csv");
    let lm = ctcfx(&[
        "decode",
        "--logits",
        p(&input),
        "--dict",
        p(&dict),
        "--alphabet",
        p(&alpha),
        "--config",
        p(&config),
        "--trace",
        p(&trace),
    ]);
    assert_eq!(lm.status.code(), Some(EXIT_OK), "{lm:?}");
    assert_eq!(stdout(&lm).trim(), "cat");
    let csv = std::fs::read_to_string(&trace).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,slot,pr,pr_plus,pr_minus,sl,sentence"));
    let rows: Vec<&str> = lines.collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.split(',').count() == 7));
    // width 4: at most four live slots per step
    for t in 0..9 {
        let n = rows.iter().filter(|r| r.starts_with(&format!("{t},"))).count();
        assert!((1..=4).contains(&n), "step {t}: {n}");
    }
}

#[test]
fn decode_two_words() {
    let dir = TempDir::new().unwrap();
    let dict = compiled(&dir);
    let input = logits(&dir, "two.ctcl", &spell("cat_dog", &[]));
    let o = ctcfx(&[
        "decode",
        "--logits",
        p(&input),
        "--dict",
        p(&dict),
        "--alphabet",
        p(&fixture("alphabet.txt")),
    ]);
    assert_eq!(o.status.code(), Some(EXIT_OK), "{o:?}");
    assert_eq!(stdout(&o).trim(), "cat_dog");
}

#[test]
fn softmax_reports_errors() {
    let dir = TempDir::new().unwrap();
    let input = logits(&dir, "s.ctcl", &spell("do", &[]));
    let csv = dir.path().join("s.csv");
    let o = ctcfx(&["softmax", "--logits", p(&input), "--out", p(&csv)]);
    assert_eq!(o.status.code(), Some(EXIT_OK));
    let text = stdout(&o);
    assert!(text.contains("frames: 6"), "{text}");
    let err: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("max abs error: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((0.0..0.3).contains(&err));
    let body = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(body.lines().count(), 1 + 6 * 9);
}

#[test]
fn compare_random_instances_agree() {
    let o = ctcfx(&["compare", "--random", "100", "--seed", "11"]);
    assert_eq!(o.status.code(), Some(EXIT_OK));
    assert!(stdout(&o).starts_with("100/100 agree"), "{}", stdout(&o));

    let o = ctcfx(&[
        "compare",
        "--random",
        "30",
        "--k",
        "8",
        "--dict",
        p(&fixture("words.txt")),
        "--alphabet",
        p(&fixture("alphabet.txt")),
    ]);
    assert_eq!(o.status.code(), Some(EXIT_OK), "{o:?}");
    assert!(stdout(&o).starts_with("30/30 agree"));
}

#[test]
fn compare_one_file() {
    let dir = TempDir::new().unwrap();
    let input = logits(&dir, "c.ctcl", &spell("dog", &[]));
    let o = ctcfx(&["compare", "--logits", p(&input), "--alphabet", p(&fixture("alphabet.txt"))]);
    assert_eq!(o.status.code(), Some(EXIT_OK), "{o:?}");
    let text = stdout(&o);
    assert!(text.contains("reference: dog"));
    assert!(text.contains("exact vs reference: agree"));
}

#[test]
fn report_memory_prints_layouts() {
    let o = ctcfx(&["report-memory", "--k", "28", "--w", "8", "--t", "1800"]);
    assert_eq!(o.status.code(), Some(EXIT_OK));
    let text = stdout(&o);
    assert!(text.contains("2186160"), "{text}");
    assert!(text.contains("74128"));
    assert!(text.trim_end().ends_with("ratio: 29.49"));
}

#[test]
fn bench_runs() {
    let o = ctcfx(&["bench", "--frames", "500"]);
    assert_eq!(o.status.code(), Some(EXIT_OK));
    assert!(stdout(&o).contains("utterances: 1"));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(ctcfx(&[]).status.code(), Some(EXIT_USAGE));
    assert_eq!(ctcfx(&["frobnicate"]).status.code(), Some(EXIT_USAGE));
    assert_eq!(ctcfx(&["decode"]).status.code(), Some(EXIT_USAGE));
    assert_eq!(ctcfx(&["compare"]).status.code(), Some(EXIT_USAGE));
    assert_eq!(ctcfx(&["report-memory", "--k", "1", "--w", "8", "--t", "5"]).status.code(), Some(EXIT_USAGE));
    assert_eq!(ctcfx(&["--help"]).status.code(), Some(EXIT_OK));
}

#[test]
fn data_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let empty = dir.path().join("empty.ctcl");
    let mut header = b"CTCL".to_vec();
    for v in [1u32, 0, 9] {
        header.extend(v.to_le_bytes());
    }
    header.push(0);
    std::fs::write(&empty, header).unwrap();
    let o = ctcfx(&["decode", "--logits", p(&empty)]);
    assert_eq!(o.status.code(), Some(EXIT_DATA), "{o:?}");

    let junk = dir.path().join("junk.ctcl");
    std::fs::write(&junk, b"CTCL\x01").unwrap();
    assert_eq!(ctcfx(&["decode", "--logits", p(&junk)]).status.code(), Some(EXIT_DATA));

    let missing = dir.path().join("absent.ctcl");
    assert_eq!(ctcfx(&["decode", "--logits", p(&missing)]).status.code(), Some(EXIT_DATA));

    let input = logits(&dir, "ok.ctcl", &spell("do", &[]));
    let bad_config = fixture("unknown_key.toml");
    let o = ctcfx(&["decode", "--logits", p(&input), "--config", p(&bad_config)]);
    assert_eq!(o.status.code(), Some(EXIT_DATA));

    // dictionary over K = 8 against a 28-label alphabet
    let dict = compiled(&dir);
    let wide = logits(&dir, "wide.ctcl", &[vec![0.0; 29]]);
    let o = ctcfx(&["decode", "--logits", p(&wide), "--dict", p(&dict)]);
    assert_eq!(o.status.code(), Some(EXIT_DATA));
}

#[test]
fn underflow_without_adjustment_exits_3() {
    let dir = TempDir::new().unwrap();
    let flat = logits(&dir, "flat.ctcl", &vec![vec![0.0f32; 29]; 200]);
    let off = ctcfx(&["decode", "--logits", p(&flat), "--config", p(&fixture("no_adjust.toml"))]);
    assert_eq!(off.status.code(), Some(EXIT_COLLAPSE), "{off:?}");
    let on = ctcfx(&["decode", "--logits", p(&flat)]);
    assert_eq!(on.status.code(), Some(EXIT_OK));
}
