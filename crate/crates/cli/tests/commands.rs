use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_ilrc");

fn ilrc(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("spawn ilrc")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

const SMALL: [&str; 12] = [
    "--q", "16", "--m", "42", "--n", "27", "--k", "9", "--lambda", "2", "--ell", "2",
];

fn keygen(dir: &Path, name: &str, seed: &str) -> (String, String) {
    let prefix = dir.join(name);
    let prefix = prefix.to_str().unwrap();
    let mut args = vec!["keygen"];
    args.extend(SMALL);
    args.extend(["--seed", seed, "--out", prefix]);
    let out = ilrc(&args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    (format!("{prefix}.pub"), format!("{prefix}.sec"))
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn encrypt_decrypt_restores_file() {
    let dir = tempfile::tempdir().unwrap();
    let (pk, sk) = keygen(dir.path(), "k", "11");
    let data: Vec<u8> = (0..2000u32).map(|i| (i.wrapping_mul(2654435761) >> 13) as u8).collect();
    let (msg, ct, back) = (p(dir.path(), "m"), p(dir.path(), "c"), p(dir.path(), "d"));
    fs::write(&msg, &data).unwrap();
    let out = ilrc(&["encrypt", "--key", &pk, "--in", &msg, "--seed", "5", "--out", &ct]);
    assert_eq!(code(&out), 0);
    let out = ilrc(&["decrypt", "--key", &sk, "--in", &ct, "--out", &back]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read(&back).unwrap(), data);
}

#[test]
fn empty_plaintext_is_one_block() {
    let dir = tempfile::tempdir().unwrap();
    let (pk, sk) = keygen(dir.path(), "k", "12");
    let (msg, ct, back) = (p(dir.path(), "m"), p(dir.path(), "c"), p(dir.path(), "d"));
    fs::write(&msg, b"").unwrap();
    assert_eq!(code(&ilrc(&["encrypt", "--key", &pk, "--in", &msg, "--seed", "1", "--out", &ct])), 0);
    let out = ilrc(&["distinguish", "--key", &pk, "--in", &ct, "--block", "1"]);
    assert_eq!(code(&out), 1, "a second block should not exist");
    assert_eq!(code(&ilrc(&["decrypt", "--key", &sk, "--in", &ct, "--out", &back])), 0);
    assert!(fs::read(&back).unwrap().is_empty());
}

#[test]
fn wrong_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let (pk, _) = keygen(dir.path(), "a", "21");
    let (_, sk_other) = keygen(dir.path(), "b", "22");
    let (msg, ct) = (p(dir.path(), "m"), p(dir.path(), "c"));
    fs::write(&msg, b"attack at dawn").unwrap();
    assert_eq!(code(&ilrc(&["encrypt", "--key", &pk, "--in", &msg, "--seed", "2", "--out", &ct])), 0);
    let out = ilrc(&["decrypt", "--key", &sk_other, "--in", &ct]);
    let c = code(&out);
    assert!(c == 3 || c == 6, "exit {c}");
    assert!(!stdout(&out).contains("attack at dawn"));
}

#[test]
fn outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (pk1, sk1) = keygen(dir.path(), "x", "99");
    let (pk2, sk2) = keygen(dir.path(), "y", "99");
    assert_eq!(fs::read(&pk1).unwrap(), fs::read(&pk2).unwrap());
    assert_eq!(fs::read(&sk1).unwrap(), fs::read(&sk2).unwrap());
    let msg = p(dir.path(), "m");
    fs::write(&msg, b"same input").unwrap();
    let a = ilrc(&["encrypt", "--key", &pk1, "--in", &msg, "--seed", "4"]);
    let b = ilrc(&["encrypt", "--key", &pk1, "--in", &msg, "--seed", "4"]);
    let c = ilrc(&["encrypt", "--key", &pk1, "--in", &msg, "--seed", "5"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);

    let mut sim = vec!["simulate"];
    sim.extend(SMALL);
    sim.extend(["--seed", "3", "--trials", "20", "--format", "records"]);
    let mut one = sim.clone();
    one.extend(["--threads", "1"]);
    let mut four = sim.clone();
    four.extend(["--threads", "4"]);
    assert_eq!(ilrc(&one).stdout, ilrc(&four).stdout);
}

#[test]
fn params_exit_codes() {
    let ok = ilrc(&["params", "--q", "16", "--m", "42", "--n", "27", "--k", "9", "--lambda", "2", "--ell", "2", "--format", "records"]);
    assert_eq!(code(&ok), 0);
    let text = stdout(&ok);
    for line in ["t_pub=6", "wf_loi=82.00", "wf_ae=119.00", "p_f=-166.00", "key_size_bytes=3402", "valid=true"] {
        assert!(text.lines().any(|l| l == line), "missing {line}");
    }

    // λ = n/(n−k) exactly
    let edge = ilrc(&["params", "--q", "2", "--m", "20", "--n", "20", "--k", "10", "--lambda", "2", "--ell", "1"]);
    assert_eq!(code(&edge), 2);
    assert!(String::from_utf8_lossy(&edge.stderr).contains("n/(n-k) < lambda"));

    // ℓ = t_pub = ⌊7·18/(2·8)⌋
    let ell = ilrc(&["params", "--q", "16", "--m", "42", "--n", "27", "--k", "9", "--lambda", "2", "--ell", "7"]);
    assert_eq!(code(&ell), 2);
    assert!(String::from_utf8_lossy(&ell.stderr).contains("ell < t_pub"));

    assert_eq!(code(&ilrc(&["params", "--q", "16"])), 1);
}

#[test]
fn user_supplied_wf_e_is_echoed() {
    let out = ilrc(&["params", "--q", "16", "--m", "42", "--n", "27", "--k", "9", "--lambda", "2", "--ell", "2", "--wf-e", "150.5", "--format", "records"]);
    assert!(stdout(&out).lines().any(|l| l == "wf_e=150.50"));
}

#[test]
fn corrupted_files_are_format_errors() {
    let dir = tempfile::tempdir().unwrap();
    let (pk, sk) = keygen(dir.path(), "k", "31");
    let (msg, ct) = (p(dir.path(), "m"), p(dir.path(), "c"));
    fs::write(&msg, b"x").unwrap();
    assert_eq!(code(&ilrc(&["encrypt", "--key", &pk, "--in", &msg, "--seed", "1", "--out", &ct])), 0);
    let text = fs::read_to_string(&ct).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let payload = &mut lines[3];
    let flipped = if payload.starts_with('A') { 'B' } else { 'A' };
    payload.replace_range(0..1, &flipped.to_string());
    fs::write(&ct, lines.join("\n") + "\n").unwrap();
    assert_eq!(code(&ilrc(&["decrypt", "--key", &sk, "--in", &ct])), 4);
    // a public key where a secret key is expected
    assert_eq!(code(&ilrc(&["decrypt", "--key", &pk, "--in", &ct])), 4);
    assert_eq!(code(&ilrc(&["decrypt", "--key", &sk, "--in", &p(dir.path(), "missing")])), 5);
}

#[test]
fn simulate_reports_counts() {
    let mut args = vec!["simulate"];
    args.extend(SMALL);
    args.extend(["--seed", "8", "--trials", "30", "--format", "records"]);
    let out = ilrc(&args);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("trials=30"));
    assert!(text.contains("failures=0"));
    assert!(text.contains("wrong_messages=0"));
    assert!(text.contains("p_f_bound=-166.00"));

    let mut bad = vec!["simulate"];
    bad.extend(SMALL);
    bad.extend(["--seed", "8", "--trials", "3", "--tau", "13"]);
    assert_eq!(code(&ilrc(&bad)), 2);
}

#[test]
fn distinguish_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let (pk, _) = keygen(dir.path(), "k", "41");
    let (msg, ct) = (p(dir.path(), "m"), p(dir.path(), "c"));
    fs::write(&msg, b"probe").unwrap();
    let enc = ilrc(&["encrypt", "--key", &pk, "--in", &msg, "--seed", "6", "--error-code", "gabidulin", "--out", &ct]);
    assert_eq!(code(&enc), 0);
    let out = ilrc(&["distinguish", "--key", &pk, "--in", &ct, "--format", "records"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("verdict=GabidulinLike"));

    // 2k + min(ℓ+1, t_pub) ≥ n: the dimension test has no room
    let prefix = p(dir.path(), "wide");
    let kg = ilrc(&["keygen", "--q", "2", "--m", "12", "--n", "12", "--k", "4", "--lambda", "2", "--ell", "1", "--seed", "1", "--out", &prefix]);
    assert_eq!(code(&kg), 0);
    let wpk = format!("{prefix}.pub");
    let wct = p(dir.path(), "wc");
    assert_eq!(code(&ilrc(&["encrypt", "--key", &wpk, "--in", &msg, "--seed", "1", "--out", &wct])), 0);
    let out = ilrc(&["distinguish", "--key", &wpk, "--in", &wct, "--format", "records"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("verdict=Inconclusive"), "{text}");
    assert!(text.contains("note:"));
}

#[test]
fn rsd_sample_writes_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let out = p(dir.path(), "rsd.txt");
    let args = ["rsd-sample", "--q", "2", "--m", "10", "--n", "8", "--k", "4", "--w", "3", "--ell", "2", "--kind", "interleaved", "--seed", "2", "--out", &out];
    assert_eq!(code(&ilrc(&args)), 0);
    let text = fs::read_to_string(&out).unwrap();
    let ctx = ilrc_core::FieldCtx::with_order(2, 10).unwrap();
    let fx = ilrc::fixture::read_all(&ctx, &text).unwrap();
    assert_eq!(fx.len(), 3);
    assert_eq!(code(&ilrc(&["rsd-sample", "--q", "2", "--m", "10", "--n", "8", "--k", "4", "--w", "9", "--seed", "2"])), 2);
}
