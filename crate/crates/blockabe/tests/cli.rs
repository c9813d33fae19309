//! End-to-end exercises of the `blockabe` binary: key ceremony, file
//! round trips, refusal exit codes and benchmark CSV emission.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use blockabe::container;

const EXIT_USAGE: i32 = 2;
const EXIT_PARSE: i32 = 3;
const EXIT_ATT_CHECK: i32 = 4;
const EXIT_INTEGRITY: i32 = 5;
const EXIT_DECRYPT: i32 = 6;
const EXIT_IO: i32 = 7;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_blockabe"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

struct Ceremony {
    _dir: tempfile::TempDir,
    pk: PathBuf,
    mk: PathBuf,
}

fn ceremony() -> Ceremony {
    let dir = tempfile::tempdir().unwrap();
    let pk = dir.path().join("pk.bin");
    let mk = dir.path().join("mk.bin");
    let out = run(&["setup", "--pk", path_str(&pk), "--mk", path_str(&mk)]);
    assert!(out.status.success(), "setup: {out:?}");
    assert!(String::from_utf8_lossy(&out.stdout).contains("parameter digest:"));
    Ceremony { _dir: dir, pk, mk }
}

fn keygen(c: &Ceremony, attrs: &str, name: &str) -> PathBuf {
    let sk = c.pk.parent().unwrap().join(name);
    let out = run(&[
        "keygen",
        "--pk",
        path_str(&c.pk),
        "--mk",
        path_str(&c.mk),
        "--attrs",
        attrs,
        "--sk",
        path_str(&sk),
    ]);
    assert!(out.status.success(), "keygen: {out:?}");
    sk
}

fn encrypt(c: &Ceremony, policy: &str, plain: &Path, name: &str) -> (PathBuf, Output) {
    let ct = c.pk.parent().unwrap().join(name);
    let out = run(&[
        "encrypt",
        "--pk",
        path_str(&c.pk),
        "--mk",
        path_str(&c.mk),
        "--policy",
        policy,
        "--in",
        path_str(plain),
        "--out",
        path_str(&ct),
    ]);
    (ct, out)
}

fn decrypt(c: &Ceremony, sk: &Path, ct: &Path, name: &str) -> (PathBuf, Output) {
    let recovered = c.pk.parent().unwrap().join(name);
    let out = run(&[
        "decrypt",
        "--pk",
        path_str(&c.pk),
        "--sk",
        path_str(sk),
        "--in",
        path_str(ct),
        "--out",
        path_str(&recovered),
    ]);
    (recovered, out)
}

#[test]
fn no_arguments_is_a_usage_error() {
    let out = bin().output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
}

#[test]
fn setup_twice_gives_distinct_digests() {
    let a = ceremony();
    let b = ceremony();
    let digest = |c: &Ceremony| {
        container::decode_public_params(&std::fs::read(&c.pk).unwrap()).unwrap().digest()
    };
    assert_ne!(digest(&a), digest(&b));
}

#[test]
fn setup_unwritable_path_fails_without_partial_files() {
    let dir = tempfile::tempdir().unwrap();
    let pk = dir.path().join("no-such-dir").join("pk.bin");
    let mk = dir.path().join("mk.bin");
    let out = run(&["setup", "--pk", path_str(&pk), "--mk", path_str(&mk)]);
    assert_eq!(out.status.code(), Some(EXIT_IO));
    assert!(!pk.exists());
    assert!(!mk.exists());
}

#[test]
fn keygen_rejects_empty_attribute_list() {
    let c = ceremony();
    let sk = c.pk.parent().unwrap().join("sk.bin");
    let out = run(&[
        "keygen",
        "--pk",
        path_str(&c.pk),
        "--mk",
        path_str(&c.mk),
        "--attrs",
        " , ,",
        "--sk",
        path_str(&sk),
    ]);
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
}

#[test]
fn keygen_rejects_mismatched_parameter_files() {
    let a = ceremony();
    let b = ceremony();
    let sk = a.pk.parent().unwrap().join("sk.bin");
    let out = run(&[
        "keygen",
        "--pk",
        path_str(&a.pk),
        "--mk",
        path_str(&b.mk),
        "--attrs",
        "A",
        "--sk",
        path_str(&sk),
    ]);
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
    assert!(String::from_utf8_lossy(&out.stderr).contains("digest"));
}

#[test]
fn encrypt_reports_policy_errors_with_position() {
    let c = ceremony();
    let plain = c.pk.parent().unwrap().join("msg.bin");
    std::fs::write(&plain, b"data").unwrap();
    let (_, out) = encrypt(&c, "A and )", &plain, "ct.bin");
    assert_eq!(out.status.code(), Some(EXIT_PARSE));
    assert!(String::from_utf8_lossy(&out.stderr).contains("byte 6"));
}

#[test]
fn full_round_trip_through_files() {
    let c = ceremony();
    let plain = c.pk.parent().unwrap().join("msg.bin");
    let message: Vec<u8> = (0..200_000u32).map(|i| (i * 31 % 251) as u8).collect();
    std::fs::write(&plain, &message).unwrap();

    let (ct, out) = encrypt(&c, "(A and B) or (C and D)", &plain, "ct.bin");
    assert!(out.status.success(), "{out:?}");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("blocks: 3"), "stdout: {stdout}");
    assert!(stdout.contains("t: 2"));
    assert!(stdout.contains("k: 1"));

    let sk = keygen(&c, "A,B", "sk.bin");
    let (recovered, out) = decrypt(&c, &sk, &ct, "out.bin");
    assert!(out.status.success(), "{out:?}");
    assert_eq!(std::fs::read(&recovered).unwrap(), message);
}

#[test]
fn empty_input_round_trips() {
    let c = ceremony();
    let plain = c.pk.parent().unwrap().join("empty.bin");
    std::fs::write(&plain, b"").unwrap();
    let (ct, out) = encrypt(&c, "A and B", &plain, "ct.bin");
    assert!(out.status.success());
    let sk = keygen(&c, "A,B", "sk.bin");
    let (recovered, out) = decrypt(&c, &sk, &ct, "out.bin");
    assert!(out.status.success());
    assert_eq!(std::fs::read(&recovered).unwrap(), b"");
}

#[test]
fn refusal_stages_map_to_exit_codes() {
    let c = ceremony();
    let plain = c.pk.parent().unwrap().join("msg.bin");
    std::fs::write(&plain, vec![7u8; 5000]).unwrap();

    // att_check refusal: k = 2 root, only one branch touched
    let (ct, out) = encrypt(&c, "(A and B) and (C and D)", &plain, "ct1.bin");
    assert!(out.status.success());
    let sk_ab = keygen(&c, "A,B", "sk1.bin");
    let (_, out) = decrypt(&c, &sk_ab, &ct, "out1.bin");
    assert_eq!(out.status.code(), Some(EXIT_ATT_CHECK));
    assert!(String::from_utf8_lossy(&out.stderr).contains("att_check"));

    // filter passes but the tree is unsatisfied: refusal at block 1
    let (ct, out) = encrypt(&c, "(A and B) or (C and D)", &plain, "ct2.bin");
    assert!(out.status.success());
    let sk_ac = keygen(&c, "A,C", "sk2.bin");
    let (_, out) = decrypt(&c, &sk_ac, &ct, "out2.bin");
    assert_eq!(out.status.code(), Some(EXIT_DECRYPT));
    assert!(String::from_utf8_lossy(&out.stderr).contains("block 1"));

    // integrity refusal: container missing one block
    let bytes = std::fs::read(&ct).unwrap();
    let (manifest, blocks) = container::decode_container(&bytes).unwrap();
    let tampered = container::encode_container(&manifest, &blocks[..blocks.len() - 1]);
    let ct_short = c.pk.parent().unwrap().join("ct3.bin");
    std::fs::write(&ct_short, tampered).unwrap();
    let sk_abcd = keygen(&c, "A,B,C,D", "sk3.bin");
    let (_, out) = decrypt(&c, &sk_abcd, &ct_short, "out3.bin");
    assert_eq!(out.status.code(), Some(EXIT_INTEGRITY));

    // integrity refusal: one id bit flipped in the manifest
    let mut flipped = manifest.clone();
    flipped.ids[0][0] ^= 0x01;
    let ct_flip = c.pk.parent().unwrap().join("ct4.bin");
    std::fs::write(&ct_flip, container::encode_container(&flipped, &blocks)).unwrap();
    let (_, out) = decrypt(&c, &sk_abcd, &ct_flip, "out4.bin");
    assert_eq!(out.status.code(), Some(EXIT_INTEGRITY));

    // corrupted envelope is an I/O-class failure, not a refusal
    let garbage = c.pk.parent().unwrap().join("ct5.bin");
    std::fs::write(&garbage, b"not a container").unwrap();
    let (_, out) = decrypt(&c, &sk_abcd, &garbage, "out5.bin");
    assert_eq!(out.status.code(), Some(EXIT_IO));
}

#[test]
fn bench_csv_is_deterministic_and_well_formed() {
    let args = [
        "bench",
        "--sweep",
        "size",
        "--sizes",
        "1,2",
        "--seed",
        "7",
        "--channel-bandwidth",
        "10",
        "--channel-latency",
        "20",
    ];
    let a = run(&args);
    assert!(a.status.success(), "{a:?}");
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout, "identical seeds must give identical CSV");

    let csv = String::from_utf8(a.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("dimension,value,scheme,total_seconds,fill_seconds,drain_seconds")
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4); // 2 sizes × 2 schemes
    assert!(rows[0].starts_with("size,1,partitioned,"));
    assert!(rows[1].starts_with("size,1,monolithic-baseline,"));

    let different_seed = run(&[
        "bench", "--sweep", "size", "--sizes", "1,2", "--seed", "8",
    ]);
    assert!(different_seed.status.success());
}

#[test]
fn bench_sweeps_blocks_and_leaves() {
    let out = run(&[
        "bench", "--sweep", "blocks", "--blocks", "1,2,4", "--seed", "3",
    ]);
    assert!(out.status.success(), "{out:?}");
    let csv = String::from_utf8(out.stdout).unwrap();
    let partitioned: Vec<f64> = csv
        .lines()
        .skip(1)
        .filter(|l| l.contains(",partitioned,"))
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert_eq!(partitioned.len(), 3);
    for w in partitioned.windows(2) {
        assert!(w[1] <= w[0] * 1.10, "partitioned column must be non-increasing within 10%");
    }

    let out = run(&[
        "bench", "--sweep", "leaves", "--leaves", "16,32", "--seed", "3",
    ]);
    assert!(out.status.success(), "{out:?}");

    // a leaf count below the gate fan is a clean usage error, not a crash
    let out = run(&["bench", "--sweep", "leaves", "--leaves", "2", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
    let csv = String::from_utf8(out.stdout).unwrap();
    for scheme in ["partitioned", "monolithic-baseline"] {
        let totals: Vec<f64> = csv
            .lines()
            .skip(1)
            .filter(|l| l.contains(&format!(",{scheme},")))
            .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
            .collect();
        assert!(totals.windows(2).all(|w| w[1] >= w[0] - 1e-12), "{scheme} must not shrink");
    }
}
