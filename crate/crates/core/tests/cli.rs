//! Runs the binary on the README examples and compares against golden files.

use std::path::PathBuf;
use std::process::{Command, Output};

fn revsynth(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_revsynth"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("REVSYNTH_THREADS", t),
        None => cmd.env_remove("REVSYNTH_THREADS"),
    };
    cmd.output().unwrap()
}

fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// (golden file, arguments) for every example in the README.
const EXAMPLES: &[(&str, &[&str])] = &[
    ("gate_g3.txt", &["gate", "--show", "G[1,2,3]", "--n", "3"]),
    ("gate_n1.txt", &["gate", "--show", "N[1]", "--n", "1"]),
    ("gate_c2.txt", &["gate", "--show", "C[1,2]", "--n", "2"]),
    ("order_g3.txt", &["order", "--lib", "G", "--n", "3"]),
    ("order_g4.txt", &["order", "--lib", "G", "--n", "4"]),
    (
        "order_fredkin.txt",
        &["order", "--gates", "F[1,2,3],F[2,1,3],F[3,2,1]", "--n", "3"],
    ),
    (
        "census_nct.csv",
        &["census", "--lib", "NCT", "--n", "3", "--format", "csv"],
    ),
    (
        "census_all.txt",
        &[
            "census",
            "--lib",
            "NT,NP,NCT,NCF,NCP,NCTF,NCPT,NCPF,G",
            "--n",
            "3",
        ],
    ),
    ("sublibs_nt.txt", &["sublibs", "--lib", "NT", "--n", "3"]),
    (
        "sublibs_all.csv",
        &[
            "sublibs",
            "--lib",
            "NT,NP,NCT,NCF,NCP,NCTF,G",
            "--n",
            "3",
            "--format",
            "csv",
        ],
    ),
    ("minimal_np.txt", &["minimal", "--lib", "NP", "--n", "3"]),
    (
        "synth_toffoli.txt",
        &["synth", "--spec", "(7,8)", "--lib", "NCT", "--n", "3"],
    ),
    (
        "synth_fredkin.json",
        &[
            "synth",
            "--spec",
            "1,2,3,4,5,7,6,8",
            "--lib",
            "NCT",
            "--n",
            "3",
            "--format",
            "json",
        ],
    ),
    (
        "synth_gt4.txt",
        &[
            "synth",
            "--spec",
            "(1,2)",
            "--lib",
            "GT",
            "--n",
            "4",
            "--max-depth",
            "8",
        ],
    ),
    (
        "randpairs_n6.csv",
        &[
            "randpairs",
            "--n",
            "6",
            "--trials",
            "20",
            "--seed",
            "0",
            "--format",
            "csv",
        ],
    ),
];

#[test]
fn readme_examples_match_golden_files() {
    for (file, args) in EXAMPLES {
        let out = revsynth(args, None);
        assert!(
            out.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert_eq!(
            String::from_utf8(out.stdout).unwrap(),
            golden(file),
            "{args:?}"
        );
    }
}

#[test]
fn output_is_identical_across_thread_counts() {
    for args in [
        &["census", "--lib", "NCT,G", "--format", "json"][..],
        &["sublibs", "--lib", "NCF", "--format", "json"][..],
        &["randpairs", "--n", "8", "--trials", "20", "--seed", "9"][..],
    ] {
        let one = revsynth(args, Some("1")).stdout;
        let eight = revsynth(args, Some("8")).stdout;
        let default = revsynth(args, None).stdout;
        assert_eq!(one, eight, "{args:?}");
        assert_eq!(one, default, "{args:?}");
    }
}

#[test]
fn out_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("census.csv");
    let out = revsynth(
        &[
            "census",
            "--lib",
            "NCT",
            "--format",
            "csv",
            "--out",
            path.to_str().unwrap(),
        ],
        None,
    );
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(
        std::fs::read_to_string(&path).unwrap(),
        golden("census_nct.csv")
    );
}

#[test]
fn exit_codes_and_error_codes() {
    let cases: &[(&[&str], i32, &str)] = &[
        (
            &["synth", "--spec", "(1,5)(2,6)(3,7)(4,8)", "--lib", "C"],
            2,
            "error[not-in-group]",
        ),
        (
            &[
                "synth",
                "--spec",
                "(1,2)",
                "--lib",
                "GT",
                "--n",
                "4",
                "--max-depth",
                "3",
            ],
            2,
            "error[depth-exceeded]",
        ),
        (
            &["sublibs", "--lib", "GT", "--n", "5"],
            2,
            "error[library-too-large]",
        ),
        (&["gate", "--show", "T[1,2"], 1, "error[gate-parse]"),
        (&["order"], 1, "error[usage]"),
        (
            &["order", "--lib", "NCT", "--gates", "N[1]"],
            1,
            "error[usage]",
        ),
        (&["order", "--lib", "XYZ"], 1, "error[unknown-library]"),
        (
            &["order", "--lib", "F", "--n", "4"],
            1,
            "error[unsupported-width]",
        ),
        (
            &["synth", "--spec", "(1,9)", "--lib", "NCT"],
            1,
            "error[spec-parse]",
        ),
        (&["census", "--bogus"], 1, "error[usage]"),
    ];
    for (args, code, prefix) in cases {
        let out = revsynth(args, None);
        assert_eq!(out.status.code(), Some(*code), "{args:?}");
        let stderr = String::from_utf8(out.stderr).unwrap();
        assert!(stderr.starts_with(prefix), "{args:?}: {stderr}");
    }
}

#[test]
fn help_exits_cleanly() {
    let out = revsynth(&["--help"], None);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("randpairs"));
}
