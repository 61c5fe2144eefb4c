use std::fs;

use virloop::run::{self, parse_config, Report};
use virloop::{Error, ProbeStatus};

fn config(body: &str) -> run::RunConfig {
    parse_config(body).unwrap()
}

const ONE_DIM: &str = r#"{"algebra": {"builtin": "trivial"}, "phi": {"d0": ["1"]}, "psi": ["1"],
    "alpha": "1/2", "beta": "1/3", "depth": DEPTH, "window": [-3, 3]}"#;

fn trivial(depth: usize) -> run::RunConfig {
    config(&ONE_DIM.replace("DEPTH", &depth.to_string()))
}

#[test]
fn fixture_gram_for_levels_one_and_two() {
    let dir = tempfile::tempdir().unwrap();
    run::fixture_dump(&trivial(2), dir.path()).unwrap();
    let gram = fs::read_to_string(dir.path().join("gram.csv")).unwrap();
    // G_1 = [-2h]; G_2 on (d_{-2}, d_{-1}²) = [[-4h + c/2, 6h], [6h, 8h² - 4h]] at h = 1, c = 0
    assert_eq!(gram, "level,row,col,value\n1,0,0,-2\n2,0,0,-4\n2,0,1,6\n2,1,0,6\n2,1,1,4\n");
    let monomials = fs::read_to_string(dir.path().join("monomials.csv")).unwrap();
    assert!(monomials.contains("2,0,d[-2]*e0 v,true"));
    assert!(monomials.contains("2,1,d[-1]*e0 d[-1]*e0 v,true"));
}

#[test]
fn depth_zero_fixtures_are_header_only() {
    let dir = tempfile::tempdir().unwrap();
    run::fixture_dump(&trivial(0), dir.path()).unwrap();
    for f in ["gram.csv", "radical.csv", "monomials.csv", "action.csv"] {
        let text = fs::read_to_string(dir.path().join(f)).unwrap();
        assert_eq!(text.lines().count(), 1, "{f}: {text}");
    }
}

#[test]
fn fixtures_are_byte_identical_on_rerun() {
    let cfg = run::demo_config("cor31-split").unwrap();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run::fixture_dump(&cfg, a.path()).unwrap();
    run::fixture_dump(&cfg, b.path()).unwrap();
    for f in ["gram.csv", "radical.csv", "monomials.csv", "action.csv", "levels.json"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn radical_fixture_at_h_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(&ONE_DIM.replace("DEPTH", "1").replace(r#""d0": ["1"]"#, r#""d0": ["0"]"#));
    run::fixture_dump(&cfg, dir.path()).unwrap();
    let radical = fs::read_to_string(dir.path().join("radical.csv")).unwrap();
    assert_eq!(radical, "level,vector,monomial,value\n1,0,d[-1]*e0 v,1\n");
}

#[test]
fn report_round_trips_and_reruns_equal() {
    let cfg = run::demo_config("cor31-split").unwrap();
    let first = run::run(&cfg).unwrap();
    let loaded = Report::from_json(&first.to_json()).unwrap();
    assert_eq!(loaded, first);
    let again = run::run(&loaded.config).unwrap();
    assert!(again.same_results(&first));
    assert_eq!(again.to_json(), first.to_json());
}

#[test]
fn empty_probe_list_gives_tables_only() {
    let r = run::run(&trivial(2)).unwrap();
    assert!(r.probes.is_empty());
    assert_eq!(r.status, ProbeStatus::Pass);
    assert_eq!(r.verma.len(), 3);
}

#[test]
fn non_commutative_constants_name_the_pair() {
    let cfg = config(
        r#"{"algebra": {"structure_constants": {"constants": [[["1","0"],["0","1"]],[["0","0"],["0","0"]]], "unit": ["1","0"]}},
            "phi": {"d0": ["0","0"]}, "psi": ["1","0"], "alpha": "1/2", "beta": "2", "depth": 1, "window": [-1, 1]}"#,
    );
    match run::run(&cfg) {
        Err(Error::Config { path, message }) => {
            assert_eq!(path, "algebra");
            assert!(message.contains("(e0, e1)"), "{message}");
        }
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn unknown_fields_and_bad_values_carry_paths() {
    let err = parse_config(r#"{"algebra": {"builtin": "trivial"}, "phi": {"d0": ["1"]}, "psi": ["1"], "alpha": "x", "beta": "0", "depth": 1, "window": [0, 1]}"#)
        .unwrap_err();
    assert!(matches!(&err, Error::Config { path, .. } if path == "alpha"), "{err}");
    let err = parse_config(r#"{"algebra": {"builtin": "trivial"}, "phi": {"d0": ["1"]}, "psi": ["1"], "alpha": "0", "beta": "0", "depth": 1, "window": [0, 1], "colour": 1}"#)
        .unwrap_err();
    assert!(matches!(err, Error::Config { .. }));
}
