use g2glue_cli::config::{parse_rational, Format, RunConfig, Table};
use g2glue_cli::CliError;
use g2glue_core::cone_spectral::{q, qi};
use g2glue_core::torus_solver::OperatorMode;

#[test]
fn empty_file_gives_defaults() {
    let cfg = RunConfig::parse_str("").unwrap();
    assert_eq!(cfg, RunConfig::default());
    assert_eq!(cfg.torus.n, 6);
    assert_eq!(cfg.torus.eps, 1e-2);
    assert_eq!(cfg.kummer.t, vec![0.2, 0.1, 0.05, 0.025]);
    assert_eq!(cfg.rates.big_b, q(-1, 5));
    cfg.validate().unwrap();
}

#[test]
fn values_land_in_their_sections() {
    let text = "# run\n[torus]\neps = 1e-2   # amplitude\nmode = cg\nn = 4\n\n[kummer]\nt = 0.008, 0.004,0.002 , 0.001\nb2 = 3\n[rates]\ntable = refined\nbeta = -0.05\nB = -1/5\n[output]\nformat = both\ndir = \"reports\"\n";
    let cfg = RunConfig::parse_str(text).unwrap();
    assert_eq!(cfg.torus.eps, 1e-2);
    assert_eq!(cfg.torus.mode, OperatorMode::CurvedCg);
    assert_eq!(cfg.kummer.t, vec![0.008, 0.004, 0.002, 0.001]);
    assert_eq!(cfg.kummer.b2, Some(3));
    assert_eq!(cfg.rates.table, Table::Refined);
    assert_eq!(cfg.rates.beta, q(-1, 20));
    assert_eq!(cfg.output.format, Format::Both);
    assert_eq!(cfg.output.dir.as_deref(), Some(std::path::Path::new("reports")));
    cfg.validate().unwrap();
}

#[test]
fn beta_outside_the_weight_range_is_rejected() {
    for text in ["[rates]\nbeta = -5\n", "[kummer]\nbeta = -5\n", "[rates]\nbeta = 0\n", "[kummer]\nbeta = 0.1\n"] {
        let err = RunConfig::parse_str(text).unwrap().validate().unwrap_err();
        assert!(matches!(&err, CliError::Config(m) if m.contains(".beta")), "{err}");
        assert_eq!(err.exit_code(), 2);
    }
}

#[test]
fn parse_errors_carry_line_numbers() {
    let cases = [
        ("[torus]\neps = 1\nbogus = 2\n", 3, "unknown key"),
        ("\n[nowhere]\n", 2, "unknown section"),
        ("[torus]\neps 1e-2\n", 2, "key = value"),
        ("eps = 1\n", 1, "outside of a section"),
        ("[torus]\n\n\nn = six\n", 4, "torus.n"),
        ("[torus\n", 1, "unterminated"),
        ("[kummer]\nt = 0.1, x\n", 2, "list entry"),
    ];
    for (text, line, needle) in cases {
        match RunConfig::parse_str(text) {
            Err(CliError::Parse { line: l, msg }) => {
                assert_eq!(l, line, "{text:?}");
                assert!(msg.contains(needle), "{msg}");
            }
            other => panic!("{text:?}: {other:?}"),
        }
    }
}

#[test]
fn domain_violations_name_the_key() {
    let cases = [
        ("[torus]\nn = 5\n", "torus.n"),
        ("[torus]\neps = -1\n", "torus.eps"),
        ("[torus]\ntol = 0\n", "torus.tol"),
        ("[torus]\nmode = cg\n", "torus.mode"),
        ("[kummer]\nt = 0.5, 0.1, 0.05, 0.01\n", "kummer.t"),
        ("[kummer]\nt = 0.1, 0.05\n", "kummer.t"),
        ("[cone]\nfrom = 0\nto = -1\n", "cone.from"),
        ("[cone]\ndegree = 5\n", "cone.degree"),
        ("[rates]\nB = 1/2\n", "rates.B"),
        ("[eh]\nk = 2\n", "eh.k"),
    ];
    for (text, key) in cases {
        let err = RunConfig::parse_str(text).unwrap().validate().unwrap_err();
        assert!(err.to_string().contains(key), "{text:?}: {err}");
    }
}

#[test]
fn rationals_are_exact() {
    assert_eq!(parse_rational("-0.05").unwrap(), q(-1, 20));
    assert_eq!(parse_rational("1e-2").unwrap(), q(1, 100));
    assert_eq!(parse_rational("-3.99").unwrap(), q(-399, 100));
    assert_eq!(parse_rational("2.5E1").unwrap(), qi(25));
    assert_eq!(parse_rational("+4").unwrap(), qi(4));
    assert_eq!(parse_rational("-13/5").unwrap(), q(-13, 5));
    assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
    for bad in ["", "abc", "1/0x", "-", "1e", "1.2.3"] {
        assert!(parse_rational(bad).is_err(), "{bad:?}");
    }
}

#[test]
fn set_overrides_file_values() {
    let mut cfg = RunConfig::parse_str("[torus]\neps = 0.5\nseed = 3\n").unwrap();
    cfg.set("torus", "eps", "0").unwrap();
    assert_eq!((cfg.torus.eps, cfg.torus.seed), (0.0, 3));
    assert!(cfg.set("torus", "nope", "1").is_err());
}
