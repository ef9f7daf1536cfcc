use flowbox_core::builtin;
use flowbox_core::dsl::{parse_field, ParseErrorKind, SAMPLE_SOURCES as CORPUS};
use flowbox_core::rng::SampleRng;

#[test]
fn corpus_has_fifty_distinct_cases() {
    let mut sources: Vec<_> = CORPUS.iter().map(|(n, s)| format!("{n}:{s}")).collect();
    sources.sort();
    sources.dedup();
    assert_eq!(sources.len(), 50);
}

#[test]
fn print_parse_is_idempotent_on_corpus() {
    for (dim, source) in CORPUS {
        let first = parse_field(source, dim).unwrap_or_else(|e| panic!("{source}: {e}"));
        let printed = first.to_string();
        let second = parse_field(&printed, dim).unwrap_or_else(|e| panic!("{printed}: {e}"));
        assert_eq!(first, second, "{source} printed as {printed}");
        assert_eq!(second.to_string(), printed);
    }
}

#[test]
fn builtin_rebuilds_agree_on_random_points() {
    for name in builtin::NAMES {
        let field = builtin::by_name(name).unwrap();
        let (dim, source) = builtin::dsl_source(name).unwrap();
        let expr = parse_field(source, dim).unwrap();
        let mut rng = SampleRng::seeded(11);
        let center = vec![0.0; dim];
        for _ in 0..1000 {
            let x = rng.in_ball(&center, 3.9);
            let a = field.eval(&x).unwrap();
            let b = expr.eval(&x).unwrap();
            for (u, v) in a.iter().zip(&b) {
                assert!((u - v).abs() <= 1e-12 * (1.0 + u.abs()), "{name} at {x:?}: {a:?} vs {b:?}");
            }
        }
    }
}

#[test]
fn parse_errors_carry_positions() {
    let cases: [(&str, usize, usize); 6] = [
        ("1 + $", 1, 4),
        ("foo(x)", 1, 0),
        ("min(x)", 1, 0),
        ("(1, 2, 3)", 2, 0),
        ("x^1.5", 1, 2),
        ("(1, w)", 2, 4),
    ];
    for (source, dim, position) in cases {
        let err = parse_field(source, dim).unwrap_err();
        assert_eq!(err.position, position, "{source}: {err}");
    }
    assert!(matches!(parse_field("", 1).unwrap_err().kind, ParseErrorKind::EmptySource));
    assert!(matches!(parse_field("(1, 2, 3)", 2).unwrap_err().kind, ParseErrorKind::DimensionMismatch { .. }));
}
