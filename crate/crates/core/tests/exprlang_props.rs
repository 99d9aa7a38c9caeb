use chenwarp_core::exprlang::{parse, BinaryOp, Bindings, Expr, HyperDual, UnaryOp};
use proptest::prelude::*;
use proptest::test_runner::Config;

const VARS: [&str; 2] = ["x", "y"];

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (0.1f64..2.0).prop_map(Expr::constant),
        prop::sample::select(VARS.to_vec()).prop_map(Expr::var),
    ]
}

fn unary_op() -> impl Strategy<Value = UnaryOp> {
    prop::sample::select(vec![
        UnaryOp::Neg,
        UnaryOp::Sin,
        UnaryOp::Cos,
        UnaryOp::Tan,
        UnaryOp::Exp,
        UnaryOp::Log,
        UnaryOp::Sinh,
        UnaryOp::Cosh,
        UnaryOp::Tanh,
        UnaryOp::Sqrt,
    ])
}

fn binary_op() -> impl Strategy<Value = BinaryOp> {
    prop::sample::select(vec![BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div, BinaryOp::Pow])
}

/// Random trees of depth at most 5.
fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (unary_op(), inner.clone()).prop_map(|(op, a)| Expr::unary(op, a)),
            (binary_op(), inner.clone(), inner).prop_map(|(op, a, b)| Expr::binary(op, a, b)),
        ]
    })
}

fn eval_hd(e: &Expr, p: &[f64]) -> Option<HyperDual> {
    let names: Vec<String> = VARS.iter().map(|s| s.to_string()).collect();
    let v: HyperDual = e.eval(&Bindings::seeded(&names, p)).ok()?;
    let finite = v.value.is_finite() && v.grad.iter().chain(&v.hess).all(|x| x.is_finite());
    let tame = v.value.abs() < 1e3 && v.grad.iter().chain(&v.hess).all(|x| x.abs() < 1e3);
    (finite && tame).then_some(v)
}

fn close(fd: f64, ad: f64, rel: f64) -> bool {
    (fd - ad).abs() <= rel * ad.abs().max(1.0)
}

proptest! {
    #![proptest_config(Config { cases: 1000, max_global_rejects: 200_000, ..Config::default() })]

    #[test]
    fn derivatives_match_central_differences(e in expr(), x in 0.3f64..1.7, y in 0.3f64..1.7) {
        prop_assume!(e.depth() <= 5);
        let p = [x, y];
        let h = 1e-5;
        let center = eval_hd(&e, &p);
        prop_assume!(center.is_some());
        let center = center.unwrap();
        let mut shifted = Vec::new();
        for k in 0..2 {
            let mut a = p;
            a[k] += h;
            let mut b = p;
            b[k] -= h;
            let (pa, pb) = (eval_hd(&e, &a), eval_hd(&e, &b));
            prop_assume!(pa.is_some() && pb.is_some());
            shifted.push((pa.unwrap(), pb.unwrap()));
        }
        // stay away from kinks and poles where differences are meaningless
        let wobble = shifted.iter().flat_map(|(a, b)| a.hess.iter().chain(&b.hess).zip(&center.hess).map(|(s, c)| (s - c).abs())).fold(0.0, f64::max);
        prop_assume!(wobble < 1.0);
        for k in 0..2 {
            let (a, b) = &shifted[k];
            let fd = (a.value - b.value) / (2.0 * h);
            prop_assert!(close(fd, center.grad[k], 1e-6), "{e}: d{k} fd {fd} vs {}", center.grad[k]);
            for j in 0..2 {
                let fd2 = (a.grad[j] - b.grad[j]) / (2.0 * h);
                prop_assert!(close(fd2, center.hess_at(j, k), 1e-4), "{e}: h{j}{k} fd {fd2} vs {}", center.hess_at(j, k));
            }
        }
    }

    #[test]
    fn printed_trees_reparse_identically(e in expr()) {
        let printed = e.to_string();
        let parsed = parse(&printed).unwrap();
        prop_assert_eq!(parse(&parsed.to_string()).unwrap(), parsed);
    }

    #[test]
    fn source_round_trip(s in source()) {
        let first = parse(&s).unwrap();
        let again = parse(&first.to_string()).unwrap();
        prop_assert_eq!(again, first);
    }

    #[test]
    fn evaluation_is_deterministic(e in expr(), x in 0.3f64..1.7, y in 0.3f64..1.7) {
        let a = eval_hd(&e, &[x, y]);
        let b = eval_hd(&e, &[x, y]);
        prop_assert_eq!(a, b);
    }
}

/// Grammar-valid source text with minimal parentheses and random spacing.
fn source() -> impl Strategy<Value = String> {
    let atom = prop_oneof![
        (0u32..1000).prop_map(|v| v.to_string()),
        (0.0f64..100.0).prop_map(|v| format!("{v}")),
        (1u32..9, -5i32..5).prop_map(|(m, e)| format!("{m}e{e}")),
        prop::sample::select(vec!["x", "y", "t", "s_1", "Theta", "pi"]).prop_map(String::from),
    ];
    atom.prop_recursive(4, 32, 3, |inner| {
        let ws = prop::sample::select(vec!["", " ", "  "]);
        prop_oneof![
            (prop::sample::select(vec!["sin", "cos", "exp", "log", "sqrt", "tanh"]), inner.clone())
                .prop_map(|(f, a)| format!("{f}({a})")),
            inner.clone().prop_map(|a| format!("-{a}")),
            inner.clone().prop_map(|a| format!("({a})")),
            (inner.clone(), prop::sample::select(vec!["+", "-", "*", "/", "^"]), inner, ws)
                .prop_map(|(a, op, b, w)| format!("{a}{w}{op}{w}{b}")),
        ]
    })
}
