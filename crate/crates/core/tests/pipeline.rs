use mbqc::adaptive::{chain_and, execute_all, tree_and};
use mbqc::compiler::{compile_general, compile_quadratic, SchemeJson, StabilizerSchemeJson};
use mbqc::simulator::{run, run_stabilizer};
use mbqc::stabilizer::nearest_quadratic;
use mbqc::BoolFn;

const TOL: f64 = 1e-9;

#[test]
fn every_function_up_to_three_inputs_survives_json_and_simulation() {
    for n in 1..=3usize {
        for table in 0..1u64 << (1 << n) {
            let f = BoolFn::from_words(n, vec![table]).unwrap();
            let scheme = compile_general(&f).unwrap();
            let text = serde_json::to_string(&scheme.to_json()).unwrap();
            let back = serde_json::from_str::<SchemeJson>(&text).unwrap().to_scheme().unwrap();
            assert_eq!(back, scheme);
            let report = run(&back, Some(&f), TOL).unwrap();
            assert_eq!(report.p_succ, Some(1.0), "n={n} table={table:#x}");
            assert_eq!(report.output_fn.as_ref(), Some(&f));
        }
    }
}

#[test]
fn quadratic_schemes_survive_json_and_simulation() {
    for anf in ["x1*x2 + x3*x4", "x1*x2 + x2*x3 + x3*x4 + x1 + 1", "x1*x4 + x2", "0"] {
        let f = BoolFn::from_anf(4, anf).unwrap();
        let ss = compile_quadratic(&f).unwrap();
        let text = serde_json::to_string(&ss.to_json()).unwrap();
        let back = serde_json::from_str::<StabilizerSchemeJson>(&text).unwrap().to_scheme().unwrap();
        let report = run_stabilizer(&back, Some(&f), TOL).unwrap();
        assert!((report.p_succ.unwrap() - 1.0).abs() < TOL, "{anf}");
    }
}

#[test]
fn nearest_quadratic_of_cubic_is_implementable() {
    let f = BoolFn::from_anf(4, "x1*x2*x3 + x4").unwrap();
    let q = nearest_quadratic(&f).unwrap();
    assert_eq!(f.hamming_distance(&q).unwrap(), 2);
    let report = run_stabilizer(&compile_quadratic(&q).unwrap(), Some(&f), TOL).unwrap();
    assert!((report.p_succ.unwrap() - 14.0 / 16.0).abs() < TOL);
}

#[test]
fn adaptive_and_matches_truth_table() {
    for n in 2..=6 {
        let and = BoolFn::and_n(n).unwrap();
        assert_eq!(execute_all(&chain_and(n).unwrap()).unwrap(), and);
        assert_eq!(execute_all(&tree_and(n).unwrap()).unwrap(), and);
    }
}
