use procat::gallery::{builtin_scenarios, run_scenario};

#[test]
fn builtin_scenarios_match_expectations() {
    for s in builtin_scenarios() {
        let r = run_scenario(&s).unwrap();
        println!("{}", r);
        assert!(r.passed(), "{}", r);
    }
}
