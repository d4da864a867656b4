use convnec::format::{parse_generator, parse_network, parse_patterns, write_network};
use convnec::nec::{construct, ConstructParams, DecodeMode};
use convnec::network::build_transfer;
use convnec::reference;
use convnec::sim::run_random;
use convnec::Field;

const DATA: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data");

fn load(name: &str) -> String {
    std::fs::read_to_string(format!("{DATA}/{name}")).unwrap()
}

#[test]
fn shipped_networks_match_reference_builders() {
    for (file, spec) in [
        ("butterfly_f2.net", reference::butterfly(2)),
        ("butterfly_f3.net", reference::butterfly(3)),
        ("c42_f3.net", reference::combination_4c2()),
    ] {
        let parsed = parse_network(&load(file), None).unwrap();
        let a = build_transfer(&parsed).unwrap();
        let b = build_transfer(&spec).unwrap();
        assert_eq!(a.f, b.f, "{file}");
        for (x, y) in a.sinks.iter().zip(&b.sinks) {
            assert_eq!(x.m_t, y.m_t, "{file} {}", x.name);
        }
    }
}

#[test]
fn written_network_reparses_to_same_transfer() {
    let spec = reference::combination_4c2();
    let again = parse_network(&write_network(&spec), None).unwrap();
    let a = build_transfer(&spec).unwrap();
    let b = build_transfer(&again).unwrap();
    assert_eq!(a.k, b.k);
    assert_eq!(a.f, b.f);
}

#[test]
fn field_override_changes_generator_field() {
    let f3 = Field::new(3, 1).unwrap();
    let g = parse_generator(&load("cs.gen"), Some(&f3)).unwrap().generator;
    assert_eq!(g, reference::input_code(&f3));
}

#[test]
fn ternary_butterfly_random_trials_all_decode() {
    let spec = parse_network(&load("butterfly_f3.net"), None).unwrap();
    let g = parse_generator(&load("cs.gen"), Some(&spec.field)).unwrap().generator;
    let phi = parse_patterns("single-edges", spec.num_edges()).unwrap();
    let c = construct(&spec, &phi, Some(&g), &ConstructParams::default()).unwrap();
    assert!(c.report.plans.iter().all(|p| p.mode == DecodeMode::CaseA));
    let s = run_random(&c, &phi, 200, 12, c.report.code_metrics.tdfree, 11).unwrap();
    assert!(s.failed_trials.is_empty());
    assert!(s.sinks.iter().all(|t| t.trials == 200 && t.failures == 0));
}

#[test]
fn primed_code_forces_input_trellis_at_one_sink() {
    let spec = reference::butterfly(3);
    let phi = parse_patterns("single-edges", spec.num_edges()).unwrap();
    let g = parse_generator(&load("cs_prime.gen"), Some(&spec.field)).unwrap().generator;
    let c = construct(&spec, &phi, Some(&g), &ConstructParams::default()).unwrap();
    let modes: Vec<_> = c.report.plans.iter().map(|p| p.mode).collect();
    assert_eq!(modes, [DecodeMode::CaseB, DecodeMode::CaseA]);
    let s = run_random(&c, &phi, 100, 10, c.report.code_metrics.tdfree, 3).unwrap();
    assert!(s.failed_trials.is_empty());
}
