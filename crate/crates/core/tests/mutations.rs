mod common;

use common::{catalogue, params, Fixture};
use cy3_core::battery::{verify_crystal, CHECKS};
use cy3_core::cy3::SynthMode;

fn fixture() -> Fixture {
    Fixture::new(params(7, 1, 5, SynthMode::Generic))
}

/// The unmutated instance passes `verdict`, and every catalogued mutation
/// aimed at it makes it fail.
fn assert_detected(verdict: &str) {
    let f = fixture();
    if let Some(base) = verify_crystal(&f.cy).get(verdict) {
        assert!(base.pass, "baseline {verdict} fails: {base:?}");
    }
    let mutations: Vec<_> = catalogue().into_iter().filter(|m| m.verdict == verdict).collect();
    assert!(!mutations.is_empty(), "no mutation targets {verdict}");
    for m in mutations {
        let v = (m.run)(&f);
        assert_eq!(v.name, verdict);
        assert!(!v.pass, "{verdict} missed the mutation {}", m.what);
    }
}

macro_rules! detects {
    ($($test:ident => $name:literal),* $(,)?) => {
        $(
            #[test]
            fn $test() {
                assert_detected($name);
            }
        )*
    };
}

detects! {
    riemann_relations => "riemann_relations",
    stored_prepotential => "stored_prepotential",
    integrability => "integrability",
    connection_shape => "connection_shape",
    nilpotence_proxy => "nilpotence_proxy",
    horizontality => "horizontality",
    divisibility => "divisibility",
    newton_hodge => "newton_hodge",
    pairing => "pairing",
    change_of_lift => "change_of_lift",
    flat_section => "flat_section",
    gradient_relations => "gradient_relations",
    tau_gradients => "tau_gradients",
    yukawa => "yukawa",
    matcanfrob => "matcanfrob",
    yukinnerproduct => "yukinnerproduct",
    yukinteger => "yukinteger",
    qprops => "qprops",
    omega_duality => "omega_duality",
    solution_column => "solution_column",
    picard_fuchs => "picard_fuchs",
    t0_fixed_point => "t0_fixed_point",
}

#[test]
fn every_battery_verdict_has_a_mutation() {
    let targeted: Vec<_> = catalogue().iter().map(|m| m.verdict).collect();
    for name in CHECKS {
        assert!(targeted.contains(name), "{name} has no mutation");
    }
}

#[test]
fn mutated_file_fails_only_where_expected() {
    // A perturbed T off the factored shape is caught by the Riemann relations
    // and by the pairing, and the battery still reports every verdict.
    let f = fixture();
    let b1 = f.cy.layout().b1(0);
    let cy = f.with_t(f.bump_entry(f.cy.t(), 0, b1, &[2], 1));
    let v = verify_crystal(&cy);
    assert_eq!(v.verdicts.len(), CHECKS.len());
    assert!(!v.get("riemann_relations").unwrap().pass);
    assert!(!v.get("pairing").unwrap().pass);
    assert!(v.get("integrability").unwrap().pass);
    assert!(v.get("connection_shape").unwrap().pass);
}

#[test]
fn auxiliary_instances_pass_unmutated() {
    let g = Fixture::new(params(7, 2, 5, SynthMode::Generic));
    assert!(g.conn.check_integrable(g.prec()).pass);
    let mut p = params(7, 1, 5, SynthMode::Generic);
    (p.prec, p.degree) = (6, 8);
    let g = Fixture::new(p);
    let v = cy3_core::crystal::check_nilpotence_proxy(&g.conn);
    assert!(v.pass && v.detail.is_none(), "{v:?}");
}
