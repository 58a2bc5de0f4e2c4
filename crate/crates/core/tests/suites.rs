use qborel::repbuild::all_preset_names;
use qborel::verify::*;
use qborel::{build_preset, Error, Representation};

fn assert_passes(r: &CheckReport) {
    let bad: Vec<String> = r
        .failures()
        .iter()
        .map(|c| format!("{}: {:?}", c.name, c.residual))
        .collect();
    assert!(r.passed, "{} {}: {bad:#?}", r.suite, r.subject);
}

#[test]
fn every_preset_satisfies_the_relations() {
    for name in all_preset_names() {
        assert_passes(&suite_quantum_group_preset(&name).unwrap());
    }
}

#[test]
fn pairing_data() {
    for name in ["A1_canonical", "A2_simple", "A3_simple", "B2_full"] {
        assert_passes(&suite_integrable_plane(&build_preset(name).unwrap()).unwrap());
    }
}

#[test]
fn gns_rank_two() {
    for t in ["A2", "B2"] {
        assert_passes(&suite_gns(t).unwrap());
    }
    assert!(matches!(suite_gns("A3"), Err(Error::UnsupportedType(_))));
}

#[test]
fn decompositions() {
    for (t, mult) in [("A1", 1), ("A2", 3), ("A3", 6)] {
        let r = suite_decomposition(t).unwrap();
        assert_passes(&r);
        let c = r
            .checks
            .iter()
            .find(|c| c.name.starts_with("multiplicity"))
            .unwrap();
        assert_eq!(c.detail.as_ref().unwrap()["first_leg_variables"], mult);
        if t != "A1" {
            assert!(!r.traces.is_empty());
        }
    }
}

#[test]
fn generator_form_arguments() {
    let r = suite_repind_script("A2").unwrap();
    assert_passes(&r);
    let factors: Vec<String> = r
        .checks
        .iter()
        .filter_map(|c| {
            c.detail
                .as_ref()?
                .get("q_factor")
                .map(|v| v.as_str().unwrap().to_string())
        })
        .collect();
    assert_eq!(factors, ["0", "0", "1", "1"]);
}

#[test]
fn transcendental_duals() {
    for name in all_preset_names() {
        assert_passes(&suite_transcendental(&name).unwrap());
    }
}

#[test]
fn documents_round_trip() {
    for name in all_preset_names() {
        let r = build_preset(&name).unwrap();
        let back = Representation::from_json(&r.to_json()).unwrap();
        for (g, s) in &r.gens {
            assert_eq!(
                back.get(*g).unwrap().to_string(),
                s.to_string(),
                "{name} {g}"
            );
        }
    }
}

#[test]
fn reports_are_deterministic() {
    let strip = |mut r: CheckReport| {
        r.elapsed_ms = 0.0;
        r.to_json()
    };
    assert_eq!(
        strip(suite_gns("A2").unwrap()),
        strip(suite_gns("A2").unwrap())
    );
}
