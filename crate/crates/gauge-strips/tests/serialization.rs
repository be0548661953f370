// SPDX-License-Identifier: AGPL-3.0-only

//! Interchange-format contracts: the JSON documents for link fields and
//! gauge-invariant representations round-trip bit exactly and expose the
//! documented shape, the CSV documents carry full-precision floats under
//! their fixed headers, and the report types serialize with stable keys.

use serde_json::Value;

use gauge_strips::{
    butterfly, spectra_coincide, spectrum, uniform_field_giv, verify_twisted_bc,
    BoundaryCondition, Construction, GaugeInvariantRep, HofstadterParams, LatticeGeometry,
    LinkField,
};

fn geom(dim: usize, size: usize, bc: BoundaryCondition) -> LatticeGeometry {
    LatticeGeometry::new(dim, size, bc).expect("valid geometry")
}

#[test]
fn link_field_json_round_trips_bit_exactly() {
    for bc in [BoundaryCondition::Open, BoundaryCondition::Periodic] {
        for (dim, size) in [(2, 3), (3, 2), (4, 2)] {
            let links = LinkField::random(geom(dim, size, bc), 7 + dim as u64);
            let restored = LinkField::from_json(&links.to_json()).expect("round trip");
            assert_eq!(
                links.values(),
                restored.values(),
                "dim {dim} size {size} {bc:?}: values must round-trip bit exactly"
            );
            assert_eq!(links.geometry(), restored.geometry());
        }
    }
}

#[test]
fn link_field_json_has_the_documented_shape() {
    let g = geom(2, 2, BoundaryCondition::Periodic);
    let links = LinkField::random(g, 3);
    let doc: Value = serde_json::from_str(&links.to_json()).expect("valid JSON");
    assert_eq!(doc["dim"], Value::from(2));
    assert_eq!(doc["size"], Value::from(2));
    assert_eq!(doc["bc"], Value::from("periodic"));
    let entries = doc["links"].as_array().expect("links is an array");
    assert_eq!(entries.len(), g.num_links(), "one entry per link");
    // Entries are [coords.., direction, value] with 1-based site
    // coordinates, in lexicographic (site, direction) order.
    let first = entries[0].as_array().expect("entry is an array");
    assert_eq!(first.len(), 2 + 2, "dim coordinates, direction, value");
    assert_eq!(first[0], Value::from(1));
    assert_eq!(first[1], Value::from(1));
    assert_eq!(first[2], Value::from(0));
    let second = entries[1].as_array().expect("entry is an array");
    assert_eq!(second[2], Value::from(1), "directions vary fastest");
}

#[test]
fn link_field_json_rejects_tampering() {
    let links = LinkField::random(geom(2, 2, BoundaryCondition::Open), 11);
    let text = links.to_json();

    let mut doc: Value = serde_json::from_str(&text).expect("valid JSON");
    doc["links"].as_array_mut().expect("array").pop();
    assert!(
        LinkField::from_json(&doc.to_string()).is_err(),
        "a missing link entry must be rejected"
    );

    let mut doc: Value = serde_json::from_str(&text).expect("valid JSON");
    let entries = doc["links"].as_array_mut().expect("array");
    let moved = entries.remove(0);
    entries.push(moved);
    assert!(
        LinkField::from_json(&doc.to_string()).is_err(),
        "out-of-order link entries must be rejected"
    );

    // An open-boundary slot forced away from zero.
    let mut doc: Value = serde_json::from_str(&text).expect("valid JSON");
    for entry in doc["links"].as_array_mut().expect("array") {
        let row = entry.as_array_mut().expect("entry");
        if row[0] == Value::from(2) && row[2] == Value::from(0) {
            row[3] = Value::from(0.5);
            break;
        }
    }
    assert!(
        LinkField::from_json(&doc.to_string()).is_err(),
        "a nonzero boundary slot must be rejected"
    );
}

#[test]
fn representation_json_round_trips_bit_exactly_for_all_layouts() {
    let layouts = [
        (Construction::Asymmetric, 2),
        (Construction::Asymmetric, 3),
        (Construction::Asymmetric, 4),
        (Construction::Symmetric, 2),
        (Construction::Symmetric, 3),
    ];
    for bc in [BoundaryCondition::Open, BoundaryCondition::Periodic] {
        for &(construction, dim) in &layouts {
            let rep = GaugeInvariantRep::random(geom(dim, 3, bc), construction, 42)
                .expect("valid representation");
            let restored =
                GaugeInvariantRep::from_json(&rep.to_json()).expect("round trip");
            assert_eq!(rep, restored, "{construction} dim {dim} {bc:?}");
        }
    }
}

#[test]
fn representation_json_has_the_documented_shape() {
    let rep = GaugeInvariantRep::random(
        geom(3, 2, BoundaryCondition::Periodic),
        Construction::Asymmetric,
        5,
    )
    .expect("valid representation");
    let doc: Value = serde_json::from_str(&rep.to_json()).expect("valid JSON");
    assert_eq!(doc["construction"], Value::from("asymmetric"));
    assert_eq!(doc["dim"], Value::from(3));
    assert_eq!(doc["size"], Value::from(2));
    assert_eq!(doc["bc"], Value::from("periodic"));
    assert!(doc["phi"].is_array());
    let strips = doc["strips"].as_object().expect("strips keyed by pair");
    let keys: Vec<&String> = strips.keys().collect();
    assert_eq!(keys, ["1,0", "2,0", "2,1"], "canonical pair order");
    assert_eq!(strips["1,0"]["pinned"], Value::from(0));
    assert_eq!(strips["2,1"]["pinned"], Value::from(1));
    let loops = doc["loops"].as_object().expect("loops keyed by direction");
    assert_eq!(loops.len(), 3);
    assert!(doc["transition"].is_object(), "periodic documents carry transition data");

    let open_rep = GaugeInvariantRep::random(
        geom(2, 2, BoundaryCondition::Open),
        Construction::Symmetric,
        5,
    )
    .expect("valid representation");
    let open_doc: Value = serde_json::from_str(&open_rep.to_json()).expect("valid JSON");
    assert!(
        open_doc.get("loops").is_none() || open_doc["loops"].as_object().unwrap().is_empty(),
        "open documents carry no loops"
    );
    assert!(
        open_doc.get("transition").is_none(),
        "open documents carry no transition data"
    );
}

#[test]
fn spectrum_csv_rows_carry_full_precision() {
    let p = HofstadterParams::new(1, 2, 1, 1.0).expect("half flux");
    let bands = spectrum(&p, Construction::Asymmetric, 2).expect("zone sweep");
    let csv = bands.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("k1,k2,band,energy"));
    for (line, row) in lines.zip(&bands.rows) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 4);
        for (text, want) in fields[..2].iter().zip(&row.k) {
            let parsed: f64 = text.parse().expect("momentum parses");
            assert_eq!(parsed.to_bits(), want.to_bits(), "momenta keep every bit");
        }
        assert_eq!(fields[2].parse::<usize>().expect("band parses"), row.band);
        let energy: f64 = fields[3].parse().expect("energy parses");
        assert_eq!(energy.to_bits(), row.energy.to_bits(), "energies keep every bit");
    }
}

#[test]
fn butterfly_csv_rows_carry_full_precision() {
    let data = butterfly(3).expect("small butterfly");
    let csv = data.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("m,n,energy"));
    let body: Vec<&str> = lines.collect();
    assert_eq!(body.len(), data.rows.len());
    for (line, row) in body.iter().zip(&data.rows) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[0].parse::<u64>().expect("m parses"), row.m);
        assert_eq!(fields[1].parse::<u64>().expect("n parses"), row.n);
        let energy: f64 = fields[2].parse().expect("energy parses");
        assert_eq!(energy.to_bits(), row.energy.to_bits(), "energies keep every bit");
    }
}

#[test]
fn report_types_serialize_with_stable_keys() {
    let report = spectra_coincide(&[0.0, 1.0], &[1.0, 0.0], 1e-8).expect("sizes match");
    let doc = serde_json::to_value(report).expect("serializable");
    for key in ["size", "max_abs_diff", "tol", "pass"] {
        assert!(doc.get(key).is_some(), "coincidence report carries `{key}`");
    }

    let p = HofstadterParams::new(1, 2, 1, 1.0).expect("half flux");
    let rep = uniform_field_giv(&p, Construction::Asymmetric, 2).expect("uniform field");
    let twist = verify_twisted_bc(&rep).expect("periodic representation");
    let doc = serde_json::to_value(twist).expect("serializable");
    for key in [
        "cocycle",
        "phi_boundary",
        "strip_periodicity",
        "loop_translation",
    ] {
        assert!(doc.get(key).is_some(), "twist report carries `{key}`");
    }
}
