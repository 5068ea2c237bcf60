use wshift::criteria::{psp_triple_check, Evidence, Reason, Status};
use wshift::io::{parse_spec, to_json};
use wshift::report::{analyze, AnalyzeOptions};
use wshift::repro::{repro_genhyp, repro_trivcr, trivcr_spec};
use wshift::solver::shadow_error;
use wshift::trajectories::{close_to_zero, gen_ramp, validate};
use wshift::{Error, Pseudotrajectory, SeqVector, SpaceNorm, WeightSpec};

#[test]
fn triple_witness_sits_in_the_left_tail() {
    let v = psp_triple_check(&trivcr_spec(), 1.0, 0.05, (-64, 64)).unwrap();
    assert_eq!((v.status, v.reason), (Status::Fails, Reason::TripleWitness));
    let Evidence::Triple(w) = v.evidence else { panic!() };
    assert!(w.k <= w.l && w.l <= w.m && w.m <= 0);
    assert!(w.a < 0.05 && w.b < 0.05);
}

#[test]
fn ramp_is_not_shadowed_by_zero() {
    let ramp = gen_ramp(0.1, 11).unwrap();
    assert_eq!(ramp.max_norm().unwrap(), 11.0 * 0.1);
    assert_eq!(shadow_error(&ramp, &trivcr_spec(), &SeqVector::zero()).unwrap(), 11.0 * 0.1);
}

#[test]
fn closing_the_zero_loop_stays_zero() {
    let zero = Pseudotrajectory::new(vec![SeqVector::zero(); 3], 0.1, SpaceNorm::Sup, true).unwrap();
    let closed = close_to_zero(&zero, &trivcr_spec(), 0.1).unwrap();
    assert!(closed.trajectory.points.iter().all(SeqVector::is_zero));
    assert!(validate(&closed.trajectory, &trivcr_spec()).unwrap().within(0.1));
}

#[test]
fn analyze_from_a_spec_document() {
    let spec = parse_spec(r#"{"core_start": 0, "core": [], "left_period": [0.5], "right_period": [0.5]}"#).unwrap();
    let report = analyze(&spec, &AnalyzeOptions::default()).unwrap();
    let s = report.get("shadowing").unwrap();
    assert_eq!((s.status, s.reason), (Status::Holds, Reason::IA));
    assert_eq!(to_json(&report), to_json(&analyze(&spec, &AnalyzeOptions::default()).unwrap()));
}

#[test]
fn trivcr_report_on_a_coarse_grid() {
    let opts = AnalyzeOptions {
        grid_levels: 5,
        ..AnalyzeOptions::default()
    };
    let r = analyze(&trivcr_spec(), &opts).unwrap();
    assert!(r.get("periodic_points").unwrap().fails());
    let c = r.get("chain_recurrence_trivial").unwrap();
    assert_eq!((c.status, c.reason), (Status::Holds, Reason::IIIB));
    let p = r.get("psp_c0_triples").unwrap();
    assert_eq!((p.status, p.reason), (Status::Fails, Reason::TripleWitness));
}

#[test]
fn malformed_spec_reports_position() {
    match parse_spec("{\"core_start\": 0,\n \"core\": [1.0,]}") {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("{other:?}"),
    }
    assert!(parse_spec(r#"{"core_start": 0, "core": [], "left_period": [0.0], "right_period": [1.0]}"#).is_err());
}

#[test]
fn reproductions() {
    assert!(repro_genhyp().unwrap().pass);
    // Witnesses for δ = 2^-j need indices down to −2^{j+1}.
    assert!(repro_trivcr((-8192, 64)).unwrap().pass);
    let narrow = repro_trivcr((-64, 64)).unwrap();
    assert!(!narrow.pass);
    assert_eq!(
        narrow.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect::<Vec<_>>(),
        ["psp_witness_every_delta"]
    );
}

#[test]
fn step_specs_match_their_definition() {
    let s = WeightSpec::step(1.0, 0.5, 0).unwrap();
    assert_eq!(s.weight_at(-1), 1.0);
    assert_eq!(s.weight_at(0), 0.5);
}
