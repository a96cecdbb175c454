use sdoflab::codec::{format_rational, parse_rational};
use sdoflab::verifier::full_space_ratio;
use sdoflab::{
    construct_wth_scheme, sample_realization, stack, verify, BigRational, ChannelRealization, LinearScheme, RationalGrid,
    SdofError, SystemDims,
};

// N = K = 1 over two slots, worked by hand:
// barH1 = I, barH2 = diag(2, 1), common noise direction (1, 1), so
// barQ1 = (1, 1) and barQ2 = (1/2, 1). The information precoder (1, 0)
// stays independent of the aligned noise at the receiver, and with
// barG1 = barG2 = I the two noise columns already span the eavesdropper.
const REALIZATION: &str = r#"{
  "dims": { "n_antennas": 1, "k_eve": 1, "n_slots": 2 },
  "h1": [[["1"]], [["1"]]],
  "h2": [[["2"]], [["1"]]],
  "g1": [[["1"]], [["1"]]],
  "g2": [[["1"]], [["1"]]]
}"#;

const SCHEME: &str = r#"{
  "dims": { "n_antennas": 1, "k_eve": 1, "n_slots": 2 },
  "m1": 1, "m2": 0, "n1": 1, "n2": 1,
  "barP1": [["1"], ["0"]],
  "barP2": [[], []],
  "barQ1": [["1"], ["1"]],
  "barQ2": [["1/2"], ["1"]]
}"#;

#[test]
fn hand_written_scheme_verifies() {
    let r = ChannelRealization::from_json(REALIZATION).unwrap();
    let s = LinearScheme::from_json(SCHEME).unwrap();
    let c = stack(&r);
    let report = verify(&s, &c).unwrap();
    assert_eq!(report.decodable_dims, 1);
    assert_eq!(report.leakage_dims, 0);
    assert_eq!(report.eve_space_rank, 2);
    assert_eq!(report.achieved_sum_sdof, Some(BigRational::new(1.into(), 2.into())));
    assert_eq!(report.csv_row(), "1,1,2,1,0,1,1,1,0,2,1/2,true");
    assert_eq!(format_rational(&full_space_ratio(&s, &c).unwrap()), "1");
}

#[test]
fn misaligned_noise_blocks_decoding_and_leaks() {
    let s = LinearScheme::from_json(&SCHEME.replace(r#"[["1/2"], ["1"]]"#, r#"[["1"], ["1"]]"#)).unwrap();
    let r = ChannelRealization::from_json(REALIZATION).unwrap();
    let report = verify(&s, &stack(&r)).unwrap();
    assert!(!report.decodability_ok);
    assert_eq!(report.leakage_dims, 1);
    assert_eq!(report.achieved_sum_sdof, None);
}

#[test]
fn saved_files_round_trip_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let grid = RationalGrid::default();
    let r = sample_realization(SystemDims::new(2, 3, 2).unwrap(), 17, grid).unwrap();
    let s = construct_wth_scheme(r.legitimate(), 18, grid).unwrap();
    let (rp, sp) = (dir.path().join("r.json"), dir.path().join("s.json"));
    r.save(&rp).unwrap();
    s.save(&sp).unwrap();
    let (r2, s2) = (ChannelRealization::load(&rp).unwrap(), LinearScheme::load(&sp).unwrap());
    assert_eq!(r2, r);
    assert_eq!(s2, s);
    assert_eq!(std::fs::read_to_string(&rp).unwrap(), r2.to_json());
    assert_eq!(std::fs::read_to_string(&sp).unwrap(), s2.to_json());
}

fn malformed_field(result: Result<impl std::fmt::Debug, SdofError>) -> String {
    match result {
        Err(SdofError::MalformedFile { field, .. }) => field,
        other => panic!("expected MalformedFile, got {other:?}"),
    }
}

#[test]
fn malformed_files_name_the_field() {
    let bad_entry = SCHEME.replace(r#""barP1": [["1"], ["0"]]"#, r#""barP1": [["1"], ["0.5"]]"#);
    assert_eq!(malformed_field(LinearScheme::from_json(&bad_entry)), "barP1[1][0]");

    let bad_count = SCHEME.replace(r#""m1": 1"#, r#""m1": 2"#);
    assert_eq!(malformed_field(LinearScheme::from_json(&bad_count)), "barP1[0]");

    let zero_denominator = REALIZATION.replace(r#""h2": [[["2"]]"#, r#""h2": [[["2/0"]]"#);
    assert!(malformed_field(ChannelRealization::from_json(&zero_denominator)).starts_with("h2"));

    assert!(matches!(LinearScheme::from_json("{"), Err(SdofError::MalformedFile { .. })));
    assert!(matches!(ChannelRealization::from_json("[]"), Err(SdofError::MalformedFile { .. })));
}

#[test]
fn singular_legitimate_channel_is_rejected() {
    let singular = REALIZATION.replace(r#""h1": [[["1"]], [["1"]]]"#, r#""h1": [[["0"]], [["1"]]]"#);
    assert!(ChannelRealization::from_json(&singular).is_err());
}

#[test]
fn rational_text_is_canonical() {
    for s in ["0", "-3/4", "7", "10000/9999"] {
        assert_eq!(format_rational(&parse_rational(s).unwrap()), s);
    }
    assert_eq!(format_rational(&parse_rational("4/8").unwrap()), "1/2");
    for bad in ["", "1/-2", "+1", "1 /2", "1/0", "0.5"] {
        assert!(parse_rational(bad).is_none(), "{bad}");
    }
}
