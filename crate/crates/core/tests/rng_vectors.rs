use dyto::synth::rng::SplitMix64;
use serde_json::Value;

fn vectors() -> Value {
    let text = include_str!("data/splitmix64_vectors.json");
    serde_json::from_str(text).unwrap()
}

#[test]
fn raw_outputs_match_reference() {
    let v = vectors();
    for case in v["cases"].as_array().unwrap() {
        let mut rng = SplitMix64::new(case["seed"].as_u64().unwrap());
        for expected in case["outputs"].as_array().unwrap() {
            let expected: u64 = expected.as_str().unwrap().parse().unwrap();
            assert_eq!(rng.next_u64(), expected);
        }
    }
}

#[test]
fn derived_draws_match_reference() {
    let v = vectors();
    let mut rng = SplitMix64::new(7);
    for expected in v["uniform_seed7"].as_array().unwrap() {
        assert_eq!(rng.next_f64(), expected.as_f64().unwrap());
    }
    let mut rng = SplitMix64::new(7);
    for expected in v["normal_seed7"].as_array().unwrap() {
        assert!((rng.normal() - expected.as_f64().unwrap()).abs() < 1e-15);
    }
    let first: u64 = v["stream_seed7_tag3_first"].as_str().unwrap().parse().unwrap();
    assert_eq!(SplitMix64::stream(7, 3).next_u64(), first);
}
