//! Property tests for the text formats, the run configuration and the cache codec.

use loopint::bar::{random_chain, RandomChainSpec};
use loopint::cache::{decode, encode};
use loopint::clifford::CMat;
use loopint::config::RunConfig;
use loopint::textfmt::{format_chain, format_form, parse_chain, parse_form, parse_tform};
use loopint::C64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chains_survive_format_and_parse(seed in any::<u64>(), max_len in 1usize..=4, max_degree in 0usize..=3) {
        let spec = RandomChainSpec { max_len, max_degree, ..RandomChainSpec::default() };
        let c = random_chain(&mut ChaCha8Rng::seed_from_u64(seed), &spec);
        let text = format_chain(&c);
        let back = parse_chain(&text).unwrap();
        prop_assert_eq!(&back.terms, &c.terms);
        prop_assert_eq!(format_chain(&back), text);
    }

    #[test]
    fn slot_forms_survive_format_and_parse(seed in any::<u64>()) {
        let c = random_chain(&mut ChaCha8Rng::seed_from_u64(seed), &RandomChainSpec::default());
        for (_, w) in &c.terms {
            for t in w {
                let f = parse_form(&format_form(&t.prime)).unwrap();
                prop_assert_eq!(&f, &t.prime);
            }
        }
    }

    #[test]
    fn parsers_never_panic(text in "\\PC{0,200}") {
        let _ = parse_form(&text);
        let _ = parse_tform(&text);
        let _ = parse_chain(&text);
        let _ = RunConfig::parse(&text);
    }

    #[test]
    fn configs_round_trip(seed in any::<u64>(), flux in -8i32..=8, cases in 1usize..=1000, grid in 2usize..=4096) {
        let c = RunConfig { seed, flux, cases, grid, ..RunConfig::default() };
        let back = RunConfig::parse(&c.to_text()).unwrap();
        prop_assert_eq!(back.fingerprint(), c.fingerprint());
        prop_assert_eq!(back, c);
    }

    #[test]
    fn cache_codec_round_trips(values in prop::collection::vec(-1e6f64..1e6, 1..12), with_vectors in any::<bool>()) {
        let n = values.len();
        let vecs = CMat::from_fn(n, n, |i, j| C64::new(i as f64 - j as f64, (i * j) as f64 * 0.5));
        let hash = "ab".repeat(32);
        let bytes = encode(&hash, &values, with_vectors.then_some(&vecs)).unwrap();
        let back = decode(&bytes).unwrap();
        prop_assert_eq!(&back.eigenvalues, &values);
        prop_assert_eq!(back.eigenvectors.is_some(), with_vectors);
        if with_vectors {
            prop_assert_eq!(back.eigenvectors.unwrap(), vecs);
        }
    }

    #[test]
    fn cache_decoder_rejects_truncation(cut in 0usize..64) {
        let bytes = encode(&"cd".repeat(32), &[1.0, 2.0, 3.0], None).unwrap();
        let cut = cut.min(bytes.len() - 1);
        prop_assert!(decode(&bytes[..cut]).is_err());
    }
}
