//! Property tests over randomized shapes and payloads.

use proptest::collection::vec;
use proptest::prelude::*;

use randtensor::io::{tensor_from_bytes, tensor_to_bytes};
use randtensor::tensor::{dot, lp_norm, Shape, Tensor, VectorTuple};

fn arb_shape() -> impl Strategy<Value = Vec<usize>> {
    vec(1usize..5, 2..5)
}

fn finite_f64() -> impl Strategy<Value = f64> {
    // Finite payload values across many magnitudes, including -0.0.
    prop_oneof![
        -1e12f64..1e12,
        Just(-0.0),
        Just(0.0),
        Just(f64::MIN_POSITIVE),
        Just(-f64::MIN_POSITIVE),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn file_round_trip_is_bit_identical(dims in arb_shape(), seed in any::<u64>()) {
        let shape = Shape::new(dims).unwrap();
        let count = shape.element_count();
        let mut state = seed;
        let data: Vec<f64> = (0..count)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 11) as f64) / ((1u64 << 53) as f64) * 2e6 - 1e6
            })
            .collect();
        let t = Tensor::new(shape, data).unwrap();
        let bytes = tensor_to_bytes(&t).unwrap();
        let back = tensor_from_bytes(&bytes).unwrap();
        prop_assert_eq!(t.shape(), back.shape());
        for (a, b) in t.data().iter().zip(back.data()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
        prop_assert_eq!(bytes, tensor_to_bytes(&back).unwrap());
    }

    #[test]
    fn special_payload_values_round_trip(raw in vec(finite_f64(), 4..=4)) {
        let t = Tensor::new(Shape::new(vec![2, 2]).unwrap(), raw).unwrap();
        let back = tensor_from_bytes(&tensor_to_bytes(&t).unwrap()).unwrap();
        for (a, b) in t.data().iter().zip(back.data()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn contraction_dot_identity_and_cauchy_schwarz(
        dims in arb_shape(),
        seed in any::<u64>(),
    ) {
        let shape = Shape::new(dims.clone()).unwrap();
        let mut state = seed | 1;
        let mut rnd = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64) / ((1u64 << 53) as f64) * 2.0 - 1.0
        };
        let data: Vec<f64> = (0..shape.element_count()).map(|_| rnd()).collect();
        let t = Tensor::new(shape, data).unwrap();
        let vecs: Vec<Vec<f64>> = dims.iter().map(|&n| (0..n).map(|_| rnd()).collect()).collect();
        let norms: f64 = vecs.iter().map(|v| lp_norm(v, 2.0).unwrap()).product();
        let u = VectorTuple::new(vecs).unwrap();
        let r = t.rank1_value(&u).unwrap();
        for mode in 0..dims.len() {
            let g = t.contract_except(&u, mode).unwrap();
            let via_dot = dot(&g, &u.vectors()[mode]);
            prop_assert!((via_dot - r).abs() <= 1e-12 * r.abs().max(1.0));
        }
        prop_assert!(r.abs() <= t.frobenius_norm() * norms + 1e-12);
    }
}

/// One large deterministic case: round-trip at element count 10^6.
#[test]
fn million_element_round_trip() {
    let shape = Shape::new(vec![100, 100, 100]).unwrap();
    let mut state = 77u64;
    let data: Vec<f64> = (0..shape.element_count())
        .map(|_| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            f64::from_bits((state >> 12) | 0x3FF0_0000_0000_0000) - 1.5
        })
        .collect();
    let t = Tensor::new(shape, data).unwrap();
    let bytes = tensor_to_bytes(&t).unwrap();
    assert_eq!(bytes.len(), 5 + 12 + 8_000_000);
    let back = tensor_from_bytes(&bytes).unwrap();
    for (a, b) in t.data().iter().zip(back.data()) {
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
