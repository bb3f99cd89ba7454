use nomf_core::frames::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_events(seed: u64, count: usize, w: u16, h: u16) -> Vec<Event> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = rng.random_range(0..1_000_000u64);
    (0..count)
        .map(|_| {
            t += rng.random_range(0..200u64);
            Event {
                t,
                x: rng.random_range(0..w),
                y: rng.random_range(0..h),
                polarity: if rng.random_bool(0.5) { Polarity::On } else { Polarity::Off },
            }
        })
        .collect()
}

#[test]
fn ten_thousand_lines_round_trip() {
    let events = random_events(1, 10_000, 240, 180);
    let mut buf = Vec::new();
    write_event_stream(&mut buf, &events).unwrap();
    assert_eq!(buf.iter().filter(|&&b| b == b'\n').count(), 10_000);
    assert_eq!(parse_event_stream(buf.as_slice()).unwrap(), events);
}

#[test]
fn aggregation_matches_scatter() {
    let events = random_events(2, 5_000, 240, 180);
    let cfg = FrameConfig {
        frame_interval_us: 20_000,
        ..FrameConfig::default()
    };
    let frames = aggregate_frames(&events, &cfg).unwrap();
    let t0 = events[0].t;
    let span = events.last().unwrap().t - t0;
    assert_eq!(frames.len() as u64, span / 20_000 + 1);
    let mut expect = vec![vec![false; 240 * 180]; frames.len()];
    for e in &events {
        expect[((e.t - t0) / 20_000) as usize][e.y as usize * 240 + e.x as usize] = true;
    }
    for (f, e) in frames.iter().zip(&expect) {
        let bits: Vec<bool> = f.to_bits().into_iter().map(|b| b == 1).collect();
        assert_eq!(&bits, e);
    }
}

#[test]
fn bad_lines_are_reported_with_numbers() {
    match parse_event_str("# header\n1,2,3,1\n5,2,x,0\n") {
        Err(nomf_core::Error::MalformedLine(3)) => {}
        other => panic!("{other:?}"),
    }
    match parse_event_str("10,1,1,1\n9,1,1,0\n") {
        Err(nomf_core::Error::NonMonotonicTimestamp(2)) => {}
        other => panic!("{other:?}"),
    }
    let out = aggregate_frames(&parse_event_str("0,240,0,1\n").unwrap(), &FrameConfig::default());
    assert!(matches!(out, Err(nomf_core::Error::EventOutOfBounds(_))));
}

#[test]
fn frames_outside_the_macro_are_rejected() {
    let cfg = FrameConfig {
        sensor_width: 321,
        ..FrameConfig::default()
    };
    assert!(cfg.validate().is_err());
}

proptest! {
    #[test]
    fn pbm_round_trip(w in 1usize..100, h in 1usize..60, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = BinaryFrame::from_fn(w, h, |_, _| rng.random_bool(0.4));
        prop_assert_eq!(decode_pbm(&encode_pbm(&f)).unwrap(), f);
    }

    #[test]
    fn event_round_trip(seed in any::<u64>(), n in 0usize..300) {
        let events = random_events(seed, n, 320, 240);
        let mut buf = Vec::new();
        write_event_stream(&mut buf, &events).unwrap();
        prop_assert_eq!(parse_event_stream(buf.as_slice()).unwrap(), events);
    }

    #[test]
    fn every_event_lands_in_exactly_one_frame(seed in any::<u64>(), tf in 1u64..5000) {
        let events = random_events(seed, 400, 64, 48);
        let cfg = FrameConfig { frame_interval_us: tf, sensor_width: 64, sensor_height: 48 };
        let frames = aggregate_frames(&events, &cfg).unwrap();
        let distinct: std::collections::HashSet<_> = events
            .iter()
            .map(|e| ((e.t - events[0].t) / tf, e.x, e.y))
            .collect();
        prop_assert_eq!(frames.iter().map(BinaryFrame::popcount).sum::<usize>(), distinct.len());
    }
}
