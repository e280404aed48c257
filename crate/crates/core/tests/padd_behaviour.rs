use ndarray::Array2;
use padd_core::baselines::{run_unsupervised, Cddd};
use padd_core::projector::init_network;
use padd_core::{
    generate_stream, padd_process_chunk, padd_run, Chunk, Dynamics, PaddParams, PaddState, Rng,
    StreamSpec, UnsupervisedDetector, Verdict,
};

fn short_spec(dynamics: Dynamics, n_drifts: usize, seed: u64) -> StreamSpec {
    let mut spec = StreamSpec::new(dynamics, n_drifts, 30, seed);
    spec.n_chunks = 60;
    spec
}

fn with_random_labels(chunk: &Chunk, rng: &mut Rng) -> Chunk {
    let labels = (0..chunk.n_samples())
        .map(|_| u8::from(rng.next_f64() < 0.5))
        .collect();
    Chunk::new(chunk.index, chunk.features.clone(), labels).unwrap()
}

#[test]
fn binomial_counter_tail_is_negligible() {
    // P(Bin(144, 0.07) >= 28) from the probability mass function
    let (n, p) = (144u32, 0.07f64);
    let mut pmf = (1.0 - p).powi(n as i32);
    let mut tail = 0.0;
    for k in 0..=n {
        if k >= 28 {
            tail += pmf;
        }
        pmf *= f64::from(n - k) / f64::from(k + 1) * p / (1.0 - p);
    }
    assert!(tail < 1e-3, "{tail}");
    assert_eq!(PaddParams::sudden().min_drift_count(), 28);
}

#[test]
fn labels_never_change_verdicts() {
    for seed in 0..4u64 {
        let spec = short_spec(Dynamics::Sudden, 3, seed);
        let chunks: Vec<Chunk> = generate_stream(&spec).unwrap().collect();
        let mut rng = Rng::derive(seed, "labels", 0);
        let relabelled: Vec<Chunk> = chunks
            .iter()
            .map(|c| with_random_labels(c, &mut rng))
            .collect();

        let mut a = PaddState::new(PaddParams::sudden(), 30, seed).unwrap();
        let mut b = PaddState::new(PaddParams::sudden(), 30, seed).unwrap();
        let mut ca = Cddd::new(0.2).unwrap();
        let mut cb = Cddd::new(0.2).unwrap();
        for (x, y) in chunks.iter().zip(&relabelled) {
            assert_eq!(
                padd_process_chunk(&mut a, x).unwrap(),
                padd_process_chunk(&mut b, y).unwrap()
            );
            assert_eq!(a.last_count(), b.last_count());
            assert_eq!(
                ca.process(x.index, x.features.view()).unwrap(),
                cb.process(y.index, y.features.view()).unwrap()
            );
        }
    }
}

#[test]
fn detections_increase_and_skip_first_chunk() {
    for seed in 0..3u64 {
        let spec = short_spec(Dynamics::Sudden, 3, seed);
        let params = PaddParams::with_sensitivity(0.2, 0.1);
        let det = padd_run(params, generate_stream(&spec).unwrap(), seed).unwrap();
        assert!(!det.contains(&0));
        assert!(det.windows(2).all(|w| w[0] < w[1]));
        let again = padd_run(params, generate_stream(&spec).unwrap(), seed).unwrap();
        assert_eq!(det, again);
    }
}

#[test]
fn counter_stays_within_bounds() {
    let spec = short_spec(Dynamics::Gradual, 3, 8);
    let mut state = PaddState::new(PaddParams::gradual(), 30, 8).unwrap();
    for chunk in generate_stream(&spec).unwrap() {
        padd_process_chunk(&mut state, &chunk).unwrap();
        if let Some(a) = state.last_count() {
            assert!(a <= 144);
        }
    }
}

#[test]
fn sudden_drifts_are_found_near_centres() {
    // full-length streams, sudden preset; most drifts get a detection within ±3
    let mut covered = 0;
    let mut total = 0;
    for seed in 0..10u64 {
        let spec = StreamSpec::new(Dynamics::Sudden, 10, 30, 1000 + seed);
        let stream = generate_stream(&spec).unwrap();
        let centers = stream.schedule().centers.clone();
        let det = padd_run(PaddParams::sudden(), stream, seed).unwrap();
        for c in &centers {
            total += 1;
            covered += usize::from(det.iter().any(|d| d.abs_diff(*c) <= 3));
        }
    }
    assert!(covered * 4 >= total * 3, "{covered}/{total} drifts matched");
}

#[test]
fn stationarity_transfers_through_network() {
    let n = 200;
    let mut passes = 0;
    for seed in 0..100u64 {
        let spec = StreamSpec::new(Dynamics::Sudden, 0, 30, seed);
        let mut stream = generate_stream(&spec).unwrap();
        let first = stream.next().unwrap();
        let second = stream.next().unwrap();
        let net = init_network(30, 10, 12, &mut Rng::derive(seed, "net", 0)).unwrap();
        let a = net.forward(first.features.view()).unwrap();
        let b = net.forward(second.features.view()).unwrap();
        let mut ok = 0;
        for j in 0..12 {
            let (ca, cb) = (a.column(j), b.column(j));
            let (ma, mb) = (ca.mean().unwrap(), cb.mean().unwrap());
            let va = ca.var(1.0);
            let vb = cb.var(1.0);
            let pooled = ((va + vb) / 2.0).sqrt();
            ok += usize::from((ma - mb).abs() <= 4.0 * pooled / (n as f64).sqrt());
        }
        passes += usize::from(ok >= 10);
    }
    assert!(passes >= 95, "{passes}/100 seeds");
}

#[test]
fn constant_shift_fires_once_then_settles() {
    let mut state = PaddState::new(PaddParams::sudden(), 4, 1).unwrap();
    let mut rng = Rng::new(2);
    let mut verdicts = Vec::new();
    for k in 0..8 {
        let offset = if k < 4 { 0.0 } else { 25.0 };
        let x = Array2::from_shape_fn((200, 4), |_| rng.normal(offset, 1.0));
        verdicts.push(state.process(k, x.view()).unwrap());
    }
    assert_eq!(verdicts[4], Verdict::Drift);
    assert_eq!(verdicts.iter().filter(|v| v.is_drift()).count(), 1);
    assert_eq!(state.history()[0].len(), 4 * 200);
}

#[test]
fn cddd_runs_over_stream() {
    let spec = short_spec(Dynamics::Sudden, 3, 5);
    let mut cddd = Cddd::new(Cddd::sensitivity_for(3)).unwrap();
    let det = run_unsupervised(generate_stream(&spec).unwrap(), &mut cddd).unwrap();
    assert!(det.iter().all(|&d| d >= 4));
}
