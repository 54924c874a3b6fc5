use argmine_core::corpus::{ArgComponent, Specificity};
use argmine_core::error::Result;
use argmine_core::features::{FeatureSet, FeatureVector};
use argmine_core::models::{
    build_model, encode_char_seq, train, EncodedSeq, Example, Family, Heads, InputDims, Modality, Model, ModelSpec,
    NeuralModel, TrainConfig,
};
use argmine_core::rng::{seeded, Prng};
use argmine_core::tensor::{gradient_check, Objective, Parameter, Tensor};
use rand::Rng;

const NO_FEATURES: InputDims = InputDims { dense: 0, sparse: 0 };

fn random_seq(len: usize, width: usize, rng: &mut Prng) -> EncodedSeq {
    let data = (0..len * width).map(|_| rng.random_range(-1.0..1.0)).collect();
    EncodedSeq {
        rows: Tensor::from_vec(&[len, width], data).unwrap(),
        len,
        truncated: false,
    }
}

fn random_features(dims: InputDims, rng: &mut Prng) -> FeatureVector {
    let dense = (0..dims.dense).map(|_| rng.random_range(-2.0..2.0)).collect();
    let mut sparse = Vec::new();
    for i in 0..dims.sparse {
        if rng.random_bool(0.4) {
            sparse.push((i, rng.random_range(0.0..1.0)));
        }
    }
    FeatureVector { dense, sparse }
}

fn random_examples(n: usize, width: usize, dims: InputDims, rng: &mut Prng) -> Vec<Example> {
    (0..n)
        .map(|i| {
            let len = rng.random_range(1..9);
            Example {
                id: format!("t#{i}"),
                seq: (width > 0).then(|| random_seq(len, width, rng)),
                features: random_features(dims, rng),
                arg: ArgComponent::from_index(rng.random_range(0..3)).unwrap(),
                spec: Specificity::from_rank(rng.random_range(0..3)).unwrap(),
            }
        })
        .collect()
}

/// Loss of a fixed batch with dropout off, for finite-difference checks.
struct ModelObj {
    model: Model,
    batch: Vec<Example>,
    heads: Heads,
}

impl ModelObj {
    fn run(&mut self) -> Result<f64> {
        let refs: Vec<&Example> = self.batch.iter().collect();
        let parts = match &mut self.model {
            Model::Neural(m) => m.loss_grad(&refs, self.heads, None, None)?,
            Model::LogReg(m) => m.loss_grad(&refs, self.heads, None)?,
            Model::Majority(_) => unreachable!(),
        };
        Ok(parts.total())
    }
}

impl Objective for ModelObj {
    fn params_mut(&mut self) -> Vec<&mut Parameter> {
        self.model.params_mut()
    }
    fn loss(&mut self) -> Result<f64> {
        // gradients are discarded; only the value matters here
        self.run()
    }
    fn loss_and_grad(&mut self) -> Result<f64> {
        for p in self.model.params_mut() {
            p.zero_grad();
        }
        self.run()
    }
}

fn small(spec: &mut ModelSpec) {
    spec.hyperparams.filters = 6;
    spec.hyperparams.fc_width = 7;
    spec.hyperparams.sparse_proj = 4;
}

fn check_model(mut spec: ModelSpec, dims: InputDims, shrink: bool, tol: f64) {
    if shrink {
        small(&mut spec);
    }
    for seed in 0..5 {
        let mut rng = seeded(1000 + seed);
        let model = build_model(&spec, dims, seed).unwrap();
        let batch = random_examples(4, spec.seq_width(), dims, &mut rng);
        let mut obj = ModelObj {
            model,
            batch,
            heads: Heads::ALL,
        };
        if let Model::Neural(m) = &mut obj.model {
            let refs: Vec<Example> = obj.batch.clone();
            m.prepare(&refs);
            // zero biases put ReLU inputs exactly on the kink when a layer is dead
            for p in m.params_mut() {
                if p.name.ends_with(".b") || p.name.ends_with(".bias") {
                    for v in p.value.data_mut() {
                        *v = rng.random_range(-0.3..0.3);
                    }
                }
            }
        }
        if let Model::LogReg(m) = &mut obj.model {
            let refs: Vec<Example> = obj.batch.clone();
            m.prepare(&refs);
            // move off the zero start so every coordinate has curvature
            for p in m.params_mut() {
                for v in p.value.data_mut() {
                    *v = rng.random_range(-0.5..0.5);
                }
            }
        }
        let rep = gradient_check(&mut obj, 1e-5, 50, seed).unwrap();
        assert!(rep.max_rel_error() < tol, "{} seed {seed}: {:?}", spec.label(), rep.per_param);
        assert!(rep.kinks * 50 <= rep.checked(), "{} seed {seed}: {} kinks", spec.label(), rep.kinks);
    }
}

#[test]
fn cnn_char_gradients() {
    check_model(ModelSpec::new(Family::Cnn, Modality::Char, &[], false), NO_FEATURES, true, 1e-5);
}

#[test]
fn cnn_word_default_width_gradients() {
    let mut spec = ModelSpec::new(Family::Cnn, Modality::Word, &[], false);
    spec.hyperparams.word_dim = 10;
    check_model(spec, NO_FEATURES, false, 1e-5);
}

#[test]
fn lstm_h75_gradients() {
    let mut spec = ModelSpec::new(Family::Lstm, Modality::Word, &[], false);
    spec.hyperparams.word_dim = 8;
    check_model(spec, NO_FEATURES, false, 1e-5);
}

#[test]
fn hybrid_multitask_gradients() {
    let dims = InputDims { dense: 5, sparse: 9 };
    let sets = [FeatureSet::Wlda, FeatureSet::Dialogue];
    check_model(ModelSpec::new(Family::Cnn, Modality::Char, &sets, true), dims, true, 1e-5);
    let mut spec = ModelSpec::new(Family::Lstm, Modality::Word, &sets, true);
    spec.hyperparams.word_dim = 6;
    check_model(spec, dims, false, 1e-5);
}

#[test]
fn logreg_gradients() {
    let dims = InputDims { dense: 6, sparse: 12 };
    check_model(ModelSpec::logreg(&[FeatureSet::Wlda, FeatureSet::Dialogue]), dims, false, 1e-7);
}

#[test]
fn cnn_char_parameter_count_closed_form() {
    let spec = ModelSpec::new(Family::Cnn, Modality::Char, &[], false);
    let model = build_model(&spec, NO_FEATURES, 0).unwrap();
    // conv: width * in * filters + filters; fc: 64 * 128 + 128; head: 128 * 3 + 3
    let conv1 = 5 * 37 * 64 + 64;
    let conv23 = 5 * 64 * 64 + 64;
    let want = conv1 + 2 * conv23 + (64 * 128 + 128) + (128 * 3 + 3);
    assert_eq!(model.num_params(), want);
    assert_eq!(want, 61_699);
}

#[test]
fn lstm_multitask_has_two_heads_on_shared_lstm() {
    let spec = ModelSpec::new(Family::Lstm, Modality::Word, &[FeatureSet::Wlda, FeatureSet::Dialogue], true);
    let dims = InputDims { dense: 10, sparse: 20 };
    let Model::Neural(m) = build_model(&spec, dims, 0).unwrap() else { panic!() };
    assert!(m.spec_head.is_some());
    assert_eq!(m.rep_dim(), 75 + 10 + 64);
    assert_eq!(m.arg_head.input_dim(), m.spec_head.as_ref().unwrap().input_dim());
    let shared = m.shared_param_names();
    assert_eq!(shared, ["lstm.w", "lstm.u", "lstm.b", "sparse_proj.w", "sparse_proj.b"]);
}

#[test]
fn majority_has_no_parameters_and_predicts_mode() {
    let spec = ModelSpec::majority();
    let mut model = build_model(&spec, NO_FEATURES, 0).unwrap();
    assert_eq!(model.num_params(), 0);
    let labels = [(ArgComponent::Claim, 5), (ArgComponent::Evidence, 3), (ArgComponent::Warrant, 2)];
    let mut ex = Vec::new();
    for (l, n) in labels {
        for i in 0..n {
            ex.push(Example {
                id: format!("{l}#{i}"),
                seq: None,
                features: FeatureVector::default(),
                arg: l,
                spec: Specificity::Low,
            });
        }
    }
    train(&mut model, &ex, &[], &TrainConfig::from_spec(&spec), 0).unwrap();
    for e in &ex {
        assert_eq!(model.predict(e).unwrap().arg(), ArgComponent::Claim);
    }
}

#[test]
fn invalid_specs_rejected() {
    let bad = [
        ModelSpec::new(Family::Majority, Modality::Char, &[], false),
        ModelSpec::new(Family::LogReg, Modality::None, &[], false),
        ModelSpec::new(Family::LogReg, Modality::Word, &[FeatureSet::Wlda], false),
        ModelSpec::new(Family::Cnn, Modality::None, &[], false),
        ModelSpec::new(Family::LogReg, Modality::None, &[FeatureSet::Wlda], true),
    ];
    for s in bad {
        assert!(build_model(&s, InputDims { dense: 3, sparse: 0 }, 0).is_err(), "{s:?}");
    }
}

fn neural(spec: &ModelSpec, dims: InputDims, seed: u64) -> NeuralModel {
    match build_model(spec, dims, seed).unwrap() {
        Model::Neural(m) => m,
        _ => unreachable!(),
    }
}

#[test]
fn multitask_loss_and_gradient_are_sums_of_heads() {
    for family in [Family::Cnn, Family::Lstm] {
        let mut spec = ModelSpec::new(family, Modality::Word, &[], true);
        spec.hyperparams.word_dim = 12;
        let mut rng = seeded(7);
        let batch = random_examples(6, 12, NO_FEATURES, &mut rng);
        let refs: Vec<&Example> = batch.iter().collect();
        let mut m = neural(&spec, NO_FEATURES, 3);
        let grads = |m: &mut NeuralModel, heads| {
            for p in m.params_mut() {
                p.zero_grad();
            }
            let parts = m.loss_grad(&refs, heads, None, None).unwrap();
            let g: Vec<Vec<f64>> = m.params().iter().map(|p| p.grad.data().to_vec()).collect();
            (parts, g)
        };
        let (all, g_all) = grads(&mut m, Heads::ALL);
        let (arg, g_arg) = grads(&mut m, Heads::ARG);
        let (sp, g_spec) = grads(&mut m, Heads::SPEC);
        assert!((all.total() - (arg.arg + sp.spec)).abs() < 1e-12);
        assert_eq!(all.arg, arg.arg);
        assert_eq!(all.spec, sp.spec);
        let shared = m.shared_param_names().len();
        for i in 0..shared {
            for ((a, b), c) in g_all[i].iter().zip(&g_arg[i]).zip(&g_spec[i]) {
                assert!((a - (b + c)).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn hybrid_with_zero_features_matches_plain_model() {
    let mut plain_spec = ModelSpec::new(Family::Cnn, Modality::Char, &[], false);
    small(&mut plain_spec);
    let mut hybrid_spec = plain_spec.clone();
    hybrid_spec.feature_sets = vec![FeatureSet::Wlda];
    let dims = InputDims { dense: 4, sparse: 0 };
    let plain = neural(&plain_spec, NO_FEATURES, 5);
    let mut hybrid = neural(&hybrid_spec, dims, 9);
    // copy the network weights and embed the head with zero feature rows
    hybrid.encoder = plain.encoder.clone();
    let nd = plain.net_dim();
    let mut w = Tensor::zeros(&[nd + 4, 3]);
    w.data_mut()[..nd * 3].copy_from_slice(plain.arg_head.w.value.data());
    hybrid.arg_head.w.value = w;
    hybrid.arg_head.b.value = plain.arg_head.b.value.clone();
    for i in 0..10 {
        let text = format!("move number {i} says something {}", "x".repeat(i));
        let mut ex = Example {
            id: format!("t#{i}"),
            seq: Some(encode_char_seq(&text, 500)),
            features: FeatureVector::default(),
            arg: ArgComponent::Claim,
            spec: Specificity::Low,
        };
        let a = plain.logits(&ex).unwrap().0;
        ex.features.dense = vec![0.0; 4];
        let b = hybrid.logits(&ex).unwrap().0;
        assert_eq!(a, b);
    }
}

#[test]
fn spec_head_does_not_influence_arg_prediction() {
    let mut spec = ModelSpec::new(Family::Lstm, Modality::Char, &[], true);
    spec.hyperparams.hidden = 9;
    let m = neural(&spec, NO_FEATURES, 1);
    let mut ablated = m.clone();
    ablated.spec_head = None;
    for t in ["we think so", "in the text it says 42", "because"] {
        let ex = Example {
            id: "t#0".into(),
            seq: Some(encode_char_seq(t, 500)),
            features: FeatureVector::default(),
            arg: ArgComponent::Claim,
            spec: Specificity::Low,
        };
        let full = m.predict(&ex).unwrap();
        assert!(full.spec_probs.is_some());
        assert_eq!(full.arg_probs, ablated.predict(&ex).unwrap().arg_probs);
        assert!((full.arg_probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!((full.spec_probs.unwrap().iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn argmax_invariant_to_logit_shift_and_batch_order() {
    let mut spec = ModelSpec::new(Family::Cnn, Modality::Word, &[], false);
    spec.hyperparams.word_dim = 5;
    small(&mut spec);
    let mut rng = seeded(4);
    let batch = random_examples(12, 5, NO_FEATURES, &mut rng);
    let model = Model::Neural(neural(&spec, NO_FEATURES, 2));
    let mut shifted = model.clone();
    if let Model::Neural(m) = &mut shifted {
        for b in m.arg_head.b.value.data_mut() {
            *b += 3.7;
        }
    }
    let preds = model.predict_batch(&batch).unwrap();
    for (p, q) in preds.iter().zip(shifted.predict_batch(&batch).unwrap()) {
        assert_eq!(p.arg(), q.arg());
    }
    let mut rev = batch.clone();
    rev.reverse();
    let mut rp = model.predict_batch(&rev).unwrap();
    rp.reverse();
    assert_eq!(preds, rp);
}

fn separable(n: usize) -> Vec<Example> {
    (0..n)
        .map(|i| {
            let c = i % 3;
            let mut sparse = vec![(c, 1.0)];
            sparse.push((3 + i % 2, 0.5));
            Example {
                id: format!("t#{i}"),
                seq: None,
                features: FeatureVector { dense: vec![], sparse },
                arg: ArgComponent::from_index(c).unwrap(),
                spec: Specificity::Med,
            }
        })
        .collect()
}

#[test]
fn logreg_fits_separable_data_perfectly() {
    let spec = ModelSpec::logreg(&[FeatureSet::Dialogue]);
    let dims = InputDims { dense: 0, sparse: 5 };
    let data = separable(60);
    let mut model = build_model(&spec, dims, 0).unwrap();
    train(&mut model, &data, &[], &TrainConfig::from_spec(&spec), 1).unwrap();
    for e in &data {
        assert_eq!(model.predict(e).unwrap().arg(), e.arg);
    }
}

#[test]
fn logreg_l2_shrinks_weights_monotonically() {
    let data = separable(60);
    let dims = InputDims { dense: 0, sparse: 5 };
    let mut norms = Vec::new();
    for l2 in [0.01, 1.0, 100.0] {
        let mut spec = ModelSpec::logreg(&[FeatureSet::Dialogue]);
        spec.hyperparams.l2 = l2;
        spec.hyperparams.max_epochs = 100;
        spec.hyperparams.patience = 100;
        let mut model = build_model(&spec, dims, 0).unwrap();
        train(&mut model, &data, &[], &TrainConfig::from_spec(&spec), 1).unwrap();
        let Model::LogReg(m) = &model else { unreachable!() };
        norms.push(m.linear.w.value.sq_norm().sqrt());
    }
    assert!(norms[0] > norms[1] && norms[1] > norms[2], "{norms:?}");
}

#[test]
fn training_is_deterministic() {
    let mut spec = ModelSpec::new(Family::Lstm, Modality::Word, &[], true);
    spec.hyperparams.word_dim = 6;
    spec.hyperparams.hidden = 8;
    spec.hyperparams.max_epochs = 4;
    let mut rng = seeded(11);
    let data = random_examples(40, 6, NO_FEATURES, &mut rng);
    let run = || {
        let mut m = build_model(&spec, NO_FEATURES, 8).unwrap();
        let h = train(&mut m, &data[..32], &data[32..], &TrainConfig::from_spec(&spec), 8).unwrap();
        let w: Vec<Vec<f64>> = m.params().iter().map(|p| p.value.data().to_vec()).collect();
        (h, w)
    };
    assert_eq!(run(), run());
}

#[test]
fn checkpoint_round_trip_preserves_predictions() {
    let spec = ModelSpec::new(Family::Cnn, Modality::Char, &[FeatureSet::Wlda], true);
    let dims = InputDims { dense: 3, sparse: 0 };
    let mut rng = seeded(3);
    let data = random_examples(5, 37, dims, &mut rng);
    let mut model = build_model(&spec, dims, 1).unwrap();
    if let Model::Neural(m) = &mut model {
        m.prepare(&data);
    }
    let mut buf = Vec::new();
    model.save(&mut buf).unwrap();
    let loaded = Model::load(buf.as_slice()).unwrap();
    for e in &data {
        assert_eq!(model.predict(e).unwrap(), loaded.predict(e).unwrap());
    }
}
