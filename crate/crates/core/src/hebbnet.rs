//! A bank of single-output membership neurons trained with the Hebb rule.
//!
//! Each [`ClusterNeuron`] answers "does this pattern belong to my class?".
//! Training is the purely additive update
//!
//! ```text
//! K(new) = K(old) + input × target
//! ```
//!
//! applied to every weight, with the bias treated as the weight of a
//! constant `+1` input. All arithmetic is exact integer, so training is
//! order independent and repeating an epoch only scales the weights: more
//! epochs never change a decision.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::imagegrid::{FeatureVector, GridDims};
use crate::Label;

/// Version written to and expected from knowledge-base files.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HebbError {
    #[error("input length {actual} does not match neuron length {expected}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("label {0} has no neuron in this knowledge base")]
    UnknownLabel(Label),
    #[error("label {0} appears more than once")]
    DuplicateLabel(Label),
    #[error("knowledge base needs at least one label")]
    NoLabels,
    #[error("target must be +1 or -1, got {0}")]
    BadTarget(i8),
    #[error("epochs must be at least 1")]
    ZeroEpochs,
}

/// How targets are assigned to neurons during training.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Regime {
    /// Every neuron sees every sample: `+1` for its own class, `-1` otherwise.
    #[default]
    OneVsRest,
    /// A neuron only sees its own class's samples, with target `+1`.
    PositiveOnly,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::OneVsRest => "ONE_VS_REST",
            Regime::PositiveOnly => "POSITIVE_ONLY",
        }
    }

    /// Target for a neuron of class `neuron` on a sample of class `sample`,
    /// or `None` when the sample is skipped.
    pub fn target(self, neuron: Label, sample: Label) -> Option<i8> {
        match (self, neuron == sample) {
            (_, true) => Some(1),
            (Regime::OneVsRest, false) => Some(-1),
            (Regime::PositiveOnly, false) => None,
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Regime {
    type Err = String;

    /// Accepts the file spelling (`ONE_VS_REST`) and the flag spelling
    /// (`one-vs-rest`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ONE_VS_REST" | "one-vs-rest" => Ok(Regime::OneVsRest),
            "POSITIVE_ONLY" | "positive-only" => Ok(Regime::PositiveOnly),
            other => Err(format!("unknown regime {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClusterNeuron {
    pub label: Label,
    pub weights: Vec<i64>,
    pub bias: i64,
}

impl ClusterNeuron {
    pub fn zero(label: Label, n: usize) -> Self {
        ClusterNeuron { label, weights: vec![0; n], bias: 0 }
    }

    fn check_len(&self, input: &FeatureVector) -> Result<(), HebbError> {
        if input.len() != self.weights.len() {
            return Err(HebbError::DimensionMismatch {
                expected: self.weights.len(),
                actual: input.len(),
            });
        }
        Ok(())
    }

    /// One application of the Hebb rule: `w[i] += input[i] × target`,
    /// `bias += target`.
    pub fn hebb_update(&self, input: &FeatureVector, target: i8) -> Result<ClusterNeuron, HebbError> {
        let mut next = self.clone();
        next.hebb_update_in_place(input, target)?;
        Ok(next)
    }

    fn hebb_update_in_place(&mut self, input: &FeatureVector, target: i8) -> Result<(), HebbError> {
        if target != 1 && target != -1 {
            return Err(HebbError::BadTarget(target));
        }
        self.check_len(input)?;
        let t = target as i64;
        for (w, &x) in self.weights.iter_mut().zip(input.values()) {
            *w += x as i64 * t;
        }
        self.bias += t;
        Ok(())
    }

    /// `bias + Σ w[i] × input[i]`.
    pub fn net_input(&self, input: &FeatureVector) -> Result<i64, HebbError> {
        self.check_len(input)?;
        Ok(self.bias
            + self
                .weights
                .iter()
                .zip(input.values())
                .map(|(&w, &x)| w * x as i64)
                .sum::<i64>())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainingSample {
    pub label: Label,
    pub input: FeatureVector,
}

impl TrainingSample {
    pub fn new(label: Label, input: FeatureVector) -> Self {
        TrainingSample { label, input }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Recognized(Label),
    Unrecognized,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub outcome: Outcome,
    /// Score of every neuron, keyed by label.
    pub net_inputs: BTreeMap<Label, i64>,
}

/// Trained neurons plus the metadata needed to interpret them.
///
/// Values are immutable once built; training returns a new knowledge base.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KnowledgeBase {
    grid: GridDims,
    regime: Regime,
    epochs_trained: u64,
    // sorted by label, labels unique
    neurons: Vec<ClusterNeuron>,
    format_version: u32,
}

impl KnowledgeBase {
    pub fn init_zero(labels: &[Label], grid: GridDims, regime: Regime) -> Result<Self, HebbError> {
        let neurons = labels.iter().map(|&l| ClusterNeuron::zero(l, grid.len())).collect();
        KnowledgeBase::from_parts(grid, regime, 0, neurons)
    }

    /// Assembles a knowledge base from stored parts, checking label
    /// uniqueness and weight lengths. Neurons are reordered by label.
    pub fn from_parts(
        grid: GridDims,
        regime: Regime,
        epochs_trained: u64,
        mut neurons: Vec<ClusterNeuron>,
    ) -> Result<Self, HebbError> {
        if neurons.is_empty() {
            return Err(HebbError::NoLabels);
        }
        neurons.sort_by_key(|n| n.label);
        if let Some(w) = neurons.windows(2).find(|w| w[0].label == w[1].label) {
            return Err(HebbError::DuplicateLabel(w[0].label));
        }
        if let Some(n) = neurons.iter().find(|n| n.weights.len() != grid.len()) {
            return Err(HebbError::DimensionMismatch {
                expected: grid.len(),
                actual: n.weights.len(),
            });
        }
        Ok(KnowledgeBase {
            grid,
            regime,
            epochs_trained,
            neurons,
            format_version: FORMAT_VERSION,
        })
    }

    pub fn grid(&self) -> GridDims {
        self.grid
    }

    pub fn feature_len(&self) -> usize {
        self.grid.len()
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn epochs_trained(&self) -> u64 {
        self.epochs_trained
    }

    pub fn format_version(&self) -> u32 {
        self.format_version
    }

    pub fn neurons(&self) -> &[ClusterNeuron] {
        &self.neurons
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> + '_ {
        self.neurons.iter().map(|n| n.label)
    }

    pub fn neuron(&self, label: Label) -> Option<&ClusterNeuron> {
        self.neurons
            .binary_search_by_key(&label, |n| n.label)
            .ok()
            .map(|i| &self.neurons[i])
    }

    fn check_input(&self, input: &FeatureVector) -> Result<(), HebbError> {
        if input.len() != self.grid.len() {
            return Err(HebbError::DimensionMismatch {
                expected: self.grid.len(),
                actual: input.len(),
            });
        }
        Ok(())
    }

    /// One pass of the Hebb rule over `samples` for every neuron.
    ///
    /// All samples are validated before any update is applied.
    pub fn train_epoch(&self, samples: &[TrainingSample]) -> Result<KnowledgeBase, HebbError> {
        for s in samples {
            self.check_input(&s.input)?;
            if self.neuron(s.label).is_none() {
                return Err(HebbError::UnknownLabel(s.label));
            }
        }
        let mut next = self.clone();
        for neuron in &mut next.neurons {
            for s in samples {
                if let Some(target) = self.regime.target(neuron.label, s.label) {
                    neuron.hebb_update_in_place(&s.input, target)?;
                }
            }
        }
        next.epochs_trained += 1;
        Ok(next)
    }

    /// Runs [`train_epoch`](Self::train_epoch) `epochs` times. Since the
    /// rule is linear, the weight change is exactly `epochs` times that of
    /// a single epoch.
    pub fn train(&self, samples: &[TrainingSample], epochs: u64) -> Result<KnowledgeBase, HebbError> {
        if epochs == 0 {
            return Err(HebbError::ZeroEpochs);
        }
        let mut kb = self.train_epoch(samples)?;
        for _ in 1..epochs {
            kb = kb.train_epoch(samples)?;
        }
        Ok(kb)
    }

    /// Scores `input` against every neuron.
    ///
    /// The input is recognized as class `l` only when neuron `l` has the
    /// unique maximum score and that score is strictly positive; a
    /// non-positive maximum or a tie at the top is a rejection.
    pub fn classify(&self, input: &FeatureVector) -> Result<Decision, HebbError> {
        self.check_input(input)?;
        let mut net_inputs = BTreeMap::new();
        let mut best: Option<(Label, i64)> = None;
        let mut tied = false;
        for n in &self.neurons {
            let score = n.net_input(input)?;
            net_inputs.insert(n.label, score);
            match best {
                Some((_, top)) if score < top => {}
                Some((_, top)) if score == top => tied = true,
                _ => {
                    best = Some((n.label, score));
                    tied = false;
                }
            }
        }
        let outcome = match best {
            Some((label, top)) if top > 0 && !tied => Outcome::Recognized(label),
            _ => Outcome::Unrecognized,
        };
        Ok(Decision { outcome, net_inputs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn l(c: char) -> Label {
        Label::new(c).unwrap()
    }

    fn fv(v: &[i8]) -> FeatureVector {
        FeatureVector::new(v.to_vec()).unwrap()
    }

    fn line(n: usize) -> GridDims {
        GridDims::new(1, n).unwrap()
    }

    #[test]
    fn init_zero_builds_zero_neurons() {
        let kb = KnowledgeBase::init_zero(&[l('A')], GridDims::new(2, 2).unwrap(), Regime::OneVsRest).unwrap();
        assert_eq!(kb.neurons(), &[ClusterNeuron { label: l('A'), weights: vec![0; 4], bias: 0 }]);
        assert_eq!(kb.epochs_trained(), 0);
        let kb = KnowledgeBase::init_zero(&[l('B'), l('A')], line(2), Regime::OneVsRest).unwrap();
        assert_eq!(kb.labels().collect::<Vec<_>>(), vec![l('A'), l('B')]);
        assert!(kb.neurons().iter().all(|n| n.weights == [0, 0] && n.bias == 0));
        assert_eq!(
            KnowledgeBase::init_zero(&[l('A'), l('A')], line(2), Regime::OneVsRest),
            Err(HebbError::DuplicateLabel(l('A')))
        );
        assert_eq!(KnowledgeBase::init_zero(&[], line(2), Regime::OneVsRest), Err(HebbError::NoLabels));
    }

    #[test]
    fn hebb_update_examples() {
        let zero = ClusterNeuron::zero(l('A'), 3);
        let up = zero.hebb_update(&fv(&[1, -1, 1]), 1).unwrap();
        assert_eq!((up.weights.as_slice(), up.bias), (&[1, -1, 1][..], 1));
        let down = zero.hebb_update(&fv(&[1, -1, 1]), -1).unwrap();
        assert_eq!((down.weights.as_slice(), down.bias), (&[-1, 1, -1][..], -1));
        // [1,-1,1]·(+1) + [1,1,-1]·(-1) = [0,-2,2]; bias 1 - 1 = 0
        let two = up.hebb_update(&fv(&[1, 1, -1]), -1).unwrap();
        assert_eq!((two.weights.as_slice(), two.bias), (&[0, -2, 2][..], 0));
        assert_eq!(
            zero.hebb_update(&fv(&[1, 1]), 1),
            Err(HebbError::DimensionMismatch { expected: 3, actual: 2 })
        );
        assert_eq!(zero.hebb_update(&fv(&[1, 1, 1]), 0), Err(HebbError::BadTarget(0)));
    }

    #[test]
    fn positive_only_single_sample() {
        let x = fv(&[1, -1, -1, 1]);
        let kb = KnowledgeBase::init_zero(&[l('A')], line(4), Regime::PositiveOnly).unwrap();
        let kb = kb.train_epoch(&[TrainingSample::new(l('A'), x.clone())]).unwrap();
        let a = kb.neuron(l('A')).unwrap();
        assert_eq!(a.weights, vec![1, -1, -1, 1]);
        assert_eq!(a.bias, 1);
        assert_eq!(kb.epochs_trained(), 1);
    }

    fn two_class() -> (KnowledgeBase, Vec<TrainingSample>) {
        let kb = KnowledgeBase::init_zero(&[l('A'), l('B')], line(2), Regime::OneVsRest).unwrap();
        let samples = vec![
            TrainingSample::new(l('A'), fv(&[1, 1])),
            TrainingSample::new(l('B'), fv(&[1, -1])),
        ];
        (kb, samples)
    }

    #[test]
    fn one_vs_rest_two_classes() {
        let (kb, samples) = two_class();
        let kb = kb.train_epoch(&samples).unwrap();
        assert_eq!(kb.neuron(l('A')).unwrap().weights, vec![0, 2]);
        assert_eq!(kb.neuron(l('A')).unwrap().bias, 0);
        assert_eq!(kb.neuron(l('B')).unwrap().weights, vec![0, -2]);
        assert_eq!(kb.neuron(l('B')).unwrap().bias, 0);
    }

    #[test]
    fn empty_epoch_only_counts() {
        let (kb, _) = two_class();
        let next = kb.train_epoch(&[]).unwrap();
        assert_eq!(next.neurons(), kb.neurons());
        assert_eq!(next.epochs_trained(), 1);
    }

    #[test]
    fn train_epoch_errors_leave_nothing_half_applied() {
        let (kb, mut samples) = two_class();
        samples.push(TrainingSample::new(l('C'), fv(&[1, 1])));
        assert_eq!(kb.train_epoch(&samples), Err(HebbError::UnknownLabel(l('C'))));
        let bad = [TrainingSample::new(l('A'), fv(&[1, 1, 1]))];
        assert!(matches!(kb.train_epoch(&bad), Err(HebbError::DimensionMismatch { .. })));
        assert_eq!(kb.train(&[], 0), Err(HebbError::ZeroEpochs));
    }

    #[test]
    fn train_scales_with_epochs() {
        let (kb, samples) = two_class();
        assert_eq!(kb.train(&samples, 1).unwrap(), kb.train_epoch(&samples).unwrap());
        let three = kb.train(&samples, 3).unwrap();
        assert_eq!(three.neuron(l('A')).unwrap().weights, vec![0, 6]);
        assert_eq!(three.epochs_trained(), 3);
    }

    #[test]
    fn net_input_examples() {
        let x = fv(&[1, -1, 1, 1]);
        assert_eq!(ClusterNeuron::zero(l('A'), 4).net_input(&x), Ok(0));
        let own = ClusterNeuron { label: l('A'), weights: vec![1, -1, 1, 1], bias: 0 };
        assert_eq!(own.net_input(&x), Ok(4));
        let n = ClusterNeuron { label: l('A'), weights: vec![0, 2], bias: 0 };
        assert_eq!(n.net_input(&fv(&[1, -1])), Ok(-2));
    }

    #[test]
    fn classify_rejects_zero_and_ties() {
        let (kb, samples) = two_class();
        let d = kb.classify(&fv(&[1, 1])).unwrap();
        assert_eq!(d.outcome, Outcome::Unrecognized);
        assert_eq!(d.net_inputs.len(), 2);
        assert!(d.net_inputs.values().all(|&s| s == 0));

        let x = fv(&[1, 1]);
        let a = ClusterNeuron { label: l('A'), weights: vec![1, 1], bias: 0 };
        let b = ClusterNeuron { label: l('B'), ..a.clone() };
        let twins = KnowledgeBase::from_parts(line(2), Regime::PositiveOnly, 1, vec![a, b]).unwrap();
        let d = twins.classify(&x).unwrap();
        assert_eq!(d.outcome, Outcome::Unrecognized);
        assert_eq!(d.net_inputs[&l('A')], 2);

        let trained = kb.train(&samples, 1).unwrap();
        assert_eq!(trained.classify(&fv(&[1, 1])).unwrap().outcome, Outcome::Recognized(l('A')));
        assert_eq!(trained.classify(&fv(&[1, -1])).unwrap().outcome, Outcome::Recognized(l('B')));
        assert!(trained.classify(&fv(&[1])).is_err());
    }

    // Sylvester construction; rows are mutually orthogonal.
    fn hadamard(n: usize) -> Vec<Vec<i8>> {
        let mut h = vec![vec![1i8]];
        while h.len() < n {
            let m = h.len();
            let mut next = vec![vec![0i8; 2 * m]; 2 * m];
            for i in 0..m {
                for j in 0..m {
                    next[i][j] = h[i][j];
                    next[i][j + m] = h[i][j];
                    next[i + m][j] = h[i][j];
                    next[i + m][j + m] = -h[i][j];
                }
            }
            h = next;
        }
        h
    }

    #[test]
    fn orthogonal_recall_one_vs_rest() {
        let rows = hadamard(64);
        let labels: Vec<Label> = Label::all().collect();
        let samples: Vec<_> = labels
            .iter()
            .zip(&rows)
            .map(|(&lab, r)| TrainingSample::new(lab, fv(r)))
            .collect();
        let kb = KnowledgeBase::init_zero(&labels, GridDims::new(8, 8).unwrap(), Regime::OneVsRest)
            .unwrap()
            .train(&samples, 1)
            .unwrap();
        for s in &samples {
            let d = kb.classify(&s.input).unwrap();
            assert_eq!(d.outcome, Outcome::Recognized(s.label));
            for (&lab, &score) in &d.net_inputs {
                assert_eq!(score, if lab == s.label { 14 } else { -114 });
            }
        }
    }

    #[test]
    fn orthogonal_recall_positive_only() {
        let rows = hadamard(64);
        let labels: Vec<Label> = Label::all().collect();
        let samples: Vec<_> = labels
            .iter()
            .zip(&rows)
            .map(|(&lab, r)| TrainingSample::new(lab, fv(r)))
            .collect();
        let kb = KnowledgeBase::init_zero(&labels, GridDims::new(8, 8).unwrap(), Regime::PositiveOnly)
            .unwrap()
            .train(&samples, 1)
            .unwrap();
        for s in &samples {
            let d = kb.classify(&s.input).unwrap();
            assert_eq!(d.outcome, Outcome::Recognized(s.label));
            for (&lab, &score) in &d.net_inputs {
                assert_eq!(score, if lab == s.label { 65 } else { 1 });
            }
        }
    }

    /// (input length, labels, samples as (label index, ink mask))
    type Instance = (usize, Vec<Label>, Vec<(usize, Vec<bool>)>);

    fn arb_instance() -> impl Strategy<Value = Instance> {
        (1usize..=16, 1usize..=5).prop_flat_map(|(n, k)| {
            let labels: Vec<Label> = Label::all().take(k).collect();
            let samples = proptest::collection::vec(
                (0..k, proptest::collection::vec(any::<bool>(), n)),
                0..12,
            );
            (Just(n), Just(labels), samples)
        })
    }

    fn build(n: usize, labels: &[Label], raw: &[(usize, Vec<bool>)]) -> (GridDims, Vec<TrainingSample>) {
        let samples = raw
            .iter()
            .map(|(k, bits)| {
                let v = bits.iter().map(|&b| if b { 1 } else { -1 }).collect();
                TrainingSample::new(labels[*k], FeatureVector::new(v).unwrap())
            })
            .collect();
        (line(n), samples)
    }

    proptest! {
        #[test]
        fn order_does_not_matter((n, labels, raw) in arb_instance(), pos_only in any::<bool>()) {
            let regime = if pos_only { Regime::PositiveOnly } else { Regime::OneVsRest };
            let (grid, samples) = build(n, &labels, &raw);
            let kb = KnowledgeBase::init_zero(&labels, grid, regime).unwrap();
            let mut reversed = samples.clone();
            reversed.reverse();
            prop_assert_eq!(kb.train(&samples, 2).unwrap(), kb.train(&reversed, 2).unwrap());
        }

        #[test]
        fn more_epochs_never_change_decisions(
            (n, labels, raw) in arb_instance(),
            e in 2u64..6,
            probe in proptest::collection::vec(any::<bool>(), 16),
        ) {
            let (grid, samples) = build(n, &labels, &raw);
            let kb = KnowledgeBase::init_zero(&labels, grid, Regime::OneVsRest).unwrap();
            let one = kb.train(&samples, 1).unwrap();
            let many = kb.train(&samples, e).unwrap();
            for (a, b) in one.neurons().iter().zip(many.neurons()) {
                prop_assert_eq!(b.bias, a.bias * e as i64);
                for (&wa, &wb) in a.weights.iter().zip(&b.weights) {
                    prop_assert_eq!(wb, wa * e as i64);
                }
            }
            let x = FeatureVector::new(probe[..n].iter().map(|&b| if b { 1 } else { -1 }).collect()).unwrap();
            let d1 = one.classify(&x).unwrap();
            let de = many.classify(&x).unwrap();
            prop_assert_eq!(d1.outcome, de.outcome);
            if let Outcome::Recognized(lab) = de.outcome {
                let top = de.net_inputs[&lab];
                prop_assert!(top > 0);
                prop_assert!(de.net_inputs.iter().all(|(&k, &s)| k == lab || s < top));
            }
        }
    }
}
