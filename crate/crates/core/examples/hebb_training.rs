// Train two membership neurons with the Hebb rule and watch epochs only
// rescale the weights.
//
// ```bash
// cargo run -p hebbocr --example hebb_training
// ```

use hebbocr::hebbnet::{KnowledgeBase, Regime, TrainingSample};
use hebbocr::imagegrid::{FeatureVector, GridDims};
use hebbocr::Label;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let a = Label::new('A')?;
    let b = Label::new('B')?;
    let samples = [
        TrainingSample::new(a, FeatureVector::new(vec![1, 1])?),
        TrainingSample::new(b, FeatureVector::new(vec![1, -1])?),
    ];
    let zero = KnowledgeBase::init_zero(&[a, b], GridDims::new(1, 2)?, Regime::OneVsRest)?;

    for epochs in [1, 3] {
        let kb = zero.train(&samples, epochs)?;
        println!("after {epochs} epoch(s):");
        for n in kb.neurons() {
            println!("  {} weights {:?} bias {}", n.label, n.weights, n.bias);
        }
        for s in &samples {
            let d = kb.classify(&s.input)?;
            println!("  probe {:?} -> {:?}, scores {:?}", s.input.values(), d.outcome, d.net_inputs);
        }
    }

    let positive = KnowledgeBase::init_zero(&[a, b], GridDims::new(1, 2)?, Regime::PositiveOnly)?.train(&samples, 1)?;
    println!("positive-only neuron A: {:?}", positive.neuron(a).map(|n| &n.weights));
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
