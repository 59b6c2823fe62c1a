// Store a knowledge base, load it back, detect corruption, and diff it
// against a further-trained version.
//
// ```bash
// cargo run -p hebbocr --example knowledge_base
// ```

use hebbocr::hebbnet::{KnowledgeBase, Regime, TrainingSample};
use hebbocr::imagegrid::{FeatureVector, GridDims};
use hebbocr::kbstore::{diff_kb, load_kb, save_kb, KbError};
use hebbocr::Label;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let a = Label::new('A')?;
    let z = Label::new('z')?;
    let samples = [
        TrainingSample::new(a, FeatureVector::new(vec![1, -1, -1, 1])?),
        TrainingSample::new(z, FeatureVector::new(vec![-1, 1, 1, 1])?),
    ];
    let kb = KnowledgeBase::init_zero(&[a, z], GridDims::new(2, 2)?, Regime::PositiveOnly)?.train(&samples, 1)?;

    let mut file = Vec::new();
    let n = save_kb(&kb, &mut file)?;
    println!("saved {n} bytes:\n{}", String::from_utf8_lossy(&file));
    assert_eq!(load_kb(file.as_slice())?, kb);

    let tampered = String::from_utf8(file.clone())?.replacen("bias 1", "bias 7", 1);
    match load_kb(tampered.as_bytes()) {
        Err(e @ KbError::ChecksumMismatch { .. }) => println!("tampered copy rejected: {e}"),
        other => return Err(format!("tampering went unnoticed: {other:?}").into()),
    }

    let more = kb.train_epoch(&samples[..1])?;
    print!("after one more epoch on {a}:\n{}", diff_kb(&kb, &more));
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
