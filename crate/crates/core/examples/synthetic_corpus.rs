// Render letter templates, distort them reproducibly, and write a small
// corpus with its manifest.
//
// ```bash
// cargo run -p hebbocr --example synthetic_corpus
// ```

use hebbocr::glyphgen::{distort, generate_dataset, render_glyph, template, DistortionParams, Split};
use hebbocr::Label;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let params = DistortionParams { flip_probability: 0.05, max_shift: 1, seed: 42, ..Default::default() };
    let g = Label::new('g')?;
    let clean = render_glyph(template(g), params.canvas)?;
    print!("{g} on a {} canvas:\n{clean}", params.canvas);
    for set in 0..2 {
        let stream = Split::Train.stream_index(set, g);
        let noisy = distort(&clean, &params, stream);
        print!("training set {set} (stream {stream}):\n{noisy}");
        assert_eq!(noisy, distort(&clean, &params, stream));
    }

    let dir = tempfile::tempdir()?;
    let manifest = generate_dataset(2, 1, &params, dir.path(), false)?;
    println!(
        "wrote {} training and {} test files under {}",
        manifest.split(Split::Train).count(),
        manifest.split(Split::Test).count(),
        dir.path().display()
    );
    for line in manifest.to_text().lines().take(4) {
        println!("  {line}");
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
