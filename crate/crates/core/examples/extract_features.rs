// Parse a plain PNM image and turn it into a bipolar feature vector.
//
// ```bash
// cargo run -p hebbocr --example extract_features
// ```

use hebbocr::imagegrid::{binarize, crop_to_bounding_box, parse_pnm, resample_to_grid, ExtractionConfig, GridDims};

// A small "T" on a graymap with a light speckle the threshold ignores.
const LETTER_T: &str = "P2
# 7x6 graymap
7 6
255
255 255 255 255 255 255 255
255  10  12   8  15  11 255
255 255 255  20 255 200 255
255 255 255  14 255 255 255
255 255 255   9 255 255 255
255 255 255 255 255 255 255
";

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let img = parse_pnm(LETTER_T.as_bytes())?;
    println!("parsed {}x{} image, maxval {}", img.width(), img.height(), img.maxval());

    let grid = binarize(&img, 0.5);
    print!("binarized:\n{grid}");
    let cropped = crop_to_bounding_box(&grid)?;
    print!("cropped to ink:\n{cropped}");
    let small = resample_to_grid(&cropped, GridDims::new(6, 6)?);
    print!("resampled to 6x6:\n{small}");

    let cfg = ExtractionConfig { grid: GridDims::new(6, 6)?, threshold: 0.5 };
    let features = cfg.extract(&img)?;
    println!("feature vector ({} values): {:?}", features.len(), features.values());
    assert_eq!(features.to_grid(cfg.grid)?, small);
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
