use hodge_gp::{eigendecompose, Result};

use super::load_complex;
use crate::args::SpectrumArgs;
use crate::output::{csv_writer, out_dir, write_json};

pub fn run(args: &SpectrumArgs) -> Result<u8> {
    let sc = load_complex(&args.complex)?;
    let s = eigendecompose(&sc, args.truncate)?;
    let dir = out_dir(&args.out)?;
    let (values, _, blocks) = s.concatenated();
    let mut w = csv_writer(&dir.join("spectrum.csv"))?;
    w.write_record(["lambda", "block"])?;
    for (l, b) in values.iter().zip(&blocks) {
        w.write_record([l.to_string(), b.short().to_string()])?;
    }
    w.flush()?;
    write_json(&dir.join("spectrum.json"), &s.summary())?;
    let (nh, ng, nc) = s.dims();
    println!("harmonic {nh}  gradient {ng}  curl {nc}");
    Ok(0)
}
