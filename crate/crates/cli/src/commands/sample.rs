use std::fs;

use hodge_gp::gp::{sample_prior, GpModel};
use hodge_gp::{Error, KernelContext, Result};

use super::load_complex;
use crate::args::SampleArgs;
use crate::output::{csv_writer, out_dir};

pub fn run(args: &SampleArgs) -> Result<u8> {
    let sc = load_complex(&args.complex)?;
    let spec = match &args.checkpoint {
        Some(path) => serde_json::from_str::<GpModel>(&fs::read_to_string(path)?)?.kernel_spec,
        None => args.kernel.spec(),
    };
    if !spec.is_edge_kernel() {
        return Err(Error::Usage("sampling needs an edge kernel".into()));
    }
    let ctx = KernelContext::new(sc.clone(), args.kernel.truncate)?;
    let samples = sample_prior(&ctx, &spec, args.seed, args.count)?;

    let dir = out_dir(&args.out)?;
    let mut w = csv_writer(&dir.join("samples.csv"))?;
    let mut header = vec!["simplex".to_string()];
    header.extend((0..args.count).map(|k| format!("sample_{k}")));
    w.write_record(&header)?;
    for e in 0..sc.num_edges() {
        let mut row = vec![sc.edge_label(e)];
        row.extend(samples.row(e).iter().map(|v| v.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    println!("{} samples on {} edges", args.count, sc.num_edges());
    Ok(0)
}
