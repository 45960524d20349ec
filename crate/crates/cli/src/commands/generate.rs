use hodge_gp::data::{
    random_complex, sample_hodge_flow, split, synth_forex, Dataset, FlowKind, NoiseLevel,
};
use hodge_gp::io::{read_complex_json, write_complex_json};
use hodge_gp::Result;

use crate::args::{FlowChoice, GenerateArgs, GenerateKind};
use crate::output::out_dir;

fn flow_kind(args: &GenerateArgs) -> FlowKind {
    match args.flow {
        FlowChoice::Gradient => FlowKind::Gradient,
        FlowChoice::Curl => FlowKind::Curl,
        FlowChoice::Harmonic => FlowKind::Harmonic,
        FlowChoice::Mixed => FlowKind::Mixed {
            harmonic: args.weights[0],
            gradient: args.weights[1],
            curl: args.weights[2],
        },
    }
}

pub fn run(args: &GenerateArgs) -> Result<u8> {
    let dir = out_dir(&args.out)?;
    let ds: Dataset = match args.kind {
        GenerateKind::Complex => {
            let sc = random_complex(args.nodes, args.edge_prob, args.fill, args.seed)?;
            write_complex_json(&sc, dir.join("complex.json"))?;
            println!(
                "{} nodes, {} edges, {} triangles",
                sc.num_nodes(),
                sc.num_edges(),
                sc.num_triangles()
            );
            return Ok(0);
        }
        GenerateKind::Flow => {
            let sc = match &args.complex {
                Some(path) => read_complex_json(path, false)?,
                None => random_complex(args.nodes, args.edge_prob, args.fill, args.seed)?,
            };
            let which = flow_kind(args);
            let sigma = match args.noise {
                Some(s) => s,
                None => {
                    args.relative_noise
                        * sample_hodge_flow(&sc, which, args.seed, 0.0)?.signal_std()
                }
            };
            sample_hodge_flow(&sc, which, args.seed, sigma)?
        }
        GenerateKind::Forex => {
            let noise = match args.noise {
                Some(s) => NoiseLevel::Absolute(s),
                None => NoiseLevel::RelativeToSignal(args.relative_noise),
            };
            synth_forex(
                args.currencies,
                args.pair_prob,
                args.potential_scale,
                noise,
                args.seed,
            )?
        }
    };
    let ds = split(&ds, args.train_ratio, args.seed)?;
    ds.write_bundle(&dir)?;
    println!(
        "{} edges ({} train, {} test), noise sd {:.3e}, written to {}",
        ds.complex.num_edges(),
        ds.train_indices().len(),
        ds.test_indices().len(),
        ds.noise_level,
        dir.display()
    );
    Ok(0)
}
