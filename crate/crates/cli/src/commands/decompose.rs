use hodge_gp::spectral::HodgeProjector;
use hodge_gp::{HodgeBlock, Result};
use serde::Serialize;

use super::{load_complex, load_edge_flow};
use crate::args::DecomposeArgs;
use crate::output::{csv_writer, out_dir, write_json};

#[derive(Serialize)]
struct EnergyReport {
    /// Squared norms of the harmonic, gradient and curl parts.
    energy: [f64; 3],
    /// The same, as fractions of the total.
    fractions: [f64; 3],
    /// `‖f - (f_H + f_G + f_C)‖ / ‖f‖`.
    relative_reconstruction_error: f64,
}

pub fn run(args: &DecomposeArgs) -> Result<u8> {
    let sc = load_complex(&args.complex)?;
    let f = load_edge_flow(&sc, &args.flow)?;
    let parts = HodgeProjector::new(&sc)?.decompose(&f)?;
    let (h, g, c) = (
        parts.harmonic.values(),
        parts.gradient.values(),
        parts.curl.values(),
    );
    let recon = h + g + c;

    let dir = out_dir(&args.out)?;
    let mut w = csv_writer(&dir.join("components.csv"))?;
    w.write_record([
        "simplex",
        "input",
        "harmonic",
        "gradient",
        "curl",
        "reconstruction",
    ])?;
    for e in 0..sc.num_edges() {
        w.write_record([
            sc.edge_label(e),
            f.values()[e].to_string(),
            h[e].to_string(),
            g[e].to_string(),
            c[e].to_string(),
            recon[e].to_string(),
        ])?;
    }
    w.flush()?;

    let norm = f.values().norm();
    let report = EnergyReport {
        energy: HodgeBlock::ALL.map(|b| parts.component(b).values().norm_squared()),
        fractions: parts.energy_fractions(),
        relative_reconstruction_error: if norm > 0.0 {
            (&recon - f.values()).norm() / norm
        } else {
            0.0
        },
    };
    write_json(&dir.join("energy.json"), &report)?;
    let [fh, fg, fc] = report.fractions;
    println!("energy fractions  harmonic {fh:.6}  gradient {fg:.6}  curl {fc:.6}");
    Ok(0)
}
