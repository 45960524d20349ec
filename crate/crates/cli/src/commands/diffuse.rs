use hodge_gp::data::rng;
use hodge_gp::spectral::edge_diffusion;
use hodge_gp::{eigendecompose, Degree, Error, Result};
use nalgebra::DVector;
use rand_distr::{Distribution, StandardNormal};

use super::{load_complex, load_edge_flow};
use crate::args::DiffuseArgs;
use crate::output::{csv_writer, out_dir};

/// Stream for the random initial condition.
const INITIAL_STREAM: u64 = 0x0D1F;

/// `0` followed by `steps` geometrically spaced times ending at `t_max`.
fn geometric_grid(t_max: f64, steps: usize) -> Vec<f64> {
    let t0 = t_max * 1e-4;
    let mut out = vec![0.0];
    for k in 0..steps {
        let a = if steps == 1 {
            1.0
        } else {
            k as f64 / (steps - 1) as f64
        };
        out.push(t0 * (t_max / t0).powf(a));
    }
    out
}

pub fn run(args: &DiffuseArgs) -> Result<u8> {
    let sc = load_complex(&args.complex)?;
    let s = eigendecompose(&sc, None)?;
    let phi0 = match &args.flow {
        Some(path) => load_edge_flow(&sc, path)?,
        None => {
            let mut r = rng(args.seed, INITIAL_STREAM);
            let v = DVector::from_fn(sc.num_edges(), |_, _| StandardNormal.sample(&mut r));
            sc.cochain(Degree::Edge, v)?
        }
    };
    let times = match &args.times {
        Some(t) => t.clone(),
        None => {
            let t_max = match args.t_max {
                Some(t) => t,
                None => {
                    let lmin = s.lambda_min_positive().ok_or_else(|| {
                        Error::Usage("the complex has no positive eigenvalue; pass --t-max".into())
                    })?;
                    1e3 / (lmin * args.mu.min(args.gamma))
                }
            };
            geometric_grid(t_max, args.steps)
        }
    };
    if times.iter().any(|t| !(*t >= 0.0)) {
        return Err(Error::Usage("diffusion times must be >= 0".into()));
    }

    let uh = &s.harmonic.vectors;
    let scale = phi0.values().norm().max(f64::MIN_POSITIVE);
    let dir = out_dir(&args.out)?;
    let mut w = csv_writer(&dir.join("trajectory.csv"))?;
    let mut header = vec!["t".to_string(), "harmonic_residual".to_string()];
    header.extend((0..sc.num_edges()).map(|e| sc.edge_label(e)));
    w.write_record(&header)?;
    let mut last = f64::NAN;
    for &t in &times {
        let phi = edge_diffusion(&s, &phi0, args.mu, args.gamma, t)?;
        let off = phi.values() - uh * (uh.transpose() * phi.values());
        last = off.norm() / scale;
        let mut row = vec![t.to_string(), last.to_string()];
        row.extend(phi.values().iter().map(|v| v.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    println!(
        "{} time points, final harmonic residual {last:.3e}",
        times.len()
    );
    Ok(0)
}
