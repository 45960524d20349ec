pub mod decompose;
pub mod diffuse;
pub mod fit_predict;
pub mod generate;
pub mod sample;
pub mod spectrum;

use std::path::Path;

use hodge_gp::io::{read_cochain_csv, read_complex_json};
use hodge_gp::{Cochain, Degree, Result, SimplicialComplex2};

use crate::args::ComplexArgs;

pub fn load_complex(args: &ComplexArgs) -> Result<SimplicialComplex2> {
    let sc = read_complex_json(&args.complex, args.infer_triangles)?;
    log::info!(
        "complex: {} nodes, {} edges, {} triangles",
        sc.num_nodes(),
        sc.num_edges(),
        sc.num_triangles()
    );
    Ok(sc)
}

pub fn load_edge_flow(sc: &SimplicialComplex2, path: &Path) -> Result<Cochain> {
    let (values, observed) = read_cochain_csv(sc, Degree::Edge, path)?;
    let missing = observed.iter().filter(|o| !**o).count();
    if missing > 0 {
        log::warn!(
            "{missing} edges absent from {}; treated as zero",
            path.display()
        );
    }
    sc.cochain(Degree::Edge, values)
}
