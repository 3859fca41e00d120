//! Regenerate the synthetic datasets bundled under `testdata/`.
//!
//! Run from the repository root:
//!
//! ```sh
//! cargo run -p lpbench --example make_testdata
//! ```
//!
//! Both graphs are deterministic, so rerunning reproduces the shipped files
//! byte for byte. `sbm_small` is a two-block stochastic block model with a
//! strong community structure (the regime where neighborhood heuristics
//! shine); `relational_small` is a tripartite entity/item/group graph where
//! connected nodes share no neighbors (the regime where they fail).

use std::path::Path;

use lpbench::gen;

fn main() {
    let out = Path::new("testdata");
    std::fs::create_dir_all(out).expect("create testdata dir");

    let sbm = gen::sbm(&[60, 60], 0.12, 0.01, 1);
    sbm.write_edge_list_path(&out.join("sbm_small.edges")).expect("write sbm_small");
    println!("sbm_small.edges: n={} m={}", sbm.n(), sbm.edge_count());

    let relational = gen::relational(90, 24, 6, 4, 2);
    relational
        .write_edge_list_path(&out.join("relational_small.edges"))
        .expect("write relational_small");
    println!("relational_small.edges: n={} m={}", relational.n(), relational.edge_count());
}
