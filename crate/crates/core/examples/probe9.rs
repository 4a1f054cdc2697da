use lslab_core::construction::*;
use lslab_core::solver::*;

fn main() {
    let opts = SolverOptions { dx: 0.005, restarts: 4, ..Default::default() };
    let comps = build_component_sequence(3, 0.02, 4.6, &opts).unwrap();
    let m = assemble_counterexample(&comps, 3).unwrap();
    let mut sites: Vec<(f64, String, f64)> = m
        .segments()
        .iter()
        .enumerate()
        .map(|(i, s)| {
            (s.weight(s.length() / 2.0), s.label.clone(), m.segment_start(i) + s.length() / 2.0)
        })
        .collect();
    sites.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    for (w, label, mid) in sites.iter().take(10) {
        println!("w_mid={w:.3e} label={label} mid={mid:.2}");
    }
}
