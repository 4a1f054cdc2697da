use lslab_core::geometry::*;
use lslab_core::solver::*;
use lslab_core::verification::*;

fn main() {
    let mut tube = make_flat_tube(0.02, -2.0, 2.0).unwrap();
    tube.label = "handle".into();
    let mut neck = make_round_neck(1.0, 0.0, 1.0).unwrap();
    neck.label = "N".into();
    let collar = make_collar(&tube, &neck);
    let base = chain(
        vec![tube, collar, neck],
        BoundaryCondition::Dirichlet,
        BoundaryCondition::Dirichlet,
        JunctionPolicy::Continuous,
    )
    .unwrap();
    let opts = SolverOptions { dx: 0.005, restarts: 4, ..Default::default() };
    let reports = check_neck_extension(&base, "N", &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0], &opts).unwrap();
    for r in &reports {
        if r.lemma.ends_with("/fit") {
            println!("FIT pass={} {:?}", r.pass, r.measured);
        } else {
            println!("l={:3.0} lambda={:+.12}", r.get("l").unwrap(), r.get("lambda").unwrap());
        }
    }
}
