use valdist_core::averages::{self, Statistic};
use valdist_core::fourier::{CharacteristicFunction, MTildeFunction};

#[test]
fn torus_estimates_cover_quadrature_references() {
    let mut cases = 0;
    let mut inside = 0;
    let mut report = Vec::new();
    for sigma in [1.0, 1.5] {
        for y in [5.0, 7.0, 11.0, 13.0, 17.0] {
            let xs = vec![0.5, 1.0];
            let est = averages::torus_mc(sigma, y, &Statistic::Psi(xs.clone()), 100_000, 1000 + cases as u64).unwrap();
            let f = MTildeFunction::new(sigma, y).unwrap();
            for (k, &x) in xs.iter().enumerate() {
                let gap = (est.mean[k] - f.eval(x).unwrap()).norm();
                let z = gap / est.standard_error[k];
                cases += 1;
                if z <= 4.0 {
                    inside += 1;
                }
                report.push(format!("σ={sigma} y={y} x={x}: {z:.2}"));
            }
        }
    }
    assert_eq!(cases, 20);
    assert!(inside >= 19, "{inside}/20 within 4 standard errors: {report:?}");
}
