use dumbbell::integral_curvature::{default_split, kbar, neck_bound_integrals};
use dumbbell::quadrature::Quadrature;
use dumbbell::{DumbbellParams, ProfileCurve};

#[test]
fn kbar_stays_below_eps_independent_majorant() {
    let q = Quadrature::default();
    let (radius, length) = (2.0, 1.0);
    let mut m1 = Vec::new();
    for unit in [0.2, 0.1, 0.05, 0.025, 0.0125] {
        let p = DumbbellParams::new(radius, length, unit * radius / 2.0).unwrap();
        let g = ProfileCurve::new(p);
        let bounds = neck_bound_integrals(&p, default_split(&p), &q).unwrap();
        let base = kbar(&g, 1.5, 0.0, &q).unwrap().kbar;
        assert!(
            base > 0.0 && base <= bounds.kbar_majorant,
            "eps {unit}: {base}"
        );
        for level in [0.0, 0.1, 1.0] {
            let k = kbar(&g, 1.5, level, &q).unwrap().kbar;
            assert!(k <= level + base + 1e-8, "eps {unit}, K {level}: {k}");
        }
        m1.push(bounds.m1);
    }
    // U does not depend on eps, so neither does M1.
    assert!(
        m1.windows(2).all(|w| (w[1] - w[0]).abs() <= 1e-8 * w[0]),
        "{m1:?}"
    );
}
