//! Worked certification examples at the reference mesh level n = 20.

use triconst::geometry::{k_constant, TriangleShape};
use triconst::eigen::{discrete_upper_bound, max_gen_eig_f64};
use triconst::mesh::{assemble_f64, Space};
use triconst::symbolic::rational::{from_f64_exact, int, rat, to_f64};
use triconst::verify::{certify_at, lambda_threshold, verify_point, Mode, Verdict};

#[test]
fn grid_corner_certifies() {
    let shape = TriangleShape::new(int(0), int(1));
    let (lambda, v) = verify_point(1, 20, &shape, Mode::Thm61).unwrap();
    assert_eq!(v, Verdict::Verified);
    // The certified λ sits between the discrete λ_max and K₁².
    let p = assemble_f64(Space::V11, 1, 20, &shape).unwrap();
    let lam_max = max_gen_eig_f64(&p.a, &p.b).unwrap().value;
    assert!(lam_max < to_f64(&lambda));
    assert!(to_f64(&lambda) < k_constant(1, &shape.triangle()).unwrap().powi(2));
}

#[test]
fn too_small_lambda_is_not_certified() {
    let shape = TriangleShape::new(int(0), int(1));
    let p = assemble_f64(Space::V11, 1, 20, &shape).unwrap();
    let lam_max = max_gen_eig_f64(&p.a, &p.b).unwrap().value;
    let below = from_f64_exact(0.9 * lam_max).unwrap();
    assert_eq!(certify_at(1, 20, &shape, &below).unwrap(), Verdict::NotCertified);
}

#[test]
fn small_b_point_certifies() {
    let shape = TriangleShape::new(int(0), rat(1, 10));
    assert_eq!(verify_point(3, 20, &shape, Mode::Thm62).unwrap().1, Verdict::Verified);
}

#[test]
fn j4_threshold_positive_and_float_bound_below_k() {
    let shape = TriangleShape::new(int(0), int(1));
    assert!(to_f64(&lambda_threshold(4, &shape, Mode::Thm61, 20).unwrap()) > 0.0);
    for j in 1..=4 {
        let bound = discrete_upper_bound(j, 20, &shape).unwrap();
        assert!(bound < k_constant(j, &shape.triangle()).unwrap(), "j={j}");
    }
}
