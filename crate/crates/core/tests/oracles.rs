//! Checks against values computed independently and frozen in the fixtures.

mod common;

use common::{cplx, num, nums, oracles, rel};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use opfeast::chebfun::{ChebFun, Interval};
use opfeast::dense::dense_eig;
use opfeast::eigensolver::{contfeast, FeastConfig};
use opfeast::filters::{disk_filter, halfplane_filter};
use opfeast::ode::{solve_shifted, BoundaryConditions, LinDiffOp};
use opfeast::problems::{
    beam, indefinite_slep, region, regular_slep, regular_slep_denominator, slep_asymptotic, thin_film_steady_state,
    SlepKind,
};
use opfeast::quadrature::gauss_legendre_rule;
use opfeast::rqi::{beam_initial_guess, cantilever_characteristic, cantilever_root, rqi_iterate};
use opfeast::weight::{inner_product, Weight};

#[test]
fn halfplane_filter_matches_the_contour_integral() {
    let o = oracles();
    for case in o["filters"]["halfplane"].as_array().unwrap() {
        let lam = cplx(&case["lambda"]);
        let want = cplx(&case["value"]);
        let err = |ell: usize| (halfplane_filter(num(&case["a"]), ell).unwrap().value(lam).unwrap() - want).norm();
        if lam.re.abs() >= 0.5 {
            assert!(err(40) <= 1e-10, "lambda {lam}: {}", err(40));
        } else {
            // close to the node line far from the origin, where the nodes are sparse
            let errs: Vec<f64> = [40, 160, 640].into_iter().map(err).collect();
            assert!(errs[0] > errs[1] && errs[1] > errs[2], "lambda {lam}: {errs:?}");
            assert!(errs[2] <= 1e-10, "lambda {lam}: {errs:?}");
        }
    }
}

#[test]
fn disk_filter_matches_direct_summation() {
    let o = oracles();
    for case in o["filters"]["disk_on_circle"].as_array().unwrap() {
        let c = cplx(&case["center"]);
        let f = disk_filter(c, num(&case["radius"]), case["ell"].as_u64().unwrap() as usize).unwrap();
        let got = f.value(cplx(&case["lambda"])).unwrap();
        let want = cplx(&case["value"]);
        assert!((got - want).norm() <= 1e-12 * want.norm().max(1.0), "{got} vs {want}");
    }
    let far = &o["filters"]["disk_far"];
    let c = cplx(&far["center"]);
    let r = num(&far["radius"]);
    let f = disk_filter(c, r, far["ell"].as_u64().unwrap() as usize).unwrap();
    let got = f.value(c + 2.0 * r).unwrap();
    assert!(rel(got.re, num(&far["value_at_2r"])) <= 1e-10 && got.im.abs() < 1e-15);
}

#[test]
fn hermitian_eigenvalues_match_characteristic_roots() {
    let o = oracles();
    let d = &o["dense_eig"];
    let re: Vec<Vec<f64>> = d["hermitian8_re"].as_array().unwrap().iter().map(nums).collect();
    let im: Vec<Vec<f64>> = d["hermitian8_im"].as_array().unwrap().iter().map(nums).collect();
    let m = DMatrix::from_fn(8, 8, |i, j| C64::new(re[i][j], im[i][j]));
    let want = nums(&d["eigenvalues"]);
    for hermitian in [true, false] {
        let eig = dense_eig(&m, hermitian).unwrap();
        let mut got: Vec<f64> = eig.values.iter().map(|z| z.re).collect();
        got.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() <= 1e-9, "{g} vs {w}");
        }
    }
}

#[test]
fn closed_forms() {
    let o = oracles();
    let cf = &o["closed_forms"];
    let e = ChebFun::fit_real(f64::exp, Interval::unit(), 1e-14).unwrap();
    assert!((e.evaluate(0.3).unwrap().re - num(&cf["exp_0_3"])).abs() <= 1e-13);

    let u = thin_film_steady_state(1.0, Interval::new(0.0, 2.0)).unwrap();
    assert!((u.eval(1.0).re - num(&cf["thin_film_delta1_x1"])).abs() <= 1e-13);

    let dom = Interval::unit();
    let op = LinDiffOp::constant(dom, &[0.0, 0.0, -1.0]).unwrap();
    let one = ChebFun::constant(dom, C64::new(1.0, 0.0));
    let g = solve_shifted(&op, C64::new(1.0, 0.0), std::slice::from_ref(&one), &BoundaryConditions::dirichlet(), 1e-13)
        .unwrap()
        .remove(0);
    for pair in cf["shifted_z1_samples"].as_array().unwrap() {
        let x = num(&pair[0]);
        assert!((g.eval(x).re - num(&pair[1])).abs() <= 1e-12, "x={x}");
    }

    let w = Weight::Function {
        w: ChebFun::fit_real(f64::cosh, dom, 1e-15).unwrap(),
    };
    let ip = inner_product(&one, &one, &w).unwrap();
    assert!((ip.re - num(&cf["two_sinh1"])).abs() <= 1e-13);
}

#[test]
fn gauss_rules_agree_with_an_independent_panel() {
    let o = oracles();
    let panel = &o["gl8_panel"];
    let (x8, w8) = (nums(&panel["nodes"]), nums(&panel["weights"]));
    let ours = gauss_legendre_rule(8);
    for (a, b) in ours.nodes.iter().zip(&x8) {
        assert!((a - b).abs() <= 1e-15);
    }
    for (a, b) in ours.weights.iter().zip(&w8) {
        assert!((a - b).abs() <= 1e-15);
    }
    // composite 8-point panels against our 64-point rule
    let f = |x: f64| (3.0 * x).sin() * x.cosh();
    let panels = 16;
    let h = 2.0 / panels as f64;
    let mut composite = 0.0;
    for p in 0..panels {
        let a = -1.0 + p as f64 * h;
        for (t, w) in x8.iter().zip(&w8) {
            composite += w * 0.5 * h * f(a + 0.5 * h * (t + 1.0));
        }
    }
    let single = gauss_legendre_rule(64).integrate(|x| f(x) + 1.0) - 2.0;
    assert!((composite - single).abs() <= 1e-13);
}

#[test]
fn regular_slep_matches_reference_values() {
    let o = oracles();
    let d = &o["regular_slep"];
    assert!((regular_slep_denominator() - num(&d["denominator"])).abs() <= 1e-13);
    let p = regular_slep().unwrap();
    for (n, want) in d["eigenvalues"].as_object().unwrap() {
        let n: usize = n.parse().unwrap();
        let mut cfg = FeastConfig::new(2, region("regular-slep", n).unwrap());
        cfg.adapt_rank = true;
        let r = contfeast(&p.problem, &cfg).unwrap();
        let v = r.values_in_region();
        assert_eq!(v.len(), 1, "n={n}");
        assert!(rel(v[0].re, num(want)) <= 1e-10, "n={n}: {} vs {}", v[0].re, num(want));
        // the asymptotic estimate is already close at these sizes
        assert!(rel(slep_asymptotic(n, SlepKind::Regular), num(want)) <= 0.2);
    }
}

#[test]
fn indefinite_slep_matches_reference_values() {
    let o = oracles();
    let p = indefinite_slep().unwrap();
    for (n, want) in o["indefinite_slep"]["positive"].as_object().unwrap() {
        let n: usize = n.parse().unwrap();
        let mut cfg = FeastConfig::new(2, region("indefinite-slep", n).unwrap());
        cfg.adapt_rank = true;
        let r = contfeast(&p.problem, &cfg).unwrap();
        let v = r.values_in_region();
        assert_eq!(v.len(), 1, "n={n}");
        assert!(rel(v[0].re, num(want)) <= 1e-9, "n={n}: {} vs {}", v[0].re, num(want));
    }
}

#[test]
fn beam_modes_match_shooting() {
    let o = oracles();
    let b = &o["beam"];
    let roots = nums(&b["roots_betaL"]);
    let p = beam(num(&b["length"])).unwrap();
    for (i, want) in nums(&b["eigenvalues"]).iter().enumerate() {
        let n = i + 1;
        let beta = cantilever_root(n, 1.0).unwrap();
        assert!((beta - roots[i]).abs() <= 1e-10);
        assert!(cantilever_characteristic(beta, 1.0).abs() <= 1e-12 * beta.cosh());
        let f0 = beam_initial_guess(n, 1.0).unwrap();
        let tr = rqi_iterate(p.problem.operator.lhs(), &f0, &p.problem.bcs, &Weight::Unit, 1e-10, 10).unwrap();
        assert!(tr.converged, "mode {n}");
        assert!(rel(tr.eigenvalue.re, *want) <= 1e-10, "mode {n}: {} vs {want}", tr.eigenvalue.re);
    }
}

