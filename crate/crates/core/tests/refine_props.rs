mod common;

use mpcore::linalg::{mat_norm_fro, mat_vec, max_rel_err, vec_norm2, Kernels};
use mpcore::refine::{check_stop, iterative_refinement, RefineConfig, StopReason};
use mpcore::testgen::{build_system, LinearSystem, ProblemSpec};
use mpcore::{BigFloat, PrecisionContext, PrecisionTag};

fn system(n: usize, seed: u64) -> LinearSystem {
    let g = build_system(&ProblemSpec::new(n, seed)).unwrap();
    g.export(&PrecisionContext::new(424).unwrap()).unwrap()
}

/// Recomputes the stop test for the returned solution with 64 extra bits.
fn verify_stop(s: &LinearSystem, x: &mpcore::linalg::Vector<BigFloat>, cfg: &RefineConfig) -> bool {
    let ctx = PrecisionContext::new(cfg.long_bits + 64).unwrap();
    let a = s.a.round_to(&ctx).unwrap();
    let ax = mat_vec(&a, x, &ctx, Kernels::default()).unwrap();
    let res: mpcore::linalg::Vector<BigFloat> = s.b.iter().zip(ax.iter()).map(|(b, v)| b.sub(v, &ctx).unwrap()).collect();
    let r = vec_norm2(&res, &ctx).unwrap();
    let xn = vec_norm2(x, &ctx).unwrap();
    let an = mat_norm_fro(&a, &ctx).unwrap();
    // Allow the few ulps separating the two evaluations.
    let slack = BigFloat::one(&ctx).add(&BigFloat::one(&ctx).mul_pow2(-400).unwrap(), &ctx).unwrap();
    let rtol = cfg.rtol.mul(&slack, &ctx).unwrap();
    check_stop(&r, &xn, &an, s.b.len(), &rtol, &cfg.atol, &ctx).unwrap()
}

#[test]
fn converges_for_each_precision() {
    let s = system(50, 2);
    let ctx = PrecisionContext::new(424).unwrap();
    for tag in [PrecisionTag::DD, PrecisionTag::TD, PrecisionTag::QD] {
        let cfg = RefineConfig::new(tag);
        let r = iterative_refinement(&s.a, &s.b, &cfg).unwrap();
        assert_eq!(r.stop_reason, StopReason::Converged, "{tag}");
        assert_eq!(r.residual_history.len(), r.iterations + 1);
        assert!(verify_stop(&s, &r.solution, &cfg), "{tag}");
        for w in r.residual_history.windows(2) {
            assert!(w[1] < w[0], "{tag}: residuals must fall until convergence");
        }
        let err = max_rel_err(&r.solution, &s.x_true, &ctx).unwrap().to_f64();
        assert!(err < 1e-70, "{tag}: {err:e}");
        if tag == PrecisionTag::QD {
            assert!(r.iterations <= 2, "QD took {}", r.iterations);
        }
    }
}

#[test]
fn normalization_does_not_change_the_outcome_class() {
    let s = system(30, 4);
    let ctx = PrecisionContext::new(424).unwrap();
    for tag in [PrecisionTag::DD, PrecisionTag::TD] {
        let mut cfg = RefineConfig::new(tag);
        let with = iterative_refinement(&s.a, &s.b, &cfg).unwrap();
        cfg.normalize = false;
        let without = iterative_refinement(&s.a, &s.b, &cfg).unwrap();
        assert_eq!(with.stop_reason, without.stop_reason);
        assert!(with.iterations.abs_diff(without.iterations) <= 1);
        let a = max_rel_err(&with.solution, &s.x_true, &ctx).unwrap().to_f64();
        let b = max_rel_err(&without.solution, &s.x_true, &ctx).unwrap().to_f64();
        assert!(a < 1e-70 && b < 1e-70, "{a:e} {b:e}");
    }
}

#[test]
fn max_iter_limits_corrections() {
    let s = system(30, 6);
    let mut cfg = RefineConfig::new(PrecisionTag::DD);
    cfg.max_iter = 2;
    let r = iterative_refinement(&s.a, &s.b, &cfg).unwrap();
    assert_eq!(r.stop_reason, StopReason::MaxIter);
    assert_eq!(r.iterations, 2);
    assert_eq!(r.residual_history.len(), 3);
}

#[test]
fn impossible_tolerance_stagnates() {
    let s = system(20, 8);
    let ctx = PrecisionContext::new(424).unwrap();
    let mut cfg = RefineConfig::new(PrecisionTag::QD);
    cfg.rtol = BigFloat::parse("1e-200", &ctx).unwrap();
    let r = iterative_refinement(&s.a, &s.b, &cfg).unwrap();
    assert!(matches!(r.stop_reason, StopReason::Stagnated | StopReason::Converged), "{}", r.stop_reason);
    if r.stop_reason == StopReason::Stagnated {
        assert!(r.iterations < cfg.max_iter);
    }
}

#[test]
fn results_do_not_depend_on_kernels() {
    let s = system(40, 9);
    let mut cfg = RefineConfig::new(PrecisionTag::TD);
    cfg.kernels = Kernels::sequential(mpcore::linalg::KernelPath::Scalar);
    let a = iterative_refinement(&s.a, &s.b, &cfg).unwrap();
    cfg.kernels = Kernels::default();
    let b = iterative_refinement(&s.a, &s.b, &cfg).unwrap();
    assert_eq!(a.solution, b.solution);
    assert_eq!(a.iterations, b.iterations);
}
