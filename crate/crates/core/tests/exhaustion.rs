use approx::assert_relative_eq;
use yamabe_lab::exhaustion::{
    boundary_bound, check_monotone, concentration_verdict, decay_fit, estimate_constants, exterior_sequence, run_exhaustion,
    subsolution_check, ExhaustionTrace, VerdictKind, TRACE_FILE,
};
use yamabe_lab::functional::{exterior_quotient, lambda_constant, scalar_lower_bound, ExteriorConfig};
use yamabe_lab::manifold::MetricProfile;
use yamabe_lab::subcritical::SolverConfig;
use yamabe_lab::Error;

// Λ(n) = n(n-2)/4 |S^n|^{2/n}, evaluated independently with mpmath.
const LAMBDA: [(u32, f64); 4] = [(3, 5.47790408953133), (4, 10.2603986412949), (5, 14.8119117200059), (6, 19.2594566654732)];

#[test]
fn sobolev_constants() {
    for (n, v) in LAMBDA {
        assert_relative_eq!(lambda_constant(n).unwrap(), v, max_relative = 1e-10);
    }
}

#[test]
fn flat_trace_is_monotone_and_concentrates() {
    let flat = MetricProfile::euclidean(3, 1e6).unwrap();
    let trace = run_exhaustion(&flat, &[1.0, 2.0, 4.0], 64.0, &SolverConfig::default()).unwrap();
    check_monotone(&trace).unwrap();
    let lambda = lambda_constant(3).unwrap();
    for y in trace.y_values() {
        // 64 cells on B_1 resolve the concentrating core only to about 11%.
        assert!(y >= lambda && y < 1.12 * lambda, "Y_j = {y}");
    }
    assert!(trace.records.iter().all(|r| r.continuation.concentrated));
    assert_eq!(concentration_verdict(&trace, 0.5).unwrap().verdict, VerdictKind::Concentrates);
    assert!(boundary_bound(&trace).pass);
    for j in trace.radii() {
        let rep = subsolution_check(&flat, &trace, j).unwrap();
        assert!(rep.pass, "{rep:?}");
    }
}

#[test]
fn trace_round_trips_through_disk() {
    let hyp = MetricProfile::hyperbolic(3, 50.0).unwrap();
    let trace = run_exhaustion(&hyp, &[1.0, 2.0, 3.0], 64.0, &SolverConfig::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = trace.write_dir(dir.path()).unwrap();
    assert_eq!(files.len(), 4);
    for path in [dir.path().to_path_buf(), dir.path().join(TRACE_FILE)] {
        let back = ExhaustionTrace::read(&path).unwrap();
        assert_eq!(back.radii(), trace.radii());
        assert_eq!(back.y_values(), trace.y_values());
        for (a, b) in back.records.iter().zip(&trace.records) {
            assert_eq!(a.field.values(), b.field.values());
            assert_eq!(a.equation, b.equation);
        }
    }
}

#[test]
fn trace_decay_fit_runs() {
    let flat = MetricProfile::euclidean(3, 1e6).unwrap();
    let trace = run_exhaustion(&flat, &[1.0, 2.0, 3.0], 64.0, &SolverConfig::default()).unwrap();
    let fit = decay_fit(&trace, 0.5).unwrap();
    assert!(fit.alpha.is_finite() && fit.nodes > 8);
}

/// On flat space a ball of radius 2j with the same cell count is an exact
/// dilation of the one of radius j, and the critical quotient is invariant.
#[test]
fn flat_balls_are_dilation_invariant() {
    let flat = MetricProfile::euclidean(3, 1e6).unwrap();
    let solver = SolverConfig::default();
    let a = run_exhaustion(&flat, &[1.0, 2.0, 3.0], 128.0, &solver).unwrap();
    let b = run_exhaustion(&flat, &[2.0, 4.0, 6.0], 64.0, &solver).unwrap();
    for (x, y) in a.y_values().iter().zip(b.y_values()) {
        assert_relative_eq!(*x, y, max_relative = 1e-6);
    }
}

/// The geometric annulus grid makes the flat exterior problem exactly dilation
/// invariant, so the quotient cannot depend on the inner radius.
#[test]
fn flat_exterior_is_dilation_invariant() {
    let flat = MetricProfile::euclidean(3, 1e9).unwrap();
    let cfg = ExteriorConfig::default();
    let solver = SolverConfig::default();
    let p = 6.0;
    let a = exterior_quotient(&flat, 1.0, 8.0, p, &solver, &cfg).unwrap();
    let b = exterior_quotient(&flat, 3.0, 24.0, p, &solver, &cfg).unwrap();
    assert_relative_eq!(a.report.quotient, b.report.quotient, max_relative = 1e-6);
    let lambda = lambda_constant(3).unwrap();
    assert!(a.report.quotient >= lambda && a.report.quotient < 1.01 * lambda);
}

#[test]
fn hyperbolic_exteriors_grow() {
    let hyp = MetricProfile::hyperbolic(3, 200.0).unwrap();
    let ext = exterior_sequence(&hyp, &[1.0, 2.0, 4.0], &SolverConfig::default(), &ExteriorConfig::default()).unwrap();
    let q: Vec<f64> = ext.iter().map(|e| e.report.quotient).collect();
    assert!(q.windows(2).all(|w| w[1] > w[0]), "{q:?}");
    assert!(matches!(scalar_lower_bound(&hyp, 100.0), Err(Error::DivergentTail { .. })));
}

#[test]
fn estimate_caps_exterior_at_lambda() {
    let e = estimate_constants(3, &[5.6, 5.5], &[5.49, 6.1], 0.05).unwrap();
    assert_eq!(e.y_inf_raw, 6.1);
    assert_eq!(e.y_inf_est, lambda_constant(3).unwrap());
    assert!(!e.condition_holds);
    let e = estimate_constants(3, &[4.0], &[5.4], 0.05).unwrap();
    assert!(e.condition_holds);
    assert_relative_eq!(e.relative_gap, 1.4 / 5.4, max_relative = 1e-15);
}

#[test]
fn bad_exhaustion_inputs() {
    let flat = MetricProfile::euclidean(3, 10.0).unwrap();
    assert!(run_exhaustion(&flat, &[], 64.0, &SolverConfig::default()).is_err());
    assert!(run_exhaustion(&flat, &[2.0, 1.0], 64.0, &SolverConfig::default()).is_err());
    assert!(run_exhaustion(&flat, &[20.0], 64.0, &SolverConfig::default()).is_err());
}
