use idla_core::cluster::{Cluster, ClusterLimits};
use idla_core::harness::idla_diagnostics;
use idla_core::increments::{IncrementLaw, LawSpec};
use idla_core::rng::replica_stream;

/// Whenever every `t ∈ (x, ux]` is reached by at least `⌈(s-1)x⌉` of the next
/// `k` walkers on both sides, the aggregate covers `[-ux, ux]` by `σ_x + k`.
#[test]
fn over_filling_implication() {
    let (x, u, s) = (10u64, 1.5, 2.0);
    let ux = (u * x as f64).floor() as u64;
    let need = ((s - 1.0) * x as f64).ceil() as u64;
    let limits = ClusterLimits::default();
    let mut triggered = 0;
    let mut checked = 0;
    for (j, spec) in [LawSpec::Simple, LawSpec::two_step(), LawSpec::stable(1.5)].into_iter().enumerate() {
        let law = IncrementLaw::new(spec).unwrap();
        for rep in 0..6 {
            let mut rng = replica_stream(41 + j as u64, rep);
            let mut c = Cluster::new();
            let sigma_x = c.run_until_radius(&law, x, &mut rng, &limits).unwrap();
            c.start_recording((s * x as f64).ceil() as i64);
            let kmax = 160;
            let mut sigma_ux_by = Vec::new();
            for _ in 0..kmax {
                c.dispatch_one(&law, &mut rng, &limits).unwrap();
                sigma_ux_by.push(c.sigma(ux));
            }
            let rec = c.take_recording().unwrap();
            for k in (10..=kmax).step_by(10) {
                let hyp = (x as i64 + 1..=ux as i64).all(|t| {
                    let plus = idla_diagnostics(&rec, sigma_x, k, t, x as i64, s).unwrap().k_plus;
                    let minus = idla_diagnostics(&rec, sigma_x, k, -t, x as i64, s).unwrap().k_minus;
                    plus.min(minus) >= need
                });
                checked += 1;
                if hyp {
                    triggered += 1;
                    let covered = sigma_ux_by[k as usize - 1];
                    assert!(covered.is_some_and(|v| v <= sigma_x + k), "law {j}, replica {rep}, k = {k}");
                }
            }
        }
    }
    assert!(triggered > 0 && triggered < checked, "{triggered} of {checked}");
}

#[test]
fn n_total_splits_and_detects_entry() {
    let law = IncrementLaw::new(LawSpec::two_step()).unwrap();
    let limits = ClusterLimits::default();
    for rep in 0..4 {
        let mut rng = replica_stream(43, rep);
        let mut c = Cluster::new();
        let m = c.run(&law, 40, &mut rng, &[], &limits).map(|_| c.walkers()).unwrap();
        let before = c.clone();
        c.start_recording(30);
        let k = 25;
        for _ in 0..k {
            c.dispatch_one(&law, &mut rng, &limits).unwrap();
        }
        let rec = c.take_recording().unwrap();
        for t in -40..=40 {
            let ct = idla_diagnostics(&rec, m, k, t, 5, 2.0).unwrap();
            assert_eq!(ct.n_total, ct.n_plus + ct.n_minus);
            if !before.contains(t) {
                assert_eq!(c.contains(t), ct.n_total > 0, "replica {rep}, t = {t}");
            }
        }
        assert!(idla_diagnostics(&rec, m, k + 1, 0, 5, 2.0).is_err());
    }
}
