use hexcover_core::baselines::{hex_site_set, perturb_site_set, ppp_outage, siteset_outage, BaselineOptions, Window};
use hexcover_core::lattice::hexagon_area;
use hexcover_core::simulator::{par_realizations, summarize, Scenario};
use hexcover_core::{full_report, NetworkParams, ScMode, SimConfig};

fn lattice_opts(realizations: usize) -> BaselineOptions {
    BaselineOptions {
        guard_m: Some(3000.0),
        grid_step_m: 50.0,
        realizations,
        seed: 77,
        ..Default::default()
    }
}

#[test]
fn hex_baseline_agrees_with_simulator() {
    let c = SimConfig { realizations: 200, seed: 77, ..SimConfig::default() };
    let s = Scenario::new(&c).unwrap();
    let sim = summarize(&c, &par_realizations(c.realizations, |r| s.run_mode(r, ScMode::None))).outage_mean;
    let w = Window::square(9000.0).unwrap();
    let hex = siteset_outage(&hex_site_set(1000.0, w).unwrap(), &c.params, &lattice_opts(200)).unwrap();
    assert!((hex.outage - sim).abs() < 0.01, "{} vs {sim}", hex.outage);
}

#[test]
fn perturbed_sites_lie_in_lattice_ppp_bracket() {
    let p = NetworkParams::default();
    let w = Window::square(9000.0).unwrap();
    let hex_set = hex_site_set(p.r_mc, w).unwrap();
    let opts = lattice_opts(100);
    let hex = siteset_outage(&hex_set, &p, &opts).unwrap().outage;
    let ppp = ppp_outage(1.0 / hexagon_area(p.r_mc), w, &p, &opts).unwrap().outage;
    let perturbed: f64 = (0..10u64)
        .map(|k| {
            let set = perturb_site_set(&hex_set, 300.0, k).unwrap();
            siteset_outage(&set, &p, &BaselineOptions { realizations: 10, seed: k, ..opts }).unwrap().outage
        })
        .sum::<f64>()
        / 10.0;
    assert!(hex <= perturbed && perturbed <= ppp, "{hex} {perturbed} {ppp}");
}

#[test]
fn simulated_outage_tracks_analytic_over_c0() {
    for c0 in [0.75, 1.25] {
        let mut c = SimConfig { realizations: 60, seed: 5, grid_step: 20.0, ..SimConfig::default() };
        c.params.c0 = c0;
        let s = Scenario::new(&c).unwrap();
        let sim = summarize(&c, &par_realizations(c.realizations, |r| s.run_mode(r, ScMode::None))).outage_mean;
        let r = full_report(&c.params).unwrap();
        assert!(sim >= r.lower.delta_mc - 0.03 && sim <= r.upper.delta_mc + 0.03, "C0={c0}: {sim} vs [{}, {}]", r.lower.delta_mc, r.upper.delta_mc);
    }
}

#[test]
fn placement_count_near_analytic_count() {
    let c = SimConfig { realizations: 100, seed: 3, grid_step: 20.0, ..SimConfig::default() };
    let s = Scenario::new(&c).unwrap();
    let row = summarize(&c, &par_realizations(c.realizations, |r| s.run_mode(r, ScMode::None)));
    assert!((row.sc_count_mean - 13.0).abs() <= 2.0, "{}", row.sc_count_mean);
}
