use optoneuro::linkbudget::{
    link_source_energy, miss_probability, photons_for_reliability, receiverless_optical_energy, snspd_reset_energy,
    ReceiverlessPhotodiode, DEFAULT_WAVELENGTH,
};
use optoneuro::membench::{score_technology, Direction, MemoryTechSpec, SystemAssumptions, Verdict};
use optoneuro::netgen::{average_shortest_path, generate_er, NetworkGraph, SourceSampling};
use optoneuro::platform::{
    cmos_max_time_constant, max_average_spike_rate, sc_max_time_constant, squid_from_critical_current,
    TimeConstantSpec,
};
use optoneuro::quantities::{
    constants, photon_energy, quantum_limited_responsivity, Current, Dimension, Energy, Inductance, Length, Power,
    Probability, Quantity, Time,
};
use optoneuro::scaling::{log_grid, required_degree, required_planes, Wafer};
use optoneuro::seeding;
use optoneuro::simulator::{apply_stdp, AnalogCell, EndurancePolicy, LoopCell, MemoryCell, Soma, StdpParams};
use proptest::prelude::*;

fn dimension() -> impl Strategy<Value = Dimension> {
    (-3i8..=3, -2i8..=2, -4i8..=4, -2i8..=2, -1i8..=1).prop_map(|(l, m, t, i, k)| Dimension::new(l, m, t, i, k))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

proptest! {
    #[test]
    fn product_then_quotient_restores(av in 1e-20f64..1e20, bv in 1e-20f64..1e20, ad in dimension(), bd in dimension()) {
        let a = Quantity::new(av, ad);
        let b = Quantity::new(bv, bd);
        let back = (a * b) / b;
        prop_assert_eq!(back.dimension, ad);
        prop_assert!(rel(back.value, av) <= 1e-12);
    }

    #[test]
    fn one_electron_per_photon(lambda in 1e-7f64..1e-5) {
        let l = Length::new(lambda);
        let product = photon_energy(l).unwrap().value() * quantum_limited_responsivity(l).unwrap().value();
        prop_assert!(rel(product, constants::ELEMENTARY_CHARGE) <= 1e-9);
    }

    #[test]
    fn miss_probability_decreases(n in 0.01f64..50.0, eta in 0.01f64..0.99, dn in 0.01f64..5.0, de in 0.001f64..0.01) {
        let p = |n, e| miss_probability(n, Probability::new(e).unwrap()).unwrap().value();
        prop_assert!(p(n + dn, eta) < p(n, eta));
        prop_assert!(p(n, eta + de) < p(n, eta));
    }

    #[test]
    fn reliability_round_trip(p in 0.01f64..0.999999, eta in 0.01f64..1.0) {
        let eta_d = Probability::new(eta).unwrap();
        let n = photons_for_reliability(Probability::new(p).unwrap(), eta_d).unwrap();
        let miss = miss_probability(n, eta_d).unwrap().value();
        prop_assert!(rel(miss, 1.0 - p) <= 1e-9);
    }

    #[test]
    fn receiver_energies_scale_inverse_in_eta(eta in 1e-6f64..0.5, factor in 1.0f64..2.0) {
        let pd = ReceiverlessPhotodiode::default();
        let e = |x| Probability::new(x).unwrap();
        let sc1 = link_source_energy(7.0, DEFAULT_WAVELENGTH, e(eta)).unwrap().value();
        let sc2 = link_source_energy(7.0, DEFAULT_WAVELENGTH, e(eta * factor)).unwrap().value();
        prop_assert!(rel(sc1 / sc2, factor) <= 1e-12);
        let pd1 = receiverless_optical_energy(&pd, e(eta)).unwrap().value();
        let pd2 = receiverless_optical_energy(&pd, e(eta * factor)).unwrap().value();
        prop_assert!(rel(pd1 / pd2, factor) <= 1e-12);
    }

    #[test]
    fn reset_energy_invariant_under_rescaling(l in 1e-9f64..1e-6, i in 1e-6f64..1e-4) {
        let a = snspd_reset_energy(Inductance::new(l), Current::new(i)).unwrap().value();
        let b = snspd_reset_energy(Inductance::new(4.0 * l), Current::new(i / 2.0)).unwrap().value();
        prop_assert!(rel(a, b) <= 1e-12);
    }

    #[test]
    fn squid_sizing_identity(i_c in 1e-6f64..1e-2) {
        let s = squid_from_critical_current(Current::new(i_c)).unwrap();
        prop_assert!(rel(2.0 * s.l_sq.value() * i_c, constants::FLUX_QUANTUM) <= 1e-9);
    }

    #[test]
    fn spike_rate_is_inverse_in_each_denominator(n in 1.0f64..1e12, k in 1.0f64..1e4, e in 1e-18f64..1e-12, f in 1.5f64..10.0) {
        let p = Power::new(1e7);
        let base = max_average_spike_rate(p, n, k, Energy::new(e)).unwrap().value();
        for scaled in [
            max_average_spike_rate(p, n * f, k, Energy::new(e)).unwrap().value(),
            max_average_spike_rate(p, n, k * f, Energy::new(e)).unwrap().value(),
            max_average_spike_rate(p, n, k, Energy::new(e * f)).unwrap().value(),
        ] {
            prop_assert!(rel(scaled * f, base) <= 1e-12);
        }
    }

    #[test]
    fn required_degree_monotone(n in 1e3f64..1e10, l in 1.6f64..6.0, dl in 0.01f64..1.0, fnn in 1.01f64..10.0) {
        let k = required_degree(n, l).unwrap();
        prop_assert!(required_degree(n, l + dl).unwrap() < k);
        prop_assert!(required_degree(n * fnn, l).unwrap() > k);
    }

    #[test]
    fn planes_fill_the_wafer(n in 1e4f64..1e7, l in 2.0f64..4.0, w_wg in 1e-7f64..1e-5, w_sy in 1e-6f64..1e-4, f in 1.1f64..3.0) {
        let wafer = Wafer::default();
        let r = required_planes(n, l, Length::new(w_wg), Length::new(w_sy), &wafer).unwrap();
        let per_neuron = wafer.usable_area().unwrap().value() / n;
        let a_p = (r.degree * w_wg / r.p_p).powi(2);
        let a_e = r.degree * w_sy * w_sy / r.p_e;
        prop_assert!(rel(a_p, per_neuron) <= 1e-9);
        prop_assert!(rel(a_e, per_neuron) <= 1e-9);
        let r2 = required_planes(n, l, Length::new(w_wg * f), Length::new(w_sy * f), &wafer).unwrap();
        prop_assert!(rel(r2.p_p, r.p_p * f) <= 1e-12);
        prop_assert!(rel(r2.p_e, r.p_e * f * f) <= 1e-12);
    }

    #[test]
    fn er_stats_are_deterministic(n in 20usize..200, k in 1.5f64..8.0, seed in any::<u64>()) {
        prop_assume!(k < (n - 1) as f64);
        let a = generate_er(n, k, seed).unwrap();
        let b = generate_er(n, k, seed).unwrap();
        prop_assert_eq!(a.edges(), b.edges());
        let sa = average_shortest_path(&a, SourceSampling::All);
        let sb = average_shortest_path(&b, SourceSampling::All);
        prop_assert_eq!(sa.ok(), sb.ok());
    }

    #[test]
    fn edge_list_round_trips(n in 2usize..100, k in 0.5f64..5.0, seed in any::<u64>()) {
        prop_assume!(k < (n - 1) as f64);
        let g = generate_er(n, k, seed).unwrap();
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        prop_assert_eq!(NetworkGraph::parse_edge_list(buf.as_slice()).unwrap(), g);
    }

    #[test]
    fn single_detection_filter_is_exponential(w in 0.01f64..2.0, tau in 1e-9f64..1e-3, dt_frac in 0.0f64..20.0, steps in 1usize..50) {
        let mut jump = Soma::new(tau * 1.7);
        let g = jump.group_for(tau, false);
        jump.inject(g, w);
        let mut stepped = jump.clone();
        let dt = dt_frac * tau;
        jump.advance(dt);
        for i in 1..=steps {
            stepped.advance(dt * i as f64 / steps as f64);
        }
        let exact = w * (-dt / tau).exp();
        prop_assert!(rel(jump.groups[g].current, exact) <= 1e-6);
        prop_assert!(rel(stepped.groups[g].current, exact) <= 1e-6);
        prop_assert!((jump.membrane - stepped.membrane).abs() <= 1e-9 * w);
    }

    #[test]
    fn plasticity_stays_representable(
        bits in 1u8..=10,
        start in 0.0f64..=1.0,
        a in 0.0f64..50.0,
        pairs in proptest::collection::vec((-1e-3f64..1e-3, 0.0f64..1e-3), 1..100),
        noise in 0.0f64..0.2,
    ) {
        let params = StdpParams {
            a_plus: a,
            a_minus: a,
            tau_plus: Time::new(2e-4),
            tau_minus: Time::new(2e-4),
            endurance_policy: EndurancePolicy::Freeze,
        };
        let mut rng = seeding::stream(3, 0);
        let mut lp = MemoryCell::Loop(LoopCell::from_fraction(bits, start).unwrap());
        let mut an = MemoryCell::Analog(AnalogCell::new(start, noise, None).unwrap());
        let mut last_writes = 0;
        for (dt, pre) in pairs {
            apply_stdp(pre, pre + dt, &mut lp, &params, &mut rng);
            apply_stdp(pre, pre + dt, &mut an, &params, &mut rng);
            if let MemoryCell::Loop(c) = lp {
                prop_assert!(c.level() <= c.max_level());
            }
            prop_assert!((0.0..=1.0).contains(&an.fraction()));
            prop_assert!(lp.write_count() >= last_writes);
            last_writes = lp.write_count();
        }
    }

    #[test]
    fn margins_agree_with_verdicts(
        endurance in 1e8f64..1e16,
        energy in 1e-19f64..1e-10,
        time in 1e-12f64..1e-5,
        bits in 1u32..16,
    ) {
        let tech = MemoryTechSpec {
            name: "x".into(),
            endurance: Some(endurance),
            update_energy: Some(Energy::new(energy)),
            update_time: Some(Time::new(time)),
            precision_bits: Some(bits),
            ..Default::default()
        };
        let s = score_technology(&tech, &SystemAssumptions::default()).unwrap();
        for m in &s.metrics {
            let margin = m.margin.unwrap();
            prop_assert!(margin >= 0.0);
            let pass = match m.direction {
                Direction::AtLeast => margin >= 1.0,
                Direction::AtMost => margin <= 1.0,
            };
            prop_assert_eq!(pass, m.verdict == Verdict::Pass);
        }
    }
}

#[test]
fn superconducting_beats_cmos_above_ten_microns() {
    let spec = TimeConstantSpec::default();
    let grid = log_grid(1e-6, 100e-6, 20);
    assert_eq!(grid.len(), 20);
    for w in grid.into_iter().filter(|&w| w > 10e-6) {
        let w = Length::new(w);
        let sc = sc_max_time_constant(w, &spec).unwrap().tau_max.value();
        let cmos = cmos_max_time_constant(w, &spec).unwrap().value();
        assert!(sc > cmos, "w = {} m: {sc} <= {cmos}", w.value());
    }
}

#[test]
fn superset_graphs_never_lengthen_paths() {
    for seed in 0..20u64 {
        let g = generate_er(40, 3.0, seed).unwrap();
        let extra = generate_er(40, 2.0, seed + 1000).unwrap();
        let mut edges = g.edges().to_vec();
        edges.extend_from_slice(extra.edges());
        let sup = NetworkGraph::from_edges(40, edges).unwrap();
        let (Ok(a), Ok(b)) = (average_shortest_path(&g, SourceSampling::All), average_shortest_path(&sup, SourceSampling::All))
        else {
            continue;
        };
        assert!(b.reachable_fraction >= a.reachable_fraction);
        if a.reachable_fraction == 1.0 {
            assert!(b.mean_shortest_path <= a.mean_shortest_path);
        }
    }
}
