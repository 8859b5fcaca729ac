"""Smoke tests for the compiled module: generation, solving, and round-trips."""

import math

import pytest

import edgeopt


def small_params(seed=11):
    p = edgeopt.GenParams()
    p.n_nodes = 3
    p.n_services = 2
    p.seed = seed
    p.node_arrival_tps = edgeopt.Interval(15, 30)
    p.core_bandwidth_mbps = 40
    return p


def test_generate_is_deterministic():
    a = edgeopt.generate(small_params())
    b = edgeopt.generate(small_params())
    assert a.arrivals == b.arrivals
    assert a.n_nodes == 3 and a.n_services == 2
    assert all(x >= 0 for x in a.arrivals)


def test_zipf_weights_match_the_closed_form():
    w = edgeopt.zipf_weights(2, 0.5)
    assert w[0] == pytest.approx(1 / (1 + 2 ** -0.5), rel=1e-12)
    assert sum(w) == pytest.approx(1.0, abs=1e-12)


def test_solve_report_recomputes():
    s = edgeopt.generate(small_params())
    caching = edgeopt.CachingPolicy(s.n_nodes, s.n_services)
    caching.set(0, 0, True)
    caching.set(1, 1, True)
    report = edgeopt.solve_p2(s, caching)
    again = edgeopt.objective(s, report.caching, report.schedule)
    assert report.objective == pytest.approx(again, rel=1e-9)
    ok, violations = edgeopt.check_schedule_feasible(s, report.caching, report.schedule)
    assert ok, violations


def test_ice_beats_or_ties_the_baselines():
    s = edgeopt.generate(small_params())
    cfg = edgeopt.IceConfig()
    cfg.max_iters = 300
    cfg.rng_seed = 11
    ice = edgeopt.run_ice(s, cfg)
    non = edgeopt.run_noncooperation(s, cfg)
    greedy = edgeopt.run_greedy(s)
    assert ice.report.objective <= non.report.objective + 1e-9
    assert ice.report.objective <= greedy.objective + 1e-9
    assert len(ice.trace) == ice.report.diagnostics.outer_iterations


def test_ice_matches_exhaustive_on_the_small_instance():
    s = edgeopt.generate(small_params())
    cfg = edgeopt.IceConfig()
    cfg.max_iters = 500
    cfg.stall_window = 500
    cfg.rng_seed = 1
    ice = edgeopt.run_ice(s, cfg)
    best, report, candidates = edgeopt.exhaustive_caching_search(s)
    assert candidates == 27
    assert ice.report.objective == pytest.approx(report.objective, abs=1e-9)


def test_reference_solver_agrees():
    s = edgeopt.generate(small_params(seed=3))
    caching = edgeopt.greedy_caching(s)
    wf = edgeopt.solve_p2(s, caching)
    ref = edgeopt.solve_p2_reference(s, caching)
    assert wf.objective == pytest.approx(ref.objective, rel=1e-6)


def test_scenario_round_trip(tmp_path):
    s = edgeopt.generate(small_params(seed=9))
    path = str(tmp_path / "scenario.json")
    edgeopt.save(s, path)
    loaded = edgeopt.load(path)
    assert loaded.arrivals == s.arrivals
    assert edgeopt.scenario_from_json(edgeopt.scenario_to_json(s)).arrivals == s.arrivals


def test_infeasible_demand_raises():
    s = edgeopt.generate(small_params())
    services = s.services  # list of copies; mutate and assign back
    for svc in services:
        svc.core_bandwidth = 0.5  # pipe far below demand
    s.services = services
    caching = edgeopt.CachingPolicy(s.n_nodes, s.n_services)
    with pytest.raises(edgeopt.InfeasibleError):
        edgeopt.solve_p2(s, caching)


def test_math_sanity():
    # All-cloud objective: 1/(M - A) + w*A with M=4, A=2, w=0.5.
    s = edgeopt.Scenario()
    node = edgeopt.EdgeNode()
    node.storage_cap = 10.0
    node.compute_cap = 10.0
    node.lan_delay = 0.02
    svc = edgeopt.Service()
    svc.storage_req = 20.0
    svc.compute_req = 1.0
    svc.data_ratio = 1.0
    svc.core_bandwidth = 4.0
    svc.outsource_weight = 0.5
    s.nodes = [node]
    s.services = [svc]
    s.arrivals = [2.0]
    topo = edgeopt.Topology()
    topo.neighbors = [[]]
    s.topology = topo
    s.validate()
    report = edgeopt.solve_p2(s, edgeopt.CachingPolicy(1, 1))
    assert report.objective == pytest.approx(1.0 / 2 + 1.0, rel=1e-9)
    assert math.isclose(report.total_outsourcing(), 2.0, rel_tol=1e-9)


def test_oracle_probes():
    s = edgeopt.generate(small_params())
    caching = edgeopt.greedy_caching(s)
    probe = edgeopt.convexity_probe(s, caching, 200, 5)
    assert probe.midpoint_violations == 0
    assert probe.ok()
    dist = edgeopt.empirical_stationary_distribution(s, 0.05, 20000, 3)
    assert len(dist.states) == 27
    assert sum(dist.frequency) == pytest.approx(1.0, abs=1e-9)
