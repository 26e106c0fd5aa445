import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import BUNDLED, COM, DET, INT, net, plat, random_network
from emnet.network import (
    BuildOptions,
    NodeNotFound,
    ScenarioError,
    build_network,
    delete_node,
    id_key,
    interference_capability,
    load_scenario,
    weighted_degradation,
)
from emnet.physics import detection_probability, link_capability, radar_snr


def bundled_doc():
    return json.loads(BUNDLED.read_text())


RADAR_DOC = {
    "transmit_power": 1e5, "antenna_gain": 1e3, "wavelength": 0.1,
    "horizontal_lobe_width": 2.0, "pulse_repetition_frequency": 1000.0,
    "scan_rate": 60.0, "receiver_bandwidth": 1e6, "noise_figure": 3.0,
}
COMM_DOC = {"transmit_power": 20.0, "tx_gain": 1.0, "rx_gain": 1.0, "wavelength": 0.3, "noise_power": 1e-12}


def pdoc(pid, side, funcs, pos, **extra):
    d = {"id": pid, "side": side, "functions": funcs, "position": pos, "comm": dict(COMM_DOC)}
    if "S" in funcs:
        d["radar"] = dict(RADAR_DOC)
    if "I" in funcs:
        d["jammer"] = {"transmit_power": 1.0, "tx_gain": 10.0, "wavelength": 0.03}
    d.update(extra)
    return d


def doc(*platforms, **options):
    return {"name": "t", "platforms": list(platforms), "options": options}


class TestLoader:
    def test_bundled(self, bundled_scenario):
        assert len(bundled_scenario.platforms) == 17
        sides = [p.side for p in bundled_scenario.platforms]
        assert sides.count("A") == 14 and sides.count("B") == 3

    def test_empty_platform_list(self):
        assert load_scenario(doc()).platforms == ()

    def test_accepts_json_text(self):
        text = json.dumps(doc(pdoc("a", "A", ["C"], [0, 0, 0])))
        assert [p.id for p in load_scenario(text).platforms] == ["a"]

    def test_sensor_without_radar(self):
        bad = pdoc("s", "A", ["S"], [0, 0, 0])
        del bad["radar"]
        with pytest.raises(ScenarioError, match=r"platforms\[0\].*radar"):
            load_scenario(doc(bad))

    def test_duplicate_id(self):
        with pytest.raises(ScenarioError, match="duplicate"):
            load_scenario(doc(pdoc("a", "A", ["C"], [0, 0, 0]), pdoc("a", "B", ["C"], [1, 0, 0])))

    def test_unknown_field_named(self):
        bad = pdoc("a", "A", ["C"], [0, 0, 0])
        bad["comm"]["colour"] = "red"
        with pytest.raises(ScenarioError, match="colour"):
            load_scenario(doc(bad))

    def test_bad_number_names_path(self):
        bad = pdoc("x", "A", ["S"], [0, 0, 0])
        bad["radar"]["wavelength"] = -1
        with pytest.raises(ScenarioError, match=r"radar.*wavelength"):
            load_scenario(doc(bad))

    def test_unknown_ber_model(self):
        bad = pdoc("a", "A", ["C"], [0, 0, 0])
        bad["comm"]["ber_model"] = "nope"
        with pytest.raises(ScenarioError, match="nope"):
            load_scenario(doc(bad))

    def test_malformed_text(self):
        with pytest.raises(ScenarioError):
            load_scenario("{not json")


class TestBuild:
    def test_single_detection_edge(self):
        sc = load_scenario(doc(pdoc("s", "A", ["S"], [0, 0, 0]), pdoc("t", "B", ["C"], [30e3, 0, 0], rcs=5.0)))
        n = build_network(sc)
        det = [e for e in n.edges if e.kind is DET]
        assert len(det) == 1
        s = sc.platforms[0]
        expected = detection_probability(radar_snr(s.radar, 5.0, 30e3), s.radar.pulses)
        assert det[0].src == "t" and det[0].dst == "s"
        assert det[0].capability == expected

    def test_symmetric_comm_pair(self):
        sc = load_scenario(doc(pdoc("a", "A", ["C"], [0, 0, 0]), pdoc("b", "A", ["C"], [20e3, 0, 0])))
        n = build_network(sc)
        ab, ba = n.edge("a", "b", COM), n.edge("b", "a", COM)
        assert ab is not None and ba is not None
        assert ab.capability == ba.capability == link_capability(sc.platforms[0].comm, sc.platforms[1].comm, 20e3)
        assert 0 < ab.capability < 1

    def test_no_cross_side_comm(self, bundled_network):
        for e in bundled_network.edges:
            a, b = bundled_network.platforms[e.src], bundled_network.platforms[e.dst]
            if e.kind is COM:
                assert a.side == b.side
            elif e.kind is DET:
                assert a.side != b.side and b.has("S")
            else:
                assert a.side != b.side and a.has("I")

    def test_capabilities_in_unit_interval(self, bundled_network):
        assert all(0.0 <= e.capability <= 1.0 for e in bundled_network.edges)

    def test_jamming_never_helps(self, bundled_scenario):
        jammed = build_network(bundled_scenario)
        clean = build_network(bundled_scenario, BuildOptions(
            detection_prune_threshold=0.01, apply_adversary_jamming=False))
        lowered = 0
        for e in clean.edges:
            if e.kind is INT:
                continue
            j = jammed.edge(e.src, e.dst, e.kind)
            assert j.capability <= e.capability
            lowered += j.capability < e.capability
        assert lowered > 0

    def test_jam_free_equals_zero_power(self, bundled_scenario):
        d = bundled_doc()
        for p in d["platforms"]:
            if p.get("jammer"):
                p["jammer"]["transmit_power"] = 0.0
        silent = build_network(load_scenario(d))
        clean = build_network(bundled_scenario, BuildOptions(
            detection_prune_threshold=0.01, apply_adversary_jamming=False))
        a = {e.key: e.capability for e in silent.edges if e.kind is not INT}
        b = {e.key: e.capability for e in clean.edges if e.kind is not INT}
        assert a == b
        # silent jammers degrade nothing, so no interference edges survive
        assert not [e for e in silent.edges if e.kind is INT]

    def test_deterministic(self, bundled_scenario):
        assert build_network(bundled_scenario) == build_network(bundled_scenario)

    def test_platform_order_irrelevant(self, bundled_scenario):
        d = bundled_doc()
        random.Random(3).shuffle(d["platforms"])
        assert build_network(load_scenario(d)) == build_network(bundled_scenario)

    def test_prune_threshold(self, bundled_scenario):
        loose = build_network(bundled_scenario, BuildOptions(detection_prune_threshold=0.0))
        tight = build_network(bundled_scenario, BuildOptions(detection_prune_threshold=0.5))
        ld = {e.key for e in loose.edges if e.kind is DET}
        td = {e.key for e in tight.edges if e.kind is DET}
        assert td < ld


class TestInterference:
    @pytest.mark.parametrize(
        "pairs, expected",
        [
            ([(0.8, 0.4)], 0.5),
            ([(0.8, 0.4), (0.2, 0.1)], 0.5),
            ([(1.0, 0.5), (0.5, 0.5)], 1.0 / 3.0),
        ],
    )
    def test_hand_fixtures(self, pairs, expected):
        assert abs(weighted_degradation(pairs) - expected) <= 1e-12

    def test_no_edges_is_zero(self):
        assert weighted_degradation([]) == 0.0

    @given(st.lists(st.tuples(st.floats(1e-6, 1.0), st.floats(0.0, 1.0)), min_size=1, max_size=10))
    def test_convex_combination(self, raw):
        pairs = [(b, min(a, b)) for b, a in raw]
        deltas = [(b - a) / b for b, a in pairs]
        out = weighted_degradation(pairs)
        assert min(deltas) - 1e-12 <= out <= max(deltas) + 1e-12

    def test_gain_is_clamped(self):
        # an edge that improves counts as zero degradation
        assert weighted_degradation([(0.5, 0.9)]) == 0.0

    def test_bundled_edges_match_terms(self, bundled_network):
        n = 0
        for e in bundled_network.edges:
            if e.kind is INT:
                assert interference_capability(bundled_network, e.src, e.dst) == e.capability
                n += 1
        assert n > 0

    def test_requires_jammer(self, bundled_network):
        with pytest.raises(ValueError):
            interference_capability(bundled_network, "7", "B:F")
        with pytest.raises(ValueError):
            interference_capability(bundled_network, "1", "2")


def reweight_fixture():
    plats = [plat("i", "B", "I"), plat("j", "A", "C"), plat("k1", "A", "C"), plat("k2", "A", "C")]
    edges = [
        ("k1", "j", COM, 0.5, 1.0, 0.5),
        ("k2", "j", COM, 0.5, 0.5, 0.5),
        ("i", "j", INT, 1.0 / 3.0),
    ]
    terms = {("i", "j"): {("k1", "j", COM): (1.0, 0.5), ("k2", "j", COM): (0.5, 0.5)}}
    return net(plats, edges, terms)


class TestDeleteNode:
    def test_reweight(self):
        n = reweight_fixture()
        assert interference_capability(n, "i", "j") == pytest.approx(1 / 3, abs=1e-12)
        assert delete_node(n, "k2").edge("i", "j", INT).capability == pytest.approx(0.5, abs=1e-12)
        assert delete_node(n, "k1").edge("i", "j", INT).capability == 0.0
        # input untouched
        assert n.edge("i", "j", INT).capability == pytest.approx(1 / 3, abs=1e-12)

    def test_static_interference_keeps_value(self):
        n = reweight_fixture()
        static = net(list(n.platforms.values()), [
            (e.src, e.dst, e.kind, e.capability, e.pre_jamming_capability, e.post_jamming_capability)
            for e in n.edges
        ], n.interference_terms, static_interference=True)
        assert delete_node(static, "k2").edge("i", "j", INT).capability == pytest.approx(1 / 3)

    def test_isolated_node(self, bundled_scenario):
        d = bundled_doc()
        d["platforms"].append(pdoc("Z", "A", ["C"], [9e9, 9e9, 0]))
        n = build_network(load_scenario(d))
        assert not [e for e in n.edges if "Z" in (e.src, e.dst)]
        reduced = delete_node(n, "Z")
        assert reduced == build_network(bundled_scenario)

    def test_twice_raises(self, bundled_network):
        once = delete_node(bundled_network, "5")
        with pytest.raises(NodeNotFound):
            delete_node(once, "5")

    @pytest.mark.parametrize("seed", range(40))
    def test_induced_subgraph(self, seed):
        rng = random.Random(seed)
        n = random_network(rng)
        victim = rng.choice(list(n.platforms))
        reduced = delete_node(n, victim)
        kept = {e.key: e for e in n.edges if victim not in (e.src, e.dst)}
        assert {e.key for e in reduced.edges} == set(kept)
        for e in reduced.edges:
            assert e == kept[e.key]

    def test_bundled_revalues_only_interference(self, bundled_network):
        reduced = delete_node(bundled_network, "2")
        changed = [
            e for e in reduced.edges
            if e.capability != bundled_network.edge(e.src, e.dst, e.kind).capability
        ]
        assert changed and all(e.kind is INT for e in changed)
        assert all(0.0 <= e.capability <= 1.0 for e in reduced.edges)


def test_natural_id_order():
    assert sorted(["10", "2", "B:F", "1", "B:E"], key=id_key) == ["1", "2", "10", "B:E", "B:F"]
