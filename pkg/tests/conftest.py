import random
from pathlib import Path

import pytest

from emnet.network import Edge, EdgeKind, Network, Platform, load_scenario_file
from emnet.physics import CommParams, JammerParams, RadarParams

DATA = Path(__file__).resolve().parents[1] / "src" / "emnet" / "data"
BUNDLED = DATA / "carrier_fleet.json"

RADAR = RadarParams(1e5, 1e3, 0.1, 2.0, 1000.0, 60.0, 1e6, 3.0, 1.0)
COMM = CommParams(20.0, 1.0, 1.0, 0.3, 1e-12)
JAMMER = JammerParams(1.0, 10.0, 0.03)

DET, COM, INT = EdgeKind.DETECTION, EdgeKind.COMMUNICATION, EdgeKind.INTERFERENCE


def plat(pid, side, funcs, pos=(0.0, 0.0, 0.0), weight=None):
    return Platform(
        id=pid,
        side=side,
        functions=frozenset(funcs),
        position=pos,
        comm=COMM,
        radar=RADAR if "S" in funcs else None,
        jammer=JAMMER if "I" in funcs else None,
        target_weight=weight,
        label=pid,
    )


def net(platforms, edges, terms=None, **opts):
    from emnet.network import BuildOptions

    return Network(platforms, [Edge(*e) for e in edges], terms, BuildOptions(**opts))


def random_network(rng: random.Random, max_platforms=8, p_edge=0.5):
    """Random platforms, functions and typed edges with random capabilities."""
    n = rng.randint(2, max_platforms)
    plats = []
    for k in range(n):
        side = "B" if k == 0 else rng.choice("AB")
        funcs = {f for f in "SDI" if rng.random() < 0.5}
        plats.append(plat(f"p{k}", side, funcs, weight=rng.choice([None, rng.random()])))
    edges = []
    for a in plats:
        for b in plats:
            if a.id == b.id:
                continue
            cap = rng.choice([rng.random(), 1.0, 0.5])
            if a.side != b.side and b.has("S") and rng.random() < p_edge:
                edges.append((a.id, b.id, DET, cap))
            if a.side == b.side and rng.random() < p_edge:
                edges.append((a.id, b.id, COM, cap))
            if a.side != b.side and a.has("I") and rng.random() < p_edge:
                edges.append((a.id, b.id, INT, cap))
    return net(plats, edges, static_interference=True)


@pytest.fixture(scope="session")
def bundled_scenario():
    return load_scenario_file(BUNDLED)


@pytest.fixture(scope="session")
def bundled_network(bundled_scenario):
    from emnet.network import build_network

    return build_network(bundled_scenario)


@pytest.fixture(scope="session")
def bundled_options(bundled_scenario):
    from emnet.cli import resolve_options

    return resolve_options(bundled_scenario)


@pytest.fixture(scope="session")
def bundled_reports(bundled_network, bundled_options):
    from emnet.effectiveness import deletion_reports

    _, cycle, rank = bundled_options
    return deletion_reports(bundled_network, cycle, rank, threads=1)


@pytest.fixture(scope="session")
def bundled_ranking(bundled_network, bundled_reports):
    from emnet.effectiveness import rank_rows

    return rank_rows(*bundled_reports, bundled_network)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS):
            terminalreporter.write_line(line)
