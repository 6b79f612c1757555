import random
from pathlib import Path

import pytest

from cpaforge import (
    AttackSpec,
    CyberLink,
    CyberNode,
    CyberTopology,
    SensorRef,
    add_cyber_link,
    add_cyber_node,
    build_attack,
)

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures() -> Path:
    return FIXTURES


@pytest.fixture
def ctown_text() -> str:
    return (FIXTURES / "ctown.inp").read_text()


@pytest.fixture
def ctown_model(ctown_text):
    from cpaforge import parse_inp

    return parse_inp(ctown_text, source_name="ctown.inp")


def random_topology(rng: random.Random) -> CyberTopology:
    """A valid random cyber topology (model-free) for round-trip exercises."""
    quantities = ("pressure", "level", "flow", "status")
    n_nodes = rng.randint(1, 6)
    topology = CyberTopology(provenance=rng.choice(["", "net.inp", "plant-a.inp"]))
    for i in range(n_nodes):
        sensors = frozenset(
            SensorRef(f"E{rng.randint(1, 9)}", rng.choice(quantities))
            for _ in range(rng.randint(0, 3))
        )
        actuators = frozenset(
            f"A{rng.randint(1, 9)}" for _ in range(rng.randint(0, 2))
        )
        controls = frozenset(rng.sample(range(12), rng.randint(0, 3)))
        topology = add_cyber_node(
            topology,
            CyberNode(id=f"N{i}", sensors=sensors, actuators=actuators, controls=controls),
        )
    ids = topology.node_ids()
    candidates = [(a, b) for a in ids for b in ids if a != b]
    rng.shuffle(candidates)
    for source, destination in candidates[: rng.randint(0, len(candidates))]:
        source_node = topology.find_node(source)
        carried = frozenset(
            s for s in source_node.sensors if rng.random() < 0.5
        )
        topology = add_cyber_link(
            topology, CyberLink(source=source, destination=destination, sensors=carried)
        )
    return topology


def random_attacks(rng: random.Random, topology: CyberTopology) -> tuple[AttackSpec, ...]:
    """Attacks of every applicable kind against the given topology."""
    attacks: list[AttackSpec] = []

    def window():
        start = rng.choice([0, 2.5, "T1.LEVEL ABOVE 4"]) if sensed else rng.uniform(0, 5)
        if isinstance(start, str):
            end = "END"
        else:
            end = rng.choice(["END", start + rng.uniform(0.5, 20)])
        return start, end

    sensed = sorted(topology.sensed())
    for _ in range(rng.randint(0, 2)):
        if not sensed:
            break
        ref = rng.choice(sensed)
        start, end = window()
        params = {"target": f"{ref.element}.{ref.quantity}", "start": start, "end": end}
        if rng.random() < 0.5:
            params["value"] = round(rng.uniform(-5, 50), 3)
        else:
            params["offset"] = round(rng.uniform(-5, 5), 3)
        attacks.append(build_attack("sensor", params, topology, existing=attacks))

    links = list(topology.links)
    if links and rng.random() < 0.8:
        link = rng.choice(links)
        attacks.append(
            build_attack(
                "communication",
                {
                    "target": f"{link.source}->{link.destination}",
                    "start": 1,
                    "end": 7,
                    "offset": round(rng.uniform(-3, 3), 2),
                },
                topology,
                existing=attacks,
            )
        )

    actuated = sorted(topology.actuated())
    if actuated and rng.random() < 0.8:
        attacks.append(
            build_attack(
                "actuator",
                {
                    "target": rng.choice(actuated),
                    "start": 0,
                    "end": rng.uniform(1, 30),
                    "state": rng.choice(["OPEN", "CLOSED", 0.75]),
                },
                topology,
                existing=attacks,
            )
        )

    owned = sorted(topology.owned_controls())
    if owned and rng.random() < 0.8:
        attacks.append(
            build_attack(
                "control",
                {
                    "target": f"RULE{rng.choice(owned)}",
                    "start": 0,
                    "end": "END",
                    "rule": rng.choice(
                        [
                            "LINK PU1 CLOSED IF NODE T1 ABOVE 8",
                            "LINK V9 0.25 AT TIME 12",
                            "LINK P2 OPEN AT CLOCKTIME 6 AM",
                        ]
                    ),
                },
                topology,
                existing=attacks,
            )
        )
    return tuple(attacks)
