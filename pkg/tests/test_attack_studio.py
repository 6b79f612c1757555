import math
import random

import pytest

from cpaforge.attack_studio import (
    ATTACK_KINDS,
    AttackSpec,
    AttackWindow,
    InjectionPayload,
    TimeCondition,
    ValueCondition,
    attack_from_json_dict,
    attack_to_json_dict,
    build_attack,
    next_attack_id,
    parse_condition_text,
    parse_cpa,
    parse_target_text,
    render_cpa,
    validate_attack,
)
from cpaforge.cyber_topology import (
    CyberLink,
    CyberNode,
    SensorRef,
    add_cyber_link,
    add_cyber_node,
    derive_baseline_topology,
)
from cpaforge.errors import (
    IncompleteParams,
    InvalidWindow,
    MalformedSection,
    UnknownAttackKind,
    UnknownTarget,
    ValidationFailed,
)
from cpaforge.inp_model import ControlRule, LinkAction, NodeLevelTrigger

from conftest import random_attacks, random_topology


@pytest.fixture
def wired(ctown_model):
    """Baseline topology plus a SCADA node and a few links."""
    topology = derive_baseline_topology(ctown_model.controls, ctown_model)
    topology = add_cyber_node(topology, CyberNode(id="SCADA"), ctown_model)
    for plc in ("PLC_PU1", "PLC_PU7"):
        node = topology.find_node(plc)
        topology = add_cyber_link(topology, CyberLink(plc, "SCADA", node.sensors))
    topology = add_cyber_link(topology, CyberLink("SCADA", "PLC_PU1"))
    return topology


class TestBuildAttack:
    def test_sensor(self, wired, ctown_model):
        attack = build_attack(
            "sensor",
            {"target": "T1.LEVEL", "start": 5, "end": 20, "value": 4.5},
            wired,
            ctown_model,
        )
        assert attack.id == "ATK1"
        assert attack.target == SensorRef("T1", "level")
        assert attack.window == AttackWindow(TimeCondition(5.0), TimeCondition(20.0))
        assert attack.payload == InjectionPayload("value", 4.5)

    def test_communication(self, wired, ctown_model):
        attack = build_attack(
            "communication",
            {"target": "PLC_PU1->SCADA", "offset": -2},
            wired,
            ctown_model,
        )
        assert attack.target == ("PLC_PU1", "SCADA")
        assert attack.window.start == TimeCondition(0.0)
        assert attack.window.end == TimeCondition(math.inf)
        assert attack.payload == InjectionPayload("offset", -2.0)

    def test_actuator(self, wired, ctown_model):
        attack = build_attack(
            "actuator",
            {"target": "PU1", "start": "T1.LEVEL ABOVE 5", "state": "CLOSED"},
            wired,
            ctown_model,
        )
        assert attack.target == "PU1"
        assert attack.window.start == ValueCondition(SensorRef("T1", "level"), "above", 5.0)
        assert attack.payload == LinkAction("closed")

    def test_actuator_setting(self, wired, ctown_model):
        attack = build_attack(
            "actuator", {"target": "V2", "state": 0.4}, wired, ctown_model
        )
        assert attack.payload == LinkAction("setting", 0.4)

    def test_control(self, wired, ctown_model):
        attack = build_attack(
            "control",
            {"target": "RULE9", "rule": "LINK V2 OPEN IF NODE T1 ABOVE 2"},
            wired,
            ctown_model,
        )
        assert attack.target == 9
        assert attack.payload == ControlRule(
            9, "V2", LinkAction("open"), NodeLevelTrigger("T1", "above", 2.0)
        )

    def test_ids_count_up_and_skip_removed(self, wired):
        first = build_attack("sensor", {"target": "T1.LEVEL", "value": 1}, wired)
        third = AttackSpec(
            id="ATK7", kind=first.kind, target=first.target,
            window=first.window, payload=first.payload,
        )
        assert next_attack_id([first, third]) == "ATK8"
        assert next_attack_id([]) == "ATK1"

    def test_unknown_kind(self, wired):
        with pytest.raises(UnknownAttackKind):
            build_attack("zero_day", {"target": "T1.LEVEL"}, wired)


class TestParamValidation:
    def test_target_required(self, wired):
        with pytest.raises(IncompleteParams):
            build_attack("sensor", {"value": 1}, wired)

    def test_exactly_one_of_value_offset(self, wired):
        with pytest.raises(IncompleteParams):
            build_attack("sensor", {"target": "T1.LEVEL"}, wired)
        with pytest.raises(IncompleteParams):
            build_attack(
                "sensor", {"target": "T1.LEVEL", "value": 1, "offset": 2}, wired
            )

    def test_bad_amount(self, wired):
        with pytest.raises(IncompleteParams):
            build_attack("sensor", {"target": "T1.LEVEL", "value": "much"}, wired)

    def test_state_required(self, wired):
        with pytest.raises(IncompleteParams):
            build_attack("actuator", {"target": "PU1"}, wired)
        with pytest.raises(IncompleteParams):
            build_attack("actuator", {"target": "PU1", "state": "AJAR"}, wired)

    def test_rule_required_and_parsed(self, wired):
        with pytest.raises(IncompleteParams):
            build_attack("control", {"target": "RULE9"}, wired)
        with pytest.raises(IncompleteParams):
            build_attack("control", {"target": "RULE9", "rule": "PIPE X OPEN"}, wired)


class TestTargetResolution:
    def test_unsensed_sensor(self, wired, ctown_model):
        with pytest.raises(UnknownTarget):
            build_attack(
                "sensor", {"target": "T2.LEVEL", "value": 1}, wired, ctown_model
            )

    def test_sensor_target_shape(self, wired):
        with pytest.raises(UnknownTarget):
            build_attack("sensor", {"target": "T9", "value": 1}, wired)

    def test_missing_link(self, wired):
        with pytest.raises(UnknownTarget):
            build_attack(
                "communication", {"target": "SCADA->PLC_V2", "value": 0}, wired
            )

    def test_unactuated_element(self, wired):
        with pytest.raises(UnknownTarget):
            build_attack("actuator", {"target": "P10", "state": "OPEN"}, wired)

    def test_actuator_must_be_pump_or_valve_with_model(self, ctown_model, wired):
        # a node may legitimately actuate a pipe, but forcing pipes is out of scope
        topology = add_cyber_node(
            wired, CyberNode(id="PLC_P10", actuators=frozenset({"P10"})), ctown_model
        )
        with pytest.raises(UnknownTarget):
            build_attack(
                "actuator", {"target": "P10", "state": "CLOSED"}, topology, ctown_model
            )
        # without the model the shape check is all we have, so it builds
        assert build_attack("actuator", {"target": "P10", "state": "CLOSED"}, topology)

    def test_unowned_rule(self, wired, ctown_model):
        with pytest.raises(UnknownTarget):
            build_attack(
                "control",
                {"target": "RULE11", "rule": "LINK PU1 OPEN AT TIME 1"},
                wired,
                ctown_model,
            )

    def test_replacement_rule_references_checked_against_model(self, wired, ctown_model):
        with pytest.raises(UnknownTarget):
            build_attack(
                "control",
                {"target": "RULE9", "rule": "LINK GHOST OPEN AT TIME 1"},
                wired,
                ctown_model,
            )
        with pytest.raises(UnknownTarget):
            build_attack(
                "control",
                {"target": "RULE9", "rule": "LINK V2 OPEN IF NODE GHOST ABOVE 1"},
                wired,
                ctown_model,
            )

    def test_parse_target_text_shapes(self):
        assert parse_target_text("sensor", "t1.level") == SensorRef("T1", "level")
        assert parse_target_text("communication", "a->b") == ("A", "B")
        assert parse_target_text("actuator", "pu1") == "PU1"
        assert parse_target_text("control", "rule3") == 3
        with pytest.raises(ValueError):
            parse_target_text("communication", "a-b")
        with pytest.raises(ValueError):
            parse_target_text("control", "3")


class TestWindows:
    def test_start_must_precede_end(self, wired):
        with pytest.raises(InvalidWindow):
            build_attack(
                "sensor", {"target": "T1.LEVEL", "start": 9, "end": 9, "value": 1}, wired
            )
        with pytest.raises(InvalidWindow):
            build_attack(
                "sensor", {"target": "T1.LEVEL", "start": 9, "end": 2, "value": 1}, wired
            )

    def test_negative_time_rejected(self, wired):
        with pytest.raises(InvalidWindow):
            build_attack(
                "sensor", {"target": "T1.LEVEL", "start": -1, "value": 1}, wired
            )

    def test_value_conditions_do_not_order(self, wired):
        attack = build_attack(
            "sensor",
            {
                "target": "T1.LEVEL",
                "start": "T1.LEVEL ABOVE 5",
                "end": "T1.LEVEL BELOW 2",
                "value": 1,
            },
            wired,
        )
        assert isinstance(attack.window.start, ValueCondition)

    def test_condition_sensor_checked_against_model(self, wired, ctown_model):
        with pytest.raises(InvalidWindow):
            build_attack(
                "sensor",
                {"target": "T1.LEVEL", "start": "T9.LEVEL ABOVE 5", "value": 1},
                wired,
                ctown_model,
            )

    def test_condition_text_forms(self):
        assert parse_condition_text("10") == TimeCondition(10.0)
        assert parse_condition_text("TIME 10") == TimeCondition(10.0)
        assert parse_condition_text("END") == TimeCondition(math.inf)
        assert parse_condition_text("j1.pressure below 30") == ValueCondition(
            SensorRef("J1", "pressure"), "below", 30.0
        )
        for bad in ("", "TIME", "TIME x", "T1.LEVEL ABOVE", "T1 ABOVE 4", "TIME 4 5"):
            with pytest.raises(ValueError):
                parse_condition_text(bad)


class TestRender:
    def test_golden_baseline(self, ctown_model, fixtures):
        topology = derive_baseline_topology(ctown_model.controls, ctown_model)
        assert render_cpa(topology) == (fixtures / "ctown_baseline.cpa").read_text()

    def test_empty_document_is_headers_only(self):
        from cpaforge.cyber_topology import CyberTopology

        assert render_cpa(CyberTopology()) == (
            "[CYBERNODES]\n\n[CYBERLINKS]\n\n[CYBERATTACKS]\n\n[CYBEROPTIONS]\n"
        )

    def test_attack_rows_are_canonical(self, wired):
        attack = build_attack(
            "sensor", {"target": "T1.LEVEL", "start": 2, "end": 9, "value": 4.0}, wired
        )
        text = render_cpa(wired, [attack])
        assert "ATK1 SENSOR T1.LEVEL TIME 2 TIME 9 VALUE 4\n" in text
        assert text.endswith("\n")
        assert "\r" not in text

    def test_render_is_deterministic(self, wired):
        attacks = [build_attack("sensor", {"target": "T1.LEVEL", "value": 1}, wired)]
        assert render_cpa(wired, attacks) == render_cpa(wired, attacks)

    def test_options_rendered_sorted_by_insertion(self, wired):
        text = render_cpa(wired, [], {"seed": "42", "note": "drill run"})
        assert "SEED 42\n" in text
        assert "NOTE drill run" in text

    def test_source_option_reserved(self, wired):
        with pytest.raises(ValidationFailed):
            render_cpa(wired, [], {"source": "elsewhere.inp"})

    def test_stale_attack_fails_validation(self, wired):
        from cpaforge.cyber_topology import remove_cyber_node

        attack = build_attack("sensor", {"target": "J280.PRESSURE", "value": 0}, wired)
        smaller = remove_cyber_node(wired, "PLC_PU7")
        with pytest.raises(ValidationFailed) as err:
            render_cpa(smaller, [attack])
        assert any("J280" in d.message for d in err.value.diagnostics)

    def test_duplicate_attack_ids_rejected(self, wired):
        attack = build_attack("sensor", {"target": "T1.LEVEL", "value": 1}, wired)
        with pytest.raises(ValidationFailed):
            render_cpa(wired, [attack, attack])


class TestParse:
    def test_round_trip_all_kinds(self, wired, ctown_model):
        attacks = [
            build_attack("sensor", {"target": "T1.LEVEL", "start": 1, "end": 5, "value": 9}, wired, ctown_model),
        ]
        attacks.append(
            build_attack(
                "communication",
                {"target": "PLC_PU1->SCADA", "start": "J280.PRESSURE BELOW 10", "end": "END", "offset": 3.5},
                wired, ctown_model, existing=attacks,
            )
        )
        attacks.append(
            build_attack("actuator", {"target": "V2", "state": 0.25}, wired, ctown_model, existing=attacks)
        )
        attacks.append(
            build_attack(
                "control",
                {"target": "RULE10", "rule": "LINK V2 CLOSED AT CLOCKTIME 6 AM"},
                wired, ctown_model, existing=attacks,
            )
        )
        text = render_cpa(wired, attacks, {"note": "drill"})
        parsed = parse_cpa(text)
        assert parsed.topology == wired
        assert parsed.attacks == tuple(attacks)
        assert parsed.options == (("NOTE", "drill"),)
        assert render_cpa(parsed.topology, parsed.attacks, dict(parsed.options)) == text

    def test_tolerates_comments_and_case(self):
        text = (
            "; scenario\n[CYBERNODES]\nplc1 {t1.level} {pu1} {0} ; node\n\n"
            "[CYBERLINKS]\n\n[CYBERATTACKS]\natk1 sensor t1.level time 1 end value 2\n\n"
            "[CYBEROPTIONS]\n"
        )
        parsed = parse_cpa(text)
        assert parsed.topology.node_ids() == ["PLC1"]
        assert parsed.attacks[0].id == "ATK1"
        assert parsed.attacks[0].kind == "sensor"

    def test_sections_required_and_ordered(self):
        with pytest.raises(MalformedSection):
            parse_cpa("[CYBERNODES]\n")
        with pytest.raises(MalformedSection) as err:
            parse_cpa("[CYBERLINKS]\n\n[CYBERNODES]\n")
        assert err.value.line == 1

    def test_content_before_header(self):
        with pytest.raises(MalformedSection) as err:
            parse_cpa("N1 {} {} {}\n[CYBERNODES]\n")
        assert err.value.line == 1

    def test_bad_header(self):
        with pytest.raises(MalformedSection):
            parse_cpa("[CYBERNODES\n")
        with pytest.raises(MalformedSection):
            parse_cpa("[NOPE]\n")

    def test_unknown_attack_kind_reports_line(self):
        text = (
            "[CYBERNODES]\nN1 {} {} {}\n\n[CYBERLINKS]\n\n"
            "[CYBERATTACKS]\nATK1 WORM N1 TIME 0 END VALUE 1\n\n[CYBEROPTIONS]\n"
        )
        with pytest.raises(UnknownAttackKind) as err:
            parse_cpa(text)
        assert err.value.line == 7

    @pytest.mark.parametrize(
        "row",
        [
            "ATK1 SENSOR T1.LEVEL TIME 0 END",  # payload missing
            "ATK1 SENSOR T1.LEVEL TIME 0 END NUKE 1",
            "ATK1 SENSOR T1.LEVEL TIME x END VALUE 1",
            "ATK1 SENSOR T1 TIME 0 END VALUE 1",
            "ATK1 ACTUATOR PU1 TIME 0 END SETTING",
            "ATK1 CONTROL RULE0 TIME 0 END LINK",
            "ATK1 CONTROL R0 TIME 0 END LINK PU1 OPEN AT TIME 1",
            "ATK1 COMMUNICATION A>B TIME 0 END VALUE 1",
        ],
    )
    def test_malformed_attack_rows(self, row):
        text = (
            "[CYBERNODES]\nN1 {T1.LEVEL} {PU1} {0}\n\n[CYBERLINKS]\n\n"
            f"[CYBERATTACKS]\n{row}\n\n[CYBEROPTIONS]\n"
        )
        with pytest.raises(MalformedSection) as err:
            parse_cpa(text)
        assert err.value.line == 7

    def test_bad_node_rows(self):
        for row in ("N1 {} {}", "N1 <> {} {}", "N1 {} {} {x}", "N1 {T1.WEIGHT} {} {}"):
            text = f"[CYBERNODES]\n{row}\n\n[CYBERLINKS]\n\n[CYBERATTACKS]\n\n[CYBEROPTIONS]\n"
            with pytest.raises(MalformedSection):
                parse_cpa(text)

    def test_link_rows_validated(self):
        text = (
            "[CYBERNODES]\nN1 {} {} {}\n\n[CYBERLINKS]\nN1 GHOST {}\n\n"
            "[CYBERATTACKS]\n\n[CYBEROPTIONS]\n"
        )
        with pytest.raises(MalformedSection) as err:
            parse_cpa(text)
        assert err.value.line == 5

    def test_source_option_becomes_provenance(self):
        text = (
            "[CYBERNODES]\n\n[CYBERLINKS]\n\n[CYBERATTACKS]\n\n"
            "[CYBEROPTIONS]\nSOURCE plant b.inp\n"
        )
        assert parse_cpa(text).topology.provenance == "plant b.inp"


class TestRandomRoundTrips:
    def test_fifty_random_documents(self):
        rng = random.Random(77)
        for _ in range(50):
            topology = random_topology(rng)
            attacks = random_attacks(rng, topology)
            text = render_cpa(topology, attacks)
            parsed = parse_cpa(text)
            assert parsed.topology == topology
            assert parsed.attacks == attacks
            assert render_cpa(parsed.topology, parsed.attacks) == text


class TestJsonCodec:
    def test_all_kinds_round_trip(self, wired, ctown_model):
        attacks = [
            build_attack("sensor", {"target": "T1.LEVEL", "value": 1}, wired),
            build_attack(
                "communication",
                {"target": "SCADA->PLC_PU1", "start": 1, "end": 2, "offset": -1},
                wired,
            ),
            build_attack("actuator", {"target": "PU1", "state": "OPEN"}, wired),
            build_attack(
                "control",
                {"target": "RULE0", "rule": "LINK PU1 CLOSED IF NODE T1 ABOVE 9"},
                wired,
            ),
        ]
        for attack in attacks:
            doc = attack_to_json_dict(attack)
            assert attack_from_json_dict(doc) == attack

    def test_open_window_serialises_as_null(self, wired):
        attack = build_attack("sensor", {"target": "T1.LEVEL", "value": 1}, wired)
        doc = attack_to_json_dict(attack)
        assert doc["window"]["end"] == {"type": "time", "hours": None}

    def test_validate_attack_direct(self, wired):
        attack = build_attack("sensor", {"target": "T1.LEVEL", "value": 1}, wired)
        validate_attack(attack, wired)  # should not raise
        assert attack.kind in ATTACK_KINDS
