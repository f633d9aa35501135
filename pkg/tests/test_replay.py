import json

import pytest

from conftest import make_state, put_city, put_worker

from luxsim.match import MatchConfig, run_match
from luxsim.replay import Replay, dump_replay, state_checksum, verify_replay


def play(seed=0, **kwargs):
    return run_match(MatchConfig(agent_a="random:1", agent_b="random:2", seed=seed, **kwargs))


class TestChecksum:
    def test_stable(self):
        state = make_state()
        put_worker(state, 0, 1, 1, wood=5)
        put_city(state, 1, (5, 5), fuel=9)
        assert state_checksum(state) == state_checksum(state.copy())

    def test_sensitive_to_every_field(self):
        base = make_state()
        unit = put_worker(base, 0, 1, 1, wood=5)
        put_city(base, 1, (5, 5), fuel=9)
        reference = state_checksum(base)

        tweaks = [
            lambda s: setattr(s, "turn", 1),
            lambda s: setattr(s.units[unit.id], "wood", 6),
            lambda s: setattr(s.units[unit.id], "cooldown", 0.25),
            lambda s: s.move_unit(unit.id, 2, 1),
            lambda s: setattr(s.teams[0], "research_points", 1),
            lambda s: setattr(next(iter(s.cities.values())), "fuel", 10),
            lambda s: s.res_amt.__setitem__((0, 0), 1) or s.res_kind.__setitem__((0, 0), 1),
            lambda s: s.road.__setitem__((3, 3), 0.75),
        ]
        for i, tweak in enumerate(tweaks):
            state = base.copy()
            tweak(state)
            assert state_checksum(state) != reference, f"tweak {i} not detected"


class TestReplayRoundTrip:
    def test_verifies(self):
        result = play()
        assert verify_replay(result.replay).ok

    def test_json_round_trip_verifies(self):
        result = play()
        text = result.replay.to_json()
        assert verify_replay(Replay.from_json(text)).ok

    def test_byte_stable(self):
        a = play().replay.to_json()
        b = play().replay.to_json()
        assert a == b
        assert Replay.from_json(a).to_json() == a

    def test_corrupted_action_detected(self):
        from luxsim.replay import resimulate

        replay = play().replay
        # find a recorded team-A action that demonstrably executed (a
        # successful move), so removing it must change the state
        target = text = None
        for i, _state, events in resimulate(replay):
            moved_ids = {uid for uid, _, _ in events.moves}
            for candidate in replay.turns[i]["A"]:
                parts = candidate.split()
                if (
                    len(parts) == 4
                    and parts[0] == "u"
                    and parts[2] == "move"
                    and parts[3] != "C"
                    and int(parts[1]) in moved_ids
                ):
                    target, text = i, candidate
                    break
            if target is not None:
                break
        assert target is not None
        replay.turns[target]["A"].remove(text)
        result = verify_replay(replay)
        assert not result.ok
        assert result.first_divergent_turn == target

    def test_corrupted_checksum_detected(self):
        replay = play().replay
        bad = "0" * 64
        replay.checksums[3] = bad
        result = verify_replay(replay)
        assert not result.ok
        assert result.first_divergent_turn == 3

    def test_count_mismatch_detected(self):
        replay = play().replay
        replay.checksums.pop()
        assert not verify_replay(replay).ok

    def test_version_mismatch_refused_with_both_versions(self):
        doc = json.loads(play().replay.to_json())
        doc["format_version"] = 99
        with pytest.raises(ValueError, match=r"99.*version 1|version 1.*99"):
            Replay.from_json(json.dumps(doc))


class TestDump:
    def test_dump_has_turn_blocks(self):
        result = play()
        text = dump_replay(result.replay)
        assert text.count("-- turn") == len(result.replay.turns)
        assert "outcome:" in text
