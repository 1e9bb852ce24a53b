"""Wire protocol: session state machine, stream serving, TCP transparency."""

import io
import json

import pytest

from satedge.environment import ActionSet, Environment, sticky_policy
from satedge.errors import ActionError, ProtocolError
from satedge.gateway.protocol import (
    EXIT_OK,
    EXIT_PROTOCOL,
    PROTOCOL_VERSION,
    ProtocolServer,
    Session,
    connect_lines,
    outcome_payload,
    parse_actions,
    parse_listen_address,
    serve,
    snapshot_payload,
)

from .factories import actions_message, mini_scenario, snapshot_from_payload


def greeted_session(scenario=None) -> Session:
    session = Session(scenario or mini_scenario())
    replies, finished = session.handle_line(json.dumps({"type": "hello", "version": PROTOCOL_VERSION}))
    assert replies == [] and not finished
    return session


class TestSessionHandshake:
    def test_hello_payload_static_facts(self):
        scenario = mini_scenario(with_flight=True)
        hello = Session(scenario).hello()
        assert hello["type"] == "hello"
        assert hello["version"] == PROTOCOL_VERSION
        info = hello["scenario"]
        assert info["num_satellites"] == 2
        assert info["satellite_ids"] == [0, 1]
        assert info["num_slots"] == scenario.env.num_slots
        assert info["max_beams"] == scenario.env.max_beams
        kinds = {u["user_id"]: u["kind"] for u in info["users"]}
        assert kinds == {0: "ground", 1: "ground", 2: "ground", 3: "flight"}

    def test_messages_before_hello_rejected(self):
        session = Session(mini_scenario())
        replies, finished = session.handle_line(json.dumps({"type": "reset", "seed": 0}))
        assert not finished
        assert replies[0]["type"] == "error"
        assert replies[0]["code"] == "handshake_required"
        # the rejection is not fatal: a proper hello still opens the session
        replies, finished = session.handle_line(json.dumps({"type": "hello", "version": 1}))
        assert replies == [] and not finished

    def test_version_mismatch_closes_session(self):
        session = Session(mini_scenario())
        replies, finished = session.handle_line(json.dumps({"type": "hello", "version": 2}))
        assert finished
        assert [r["type"] for r in replies] == ["error", "close"]
        assert replies[0]["code"] == "version_mismatch"

    def test_missing_version_is_a_mismatch(self):
        session = Session(mini_scenario())
        replies, finished = session.handle_line(json.dumps({"type": "hello"}))
        assert finished
        assert replies[0]["code"] == "version_mismatch"

    def test_repeated_hello_is_idempotent(self):
        session = greeted_session()
        replies, finished = session.handle_line(json.dumps({"type": "hello", "version": 1}))
        assert replies == [] and not finished
        # even a wrong version on a re-hello does not kill the session
        replies, finished = session.handle_line(json.dumps({"type": "hello", "version": 99}))
        assert replies == [] and not finished


class TestSessionFlow:
    def test_reset_returns_first_observation(self):
        session = greeted_session()
        replies, finished = session.handle_line(json.dumps({"type": "reset", "seed": 3}))
        assert not finished
        (reply,) = replies
        assert reply["type"] == "observation"
        obs = reply["observation"]
        assert obs["slot"] == 0
        assert {s["sat_id"] for s in obs["satellites"]} == {0, 1}
        assert {u["user_id"] for u in obs["users"]} == {0, 1, 2}

    def test_reset_without_seed_allowed(self):
        session = greeted_session()
        replies, _ = session.handle_line(json.dumps({"type": "reset"}))
        assert replies[0]["type"] == "observation"

    def test_reset_rejects_non_integer_seed(self):
        session = greeted_session()
        for bad in ["7", 1.5, True]:
            replies, finished = session.handle_line(json.dumps({"type": "reset", "seed": bad}))
            assert replies[0]["code"] == "bad_message" and not finished

    def test_step_before_reset(self):
        session = greeted_session()
        replies, finished = session.handle_line(
            json.dumps({"type": "step", "actions": {"satellite": {}, "bandwidth": {}, "compute": {}}})
        )
        assert replies[0]["code"] == "not_reset" and not finished

    def test_step_after_done(self):
        scenario = mini_scenario(num_slots=1)
        session = greeted_session(scenario)
        session.handle_line(json.dumps({"type": "reset", "seed": 0}))
        shadow = Environment(scenario)
        snap = shadow.reset(0)
        msg = actions_message(sticky_policy(snap))
        replies, finished = session.handle_line(msg)
        assert replies[0]["done"] is True and not finished
        replies, finished = session.handle_line(msg)
        assert replies[0]["code"] == "episode_done" and not finished
        # a fresh reset revives the session
        replies, _ = session.handle_line(json.dumps({"type": "reset", "seed": 0}))
        assert replies[0]["type"] == "observation"

    def test_bad_actions_keep_session_alive(self):
        session = greeted_session()
        session.handle_line(json.dumps({"type": "reset", "seed": 0}))
        bad = json.dumps({"type": "step", "actions": {"satellite": {"0": 9}, "bandwidth": {"0": 0.1}, "compute": {"0": 0.1}}})
        replies, finished = session.handle_line(bad)
        assert replies[0]["code"] == "bad_actions" and not finished
        # the slot was not consumed: a valid step still answers slot 1
        shadow = Environment(mini_scenario())
        snap = shadow.reset(0)
        replies, _ = session.handle_line(actions_message(sticky_policy(snap)))
        assert replies[0]["type"] == "transition"
        assert replies[0]["observation"]["slot"] == 1

    def test_malformed_lines(self):
        session = greeted_session()
        for line in ["{not json", json.dumps([1, 2]), json.dumps({"no": "type"}), json.dumps({"type": 7})]:
            replies, finished = session.handle_line(line)
            assert replies[0]["code"] == "bad_message" and not finished

    def test_unknown_type(self):
        session = greeted_session()
        replies, finished = session.handle_line(json.dumps({"type": "pause"}))
        assert replies[0]["code"] == "unknown_type" and not finished

    def test_unknown_fields_ignored(self):
        session = greeted_session()
        replies, _ = session.handle_line(json.dumps({"type": "reset", "seed": 1, "trace": True, "tag": "x"}))
        assert replies[0]["type"] == "observation"

    def test_close(self):
        session = greeted_session()
        replies, finished = session.handle_line(json.dumps({"type": "close"}))
        assert replies == [{"type": "close"}] and finished


class TestParseActions:
    def test_round_trip(self):
        actions = ActionSet(satellite={0: 1, 2: 0}, bandwidth={0: 0.25, 2: 0.5}, compute={0: 0.1, 2: 0.2})
        raw = json.loads(actions_message(actions))["actions"]
        assert parse_actions(raw) == actions

    def test_rejects_non_object(self):
        with pytest.raises(ActionError):
            parse_actions([1, 2])
        with pytest.raises(ActionError):
            parse_actions({"satellite": {}, "bandwidth": []})  # missing/invalid sections

    def test_rejects_bad_user_key(self):
        with pytest.raises(ActionError, match="bad user id"):
            parse_actions({"satellite": {"x": 0}, "bandwidth": {"x": 0.1}, "compute": {"x": 0.1}})

    def test_rejects_non_numeric_value(self):
        for bad in [True, "0.4", None]:
            with pytest.raises(ActionError):
                parse_actions({"satellite": {"0": 0}, "bandwidth": {"0": bad}, "compute": {"0": 0.1}})


class TestServeStreams:
    def run_script(self, lines, scenario=None):
        reader = io.StringIO("".join(line + "\n" for line in lines))
        writer = io.StringIO()
        code = serve(reader, writer, scenario or mini_scenario())
        replies = [json.loads(line) for line in writer.getvalue().splitlines()]
        return code, replies

    def test_server_speaks_first(self):
        code, replies = self.run_script([json.dumps({"type": "close"})])
        # hello precedes anything else, even without a client hello
        assert replies[0]["type"] == "hello"
        assert replies[0]["version"] == PROTOCOL_VERSION

    def test_clean_close_exits_zero(self):
        code, replies = self.run_script(
            [json.dumps({"type": "hello", "version": 1}), json.dumps({"type": "close"})]
        )
        assert code == EXIT_OK
        assert replies[-1]["type"] == "close"

    def test_version_mismatch_exit_code(self):
        code, replies = self.run_script([json.dumps({"type": "hello", "version": 0})])
        assert code == EXIT_PROTOCOL
        assert [r["type"] for r in replies] == ["hello", "error", "close"]

    def test_eof_without_close_exits_zero(self):
        code, replies = self.run_script([json.dumps({"type": "hello", "version": 1})])
        assert code == EXIT_OK

    def test_blank_lines_skipped(self):
        code, replies = self.run_script(
            ["", json.dumps({"type": "hello", "version": 1}), "   ", json.dumps({"type": "close"})]
        )
        assert code == EXIT_OK and replies[-1]["type"] == "close"

    def test_scripted_episode(self):
        scenario = mini_scenario()
        shadow = Environment(scenario)
        snap = shadow.reset(5)
        lines = [json.dumps({"type": "hello", "version": 1}), json.dumps({"type": "reset", "seed": 5})]
        for _ in range(scenario.env.num_slots):
            actions = sticky_policy(snap)
            lines.append(actions_message(actions))
            snap, _, _ = shadow.step(actions)
        lines.append(json.dumps({"type": "close"}))
        code, replies = self.run_script(lines, scenario)
        assert code == EXIT_OK
        transitions = [r for r in replies if r["type"] == "transition"]
        assert len(transitions) == scenario.env.num_slots
        assert transitions[-1]["done"] is True


class TestListenAddress:
    def test_parses_host_and_port(self):
        assert parse_listen_address("0.0.0.0:4000") == ("0.0.0.0", 4000)

    def test_defaults_host(self):
        assert parse_listen_address(":4000") == ("127.0.0.1", 4000)

    def test_rejects_garbage(self):
        for bad in ["stdio", "4000", "host:port", "host:"]:
            with pytest.raises(ProtocolError):
                parse_listen_address(bad)


class TestTcpTransparency:
    @pytest.fixture()
    def server(self):
        server = ProtocolServer(mini_scenario(with_flight=True)).start()
        yield server
        server.stop()

    def drive_remote(self, server, seed):
        """Full sticky episode over TCP, policy fed only by wire payloads."""
        host, port = server.address
        reader, writer, sock = connect_lines(host, port)
        try:
            hello = json.loads(reader.readline())
            assert hello["type"] == "hello"
            writer.write(json.dumps({"type": "hello", "version": 1}) + "\n")
            writer.write(json.dumps({"type": "reset", "seed": seed}) + "\n")
            writer.flush()
            obs = json.loads(reader.readline())["observation"]
            transitions = []
            done = False
            while not done:
                actions = sticky_policy(snapshot_from_payload(obs))
                writer.write(actions_message(actions) + "\n")
                writer.flush()
                reply = json.loads(reader.readline())
                assert reply["type"] == "transition", reply
                transitions.append(reply)
                obs = reply["observation"]
                done = reply["done"]
            writer.write(json.dumps({"type": "close"}) + "\n")
            writer.flush()
            assert json.loads(reader.readline())["type"] == "close"
            return transitions
        finally:
            sock.close()

    def drive_in_process(self, seed):
        env = Environment(mini_scenario(with_flight=True))
        snap = env.reset(seed)
        transitions = []
        done = False
        while not done:
            snap, outcome, done = env.step(sticky_policy(snap))
            transitions.append(
                {
                    "type": "transition",
                    "observation": snapshot_payload(snap),
                    "outcome": outcome_payload(outcome),
                    "done": done,
                }
            )
        return transitions

    def test_remote_equals_in_process(self, server):
        remote = self.drive_remote(server, seed=11)
        local = self.drive_in_process(seed=11)
        # bit-for-bit: identical payload dicts, floats included
        assert remote == local

    def test_connections_are_independent_sessions(self, server):
        first = self.drive_remote(server, seed=2)
        second = self.drive_remote(server, seed=2)
        assert first == second
