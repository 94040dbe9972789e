"""CLI contract: JSON shape, exit codes, reproducibility."""

import json

from pirlab.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


class TestCapacity:
    def test_two_by_two(self, capsys):
        code, doc = run_cli(capsys, "capacity", "-K", "2", "-N", "2", "-T", "1")
        assert code == 0
        assert doc["capacity"] == "2/3"

    def test_single_message(self, capsys):
        code, doc = run_cli(capsys, "capacity", "-K", "1", "-N", "5")
        assert code == 0
        assert doc["capacity"] == "1/1"

    def test_three_messages(self, capsys):
        code, doc = run_cli(capsys, "capacity", "-K", "3", "-N", "2")
        assert code == 0
        assert doc["capacity"] == "4/7"

    def test_invalid_parameters_exit_2(self, capsys):
        assert main(["capacity", "-K", "2", "-N", "2", "-T", "5"]) == 2


class TestSimulate:
    def test_multiround_ideal_download(self, capsys):
        code, doc = run_cli(capsys, "simulate", "--scheme", "multiround", "--mode", "ideal")
        assert code == 0
        assert doc["rate"]["ideal_download_per_message_bit"] == "1.5"
        assert doc["pass"] is True

    def test_multiround_concrete(self, capsys):
        code, doc = run_cli(
            capsys, "simulate", "--scheme", "multiround", "--mode", "concrete",
            "-L", "2000", "--trials", "2", "--seed", "3", "--sw-blocks", "50",
        )
        assert code == 0
        assert doc["decode_errors"] == 0
        assert len(doc["sessions"]) == 2
        mean = float(doc["rate"]["concrete"]["download_per_message_bit_mean"])
        assert abs(mean - 1.5) < 0.05

    def test_linear_block(self, capsys):
        code, doc = run_cli(
            capsys, "simulate", "--scheme", "linear", "--mode", "concrete", "-L", "4",
        )
        assert code == 0
        assert doc["expected_symbol_download"] == "6/1"
        assert doc["decode_errors"] == 0


class TestAudit:
    def test_multiround_split_passes(self, capsys):
        code, doc = run_cli(capsys, "audit", "--scheme", "multiround")
        assert code == 0
        assert doc["pass"] is True
        assert doc["privacy"]["databases"][1]["total_variation"]["1,2"] == "0/1"

    def test_replicated_storage_variant_fails(self, capsys):
        code, doc = run_cli(
            capsys, "audit", "--scheme", "multiround", "--storage", "replicated"
        )
        assert code == 1
        assert doc["privacy"]["pass"] is False

    def test_biased_messages_fail(self, capsys):
        code, doc = run_cli(capsys, "audit", "--scheme", "multiround", "--bias", "3/4")
        assert code == 1
        assert doc["privacy"]["databases"][1]["total_variation"]["1,2"] == "1/4"

    def test_reports_byte_identical_for_same_seed(self, capsys):
        _, first = run_cli(capsys, "audit", "--scheme", "linear", "--seed", "11")
        _, second = run_cli(capsys, "audit", "--scheme", "linear", "--seed", "11")
        assert json.dumps(first, sort_keys=True) == json.dumps(second, sort_keys=True)


class TestReproduce:
    def test_ideal_mode_all_rows_pass(self, capsys):
        code, doc = run_cli(capsys, "reproduce", "--mode", "ideal")
        assert code == 0
        assert doc["pass"] is True
        ids = [row["criterion"] for row in doc["criteria"]]
        assert "6b" not in ids  # concrete rows excluded in ideal mode
        assert {"1", "2", "3", "4", "5", "7", "8", "9", "10"} <= set(ids)

    def test_seed_env_override(self, capsys, monkeypatch):
        monkeypatch.setenv("PIRLAB_SEED", "42")
        code, doc = run_cli(capsys, "reproduce", "--mode", "ideal")
        assert code == 0
        assert doc["seed"] == 42
