import io
import json
import logging
import urllib.error
import urllib.request

import pytest

from centralval import cli
from centralval.checks import halfint_records
from centralval.qexp import EllipticForm, newform_22

KEYS = {"check", "anchor", "expected", "computed", "status", "provenance"}


def _no_network(*a, **k):
    raise AssertionError("network touched")


def test_fetch_offline_round_trip(tmp_path, monkeypatch):
    monkeypatch.setattr(urllib.request, "urlopen", _no_network)
    out = tmp_path / "f.json"
    assert cli.main(["fetch", "1.22.a.a", "--offline", "--out", str(out)]) == 0
    f = EllipticForm.load(out)
    assert f.series == newform_22(f.T).series and f.T == 1200


def test_fetch_truncation(tmp_path):
    out = tmp_path / "g.json"
    assert cli.main(["fetch", "1.12.a.a", "--offline", "--trunc", "30", "--out", str(out)]) == 0
    assert EllipticForm.load(out).a(11) == 534612
    assert cli.main(["fetch", "1.12.a.a", "--offline", "--trunc", "5000"]) == 2


def test_unknown_label_is_a_data_error():
    assert cli.main(["fetch", "7.2.a.a", "--offline"]) == 2


def test_network_failure_falls_back_with_warning(monkeypatch, caplog):
    def fail(*a, **k):
        raise urllib.error.URLError("unreachable")
    monkeypatch.setattr(urllib.request, "urlopen", fail)
    with caplog.at_level(logging.WARNING, logger="centralval"):
        form, source = cli.fetch_coefficients("1.22.a.a")
    assert source == "bundled" and form.a(2) == -288
    assert any("falling back" in r.message for r in caplog.records)


class _FakeResponse(io.BytesIO):
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False


def _fake_remote(an):
    payload = {"data": [{"dim": 1, "weight": 12, "level": 1, "traces": an, "atkin_lehner_eigenvals": []}]}
    return lambda *a, **k: _FakeResponse(json.dumps(payload).encode())


def test_remote_record_is_parsed_and_validated(monkeypatch):
    d = [int(x) for x in cli.bundled("1.12.a.a").series.coeffs()[1:101]]
    monkeypatch.setattr(urllib.request, "urlopen", _fake_remote(d))
    form, source = cli.fetch_coefficients("1.12.a.a")
    assert source == "remote" and form.a(2) == -24 and form.T == 100


def test_multiplicativity_gate_rejects_corrupted_remote(monkeypatch):
    d = [int(x) for x in cli.bundled("1.12.a.a").series.coeffs()[1:101]]
    d[5] += 1                                   # a(6) != a(2) a(3)
    monkeypatch.setattr(urllib.request, "urlopen", _fake_remote(d))
    with pytest.raises(cli.ValidationError):
        cli.fetch_coefficients("1.12.a.a")
    assert cli.main(["fetch", "1.12.a.a"]) == 2


def test_multiplicativity_gate_rejects_corrupted_file(tmp_path):
    f = newform_22(1200).to_json()
    f["an"][6] = str(int(f["an"][6]) + 1)
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(f))
    assert cli.main(["verify-ichino", "--data", str(bad)]) == 2
    f["an"][1] = "2"
    bad.write_text(json.dumps(f))
    with pytest.raises(cli.ConfigError):
        cli.load_coefficients(str(bad))


@pytest.mark.parametrize("argv", [["local-periods", "--primes", "2,3"], ["local-periods", "--primes", "9"],
                                  ["local-periods", "--trunc", "3"], ["verify-ichino", "--tol", "-1"],
                                  ["verify-ichino", "--trunc", "500"], ["relations", "--primes", "2"],
                                  ["relations", "--trunc", "5000"]])
def test_configuration_errors(argv):
    assert cli.main(argv) == 2


def test_report_deterministic_and_exit_codes(tmp_path):
    a, b, c = tmp_path / "a.json", tmp_path / "b.json", tmp_path / "c.json"
    assert cli.main(["verify-ichino", "--out", str(a)]) == 0
    assert cli.main(["verify-ichino", "--out", str(b)]) == 0
    ra, rb = json.loads(a.read_text()), json.loads(b.read_text())
    ra.pop("timestamp"), rb.pop("timestamp")
    assert json.dumps(ra) == json.dumps(rb)
    assert ra["status"] == "pass"
    assert all(set(r) == KEYS and r["anchor"] for r in ra["records"])
    # an unattainable tolerance turns the same run into a verification failure
    assert cli.main(["verify-ichino", "--tol", "1e-20", "--out", str(c)]) == 1
    assert json.loads(c.read_text())["status"] == "fail"


def test_empty_suite_is_vacuous(pipe):
    recs = halfint_records(pipe, discs=(), xi_max=0, primes=())
    assert [r.status for r in recs if r.check == "psi-formula"] == ["vacuous"]
    assert all(r.ok for r in recs)


def test_local_periods_single_prime(tmp_path):
    out = tmp_path / "lp.json"
    assert cli.main(["local-periods", "--primes", "3", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["config"]["primes"] == [3] and rep["status"] == "pass"
    assert all(set(r) == KEYS for r in rep["records"])
