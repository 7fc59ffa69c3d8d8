"""Command line: local-periods, verify-ichino, relations, fetch.

Exit codes: 0 when every check passes, 1 on a verification failure,
2 on a configuration or data error.  Reports are JSON; apart from the
timestamp field they are byte-identical for identical configurations.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import urllib.error
import urllib.request
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from importlib import resources
from math import gcd

from . import checks
from .checks import Report
from .qexp import EllipticForm, TruncationError

log = logging.getLogger("centralval")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
REMOTE_URL = "https://www.lmfdb.org/api/mf_newforms/?label={label}&_format=json"


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    subcommand: str
    primes: tuple = (3, 5, 7)
    trunc: int | None = None
    tol: float | None = None
    data: str | None = None
    offline: bool = False
    out: str | None = None
    jobs: int = 1
    extra: dict = field(default_factory=dict)

    def validate(self):
        if self.tol is not None and not self.tol > 0:
            raise ConfigError("tolerances must be positive")
        if self.trunc is not None and self.trunc <= 0:
            raise ConfigError("truncations must be positive")
        if self.jobs < 1:
            raise ConfigError("--jobs must be at least 1")
        return self

    def report_config(self) -> dict:
        d = asdict(self)
        for key in ("out", "jobs"):
            d.pop(key)
        d["primes"] = list(self.primes)
        return d


def _parse_primes(s: str) -> tuple:
    try:
        return tuple(int(x) for x in s.split(",") if x.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad prime list {s!r}") from exc


# ---------------------------------------------------------------------------
# subcommands

def _local_for_prime(p: int, T: int) -> list:
    recs = checks.matrix_coefficient_records((p,), T)
    recs += checks.steinberg_period_records((p,), T)
    recs += checks.gamma00_records((p,))
    recs += checks.norm_records((p,))[:-5]      # dyadic rows are added once below
    return recs


def cmd_local_periods(cfg: RunConfig) -> Report:
    try:
        checks.check_odd_primes(cfg.primes)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    T = cfg.trunc or 4
    if T < 4:
        raise ConfigError("--trunc must be at least 4: the geometric tails use the four outermost terms")
    rep = Report("local-periods", cfg.report_config())
    if cfg.jobs > 1 and len(cfg.primes) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as ex:
            parts = list(ex.map(_local_for_prime, cfg.primes, [T] * len(cfg.primes)))
    else:
        parts = [_local_for_prime(p, T) for p in cfg.primes]
    for part in parts:
        rep.records += part
    rep.records += checks.norm_records(())
    rep.records += checks.archimedean_records()
    return rep


def _pipeline(cfg: RunConfig, trunc_h: int, trunc_f: int = 1200) -> checks.Pipeline:
    pipe = checks.Pipeline(trunc_h, trunc_f)
    if cfg.data:
        f = load_coefficients(cfg.data)
        if (f.weight, f.level) != (22, 1):
            raise ConfigError(f"{cfg.data} holds weight {f.weight}, level {f.level}; need weight 22, level 1")
        if f.T < trunc_f:
            raise ConfigError(f"{cfg.data} has {f.T} coefficients; need {trunc_f}")
        pipe.f = f
    return pipe


def cmd_verify_ichino(cfg: RunConfig) -> Report:
    trunc_h = cfg.trunc or 2000
    if trunc_h < 2000:
        raise ConfigError("--trunc must be at least 2000 coefficients of h")
    pipe = _pipeline(cfg, trunc_h)
    rep = Report("verify-ichino", cfg.report_config())
    rep.records += checks.ichino_records(pipe, checks.norms(pipe), tol=cfg.tol or 1e-5)
    return rep


def cmd_relations(cfg: RunConfig) -> Report:
    try:
        checks.check_odd_primes(cfg.primes)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    discs = tuple(cfg.extra.get("discs", (-3, -4, -7, -8, -11)))
    shimura_n = 60
    need = shimura_n ** 2 * max((abs(D) for D in discs), default=0)
    trunc_h = cfg.trunc or max(need, 2000)
    if trunc_h < need:
        raise ConfigError(f"the Shimura check to n = {shimura_n} needs --trunc >= {need}")
    pipe = _pipeline(cfg, trunc_h)
    rep = Report("relations", cfg.report_config())
    rep.records += checks.halfint_records(pipe, discs, shimura_n, primes=cfg.primes,
                                          xi_max=cfg.extra.get("xi_max", 2000))
    rep.records += checks.factorization_records(pipe)
    nrm = checks.norms(pipe)
    rep.records += checks.kohnen_records(pipe, nrm, tol=cfg.tol or 1e-6)
    rep.records += checks.petersson_records(pipe)
    rep.records += checks.cocycle_records()
    rep.records += checks.fourier_records()
    rep.records += checks.rp_records()
    return rep


# ---------------------------------------------------------------------------
# coefficient files

BUNDLED = {"1.22.a.a": "1.22.a.a.json", "1.12.a.a": "1.12.a.a.json"}


class ValidationError(ValueError):
    pass


def validate_coefficients(form: EllipticForm) -> EllipticForm:
    """a(1) = 1 and a(mn) = a(m) a(n) for coprime m, n within the truncation."""
    T = form.T
    if T < 1 or form.a(1) != 1:
        raise ValidationError("a(1) must be 1")
    for m in range(2, T + 1):
        for n in range(m + 1, T // m + 1):
            if gcd(m, n) == 1 and form.a(m * n) != form.a(m) * form.a(n):
                raise ValidationError(f"multiplicativity fails: a({m * n}) != a({m}) a({n})")
    return form


def load_coefficients(path: str) -> EllipticForm:
    try:
        form = EllipticForm.load(path)
    except (OSError, KeyError, ValueError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        return validate_coefficients(form)
    except ValidationError as exc:
        raise ConfigError(f"{path} rejected: {exc}") from exc


def bundled(label: str) -> EllipticForm:
    if label not in BUNDLED:
        raise ConfigError(f"no bundled data for {label!r}; bundled labels: {sorted(BUNDLED)}")
    text = resources.files("centralval").joinpath("data", BUNDLED[label]).read_text()
    return EllipticForm.from_json(json.loads(text))


def fetch_remote(label: str, timeout: float = 20.0) -> EllipticForm:
    """Query the modular forms database for a rational newform (dimension 1)."""
    with urllib.request.urlopen(REMOTE_URL.format(label=label), timeout=timeout) as resp:
        payload = json.load(resp)
    rows = payload.get("data", [])
    if len(rows) != 1:
        raise ValidationError(f"expected one record for {label}, got {len(rows)}")
    row = rows[0]
    if int(row.get("dim", 0)) != 1:
        raise ValidationError("only dimension-1 (rational) newforms are supported")
    an = [0] + [int(x) for x in row["traces"]]
    al = {int(p): int(w) for p, w in row.get("atkin_lehner_eigenvals") or []}
    return EllipticForm.from_json({"label": label, "weight": row["weight"], "level": row["level"],
                                   "an": an, "atkin_lehner": al})


def fetch_coefficients(label: str, offline: bool = False) -> tuple[EllipticForm, str]:
    """Returns (form, source) with source 'remote' or 'bundled'."""
    if not offline:
        try:
            return validate_coefficients(fetch_remote(label)), "remote"
        except ValidationError:
            raise
        except (OSError, urllib.error.URLError, ValueError, KeyError) as exc:
            log.warning("remote fetch of %s failed (%s); falling back to bundled data", label, exc)
    return validate_coefficients(bundled(label)), "bundled"


def cmd_fetch(cfg: RunConfig) -> int:
    label = cfg.extra["label"]
    try:
        form, source = fetch_coefficients(label, cfg.offline)
    except ValidationError as exc:
        raise ConfigError(f"{label} rejected: {exc}") from exc
    if cfg.trunc:
        if cfg.trunc > form.T:
            raise ConfigError(f"{label}: only {form.T} coefficients available")
        form = EllipticForm(form.weight, form.level, form.series.truncate(cfg.trunc), form.character,
                            form.atkin_lehner, form.label, form.newform)
    form.label = label
    text = json.dumps(form.to_json(), indent=1)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    log.info("%s: %d coefficients from %s data", label, form.T, source)
    return EXIT_OK


# ---------------------------------------------------------------------------

COMMANDS = {"local-periods": cmd_local_periods, "verify-ichino": cmd_verify_ichino, "relations": cmd_relations}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON report (or coefficient file) here instead of stdout")
    common.add_argument("--tol", type=float, help="tolerance for the numeric checks")
    common.add_argument("--trunc", type=int, help="truncation (window for local-periods, coefficients otherwise)")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="centralval", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="subcommand", required=True)
    lp = sub.add_parser("local-periods", parents=[common], help="brute force vs closed forms, local places")
    lp.add_argument("--primes", type=_parse_primes, default=(3, 5, 7))
    lp.add_argument("--jobs", type=int, default=1, help="worker processes (one prime per worker)")
    vi = sub.add_parser("verify-ichino", parents=[common], help="both sides of the central value formula")
    vi.add_argument("--data", help="coefficient file for the weight-22 form (default: built from Delta E4 E6)")
    rl = sub.add_parser("relations", parents=[common], help="exact relation suites and numeric identities")
    rl.add_argument("--primes", type=_parse_primes, default=(3, 5, 7))
    rl.add_argument("--data", help="coefficient file for the weight-22 form")
    fe = sub.add_parser("fetch", parents=[common], help="write a validated coefficient file")
    fe.add_argument("label", help="newform label, e.g. 1.22.a.a")
    fe.add_argument("--offline", action="store_true", help="never touch the network")
    return ap


def _config(args) -> RunConfig:
    cfg = RunConfig(args.subcommand, primes=tuple(getattr(args, "primes", (3, 5, 7))), trunc=args.trunc,
                    tol=args.tol, data=getattr(args, "data", None), offline=getattr(args, "offline", False),
                    out=args.out, jobs=getattr(args, "jobs", 1))
    if args.subcommand == "fetch":
        cfg.extra["label"] = args.label
    return cfg.validate()


def write_report(rep: Report, path: str | None):
    rep.timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    text = json.dumps(rep.to_json(), indent=1)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        cfg = _config(args)
        if cfg.subcommand == "fetch":
            return cmd_fetch(cfg)
        rep = COMMANDS[cfg.subcommand](cfg)
    except (ConfigError, TruncationError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for r in rep.records:
        print(f"{r.status:7s} {r.check}", file=sys.stderr)
    write_report(rep, cfg.out)
    return EXIT_OK if rep.ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
