"""Command-line interface: ``sskcsi <command> [options]``.

Commands

``analytic``      analytic TOSD-SSK ABEP over an SNR grid
``simulate``      Monte Carlo BER of one or both schemes
``compare``       both schemes, Monte Carlo plus the analytic TOSD-SSK curve
``table1``        SNR needed for a target BER, per rate / Nr / Np
``pulses-check``  certify orthonormality of the Hermite pulse set

Curves are written as CSV with the columns in :data:`CURVE_COLUMNS`.
Exit status: 0 success, 1 usage or configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import logging
import math
import sys
from dataclasses import dataclass, field
from typing import Optional

import yaml

from . import analytic, montecarlo, waveform
from .config import FADING_MODELS, PSK_LABELINGS, SystemConfig
from .errors import AccuracyError, ConfigError, DomainError

LOGGER = logging.getLogger(__name__)

COMMANDS = ("analytic", "simulate", "compare", "table1", "pulses-check")
SCHEME_CHOICES = ("tosd_ssk", "alamouti", "both")
CURVE_COLUMNS = ("snr_db", "scheme", "rate_bits", "nr", "np", "abep_analytic", "abep_mc",
                 "ci_low", "ci_high", "trials", "bit_errors", "seed")
DEFAULT_PILOTS = (1, 3, 10, None)
GRAM_THRESHOLD = 1e-8

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2

CONFIG_KEYS = {
    "scheme", "nt", "rate", "nr", "np", "pcsi", "r_pm", "snr_start", "snr_stop", "snr_step",
    "seed", "min_errors", "max_trials", "fading", "psk_labeling", "target", "out",
    "samples_per_std", "workers",
}


@dataclass(frozen=True)
class RunSpec:
    command: str = "compare"
    scheme: str = "both"
    rates: tuple = (1,)
    n_rx: tuple = (1,)
    n_pilots: tuple = DEFAULT_PILOTS
    pilot_ratio: float = 1.0
    snr_start: float = 0.0
    snr_stop: float = 30.0
    snr_step: float = 5.0
    seed: int = 0
    out: Optional[str] = None
    rule: montecarlo.StoppingRule = field(default_factory=montecarlo.StoppingRule)
    fading: str = "rayleigh"
    psk_labeling: str = "binary"
    target: float = 1e-4
    samples_per_std: float = 64.0
    workers: Optional[int] = None

    def snr_grid(self) -> list:
        if not self.snr_step > 0:
            raise ConfigError("snr step must be positive")
        if self.snr_stop < self.snr_start:
            raise ConfigError("empty SNR grid: stop < start")
        n = int(math.floor((self.snr_stop - self.snr_start) / self.snr_step + 1e-9)) + 1
        return [round(self.snr_start + i * self.snr_step, 10) for i in range(n)]

    def schemes(self) -> tuple:
        return ("tosd_ssk", "alamouti") if self.scheme == "both" else (self.scheme,)

    def configs(self):
        """Every ``(rate, nr, np)`` combination as a :class:`SystemConfig`."""
        for rate, nr, npil in itertools.product(self.rates, self.n_rx, self.n_pilots):
            yield SystemConfig(n_tx=2**rate, n_rx=nr, n_pilots=npil,
                               pilot_ratio=self.pilot_ratio, snr_db=self.snr_start,
                               fading=self.fading, psk_labeling=self.psk_labeling)


def _as_list(value):
    return list(value) if isinstance(value, (list, tuple)) else [value]


def _parse_pilots(values, pcsi: bool) -> tuple:
    out = []
    for v in values:
        if v is None or (isinstance(v, str) and v.strip().lower() in ("pcsi", "p-csi", "inf")):
            out.append(None)
            continue
        try:
            n = int(v)
        except (TypeError, ValueError):
            raise ConfigError(f"invalid pilot count {v!r}") from None
        if n != float(v) or n < 1:
            raise ConfigError(f"Np must be a positive integer (use pcsi for perfect CSI), got {v!r}")
        out.append(n)
    if pcsi and None not in out:
        out.append(None)
    return tuple(out)


def _parse_rates(doc) -> tuple:
    rates = [int(r) for r in _as_list(doc["rate"])] if "rate" in doc else None
    if "nt" in doc:
        nts = [int(n) for n in _as_list(doc["nt"])]
        for n in nts:
            if n < 2 or n & (n - 1):
                raise ConfigError(f"Nt must be a power of two, got {n}")
        from_nt = [n.bit_length() - 1 for n in nts]
        if rates is not None and rates != from_nt:
            raise ConfigError("nt and rate disagree")
        rates = from_nt
    rates = rates or [1]
    for r in rates:
        if r not in (1, 2, 3, 4):
            raise ConfigError(f"rate must be 1, 2, 3 or 4, got {r}")
    return tuple(rates)


def spec_from_dict(doc: dict, command: str = "compare") -> RunSpec:
    unknown = set(doc) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    scheme = doc.get("scheme", "both")
    if scheme not in SCHEME_CHOICES:
        raise ConfigError(f"unknown scheme {scheme!r}")
    pcsi = bool(doc.get("pcsi", False))
    if "np" in doc:
        pilots = _parse_pilots(_as_list(doc["np"]), pcsi)
    else:
        pilots = (None,) if pcsi else DEFAULT_PILOTS
    n_rx = tuple(int(n) for n in _as_list(doc.get("nr", 1)))
    if any(n < 1 for n in n_rx):
        raise ConfigError("Nr must be >= 1")
    fading = doc.get("fading", "rayleigh")
    if fading not in FADING_MODELS:
        raise ConfigError(f"unknown fading model {fading!r}")
    labeling = doc.get("psk_labeling", "binary")
    if labeling not in PSK_LABELINGS:
        raise ConfigError(f"unknown PSK labeling {labeling!r}")
    seed = int(doc.get("seed", 0))
    if not 0 <= seed < 2**64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    rule = montecarlo.StoppingRule(int(doc.get("min_errors", 200)),
                                   int(doc.get("max_trials", 10**8)))
    target = float(doc.get("target", 1e-4))
    if not 0 < target < 0.5:
        raise ConfigError("target must be in (0, 1/2)")
    spec = RunSpec(
        command=command, scheme=scheme, rates=_parse_rates(doc), n_rx=n_rx, n_pilots=pilots,
        pilot_ratio=float(doc.get("r_pm", 1.0)),
        snr_start=float(doc.get("snr_start", 0.0)), snr_stop=float(doc.get("snr_stop", 30.0)),
        snr_step=float(doc.get("snr_step", 5.0)), seed=seed, out=doc.get("out"), rule=rule,
        fading=fading, psk_labeling=labeling, target=target,
        samples_per_std=float(doc.get("samples_per_std", 64.0)),
        workers=None if doc.get("workers") is None else int(doc["workers"]),
    )
    spec.snr_grid()
    list(spec.configs())  # validates every combination
    return spec


def parse_config(text: str, command: str = "compare"):
    """Parse a YAML (or JSON) key-value document into ``(RunSpec, SystemConfig)``.

    The returned config is the first combination of the grid.
    """
    try:
        doc = yaml.safe_load(text) if text.strip() else {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed config document: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a mapping")
    try:
        spec = spec_from_dict(doc, command)
    except DomainError as exc:
        raise ConfigError(str(exc)) from None
    return spec, next(spec.configs())


# -- output -----------------------------------------------------------------

def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return "" if math.isnan(x) else repr(x)
    return str(x)


def _np_label(n) -> str:
    return "pcsi" if n is None else str(n)


def curve_row(point: montecarlo.BerPoint, cfg: SystemConfig) -> list:
    return [_fmt(point.snr_db), point.scheme, cfg.rate, cfg.n_rx, _np_label(cfg.n_pilots),
            _fmt(point.abep_analytic), _fmt(point.abep_mc), _fmt(point.ci_low),
            _fmt(point.ci_high), point.trials, point.bit_errors, point.seed]


def analytic_row(db, cfg: SystemConfig, value) -> list:
    return [_fmt(float(db)), "tosd_ssk", cfg.rate, cfg.n_rx, _np_label(cfg.n_pilots),
            _fmt(value), "", "", "", "", "", ""]


def write_csv(header, rows, out: Optional[str]):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    text = buf.getvalue()
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


# -- commands ---------------------------------------------------------------

def cmd_analytic(spec: RunSpec) -> int:
    rows = []
    for cfg in spec.configs():
        for db in spec.snr_grid():
            rows.append(analytic_row(db, cfg, analytic.abep(cfg.with_snr(db))))
    write_csv(CURVE_COLUMNS, rows, spec.out)
    return EXIT_OK


def _curves(spec: RunSpec, schemes) -> int:
    rows = []
    failed = False
    grid = spec.snr_grid()
    for i, cfg in enumerate(spec.configs()):
        for scheme in schemes:
            base = montecarlo.derive_seed(spec.seed, 2 * i + (scheme == "alamouti"))
            for p in montecarlo.sweep(cfg, scheme, grid, spec.rule, base, spec.workers):
                failed |= p.error is not None
                rows.append(curve_row(p, cfg))
    write_csv(CURVE_COLUMNS, rows, spec.out)
    return EXIT_NUMERIC if failed else EXIT_OK


def cmd_simulate(spec: RunSpec) -> int:
    return _curves(spec, spec.schemes())


def cmd_compare(spec: RunSpec) -> int:
    return _curves(spec, ("tosd_ssk", "alamouti"))


def threshold_table(spec: RunSpec) -> list:
    """Rows ``[scheme, rate, nr, value per Np...]`` of required SNR (dB)."""
    rows = []
    cell = 0
    for scheme in spec.schemes():
        for rate in spec.rates:
            for nr in spec.n_rx:
                row = [scheme, rate, nr]
                for npil in spec.n_pilots:
                    cfg = SystemConfig(n_tx=2**rate, n_rx=nr, n_pilots=npil,
                                       pilot_ratio=spec.pilot_ratio, fading=spec.fading,
                                       psk_labeling=spec.psk_labeling)
                    seed = montecarlo.derive_seed(spec.seed, cell)
                    cell += 1
                    try:
                        if scheme == "tosd_ssk":
                            value = analytic.snr_for_abep(spec.target, cfg)
                        else:
                            value = montecarlo.mc_snr_for_ber(
                                cfg, "alamouti", spec.target, spec.rule, seed,
                                workers=spec.workers)
                        row.append(f"{value:.2f}")
                    except (AccuracyError, DomainError) as exc:
                        LOGGER.warning("cell %s rate=%s nr=%s np=%s failed: %s",
                                       scheme, rate, nr, npil, exc)
                        row.append(f"error: {exc}")
                rows.append(row)
    return rows


def cmd_table1(spec: RunSpec) -> int:
    header = ["scheme", "rate_bits", "nr"] + [
        "pcsi" if n is None else f"np_{n}" for n in spec.n_pilots]
    rows = threshold_table(spec)
    write_csv(header, rows, spec.out)
    failed = any(str(v).startswith("error") for r in rows for v in r[3:])
    return EXIT_NUMERIC if failed else EXIT_OK


def cmd_pulses_check(spec: RunSpec, n_tx: int = 16) -> int:
    if n_tx > waveform.MAX_ORDER:
        raise ConfigError(f"at most {waveform.MAX_ORDER} pulses are supported")
    pulses = waveform.make_pulse_set(n_tx, samples_per_std=spec.samples_per_std)
    try:
        dev = waveform.max_gram_deviation(pulses)
    except AccuracyError as exc:
        print(f"pulses-check: accuracy failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    ok = dev < GRAM_THRESHOLD
    print(f"Nt={n_tx} samples_per_pulse={pulses.samples_per_pulse} "
          f"max|G-I|={dev:.3e} {'PASS' if ok else 'FAIL'}")
    if not ok:
        print(f"pulses-check: Gram deviation {dev:.3e} exceeds {GRAM_THRESHOLD:g}; "
              "sampling grid too coarse", file=sys.stderr)
    return EXIT_OK if ok else EXIT_NUMERIC


# -- argument parsing -------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _split(value: str) -> list:
    return [v for v in value.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sskcsi", description="TOSD-SSK vs Alamouti error rates with "
                     "pilot-based channel estimation.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="YAML/JSON key-value document")
        p.add_argument("--out", help="output CSV path (default: stdout)")
        p.add_argument("--seed", type=int)
        p.add_argument("--snr-start", type=float)
        p.add_argument("--snr-stop", type=float)
        p.add_argument("--snr-step", type=float)
        p.add_argument("--np", help="comma-separated pilot counts; 'pcsi' for perfect CSI")
        p.add_argument("--nr", help="comma-separated receive-antenna counts")
        p.add_argument("--rate", help="comma-separated rates in bits/s/Hz (1-4)")
        p.add_argument("--scheme", choices=SCHEME_CHOICES)
        p.add_argument("--pcsi", action="store_true", help="add the perfect-CSI case")
        p.add_argument("--min-errors", type=int)
        p.add_argument("--max-trials", type=int)
        p.add_argument("--target", type=float, help="target BER for table1")
        p.add_argument("--psk-labeling", choices=PSK_LABELINGS)
        p.add_argument("--workers", type=int,
                       help="worker processes for Monte Carlo batches (default: $SSKCSI_WORKERS or 1)")
        if name == "pulses-check":
            p.add_argument("--nt", type=int, default=16)
            p.add_argument("--samples-per-std", type=float)
    return parser


def _merge(doc: dict, args) -> dict:
    doc = dict(doc)
    simple = {"out": "out", "seed": "seed", "snr_start": "snr_start", "snr_stop": "snr_stop",
              "snr_step": "snr_step", "scheme": "scheme", "min_errors": "min_errors",
              "max_trials": "max_trials", "target": "target", "psk_labeling": "psk_labeling",
              "samples_per_std": "samples_per_std", "workers": "workers"}
    for attr, key in simple.items():
        value = getattr(args, attr, None)
        if value is not None:
            doc[key] = value
    if args.np is not None:
        doc["np"] = _split(args.np)
    if args.nr is not None:
        doc["nr"] = _split(args.nr)
    if args.rate is not None:
        doc["rate"] = _split(args.rate)
        doc.pop("nt", None)
    if args.pcsi:
        doc["pcsi"] = True
    return doc


def _load_spec(args) -> RunSpec:
    doc = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
        try:
            doc = yaml.safe_load(text) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"malformed config document: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigError("config document must be a mapping")
    defaults = {"table1": {"rate": [1, 2, 3, 4], "nr": [1, 2], "min_errors": 300}}
    doc = {**defaults.get(args.command, {}), **_merge(doc, args)}
    return spec_from_dict(doc, args.command)


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        spec = _load_spec(args)
    except (OSError, ValueError) as exc:
        print(f"sskcsi: {exc}", file=sys.stderr)
        return EXIT_USAGE
    commands = {"analytic": cmd_analytic, "simulate": cmd_simulate, "compare": cmd_compare,
                "table1": cmd_table1}
    try:
        if args.command == "pulses-check":
            return cmd_pulses_check(spec, args.nt)
        return commands[args.command](spec)
    except ConfigError as exc:
        print(f"sskcsi: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (AccuracyError, DomainError) as exc:
        print(f"sskcsi: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
