"""Flat ``key=value`` scenario files.

One assignment per line, ``#`` starts a comment. Trap parameters use the
``trap.`` prefix, run settings the ``run.`` prefix, and the bare key ``units``
selects ``si`` (default) or ``dimensionless`` (hbar = M = Omega_rf = 1).
Unknown keys are rejected by name.
"""
from dataclasses import dataclass, field, fields

from .errors import ConfigError, DomainError
from .trap import HBAR_SI, TrapConfig, with_mathieu


def _complex(s):
    return complex(s.replace(" ", ""))


def _bool(s):
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


# key -> (parser, unit / meaning)
TRAP_KEYS = {
    "Q": (float, "C, ion charge"),
    "M": (float, "kg, ion mass"),
    "B0": (float, "T, axial magnetic field"),
    "U0": (float, "V, static electrode voltage"),
    "V0": (float, "V, RF amplitude"),
    "Omega_rf": (float, "rad/s, RF angular frequency"),
    "r0": (float, "m, radial semiaxis"),
    "z0": (float, "m, axial semiaxis"),
    "c_oct": (float, "m^-4, octopole coefficient"),
    "c_hex": (float, "m^-6, hexapole coefficient"),
    "omega_a_ref": (float, "rad/s, axial reference frequency"),
    "omega_r_ref": (float, "rad/s, radial reference frequency"),
    "l": (int, "angular momentum quantum number"),
    "m_a": (int, "axial excitation number"),
    "m_r": (int, "radial excitation number"),
    "axial_sector": (float, "axial Bargmann index, 0.25 or 0.75"),
    "drive_mode": (str, "time_dependent | static | pseudopotential"),
    "hbar": (float, "J s, reduced Planck constant"),
    "a_z": (float, "axial Mathieu a; sets U0 together with q_z"),
    "q_z": (float, "axial Mathieu q; sets V0 together with a_z"),
}

RUN_KEYS = {
    "z_a": (_complex, "initial / evaluation axial disk coordinate"),
    "z_r": (_complex, "initial / evaluation radial disk coordinate"),
    "t": (float, "s, evaluation time of the energy function"),
    "t0": (float, "s, start time"),
    "t1": (float, "s, end time"),
    "periods": (float, "end time in RF periods (alternative to t1)"),
    "n_out": (int, "number of equally spaced output times"),
    "tol": (float, "integrator / monodromy tolerance"),
    "mode": (str, "axial | radial"),
    "re_min": (float, "husimi grid, real-part lower bound"),
    "re_max": (float, "husimi grid, real-part upper bound"),
    "re_n": (int, "husimi grid, real-part points"),
    "im_min": (float, "husimi grid, imaginary-part lower bound"),
    "im_max": (float, "husimi grid, imaginary-part upper bound"),
    "im_n": (int, "husimi grid, imaginary-part points"),
    "grid": (str, "stability grid kind: mathieu (a_z, q_z) | voltage (U0, V0)"),
    "x_min": (float, "stability grid, first coordinate lower bound"),
    "x_max": (float, "stability grid, first coordinate upper bound"),
    "x_n": (int, "stability grid, first coordinate points"),
    "y_min": (float, "stability grid, second coordinate lower bound"),
    "y_max": (float, "stability grid, second coordinate upper bound"),
    "y_n": (int, "stability grid, second coordinate points"),
    "n_levels": (int, "number of quasienergy levels"),
    "cutoff": (int, "Fock-space dimension used by --verify"),
    "conservation_tol": (float, "fail evolve if static energy drift exceeds this"),
}

UNITS = ("si", "dimensionless")
_DIMENSIONLESS_FIXED = ("hbar", "M", "Omega_rf")

RUN_DEFAULTS = {
    "z_a": 0j,
    "z_r": 0j,
    "t": 0.0,
    "t0": 0.0,
    "n_out": 201,
    "tol": 1e-10,
    "mode": "axial",
    "grid": "mathieu",
    "n_levels": 5,
    "cutoff": 300,
}

REQUIRED = {
    "expect": (),
    "husimi": ("re_min", "re_max", "re_n", "im_min", "im_max", "im_n"),
    "evolve": (),
    "equilibria": (),
    "stability": ("x_min", "x_max", "x_n", "y_min", "y_max", "y_n"),
    "quasienergy": (),
}


@dataclass
class ScenarioConfig:
    trap: TrapConfig
    units: str
    run: dict
    source: dict = field(default_factory=dict)  # raw key -> text, for provenance

    def echo(self):
        """Fully resolved settings as ``(key, value)`` pairs in a fixed order."""
        out = [("units", self.units)]
        out += [(f"trap.{f.name}", getattr(self.trap, f.name)) for f in fields(self.trap)]
        out += [(f"run.{k}", self.run[k]) for k in sorted(self.run)]
        return out


def parse_lines(text, origin="<config>"):
    """Split config text into ``{key: (value_text, line_no)}``."""
    entries = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{origin}:{n}: expected key=value, got {raw.strip()!r}")
        key, value = (p.strip() for p in line.split("=", 1))
        if not key:
            raise ConfigError(f"{origin}:{n}: empty key")
        if key in entries:
            raise ConfigError(f"{origin}:{n}: duplicate key {key!r} (first on line {entries[key][1]})")
        entries[key] = (value, n)
    return entries


def _convert(key, parser, text, line, origin):
    try:
        return parser(text)
    except ValueError as exc:
        raise ConfigError(f"{origin}:{line}: bad value for {key!r}: {exc}") from None


def build(entries, command, origin="<config>"):
    """Validate parsed entries for ``command`` and build a :class:`ScenarioConfig`."""
    if command not in REQUIRED:
        raise ConfigError(f"unknown command {command!r}")
    units = "si"
    trap, run = {}, dict(RUN_DEFAULTS)
    for key, (text, line) in entries.items():
        if key == "units":
            units = text.strip().lower()
            if units not in UNITS:
                raise ConfigError(f"{origin}:{line}: units must be one of {UNITS}, got {text!r}")
            continue
        prefix, _, name = key.partition(".")
        table = {"trap": TRAP_KEYS, "run": RUN_KEYS}.get(prefix)
        if table is None or name not in table:
            raise ConfigError(f"{origin}:{line}: unknown key {key!r}")
        value = _convert(key, table[name][0], text, line, origin)
        (trap if prefix == "trap" else run)[name] = value

    if units == "dimensionless":
        for name in _DIMENSIONLESS_FIXED:
            if name in trap:
                line = entries[f"trap.{name}"][1]
                raise ConfigError(f"{origin}:{line}: trap.{name} is fixed to 1 with units=dimensionless")
    else:
        trap.setdefault("hbar", HBAR_SI)
        for name in ("Q", "M", "Omega_rf"):
            if name not in trap:
                raise ConfigError(f"{origin}: missing required key 'trap.{name}' for SI units")

    missing = [k for k in REQUIRED[command] if k not in run]
    if missing:
        raise ConfigError(f"{origin}: missing required key(s) for {command}: " + ", ".join(f"run.{k}" for k in missing))
    if run["mode"] not in ("axial", "radial"):
        raise ConfigError(f"{origin}: run.mode must be 'axial' or 'radial', got {run['mode']!r}")
    if "t1" in run and "periods" in run:
        raise ConfigError(f"{origin}: give run.t1 or run.periods, not both")

    mathieu = {k: trap.pop(k) for k in ("a_z", "q_z") if k in trap}
    if mathieu:
        if len(mathieu) != 2:
            raise ConfigError(f"{origin}: trap.a_z and trap.q_z must be given together")
        for k in ("U0", "V0"):
            if k in trap:
                raise ConfigError(f"{origin}: trap.{k} conflicts with trap.a_z/trap.q_z")
    try:
        cfg = TrapConfig.dimensionless(**trap) if units == "dimensionless" else TrapConfig(**trap)
        if mathieu:
            cfg = with_mathieu(cfg, mathieu["a_z"], mathieu["q_z"])
    except (DomainError, TypeError) as exc:
        raise ConfigError(f"{origin}: {exc}") from None
    if command == "evolve" and "t1" not in run:
        run["t1"] = run["t0"] + run.get("periods", 10.0) * cfg.period
        run.pop("periods", None)
    source = {k: v for k, (v, _) in entries.items()}
    return ScenarioConfig(cfg, units, run, source)


def load(path, command):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return build(parse_lines(text, str(path)), command, str(path))


def loads(text, command):
    return build(parse_lines(text), command)
