"""Plain-text (INI) configuration for laws and laminate problems.

A law file::

    [law]
    model = potential          ; potential | nonpotential | both
    energies = 2.0, 2.0        ; Phi1, Phi2
    coupling = max             ; max | number
    clip = true                ; non-potential only

    [psi1]
    kind = ppr_intrinsic
    alpha = 2
    sigma = 2
    lambda = 0.2

    [psi2]
    kind = exponential
    rho = 1.5

A problem file refers to a law file by a path relative to itself; see
``demos/laws/stretch.problem``.  Unknown sections or keys are rejected with
their line number.
"""

from __future__ import annotations

import configparser
import os
import re
from dataclasses import dataclass, field

from .laminate import DisplacementProgram, Lame, LaminateProblem, Mesh, Scheme
from .laws1d import CohesiveLaw1D, Cubic, Exponential, Intrinsic, PprExtrinsic, PprIntrinsic
from .mixedmode import CouplingF, LoadingDensity, PotentialLaw, TensionLaw


class ConfigError(ValueError):
    def __init__(self, msg, path=None, line=None):
        loc = f"{path or '<config>'}" + (f":{line}" if line else "")
        super().__init__(f"{loc}: {msg}")
        self.path = path
        self.line = line


# kind -> (required keys, optional keys)
LAW_KINDS = {
    "exponential": (("rho",), ()),
    "cubic": (("delta",), ()),
    "ppr_intrinsic": (("alpha", "sigma", "lambda"), ("energy",)),
    "ppr_extrinsic": (("alpha", "sigma"), ("energy",)),
    "intrinsic": (("base", "eps"), ("rho", "delta", "alpha", "sigma", "energy")),
}
MODELS = ("potential", "nonpotential", "both")


class _Source:
    """Parsed INI text that remembers where each section and key came from."""

    def __init__(self, text: str, path=None):
        self.path = path
        self.lines = text.splitlines()
        self.cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None)
        try:
            self.cp.read_string(text, source=str(path or "<config>"))
        except configparser.Error as exc:
            line = getattr(exc, "lineno", None)
            raise ConfigError(str(exc).splitlines()[0], path, line) from None

    def line_of(self, section, key=None):
        sec = None
        for i, raw in enumerate(self.lines, 1):
            s = raw.strip()
            m = re.match(r"\[(.+)\]$", s)
            if m:
                sec = m.group(1).strip()
                if key is None and sec == section:
                    return i
                continue
            if sec == section and key is not None and re.match(rf"{re.escape(key)}\s*[=:]", s, re.I):
                return i
        return None

    def error(self, msg, section, key=None):
        return ConfigError(msg, self.path, self.line_of(section, key))

    def section(self, name, required=(), optional=()):
        if not self.cp.has_section(name):
            raise ConfigError(f"missing section [{name}]", self.path)
        sec = self.cp[name]
        for k in sec:
            if k not in required and k not in optional:
                raise self.error(f"unknown key {k!r} in [{name}]", name, k)
        for k in required:
            if k not in sec:
                raise self.error(f"missing key {k!r} in [{name}]", name)
        return sec

    def check_sections(self, allowed):
        for s in self.cp.sections():
            if s not in allowed:
                raise self.error(f"unknown section [{s}]", s)

    def number(self, name, key, sec=None):
        sec = sec if sec is not None else self.cp[name]
        try:
            return float(sec[key])
        except ValueError:
            raise self.error(f"{key} must be a number, got {sec[key]!r}", name, key) from None

    def numbers(self, name, key, count=None):
        raw = self.cp[name][key]
        try:
            vals = [float(v) for v in re.split(r"[,\s]+", raw.strip()) if v]
        except ValueError:
            raise self.error(f"{key} must be a list of numbers", name, key) from None
        if count is not None and len(vals) != count:
            raise self.error(f"{key} needs {count} values, got {len(vals)}", name, key)
        return vals


# ---------------------------------------------------------------- laws


@dataclass(frozen=True)
class LawConfig:
    model: str
    phi1: float
    phi2: float
    coupling: float | None  # None means max(phi1, phi2)
    psi1: dict
    psi2: dict
    clip: bool = True
    path: str | None = field(default=None, compare=False)

    @property
    def alpha(self):
        return max(self.phi1, self.phi2) if self.coupling is None else self.coupling

    def density(self) -> LoadingDensity:
        return LoadingDensity(
            CouplingF(self.phi1, self.phi2, self.alpha),
            build_law1d(self.psi1, self.phi1),
            build_law1d(self.psi2, self.phi2),
        )

    def laws(self):
        """The law objects selected by ``model``: a list of one or two."""
        psi = self.density()
        out = []
        if self.model in ("potential", "both"):
            out.append(PotentialLaw(psi))
        if self.model in ("nonpotential", "both"):
            out.append(TensionLaw.from_density(psi, self.clip))
        return out

    def to_ini(self) -> str:
        lines = [
            "[law]",
            f"model = {self.model}",
            f"energies = {self.phi1!r}, {self.phi2!r}",
            f"coupling = {'max' if self.coupling is None else repr(self.coupling)}",
            f"clip = {'true' if self.clip else 'false'}",
        ]
        for name, spec in (("psi1", self.psi1), ("psi2", self.psi2)):
            lines += ["", f"[{name}]"]
            lines += [f"{k} = {v!r}" if isinstance(v, float) else f"{k} = {v}" for k, v in spec.items()]
        return "\n".join(lines) + "\n"


def build_law1d(spec: dict, energy: float) -> CohesiveLaw1D:
    """A 1-D law from a parsed section; PPR energies default to ``energy``."""
    kind = spec["kind"]
    if kind == "exponential":
        return Exponential(spec["rho"])
    if kind == "cubic":
        return Cubic(spec["delta"])
    if kind == "ppr_intrinsic":
        return PprIntrinsic(spec["alpha"], spec["sigma"], spec["lambda"], spec.get("energy", energy))
    if kind == "ppr_extrinsic":
        return PprExtrinsic(spec["alpha"], spec["sigma"], spec.get("energy", energy))
    if kind == "intrinsic":
        base = {k: v for k, v in spec.items() if k not in ("kind", "base", "eps")}
        base["kind"] = spec["base"]
        return Intrinsic(build_law1d(base, energy), spec["eps"])
    raise ValueError(f"unknown law kind {kind!r}")


def _law_section(src: _Source, name):
    sec = src.cp[name] if src.cp.has_section(name) else None
    if sec is None or "kind" not in sec:
        raise src.error(f"[{name}] needs a 'kind' key", name)
    kind = sec["kind"].strip()
    if kind not in LAW_KINDS:
        raise src.error(f"unknown kind {kind!r}; choose from {sorted(LAW_KINDS)}", name, "kind")
    req, opt = LAW_KINDS[kind]
    src.section(name, ("kind",) + req, opt)
    spec = {"kind": kind}
    for k in sec:
        if k == "kind":
            continue
        if k == "base":
            base = sec[k].strip()
            if base not in LAW_KINDS or base == "intrinsic":
                raise src.error(f"unsupported intrinsic base {base!r}", name, k)
            spec[k] = base
        else:
            spec[k] = src.number(name, k, sec)
    if kind == "intrinsic":
        breq, bopt = LAW_KINDS[spec["base"]]
        for k in breq:
            if k not in spec:
                raise src.error(f"base {spec['base']} needs {k!r}", name)
        for k in spec:
            if k not in ("kind", "base", "eps") + breq + bopt:
                raise src.error(f"{k!r} does not apply to base {spec['base']}", name, k)
    return spec


def parse_law(text: str, path=None) -> LawConfig:
    src = _Source(text, path)
    src.check_sections(("law", "psi1", "psi2"))
    sec = src.section("law", ("energies",), ("model", "coupling", "clip"))
    model = sec.get("model", "both").strip()
    if model not in MODELS:
        raise src.error(f"model must be one of {MODELS}", "law", "model")
    phi1, phi2 = src.numbers("law", "energies", 2)
    raw = sec.get("coupling", "max").strip()
    coupling = None if raw == "max" else src.number("law", "coupling")
    try:
        clip = sec.getboolean("clip", True)
    except ValueError:
        raise src.error("clip must be true or false", "law", "clip") from None
    cfg = LawConfig(model, phi1, phi2, coupling, _law_section(src, "psi1"), _law_section(src, "psi2"), clip, path)
    try:
        cfg.density()
    except ValueError as exc:
        raise ConfigError(str(exc), path) from None
    return cfg


def load_law(path) -> LawConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_law(fh.read(), str(path))


# ---------------------------------------------------------------- problems


@dataclass(frozen=True)
class ProblemConfig:
    problem: LaminateProblem
    law: LawConfig


def parse_problem(text: str, path=None, law_text: str | None = None) -> ProblemConfig:
    src = _Source(text, path)
    src.check_sections(("mesh", "layer1", "layer2", "loading", "solver"))
    src.section("mesh", ("nx", "ny"), ("extent",))
    nx, ny = (int(src.number("mesh", k)) for k in ("nx", "ny"))
    extent = tuple(src.numbers("mesh", "extent", 4)) if "extent" in src.cp["mesh"] else (0.0, 4.0, 0.0, 1.0)
    layers = []
    for name in ("layer1", "layer2"):
        src.section(name, ("lambda", "mu"))
        try:
            layers.append(Lame(src.number(name, "lambda"), src.number(name, "mu")))
        except ValueError as exc:
            raise src.error(str(exc), name) from None
    src.section("loading", ("edges", "program"))
    edges = tuple(e for e in re.split(r"[,\s]+", src.cp["loading"]["edges"].strip()) if e)
    rows = [r for r in src.cp["loading"]["program"].strip().splitlines() if r.strip()]
    times, values = [], []
    for r in rows:
        try:
            v = [float(x) for x in re.split(r"[,\s]+", r.strip()) if x]
        except ValueError:
            raise src.error(f"bad program row {r.strip()!r}", "loading", "program") from None
        if len(v) != 7:
            raise src.error("program rows are: t c1 c2 G11 G12 G21 G22", "loading", "program")
        times.append(v[0])
        values.append(v[1:])
    opt = ("scheme", "tol_min", "tol_fp", "max_iter", "max_picard", "theta", "eps_reg")
    sol = src.section("solver", ("law", "tau"), opt)
    if law_text is None:
        base = os.path.dirname(str(path)) if path else "."
        law_cfg = load_law(os.path.join(base, sol["law"].strip()))
    else:
        law_cfg = parse_law(law_text, sol["law"].strip())
    laws = law_cfg.laws()
    if len(laws) != 1:
        raise src.error("the laminate law must set model = potential or nonpotential", "solver", "law")
    kw = {}
    for k in opt:
        if k in sol:
            if k == "scheme":
                kw[k] = sol[k].strip()
            elif k in ("max_iter", "max_picard"):
                kw[k] = int(src.number("solver", k))
            else:
                kw[k] = src.number("solver", k)
    try:
        prob = LaminateProblem(
            Mesh.rectangle(nx, ny, extent),
            layers[0],
            layers[1],
            edges,
            DisplacementProgram(tuple(times), tuple(values)),
            laws[0],
            src.number("solver", "tau"),
            **kw,
        )
        Mesh.edge_nodes(prob.mesh, edges)
        prob.times()
    except ValueError as exc:
        raise ConfigError(str(exc), path) from None
    if prob.scheme is Scheme.ENERGETIC and not isinstance(laws[0], PotentialLaw):
        raise src.error("the energetic scheme needs a potential law", "solver", "scheme")
    return ProblemConfig(prob, law_cfg)


def load_problem(path) -> ProblemConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_problem(fh.read(), str(path))
