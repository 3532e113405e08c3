"""Plain-text model files.

One model per file, one ``key = value`` pair per line, ``#`` starts a
comment::

    name = large-sphere-cone
    n = 3
    K = 0
    disjoint_caps = true
    cap.0.rho = 1
    cap.0.ell = 0
    cap.0.section = sphere R=2
    spindle.length = 3.141592653589793
    spindle.ell = 1
    spindle.section = sphere R=1
    spindle.outer_bc = natural

A section is either ``sphere R=<radius>`` or
``custom kappa=<k> file=<path>`` where the file is a two-column table
``index mu`` (relative paths resolve against the model file), or the inline
form ``custom kappa=<k> values=<mu0>,<mu1>,...`` written by :func:`dumps`.
Floats are written with ``repr`` so that dumping and loading is lossless.
"""
import math
from pathlib import Path

import numpy as np

from .errors import ModelError
from .models import ConeCap, ConicalManifoldModel, Spindle, sphere_section, table_section

TOP_KEYS = {"name", "n", "K", "disjoint_caps"}
CAP_KEYS = {"rho", "ell", "section"}
SPINDLE_KEYS = {"length", "ell", "section", "outer_bc"}


def _float(text, key):
    try:
        return float(text)
    except ValueError:
        raise ModelError(f"{key}: expected a number, got {text!r}") from None


def read_eigen_table(path):
    """Two-column ``index mu`` table; indices must be 0, 1, 2, ... in order."""
    try:
        data = np.loadtxt(path, ndmin=2, comments="#")
    except ValueError as exc:
        raise ModelError(f"{path}: {exc}") from None
    if data.shape[1] != 2:
        raise ModelError(f"{path}: expected two columns (index, mu)")
    idx = data[:, 0]
    if not np.array_equal(idx, np.arange(idx.size)):
        raise ModelError(f"{path}: indices must run 0, 1, 2, ...")
    return [float(x) for x in data[:, 1]]


def write_eigen_table(path, values):
    lines = ["# index mu"] + [f"{i} {float(v)!r}" for i, v in enumerate(values)]
    Path(path).write_text("\n".join(lines) + "\n")


def _parse_section(text, n, base, key):
    parts = text.split()
    if not parts:
        raise ModelError(f"{key}: empty section")
    kind, opts = parts[0], {}
    for p in parts[1:]:
        if "=" not in p:
            raise ModelError(f"{key}: expected key=value, got {p!r}")
        a, b = p.split("=", 1)
        opts[a] = b
    if kind == "sphere":
        if set(opts) != {"R"}:
            raise ModelError(f"{key}: sphere sections take exactly R=<radius>")
        return sphere_section(n, _float(opts["R"], key))
    if kind == "custom":
        if "kappa" not in opts or len(set(opts) & {"file", "values"}) != 1 or set(opts) - {"kappa", "file", "values"}:
            raise ModelError(f"{key}: custom sections take kappa=<k> and one of file=<path>, values=<list>")
        kappa = _float(opts["kappa"], key)
        if "file" in opts:
            p = Path(opts["file"])
            if not p.is_absolute() and base is not None:
                p = Path(base) / p
            vals = read_eigen_table(p)
        else:
            vals = [_float(v, key) for v in opts["values"].split(",") if v]
        return table_section(n - 1, kappa, vals)
    raise ModelError(f"{key}: unknown section kind {kind!r}")


def _section_text(section):
    if section.radius is not None and section.table is None:
        return f"sphere R={section.radius!r}"
    if section.table is None:
        raise ModelError("only sphere and tabulated sections can be written")
    vals = ",".join(repr(float(v)) for v in section.table)
    return f"custom kappa={float(section.kappa)!r} values={vals}"


def loads(text, base=None):
    """Parse model-file text; unknown keys are rejected."""
    top, caps, spindle = {}, {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ModelError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in TOP_KEYS:
            target, field_name = top, key
        elif key.startswith("cap."):
            bits = key.split(".")
            if len(bits) != 3 or not bits[1].isdigit() or bits[2] not in CAP_KEYS:
                raise ModelError(f"line {lineno}: unknown key {key!r}")
            target, field_name = caps.setdefault(int(bits[1]), {}), bits[2]
        elif key.startswith("spindle."):
            sub = key.split(".", 1)[1]
            if sub not in SPINDLE_KEYS:
                raise ModelError(f"line {lineno}: unknown key {key!r}")
            target, field_name = spindle, sub
        else:
            raise ModelError(f"line {lineno}: unknown key {key!r}")
        if field_name in target:
            raise ModelError(f"line {lineno}: duplicate key {key!r}")
        target[field_name] = value

    if "n" not in top:
        raise ModelError("missing key 'n'")
    try:
        n = int(top["n"])
    except ValueError:
        raise ModelError(f"n: expected an integer, got {top['n']!r}") from None
    K = _float(top.get("K", "inf"), "K")
    disjoint = top.get("disjoint_caps", "true").lower()
    if disjoint not in ("true", "false"):
        raise ModelError("disjoint_caps must be true or false")
    if sorted(caps) != list(range(len(caps))):
        raise ModelError("caps must be numbered 0, 1, 2, ...")
    cap_objs = []
    for i in range(len(caps)):
        c = caps[i]
        missing = CAP_KEYS - set(c)
        if missing:
            raise ModelError(f"cap.{i}: missing {', '.join(sorted(missing))}")
        section = _parse_section(c["section"], n, base, f"cap.{i}.section")
        cap_objs.append(ConeCap(_float(c["rho"], f"cap.{i}.rho"), _float(c["ell"], f"cap.{i}.ell"), section))
    sp = None
    if spindle:
        missing = {"length", "ell", "section"} - set(spindle)
        if missing:
            raise ModelError(f"spindle: missing {', '.join(sorted(missing))}")
        section = _parse_section(spindle["section"], n, base, "spindle.section")
        sp = Spindle(
            _float(spindle["length"], "spindle.length"),
            section,
            _float(spindle["ell"], "spindle.ell"),
            spindle.get("outer_bc", "natural"),
        )
    return ConicalManifoldModel(n, K, tuple(cap_objs), sp, top.get("name", ""), disjoint == "true")


def dumps(model):
    lines = []
    if model.name:
        lines.append(f"name = {model.name}")
    lines.append(f"n = {model.n}")
    lines.append(f"K = {'inf' if math.isinf(model.bulkK) and model.bulkK > 0 else repr(float(model.bulkK))}")
    lines.append(f"disjoint_caps = {'true' if model.disjoint_caps_declared else 'false'}")
    for i, cap in enumerate(model.caps):
        lines.append(f"cap.{i}.rho = {float(cap.rho)!r}")
        lines.append(f"cap.{i}.ell = {float(cap.ell)!r}")
        lines.append(f"cap.{i}.section = {_section_text(cap.section)}")
    sp = model.spindle
    if sp is not None:
        lines.append(f"spindle.length = {float(sp.total_length)!r}")
        lines.append(f"spindle.ell = {float(sp.ell)!r}")
        lines.append(f"spindle.section = {_section_text(sp.section)}")
        lines.append(f"spindle.outer_bc = {sp.outer_bc}")
    return "\n".join(lines) + "\n"


def load(path):
    path = Path(path)
    return loads(path.read_text(), base=path.parent)


def dump(model, path):
    Path(path).write_text(dumps(model))
