"""JSON serialization for every object kind, with cross-file references.

A reference field (``group``, ``gset``, ``gerbe`` ...) accepts an inline
object, a constructor spec string such as ``"conjugation(symmetric(3))"``,
or a path to another JSON file (resolved relative to the referencing file).
Cocycle files carry exponents only, never floating point; complex numbers
elsewhere are [re, im] pairs.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .bundles import EquivBundle, Kernel, make_bundle, make_kernel
from .cocycles import Cocycle2, make_cocycle
from .errors import StructuralError
from .gerbes import Gerbe, from_abelian_extension, make_gerbe
from .groups import FiniteGroup, build_group, table_group
from .gsets import GSet, build_gset
from .zlinalg import smith_normal_form  # noqa: F401  (re-exported for tooling)


def _as_complex(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    raise StructuralError(f"expected [re, im], got {v!r}")


def complex_to_json(z: complex) -> list[float]:
    # round at 15 decimals to strip float noise off exact phases, and
    # normalize negative zeros, so reports are byte-stable
    return [round(float(z.real), 15) + 0.0, round(float(z.imag), 15) + 0.0]


def _metric_entry(v):
    if isinstance(v, bool):
        raise StructuralError("metric entries must be numbers")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        return v
    if isinstance(v, str):
        return Fraction(v)
    raise StructuralError(f"bad metric entry {v!r}")


def _metric_to_json(k):
    if isinstance(k, Fraction):
        return int(k) if k.denominator == 1 else str(k)
    return float(k)


# --- writers -----------------------------------------------------------------


def group_to_json(G: FiniteGroup) -> dict:
    out = {"order": G.order, "mul": G.mul.tolist()}
    if G.labels is not None:
        out["labels"] = list(G.labels)
    return out


def gset_to_json(X: GSet) -> dict:
    return {"group": group_to_json(X.group), "size": X.size, "act": X.act.tolist()}


def cocycle_to_json(phi: Cocycle2, inline_gset: bool = True) -> dict:
    out = {"N": phi.N, "exp": phi.exp.tolist()}
    if inline_gset:
        out["gset"] = gset_to_json(phi.gset)
    return out


def gerbe_to_json(x: Gerbe) -> dict:
    return {
        "gset": gset_to_json(x.gset),
        "metric": [_metric_to_json(k) for k in x.metric],
        "cocycle": cocycle_to_json(x.cocycle, inline_gset=False),
    }


def bundle_to_json(E: EquivBundle) -> dict:
    maps = {}
    for (g, i), m in sorted(E.maps.items()):
        maps[f"{g},{i}"] = [[complex_to_json(z) for z in row] for row in m]
    return {"gerbe": gerbe_to_json(E.gerbe), "dims": list(E.dims), "maps": maps}


def kernel_to_json(K: Kernel) -> dict:
    maps = {}
    for (g, p), m in sorted(K.bundle.maps.items()):
        maps[f"{g},{p}"] = [[complex_to_json(z) for z in row] for row in m]
    return {
        "target_gerbe": gerbe_to_json(K.target),
        "source_gerbe": gerbe_to_json(K.source),
        "dims": list(K.bundle.dims),
        "maps": maps,
    }


# --- readers -----------------------------------------------------------------


class Workspace:
    """Loads and caches validated objects from JSON files.

    Every object passes its validator before registration; references between
    files resolve relative to the referencing file.
    """

    def __init__(self):
        self._cache: dict[Path, tuple[str, object]] = {}

    # reference resolution

    def _resolve(self, ref, base: Path | None, loader, inline):
        if isinstance(ref, str) and "(" not in ref:
            path = (base / ref) if base and not Path(ref).is_absolute() else Path(ref)
            return self.load(path, expect=loader)
        return inline(ref, base)

    def load(self, path, expect: str | None = None):
        kind, obj = self.load_with_kind(path)
        if expect is not None and kind != expect:
            raise StructuralError(f"{path} holds a {kind}, expected {expect}")
        return obj

    def load_with_kind(self, path) -> tuple[str, object]:
        path = Path(path).resolve()
        if path not in self._cache:
            try:
                raw = json.loads(path.read_text())
            except OSError as e:
                raise StructuralError(f"cannot read {path}: {e}") from None
            except json.JSONDecodeError as e:
                raise StructuralError(f"{path} is not valid JSON: {e}") from None
            kind = sniff_kind(raw)
            self._cache[path] = (kind, self._parse(kind, raw, path.parent))
        return self._cache[path]

    def _parse(self, kind: str, raw: dict, base: Path):
        if kind == "group":
            return self.group(raw, base)
        if kind == "gset":
            return self.gset(raw, base)
        if kind == "cocycle":
            return self.cocycle(raw, base)
        if kind == "gerbe":
            return self.gerbe(raw, base)
        if kind == "bundle":
            return self.bundle(raw, base)
        if kind == "kernel":
            return self.kernel(raw, base)
        if kind == "extension":
            return self.extension(raw, base)
        raise StructuralError(f"unrecognized file kind {kind!r}")

    def group(self, ref, base: Path | None = None) -> FiniteGroup:
        def inline(obj, _base):
            if isinstance(obj, str):
                return build_group(obj)
            if isinstance(obj, dict):
                return table_group(obj["mul"], obj.get("labels"))
            raise StructuralError(f"bad group reference {obj!r}")

        return self._resolve(ref, base, "group", inline)

    def gset(self, ref, base: Path | None = None) -> GSet:
        def inline(obj, b):
            if isinstance(obj, str):
                return build_gset(obj)
            if isinstance(obj, dict):
                group = self.group(obj["group"], b)
                return build_gset({"group": group, "act": obj["act"]}, group)
            raise StructuralError(f"bad gset reference {obj!r}")

        return self._resolve(ref, base, "gset", inline)

    def cocycle(self, ref, base: Path | None = None, gset: GSet | None = None) -> Cocycle2:
        def inline(obj, b):
            if not isinstance(obj, dict):
                raise StructuralError(f"bad cocycle reference {obj!r}")
            gs = gset if gset is not None else self.gset(obj["gset"], b)
            return make_cocycle(gs, int(obj["N"]), np.asarray(obj["exp"]))

        return self._resolve(ref, base, "cocycle", inline)

    def gerbe(self, ref, base: Path | None = None) -> Gerbe:
        def inline(obj, b):
            if not isinstance(obj, dict):
                raise StructuralError(f"bad gerbe reference {obj!r}")
            gs = self.gset(obj["gset"], b)
            metric = [_metric_entry(v) for v in obj["metric"]] if "metric" in obj else None
            phi = self.cocycle(obj["cocycle"], b, gset=gs) if "cocycle" in obj else None
            return make_gerbe(gs, metric, phi)

        return self._resolve(ref, base, "gerbe", inline)

    def bundle(self, ref, base: Path | None = None) -> EquivBundle:
        def inline(obj, b):
            gerbe = self.gerbe(obj["gerbe"], b)
            return make_bundle(gerbe, obj["dims"], _parse_maps(obj.get("maps", {})))

        return self._resolve(ref, base, "bundle", inline)

    def kernel(self, ref, base: Path | None = None) -> Kernel:
        def inline(obj, b):
            target = self.gerbe(obj["target_gerbe"], b)
            source = self.gerbe(obj["source_gerbe"], b)
            return make_kernel(target, source, obj["dims"], _parse_maps(obj.get("maps", {})))

        return self._resolve(ref, base, "kernel", inline)

    def extension(self, ref, base: Path | None = None) -> Gerbe:
        def inline(obj, b):
            G = self.group(obj["G"], b)
            factors = obj["K"]["cyclic_factors"]
            return from_abelian_extension(G, factors, obj["action"], obj["phiK"])

        return self._resolve(ref, base, "extension", inline)


def _parse_maps(raw: dict) -> dict:
    maps = {}
    for key, rows in raw.items():
        g_s, i_s = key.split(",")
        maps[(int(g_s), int(i_s))] = np.array(
            [[_as_complex(v) for v in row] for row in rows], dtype=complex
        ).reshape(len(rows), len(rows[0]) if rows else 0)
    return maps


def sniff_kind(raw: dict) -> str:
    if not isinstance(raw, dict):
        raise StructuralError("top-level JSON value must be an object")
    if "phiK" in raw:
        return "extension"
    if "target_gerbe" in raw:
        return "kernel"
    if "dims" in raw and "gerbe" in raw:
        return "bundle"
    if "metric" in raw or ("gset" in raw and "cocycle" in raw):
        return "gerbe"
    if "exp" in raw and "N" in raw:
        return "cocycle"
    if "act" in raw:
        return "gset"
    if "mul" in raw:
        return "group"
    raise StructuralError(f"cannot determine file kind from keys {sorted(raw)}")


def kind_of(obj) -> str:
    from .bundles import EquivBundle as EB
    from .bundles import Kernel as K

    return {
        FiniteGroup: "group",
        GSet: "gset",
        Cocycle2: "cocycle",
        Gerbe: "gerbe",
        EB: "bundle",
        K: "kernel",
    }.get(type(obj), "unknown")
