"""JSON and text encodings of scalars, classes, matrices and reports.

A scalar c*v^e is ``{"vExp": e, "c": c}``.  A class is an array of
``{"monomial": [...], "coeff": scalar}`` records in canonical monomial order,
one record per v-power.  Matrices are row-major arrays of scalars.
"""

from __future__ import annotations

import json
from importlib import resources

from .abelian import AbelianPGroup
from .coefficients import GradedScalar, PrimeContext
from .kring import CohomologyClass, _format_monomial, ring_of

SCHEMA_VERSION = 1


def scalar_to_json(s: GradedScalar) -> dict:
    if s.is_zero():
        return {"vExp": 0, "c": 0}
    if not s.is_monomial():
        raise ValueError(f"{s} is not homogeneous; encode it as a list of terms")
    e, c = s.monomial()
    return {"vExp": e, "c": c}


def scalar_from_json(ctx: PrimeContext, obj: dict) -> GradedScalar:
    return ctx.v(obj["vExp"], obj["c"]) if obj["c"] else ctx.zero()


def terms_to_json(coefficients: dict) -> list[dict]:
    """Encode a {monomial: GradedScalar} mapping."""
    out = []
    for alpha, s in sorted(coefficients.items()):
        for e, c in s.terms.items():
            out.append({"monomial": [int(a) for a in alpha], "coeff": {"vExp": e, "c": c}})
    return out


def class_to_json(c) -> list[dict]:
    return terms_to_json(c.coefficients)


def class_from_json(ctx: PrimeContext, group: AbelianPGroup, kind: str, terms: list[dict]):
    from .duality import HomologyClass

    cls = {"cohomology": CohomologyClass, "homology": HomologyClass}[kind]
    acc: dict[tuple, dict[int, int]] = {}
    for t in terms:
        slot = acc.setdefault(tuple(t["monomial"]), {})
        e = t["coeff"]["vExp"]
        slot[e] = slot.get(e, 0) + t["coeff"]["c"]
    return cls.from_terms(ring_of(ctx, group), {a: GradedScalar(ctx, s) for a, s in acc.items()})


def matrix_to_json(rows) -> list[list[dict]]:
    return [[scalar_to_json(s) for s in row] for row in rows]


def matrix_from_json(ctx: PrimeContext, rows) -> list[list[GradedScalar]]:
    return [[scalar_from_json(ctx, s) for s in row] for row in rows]


def group_to_json(G: AbelianPGroup) -> dict:
    return {"p": G.p, "exponents": list(G.exponents)}


def group_from_json(obj: dict) -> AbelianPGroup:
    return AbelianPGroup(obj["p"], tuple(obj["exponents"]))


def tagged_class(name: str, c, kind: str | None = None) -> dict:
    """A named class with enough context to be decoded again."""
    if kind is None:
        kind = "cohomology" if isinstance(c, CohomologyClass) else "homology"
    return {"name": name, "kind": kind, "group": group_to_json(c.ring.group), "terms": class_to_json(c)}


# -- text ------------------------------------------------------------------

def render_scalar(obj: dict) -> str:
    e, c = obj["vExp"], obj["c"]
    if not c:
        return "0"
    if e == 0:
        return str(c)
    mon = "v" if e == 1 else f"v^{e}"
    return mon if c == 1 else f"{c}*{mon}"


def render_terms(kind: str, terms: list[dict]) -> str:
    name = {"cohomology": "x", "homology": "b", "series": "x"}[kind]
    out = []
    for t in terms:
        alpha = tuple(t["monomial"])
        if kind == "series":
            mon = "*".join(
                f"{v}^{a}" if a > 1 else v for v, a in zip("xyz", alpha) if a
            )
        else:
            mon = _format_monomial(name, alpha)
        s = t["coeff"]
        head = render_scalar(s)
        if not mon:
            out.append(head)
        elif head == "1":
            out.append(mon)
        else:
            out.append(f"{head}*{mon}")
    return " + ".join(out) if out else "0"


def _render_value(value, indent: str) -> list[str]:
    if isinstance(value, dict) and set(value) == {"left", "right", "product"}:
        left = _format_monomial("b", tuple(value["left"]))
        right = _format_monomial("b", tuple(value["right"]))
        return [f"{indent}{left} cap {right} = {render_terms('homology', value['product']['terms'])}"]
    if isinstance(value, dict) and "terms" in value and "kind" in value:
        return [indent + render_terms(value["kind"], value["terms"])]
    if isinstance(value, dict) and set(value) == {"vExp", "c"}:
        return [indent + render_scalar(value)]
    if isinstance(value, dict) and set(value) == {"p", "exponents"}:
        return [indent + str(group_from_json(value))]
    if isinstance(value, list) and value and isinstance(value[0], list) and value[0] and isinstance(value[0][0], dict):
        return [indent + "[" + ", ".join(render_scalar(s) for s in row) + "]" for row in value]
    if isinstance(value, dict):
        lines = []
        for k, v in value.items():
            sub = _render_value(v, indent + "  ")
            if len(sub) == 1 and not isinstance(v, (dict, list)) or len(sub) == 1 and len(sub[0]) < 100:
                lines.append(f"{indent}{k}: {sub[0].strip()}")
            else:
                lines.append(f"{indent}{k}:")
                lines.extend(sub)
        return lines
    if isinstance(value, list):
        if value and all(isinstance(v, list) and all(isinstance(x, int) for x in v) for v in value):
            return [indent + "[" + ", ".join("(" + ", ".join(map(str, v)) + ")" for v in value) + "]"]
        if all(not isinstance(v, (dict, list)) for v in value):
            return [indent + "[" + ", ".join(map(str, value)) + "]"]
        lines = []
        for v in value:
            sub = _render_value(v, indent + "  ")
            lines.append(indent + "- " + sub[0].strip())
            lines.extend(sub[1:])
        return lines
    if isinstance(value, bool):
        return [indent + ("true" if value else "false")]
    return [indent + str(value)]


def render_text(report: dict) -> str:
    """Deterministic text rendering of a report dictionary."""
    req = report["request"]
    head = f"# {req['command']}"
    if req.get("p") is not None:
        head += f"  p={req['p']} n={req['n']}"
    lines = [head]
    if report.get("provenance", {}).get("usesHigherTransferUnit"):
        lines.append("# note: depends on the transfer unit for cyclic factors of order p^k, k >= 2")
    lines.append("request:")
    lines.extend(_render_value(req, "  "))
    lines.append("result:")
    lines.extend(_render_value(report["payload"], "  "))
    lines.append("checks:")
    for chk in report["checks"]:
        detail = f"  ({chk['detail']})" if chk.get("detail") else ""
        lines.append(f"  {chk['status']:<5} {chk['name']}{detail}")
    if "timing" in report:
        lines.append(f"time: {report['timing']['seconds']:.3f}s")
    return "\n".join(lines) + "\n"


def dumps(report: dict) -> str:
    return json.dumps(report, indent=1, sort_keys=False) + "\n"


def load_schema() -> dict:
    return json.loads(resources.files("morava.schemas").joinpath("report.schema.json").read_text())
