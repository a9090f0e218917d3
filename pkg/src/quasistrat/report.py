"""JSON/text reports and DOT export.  Facet indices are 1-based in every report."""
from __future__ import annotations

import json

from .field import FieldError
from .polytope import FacePoset, HPolytope
from .strata import LinkDescriptor, Stratification, build_link, build_stratification
from .torus import TorusData, rationality_verdict, stabilizer_data

NORMALIZATION_NOTE = (
    "normals and offsets are used exactly as given; rescaling a normal X_j "
    "changes the quasilattice, the group N and the quotient"
)


def one_based(I) -> list[int]:
    return [j + 1 for j in sorted(I)]


def face_report(P: HPolytope, faces: FacePoset) -> list[dict]:
    enc = P.field.encode
    return [
        {"I": one_based(F.I), "p": F.dim, "r": F.r, "class": F.kind, "witness": [enc(x) for x in F.witness]}
        for F in faces
    ]


def _verdict(T: TorusData):
    try:
        return rationality_verdict(T)
    except FieldError:
        return None


def torus_report(T: TorusData, faces: FacePoset) -> dict:
    enc = T.field.encode
    return {
        "dim_n_frak": T.dim_n,
        "kernel_basis": [[enc(x) for x in v] for v in T.kernel_basis],
        "rationality": _verdict(T),
        "stabilizers": [{"I": one_based(F.I), "dim_nF": stabilizer_data(T, F).dim_n} for F in faces],
    }


def strata_report(S: Stratification) -> dict:
    return {"pieces": [{"kind": p.kind, "dim": p.dim, "face_I": one_based(p.face_I)} for p in S]}


def link_tree(link: LinkDescriptor, enc) -> dict:
    return {
        "face_I": one_based(link.face.I),
        "dim": link.dim,
        "psi_coefficients": [{"j": j + 1, "coefficients": [enc(c) for c in cs]}
                             for j, cs in link.psi_coefficients.items()],
        "children": [link_tree(c, enc) for c in link.children],
    }


def links_report(P: HPolytope, T: TorusData, faces: FacePoset, epsilon: float = 1.0) -> dict:
    memo: dict = {}
    links = [build_link(P, T, faces, F, epsilon, memo) for F in faces.singular_faces()]
    return {"epsilon": epsilon, "links": [link_tree(L, P.field.encode) for L in links]}


def analyze_report(P: HPolytope, T: TorusData, faces: FacePoset, S: Stratification | None = None) -> dict:
    S = S or build_stratification(P, T, faces)
    return {
        "input": P.name,
        "n": P.n,
        "d": P.d,
        "field": P.field.to_json(),
        "face_count": len(faces),
        "f_vector": faces.f_vector(),
        "singular_faces": [{"I": one_based(F.I), "p": F.dim} for F in faces.singular_faces()],
        "rationality": _verdict(T),
        "dim_n_frak": T.dim_n,
        "pieces": len(S),
        "strata": strata_report(S)["pieces"],
        "notes": [NORMALIZATION_NOTE],
    }


# -- DOT -----------------------------------------------------------------------


def _label(I, p, singular: bool) -> str:
    inner = ",".join(str(j) for j in one_based(I))
    return f"I={{{inner}}} p={p} [{'S' if singular else 'R'}]"


def export_dot(obj, target: str = "faces") -> str:
    """Hasse diagram of a :class:`FacePoset` (``faces``) or :class:`Stratification` (``pieces``).

    Edges point from the smaller element to the one covering it.
    """
    lines = [f"digraph {target} {{", "  rankdir=BT;"]
    if target == "faces":
        if not isinstance(obj, FacePoset):
            raise TypeError("faces target needs a FacePoset")
        nodes = list(obj)
        ids = {F.active: k for k, F in enumerate(nodes)}
        for k, F in enumerate(nodes):
            lines.append(f'  f{k} [label="{_label(F.I, F.dim, F.singular)}"];')
        for F, G in obj.covers():
            lines.append(f"  f{ids[F.active]} -> f{ids[G.active]};")
    elif target == "pieces":
        if not isinstance(obj, Stratification):
            raise TypeError("pieces target needs a Stratification")
        pieces = list(obj)
        for k, pc in enumerate(pieces):
            p = pc.face.dim if pc.face is not None else obj.n
            lines.append(f'  t{k} [label="{_label(pc.face_I, p, pc.kind == "singular")}"];')
        index = {id(pc): k for k, pc in enumerate(pieces)}
        for a, b in obj.covers():
            lines.append(f"  t{index[id(a)]} -> t{index[id(b)]};")
    else:
        raise ValueError(f"unknown dot target {target!r}")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- rendering -------------------------------------------------------------------


def to_json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _text_lines(obj, indent=0):
    pad = "  " * indent
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not _flat(v):
                yield f"{pad}{k}:"
                yield from _text_lines(v, indent + 1)
            else:
                yield f"{pad}{k}: {_scalar_text(v)}"
    elif isinstance(obj, list):
        for item in obj:
            if isinstance(item, (dict, list)) and not _flat(item):
                yield f"{pad}-"
                yield from _text_lines(item, indent + 1)
            else:
                yield f"{pad}- {_scalar_text(item)}"
    else:
        yield f"{pad}{_scalar_text(obj)}"


def _flat(v) -> bool:
    if isinstance(v, dict):
        return all(not isinstance(x, (dict, list)) for x in v.values())
    return all(not isinstance(x, (dict, list)) or (isinstance(x, list) and all(not isinstance(y, (dict, list)) for y in x))
               for x in v)


def _scalar_text(v) -> str:
    if isinstance(v, dict):
        return ", ".join(f"{k}={_scalar_text(x)}" for k, x in v.items())
    if isinstance(v, list):
        return "[" + ", ".join(_scalar_text(x) for x in v) + "]"
    if v is None:
        return "-"
    return str(v)


def to_text(obj) -> str:
    return "\n".join(_text_lines(obj)) + "\n"


def verify_table(result: dict) -> str:
    rows = result["checks"]
    width = max(len(c["name"]) for c in rows)
    out = [f"input: {result['input']}  seed: {result['seed']}  samples: {result['samples']}"]
    for c in rows:
        out.append(f"{'PASS' if c['passed'] else 'FAIL'}  {c['name']:<{width}}  {c['detail']}")
    out.append(f"overall: {'PASS' if result['passed'] else 'FAIL'}")
    return "\n".join(out) + "\n"
