"""Explicit staircases and towers for the built-in algebras, and their JSON form.

The shipped files under data/ are regenerated by the builders here; loading a
file always re-certifies it.
"""

from __future__ import annotations

import json
from importlib import resources

from .algebra import GradedAlgebra, builtin, make_noncomm_M, make_steenrod_A1
from .entropy import (
    CertificationError, Pyramid, Staircase, _cyclic_map, build_tower, certify_pyramid, tower_to_pyramid,
    verify_staircase,
)
from .modules import (
    ModuleMap, algebra_vector, as_degree_zero, direct_sum, factor_through, free_generator, free_module,
    kernel, left_ideal, map_from_spec, map_to_spec, module_from_spec, module_to_spec, right_multiplication,
    summand_injection, trivial_module, twist,
)

# storey elements, in order, for the naive towers of the built-in algebras
TOWERS = {
    "A1": ["Sq1Sq2+Sq2Sq1", "Sq1", "Sq2"],
    "M": ["x3", "x1", "x2"],
    "ext-1": ["e1"],
    "ext-1-1": ["e1", "e2"],
    "ext-1-1-1": ["e1", "e2", "e3"],
    "ext-1-2": ["e1", "e2"],
    "ext-1-2-3": ["e1", "e2", "e3"],
    "trunc-3-2": ["x"],
}


def _augmentation(m, k0):
    f = m.field
    return ModuleMap(m, k0, 0, tuple(f.unit(0) if d == k0.degrees[0] else f.zero() for d in m.degrees))


def _element_of(sub_inclusion: ModuleMap, v):
    """Coordinates in a submodule of an ambient vector v."""
    from .linalg import Echelon
    f = sub_inclusion.source.field
    ech = Echelon(f)
    for k, c in enumerate(sub_inclusion.columns):
        ech.add(c, f.unit(k))
    x = ech.express(v)
    if x is None:
        raise CertificationError("vector is not in the submodule")
    return x


def build_a1_staircase() -> Staircase:
    """k(12) -> B0(6) -> A(4) -> A(2) -> B0(-1) -> k over A(1), with B0 = A·Sq1.

    Four short exact sequences spliced at kernels:
      p0: B0(-1) -> k        Sq1 ↦ 1
      p1: A(2) -> ker p0     1 ↦ Sq2Sq1
      p2: A(4) -> ker p1     1 ↦ Sq2
      p3: B0(6) -> ker p2    Sq1 ↦ Sq1Sq2
    and ker p3 ≅ k(12).
    """
    a = make_steenrod_A1()
    f = a.field
    B0, b_inc = left_ideal(a, ["Sq1"], name="B0")
    A = b_inc.target
    k0 = trivial_module(a, 0)

    T0 = twist(B0, -1)
    p0 = _augmentation(T0, k0)
    K0, i0 = kernel(p0)

    def b0_vec(expr):
        return _element_of(b_inc, algebra_vector(A, expr))

    A2 = free_module(a, [2])
    p1 = _cyclic_map(A2, free_generator(A2, 0), K0, _element_of(i0, b0_vec("Sq2Sq1")))
    K1, i1 = kernel(p1)

    A4 = free_module(a, [4])
    g2 = free_generator(A2, 0)
    sq2_g = A2.act(a.element("Sq2"), g2)
    p2 = _cyclic_map(A4, free_generator(A4, 0), K1, _element_of(i1, sq2_g))
    K2, i2 = kernel(p2)

    B6 = twist(B0, 6)
    g4 = free_generator(A4, 0)
    target = A4.act(a.element("Sq1Sq2"), g4)
    p3 = _cyclic_map(B6, b0_vec("Sq1"), K2, _element_of(i2, target))
    K3, i3 = kernel(p3)

    segs = [[i3, p3], [i2, p2], [i1, p1], [i0, p0]]
    roles = [("N", 12), ("M", 6), ("free", None), ("free", None), ("M", -1), ("N", 0)]
    return Staircase(k0, B0, segs, roles, [(B0, 1, 1)], "A1 staircase")


def build_m_periodicity(a: GradedAlgebra | None = None):
    """The sequences 0 -> X -> A -> X(-1) -> 0 and 0 -> Y -> A -> Y(-2) -> 0 for
    X = A·x1, Y = A·x2, the right-hand maps being b ↦ b·x1 and b ↦ b·x2.

    Over M these are exact, so ΩX ≅ X(1) and ΩY ≅ Y(2).  Any algebra with
    generators named x1, x2 (or e1, e2) can be passed for comparison.
    """
    m = a or make_noncomm_M()
    g1, g2 = ("x1", "x2") if "x1" in m.labels else ("e1", "e2")
    X, ix = left_ideal(m, [g1], name="X")
    Y, iy = left_ideal(m, [g2], name="Y")
    A = ix.target
    rx = as_degree_zero(factor_through(right_multiplication(m, g1, A), ix))
    ry = as_degree_zero(factor_through(right_multiplication(m, g2, A), iy))
    return [ix, rx], [iy, ry]


def build_m_ladder(a: GradedAlgebra | None = None) -> Staircase:
    """k(6) -> M -> X(-1) ⊕ Y(-2) -> k, the middle map being b ↦ (b·x1, b·x2)."""
    (ix, rx), (iy, ry) = build_m_periodicity(a)
    m = ix.source.algebra
    f = m.field
    X, Y, A = ix.source, iy.source, ix.target
    top = [i for i, d in enumerate(A.degrees) if d == 6]
    parts = [twist(X, -1), twist(Y, -2)]
    S = direct_sum(parts, name="X(-1)+Y(-2)")
    cols = [f.zero() for _ in range(A.dim)]
    for k, comp in enumerate([rx, ry]):
        inj = summand_injection(S, parts, k)
        cols = [f.add(c, inj.apply(v)) for c, v in zip(cols, comp.columns)]
    mid = ModuleMap(A, S, 0, tuple(cols))
    k6 = trivial_module(m, 6)
    first = ModuleMap(k6, A, 0, (f.unit(top[0]),))
    k0 = trivial_module(m, 0)
    last = _augmentation(S, k0)
    roles = [("N", 6), ("free", None), ("M", 0), ("N", 0)]
    return Staircase(k0, S, [[first, mid, last]], roles, [(parts[0], 1, 1), (parts[1], 1, 2)], "M ladder")


BUILDERS = {"a1_staircase": build_a1_staircase, "m_ladder": build_m_ladder}
PYRAMID_FILES = {"A1": "a1_staircase", "M": "m_ladder"}


# ------------------------------------------------------------------ JSON

def staircase_to_json(st: Staircase, algebra_ref: str) -> dict:
    names: dict = {}
    modules = {}

    def ref(m):
        for key, (obj, _) in names.items():
            if obj is m or (obj.equals(m) and obj.labels == m.labels):
                return key
        key = f"m{len(names)}"
        names[key] = (m, None)
        modules[key] = module_to_spec(m, algebra_ref)
        return key

    doc = {"name": st.name, "algebra": algebra_ref}
    doc["N"] = ref(st.N)
    doc["M"] = ref(st.M)
    doc["segments"] = [[dict(source=ref(fm.source), target=ref(fm.target), **map_to_spec(fm)) for fm in seg]
                       for seg in st.segments]
    doc["roles"] = [[r, w] for r, w in st.roles]
    doc["periodicity"] = [{"module": ref(m), "b": b, "a": a} for m, b, a in st.periodicity]
    doc["modules"] = modules
    return doc


def staircase_from_json(doc, certify: bool = True) -> Staircase:
    if isinstance(doc, (str, bytes)):
        doc = json.loads(doc)
    try:
        a = builtin(doc["algebra"]) if isinstance(doc["algebra"], str) else None
        if a is None:
            from .algebra import from_spec
            a = from_spec(doc["algebra"])
        mods = {k: module_from_spec(v, a) for k, v in doc["modules"].items()}
        segs = [[map_from_spec(m, mods[m["source"]], mods[m["target"]]) for m in seg] for seg in doc["segments"]]
        roles = [(r, w) for r, w in doc["roles"]]
        per = [(mods[p["module"]], int(p["b"]), int(p["a"])) for p in doc.get("periodicity", [])]
        st = Staircase(mods[doc["N"]], mods[doc["M"]], segs, roles, per, doc.get("name", ""))
    except (KeyError, TypeError, ValueError) as e:
        raise CertificationError(f"malformed staircase file: {e}") from None
    if certify:
        rep = verify_staircase(st)
        if not rep.ok:
            raise CertificationError(f"staircase {st.name!r} fails certification: {rep.summary()}")
    return st


def data_text(stem: str) -> str:
    return resources.files("stmodent").joinpath("data", f"{stem}.json").read_text()


def load_staircase(stem: str, certify: bool = True) -> Staircase:
    return staircase_from_json(data_text(stem), certify)


def regenerate(stem: str) -> str:
    """The JSON text a builder produces; the shipped file must equal it."""
    st = BUILDERS[stem]()
    ref = "A1" if stem.startswith("a1") else "M"
    return json.dumps(staircase_to_json(st, ref), indent=1, sort_keys=True) + "\n"


# ---------------------------------------------------------------- pyramids

def pyramid_from_staircase(st: Staircase, name: str = "") -> Pyramid:
    py = Pyramid([st.M, st.N], [st], list(st.periodicity), "pyramid", name or st.name)
    rep = certify_pyramid(py)
    if not rep.ok:
        raise CertificationError(rep.summary())
    return py


def builtin_pyramids(name: str, a: GradedAlgebra | None = None) -> list[Pyramid]:
    """Certified pyramids for a built-in algebra: the shipped staircase pyramid
    (if any) followed by the naive tower."""
    out = []
    if name in PYRAMID_FILES:
        out.append(pyramid_from_staircase(load_staircase(PYRAMID_FILES[name]), PYRAMID_FILES[name]))
    if name in TOWERS:
        a = a or builtin(name)
        out.append(tower_to_pyramid(build_tower(a, TOWERS[name])))
    return out
