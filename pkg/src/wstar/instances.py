"""Instance files: parsing, emission, and seeded random generation.

An instance is a JSON document with named sections: the algebra, presented
modules, maps between them, chain complexes assembled from named spaces
and differentials, and unitary chain endomorphisms assembled from named
component maps.  Complex scalars are written as [re, im] pairs; matrices
over the algebra are row-major nested lists of entries, each entry a list
of complex blocks.  Emission is deterministic (sorted keys, fixed float
repr), so emit/parse round-trips byte-identically.

Generation is deterministic per seed.  Complexes are built from an
explicit harmonic / paired-subspace splitting per degree, so d compose to
zero by construction, and endomorphism components are built on the same
splitting, so they commute with d by construction.  Positive operators
derived from the generated invertible maps keep their spectra well away
from the slow-convergence region of the square-root series; singular test
operators carry exact zero modes instead.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import config
from ._linalg import expm_hermitian_phase, hermitize, svd_row_basis
from .algebra import AlgMatrix, BlockAlgebra
from .complexes import ComplexEndomorphism, FiniteComplex
from .errors import InstanceError, StructuralError, ValidationError
from .modules import HilbertModule
from .operators import ModuleMap

__all__ = [
    "InstanceFile",
    "parse_instance",
    "parse_instance_text",
    "emit_instance",
    "generate_instance",
    "PROFILES",
]

PROFILES = ("small", "medium")


@dataclass
class InstanceFile:
    algebra: BlockAlgebra
    modules: dict = field(default_factory=dict)  # name -> HilbertModule
    maps: dict = field(default_factory=dict)  # name -> ModuleMap
    map_ends: dict = field(default_factory=dict)  # name -> (source name, target name)
    complexes: dict = field(default_factory=dict)  # name -> (space names, diff names)
    endomorphisms: dict = field(default_factory=dict)  # name -> (complex name, comp names)

    def digest(self) -> bytes:
        """Stable content hash; memoized because instances are immutable."""
        import hashlib

        cached = getattr(self, "_digest", None)
        if cached is not None:
            return cached
        h = hashlib.sha256()
        h.update(repr(self.algebra.block_sizes).encode())
        for name, mod in sorted(self.modules.items()):
            h.update(name.encode())
            for b in mod.projection.blocks:
                h.update(np.ascontiguousarray(b).tobytes())
        for name, mm in sorted(self.maps.items()):
            h.update(name.encode())
            for b in mm.matrix.blocks:
                h.update(np.ascontiguousarray(b).tobytes())
        self._digest = h.digest()
        return self._digest

    def complex_object(self, name: str) -> FiniteComplex:
        spaces, diffs = self.complexes[name]
        return FiniteComplex(
            [self.modules[s] for s in spaces], [self.maps[d] for d in diffs]
        )

    def endomorphism_object(self, name: str):
        cname, comps = self.endomorphisms[name]
        cx = self.complex_object(cname)
        return cx, ComplexEndomorphism(cx, [self.maps[m] for m in comps])


# -- scalar / matrix codecs -------------------------------------------------------


def _encode_complex(z: complex):
    return [float(z.real), float(z.imag)]


def _decode_complex(v) -> complex:
    if not (isinstance(v, list) and len(v) == 2):
        raise InstanceError("complex scalars are [re, im] pairs")
    return complex(float(v[0]), float(v[1]))


def _encode_algmatrix(m: AlgMatrix):
    out = []
    for r in range(m.rows):
        row = []
        for c in range(m.cols):
            e = m.entry(r, c)
            row.append(
                [[[_encode_complex(z) for z in brow] for brow in blk] for blk in e.blocks]
            )
        out.append(row)
    return out


def _decode_algmatrix(algebra: BlockAlgebra, data, rows: int, cols: int) -> AlgMatrix:
    if len(data) != rows:
        raise InstanceError(f"expected {rows} entry rows, found {len(data)}")
    blocks = [
        np.zeros((rows * n, cols * n), dtype=complex) for n in algebra.block_sizes
    ]
    for r, row in enumerate(data):
        if len(row) != cols:
            raise InstanceError(f"expected {cols} entry columns in row {r}")
        for c, entry in enumerate(row):
            if len(entry) != algebra.k:
                raise InstanceError("entry with the wrong number of blocks")
            for i, n in enumerate(algebra.block_sizes):
                blk = entry[i]
                if len(blk) != n or any(len(brow) != n for brow in blk):
                    raise InstanceError(f"block {i} must be {n} x {n}")
                for a in range(n):
                    for b in range(n):
                        blocks[i][r * n + a, c * n + b] = _decode_complex(blk[a][b])
    return AlgMatrix(algebra, rows, cols, blocks)


# -- emission -------------------------------------------------------------------------


def instance_to_dict(inst: InstanceFile) -> dict:
    return {
        "algebra": {"blocks": list(inst.algebra.block_sizes)},
        "modules": {
            name: {
                "ambient_rank": mod.ambient_rank,
                "projection": _encode_algmatrix(mod.projection),
            }
            for name, mod in sorted(inst.modules.items())
        },
        "maps": {
            name: {
                "source": inst.map_ends[name][0],
                "target": inst.map_ends[name][1],
                "matrix": _encode_algmatrix(m.matrix),
            }
            for name, m in sorted(inst.maps.items())
        },
        "complexes": {
            name: {"spaces": list(spaces), "differentials": list(diffs)}
            for name, (spaces, diffs) in sorted(inst.complexes.items())
        },
        "endomorphisms": {
            name: {"complex": cname, "components": list(comps)}
            for name, (cname, comps) in sorted(inst.endomorphisms.items())
        },
    }


def emit_instance(inst: InstanceFile) -> str:
    return json.dumps(instance_to_dict(inst), indent=1, sort_keys=True) + "\n"


# -- parsing --------------------------------------------------------------------------


def parse_instance_text(text: str) -> InstanceFile:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(
            f"syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    defects = []

    try:
        algebra = BlockAlgebra(data["algebra"]["blocks"])
    except (KeyError, TypeError, ValidationError) as exc:
        raise InstanceError(f"bad algebra section: {exc}") from exc

    inst = InstanceFile(algebra)
    for name in sorted(data.get("modules", {})):
        spec = data["modules"][name]
        try:
            rank = int(spec["ambient_rank"])
            proj = _decode_algmatrix(algebra, spec["projection"], rank, rank)
            defect = proj.projection_defect()
            if defect > config.current().identity:
                defects.append(f"module {name}: projection defect {defect:.3g}")
                continue
            inst.modules[name] = HilbertModule(algebra, rank, proj)
        except (InstanceError, ValidationError, StructuralError, KeyError) as exc:
            defects.append(f"module {name}: {exc}")

    for name in sorted(data.get("maps", {})):
        spec = data["maps"][name]
        try:
            src = inst.modules[spec["source"]]
            tgt = inst.modules[spec["target"]]
        except KeyError as exc:
            defects.append(f"map {name}: unresolved module {exc}")
            continue
        try:
            mat = _decode_algmatrix(algebra, spec["matrix"], src.ambient_rank, tgt.ambient_rank)
            inst.maps[name] = ModuleMap(src, tgt, mat)
            inst.map_ends[name] = (spec["source"], spec["target"])
        except (InstanceError, ValidationError, StructuralError) as exc:
            defects.append(f"map {name}: {exc}")

    for name in sorted(data.get("complexes", {})):
        spec = data["complexes"][name]
        spaces = list(spec.get("spaces", []))
        diffs = list(spec.get("differentials", []))
        missing = [s for s in spaces if s not in inst.modules] + [
            d for d in diffs if d not in inst.maps
        ]
        if missing:
            defects.append(f"complex {name}: unresolved names {missing}")
            continue
        try:
            cx = FiniteComplex([inst.modules[s] for s in spaces], [inst.maps[d] for d in diffs])
        except StructuralError as exc:
            defects.append(f"complex {name}: {exc}")
            continue
        from .complexes import validate_complex

        report = validate_complex(cx)
        if not report.passed:
            defects.append(
                f"complex {name}: d^2 residuals {['%.3g' % r for r in report.residuals]}"
            )
            continue
        inst.complexes[name] = (spaces, diffs)

    for name in sorted(data.get("endomorphisms", {})):
        spec = data["endomorphisms"][name]
        cname = spec.get("complex")
        comps = list(spec.get("components", []))
        if cname not in inst.complexes or any(m not in inst.maps for m in comps):
            defects.append(f"endomorphism {name}: unresolved names")
            continue
        try:
            cx = inst.complex_object(cname)
            ComplexEndomorphism(cx, [inst.maps[m] for m in comps])
        except (ValidationError, StructuralError) as exc:
            defects.append(f"endomorphism {name}: {exc}")
            continue
        inst.endomorphisms[name] = (cname, comps)

    if defects:
        raise InstanceError(
            "instance failed validation:\n  " + "\n  ".join(defects), defects=defects
        )
    return inst


def parse_instance(path) -> InstanceFile:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_instance_text(fh.read())


# -- random generation -----------------------------------------------------------------


def _haar_unitary(rng, d: int) -> np.ndarray:
    """Unitary from a random Hermitian exponential."""
    if d == 0:
        return np.zeros((0, 0), dtype=complex)
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return expm_hermitian_phase(hermitize(g))


def _random_projection_blocks(rng, algebra, n, ranks):
    blocks = []
    for ni, r in zip(algebra.block_sizes, ranks):
        d = n * ni
        if r == 0:
            blocks.append(np.zeros((d, d), dtype=complex))
            continue
        g = rng.standard_normal((r, d)) + 1j * rng.standard_normal((r, d))
        basis = svd_row_basis(g)
        blocks.append(hermitize(basis.conj().T @ basis))
    return blocks


def _random_module(rng, algebra, n, min_total=1) -> HilbertModule:
    while True:
        ranks = [int(rng.integers(0, n * ni + 1)) for ni in algebra.block_sizes]
        if sum(ranks) >= min_total:
            break
    return HilbertModule(
        algebra, n, AlgMatrix(algebra, n, n, _random_projection_blocks(rng, algebra, n, ranks))
    )


def _module_with_ranks(rng, algebra, n, ranks) -> HilbertModule:
    return HilbertModule(
        algebra, n, AlgMatrix(algebra, n, n, _random_projection_blocks(rng, algebra, n, ranks))
    )


def _corner_unitary(rng, module) -> ModuleMap:
    """Random unitary endomorphism from a Hermitian exponential in the corner."""
    blocks = []
    for qb in module.projection.blocks:
        d = qb.shape[0]
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        h = qb @ hermitize(g) @ qb
        blocks.append(expm_hermitian_phase(h) @ qb)
    mat = AlgMatrix(module.algebra, module.ambient_rank, module.ambient_rank, blocks)
    return ModuleMap(module, module, mat)


def _positive_invertible(rng, module, spread=0.7) -> ModuleMap:
    """Positive endomorphism with corner spectrum inside [e^-spread, e^spread]."""
    blocks = []
    for qb in module.projection.blocks:
        d = qb.shape[0]
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        h = hermitize(g)
        nrm = float(np.linalg.norm(h, 2))
        if nrm > 0:
            h = h * (spread / nrm)
        w, v = np.linalg.eigh(h)
        pos = (v * np.exp(w)) @ v.conj().T
        blocks.append(qb @ pos @ qb)
    mat = AlgMatrix(module.algebra, module.ambient_rank, module.ambient_rank, blocks)
    return ModuleMap(module, module, mat)


def _basis_isometry(src: HilbertModule, dst: HilbertModule) -> ModuleMap:
    """Unitary module isomorphism mapping a row basis of src onto one of dst.

    Requires equal per-block ranks.
    """
    blocks = []
    for qs, qd, ni in zip(
        src.projection.blocks, dst.projection.blocks, src.algebra.block_sizes
    ):
        bs = svd_row_basis(qs)
        bd = svd_row_basis(qd)
        if bs.shape[0] != bd.shape[0]:
            raise StructuralError("isometry needs equal per-block ranks")
        blocks.append(bs.conj().T @ bd)
    mat = AlgMatrix(src.algebra, src.ambient_rank, dst.ambient_rank, blocks)
    return ModuleMap(src, dst, mat)


def _random_cut_map(rng, module) -> ModuleMap:
    """Endomorphism with an exact kernel: a random rank cut then a generic map."""
    n = module.ambient_rank
    algebra = module.algebra
    cut_blocks = []
    for qb, ni in zip(module.projection.blocks, algebra.block_sizes):
        basis = svd_row_basis(qb)
        r = basis.shape[0]
        keep = int(rng.integers(0, r + 1)) if r else 0
        if keep == 0:
            cut_blocks.append(np.zeros_like(qb))
        else:
            sel = basis[:keep]
            cut_blocks.append(hermitize(sel.conj().T @ sel))
    cut = AlgMatrix(algebra, n, n, cut_blocks)
    g_blocks = [
        rng.standard_normal((n * ni, n * ni)) + 1j * rng.standard_normal((n * ni, n * ni))
        for ni in algebra.block_sizes
    ]
    g = AlgMatrix(algebra, n, n, g_blocks)
    mat = cut @ g @ module.projection
    return ModuleMap(module, module, mat)


def _build_complex(rng, algebra, length, max_rank):
    """Spaces and differentials with d^2 = 0 plus a commuting unitary.

    Per degree and block, an orthonormal frame is split into an incoming
    paired part (the image of the previous differential), a harmonic part,
    and an outgoing paired part; the differential carries the outgoing part
    of degree m isometrically (scaled) onto the incoming part of degree
    m+1, and the endomorphism acts by one unitary per paired subspace,
    transported along the differential.
    """
    k = algebra.k
    ranks = [int(rng.integers(1, max_rank + 1)) for _ in range(length)]
    # per block: frames[m][i] = (incoming, harmonic, outgoing) row frames
    frames = []
    out_dims_prev = [0] * k
    for m in range(length):
        frames_m = []
        for i, ni in enumerate(algebra.block_sizes):
            d = ranks[m] * ni
            inc = out_dims_prev[i]
            if inc > d:
                inc = 0  # cannot pair; degenerate draw, drop the pairing
            room = d - inc
            harm = int(rng.integers(0, room + 1))
            outg = int(rng.integers(0, room - harm + 1)) if m < length - 1 else 0
            g = rng.standard_normal((inc + harm + outg, d)) + 1j * rng.standard_normal(
                (inc + harm + outg, d)
            )
            frame = svd_row_basis(g) if inc + harm + outg else np.zeros((0, d), dtype=complex)
            while frame.shape[0] < inc + harm + outg:
                # rank-deficient draw; retry with a fresh matrix
                g = rng.standard_normal((inc + harm + outg, d)) + 1j * rng.standard_normal(
                    (inc + harm + outg, d)
                )
                frame = svd_row_basis(g)
            frames_m.append((frame[:inc], frame[inc : inc + harm], frame[inc + harm :]))
        frames.append(frames_m)
        out_dims_prev = [f[2].shape[0] for f in frames_m]

    spaces = []
    for m in range(length):
        blocks = []
        for i in range(k):
            inc, harm, outg = frames[m][i]
            stack = np.vstack([inc, harm, outg])
            d = stack.shape[1]
            blocks.append(
                hermitize(stack.conj().T @ stack)
                if stack.shape[0]
                else np.zeros((d, d), dtype=complex)
            )
        spaces.append(
            HilbertModule(algebra, ranks[m], AlgMatrix(algebra, ranks[m], ranks[m], blocks))
        )

    sigmas = [
        [float(rng.uniform(0.5, 1.5)) for _ in range(k)] for _ in range(length - 1)
    ]
    diffs = []
    for m in range(length - 1):
        blocks = []
        for i in range(k):
            _, _, outg = frames[m][i]
            inc_next = frames[m + 1][i][0]
            d_src = ranks[m] * algebra.block_sizes[i]
            d_tgt = ranks[m + 1] * algebra.block_sizes[i]
            if outg.shape[0] == 0 or inc_next.shape[0] != outg.shape[0]:
                blocks.append(np.zeros((d_src, d_tgt), dtype=complex))
            else:
                blocks.append(sigmas[m][i] * (outg.conj().T @ inc_next))
        mat = AlgMatrix(algebra, ranks[m], ranks[m + 1], blocks)
        diffs.append(ModuleMap(spaces[m], spaces[m + 1], mat))

    # paired unitaries: one per outgoing subspace, reused on the matching
    # incoming subspace of the next degree
    pair_unitaries = []
    comps = []
    for m in range(length):
        blocks = []
        new_pairs = []
        for i in range(k):
            inc, harm, outg = frames[m][i]
            d = ranks[m] * algebra.block_sizes[i]
            u_blk = np.zeros((d, d), dtype=complex)
            if harm.shape[0]:
                w = _haar_unitary(rng, harm.shape[0])
                u_blk += harm.conj().T @ w @ harm
            if outg.shape[0]:
                w = _haar_unitary(rng, outg.shape[0])
                new_pairs.append(w)
                u_blk += outg.conj().T @ w @ outg
            else:
                new_pairs.append(np.zeros((0, 0), dtype=complex))
            if inc.shape[0]:
                w = pair_unitaries[-1][i]
                u_blk += inc.conj().T @ w @ inc
            blocks.append(u_blk)
        pair_unitaries.append(new_pairs)
        mat = AlgMatrix(algebra, ranks[m], ranks[m], blocks)
        comps.append(ModuleMap(spaces[m], spaces[m], mat))
    return spaces, diffs, comps


def generate_instance(seed: int, profile: str = "small") -> InstanceFile:
    """Deterministic random instance.

    ``small``: one or two blocks of size up to 2, ambient ranks up to 3,
    complexes of up to 3 spaces.  ``medium``: up to three blocks of size up
    to 3, ranks up to 4, complexes of up to 5 spaces.
    """
    if profile not in PROFILES:
        raise ValueError(f"unknown profile {profile!r}")
    rng = np.random.default_rng(int(seed))
    if profile == "small":
        k = int(rng.integers(1, 3))
        sizes = [int(rng.integers(1, 3)) for _ in range(k)]
        max_rank = 3
        max_len = 3
    else:
        k = int(rng.integers(1, 4))
        sizes = [int(rng.integers(1, 4)) for _ in range(k)]
        max_rank = 4
        max_len = 5
    algebra = BlockAlgebra(sizes)

    inst = InstanceFile(algebra)
    n_m = int(rng.integers(1, max_rank + 1))
    m_mod = _random_module(rng, algebra, n_m, min_total=1)
    n_mod = _module_with_ranks(rng, algebra, n_m, [r for r in m_mod.k0().ranks])

    inst.modules["M"] = m_mod
    inst.modules["N"] = n_mod

    def add_map(name, mm):
        inst.maps[name] = mm
        src = next(k_ for k_, v in inst.modules.items() if v is mm.source)
        tgt = next(k_ for k_, v in inst.modules.items() if v is mm.target)
        inst.map_ends[name] = (src, tgt)

    add_map("U", _corner_unitary(rng, m_mod))
    add_map("J", ModuleMap(m_mod, n_mod,
                           (_positive_invertible(rng, m_mod).matrix
                            @ _basis_isometry(m_mod, n_mod).matrix)))
    add_map(
        "alpha",
        ModuleMap(
            m_mod,
            m_mod,
            _positive_invertible(rng, m_mod).matrix @ _corner_unitary(rng, m_mod).matrix,
        ),
    )
    add_map("phi", _random_cut_map(rng, m_mod))

    # an injective, non-surjective embedding target: M's ranks plus one slot
    big = HilbertModule.direct_sum([m_mod, _random_module(rng, algebra, 1, min_total=1)])
    inst.modules["Nbig"] = big
    incl_blocks = []
    for ni, qb in zip(algebra.block_sizes, m_mod.projection.blocks):
        d_src = n_m * ni
        d_tgt = (n_m + 1) * ni
        blk = np.zeros((d_src, d_tgt), dtype=complex)
        blk[:, :d_src] = qb
        incl_blocks.append(blk)
    incl = AlgMatrix(algebra, n_m, n_m + 1, incl_blocks)
    add_map(
        "beta",
        ModuleMap(m_mod, big, _positive_invertible(rng, m_mod).matrix @ incl),
    )

    length = int(rng.integers(2, max_len + 1))
    spaces, diffs, comps = _build_complex(rng, algebra, length, max_rank)
    space_names = []
    for m, s in enumerate(spaces):
        name = f"E{m}"
        inst.modules[name] = s
        space_names.append(name)
    diff_names = []
    for m, d in enumerate(diffs):
        name = f"d{m}"
        inst.maps[name] = d
        inst.map_ends[name] = (space_names[m], space_names[m + 1])
        diff_names.append(name)
    comp_names = []
    for m, u in enumerate(comps):
        name = f"V{m}"
        inst.maps[name] = u
        inst.map_ends[name] = (space_names[m], space_names[m])
        comp_names.append(name)
    inst.complexes["E"] = (space_names, diff_names)
    inst.endomorphisms["V"] = ("E", comp_names)
    return inst
