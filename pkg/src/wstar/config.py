"""Tolerance management.

Every numerical threshold in the package is derived from one master
tolerance (default 1e-9).  Setting the environment variable ``WSTAR_TOL``
rescales all derived thresholds proportionally.
"""

import os
from dataclasses import dataclass

MASTER_DEFAULT = 1e-9


@dataclass(frozen=True)
class Tolerances:
    master: float = MASTER_DEFAULT

    @property
    def _f(self):
        return self.master / MASTER_DEFAULT

    # defining identities of projections, unitaries, chain maps
    @property
    def identity(self):
        return 1e-9 * self._f

    # relative singular-value cutoff for rank decisions
    @property
    def rank_rel(self):
        return 1e-9 * self._f

    # hard floor for identically-zero inputs
    @property
    def rank_floor(self):
        return 1e-12 * self._f

    # Hodge / isometry / reconstruction checks
    @property
    def loose(self):
        return 1e-8 * self._f

    # trace equalities, Chern consistency
    @property
    def trace(self):
        return 1e-9 * self._f

    # traciality / functoriality on random probes
    @property
    def probe(self):
        return 1e-10 * self._f

    # C*-identity and series stopping rule
    @property
    def tight(self):
        return 1e-12 * self._f

    # agreement between the series and diagonalization square roots
    @property
    def sqrt_agree(self):
        return 1e-6 * self._f

    # eigenvalue-angle clustering width (radians)
    @property
    def angle_cluster(self):
        return 1e-7 * self._f

    # angles this close to the branch cut snap to exactly zero
    @property
    def angle_snap(self):
        return 1e-12 * self._f

    # restriction residual below which no re-unitarization is attempted
    @property
    def restrict_exact(self):
        return 1e-10 * self._f


_current = None


def current() -> Tolerances:
    global _current
    if _current is None:
        refresh_from_env()
    return _current


def refresh_from_env():
    global _current
    raw = os.environ.get("WSTAR_TOL")
    master = MASTER_DEFAULT
    if raw:
        master = float(raw)
        if master <= 0:
            raise ValueError("WSTAR_TOL must be positive")
    _current = Tolerances(master)
    return _current


class override:
    """Context manager pinning the master tolerance (used by tests)."""

    def __init__(self, master):
        self.master = master
        self._saved = None

    def __enter__(self):
        global _current
        self._saved = current()
        _current = Tolerances(self.master)
        return _current

    def __exit__(self, *exc):
        global _current
        _current = self._saved
        return False
