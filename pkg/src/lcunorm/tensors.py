"""Second-quantized Hamiltonian tensors and FCIDUMP ingestion.

The electronic Hamiltonian is kept in chemist form

    H = e0 + sum_{sigma,ij} obt[i,j] E^{i sigma}_{j sigma}
           + sum_{sigma sigma',ijkl} tbt[i,j,k,l] E^{i sigma}_{j sigma} E^{k sigma'}_{l sigma'}

with E^p_q = a^dag_p a_q and real orbitals, so obt is symmetric and tbt has
the usual 8-fold index symmetry.  All energies are in Hartree.
"""

import re
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import ParseError

__all__ = [
    "SpatialTensors",
    "SpinTensor2e",
    "FcidumpRecord",
    "parse_fcidump",
    "write_fcidump",
    "load_fcidump",
    "load_fixture",
    "fixture_path",
    "to_chemist",
    "one_body_adjust",
    "absorb_one_body",
]

FIXTURE_NAMES = ("h2", "lih", "beh2", "h2o", "nh3")


def _check_symmetric(m, what):
    scale = max(np.abs(m).max(), 1.0)
    dev = np.abs(m - m.T).max()
    if dev > 1e-12 * scale:
        raise ValueError(f"{what} not symmetric: max deviation {dev:.3e}")


def _check_eightfold(g, what):
    scale = max(np.abs(g).max(), 1.0)
    for perm, label in (
        ((1, 0, 2, 3), "i<->j"),
        ((0, 1, 3, 2), "k<->l"),
        ((2, 3, 0, 1), "ij<->kl"),
    ):
        dev = np.abs(g - g.transpose(perm)).max()
        if dev > 1e-12 * scale:
            raise ValueError(f"{what} violates {label} symmetry: max deviation {dev:.3e}")


def _check_pair_exchange(g, what):
    scale = max(np.abs(g).max(), 1.0)
    for perm, label in (((2, 3, 0, 1), "ij<->kl"), ((1, 0, 3, 2), "ji|lk")):
        dev = np.abs(g - g.transpose(perm)).max()
        if dev > 1e-12 * scale:
            raise ValueError(f"{what} violates {label} symmetry: max deviation {dev:.3e}")


@dataclass
class SpatialTensors:
    """Constant, one-electron matrix and two-electron tensor (chemist notation)."""

    e0: float
    obt: np.ndarray
    tbt: np.ndarray

    def __post_init__(self):
        self.obt = np.ascontiguousarray(self.obt, dtype=float)
        self.tbt = np.ascontiguousarray(self.tbt, dtype=float)
        n = self.obt.shape[0]
        if self.obt.shape != (n, n) or self.tbt.shape != (n, n, n, n):
            raise ValueError("tensor shape mismatch")
        _check_symmetric(self.obt, "obt")
        _check_eightfold(self.tbt, "tbt")

    @property
    def n_orb(self):
        return self.obt.shape[0]

    def replace(self, e0=None, obt=None, tbt=None):
        return SpatialTensors(
            self.e0 if e0 is None else e0,
            self.obt if obt is None else obt,
            self.tbt if tbt is None else tbt,
        )


@dataclass
class SpinTensor2e:
    """Two-electron coefficients resolved by spin: same-spin and opposite-spin blocks."""

    same: np.ndarray
    opposite: np.ndarray

    def __post_init__(self):
        self.same = np.ascontiguousarray(self.same, dtype=float)
        self.opposite = np.ascontiguousarray(self.opposite, dtype=float)
        n = self.same.shape[0]
        if self.same.shape != (n, n, n, n) or self.opposite.shape != (n, n, n, n):
            raise ValueError("tensor shape mismatch")
        _check_pair_exchange(self.same, "same-spin block")
        _check_pair_exchange(self.opposite, "opposite-spin block")

    @property
    def n_orb(self):
        return self.same.shape[0]


@dataclass
class FcidumpRecord:
    """Raw FCIDUMP content: core Hamiltonian and (ij|kl) integrals."""

    n_orb: int
    n_elec: int
    ms2: int
    core_energy: float
    core_h: np.ndarray
    eri: np.ndarray

    def __post_init__(self):
        self.core_h = np.ascontiguousarray(self.core_h, dtype=float)
        self.eri = np.ascontiguousarray(self.eri, dtype=float)
        _check_symmetric(self.core_h, "core_h")
        _check_eightfold(self.eri, "eri")


_HEADER_INT = {
    "NORB": re.compile(r"NORB\s*=\s*(\d+)", re.IGNORECASE),
    "NELEC": re.compile(r"NELEC\s*=\s*(\d+)", re.IGNORECASE),
    "MS2": re.compile(r"MS2\s*=\s*(-?\d+)", re.IGNORECASE),
}


def parse_fcidump(text):
    """Parse FCIDUMP text into an FcidumpRecord.

    The header namelist runs through `&END` (or `/`); data lines are
    `value i j k l` with 1-based indices.  `i=j=k=l=0` holds the core energy,
    `k=l=0` a core-Hamiltonian entry, everything else an (ij|kl) integral
    whose permutational images are filled in.
    """
    lines = text.splitlines()
    header_lines = []
    data_start = None
    for ln, raw in enumerate(lines, start=1):
        header_lines.append(raw)
        if "&END" in raw.upper() or raw.strip() == "/" or raw.strip().endswith("/"):
            data_start = ln
            break
    if data_start is None:
        raise ParseError("missing &END terminator in FCIDUMP header", line=len(lines))
    header = " ".join(header_lines)
    if "&FCI" not in header.upper():
        raise ParseError("missing &FCI header", line=1)
    m = _HEADER_INT["NORB"].search(header)
    if m is None:
        raise ParseError("header lacks NORB", line=1)
    n = int(m.group(1))
    m = _HEADER_INT["NELEC"].search(header)
    if m is None:
        raise ParseError("header lacks NELEC", line=1)
    n_elec = int(m.group(1))
    m = _HEADER_INT["MS2"].search(header)
    ms2 = int(m.group(1)) if m else 0

    core_energy = 0.0
    core_h = np.zeros((n, n))
    eri = np.zeros((n, n, n, n))
    for ln in range(data_start, len(lines)):
        raw = lines[ln].strip()
        if not raw:
            continue
        parts = raw.split()
        if len(parts) != 5:
            raise ParseError(f"expected 'value i j k l', got {raw!r}", line=ln + 1)
        try:
            v = float(parts[0])
            i, j, k, l = (int(p) for p in parts[1:])
        except ValueError as exc:
            raise ParseError(str(exc), line=ln + 1) from None
        for idx in (i, j, k, l):
            if idx < 0 or idx > n:
                raise ParseError(f"orbital index {idx} outside [0, {n}]", line=ln + 1)
        if i == j == k == l == 0:
            core_energy = v
        elif k == 0 and l == 0:
            if i == 0 or j == 0:
                raise ParseError(f"bad one-electron index pair ({i},{j})", line=ln + 1)
            core_h[i - 1, j - 1] = core_h[j - 1, i - 1] = v
        elif 0 in (i, j, k, l):
            raise ParseError(f"bad index pattern ({i},{j},{k},{l})", line=ln + 1)
        else:
            for a, b in ((i - 1, j - 1), (j - 1, i - 1)):
                for c, d in ((k - 1, l - 1), (l - 1, k - 1)):
                    eri[a, b, c, d] = v
                    eri[c, d, a, b] = v
    return FcidumpRecord(n, n_elec, ms2, core_energy, core_h, eri)


def write_fcidump(rec):
    """Serialize an FcidumpRecord; parse(write(rec)) reproduces rec bit-for-bit."""
    n = rec.n_orb
    out = [f" &FCI NORB={n},NELEC={rec.n_elec},MS2={rec.ms2},"]
    out.append("  ORBSYM=" + ",".join(["1"] * n) + ",")
    out.append("  ISYM=1,")
    out.append(" &END")
    for i in range(n):
        for j in range(i + 1):
            for k in range(i + 1):
                lmax = j + 1 if k == i else k + 1
                for l in range(lmax):
                    v = rec.eri[i, j, k, l]
                    if v != 0.0:
                        out.append(f" {v:.17g} {i + 1} {j + 1} {k + 1} {l + 1}")
    for i in range(n):
        for j in range(i + 1):
            v = rec.core_h[i, j]
            if v != 0.0:
                out.append(f" {v:.17g} {i + 1} {j + 1} 0 0")
    out.append(f" {rec.core_energy:.17g} 0 0 0 0")
    return "\n".join(out) + "\n"


def load_fcidump(path):
    with open(path) as fh:
        return parse_fcidump(fh.read())


def fixture_path(name):
    """Filesystem path of a bundled FCIDUMP fixture (h2, lih, beh2, h2o, nh3)."""
    if name not in FIXTURE_NAMES:
        raise KeyError(f"unknown fixture {name!r}; available: {', '.join(FIXTURE_NAMES)}")
    return resources.files("lcunorm.data").joinpath(f"{name}.fcidump")


def load_fixture(name):
    return parse_fcidump(fixture_path(name).read_text())


def to_chemist(rec):
    """Convert raw integrals to chemist-form tensors.

    g~_ijkl = (ij|kl)/2 and h~_ij = core_h_ij - sum_k g~_ikkj; the correction
    comes from reordering a_j a^dag_k inside the physicist two-electron term.
    """
    tbt = 0.5 * rec.eri
    obt = rec.core_h - np.einsum("ikkj->ij", tbt)
    return SpatialTensors(rec.core_energy, obt, tbt)


def one_body_adjust(t):
    """Effective one-body matrix h~_ij + 2 sum_k g~_ijkk.

    This is the one-electron content left over when every two-electron
    fragment is written in reflection variables; its eigenvalues are the mu_i
    entering the fermionic one-norms.
    """
    return t.obt + 2.0 * np.einsum("ijkk->ij", t.tbt)


def absorb_one_body(mu, u):
    """Express a rotated diagonal one-body operator as a two-electron tensor.

    Given sum_{i sigma} mu_i n_{i sigma} in the orbital basis rotated by u,
    returns the SpinTensor2e with same-spin block
    o_ijkl = sum_m mu_m U_im U_jm U_km U_lm and a zero opposite-spin block.
    Valid because n^2 = n for occupation operators.
    """
    mu = np.asarray(mu, dtype=float)
    u = np.asarray(u, dtype=float)
    n = u.shape[0]
    if np.abs(u.T @ u - np.eye(n)).max() > 1e-10:
        raise ValueError("u is not orthogonal to 1e-10")
    same = np.einsum("im,jm,km,lm,m->ijkl", u, u, u, u, mu)
    return SpinTensor2e(same, np.zeros((n, n, n, n)))
