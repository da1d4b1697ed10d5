"""Anticommuting grouping of Pauli polynomials.

Groups are formed by sorted insertion: terms are visited in order of
decreasing |coefficient| (ties broken lexicographically by word string) and
each joins the first existing group whose members all anticommute with it.
A group with coefficients c_1..c_n contributes sqrt(sum c_k^2) to the
1-norm, since the normalized group sum extends to a reflection; the
explicit product below realizes it with a global phase i.
"""

from dataclasses import dataclass

import numpy as np

from .pauli import PauliPolynomial, PauliWord, anticommutes

__all__ = ["AcGroup", "AcPartition", "sorted_insertion", "lambda_ac", "group_unitary"]


@dataclass
class AcGroup:
    """One anticommuting set, in insertion (descending |coefficient|) order."""

    n_qubits: int
    keys: list
    coeffs: np.ndarray

    @property
    def norm(self):
        return float(np.sqrt((self.coeffs**2).sum()))

    @property
    def words(self):
        return [PauliWord(self.n_qubits, x, z) for x, z in self.keys]

    def angles(self):
        """theta_k = arcsin(c_k / sqrt(sum_{i<=k} c_i^2)) / 2, one per member."""
        partial = np.sqrt(np.cumsum(self.coeffs**2))
        return 0.5 * np.arcsin(np.clip(self.coeffs / partial, -1.0, 1.0))


@dataclass
class AcPartition:
    n_qubits: int
    groups: list

    @property
    def n_groups(self):
        return len(self.groups)

    def one_norm(self):
        return float(sum(g.norm for g in self.groups))

    def validate(self):
        """Raise ValueError unless every group is pairwise anticommuting."""
        for gi, g in enumerate(self.groups):
            words = g.words
            for a in range(len(words)):
                for b in range(a):
                    if not anticommutes(words[a], words[b]):
                        raise ValueError(
                            f"group {gi}: {words[b]} and {words[a]} commute"
                        )


def _insertion_order(poly):
    items = [(xz, c) for xz, c in poly.raw_items() if xz != (0, 0)]
    items.sort(key=lambda kc: (-abs(kc[1]), str(PauliWord(poly.n_qubits, *kc[0]))))
    return items


def sorted_insertion(poly):
    """Partition the non-identity terms of a polynomial into anticommuting groups."""
    items = _insertion_order(poly)
    n_qubits = poly.n_qubits
    member_groups = []  # group index per accepted term
    group_sizes = []

    if n_qubits <= 63 and items:
        acc_x = np.zeros(len(items), dtype=np.uint64)
        acc_z = np.zeros(len(items), dtype=np.uint64)
        gid = np.zeros(len(items), dtype=np.intp)
        count = 0
        for (x, z), _ in items:
            target = len(group_sizes)
            if count:
                xs, zs = acc_x[:count], acc_z[:count]
                anti = (
                    np.bitwise_count(xs & np.uint64(z)) + np.bitwise_count(zs & np.uint64(x))
                ) % 2 == 1
                ok = np.ones(len(group_sizes), dtype=bool)
                np.logical_and.at(ok, gid[:count], anti)
                hits = np.flatnonzero(ok)
                if hits.size:
                    target = int(hits[0])
            if target == len(group_sizes):
                group_sizes.append(0)
            group_sizes[target] += 1
            member_groups.append(target)
            acc_x[count], acc_z[count], gid[count] = x, z, target
            count += 1
    else:
        accepted = []  # (x, z, group)
        for (x, z), _ in items:
            target = len(group_sizes)
            ok = [True] * len(group_sizes)
            for ax, az, g in accepted:
                if ok[g] and ((ax & z).bit_count() + (az & x).bit_count()) % 2 == 0:
                    ok[g] = False
            for g, flag in enumerate(ok):
                if flag:
                    target = g
                    break
            if target == len(group_sizes):
                group_sizes.append(0)
            group_sizes[target] += 1
            member_groups.append(target)
            accepted.append((x, z, target))

    keys = [[] for _ in group_sizes]
    coeffs = [[] for _ in group_sizes]
    for ((xz), c), g in zip(items, member_groups):
        keys[g].append(xz)
        coeffs[g].append(c)
    groups = [
        AcGroup(n_qubits, k, np.asarray(c, dtype=float)) for k, c in zip(keys, coeffs)
    ]
    return AcPartition(n_qubits, groups)


def lambda_ac(obj):
    """1-norm after anticommuting grouping; accepts a polynomial or a partition."""
    if isinstance(obj, PauliPolynomial):
        obj = sorted_insertion(obj)
    return obj.one_norm()


def group_unitary(group):
    """Dense reflection realizing a group: equals i/norm times the group sum.

    Built as A_1 .. A_{n-1} A_n A_n A_{n-1} .. A_1 with A_k = exp(i theta_k P_k);
    intended for small qubit counts (tests, demos).
    """
    dim = 1 << group.n_qubits
    eye = np.eye(dim, dtype=complex)
    mats = [w.to_matrix() for w in group.words]
    thetas = group.angles()

    def rot(th, p):
        return np.cos(th) * eye + 1j * np.sin(th) * p

    left = eye
    for th, p in zip(thetas[:-1], mats[:-1]):
        left = left @ rot(th, p)
    mid = rot(2 * thetas[-1], mats[-1])
    right = eye
    for th, p in zip(thetas[-2::-1], mats[-2::-1]):
        right = right @ rot(th, p)
    return left @ mid @ right
