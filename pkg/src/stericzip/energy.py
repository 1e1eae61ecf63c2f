"""Nonbonded pair potentials, cluster energies and gradients, and the
geometric audits (hydrogen bonds, steric clashes) used to validate models.

Two interchangeable Lennard-Jones parameterizations are supported:

* well form      V(r) = 4 eps [ (sigma/r)^12 - (sigma/r)^6 ]
* coefficient    V(r) = A / r^12 - B / r^6        (A = 4 eps sigma^12, B = 4 eps sigma^6)

Backbone hydrogen bonds use the 10-12 form V(r) = C / r^12 - D / r^10,
whose minimum sits at sqrt(6C / 5D).  Hydrogen-bond *detection* is purely
geometric (N...O distance), because the structures handled here carry no
hydrogens.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularityError, StericZipError
from .pdbio import Atom, AtomSelector, Structure

MIN_PAIR_DISTANCE = 1e-8
HBOND_CUTOFF = 3.5
BACKBONE_ATOMS = ("N", "CA", "C", "O")


@dataclass(frozen=True)
class LJParams:
    """Well depth (energy units) and zero-crossing distance (Angstroms)."""

    epsilon: float = 1.0
    sigma: float = 4.0

    def __post_init__(self):
        if self.epsilon <= 0 or self.sigma <= 0:
            raise StericZipError("LJParams requires epsilon > 0 and sigma > 0")

    @property
    def r_min(self) -> float:
        """Distance of the potential minimum, 2^(1/6) sigma."""
        return 2.0 ** (1.0 / 6.0) * self.sigma


@dataclass(frozen=True)
class LJABParams:
    """Repulsion/attraction coefficients of the 12-6 form."""

    a: float
    b: float

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise StericZipError("LJABParams requires a > 0 and b > 0")


@dataclass(frozen=True)
class HBParams:
    """Repulsion/attraction coefficients of the 10-12 hydrogen-bond form."""

    c: float
    d: float

    def __post_init__(self):
        if self.c <= 0 or self.d <= 0:
            raise StericZipError("HBParams requires c > 0 and d > 0")

    @property
    def r_min(self) -> float:
        """Distance of the stationary point, sqrt(6C / 5D)."""
        return float(np.sqrt(6.0 * self.c / (5.0 * self.d)))


def lj_ab_from_lj(params: LJParams) -> LJABParams:
    """Coefficient form of a well-form parameter set."""
    return LJABParams(4.0 * params.epsilon * params.sigma**12, 4.0 * params.epsilon * params.sigma**6)


def lj_from_ab(params: LJABParams) -> LJParams:
    """Well form of a coefficient parameter set (exact inverse of lj_ab_from_lj)."""
    sigma = (params.a / params.b) ** (1.0 / 6.0)
    epsilon = params.b**2 / (4.0 * params.a)
    return LJParams(epsilon, sigma)


def hb_params_from_minimum(r0: float, depth: float) -> HBParams:
    """10-12 coefficients with the well at distance r0 and depth ``depth``."""
    if r0 <= 0 or depth <= 0:
        raise StericZipError("hb_params_from_minimum requires r0 > 0 and depth > 0")
    d = 6.0 * depth * r0**10
    c = (5.0 / 6.0) * d * r0**2
    return HBParams(c, d)


# Defaults used for audit reports: well at 2.9 A, unit depth.
DEFAULT_HB_PARAMS = hb_params_from_minimum(2.9, 1.0)


def _check_distance(r) -> np.ndarray:
    r = np.asarray(r, dtype=np.float64)
    if np.any(r <= 0):
        raise StericZipError(f"pair distance must be positive, got {r!r}")
    return r


def lj_pair_energy(r, params: LJParams):
    """4 eps [(sigma/r)^12 - (sigma/r)^6]; r may be a scalar or an array."""
    r = _check_distance(r)
    s6 = (params.sigma / r) ** 6
    out = 4.0 * params.epsilon * (s6 * s6 - s6)
    return float(out) if out.ndim == 0 else out


def lj_ab_energy(r, params: LJABParams):
    """A / r^12 - B / r^6."""
    r = _check_distance(r)
    inv6 = r**-6.0
    out = params.a * inv6 * inv6 - params.b * inv6
    return float(out) if out.ndim == 0 else out


def hb_pair_energy(r, params: HBParams):
    """C / r^12 - D / r^10."""
    r = _check_distance(r)
    inv2 = r**-2.0
    inv10 = inv2**5
    out = params.c * inv10 * inv2 - params.d * inv10
    return float(out) if out.ndim == 0 else out


def _pair_indices(n_atoms: int, pairs) -> tuple[np.ndarray, np.ndarray]:
    if pairs is None:
        i, j = np.triu_indices(n_atoms, k=1)
        return i, j
    pairs = np.asarray(pairs, dtype=np.intp)
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise StericZipError("pairs must be a sequence of (i, j) index tuples")
    if np.any(pairs < 0) or np.any(pairs >= n_atoms):
        raise StericZipError("pair index out of range")
    if np.any(pairs[:, 0] == pairs[:, 1]):
        raise StericZipError("pair indices must be distinct")
    return pairs[:, 0], pairs[:, 1]


def _as_points(coords) -> np.ndarray:
    pts = np.asarray(coords, dtype=np.float64)
    if pts.ndim == 1:
        if pts.size % 3:
            raise StericZipError("flat coordinate vector length must be a multiple of 3")
        pts = pts.reshape(-1, 3)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise StericZipError("coordinates must be a flat 3N-vector or an (N, 3) array")
    return pts


def lj_cluster_energy(coords, params: LJParams, pairs=None) -> float:
    """Sum of LJ pair energies over all i < j pairs, or over ``pairs`` only.

    ``coords`` is a flat 3N-vector (or an (N, 3) array).  Evaluated pairs
    closer than MIN_PAIR_DISTANCE raise SingularityError.
    """
    pts = _as_points(coords)
    if pts.shape[0] < 2:
        raise StericZipError("cluster energy needs at least two atoms")
    i, j = _pair_indices(pts.shape[0], pairs)
    diff = pts[i] - pts[j]
    r = np.linalg.norm(diff, axis=1)
    if np.any(r < MIN_PAIR_DISTANCE):
        raise SingularityError("coincident atoms in an evaluated pair")
    s6 = (params.sigma / r) ** 6
    return float(np.sum(4.0 * params.epsilon * (s6 * s6 - s6)))


def lj_cluster_gradient(coords, params: LJParams, pairs=None) -> np.ndarray:
    """Analytic gradient of lj_cluster_energy with the same pair selection.

    Returns a flat 3N-vector.
    """
    pts = _as_points(coords)
    if pts.shape[0] < 2:
        raise StericZipError("cluster gradient needs at least two atoms")
    i, j = _pair_indices(pts.shape[0], pairs)
    diff = pts[i] - pts[j]
    r2 = np.sum(diff * diff, axis=1)
    if np.any(r2 < MIN_PAIR_DISTANCE**2):
        raise SingularityError("coincident atoms in an evaluated pair")
    s6 = (params.sigma**2 / r2) ** 3
    # dV/dr / r = -24 eps (2 s12 - s6) / r^2
    coeff = -24.0 * params.epsilon * (2.0 * s6 * s6 - s6) / r2
    forces = coeff[:, None] * diff
    grad = np.zeros_like(pts)
    np.add.at(grad, i, forces)
    np.add.at(grad, j, -forces)
    return grad.reshape(-1)


@dataclass(frozen=True)
class ContactPair:
    """A monitored inter-sheet contact between two selected atoms."""

    first: AtomSelector
    second: AtomSelector
    params: LJParams

    def __post_init__(self):
        if self.first == self.second:
            raise StericZipError("contact pair selectors must be distinct")


@dataclass(frozen=True, eq=False)
class HBond:
    """A backbone N...O pair within the detection cutoff."""

    donor: Atom
    acceptor: Atom
    distance: float


def _collect_atoms(structure: Structure, names=None) -> tuple[list[Atom], np.ndarray]:
    atoms = [a for a in structure.atoms() if names is None or a.name in names]
    if not atoms:
        return [], np.zeros((0, 3))
    return atoms, np.stack([a.position for a in atoms])


def detect_hbonds(structure: Structure, cutoff: float = HBOND_CUTOFF) -> list[HBond]:
    """All backbone N...O pairs closer than ``cutoff``.

    Pairs within one residue, or between adjacent residues of the same
    chain, are excluded; those separations are covalent geometry, not
    hydrogen bonds.  The list is deterministic: sorted by donor then
    acceptor identity.
    """
    donors, d_pos = _collect_atoms(structure, names=("N",))
    acceptors, a_pos = _collect_atoms(structure, names=("O",))
    bonds: list[HBond] = []
    if not donors or not acceptors:
        return bonds
    dist = np.linalg.norm(d_pos[:, None, :] - a_pos[None, :, :], axis=2)
    for di, ai in zip(*np.nonzero(dist <= cutoff)):
        donor, acceptor = donors[di], acceptors[ai]
        if donor.chain_id == acceptor.chain_id and abs(donor.res_seq - acceptor.res_seq) <= 1:
            continue
        bonds.append(HBond(donor, acceptor, float(dist[di, ai])))
    bonds.sort(key=lambda b: (b.donor.chain_id, b.donor.res_seq, b.acceptor.chain_id, b.acceptor.res_seq))
    return bonds


def _bonded(a: Atom, b: Atom) -> bool:
    # The only covalent link between residues is the peptide bond
    # C(i) - N(i+1) within one chain.
    if a.chain_id != b.chain_id:
        return False
    if a.res_seq + 1 == b.res_seq:
        return a.name == "C" and b.name == "N"
    if b.res_seq + 1 == a.res_seq:
        return b.name == "C" and a.name == "N"
    return False


def clash_audit(structure: Structure, cutoff: float) -> list[tuple[Atom, Atom, float]]:
    """Non-bonded atom pairs from different residues closer than ``cutoff``.

    Sorted ascending by distance.  Same-residue pairs and the peptide-bond
    C-N pair of consecutive residues are exempt.
    """
    if cutoff <= 0:
        raise StericZipError("clash cutoff must be positive")
    atoms, pos = _collect_atoms(structure)
    clashes: list[tuple[Atom, Atom, float]] = []
    if len(atoms) < 2:
        return clashes
    chain_ids = np.array([a.chain_id for a in atoms])
    res_seqs = np.array([a.res_seq for a in atoms])
    dist = np.linalg.norm(pos[:, None, :] - pos[None, :, :], axis=2)
    same_residue = (chain_ids[:, None] == chain_ids[None, :]) & (
        res_seqs[:, None] == res_seqs[None, :]
    )
    candidate = (dist < cutoff) & ~same_residue
    candidate[np.tril_indices(len(atoms))] = False
    for i, j in zip(*np.nonzero(candidate)):
        if _bonded(atoms[i], atoms[j]):
            continue
        clashes.append((atoms[i], atoms[j], float(dist[i, j])))
    clashes.sort(key=lambda entry: entry[2])
    return clashes


def contact_report(structure: Structure, contacts: list[ContactPair]) -> list[dict]:
    """Distance and LJ energy for each monitored contact pair."""
    from .pdbio import select_atom

    rows = []
    for pair in contacts:
        a = select_atom(structure, pair.first)
        b = select_atom(structure, pair.second)
        r = float(np.linalg.norm(a.position - b.position))
        rows.append(
            {
                "first": str(pair.first),
                "second": str(pair.second),
                "distance": r,
                "energy": lj_pair_energy(r, pair.params),
                "optimal_distance": pair.params.r_min,
            }
        )
    return rows


def structure_energy_report(
    structure: Structure,
    lj: LJParams | None = None,
    hb: HBParams | None = None,
    contacts: list[ContactPair] | None = None,
    clash_cutoff: float = 2.0,
) -> dict:
    """JSON-ready audit: contact energies, hydrogen bonds, clashes."""
    lj = lj or LJParams()
    hb = hb or DEFAULT_HB_PARAMS
    contact_rows = contact_report(structure, contacts) if contacts else []
    hbonds = detect_hbonds(structure)
    clashes = clash_audit(structure, clash_cutoff)

    def atom_address(atom: Atom) -> str:
        return f"{atom.chain_id}.{atom.res_name}{atom.res_seq}.{atom.name}"

    return {
        "parameters": {
            "epsilon": lj.epsilon,
            "sigma": lj.sigma,
            "hb_c": hb.c,
            "hb_d": hb.d,
            "clash_cutoff": clash_cutoff,
        },
        "contacts": contact_rows,
        "total_contact_energy": float(sum(row["energy"] for row in contact_rows)),
        "hbond_count": len(hbonds),
        "hbonds": [
            {
                "donor": atom_address(b.donor),
                "acceptor": atom_address(b.acceptor),
                "distance": b.distance,
                "energy": hb_pair_energy(b.distance, hb),
            }
            for b in hbonds
        ],
        "clash_count": len(clashes),
        "clashes": [
            {"first": atom_address(a), "second": atom_address(b), "distance": d}
            for a, b, d in clashes
        ],
    }
