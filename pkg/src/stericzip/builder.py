"""End-to-end fibril model construction.

Pipeline: mutate the template's two strands to the target Ala/Gly
hexapeptide, generate the opposing sheet by the lattice screw, optimize
the free contact atoms against the fixed anchors (a six-variable
Lennard-Jones problem for the default two contacts), collapse the result
onto a translation-only update of the sheet transform, replicate to the
twelve-chain cell, and audit hydrogen bonds and clashes.

The six-variable optimum is degenerate: each free atom may sit anywhere
on a sphere around its anchor.  Averaging such solutions into one rigid
translation (the reconciliation step) would leave the rebuilt contacts
off their optimal distance by an unpredictable amount, so after
reconciling we descend the translation-only energy from the mean
displacement.  The polish is deterministic, keeps the rotation fixed, and
the reconciliation residual is still reported so the size of the rigid
approximation stays visible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .energy import LJParams, lj_cluster_energy, lj_cluster_gradient, lj_pair_energy, clash_audit, detect_hbonds
from .errors import BuildError, MutationError, StericZipError
from .geometry import (
    RigidTransform,
    SheetLattice,
    cbeta_position,
    reconcile_translation,
    replicate_lattice,
    transform_chain,
)
from .optimize import Objective, OptimizerConfig, OptimizationResult, local_refine, minimize_saec
from .pdbio import AtomSelector, Structure, select_atom
from .template import (
    DEFAULT_ANCHOR_SELECTORS,
    DEFAULT_FREE_SELECTORS,
    TEMPLATE_CONTACT_SIGMA,
    default_lattice,
)

BACKBONE_ATOM_NAMES = ("N", "CA", "C", "O")
SEQUENCE_ALPHABET = {"A": "ALA", "G": "GLY"}
CLASH_CUTOFF = 2.0
CB_BOND_LENGTH = 1.521


def validate_sequence(sequence: str) -> str:
    sequence = sequence.strip().upper()
    if len(sequence) != 6:
        raise StericZipError(f"sequence must have exactly 6 residues, got {len(sequence)}")
    bad = sorted(set(sequence) - set(SEQUENCE_ALPHABET))
    if bad:
        raise StericZipError(f"sequence may only contain A and G, got {bad}")
    return sequence


def mutate_residue(structure: Structure, chain_id: str, res_seq: int, target: str) -> Structure:
    """Mutate one residue to ALA or GLY, preserving the backbone bit for bit.

    ALA keeps (or constructs) CB and drops everything further out; GLY
    drops the whole side chain.  A CB built for a source glycine sits at
    the standard tetrahedral position 1.521 A from CA.
    """
    target = target.strip().upper()
    if target not in ("ALA", "GLY"):
        raise MutationError(f"target residue must be ALA or GLY, got {target!r}")
    out = structure.copy()
    chain = out.chain(chain_id)
    residue = chain.residue(res_seq)
    if residue is None:
        raise MutationError(f"chain {chain_id} has no residue {res_seq}")
    backbone = {}
    for name in BACKBONE_ATOM_NAMES:
        atom = residue.atom(name)
        if atom is None:
            raise MutationError(
                f"residue {chain_id}.{residue.res_name}{res_seq} lacks backbone atom {name}"
            )
        backbone[name] = atom

    kept = [residue.atom(name) for name in BACKBONE_ATOM_NAMES]
    if target == "ALA":
        cb = residue.atom("CB")
        if cb is None:
            position = cbeta_position(
                backbone["N"].position, backbone["CA"].position, backbone["C"].position,
                bond=CB_BOND_LENGTH,
            )
            cb = replace(backbone["CA"], name="CB", element="C", position=position)
        kept.append(cb)

    residue.res_name = target
    residue.atoms = kept
    for atom in residue.atoms:
        atom.res_name = target
    out.validate()
    out.renumber_serials()
    return out


def apply_sequence(structure: Structure, chain_id: str, sequence: str) -> Structure:
    """Mutate a six-residue chain positionally and renumber it 1-6."""
    sequence = validate_sequence(sequence)
    chain = structure.chain(chain_id)
    if len(chain.residues) != 6:
        raise MutationError(
            f"chain {chain_id} has {len(chain.residues)} residues; apply_sequence needs 6"
        )
    out = structure.copy()
    # Renumber first so selectors like A.ALA3.CB address the result.
    for index, residue in enumerate(out.chain(chain_id).residues, start=1):
        residue.res_seq = index
        for atom in residue.atoms:
            atom.res_seq = index
    for index, letter in enumerate(sequence, start=1):
        out = mutate_residue(out, chain_id, index, SEQUENCE_ALPHABET[letter])
    return out


@dataclass
class FibrilSpec:
    """Everything a build needs besides the template structure."""

    sequence: str
    model_name: str = "model"
    anchors: tuple[str, ...] = DEFAULT_ANCHOR_SELECTORS
    free_atoms: tuple[str, ...] = DEFAULT_FREE_SELECTORS
    lj: LJParams = field(default_factory=lambda: LJParams(1.0, TEMPLATE_CONTACT_SIGMA))
    lattice: SheetLattice = field(default_factory=default_lattice)
    optimizer: OptimizerConfig = field(default_factory=lambda: OptimizerConfig(max_evaluations=40_000))
    full_sum: bool = False
    placement_margin: float = 12.0
    placement_bounds: np.ndarray | None = None
    residual_warning_threshold: float = 0.5

    def __post_init__(self):
        self.sequence = validate_sequence(self.sequence)
        if len(self.anchors) != len(self.free_atoms) or not self.anchors:
            raise StericZipError("anchors and free_atoms must have the same nonzero length")
        for text in (*self.anchors, *self.free_atoms):
            sel = AtomSelector.parse(text)
            if sel.res_name != "ALA" or sel.atom_name != "CB":
                raise StericZipError(f"contact selector {sel} must address an ALA CB atom")

    def anchor_selectors(self) -> list[AtomSelector]:
        return [AtomSelector.parse(t) for t in self.anchors]

    def free_selectors(self) -> list[AtomSelector]:
        return [AtomSelector.parse(t) for t in self.free_atoms]

    @classmethod
    def from_json(cls, text: str, **overrides) -> "FibrilSpec":
        data = json.loads(text)
        data.update(overrides)
        if "lj" in data and isinstance(data["lj"], dict):
            data["lj"] = LJParams(**data["lj"])
        if "optimizer" in data and isinstance(data["optimizer"], dict):
            data["optimizer"] = OptimizerConfig(**data["optimizer"])
        if "lattice" in data and isinstance(data["lattice"], dict):
            lat = data["lattice"]
            data["lattice"] = SheetLattice(
                np.asarray(lat["intra_sheet_step"], dtype=float),
                RigidTransform.from_values(lat["sheet2_transform"]),
            )
        if "anchors" in data:
            data["anchors"] = tuple(data["anchors"])
        if "free_atoms" in data:
            data["free_atoms"] = tuple(data["free_atoms"])
        return cls(**data)


@dataclass
class PlacementOutcome:
    transform: RigidTransform
    optimizer_result: OptimizationResult
    refined_energy: float
    residual: float
    mean_displacement: np.ndarray
    free_initial: np.ndarray
    free_refined: np.ndarray
    free_final: np.ndarray
    contact_distances: np.ndarray
    contact_energies: np.ndarray


def _contact_objective(
    anchors: np.ndarray, params: LJParams, bounds: np.ndarray, full_sum: bool
) -> Objective:
    k = anchors.shape[0]
    n = 3 * k

    if full_sum:
        def evaluate(x: np.ndarray) -> float:
            combined = np.vstack([anchors, x.reshape(k, 3)])
            return lj_cluster_energy(combined, params)

        def gradient(x: np.ndarray) -> np.ndarray:
            combined = np.vstack([anchors, x.reshape(k, 3)])
            return lj_cluster_gradient(combined, params)[3 * k:]

        evaluate_batch = None
    else:
        def evaluate(x: np.ndarray) -> float:
            free = x.reshape(k, 3)
            r = np.linalg.norm(free - anchors, axis=1)
            return float(np.sum(lj_pair_energy(r, params)))

        pairs = [(i, k + i) for i in range(k)]

        def gradient(x: np.ndarray) -> np.ndarray:
            combined = np.vstack([anchors, x.reshape(k, 3)])
            return lj_cluster_gradient(combined, params, pairs=pairs)[3 * k:]

        def evaluate_batch(points: np.ndarray) -> np.ndarray:
            free = points.reshape(points.shape[0], k, 3)
            diff = free - anchors[None, :, :]
            r = np.linalg.norm(diff, axis=2)
            with np.errstate(divide="ignore", over="ignore"):
                s6 = (params.sigma / np.maximum(r, 1e-12)) ** 6
                energies = 4.0 * params.epsilon * s6 * (s6 - 1.0)
            return np.sum(energies, axis=1)

    return Objective(
        dimension=n,
        evaluate=evaluate,
        gradient=gradient,
        evaluate_batch=evaluate_batch,
        bounds=bounds,
    )


def _translation_objective(
    anchors: np.ndarray, free0: np.ndarray, params: LJParams, bounds: np.ndarray, full_sum: bool
) -> Objective:
    k = anchors.shape[0]

    def evaluate(u: np.ndarray) -> float:
        free = free0 + u
        if full_sum:
            return lj_cluster_energy(np.vstack([anchors, free]), params)
        r = np.linalg.norm(free - anchors, axis=1)
        return float(np.sum(lj_pair_energy(r, params)))

    def gradient(u: np.ndarray) -> np.ndarray:
        combined = np.vstack([anchors, free0 + u])
        pairs = None if full_sum else [(i, k + i) for i in range(k)]
        g = lj_cluster_gradient(combined, params, pairs=pairs)[3 * k:]
        return g.reshape(k, 3).sum(axis=0)

    return Objective(dimension=3, evaluate=evaluate, gradient=gradient, bounds=bounds)


def default_placement_bounds(free_initial: np.ndarray, margin: float = 8.0) -> np.ndarray:
    """Symmetric box of half-width ``margin`` around each free coordinate."""
    flat = np.asarray(free_initial, dtype=np.float64).reshape(-1)
    return np.column_stack([flat - margin, flat + margin])


def solve_contact_placement(
    anchor_points,
    free_points,
    params: LJParams,
    base_transform: RigidTransform,
    config: OptimizerConfig,
    bounds: np.ndarray | None = None,
    full_sum: bool = False,
) -> PlacementOutcome:
    """Optimize free contact atoms, then collapse to a sheet translation.

    Runs the annealed search seeded at the initial free positions, refines
    with gradient descent, reconciles the per-atom displacements to the
    base transform (reporting the residual), and finally descends the
    translation-only energy from the mean displacement so the returned
    transform realizes optimal contacts whenever a single translation can.
    """
    anchors = np.asarray(anchor_points, dtype=np.float64).reshape(-1, 3)
    free0 = np.asarray(free_points, dtype=np.float64).reshape(-1, 3)
    if anchors.shape != free0.shape:
        raise StericZipError("anchor and free point lists must have matching shapes")
    k = anchors.shape[0]
    if bounds is None:
        bounds = default_placement_bounds(free0)
    bounds = np.asarray(bounds, dtype=np.float64)

    objective = _contact_objective(anchors, params, bounds, full_sum)
    cfg = config
    if not full_sum and cfg.target_value is None:
        # Contact-restricted global minimum is exactly -k epsilon.
        cfg = replace(cfg, target_value=-k * params.epsilon, target_tolerance=1e-3)
    saec = minimize_saec(objective, cfg, x0=free0.reshape(-1))
    refined = local_refine(objective, saec.best_point, tol=1e-9, max_iters=500)
    free_refined = refined.best_point.reshape(k, 3)

    transform_mean, residual = reconcile_translation(free0, free_refined, base_transform)
    mean_displacement = transform_mean.translation - base_transform.translation

    # Translation-only polish from the mean displacement.
    lo = np.max(bounds[:, 0].reshape(k, 3) - free0, axis=0)
    hi = np.min(bounds[:, 1].reshape(k, 3) - free0, axis=0)
    if np.all(lo < hi):
        u_bounds = np.column_stack([lo, hi])
        u_objective = _translation_objective(anchors, free0, params, u_bounds, full_sum)
        u0 = np.clip(mean_displacement, lo, hi)
        polished = local_refine(u_objective, u0, tol=1e-10, max_iters=500)
        u_final = polished.best_point
    else:
        u_final = mean_displacement

    transform = base_transform.with_translation(base_transform.translation + u_final)
    free_final = free0 + u_final
    distances = np.linalg.norm(free_final - anchors, axis=1)
    energies = np.array([lj_pair_energy(float(r), params) for r in distances])

    result = replace(
        saec,
        best_point=refined.best_point,
        best_value=refined.best_value,
        evaluations_used=saec.evaluations_used + refined.evaluations_used,
        trace=saec.trace + [(saec.evaluations_used + e, v) for e, v in refined.trace if v <= saec.best_value],
    )
    return PlacementOutcome(
        transform=transform,
        optimizer_result=result,
        refined_energy=refined.best_value,
        residual=residual,
        mean_displacement=mean_displacement,
        free_initial=free0,
        free_refined=free_refined,
        free_final=free_final,
        contact_distances=distances,
        contact_energies=energies,
    )


def _interface_slab_bounds(
    sheet1_positions: np.ndarray,
    sheet2_positions: np.ndarray,
    free_initial: np.ndarray,
    margin: float,
) -> np.ndarray | None:
    """Bounds confining free atoms to the gap between the sheets.

    The sheets of this lattice separate along z (the screw axis is x), so
    the mobile contact atoms are boxed with +/- margin in x and y and kept
    on their own side of the interface midplane in z.  Returns None when
    the sheets overlap in z and no gap exists.
    """
    s1_min, s1_max = sheet1_positions[:, 2].min(), sheet1_positions[:, 2].max()
    s2_min, s2_max = sheet2_positions[:, 2].min(), sheet2_positions[:, 2].max()
    z0 = free_initial[:, 2]
    if s2_max < s1_min:  # sheet 2 below sheet 1
        mid = 0.5 * (s1_min + s2_max)
        z_lo, z_hi = z0.min() - 1.0, mid - 0.1
    elif s2_min > s1_max:  # sheet 2 above sheet 1
        mid = 0.5 * (s1_max + s2_min)
        z_lo, z_hi = mid + 0.1, z0.max() + 1.0
    else:
        return None
    if z_lo >= z_hi:
        return None
    bounds = []
    for point in free_initial:
        bounds.append([point[0] - margin, point[0] + margin])
        bounds.append([point[1] - margin, point[1] + margin])
        bounds.append([z_lo, z_hi])
    return np.asarray(bounds, dtype=np.float64)


def place_opposing_sheet(structure: Structure, spec: FibrilSpec) -> PlacementOutcome:
    """Solve the free-atom placement problem for a mutated four-chain structure.

    ``structure`` must already contain the mutated sheet-1 chains and the
    template-derived sheet-2 chains that the free selectors address.
    """
    anchors = np.array([select_atom(structure, s).position for s in spec.anchor_selectors()])
    free0 = np.array([select_atom(structure, s).position for s in spec.free_selectors()])
    if spec.placement_bounds is not None:
        bounds = np.asarray(spec.placement_bounds, dtype=np.float64)
    else:
        sheet1_ids = sorted({s.chain_id for s in spec.anchor_selectors()})
        sheet2_ids = sorted({s.chain_id for s in spec.free_selectors()})
        s1 = np.vstack([structure.chain(c).positions() for c in sheet1_ids])
        s2 = np.vstack([structure.chain(c).positions() for c in sheet2_ids])
        bounds = _interface_slab_bounds(s1, s2, free0, spec.placement_margin)
        if bounds is None:
            bounds = default_placement_bounds(free0, spec.placement_margin)
    return solve_contact_placement(
        anchors,
        free0,
        spec.lj,
        spec.lattice.sheet2_transform,
        spec.optimizer,
        bounds=bounds,
        full_sum=spec.full_sum,
    )


@dataclass
class BuildReport:
    model_name: str
    sequence: str
    success: bool
    warnings: list[str]
    chain_ids: list[str]
    hbond_count_before: int
    hbond_count_after: int
    model_hbond_count: int
    contacts: list[dict]
    reconciliation_residual: float
    sheet_transform: list[float]
    lattice_step: list[float]
    optimizer: dict
    clashes: list[dict]
    parameters: dict

    def to_dict(self) -> dict:
        return {
            "model_name": self.model_name,
            "sequence": self.sequence,
            "success": self.success,
            "warnings": self.warnings,
            "chain_ids": self.chain_ids,
            "hbond_count_before": self.hbond_count_before,
            "hbond_count_after": self.hbond_count_after,
            "model_hbond_count": self.model_hbond_count,
            "contacts": self.contacts,
            "reconciliation_residual": self.reconciliation_residual,
            "sheet_transform": self.sheet_transform,
            "lattice_step": self.lattice_step,
            "optimizer": self.optimizer,
            "clashes": self.clashes,
            "parameters": self.parameters,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _stage(name: str):
    class _StageContext:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and not isinstance(exc, BuildError):
                raise BuildError(name, str(exc)) from exc
            return False

    return _StageContext()


def build_fibril_model(template: Structure, spec: FibrilSpec) -> tuple[Structure, BuildReport]:
    """Run the whole pipeline and return the twelve-chain model plus report."""
    warnings: list[str] = []

    with _stage("template"):
        for cid in ("A", "B"):
            if not template.has_chain(cid):
                raise StericZipError(f"template must supply chain {cid}")

    with _stage("hbond-before"):
        hb_before = len(detect_hbonds(template.subset(("A", "B"))))

    with _stage("mutate"):
        work = apply_sequence(template, "A", spec.sequence)
        work = apply_sequence(work, "B", spec.sequence)

    with _stage("hbond-after"):
        hb_after = len(detect_hbonds(work.subset(("A", "B"))))

    with _stage("sheet2"):
        base = spec.lattice.sheet2_transform
        if work.has_chain("G") or work.has_chain("H"):
            work = apply_sequence(work, "G", spec.sequence)
            work = apply_sequence(work, "H", spec.sequence)
        else:
            work = transform_chain(work, "A", base, "G")
            work = transform_chain(work, "B", base, "H")

    with _stage("placement"):
        placement = place_opposing_sheet(work, spec)
        if placement.residual > spec.residual_warning_threshold:
            warnings.append(
                "reconciliation residual "
                f"{placement.residual:.3f} A exceeds {spec.residual_warning_threshold} A; "
                "the independently optimized contact atoms disagree on a rigid motion "
                "and the translation was refined to the nearest joint optimum"
            )

    with _stage("regenerate"):
        final = work.subset(("A", "B"))
        final.headers = list(template.headers)
        final = transform_chain(final, "A", placement.transform, "G")
        final = transform_chain(final, "B", placement.transform, "H")

    with _stage("replicate"):
        final = replicate_lattice(final, spec.lattice)

    with _stage("audit"):
        model_hbonds = detect_hbonds(final)
        clashes = clash_audit(final, CLASH_CUTOFF)
        success = not clashes
        if clashes:
            warnings.append(f"{len(clashes)} steric clash(es) below {CLASH_CUTOFF} A; build marked failed")

    anchor_sel = spec.anchor_selectors()
    free_sel = spec.free_selectors()
    contacts = []
    for sel_a, sel_f, r, e in zip(
        anchor_sel, free_sel, placement.contact_distances, placement.contact_energies
    ):
        contacts.append(
            {
                "anchor": str(sel_a),
                "free": str(sel_f),
                "distance": float(r),
                "energy": float(e),
                "optimal_distance": spec.lj.r_min,
            }
        )

    def atom_address(atom) -> str:
        return f"{atom.chain_id}.{atom.res_name}{atom.res_seq}.{atom.name}"

    report = BuildReport(
        model_name=spec.model_name,
        sequence=spec.sequence,
        success=success,
        warnings=warnings,
        chain_ids=final.chain_ids(),
        hbond_count_before=hb_before,
        hbond_count_after=hb_after,
        model_hbond_count=len(model_hbonds),
        contacts=contacts,
        reconciliation_residual=float(placement.residual),
        sheet_transform=placement.transform.to_values(),
        lattice_step=spec.lattice.intra_sheet_step.tolist(),
        optimizer={
            "evaluations": placement.optimizer_result.evaluations_used,
            "best_value": placement.optimizer_result.best_value,
            "terminated_by": placement.optimizer_result.terminated_by,
            "seed": spec.optimizer.seed,
        },
        clashes=[
            {"first": atom_address(a), "second": atom_address(b), "distance": d}
            for a, b, d in clashes
        ],
        parameters={
            "epsilon": spec.lj.epsilon,
            "sigma": spec.lj.sigma,
            "full_sum": spec.full_sum,
            "clash_cutoff": CLASH_CUTOFF,
        },
    )
    return final, report
