"""Ground-state observables: reduced density matrices, correlators,
quantum-number labels, collective-mode operators and their sum rules.

All state vectors are real.  Collective operators along y are handled
through their real companion: A_y = i B with B real antisymmetric, so
B|psi> carries all the information needed for overlaps (|<n|A|0>|^2 =
|<n|B|0>|^2) and for the double-commutator expectation, which reduces to
the same real formula as in the symmetric x/z cases.
"""

from dataclasses import dataclass

import numpy as np

from .lattice import SectorBasis, enumerate_sector, popcount
from .models import (ModelSpec, HamiltonianAction, apply_pair_coupling,
                     coupling_graph, hamiltonian_dense, ResourceLimitError)
from .eigensolver import EigenSolution, dense_spectrum

NORM_TOL = 1e-10

# two-site operators s^a (x) s^a over the pair basis (uu, ud, du, dd)
_OP_XX = 0.25 * np.array([[0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0], [1, 0, 0, 0]], dtype=float)
_OP_YY = 0.25 * np.array([[0, 0, 0, -1], [0, 0, 1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]], dtype=float)
_OP_ZZ = 0.25 * np.diag([1.0, -1.0, -1.0, 1.0])
PAIR_OPS = {"x": _OP_XX, "y": _OP_YY, "z": _OP_ZZ}


def _check_normalized(vec):
    nrm = np.linalg.norm(vec)
    if abs(nrm - 1.0) > NORM_TOL:
        raise ValueError(f"state not normalized: |v| = {nrm!r}")


def two_site_rdm(basis: SectorBasis, vec: np.ndarray, i: int, j: int) -> np.ndarray:
    """Reduced density matrix of sites (i, j) in the (uu, ud, du, dd) order.

    Configurations sharing an environment (all bits except i, j) are
    grouped; the RDM is the Gram matrix of the grouped amplitude table.
    """
    if i == j:
        raise ValueError("need two distinct sites")
    n = basis.n_sites
    if not (0 <= i < n and 0 <= j < n):
        raise ValueError(f"sites ({i}, {j}) outside lattice of {n}")
    _check_normalized(vec)
    mask = (1 << i) | (1 << j)
    env = basis.configs & ~mask
    bit_i = (basis.configs >> i) & 1
    bit_j = (basis.configs >> j) & 1
    local = (1 - bit_i) * 2 + (1 - bit_j)
    _, inv = np.unique(env, return_inverse=True)
    table = np.zeros((inv.max() + 1, 4))
    table[inv, local] = vec
    return table.T @ table


def correlator(basis: SectorBasis, vec: np.ndarray, axis: str, i: int, j: int) -> float:
    """<psi| s_i^axis s_j^axis |psi> via the two-site RDM."""
    rho = two_site_rdm(basis, vec, i, j)
    return float(np.sum(rho * PAIR_OPS[axis]))


def nn_correlators(basis: SectorBasis, vec: np.ndarray, i: int, j: int):
    """(cxx, cyy, czz) of one pair from a single RDM extraction."""
    rho = two_site_rdm(basis, vec, i, j)
    return tuple(float(np.sum(rho * PAIR_OPS[ax])) for ax in "xyz")


def bond_averaged_correlators(model: ModelSpec, basis: SectorBasis, vec: np.ndarray,
                              kind: str = "nn"):
    """Per-axis correlators averaged over all bonds of one kind."""
    graph = coupling_graph(model, basis.lattice)
    bonds = [b for b in graph.bonds if b.kind == kind]
    acc = np.zeros(3)
    for b in bonds:
        acc += nn_correlators(basis, vec, b.i, b.j)
    return acc / len(bonds)


def total_spin(basis: SectorBasis, vec: np.ndarray, quantization_tol: float = 1e-6):
    """(S, <S^2>) with S = None when <S^2> is not quantized.

    S_total^2 = 3N/4 + 2 sum_{i<j} s_i . s_j, evaluated matrix-free.
    """
    _check_normalized(vec)
    n = basis.n_sites
    acc = np.zeros_like(vec)
    for i in range(n):
        for j in range(i + 1, n):
            apply_pair_coupling(basis, i, j, 1.0, 1.0, 1.0, vec, out=acc)
    s_sq = 0.75 * n + 2.0 * float(vec @ acc)
    s = 0.5 * (-1.0 + np.sqrt(max(0.0, 1.0 + 4.0 * s_sq)))
    s_half = round(2.0 * s) / 2.0
    if abs(s_half * (s_half + 1.0) - s_sq) <= quantization_tol:
        return s_half, s_sq
    return None, s_sq


def parity(basis: SectorBasis, vec: np.ndarray, quantization_tol: float = 1e-6):
    """Global spin-flip parity prod_i(2 s_i^z): +1, -1, or None for mixed."""
    if not basis.is_full:
        raise ValueError("parity labels are defined on the full basis only")
    _check_normalized(vec)
    signs = 1.0 - 2.0 * ((basis.n_sites - popcount(basis.configs)) % 2)
    expect = float(np.sum(signs * vec * vec))
    if abs(expect) > 1.0 - quantization_tol:
        return 1 if expect > 0 else -1
    return None


def sz_twice_label(basis: SectorBasis, vec: np.ndarray, quantization_tol: float = 1e-6):
    """2<Sz> as an integer label, or None when the state mixes sectors."""
    if not basis.is_full:
        return basis.sz_twice
    _check_normalized(vec)
    szt = 2.0 * (popcount(basis.configs) - 0.5 * basis.n_sites)
    mean = float(np.sum(szt * vec * vec))
    var = float(np.sum(szt * szt * vec * vec)) - mean * mean
    if var <= quantization_tol:
        return int(round(mean))
    return None


@dataclass(frozen=True)
class StateLabels:
    sz_twice: int | None
    total_spin: float | None
    parity: int | None
    s_squared: float


def label_state(basis: SectorBasis, vec: np.ndarray) -> StateLabels:
    s, s_sq = total_spin(basis, vec)
    par = parity(basis, vec) if basis.is_full else None
    return StateLabels(sz_twice=sz_twice_label(basis, vec), total_spin=s,
                       parity=par, s_squared=s_sq)


def label_solution(basis: SectorBasis, sol: EigenSolution) -> EigenSolution:
    sol.labels = [label_state(basis, sol.vectors[:, c]) for c in range(sol.k)]
    return sol


# ---------------------------------------------------------------------------
# collective operators and sum rules

OPERATOR_TAGS = ("staggered_x", "staggered_y", "staggered_z",
                 "uniform_x", "uniform_y", "uniform_z")


def _parse_tag(tag: str):
    try:
        mode, axis = tag.split("_")
    except ValueError:
        raise ValueError(f"unknown operator tag {tag!r}")
    if mode not in ("staggered", "uniform") or axis not in "xyz":
        raise ValueError(f"unknown operator tag {tag!r}")
    return axis, (np.pi if mode == "staggered" else 0.0)


def collective_apply(basis: SectorBasis, vec: np.ndarray, axis: str,
                     momentum: float) -> np.ndarray:
    """Apply sum_j e^{i j q} s_j^axis (q = 0 or pi) to a state.

    For axis y the returned vector is the real companion B|psi> with
    A_y = i B; overlap magnitudes and norms are unaffected.  x and y
    change total Sz, so they require the full basis.
    """
    if momentum not in (0.0, np.pi):
        raise ValueError("momentum must be 0 or pi")
    phases = np.ones(basis.n_sites) if momentum == 0.0 else \
        np.array([(-1.0) ** j for j in range(basis.n_sites)])
    if axis == "z":
        diag = np.zeros(basis.dimension)
        for j in range(basis.n_sites):
            diag += phases[j] * (basis.site_bits(j) - 0.5)
        return diag * vec
    if not basis.is_full:
        raise ValueError(f"collective s^{axis} leaves the Sz sector; "
                         "lift the state to the full basis first")
    out = np.zeros_like(vec)
    for j in range(basis.n_sites):
        target = basis.configs ^ (1 << j)
        if axis == "x":
            out[target] += (0.5 * phases[j]) * vec
        else:  # y companion: up -> down carries +, down -> up carries -
            sign = 2.0 * basis.site_bits(j) - 1.0
            out[target] += (0.5 * phases[j]) * sign * vec
    return out


@dataclass
class TransitionWeights:
    operator_tag: str
    excitation_energies: np.ndarray  # E_n - E_0, all >= 0 up to roundoff
    weights: np.ndarray              # |<n| A |0>|^2

    @property
    def total_weight(self) -> float:
        return float(np.sum(self.weights))


def transition_weights(basis: SectorBasis, ground: np.ndarray,
                       solution: EigenSolution, operator_tag: str) -> TransitionWeights:
    """Weights |<n|A|0>|^2 against a complete eigenbasis."""
    axis, momentum = _parse_tag(operator_tag)
    if solution.vectors.shape[0] != solution.k:
        raise ValueError("transition weights need the full spectrum of the "
                         "space containing A|0>")
    amped = collective_apply(basis, ground, axis, momentum)
    if solution.vectors.shape[0] != amped.shape[0]:
        raise ValueError("solution basis does not match the operator's space")
    overlaps = solution.vectors.T @ amped
    exc = solution.energies - solution.energies[0]
    return TransitionWeights(operator_tag, exc, overlaps ** 2)


@dataclass
class SumRuleReport:
    operator_tag: str
    lhs: float           # <0|[A,[H,A]]|0> by operator application
    rhs: float           # 2 sum_n (E_n - E_0) |<0|A|n>|^2

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs)


def sum_rule_residual(model: ModelSpec, lattice, operator_tag: str,
                      dense_cap: int = 4096) -> SumRuleReport:
    """Double-commutator identity check for one collective operator.

    The left side never materializes A or [H, A]: with u = B|0> and the
    real companion B it is 2(<u|H|u> - <u|B H|0>), identical in form for
    symmetric (x, z) and antisymmetric (y companion) operators.
    """
    basis = enumerate_sector(lattice, None)
    if basis.dimension > dense_cap:
        raise ResourceLimitError(
            f"sum rule needs the full spectrum; dim {basis.dimension} > cap {dense_cap}")
    axis, momentum = _parse_tag(operator_tag)
    action = HamiltonianAction(model, basis)
    sol = dense_spectrum(hamiltonian_dense(model, basis, cap=dense_cap))
    e0, ground = sol.ground()
    u = collective_apply(basis, ground, axis, momentum)
    lhs = 2.0 * (u @ action(u) - u @ collective_apply(basis, action(ground), axis, momentum))
    tw = transition_weights(basis, ground, sol, operator_tag)
    rhs = 2.0 * float(tw.excitation_energies @ tw.weights)
    return SumRuleReport(operator_tag, float(lhs), rhs)


@dataclass
class RearrangedSumRule:
    """The per-model rearrangement relating bond correlators to the
    ground-state energy plus collective-mode weights.

    xxz:   -sum_a <s^a s^a>            = E0/(JN) + (1/NJ) sum w,  J = 2 + Delta
    ising: <s^x s^x> - <s^y s^y> - <s^z s^z>
                                       = -E0/(JN) - (1/NJ) sum w, J = -lambda
    """
    family: str
    j_value: float
    correlator_side: float
    spectrum_side: float

    @property
    def residual(self) -> float:
        return abs(self.correlator_side - self.spectrum_side)


def rearranged_sum_rule(model: ModelSpec, lattice, dense_cap: int = 4096) -> RearrangedSumRule:
    basis = enumerate_sector(lattice, None)
    if basis.dimension > dense_cap:
        raise ResourceLimitError(
            f"rearranged sum rule needs the full spectrum; dim {basis.dimension}")
    n = lattice.n_sites
    sol = dense_spectrum(hamiltonian_dense(model, basis, cap=dense_cap))
    e0, ground = sol.ground()
    cxx, cyy, czz = bond_averaged_correlators(model, basis, ground, kind="nn")

    if model.family == "xxz":
        j = 2.0 + model.param("delta")
        tags = ("staggered_x", "staggered_y", "staggered_z")
        corr_side = -(cxx + cyy + czz)
        sign = 1.0
    elif model.family == "ising":
        j = -model.param("lam")
        tags = ("uniform_x", "uniform_y", "uniform_z")
        corr_side = cxx - cyy - czz
        sign = -1.0
    else:
        raise ValueError("rearranged sum rule is defined for xxz and ising")
    if j == 0.0:
        raise ValueError("rearranged form is singular at J = 0")

    weight_sum = 0.0
    for tag in tags:
        tw = transition_weights(basis, ground, sol, tag)
        weight_sum += float(tw.excitation_energies @ tw.weights)
    spec_side = sign * (e0 / (j * n) + weight_sum / (n * j))
    return RearrangedSumRule(model.family, j, corr_side, spec_side)


def structure_factor(basis: SectorBasis, vec: np.ndarray, axis: str,
                     momentum: float) -> float:
    """(1/N) |A_q |psi>|^2, a finite-size probe of (quasi) long-range order."""
    _check_normalized(vec)
    amped = collective_apply(basis, vec, axis, momentum)
    return float(amped @ amped) / basis.n_sites
