"""Shared oracles, generators, and fixture builders for the test suite.

Everything in here is deliberately *independent* of the closed-form paths
inside :mod:`gkslgraph`: the reference superoperator is assembled from
elementary dissipator calls one coefficient at a time, arborescence weights
are enumerated by brute force, and subspace comparisons go through SciPy's
principal-angle routine.  Tests that pit the library against these oracles
are therefore genuine cross-checks, not tautologies.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
import scipy.linalg

from gkslgraph import (
    GellMannSpec,
    GeneratorSpec,
    InducedDigraph,
    gellmann,
    lindblad_dissipator,
    matrix_unit,
    standard_labels,
    standard_position,
    to_standard_coordinates,
)

# ---------------------------------------------------------------------------
# reference superoperator (third, slowest route)
# ---------------------------------------------------------------------------


def reference_superoperator(spec: GeneratorSpec) -> np.ndarray:
    """Column-by-column superoperator built from elementary dissipators.

    Applies the generator to every matrix unit using nothing but
    ``lindblad_dissipator`` and the commutator, summing the coefficient
    matrix entry by entry.  O(N^6) per column -- fine for the small N used
    in tests, and entirely independent of the vectorized production path.
    """
    N = spec.N
    labels = standard_labels(N)
    S = np.zeros((N * N, N * N), dtype=complex)
    for col, (a, b) in enumerate(labels):
        E = matrix_unit(a, b, N)
        out = -1j * (spec.H @ E - E @ spec.H)
        for p1, (i, j) in enumerate(labels):
            for p2, (k, ell) in enumerate(labels):
                coeff = spec.gamma[p1, p2]
                if coeff != 0:
                    out = out + 0.5 * coeff * lindblad_dissipator(i, j, k, ell, E)
        S[:, col] = to_standard_coordinates(out)
    return S


# ---------------------------------------------------------------------------
# arborescence enumeration (matrix-tree oracle)
# ---------------------------------------------------------------------------


def enumerate_in_tree_weight(
    weights: dict[tuple[int, int], float],
    vertices: tuple[int, ...] | list[int],
    root: int,
) -> float:
    """Total weight of spanning in-trees of ``vertices`` rooted at ``root``.

    Brute force: every non-root vertex picks one of its out-edges (restricted
    to ``vertices``); a choice is kept iff following successors from every
    vertex reaches the root without revisiting anything.  Exponential, so
    only usable for tiny vertex sets -- which is the point of an oracle.
    """
    vset = set(vertices)
    others = sorted(vset - {root})
    per_vertex: list[list[tuple[int, float]]] = []
    for v in others:
        outs = [
            (dst, w)
            for (src, dst), w in weights.items()
            if src == v and dst in vset and dst != v
        ]
        if not outs:
            return 0.0
        per_vertex.append(outs)
    total = 0.0
    for combo in itertools.product(*per_vertex):
        succ = {v: dst for v, (dst, _) in zip(others, combo)}
        good = True
        for v in others:
            seen = set()
            cur = v
            while cur != root:
                if cur in seen:
                    good = False
                    break
                seen.add(cur)
                cur = succ[cur]
            if not good:
                break
        if good:
            w = 1.0
            for _, edge_w in combo:
                w *= edge_w
            total += w
    return total


def random_digraph(rng: np.random.Generator, n: int, p: float = 0.5) -> InducedDigraph:
    """Random weighted digraph on ``n`` vertices, edge probability ``p``."""
    weights = {}
    for src in range(1, n + 1):
        for dst in range(1, n + 1):
            if src != dst and rng.random() < p:
                weights[(src, dst)] = float(rng.uniform(0.1, 3.0))
    return InducedDigraph(n=n, weights=weights)


# ---------------------------------------------------------------------------
# subspace comparison
# ---------------------------------------------------------------------------


def coordinate_stack(matrices) -> np.ndarray:
    """Column-stack the standard coordinates of a list of matrices."""
    cols = [to_standard_coordinates(np.asarray(m)) for m in matrices]
    return np.column_stack(cols)


def max_principal_angle(mats_a, mats_b) -> float:
    """Largest principal angle (radians) between two matrix spans."""
    A = coordinate_stack(mats_a)
    B = coordinate_stack(mats_b)
    return float(np.max(scipy.linalg.subspace_angles(A, B)))


# ---------------------------------------------------------------------------
# spec builders
# ---------------------------------------------------------------------------


def pair_block_spec(N, H, blocks, diag=None) -> GeneratorSpec:
    """Assemble a GeneratorSpec from 2x2 pair blocks and an optional
    population-sector block.

    ``blocks`` maps ``(i, j)`` with ``i < j`` to the 2x2 coefficient block
    over the labels ``(i, j), (j, i)``; ``diag`` is the N x N block over the
    diagonal labels ``(1,1)..(N,N)`` (entries gamma_{iijj}).
    """
    g = np.zeros((N * N, N * N), dtype=complex)
    for (i, j), blk in blocks.items():
        p1 = standard_position(i, j, N)
        p2 = standard_position(j, i, N)
        g[np.ix_([p1, p2], [p1, p2])] = np.asarray(blk, dtype=complex)
    if diag is not None:
        dpos = [standard_position(n, n, N) for n in range(1, N + 1)]
        g[np.ix_(dpos, dpos)] = np.asarray(diag, dtype=complex)
    return GeneratorSpec(H=np.asarray(H, dtype=complex), gamma=g)


def superposition_decay_spec(a: float = 1.0, b: float = 0.75, c: float = 0.5) -> GeneratorSpec:
    """Three-level generator whose kernel contains a coherent superposition.

    Levels 1 and 2 feed each other through a rank-one pair block of rate
    ``a`` while both decay-coupling blocks toward level 3 are cut off at
    rates ``b`` and ``c``.  The stationary set is two-dimensional and
    includes the equal-weight superposition of levels 1 and 2.
    """
    H = np.zeros((3, 3), dtype=complex)
    blocks = {
        (1, 2): a * np.array([[1.0, 1.0], [1.0, 1.0]]),
        (1, 3): np.array([[b, 0.0], [0.0, 0.0]]),
        (2, 3): np.array([[c, 0.0], [0.0, 0.0]]),
    }
    return pair_block_spec(3, H, blocks)


def dephasing_ladder_spec() -> GeneratorSpec:
    """Three-level purely-dephasing generator (population-sector rates only)."""
    H = np.zeros((3, 3), dtype=complex)
    diag = np.diag([1.0, 0.0, 2.0]).astype(complex)
    return pair_block_spec(3, H, {}, diag=diag)


def sink_menagerie_spec(equal_h: bool = False) -> GeneratorSpec:
    """Eight-level generator exercising every terminal-structure case at once.

    Vertices 1..3 are isolated sinks, (4,5) carries a singular symmetric
    block (a two-sink whose kernel contribution is a single coherence), and
    {6,7,8} is a genuinely three-cyclic terminal class.  With ``equal_h``
    the Hamiltonian gap between levels 1 and 2 is closed, promoting the
    sink pair (1,2) as well.
    """
    h = [1.0, 2.0, 2.0, 5.0, 5.0, 0.3, 0.7, 1.1]
    if equal_h:
        h[0] = 2.0
    H = np.diag(h).astype(complex)
    blocks = {
        (4, 5): np.array([[1.0, 1.0j], [-1.0j, 1.0]]),
        (6, 7): np.array([[1.0, 0.0], [0.0, 2.0]]),
        (6, 8): np.array([[3.0, 0.0], [0.0, 3.0]]),
        (7, 8): np.array([[4.0, 0.0], [0.0, 1.0]]),
    }
    return pair_block_spec(8, H, blocks)


# ---------------------------------------------------------------------------
# random spec generators
# ---------------------------------------------------------------------------


def random_hermitian(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    A = rng.normal(size=(n, n), scale=scale) + 1j * rng.normal(size=(n, n), scale=scale)
    return (A + A.conj().T) / 2.0


def random_psd(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    A = rng.normal(size=(n, n), scale=scale) + 1j * rng.normal(size=(n, n), scale=scale)
    return A @ A.conj().T / n


def random_density_matrix(rng: np.random.Generator, n: int) -> np.ndarray:
    rho = random_psd(rng, n)
    return rho / np.trace(rho).real


def random_valid_spec(rng: np.random.Generator, N: int) -> GeneratorSpec:
    """Random generator with a full PSD coefficient matrix (hence valid)."""
    return GeneratorSpec(H=random_hermitian(rng, N), gamma=random_psd(rng, N * N))


def random_pbd_spec(rng: np.random.Generator, N: int) -> GeneratorSpec:
    """Random pair-block-diagonal spec with a diagonal Hamiltonian.

    Mixes the structural cases the closed-form kernel has to handle: empty
    blocks, generic PSD blocks, singular symmetric blocks (candidate
    coherence-carrying two-sinks), designated sink vertices with all
    out-rates removed, population-sector couplings that are zero / generic
    PSD / uniform, and Hamiltonians with and without degeneracies.
    """
    # Hamiltonian: draw from a small pool half the time so degeneracies occur.
    if rng.random() < 0.5:
        h = rng.choice([0.0, 0.5, 1.0], size=N)
    else:
        h = rng.uniform(-2.0, 2.0, size=N)
    H = np.diag(h).astype(complex)

    sinks = {int(v) for v in rng.choice(np.arange(1, N + 1), size=rng.integers(0, 3), replace=False)}

    blocks: dict[tuple[int, int], np.ndarray] = {}
    for i in range(1, N + 1):
        for j in range(i + 1, N + 1):
            u = rng.random()
            if u < 0.3:
                continue  # empty block
            if u < 0.7:
                blk = random_psd(rng, 2)
            else:
                # singular symmetric block: det 0, equal real off-diagonals.
                g = float(rng.uniform(0.2, 2.0))
                sign = 1.0 if rng.random() < 0.5 else -1.0
                blk = np.array([[g, sign * g], [sign * g, g]], dtype=complex)
            # A sink vertex has no out-edges: zeroing a diagonal entry of a
            # PSD block forces its off-diagonals to zero as well.
            if j in sinks:
                blk = np.diag([0.0, blk[1, 1].real]).astype(complex)
            if i in sinks:
                blk = np.diag([blk[0, 0].real, 0.0]).astype(complex)
            if np.any(blk != 0):
                blocks[(i, j)] = blk

    u = rng.random()
    if u < 0.4:
        diag = None
    elif u < 0.7:
        diag = random_psd(rng, N)
    else:
        diag = float(rng.uniform(0.1, 1.5)) * np.ones((N, N), dtype=complex)

    return pair_block_spec(N, H, blocks, diag=diag)


def random_identity_preserving_spec(rng: np.random.Generator, N: int) -> GeneratorSpec:
    """Random identity-preserving spec, built in the orthonormal basis.

    A coefficient matrix that is diagonal on the off-diagonal (Hermitian)
    basis elements and supported arbitrarily (but PSD) on the commuting
    traceless-diagonal family annihilates the identity from both sides.
    """
    R = N * N - N
    C = np.zeros((N * N - 1, N * N - 1), dtype=complex)
    C[:R, :R] = np.diag(rng.uniform(0.0, 2.0, size=R))
    C[R:, R:] = random_psd(rng, N - 1)
    gm = GellMannSpec(H=random_hermitian(rng, N), C=C)
    from gkslgraph import gellmann_to_standard

    return gellmann_to_standard(gm)


def random_consistent_spec(
    rng: np.random.Generator, N: int, n_parts: int | None = None
) -> tuple[GeneratorSpec, list[set[int]]]:
    """Random valid spec whose digraph splits into a known partition.

    Rates are supported on within-part pairs only (with a diagonal boost so
    every within-part pair really is connected), population-sector couplings
    may cross parts, and the Hamiltonian is block-diagonal over the parts.
    Returns the spec together with the partition.
    """
    if n_parts is None:
        n_parts = int(rng.integers(2, min(4, N) + 1))
    assignment = rng.integers(0, n_parts, size=N)
    # make sure every part is non-empty
    for k in range(n_parts):
        if not np.any(assignment == k):
            assignment[rng.integers(0, N)] = k
    parts = [set(np.flatnonzero(assignment == k) + 1) for k in range(n_parts)]
    parts = [p for p in parts if p]

    labels = standard_labels(N)
    support = []
    for pos, (i, j) in enumerate(labels):
        if i == j:
            support.append(pos)
        elif any(i in p and j in p for p in parts):
            support.append(pos)
    sub = random_psd(rng, len(support)) + 0.1 * np.eye(len(support))
    gamma = np.zeros((N * N, N * N), dtype=complex)
    gamma[np.ix_(support, support)] = sub

    H = np.zeros((N, N), dtype=complex)
    for p in parts:
        idx = np.array(sorted(v - 1 for v in p))
        H[np.ix_(idx, idx)] = random_hermitian(rng, len(idx))

    return GeneratorSpec(H=H, gamma=gamma), parts


def haar_state_vector(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def direct_diag_dissipator_matrix(n: int, k: int, ell: int, N: int) -> np.ndarray:
    """Direct evaluation of the traceless-diagonal dissipator on a basis
    element: D(X) = 2 A X A - X A^2 - A^2 X with A the n-th diagonal
    orthonormal basis matrix and X the (k, ell) one."""
    A = gellmann(n, n, N)
    X = gellmann(k, ell, N)
    return 2.0 * A @ X @ A - X @ A @ A - A @ A @ X
