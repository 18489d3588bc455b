"""Exact entropy calculators over explicit finite distributions.

All quantities are computed by direct enumeration, never estimated from
samples, so they can serve as oracles for the statistical layers above.
Logs are base 2 throughout; entropies are in bits.

The central quantity is the average (conditional) min-entropy

    Havg(X | Y) = -log2( E_{y <- Y} [ max_x Pr[X = x | Y = y] ] )
                = -log2( sum_y max_x Pr[X = x, Y = y] ),

the standard measure of how well X can be guessed after seeing Y.  The
suite at the bottom stress-tests the inequalities this package leans on
(monotonicity under functions, independence, the weak chain rule, the
equality and neighborhood bounds) on random small-support distributions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bits import neighborhood_size
from .report import ExperimentReport

__all__ = [
    "JointDistribution",
    "min_entropy",
    "max_entropy",
    "avg_min_entropy",
    "avg_min_entropy_matrix",
    "statistical_distance",
    "histogram_distance",
    "check_entropy_lemmas",
    "LEMMA_NAMES",
]

_PROB_TOL = 1e-12


@dataclass(frozen=True)
class JointDistribution:
    """Joint distribution of (X, Y) over explicit finite supports.

    probs[i, j] = Pr[X = support_x[i], Y = support_y[j]].
    """

    support_x: tuple
    support_y: tuple
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        object.__setattr__(self, "probs", p)
        if p.shape != (len(self.support_x), len(self.support_y)):
            raise ValueError(
                f"probs shape {p.shape} does not match supports "
                f"({len(self.support_x)}, {len(self.support_y)})"
            )
        if (p < 0).any():
            raise ValueError("negative probability entry")
        if abs(float(p.sum()) - 1.0) > _PROB_TOL:
            raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")

    @classmethod
    def random(cls, rng: np.random.Generator, nx: int, ny: int,
               support_x=None, support_y=None) -> "JointDistribution":
        """Dirichlet(1) joint: normalized exponentials, dense support."""
        raw = rng.exponential(size=(nx, ny))
        raw /= raw.sum()
        sx = tuple(support_x) if support_x is not None else tuple(range(nx))
        sy = tuple(support_y) if support_y is not None else tuple(range(ny))
        return cls(sx, sy, raw)

    @classmethod
    def independent(cls, px, py, support_x=None, support_y=None) -> "JointDistribution":
        px = np.asarray(px, dtype=float)
        py = np.asarray(py, dtype=float)
        sx = tuple(support_x) if support_x is not None else tuple(range(len(px)))
        sy = tuple(support_y) if support_y is not None else tuple(range(len(py)))
        return cls(sx, sy, np.outer(px, py))

    def marginal_x(self) -> np.ndarray:
        return self.probs.sum(axis=1)

    def marginal_y(self) -> np.ndarray:
        return self.probs.sum(axis=0)


def min_entropy(p) -> float:
    """H_inf(X) = -log2 max_x Pr[X = x]."""
    p = np.asarray(p, dtype=float)
    return -math.log2(float(p.max()))


def max_entropy(support_size: int) -> float:
    """H_0(X) = log2 |supp(X)|."""
    if support_size < 1:
        raise ValueError("empty support")
    return math.log2(support_size)


def avg_min_entropy_matrix(probs: np.ndarray) -> float:
    """Average min-entropy of X given Y from the joint matrix probs[x, y].

    Zero-probability columns contribute nothing to the expectation and
    are skipped implicitly (their column max is 0).
    """
    guess = float(np.asarray(probs, dtype=float).max(axis=0).sum())
    return -math.log2(guess)


def avg_min_entropy(joint: JointDistribution) -> float:
    return avg_min_entropy_matrix(joint.probs)


def statistical_distance(p: dict, q: dict) -> float:
    """Total variation distance (1/2) sum |p(x) - q(x)| over a shared support."""
    if set(p) != set(q):
        raise ValueError("SUPPORT_MISMATCH: distributions on different supports")
    return 0.5 * sum(abs(p[x] - q[x]) for x in p)


def histogram_distance(counts_a: dict, counts_b: dict) -> float:
    """Empirical statistical distance of two count histograms.

    Supports are unioned (a missing bin counts as zero), which is the
    right behavior for sampled data where a rare bin may appear on only
    one side.
    """
    total_a = sum(counts_a.values())
    total_b = sum(counts_b.values())
    if total_a == 0 or total_b == 0:
        raise ValueError("empty histogram")
    keys = set(counts_a) | set(counts_b)
    return 0.5 * sum(
        abs(counts_a.get(k, 0) / total_a - counts_b.get(k, 0) / total_b) for k in keys
    )


# ---------------------------------------------------------------------------
# Inequality suite
# ---------------------------------------------------------------------------

LEMMA_NAMES = (
    "function",
    "independent",
    "minentropy",
    "chain_rule",
    "equality",
    "neighborhood",
)

_TOL = 1e-9


def _check_function(g: np.random.Generator, max_support: int) -> bool:
    # Havg(X|Y) <= Havg(X|f(Y)) for any post-processing f of the condition.
    nx = int(g.integers(2, max_support + 1))
    ny = int(g.integers(2, max_support + 1))
    nz = int(g.integers(1, ny + 1))
    probs = JointDistribution.random(g, nx, ny).probs
    f = g.integers(0, nz, size=ny)
    pf = np.zeros((nx, nz))
    for y in range(ny):
        pf[:, f[y]] += probs[:, y]
    return avg_min_entropy_matrix(probs) <= avg_min_entropy_matrix(pf) + _TOL


def _check_independent(g: np.random.Generator, max_support: int) -> bool:
    # (X,Y) independent of Z: conditioning on Z changes nothing.
    nx = int(g.integers(2, max_support + 1))
    ny = int(g.integers(2, max_support + 1))
    nz = int(g.integers(2, max_support + 1))
    pxy = JointDistribution.random(g, nx, ny).probs
    pz = g.exponential(size=nz)
    pz /= pz.sum()
    # flatten (Y, Z) as the condition
    pxyz = pxy[:, :, None] * pz[None, None, :]
    lhs = avg_min_entropy_matrix(pxyz.reshape(nx, ny * nz))
    rhs = avg_min_entropy_matrix(pxy)
    ok1 = abs(lhs - rhs) <= _TOL
    # X independent of Z: conditional equals plain min-entropy
    px = pxy.sum(axis=1)
    pxz = np.outer(px, pz)
    ok2 = abs(avg_min_entropy_matrix(pxz) - min_entropy(px)) <= _TOL
    return ok1 and ok2


def _check_minentropy(g: np.random.Generator, max_support: int) -> bool:
    # Family {X_a} sharing one Y, selected by an independent index A:
    #   Havg(X_A|Y) >= -log2( sum_a 2^(-Havg(X_a|Y)) ) >= min_a Havg(X_a|Y) - log2|D_A|
    na = int(g.integers(2, min(4, max_support) + 1))
    nx = int(g.integers(2, max_support + 1))
    ny = int(g.integers(2, max_support + 1))
    qy = g.exponential(size=ny)
    qy /= qy.sum()
    pa = g.exponential(size=na)
    pa /= pa.sum()
    members = []
    for _ in range(na):
        cond = g.exponential(size=(nx, ny))
        cond /= cond.sum(axis=0, keepdims=True)
        members.append(cond * qy[None, :])  # joint of (X_a, Y), common Y marginal
    mix = sum(pa[a] * members[a] for a in range(na))
    lhs = avg_min_entropy_matrix(mix)
    sum_bound = -math.log2(sum(2.0 ** -avg_min_entropy_matrix(m) for m in members))
    crude = min(avg_min_entropy_matrix(m) for m in members) - math.log2(na)
    return lhs >= sum_bound - _TOL and lhs >= crude - _TOL


def _check_chain_rule(g: np.random.Generator, max_support: int) -> bool:
    # Havg(X|Y,Z) >= Havg(X|Y) - H0(Z), and Havg(X|Z) >= Hinf(X) - H0(Z).
    nx = int(g.integers(2, max_support + 1))
    ny = int(g.integers(2, max_support + 1))
    nz = int(g.integers(1, max_support + 1))
    raw = g.exponential(size=(nx, ny, nz))
    raw /= raw.sum()
    h0z = max_entropy(nz)
    lhs = avg_min_entropy_matrix(raw.reshape(nx, ny * nz))
    rhs = avg_min_entropy_matrix(raw.sum(axis=2)) - h0z
    ok1 = lhs >= rhs - _TOL
    pxz = raw.sum(axis=1)
    ok2 = avg_min_entropy_matrix(pxz) >= min_entropy(pxz.sum(axis=1)) - h0z - _TOL
    return ok1 and ok2


def _check_equality(g: np.random.Generator, max_support: int) -> bool:
    # X, Y on the same set: Pr[X = Y] <= 2^(-Havg(X|Y)).
    d = int(g.integers(2, max_support + 1))
    probs = JointDistribution.random(g, d, d).probs
    p_eq = float(np.trace(probs))
    return p_eq <= 2.0 ** -avg_min_entropy_matrix(probs) + _TOL


def _check_neighborhood(g: np.random.Generator, max_support: int) -> bool:
    # Hamming balls A(d) of constant size covering D = {0,1}^b:
    #   Pr[X in A(Y)] <= |A| * 2^(-Havg(X|Y)).
    b = int(g.integers(1, 4))
    if (1 << b) > max_support:
        b = max(1, max_support.bit_length() - 1)
    size = 1 << b
    radius = int(g.integers(1, b + 2))
    probs = JointDistribution.random(g, size, size).probs
    ball = neighborhood_size(b, radius)
    p_in = 0.0
    for x in range(size):
        for y in range(size):
            if (x ^ y).bit_count() < radius:
                p_in += probs[x, y]
    return p_in <= ball * 2.0 ** -avg_min_entropy_matrix(probs) + _TOL


_CHECKS = {
    "function": _check_function,
    "independent": _check_independent,
    "minentropy": _check_minentropy,
    "chain_rule": _check_chain_rule,
    "equality": _check_equality,
    "neighborhood": _check_neighborhood,
}


def check_entropy_lemmas(trials: int, max_support: int = 8, seed: int = 0) -> ExperimentReport:
    """Exhaustively verify the entropy inequalities on random joints.

    Each trial samples fresh distributions with supports of size at most
    ``max_support`` and evaluates both sides of every inequality exactly.
    A violation is a reported failure, never an exception.
    """
    if max_support > 8:
        raise ValueError("exhaustive regime requires max_support <= 8")
    if max_support < 2:
        raise ValueError("need supports of size at least 2")
    g = np.random.default_rng(seed)
    violations = {name: 0 for name in LEMMA_NAMES}
    failed_trials = 0
    for _ in range(trials):
        bad = False
        for name, check in _CHECKS.items():
            if not check(g, max_support):
                violations[name] += 1
                bad = True
        if bad:
            failed_trials += 1
    return ExperimentReport(
        name="entropy-lemmas",
        trials=trials,
        successes=trials - failed_trials,
        failures=failed_trials,
        details={"violations": violations, "max_support": max_support, "tolerance": _TOL},
    )
