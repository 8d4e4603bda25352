"""Pure n-qudit states as hypermatrices, boson detection and concurrence."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import core
from .core import Hypermatrix
from .errors import NormalizationError, OddOrderError, ShapeError
from .hdet import evaluate

NORM_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class QuditState:
    """Amplitudes of ``|psi>`` in ``(C^d)^{(x) n}``.

    ``amplitudes[psi((i_1+1, ..., i_n+1), (d,)*n) - 1]`` is the coefficient of
    ``|i_1 ... i_n>``, so the first particle's label varies fastest.
    """

    d: int
    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.d < 2 or self.n < 2:
            raise ValueError(f"need d, n >= 2, got d={self.d}, n={self.n}")
        amps = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size != self.d**self.n:
            raise ShapeError(f"{amps.size} amplitudes for d={self.d}, n={self.n}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        norm = float(np.sqrt(np.sum(np.abs(amps) ** 2)))
        if abs(norm - 1) > NORM_TOL:
            raise NormalizationError(norm)
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    def amplitude(self, labels) -> complex:
        """Coefficient of ``|labels>`` with 0-based labels."""
        return complex(self.amplitudes[core.psi([i + 1 for i in labels], (self.d,) * self.n) - 1])

    def __mul__(self, phase: complex) -> "QuditState":
        return QuditState(self.d, self.n, self.amplitudes * phase)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, QuditState):
            return NotImplemented
        return (self.d, self.n) == (other.d, other.n) and np.array_equal(
            self.amplitudes, other.amplitudes
        )


def basis_state(labels, d: int = 2) -> QuditState:
    amps = np.zeros(d ** len(labels), dtype=np.complex128)
    amps[core.psi([i + 1 for i in labels], (d,) * len(labels)) - 1] = 1
    return QuditState(d, len(labels), amps)


def superposition(terms: dict, d: int = 2) -> QuditState:
    """Normalized sum ``sum c |labels>`` from ``{labels: c}``."""
    n = len(next(iter(terms)))
    amps = np.zeros(d**n, dtype=np.complex128)
    for labels, c in terms.items():
        amps[core.psi([i + 1 for i in labels], (d,) * n) - 1] += c
    return QuditState(d, n, amps / np.linalg.norm(amps))


def bell() -> QuditState:
    return superposition({(0, 0): 1, (1, 1): 1})


def ghz(n: int, d: int = 2) -> QuditState:
    return superposition({(k,) * n: 1 for k in range(d)}, d)


def product_state(vectors) -> QuditState:
    """``v_1 (x) ... (x) v_n`` of normalized local vectors (first factor fastest)."""
    vecs = [np.asarray(v, dtype=np.complex128) / np.linalg.norm(v) for v in vectors]
    hyper = vecs[0]
    for v in vecs[1:]:
        hyper = np.multiply.outer(hyper, v)
    return QuditState(len(vecs[0]), len(vecs), hyper.ravel(order="F"))


def state_to_hypermatrix(s: QuditState) -> Hypermatrix:
    """Entry ``(i_1+1, ..., i_n+1)`` of the result is the amplitude of ``|i_1...i_n>``."""
    return Hypermatrix.from_flat((s.d,) * s.n, s.amplitudes, core.COMPLEX128)


def hypermatrix_to_state(A: Hypermatrix) -> QuditState:
    if not A.is_cubical:
        raise ShapeError(f"states correspond to cubical hypermatrices, got {A.shape}")
    return QuditState(A.side, A.order, np.asarray(A.data, dtype=np.complex128))


def is_boson(s: QuditState, tol: float = core.SYMMETRY_TOL) -> bool:
    """True when the state is invariant under every particle permutation."""
    return core.is_symmetric(state_to_hypermatrix(s), tol)


def evaluate_concurrence(s: QuditState, store=None, tol: float = core.SYMMETRY_TOL):
    """``(2 |hdet(psi_hat)|, engine)``; the symmetric path runs for bosons."""
    if s.n % 2:
        raise OddOrderError(
            f"concurrence is defined for an even number of particles; n={s.n} is odd "
            "and the hyperdeterminant vanishes identically there"
        )
    res = evaluate(state_to_hypermatrix(s), "auto", store, tol=tol)
    return 2 * abs(res.value), res.engine


def concurrence(s: QuditState, store=None, tol: float = core.SYMMETRY_TOL) -> float:
    return evaluate_concurrence(s, store, tol)[0]


def symmetrize(s: QuditState) -> QuditState:
    """Average the amplitudes over all particle permutations and renormalize."""
    A = state_to_hypermatrix(s).array
    acc = np.zeros_like(A)
    perms = list(itertools.permutations(range(s.n)))
    for p in perms:
        acc = acc + np.transpose(A, p)
    acc = acc / len(perms)
    return QuditState(s.d, s.n, acc.ravel(order="F") / np.linalg.norm(acc))


def random_state(rng: np.random.Generator, d: int, n: int) -> QuditState:
    amps = rng.normal(size=d**n) + 1j * rng.normal(size=d**n)
    return QuditState(d, n, amps / np.linalg.norm(amps))


def random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


# ---------------------------------------------------------------------------
# state documents


def parse_state(doc: dict) -> QuditState:
    """Build a state from ``{"d": .., "n": .., "amplitudes": [[re, im], ...]}``."""
    try:
        d, n, raw = int(doc["d"]), int(doc["n"]), doc["amplitudes"]
    except KeyError as exc:
        raise ValueError(f"state document is missing field {exc}") from None
    if len(raw) != d**n:
        raise ValueError(f"'amplitudes' has {len(raw)} entries, expected d^n = {d**n}")
    amps = []
    for k, pair in enumerate(raw):
        if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
            raise ValueError(f"amplitudes[{k}] must be a [real, imag] pair, got {pair!r}")
        amps.append(complex(float(pair[0]), float(pair[1])))
    return QuditState(d, n, np.array(amps))


def state_document(s: QuditState) -> dict:
    return {
        "d": s.d,
        "n": s.n,
        "amplitudes": [[float(a.real), float(a.imag)] for a in s.amplitudes],
    }


def load_state(path) -> QuditState:
    return parse_state(json.loads(Path(path).read_text()))


def local_unitary(s: QuditState, unitaries) -> QuditState:
    """Apply ``U_1 (x) ... (x) U_n`` via the multilinear product with transposes."""
    psi_hat = state_to_hypermatrix(s)
    out = core.multilinear_multiply(psi_hat, [np.asarray(U).T for U in unitaries])
    amps = np.asarray(out.data, dtype=np.complex128)
    return QuditState(s.d, s.n, amps / math.sqrt(float(np.sum(np.abs(amps) ** 2))))
