"""Finite objects and substochastic kernels.

A finite object is an ordered set of labels, possibly the cartesian product
of several named atomic label sets.  A kernel assigns to every input label a
subdistribution over output labels: nonnegative weights summing to at most 1,
the deficit being the probability of failure.  States are kernels out of the
unit object; scalars are kernels from the unit to itself.

Tensor is strict: objects are flat tuples of atomic factors, so ``(X*Y)*Z``
and ``X*(Y*Z)`` are literally the same object and no coherence bookkeeping is
needed.
"""
from __future__ import annotations

import itertools
from dataclasses import InitVar, dataclass
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

LAW_TOL = 1e-9
VALIDATION_SLACK = 1e-12
ZERO_MASS_TOL = 1e-12

Label = tuple[str, ...]


class KernelError(Exception):
    """Base class for kernel-level failures."""


class ValidationError(KernelError):
    """Raised when weights, labels or objects violate an invariant."""


class CompositionError(KernelError):
    """Raised when domains and codomains do not line up."""


@dataclass(frozen=True)
class Tolerances:
    """Numeric thresholds shared across the library.

    law_tol: entrywise absolute tolerance for equality-of-kernels checks.
    validation_slack: slack accepted (and repaired) at construction time.
    zero_mass_tol: below this, a conditioning mass counts as zero.
    """

    law_tol: float = LAW_TOL
    validation_slack: float = VALIDATION_SLACK
    zero_mass_tol: float = ZERO_MASS_TOL

    def __post_init__(self) -> None:
        if not (self.law_tol > 0 and self.validation_slack > 0 and self.zero_mass_tol > 0):
            raise ValidationError("tolerances must be strictly positive")
        if self.zero_mass_tol > self.law_tol:
            raise ValidationError("zero_mass_tol must not exceed law_tol")


DEFAULT_TOLERANCES = Tolerances()


@dataclass(frozen=True)
class Atom:
    """A named atomic label set."""

    name: str
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.labels:
            raise ValidationError(f"atomic object {self.name!r} needs at least one label")
        if len(set(self.labels)) != len(self.labels):
            raise ValidationError(f"atomic object {self.name!r} has duplicate labels")

    @property
    def size(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class FinObject:
    """A finite ordered label set, presented as a tensor of atomic factors.

    Labels of a tensor are tuples concatenating one label per factor, in
    row-major order (leftmost factor varies slowest).  The unit object has no
    factors and the single empty label ``()``.
    """

    factors: tuple[Atom, ...]

    @staticmethod
    def atomic(name: str, labels: Iterable[str]) -> "FinObject":
        return FinObject((Atom(name, tuple(labels)),))

    @cached_property
    def labels(self) -> tuple[Label, ...]:
        if not self.factors:
            return ((),)
        return tuple(itertools.product(*(a.labels for a in self.factors)))

    @cached_property
    def index(self) -> dict[Label, int]:
        return {lab: i for i, lab in enumerate(self.labels)}

    @property
    def size(self) -> int:
        n = 1
        for a in self.factors:
            n *= a.size
        return n

    def tensor(self, other: "FinObject") -> "FinObject":
        return FinObject(self.factors + other.factors)

    __mul__ = tensor

    def split(self, k: int) -> tuple["FinObject", "FinObject"]:
        """Split a tensor after its first ``k`` factors."""
        if not 0 <= k <= len(self.factors):
            raise ValidationError(
                f"cannot split {self} at factor {k}; it has {len(self.factors)} factors"
            )
        return FinObject(self.factors[:k]), FinObject(self.factors[k:])

    def __str__(self) -> str:
        if not self.factors:
            return "I"
        return "*".join(a.name for a in self.factors)


UNIT = FinObject(())


def as_label(obj: FinObject, value: str | Iterable[str]) -> Label:
    """Coerce a user-supplied label (string or tuple) and check membership."""
    lab: Label = (value,) if isinstance(value, str) else tuple(value)
    if lab not in obj.index:
        raise ValidationError(f"{render_label(lab)} is not a label of {obj}")
    return lab


def render_label(lab: Label) -> str:
    if len(lab) == 1:
        return lab[0]
    return "(" + ",".join(lab) + ")"


def parse_label(text: str) -> Label:
    """Inverse of :func:`render_label` (no nesting: labels are flat tuples)."""
    text = text.strip()
    if text.startswith("(") and text.endswith(")"):
        inner = text[1:-1].strip()
        if not inner:
            return ()
        return tuple(part.strip() for part in inner.split(","))
    return (text,)


@dataclass(frozen=True, eq=False)
class SubKernel:
    """A substochastic kernel: per input label, weights over output labels.

    Rows sum to at most 1; the deficit of a row is its failure mass.  Rows
    exceeding 1 by at most ``slack`` are rescaled to exactly 1, negative
    weights within ``slack`` of 0 are clamped; anything worse is rejected.
    Instances are immutable.
    """

    dom: FinObject
    cod: FinObject
    weights: np.ndarray
    slack: InitVar[float] = VALIDATION_SLACK

    def __post_init__(self, slack: float) -> None:
        w = np.array(self.weights, dtype=float)
        if w.shape != (self.dom.size, self.cod.size):
            raise ValidationError(
                f"weight matrix shape {w.shape} does not match "
                f"|{self.dom}|={self.dom.size}, |{self.cod}|={self.cod.size}"
            )
        if not np.all(np.isfinite(w)):
            raise ValidationError("kernel weights must be finite")
        if np.any(w < -slack):
            raise ValidationError(f"negative weight {w.min()} beyond slack {slack}")
        np.clip(w, 0.0, None, out=w)
        sums = w.sum(axis=1)
        if np.any(sums > 1.0 + slack):
            raise ValidationError(f"row mass {sums.max()} exceeds 1 beyond slack {slack}")
        drift = sums > 1.0
        if np.any(drift):
            w[drift] /= sums[drift, None]
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    def row_sums(self) -> np.ndarray:
        return self.weights.sum(axis=1)

    def failure_mass(self) -> np.ndarray:
        return np.maximum(0.0, 1.0 - self.row_sums())

    def at(self, x: str | Label, y: str | Label) -> float:
        """Weight of output ``y`` given input ``x``."""
        return float(self.weights[self.dom.index[as_label(self.dom, x)],
                                  self.cod.index[as_label(self.cod, y)]])

    def isclose(self, other: "SubKernel", tol: float = LAW_TOL) -> bool:
        return (
            self.dom == other.dom
            and self.cod == other.cod
            and bool(np.all(np.abs(self.weights - other.weights) <= tol))
        )

    def __repr__(self) -> str:
        return f"SubKernel({self.dom} -> {self.cod}, {self.dom.size}x{self.cod.size})"


SubState = SubKernel  # a state is a kernel out of the unit object


def from_rows(
    dom: FinObject,
    cod: FinObject,
    rows: Mapping[Label, Mapping[Label, float]],
) -> SubKernel:
    """Build a kernel from a sparse per-row mapping; omitted entries are 0."""
    w = np.zeros((dom.size, cod.size))
    for in_lab, row in rows.items():
        i = dom.index.get(tuple(in_lab))
        if i is None:
            raise ValidationError(f"{render_label(tuple(in_lab))} is not a label of {dom}")
        for out_lab, value in row.items():
            j = cod.index.get(tuple(out_lab))
            if j is None:
                raise ValidationError(f"{render_label(tuple(out_lab))} is not a label of {cod}")
            w[i, j] = value
    return SubKernel(dom, cod, w)


def state(obj: FinObject, row: Mapping[str | Label, float]) -> SubKernel:
    """A substate on ``obj`` from a label->weight mapping."""
    w = np.zeros((1, obj.size))
    for lab, value in row.items():
        w[0, obj.index[as_label(obj, lab)]] = value
    return SubKernel(UNIT, obj, w)


def identity(obj: FinObject) -> SubKernel:
    return SubKernel(obj, obj, np.eye(obj.size))


def scalar(value: float) -> SubKernel:
    """A scalar is a kernel I -> I carrying one weight in [0, 1]."""
    return SubKernel(UNIT, UNIT, np.array([[value]]))


def dirac(obj: FinObject, label: str | Label) -> SubKernel:
    """The deterministic state concentrated on one label."""
    w = np.zeros((1, obj.size))
    w[0, obj.index[as_label(obj, label)]] = 1.0
    return SubKernel(UNIT, obj, w)


def deterministic(dom: FinObject, cod: FinObject, mapping: Mapping[Label, Label]) -> SubKernel:
    """The kernel sending each input label to a Dirac on ``mapping[input]``."""
    w = np.zeros((dom.size, cod.size))
    for in_lab, out_lab in mapping.items():
        w[dom.index[as_label(dom, in_lab)], cod.index[as_label(cod, out_lab)]] = 1.0
    return SubKernel(dom, cod, w)


def copy(obj: FinObject) -> SubKernel:
    """Comonoid multiplication: x |-> (x, x)."""
    n = obj.size
    w = np.zeros((n, n * n))
    idx = np.arange(n)
    w[idx, idx * n + idx] = 1.0
    return SubKernel(obj, obj.tensor(obj), w)


def discard(obj: FinObject) -> SubKernel:
    """Comonoid counit: every input succeeds with the unit output."""
    return SubKernel(obj, UNIT, np.ones((obj.size, 1)))


def swap(x: FinObject, y: FinObject) -> SubKernel:
    """The symmetry X*Y -> Y*X."""
    nx, ny = x.size, y.size
    w = np.zeros((nx * ny, ny * nx))
    for i in range(nx):
        for j in range(ny):
            w[i * ny + j, j * nx + i] = 1.0
    return SubKernel(x.tensor(y), y.tensor(x), w)


def compare(obj: FinObject) -> SubKernel:
    """Equality constraint X*X -> X: keep equal pairs, fail on mismatch."""
    n = obj.size
    w = np.zeros((n * n, n))
    idx = np.arange(n)
    w[idx * n + idx, idx] = 1.0
    return SubKernel(obj.tensor(obj), obj, w)


def observe(obj: FinObject, label: str | Label) -> SubKernel:
    """The effect X -> I succeeding exactly on ``label``.

    Equal to ``(dirac(label) tensor id) ; compare ; discard``.
    """
    lab = as_label(obj, label)
    w = np.zeros((obj.size, 1))
    w[obj.index[lab], 0] = 1.0
    return SubKernel(obj, UNIT, w)


def compose(f: SubKernel, g: SubKernel, *more: SubKernel) -> SubKernel:
    """Sequential composition, summing over the internal wire."""
    if f.cod != g.dom:
        raise CompositionError(f"cannot compose {f.cod} -> into -> {g.dom}")
    out = SubKernel(f.dom, g.cod, f.weights @ g.weights)
    for h in more:
        out = compose(out, h)
    return out


def tensor(f: SubKernel, g: SubKernel) -> SubKernel:
    """Parallel composition; weights multiply pointwise across the factors."""
    return SubKernel(
        f.dom.tensor(g.dom),
        f.cod.tensor(g.cod),
        np.kron(f.weights, g.weights),
    )


def project(f: SubKernel, side: int, split: int | None = None) -> SubKernel:
    """Marginal of a two-part codomain: discard the other part.

    ``split`` is the number of leading codomain factors forming the first
    part; it defaults to half the factors when that is unambiguous.
    """
    nfac = len(f.cod.factors)
    if split is None:
        if nfac % 2 != 0:
            raise ValidationError(
                f"codomain {f.cod} has {nfac} factors; pass an explicit split"
            )
        split = nfac // 2
    left, right = f.cod.split(split)
    if side not in (1, 2):
        raise ValidationError("side must be 1 or 2")
    cube = f.weights.reshape(f.dom.size, left.size, right.size)
    if side == 1:
        return SubKernel(f.dom, left, cube.sum(axis=2))
    return SubKernel(f.dom, right, cube.sum(axis=1))


def graph(f: SubKernel) -> SubKernel:
    """Pair every input with the output of ``f``: copy then apply on one leg."""
    nx, ny = f.dom.size, f.cod.size
    w = np.zeros((nx, nx * ny))
    for i in range(nx):
        w[i, i * ny: (i + 1) * ny] = f.weights[i]
    return SubKernel(f.dom, f.dom.tensor(f.cod), w)


def cond_comp(f: SubKernel, g: SubKernel) -> SubKernel:
    """Conditional composition of f: X -> A with g: X*A -> B, giving X -> A*B.

    The input is copied, f produces the first output, and g sees both the
    original input and f's output: weight(a, b | x) = f(a|x) * g(b | x, a).
    """
    if g.dom != f.dom.tensor(f.cod):
        raise CompositionError(
            f"conditional composition needs g: {f.dom}*{f.cod} -> B, got {g.dom}"
        )
    nx, na, nb = f.dom.size, f.cod.size, g.cod.size
    w = (f.weights[:, :, None] * g.weights.reshape(nx, na, nb)).reshape(nx, na * nb)
    return SubKernel(f.dom, f.cod.tensor(g.cod), w)


def is_total(f: SubKernel, tol: float = LAW_TOL) -> bool:
    """Every row carries full mass: discarding the output discards the input."""
    return bool(np.all(np.abs(f.row_sums() - 1.0) <= tol))


def is_deterministic(f: SubKernel, tol: float = LAW_TOL) -> bool:
    """f commutes with copy: running f then copying equals copying then f twice."""
    lhs = compose(f, copy(f.cod))
    rhs = compose(copy(f.dom), tensor(f, f))
    return lhs.isclose(rhs, tol)


def domain_of_definition(f: SubKernel) -> SubKernel:
    """The per-input success probability, as an effect X -> I."""
    return compose(f, discard(f.cod))


def has_deterministic_domain(f: SubKernel, tol: float = LAW_TOL) -> bool:
    """Success probabilities are crisp: every row mass is 0 or 1."""
    sums = f.row_sums()
    return bool(np.all((np.abs(sums) <= tol) | (np.abs(sums - 1.0) <= tol)))


def as_equal(f: SubKernel, g1: SubKernel, g2: SubKernel, tol: float = LAW_TOL) -> bool:
    """Almost-sure equality of g1, g2: A*X -> B with respect to f: X -> A.

    The arguments keep the A*X typing; the reorder to the X*A convention of
    :func:`cond_comp` happens internally.
    """
    if g1.dom != g2.dom or g1.cod != g2.cod:
        raise CompositionError("g1 and g2 must be parallel morphisms")
    expected = f.cod.tensor(f.dom)
    if g1.dom != expected:
        raise CompositionError(f"expected domain {expected}, got {g1.dom}")
    reorder = swap(f.dom, f.cod)
    return cond_comp(f, compose(reorder, g1)).isclose(cond_comp(f, compose(reorder, g2)), tol)
