"""Total stochastic kernels and the maybe-monad bridge to substochastic ones.

A substochastic kernel X -> Y is the same data as a row-stochastic kernel
X -> Y+1 into a copy of Y with a fresh failure point adjoined.  This module
makes that correspondence executable: conversions both ways, the laxator and
its copy-built section, strong Kleisli extension, and a conditional for
substochastic kernels computed entirely with row normalisation of total
kernels in the base category.
"""
from __future__ import annotations

from dataclasses import InitVar, dataclass

import numpy as np

from .kernel import (
    VALIDATION_SLACK,
    ZERO_MASS_TOL,
    Atom,
    CompositionError,
    FinObject,
    SubKernel,
    UNIT,
    ValidationError,
    compose,
    cond_comp,
    copy,
    discard,
    identity,
    render_label,
    tensor,
)

BOT = "⊥"


@dataclass(frozen=True)
class PointedAtom(Atom):
    """An atomic object whose last label is a failure point over a base object."""

    base: FinObject


def pointed(base: FinObject) -> FinObject:
    """Adjoin a failure label to ``base``, as a single fresh atomic object."""
    rendered = tuple(render_label(lab) for lab in base.labels)
    if BOT in rendered:
        raise ValidationError(f"{base} already uses the reserved label {BOT}")
    return FinObject((PointedAtom(f"{base}+{BOT}", rendered + (BOT,), base),))


def is_pointed(obj: FinObject) -> bool:
    return len(obj.factors) == 1 and isinstance(obj.factors[0], PointedAtom)


def base_of(obj: FinObject) -> FinObject:
    if not is_pointed(obj):
        raise ValidationError(f"{obj} is not a pointed object")
    return obj.factors[0].base  # type: ignore[union-attr]


@dataclass(frozen=True, eq=False)
class TotalKernel:
    """A row-stochastic kernel: every row sums to 1 within ``slack``."""

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
        if np.any(w < -slack):
            raise ValidationError("negative weight beyond slack")
        np.clip(w, 0.0, None, out=w)
        sums = w.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > slack):
            raise ValidationError(
                f"row mass must be 1 within {slack}; worst offset "
                f"{np.abs(sums - 1.0).max()}"
            )
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    def as_sub(self) -> SubKernel:
        return SubKernel(self.dom, self.cod, self.weights)

    def isclose(self, other: "TotalKernel", tol: float) -> bool:
        return self.as_sub().isclose(other.as_sub(), tol)

    def __repr__(self) -> str:
        return f"TotalKernel({self.dom} -> {self.cod}, {self.dom.size}x{self.cod.size})"


def as_total(f: SubKernel, slack: float = VALIDATION_SLACK) -> TotalKernel:
    return TotalKernel(f.dom, f.cod, f.weights, slack)


def t_compose(f: TotalKernel, g: TotalKernel, *more: TotalKernel) -> TotalKernel:
    out = as_total(compose(f.as_sub(), g.as_sub()))
    for h in more:
        out = t_compose(out, h)
    return out


def t_tensor(f: TotalKernel, g: TotalKernel) -> TotalKernel:
    return as_total(tensor(f.as_sub(), g.as_sub()))


def t_cond_comp(f: TotalKernel, g: TotalKernel) -> TotalKernel:
    return as_total(cond_comp(f.as_sub(), g.as_sub()))


def t_identity(obj: FinObject) -> TotalKernel:
    return as_total(identity(obj))


def t_copy(obj: FinObject) -> TotalKernel:
    return as_total(copy(obj))


def t_discard(obj: FinObject) -> TotalKernel:
    return as_total(discard(obj))


def to_total(f: SubKernel) -> TotalKernel:
    """View a substochastic kernel as a total kernel into the pointed codomain."""
    w = np.hstack([f.weights, f.failure_mass()[:, None]])
    return TotalKernel(f.dom, pointed(f.cod), w)


def from_total(g: TotalKernel) -> SubKernel:
    """Drop the failure column of a total kernel into a pointed object."""
    base = base_of(g.cod)
    return SubKernel(g.dom, base, g.weights[:, :-1])


def laxator(x: FinObject, y: FinObject) -> TotalKernel:
    """(X+1)*(Y+1) -> (X*Y)+1: pair the payloads, collapse any failure."""
    nx, ny = x.size, y.size
    dom = pointed(x).tensor(pointed(y))
    cod = pointed(x.tensor(y))
    w = np.zeros((dom.size, cod.size))
    bot = nx * ny
    for i in range(nx + 1):
        for j in range(ny + 1):
            out = i * ny + j if (i < nx and j < ny) else bot
            w[i * (ny + 1) + j, out] = 1.0
    return TotalKernel(dom, cod, w)


def oplaxator(x: FinObject, y: FinObject) -> TotalKernel:
    """(X*Y)+1 -> (X+1)*(Y+1): split a pair, send failure to both sides.

    Built from copying and projecting; it is a section of the laxator.
    """
    nx, ny = x.size, y.size
    dom = pointed(x.tensor(y))
    cod = pointed(x).tensor(pointed(y))
    w = np.zeros((dom.size, cod.size))
    for i in range(nx):
        for j in range(ny):
            w[i * ny + j, i * (ny + 1) + j] = 1.0
    w[nx * ny, nx * (ny + 1) + ny] = 1.0  # failure to (failure, failure)
    return TotalKernel(dom, cod, w)


def distributive_law(x: FinObject, value: SubKernel | str) -> TotalKernel:
    """Send a distribution on X to its zero-extension on X+1, and failure to
    the point mass on the adjoined label."""
    target = pointed(x)
    w = np.zeros((1, target.size))
    if isinstance(value, str):
        if value != BOT:
            raise ValidationError(f"expected a distribution or {BOT!r}, got {value!r}")
        w[0, -1] = 1.0
        return TotalKernel(UNIT, target, w)
    if value.dom != UNIT or value.cod != x:
        raise CompositionError(f"expected a state on {x}")
    if abs(value.row_sums()[0] - 1.0) > VALIDATION_SLACK:
        raise ValidationError("distributive law expects a total distribution")
    w[0, :-1] = value.weights[0]
    return TotalKernel(UNIT, target, w)


def strong_kleisli_extend(g: SubKernel, split: int) -> SubKernel:
    """Extend g: X*Y -> Z to X*(Y+1) -> Z, failing outright on failed inputs.

    ``split`` counts the domain factors belonging to X.
    """
    x_obj, y_obj = g.dom.split(split)
    nx, ny, nz = x_obj.size, y_obj.size, g.cod.size
    w = np.zeros((nx * (ny + 1), nz))
    rows = g.weights.reshape(nx, ny, nz)
    for i in range(nx):
        w[i * (ny + 1): i * (ny + 1) + ny] = rows[i]
    return SubKernel(x_obj.tensor(pointed(y_obj)), g.cod, w)


def split_conditional(g: SubKernel) -> SubKernel:
    """Restrict g: X*(Y+1) -> Z to the rows whose second input succeeded."""
    if not g.dom.factors or not isinstance(g.dom.factors[-1], PointedAtom):
        raise ValidationError(f"domain {g.dom} does not end in a pointed factor")
    y_obj = g.dom.factors[-1].base  # type: ignore[union-attr]
    x_obj = FinObject(g.dom.factors[:-1])
    nx, ny = x_obj.size, y_obj.size
    keep = [i * (ny + 1) + j for i in range(nx) for j in range(ny)]
    return SubKernel(x_obj.tensor(y_obj), g.cod, g.weights[keep])


def stoch_conditional(
    h: TotalKernel,
    split: int,
    zero_tol: float = ZERO_MASS_TOL,
) -> TotalKernel:
    """Conditional in the base category of total kernels: row normalisation.

    For h: X -> A*B returns c: X*A -> B with c(b | x, a) = h(a, b | x) / m(a | x).
    Zero-mass rows are filled uniformly so the result stays total.
    """
    a_obj, b_obj = h.cod.split(split)
    nx, na, nb = h.dom.size, a_obj.size, b_obj.size
    rows = h.weights.reshape(nx * na, nb)
    masses = rows.sum(axis=1)
    w = np.full((nx * na, nb), 1.0 / nb)
    live = masses > zero_tol
    w[live] = rows[live] / masses[live, None]
    return TotalKernel(h.dom.tensor(a_obj), b_obj, w)


def conditional_via_base(
    f: SubKernel,
    split: int,
    zero_tol: float = ZERO_MASS_TOL,
) -> SubKernel:
    """A conditional of f: X -> Y*Z computed only with base-category conditionals.

    Route: view f totally into (Y*Z)+1, split the failure across the factors
    with the oplaxator, take the base conditional, restrict away failed
    conditioning inputs, and drop the failure column of the result.  On
    positive-mass pairs it agrees with :func:`pmcat.inference.conditional`.
    """
    y_obj, z_obj = f.cod.split(split)
    lifted = t_compose(to_total(f), oplaxator(y_obj, z_obj))
    c = stoch_conditional(lifted, split=1, zero_tol=zero_tol)
    restricted = split_conditional(c.as_sub())
    return from_total(TotalKernel(restricted.dom, pointed(z_obj), restricted.weights))
