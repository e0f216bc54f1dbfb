"""Probabilistic reasoning over substochastic kernels.

Conditionals, Bayesian inversion, normalisation, Pearl's and Jeffrey's belief
updates, validity and a KL diagnostic.  Conditionals and their relatives are
only determined up to almost-sure equality; on conditioning events of zero
mass this module fills rows according to an explicit convention instead of
leaving the choice implicit.
"""
from __future__ import annotations

import enum
import math

import numpy as np

from .kernel import (
    LAW_TOL,
    VALIDATION_SLACK,
    ZERO_MASS_TOL,
    CompositionError,
    KernelError,
    SubKernel,
    UNIT,
    compose,
    copy,
    identity,
    tensor,
)


class SupportError(KernelError):
    """KL divergence is undefined: the first state charges a null event."""


class Convention(enum.Enum):
    """Representative choice on zero-mass conditioning events.

    UNIFORM_FILL makes conditionals, inversions and normalisations total
    everywhere; ZERO_FILL leaves unreachable rows empty.
    """

    UNIFORM_FILL = "uniform_fill"
    ZERO_FILL = "zero_fill"


def _filled_rows(rows: np.ndarray, masses: np.ndarray, convention: Convention,
                 zero_tol: float) -> np.ndarray:
    """Divide rows by their masses, filling zero-mass rows per convention."""
    out = np.zeros_like(rows)
    live = masses > zero_tol
    out[live] = rows[live] / masses[live, None]
    if convention is Convention.UNIFORM_FILL:
        out[~live] = 1.0 / rows.shape[1]
    return out


def conditional(
    f: SubKernel,
    split: int,
    convention: Convention = Convention.UNIFORM_FILL,
    zero_tol: float = ZERO_MASS_TOL,
) -> SubKernel:
    """A conditional of f: X -> Y*Z with respect to its first part.

    ``split`` counts the codomain factors belonging to Y.  The result
    c: X*Y -> Z satisfies c(z | x, y) = f(y, z | x) / m(y | x) wherever the
    marginal mass m(y | x) exceeds ``zero_tol``, and the factorization
    ``cond_comp(project(f, 1), c) = f`` holds.
    """
    y_obj, z_obj = f.cod.split(split)
    nx, ny, nz = f.dom.size, y_obj.size, z_obj.size
    cube = f.weights.reshape(nx, ny, nz)
    rows = cube.reshape(nx * ny, nz)
    masses = rows.sum(axis=1)
    w = _filled_rows(rows, masses, convention, zero_tol)
    return SubKernel(f.dom.tensor(y_obj), z_obj, w)


def bayes_invert(
    g: SubKernel,
    p: SubKernel,
    convention: Convention = Convention.UNIFORM_FILL,
    zero_tol: float = ZERO_MASS_TOL,
) -> SubKernel:
    """Bayesian inversion of g: X -> Y with respect to a prior state p on X.

    Delegates to :func:`conditional` on the joint ``p ; copy ; (g tensor id)``,
    so that posterior(x | y) = g(y|x) p(x) / sum_x' g(y|x') p(x') on outputs
    of positive predicted probability.
    """
    if p.dom != UNIT:
        raise CompositionError("the prior must be a state (domain I)")
    if p.cod != g.dom:
        raise CompositionError(f"prior on {p.cod} does not match channel domain {g.dom}")
    joint = compose(p, copy(g.dom), tensor(g, identity(g.dom)))
    return conditional(joint, split=len(g.cod.factors), convention=convention,
                       zero_tol=zero_tol)


def normalize(
    f: SubKernel,
    convention: Convention = Convention.UNIFORM_FILL,
    zero_tol: float = ZERO_MASS_TOL,
    slack: float = VALIDATION_SLACK,
) -> SubKernel:
    """Rowwise renormalisation: divide each row by its success mass.

    Rows already total within ``slack`` are returned bit-identically, which
    makes the operation exactly idempotent under UNIFORM_FILL.  Zero-mass
    rows follow the convention.  The defining law ``(f;discard) cond_comp'd
    with n(f)`` recovers f.
    """
    w = f.weights.copy()
    sums = w.sum(axis=1)
    stale = np.abs(sums - 1.0) > slack
    live = stale & (sums > zero_tol)
    dead = stale & ~live
    w[live] /= sums[live, None]
    if convention is Convention.UNIFORM_FILL:
        w[dead] = 1.0 / f.cod.size
    else:
        w[dead] = 0.0
    return SubKernel(f.dom, f.cod, w)


def pearl_update(
    p: SubKernel,
    f: SubKernel,
    q: SubKernel,
    renorm: bool = False,
    convention: Convention = Convention.UNIFORM_FILL,
    zero_tol: float = ZERO_MASS_TOL,
) -> SubKernel:
    """Pearl's update of prior p by predicate q observed through channel f.

    The raw result reweights the prior by the predicted likelihood,
    r(x) = p(x) * sum_y f(y|x) q(y); with ``renorm`` it is renormalised,
    matching the Bayesian inversion of ``f ; q`` evaluated at the unit.
    """
    if q.cod != UNIT:
        raise CompositionError("the evidence q must be a predicate (codomain I)")
    likelihood = compose(f, q)  # X -> I
    raw_w = p.weights * likelihood.weights[:, 0][None, :]
    raw = SubKernel(UNIT, p.cod, raw_w)
    if renorm:
        return normalize(raw, convention=convention, zero_tol=zero_tol)
    return raw


def jeffrey_update(
    p: SubKernel,
    f: SubKernel,
    t: SubKernel,
    convention: Convention = Convention.UNIFORM_FILL,
    zero_tol: float = ZERO_MASS_TOL,
) -> SubKernel:
    """Jeffrey's update: average the Bayesian inversion under evidence t on Y."""
    if t.dom != UNIT:
        raise CompositionError("the evidence t must be a state (domain I)")
    if t.cod != f.cod:
        raise CompositionError(f"evidence on {t.cod} does not match channel codomain {f.cod}")
    return compose(t, bayes_invert(f, p, convention=convention, zero_tol=zero_tol))


def validity(p: SubKernel, f: SubKernel, q: SubKernel) -> float:
    """Probability the belief p assigns to the predicate q through channel f."""
    return float(compose(p, f, q).weights[0, 0])


def kl_divergence(
    s: SubKernel,
    t: SubKernel,
    tol: float = LAW_TOL,
    zero_tol: float = ZERO_MASS_TOL,
) -> float:
    """Kullback-Leibler divergence between two total states on one object.

    Diagnostic only.  Natural log; terms with s(x) = 0 contribute nothing;
    s charging a point where t vanishes raises :class:`SupportError`.
    """
    if s.dom != UNIT or t.dom != UNIT or s.cod != t.cod:
        raise CompositionError("kl_divergence expects two states on the same object")
    sv, tv = s.weights[0], t.weights[0]
    if abs(sv.sum() - 1.0) > tol or abs(tv.sum() - 1.0) > tol:
        raise ValueError("kl_divergence expects total states")
    total = 0.0
    for a, b in zip(sv, tv):
        if a <= zero_tol:
            continue
        if b <= 0.0:
            raise SupportError("first state charges an event the second gives mass 0")
        total += a * math.log(a / b)
    return total
