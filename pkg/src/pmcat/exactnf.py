"""Normal forms for diagrams built from total kernels and exact observations.

Every term in the fragment of total generators, structural wiring and
``observe`` nodes denotes a kernel of the shape

    f(y | x) = h(z | x) * g(y | x)

with a total evidence channel h: X -> W, a single observed evidence label z
of W, and a total result channel g: X -> Y.  The triple (h, z, g) composes
and tensors without ever leaving total kernels: composition pushes the
observation through a pointwise Bayesian inversion of the evidence channel.
The result channel g is, on inputs of positive success mass, the
normalisation of the denoted kernel.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import diagram as D
from . import kernel as K
from .kernel import (
    VALIDATION_SLACK,
    ZERO_MASS_TOL,
    CompositionError,
    FinObject,
    KernelError,
    Label,
    SubKernel,
    UNIT,
    ValidationError,
)
from .maybecat import TotalKernel, as_total, t_compose, t_copy, t_tensor


class NonTotalGeneratorError(KernelError):
    """The normal-form construction requires every generator to be total."""


@dataclass(frozen=True)
class NormalForm:
    """The factorization f = (evidence ; point-observation) followed by result."""

    evidence: TotalKernel  # h: X -> W
    point: Label           # z, a label of W
    result: TotalKernel    # g: X -> Y

    def __post_init__(self) -> None:
        if self.evidence.dom != self.result.dom:
            raise CompositionError(
                f"evidence domain {self.evidence.dom} differs from "
                f"result domain {self.result.dom}"
            )
        if self.point not in self.evidence.cod.index:
            raise ValidationError(
                f"{K.render_label(self.point)} is not a label of {self.evidence.cod}"
            )

    @property
    def dom(self) -> FinObject:
        return self.result.dom

    @property
    def cod(self) -> FinObject:
        return self.result.cod

    @property
    def evidence_obj(self) -> FinObject:
        return self.evidence.cod

    def success_mass(self) -> np.ndarray:
        """Per input, the probability that the observed evidence comes up."""
        return self.evidence.weights[:, self.evidence.cod.index[self.point]].copy()

    def denote(self) -> SubKernel:
        """The substochastic kernel this normal form stands for."""
        return SubKernel(self.dom, self.cod,
                         self.result.weights * self.success_mass()[:, None])

    def normalization(self) -> TotalKernel:
        """The total result channel; a normalisation of :meth:`denote`."""
        return self.result

    @staticmethod
    def of_total(f: SubKernel | TotalKernel) -> "NormalForm":
        """A total kernel needs no observation: unit evidence, f itself."""
        total = f if isinstance(f, TotalKernel) else as_total(f)
        ones = np.ones((total.dom.size, 1))
        return NormalForm(TotalKernel(total.dom, UNIT, ones), (), total)

    @staticmethod
    def of_observe(obj: FinObject, label: str | K.Label) -> "NormalForm":
        """Observing a label: the input itself is the evidence."""
        lab = K.as_label(obj, label)
        return NormalForm(
            as_total(K.identity(obj)), lab, as_total(K.discard(obj)),
        )

    def tensor(self, other: "NormalForm") -> "NormalForm":
        return NormalForm(
            t_tensor(self.evidence, other.evidence),
            self.point + other.point,
            t_tensor(self.result, other.result),
        )

    def then(self, other: "NormalForm",
             zero_tol: float = ZERO_MASS_TOL) -> "NormalForm":
        """Sequential composition of normal forms.

        The combined evidence pairs this form's evidence with the evidence
        the result channel induces downstream; both branches read a copy of
        the input.  The combined result averages the downstream result over
        the Bayesian inversion of the downstream evidence channel with
        respect to this form's result, evaluated at the downstream point.
        """
        if self.cod != other.dom:
            raise CompositionError(f"cannot compose {self.cod} -> into -> {other.dom}")
        x_obj = self.dom
        induced = t_compose(self.result, other.evidence)  # X -> W2
        evidence = t_compose(t_copy(x_obj), t_tensor(self.evidence, induced))
        z2_col = other.evidence.weights[:, other.evidence.cod.index[other.point]]
        ny = self.result.cod.size
        w = np.empty((x_obj.size, other.result.cod.size))
        for i in range(x_obj.size):
            post = self.result.weights[i] * z2_col
            mass = post.sum()
            post = post / mass if mass > zero_tol else np.full(ny, 1.0 / ny)
            row = post @ other.result.weights
            w[i] = row / row.sum()
        return NormalForm(evidence, self.point + other.point,
                          TotalKernel(x_obj, other.result.cod, w))


def from_term(term: D.Term, model: D.Model,
              zero_tol: float = ZERO_MASS_TOL) -> NormalForm:
    """Fold a diagram term into a normal form.

    Generators must be total within the validation slack; ``compare`` nodes
    and non-total generators are rejected by name, since the construction
    lives over the category of total kernels.
    """
    match term:
        case D.Gen(name):
            k = model.generator(name)
            if not K.is_total(k, VALIDATION_SLACK):
                raise NonTotalGeneratorError(
                    f"generator {name!r} is not total; it cannot enter a normal form"
                )
            return NormalForm.of_total(k)
        case D.Id(obj):
            return NormalForm.of_total(K.identity(obj))
        case D.Copy(obj):
            return NormalForm.of_total(K.copy(obj))
        case D.Discard(obj):
            return NormalForm.of_total(K.discard(obj))
        case D.Swap(left, right):
            return NormalForm.of_total(K.swap(left, right))
        case D.Compare(obj):
            raise NonTotalGeneratorError(
                f"compare[{obj}] is not total; it cannot enter a normal form"
            )
        case D.Observe(obj, label):
            return NormalForm.of_observe(obj, label)
        case D.Seq(first, second):
            return from_term(first, model, zero_tol).then(
                from_term(second, model, zero_tol), zero_tol)
        case D.Par(left, right):
            return from_term(left, model, zero_tol).tensor(
                from_term(right, model, zero_tol))
    raise D.DiagramTypeError(f"unknown term node {term!r}")
