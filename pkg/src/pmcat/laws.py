"""Seeded randomized checks of the algebraic laws the library promises.

Each law runs a batch of randomized instances over small objects (atomic
sizes up to 4, comparator checks up to 5) and reports the worst entrywise
deviation.  The same suites back the ``check-laws`` CLI command and the
acceptance tests; everything is driven by an explicit generator, so a fixed
seed reproduces a run exactly.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import diagram as D
from . import exactnf
from . import inference as I
from . import kernel as K
from . import maybecat as M
from .kernel import Atom, FinObject, SubKernel, UNIT

LAW_TOL = K.LAW_TOL
ZERO = K.ZERO_MASS_TOL


@dataclass
class LawResult:
    name: str
    passed: bool
    cases: int
    max_err: float
    note: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        out = f"{status}  {self.name}  (cases={self.cases}, max_err={self.max_err:.3e})"
        return out + (f"  [{self.note}]" if self.note else "")


@dataclass
class LawContext:
    """Shared randomness, tolerances and optional model-supplied material."""

    rng: np.random.Generator
    cases: int = 200
    tol: float = LAW_TOL
    extra_objects: list[FinObject] = field(default_factory=list)
    extra_kernels: list[SubKernel] = field(default_factory=list)

    _counter: itertools.count = field(default_factory=itertools.count)

    # --- random material -------------------------------------------------

    def atom(self, max_size: int = 4, min_size: int = 1) -> Atom:
        size = int(self.rng.integers(min_size, max_size + 1))
        n = next(self._counter)
        return Atom(f"R{n}", tuple(f"r{n}_{i}" for i in range(size)))

    def obj(self, max_size: int = 4, min_size: int = 1) -> FinObject:
        if self.extra_objects and self.rng.random() < 0.25:
            cand = self.extra_objects[int(self.rng.integers(len(self.extra_objects)))]
            if min_size <= cand.size <= max_size:
                return cand
        return FinObject((self.atom(max_size, min_size),))

    def row(self, n: int, profile: str = "sub") -> np.ndarray:
        """One row of weights: 'total', 'zero', or the mixed 'sub' profile."""
        if profile == "total":
            return self.rng.dirichlet(np.ones(n))
        if profile == "zero":
            return np.zeros(n)
        r = self.rng.random()
        if r < 0.15:
            return np.zeros(n)
        if r < 0.5:
            return self.rng.dirichlet(np.ones(n))
        mass = self.rng.uniform(0.1, 0.9)
        return mass * self.rng.dirichlet(np.ones(n))

    def kernel(self, dom: FinObject, cod: FinObject, profile: str = "sub") -> SubKernel:
        w = np.vstack([self.row(cod.size, profile) for _ in range(dom.size)])
        return SubKernel(dom, cod, w)

    def state(self, obj: FinObject, total: bool = True) -> SubKernel:
        return self.kernel(UNIT, obj, "total" if total else "sub")

    def dirac_kernel(self, dom: FinObject, cod: FinObject) -> SubKernel:
        w = np.zeros((dom.size, cod.size))
        for i in range(dom.size):
            w[i, int(self.rng.integers(cod.size))] = 1.0
        return SubKernel(dom, cod, w)

    def predicate(self, obj: FinObject) -> SubKernel:
        return SubKernel(obj, UNIT, self.rng.random((obj.size, 1)))


def _dmax(a: SubKernel, b: SubKernel) -> float:
    if a.dom != b.dom or a.cod != b.cod:
        raise K.CompositionError(f"law compared {a} with {b}")
    return float(np.abs(a.weights - b.weights).max())


def _result(name: str, errs: list[float], ctx: LawContext, note: str = "",
            failures: int = 0, cases: int | None = None) -> LawResult:
    worst = max(errs) if errs else 0.0
    return LawResult(name, failures == 0 and worst <= ctx.tol,
                     ctx.cases if cases is None else cases, worst, note)


def _draw(ctx: LawContext, contribute) -> int:
    """Call ``contribute`` until it reports ``ctx.cases`` usable instances.

    Guards, like positive predicted evidence, make some draws vacuous; the
    attempt cap keeps pathological generators from spinning forever.
    """
    contributed = 0
    attempts = 0
    while contributed < ctx.cases and attempts < 6 * ctx.cases:
        attempts += 1
        if contribute():
            contributed += 1
    return contributed


# --- structural laws -----------------------------------------------------

def law_comonoid(ctx: LawContext) -> LawResult:
    """Coassociativity, counitality and cocommutativity of copy/discard."""
    errs = []
    for _ in range(ctx.cases):
        x = ctx.obj()
        if ctx.rng.random() < 0.3:
            x = x.tensor(ctx.obj(max_size=3))
        cp, ident = K.copy(x), K.identity(x)
        errs.append(_dmax(K.compose(cp, K.tensor(cp, ident)),
                          K.compose(cp, K.tensor(ident, cp))))
        errs.append(_dmax(K.compose(cp, K.tensor(K.discard(x), ident)), ident))
        errs.append(_dmax(K.compose(cp, K.tensor(ident, K.discard(x))), ident))
        errs.append(_dmax(K.compose(cp, K.swap(x, x)), cp))
    return _result("comonoid", errs, ctx)


def law_tensor_coherence(ctx: LawContext) -> LawResult:
    """copy and discard on a tensor decompose into the factors' structure."""
    errs = []
    for _ in range(ctx.cases):
        x, y = ctx.obj(), ctx.obj()
        lhs = K.copy(x.tensor(y))
        rhs = K.compose(
            K.tensor(K.copy(x), K.copy(y)),
            K.tensor(K.tensor(K.identity(x), K.swap(x, y)), K.identity(y)),
        )
        errs.append(_dmax(lhs, rhs))
        errs.append(_dmax(K.discard(x.tensor(y)),
                          K.tensor(K.discard(x), K.discard(y))))
    return _result("tensor-coherence", errs, ctx)


def law_comparator_frobenius(ctx: LawContext) -> LawResult:
    """The comparator is a commutative special Frobenius multiplication."""
    errs = []
    cases = 0

    def check(x: FinObject) -> None:
        mu, ident = K.compare(x), K.identity(x)
        errs.append(_dmax(K.compose(K.swap(x, x), mu), mu))
        errs.append(_dmax(K.compose(K.tensor(mu, ident), mu),
                          K.compose(K.tensor(ident, mu), mu)))
        errs.append(_dmax(K.compose(K.copy(x), mu), ident))
        frob_mid = K.compose(mu, K.copy(x))
        errs.append(_dmax(
            K.compose(K.tensor(ident, K.copy(x)), K.tensor(mu, ident)), frob_mid))
        errs.append(_dmax(
            K.compose(K.tensor(K.copy(x), ident), K.tensor(ident, mu)), frob_mid))

    for size in range(1, 6):
        check(FinObject((Atom(f"F{size}", tuple(f"v{i}" for i in range(size))),)))
        cases += 1
    for _ in range(ctx.cases):
        x = ctx.obj()
        if ctx.rng.random() < 0.25:
            x = x.tensor(ctx.obj(max_size=2))
        check(x)
        cases += 1
    return _result("comparator-frobenius", errs, ctx,
                   note="enumerated sizes 1..5 plus random objects", cases=cases)


def law_cond_comp_associative(ctx: LawContext) -> LawResult:
    """Conditional composition is associative and unital."""
    errs = []
    for _ in range(ctx.cases):
        x, a, b, c = (ctx.obj(3) for _ in range(4))
        f = ctx.kernel(x, a)
        g = ctx.kernel(x.tensor(a), b)
        h = ctx.kernel(x.tensor(a).tensor(b), c)
        errs.append(_dmax(K.cond_comp(K.cond_comp(f, g), h),
                          K.cond_comp(f, K.cond_comp(g, h))))
        errs.append(_dmax(K.cond_comp(f, K.discard(x.tensor(a))), f))
        right = ctx.kernel(x, b)
        errs.append(_dmax(K.cond_comp(K.discard(x), right), right))
    return _result("cond-comp-associative", errs, ctx)


def law_graph_project(ctx: LawContext) -> LawResult:
    """graph is a section of the second projection, but not a retraction."""
    errs = []
    witnessed = False
    for _ in range(ctx.cases):
        x, y = ctx.obj(), ctx.obj()
        f = ctx.kernel(x, y)
        errs.append(_dmax(K.project(K.graph(f), 2, split=len(x.factors)), f))
        errs.append(_dmax(K.graph(K.identity(x)), K.copy(x)))
        joint = ctx.kernel(x, x.tensor(y))
        regraphed = K.graph(K.project(joint, 2, split=len(x.factors)))
        if _dmax(regraphed, joint) > ctx.tol:
            witnessed = True
    return _result("graph-project", errs, ctx,
                   note="retraction failure witnessed" if witnessed else "",
                   failures=0 if witnessed else 1)


def law_deterministic_domains(ctx: LawContext) -> LawResult:
    """Deterministic morphisms (structural and random Dirac) have
    deterministic domains."""
    failures = 0
    for _ in range(ctx.cases):
        x, y = ctx.obj(), ctx.obj()
        candidates = [
            K.copy(x), K.discard(x), K.swap(x, y), K.identity(x),
            K.compare(x), ctx.dirac_kernel(x, y),
        ]
        for f in candidates:
            if not K.is_deterministic(f, ctx.tol):
                failures += 1
            if not K.has_deterministic_domain(f, ctx.tol):
                failures += 1
    return _result("deterministic-have-deterministic-domains",
                   [0.0] * ctx.cases, ctx, failures=failures)


# --- inference laws ------------------------------------------------------

def law_conditional_factorization(ctx: LawContext) -> LawResult:
    """A morphism into a tensor factors through its marginal and conditional."""
    errs = []
    for _ in range(ctx.cases):
        x, y, z = ctx.obj(), ctx.obj(), ctx.obj()
        f = ctx.kernel(x, y.tensor(z))
        c = I.conditional(f, split=len(y.factors))
        errs.append(_dmax(K.cond_comp(K.project(f, 1, len(y.factors)), c), f))
    return _result("conditional-factorization", errs, ctx)


def law_conditional_almost_surely_total(ctx: LawContext) -> LawResult:
    """Conditionals discard like the marginal does; with uniform fill they
    are literally total."""
    errs = []
    failures = 0
    for _ in range(ctx.cases):
        x, y, z = ctx.obj(), ctx.obj(), ctx.obj()
        f = ctx.kernel(x, y.tensor(z))
        marg = K.project(f, 1, len(y.factors))
        c = I.conditional(f, split=len(y.factors))
        g1 = K.compose(K.swap(y, x), K.compose(c, K.discard(z)))
        g2 = K.discard(y.tensor(x))
        if not K.as_equal(marg, g1, g2, ctx.tol):
            failures += 1
        if not K.is_total(c, ctx.tol):
            failures += 1
        errs.append(0.0)
    return _result("conditional-almost-surely-total", errs, ctx, failures=failures)


def law_bayes_inversion_identity(ctx: LawContext) -> LawResult:
    """p(x) g(y|x) = (p;g)(y) * posterior(x|y) on positive-evidence outputs."""
    errs = []

    def contribute() -> bool:
        x, y = ctx.obj(), ctx.obj()
        g = ctx.kernel(x, y)
        p = ctx.state(x)
        inv = I.bayes_invert(g, p)
        predicted = K.compose(p, g).weights[0]
        joint = p.weights[0][:, None] * g.weights  # (x, y)
        recon = predicted[:, None] * inv.weights   # (y, x)
        mask = predicted > ZERO
        if not mask.any():
            return False
        errs.append(float(np.abs(joint.T[mask] - recon[mask]).max()))
        return True

    return _result("bayes-inversion-identity", errs, ctx, cases=_draw(ctx, contribute))


def law_inversion_of_composite(ctx: LawContext) -> LawResult:
    """Inverting f;g equals inverting g then f, on predicted outputs."""
    errs = []

    def contribute() -> bool:
        x, y, z = ctx.obj(), ctx.obj(), ctx.obj()
        p = ctx.state(x)
        f = ctx.kernel(x, y)
        g = ctx.kernel(y, z)
        predicted = K.compose(p, f, g).weights[0]
        mask = predicted > ZERO
        if not mask.any():
            return False
        lhs = I.bayes_invert(K.compose(f, g), p)
        rhs = K.compose(I.bayes_invert(g, K.compose(p, f)), I.bayes_invert(f, p))
        errs.append(float(np.abs(lhs.weights[mask] - rhs.weights[mask]).max()))
        return True

    return _result("inversion-of-composite", errs, ctx, cases=_draw(ctx, contribute))


def law_conditional_of_composite(ctx: LawContext) -> LawResult:
    """The conditional of f;g via the pointwise inversion of g's marginal."""
    errs = []

    def contribute() -> bool:
        x, y = ctx.obj(3), ctx.obj(3)
        z, w_ = ctx.obj(3), ctx.obj(3)
        f = ctx.kernel(x, y)
        g = ctx.kernel(y, z.tensor(w_))
        composite = K.compose(f, g)
        marg_mass = composite.weights.reshape(x.size, z.size, w_.size).sum(axis=2)
        mask = (marg_mass > ZERO).reshape(-1)
        if not mask.any():
            return False
        cond = I.conditional(composite, split=len(z.factors))
        g_marg = K.project(g, 1, len(z.factors))
        c_g = I.conditional(g, split=len(z.factors))  # Y*Z -> W
        nz = z.size
        built = np.zeros_like(cond.weights)
        for ix in range(x.size):
            prior_row = f.weights[ix]
            for iz in range(nz):
                post = prior_row * g_marg.weights[:, iz]
                mass = post.sum()
                if mass > ZERO:
                    post = post / mass
                else:
                    post = np.full(y.size, 1.0 / y.size)
                rows = c_g.weights.reshape(y.size, nz, w_.size)[:, iz, :]
                built[ix * nz + iz] = post @ rows
        errs.append(float(np.abs(built[mask] - cond.weights[mask]).max()))
        return True

    return _result("conditional-of-composite", errs, ctx, cases=_draw(ctx, contribute))


def law_normalisation(ctx: LawContext) -> LawResult:
    """f = (f;discard) cond_comp n(f), and normalising twice changes nothing."""
    errs = []
    failures = 0
    for _ in range(ctx.cases):
        x, y = ctx.obj(), ctx.obj()
        f = ctx.kernel(x, y)
        n = I.normalize(f)
        errs.append(_dmax(K.cond_comp(K.domain_of_definition(f), n), f))
        again = I.normalize(n)
        if not np.array_equal(again.weights, n.weights):
            failures += 1
    return _result("normalisation", errs, ctx, failures=failures,
                   note="idempotence is exact")


def law_normalisation_precompose(ctx: LawContext) -> LawResult:
    """n(f;g) = n(n(f);g) on inputs where f succeeds with positive mass."""
    errs = []

    def contribute() -> bool:
        x, y, z = ctx.obj(), ctx.obj(), ctx.obj()
        f = ctx.kernel(x, y)
        g = ctx.kernel(y, z)
        mask = f.row_sums() > ZERO
        if not mask.any():
            return False
        lhs = I.normalize(K.compose(f, g))
        rhs = I.normalize(K.compose(I.normalize(f), g))
        errs.append(float(np.abs(lhs.weights[mask] - rhs.weights[mask]).max()))
        return True

    return _result("normalisation-precompose", errs, ctx, cases=_draw(ctx, contribute))


def law_conditionals_of_normalisation(ctx: LawContext) -> LawResult:
    """A conditional of n(f) is a conditional of f."""
    errs = []
    for _ in range(ctx.cases):
        x, y, z = ctx.obj(), ctx.obj(), ctx.obj()
        f = ctx.kernel(x, y.tensor(z))
        c = I.conditional(I.normalize(f), split=len(y.factors))
        errs.append(_dmax(K.cond_comp(K.project(f, 1, len(y.factors)), c), f))
    return _result("conditionals-of-normalisation", errs, ctx)


def law_deterministic_domain_characterisation(ctx: LawContext) -> LawResult:
    """f has a deterministic domain iff f = (f;discard) cond_comp f."""
    failures = 0
    errs = []
    for _ in range(ctx.cases):
        x, y = ctx.obj(), ctx.obj()
        crisp = ctx.rng.random() < 0.5
        if crisp:
            rows = np.vstack([
                ctx.row(y.size, "total") if ctx.rng.random() < 0.7 else np.zeros(y.size)
                for _ in range(x.size)
            ])
        else:
            rows = np.vstack([0.6 * ctx.row(y.size, "total") for _ in range(x.size)])
        f = SubKernel(x, y, rows)
        own = _dmax(K.cond_comp(K.domain_of_definition(f), f), f)
        holds = own <= ctx.tol
        if holds != K.has_deterministic_domain(f, ctx.tol):
            failures += 1
        if crisp and not holds:
            failures += 1
        if not crisp and holds:
            failures += 1
        errs.append(own if crisp else 0.0)
    return _result("deterministic-domain-characterisation", errs, ctx,
                   failures=failures, note="both directions")


def law_factor_through_deterministic_domain(ctx: LawContext) -> LawResult:
    """If f = m cond_comp c with c of deterministic domain, the marginal of f
    can replace m."""
    errs = []
    for _ in range(ctx.cases):
        x, a, b = ctx.obj(3), ctx.obj(3), ctx.obj(3)
        m = ctx.kernel(x, a)
        rows = np.vstack([
            ctx.row(b.size, "total") if ctx.rng.random() < 0.7 else np.zeros(b.size)
            for _ in range(x.size * a.size)
        ])
        c = SubKernel(x.tensor(a), b, rows)
        f = K.cond_comp(m, c)
        errs.append(_dmax(K.cond_comp(K.project(f, 1, len(a.factors)), c), f))
    return _result("factor-through-deterministic-domain", errs, ctx)


def law_bayes_theorem_scalar(ctx: LawContext) -> LawResult:
    """Observing deterministic evidence equals the inversion row scaled by the
    predicted evidence probability."""
    errs = []
    for _ in range(ctx.cases):
        x, y = ctx.obj(), ctx.obj()
        p = ctx.state(x)
        f = ctx.kernel(x, y)
        inv = I.bayes_invert(f, p)
        predicted = K.compose(p, f).weights[0]
        for iy, ylab in enumerate(y.labels):
            if predicted[iy] <= ZERO:
                continue
            observed = I.pearl_update(p, f, K.observe(y, ylab), renorm=False)
            errs.append(float(np.abs(
                observed.weights[0] - predicted[iy] * inv.weights[iy]).max()))
    return _result("bayes-theorem-scalar", errs, ctx)


def law_pearl_jeffrey_deterministic(ctx: LawContext) -> LawResult:
    """Pearl's and Jeffrey's updates coincide on deterministic evidence."""
    errs = []

    def contribute() -> bool:
        x, y = ctx.obj(), ctx.obj()
        p = ctx.state(x)
        f = ctx.kernel(x, y)
        iy = int(ctx.rng.integers(y.size))
        ylab = y.labels[iy]
        if K.compose(p, f).weights[0, iy] <= ZERO:
            return False
        pearl = I.pearl_update(p, f, K.observe(y, ylab), renorm=True)
        jeffrey = I.jeffrey_update(p, f, K.dirac(y, ylab))
        errs.append(_dmax(pearl, jeffrey))
        return True

    return _result("pearl-jeffrey-deterministic", errs, ctx, cases=_draw(ctx, contribute))


def law_pearl_validity_increase(ctx: LawContext) -> LawResult:
    """A renormalised Pearl update never decreases the validity of its own
    evidence."""
    errs = []
    failures = [0]

    def contribute() -> bool:
        x, y = ctx.obj(), ctx.obj()
        p = ctx.state(x)
        f = ctx.kernel(x, y)
        q = ctx.predicate(y)
        before = I.validity(p, f, q)
        if before <= 1e-6:
            return False
        updated = I.pearl_update(p, f, q, renorm=True)
        after = I.validity(updated, f, q)
        if after < before - ctx.tol:
            failures[0] += 1
        errs.append(max(0.0, before - after))
        return True

    cases = _draw(ctx, contribute)
    return _result("pearl-validity-increase", errs, ctx, failures=failures[0],
                   cases=cases)


# --- maybe-monad laws ----------------------------------------------------

def law_oplaxator_splits_laxator(ctx: LawContext) -> LawResult:
    """s ; l = id, enumerated over all pairs of sizes up to 4."""
    errs = []
    cases = 0
    for nx in range(1, 5):
        for ny in range(1, 5):
            x = FinObject((Atom(f"X{nx}", tuple(f"x{i}" for i in range(nx))),))
            y = FinObject((Atom(f"Y{ny}", tuple(f"y{i}" for i in range(ny))),))
            round_trip = M.t_compose(M.oplaxator(x, y), M.laxator(x, y))
            ident = K.identity(M.pointed(x.tensor(y)))
            errs.append(_dmax(round_trip.as_sub(), ident))
            cases += 1
    res = _result("oplaxator-splits-laxator", errs, ctx)
    res.cases = cases
    res.note = "enumerated |X|,|Y| <= 4"
    return res


def law_oplaxator_preserves_copy(ctx: LawContext) -> LawResult:
    """Lifting copy and then splitting equals copying the pointed object."""
    errs = []
    cases = 0
    for n in range(1, 5):
        x = FinObject((Atom(f"C{n}", tuple(f"x{i}" for i in range(n))),))
        via = M.t_compose(lifted_copy_total(x), M.oplaxator(x, x))
        direct = M.t_copy(M.pointed(x))
        errs.append(_dmax(via.as_sub(), direct.as_sub()))
        cases += 1
    res = _result("oplaxator-preserves-copy", errs, ctx)
    res.cases = cases
    res.note = "enumerated |X| <= 4"
    return res


def lifted_copy_total(x: FinObject) -> M.TotalKernel:
    """The maybe-functor image of copy: payloads copy, failure stays failure."""
    dom = M.pointed(x)
    cod = M.pointed(x.tensor(x))
    w = np.zeros((dom.size, cod.size))
    for i in range(x.size):
        w[i, i * x.size + i] = 1.0
    w[x.size, cod.size - 1] = 1.0
    return M.TotalKernel(dom, cod, w)


def law_kleisli_cond_comp(ctx: LawContext) -> LawResult:
    """Substochastic conditional composition equals the base-category one on
    extended arguments, followed by the laxator."""
    errs = []
    for _ in range(ctx.cases):
        x, y, z = ctx.obj(3), ctx.obj(3), ctx.obj(3)
        f = ctx.kernel(x, y)
        g = ctx.kernel(x.tensor(y), z)
        lhs = M.to_total(K.cond_comp(f, g))
        extended = M.to_total(M.strong_kleisli_extend(g, split=len(x.factors)))
        rhs = M.t_compose(M.t_cond_comp(M.to_total(f), extended),
                          M.laxator(y, z))
        errs.append(_dmax(lhs.as_sub(), rhs.as_sub()))
    return _result("kleisli-cond-comp", errs, ctx)


def law_split_conditional(ctx: LawContext) -> LawResult:
    """Replacing a conditional by the extension of its restriction is invisible
    after the laxator, for any first leg."""
    errs = []
    for _ in range(ctx.cases):
        x, y, z = ctx.obj(3), ctx.obj(3), ctx.obj(3)
        f = ctx.kernel(x, y)
        big = ctx.kernel(x.tensor(M.pointed(y)), z)
        h = M.split_conditional(big)
        hstar = M.strong_kleisli_extend(h, split=len(x.factors))
        lax = M.laxator(y, z)
        lhs = M.t_compose(M.t_cond_comp(M.to_total(f), M.to_total(big)), lax)
        rhs = M.t_compose(M.t_cond_comp(M.to_total(f), M.to_total(hstar)), lax)
        errs.append(_dmax(lhs.as_sub(), rhs.as_sub()))
        errs.append(_dmax(M.split_conditional(hstar), h))
    return _result("split-conditional", errs, ctx)


def law_conditional_route_equivalence(ctx: LawContext) -> LawResult:
    """The direct conditional and the base-category route agree on pairs with
    positive marginal mass."""
    errs = []

    def contribute() -> bool:
        x, y, z = ctx.obj(), ctx.obj(), ctx.obj()
        f = ctx.kernel(x, y.tensor(z))
        masses = f.weights.reshape(x.size, y.size, z.size).sum(axis=2).reshape(-1)
        mask = masses > ZERO
        if not mask.any():
            return False
        direct = I.conditional(f, split=len(y.factors))
        via_base = M.conditional_via_base(f, split=len(y.factors))
        errs.append(float(np.abs(
            direct.weights[mask] - via_base.weights[mask]).max()))
        errs.append(_dmax(K.cond_comp(K.project(f, 1, len(y.factors)), via_base), f))
        return True

    return _result("conditional-route-equivalence", errs, ctx,
                   cases=_draw(ctx, contribute))


# --- diagram and normal-form laws ---------------------------------------

def law_observation_axiom(ctx: LawContext) -> LawResult:
    """Observing a value then running f equals observing it and feeding the
    value to f."""
    errs = []
    for _ in range(ctx.cases):
        x, b = ctx.obj(), ctx.obj()
        lab = x.labels[int(ctx.rng.integers(x.size))]
        obs = K.observe(x, lab)
        point = K.dirac(x, lab)
        errs.append(_dmax(K.cond_comp(obs, K.identity(x)),
                          K.compose(obs, point)))
        f = ctx.kernel(x, b)
        errs.append(_dmax(K.cond_comp(obs, f), K.compose(obs, point, f)))
    return _result("observation-axiom", errs, ctx)


TERM_ATOMS = (
    Atom("A", ("a0", "a1")),
    Atom("B", ("b0", "b1", "b2")),
    Atom("C", ("c0", "c1", "c2", "c3")),
)
MAX_LABELS = 64


def random_markov_term(
    rng: np.random.Generator,
    depth: int = 6,
    observe_budget: int = 3,
) -> tuple[D.Term, D.Model]:
    """A random typed term over total generators, wiring and observations."""
    model = D.Model()
    for atom in TERM_ATOMS:
        model.objects[atom.name] = FinObject((atom,))
    counter = itertools.count()
    budget = [observe_budget]

    def random_cod() -> FinObject:
        k = 1 if rng.random() < 0.8 else 2
        return FinObject(tuple(
            TERM_ATOMS[int(rng.integers(len(TERM_ATOMS)))] for _ in range(k)))

    def fresh_gen(dom: FinObject, cod: FinObject) -> D.Term:
        name = f"g{next(counter)}"
        rows = np.vstack([rng.dirichlet(np.ones(cod.size)) for _ in range(dom.size)])
        model.kernels[name] = SubKernel(dom, cod, rows)
        return D.Gen(name)

    def leaf(dom: FinObject) -> D.Term:
        options = ["gen", "gen", "id", "discard"]
        if dom.size ** 2 <= MAX_LABELS:
            options.append("copy")
        if len(dom.factors) >= 2:
            options.append("swap")
        if budget[0] > 0 and dom.size > 1:
            options.append("observe")
        pick = options[int(rng.integers(len(options)))]
        if pick == "gen":
            return fresh_gen(dom, random_cod())
        if pick == "id":
            return D.Id(dom)
        if pick == "discard":
            return D.Discard(dom)
        if pick == "copy":
            return D.Copy(dom)
        if pick == "swap":
            cut = int(rng.integers(1, len(dom.factors)))
            left, right = dom.split(cut)
            return D.Swap(left, right)
        budget[0] -= 1
        return D.Observe(dom, dom.labels[int(rng.integers(dom.size))])

    def build(dom: FinObject, depth_left: int) -> D.Term:
        if depth_left <= 0 or rng.random() < 0.2:
            return leaf(dom)
        if rng.random() < 0.6 or not dom.factors:
            first = build(dom, depth_left - 1)
            mid = D.typecheck(first, model)[1]
            if mid.size > MAX_LABELS:
                return first
            return D.Seq(first, build(mid, depth_left - 1))
        cut = int(rng.integers(0, len(dom.factors) + 1))
        left_obj, right_obj = dom.split(cut)
        left = build(left_obj, depth_left - 1)
        right = build(right_obj, depth_left - 1)
        _, cod_l = D.typecheck(left, model)
        _, cod_r = D.typecheck(right, model)
        if cod_l.size * cod_r.size > MAX_LABELS:
            return leaf(dom)
        return D.Par(left, right)

    root_dom = FinObject((TERM_ATOMS[int(rng.integers(len(TERM_ATOMS)))],))
    if rng.random() < 0.3:
        root_dom = UNIT
    return build(root_dom, depth), model


def law_normal_form_soundness(ctx: LawContext, depth: int = 6) -> LawResult:
    """Folding a term to normal form preserves its denotation, and the result
    channel normalises it."""
    errs = []
    for _ in range(ctx.cases):
        term, model = random_markov_term(ctx.rng, depth=depth)
        direct = D.evaluate(term, model)
        nf = exactnf.from_term(term, model)
        errs.append(_dmax(nf.denote(), direct))
        normalised = I.normalize(direct)
        mask = nf.success_mass() > ZERO
        if mask.any():
            errs.append(float(np.abs(
                nf.normalization().weights[mask] - normalised.weights[mask]).max()))
    return _result("normal-form-soundness", errs, ctx, note=f"depth <= {depth}")


# --- model-supplied kernels ----------------------------------------------

def law_model_kernels(ctx: LawContext) -> LawResult:
    """Spot-check laws directly on kernels declared in a model file."""
    errs = []
    for f in ctx.extra_kernels:
        n = I.normalize(f)
        errs.append(_dmax(K.cond_comp(K.domain_of_definition(f), n), f))
        crisp = K.has_deterministic_domain(f, ctx.tol)
        own = _dmax(K.cond_comp(K.domain_of_definition(f), f), f) <= ctx.tol
        if crisp != own:
            return _result("model-kernels", errs, ctx, failures=1)
        if len(f.cod.factors) >= 2:
            c = I.conditional(f, split=1)
            errs.append(_dmax(K.cond_comp(K.project(f, 1, 1), c), f))
    res = _result("model-kernels", errs, ctx)
    res.cases = len(ctx.extra_kernels)
    return res


ACCEPTANCE_LAWS = [
    law_comonoid,
    law_comparator_frobenius,
    law_conditional_factorization,
    law_bayes_inversion_identity,
    law_normalisation,
    law_deterministic_domain_characterisation,
    law_inversion_of_composite,
    law_conditional_of_composite,
    law_normalisation_precompose,
    law_conditionals_of_normalisation,
    law_bayes_theorem_scalar,
    law_pearl_jeffrey_deterministic,
]

ALL_LAWS = ACCEPTANCE_LAWS + [
    law_tensor_coherence,
    law_cond_comp_associative,
    law_graph_project,
    law_deterministic_domains,
    law_conditional_almost_surely_total,
    law_factor_through_deterministic_domain,
    law_pearl_validity_increase,
    law_oplaxator_splits_laxator,
    law_oplaxator_preserves_copy,
    law_kleisli_cond_comp,
    law_split_conditional,
    law_conditional_route_equivalence,
    law_observation_axiom,
    law_normal_form_soundness,
]


def run_all(
    seed: int = 0,
    cases: int = 200,
    tol: float = LAW_TOL,
    model: D.Model | None = None,
) -> list[LawResult]:
    """Run every law suite with a fresh generator per law (stable under
    reordering); model objects and kernels, when given, join the pools."""
    extra_objects: list[FinObject] = []
    extra_kernels: list[SubKernel] = []
    if model is not None:
        extra_objects = [o for o in model.objects.values() if o.size <= 6]
        extra_kernels = list(model.kernels.values()) + list(model.states.values())
    results = []
    for law_index, law in enumerate(ALL_LAWS):
        ctx = LawContext(
            rng=np.random.default_rng((seed, law_index)),
            cases=cases,
            tol=tol,
            extra_objects=extra_objects,
            extra_kernels=extra_kernels,
        )
        results.append(law(ctx))
    if extra_kernels:
        ctx = LawContext(rng=np.random.default_rng((seed, len(ALL_LAWS))),
                         cases=cases, tol=tol, extra_kernels=extra_kernels)
        results.append(law_model_kernels(ctx))
    return results
