"""The randomized law suites themselves, plus targeted edge fixtures."""
import numpy as np
import pytest

import pmcat as P
from pmcat import inference as I
from pmcat import kernel as K
from pmcat import laws


def small_ctx(seed=1, cases=40):
    return laws.LawContext(rng=np.random.default_rng(seed), cases=cases)


@pytest.mark.parametrize("law", laws.ALL_LAWS, ids=lambda f: f.__name__)
def test_each_law_passes_on_small_batches(law):
    result = law(small_ctx())
    assert result.passed, result.line()


def test_run_all_deterministic_under_seed():
    a = laws.run_all(seed=7, cases=15)
    b = laws.run_all(seed=7, cases=15)
    assert [(r.name, r.max_err) for r in a] == [(r.name, r.max_err) for r in b]
    c = laws.run_all(seed=8, cases=15)
    assert [(r.name, r.max_err) for r in a] != [(r.name, r.max_err) for r in c]


def test_run_all_with_model_material(coin, bit, channel, prior):
    from pmcat import diagram as D
    model = D.Model(objects={"Coin": coin, "Bit": bit},
                    kernels={"f": channel}, states={"p": prior})
    results = laws.run_all(seed=3, cases=10, model=model)
    names = [r.name for r in results]
    assert "model-kernels" in names
    assert all(r.passed for r in results)


def test_lemma_both_directions_on_crafted_kernels(coin, bit):
    crisp = P.SubKernel(coin, bit, [[0.5, 0.5], [0.0, 0.0]])
    fuzzy = P.SubKernel(coin, bit, [[0.3, 0.3], [0.0, 0.0]])
    own_crisp = K.cond_comp(P.domain_of_definition(crisp), crisp)
    own_fuzzy = K.cond_comp(P.domain_of_definition(fuzzy), fuzzy)
    assert own_crisp.isclose(crisp, 1e-12) and P.has_deterministic_domain(crisp)
    assert not own_fuzzy.isclose(fuzzy, 1e-9)
    assert not P.has_deterministic_domain(fuzzy)


def test_graph_retraction_witness(coin, bit):
    # a joint that is not the graph of its own marginal
    flip = P.deterministic(coin, coin, {("H",): ("T",), ("T",): ("H",)})
    joint = K.compose(P.copy(coin), K.tensor(flip, P.identity(coin)))
    regraphed = K.graph(K.project(joint, 2, split=1))
    assert not regraphed.isclose(joint, 1e-9)


def test_validity_increase_strict_on_informative_evidence(prior, channel, bit):
    q = P.observe(bit, "0")
    before = I.validity(prior, channel, q)
    after = I.validity(I.pearl_update(prior, channel, q, renorm=True), channel, q)
    assert after > before


def test_random_markov_term_reproducible():
    t1, m1 = laws.random_markov_term(np.random.default_rng(5), depth=5)
    t2, m2 = laws.random_markov_term(np.random.default_rng(5), depth=5)
    from pmcat import diagram as D
    assert D.evaluate(t1, m1).isclose(D.evaluate(t2, m2), 0)


def test_random_markov_terms_stay_small():
    rng = np.random.default_rng(11)
    from pmcat import diagram as D
    for _ in range(50):
        term, model = laws.random_markov_term(rng, depth=6)
        dom, cod = D.typecheck(term, model)
        assert dom.size <= laws.MAX_LABELS
        assert cod.size <= laws.MAX_LABELS ** 2
