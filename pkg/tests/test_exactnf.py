"""Normal-form construction, composition and its normalisation reading."""
import numpy as np
import pytest

import pmcat as P
from pmcat import diagram as D
from pmcat import exactnf
from pmcat import inference as I
from pmcat import kernel as K
from pmcat import laws
from pmcat.exactnf import NormalForm


def test_of_total_denotes_itself(channel, coin):
    for f in (P.identity(coin), P.copy(coin), channel):
        nf = NormalForm.of_total(f)
        assert nf.denote().isclose(f, 0)
        assert nf.evidence_obj == K.UNIT
        assert np.allclose(nf.success_mass(), 1.0)


def test_of_total_rejects_subnormalized(coin, bit):
    with pytest.raises(P.ValidationError):
        NormalForm.of_total(P.SubKernel(coin, bit, [[0.3, 0.3], [1.0, 0.0]]))


def test_of_observe_denotation(coin):
    nf = NormalForm.of_observe(coin, "H")
    assert nf.denote().isclose(P.observe(coin, "H"), 0)
    assert nf.denote().at("H", ()) == 1.0
    assert nf.denote().at("T", ()) == 0.0
    with pytest.raises(P.ValidationError):
        NormalForm.of_observe(coin, "X")


def test_tensor_of_total_forms_is_total(channel, coin):
    nf = NormalForm.of_total(channel).tensor(NormalForm.of_total(P.identity(coin)))
    assert nf.denote().isclose(K.tensor(channel, P.identity(coin)), 1e-12)
    assert np.allclose(nf.success_mass(), 1.0)


def test_tensor_with_observation_multiplies_success(channel, coin):
    nf = NormalForm.of_observe(coin, "H").tensor(NormalForm.of_observe(coin, "T"))
    expected = K.tensor(P.observe(coin, "H"), P.observe(coin, "T"))
    assert nf.denote().isclose(expected, 0)
    dom = coin * coin
    assert nf.success_mass()[dom.index[("H", "T")]] == 1.0
    assert nf.success_mass()[dom.index[("H", "H")]] == 0.0


def test_tensor_denotation_matches_kernel_tensor(rng, coin, bit):
    f = P.SubKernel(coin, bit, rng.dirichlet(np.ones(2), 2))
    nf1 = NormalForm.of_total(f).then(NormalForm.of_observe(bit, "0"))
    nf2 = NormalForm.of_total(f)
    assert nf1.tensor(nf2).denote().isclose(
        K.tensor(nf1.denote(), nf2.denote()), 1e-12)


def test_compose_total_forms_is_plain_composition(rng, coin, bit):
    f = P.SubKernel(coin, bit, rng.dirichlet(np.ones(2), 2))
    g = P.SubKernel(bit, coin, rng.dirichlet(np.ones(2), 2))
    nf = NormalForm.of_total(f).then(NormalForm.of_total(g))
    assert nf.denote().isclose(K.compose(f, g), 1e-12)
    assert nf.evidence_obj == K.UNIT


def test_posterior_fixture_through_normal_form(prior, channel, coin, bit):
    model = D.Model(objects={"Coin": coin, "Bit": bit},
                    kernels={"f": channel}, states={"p": prior})
    term = D.Seq(D.Seq(D.Gen("p"), D.Copy(coin)),
                 D.Par(D.Id(coin), D.Seq(D.Gen("f"), D.Observe(bit, ("0",)))))
    nf = exactnf.from_term(term, model)
    assert nf.denote().isclose(P.state(coin, {"H": 0.45, "T": 0.10}), 1e-12)
    assert nf.normalization().as_sub().isclose(
        P.state(coin, {"H": 9 / 11, "T": 2 / 11}), 1e-12)
    assert nf.success_mass()[0] == pytest.approx(0.55)
    # the evaluator agrees with the denotation
    assert nf.denote().isclose(D.evaluate(term, model), 1e-12)


def test_nf_matches_bayes_inversion_at_point(prior, channel, coin, bit):
    model = D.Model(kernels={"f": channel}, states={"p": prior})
    term = D.Seq(D.Seq(D.Gen("p"), D.Copy(coin)),
                 D.Par(D.Id(coin), D.Seq(D.Gen("f"), D.Observe(bit, ("1",)))))
    nf = exactnf.from_term(term, model)
    inv = I.bayes_invert(channel, prior)
    assert np.allclose(nf.normalization().weights[0],
                       inv.weights[bit.index[("1",)]])


def test_chained_observations_multiply_success(prior, channel, coin, bit):
    model = D.Model(kernels={"f": channel}, states={"p": prior})
    # condition on output 0, then on the posterior coin being H
    inner = D.Seq(D.Seq(D.Gen("p"), D.Copy(coin)),
                  D.Par(D.Id(coin), D.Seq(D.Gen("f"), D.Observe(bit, ("0",)))))
    term = D.Seq(D.Seq(inner, D.Copy(coin)),
                 D.Par(D.Id(coin), D.Observe(coin, ("H",))))
    nf = exactnf.from_term(term, model)
    direct = D.evaluate(term, model)
    assert nf.denote().isclose(direct, 1e-12)
    assert direct.weights[0, coin.index[("H",)]] == pytest.approx(0.45)
    assert nf.normalization().as_sub().isclose(P.dirac(coin, "H"), 1e-12)


def test_non_total_generator_rejected(coin, bit):
    leaky = P.SubKernel(coin, bit, [[0.3, 0.3], [1.0, 0.0]])
    model = D.Model(kernels={"leaky": leaky})
    with pytest.raises(exactnf.NonTotalGeneratorError) as exc:
        exactnf.from_term(D.Gen("leaky"), model)
    assert "leaky" in str(exc.value)
    with pytest.raises(exactnf.NonTotalGeneratorError):
        exactnf.from_term(D.Compare(coin), model)


def test_term_without_observations_has_unit_evidence(rng):
    term, model = laws.random_markov_term(rng, depth=4, observe_budget=0)
    nf = exactnf.from_term(term, model)
    assert nf.evidence_obj == K.UNIT
    assert nf.denote().isclose(D.evaluate(term, model), 1e-12)


@pytest.mark.parametrize("seed", range(8))
def test_random_term_soundness(seed):
    rng = np.random.default_rng(seed)
    for _ in range(12):
        term, model = laws.random_markov_term(rng, depth=5)
        nf = exactnf.from_term(term, model)
        direct = D.evaluate(term, model)
        assert nf.denote().isclose(direct, 1e-9)
        normalised = I.normalize(direct)
        live = nf.success_mass() > 1e-12
        if live.any():
            assert np.abs(nf.normalization().weights[live]
                          - normalised.weights[live]).max() <= 1e-9


@pytest.mark.parametrize("seed", range(6))
def test_conditionals_through_normal_forms(seed):
    # conditioning the denoted kernel equals conditioning the total result
    # channel in the base category, wherever the conditioning mass is positive
    from pmcat import maybecat as M

    rng = np.random.default_rng(seed)
    base_term, model = laws.random_markov_term(rng, depth=4)
    cod = D.typecheck(base_term, model)[1]
    if cod.size ** 2 > 64:
        return
    term = D.Seq(base_term, D.Copy(cod))  # correlated two-part codomain
    nf = exactnf.from_term(term, model)
    denoted = nf.denote()
    split = len(cod.factors)
    direct = I.conditional(denoted, split=split)
    base = M.stoch_conditional(nf.normalization(), split=split)
    y_size = cod.size
    masses = denoted.weights.reshape(denoted.dom.size, y_size, -1).sum(axis=2)
    live = (masses > 1e-12).reshape(-1)
    if live.any():
        assert np.abs(direct.weights[live] - base.weights[live]).max() <= 1e-9


def test_all_observations_failing(coin):
    # a state pinned to T observed as H: zero denotation, total result channel
    model = D.Model(states={"t": P.dirac(coin, "T")})
    term = D.Seq(D.Seq(D.Gen("t"), D.Copy(coin)),
                 D.Par(D.Id(coin), D.Observe(coin, ("H",))))
    nf = exactnf.from_term(term, model)
    assert np.allclose(nf.denote().weights, 0.0)
    assert P.is_total(nf.normalization().as_sub())


def test_invariants_maintained_by_combinators(rng, coin, bit):
    f = P.SubKernel(coin, bit, rng.dirichlet(np.ones(2), 2))
    nf = NormalForm.of_total(f).then(NormalForm.of_observe(bit, "0"))
    nf = nf.tensor(NormalForm.of_observe(coin, "T"))
    assert P.is_total(nf.evidence.as_sub())
    assert P.is_total(nf.result.as_sub())
    assert nf.point in nf.evidence_obj.index
