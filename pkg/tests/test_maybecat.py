"""Total kernels, the failure-point construction, and base-category conditionals."""
import numpy as np
import pytest

import pmcat as P
from pmcat import inference as I
from pmcat import kernel as K
from pmcat import maybecat as M


def test_pointed_object_shape(coin):
    p = M.pointed(coin)
    assert p.size == coin.size + 1
    assert p.labels[-1] == (M.BOT,)
    assert M.base_of(p) == coin


def test_pointed_of_tensor(coin, bit):
    p = M.pointed(coin * bit)
    assert p.size == 5
    assert p.labels[0] == ("(H,0)",)


def test_total_kernel_validation(coin, bit):
    with pytest.raises(P.ValidationError):
        M.TotalKernel(coin, bit, [[0.5, 0.4], [0.5, 0.5]])


def test_to_total_assigns_failure_column(coin, bit):
    f = P.SubKernel(coin, bit, [[0.3, 0.3], [1.0, 0.0]])
    t = M.to_total(f)
    assert np.allclose(t.weights[:, -1], [0.4, 0.0])
    assert P.is_total(t.as_sub())


def test_total_roundtrip(rng, coin, bit):
    f = P.SubKernel(coin, bit, rng.dirichlet(np.ones(2), 2) * rng.uniform(0, 1, (2, 1)))
    assert M.from_total(M.to_total(f)).isclose(f, 0)


def test_total_channel_has_zero_failure_column(channel):
    assert np.allclose(M.to_total(channel).weights[:, -1], 0.0)


def test_laxator_values(coin, bit):
    lax = M.laxator(coin, bit)
    dom, cod = lax.dom, lax.cod
    assert lax.weights[dom.index[("H", "0")], cod.index[("(H,0)",)]] == 1.0
    assert lax.weights[dom.index[("H", M.BOT)], cod.index[(M.BOT,)]] == 1.0
    assert lax.weights[dom.index[(M.BOT, M.BOT)], cod.index[(M.BOT,)]] == 1.0
    assert P.is_deterministic(lax.as_sub())
    assert P.is_total(lax.as_sub())


def test_oplaxator_values(coin, bit):
    s = M.oplaxator(coin, bit)
    dom, cod = s.dom, s.cod
    assert s.weights[dom.index[("(T,1)",)], cod.index[("T", "1")]] == 1.0
    assert s.weights[dom.index[(M.BOT,)], cod.index[(M.BOT, M.BOT)]] == 1.0


def test_oplaxator_splits_laxator_enumerated():
    for nx in range(1, 5):
        for ny in range(1, 5):
            x = P.FinObject.atomic("X", [f"x{i}" for i in range(nx)])
            y = P.FinObject.atomic("Y", [f"y{i}" for i in range(ny)])
            rt = M.t_compose(M.oplaxator(x, y), M.laxator(x, y))
            assert rt.as_sub().isclose(P.identity(M.pointed(x * y)), 1e-12)


def test_distributive_law(coin):
    d = M.distributive_law(coin, P.state(coin, {"H": 0.3, "T": 0.7}))
    assert np.allclose(d.weights, [[0.3, 0.7, 0.0]])
    bot = M.distributive_law(coin, M.BOT)
    assert np.allclose(bot.weights, [[0.0, 0.0, 1.0]])
    point = M.distributive_law(coin, P.dirac(coin, "H"))
    assert np.allclose(point.weights, [[1.0, 0.0, 0.0]])
    with pytest.raises(P.ValidationError):
        M.distributive_law(coin, P.SubKernel(K.UNIT, coin, [[0.4, 0.0]]))


def test_strong_kleisli_extend(coin, bit, rng):
    g = P.SubKernel(coin * bit, coin, rng.dirichlet(np.ones(2), 4))
    ext = M.strong_kleisli_extend(g, split=1)
    assert ext.dom == coin * M.pointed(bit)
    live = [i for i, lab in enumerate(ext.dom.labels) if lab[-1] != M.BOT]
    dead = [i for i, lab in enumerate(ext.dom.labels) if lab[-1] == M.BOT]
    assert np.allclose(ext.weights[live], g.weights)
    assert np.allclose(ext.weights[dead], 0.0)
    assert np.allclose(ext.row_sums()[live], 1.0)


def test_split_conditional_section(coin, bit, rng):
    g = P.SubKernel(coin * bit, coin, rng.dirichlet(np.ones(2), 4) * 0.8)
    ext = M.strong_kleisli_extend(g, split=1)
    assert M.split_conditional(ext).isclose(g, 0)


def test_split_conditional_requires_pointed_domain(channel):
    with pytest.raises(P.ValidationError):
        M.split_conditional(channel)


def test_stoch_conditional_rows(coin, bit):
    h = M.TotalKernel(K.UNIT, coin * bit, [[0.2, 0.2, 0.6, 0.0]])
    c = M.stoch_conditional(h, split=1)
    assert np.allclose(c.weights, [[0.5, 0.5], [1.0, 0.0]])
    assert P.is_total(c.as_sub())


def test_conditional_via_base_matches_direct(rng):
    x = P.FinObject.atomic("X", ["a", "b", "c"])
    y = P.FinObject.atomic("Y", ["u", "v"])
    z = P.FinObject.atomic("Z", ["s", "t", "w"])
    for _ in range(25):
        mass = rng.uniform(0, 1, (3, 1))
        f = P.SubKernel(x, y * z, rng.dirichlet(np.ones(6), 3) * mass)
        direct = I.conditional(f, split=1)
        via = M.conditional_via_base(f, split=1)
        masses = f.weights.reshape(3, 2, 3).sum(axis=2).reshape(-1)
        live = masses > 1e-12
        assert np.abs(direct.weights[live] - via.weights[live]).max() <= 1e-12
        # factorization holds regardless of convention rows
        assert K.cond_comp(K.project(f, 1, 1), via).isclose(f, 1e-12)


def test_conditional_via_base_total_kernel(channel):
    joint = K.compose(channel, P.copy(channel.cod))
    direct = I.conditional(joint, split=1)
    via = M.conditional_via_base(joint, split=1)
    masses = joint.weights.reshape(2, 2, 2).sum(axis=2).reshape(-1)
    live = masses > 1e-12
    assert np.abs(direct.weights[live] - via.weights[live]).max() <= 1e-12


def test_conditional_via_base_all_fail(coin, bit):
    dead = P.SubKernel(coin, bit * bit, np.zeros((2, 4)))
    via = M.conditional_via_base(dead, split=1)
    assert K.cond_comp(K.project(dead, 1, 1), via).isclose(dead, 0)


def test_kleisli_extension_law(rng, coin, bit):
    f = P.SubKernel(coin, bit, rng.dirichlet(np.ones(2), 2) * 0.7)
    g = P.SubKernel(coin * bit, coin, rng.dirichlet(np.ones(2), 4) * 0.9)
    lhs = M.to_total(K.cond_comp(f, g))
    ext = M.to_total(M.strong_kleisli_extend(g, split=1))
    rhs = M.t_compose(M.t_cond_comp(M.to_total(f), ext), M.laxator(bit, coin))
    assert lhs.as_sub().isclose(rhs.as_sub(), 1e-12)
