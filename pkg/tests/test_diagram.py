"""Model-format parsing, term typechecking and sum-product evaluation."""
import numpy as np
import pytest

import pmcat as P
from pmcat import diagram as D
from pmcat import kernel as K

FIXTURE = """
# comments are ignored
object Coin = { H, T }
object Bit = { 0, 1 }
state p : Coin = { H: 0.5, T: 0.5 }
kernel f : Coin -> Bit = {
  H -> { 0: 0.9, 1: 0.1 },
  T -> { 0: 0.2, 1: 0.8 }
}
diagram prediction : I -> Bit = p ; f
diagram joint : I -> Coin * Bit = p ; copy[Coin] ; (id[Coin] * f)
"""


def test_parse_objects():
    m = D.parse("object Coin = { H, T }")
    assert m.objects["Coin"].labels == (("H",), ("T",))


def test_parse_subnormalized_kernel_accepted():
    m = D.parse("""
object X = { a, b }
kernel k : X -> X = { a -> { a: 0.3, b: 0.3 } }
""")
    k = m.kernels["k"]
    assert k.row_sums()[0] == pytest.approx(0.6)
    assert k.row_sums()[1] == 0.0  # omitted row is all-failure


def test_parse_overweight_row_rejected_with_position():
    text = "object X = { a, b }\nkernel k : X -> X = { a -> { a: 0.9, b: 0.4 } }"
    with pytest.raises(D.ParseError) as exc:
        D.parse(text)
    issue = exc.value.issues[0]
    assert issue.line == 2
    assert "row mass" in issue.message


def test_parse_duplicate_name():
    with pytest.raises(D.ParseError) as exc:
        D.parse("object X = { a }\nobject X = { b }")
    assert "duplicate" in str(exc.value)


def test_parse_unknown_reference():
    with pytest.raises(D.ParseError) as exc:
        D.parse("object X = { a }\ndiagram d : X -> X = mystery")
    assert "unknown name 'mystery'" in str(exc.value)


def test_parse_unknown_label_in_row():
    with pytest.raises(D.ParseError) as exc:
        D.parse("object X = { a }\nkernel k : X -> X = { q -> { a: 1.0 } }")
    assert "not a label" in str(exc.value)


def test_parse_recovers_and_reports_multiple_errors():
    text = """
object X = { a, a }
object Y = { u }
diagram d : Y -> Y = nonsense
"""
    with pytest.raises(D.ParseError) as exc:
        D.parse(text)
    assert len(exc.value.issues) == 2


def test_parse_reserved_word_rejected():
    with pytest.raises(D.ParseError):
        D.parse("object copy = { a }")


def test_declared_diagram_type_checked():
    text = """
object Coin = { H, T }
state p : Coin = { H: 1.0 }
diagram d : I -> I = p
"""
    with pytest.raises(D.ParseError) as exc:
        D.parse(text)
    assert "declared" in str(exc.value)


def test_typecheck_examples():
    m = D.parse(FIXTURE)
    coin, bit = m.objects["Coin"], m.objects["Bit"]
    term = D.Seq(D.Gen("p"), D.Copy(coin))
    assert D.typecheck(term, m) == (K.UNIT, coin * coin)
    assert D.typecheck(m.diagrams["prediction"], m) == (K.UNIT, bit)
    bad = D.Seq(D.Gen("f"), D.Gen("p"))
    with pytest.raises(D.DiagramTypeError) as exc:
        D.typecheck(bad, m)
    assert "Bit" in str(exc.value) and "I" in str(exc.value)


def test_observe_label_validated():
    m = D.parse(FIXTURE)
    with pytest.raises(P.ValidationError):
        D.Observe(m.objects["Bit"], ("2",))


def test_evaluate_identity(coin):
    model = D.Model(objects={"Coin": coin})
    assert D.evaluate(D.Id(coin), model).isclose(P.identity(coin), 0)


def test_evaluate_prediction_fixture():
    m = D.parse(FIXTURE)
    out = D.evaluate(m.diagrams["prediction"], m)
    assert np.allclose(out.weights, [[0.55, 0.45]])


def test_evaluate_fan_out_formula(rng):
    # two heads reading a shared intermediate wire: the evaluation equals
    # f(z1, z2 | x) = sum_y g(y|x) h1(z1|y) h2(z2|y)
    x = P.FinObject.atomic("X", ["x0", "x1"])
    y = P.FinObject.atomic("Y", ["y0", "y1", "y2"])
    z1 = P.FinObject.atomic("Z1", ["s", "t"])
    z2 = P.FinObject.atomic("Z2", ["u", "v"])
    g = P.SubKernel(x, y, rng.dirichlet(np.ones(3), 2))
    h1 = P.SubKernel(y, z1, rng.dirichlet(np.ones(2), 3))
    h2 = P.SubKernel(y, z2, rng.dirichlet(np.ones(2), 3))
    model = D.Model(objects={}, kernels={"g": g, "h1": h1, "h2": h2})
    term = D.Seq(D.Seq(D.Gen("g"), D.Copy(y)), D.Par(D.Gen("h1"), D.Gen("h2")))
    got = D.evaluate(term, model)
    expected = np.einsum("xy,ys,yu->xsu", g.weights, h1.weights, h2.weights)
    assert np.allclose(got.weights, expected.reshape(2, 4))


def test_evaluate_compared_state_formula(rng):
    # a state on the compared wire: f(z | x) = sum_y g(y|x) h(z|y) k(y)
    x = P.FinObject.atomic("X", ["x0", "x1"])
    y = P.FinObject.atomic("Y", ["y0", "y1", "y2"])
    z = P.FinObject.atomic("Z", ["s", "t"])
    g = P.SubKernel(x, y, rng.dirichlet(np.ones(3), 2))
    h = P.SubKernel(y, z, rng.dirichlet(np.ones(2), 3))
    k = P.SubKernel(K.UNIT, y, rng.dirichlet(np.ones(3), 1))
    model = D.Model(objects={}, kernels={"g": g, "h": h}, states={"k": k})
    term = D.Seq(D.Seq(D.Par(D.Gen("g"), D.Gen("k")), D.Compare(y)), D.Gen("h"))
    got = D.evaluate(term, model)
    expected = np.einsum("xy,yz,y->xz", g.weights, h.weights, k.weights[0])
    assert np.allclose(got.weights, expected)


def test_evaluate_is_functorial(rng, coin, bit):
    f = P.SubKernel(coin, bit, rng.dirichlet(np.ones(2), 2))
    g = P.SubKernel(bit, coin, rng.dirichlet(np.ones(2), 2))
    model = D.Model(kernels={"f": f, "g": g})
    assert D.evaluate(D.Seq(D.Gen("f"), D.Gen("g")), model).isclose(
        K.compose(f, g), 0)
    assert D.evaluate(D.Par(D.Gen("f"), D.Gen("g")), model).isclose(
        K.tensor(f, g), 0)


def test_observation_axiom_as_terms(rng, coin, bit):
    f = P.SubKernel(coin, bit, rng.dirichlet(np.ones(2), 2) * 0.8)
    model = D.Model(objects={"Coin": coin}, kernels={"f": f})
    obs = D.Observe(coin, ("H",))
    # observing then keeping the wire = observing then emitting the value
    lhs = D.evaluate(D.Seq(D.Copy(coin), D.Par(obs, D.Id(coin))), model)
    rhs_kernel = K.compose(P.observe(coin, "H"), P.dirac(coin, "H"))
    assert lhs.isclose(rhs_kernel, 1e-12)
    # generalised form: route the copied wire into any computation
    lhs_f = D.evaluate(D.Seq(D.Copy(coin), D.Par(obs, D.Gen("f"))), model)
    rhs_f = K.compose(P.observe(coin, "H"), P.dirac(coin, "H"), f)
    assert lhs_f.isclose(rhs_f, 1e-12)


def test_dirac_joint_evaluation_splits(coin, bit):
    h = P.deterministic(coin, coin * bit, {("H",): ("H", "0"), ("T",): ("T", "1")})
    model = D.Model(kernels={"h": h})
    term = D.Gen("h")
    joint = D.evaluate(term, model)
    left = K.project(joint, 1, 1)
    right = K.project(joint, 2, 1)
    rebuilt = K.compose(P.copy(coin), K.tensor(left, right))
    assert rebuilt.isclose(joint, 0)


def test_grammar_unit_label_extension():
    m = D.parse("""
object X = { a }
kernel s : I -> X = { () -> { a: 1.0 } }
""")
    assert m.kernels["s"].dom == K.UNIT


def test_parse_swap_and_nested_terms():
    m = D.parse("""
object A = { a0, a1 }
object B = { b0 }
diagram sw : A * B -> B * A = swap[A, B]
diagram back : A * B -> A * B = swap[A, B] ; swap[B, A]
""")
    a, b = m.objects["A"], m.objects["B"]
    assert D.evaluate(m.diagrams["sw"], m).isclose(K.swap(a, b), 0)
    assert D.evaluate(m.diagrams["back"], m).isclose(P.identity(a * b), 0)


def test_diagram_reference_inlining():
    m = D.parse("""
object Coin = { H, T }
state p : Coin = { H: 0.5, T: 0.5 }
diagram pair : I -> Coin * Coin = p ; copy[Coin]
diagram first : I -> Coin = pair ; (id[Coin] * discard[Coin])
""")
    out = D.evaluate(m.diagrams["first"], m)
    assert np.allclose(out.weights, [[0.5, 0.5]])
