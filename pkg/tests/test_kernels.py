import importlib
import itertools
import random

import pytest

from hybrix import _purekernels, kernels
from hybrix.algebra import all_baos, all_hybrid
from hybrix.corpus import equation_corpus
from hybrix.evaluation import Compiled

speedups = pytest.importorskip("hybrix._speedups")


def test_backend_reported():
    assert kernels.BACKEND in ("cython", "python")


def test_env_var_forces_fallback(monkeypatch):
    monkeypatch.setenv("HYBRIX_PURE_PYTHON", "1")
    mod = importlib.reload(kernels)
    try:
        assert mod.BACKEND == "python"
    finally:
        monkeypatch.delenv("HYBRIX_PURE_PYTHON")
        importlib.reload(kernels)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_diamond_tables_agree(k):
    for bao in all_baos(k):
        assert list(speedups.diamond_table(bao.on_atoms, k)) == list(_purekernels.diamond_table(bao.on_atoms, k))


def test_diamond_table_is_additive():
    for bao in all_baos(2):
        t = _purekernels.diamond_table(bao.on_atoms, 2)
        assert t[0] == 0
        for a, b in itertools.product(range(4), repeat=2):
            assert t[a | b] == t[a] | t[b]


def test_falsifier_search_agrees_on_corpus():
    eqs = equation_corpus()
    for h in all_hybrid(2):
        for eq in eqs:
            c = Compiled(h, [eq.lhs, eq.rhs])
            args = (c.programs[0], c.programs[1], c.domains(), list(h.bao.diamond_table), h.bao.top)
            assert speedups.find_falsifier(*args) == _purekernels.find_falsifier(*args)


def test_evaluate_agrees_on_random_inputs():
    rng = random.Random(0)
    eqs = equation_corpus()
    hs = list(all_hybrid(3))
    for _ in range(300):
        h = rng.choice(hs)
        eq = rng.choice(eqs)
        c = Compiled(h, [eq.lhs])
        vals = [rng.choice(d) for d in c.domains()]
        dt = list(h.bao.diamond_table)
        assert speedups.evaluate(c.programs[0], vals, dt, h.bao.top) == \
            _purekernels.evaluate(c.programs[0], vals, dt, h.bao.top)


def test_empty_domain_has_no_falsifier():
    prog = [kernels.OP_VAR, 0]
    for mod in (speedups, _purekernels):
        assert mod.find_falsifier(prog, [kernels.OP_BOT, 0], [[]], [0, 1], 1) is None


def test_explicit_at_table_opcode():
    # @_x a with an explicit table: row for x=1 on the one-atom algebra is the identity-valued row
    prog = [kernels.OP_CONST, 1, kernels.OP_VAR, 0, kernels.OP_SATT, 0]
    table = [0, 0, 0, 1]
    for mod in (speedups, _purekernels):
        assert mod.evaluate(prog, [1], [0, 1], 1, table) == 1
        assert mod.evaluate(prog, [0], [0, 1], 1, table) == 0
