import math
import os

import pytest

import hyperpot as hp

REPO = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))


def test_version():
    assert hp.__version__ == "0.1.0"


def test_graph_basics():
    g = hp.MetricGraph(3, [(0, 1, 1.0), (1, 2, 2.0)])
    assert g.vertex_count() == 3
    assert g.distance(0, 2) == pytest.approx(3.0)
    assert g.geodesic(0, 2) == [0, 1, 2]
    with pytest.raises(ValueError):
        hp.MetricGraph(2, [])  # disconnected


def test_tree_is_zero_hyperbolic():
    g = hp.regular_tree(3, 6)
    assert hp.delta_four_point_sampled(g, 20000, seed=1) == 0.0
    base = 0
    x, y = g.vertex_count() - 1, g.vertex_count() - 2
    assert hp.gromov_product(g, x, y, base) == pytest.approx(
        hp.gromov_product(g, y, x, base)
    )


def test_interval_green_closed_form():
    n = 10
    op = hp.laplacian(hp.path_graph(n + 2))
    solver = hp.DirichletSolver(op, list(range(1, n + 1)))
    pole = 4
    col = solver.green_column(pole)
    for i in range(1, n + 1):
        want = min(i, pole) * (n + 1 - max(i, pole)) / (n + 1)
        assert col[i] == pytest.approx(want, abs=1e-12)


def test_resolvent_identity():
    g = hp.regular_tree(3, 4)
    op = hp.schrodinger(g, [0.1] * g.vertex_count())
    dom = g.ball(0, 3)
    chk = hp.check_resolvent_equation(op, dom, 0.05, 0.02)
    assert chk.positive and chk.monotone
    assert chk.equation_residual < 1e-10


def test_martin_kernel_normalization():
    g = hp.regular_tree(3, 5)
    op = hp.schrodinger(g, [0.1] * g.vertex_count())
    dom = list(range(g.vertex_count()))
    leaf = next(v for v in range(g.vertex_count()) if g.degree(v) == 1 and v != 0)
    ker = hp.martin_kernel(op, dom, leaf, 0)
    assert ker.values[0] == pytest.approx(1.0)
    assert min(ker.values[v] for v in dom) > 0.0


def test_unfolding_round_trip():
    ds = hp.sample_domain("disc", 0.2)
    assert len(ds.points) == len(ds.dj) == ds.base.vertex_count()
    op = hp.dirichlet_operator(ds)
    c = hp.hardy_constant(op, ds)
    assert c > 0.0
    tc = hp.transfer_check(ds, 3.0)
    assert tc.harmonic_residual < 1e-9


def test_graph_file_round_trip(tmp_path):
    g = hp.regular_tree(2, 3)
    path = str(tmp_path / "tree.grf")
    hp.save_graph(g, path)
    back = hp.load_graph(path)
    assert back.vertex_count() == g.vertex_count()
    assert back.distance(0, g.vertex_count() - 1) == pytest.approx(
        g.distance(0, g.vertex_count() - 1)
    )


def test_run_config_reports(tmp_path):
    cfg = hp.Config.parse_file(os.path.join(REPO, "configs", "tree3g.cfg"))
    rc, report = hp.run_config(cfg, seed=1, threads=1, out_dir=str(tmp_path))
    assert rc == 0
    assert os.path.isfile(report)
    with pytest.raises(hp.ConfigError):
        hp.run_config(hp.Config.parse_text("pipeline = nope\n"), out_dir=str(tmp_path))
