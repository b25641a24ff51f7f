"""Acceptance suite: one test per criterion, run with -v for per-criterion
pass/fail lines. Budgeted search criteria use seeds pinned during
development; their NotFound outcomes are evidence at the stated budgets, not
proofs.
"""

import json
import math

import numpy as np
import pytest

from constellation_kit import cli
from constellation_kit.affine import (
    Signature,
    TABLE1_CELLS,
    AffineConstellation,
    complete_foliation_set,
    dominates,
    make_plane,
    materialize,
    signature_of,
    table1_constellation,
    verify_constellation,
    verify_plane_axioms,
)
from constellation_kit.latin import (
    certify_no_mates,
    certify_no_mols6,
    count_all_latin,
    enumerate_reduced_latin,
)
from constellation_kit.mub import (
    constellation_defect,
    fourier_basis,
    fourier_family6,
    hw_triple,
    make_basis,
    mu_defect,
    standard_basis,
    tao_basis,
    wf_complete_set,
)
from constellation_kit.search import (
    SearchConfig,
    _cost_grad,
    _cost_only,
    _Problem,
    extend_search,
    search_constellation,
)


def problem_for(sizes, d):
    first = np.eye(d, dtype=complex)[:, : sizes[0]]
    free = tuple(sizes[1:])
    n = 1 + len(free)
    return _Problem(
        d=d,
        fixed=(first,),
        free_cols=free,
        pairs=tuple((a, b) for a in range(n) for b in range(a + 1, n)),
        full_free=tuple(False for _ in free),
    )


def test_c01_plane_construction():
    for q in (2, 3, 4, 5, 7, 8, 9):
        C = make_plane(q)
        assert verify_constellation(C).valid, f"order {q} fails conditions (a)/(b)"
        assert verify_plane_axioms(C).valid, f"order {q} fails plane axioms"
        M = materialize(C)
        assert sum(len(cl.lines) for cl in M.classes) == q * (q + 1)
        assert len(M.classes) == q + 1
        assert all(cl.is_full_foliation for cl in M.classes)
    assert sum(len(cl.lines) for cl in materialize(make_plane(3)).classes) == 12


def test_c02_table1_reproduction():
    C = table1_constellation()
    rep = verify_constellation(C)
    assert rep.valid and not rep.violations
    assert signature_of(C) == Signature(6, (5, 5, 5, 4))
    first = [[TABLE1_CELLS[r][c][0] for c in range(6)] for r in range(6)]
    second = [[TABLE1_CELLS[r][c][1] for c in range(6)] for r in range(6)]
    for i in range(6):
        assert sorted(first[i]) == [1, 2, 3, 4, 5, 6]
        assert sorted(first[r][i] for r in range(6)) == [1, 2, 3, 4, 5, 6]
        row_snd = [s for s in second[i] if s is not None]
        col_snd = [second[r][i] for r in range(6) if second[r][i] is not None]
        assert len(row_snd) == len(set(row_snd))
        assert len(col_snd) == len(set(col_snd))
    pairs = {
        (first[r][c], second[r][c])
        for r in range(6)
        for c in range(6)
        if second[r][c] is not None
    }
    assert len(pairs) == 24


def test_c03_footnote4_completion():
    for q in (2, 3, 5, 7):
        M = materialize(make_plane(q))
        for drop in range(len(M.classes)):
            kept = AffineConstellation(
                q, tuple(cl for i, cl in enumerate(M.classes) if i != drop)
            )
            recovered = complete_foliation_set(kept)
            assert set(recovered.lines) == set(M.classes[drop].lines), (
                f"order {q}: dropped class {drop} not recovered"
            )


def test_c04_tarry_certificate():
    # cross-check the enumeration via the total-count identity at orders <= 5
    for n, total in ((3, 12), (4, 576), (5, 161280)):
        reduced = sum(1 for _ in enumerate_reduced_latin(n))
        assert reduced * math.factorial(n) * math.factorial(n - 1) == total
        assert count_all_latin(n) == total
    # control runs: mates exist at orders 4 and 5
    assert certify_no_mates(4).mates_found > 0
    assert certify_no_mates(5).mates_found > 0
    # the certificate itself
    cert = certify_no_mols6()
    assert cert.squares_examined == 9408
    assert cert.mates_found == 0


def test_c05_defect_identities():
    for d in range(2, 13):
        assert mu_defect(standard_basis(d), fourier_basis(d)) < 1e-12
    rng = np.random.default_rng(0)
    for d in (2, 4, 6, 9):
        g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        q, r = np.linalg.qr(g)
        B = make_basis(q * (np.diagonal(r) / np.abs(np.diagonal(r))))
        assert abs(mu_defect(B, B) - (d - 1)) < 1e-12
    assert mu_defect(standard_basis(6), tao_basis()) < 1e-12


def test_c06_known_complete_sets():
    for q in (2, 3, 5, 7, 9):
        rep = constellation_defect(wf_complete_set(q))
        assert all(v < 1e-10 for v in rep.pair_defects.values()), f"wf({q})"
    for d in (2, 3, 6):
        rep = constellation_defect(hw_triple(d))
        assert all(v < 1e-10 for v in rep.pair_defects.values()), f"hw({d})"


def test_c07_fourier_family():
    mats = []
    for a in np.linspace(0.0, 0.5, 5):
        for b in np.linspace(0.0, 0.5, 5):
            B = fourier_family6(float(a), float(b))
            assert B.gram_residual() < 1e-12
            assert mu_defect(standard_basis(6), B) < 1e-12
            mats.append(B.matrix)
    assert any(
        np.abs(mats[i] - mats[j]).max() > 1e-6
        for i in range(len(mats))
        for j in range(i + 1, len(mats))
    )


@pytest.mark.slow
def test_c08_positive_search():
    # seed pinned during development: stops at restart 7 of the 200 budget
    cfg = SearchConfig(seed=11, restarts=200)
    res = search_constellation([5, 5, 3, 1], 6, cfg)
    assert res.status == "Found", f"best defect {res.best_defect:.3e}"
    assert res.best_defect < 1e-8
    assert res.found_at_restart is not None


@pytest.mark.slow
def test_c09_evidence_of_absence():
    outcomes = {}
    for sizes in ((5, 4, 3, 2), (5, 3, 3, 3)):
        res = search_constellation(list(sizes), 6, SearchConfig(seed=1, restarts=200))
        outcomes[sizes] = res
    ext1 = extend_search(
        list(hw_triple(6).bases), 1, False, SearchConfig(seed=1, restarts=500)
    )
    ext2 = extend_search(
        [standard_basis(6), tao_basis()], 2, True, SearchConfig(seed=1, restarts=500)
    )
    summary = "; ".join(
        [
            f"{k}: {v.status} best={v.best_defect:.3e}"
            for k, v in outcomes.items()
        ]
        + [
            f"hw+1: {ext1.status} best={ext1.best_defect:.3e}",
            f"tao+2: {ext2.status} best={ext2.best_defect:.3e}",
        ]
    )
    assert ext1.status == "NotFound" and ext1.best_defect > 1e-4, summary
    assert ext2.status == "NotFound" and ext2.best_defect > 1e-4, summary
    for sizes, res in outcomes.items():
        assert res.status == "NotFound", summary
        assert res.best_defect > 1e-3, (
            f"{sizes}: best defect {res.best_defect:.3e} is not > 1e-3 "
            f"(local minima below the stated floor); full summary: {summary}"
        )


def test_c10_gradient_correctness():
    h = 1e-6
    for sizes in ((5, 5, 3, 1), (5, 4, 3, 2), (5, 3, 3, 3)):
        prob = problem_for(list(sizes), 6)
        rng = np.random.default_rng(sum(sizes))
        for _ in range(20):
            theta = rng.normal(size=prob.n_params)
            _, g = _cost_grad(theta, prob)
            for p in rng.choice(prob.n_params, size=8, replace=False):
                tp, tm = theta.copy(), theta.copy()
                tp[p] += h
                tm[p] -= h
                fd = (_cost_only(tp, prob) - _cost_only(tm, prob)) / (2 * h)
                assert abs(g[p] - fd) / max(1.0, abs(fd)) < 1e-6


def test_c11_determinism(capsys, tmp_path):
    def payload(argv):
        code = cli.main(argv)
        out = capsys.readouterr().out
        assert code in (0, 1)
        return out

    search_argv = lambda w: [  # noqa: E731
        "mub", "search", "--dim", "6", "--signature", "5,5,5",
        "--restarts", "4", "--seed", "7", "--workers", w, "--json",
    ]
    runs = [payload(search_argv("1")), payload(search_argv("1")),
            payload(search_argv("4"))]
    assert runs[0] == runs[1] == runs[2]

    std = tmp_path / "std.json"
    payload(["mub", "make", "--kind", "standard", "--dim", "6", "--json"])
    code = cli.main(["mub", "make", "--kind", "standard", "--dim", "6", "--json"])
    std.write_text(capsys.readouterr().out)
    extend_argv = lambda w: [  # noqa: E731
        "mub", "extend", "--in", str(std), "--vectors", "1",
        "--restarts", "3", "--seed", "2", "--workers", w, "--json",
    ]
    eruns = [payload(extend_argv("1")), payload(extend_argv("4"))]
    assert eruns[0] == eruns[1]
    for doc in (runs[0], eruns[0]):
        assert "elapsed" not in json.loads(doc)


def test_c12_lattice_propagation():
    top = Signature(6, (5, 5, 5, 4))
    for sizes in ((5, 4, 3, 2), (5, 5, 3, 1), (5, 3, 3, 3)):
        assert dominates(top, Signature(6, sizes))
