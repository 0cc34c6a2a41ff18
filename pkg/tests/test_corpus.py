"""Replay the regression corpus against both semantics."""

import pathlib

import pytest

from cbpvdp import surface
from cbpvdp.densem import evaluate, hstar
from cbpvdp.harness import load_corpus_file
from cbpvdp.opsem import pr_limit

CORPUS_DIR = pathlib.Path(__file__).resolve().parent.parent / "corpus"
FILES = sorted(CORPUS_DIR.glob("*.cbpv"))


def test_corpus_is_present():
    assert len(FILES) >= 10


@pytest.mark.parametrize("path", FILES, ids=lambda p: p.stem)
def test_corpus_entry(path):
    entry = load_corpus_file(path)
    exp = entry.expectations
    assert exp, f"{entry.name} has no expectations"
    term = surface.parse(entry.text)

    needs_op = {"pr_lower", "pr_exact", "pr_min_lower"} & exp.keys()
    needs_den = {"mass", "mass_exact", "mass_min", "type"} & exp.keys()

    if needs_op:
        res = pr_limit(term, max_budget=10 ** 5)
        if "pr_lower" in exp:
            assert res.lower == exp["pr_lower"]
        if "pr_min_lower" in exp:
            assert res.lower >= exp["pr_min_lower"]
        if "pr_exact" in exp:
            assert res.exact is exp["pr_exact"]

    if needs_den:
        out = evaluate(term)
        if "type" in exp:
            assert str(out.ty).replace(" ", "") == exp["type"]
        mass = hstar(out.value)
        if "mass" in exp:
            assert mass == exp["mass"]
        if "mass_min" in exp:
            assert mass >= exp["mass_min"]
        if "mass_exact" in exp:
            assert out.exact is exp["mass_exact"]
