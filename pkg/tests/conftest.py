import os
import random
from collections import defaultdict
from pathlib import Path

import pytest

from rstbench.synthetic import random_tree
from rstbench.treebank import load_corpus

FIXTURES = Path(__file__).parent / "fixtures"

CRITERIA = {
    1: "metric identity and R <= N <= S on 200 random trees in < 5 s",
    2: "optimized scorer equals brute-force span-set scorer on 100 pairs",
    3: "replay(oracle(binarize(t))) and debinarize(binarize(t)) round-trips",
    4: "dependency conversion properties and NS(1,2) fixture arcs",
    5: "rs3 and rsd read-write-read structural equality",
    6: "mapping table checksum (and GUM mismatch rate 13.3 +/- 0.5)",
    7: "corpus statistics, OVA and fixed cohort sizes against reference counts",
    8: "20-document learner sanity (S >= 95, < 2 min) and bitwise reproducibility",
    9: "no leakage in generated configs; 3-run degradation means recompute exactly",
    10: "chi-square closed form, diagonal confusion, CDU accuracy 1.0",
}

_outcomes: dict[int, list[tuple[str, str]]] = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n): acceptance criterion number")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("acceptance")
        if mark:
            item.user_properties.append(("acceptance", mark.args[0]))


def pytest_runtest_logreport(report):
    crit = dict(report.user_properties).get("acceptance")
    if crit is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _outcomes[crit].append((report.nodeid, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(CRITERIA):
        results = [o for _, o in _outcomes.get(n, [])]
        if not results:
            status = "NOT RUN"
        elif "failed" in results:
            status = "FAIL"
        elif all(o == "skipped" for o in results):
            status = "SKIP (needs corpus)"
        elif "skipped" in results:
            status = "PASS (corpus-gated parts skipped)"
        else:
            status = "PASS"
        tr.write_line(f"criterion {n:2d}: {status:34s} {CRITERIA[n]}")


# --------------------------------------------------------------------------
# corpora

def _corpus(env: str, name: str):
    root = os.environ.get(env)
    if not root:
        pytest.skip(f"set {env} to a treebank directory with manifest.tsv")
    return load_corpus(root, name=name)


@pytest.fixture(scope="session")
def gum():
    return _corpus("RSTBENCH_GUM_DIR", "gum")


@pytest.fixture(scope="session")
def rstdt():
    return _corpus("RSTBENCH_RSTDT_DIR", "rstdt")


@pytest.fixture(scope="session")
def fixture_trees():
    from rstbench.treebank import apply_bounds, parse_bounds, read_rs3

    trees = {}
    for path in sorted(FIXTURES.glob("*.rs3")):
        tree = read_rs3(path)
        bounds = path.with_suffix(".bounds")
        if bounds.exists():
            b = parse_bounds(bounds.read_text())
            tree = apply_bounds(tree, b.get("sentence"), b.get("paragraph"))
        trees[path.stem] = tree
    return trees


def random_trees(count: int, max_edus: int, seed: int, organizational: bool = False):
    rng = random.Random(seed)
    return [random_tree(rng, rng.randint(1, max_edus), f"r{seed}_{i}", organizational=organizational)
            for i in range(count)]
