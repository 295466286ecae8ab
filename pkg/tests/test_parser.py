import pytest

from conftest import random_trees
from rstbench.errors import (
    EmptyTrainSet,
    IllegalTransition,
    InventoryMismatch,
    ModelConfigMismatch,
    NonTerminalEnd,
)
from rstbench.metrics import aggregate, parseval
from rstbench.parser import (
    SHIFT,
    FeatureConfig,
    Model,
    ParserState,
    Reduce,
    TrainConfig,
    Transition,
    distance_bucket,
    extract_features,
    load_model,
    oracle,
    parse,
    parse_tree,
    replay,
    save_model,
    stack_features_from_parser,
    stack_features_from_tagger,
    train,
    warm_start,
    window_label_tagger,
)
from rstbench.parser.model import dumps_model, loads_model
from rstbench.parser.perceptron import AveragedPerceptron
from rstbench.parser.stacking import annotations_from_dependencies
from rstbench.depconv import to_dependencies
from rstbench.synthetic import random_corpus
from rstbench.treebank import ConstituentTree, Edu, leaf
from rstbench.trees import NS, binarize, to_brackets

FAST = TrainConfig(epochs=8)


def test_oracle_single_edu(fixture_trees):
    t = binarize(fixture_trees["one_edu"])
    assert oracle(t) == [SHIFT]
    assert replay(t.edus, [SHIFT]).root == t.root


def test_oracle_ns_fixture(fixture_trees):
    t = binarize(fixture_trees["ns_elaboration"])
    assert oracle(t) == [SHIFT, SHIFT, Reduce(NS, "elaboration-additional")]


def test_oracle_length_and_replay():
    for t in random_trees(50, 20, seed=5):
        b = binarize(t)
        seq = oracle(b)
        assert len(seq) == 2 * len(b.edus) - 1
        assert replay(b.edus, seq).root == b.root


def test_replay_errors():
    edus = (Edu(1, "a"), Edu(2, "b"))
    with pytest.raises(IllegalTransition):
        replay(edus, [SHIFT, Reduce(NS, "x")])
    with pytest.raises(IllegalTransition):
        replay(edus, [SHIFT, SHIFT, SHIFT])
    with pytest.raises(NonTerminalEnd):
        replay(edus, [SHIFT, SHIFT])


def test_action_ids_round_trip():
    for t in (SHIFT, Reduce("NN", "joint-list"), Reduce("SN", "Topic-Comment")):
        assert Transition.from_id(t.id) == t
    with pytest.raises(ValueError):
        Reduce("XX", "a")


def test_features_hello_world():
    state = ParserState((Edu(1, "Hello world"),))
    assert set(extract_features(state)) == {"q0_first=hello", "q0_last=world", "q0_len=2-3"}


def test_no_sidecar_no_organizational_features(fixture_trees):
    t = binarize(fixture_trees["two_sided"])
    state = ParserState(t.edus)
    for step in oracle(t)[:-1]:
        state.apply(step)
        assert not any("sent" in f or "para" in f for f in extract_features(state))


def test_organizational_features_with_bounds(fixture_trees):
    state = ParserState(binarize(fixture_trees["nested"]).edus)
    state.apply(SHIFT)
    feats = set(extract_features(state))
    assert {"s0_startpara=1", "s0_startsent=1", "s0q0_samesent=0", "s0q0_samepara=0"} <= feats


def test_label_stacking_feature():
    state = ParserState((Edu(1, "a b"), Edu(2, "c")))
    state.apply(SHIFT)
    cfg = FeatureConfig(stacking="label")
    feats = extract_features(state, cfg, ["root", "elaboration"])
    assert "s0_deplab=root" in feats and "q0_deplab=elaboration" in feats
    assert not any("deplab" in f for f in extract_features(state, cfg, None))


def test_graph_annotations(fixture_trees):
    doc = to_dependencies(fixture_trees["ns_elaboration"])
    assert annotations_from_dependencies(doc, "graph") == [("root", "0"), ("left", "1")]
    assert annotations_from_dependencies(doc, "label") == ["root", "elaboration-additional"]


@pytest.mark.parametrize("d,bucket", [(1, "1"), (2, "2"), (3, "3-5"), (5, "3-5"), (6, "6-10"), (10, "6-10"),
                                      (11, ">10")])
def test_distance_buckets(d, bucket):
    assert distance_bucket(d) == bucket


def test_tie_break_smallest_id():
    p = AveragedPerceptron()
    assert p.predict(["f"], ["SHIFT", "REDUCE-NS-a", "REDUCE-NN-b"]) == "REDUCE-NN-b"


def test_perceptron_average():
    p = AveragedPerceptron()
    p.update("a", "b", ["f"])
    p.tick()
    p.tick()
    # weight 1 held for two ticks out of two
    assert p.averaged()["f"]["a"] == pytest.approx(1.0)
    p.update("b", "a", ["f"])
    p.tick()
    p.tick()
    assert p.averaged()["f"]["a"] == pytest.approx(0.5)


def test_parse_single_edu():
    m = Model.empty(TrainConfig())
    t = parse(m, (Edu(1, "only one"),))
    assert t.root.is_leaf and t.root.start == 1


def test_parse_untrained_model_is_well_formed():
    edus = tuple(Edu(i, f"w{i}") for i in range(1, 6))
    t = parse(Model.empty(TrainConfig()), edus)
    assert len(list(t.root.internal_nodes())) == 4


def test_empty_train_set():
    with pytest.raises(EmptyTrainSet):
        train([], FAST)


def test_memorize_single_document(fixture_trees):
    t = fixture_trees["nested"]
    m = train([t], TrainConfig(epochs=10))
    assert to_brackets(parse_tree(m, t).root) == to_brackets(binarize(t).root)


def _toy(n_docs=12, seed=0):
    corpus = random_corpus(seed=seed, genres={"a": (n_docs, 0, 0)}, edus=(3, 10))
    return corpus.trees()


def test_deterministic_given_seed():
    trees = _toy()
    a = train(trees, FAST, seed=3)
    b = train(trees, FAST, seed=3)
    assert dumps_model(a) == dumps_model(b)


def test_dev_selection_and_patience():
    trees = _toy(14)
    m = train(trees[:10], TrainConfig(epochs=6, patience=1), dev=trees[10:])
    assert 1 <= len(m.history) <= 6
    assert all("dev_S" in h for h in m.history)


def test_scheme_collapses_training_labels():
    m = train(_toy(6), TrainConfig(epochs=2, scheme="gum"))
    labels = {a.split("-", 2)[2] for a in m.reduce_actions}
    assert labels and all(not any(c.islower() for c in lab[:1]) or lab == "same-unit" for lab in labels)
    assert m.label_space == "gum"


def test_warm_start_from_empty_equals_train():
    trees = _toy(8)
    a = train(trees, FAST, seed=2)
    b = warm_start(Model.empty(FAST), trees, FAST, seed=2)
    assert dumps_model(a) == dumps_model(b)


def test_warm_start_inventory_and_feature_checks():
    trees = _toy(4)
    m = train(trees, TrainConfig(epochs=1, scheme="gum"))
    with pytest.raises(InventoryMismatch):
        warm_start(m, trees, TrainConfig(epochs=1, scheme="rstdt"))
    with pytest.raises(ModelConfigMismatch):
        warm_start(m, trees, TrainConfig(epochs=1, scheme="gum", features=FeatureConfig(organizational=False)))


def test_warm_start_after_convergence_is_stable():
    trees = _toy(10)
    cfg = TrainConfig(epochs=15)
    m = train(trees, cfg)

    def score(model):
        return aggregate([parseval(binarize(t), parse_tree(model, t)) for t in trees]).S

    before = score(m)
    after = score(warm_start(m, trees, TrainConfig(epochs=3)))
    assert abs(after - before) < 1.0


def test_model_save_load(tmp_path):
    m = train(_toy(4), TrainConfig(epochs=2))
    path = save_model(m, tmp_path / "model.bin")
    loaded = load_model(path)
    assert dumps_model(loaded) == dumps_model(m)
    with pytest.raises(ModelConfigMismatch):
        load_model(path, FeatureConfig(stacking="graph"))
    with pytest.raises(ModelConfigMismatch):
        loads_model(_tampered(m))


def _tampered(m):
    import gzip
    import json
    payload = json.loads(gzip.decompress(dumps_model(m)))
    payload["feature_hash"] = "0" * 16
    return gzip.compress(json.dumps(payload).encode())


def test_tagger_single_label_and_majority():
    from rstbench.depconv import to_dependencies as dep
    trees = _toy(6)
    docs = [dep(t) for t in trees]
    tagger = window_label_tagger(docs, scheme="gum", epochs=2)
    tags = stack_features_from_tagger(tagger, docs)
    assert all(len(tags[d.doc_id]) == len(d.edus) for d in docs)
    # unseen vocabulary falls back to the majority label
    unseen = tuple(Edu(i, f"zz{i} qq{i}") for i in range(1, 4))
    assert tagger.tag_edus(unseen)[1] == tagger.majority
    one = dep(ConstituentTree("x", (Edu(1, "alone here"),), leaf(1)))
    single = window_label_tagger([one], scheme=None, epochs=1)
    assert single.labels == ["root"] and single.tag_edus(unseen) == ["root"] * 3
    with pytest.raises(EmptyTrainSet):
        window_label_tagger([])


def test_stacked_parser_annotations_use_only_edus():
    trees = _toy(6)
    base = train(trees, TrainConfig(epochs=2))
    ann = stack_features_from_parser(base, trees, "graph")
    for t in trees:
        assert len(ann[t.doc_id]) == len(t.edus)
        assert sum(a == ("root", "0") for a in ann[t.doc_id]) == 1
    cfg = TrainConfig(epochs=2, features=FeatureConfig(stacking="graph"))
    m = train(trees, cfg, annotations=ann)
    assert any("depdir" in f for f in m.weights)
