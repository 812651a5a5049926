import random
import statistics

import pytest
from hypothesis import given, settings, strategies as st

from conftest import traj
from stratex.agents import ScriptedPolicy
from stratex.core import Event, EventSpec, is_subtrajectory, satisfies
from stratex.pipeline import (EmptyDatasetError, InsufficientPositives, collect_negative, collect_positive, cluster,
                              discover, discover_from_episodes, event_likelihood, extract, filter_events,
                              likelihoods, needs_normalizing, normalize, run_pipeline)

MOVE, DOT, POWER, KILL = (Event("pacman", x) for x in ("move", "collect dot", "collect power-up", "kill a ghost"))
LABELS = ["move", "collect dot", "collect power-up", "kill a ghost"]
KILL_SPEC = EventSpec.single(KILL)


def example4_sets():
    """10 positives containing everything; negatives hold move 10/10, dot 9/10, power-up 2/10, kill 0/10."""
    pos = [traj(["move", "collect dot", "move", "collect power-up", "move", "kill a ghost"]) for _ in range(10)]
    neg = []
    for i in range(10):
        labels = ["move"] * 3
        if i < 9:
            labels.append("collect dot")
        if i < 2:
            labels.append("collect power-up")
        neg.append(traj(labels))
    return pos, neg


# -- discovery ------------------------------------------------------------------

def test_discovery_oracles():
    zeros = [[(MOVE, 0.0)] * 4] * 4
    assert discover_from_episodes(zeros) == (0.0, set())
    big = Event("x", "jackpot")
    small = Event("x", "tick")
    first = [[(small, 5.0)] * 3] * 2
    second = [[(small, 5.0), (big, 100.0)]] * 2
    r_avg, specs = discover_from_episodes(first + second)
    assert r_avg == 5.0
    assert specs == {EventSpec.single(big)}


def test_discovery_episode_mode():
    eps = [[(MOVE, 1.0), (MOVE, 1.0)], [(MOVE, 1.0)], [(KILL, 2.0)], [(POWER, 1.5)]]
    r_avg, specs = discover_from_episodes(eps, mode="episode")
    assert r_avg == 1.5
    assert specs == {EventSpec.single(KILL)}
    with pytest.raises(ValueError):
        discover_from_episodes(eps, mode="median")


def test_discover_pacman():
    r_avg, specs = discover("pacman", ScriptedPolicy("pacman"), 100, seed=0)
    assert 0 < r_avg < 50
    labels = {str(s) for s in specs}
    assert {"collect power-up", "kill a ghost"} <= labels
    assert "move" not in labels


def test_discover_rejects_odd_n():
    with pytest.raises(ValueError):
        discover("pacman", ScriptedPolicy("pacman"), 3)


# -- collection -----------------------------------------------------------------

def test_collect_positive_truncates_at_goal():
    pos = collect_positive("pacman", ScriptedPolicy("pacman"), KILL_SPEC, 10, seed=1)
    assert len(pos) == 10
    for t in pos:
        assert t.events[-1] == KILL
        assert satisfies(t, KILL_SPEC) == len(t) - 1


def test_collect_positive_compound():
    spec = EventSpec.single(KILL, 2)
    for t in collect_positive("pacman", ScriptedPolicy("pacman"), spec, 5, seed=2):
        assert t.events[-1] == KILL and t.events.count(KILL) == 2


def test_collect_rejects_n0_and_reports_shortfall():
    with pytest.raises(ValueError):
        collect_positive("pacman", ScriptedPolicy("pacman"), KILL_SPEC, 0)
    with pytest.raises(ValueError):
        collect_negative("pacman", KILL_SPEC, 0)
    with pytest.raises(InsufficientPositives) as exc:
        collect_positive("pacman", ScriptedPolicy("pacman"), EventSpec.single(KILL, 4), 3, episode_cap=5)
    assert exc.value.achieved == 0 and exc.value.requested == 3 and exc.value.episodes == 5


def test_collect_negative_never_satisfies():
    neg = collect_negative("pacman", KILL_SPEC, 30, seed=3)
    assert len(neg) == 30
    assert all(satisfies(t, KILL_SPEC) is None for t in neg)
    # random Pacman usually dies to a ghost well before clearing the board
    env_done_by_death = sum(t.total_reward < 560 for t in neg)
    assert env_done_by_death > 20


# -- normalisation ----------------------------------------------------------------

def test_normalize_prefixes():
    pos = [traj(["move"] * 3), traj(["move"] * 3)]
    long = traj(["move", "collect dot"] * 5)
    out = normalize(pos, [long], random.Random(0))
    assert [len(t) for t in out] == [3, 3]
    assert all(t.events == long.events[:3] for t in out)


def test_normalize_skips():
    pos = [traj(["move"] * 5)] * 3
    short = [traj(["move"] * 2)] * 4
    assert normalize(pos, short, random.Random(0)) == short
    same = [traj(["collect dot"] * 5)] * 3
    assert normalize(pos, same, random.Random(0)) == same
    with pytest.raises(ValueError):
        normalize([], same, random.Random(0))


@given(st.lists(st.integers(1, 20), min_size=1, max_size=15), st.lists(st.integers(1, 40), min_size=1, max_size=15),
       st.integers(0, 10**6))
def test_normalize_count_and_lengths(lp, ln, seed):
    pos = [traj(["move"] * k) for k in lp]
    neg = [traj(["move"] * k) for k in ln]
    out = normalize(pos, neg, random.Random(seed))
    if needs_normalizing(pos, neg):
        assert len(out) == len(pos)
        assert all(len(t) in set(lp) or len(t) == max(ln) for t in out)
        assert all(any(t.events == n.events[:len(t)] for n in neg) for t in out)
    else:
        assert out == neg


# -- likelihoods ----------------------------------------------------------------

def test_likelihood_examples():
    assert event_likelihood(1.0, 0.2) == 0.8
    assert event_likelihood(0.7, 0.0) == 1.0
    assert event_likelihood(0.0, 0.4) == 0.0
    assert event_likelihood(0.3, 0.5) == 0.0


def test_example4_table_bit_exact():
    pos, neg = example4_sets()
    table = likelihoods(pos, neg)
    assert table[MOVE] == 0.0
    assert table[DOT] == 0.1
    assert table[POWER] == 0.8
    assert table[KILL] == 1.0
    assert table[Event("pacman", "never seen")] == 1.0
    row = table.to_dict()["collect power-up"]
    assert row == {"likelihood": 0.8, "f_pos": 1.0, "f_neg": 0.2}


def test_only_negative_event_gets_zero():
    table = likelihoods([traj(["move"])], [traj(["move", "collect dot"])])
    assert table[DOT] == 0.0


def test_filter_examples():
    pos, neg = example4_sets()
    table = likelihoods(pos, neg)
    out = filter_events(pos, table)
    assert all(MOVE not in t.events and DOT in t.events for t in out)
    assert [e.label for e in out[0].events] == ["collect dot", "collect power-up", "kill a ghost"]
    assert filter_events(pos, table, 0.0) == pos
    with pytest.raises(EmptyDatasetError):
        filter_events([traj(["move", "collect dot"])], table, 1.0)
    with pytest.raises(ValueError):
        filter_events(pos, table, 1.5)


label_lists = st.lists(st.lists(st.sampled_from(LABELS), min_size=1, max_size=8), min_size=1, max_size=8)


@given(label_lists, label_lists, st.floats(0, 1))
def test_likelihood_range_and_filter_idempotent(p, n, th):
    pos = [traj(x) for x in p]
    neg = [traj(x) for x in n]
    table = likelihoods(pos, neg)
    assert all(0.0 <= v <= 1.0 for v in table.values())
    for e in table:
        if table.f_neg.get(e, 0) == 0:
            assert table[e] == 1.0
        elif table.f_pos.get(e, 0) == 0:
            assert table[e] == 0.0
    try:
        once = filter_events(pos, table, th)
    except EmptyDatasetError:
        return
    assert filter_events(once, table, th) == once


# -- clustering and extraction ------------------------------------------------------

def test_cluster_example():
    t1 = traj(["collect weapon (gun)", "kill a monster"], env="dungeon")
    t2 = traj(["collect weapon (sword)", "kill a monster"], env="dungeon")
    got = {c.anchor.label: c.members for c in cluster([t1, t2])}
    assert got == {"collect weapon (gun)": (0,), "collect weapon (sword)": (1,), "kill a monster": (0, 1)}


@given(label_lists)
def test_cluster_union_and_membership(p):
    filtered = [traj(x) for x in p]
    cs = cluster(filtered)
    assert len(cs) == len({e for t in filtered for e in t.events})
    assert set().union(*(c.members for c in cs)) == set(range(len(filtered)))
    for c in cs:
        assert all(c.anchor in filtered[i].events for i in c.members)


def test_extract_examples():
    single = [traj(["collect power-up", "kill a ghost"])]
    assert extract(cluster(single), single, {}) == []
    twins = single * 2
    [s] = extract(cluster(twins), twins, {})
    assert s.labels == ("collect power-up", "kill a ghost")


def test_extract_uses_shortest_member_as_base():
    a = traj(["collect power-up", "collect dot", "kill a ghost"])
    b = traj(["collect power-up", "kill a ghost"])
    out = extract(cluster([a, b]), [a, b], {})
    assert [s.labels for s in out] == [("collect power-up", "kill a ghost")]


@settings(max_examples=50)
@given(label_lists, st.integers(0, 10**6))
def test_strategies_are_subtrajectories_of_filtered(p, seed):
    rng = random.Random(seed)
    filtered = [traj(x) for x in p]
    table = {Event("pacman", x): rng.random() for x in LABELS}
    for s in extract(cluster(filtered), filtered, table):
        assert s and any(is_subtrajectory(s.events, t.events) for t in filtered)


# -- whole pipeline -----------------------------------------------------------------

def test_run_pipeline_pacman_kill():
    rep = run_pipeline("pacman", ScriptedPolicy("pacman"), KILL_SPEC, 40, seed=5)
    labels = {s.labels for s in rep.strategies}
    assert ("collect power-up", "kill a ghost") in labels
    assert len(rep.negatives) == 40 and len(rep.positives) == 40
    assert set(rep.timings) == {"collect", "normalize", "likelihood", "cluster", "extract"}
    assert len(rep.lengths["normalized"]) == 40
    doc = rep.to_dict()
    assert doc["samples"] == 40 and "timings_ms" in doc
    assert "timings_ms" not in rep.to_dict(timings=False)


def test_run_pipeline_deterministic():
    a = run_pipeline("dungeon", ScriptedPolicy("dungeon"), EventSpec.single(Event("dungeon", "kill a monster")),
                     20, seed=9)
    b = run_pipeline("dungeon", ScriptedPolicy("dungeon"), EventSpec.single(Event("dungeon", "kill a monster")),
                     20, seed=9)
    assert a.to_dict(timings=False) == b.to_dict(timings=False)


def test_run_pipeline_pacman_double_kill():
    rep = run_pipeline("pacman", ScriptedPolicy("pacman"), EventSpec.single(KILL, 2), 100, seed=0)
    assert ("collect power-up", "kill a ghost", "kill a ghost") in {s.labels for s in rep.strategies}


def test_normalized_lengths_follow_positives():
    rep = run_pipeline("pacman", ScriptedPolicy("pacman"), KILL_SPEC, 60, seed=4)
    if rep.normalized:
        lp, ln = rep.lengths["positive"], rep.lengths["normalized"]
        assert len(ln) == len(lp)
        assert abs(statistics.fmean(ln) - statistics.fmean(lp)) <= 0.15 * statistics.fmean(lp)
