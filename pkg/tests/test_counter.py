from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reactorkit.counter import (
    BoundedCounter,
    CounterAdapter,
    CounterEmpty,
    CounterFull,
    CounterViewState,
    project_view,
)
from reactorkit.reactor import ConfinementViolation

from conftest import call_on_loop


def test_increment_from_zero():
    model = BoundedCounter(0, 10)
    model.increment()
    assert model.get() == 1


def test_increment_at_max_errors_and_leaves_value():
    model = BoundedCounter(0, 10)
    for _ in range(10):
        model.increment()
    with pytest.raises(CounterFull):
        model.increment()
    assert model.get() == 10


def test_degenerate_range_is_immediately_full():
    model = BoundedCounter(0, 0)
    assert model.is_full() and model.is_empty()
    with pytest.raises(CounterFull):
        model.increment()


def test_decrement_round_trip_and_empty_error():
    model = BoundedCounter(0, 10)
    model.increment()
    model.decrement()
    assert model.get() == 0
    with pytest.raises(CounterEmpty):
        model.decrement()


def test_reset_targets_min():
    model = BoundedCounter(0, 10)
    for _ in range(7):
        model.increment()
    model.reset()
    assert model.get() == 0
    model.reset()  # idempotent
    assert model.get() == 0

    offset = BoundedCounter(5, 9)
    offset.increment()
    offset.reset()
    assert offset.get() == 5


def test_constructor_rejects_inverted_range():
    with pytest.raises(ValueError):
        BoundedCounter(3, 2)


def test_restore_validates_range():
    model = BoundedCounter(0, 10)
    model.restore_state(7)
    assert model.get() == 7
    with pytest.raises(ValueError):
        model.restore_state(11)


def test_project_view_three_states():
    model = BoundedCounter(0, 10)
    assert project_view(model) == CounterViewState(0, inc_enabled=True, dec_enabled=False)
    for _ in range(5):
        model.increment()
    assert project_view(model) == CounterViewState(5, inc_enabled=True, dec_enabled=True)
    for _ in range(5):
        model.increment()
    assert project_view(model) == CounterViewState(10, inc_enabled=False, dec_enabled=True)


def test_adapter_emits_exactly_one_view_per_event():
    views = []
    adapter = CounterAdapter(BoundedCounter(0, 10), views.append)
    for name in ("reset", "increment", "increment", "decrement", "reset"):
        adapter.on_event(name)
    assert [v.displayed for v in views] == [0, 1, 2, 1, 0]


def test_adapter_ignores_disabled_increment_but_refreshes():
    views = []
    model = BoundedCounter(0, 1)
    adapter = CounterAdapter(model, views.append)
    adapter.on_event("increment")
    adapter.on_event("increment")  # full: ignored, still refreshed
    assert model.get() == 1
    assert [v.displayed for v in views] == [1, 1]
    assert views[-1] == project_view(model)


def test_adapter_ignores_disabled_decrement():
    views = []
    adapter = CounterAdapter(BoundedCounter(0, 10), views.append)
    adapter.on_event("decrement")
    assert views[-1].displayed == 0


def test_adapter_rejects_unknown_event():
    adapter = CounterAdapter(BoundedCounter(0, 10), lambda v: None)
    with pytest.raises(ValueError):
        adapter.on_event("explode")


def test_save_restore_preserves_displayed_value():
    views = []
    adapter = CounterAdapter(BoundedCounter(0, 10), views.append)
    for _ in range(3):
        adapter.on_event("increment")
    saved = adapter.save_state()

    restored_views = []
    fresh = CounterAdapter(BoundedCounter(0, 10), restored_views.append)
    fresh.restore_state(saved)
    assert restored_views[-1].displayed == 3
    assert restored_views[-1] == views[-1]


def test_adapter_confined_to_loop_when_wired(loop):
    adapter = CounterAdapter(BoundedCounter(0, 10), lambda v: None, loop=loop)
    with pytest.raises(ConfinementViolation):
        adapter.on_event("increment")
    call_on_loop(loop, lambda: adapter.on_event("increment"))
    assert adapter.model.get() == 1


@settings(max_examples=80, deadline=None)
@given(events=st.lists(st.sampled_from(["increment", "decrement", "reset"]), max_size=300),
       max_value=st.integers(min_value=0, max_value=12))
def test_invariant_holds_for_any_event_sequence(events, max_value):
    views = []
    model = BoundedCounter(0, max_value)
    adapter = CounterAdapter(model, views.append)
    for name in events:
        adapter.on_event(name)
        assert 0 <= model.get() <= max_value
        assert views[-1] == project_view(model)
    assert len(views) == len(events)


def test_invariant_holds_for_long_random_sequence():
    rng = random.Random(313)
    model = BoundedCounter(0, 10)
    adapter = CounterAdapter(model, lambda v: None)
    for _ in range(10_000):
        adapter.on_event(rng.choice(["increment", "decrement", "reset"]))
        assert 0 <= model.get() <= 10


def explore_state_machine(max_value: int):
    """Exhaustively walk the model from its initial state; return the graph."""
    initial = 0
    transitions = {}
    frontier = [initial]
    seen = set()
    while frontier:
        value = frontier.pop()
        if value in seen:
            continue
        seen.add(value)
        model = BoundedCounter(0, max_value)
        model.restore_state(value)
        edges = {}
        if not model.is_full():
            model.increment()
            edges["increment"] = model.get()
            model.restore_state(value)
        if not model.is_empty():
            model.decrement()
            edges["decrement"] = model.get()
            model.restore_state(value)
        model.reset()
        edges["reset"] = model.get()
        transitions[value] = edges
        frontier.extend(edges.values())
    return transitions


@pytest.mark.parametrize("max_value", range(0, 13))
def test_state_machine_partition_and_transitions(max_value):
    transitions = explore_state_machine(max_value)
    assert sorted(transitions) == list(range(max_value + 1))  # all values reachable

    def classify(value):
        labels = set()
        if value == 0:
            labels.add("minimum")
        if value == max_value:
            labels.add("maximum")
        if not labels:
            labels.add("counting")
        return labels

    for value, edges in transitions.items():
        labels = classify(value)
        # the three classes partition the space and afford the right moves
        assert ("increment" in edges) == ("maximum" not in labels)
        assert ("decrement" in edges) == ("minimum" not in labels)
        assert edges["reset"] == 0
        if "increment" in edges:
            assert edges["increment"] == value + 1
        if "decrement" in edges:
            assert edges["decrement"] == value - 1
    middle = [v for v in transitions if classify(v) == {"counting"}]
    assert len(middle) == max(0, max_value - 1)
