"""Engine: day loop, handlers, retrigger scope, work accounting,
determinism."""

import pytest

from predlift.engine import Engine, ScheduleBug, drain, run_offline, run_predicted
from predlift.incremental import lift_incremental
from predlift.model import DELETE, INSERT, Event, Prediction
from predlift.problems import counter_contract, oracle_daily_outputs
from predlift.streamgen import ErrorModel, generate_offline_instance


def P(el, kind, day):
    return Prediction(Event(el, kind), day)


def exact_counter_instance(T, seed=0):
    inst = generate_offline_instance("counter", 8, T, ErrorModel("exact"), seed)
    return inst


def make_engine(T, predictions, seed=1):
    eng = Engine(lift_incremental(counter_contract()), T, seed)
    drain(eng.ingest_predictions(predictions))
    return eng


def test_zero_error_run_no_retriggers():
    inst = exact_counter_instance(64)
    eng = run_predicted(
        lift_incremental(counter_contract()), inst.T, inst.predictions, inst.stream, 3
    )
    assert eng.counters.retrigger_calls == 0
    assert eng.counters.retrigger_units == 0
    assert eng.counters.reschedules == 0
    assert eng.outputs == oracle_daily_outputs("counter", inst.stream)


def test_early_event_retrigger_range():
    # element predicted for day 9 arrives on day 3
    preds = [P("a", INSERT, 1), P("b", INSERT, 9)]
    eng = make_engine(10, preds)
    calls = []
    orig = eng.retrigger

    def spy(t1, t2, widen=False):
        calls.append((t1, t2))
        yield from orig(t1, t2, widen=widen)

    eng.retrigger = spy
    drain(eng.process_day(1, Event("a", INSERT)))
    drain(eng.process_day(2, Event("x", INSERT)))  # never predicted
    drain(eng.process_day(3, Event("b", INSERT)))
    assert (3, 9) in calls  # earlier-than-prediction handler
    assert (2, 11) in calls  # sentinel prediction spans past the horizon
    assert eng.outputs == [1, 2, 3]


def test_late_event_first_reschedule_distance_two():
    preds = [P("a", INSERT, 1), P("b", INSERT, 2)]
    eng = make_engine(12, preds)
    drain(eng.process_day(1, Event("a", INSERT)))
    drain(eng.process_day(2, Event("c", INSERT)))  # b misses its day
    rec = eng.schedule.by_key[("b", INSERT)]
    assert rec.day == 4  # first reschedule jumps 2^1
    assert rec.i == 1
    drain(eng.process_day(3, Event("d", INSERT)))
    drain(eng.process_day(4, Event("e", INSERT)))  # b misses again
    assert rec.day == 8  # then 2^2
    assert rec.i == 2


def test_ordering_constraint_drags_deletion():
    preds = [P("a", INSERT, 2), P("a", DELETE, 5)]
    eng = make_engine(16, preds)
    drain(eng.process_day(1, Event("z", INSERT)))
    drain(eng.process_day(2, Event("y", INSERT)))  # a's insert misses: to day 4
    drain(eng.process_day(3, Event("w", INSERT)))
    drain(eng.process_day(4, Event("v", INSERT)))  # a's insert misses: to day 8
    ins = eng.schedule.by_key[("a", INSERT)]
    dl = eng.schedule.by_key[("a", DELETE)]
    assert ins.day == 8
    assert dl.day == 8  # dragged along to keep insert-before-delete
    assert dl.i >= 1


def test_out_of_order_day_rejected():
    eng = make_engine(8, [])
    drain(eng.process_day(1, Event("a", INSERT)))
    with pytest.raises(ScheduleBug):
        drain(eng.process_day(3, Event("b", INSERT)))


def test_duplicate_lifetime_rejected():
    eng = make_engine(8, [])
    drain(eng.process_day(1, Event("a", INSERT)))
    with pytest.raises(ScheduleBug):
        drain(eng.process_day(2, Event("a", INSERT)))


def test_batch_bound_holds():
    for seed in range(10):
        inst = generate_offline_instance(
            "counter", 8, 128, ErrorModel("uniform", sigma=32), seed
        )
        eng = run_predicted(
            lift_incremental(counter_contract()), inst.T, inst.predictions, inst.stream, seed
        )
        logT = (inst.T - 1).bit_length()
        assert eng.counters.batch_max <= 2 * logT + 4


def test_reschedule_budget():
    for seed in range(6):
        inst = generate_offline_instance("counter", 8, 128, ErrorModel("heavy"), seed)
        eng = run_predicted(
            lift_incremental(counter_contract()), inst.T, inst.predictions, inst.stream, seed
        )
        logT = (inst.T - 1).bit_length()
        assert eng.counters.reschedules <= 2 * inst.T * logT


def test_deterministic_given_seed():
    inst = generate_offline_instance("counter", 8, 96, ErrorModel("uniform", sigma=9), 5)

    def run():
        eng = run_predicted(
            lift_incremental(counter_contract()), inst.T, inst.predictions, inst.stream, 17
        )
        return eng.outputs, eng.counters.as_dict()

    assert run() == run()


def test_offline_mode_matches_predicted_outputs():
    inst = generate_offline_instance("counter", 8, 96, ErrorModel("uniform", sigma=9), 6)
    pred = run_predicted(
        lift_incremental(counter_contract()), inst.T, inst.predictions, inst.stream, 3
    )
    off = run_offline(lift_incremental(counter_contract()), inst.T, inst.stream, 3)
    assert pred.outputs == off.outputs
    assert off.counters.retrigger_calls == 0


def test_full_retrigger_equals_preprocessing_cost():
    inst = exact_counter_instance(64, seed=2)
    eng = make_engine(inst.T, inst.predictions, seed=9)
    before = eng.counters.window_compute_units
    drain(eng.retrigger(1, inst.T))
    # recomputing everything below the root touches every window but the root
    assert eng.counters.retrigger_units >= before * 0.5


def test_counter_dump_format():
    eng = make_engine(8, [])
    block = eng.counters.format_block()
    assert "retrigger_calls=0" in block
    assert "total_units=" in block


def test_query_reads_current_leaf():
    preds = [P("a", INSERT, 1)]
    eng = make_engine(8, preds)
    drain(eng.process_day(1, Event("a", INSERT)))
    assert eng.query() == 1  # counter's query returns the count
