"""Golden-file lock on the trace/event CSV format and numerics.

Regenerate after an intentional model or format change with:

    python -c "
    from switchsim import Config, SetVelocity, Side, Wait, run_script
    t = run_script(Config().plant(),
                   [SetVelocity(720.0), Wait(0.18), SetVelocity(0.0), Wait(0.02)],
                   engaged=Side.MINUS)
    open('tests/data/golden_trace.csv', 'w', newline='').write(t.to_csv())
    open('tests/data/golden_events.csv', 'w', newline='').write(t.events_to_csv())
    "
"""

from pathlib import Path

from switchsim import Config, SetVelocity, Side, Wait, run_script

DATA = Path(__file__).parent / "data"


def golden_run():
    plant = Config().plant()
    return run_script(
        plant,
        [SetVelocity(720.0), Wait(0.18), SetVelocity(0.0), Wait(0.02)],
        engaged=Side.MINUS,
    )


def test_trace_matches_golden_file():
    assert golden_run().to_csv() == (DATA / "golden_trace.csv").read_text()


def test_events_match_golden_file():
    events = golden_run().events_to_csv()
    assert events == (DATA / "golden_events.csv").read_text()
    # The full-speed traversal engages at the constant-speed floor, well
    # inside a single 1 ms step boundary.
    assert "0.17027777777777806,engaged,side=plus" in events
