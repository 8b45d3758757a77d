"""Collects one PASS/FAIL line per acceptance criterion for the terminal summary."""
RESULTS: list[str] = []


def record(name: str, failures: list[str]) -> None:
    line = f"{'PASS' if not failures else 'FAIL'} {name}"
    if failures:
        shown = failures[:6] + ([f"... {len(failures) - 6} more"] if len(failures) > 6 else [])
        line += ": " + "; ".join(shown)
    RESULTS.append(line)
    print(line)
    assert not failures, line
