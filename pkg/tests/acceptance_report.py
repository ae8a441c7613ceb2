"""Pass/fail lines of the acceptance suite, printed in the pytest summary."""

RESULTS: list[str] = []


def report(number: int, ok: bool, detail: str) -> bool:
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    RESULTS.append(line)
    print(line)
    return ok
