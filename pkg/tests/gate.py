"""PASS/FAIL lines of the acceptance criteria, repeated in the terminal summary."""

CRITERIA = range(1, 10)
RESULTS = {}


def verdict(number: int, ok: bool, detail: str):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    RESULTS[number] = line
    print(line)
    return line
