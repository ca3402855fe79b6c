"""Shared record of acceptance verdicts, printed at the end of the run."""

RESULTS: dict[int, tuple[bool, str]] = {}


def record(number: int, ok: bool, detail: str) -> str:
    RESULTS[number] = (ok, detail)
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(line)
    return line
