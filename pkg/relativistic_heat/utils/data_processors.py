from typing import Iterable

import pandas as pd

SCORECARD_COLUMNS = ["name", "status", "violation", "tolerance"]


def scorecard_frame(checks: Iterable, evidence: Iterable = ()) -> pd.DataFrame:
    rows = []
    for check in checks:
        if check.exploratory:
            status = "info"
        else:
            status = "PASS" if check.passed else "FAIL"
        rows.append(
            {
                "name": check.name,
                "status": status,
                "violation": check.violation,
                "tolerance": check.tolerance,
            }
        )
    for item in evidence:
        rows.append(
            {
                "name": item.name,
                "status": item.verdict.value,
                "violation": item.max_deviation_in_cone,
                "tolerance": item.tolerance,
            }
        )
    return pd.DataFrame(rows, columns=SCORECARD_COLUMNS)


def render_table(frame: pd.DataFrame) -> str:
    if frame.empty:
        return "(no checks)"
    return frame.to_string(index=False, float_format=lambda v: "{:.3e}".format(v))
