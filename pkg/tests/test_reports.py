import csv
import io
import math

from turanforge.reports import (SCAN_HEADER, THEOREM4_HEADER, multiplier_scan_rows,
                                report_multiplier_scan, report_theorem4, theorem4_rows)


def _parse(text):
    return list(csv.reader(io.StringIO(text)))


def test_theorem4_q5_row():
    (row,) = theorem4_rows(1, [5])
    t, q, n, e, closed, exact, upper, ratio, flag = row
    assert (t, q, n, e, exact, flag) == (1, 5, 75, 300, 300, "")
    # the closed form is exact at n = 3 q^2
    assert abs(float(closed) - 300) < 1e-9
    assert float(upper) == math.sqrt(1) / 2 * 75 ** 1.5 + 75 / 4
    assert float(ratio) == 300 / float(upper)


def test_theorem4_header_only():
    assert _parse(report_theorem4(1, [])) == [THEOREM4_HEADER]
    assert _parse(report_multiplier_scan(2, 5)) == [SCAN_HEADER]


def test_theorem4_flags_bad_q():
    (row,) = theorem4_rows(1, [7])
    assert row[3] == "" and row[-1].startswith("construction failed")


def test_theorem4_t2_uses_multipliers():
    (row,) = theorem4_rows(2, [5])
    assert row[3] == 6 * 25 * 4 == row[5]


def test_multiplier_scan_small():
    rows = multiplier_scan_rows(2, 12, build_max=7)
    assert [r[0] for r in rows] == [5, 7, 11]
    assert rows[0][1:4] == [1, "", 1]
    assert rows[0][7:9] == [1, 1] and rows[0][5] == rows[0][6]
    assert rows[2][3] == 0 and rows[2][6] == 6 * 121 * 10


def test_multiplier_scan_reports_infeasible():
    rows = multiplier_scan_rows(4, 8)
    assert [(r[0], r[1], r[2]) for r in rows] == [(5, 0, "exhausted"), (7, 0, "exhausted")]


def test_report_is_deterministic():
    assert report_theorem4(1, [5, 11]) == report_theorem4(1, [5, 11])
