"""The eight acceptance criteria, each at its stated tolerance.

Every test prints one ``PASS``/``FAIL`` line.  Criterion 5 asks for the
Carlitz-Euler relation at theta-degree <= 2; the minimal relation has
theta-degree q, so it is expected to fail for q >= 3 and the relation is
checked separately at degree q.
"""

import json

import pytest

from ffzeta import acceptance


def report(capsys, result):
    with capsys.disabled():
        print("\n" + result.line())
        if not result.ok:
            print(json.dumps(result.to_json()["detail"], sort_keys=True)[:2000])
    return result


@pytest.mark.parametrize("number", [1, 2, 3, 4, 6, 7, 8])
def test_criterion(capsys, number):
    result = report(capsys, acceptance.run_criterion(number))
    assert result.ok


@pytest.mark.xfail(strict=True, reason="minimal Carlitz-Euler relation has theta-degree q > 2 for q >= 3")
def test_criterion_5(capsys):
    result = report(capsys, acceptance.run_criterion(5))
    assert result.ok


def test_carlitz_euler_relation_at_degree_q():
    assert acceptance.euler_control_at_degree_q()
