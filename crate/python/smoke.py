"""Smoke test for the cdaimo extension module.

    pip install --no-build-isolation -e crates/python
    python python/smoke.py
"""

import json
import pathlib
import sys

import cdaimo

ROOT = pathlib.Path(__file__).resolve().parent.parent


def main() -> int:
    text = (ROOT / "scenarios" / "usecase.cdaimo").read_text()
    report = json.loads(cdaimo.reason(text, trace=True))
    dec = report["decisions"][0]
    assert dec["collateral_risk_flag"] is True
    assert dec["mitigation_required"] is True
    assert dec["likelihood_band"] == "VeryHigh"

    golden = (ROOT / "crates" / "cli" / "tests" / "golden" / "usecase.json").read_text()
    assert cdaimo.reason(text, trace=True) == golden

    s = cdaimo.Scenario(text)
    assert s.id == "usecase" and not s.warnings
    assert s.holds("dec1", "Effect")
    assert not s.holds("dm1", "Effect")
    assert "hasDataQuality 0.45" in s.explain("dec1 : Effect")
    assert "data av1 hasAttackVectorID 1002" in s.dump(saturated=True)

    w = json.loads(s.whatif(["lm1.hasProbability=0.4"]))
    assert w["whatif"]["decisions"][0]["mitigation_required"] is False
    assert any(c["path"] == "decisions[dec1].mitigation_required" for c in w["diff"])

    s.add("individual sp1 SpatialMetric")
    s.add("data sp1 hasSpread Regional")
    s.add("object eng1 hasSpatialAssessment sp1")
    escalated = json.loads(s.reason())["decisions"][0]
    assert escalated["escalated"] is True
    assert escalated["reported_severity"] == "Catastrophic"

    try:
        s.add("individual x NoSuchClass")
    except cdaimo.ScenarioSyntaxError as e:
        assert e.code == "unknown_name" and e.column == 14, (e.code, e.column)
    else:
        raise AssertionError("bad directive accepted")

    assert cdaimo.normalize_expr("A and (B and C)") == "A and B and C"
    assert cdaimo.seed_dump().startswith("scenario seed\n")
    print("python smoke: ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())
