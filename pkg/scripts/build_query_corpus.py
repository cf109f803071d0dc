"""Build src/mesynth/experiments/data/queries.json: 72 analytics queries (12 tools x 6 templates).

Each query has an ``expected`` argument set (what a correctly grounded call
looks like; it must return rows on the seed-42 30-day stable run) and an
``unconstrained`` recorded call replayed for the free-text condition. The
recorded calls reproduce the reference outcome distribution (31/27/14) of the
unconstrained condition; this script re-runs every call and refuses to write
the file if any outcome or fabrication category drifts.

    python3 scripts/build_query_corpus.py
"""

from __future__ import annotations

import json
import sys
from collections import Counter
from pathlib import Path

from mesynth.experiments.classify import CORRECT, EMPTY_VALID, TOOL_PARAM_FABRICATION
from mesynth.experiments.hallucination import Environment, evaluate_call

OUT = Path(__file__).resolve().parents[1] / "src/mesynth/experiments/data/queries.json"
SEED, DAYS, PROFILE = 42, 30, "stable"

F, E, C = TOOL_PARAM_FABRICATION, EMPTY_VALID, CORRECT
S, G, K = "plausible_synonym", "generic_identifier", "fabricated_code"

# (tool, query text, expected arguments, recorded unconstrained arguments, outcome, category)
CORPUS: dict[str, list[tuple]] = {
    "aerospace": [
        ("cycle_time_analysis", "Show cycle time trends at the CNC machining station for A320 parts",
         {"station_nid": "S1", "program_code": "A320"},
         {"station_nid": "S3", "program_code": "A350", "time_range_days": 1}, E, None),
        ("first_pass_yield", "What is the weekly FPY trend at the bonding station?",
         {"station_nid": "S4", "group_by": "week"}, {"time_range_days": 30}, C, None),
        ("oee_decomposition", "Break down OEE for the drilling station",
         {"station_nid": "S2"}, {"time_range_days": 30}, C, None),
        ("ncr_root_cause_pareto", "Top defects at the riveting station by severity",
         {"station_nid": "S3", "severity": "MAJOR"}, {"station_nid": "Riveting-Station", "severity": "MAJOR"}, F, S),
        ("spc_violation_detection", "SPC violations for profile tolerance at CNC",
         {"station_nid": "S1"}, {"station_nid": "CNC"}, F, S),
        ("quality_action_status", "Show all open corrective actions",
         {"status_filter": "Open"}, {"status_filter": "InProgress", "capa_type": "Corrective"}, E, None),
        ("material_genealogy", "Trace the material genealogy for work order WO-001",
         {"order_nid": "WO-001"}, {"order_nid": "WO-001"}, C, None),
        ("supplier_performance", "Alcoa supplier quality over the last 30 days",
         {"supplier_code": "SUP-AL-ALCOA-01", "time_range_days": 30},
         {"supplier_code": "SUP-ALCOA-01", "time_range_days": 30}, F, K),
        ("change_impact_analysis", "Impact analysis for the latest engineering change",
         {"time_range_days": 30}, {"change_package_nid": "ECN-1"}, F, G),
        ("engineering_change_velocity", "How fast are change packages closing?",
         {"time_range_days": 30}, {"time_range_days": 1}, E, None),
        ("equipment_downtime_analysis", "Equipment downtime causes at the NDT station",
         {"station_nid": "S5"}, {"station_nid": "S5", "time_range_days": 1}, E, None),
        ("production_status_summary", "Current production status for 787 program parts",
         {"program_code": "787"}, {"program_code": "Program-787"}, F, G),
    ],
    "pharma": [
        ("cycle_time_analysis", "Show cycle time trends at the dispensing station for metformin batches",
         {"station_nid": "S1", "program_code": "MET"}, {"station_nid": "Dispensing-Booth", "program_code": "MET"},
         F, S),
        ("first_pass_yield", "What is the weekly FPY trend at the compression station?",
         {"station_nid": "S4", "group_by": "week"}, {"station_nid": "Compression-Station", "group_by": "week"}, F, S),
        ("oee_decomposition", "Break down OEE for the granulation station",
         {"station_nid": "S2"}, {"time_range_days": 30}, C, None),
        ("ncr_root_cause_pareto", "Top defects at the granulation station by severity",
         {"station_nid": "S2", "severity": "MAJOR"}, {"station_nid": "Granulation", "severity": "MAJOR"}, F, S),
        ("spc_violation_detection", "SPC violations for tablet hardness at compression",
         {"station_nid": "S4", "characteristic_nid": "CHR-S4-HARDNESS"},
         {"characteristic_nid": "Tablet-Hardness"}, F, S),
        ("quality_action_status", "Show all open preventive actions",
         {"status_filter": "Open", "capa_type": "Preventive"},
         {"status_filter": "Open", "capa_type": "Corrective"}, E, None),
        ("material_genealogy", "Trace the material genealogy for work order WO-001",
         {"order_nid": "WO-001"}, {"order_nid": "WO-001"}, C, None),
        ("supplier_performance", "Divi's supplier quality over the last 30 days",
         {"supplier_code": "SUP-API-DIVIS-01", "time_range_days": 30},
         {"supplier_code": "SUP-DIVIS-02", "time_range_days": 30}, F, K),
        ("change_impact_analysis", "Impact analysis for the latest engineering change",
         {"time_range_days": 30}, {"time_range_days": 1}, E, None),
        ("engineering_change_velocity", "How fast are change packages closing?",
         {"time_range_days": 30}, {"time_range_days": 1}, E, None),
        ("equipment_downtime_analysis", "Equipment downtime causes at the tablet press",
         {"station_nid": "S4"}, {"station_nid": "S4", "time_range_days": 1}, E, None),
        ("production_status_summary", "Current production status for metformin products",
         {"program_code": "MET"}, {"program_code": "Metformin"}, F, S),
    ],
    "automotive": [
        ("cycle_time_analysis", "Show cycle time trends at the block machining station for EA888 parts",
         {"station_nid": "S1", "program_code": "EA888"},
         {"station_nid": "Block-Machining", "program_code": "EA888"}, F, S),
        ("first_pass_yield", "What is the weekly FPY trend at the leak test station?",
         {"station_nid": "S5", "group_by": "week"}, {"station_nid": "Leak-Test", "group_by": "week"}, F, S),
        ("oee_decomposition", "Break down OEE for the heat treatment station",
         {"station_nid": "S2"}, {"time_range_days": 30}, C, None),
        ("ncr_root_cause_pareto", "Top defects at the washing station by severity",
         {"station_nid": "S4", "severity": "MAJOR"},
         {"station_nid": "S4", "severity": "CRITICAL", "time_range_days": 7}, E, None),
        ("spc_violation_detection", "SPC violations for bore diameter at block machining",
         {"station_nid": "S1", "characteristic_nid": "CHR-S1-BORE"},
         {"characteristic_nid": "CHR-S5-LEAKRATE", "station_nid": "S1"}, E, None),
        ("quality_action_status", "Show all in-progress corrective actions",
         {"status_filter": "InProgress", "capa_type": "Corrective"},
         {"status_filter": "in_progress", "capa_type": "Corrective"}, F, S),
        ("material_genealogy", "Trace the material genealogy for the first engine block order",
         {"order_nid": "WO-001"}, {"order_nid": "Order-1"}, F, G),
        ("supplier_performance", "Nemak supplier quality over the last 30 days",
         {"supplier_code": "SUP-CAST-NEMAK-01", "time_range_days": 30}, {"time_range_days": 30}, C, None),
        ("change_impact_analysis", "Impact analysis for the latest engineering change",
         {"time_range_days": 30}, {"time_range_days": 1}, E, None),
        ("engineering_change_velocity", "How fast are change packages closing?",
         {"time_range_days": 30}, {"time_range_days": 1}, E, None),
        ("equipment_downtime_analysis", "Equipment downtime causes at the leak test station",
         {"station_nid": "S5"}, {"station_nid": "S5", "time_range_days": 1}, E, None),
        ("production_status_summary", "Current production status for line 2 engine parts",
         {"program_code": "EA888"}, {"program_code": "Line-2"}, F, G),
    ],
    "electronics": [
        ("cycle_time_analysis", "Show cycle time trends at the paste printing station for ECU boards",
         {"station_nid": "S1", "program_code": "ECU"}, {"time_range_days": 30}, C, None),
        ("first_pass_yield", "What is the weekly FPY trend at the reflow station?",
         {"station_nid": "S3", "group_by": "week"}, {"station_nid": "Reflow-Oven", "group_by": "week"}, F, S),
        ("oee_decomposition", "Break down OEE for the placement cell",
         {"station_nid": "S2"}, {"station_nid": "Cell-3"}, F, G),
        ("ncr_root_cause_pareto", "Top defects at optical inspection by severity",
         {"station_nid": "S4", "severity": "MAJOR"},
         {"station_nid": "Optical-Inspection", "severity": "MAJOR"}, F, S),
        ("spc_violation_detection", "SPC violations for peak reflow temperature",
         {"characteristic_nid": "CHR-S3-PEAK"}, {"characteristic_nid": "CHR-S3-PEAK", "station_nid": "S4"}, E, None),
        ("quality_action_status", "Show all in-progress corrective actions",
         {"status_filter": "InProgress", "capa_type": "Corrective"}, {"status_filter": "Open"}, E, None),
        ("material_genealogy", "Trace the material genealogy for work order WO-001",
         {"order_nid": "WO-001"}, {"order_nid": "WO-001"}, C, None),
        ("supplier_performance", "Kester supplier quality over the last 30 days",
         {"supplier_code": "SUP-SLD-KESTER-01", "time_range_days": 30},
         {"supplier_code": "SUP-KESTER-01", "time_range_days": 30}, F, K),
        ("change_impact_analysis", "Impact analysis for the latest engineering change",
         {"time_range_days": 30}, {"time_range_days": 1}, E, None),
        ("engineering_change_velocity", "How fast are change packages closing this week?",
         {"time_range_days": 30}, {"time_range_days": 3}, E, None),
        ("equipment_downtime_analysis", "Equipment downtime causes at the reflow ovens",
         {"station_nid": "S3"}, {"station_nid": "S3", "time_range_days": 1}, E, None),
        ("production_status_summary", "Current production status for line 1 products",
         {"program_code": "ECU"}, {"program_code": "Line-1"}, F, G),
    ],
    "beverages": [
        ("cycle_time_analysis", "Show cycle time trends at the labeler for energy drinks",
         {"station_nid": "S9", "program_code": "ENERGY"},
         {"station_nid": "S9", "program_code": "ENERGY", "time_range_days": 1}, E, None),
        ("first_pass_yield", "What is the weekly FPY trend at the filler?",
         {"station_nid": "S7", "group_by": "week"}, {"time_range_days": 30}, C, None),
        ("oee_decomposition", "Break down OEE for the filling line",
         {"station_nid": "S7"}, {"station_nid": "Line-2"}, F, G),
        ("ncr_root_cause_pareto", "Top defects at depalletizing by severity",
         {"station_nid": "S5", "severity": "MINOR"}, {"station_nid": "S5", "severity": "CRITICAL"}, E, None),
        ("spc_violation_detection", "SPC violations for fill height",
         {"characteristic_nid": "CHR-S7-FILL"}, {"characteristic_nid": "Fill-Height"}, F, S),
        ("quality_action_status", "Show all open corrective actions",
         {"status_filter": "Open", "capa_type": "Corrective"}, {"status_filter": "open"}, F, S),
        ("material_genealogy", "Trace the material genealogy for batch 7",
         {"order_nid": "WO-007"}, {"order_nid": "Batch-7"}, F, G),
        ("supplier_performance", "Cargill supplier quality over the last 30 days",
         {"supplier_code": "SUP-SWT-CARGILL-01", "time_range_days": 30}, {"time_range_days": 30}, C, None),
        ("change_impact_analysis", "Impact analysis for engineering change 17",
         {"time_range_days": 30}, {"change_package_nid": "CP-2026-017"}, F, K),
        ("engineering_change_velocity", "How fast are change packages closing?",
         {"time_range_days": 30}, {"time_range_days": 1}, E, None),
        ("equipment_downtime_analysis", "Equipment downtime causes at the labeler",
         {"station_nid": "S9"}, {"station_nid": "S9", "time_range_days": 1}, E, None),
        ("production_status_summary", "Current production status for cola products",
         {"program_code": "COLA"}, {"program_code": "Cola"}, F, S),
    ],
    "warehousing": [
        ("cycle_time_analysis", "Show cycle time trends at receiving for grocery orders",
         {"station_nid": "S1", "program_code": "GROCERY"}, {"time_range_days": 30}, C, None),
        ("first_pass_yield", "What is the weekly FPY trend in picking?",
         {"station_nid": "S3", "group_by": "week"}, {"station_nid": "Picking-Zone", "group_by": "week"}, F, S),
        ("oee_decomposition", "Break down OEE for packing",
         {"station_nid": "S4"}, {"time_range_days": 30}, C, None),
        ("ncr_root_cause_pareto", "Top defects at shipping by severity",
         {"station_nid": "S6", "severity": "MAJOR"}, {"station_nid": "S6", "severity": "CRITICAL"}, E, None),
        ("spc_violation_detection", "SPC violations for pick accuracy",
         {"characteristic_nid": "CHR-S3-PICKACC"}, {"characteristic_nid": "CHR-S3-PICKACC", "station_nid": "S6"},
         E, None),
        ("quality_action_status", "Show all open corrective actions",
         {"status_filter": "Open", "capa_type": "Corrective"}, {"status_filter": "OPEN"}, F, S),
        ("material_genealogy", "Trace the material genealogy for the first order",
         {"order_nid": "WO-001"}, {"order_nid": "Order-1"}, F, G),
        ("supplier_performance", "WestRock supplier quality over the last 30 days",
         {"supplier_code": "SUP-CTN-WESTROCK-01", "time_range_days": 30}, {"time_range_days": 30}, C, None),
        ("change_impact_analysis", "Impact analysis for the latest engineering change",
         {"time_range_days": 30}, {"time_range_days": 1}, E, None),
        ("engineering_change_velocity", "How fast are change packages closing?",
         {"time_range_days": 30}, {"time_range_days": 1}, E, None),
        ("equipment_downtime_analysis", "Equipment downtime causes at packing",
         {"station_nid": "S4"}, {"station_nid": "S4", "time_range_days": 1}, E, None),
        ("production_status_summary", "Current production status for grocery orders",
         {"program_code": "GROCERY"}, {"program_code": "Grocery"}, F, S),
    ],
}


def main() -> int:
    queries = []
    problems = []
    for tid, rows in CORPUS.items():
        env = Environment.build(tid, SEED, DAYS, PROFILE)
        if len(rows) != 12 or len({r[0] for r in rows}) != 12:
            problems.append(f"{tid}: expected one query per tool")
        for i, (tool, text, expected, recorded, outcome, category) in enumerate(rows, start=1):
            qid = f"{tid}-{i:02d}"
            cls, n, err = evaluate_call(env, tool, expected, "constrained")
            if cls.outcome != CORRECT:
                problems.append(f"{qid} expected call {expected}: {cls.outcome} ({err})")
            cls, n, err = evaluate_call(env, tool, recorded, "unconstrained")
            if cls.outcome != outcome or cls.category != category:
                problems.append(f"{qid} recorded call {recorded}: got {cls.outcome}/{cls.category} rows={n} "
                                f"want {outcome}/{category} ({err})")
            queries.append({"id": qid, "template_id": tid, "tool": tool, "text": text, "expected": expected,
                            "unconstrained": {"tool": tool, "arguments": recorded},
                            "recorded_outcome": outcome, "recorded_category": category})
    if problems:
        print("\n".join(problems), file=sys.stderr)
        return 1
    tally = Counter(q["recorded_outcome"] for q in queries)
    cats = Counter(q["recorded_category"] for q in queries if q["recorded_category"])
    print(dict(tally), dict(cats))
    doc = {"seed": SEED, "days": DAYS, "profile": PROFILE, "queries": queries}
    OUT.write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")
    print(f"wrote {OUT}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
