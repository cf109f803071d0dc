"""Regenerate the six shipped template documents under src/mesynth/templates/.

Domain tables below are the editable source. Station S1 values for aerospace and
pharma, station names, and the per-template counts (stations, shifts, products,
failure codes, OEE/FPY targets, throughput) follow the reference configuration
summary; every other value is synthetic and chosen only to be internally
consistent. Unit counts per work center are sized from demand so that orders
flow through within roughly a day.

    python scripts/build_templates.py
"""

from __future__ import annotations

import json
import math
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "mesynth" / "templates"
ALL_DAYS = ["Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"]
MON_SAT = ALL_DAYS[:6]
MON_FRI = ALL_DAYS[:5]
TWO_SHIFTS = [("Day", "06:00", "14:00", "10:00"), ("Eve", "14:00", "22:00", "18:00")]
THREE_SHIFTS = [("Day", "06:00", "14:00", "10:00"), ("Eve", "14:00", "22:00", "18:00"),
                ("Night", "22:00", "06:00", "02:00")]
TARGET_UTILISATION = 0.6

DISPOSITIONS = [("Use-As-Is", 0.35), ("Rework", 0.40), ("Scrap", 0.15), ("Return-To-Vendor", 0.10)]
CP_PARAMS = {
    "change_types": ["ECR-Design", "ECN-Process", "Deviation", "BOP-Revision"],
    "statuses": ["Open", "InReview", "Approved", "Closed"],
    "status_durations_days": [0.5, 4.0],
    "affected_window_days": 14,
}


def var(nid, name, nominal, tol, uom):
    return {"nid": nid, "name": name, "kind": "variable", "nominal": nominal,
            "lsl": round(nominal - tol, 6), "usl": round(nominal + tol, 6), "uom": uom}


def attr(nid, name):
    return {"nid": nid, "name": name, "kind": "attribute", "nominal": 0.0, "lsl": 0.0, "usl": 0.0,
            "uom": "count"}


TEMPLATES: dict[str, dict] = {}

TEMPLATES["aerospace"] = dict(
    description="Aerostructures detail fabrication and assembly (linear layout).",
    plant=("PLT-AERO-01", "Wichita Aerostructures Plant"),
    shifts=TWO_SHIFTS, days=ALL_DAYS, break_min=30, pm_hours=4.0,
    oee=(0.78, 0.85), fpy=(0.94, 0.97), wip=(10, 60), wdpy=250,
    areas=[("AREA-FAB", "Detail Fabrication", ["S1", "S2"]),
           ("AREA-ASSY", "Structural Assembly", ["S3", "S4", "S6"]),
           ("AREA-QA", "Nondestructive Inspection", ["S5"])],
    stations=[
        ("S1", "CNC Machining", "WC-CNC", (120, 480), (30, 60), 0.95),
        ("S2", "Drilling", "WC-DRILL", (60, 180), (15, 30), 0.96),
        ("S3", "Riveting", "WC-RIVET", (90, 240), (20, 40), 0.95),
        ("S4", "Bonding", "WC-BOND", (360, 720), (45, 90), 0.93),
        ("S5", "NDT", "WC-NDT", (45, 120), (10, 20), 0.93),
        ("S6", "Final Assembly", "WC-ASSY", (180, 360), (30, 60), 0.96),
    ],
    products=[
        ("A320-WR-1001", "Wing Rib, Inboard", "A320", 850),
        ("787-FS-2002", "Fuselage Stringer", "787", 500),
        ("A350-SF-3003", "Spar Fitting", "A350", 400),
        ("737-FF-4004", "Fuselage Frame Segment", "737", 250),
    ],
    suppliers=[
        ("SUP-AL-ALCOA-01", "Alcoa Aerospace Aluminum", "Metals", 21, 850.0),
        ("SUP-CF-TORAY-01", "Toray Composite Materials", "Composites", 35, 1200.0),
        ("SUP-TI-TIMET-01", "TIMET Titanium", "Metals", 42, 1500.0),
        ("SUP-FS-LISI-01", "LISI Aerospace Fasteners", "Fasteners", 14, 150.0),
        ("SUP-AD-HENKEL-01", "Henkel Structural Adhesives", "Chemicals", 10, 400.0),
    ],
    raw=[
        ("RM-AL7075-PLATE", "Aluminum 7075-T7351 plate", "kg", "SUP-AL-ALCOA-01", 14.5),
        ("RM-AL2024-SHEET", "Aluminum 2024-T3 sheet", "kg", "SUP-AL-ALCOA-01", 11.0),
        ("RM-TI6AL4V-BAR", "Titanium Ti-6Al-4V bar", "kg", "SUP-TI-TIMET-01", 62.0),
        ("RM-CFRP-PREPREG", "Carbon fibre prepreg tape", "m2", "SUP-CF-TORAY-01", 95.0),
        ("RM-HILOK-FASTENER", "Hi-Lok fastener kit", "ea", "SUP-FS-LISI-01", 4.2),
        ("RM-ADH-EA9394", "Epoxy paste adhesive EA9394", "kg", "SUP-AD-HENKEL-01", 120.0),
        ("RM-SEALANT-PR1776", "Polysulfide sealant PR-1776", "kg", "SUP-AD-HENKEL-01", 88.0),
    ],
    bom={
        "A320-WR-1001": {"S1": ["RM-AL7075-PLATE"], "S3": ["RM-HILOK-FASTENER"], "S4": ["RM-ADH-EA9394"],
                         "S6": ["RM-SEALANT-PR1776"]},
        "787-FS-2002": {"S1": ["RM-CFRP-PREPREG"], "S3": ["RM-HILOK-FASTENER"], "S4": ["RM-ADH-EA9394"],
                        "S6": ["RM-SEALANT-PR1776"]},
        "A350-SF-3003": {"S1": ["RM-TI6AL4V-BAR"], "S3": ["RM-HILOK-FASTENER"], "S4": ["RM-ADH-EA9394"],
                         "S6": ["RM-SEALANT-PR1776"]},
        "737-FF-4004": {"S1": ["RM-AL2024-SHEET"], "S3": ["RM-HILOK-FASTENER"], "S4": ["RM-ADH-EA9394"],
                        "S6": ["RM-SEALANT-PR1776"]},
    },
    consumption={"S1": [("RM-AL7075-PLATE", 0.0)], "S4": [("RM-ADH-EA9394", 0.25)], "S3": [("RM-HILOK-FASTENER", 48)],
                 "S6": [("RM-SEALANT-PR1776", 0.1)]},
    failure_codes={
        "S1": [("CNC-BURR-001", "Burr on machined edge", "MINOR"),
               ("CNC-TOOLWEAR-002", "Tool wear surface finish out of tolerance", "MAJOR"),
               ("CNC-DIM-003", "Profile dimension out of tolerance", "MAJOR"),
               ("CNC-CHATTER-004", "Chatter marks on pocket floor", "MINOR")],
        "S2": [("DRL-OVAL-001", "Hole ovality exceeds limit", "MAJOR"),
               ("DRL-DELAM-002", "Exit delamination", "MAJOR"),
               ("DRL-POS-003", "Hole position out of tolerance", "CRITICAL"),
               ("DRL-BURR-004", "Exit burr", "MINOR")],
        "S3": [("RIV-HEAD-001", "Rivet head height out of spec", "MINOR"),
               ("RIV-GAP-002", "Sheet gap under fastener", "MAJOR"),
               ("RIV-CRACK-003", "Cracked rivet tail", "CRITICAL"),
               ("RIV-MISS-004", "Missing fastener", "MAJOR")],
        "S4": [("BND-VOID-001", "Bond-line void", "MAJOR"),
               ("BND-THK-002", "Bond-line thickness out of tolerance", "MAJOR"),
               ("BND-CURE-003", "Incomplete adhesive cure", "CRITICAL"),
               ("BND-CONTAM-004", "Surface contamination before bonding", "MINOR")],
        "S5": [("NDT-INDIC-001", "Ultrasonic indication above threshold", "CRITICAL"),
               ("NDT-POROS-002", "Porosity above acceptance level", "MAJOR"),
               ("NDT-CAL-003", "Probe calibration drift", "MINOR"),
               ("NDT-DOC-004", "Incomplete inspection record", "MINOR")],
        "S6": [("ASM-TORQ-001", "Fastener torque out of range", "MAJOR"),
               ("ASM-FOD-002", "Foreign object debris found", "CRITICAL"),
               ("ASM-ALIGN-003", "Assembly misalignment", "MAJOR"),
               ("ASM-SEAL-004", "Sealant squeeze-out incomplete", "MINOR")],
    },
    characteristics={
        "S1": [var("CHR-S1-PROFILE", "Profile tolerance", 0.0, 0.25, "mm"),
               var("CHR-S1-RA", "Surface roughness Ra", 1.6, 0.8, "um"),
               var("CHR-S1-WEB", "Web thickness", 2.5, 0.1, "mm")],
        "S2": [var("CHR-S2-HOLEDIA", "Hole diameter", 6.35, 0.05, "mm"),
               var("CHR-S2-POS", "Hole true position", 0.0, 0.15, "mm"),
               var("CHR-S2-CSK", "Countersink depth", 1.2, 0.08, "mm")],
        "S3": [var("CHR-S3-HEAD", "Rivet head height", 1.0, 0.1, "mm"),
               var("CHR-S3-GAP", "Sheet gap", 0.05, 0.05, "mm"),
               var("CHR-S3-PITCH", "Fastener pitch", 25.0, 0.5, "mm")],
        "S4": [var("CHR-S4-BONDLINE", "Bond-line thickness", 0.2, 0.08, "mm"),
               var("CHR-S4-CURETEMP", "Cure temperature", 121.0, 6.0, "degC"),
               var("CHR-S4-LAPSHEAR", "Lap shear strength", 30.0, 4.0, "MPa")],
        "S5": [var("CHR-S5-UTAMP", "Ultrasonic amplitude", 80.0, 10.0, "%FSH"),
               var("CHR-S5-POROSITY", "Porosity level", 1.0, 1.0, "%"),
               attr("CHR-S5-INDICATIONS", "Rejectable indications")],
        "S6": [var("CHR-S6-TORQUE", "Fastener torque", 12.0, 1.2, "Nm"),
               var("CHR-S6-STEP", "Panel step", 0.0, 0.3, "mm"),
               attr("CHR-S6-FOD", "FOD findings")],
    },
    certs=[("CERT-CNC", "CNC Operator Level 2", 730), ("CERT-DRILL", "Precision Drilling", 730),
           ("CERT-RIVET", "Structural Riveting", 730), ("CERT-BOND", "Adhesive Bonding (NADCAP)", 365),
           ("CERT-NDT-UT", "NDT Ultrasonic Level II", 365), ("CERT-ASSY", "Final Assembly", 730)],
    skills=[("SKL-GDT", "GD&T interpretation"), ("SKL-CAM", "CAM program proving"),
            ("SKL-SHEETMETAL", "Sheet metal handling"), ("SKL-COMPOSITE", "Composite layup"),
            ("SKL-UT", "Ultrasonic scanning"), ("SKL-TORQUE", "Torque verification")],
    station_skills={"S1": ["SKL-GDT", "SKL-CAM"], "S2": ["SKL-GDT"], "S3": ["SKL-SHEETMETAL"],
                    "S4": ["SKL-COMPOSITE"], "S5": ["SKL-UT"], "S6": ["SKL-TORQUE", "SKL-GDT"]},
    tools=[("TL-ENDMILL-12", "12 mm carbide end mill", 90), ("TL-DRILL-635", "6.35 mm drill motor", 180),
           ("TL-RIVETGUN", "Pneumatic rivet gun", 180), ("TL-AUTOCLAVE-TC", "Autoclave thermocouple set", 90),
           ("TL-UT-PROBE", "5 MHz UT probe", 30), ("TL-TORQUE-WR", "Click torque wrench", 90)],
    station_tools={"S1": ["TL-ENDMILL-12"], "S2": ["TL-DRILL-635"], "S3": ["TL-RIVETGUN"],
                   "S4": ["TL-AUTOCLAVE-TC"], "S5": ["TL-UT-PROBE"], "S6": ["TL-TORQUE-WR"]},
    ncr_durations={"New": (120, 480), "InProcess": (1440, 4320), "PendingDisposition": (1440, 5760)},
    capa_rate=0.2, downtime_prob=0.02, downtime_dur=(30, 240), expedite_rate=0.05, bop_days=14,
    ct_variance=0.15, cp_rate=0.3, capa_days=(7.0, 45.0),
)

TEMPLATES["pharma"] = dict(
    description="Oral solid dose manufacturing in a cleanroom suite.",
    plant=("PLT-PHARMA-01", "Raleigh Solid Dose Facility"),
    shifts=TWO_SHIFTS, days=MON_SAT, break_min=30, pm_hours=3.0,
    oee=(0.75, 0.82), fpy=(0.96, 0.99), wip=(10, 60), wdpy=300,
    areas=[("AREA-DISP", "Dispensary", ["S1"]),
           ("AREA-PROC", "Processing Suite", ["S2", "S3", "S4", "S5"]),
           ("AREA-PACK", "Packaging Hall", ["S6"])],
    stations=[
        ("S1", "Dispensing", "WC-DISPENSE", (20, 45), (15, 30), 0.99),
        ("S2", "Granulation", "WC-GRAN", (60, 120), (30, 45), 0.97),
        ("S3", "Blending", "WC-BLEND", (30, 60), (20, 30), 0.98),
        ("S4", "Compression", "WC-COMPRESS", (90, 180), (30, 60), 0.96),
        ("S5", "Film Coating", "WC-COAT", (60, 150), (30, 45), 0.97),
        ("S6", "Packaging", "WC-PACK", (45, 90), (20, 40), 0.98),
    ],
    products=[
        ("PH-MET-500", "Metformin HCl 500 mg Tablets", "MET", 1500),
        ("PH-ATV-020", "Atorvastatin 20 mg Tablets", "ATV", 900),
        ("PH-AML-005", "Amlodipine 5 mg Tablets", "AML", 720),
        ("PH-LIS-010", "Lisinopril 10 mg Tablets", "LIS", 480),
    ],
    suppliers=[
        ("SUP-API-DIVIS-01", "Divi's Laboratories API", "API", 60, 2500.0),
        ("SUP-EXC-DFE-01", "DFE Pharma Excipients", "Excipients", 21, 300.0),
        ("SUP-COAT-COLORCON-01", "Colorcon Coatings", "Coatings", 28, 450.0),
        ("SUP-PKG-AMCOR-01", "Amcor Pharma Packaging", "Packaging", 14, 120.0),
    ],
    raw=[
        ("RM-API-METFORMIN", "Metformin HCl API", "kg", "SUP-API-DIVIS-01", 45.0),
        ("RM-API-ATORVA", "Atorvastatin calcium API", "kg", "SUP-API-DIVIS-01", 900.0),
        ("RM-API-AMLO", "Amlodipine besylate API", "kg", "SUP-API-DIVIS-01", 650.0),
        ("RM-API-LISIN", "Lisinopril dihydrate API", "kg", "SUP-API-DIVIS-01", 400.0),
        ("RM-EXC-MCC", "Microcrystalline cellulose", "kg", "SUP-EXC-DFE-01", 6.5),
        ("RM-EXC-LACTOSE", "Lactose monohydrate", "kg", "SUP-EXC-DFE-01", 4.0),
        ("RM-COAT-OPADRY", "Opadry film coating", "kg", "SUP-COAT-COLORCON-01", 38.0),
        ("RM-PKG-BLISTER", "PVC/Alu blister foil", "m2", "SUP-PKG-AMCOR-01", 1.8),
    ],
    bom={
        "PH-MET-500": {"S1": ["RM-API-METFORMIN", "RM-EXC-MCC"], "S5": ["RM-COAT-OPADRY"], "S6": ["RM-PKG-BLISTER"]},
        "PH-ATV-020": {"S1": ["RM-API-ATORVA", "RM-EXC-LACTOSE"], "S5": ["RM-COAT-OPADRY"], "S6": ["RM-PKG-BLISTER"]},
        "PH-AML-005": {"S1": ["RM-API-AMLO", "RM-EXC-MCC"], "S5": ["RM-COAT-OPADRY"], "S6": ["RM-PKG-BLISTER"]},
        "PH-LIS-010": {"S1": ["RM-API-LISIN", "RM-EXC-LACTOSE"], "S5": ["RM-COAT-OPADRY"], "S6": ["RM-PKG-BLISTER"]},
    },
    consumption={"S1": [("RM-EXC-MCC", 25.0)], "S5": [("RM-COAT-OPADRY", 3.0)], "S6": [("RM-PKG-BLISTER", 40.0)]},
    failure_codes={
        "S1": [("DSP-WT-001", "Weighed quantity outside tolerance", "MAJOR"),
               ("DSP-LBL-002", "Container label mismatch", "CRITICAL"),
               ("DSP-CONT-003", "Cross-contamination risk at booth", "CRITICAL"),
               ("DSP-SEQ-004", "Dispensing sequence deviation", "MINOR"),
               ("DSP-ENV-005", "Booth airflow alarm", "MINOR")],
        "S2": [("GRN-LOD-001", "Loss on drying out of range", "MAJOR"),
               ("GRN-PSD-002", "Granule size distribution out of spec", "MAJOR"),
               ("GRN-END-003", "Endpoint torque not reached", "MINOR"),
               ("GRN-LUMP-004", "Oversized lumps", "MINOR"),
               ("GRN-TEMP-005", "Inlet air temperature excursion", "MAJOR")],
        "S3": [("BLD-CU-001", "Content uniformity failure", "CRITICAL"),
               ("BLD-TIME-002", "Blend time deviation", "MINOR"),
               ("BLD-SEG-003", "Segregation on discharge", "MAJOR"),
               ("BLD-LUB-004", "Lubricant over-blending", "MINOR"),
               ("BLD-FOR-005", "Foreign particle in blend", "CRITICAL")],
        "S4": [("CMP-HARD-001", "Tablet hardness out of range", "MAJOR"),
               ("CMP-WT-002", "Tablet weight variation", "MAJOR"),
               ("CMP-CAP-003", "Capping", "MINOR"),
               ("CMP-FRI-004", "Friability failure", "MAJOR")],
        "S5": [("COT-DEF-001", "Coating defect (peeling)", "MAJOR"),
               ("COT-COL-002", "Colour variation", "MINOR"),
               ("COT-WG-003", "Coating weight gain out of range", "MAJOR"),
               ("COT-TWIN-004", "Twinning", "MINOR")],
        "S6": [("PKG-SEAL-001", "Blister seal integrity failure", "CRITICAL"),
               ("PKG-LOT-002", "Lot/expiry print error", "MAJOR"),
               ("PKG-CNT-003", "Count discrepancy", "MAJOR"),
               ("PKG-LEAF-004", "Missing patient leaflet", "MINOR")],
    },
    characteristics={
        "S1": [var("CHR-S1-NETWT", "Dispensed net weight", 25.0, 0.25, "kg"),
               var("CHR-S1-RH", "Booth relative humidity", 40.0, 10.0, "%RH"),
               attr("CHR-S1-LABEL", "Label verification failures")],
        "S2": [var("CHR-S2-LOD", "Loss on drying", 2.0, 1.0, "%"),
               var("CHR-S2-D50", "Granule median size d50", 250.0, 60.0, "um"),
               var("CHR-S2-TORQUE", "Granulation endpoint torque", 18.0, 3.0, "Nm")],
        "S3": [var("CHR-S3-CU", "Blend content uniformity", 100.0, 5.0, "%LC"),
               var("CHR-S3-RSD", "Blend RSD", 2.0, 2.0, "%"),
               var("CHR-S3-BULKDEN", "Bulk density", 0.55, 0.08, "g/ml")],
        "S4": [var("CHR-S4-HARDNESS", "Tablet hardness", 120.0, 20.0, "N"),
               var("CHR-S4-WEIGHT", "Tablet weight", 600.0, 18.0, "mg"),
               var("CHR-S4-THICK", "Tablet thickness", 5.2, 0.2, "mm")],
        "S5": [var("CHR-S5-WTGAIN", "Coating weight gain", 3.0, 0.6, "%"),
               var("CHR-S5-BEDTEMP", "Bed temperature", 42.0, 4.0, "degC"),
               var("CHR-S5-DISINT", "Disintegration time", 8.0, 7.0, "min")],
        "S6": [var("CHR-S6-SEAL", "Seal integrity pressure", 300.0, 40.0, "mbar"),
               var("CHR-S6-COUNT", "Tablets per carton", 30.0, 0.0, "ea"),
               attr("CHR-S6-PRINT", "Print verification failures")],
    },
    certs=[("CERT-GMP", "cGMP Fundamentals", 365), ("CERT-DISP", "Dispensary Operator", 365),
           ("CERT-GRAN", "Granulation Operator", 365), ("CERT-COMP", "Tablet Press Operator", 365),
           ("CERT-COAT", "Coating Pan Operator", 365), ("CERT-PACK", "Blister Line Operator", 365)],
    skills=[("SKL-ASEPTIC", "Cleanroom gowning"), ("SKL-WEIGH", "Analytical weighing"),
            ("SKL-FLUIDBED", "Fluid bed operation"), ("SKL-PRESS", "Press setup"),
            ("SKL-SPRAY", "Spray gun tuning"), ("SKL-SERIAL", "Serialisation")],
    station_skills={"S1": ["SKL-WEIGH", "SKL-ASEPTIC"], "S2": ["SKL-FLUIDBED"], "S3": ["SKL-ASEPTIC"],
                    "S4": ["SKL-PRESS"], "S5": ["SKL-SPRAY"], "S6": ["SKL-SERIAL"]},
    station_certs={"S1": ["CERT-GMP", "CERT-DISP"], "S2": ["CERT-GMP", "CERT-GRAN"], "S3": ["CERT-GMP", "CERT-GRAN"],
                   "S4": ["CERT-GMP", "CERT-COMP"], "S5": ["CERT-GMP", "CERT-COAT"], "S6": ["CERT-GMP", "CERT-PACK"]},
    tools=[("TL-BALANCE-60", "60 kg platform balance", 30), ("TL-HIGHSHEAR", "High-shear granulator bowl", 180),
           ("TL-VBLENDER", "V-blender shell", 180), ("TL-PUNCHSET", "Tablet punch set", 90),
           ("TL-SPRAYGUN", "Coating spray gun", 90), ("TL-FORMTOOL", "Blister forming tool", 180)],
    station_tools={"S1": ["TL-BALANCE-60"], "S2": ["TL-HIGHSHEAR"], "S3": ["TL-VBLENDER"], "S4": ["TL-PUNCHSET"],
                   "S5": ["TL-SPRAYGUN"], "S6": ["TL-FORMTOOL"]},
    ncr_durations={"New": (60, 240), "InProcess": (480, 1440), "PendingDisposition": (480, 2880)},
    capa_rate=0.25, downtime_prob=0.015, downtime_dur=(30, 180), expedite_rate=0.03, bop_days=10,
    ct_variance=0.10, cp_rate=0.4, capa_days=(5.0, 30.0),
)

TEMPLATES["automotive"] = dict(
    description="Powertrain component machining and assembly (U-shaped cell).",
    plant=("PLT-AUTO-01", "Chattanooga Powertrain Plant"),
    shifts=THREE_SHIFTS, days=ALL_DAYS, break_min=30, pm_hours=4.0,
    oee=(0.82, 0.88), fpy=(0.95, 0.98), wip=(10, 60), wdpy=350,
    areas=[("AREA-MACH", "Machining", ["S1", "S2", "S3"]),
           ("AREA-ASSY", "Assembly and Test", ["S4", "S5", "S6"])],
    stations=[
        ("S1", "Block Machining", "WC-MACH", (40, 80), (15, 30), 0.96),
        ("S2", "Heat Treatment", "WC-HEAT", (90, 150), (20, 40), 0.97),
        ("S3", "Precision Grinding", "WC-GRIND", (30, 70), (10, 25), 0.96),
        ("S4", "Parts Washing", "WC-WASH", (20, 40), (5, 15), 0.98),
        ("S5", "Leak Test", "WC-LEAK", (20, 45), (5, 10), 0.95),
        ("S6", "Engine Assembly", "WC-ASSY", (60, 120), (15, 30), 0.97),
    ],
    products=[
        ("AU-CB-EA211", "Cylinder Block 1.4L", "EA211", 2100),
        ("AU-CH-EA888", "Cylinder Head 2.0L", "EA888", 1400),
        ("AU-CS-K9K", "Crankshaft 1.5L", "K9K", 1225),
        ("AU-CR-B48", "Connecting Rod Set", "B48", 875),
    ],
    suppliers=[
        ("SUP-CAST-NEMAK-01", "Nemak Aluminum Castings", "Castings", 28, 600.0),
        ("SUP-FORG-THYSSEN-01", "thyssenkrupp Forged Parts", "Forgings", 35, 700.0),
        ("SUP-GSK-ELRING-01", "ElringKlinger Gaskets", "Sealing", 14, 80.0),
        ("SUP-FST-BOSSARD-01", "Bossard Fastening", "Fasteners", 10, 40.0),
    ],
    raw=[
        ("RM-CAST-BLOCK", "Aluminum block casting", "ea", "SUP-CAST-NEMAK-01", 180.0),
        ("RM-CAST-HEAD", "Aluminum head casting", "ea", "SUP-CAST-NEMAK-01", 140.0),
        ("RM-FORG-CRANK", "Forged crankshaft blank", "ea", "SUP-FORG-THYSSEN-01", 95.0),
        ("RM-FORG-CONROD", "Forged con-rod blank", "ea", "SUP-FORG-THYSSEN-01", 22.0),
        ("RM-GASKET-MLS", "MLS head gasket", "ea", "SUP-GSK-ELRING-01", 12.0),
        ("RM-BOLT-M10", "M10 torque-to-yield bolt kit", "ea", "SUP-FST-BOSSARD-01", 3.5),
    ],
    bom={
        "AU-CB-EA211": {"S1": ["RM-CAST-BLOCK"], "S6": ["RM-GASKET-MLS", "RM-BOLT-M10"]},
        "AU-CH-EA888": {"S1": ["RM-CAST-HEAD"], "S6": ["RM-GASKET-MLS", "RM-BOLT-M10"]},
        "AU-CS-K9K": {"S1": ["RM-FORG-CRANK"], "S6": ["RM-BOLT-M10"]},
        "AU-CR-B48": {"S1": ["RM-FORG-CONROD"], "S6": ["RM-BOLT-M10"]},
    },
    consumption={"S6": [("RM-BOLT-M10", 10)]},
    failure_codes={
        "S1": [("MCH-DIM-001", "Bore diameter out of tolerance", "MAJOR"),
               ("MCH-POR-002", "Casting porosity exposed", "MAJOR"),
               ("MCH-BURR-003", "Burr at oil gallery", "MINOR"),
               ("MCH-TOOL-004", "Tool breakage mark", "MINOR"),
               ("MCH-POS-005", "Hole position out of tolerance", "CRITICAL")],
        "S2": [("HT-HARD-001", "Case hardness below spec", "MAJOR"),
               ("HT-DIST-002", "Heat-treat distortion", "MAJOR"),
               ("HT-DEPTH-003", "Case depth out of range", "MAJOR"),
               ("HT-SCALE-004", "Surface scale", "MINOR"),
               ("HT-CRACK-005", "Quench crack", "CRITICAL")],
        "S3": [("GRD-RA-001", "Surface finish Ra exceeded", "MINOR"),
               ("GRD-BURN-002", "Grinding burn", "CRITICAL"),
               ("GRD-DIA-003", "Journal diameter out of tolerance", "MAJOR"),
               ("GRD-ROUND-004", "Roundness out of spec", "MAJOR"),
               ("GRD-CHAT-005", "Chatter marks", "MINOR")],
        "S4": [("WSH-RES-001", "Residual particulate above limit", "MAJOR"),
               ("WSH-DRY-002", "Incomplete drying", "MINOR"),
               ("WSH-CORR-003", "Flash corrosion", "MAJOR"),
               ("WSH-CHEM-004", "Wash chemistry out of range", "MINOR"),
               ("WSH-CHIP-005", "Chip in oil passage", "CRITICAL")],
        "S5": [("LKT-LEAK-001", "Leak rate above threshold", "CRITICAL"),
               ("LKT-SEAL-002", "Test fixture seal failure", "MINOR"),
               ("LKT-PRESS-003", "Pressure decay unstable", "MAJOR"),
               ("LKT-PLUG-004", "Missing core plug", "MAJOR")],
        "S6": [("EAS-TORQ-001", "Bolt torque out of spec", "MAJOR"),
               ("EAS-MISS-002", "Missing component", "CRITICAL"),
               ("EAS-GASK-003", "Gasket misplacement", "MAJOR"),
               ("EAS-LABEL-004", "Traceability label missing", "MINOR")],
    },
    characteristics={
        "S1": [var("CHR-S1-BORE", "Cylinder bore diameter", 82.5, 0.02, "mm"),
               var("CHR-S1-FLAT", "Deck flatness", 0.0, 0.05, "mm")],
        "S2": [var("CHR-S2-HRC", "Surface hardness", 58.0, 3.0, "HRC"),
               var("CHR-S2-CASE", "Case depth", 1.0, 0.3, "mm")],
        "S3": [var("CHR-S3-JOURNAL", "Main journal diameter", 48.0, 0.01, "mm"),
               var("CHR-S3-ROUND", "Roundness", 0.0, 0.004, "mm")],
        "S4": [var("CHR-S4-PARTICLE", "Residual particulate mass", 2.0, 2.0, "mg")],
        "S5": [var("CHR-S5-LEAKRATE", "Leak rate", 1.0, 1.0, "cc/min")],
        "S6": [var("CHR-S6-TORQUE", "Main bearing bolt torque", 50.0, 5.0, "Nm"),
               attr("CHR-S6-MISSING", "Missing component count")],
    },
    certs=[("CERT-CNC", "CNC Machinist", 730), ("CERT-HT", "Furnace Operator", 365),
           ("CERT-GRIND", "Grinder Operator", 730), ("CERT-LEAK", "Leak Test Technician", 365),
           ("CERT-ASSY", "Engine Assembler", 730)],
    station_certs={"S1": ["CERT-CNC"], "S2": ["CERT-HT"], "S3": ["CERT-GRIND"], "S4": ["CERT-HT"],
                   "S5": ["CERT-LEAK"], "S6": ["CERT-ASSY"]},
    skills=[("SKL-SPC", "SPC charting"), ("SKL-FURNACE", "Furnace recipes"), ("SKL-GAUGE", "Air gauging"),
            ("SKL-TORQUE", "Torque verification")],
    station_skills={"S1": ["SKL-SPC", "SKL-GAUGE"], "S2": ["SKL-FURNACE"], "S3": ["SKL-GAUGE"], "S4": ["SKL-SPC"],
                    "S5": ["SKL-SPC"], "S6": ["SKL-TORQUE"]},
    tools=[("TL-BORING-BAR", "Fine boring bar", 60), ("TL-FURNACE-TC", "Furnace thermocouple", 90),
           ("TL-GRIND-WHEEL", "CBN grinding wheel", 45), ("TL-LEAK-FIXTURE", "Leak test fixture", 90),
           ("TL-NUTRUNNER", "Multi-spindle nutrunner", 90)],
    station_tools={"S1": ["TL-BORING-BAR"], "S2": ["TL-FURNACE-TC"], "S3": ["TL-GRIND-WHEEL"],
                   "S5": ["TL-LEAK-FIXTURE"], "S6": ["TL-NUTRUNNER"]},
    ncr_durations={"New": (60, 240), "InProcess": (480, 2880), "PendingDisposition": (720, 2880)},
    capa_rate=0.15, downtime_prob=0.02, downtime_dur=(20, 180), expedite_rate=0.04, bop_days=14,
    ct_variance=0.10, cp_rate=0.35, capa_days=(5.0, 35.0),
)

TEMPLATES["electronics"] = dict(
    description="Surface-mount PCB assembly (L-shaped line).",
    plant=("PLT-ELEC-01", "Austin PCBA Plant"),
    shifts=TWO_SHIFTS, days=MON_FRI, break_min=30, pm_hours=2.0,
    oee=(0.85, 0.92), fpy=(0.96, 0.99), wip=(10, 80), wdpy=250,
    areas=[("AREA-SMT", "SMT Line", ["S1", "S2", "S3", "S4"]),
           ("AREA-TEST", "Test and Finish", ["S5", "S6"])],
    stations=[
        ("S1", "Solder Paste Printing", "WC-PRINT", (20, 35), (10, 20), 0.98),
        ("S2", "Pick and Place", "WC-SMT", (30, 60), (15, 30), 0.98),
        ("S3", "Reflow Soldering", "WC-REFLOW", (25, 45), (10, 20), 0.97),
        ("S4", "Automated Optical Inspection", "WC-AOI", (20, 40), (5, 15), 0.97),
        ("S5", "In-Circuit Test", "WC-ICT", (25, 50), (10, 20), 0.97),
        ("S6", "Conformal Coating", "WC-COAT", (30, 60), (10, 20), 0.98),
    ],
    products=[
        ("EL-ECU-100", "Engine Control Unit PCBA", "ECU", 2000),
        ("EL-BMS-200", "Battery Management PCBA", "BMS", 1500),
        ("EL-IOT-300", "IoT Gateway PCBA", "IOT", 1000),
        ("EL-PSU-400", "Power Supply PCBA", "PSU", 500),
    ],
    suppliers=[
        ("SUP-PCB-TTM-01", "TTM Technologies Bare Boards", "PCB", 21, 90.0),
        ("SUP-CMP-ARROW-01", "Arrow Electronics Components", "Components", 14, 60.0),
        ("SUP-SLD-KESTER-01", "Kester Solder", "Chemicals", 7, 25.0),
        ("SUP-CC-HUMISEAL-01", "HumiSeal Conformal Coatings", "Chemicals", 10, 30.0),
    ],
    raw=[
        ("RM-PCB-ECU", "ECU bare board 8-layer", "ea", "SUP-PCB-TTM-01", 18.0),
        ("RM-PCB-BMS", "BMS bare board 6-layer", "ea", "SUP-PCB-TTM-01", 12.0),
        ("RM-PCB-IOT", "Gateway bare board 4-layer", "ea", "SUP-PCB-TTM-01", 7.0),
        ("RM-PCB-PSU", "PSU bare board 2-layer heavy copper", "ea", "SUP-PCB-TTM-01", 9.0),
        ("RM-CMP-KIT", "Component reel kit", "kit", "SUP-CMP-ARROW-01", 42.0),
        ("RM-SLD-PASTE", "SAC305 solder paste", "kg", "SUP-SLD-KESTER-01", 110.0),
        ("RM-CC-ACRYLIC", "Acrylic conformal coating", "l", "SUP-CC-HUMISEAL-01", 65.0),
    ],
    bom={
        "EL-ECU-100": {"S1": ["RM-PCB-ECU", "RM-SLD-PASTE"], "S2": ["RM-CMP-KIT"], "S6": ["RM-CC-ACRYLIC"]},
        "EL-BMS-200": {"S1": ["RM-PCB-BMS", "RM-SLD-PASTE"], "S2": ["RM-CMP-KIT"], "S6": ["RM-CC-ACRYLIC"]},
        "EL-IOT-300": {"S1": ["RM-PCB-IOT", "RM-SLD-PASTE"], "S2": ["RM-CMP-KIT"], "S6": ["RM-CC-ACRYLIC"]},
        "EL-PSU-400": {"S1": ["RM-PCB-PSU", "RM-SLD-PASTE"], "S2": ["RM-CMP-KIT"], "S6": ["RM-CC-ACRYLIC"]},
    },
    consumption={"S1": [("RM-SLD-PASTE", 0.05)], "S6": [("RM-CC-ACRYLIC", 0.2)]},
    failure_codes={
        "S1": [("SPP-VOL-001", "Insufficient paste volume", "MAJOR"),
               ("SPP-BRG-002", "Paste bridging", "MAJOR"),
               ("SPP-OFF-003", "Print offset", "MINOR"),
               ("SPP-STN-004", "Stencil aperture clogging", "MINOR"),
               ("SPP-SMR-005", "Paste smear", "MINOR")],
        "S2": [("PNP-MISS-001", "Missing component", "MAJOR"),
               ("PNP-POL-002", "Reversed polarity", "CRITICAL"),
               ("PNP-SKEW-003", "Component skew", "MINOR"),
               ("PNP-WRONG-004", "Wrong component placed", "CRITICAL"),
               ("PNP-TOMB-005", "Tombstoning", "MAJOR")],
        "S3": [("RFL-COLD-001", "Cold solder joint", "MAJOR"),
               ("RFL-VOID-002", "BGA voiding above limit", "MAJOR"),
               ("RFL-BALL-003", "Solder balls", "MINOR"),
               ("RFL-PROF-004", "Thermal profile deviation", "MAJOR"),
               ("RFL-DELAM-005", "Board delamination", "CRITICAL")],
        "S4": [("AOI-FALSE-001", "AOI false call rate exceeded", "MINOR"),
               ("AOI-BRG-002", "Solder bridge detected", "MAJOR"),
               ("AOI-LIFT-003", "Lifted lead", "MAJOR"),
               ("AOI-FILLET-004", "Insufficient fillet", "MINOR")],
        "S5": [("ICT-OPEN-001", "Open circuit", "MAJOR"),
               ("ICT-SHORT-002", "Short circuit", "CRITICAL"),
               ("ICT-VAL-003", "Component value out of tolerance", "MAJOR"),
               ("ICT-FIX-004", "Fixture contact failure", "MINOR")],
        "S6": [("CCT-THK-001", "Coating thickness out of range", "MAJOR"),
               ("CCT-KEEP-002", "Coating on keep-out area", "MINOR"),
               ("CCT-BUB-003", "Bubbles in coating", "MINOR"),
               ("CCT-ESD-004", "ESD packaging nonconformance", "MAJOR")],
    },
    characteristics={
        "S1": [var("CHR-S1-PASTEVOL", "Paste volume", 100.0, 40.0, "%"),
               var("CHR-S1-OFFSET", "Print offset", 0.0, 0.05, "mm")],
        "S2": [var("CHR-S2-PLACE", "Placement accuracy", 0.0, 0.05, "mm"),
               attr("CHR-S2-POLARITY", "Polarity errors")],
        "S3": [var("CHR-S3-PEAK", "Peak reflow temperature", 245.0, 5.0, "degC"),
               var("CHR-S3-TAL", "Time above liquidus", 60.0, 15.0, "s")],
        "S4": [attr("CHR-S4-DEFECTS", "AOI defect count"),
               var("CHR-S4-FILLET", "Fillet height", 0.3, 0.1, "mm")],
        "S5": [var("CHR-S5-RES", "Reference resistor value", 10.0, 0.1, "kOhm"),
               attr("CHR-S5-OPENS", "Open nets")],
        "S6": [var("CHR-S6-COATTHK", "Coating thickness", 50.0, 20.0, "um")],
    },
    certs=[("CERT-IPC610", "IPC-A-610 Operator", 730), ("CERT-SMT", "SMT Line Operator", 730),
           ("CERT-ICT", "Test Technician", 365), ("CERT-ESD", "ESD Control", 365)],
    station_certs={"S1": ["CERT-SMT", "CERT-ESD"], "S2": ["CERT-SMT", "CERT-ESD"], "S3": ["CERT-SMT", "CERT-ESD"],
                   "S4": ["CERT-IPC610", "CERT-ESD"], "S5": ["CERT-ICT", "CERT-ESD"], "S6": ["CERT-IPC610", "CERT-ESD"]},
    skills=[("SKL-STENCIL", "Stencil handling"), ("SKL-FEEDER", "Feeder setup"), ("SKL-PROFILE", "Oven profiling"),
            ("SKL-REWORK", "Hand rework")],
    station_skills={"S1": ["SKL-STENCIL"], "S2": ["SKL-FEEDER"], "S3": ["SKL-PROFILE"], "S4": ["SKL-REWORK"],
                    "S5": ["SKL-REWORK"], "S6": ["SKL-REWORK"]},
    tools=[("TL-STENCIL", "Laser-cut stencil", 90), ("TL-NOZZLE", "Placement nozzle set", 60),
           ("TL-PROFILER", "Thermal profiler", 30), ("TL-BED-OF-NAILS", "ICT fixture", 90)],
    station_tools={"S1": ["TL-STENCIL"], "S2": ["TL-NOZZLE"], "S3": ["TL-PROFILER"], "S5": ["TL-BED-OF-NAILS"]},
    ncr_durations={"New": (60, 240), "InProcess": (240, 1440), "PendingDisposition": (480, 2880)},
    capa_rate=0.2, downtime_prob=0.02, downtime_dur=(15, 120), expedite_rate=0.05, bop_days=10,
    ct_variance=0.08, cp_rate=0.4, capa_days=(5.0, 30.0),
)

_BEV_STATIONS = [
    ("S1", "Water Treatment", "WC-WATER", (20, 40), (5, 15), 0.97),
    ("S2", "Syrup Preparation", "WC-SYRUP", (30, 50), (10, 20), 0.97),
    ("S3", "Blending", "WC-BLEND", (20, 40), (10, 15), 0.96),
    ("S4", "Carbonation", "WC-CARB", (20, 35), (5, 15), 0.97),
    ("S5", "Depalletizing", "WC-DEPAL", (20, 30), (5, 10), 0.98),
    ("S6", "Rinsing", "WC-RINSE", (20, 30), (5, 10), 0.98),
    ("S7", "Filling", "WC-FILL", (30, 60), (15, 30), 0.96),
    ("S8", "Capping", "WC-CAP", (20, 35), (5, 15), 0.96),
    ("S9", "Labeling", "WC-LABEL", (20, 35), (10, 20), 0.97),
    ("S10", "Date Coding", "WC-CODE", (20, 30), (5, 10), 0.98),
    ("S11", "Fill Inspection", "WC-INSPECT", (20, 30), (5, 10), 0.95),
    ("S12", "Case Packing", "WC-CASE", (20, 40), (10, 15), 0.97),
    ("S13", "Palletizing", "WC-PALLET", (20, 30), (5, 10), 0.98),
    ("S14", "Stretch Wrapping", "WC-WRAP", (20, 30), (5, 10), 0.97),
]

TEMPLATES["beverages"] = dict(
    description="Carbonated soft drink bottling (continuous flow line).",
    plant=("PLT-BEV-01", "Atlanta Bottling Plant"),
    shifts=TWO_SHIFTS, days=MON_SAT, break_min=30, pm_hours=2.0,
    oee=(0.78, 0.85), fpy=(0.95, 0.98), wip=(10, 80), wdpy=300,
    areas=[("AREA-PROC", "Syrup and Process", ["S1", "S2", "S3", "S4"]),
           ("AREA-LINE", "Bottling Line", ["S5", "S6", "S7", "S8", "S9", "S10", "S11"]),
           ("AREA-EOL", "End of Line", ["S12", "S13", "S14"])],
    stations=_BEV_STATIONS,
    products=[
        ("BV-COLA-500", "Cola 500 ml PET", "COLA", 1200),
        ("BV-LEMON-500", "Lemon Soda 500 ml PET", "CITRUS", 900),
        ("BV-SPARK-1000", "Sparkling Water 1 L PET", "WATER", 600),
        ("BV-ENERGY-250", "Energy Drink 250 ml Can", "ENERGY", 300),
    ],
    suppliers=[
        ("SUP-SWT-CARGILL-01", "Cargill Sweeteners", "Ingredients", 14, 200.0),
        ("SUP-CO2-LINDE-01", "Linde Beverage CO2", "Gases", 3, 150.0),
        ("SUP-PET-ALPLA-01", "ALPLA PET Preforms", "Packaging", 21, 90.0),
        ("SUP-CLO-BERICAP-01", "Bericap Closures", "Packaging", 21, 40.0),
    ],
    raw=[
        ("RM-SUGAR-HFCS", "High fructose corn syrup", "kg", "SUP-SWT-CARGILL-01", 0.9),
        ("RM-CONC-COLA", "Cola concentrate", "l", "SUP-SWT-CARGILL-01", 12.0),
        ("RM-CO2", "Food-grade CO2", "kg", "SUP-CO2-LINDE-01", 0.4),
        ("RM-PET-PREFORM", "PET preform 28 mm", "ea", "SUP-PET-ALPLA-01", 0.05),
        ("RM-CLOSURE", "28 mm closure", "ea", "SUP-CLO-BERICAP-01", 0.01),
    ],
    bom={
        "BV-COLA-500": {"S2": ["RM-SUGAR-HFCS", "RM-CONC-COLA"], "S4": ["RM-CO2"], "S7": ["RM-PET-PREFORM"],
                        "S8": ["RM-CLOSURE"]},
        "BV-LEMON-500": {"S2": ["RM-SUGAR-HFCS"], "S4": ["RM-CO2"], "S7": ["RM-PET-PREFORM"], "S8": ["RM-CLOSURE"]},
        "BV-SPARK-1000": {"S4": ["RM-CO2"], "S7": ["RM-PET-PREFORM"], "S8": ["RM-CLOSURE"]},
        "BV-ENERGY-250": {"S2": ["RM-SUGAR-HFCS"], "S4": ["RM-CO2"], "S8": ["RM-CLOSURE"]},
    },
    consumption={"S4": [("RM-CO2", 5.0)]},
    failure_codes={
        "S1": [("WTR-COND-001", "Conductivity above limit", "MAJOR"), ("WTR-CHL-002", "Residual chlorine detected", "CRITICAL")],
        "S2": [("SYR-BRIX-001", "Syrup Brix out of range", "MAJOR"), ("SYR-DISS-002", "Undissolved sugar", "MINOR")],
        "S3": [("BLN-RATIO-001", "Syrup-to-water ratio deviation", "MAJOR"), ("BLN-TEMP-002", "Blend temperature excursion", "MINOR")],
        "S4": [("CRB-CO2-001", "CO2 volumes out of spec", "MAJOR"), ("CRB-FOAM-002", "Excess foaming", "MINOR")],
        "S5": [("DPL-DMG-001", "Damaged containers from pallet", "MINOR"), ("DPL-JAM-002", "Infeed conveyor jam", "MINOR")],
        "S6": [("RNS-RES-001", "Rinse residue detected", "MAJOR"), ("RNS-PRES-002", "Rinse pressure low", "MINOR")],
        "S7": [("FIL-LVL-001", "Fill level low", "MAJOR"), ("FIL-FOR-002", "Foreign matter in container", "CRITICAL")],
        "S8": [("CAP-TORQ-001", "Cap removal torque out of spec", "MAJOR"), ("CAP-SKEW-002", "Cocked cap", "MINOR")],
        "S9": [("LBL-POS-001", "Label misaligned", "MINOR"), ("LBL-WRONG-002", "Wrong label applied", "CRITICAL")],
        "S10": [("COD-ILL-001", "Illegible date code", "MAJOR"), ("COD-MISS-002", "Missing lot code", "MAJOR")],
        "S11": [("INS-REJ-001", "Inspection reject rate high", "MAJOR"), ("INS-CAL-002", "Inspector calibration drift", "MINOR")],
        "S12": [("CSP-CNT-001", "Case count short", "MAJOR"), ("CSP-GLUE-002", "Case glue failure", "MINOR")],
        "S13": [("PAL-PAT-001", "Pallet pattern error", "MINOR"), ("PAL-LBL-002", "Pallet label missing", "MAJOR")],
        "S14": [("WRP-TEAR-001", "Stretch film tear", "MINOR"), ("WRP-TENS-002", "Wrap tension low", "MINOR")],
    },
    characteristics={
        "S1": [var("CHR-S1-COND", "Treated water conductivity", 50.0, 50.0, "uS/cm")],
        "S2": [var("CHR-S2-BRIX", "Syrup Brix", 55.0, 0.5, "Bx")],
        "S3": [var("CHR-S3-RATIO", "Blend ratio", 5.0, 0.1, "parts")],
        "S4": [var("CHR-S4-CO2VOL", "Carbonation", 3.7, 0.2, "vol")],
        "S5": [attr("CHR-S5-DAMAGE", "Damaged containers")],
        "S6": [var("CHR-S6-RINSEP", "Rinse pressure", 2.5, 0.5, "bar")],
        "S7": [var("CHR-S7-FILL", "Fill height", 500.0, 5.0, "ml")],
        "S8": [var("CHR-S8-TORQUE", "Removal torque", 1.6, 0.4, "Nm")],
        "S9": [var("CHR-S9-LABELPOS", "Label position", 0.0, 2.0, "mm")],
        "S10": [attr("CHR-S10-CODE", "Unreadable codes")],
        "S11": [var("CHR-S11-REJ", "Inspector reject rate", 0.5, 0.5, "%")],
        "S12": [var("CHR-S12-COUNT", "Units per case", 24.0, 0.0, "ea")],
        "S13": [attr("CHR-S13-PATTERN", "Pattern errors")],
        "S14": [var("CHR-S14-TENSION", "Wrap tension", 200.0, 50.0, "%")],
    },
    certs=[("CERT-FSMA", "FSMA Preventive Controls", 365), ("CERT-PROC", "Process Operator", 730),
           ("CERT-LINE", "Filler Line Operator", 730), ("CERT-FORK", "Forklift Operator", 365)],
    station_certs={s[0]: (["CERT-FSMA", "CERT-PROC"] if int(s[0][1:]) <= 4 else
                          ["CERT-FORK"] if s[0] in ("S5", "S13", "S14") else ["CERT-FSMA", "CERT-LINE"])
                   for s in _BEV_STATIONS},
    skills=[("SKL-CIP", "Clean-in-place"), ("SKL-CHANGEOVER", "Format changeover"), ("SKL-LAB", "Quality lab tests")],
    station_skills={s[0]: (["SKL-CIP"] if int(s[0][1:]) <= 4 else ["SKL-LAB"] if s[0] == "S11" else ["SKL-CHANGEOVER"])
                    for s in _BEV_STATIONS},
    tools=[("TL-REFRACT", "Refractometer", 30), ("TL-CO2-TESTER", "CO2 volume tester", 30),
           ("TL-TORQUE-TESTER", "Cap torque tester", 90), ("TL-FILL-GAUGE", "Fill height gauge", 90)],
    station_tools={"S2": ["TL-REFRACT"], "S4": ["TL-CO2-TESTER"], "S7": ["TL-FILL-GAUGE"], "S8": ["TL-TORQUE-TESTER"]},
    ncr_durations={"New": (30, 180), "InProcess": (240, 1440), "PendingDisposition": (240, 1440)},
    capa_rate=0.15, downtime_prob=0.01, downtime_dur=(15, 120), expedite_rate=0.04, bop_days=14,
    ct_variance=0.10, cp_rate=0.3, capa_days=(5.0, 30.0),
)

TEMPLATES["warehousing"] = dict(
    description="Order fulfilment centre modelled with MES entities (zone-based).",
    plant=("PLT-WH-01", "Memphis Fulfilment Centre"),
    shifts=THREE_SHIFTS, days=ALL_DAYS, break_min=30, pm_hours=1.0,
    oee=(0.82, 0.92), fpy=(0.96, 0.99), wip=(10, 80), wdpy=360,
    areas=[("AREA-INBOUND", "Inbound", ["S1", "S2"]),
           ("AREA-OUTBOUND", "Outbound", ["S3", "S4", "S5", "S6"])],
    stations=[
        ("S1", "Receiving", "WC-RECV", (20, 50), (5, 10), 0.98),
        ("S2", "Putaway", "WC-PUTAWAY", (20, 40), (5, 10), 0.98),
        ("S3", "Picking", "WC-PICK", (30, 60), (5, 15), 0.97),
        ("S4", "Packing", "WC-PACK", (20, 45), (5, 10), 0.98),
        ("S5", "Quality Audit", "WC-AUDIT", (20, 35), (5, 10), 0.975),
        ("S6", "Shipping", "WC-SHIP", (20, 40), (5, 10), 0.985),
    ],
    products=[
        ("WH-APP-01", "Apparel Order Batch", "APPAREL", 3240),
        ("WH-ELEC-02", "Consumer Electronics Order Batch", "ELECTRONICS", 2520),
        ("WH-GROC-03", "Grocery Order Batch", "GROCERY", 1800),
        ("WH-PHAR-04", "Pharmacy Order Batch", "PHARMACY", 1080),
    ],
    suppliers=[
        ("SUP-CTN-WESTROCK-01", "WestRock Corrugated", "Packaging", 7, 20.0),
        ("SUP-FILL-SEALEDAIR-01", "Sealed Air Void Fill", "Packaging", 7, 10.0),
        ("SUP-LBL-ZEBRA-01", "Zebra Label Supplies", "Labels", 5, 5.0),
    ],
    raw=[
        ("RM-CARTON-M", "Medium shipping carton", "ea", "SUP-CTN-WESTROCK-01", 0.8),
        ("RM-VOIDFILL", "Air pillow void fill", "m", "SUP-FILL-SEALEDAIR-01", 0.05),
        ("RM-LABEL-4X6", "4x6 thermal label", "ea", "SUP-LBL-ZEBRA-01", 0.02),
    ],
    bom={pn: {"S4": ["RM-CARTON-M", "RM-VOIDFILL"], "S6": ["RM-LABEL-4X6"]}
         for pn in ("WH-APP-01", "WH-ELEC-02", "WH-GROC-03", "WH-PHAR-04")},
    consumption={"S4": [("RM-VOIDFILL", 2.0)]},
    failure_codes={
        "S1": [("RCV-QTY-001", "ASN quantity mismatch", "MAJOR"),
               ("RCV-DMG-002", "Inbound damage", "MAJOR"),
               ("RCV-LBL-003", "Missing carton label", "MINOR"),
               ("RCV-TEMP-004", "Cold-chain temperature excursion", "CRITICAL"),
               ("RCV-PO-005", "Unknown purchase order", "MINOR")],
        "S2": [("PUT-LOC-001", "Wrong storage location", "MAJOR"),
               ("PUT-CAP-002", "Location over capacity", "MINOR"),
               ("PUT-SCAN-003", "Missed location scan", "MINOR"),
               ("PUT-HAZ-004", "Hazmat segregation violation", "CRITICAL"),
               ("PUT-DMG-005", "Handling damage during putaway", "MAJOR")],
        "S3": [("PCK-WRONG-001", "Wrong item picked", "MAJOR"),
               ("PCK-SHORT-002", "Short pick", "MAJOR"),
               ("PCK-FEFO-003", "FEFO lot rule violated", "MINOR"),
               ("PCK-DMG-004", "Item damaged while picking", "MINOR")],
        "S4": [("PAK-DIM-001", "Carton size mismatch", "MINOR"),
               ("PAK-FILL-002", "Insufficient void fill", "MINOR"),
               ("PAK-SEAL-003", "Carton seal failure", "MAJOR"),
               ("PAK-DOC-004", "Missing packing slip", "MAJOR")],
        "S5": [("AUD-CNT-001", "Audit count discrepancy", "MAJOR"),
               ("AUD-SKU-002", "SKU mismatch at audit", "CRITICAL"),
               ("AUD-WT-003", "Weight check failure", "MAJOR"),
               ("AUD-SCAN-004", "Serial scan missing", "MINOR")],
        "S6": [("SHP-LBL-001", "Shipping label error", "MAJOR"),
               ("SHP-CARR-002", "Wrong carrier assignment", "MINOR"),
               ("SHP-LOAD-003", "Load sequence error", "MINOR"),
               ("SHP-CUT-004", "Carrier cutoff missed", "MAJOR")],
    },
    characteristics={
        "S1": [var("CHR-S1-QTYVAR", "Received quantity variance", 0.0, 2.0, "%")],
        "S2": [attr("CHR-S2-LOCERR", "Location errors")],
        "S3": [var("CHR-S3-PICKACC", "Pick accuracy", 99.5, 0.5, "%"),
               attr("CHR-S3-SHORTS", "Short picks")],
        "S4": [var("CHR-S4-DIMWT", "Dimensional weight variance", 0.0, 10.0, "%")],
        "S5": [var("CHR-S5-WEIGHT", "Carton weight deviation", 0.0, 3.0, "%")],
        "S6": [attr("CHR-S6-LABELERR", "Label scan failures")],
    },
    certs=[("CERT-FORKLIFT", "Powered Industrial Truck", 1095), ("CERT-HAZMAT", "Hazmat Handling", 365),
           ("CERT-WMS", "WMS Transactions", 730), ("CERT-DOT", "DOT Shipping Papers", 730)],
    station_certs={"S1": ["CERT-WMS"], "S2": ["CERT-FORKLIFT", "CERT-HAZMAT"], "S3": ["CERT-WMS"],
                   "S4": ["CERT-WMS"], "S5": ["CERT-WMS"], "S6": ["CERT-DOT"]},
    skills=[("SKL-RF", "RF scanner"), ("SKL-ERGO", "Ergonomic lifting"), ("SKL-AUDIT", "Cycle counting")],
    station_skills={"S1": ["SKL-RF"], "S2": ["SKL-RF", "SKL-ERGO"], "S3": ["SKL-RF", "SKL-ERGO"], "S4": ["SKL-ERGO"],
                    "S5": ["SKL-AUDIT"], "S6": ["SKL-RF"]},
    tools=[("TL-RF-GUN", "RF scanner", 365), ("TL-SCALE", "Parcel scale", 90), ("TL-LABELER", "Print-and-apply labeler", 180)],
    station_tools={"S1": ["TL-RF-GUN"], "S3": ["TL-RF-GUN"], "S5": ["TL-SCALE"], "S6": ["TL-LABELER"]},
    ncr_durations={"New": (30, 120), "InProcess": (120, 720), "PendingDisposition": (120, 1440)},
    capa_rate=0.15, downtime_prob=0.01, downtime_dur=(15, 90), expedite_rate=0.06, bop_days=14,
    ct_variance=0.10, cp_rate=0.3, capa_days=(5.0, 30.0),
)


def _minutes(hhmm: str) -> int:
    h, m = hhmm.split(":")
    return int(h) * 60 + int(m)


def _working_minutes_per_day(shifts, break_min) -> int:
    total = 0
    for _, start, end, _b in shifts:
        span = (_minutes(end) - _minutes(start)) % 1440 or 1440
        total += span - break_min
    return total


def build(tid: str, spec: dict) -> dict:
    stations = spec["stations"]
    sids = [s[0] for s in stations]
    products = spec["products"]
    daily = sum(p[3] for p in products) / spec["wdpy"]
    work_min = _working_minutes_per_day(spec["shifts"], spec["break_min"])

    site = f"SITE-{spec['plant'][0].split('-', 1)[1]}"
    equipment = [{"nid": site, "name": spec["plant"][1], "level": "Site", "parent": None}]
    wc_units: dict[str, list[str]] = {}
    area_of = {}
    for area_id, area_name, members in spec["areas"]:
        equipment.append({"nid": area_id, "name": area_name, "level": "Area", "parent": site})
        for sid in members:
            area_of[sid] = area_id
    total_units = 0
    for sid, name, wc, ct, su, _fpy in stations:
        equipment.append({"nid": wc, "name": f"{name} Cell", "level": "WorkCenter", "parent": area_of[sid]})
        mean_op = (ct[0] + ct[1]) / 2 + (su[0] + su[1]) / 2
        n_units = max(1, math.ceil(daily * mean_op / (work_min * TARGET_UTILISATION)))
        total_units += n_units
        wc_units[wc] = []
        for i in range(1, n_units + 1):
            uid = f"{wc}-U{i:02d}"
            equipment.append({"nid": uid, "name": f"{name} Unit {i}", "level": "Unit", "parent": wc})
            wc_units[wc].append(uid)

    station_docs = {}
    for sid, name, wc, ct, su, fpy in stations:
        station_docs[sid] = {"name": name, "work_center": wc, "cycle_time_range_min": list(ct),
                             "setup_time_min": list(su), "first_pass_yield": fpy, "is_quality_gate": True}

    product_docs = {pn: {"name": name, "program_code": prog, "annual_volume": vol, "stations": list(sids)}
                    for pn, name, prog, vol in products}
    fcs = [{"nid": nid, "description": desc, "station": sid, "severity": sev}
           for sid, rows in spec["failure_codes"].items() for nid, desc, sev in rows]
    station_fc = {sid: [r[0] for r in rows] for sid, rows in spec["failure_codes"].items()}

    station_certs = spec.get("station_certs") or {s[0]: [c[0]] for s, c in zip(stations, spec["certs"])}
    consumption = {sid: [{"material": m, "quantity": q if q > 0 else 1.0} for m, q in uses]
                   for sid, uses in spec["consumption"].items()}
    product_raw = {pn: sorted({m for mats in spec["bom"][pn].values() for m in mats}) for pn, *_ in products}

    steps = {}
    for sid, name, *_ in stations:
        steps[sid] = [{"step": 1, "description": f"Prepare and verify {name.lower()} setup"},
                      {"step": 2, "description": f"Execute {name.lower()}"}]
        if len(stations) <= 10:
            steps[sid].append({"step": 3, "description": f"Record {name.lower()} results"})

    doc = {
        "PLANT_CODE": spec["plant"][0],
        "PLANT_NAME": spec["plant"][1],
        "SHIFTS": [{"name": n, "start": s, "end": e, "break_start": b} for n, s, e, b in spec["shifts"]],
        "OPERATING_DAYS": spec["days"],
        "BREAK_DURATION_MIN": spec["break_min"],
        "WEEKLY_PM_HOURS": spec["pm_hours"],
        "TARGET_OEE_RANGE": list(spec["oee"]),
        "FIRST_PASS_YIELD_RANGE": list(spec["fpy"]),
        "AVG_WIP_RANGE": list(spec["wip"]),
        "OPERATORS_PER_SHIFT": total_units + math.ceil(len(stations) / 2),
        "EQUIPMENT": equipment,
        "WORK_CENTER_UNITS": wc_units,
        "PRODUCTS": product_docs,
        "WORKING_DAYS_PER_YEAR": spec["wdpy"],
        "STATIONS": station_docs,
        "STATION_TO_WC": {sid: wc for sid, _n, wc, *_ in stations},
        "RAW_MATERIALS": {code: {"name": n, "uom": u, "supplier": s, "unit_cost": c}
                          for code, n, u, s, c in spec["raw"]},
        "FINISHED_MATERIALS": {f"FG-{pn}": {"name": name, "part_number": pn} for pn, name, *_ in products},
        "PRODUCT_RAW_MATERIAL": product_raw,
        "OPERATION_MATERIAL_CONSUMPTION": consumption,
        "SUPPLIERS": {code: {"name": n, "category": cat, "lead_time_days": lt, "defect_cost": dc}
                      for code, n, cat, lt, dc in spec["suppliers"]},
        "FAILURE_CODES": fcs,
        "STATION_FAILURE_CODES": station_fc,
        "PROCESS_PLANS": {pn: {"nid": f"PP-{pn}", "revision": "A",
                               "operations": [{"seq": 10 * (i + 1), "station": sid,
                                               "description": f"{station_docs[sid]['name']} - {name}"}
                                              for i, sid in enumerate(sids)]}
                          for pn, name, *_ in products},
        "INSPECTION_PLANS": {f"IP-{sid}": {"name": f"{station_docs[sid]['name']} inspection",
                                            "characteristics": chars}
                             for sid, chars in spec["characteristics"].items()},
        "STATION_INSPECTION_PLANS": {sid: f"IP-{sid}" for sid in spec["characteristics"]},
        "NCR_DISPOSITIONS": [{"code": c, "weight": w} for c, w in DISPOSITIONS],
        "NCR_STATUS_DURATIONS": {k: list(v) for k, v in spec["ncr_durations"].items()},
        "CAPA_TRIGGER_RATE": spec["capa_rate"],
        "EQUIPMENT_DOWNTIME_PROB": spec["downtime_prob"],
        "EQUIPMENT_DOWNTIME_DURATION_MIN": list(spec["downtime_dur"]),
        "ORDER_EXPEDITE_RATE": spec["expedite_rate"],
        "BOP_REVISION_INTERVAL_DAYS": spec["bop_days"],
        "CYCLE_TIME_VARIANCE": spec["ct_variance"],
        "DEFAULT_RANDOM_SEED": 42,
        "CERTIFICATIONS": {nid: {"name": n, "valid_days": d} for nid, n, d in spec["certs"]},
        "STATION_CERTIFICATIONS": station_certs,
        "SKILLS": {nid: {"name": n} for nid, n in spec["skills"]},
        "STATION_SKILLS": spec["station_skills"],
        "TOOL_DEFINITIONS": {nid: {"name": n, "calibration_interval_days": d} for nid, n, d in spec["tools"]},
        "STATION_TOOLS": spec["station_tools"],
        "STEP_TEMPLATES": steps,
        "CHANGE_PACKAGE_RATE": spec["cp_rate"],
        "CHANGE_PACKAGE_PARAMS": CP_PARAMS,
        "BOM_STATION_MATERIALS": spec["bom"],
        "_meta": {
            "description": spec["description"],
            "synthetic_note": ("Synthetic template. Station names, counts and target ranges follow the reference "
                               "configuration summary; cycle times, yields, catalogs and rates are synthetic "
                               "values chosen for internal consistency and calibration, not plant data."),
            "capa_duration_days": list(spec["capa_days"]),
        },
    }
    return doc


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    for tid, spec in TEMPLATES.items():
        doc = build(tid, spec)
        (OUT / f"{tid}.json").write_text(json.dumps(doc, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
        print(f"{tid}: {len(doc['STATIONS'])} stations, {len(doc['FAILURE_CODES'])} failure codes, "
              f"{sum(len(v) for v in doc['WORK_CENTER_UNITS'].values())} units")


if __name__ == "__main__":
    main()
