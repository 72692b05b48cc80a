#!/usr/bin/env python3
"""Regenerates the bundled data and test fixtures.

Output is deterministic; rerunning leaves the committed files unchanged.
Usage: python3 data/generate_fixtures.py
"""

import json
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "data"
FIX = ROOT / "tests" / "fixtures"


def write_json(path, value):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(value, indent=2, sort_keys=False) + "\n")


# ---------------------------------------------------------------------------
# Sample knowledge base: 12 techniques, 8 countermeasures, 5 technologies,
# 9 Targets edges and 11 Mitigates edges.

TECHNIQUES = [
    ("T1021", "Remote Services", "Medium"),
    ("T1046", "Network Service Discovery", "Low"),
    ("T1059", "Command and Scripting Interpreter", "High"),
    ("T1070", "Indicator Removal", "Medium"),
    ("T1078", "Valid Accounts", "High"),
    ("T1098", "Account Manipulation", "Medium"),
    ("T1110", "Brute Force", "Medium"),
    ("T1133", "External Remote Services", "High"),
    ("T1190", "Exploit Public-Facing Application", "High"),
    ("T1203", "Exploitation for Client Execution", "High"),
    ("T1486", "Data Encrypted for Impact", "High"),
    ("T1566", "Phishing", "High"),
]

COUNTERMEASURES = [
    ("D3-EAL", "Executable Allowlisting",
     ["Preventive", "Integrity", "Protect", "Application_security", "Protection"]),
    ("D3-LAM", "Local Account Monitoring",
     ["Detective", "Confidentiality", "Detect", "Information_security_event_management", "Defence"]),
    ("D3-MAN", "Message Analysis",
     ["Detective", "Confidentiality", "Detect", "System_and_network_security", "Defence"]),
    ("D3-MFA", "Multi-factor Authentication",
     ["Preventive", "Confidentiality", "Integrity", "Protect", "Identity_and_access_management", "Protection"]),
    ("D3-NTA", "Network Traffic Analysis",
     ["Detective", "Confidentiality", "Detect", "Information_security_event_management", "Defence"]),
    ("D3-PH", "Platform Hardening",
     ["Preventive", "Integrity", "Protect", "Secure_configuration", "Protection"]),
    ("D3-SU", "Software Update",
     ["Preventive", "Integrity", "Availability", "Protect", "Threat_and_vulnerability_management", "Protection"]),
    ("D3-UAP", "User Account Permissions",
     ["Preventive", "Confidentiality", "Protect", "Identity_and_access_management", "Protection"]),
]

TECHNOLOGIES = [
    ("tech.email", "Corporate e-mail"),
    ("tech.linux", "Linux servers"),
    ("tech.vpn", "Remote-access VPN"),
    ("tech.webapp", "Public web application"),
    ("tech.windows", "Windows workstations"),
]

TARGETS = [
    ("T1190", "tech.webapp"), ("T1133", "tech.vpn"), ("T1566", "tech.email"),
    ("T1078", "tech.windows"), ("T1110", "tech.vpn"), ("T1059", "tech.linux"),
    ("T1486", "tech.windows"), ("T1021", "tech.windows"), ("T1203", "tech.email"),
]

MITIGATES = [
    ("D3-SU", "T1190"), ("D3-SU", "T1203"), ("D3-SU", "T1133"),
    ("D3-MFA", "T1078"), ("D3-MFA", "T1110"),
    ("D3-NTA", "T1046"), ("D3-UAP", "T1098"), ("D3-MAN", "T1566"),
    ("D3-PH", "T1021"), ("D3-EAL", "T1059"), ("D3-LAM", "T1078"),
]


def sample_kb():
    nodes = []
    for tid, name, sev in TECHNIQUES:
        nodes.append({"id": tid, "kind": "Technique", "name": name, "severity": sev})
    for cid, name, attrs in COUNTERMEASURES:
        nodes.append({"id": cid, "kind": "Countermeasure", "name": name, "attributes": ["#" + a for a in attrs]})
    for tid, name in TECHNOLOGIES:
        nodes.append({"id": tid, "kind": "Technology", "name": name})
    edges = [{"src": s, "dst": d, "kind": "Targets"} for s, d in TARGETS]
    edges += [{"src": s, "dst": d, "kind": "Mitigates"} for s, d in MITIGATES]
    return {"version": 1, "nodes": nodes, "edges": edges}


COSTS = {
    "D3-EAL": 9000, "D3-LAM": 15000, "D3-MAN": 2500, "D3-MFA": 4000,
    "D3-NTA": 12000, "D3-PH": 5000, "D3-SU": 6000, "D3-UAP": 3000,
}

# ---------------------------------------------------------------------------
# Organization profiles built from the published before/after counts.
# Counts not published (user totals, network, update posture) are
# illustrative and only ever improve from "before" to "after".

ORGS = {
    "a": dict(total=275, reg_before=275 - 86, reg_after=200, priv_before=27, priv_after=9, users=120,
              log_before=68, log_after=250, sector="retail", revenue=2_500_000,
              techs=["tech.webapp", "tech.windows", "tech.email"]),
    "b": dict(total=361, reg_before=361 - 134, reg_after=250, priv_before=19, priv_after=11, users=150,
              log_before=90, log_after=333, sector="finance", revenue=4_000_000,
              techs=["tech.vpn", "tech.windows", "tech.email", "tech.linux"]),
    "c": dict(total=437, reg_before=437 - 369, reg_after=400, priv_before=45, priv_after=16, users=200,
              log_before=196, log_after=372, sector="public", revenue=1_200_000,
              techs=["tech.webapp", "tech.vpn", "tech.windows", "tech.linux"]),
}

STAGES = {
    "before": dict(auth_frac=0.85, shared=10, public_ips=12, ports=40, obs_auth=6000, obs_tx=3000,
                   authorized=700, patched_frac=0.60, legacy=20, delay=60, critical=30, lag=2,
                   controls=["D3-MFA"]),
    "after": dict(auth_frac=0.97, shared=2, public_ips=8, ports=20, obs_auth=9500, obs_tx=4800,
                  authorized=950, patched_frac=0.85, legacy=12, delay=21, critical=7, lag=1,
                  controls=["D3-LAM", "D3-MFA", "D3-NTA", "D3-SU"]),
}


def profile(key, stage):
    o, s = ORGS[key], STAGES[stage]
    registered = o["reg_" + stage]
    logging = o["log_" + stage]
    privileged = o["priv_" + stage]
    patched = round(o["total"] * s["patched_frac"])
    devices = []
    for i in range(o["total"]):
        devices.append({
            "device_id": f"{key}-dev-{i:03d}",
            "registered": i < registered,
            "technology_ids": [o["techs"][i % len(o["techs"])]],
            "logging_enabled": i < logging,
            "updatable": i < o["total"] - s["legacy"],
            "patched": i < patched,
            "location_access": ["Internet"] if i % 10 == 0 else ["OnPremises"],
        })
    users = []
    authenticated = round(o["users"] * s["auth_frac"])
    for i in range(o["users"]):
        users.append({
            "user_id": f"{key}-user-{i:03d}",
            "privileged": i < privileged,
            "authenticated": i < authenticated,
            "shared_account": i >= o["users"] - s["shared"],
        })
    return {
        "org_id": f"org_{key}_{stage}",
        "sector": o["sector"],
        "assets": {"devices": devices, "technologies_in_use": sorted(o["techs"])},
        "users": users,
        "network": {"public_ips": s["public_ips"], "necessary_public_ips": 6,
                    "visible_ports": s["ports"], "necessary_visible_ports": 15},
        "logging": {"expected_authentications": 10000, "observed_authentications": s["obs_auth"],
                    "expected_transactions": 5000, "observed_transactions": s["obs_tx"],
                    "devices_with_logging": logging,
                    "role_authorized_actions": s["authorized"], "total_actions_observed": 1000},
        "updates": {"total_systems": o["total"], "patched_systems": patched,
                    "legacy_unupdatable": s["legacy"], "update_delay_days": s["delay"],
                    "critical_patch_days": s["critical"], "policy_version_lag": s["lag"]},
        "motivation": {"asset_value_class": 0.7, "restorable_fraction": 0.4, "public_harm_fraction": 0.5,
                       "residual_vuln_fraction": 0.5, "control_maturity": 0.5},
        "implemented_controls": s["controls"],
        "revenue": o["revenue"],
    }


# ---------------------------------------------------------------------------
# Planted corpus: four themes with disjoint vocabularies, ten incidents each.

THEMES = {
    "E": (["exposed", "port", "ports", "public", "internet", "scan", "open", "perimeter", "rdp", "ssh",
           "firewall", "listening", "reachable", "service", "endpoint", "address"],
          ["T1190", "T1046", "T1133"]),
    "T": (["log", "logs", "logging", "audit", "trace", "authentication", "monitoring", "siem", "correlation",
           "forensic", "telemetry", "visibility", "unlogged", "events", "missing", "record"],
          ["T1070", "T1078"]),
    "M": (["ransom", "ransomware", "extortion", "financial", "payment", "profit", "bitcoin", "espionage",
           "reputation", "leak", "valuable", "market", "demand", "criminal", "customer", "harm"],
          ["T1486"]),
    "U": (["patch", "unpatched", "update", "outdated", "legacy", "version", "obsolete", "firmware",
           "upgrade", "cve", "deferred", "vulnerable", "release", "pending", "vendor", "exploit"],
          ["T1203", "T1059"]),
}
FILLER = ["the", "was", "on", "by", "an", "of", "and", "in", "to", "a"]
SHARED = ["incident", "attacker", "organization"]


def corpus(seed=20261015):
    rng = random.Random(seed)
    docs = []
    order = [t for t in "ETMU" for _ in range(10)]
    rng.shuffle(order)
    for i, theme in enumerate(order):
        words, techniques = THEMES[theme]
        body = [rng.choice(words) for _ in range(rng.randint(8, 12))]
        body += [rng.choice(FILLER) for _ in range(4)] + [rng.choice(SHARED)]
        rng.shuffle(body)
        text = " ".join(body).capitalize() + "."
        docs.append({
            "incident_id": f"INC-{i + 1:03d}",
            "description": text,
            "technique_refs": sorted(rng.sample(techniques, rng.randint(1, len(techniques)))),
            "severity": rng.choice(["Low", "Medium", "High"]),
            "attack_vector": {"E": "network", "T": "credentials", "M": "extortion", "U": "exploit"}[theme],
            "timestamp": f"2025-{(i % 12) + 1:02d}-{(i % 27) + 1:02d}T10:00:00Z",
        })
    labels = {d["incident_id"]: t for d, t in zip(docs, order)}
    return docs, labels


STOPWORDS = ["# Common English function words", *FILLER, "is", "it", "for", "with", "as", "at", "from", "via"]

# ---------------------------------------------------------------------------
# Small test fixtures


def recommend_kb():
    return {
        "version": 1,
        "nodes": [
            {"id": "t1", "kind": "Technique", "name": "Technique one"},
            {"id": "t2", "kind": "Technique", "name": "Technique two"},
            {"id": "c1", "kind": "Countermeasure", "name": "Control one", "attributes": ["#Preventive"]},
            {"id": "c2", "kind": "Countermeasure", "name": "Control two", "attributes": ["#Detective"]},
            {"id": "tech.x", "kind": "Technology", "name": "Technology x"},
        ],
        "edges": [
            {"src": "t1", "dst": "tech.x", "kind": "Targets"},
            {"src": "t2", "dst": "tech.x", "kind": "Targets"},
            {"src": "c1", "dst": "t1", "kind": "Mitigates"},
            {"src": "c1", "dst": "t2", "kind": "Mitigates"},
            {"src": "c2", "dst": "t1", "kind": "Mitigates"},
        ],
    }


def whatif_profile():
    return {
        "org_id": "base",
        "assets": {"devices": [
            {"device_id": f"d{i}", "registered": i < 6, "technology_ids": ["tech.x"], "logging_enabled": i < 4,
             "patched": i < 5, "location_access": ["OnPremises"]} for i in range(8)
        ]},
        "users": [{"user_id": f"u{i}", "privileged": i < 2, "authenticated": True} for i in range(10)],
        "updates": {"total_systems": 8, "patched_systems": 5, "legacy_unupdatable": 1,
                    "update_delay_days": 30, "critical_patch_days": 14, "policy_version_lag": 1},
        "implemented_controls": ["c2"],
        "revenue": 1000000,
    }


def kmeans_small(seed=7):
    rng = random.Random(seed)
    instances = [
        {"name": "symmetric-pairs", "k": 2, "points": [[0, 0], [0, 1], [10, 0], [10, 1]]},
        {"name": "single-cluster", "k": 1, "points": [[1, 2], [3, 4], [5, 0]]},
        {"name": "three-groups", "k": 3,
         "points": [[0, 0], [0.5, 0.2], [5, 5], [5.2, 4.8], [9, 0], [9.1, 0.4], [4.9, 5.3]]},
        {"name": "line", "k": 3, "points": [[0], [1], [2], [6], [7], [13], [14], [15], [30], [31]]},
        {"name": "duplicates", "k": 2, "points": [[1, 1], [1, 1], [1, 1], [4, 4], [4, 4]]},
    ]
    for n in range(5):
        pts = [[round(rng.uniform(-5, 5), 3), round(rng.uniform(-5, 5), 3)] for _ in range(rng.randint(5, 10))]
        instances.append({"name": f"random-{n}", "k": 2 + n % 2, "points": pts})
    return instances


def main():
    write_json(DATA / "kb.json", sample_kb())
    write_json(DATA / "costs.json", COSTS)
    for key in ORGS:
        for stage in STAGES:
            write_json(DATA / "profiles" / f"org_{key}_{stage}.json", profile(key, stage))
    docs, labels = corpus()
    write_json(DATA / "corpus" / "incidents.json", docs)
    write_json(FIX / "planted_labels.json", labels)
    (DATA / "corpus" / "stopwords.txt").write_text("\n".join(STOPWORDS) + "\n")
    write_json(FIX / "recommend_kb.json", recommend_kb())
    write_json(FIX / "whatif" / "kb.json", recommend_kb())
    write_json(FIX / "whatif" / "profiles" / "base.json", whatif_profile())
    write_json(FIX / "kmeans_small.json", kmeans_small())


if __name__ == "__main__":
    main()
