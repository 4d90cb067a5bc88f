"""JSON and CSV reports. Timing lives in its own key so payloads diff cleanly."""

import csv
import json
import os

from .. import __version__


def build_report(command, cfg, results=None, extra=None):
    checks = [r.to_dict() for r in (results or [])]
    payload = {
        "schema": "horodual.report/1",
        "version": __version__,
        "command": command,
        "seed": cfg.seed,
        "config": cfg.echo(),
        "checks": checks,
    }
    if extra:
        payload.update(extra)
    ok = all(c["status"] != "fail" for c in checks) and payload.get("ok", True)
    payload["status"] = "pass" if ok else "fail"
    return payload


def payload_bytes(payload):
    return json.dumps(payload, sort_keys=True, indent=2, allow_nan=False,
                      default=float).encode()


def write_report(payload, timing, out_dir, stem="report"):
    os.makedirs(out_dir, exist_ok=True)
    json_path = os.path.join(out_dir, stem + ".json")
    with open(json_path, "w") as fh:
        json.dump({"payload": payload, "timing": timing}, fh, sort_keys=True, indent=2,
                  allow_nan=False)
        fh.write("\n")
    csv_path = os.path.join(out_dir, stem + ".csv")
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["check", "status", "deviation", "tol", "samples", "note"])
        for c in payload["checks"]:
            w.writerow([c["name"], c["status"], "" if c["deviation"] is None else repr(c["deviation"]),
                        repr(c["tol"]), c["samples"], c["note"]])
    return json_path, csv_path
