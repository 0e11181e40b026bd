#!/usr/bin/env python3
"""Convert a Monash-style .tsf file to the JSON Lines layout read by `raf`.

Each data row becomes {"id": ..., "freq": ..., "values": [...]}; "?" becomes null.
The id is the first series attribute (usually series_name); the frequency
comes from @frequency unless --freq overrides it.

    python3 tools/tsf_to_jsonl.py weather.tsf > weather.jsonl
"""

import argparse
import json
import sys

# Monash frequency labels mapped to the names the seasonality table knows.
FREQ_NAMES = {
    "4_seconds": "4_seconds",
    "minutely": "minutely",
    "10_minutes": "10_minutes",
    "half_hourly": "half_hourly",
    "hourly": "hourly",
    "daily": "daily",
    "weekly": "weekly",
    "monthly": "monthly",
    "quarterly": "quarterly",
    "yearly": "yearly",
}


def parse_value(token, lineno):
    token = token.strip()
    if token == "?":
        return None
    try:
        return float(token)
    except ValueError:
        sys.exit(f"line {lineno}: cannot parse value {token!r}")


def convert(src, out, freq_override):
    attributes = []
    freq = ""
    in_data = False
    ids = set()
    count = 0
    for lineno, raw in enumerate(src, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not in_data:
            lower = line.lower()
            if lower.startswith("@attribute"):
                parts = line.split()
                if len(parts) != 3:
                    sys.exit(f"line {lineno}: malformed @attribute")
                attributes.append(parts[1])
            elif lower.startswith("@frequency"):
                freq = FREQ_NAMES.get(line.split()[1], line.split()[1])
            elif lower.startswith("@data"):
                in_data = True
            continue
        fields = line.split(":", len(attributes))
        if len(fields) != len(attributes) + 1:
            sys.exit(f"line {lineno}: expected {len(attributes)} attributes before the values")
        series_id = fields[0] if attributes else f"T{count + 1}"
        if series_id in ids:
            sys.exit(f"line {lineno}: duplicate series id {series_id!r}")
        ids.add(series_id)
        values = [parse_value(t, lineno) for t in fields[-1].split(",")]
        if not values:
            sys.exit(f"line {lineno}: series {series_id!r} has no values")
        record = {"id": series_id, "freq": freq_override or freq, "values": values}
        out.write(json.dumps(record, allow_nan=False) + "\n")
        count += 1
    if not in_data:
        sys.exit("no @data section found")
    return count


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("input", help=".tsf file")
    ap.add_argument("-o", "--output", help="output path (default stdout)")
    ap.add_argument("--freq", default="", help="frequency label to store instead of @frequency")
    args = ap.parse_args()
    with open(args.input, encoding="latin-1") as src:
        if args.output:
            with open(args.output, "w", encoding="utf-8") as out:
                n = convert(src, out, args.freq)
        else:
            n = convert(src, sys.stdout, args.freq)
    print(f"converted {n} series", file=sys.stderr)


if __name__ == "__main__":
    main()
