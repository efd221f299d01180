#!/usr/bin/env python3
"""Regenerates the bundled fixture suite: manifest.yaml, gt/ and ocr/<system>/.

Receipts are synthetic. Each case's GT follows its input selections, and each
mock system corrupts the GT with a seeded RNG whose error rate grows with the
number of complex context stubs selected. Output is deterministic.
"""

import random
from pathlib import Path

import yaml

HERE = Path(__file__).resolve().parent
MODEL = HERE.parent / "model" / "receipt_model.yaml"
BASE = HERE.parent / "model" / "base_case.yaml"
SYSTEMS = {"mock-a": 0.004, "mock-b": 0.015}
COMPLEX_RATE = {"mock-a": 0.03, "mock-b": 0.06}

ITEMS = [
    ("Milk 1 gal", "4.99"),
    ("Bread", "3.49"),
    ("Eggs 12ct", "5.29"),
    ("Bananas", "1.99"),
    ("Coffee beans", "12.49"),
    ("Olive oil", "8.99"),
    ("Paper towels", "15.99"),
    ("Cheddar", "6.79"),
    ("Apples 3lb", "4.49"),
    ("Rice 10lb", "9.99"),
    ("Yogurt", "5.49"),
    ("Chicken", "11.29"),
]
ITEM_COUNT = {"items-short": 3, "items-medium": 6, "items-long": 12}
LOGOS = {
    "logo-none": [],
    "logo-text-normal": ["COSTCO"],
    "logo-text-decorated": ["~ C O S T C O ~"],
    "logo-graphic": [],
    "logo-graphic-text-normal": ["COSTCO"],
    "logo-graphic-text-decorated": ["* COSTCO *"],
}
CONFUSIONS = {"0": "O", "O": "0", "1": "l", "l": "1", "5": "S", "S": "5", "8": "B", "B": "8",
              "e": "c", "c": "e", "m": "rn", ".": ",", ",": "."}


def money(cents):
    return f"{cents // 100}.{cents % 100:02d}"


def cents(text):
    whole, frac = text.split(".")
    return int(whole) * 100 + int(frac)


def ground_truth(selected):
    lines = ["#section: store"] + LOGOS[next(s for s in selected if s.startswith("logo-"))]
    lines += ["COSTCO WHOLESALE", "1709 Automation Pkwy", "San Jose, CA 95131"]
    if "store-name-address-phone" in selected:
        lines.append("Tel (408) 555-0192")

    other = "lang-other" in selected
    special = "special-present" in selected
    lines.append("#section: items")
    subtotal = 0
    for i, (name, price) in enumerate(ITEMS[: ITEM_COUNT[next(s for s in selected if s.startswith("items-"))]]):
        if other:
            name = {"Milk 1 gal": "Leche 1 gal", "Bread": "Pan", "Eggs 12ct": "Huevos 12u"}.get(name, name)
        prefix = "2 @ " if special and i == 0 else ""
        lines.append(f"{prefix}{name} {price}")
        subtotal += cents(price)
        if "discount-present" in selected and i % 3 == 0:
            lines.append(f"Discount {'50%' if special else 'half'} -0.50")
            subtotal -= 50

    tax = subtotal * 8 // 100
    lines.append("#section: transaction")
    lines.append(f"{'Subtotal' if not other else 'Subtotal'} {money(subtotal)}")
    lines.append(f"{'Tax' if not other else 'Impuesto'} ${money(tax)}")
    lines.append(f"TOTAL {money(subtotal + tax)}")
    if "pay-cash" in selected:
        lines.append(f"CASH {money(subtotal + tax + 100 - (subtotal + tax) % 100)}")
        lines.append(f"CHANGE {money(100 - (subtotal + tax) % 100)}")
    else:
        lines.append("VISA ****4821")
        lines.append("Approval 0A12C9")

    misc = []
    if "member-present" in selected:
        misc.append("Member #123456" if special else "Member 123456")
    if "returns-present" in selected:
        misc.append("Devoluciones 90 dias" if other else "Returns within 90 days")
    if "barcode-present" in selected:
        misc.append("21010 9921 0047 3398")
    misc.append("Thank you" if not other else "Gracias")
    lines.append("#section: misc")
    lines += misc
    return "\n".join(lines) + "\n"


def corrupt(gt, rate, rng):
    out = []
    for line in gt.splitlines():
        if line.startswith("#section:"):
            continue
        chars = []
        for ch in line:
            roll = rng.random()
            if roll < rate / 3 and ch == " ":
                continue  # dropped space merges segments
            if roll < rate:
                chars.append(CONFUSIONS.get(ch, ch))
            else:
                chars.append(ch)
        text = "".join(chars)
        if rng.random() < rate * 2 and " " in text:
            head, tail = text.rsplit(" ", 1)  # price split onto its own line
            out += [head, tail]
        else:
            out.append(text)
    for i in range(len(out) - 1):
        if rng.random() < rate:
            out[i], out[i + 1] = out[i + 1], out[i]
    return "\n".join(out) + "\n"


def main():
    model = yaml.safe_load(MODEL.read_text())
    base = yaml.safe_load(BASE.read_text())
    severity = {leaf["id"]: leaf.get("severity", "normal")
                for dim in ("context", "input") for cat in model[dim] for leaf in cat["leaves"]}

    cases = [dict(base)]
    for dim in ("context", "input"):
        for cat in model[dim]:
            ids = [leaf["id"] for leaf in cat["leaves"]]
            chosen = next(s for s in base["selections"] if s in ids)
            for leaf in ids:
                if leaf != chosen:
                    sel = [leaf if s == chosen else s for s in base["selections"]]
                    cases.append({"id": f"{base['id']}-{leaf}", "selections": sel})

    (HERE / "gt").mkdir(exist_ok=True)
    manifest_cases = []
    for index, case in enumerate(cases):
        complex_count = sum(severity[s] == "complex" for s in case["selections"])
        gt = ground_truth(case["selections"])
        (HERE / "gt" / f"{case['id']}.txt").write_text(gt)
        refs = {}
        for system, rate in SYSTEMS.items():
            rng = random.Random(f"{system}/{case['id']}")
            ocr = corrupt(gt, rate + complex_count * COMPLEX_RATE[system], rng)
            path = HERE / "ocr" / system / f"{case['id']}.txt"
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(ocr)
            refs[system] = f"ocr/{system}/{case['id']}.txt"
        manifest_cases.append({
            "id": case["id"],
            "selections": case["selections"],
            "expected_output": "total-fail" if complex_count else "total-pass",
            "gt": f"gt/{case['id']}.txt",
            "ocr": refs,
        })

    manifest = {"model": "../model/receipt_model.yaml", "systems": list(SYSTEMS), "cases": manifest_cases}
    with open(HERE / "manifest.yaml", "w") as fh:
        yaml.safe_dump(manifest, fh, sort_keys=False, default_flow_style=None, width=200)


if __name__ == "__main__":
    main()
