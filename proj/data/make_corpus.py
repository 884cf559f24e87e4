#!/usr/bin/env python3
"""Regenerates the JSON corpus under data/corpus and data/scenarios."""

import json
import math
from pathlib import Path

HERE = Path(__file__).resolve().parent


def c(z):
    return [z.real, z.imag]


def seq(z1, z0):
    return {"z1": c(z1), "z0": c(z0)}


def polar(m, deg):
    r = math.radians(deg)
    return complex(m * math.cos(r), m * math.sin(r))


def net(name, s_base=100.0, unit="pu"):
    return {
        "schema_version": 1,
        "name": name,
        "s_base_mva": s_base,
        "impedance_unit": unit,
        "buses": [],
        "branches": [],
        "transformers": [],
        "regulators": [],
        "loads": [],
        "sources": [],
        "generators": [],
        "switches": [],
        "ibrs": [],
    }


def bus(n, id, kv, phases="ABC"):
    n["buses"].append({"id": id, "phases": phases, "base_kv": kv})


def line(n, id, a, b, z1, z0, phases="ABC", y1=None):
    br = {"id": id, "from": a, "to": b, "phases": phases, "z": seq(z1, z0)}
    if y1 is not None:
        br["y_shunt"] = {"y1": c(y1), "y0": c(y1 * 0.6)}
    n["branches"].append(br)


def ibr(n, id, b, mode, s_rated, p_ref, **kw):
    u = {"id": id, "bus": b, "mode": mode, "s_rated_mva": s_rated, "p_ref": p_ref, "i_max": 1.1, "k_factor": 2.0}
    u.update(kw)
    n["ibrs"].append(u)


def two_bus():
    n = net("two-bus linear")
    bus(n, "1", 115.0)
    bus(n, "2", 115.0)
    n["sources"].append({"id": "grid", "bus": "1", "e": c(1.0), "z_int": seq(0.01 + 0.1j, 0.02 + 0.3j)})
    line(n, "L12", "1", "2", 0.02 + 0.08j, 0.06 + 0.24j)
    return n


def three_bus():
    n = net("three-bus loads", s_base=10.0)
    for b in ("1", "2", "3"):
        bus(n, b, 12.47)
    n["sources"].append({"id": "grid", "bus": "1", "e": c(1.0), "z_int": seq(0.005 + 0.05j, 0.01 + 0.1j)})
    line(n, "L12", "1", "2", 0.02 + 0.06j, 0.05 + 0.18j)
    line(n, "L23", "2", "3", 0.03 + 0.05j, 0.07 + 0.16j)
    n["loads"].append({"id": "P3", "bus": "3", "s": [c(0.12 + 0.05j), c(0.08 + 0.03j), c(0.10 + 0.02j)], "model": "pq"})
    n["loads"].append({"id": "Z2", "bus": "2", "s_total": c(0.15 + 0.06j), "model": "z"})
    return n


def ibr_radial(mode, name, **kw):
    # grid -- 69/12.47 kV Dyg transformer -- feeder -- IBR terminal
    n = net(name, s_base=10.0)
    bus(n, "grid", 69.0)
    bus(n, "poc", 12.47)
    bus(n, "ibr", 12.47)
    n["sources"].append({"id": "grid", "bus": "grid", "e": c(1.0), "z_int": seq(0.004 + 0.04j, 0.008 + 0.08j)})
    n["transformers"].append({"id": "T1", "from": "grid", "to": "poc", "from_conn": "D", "to_conn": "Yg",
                              "z_leak": c(0.005 + 0.06j), "z0_path": c(0.005 + 0.06j)})
    line(n, "L1", "poc", "ibr", 0.01 + 0.03j, 0.03 + 0.09j)
    n["loads"].append({"id": "load", "bus": "poc", "s_total": c(0.3 + 0.1j), "model": "pq"})
    ibr(n, "IBR1", "ibr", mode, 5.0, 0.8, z_filter=c(-25j), **kw)
    return n


def unbalanced_laterals():
    n = net("unbalanced laterals", s_base=5.0)
    for b in ("src", "m1", "m2"):
        bus(n, b, 12.47)
    bus(n, "latB", 12.47, "B")
    bus(n, "latAC", 12.47, "AC")
    bus(n, "pv", 12.47)
    n["sources"].append({"id": "grid", "bus": "src", "e": c(1.0), "z_int": seq(0.002 + 0.02j, 0.004 + 0.05j)})
    mutual = {"z": [[c(0.040 + 0.090j), c(0.010 + 0.035j), c(0.010 + 0.030j)],
                    [c(0.010 + 0.035j), c(0.041 + 0.088j), c(0.010 + 0.032j)],
                    [c(0.010 + 0.030j), c(0.010 + 0.032j), c(0.039 + 0.091j)]]}
    n["branches"].append({"id": "M1", "from": "src", "to": "m1", "phases": "ABC", **mutual})
    line(n, "M2", "m1", "m2", 0.03 + 0.06j, 0.09 + 0.2j)
    n["branches"].append({"id": "LB", "from": "m1", "to": "latB", "phases": "B", "z": [[c(0.06 + 0.05j)]]})
    n["branches"].append({"id": "LAC", "from": "m2", "to": "latAC", "phases": "AC",
                          "z": [[c(0.05 + 0.07j), c(0.01 + 0.03j)], [c(0.01 + 0.03j), c(0.05 + 0.07j)]]})
    line(n, "LPV", "m2", "pv", 0.01 + 0.02j, 0.03 + 0.06j)
    n["loads"].append({"id": "LdB", "bus": "latB", "phases": "B", "s": [c(0.15 + 0.05j)], "model": "pq"})
    n["loads"].append({"id": "LdAC", "bus": "latAC", "phases": "AC", "s": [c(0.10 + 0.04j), c(0.07 + 0.02j)], "model": "pq"})
    n["loads"].append({"id": "Ldm1", "bus": "m1", "s": [c(0.05 + 0.02j), c(0.06 + 0.02j), c(0.04 + 0.01j)], "model": "z"})
    ibr(n, "PV1", "pv", "GFL", 1.0, 0.9, z_filter=c(-30j))
    return n


def feeder():
    # IEEE-34-like radial feeder: 24.9 kV trunk with laterals, two regulators,
    # one 200 kW IBR on a 0.48 kV service transformer mid-feeder.
    n = net("34-bus style feeder", s_base=2.5, unit="ohm")
    kv = 24.9
    trunk = ["800", "802", "806", "808", "812", "814", "R1", "850", "816", "824", "828", "830", "854",
             "852", "R2", "832", "858", "834", "860", "836", "840"]
    for b in trunk:
        bus(n, b, kv)
    laterals = [("808", "810", "B"), ("816", "818", "A"), ("818", "820", "A"), ("820", "822", "A"),
                ("824", "826", "B"), ("854", "856", "B"), ("858", "864", "A"), ("834", "842", "ABC"),
                ("842", "844", "ABC"), ("844", "846", "ABC"), ("846", "848", "ABC"), ("836", "862", "ABC"),
                ("862", "838", "B")]
    for _, b, ph in laterals:
        bus(n, b, kv, ph)
    bus(n, "890", 4.16)
    bus(n, "pv", 0.48)

    z_base = kv * kv / 2.5
    n["sources"].append({"id": "sub", "bus": "800", "e": c(1.05),
                         "z_int": seq((0.001 + 0.01j) * z_base, (0.002 + 0.03j) * z_base)})
    z1_km, z0_km = 0.35 + 0.42j, 0.75 + 1.45j
    lengths = [0.8, 0.5, 9.8, 11.4, 9.2, 0.0, 0.0, 0.1, 3.1, 0.9, 6.2, 0.2, 11.2, 0.0, 0.0, 1.6, 0.3, 0.9, 0.2, 0.3]
    for k, (a, b) in enumerate(zip(trunk, trunk[1:])):
        if a == "814" and b == "R1":
            n["regulators"].append({"id": "REG1", "from": "814", "to": "R1", "v_target": 1.03, "step": 0.00625,
                                    "tap_min": 0.9, "tap_max": 1.1})
            continue
        if a == "852" and b == "R2":
            n["regulators"].append({"id": "REG2", "from": "852", "to": "R2", "v_target": 1.03, "step": 0.00625,
                                    "tap_min": 0.9, "tap_max": 1.1})
            continue
        length = max(lengths[k], 0.05)
        if (a, b) in (("R1", "850"), ("R2", "832")):
            length = 0.05
        line(n, f"{a}-{b}", a, b, z1_km * length, z0_km * length, y1=4.2e-6j * length)
    lat_z = {"A": 0.8 + 0.5j, "B": 0.8 + 0.5j}
    for a, b, ph in laterals:
        length = 3.0 if ph != "ABC" else 1.2
        if ph == "ABC":
            line(n, f"{a}-{b}", a, b, z1_km * length, z0_km * length)
        else:
            n["branches"].append({"id": f"{a}-{b}", "from": a, "to": b, "phases": ph,
                                  "z": [[c(lat_z[ph] * length)]]})
    n["transformers"].append({"id": "XFM1", "from": "832", "to": "890", "from_conn": "Yg", "to_conn": "Yg",
                              "z_leak": c((0.019 + 0.041j) * 4.16 ** 2 / 2.5),
                              "z0_path": c((0.019 + 0.041j) * 4.16 ** 2 / 2.5)})
    n["transformers"].append({"id": "XPV", "from": "834", "to": "pv", "from_conn": "D", "to_conn": "Yg",
                              "z_leak": c((0.01 + 0.05j) * 0.48 ** 2 / 2.5),
                              "z0_path": c((0.01 + 0.05j) * 0.48 ** 2 / 2.5)})
    spot = {"860": (0.060, 0.048), "840": (0.027, 0.021), "844": (0.405, 0.315), "848": (0.060, 0.048),
            "890": (0.450, 0.225), "830": (0.045, 0.020)}
    for b, (p, q) in spot.items():
        s = complex(p, q) / (2.5 / 3.0)
        n["loads"].append({"id": f"S{b}", "bus": b, "s": [c(s), c(s * 0.9), c(s * 1.1)],
                           "model": "z" if b == "890" else "pq"})
    dist = [("822", "A", 0.135, 0.070), ("820", "A", 0.034, 0.017), ("810", "B", 0.016, 0.008),
            ("826", "B", 0.040, 0.020), ("856", "B", 0.004, 0.002), ("864", "A", 0.002, 0.001),
            ("838", "B", 0.028, 0.014), ("846", "ABC", 0.046, 0.023), ("802", "ABC", 0.030, 0.015)]
    for b, ph, p, q in dist:
        s = complex(p, q) / (2.5 / 3.0)
        if ph == "ABC":
            n["loads"].append({"id": f"D{b}", "bus": b, "s_total": c(3 * s), "model": "pq"})
        else:
            n["loads"].append({"id": f"D{b}", "bus": b, "phases": ph, "s": [c(s)], "model": "pq"})
    ibr(n, "PV200", "pv", "GFL", 0.25, 0.8, z_filter=c(-20j))
    return n


def transmission_loop(all_gfl=False):
    # 230 kV ring of six buses, a stiff grid, one synchronous machine and
    # three IBR plants on 34.5 kV collector buses.
    name = "transmission loop, all GFL (stressed)" if all_gfl else "transmission loop, 1 GFM + 2 GFL"
    n = net(name, s_base=100.0)
    ring = ["B1", "B2", "B3", "B4", "B5", "B6"]
    for b in ring:
        bus(n, b, 230.0)
    for b in ("W1", "W2", "W3"):
        bus(n, b, 34.5)
    if all_gfl:
        n["sources"].append({"id": "grid", "bus": "B1", "e": c(1.02), "z_int": seq(0.01 + 0.1j, 0.02 + 0.2j)})
    else:
        n["sources"].append({"id": "grid", "bus": "B1", "e": c(1.02), "z_int": seq(0.002 + 0.02j, 0.004 + 0.04j)})
        n["generators"].append({"id": "G4", "bus": "B4", "p_set": 0.8, "e_set": 1.05, "z_machine": c(0.003 + 0.25j)})
    zl = [(0.006 + 0.05j), (0.008 + 0.06j), (0.005 + 0.045j), (0.007 + 0.055j), (0.009 + 0.07j), (0.006 + 0.048j)]
    for k, a in enumerate(ring):
        b = ring[(k + 1) % len(ring)]
        line(n, f"{a}-{b}", a, b, zl[k], 3.0 * zl[k], y1=0.08j)
    step = [("T1", "B2", "W1"), ("T2", "B3", "W2"), ("T3", "B5", "W3")]
    for id, a, b in step:
        n["transformers"].append({"id": id, "from": a, "to": b, "from_conn": "Yg", "to_conn": "D",
                                  "z_leak": c(0.002 + 0.08j)})
    for b, (p, q) in {"B3": (0.9, 0.3), "B4": (0.6, 0.2), "B5": (0.7, 0.25), "B6": (1.0, 0.35)}.items():
        n["loads"].append({"id": f"L{b}", "bus": b, "s_total": c(complex(p, q) * 3.0), "model": "pq"})
    ibr(n, "IBR1", "W1", "GFL" if all_gfl else "GFM", 80.0 if not all_gfl else 100.0, 0.75, z_filter=c(-12j))
    ibr(n, "IBR2", "W2", "GFL", 60.0 if not all_gfl else 100.0, 0.8, z_filter=c(-12j))
    ibr(n, "IBR3", "W3", "GFL", 50.0 if not all_gfl else 100.0, 0.7, z_filter=c(-12j),
        csm="conventional")
    return n


def scenarios():
    out = {}
    out["loop_faults"] = {
        "schema_version": 1,
        "pf": {"tol": 1e-8, "max_iter": 50},
        "sc": {"tol": 1e-6, "max_iter": 20},
        "faults": [{"bus": "B4", "kind": k, "z_fault": c(0.0)} for k in ("AG", "BC", "BCG", "ABC", "ABCG", "CA")],
        "outputs": {"table": True, "machine": True, "trace": True},
    }
    out["loop_sweep"] = {
        "schema_version": 1,
        "sweep": {"buses": ["B1", "B2", "B4", "B6", "W1", "W2", "W3"], "kinds": "all",
                  "z_faults": [c(0.0), c(0.05), c(0.01 + 0.1j)]},
    }
    out["feeder_sweep"] = {
        "schema_version": 1,
        "sweep": {"buses": ["834", "pv", "846", "836", "860", "848"], "kinds": "all", "z_faults": [c(0.0), c(0.5)]},
    }
    out["stressed"] = {
        "schema_version": 1,
        "faults": [{"bus": "B3", "kind": "ABC", "z_fault": c(0.0)}],
    }
    return out


def main():
    corpus = {
        "two_bus": two_bus(),
        "three_bus_loads": three_bus(),
        "gfm_radial": ibr_radial("GFM", "GFM behind a feeder"),
        "gfl_radial": ibr_radial("GFL", "GFL behind a feeder", csm="improved"),
        "unbalanced_laterals": unbalanced_laterals(),
        "feeder34": feeder(),
        "transmission_loop": transmission_loop(),
        "all_gfl_stressed": transmission_loop(all_gfl=True),
    }
    (HERE / "corpus").mkdir(exist_ok=True)
    (HERE / "scenarios").mkdir(exist_ok=True)
    for name, doc in corpus.items():
        (HERE / "corpus" / f"{name}.json").write_text(json.dumps(doc, indent=2) + "\n")
    for name, doc in scenarios().items():
        (HERE / "scenarios" / f"{name}.json").write_text(json.dumps(doc, indent=2) + "\n")


if __name__ == "__main__":
    main()
