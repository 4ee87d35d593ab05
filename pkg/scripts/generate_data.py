"""Regenerate the bundled converter tables and harvesting-chain config.

Writes src/luxharvest/data/{gaas_eqe.csv, gaas_dark_jv.csv, default_chain.json}.
The EQE is a synthetic GaAs-like curve: flat 0.9 plateau from 400 nm to the
band edge near 873 nm, linear shoulders, zero elsewhere.  The dark J-V is an
ideal diode with n = 2 and J0 = 1e-19 mA/cm2 tabulated at 1 mV steps.
"""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path

import numpy as np

SRC = Path(__file__).resolve().parent.parent / "src"
sys.path.insert(0, str(SRC))

from luxharvest.pv import (  # noqa: E402
    PVConverter,
    write_dark_jv_csv,
    write_eqe_csv,
)

DATA = SRC / "luxharvest" / "data"

BOLTZMANN_J_K = 1.380649e-23
CHARGE_C = 1.602176634e-19
T_K = 298.15
IDEALITY = 2.0
J0_MA_CM2 = 1e-19
BANDGAP_EV = 1.42
EV_NM = 1239.841984  # h*c/q in eV*nm


def build_eqe() -> tuple[np.ndarray, np.ndarray]:
    edge_nm = EV_NM / BANDGAP_EV  # ~873.1 nm
    anchors_nm = [350.0, 360.0, 400.0, 870.0, edge_nm, 950.0]
    anchors_eqe = [0.0, 0.0, 0.9, 0.9, 0.0, 0.0]
    grid = np.arange(350.0, 950.0 + 0.5, 1.0)
    eqe = np.interp(grid, anchors_nm, anchors_eqe)
    return grid, eqe


def build_dark_jv() -> tuple[np.ndarray, np.ndarray]:
    vt = BOLTZMANN_J_K * T_K / CHARGE_C
    v = np.round(np.arange(0, 2501) * 1e-3, 6)
    j = J0_MA_CM2 * np.expm1(v / (IDEALITY * vt))
    return v, j


def main() -> None:
    DATA.mkdir(parents=True, exist_ok=True)
    grid, eqe = build_eqe()
    write_eqe_csv(grid, eqe, DATA / "gaas_eqe.csv")
    v, j = build_dark_jv()
    write_dark_jv_csv(v, j, DATA / "gaas_dark_jv.csv")
    chain = {
        "pmic_curve": [[1e-6, 0.60], [1e-4, 0.75], [1e-3, 0.85], [0.1, 0.90]],
        "battery_eff": 0.95,
        "capacity_wh": 4.4,
    }
    (DATA / "default_chain.json").write_text(json.dumps(chain, indent=2) + "\n")

    # sanity: the tables must round-trip through the converter constructor
    pv = PVConverter(grid, eqe, v, j, area_cm2=1.0, name="gaas_synthetic")
    vt = BOLTZMANN_J_K * T_K / CHARGE_C
    voc_1ma = IDEALITY * vt * math.log(1.0 / J0_MA_CM2 + 1.0)
    print(f"EQE rows: {len(grid)}, dark JV rows: {len(v)}")
    print(f"dark J at v_max: {pv.dark_j(pv.v_max):.6g} mA/cm2")
    print(f"analytic Voc at 1 mA/cm2: {voc_1ma:.6f} V")


if __name__ == "__main__":
    main()
