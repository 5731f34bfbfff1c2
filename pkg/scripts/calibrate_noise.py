#!/usr/bin/env python3
"""Map target WCHD levels to the noise sigma that produces them.

Sweeps the calibration loop over a range of reliability targets on the
standard 1024x32 probe macro, then re-measures each calibrated sigma on a
fresh simulated bank as a sanity check.
"""

import argparse

import numpy as np

from srampuf.layout import Geometry, Orientation, PlacedMacro
from srampuf.metrics import calibrate_noise, wchd
from srampuf.simchip import ChipBank, DesignEntry, ProcessParams


def measure(sigma, probe, chips=10, cycles=10, seed=7):
    params = ProcessParams(sigma_noise=sigma)
    bank = ChipBank((probe,), params, seed)
    values = []
    for chip in range(chips):
        enroll = bank.snapshots(chip, 0)[probe.name].bits.reshape(-1)
        for cycle in range(1, cycles):
            recon = bank.snapshots(chip, cycle)[probe.name].bits.reshape(-1)
            values.append(wchd(enroll, recon))
    return float(np.mean(values))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--targets", type=float, nargs="+",
                    default=[0.02, 0.05, 0.065, 0.09, 0.12])
    ap.add_argument("--budget", type=int, default=90,
                    help="chip power-ups the calibration may spend per probe")
    args = ap.parse_args()

    probe = DesignEntry(
        "probe",
        PlacedMacro(Geometry(depth=1024, width=32, mux=8), Orientation.R90),
        "0(16)1(16)",
    )
    print("target   sigma_noise   measured")
    for target in args.targets:
        sigma = calibrate_noise(target, ProcessParams(), probe, args.budget)
        print(f"{target:6.3f}   {sigma:11.6f}   {measure(sigma, probe):8.4f}")


if __name__ == "__main__":
    main()
