#!/usr/bin/env python3
"""Run every figure preset and drop CSV + SVG into an output directory.

Equivalent to calling `chaocav <command> --fig <name> --svg --out ...`
four times; kept as a script so the whole set reproduces with one command.
"""

import argparse
import sys
from pathlib import Path

from chaocav import cli

PRESET_COMMANDS = [(name, spec["command"]) for name, spec in sorted(cli.PRESETS.items())]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="figures", help="output directory (default figures/)")
    args = ap.parse_args(argv)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    for name, command in PRESET_COMMANDS:
        out = out_dir / f"fig{name}.csv"
        code = cli.main([command, "--fig", name, "--svg", "--out", str(out)])
        if code != 0:
            print(f"preset {name} failed with exit code {code}", file=sys.stderr)
            return code
    print(f"wrote {2 * len(PRESET_COMMANDS)} files under {out_dir}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
