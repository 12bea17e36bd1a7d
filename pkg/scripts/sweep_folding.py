#!/usr/bin/env python3
"""
Fold pretzel links and run the obstruction pipeline on every fold.

Folding P(..., a_j, ...) into P(..., a_j, -a_j, a_j, ...) preserves weak
double sliceness, so every link printed here should come out with
"no abelian obstruction". Prints one JSON line per link.

    python scripts/sweep_folding.py "P(2,-2)" --depth 2 --grid 12
"""
import argparse
import logging
import os
import sys

# Ensure the project root is on the Python path when running as a script
PROJECT_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if PROJECT_ROOT not in sys.path:
    sys.path.append(PROJECT_ROOT)

from src.cli import configure_logging
from src.models.models import PretzelParams
from src.services.constructions import UnsupportedConstructionError, fold_pretzel, pretzel_record
from src.services.obstruct import run_obstructions
from src.utils.report_format import json_line

logger = logging.getLogger('sweep_folding')


def folds(base, depth):
    """Breadth-first folds of ``base`` up to ``depth`` steps, without repeats"""
    seen = {base.twists}
    layer = [base]
    yield base
    for _ in range(depth):
        next_layer = []
        for params in layer:
            for j in range(1, params.length + 1):
                folded = fold_pretzel(params, j)
                if folded.twists in seen:
                    continue
                seen.add(folded.twists)
                next_layer.append(folded)
                yield folded
        layer = next_layer


def sweep(bases, depth, grid_order):
    for text in bases:
        for params in folds(PretzelParams.parse(text), depth):
            try:
                record = pretzel_record(params)
            except UnsupportedConstructionError as exc:
                logger.warning('Skipping %s: %s', params, exc)
                continue
            report = run_obstructions(record, grid_order)
            print(json_line('obstruction', report.to_dict()))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    parser.add_argument('bases', nargs='*', default=['P(2,-2)'])
    parser.add_argument('--depth', type=int, default=1)
    parser.add_argument('--grid', type=int, default=12)
    parser.add_argument('--log-level', default=None)
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    sweep(args.bases, args.depth, args.grid)
    return 0


if __name__ == '__main__':
    sys.exit(main())
