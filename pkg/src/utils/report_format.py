"""Rendering of reports and invariant summaries for the terminal and for JSON lines."""
from __future__ import annotations

import csv
from typing import Dict, Iterable, List, Sequence

from src.config import Config
from src.data_access.catalog_dal import canonical_json


def json_line(kind: str, payload: Dict[str, object]) -> str:
    """One stable JSON line stamped with the schema version and record kind."""
    return canonical_json({'schema': Config.SCHEMA_VERSION, 'kind': kind, **payload})


def _table(rows: Sequence[Sequence[str]], headers: Sequence[str]) -> List[str]:
    widths = [len(h) for h in headers]
    for row in rows:
        widths = [max(w, len(cell)) for w, cell in zip(widths, row)]
    lines = ['  '.join(h.ljust(w) for h, w in zip(headers, widths)).rstrip()]
    lines.append('  '.join('-' * w for w in widths))
    for row in rows:
        lines.append('  '.join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    return lines


def format_report(report) -> str:
    """Human-readable table for an ObstructionReport."""
    lines = [f'{report.name} (mu={report.mu}): {report.verdict}']
    rows = [(c.criterion, c.title, c.status, c.witness) for c in report.criteria]
    lines.extend(_table(rows, ('id', 'criterion', 'status', 'witness')))
    lines.append(f'doubly slice genus >= {report.genus_lower_bound} (grid q={report.grid_order})')
    lines.extend(f'note: {note}' for note in report.notes)
    if not report.obstructed:
        lines.append(report.DISCLAIMER)
    return '\n'.join(lines)


def format_invariants(name: str, values: Dict[str, object]) -> str:
    """``key: value`` lines; nested grid values become a small table."""
    lines = [name]
    for key, value in values.items():
        if key == 'points':
            rows = [(p['point'], str(p['sigma']), '-' if p['eta'] is None else str(p['eta']),
                     'yes' if p['certified'] else 'no') for p in value]
            lines.extend('  ' + line for line in _table(rows, ('point', 'sigma', 'eta', 'certified')))
        else:
            lines.append(f'  {key}: {value}')
    return '\n'.join(lines)


def format_isotropy(name: str, result) -> str:
    lines = [f'{name}: {result.status}']
    if result.note:
        lines.append(f'  reason: {result.note}')
    if result.found:
        for label, family in (('G+', result.plus), ('G-', result.minus)):
            for colour, columns in enumerate(family.to_dict()['columns'], start=1):
                lines.append(f'  {label}_{colour}: {columns}')
    lines.append(f'  searched: {result.searched}')
    return '\n'.join(lines)


def write_grid_csv(path: str, rows: Iterable[Sequence[object]]) -> None:
    with open(path, 'w', newline='', encoding='utf-8') as handle:
        writer = csv.writer(handle)
        writer.writerow(['angles', 'sigma', 'eta', 'certified'])
        writer.writerows(rows)
