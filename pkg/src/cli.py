"""
Command-line front end.

    python -m src.cli invariants trefoil --point 1/2
    python -m src.cli obstruct --all --mu 1 --json
    python -m src.cli isotropy planted-boundary-mu2 --bound 1
    python -m src.cli catalog validate data/catalog.jsonl
    python -m src.cli pretzel "P(2,-2)" --fold 1

Exit codes: 0 success, 2 validation failure, 3 missing data, 4 resource bound.
"""
import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor

from src.config import Config
from src.data_access import CatalogValidationError
from src.data_access.catalog_dal import CatalogDAL
from src.models.models import ColouredBoundarySeifertMatrix, InvalidDataError, PretzelParams
from src.services import constructions, diagram, invariants, obstruct
from src.services.isotropy import SearchBoundError, search_doubly_isotropic
from src.services.invariants import MissingDataError
from src.services.laurent import LaurentParseError, TorusPoint, norm_factorization_check
from src.utils import report_format
from src.utils.validators import Validator

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_MISSING_DATA = 3
EXIT_RESOURCE_BOUND = 4


def configure_logging(level=None):
    logging.basicConfig(
        level=(level or Config.LOG_LEVEL).upper(),
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
        stream=sys.stderr,
    )


def _load_record(args):
    ok, message = Validator.validate_name(args.name)
    if not ok:
        raise CatalogValidationError(message)
    record = CatalogDAL.get_record_by_name(args.name, args.catalog)
    if record is None:
        raise MissingDataError(f'no record named {args.name!r} in the catalog')
    if getattr(args, 'mu', None) is not None:
        ok, mu = Validator.validate_mu(args.mu, record.components)
        if not ok:
            raise InvalidDataError(mu)
        record = record.with_mu(mu)
    return record


def _grid_order(args):
    if args.grid is None:
        return None
    ok, order = Validator.validate_grid_order(args.grid)
    if not ok:
        raise InvalidDataError(order)
    return order


def _points(args, mu):
    points = []
    for text in args.point or []:
        ok, point = Validator.validate_point(text, mu)
        if not ok:
            raise InvalidDataError(point)
        points.append(point)
    return points


# Commands ---------------------------------------------------------------------------------

def cmd_invariants(args):
    record = _load_record(args)
    mu = record.mu
    order = _grid_order(args)
    points = _points(args, mu)
    if order is not None:
        points += TorusPoint.grid(mu, order)
    values = {'components': record.components, 'mu': mu}

    collection = obstruct.record_collection(record)
    grid = []
    if collection is not None:
        h = invariants.assemble_cmatrix(collection)
        grid = invariants.evaluate_grid(h, collection.beta0, points or [TorusPoint.minus_one(mu)])
        values['points'] = [v.to_dict() for v in grid]
        values['alexander_nullity'] = invariants.alexander_nullity(h, collection.beta0)
    elif points:
        half = TorusPoint.minus_one(mu)
        if mu != 1 or record.pd is None or any(p != half for p in points):
            raise MissingDataError(f'{record.name}: signatures at these points need Seifert data')
        sigma = diagram.murasugi_signature(record.pd)
        values['points'] = [{'point': str(half), 'sigma': sigma, 'eta': None, 'certified': True}]
    elif mu == 1 and record.pd is not None and len(record.pd.pieces()) <= 1:
        values['points'] = [{'point': '1/2', 'sigma': diagram.murasugi_signature(record.pd), 'eta': None, 'certified': True}]

    if record.seifert is not None:
        delta = invariants.torsion_alexander_1var(record.seifert)
        values['alexander_polynomial'] = str(delta)
        values['norm_factorization'] = norm_factorization_check(delta).status
    group = obstruct.cover_group(record)
    if group is not None:
        values['determinant'] = group.order if group.is_finite else 0
        values['branched_cover'] = str(group)
    linking = obstruct.record_linking(record)
    if linking is not None:
        values['linking_matrix'] = linking.to_list()

    if args.csv and grid:
        report_format.write_grid_csv(args.csv, obstruct.grid_rows(grid))
    if args.json:
        print(report_format.json_line('invariants', {'name': record.name, **values}))
    else:
        print(report_format.format_invariants(record.name, values))
    return EXIT_OK


def _obstruct_one(task):
    record, order = task
    return obstruct.run_obstructions(record, order, workers=1)


def cmd_obstruct(args):
    order = _grid_order(args)
    if args.all:
        records = CatalogDAL.load_records(args.catalog)
        if args.mu is not None:
            recoloured = []
            for record in records:
                try:
                    recoloured.append(record.with_mu(args.mu))
                except InvalidDataError as exc:
                    logger.warning('Skipping %s: %s', record.name, exc)
            records = recoloured
    else:
        if not args.name:
            raise InvalidDataError('give a record name or --all')
        records = []
        for name in args.name:
            args_one = argparse.Namespace(**{**vars(args), 'name': name})
            records.append(_load_record(args_one))

    tasks = [(record, order) for record in records]
    single = len(tasks) == 1
    if single:
        reports = [obstruct.run_obstructions(records[0], order)]
    else:
        reports = _run_batch(tasks)

    for report in reports:
        if report is None:
            continue
        if args.json:
            print(report_format.json_line('obstruction', report.to_dict()))
        else:
            print(report_format.format_report(report))
            print()
    if args.csv and single:
        values = obstruct.signature_values(records[0], order)
        report_format.write_grid_csv(args.csv, obstruct.grid_rows(values))
    return EXIT_OK


def _run_batch(tasks):
    """Reports in input order; records that cannot be processed are logged and skipped."""
    if Config.WORKERS > 1:
        with ProcessPoolExecutor(max_workers=Config.WORKERS) as pool:
            futures = [pool.submit(_obstruct_one, task) for task in tasks]
            outcomes = []
            for (record, _), future in zip(tasks, futures):
                try:
                    outcomes.append(future.result())
                except (MissingDataError, InvalidDataError) as exc:
                    logger.warning('Skipping %s: %s', record.name, exc)
                    outcomes.append(None)
            return outcomes
    outcomes = []
    for task in tasks:
        try:
            outcomes.append(_obstruct_one(task))
        except (MissingDataError, InvalidDataError) as exc:
            logger.warning('Skipping %s: %s', task[0].name, exc)
            outcomes.append(None)
    return outcomes


def cmd_genus_bound(args):
    record = _load_record(args)
    bound = obstruct.genus_lower_bound(record, _grid_order(args))
    if args.json:
        print(report_format.json_line('genus_bound', {'name': record.name, 'mu': record.mu, 'genus_lower_bound': bound}))
    else:
        print(f'{record.name} (mu={record.mu}): doubly slice genus >= {bound}')
    return EXIT_OK


def _boundary_data(record):
    if record.boundary is not None:
        return record.boundary
    if record.mu == 1 and record.seifert is not None:
        return ColouredBoundarySeifertMatrix.from_seifert(record.seifert)
    if record.gsm is not None and record.gsm.mu == 1:
        return ColouredBoundarySeifertMatrix.from_seifert(record.gsm.matrix((-1,)))
    raise MissingDataError(f'{record.name}: needs coloured boundary Seifert data')


def cmd_isotropy(args):
    record = _load_record(args)
    bound = None
    if args.bound is not None:
        ok, bound = Validator.validate_integer(args.bound, 1, 5, 'bound')
        if not ok:
            raise InvalidDataError(bound)
    result = search_doubly_isotropic(_boundary_data(record), bound)
    if args.json:
        print(report_format.json_line('isotropy', {'name': record.name, **result.to_dict()}))
    else:
        print(report_format.format_isotropy(record.name, result))
    return EXIT_OK


def cmd_catalog_validate(args):
    path = args.path or args.catalog
    problems = CatalogDAL.validate_catalog(path)
    for problem in problems:
        print(problem, file=sys.stderr)
    if problems:
        return EXIT_VALIDATION
    print(f'{len(CatalogDAL.load_records(path))} records OK')
    return EXIT_OK


def cmd_pretzel(args):
    params = PretzelParams.parse(args.params)
    for j in args.fold or []:
        params = constructions.fold_pretzel(params, j)
    record = constructions.pretzel_record(params)
    if args.json:
        print(CatalogDAL.dump_record(record))
    else:
        print(f'{record.name}: {record.components} components')
        print(f'  pd: {record.pd}')
        print(f'  determinant: {diagram.determinant(record.pd)}')
        if record.seifert is not None:
            print(f'  seifert: {record.seifert.to_list()}')
        for note in params.provenance:
            print(f'  provenance: {note}')
    return EXIT_OK


# Parser ------------------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog='linksig', description='Abelian invariants and double-sliceness obstructions for links.')
    parser.add_argument('--catalog', default=None, help='catalog file (default: LINKSIG_CATALOG_PATH or data/catalog.jsonl)')
    parser.add_argument('--log-level', default=None, help='root log level (default from LINKSIG_LOG_LEVEL)')
    parser.add_argument('--workers', type=int, default=None, help='worker processes for batch runs and searches')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('invariants', help='signatures, nullities, Alexander data and cover group of one record')
    p.add_argument('name')
    p.add_argument('--mu', type=int)
    p.add_argument('--grid', type=int, help='evaluate on the full q^mu grid')
    p.add_argument('--point', action='append', help='torus point as fractions of a turn, e.g. 1/2,1/3')
    p.add_argument('--json', action='store_true')
    p.add_argument('--csv', help='write angles, sigma, eta, certified rows')
    p.set_defaults(handler=cmd_invariants)

    p = sub.add_parser('obstruct', help='run every abelian obstruction')
    p.add_argument('name', nargs='*')
    p.add_argument('--all', action='store_true', help='every record in the catalog')
    p.add_argument('--mu', type=int)
    p.add_argument('--grid', type=int)
    p.add_argument('--json', action='store_true')
    p.add_argument('--csv')
    p.set_defaults(handler=cmd_obstruct)

    p = sub.add_parser('genus-bound', help='lower bound on the doubly slice genus')
    p.add_argument('name')
    p.add_argument('--mu', type=int)
    p.add_argument('--grid', type=int)
    p.add_argument('--json', action='store_true')
    p.set_defaults(handler=cmd_genus_bound)

    p = sub.add_parser('isotropy', help='bounded search for a doubly isotropic pair')
    p.add_argument('name')
    p.add_argument('--bound', type=int)
    p.add_argument('--json', action='store_true')
    p.set_defaults(handler=cmd_isotropy)

    p = sub.add_parser('catalog', help='catalog maintenance')
    catalog_sub = p.add_subparsers(dest='catalog_command', required=True)
    v = catalog_sub.add_parser('validate', help='check every record of a catalog file')
    v.add_argument('path', nargs='?')
    v.set_defaults(handler=cmd_catalog_validate)

    p = sub.add_parser('pretzel', help='generate a pretzel link record')
    p.add_argument('params', help='P(a1,...,ak)')
    p.add_argument('--fold', type=int, action='append', help='fold at position j (repeatable)')
    p.add_argument('--json', action='store_true', help='print a catalog line')
    p.set_defaults(handler=cmd_pretzel)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.workers is not None:
        Config.WORKERS = max(1, args.workers)
    try:
        configure_logging(args.log_level)
        return args.handler(args)
    except SearchBoundError as exc:
        print(f'error: {exc}', file=sys.stderr)
        return EXIT_RESOURCE_BOUND
    except (MissingDataError, FileNotFoundError) as exc:
        print(f'error: {exc}', file=sys.stderr)
        return EXIT_MISSING_DATA
    except (CatalogValidationError, InvalidDataError, LaurentParseError, ValueError) as exc:
        print(f'error: {exc}', file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == '__main__':
    sys.exit(main())
