"""
Catalog Data Access Layer
Reads and writes link records as canonical JSON lines
"""
import json
import logging

from src.config import Config
from src.data_access import CatalogValidationError, open_catalog, read_catalog_lines
from src.models.models import (
    ColouredBoundarySeifertMatrix,
    GeneralizedSeifertCollection,
    InvalidDataError,
    LinkRecord,
)
from src.services.diagram import PDParseError, parse_pd
from src.utils.validators import Validator

logger = logging.getLogger(__name__)

FIELD_ORDER = (
    'schema',
    'name',
    'components',
    'mu',
    'colouring',
    'pd',
    'seifert',
    'gsm',
    'linking',
    'orientation_tag',
    'provenance',
    'cover_presentation',
    'component_seifert',
    'boundary',
)
REQUIRED_FIELDS = ('name', 'components', 'mu', 'colouring')


def canonical_json(data):
    """Stable single-line JSON used for every line written."""
    return json.dumps(data, separators=(', ', ': '), ensure_ascii=False)


class CatalogDAL:
    """Data access layer for catalog records"""

    @staticmethod
    def record_to_dict(record):
        """Serialize a record in field order, leaving out absent data"""
        values = {
            'schema': Config.SCHEMA_VERSION,
            'name': record.name,
            'components': record.components,
            'mu': record.mu,
            'colouring': list(record.colouring),
            'pd': str(record.pd) if record.pd is not None else None,
            'seifert': record.seifert.to_list() if record.seifert is not None else None,
            'gsm': record.gsm.to_dict() if record.gsm is not None else None,
            'linking': record.linking.to_list() if record.linking is not None else None,
            'orientation_tag': record.orientation_tag,
            'provenance': dict(record.provenance),
            'cover_presentation': record.cover_presentation.to_list() if record.cover_presentation is not None else None,
            'component_seifert': (
                [m.to_list() for m in record.component_seifert] if record.component_seifert is not None else None
            ),
            'boundary': record.boundary.to_dict() if record.boundary is not None else None,
        }
        return {key: values[key] for key in FIELD_ORDER if values[key] is not None}

    @staticmethod
    def record_from_dict(data, line=None):
        """Validate one decoded catalog object and build the record"""
        if not isinstance(data, dict):
            raise CatalogValidationError('each line must be a JSON object', line)
        unknown = sorted(set(data) - set(FIELD_ORDER))
        if unknown:
            raise CatalogValidationError(f'unknown fields {unknown}', line)
        missing = [key for key in REQUIRED_FIELDS if key not in data]
        if missing:
            raise CatalogValidationError(f'missing fields {missing}', line)
        schema = data.get('schema', Config.SCHEMA_VERSION)
        if schema != Config.SCHEMA_VERSION:
            raise CatalogValidationError(f'unsupported schema version {schema}', line)

        ok, message = Validator.validate_name(data['name'])
        if not ok:
            raise CatalogValidationError(message, line)
        ok, components = Validator.validate_integer(data['components'], 1, None, 'components')
        if not ok:
            raise CatalogValidationError(components, line)
        ok, mu = Validator.validate_mu(data['mu'], components)
        if not ok:
            raise CatalogValidationError(mu, line)
        ok, colouring = Validator.validate_colouring(data['colouring'], components, mu)
        if not ok:
            raise CatalogValidationError(colouring, line)
        ok, message = Validator.validate_provenance(data.get('provenance', {}))
        if not ok:
            raise CatalogValidationError(message, line)
        tag = data.get('orientation_tag', '')
        if not isinstance(tag, str):
            raise CatalogValidationError('orientation_tag must be a string', line)

        def matrix(key, square=True):
            if key not in data:
                return None
            ok, value = Validator.validate_matrix(data[key], key, square=square)
            if not ok:
                raise CatalogValidationError(value, line)
            return value

        try:
            pd = parse_pd(data['pd']) if 'pd' in data else None
        except PDParseError as exc:
            raise CatalogValidationError(f'pd: {exc}', line) from exc

        component_seifert = None
        if 'component_seifert' in data:
            if not isinstance(data['component_seifert'], list):
                raise CatalogValidationError('component_seifert must be a list of matrices', line)
            component_seifert = []
            for index, rows in enumerate(data['component_seifert']):
                ok, value = Validator.validate_matrix(rows, f'component_seifert[{index}]', square=True)
                if not ok:
                    raise CatalogValidationError(value, line)
                component_seifert.append(value)

        try:
            return LinkRecord(
                name=data['name'],
                components=components,
                mu=mu,
                colouring=colouring,
                pd=pd,
                seifert=matrix('seifert'),
                gsm=GeneralizedSeifertCollection.from_dict(data['gsm']) if 'gsm' in data else None,
                linking=matrix('linking'),
                orientation_tag=tag,
                provenance=dict(data.get('provenance', {})),
                cover_presentation=matrix('cover_presentation'),
                component_seifert=tuple(component_seifert) if component_seifert is not None else None,
                boundary=ColouredBoundarySeifertMatrix.from_dict(data['boundary']) if 'boundary' in data else None,
            )
        except InvalidDataError as exc:
            raise CatalogValidationError(str(exc), line) from exc

    @staticmethod
    def dump_record(record):
        return canonical_json(CatalogDAL.record_to_dict(record))

    @staticmethod
    def parse_line(text, line=None):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CatalogValidationError(f'invalid JSON ({exc.msg} at column {exc.colno})', line) from exc
        return CatalogDAL.record_from_dict(data, line)

    @staticmethod
    def load_records(path=None):
        """Load every record; names must be unique"""
        records = []
        seen = {}
        for number, text in read_catalog_lines(path):
            record = CatalogDAL.parse_line(text, number)
            if record.name in seen:
                raise CatalogValidationError(f'duplicate name {record.name!r} (first on line {seen[record.name]})', number)
            seen[record.name] = number
            records.append(record)
        logger.debug('Loaded %d records', len(records))
        return records

    @staticmethod
    def validate_catalog(path=None):
        """Collect every problem instead of stopping at the first one"""
        problems = []
        seen = {}
        for number, text in read_catalog_lines(path):
            try:
                record = CatalogDAL.parse_line(text, number)
            except CatalogValidationError as exc:
                problems.append(str(exc))
                continue
            if record.name in seen:
                problems.append(str(CatalogValidationError(f'duplicate name {record.name!r}', number)))
            seen.setdefault(record.name, number)
        return problems

    @staticmethod
    def get_record_by_name(name, path=None):
        """Get a record by name"""
        for record in CatalogDAL.load_records(path):
            if record.name == name:
                return record
        return None

    @staticmethod
    def save_records(records, path=None):
        """Write records in canonical form, replacing the catalog atomically"""
        names = set()
        with open_catalog(path) as handle:
            for record in records:
                if record.name in names:
                    raise CatalogValidationError(f'duplicate name {record.name!r}')
                names.add(record.name)
                handle.write(CatalogDAL.dump_record(record) + '\n')
        return len(names)
