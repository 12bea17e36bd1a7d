import json

import pytest

from src.data_access import CatalogValidationError, init_catalog, read_catalog_lines
from src.data_access.catalog_dal import FIELD_ORDER, CatalogDAL
from src.models.models import LinkRecord, PretzelParams
from src.services.constructions import pretzel_record
from tests.conftest import CATALOG

TREFOIL_LINE = (
    '{"schema": 1, "name": "trefoil", "components": 1, "mu": 1, "colouring": [1], '
    '"seifert": [[-1, 1], [0, -1]], "orientation_tag": "", "provenance": {}}'
)


def _write(path, lines):
    path.write_text('\n'.join(lines) + '\n', encoding='utf-8')
    return str(path)


def test_shipped_catalog_loads():
    records = CatalogDAL.load_records()
    names = [r.name for r in records]
    assert names[:2] == ['unknot', 'trefoil']
    assert len(names) == len(set(names)) == 22


def test_shipped_catalog_round_trips_byte_for_byte(tmp_path):
    """Load then save reproduces the canonical file exactly."""
    target = str(tmp_path / 'copy.jsonl')
    written = CatalogDAL.save_records(CatalogDAL.load_records(), target)
    assert written == 22
    with open(CATALOG, encoding='utf-8') as a, open(target, encoding='utf-8') as b:
        assert a.read() == b.read()


def test_dump_keeps_field_order():
    line = CatalogDAL.dump_record(CatalogDAL.get_record_by_name('L11n247'))
    keys = list(json.loads(line))
    assert keys == [k for k in FIELD_ORDER if k in keys]
    assert CatalogDAL.parse_line(line).cover_presentation.to_list() == [[17]]


def test_shipped_catalog_validates():
    assert CatalogDAL.validate_catalog() == []


def test_get_record_by_name():
    record = CatalogDAL.get_record_by_name('planted-boundary-mu2')
    assert record.mu == 2
    assert record.colouring == (1, 2)
    assert record.boundary.block_sizes == (2, 2)
    assert CatalogDAL.get_record_by_name('no-such-link') is None


def test_missing_catalog_raises(tmp_path):
    with pytest.raises(FileNotFoundError):
        CatalogDAL.load_records(str(tmp_path / 'absent.jsonl'))


def test_blank_lines_are_skipped(tmp_path):
    path = _write(tmp_path / 'c.jsonl', ['', TREFOIL_LINE, '   '])
    assert [number for number, _ in read_catalog_lines(path)] == [2]
    assert CatalogDAL.load_records(path)[0].name == 'trefoil'


@pytest.mark.parametrize(
    'line,message',
    [
        ('{"name": "x"', 'invalid JSON'),
        ('[1, 2]', 'JSON object'),
        (TREFOIL_LINE.replace('"provenance"', '"colour"'), 'unknown fields'),
        ('{"name": "x", "components": 1, "mu": 1}', 'missing fields'),
        (TREFOIL_LINE.replace('"schema": 1', '"schema": 2'), 'schema version'),
        (TREFOIL_LINE.replace('"colouring": [1]', '"colouring": [2]'), 'Colour'),
        (TREFOIL_LINE.replace('"mu": 1', '"mu": 2'), 'mu'),
        (TREFOIL_LINE.replace('[[-1, 1], [0, -1]]', '[[-1, 1]]'), 'square'),
        (TREFOIL_LINE.replace('[[-1, 1], [0, -1]]', '[[-1, 1.5], [0, -1]]'), 'integers'),
        (TREFOIL_LINE.replace('"provenance": {}', '"provenance": {"pd": 3}'), 'strings'),
        (TREFOIL_LINE.replace('"orientation_tag": ""', '"pd": "X[1,2,3]"'), 'pd'),
    ],
)
def test_bad_lines_are_rejected_with_line_numbers(tmp_path, line, message):
    path = _write(tmp_path / 'c.jsonl', [TREFOIL_LINE.replace('trefoil', 'first'), line])
    with pytest.raises(CatalogValidationError) as excinfo:
        CatalogDAL.load_records(path)
    assert excinfo.value.line == 2
    assert message in str(excinfo.value)
    assert str(excinfo.value).startswith('line 2:')


def test_duplicate_names_are_rejected(tmp_path):
    path = _write(tmp_path / 'c.jsonl', [TREFOIL_LINE, TREFOIL_LINE])
    with pytest.raises(CatalogValidationError, match='duplicate name'):
        CatalogDAL.load_records(path)


def test_validate_collects_every_problem(tmp_path):
    """Each bad line is reported once, with its line number."""
    path = _write(
        tmp_path / 'c.jsonl',
        [
            TREFOIL_LINE,
            'not json',
            TREFOIL_LINE,
            TREFOIL_LINE.replace('"colouring": [1]', '"colouring": [1, 1]'),
        ],
    )
    problems = CatalogDAL.validate_catalog(path)
    assert len(problems) == 3
    assert problems[0].startswith('line 2:')
    assert problems[1].startswith('line 3:') and 'duplicate' in problems[1]
    assert problems[2].startswith('line 4:')


def test_save_refuses_duplicates(tmp_path):
    record = LinkRecord(name='a', components=1, mu=1, colouring=(1,))
    with pytest.raises(CatalogValidationError):
        CatalogDAL.save_records([record, record], str(tmp_path / 'c.jsonl'))
    assert not (tmp_path / 'c.jsonl').exists()


def test_generated_records_can_be_stored(catalog_copy):
    """A pretzel record survives a save and reload."""
    record = pretzel_record(PretzelParams.parse('P(2,-2,2)'))
    CatalogDAL.save_records(CatalogDAL.load_records(catalog_copy) + [record], catalog_copy)
    stored = CatalogDAL.get_record_by_name('P(2,-2,2)', catalog_copy)
    assert stored.pd == record.pd
    assert stored.seifert == record.seifert
    assert stored.orientation_tag == 'folding'


def test_init_catalog_creates_an_empty_file(tmp_path):
    path = init_catalog(str(tmp_path / 'data' / 'catalog.jsonl'))
    assert CatalogDAL.load_records(path) == []
    assert init_catalog(path) == path
