from __future__ import unicode_literals, print_function, division

from tops.base import Report


def test_table_with_integer_lists():
    report = Report()
    report['model'] = {'terminals': [3, 4, 6], 'seed': 0}
    report['weights'] = [{'terminal': 3, 'path': [0, 1, 3],
                          'weights': [0.25, 0.75]}]
    table = report.as_table()
    assert 'MODEL' in table and 'WEIGHTS' in table
    assert '3, 4, 6' in table
    assert '0, 1, 3' in table
    assert '0.25, 0.75' in table


def test_table_skips_empty_row_sections():
    report = Report()
    report['trajectory'] = []
    assert report.as_table() == ''
