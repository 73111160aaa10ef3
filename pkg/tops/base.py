# -*- coding: utf-8 -*-
# tops - Trees of predictors: ensemble learning over recursive partitions.
# Copyright (C) 2024  The tops developers
#
# This program is free software: you can redistribute it and/or modify it
# under the terms of the GNU General Public License as published by the Free
# Software Foundation, either version 3 of the License, or (at your option)
# any later version.
#
# This program is distributed in the hope that it will be useful, but WITHOUT
# ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or
# FITNESS FOR A PARTICULAR PURPOSE.  See the GNU General Public License for
# more details.
#
# You should have received a copy of the GNU General Public License along with
# this program.  If not, see <http://www.gnu.org/licenses/>.


from __future__ import unicode_literals, print_function, division
import io
import csv
import json
import logging
import collections

import yaml
from prettytable import PrettyTable

from tops.utils import to_builtin


logger = logging.getLogger(__name__)


class Report(collections.OrderedDict):
    """An ordered collection of named report sections.

    A section is either a mapping (rendered as a two-column table) or a list
    of row mappings (rendered as one table, one row per entry).
    """

    def as_dict(self):
        """Return a plain-dict representation, in section order."""
        d = {}
        for key, value in self.items():
            d[key] = to_builtin(value)
        return d

    def as_json(self):
        """Return a JSON representation of this Report."""
        return json.dumps(self.as_dict(), indent=2)

    def as_yaml(self):
        return yaml.safe_dump(self.as_dict(), sort_keys=False,
                              default_flow_style=False, allow_unicode=True)

    @staticmethod
    def _cell(value):
        if isinstance(value, float):
            return '%.6g' % value
        if value is None:
            return '-'
        if isinstance(value, (list, tuple)):
            return ', '.join(str(Report._cell(v)) for v in value)
        return value

    def as_table(self):
        """Return a string representation that uses tables to facilitate
        reading.
        """
        parts = []
        for section, value in self.items():
            if isinstance(value, dict):
                table = PrettyTable(['Field', 'Value'])
                table.align['Field'] = 'r'
                table.align['Value'] = 'r'
                for k, v in value.items():
                    table.add_row([k, self._cell(v)])
            else:
                columns = self.columns(section)
                if not columns:
                    continue
                table = PrettyTable(columns)
                for column in columns:
                    table.align[column] = 'r'
                for row in value:
                    table.add_row([self._cell(row.get(c)) for c in columns])
            table.padding_width = 1
            parts.append(section.upper())
            parts.append(table.get_string())
            parts.append('')

        return '\n'.join(parts)

    def columns(self, section):
        """Column names of a row-list section, in first-seen order."""
        columns = []
        for row in self[section]:
            for key in row:
                if key not in columns:
                    columns.append(key)
        return columns

    def as_csv(self, section):
        """Return a row-list section as CSV text."""
        out = io.StringIO()
        columns = self.columns(section)
        writer = csv.DictWriter(out, fieldnames=columns, lineterminator='\n')
        writer.writeheader()
        for row in self[section]:
            writer.writerow(to_builtin(row))
        return out.getvalue()

    def save(self, path):
        """Write the report; the format follows the file extension
        (.yaml/.yml, .json or anything else for the text tables)."""
        if path.endswith(('.yaml', '.yml')):
            content = self.as_yaml()
        elif path.endswith('.json'):
            content = self.as_json()
        else:
            content = self.as_table()
        with io.open(path, 'w', encoding='utf-8') as outfile:
            outfile.write(content)
        logger.info('Wrote report %s.', path)
