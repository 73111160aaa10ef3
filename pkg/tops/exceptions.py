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


class ToPsError(Exception):
    """Base class of every error raised by tops."""


class ConfigError(ToPsError, ValueError):
    """A configuration value or document is invalid.

    :line: 1-based line of the offending entry in the configuration
        document, when known.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = 'line %d: %s' % (line, message)
        super(ConfigError, self).__init__(message)
        self.line = line


class DataError(ToPsError, ValueError):
    """Input data cannot be used (missing values, bad schema, ...)."""


class SchemaMismatchError(DataError):
    pass


class LossUndefinedError(ToPsError, ValueError):
    """The loss has no value on the given sample (e.g. AUC on a single
    class)."""


class TrainingError(ToPsError, RuntimeError):
    pass


class InsufficientDataError(TrainingError):
    pass


class FitFailedError(TrainingError):
    pass


class ModelFormatError(DataError):
    """A model file violates the model document schema."""


class ChecksumError(ModelFormatError):
    pass


class ModelVersionError(ModelFormatError):

    def __init__(self, found, supported):
        super(ModelVersionError, self).__init__(
            'model format version %r is not supported (this library reads '
            'version %r)' % (found, supported))
        self.found = found
        self.supported = supported


class UnknownNodeError(ToPsError, KeyError):

    def __str__(self):
        return str(self.args[0]) if self.args else ''
