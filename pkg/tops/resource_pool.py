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
import logging
import threading
import collections
from functools import partial

from tops.utils import is_valid_id, derive_seed
from tops.exceptions import TrainingError
from tops.dataset import restrict
from tops import learners


logger = logging.getLogger(__name__)


class ResourcePool(object):
    """A resource pool is a repository of methods for producing resources
    that are expensive to build, such as trained predictors. It caches what
    its hooks return and can be shared among threads.
    """

    def __init__(self, cache_limit=4096):
        """Form a new resource pool.

        Optional arguments:
        :cache_limit: maximum number of unpinned items in the cache.
        """

        if cache_limit < 0:
            raise ValueError('Invalid cache limit %d. Must be >= 0.'
                             % cache_limit)

        # The resource hooks, in the form {<suffix> : <hook>}.
        self._hooks = {}

        # Resources already asked for, keyed by (<suffix>, <args>).
        self._unpinned_cache = collections.OrderedDict()
        self._pinned_cache = {}

        self._pinned = set()
        self._cache_limit = cache_limit
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def register(self, suffix, hook, pinned=False):
        """Register a new resource.

        Required arguments:
        :suffix: A string identifying the resource type.
        :hook: The method that, when called, generates the resource data.

        Optional arguments:
        :pinned: True if the resource should never leave the cache.

        :returns: None.
        """

        if suffix in self._hooks:
            logger.warning("Resource \"%s\" already registered.", suffix)

        if pinned:
            self._pinned.add(suffix)

        self._hooks[suffix] = hook
        if is_valid_id(suffix):
            setattr(self, suffix, partial(self.get, suffix))

    def get(self, suffix, *args):
        """Get a resource.

        Required arguments:
        :suffix: The type of the resource to be extracted.
        :args: (Optional) arguments to be passed to the resource's hook.
            They must be hashable.

        :returns: The resource data (as returned by the resource's hook.)
        """

        if suffix not in self._hooks:
            raise ValueError('Resource \"{0}\" not registered.'.format(suffix))

        key = (suffix, args)
        pinned = suffix in self._pinned
        cache = self._pinned_cache if pinned else self._unpinned_cache
        with self._lock:
            if key in cache:
                self.hits += 1
                return cache[key]
            self.misses += 1

        # Hooks run outside the lock. Two threads may build the same
        # resource; hooks are deterministic, so either value can be kept.
        value = self._hooks[suffix](*args)

        with self._lock:
            value = cache.setdefault(key, value)
            if not pinned:
                while len(self._unpinned_cache) > self._cache_limit:
                    self._unpinned_cache.popitem(last=False)
        return value


class TrainingPool(ResourcePool):
    """Caches the predictors trained while growing a tree.

    A predictor is identified by its algorithm and the cell whose training
    rows (S restricted to the cell) it was fit on. Failures are cached as
    None, so an infeasible pair is attempted once.
    """

    def __init__(self, data, s_idx, seed=0, min_samples=None,
                 cache_limit=4096):
        super(TrainingPool, self).__init__(cache_limit=cache_limit)
        self.data = data
        self.s_idx = s_idx
        self.seed = seed
        self.min_samples = min_samples
        self._specs = {}

        self.register('rows', self._rows)
        self.register('predictor', self._predictor)

    def _rows(self, cell):
        return restrict(self.s_idx, self.data, cell)

    def _predictor(self, spec_id, cell):
        spec = self._specs[spec_id]
        rows = self.get('rows', cell)
        try:
            return learners.train(spec, self.data.features[rows],
                                  self.data.labels[rows],
                                  seed=derive_seed(self.seed, spec.id,
                                                   cell.key),
                                  min_samples=self.min_samples)
        except TrainingError as e:
            logger.debug('Cannot train %s on %r: %s', spec.id, cell, e)
            return None

    def fit(self, spec, cell):
        """Return the predictor of spec trained on S(cell), or None when it
        cannot be trained."""
        self._specs.setdefault(spec.id, spec)
        return self.get('predictor', spec.id, cell)
