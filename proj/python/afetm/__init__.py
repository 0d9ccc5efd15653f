# Copyright 2026 The AFETM Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Adaptive function tracing and GCN-based fault diagnosis.

Trees, events, instances and selections use the JSON shapes of the
command-line tool; here they are plain dicts and lists.
"""

import json

from . import _afetm
from ._afetm import Error, ParseError, ProgramModel, ValidationError

__all__ = [
    "Error",
    "ParseError",
    "ProgramModel",
    "ValidationError",
    "build_afct",
    "color",
    "evaluate",
    "execute",
    "gaussian_influence",
    "load_program",
    "random_program",
    "run_cli",
    "select",
    "tree_edit_distance",
]

load_program = _afetm.load_program
random_program = _afetm.random_program
gaussian_influence = _afetm.gaussian_influence


def select(instance=None, *, model=None, workload=None, p=None, params=None,
           oracle=False, sampling_seconds=10.0, sampling_seed=0):
    """Chooses trace points.

    Pass either a coverage instance dict, or a ProgramModel with a workload id
    and budget fraction p. Returns the selection as a dict.
    """
    params_text = json.dumps(params or {})
    if instance is not None:
        return json.loads(_afetm.select_instance(json.dumps(instance), params_text, oracle))
    if model is None or workload is None or p is None:
        raise ValueError("select needs an instance, or model, workload and p")
    return json.loads(_afetm.select_model(model, workload, p, sampling_seconds,
                                          params_text, sampling_seed))


def execute(model, request, seed):
    """Runs one fault-free request; returns its FCT, trace events and cost."""
    out = json.loads(_afetm.execute(model, request, seed))
    out["events"] = [json.loads(line) for line in out["events"].splitlines() if line]
    return out


def color(fcts, traced):
    """Colors a list of FCTs for a traced set; returns colored trees and callstack."""
    return json.loads(_afetm.color(json.dumps(fcts), sorted(traced)))


def build_afct(events):
    """Builds the approximate call tree from a list of trace event dicts."""
    text = "".join(json.dumps(e) + "\n" for e in events)
    return json.loads(_afetm.build_afct(text))


def tree_edit_distance(a, b):
    """Unit-cost ordered tree edit distance between two tree dicts."""
    return _afetm.tree_edit_distance(json.dumps(a), json.dumps(b))


def evaluate(config, out_dir):
    """Runs the full experiment described by a config file into out_dir."""
    _afetm.evaluate(str(config), str(out_dir))


def run_cli(*args):
    """Invokes the command-line tool in-process; returns (code, stdout, stderr)."""
    return _afetm.run_cli([str(a) for a in args])
