# Copyright 2026 The schemapar Authors
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
"""Program schema analysis: separation, dependences and wavefront schedules."""

import sys

from ._core import (
    SchemaError,
    check,
    equations,
    find_normal,
    forward_orient,
    normalize_text,
    run_cli,
    separate,
    wavefronts,
)

__all__ = [
    "SchemaError",
    "check",
    "equations",
    "find_normal",
    "forward_orient",
    "main",
    "normalize_text",
    "run_cli",
    "separate",
    "wavefronts",
]


def main(argv=None):
    status, out, err = run_cli(list(sys.argv[1:] if argv is None else argv))
    sys.stdout.write(out)
    sys.stderr.write(err)
    return status
