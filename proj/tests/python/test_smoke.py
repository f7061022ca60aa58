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

import json
import os
import pathlib
import unittest

import schemapar

CORPUS = pathlib.Path(os.environ.get("SCHEMAPAR_CORPUS", pathlib.Path(__file__).parents[2] / "corpus"))


def corpus(name):
    return (CORPUS / name).read_text()


class SmokeTest(unittest.TestCase):
    def test_round_trip(self):
        text = schemapar.normalize_text(corpus("pointer_chain.sch"))
        self.assertEqual(schemapar.normalize_text(text), text)

    def test_check_reports_recursion(self):
        report = schemapar.check(corpus("recursion.sch"))
        self.assertFalse(report["ok"])
        self.assertIn("recursive procedure A", report["loop_structure"])

    def test_separate_list_traversal(self):
        report = schemapar.separate(corpus("list_traversal.sch"), "L")
        self.assertEqual(report["controller_count"], 2)
        self.assertTrue(report["level_conditions"])
        self.assertIn("vLeb2", report["schema"])

    def test_separate_without_indexes(self):
        with self.assertRaises(schemapar.SchemaError) as ctx:
            schemapar.separate(corpus("plain_loop.sch"), "L")
        self.assertIn("separation requires indexed variables", str(ctx.exception))

    def test_forward_orient(self):
        self.assertIn("x[newE_1]", schemapar.forward_orient(corpus("index_rewrite.sch")))

    def test_equations(self):
        eqs = schemapar.equations(corpus("linear_mix.sch"))
        self.assertEqual(eqs[0]["class"], "linear")
        self.assertEqual(eqs[0]["pairs"], [])

    def test_wavefronts(self):
        fronts = schemapar.wavefronts(corpus("stencil4_pred.sch"), {"N": 3})
        self.assertEqual(fronts[0], [[1, 1, 1]])
        self.assertEqual(sum(len(f) for f in fronts), 27)
        self.assertEqual(schemapar.find_normal([[0, 0, 1], [0, 1, 0], [1, -1, 0], [1, 0, -1]]), [2, 1, 1])

    def test_cli(self):
        status, out, err = schemapar.run_cli(
            ["--format", "json", "schedule", str(CORPUS / "stencil4_pred.sch"), "--param", "N=2"])
        self.assertEqual(status, 0, err)
        self.assertEqual(json.loads(out)["front_count"], 5)
        self.assertEqual(schemapar.run_cli(["check", str(CORPUS / "missing.sch")])[0], 2)


if __name__ == "__main__":
    unittest.main()
