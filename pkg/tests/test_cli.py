import contextlib
import io
import json
import os
import tempfile
import unittest

import numpy as np

from cli.commands import cmd_analyze, cmd_basin, cmd_enumerate, cmd_trace
from cli.problem_file import parse_problem
from cli.report import Report
from infrastructure.config_manager import init_config
from infrastructure.error_handling import UnsupportedSizeError
from infrastructure.logger import init_logger
from infrastructure.validation import NonnegativityError, ValidationError
from main import main

CASE_I = {"circuit": {"E": 24.0, "r": [0.04, 0.06], "P": [500.0, 450.0]}}
CASE_II = {"circuit": {"E": 24.0, "r": [0.04, 0.06], "P": [3000.0, 1000.0]}}
NO_ROOTS = {"k": [1.0, 1.0], "M": [[1.0, 0.0], [0.0, 1.0]]}
DIAGONAL = {"k": [3.0, 4.0], "M": [[1.0, 0.0], [0.0, 2.0]]}


class CliTestCase(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def write(self, name, document):
        path = os.path.join(self.tmp.name, name)
        with open(path, "w", encoding="utf-8") as f:
            if isinstance(document, str):
                f.write(document)
            else:
                json.dump(document, f)
        return path


class TestProblemFile(unittest.TestCase):

    def test_direct_form(self):
        pf = parse_problem({"k": [1.0, 2.0], "M": [[0.0, 1.0], [1.0, 0.0]], "tol": 1e-8})
        self.assertEqual(pf.form, "direct")
        self.assertEqual(pf.tol, 1e-8)
        self.assertIsNone(pf.budget)

    def test_circuit_form(self):
        pf = parse_problem(CASE_I)
        self.assertEqual(pf.form, "circuit")
        np.testing.assert_allclose(pf.problem.M.entries, [[20.0, 18.0], [20.0, 45.0]])

    def test_general_form(self):
        pf = parse_problem({"general": {"Mbar": [[1.0, 0.0], [0.0, 1.0]], "P": [2.0, 3.0], "k": [5.0, 5.0]}})
        self.assertEqual(pf.form, "general")
        np.testing.assert_array_equal(pf.problem.M.entries, [[2.0, 0.0], [0.0, 3.0]])

    def test_exactly_one_form(self):
        with self.assertRaises(ValidationError) as ctx:
            parse_problem({**CASE_I, **NO_ROOTS})
        self.assertEqual(ctx.exception.field, "problem")
        with self.assertRaises(ValidationError):
            parse_problem({"tol": 1e-8})

    def test_errors_name_the_field(self):
        cases = [
            ({"circuit": {"E": 24.0, "r": [0.04], "P": [1.0, 2.0]}}, "circuit.r"),
            ({"circuit": {"E": -1.0, "r": [0.04, 0.06], "P": [1.0, 2.0]}}, "circuit.E"),
            ({"k": [1.0, 2.0], "M": [[1.0, 0.0]]}, "M"),
            ({"k": [1.0, "x"], "M": [[1.0, 0.0], [0.0, 1.0]]}, "k[1]"),
            ({**NO_ROOTS, "budget": 0}, "budget"),
            ({**NO_ROOTS, "tol": -1.0}, "tol"),
            ({**NO_ROOTS, "extra": 1}, "problem.extra"),
        ]
        for document, field in cases:
            with self.subTest(field=field):
                with self.assertRaises(ValidationError) as ctx:
                    parse_problem(document)
                self.assertEqual(ctx.exception.field, field)

    def test_negative_matrix(self):
        with self.assertRaises(NonnegativityError):
            parse_problem({"k": [1.0, 2.0], "M": [[1.0, -2.0], [0.0, 1.0]]})


class TestAnalyze(CliTestCase):

    def test_case_one_report(self):
        out = io.StringIO()
        report = cmd_analyze(self.write("case1.json", CASE_I), out=out)

        self.assertEqual(report.bounds["delta"][0], 496.0)
        self.assertAlmostEqual(report.bounds["delta"][1], 396.0, delta=1e-9)
        self.assertEqual(report.verdict["outcome"], "Exists")
        np.testing.assert_allclose(report.dominant, [22.2416, 20.9531], atol=1e-3)
        self.assertLess(report.certificate["rho"], 1.0)
        self.assertEqual(report.certificate["classification"], "AsymptoticallyStable")

        reloaded = Report.from_json(out.getvalue())
        self.assertEqual(reloaded.to_dict(), report.to_dict())

    def test_reals_written_at_seventeen_digits(self):
        report = Report(
            problem={"k": [0.1, 24.0]}, tol=1e-10, budget=5, bounds={}, verdict={}
        )
        text = report.to_json()
        self.assertIn("0.10000000000000001", text)
        self.assertIn("24.0", text)
        self.assertIn("1.0000000000000000e-10", text)
        self.assertIn('"budget": 5', text)
        self.assertEqual(Report.from_json(text), report)

        with self.assertRaises(ValueError):
            Report(problem={}, tol=float("nan"), budget=5, bounds={}, verdict={}).to_json()

    def test_report_is_reproducible(self):
        path = self.write("case1.json", CASE_I)
        first = cmd_analyze(path, out=io.StringIO())
        second = cmd_analyze(path, out=io.StringIO())
        self.assertEqual(first.without_timing(), second.without_timing())

    def test_case_two_report(self):
        report = cmd_analyze(self.write("case2.json", CASE_II), out=io.StringIO())
        self.assertEqual(report.verdict["outcome"], "NotExists")
        self.assertEqual(report.verdict["witness_step"], 3)
        np.testing.assert_allclose(report.verdict["witness"], [8.76, 0.42], atol=0.01)
        self.assertIsNone(report.dominant)

    def test_necessary_conditions(self):
        report = cmd_analyze(self.write("none.json", NO_ROOTS), out=io.StringIO())
        self.assertEqual(report.verdict["outcome"], "NotExists")
        self.assertEqual(report.verdict["witness_step"], -1)
        self.assertFalse(report.bounds["necessary_ok"])

    def test_enumerate_flag(self):
        report = cmd_analyze(self.write("case1.json", CASE_I), enumerate_points=True, out=io.StringIO())
        self.assertEqual(len(report.fixed_points), 2)

    def test_flags_override_file(self):
        path = self.write("case1.json", {**CASE_I, "tol": 1e-6, "budget": 50})
        self.assertEqual(cmd_analyze(path, out=io.StringIO()).tol, 1e-6)
        report = cmd_analyze(path, tol=1e-9, budget=70, out=io.StringIO())
        self.assertEqual((report.tol, report.budget), (1e-9, 70))


class TestTrace(CliTestCase):

    def parse(self, text):
        lines = text.strip().split("\n")
        return [line.split(",") for line in lines[1:-1]], lines[-1]

    def test_case_one_is_decreasing(self):
        out = io.StringIO()
        cmd_trace(self.write("case1.json", CASE_I), out=out)
        self.assertTrue(out.getvalue().startswith("step,y1,y2,step_size,in_domain\n"))

        rows, status = self.parse(out.getvalue())
        self.assertTrue(status.startswith("# status=Converged"))
        values = np.array([[float(r[1]), float(r[2])] for r in rows])
        self.assertTrue(np.all(np.diff(values, axis=0) < 0))

    def test_case_two_third_row(self):
        out = io.StringIO()
        cmd_trace(self.write("case2.json", CASE_II), out=out)
        rows, status = self.parse(out.getvalue())
        self.assertEqual(rows[3][0], "3")
        np.testing.assert_allclose([float(rows[3][1]), float(rows[3][2])], [8.76, 0.42], atol=0.01)
        self.assertEqual(rows[-1][-1], "false")
        self.assertIn("status=DomainExit", status)

    def test_start_at_dominant(self):
        path = self.write("case1.json", CASE_I)
        dominant = cmd_analyze(path, out=io.StringIO()).dominant
        out = io.StringIO()
        cmd_trace(path, start=dominant, out=out)
        rows, _ = self.parse(out.getvalue())
        self.assertEqual(len(rows), 2)
        self.assertLess(float(rows[1][3]), 1e-10)

    def test_trace_is_bit_stable(self):
        path = self.write("case1.json", CASE_I)
        first, second = io.StringIO(), io.StringIO()
        cmd_trace(path, out=first)
        cmd_trace(path, out=second)
        self.assertEqual(first.getvalue(), second.getvalue())

    def test_start_must_be_positive(self):
        with self.assertRaises(ValidationError) as ctx:
            cmd_trace(self.write("case1.json", CASE_I), start=[1.0, -1.0], out=io.StringIO())
        self.assertEqual(ctx.exception.field, "start[1]")


class TestBasin(CliTestCase):

    def test_case_one_above_second_point(self):
        second = np.array([14.4515, 2.2047])
        rows = cmd_basin(
            self.write("case1.json", CASE_I), box=[0.9, 2.1, 23.1, 21.9], grid=32, out=io.StringIO()
        )
        self.assertEqual(len(rows), 32 * 32 + 1)
        self.assertEqual([int(r[0]) for r in rows[1:]], list(range(32 * 32)))
        for row in rows[1:]:
            start = np.array([float(row[1]), float(row[2])])
            if np.all(start > second + 1e-3):
                self.assertEqual(row[3], "ConvergesToDominant")

    def test_case_two_never_converges(self):
        rows = cmd_basin(self.write("case2.json", CASE_II), grid=8, out=io.StringIO())
        self.assertTrue(all(row[3] != "ConvergesToDominant" for row in rows[1:]))

    def test_corners_above_dominant(self):
        rows = cmd_basin(
            self.write("case1.json", CASE_I), box=[23.0, 21.5, 30.0, 30.0], grid=2, out=io.StringIO()
        )
        self.assertEqual(len(rows), 5)
        self.assertTrue(all(row[3] == "ConvergesToDominant" for row in rows[1:]))

    def test_requires_two_dimensions(self):
        path = self.write("n3.json", {"k": [1.0, 1.0, 1.0], "M": np.eye(3).tolist()})
        with self.assertRaises(UnsupportedSizeError):
            cmd_basin(path, out=io.StringIO())

    def test_box_corners_ordered(self):
        with self.assertRaises(ValidationError) as ctx:
            cmd_basin(self.write("case1.json", CASE_I), box=[5.0, 5.0, 1.0, 10.0], grid=2, out=io.StringIO())
        self.assertEqual(ctx.exception.field, "box")


class TestEnumerate(CliTestCase):

    def test_case_one(self):
        out = io.StringIO()
        fragment = cmd_enumerate(self.write("case1.json", CASE_I), out=out)
        self.assertEqual(len(fragment["fixed_points"]), 2)
        self.assertEqual([p["dominant"] for p in fragment["fixed_points"]], [True, False])
        self.assertEqual(fragment["comparability"][1][0], "lt")
        self.assertEqual(json.loads(out.getvalue()), fragment)

    def test_case_two(self):
        fragment = cmd_enumerate(self.write("case2.json", CASE_II), out=io.StringIO())
        self.assertEqual(fragment["fixed_points"], [])

    def test_diagonal(self):
        fragment = cmd_enumerate(self.write("diag.json", DIAGONAL), out=io.StringIO())
        self.assertEqual(len(fragment["fixed_points"]), 4)

    def test_unsupported_size(self):
        path = self.write("n4.json", {"k": [1.0] * 4, "M": np.zeros((4, 4)).tolist()})
        with self.assertRaises(UnsupportedSizeError):
            cmd_enumerate(path, out=io.StringIO())


class TestExitStatus(CliTestCase):

    def tearDown(self):
        init_config()
        super().tearDown()

    def run_main(self, argv):
        stdout, stderr = io.StringIO(), io.StringIO()
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            code = main(argv)
        return code, stdout.getvalue(), stderr.getvalue()

    def test_success(self):
        code, stdout, _ = self.run_main(["analyze", self.write("case2.json", CASE_II)])
        self.assertEqual(code, 0)
        self.assertEqual(json.loads(stdout)["verdict"]["outcome"], "NotExists")

    def test_input_error(self):
        path = self.write("bad.json", {"circuit": {"E": 24.0, "r": [0.04], "P": [1.0, 2.0]}})
        code, _, stderr = self.run_main(["analyze", path])
        self.assertEqual(code, 2)
        self.assertIn("circuit.r", stderr)

    def test_malformed_json(self):
        code, _, stderr = self.run_main(["analyze", self.write("bad.json", "{not json")])
        self.assertEqual(code, 2)
        self.assertIn("file", stderr)

    def test_budget_exhaustion(self):
        init_config({"SPECTRAL_BUDGET": "1"})
        code, _, _ = self.run_main(["analyze", self.write("case1.json", CASE_I)])
        self.assertEqual(code, 3)

    def test_output_file(self):
        target = os.path.join(self.tmp.name, "trace.csv")
        code, _, _ = self.run_main(["trace", self.write("case1.json", CASE_I), "--output", target])
        self.assertEqual(code, 0)
        with open(target, encoding="utf-8") as f:
            self.assertTrue(f.readline().startswith("step,"))

    def test_debug_log_carries_command_and_config(self):
        try:
            code, _, stderr = self.run_main(
                ["--log-level", "debug", "analyze", self.write("case1.json", CASE_I)]
            )
        finally:
            init_logger()
        self.assertEqual(code, 0)

        lines = [line for line in stderr.splitlines() if "Command started" in line]
        self.assertEqual(len(lines), 1)
        record = json.loads(lines[0][lines[0].index("{"):])
        self.assertEqual(record["context"], {"command": "analyze"})
        self.assertEqual(record["config"]["iteration"]["budget"], 10000)
        self.assertTrue(any("Command finished" in line for line in stderr.splitlines()))


if __name__ == "__main__":
    unittest.main()
