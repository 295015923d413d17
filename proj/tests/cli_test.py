"""End-to-end checks of the chevrep executable and its shared library.

usage: cli_test.py <path-to-chevrep> <schemas-dir>
"""

import ctypes
import json
import os
import pathlib
import subprocess
import sys
import tempfile
import unittest

import jsonschema
from referencing import Registry, Resource

CLI = pathlib.Path(sys.argv[1]).resolve() if len(sys.argv) > 1 else None
SCHEMAS = pathlib.Path(sys.argv[2]).resolve() if len(sys.argv) > 2 else None


def load_schema(name):
    return json.loads((SCHEMAS / name).read_text())


def validator(name):
    registry = Registry()
    for f in ("config.schema.json", "report.schema.json"):
        s = load_schema(f)
        registry = registry.with_resource(f, Resource.from_contents(s))
        registry = registry.with_resource(s["$id"], Resource.from_contents(s))
    schema = load_schema(name)
    cls = jsonschema.validators.validator_for(schema)
    return cls(schema, registry=registry)


def run(*args, check_rc=0):
    proc = subprocess.run([str(CLI), *args], capture_output=True, text=True, timeout=600)
    if check_rc is not None and proc.returncode != check_rc:
        raise AssertionError(f"{args}: rc={proc.returncode}\nstdout:{proc.stdout[-2000:]}\nstderr:{proc.stderr}")
    return proc


class Cli(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.report = validator("report.schema.json")
        cls.config = validator("config.schema.json")

    def valid(self, text):
        doc = json.loads(text)
        self.report.validate(doc)
        self.config.validate(doc["config"])
        return doc

    def test_table_jacobi(self):
        doc = self.valid(run("table", "--type", "C", "--rank", "2", "--p", "7", "--check", "jacobi").stdout)
        self.assertTrue(doc["payload"]["checks"]["jacobi"]["ok"])
        self.assertEqual(doc["payload"]["checks"]["jacobi"]["triples_checked"], 120)

    def test_verma_rank_one(self):
        doc = self.valid(run("verma", "--rank", "1", "--p", "7", "--chi-root", "-a", "--lambda", "all", "--chop").stdout)
        results = doc["payload"]["results"]
        self.assertEqual(len(results), 7)
        for r in results:
            self.assertEqual(r["factors"], [{"dim": 7, "endo_degree": 1, "multiplicity": 1}])
        table = run("verma", "--rank", "1", "--chi-root", "-a", "--chop", "--format", "table").stdout
        self.assertEqual(sum(1 for line in table.splitlines() if line.startswith("(")), 7)

    def test_verma_restricted(self):
        doc = self.valid(run("verma", "--chi-root", "0", "--chop", "--lambda", "2;6").stdout)
        dims = [sorted(f["dim"] for f in r["factors"]) for r in doc["payload"]["results"]]
        self.assertEqual(dims, [[3, 4], [7]])

    def test_paper_signsearch(self):
        doc = self.valid(run("paper", "--case", "short", "--rank", "3", "--p", "7", "--signsearch").stdout)
        s = doc["payload"]["signsearch"]
        self.assertTrue(s["all_reverified"])
        self.assertEqual(len(s["choices"]), 18)
        self.assertIsInstance(s["failing"], list)

    def test_u_calc(self):
        doc = self.valid(run("u-calc", "e*f - f*e").stdout)
        self.assertEqual(doc["payload"]["normal_form"], "h")
        doc = self.valid(run("u-calc", "--chi-root", "-a", "f^7 + e^7").stdout)
        self.assertEqual(doc["payload"]["normal_form"], "1")

    def test_dry_run_every_subcommand(self):
        with tempfile.TemporaryDirectory() as d:
            mod = os.path.join(d, "m.json")
            cases = [
                ["table"],
                ["u-calc", "e"],
                ["verma", "--rank", "3"],
                ["chop", mod],
                ["paper", "--dimensions", "--independence"],
                ["probe"],
            ]
            for args in cases:
                doc = self.valid(run(*args, "--dry-run").stdout)
                self.assertTrue(doc["dry_run"])
                self.assertNotIn("payload", doc)
                self.assertGreater(len(doc["plan"]), 0)

    def test_exit_codes(self):
        self.assertEqual(run("table", "--p", "8", check_rc=None).returncode, 2)
        self.assertEqual(run("table", "--bogus", check_rc=None).returncode, 2)
        self.assertEqual(run("verma", "--chi-root", "e9", check_rc=None).returncode, 2)
        self.assertEqual(run("verma", "--rank", "3", "--lambda", "0,0,0", check_rc=None).returncode, 3)
        self.assertEqual(run("chop", "/nonexistent/m.chvr", check_rc=None).returncode, 1)
        with tempfile.TemporaryDirectory() as d:
            cfg = os.path.join(d, "c.json")
            pathlib.Path(cfg).write_text(json.dumps({"command": "table", "colour": "red"}))
            self.assertEqual(run("table", "--config", cfg, check_rc=None).returncode, 2)
            pathlib.Path(cfg).write_text(json.dumps({"command": "probe"}))
            self.assertEqual(run("table", "--config", cfg, check_rc=None).returncode, 2)

    def test_config_file_and_output(self):
        with tempfile.TemporaryDirectory() as d:
            cfg = os.path.join(d, "c.json")
            out = os.path.join(d, "out.json")
            config = {"command": "verma", "rank": 1, "p": 5, "chi_root": "a", "lambda": [[1]], "chop": True}
            self.config.validate(config)
            pathlib.Path(cfg).write_text(json.dumps(config))
            proc = run("verma", "--config", cfg, "--output", out, "--seed", "9")
            self.assertEqual(proc.stdout, "")
            doc = self.valid(pathlib.Path(out).read_text())
            self.assertEqual(doc["seed"], 9)
            self.assertEqual(doc["config"]["p"], 5)
            self.assertEqual(doc["config"]["chi_root"], "a")

    def test_save_and_chop(self):
        with tempfile.TemporaryDirectory() as d:
            prefix = os.path.join(d, "z")
            self.valid(run("verma", "--rank", "2", "--p", "5", "--chi-root", "e1-e2", "--lambda", "0,0",
                           "--save", prefix).stdout)
            doc = self.valid(run("chop", prefix + "-0.chvr").stdout)
            self.assertEqual(doc["payload"]["dim"], 625)
            self.assertTrue(doc["payload"]["certificates_replayed"])
            self.assertEqual(sum(f["dim"] * f["multiplicity"] for f in doc["payload"]["factors"]), 625)

    def test_determinism(self):
        args = ["paper", "--case", "short", "--rank", "2", "--p", "7", "--signsearch", "--bfamily", "--independence"]
        a = run(*args).stdout
        self.assertEqual(a, run(*args).stdout)
        b = json.loads(run(*args, "--seed", "12345").stdout)
        self.assertEqual(json.loads(a)["payload"], b["payload"])

    def test_timing_is_opt_in(self):
        self.assertNotIn("timing", json.loads(run("verma", "--lambda", "0").stdout)["run"])
        self.assertIn("timing", self.valid(run("verma", "--lambda", "0", "--timing").stdout)["run"])

    def test_shared_library(self):
        lib = ctypes.CDLL(str(CLI.parent / "libchevrep.so"))
        lib.chevrep_run_json.argtypes = [ctypes.c_char_p, ctypes.POINTER(ctypes.c_void_p)]
        lib.chevrep_run_json.restype = ctypes.c_int
        lib.chevrep_string_free.argtypes = [ctypes.c_void_p]
        lib.chevrep_last_error.restype = ctypes.c_char_p
        out = ctypes.c_void_p()
        rc = lib.chevrep_run_json(json.dumps({"command": "table", "rank": 1}).encode(), ctypes.byref(out))
        self.assertEqual(rc, 0)
        doc = self.valid(ctypes.string_at(out).decode())
        lib.chevrep_string_free(out)
        self.assertEqual(doc["payload"]["dim"], 3)
        rc = lib.chevrep_run_json(b'{"command": "table", "p": 4}', ctypes.byref(out))
        self.assertEqual(rc, 2)
        self.assertIn(b"prime", lib.chevrep_last_error())


if __name__ == "__main__":
    unittest.main(argv=[sys.argv[0], "-v"])
