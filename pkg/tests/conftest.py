import json
import pathlib

import numpy as np
import pytest

SCHEMA_DIR = pathlib.Path(__file__).resolve().parents[1] / "docs" / "schemas"


def load_schema(name):
    return json.loads((SCHEMA_DIR / f"{name}.schema.json").read_text())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def write_csv(path, rows, header=None):
    lines = [",".join(header)] if header else []
    lines += [",".join(repr(float(x)) for x in np.atleast_1d(r)) for r in rows]
    path.write_text("\n".join(lines) + "\n")
    return path


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
