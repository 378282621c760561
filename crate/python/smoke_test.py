"""Smoke test for the Python bindings.

Build first:
    cargo build --release -p mlrelax-py --features extension-module
then run:
    python3 python/smoke_test.py [path/to/libmlrelax_py.so]
"""

import importlib.machinery
import importlib.util
import math
import pathlib
import sys


def load(path):
    loader = importlib.machinery.ExtensionFileLoader("mlrelax", str(path))
    spec = importlib.util.spec_from_loader("mlrelax", loader)
    module = importlib.util.module_from_spec(spec)
    loader.exec_module(module)
    return module


def close(a, b, rel):
    return abs(a - b) <= rel * max(abs(a), abs(b))


def main():
    root = pathlib.Path(__file__).resolve().parent.parent
    default = root / "target" / "release" / "libmlrelax_py.so"
    m = load(pathlib.Path(sys.argv[1]) if len(sys.argv) > 1 else default)

    assert m.ml(1.0, 1.0) == math.e
    assert close(m.ml(0.75, -1.0), 0.39310830281575406177, 1e-13)
    assert close(m.ml(0.5, -30.0), 0.018795888861416751497, 1e-9)
    assert close(m.prabhakar(0.5, -1.0, 2.0, mu=0.5), 0.062738277955091463547, 1e-12)
    assert close(m.ml_poly(1.0, 0.0, 5, 1.7), 0.38336608333333327577, 1e-13)

    smirnov = math.exp(-0.25) / (2.0 * math.sqrt(math.pi))
    assert close(m.levy_density(0.5, 1.0, 1.0), smirnov, 1e-10)
    assert close(m.levy_primitive(0.5, 1.0, 1.0), math.erfc(0.5), 1e-10)
    value, route = m.h_function(0.5, 1.0, 1.0)
    assert route == "series" and close(value, smirnov, 1e-10)

    f = m.solve([0.0, 1.0, 5.0], 0.75, 1.0, method="closed")
    g = m.solve([0.0, 1.0, 5.0], 0.75, 1.0, method="laplace")
    assert f[0] == 1.0 and all(close(x, y, 1e-8) for x, y in zip(f[1:], g[1:]))

    omega, phi = m.spectral(0.5, omega=[1.0])
    assert omega == [1.0] and isinstance(phi[0], complex)
    mexp, one_minus_n = m.jonscher(0.5, mu=0.7)
    assert abs(mexp - 0.7) < 0.02 and abs(one_minus_n - 0.7) < 0.02

    rows = m.fig1()
    assert len(rows) == 201 and rows[0][1:] == [1.0] * 5

    try:
        m.ml(-1.0, 1.0)
    except m.ParameterError as e:
        assert isinstance(e, ValueError) and str(e).startswith("InvalidParam")
    else:
        raise AssertionError("negative alpha accepted")
    try:
        m.ml(0.5, -60.0, route="series")
    except m.NumericalError as e:
        assert str(e).startswith("NonConvergent")
    else:
        raise AssertionError("overflowing series accepted")

    results = m.run_verify()
    failed = [r for r in results if not r[2]]
    for r in results:
        print(f"{'PASS' if r[2] else 'FAIL'} {r[0]}. {r[1]}")
    assert not failed, failed
    print("python smoke test ok")


if __name__ == "__main__":
    main()
