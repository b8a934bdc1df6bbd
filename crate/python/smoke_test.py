"""Build the extension module, import it and exercise each binding.

    python3 python/smoke_test.py
"""

import importlib.util
import pathlib
import shutil
import subprocess
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def build():
    subprocess.run(
        ["cargo", "build", "--release", "-p", "subfn-py", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    for name in ("libsubfn.so", "libsubfn.dylib", "subfn.dll"):
        lib = ROOT / "target" / "release" / name
        if lib.exists():
            return lib
    sys.exit("built library not found")


def load(lib):
    dest = pathlib.Path(tempfile.mkdtemp()) / ("subfn.pyd" if lib.suffix == ".dll" else "subfn.so")
    shutil.copy(lib, dest)
    spec = importlib.util.spec_from_file_location("subfn", dest)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def main():
    subfn = load(build())

    # Singletons 1, pairs 2, full set 2: subadditive and monotone.
    f = subfn.SetFunction(3, [0, 1, 1, 2, 1, 2, 2, 2])
    assert f.n == 3 and len(f) == 8 and f[0b011] == 2.0
    assert subfn.check_class(f, "sam") and f.is_member("xos")
    assert subfn.SetFunction.from_json(f.to_json()).values == f.values

    lower, upper = subfn.bounds(f, cls="sam")
    assert all(lo <= v <= up for lo, v, up in zip(lower, f.values, upper))
    assert upper[0b011] == 2.0 and lower[0b011] == 1.0

    d = subfn.divergence(f, cls="s", norm="l1")
    assert d > 0
    assert subfn.divergence(f, known=list(range(8))) == 0.0
    assert subfn.sam_upper(f, max_steps=10) == upper

    g, scale, shift = subfn.normalize(f)
    assert g[0b001] == 0.0 and abs(g[0b111]) == 1.0 and scale > 0 and len(shift) == 3

    h = subfn.sample("coverage", 4, seed=3, index=1)
    assert h.n == 4 and h.is_member("sam")

    queries, steps = subfn.plan("offline_greedy", 3, dist="kbudget", n=4, kappa=20)
    assert len(queries) == 3 and len(steps) == 4
    assert all(b <= a + 1e-12 for a, b in zip(steps, steps[1:]))
    queries, steps = subfn.plan("oracle_greedy", 2, f=f, cls="sam")
    assert len(queries) == 2

    alpha, witness = subfn.alpha_ratio(subfn.SetFunction(3, lower), subfn.SetFunction(3, upper))
    assert alpha >= 1.0 and 0 < witness < 8

    try:
        subfn.SetFunction(2, [0, 1, 1])
    except ValueError:
        pass
    else:
        raise AssertionError("length mismatch accepted")

    print("smoke test ok: divergence %.3f, alpha %.3f at %d" % (d, alpha, witness))


if __name__ == "__main__":
    main()
