"""Compare the compiled and pure-Python pixel kernels on rendered arena frames.

    python benchmarks/bench_kernels.py [--repeat N] [--size WxH]

Prints the median wall time per call for each backend and the speed-up.
"""
import argparse
import statistics
import time

import numpy as np

from robonav import kernels
from robonav.synthcam import NoiseConfig, overhead_camera, random_arena, render_arena


def frame(width, height, seed=0):
    spec = random_arena(seed, n_obstacles=6)
    cam = overhead_camera(spec, focal=800.0 * width / 640, width=width, height=height)
    img, _ = render_arena(spec, cam, NoiseConfig(color_sigma=8.0, seed=seed))
    return img.pixels


def timeit(fn, repeat):
    fn()  # warm-up
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--size", default="640x480")
    args = ap.parse_args()
    w, h = (int(x) for x in args.size.split("x"))
    pixels = frame(w, h)

    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled kernels not built; only the Python backend is available")
    results = {}
    for name in backends:
        impl = kernels.get_backend(name)
        labels = impl.classify_image(pixels, 40, 60)
        results[name] = (
            timeit(lambda: impl.classify_image(pixels, 40, 60), args.repeat),
            timeit(lambda: impl.component_stats(labels), args.repeat),
        )
    # both backends must agree before their timings mean anything
    if len(results) == 2:
        py, cy = (kernels.get_backend(n) for n in ("python", "cython"))
        assert np.array_equal(py.classify_image(pixels, 40, 60), cy.classify_image(pixels, 40, 60))

    print(f"frame {w}x{h}, median of {args.repeat} runs")
    print(f"{'backend':<8} {'classify ms':>12} {'components ms':>14}")
    for name, (tc, ts) in results.items():
        print(f"{name:<8} {tc * 1e3:>12.2f} {ts * 1e3:>14.2f}")
    if len(results) == 2:
        (pc, ps), (cc, cs) = results["python"], results["cython"]
        print(f"speed-up  {pc / cc:>11.1f}x {ps / cs:>13.1f}x")


if __name__ == "__main__":
    main()
