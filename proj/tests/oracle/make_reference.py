#!/usr/bin/env python3
"""Generate frozen reference values for the statistics test suite.

Expected values are computed here with textbook formulas written out
explicitly (means, squared deviations, Welch-Satterthwaite df) plus
scipy's Student-t survival function as the tail-probability reference.
The output is a C++ include consumed by test_stats.cpp and committed to
the repo, so the tests never depend on Python at build time.

Usage: python3 make_reference.py > ../reference_stats.inc
"""

import math
import random

from scipy.stats import t as student_t

rng = random.Random(20240817)


def fmt(v):
    if isinstance(v, float):
        return repr(float(v))
    return repr(v)


def vec(xs):
    return "{" + ", ".join(fmt(float(x)) for x in xs) + "}"


def pearson_r(x, y):
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    return sxy / math.sqrt(sxx * syy)


def pearson_p(r, n):
    if abs(r) >= 1.0:
        return 0.0
    tstat = r * math.sqrt((n - 2) / (1.0 - r * r))
    return min(1.0, 2.0 * float(student_t.sf(abs(tstat), n - 2)))


def welch(x, y):
    nx, ny = len(x), len(y)
    mx = sum(x) / nx
    my = sum(y) / ny
    vx = sum((a - mx) ** 2 for a in x) / (nx - 1)
    vy = sum((b - my) ** 2 for b in y) / (ny - 1)
    se2 = vx / nx + vy / ny
    tstat = (mx - my) / math.sqrt(se2)
    df = se2 * se2 / ((vx / nx) ** 2 / (nx - 1) + (vy / ny) ** 2 / (ny - 1))
    p = min(1.0, 2.0 * float(student_t.sf(abs(tstat), df)))
    return tstat, df, p


def sample_vector(n):
    kind = rng.randrange(4)
    if kind == 0:
        return [rng.uniform(-10.0, 10.0) for _ in range(n)]
    if kind == 1:
        return [rng.gauss(rng.uniform(-5, 5), rng.uniform(0.2, 4.0)) for _ in range(n)]
    if kind == 2:
        return [float(rng.randrange(-20, 21)) + rng.random() * 1e-3 for _ in range(n)]
    base = rng.uniform(-100, 100)
    return [base + rng.gauss(0.0, rng.uniform(0.5, 20.0)) for _ in range(n)]


def emit_pearson_r_cases(out):
    out.append("static const PearsonRCase kPearsonRCases[] = {")
    spec_x = [1.0, 2.0, 3.0, 4.0, 5.0]
    spec_y = [2.0, 1.0, 4.0, 3.0, 6.0]
    out.append("    {%s, %s, %s}," % (vec(spec_x), vec(spec_y), fmt(pearson_r(spec_x, spec_y))))
    made = 1
    while made < 120:
        n = rng.randrange(3, 25)
        x = sample_vector(n)
        y = sample_vector(n)
        if len(set(x)) < 2 or len(set(y)) < 2:
            continue
        out.append("    {%s, %s, %s}," % (vec(x), vec(y), fmt(pearson_r(x, y))))
        made += 1
    out.append("};")
    out.append("")


def emit_pearson_p_cases(out):
    out.append("static const PearsonPCase kPearsonPCases[] = {")
    grid_r = [0.0, 0.05, -0.1, 0.2, -0.3, 0.4, -0.5, 0.6, -0.7, 0.8, -0.9, 0.95, -0.99, 0.999]
    grid_n = [3, 4, 5, 8, 20, 100, 1000]
    count = 0
    for r in grid_r:
        n = grid_n[count % len(grid_n)]
        out.append("    {%s, %d, %s}," % (fmt(float(r)), n, fmt(pearson_p(r, n))))
        count += 1
    while count < 120:
        r = rng.uniform(-0.9999, 0.9999)
        n = rng.randrange(3, 5000)
        out.append("    {%s, %d, %s}," % (fmt(r), n, fmt(pearson_p(r, n))))
        count += 1
    out.append("};")
    out.append("")


def emit_t_sf_cases(out):
    out.append("static const TSfCase kTSfCases[] = {")
    grid_t = [-40.0, -8.0, -3.0, -1.0, -0.5, -0.1, 0.0, 0.1, 0.5, 1.0, 3.0, 8.0, 40.0]
    grid_df = [1.0, 2.0, 3.4, 5.0, 12.3, 30.0, 100.0, 1000.0, 10000.0]
    for df in grid_df:
        for tv in grid_t:
            out.append("    {%s, %s, %s}," % (fmt(tv), fmt(df), fmt(float(student_t.sf(tv, df)))))
    for _ in range(100):
        tv = rng.uniform(-30.0, 30.0)
        df = math.exp(rng.uniform(0.0, math.log(1.0e4)))
        out.append("    {%s, %s, %s}," % (fmt(tv), fmt(df), fmt(float(student_t.sf(tv, df)))))
    out.append("};")
    out.append("")


def emit_welch_cases(out):
    out.append("static const WelchCase kWelchCases[] = {")
    spec_x = [10.0, 11.0, 12.0]
    spec_y = [0.0, 1.0, 2.0]
    tstat, df, p = welch(spec_x, spec_y)
    out.append("    {%s, %s, %s, %s, %s}," % (vec(spec_x), vec(spec_y), fmt(tstat), fmt(df), fmt(p)))
    made = 1
    while made < 120:
        nx = rng.randrange(2, 31)
        ny = rng.randrange(2, 31)
        x = sample_vector(nx)
        y = sample_vector(ny)
        if len(set(x)) < 2 and len(set(y)) < 2:
            continue
        tstat, df, p = welch(x, y)
        out.append("    {%s, %s, %s, %s, %s}," % (vec(x), vec(y), fmt(tstat), fmt(df), fmt(p)))
        made += 1
    out.append("};")
    out.append("")


def main():
    out = [
        "// Reference values for the statistics suite.",
        "// Generated by tests/oracle/make_reference.py; do not edit by hand.",
        "// clang-format off",
        "",
    ]
    emit_pearson_r_cases(out)
    emit_pearson_p_cases(out)
    emit_t_sf_cases(out)
    emit_welch_cases(out)
    out.append("// clang-format on")
    print("\n".join(out))


if __name__ == "__main__":
    main()
