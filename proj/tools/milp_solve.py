#!/usr/bin/env python3
"""Solve an LP-format mixed integer program with scipy/HiGHS.

Usage: milp_solve.py MODEL.lp OUT.sol [TIME_LIMIT_SECONDS]

Writes OUT.sol as:
    status optimal|infeasible|timeout|error
    objective <value>
    <var> <value>        (one line per variable)
"""

import re
import sys

import numpy as np
from scipy import sparse
from scipy.optimize import Bounds, LinearConstraint, milp


def tokenize(text):
    # Strip backslash comments, then split into section-aware lines.
    lines = []
    for raw in text.splitlines():
        cut = raw.find("\\")
        if cut >= 0:
            raw = raw[:cut]
        if raw.strip():
            lines.append(raw.strip())
    return lines


SECTIONS = {
    "minimize": "objective",
    "maximize": "objective-max",
    "subject": "constraints",
    "st": "constraints",
    "s.t.": "constraints",
    "bounds": "bounds",
    "binaries": "binaries",
    "binary": "binaries",
    "bin": "binaries",
    "generals": "generals",
    "general": "generals",
    "gen": "generals",
    "end": "end",
}

TERM_RE = re.compile(r"([+-])?\s*(\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)?\s*([A-Za-z_][A-Za-z0-9_]*)")


def parse_expr(expr):
    """-> list of (coef, varname)."""
    terms = []
    pos = 0
    expr = expr.strip()
    while pos < len(expr):
        m = TERM_RE.match(expr, pos)
        if not m:
            raise ValueError(f"cannot parse expression at: {expr[pos:]!r}")
        sign, coef, name = m.groups()
        value = float(coef) if coef else 1.0
        if sign == "-":
            value = -value
        terms.append((value, name))
        pos = m.end()
        while pos < len(expr) and expr[pos] in " \t":
            pos += 1
    return terms


def main():
    if len(sys.argv) < 3:
        print(__doc__, file=sys.stderr)
        return 2
    lp_path, sol_path = sys.argv[1], sys.argv[2]
    time_limit = float(sys.argv[3]) if len(sys.argv) > 3 and float(sys.argv[3]) > 0 else None

    with open(lp_path) as fh:
        lines = tokenize(fh.read())

    section = None
    objective = []
    constraints = []  # (terms, sense, rhs)
    bounds = {}
    integers = set()
    binaries = set()
    maximize = False

    i = 0
    while i < len(lines):
        line = lines[i]
        head = line.split()[0].lower().rstrip(":")
        if head in SECTIONS or line.lower().startswith("subject to"):
            kind = SECTIONS.get(head, "constraints")
            if kind == "objective-max":
                maximize = True
                kind = "objective"
            section = kind
            rest = line.split(None, 2 if line.lower().startswith("subject to") else 1)
            remainder = ""
            if line.lower().startswith("subject to"):
                remainder = line[len("subject to"):].strip()
            elif len(rest) > 1:
                remainder = line[len(rest[0]):].strip()
            if remainder:
                lines.insert(i + 1, remainder)
            i += 1
            continue
        if section == "objective":
            body = line.split(":", 1)[1] if ":" in line else line
            objective.extend(parse_expr(body))
        elif section == "constraints":
            body = line.split(":", 1)[1] if ":" in line else line
            m = re.search(r"(<=|>=|=)", body)
            if not m:
                raise ValueError(f"constraint without relation: {line!r}")
            lhs, sense, rhs = body[: m.start()], m.group(1), body[m.end():]
            constraints.append((parse_expr(lhs), sense, float(rhs)))
        elif section == "bounds":
            toks = line.split()
            if len(toks) == 5 and toks[1] == "<=" and toks[3] == "<=":
                bounds[toks[2]] = (float(toks[0]), float(toks[4]))
            elif len(toks) == 3 and toks[1] == "<=":
                lo = bounds.get(toks[0], (0.0, np.inf))[0]
                bounds[toks[0]] = (lo, float(toks[2]))
            elif len(toks) == 3 and toks[1] == ">=":
                hi = bounds.get(toks[0], (0.0, np.inf))[1]
                bounds[toks[0]] = (float(toks[2]), hi)
            elif len(toks) == 3 and toks[1] == "=":
                bounds[toks[0]] = (float(toks[2]), float(toks[2]))
            else:
                raise ValueError(f"cannot parse bound: {line!r}")
        elif section == "binaries":
            binaries.update(line.split())
        elif section == "generals":
            integers.update(line.split())
        elif section == "end":
            break
        i += 1

    names = []
    index = {}

    def var(name):
        if name not in index:
            index[name] = len(names)
            names.append(name)
        return index[name]

    for _, name in objective:
        var(name)
    for terms, _, _ in constraints:
        for _, name in terms:
            var(name)
    for name in list(bounds) + list(integers) + list(binaries):
        var(name)

    n = len(names)
    c = np.zeros(n)
    for coef, name in objective:
        c[index[name]] += coef
    if maximize:
        c = -c

    rows, cols, vals = [], [], []
    lo_list, hi_list = [], []
    for row, (terms, sense, rhs) in enumerate(constraints):
        for coef, name in terms:
            rows.append(row)
            cols.append(index[name])
            vals.append(coef)
        if sense == "<=":
            lo_list.append(-np.inf)
            hi_list.append(rhs)
        elif sense == ">=":
            lo_list.append(rhs)
            hi_list.append(np.inf)
        else:
            lo_list.append(rhs)
            hi_list.append(rhs)
    A = sparse.csr_matrix((vals, (rows, cols)), shape=(len(constraints), n))

    lb = np.zeros(n)
    ub = np.full(n, np.inf)
    integrality = np.zeros(n)
    for name in binaries:
        j = index[name]
        lb[j], ub[j] = 0.0, 1.0
        integrality[j] = 1
    for name in integers:
        integrality[index[name]] = 1
    for name, (lo, hi) in bounds.items():
        j = index[name]
        lb[j], ub[j] = lo, hi

    options = {}
    if time_limit is not None:
        options["time_limit"] = time_limit
    res = milp(
        c,
        constraints=LinearConstraint(A, np.array(lo_list), np.array(hi_list)),
        integrality=integrality,
        bounds=Bounds(lb, ub),
        options=options,
    )

    status = {0: "optimal", 1: "timeout", 2: "infeasible", 3: "error", 4: "error"}.get(
        res.status, "error"
    )
    with open(sol_path, "w") as out:
        out.write(f"status {status}\n")
        if res.x is not None:
            obj = float(res.fun) if not maximize else -float(res.fun)
            out.write(f"objective {obj!r}\n")
            for name, value in zip(names, res.x):
                out.write(f"{name} {float(value)!r}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
