#!/usr/bin/env python3
"""File-based MILP/LP solver shim backed by scipy's HiGHS interface.

Usage: solve-highs.py MODEL.mps SOLUTION.sol [--gap G] [--time-limit T]

Reads the free-format MPS subset written by the sparsched emitter and writes
a line-based solution file:

    status optimal|feasible|timeout|infeasible|unbounded
    objective <float>      # only when an incumbent exists
    bound <float>
    gap <float>
    walltime <float>
    values <n>             # n lines of "<var> <value>" follow
    duals <m>              # LP relaxations only; "<row> <value>" lines follow

Dual values are reported as d(objective)/d(rhs) for each row in its original
orientation. Any solver that honors this file contract is interchangeable
with this script.
"""

import argparse
import sys
import time

import numpy as np
import scipy.sparse as sp
from scipy.optimize import Bounds, LinearConstraint, linprog, milp


class ParseFailure(Exception):
    pass


def _num(tok, lineno):
    try:
        return float(tok)
    except ValueError:
        raise ParseFailure("line %d: bad number %r" % (lineno, tok))


class Model:
    def __init__(self):
        self.name = "model"
        self.var_names = []
        self.var_index = {}
        self.integer = []
        self.lb = []
        self.ub = []
        self.row_names = []
        self.row_index = {}
        self.row_sense = []  # 'L', 'G', 'E'
        self.row_rhs = []
        self.entries = []  # (row, col, coef)
        self.obj = {}
        self.obj_constant = 0.0

    def touch_var(self, name, integer):
        idx = self.var_index.get(name)
        if idx is None:
            idx = len(self.var_names)
            self.var_index[name] = idx
            self.var_names.append(name)
            self.integer.append(False)
            self.lb.append(0.0)
            self.ub.append(np.inf)
        if integer:
            self.integer[idx] = True
            self.lb[idx] = 0.0
            self.ub[idx] = 1.0
        return idx


def parse_mps(path):
    m = Model()
    section = None
    obj_row = None
    in_int = False
    with open(path, "r", encoding="utf-8") as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line or line.startswith("*"):
                continue
            toks = line.split()
            if line[0] not in (" ", "\t"):
                kw = toks[0]
                if kw == "NAME":
                    if len(toks) > 1:
                        m.name = toks[1]
                    section = "NAME"
                elif kw in ("OBJSENSE", "ROWS", "COLUMNS", "RHS", "BOUNDS"):
                    section = kw
                elif kw == "RANGES":
                    raise ParseFailure("RANGES not supported")
                elif kw == "ENDATA":
                    section = "DONE"
                    break
                else:
                    raise ParseFailure("line %d: unknown section %r" % (lineno, kw))
                continue
            if section == "OBJSENSE":
                if toks[0].upper() not in ("MIN", "MINIMIZE"):
                    raise ParseFailure("only minimization is supported")
            elif section == "ROWS":
                if len(toks) != 2:
                    raise ParseFailure("line %d: bad ROWS record" % lineno)
                typ, name = toks
                if typ == "N":
                    if obj_row is not None:
                        raise ParseFailure("multiple objective rows")
                    obj_row = name
                elif typ in ("L", "G", "E"):
                    m.row_index[name] = len(m.row_names)
                    m.row_names.append(name)
                    m.row_sense.append(typ)
                    m.row_rhs.append(0.0)
                else:
                    raise ParseFailure("line %d: bad row type %r" % (lineno, typ))
            elif section == "COLUMNS":
                if "'INTORG'" in toks:
                    in_int = True
                    continue
                if "'INTEND'" in toks:
                    in_int = False
                    continue
                if len(toks) < 3 or len(toks) % 2 == 0:
                    raise ParseFailure("line %d: bad COLUMNS record" % lineno)
                col = m.touch_var(toks[0], in_int)
                for i in range(1, len(toks), 2):
                    row, val = toks[i], _num(toks[i + 1], lineno)
                    if row == obj_row:
                        if val != 0.0:
                            m.obj[col] = m.obj.get(col, 0.0) + val
                    elif row in m.row_index:
                        m.entries.append((m.row_index[row], col, val))
                    else:
                        raise ParseFailure("line %d: unknown row %r" % (lineno, row))
            elif section == "RHS":
                if len(toks) < 3 or len(toks) % 2 == 0:
                    raise ParseFailure("line %d: bad RHS record" % lineno)
                for i in range(1, len(toks), 2):
                    row, val = toks[i], _num(toks[i + 1], lineno)
                    if row == obj_row:
                        m.obj_constant = -val
                    elif row in m.row_index:
                        m.row_rhs[m.row_index[row]] = val
                    else:
                        raise ParseFailure("line %d: unknown row %r" % (lineno, row))
            elif section == "BOUNDS":
                kind = toks[0]
                if len(toks) < 3:
                    raise ParseFailure("line %d: bad BOUNDS record" % lineno)
                name = toks[2]
                if name not in m.var_index:
                    raise ParseFailure("line %d: unknown variable %r" % (lineno, name))
                i = m.var_index[name]
                if kind == "BV":
                    m.integer[i] = True
                    m.lb[i], m.ub[i] = 0.0, 1.0
                elif kind == "FR":
                    m.lb[i], m.ub[i] = -np.inf, np.inf
                elif kind == "MI":
                    m.lb[i] = -np.inf
                elif kind == "PL":
                    m.ub[i] = np.inf
                elif kind in ("UP", "LO", "FX"):
                    val = _num(toks[3], lineno)
                    if kind == "UP":
                        m.ub[i] = val
                    elif kind == "LO":
                        m.lb[i] = val
                    else:
                        m.lb[i] = m.ub[i] = val
                else:
                    raise ParseFailure("line %d: bound type %r" % (lineno, kind))
            else:
                raise ParseFailure("line %d: data outside any section" % lineno)
    if obj_row is None:
        raise ParseFailure("no objective row")
    if section != "DONE":
        raise ParseFailure("missing ENDATA")
    return m


def solve(m, gap, time_limit):
    n = len(m.var_names)
    c = np.zeros(n)
    for i, v in m.obj.items():
        c[i] = v
    rows = len(m.row_names)
    if m.entries:
        r, col, val = zip(*m.entries)
        a = sp.csr_matrix((val, (r, col)), shape=(rows, n))
    else:
        a = sp.csr_matrix((rows, n))
    rhs = np.array(m.row_rhs)
    lower = np.where([s in ("G", "E") for s in m.row_sense], rhs, -np.inf)
    upper = np.where([s in ("L", "E") for s in m.row_sense], rhs, np.inf)
    t0 = time.monotonic()
    if any(m.integer):
        res = milp(
            c,
            constraints=LinearConstraint(a, lower, upper) if rows else None,
            integrality=np.array(m.integer, dtype=int),
            bounds=Bounds(np.array(m.lb), np.array(m.ub)),
            options={"time_limit": time_limit, "mip_rel_gap": gap},
        )
        wall = time.monotonic() - t0
        out = {"walltime": wall}
        if res.status == 0:
            out["status"] = "optimal"
        elif res.status == 1:
            out["status"] = "feasible" if res.x is not None else "timeout"
        elif res.status == 2:
            out["status"] = "infeasible"
        elif res.status == 3:
            out["status"] = "unbounded"
        else:
            raise RuntimeError("solver failed: %s" % res.message)
        if res.x is not None:
            out["objective"] = res.fun + m.obj_constant
            out["values"] = list(zip(m.var_names, res.x))
            mip_bound = getattr(res, "mip_dual_bound", None)
            out["bound"] = (
                mip_bound + m.obj_constant if mip_bound is not None else out["objective"]
            )
            mip_gap = getattr(res, "mip_gap", None)
            out["gap"] = mip_gap if mip_gap is not None else 0.0
        return out

    # Pure LP: split rows for linprog and recover duals per original row.
    le_rows = [i for i, s in enumerate(m.row_sense) if s == "L"]
    ge_rows = [i for i, s in enumerate(m.row_sense) if s == "G"]
    eq_rows = [i for i, s in enumerate(m.row_sense) if s == "E"]
    a_ub = None
    b_ub = None
    if le_rows or ge_rows:
        parts = []
        b = []
        if le_rows:
            parts.append(a[le_rows])
            b.extend(rhs[le_rows])
        if ge_rows:
            parts.append(-a[ge_rows])
            b.extend(-rhs[ge_rows])
        a_ub = sp.vstack(parts).tocsr()
        b_ub = np.array(b)
    a_eq = a[eq_rows].tocsr() if eq_rows else None
    b_eq = rhs[eq_rows] if eq_rows else None
    res = linprog(
        c,
        A_ub=a_ub,
        b_ub=b_ub,
        A_eq=a_eq,
        b_eq=b_eq,
        bounds=list(zip(m.lb, m.ub)),
        method="highs",
        options={
            "time_limit": time_limit,
            "primal_feasibility_tolerance": 1e-9,
            "dual_feasibility_tolerance": 1e-9,
        },
    )
    wall = time.monotonic() - t0
    out = {"walltime": wall}
    if res.status == 0:
        out["status"] = "optimal"
    elif res.status == 1:
        out["status"] = "timeout"
    elif res.status == 2:
        out["status"] = "infeasible"
    elif res.status == 3:
        out["status"] = "unbounded"
    else:
        raise RuntimeError("solver failed: %s" % res.message)
    if res.status == 0:
        out["objective"] = res.fun + m.obj_constant
        out["bound"] = out["objective"]
        out["gap"] = 0.0
        out["values"] = list(zip(m.var_names, res.x))
        duals = np.zeros(len(m.row_names))
        pos = 0
        if le_rows:
            duals[le_rows] = res.ineqlin.marginals[pos : pos + len(le_rows)]
            pos += len(le_rows)
        if ge_rows:
            # Row was negated, so d(obj)/d(rhs) flips sign back.
            duals[ge_rows] = -res.ineqlin.marginals[pos : pos + len(ge_rows)]
        if eq_rows:
            duals[eq_rows] = res.eqlin.marginals
        out["duals"] = list(zip(m.row_names, duals))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("model")
    ap.add_argument("solution")
    ap.add_argument("--gap", type=float, default=1e-3)
    ap.add_argument("--time-limit", type=float, default=600.0)
    args = ap.parse_args()
    model = parse_mps(args.model)
    out = solve(model, args.gap, args.time_limit)
    with open(args.solution, "w", encoding="utf-8") as f:
        f.write("status %s\n" % out["status"])
        if "objective" in out:
            f.write("objective %.17g\n" % out["objective"])
            f.write("bound %.17g\n" % out["bound"])
            f.write("gap %.17g\n" % out["gap"])
        f.write("walltime %.6f\n" % out["walltime"])
        if "values" in out:
            f.write("values %d\n" % len(out["values"]))
            for name, v in out["values"]:
                f.write("%s %.17g\n" % (name, v))
        if "duals" in out:
            f.write("duals %d\n" % len(out["duals"]))
            for name, v in out["duals"]:
                f.write("%s %.17g\n" % (name, v))
    return 0


if __name__ == "__main__":
    try:
        sys.exit(main())
    except (ParseFailure, RuntimeError, OSError) as exc:
        print("solve-highs: %s" % exc, file=sys.stderr)
        sys.exit(1)
