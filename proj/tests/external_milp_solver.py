#!/usr/bin/env python3
"""Solves an LP-format placement program with scipy's MILP solver.

Usage: external_milp_solver.py PROGRAM.lp OUTPUT.sol

Reads the LP subset the exporter produces (objective, Subject To, Bounds,
Binaries) and writes one `name value` line per variable. Exits 3 when the
solver reports anything but a proven optimum.
"""

import sys
from fractions import Fraction

import numpy as np
from scipy import sparse
from scipy.optimize import Bounds, LinearConstraint, milp

SECTIONS = {"Subject", "Bounds", "Binaries", "Generals", "End"}
RELS = {"<=", ">=", "=", "<", ">"}


def tokenize(text):
    tokens = []
    for line in text.splitlines():
        cut = line.find("\\")
        if cut != -1:
            line = line[:cut]
        tokens.extend(line.split())
    return tokens


def is_numeric(tok):
    head = tok[1:] if tok[0] in "+-" else tok
    return bool(head) and (head[0].isdigit() or head[0] == ".")


def value_of(tok):
    return float(Fraction(tok))


class Program:
    def __init__(self):
        self.names = []
        self.index = {}
        self.objective = {}
        self.maximize = False
        self.rows = []  # (terms dict, rel, rhs)
        self.binary = set()
        self.lower = {}
        self.upper = {}

    def var(self, name):
        if name not in self.index:
            self.index[name] = len(self.names)
            self.names.append(name)
        return self.index[name]


def parse_terms(tokens, pos, prog):
    """Reads `[sign] coef name` groups until a relation or section word."""
    terms = {}
    sign = 1.0
    while pos < len(tokens):
        tok = tokens[pos]
        if tok in RELS or tok in SECTIONS:
            break
        if tok == "+":
            sign = 1.0
            pos += 1
        elif tok == "-":
            sign = -1.0
            pos += 1
        elif is_numeric(tok):
            coef = sign * value_of(tok)
            name = tokens[pos + 1]
            terms[prog.var(name)] = terms.get(prog.var(name), 0.0) + coef
            sign = 1.0
            pos += 2
        else:
            name = tok
            if name.endswith(":"):
                pos += 1  # row or objective label
                continue
            terms[prog.var(name)] = terms.get(prog.var(name), 0.0) + sign
            sign = 1.0
            pos += 1
    return terms, pos


def parse(text):
    tokens = tokenize(text)
    prog = Program()
    pos = 0

    if pos >= len(tokens) or tokens[pos] not in ("Maximize", "Minimize"):
        raise ValueError("expected Maximize or Minimize")
    prog.maximize = tokens[pos] == "Maximize"
    pos += 1

    prog.objective, pos = parse_terms(tokens, pos, prog)

    if tokens[pos : pos + 2] != ["Subject", "To"]:
        raise ValueError("expected Subject To")
    pos += 2

    while pos < len(tokens) and tokens[pos] not in ("Bounds", "Binaries",
                                                    "End"):
        terms, pos = parse_terms(tokens, pos, prog)
        if pos >= len(tokens) or tokens[pos] not in RELS:
            raise ValueError("constraint without relation")
        rel = tokens[pos]
        rhs = value_of(tokens[pos + 1])
        pos += 2
        prog.rows.append((terms, rel, rhs))

    if pos < len(tokens) and tokens[pos] == "Bounds":
        pos += 1
        while pos < len(tokens) and tokens[pos] not in ("Binaries", "End"):
            if is_numeric(tokens[pos]):  # lo <= name [<= hi]
                lo = value_of(tokens[pos])
                name = tokens[pos + 2]
                prog.lower[prog.var(name)] = lo
                pos += 3
                if pos < len(tokens) and tokens[pos] in ("<=", "<"):
                    prog.upper[prog.var(name)] = value_of(tokens[pos + 1])
                    pos += 2
            else:
                name = tokens[pos]
                ref = prog.var(name)
                if tokens[pos + 1] == "free":
                    prog.lower[ref] = -np.inf
                    prog.upper[ref] = np.inf
                    pos += 2
                elif tokens[pos + 1] in ("<=", "<"):
                    prog.upper[ref] = value_of(tokens[pos + 2])
                    pos += 3
                elif tokens[pos + 1] in (">=", ">"):
                    prog.lower[ref] = value_of(tokens[pos + 2])
                    pos += 3
                else:
                    raise ValueError("bad bounds entry at " + name)

    if pos < len(tokens) and tokens[pos] == "Binaries":
        pos += 1
        while pos < len(tokens) and tokens[pos] != "End":
            prog.binary.add(prog.var(tokens[pos]))
            pos += 1

    if pos >= len(tokens) or tokens[pos] != "End":
        raise ValueError("missing End")
    return prog


def solve(prog):
    n = len(prog.names)
    c = np.zeros(n)
    for ref, coef in prog.objective.items():
        c[ref] = -coef if prog.maximize else coef

    integrality = np.zeros(n)
    lb = np.full(n, -np.inf)
    ub = np.full(n, np.inf)
    for ref in range(n):
        if ref in prog.binary:
            integrality[ref] = 1
            lb[ref], ub[ref] = 0.0, 1.0
        else:
            if ref in prog.lower:
                lb[ref] = prog.lower[ref]
            if ref in prog.upper:
                ub[ref] = prog.upper[ref]

    constraints = []
    if prog.rows:
        data, rows, cols, clo, cup = [], [], [], [], []
        for r, (terms, rel, rhs) in enumerate(prog.rows):
            for ref, coef in terms.items():
                rows.append(r)
                cols.append(ref)
                data.append(coef)
            if rel in ("<=", "<"):
                clo.append(-np.inf)
                cup.append(rhs)
            elif rel in (">=", ">"):
                clo.append(rhs)
                cup.append(np.inf)
            else:
                clo.append(rhs)
                cup.append(rhs)
        a = sparse.csr_matrix((data, (rows, cols)),
                              shape=(len(prog.rows), n))
        constraints.append(LinearConstraint(a, clo, cup))

    return milp(c, constraints=constraints, integrality=integrality,
                bounds=Bounds(lb, ub), options={"mip_rel_gap": 0})


def main(argv):
    if len(argv) != 3:
        print("usage: external_milp_solver.py PROGRAM.lp OUTPUT.sol",
              file=sys.stderr)
        return 2
    with open(argv[1], "r", encoding="utf-8") as f:
        prog = parse(f.read())
    res = solve(prog)
    if not res.success or res.status != 0:
        print(f"solver failed: status={res.status} {res.message}",
              file=sys.stderr)
        return 3
    with open(argv[2], "w", encoding="utf-8") as f:
        for ref, name in enumerate(prog.names):
            f.write(f"{name} {res.x[ref]:.17g}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
