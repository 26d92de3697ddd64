"""CSP data model, the ``cspi 1`` instance format and desk-scale generators."""

from __future__ import annotations

import enum
import itertools
import math
import random
import re
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence


class InstanceError(ValueError):
    """Base class for malformed instances. Carries an optional source position."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        self.reason = message
        if line is not None:
            loc = f"line {line}" + (f", column {column}" if column is not None else "")
            message = f"{loc}: {message}"
        super().__init__(message)


class InstanceSyntaxError(InstanceError):
    pass


class UnknownVariableError(InstanceError):
    pass


class DuplicateNameError(InstanceError):
    pass


class EmptyDomainError(InstanceError):
    pass


class ArityMismatchError(InstanceError):
    pass


class InstanceWarning(UserWarning):
    """Emitted when a table tuple falls outside the declared domains and is dropped."""


class Kind(enum.Enum):
    ALLOW = "allow"
    FORBID = "forbid"
    EQ = "eq"
    NEQ = "neq"
    ABSDIFFNE = "absdiffne"
    ABSDIFFGT = "absdiffgt"

    @property
    def is_table(self) -> bool:
        return self in (Kind.ALLOW, Kind.FORBID)

    @property
    def has_param(self) -> bool:
        return self in (Kind.ABSDIFFNE, Kind.ABSDIFFGT)


@dataclass(frozen=True)
class VariableDecl:
    id: int
    name: str
    initial_domain: tuple[int, ...]


@dataclass(frozen=True)
class Constraint:
    id: int
    name: str
    scope: tuple[int, ...]
    kind: Kind
    param: Optional[int] = None
    tuples: tuple[tuple[int, ...], ...] = ()
    table: frozenset = field(init=False, compare=False, repr=False)
    # binary tables only: for each scope position, value -> partner values listed with it
    partners: Optional[tuple[dict, dict]] = field(init=False, compare=False, repr=False)
    # largest partner set per position (binary tables), a cheap bound for forbid revision
    widest: Optional[tuple[int, int]] = field(init=False, compare=False, repr=False)
    # binary forbid only: x -> (other variable, bound); |D(other)| > bound means no loss of support
    forbid_bound: Optional[dict] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "table", frozenset(self.tuples))
        partners = None
        if self.kind.is_table and len(self.scope) == 2:
            first: dict[int, set] = {}
            second: dict[int, set] = {}
            for a, b in self.tuples:
                first.setdefault(a, set()).add(b)
                second.setdefault(b, set()).add(a)
            partners = (
                {a: frozenset(bs) for a, bs in first.items()},
                {b: frozenset(as_) for b, as_ in second.items()},
            )
        object.__setattr__(self, "partners", partners)
        widest = None
        if partners is not None:
            widest = tuple(max(map(len, side.values()), default=0) for side in partners)
        object.__setattr__(self, "widest", widest)
        bound = None
        if widest is not None and self.kind is Kind.FORBID:
            x, y = self.scope
            bound = {x: (y, widest[0]), y: (x, widest[1])}
        object.__setattr__(self, "forbid_bound", bound)

    @property
    def arity(self) -> int:
        return len(self.scope)


def constraint_check(c: Constraint, values: Sequence[int]) -> bool:
    """True iff the full tuple ``values`` (in scope order) satisfies ``c``."""
    if len(values) != len(c.scope):
        raise ArityMismatchError(
            f"constraint {c.name} has arity {len(c.scope)}, got a tuple of width {len(values)}"
        )
    kind = c.kind
    if kind is Kind.ALLOW:
        return tuple(values) in c.table
    if kind is Kind.FORBID:
        return tuple(values) not in c.table
    a, b = values
    if kind is Kind.EQ:
        return a == b
    if kind is Kind.NEQ:
        return a != b
    if kind is Kind.ABSDIFFNE:
        return abs(a - b) != c.param
    return abs(a - b) > c.param


@dataclass(frozen=True)
class Problem:
    """An immutable CSP. Constraint and variable order is significant."""

    name: str
    variables: tuple[VariableDecl, ...]
    constraints: tuple[Constraint, ...]
    # constraint ids touching each variable, ascending
    constraints_of: tuple[tuple[int, ...], ...] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        _validate(self)
        incident: list[list[int]] = [[] for _ in self.variables]
        for c in self.constraints:
            for x in c.scope:
                incident[x].append(c.id)
        object.__setattr__(self, "constraints_of", tuple(tuple(ids) for ids in incident))

    @property
    def n(self) -> int:
        return len(self.variables)

    def var_id(self, name: str) -> int:
        for v in self.variables:
            if v.name == name:
                return v.id
        raise UnknownVariableError(f"unknown variable {name}")

    def named(self, assignment: Sequence[int]) -> dict[str, int]:
        return {v.name: assignment[v.id] for v in self.variables}

    def is_solution(self, assignment: Sequence[int]) -> bool:
        return all(
            constraint_check(c, [assignment[x] for x in c.scope]) for c in self.constraints
        )


def _validate(p: Problem) -> None:
    names = set()
    for i, v in enumerate(p.variables):
        if v.id != i:
            raise InstanceError(f"variable {v.name} has id {v.id}, expected {i}")
        if v.name in names:
            raise DuplicateNameError(f"duplicate variable name {v.name}")
        names.add(v.name)
        if not v.initial_domain:
            raise EmptyDomainError(f"variable {v.name} has an empty domain")
        if len(set(v.initial_domain)) != len(v.initial_domain):
            raise InstanceError(f"variable {v.name} has repeated domain values")
    cnames = set()
    for i, c in enumerate(p.constraints):
        if c.id != i:
            raise InstanceError(f"constraint {c.name} has id {c.id}, expected {i}")
        if c.name in cnames:
            raise DuplicateNameError(f"duplicate constraint name {c.name}")
        cnames.add(c.name)
        if not c.scope:
            raise ArityMismatchError(f"constraint {c.name} has an empty scope")
        for x in c.scope:
            if not 0 <= x < len(p.variables):
                raise UnknownVariableError(f"constraint {c.name} refers to unknown variable id {x}")
        if len(set(c.scope)) != len(c.scope):
            raise InstanceError(f"constraint {c.name} repeats a variable in its scope")
        if c.kind.is_table:
            domains = [set(p.variables[x].initial_domain) for x in c.scope]
            for t in c.tuples:
                if len(t) != len(c.scope):
                    raise ArityMismatchError(
                        f"constraint {c.name}: tuple {t} does not match arity {len(c.scope)}"
                    )
                if any(val not in dom for val, dom in zip(t, domains)):
                    raise InstanceError(f"constraint {c.name}: tuple {t} lies outside the domains")
        else:
            if len(c.scope) != 2:
                raise ArityMismatchError(f"constraint {c.name} ({c.kind.value}) must be binary")
            if c.kind.has_param and c.param is None:
                raise InstanceError(f"constraint {c.name} ({c.kind.value}) needs a parameter")


# ---------------------------------------------------------------------------
# cspi 1 format

_TOKEN = re.compile(r"\S+")


def _int_token(tok: str, line: int, col: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise InstanceSyntaxError(f"expected an integer, got {tok!r}", line, col) from None


def parse_instance(text: str, name: str = "") -> Problem:
    """Parse ``cspi 1`` text into a validated :class:`Problem`.

    Table tuples with values outside the scope's declared domains are dropped
    with an :class:`InstanceWarning`.
    """
    variables: list[VariableDecl] = []
    var_ids: dict[str, int] = {}
    constraints: list[Constraint] = []
    con_names: set[str] = set()
    seen_header = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        toks = [(m.group(), m.start() + 1) for m in _TOKEN.finditer(body)]
        if not toks:
            continue
        head, hcol = toks[0]
        if not seen_header:
            if [t for t, _ in toks] != ["cspi", "1"]:
                raise InstanceSyntaxError("expected header 'cspi 1'", lineno, hcol)
            seen_header = True
            continue

        if head == "var":
            if len(toks) < 2:
                raise InstanceSyntaxError("'var' needs a name", lineno, hcol)
            vname, vcol = toks[1]
            if vname in var_ids:
                raise DuplicateNameError(f"duplicate variable name {vname}", lineno, vcol)
            rest = toks[2:]
            if rest and rest[0][0] == "range":
                if len(rest) != 3:
                    raise InstanceSyntaxError("'range' needs exactly <lo> <hi>", lineno, rest[0][1])
                lo = _int_token(rest[1][0], lineno, rest[1][1])
                hi = _int_token(rest[2][0], lineno, rest[2][1])
                domain = tuple(range(lo, hi + 1))
            else:
                domain = tuple(_int_token(t, lineno, c) for t, c in rest)
            if not domain:
                raise EmptyDomainError(f"variable {vname} has an empty domain", lineno, vcol)
            if len(set(domain)) != len(domain):
                raise InstanceSyntaxError(f"variable {vname} repeats a domain value", lineno, vcol)
            var_ids[vname] = len(variables)
            variables.append(VariableDecl(len(variables), vname, domain))

        elif head == "con":
            constraints.append(
                _parse_constraint(body, toks, lineno, len(constraints), var_ids, variables, con_names)
            )
        else:
            raise InstanceSyntaxError(f"unknown directive {head!r}", lineno, hcol)

    if not seen_header:
        raise InstanceSyntaxError("missing header 'cspi 1'", 1, 1)
    return Problem(name, tuple(variables), tuple(constraints))


def _parse_constraint(body, toks, lineno, cid, var_ids, variables, con_names) -> Constraint:
    if len(toks) < 3:
        raise InstanceSyntaxError("'con' needs a name and a kind", lineno, toks[0][1])
    cname, ccol = toks[1]
    if cname in con_names:
        raise DuplicateNameError(f"duplicate constraint name {cname}", lineno, ccol)
    kind_tok, kcol = toks[2]
    try:
        kind = Kind(kind_tok)
    except ValueError:
        raise InstanceSyntaxError(f"unknown constraint kind {kind_tok!r}", lineno, kcol) from None

    def lookup(tok, col):
        if tok not in var_ids:
            raise UnknownVariableError(f"unknown variable {tok}", lineno, col)
        return var_ids[tok]

    param = None
    tuples: list[tuple[int, ...]] = []
    if not kind.is_table:
        want = 3 if kind.has_param else 2
        args = toks[3:]
        if len(args) != want:
            raise ArityMismatchError(
                f"{kind.value} takes {want} arguments, got {len(args)}", lineno, kcol
            )
        scope = tuple(lookup(t, c) for t, c in args[:2])
        if kind.has_param:
            param = _int_token(args[2][0], lineno, args[2][1])
    else:
        colon = body.find(":")
        if colon < 0:
            raise InstanceSyntaxError("table constraint needs ':' before its tuples", lineno, kcol)
        scope_toks = [(m.group(), m.start() + 1) for m in _TOKEN.finditer(body[:colon])][3:]
        if not scope_toks:
            raise ArityMismatchError(f"constraint {cname} has an empty scope", lineno, kcol)
        scope = tuple(lookup(t, c) for t, c in scope_toks)
        domains = [set(variables[x].initial_domain) for x in scope]
        seen = set()
        offset = colon + 1
        for chunk in body[colon + 1:].split(";"):
            col = offset + len(chunk) - len(chunk.lstrip()) + 1
            offset += len(chunk) + 1
            if not chunk.strip():
                continue
            parts = [p.strip() for p in chunk.split(",")]
            t = tuple(_int_token(p, lineno, col) for p in parts)
            if len(t) != len(scope):
                raise ArityMismatchError(
                    f"tuple {chunk.strip()!r} has width {len(t)}, scope has arity {len(scope)}",
                    lineno, col,
                )
            if any(v not in d for v, d in zip(t, domains)):
                warnings.warn(
                    f"line {lineno}: constraint {cname}: dropping tuple {t} outside the domains",
                    InstanceWarning,
                    stacklevel=3,
                )
                continue
            if t not in seen:
                seen.add(t)
                tuples.append(t)
    if len(set(scope)) != len(scope):
        raise InstanceSyntaxError(f"constraint {cname} repeats a variable", lineno, kcol)
    con_names.add(cname)
    return Constraint(cid, cname, scope, kind, param, tuple(tuples))


def render_instance(problem: Problem) -> str:
    lines = ["cspi 1"]
    for v in problem.variables:
        dom = v.initial_domain
        if len(dom) > 2 and dom == tuple(range(dom[0], dom[-1] + 1)):
            lines.append(f"var {v.name} range {dom[0]} {dom[-1]}")
        else:
            lines.append(f"var {v.name} " + " ".join(map(str, dom)))
    for c in problem.constraints:
        names = " ".join(problem.variables[x].name for x in c.scope)
        if c.kind.is_table:
            body = " ; ".join(",".join(map(str, t)) for t in c.tuples)
            lines.append(f"con {c.name} {c.kind.value} {names} : {body}".rstrip())
        elif c.kind.has_param:
            lines.append(f"con {c.name} {c.kind.value} {names} {c.param}")
        else:
            lines.append(f"con {c.name} {c.kind.value} {names}")
    return "\n".join(lines) + "\n"


def load_instance(path) -> Problem:
    import pathlib

    p = pathlib.Path(path)
    return parse_instance(p.read_text(), name=p.stem)


# ---------------------------------------------------------------------------
# generators


def _round(x: float) -> int:
    # half-up; Python's round() is half-to-even
    return int(math.floor(x + 0.5))


def generate_rb(n: int, alpha: float, r: float, p: float, seed: int) -> Problem:
    """Model RB instance forced satisfiable by a planted solution.

    ``d = round(n**alpha)`` values per variable, ``round(r*n*ln n)`` binary
    constraints on distinct scopes, each forbidding ``round(p*d*d)`` tuples,
    none of which is the planted pair.
    """
    if n < 2:
        raise ValueError("RB needs n >= 2")
    if alpha <= 0 or r <= 0:
        raise ValueError("alpha and r must be positive")
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    d = _round(n ** alpha)
    if d < 2:
        raise ValueError(f"domain size round(n**alpha) = {d} is below 2")
    m = _round(r * n * math.log(n))
    pairs = list(itertools.combinations(range(n), 2))
    if m > len(pairs):
        raise ValueError(f"{m} constraints requested but only {len(pairs)} distinct scopes exist")
    t = _round(p * d * d)
    if t >= d * d:
        raise ValueError(f"forbidding {t} of {d * d} tuples leaves no tuple to plant")

    rng = random.Random(seed)
    plant = [rng.randrange(d) for _ in range(n)]
    scopes = sorted(rng.sample(pairs, m))
    constraints = []
    for cid, (x, y) in enumerate(scopes):
        candidates = [(a, b) for a in range(d) for b in range(d) if (a, b) != (plant[x], plant[y])]
        forbidden = sorted(rng.sample(candidates, t))
        constraints.append(Constraint(cid, f"c{cid}", (x, y), Kind.FORBID, None, tuple(forbidden)))
    variables = tuple(VariableDecl(i, f"x{i}", tuple(range(d))) for i in range(n))
    name = f"rb-n{n}-a{alpha:g}-r{r:g}-p{p:g}-s{seed}"
    return Problem(name, variables, tuple(constraints))


def planted_solution(n: int, alpha: float, r: float, p: float, seed: int) -> list[int]:
    """The assignment planted by :func:`generate_rb` for the same arguments."""
    d = _round(n ** alpha)
    rng = random.Random(seed)
    return [rng.randrange(d) for _ in range(n)]


def generate_nqueens(n: int) -> Problem:
    if n < 1:
        raise ValueError("n must be at least 1")
    variables = tuple(VariableDecl(i, f"q{i}", tuple(range(n))) for i in range(n))
    constraints = []
    for i, j in itertools.combinations(range(n), 2):
        cid = len(constraints)
        constraints.append(Constraint(cid, f"row{i}_{j}", (i, j), Kind.NEQ))
        cid = len(constraints)
        constraints.append(Constraint(cid, f"diag{i}_{j}", (i, j), Kind.ABSDIFFNE, j - i))
    return Problem(f"queens-{n}", variables, tuple(constraints))


def generate_tables(
    n: int,
    d: int,
    m: int,
    max_arity: int,
    tightness: float,
    seed: int,
) -> Problem:
    """Random mixed-arity table instance (allow and forbid tables, unary included).

    Each constraint draws an arity in ``1..max_arity`` and a scope of distinct
    variables; a fraction ``tightness`` of the scope's cross product is listed,
    as an allow table (complemented) or a forbid table at random.
    """
    if n < 1 or d < 1 or max_arity < 1:
        raise ValueError("n, d and max_arity must be positive")
    rng = random.Random(seed)
    variables = tuple(VariableDecl(i, f"v{i}", tuple(range(d))) for i in range(n))
    constraints = []
    for cid in range(m):
        k = rng.randint(1, min(max_arity, n))
        scope = tuple(sorted(rng.sample(range(n), k)))
        space = list(itertools.product(range(d), repeat=k))
        listed = sorted(rng.sample(space, _round(tightness * len(space))))
        if rng.random() < 0.5:
            kind, tuples = Kind.FORBID, listed
        else:
            banned = set(listed)
            kind, tuples = Kind.ALLOW, [t for t in space if t not in banned]
        constraints.append(Constraint(cid, f"t{cid}", scope, kind, None, tuple(tuples)))
    return Problem(f"tables-n{n}-d{d}-m{m}-k{max_arity}-s{seed}", variables, tuple(constraints))


def make_problem(
    domains: dict[str, Iterable[int]],
    constraints: Iterable[tuple],
    name: str = "",
) -> Problem:
    """Convenience builder: ``constraints`` holds ``(kind, names, extra)`` triples
    where ``extra`` is the parameter for absdiff kinds or the tuple list for tables."""
    variables = tuple(
        VariableDecl(i, vname, tuple(dom)) for i, (vname, dom) in enumerate(domains.items())
    )
    ids = {v.name: v.id for v in variables}
    built = []
    for cid, spec in enumerate(constraints):
        kind, names, *extra = spec
        kind = Kind(kind)
        try:
            scope = tuple(ids[x] for x in names)
        except KeyError as e:
            raise UnknownVariableError(f"unknown variable {e.args[0]}") from None
        param, tuples = None, ()
        if extra:
            if kind.is_table:
                tuples = tuple(tuple(t) for t in extra[0])
            else:
                param = extra[0]
        built.append(Constraint(cid, f"c{cid}", scope, kind, param, tuples))
    return Problem(name, variables, tuple(built))
