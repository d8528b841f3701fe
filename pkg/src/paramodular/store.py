"""Text persistence: coefficient files, dimension tables, inflation data,
run manifests.

All values are exact text (integers, fractions p/q, residues mod p); the
formats are line oriented so that diffs stay readable and round trips are
byte identical.
"""

import hashlib
import json
from dataclasses import asdict, dataclass
from fractions import Fraction
from importlib import resources

from .errors import HeaderMismatch, ParseError, ValidationFailure
from .etatheta import ThetaBlock
from .fields import GF, QQ
from .fragments import ParamodularFragment, canonical_index
from .jacobi import JacobiFormFragment
from .weakzero import InflationSpec, WeakJacobiFragment


def format_eigen(eigen):
    """Signed exact-divisor list, e.g. {2: -1, 461: 1} -> '-2,+461'."""
    return ",".join(f"{'+' if e > 0 else '-'}{c}" for c, e in sorted(eigen.items()))


def parse_eigen(text):
    out = {}
    for part in text.split(","):
        part = part.strip()
        if not part or part[0] not in "+-" or not part[1:].isdigit():
            raise ParseError(f"bad signed divisor {part!r} in {text!r}")
        c = int(part[1:])
        if c in out:
            raise ParseError(f"repeated divisor {c} in {text!r}")
        out[c] = 1 if part[0] == "+" else -1
    return out


def _field_from_header(head, where):
    tag = head.get("field")
    if tag == "Q":
        return QQ
    if tag and tag[0] == "F" and tag[1:].isdigit():
        p = int(tag[1:])
        if "prime" in head and int(head["prime"]) != p:
            raise ParseError(f"{where}: field {tag} but prime={head['prime']}")
        return GF(p)
    raise ParseError(f"{where}: unknown field tag {tag!r}")


def _parse_value(field, tok, where):
    try:
        if field is QQ:
            return field.coerce(Fraction(tok))
        v = int(tok)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"{where}: bad value {tok!r}") from None
    if not 0 <= v < field.p:
        raise ParseError(f"{where}: residue {v} out of range mod {field.p}")
    return v


class CoeffDB:
    """One coefficient file: a header and exact records (n, r, m, value).

    kind "paramodular": records keyed by the unimodular-canonical index
    triple, one per orbit.  kind "jacobi": records keyed by plain (n, r)
    with m pinned to the index; the header carries the row window and the
    cusp flag so fragments rebuild exactly.
    """

    def __init__(self, kind, level, weight, field, eigen=None, rows=None,
                 cusp=None, coverage=""):
        if kind not in ("paramodular", "jacobi"):
            raise ValidationFailure(f"unknown kind {kind!r}")
        self.kind = kind
        self.level = level
        self.weight = weight
        self.field = field
        self.eigen = dict(eigen or {})
        self.rows = rows
        self.cusp = cusp
        self.coverage = coverage
        self.records = {}

    def add(self, t, value):
        """Insert one record; the index is canonicalized for paramodular kind."""
        n, r, m = t
        if self.kind == "paramodular":
            key = canonical_index(t, self.level)
        else:
            if m != self.level:
                raise ValidationFailure(f"jacobi record {t} has m != index {self.level}")
            key = (n, r, m)
        value = self.field.coerce(value)
        if key in self.records and self.records[key] != value:
            raise ValidationFailure(
                f"conflicting records at canonical index {key}")
        self.records[key] = value

    def require(self, **expect):
        """Check header fields against expectations, raising HeaderMismatch."""
        for name, want in expect.items():
            got = getattr(self, name)
            if got != want:
                raise HeaderMismatch(f"header {name}={got!r}, expected {want!r}")
        return self

    def __eq__(self, other):
        return (isinstance(other, CoeffDB)
                and serialize_coeffdb(self) == serialize_coeffdb(other))

    def __repr__(self):
        return (f"<CoeffDB {self.kind} level={self.level} k={self.weight} "
                f"{len(self.records)} records over {self.field.name}>")


def serialize_coeffdb(db):
    lines = [f"kind={db.kind}", f"level={db.level}", f"weight={db.weight}",
             f"field={db.field.name}"]
    if db.field is not QQ:
        lines.append(f"prime={db.field.p}")
    if db.eigen:
        lines.append(f"eigen={format_eigen(db.eigen)}")
    if db.rows is not None:
        lines.append(f"rows={db.rows[0]}:{db.rows[1]}")
    if db.cusp is not None:
        lines.append(f"cusp={int(db.cusp)}")
    if db.coverage:
        lines.append(f"coverage={db.coverage}")
    for (n, r, m) in sorted(db.records):
        lines.append(f"{n} {r} {m} {db.records[(n, r, m)]}")
    return "\n".join(lines) + "\n"


def _db_from_header(head, where):
    for req in ("kind", "level", "weight", "field"):
        if req not in head:
            raise ParseError(f"{where}: header lacks {req}=")
    try:
        return CoeffDB(head["kind"], int(head["level"]), int(head["weight"]),
                       _field_from_header(head, where),
                       eigen=parse_eigen(head["eigen"]) if "eigen" in head else None,
                       rows=tuple(int(x) for x in head["rows"].split(":"))
                       if "rows" in head else None,
                       cusp=bool(int(head["cusp"])) if "cusp" in head else None,
                       coverage=head.get("coverage", ""))
    except (ValueError, ValidationFailure) as exc:
        raise ParseError(f"{where}: bad header ({exc})") from None


def parse_coeffdb(text):
    head = {}
    db = None
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" in line and db is None:
            key, _, val = line.partition("=")
            if key in head:
                raise ParseError(f"line {i}: repeated header key {key}")
            head[key] = val
            continue
        if db is None:
            db = _db_from_header(head, f"line {i}")
        parts = line.split()
        if len(parts) != 4:
            raise ParseError(f"line {i}: expected 'n r m value', got {line!r}")
        try:
            t = tuple(int(x) for x in parts[:3])
        except ValueError:
            raise ParseError(f"line {i}: bad index in {line!r}") from None
        value = _parse_value(db.field, parts[3], f"line {i}")
        key = t if db.kind == "jacobi" else canonical_index(t, db.level)
        if key in db.records:
            raise ParseError(f"line {i}: duplicate record at canonical {key}")
        try:
            db.add(t, value)
        except ValidationFailure as exc:
            raise ParseError(f"line {i}: {exc}") from None
    if db is None:
        if not head:
            raise ParseError("empty input")
        db = _db_from_header(head, "header")
    return db


def write_coeffdb(db, path):
    with open(path, "w", encoding="ascii") as fh:
        fh.write(serialize_coeffdb(db))


def read_coeffdb(path):
    with open(path, encoding="ascii") as fh:
        return parse_coeffdb(fh.read())


def db_from_paramodular(frag, coverage=""):
    db = CoeffDB("paramodular", frag.level, frag.weight, frag.field,
                 eigen=frag.eigen, coverage=coverage)
    db.records.update(frag.canonical())
    return db


def paramodular_from_db(db, label=None):
    db.require(kind="paramodular")
    return ParamodularFragment(db.level, db.weight, db.field,
                               dict(db.records), eigen=db.eigen, label=label)


def db_from_jacobi(frag, coverage=""):
    """Either a holomorphic fragment or a weight-0 weak one."""
    if isinstance(frag, WeakJacobiFragment):
        db = CoeffDB("jacobi", frag.index, 0, frag.field,
                     rows=(frag.n_floor, frag.n_max), coverage=coverage)
        for (n, r), v in frag.coeffs.items():
            db.add((n, r, frag.index), v)
        for (n, r), v in frag.singular.items():
            db.add((n, r, frag.index), v)
        return db
    db = CoeffDB("jacobi", frag.index, frag.weight, frag.field,
                 rows=(0, frag.n_max), cusp=frag.cusp, coverage=coverage)
    for (n, r), v in frag.coeffs.items():
        db.add((n, r, frag.index), v)
    return db


def jacobi_from_db(db, label=None):
    db.require(kind="jacobi")
    if db.rows is None:
        raise HeaderMismatch("jacobi file lacks rows=")
    if db.weight == 0:
        coeffs, singular = {}, {}
        for (n, r, _), v in db.records.items():
            dest = coeffs if 4 * db.level * n - r * r > 0 else singular
            dest[(n, r)] = v
        return WeakJacobiFragment(db.level, db.field, db.rows[0], db.rows[1],
                                  coeffs, singular, label=label)
    return JacobiFormFragment(db.weight, db.level, db.field, db.rows[1],
                              {(n, r): v for (n, r, _), v in db.records.items()},
                              cusp=bool(db.cusp), label=label)


@dataclass(frozen=True)
class DimensionRow:
    plus: int
    minus: int
    jacobi: int
    source: str


def load_dimension_table(path=None):
    """Known dimensions per level: weight-2 plus/minus spaces and cusp
    Jacobi forms of weight 2.  Defaults to the packaged table."""
    if path is None:
        text = (resources.files("paramodular.data") / "levels.txt").read_text()
    else:
        with open(path, encoding="ascii") as fh:
            text = fh.read()
    table = {}
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 5:
            raise ParseError(f"line {i}: expected 5 columns, got {line!r}")
        try:
            level = int(parts[0])
            row = DimensionRow(int(parts[1]), int(parts[2]), int(parts[3]),
                               parts[4])
        except ValueError:
            raise ParseError(f"line {i}: bad dimension row {line!r}") from None
        if level in table:
            raise ParseError(f"line {i}: repeated level {level}")
        table[level] = row
    return table


def _block_text(block):
    return f"{block.eta_power} {','.join(map(str, block.thetas))}"


def _parse_block(tokens, where):
    try:
        eta = int(tokens[0])
        ds = tuple(int(x) for x in tokens[1].split(","))
    except (ValueError, IndexError):
        raise ParseError(f"{where}: bad theta block {' '.join(tokens)!r}") from None
    return ThetaBlock(eta, ds)


def serialize_inflation(spec):
    lines = ["kind=inflation", f"level={spec.level}"]
    if spec.label:
        lines.append(f"label={spec.label}")
    for block, alpha in spec.raising:
        lines.append(f"raising {alpha} {_block_text(block)}")
    for block, top, beta in spec.inflation:
        lines.append(f"inflation {beta} {_block_text(block)} {_block_text(top)}")
    return "\n".join(lines) + "\n"


def parse_inflation(text):
    head = {}
    raising, inflation = [], []
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" in line and not raising and not inflation:
            key, _, val = line.partition("=")
            head[key] = val
            continue
        parts = line.split()
        where = f"line {i}"
        if parts[0] == "raising" and len(parts) == 4:
            raising.append((_parse_block(parts[2:4], where), Fraction(parts[1])))
        elif parts[0] == "inflation" and len(parts) == 6:
            inflation.append((_parse_block(parts[2:4], where),
                              _parse_block(parts[4:6], where),
                              Fraction(parts[1])))
        else:
            raise ParseError(f"{where}: bad inflation line {line!r}")
    if head.get("kind") != "inflation":
        raise HeaderMismatch(f"kind={head.get('kind')!r}, expected inflation")
    if "level" not in head:
        raise HeaderMismatch("inflation file lacks level=")
    return InflationSpec(int(head["level"]), raising=raising,
                         inflation=inflation, label=head.get("label"))


def file_digest(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    """Everything needed to reproduce one CLI run.

    Re-running the recorded command on inputs with the recorded digests must
    reproduce the output digests; wall_time is informational.
    """

    command: str
    parameters: dict
    inputs: dict
    outputs: dict
    wall_time: float

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
            return cls(**{k: data[k] for k in
                          ("command", "parameters", "inputs", "outputs",
                           "wall_time")})
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ParseError(f"bad manifest: {exc}") from None

    def write(self, path):
        with open(path, "w", encoding="ascii") as fh:
            fh.write(self.to_json())

    @classmethod
    def read(cls, path):
        with open(path, encoding="ascii") as fh:
            return cls.from_json(fh.read())
