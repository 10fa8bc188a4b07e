"""Synthetic dataset generators for benchmarks and tests.

`generate_tpch_style` emits the classic 8-table order/lineitem warehouse
schema (standard column names, key ranges and value domains scaled by a
scale factor) as delimited files plus a manifest and a ground-truth
constraint file. It stands in for the official generator binary, which is
not available in this environment; value distributions are simplified but
key structure, domains, and naming follow the published schema.

`random_schema` produces small star-ish schemas with known planted FKs for
oracle-equivalence tests, and `two_table_dataset` builds a large in-memory
fact/dimension pair for sample-size studies.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .catalog import TypeTag
from .data import TableData

_WORDS = (
    "final regular silent quick furious brave ironic careful express bold "
    "pending even special busy quiet daring slow unusual blithe close dogged "
    "packages deposits requests accounts theodolites instructions platelets "
    "foxes pinto beans ideas excuses asymptotes dependencies sentiments "
    "across above beneath under about after before against along among"
).split()

_COLORS = (
    "almond antique aquamarine azure beige bisque black blanched blue blush "
    "brown burlywood burnished chartreuse chiffon chocolate coral cornflower "
    "cornsilk cream cyan dark deep dim dodger drab firebrick floral forest "
    "frosted gainsboro ghost goldenrod green grey honeydew hot indian ivory "
    "khaki lace lavender lawn lemon light lime linen magenta maroon medium"
).split()

_NATIONS = (
    "ALGERIA ARGENTINA BRAZIL CANADA EGYPT ETHIOPIA FRANCE GERMANY INDIA "
    "INDONESIA IRAN IRAQ JAPAN JORDAN KENYA MOROCCO MOZAMBIQUE PERU CHINA "
    "ROMANIA SAUDI_ARABIA VIETNAM RUSSIA UNITED_KINGDOM UNITED_STATES"
).split()

_REGIONS = ["AFRICA", "AMERICA", "ASIA", "EUROPE", "MIDDLE_EAST"]
_SEGMENTS = ["AUTOMOBILE", "BUILDING", "FURNITURE", "HOUSEHOLD", "MACHINERY"]
_PRIORITIES = ["1-URGENT", "2-HIGH", "3-MEDIUM", "4-NOT_SPECIFIED", "5-LOW"]
_MODES = ["AIR", "FOB", "MAIL", "RAIL", "REG_AIR", "SHIP", "TRUCK"]
_INSTRUCT = ["COLLECT_COD", "DELIVER_IN_PERSON", "NONE", "TAKE_BACK_RETURN"]
_CONTAINERS = ["BAG", "BOX", "CAN", "CASE", "DRUM", "JAR", "PACK", "PKG"]


def _comments(rng: np.random.Generator, n: int, lo: int = 4, hi: int = 9) -> list[str]:
    lengths = rng.integers(lo, hi + 1, size=n)
    picks = rng.integers(0, len(_WORDS), size=int(lengths.sum()))
    out = []
    pos = 0
    for k in lengths:
        out.append(" ".join(_WORDS[i] for i in picks[pos : pos + k]))
        pos += k
    return out


def _phones(rng: np.random.Generator, n: int) -> list[str]:
    digits = rng.integers(0, 10, size=(n, 10))
    return [
        f"{10 + d[0]}-{d[1]}{d[2]}{d[3]}-{d[4]}{d[5]}{d[6]}-{d[7]}{d[8]}{d[9]}"
        for d in digits
    ]


def _money(rng: np.random.Generator, n: int, lo: float, hi: float) -> np.ndarray:
    return np.round(rng.uniform(lo, hi, size=n), 2)


def _dates(rng: np.random.Generator, n: int, start: str = "1992-01-01", span: int = 2400):
    base = np.datetime64(start)
    return base + rng.integers(0, span, size=n).astype("timedelta64[D]")


def generate_tpch_style(
    out_dir: str | Path,
    scale: float = 0.01,
    seed: int = 42,
) -> tuple[Path, Path]:
    """Write the 8-table benchmark dataset; returns (manifest, truth) paths.

    The manifest declares composite keys for the two tables whose keys are
    multi-column (they cannot be detected single-column) and nothing else,
    so single-column key detection is exercised statistically.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)

    n_supplier = max(1, int(10_000 * scale))
    n_part = max(1, int(200_000 * scale))
    n_customer = max(1, int(150_000 * scale))
    n_orders = max(1, int(1_500_000 * scale))

    def write(name: str, header: list[str], cols: list) -> None:
        lines = [",".join(header)]
        for row in zip(*cols):
            lines.append(",".join(str(v) for v in row))
        (out_dir / f"{name}.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    # region / nation
    write(
        "region",
        ["r_regionkey", "r_name", "r_comment"],
        [range(5), _REGIONS, _comments(rng, 5)],
    )
    nationkeys = list(range(25))
    write(
        "nation",
        ["n_nationkey", "n_name", "n_regionkey", "n_comment"],
        [nationkeys, _NATIONS, [k % 5 for k in nationkeys], _comments(rng, 25)],
    )

    # supplier
    suppkeys = np.arange(1, n_supplier + 1)
    write(
        "supplier",
        ["s_suppkey", "s_name", "s_address", "s_nationkey", "s_phone", "s_acctbal", "s_comment"],
        [
            suppkeys,
            [f"Supplier#{k:09d}" for k in suppkeys],
            _comments(rng, n_supplier, 2, 4),
            rng.integers(0, 25, size=n_supplier),
            _phones(rng, n_supplier),
            [f"{v:.2f}" for v in _money(rng, n_supplier, -999.99, 9999.99)],
            _comments(rng, n_supplier),
        ],
    )

    # part
    partkeys = np.arange(1, n_part + 1)
    name_picks = rng.integers(0, len(_COLORS), size=(n_part, 4))
    write(
        "part",
        [
            "p_partkey", "p_name", "p_mfgr", "p_brand", "p_type", "p_size",
            "p_container", "p_retailprice", "p_comment",
        ],
        [
            partkeys,
            [" ".join(_COLORS[i] for i in row) for row in name_picks],
            [f"Manufacturer#{m}" for m in rng.integers(1, 6, size=n_part)],
            [f"Brand#{m}{n}" for m, n in rng.integers(1, 6, size=(n_part, 2))],
            [
                f"{_WORDS[a]} {_WORDS[b]} {_WORDS[c]}"
                for a, b, c in rng.integers(0, 12, size=(n_part, 3))
            ],
            rng.integers(1, 51, size=n_part),
            [_CONTAINERS[i] for i in rng.integers(0, len(_CONTAINERS), size=n_part)],
            [f"{(90000 + ((k * 100) % 20001) + 100 * (k % 1000)) / 100:.2f}" for k in partkeys],
            _comments(rng, n_part, 2, 6),
        ],
    )

    # partsupp: 4 suppliers per part
    ps_part = np.repeat(partkeys, 4)
    ps_supp = np.array(
        [((pk + i * (n_supplier // 4 + 1)) % n_supplier) + 1 for pk in partkeys for i in range(4)]
    )
    n_ps = len(ps_part)
    write(
        "partsupp",
        ["ps_partkey", "ps_suppkey", "ps_availqty", "ps_supplycost", "ps_comment"],
        [
            ps_part,
            ps_supp,
            rng.integers(1, 10_000, size=n_ps),
            [f"{v:.2f}" for v in _money(rng, n_ps, 1.0, 1000.0)],
            _comments(rng, n_ps),
        ],
    )

    # customer; the last account number was reassigned out of the dense
    # range, so the customer key domain is not a subset of the part keys
    # (but stays within the outlier fence of a uniform key distribution)
    custkeys = np.arange(1, n_customer + 1)
    custkeys[-1] = int(round(n_customer * 1.45))
    write(
        "customer",
        [
            "c_custkey", "c_name", "c_address", "c_nationkey", "c_phone",
            "c_acctbal", "c_mktsegment", "c_comment",
        ],
        [
            custkeys,
            [f"Customer#{k:09d}" for k in custkeys],
            _comments(rng, n_customer, 2, 4),
            rng.integers(0, 25, size=n_customer),
            _phones(rng, n_customer),
            [f"{v:.2f}" for v in _money(rng, n_customer, -999.99, 9999.99)],
            [_SEGMENTS[i] for i in rng.integers(0, 5, size=n_customer)],
            _comments(rng, n_customer),
        ],
    )

    # orders
    orderkeys = np.arange(1, n_orders + 1)
    o_cust = custkeys[rng.integers(0, n_customer, size=n_orders)]
    o_cust[0] = custkeys[-1]  # the reassigned account has at least one order
    write(
        "orders",
        [
            "o_orderkey", "o_custkey", "o_orderstatus", "o_totalprice", "o_orderdate",
            "o_orderpriority", "o_clerk", "o_shippriority", "o_comment",
        ],
        [
            orderkeys,
            o_cust,
            ["FOP"[i] for i in rng.integers(0, 3, size=n_orders)],
            [f"{v:.2f}" for v in _money(rng, n_orders, 850.0, 550_000.0)],
            _dates(rng, n_orders),
            [_PRIORITIES[i] for i in rng.integers(0, 5, size=n_orders)],
            [f"Clerk#{c:09d}" for c in rng.integers(1, max(2, int(1000 * scale)) + 1, size=n_orders)],
            np.zeros(n_orders, dtype=int),
            _comments(rng, n_orders, 3, 8),
        ],
    )

    # lineitem: 1-7 lines per order
    lines_per_order = rng.integers(1, 8, size=n_orders)
    l_order = np.repeat(orderkeys, lines_per_order)
    n_li = len(l_order)
    l_linenumber = np.concatenate([np.arange(1, k + 1) for k in lines_per_order])
    l_part = rng.integers(1, n_part + 1, size=n_li)
    l_supp = rng.integers(1, n_supplier + 1, size=n_li)
    l_qty = rng.integers(1, 51, size=n_li)
    ship = _dates(rng, n_li)
    write(
        "lineitem",
        [
            "l_orderkey", "l_partkey", "l_suppkey", "l_linenumber", "l_quantity",
            "l_extendedprice", "l_discount", "l_tax", "l_returnflag", "l_linestatus",
            "l_shipdate", "l_commitdate", "l_receiptdate", "l_shipinstruct",
            "l_shipmode", "l_comment",
        ],
        [
            l_order,
            l_part,
            l_supp,
            l_linenumber,
            l_qty,
            [f"{v:.2f}" for v in np.round(l_qty * _money(rng, n_li, 900.0, 2000.0), 2)],
            [f"{v / 100:.2f}" for v in rng.integers(0, 11, size=n_li)],
            [f"{v / 100:.2f}" for v in rng.integers(0, 9, size=n_li)],
            ["ARN"[i] for i in rng.integers(0, 3, size=n_li)],
            ["OF"[i] for i in rng.integers(0, 2, size=n_li)],
            ship,
            ship + rng.integers(1, 60, size=n_li).astype("timedelta64[D]"),
            ship + rng.integers(1, 30, size=n_li).astype("timedelta64[D]"),
            [_INSTRUCT[i] for i in rng.integers(0, 4, size=n_li)],
            [_MODES[i] for i in rng.integers(0, 7, size=n_li)],
            _comments(rng, n_li, 3, 7),
        ],
    )

    manifest = _tpch_manifest(declare_composites=True, declare_fks=False)
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2), encoding="utf-8")

    truth = _tpch_manifest(declare_composites=True, declare_fks=True, with_pks=True)
    truth_path = out_dir / "truth.json"
    truth_path.write_text(json.dumps(truth, indent=2), encoding="utf-8")
    return manifest_path, truth_path


_TPCH_COLUMNS: dict[str, list[tuple[str, str]]] = {
    "region": [
        ("r_regionkey", "integer-unsigned"), ("r_name", "text"), ("r_comment", "text"),
    ],
    "nation": [
        ("n_nationkey", "integer-unsigned"), ("n_name", "text"),
        ("n_regionkey", "integer-unsigned"), ("n_comment", "text"),
    ],
    "supplier": [
        ("s_suppkey", "integer-unsigned"), ("s_name", "text"), ("s_address", "text"),
        ("s_nationkey", "integer-unsigned"), ("s_phone", "text"),
        ("s_acctbal", "decimal"), ("s_comment", "text"),
    ],
    "part": [
        ("p_partkey", "integer-unsigned"), ("p_name", "text"), ("p_mfgr", "text"),
        ("p_brand", "text"), ("p_type", "text"), ("p_size", "integer-unsigned"),
        ("p_container", "text"), ("p_retailprice", "decimal"), ("p_comment", "text"),
    ],
    "partsupp": [
        ("ps_partkey", "integer-unsigned"), ("ps_suppkey", "integer-unsigned"),
        ("ps_availqty", "integer-unsigned"), ("ps_supplycost", "decimal"),
        ("ps_comment", "text"),
    ],
    "customer": [
        ("c_custkey", "integer-unsigned"), ("c_name", "text"), ("c_address", "text"),
        ("c_nationkey", "integer-unsigned"), ("c_phone", "text"),
        ("c_acctbal", "decimal"), ("c_mktsegment", "text"), ("c_comment", "text"),
    ],
    "orders": [
        ("o_orderkey", "integer-unsigned"), ("o_custkey", "integer-unsigned"),
        ("o_orderstatus", "text"), ("o_totalprice", "decimal"), ("o_orderdate", "date"),
        ("o_orderpriority", "text"), ("o_clerk", "text"),
        ("o_shippriority", "integer-unsigned"), ("o_comment", "text"),
    ],
    "lineitem": [
        ("l_orderkey", "integer-unsigned"), ("l_partkey", "integer-unsigned"),
        ("l_suppkey", "integer-unsigned"), ("l_linenumber", "integer-unsigned"),
        ("l_quantity", "decimal"), ("l_extendedprice", "decimal"),
        ("l_discount", "decimal"), ("l_tax", "decimal"), ("l_returnflag", "text"),
        ("l_linestatus", "text"), ("l_shipdate", "date"), ("l_commitdate", "date"),
        ("l_receiptdate", "date"), ("l_shipinstruct", "text"), ("l_shipmode", "text"),
        ("l_comment", "text"),
    ],
}

_TPCH_SINGLE_PKS = {
    "region": "r_regionkey",
    "nation": "n_nationkey",
    "supplier": "s_suppkey",
    "part": "p_partkey",
    "customer": "c_custkey",
    "orders": "o_orderkey",
}

_TPCH_COMPOSITE_PKS = {
    "partsupp": ["ps_partkey", "ps_suppkey"],
    "lineitem": ["l_orderkey", "l_linenumber"],
}

# Declared references: 7 single-column FKs plus the two column pairs of
# the composite reference from lineitem into partsupp.
_TPCH_FKS: dict[str, list[tuple[list[str], str, list[str]]]] = {
    "nation": [(["n_regionkey"], "region", ["r_regionkey"])],
    "supplier": [(["s_nationkey"], "nation", ["n_nationkey"])],
    "customer": [(["c_nationkey"], "nation", ["n_nationkey"])],
    "partsupp": [
        (["ps_partkey"], "part", ["p_partkey"]),
        (["ps_suppkey"], "supplier", ["s_suppkey"]),
    ],
    "orders": [(["o_custkey"], "customer", ["c_custkey"])],
    "lineitem": [
        (["l_orderkey"], "orders", ["o_orderkey"]),
        (["l_partkey"], "partsupp", ["ps_partkey"]),
        (["l_suppkey"], "partsupp", ["ps_suppkey"]),
    ],
}


def _tpch_manifest(
    declare_composites: bool, declare_fks: bool, with_pks: bool = False
) -> dict:
    tables = []
    for name, cols in _TPCH_COLUMNS.items():
        entry: dict = {
            "name": name,
            "columns": [{"name": c, "type": t} for c, t in cols],
            "data_source": f"{name}.csv",
        }
        if with_pks and name in _TPCH_SINGLE_PKS:
            entry["declared_pk"] = [_TPCH_SINGLE_PKS[name]]
        if declare_composites and name in _TPCH_COMPOSITE_PKS:
            entry["declared_pk"] = _TPCH_COMPOSITE_PKS[name]
        if declare_fks and name in _TPCH_FKS:
            entry["declared_fks"] = [
                {"columns": c, "ref_table": rt, "ref_columns": rc}
                for c, rt, rc in _TPCH_FKS[name]
            ]
        tables.append(entry)
    return {"database_name": "tpch_style", "tables": tables}


def random_schema(
    seed: int,
    max_tables: int = 6,
    max_rows: int = 1000,
) -> tuple[dict[str, TableData], dict[str, str], list[tuple[tuple[str, str], tuple[str, str]]]]:
    """Small random schema with planted FKs.

    Returns (tables, pk_by_table, planted_fk_pairs). Every table gets a
    dense unique id column named <table>_id, a few noise columns, and each
    non-first table gets one FK into an earlier table.
    """
    rng = np.random.default_rng(seed)
    n_tables = int(rng.integers(2, max_tables + 1))
    names = [f"tab{chr(ord('a') + i)}" for i in range(n_tables)]
    tables: dict[str, TableData] = {}
    pks: dict[str, str] = {}
    planted: list[tuple[tuple[str, str], tuple[str, str]]] = []
    rows_by_table: dict[str, int] = {}

    for i, name in enumerate(names):
        rows = int(rng.integers(20, max_rows + 1))
        rows_by_table[name] = rows
        cols: dict[str, tuple[TypeTag, np.ndarray]] = {}
        pk_col = f"{name}_id"
        cols[pk_col] = (TypeTag.INTEGER_UNSIGNED, np.arange(1, rows + 1, dtype=np.float64))
        pks[name] = pk_col
        if i > 0:
            target = names[int(rng.integers(0, i))]
            fk_col = f"{target}_id"
            if fk_col not in cols:
                cols[fk_col] = (
                    TypeTag.INTEGER_UNSIGNED,
                    rng.integers(1, rows_by_table[target] + 1, size=rows).astype(np.float64),
                )
                planted.append(((name, fk_col), (target, f"{target}_id")))
        for j in range(int(rng.integers(1, 4))):
            kind = rng.integers(0, 3)
            col = f"val{j}"
            if kind == 0:
                cols[col] = (
                    TypeTag.DECIMAL,
                    np.round(rng.uniform(0, 10_000, size=rows), 2),
                )
            elif kind == 1:
                cols[col] = (
                    TypeTag.INTEGER_SIGNED,
                    rng.integers(-50, 10_000, size=rows).astype(np.float64),
                )
            else:
                words = np.array(_WORDS, dtype=object)
                cols[col] = (
                    TypeTag.TEXT,
                    words[rng.integers(0, len(_WORDS), size=rows)],
                )
        tables[name] = TableData.from_arrays(name, cols)
    return tables, pks, planted


def two_table_dataset(
    fact_rows: int,
    dim_rows: int,
    seed: int = 7,
) -> dict[str, TableData]:
    """Fact/dimension pair for sample-size sensitivity studies."""
    rng = np.random.default_rng(seed)
    dim = TableData.from_arrays(
        "dim_entity",
        {
            "entity_id": (TypeTag.INTEGER_UNSIGNED, np.arange(1, dim_rows + 1, dtype=np.float64)),
            "entity_weight": (TypeTag.DECIMAL, np.round(rng.uniform(0, 100, size=dim_rows), 2)),
        },
    )
    fact = TableData.from_arrays(
        "fact_events",
        {
            "event_id": (TypeTag.INTEGER_UNSIGNED, np.arange(1, fact_rows + 1, dtype=np.float64)),
            "entity_id": (
                TypeTag.INTEGER_UNSIGNED,
                rng.integers(1, dim_rows + 1, size=fact_rows).astype(np.float64),
            ),
            "amount": (TypeTag.DECIMAL, np.round(rng.uniform(0, 500, size=fact_rows), 2)),
        },
    )
    return {"dim_entity": dim, "fact_events": fact}


# Join pairs used for query-log generation: every declared reference plus
# the two statistical lineitem edges, written column-to-column.
_TPCH_JOIN_PAIRS: list[tuple[tuple[str, str], tuple[str, str]]] = [
    (("nation", "n_regionkey"), ("region", "r_regionkey")),
    (("supplier", "s_nationkey"), ("nation", "n_nationkey")),
    (("customer", "c_nationkey"), ("nation", "n_nationkey")),
    (("partsupp", "ps_partkey"), ("part", "p_partkey")),
    (("partsupp", "ps_suppkey"), ("supplier", "s_suppkey")),
    (("orders", "o_custkey"), ("customer", "c_custkey")),
    (("lineitem", "l_orderkey"), ("orders", "o_orderkey")),
    (("lineitem", "l_partkey"), ("part", "p_partkey")),
    (("lineitem", "l_suppkey"), ("supplier", "s_suppkey")),
]


def generate_query_log(
    n: int,
    seed: int = 0,
    pairs: list[tuple[tuple[str, str], tuple[str, str]]] | None = None,
) -> tuple[list[str], list[tuple[tuple[str, str], tuple[str, str]]]]:
    """Well-formed single-join SELECTs with known ground-truth column pairs.

    Statement shapes rotate through explicit JOIN ... ON (with and without
    aliases), comma joins with WHERE, and versions salted with comments,
    extra filter predicates, and odd casing, so the parser's relaxation is
    exercised rather than one canonical spelling.
    """
    rng = np.random.default_rng(seed)
    pool = pairs if pairs is not None else _TPCH_JOIN_PAIRS
    statements: list[str] = []
    expected: list[tuple[tuple[str, str], tuple[str, str]]] = []
    for i in range(n):
        (lt, lc), (rt, rc) = pool[int(rng.integers(0, len(pool)))]
        shape = i % 5
        if shape == 0:
            stmt = f"SELECT * FROM {lt} JOIN {rt} ON {lt}.{lc} = {rt}.{rc}"
        elif shape == 1:
            stmt = (
                f"select {lt}.{lc} from {lt} a join {rt} b "
                f"on a.{lc} = b.{rc} where a.{lc} > {int(rng.integers(0, 100))}"
            )
        elif shape == 2:
            stmt = f"SELECT count(*) FROM {lt}, {rt} WHERE {lt}.{lc} = {rt}.{rc}"
        elif shape == 3:
            stmt = (
                f"SELECT 1 -- mined workload {i}\n"
                f"FROM {lt} AS x JOIN {rt} AS y ON x.{lc} = y.{rc} "
                f"AND y.{rc} IS NOT NULL"
            )
        else:
            stmt = (
                f"/* batch {i} */ SeLeCt * FroM {lt}, {rt} "
                f"WHERE {lt}.{lc}={rt}.{rc} AND {lt}.{lc} <> 0 LIMIT 10"
            )
        statements.append(stmt)
        expected.append(((lt, lc), (rt, rc)))
    return statements, expected
