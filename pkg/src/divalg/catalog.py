"""Named identity families.  Squares are written out as products (xx)."""

from .identities import parse_identity

# degree-five identities in x (three times), y, z with letter order x x y x z
TABLE1 = {
    1: "(((xx)y)x)z=(x(xy))(xz)",
    2: "(((xx)y)x)z=(xx)((yx)z)",
    3: "(((xx)y)x)z=(xx)(y(xz))",
    4: "(((xx)y)x)z=x(((xy)x)z)",
    5: "(((xx)y)x)z=x((x(yx))z)",
    6: "(((xx)y)x)z=x((xy)(xz))",
    7: "(((xx)y)x)z=x(x((yx)z))",
    8: "(((xx)y)x)z=x(x(y(xz)))",
    9: "((x(xy))x)z=((xx)y)(xz)",
    10: "((x(xy))x)z=(xx)((yx)z)",
    11: "((x(xy))x)z=(xx)(y(xz))",
    12: "((x(xy))x)z=x((x(yx))z)",
    13: "((x(xy))x)z=x(x((yx)z))",
    14: "((x(xy))x)z=x(x(y(xz)))",
    15: "((xx)(yx))z=((xx)y)(xz)",
    16: "((xx)(yx))z=(x(xy))(xz)",
    17: "((xx)(yx))z=(xx)(y(xz))",
    18: "((xx)(yx))z=x(((xy)x)z)",
    19: "((xx)(yx))z=x((xy)(xz))",
    20: "((xx)(yx))z=x(x(y(xz)))",
    21: "(x((xy)x))z=((xx)y)(xz)",
    22: "(x((xy)x))z=(xx)((yx)z)",
    23: "(x((xy)x))z=(xx)(y(xz))",
    24: "(x((xy)x))z=x((x(yx))z)",
    25: "(x((xy)x))z=x(x((yx)z))",
    26: "(x((xy)x))z=x(x(y(xz)))",
    27: "(x(x(yx)))z=((xx)y)(xz)",
    28: "(x(x(yx)))z=(x(xy))(xz)",
    29: "(x(x(yx)))z=(xx)(y(xz))",
    30: "(x(x(yx)))z=x(((xy)x)z)",
    31: "(x(x(yx)))z=x((xy)(xz))",
    32: "(x(x(yx)))z=x(x(y(xz)))",
    33: "((xx)y)(xz)=(xx)((yx)z)",
    34: "((xx)y)(xz)=x(((xy)x)z)",
    35: "((xx)y)(xz)=x((x(yx))z)",
    36: "((xx)y)(xz)=x(x((yx)z))",
    37: "(x(xy))(xz)=(xx)((yx)z)",
    38: "(x(xy))(xz)=x((x(yx))z)",
    39: "(x(xy))(xz)=x(x((yx)z))",
    40: "(xx)((yx)z)=x(((xy)x)z)",
    41: "(xx)((yx)z)=x((xy)(xz))",
    42: "(xx)((yx)z)=x(x(y(xz)))",
    43: "(xx)(y(xz))=x(((xy)x)z)",
    44: "(xx)(y(xz))=x((x(yx))z)",
    45: "(xx)(y(xz))=x(x((yx)z))",
}

BOL_MOUFANG = {
    "CQ": "x(y(yz))=((xy)y)z",
    "EQ": "x((yx)z)=(xy)(xz)",
    "FQ": "(x(yx))z=((xy)x)z",
    "GR": "(xy)z=x(yz)",
    "LAQ": "x(x(yz))=(xx)(yz)",
    "LBQ": "x(y(xz))=(x(yx))z",
    "LC1": "(xx)(yz)=(x(xy))z",
    "LC2": "x(x(yz))=(x(xy))z",
    "LC3": "x(x(yz))=((xx)y)z",
    "LC4": "x(y(yz))=(x(yy))z",
    "LG1": "x(y(zx))=(x(yz))x",
    "LG2": "(xy)(zz)=(x(yz))z",
    "LG3": "x(y(zy))=(x(yz))y",
    "LNQ": "(xx)(yz)=((xx)y)z",
    "MNQ": "x((yy)z)=(x(yy))z",
    "MQ": "x(y(xz))=((xy)x)z",
    "RAQ": "(x(yy))z=((xy)y)z",
    "RBQ": "x((yz)y)=((xy)z)y",
    "RC1": "x((yz)z)=(xy)(zz)",
    "RC2": "x((yz)z)=((xy)z)z",
    "RC3": "x(y(zz))=((xy)z)z",
    "RC4": "x((yy)z)=((xy)y)z",
    "RG1": "x((xy)z)=((xx)y)z",
    "RG2": "x((xy)z)=(xx)(yz)",
    "RG3": "x((yx)z)=((xy)x)z",
    "RNQ": "x(y(zz))=(xy)(zz)",
}

# uncorrected source forms of two rows: LG2 has an unbalanced parenthesis, RC1 duplicates RNQ
BOL_MOUFANG_UNCORRECTED = {
    "LG2": "(xy)(zz)=((x(yz))z",
    "RC1": "x(y(zz))=(xy)(zz)",
}

# varieties in which every real division algebra is associative
ASSOCIATIVE_TYPES = ("LC3", "LC1", "EQ", "MNQ", "RC3", "RC1")

MOUFANG_BOL = {
    "left-moufang": "((xy)x)z=x(y(xz))",
    "right-moufang": "z(x(yx))=((zx)y)x",
    "middle-moufang": "(xy)(zx)=(x(yz))x",
    "left-bol": "(x(yx))z=x(y(xz))",
    "right-bol": "z((xy)x)=((zx)y)x",
}

INVOLUTIVE_INVERSION = {
    "identity": "x((yz)(xt))=((xy)(zx))t",
}

BALANCED_EXAMPLE = "((x1x2)x3)x4=x3((x2x1)x4)"

FAMILIES = {
    "table1": TABLE1,
    "bol-moufang": BOL_MOUFANG,
    "moufang-bol": MOUFANG_BOL,
    "involutive-inversion": INVOLUTIVE_INVERSION,
}


def _family(name):
    try:
        return FAMILIES[name]
    except KeyError:
        raise KeyError(f"unknown identity family {name!r}; known: {', '.join(FAMILIES)}") from None


def catalog_source(family, key):
    table = _family(family)
    if family == "table1":
        try:
            key = int(key)
        except (TypeError, ValueError):
            raise KeyError(f"table1 keys are integers 1-45, got {key!r}") from None
    if key not in table:
        raise KeyError(f"no entry {key!r} in family {family!r}")
    return table[key]


def catalog(name, key=None):
    """Look up ``"family:key"`` (or ``catalog(family, key)``) and parse it."""
    if key is None:
        if ":" not in name:
            raise KeyError("catalog names have the form family:key")
        name, key = name.split(":", 1)
    return parse_identity(catalog_source(name, key))


def catalog_list(family):
    return [parse_identity(src) for src in _family(family).values()]


def catalog_entries(family):
    """Rows of the form {family, key, lhs, rhs} for serialisation."""
    rows = []
    for key, src in _family(family).items():
        lhs, rhs = src.split("=")
        rows.append({"family": family, "key": key, "lhs": lhs, "rhs": rhs})
    return rows
