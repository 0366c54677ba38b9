"""Flat ``key = value`` config text with dotted keys for nesting.

Values are parsed as int, float, bool, or comma-separated lists of those,
falling back to plain strings.  Blank lines and ``#`` comments are ignored.
"""

__all__ = ["loads_kv", "dumps_kv", "nest", "flatten"]


def _parse_scalar(text):
    text = text.strip()
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    if low in ("none", "null", ""):
        return None
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    return text


def _parse_value(text):
    text = text.strip()
    if "," in text:
        return [_parse_scalar(part) for part in text.split(",")]
    return _parse_scalar(text)


def loads_kv(text):
    """Parse config text into a flat dict of dotted keys."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = _parse_value(value)
    return out


def _format_value(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "none"
    if isinstance(value, (list, tuple)):
        return ",".join(_format_value(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def dumps_kv(flat):
    """Format a flat dict of dotted keys as config text."""
    lines = [f"{key} = {_format_value(value)}" for key, value in flat.items()]
    return "\n".join(lines) + "\n"


def nest(flat):
    """Group dotted keys into nested dicts: {'a.b': 1} -> {'a': {'b': 1}}."""
    out = {}
    for key, value in flat.items():
        parts = key.split(".")
        node = out
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = value
    return out


def flatten(nested, prefix=""):
    """Inverse of nest."""
    out = {}
    for key, value in nested.items():
        full = f"{prefix}{key}"
        if isinstance(value, dict):
            out.update(flatten(value, prefix=f"{full}."))
        else:
            out[full] = value
    return out
