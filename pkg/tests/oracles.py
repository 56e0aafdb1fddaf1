"""Reference implementations used as test oracles.

These are deliberately naive and share no code with the package: they are
written straight from the format and table definitions.
"""

from urllib.parse import unquote_to_bytes


def sdnv_groups(value):
    """SDNV by explicit 7-bit grouping, most significant group first."""
    groups = []
    while True:
        groups.append(value & 0x7F)
        value >>= 7
        if value == 0:
            break
    groups.reverse()
    return bytes([g | 0x80 for g in groups[:-1]] + [groups[-1]])


def sdnv_ungroup(data):
    value = 0
    for i, b in enumerate(data):
        value = (value << 7) | (b & 0x7F)
        if not b & 0x80:
            return value, i + 1
    raise ValueError("truncated")


def percent_split(text):
    """Name text to a list of raw components using urllib's decoder."""
    assert text.startswith("/")
    if text == "/":
        return []
    return [unquote_to_bytes(seg) for seg in text[1:].split("/")]


def lru_simulate(capacity, ops):
    """Replay ``("insert"|"touch", key)`` operations on a plain list, LRU first."""
    order = []
    for op, key in ops:
        if capacity == 0:
            continue
        if key in order:
            order.remove(key)
            order.append(key)
            continue
        if op == "touch":
            continue
        if len(order) >= capacity:
            order.pop(0)
        order.append(key)
    return order


def longest_match_scan(entries, name):
    """Among ``entries`` (tuples of components), the longest that prefixes ``name``."""
    best = None
    for e in entries:
        if tuple(name[:len(e)]) == tuple(e) and (best is None or len(e) > len(best)):
            best = e
    return best


def reference_pipeline(cs_hit, pit_hit, fib_faces, arrival):
    """Expected outcome of an interest arriving on ``arrival``.

    Returns ``(kind, faces)`` where kind is one of "data", "aggregate",
    "forward", "drop" and faces are the faces packets go out on.
    """
    if cs_hit:
        return "data", [arrival]
    if pit_hit:
        return "aggregate", []
    out = sorted(f for f in fib_faces if f != arrival)
    if out:
        return "forward", out
    return "drop", []
