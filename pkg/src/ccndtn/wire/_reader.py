from .errors import WireError
from .sdnv import sdnv_decode


class Reader:
    """Bounds-checked cursor over a byte buffer.

    Every read is checked against ``end`` so no decoder can look past the
    length it declared.
    """

    __slots__ = ("data", "pos", "end")

    def __init__(self, data, pos: int = 0, end=None):
        self.data = bytes(data)
        self.pos = pos
        self.end = len(self.data) if end is None else end
        if self.end > len(self.data):
            raise WireError("declared length overruns buffer")

    @property
    def remaining(self) -> int:
        return self.end - self.pos

    def byte(self) -> int:
        if self.pos >= self.end:
            raise WireError("truncated: expected 1 more byte")
        b = self.data[self.pos]
        self.pos += 1
        return b

    def take(self, n: int) -> bytes:
        if n > self.remaining:
            raise WireError(f"truncated: need {n} bytes, {self.remaining} left")
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def sdnv(self) -> int:
        if self.pos >= self.end:
            raise WireError("truncated SDNV: no bytes available")
        value, used = sdnv_decode(memoryview(self.data)[:self.end], self.pos)
        self.pos += used
        return value

    def chunk(self) -> bytes:
        """Read an SDNV length followed by that many bytes."""
        return self.take(self.sdnv())

    def sub(self, n: int) -> "Reader":
        """Split off a reader over the next ``n`` bytes."""
        if n > self.remaining:
            raise WireError(f"declared length {n} overruns buffer ({self.remaining} left)")
        r = Reader.__new__(Reader)
        r.data, r.pos, r.end = self.data, self.pos, self.pos + n
        self.pos += n
        return r

    def expect_end(self, what: str = "packet") -> None:
        if self.pos != self.end:
            raise WireError(f"{self.end - self.pos} trailing bytes after {what}")
