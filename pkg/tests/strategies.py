"""Hypothesis strategies for names, packets and bundles."""

from hypothesis import strategies as st

from ccndtn.names import Eid, Name
from ccndtn.wire import BpqBlock, BpqKind, Bundle, Data, Interest, StatusResponse

components = st.binary(min_size=1, max_size=12)
names = st.lists(components, max_size=6).map(Name)
u64 = st.integers(min_value=0, max_value=2**64 - 1)
small = st.integers(min_value=0, max_value=2**40)

interests = st.builds(
    Interest, names, st.binary(min_size=8, max_size=8), st.integers(min_value=1, max_value=2**40)
)
datas = st.builds(Data, names, st.binary(max_size=256), small, st.binary(max_size=32))
statuses = st.builds(StatusResponse, names, st.integers(min_value=100, max_value=999))
ccn_packets = st.one_of(interests, datas, statuses)

eids = st.builds(
    Eid,
    st.text("abcdefghijklmnopqrstuvwxyz0123456789", min_size=1, max_size=6),
    st.text(min_size=0, max_size=16),
)
timestamps = st.tuples(small, st.integers(min_value=0, max_value=1000))


@st.composite
def bpq_blocks(draw):
    frags = draw(st.lists(st.tuples(small, small), max_size=4))
    return BpqBlock(
        draw(st.sampled_from(list(BpqKind))),
        draw(st.binary(max_size=40)),
        draw(timestamps),
        len(frags),
        tuple(frags),
    )


bundles = st.builds(
    Bundle,
    eids,
    eids,
    timestamps,
    small,
    st.integers(min_value=0, max_value=255),
    st.binary(max_size=256),
    st.one_of(st.none(), bpq_blocks()),
)
