import pytest
from hypothesis import given
from hypothesis import strategies as st

from slink.errors import FrameError
from slink.frames import (
    HandshakeFrame,
    ack_transform,
    decode_frame,
    encode_frame,
    validate_ack,
)

valid_address = st.integers(min_value=1, max_value=63)


def test_request_bits_node8_to_node1():
    bits = encode_frame(HandshakeFrame(src=8, dst=1, ack=0))
    assert bits == [1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0]


def test_response_bits_node1_to_node8():
    bits = encode_frame(HandshakeFrame(src=1, dst=8, ack=1))
    assert bits == [1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 1]


def test_encoded_frame_is_14_bits_starting_with_1():
    bits = encode_frame(HandshakeFrame(src=63, dst=1, ack=1))
    assert len(bits) == 14
    assert bits[0] == 1


def test_self_connection_rejected():
    with pytest.raises(FrameError):
        HandshakeFrame(src=5, dst=5, ack=0)


@pytest.mark.parametrize("src,dst", [(0, 1), (1, 0), (64, 1), (1, 64), (-3, 1)])
def test_addresses_outside_range_rejected(src, dst):
    with pytest.raises(FrameError):
        HandshakeFrame(src=src, dst=dst)


def test_decode_example():
    frame = decode_frame([1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0])
    assert frame == HandshakeFrame(src=8, dst=1, ack=0)


def test_decode_rejects_unset_start_bit():
    with pytest.raises(FrameError, match="start bit"):
        decode_frame([0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0])


def test_decode_rejects_zero_address():
    with pytest.raises(FrameError):
        decode_frame([1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0])


def test_decode_rejects_wrong_length():
    with pytest.raises(FrameError):
        decode_frame([1, 0, 1])


def test_exhaustive_round_trip():
    count = 0
    for src in range(1, 64):
        for dst in range(1, 64):
            if src == dst:
                continue
            for ack in (0, 1):
                frame = HandshakeFrame(src=src, dst=dst, ack=ack)
                assert decode_frame(encode_frame(frame)) == frame
                count += 1
    assert count == 7812


def test_ack_transform_example():
    request = HandshakeFrame(src=8, dst=1, ack=0)
    assert ack_transform(request) == HandshakeFrame(src=1, dst=8, ack=1)


def test_ack_transform_boundary_address():
    assert ack_transform(HandshakeFrame(src=63, dst=1)) == HandshakeFrame(
        src=1, dst=63, ack=1
    )


def test_ack_transform_refuses_acked_frame():
    with pytest.raises(FrameError):
        ack_transform(HandshakeFrame(src=1, dst=8, ack=1))


def test_validate_ack_accepts_matching_response():
    request = HandshakeFrame(src=8, dst=1, ack=0)
    assert validate_ack(request, HandshakeFrame(src=1, dst=8, ack=1))


def test_validate_ack_rejects_wrong_responder():
    request = HandshakeFrame(src=8, dst=1, ack=0)
    assert not validate_ack(request, HandshakeFrame(src=2, dst=8, ack=1))


def test_validate_ack_rejects_unset_ack_bit():
    request = HandshakeFrame(src=8, dst=1, ack=0)
    assert not validate_ack(request, HandshakeFrame(src=1, dst=8, ack=0))


@given(src=valid_address, dst=valid_address, ack=st.integers(0, 1))
def test_round_trip_property(src, dst, ack):
    if src == dst:
        return
    frame = HandshakeFrame(src=src, dst=dst, ack=ack)
    assert decode_frame(encode_frame(frame)) == frame


@given(src=valid_address, dst=valid_address)
def test_double_address_swap_is_identity(src, dst):
    if src == dst:
        return
    request = HandshakeFrame(src=src, dst=dst, ack=0)
    response = ack_transform(request)
    assert (response.src, response.dst) == (request.dst, request.src)
