import numpy as np
import pytest

from hardsmith import checkpoint
from hardsmith.checkpoint import CheckpointError
from hardsmith.graph import num_pairs
from hardsmith.policy import PolicyConfig, init_params, reinforce_update, sample_graph, forward


def trained(rng, dtype):
    params = init_params(PolicyConfig(7, (4, 9, num_pairs(7)), dtype=dtype), rng)
    for _ in range(3):
        z = rng.standard_normal(4)
        reinforce_update(params, z, sample_graph(forward(params, z), rng), 1.5, 1e-2)
    return params


@pytest.mark.parametrize("dtype", ["float64", "float32"])
def test_round_trip_bit_exact(tmp_path, rng, dtype):
    params = trained(rng, dtype)
    path = tmp_path / "p.ckpt"
    checkpoint.save(params, path)
    back = checkpoint.load(path)
    assert back.step == params.step == 3
    assert back.layer_dims == params.layer_dims
    assert back.dtype == params.dtype
    for a, b in zip(params.arrays(), back.arrays()):
        assert a.shape == b.shape and a.tobytes() == b.tobytes()
    assert checkpoint.dumps(back) == path.read_bytes()
    assert not (tmp_path / "p.ckpt.tmp").exists()


def test_header_layout(rng):
    data = checkpoint.dumps(trained(rng, "float64"))
    assert data[:8] == b"HSPOLICY"
    assert int.from_bytes(data[8:12], "little") == checkpoint.VERSION


def test_flipped_byte_detected(rng):
    data = bytearray(checkpoint.dumps(trained(rng, "float64")))
    data[len(data) // 2] ^= 0x01
    with pytest.raises(CheckpointError, match="checksum"):
        checkpoint.loads(bytes(data))


def test_truncated_and_garbage(rng):
    data = checkpoint.dumps(trained(rng, "float64"))
    with pytest.raises(CheckpointError):
        checkpoint.loads(data[:-40])
    with pytest.raises(CheckpointError, match="magic"):
        checkpoint.loads(b"not a checkpoint at all, clearly" * 3)


def test_missing_file(tmp_path):
    with pytest.raises(CheckpointError):
        checkpoint.load(tmp_path / "absent.ckpt")
