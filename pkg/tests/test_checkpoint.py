import numpy as np
import pytest

from recvae.errors import FormatError
from recvae.model import ModelConfig, RecVAE
from recvae.model.checkpoint import decode_checkpoint, encode_checkpoint, load_checkpoint


def test_round_trip(tmp_path):
    cfg = ModelConfig(latent_dim=5, hidden_dim=7, n_layers=2, gamma=0.01)
    model = RecVAE.initialize(cfg, 11, seed=2)
    model.save(tmp_path / "m.rvae", {"note": "x"})
    loaded = RecVAE.load(tmp_path / "m.rvae")
    assert loaded.cfg == cfg
    for k in model.encoder:
        np.testing.assert_array_equal(loaded.encoder[k], model.encoder[k])
    x = np.zeros((2, 11), np.float32)
    x[:, [1, 4]] = 1
    np.testing.assert_array_equal(loaded.predict_scores(x), model.predict_scores(x))
    assert load_checkpoint(tmp_path / "m.rvae")[1]["note"] == "x"


def test_encoding_is_stable():
    tensors = {"b": np.ones((2, 3)), "a": np.arange(4.0)}
    buf = encode_checkpoint("k", {"z": 1, "a": [1, 2]}, tensors)
    assert encode_checkpoint("k", {"a": [1, 2], "z": 1}, dict(reversed(tensors.items()))) == buf
    kind, hyper, out = decode_checkpoint(buf)
    assert kind == "k" and hyper == {"a": [1, 2], "z": 1}
    np.testing.assert_array_equal(out["b"], np.ones((2, 3)))


@pytest.mark.parametrize("mangle, message", [
    (lambda b: b"XXXX" + b[4:], "magic"),
    (lambda b: b[:4] + b"\x09\x00" + b[6:], "version"),
    (lambda b: b[:-1], "truncated"),
    (lambda b: b + b"\0", "trailing"),
])
def test_corrupt_checkpoints_raise(mangle, message):
    buf = encode_checkpoint("recvae", {}, {"t": np.zeros(3)})
    with pytest.raises(FormatError, match=message):
        decode_checkpoint(mangle(buf))
